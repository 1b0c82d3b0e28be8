use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scalar::Real;

/// Periodic `n³` grid on the box `[−L/2, L/2)³`.
///
/// Sample `j` along an axis sits at `x_j = (j − n/2)·h`, `h = L/n`; DFT index
/// `k` corresponds to the frequency `ξ_k = k̃/L` with `k̃ ∈ [−n/2, n/2)` the
/// signed representative of `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec<T> {
    pub n: usize,
    pub box_length: T,
}

pub const DEFAULT_GRID_N: usize = 64;

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self { n: DEFAULT_GRID_N, box_length: T::two_pi() * T::lit(8.0) }
    }
}

impl<T: Real> GridSpec<T> {
    pub fn new(n: usize, box_length: T) -> Result<Self> {
        let spec = Self { n, box_length };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 || !self.n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n must be even and at least 8, got {}", self.n)));
        }
        if self.n > 1024 {
            return Err(Error::InvalidGrid(format!("n = {} exceeds the supported maximum of 1024", self.n)));
        }
        if !(self.box_length > T::zero()) || !self.box_length.is_finite() {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {}", self.box_length)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> T {
        self.box_length / T::from_usize_lossy(self.n)
    }

    /// `h³`, the quadrature weight of one sample.
    pub fn cell_volume(&self) -> T {
        let h = self.spacing();
        h * h * h
    }

    /// Coordinate of sample `j` along any axis.
    #[inline]
    pub fn coordinate(&self, j: usize) -> T {
        (T::from_usize_lossy(j) - T::from_usize_lossy(self.n / 2)) * self.spacing()
    }

    /// Left edge `−L/2` of the box.
    pub fn origin(&self) -> T {
        -self.box_length * T::lit(0.5)
    }

    /// Signed wavenumber of DFT index `k`.
    #[inline]
    pub fn signed_index(&self, k: usize) -> i64 {
        let n = self.n as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// `ξ_k` for DFT index `k`.
    #[inline]
    pub fn frequency(&self, k: usize) -> T {
        T::from_i64(self.signed_index(k)).expect("grid index fits scalar") / self.box_length
    }

    /// Highest resolvable frequency `n/(2L)`.
    pub fn nyquist(&self) -> T {
        T::from_usize_lossy(self.n) / (T::lit(2.0) * self.box_length)
    }

    /// Flat index, x fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        i + self.n * (j + self.n * l)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx % n, (idx / n) % n, idx / (n * n))
    }

    pub fn point(&self, idx: usize) -> Vec3<T> {
        let (i, j, l) = self.unravel(idx);
        Vec3::new(self.coordinate(i), self.coordinate(j), self.coordinate(l))
    }

    pub fn wavevector(&self, idx: usize) -> Vec3<T> {
        let (i, j, l) = self.unravel(idx);
        Vec3::new(self.frequency(i), self.frequency(j), self.frequency(l))
    }

    /// Flat index of the mode `−ξ`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        let n = self.n;
        let (i, j, l) = self.unravel(idx);
        self.index((n - i) % n, (n - j) % n, (n - l) % n)
    }

    pub fn is_nyquist(&self, k: usize) -> bool {
        k == self.n / 2
    }
}
