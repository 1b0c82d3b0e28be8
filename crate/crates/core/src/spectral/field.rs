use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

use super::fft::Fft3;
use super::grid::GridSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rep {
    /// Point samples at the grid nodes.
    Physical,
    /// Unnormalised DFT of the point samples (see [`GridSpec`] for the
    /// index-to-frequency map).
    Fourier,
}

impl Rep {
    pub fn name(self) -> &'static str {
        match self {
            Rep::Physical => "physical",
            Rep::Fourier => "fourier",
        }
    }
}

/// Complex three-component vector field on a periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField<T> {
    spec: GridSpec<T>,
    rep: Rep,
    data: [Vec<Complex<T>>; 3],
}

pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> GridField<T> {
    pub fn zeros(spec: GridSpec<T>, rep: Rep) -> Self {
        let len = spec.len();
        Self { spec, rep, data: [vec![czero(); len], vec![czero(); len], vec![czero(); len]] }
    }

    pub fn from_components(spec: GridSpec<T>, rep: Rep, data: [Vec<Complex<T>>; 3]) -> Result<Self> {
        spec.validate()?;
        if data.iter().any(|c| c.len() != spec.len()) {
            return Err(Error::InvalidGrid(format!("each component needs n³ = {} values", spec.len())));
        }
        Ok(Self { spec, rep, data })
    }

    /// Samples `f(x)` at every grid node.
    pub fn from_fn<F: Fn(Vec3<T>) -> [Complex<T>; 3]>(spec: GridSpec<T>, f: F) -> Self {
        let mut out = Self::zeros(spec, Rep::Physical);
        for idx in 0..spec.len() {
            let v = f(spec.point(idx));
            for c in 0..3 {
                out.data[c][idx] = v[c];
            }
        }
        out
    }

    /// Samples a real vector field.
    pub fn from_real_fn<F: Fn(Vec3<T>) -> Vec3<T>>(spec: GridSpec<T>, f: F) -> Self {
        Self::from_fn(spec, |x| f(x).0.map(|v| Complex::new(v, T::zero())))
    }

    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn components(&self) -> &[Vec<Complex<T>>; 3] {
        &self.data
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex<T>>; 3] {
        &mut self.data
    }

    pub fn into_components(self) -> [Vec<Complex<T>>; 3] {
        self.data
    }

    pub fn value(&self, idx: usize) -> [Complex<T>; 3] {
        [self.data[0][idx], self.data[1][idx], self.data[2][idx]]
    }

    pub fn expect_rep(&self, rep: Rep) -> Result<()> {
        if self.rep != rep {
            return Err(Error::RepMismatch { expected: rep.name(), found: self.rep.name() });
        }
        Ok(())
    }

    pub fn to_fourier_with(&self, plan: &Fft3<T>) -> Result<Self> {
        self.expect_rep(Rep::Physical)?;
        let mut out = self.clone();
        for c in out.data.iter_mut() {
            plan.forward(c);
        }
        out.rep = Rep::Fourier;
        Ok(out)
    }

    pub fn to_physical_with(&self, plan: &Fft3<T>) -> Result<Self> {
        self.expect_rep(Rep::Fourier)?;
        let mut out = self.clone();
        for c in out.data.iter_mut() {
            plan.inverse(c);
        }
        out.rep = Rep::Physical;
        Ok(out)
    }

    pub fn to_fourier(&self) -> Result<Self> {
        self.to_fourier_with(&Fft3::new(self.spec.n))
    }

    pub fn to_physical(&self) -> Result<Self> {
        self.to_physical_with(&Fft3::new(self.spec.n))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::InvalidGrid("fields live on different grids".into()));
        }
        if self.rep != other.rep {
            return Err(Error::RepMismatch { expected: self.rep.name(), found: other.rep.name() });
        }
        Ok(())
    }

    /// Discrete L² norm `(h³ Σ |φ|²)^{1/2}` (Physical), or the Parseval-equivalent
    /// value from Fourier data.
    pub fn norm(&self) -> T {
        let s: T = self.data.iter().flat_map(|c| c.iter()).fold(T::zero(), |acc, v| acc + v.norm_sqr());
        let w = match self.rep {
            Rep::Physical => self.spec.cell_volume(),
            Rep::Fourier => self.spec.cell_volume() / T::from_usize_lossy(self.spec.len()),
        };
        (s * w).sqrt()
    }

    /// Maximum pointwise Euclidean magnitude.
    pub fn max_magnitude(&self) -> T {
        (0..self.spec.len())
            .map(|i| self.value(i).iter().fold(T::zero(), |acc, v| acc + v.norm_sqr()).sqrt())
            .fold(T::zero(), T::max)
    }

    /// Discrete inner product `⟨u, v⟩ = h³ Σ u·v̄` (Physical rep).
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_compatible(other)?;
        self.expect_rep(Rep::Physical)?;
        let mut acc = czero();
        for c in 0..3 {
            for (u, v) in self.data[c].iter().zip(&other.data[c]) {
                acc += u * v.conj();
            }
        }
        Ok(acc * self.spec.cell_volume())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for c in 0..3 {
            for (u, v) in out.data[c].iter_mut().zip(&other.data[c]) {
                *u = f(*u, *v);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        for c in out.data.iter_mut() {
            for v in c.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    /// `φ(x) ↦ Cφ(x)` with a constant matrix.
    pub fn left_multiply(&self, m: &Mat3<T>) -> Self {
        let mut out = self.clone();
        let m = m.0;
        for idx in 0..self.spec.len() {
            let v = self.value(idx);
            for (r, row) in m.iter().enumerate() {
                out.data[r][idx] = v[0] * row[0] + v[1] * row[1] + v[2] * row[2];
            }
        }
        out
    }

    /// Largest imaginary part of the physical samples (zero for real fields).
    pub fn max_imaginary(&self) -> Result<T> {
        self.expect_rep(Rep::Physical)?;
        Ok(self.data.iter().flat_map(|c| c.iter()).fold(T::zero(), |m, v| m.max(v.im.abs())))
    }

    /// Discards imaginary parts, projecting onto real fields (equivalently,
    /// symmetrising the spectrum to `φ̂(−ξ) = conj φ̂(ξ)`).
    pub fn real_part(&self) -> Result<Self> {
        self.expect_rep(Rep::Physical)?;
        let mut out = self.clone();
        for c in out.data.iter_mut() {
            for v in c.iter_mut() {
                v.im = T::zero();
            }
        }
        Ok(out)
    }

    /// Largest deviation from Hermitian symmetry `φ̂(−ξ) = conj φ̂(ξ)` of
    /// Fourier data, relative to its largest coefficient.
    pub fn hermitian_defect(&self) -> Result<T> {
        self.expect_rep(Rep::Fourier)?;
        let mut defect = T::zero();
        let mut scale = T::zero();
        for c in &self.data {
            for idx in 0..self.spec.len() {
                let m = self.spec.mirror(idx);
                defect = defect.max((c[idx] - c[m].conj()).norm());
                scale = scale.max(c[idx].norm());
            }
        }
        Ok(if scale > T::zero() { defect / scale } else { T::zero() })
    }

    /// Fraction of the L² mass lying within `margin` of the box faces; a
    /// proxy for wrap-around leakage of fields meant to live on ℝ³.
    pub fn boundary_fraction(&self, margin: T) -> Result<T> {
        self.expect_rep(Rep::Physical)?;
        let half = self.spec.box_length * T::lit(0.5) - margin;
        let (mut edge, mut total) = (T::zero(), T::zero());
        for idx in 0..self.spec.len() {
            let w: T = self.value(idx).iter().fold(T::zero(), |a, v| a + v.norm_sqr());
            total += w;
            if self.spec.point(idx).max_abs() > half {
                edge += w;
            }
        }
        Ok(if total > T::zero() { edge / total } else { T::zero() })
    }
}

/// Isotropic Gaussian `exp(−|x − c|²/(2σ²))`.
pub fn gaussian<T: Real>(x: Vec3<T>, center: Vec3<T>, sigma: T) -> T {
    let d = x - center;
    (-d.norm_sq() / (T::lit(2.0) * sigma * sigma)).exp()
}
