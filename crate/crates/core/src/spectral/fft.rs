//! Three-dimensional complex DFT on `n³` arrays (x fastest), built from
//! batched one-dimensional `rustfft` transforms.
//!
//! Forward transform is unnormalised; the inverse carries the `1/n³`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

pub struct Fft3<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for Fft3<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl<T: Real> Fft3<T> {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn forward_1d(&self) -> &Arc<dyn Fft<T>> {
        &self.forward
    }

    pub fn forward(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.inverse);
        let scale = T::one() / T::from_usize_lossy(data.len());
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex<T>], fft: &Arc<dyn Fft<T>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "array length must be n³");
        // Axis 0 lines are contiguous.
        fft.process(data);
        // Axes 1 and 2: gather a plane of lines, transform as one batch, scatter.
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n * n];
        for axis in [1usize, 2] {
            let stride = if axis == 1 { n } else { n * n };
            for outer in 0..n {
                // Lines indexed by (inner, outer) over the two remaining axes.
                for inner in 0..n {
                    let base = line_base(n, axis, inner, outer);
                    for k in 0..n {
                        buf[inner * n + k] = data[base + k * stride];
                    }
                }
                fft.process(&mut buf);
                for inner in 0..n {
                    let base = line_base(n, axis, inner, outer);
                    for k in 0..n {
                        data[base + k * stride] = buf[inner * n + k];
                    }
                }
            }
        }
    }
}

/// Flat offset of the first element of a line along `axis`; `inner` and
/// `outer` enumerate the other two axes in increasing order.
#[inline]
pub(crate) fn line_base(n: usize, axis: usize, inner: usize, outer: usize) -> usize {
    match axis {
        0 => n * (inner + n * outer),
        1 => inner + n * n * outer,
        _ => inner + n * outer,
    }
}

/// Stride between consecutive elements of a line along `axis`.
#[inline]
pub(crate) fn line_stride(n: usize, axis: usize) -> usize {
    match axis {
        0 => 1,
        1 => n,
        _ => n * n,
    }
}
