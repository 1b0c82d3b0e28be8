//! Frame pullback `f ↦ f∘W` for a constant matrix `W` on the periodic grid.
//!
//! `W` does not map the lattice to itself, so the pulled-back samples need an
//! interpolant of `f`:
//!
//! * [`Interpolation::SpectralResample`] evaluates the trigonometric
//!   interpolant exactly along grid lines. `W` is split into `K` near-identity
//!   factors `W_s = W^{1/K}`, each factored as `P·L·U`; `f∘W_s` is then an axis
//!   permutation followed by four single-axis affine resamplings, each an FFT
//!   along the line and a dense evaluation at the moved nodes. Keeping the
//!   factors near the identity keeps every intermediate function well resolved
//!   and inside the box.
//! * [`Interpolation::DirectSpectral`] sums the full 3-D interpolant at every
//!   warped node (`O(n⁶)`); the reference for small grids.
//! * [`Interpolation::Trilinear`] is periodic trilinear interpolation of the
//!   samples; second-order accurate and cheap.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FlowMatrix;
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

use super::fft::{line_base, line_stride, Fft3};
use super::field::{czero, GridField, Rep};
use super::grid::GridSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    Trilinear,
    SpectralResample,
    DirectSpectral,
}

impl std::str::FromStr for Interpolation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trilinear" => Ok(Self::Trilinear),
            "spectral-resample" => Ok(Self::SpectralResample),
            "direct-spectral" => Ok(Self::DirectSpectral),
            _ => Err(Error::Parse(format!(
                "unknown interpolation `{s}` (expected trilinear, spectral-resample or direct-spectral)"
            ))),
        }
    }
}

/// Largest grid for which [`Interpolation::DirectSpectral`] is accepted.
pub const DIRECT_SPECTRAL_MAX_N: usize = 32;

/// `x ↦ f(e^{tF}x)`, splitting into substeps so that `‖tF‖/K ≤ max_substep`.
pub fn pullback_flow<T: Real>(
    field: &GridField<T>,
    flow: &FlowMatrix<T>,
    t: T,
    method: Interpolation,
    max_substep: T,
    plan: &Fft3<T>,
) -> Result<GridField<T>> {
    field.expect_rep(Rep::Physical)?;
    if t == T::zero() || flow.matrix().max_abs() == T::zero() {
        return Ok(field.clone());
    }
    match method {
        Interpolation::SpectralResample => {
            let norm = flow.matrix().frobenius() * t.abs();
            let k = (norm / max_substep).ceil().to_usize().unwrap_or(1).max(1);
            let step = flow.exp(t / T::from_usize_lossy(k));
            let mut out = field.clone();
            for _ in 0..k {
                out = resample_affine(&out, &step, plan)?;
            }
            Ok(out)
        }
        _ => pullback(field, &flow.exp(t), method, plan),
    }
}

/// `x ↦ f(Wx)` in one step.
pub fn pullback<T: Real>(
    field: &GridField<T>,
    w: &Mat3<T>,
    method: Interpolation,
    plan: &Fft3<T>,
) -> Result<GridField<T>> {
    field.expect_rep(Rep::Physical)?;
    match method {
        Interpolation::Trilinear => Ok(trilinear(field, w)),
        Interpolation::SpectralResample => resample_affine(field, w, plan),
        Interpolation::DirectSpectral => {
            if field.spec().n > DIRECT_SPECTRAL_MAX_N {
                return Err(Error::InvalidGrid(format!(
                    "direct spectral evaluation is limited to n ≤ {DIRECT_SPECTRAL_MAX_N}"
                )));
            }
            let fourier = field.to_fourier_with(plan)?;
            let spec = *field.spec();
            let mut out = GridField::zeros(spec, Rep::Physical);
            for idx in 0..spec.len() {
                let v = evaluate_interpolant(&fourier, w.mul_vec(spec.point(idx)))?;
                for (c, val) in v.into_iter().enumerate() {
                    out.components_mut()[c][idx] = val;
                }
            }
            Ok(out)
        }
    }
}

/// Basis values `φ_k(s)` of the 1-D trigonometric interpolant at `s`.
fn basis<T: Real>(spec: &GridSpec<T>, s: T) -> Vec<Complex<T>> {
    let n = spec.n;
    let rel = s - spec.origin();
    (0..n)
        .map(|k| {
            let arg = T::two_pi() * spec.frequency(k) * rel;
            if spec.is_nyquist(k) {
                Complex::new(arg.cos(), T::zero())
            } else {
                Complex::from_polar(T::one(), arg)
            }
        })
        .collect()
}

/// Value at an arbitrary point `y` of the periodic trigonometric interpolant
/// of a field given by its Fourier data (Nyquist modes taken as cosines).
pub fn evaluate_interpolant<T: Real>(fourier: &GridField<T>, y: Vec3<T>) -> Result<[Complex<T>; 3]> {
    fourier.expect_rep(Rep::Fourier)?;
    let spec = fourier.spec();
    let n = spec.n;
    let b = [basis(spec, y.0[0]), basis(spec, y.0[1]), basis(spec, y.0[2])];
    let mut out = [czero(); 3];
    let scale = T::one() / T::from_usize_lossy(spec.len());
    for (c, data) in fourier.components().iter().enumerate() {
        let mut acc: Complex<T> = czero();
        for l in 0..n {
            let mut acc_j: Complex<T> = czero();
            for j in 0..n {
                let row = &data[n * (j + n * l)..n * (j + n * l) + n];
                let mut acc_i: Complex<T> = czero();
                for i in 0..n {
                    acc_i += row[i] * b[0][i];
                }
                acc_j += acc_i * b[1][j];
            }
            acc += acc_j * b[2][l];
        }
        out[c] = acc * scale;
    }
    Ok(out)
}

/// Periodic trilinear interpolation of the samples at `Wx`.
fn trilinear<T: Real>(field: &GridField<T>, w: &Mat3<T>) -> GridField<T> {
    let spec = *field.spec();
    let n = spec.n;
    let nf = T::from_usize_lossy(n);
    let h = spec.spacing();
    let mut out = GridField::zeros(spec, Rep::Physical);
    let src = field.components();
    for idx in 0..spec.len() {
        let y = w.mul_vec(spec.point(idx));
        let mut base = [0usize; 3];
        let mut frac = [T::zero(); 3];
        for a in 0..3 {
            let raw = (y.0[a] - spec.origin()) / h;
            let u = raw - nf * (raw / nf).floor();
            let fl = u.floor();
            frac[a] = u - fl;
            base[a] = fl.to_usize().unwrap_or(0) % n;
        }
        let mut acc = [czero(); 3];
        for corner in 0..8 {
            let mut weight = T::one();
            let mut pos = [0usize; 3];
            for a in 0..3 {
                let up = (corner >> a) & 1 == 1;
                weight *= if up { frac[a] } else { T::one() - frac[a] };
                pos[a] = if up { (base[a] + 1) % n } else { base[a] };
            }
            let s = spec.index(pos[0], pos[1], pos[2]);
            for c in 0..3 {
                acc[c] += src[c][s] * weight;
            }
        }
        for c in 0..3 {
            out.components_mut()[c][idx] = acc[c];
        }
    }
    out
}

/// `f∘W` by `W = P·L·U` and single-axis spectral resamplings.
fn resample_affine<T: Real>(field: &GridField<T>, w: &Mat3<T>, plan: &Fft3<T>) -> Result<GridField<T>> {
    let lu = w
        .lu()
        .ok_or_else(|| Error::InvalidArgument("pullback matrix is singular".into()))?;
    let (l, u) = (lu.l.0, lu.u.0);
    let one = T::one();
    let zero = T::zero();
    // LU = E₂·C₃·R₂·R₁ (row replacements); the function passes apply the
    // factors left to right.
    let passes: [(usize, [T; 3]); 4] = [
        (1, [l[1][0], one, zero]),
        (2, [l[2][0], l[2][1], u[2][2]]),
        (1, [zero, u[1][1], u[1][2]]),
        (0, [u[0][0], u[0][1], u[0][2]]),
    ];
    let spec = *field.spec();
    let mut out = permute_axes(field, lu.perm);
    for (axis, coeffs) in passes {
        let mut identity = [zero; 3];
        identity[axis] = one;
        if coeffs == identity {
            continue;
        }
        let pass = AxisPass::new(&spec, axis, coeffs);
        for c in out.components_mut().iter_mut() {
            pass.apply(c, plan);
        }
    }
    Ok(out)
}

/// `g(y) = f(Py)` with `(Py)_i = y[perm[i]]`.
fn permute_axes<T: Real>(field: &GridField<T>, perm: [usize; 3]) -> GridField<T> {
    if perm == [0, 1, 2] {
        return field.clone();
    }
    let spec = *field.spec();
    let mut out = GridField::zeros(spec, Rep::Physical);
    for idx in 0..spec.len() {
        let (i, j, l) = spec.unravel(idx);
        let y = [i, j, l];
        let src = spec.index(y[perm[0]], y[perm[1]], y[perm[2]]);
        for c in 0..3 {
            out.components_mut()[c][idx] = field.components()[c][src];
        }
    }
    out
}

/// `f(x) ↦ f(x with x_axis replaced by c·x)` along every line of `axis`.
struct AxisPass<T: Real> {
    spec: GridSpec<T>,
    axis: usize,
    coeffs: [T; 3],
    /// `E[j·n + k] = e^{2πiξ_k(αs_j − s₀)}/n` split into real and imaginary
    /// parts, Nyquist column zero.
    eval_re: Vec<T>,
    eval_im: Vec<T>,
}

impl<T: Real> AxisPass<T> {
    fn new(spec: &GridSpec<T>, axis: usize, coeffs: [T; 3]) -> Self {
        let n = spec.n;
        let alpha = coeffs[axis];
        let inv_n = T::one() / T::from_usize_lossy(n);
        let mut eval_re = vec![T::zero(); n * n];
        let mut eval_im = vec![T::zero(); n * n];
        for j in 0..n {
            let s = alpha * spec.coordinate(j) - spec.origin();
            for k in 0..n {
                if !spec.is_nyquist(k) {
                    let e = Complex::from_polar(inv_n, T::two_pi() * spec.frequency(k) * s);
                    eval_re[j * n + k] = e.re;
                    eval_im[j * n + k] = e.im;
                }
            }
        }
        Self { spec: *spec, axis, coeffs, eval_re, eval_im }
    }

    /// Lines sharing an `outer` index are resampled together: their shifted
    /// spectra form the columns of `X` and the new samples are `E·X`.
    fn apply(&self, data: &mut [Complex<T>], plan: &Fft3<T>) {
        let spec = &self.spec;
        let n = spec.n;
        let nyq = n / 2;
        let stride = line_stride(n, self.axis);
        let (a0, a1) = match self.axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let alpha = self.coeffs[self.axis];
        let inv_n = T::one() / T::from_usize_lossy(n);
        let mut line = vec![czero(); n];
        let (mut xr, mut xi) = (vec![T::zero(); n * n], vec![T::zero(); n * n]);
        let (mut yr, mut yi) = (vec![T::zero(); n * n], vec![T::zero(); n * n]);
        let mut betas = vec![T::zero(); n];
        let mut nyquist = vec![czero(); n];
        for outer in 0..n {
            for inner in 0..n {
                let base = line_base(n, self.axis, inner, outer);
                let beta = self.coeffs[a0] * spec.coordinate(inner) + self.coeffs[a1] * spec.coordinate(outer);
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + k * stride];
                }
                plan.forward_1d().process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    let shifted = if k == nyq {
                        czero()
                    } else {
                        *v * Complex::from_polar(T::one(), T::two_pi() * spec.frequency(k) * beta)
                    };
                    xr[k * n + inner] = shifted.re;
                    xi[k * n + inner] = shifted.im;
                }
                betas[inner] = beta;
                nyquist[inner] = line[nyq];
            }
            yr.iter_mut().for_each(|v| *v = T::zero());
            yi.iter_mut().for_each(|v| *v = T::zero());
            for j in 0..n {
                let yrj = &mut yr[j * n..(j + 1) * n];
                let yij = &mut yi[j * n..(j + 1) * n];
                for k in 0..n {
                    let (er, ei) = (self.eval_re[j * n + k], self.eval_im[j * n + k]);
                    let xrk = &xr[k * n..(k + 1) * n];
                    let xik = &xi[k * n..(k + 1) * n];
                    for (((r, i), a), b) in yrj.iter_mut().zip(yij.iter_mut()).zip(xrk).zip(xik) {
                        *r += er * *a - ei * *b;
                        *i += er * *b + ei * *a;
                    }
                }
            }
            for inner in 0..n {
                let base = line_base(n, self.axis, inner, outer);
                for j in 0..n {
                    let s = alpha * spec.coordinate(j) + betas[inner] - spec.origin();
                    let cosine = (T::PI() * T::from_usize_lossy(n) * s / spec.box_length).cos();
                    data[base + j * stride] =
                        Complex::new(yr[j * n + inner], yi[j * n + inner]) + nyquist[inner] * (cosine * inv_n);
                }
            }
        }
    }
}
