//! Fixed-size 3-vectors and 3×3 matrices.
//!
//! Everything in the crate lives in ℝ³, so a dense general-purpose linear
//! algebra dependency would only add conversions. These types are `Copy` and
//! row-major.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec3<T>(pub [T; 3]);

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self([x, y, z])
    }

    pub fn zero() -> Self {
        Self([T::zero(); 3])
    }

    pub fn from_f64(v: [f64; 3]) -> Self {
        Self([T::lit(v[0]), T::lit(v[1]), T::lit(v[2])])
    }

    pub fn to_f64(self) -> [f64; 3] {
        self.0.map(Real::to_f64_lossy)
    }

    pub fn dot(self, other: Self) -> T {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(self, o: Self) -> Self {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Self([b * z - c * y, c * x - a * z, a * y - b * x])
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(self) -> T {
        self.0.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn scale(self, s: T) -> Self {
        Self(self.0.map(|v| v * s))
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn is_zero(self) -> bool {
        self.0.iter().all(|v| v.is_zero())
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self.scale(T::one() / n))
        } else {
            None
        }
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vec3<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|v| -v))
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

/// Row-major 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat3<T>(pub [[T; 3]; 3]);

impl<T: Real> Mat3<T> {
    pub fn zero() -> Self {
        Self([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one(), T::one())
    }

    pub fn diag(a: T, b: T, c: T) -> Self {
        let z = T::zero();
        Self([[a, z, z], [z, b, z], [z, z, c]])
    }

    pub fn from_f64(m: [[f64; 3]; 3]) -> Self {
        Self(m.map(|row| row.map(T::lit)))
    }

    pub fn to_f64(self) -> [[f64; 3]; 3] {
        self.0.map(|row| row.map(Real::to_f64_lossy))
    }

    pub fn from_rows(r0: Vec3<T>, r1: Vec3<T>, r2: Vec3<T>) -> Self {
        Self([r0.0, r1.0, r2.0])
    }

    pub fn row(&self, i: usize) -> Vec3<T> {
        Vec3(self.0[i])
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Self([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.map(|row| row.map(|v| v * s)))
    }

    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3([self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v)])
    }

    /// `vᵀ M` as a vector, i.e. `Mᵀ v`.
    pub fn tr_mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3([self.col(0).dot(v), self.col(1).dot(v), self.col(2).dot(v)])
    }

    /// Quadratic form `v · M v`.
    pub fn quad(&self, v: Vec3<T>) -> T {
        v.dot(self.mul_vec(v))
    }

    /// Bilinear form `u · M v`.
    pub fn bilinear(&self, u: Vec3<T>, v: Vec3<T>) -> T {
        u.dot(self.mul_vec(v))
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> T {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Sum of the three principal 2×2 minors (second characteristic
    /// coefficient): `χ(x) = x³ − tr·x² + c₂·x − det`.
    pub fn principal_minor_sum(&self) -> T {
        let m = &self.0;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0])
            + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
            + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
    }

    pub fn adjugate(&self) -> Self {
        let m = &self.0;
        let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        Self([
            [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
            [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
            [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
        ])
    }

    /// Inverse via the adjugate; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == T::zero() || !d.is_finite() {
            return None;
        }
        Some(self.adjugate().scale(T::one() / d))
    }

    pub fn frobenius(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |acc, v| acc + *v * *v)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|v| v.is_finite())
    }

    /// Symmetric part `(M + Mᵀ)/2`.
    pub fn sym(&self) -> Self {
        (*self + self.transpose()).scale(T::lit(0.5))
    }

    /// Largest singular value, from the largest eigenvalue of `MᵀM`.
    pub fn spectral_norm(&self) -> T {
        let g = self.transpose() * *self;
        let ev = symmetric_eigenvalues(&g);
        ev[2].max(T::zero()).sqrt()
    }

    /// Lower Cholesky factor of a symmetric positive-definite matrix.
    pub fn cholesky(&self) -> Option<Self> {
        let a = &self.0;
        let mut l = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..=i {
                let mut s = a[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                if i == j {
                    if s <= T::zero() {
                        return None;
                    }
                    l[i][i] = s.sqrt();
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        Some(Self(l))
    }

    /// LU factorisation with partial pivoting, `self = P·L·U` with `L` unit
    /// lower triangular. `perm[i]` is the column of the permutation matrix
    /// holding the 1 in row `i`, so `(P x)_i = x[perm[i]]`.
    pub fn lu(&self) -> Option<Lu<T>> {
        let mut a = self.0;
        // rows[i] = original row index currently in position i
        let mut rows = [0usize, 1, 2];
        let mut l = [[T::zero(); 3]; 3];
        for k in 0..3 {
            let mut p = k;
            for i in (k + 1)..3 {
                if a[i][k].abs() > a[p][k].abs() {
                    p = i;
                }
            }
            if a[p][k] == T::zero() {
                return None;
            }
            a.swap(k, p);
            l.swap(k, p);
            rows.swap(k, p);
            for i in (k + 1)..3 {
                let f = a[i][k] / a[k][k];
                l[i][k] = f;
                for j in k..3 {
                    let v = a[k][j];
                    a[i][j] -= f * v;
                }
            }
        }
        for (i, row) in l.iter_mut().enumerate() {
            row[i] = T::one();
        }
        // Row i of (L U) equals original row rows[i], so M = Pᵀ' (L U) where
        // the permutation places row i of LU at position rows[i].
        let mut perm = [0usize; 3];
        for (i, &r) in rows.iter().enumerate() {
            perm[r] = i;
        }
        Some(Lu { perm, l: Self(l), u: Self(a) })
    }
}

/// Result of [`Mat3::lu`].
#[derive(Clone, Copy, Debug)]
pub struct Lu<T> {
    pub perm: [usize; 3],
    pub l: Mat3<T>,
    pub u: Mat3<T>,
}

impl<T: Real> Lu<T> {
    pub fn permutation_matrix(&self) -> Mat3<T> {
        let mut p = Mat3::zero();
        for (i, &j) in self.perm.iter().enumerate() {
            p.0[i][j] = T::one();
        }
        p
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut r = self;
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] += o.0[i][j];
            }
        }
        r
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut r = self;
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] -= o.0[i][j];
            }
        }
        r
    }
}

impl<T: Real> Neg for Mat3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = T::zero();
                for k in 0..3 {
                    s += self.0[i][k] * o.0[k][j];
                }
                r.0[i][j] = s;
            }
        }
        r
    }
}

impl<T: Real> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        self.mul_vec(v)
    }
}

/// Eigenvalues of a symmetric 3×3 matrix in ascending order (trigonometric
/// closed form for the depressed cubic).
pub fn symmetric_eigenvalues<T: Real>(m: &Mat3<T>) -> [T; 3] {
    let a = &m.0;
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let three = T::lit(3.0);
    let q = m.trace() / three;
    if p1 <= T::epsilon() * T::epsilon() * (m.max_abs() * m.max_abs()).max(T::min_positive_value()) {
        let mut d = [a[0][0], a[1][1], a[2][2]];
        d.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        return d;
    }
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + T::lit(2.0) * p1;
    let p = (p2 / T::lit(6.0)).sqrt();
    let b = (*m - Mat3::identity().scale(q)).scale(T::one() / p);
    let r = (b.det() / T::lit(2.0)).max(-T::one()).min(T::one());
    let phi = r.acos() / three;
    let two_pi_3 = T::two_pi() / three;
    let e_max = q + T::lit(2.0) * p * phi.cos();
    let e_min = q + T::lit(2.0) * p * (phi + two_pi_3).cos();
    let e_mid = three * q - e_max - e_min;
    [e_min, e_mid, e_max]
}
