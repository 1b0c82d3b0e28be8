//! The four regime witnesses, one per (SG, QG) sign quadrant.
//!
//! | matrix | μ_SG  | μ_QG | quadrant |
//! |--------|-------|------|----------|
//! | A₁     | 8     | 2.5  | PP       |
//! | A₂     | 0.25  | −1   | PM       |
//! | A₃     | −1.5  | 2    | MP       |
//! | A₄     | −1.25 | −0.25| MM       |

use crate::geometry::SymPosDef3;
use crate::scalar::Real;

fn build<T: Real>(v: [f64; 6]) -> SymPosDef3<T> {
    SymPosDef3::from_array(v.map(T::lit)).expect("witness matrices are positive definite")
}

pub fn a1<T: Real>() -> SymPosDef3<T> {
    build([0.5, -1.0, -1.0, 4.0, 1.0, 3.0])
}

pub fn a2<T: Real>() -> SymPosDef3<T> {
    build([2.0, 0.0, -1.0, 2.0, 0.0, 0.75])
}

pub fn a3<T: Real>() -> SymPosDef3<T> {
    build([0.5, -1.0, -1.0, 3.0, 3.0, 3.5])
}

pub fn a4<T: Real>() -> SymPosDef3<T> {
    build([0.5, 0.0, -1.0, 0.5, 0.0, 3.0])
}

/// `[A₁, A₂, A₃, A₄]`.
pub fn all<T: Real>() -> [SymPosDef3<T>; 4] {
    [a1(), a2(), a3(), a4()]
}
