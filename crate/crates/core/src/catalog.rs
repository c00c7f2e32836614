//! Reference maps used throughout the tests, the acceptance suite and the
//! bundled configs.

use crate::cone_analysis::ConeField;
use crate::semiconjugacy::{StripMap, StripTerm};
use crate::torus_map::{IntegerMatrix, TorusMap, TrigPolynomial, TrigTerm};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};

/// `A = [[3,0],[0,1]]`, no perturbation.
pub fn e1() -> TorusMap {
    TorusMap::linear(IntegerMatrix::new(3, 0, 0, 1))
}

/// Horizontal cone of half width π/8.
pub fn e1_cones() -> ConeField {
    ConeField::constant(0.0, FRAC_PI_8).unwrap()
}

/// `A = [[3,1],[1,1]]` (eigenvalues 2 ± √2) plus 0.05-amplitude cross terms
/// `0.05 sin 2πy` in the first coordinate and `0.05 sin 2πx` in the second.
pub fn e2() -> TorusMap {
    TorusMap::linear(IntegerMatrix::new(3, 1, 1, 1)).with_perturbation(
        TrigPolynomial::new(vec![TrigTerm::sin(0, 1, 0.05)]),
        TrigPolynomial::new(vec![TrigTerm::sin(1, 0, 0.05)]),
    )
}

/// Cone around the expanding eigendirection `(1, √2 − 1)` of the linear part,
/// which sits at angle π/8.
pub fn e2_cones() -> ConeField {
    ConeField::constant(FRAC_PI_8, FRAC_PI_8).unwrap()
}

/// Cat map `[[2,1],[1,1]]`; degree one, so validation needs the override.
pub fn cat() -> TorusMap {
    TorusMap::linear(IntegerMatrix::new(2, 1, 1, 1))
}

/// Cone around the expanding eigendirection `(1, (√5 − 1)/2)`.
pub fn cat_cones() -> ConeField {
    let axis = ((5f64.sqrt() - 1.0) / 2.0).atan();
    ConeField::constant(axis, 0.3).unwrap()
}

/// Parameters of [`pointwise_only`].
pub const POINTWISE_C: f64 = 1.5;
pub const POINTWISE_B: f64 = 0.8;

/// `f(x, y) = (3x + c sin(2πx)/2π, y + b(1 + cos 2πx) sin(2πy)/4π)`.
///
/// The vertical direction is the center everywhere. Center expansion peaks at
/// `1 + b` near `x = 0`, where the horizontal expansion is `3 + c`; the
/// horizontal expansion bottoms out near `3 − c` at `x = 1/2`, where the
/// center expansion is 1. So `μ(p) < λ(p)` at every point while
/// `max μ > min λ`.
pub fn pointwise_only() -> TorusMap {
    let (c, b) = (POINTWISE_C, POINTWISE_B);
    TorusMap::linear(IntegerMatrix::new(3, 0, 0, 1)).with_perturbation(
        TrigPolynomial::new(vec![TrigTerm::sin(1, 0, c / (2.0 * PI))]),
        TrigPolynomial::new(vec![
            TrigTerm::sin(0, 1, b / (4.0 * PI)),
            TrigTerm::sin(1, 1, b / (8.0 * PI)),
            TrigTerm::sin(1, -1, -b / (8.0 * PI)),
        ]),
    )
}

pub fn pointwise_only_cones() -> ConeField {
    ConeField::constant(0.0, PI / 6.0).unwrap()
}

/// `A = [[3,0],[0,5]]` with `G(x) = 3x + 0.1 sin 2πx` acting on horizontal
/// circles; the circles `y ∈ {0, 1/4, 1/2, 3/4}` are invariant center
/// circles with degree-3 restriction.
pub fn degree3_circle() -> TorusMap {
    TorusMap::linear(IntegerMatrix::new(3, 0, 0, 5)).with_perturbation(
        TrigPolynomial::new(vec![TrigTerm::sin(1, 0, 0.1)]),
        TrigPolynomial::zero(),
    )
}

pub fn degree3_cones() -> ConeField {
    ConeField::constant(FRAC_PI_2, FRAC_PI_8).unwrap()
}

/// `F(x, y) = (3x + 0.2 sin 2πx + 0.1 sin πy, y)`.
pub fn e4_strip() -> StripMap {
    StripMap::new(
        3,
        vec![StripTerm::sin(1, 0, 0.2), StripTerm::sin(0, 1, 0.1)],
        vec![],
    )
    .unwrap()
}

/// Circle map `G(x) = 3x + 0.1 sin 2πx` as a y-independent strip map.
pub fn circle_strip() -> StripMap {
    StripMap::new(3, vec![StripTerm::sin(1, 0, 0.1)], vec![]).unwrap()
}

/// `F(x, y) = (ℓx, y)`.
pub fn linear_strip(ell: i64) -> StripMap {
    StripMap::new(ell, vec![], vec![]).unwrap()
}
