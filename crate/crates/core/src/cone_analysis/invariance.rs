use super::cone::{cone_image_unchecked, expansion_range, ConeField};
use super::grid_point;
use crate::torus_map::{TorusMap, Vec2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub invariant: bool,
    /// Smallest clearance of `Df(p)·𝒞_p` inside `𝒞_{f(p)}` over the grid.
    pub margin: f64,
    /// Node attaining the margin; a violation when `invariant` is false.
    pub worst_point: Vec2,
}

pub fn check_invariance(map: &TorusMap, cones: &ConeField, grid_n: usize) -> InvarianceReport {
    let (margin, k) = (0..grid_n * grid_n)
        .into_par_iter()
        .map(|k| {
            let p = grid_point(grid_n, k);
            let img = cone_image_unchecked(&map.jacobian(p), &cones.cone_at(p));
            let target = cones.cone_at(map.lift(p));
            (target.clearance(&img), k)
        })
        .reduce(|| (f64::INFINITY, usize::MAX), min_by_value);
    InvarianceReport {
        invariant: margin > 0.0,
        margin,
        worst_point: grid_point(grid_n, k),
    }
}

/// Deterministic min: ties go to the lower index.
fn min_by_value(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) || a.0.is_nan() {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionConstants {
    pub lambda_abs: f64,
    /// Largest expansion of any cone vector; an upper bound for growth rates.
    pub lambda_max: f64,
    #[serde(skip)]
    pub lambda_pointwise: Vec<f64>,
    #[serde(skip)]
    pub max_pointwise: Vec<f64>,
}

pub fn expansion_constants(map: &TorusMap, cones: &ConeField, grid_n: usize) -> ExpansionConstants {
    let (lo, hi): (Vec<f64>, Vec<f64>) = (0..grid_n * grid_n)
        .into_par_iter()
        .map(|k| {
            let p = grid_point(grid_n, k);
            expansion_range(&map.jacobian(p), &cones.cone_at(p))
        })
        .unzip();
    ExpansionConstants {
        lambda_abs: lo.iter().copied().fold(f64::INFINITY, f64::min),
        lambda_max: hi.iter().copied().fold(0.0, f64::max),
        lambda_pointwise: lo,
        max_pointwise: hi,
    }
}
