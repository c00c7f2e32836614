//! Cone-field verification, expansion constants, the center line field and
//! the absolute/pointwise domination verdict.

mod center;
mod cone;
mod invariance;

pub use center::{
    center_direction, center_expansion, center_invariance_residual, compute_center_field,
    CenterField, CenterSample, InvarianceResidual, DEFAULT_DEPTH, DEFAULT_TOL, ROUNDING_FLOOR,
};
pub use cone::{
    angle_of, cone_image, direction, expansion_range, proj_angle, proj_diff, proj_dist, Cone,
    ConeField, ConeGrid, ConeSpec,
};
pub use invariance::{check_invariance, expansion_constants, ExpansionConstants, InvarianceReport};

use crate::torus_map::{TorusMap, Vec2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

pub const DEFAULT_GRID: usize = 256;

/// Node `k` of the `n × n` grid `(j/n, i/n)`, `k = i·n + j`.
#[inline]
pub fn grid_point(n: usize, k: usize) -> Vec2 {
    let (i, j) = (k / n, k % n);
    [j as f64 / n as f64, i as f64 / n as f64]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Absolute,
    PointwiseOnly,
    NotPh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhReport {
    pub grid_n: usize,
    pub depth: usize,
    pub invariant: bool,
    pub margin: f64,
    pub worst_point: Vec2,
    pub lambda_abs: f64,
    pub lambda_max: f64,
    pub mu_abs: f64,
    pub delta_abs: f64,
    pub delta_pointwise: f64,
    pub max_center_width: f64,
    /// Derivative change across half a grid cell; large values mean the grid
    /// is too coarse to trust the margins.
    pub derivative_oscillation: f64,
    pub classification: Classification,
    #[serde(skip)]
    pub lambda_pointwise: Vec<f64>,
    #[serde(skip)]
    pub mu_pointwise: Vec<f64>,
    #[serde(skip)]
    pub center: Option<CenterField>,
}

impl PhReport {
    /// One row per grid node: `x,y,angle,width,lambda,mu`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,angle,width,lambda,mu")?;
        let n = self.grid_n;
        for k in 0..n * n {
            let p = grid_point(n, k);
            let (angle, width) = match &self.center {
                Some(c) => (c.angle[k], c.width[k]),
                None => (f64::NAN, f64::NAN),
            };
            let mu = self.mu_pointwise.get(k).copied().unwrap_or(f64::NAN);
            writeln!(
                w,
                "{},{},{},{},{},{}",
                crate::report::fmt_f64(p[0]),
                crate::report::fmt_f64(p[1]),
                crate::report::fmt_f64(angle),
                crate::report::fmt_f64(width),
                crate::report::fmt_f64(self.lambda_pointwise[k]),
                crate::report::fmt_f64(mu),
            )?;
        }
        Ok(())
    }
}

/// Decision rule shared by `classify` and its tests. Equality at 1 is not
/// domination.
pub fn classify_scalars(
    invariant: bool,
    lambda_abs: f64,
    delta_abs: f64,
    delta_pointwise: f64,
) -> Classification {
    if !invariant || !(lambda_abs > 1.0) {
        Classification::NotPh
    } else if delta_abs < 1.0 {
        Classification::Absolute
    } else if delta_pointwise < 1.0 {
        Classification::PointwiseOnly
    } else {
        Classification::NotPh
    }
}

pub fn classify(
    map: &TorusMap,
    cones: &ConeField,
    grid_n: usize,
    depth: usize,
    tol: f64,
) -> PhReport {
    let inv = check_invariance(map, cones, grid_n);
    let exp = expansion_constants(map, cones, grid_n);
    let derivative_oscillation = map.derivative_oscillation(grid_n);
    if !inv.invariant {
        return PhReport {
            grid_n,
            depth,
            invariant: false,
            margin: inv.margin,
            worst_point: inv.worst_point,
            lambda_abs: exp.lambda_abs,
            lambda_max: exp.lambda_max,
            mu_abs: f64::NAN,
            delta_abs: f64::NAN,
            delta_pointwise: f64::NAN,
            max_center_width: f64::NAN,
            derivative_oscillation,
            classification: Classification::NotPh,
            lambda_pointwise: exp.lambda_pointwise,
            mu_pointwise: Vec::new(),
            center: None,
        };
    }
    let field = center::center_field_unchecked(map, cones, grid_n, depth, tol);
    let mu: Vec<f64> = (0..grid_n * grid_n)
        .into_par_iter()
        .map(|k| center_expansion(map, grid_point(grid_n, k), field.angle[k]))
        .collect();
    let mu_abs = mu.iter().copied().fold(0.0, f64::max);
    let delta_abs = mu_abs / exp.lambda_abs;
    let delta_pointwise = mu
        .iter()
        .zip(&exp.lambda_pointwise)
        .map(|(m, l)| m / l)
        .fold(0.0, f64::max);
    PhReport {
        grid_n,
        depth,
        invariant: true,
        margin: inv.margin,
        worst_point: inv.worst_point,
        lambda_abs: exp.lambda_abs,
        lambda_max: exp.lambda_max,
        mu_abs,
        delta_abs,
        delta_pointwise,
        max_center_width: field.max_width(),
        derivative_oscillation,
        classification: classify_scalars(true, exp.lambda_abs, delta_abs, delta_pointwise),
        lambda_pointwise: exp.lambda_pointwise,
        mu_pointwise: mu,
        center: Some(field),
    }
}

#[cfg(test)]
mod tests;
