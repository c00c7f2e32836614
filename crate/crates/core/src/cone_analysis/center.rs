use super::cone::{angle_of, cone_image_unchecked, direction, proj_diff, proj_dist, ConeField};
use super::{grid_point, invariance::check_invariance};
use crate::error::{Error, Result};
use crate::torus_map::{wrap_unit, Mat2, TorusMap, Vec2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_DEPTH: usize = 60;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Floor for the invariance residual check; widths below it are at the
/// level of rounding in the direction itself.
pub const ROUNDING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterSample {
    pub angle: f64,
    pub width: f64,
    pub depth_used: usize,
}

/// Pulls the complement of the unstable cone at `fᴺ(p)` back to `p` and
/// intersects the nested intervals, stopping once the width is below `tol`.
pub fn center_direction(
    map: &TorusMap,
    cones: &ConeField,
    p: Vec2,
    depth: usize,
    tol: f64,
) -> CenterSample {
    let mut q = [wrap_unit(p[0]), wrap_unit(p[1])];
    let mut interval = cones.cone_at(q).complement();
    let mut product = Mat2::IDENTITY;
    let mut used = 0;
    for n in 1..=depth {
        if interval.width() < tol {
            break;
        }
        product = map.jacobian(q).mul(&product);
        product = product.scaled(1.0 / product.max_abs());
        let fq = map.lift(q);
        q = [wrap_unit(fq[0]), wrap_unit(fq[1])];
        // adj(Dfⁿ) acts on directions as (Dfⁿ)⁻¹.
        let pulled = cone_image_unchecked(&product.adjugate(), &cones.cone_at(q).complement());
        interval = interval.intersect(&pulled).unwrap_or(pulled);
        used = n;
    }
    CenterSample {
        angle: interval.axis,
        width: interval.width(),
        depth_used: used,
    }
}

/// Grid-sampled approximation of the center line field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterField {
    /// Grid side; nodes at `(j/n, i/n)`, row-major in `i`.
    pub n: usize,
    pub depth: usize,
    pub tol: f64,
    pub angle: Vec<f64>,
    pub width: Vec<f64>,
}

impl CenterField {
    /// A field with the same line at every node and zero width.
    pub fn uniform(n: usize, angle: f64) -> Self {
        Self {
            n,
            depth: 0,
            tol: 0.0,
            angle: vec![angle; n * n],
            width: vec![0.0; n * n],
        }
    }

    pub fn max_width(&self) -> f64 {
        self.width.iter().copied().fold(0.0, f64::max)
    }

    fn corners(&self, p: Vec2) -> ([usize; 4], [f64; 4]) {
        let n = self.n;
        let u = p[0].rem_euclid(1.0) * n as f64;
        let v = p[1].rem_euclid(1.0) * n as f64;
        let (j0, i0) = (u.floor(), v.floor());
        let (tx, ty) = (u - j0, v - i0);
        let j0 = (j0 as usize) % n;
        let i0 = (i0 as usize) % n;
        let (j1, i1) = ((j0 + 1) % n, (i0 + 1) % n);
        (
            [i0 * n + j0, i0 * n + j1, i1 * n + j0, i1 * n + j1],
            [
                (1.0 - tx) * (1.0 - ty),
                tx * (1.0 - ty),
                (1.0 - tx) * ty,
                tx * ty,
            ],
        )
    }

    /// Bilinear angular interpolation of the line field at a point of ℝ².
    pub fn angle_at(&self, p: Vec2) -> f64 {
        let (idx, w) = self.corners(p);
        let base = self.angle[idx[0]];
        let mut a = 0.0;
        for k in 0..4 {
            a += w[k] * (base + proj_diff(self.angle[idx[k]], base));
        }
        a
    }

    /// Largest width among the four surrounding nodes.
    pub fn width_at(&self, p: Vec2) -> f64 {
        let (idx, _) = self.corners(p);
        idx.iter().map(|&k| self.width[k]).fold(0.0, f64::max)
    }
}

/// Computes the center field on an `n × n` grid. Requires an invariant cone
/// field.
pub fn compute_center_field(
    map: &TorusMap,
    cones: &ConeField,
    grid_n: usize,
    depth: usize,
    tol: f64,
) -> Result<CenterField> {
    let inv = check_invariance(map, cones, grid_n);
    if !inv.invariant {
        return Err(Error::Precondition(format!(
            "cone field is not invariant (margin {:e})",
            inv.margin
        )));
    }
    Ok(center_field_unchecked(map, cones, grid_n, depth, tol))
}

pub(crate) fn center_field_unchecked(
    map: &TorusMap,
    cones: &ConeField,
    grid_n: usize,
    depth: usize,
    tol: f64,
) -> CenterField {
    let samples: Vec<CenterSample> = (0..grid_n * grid_n)
        .into_par_iter()
        .map(|k| center_direction(map, cones, grid_point(grid_n, k), depth, tol))
        .collect();
    CenterField {
        n: grid_n,
        depth,
        tol,
        angle: samples.iter().map(|s| s.angle).collect(),
        width: samples.iter().map(|s| s.width).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceResidual {
    pub max_residual: f64,
    /// Largest `residual / bound`; below 1 means every node passes.
    pub max_ratio: f64,
    pub within_bound: bool,
}

/// Projective distance between `Df(p)·E^c(p)` and `E^c(f(p))` at every node,
/// with `E^c(f(p))` recomputed directly at the off-grid image point.
pub fn center_invariance_residual(
    map: &TorusMap,
    cones: &ConeField,
    field: &CenterField,
) -> InvarianceResidual {
    let n = field.n;
    let per_node: Vec<(f64, f64)> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let p = grid_point(n, k);
            let img = angle_of(map.jacobian(p).apply(direction(field.angle[k])));
            let fp = map.lift(p);
            let target = center_direction(map, cones, fp, field.depth, field.tol);
            let r = proj_dist(img, target.angle);
            let bound = 2.0 * (field.width[k] + target.width) + ROUNDING_FLOOR;
            (r, r / bound)
        })
        .collect();
    let max_residual = per_node.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_ratio = per_node.iter().map(|r| r.1).fold(0.0, f64::max);
    InvarianceResidual {
        max_residual,
        max_ratio,
        within_bound: max_ratio < 1.0,
    }
}

/// `‖Df(p) e‖` for a unit vector `e` along the center line at `p`.
pub fn center_expansion(map: &TorusMap, p: Vec2, angle: f64) -> f64 {
    crate::torus_map::norm(map.jacobian(p).apply(direction(angle)))
}
