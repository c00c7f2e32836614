//! Cones in a 2-D tangent space, represented as projective angular intervals.

use crate::error::{Error, Result};
use crate::torus_map::{Mat2, Vec2};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Reduce an angle into [0, π).
#[inline]
pub fn proj_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Distance between two lines through the origin, in [0, π/2].
#[inline]
pub fn proj_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Signed representative of `a − b` in [−π/2, π/2).
#[inline]
pub fn proj_diff(a: f64, b: f64) -> f64 {
    (a - b + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2
}

#[inline]
pub fn direction(theta: f64) -> Vec2 {
    let (s, c) = theta.sin_cos();
    [c, s]
}

#[inline]
pub fn angle_of(v: Vec2) -> f64 {
    proj_angle(v[1].atan2(v[0]))
}

/// Signed rotation angle from `u` to `v`, in (−π, π].
#[inline]
fn sweep(u: Vec2, v: Vec2) -> f64 {
    (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1])
}

/// Closed double cone of directions within `half_width` of `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub axis: f64,
    pub half_width: f64,
}

impl Cone {
    /// A proper cone: `half_width ∈ (0, π/2)`.
    pub fn new(axis: f64, half_width: f64) -> Result<Self> {
        if !axis.is_finite() || !half_width.is_finite() {
            return Err(Error::InvalidCone("non-finite angle".into()));
        }
        if !(half_width > 0.0 && half_width < FRAC_PI_2) {
            return Err(Error::InvalidCone(format!(
                "half_width {half_width} not in (0, π/2)"
            )));
        }
        Ok(Self {
            axis: proj_angle(axis),
            half_width,
        })
    }

    /// Unchecked; used for thin intervals produced by pull-backs.
    pub(crate) fn raw(axis: f64, half_width: f64) -> Self {
        Self {
            axis: proj_angle(axis),
            half_width,
        }
    }

    pub fn width(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        proj_dist(theta, self.axis) <= self.half_width
    }

    pub fn contains(&self, v: Vec2) -> bool {
        self.contains_angle(angle_of(v))
    }

    /// Closure of the complementary projective interval.
    pub fn complement(&self) -> Cone {
        Cone::raw(self.axis + FRAC_PI_2, FRAC_PI_2 - self.half_width)
    }

    /// Angular room left when `inner` sits inside `self`; positive iff
    /// `inner ⊂ int(self)`.
    pub fn clearance(&self, inner: &Cone) -> f64 {
        self.half_width - (proj_dist(inner.axis, self.axis) + inner.half_width)
    }

    /// Intersection with a cone assumed to overlap it as a single interval.
    pub(crate) fn intersect(&self, other: &Cone) -> Option<Cone> {
        let off = proj_diff(other.axis, self.axis);
        let lo = (-self.half_width).max(off - other.half_width);
        let hi = self.half_width.min(off + other.half_width);
        (hi >= lo).then(|| Cone::raw(self.axis + 0.5 * (lo + hi), 0.5 * (hi - lo)))
    }
}

/// Smallest cone containing `M·c`. A nonsingular linear map sends the
/// projective interval to the interval spanned by the two boundary images on
/// the side containing the image of the axis.
pub fn cone_image(m: &Mat2, c: &Cone) -> Result<Cone> {
    let det = m.det();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::SingularMatrix(det));
    }
    Ok(cone_image_unchecked(m, c))
}

#[inline]
pub(crate) fn cone_image_unchecked(m: &Mat2, c: &Cone) -> Cone {
    let wa = m.apply(direction(c.axis));
    let wp = m.apply(direction(c.axis + c.half_width));
    let wm = m.apply(direction(c.axis - c.half_width));
    let (sp, sm) = (sweep(wa, wp), sweep(wa, wm));
    let (lo, hi) = (sp.min(sm), sp.max(sm));
    Cone::raw(wa[1].atan2(wa[0]) + 0.5 * (lo + hi), 0.5 * (hi - lo))
}

/// `(min, max)` of `‖M v‖` over unit `v` in the cone, by exact minimisation
/// of the quadratic form `vᵀ MᵀM v` over the angular interval.
pub fn expansion_range(m: &Mat2, c: &Cone) -> (f64, f64) {
    let s11 = m.a * m.a + m.c * m.c;
    let s12 = m.a * m.b + m.c * m.d;
    let s22 = m.b * m.b + m.d * m.d;
    let q = |t: f64| {
        let (s, co) = t.sin_cos();
        s11 * co * co + 2.0 * s12 * s * co + s22 * s * s
    };
    let (lo, hi) = (c.axis - c.half_width, c.axis + c.half_width);
    let crit = 0.5 * (2.0 * s12).atan2(s11 - s22);
    let mut qmin = q(lo).min(q(hi));
    let mut qmax = q(lo).max(q(hi));
    let k0 = ((lo - crit) / FRAC_PI_2).ceil() as i64;
    let k1 = ((hi - crit) / FRAC_PI_2).floor() as i64;
    for k in k0..=k1 {
        let v = q(crit + k as f64 * FRAC_PI_2);
        qmin = qmin.min(v);
        qmax = qmax.max(v);
    }
    (qmin.max(0.0).sqrt(), qmax.sqrt())
}

/// Cones sampled at the centres of a `rows × cols` grid, row-major with `y`
/// selecting the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeGrid {
    pub rows: usize,
    pub cols: usize,
    pub axis: Vec<f64>,
    pub half_width: Vec<f64>,
}

/// Configuration form of a cone field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConeSpec {
    Constant { axis: f64, half_width: f64 },
    Grid { grid: ConeGrid },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConeField {
    Constant(Cone),
    Grid(ConeGrid),
}

impl ConeField {
    pub fn constant(axis: f64, half_width: f64) -> Result<Self> {
        Ok(ConeField::Constant(Cone::new(axis, half_width)?))
    }

    pub fn from_spec(spec: &ConeSpec) -> Result<Self> {
        match spec {
            ConeSpec::Constant { axis, half_width } => Self::constant(*axis, *half_width),
            ConeSpec::Grid { grid } => Self::grid(grid.clone()),
        }
    }

    pub fn to_spec(&self) -> ConeSpec {
        match self {
            ConeField::Constant(c) => ConeSpec::Constant {
                axis: c.axis,
                half_width: c.half_width,
            },
            ConeField::Grid(g) => ConeSpec::Grid { grid: g.clone() },
        }
    }

    pub fn grid(g: ConeGrid) -> Result<Self> {
        let n = g.rows.checked_mul(g.cols).filter(|&n| n > 0);
        let Some(n) = n else {
            return Err(Error::InvalidCone("empty cone grid".into()));
        };
        if g.axis.len() != n || g.half_width.len() != n {
            return Err(Error::InvalidCone(format!(
                "cone grid {}x{} needs {n} axes and half widths",
                g.rows, g.cols
            )));
        }
        for k in 0..n {
            Cone::new(g.axis[k], g.half_width[k])?;
        }
        for i in 0..g.rows {
            for j in 0..g.cols {
                let a = g.axis[i * g.cols + j];
                let right = g.axis[i * g.cols + (j + 1) % g.cols];
                let up = g.axis[((i + 1) % g.rows) * g.cols + j];
                if proj_dist(a, right) >= FRAC_PI_4 || proj_dist(a, up) >= FRAC_PI_4 {
                    return Err(Error::InvalidCone(format!(
                        "adjacent axes differ by π/4 or more near cell ({i}, {j})"
                    )));
                }
            }
        }
        Ok(ConeField::Grid(g))
    }

    /// Cone at a point of ℝ² (periodic).
    pub fn cone_at(&self, p: Vec2) -> Cone {
        match self {
            ConeField::Constant(c) => *c,
            ConeField::Grid(g) => {
                let u = p[0].rem_euclid(1.0) * g.cols as f64 - 0.5;
                let v = p[1].rem_euclid(1.0) * g.rows as f64 - 0.5;
                let (j0, i0) = (u.floor(), v.floor());
                let (tx, ty) = (u - j0, v - i0);
                let wrap = |k: f64, n: usize| (k as i64).rem_euclid(n as i64) as usize;
                let (j0, i0) = (wrap(j0, g.cols), wrap(i0, g.rows));
                let (j1, i1) = ((j0 + 1) % g.cols, (i0 + 1) % g.rows);
                let idx = |i: usize, j: usize| i * g.cols + j;
                let base = g.axis[idx(i0, j0)];
                let rel = |k: usize| base + proj_diff(g.axis[k], base);
                let w = [
                    ((1.0 - tx) * (1.0 - ty), idx(i0, j0)),
                    (tx * (1.0 - ty), idx(i0, j1)),
                    ((1.0 - tx) * ty, idx(i1, j0)),
                    (tx * ty, idx(i1, j1)),
                ];
                let axis: f64 = w.iter().map(|&(wt, k)| wt * rel(k)).sum();
                let hw: f64 = w.iter().map(|&(wt, k)| wt * g.half_width[k]).sum();
                Cone::raw(axis, hw)
            }
        }
    }
}
