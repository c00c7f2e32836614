//! Integration of center curves through the interpolated center line field.

use crate::cone_analysis::{direction, proj_dist, CenterField};
use crate::error::{Error, Result};
use crate::torus_map::{norm, Vec2};
use serde::{Deserialize, Serialize};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_MAX_LEN: f64 = 20.0;
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-5;
pub const DEFAULT_CLOSURE_ANGLE: f64 = 1e-3;
pub const DEFAULT_TANGENCY_TOL: f64 = 1e-6;

/// Orientation is resolved by least turning; a stage whose line sits within
/// this angle of perpendicular to the previous direction is ambiguous.
pub const MIN_ALIGNMENT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationOptions {
    pub step: f64,
    pub max_len: f64,
    pub closure_tol: f64,
    pub closure_angle: f64,
    pub tangency_tol: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            max_len: DEFAULT_MAX_LEN,
            closure_tol: DEFAULT_CLOSURE_TOL,
            closure_angle: DEFAULT_CLOSURE_ANGLE,
            tangency_tol: DEFAULT_TANGENCY_TOL,
        }
    }
}

impl IntegrationOptions {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.step,
            self.max_len,
            self.closure_tol,
            self.closure_angle,
            self.tangency_tol,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(
                "integration options must be positive and finite".into(),
            ));
        }
        if self.max_len < self.step {
            return Err(Error::Config("max_len must exceed the step".into()));
        }
        Ok(())
    }
}

/// A traced center curve as a polyline in the universal cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterCurve {
    pub points: Vec<Vec2>,
    pub closed: bool,
    /// Displacement between the endpoints of a closed curve.
    pub homotopy_class: Option<[i64; 2]>,
    pub length: f64,
}

impl CenterCurve {
    /// Segment count, or zero for a degenerate curve.
    pub fn segments(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    /// Unit tangent at node `k`, by central differences (wrapping around
    /// when the curve is closed).
    pub fn tangent(&self, k: usize) -> Vec2 {
        let m = self.points.len();
        let (a, b) = if self.closed && m > 2 {
            let prev = if k == 0 {
                sub(self.points[m - 2], self.closure_shift())
            } else {
                self.points[k - 1]
            };
            let next = if k + 1 >= m {
                add(self.points[1], self.closure_shift())
            } else {
                self.points[k + 1]
            };
            (prev, next)
        } else {
            (
                self.points[k.saturating_sub(1)],
                self.points[(k + 1).min(m - 1)],
            )
        };
        unit(sub(b, a))
    }

    fn closure_shift(&self) -> Vec2 {
        match self.homotopy_class {
            Some([a, b]) => [a as f64, b as f64],
            None => [0.0, 0.0],
        }
    }
}

pub(crate) fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub(crate) fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn unit(v: Vec2) -> Vec2 {
    let n = norm(v);
    if n == 0.0 {
        [0.0, 0.0]
    } else {
        [v[0] / n, v[1] / n]
    }
}

/// Classical RK4 stepping along an unoriented line field.
pub(crate) struct Tracer<'a> {
    field: &'a CenterField,
    step: f64,
    tangency_tol: f64,
    pub pos: Vec2,
    pub dir: Vec2,
}

impl<'a> Tracer<'a> {
    pub fn new(field: &'a CenterField, start: Vec2, step: f64, tangency_tol: f64) -> Result<Self> {
        let mut t = Self {
            field,
            step,
            tangency_tol,
            pos: start,
            dir: [0.0, 0.0],
        };
        t.check_width(start)?;
        let d = direction(field.angle_at(start));
        // Canonical initial orientation: positive x, or positive y on vertical lines.
        t.dir = if d[0] > 1e-12 || (d[0].abs() <= 1e-12 && d[1] > 0.0) {
            d
        } else {
            [-d[0], -d[1]]
        };
        Ok(t)
    }

    fn check_width(&self, p: Vec2) -> Result<()> {
        let w = self.field.width_at(p);
        if w > self.tangency_tol {
            return Err(Error::TangencyUncertain {
                x: p[0],
                y: p[1],
                width: w,
                tol: self.tangency_tol,
            });
        }
        Ok(())
    }

    fn oriented(&self, p: Vec2, prev: Vec2) -> Result<Vec2> {
        let d = direction(self.field.angle_at(p));
        let c = dot(d, prev);
        if c.abs() < MIN_ALIGNMENT {
            return Err(Error::StepSize { x: p[0], y: p[1] });
        }
        Ok(if c < 0.0 { [-d[0], -d[1]] } else { d })
    }

    /// Advances one step and returns the new position.
    pub fn advance(&mut self) -> Result<Vec2> {
        let (p, h) = (self.pos, self.step);
        let k1 = self.oriented(p, self.dir)?;
        let k2 = self.oriented(add(p, scale(k1, h / 2.0)), k1)?;
        let k3 = self.oriented(add(p, scale(k2, h / 2.0)), k2)?;
        let k4 = self.oriented(add(p, scale(k3, h)), k3)?;
        let mut v = [0.0; 2];
        for i in 0..2 {
            v[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
        }
        let q = add(p, scale(v, h));
        self.check_width(q)?;
        self.dir = self.oriented(q, k4)?;
        self.pos = q;
        Ok(q)
    }
}

fn scale(v: Vec2, s: f64) -> Vec2 {
    [v[0] * s, v[1] * s]
}

/// Closest point parameter and distance from `q` to the segment `[a, b]`.
pub(crate) fn seg_project(q: Vec2, a: Vec2, b: Vec2) -> (f64, f64) {
    let d = sub(b, a);
    let l2 = dot(d, d);
    let t = if l2 == 0.0 {
        0.0
    } else {
        (dot(sub(q, a), d) / l2).clamp(0.0, 1.0)
    };
    let c = add(a, scale(d, t));
    (t, norm(sub(q, c)))
}

/// Traces the center curve through `seed` until it closes up on the torus or
/// reaches `max_len`.
pub fn integrate_center_curve(
    field: &CenterField,
    seed: Vec2,
    opts: &IntegrationOptions,
) -> Result<CenterCurve> {
    opts.validate()?;
    let mut tr = Tracer::new(field, seed, opts.step, opts.tangency_tol)?;
    let start_angle = field.angle_at(seed);
    let mut points = vec![seed];
    let mut length = 0.0;
    while length < opts.max_len {
        let prev = tr.pos;
        let next = tr.advance()?;
        let seg = norm(sub(next, prev));
        // Nearest lattice translate of the seed to this segment.
        let mid = scale(add(prev, next), 0.5);
        let shift = [(mid[0] - seed[0]).round(), (mid[1] - seed[1]).round()];
        if shift != [0.0, 0.0] {
            let target = add(seed, shift);
            let (t, d) = seg_project(target, prev, next);
            if d < opts.closure_tol
                && proj_dist(field.angle_at(target), start_angle) < opts.closure_angle
            {
                points.push(target);
                length += t * seg;
                return Ok(CenterCurve {
                    points,
                    closed: true,
                    homotopy_class: Some([shift[0] as i64, shift[1] as i64]),
                    length,
                });
            }
        }
        points.push(next);
        length += seg;
    }
    Ok(CenterCurve {
        points,
        closed: false,
        homotopy_class: None,
        length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::cone_analysis::compute_center_field;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn vertical_field_closes_with_class_e2() {
        let field = CenterField::uniform(16, FRAC_PI_2);
        let c =
            integrate_center_curve(&field, [0.25, 0.3], &IntegrationOptions::default()).unwrap();
        assert!(c.closed);
        assert_eq!(c.homotopy_class, Some([0, 1]));
        assert!((c.length - 1.0).abs() < 1e-9);
        assert!(c.points.iter().all(|p| (p[0] - 0.25).abs() < 1e-12));
    }

    #[test]
    fn irrational_slope_never_closes() {
        let field = CenterField::uniform(16, (2.0f64.sqrt() - 1.0).atan());
        let opts = IntegrationOptions {
            max_len: 5.0,
            ..Default::default()
        };
        let c = integrate_center_curve(&field, [0.1, 0.1], &opts).unwrap();
        assert!(!c.closed);
        assert!(c.homotopy_class.is_none());
        assert!(c.length >= 5.0);
    }

    #[test]
    fn wide_field_is_rejected() {
        let mut field = CenterField::uniform(8, 0.0);
        field.width[9] = 1e-3;
        let err = integrate_center_curve(&field, [0.15, 0.15], &IntegrationOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::TangencyUncertain { .. }));
    }

    #[test]
    fn e1_center_curves_are_vertical_circles() {
        let field =
            compute_center_field(&catalog::e1(), &catalog::e1_cones(), 64, 60, 1e-10).unwrap();
        for seed in [[0.0, 0.0], [0.37, 0.81]] {
            let c = integrate_center_curve(&field, seed, &IntegrationOptions::default()).unwrap();
            assert!(c.closed);
            assert_eq!(c.homotopy_class, Some([0, 1]));
            let drift = c
                .points
                .iter()
                .map(|p| (p[0] - seed[0]).abs())
                .fold(0.0, f64::max);
            assert!(drift < 1e-9, "drift {drift}");
        }
    }

    #[test]
    fn cat_map_center_curve_does_not_close() {
        let field =
            compute_center_field(&catalog::cat(), &catalog::cat_cones(), 64, 40, 1e-10).unwrap();
        let c = integrate_center_curve(&field, [0.2, 0.4], &IntegrationOptions::default()).unwrap();
        assert!(!c.closed);
    }

    #[test]
    fn tangent_of_closed_curve_wraps() {
        let field = CenterField::uniform(16, FRAC_PI_2);
        let c = integrate_center_curve(&field, [0.5, 0.0], &IntegrationOptions::default()).unwrap();
        let t0 = c.tangent(0);
        let tn = c.tangent(c.points.len() - 1);
        assert!((t0[1] - 1.0).abs() < 1e-12 && (tn[1] - 1.0).abs() < 1e-12);
    }
}
