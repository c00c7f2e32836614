//! Length-versus-area growth of iterated cone-tangent curves and the
//! rectangle bound from the semiconjugacy.

use super::annulus::iterate;
use super::curve::sub;
use super::tube::{tube_area, DEFAULT_CELL};
use crate::cone_analysis::{angle_of, proj_dist, ConeField};
use crate::error::{Error, Result};
use crate::semiconjugacy::{SemiconjugacyResult, StripMap};
use crate::torus_map::{norm, TorusMap, Vec2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

pub const DEFAULT_N_MAX: usize = 12;
pub const DEFAULT_RESAMPLE_STEP: f64 = 0.05;
pub const DEFAULT_TANGENCY_SLACK: f64 = 1e-3;
/// Resampled polylines larger than this are refused.
pub const MAX_POINTS: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrowthOptions {
    pub n_max: usize,
    pub resample_step: f64,
    pub cell: f64,
    pub tangency_slack: f64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
            resample_step: DEFAULT_RESAMPLE_STEP,
            cell: DEFAULT_CELL,
            tangency_slack: DEFAULT_TANGENCY_SLACK,
        }
    }
}

impl GrowthOptions {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("resample_step", self.resample_step),
            ("cell", self.cell),
            ("tangency_slack", self.tangency_slack),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive and finite")));
            }
        }
        Ok(())
    }
}

/// Lower and upper bounds of the final estimate, per iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContradictionBounds {
    pub ell: i64,
    pub lambda: f64,
    pub k: f64,
    pub c: f64,
    pub j_length: f64,
    pub h_length: f64,
    pub u_sup: f64,
    pub lower_bound: Vec<f64>,
    pub rectangle_bound: Vec<f64>,
    pub ratio: Vec<f64>,
    pub crossover_n: Option<usize>,
    /// False when `λ ≤ |ℓ|`; the sequences are still reported.
    pub contradiction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub j0: [Vec2; 2],
    pub resample_step: f64,
    pub cell: f64,
    pub n: Vec<usize>,
    pub curve_length: Vec<f64>,
    pub tube_area: Vec<f64>,
    pub k_estimate: f64,
    pub lambda_fit: f64,
    pub bounds: Option<ContradictionBounds>,
}

impl GrowthReport {
    /// Columns `n,length,area,lower_bound,upper_bound`; the bound columns are
    /// empty without a semiconjugacy.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,length,area,lower_bound,upper_bound")?;
        for (i, n) in self.n.iter().enumerate() {
            let (lo, up) = match &self.bounds {
                Some(b) => (
                    crate::report::fmt_f64(b.lower_bound[i]),
                    crate::report::fmt_f64(b.rectangle_bound[i]),
                ),
                None => (String::new(), String::new()),
            };
            writeln!(
                w,
                "{n},{},{},{lo},{up}",
                crate::report::fmt_f64(self.curve_length[i]),
                crate::report::fmt_f64(self.tube_area[i])
            )?;
        }
        Ok(())
    }
}

fn polyline_length(pts: &[Vec2]) -> f64 {
    pts.windows(2).map(|w| norm(sub(w[1], w[0]))).sum()
}

/// Slope-exponential of the least-squares line through `(n, ln len_n)`.
pub fn fit_rate(lengths: &[f64]) -> f64 {
    let m = lengths.len() as f64;
    if lengths.len() < 2 {
        return f64::NAN;
    }
    let xs: Vec<f64> = (0..lengths.len()).map(|n| n as f64).collect();
    let ys: Vec<f64> = lengths.iter().map(|l| l.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxy / sxx).exp()
}

fn check_tangency(cones: &ConeField, pts: &[Vec2], n: usize, slack: f64) -> Result<()> {
    let bad = pts.par_windows(2).find_first(|w| {
        let d = sub(w[1], w[0]);
        let cone = cones.cone_at(w[0]);
        norm(d) > 0.0 && proj_dist(angle_of(d), cone.axis) - cone.half_width > slack
    });
    if let Some(w) = bad {
        let d = sub(w[1], w[0]);
        let cone = cones.cone_at(w[0]);
        return Err(Error::TangencyLost {
            n,
            x: w[0][0],
            y: w[0][1],
            excess: proj_dist(angle_of(d), cone.axis) - cone.half_width,
        });
    }
    Ok(())
}

/// Inserts midpoints `f̃^n(J0(t))` until every segment is at most `step`.
fn resample(
    map: &TorusMap,
    j0: [Vec2; 2],
    n: usize,
    ts: &[f64],
    pts: &[Vec2],
    step: f64,
) -> Result<(Vec<f64>, Vec<Vec2>)> {
    let at = |t: f64| {
        iterate(
            map,
            [
                j0[0][0] + t * (j0[1][0] - j0[0][0]),
                j0[0][1] + t * (j0[1][1] - j0[0][1]),
            ],
            n,
        )
    };
    let mut out_t = vec![ts[0]];
    let mut out_p = vec![pts[0]];
    for i in 0..ts.len() - 1 {
        let mut stack = vec![(ts[i + 1], pts[i + 1])];
        let (mut ta, mut pa) = (ts[i], pts[i]);
        while let Some(&(tb, pb)) = stack.last() {
            if norm(sub(pb, pa)) > step && tb - ta > 1e-15 {
                let tm = 0.5 * (ta + tb);
                stack.push((tm, at(tm)));
            } else {
                out_t.push(tb);
                out_p.push(pb);
                (ta, pa) = (tb, pb);
                stack.pop();
                if out_p.len() > MAX_POINTS {
                    return Err(Error::Precondition(format!(
                        "iterate {n} needs more than {MAX_POINTS} points; shorten J0 or lower n_max"
                    )));
                }
            }
        }
    }
    Ok((out_t, out_p))
}

/// Pushes the segment `J0` forward under the lift and records lengths and
/// unit-tube areas of `f̃^n(J0)` for `n ≤ n_max`.
pub fn grow_unstable_curve(
    map: &TorusMap,
    cones: &ConeField,
    j0: [Vec2; 2],
    opts: &GrowthOptions,
) -> Result<GrowthReport> {
    opts.validate()?;
    if norm(sub(j0[1], j0[0])) == 0.0 || j0.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Config(
            "J0 must be a non-degenerate finite segment".into(),
        ));
    }
    let (mut ts, mut pts) = resample(map, j0, 0, &[0.0, 1.0], &j0, opts.resample_step)?;
    check_tangency(cones, &pts, 0, opts.tangency_slack)?;
    let mut lengths = Vec::with_capacity(opts.n_max + 1);
    let mut areas = Vec::with_capacity(opts.n_max + 1);
    for n in 0..=opts.n_max {
        if n > 0 {
            let pushed: Vec<Vec2> = pts.par_iter().map(|&p| map.lift(p)).collect();
            (ts, pts) = resample(map, j0, n, &ts, &pushed, opts.resample_step)?;
            check_tangency(cones, &pts, n, opts.tangency_slack)?;
        }
        lengths.push(polyline_length(&pts));
        areas.push(tube_area(&pts, opts.cell));
    }
    let k_estimate = areas
        .iter()
        .zip(&lengths)
        .map(|(a, l)| a / l)
        .fold(f64::INFINITY, f64::min);
    Ok(GrowthReport {
        j0,
        resample_step: opts.resample_step,
        cell: opts.cell,
        n: (0..=opts.n_max).collect(),
        lambda_fit: fit_rate(&lengths),
        curve_length: lengths,
        tube_area: areas,
        k_estimate,
        bounds: None,
    })
}

/// Closed-form bound sequences for `n = 0..=n_max`.
#[allow(clippy::too_many_arguments)]
pub fn bound_sequences(
    ell: i64,
    lambda: f64,
    k: f64,
    c: f64,
    j_length: f64,
    h_length: f64,
    u_sup: f64,
    n_max: usize,
) -> ContradictionBounds {
    let l = ell.unsigned_abs() as f64;
    let lower: Vec<f64> = (0..=n_max)
        .map(|n| k * c * lambda.powi(n as i32) * j_length)
        .collect();
    let upper: Vec<f64> = (0..=n_max)
        .map(|n| (l.powi(n as i32) * h_length + 2.0 * u_sup + 2.0) * (2.0 * u_sup + 2.0))
        .collect();
    let ratio: Vec<f64> = lower.iter().zip(&upper).map(|(a, b)| a / b).collect();
    let contradiction = lambda > l * (1.0 + 1e-9);
    let crossover_n = if contradiction {
        lower.iter().zip(&upper).position(|(a, b)| a > b)
    } else {
        None
    };
    ContradictionBounds {
        ell,
        lambda,
        k,
        c,
        j_length,
        h_length,
        u_sup,
        lower_bound: lower,
        rectangle_bound: upper,
        ratio,
        crossover_n,
        contradiction,
    }
}

/// Constants for [`contradiction_bounds`]; unset values come from the growth
/// report (`K_estimate`, `lambda_fit`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundInputs {
    pub k: Option<f64>,
    pub c: f64,
    pub lambda: Option<f64>,
}

impl Default for BoundInputs {
    fn default() -> Self {
        Self {
            k: None,
            c: 1.0,
            lambda: None,
        }
    }
}

const H_SAMPLES: usize = 1025;

/// Completes `growth` with the lower bound `K·c·λⁿ·len(J)` and the rectangle
/// bound built from `H`.
pub fn contradiction_bounds(
    strip: &StripMap,
    semi: &SemiconjugacyResult,
    growth: &GrowthReport,
    inputs: &BoundInputs,
) -> Result<GrowthReport> {
    if semi.ell != strip.ell {
        return Err(Error::Precondition(format!(
            "semiconjugacy was solved for ell = {}, strip map has ell = {}",
            semi.ell, strip.ell
        )));
    }
    let j0 = growth.j0;
    if j0.iter().any(|p| !(0.0..=1.0).contains(&p[1])) {
        return Err(Error::Precondition(
            "J0 must lie in the strip 0 ≤ y ≤ 1".into(),
        ));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..H_SAMPLES {
        let t = i as f64 / (H_SAMPLES - 1) as f64;
        let h = semi.h_at(
            j0[0][0] + t * (j0[1][0] - j0[0][0]),
            j0[0][1] + t * (j0[1][1] - j0[0][1]),
        );
        lo = lo.min(h);
        hi = hi.max(h);
    }
    let k = inputs.k.unwrap_or(growth.k_estimate);
    let lambda = inputs.lambda.unwrap_or(growth.lambda_fit);
    if !(k > 0.0 && inputs.c > 0.0 && lambda > 0.0) {
        return Err(Error::Config("K, c and lambda must be positive".into()));
    }
    let n_max = growth.n.last().copied().unwrap_or(0);
    let mut out = growth.clone();
    out.bounds = Some(bound_sequences(
        strip.ell,
        lambda,
        k,
        inputs.c,
        growth.curve_length[0],
        hi - lo,
        semi.u_sup,
        n_max,
    ));
    Ok(out)
}
