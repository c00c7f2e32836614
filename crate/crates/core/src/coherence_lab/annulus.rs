//! Invariant center circles: restriction reports and the seed-lattice hunt.

use super::curve::{
    dot, integrate_center_curve, seg_project, sub, CenterCurve, IntegrationOptions, Tracer,
};
use crate::cone_analysis::CenterField;
use crate::error::{Error, Result};
use crate::rng::SeedStreams;
use crate::torus_map::{extended_gcd, norm, wrap_unit, Mat2, TorusMap, Vec2};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_INVARIANCE_TOL: f64 = 1e-3;
pub const DEFAULT_SEEDS: usize = 8;
pub const DEFAULT_PERIOD_MAX: usize = 1;

/// Distances are only resolved up to this value; larger ones are reported as
/// the cap.
pub const HAUSDORFF_CAP: f64 = 0.05;

const BUCKETS: usize = 64;
const BISECTION_STEPS: usize = 60;
const WINDOW_SAMPLES: usize = 9;

/// Segments of a lifted polyline bucketed by midpoint on the torus.
pub(crate) struct SegmentIndex {
    segs: Vec<(Vec2, Vec2)>,
    buckets: Vec<Vec<u32>>,
    half_len: f64,
}

fn bucket_of(p: Vec2) -> (usize, usize) {
    let b = BUCKETS as f64;
    (
        ((wrap_unit(p[0]) * b) as usize).min(BUCKETS - 1),
        ((wrap_unit(p[1]) * b) as usize).min(BUCKETS - 1),
    )
}

impl SegmentIndex {
    pub fn new(points: &[Vec2]) -> Self {
        let segs: Vec<(Vec2, Vec2)> = if points.len() == 1 {
            vec![(points[0], points[0])]
        } else {
            points.windows(2).map(|w| (w[0], w[1])).collect()
        };
        let mut buckets = vec![Vec::new(); BUCKETS * BUCKETS];
        let mut half_len: f64 = 0.0;
        for (k, (a, b)) in segs.iter().enumerate() {
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            let (bx, by) = bucket_of(mid);
            buckets[by * BUCKETS + bx].push(k as u32);
            half_len = half_len.max(norm(sub(*b, *a)) / 2.0);
        }
        Self {
            segs,
            buckets,
            half_len,
        }
    }

    /// Torus distance from `q` to the polyline, capped at `cap`.
    pub fn distance(&self, q: Vec2, cap: f64) -> f64 {
        let reach = ((cap + self.half_len) * BUCKETS as f64).ceil() as usize + 1;
        let mut best = cap;
        let mut visit = |k: u32| {
            let (a, b) = self.segs[k as usize];
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            let s = [(q[0] - mid[0]).round(), (q[1] - mid[1]).round()];
            let d = seg_project(q, [a[0] + s[0], a[1] + s[1]], [b[0] + s[0], b[1] + s[1]]).1;
            best = best.min(d);
        };
        if 2 * reach + 1 >= BUCKETS {
            for k in 0..self.segs.len() {
                visit(k as u32);
            }
        } else {
            let (bx, by) = bucket_of(q);
            for dy in 0..=2 * reach {
                let y = (by + BUCKETS + dy - reach) % BUCKETS;
                for dx in 0..=2 * reach {
                    let x = (bx + BUCKETS + dx - reach) % BUCKETS;
                    for &k in &self.buckets[y * BUCKETS + x] {
                        visit(k);
                    }
                }
            }
        }
        best
    }
}

/// Symmetric Hausdorff distance between two polylines as subsets of the
/// torus, capped at [`HAUSDORFF_CAP`].
pub fn torus_hausdorff(a: &[Vec2], b: &[Vec2]) -> f64 {
    let (ia, ib) = (SegmentIndex::new(a), SegmentIndex::new(b));
    let ab = b
        .par_iter()
        .map(|&q| ia.distance(q, HAUSDORFF_CAP))
        .reduce(|| 0.0, f64::max);
    let ba = a
        .par_iter()
        .map(|&q| ib.distance(q, HAUSDORFF_CAP))
        .reduce(|| 0.0, f64::max);
    ab.max(ba)
}

/// `f̃^k(v)` and `Df^k(v)`.
pub(crate) fn iterate_with_jacobian(map: &TorusMap, v: Vec2, k: usize) -> (Vec2, Mat2) {
    let mut p = v;
    let mut j = Mat2::IDENTITY;
    for _ in 0..k {
        j = map.jacobian(p).mul(&j);
        p = map.lift(p);
    }
    (p, j)
}

pub(crate) fn iterate(map: &TorusMap, v: Vec2, k: usize) -> Vec2 {
    (0..k).fold(v, |p, _| map.lift(p))
}

fn image_points(map: &TorusMap, curve: &CenterCurve, k: usize) -> Vec<Vec2> {
    curve
        .points
        .par_iter()
        .map(|&p| iterate(map, p, k))
        .collect()
}

/// Restriction of `f^period` to an invariant circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleRestrictionReport {
    pub period: usize,
    pub degree: i64,
    pub jacobian_integral: f64,
    pub arc_length: f64,
    pub max_jacobian: f64,
    pub invariance_hausdorff: f64,
}

/// Degree and Jacobian integral of `f` restricted to a closed invariant curve.
pub fn circle_restriction_report(
    map: &TorusMap,
    curve: &CenterCurve,
    tol: f64,
) -> Result<CircleRestrictionReport> {
    restriction_report_for_iterate(map, curve, 1, tol)
}

/// As [`circle_restriction_report`] for `f^period`.
pub fn restriction_report_for_iterate(
    map: &TorusMap,
    curve: &CenterCurve,
    period: usize,
    tol: f64,
) -> Result<CircleRestrictionReport> {
    let cls = match (curve.closed, curve.homotopy_class) {
        (true, Some(c)) if c != [0, 0] && curve.points.len() > 2 => c,
        _ => {
            return Err(Error::Precondition(
                "curve is not a closed essential circle".into(),
            ))
        }
    };
    if period == 0 {
        return Err(Error::Precondition("period must be at least 1".into()));
    }
    let hd = torus_hausdorff(&curve.points, &image_points(map, curve, period));
    if !(hd < tol) {
        return Err(Error::Precondition(format!(
            "curve is not invariant: Hausdorff distance {hd:e} ≥ {tol:e}"
        )));
    }
    let pts = &curve.points;
    let m = pts.len() - 1;
    let seg: Vec<f64> = pts.windows(2).map(|w| norm(sub(w[1], w[0]))).collect();
    let arc_length: f64 = seg.iter().sum();
    // Trapezoid weights on the closed polyline; node m coincides with node 0.
    let jac: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|k| {
            let (_, j) = iterate_with_jacobian(map, pts[k], period);
            norm(j.apply(curve.tangent(k)))
        })
        .collect();
    let mut integral = 0.0;
    for k in 0..m {
        let w = (seg[k] + seg[(k + m - 1) % m]) / 2.0;
        integral += w * jac[k];
    }
    let max_jacobian = jac.iter().copied().fold(0.0, f64::max);
    let start = iterate(map, pts[0], period);
    let end = iterate(map, pts[m], period);
    let d = sub(end, start);
    let c = [cls[0] as f64, cls[1] as f64];
    let degree = (dot(d, c) / dot(c, c)).round() as i64;
    Ok(CircleRestrictionReport {
        period,
        degree,
        jacobian_integral: integral,
        arc_length,
        max_jacobian,
        invariance_hausdorff: hd,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HuntOptions {
    /// Side of the seed lattice.
    pub seeds: usize,
    pub period_max: usize,
    pub invariance_tol: f64,
    /// Seed jitter as a fraction of the lattice spacing.
    pub jitter: f64,
    pub rng_seed: u64,
    /// Search for invariant leaves near each closed leaf along a transversal.
    pub refine: bool,
    pub integration: IntegrationOptions,
}

impl Default for HuntOptions {
    fn default() -> Self {
        Self {
            seeds: DEFAULT_SEEDS,
            period_max: DEFAULT_PERIOD_MAX,
            invariance_tol: DEFAULT_INVARIANCE_TOL,
            jitter: 0.0,
            rng_seed: 0,
            refine: true,
            integration: IntegrationOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCircle {
    pub curve: CenterCurve,
    pub report: CircleRestrictionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntReport {
    pub seeds: usize,
    pub period_max: usize,
    pub closed_leaves: usize,
    pub open_leaves: usize,
    pub circles: Vec<InvariantCircle>,
}

fn seed_lattice(opts: &HuntOptions) -> Vec<Vec2> {
    let s = opts.seeds;
    let mut rng = SeedStreams::new(opts.rng_seed).stream("hunt-seeds");
    let mut out = Vec::with_capacity(s * s);
    for i in 0..s {
        for j in 0..s {
            let (mut x, mut y) = (j as f64 / s as f64, i as f64 / s as f64);
            if opts.jitter > 0.0 {
                x += opts.jitter * (rng.gen::<f64>() - 0.5) / s as f64;
                y += opts.jitter * (rng.gen::<f64>() - 0.5) / s as f64;
            }
            out.push([wrap_unit(x), wrap_unit(y)]);
        }
    }
    out
}

/// Integrates center curves from an `s × s` seed lattice and keeps the closed
/// ones that are `f^k`-invariant for some `k ≤ period_max`.
pub fn hunt_invariant_circles(
    map: &TorusMap,
    field: &CenterField,
    opts: &HuntOptions,
) -> Result<HuntReport> {
    opts.integration.validate()?;
    if opts.seeds == 0 || !(opts.invariance_tol > 0.0) || !(0.0..1.0).contains(&opts.jitter) {
        return Err(Error::Config(
            "hunt needs seeds ≥ 1, a positive tolerance and jitter in [0, 1)".into(),
        ));
    }
    let seeds = seed_lattice(opts);
    let traced: Vec<CenterCurve> = seeds
        .par_iter()
        .map(|&s| integrate_center_curve(field, s, &opts.integration))
        .collect::<Result<_>>()?;

    let open_leaves = traced.iter().filter(|c| !c.closed).count();
    let mut leaves: Vec<(CenterCurve, SegmentIndex)> = Vec::new();
    for c in traced.into_iter().filter(|c| c.closed) {
        let seed = c.points[0];
        if leaves
            .iter()
            .any(|(_, idx)| idx.distance(seed, HAUSDORFF_CAP) < 1e-4)
        {
            continue;
        }
        let idx = SegmentIndex::new(&c.points);
        leaves.push((c, idx));
    }
    let window = 0.5 / opts.seeds as f64;
    let found: Vec<Vec<(CenterCurve, usize)>> = leaves
        .par_iter()
        .map(|(leaf, _)| invariant_near(map, field, leaf, window, opts))
        .collect();

    let mut circles: Vec<InvariantCircle> = Vec::new();
    for (curve, k) in found.into_iter().flatten() {
        if circles
            .iter()
            .any(|c| torus_hausdorff(&c.curve.points, &curve.points) < opts.invariance_tol)
        {
            continue;
        }
        let period = (1..=k)
            .find(|d| {
                k % d == 0
                    && torus_hausdorff(&curve.points, &image_points(map, &curve, *d))
                        < opts.invariance_tol
            })
            .unwrap_or(k);
        let report = restriction_report_for_iterate(map, &curve, period, opts.invariance_tol)?;
        circles.push(InvariantCircle { curve, report });
    }
    circles.sort_by(|a, b| {
        let (p, q) = (a.curve.points[0], b.curve.points[0]);
        (a.report.period, wrap_unit(p[1]), wrap_unit(p[0]))
            .partial_cmp(&(b.report.period, wrap_unit(q[1]), wrap_unit(q[0])))
            .unwrap()
    });
    Ok(HuntReport {
        seeds: opts.seeds,
        period_max: opts.period_max,
        closed_leaves: leaves.len(),
        open_leaves,
        circles,
    })
}

fn invariant_near(
    map: &TorusMap,
    field: &CenterField,
    leaf: &CenterCurve,
    window: f64,
    opts: &HuntOptions,
) -> Vec<(CenterCurve, usize)> {
    let mut out = Vec::new();
    for k in 1..=opts.period_max {
        if torus_hausdorff(&leaf.points, &image_points(map, leaf, k)) < opts.invariance_tol {
            out.push((leaf.clone(), k));
            continue;
        }
        if !opts.refine {
            continue;
        }
        let Some(tr) = Transversal::new(leaf) else {
            continue;
        };
        for t in tr.fixed_leaves(map, field, k, window, leaf.length, &opts.integration) {
            let Ok(c) = integrate_center_curve(field, tr.point(t), &opts.integration) else {
                continue;
            };
            if c.closed
                && torus_hausdorff(&c.points, &image_points(map, &c, k)) < opts.invariance_tol
            {
                out.push((c, k));
            }
        }
    }
    out
}

/// A straight closed curve `q + s·c'` whose class `c'` pairs to ±1 with the
/// leaf class, written in the lattice basis `(c, c')`.
struct Transversal {
    origin: Vec2,
    dir: [i64; 2],
    // Rows of the integer inverse of [c | c'].
    inv: [[i64; 2]; 2],
}

impl Transversal {
    fn new(leaf: &CenterCurve) -> Option<Self> {
        let c = leaf.homotopy_class?;
        let (g, p, q) = extended_gcd(c[0], c[1]);
        if g != 1 {
            return None;
        }
        // a·p + b·q = 1, so det[c | (−q, p)] = 1.
        let mut d = [-q, p];
        let m = ((d[0] * c[0] + d[1] * c[1]) as f64 / (c[0] * c[0] + c[1] * c[1]) as f64).round()
            as i64;
        d = [d[0] - m * c[0], d[1] - m * c[1]];
        let inv = [[d[1], -d[0]], [-c[1], c[0]]];
        Some(Self {
            origin: leaf.points[0],
            dir: d,
            inv,
        })
    }

    fn point(&self, s: f64) -> Vec2 {
        [
            self.origin[0] + s * self.dir[0] as f64,
            self.origin[1] + s * self.dir[1] as f64,
        ]
    }

    /// Coordinates of `v − origin` in the basis `(c, c')`.
    fn coords(&self, v: Vec2) -> Vec2 {
        let w = sub(v, self.origin);
        let r = |row: [i64; 2]| row[0] as f64 * w[0] + row[1] as f64 * w[1];
        [r(self.inv[0]), r(self.inv[1])]
    }

    /// Transversal parameter where the leaf through `z` first crosses it.
    fn crossing(
        &self,
        field: &CenterField,
        z: Vec2,
        max_len: f64,
        opts: &IntegrationOptions,
    ) -> Option<f64> {
        let mut tr = Tracer::new(field, z, opts.step, opts.tangency_tol).ok()?;
        let mut a = self.coords(z);
        if a[0] == a[0].round() {
            return Some(a[1]);
        }
        let mut len = 0.0;
        while len < max_len {
            let b = self.coords(tr.advance().ok()?);
            if a[0].floor() != b[0].floor() {
                let level = a[0].floor().max(b[0].floor());
                let lam = (level - a[0]) / (b[0] - a[0]);
                return Some(a[1] + lam * (b[1] - a[1]));
            }
            a = b;
            len += opts.step;
        }
        None
    }

    /// Roots of `t ↦ s(f^k(point(t))) − t` on the circle, for `|t| ≤ window`.
    fn fixed_leaves(
        &self,
        map: &TorusMap,
        field: &CenterField,
        k: usize,
        window: f64,
        leaf_len: f64,
        opts: &IntegrationOptions,
    ) -> Vec<f64> {
        let reach = 2.0 * leaf_len + 1.0;
        let g = |t: f64| {
            self.crossing(field, iterate(map, self.point(t), k), reach, opts)
                .map(|s| crate::torus_map::wrap_half(s - t))
        };
        let ts: Vec<f64> = (0..WINDOW_SAMPLES)
            .map(|i| -window + 2.0 * window * i as f64 / (WINDOW_SAMPLES - 1) as f64)
            .collect();
        let gs: Vec<Option<f64>> = ts.iter().map(|&t| g(t)).collect();
        let mut roots = Vec::new();
        for i in 0..WINDOW_SAMPLES - 1 {
            let (Some(g0), Some(g1)) = (gs[i], gs[i + 1]) else {
                continue;
            };
            if g0 == 0.0 {
                roots.push(ts[i]);
                continue;
            }
            if g0.signum() == g1.signum() || (g1 - g0).abs() > 0.25 {
                continue;
            }
            let (mut lo, mut hi, mut glo) = (ts[i], ts[i + 1], g0);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                let Some(gm) = g(mid) else { break };
                if gm.signum() == glo.signum() {
                    (lo, glo) = (mid, gm);
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-14 {
                    break;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        if let Some(g_last) = gs[WINDOW_SAMPLES - 1] {
            if g_last == 0.0 {
                roots.push(ts[WINDOW_SAMPLES - 1]);
            }
        }
        roots
    }
}

/// Lifted diameters of `f̃^n(points)` for `n = 0..=n_max`; bounded growth
/// over `n` is the degree-one signature.
pub fn lifted_diameter_growth(map: &TorusMap, points: &[Vec2], n_max: usize) -> Vec<f64> {
    let mut pts = points.to_vec();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            pts = pts.iter().map(|&p| map.lift(p)).collect();
        }
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.max(norm(sub(pts[i], pts[j])));
            }
        }
        out.push(d);
    }
    out
}
