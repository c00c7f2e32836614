//! Franks-type contraction on x-periodic functions of the strip and the
//! semiconjugacy `H = P + u` with `H∘F = ℓH`.

mod periodic;
mod strip;

pub use periodic::PeriodicFunction;
pub use strip::{StripMap, StripTerm};

use crate::error::{Error, Result};
use periodic::Stencil;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_GRID: (usize, usize) = (512, 65);
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 10_000;
/// Residuals are measured on a grid this many times finer in each direction.
pub const REFINEMENT: usize = 4;
const MAX_REFINE_DEPTH: usize = 200;

/// `(𝓕φ)(x, y) = (P∘F(x, y) − ℓx + φ(F(x, y))) / ℓ` at every sample node.
pub fn franks_apply(phi: &PeriodicFunction, f: &StripMap) -> PeriodicFunction {
    let plan = FranksPlan::new(f, phi.w, phi.h);
    plan.apply(phi)
}

/// Node images of `F` and the periodic part, fixed across iterations.
struct FranksPlan {
    ell: f64,
    pert: Vec<f64>,
    stencils: Vec<Stencil>,
    w: usize,
    h: usize,
}

impl FranksPlan {
    fn new(f: &StripMap, w: usize, h: usize) -> Self {
        let grid = PeriodicFunction::zeros(w, h);
        let (pert, stencils) = (0..w * h)
            .into_par_iter()
            .map(|k| {
                let (x, y) = grid.node(k / w, k % w);
                let img = f.apply([x, y]);
                (f.periodic_part(x, y), grid.stencil(img[0], img[1]))
            })
            .unzip();
        Self {
            ell: f.ell as f64,
            pert,
            stencils,
            w,
            h,
        }
    }

    fn apply(&self, phi: &PeriodicFunction) -> PeriodicFunction {
        let samples = self
            .pert
            .par_iter()
            .zip(&self.stencils)
            .map(|(p, s)| (p + phi.apply_stencil(s)) / self.ell)
            .collect();
        PeriodicFunction {
            w: self.w,
            h: self.h,
            samples,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub tol: f64,
    pub grid: (usize, usize),
    pub max_iters: usize,
    pub initial: Option<PeriodicFunction>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            grid: DEFAULT_GRID,
            max_iters: DEFAULT_MAX_ITERS,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemiconjugacyResult {
    pub ell: i64,
    pub tol: f64,
    pub grid: (usize, usize),
    /// `sup |H∘F − ℓH|` on the refined grid.
    pub residual: f64,
    /// The same residual using plain bilinear values of `u`; this is the
    /// interpolation error of the sampled representation.
    pub raw_residual: f64,
    /// Number of Franks applications used to evaluate `u` off the grid.
    pub refine_depth: usize,
    pub iterations: usize,
    pub last_increment: f64,
    pub contraction_estimate: f64,
    /// `‖u‖_∞ = ‖H − P‖_∞`.
    pub u_sup: f64,
    #[serde(skip)]
    pub u: PeriodicFunction,
    #[serde(skip)]
    pub strip: Option<StripMap>,
}

impl SemiconjugacyResult {
    fn strip(&self) -> &StripMap {
        self.strip.as_ref().expect("result carries its strip map")
    }

    /// `(𝓕ᵏu)(x, y)` with `k = refine_depth`: the sampled fixed point pushed
    /// through the operator so that interpolation error is damped by `|ℓ|^{-k}`.
    pub fn u_at(&self, x: f64, y: f64) -> f64 {
        u_refined(self.strip(), &self.u, self.refine_depth, x, y)
    }

    pub fn h_at(&self, x: f64, y: f64) -> f64 {
        x + self.u_at(x, y)
    }

    /// `H(F(p)) − ℓH(p)` at one point.
    pub fn residual_at(&self, x: f64, y: f64) -> f64 {
        functional_residual(self.strip(), &self.u, self.refine_depth, x, y)
    }

    /// Residual sup over the refined grid at an arbitrary evaluation depth.
    pub fn measure_residual(&self, depth: usize) -> f64 {
        refined_residual(self.strip(), &self.u, depth)
    }

    /// `sup |H(x+1, y) − H(x, y) − 1|` over the sample nodes.
    pub fn equivariance_check(&self) -> f64 {
        let (w, h) = (self.u.w, self.u.h);
        (0..w * h)
            .into_par_iter()
            .map(|k| {
                let (x, y) = self.u.node(k / w, k % w);
                (self.h_at(x + 1.0, y) - self.h_at(x, y) - 1.0).abs()
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Sweeps `H(·, y0)` over `[0, 1]`.
    pub fn range_sweep(&self, y0: f64, samples: usize) -> RangeSweep {
        let vals: Vec<f64> = (0..=samples)
            .into_par_iter()
            .map(|i| self.h_at(i as f64 / samples as f64, y0))
            .collect();
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        let max_gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        RangeSweep {
            y0,
            start: vals[0],
            end: vals[samples],
            min: sorted[0],
            max: sorted[samples],
            max_gap,
            increasing: vals.windows(2).all(|w| w[1] > w[0]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSweep {
    pub y0: f64,
    pub start: f64,
    pub end: f64,
    pub min: f64,
    pub max: f64,
    /// Largest gap between sorted sampled values; the sweep witnesses every
    /// value of `[start, end]` up to this resolution.
    pub max_gap: f64,
    pub increasing: bool,
}

fn u_refined(f: &StripMap, u: &PeriodicFunction, depth: usize, x: f64, y: f64) -> f64 {
    let ell = f.ell as f64;
    let (mut px, mut py) = (x.rem_euclid(1.0), y);
    let mut acc = 0.0;
    let mut scale = 1.0;
    for _ in 0..depth {
        scale /= ell;
        acc += scale * f.periodic_part(px, py);
        let img = f.apply([px, py]);
        px = img[0].rem_euclid(1.0);
        py = img[1];
    }
    acc + scale * u.eval(px, py)
}

fn functional_residual(f: &StripMap, u: &PeriodicFunction, depth: usize, x: f64, y: f64) -> f64 {
    let img = f.apply([x, y]);
    // H(F p) − ℓH(p) = (P∘F − ℓx) + u(F p) − ℓ u(p)
    f.periodic_part(x, y) + u_refined(f, u, depth, img[0], img[1])
        - f.ell as f64 * u_refined(f, u, depth, x, y)
}

fn refined_grid(u: &PeriodicFunction) -> (usize, usize) {
    (u.w * REFINEMENT, (u.h - 1) * REFINEMENT + 1)
}

fn refined_sup(u: &PeriodicFunction, g: impl Fn(f64, f64) -> f64 + Sync) -> f64 {
    let (w, h) = refined_grid(u);
    (0..w * h)
        .into_par_iter()
        .map(|k| {
            let (x, y) = ((k % w) as f64 / w as f64, (k / w) as f64 / (h - 1) as f64);
            g(x, y).abs()
        })
        .reduce(|| 0.0, f64::max)
}

fn refined_residual(f: &StripMap, u: &PeriodicFunction, depth: usize) -> f64 {
    refined_sup(u, |x, y| functional_residual(f, u, depth, x, y))
}

/// Fixed point of the Franks operator from `u₀ = 0` (or `opts.initial`),
/// stopped by the a-posteriori Banach bound with factor `1/|ℓ|`.
pub fn solve(f: &StripMap, opts: &SolveOptions) -> Result<SemiconjugacyResult> {
    f.validate()?;
    let (w, h) = opts.grid;
    if w < 2 || h < 2 {
        return Err(Error::Config(format!("strip grid {w}x{h} too small")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Config("solver tolerance must be positive".into()));
    }
    let ell_abs = f.ell.unsigned_abs() as f64;
    let stop = opts.tol * (1.0 - 1.0 / ell_abs);
    let plan = FranksPlan::new(f, w, h);
    let mut u = match &opts.initial {
        Some(u0) if (u0.w, u0.h) == (w, h) => u0.clone(),
        Some(u0) => {
            return Err(Error::Config(format!(
                "initial guess is {}x{}, grid is {w}x{h}",
                u0.w, u0.h
            )))
        }
        None => PeriodicFunction::zeros(w, h),
    };
    let mut prev_inc = f64::NAN;
    let mut contraction: f64 = 0.0;
    let mut iterations = 0;
    let last_increment = loop {
        if iterations >= opts.max_iters {
            return Err(Error::NonConvergence {
                iterations,
                last_increment: prev_inc,
            });
        }
        let next = plan.apply(&u);
        let inc = next.sup_dist(&u);
        if prev_inc > 0.0 {
            contraction = contraction.max(inc / prev_inc);
        }
        u = next;
        iterations += 1;
        prev_inc = inc;
        if inc < stop {
            break inc;
        }
    };

    // Off-grid defect of the sampled fixed point, then enough Franks
    // applications to push the residual below tol/10.
    let raw_defect = refined_sup(&u, |x, y| {
        (f.periodic_part(x, y) + {
            let img = f.apply([x, y]);
            u.eval(img[0], img[1])
        }) / f.ell as f64
            - u.eval(x, y)
    });
    let refine_depth = if raw_defect * ell_abs <= 0.1 * opts.tol {
        0
    } else {
        let k = 1.0 + (raw_defect / (0.1 * opts.tol)).ln() / ell_abs.ln();
        (k.ceil() as usize).min(MAX_REFINE_DEPTH)
    };
    let raw_residual = refined_residual(f, &u, 0);
    let residual = refined_residual(f, &u, refine_depth);
    let u_sup = u
        .sup_norm()
        .max(refined_sup(&u, |x, y| u_refined(f, &u, refine_depth, x, y)));
    Ok(SemiconjugacyResult {
        ell: f.ell,
        tol: opts.tol,
        grid: opts.grid,
        residual,
        raw_residual,
        refine_depth,
        iterations,
        last_increment,
        contraction_estimate: contraction,
        u_sup,
        u,
        strip: Some(f.clone()),
    })
}

/// `ℓ^{−n}·P(Fⁿ(p))` by direct iteration of the lift, with the integer part
/// of the x-coordinate carried separately so it stays exact.
pub fn limit_formula_oracle(f: &StripMap, p: [f64; 2], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("oracle needs n ≥ 1".into()));
    }
    let ell = f.ell as f64;
    let mut whole = p[0].floor();
    let (mut frac, mut y) = (p[0] - whole, p[1]);
    let mut ell_pow = 1.0;
    for k in 1..=n {
        let img = f.apply([frac, y]);
        let fl = img[0].floor();
        whole = whole * ell + fl;
        frac = img[0] - fl;
        y = img[1];
        ell_pow *= ell;
        if (whole + frac).abs() > 1e3 * ell_pow.abs() + 1e3 || !whole.is_finite() {
            return Err(Error::Overflow {
                n: k,
                value: whole + frac,
            });
        }
    }
    Ok(whole / ell_pow + frac / ell_pow)
}
