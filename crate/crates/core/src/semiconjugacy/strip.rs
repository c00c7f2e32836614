use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// `sin·sin(2π·fx·x + π·fy·y) + cos·cos(2π·fx·x + π·fy·y)`.
///
/// The y-frequency counts half periods so terms like `sin(πy)` can vanish on
/// both boundary lines of the strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripTerm {
    pub fx: i64,
    pub fy: i64,
    #[serde(default)]
    pub sin: f64,
    #[serde(default)]
    pub cos: f64,
}

impl StripTerm {
    pub const fn sin(fx: i64, fy: i64, amp: f64) -> Self {
        Self {
            fx,
            fy,
            sin: amp,
            cos: 0.0,
        }
    }

    pub const fn cos(fx: i64, fy: i64, amp: f64) -> Self {
        Self {
            fx,
            fy,
            sin: 0.0,
            cos: amp,
        }
    }

    #[inline]
    fn value(&self, x: f64, y: f64) -> f64 {
        // x-phase reduced mod 1 first; y stays in [0, 1].
        let t = self.fx as f64 * x;
        let arg = TAU * (t - t.floor()) + PI * self.fy as f64 * y;
        let (s, c) = arg.sin_cos();
        self.sin * s + self.cos * c
    }
}

fn sum_terms(terms: &[StripTerm], x: f64, y: f64) -> f64 {
    terms.iter().map(|t| t.value(x, y)).sum()
}

/// Equivariant strip map `F(x, y) = (ℓx + Σ fx_terms, y + Σ fy_terms)` on
/// ℝ × [0, 1]; satisfies `F(x + 1, y) = F(x, y) + (ℓ, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripMap {
    pub ell: i64,
    #[serde(default)]
    pub fx_terms: Vec<StripTerm>,
    #[serde(default)]
    pub fy_terms: Vec<StripTerm>,
}

/// Grid used to validate equivariance and boundary invariance.
const CHECK_W: usize = 256;
const CHECK_H: usize = 65;
const BOUNDARY_TOL: f64 = 1e-12;

impl StripMap {
    pub fn new(ell: i64, fx_terms: Vec<StripTerm>, fy_terms: Vec<StripTerm>) -> Result<Self> {
        let m = Self {
            ell,
            fx_terms,
            fy_terms,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell.unsigned_abs() < 2 {
            return Err(Error::InvalidStripMap(format!(
                "|ell| = {} must be at least 2",
                self.ell.abs()
            )));
        }
        if self.ell.unsigned_abs() > 1 << 20 {
            return Err(Error::InvalidStripMap(format!(
                "ell = {} out of range",
                self.ell
            )));
        }
        for t in self.fx_terms.iter().chain(&self.fy_terms) {
            if !t.sin.is_finite() || !t.cos.is_finite() {
                return Err(Error::InvalidStripMap("non-finite amplitude".into()));
            }
            if t.fx.unsigned_abs() > 1 << 20 || t.fy.unsigned_abs() > 1 << 20 {
                return Err(Error::InvalidStripMap(format!(
                    "frequency ({}, {}) out of range",
                    t.fx, t.fy
                )));
            }
        }
        let defect = self.equivariance_defect();
        if defect > 1e-9 {
            return Err(Error::InvalidStripMap(format!(
                "equivariance defect {defect:e}"
            )));
        }
        for i in 0..CHECK_H {
            for j in 0..CHECK_W {
                let (x, y) = (j as f64 / CHECK_W as f64, i as f64 / (CHECK_H - 1) as f64);
                let fy = y + sum_terms(&self.fy_terms, x, y);
                if !(-BOUNDARY_TOL..=1.0 + BOUNDARY_TOL).contains(&fy) {
                    return Err(Error::InvalidStripMap(format!(
                        "fy({x}, {y}) = {fy} leaves [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `sup |F(x+1, y) − F(x, y) − (ℓ, 0)|` over the validation grid.
    pub fn equivariance_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..CHECK_H {
            for j in 0..CHECK_W {
                let (x, y) = (j as f64 / CHECK_W as f64, i as f64 / (CHECK_H - 1) as f64);
                let a = self.apply([x, y]);
                let b = self.apply([x + 1.0, y]);
                worst = worst
                    .max((b[0] - a[0] - self.ell as f64).abs())
                    .max((b[1] - a[1]).abs());
            }
        }
        worst
    }

    /// `P∘F(x, y) − ℓx`, the periodic part of the first component.
    #[inline]
    pub fn periodic_part(&self, x: f64, y: f64) -> f64 {
        sum_terms(&self.fx_terms, x, y)
    }

    /// Second component, clamped into [0, 1] to absorb rounding.
    #[inline]
    pub fn fy(&self, x: f64, y: f64) -> f64 {
        (y + sum_terms(&self.fy_terms, x, y)).clamp(0.0, 1.0)
    }

    #[inline]
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.ell as f64 * p[0] + self.periodic_part(p[0], p[1]),
            self.fy(p[0], p[1]),
        ]
    }

    pub fn is_y_independent(&self) -> bool {
        self.fx_terms
            .iter()
            .chain(&self.fy_terms)
            .all(|t| t.fy == 0)
            && self.fy_terms.is_empty()
    }
}
