use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// One term `sin * sin(2π(fx·x + fy·y)) + cos * cos(2π(fx·x + fy·y))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub fx: i64,
    pub fy: i64,
    #[serde(default)]
    pub sin: f64,
    #[serde(default)]
    pub cos: f64,
}

impl TrigTerm {
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

    fn amplitude(&self) -> f64 {
        self.sin.abs() + self.cos.abs()
    }

    /// Phase in turns, reduced into [0, 1) so large lifted coordinates keep
    /// full precision in the trig evaluation.
    #[inline]
    fn phase(&self, x: f64, y: f64) -> f64 {
        let t = self.fx as f64 * x + self.fy as f64 * y;
        t - t.floor()
    }
}

/// Finite trigonometric polynomial on the torus; ℤ²-periodic by construction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrigPolynomial {
    pub terms: Vec<TrigTerm>,
}

impl TrigPolynomial {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.sin == 0.0 && t.cos == 0.0)
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let (s, c) = (TAU * t.phase(x, y)).sin_cos();
                t.sin * s + t.cos * c
            })
            .sum()
    }

    /// `(∂/∂x, ∂/∂y)` in closed form.
    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let mut g = [0.0; 2];
        for t in &self.terms {
            let (s, c) = (TAU * t.phase(x, y)).sin_cos();
            let d = TAU * (t.sin * c - t.cos * s);
            g[0] += t.fx as f64 * d;
            g[1] += t.fy as f64 * d;
        }
        g
    }

    /// Upper bound on `sup |p|`.
    pub fn sup_bound(&self) -> f64 {
        self.terms.iter().map(TrigTerm::amplitude).sum()
    }

    /// Upper bounds on `sup |∂p/∂x|` and `sup |∂p/∂y|`.
    pub fn gradient_bound(&self) -> [f64; 2] {
        let mut b = [0.0; 2];
        for t in &self.terms {
            b[0] += TAU * (t.fx as f64).abs() * t.amplitude();
            b[1] += TAU * (t.fy as f64).abs() * t.amplitude();
        }
        b
    }

    /// Upper bounds on the Lipschitz constants of `∂p/∂x` and `∂p/∂y`.
    pub fn hessian_bound(&self) -> [f64; 2] {
        let mut b = [0.0; 2];
        for t in &self.terms {
            let f = (t.fx as f64).hypot(t.fy as f64);
            b[0] += TAU * TAU * (t.fx as f64).abs() * f * t.amplitude();
            b[1] += TAU * TAU * (t.fy as f64).abs() * f * t.amplitude();
        }
        b
    }
}
