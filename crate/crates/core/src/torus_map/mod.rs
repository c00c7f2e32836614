//! Endomorphisms of the 2-torus given as an integer linear part plus a
//! ℤ²-periodic trigonometric perturbation, together with their lifts to ℝ².

mod homology;
mod matrix;
mod trig;

pub use homology::{
    extended_gcd, is_eigenvector, normalize_homology, parallel, spectrum, Eigenvalue,
    SpectrumReport,
};
pub use matrix::{dist, norm, IntegerMatrix, Mat2, Vec2};
pub use trig::{TrigPolynomial, TrigTerm};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance for deciding that a lift displacement is an integer vector.
pub const INTEGER_ROUNDING_TOL: f64 = 1e-9;

/// Default side of the grid used for the local-diffeomorphism check.
pub const DIFFEO_CHECK_GRID: usize = 256;

/// Reduce a coordinate into [0, 1).
#[inline]
pub fn wrap_unit(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Reduce a difference into [-1/2, 1/2).
#[inline]
pub fn wrap_half(v: f64) -> f64 {
    v - (v + 0.5).floor()
}

/// Distance on ℝ²/ℤ².
pub fn torus_dist(p: Vec2, q: Vec2) -> f64 {
    wrap_half(p[0] - q[0]).hypot(wrap_half(p[1] - q[1]))
}

/// A point of 𝕋² = ℝ²/ℤ² with both coordinates in [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    x: f64,
    y: f64,
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self {
            x: wrap_unit(x),
            y: wrap_unit(y),
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn as_vec(&self) -> Vec2 {
        [self.x, self.y]
    }
}

impl From<Vec2> for TorusPoint {
    fn from(v: Vec2) -> Self {
        Self::new(v[0], v[1])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    pub grid: usize,
    /// Accept |det A| = 1 (automorphisms) for experiments.
    pub allow_degree_one: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            grid: DIFFEO_CHECK_GRID,
            allow_degree_one: false,
        }
    }
}

/// `f̃(x, y) = A·(x, y) + (pert_x(x, y), pert_y(x, y))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusMap {
    pub linear: IntegerMatrix,
    #[serde(default)]
    pub pert_x: TrigPolynomial,
    #[serde(default)]
    pub pert_y: TrigPolynomial,
}

impl TorusMap {
    pub fn linear(linear: IntegerMatrix) -> Self {
        Self {
            linear,
            pert_x: TrigPolynomial::zero(),
            pert_y: TrigPolynomial::zero(),
        }
    }

    pub fn with_perturbation(mut self, pert_x: TrigPolynomial, pert_y: TrigPolynomial) -> Self {
        self.pert_x = pert_x;
        self.pert_y = pert_y;
        self
    }

    /// Structural checks only: nonzero determinant and finite coefficients.
    pub fn check_structure(&self) -> Result<()> {
        if self.linear.det() == 0 {
            return Err(Error::MalformedMap(format!(
                "linear part {} is singular",
                self.linear
            )));
        }
        for t in self.pert_x.terms.iter().chain(&self.pert_y.terms) {
            if !t.sin.is_finite() || !t.cos.is_finite() {
                return Err(Error::MalformedMap("non-finite amplitude".into()));
            }
            if t.fx.unsigned_abs() > 1 << 20 || t.fy.unsigned_abs() > 1 << 20 {
                return Err(Error::MalformedMap(format!(
                    "frequency ({}, {}) out of range",
                    t.fx, t.fy
                )));
            }
        }
        for row in &self.linear.0 {
            for &e in row {
                if e.unsigned_abs() > 1 << 20 {
                    return Err(Error::MalformedMap(format!(
                        "linear entry {e} out of range"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Full validation: structure, degree, and a certified grid check that
    /// `det Df` never vanishes.
    pub fn validate(&self, opts: &ValidationOptions) -> Result<()> {
        self.check_structure()?;
        let det = self.linear.det();
        if det.abs() < 2 && !opts.allow_degree_one {
            return Err(Error::DegreeTooLow(det.abs()));
        }
        self.check_local_diffeo(opts.grid)
    }

    /// Bound on how much `det Df` can move between a point and its nearest
    /// node of an `n × n` grid.
    pub fn det_oscillation_bound(&self, n: usize) -> f64 {
        let h = std::f64::consts::SQRT_2 / (2.0 * n as f64);
        let a = self.linear.to_real();
        let gx = self.pert_x.gradient_bound();
        let gy = self.pert_y.gradient_bound();
        let m = (a.a.abs() + gx[0])
            .max(a.b.abs() + gx[1])
            .max(a.c.abs() + gy[0])
            .max(a.d.abs() + gy[1]);
        let hx = self.pert_x.hessian_bound();
        let hy = self.pert_y.hessian_bound();
        let l = hx[0].max(hx[1]).max(hy[0]).max(hy[1]);
        2.0 * (2.0 * m * l * h + (l * h).powi(2))
    }

    /// Largest derivative oscillation across a grid cell, for grid-adequacy
    /// warnings.
    pub fn derivative_oscillation(&self, n: usize) -> f64 {
        let h = std::f64::consts::SQRT_2 / (2.0 * n as f64);
        let hx = self.pert_x.hessian_bound();
        let hy = self.pert_y.hessian_bound();
        hx[0].max(hx[1]).max(hy[0]).max(hy[1]) * h
    }

    fn check_local_diffeo(&self, n: usize) -> Result<()> {
        let bound = self.det_oscillation_bound(n);
        let sign = self.linear.det().signum() as f64;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (j as f64 / n as f64, i as f64 / n as f64);
                let det = self.jacobian([x, y]).det();
                if !(det * sign > bound) {
                    return Err(Error::NotLocalDiffeo { x, y, det, bound });
                }
            }
        }
        Ok(())
    }

    /// The lift `f̃` on ℝ².
    #[inline]
    pub fn lift(&self, v: Vec2) -> Vec2 {
        let l = self.linear.apply_real(v);
        [
            l[0] + self.pert_x.value(v[0], v[1]),
            l[1] + self.pert_y.value(v[0], v[1]),
        ]
    }

    /// `f(p)` on the torus (`lift = false`) or `f̃` applied to the
    /// representative of `p` in [0,1)² (`lift = true`).
    pub fn evaluate(&self, p: TorusPoint, lift: bool) -> Vec2 {
        let v = self.lift(p.as_vec());
        if lift {
            v
        } else {
            [wrap_unit(v[0]), wrap_unit(v[1])]
        }
    }

    pub fn apply(&self, p: TorusPoint) -> TorusPoint {
        TorusPoint::from(self.lift(p.as_vec()))
    }

    /// Exact derivative of the lift; periodic, so any representative works.
    #[inline]
    pub fn jacobian(&self, v: Vec2) -> Mat2 {
        let gx = self.pert_x.gradient(v[0], v[1]);
        let gy = self.pert_y.gradient(v[0], v[1]);
        let a = self.linear.to_real();
        Mat2::new(a.a + gx[0], a.b + gx[1], a.c + gy[0], a.d + gy[1])
    }

    /// Linear part read off from the lift displacements at `base`.
    pub fn extract_linearization_at(&self, base: Vec2) -> Result<IntegerMatrix> {
        let f0 = self.lift(base);
        let mut cols = [[0i64; 2]; 2];
        for (k, col) in cols.iter_mut().enumerate() {
            let mut p = base;
            p[k] += 1.0;
            let f1 = self.lift(p);
            for i in 0..2 {
                let d = f1[i] - f0[i];
                let r = d.round();
                if (d - r).abs() > INTEGER_ROUNDING_TOL {
                    return Err(Error::MalformedMap(format!(
                        "non-integer displacement {d} along e{}",
                        k + 1
                    )));
                }
                col[i] = r as i64;
            }
        }
        Ok(IntegerMatrix([
            [cols[0][0], cols[1][0]],
            [cols[0][1], cols[1][1]],
        ]))
    }

    pub fn extract_linearization(&self) -> Result<IntegerMatrix> {
        self.extract_linearization_at([0.123_456_789, 0.876_543_21])
    }

    /// Wraps a lifted point back to the torus.
    pub fn project(v: Vec2) -> TorusPoint {
        TorusPoint::from(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn diag31() -> TorusMap {
        TorusMap::linear(IntegerMatrix::new(3, 0, 0, 1))
    }

    fn perturbed() -> TorusMap {
        TorusMap::linear(IntegerMatrix::new(2, 1, 1, 3)).with_perturbation(
            TrigPolynomial::new(vec![
                TrigTerm::sin(0, 1, 0.05),
                TrigTerm {
                    fx: 1,
                    fy: 1,
                    sin: 0.02,
                    cos: -0.03,
                },
            ]),
            TrigPolynomial::new(vec![TrigTerm::cos(2, -1, 0.04), TrigTerm::sin(1, 0, 0.05)]),
        )
    }

    #[test]
    fn evaluate_linear() {
        let f = diag31();
        assert_eq!(f.evaluate(TorusPoint::new(0.25, 0.5), true), [0.75, 0.5]);
        assert_eq!(f.evaluate(TorusPoint::new(0.5, 0.5), false), [0.5, 0.5]);
    }

    #[test]
    fn evaluate_perturbed() {
        let f = diag31().with_perturbation(
            TrigPolynomial::new(vec![TrigTerm::sin(0, 1, 0.05)]),
            TrigPolynomial::zero(),
        );
        let v = f.evaluate(TorusPoint::new(0.0, 0.25), true);
        assert!((v[0] - 0.05).abs() < 1e-15 && (v[1] - 0.25).abs() < 1e-15);
        let j = f.jacobian([0.0, 0.0]);
        assert_eq!((j.a, j.c, j.d), (3.0, 0.0, 1.0));
        assert!((j.b - 0.1 * PI).abs() < 1e-15);
    }

    #[test]
    fn torus_point_reduction() {
        let p = TorusPoint::new(-1e-20, 2.0);
        assert_eq!((p.x(), p.y()), (0.0, 0.0));
        let q = TorusPoint::new(-0.25, 3.75);
        assert_eq!((q.x(), q.y()), (0.75, 0.75));
    }

    #[test]
    fn equivariance_of_lift() {
        let f = perturbed();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = [rng.gen::<f64>(), rng.gen::<f64>()];
            let n = [rng.gen_range(-3i64..=3), rng.gen_range(-3i64..=3)];
            let q = [p[0] + n[0] as f64, p[1] + n[1] as f64];
            let an = f.linear.apply(n);
            let (fp, fq) = (f.lift(p), f.lift(q));
            let e = ((fq[0] - fp[0] - an[0] as f64).powi(2)
                + (fq[1] - fp[1] - an[1] as f64).powi(2))
            .sqrt();
            assert!(e < 1e-9, "equivariance defect {e}");
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let f = perturbed();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-6;
        for _ in 0..100 {
            let p = [rng.gen::<f64>(), rng.gen::<f64>()];
            let j = f.jacobian(p).entries();
            for k in 0..2 {
                let mut pp = p;
                let mut pm = p;
                pp[k] += h;
                pm[k] -= h;
                let (fp, fm) = (f.lift(pp), f.lift(pm));
                for i in 0..2 {
                    let fd = (fp[i] - fm[i]) / (2.0 * h);
                    assert!(
                        (fd - j[i][k]).abs() < 1e-8,
                        "entry ({i},{k}): {fd} vs {}",
                        j[i][k]
                    );
                }
            }
        }
    }

    #[test]
    fn linearization_is_base_point_independent() {
        let f = perturbed();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let p = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
            assert_eq!(f.extract_linearization_at(p).unwrap(), f.linear);
        }
        let cat = TorusMap::linear(IntegerMatrix::new(2, 1, 1, 1));
        assert_eq!(
            cat.extract_linearization().unwrap(),
            IntegerMatrix::new(2, 1, 1, 1)
        );
        assert_eq!(
            diag31().extract_linearization().unwrap(),
            IntegerMatrix::new(3, 0, 0, 1)
        );
    }

    #[test]
    fn validation() {
        let opts = ValidationOptions::default();
        assert!(diag31().validate(&opts).is_ok());
        assert!(perturbed().validate(&opts).is_ok());
        let cat = TorusMap::linear(IntegerMatrix::new(2, 1, 1, 1));
        assert!(matches!(cat.validate(&opts), Err(Error::DegreeTooLow(1))));
        assert!(cat
            .validate(&ValidationOptions {
                allow_degree_one: true,
                ..opts
            })
            .is_ok());
        // d/dy (y + 0.2 sin 2πy) = 1 + 0.4π cos 2πy vanishes somewhere.
        let folded = diag31().with_perturbation(
            TrigPolynomial::zero(),
            TrigPolynomial::new(vec![TrigTerm::sin(0, 1, 0.2)]),
        );
        assert!(matches!(
            folded.validate(&opts),
            Err(Error::NotLocalDiffeo { .. })
        ));
        let singular = TorusMap::linear(IntegerMatrix::new(1, 2, 2, 4));
        assert!(matches!(
            singular.validate(&opts),
            Err(Error::MalformedMap(_))
        ));
    }
}
