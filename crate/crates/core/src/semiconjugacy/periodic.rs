use serde::{Deserialize, Serialize};
use std::io::Write;

/// Samples on `[0,1) × [0,1]`: `x_j = j/w` (periodic), `y_i = i/(h−1)`.
/// Bilinear interpolation with wraparound in x, so the value at `(x+1, y)`
/// equals the value at `(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicFunction {
    pub w: usize,
    pub h: usize,
    pub samples: Vec<f64>,
}

/// Precomputed bilinear stencil.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stencil {
    pub idx: [usize; 4],
    pub wt: [f64; 4],
}

impl PeriodicFunction {
    pub fn zeros(w: usize, h: usize) -> Self {
        assert!(w >= 1 && h >= 2, "grid must be at least 1x2");
        Self {
            w,
            h,
            samples: vec![0.0; w * h],
        }
    }

    pub fn from_fn(w: usize, h: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut u = Self::zeros(w, h);
        for i in 0..h {
            for j in 0..w {
                let (x, y) = u.node(i, j);
                u.samples[i * w + j] = f(x, y);
            }
        }
        u
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (j as f64 / self.w as f64, i as f64 / (self.h - 1) as f64)
    }

    #[inline]
    pub(crate) fn stencil(&self, x: f64, y: f64) -> Stencil {
        let u = x.rem_euclid(1.0) * self.w as f64;
        let v = y.clamp(0.0, 1.0) * (self.h - 1) as f64;
        let (j0f, i0f) = (u.floor(), v.floor());
        let (tx, ty) = (u - j0f, v - i0f);
        let j0 = (j0f as usize) % self.w;
        let j1 = (j0 + 1) % self.w;
        let i0 = (i0f as usize).min(self.h - 2);
        let ty = if i0f as usize > self.h - 2 { 1.0 } else { ty };
        let i1 = i0 + 1;
        Stencil {
            idx: [
                i0 * self.w + j0,
                i0 * self.w + j1,
                i1 * self.w + j0,
                i1 * self.w + j1,
            ],
            wt: [
                (1.0 - tx) * (1.0 - ty),
                tx * (1.0 - ty),
                (1.0 - tx) * ty,
                tx * ty,
            ],
        }
    }

    #[inline]
    pub(crate) fn apply_stencil(&self, s: &Stencil) -> f64 {
        s.wt[0] * self.samples[s.idx[0]]
            + s.wt[1] * self.samples[s.idx[1]]
            + s.wt[2] * self.samples[s.idx[2]]
            + s.wt[3] * self.samples[s.idx[3]]
    }

    /// Bilinear value at any `x ∈ ℝ`, `y ∈ [0, 1]`.
    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.apply_stencil(&self.stencil(x, y))
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_dist(&self, other: &PeriodicFunction) -> f64 {
        assert_eq!((self.w, self.h), (other.w, other.h));
        self.samples
            .iter()
            .zip(&other.samples)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// CSV dump `x,y,u` of the samples.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,u")?;
        for i in 0..self.h {
            for j in 0..self.w {
                let (x, y) = self.node(i, j);
                writeln!(
                    out,
                    "{},{},{}",
                    crate::report::fmt_f64(x),
                    crate::report::fmt_f64(y),
                    crate::report::fmt_f64(self.samples[i * self.w + j])
                )?;
            }
        }
        Ok(())
    }
}
