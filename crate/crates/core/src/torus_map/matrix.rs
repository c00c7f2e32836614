use serde::{Deserialize, Serialize};

/// A point or vector in the plane.
pub type Vec2 = [f64; 2];

/// Real 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// `det(M) * M^{-1}`. Acts on directions exactly like the inverse.
    pub fn adjugate(&self) -> Mat2 {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let adj = self.adjugate();
        Some(Mat2::new(
            adj.a / det,
            adj.b / det,
            adj.c / det,
            adj.d / det,
        ))
    }

    pub fn max_abs(&self) -> f64 {
        self.a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs())
    }

    pub fn scaled(&self, s: f64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }
}

pub fn norm(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

pub fn dist(p: Vec2, q: Vec2) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Integer 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntegerMatrix(pub [[i64; 2]; 2]);

impl IntegerMatrix {
    pub const IDENTITY: IntegerMatrix = IntegerMatrix([[1, 0], [0, 1]]);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self([[a, b], [c, d]])
    }

    pub fn det(&self) -> i64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn apply(&self, v: [i64; 2]) -> [i64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn mul(&self, o: &IntegerMatrix) -> IntegerMatrix {
        let (m, n) = (&self.0, &o.0);
        IntegerMatrix([
            [
                m[0][0] * n[0][0] + m[0][1] * n[1][0],
                m[0][0] * n[0][1] + m[0][1] * n[1][1],
            ],
            [
                m[1][0] * n[0][0] + m[1][1] * n[1][0],
                m[1][0] * n[0][1] + m[1][1] * n[1][1],
            ],
        ])
    }

    /// Inverse of a unimodular matrix (det = ±1); `None` otherwise.
    pub fn unimodular_inverse(&self) -> Option<IntegerMatrix> {
        let det = self.det();
        if det != 1 && det != -1 {
            return None;
        }
        let m = &self.0;
        Some(IntegerMatrix([
            [det * m[1][1], -det * m[0][1]],
            [-det * m[1][0], det * m[0][0]],
        ]))
    }

    pub fn to_real(&self) -> Mat2 {
        let m = &self.0;
        Mat2::new(
            m[0][0] as f64,
            m[0][1] as f64,
            m[1][0] as f64,
            m[1][1] as f64,
        )
    }

    pub fn apply_real(&self, v: Vec2) -> Vec2 {
        self.to_real().apply(v)
    }
}

impl std::fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjugate_inverts_up_to_det() {
        let m = Mat2::new(2.0, 1.0, 1.0, 1.0);
        let p = m.mul(&m.adjugate());
        assert_eq!(p, Mat2::new(1.0, 0.0, 0.0, 1.0));
        assert!(Mat2::new(1.0, 2.0, 2.0, 4.0).inverse().is_none());
    }

    #[test]
    fn unimodular_inverse() {
        let u = IntegerMatrix::new(2, 1, 1, 1);
        assert_eq!(
            u.mul(&u.unimodular_inverse().unwrap()),
            IntegerMatrix::IDENTITY
        );
        let v = IntegerMatrix::new(0, 1, 1, 0);
        assert_eq!(
            v.mul(&v.unimodular_inverse().unwrap()),
            IntegerMatrix::IDENTITY
        );
        assert!(IntegerMatrix::new(3, 0, 0, 1)
            .unimodular_inverse()
            .is_none());
    }
}
