//! Exact integer computations on the linear part: spectrum and the
//! unimodular change of basis sending a boundary class to `e₁`.

use super::matrix::IntegerMatrix;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Eigenvalue {
    Integer {
        value: i64,
    },
    /// Real root of an integer quadratic with non-square discriminant.
    Irrational {
        value: f64,
    },
    Complex {
        re: f64,
        im: f64,
    },
}

impl Eigenvalue {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Eigenvalue::Integer { value } => Some(value as f64),
            Eigenvalue::Irrational { value } => Some(value),
            Eigenvalue::Complex { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: [Eigenvalue; 2],
    pub discriminant: i64,
    pub is_integer_spectrum: bool,
}

fn isqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    Some(r)
}

/// Eigenvalues from `λ² − tr·λ + det`, with integrality decided on the
/// integer discriminant.
pub fn spectrum(a: &IntegerMatrix) -> SpectrumReport {
    let (t, d) = (a.trace(), a.det());
    let disc = t * t - 4 * d;
    match isqrt(disc) {
        Some(s) if s * s == disc => {
            // disc ≡ t² (mod 4), so t ± s is always even.
            let hi = (t + s) / 2;
            let lo = (t - s) / 2;
            SpectrumReport {
                eigenvalues: [
                    Eigenvalue::Integer { value: hi },
                    Eigenvalue::Integer { value: lo },
                ],
                discriminant: disc,
                is_integer_spectrum: true,
            }
        }
        _ if disc > 0 => {
            let r = (disc as f64).sqrt();
            SpectrumReport {
                eigenvalues: [
                    Eigenvalue::Irrational {
                        value: (t as f64 + r) / 2.0,
                    },
                    Eigenvalue::Irrational {
                        value: (t as f64 - r) / 2.0,
                    },
                ],
                discriminant: disc,
                is_integer_spectrum: false,
            }
        }
        _ => {
            let im = ((-disc) as f64).sqrt() / 2.0;
            let re = t as f64 / 2.0;
            SpectrumReport {
                eigenvalues: [
                    Eigenvalue::Complex { re, im },
                    Eigenvalue::Complex { re, im: -im },
                ],
                discriminant: disc,
                is_integer_spectrum: false,
            }
        }
    }
}

/// Returns `(g, x, y)` with `a·x + b·y = g = gcd(a, b) ≥ 0`.
pub fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// `u ∥ v` exactly.
pub fn parallel(u: [i64; 2], v: [i64; 2]) -> bool {
    u[0] * v[1] - u[1] * v[0] == 0
}

/// The integer eigenvalue of `cls` under `a`, if `cls` is an eigenvector.
pub fn is_eigenvector(a: &IntegerMatrix, cls: [i64; 2]) -> Option<i64> {
    if cls == [0, 0] {
        return None;
    }
    let img = a.apply(cls);
    if !parallel(img, cls) {
        return None;
    }
    let (num, den) = if cls[0] != 0 {
        (img[0], cls[0])
    } else {
        (img[1], cls[1])
    };
    (num % den == 0).then(|| num / den)
}

/// Unimodular `U` with `U·cls = e₁`, and `A' = U A U⁻¹`, upper triangular
/// with `A'₁₁` the eigenvalue of `cls`.
pub fn normalize_homology(
    a: &IntegerMatrix,
    cls: [i64; 2],
) -> Result<(IntegerMatrix, IntegerMatrix)> {
    let (g, p, q) = extended_gcd(cls[0], cls[1]);
    if g != 1 {
        return Err(Error::NotPrimitive(cls[0], cls[1]));
    }
    if is_eigenvector(a, cls).is_none() {
        let img = a.apply(cls);
        return Err(Error::NotEigenvector {
            cls0: cls[0],
            cls1: cls[1],
            img0: img[0],
            img1: img[1],
        });
    }
    // Rows (p, q) and (-b, a): first row pairs to 1 with cls, second to 0.
    let u = IntegerMatrix::new(p, q, -cls[1], cls[0]);
    let u_inv = u.unimodular_inverse().expect("det U = p·a + q·b = 1");
    let normal = u.mul(a).mul(&u_inv);
    Ok((u, normal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spectrum_examples() {
        let s = spectrum(&IntegerMatrix::new(3, 0, 0, 1));
        assert!(s.is_integer_spectrum);
        assert_eq!(
            s.eigenvalues,
            [
                Eigenvalue::Integer { value: 3 },
                Eigenvalue::Integer { value: 1 }
            ]
        );

        let cat = spectrum(&IntegerMatrix::new(2, 1, 1, 1));
        assert_eq!(cat.discriminant, 5);
        assert!(!cat.is_integer_spectrum);
        let hi = cat.eigenvalues[0].as_f64().unwrap();
        let lo = cat.eigenvalues[1].as_f64().unwrap();
        assert!((hi - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((lo - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);

        let rot = spectrum(&IntegerMatrix::new(0, -1, 1, 0));
        assert!(matches!(rot.eigenvalues[0], Eigenvalue::Complex { .. }));
    }

    #[test]
    fn normalize_identity_case() {
        let a = IntegerMatrix::new(3, 0, 0, 1);
        let (u, n) = normalize_homology(&a, [1, 0]).unwrap();
        assert_eq!(u, IntegerMatrix::IDENTITY);
        assert_eq!(n, a);
    }

    #[test]
    fn normalize_swap_case() {
        let a = IntegerMatrix::new(1, 0, 2, 3);
        let (u, n) = normalize_homology(&a, [0, 1]).unwrap();
        assert_eq!(u.apply([0, 1]), [1, 0]);
        assert_eq!(u.det().abs(), 1);
        assert_eq!(n.0[1][0], 0);
        assert_eq!(n.0[0][0], 3);
        assert_eq!(n.0[1][1], 1);
    }

    #[test]
    fn normalize_nontrivial_class() {
        let a = IntegerMatrix::new(5, 0, 4, 3);
        assert_eq!(a.apply([1, 2]), [5, 10]);
        let (u, n) = normalize_homology(&a, [1, 2]).unwrap();
        assert_eq!(u.apply([1, 2]), [1, 0]);
        assert_eq!(u.det().abs(), 1);
        assert_eq!(n.0[1][0], 0);
        assert_eq!(n.0[0][0], 5);
        assert_eq!(n.0[1][1], 3);
    }

    #[test]
    fn normalize_errors() {
        let a = IntegerMatrix::new(3, 0, 0, 1);
        assert!(matches!(
            normalize_homology(&a, [2, 0]),
            Err(Error::NotPrimitive(2, 0))
        ));
        assert!(matches!(
            normalize_homology(&a, [1, 1]),
            Err(Error::NotEigenvector {
                img0: 3,
                img1: 1,
                ..
            })
        ));
    }

    proptest! {
        #[test]
        fn normal_form_is_upper_triangular(l in -6i64..=6, k in -6i64..=6, m in -6i64..=6,
                                           p in -5i64..=5, q in -5i64..=5) {
            prop_assume!(l != 0 && m != 0);
            let (g, _, _) = extended_gcd(p, q);
            prop_assume!(g == 1);
            // Conjugate the triangular model by a unimodular matrix sending e₁ to (p, q).
            let (_, x, y) = extended_gcd(p, q);
            let v = IntegerMatrix::new(p, -y, q, x);
            prop_assert_eq!(v.det(), 1);
            let model = IntegerMatrix::new(l, k, 0, m);
            let a = v.mul(&model).mul(&v.unimodular_inverse().unwrap());
            let (u, n) = normalize_homology(&a, [p, q]).unwrap();
            prop_assert_eq!(n.0[1][0], 0);
            prop_assert_eq!(u.det().abs(), 1);
            prop_assert_eq!(n.0[0][0], l);
            prop_assert_eq!(u.apply([p, q]), [1, 0]);
        }

        #[test]
        fn gcd_identity(a in -1000i64..1000, b in -1000i64..1000) {
            let (g, x, y) = extended_gcd(a, b);
            prop_assert_eq!(a * x + b * y, g);
            prop_assert!(g >= 0);
        }
    }
}
