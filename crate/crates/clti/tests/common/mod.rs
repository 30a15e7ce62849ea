//! Shared test support: an independent double-double matrix product used as
//! the extended-precision oracle, plus small helpers for building systems.

#![allow(dead_code)]

use clti::linalg::Matrix;
use clti::lti::{discretize_bilinear, hippo_matrix, ContinuousLti, DiscreteLti};

/// Double-double value: an unevaluated sum `hi + lo` carrying ~31 decimal
/// digits. Only the operations the oracle needs are implemented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub fn from_f64(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn zero() -> Dd {
        Dd { hi: 0.0, lo: 0.0 }
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    pub fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Square matrix held in double-double entries.
pub struct DdMatrix {
    pub n: usize,
    pub data: Vec<Dd>,
}

impl DdMatrix {
    pub fn from_matrix(a: &Matrix) -> DdMatrix {
        assert!(a.is_square());
        DdMatrix {
            n: a.rows(),
            data: a.data().iter().map(|&v| Dd::from_f64(v)).collect(),
        }
    }

    pub fn square(&self) -> DdMatrix {
        let n = self.n;
        let mut out = vec![Dd::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Dd::zero();
                for k in 0..n {
                    acc = acc.add(self.data[i * n + k].mul(self.data[k * n + j]));
                }
                out[i * n + j] = acc;
            }
        }
        DdMatrix { n, data: out }
    }

    pub fn get(&self, i: usize, j: usize) -> Dd {
        self.data[i * self.n + j]
    }
}

/// The m=100 reference model: HiPPO state matrix, B = ones, C = ones/m,
/// D = 0, bilinear at delta = 5e-4.
pub fn hippo_system_100() -> DiscreteLti {
    hippo_system(100)
}

pub fn hippo_system(m: usize) -> DiscreteLti {
    let csys = ContinuousLti::new(
        hippo_matrix(m),
        Matrix::from_vec(m, 1, vec![1.0; m]).unwrap(),
        Matrix::from_vec(1, m, vec![1.0 / m as f64; m]).unwrap(),
        Matrix::zeros(1, 1),
    )
    .unwrap();
    discretize_bilinear(&csys, 0.5e-3).unwrap()
}

#[cfg(test)]
mod dd_tests {
    use super::*;

    #[test]
    fn dd_add_keeps_cancelled_bits() {
        let a = Dd::from_f64(1.0);
        let tiny = Dd::from_f64(1e-25);
        let s = a.add(tiny);
        assert_eq!(s.hi, 1.0);
        assert_eq!(s.lo, 1e-25);
    }

    #[test]
    fn dd_mul_captures_rounding_error() {
        let a = Dd::from_f64(1.0 + f64::EPSILON);
        let p = a.mul(a);
        // (1+e)^2 = 1 + 2e + e^2; the e^2 term survives in lo.
        assert_eq!(p.hi, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(p.lo, f64::EPSILON * f64::EPSILON);
    }
}
