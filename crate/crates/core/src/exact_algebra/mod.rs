//! Exact arithmetic in cyclotomic fields and exact rational linear algebra.

mod field;
mod linalg;
mod real;
mod scalar;
mod serde_impl;

pub use field::{cyclotomic_polynomial, totient, CyclotomicField};
pub use linalg::{
    nullspace_from_rref, rational_nullspace, rref, saturate, IndependentRows, RationalMatrix, Rref,
};
pub use real::{compare_real, floor_ratio, sign_of_real, RealSign};
pub use scalar::{sum, ExactScalar};
pub use serde_impl::{format_rational, parse_rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not real")]
    NotReal,
    #[error("value is not positive")]
    NotPositive,
    #[error("conductor must be a positive integer")]
    InvalidConductor,
    #[error("cannot embed Q(zeta_{from}) into Q(zeta_{to})")]
    IncompatibleConductor { from: u32, to: u32 },
}

/// Square matrix of cyclotomic scalars.
pub type ScalarMatrix = Vec<Vec<ExactScalar>>;

/// Matrix product; entries are accumulated in the lcm field.
pub fn mat_mul(a: &ScalarMatrix, b: &ScalarMatrix, conductor: u32) -> ScalarMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    let mut acc = ExactScalar::zero(conductor);
                    for (k, x) in row.iter().enumerate().take(inner) {
                        if x.is_zero() || b[k][c].is_zero() {
                            continue;
                        }
                        acc = &acc + &(x * &b[k][c]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Product of an integer matrix with a scalar matrix (`int · m`).
pub fn int_mat_mul_left(int: &[Vec<i64>], m: &ScalarMatrix, conductor: u32) -> ScalarMatrix {
    let cols = m.first().map_or(0, |r| r.len());
    int.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    let mut acc = ExactScalar::zero(conductor);
                    for (k, z) in row.iter().enumerate() {
                        if *z != 0 && !m[k][c].is_zero() {
                            acc = &acc + &m[k][c].mul_int(*z);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Product of a scalar matrix with an integer matrix (`m · int`).
pub fn int_mat_mul_right(m: &ScalarMatrix, int: &[Vec<i64>], conductor: u32) -> ScalarMatrix {
    let cols = int.first().map_or(0, |r| r.len());
    m.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    let mut acc = ExactScalar::zero(conductor);
                    for (k, x) in row.iter().enumerate() {
                        let z = int[k][c];
                        if z != 0 && !x.is_zero() {
                            acc = &acc + &x.mul_int(z);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn conj_matrix(m: &ScalarMatrix) -> ScalarMatrix {
    m.iter()
        .map(|r| r.iter().map(|x| x.conj()).collect())
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|c| m.iter().map(|r| r[c].clone()).collect())
        .collect()
}
