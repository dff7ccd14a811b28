//! Commutant of `(s̃, τ)` and exhaustive enumeration of nonnegative integer
//! modular invariants.

mod search;

pub use search::{enumerate_invariants, enumerate_invariants_with, EnumerationConfig, Mode};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_algebra::{
    int_mat_mul_left, int_mat_mul_right, rational_nullspace, ExactScalar, IndependentRows,
    RationalMatrix,
};
use crate::modular_data::{ModularData, ModularDataError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("rank mismatch: modular data has rank {expected}, matrix has rank {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("search exceeded its node budget of {budget}; raise MODINV_NODE_BUDGET or tighten the mode")]
    SearchBudgetExceeded { budget: u64 },
    #[error("bound must be at least 1")]
    InvalidBound,
    #[error("reduced constraint coefficients exceed machine range")]
    CoefficientOverflow,
    #[error(transparent)]
    Data(#[from] ModularDataError),
}

/// Square matrix of nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZMatrix {
    rank: usize,
    entries: Vec<u64>,
}

impl ZMatrix {
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self, SearchError> {
        let rank = rows.len();
        if rows.iter().any(|r| r.len() != rank) {
            return Err(SearchError::NotSquare);
        }
        Ok(ZMatrix {
            rank,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub(crate) fn from_flat(rank: usize, entries: Vec<u64>) -> Self {
        debug_assert_eq!(entries.len(), rank * rank);
        ZMatrix { rank, entries }
    }

    pub fn identity(rank: usize) -> Self {
        Self::permutation(&(0..rank).collect::<Vec<_>>())
    }

    /// `z_{j, perm[j]} = 1`.
    pub fn permutation(perm: &[usize]) -> Self {
        let rank = perm.len();
        let mut entries = vec![0; rank * rank];
        for (j, k) in perm.iter().enumerate() {
            entries[j * rank + k] = 1;
        }
        ZMatrix { rank, entries }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, j: usize, k: usize) -> u64 {
        self.entries[j * self.rank + k]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.rank.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        self.entries
            .chunks(self.rank.max(1))
            .map(|r| r.iter().map(|x| *x as i64).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let r = self.rank;
        let mut entries = vec![0; r * r];
        for j in 0..r {
            for k in 0..r {
                entries[k * r + j] = self.get(j, k);
            }
        }
        ZMatrix { rank: r, entries }
    }

    pub fn is_normalized(&self, unit: usize) -> bool {
        unit < self.rank && self.get(unit, unit) == 1
    }

    pub fn trace(&self) -> u64 {
        (0..self.rank).map(|j| self.get(j, j)).sum()
    }

    /// `Tr(Z Zᵗ) = Σ z_jk²`.
    pub fn trace_zzt(&self) -> u64 {
        self.entries.iter().map(|x| x * x).sum()
    }

    /// `Σ z_jk d_j d_k`.
    pub fn dimension_pairing(&self, dims: &[ExactScalar]) -> ExactScalar {
        let conductor = dims.first().map_or(1, |d| d.conductor());
        let mut acc = ExactScalar::zero(conductor);
        for j in 0..self.rank {
            for k in 0..self.rank {
                let z = self.get(j, k);
                if z != 0 {
                    acc = &acc + &(&dims[j] * &dims[k]).mul_int(z as i64);
                }
            }
        }
        acc
    }
}

/// Rational basis of `{M : M s̃ = s̃ M, M τ = τ M}`, each element saturated
/// to a primitive integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutantBasis {
    pub rank: usize,
    pub basis: Vec<Vec<Vec<BigInt>>>,
}

impl CommutantBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Index pairs `(j, k)` allowed by T-commutation, i.e. `θ_j = θ_k`.
pub(crate) fn t_support(md: &ModularData) -> Vec<(usize, usize)> {
    let t = md.t_exponents();
    let r = md.rank();
    (0..r)
        .flat_map(|j| (0..r).map(move |k| (j, k)))
        .filter(|(j, k)| t[*j] == t[*k])
        .collect()
}

fn coords(x: &ExactScalar, degree: usize) -> Vec<BigRational> {
    let mut c = x.coeffs();
    c.resize(degree, BigRational::zero());
    c
}

/// Rows of the S-commutation equations over the unknowns `support`,
/// expanded in power-basis coordinates and filtered to an independent set.
/// The coefficient of `m_{jk}` in entry `(a,b)` of `M s̃ − s̃ M` is
/// `[a=j] s̃_{kb} − [b=k] s̃_{aj}`.
pub(crate) fn s_commutation_rows(
    md: &ModularData,
    support: &[(usize, usize)],
    extra_cols: usize,
) -> RationalMatrix {
    let r = md.rank();
    let n = md.conductor();
    let degree = ExactScalar::zero(n).field().degree();
    let s: Vec<Vec<Vec<BigRational>>> = md
        .s_tilde()
        .iter()
        .map(|row| row.iter().map(|x| coords(x, degree)).collect())
        .collect();
    let cols = support.len() + extra_cols;
    let mut by_row: Vec<Vec<usize>> = vec![Vec::new(); r];
    let mut by_col: Vec<Vec<usize>> = vec![Vec::new(); r];
    for (u, (j, k)) in support.iter().enumerate() {
        by_row[*j].push(u);
        by_col[*k].push(u);
    }
    let mut sel = IndependentRows::new(cols);
    'outer: for a in 0..r {
        for b in 0..r {
            let mut rows = vec![vec![BigRational::zero(); cols]; degree];
            for &u in &by_row[a] {
                let k = support[u].1;
                for (c, v) in s[k][b].iter().enumerate() {
                    if !v.is_zero() {
                        rows[c][u] += v;
                    }
                }
            }
            for &u in &by_col[b] {
                let j = support[u].0;
                for (c, v) in s[a][j].iter().enumerate() {
                    if !v.is_zero() {
                        rows[c][u] -= v;
                    }
                }
            }
            for row in rows {
                sel.offer(&row);
                if sel.is_full() {
                    break 'outer;
                }
            }
        }
    }
    sel.into_matrix()
}

fn commutes_with_s(md: &ModularData, z: &[Vec<i64>]) -> Option<(usize, usize)> {
    let n = md.conductor();
    let zs = int_mat_mul_left(z, md.s_tilde(), n);
    let sz = int_mat_mul_right(md.s_tilde(), z, n);
    for (a, (x, y)) in zs.iter().zip(&sz).enumerate() {
        if let Some(b) = x.iter().zip(y).position(|(p, q)| p != q) {
            return Some((a, b));
        }
    }
    None
}

/// Basis of the commutant. T-commutation fixes the support; S-commutation
/// is solved over Q in cyclotomic coordinates. Every returned matrix is
/// verified against the full equations.
pub fn commutant_basis(md: &ModularData) -> CommutantBasis {
    let r = md.rank();
    let support = t_support(md);
    let rows = s_commutation_rows(md, &support, 0);
    let to_matrix = |v: &[BigInt]| {
        let mut m = vec![vec![BigInt::zero(); r]; r];
        for (x, (j, k)) in v.iter().zip(&support) {
            m[*j][*k] = x.clone();
        }
        m
    };
    let basis: Vec<Vec<Vec<BigInt>>> =
        rational_nullspace(&rows).iter().map(|v| to_matrix(v)).collect();
    let verified = basis.iter().all(|m| {
        let small: Option<Vec<Vec<i64>>> = m
            .iter()
            .map(|row| row.iter().map(|x| x.to_i64()).collect())
            .collect();
        small.is_some_and(|s| commutes_with_s(md, &s).is_none())
    });
    if verified {
        return CommutantBasis { rank: r, basis };
    }
    // the modular row filter dropped an equation; redo with every row
    let full = full_s_rows(md, &support);
    CommutantBasis {
        rank: r,
        basis: rational_nullspace(&full).iter().map(|v| to_matrix(v)).collect(),
    }
}

fn full_s_rows(md: &ModularData, support: &[(usize, usize)]) -> RationalMatrix {
    let r = md.rank();
    let degree = ExactScalar::zero(md.conductor()).field().degree();
    let mut out = Vec::new();
    for a in 0..r {
        for b in 0..r {
            let mut rows = vec![vec![BigRational::zero(); support.len()]; degree];
            for (u, (j, k)) in support.iter().enumerate() {
                let mut coef = ExactScalar::zero(md.conductor());
                if *j == a {
                    coef = &coef + md.s(*k, b);
                }
                if *k == b {
                    coef = &coef - md.s(a, *j);
                }
                for (c, v) in coords(&coef, degree).into_iter().enumerate() {
                    rows[c][u] = v;
                }
            }
            out.extend(rows);
        }
    }
    RationalMatrix::from_rows(support.len(), out)
}

/// Outcome of an invariance check with the first violated condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub is_invariant: bool,
    pub witness: Option<String>,
}

/// Whether `z` has nonnegative integer entries and commutes with `s̃` and `τ`.
pub fn is_modular_invariant(md: &ModularData, z: &[Vec<i64>]) -> Result<InvariantCheck, SearchError> {
    let r = md.rank();
    if z.len() != r {
        return Err(SearchError::RankMismatch {
            expected: r,
            found: z.len(),
        });
    }
    if z.iter().any(|row| row.len() != r) {
        return Err(SearchError::NotSquare);
    }
    let fail = |w: String| {
        Ok(InvariantCheck {
            is_invariant: false,
            witness: Some(w),
        })
    };
    for (j, row) in z.iter().enumerate() {
        if let Some(k) = row.iter().position(|x| *x < 0) {
            return fail(format!("entry ({j},{k}) = {} is negative", row[k]));
        }
    }
    let t = md.t_exponents();
    for (j, row) in z.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            if *x != 0 && t[j] != t[k] {
                return fail(format!(
                    "(Z T - T Z)[{j}][{k}] != 0: z = {x} but theta_{j} != theta_{k}"
                ));
            }
        }
    }
    if let Some((a, b)) = commutes_with_s(md, z) {
        return fail(format!("(Z S - S Z)[{a}][{b}] != 0"));
    }
    Ok(InvariantCheck {
        is_invariant: true,
        witness: None,
    })
}
