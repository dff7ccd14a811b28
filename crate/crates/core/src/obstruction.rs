//! Integral identities for several modular invariants at once, their
//! generating series, trace identities, and the genus-one double Z-matrix.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::center_fusion::{center_tensor_all, full_center, FusionError};
use crate::exact_algebra::{mat_mul, AlgebraError, ExactScalar, ScalarMatrix};
use crate::invariant_search::{enumerate_invariants_with, EnumerationConfig, Mode, SearchError, ZMatrix};
use crate::modular_data::{ModularData, ModularDataError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObstructionError {
    #[error("rank mismatch: modular data has rank {expected}, matrix has rank {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("at least one Z-matrix is required")]
    EmptyTuple,
    #[error(transparent)]
    Data(#[from] ModularDataError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Which of the four sums to evaluate.
///
/// The vacuum identity states that the `Full` sum equals
/// `dim hom(unit, ⊗_s full_center(Z_s))` in the Drinfeld center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityVariant {
    /// `Σ_{jk} Π_s z^s_{jk} μ^{n-2} / (d_j d_k)^{n-2}`
    Full,
    /// `Σ_j Π_s z^s_{jj} μ^{n-2} / d_j^{2n-4}`
    Diagonal,
    /// `Σ_j Π_s z^s_{j,unit} μ^{n-2} / d_j^{n-2}`
    ChiralPlus,
    /// `Σ_j Π_s z^s_{unit,j} μ^{n-2} / d_j^{n-2}`
    ChiralMinus,
}

impl IdentityVariant {
    pub const ALL: [IdentityVariant; 4] = [
        IdentityVariant::Full,
        IdentityVariant::Diagonal,
        IdentityVariant::ChiralPlus,
        IdentityVariant::ChiralMinus,
    ];
}

fn check_ranks(md: &ModularData, zs: &[&ZMatrix]) -> Result<(), ObstructionError> {
    for z in zs {
        if z.rank() != md.rank() {
            return Err(ObstructionError::RankMismatch {
                expected: md.rank(),
                found: z.rank(),
            });
        }
    }
    Ok(())
}

/// Index pairs summed over by a variant.
fn cells(md: &ModularData, variant: IdentityVariant) -> Vec<(usize, usize)> {
    let r = md.rank();
    let u = md.unit();
    match variant {
        IdentityVariant::Full => (0..r).flat_map(|j| (0..r).map(move |k| (j, k))).collect(),
        IdentityVariant::Diagonal => (0..r).map(|j| (j, j)).collect(),
        IdentityVariant::ChiralPlus => (0..r).map(|j| (j, u)).collect(),
        IdentityVariant::ChiralMinus => (0..r).map(|j| (u, j)).collect(),
    }
}

/// The left-hand side of the selected identity for the tuple `zs`.
pub fn lhs_multi(
    md: &ModularData,
    zs: &[&ZMatrix],
    variant: IdentityVariant,
) -> Result<ExactScalar, ObstructionError> {
    if zs.is_empty() {
        return Err(ObstructionError::EmptyTuple);
    }
    check_ranks(md, zs)?;
    let n = md.conductor();
    let dims = md.dims_unchecked();
    let mu = md.global_dim_unchecked();
    let e = zs.len() as i32 - 2;
    let mut acc = ExactScalar::zero(n);
    for (j, k) in cells(md, variant) {
        let mut prod: i64 = 1;
        for z in zs {
            prod = prod
                .checked_mul(z.get(j, k) as i64)
                .ok_or(FusionError::Overflow)?;
        }
        if prod == 0 {
            continue;
        }
        // the chiral sums carry a single dimension factor
        let base = match variant {
            IdentityVariant::Full | IdentityVariant::Diagonal => &dims[j] * &dims[k],
            IdentityVariant::ChiralPlus => dims[j].clone(),
            IdentityVariant::ChiralMinus => dims[k].clone(),
        };
        let weight = (&mu * &base.inv()?).powi(e)?;
        acc = &acc + &weight.mul_int(prod);
    }
    Ok(acc)
}

/// `(unit, unit)` multiplicity of `I(1_{D_1}) ⊗ ⋯ ⊗ I(1_{D_n})`, computed
/// from the full centers in the center's fusion ring.
pub fn rhs_vacuum(md: &ModularData, zs: &[&ZMatrix]) -> Result<u64, ObstructionError> {
    check_ranks(md, zs)?;
    let fr = md.verlinde_fusion()?;
    let objects: Vec<_> = zs.iter().map(|z| full_center(z)).collect();
    let t = center_tensor_all(fr, &objects)?;
    Ok(t.get(md.unit(), md.unit()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantRecord {
    pub variant: IdentityVariant,
    pub n: usize,
    /// indices into the supplied list, nondecreasing
    pub tuple: Vec<usize>,
    pub lhs: ExactScalar,
    pub lhs_is_nonneg_integer: bool,
    /// whether integrality is part of the verdict for this record
    pub integrality_asserted: bool,
    pub rhs: Option<u64>,
    pub equal: Option<bool>,
}

impl VariantRecord {
    pub fn holds(&self) -> bool {
        self.equal != Some(false) && (!self.integrality_asserted || self.lhs_is_nonneg_integer)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub modular_data: String,
    pub n_max: usize,
    pub records: Vec<VariantRecord>,
    pub passed: bool,
}

impl ObstructionReport {
    pub fn failures(&self) -> impl Iterator<Item = &VariantRecord> {
        self.records.iter().filter(|r| !r.holds())
    }
}

fn nonneg_integer(x: &ExactScalar) -> Option<u64> {
    x.as_integer().and_then(|v| v.to_u64())
}

/// Nondecreasing index tuples of length `n` over `0..m`.
pub fn multisets(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(m: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(m, n, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Evaluate every variant on every multiset of `zs` of size `1..=n_max`.
///
/// Both sides are symmetric in the tuple, so multisets cover all orderings.
/// The vacuum identity is asserted everywhere; diagonal integrality is
/// asserted for `n ≥ 2`; chiral values are recorded only.
pub fn check_obstruction(
    md: &ModularData,
    zs: &[ZMatrix],
    n_max: usize,
) -> Result<ObstructionReport, ObstructionError> {
    if zs.is_empty() {
        return Err(ObstructionError::EmptyTuple);
    }
    let refs: Vec<&ZMatrix> = zs.iter().collect();
    check_ranks(md, &refs)?;
    md.verlinde_fusion()?;
    let tuples: Vec<Vec<usize>> = (1..=n_max).flat_map(|n| multisets(zs.len(), n)).collect();
    let per_tuple: Vec<Result<Vec<VariantRecord>, ObstructionError>> = tuples
        .par_iter()
        .map(|t| {
            let tz: Vec<&ZMatrix> = t.iter().map(|i| &zs[*i]).collect();
            let n = t.len();
            let rhs = rhs_vacuum(md, &tz)?;
            IdentityVariant::ALL
                .iter()
                .map(|v| {
                    let lhs = lhs_multi(md, &tz, *v)?;
                    let int = nonneg_integer(&lhs);
                    let (rhs, equal) = if *v == IdentityVariant::Full {
                        (Some(rhs), Some(int == Some(rhs)))
                    } else {
                        (None, None)
                    };
                    Ok(VariantRecord {
                        variant: *v,
                        n,
                        tuple: t.clone(),
                        lhs_is_nonneg_integer: int.is_some(),
                        integrality_asserted: match v {
                            IdentityVariant::Full => true,
                            IdentityVariant::Diagonal => n >= 2,
                            _ => false,
                        },
                        lhs,
                        rhs,
                        equal,
                    })
                })
                .collect()
        })
        .collect();
    let mut records = Vec::new();
    for r in per_tuple {
        records.extend(r?);
    }
    let passed = records.iter().all(VariantRecord::holds);
    Ok(ObstructionReport {
        modular_data: md.name().to_string(),
        n_max,
        records,
        passed,
    })
}

/// Coefficients of `λ⁰ … λ^{n_max}` in
/// `Σ_{jk} (1/μ²) d_j³ d_k³ / (d_j d_k − μ z_jk λ)`, expanded as a
/// geometric series: `coeff_n = Σ d_j³ d_k³ (μ z_jk)ⁿ / (μ² (d_j d_k)^{n+1})`.
pub fn series_coefficients(
    md: &ModularData,
    z: &ZMatrix,
    n_max: usize,
) -> Result<Vec<ExactScalar>, ObstructionError> {
    check_ranks(md, &[z])?;
    let n = md.conductor();
    let dims = md.dims_unchecked();
    let mu = md.global_dim_unchecked();
    let mu2_inv = (&mu * &mu).inv()?;
    let r = md.rank();
    let mut out = vec![ExactScalar::zero(n); n_max + 1];
    for j in 0..r {
        for k in 0..r {
            let dd = &dims[j] * &dims[k];
            let lead = &(&(&dd * &dd) * &dd) * &mu2_inv;
            let dd_inv = dd.inv()?;
            // ratio = μ z / (d_j d_k)
            let ratio = (&mu * &dd_inv).mul_int(z.get(j, k) as i64);
            let mut term = &lead * &dd_inv;
            for c in out.iter_mut() {
                *c = &*c + &term;
                if ratio.is_zero() {
                    break;
                }
                term = &term * &ratio;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesCheck {
    pub n: usize,
    pub coefficient: ExactScalar,
    pub lhs: Option<ExactScalar>,
    pub rhs: u64,
    pub equal: bool,
}

/// Compare each series coefficient against `lhs_multi(full)` on `n` copies
/// of `z` and against the vacuum multiplicity.
pub fn check_series(
    md: &ModularData,
    z: &ZMatrix,
    n_max: usize,
) -> Result<Vec<SeriesCheck>, ObstructionError> {
    let coeffs = series_coefficients(md, z, n_max)?;
    coeffs
        .into_iter()
        .enumerate()
        .map(|(n, c)| {
            let copies = vec![z; n];
            let rhs = if n == 0 { 1 } else { rhs_vacuum(md, &copies)? };
            let lhs = if n == 0 {
                None
            } else {
                Some(lhs_multi(md, &copies, IdentityVariant::Full)?)
            };
            let rhs_s = ExactScalar::from_int(rhs as i64, md.conductor());
            let equal = c == rhs_s && lhs.as_ref().is_none_or(|l| *l == rhs_s);
            Ok(SeriesCheck {
                n,
                coefficient: c,
                lhs,
                rhs,
                equal,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceIdentities {
    pub tr_z: u64,
    pub tr_zzt: u64,
}

pub fn trace_identities(z: &ZMatrix) -> TraceIdentities {
    TraceIdentities {
        tr_z: z.trace(),
        tr_zzt: z.trace_zzt(),
    }
}

/// `μ⁻¹ Z_D Z_Eᵗ` with its commutation and trace checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleZ {
    /// `Z_D Z_Eᵗ`
    pub integer_part: Vec<Vec<u64>>,
    pub matrix: ScalarMatrix,
    pub commutes_with_s: bool,
    pub commutes_with_t: bool,
    /// `μ Tr(μ⁻¹ Z_D Z_Eᵗ)`
    pub mu_trace: ExactScalar,
    pub mu_trace_is_nonneg_integer: bool,
}

impl DoubleZ {
    pub fn passed(&self) -> bool {
        self.commutes_with_s && self.commutes_with_t && self.mu_trace_is_nonneg_integer
    }
}

pub fn double_z(md: &ModularData, zd: &ZMatrix, ze: &ZMatrix) -> Result<DoubleZ, ObstructionError> {
    check_ranks(md, &[zd, ze])?;
    let r = md.rank();
    let n = md.conductor();
    let mu = md.global_dim_unchecked();
    let mu_inv = mu.inv()?;
    let mut p = vec![vec![0u64; r]; r];
    for (j, row) in p.iter_mut().enumerate() {
        for (k, x) in row.iter_mut().enumerate() {
            *x = (0..r).map(|m| zd.get(j, m) * ze.get(k, m)).sum();
        }
    }
    let matrix: ScalarMatrix = p
        .iter()
        .map(|row| row.iter().map(|x| mu_inv.mul_int(*x as i64)).collect())
        .collect();
    let ms = mat_mul(&matrix, md.s_tilde(), n);
    let sm = mat_mul(md.s_tilde(), &matrix, n);
    let commutes_with_s = ms == sm;
    let t = md.t_exponents();
    let commutes_with_t = (0..r).all(|j| (0..r).all(|k| matrix[j][k].is_zero() || t[j] == t[k]));
    let trace = (0..r).fold(ExactScalar::zero(n), |acc, j| &acc + &matrix[j][j]);
    let mu_trace = &mu * &trace;
    Ok(DoubleZ {
        integer_part: p,
        matrix,
        commutes_with_s,
        commutes_with_t,
        mu_trace_is_nonneg_integer: nonneg_integer(&mu_trace).is_some(),
        mu_trace,
    })
}

/// A commutant point where the vacuum identity fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub tuple: Vec<Vec<Vec<u64>>>,
    pub lhs: ExactScalar,
    pub rhs: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub modular_data: String,
    pub bound: u64,
    pub n_max: usize,
    pub points: usize,
    pub tuples_checked: usize,
    pub counterexamples: Vec<Counterexample>,
}

/// Scan every bounded-mode commutant point against the vacuum identity: each point on
/// its own for `n ≤ n_max`, and every unordered pair at `n = 2` when the
/// point set has at most `pair_limit` elements.
pub fn scan_bounded(
    md: &ModularData,
    bound: u64,
    n_max: usize,
    pair_limit: usize,
) -> Result<ScanReport, ObstructionError> {
    let points = enumerate_invariants_with(md, &EnumerationConfig::new(Mode::Bounded(bound)))?;
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    for i in 0..points.len() {
        for n in 1..=n_max {
            tuples.push(vec![i; n]);
        }
    }
    if points.len() <= pair_limit && n_max >= 2 {
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                tuples.push(vec![i, j]);
            }
        }
    }
    let results: Vec<Result<Option<Counterexample>, ObstructionError>> = tuples
        .par_iter()
        .map(|t| {
            let tz: Vec<&ZMatrix> = t.iter().map(|i| &points[*i]).collect();
            let lhs = lhs_multi(md, &tz, IdentityVariant::Full)?;
            let rhs = rhs_vacuum(md, &tz)?;
            Ok((nonneg_integer(&lhs) != Some(rhs)).then(|| Counterexample {
                tuple: tz.iter().map(|z| z.to_rows()).collect(),
                lhs,
                rhs,
            }))
        })
        .collect();
    let mut counterexamples = Vec::new();
    for r in results {
        counterexamples.extend(r?);
    }
    Ok(ScanReport {
        modular_data: md.name().to_string(),
        bound,
        n_max,
        points: points.len(),
        tuples_checked: tuples.len(),
        counterexamples,
    })
}
