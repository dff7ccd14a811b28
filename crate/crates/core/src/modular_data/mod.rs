//! Modular data `(s̃, θ)`: axioms, derived quantities and Verlinde fusion.

mod catalog;

pub use catalog::{catalog, CatalogId};

use std::sync::OnceLock;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::center_fusion::{FusionError, FusionRing};
use crate::exact_algebra::{
    conj_matrix, mat_mul, sign_of_real, AlgebraError, ExactScalar, RealSign, ScalarMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModularDataError {
    #[error("malformed modular data: {0}")]
    Malformed(String),
    #[error("modular data fails validation: {0}")]
    InvalidData(String),
    #[error("Verlinde number N_{{{i},{j}}}^{k} = {value} is not a nonnegative integer")]
    NonIntegralFusion {
        i: usize,
        j: usize,
        k: usize,
        value: String,
    },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("invalid catalog parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Rank, unnormalized S-matrix and twist exponents of a modular fusion category.
///
/// `s_tilde[unit][unit] = 1`, so the first row holds the quantum dimensions
/// and every entry stays inside `Q(ζ_N)`. Twists are `θ_j = ζ_N^{t_j}`.
#[derive(Clone, Serialize, Deserialize)]
pub struct ModularData {
    name: String,
    conductor: u32,
    labels: Vec<String>,
    unit: usize,
    s_tilde: ScalarMatrix,
    t_exponents: Vec<i64>,
    #[serde(skip)]
    cache: OnceLock<Result<(DerivedQuantities, FusionRing), ModularDataError>>,
}

impl PartialEq for ModularData {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.conductor == other.conductor
            && self.labels == other.labels
            && self.unit == other.unit
            && self.s_tilde == other.s_tilde
            && self.t_exponents == other.t_exponents
    }
}

impl std::fmt::Debug for ModularData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModularData")
            .field("name", &self.name)
            .field("conductor", &self.conductor)
            .field("labels", &self.labels)
            .finish_non_exhaustive()
    }
}

/// One axiom of modular data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Normalization,
    Symmetry,
    Unitarity,
    ChargeConjugation,
    GaussRelation,
    PositiveDimensions,
    VerlindeIntegrality,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [
        Axiom::Normalization,
        Axiom::Symmetry,
        Axiom::Unitarity,
        Axiom::ChargeConjugation,
        Axiom::GaussRelation,
        Axiom::PositiveDimensions,
        Axiom::VerlindeIntegrality,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub name: String,
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Quantities read off valid modular data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub dims: Vec<ExactScalar>,
    pub global_dim: ExactScalar,
    pub conj_perm: Vec<usize>,
    pub gauss_plus: ExactScalar,
    pub gauss_minus: ExactScalar,
    pub mueger_transparent: Vec<bool>,
}

impl ModularData {
    /// Assemble modular data, checking only shapes and the field of definition.
    /// Entries of `s_tilde` are lifted to `Q(ζ_conductor)`.
    pub fn new(
        name: impl Into<String>,
        conductor: u32,
        labels: Vec<String>,
        unit: usize,
        s_tilde: ScalarMatrix,
        t_exponents: Vec<i64>,
    ) -> Result<Self, ModularDataError> {
        let r = labels.len();
        if conductor == 0 {
            return Err(ModularDataError::Malformed("conductor must be positive".into()));
        }
        if r == 0 {
            return Err(ModularDataError::Malformed("rank must be positive".into()));
        }
        if unit >= r {
            return Err(ModularDataError::Malformed(format!(
                "unit index {unit} out of range for rank {r}"
            )));
        }
        if s_tilde.len() != r || s_tilde.iter().any(|row| row.len() != r) {
            return Err(ModularDataError::Malformed(format!(
                "S-matrix must be {r}x{r}"
            )));
        }
        if t_exponents.len() != r {
            return Err(ModularDataError::Malformed(format!(
                "expected {r} twist exponents, got {}",
                t_exponents.len()
            )));
        }
        let s_tilde = s_tilde
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| x.lift(conductor))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ModularDataError::Malformed(format!("S-matrix entry: {e}")))?;
        let n = conductor as i64;
        Ok(ModularData {
            name: name.into(),
            conductor,
            labels,
            unit,
            s_tilde,
            t_exponents: t_exponents.into_iter().map(|e| e.rem_euclid(n)).collect(),
            cache: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn s_tilde(&self) -> &ScalarMatrix {
        &self.s_tilde
    }

    pub fn s(&self, j: usize, k: usize) -> &ExactScalar {
        &self.s_tilde[j][k]
    }

    pub fn t_exponents(&self) -> &[i64] {
        &self.t_exponents
    }

    /// `θ_j = ζ_N^{t_j}`.
    pub fn theta(&self, j: usize) -> ExactScalar {
        ExactScalar::zeta(self.conductor, self.t_exponents[j])
    }

    /// A copy with one twist exponent replaced.
    pub fn with_t_exponent(&self, j: usize, e: i64) -> Self {
        let mut t = self.t_exponents.clone();
        t[j] = e.rem_euclid(self.conductor as i64);
        ModularData {
            name: self.name.clone(),
            conductor: self.conductor,
            labels: self.labels.clone(),
            unit: self.unit,
            s_tilde: self.s_tilde.clone(),
            t_exponents: t,
            cache: OnceLock::new(),
        }
    }

    /// A copy with one S-matrix entry replaced (the symmetric partner is left alone).
    pub fn with_s_entry(&self, j: usize, k: usize, v: ExactScalar) -> Result<Self, ModularDataError> {
        let mut s = self.s_tilde.clone();
        s[j][k] = v;
        ModularData::new(
            self.name.clone(),
            self.conductor,
            self.labels.clone(),
            self.unit,
            s,
            self.t_exponents.clone(),
        )
    }

    /// Quantum dimensions `d_j = s̃_{unit,j}`, without validation.
    pub fn dims_unchecked(&self) -> Vec<ExactScalar> {
        self.s_tilde[self.unit].clone()
    }

    /// `μ = Σ d_j²`, without validation.
    pub fn global_dim_unchecked(&self) -> ExactScalar {
        self.dims_unchecked()
            .iter()
            .fold(ExactScalar::zero(self.conductor), |acc, d| &acc + &(d * d))
    }

    /// `η_j`: whether `s̃_{jk} = d_j d_k` for all `k`. Defined for any data,
    /// including degenerate (symmetric) braidings.
    pub fn transparency_flags(&self) -> Vec<bool> {
        let d = self.dims_unchecked();
        (0..self.rank())
            .map(|j| (0..self.rank()).all(|k| self.s_tilde[j][k] == &d[j] * &d[k]))
            .collect()
    }

    /// Gauss sums `p± = Σ d_j² θ_j^{±1}`.
    pub fn gauss_sums(&self) -> (ExactScalar, ExactScalar) {
        let d = self.dims_unchecked();
        let mut plus = ExactScalar::zero(self.conductor);
        let mut minus = ExactScalar::zero(self.conductor);
        for (j, dj) in d.iter().enumerate() {
            let d2 = dj * dj;
            plus = &plus + &(&d2 * &self.theta(j));
            minus = &minus + &(&d2 * &ExactScalar::zeta(self.conductor, -self.t_exponents[j]));
        }
        (plus, minus)
    }

    fn unitarity_holds(&self, mu: &ExactScalar) -> Result<(), String> {
        let prod = mat_mul(&self.s_tilde, &conj_matrix(&self.s_tilde), self.conductor);
        for (j, row) in prod.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let expected = if j == k { mu.clone() } else { ExactScalar::zero(1) };
                if *v != expected {
                    return Err(format!("(s s*)[{j}][{k}] = {v}, expected {expected}"));
                }
            }
        }
        Ok(())
    }

    /// Permutation `C` with `s̃² = μ C`, if it exists.
    fn charge_conjugation(&self, mu: &ExactScalar) -> Result<Vec<usize>, String> {
        let sq = mat_mul(&self.s_tilde, &self.s_tilde, self.conductor);
        let r = self.rank();
        let mut perm = vec![usize::MAX; r];
        for (j, row) in sq.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                if v != mu || perm[j] != usize::MAX {
                    return Err(format!("s^2/mu is not a permutation matrix at ({j},{k})"));
                }
                perm[j] = k;
            }
            if perm[j] == usize::MAX {
                return Err(format!("row {j} of s^2 vanishes"));
            }
        }
        if (0..r).any(|j| perm[perm[j]] != j) {
            return Err("charge conjugation is not an involution".into());
        }
        if perm[self.unit] != self.unit {
            return Err("charge conjugation moves the unit".into());
        }
        Ok(perm)
    }

    fn gauss_relation(&self, plus: &ExactScalar, minus: &ExactScalar, mu: &ExactScalar) -> Result<(), String> {
        if &(plus * minus) != mu {
            return Err(format!("p+ p- = {} differs from mu = {mu}", plus * minus));
        }
        let r = self.rank();
        let st: ScalarMatrix = (0..r)
            .map(|j| (0..r).map(|k| &self.s_tilde[j][k] * &self.theta(k)).collect())
            .collect();
        let st2 = mat_mul(&st, &st, self.conductor);
        let st3 = mat_mul(&st2, &st, self.conductor);
        let s2 = mat_mul(&self.s_tilde, &self.s_tilde, self.conductor);
        for j in 0..r {
            for k in 0..r {
                let rhs = plus * &s2[j][k];
                if st3[j][k] != rhs {
                    return Err(format!(
                        "(s t)^3 differs from p+ s^2 at ({j},{k}): {} vs {rhs}",
                        st3[j][k]
                    ));
                }
            }
        }
        Ok(())
    }

    /// Check every axiom and list the outcome of each. Never fails on
    /// mathematical problems; those are reported.
    pub fn validate(&self) -> ValidationReport {
        let r = self.rank();
        let mut checks = Vec::new();
        let mut push = |axiom, res: Result<(), String>| {
            checks.push(AxiomCheck {
                axiom,
                passed: res.is_ok(),
                detail: res.err().unwrap_or_else(|| "ok".into()),
            })
        };
        let s00 = &self.s_tilde[self.unit][self.unit];
        push(
            Axiom::Normalization,
            if s00.is_one() {
                Ok(())
            } else {
                Err(format!("s at (unit,unit) is {s00}, not 1"))
            },
        );
        let sym = (0..r)
            .flat_map(|j| (0..r).map(move |k| (j, k)))
            .find(|(j, k)| self.s_tilde[*j][*k] != self.s_tilde[*k][*j]);
        push(
            Axiom::Symmetry,
            match sym {
                None => Ok(()),
                Some((j, k)) => Err(format!("s[{j}][{k}] != s[{k}][{j}]")),
            },
        );
        let mu = self.global_dim_unchecked();
        let unitary = self.unitarity_holds(&mu);
        let unitary_ok = unitary.is_ok();
        push(Axiom::Unitarity, unitary);
        push(Axiom::ChargeConjugation, self.charge_conjugation(&mu).map(|_| ()));
        let (plus, minus) = self.gauss_sums();
        push(Axiom::GaussRelation, self.gauss_relation(&plus, &minus, &mu));
        let dims = self.dims_unchecked();
        let positivity = (|| {
            if mu.is_zero() {
                return Err("global dimension vanishes".to_string());
            }
            for (j, d) in dims.iter().enumerate() {
                match sign_of_real(d) {
                    Ok(RealSign::Positive) => {}
                    Ok(s) => return Err(format!("d_{j} = {d} has sign {s:?}")),
                    Err(e) => return Err(format!("d_{j} = {d}: {e}")),
                }
            }
            Ok(())
        })();
        let positive_ok = positivity.is_ok();
        push(Axiom::PositiveDimensions, positivity);
        let verlinde = if positive_ok {
            self.compute_fusion(unitary_ok).map(|_| ()).map_err(|e| e.to_string())
        } else {
            Err("skipped: quantum dimensions are not invertible positives".into())
        };
        push(Axiom::VerlindeIntegrality, verlinde);
        ValidationReport {
            name: self.name.clone(),
            checks,
        }
    }

    fn validated(&self) -> &Result<(DerivedQuantities, FusionRing), ModularDataError> {
        self.cache.get_or_init(|| {
            let report = self.validate();
            if let Some(f) = report.first_failure() {
                return Err(ModularDataError::InvalidData(format!(
                    "{:?}: {}",
                    f.axiom, f.detail
                )));
            }
            let mu = self.global_dim_unchecked();
            let conj_perm = self
                .charge_conjugation(&mu)
                .map_err(ModularDataError::InvalidData)?;
            let (gauss_plus, gauss_minus) = self.gauss_sums();
            let derived = DerivedQuantities {
                dims: self.dims_unchecked(),
                global_dim: mu,
                conj_perm,
                gauss_plus,
                gauss_minus,
                mueger_transparent: self.transparency_flags(),
            };
            let ring = self.compute_fusion(true)?;
            Ok((derived, ring))
        })
    }

    /// Dimensions, global dimension, charge conjugation, Gauss sums and
    /// transparency flags. Fails with `InvalidData` unless every axiom holds.
    pub fn derived(&self) -> Result<&DerivedQuantities, ModularDataError> {
        self.validated().as_ref().map(|(d, _)| d).map_err(Clone::clone)
    }

    /// Fusion ring from the Verlinde formula
    /// `N_{ij}^k = (1/μ) Σ_a s̃_{ia} s̃_{ja} conj(s̃_{ka}) / d_a`.
    pub fn verlinde_fusion(&self) -> Result<&FusionRing, ModularDataError> {
        self.validated().as_ref().map(|(_, f)| f).map_err(Clone::clone)
    }

    /// Verlinde numbers, guessed in floating point and certified exactly
    /// through `Σ_k N_{ij}^k s̃_{ka} d_a = s̃_{ia} s̃_{ja}`, which determines
    /// `N` uniquely once `s̃` is invertible. Falls back to the direct exact
    /// sum when the guess does not certify.
    fn compute_fusion(&self, unitary: bool) -> Result<FusionRing, ModularDataError> {
        let n = if unitary {
            match self.float_verlinde_guess() {
                Some(guess) if self.certify_verlinde(&guess) => guess,
                _ => self.exact_verlinde()?,
            }
        } else {
            self.exact_verlinde()?
        };
        let r = self.rank();
        let mut dual = vec![usize::MAX; r];
        for (i, d) in dual.iter_mut().enumerate() {
            let hits: Vec<usize> = (0..r).filter(|j| n[(i * r + j) * r + self.unit] != 0).collect();
            if hits.len() != 1 {
                return Err(FusionError::Axiom(format!("object {i} has no unique dual")).into());
            }
            *d = hits[0];
        }
        Ok(FusionRing::new(r, self.unit, dual, n)?)
    }

    fn float_verlinde_guess(&self) -> Option<Vec<u64>> {
        let r = self.rank();
        let s: Vec<Vec<(f64, f64)>> = self
            .s_tilde
            .iter()
            .map(|row| row.iter().map(|x| x.to_complex()).collect())
            .collect();
        let d: Vec<f64> = s[self.unit].iter().map(|x| x.0).collect();
        let mu: f64 = d.iter().map(|x| x * x).sum();
        if d.iter().any(|x| x.abs() < 1e-12) {
            return None;
        }
        let mut out = vec![0u64; r * r * r];
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let mut re = 0.0;
                    for a in 0..r {
                        let (ar, ai) = s[i][a];
                        let (br, bi) = s[j][a];
                        let (cr, ci) = (s[k][a].0, -s[k][a].1);
                        let (pr, pi) = (ar * br - ai * bi, ar * bi + ai * br);
                        re += (pr * cr - pi * ci) / d[a];
                    }
                    let v = re / mu;
                    let rounded = v.round();
                    if (v - rounded).abs() > 1e-6 || rounded < 0.0 {
                        return None;
                    }
                    out[(i * r + j) * r + k] = rounded.to_u64()?;
                }
            }
        }
        Some(out)
    }

    fn certify_verlinde(&self, n: &[u64]) -> bool {
        let r = self.rank();
        let dims = self.dims_unchecked();
        let sd: ScalarMatrix = (0..r)
            .map(|k| (0..r).map(|a| &self.s_tilde[k][a] * &dims[a]).collect())
            .collect();
        for i in 0..r {
            for j in 0..r {
                for a in 0..r {
                    let mut lhs = ExactScalar::zero(self.conductor);
                    for (k, sdk) in sd.iter().enumerate() {
                        let c = n[(i * r + j) * r + k];
                        if c != 0 {
                            lhs = &lhs + &sdk[a].mul_int(c as i64);
                        }
                    }
                    if lhs != &self.s_tilde[i][a] * &self.s_tilde[j][a] {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn exact_verlinde(&self) -> Result<Vec<u64>, ModularDataError> {
        let r = self.rank();
        let mu = self.global_dim_unchecked();
        let dims = self.dims_unchecked();
        let weights: Vec<ExactScalar> = dims
            .iter()
            .map(|d| (d * &mu).inv())
            .collect::<Result<_, _>>()?;
        let mut out = vec![0u64; r * r * r];
        for i in 0..r {
            for j in 0..r {
                let v: Vec<ExactScalar> = (0..r)
                    .map(|a| &(&self.s_tilde[i][a] * &self.s_tilde[j][a]) * &weights[a])
                    .collect();
                for k in 0..r {
                    let mut acc = ExactScalar::zero(self.conductor);
                    for (a, va) in v.iter().enumerate() {
                        acc = &acc + &(va * &self.s_tilde[k][a].conj());
                    }
                    let value = acc
                        .as_integer()
                        .and_then(|x| x.to_u64())
                        .ok_or_else(|| ModularDataError::NonIntegralFusion {
                            i,
                            j,
                            k,
                            value: acc.to_string(),
                        })?;
                    out[(i * r + j) * r + k] = value;
                }
            }
        }
        Ok(out)
    }
}
