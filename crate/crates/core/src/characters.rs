//! Verifiers for character orthogonality and the trace formula over
//! supplied character tables. Nothing here constructs characters; tables
//! are inputs and are never modified.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::center_fusion::{FusionError, FusionRing};
use crate::exact_algebra::{sign_of_real, AlgebraError, ExactScalar, RealSign, ScalarMatrix};
use crate::modular_data::{ModularData, ModularDataError};
use crate::morita_context::{MoritaContextData, MoritaError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterError {
    #[error("context has no fusion ring for the dual category")]
    MissingDualFusion,
    #[error("context has no branching matrices")]
    MissingBranching,
    #[error("no double character table supplied for this chirality")]
    MissingTables,
    #[error("malformed table: {0}")]
    Shape(String),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Data(#[from] ModularDataError),
    #[error(transparent)]
    Context(#[from] MoritaError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chirality {
    Plus,
    Minus,
}

/// `values[j][Y] = χ_j^±(Y)` on simple objects of the dual category.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiTable {
    pub chirality: Chirality,
    pub values: ScalarMatrix,
    #[serde(default)]
    pub claims_conjugation_symmetry: bool,
}

impl ChiTable {
    /// Additive extension to an object given by its multiplicity vector.
    pub fn eval(&self, j: usize, object: &[u64], conductor: u32) -> ExactScalar {
        let mut acc = ExactScalar::zero(conductor);
        for (y, m) in object.iter().enumerate() {
            if *m != 0 {
                acc = &acc + &self.values[j][y].mul_int(*m as i64);
            }
        }
        acc
    }
}

/// `plus_minus[j][k][Y]` houses the double S-transform of `χ_j⁺ ∘ χ_k⁻`;
/// `minus_plus` the same with chiralities swapped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCharTable {
    pub plus_minus: Vec<ScalarMatrix>,
    #[serde(default)]
    pub minus_plus: Option<Vec<ScalarMatrix>>,
}

/// One quantified instance of a relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCheck {
    pub indices: Vec<usize>,
    pub lhs: ExactScalar,
    #[serde(default)]
    pub middle: Option<ExactScalar>,
    pub rhs: ExactScalar,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterReport {
    pub relation: String,
    pub checks: Vec<CellCheck>,
    pub passed: bool,
    /// reported findings that do not enter the verdict
    pub diagnostics: Vec<String>,
}

impl CharacterReport {
    fn new(relation: &str, checks: Vec<CellCheck>, diagnostics: Vec<String>) -> Self {
        let passed = checks.iter().all(|c| c.equal);
        CharacterReport {
            relation: relation.to_string(),
            checks,
            passed,
            diagnostics,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CellCheck> {
        self.checks.iter().filter(|c| !c.equal)
    }
}

fn dual_ring(ctx: &MoritaContextData) -> Result<&FusionRing, CharacterError> {
    let fr = ctx.dual_fusion.as_ref().ok_or(CharacterError::MissingDualFusion)?;
    if fr.rank() != ctx.dual_rank {
        return Err(CharacterError::Shape("dual fusion rank differs from dual_rank".into()));
    }
    Ok(fr)
}

fn check_table(md: &ModularData, ctx: &MoritaContextData, chi: &ChiTable) -> Result<(), CharacterError> {
    if chi.values.len() != md.rank() || chi.values.iter().any(|r| r.len() != ctx.dual_rank) {
        return Err(CharacterError::Shape(format!(
            "character table must be {}x{}",
            md.rank(),
            ctx.dual_rank
        )));
    }
    Ok(())
}

/// Diagnostics shared by the single-table verifiers: `μ χ` integrality
/// and, when claimed, conjugation symmetry.
fn table_diagnostics(md: &ModularData, fr: &FusionRing, chi: &ChiTable) -> Vec<String> {
    let mu = md.global_dim_unchecked();
    let mut out = Vec::new();
    let non_integral: Vec<(usize, usize)> = chi
        .values
        .iter()
        .enumerate()
        .flat_map(|(j, row)| row.iter().enumerate().map(move |(y, v)| (j, y, v)))
        .filter(|(_, _, v)| !(&mu * *v).is_algebraic_integer())
        .map(|(j, y, _)| (j, y))
        .collect();
    if non_integral.is_empty() {
        out.push("mu * chi is integral in the power basis for every entry".into());
    } else {
        out.push(format!(
            "mu * chi has non-integral power-basis coordinates at {non_integral:?}"
        ));
    }
    if chi.claims_conjugation_symmetry {
        match md.derived() {
            Ok(d) => {
                let bad = (0..md.rank())
                    .flat_map(|j| (0..fr.rank()).map(move |y| (j, y)))
                    .find(|(j, y)| {
                        let c = chi.values[*j][*y].conj();
                        c != chi.values[d.conj_perm[*j]][*y] || c != chi.values[*j][fr.dual(*y)]
                    });
                out.push(match bad {
                    None => "claimed conjugation symmetry holds".into(),
                    Some((j, y)) => format!("claimed conjugation symmetry fails at ({j},{y})"),
                });
            }
            Err(_) => out.push("conjugation symmetry not checked: data is not modular".into()),
        }
    }
    out
}

/// `Σ_Y χ_j(ỸY) χ_k(Y*) = (μ/d_j) η_j δ_jk χ_j(Ỹ)`, checked for all
/// `(j, k)` after multiplying both sides by `d_j`. Works for degenerate
/// braidings: dimensions and transparency are read off `s̃` directly.
pub fn verify_ortho1(
    ctx: &MoritaContextData,
    chi: &ChiTable,
    y_tilde: &[u64],
) -> Result<CharacterReport, CharacterError> {
    let md = &ctx.md;
    let fr = dual_ring(ctx)?;
    check_table(md, ctx, chi)?;
    if y_tilde.len() != fr.rank() {
        return Err(CharacterError::Shape("object vector has the wrong length".into()));
    }
    let n = md.conductor();
    let r = md.rank();
    let dims = md.dims_unchecked();
    let mu = md.global_dim_unchecked();
    let eta = md.transparency_flags();
    let products: Vec<Vec<u64>> = (0..fr.rank())
        .map(|y| fr.multiply(y_tilde, &fr.simple(y)))
        .collect::<Result<_, _>>()?;
    let mut checks = Vec::new();
    for j in 0..r {
        for k in 0..r {
            let mut lhs = ExactScalar::zero(n);
            for (y, p) in products.iter().enumerate() {
                let a = chi.eval(j, p, n);
                let b = &chi.values[k][fr.dual(y)];
                lhs = &lhs + &(&a * b);
            }
            let lhs = &lhs * &dims[j];
            let rhs = if j == k && eta[j] {
                &mu * &chi.eval(j, y_tilde, n)
            } else {
                ExactScalar::zero(n)
            };
            checks.push(CellCheck {
                indices: vec![j, k],
                equal: lhs == rhs,
                lhs,
                middle: None,
                rhs,
            });
        }
    }
    Ok(CharacterReport::new("ortho1", checks, table_diagnostics(md, fr, chi)))
}

/// `Σ_j μ χ_j(Y) χ_j(Y') = Σ_k Σ_j χ_j(Y Y_k Y' Y_k*)
///  = Σ_k Σ_j d_j dim hom(Y Y_k Y' Y_k*, α_∓(X_j))`,
/// all three members compared exactly.
pub fn verify_ortho2(
    ctx: &MoritaContextData,
    chi: &ChiTable,
    y: &[u64],
    y_prime: &[u64],
) -> Result<CharacterReport, CharacterError> {
    let md = &ctx.md;
    let fr = dual_ring(ctx)?;
    check_table(md, ctx, chi)?;
    let branch = match chi.chirality {
        Chirality::Plus => ctx.branch_minus.as_ref(),
        Chirality::Minus => ctx.branch_plus.as_ref(),
    }
    .ok_or(CharacterError::MissingBranching)?;
    if y.len() != fr.rank() || y_prime.len() != fr.rank() {
        return Err(CharacterError::Shape("object vector has the wrong length".into()));
    }
    let n = md.conductor();
    let r = md.rank();
    let dims = md.dims_unchecked();
    let mu = md.global_dim_unchecked();
    let mut lhs = ExactScalar::zero(n);
    for j in 0..r {
        lhs = &lhs + &(&chi.eval(j, y, n) * &chi.eval(j, y_prime, n));
    }
    let lhs = &lhs * &mu;
    let mut middle = ExactScalar::zero(n);
    let mut rhs = ExactScalar::zero(n);
    for k in 0..fr.rank() {
        let yk = fr.simple(k);
        let w = fr.multiply(&fr.multiply(&fr.multiply(y, &yk)?, y_prime)?, &fr.simple(fr.dual(k)))?;
        for j in 0..r {
            middle = &middle + &chi.eval(j, &w, n);
            let hom: u64 = w.iter().zip(&branch[j]).map(|(a, b)| a * b).sum();
            if hom != 0 {
                rhs = &rhs + &dims[j].mul_int(hom as i64);
            }
        }
    }
    let equal = lhs == middle && middle == rhs;
    let checks = vec![CellCheck {
        indices: Vec::new(),
        lhs,
        middle: Some(middle),
        rhs,
        equal,
    }];
    Ok(CharacterReport::new("ortho2", checks, table_diagnostics(md, fr, chi)))
}

/// Trace formula `dim hom(α_±(X_j), Y) = μ Σ_{k,ℓ} S_{jℓ} d_k Ξ_{ℓk}(Y)`
/// with `S = s̃/√μ`. Writing `T = Σ s̃_{jℓ} d_k Ξ_{ℓk}(Y)` the claim is
/// `dim = √μ T`, checked as `dim² = μ T²` together with `T > 0` when
/// `dim > 0` and `T = 0` when `dim = 0`.
///
/// The normalization `μ² Ξ_{jk}(unit) = z_jk` is evaluated separately and
/// reported as a diagnostic.
pub fn verify_trace_formula(
    ctx: &MoritaContextData,
    xi: &DoubleCharTable,
) -> Result<CharacterReport, CharacterError> {
    let md = &ctx.md;
    let (Some(bp), Some(bm)) = (&ctx.branch_plus, &ctx.branch_minus) else {
        return Err(CharacterError::MissingBranching);
    };
    let r = md.rank();
    let rp = ctx.dual_rank;
    let n = md.conductor();
    let shape_ok = |t: &Vec<ScalarMatrix>| {
        t.len() == r && t.iter().all(|m| m.len() == r && m.iter().all(|row| row.len() == rp))
    };
    if !shape_ok(&xi.plus_minus) || xi.minus_plus.as_ref().is_some_and(|t| !shape_ok(t)) {
        return Err(CharacterError::Shape(format!("double table must be {r}x{r}x{rp}")));
    }
    let dims = md.dims_unchecked();
    let mu = md.global_dim_unchecked();
    let mut tables: Vec<(usize, &Vec<ScalarMatrix>, &Vec<Vec<u64>>)> = vec![(0, &xi.plus_minus, bp)];
    if let Some(mp) = &xi.minus_plus {
        tables.push((1, mp, bm));
    }
    let mut checks = Vec::new();
    for (side, table, branch) in &tables {
        for j in 0..r {
            for y in 0..rp {
                let mut t = ExactScalar::zero(n);
                for (l, tl) in table.iter().enumerate() {
                    let mut inner = ExactScalar::zero(n);
                    for (k, dk) in dims.iter().enumerate() {
                        inner = &inner + &(dk * &tl[k][y]);
                    }
                    t = &t + &(md.s(j, l) * &inner);
                }
                let dim = branch[j][y];
                let dim_s = ExactScalar::from_int(dim as i64, n);
                let squared_ok = &dim_s * &dim_s == &(&t * &t) * &mu;
                let sign_ok = match sign_of_real(&t) {
                    Ok(RealSign::Positive) => dim > 0,
                    Ok(RealSign::Zero) => dim == 0,
                    _ => false,
                };
                checks.push(CellCheck {
                    indices: vec![*side, j, y],
                    lhs: &dim_s * &dim_s,
                    middle: Some(t.clone()),
                    rhs: &(&t * &t) * &mu,
                    equal: squared_ok && sign_ok,
                });
            }
        }
    }
    let mut diagnostics = Vec::new();
    match ctx.z_matrix() {
        Ok(z) => {
            let mu2 = &mu * &mu;
            let bad: Vec<(usize, usize)> = (0..r)
                .flat_map(|j| (0..r).map(move |k| (j, k)))
                .filter(|(j, k)| {
                    &mu2 * &xi.plus_minus[*j][*k][ctx.dual_unit]
                        != ExactScalar::from_int(z.get(*j, *k) as i64, n)
                })
                .collect();
            diagnostics.push(if bad.is_empty() {
                "normalization mu^2 Xi(unit) = z holds".into()
            } else {
                format!("normalization mu^2 Xi(unit) = z fails at {bad:?}")
            });
        }
        Err(e) => diagnostics.push(format!("normalization not checked: {e}")),
    }
    Ok(CharacterReport::new("trace", checks, diagnostics))
}

/// Which ansatz family a calibration run explored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzFamily {
    /// `χ_j(Y) = λ s̃_{jY}`
    SMatrix,
    /// `χ_j(Y) = λ d_j d_Y`
    Dimensions,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CalibrationOutcome {
    /// No λ satisfies both relations; the witnesses pin it down.
    Empty { witnesses: Vec<String> },
    Solutions { lambdas: Vec<ExactScalar> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationRun {
    pub modular_data: String,
    pub family: AnsatzFamily,
    pub outcome: CalibrationOutcome,
}

/// `αλ² + βλ + γ = 0`
struct Quadratic {
    alpha: ExactScalar,
    beta: ExactScalar,
    gamma: ExactScalar,
    label: String,
}

impl Quadratic {
    fn eval(&self, l: &ExactScalar) -> ExactScalar {
        &(&(&self.alpha * l) * l) + &(&(&self.beta * l) + &self.gamma)
    }

    fn trivial(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero() && self.gamma.is_zero()
    }
}

/// Search the family `χ_j(Y) = λ·base_j(Y)` on the trivial context of `md`
/// for tables satisfying the first orthogonality (every `Ỹ` simple) and the
/// second (every simple pair `Y, Y'`). Both relations are polynomial of
/// degree ≤ 2 in `λ`; `λ` ranges over all of `Q(ζ_N)`, which contains
/// every `c μ^p` with rational `c` and integer `p`.
pub fn calibrate_trivial(md: &ModularData, family: AnsatzFamily) -> Result<CalibrationRun, CharacterError> {
    let ctx = crate::morita_context::trivial_context(md)?;
    let fr = dual_ring(&ctx)?;
    let r = md.rank();
    let n = md.conductor();
    let dims = md.dims_unchecked();
    let base: ScalarMatrix = (0..r)
        .map(|j| {
            (0..r)
                .map(|y| match family {
                    AnsatzFamily::SMatrix => md.s(j, y).clone(),
                    AnsatzFamily::Dimensions => &dims[j] * &dims[y],
                })
                .collect()
        })
        .collect();
    let unit_table = ChiTable {
        chirality: Chirality::Plus,
        values: base,
        claims_conjugation_symmetry: false,
    };
    let mut eqs = Vec::new();
    // with λ = 1 each report gives the λ² and λ coefficients directly
    for yt in 0..r {
        let rep = verify_ortho1(&ctx, &unit_table, &fr.simple(yt))?;
        for c in rep.checks {
            eqs.push(Quadratic {
                alpha: c.lhs,
                beta: -&c.rhs,
                gamma: ExactScalar::zero(n),
                label: format!("ortho1 j={} k={} Y~={yt}", c.indices[0], c.indices[1]),
            });
        }
    }
    for y in 0..r {
        for yp in 0..r {
            let rep = verify_ortho2(&ctx, &unit_table, &fr.simple(y), &fr.simple(yp))?;
            let c = &rep.checks[0];
            // λ²·lhs = λ²·middle = rhs (the hom side does not scale)
            eqs.push(Quadratic {
                alpha: c.lhs.clone(),
                beta: ExactScalar::zero(n),
                gamma: -c.rhs.clone(),
                label: format!("ortho2 (lhs) Y={y} Y'={yp}"),
            });
            eqs.push(Quadratic {
                alpha: c.middle.clone().expect("ortho2 reports a middle term"),
                beta: ExactScalar::zero(n),
                gamma: -c.rhs.clone(),
                label: format!("ortho2 (middle) Y={y} Y'={yp}"),
            });
        }
    }
    let eqs: Vec<Quadratic> = eqs.into_iter().filter(|q| !q.trivial()).collect();
    // candidate roots come from an equation without constant term
    let seed = eqs.iter().find(|q| q.gamma.is_zero());
    let outcome = match seed {
        Some(q) => {
            let mut candidates = vec![ExactScalar::zero(n)];
            // α = 0 leaves βλ = 0 with β ≠ 0, so λ = 0 is the only root
            if !q.alpha.is_zero() {
                candidates.push(-&(&q.beta * &q.alpha.inv()?));
            }
            candidates.dedup();
            let mut witnesses = vec![format!("{} restricts lambda to {{{}}}", q.label,
                candidates.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "))];
            let mut lambdas = Vec::new();
            for l in candidates {
                match eqs.iter().find(|e| !e.eval(&l).is_zero()) {
                    Some(e) => witnesses.push(format!("lambda = {l} violates {}", e.label)),
                    None => lambdas.push(l),
                }
            }
            if lambdas.is_empty() {
                CalibrationOutcome::Empty { witnesses }
            } else {
                CalibrationOutcome::Solutions { lambdas }
            }
        }
        None => {
            return Err(CharacterError::Shape(
                "calibration needs a homogeneous constraint to seed candidates".into(),
            ))
        }
    };
    Ok(CalibrationRun {
        modular_data: md.name().to_string(),
        family,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular_data::{catalog, CatalogId};
    use crate::morita_context::trivial_context;

    /// `χ_j(Y) = δ_{j,unit} d_Y` on the trivial context.
    fn unit_supported(md: &ModularData) -> ChiTable {
        let d = md.dims_unchecked();
        let n = md.conductor();
        ChiTable {
            chirality: Chirality::Plus,
            values: (0..md.rank())
                .map(|j| {
                    (0..md.rank())
                        .map(|y| if j == md.unit() { d[y].clone() } else { ExactScalar::zero(n) })
                        .collect()
                })
                .collect(),
            claims_conjugation_symmetry: true,
        }
    }

    #[test]
    fn unit_supported_table_satisfies_both_relations() {
        let md = catalog(&CatalogId::Fibonacci).unwrap();
        let ctx = trivial_context(&md).unwrap();
        let chi = unit_supported(&md);
        for y in 0..2 {
            let e = ctx.dual_fusion.as_ref().unwrap().simple(y);
            assert!(verify_ortho1(&ctx, &chi, &e).unwrap().passed);
            for yp in 0..2 {
                let ep = ctx.dual_fusion.as_ref().unwrap().simple(yp);
                assert!(verify_ortho2(&ctx, &chi, &e, &ep).unwrap().passed);
            }
        }
    }

    #[test]
    fn perturbed_entry_fails_ortho1() {
        let md = catalog(&CatalogId::Fibonacci).unwrap();
        let ctx = trivial_context(&md).unwrap();
        let mut chi = unit_supported(&md);
        chi.values[1][1] = ExactScalar::one(5);
        let unit = ctx.dual_fusion.as_ref().unwrap().simple(0);
        let rep = verify_ortho1(&ctx, &chi, &unit).unwrap();
        assert!(!rep.passed);
        assert!(rep.failures().any(|c| c.indices == vec![1, 1]));
    }

    #[test]
    fn calibration_families_are_empty() {
        for id in [CatalogId::Ising, CatalogId::Fibonacci] {
            let md = catalog(&id).unwrap();
            for fam in [AnsatzFamily::SMatrix, AnsatzFamily::Dimensions] {
                let run = calibrate_trivial(&md, fam).unwrap();
                assert!(matches!(run.outcome, CalibrationOutcome::Empty { .. }), "{run:?}");
            }
        }
    }

    /// Degenerate data of `Rep(Z/3)` acting on `Vec(Z/3)`:
    /// `χ_a(g) = ζ₃^{ag}` are the classical group characters.
    fn classical_z3() -> (MoritaContextData, ChiTable) {
        let one = || ExactScalar::one(3);
        let md = ModularData::new(
            "rep_z3",
            3,
            vec!["0".into(), "1".into(), "2".into()],
            0,
            vec![vec![one(), one(), one()]; 3],
            vec![0, 0, 0],
        )
        .unwrap();
        let mut n = vec![0u64; 27];
        for a in 0..3 {
            for b in 0..3 {
                n[a * 9 + b * 3 + (a + b) % 3] = 1;
            }
        }
        let fr = FusionRing::new(3, 0, vec![0, 2, 1], n).unwrap();
        let ctx = MoritaContextData {
            name: "vec_z3".into(),
            md,
            dual_rank: 3,
            module_rank: 3,
            dual_unit: 0,
            branch_plus: None,
            branch_minus: None,
            z: None,
            nimreps: None,
            dual_fusion: Some(fr),
        };
        let chi = ChiTable {
            chirality: Chirality::Plus,
            values: (0..3)
                .map(|a| (0..3).map(|g| ExactScalar::zeta(3, (a * g) as i64)).collect())
                .collect(),
            claims_conjugation_symmetry: false,
        };
        (ctx, chi)
    }

    #[test]
    fn classical_characters_satisfy_ortho1() {
        let (ctx, chi) = classical_z3();
        let fr = ctx.dual_fusion.clone().unwrap();
        for y in 0..3 {
            let rep = verify_ortho1(&ctx, &chi, &fr.simple(y)).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
        let mut bad = chi.clone();
        bad.values[2][1] = ExactScalar::one(3);
        assert!(!verify_ortho1(&ctx, &bad, &fr.simple(0)).unwrap().passed);
    }

    #[test]
    fn perturbed_branching_fails_ortho2() {
        let md = catalog(&CatalogId::Fibonacci).unwrap();
        let mut ctx = trivial_context(&md).unwrap();
        let chi = unit_supported(&md);
        ctx.branch_minus.as_mut().unwrap()[1][1] = 2;
        let fr = ctx.dual_fusion.clone().unwrap();
        let rep = verify_ortho2(&ctx, &chi, &fr.simple(1), &fr.simple(1)).unwrap();
        assert!(!rep.passed);
    }

    /// `Ξ_{ℓk}(Y) = δ_{ℓk} conj(s̃_{ℓY}) / (μ^{3/2} d_ℓ)` on Ising, where
    /// `μ^{3/2} = 8`.
    fn ising_xi(md: &ModularData, scale: i64) -> DoubleCharTable {
        let d = md.dims_unchecked();
        let n = md.conductor();
        let r = md.rank();
        let plus_minus = (0..r)
            .map(|l| {
                (0..r)
                    .map(|k| {
                        (0..r)
                            .map(|y| {
                                if l != k {
                                    return ExactScalar::zero(n);
                                }
                                let v = &md.s(l, y).conj() * &d[l].inv().unwrap();
                                v.mul_rational(&num_rational::BigRational::new(scale.into(), 8.into()))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        DoubleCharTable { plus_minus, minus_plus: None }
    }

    #[test]
    fn trace_formula_toy_fixture() {
        let md = catalog(&CatalogId::Ising).unwrap();
        let ctx = trivial_context(&md).unwrap();
        let rep = verify_trace_formula(&ctx, &ising_xi(&md, 1)).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.diagnostics.iter().any(|d| d.contains("fails")));
        let scaled = verify_trace_formula(&ctx, &ising_xi(&md, 2)).unwrap();
        assert!(!scaled.passed);
    }
}
