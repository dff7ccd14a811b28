//! Grothendieck-level Morita contexts: branching matrices of α-induction,
//! nimreps, and the checks they must satisfy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::center_fusion::FusionRing;
use crate::exact_algebra::ExactScalar;
use crate::invariant_search::{is_modular_invariant, SearchError, ZMatrix};
use crate::modular_data::{ModularData, ModularDataError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoritaError {
    #[error("context has no branching matrices")]
    MissingBranching,
    #[error("context has no nimrep")]
    MissingNimrep,
    #[error("context has neither a Z-matrix nor branching matrices")]
    MissingZ,
    #[error("malformed context: {0}")]
    Shape(String),
    #[error("branching data does not give a modular invariant: {witness}")]
    NotInvariant { witness: String },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Data(#[from] ModularDataError),
}

/// Multiplicity shadow of a Morita context between `C` and a dual category `D`.
///
/// `branch_plus[j][Y] = dim hom(α₊(X_j), Y)`, likewise for `α₋`;
/// `nimreps[i]` is the action matrix of `X_i` on the module category.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoritaContextData {
    pub name: String,
    pub md: ModularData,
    pub dual_rank: usize,
    pub module_rank: usize,
    pub dual_unit: usize,
    pub branch_plus: Option<Vec<Vec<u64>>>,
    pub branch_minus: Option<Vec<Vec<u64>>>,
    pub z: Option<ZMatrix>,
    pub nimreps: Option<Vec<Vec<Vec<u64>>>>,
    pub dual_fusion: Option<FusionRing>,
}

fn check_shape(m: &[Vec<u64>], rows: usize, cols: usize, what: &str) -> Result<(), MoritaError> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(MoritaError::Shape(format!("{what} must be {rows}x{cols}")));
    }
    Ok(())
}

impl MoritaContextData {
    /// Shape checks only; mathematical checks live in [`verify_context`].
    pub fn validate_shapes(&self) -> Result<(), MoritaError> {
        let r = self.md.rank();
        if self.dual_unit >= self.dual_rank.max(1) {
            return Err(MoritaError::Shape("dual unit out of range".into()));
        }
        match (&self.branch_plus, &self.branch_minus) {
            (Some(p), Some(m)) => {
                check_shape(p, r, self.dual_rank, "branch_plus")?;
                check_shape(m, r, self.dual_rank, "branch_minus")?;
            }
            (None, None) => {}
            _ => return Err(MoritaError::Shape("supply both branching matrices or neither".into())),
        }
        if let Some(z) = &self.z {
            if z.rank() != r {
                return Err(MoritaError::Shape(format!("Z must be {r}x{r}")));
            }
        }
        if let Some(ns) = &self.nimreps {
            if ns.len() != r {
                return Err(MoritaError::Shape(format!("expected {r} nimrep matrices")));
            }
            for n in ns {
                check_shape(n, self.module_rank, self.module_rank, "nimrep")?;
            }
        }
        if let Some(f) = &self.dual_fusion {
            if f.rank() != self.dual_rank {
                return Err(MoritaError::Shape("dual fusion rank differs from dual_rank".into()));
            }
        }
        Ok(())
    }

    /// The supplied Z-matrix, or the one derived from branching.
    pub fn z_matrix(&self) -> Result<ZMatrix, MoritaError> {
        match (&self.z, &self.branch_plus) {
            (Some(z), _) => Ok(z.clone()),
            (None, Some(_)) => z_from_branching(self),
            (None, None) => Err(MoritaError::MissingZ),
        }
    }
}

fn branching_product(ctx: &MoritaContextData) -> Result<Vec<Vec<u64>>, MoritaError> {
    let (Some(bp), Some(bm)) = (&ctx.branch_plus, &ctx.branch_minus) else {
        return Err(MoritaError::MissingBranching);
    };
    ctx.validate_shapes()?;
    let r = ctx.md.rank();
    Ok((0..r)
        .map(|j| {
            (0..r)
                .map(|k| (0..ctx.dual_rank).map(|y| bp[j][y] * bm[k][y]).sum())
                .collect()
        })
        .collect())
}

/// `z_jk = dim hom(α₊(X_j), α₋(X_k)) = (B⁺ B⁻ᵗ)_{jk}`.
pub fn z_from_branching(ctx: &MoritaContextData) -> Result<ZMatrix, MoritaError> {
    let rows = branching_product(ctx)?;
    let z = ZMatrix::from_rows(rows)?;
    let check = is_modular_invariant(&ctx.md, &z.to_i64_rows())?;
    if let Some(w) = check.witness {
        return Err(MoritaError::NotInvariant { witness: w });
    }
    if !z.is_normalized(ctx.md.unit()) {
        return Err(MoritaError::NotInvariant {
            witness: format!("z at (unit,unit) is {}", z.get(ctx.md.unit(), ctx.md.unit())),
        });
    }
    Ok(z)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextReport {
    pub context: String,
    pub checks: Vec<ContextCheck>,
    pub passed: bool,
}

impl ContextReport {
    pub fn check(&self, name: &str) -> Option<&ContextCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn mat_mul_u64(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..m)
                .map(|c| row.iter().zip(b).map(|(x, br)| x * br[c]).sum())
                .collect()
        })
        .collect()
}

/// Check the context's internal consistency and its trace identities.
/// Never fails on mathematical problems; those are reported.
pub fn verify_context(ctx: &MoritaContextData) -> Result<ContextReport, MoritaError> {
    ctx.validate_shapes()?;
    let md = &ctx.md;
    let r = md.rank();
    let unit = md.unit();
    let mut checks = Vec::new();
    let mut push = |name: &str, res: Result<(), String>| {
        checks.push(ContextCheck {
            name: name.to_string(),
            passed: res.is_ok(),
            detail: res.err().unwrap_or_else(|| "ok".into()),
        })
    };

    if let (Some(bp), Some(bm)) = (&ctx.branch_plus, &ctx.branch_minus) {
        let indicator: Vec<u64> = (0..ctx.dual_rank).map(|y| u64::from(y == ctx.dual_unit)).collect();
        push(
            "branching_unit_rows",
            if bp[unit] == indicator && bm[unit] == indicator {
                Ok(())
            } else {
                Err("unit rows of the branching matrices are not the dual unit indicator".into())
            },
        );
    }

    let z = match ctx.z_matrix() {
        Ok(z) => z,
        Err(e) => {
            push("modular_invariant", Err(e.to_string()));
            return Ok(ContextReport {
                context: ctx.name.clone(),
                passed: false,
                checks,
            });
        }
    };
    let inv = is_modular_invariant(md, &z.to_i64_rows())?;
    push(
        "modular_invariant",
        match inv.witness {
            None if z.is_normalized(unit) => Ok(()),
            None => Err("z at (unit,unit) is not 1".into()),
            Some(w) => Err(w),
        },
    );
    if ctx.z.is_some() && ctx.branch_plus.is_some() {
        let derived = branching_product(ctx)?;
        push(
            "branching_matches_z",
            if derived == z.to_rows() {
                Ok(())
            } else {
                Err("B+ B-^t differs from the supplied Z".into())
            },
        );
    }
    let dims = md.dims_unchecked();
    let mu = md.global_dim_unchecked();
    push(
        "dimension_pairing",
        if z.dimension_pairing(&dims) == mu {
            Ok(())
        } else {
            Err(format!("sum z d d = {} differs from mu = {mu}", z.dimension_pairing(&dims)))
        },
    );
    push(
        "trace_equals_module_rank",
        if z.trace() as usize == ctx.module_rank {
            Ok(())
        } else {
            Err(format!("Tr Z = {} but module rank is {}", z.trace(), ctx.module_rank))
        },
    );
    push(
        "trace_zzt_equals_dual_rank",
        if z.trace_zzt() as usize == ctx.dual_rank {
            Ok(())
        } else {
            Err(format!("Tr ZZ^t = {} but dual rank is {}", z.trace_zzt(), ctx.dual_rank))
        },
    );

    if let Some(ns) = &ctx.nimreps {
        let m = ctx.module_rank;
        let id: Vec<Vec<u64>> = (0..m).map(|a| (0..m).map(|b| u64::from(a == b)).collect()).collect();
        push(
            "nimrep_unit",
            if ns[unit] == id {
                Ok(())
            } else {
                Err("nimrep of the unit is not the identity".into())
            },
        );
        let hom = (|| {
            let fr = md.verlinde_fusion().map_err(|e| e.to_string())?;
            for i in 0..r {
                for j in 0..r {
                    let lhs = mat_mul_u64(&ns[i], &ns[j]);
                    let mut rhs = vec![vec![0u64; m]; m];
                    for (k, nk) in ns.iter().enumerate() {
                        let c = fr.get(i, j, k);
                        if c == 0 {
                            continue;
                        }
                        for a in 0..m {
                            for b in 0..m {
                                rhs[a][b] += c * nk[a][b];
                            }
                        }
                    }
                    if lhs != rhs {
                        return Err(format!("n_{i} n_{j} differs from sum_k N_{i}{j}^k n_k"));
                    }
                }
            }
            Ok(())
        })();
        push("nimrep_homomorphism", hom);
    }

    if let Some(fd) = &ctx.dual_fusion {
        let zero_one = z.entries().iter().all(|x| *x <= 1);
        let commutative = fd.is_commutative();
        push(
            "commutative_dual_iff_zero_one",
            if commutative == zero_one {
                Ok(())
            } else if commutative {
                let (j, k) = (0..r)
                    .flat_map(|j| (0..r).map(move |k| (j, k)))
                    .find(|(j, k)| z.get(*j, *k) > 1)
                    .expect("some entry exceeds 1");
                Err(format!(
                    "dual fusion is commutative but z[{j}][{k}] = {}",
                    z.get(j, k)
                ))
            } else {
                Err("dual fusion is noncommutative but every z entry is 0 or 1".into())
            },
        );
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(ContextReport {
        context: ctx.name.clone(),
        checks,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSumCheck {
    pub generator: usize,
    pub power: usize,
    pub trace: u64,
    pub spectral_sum: ExactScalar,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentsReport {
    pub context: String,
    pub diagonal_sum: u64,
    pub module_rank: usize,
    pub checks: Vec<PowerSumCheck>,
    pub passed: bool,
}

/// `Tr(n_iᵖ) = Σ_j z_jj (s̃_ji / d_j)ᵖ` for every `i` and `p = 0..=m`, and
/// `Σ_j z_jj = m`. Power sums up to `m` determine the joint spectrum with
/// multiplicities, so this matches the exponents without leaving `Q(ζ_N)`.
pub fn exponents_check(ctx: &MoritaContextData) -> Result<ExponentsReport, MoritaError> {
    let ns = ctx.nimreps.as_ref().ok_or(MoritaError::MissingNimrep)?;
    ctx.validate_shapes()?;
    let z = ctx.z_matrix()?;
    let md = &ctx.md;
    let r = md.rank();
    let m = ctx.module_rank;
    let n = md.conductor();
    let dims = md.dims_unchecked();
    let inv_dims: Vec<ExactScalar> = dims
        .iter()
        .map(|d| d.inv())
        .collect::<Result<_, _>>()
        .map_err(ModularDataError::from)?;
    let mut checks = Vec::new();
    for (i, ni) in ns.iter().enumerate() {
        let ratios: Vec<ExactScalar> = (0..r).map(|j| md.s(j, i) * &inv_dims[j]).collect();
        let mut powers: Vec<ExactScalar> = vec![ExactScalar::one(n); r];
        let mut np: Vec<Vec<u64>> = (0..m).map(|a| (0..m).map(|b| u64::from(a == b)).collect()).collect();
        for p in 0..=m {
            let trace: u64 = (0..m).map(|a| np[a][a]).sum();
            let mut spectral = ExactScalar::zero(n);
            for j in 0..r {
                let zj = z.get(j, j);
                if zj != 0 {
                    spectral = &spectral + &powers[j].mul_int(zj as i64);
                }
            }
            let equal = spectral == ExactScalar::from_int(trace as i64, n);
            checks.push(PowerSumCheck {
                generator: i,
                power: p,
                trace,
                spectral_sum: spectral,
                equal,
            });
            np = mat_mul_u64(&np, ni);
            for (pw, ra) in powers.iter_mut().zip(&ratios) {
                *pw = &*pw * ra;
            }
        }
    }
    let diagonal_sum = z.trace();
    let passed = diagonal_sum as usize == m && checks.iter().all(|c| c.equal);
    Ok(ExponentsReport {
        context: ctx.name.clone(),
        diagonal_sum,
        module_rank: m,
        checks,
        passed,
    })
}

/// The context of `C` with itself: `B± = I`, regular nimrep, `Z = I`.
pub fn trivial_context(md: &ModularData) -> Result<MoritaContextData, MoritaError> {
    let r = md.rank();
    let fr = md.verlinde_fusion()?.clone();
    let id: Vec<Vec<u64>> = (0..r).map(|a| (0..r).map(|b| u64::from(a == b)).collect()).collect();
    // (n_i)_{ab} = N_{ia}^b
    let nimreps = (0..r)
        .map(|i| (0..r).map(|a| (0..r).map(|b| fr.get(i, a, b)).collect()).collect())
        .collect();
    Ok(MoritaContextData {
        name: format!("{}/trivial", md.name()),
        md: md.clone(),
        dual_rank: r,
        module_rank: r,
        dual_unit: md.unit(),
        branch_plus: Some(id.clone()),
        branch_minus: Some(id),
        z: None,
        nimreps: Some(nimreps),
        dual_fusion: Some(fr),
    })
}

/// Nimrep of `su2(k)` on a graph with vertex 0 as the unit, from
/// `n_0 = I`, `n_1 = A`, `n_{j+1} = A n_j − n_{j−1}`.
pub fn graph_nimrep(k: usize, adjacency: &[Vec<u64>]) -> Result<Vec<Vec<Vec<u64>>>, MoritaError> {
    let m = adjacency.len();
    let a: Vec<Vec<i64>> = adjacency
        .iter()
        .map(|r| r.iter().map(|x| *x as i64).collect())
        .collect();
    let id: Vec<Vec<i64>> = (0..m).map(|x| (0..m).map(|y| i64::from(x == y)).collect()).collect();
    let mut out: Vec<Vec<Vec<i64>>> = vec![id, a.clone()];
    while out.len() < k + 1 {
        let j = out.len() - 1;
        let next: Vec<Vec<i64>> = (0..m)
            .map(|x| {
                (0..m)
                    .map(|y| (0..m).map(|t| a[x][t] * out[j][t][y]).sum::<i64>() - out[j - 1][x][y])
                    .collect()
            })
            .collect();
        out.push(next);
    }
    out.truncate(k + 1);
    out.into_iter()
        .map(|n| {
            n.into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|x| {
                            u64::try_from(x)
                                .map_err(|_| MoritaError::Shape("graph is not a nimrep at this level".into()))
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Graph-based context fixtures for `su2(k)`: A, D and E type I graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFixture {
    /// `su2(4)`, the four-vertex star.
    D4,
    /// `su2(10)`.
    E6,
    /// `su2(16)`.
    D10,
    /// `su2(28)`.
    E8,
}

struct GraphShape {
    level: u32,
    vertices: usize,
    edges: &'static [(usize, usize)],
    ambichiral: &'static [usize],
    dual_rank: usize,
}

impl GraphFixture {
    pub const ALL: [GraphFixture; 4] = [GraphFixture::D4, GraphFixture::E6, GraphFixture::D10, GraphFixture::E8];

    fn shape(self) -> GraphShape {
        match self {
            GraphFixture::D4 => GraphShape {
                level: 4,
                vertices: 4,
                edges: &[(0, 1), (1, 2), (1, 3)],
                ambichiral: &[0, 2, 3],
                dual_rank: 8,
            },
            GraphFixture::E6 => GraphShape {
                level: 10,
                vertices: 6,
                edges: &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)],
                ambichiral: &[0, 4, 5],
                dual_rank: 12,
            },
            GraphFixture::D10 => GraphShape {
                level: 16,
                vertices: 10,
                edges: &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (7, 9)],
                ambichiral: &[0, 2, 4, 6, 8, 9],
                dual_rank: 20,
            },
            GraphFixture::E8 => GraphShape {
                level: 28,
                vertices: 8,
                edges: &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)],
                ambichiral: &[0, 6],
                dual_rank: 32,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GraphFixture::D4 => "d4",
            GraphFixture::E6 => "e6",
            GraphFixture::D10 => "d10",
            GraphFixture::E8 => "e8",
        }
    }

    pub fn level(self) -> u32 {
        self.shape().level
    }
}

/// Context whose module category is the graph's vertex set.
///
/// `B⁺` has one column per vertex with `B⁺_{jv} = (n_j)_{0v}`. `B⁻` reuses
/// the ambichiral columns and gives each other vertex a fresh column; the
/// remaining simples of `D` are not reached by either induction from a
/// single `X_j` and contribute zero columns.
pub fn graph_context(md: &ModularData, fixture: GraphFixture) -> Result<MoritaContextData, MoritaError> {
    let spec = fixture.shape();
    let m = spec.vertices;
    let mut adjacency = vec![vec![0u64; m]; m];
    for (a, b) in spec.edges {
        adjacency[*a][*b] = 1;
        adjacency[*b][*a] = 1;
    }
    let r = md.rank();
    if r != spec.level as usize + 1 {
        return Err(MoritaError::Shape(format!(
            "{} lives on su2_{}, not on rank {r} data",
            fixture.name(),
            spec.level
        )));
    }
    let nimreps = graph_nimrep(spec.level as usize, &adjacency)?;
    let mut minus_col = vec![usize::MAX; m];
    let mut next = m;
    for (v, col) in minus_col.iter_mut().enumerate() {
        if spec.ambichiral.contains(&v) {
            *col = v;
        } else {
            *col = next;
            next += 1;
        }
    }
    if next > spec.dual_rank {
        return Err(MoritaError::Shape("dual rank too small for the graph".into()));
    }
    let mut bp = vec![vec![0u64; spec.dual_rank]; r];
    let mut bm = vec![vec![0u64; spec.dual_rank]; r];
    for j in 0..r {
        for v in 0..m {
            let x = nimreps[j][0][v];
            bp[j][v] = x;
            bm[j][minus_col[v]] = x;
        }
    }
    Ok(MoritaContextData {
        name: format!("{}/{}", md.name(), fixture.name()),
        md: md.clone(),
        dual_rank: spec.dual_rank,
        module_rank: m,
        dual_unit: 0,
        branch_plus: Some(bp),
        branch_minus: Some(bm),
        z: None,
        nimreps: Some(nimreps),
        dual_fusion: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular_data::{catalog, CatalogId};

    #[test]
    fn trivial_context_passes() {
        for id in [CatalogId::Ising, CatalogId::Fibonacci, CatalogId::Su2(3)] {
            let md = catalog(&id).unwrap();
            let ctx = trivial_context(&md).unwrap();
            assert_eq!(z_from_branching(&ctx).unwrap(), ZMatrix::identity(md.rank()));
            let rep = verify_context(&ctx).unwrap();
            assert!(rep.passed, "{rep:?}");
            assert!(exponents_check(&ctx).unwrap().passed);
        }
    }

    #[test]
    fn d4_branching_gives_d4_invariant() {
        let md = catalog(&CatalogId::Su2(4)).unwrap();
        let ctx = graph_context(&md, GraphFixture::D4).unwrap();
        let z = z_from_branching(&ctx).unwrap();
        let mut expect = vec![vec![0u64; 5]; 5];
        for (j, k) in [(0, 0), (0, 4), (4, 0), (4, 4)] {
            expect[j][k] = 1;
        }
        expect[2][2] = 2;
        assert_eq!(z.to_rows(), expect);
        assert!(verify_context(&ctx).unwrap().passed);
        assert!(exponents_check(&ctx).unwrap().passed);
    }

    #[test]
    fn broken_branching_is_not_invariant() {
        let md = catalog(&CatalogId::Su2(4)).unwrap();
        let mut ctx = graph_context(&md, GraphFixture::D4).unwrap();
        ctx.branch_minus.as_mut().unwrap()[1][1] = 1;
        assert!(matches!(
            z_from_branching(&ctx),
            Err(MoritaError::NotInvariant { .. })
        ));
    }

    #[test]
    fn commutative_dual_with_multiplicity_two_fails() {
        let md = catalog(&CatalogId::Su2(4)).unwrap();
        let mut ctx = graph_context(&md, GraphFixture::D4).unwrap();
        // any commutative ring of the right rank will do for this check
        let t = trivial_context(&catalog(&CatalogId::PointedCyclic(8, 1)).unwrap()).unwrap();
        ctx.dual_fusion = t.dual_fusion;
        let rep = verify_context(&ctx).unwrap();
        assert!(!rep.passed);
        assert!(!rep.check("commutative_dual_iff_zero_one").unwrap().passed);
    }

    #[test]
    fn missing_nimrep_is_an_error() {
        let md = catalog(&CatalogId::Ising).unwrap();
        let mut ctx = trivial_context(&md).unwrap();
        ctx.nimreps = None;
        assert_eq!(exponents_check(&ctx), Err(MoritaError::MissingNimrep));
    }
}
