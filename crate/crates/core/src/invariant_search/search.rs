//! Branch and bound over integer matrix entries.
//!
//! The linear constraints (S-commutation, `z_{unit,unit} = 1`, and in
//! physical mode `Σ z d d = μ`) are row reduced once. Pivot entries are then
//! affine functions of the free entries, and the search enumerates free
//! entries only, pruning whenever some pivot entry can no longer land in its
//! admissible range.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{is_modular_invariant, s_commutation_rows, t_support, SearchError, ZMatrix};
use crate::exact_algebra::{floor_ratio, rref, ExactScalar, RationalMatrix};
use crate::modular_data::ModularData;

const DEFAULT_NODE_BUDGET: u64 = 200_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Normalized invariants with `Σ z_jk d_j d_k = μ`.
    Physical,
    /// Normalized commutant points with every entry at most `B`.
    Bounded(u64),
}

#[derive(Clone, Debug)]
pub struct EnumerationConfig {
    pub mode: Mode,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub node_budget: u64,
}

impl EnumerationConfig {
    /// Node budget from `MODINV_NODE_BUDGET` when set.
    pub fn new(mode: Mode) -> Self {
        let node_budget = std::env::var("MODINV_NODE_BUDGET")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_NODE_BUDGET);
        EnumerationConfig {
            mode,
            workers: None,
            node_budget,
        }
    }
}

pub fn enumerate_invariants(md: &ModularData, mode: Mode) -> Result<Vec<ZMatrix>, SearchError> {
    enumerate_invariants_with(md, &EnumerationConfig::new(mode))
}

/// Every normalized nonnegative integer invariant satisfying the mode's
/// constraint, sorted lexicographically on flattened entries.
pub fn enumerate_invariants_with(
    md: &ModularData,
    config: &EnumerationConfig,
) -> Result<Vec<ZMatrix>, SearchError> {
    md.derived()?;
    if config.mode == Mode::Bounded(0) {
        return Err(SearchError::InvalidBound);
    }
    match config.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .expect("thread pool");
            pool.install(|| run(md, config))
        }
        None => run(md, config),
    }
}

/// `L x_p = c0 + Σ coef[f] x_f` for one pivot entry.
struct PivotRow {
    unknown: usize,
    scale: i128,
    c0: i128,
    coef: Vec<i128>,
    /// range of `Σ_{f ≥ t} coef[f] x_f` over the box
    suffix_min: Vec<i128>,
    suffix_max: Vec<i128>,
}

struct Problem {
    rank: usize,
    support: Vec<(usize, usize)>,
    bounds: Vec<u64>,
    free: Vec<usize>,
    pivots: Vec<PivotRow>,
}

fn run(md: &ModularData, config: &EnumerationConfig) -> Result<Vec<ZMatrix>, SearchError> {
    let Some(problem) = build_problem(md, config.mode)? else {
        return Ok(Vec::new());
    };
    let nodes = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let ctx = Ctx {
        p: &problem,
        nodes: &nodes,
        abort: &abort,
        budget: config.node_budget,
    };
    let mut found: Vec<Vec<u64>> = if problem.free.is_empty() {
        let mut out = Vec::new();
        ctx.leaf(&[], &mut out);
        out
    } else {
        let top = problem.bounds[problem.free[0]];
        let parts: Vec<Vec<Vec<u64>>> = (0..=top)
            .into_par_iter()
            .map(|v| {
                let mut out = Vec::new();
                let mut assign = vec![0u64; problem.free.len()];
                let partial: Vec<i128> = problem.pivots.iter().map(|p| p.c0).collect();
                ctx.descend(0, v, &mut assign, partial, &mut out);
                out
            })
            .collect();
        parts.into_iter().flatten().collect()
    };
    if abort.load(Ordering::Relaxed) {
        return Err(SearchError::SearchBudgetExceeded {
            budget: config.node_budget,
        });
    }
    found.sort();
    found.dedup();
    let dims = md.dims_unchecked();
    let mu = md.global_dim_unchecked();
    let mut out = Vec::with_capacity(found.len());
    for values in found {
        let mut entries = vec![0u64; problem.rank * problem.rank];
        for (v, (j, k)) in values.iter().zip(&problem.support) {
            entries[j * problem.rank + k] = *v;
        }
        let z = ZMatrix::from_flat(problem.rank, entries);
        // reduction used a filtered subset of the equations; certify exactly
        if !is_modular_invariant(md, &z.to_i64_rows())?.is_invariant {
            continue;
        }
        if config.mode == Mode::Physical && z.dimension_pairing(&dims) != mu {
            continue;
        }
        out.push(z);
    }
    out.sort();
    Ok(out)
}

struct Ctx<'a> {
    p: &'a Problem,
    nodes: &'a AtomicU64,
    abort: &'a AtomicBool,
    budget: u64,
}

impl Ctx<'_> {
    /// Assign free variable `t` the value `v`, then recurse.
    fn descend(
        &self,
        t: usize,
        v: u64,
        assign: &mut [u64],
        mut partial: Vec<i128>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if self.abort.load(Ordering::Relaxed) {
            return;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.abort.store(true, Ordering::Relaxed);
            return;
        }
        assign[t] = v;
        for (acc, row) in partial.iter_mut().zip(&self.p.pivots) {
            *acc += row.coef[t] * v as i128;
        }
        let next = t + 1;
        for (acc, row) in partial.iter().zip(&self.p.pivots) {
            let hi = row.scale * self.p.bounds[row.unknown] as i128;
            if acc + row.suffix_max[next] < 0 || acc + row.suffix_min[next] > hi {
                return;
            }
        }
        if next == self.p.free.len() {
            self.leaf_with(assign, &partial, out);
            return;
        }
        let top = self.p.bounds[self.p.free[next]];
        for w in 0..=top {
            self.descend(next, w, assign, partial.clone(), out);
            if self.abort.load(Ordering::Relaxed) {
                return;
            }
        }
    }

    fn leaf(&self, assign: &[u64], out: &mut Vec<Vec<u64>>) {
        let partial: Vec<i128> = self.p.pivots.iter().map(|p| p.c0).collect();
        self.leaf_with(assign, &partial, out);
    }

    fn leaf_with(&self, assign: &[u64], partial: &[i128], out: &mut Vec<Vec<u64>>) {
        let mut values = vec![0u64; self.p.support.len()];
        for (f, v) in self.p.free.iter().zip(assign) {
            values[*f] = *v;
        }
        for (acc, row) in partial.iter().zip(&self.p.pivots) {
            if acc % row.scale != 0 {
                return;
            }
            let x = acc / row.scale;
            if x < 0 || x > self.p.bounds[row.unknown] as i128 {
                return;
            }
            values[row.unknown] = x as u64;
        }
        out.push(values);
    }
}

fn coords(x: &ExactScalar, degree: usize) -> Vec<BigRational> {
    let mut c = x.coeffs();
    c.resize(degree, BigRational::zero());
    c
}

fn to_i128(x: &BigRational) -> Result<i128, SearchError> {
    debug_assert!(x.is_integer());
    x.to_integer()
        .to_i128()
        .filter(|v| v.unsigned_abs() < 1u128 << 100)
        .ok_or(SearchError::CoefficientOverflow)
}

/// Row reduce the constraint system. Returns `None` when it is inconsistent.
fn build_problem(md: &ModularData, mode: Mode) -> Result<Option<Problem>, SearchError> {
    let r = md.rank();
    let unit = md.unit();
    let support = t_support(md);
    let u = support.len();
    let dims = md.dims_unchecked();
    let mu = md.global_dim_unchecked();

    let bounds: Vec<u64> = match mode {
        Mode::Physical => support
            .iter()
            .map(|(j, k)| {
                if *j == unit && *k == unit {
                    Ok(1)
                } else {
                    floor_ratio(&mu, &(&dims[*j] * &dims[*k]))
                }
            })
            .collect::<Result<_, _>>()
            .map_err(|e| SearchError::Data(e.into()))?,
        Mode::Bounded(b) => support
            .iter()
            .map(|(j, k)| if *j == unit && *k == unit { 1 } else { b })
            .collect(),
    };

    // high bounds first so that they become pivots and low bounds stay free
    let mut order: Vec<usize> = (0..u).collect();
    order.sort_by(|a, b| bounds[*b].cmp(&bounds[*a]).then(support[*b].cmp(&support[*a])));
    let mut position = vec![0; u];
    for (c, o) in order.iter().enumerate() {
        position[*o] = c;
    }

    let s_rows = s_commutation_rows(md, &support, 0);
    let cols = u + 1;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let permute = |row: &[BigRational]| {
        let mut out = vec![BigRational::zero(); cols];
        for (i, v) in row.iter().enumerate().take(u) {
            out[position[i]] = v.clone();
        }
        if let Some(c) = row.get(u) {
            out[u] = c.clone();
        }
        out
    };
    for i in 0..s_rows.rows() {
        rows.push(permute(s_rows.row(i)));
    }
    let unit_idx = support
        .iter()
        .position(|p| *p == (unit, unit))
        .expect("unit pair is always in the T support");
    let mut unit_row = vec![BigRational::zero(); cols];
    unit_row[position[unit_idx]] = BigRational::one();
    unit_row[u] = -BigRational::one();
    rows.push(unit_row);
    if mode == Mode::Physical {
        let degree = ExactScalar::zero(md.conductor()).field().degree();
        let mut phys = vec![vec![BigRational::zero(); cols]; degree];
        for (i, (j, k)) in support.iter().enumerate() {
            for (c, v) in coords(&(&dims[*j] * &dims[*k]), degree).into_iter().enumerate() {
                phys[c][position[i]] = v;
            }
        }
        for (c, v) in coords(&mu, degree).into_iter().enumerate() {
            phys[c][u] = -v;
        }
        rows.extend(phys);
    }
    let red = rref(&RationalMatrix::from_rows(cols, rows));
    if red.pivots.contains(&u) {
        return Ok(None);
    }
    let free_cols: Vec<usize> = red.free_columns().into_iter().filter(|c| *c != u).collect();
    // DFS in ascending bound order, ties by (row, col)
    let mut free: Vec<usize> = free_cols.iter().map(|c| order[*c]).collect();
    free.sort_by(|a, b| bounds[*a].cmp(&bounds[*b]).then(support[*a].cmp(&support[*b])));
    let free_pos: Vec<usize> = free.iter().map(|f| position[*f]).collect();

    let mut pivots = Vec::with_capacity(red.pivots.len());
    for (i, p) in red.pivots.iter().enumerate() {
        let row = red.matrix.row(i);
        // x_p + Σ a_f x_f + a_u = 0
        let scale = row
            .iter()
            .fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let scale_q = BigRational::from_integer(scale.clone());
        let c0 = to_i128(&(-&row[u] * &scale_q))?;
        let coef = free_pos
            .iter()
            .map(|c| to_i128(&(-&row[*c] * &scale_q)))
            .collect::<Result<Vec<_>, _>>()?;
        let n = free.len();
        let mut suffix_min = vec![0i128; n + 1];
        let mut suffix_max = vec![0i128; n + 1];
        for t in (0..n).rev() {
            let ext = coef[t] * bounds[free[t]] as i128;
            suffix_min[t] = suffix_min[t + 1] + ext.min(0);
            suffix_max[t] = suffix_max[t + 1] + ext.max(0);
        }
        pivots.push(PivotRow {
            unknown: order[*p],
            scale: scale.to_i128().ok_or(SearchError::CoefficientOverflow)?,
            c0,
            coef,
            suffix_min,
            suffix_max,
        });
    }
    Ok(Some(Problem {
        rank: r,
        support,
        bounds,
        free,
        pivots,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular_data::{catalog, CatalogId};

    fn physical(id: CatalogId) -> Vec<ZMatrix> {
        enumerate_invariants(&catalog(&id).unwrap(), Mode::Physical).unwrap()
    }

    #[test]
    fn su2_level_four_has_a_and_d() {
        let zs = physical(CatalogId::Su2(4));
        assert_eq!(zs.len(), 2);
        let mut d4 = vec![vec![0u64; 5]; 5];
        for (j, k) in [(0, 0), (0, 4), (4, 0), (4, 4)] {
            d4[j][k] = 1;
        }
        d4[2][2] = 2;
        assert!(zs.contains(&ZMatrix::from_rows(d4).unwrap()));
        assert!(zs.contains(&ZMatrix::identity(5)));
    }

    #[test]
    fn ising_and_fibonacci_have_only_identity() {
        assert_eq!(physical(CatalogId::Ising), vec![ZMatrix::identity(3)]);
        assert_eq!(physical(CatalogId::Fibonacci), vec![ZMatrix::identity(2)]);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let md = catalog(&CatalogId::Su2(10)).unwrap();
        let mut outs = Vec::new();
        for w in [1, 3] {
            let mut cfg = EnumerationConfig::new(Mode::Bounded(2));
            cfg.workers = Some(w);
            outs.push(enumerate_invariants_with(&md, &cfg).unwrap());
        }
        assert_eq!(outs[0], outs[1]);
    }

    #[test]
    fn tiny_budget_is_reported() {
        let md = catalog(&CatalogId::Su2(10)).unwrap();
        let mut cfg = EnumerationConfig::new(Mode::Bounded(3));
        cfg.node_budget = 1;
        assert!(matches!(
            enumerate_invariants_with(&md, &cfg),
            Err(SearchError::SearchBudgetExceeded { .. })
        ));
    }
}
