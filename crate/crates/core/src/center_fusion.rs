//! Fusion rings and multiplicity-level objects of the Drinfeld center
//! `Z(C) ≅ C ⊠ C^op`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariant_search::ZMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FusionError {
    #[error("object index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("multiplicity overflow")]
    Overflow,
    #[error("fusion axiom violated: {0}")]
    Axiom(String),
}

/// Structure constants `N_{ij}^k` of a based ring with unit and duality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionRing {
    rank: usize,
    unit: usize,
    dual: Vec<usize>,
    /// `n[(i * rank + j) * rank + k] = N_{ij}^k`
    n: Vec<u64>,
}

impl FusionRing {
    /// Build a ring from its structure constants, checking the unit, duality,
    /// associativity and Frobenius reciprocity axioms.
    pub fn new(
        rank: usize,
        unit: usize,
        dual: Vec<usize>,
        n: Vec<u64>,
    ) -> Result<FusionRing, FusionError> {
        if n.len() != rank * rank * rank {
            return Err(FusionError::Axiom(format!(
                "expected {} structure constants, got {}",
                rank * rank * rank,
                n.len()
            )));
        }
        if unit >= rank {
            return Err(FusionError::IndexOutOfRange { index: unit, rank });
        }
        if dual.len() != rank || dual.iter().any(|d| *d >= rank) {
            return Err(FusionError::Axiom("duality map is not a map on labels".into()));
        }
        let ring = FusionRing { rank, unit, dual, n };
        ring.check_axioms()?;
        Ok(ring)
    }

    fn check_axioms(&self) -> Result<(), FusionError> {
        let r = self.rank;
        for i in 0..r {
            if self.dual[self.dual[i]] != i {
                return Err(FusionError::Axiom(format!("dual is not an involution at {i}")));
            }
            for j in 0..r {
                let delta = u64::from(i == j);
                if self.get(self.unit, i, j) != delta || self.get(i, self.unit, j) != delta {
                    return Err(FusionError::Axiom(format!("unit axiom fails at ({i},{j})")));
                }
                if self.get(i, j, self.unit) != u64::from(j == self.dual[i]) {
                    return Err(FusionError::Axiom(format!(
                        "duality axiom fails at ({i},{j})"
                    )));
                }
                for k in 0..r {
                    if self.get(i, j, k) != self.get(self.dual[i], k, j) {
                        return Err(FusionError::Axiom(format!(
                            "Frobenius reciprocity fails at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        if let Some((i, j, k, l)) = self.associativity_violation() {
            return Err(FusionError::Axiom(format!(
                "associativity fails at ({i},{j},{k},{l})"
            )));
        }
        Ok(())
    }

    /// First `(i,j,k,l)` with `Σ_m N_ij^m N_mk^l ≠ Σ_m N_jk^m N_im^l`.
    pub fn associativity_violation(&self) -> Option<(usize, usize, usize, usize)> {
        let r = self.rank;
        (0..r)
            .into_par_iter()
            .find_map_first(|i| {
                for j in 0..r {
                    for k in 0..r {
                        for l in 0..r {
                            let mut left = 0u64;
                            let mut right = 0u64;
                            for m in 0..r {
                                left += self.get(i, j, m) * self.get(m, k, l);
                                right += self.get(j, k, m) * self.get(i, m, l);
                            }
                            if left != right {
                                return Some((i, j, k, l));
                            }
                        }
                    }
                }
                None
            })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn dual(&self, i: usize) -> usize {
        self.dual[i]
    }

    pub fn duals(&self) -> &[usize] {
        &self.dual
    }

    /// `N_{ij}^k`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        self.n[(i * self.rank + j) * self.rank + k]
    }

    pub fn structure_constants(&self) -> &[u64] {
        &self.n
    }

    /// Left multiplication matrix `(L_i)_{jk} = N_{ij}^k`.
    pub fn fusion_matrix(&self, i: usize) -> Vec<Vec<i64>> {
        (0..self.rank)
            .map(|j| (0..self.rank).map(|k| self.get(i, j, k) as i64).collect())
            .collect()
    }

    pub fn is_commutative(&self) -> bool {
        let r = self.rank;
        (0..r).all(|i| (0..r).all(|j| (0..r).all(|k| self.get(i, j, k) == self.get(j, i, k))))
    }

    fn check_index(&self, i: usize) -> Result<(), FusionError> {
        if i >= self.rank {
            Err(FusionError::IndexOutOfRange {
                index: i,
                rank: self.rank,
            })
        } else {
            Ok(())
        }
    }

    /// Multiplicity vector of `v ⊗ X_j` for a multiplicity vector `v`.
    pub fn multiply_right(&self, v: &[u64], j: usize) -> Result<Vec<u64>, FusionError> {
        self.check_index(j)?;
        let mut out = vec![0u64; self.rank];
        for (i, m) in v.iter().enumerate() {
            if *m == 0 {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                let c = self.get(i, j, k);
                if c != 0 {
                    *o = m
                        .checked_mul(c)
                        .and_then(|x| o.checked_add(x))
                        .ok_or(FusionError::Overflow)?;
                }
            }
        }
        Ok(out)
    }

    /// Product of two objects given as multiplicity vectors.
    pub fn multiply(&self, a: &[u64], b: &[u64]) -> Result<Vec<u64>, FusionError> {
        let mut out = vec![0u64; self.rank];
        for (j, mb) in b.iter().enumerate() {
            if *mb == 0 {
                continue;
            }
            let part = self.multiply_right(a, j)?;
            for (o, p) in out.iter_mut().zip(part) {
                *o = p
                    .checked_mul(*mb)
                    .and_then(|x| o.checked_add(x))
                    .ok_or(FusionError::Overflow)?;
            }
        }
        Ok(out)
    }

    /// Multiplicity vector of the simple object `X_i`.
    pub fn simple(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.rank];
        v[i] = 1;
        v
    }

    /// Dual of an object given as a multiplicity vector.
    pub fn dual_object(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.rank];
        for (i, m) in v.iter().enumerate() {
            out[self.dual[i]] += m;
        }
        out
    }
}

/// `dim hom(1, X_{j1} ⊗ … ⊗ X_{jn})`; the empty chain gives 1.
pub fn vacuum_multiplicity(fr: &FusionRing, chain: &[usize]) -> Result<u64, FusionError> {
    let mut v = fr.simple(fr.unit());
    for &j in chain {
        v = fr.multiply_right(&v, j)?;
    }
    Ok(v[fr.unit()])
}

/// Multiplicity matrix of `⊕ m_{jk} X_j ⊠ X_k^op`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterObject {
    rank: usize,
    mult: Vec<u64>,
}

impl CenterObject {
    pub fn zero(rank: usize) -> Self {
        CenterObject {
            rank,
            mult: vec![0; rank * rank],
        }
    }

    /// The tensor unit `X_unit ⊠ X_unit^op`.
    pub fn unit(fr: &FusionRing) -> Self {
        let mut o = Self::zero(fr.rank());
        o.mult[fr.unit() * fr.rank() + fr.unit()] = 1;
        o
    }

    pub fn from_matrix(m: &[Vec<u64>]) -> Self {
        let rank = m.len();
        CenterObject {
            rank,
            mult: m.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, j: usize, k: usize) -> u64 {
        self.mult[j * self.rank + k]
    }

    pub fn to_matrix(&self) -> Vec<Vec<u64>> {
        self.mult.chunks(self.rank).map(|r| r.to_vec()).collect()
    }
}

/// The full center attached to a Z-matrix, with `m_{jk} = z_{jk}`.
pub fn full_center(z: &ZMatrix) -> CenterObject {
    CenterObject::from_matrix(&z.to_rows())
}

/// Tensor product in `C ⊠ C^op`:
/// `(a⊗b)_{cd} = Σ N_{jj'}^c N_{k'k}^d a_{jk} b_{j'k'}`.
pub fn center_tensor(
    fr: &FusionRing,
    a: &CenterObject,
    b: &CenterObject,
) -> Result<CenterObject, FusionError> {
    let r = fr.rank();
    for x in [a, b] {
        if x.rank() != r {
            return Err(FusionError::RankMismatch {
                left: r,
                right: x.rank(),
            });
        }
    }
    // first contract the C side: t[c][k][k'] = Σ_{j,j'} N_{jj'}^c a_{jk} b_{j'k'}
    let t: Vec<Result<Vec<u64>, FusionError>> = (0..r)
        .into_par_iter()
        .map(|c| {
            let mut t = vec![0u64; r * r];
            for j in 0..r {
                for jp in 0..r {
                    let n = fr.get(j, jp, c);
                    if n == 0 {
                        continue;
                    }
                    for k in 0..r {
                        let ajk = a.get(j, k);
                        if ajk == 0 {
                            continue;
                        }
                        let f = n.checked_mul(ajk).ok_or(FusionError::Overflow)?;
                        for kp in 0..r {
                            let bb = b.get(jp, kp);
                            if bb == 0 {
                                continue;
                            }
                            let cell = &mut t[k * r + kp];
                            *cell = f
                                .checked_mul(bb)
                                .and_then(|x| cell.checked_add(x))
                                .ok_or(FusionError::Overflow)?;
                        }
                    }
                }
            }
            Ok(t)
        })
        .collect();
    let mut out = CenterObject::zero(r);
    for (c, tc) in t.into_iter().enumerate() {
        let tc = tc?;
        for k in 0..r {
            for kp in 0..r {
                let v = tc[k * r + kp];
                if v == 0 {
                    continue;
                }
                // op side: X_{k'} ⊗ X_k
                for d in 0..r {
                    let n = fr.get(kp, k, d);
                    if n == 0 {
                        continue;
                    }
                    let cell = &mut out.mult[c * r + d];
                    *cell = n
                        .checked_mul(v)
                        .and_then(|x| cell.checked_add(x))
                        .ok_or(FusionError::Overflow)?;
                }
            }
        }
    }
    Ok(out)
}

/// `dim hom(a, b) = Σ a_{jk} b_{jk}` by semisimplicity.
pub fn center_hom_dim(a: &CenterObject, b: &CenterObject) -> Result<u64, FusionError> {
    if a.rank() != b.rank() {
        return Err(FusionError::RankMismatch {
            left: a.rank(),
            right: b.rank(),
        });
    }
    a.mult
        .iter()
        .zip(&b.mult)
        .try_fold(0u64, |acc, (x, y)| {
            x.checked_mul(*y).and_then(|p| acc.checked_add(p))
        })
        .ok_or(FusionError::Overflow)
}

/// Left fold of `center_tensor` over a nonempty list of objects.
pub fn center_tensor_all(
    fr: &FusionRing,
    objects: &[CenterObject],
) -> Result<CenterObject, FusionError> {
    let mut acc = CenterObject::unit(fr);
    for o in objects {
        acc = center_tensor(fr, &acc, o)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Ising fusion: 1, σ, ψ.
    pub(crate) fn ising_ring() -> FusionRing {
        let r = 3;
        let mut n = vec![0u64; 27];
        let mut set = |i: usize, j: usize, k: usize| n[(i * r + j) * r + k] = 1;
        for j in 0..3 {
            set(0, j, j);
            set(j, 0, j);
        }
        set(1, 1, 0);
        set(1, 1, 2);
        set(1, 2, 1);
        set(2, 1, 1);
        set(2, 2, 0);
        FusionRing::new(3, 0, vec![0, 1, 2], n).unwrap()
    }

    fn fib_ring() -> FusionRing {
        let n = vec![1, 0, 0, 1, 0, 1, 1, 1];
        FusionRing::new(2, 0, vec![0, 1], n).unwrap()
    }

    fn diag(r: usize) -> CenterObject {
        let mut m = vec![vec![0u64; r]; r];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        CenterObject::from_matrix(&m)
    }

    #[test]
    fn vacuum_examples() {
        let is = ising_ring();
        assert_eq!(vacuum_multiplicity(&is, &[1, 1]).unwrap(), 1);
        assert_eq!(vacuum_multiplicity(&fib_ring(), &[1, 1, 1]).unwrap(), 1);
        assert_eq!(vacuum_multiplicity(&is, &[]).unwrap(), 1);
        assert_eq!(
            vacuum_multiplicity(&is, &[3]).unwrap_err(),
            FusionError::IndexOutOfRange { index: 3, rank: 3 }
        );
    }

    #[test]
    fn vacuum_is_cyclic() {
        let is = ising_ring();
        let chain = [1, 2, 1, 0, 2];
        let base = vacuum_multiplicity(&is, &chain).unwrap();
        for s in 1..chain.len() {
            let mut rot = chain.to_vec();
            rot.rotate_left(s);
            assert_eq!(vacuum_multiplicity(&is, &rot).unwrap(), base);
        }
    }

    #[test]
    fn unit_object_is_neutral() {
        let is = ising_ring();
        let b = CenterObject::from_matrix(&[vec![0, 2, 0], vec![1, 0, 0], vec![0, 0, 3]]);
        assert_eq!(center_tensor(&is, &CenterObject::unit(&is), &b).unwrap(), b);
        assert_eq!(center_tensor(&is, &b, &CenterObject::unit(&is)).unwrap(), b);
    }

    #[test]
    fn ising_diagonal_square_vacuum() {
        let is = ising_ring();
        let d = diag(3);
        let sq = center_tensor(&is, &d, &d).unwrap();
        // brute force: Σ_{j,j'} N_{jj'}^1 N_{j'j}^1
        let mut oracle = 0;
        for j in 0..3 {
            for jp in 0..3 {
                oracle += is.get(j, jp, 0) * is.get(jp, j, 0);
            }
        }
        assert_eq!(sq.get(0, 0), oracle);
        assert_eq!(sq.get(0, 0), 3);
        assert_eq!(center_hom_dim(&d, &d).unwrap(), 3);
        assert_eq!(center_hom_dim(&d, &CenterObject::zero(3)).unwrap(), 0);
    }

    #[test]
    fn rank_mismatch_is_reported() {
        let is = ising_ring();
        assert!(matches!(
            center_tensor(&is, &diag(3), &diag(2)),
            Err(FusionError::RankMismatch { .. })
        ));
        assert!(center_hom_dim(&diag(3), &diag(2)).is_err());
    }

    #[test]
    fn broken_rings_are_rejected() {
        // τ⊗τ = τ only: fails the duality axiom
        let n = vec![1, 0, 0, 1, 0, 1, 0, 1];
        assert!(FusionRing::new(2, 0, vec![0, 1], n).is_err());
    }
}
