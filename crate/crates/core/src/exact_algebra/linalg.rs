//! Exact rational linear algebra: row reduction, integer-saturated nullspace
//! bases, and a modular independence filter for tall systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense matrix of exact rationals, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<BigRational>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        RationalMatrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|x| BigRational::from_integer((*x).into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .fold(BigRational::zero(), |acc, x| acc + x)
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Reduced row echelon form together with the pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: RationalMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.matrix.cols];
        for p in &self.pivots {
            is_pivot[*p] = true;
        }
        (0..self.matrix.cols).filter(|c| !is_pivot[*c]).collect()
    }
}

/// Gauss–Jordan elimination over Q.
pub fn rref(m: &RationalMatrix) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|i| !a.get(*i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = a.get(r, c).recip();
        for j in c..cols {
            let v = a.get(r, j);
            if !v.is_zero() {
                let nv = v * &inv;
                a.set(r, j, nv);
            }
        }
        let pivot_row: Vec<(usize, BigRational)> = (c..cols)
            .filter_map(|j| {
                let v = a.get(r, j);
                (!v.is_zero()).then(|| (j, v.clone()))
            })
            .collect();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a.get(i, c).clone();
            if f.is_zero() {
                continue;
            }
            for (j, v) in &pivot_row {
                let nv = a.get(i, *j) - &f * v;
                a.set(i, *j, nv);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { matrix: a, pivots }
}

/// Scale a rational vector to a primitive integer vector whose first nonzero
/// entry is positive.
pub fn saturate(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in ints.iter_mut() {
            *x /= &g;
        }
    }
    if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in ints.iter_mut() {
            *x = -&*x;
        }
    }
    ints
}

/// Basis of the right kernel of `m`: primitive integer vectors, one per free
/// column of the reduced row echelon form, ordered by that free column.
pub fn rational_nullspace(m: &RationalMatrix) -> Vec<Vec<BigInt>> {
    nullspace_from_rref(&rref(m))
}

pub fn nullspace_from_rref(red: &Rref) -> Vec<Vec<BigInt>> {
    let cols = red.matrix.cols;
    red.free_columns()
        .into_iter()
        .map(|f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (i, p) in red.pivots.iter().enumerate() {
                v[*p] = -red.matrix.get(i, f).clone();
            }
            saturate(&v)
        })
        .collect()
}

const MODULUS: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    acc
}

fn to_mod(x: &BigInt) -> u64 {
    let m = BigInt::from(MODULUS);
    x.mod_floor(&m).to_u64().unwrap_or(0)
}

/// Incrementally select rows that are linearly independent modulo a large
/// prime. Rows independent mod p are independent over Q, so the selection
/// never contains redundant rows; a row dependent mod p but not over Q is
/// possible in principle, which callers detect by verifying the resulting
/// kernel against the full system.
pub struct IndependentRows {
    cols: usize,
    /// echelon basis mod p, each with its pivot column, normalized pivot 1
    basis: Vec<(usize, Vec<u64>)>,
    selected: Vec<Vec<BigRational>>,
}

impl IndependentRows {
    pub fn new(cols: usize) -> Self {
        IndependentRows {
            cols,
            basis: Vec::new(),
            selected: Vec::new(),
        }
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.cols
    }

    /// Offer a row; returns true if it was kept.
    pub fn offer(&mut self, row: &[BigRational]) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        if self.is_full() || row.iter().all(|x| x.is_zero()) {
            return false;
        }
        let mut v: Vec<u64> = Vec::with_capacity(self.cols);
        for x in row {
            let d = to_mod(x.denom());
            if d == 0 {
                // denominator divisible by p: keep the row unconditionally
                self.selected.push(row.to_vec());
                return true;
            }
            v.push(mulmod(to_mod(x.numer()), powmod(d, MODULUS - 2)));
        }
        for (p, b) in &self.basis {
            let f = v[*p];
            if f == 0 {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b) {
                if *y != 0 {
                    *x = (*x + MODULUS - mulmod(f, *y)) % MODULUS;
                }
            }
        }
        let Some(p) = v.iter().position(|x| *x != 0) else {
            return false;
        };
        let inv = powmod(v[p], MODULUS - 2);
        for x in v.iter_mut() {
            *x = mulmod(*x, inv);
        }
        // keep the basis reduced so later reductions stay one pass
        for (_, b) in self.basis.iter_mut() {
            let f = b[p];
            if f != 0 {
                for (x, y) in b.iter_mut().zip(&v) {
                    if *y != 0 {
                        *x = (*x + MODULUS - mulmod(f, *y)) % MODULUS;
                    }
                }
            }
        }
        self.basis.push((p, v));
        self.selected.push(row.to_vec());
        true
    }

    pub fn into_matrix(self) -> RationalMatrix {
        RationalMatrix::from_rows(self.cols, self.selected)
    }
}
