//! Per-conductor data for `Q(ζ_N) = Q[x]/(Φ_N)`: the cyclotomic polynomial and a
//! reduction table, computed once and shared.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;

/// Reduction data for one conductor.
#[derive(Debug)]
pub struct CyclotomicField {
    conductor: u32,
    degree: usize,
    /// Coefficients of Φ_N, lowest degree first, monic.
    phi: Vec<i64>,
    /// `powers[e]` holds the coordinates of `x^e mod Φ_N` for `0 <= e < N`.
    powers: Vec<Vec<i64>>,
    /// Largest absolute coefficient appearing in `powers`.
    max_power_coeff: i64,
    /// Exponents `k` coprime to `N` in `1..N`, i.e. the Galois group.
    units: Vec<u32>,
}

impl CyclotomicField {
    fn build(conductor: u32) -> Self {
        assert!(conductor >= 1, "conductor must be positive");
        let phi = cyclotomic_polynomial(conductor as u64);
        let degree = phi.len() - 1;
        let n = conductor as usize;
        let mut powers = Vec::with_capacity(n);
        let mut cur = vec![0i64; degree];
        cur[0] = 1;
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by x
            let top = cur[degree - 1];
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..degree {
                    cur[i] -= top * phi[i];
                }
            }
        }
        let max_power_coeff = powers
            .iter()
            .flat_map(|v| v.iter())
            .map(|c| c.abs())
            .max()
            .unwrap_or(1)
            .max(1);
        let units = (1..=conductor)
            .filter(|k| (*k as u64).gcd(&(conductor as u64)) == 1)
            .map(|k| k % conductor)
            .collect();
        CyclotomicField {
            conductor,
            degree,
            phi,
            powers,
            max_power_coeff,
            units,
        }
    }

    /// Shared field for conductor `n`.
    pub fn get(n: u32) -> Arc<CyclotomicField> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CyclotomicField>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(CyclotomicField::build(n)))
            .clone()
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// φ(N), the dimension over Q.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn phi_poly(&self) -> &[i64] {
        &self.phi
    }

    /// Coordinates of `ζ^e`, `e` taken modulo N.
    pub fn power(&self, e: i64) -> &[i64] {
        let n = self.conductor as i64;
        &self.powers[e.rem_euclid(n) as usize]
    }

    pub(crate) fn max_power_coeff(&self) -> i64 {
        self.max_power_coeff
    }

    pub fn galois_units(&self) -> &[u32] {
        &self.units
    }
}

/// Φ_n with integer coefficients, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    // x^n - 1 = Π_{d | n} Φ_d; divide out the proper divisors.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let den = cyclotomic_polynomial(d);
            num = exact_divide(&num, &den);
        }
    }
    num
}

fn exact_divide(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut quot = vec![0i64; nd - dd + 1];
    // den is monic
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|c| *c == 0));
    quot
}

/// Euler's totient.
pub fn totient(n: u32) -> usize {
    CyclotomicField::get(n).degree()
}
