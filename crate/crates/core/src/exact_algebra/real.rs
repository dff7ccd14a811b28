//! Sign determination for real cyclotomic numbers.
//!
//! Exact zero is detected from the coordinates. A nonzero value is evaluated
//! in binary fixed point with a rigorous error bound; the working precision
//! doubles until the bound separates the value from zero, which always
//! happens for a nonzero input.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{AlgebraError, ExactScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealSign {
    Negative,
    Zero,
    Positive,
}

impl RealSign {
    pub fn as_ordering(self) -> Ordering {
        match self {
            RealSign::Negative => Ordering::Less,
            RealSign::Zero => Ordering::Equal,
            RealSign::Positive => Ordering::Greater,
        }
    }
}

const START_BITS: u64 = 96;
const GUARD_BITS: u64 = 40;

/// Fixed-point value scaled by `2^bits`.
struct Fixed {
    bits: u64,
}

impl Fixed {
    fn one(&self) -> BigInt {
        BigInt::from(1) << self.bits
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }

    /// arctan(1/m) together with the number of series terms used.
    fn atan_inv(&self, m: u64) -> (BigInt, u64) {
        let m2 = BigInt::from(m * m);
        let mut power = self.one() / m;
        let mut acc = BigInt::zero();
        let mut k = 0u64;
        while !power.is_zero() {
            let term = &power / (2 * k + 1);
            if k.is_multiple_of(2) {
                acc += term;
            } else {
                acc -= term;
            }
            power /= &m2;
            k += 1;
        }
        (acc, k)
    }

    /// π with an error bound in units of the last place.
    fn pi(&self) -> (BigInt, u64) {
        let (a5, t5) = self.atan_inv(5);
        let (a239, t239) = self.atan_inv(239);
        let pi = a5 * 16 - a239 * 4;
        (pi, 16 * 2 * t5 + 4 * 2 * t239 + 4)
    }

    /// cos(x) for |x| <= π by Taylor series; returns value and term count.
    fn cos(&self, x: &BigInt) -> (BigInt, u64) {
        let x2 = self.mul(x, x);
        let mut term = self.one();
        let mut acc = term.clone();
        let mut k = 1u64;
        loop {
            term = self.mul(&term, &x2) / ((2 * k - 1) * (2 * k));
            if term.is_zero() {
                break;
            }
            if k % 2 == 1 {
                acc -= &term;
            } else {
                acc += &term;
            }
            k += 1;
        }
        (acc, k)
    }
}

/// Sign of a real element of a cyclotomic field.
pub fn sign_of_real(a: &ExactScalar) -> Result<RealSign, AlgebraError> {
    if a.is_zero() {
        return Ok(RealSign::Zero);
    }
    if !a.is_real() {
        return Err(AlgebraError::NotReal);
    }
    let n = a.conductor() as i64;
    let (num, _den) = a.numerators();
    let weight: BigInt = num.iter().map(|c| c.abs()).sum();
    let mut target = START_BITS;
    loop {
        let fx = Fixed {
            bits: target + GUARD_BITS,
        };
        let (pi, pi_err) = fx.pi();
        let two_pi = &pi * 2;
        let mut value = BigInt::zero();
        let mut max_err = 0u64;
        for (i, c) in num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // angle 2πi/n folded into [-π, π]; cos is even
            let i = i as i64 % n;
            let mut ang = (&two_pi * i) / n;
            if ang > pi {
                ang = &two_pi - ang;
            }
            let (cos, terms) = fx.cos(&ang);
            // angle error is at most 2*pi_err + 2 ulps and the series amplifies it
            // by at most sinh(π) < 12; each truncated term contributes two ulps,
            // amplified by at most e^π < 24 through the later terms
            let err = 12 * (2 * pi_err + 2) + 48 * terms + 8;
            max_err = max_err.max(err);
            value += c * cos;
        }
        // error on the scaled sum, in ulps of the fixed-point scale
        let bound = &weight * BigInt::from(max_err);
        if value.abs() > bound {
            return Ok(if value.is_positive() {
                RealSign::Positive
            } else {
                RealSign::Negative
            });
        }
        target *= 2;
    }
}

/// Exact comparison of two real cyclotomic numbers.
pub fn compare_real(a: &ExactScalar, b: &ExactScalar) -> Result<Ordering, AlgebraError> {
    Ok(sign_of_real(&(a - b))?.as_ordering())
}

/// `⌊num / den⌋` for real `num >= 0` and real `den > 0`, exact.
pub fn floor_ratio(num: &ExactScalar, den: &ExactScalar) -> Result<u64, AlgebraError> {
    if sign_of_real(den)? != RealSign::Positive {
        return Err(AlgebraError::NotPositive);
    }
    if sign_of_real(num)? == RealSign::Negative {
        return Err(AlgebraError::NotPositive);
    }
    let guess = (num.to_f64() / den.to_f64()).floor().max(0.0);
    let mut q: u64 = if guess.is_finite() && guess < 1e15 {
        guess as u64
    } else {
        0
    };
    // shift down while q*den > num, then up while (q+1)*den <= num
    while q > 0 && sign_of_real(&(num - &den.mul_int(q as i64)))? == RealSign::Negative {
        q -= 1;
    }
    while sign_of_real(&(num - &den.mul_int(q as i64 + 1)))? != RealSign::Negative {
        q += 1;
    }
    Ok(q)
}
