use std::borrow::Cow;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::CyclotomicField;
use super::AlgebraError;

/// Coefficients stay in the small representation while they fit comfortably
/// in an `i64`; the margin keeps negation and `i128` accumulation safe.
const SMALL_LIMIT: i128 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Small { num: Vec<i64>, den: i64 },
    Big { num: Vec<BigInt>, den: BigInt },
}

/// An element of the cyclotomic field `Q(ζ_N)`, stored as a reduced
/// coordinate vector in the power basis `1, ζ, …, ζ^{φ(N)-1}` with a single
/// positive common denominator.
#[derive(Clone)]
pub struct ExactScalar {
    field: Arc<CyclotomicField>,
    repr: Repr,
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn bits_i128(x: i128) -> u32 {
    128 - x.unsigned_abs().leading_zeros()
}

impl ExactScalar {
    fn from_i128(field: Arc<CyclotomicField>, mut num: Vec<i128>, mut den: i128) -> Self {
        debug_assert!(den != 0);
        if den < 0 {
            den = -den;
            for c in num.iter_mut() {
                *c = -*c;
            }
        }
        let mut g = den;
        for c in &num {
            if g == 1 {
                break;
            }
            g = gcd_i128(g, *c);
        }
        if num.iter().all(|c| *c == 0) {
            g = den;
        }
        if g > 1 {
            for c in num.iter_mut() {
                *c /= g;
            }
            den /= g;
        }
        let fits = den < SMALL_LIMIT && num.iter().all(|c| c.abs() < SMALL_LIMIT);
        let repr = if fits {
            Repr::Small {
                num: num.into_iter().map(|c| c as i64).collect(),
                den: den as i64,
            }
        } else {
            Repr::Big {
                num: num.into_iter().map(BigInt::from).collect(),
                den: BigInt::from(den),
            }
        };
        ExactScalar { field, repr }
    }

    fn from_big(field: Arc<CyclotomicField>, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -&*c;
            }
        }
        if num.iter().all(|c| c.is_zero()) {
            den = BigInt::one();
        } else if !den.is_one() {
            let mut g = den.clone();
            for c in &num {
                if g.is_one() {
                    break;
                }
                g = g.gcd(c);
            }
            if !g.is_one() {
                for c in num.iter_mut() {
                    *c /= &g;
                }
                den /= &g;
            }
        }
        let limit = BigInt::from(SMALL_LIMIT);
        let fits = den < limit && num.iter().all(|c| c.abs() < limit);
        let repr = if fits {
            Repr::Small {
                num: num.iter().map(|c| c.to_i64().unwrap_or(0)).collect(),
                den: den.to_i64().unwrap_or(1),
            }
        } else {
            Repr::Big { num, den }
        };
        ExactScalar { field, repr }
    }

    fn big_parts(&self) -> (Vec<BigInt>, BigInt) {
        match &self.repr {
            Repr::Small { num, den } => (
                num.iter().map(|c| BigInt::from(*c)).collect(),
                BigInt::from(*den),
            ),
            Repr::Big { num, den } => (num.clone(), den.clone()),
        }
    }

    /// Reduce an arbitrary-length integer polynomial in ζ modulo Φ_N.
    fn reduce_i128(field: &CyclotomicField, poly: &[i128]) -> Vec<i128> {
        let deg = field.degree();
        let mut out = vec![0i128; deg];
        for (e, c) in poly.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if e < deg {
                out[e] += c;
            } else {
                for (o, p) in out.iter_mut().zip(field.power(e as i64)) {
                    *o += c * (*p as i128);
                }
            }
        }
        out
    }

    fn reduce_big(field: &CyclotomicField, poly: &[BigInt]) -> Vec<BigInt> {
        let deg = field.degree();
        let mut out = vec![BigInt::zero(); deg];
        for (e, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if e < deg {
                out[e] += c;
            } else {
                for (o, p) in out.iter_mut().zip(field.power(e as i64)) {
                    if *p != 0 {
                        *o += c * *p;
                    }
                }
            }
        }
        out
    }

    /// Reduce a polynomial in ζ_N with rational coefficients (any length) to
    /// its canonical representative.
    pub fn normalize(conductor: u32, raw: &[BigRational]) -> Result<Self, AlgebraError> {
        if conductor == 0 {
            return Err(AlgebraError::InvalidConductor);
        }
        let field = CyclotomicField::get(conductor);
        let mut den = BigInt::one();
        for c in raw {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = raw
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let num = Self::reduce_big(&field, &ints);
        Ok(Self::from_big(field, num, den))
    }

    pub fn zero(conductor: u32) -> Self {
        Self::from_int(0, conductor)
    }

    pub fn one(conductor: u32) -> Self {
        Self::from_int(1, conductor)
    }

    pub fn from_int(v: i64, conductor: u32) -> Self {
        let field = CyclotomicField::get(conductor.max(1));
        let mut num = vec![0i128; field.degree()];
        num[0] = v as i128;
        Self::from_i128(field, num, 1)
    }

    pub fn from_rational(v: &BigRational, conductor: u32) -> Self {
        let field = CyclotomicField::get(conductor.max(1));
        let mut num = vec![BigInt::zero(); field.degree()];
        num[0] = v.numer().clone();
        Self::from_big(field, num, v.denom().clone())
    }

    /// `ζ_N^e`.
    pub fn zeta(conductor: u32, e: i64) -> Self {
        let field = CyclotomicField::get(conductor.max(1));
        let num = field.power(e).iter().map(|c| *c as i128).collect();
        Self::from_i128(field, num, 1)
    }

    pub fn conductor(&self) -> u32 {
        self.field.conductor()
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    /// Power-basis coordinates.
    pub fn coeffs(&self) -> Vec<BigRational> {
        let (num, den) = self.big_parts();
        num.into_iter()
            .map(|c| BigRational::new(c, den.clone()))
            .collect()
    }

    /// Numerators over the common denominator, together with that denominator.
    pub fn numerators(&self) -> (Vec<BigInt>, BigInt) {
        self.big_parts()
    }

    /// Numerators as `i64` when they fit, with the common denominator.
    pub fn small_parts(&self) -> Option<(&[i64], i64)> {
        match &self.repr {
            Repr::Small { num, den } => Some((num, *den)),
            Repr::Big { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Small { num, .. } => num.iter().all(|c| *c == 0),
            Repr::Big { num, .. } => num.iter().all(|c| c.is_zero()),
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The value as a rational number, if it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        let (num, den) = self.big_parts();
        if num.iter().skip(1).all(|c| c.is_zero()) {
            Some(BigRational::new(num[0].clone(), den))
        } else {
            None
        }
    }

    /// The value as an integer, if it is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .map(|q| q.to_integer())
    }

    /// True when every power-basis coordinate is an integer, i.e. the value
    /// lies in `Z[ζ_N]`, the ring of integers.
    pub fn is_algebraic_integer(&self) -> bool {
        match &self.repr {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big { den, .. } => den.is_one(),
        }
    }

    /// Embed into `Q(ζ_M)` for a multiple `M` of the conductor.
    pub fn lift(&self, target: u32) -> Result<Self, AlgebraError> {
        let n = self.conductor();
        if target == n {
            return Ok(self.clone());
        }
        if target == 0 || !target.is_multiple_of(n) {
            return Err(AlgebraError::IncompatibleConductor {
                from: n,
                to: target,
            });
        }
        let step = (target / n) as usize;
        let field = CyclotomicField::get(target);
        match &self.repr {
            Repr::Small { num, den } => {
                let mut poly = vec![0i128; (num.len().saturating_sub(1)) * step + 1];
                for (i, c) in num.iter().enumerate() {
                    poly[i * step] = *c as i128;
                }
                if 63 + bits_i128(field.max_power_coeff() as i128) + bits_i128(target as i128) < 126 {
                    let red = Self::reduce_i128(&field, &poly);
                    return Ok(Self::from_i128(field, red, *den as i128));
                }
                let poly: Vec<BigInt> = poly.into_iter().map(BigInt::from).collect();
                let red = Self::reduce_big(&field, &poly);
                Ok(Self::from_big(field, red, BigInt::from(*den)))
            }
            Repr::Big { num, den } => {
                let mut poly = vec![BigInt::zero(); (num.len().saturating_sub(1)) * step + 1];
                for (i, c) in num.iter().enumerate() {
                    poly[i * step] = c.clone();
                }
                let red = Self::reduce_big(&field, &poly);
                Ok(Self::from_big(field, red, den.clone()))
            }
        }
    }

    /// Bring two scalars into a common field (the lcm of their conductors).
    pub fn align<'a>(a: &'a Self, b: &'a Self) -> (Cow<'a, Self>, Cow<'a, Self>) {
        let (na, nb) = (a.conductor(), b.conductor());
        if na == nb {
            return (Cow::Borrowed(a), Cow::Borrowed(b));
        }
        let l = na.lcm(&nb);
        // lifting to a multiple never fails
        let la = a.lift(l).expect("lcm is a multiple");
        let lb = b.lift(l).expect("lcm is a multiple");
        (Cow::Owned(la), Cow::Owned(lb))
    }

    fn add_same(&self, other: &Self, negate: bool) -> Self {
        let field = self.field.clone();
        if let (Repr::Small { num: a, den: da }, Repr::Small { num: b, den: db }) =
            (&self.repr, &other.repr)
        {
            let (da, db) = (*da as i128, *db as i128);
            let sign = if negate { -1 } else { 1 };
            if da == db {
                let num = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| *x as i128 + sign * *y as i128)
                    .collect();
                return Self::from_i128(field, num, da);
            }
            if bits_i128(da) + bits_i128(db) < 124 {
                let num = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| *x as i128 * db + sign * *y as i128 * da)
                    .collect();
                return Self::from_i128(field, num, da * db);
            }
        }
        let (a, da) = self.big_parts();
        let (b, db) = other.big_parts();
        let num = a
            .iter()
            .zip(&b)
            .map(|(x, y)| {
                if negate {
                    x * &db - y * &da
                } else {
                    x * &db + y * &da
                }
            })
            .collect();
        Self::from_big(field, num, da * db)
    }

    fn mul_same(&self, other: &Self) -> Self {
        let field = self.field.clone();
        let deg = field.degree();
        if let (Repr::Small { num: a, den: da }, Repr::Small { num: b, den: db }) =
            (&self.repr, &other.repr)
        {
            let ma = a.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0) as i128;
            let mb = b.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0) as i128;
            let budget = bits_i128(ma)
                + bits_i128(mb)
                + 2 * bits_i128(2 * deg as i128)
                + bits_i128(field.max_power_coeff() as i128);
            let den_bits = bits_i128(*da as i128) + bits_i128(*db as i128);
            if budget < 125 && den_bits < 125 {
                let mut conv = vec![0i128; 2 * deg - 1];
                for (i, x) in a.iter().enumerate() {
                    if *x == 0 {
                        continue;
                    }
                    let x = *x as i128;
                    for (j, y) in b.iter().enumerate() {
                        conv[i + j] += x * *y as i128;
                    }
                }
                let red = Self::reduce_i128(&field, &conv);
                return Self::from_i128(field, red, *da as i128 * *db as i128);
            }
        }
        let (a, da) = self.big_parts();
        let (b, db) = other.big_parts();
        let mut conv = vec![BigInt::zero(); 2 * deg - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    conv[i + j] += x * y;
                }
            }
        }
        let red = Self::reduce_big(&field, &conv);
        Self::from_big(field, red, da * db)
    }

    /// Multiply by a rational integer.
    pub fn mul_int(&self, k: i64) -> Self {
        let field = self.field.clone();
        if let Repr::Small { num, den } = &self.repr {
            let num = num.iter().map(|c| *c as i128 * k as i128).collect();
            return Self::from_i128(field, num, *den as i128);
        }
        let (num, den) = self.big_parts();
        Self::from_big(field, num.into_iter().map(|c| c * k).collect(), den)
    }

    pub fn mul_rational(&self, q: &BigRational) -> Self {
        let (num, den) = self.big_parts();
        Self::from_big(
            self.field.clone(),
            num.into_iter().map(|c| c * q.numer()).collect(),
            den * q.denom(),
        )
    }

    /// Apply the Galois automorphism `ζ ↦ ζ^k`; `k` must be coprime to N.
    pub fn galois(&self, k: i64) -> Self {
        let field = self.field.clone();
        let n = field.conductor() as i64;
        match &self.repr {
            Repr::Small { num, den } => {
                let mut poly = vec![0i128; n as usize];
                for (i, c) in num.iter().enumerate() {
                    poly[((i as i64) * k).rem_euclid(n) as usize] += *c as i128;
                }
                let budget = 63 + bits_i128(field.max_power_coeff() as i128) + bits_i128(n as i128);
                if budget < 126 {
                    let red = Self::reduce_i128(&field, &poly);
                    return Self::from_i128(field, red, *den as i128);
                }
                let poly: Vec<BigInt> = poly.into_iter().map(BigInt::from).collect();
                let red = Self::reduce_big(&field, &poly);
                Self::from_big(field, red, BigInt::from(*den))
            }
            Repr::Big { num, den } => {
                let mut poly = vec![BigInt::zero(); n as usize];
                for (i, c) in num.iter().enumerate() {
                    poly[((i as i64) * k).rem_euclid(n) as usize] += c;
                }
                let red = Self::reduce_big(&field, &poly);
                Self::from_big(field, red, den.clone())
            }
        }
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Multiplicative inverse, computed as the product of the nontrivial
    /// Galois conjugates divided by the (rational) field norm.
    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(&q.recip(), self.conductor()));
        }
        let mut cofactor = Self::one(self.conductor());
        for &k in self.field.galois_units() {
            if k == 1 {
                continue;
            }
            cofactor = &cofactor * &self.galois(k as i64);
        }
        let norm = (self * &cofactor)
            .as_rational()
            .expect("field norm is rational");
        Ok(cofactor.mul_rational(&norm.recip()))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.conductor());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Signed integer power; negative exponents go through `inv`.
    pub fn powi(&self, e: i32) -> Result<Self, AlgebraError> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// Floating-point value, for diagnostics only.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.conductor() as f64;
        let (num, den) = self.big_parts();
        let den = den.to_f64().unwrap_or(f64::INFINITY);
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in num.iter().enumerate() {
            let c = c.to_f64().unwrap_or(0.0);
            let ang = 2.0 * std::f64::consts::PI * i as f64 / n;
            re += c * ang.cos();
            im += c * ang.sin();
        }
        (re / den, im / den)
    }

    /// Real part as `f64`, for diagnostics and search heuristics.
    pub fn to_f64(&self) -> f64 {
        self.to_complex().0
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor() == other.conductor() {
            return self.repr == other.repr;
        }
        let (a, b) = Self::align(self, other);
        a.repr == b.repr
    }
}

impl Eq for ExactScalar {}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactScalar[{}]({})", self.conductor(), self)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.conductor();
        let mut first = true;
        for (i, c) in self.coeffs().into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mag_s = if mag.is_integer() {
                mag.to_string()
            } else {
                format!("({mag})")
            };
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag_s}")?,
                (_, true) => write!(f, "z{n}^{i}")?,
                (_, false) => write!(f, "{mag_s}*z{n}^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                let (a, b) = ExactScalar::align(self, rhs);
                #[allow(clippy::redundant_closure_call)]
                ($body)(a.as_ref(), b.as_ref())
            }
        }
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, |a: &ExactScalar, b: &ExactScalar| a.add_same(b, false));
binop!(Sub, sub, |a: &ExactScalar, b: &ExactScalar| a.add_same(b, true));
binop!(Mul, mul, |a: &ExactScalar, b: &ExactScalar| a.mul_same(b));

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        self.mul_int(-1)
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        self.mul_int(-1)
    }
}

/// Sum of a sequence of scalars living in (multiples of) `conductor`.
pub fn sum<'a, I: IntoIterator<Item = &'a ExactScalar>>(conductor: u32, items: I) -> ExactScalar {
    items
        .into_iter()
        .fold(ExactScalar::zero(conductor), |acc, x| &acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn normalize_examples() {
        // ζ₄² + 1 = 0
        let a = ExactScalar::normalize(4, &[q(1, 1), q(0, 1), q(1, 1)]).unwrap();
        assert!(a.is_zero());
        // 1 + ζ₃ + ζ₃² = 0
        let b = ExactScalar::normalize(3, &[q(1, 1), q(1, 1), q(1, 1)]).unwrap();
        assert!(b.is_zero());
        // (ζ₈ + ζ₈⁷)² = 2
        let r = &ExactScalar::zeta(8, 1) + &ExactScalar::zeta(8, 7);
        assert_eq!(&r * &r, ExactScalar::from_int(2, 8));
    }

    #[test]
    fn normalize_rejects_conductor_zero() {
        assert_eq!(
            ExactScalar::normalize(0, &[]).unwrap_err(),
            AlgebraError::InvalidConductor
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            ExactScalar::from_int(2, 1).inv().unwrap(),
            ExactScalar::from_rational(&q(1, 2), 1)
        );
        for n in [3u32, 5, 8, 12, 60] {
            let z = ExactScalar::zeta(n, 1);
            assert_eq!(z.inv().unwrap(), ExactScalar::zeta(n, n as i64 - 1));
        }
        assert_eq!(
            ExactScalar::zero(5).inv().unwrap_err(),
            AlgebraError::DivisionByZero
        );
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(ExactScalar::zeta(4, 1).conj(), -ExactScalar::zeta(4, 1));
        let r = ExactScalar::from_rational(&q(7, 3), 12);
        assert_eq!(r.conj(), r);
        let re = &ExactScalar::zeta(5, 1) + &ExactScalar::zeta(5, 4);
        assert_eq!(re.conj(), re);
        assert!(re.is_real());
    }

    #[test]
    fn cross_conductor_lifts_to_lcm() {
        let a = ExactScalar::zeta(4, 1);
        let b = ExactScalar::zeta(6, 1);
        let c = &a * &b;
        assert_eq!(c.conductor(), 12);
        assert_eq!(c, ExactScalar::zeta(12, 3 + 2));
        // equal values in different fields compare equal
        assert_eq!(ExactScalar::zeta(4, 2), ExactScalar::from_int(-1, 3));
    }

    #[test]
    fn big_path_round_trips() {
        let x = ExactScalar::from_int(1 << 40, 7);
        let y = &(&x * &x) * &x;
        assert!(y.small_parts().is_none());
        let back = &y * &(x.inv().unwrap().pow(3));
        assert!(back.is_one());
    }

    #[test]
    fn display_is_readable() {
        let x = &ExactScalar::from_int(3, 8) - &ExactScalar::zeta(8, 3).mul_int(2);
        assert_eq!(x.to_string(), "3 - 2*z8^3");
        assert_eq!(ExactScalar::zero(5).to_string(), "0");
    }
}
