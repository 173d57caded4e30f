//! Exact dyadic rational arithmetic.
//!
//! A dyadic rational is `mantissa * 2^exponent` with an arbitrary-size
//! integer mantissa. Addition, subtraction and multiplication are exact;
//! the only rounding operations are the explicit directed ones
//! ([`Dyadic::div_round`], [`Dyadic::sqrt_round`], [`Dyadic::round_to`]),
//! which always round in a stated direction so callers can keep enclosures
//! outward.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Rounding direction for the directed operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// An exact dyadic rational `mantissa * 2^exponent`.
///
/// Canonical form: the mantissa is odd or zero, and zero has exponent 0.
/// Equality and ordering are value-based.
#[derive(Clone, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.canonicalize();
        d
    }

    fn canonicalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let shift = self.mantissa.trailing_zeros().unwrap_or(0);
        if shift > 0 {
            self.mantissa >>= shift;
            self.exponent += shift as i64;
        }
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn from_int(i: i64) -> Self {
        Dyadic::new(BigInt::from(i), 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic { mantissa: BigInt::from(1), exponent: e }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.sign() == Sign::Minus
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.sign() == Sign::Plus
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: &self.mantissa * &other.mantissa,
            exponent: self.exponent + other.exponent,
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Multiply by `2^e` (exact).
    pub fn shift(&self, e: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + e }
    }

    pub fn mul_int(&self, k: i64) -> Dyadic {
        Dyadic::new(&self.mantissa * k, self.exponent)
    }

    pub fn square(&self) -> Dyadic {
        self.mul(self)
    }

    pub fn min(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a <= b { a.clone() } else { b.clone() }
    }

    pub fn max(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a >= b { a.clone() } else { b.clone() }
    }

    /// Largest integer `n` with `n <= self`.
    pub fn floor_int(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as u64
        } else {
            self.mantissa.div_floor(&(BigInt::from(1) << (-self.exponent) as u64))
        }
    }

    /// Smallest integer `n` with `n >= self`.
    pub fn ceil_int(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as u64
        } else {
            self.mantissa.div_ceil(&(BigInt::from(1) << (-self.exponent) as u64))
        }
    }

    /// Round to the grid `2^-k`, in the given direction.
    ///
    /// The result differs from `self` by less than `2^-k` and never moves
    /// toward the wrong side, so outward rounding of interval endpoints is
    /// `round_to(Round::Down)` on the low end and `Round::Up` on the high end.
    pub fn round_to(&self, k: i64, dir: Round) -> Dyadic {
        if self.is_zero() || self.exponent >= -k {
            return self.clone();
        }
        let shift = (-k - self.exponent) as u64;
        let den = BigInt::from(1) << shift;
        let m = match dir {
            Round::Down => self.mantissa.div_floor(&den),
            Round::Up => self.mantissa.div_ceil(&den),
        };
        Dyadic::new(m, -k)
    }

    /// Directed division: a dyadic within `2^-k` of `self/other`, rounded in
    /// the stated direction. `other` must be nonzero.
    pub fn div_round(&self, other: &Dyadic, k: i64, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "division by zero dyadic");
        // self/other * 2^k = mantissa_s * 2^(es + k - eo) / mantissa_o
        let mut num = self.mantissa.clone();
        let mut den = other.mantissa.clone();
        let e = self.exponent + k - other.exponent;
        if e >= 0 {
            num <<= e as u64;
        } else {
            den <<= (-e) as u64;
        }
        if den.sign() == Sign::Minus {
            num = -num;
            den = -den;
        }
        let q = match dir {
            Round::Down => num.div_floor(&den),
            Round::Up => num.div_ceil(&den),
        };
        Dyadic::new(q, -k)
    }

    /// Directed square root, `self >= 0`: a dyadic within `2^-k` of
    /// `sqrt(self)`, rounded in the stated direction (never past the root).
    pub fn sqrt_round(&self, k: i64, dir: Round) -> Dyadic {
        assert!(!self.is_negative(), "sqrt of negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // sqrt(self) * 2^k = sqrt(self * 2^(2k)); bracket the scaled value
        // by integers and take the integer square root.
        let scaled = self.shift(2 * k);
        match dir {
            Round::Down => Dyadic::new(scaled.floor_int().sqrt(), -k),
            Round::Up => {
                let c = scaled.ceil_int();
                let r = c.sqrt();
                let exact = &r * &r == c;
                Dyadic::new(if exact { r } else { r + 1 }, -k)
            }
        }
    }

    /// Number of bits of the integer part, i.e. the smallest `b >= 0` with
    /// `|self| < 2^b`.
    pub fn mag_bits(&self) -> i64 {
        if self.is_zero() {
            return 0;
        }
        let bits = self.mantissa.bits() as i64 + self.exponent;
        bits.max(0)
    }

    /// Smallest `b` (possibly negative) with `|self| < 2^b`; only defined
    /// for nonzero values.
    pub fn log2_strict_bound(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.mantissa.bits() as i64 + self.exponent
    }

    pub fn to_f64(&self) -> f64 {
        // Good enough for diagnostics and reference tests; clamp huge
        // exponents rather than overflow.
        let bits = self.mantissa.bits() as i64;
        if bits > 900 {
            let top = self.mantissa.clone() >> (bits - 64) as u64;
            return bigint_to_f64(&top) * pow2_f64(self.exponent + bits - 64);
        }
        bigint_to_f64(&self.mantissa) * pow2_f64(self.exponent)
    }

    /// Exact decimal string. Dyadics have finite decimal expansions.
    pub fn to_decimal_string(&self) -> String {
        if self.exponent >= 0 {
            return (&self.mantissa << self.exponent as u64).to_string();
        }
        let frac_digits = (-self.exponent) as u64;
        // m / 2^d = m * 5^d / 10^d
        let scaled = &self.mantissa * BigInt::from(5).pow(frac_digits as u32);
        let neg = scaled.sign() == Sign::Minus;
        let digits = scaled.abs().to_string();
        let digits = if (digits.len() as u64) <= frac_digits {
            format!("{}{}", "0".repeat((frac_digits + 1 - digits.len() as u64) as usize), digits)
        } else {
            digits
        };
        let split = digits.len() - frac_digits as usize;
        let (int_part, frac_part) = digits.split_at(split);
        let frac_part = frac_part.trim_end_matches('0');
        let body = if frac_part.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac_part}")
        };
        if neg { format!("-{body}") } else { body }
    }

    /// Decimal string with exactly `digits` fraction digits, rounded in the
    /// stated direction.
    pub fn to_decimal_rounded(&self, digits: u32, dir: Round) -> String {
        let scale = BigInt::from(10).pow(digits);
        // self * 10^digits, then floor/ceil.
        let num = Dyadic::new(&self.mantissa * &scale, self.exponent);
        let scaled = match dir {
            Round::Down => num.floor_int(),
            Round::Up => num.ceil_int(),
        };
        let neg = scaled.sign() == Sign::Minus;
        let body = scaled.abs().to_string();
        let body = if body.len() <= digits as usize {
            format!("{}{}", "0".repeat(digits as usize + 1 - body.len()), body)
        } else {
            body
        };
        let split = body.len() - digits as usize;
        let (int_part, frac_part) = body.split_at(split);
        let s = if digits == 0 {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac_part}")
        };
        if neg { format!("-{s}") } else { s }
    }
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    b.to_f64().unwrap_or(if b.sign() == Sign::Minus { f64::NEG_INFINITY } else { f64::INFINITY })
}

fn pow2_f64(e: i64) -> f64 {
    if e >= -1022 && e <= 1023 {
        f64::from_bits((((e + 1023) as u64) << 52).max(1))
    } else if e < -1022 {
        0.0
    } else {
        f64::INFINITY
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.mantissa.sign(), other.mantissa.sign()) {
            (Sign::Minus, Sign::NoSign) | (Sign::Minus, Sign::Plus) | (Sign::NoSign, Sign::Plus) => {
                return Ordering::Less
            }
            (Sign::Plus, Sign::NoSign) | (Sign::Plus, Sign::Minus) | (Sign::NoSign, Sign::Minus) => {
                return Ordering::Greater
            }
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        a.cmp(&b)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}
