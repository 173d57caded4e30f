//! Dyadic-endpoint intervals, the carrier for every certified value.
//!
//! All endpoint arithmetic is exact; the only widening comes from explicit
//! precision clamping ([`Interval::clamp`]) and from elementary-function
//! truncation, both of which round outward. An `Interval` produced by this
//! crate always contains the exact mathematical value it stands for.

use crate::dyadic::{Dyadic, Round};
use std::fmt;

/// A closed interval `[lo, hi]` with exact dyadic endpoints, `lo <= hi`.
#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Interval::point(Dyadic::one())
    }

    pub fn from_int(i: i64) -> Self {
        Interval::point(Dyadic::from_int(i))
    }

    /// `[-r, r]`.
    pub fn symmetric(r: Dyadic) -> Self {
        assert!(!r.is_negative());
        Interval { lo: r.neg(), hi: r }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    /// Exact midpoint (dyadics are closed under halving).
    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).shift(-1)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_int(&self, i: i64) -> bool {
        self.contains(&Dyadic::from_int(i))
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        if !self.intersects(other) {
            return None;
        }
        Some(Interval::new(Dyadic::max(&self.lo, &other.lo), Dyadic::min(&self.hi, &other.hi)))
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(Dyadic::min(&self.lo, &other.lo), Dyadic::max(&self.hi, &other.hi))
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.add(&other.lo), hi: self.hi.add(&other.hi) }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.sub(&other.hi), hi: self.hi.sub(&other.lo) }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let c = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn scale(&self, c: &Dyadic) -> Interval {
        if c.is_negative() {
            Interval { lo: self.hi.mul(c), hi: self.lo.mul(c) }
        } else {
            Interval { lo: self.lo.mul(c), hi: self.hi.mul(c) }
        }
    }

    /// Multiply by `2^e` (exact).
    pub fn shift(&self, e: i64) -> Interval {
        Interval { lo: self.lo.shift(e), hi: self.hi.shift(e) }
    }

    pub fn square(&self) -> Interval {
        // Tighter than self*self: the result is nonnegative.
        let a = self.lo.square();
        let b = self.hi.square();
        let hi = Dyadic::max(&a, &b);
        let lo = if self.contains(&Dyadic::zero()) { Dyadic::zero() } else { Dyadic::min(&a, &b) };
        Interval { lo, hi }
    }

    /// Enclosure of `{|x| : x in self}`.
    pub fn abs(&self) -> Interval {
        let a = self.lo.abs();
        let b = self.hi.abs();
        let hi = Dyadic::max(&a, &b);
        let lo = if self.contains(&Dyadic::zero()) { Dyadic::zero() } else { Dyadic::min(&a, &b) };
        Interval { lo, hi }
    }

    /// Upper bound of `|x|` over the interval.
    pub fn abs_hi(&self) -> Dyadic {
        Dyadic::max(&self.lo.abs(), &self.hi.abs())
    }

    /// Directed division by an interval not containing zero.
    pub fn div(&self, other: &Interval, k: i64) -> Interval {
        assert!(
            !other.contains(&Dyadic::zero()),
            "interval division by an interval containing zero"
        );
        if other.is_point() {
            let d = &other.lo;
            return if d.is_positive() {
                Interval {
                    lo: self.lo.div_round(d, k, Round::Down),
                    hi: self.hi.div_round(d, k, Round::Up),
                }
            } else {
                Interval {
                    lo: self.hi.div_round(d, k, Round::Down),
                    hi: self.lo.div_round(d, k, Round::Up),
                }
            };
        }
        if other.lo.is_positive() {
            // Positive denominator: the lower bound comes from the low
            // numerator, the upper from the high numerator.
            let lo = Dyadic::min(
                &self.lo.div_round(&other.lo, k, Round::Down),
                &self.lo.div_round(&other.hi, k, Round::Down),
            );
            let hi = Dyadic::max(
                &self.hi.div_round(&other.lo, k, Round::Up),
                &self.hi.div_round(&other.hi, k, Round::Up),
            );
            return Interval { lo, hi };
        }
        let cands = [(&self.lo, &other.lo), (&self.lo, &other.hi), (&self.hi, &other.lo), (&self.hi, &other.hi)];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for (n, d) in cands {
            let down = n.div_round(d, k, Round::Down);
            let up = n.div_round(d, k, Round::Up);
            lo = Some(match lo {
                None => down,
                Some(c) => Dyadic::min(&c, &down),
            });
            hi = Some(match hi {
                None => up,
                Some(c) => Dyadic::max(&c, &up),
            });
        }
        Interval { lo: lo.unwrap(), hi: hi.unwrap() }
    }

    /// Directed reciprocal at precision `2^-k`.
    pub fn recip(&self, k: i64) -> Interval {
        if self.lo.is_positive() {
            return self.recip_pos(k);
        }
        if self.hi.is_negative() {
            return self.neg().recip_pos(k).neg();
        }
        Interval::one().div(self, k)
    }

    /// Reciprocal of a certifiably positive interval: two directed
    /// divisions instead of the general candidate scan.
    pub fn recip_pos(&self, k: i64) -> Interval {
        debug_assert!(self.lo.is_positive());
        let one = Dyadic::one();
        Interval {
            lo: one.div_round(&self.hi, k, Round::Down),
            hi: one.div_round(&self.lo, k, Round::Up),
        }
    }

    /// Outward square root at precision `2^-k`; requires `lo >= 0`.
    pub fn sqrt(&self, k: i64) -> Interval {
        assert!(!self.lo.is_negative(), "sqrt of an interval with negative lower bound");
        Interval {
            lo: self.lo.sqrt_round(k, Round::Down),
            hi: self.hi.sqrt_round(k, Round::Up),
        }
    }

    /// Widen both endpoints outward by `r >= 0`.
    pub fn widen(&self, r: &Dyadic) -> Interval {
        assert!(!r.is_negative());
        Interval { lo: self.lo.sub(r), hi: self.hi.add(r) }
    }

    /// Clamp endpoint precision to the grid `2^-k`, widening outward.
    /// Keeps mantissas bounded in long computations; never shrinks.
    pub fn clamp(&self, k: i64) -> Interval {
        Interval {
            lo: self.lo.round_to(k, Round::Down),
            hi: self.hi.round_to(k, Round::Up),
        }
    }

    pub fn to_f64_mid(&self) -> f64 {
        self.midpoint().to_f64()
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A rectangular complex enclosure: independent real and imaginary intervals.
#[derive(Clone, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: Interval) -> Self {
        ComplexInterval { re, im: Interval::zero() }
    }

    pub fn zero() -> Self {
        ComplexInterval { re: Interval::zero(), im: Interval::zero() }
    }

    pub fn one() -> Self {
        ComplexInterval { re: Interval::one(), im: Interval::zero() }
    }

    pub fn add(&self, other: &ComplexInterval) -> ComplexInterval {
        ComplexInterval { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn sub(&self, other: &ComplexInterval) -> ComplexInterval {
        ComplexInterval { re: self.re.sub(&other.re), im: self.im.sub(&other.im) }
    }

    pub fn neg(&self) -> ComplexInterval {
        ComplexInterval { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> ComplexInterval {
        ComplexInterval { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, other: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }

    pub fn mul_real(&self, r: &Interval) -> ComplexInterval {
        ComplexInterval { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn scale(&self, c: &Dyadic) -> ComplexInterval {
        ComplexInterval { re: self.re.scale(c), im: self.im.scale(c) }
    }

    pub fn widen(&self, r: &Dyadic) -> ComplexInterval {
        ComplexInterval { re: self.re.widen(r), im: self.im.widen(r) }
    }

    pub fn clamp(&self, k: i64) -> ComplexInterval {
        ComplexInterval { re: self.re.clamp(k), im: self.im.clamp(k) }
    }

    /// Width of the wider component.
    pub fn width(&self) -> Dyadic {
        Dyadic::max(&self.re.width(), &self.im.width())
    }

    /// Upper bound of the modulus over the box.
    pub fn abs_hi(&self, k: i64) -> Dyadic {
        let m = self.re.square().add(&self.im.square());
        m.hi().sqrt_round(k, Round::Up)
    }

    /// Enclosure of the modulus over the box.
    pub fn abs(&self, k: i64) -> Interval {
        self.re.square().add(&self.im.square()).sqrt(k)
    }

    /// Exact upper bound `|Re| + |Im| >= |z|` (no rounding).
    pub fn abs_l1_hi(&self) -> Dyadic {
        self.re.abs_hi().add(&self.im.abs_hi())
    }

    pub fn intersects(&self, other: &ComplexInterval) -> bool {
        self.re.intersects(&other.re) && self.im.intersects(&other.im)
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains(&Dyadic::zero()) && self.im.contains(&Dyadic::zero())
    }
}

impl fmt::Debug for ComplexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + i*{:?}", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        // Test-only convenience via small dyadics.
        Interval::new(
            d((lo * 1024.0).round() as i64, -10),
            d((hi * 1024.0).round() as i64, -10),
        )
    }

    #[test]
    fn add_points() {
        let a = Interval::from_int(1);
        let b = Interval::from_int(2);
        assert_eq!(a.add(&b), Interval::from_int(3));
    }

    #[test]
    fn mul_mixed_signs() {
        let a = Interval::new(d(-1, 0), d(1, 0));
        let p = a.mul(&a);
        assert_eq!(p, Interval::new(d(-1, 0), d(1, 0)));
    }

    #[test]
    fn sub_is_dependency_free() {
        let a = Interval::new(Dyadic::zero(), Dyadic::pow2(-3));
        let r = a.sub(&a);
        assert_eq!(r, Interval::new(Dyadic::pow2(-3).neg(), Dyadic::pow2(-3)));
    }

    #[test]
    fn square_tightens_at_zero() {
        let a = Interval::new(d(-2, 0), d(1, 0));
        let s = a.square();
        assert_eq!(s, Interval::new(Dyadic::zero(), d(4, 0)));
    }

    #[test]
    fn division_encloses_quotients() {
        let a = Interval::from_int(1);
        let b = Interval::new(d(2, 0), d(4, 0));
        let q = a.div(&b, 20);
        assert!(q.lo().to_f64() <= 0.25 && 0.5 <= q.hi().to_f64());
        assert!(q.width() <= d(1, -2).add(&Dyadic::pow2(-18)));
    }

    #[test]
    fn clamp_widens() {
        let a = Interval::new(d(1, -20), d(3, -20));
        let c = a.clamp(4);
        assert!(c.lo() <= a.lo() && a.hi() <= c.hi());
        assert!(c.contains(a.lo()));
    }

    #[test]
    fn complex_mul_contains_product() {
        let a = ComplexInterval::new(iv(0.9, 1.1), iv(-0.1, 0.1));
        let b = ComplexInterval::new(iv(0.4, 0.6), iv(0.4, 0.6));
        let p = a.mul(&b);
        // (1 + 0i)(0.5 + 0.5i) = 0.5 + 0.5i
        assert!(p.re.contains(&d(1, -1)));
        assert!(p.im.contains(&d(1, -1)));
    }

    #[test]
    fn abs_upper_bound() {
        let z = ComplexInterval::new(Interval::from_int(3), Interval::from_int(4));
        let m = z.abs_hi(20);
        assert!(m >= d(5, 0));
        assert!(m <= d(5, 0).add(&Dyadic::pow2(-19)));
    }
}
