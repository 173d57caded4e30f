//! Certified elementary functions on dyadic intervals.
//!
//! Everything here is Taylor series with an explicit Lagrange or
//! alternating-series remainder, plus argument reduction by exact halving.
//! The remainder is added to the interval width, so results are enclosures
//! by construction. Each entry point retries at growing internal precision
//! until the requested output width is met, and fails with
//! [`Error::PrecisionOverflow`] at the configured cap.

use crate::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};
use crate::interval::{ComplexInterval, Interval};
use crate::limits::limits;
use num_bigint::BigInt;
use std::sync::Mutex;

fn precision_schedule(k: i64) -> impl Iterator<Item = i64> {
    let cap = limits().precision_cap;
    (0..).map(move |i| k + 8 + 16 * i).take_while(move |p| *p <= cap)
}

/// Enclosure of `e^x` at a dyadic point, width `<= 2^-k`.
pub fn exp_point(x: &Dyadic, k: i64) -> Result<Interval> {
    if x.is_zero() {
        return Ok(Interval::one());
    }
    for p in precision_schedule(k) {
        let r = exp_point_at(x, p);
        if r.width() <= Dyadic::pow2(-k) {
            return Ok(r);
        }
    }
    Err(Error::PrecisionOverflow)
}

fn exp_point_at(x: &Dyadic, p: i64) -> Interval {
    // Halve until |u| <= 1/2, run the series, square back up.
    let s = x.abs().mag_bits() + 1;
    let u = x.shift(-s);
    let inner_p = p + 2 * s + 4;

    let mut sum = Interval::one();
    let mut term = Interval::one();
    let u_iv = Interval::point(u.clone());
    let mut i: i64 = 1;
    loop {
        term = term.mul(&u_iv).div(&Interval::from_int(i), inner_p + 8).clamp(inner_p + 8);
        sum = sum.add(&term);
        // |R| <= 2 |u|^(i+1) / (i+1)!  for |u| <= 1/2
        let tail = term.abs_hi().mul(&u.abs()).div_round(
            &Dyadic::from_int(i + 1),
            inner_p + 4,
            Round::Up,
        );
        let tail = tail.shift(1).add(&Dyadic::pow2(-(inner_p + 4)));
        if tail <= Dyadic::pow2(-inner_p) {
            sum = sum.widen(&tail);
            break;
        }
        i += 1;
    }
    let mut e = sum;
    for _ in 0..s {
        e = e.mul(&e).clamp(inner_p);
    }
    // exp is positive.
    if e.lo().is_negative() {
        e = Interval::new(Dyadic::zero(), e.hi().clone());
    }
    e
}

/// Enclosure of `e^x` over an interval (monotone in the endpoints).
pub fn exp(x: &Interval, k: i64) -> Result<Interval> {
    let lo = exp_point(x.lo(), k + 2)?;
    let hi = exp_point(x.hi(), k + 2)?;
    Ok(Interval::new(lo.lo().clone(), hi.hi().clone()))
}

/// Simultaneous enclosures of `(sin x, cos x)` at a dyadic point.
pub fn sin_cos_point(x: &Dyadic, k: i64) -> Result<(Interval, Interval)> {
    if x.is_zero() {
        return Ok((Interval::zero(), Interval::one()));
    }
    for p in precision_schedule(k) {
        let (s, c) = sin_cos_point_at(x, p);
        if s.width() <= Dyadic::pow2(-k) && c.width() <= Dyadic::pow2(-k) {
            return Ok((s, c));
        }
    }
    Err(Error::PrecisionOverflow)
}

fn sin_cos_point_at(x: &Dyadic, p: i64) -> (Interval, Interval) {
    let s_count = x.abs().mag_bits() + 1;
    let u = x.shift(-s_count);
    let inner_p = p + 2 * s_count + 6;

    // Alternating Taylor series for |u| <= 1/2; remainder bounded by the
    // first omitted term.
    let u_iv = Interval::point(u.clone());
    let u2 = u_iv.square();

    let mut sin = u_iv.clone();
    let mut term = u_iv.clone();
    let mut n: i64 = 1;
    loop {
        // term *= -u^2 / ((n+1)(n+2)), n odd
        term = term
            .mul(&u2)
            .div(&Interval::from_int((n + 1) * (n + 2)), inner_p + 8)
            .neg()
            .clamp(inner_p + 8);
        n += 2;
        let bound = term.abs_hi();
        if bound <= Dyadic::pow2(-inner_p) {
            sin = sin.widen(&bound);
            break;
        }
        sin = sin.add(&term);
    }

    let mut cos = Interval::one();
    let mut term = Interval::one();
    let mut n: i64 = 0;
    loop {
        term = term
            .mul(&u2)
            .div(&Interval::from_int((n + 1) * (n + 2)), inner_p + 8)
            .neg()
            .clamp(inner_p + 8);
        n += 2;
        let bound = term.abs_hi();
        if bound <= Dyadic::pow2(-inner_p) {
            cos = cos.widen(&bound);
            break;
        }
        cos = cos.add(&term);
    }

    // Double-angle: sin 2a = 2 sin a cos a, cos 2a = 1 - 2 sin^2 a.
    for _ in 0..s_count {
        let s2 = sin.mul(&cos).shift(1).clamp(inner_p);
        let c2 = Interval::one().sub(&sin.square().shift(1)).clamp(inner_p);
        sin = clamp_unit(s2);
        cos = clamp_unit(c2);
    }
    (sin, cos)
}

fn clamp_unit(x: Interval) -> Interval {
    let one = Dyadic::one();
    let neg_one = one.neg();
    let lo = if x.lo() < &neg_one { neg_one.clone() } else { x.lo().clone() };
    let hi = if x.hi() > &one { one } else { x.hi().clone() };
    Interval::new(lo, hi)
}

/// Enclosure of `sin` over an interval: midpoint value widened by the
/// half-width (|sin'| <= 1), clipped to [-1, 1].
pub fn sin(x: &Interval, k: i64) -> Result<Interval> {
    let (s, _) = sin_cos_point(&x.midpoint(), k + 1)?;
    let r = x.width().shift(-1);
    Ok(clamp_unit(s.widen(&r)))
}

/// Enclosure of `cos` over an interval, same scheme as [`sin`].
pub fn cos(x: &Interval, k: i64) -> Result<Interval> {
    let (_, c) = sin_cos_point(&x.midpoint(), k + 1)?;
    let r = x.width().shift(-1);
    Ok(clamp_unit(c.widen(&r)))
}

/// Enclosure of `e^{i theta}` over an interval of angles.
pub fn unit_complex(theta: &Interval, k: i64) -> Result<ComplexInterval> {
    let (s, c) = sin_cos_point(&theta.midpoint(), k + 1)?;
    let r = theta.width().shift(-1);
    Ok(ComplexInterval::new(clamp_unit(c.widen(&r)), clamp_unit(s.widen(&r))))
}

/// Enclosure of `e^{-x^2/2}` over an interval (even, decreasing in |x|).
pub fn exp_neg_half_sq(x: &Interval, k: i64) -> Result<Interval> {
    let a = x.abs();
    // Monotone decreasing in |x|: evaluate at the |x| endpoints.
    let hi = exp_point(&a.lo().square().shift(-1).neg(), k + 2)?;
    let lo = exp_point(&a.hi().square().shift(-1).neg(), k + 2)?;
    let out = Interval::new(
        Dyadic::max(lo.lo(), &Dyadic::zero()),
        Dyadic::min(hi.hi(), &Dyadic::one()),
    );
    Ok(out)
}

/// Enclosure of `e^{-x^2 * num/den}` over an interval, for a positive
/// rational rate. Used for the Gaussian weights `e^{-z^2/(2n)}` and
/// `e^{-t^2/n}`.
pub fn gauss_decay(x: &Interval, rate_num: u64, rate_den: u64, k: i64) -> Result<Interval> {
    assert!(rate_num > 0 && rate_den > 0);
    let a = x.abs();
    let rate = Interval::from_int(rate_num as i64)
        .div(&Interval::from_int(rate_den as i64), k + a.hi().square().mag_bits() + 8);
    let arg_hi = a.lo().square();
    let arg_lo = a.hi().square();
    let hi = exp(&Interval::point(arg_hi).mul(&rate).neg(), k + 2)?;
    let lo = exp(&Interval::point(arg_lo).mul(&rate).neg(), k + 2)?;
    Ok(Interval::new(
        Dyadic::max(lo.lo(), &Dyadic::zero()),
        Dyadic::min(hi.hi(), &Dyadic::one()),
    ))
}

// Cached high-precision constants. The cache keeps the finest enclosure
// computed so far; coarser requests clamp it outward.
struct ConstCache {
    bits: i64,
    value: Option<Interval>,
}

static PI_CACHE: Mutex<ConstCache> = Mutex::new(ConstCache { bits: -1, value: None });
static LN2_CACHE: Mutex<ConstCache> = Mutex::new(ConstCache { bits: -1, value: None });

fn cached_const(
    cache: &Mutex<ConstCache>,
    compute: impl Fn(i64) -> Interval,
    k: i64,
) -> Interval {
    let mut guard = cache.lock().unwrap();
    if guard.bits < k + 2 || guard.value.is_none() {
        let bits = (k + 2).max(64);
        guard.value = Some(compute(bits));
        guard.bits = bits;
    }
    guard.value.as_ref().unwrap().clamp(k + 2)
}

/// Enclosure of pi, width `<= 2^-k`.
pub fn pi(k: i64) -> Interval {
    cached_const(&PI_CACHE, compute_pi, k)
}

fn compute_pi(p: i64) -> Interval {
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239).
    let a5 = atan_inv_int(5, p + 8);
    let a239 = atan_inv_int(239, p + 8);
    a5.scale(&Dyadic::from_int(16)).sub(&a239.scale(&Dyadic::from_int(4)))
}

/// Alternating series for atan(1/m), integer m >= 2.
fn atan_inv_int(m: i64, p: i64) -> Interval {
    let m_big = BigInt::from(m);
    let mut sum = Interval::zero();
    let mut power = m_big.clone(); // m^(2j+1)
    let m2 = &m_big * &m_big;
    let mut j: i64 = 0;
    loop {
        let den = Dyadic::new(&power * BigInt::from(2 * j + 1), 0);
        let term_lo = Dyadic::one().div_round(&den, p + 4, Round::Down);
        let term_hi = Dyadic::one().div_round(&den, p + 4, Round::Up);
        let term = Interval::new(term_lo, term_hi);
        if term.hi() <= &Dyadic::pow2(-p) {
            // Alternating with decreasing terms: remainder within the next term.
            sum = sum.widen(term.hi());
            break;
        }
        if j % 2 == 0 {
            sum = sum.add(&term);
        } else {
            sum = sum.sub(&term);
        }
        power *= &m2;
        j += 1;
    }
    sum
}

/// Enclosure of ln 2.
pub fn ln2(k: i64) -> Interval {
    cached_const(&LN2_CACHE, |p| atanh_small(&rational_interval(1, 3, p + 8), p).shift(1), k)
}

fn rational_interval(num: i64, den: i64, p: i64) -> Interval {
    let n = Dyadic::from_int(num);
    let d = Dyadic::from_int(den);
    Interval::new(n.div_round(&d, p, Round::Down), n.div_round(&d, p, Round::Up))
}

/// atanh on |u| <= 1/3 by its positive series.
fn atanh_small(u: &Interval, p: i64) -> Interval {
    debug_assert!(u.abs_hi() <= rational_interval(1, 3, 20).hi().add(&Dyadic::pow2(-10)));
    let u2 = u.square();
    let mut sum = u.clone();
    let mut term = u.clone();
    let mut j: i64 = 1;
    loop {
        term = term.mul(&u2).clamp(p + 8);
        let add = term.div(&Interval::from_int(2 * j + 1), p + 8);
        // Tail of sum u^(2i+1)/(2i+1) dominated by a geometric series with
        // ratio u^2 <= 1/9: remainder <= next/(1 - 1/9) = next * 9/8.
        let bound = add
            .abs_hi()
            .mul_int(9)
            .div_round(&Dyadic::from_int(8), p + 4, Round::Up)
            .add(&Dyadic::pow2(-(p + 4)));
        if bound <= Dyadic::pow2(-p) {
            sum = sum.widen(&bound);
            break;
        }
        sum = sum.add(&add);
        j += 1;
    }
    sum
}

/// Enclosure of `ln x` over an interval with `lo > 0`.
pub fn ln(x: &Interval, k: i64) -> Result<Interval> {
    if !x.lo().is_positive() {
        return Err(Error::InvalidParams("ln requires a certifiably positive interval"));
    }
    let lo = ln_point(x.lo(), k + 2)?;
    let hi = ln_point(x.hi(), k + 2)?;
    Ok(Interval::new(lo.lo().clone(), hi.hi().clone()))
}

fn ln_point(x: &Dyadic, k: i64) -> Result<Interval> {
    debug_assert!(x.is_positive());
    for p in precision_schedule(k) {
        // Reduce to m in [3/4, 3/2): ln x = ln m + e ln 2.
        let mut e = x.log2_strict_bound();
        let mut m = x.shift(-e);
        let three_quarters = Dyadic::new(BigInt::from(3), -2);
        if m < three_quarters {
            m = m.shift(1);
            e -= 1;
        }
        // ln m = 2 atanh((m-1)/(m+1)), |u| <= 1/5 here.
        let num = Interval::point(m.sub(&Dyadic::one()));
        let den = Interval::point(m.add(&Dyadic::one()));
        let u = num.div(&den, p + 8);
        let ln_m = atanh_small(&u, p).shift(1);
        let r = ln_m.add(&ln2(p).scale(&Dyadic::from_int(e)));
        if r.width() <= Dyadic::pow2(-k) {
            return Ok(r);
        }
    }
    Err(Error::PrecisionOverflow)
}

/// Enclosure of `sin(u)/u`, continuous through zero.
pub fn sinc(u: &Interval, k: i64) -> Result<Interval> {
    if u.abs_hi() <= Dyadic::from_int(2) {
        // Alternating series 1 - u^2/3! + u^4/5! - ...; terms decrease for
        // |u| <= 2.
        let p = k + 8;
        let u2 = u.square();
        let mut sum = Interval::one();
        let mut term = Interval::one();
        let mut j: i64 = 0;
        loop {
            let den = (2 * j + 2) * (2 * j + 3);
            term = term.mul(&u2).div(&Interval::from_int(den), p + 8).neg().clamp(p + 8);
            j += 1;
            let bound = term.abs_hi();
            if bound <= Dyadic::pow2(-p) {
                return Ok(sum.widen(&bound));
            }
            sum = sum.add(&term);
            if j > 64 {
                return Err(Error::PrecisionOverflow);
            }
        }
    }
    let s = sin(u, k + 2)?;
    Ok(s.div(u, k + 2))
}

/// atan on |u| <= 3/4 by the alternating series.
pub fn atan_small(u: &Interval, k: i64) -> Result<Interval> {
    let guard = Dyadic::new(BigInt::from(3), -2);
    if u.abs_hi() > guard {
        return Err(Error::LogBranchCut);
    }
    for p in precision_schedule(k) {
        let mid = Interval::point(u.midpoint());
        let u2 = mid.square();
        let mut sum = mid.clone();
        let mut term = mid.clone();
        let mut j: i64 = 0;
        loop {
            term = term.mul(&u2).neg().clamp(p + 8);
            j += 1;
            let add = term.div(&Interval::from_int(2 * j + 1), p + 8);
            let bound = add.abs_hi().add(&Dyadic::pow2(-(p + 4)));
            if bound <= Dyadic::pow2(-p) {
                sum = sum.widen(&bound);
                break;
            }
            sum = sum.add(&add);
        }
        // |atan'| = 1/(1+u^2) <= 1 on the rest of the input interval.
        let r = sum.widen(&u.width().shift(-1));
        if r.width() <= Dyadic::pow2(-k).add(&u.width()) {
            return Ok(r);
        }
    }
    Err(Error::PrecisionOverflow)
}

/// Principal-branch complex logarithm for enclosures in the right
/// half-plane with small argument. Fails with [`Error::LogBranchCut`]
/// when the enclosure leaves the guarded sector.
pub fn complex_log_principal(z: &ComplexInterval, k: i64) -> Result<ComplexInterval> {
    if !z.re.lo().is_positive() {
        return Err(Error::LogBranchCut);
    }
    let modulus = z.abs(k + 4);
    let re = ln(&modulus, k)?;
    let ratio = z.im.div(&z.re, k + z.im.abs_hi().mag_bits() + 8);
    let im = atan_small(&ratio, k)?;
    Ok(ComplexInterval::new(re, im))
}
