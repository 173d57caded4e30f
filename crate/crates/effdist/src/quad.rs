//! Rigorous integration with certified error bounds.
//!
//! Finite intervals are handled by interval-valued Riemann sums: each cell
//! contributes `f(cell) * width(cell)`, which encloses the exact integral
//! because the cell enclosure brackets the integrand's range. Cell counts
//! start from a Lipschitz estimate and double until the requested width is
//! met. Integrals over the whole line split into a certified core plus an
//! analytic tail bound taken from the integrand's envelope.
//!
//! Piecewise-linear integrands against `e^{izx}` additionally get exact
//! per-segment antiderivatives ([`osc_integral`], [`fourier_window`]); plain
//! Riemann sums cannot reach the required precisions for large `|z|`.

use crate::dyadic::{Dyadic, Round};
use crate::elem;
use crate::error::{Error, Result};
use crate::interval::{ComplexInterval, Interval};
use crate::limits::limits;
use crate::testfn::TestFunction;
use num_bigint::BigInt;
use std::sync::Arc;

/// Analytic decay bound used for tail truncation.
#[derive(Clone, Debug)]
pub enum Envelope {
    /// `|f| <= bound`, `f = 0` outside `[-radius, radius]`.
    CompactConst { bound: Dyadic, radius: Dyadic },
    /// `|f(x)| <= scale * e^{-x^2 / (2 sigma2)}` with `sigma2 = num/den`.
    Gaussian { scale: Dyadic, sigma2_num: u64, sigma2_den: u64 },
}

impl Envelope {
    pub fn gaussian_std(scale: Dyadic) -> Self {
        Envelope::Gaussian { scale, sigma2_num: 1, sigma2_den: 1 }
    }

    fn is_vacuous(&self) -> bool {
        match self {
            Envelope::CompactConst { bound, .. } => bound.is_zero(),
            Envelope::Gaussian { scale, .. } => scale.is_zero(),
        }
    }

    /// Certified upper bound on the mass outside `[-m, m]`.
    pub fn tail_bound(&self, m: u32, k: i64) -> Result<Dyadic> {
        match self {
            Envelope::CompactConst { bound, radius } => {
                if bound.is_zero() || radius <= &Dyadic::from_int(m as i64) {
                    Ok(Dyadic::zero())
                } else {
                    // No decay information beyond the support bound.
                    let len = radius.sub(&Dyadic::from_int(m as i64)).shift(1);
                    Ok(bound.mul(&len))
                }
            }
            Envelope::Gaussian { scale, sigma2_num, sigma2_den } => {
                if scale.is_zero() {
                    return Ok(Dyadic::zero());
                }
                // integral_{|t|>m} scale e^{-t^2/(2 s2)} dt
                //   <= scale * sigma * sqrt(2 pi) * e^{-m^2/(2 s2)}
                let p = k + 8;
                let sigma2 = Interval::from_int(*sigma2_num as i64)
                    .div(&Interval::from_int(*sigma2_den as i64), p);
                let sigma_hi = sigma2.hi().sqrt_round(p, Round::Up);
                let two_pi = elem::pi(p).shift(1);
                let sqrt_2pi_hi = two_pi.hi().sqrt_round(p, Round::Up);
                let m2 = Dyadic::from_int(m as i64).square();
                let exponent = Interval::point(m2).div(&sigma2.shift(1), p).neg();
                let decay = elem::exp(&exponent, p)?;
                Ok(scale.mul(&sigma_hi).mul(&sqrt_2pi_hi).mul(decay.hi()))
            }
        }
    }
}

/// A complex-valued integrand as a certified cell evaluator.
///
/// `eval(x, k)` must enclose the image of the cell `x`, with truncation
/// width (beyond the image's own variation) vanishing as `k` grows.
#[derive(Clone)]
pub struct Integrand {
    eval: Arc<dyn Fn(&Interval, i64) -> Result<ComplexInterval> + Send + Sync>,
    lip: Arc<dyn Fn(&Dyadic, &Dyadic) -> Dyadic + Send + Sync>,
    envelope: Option<Envelope>,
}

impl Integrand {
    pub fn new(
        eval: impl Fn(&Interval, i64) -> Result<ComplexInterval> + Send + Sync + 'static,
        lip: impl Fn(&Dyadic, &Dyadic) -> Dyadic + Send + Sync + 'static,
        envelope: Option<Envelope>,
    ) -> Self {
        Integrand { eval: Arc::new(eval), lip: Arc::new(lip), envelope }
    }

    pub fn new_real(
        eval: impl Fn(&Interval, i64) -> Result<Interval> + Send + Sync + 'static,
        lip: impl Fn(&Dyadic, &Dyadic) -> Dyadic + Send + Sync + 'static,
        envelope: Option<Envelope>,
    ) -> Self {
        Integrand::new(move |x, k| Ok(ComplexInterval::real(eval(x, k)?)), lip, envelope)
    }

    /// The test function itself as an integrand (exact evaluation).
    pub fn from_testfn(f: &TestFunction) -> Self {
        let g = f.clone();
        let lip = f.lip().clone();
        let envelope =
            Envelope::CompactConst { bound: f.sup_norm().clone(), radius: f.support_radius() };
        Integrand::new(
            move |x, _| Ok(ComplexInterval::real(g.eval(x))),
            move |_, _| lip.clone(),
            Some(envelope),
        )
    }

    /// `scale * e^{-x^2/(2 sigma2)}` with an exact dyadic scale.
    pub fn gaussian(scale: Dyadic, sigma2_num: u64, sigma2_den: u64) -> Self {
        let s = scale.clone();
        let hint = scale.abs();
        Integrand::new(
            move |x, k| {
                // rate = 1/(2 sigma2) = den/(2 num)
                let g = elem::gauss_decay(x, sigma2_den, 2 * sigma2_num, k)?;
                Ok(ComplexInterval::real(g.scale(&s)))
            },
            move |_, _| hint.clone(),
            Some(Envelope::Gaussian { scale, sigma2_num, sigma2_den }),
        )
    }

    pub fn envelope(&self) -> Option<&Envelope> {
        self.envelope.as_ref()
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = Some(envelope);
        self
    }

    pub fn eval(&self, x: &Interval, k: i64) -> Result<ComplexInterval> {
        (self.eval)(x, k)
    }

    pub fn lip_on(&self, a: &Dyadic, b: &Dyadic) -> Dyadic {
        (self.lip)(a, b)
    }
}

/// Certified enclosure of the integral of `f` over `[a, b]`, width `<= 2^-k`
/// per component.
pub fn integrate_finite(f: &Integrand, a: &Dyadic, b: &Dyadic, k: i64) -> Result<ComplexInterval> {
    assert!(a <= b, "integration bounds out of order");
    if a == b {
        return Ok(ComplexInterval::zero());
    }
    let range = b.sub(a);
    let target = Dyadic::pow2(-k);

    // Initial dyadic cell count 2^j from the Lipschitz hint:
    // Riemann error <= lip * cell_width * range.
    let lip = f.lip_on(a, b);
    let mut j: u32 = 0;
    if !lip.is_zero() {
        let need = lip.mul(&range).mul(&range).shift(k + 1);
        j = need.ceil_int().bits().min(40) as u32;
    }

    let max_cells = limits().max_cells;
    loop {
        let cells: u64 = 1u64 << j.min(62);
        if cells > max_cells {
            return Err(Error::PrecisionOverflow);
        }
        // Truncation budget: cells * 2^-p * cell_width covers 2^-(k+2) total.
        let p = k + 4 + range.mag_bits();
        let dx = range.shift(-(j as i64));
        let mut sum = ComplexInterval::zero();
        let mut ok = true;
        let mut x0 = a.clone();
        for i in 0..cells {
            let x1 = if i + 1 == cells { b.clone() } else { x0.add(&dx) };
            let cell = Interval::new(x0.clone(), x1.clone());
            let v = f.eval(&cell, p)?;
            sum = sum.add(&v.mul_real(&Interval::point(dx.clone())));
            if sum.width() > target {
                ok = false;
                break;
            }
            x0 = x1;
        }
        if ok && sum.width() <= target {
            return Ok(sum);
        }
        j += 1;
    }
}

/// Smallest window index `m` with a certified
/// `integral |f| w_m^c dx < 2^-k`, from the envelope's closed-form tail.
pub fn tail_cutoff(f: &Integrand, k: i64) -> Result<u32> {
    let env = f.envelope().ok_or(Error::UnsupportedEnvelope)?;
    if env.is_vacuous() {
        return Ok(0);
    }
    if let Envelope::CompactConst { radius, .. } = env {
        // w_m^c vanishes on [-m, m] covering the support.
        let m = radius.ceil_int();
        let m: u32 = m.try_into().map_err(|_| Error::BudgetExhausted("tail cutoff"))?;
        return Ok(m);
    }
    let cap = limits().tightness_cap;
    for m in 0..=cap {
        if env.tail_bound(m, k + 4)? < Dyadic::pow2(-k) {
            return Ok(m);
        }
    }
    Err(Error::BudgetExhausted("tail cutoff"))
}

/// Certified enclosure of the integral of `f` over the whole line:
/// certified core over `[-(m+1), m+1]` plus the envelope's analytic tail,
/// width `<= 2^-k` per component.
pub fn integrate_r(f: &Integrand, k: i64) -> Result<ComplexInterval> {
    let m = tail_cutoff(f, k + 2)?;
    let bound = Dyadic::from_int(m as i64 + 1);
    let core = integrate_finite(f, &bound.neg(), &bound, k + 1)?;
    // chi_{|x| >= m+1} <= w_m^c, so the remaining mass is below 2^-(k+2)
    // and may shift each component by at most that much.
    Ok(core.widen(&Dyadic::pow2(-(k + 2))))
}

// ---------------------------------------------------------------------------
// Oscillatory integrals of piecewise-linear data
// ---------------------------------------------------------------------------

/// A piecewise-linear, possibly discontinuous function with exact dyadic
/// data: value `c0 + c1 x` on `[x0, x1]`.
#[derive(Clone, Debug)]
pub struct PwLinear {
    segs: Vec<Segment>,
}

#[derive(Clone, Debug)]
struct Segment {
    x0: Dyadic,
    x1: Dyadic,
    c0: Dyadic,
    c1: Dyadic,
}

impl PwLinear {
    pub fn from_testfn(f: &TestFunction) -> Self {
        let mut segs = Vec::new();
        for (w, slope) in f.breakpoints().windows(2).zip(f.slopes()) {
            let (x0, y0) = &w[0];
            let (x1, _) = &w[1];
            segs.push(Segment {
                x0: x0.clone(),
                x1: x1.clone(),
                c0: y0.sub(&slope.mul(x0)),
                c1: slope.clone(),
            });
        }
        PwLinear { segs }
    }

    /// Product of a test function with a piecewise-constant density given as
    /// `(x0, x1, value)` pieces; the result is supported on the intersection.
    pub fn window_times_pw_const(f: &TestFunction, pieces: &[(Dyadic, Dyadic, Dyadic)]) -> Self {
        let window = PwLinear::from_testfn(f);
        let mut segs = Vec::new();
        for (p0, p1, value) in pieces {
            for seg in &window.segs {
                let x0 = Dyadic::max(&seg.x0, p0);
                let x1 = Dyadic::min(&seg.x1, p1);
                if x0 < x1 {
                    segs.push(Segment {
                        x0,
                        x1,
                        c0: seg.c0.mul(value),
                        c1: seg.c1.mul(value),
                    });
                }
            }
        }
        PwLinear { segs }
    }

    pub fn is_zero(&self) -> bool {
        self.segs.is_empty()
    }

    /// Segments as `(x0, x1, c0, c1)`.
    pub fn segments(&self) -> impl Iterator<Item = (&Dyadic, &Dyadic, &Dyadic, &Dyadic)> {
        self.segs.iter().map(|s| (&s.x0, &s.x1, &s.c0, &s.c1))
    }

    /// `max |x|` over the support.
    pub fn radius(&self) -> Dyadic {
        let mut r = Dyadic::zero();
        for s in &self.segs {
            r = Dyadic::max(&r, &Dyadic::max(&s.x0.abs(), &s.x1.abs()));
        }
        r
    }

    /// Upper bound on the L1 norm (trapezoid sum of endpoint values;
    /// |linear| is convex, so the trapezoid dominates segment by segment).
    pub fn l1_upper(&self) -> Dyadic {
        let mut total = Dyadic::zero();
        for s in &self.segs {
            let y0 = s.c0.add(&s.c1.mul(&s.x0)).abs();
            let y1 = s.c0.add(&s.c1.mul(&s.x1)).abs();
            total = total.add(&y0.add(&y1).shift(-1).mul(&s.x1.sub(&s.x0)));
        }
        total
    }

    /// Moment `integral x^m pw(x) dx`; division by the small integer
    /// exponents is the only rounding.
    fn moment(&self, m: u32, p: i64) -> Interval {
        let mut total = Interval::zero();
        for s in &self.segs {
            let pow0 = dyadic_pow(&s.x0, m + 1);
            let pow1 = dyadic_pow(&s.x1, m + 1);
            let t0 = Interval::point(pow1.sub(&pow0)).div(&Interval::from_int(m as i64 + 1), p);
            let pow0 = pow0.mul(&s.x0);
            let pow1 = pow1.mul(&s.x1);
            let t1 = Interval::point(pow1.sub(&pow0)).div(&Interval::from_int(m as i64 + 2), p);
            total = total.add(&t0.scale(&s.c0)).add(&t1.scale(&s.c1));
        }
        total
    }
}

fn dyadic_pow(x: &Dyadic, n: u32) -> Dyadic {
    let mut acc = Dyadic::one();
    for _ in 0..n {
        acc = acc.mul(x);
    }
    acc
}

/// `1/(iz) = -i/z` as a complex box, for a real interval `z` avoiding zero.
fn inv_iz(z: &Interval, p: i64) -> ComplexInterval {
    ComplexInterval::new(Interval::zero(), z.recip(p).neg())
}

/// Enclosure of `integral pw(x) e^{izx} dx` for a real interval `z`.
///
/// Uses the exact segment antiderivative
/// `(c0 + c1 x) e^{izx}/(iz) + c1 e^{izx}/z^2` away from `z = 0` and the
/// entire-function Taylor expansion through exact moments near `z = 0`.
pub fn osc_integral(pw: &PwLinear, z: &Interval, k: i64) -> Result<ComplexInterval> {
    if pw.is_zero() {
        return Ok(ComplexInterval::zero());
    }
    let quarter = Dyadic::pow2(-2);
    if !z.contains(&Dyadic::zero()) && z.abs().lo() >= &quarter {
        osc_integral_segments(pw, z, k)
    } else {
        osc_integral_taylor(pw, z, k)
    }
}

fn osc_integral_segments(pw: &PwLinear, z: &Interval, k: i64) -> Result<ComplexInterval> {
    let p = k + 8 + pw.radius().mag_bits() + pw.l1_upper().mag_bits();
    let inv = inv_iz(z, p);
    let inv2 = z.square().recip(p);
    let mut total = ComplexInterval::zero();
    for s in &pw.segs {
        let boundary = |x: &Dyadic| -> Result<ComplexInterval> {
            let phase = elem::unit_complex(&z.scale(x), p)?;
            let linear = s.c0.add(&s.c1.mul(x));
            let term1 = phase.scale(&linear).mul(&inv);
            let term2 = phase.scale(&s.c1).mul_real(&inv2);
            Ok(term1.add(&term2))
        };
        total = total.add(&boundary(&s.x1)?.sub(&boundary(&s.x0)?));
        total = total.clamp(p);
    }
    Ok(total)
}

fn osc_integral_taylor(pw: &PwLinear, z: &Interval, k: i64) -> Result<ComplexInterval> {
    let r = pw.radius();
    let l1 = pw.l1_upper();
    let p = k + 8;
    // e^{|z| r} <= 2^{2 (ceil(|z| r) + 1)} as a crude remainder factor.
    let zr = z.abs_hi().mul(&r);
    let exp_factor = Dyadic::pow2((2 * (zr.ceil_int().bits() as i64 + 1)).min(60));

    let iz = ComplexInterval::new(Interval::zero(), z.clone());
    let mut acc = ComplexInterval::zero();
    let mut pw_m = ComplexInterval::one(); // (iz)^m / m!
    // Exact remainder tracking: (|z| r)^m / m!, kept separate from the
    // clamped iterate so the bound keeps shrinking.
    let mut zr_pow = Dyadic::one();
    let mut factorial = BigInt::from(1);
    for m in 0..200u32 {
        let term = pw_m.mul_real(&pw.moment(m, p + 8));
        acc = acc.add(&term).clamp(p + 8);
        pw_m = pw_m
            .mul(&iz)
            .mul_real(&Interval::from_int(m as i64 + 1).recip(p + 8))
            .clamp(p + 8);
        zr_pow = zr_pow.mul(&zr);
        factorial *= m as i64 + 1;
        // Remainder: l1 * sum_{j>m} (|z| r)^j / j!
        //          <= l1 (|z| r)^{m+1} / (m+1)! * e^{|z| r}.
        let tail = l1
            .mul(&zr_pow)
            .mul(&exp_factor)
            .div_round(&Dyadic::new(factorial.clone(), 0), p + 2, Round::Up);
        if tail <= Dyadic::pow2(-p) {
            return Ok(acc.widen(&tail.add(&Dyadic::pow2(-p))));
        }
    }
    Err(Error::PrecisionOverflow)
}

/// Enclosure of `integral f(y) e^{izy} dy` for a continuous piecewise-linear
/// test function, via the slope-jump identity
/// `-(1/z^2) * sum_j ds_j e^{iz y_j}` away from zero. The identity also
/// gives the certified decay bound `|integral| <= V / z^2` with
/// `V = sum |ds_j|`.
pub fn fourier_window(f: &TestFunction, z: &Interval, k: i64) -> Result<ComplexInterval> {
    if f.is_zero() {
        return Ok(ComplexInterval::zero());
    }
    let quarter = Dyadic::pow2(-2);
    if z.contains(&Dyadic::zero()) || z.abs().lo() < &quarter {
        return osc_integral_taylor(&PwLinear::from_testfn(f), z, k);
    }
    let p = k + 8 + f.support_radius().mag_bits() + 2;
    let inv2 = z.square().recip(p).neg();
    let mut sum = ComplexInterval::zero();
    for (y, jump) in f.slope_jumps() {
        let phase = elem::unit_complex(&z.scale(&y), p)?;
        sum = sum.add(&phase.scale(&jump));
    }
    Ok(sum.mul_real(&inv2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    fn identity() -> Integrand {
        Integrand::new_real(|x, _| Ok(x.clone()), |_, _| Dyadic::one(), None)
    }

    #[test]
    fn integral_of_x_on_unit_interval() {
        let r = integrate_finite(&identity(), &Dyadic::zero(), &Dyadic::one(), 6).unwrap();
        assert!(r.re.contains(&d(1, -1)));
        assert!(r.re.width() <= Dyadic::pow2(-6));
        assert!(r.im.contains(&Dyadic::zero()));
    }

    #[test]
    fn integral_of_window_triangle() {
        let f = Integrand::from_testfn(&TestFunction::window(0));
        let r = integrate_finite(&f, &Dyadic::from_int(-1), &Dyadic::one(), 8).unwrap();
        assert!(r.re.contains(&Dyadic::one()));
    }

    #[test]
    fn complex_exponential_on_unit_interval() {
        // integral_0^1 e^{ix} dx = sin 1 + i (1 - cos 1)
        let f = Integrand::new(|x, k| elem::unit_complex(x, k), |_, _| Dyadic::one(), None);
        let r = integrate_finite(&f, &Dyadic::zero(), &Dyadic::one(), 8).unwrap();
        let sin1 = 1.0f64.sin();
        let cos1 = 1.0f64.cos();
        assert!(r.re.lo().to_f64() <= sin1 && sin1 <= r.re.hi().to_f64());
        assert!(r.im.lo().to_f64() <= 1.0 - cos1 && 1.0 - cos1 <= r.im.hi().to_f64());
    }

    #[test]
    fn additivity_of_subdivided_integrals() {
        let f = Integrand::from_testfn(&TestFunction::window(1));
        let a = Dyadic::from_int(-2);
        let b = Dyadic::zero();
        let c = Dyadic::from_int(2);
        let left = integrate_finite(&f, &a, &b, 8).unwrap();
        let right = integrate_finite(&f, &b, &c, 8).unwrap();
        let whole = integrate_finite(&f, &a, &c, 7).unwrap();
        assert!(left.add(&right).re.intersects(&whole.re));
    }

    #[test]
    fn tail_cutoff_examples() {
        // Compact support: m = ceil(c).
        let f = Integrand::from_testfn(&TestFunction::window(2));
        assert_eq!(tail_cutoff(&f, 10).unwrap(), 3);

        // Standard Gaussian envelope at k = 4: sqrt(2 pi) e^{-m^2/2} < 2^-4
        // first at m = 3.
        let g = Integrand::gaussian(Dyadic::one(), 1, 1);
        assert_eq!(tail_cutoff(&g, 4).unwrap(), 3);

        // Zero scale.
        let z = Integrand::gaussian(Dyadic::zero(), 1, 1);
        assert_eq!(tail_cutoff(&z, 12).unwrap(), 0);

        let none = identity();
        assert!(matches!(tail_cutoff(&none, 3), Err(Error::UnsupportedEnvelope)));
    }

    #[test]
    fn normalized_gaussian_has_unit_mass() {
        // (1/sqrt(2 pi)) e^{-t^2/2}: certified scale inside the evaluator,
        // exact dyadic upper bound for the envelope.
        let scale_iv = elem::pi(40).shift(1).sqrt(40).recip(40);
        let f = Integrand::new_real(
            move |x, k| {
                let g = elem::exp_neg_half_sq(x, k)?;
                Ok(g.mul(&scale_iv))
            },
            |_, _| Dyadic::one(),
            Some(Envelope::gaussian_std(d(1, -1))), // 0.5 >= 1/sqrt(2 pi)
        );
        let r = integrate_r(&f, 6).unwrap();
        assert!(r.re.contains(&Dyadic::one()), "got {:?}", r.re);
        assert!(r.re.width() <= Dyadic::pow2(-6));
    }

    #[test]
    fn window_mass_on_line() {
        let f = Integrand::from_testfn(&TestFunction::window(1));
        let r = integrate_r(&f, 8).unwrap();
        assert!(r.re.contains(&d(3, 0)));
    }

    #[test]
    fn gauss_cos_integral() {
        // integral e^{-t^2/2} cos t dt = sqrt(2 pi) e^{-1/2}
        let f = Integrand::new(
            |x, k| {
                let g = elem::exp_neg_half_sq(x, k)?;
                let c = elem::cos(x, k)?;
                Ok(ComplexInterval::real(g.mul(&c)))
            },
            |_, _| Dyadic::from_int(2),
            Some(Envelope::gaussian_std(Dyadic::one())),
        );
        let r = integrate_r(&f, 8).unwrap();
        let reference = (2.0 * std::f64::consts::PI).sqrt() * (-0.5f64).exp();
        assert!(r.re.lo().to_f64() <= reference && reference <= r.re.hi().to_f64());
    }

    #[test]
    fn effective_dominated_convergence() {
        // g_n(x) = e^{-x^2/2} x / n -> 0 with common envelope
        // 0.875 e^{-x^2/4}; past the analytic threshold the integrals are
        // certifiably small.
        let k = 6i64;
        // |integral g_n| <= (1/n) integral |x| e^{-x^2/2} = 2/n < 2^-k for n > 2^{k+1}.
        let n = (1i64 << (k + 1)) + 1;
        let g = Integrand::new_real(
            move |x, kk| {
                let e = elem::exp_neg_half_sq(x, kk)?;
                Ok(e.mul(x).div(&Interval::from_int(n), kk + 4))
            },
            |_, _| Dyadic::one(),
            Some(Envelope::Gaussian { scale: d(7, -3), sigma2_num: 2, sigma2_den: 1 }),
        );
        let r = integrate_r(&g, k).unwrap();
        let bound = Dyadic::pow2(-k).mul_int(3);
        assert!(r.re.abs_hi() <= bound, "dominated convergence gap too large: {:?}", r.re);
    }

    #[test]
    fn osc_integral_matches_riemann() {
        // Dual-route check: exact antiderivative vs plain Riemann cells.
        let w1 = TestFunction::window(1);
        let pw = PwLinear::from_testfn(&w1);
        for zi in [1i64, 3, -2, 11] {
            let z = Interval::from_int(zi);
            let closed = osc_integral(&pw, &z, 10).unwrap();
            let f = Integrand::new(
                move |x, k| {
                    let w = TestFunction::window(1).eval(x);
                    let e = elem::unit_complex(&x.scale(&Dyadic::from_int(zi)), k)?;
                    Ok(e.mul_real(&w))
                },
                move |_, _| Dyadic::from_int(1 + zi.abs()),
                None,
            );
            let riemann =
                integrate_finite(&f, &Dyadic::from_int(-2), &Dyadic::from_int(2), 8).unwrap();
            assert!(closed.intersects(&riemann), "mismatch at z={zi}: {closed:?} vs {riemann:?}");
        }
    }

    #[test]
    fn osc_integral_taylor_branch_matches() {
        let w0 = TestFunction::window(0);
        let pw = PwLinear::from_testfn(&w0);
        let z = Interval::point(d(1, -3)); // 1/8, takes the Taylor branch
        let v = osc_integral(&pw, &z, 12).unwrap();
        // Reference: integral w_0 e^{izx} dx = (2 - 2 cos z)/z^2 at z = 1/8.
        let zf = 0.125f64;
        let reference = (2.0 - 2.0 * zf.cos()) / (zf * zf);
        assert!(v.re.lo().to_f64() <= reference && reference <= v.re.hi().to_f64());
        assert!(v.im.contains(&Dyadic::zero()));
    }

    #[test]
    fn fourier_window_identity_and_decay() {
        let w0 = TestFunction::window(0);
        for zi in [2i64, 5, -7] {
            let z = Interval::from_int(zi);
            let v = fourier_window(&w0, &z, 12).unwrap();
            let zf = zi as f64;
            let reference = (2.0 - 2.0 * zf.cos()) / (zf * zf);
            assert!(
                v.re.lo().to_f64() - 1e-6 <= reference && reference <= v.re.hi().to_f64() + 1e-6,
                "z={zi}: {v:?} vs {reference}"
            );
            // Certified decay: |value| <= V/z^2 + slack.
            let decay = w0
                .slope_jump_variation()
                .div_round(&Dyadic::from_int(zi * zi), 20, Round::Up);
            assert!(v.abs_hi(20) <= decay.add(&Dyadic::pow2(-8)));
        }
    }

    #[test]
    fn window_times_density_mass() {
        // uniform density 1 on [-1/2, 1/2] under window w_0:
        // integral (1 - |x|) dx over [-1/2, 1/2] = 3/4.
        let pieces = vec![(d(-1, -1), d(1, -1), Dyadic::one())];
        let pw = PwLinear::window_times_pw_const(&TestFunction::window(0), &pieces);
        let v = osc_integral(&pw, &Interval::zero(), 12).unwrap();
        assert!(v.re.contains(&d(3, -2)), "got {:?}", v.re);
    }
}
