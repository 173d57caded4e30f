//! Probability distributions as certified evaluation oracles.
//!
//! A [`DistOracle`] answers one kind of question: enclose the windowed
//! expectation `mu(f(x) e^{itx})` to a requested precision, for a
//! compactly supported piecewise-linear window `f` and a real frequency
//! `t`. That single interface carries everything downstream: tightness
//! searches, characteristic functions, and the convergence transfers.

use crate::dyadic::Dyadic;
use crate::elem;
use crate::error::{Error, Result};
use crate::interval::{ComplexInterval, Interval};
use crate::limits::limits;
use crate::quad::{self, Envelope, Integrand, PwLinear};
use crate::real::RealOracle;
use crate::testfn::TestFunction;
use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

/// Frequency argument of a windowed expectation: exact dyadic or a
/// computable real.
#[derive(Clone, Debug)]
pub enum Freq {
    Dyadic(Dyadic),
    Real(RealOracle),
}

impl Freq {
    pub fn zero() -> Self {
        Freq::Dyadic(Dyadic::zero())
    }

    pub fn enclose(&self, k: i64) -> Interval {
        match self {
            Freq::Dyadic(d) => Interval::point(d.clone()),
            Freq::Real(r) => r.eval(k),
        }
    }
}

impl From<Dyadic> for Freq {
    fn from(d: Dyadic) -> Self {
        Freq::Dyadic(d)
    }
}

/// Atoms `(position, weight)` with weights certifiably summing to 1.
#[derive(Clone)]
pub struct AtomList {
    atoms: Vec<(RealOracle, RealOracle)>,
}

impl AtomList {
    pub fn new(atoms: Vec<(RealOracle, RealOracle)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidWeights);
        }
        let k = 10 + 2 * atoms.len() as i64;
        let mut total = Interval::zero();
        for (_, w) in &atoms {
            let wi = w.eval(k);
            if wi.hi().is_negative() {
                return Err(Error::InvalidWeights);
            }
            total = total.add(&wi);
        }
        if !total.contains(&Dyadic::one()) {
            return Err(Error::InvalidWeights);
        }
        Ok(AtomList { atoms })
    }

    pub fn atoms(&self) -> &[(RealOracle, RealOracle)] {
        &self.atoms
    }
}

/// How the oracle is realized; exposed for introspection only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistKind {
    PointMass,
    FiniteDiscrete,
    Density,
    Custom,
}

#[derive(Clone)]
enum DistImpl {
    PointMass(RealOracle),
    FiniteDiscrete(AtomList),
    DensityPwConst(Vec<(Dyadic, Dyadic, Dyadic)>),
    DensityGeneral(Integrand),
    Custom(Arc<dyn Fn(&TestFunction, &Freq, i64) -> Result<ComplexInterval> + Send + Sync>),
}

/// A probability distribution as an evaluator of windowed expectations
/// `mu(f(x) e^{itx})` with certified width `<= 2^-k` per component.
#[derive(Clone)]
pub struct DistOracle {
    kind: DistKind,
    imp: DistImpl,
}

impl DistOracle {
    /// The Dirac mass at a computable point.
    pub fn point_mass(a: RealOracle) -> Self {
        DistOracle { kind: DistKind::PointMass, imp: DistImpl::PointMass(a) }
    }

    pub fn point_mass_at(a: Dyadic) -> Self {
        DistOracle::point_mass(RealOracle::from_dyadic(a))
    }

    pub fn finite_discrete(atoms: AtomList) -> Self {
        DistOracle { kind: DistKind::FiniteDiscrete, imp: DistImpl::FiniteDiscrete(atoms) }
    }

    /// Binomial with `m` trials and exact rational success probability.
    pub fn binomial(m: u32, p_num: BigInt, p_den: BigInt) -> Result<Self> {
        if p_den.is_zero() || p_num.is_negative() || p_num > p_den {
            return Err(Error::InvalidParams("binomial probability must lie in [0, 1]"));
        }
        let q_num = &p_den - &p_num;
        let mut atoms = Vec::with_capacity(m as usize + 1);
        let den_pow = num_traits::pow(p_den.clone(), m as usize);
        for l in 0..=m {
            let c = binomial(BigInt::from(m), BigInt::from(l));
            let w = c * num_traits::pow(p_num.clone(), l as usize)
                * num_traits::pow(q_num.clone(), (m - l) as usize);
            atoms.push((
                RealOracle::from_int(l as i64),
                RealOracle::from_ratio(w, den_pow.clone())?,
            ));
        }
        Ok(DistOracle::finite_discrete(AtomList::new(atoms)?))
    }

    /// Distribution with an exact piecewise-constant density
    /// (`(x0, x1, value)` pieces). The pieces must be nonnegative and have
    /// total mass exactly 1.
    pub fn density_pw_const(pieces: Vec<(Dyadic, Dyadic, Dyadic)>) -> Result<Self> {
        let mut mass = Dyadic::zero();
        for (x0, x1, v) in &pieces {
            if x1 <= x0 {
                return Err(Error::InvalidParams("density pieces must have positive length"));
            }
            if v.is_negative() {
                return Err(Error::NegativityViolation);
            }
            mass = mass.add(&v.mul(&x1.sub(x0)));
        }
        if mass != Dyadic::one() {
            return Err(Error::NotNormalized);
        }
        Ok(DistOracle { kind: DistKind::Density, imp: DistImpl::DensityPwConst(pieces) })
    }

    /// The uniform distribution on `[-a, a]` for dyadic `a > 0`.
    pub fn uniform_symmetric(a: Dyadic) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidParams("uniform half-width must be positive"));
        }
        let height_num = Dyadic::one();
        // 1/(2a) must be dyadic for an exact density; this holds for the
        // dyadic widths used throughout (2^-m etc.). Otherwise reject.
        let two_a = a.shift(1);
        if !two_a.mantissa().is_one() && !two_a.mantissa().abs().is_one() {
            return Err(Error::InvalidParams(
                "uniform half-width must be a power of two for an exact density",
            ));
        }
        let height = height_num.shift(-two_a.exponent());
        DistOracle::density_pw_const(vec![(a.neg(), a, height)])
    }

    /// Distribution with a general certified density. The density must carry
    /// an envelope; its integral is certified to enclose 1 at construction,
    /// and a sign spot-check guards against negative enclosures.
    pub fn density_general(d: Integrand) -> Result<Self> {
        let mass = quad::integrate_r(&d, 6)?;
        if !mass.re.contains(&Dyadic::one()) {
            return Err(Error::NotNormalized);
        }
        // Spot-check nonnegativity on a coarse grid.
        for j in -16..=16i64 {
            let x = Interval::point(Dyadic::new(BigInt::from(j), -1));
            if d.eval(&x, 8)?.re.hi().is_negative() {
                return Err(Error::NegativityViolation);
            }
        }
        Ok(DistOracle { kind: DistKind::Density, imp: DistImpl::DensityGeneral(d) })
    }

    /// An oracle backed by a caller-supplied evaluator; used by the
    /// characteristic-function inversion path.
    pub fn custom(
        eval: impl Fn(&TestFunction, &Freq, i64) -> Result<ComplexInterval> + Send + Sync + 'static,
    ) -> Self {
        DistOracle { kind: DistKind::Custom, imp: DistImpl::Custom(Arc::new(eval)) }
    }

    pub fn kind(&self) -> DistKind {
        self.kind
    }

    /// Enclosure of `mu(f(x) e^{itx})` with width `<= 2^-k` per component.
    pub fn windowed_eval(&self, f: &TestFunction, t: &Freq, k: i64) -> Result<ComplexInterval> {
        if f.is_zero() {
            return Ok(ComplexInterval::zero());
        }
        match &self.imp {
            DistImpl::PointMass(a) => {
                let mut p = k + 3;
                loop {
                    let a_iv = a.eval(p);
                    let t_iv = t.enclose(p);
                    let val = f.eval(&a_iv);
                    let phase = elem::unit_complex(&t_iv.mul(&a_iv), p)?;
                    let out = phase.mul_real(&val);
                    if out.width() <= Dyadic::pow2(-k) {
                        return Ok(out);
                    }
                    p += 8;
                    if p > limits().precision_cap {
                        return Err(Error::PrecisionOverflow);
                    }
                }
            }
            DistImpl::FiniteDiscrete(atoms) => {
                let n = atoms.atoms.len() as i64;
                let kk = k + 1 + (64 - (n as u64).leading_zeros()) as i64;
                let mut total = ComplexInterval::zero();
                for (pos, w) in &atoms.atoms {
                    let mut p = kk + 3;
                    loop {
                        let pos_iv = pos.eval(p);
                        let w_iv = w.eval(p);
                        let t_iv = t.enclose(p);
                        let val = f.eval(&pos_iv).mul(&w_iv);
                        let phase = elem::unit_complex(&t_iv.mul(&pos_iv), p)?;
                        let term = phase.mul_real(&val);
                        if term.width() <= Dyadic::pow2(-kk) {
                            total = total.add(&term);
                            break;
                        }
                        p += 8;
                        if p > limits().precision_cap {
                            return Err(Error::PrecisionOverflow);
                        }
                    }
                }
                Ok(total)
            }
            DistImpl::DensityPwConst(pieces) => {
                let pw = PwLinear::window_times_pw_const(f, pieces);
                let mut p = k + 2;
                loop {
                    let t_iv = t.enclose(p);
                    let out = quad::osc_integral(&pw, &t_iv, p)?;
                    if out.width() <= Dyadic::pow2(-k) {
                        return Ok(out);
                    }
                    p += 8;
                    if p > limits().precision_cap {
                        return Err(Error::PrecisionOverflow);
                    }
                }
            }
            DistImpl::DensityGeneral(d) => {
                let (a, b) = f.support();
                let g = f.clone();
                let dd = d.clone();
                let t_hint = t.enclose(8).abs_hi();
                let lip_d = d.lip_on(&a, &b);
                let t2 = t.clone();
                let combined = Integrand::new(
                    move |x, kk| {
                        let w = g.eval(x);
                        let dv = dd.eval(x, kk)?;
                        let t_iv = t2.enclose(kk);
                        let phase = elem::unit_complex(&t_iv.mul(x), kk)?;
                        Ok(phase.mul_real(&w).mul(&dv))
                    },
                    move |_, _| {
                        // lip(f d e^{itx}) <= lip_f bound_d + sup_f (lip_d + |t| bound_d)
                        // with bound_d <= 1 as a crude density bound.
                        Dyadic::one()
                            .add(&lip_d)
                            .add(&t_hint)
                            .mul_int(2)
                    },
                    None,
                );
                quad::integrate_finite(&combined, &a, &b, k)
            }
            DistImpl::Custom(eval) => eval(f, t, k),
        }
    }

    /// Enclosures of `mu(f(x) e^{izx})` over `count` consecutive
    /// frequency cells `[start + i step, start + (i+1) step]`.
    ///
    /// Atom positions and piecewise-constant-density boundaries contribute
    /// pure phases `e^{iz c}`, which advance along the uniform grid by one
    /// fixed rotation per cell; that makes dense grids (quadrature sweeps,
    /// characteristic-function tables) orders of magnitude cheaper than
    /// independent evaluations. Falls back to per-cell midpoint evaluation
    /// plus a drift bound for oracle kinds without exploitable structure.
    pub fn windowed_eval_cells(
        &self,
        f: &TestFunction,
        start: &Dyadic,
        step: &Dyadic,
        count: usize,
        k: i64,
    ) -> Result<Vec<ComplexInterval>> {
        const REANCHOR: usize = 512;
        if f.is_zero() || count == 0 {
            return Ok(vec![ComplexInterval::zero(); count]);
        }
        let z_abs_hi = Dyadic::max(
            &start.abs(),
            &start.add(&step.mul_int(count as i64)).abs(),
        );
        let k_e = k + 16;

        match &self.imp {
            DistImpl::PointMass(_) | DistImpl::FiniteDiscrete(_) => {
                let atoms: Vec<(RealOracle, RealOracle)> = match &self.imp {
                    DistImpl::PointMass(a) => {
                        vec![(a.clone(), RealOracle::from_int(1))]
                    }
                    DistImpl::FiniteDiscrete(list) => list.atoms.clone(),
                    _ => unreachable!(),
                };
                let p_pos = k + 16 + z_abs_hi.mag_bits();
                // Constant per-atom data: value factor, phase rotation,
                // and the per-cell widening radius.
                struct AtomState {
                    value: Interval,
                    pos_mid: Dyadic,
                    rot: ComplexInterval,
                    phase: ComplexInterval,
                    widen: Dyadic,
                }
                let mut states = Vec::with_capacity(atoms.len());
                for (pos, w) in &atoms {
                    let pos_iv = pos.eval(p_pos);
                    let w_iv = w.eval(k + 12);
                    let value = f.eval(&pos_iv).mul(&w_iv);
                    let pos_mid = pos_iv.midpoint();
                    let rot =
                        elem::unit_complex(&Interval::point(step.mul(&pos_mid)), k_e)?;
                    let widen = pos_mid
                        .abs()
                        .mul(step)
                        .shift(-1)
                        .add(&z_abs_hi.mul(&pos_iv.width()).shift(-1));
                    states.push(AtomState {
                        value,
                        pos_mid,
                        rot,
                        phase: ComplexInterval::one(),
                        widen,
                    });
                }
                let mut out = Vec::with_capacity(count);
                let mut z_mid = start.add(&step.shift(-1));
                for i in 0..count {
                    if i % REANCHOR == 0 {
                        for s in &mut states {
                            s.phase = elem::unit_complex(
                                &Interval::point(z_mid.mul(&s.pos_mid)),
                                k_e,
                            )?;
                        }
                    }
                    let mut acc = ComplexInterval::zero();
                    for s in &states {
                        acc = acc.add(&s.phase.widen(&s.widen).mul_real(&s.value));
                    }
                    out.push(acc.clamp(k_e));
                    for s in &mut states {
                        s.phase = s.phase.mul(&s.rot).clamp(k_e);
                    }
                    z_mid = z_mid.add(step);
                }
                Ok(out)
            }
            DistImpl::DensityPwConst(pieces) => {
                let pw = PwLinear::window_times_pw_const(f, pieces);
                if pw.is_zero() {
                    return Ok(vec![ComplexInterval::zero(); count]);
                }
                // F(z) = sum of boundary terms e^{iz x_b} (v_b/(iz) + c_b/z^2).
                struct BoundaryState {
                    x: Dyadic,
                    v: Dyadic,
                    c: Dyadic,
                    rot: ComplexInterval,
                    phase: ComplexInterval,
                    widen: Dyadic,
                }
                let mut states = Vec::new();
                for (x0, x1, c0, c1) in pw.segments() {
                    for (x, sign) in [(x1, 1i64), (x0, -1)] {
                        states.push(BoundaryState {
                            x: x.clone(),
                            v: c0.add(&c1.mul(x)).mul_int(sign),
                            c: c1.mul_int(sign),
                            rot: elem::unit_complex(&Interval::point(step.mul(x)), k_e)?,
                            phase: ComplexInterval::one(),
                            widen: x.abs().mul(step).shift(-1),
                        });
                    }
                }
                let quarter = Dyadic::pow2(-2);
                let mut out = Vec::with_capacity(count);
                let mut z0 = start.clone();
                let mut z_mid = start.add(&step.shift(-1));
                for i in 0..count {
                    let z1 = z0.add(step);
                    if i % REANCHOR == 0 {
                        for s in &mut states {
                            s.phase = elem::unit_complex(
                                &Interval::point(z_mid.mul(&s.x)),
                                k_e,
                            )?;
                        }
                    }
                    let z_cell = Interval::new(z0.clone(), z1.clone());
                    if z_cell.abs().lo() >= &quarter {
                        let inv_z = z_cell.recip(k_e);
                        let inv_z2 = z_cell.square().recip_pos(k_e);
                        let mut acc = ComplexInterval::zero();
                        for s in &states {
                            let bracket = ComplexInterval::new(
                                inv_z2.scale(&s.c),
                                inv_z.scale(&s.v).neg(),
                            );
                            acc = acc.add(&s.phase.widen(&s.widen).mul(&bracket));
                        }
                        out.push(acc.clamp(k_e));
                    } else {
                        // Midpoint value widened by the derivative bound
                        // |d/dz integral pw e^{izx} dx| <= radius * ||pw||_1.
                        let mid = Interval::point(z_cell.midpoint());
                        let deriv = pw.radius().mul(&pw.l1_upper());
                        out.push(
                            quad::osc_integral(&pw, &mid, k + 4)?
                                .widen(&deriv.mul(step).shift(-1)),
                        );
                    }
                    for s in &mut states {
                        s.phase = s.phase.mul(&s.rot).clamp(k_e);
                    }
                    z0 = z1;
                    z_mid = z_mid.add(step);
                }
                Ok(out)
            }
            _ => {
                // No exploitable grid structure: midpoint evaluation plus
                // the derivative bound |d/dz mu(f e^{izx})| <= S_f M_f.
                let drift = f
                    .support_radius()
                    .mul(f.sup_norm())
                    .mul(step)
                    .shift(-1);
                let mut out = Vec::with_capacity(count);
                let mut z_mid = start.add(&step.shift(-1));
                for _ in 0..count {
                    let v = self.windowed_eval(f, &Freq::Dyadic(z_mid.clone()), k + 1)?;
                    out.push(v.widen(&drift));
                    z_mid = z_mid.add(step);
                }
                Ok(out)
            }
        }
    }

    /// Enclosure of the window mass `mu(w_n)`.
    pub fn window_mass(&self, n: u32, k: i64) -> Result<Interval> {
        Ok(self.windowed_eval(&TestFunction::window(n), &Freq::zero(), k)?.re)
    }

    /// Enclosure of the complement mass `mu(w_n^c) = 1 - mu(w_n)`.
    pub fn window_complement_mass(&self, n: u32, k: i64) -> Result<Interval> {
        Ok(Interval::one().sub(&self.window_mass(n, k)?))
    }
}

/// Effective tightness: the smallest window index `n` (searched in order)
/// whose certified lower bound on `mu(w_n)` exceeds `1 - 2^-k`.
///
/// Evaluation starts at precision `k + 2`; if an enclosure straddles the
/// threshold, precision grows by 2 bits a bounded number of times before the
/// search advances to the next `n`.
pub fn tightness(mu: &DistOracle, k: i64) -> Result<u32> {
    let threshold = Dyadic::one().sub(&Dyadic::pow2(-k));
    let cap = limits().tightness_cap;
    for n in 0..=cap {
        let mut p = k + 2;
        for _ in 0..16 {
            let mass = mu.window_mass(n, p)?;
            if mass.lo() > &threshold {
                return Ok(n);
            }
            if mass.hi() <= &threshold {
                break;
            }
            p += 2;
        }
    }
    Err(Error::BudgetExhausted("tightness search"))
}

/// Certificate of effective convergence of a sequence of distributions.
///
/// `modulus(n, t, k)` must return a threshold `m0` such that
/// `|mu_m(w_n e^{itx}) - mu(w_n e^{itx})| < 2^-k` for all `m >= m0`;
/// the windows at `t = 0` drive the tightness transfer and the dyadic grid
/// frequencies drive the locally-uniform transfer of characteristic
/// functions.
#[derive(Clone)]
pub struct DistCert {
    pub seq: Arc<dyn Fn(usize) -> DistOracle + Send + Sync>,
    pub limit: DistOracle,
    pub modulus: Arc<dyn Fn(u32, &Dyadic, i64) -> usize + Send + Sync>,
}

impl DistCert {
    /// The constant sequence; the modulus is identically zero.
    pub fn constant(mu: DistOracle) -> Self {
        let m = mu.clone();
        DistCert {
            seq: Arc::new(move |_| m.clone()),
            limit: mu,
            modulus: Arc::new(|_, _, _| 0),
        }
    }
}

/// Sequence-uniform effective tightness: a window index valid for the limit
/// and every member of an effectively convergent sequence simultaneously.
///
/// Realizes the max construction: the limit's tightness at `k+1`, joined
/// with the tightness of every prefix member below the convergence
/// threshold for that window.
pub fn seq_tightness(cert: &DistCert, k: i64) -> Result<u32> {
    let l_limit = tightness(&cert.limit, k + 1)?;
    let gamma = (cert.modulus)(l_limit, &Dyadic::zero(), k + 1);
    let mut alpha = l_limit;
    for m in 0..gamma {
        alpha = alpha.max(tightness(&(cert.seq)(m), k + 1)?);
    }
    Ok(alpha)
}

// ---------------------------------------------------------------------------
// Kernel integrals: x-parameterized integrals against a measure or dx
// ---------------------------------------------------------------------------

/// The measure a kernel integrates against.
pub enum KernelMeasure<'a> {
    Dist(&'a DistOracle),
    Lebesgue,
}

/// A binary integrand `F(x, y)`. For distribution measures the kernel must
/// be a windowed exponential `window(y) e^{ixy}` (that is the oracle
/// contract); general kernels integrate against `dy` with an envelope in
/// `y` uniform over `x`.
pub struct BinaryKernel {
    eval: Arc<dyn Fn(&Interval, &Interval, i64) -> Result<ComplexInterval> + Send + Sync>,
    y_envelope: Option<Envelope>,
    y_lip: Dyadic,
    windowed: Option<TestFunction>,
}

impl BinaryKernel {
    pub fn new(
        eval: impl Fn(&Interval, &Interval, i64) -> Result<ComplexInterval> + Send + Sync + 'static,
        y_envelope: Option<Envelope>,
        y_lip: Dyadic,
    ) -> Self {
        BinaryKernel { eval: Arc::new(eval), y_envelope, y_lip, windowed: None }
    }

    /// `F(x, y) = window(y) e^{ixy}`.
    pub fn windowed_exp(window: TestFunction) -> Self {
        let w = window.clone();
        let bound = window.sup_norm().clone();
        let radius = window.support_radius();
        let lip = window.lip().add(&radius.mul(&bound));
        BinaryKernel {
            eval: Arc::new(move |x: &Interval, y: &Interval, k: i64| {
                let val = w.eval(y);
                let phase = elem::unit_complex(&x.mul(y), k)?;
                Ok(phase.mul_real(&val))
            }),
            y_envelope: Some(Envelope::CompactConst { bound, radius }),
            y_lip: lip,
            windowed: Some(window),
        }
    }
}

/// Enclosure of `integral F(x, y) measure(dy)`, width `<= 2^-k` per
/// component for point `x` (an interval `x` additionally widens by its own
/// extent times the kernel's x-derivative bound).
pub fn kernel_eval(
    kernel: &BinaryKernel,
    x: &Interval,
    measure: KernelMeasure<'_>,
    k: i64,
) -> Result<ComplexInterval> {
    match measure {
        KernelMeasure::Dist(mu) => {
            let window = kernel
                .windowed
                .as_ref()
                .ok_or(Error::UnsupportedEnvelope)?;
            let mid = x.midpoint();
            let base = mu.windowed_eval(window, &Freq::Dyadic(mid), k + 1)?;
            // |d/dx F| = |y window(y)| <= radius * sup over the window.
            let deriv = window.support_radius().mul(window.sup_norm());
            Ok(base.widen(&x.width().shift(-1).mul(&deriv)))
        }
        KernelMeasure::Lebesgue => {
            let x_arg = x.clone();
            let eval = Arc::clone(&kernel.eval);
            let lip = kernel.y_lip.clone();
            let g = Integrand::new(
                move |y, kk| (eval)(&x_arg, y, kk),
                move |_, _| lip.clone(),
                kernel.y_envelope.clone(),
            );
            quad::integrate_r(&g, k)
        }
    }
}

/// Modulus of continuity in `x` for kernel integrals against a computable
/// distribution: with `alpha` the kernel's own modulus (over a window index
/// `l` and target `k`), `tight_l` the measure's tightness index at `k`, and
/// `m_bound` an exponent bound on the kernel, the integral moves by less
/// than `2^-k` under x-steps below `2^-gamma`.
pub fn kernel_modulus(
    alpha: impl Fn(i64, i64) -> i64,
    tight_l: u32,
    x_bound: i64,
    m_bound: i64,
    k: i64,
) -> i64 {
    let l = x_bound.max(tight_l as i64);
    alpha(l, k + 2 * m_bound + 3)
}

// ---------------------------------------------------------------------------
// JSON distribution specs (CLI surface)
// ---------------------------------------------------------------------------

/// Parse `"5"`, `"-3"`, `"m/2^e"`, or `"a/b"` with `b` a power of two, into
/// an exact dyadic.
pub fn parse_dyadic(s: &str) -> Result<Dyadic> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a dyadic value: {s}"));
    if let Some((num, den)) = s.split_once('/') {
        let m: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den = den.trim();
        if let Some(e) = den.strip_prefix("2^") {
            let e: i64 = e.trim().parse().map_err(|_| bad())?;
            return Ok(Dyadic::new(m, -e));
        }
        let d: BigInt = den.parse().map_err(|_| bad())?;
        if d <= BigInt::zero() {
            return Err(bad());
        }
        // Power-of-two denominators only; everything else is not dyadic.
        let bits = d.bits() - 1;
        if d != (BigInt::one() << bits) {
            return Err(Error::Parse(format!("denominator of {s} is not a power of two")));
        }
        return Ok(Dyadic::new(m, -(bits as i64)));
    }
    let m: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Dyadic::new(m, 0))
}

/// Parse an exact rational `"a/b"` or integer.
pub fn parse_rational(s: &str) -> Result<(BigInt, BigInt)> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational value: {s}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok((n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok((n, BigInt::one()))
}

/// Build a distribution oracle from its JSON spec:
/// `{"kind": "point_mass", "a": dyadic}`,
/// `{"kind": "finite_discrete", "atoms": [[dyadic, rational], ...]}`,
/// `{"kind": "density_uniform", "a": dyadic}` (uniform on `[-a, a]`),
/// `{"kind": "binomial", "m": int, "p": rational}`.
pub fn dist_from_json(spec: &serde_json::Value) -> Result<DistOracle> {
    let kind = spec
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Parse("distribution spec needs a \"kind\"".into()))?;
    let field = |name: &str| -> Result<&serde_json::Value> {
        spec.get(name)
            .ok_or_else(|| Error::Parse(format!("distribution spec needs \"{name}\"")))
    };
    let str_field = |name: &str| -> Result<String> {
        Ok(match field(name)? {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            v => return Err(Error::Parse(format!("field \"{name}\" must be a string: {v}"))),
        })
    };
    match kind {
        "point_mass" => Ok(DistOracle::point_mass_at(parse_dyadic(&str_field("a")?)?)),
        "density_uniform" => DistOracle::uniform_symmetric(parse_dyadic(&str_field("a")?)?),
        "binomial" => {
            let m = field("m")?
                .as_u64()
                .ok_or_else(|| Error::Parse("binomial \"m\" must be a natural number".into()))?;
            let (num, den) = parse_rational(&str_field("p")?)?;
            DistOracle::binomial(m as u32, num, den)
        }
        "finite_discrete" => {
            let atoms_json = field("atoms")?
                .as_array()
                .ok_or_else(|| Error::Parse("\"atoms\" must be an array".into()))?;
            let mut atoms = Vec::with_capacity(atoms_json.len());
            for entry in atoms_json {
                let pair = entry
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| Error::Parse("each atom must be [position, weight]".into()))?;
                let pos = parse_dyadic(pair[0].as_str().unwrap_or(&pair[0].to_string()))?;
                let (wn, wd) = parse_rational(pair[1].as_str().unwrap_or(&pair[1].to_string()))?;
                atoms.push((RealOracle::from_dyadic(pos), RealOracle::from_ratio(wn, wd)?));
            }
            Ok(DistOracle::finite_discrete(AtomList::new(atoms)?))
        }
        other => Err(Error::Parse(format!("unknown distribution kind: {other}"))),
    }
}
