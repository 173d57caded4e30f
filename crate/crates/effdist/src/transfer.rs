//! Constructive transfers between characteristic functions and
//! distributions.
//!
//! Both directions run through one mechanism: windowed expectations of a
//! distribution are recovered from its characteristic function by pairing
//! `phi` against a Gaussian-damped Fourier weight,
//!
//! ```text
//! mu(h_n) = integral phi(z) g_n(z) dz,
//! g_n(z)  = (1/2pi) e^{-z^2/(2n)} integral e^{-izy} f(y) dy,
//! ```
//!
//! where `h_n` is the Gaussian mollification of the window `f` and the
//! smoothing parameters certify `sup |h_n - f| < 2^-k`. The frequency-space
//! integrals share one rigorous integrator ([`FreqIntegral`]) built on
//! per-cell enclosures: the characteristic factor through its box evaluator,
//! the Gaussian weight through per-block bounds, and the window transform
//! through exact slope-jump antiderivatives advanced by incremental phase
//! rotation. Tails are truncated analytically using both the Gaussian decay
//! and the certified `V/z^2` decay of piecewise-linear window transforms.

use crate::charfun::{CharCert, CharOracle};
use crate::dist::{DistOracle, Freq};
use crate::dyadic::{Dyadic, Round};
use crate::elem;
use crate::error::{Error, Result};
use crate::interval::{ComplexInterval, Interval};
use crate::limits::limits;
use crate::quad::{self, Envelope, Integrand};
use crate::testfn::TestFunction;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::sync::Arc;

/// Certified Gaussian-smoothing parameters for a window `f` at target `k`:
/// truncation radius `l` and mollifier index `n` guaranteeing
/// `sup_x |h_n(x) - f(x)| < 2^-k`.
#[derive(Clone, Debug, Serialize)]
pub struct SmoothingPlan {
    #[serde(rename = "L")]
    pub l: u32,
    pub n: u64,
    pub k_target: i64,
}

/// Minimal certified smoothing plan: the smallest truncation radius `l`
/// with `2 M_f e^{-l^2/2} < 2^-(k+1)`, and `n = l^2 2^{2 alpha(k+1)} + 1`
/// from the window's modulus of continuity.
pub fn smoothing_params(f: &TestFunction, k: i64) -> Result<SmoothingPlan> {
    smoothing_params_windowed(f, &Dyadic::zero(), k)
}

/// Smoothing plan for the complex-windowed `f(x) e^{itx}` with `|t|`
/// bounded: only the modulus changes, through the effective Lipschitz bound
/// `lip_f + M_f |t|`.
pub fn smoothing_params_windowed(
    f: &TestFunction,
    t_abs: &Dyadic,
    k: i64,
) -> Result<SmoothingPlan> {
    if f.sup_norm().is_zero() {
        return Ok(SmoothingPlan { l: 0, n: 1, k_target: k });
    }
    let threshold = Dyadic::pow2(-(k + 1));
    let two_mf = f.sup_norm().shift(1);
    let mut l: u32 = 0;
    loop {
        let decay = elem::exp_point(&Dyadic::from_int(l as i64).square().shift(-1).neg(), k + 10)?;
        if two_mf.mul(decay.hi()) < threshold {
            break;
        }
        l += 1;
        if l > 64 {
            return Err(Error::BudgetExhausted("smoothing truncation radius"));
        }
    }
    let lip_eff = f.lip().add(&f.sup_norm().mul(&t_abs.abs()));
    let alpha = if lip_eff.is_zero() { 0 } else { (k + 1 + lip_eff.log2_strict_bound()).max(0) };
    if 2 * alpha >= 50 {
        return Err(Error::BudgetExhausted("smoothing parameter"));
    }
    let n = (l as u64 * l as u64)
        .checked_shl(2 * alpha as u32)
        .ok_or(Error::BudgetExhausted("smoothing parameter"))?
        + 1;
    Ok(SmoothingPlan { l, n, k_target: k })
}

/// The Gaussian-damped Fourier weight
/// `g_n(z) = (1/2pi) e^{-z^2/(2n)} integral e^{-izy} f(y) dy`,
/// enclosed with width `<= 2^-k` per component.
pub fn fourier_weight(
    f: &TestFunction,
    n: u64,
    z: &Interval,
    k: i64,
) -> Result<ComplexInterval> {
    if n == 0 {
        return Err(Error::InvalidParams("fourier weight needs n >= 1"));
    }
    let mut p = k + 4;
    loop {
        let hat = quad::fourier_window(f, &z.neg(), p)?;
        let damp = elem::gauss_decay(z, 1, 2 * n, p)?;
        let inv_2pi = elem::pi(p).shift(1).recip(p);
        let out = hat.mul_real(&damp).mul_real(&inv_2pi);
        if out.width() <= Dyadic::pow2(-k) {
            return Ok(out);
        }
        p += 8;
        if p > limits().precision_cap {
            return Err(Error::PrecisionOverflow);
        }
    }
}

/// [`fourier_weight`] as an integrand carrying its Gaussian envelope
/// `(1/2pi) ||f||_1 e^{-z^2/(2n)}`.
pub fn fourier_weight_integrand(f: &TestFunction, n: u64) -> Integrand {
    let g = f.clone();
    let scale = {
        // Upper dyadic bound on ||f||_1 / (2 pi).
        let inv_2pi_hi = elem::pi(30).shift(1).recip(30).hi().clone();
        f.l1_norm_upper().mul(&inv_2pi_hi)
    };
    let lip_hint = f.l1_norm_upper().mul(&f.support_radius().add(&Dyadic::one()));
    Integrand::new(
        move |z, k| fourier_weight(&g, n, z, k),
        move |_, _| lip_hint.clone(),
        Some(Envelope::Gaussian { scale, sigma2_num: n, sigma2_den: 1 }),
    )
}

// ---------------------------------------------------------------------------
// The shared frequency-space integrator
// ---------------------------------------------------------------------------

/// `prefactor * integral_{-T}^{T} phi(z) e^{-z^2 num/den}
///  [Fhat_f(z - shift)] [e^{-ixz}] [2 sin(Rz)/z] dz`, widened by a
/// caller-certified tail radius per component.
struct FreqIntegral<'a> {
    phi: &'a CharOracle,
    rate: (u64, u64),
    window: Option<(&'a TestFunction, Dyadic)>,
    wave_x: Option<Interval>,
    sin_kernel: Option<Dyadic>,
    prefactor: Interval,
    t_range: u64,
    tail_radius: Dyadic,
    cell_exp_hint: i64,
}

const BLOCK: u64 = 512;

impl FreqIntegral<'_> {
    /// Adaptive evaluation: total width (quadrature plus tail box)
    /// `<= 2^-k` per component.
    fn eval(&self, k: i64) -> Result<ComplexInterval> {
        let mut j = (self.cell_exp_hint - 2).max(0);
        loop {
            match self.sweep(j, k)? {
                Some(v) => return Ok(v),
                None => j += 1,
            }
        }
    }

    fn sweep(&self, j: i64, k: i64) -> Result<Option<ComplexInterval>> {
        let n_cells = (2 * self.t_range) << j.min(40);
        let trace = std::env::var("EFFDIST_TRACE").is_ok();
        let t0 = std::time::Instant::now();
        if trace {
            eprintln!("  sweep start j={j} cells={n_cells}");
        }
        if n_cells > limits().max_cells {
            return Err(Error::PrecisionOverflow);
        }
        let target = Dyadic::pow2(-k);
        let delta = Dyadic::pow2(-j);
        let half_delta = Dyadic::pow2(-j - 1);
        let k_phi = k + 8;
        let k_e = k_phi + 12;

        // Abort a sweep once the accumulated width (scaled by the cell
        // width and prefactor) cannot meet the target.
        let pref_hi = self.prefactor.abs_hi();
        let tail_contrib = self.tail_radius.shift(1);
        let width_cap = if tail_contrib < target {
            target.sub(&tail_contrib)
        } else {
            return Err(Error::PrecisionOverflow);
        };

        // Per-sweep window state: slope jumps with their per-cell rotation
        // and the widening radius |y_j| * delta / 2.
        // |d/du Fhat(u)| <= S ||f||_1 bounds the transform's variation over
        // a cell near u = 0, where the slope-jump form is unusable.
        let mut fhat_deriv = Dyadic::zero();
        let mut jumps: Vec<(Dyadic, Dyadic, ComplexInterval, Dyadic)> = Vec::new();
        if let Some((f, _)) = &self.window {
            fhat_deriv = f.support_radius().mul(&f.l1_norm_upper());
            for (y, ds) in f.slope_jumps() {
                let rot = elem::unit_complex(
                    &Interval::point(delta.mul(&y).neg()),
                    k_e,
                )?;
                let widen = y.abs().mul(&half_delta);
                jumps.push((y, ds, rot, widen));
            }
        }
        let wave_rot = match &self.wave_x {
            Some(x) => Some(elem::unit_complex(
                &Interval::point(delta.mul(&x.midpoint()).neg()),
                k_e,
            )?),
            None => None,
        };

        let mut acc = ComplexInterval::zero();
        let mut z0 = Dyadic::from_int(-(self.t_range as i64));
        let mut phases: Vec<ComplexInterval> = Vec::new();
        let mut phi_block: Vec<ComplexInterval> = Vec::new();
        let mut wave_phase = ComplexInterval::one();
        let mut gauss_block = Interval::one();

        for i in 0..n_cells {
            let z1 = z0.add(&delta);
            let z_mid = z0.add(&half_delta);
            if i % BLOCK == 0 {
                // Re-anchor all rotating phases, refresh the Gaussian block
                // bound, and fetch the characteristic factor for the block.
                let block_len = BLOCK.min(n_cells - i);
                let block_end = Dyadic::min(
                    &Dyadic::from_int(self.t_range as i64),
                    &z0.add(&delta.mul_int(BLOCK as i64)),
                );
                let block_iv = Interval::new(z0.clone(), block_end);
                gauss_block = elem::gauss_decay(&block_iv, self.rate.0, self.rate.1, k_e)?;
                phi_block = self.phi.eval_cells(&z0, &delta, block_len as usize, k_phi)?;
                phases.clear();
                for (y, _, _, _) in &jumps {
                    let u_mid = match &self.window {
                        Some((_, shift)) => z_mid.sub(shift),
                        None => z_mid.clone(),
                    };
                    phases.push(elem::unit_complex(
                        &Interval::point(u_mid.mul(y).neg()),
                        k_e,
                    )?);
                }
                if let Some(x) = &self.wave_x {
                    wave_phase = elem::unit_complex(
                        &Interval::point(x.midpoint().mul(&z_mid).neg()),
                        k_e,
                    )?;
                }
            }

            let z_cell = Interval::new(z0.clone(), z1.clone());
            let mut v = phi_block[(i % BLOCK) as usize].clone();
            v = v.mul_real(&gauss_block);

            if let Some((f, shift)) = &self.window {
                let u_cell = z_cell.sub(&Interval::point(shift.clone()));
                let fhat = if u_cell.abs().lo() >= &Dyadic::one() {
                    // Slope-jump antiderivative with rotated phases.
                    let mut s = ComplexInterval::zero();
                    for ((_, ds, _, widen), phase) in jumps.iter().zip(&phases) {
                        s = s.add(&phase.widen(widen).scale(ds));
                    }
                    s.mul_real(&u_cell.square().recip(k_e).neg())
                } else {
                    let mid = Interval::point(u_cell.midpoint());
                    quad::fourier_window(f, &mid.neg(), k_phi)?
                        .widen(&fhat_deriv.mul(&half_delta))
                };
                v = v.mul(&fhat);
            }

            if let Some(x) = &self.wave_x {
                let widen = x
                    .midpoint()
                    .abs()
                    .mul(&half_delta)
                    .add(&x.width().shift(-1).mul(&z_cell.abs_hi()));
                v = v.mul(&wave_phase.widen(&widen));
            }

            if let Some(r) = &self.sin_kernel {
                let s = elem::sinc(&z_cell.scale(r), k_phi)?.scale(&r.shift(1));
                v = v.mul_real(&s);
            }

            acc = acc.add(&v.clamp(k_e));

            // Advance rotations; clamp periodically to cap mantissa growth.
            let do_clamp = i % 4 == 3;
            for (slot, (_, _, rot, _)) in phases.iter_mut().zip(&jumps) {
                *slot = slot.mul(rot);
                if do_clamp {
                    *slot = slot.clamp(k_e);
                }
            }
            if let Some(rot) = &wave_rot {
                wave_phase = wave_phase.mul(rot);
                if do_clamp {
                    wave_phase = wave_phase.clamp(k_e);
                }
            }

            if i % 256 == 255 && acc.width().mul(&delta).mul(&pref_hi) > width_cap {
                if trace {
                    eprintln!(
                        "abort j={j} at cell {i}/{n_cells}: acc width {} cap {}",
                        acc.width().mul(&delta).mul(&pref_hi).to_f64(),
                        width_cap.to_f64()
                    );
                }
                return Ok(None);
            }
            z0 = z1;
        }

        let total = acc
            .mul_real(&Interval::point(delta))
            .mul_real(&self.prefactor)
            .widen(&self.tail_radius);
        if trace {
            eprintln!(
                "sweep j={j} cells={n_cells} width={} target={} elapsed={:?}",
                total.width().to_f64(),
                target.to_f64(),
                t0.elapsed()
            );
        }
        if total.width() <= target {
            Ok(Some(total))
        } else {
            Ok(None)
        }
    }
}

/// Smallest integer `T > |shift|` with a certified
/// `V / (pi (T - |shift|)) < 2^-k` (the inverse-square Fourier tail).
fn inverse_square_cutoff(v: &Dyadic, shift_abs: &Dyadic, k: i64) -> Result<u64> {
    if v.is_zero() {
        return Ok(shift_abs.ceil_int().to_u64().unwrap_or(0) + 1);
    }
    let pi_lo = elem::pi(30).lo().clone();
    let base = shift_abs.ceil_int().to_u64().ok_or(Error::BudgetExhausted("tail cutoff"))?;
    // T - |shift| > V 2^k / pi.
    let margin = v.shift(k).div_round(&pi_lo, 8, Round::Up).ceil_int();
    let margin = margin.to_u64().ok_or(Error::BudgetExhausted("tail cutoff"))?;
    let mut t = base + margin + 1;
    loop {
        let gap = Dyadic::from_int(t as i64).sub(shift_abs);
        let bound = v.div_round(&pi_lo.mul(&gap), k + 8, Round::Up);
        if bound < Dyadic::pow2(-k) {
            return Ok(t);
        }
        t += 1;
    }
}

/// Smallest integer `T` with a certified Gaussian tail
/// `scale * sigma * sqrt(2 pi) * e^{-T^2/(2 sigma2)} < 2^-k`,
/// by doubling then binary search.
fn gaussian_cutoff(scale: &Dyadic, sigma2_num: u64, sigma2_den: u64, k: i64) -> Result<u64> {
    let env = Envelope::Gaussian { scale: scale.clone(), sigma2_num, sigma2_den };
    let ok = |t: u64| -> Result<bool> {
        let t32: u32 = t.try_into().map_err(|_| Error::BudgetExhausted("tail cutoff"))?;
        Ok(env.tail_bound(t32, k + 4)? < Dyadic::pow2(-k))
    };
    if ok(0)? {
        return Ok(0);
    }
    let mut hi = 1u64;
    while !ok(hi)? {
        hi *= 2;
        if hi > (1 << 40) {
            return Err(Error::BudgetExhausted("tail cutoff"));
        }
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Enclosure of the smoothed expectation `integral phi(z) g_n(z) dz`
/// (which equals `mu(h_n)` when `phi` is the characteristic function of
/// `mu`), width `<= 2^-k` per component.
pub fn smoothed_expectation(
    phi: &CharOracle,
    f: &TestFunction,
    n: u64,
    k: i64,
) -> Result<ComplexInterval> {
    smoothed_expectation_shifted(phi, f, &Dyadic::zero(), n, k)
}

/// As [`smoothed_expectation`] for the complex window `f(x) e^{itx}`: the
/// window transform is shifted to `Fhat(z - t)`.
pub fn smoothed_expectation_shifted(
    phi: &CharOracle,
    f: &TestFunction,
    t: &Dyadic,
    n: u64,
    k: i64,
) -> Result<ComplexInterval> {
    if f.is_zero() {
        return Ok(ComplexInterval::zero());
    }
    if n == 0 {
        return Err(Error::InvalidParams("smoothing parameter must be >= 1"));
    }
    let v = f.slope_jump_variation();
    let p = k + 8;
    let inv_2pi = elem::pi(p).shift(1).recip(p);

    // Tail: |phi| <= 1, Gaussian damp <= 1, |Fhat(u)| <= V/u^2, so the
    // inverse-square cutoff certifies the remainder; the Gaussian cutoff of
    // (1/2pi)||f||_1 e^{-z^2/2n} is an alternative bound. Use whichever
    // truncates earlier.
    let t_inv = inverse_square_cutoff(&v, &t.abs(), k + 2)?;
    let scale_gauss = f.l1_norm_upper().mul(inv_2pi.hi());
    let t_gauss = gaussian_cutoff(&scale_gauss, n, 1, k + 2)?
        .max(t.abs().ceil_int().to_u64().unwrap_or(0) + 1);
    let t_range = t_inv.min(t_gauss);

    let hint = {
        // Per-cell variation scales with (lip_phi + support radius + 1)
        // times the weight mass.
        let lip_phi = phi.lip().cloned().unwrap_or_else(|| Dyadic::from_int(4));
        let c = lip_phi
            .add(&f.support_radius())
            .add(&Dyadic::one())
            .mul(&v.add(&f.l1_norm_upper()).add(&Dyadic::one()));
        k + 1 + c.mag_bits()
    };

    if std::env::var("EFFDIST_TRACE").is_ok() {
        eprintln!("smoothed_expectation: n={n} t_inv={t_inv} t_gauss={t_gauss} T={t_range} hint={hint}");
    }
    let integral = FreqIntegral {
        phi,
        rate: (1, 2 * n),
        window: Some((f, t.clone())),
        wave_x: None,
        sin_kernel: None,
        prefactor: inv_2pi,
        t_range,
        tail_radius: Dyadic::pow2(-(k + 2)),
        cell_exp_hint: hint,
    };
    integral.eval(k)
}

/// Windowed expectation `mu(f)` recovered from the characteristic function
/// alone: smoothing plan, smoothed expectation, and an explicit smoothing
/// error box. The imaginary enclosure must contain zero (the target is a
/// real expectation); its violation signals an invalid oracle.
pub fn glivenko_eval(phi: &CharOracle, f: &TestFunction, k: i64) -> Result<Interval> {
    if !phi.pos_def() || !phi.unit_at_zero() {
        return Err(Error::InvalidChar("glivenko evaluation needs pos_def and unit_at_zero"));
    }
    if f.is_zero() {
        return Ok(Interval::zero());
    }
    let plan = smoothing_params(f, k + 1)?;
    let e = smoothed_expectation(phi, f, plan.n, k + 1)?;
    if !e.im.contains(&Dyadic::zero()) {
        return Err(Error::ImaginaryResidual);
    }
    Ok(e.re.widen(&Dyadic::pow2(-(k + 1))))
}

/// Transfer of effective convergence from characteristic functions to
/// windowed expectations: a threshold `m0` with
/// `|mu_m(f) - mu(f)| < 2^-k` for all `m >= m0`, derived from the
/// certificate's locally-uniform modulus, a smoothing plan for `f`, and
/// certified cutoffs for the weight's mass and tail.
pub fn glivenko_modulus(cert: &CharCert, f: &TestFunction, k: i64) -> Result<usize> {
    glivenko_modulus_windowed(cert, f, &Dyadic::zero(), k)
}

pub(crate) fn glivenko_modulus_windowed(
    cert: &CharCert,
    f: &TestFunction,
    t_abs: &Dyadic,
    k: i64,
) -> Result<usize> {
    if f.is_zero() {
        return Ok(0);
    }
    let plan = smoothing_params_windowed(f, t_abs, k + 2)?;
    let p = 30;
    // ||g_n||_1 <= ||f||_1 sqrt(n / 2pi).
    let ratio = Interval::from_int(plan.n as i64).div(&elem::pi(p).shift(1), p);
    let b_upper = f.l1_norm_upper().mul(&ratio.sqrt(p).hi());
    let j = k + 3 + b_upper.mag_bits();
    // Cutoff with tail below 2^-(k+4): Gaussian or inverse-square,
    // whichever truncates earlier.
    let scale_gauss = f.l1_norm_upper().mul(elem::pi(p).shift(1).recip(p).hi());
    let t_gauss = gaussian_cutoff(&scale_gauss, plan.n, 1, k + 4)?
        .max(t_abs.ceil_int().to_u64().unwrap_or(0) + 1);
    let t_inv = inverse_square_cutoff(&f.slope_jump_variation(), &t_abs.abs(), k + 4)?;
    let t_cut = Dyadic::from_int(t_gauss.min(t_inv) as i64);
    Ok((cert.modulus)(&t_cut, j))
}

/// The damped characteristic function `psi_n(z) = phi(z) e^{-z^2/n}`,
/// which is the characteristic function of the mollified distribution with
/// density [`bochner_density`].
pub fn damped_oracle(phi: &CharOracle, n: u64) -> CharOracle {
    let inner = phi.clone();
    let lip = phi.lip().map(|l| l.add(&Dyadic::one()));
    let pos_def = phi.pos_def();
    let unit = phi.unit_at_zero();
    let inner_mod = phi.clone();
    CharOracle::custom(
        move |t, k| {
            let base = inner.eval_box(t, k + 1)?;
            let damp = elem::gauss_decay(t, 1, n, k + 1)?;
            Ok(base.mul_real(&damp))
        },
        move |k| inner_mod.modulus(k + 1).unwrap_or(k + 2).max(k + 2),
        lip,
        pos_def,
        // psi_n(0) = phi(0).
        unit,
    )
}

/// The convergence certificate `psi_n -> phi` with the analytic modulus
/// from `1 - e^{-z^2/n} <= z^2/n` on `|z| <= range`.
pub fn damped_cert(phi: &CharOracle) -> CharCert {
    let seq_phi = phi.clone();
    CharCert {
        seq: Arc::new(move |n| damped_oracle(&seq_phi, n.max(1) as u64)),
        limit: phi.clone(),
        modulus: Arc::new(|range: &Dyadic, j: i64| {
            // |psi_n - phi| <= range^2 / n < 2^-j  <=  n > range^2 2^j.
            let need = range.square().shift(j);
            need.ceil_int().to_usize().unwrap_or(usize::MAX).saturating_add(1)
        }),
    }
}

/// The mollified density
/// `f_n(x) = (1/2pi) integral phi(t) e^{-t^2/n} e^{-ixt} dt`,
/// enclosed with width `<= 2^-k`. Runtime checks surface invalid oracles:
/// an imaginary enclosure excluding zero or a certifiably negative value.
pub fn bochner_density(phi: &CharOracle, n: u64, x: &Interval, k: i64) -> Result<Interval> {
    if !phi.pos_def() || !phi.unit_at_zero() {
        return Err(Error::InvalidChar("density reconstruction needs pos_def and unit_at_zero"));
    }
    if n == 0 {
        return Err(Error::InvalidParams("mollifier index must be >= 1"));
    }
    let p = k + 8;
    let inv_2pi = elem::pi(p).shift(1).recip(p);
    // e^{-t^2/n} has sigma2 = n/2; |phi| <= 1.
    let t_range = gaussian_cutoff(inv_2pi.hi(), n, 2, k + 2)?;
    let hint = {
        let lip_phi = phi.lip().cloned().unwrap_or_else(|| Dyadic::from_int(4));
        let mass = Dyadic::from_int((2 * t_range) as i64);
        let c = lip_phi.add(&x.abs_hi()).add(&Dyadic::one()).mul(&mass.add(&Dyadic::one()));
        k + 1 + c.mag_bits()
    };
    let integral = FreqIntegral {
        phi,
        rate: (1, n),
        window: None,
        wave_x: Some(x.clone()),
        sin_kernel: None,
        prefactor: inv_2pi,
        t_range,
        tail_radius: Dyadic::pow2(-(k + 2)),
        cell_exp_hint: hint,
    };
    let v = integral.eval(k)?;
    if !v.im.contains(&Dyadic::zero()) {
        return Err(Error::ImaginaryResidual);
    }
    if v.re.hi().is_negative() {
        return Err(Error::NegativityViolation);
    }
    Ok(v.re)
}

/// Certified enclosure of `integral f_n dx` over the whole line: the core
/// `[-R, R]` collapses by Fubini to a single frequency integral against the
/// kernel `2 sin(R t)/t`, and the caller-supplied spatial envelope bounds
/// the tail (the density itself is nonnegative under the asserted flags).
pub fn bochner_mass(phi: &CharOracle, n: u64, x_envelope: &Envelope, k: i64) -> Result<Interval> {
    if !phi.pos_def() || !phi.unit_at_zero() {
        return Err(Error::InvalidChar("mass certification needs pos_def and unit_at_zero"));
    }
    // Spatial core radius from the envelope.
    let mut r: u32 = 1;
    loop {
        if x_envelope.tail_bound(r, k + 4)? < Dyadic::pow2(-(k + 2)) {
            break;
        }
        r += 1;
        if r > limits().tightness_cap {
            return Err(Error::BudgetExhausted("mass core radius"));
        }
    }
    let p = k + 8;
    let inv_2pi = elem::pi(p).shift(1).recip(p);
    // Frequency cutoff: |sin kernel| <= 2R.
    let scale = inv_2pi.hi().mul(&Dyadic::from_int(2 * r as i64));
    let t_range = gaussian_cutoff(&scale, n, 2, k + 3)?;
    let hint = {
        let lip_phi = phi.lip().cloned().unwrap_or_else(|| Dyadic::from_int(4));
        let c = lip_phi
            .add(&Dyadic::from_int(r as i64))
            .add(&Dyadic::one())
            .mul(&Dyadic::from_int(2 * t_range as i64));
        k + 1 + c.mag_bits()
    };
    let integral = FreqIntegral {
        phi,
        rate: (1, n),
        window: None,
        wave_x: None,
        sin_kernel: Some(Dyadic::from_int(r as i64)),
        prefactor: inv_2pi,
        t_range,
        tail_radius: Dyadic::pow2(-(k + 3)),
        cell_exp_hint: hint,
    };
    let core = integral.eval(k + 1)?;
    if !core.im.contains(&Dyadic::zero()) {
        return Err(Error::ImaginaryResidual);
    }
    // Nonnegative tail mass below the envelope bound.
    Ok(core.re.add(&Interval::new(Dyadic::zero(), Dyadic::pow2(-(k + 2)))))
}

/// The computable distribution reconstructed from a positive-definite
/// computable characteristic function: windowed expectations are evaluated
/// through the mollified densities, with the mollifier index chosen by the
/// convergence transfer applied to the damped certificate.
pub fn bochner_dist(phi: &CharOracle) -> Result<DistOracle> {
    if !phi.pos_def() || !phi.unit_at_zero() {
        return Err(Error::InvalidChar("distribution reconstruction needs pos_def and unit_at_zero"));
    }
    let cert = damped_cert(phi);
    let phi_outer = phi.clone();
    Ok(DistOracle::custom(move |f: &TestFunction, t: &Freq, k: i64| {
        if f.is_zero() {
            return Ok(ComplexInterval::zero());
        }
        let s = f.support_radius().mul(&f.l1_norm_upper()).add(&Dyadic::one());
        let t_enc = t.enclose(k + 5 + s.mag_bits());
        let t_mid = t_enc.midpoint();
        // n with |nu_n(f e^{it.}) - mu(f e^{it.})| < 2^-(k+2) for all n past it.
        let n = glivenko_modulus_windowed(&cert, f, &t_mid.abs(), k + 2)?;
        let n: u64 = n.try_into().map_err(|_| Error::BudgetExhausted("mollifier index"))?;
        if n > (1 << 50) {
            return Err(Error::BudgetExhausted("mollifier index"));
        }
        let n = n.max(1);
        // nu_n(f e^{it.}) = (1/2pi) integral phi(z) e^{-z^2/n} Fhat_f(z - t) dz
        // exactly (the mollified distribution has an integrable density).
        let v = smoothed_expectation_damped(&phi_outer, f, &t_mid, n, k + 1)?;
        // Mollification gap plus the frequency-midpoint drift
        // |d/dt Fhat| <= S ||f||_1.
        let drift = t_enc.width().shift(-1).mul(&f.support_radius()).mul(&f.l1_norm_upper());
        Ok(v.widen(&Dyadic::pow2(-(k + 2)).add(&drift)))
    }))
}

/// `(1/2pi) integral phi(z) e^{-z^2/n} Fhat_f(z - t) dz`: the windowed
/// expectation of the mollified distribution.
fn smoothed_expectation_damped(
    phi: &CharOracle,
    f: &TestFunction,
    t: &Dyadic,
    n: u64,
    k: i64,
) -> Result<ComplexInterval> {
    let v = f.slope_jump_variation();
    let p = k + 8;
    let inv_2pi = elem::pi(p).shift(1).recip(p);
    let t_inv = inverse_square_cutoff(&v, &t.abs(), k + 2)?;
    let scale_gauss = f.l1_norm_upper().mul(inv_2pi.hi());
    let t_gauss = gaussian_cutoff(&scale_gauss, n, 2, k + 2)?
        .max(t.abs().ceil_int().to_u64().unwrap_or(0) + 1);
    let t_range = t_inv.min(t_gauss);
    let hint = {
        let lip_phi = phi.lip().cloned().unwrap_or_else(|| Dyadic::from_int(4));
        let c = lip_phi
            .add(&f.support_radius())
            .add(&Dyadic::one())
            .mul(&v.add(&f.l1_norm_upper()).add(&Dyadic::one()));
        k + 1 + c.mag_bits()
    };
    let integral = FreqIntegral {
        phi,
        rate: (1, n),
        window: Some((f, t.clone())),
        wave_x: None,
        sin_kernel: None,
        prefactor: inv_2pi,
        t_range,
        tail_radius: Dyadic::pow2(-(k + 2)),
        cell_exp_hint: hint,
    };
    integral.eval(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    fn delta0_char() -> CharOracle {
        CharOracle::from_dist(DistOracle::point_mass_at(Dyadic::zero()))
    }

    fn uniform_half() -> DistOracle {
        DistOracle::uniform_symmetric(d(1, -1)).unwrap()
    }

    #[test]
    fn smoothing_plan_matches_derived_values() {
        let plan = smoothing_params(&TestFunction::window(1), 3).unwrap();
        assert_eq!(plan.l, 3);
        assert_eq!(plan.n, 9217);
    }

    #[test]
    fn smoothing_plan_zero_function() {
        let plan = smoothing_params(&TestFunction::zero(), 7).unwrap();
        assert_eq!(plan.l, 0);
        assert_eq!(plan.n, 1);
    }

    #[test]
    fn smoothing_plan_monotone_in_k() {
        let f = TestFunction::window(2);
        let mut prev = smoothing_params(&f, 1).unwrap();
        for k in 2..6 {
            let plan = smoothing_params(&f, k).unwrap();
            assert!(plan.l >= prev.l && plan.n >= prev.n);
            prev = plan;
        }
    }

    #[test]
    fn smoothing_accuracy_on_grid() {
        // Brute-force h_n via the real-space convolution
        // h_n(x) = (1/sqrt(2pi)) integral e^{-t^2/2} f(x + t/sqrt(n)) dt,
        // f64 Simpson reference; the plan must deliver sup|h_n - f| < 2^-k.
        for n_idx in 0..3u32 {
            let f = TestFunction::window(n_idx);
            for k in [3i64, 5] {
                let plan = smoothing_params(&f, k).unwrap();
                let sqrt_n = (plan.n as f64).sqrt();
                let fx = |x: f64| -> f64 {
                    let n = n_idx as f64;
                    let ax = x.abs();
                    if ax <= n {
                        1.0
                    } else if ax <= n + 1.0 {
                        n + 1.0 - ax
                    } else {
                        0.0
                    }
                };
                let h = |x: f64| -> f64 {
                    let m = 20000usize;
                    let lo = -8.0f64;
                    let hi = 8.0f64;
                    let dt = (hi - lo) / m as f64;
                    let mut acc = 0.0;
                    for i in 0..=m {
                        let t = lo + i as f64 * dt;
                        let w = if i == 0 || i == m {
                            1.0
                        } else if i % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        acc += w * (-t * t / 2.0).exp() * fx(x + t / sqrt_n);
                    }
                    acc * dt / 3.0 / (2.0 * std::f64::consts::PI).sqrt()
                };
                let mut sup: f64 = 0.0;
                for j in -32..=32 {
                    let x = j as f64 / 8.0;
                    sup = sup.max((h(x) - fx(x)).abs());
                }
                assert!(
                    sup < (2.0f64).powi(-(k as i32)),
                    "w_{n_idx}, k={k}: sup gap {sup}"
                );
            }
        }
    }

    #[test]
    fn fourier_weight_at_zero() {
        // g_n(0) = (1/2pi) integral w_0 = 1/(2pi), any n.
        for n in [1u64, 64] {
            let v = fourier_weight(&TestFunction::window(0), n, &Interval::zero(), 12).unwrap();
            let reference = 1.0 / (2.0 * std::f64::consts::PI);
            assert!(v.re.lo().to_f64() <= reference && reference <= v.re.hi().to_f64());
            assert!(v.im.contains(&Dyadic::zero()));
        }
    }

    #[test]
    fn fourier_weight_envelope_check() {
        // |g_n(z)| <= (1/2pi) ||f||_1 e^{-z^2/2n} spot-checked at z = +/-10.
        let f = TestFunction::window(0);
        let n = 16u64;
        let integrand = fourier_weight_integrand(&f, n);
        for z in [10i64, -10] {
            let v = integrand.eval(&Interval::from_int(z), 14).unwrap();
            let bound = integrand.envelope().unwrap().tail_bound(0, 20).unwrap();
            // tail_bound(0) is a whole-line mass bound, so compare against
            // the pointwise envelope instead.
            let pointwise = (1.0 / (2.0 * std::f64::consts::PI))
                * 1.0
                * (-(z as f64) * (z as f64) / (2.0 * n as f64)).exp();
            assert!(v.abs_hi(20).to_f64() <= pointwise + 1e-3);
            let _ = bound;
        }
    }

    #[test]
    fn smoothed_expectation_of_point_mass() {
        // phi = 1: the smoothed expectation is h_n(0), within 2^-k of f(0) = 1.
        let f = TestFunction::window(1);
        let k = 4i64;
        let plan = smoothing_params(&f, k).unwrap();
        let v = smoothed_expectation(&delta0_char(), &f, plan.n, k).unwrap();
        assert!(v.im.contains(&Dyadic::zero()));
        // |h_n(0) - 1| < 2^-k and the enclosure has width <= 2^-k.
        assert!(v.width() <= Dyadic::pow2(-k));
        let gap = v.re.sub(&Interval::one()).abs_hi();
        assert!(gap <= Dyadic::pow2(-k).shift(1), "h_n(0) too far from 1: {:?}", v.re);
    }

    #[test]
    fn smoothed_expectation_zero_window() {
        let v = smoothed_expectation(&delta0_char(), &TestFunction::zero(), 5, 6).unwrap();
        assert!(v.re.contains(&Dyadic::zero()) && v.im.contains(&Dyadic::zero()));
    }

    #[test]
    fn glivenko_recovers_point_mass() {
        let j = glivenko_eval(&delta0_char(), &TestFunction::window(1), 4).unwrap();
        assert!(j.contains(&Dyadic::one()), "delta_0(w_1) = 1 not enclosed: {j:?}");
        assert!(j.width() <= Dyadic::pow2(-3));
    }

    #[test]
    fn glivenko_recovers_uniform_triangle_mass() {
        // mu = uniform[-1/2, 1/2], f = w_0: mu(f) = 3/4.
        let phi = CharOracle::from_dist(uniform_half());
        let j = glivenko_eval(&phi, &TestFunction::window(0), 4).unwrap();
        assert!(j.contains(&d(3, -2)), "3/4 not enclosed: {j:?}");
    }

    #[test]
    fn glivenko_two_point_measure_vanishes() {
        // phi(t) = cos t is the char of (delta_-1 + delta_1)/2; w_0 vanishes
        // at both atoms.
        let atoms = crate::dist::AtomList::new(vec![
            (
                crate::real::RealOracle::from_int(-1),
                crate::real::RealOracle::from_ratio(BigInt::from(1), BigInt::from(2)).unwrap(),
            ),
            (
                crate::real::RealOracle::from_int(1),
                crate::real::RealOracle::from_ratio(BigInt::from(1), BigInt::from(2)).unwrap(),
            ),
        ])
        .unwrap();
        let phi = CharOracle::from_dist(DistOracle::finite_discrete(atoms));
        let j = glivenko_eval(&phi, &TestFunction::window(0), 4).unwrap();
        assert!(j.contains(&Dyadic::zero()), "0 not enclosed: {j:?}");
    }

    #[test]
    fn glivenko_requires_assertions() {
        let phi = CharOracle::custom(
            |_, _| Ok(ComplexInterval::one()),
            |k| k,
            Some(Dyadic::zero()),
            false,
            true,
        );
        assert!(matches!(
            glivenko_eval(&phi, &TestFunction::window(0), 3),
            Err(Error::InvalidChar(_))
        ));
    }

    #[test]
    fn glivenko_modulus_constant_sequence() {
        let cert = CharCert::constant(delta0_char());
        let m = glivenko_modulus(&cert, &TestFunction::window(1), 4).unwrap();
        assert_eq!(m, 0);
    }

    #[test]
    fn glivenko_modulus_sinc_sequence_verified() {
        // phi_m(t) = sinc(t 2^-m) -> 1 with |sinc(u) - 1| <= u^2/6.
        let cert = CharCert {
            seq: Arc::new(|m| {
                CharOracle::sinc_uniform(Dyadic::pow2(-(m as i64 + 1))).unwrap()
            }),
            limit: CharOracle::constant_one(),
            modulus: Arc::new(|range: &Dyadic, j: i64| {
                // (range 2^-m)^2 / 6 < 2^-j  <=  2^{2m} > range^2 2^j / 6
                let need = range.square().shift(j);
                let mut m = 0usize;
                while Dyadic::pow2(2 * m as i64).mul_int(6) <= need {
                    m += 1;
                }
                m
            }),
        };
        let k = 4i64;
        let threshold = glivenko_modulus(&cert, &TestFunction::window(1), k).unwrap();
        assert!(threshold > 0);
        // Verify: the direct gap |mu_m(w_1) - delta_0(w_1)| at m = threshold
        // is certifiably below 2^-k.
        let mu_m = DistOracle::uniform_symmetric(Dyadic::pow2(-(threshold as i64 + 1)))
            .unwrap();
        let a = mu_m.window_mass(1, k + 4).unwrap();
        let b = DistOracle::point_mass_at(Dyadic::zero()).window_mass(1, k + 4).unwrap();
        let gap = a.sub(&b).abs_hi();
        assert!(gap < Dyadic::pow2(-k), "verified gap {gap} at threshold {threshold}");
    }

    #[test]
    fn bochner_density_of_constant_one() {
        // f_n(x) = sqrt(n/4pi) e^{-n x^2/4}.
        for n in [4u64, 16] {
            let at0 = bochner_density(&CharOracle::constant_one(), n, &Interval::zero(), 6).unwrap();
            let reference = (n as f64 / (4.0 * std::f64::consts::PI)).sqrt();
            assert!(
                at0.lo().to_f64() <= reference && reference <= at0.hi().to_f64(),
                "n={n}: {at0:?} vs {reference}"
            );
            let at1 = bochner_density(&CharOracle::constant_one(), n, &Interval::one(), 6).unwrap();
            let reference = (n as f64 / (4.0 * std::f64::consts::PI)).sqrt()
                * (-(n as f64) / 4.0).exp();
            assert!(at1.lo().to_f64() - 1e-3 <= reference && reference <= at1.hi().to_f64() + 1e-3);
        }
    }

    #[test]
    fn bochner_mass_encloses_one() {
        // phi = 1: density sqrt(n/4pi) e^{-nx^2/4}, spatial envelope with
        // sigma2 = 2/n.
        let n = 4u64;
        let scale = d(2, 0); // sqrt(n/4pi) = sqrt(1/pi) < 2 for n = 4
        let env = Envelope::Gaussian { scale, sigma2_num: 2, sigma2_den: n };
        let mass = bochner_mass(&CharOracle::constant_one(), n, &env, 5).unwrap();
        assert!(mass.contains(&Dyadic::one()), "mass {mass:?}");
        assert!(mass.width() <= Dyadic::pow2(-4));
    }

    #[test]
    fn bochner_dist_agrees_with_point_mass() {
        let nu = bochner_dist(&CharOracle::constant_one()).unwrap();
        let delta0 = DistOracle::point_mass_at(Dyadic::zero());
        for n in 0..=2u32 {
            let w = TestFunction::window(n);
            let a = nu.windowed_eval(&w, &Freq::zero(), 4).unwrap();
            let b = delta0.windowed_eval(&w, &Freq::zero(), 4).unwrap();
            assert!(a.intersects(&b), "w_{n}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn bochner_dist_recovers_uniform_mass() {
        let phi = CharOracle::sinc_uniform(d(1, -1)).unwrap();
        let nu = bochner_dist(&phi).unwrap();
        let v = nu.windowed_eval(&TestFunction::window(0), &Freq::zero(), 4).unwrap();
        assert!(v.re.contains(&d(3, -2)), "3/4 not enclosed: {:?}", v.re);
    }

    #[test]
    fn damped_oracle_matches_direct_product() {
        let phi = CharOracle::sinc_uniform(d(1, -1)).unwrap();
        let psi = damped_oracle(&phi, 4);
        for t in [0i64, 1, 3] {
            let v = psi.eval(&Freq::Dyadic(Dyadic::from_int(t)), 10).unwrap();
            let tf = t as f64;
            let sinc = if t == 0 { 1.0 } else { (tf / 2.0).sin() / (tf / 2.0) };
            let reference = sinc * (-tf * tf / 4.0).exp();
            assert!(
                v.re.lo().to_f64() - 1e-3 <= reference && reference <= v.re.hi().to_f64() + 1e-3
            );
        }
    }

    #[test]
    fn fubini_consistency() {
        // Both routes to mu(h_n): the frequency-space pairing and the
        // real-space mollified expectation (f64 reference).
        let f = TestFunction::window(0);
        let n = 64u64;
        let k = 6i64;
        // mu = uniform[-1/2, 1/2].
        let phi = CharOracle::from_dist(uniform_half());
        let freq_route = smoothed_expectation(&phi, &f, n, k).unwrap();
        // Real-space reference: mu(h_n) = integral_{-1/2}^{1/2} h_n(x) dx.
        let sqrt_n = (n as f64).sqrt();
        let h = |x: f64| -> f64 {
            let m = 4000usize;
            let (lo, hi) = (-8.0f64, 8.0f64);
            let dt = (hi - lo) / m as f64;
            let mut acc = 0.0;
            for i in 0..=m {
                let t = lo + i as f64 * dt;
                let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                let arg: f64 = x + t / sqrt_n;
                let fval = (1.0 - arg.abs()).max(0.0);
                acc += w * (-t * t / 2.0).exp() * fval;
            }
            acc * dt / 3.0 / (2.0 * std::f64::consts::PI).sqrt()
        };
        let m = 2000usize;
        let dt = 1.0 / m as f64;
        let mut reference = 0.0;
        for i in 0..=m {
            let x = -0.5 + i as f64 * dt;
            let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            reference += w * h(x);
        }
        reference *= dt / 3.0;
        assert!(
            freq_route.re.lo().to_f64() - 1e-4 <= reference
                && reference <= freq_route.re.hi().to_f64() + 1e-4,
            "{:?} vs {reference}",
            freq_route.re
        );
    }
}
