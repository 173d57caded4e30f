//! Certified characteristic functions.
//!
//! [`CharOracle::from_dist`] turns a distribution oracle into a certified
//! point evaluator of `phi(t) = mu(e^{itx})`: a tightness search picks a
//! window whose complement mass is certifiably small, the windowed
//! expectation is evaluated exactly, and the tail is absorbed into an
//! explicit box. The same tightness index yields a modulus of continuity,
//! and for effectively convergent sequences a single modulus valid for every
//! member at once, which is what makes the grid-based convergence transfer
//! ([`levy_transfer`]) finite.

use crate::dist::{seq_tightness, tightness, DistCert, DistOracle, Freq};
use crate::dyadic::Dyadic;
use crate::elem;
use crate::error::{Error, Result};
use crate::interval::{ComplexInterval, Interval};
use crate::limits::limits;
use crate::testfn::TestFunction;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

#[derive(Clone)]
enum CharImpl {
    FromDist { dist: DistOracle, tight_cache: Arc<Mutex<BTreeMap<i64, u32>>> },
    ConstantOne,
    SincUniform { half_width: Dyadic },
    Gaussian,
    Custom {
        point: Arc<dyn Fn(&Interval, i64) -> Result<ComplexInterval> + Send + Sync>,
        modulus: Arc<dyn Fn(i64) -> i64 + Send + Sync>,
    },
}

/// A characteristic function as a certified point evaluator with a
/// recursive modulus of continuity.
///
/// `pos_def` and `unit_at_zero` are caller-asserted contracts, never
/// verified from finitely many evaluations; operations that require them
/// check the flags and surface runtime violations (negative densities,
/// imaginary residues) as typed errors.
#[derive(Clone)]
pub struct CharOracle {
    imp: CharImpl,
    pos_def: bool,
    unit_at_zero: bool,
    lip: Option<Dyadic>,
}

impl CharOracle {
    /// The characteristic function of a certified distribution oracle.
    pub fn from_dist(dist: DistOracle) -> Self {
        CharOracle {
            imp: CharImpl::FromDist { dist, tight_cache: Arc::new(Mutex::new(BTreeMap::new())) },
            pos_def: true,
            unit_at_zero: true,
            lip: None,
        }
    }

    /// `phi(t) = 1` (the point mass at zero).
    pub fn constant_one() -> Self {
        CharOracle {
            imp: CharImpl::ConstantOne,
            pos_def: true,
            unit_at_zero: true,
            lip: Some(Dyadic::zero()),
        }
    }

    /// `phi(t) = sin(a t)/(a t)`, the uniform distribution on `[-a, a]`.
    pub fn sinc_uniform(half_width: Dyadic) -> Result<Self> {
        if !half_width.is_positive() {
            return Err(Error::InvalidParams("sinc family needs a positive half-width"));
        }
        Ok(CharOracle {
            lip: Some(half_width.clone()),
            imp: CharImpl::SincUniform { half_width },
            pos_def: true,
            unit_at_zero: true,
        })
    }

    /// `phi(t) = e^{-t^2/2}`, the standard Gaussian.
    pub fn gaussian() -> Self {
        CharOracle {
            imp: CharImpl::Gaussian,
            pos_def: true,
            unit_at_zero: true,
            lip: Some(Dyadic::one()),
        }
    }

    /// A caller-supplied evaluator with its modulus; the flags are the
    /// caller's assertion.
    pub fn custom(
        point: impl Fn(&Interval, i64) -> Result<ComplexInterval> + Send + Sync + 'static,
        modulus: impl Fn(i64) -> i64 + Send + Sync + 'static,
        lip: Option<Dyadic>,
        pos_def: bool,
        unit_at_zero: bool,
    ) -> Self {
        CharOracle {
            imp: CharImpl::Custom { point: Arc::new(point), modulus: Arc::new(modulus) },
            pos_def,
            unit_at_zero,
            lip,
        }
    }

    pub fn pos_def(&self) -> bool {
        self.pos_def
    }

    pub fn unit_at_zero(&self) -> bool {
        self.unit_at_zero
    }

    /// A Lipschitz bound when one is known; tighter box evaluation.
    pub fn lip(&self) -> Option<&Dyadic> {
        self.lip.as_ref()
    }

    fn tight(&self, k: i64) -> Result<u32> {
        match &self.imp {
            CharImpl::FromDist { dist, tight_cache } => {
                if let Some(l) = tight_cache.lock().unwrap().get(&k) {
                    return Ok(*l);
                }
                let l = tightness(dist, k)?;
                tight_cache.lock().unwrap().insert(k, l);
                Ok(l)
            }
            _ => Ok(0),
        }
    }

    /// Enclosure of `phi(t)` with width `<= 2^-k` per component.
    pub fn eval(&self, t: &Freq, k: i64) -> Result<ComplexInterval> {
        match &self.imp {
            CharImpl::FromDist { dist, .. } => {
                let l = self.tight(k + 2)?;
                let windowed = dist.windowed_eval(&TestFunction::window(l), t, k + 2)?;
                // The unwindowed remainder has modulus below the complement
                // mass, certified under 2^-(k+2) by the tightness search.
                Ok(windowed.widen(&Dyadic::pow2(-(k + 2))))
            }
            _ => self.eval_box(&t.enclose(k + 2), k),
        }
    }

    /// Enclosure of `{phi(t) : t in the box}`, width `<= 2^-k` plus the
    /// box's own extent times the oracle's continuity data.
    pub fn eval_box(&self, t: &Interval, k: i64) -> Result<ComplexInterval> {
        match &self.imp {
            CharImpl::ConstantOne => Ok(ComplexInterval::one()),
            CharImpl::Gaussian => {
                Ok(ComplexInterval::real(elem::exp_neg_half_sq(t, k)?))
            }
            CharImpl::SincUniform { half_width } => sinc_enclosure(&t.scale(half_width), k),
            CharImpl::FromDist { dist, .. } => {
                let l = self.tight(k + 2)?;
                let mid = t.midpoint();
                let windowed =
                    dist.windowed_eval(&TestFunction::window(l), &Freq::Dyadic(mid), k + 2)?;
                // Windowed part moves at most (l+1) per unit of t; the tail
                // box is frequency-independent.
                let drift = t.width().shift(-1).mul(&Dyadic::from_int(l as i64 + 1));
                Ok(windowed.widen(&drift.add(&Dyadic::pow2(-(k + 2)))))
            }
            CharImpl::Custom { point, modulus } => {
                if t.is_point() {
                    return point(t, k);
                }
                let mid = Interval::point(t.midpoint());
                let base = point(&mid, k + 1)?;
                let half = t.width().shift(-1);
                let drift = match &self.lip {
                    Some(lip) => half.mul(lip),
                    None => {
                        // Step the modulus across the half-width.
                        let beta = modulus(k + 1);
                        let steps = half.shift(beta).ceil_int();
                        let steps: i64 = steps.try_into().map_err(|_| Error::PrecisionOverflow)?;
                        Dyadic::pow2(-(k + 1)).mul_int(steps.max(0))
                    }
                };
                Ok(base.widen(&drift))
            }
        }
    }

    /// Enclosures of `phi` over `count` consecutive cells
    /// `[start + i step, start + (i+1) step]`. Distribution-backed oracles
    /// share their windowed-phase rotations along the grid; closed forms
    /// evaluate cell by cell.
    pub fn eval_cells(
        &self,
        start: &Dyadic,
        step: &Dyadic,
        count: usize,
        k: i64,
    ) -> Result<Vec<ComplexInterval>> {
        match &self.imp {
            CharImpl::FromDist { dist, .. } => {
                let l = self.tight(k + 2)?;
                let w = TestFunction::window(l);
                let mut cells = dist.windowed_eval_cells(&w, start, step, count, k)?;
                let tail = Dyadic::pow2(-(k + 2));
                for c in &mut cells {
                    *c = c.widen(&tail);
                }
                Ok(cells)
            }
            _ => {
                let mut out = Vec::with_capacity(count);
                let mut z0 = start.clone();
                for _ in 0..count {
                    let z1 = z0.add(step);
                    out.push(self.eval_box(&Interval::new(z0.clone(), z1.clone()), k)?);
                    z0 = z1;
                }
                Ok(out)
            }
        }
    }

    /// Modulus of continuity: a step exponent `beta` with
    /// `|t - s| < 2^-beta  =>  |phi(t) - phi(s)| < 2^-k`.
    pub fn modulus(&self, k: i64) -> Result<i64> {
        match &self.imp {
            CharImpl::FromDist { .. } => {
                let l = self.tight(k + 2)?;
                Ok(modulus_from_window(l, k))
            }
            CharImpl::ConstantOne => Ok(0),
            CharImpl::Gaussian => Ok(k + 1),
            CharImpl::SincUniform { half_width } => {
                Ok((k + half_width.log2_strict_bound()).max(0))
            }
            CharImpl::Custom { modulus, .. } => Ok(modulus(k)),
        }
    }
}

/// The modulus exponent from a window index: the smallest `beta` with
/// `2^-beta < 1 / ((l + 1) 2^{k+2})`.
pub fn modulus_from_window(l: u32, k: i64) -> i64 {
    let bits = 64 - (l as u64 + 1).leading_zeros() as i64;
    k + 2 + bits
}

/// Enclosure of `sin(u)/u` (continuous through 0).
fn sinc_enclosure(u: &Interval, k: i64) -> Result<ComplexInterval> {
    Ok(ComplexInterval::real(elem::sinc(u, k)?))
}

/// A single equi-continuity modulus valid simultaneously for the limit and
/// every member of an effectively convergent sequence of distributions:
/// the sequence-uniform tightness index replaces the per-member one.
pub fn equicont_modulus(cert: &DistCert, k: i64) -> Result<i64> {
    let alpha = seq_tightness(cert, k + 2)?;
    Ok(modulus_from_window(alpha, k))
}

/// Number of grid points the convergence transfer inspects.
pub fn levy_grid_size(m_bound: u32, beta: i64) -> u64 {
    2 * (m_bound as u64) * (1u64 << beta.max(0).min(62)) + 1
}

/// Effective locally-uniform convergence of characteristic functions from
/// effective convergence of distributions.
///
/// Returns `eta` such that for all `m >= eta` and `|t| <= m_bound`,
/// `|phi_m(t) - phi(t)| < 3 * 2^-k` (callers re-index `k -> k + 2` for a
/// clean `2^-k`). The threshold is the maximum of the certificate's
/// windowed-exponential modulus over the dyadic grid of step
/// `2^-beta(k)`; between grid points both sides move by less than `2^-k`
/// by equi-continuity.
pub fn levy_transfer(cert: &DistCert, m_bound: u32, k: i64) -> Result<usize> {
    let beta = equicont_modulus(cert, k)?;
    let count = levy_grid_size(m_bound, beta);
    if count > limits().grid_cap {
        return Err(Error::GridBudgetExceeded(count));
    }
    let alpha = seq_tightness(cert, k + 2)?;
    let step = Dyadic::pow2(-beta);
    let mut eta = 0usize;
    let mut t = Dyadic::from_int(-(m_bound as i64));
    for _ in 0..count {
        eta = eta.max((cert.modulus)(alpha, &t, k + 2));
        t = t.add(&step);
    }
    Ok(eta)
}

/// Certificate of effective convergence of characteristic functions,
/// uniform on compact ranges: `modulus(range, k)` returns a threshold `m0`
/// with `|phi_m(t) - phi(t)| < 2^-k` for all `m >= m0` and `|t| <= range`.
#[derive(Clone)]
pub struct CharCert {
    pub seq: Arc<dyn Fn(usize) -> CharOracle + Send + Sync>,
    pub limit: CharOracle,
    pub modulus: Arc<dyn Fn(&Dyadic, i64) -> usize + Send + Sync>,
}

impl CharCert {
    pub fn constant(phi: CharOracle) -> Self {
        let p = phi.clone();
        CharCert {
            seq: Arc::new(move |_| p.clone()),
            limit: phi,
            modulus: Arc::new(|_, _| 0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistOracle;
    use num_bigint::BigInt;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    fn delta0_char() -> CharOracle {
        CharOracle::from_dist(DistOracle::point_mass_at(Dyadic::zero()))
    }

    fn uniform_half_char() -> CharOracle {
        CharOracle::from_dist(DistOracle::uniform_symmetric(d(1, -1)).unwrap())
    }

    #[test]
    fn point_mass_char_is_one() {
        let phi = delta0_char();
        for t in [-5i64, 0, 1, 17] {
            let v = phi.eval(&Freq::Dyadic(Dyadic::from_int(t)), 10).unwrap();
            assert!(v.re.contains(&Dyadic::one()));
            assert!(v.im.contains(&Dyadic::zero()));
            assert!(v.width() <= Dyadic::pow2(-10));
        }
    }

    #[test]
    fn uniform_char_matches_sinc() {
        let phi = uniform_half_char();
        for j in [-9i64, -3, 1, 2, 7] {
            let t = d(j, -1); // j/2
            let v = phi.eval(&Freq::Dyadic(t.clone()), 10).unwrap();
            let tf = t.to_f64();
            let reference = (tf / 2.0).sin() / (tf / 2.0);
            assert!(
                v.re.lo().to_f64() - 1e-6 <= reference && reference <= v.re.hi().to_f64() + 1e-6,
                "t={tf}: {:?} vs {reference}",
                v.re
            );
            // The closed-form family agrees.
            let closed = CharOracle::sinc_uniform(d(1, -1)).unwrap();
            let w = closed.eval(&Freq::Dyadic(t), 10).unwrap();
            assert!(v.intersects(&w));
        }
    }

    #[test]
    fn binomial_char_closed_form() {
        let m = 4u32;
        let phi = CharOracle::from_dist(
            DistOracle::binomial(m, BigInt::from(1), BigInt::from(2)).unwrap(),
        );
        for j in [-8i64, -1, 0, 3, 5] {
            let t = d(j, -2);
            let v = phi.eval(&Freq::Dyadic(t.clone()), 10).unwrap();
            let tf = t.to_f64();
            // (p e^{it} + q)^m at p = q = 1/2
            let re = 0.5 * tf.cos() + 0.5;
            let im = 0.5 * tf.sin();
            let mut zr = 1.0f64;
            let mut zi = 0.0f64;
            for _ in 0..m {
                let nr = zr * re - zi * im;
                zi = zr * im + zi * re;
                zr = nr;
            }
            assert!(v.re.lo().to_f64() - 1e-6 <= zr && zr <= v.re.hi().to_f64() + 1e-6);
            assert!(v.im.lo().to_f64() - 1e-6 <= zi && zi <= v.im.hi().to_f64() + 1e-6);
        }
    }

    #[test]
    fn char_at_zero_is_one() {
        for phi in [delta0_char(), uniform_half_char(), CharOracle::gaussian()] {
            let v = phi.eval(&Freq::zero(), 12).unwrap();
            assert!(v.re.contains(&Dyadic::one()));
            assert!(v.im.contains(&Dyadic::zero()));
        }
    }

    #[test]
    fn modulus_bound_and_hermitian_symmetry() {
        let phi = uniform_half_char();
        let one_plus = Dyadic::one().add(&Dyadic::pow2(-9));
        for j in [-13i64, -2, 0, 5, 11] {
            let t = d(j, -2);
            let v = phi.eval(&Freq::Dyadic(t.clone()), 10).unwrap();
            assert!(v.abs_hi(20) <= one_plus);
            let mirrored = phi.eval(&Freq::Dyadic(t.neg()), 10).unwrap();
            assert!(mirrored.intersects(&v.conj()));
        }
    }

    #[test]
    fn modulus_validity_sampled() {
        let phi = uniform_half_char();
        let k = 6i64;
        let beta = phi.modulus(k).unwrap();
        let h = Dyadic::pow2(-beta - 1);
        for j in [-5i64, 0, 3, 9] {
            let t = d(j, -1);
            let k_eval = k + 3;
            let a = phi.eval(&Freq::Dyadic(t.clone()), k_eval).unwrap();
            let b = phi.eval(&Freq::Dyadic(t.add(&h)), k_eval).unwrap();
            let gap = a.sub(&b).abs_hi(20);
            let allowed = Dyadic::pow2(-k).add(&Dyadic::pow2(-k_eval).shift(1));
            assert!(gap <= allowed, "modulus violated at t={}: {gap} > {allowed}", t.to_f64());
        }
    }

    #[test]
    fn equicont_modulus_examples() {
        let constant = DistCert::constant(DistOracle::point_mass_at(Dyadic::zero()));
        for k in [2i64, 5, 9] {
            assert_eq!(equicont_modulus(&constant, k).unwrap(), k + 3);
        }
        let cert = shrinking_uniform_cert();
        for k in [3i64, 6] {
            assert!(equicont_modulus(&cert, k).unwrap() <= k + 4);
        }
        // Nondecreasing in k.
        let b1 = equicont_modulus(&cert, 3).unwrap();
        let b2 = equicont_modulus(&cert, 4).unwrap();
        assert!(b2 >= b1);
    }

    #[test]
    fn levy_grid_size_example() {
        assert_eq!(levy_grid_size(1, 3), 17);
    }

    #[test]
    fn levy_constant_sequence() {
        let cert = DistCert::constant(DistOracle::point_mass_at(Dyadic::zero()));
        assert_eq!(levy_transfer(&cert, 3, 4).unwrap(), 0);
    }

    #[test]
    fn levy_shrinking_uniforms_verified() {
        let cert = shrinking_uniform_cert();
        let m_bound = 1u32;
        let k = 4i64;
        let eta = levy_transfer(&cert, m_bound, k).unwrap();
        // Verified gap at the returned threshold: |sinc(t 2^-(eta+1)) - 1|
        // <= (t 2^-(eta+1))^2 / 6 must sit under 3 * 2^-k on the range.
        let u = Dyadic::pow2(-(eta as i64 + 1)); // t = 1, worst case on [-1, 1]
        let analytic = u.square().div_round(&Dyadic::from_int(6), 40, crate::dyadic::Round::Up);
        assert!(analytic < Dyadic::pow2(-k).mul_int(3));
        // And the certified oracle gap agrees.
        let phi_eta = CharOracle::from_dist((cert.seq)(eta));
        let v = phi_eta.eval(&Freq::Dyadic(Dyadic::one()), k + 4).unwrap();
        let gap = v.sub(&ComplexInterval::one()).abs_hi(20);
        assert!(gap < Dyadic::pow2(-k).mul_int(3));
    }

    #[test]
    fn sinc_enclosure_branches_agree() {
        // Series vs division around the branch threshold.
        for j in [1i64, 3, 5, 9] {
            let u = Interval::point(d(j, -1));
            let a = sinc_enclosure(&u, 14).unwrap();
            let uf = d(j, -1).to_f64();
            let reference = uf.sin() / uf;
            assert!(a.re.lo().to_f64() - 1e-6 <= reference && reference <= a.re.hi().to_f64() + 1e-6);
        }
    }

    #[test]
    fn custom_oracle_box_eval() {
        // cos t as a custom oracle with lip = 1.
        let phi = CharOracle::custom(
            |t, k| Ok(ComplexInterval::real(elem::cos(t, k)?)),
            |k| k + 1,
            Some(Dyadic::one()),
            true,
            true,
        );
        let widebox = Interval::new(Dyadic::zero(), d(1, -2));
        let v = phi.eval_box(&widebox, 10).unwrap();
        assert!(v.re.contains(&Dyadic::one())); // cos 0
        assert!(v.re.lo().to_f64() <= 0.25f64.cos());
    }

    fn shrinking_uniform_cert() -> DistCert {
        let seq = |m: usize| DistOracle::uniform_symmetric(Dyadic::pow2(-(m as i64 + 1))).unwrap();
        DistCert {
            seq: Arc::new(seq),
            limit: DistOracle::point_mass_at(Dyadic::zero()),
            modulus: Arc::new(|_, t, k| {
                let factor = Dyadic::one().add(&t.abs());
                (k + factor.mag_bits()).max(0) as usize
            }),
        }
    }

}
