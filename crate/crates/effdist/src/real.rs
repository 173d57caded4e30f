//! Computable reals as certified evaluation oracles.
//!
//! A [`RealOracle`] produces, for each precision `k`, a dyadic interval of
//! width at most `2^-k` containing the represented real. Different calls may
//! return different enclosures, but all of them contain the same real, so any
//! two always intersect.

use crate::dyadic::{Dyadic, Round};
use crate::elem;
use crate::error::{Error, Result};
use crate::interval::Interval;
use num_bigint::BigInt;
use num_traits::Zero;
use std::sync::Arc;

#[derive(Clone)]
pub struct RealOracle {
    eval: Arc<dyn Fn(i64) -> Interval + Send + Sync>,
}

impl RealOracle {
    /// Wrap an arbitrary evaluator. The closure must honor the width
    /// contract; this is the extension point for caller-defined reals.
    pub fn from_fn(f: impl Fn(i64) -> Interval + Send + Sync + 'static) -> Self {
        RealOracle { eval: Arc::new(f) }
    }

    /// Exact dyadic constant; every enclosure is the point interval.
    pub fn from_dyadic(d: Dyadic) -> Self {
        RealOracle::from_fn(move |_| Interval::point(d.clone()))
    }

    pub fn from_int(i: i64) -> Self {
        RealOracle::from_dyadic(Dyadic::from_int(i))
    }

    /// Exact rational `num/den`.
    pub fn from_ratio(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParams("rational with zero denominator"));
        }
        let n = Dyadic::new(num, 0);
        let d = Dyadic::new(den, 0);
        Ok(RealOracle::from_fn(move |k| {
            Interval::new(
                n.div_round(&d, k + 1, Round::Down),
                n.div_round(&d, k + 1, Round::Up),
            )
        }))
    }

    /// Square root of a nonnegative rational.
    pub fn sqrt_ratio(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParams("rational with zero denominator"));
        }
        let n = Dyadic::from_int(num as i64);
        let d = Dyadic::from_int(den as i64);
        Ok(RealOracle::from_fn(move |k| {
            let ratio = Interval::new(
                n.div_round(&d, 2 * k + 6, Round::Down),
                n.div_round(&d, 2 * k + 6, Round::Up),
            );
            ratio.sqrt(k + 2)
        }))
    }

    pub fn pi() -> Self {
        RealOracle::from_fn(|k| elem::pi(k))
    }

    /// Enclosure of the real with width `<= 2^-k`.
    pub fn eval(&self, k: i64) -> Interval {
        let r = (self.eval)(k);
        debug_assert!(r.width() <= Dyadic::pow2(-k), "real oracle violated its width contract");
        r
    }
}

impl std::fmt::Debug for RealOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RealOracle({:?})", self.eval(12))
    }
}
