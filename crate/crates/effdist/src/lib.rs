//! Error-certified probability distributions and characteristic functions.
//!
//! Every numeric result in this crate is an *enclosure*: a dyadic interval
//! (or a rectangular complex box) guaranteed to contain the exact value, with
//! width controlled by a requested precision `2^-k`. The certified path uses
//! exact dyadic arithmetic only; rounding happens solely through explicit
//! outward operations.
//!
//! The main layers:
//!
//! - [`dyadic`], [`interval`], [`elem`], [`real`]: exact arithmetic,
//!   certified elementary functions, computable reals.
//! - [`testfn`]: compactly supported piecewise-linear windows, including the
//!   trapezoid family used for effective tightness.
//! - [`quad`]: rigorous integration on finite intervals and on the line,
//!   with analytic tail truncation.
//! - [`dist`]: probability distributions as certified evaluation oracles of
//!   windowed expectations, plus effective-tightness searches.
//! - [`charfun`]: characteristic functions from distribution oracles, with
//!   certified moduli of continuity and the locally-uniform convergence
//!   transfer on dyadic grids.
//! - [`transfer`]: the constructive bridges in both directions between
//!   characteristic-function data and distribution data (Gaussian-smoothed
//!   expectations, density reconstruction).
//! - [`dml`]: the certified central-limit bound for standardized Bernoulli
//!   sums, with explicit thresholds for any target precision.
//! - [`cli`]: the command-line front end used by the `effdist` binary.

pub mod cli;
pub mod charfun;
pub mod dist;
pub mod dml;
pub mod dyadic;
pub mod elem;
pub mod error;
pub mod interval;
pub mod limits;
pub mod quad;
pub mod real;
pub mod testfn;
pub mod transfer;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use interval::{ComplexInterval, Interval};
pub use real::RealOracle;
pub use testfn::TestFunction;
