//! Compactly supported piecewise-linear test functions.
//!
//! These are the windows the distribution oracles integrate against: the
//! trapezoidal family [`TestFunction::window`] equal to 1 on `[-n, n]` and
//! supported on `[-n-1, n+1]`, and anything else callers build from dyadic
//! breakpoints. Segment slopes are required to be exactly dyadic so that
//! evaluation at dyadic points is exact; every construction in this crate
//! satisfies that.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::Interval;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestFunction {
    /// Strictly increasing in x; empty for the zero function.
    /// First and last y are zero.
    breakpoints: Vec<(Dyadic, Dyadic)>,
    /// Exact slope of each segment; `breakpoints.len() - 1` entries.
    slopes: Vec<Dyadic>,
    lip: Dyadic,
    sup_norm: Dyadic,
}

impl TestFunction {
    /// The zero function.
    pub fn zero() -> Self {
        TestFunction {
            breakpoints: Vec::new(),
            slopes: Vec::new(),
            lip: Dyadic::zero(),
            sup_norm: Dyadic::zero(),
        }
    }

    /// The trapezoid equal to 1 on `[-n, n]`, supported on `[-n-1, n+1]`.
    /// For `n = 0` this degenerates to the unit triangle on `[-1, 1]`.
    pub fn window(n: u32) -> Self {
        let n = n as i64;
        let pts = if n == 0 {
            vec![
                (Dyadic::from_int(-1), Dyadic::zero()),
                (Dyadic::zero(), Dyadic::one()),
                (Dyadic::from_int(1), Dyadic::zero()),
            ]
        } else {
            vec![
                (Dyadic::from_int(-n - 1), Dyadic::zero()),
                (Dyadic::from_int(-n), Dyadic::one()),
                (Dyadic::from_int(n), Dyadic::one()),
                (Dyadic::from_int(n + 1), Dyadic::zero()),
            ]
        };
        TestFunction::from_breakpoints(pts).expect("window breakpoints are valid")
    }

    pub fn from_breakpoints(breakpoints: Vec<(Dyadic, Dyadic)>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Ok(TestFunction::zero());
        }
        if breakpoints.len() < 2 {
            return Err(Error::InvalidParams("a nonzero test function needs at least 2 breakpoints"));
        }
        if !breakpoints.first().unwrap().1.is_zero() || !breakpoints.last().unwrap().1.is_zero() {
            return Err(Error::InvalidParams("test function must vanish at the support boundary"));
        }
        let mut slopes = Vec::with_capacity(breakpoints.len() - 1);
        let mut lip = Dyadic::zero();
        let mut sup = Dyadic::zero();
        for w in breakpoints.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            if x1 <= x0 {
                return Err(Error::InvalidParams("breakpoints must be strictly increasing in x"));
            }
            let slope = exact_dyadic_ratio(&y1.sub(y0), &x1.sub(x0))
                .ok_or(Error::InvalidParams("segment slope is not exactly dyadic"))?;
            lip = Dyadic::max(&lip, &slope.abs());
            sup = Dyadic::max(&sup, &y0.abs());
            slopes.push(slope);
        }
        sup = Dyadic::max(&sup, &breakpoints.last().unwrap().1.abs());
        Ok(TestFunction { breakpoints, slopes, lip, sup_norm: sup })
    }

    pub fn is_zero(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn breakpoints(&self) -> &[(Dyadic, Dyadic)] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[Dyadic] {
        &self.slopes
    }

    pub fn lip(&self) -> &Dyadic {
        &self.lip
    }

    pub fn sup_norm(&self) -> &Dyadic {
        &self.sup_norm
    }

    /// Support `[a, b]`; `(0, 0)` for the zero function.
    pub fn support(&self) -> (Dyadic, Dyadic) {
        if self.breakpoints.is_empty() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        (
            self.breakpoints.first().unwrap().0.clone(),
            self.breakpoints.last().unwrap().0.clone(),
        )
    }

    /// `max(|a|, |b|)` over the support, the bound `L` with `f(x) = 0` for
    /// `|x| >= L`.
    pub fn support_radius(&self) -> Dyadic {
        let (a, b) = self.support();
        Dyadic::max(&a.abs(), &b.abs())
    }

    /// Exact value at a dyadic point.
    pub fn value_at(&self, x: &Dyadic) -> Dyadic {
        if self.breakpoints.is_empty() {
            return Dyadic::zero();
        }
        let (a, b) = self.support();
        if x <= &a || x >= &b {
            // Endpoint values are zero by the construction invariant.
            if x == &a || x == &b {
                return Dyadic::zero();
            }
            return Dyadic::zero();
        }
        // Find the segment containing x.
        let mut idx = 0;
        for (i, w) in self.breakpoints.windows(2).enumerate() {
            if x < &w[1].0 {
                idx = i;
                break;
            }
        }
        let (x0, y0) = &self.breakpoints[idx];
        y0.add(&self.slopes[idx].mul(&x.sub(x0)))
    }

    /// Enclosure of the image of `x` under the function. Exact endpoints:
    /// the extra width never exceeds `lip * width(x)`.
    pub fn eval(&self, x: &Interval) -> Interval {
        if self.breakpoints.is_empty() {
            return Interval::zero();
        }
        let (a, b) = self.support();
        if x.hi() <= &a || x.lo() >= &b {
            return Interval::zero();
        }
        let lo_clamped = Dyadic::max(x.lo(), &a);
        let hi_clamped = Dyadic::min(x.hi(), &b);
        let mut min = self.value_at(&lo_clamped);
        let mut max = min.clone();
        let v = self.value_at(&hi_clamped);
        min = Dyadic::min(&min, &v);
        max = Dyadic::max(&max, &v);
        for (bx, by) in &self.breakpoints {
            if bx > &lo_clamped && bx < &hi_clamped {
                min = Dyadic::min(&min, by);
                max = Dyadic::max(&max, by);
            }
        }
        // Zero is in the image when x pokes outside the support.
        if x.lo() < &a || x.hi() > &b {
            min = Dyadic::min(&min, &Dyadic::zero());
            max = Dyadic::max(&max, &Dyadic::zero());
        }
        Interval::new(min, max)
    }

    /// Recursive modulus of continuity: the smallest natural `alpha` with
    /// `|x - y| < 2^-alpha  =>  |f(x) - f(y)| < 2^-k`.
    pub fn modulus(&self, k: i64) -> i64 {
        if self.lip.is_zero() {
            return 0;
        }
        // Smallest alpha with lip < 2^(alpha - k).
        (k + self.lip.log2_strict_bound()).max(0)
    }

    /// Exact upper bound on the L1 norm: the trapezoid sum of |y| values,
    /// which dominates the integral of |f| segment by segment (|linear| is
    /// convex).
    pub fn l1_norm_upper(&self) -> Dyadic {
        let mut total = Dyadic::zero();
        for (w, _s) in self.breakpoints.windows(2).zip(&self.slopes) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            let avg = y0.abs().add(&y1.abs()).shift(-1);
            total = total.add(&avg.mul(&x1.sub(x0)));
        }
        total
    }

    /// Exact integral of `f` (signed), segment-by-segment trapezoid value.
    pub fn integral_exact(&self) -> Dyadic {
        let mut total = Dyadic::zero();
        for w in self.breakpoints.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            total = total.add(&y0.add(y1).shift(-1).mul(&x1.sub(x0)));
        }
        total
    }

    /// Total variation of the slope across breakpoints, counting the jumps
    /// from and to the zero slope outside the support. This is the constant
    /// `V` in the certified Fourier-decay bound `|\hat f(z)| <= V / z^2`.
    pub fn slope_jump_variation(&self) -> Dyadic {
        if self.breakpoints.is_empty() {
            return Dyadic::zero();
        }
        let mut v = self.slopes[0].abs();
        for w in self.slopes.windows(2) {
            v = v.add(&w[1].sub(&w[0]).abs());
        }
        v.add(&self.slopes.last().unwrap().abs())
    }

    /// Slope jumps `(x_j, slope_after - slope_before)` including the support
    /// endpoints (jump from/to zero).
    pub fn slope_jumps(&self) -> Vec<(Dyadic, Dyadic)> {
        if self.breakpoints.is_empty() {
            return Vec::new();
        }
        let mut jumps = Vec::with_capacity(self.breakpoints.len());
        jumps.push((self.breakpoints[0].0.clone(), self.slopes[0].clone()));
        for i in 1..self.slopes.len() {
            let d = self.slopes[i].sub(&self.slopes[i - 1]);
            if !d.is_zero() {
                jumps.push((self.breakpoints[i].0.clone(), d));
            }
        }
        jumps.push((
            self.breakpoints.last().unwrap().0.clone(),
            self.slopes.last().unwrap().neg(),
        ));
        jumps
    }
}

/// `num/den` when the quotient is exactly dyadic, else `None`.
fn exact_dyadic_ratio(num: &Dyadic, den: &Dyadic) -> Option<Dyadic> {
    if num.is_zero() {
        return Some(Dyadic::zero());
    }
    // den mantissa is odd (canonical form), so the quotient is dyadic iff
    // it divides the numerator mantissa.
    let (q, r) = num.mantissa().div_rem(den.mantissa());
    if !r.is_zero() {
        return None;
    }
    Some(Dyadic::new(q, num.exponent() - den.exponent()))
}

/// The complement window `1 - f`. It has no compact support, so it only
/// appears in mass computations of the form `mu(1 - f) = 1 - mu(f)`.
#[derive(Clone, Debug)]
pub struct ComplementWindow(pub TestFunction);

impl ComplementWindow {
    pub fn eval(&self, x: &Interval) -> Interval {
        Interval::one().sub(&self.0.eval(x))
    }
}

// JSON wire format: an array of [x, y] pairs, each coordinate a
// mantissa/exponent object. Round-trips are bit-exact.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MantissaRepr {
    Small(i64),
    Big(String),
}

#[derive(Serialize, Deserialize)]
struct DyadicJson {
    m: MantissaRepr,
    e: i64,
}

impl From<&Dyadic> for DyadicJson {
    fn from(d: &Dyadic) -> Self {
        use num_traits::ToPrimitive;
        let m = match d.mantissa().to_i64() {
            Some(v) => MantissaRepr::Small(v),
            None => MantissaRepr::Big(d.mantissa().to_string()),
        };
        DyadicJson { m, e: d.exponent() }
    }
}

impl TryFrom<DyadicJson> for Dyadic {
    type Error = Error;
    fn try_from(j: DyadicJson) -> Result<Dyadic> {
        let m = match j.m {
            MantissaRepr::Small(v) => BigInt::from(v),
            MantissaRepr::Big(s) => s
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad mantissa: {s}")))?,
        };
        Ok(Dyadic::new(m, j.e))
    }
}

impl Serialize for TestFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[DyadicJson; 2]> = self
            .breakpoints
            .iter()
            .map(|(x, y)| [DyadicJson::from(x), DyadicJson::from(y)])
            .collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TestFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[DyadicJson; 2]> = Vec::deserialize(d)?;
        let mut bps = Vec::with_capacity(pairs.len());
        for [x, y] in pairs {
            bps.push((
                Dyadic::try_from(x).map_err(serde::de::Error::custom)?,
                Dyadic::try_from(y).map_err(serde::de::Error::custom)?,
            ));
        }
        TestFunction::from_breakpoints(bps).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn window_samples() {
        let w1 = TestFunction::window(1);
        assert_eq!(w1.value_at(&d(1, -1)), Dyadic::one()); // plateau
        assert_eq!(w1.value_at(&d(3, -1)), d(1, -1)); // descending edge
        assert_eq!(w1.value_at(&d(3, 0)), Dyadic::zero()); // outside support
        assert_eq!(w1.lip(), &Dyadic::one());
        assert_eq!(w1.sup_norm(), &Dyadic::one());
    }

    #[test]
    fn window_zero_is_triangle() {
        let w0 = TestFunction::window(0);
        assert_eq!(w0.eval(&Interval::zero()), Interval::one());
        assert_eq!(w0.eval(&Interval::point(d(-1, -1))), Interval::point(d(1, -1)));
        assert_eq!(w0.integral_exact(), Dyadic::one());
    }

    #[test]
    fn eval_over_full_variation() {
        let w2 = TestFunction::window(2);
        let img = w2.eval(&Interval::new(d(-3, 0), d(3, 0)));
        assert_eq!(img, Interval::new(Dyadic::zero(), Dyadic::one()));
    }

    #[test]
    fn eval_extra_width_bounded_by_lip() {
        let w1 = TestFunction::window(1);
        let x = Interval::new(d(5, -2), d(7, -2)); // [1.25, 1.75] on the edge
        let img = w1.eval(&x);
        assert!(img.width() <= w1.lip().mul(&x.width()));
    }

    #[test]
    fn modulus_examples() {
        let w3 = TestFunction::window(3);
        assert_eq!(w3.modulus(5), 6); // lip = 1 -> k + 1
        let steep = TestFunction::from_breakpoints(vec![
            (d(0, 0), Dyadic::zero()),
            (d(1, -2), Dyadic::one()),
            (d(1, -1), Dyadic::zero()),
        ])
        .unwrap();
        assert_eq!(steep.lip(), &d(4, 0));
        assert_eq!(steep.modulus(3), 6); // 4 * 2^-6 = 2^-4 < 2^-3
        assert_eq!(TestFunction::zero().modulus(9), 0);
    }

    #[test]
    fn rejects_non_dyadic_slope() {
        let r = TestFunction::from_breakpoints(vec![
            (d(0, 0), Dyadic::zero()),
            (d(3, 0), Dyadic::one()),
            (d(4, 0), Dyadic::zero()),
        ]);
        assert!(matches!(r, Err(Error::InvalidParams(_))));
    }

    #[test]
    fn partition_of_unity_on_grid() {
        for n in 0..4u32 {
            let w = TestFunction::window(n);
            let wc = ComplementWindow(w.clone());
            for j in -40..=40i64 {
                let x = Interval::point(d(j, -3));
                let total = w.eval(&x).add(&wc.eval(&x));
                assert!(total.contains(&Dyadic::one()), "w_{n} + w_{n}^c != 1 at {}", d(j, -3));
            }
        }
    }

    #[test]
    fn sandwich_and_monotone_on_grid() {
        for n in 0..4u32 {
            let w = TestFunction::window(n);
            let w_next = TestFunction::window(n + 1);
            for j in -64..=64i64 {
                let x = d(j, -3);
                let v = w.value_at(&x);
                let indicator_inner = if x.abs() <= d(n as i64, 0) { 1 } else { 0 };
                let indicator_outer = if x.abs() <= d(n as i64 + 1, 0) { 1 } else { 0 };
                assert!(v >= Dyadic::from_int(indicator_inner));
                assert!(v <= Dyadic::from_int(indicator_outer));
                assert!(v <= w_next.value_at(&x), "w_n monotone in n fails at {x}");
            }
        }
    }

    #[test]
    fn slope_jump_variation_of_windows() {
        assert_eq!(TestFunction::window(0).slope_jump_variation(), d(4, 0));
        assert_eq!(TestFunction::window(1).slope_jump_variation(), d(4, 0));
        let jumps = TestFunction::window(0).slope_jumps();
        assert_eq!(jumps.len(), 3);
        assert_eq!(jumps[1].1, d(-2, 0));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let f = TestFunction::from_breakpoints(vec![
            (d(-5, -1), Dyadic::zero()),
            (d(-1, -1), d(3, -2)),
            (d(1, 0), Dyadic::zero()),
        ])
        .unwrap();
        let json = serde_json::to_string(&f).unwrap();
        let back: TestFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(f, back);
        // Stated wire format: array of [x, y] with {"m", "e"} objects.
        assert!(json.contains("\"m\""));
        assert!(json.contains("\"e\""));
    }

    #[test]
    fn l1_upper_dominates() {
        let w1 = TestFunction::window(1);
        assert_eq!(w1.l1_norm_upper(), d(3, 0)); // trapezoid area, n=1
        assert_eq!(w1.integral_exact(), d(3, 0));
    }
}
