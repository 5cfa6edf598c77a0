//! Scalar abstraction.
//!
//! Root data is stored exactly as [`Rational`]; every geometric quantity is
//! evaluated in a floating type implementing [`Real`].

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, NumCast, Signed, ToPrimitive};

/// Exact coordinates for root data.
pub type Rational = Ratio<i64>;

/// Floating point scalar used for orbit geometry: `f32` or `f64`.
pub trait Real:
    Float
    + Signed
    + FromPrimitive
    + NumCast
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Relative (vanish, active) chamber tolerances, multiplied by the
    /// largest root length of the system.
    fn chamber_tolerances() -> (f64, f64);

    /// Converts an `f64` literal. Panics only for non-finite input.
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("finite literal")
    }

    fn from_rational(q: &Rational) -> Self {
        Self::lit(*q.numer() as f64) / Self::lit(*q.denom() as f64)
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn chamber_tolerances() -> (f64, f64) {
        (1e-9, 1e-7)
    }
}

impl Real for f32 {
    // f32 round-off is ~1e-7, so the wall band has to sit well above it.
    fn chamber_tolerances() -> (f64, f64) {
        (1e-5, 1e-3)
    }
}

/// Parses `p/q` or an integer into a [`Rational`].
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            Some(Ratio::new(p, q))
        }
        None => s.parse::<i64>().ok().map(Ratio::from_integer),
    }
}
