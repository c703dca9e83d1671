//! Scalar abstraction and the shared numeric tolerances.
//!
//! Every quantity in this crate (losses, probabilities, premiums, risk
//! values) is generic over [`Scalar`] so the same model code runs at `f32`
//! or `f64` precision. The crate-root aliases pin `f64`, which is the
//! precision the documented tolerances assume; `f32` satisfies the bounds
//! and compiles, but its resolution is coarser than the strictest
//! probability checks, so validation of `f32` data should expect looser
//! agreement.

use std::fmt;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar for losses, probabilities, and money amounts.
///
/// Implementors must be IEEE floats: the solvers rely on total comparisons
/// of finite values and on `exp`/`ln` for the closed-form curves. Validated
/// structures never contain NaN or infinities.
pub trait Scalar:
    Float + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Converts an `f64` constant (tolerances, grid literals) into `Self`.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 constant converts into every Scalar")
    }

    /// Lossy view as `f64`, used for error messages and hashing.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Absolute tolerances used throughout the crate, in money or probability units.
pub mod tol {
    /// Probability bookkeeping: kernel row sums, CDF comparisons, distribution mass.
    pub const PROB: f64 = 1e-12;
    /// Money-valued comparisons: costs, objectives, participation slack.
    pub const VALUE: f64 = 1e-9;
    /// Indifference window when collecting best-response ties.
    pub const TIE: f64 = 1e-9;
    /// Stationarity threshold for the smooth-family bisection.
    pub const STATIONARY: f64 = 1e-8;
}

/// Total-order comparison for validated (finite) scalars.
///
/// Panics on NaN, which validated inputs never contain.
pub fn cmp_finite<T: Scalar>(a: T, b: T) -> std::cmp::Ordering {
    a.partial_cmp(&b).expect("validated scalars are never NaN")
}
