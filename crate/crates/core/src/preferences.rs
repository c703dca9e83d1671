//! Risk preferences: utility curves, probability distortions, and the
//! risk functionals built from them.
//!
//! A risk functional maps a finite lottery to one number. For cost
//! lotteries (agent side) lower is better and curves carry the
//! `Disutility` orientation; for profit lotteries (insurer side) higher
//! is better and curves carry the `Gain` orientation. Average value at
//! risk is implemented twice on purpose: the sorted tail average used in
//! production and an independent minimization form kept for cross-checks.

use std::fmt;

use crate::error::ModelError;
use crate::num::{cmp_finite, tol, Scalar};
use crate::riskspace::Lottery;

/// Which direction the curve's argument is "bad" in: a disutility curve
/// penalizes large costs, a gain curve rewards large profits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Disutility,
    Gain,
}

/// Functional form of a utility or disutility curve.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind<T: Scalar> {
    /// `u(t) = t`; risk-neutral in either orientation.
    Linear,
    /// Constant absolute risk aversion `gamma`. For disutility
    /// `u(c) = (exp(gamma c) - 1) / gamma`; for gain
    /// `u(z) = (1 - exp(-gamma z)) / gamma`.
    Exponential { gamma: T },
    /// `u(t) = t^eta` on `t >= 0`. Risk-averse for `eta > 1` as a
    /// disutility and for `eta < 1` as a gain.
    Power { eta: T },
    /// Piecewise-linear curve through `(t, u(t))` knots with strictly
    /// increasing abscissas and non-decreasing values; defined only on
    /// the knot interval.
    Tabulated { knots: Vec<(T, T)> },
}

/// A validated curve plus the orientation it is meant to be applied in.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityCurve<T: Scalar> {
    kind: CurveKind<T>,
    orientation: Orientation,
}

impl<T: Scalar> UtilityCurve<T> {
    pub fn linear(orientation: Orientation) -> Self {
        UtilityCurve {
            kind: CurveKind::Linear,
            orientation,
        }
    }

    pub fn exponential(gamma: T, orientation: Orientation) -> Result<Self, ModelError> {
        if !gamma.is_finite() || gamma <= T::zero() {
            return Err(ModelError::OutOfRange {
                what: "exponential curvature gamma",
                value: gamma.as_f64(),
                bounds: "(0, inf)",
            });
        }
        Ok(UtilityCurve {
            kind: CurveKind::Exponential { gamma },
            orientation,
        })
    }

    pub fn power(eta: T, orientation: Orientation) -> Result<Self, ModelError> {
        if !eta.is_finite() || eta <= T::zero() {
            return Err(ModelError::OutOfRange {
                what: "power exponent eta",
                value: eta.as_f64(),
                bounds: "(0, inf)",
            });
        }
        Ok(UtilityCurve {
            kind: CurveKind::Power { eta },
            orientation,
        })
    }

    pub fn tabulated(knots: Vec<(T, T)>, orientation: Orientation) -> Result<Self, ModelError> {
        if knots.len() < 2 {
            return Err(ModelError::TooFewKnots);
        }
        for (i, &(x, y)) in knots.iter().enumerate() {
            if !x.is_finite() {
                return Err(ModelError::NonFinite {
                    what: "knot abscissa",
                    value: x.as_f64(),
                });
            }
            if !y.is_finite() {
                return Err(ModelError::NonFinite {
                    what: "knot value",
                    value: y.as_f64(),
                });
            }
            if i > 0 {
                if knots[i - 1].0 >= x {
                    return Err(ModelError::UnorderedKnots { index: i });
                }
                if knots[i - 1].1 > y {
                    return Err(ModelError::DecreasingKnots { index: i });
                }
            }
        }
        Ok(UtilityCurve {
            kind: CurveKind::Tabulated { knots },
            orientation,
        })
    }

    pub fn kind(&self) -> &CurveKind<T> {
        &self.kind
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Evaluate the curve at `t`. Power curves require `t >= 0`;
    /// tabulated curves require `t` inside the knot interval.
    pub fn evaluate(&self, t: T) -> Result<T, ModelError> {
        if !t.is_finite() {
            return Err(ModelError::NonFinite {
                what: "curve argument",
                value: t.as_f64(),
            });
        }
        match (&self.kind, self.orientation) {
            (CurveKind::Linear, _) => Ok(t),
            (CurveKind::Exponential { gamma }, Orientation::Disutility) => {
                Ok((*gamma * t).exp_m1() / *gamma)
            }
            (CurveKind::Exponential { gamma }, Orientation::Gain) => {
                Ok(-(-*gamma * t).exp_m1() / *gamma)
            }
            (CurveKind::Power { eta }, _) => {
                if t < T::zero() {
                    return Err(ModelError::Domain {
                        what: "power curve argument",
                        value: t.as_f64(),
                        lo: 0.0,
                        hi: f64::INFINITY,
                    });
                }
                Ok(t.powf(*eta))
            }
            (CurveKind::Tabulated { knots }, _) => interp_knots(knots, t, "tabulated curve"),
        }
    }
}

/// Piecewise-linear interpolation on validated knots; errors outside the
/// knot interval.
fn interp_knots<T: Scalar>(knots: &[(T, T)], t: T, what: &'static str) -> Result<T, ModelError> {
    let lo = knots[0].0;
    let hi = knots[knots.len() - 1].0;
    if t < lo || t > hi {
        return Err(ModelError::Domain {
            what,
            value: t.as_f64(),
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    // Rightmost knot at or below t; t == hi lands on the last segment.
    let seg = match knots.binary_search_by(|&(x, _)| cmp_finite(x, t)) {
        Ok(i) => return Ok(knots[i].1),
        Err(i) => i - 1,
    };
    let (x0, y0) = knots[seg];
    let (x1, y1) = knots[seg + 1];
    let w = (t - x0) / (x1 - x0);
    Ok(y0 + w * (y1 - y0))
}

/// Probability distortion `g: [0, 1] -> [0, 1]` with `g(0) = 0` and
/// `g(1) = 1`, applied to survival probabilities in Choquet integration.
#[derive(Debug, Clone, PartialEq)]
pub enum DistortionFunction<T: Scalar> {
    Identity,
    /// `g(p) = p^beta`; `beta > 1` inflates tail weight on losses.
    Power {
        beta: T,
    },
    /// Piecewise-linear distortion through `(p, g(p))` knots.
    Tabulated {
        knots: Vec<(T, T)>,
    },
}

impl<T: Scalar> DistortionFunction<T> {
    pub fn power(beta: T) -> Result<Self, ModelError> {
        if !beta.is_finite() || beta <= T::zero() {
            return Err(ModelError::OutOfRange {
                what: "distortion exponent beta",
                value: beta.as_f64(),
                bounds: "(0, inf)",
            });
        }
        Ok(DistortionFunction::Power { beta })
    }

    pub fn tabulated(knots: Vec<(T, T)>) -> Result<Self, ModelError> {
        if knots.len() < 2 {
            return Err(ModelError::TooFewKnots);
        }
        for (i, &(x, y)) in knots.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(ModelError::NonFinite {
                    what: "distortion knot",
                    value: if x.is_finite() {
                        y.as_f64()
                    } else {
                        x.as_f64()
                    },
                });
            }
            if i > 0 {
                if knots[i - 1].0 >= x {
                    return Err(ModelError::UnorderedKnots { index: i });
                }
                if knots[i - 1].1 > y {
                    return Err(ModelError::DecreasingKnots { index: i });
                }
            }
        }
        let slack = T::of(tol::PROB);
        let (x0, y0) = knots[0];
        let (x1, y1) = knots[knots.len() - 1];
        if x0.abs() > slack
            || y0.abs() > slack
            || (x1 - T::one()).abs() > slack
            || (y1 - T::one()).abs() > slack
        {
            return Err(ModelError::DistortionEndpoints);
        }
        Ok(DistortionFunction::Tabulated { knots })
    }

    /// Evaluate the distortion. Inputs may drift outside [0, 1] by at
    /// most `tol::PROB` (they come from probability sums) and are
    /// clamped; anything further out is a domain error.
    pub fn apply(&self, p: T) -> Result<T, ModelError> {
        let slack = T::of(tol::PROB);
        if !p.is_finite() || p < -slack || p > T::one() + slack {
            return Err(ModelError::Domain {
                what: "distortion argument",
                value: p.as_f64(),
                lo: 0.0,
                hi: 1.0,
            });
        }
        let p = p.max(T::zero()).min(T::one());
        match self {
            DistortionFunction::Identity => Ok(p),
            DistortionFunction::Power { beta } => Ok(p.powf(*beta)),
            DistortionFunction::Tabulated { knots } => {
                interp_knots(knots, p, "distortion argument")
            }
        }
    }
}

/// A map from cost lotteries to certainty-equivalent-like numbers.
/// The solvers treat this as the agent's objective: smaller is better.
#[derive(Debug, Clone, PartialEq)]
pub enum RiskFunctional<T: Scalar> {
    /// Risk-neutral expectation.
    Expectation,
    /// `E[u(Z)]` for a disutility curve `u`.
    ExpectedDisutility { curve: UtilityCurve<T> },
    /// Average of the worst `alpha` fraction of outcomes, `alpha` in (0, 1].
    AverageValueAtRisk { alpha: T },
    /// Choquet integral under a distortion of the survival function.
    Distortion { g: DistortionFunction<T> },
}

impl<T: Scalar> RiskFunctional<T> {
    pub fn avar(alpha: T) -> Result<Self, ModelError> {
        check_alpha(alpha)?;
        Ok(RiskFunctional::AverageValueAtRisk { alpha })
    }

    /// Re-check the parameters of a functional built directly as an enum
    /// value rather than through the constructors.
    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            RiskFunctional::Expectation => Ok(()),
            RiskFunctional::ExpectedDisutility { curve } => match curve.kind() {
                CurveKind::Linear => Ok(()),
                CurveKind::Exponential { gamma } => {
                    UtilityCurve::exponential(*gamma, curve.orientation()).map(|_| ())
                }
                CurveKind::Power { eta } => {
                    UtilityCurve::power(*eta, curve.orientation()).map(|_| ())
                }
                CurveKind::Tabulated { knots } => {
                    UtilityCurve::tabulated(knots.clone(), curve.orientation()).map(|_| ())
                }
            },
            RiskFunctional::AverageValueAtRisk { alpha } => check_alpha(*alpha),
            RiskFunctional::Distortion { g } => match g {
                DistortionFunction::Identity => Ok(()),
                DistortionFunction::Power { beta } => DistortionFunction::power(*beta).map(|_| ()),
                DistortionFunction::Tabulated { knots } => {
                    DistortionFunction::tabulated(knots.clone()).map(|_| ())
                }
            },
        }
    }
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<(), ModelError> {
    if !alpha.is_finite() || alpha <= T::zero() || alpha > T::one() {
        return Err(ModelError::OutOfRange {
            what: "tail level alpha",
            value: alpha.as_f64(),
            bounds: "(0, 1]",
        });
    }
    Ok(())
}

impl<T: Scalar> fmt::Display for UtilityCurve<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            CurveKind::Linear => write!(f, "linear"),
            CurveKind::Exponential { gamma } => write!(f, "exponential gamma={gamma}"),
            CurveKind::Power { eta } => write!(f, "power eta={eta}"),
            CurveKind::Tabulated { knots } => write!(f, "tabulated {} knots", knots.len()),
        }
    }
}

impl<T: Scalar> fmt::Display for RiskFunctional<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RiskFunctional::Expectation => write!(f, "expectation"),
            RiskFunctional::ExpectedDisutility { curve } => {
                write!(f, "expected_disutility({curve})")
            }
            RiskFunctional::AverageValueAtRisk { alpha } => write!(f, "avar(alpha={alpha})"),
            RiskFunctional::Distortion { g } => match g {
                DistortionFunction::Identity => write!(f, "distortion(identity)"),
                DistortionFunction::Power { beta } => write!(f, "distortion(power beta={beta})"),
                DistortionFunction::Tabulated { knots } => {
                    write!(f, "distortion(tabulated {} knots)", knots.len())
                }
            },
        }
    }
}

/// Evaluate a risk functional on a lottery.
pub fn evaluate_risk<T: Scalar>(
    functional: &RiskFunctional<T>,
    lottery: &Lottery<T>,
) -> Result<T, ModelError> {
    match functional {
        RiskFunctional::Expectation => Ok(lottery.mean()),
        RiskFunctional::ExpectedDisutility { curve } => {
            let mut acc = T::zero();
            for (&z, &p) in lottery.values().iter().zip(lottery.probs()) {
                acc = acc + p * curve.evaluate(z)?;
            }
            Ok(acc)
        }
        RiskFunctional::AverageValueAtRisk { alpha } => avar(lottery, *alpha),
        RiskFunctional::Distortion { g } => choquet_distortion(lottery, g),
    }
}

/// Average value at risk at level `alpha`: the probability-weighted
/// average of the worst (largest) `alpha` of the lottery's mass.
///
/// Computed by scanning atoms in descending value order and consuming
/// probability until `alpha` is exhausted, splitting the marginal atom.
/// When the single largest atom already carries mass `>= alpha` the
/// result is that value, returned without the multiply/divide round trip.
pub fn avar<T: Scalar>(lottery: &Lottery<T>, alpha: T) -> Result<T, ModelError> {
    check_alpha(alpha)?;
    let mut order: Vec<usize> = (0..lottery.values().len()).collect();
    order.sort_by(|&a, &b| cmp_finite(lottery.values()[b], lottery.values()[a]));
    let mut remaining = alpha;
    let mut acc = T::zero();
    for (k, &idx) in order.iter().enumerate() {
        let v = lottery.values()[idx];
        let p = lottery.probs()[idx];
        if k == 0 && p >= alpha {
            return Ok(v);
        }
        let take = if p < remaining { p } else { remaining };
        acc = acc + v * take;
        remaining = remaining - take;
        if remaining <= T::zero() {
            break;
        }
    }
    Ok(acc / alpha)
}

/// Independent formulation of average value at risk as
/// `min over t of t + E[(Z - t)+] / alpha`, minimized over the support.
/// Kept for cross-checking the tail-average implementation.
pub fn avar_by_minimization<T: Scalar>(lottery: &Lottery<T>, alpha: T) -> Result<T, ModelError> {
    check_alpha(alpha)?;
    let mut best: Option<T> = None;
    for &t in lottery.values() {
        let mut excess = T::zero();
        for (&z, &p) in lottery.values().iter().zip(lottery.probs()) {
            if z > t {
                excess = excess + p * (z - t);
            }
        }
        let candidate = t + excess / alpha;
        best = Some(match best {
            Some(b) if b <= candidate => b,
            _ => candidate,
        });
    }
    Ok(best.expect("lottery is non-empty"))
}

/// Choquet integral of the lottery under distortion `g` applied to the
/// survival function: with values sorted ascending,
/// `v_1 + sum over j >= 2 of (v_j - v_(j-1)) * g(P(Z >= v_j))`.
/// The identity distortion reproduces the mean.
pub fn choquet_distortion<T: Scalar>(
    lottery: &Lottery<T>,
    g: &DistortionFunction<T>,
) -> Result<T, ModelError> {
    let n = lottery.values().len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp_finite(lottery.values()[a], lottery.values()[b]));
    // tail[j] = P(Z >= value at sorted position j).
    let mut tail = vec![T::zero(); n];
    let mut cum = T::zero();
    for j in (0..n).rev() {
        cum = cum + lottery.probs()[order[j]];
        tail[j] = cum;
    }
    let mut acc = lottery.values()[order[0]];
    for j in 1..n {
        let step = lottery.values()[order[j]] - lottery.values()[order[j - 1]];
        if step > T::zero() {
            acc = acc + step * g.apply(tail[j])?;
        }
    }
    Ok(acc)
}

/// Local absolute risk aversion of a curve at `z`. Positive means
/// risk-averse in the curve's own orientation: for a disutility curve it
/// is `u''(z) / u'(z)`, for a gain curve `-u''(z) / u'(z)`.
///
/// Analytic kinds use closed forms (and ignore `h`); tabulated curves
/// use central differences with step `h`, which is exact for curves whose
/// knots sample a quadratic at spacing `h`.
pub fn arrow_pratt<T: Scalar>(curve: &UtilityCurve<T>, z: T, h: T) -> Result<T, ModelError> {
    if !z.is_finite() {
        return Err(ModelError::NonFinite {
            what: "evaluation point",
            value: z.as_f64(),
        });
    }
    match (curve.kind(), curve.orientation()) {
        (CurveKind::Linear, _) => Ok(T::zero()),
        (CurveKind::Exponential { gamma }, _) => Ok(*gamma),
        (CurveKind::Power { eta }, orientation) => {
            if z <= T::zero() {
                return Err(ModelError::Domain {
                    what: "power curve risk aversion point",
                    value: z.as_f64(),
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
            match orientation {
                Orientation::Disutility => Ok((*eta - T::one()) / z),
                Orientation::Gain => Ok((T::one() - *eta) / z),
            }
        }
        (CurveKind::Tabulated { .. }, orientation) => {
            if !h.is_finite() || h <= T::zero() {
                return Err(ModelError::OutOfRange {
                    what: "difference step h",
                    value: h.as_f64(),
                    bounds: "(0, inf)",
                });
            }
            let f_lo = curve.evaluate(z - h)?;
            let f_mid = curve.evaluate(z)?;
            let f_hi = curve.evaluate(z + h)?;
            let two = T::of(2.0);
            let d1 = (f_hi - f_lo) / (two * h);
            let d2 = (f_hi - two * f_mid + f_lo) / (h * h);
            if d1.abs().as_f64() <= tol::PROB {
                return Err(ModelError::FlatCurve { z: z.as_f64() });
            }
            match orientation {
                Orientation::Disutility => Ok(d2 / d1),
                Orientation::Gain => Ok(-(d2 / d1)),
            }
        }
    }
}
