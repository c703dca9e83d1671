//! First-order contract design on smooth one-dimensional families.
//!
//! The discrete solvers enumerate actions; here the protection level is
//! a continuum `x` in `[lo, hi]`, the breach probability `q(x)` decays
//! smoothly, and the investment cost is linear or quadratic. The agent's
//! action solves a stationarity condition instead of a table scan:
//! because the agent's cost is convex in `x` (verified by sampling its
//! derivative, which must be non-decreasing), the first-order condition
//! certifies the global best response. The insurer is risk-neutral in
//! this family and prices proportional contracts only.

use crate::error::{ModelError, SolverError};
use crate::fingerprint::Fnv64;
use crate::num::{tol, Scalar};
use crate::preferences::{evaluate_risk, CurveKind, RiskFunctional};
use crate::riskspace::Lottery;
use crate::solvers::{check_axis, ContractTerms, DesignResult, SolveKind};

/// Breach probability as a smooth decreasing function of investment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BreachCurve<T: Scalar> {
    /// `q(x) = base * exp(-rate * x)`.
    ExponentialDecay { base: T, rate: T },
    /// `q(x) = base / (1 + rate * x)`.
    RationalDecay { base: T, rate: T },
}

impl<T: Scalar> BreachCurve<T> {
    fn base_rate(&self) -> (T, T) {
        match *self {
            BreachCurve::ExponentialDecay { base, rate } => (base, rate),
            BreachCurve::RationalDecay { base, rate } => (base, rate),
        }
    }
}

/// Investment cost `kappa(x) = linear * x + quadratic * x^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvestCost<T: Scalar> {
    pub linear: T,
    pub quadratic: T,
}

impl<T: Scalar> InvestCost<T> {
    pub fn new(linear: T, quadratic: T) -> Result<Self, ModelError> {
        for (v, what) in [
            (linear, "linear cost rate"),
            (quadratic, "quadratic cost rate"),
        ] {
            if !v.is_finite() || v < T::zero() {
                return Err(ModelError::OutOfRange {
                    what,
                    value: v.as_f64(),
                    bounds: "[0, inf)",
                });
            }
        }
        Ok(InvestCost { linear, quadratic })
    }
}

/// A smooth two-outcome design problem: a single loss of size `loss`
/// strikes with probability `q(x)`, investment on `[lo, hi]` costs
/// `kappa(x)`, and the agent evaluates cost by expectation or by a
/// smooth expected disutility.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFamily<T: Scalar> {
    loss: T,
    breach: BreachCurve<T>,
    invest: InvestCost<T>,
    action_lo: T,
    action_hi: T,
    agent: RiskFunctional<T>,
}

impl<T: Scalar> SmoothFamily<T> {
    pub fn new(
        loss: T,
        breach: BreachCurve<T>,
        invest: InvestCost<T>,
        action_range: (T, T),
        agent: RiskFunctional<T>,
    ) -> Result<Self, SolverError> {
        if !loss.is_finite() || loss < T::zero() {
            return Err(ModelError::OutOfRange {
                what: "loss size",
                value: loss.as_f64(),
                bounds: "[0, inf)",
            }
            .into());
        }
        let (base, rate) = breach.base_rate();
        if !base.is_finite() || base < T::zero() || base > T::one() {
            return Err(ModelError::OutOfRange {
                what: "breach base probability",
                value: base.as_f64(),
                bounds: "[0, 1]",
            }
            .into());
        }
        if !rate.is_finite() || rate < T::zero() {
            return Err(ModelError::OutOfRange {
                what: "breach decay rate",
                value: rate.as_f64(),
                bounds: "[0, inf)",
            }
            .into());
        }
        let (lo, hi) = action_range;
        if !lo.is_finite() || !hi.is_finite() || lo < T::zero() || hi <= lo {
            return Err(ModelError::BadGrid {
                what: "action range",
            }
            .into());
        }
        match &agent {
            RiskFunctional::Expectation => {}
            RiskFunctional::ExpectedDisutility { curve } => {
                if matches!(curve.kind(), CurveKind::Tabulated { .. }) {
                    return Err(SolverError::UnsupportedAgent);
                }
            }
            _ => return Err(SolverError::UnsupportedAgent),
        }
        Ok(SmoothFamily {
            loss,
            breach,
            invest,
            action_lo: lo,
            action_hi: hi,
            agent,
        })
    }

    pub fn loss(&self) -> T {
        self.loss
    }

    pub fn action_range(&self) -> (T, T) {
        (self.action_lo, self.action_hi)
    }

    pub fn agent(&self) -> &RiskFunctional<T> {
        &self.agent
    }

    pub fn breach_prob(&self, x: T) -> T {
        match self.breach {
            BreachCurve::ExponentialDecay { base, rate } => base * (-rate * x).exp(),
            BreachCurve::RationalDecay { base, rate } => base / (T::one() + rate * x),
        }
    }

    pub fn breach_deriv(&self, x: T) -> T {
        match self.breach {
            BreachCurve::ExponentialDecay { base, rate } => -rate * base * (-rate * x).exp(),
            BreachCurve::RationalDecay { base, rate } => {
                let denom = T::one() + rate * x;
                -base * rate / (denom * denom)
            }
        }
    }

    pub fn invest_cost(&self, x: T) -> T {
        self.invest.linear * x + self.invest.quadratic * x * x
    }

    pub fn invest_deriv(&self, x: T) -> T {
        self.invest.linear + T::of(2.0) * self.invest.quadratic * x
    }

    /// The agent's two-point cost lottery under proportional terms.
    pub fn user_cost_lottery(
        &self,
        premium: T,
        coverage: T,
        x: T,
    ) -> Result<Lottery<T>, ModelError> {
        let q = self.breach_prob(x);
        let keep = self.invest_cost(x) + premium;
        Lottery::new(
            vec![keep, keep + (T::one() - coverage) * self.loss],
            vec![T::one() - q, q],
        )
    }

    /// Risk value of the agent's cost at action `x`.
    pub fn agent_cost(&self, premium: T, coverage: T, x: T) -> Result<T, ModelError> {
        let lottery = self.user_cost_lottery(premium, coverage, x)?;
        evaluate_risk(&self.agent, &lottery)
    }

    /// Derivative of the agent's cost in `x`: analytic for the
    /// expectation agent, second-order differences otherwise (one-sided
    /// at the range ends so evaluation never leaves the range).
    pub fn agent_cost_deriv(&self, premium: T, coverage: T, x: T) -> Result<T, ModelError> {
        if let RiskFunctional::Expectation = self.agent {
            return Ok(
                self.invest_deriv(x) + (T::one() - coverage) * self.loss * self.breach_deriv(x)
            );
        }
        let h = (self.action_hi - self.action_lo) * T::of(1e-6);
        let two = T::of(2.0);
        let f = |x: T| self.agent_cost(premium, coverage, x);
        if x - h < self.action_lo {
            let f0 = f(x)?;
            let f1 = f(x + h)?;
            let f2 = f(x + two * h)?;
            Ok((-T::of(3.0) * f0 + T::of(4.0) * f1 - f2) / (two * h))
        } else if x + h > self.action_hi {
            let f0 = f(x)?;
            let f1 = f(x - h)?;
            let f2 = f(x - two * h)?;
            Ok((T::of(3.0) * f0 - T::of(4.0) * f1 + f2) / (two * h))
        } else {
            Ok((f(x + h)? - f(x - h)?) / (two * h))
        }
    }

    /// Expected insurer profit `premium - coverage * loss * q(x)`.
    pub fn insurer_objective(&self, premium: T, coverage: T, x: T) -> T {
        premium - coverage * self.loss * self.breach_prob(x)
    }

    /// The agent's best response: the action in `[lo, hi]` where the
    /// cost derivative crosses zero, or the nearer end when it never
    /// does. The derivative is first sampled across the range and must
    /// be non-decreasing, so the crossing is a certified minimum.
    pub fn stationary_action(&self, premium: T, coverage: T) -> Result<T, SolverError> {
        let samples = 33;
        let span = self.action_hi - self.action_lo;
        let mut prev: Option<(T, T)> = None;
        for i in 0..samples {
            let x = self.action_lo + span * T::of(i as f64) / T::of((samples - 1) as f64);
            let d = self.agent_cost_deriv(premium, coverage, x)?;
            if let Some((_, d_prev)) = prev {
                let slack = T::of(tol::STATIONARY) * (T::one() + d_prev.abs());
                if d < d_prev - slack {
                    return Err(SolverError::NonMonotoneDerivative { near: x.as_f64() });
                }
            }
            prev = Some((x, d));
        }
        let eps = T::of(tol::STATIONARY);
        let mut lo = self.action_lo;
        let mut hi = self.action_hi;
        if self.agent_cost_deriv(premium, coverage, lo)? >= -eps {
            return Ok(lo);
        }
        if self.agent_cost_deriv(premium, coverage, hi)? <= eps {
            return Ok(hi);
        }
        // The derivative is negative at lo and positive at hi; bisect.
        for _ in 0..200 {
            let mid = (lo + hi) / T::of(2.0);
            let d = self.agent_cost_deriv(premium, coverage, mid)?;
            if d.abs() <= eps {
                return Ok(mid);
            }
            if d < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) / T::of(2.0))
    }

    /// Content hash of the family, in a namespace distinct from the
    /// discrete scenarios so the two can never be confused.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write_str("smooth/v1");
        h.write_f64(self.loss.as_f64());
        match self.breach {
            BreachCurve::ExponentialDecay { .. } => h.write_u8(0),
            BreachCurve::RationalDecay { .. } => h.write_u8(1),
        }
        let (base, rate) = self.breach.base_rate();
        h.write_f64(base.as_f64());
        h.write_f64(rate.as_f64());
        h.write_f64(self.invest.linear.as_f64());
        h.write_f64(self.invest.quadratic.as_f64());
        h.write_f64(self.action_lo.as_f64());
        h.write_f64(self.action_hi.as_f64());
        crate::contracts::encode_risk(&mut h, &self.agent);
        h.finish()
    }
}

/// Hidden-information design over a premium/coverage grid with the
/// agent's action solved from stationarity. The reservation is the
/// agent's uninsured optimum within the same family.
pub fn solve_first_order<T: Scalar>(
    family: &SmoothFamily<T>,
    premiums: &[T],
    coverages: &[T],
) -> Result<DesignResult<T>, SolverError> {
    check_axis(premiums, "premium grid")?;
    check_axis(coverages, "coverage grid")?;
    if let Some(&c) = coverages.last() {
        if c > T::one() {
            return Err(ModelError::BadCoverage { value: c.as_f64() }.into());
        }
    }
    let x_out = family.stationary_action(T::zero(), T::zero())?;
    let reservation = family.agent_cost(T::zero(), T::zero(), x_out)?;
    let slack = T::of(tol::VALUE);
    let mut best: Option<(T, T, T, T, T)> = None; // objective, x, premium, coverage, cost
    let mut closest = f64::INFINITY;
    for &premium in premiums {
        for &coverage in coverages {
            let x = family.stationary_action(premium, coverage)?;
            let cost = family.agent_cost(premium, coverage, x)?;
            closest = closest.min(cost.as_f64());
            if cost > reservation + slack {
                continue;
            }
            let objective = family.insurer_objective(premium, coverage, x);
            let beats = match best {
                None => true,
                Some((inc_obj, inc_x, inc_p, inc_c, _)) => {
                    if objective != inc_obj {
                        objective > inc_obj
                    } else if x != inc_x {
                        x < inc_x
                    } else if premium != inc_p {
                        premium < inc_p
                    } else {
                        coverage > inc_c
                    }
                }
            };
            if beats {
                best = Some((objective, x, premium, coverage, cost));
            }
        }
    }
    let (objective, x, premium, coverage, cost) = best.ok_or(SolverError::Infeasible {
        reservation: reservation.as_f64(),
        closest,
    })?;
    Ok(DesignResult {
        kind: SolveKind::FirstOrder,
        terms: ContractTerms::Linear { premium, coverage },
        action_index: None,
        action_level: x,
        objective,
        user_cost: cost,
        reservation,
        ir_binding: (cost - reservation).abs() <= slack,
        ic_satisfied: true,
        market_viable: objective > slack,
        intensity: None,
        fingerprint: family.fingerprint(),
    })
}
