//! Discrete loss model: outcome spaces, loss distributions, investment
//! actions, and the kernel mapping actions to distributions.
//!
//! Everything here is finite and explicit. An outcome space fixes the
//! support once; distributions over it are probability vectors indexed the
//! same way, so expectations and tail statistics reduce to dot products
//! and sorted scans. Stochastic-dominance checks compare step CDFs on the
//! union of supports, which is exact for discrete laws.

use std::sync::Arc;

use crate::error::{ModelError, ValidationReport, Violation};
use crate::num::{cmp_finite, tol, Scalar};

/// One loss state: a human-readable label and the monetary loss suffered.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<T: Scalar> {
    pub label: String,
    pub loss: T,
}

impl<T: Scalar> Outcome<T> {
    pub fn new(label: impl Into<String>, loss: T) -> Self {
        Outcome {
            label: label.into(),
            loss,
        }
    }
}

/// Finite set of loss outcomes. Losses are finite and non-negative;
/// labels are unique. Outcome order is fixed at construction and shared
/// by every probability vector indexed against this space.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSpace<T: Scalar> {
    outcomes: Vec<Outcome<T>>,
}

impl<T: Scalar> OutcomeSpace<T> {
    pub fn new(outcomes: Vec<Outcome<T>>) -> Result<Self, ModelError> {
        if outcomes.is_empty() {
            return Err(ModelError::EmptySpace);
        }
        for o in &outcomes {
            if !o.loss.is_finite() {
                return Err(ModelError::NonFiniteLoss {
                    label: o.label.clone(),
                });
            }
            if o.loss < T::zero() {
                return Err(ModelError::NegativeLoss {
                    label: o.label.clone(),
                    value: o.loss.as_f64(),
                });
            }
        }
        for (i, o) in outcomes.iter().enumerate() {
            if outcomes[..i].iter().any(|p| p.label == o.label) {
                return Err(ModelError::DuplicateLabel {
                    label: o.label.clone(),
                });
            }
        }
        Ok(OutcomeSpace { outcomes })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn outcomes(&self) -> &[Outcome<T>] {
        &self.outcomes
    }

    pub fn label(&self, index: usize) -> &str {
        &self.outcomes[index].label
    }

    pub fn loss(&self, index: usize) -> T {
        self.outcomes[index].loss
    }

    pub fn losses(&self) -> Vec<T> {
        self.outcomes.iter().map(|o| o.loss).collect()
    }

    /// Largest loss in the space; the natural upper bound for premiums
    /// and indemnities.
    pub fn max_loss(&self) -> T {
        self.outcomes
            .iter()
            .map(|o| o.loss)
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

/// Structural check of a probability vector against a space: right length,
/// finite, in [0, 1], mass 1 within `tol::PROB`. Collects every violation
/// rather than stopping at the first.
pub fn validate_distribution<T: Scalar>(space: &OutcomeSpace<T>, probs: &[T]) -> ValidationReport {
    let mut report = ValidationReport::default();
    if probs.len() != space.len() {
        report.push(Violation::LengthMismatch {
            expected: space.len(),
            got: probs.len(),
        });
        return report;
    }
    let mut sum = T::zero();
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() {
            report.push(Violation::NonFiniteProbability { index: i });
            continue;
        }
        if p < T::zero() {
            report.push(Violation::NegativeProbability {
                index: i,
                value: p.as_f64(),
            });
        }
        if p > T::one() {
            report.push(Violation::ProbabilityAboveOne {
                index: i,
                value: p.as_f64(),
            });
        }
        sum = sum + p;
    }
    if report.is_ok() && (sum - T::one()).abs().as_f64() > tol::PROB {
        report.push(Violation::MassNotOne { sum: sum.as_f64() });
    }
    report
}

/// Probability distribution over a shared outcome space.
#[derive(Debug, Clone, PartialEq)]
pub struct LossDistribution<T: Scalar> {
    space: Arc<OutcomeSpace<T>>,
    probs: Vec<T>,
}

impl<T: Scalar> LossDistribution<T> {
    pub fn new(space: Arc<OutcomeSpace<T>>, probs: Vec<T>) -> Result<Self, ModelError> {
        let report = validate_distribution(&space, &probs);
        if !report.is_ok() {
            return Err(ModelError::InvalidDistribution { report });
        }
        Ok(LossDistribution { space, probs })
    }

    pub fn space(&self) -> &Arc<OutcomeSpace<T>> {
        &self.space
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// The loss random variable as a plain value/probability lottery.
    pub fn lottery(&self) -> Lottery<T> {
        Lottery {
            values: self.space.losses(),
            probs: self.probs.clone(),
        }
    }

    /// Step CDF on the distinct losses, sorted ascending. Duplicate loss
    /// values in the space are merged into one step.
    pub fn cdf(&self) -> Vec<(T, T)> {
        merged_cdf(&self.space.losses(), &self.probs)
    }

    pub fn mean(&self) -> T {
        self.space
            .losses()
            .iter()
            .zip(&self.probs)
            .fold(T::zero(), |acc, (&v, &p)| acc + v * p)
    }
}

/// Finite lottery: paired values and probabilities, not tied to any space.
/// Used for derived random variables such as out-of-pocket cost or
/// insurer profit, whose values may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery<T: Scalar> {
    values: Vec<T>,
    probs: Vec<T>,
}

impl<T: Scalar> Lottery<T> {
    pub fn new(values: Vec<T>, probs: Vec<T>) -> Result<Self, ModelError> {
        if values.len() != probs.len() {
            return Err(ModelError::LotteryShape {
                values: values.len(),
                probs: probs.len(),
            });
        }
        if values.is_empty() {
            return Err(ModelError::EmptySpace);
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(ModelError::NonFiniteValue { index: i });
            }
        }
        let mut report = ValidationReport::default();
        let mut sum = T::zero();
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() {
                report.push(Violation::NonFiniteProbability { index: i });
                continue;
            }
            if p < T::zero() {
                report.push(Violation::NegativeProbability {
                    index: i,
                    value: p.as_f64(),
                });
            }
            if p > T::one() {
                report.push(Violation::ProbabilityAboveOne {
                    index: i,
                    value: p.as_f64(),
                });
            }
            sum = sum + p;
        }
        if report.is_ok() && (sum - T::one()).abs().as_f64() > tol::PROB {
            report.push(Violation::MassNotOne { sum: sum.as_f64() });
        }
        if !report.is_ok() {
            return Err(ModelError::InvalidDistribution { report });
        }
        Ok(Lottery { values, probs })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn mean(&self) -> T {
        self.values
            .iter()
            .zip(&self.probs)
            .fold(T::zero(), |acc, (&v, &p)| acc + v * p)
    }

    pub fn min_value(&self) -> T {
        self.values
            .iter()
            .copied()
            .min_by(|a, b| cmp_finite(*a, *b))
            .expect("lottery is non-empty")
    }

    pub fn max_value(&self) -> T {
        self.values
            .iter()
            .copied()
            .max_by(|a, b| cmp_finite(*a, *b))
            .expect("lottery is non-empty")
    }

    /// Step CDF on the distinct values, sorted ascending.
    pub fn cdf(&self) -> Vec<(T, T)> {
        merged_cdf(&self.values, &self.probs)
    }

    /// The lottery of `Z + shift`, same probabilities.
    pub fn shifted(&self, shift: T) -> Lottery<T> {
        Lottery {
            values: self.values.iter().map(|&v| v + shift).collect(),
            probs: self.probs.clone(),
        }
    }
}

/// Sort values ascending (stable in the original index order), accumulate
/// probability, and merge exactly equal values into one step.
fn merged_cdf<T: Scalar>(values: &[T], probs: &[T]) -> Vec<(T, T)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| cmp_finite(values[a], values[b]));
    let mut out: Vec<(T, T)> = Vec::with_capacity(values.len());
    let mut cum = T::zero();
    for idx in order {
        cum = cum + probs[idx];
        match out.last_mut() {
            Some(last) if last.0 == values[idx] => last.1 = cum,
            _ => out.push((values[idx], cum)),
        }
    }
    out
}

/// CDF value at `t` for a step CDF sorted ascending by value.
fn cdf_at<T: Scalar>(cdf: &[(T, T)], t: T) -> T {
    // Largest step point <= t; zero mass strictly below the support.
    match cdf.binary_search_by(|&(v, _)| cmp_finite(v, t)) {
        Ok(i) => cdf[i].1,
        Err(0) => T::zero(),
        Err(i) => cdf[i - 1].1,
    }
}

/// First-order stochastic dominance between loss distributions, where
/// dominance means stochastically larger losses: `a` dominates `b` when
/// the CDF of `a` sits at or below the CDF of `b` at every point of the
/// union support (tolerance `tol::PROB` on each comparison).
pub fn fosd_dominates<T: Scalar>(a: &LossDistribution<T>, b: &LossDistribution<T>) -> bool {
    fosd_dominates_lottery(&a.lottery(), &b.lottery())
}

/// Same dominance check on raw lotteries.
pub fn fosd_dominates_lottery<T: Scalar>(a: &Lottery<T>, b: &Lottery<T>) -> bool {
    let ca = a.cdf();
    let cb = b.cdf();
    let slack = T::of(tol::PROB);
    let mut points: Vec<T> = ca.iter().chain(cb.iter()).map(|&(v, _)| v).collect();
    points.sort_by(|&x, &y| cmp_finite(x, y));
    points.dedup();
    points
        .into_iter()
        .all(|t| cdf_at(&ca, t) <= cdf_at(&cb, t) + slack)
}

/// One protection level the agent can choose: an ordinal level and the
/// deterministic cost of operating at it.
#[derive(Debug, Clone, PartialEq)]
pub struct InvestmentAction<T: Scalar> {
    pub level: T,
    pub cost: T,
}

impl<T: Scalar> InvestmentAction<T> {
    pub fn new(level: T, cost: T) -> Self {
        InvestmentAction { level, cost }
    }
}

/// Ordered menu of investment actions. Levels increase strictly; costs
/// are finite, non-negative, and non-decreasing, so a higher protection
/// level is never cheaper than a lower one.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionGrid<T: Scalar> {
    actions: Vec<InvestmentAction<T>>,
}

impl<T: Scalar> ActionGrid<T> {
    pub fn new(actions: Vec<InvestmentAction<T>>) -> Result<Self, ModelError> {
        if actions.is_empty() {
            return Err(ModelError::EmptyActions);
        }
        for (i, a) in actions.iter().enumerate() {
            if !a.level.is_finite() {
                return Err(ModelError::NonFinite {
                    what: "action level",
                    value: a.level.as_f64(),
                });
            }
            if !a.cost.is_finite() || a.cost < T::zero() {
                return Err(ModelError::BadActionCost {
                    index: i,
                    value: a.cost.as_f64(),
                });
            }
            if i > 0 {
                if actions[i - 1].level >= a.level {
                    return Err(ModelError::UnorderedActions { index: i });
                }
                if actions[i - 1].cost > a.cost {
                    return Err(ModelError::DecreasingActionCost { index: i });
                }
            }
        }
        Ok(ActionGrid { actions })
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn actions(&self) -> &[InvestmentAction<T>] {
        &self.actions
    }

    pub fn level(&self, index: usize) -> T {
        self.actions[index].level
    }

    pub fn cost(&self, index: usize) -> T {
        self.actions[index].cost
    }
}

/// Map from investment actions to loss distributions over one shared
/// outcome space: row `x` is the loss law when the agent plays action `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskKernel<T: Scalar> {
    space: Arc<OutcomeSpace<T>>,
    actions: ActionGrid<T>,
    rows: Vec<LossDistribution<T>>,
}

impl<T: Scalar> RiskKernel<T> {
    pub fn new(
        space: Arc<OutcomeSpace<T>>,
        actions: ActionGrid<T>,
        rows: Vec<Vec<T>>,
    ) -> Result<Self, ModelError> {
        if rows.len() != actions.len() {
            return Err(ModelError::KernelShape {
                actions: actions.len(),
                rows: rows.len(),
            });
        }
        let mut dists = Vec::with_capacity(rows.len());
        for (i, probs) in rows.into_iter().enumerate() {
            let report = validate_distribution(&space, &probs);
            if !report.is_ok() {
                return Err(ModelError::KernelRow { row: i, report });
            }
            dists.push(LossDistribution {
                space: Arc::clone(&space),
                probs,
            });
        }
        Ok(RiskKernel {
            space,
            actions,
            rows: dists,
        })
    }

    pub fn space(&self) -> &Arc<OutcomeSpace<T>> {
        &self.space
    }

    pub fn actions(&self) -> &ActionGrid<T> {
        &self.actions
    }

    pub fn distribution(&self, action: usize) -> &LossDistribution<T> {
        assert!(
            action < self.rows.len(),
            "action index {action} out of range ({} actions)",
            self.rows.len()
        );
        &self.rows[action]
    }

    pub fn rows(&self) -> &[LossDistribution<T>] {
        &self.rows
    }
}

/// Pairs `(i, j)` with `i < j` where the lower action's loss law fails to
/// dominate the higher action's. Empty means more protection never makes
/// the loss stochastically larger.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub violations: Vec<(usize, usize)>,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check that every lower action's distribution dominates (is
/// stochastically larger than) every higher action's distribution.
pub fn check_kernel_monotone<T: Scalar>(kernel: &RiskKernel<T>) -> MonotonicityReport {
    let mut violations = Vec::new();
    let n = kernel.rows.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if !fosd_dominates(&kernel.rows[i], &kernel.rows[j]) {
                violations.push((i, j));
            }
        }
    }
    MonotonicityReport { violations }
}
