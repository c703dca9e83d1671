//! Error and validation-report types shared by the model modules.
//!
//! Construction errors ([`ModelError`]) fail fast with the offending field
//! and value. Report-style checks ([`ValidationReport`]) collect every
//! violation so a caller can show them all at once. Solver outcomes that
//! are legitimate results of the optimization, such as an infeasible
//! participation constraint, are [`SolverError`] variants rather than
//! panics so callers can branch on them.

use std::fmt;

use thiserror::Error;

/// Construction or evaluation failure of a model object.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("outcome space has no outcomes")]
    EmptySpace,
    #[error("outcome `{label}`: loss {value} is negative")]
    NegativeLoss { label: String, value: f64 },
    #[error("outcome `{label}`: loss is not finite")]
    NonFiniteLoss { label: String },
    #[error("outcome label `{label}` appears more than once")]
    DuplicateLabel { label: String },
    #[error("action grid has no actions")]
    EmptyActions,
    #[error("action levels must increase strictly (offending index {index})")]
    UnorderedActions { index: usize },
    #[error("action {index}: cost {value} must be finite and >= 0")]
    BadActionCost { index: usize, value: f64 },
    #[error("action costs must be non-decreasing in the level (offending index {index})")]
    DecreasingActionCost { index: usize },
    #[error("action index {index} out of range ({len} actions)")]
    ActionOutOfRange { index: usize, len: usize },
    #[error("kernel needs one probability row per action ({actions} actions, {rows} rows)")]
    KernelShape { actions: usize, rows: usize },
    #[error("kernel row {row}: {report}")]
    KernelRow {
        row: usize,
        report: ValidationReport,
    },
    #[error("invalid distribution: {report}")]
    InvalidDistribution { report: ValidationReport },
    #[error("lottery has {values} values but {probs} probabilities")]
    LotteryShape { values: usize, probs: usize },
    #[error("lottery value at index {index} is not finite")]
    NonFiniteValue { index: usize },
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("{what} = {value} must lie in {bounds}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        bounds: &'static str,
    },
    #[error("tabulated curve needs at least two knots")]
    TooFewKnots,
    #[error("tabulated knots must increase strictly in the abscissa (offending index {index})")]
    UnorderedKnots { index: usize },
    #[error("tabulated values must be non-decreasing (offending index {index})")]
    DecreasingKnots { index: usize },
    #[error("distortion must map 0 to 0 and 1 to 1")]
    DistortionEndpoints,
    #[error("{what} = {value} is outside the domain [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("curve derivative vanishes at z = {z}; risk aversion is undefined there")]
    FlatCurve { z: f64 },
    #[error("premium {value} must be finite and >= 0")]
    BadPremium { value: f64 },
    #[error("coverage rate {value} must lie in [0, 1]")]
    BadCoverage { value: f64 },
    #[error("indemnity vector length {got} does not match outcome count {expected}")]
    IndemnityShape { expected: usize, got: usize },
    #[error("outcome `{label}`: indemnity {indemnity} is outside [0, loss {loss}]")]
    IndemnityBounds {
        label: String,
        indemnity: f64,
        loss: f64,
    },
    #[error("expected {expected} action costs, got {got}")]
    ActionCostShape { expected: usize, got: usize },
    #[error(
        "attacker table needs one row per defender action and one column per effort ({detail})"
    )]
    AttackTableShape { detail: String },
    #[error("{what} grid must be non-empty and sorted ascending")]
    BadGrid { what: &'static str },
    #[error("preference candidate {index}: {detail}")]
    BadCandidate { index: usize, detail: String },
}

// ── report-style validation ─────────────────────────────────────────────────

/// A single violated invariant, naming the field and the observed value.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFiniteProbability { index: usize },
    NegativeProbability { index: usize, value: f64 },
    ProbabilityAboveOne { index: usize, value: f64 },
    MassNotOne { sum: f64 },
    LengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFiniteProbability { index } => {
                write!(f, "probs[{index}] is not finite")
            }
            Violation::NegativeProbability { index, value } => {
                write!(f, "probs[{index}] = {value} is negative")
            }
            Violation::ProbabilityAboveOne { index, value } => {
                write!(f, "probs[{index}] = {value} exceeds 1")
            }
            Violation::MassNotOne { sum } => {
                write!(f, "probabilities sum to {sum}, expected 1 within 1e-12")
            }
            Violation::LengthMismatch { expected, got } => {
                write!(
                    f,
                    "expected {expected} probabilities for the space, got {got}"
                )
            }
        }
    }
}

/// Result of a structural validation pass; an empty report means valid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub(crate) fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let mut first = true;
        for v in &self.violations {
            if !first {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

// ── solver outcomes ─────────────────────────────────────────────────────────

/// Failure (or first-class negative outcome) of a design solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    /// No contract/action pair satisfies the participation constraint.
    /// `closest` is the smallest evaluated agent cost seen, for diagnosis.
    #[error(
        "no contract/action pair satisfies participation: reservation {reservation}, \
         closest evaluated cost {closest}"
    )]
    Infeasible { reservation: f64, closest: f64 },
    #[error("contract grid produced no admissible contracts")]
    EmptyGrid,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("result was produced for fingerprint {got}, scenario has {expected}")]
    StaleResult { expected: String, got: String },
    #[error("moral-hazard intensity needs a result from the full-information solver")]
    NotFirstBest,
    #[error("cost derivative changes direction on the action interval (sampled near x = {near})")]
    NonMonotoneDerivative { near: f64 },
    #[error("first-order families support expectation or smooth expected-disutility agents")]
    UnsupportedAgent,
    #[error("results carry different fingerprints; compare designs for one scenario at a time")]
    MixedFingerprints,
    #[error("no results supplied")]
    NoResults,
    #[error("stored objective {stored} does not match recomputation {recomputed}")]
    ObjectiveMismatch { stored: f64, recomputed: f64 },
    #[error("full-information optimum {full} fell below hidden-information optimum {hidden}")]
    OrderingViolated { full: f64, hidden: f64 },
}
