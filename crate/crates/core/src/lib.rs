//! Contract design for cyber risk transfer.
//!
//! The crate models an insurer selling coverage to a firm whose loss
//! distribution depends on how much the firm invests in its own
//! security. Both sides are explicit objects: finite outcome spaces
//! and action-indexed loss laws ([`riskspace`]), risk preferences from
//! plain expectation to tail and distortion functionals
//! ([`preferences`]), and premium/indemnity schedules ([`contracts`]).
//!
//! On top of those sit the design routines ([`solvers`]): grid
//! enumeration when the insurer can prescribe the firm's investment,
//! the same search against the firm's self-interested best response
//! when it cannot, a bisection solver for smooth one-dimensional
//! families, and a comparison layer for preference shaping across
//! candidate agent populations. [`scenarios`] supplies ready-made
//! model families and a strict JSON file format.
//!
//! Core types are generic over the scalar ([`num::Scalar`], `f32` or
//! `f64`). The crate root re-exports `f64` aliases for every main
//! type, so `premia::Scenario` is `premia::contracts::Scenario<f64>`.
//! Sign convention throughout: losses, costs, and premiums are
//! non-negative magnitudes; every functional is applied to a cost-like
//! quantity unless a gain orientation says otherwise.

pub mod contracts;
pub mod error;
mod fingerprint;
pub mod num;
pub mod preferences;
pub mod riskspace;
pub mod scenarios;
pub mod solvers;

pub use crate::error::{ModelError, SolverError, ValidationReport, Violation};
pub use crate::num::{tol, Scalar};

pub use crate::contracts::TieBreak;
pub use crate::preferences::Orientation;
pub use crate::riskspace::MonotonicityReport;
pub use crate::scenarios::{AttackerEffort, ScenarioFileError, StackelbergSpec};
pub use crate::solvers::SolveKind;

/// `f64` aliases for the generic core types.
pub type Outcome = crate::riskspace::Outcome<f64>;
pub type OutcomeSpace = crate::riskspace::OutcomeSpace<f64>;
pub type LossDistribution = crate::riskspace::LossDistribution<f64>;
pub type Lottery = crate::riskspace::Lottery<f64>;
pub type InvestmentAction = crate::riskspace::InvestmentAction<f64>;
pub type ActionGrid = crate::riskspace::ActionGrid<f64>;
pub type RiskKernel = crate::riskspace::RiskKernel<f64>;

pub type CurveKind = crate::preferences::CurveKind<f64>;
pub type UtilityCurve = crate::preferences::UtilityCurve<f64>;
pub type DistortionFunction = crate::preferences::DistortionFunction<f64>;
pub type RiskFunctional = crate::preferences::RiskFunctional<f64>;

pub type Contract = crate::contracts::Contract<f64>;
pub type LinearContract = crate::contracts::LinearContract<f64>;
pub type AgentSpec = crate::contracts::AgentSpec<f64>;
pub type InsurerSpec = crate::contracts::InsurerSpec<f64>;
pub type Scenario = crate::contracts::Scenario<f64>;
pub type Reservation = crate::contracts::Reservation<f64>;
pub type IrCheck = crate::contracts::IrCheck<f64>;
pub type BestResponse = crate::contracts::BestResponse<f64>;

pub type ContractTerms = crate::solvers::ContractTerms<f64>;
pub type GridMode = crate::solvers::GridMode<f64>;
pub type ContractGrid = crate::solvers::ContractGrid<f64>;
pub type Intensity = crate::solvers::Intensity<f64>;
pub type DesignResult = crate::solvers::DesignResult<f64>;
pub type PreferenceCandidate = crate::solvers::PreferenceCandidate<f64>;
pub type PreferenceDesignSpace = crate::solvers::PreferenceDesignSpace<f64>;
pub type PreferenceRow = crate::solvers::PreferenceRow<f64>;
pub type PreferenceReport = crate::solvers::PreferenceReport<f64>;
pub type ComparisonReport = crate::solvers::ComparisonReport<f64>;

pub type BreachCurve = crate::solvers::first_order::BreachCurve<f64>;
pub type InvestCost = crate::solvers::first_order::InvestCost<f64>;
pub type SmoothFamily = crate::solvers::first_order::SmoothFamily<f64>;
