//! Contract-design solvers over finite contract grids.
//!
//! Two information regimes share one search space. Under full
//! information the insurer dictates the protection action and only the
//! participation constraint binds, so the search ranges over every
//! (contract, action) pair the agent would sign. Under hidden
//! information the agent picks its own action after signing; the search
//! ranges over contracts, each paired with the agent's best response.
//! Every hidden-information candidate is also a full-information
//! candidate, so the full-information optimum can never be worse. The
//! gap between the two optimal designs is the price of moral hazard,
//! reported by [`moral_hazard_intensity`].
//!
//! Objective ties are resolved deterministically: exact ties prefer the
//! lowest action level, then the lowest premium, then the most coverage.

pub mod first_order;

use itertools::Itertools;

use crate::contracts::{
    best_response, insurer_objective, user_cost_distribution, Contract, LinearContract, Scenario,
    TieBreak,
};
use crate::error::{ModelError, SolverError};
use crate::num::{tol, Scalar};
use crate::preferences::{evaluate_risk, RiskFunctional};
use crate::riskspace::OutcomeSpace;

/// Which solver produced a design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveKind {
    /// Insurer prescribes the action; participation only.
    FullInfo,
    /// Agent best-responds; participation at the induced action.
    HiddenInfo,
    /// Smooth-family solver with a continuous action.
    FirstOrder,
}

/// The contract parameters a grid point stands for.
#[derive(Debug, Clone, PartialEq)]
pub enum ContractTerms<T: Scalar> {
    Linear { premium: T, coverage: T },
    Tabular { premium: T, indemnity: Vec<T> },
}

impl<T: Scalar> ContractTerms<T> {
    pub fn premium(&self) -> T {
        match self {
            ContractTerms::Linear { premium, .. } => *premium,
            ContractTerms::Tabular { premium, .. } => *premium,
        }
    }

    /// The proportional coverage rate, when the terms are proportional.
    pub fn coverage(&self) -> Option<T> {
        match self {
            ContractTerms::Linear { coverage, .. } => Some(*coverage),
            ContractTerms::Tabular { .. } => None,
        }
    }

    pub fn to_contract(&self, space: &OutcomeSpace<T>) -> Result<Contract<T>, ModelError> {
        match self {
            ContractTerms::Linear { premium, coverage } => {
                Ok(LinearContract::new(*premium, *coverage)?.to_contract(space))
            }
            ContractTerms::Tabular { premium, indemnity } => {
                Contract::new(space, *premium, indemnity.clone())
            }
        }
    }
}

/// Shape of the contract search space attached to a premium axis.
#[derive(Debug, Clone, PartialEq)]
pub enum GridMode<T: Scalar> {
    /// Proportional contracts: the cartesian product of premiums and
    /// coverage rates.
    Linear { coverages: Vec<T> },
    /// Free-form indemnities: every assignment of the given levels to
    /// outcomes, skipping assignments that exceed an outcome's loss.
    /// The candidate count is `levels ^ outcomes`; intended for small
    /// spaces.
    Tabular { indemnity_levels: Vec<T> },
}

/// A grid point paired with its materialized payout schedule.
pub type Candidate<T> = (ContractTerms<T>, Contract<T>);

/// Finite menu of candidate contracts for the grid solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractGrid<T: Scalar> {
    premiums: Vec<T>,
    mode: GridMode<T>,
}

pub(crate) fn check_axis<T: Scalar>(values: &[T], what: &'static str) -> Result<(), ModelError> {
    if values.is_empty() {
        return Err(ModelError::BadGrid { what });
    }
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < T::zero() {
            return Err(ModelError::OutOfRange {
                what,
                value: v.as_f64(),
                bounds: "[0, inf)",
            });
        }
        if i > 0 && values[i - 1] >= v {
            return Err(ModelError::BadGrid { what });
        }
    }
    Ok(())
}

/// Inclusive arithmetic progression `lo, lo + step, ...` up to `hi`
/// (reaching `hi` itself whenever the span is a whole number of steps,
/// judged with a small relative slack).
fn range_points<T: Scalar>(
    lo: T,
    hi: T,
    step: T,
    what: &'static str,
) -> Result<Vec<T>, ModelError> {
    for (v, name) in [(lo, "range start"), (hi, "range end"), (step, "range step")] {
        if !v.is_finite() {
            return Err(ModelError::NonFinite {
                what: name,
                value: v.as_f64(),
            });
        }
    }
    if step <= T::zero() {
        return Err(ModelError::OutOfRange {
            what,
            value: step.as_f64(),
            bounds: "step must be positive",
        });
    }
    if hi < lo {
        return Err(ModelError::BadGrid { what });
    }
    let count = (((hi - lo) / step).as_f64() + 1e-9).floor() as usize;
    let points = (0..=count).map(|k| lo + T::of(k as f64) * step).collect();
    Ok(points)
}

impl<T: Scalar> ContractGrid<T> {
    /// Proportional grid from explicit axes. Both axes must be strictly
    /// ascending; coverages must stay in [0, 1].
    pub fn linear(premiums: Vec<T>, coverages: Vec<T>) -> Result<Self, ModelError> {
        check_axis(&premiums, "premium grid")?;
        check_axis(&coverages, "coverage grid")?;
        if let Some(&c) = coverages.last() {
            if c > T::one() {
                return Err(ModelError::BadCoverage { value: c.as_f64() });
            }
        }
        Ok(ContractGrid {
            premiums,
            mode: GridMode::Linear { coverages },
        })
    }

    /// Proportional grid from `(lo, hi, step)` ranges on each axis.
    pub fn linear_ranges(premium: (T, T, T), coverage: (T, T, T)) -> Result<Self, ModelError> {
        let premiums = range_points(premium.0, premium.1, premium.2, "premium grid")?;
        let coverages = range_points(coverage.0, coverage.1, coverage.2, "coverage grid")?;
        Self::linear(premiums, coverages)
    }

    /// Free-form grid: each outcome's indemnity drawn from one shared
    /// ascending level list.
    pub fn tabular(premiums: Vec<T>, indemnity_levels: Vec<T>) -> Result<Self, ModelError> {
        check_axis(&premiums, "premium grid")?;
        check_axis(&indemnity_levels, "indemnity level grid")?;
        Ok(ContractGrid {
            premiums,
            mode: GridMode::Tabular { indemnity_levels },
        })
    }

    pub fn premiums(&self) -> &[T] {
        &self.premiums
    }

    pub fn mode(&self) -> &GridMode<T> {
        &self.mode
    }

    /// Enumerate the admissible candidates on a space, in deterministic
    /// premium-major order.
    pub fn contracts(&self, space: &OutcomeSpace<T>) -> Result<Vec<Candidate<T>>, ModelError> {
        let mut out = Vec::new();
        match &self.mode {
            GridMode::Linear { coverages } => {
                for &premium in &self.premiums {
                    for &coverage in coverages {
                        let terms = ContractTerms::Linear { premium, coverage };
                        let contract = terms.to_contract(space)?;
                        out.push((terms, contract));
                    }
                }
            }
            GridMode::Tabular { indemnity_levels } => {
                let losses = space.losses();
                for &premium in &self.premiums {
                    let combos = (0..space.len())
                        .map(|_| indemnity_levels.iter().copied())
                        .multi_cartesian_product();
                    for indemnity in combos {
                        if indemnity
                            .iter()
                            .zip(&losses)
                            .any(|(&pay, &loss)| pay > loss)
                        {
                            continue;
                        }
                        let terms = ContractTerms::Tabular {
                            premium,
                            indemnity: indemnity.clone(),
                        };
                        let contract = Contract::new(space, premium, indemnity)?;
                        out.push((terms, contract));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// How strongly the prescribed design relies on observing the action:
/// the distance between the prescribed action and what the agent would
/// actually play, and the profit the insurer would lose to that drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intensity<T: Scalar> {
    /// `|prescribed level - best-response level|`. Zero when the agent
    /// would comply on its own.
    pub action_gap: T,
    /// Insurer objective at the prescribed action minus at the
    /// best response. Never negative beyond tolerance.
    pub profit_gap: T,
}

/// One solved design: the winning terms, the action it rides on, and
/// the diagnostics the caller needs to judge it.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult<T: Scalar> {
    pub kind: SolveKind,
    pub terms: ContractTerms<T>,
    /// Index into the action grid; `None` for continuous-action solves.
    pub action_index: Option<usize>,
    pub action_level: T,
    /// Insurer objective at the optimum.
    pub objective: T,
    /// Agent's evaluated risk at the optimum.
    pub user_cost: T,
    /// Reservation level the participation constraint used.
    pub reservation: T,
    /// Participation holds with equality (within `tol::VALUE`).
    pub ir_binding: bool,
    /// The prescribed action is one the agent would choose itself.
    pub ic_satisfied: bool,
    /// Objective strictly positive beyond `tol::VALUE`: the insurer has
    /// a reason to offer this design at all.
    pub market_viable: bool,
    /// Moral-hazard gap, filled by the full-information solver.
    pub intensity: Option<Intensity<T>>,
    /// Stamp of the problem this result was computed for.
    pub fingerprint: u64,
}

struct Incumbent<T: Scalar> {
    objective: T,
    level: T,
    terms: ContractTerms<T>,
    contract: Contract<T>,
    action: usize,
    user_cost: T,
}

/// Preference order on exactly tied candidates: lower premium first,
/// then more coverage (lexicographically larger indemnity).
fn preferred_terms<T: Scalar>(a: &ContractTerms<T>, b: &ContractTerms<T>) -> bool {
    if a.premium() < b.premium() {
        return true;
    }
    if a.premium() > b.premium() {
        return false;
    }
    match (a, b) {
        (
            ContractTerms::Linear { coverage: ca, .. },
            ContractTerms::Linear { coverage: cb, .. },
        ) => ca > cb,
        (
            ContractTerms::Tabular { indemnity: ia, .. },
            ContractTerms::Tabular { indemnity: ib, .. },
        ) => {
            for (&x, &y) in ia.iter().zip(ib) {
                if x != y {
                    return x > y;
                }
            }
            false
        }
        // A grid never mixes modes; order mixed terms arbitrarily.
        _ => false,
    }
}

fn candidate_beats<T: Scalar>(
    objective: T,
    level: T,
    terms: &ContractTerms<T>,
    incumbent: &Incumbent<T>,
) -> bool {
    if objective != incumbent.objective {
        return objective > incumbent.objective;
    }
    if level != incumbent.level {
        return level < incumbent.level;
    }
    preferred_terms(terms, &incumbent.terms)
}

fn finish_result<T: Scalar>(
    scenario: &Scenario<T>,
    kind: SolveKind,
    inc: Incumbent<T>,
    reservation: T,
    ic_satisfied: bool,
) -> DesignResult<T> {
    let slack = T::of(tol::VALUE);
    DesignResult {
        kind,
        terms: inc.terms,
        action_index: Some(inc.action),
        action_level: inc.level,
        objective: inc.objective,
        user_cost: inc.user_cost,
        reservation,
        ir_binding: (inc.user_cost - reservation).abs() <= slack,
        ic_satisfied,
        market_viable: inc.objective > slack,
        intensity: None,
        fingerprint: scenario.fingerprint(),
    }
}

/// Full-information design: maximize the insurer objective over every
/// (contract, action) pair whose agent cost clears the reservation.
/// The returned result carries the moral-hazard intensity of relying on
/// the prescribed action.
pub fn solve_full_info<T: Scalar>(
    scenario: &Scenario<T>,
    grid: &ContractGrid<T>,
) -> Result<DesignResult<T>, SolverError> {
    let (reservation, _) = scenario.effective_reservation()?;
    let candidates = grid.contracts(scenario.space())?;
    if candidates.is_empty() {
        return Err(SolverError::EmptyGrid);
    }
    let slack = T::of(tol::VALUE);
    let mut best: Option<Incumbent<T>> = None;
    let mut closest = f64::INFINITY;
    for (terms, contract) in candidates {
        for x in 0..scenario.actions().len() {
            let lottery = user_cost_distribution(scenario, &contract, x)?;
            let cost = evaluate_risk(&scenario.agent().risk, &lottery)?;
            closest = closest.min(cost.as_f64());
            if cost > reservation + slack {
                continue;
            }
            let objective = insurer_objective(scenario, &contract, x)?;
            let level = scenario.actions().level(x);
            let beats = match &best {
                None => true,
                Some(inc) => candidate_beats(objective, level, &terms, inc),
            };
            if beats {
                best = Some(Incumbent {
                    objective,
                    level,
                    terms: terms.clone(),
                    contract: contract.clone(),
                    action: x,
                    user_cost: cost,
                });
            }
        }
    }
    let inc = best.ok_or(SolverError::Infeasible {
        reservation: reservation.as_f64(),
        closest,
    })?;
    let br = best_response(scenario, &inc.contract, TieBreak::InsurerOptimal)?;
    let ic_satisfied = br.argmin.contains(&inc.action);
    let mut result = finish_result(
        scenario,
        SolveKind::FullInfo,
        inc,
        reservation,
        ic_satisfied,
    );
    result.intensity = Some(moral_hazard_intensity(scenario, &result)?);
    Ok(result)
}

/// Hidden-information design: for each contract the agent plays its best
/// response (ties broken by `tie`); the insurer maximizes its objective
/// over contracts whose induced agent cost clears the reservation.
pub fn solve_hidden_info<T: Scalar>(
    scenario: &Scenario<T>,
    grid: &ContractGrid<T>,
    tie: TieBreak,
) -> Result<DesignResult<T>, SolverError> {
    let (reservation, _) = scenario.effective_reservation()?;
    let candidates = grid.contracts(scenario.space())?;
    if candidates.is_empty() {
        return Err(SolverError::EmptyGrid);
    }
    let slack = T::of(tol::VALUE);
    let mut best: Option<Incumbent<T>> = None;
    let mut closest = f64::INFINITY;
    for (terms, contract) in candidates {
        let br = best_response(scenario, &contract, tie)?;
        let x = br.chosen;
        let cost = br.costs[x];
        closest = closest.min(cost.as_f64());
        if cost > reservation + slack {
            continue;
        }
        let objective = insurer_objective(scenario, &contract, x)?;
        let level = scenario.actions().level(x);
        let beats = match &best {
            None => true,
            Some(inc) => candidate_beats(objective, level, &terms, inc),
        };
        if beats {
            best = Some(Incumbent {
                objective,
                level,
                terms,
                contract,
                action: x,
                user_cost: cost,
            });
        }
    }
    let inc = best.ok_or(SolverError::Infeasible {
        reservation: reservation.as_f64(),
        closest,
    })?;
    Ok(finish_result(
        scenario,
        SolveKind::HiddenInfo,
        inc,
        reservation,
        true,
    ))
}

/// Price of relying on the prescribed action in a full-information
/// design. The agent is assumed to comply when indifferent; otherwise
/// it drifts to the best response the insurer likes most, and the
/// intensity records the level distance and the objective drop.
pub fn moral_hazard_intensity<T: Scalar>(
    scenario: &Scenario<T>,
    result: &DesignResult<T>,
) -> Result<Intensity<T>, SolverError> {
    if result.fingerprint != scenario.fingerprint() {
        return Err(SolverError::StaleResult {
            expected: format!("{:016x}", scenario.fingerprint()),
            got: format!("{:016x}", result.fingerprint),
        });
    }
    if result.kind != SolveKind::FullInfo {
        return Err(SolverError::NotFirstBest);
    }
    let prescribed = result
        .action_index
        .expect("full-information results always carry an action index");
    let contract = result.terms.to_contract(scenario.space())?;
    let br = best_response(scenario, &contract, TieBreak::InsurerOptimal)?;
    let played = if br.argmin.contains(&prescribed) {
        prescribed
    } else {
        br.chosen
    };
    let action_gap =
        (scenario.actions().level(prescribed) - scenario.actions().level(played)).abs();
    let profit_gap = insurer_objective(scenario, &contract, prescribed)?
        - insurer_objective(scenario, &contract, played)?;
    Ok(Intensity {
        action_gap,
        profit_gap,
    })
}

/// One agent preference the designer could try to induce, at a price.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceCandidate<T: Scalar> {
    pub label: String,
    pub risk: RiskFunctional<T>,
    /// Cost of shifting the population to this preference (awareness
    /// campaigns, rebates, compliance programs). Zero for the status quo.
    pub shaping_cost: T,
    pub status_quo: bool,
}

/// Validated menu of preference candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceDesignSpace<T: Scalar> {
    candidates: Vec<PreferenceCandidate<T>>,
}

impl<T: Scalar> PreferenceDesignSpace<T> {
    pub fn new(candidates: Vec<PreferenceCandidate<T>>) -> Result<Self, ModelError> {
        if candidates.is_empty() {
            return Err(ModelError::BadGrid {
                what: "preference candidate list",
            });
        }
        let mut saw_status_quo = false;
        for (index, c) in candidates.iter().enumerate() {
            c.risk.validate().map_err(|e| ModelError::BadCandidate {
                index,
                detail: e.to_string(),
            })?;
            if !c.shaping_cost.is_finite() || c.shaping_cost < T::zero() {
                return Err(ModelError::BadCandidate {
                    index,
                    detail: format!(
                        "shaping cost {} must be finite and >= 0",
                        c.shaping_cost.as_f64()
                    ),
                });
            }
            if c.status_quo {
                if saw_status_quo {
                    return Err(ModelError::BadCandidate {
                        index,
                        detail: "more than one status-quo candidate".to_string(),
                    });
                }
                if c.shaping_cost != T::zero() {
                    return Err(ModelError::BadCandidate {
                        index,
                        detail: "the status quo cannot carry a shaping cost".to_string(),
                    });
                }
                saw_status_quo = true;
            }
        }
        Ok(PreferenceDesignSpace { candidates })
    }

    pub fn candidates(&self) -> &[PreferenceCandidate<T>] {
        &self.candidates
    }
}

/// Outcome of designing against one preference candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceRow<T: Scalar> {
    pub label: String,
    pub shaping_cost: T,
    pub status_quo: bool,
    /// Full-information design, when feasible.
    pub full: Option<DesignResult<T>>,
    /// Hidden-information design, when feasible.
    pub hidden: Option<DesignResult<T>>,
    /// Moral-hazard intensity of the full-information design.
    pub intensity: Option<Intensity<T>>,
    /// Hidden-information objective minus the shaping cost.
    pub net_value: Option<T>,
    /// Whether the hidden-information design clears a positive profit.
    pub market_viable: bool,
}

/// All candidate rows plus the index of the best net value.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceReport<T: Scalar> {
    pub rows: Vec<PreferenceRow<T>>,
    /// Row with the highest net value (first such row on exact ties);
    /// present whenever any candidate was feasible.
    pub best: Option<usize>,
}

/// For each candidate preference, re-derive the agent's outside option
/// under that preference (an explicit reservation override, if present,
/// is kept), solve both regimes on the same grid, and net the
/// hidden-information objective against the shaping cost. Errors with
/// the first candidate's infeasibility when no candidate is feasible.
pub fn solve_preference_design<T: Scalar>(
    scenario: &Scenario<T>,
    space: &PreferenceDesignSpace<T>,
    grid: &ContractGrid<T>,
    tie: TieBreak,
) -> Result<PreferenceReport<T>, SolverError> {
    let mut rows = Vec::with_capacity(space.candidates().len());
    let mut first_failure: Option<SolverError> = None;
    for c in space.candidates() {
        let shaped = scenario.with_risk(c.risk.clone())?;
        let full = match solve_full_info(&shaped, grid) {
            Ok(r) => Some(r),
            Err(e @ SolverError::Infeasible { .. }) => {
                first_failure.get_or_insert(e);
                None
            }
            Err(e) => return Err(e),
        };
        let hidden = match solve_hidden_info(&shaped, grid, tie) {
            Ok(r) => Some(r),
            Err(e @ SolverError::Infeasible { .. }) => {
                first_failure.get_or_insert(e);
                None
            }
            Err(e) => return Err(e),
        };
        let intensity = full.as_ref().and_then(|r| r.intensity);
        let net_value = hidden.as_ref().map(|r| r.objective - c.shaping_cost);
        let market_viable = hidden.as_ref().map(|r| r.market_viable).unwrap_or(false);
        rows.push(PreferenceRow {
            label: c.label.clone(),
            shaping_cost: c.shaping_cost,
            status_quo: c.status_quo,
            full,
            hidden,
            intensity,
            net_value,
            market_viable,
        });
    }
    let mut best: Option<usize> = None;
    for (i, row) in rows.iter().enumerate() {
        if let Some(net) = row.net_value {
            best = match best {
                Some(b) if rows[b].net_value.expect("tracked rows have net values") >= net => {
                    Some(b)
                }
                _ => Some(i),
            };
        }
    }
    if best.is_none() {
        return Err(first_failure.unwrap_or(SolverError::NoResults));
    }
    Ok(PreferenceReport { rows, best })
}

/// Designs ranked against one scenario, with recomputed objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<T: Scalar> {
    /// Indices into the input, best objective first (stable on ties).
    pub ranking: Vec<usize>,
    /// Recomputed objectives, in input order.
    pub objectives: Vec<T>,
    /// Objective distance to the best, aligned with `ranking`.
    pub gap_to_best: Vec<T>,
}

/// Rank stored designs against a scenario. Every result must carry the
/// scenario's fingerprint (first-order results carry a family stamp and
/// are rejected here), every stored objective must survive recomputation
/// within `tol::VALUE`, and the regimes must respect the feasible-set
/// inclusion: the best full-information design at least matches the best
/// hidden-information design.
pub fn compare_contracts<T: Scalar>(
    scenario: &Scenario<T>,
    results: &[DesignResult<T>],
) -> Result<ComparisonReport<T>, SolverError> {
    if results.is_empty() {
        return Err(SolverError::NoResults);
    }
    if results
        .iter()
        .any(|r| r.fingerprint != results[0].fingerprint)
    {
        return Err(SolverError::MixedFingerprints);
    }
    let expected = scenario.fingerprint();
    if results[0].fingerprint != expected {
        return Err(SolverError::StaleResult {
            expected: format!("{expected:016x}"),
            got: format!("{:016x}", results[0].fingerprint),
        });
    }
    let slack = T::of(tol::VALUE);
    let mut objectives = Vec::with_capacity(results.len());
    for r in results {
        let contract = r.terms.to_contract(scenario.space())?;
        let x = r
            .action_index
            .expect("fingerprinted discrete results carry an action index");
        let recomputed = insurer_objective(scenario, &contract, x)?;
        if (recomputed - r.objective).abs() > slack {
            return Err(SolverError::ObjectiveMismatch {
                stored: r.objective.as_f64(),
                recomputed: recomputed.as_f64(),
            });
        }
        objectives.push(recomputed);
    }
    let best_of = |kind: SolveKind| {
        results
            .iter()
            .zip(&objectives)
            .filter(|(r, _)| r.kind == kind)
            .map(|(_, &o)| o)
            .fold(None::<T>, |acc, o| match acc {
                Some(a) if a >= o => Some(a),
                _ => Some(o),
            })
    };
    if let (Some(full), Some(hidden)) =
        (best_of(SolveKind::FullInfo), best_of(SolveKind::HiddenInfo))
    {
        if full < hidden - slack {
            return Err(SolverError::OrderingViolated {
                full: full.as_f64(),
                hidden: hidden.as_f64(),
            });
        }
    }
    let mut ranking: Vec<usize> = (0..results.len()).collect();
    ranking.sort_by(|&a, &b| {
        objectives[b]
            .partial_cmp(&objectives[a])
            .expect("objectives are finite")
    });
    let top = objectives[ranking[0]];
    let gap_to_best = ranking.iter().map(|&i| top - objectives[i]).collect();
    Ok(ComparisonReport {
        ranking,
        objectives,
        gap_to_best,
    })
}
