//! Insurance contracts, the scenario bundle, and the agent/insurer
//! operations the solvers are built from.
//!
//! A contract is a premium plus a per-outcome indemnity bounded by the
//! loss. The scenario bundles the risk kernel with both parties'
//! preferences. Sign conventions used throughout: the agent minimizes
//! the risk functional of its out-of-pocket cost
//! `action cost + premium + loss - indemnity`, the insurer maximizes
//! expected utility of its profit `premium - indemnity`, so the
//! difference of the two payoffs is exactly the uninsured cost
//! `action cost + loss` regardless of the contract.

use std::sync::Arc;

use crate::error::ModelError;
use crate::fingerprint::Fnv64;
use crate::num::{tol, Scalar};
use crate::preferences::{
    evaluate_risk, CurveKind, DistortionFunction, Orientation, RiskFunctional, UtilityCurve,
};
use crate::riskspace::{ActionGrid, InvestmentAction, Lottery, OutcomeSpace, RiskKernel};

/// General indemnity contract: a premium paid up front and a
/// per-outcome indemnity with `0 <= indemnity <= loss`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contract<T: Scalar> {
    premium: T,
    indemnity: Vec<T>,
}

impl<T: Scalar> Contract<T> {
    pub fn new(space: &OutcomeSpace<T>, premium: T, indemnity: Vec<T>) -> Result<Self, ModelError> {
        if !premium.is_finite() || premium < T::zero() {
            return Err(ModelError::BadPremium {
                value: premium.as_f64(),
            });
        }
        if indemnity.len() != space.len() {
            return Err(ModelError::IndemnityShape {
                expected: space.len(),
                got: indemnity.len(),
            });
        }
        for (i, &pay) in indemnity.iter().enumerate() {
            let loss = space.loss(i);
            if !pay.is_finite() || pay < T::zero() || pay > loss {
                return Err(ModelError::IndemnityBounds {
                    label: space.label(i).to_string(),
                    indemnity: pay.as_f64(),
                    loss: loss.as_f64(),
                });
            }
        }
        Ok(Contract { premium, indemnity })
    }

    /// The null contract: nothing paid, nothing covered.
    pub fn zero(space: &OutcomeSpace<T>) -> Self {
        Contract {
            premium: T::zero(),
            indemnity: vec![T::zero(); space.len()],
        }
    }

    pub fn premium(&self) -> T {
        self.premium
    }

    pub fn indemnity(&self) -> &[T] {
        &self.indemnity
    }
}

/// Proportional contract: the indemnity is `coverage * loss` in every
/// outcome, with the coverage rate in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearContract<T: Scalar> {
    pub premium: T,
    pub coverage: T,
}

impl<T: Scalar> LinearContract<T> {
    pub fn new(premium: T, coverage: T) -> Result<Self, ModelError> {
        if !premium.is_finite() || premium < T::zero() {
            return Err(ModelError::BadPremium {
                value: premium.as_f64(),
            });
        }
        if !coverage.is_finite() || coverage < T::zero() || coverage > T::one() {
            return Err(ModelError::BadCoverage {
                value: coverage.as_f64(),
            });
        }
        Ok(LinearContract { premium, coverage })
    }

    /// Materialize the proportional rule as an explicit indemnity vector
    /// on the given space.
    pub fn to_contract(&self, space: &OutcomeSpace<T>) -> Contract<T> {
        let indemnity = space
            .losses()
            .into_iter()
            .map(|loss| self.coverage * loss)
            .collect();
        Contract {
            premium: self.premium,
            indemnity,
        }
    }
}

/// How the agent resolves ties among cost-minimizing actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Pick the smallest action index; the conservative reading.
    #[default]
    LowestAction,
    /// Among the agent's optima, pick the action the insurer prefers;
    /// the standard assumption when the insurer designs the contract.
    InsurerOptimal,
    /// Among the agent's optima, pick the action the insurer likes
    /// least; a stress-test reading.
    Pessimistic,
}

/// The agent's preferences: a risk functional over cost lotteries plus
/// an optional reservation level overriding the derived outside option.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec<T: Scalar> {
    pub risk: RiskFunctional<T>,
    pub reservation: Option<T>,
}

impl<T: Scalar> AgentSpec<T> {
    pub fn new(risk: RiskFunctional<T>) -> Self {
        AgentSpec {
            risk,
            reservation: None,
        }
    }
}

/// The insurer's preferences: a gain-oriented utility applied to profit.
#[derive(Debug, Clone, PartialEq)]
pub struct InsurerSpec<T: Scalar> {
    pub utility: UtilityCurve<T>,
}

impl<T: Scalar> Default for InsurerSpec<T> {
    /// Risk-neutral insurer maximizing expected profit.
    fn default() -> Self {
        InsurerSpec {
            utility: UtilityCurve::linear(Orientation::Gain),
        }
    }
}

/// A complete design problem: the risk kernel and both parties'
/// preferences, under one name.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T: Scalar> {
    name: String,
    kernel: RiskKernel<T>,
    agent: AgentSpec<T>,
    insurer: InsurerSpec<T>,
}

impl<T: Scalar> Scenario<T> {
    pub fn new(
        name: impl Into<String>,
        kernel: RiskKernel<T>,
        agent: AgentSpec<T>,
        insurer: InsurerSpec<T>,
    ) -> Result<Self, ModelError> {
        agent.risk.validate()?;
        if let Some(r) = agent.reservation {
            if !r.is_finite() {
                return Err(ModelError::NonFinite {
                    what: "reservation level",
                    value: r.as_f64(),
                });
            }
        }
        Ok(Scenario {
            name: name.into(),
            kernel,
            agent,
            insurer,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kernel(&self) -> &RiskKernel<T> {
        &self.kernel
    }

    pub fn space(&self) -> &Arc<OutcomeSpace<T>> {
        self.kernel.space()
    }

    pub fn actions(&self) -> &ActionGrid<T> {
        self.kernel.actions()
    }

    pub fn agent(&self) -> &AgentSpec<T> {
        &self.agent
    }

    pub fn insurer(&self) -> &InsurerSpec<T> {
        &self.insurer
    }

    /// Same scenario with the agent's risk functional replaced. The
    /// reservation override, if any, is kept as given; a derived
    /// reservation is re-derived under the new functional on demand.
    pub fn with_risk(&self, risk: RiskFunctional<T>) -> Result<Self, ModelError> {
        risk.validate()?;
        let mut out = self.clone();
        out.agent.risk = risk;
        Ok(out)
    }

    /// Same scenario with an explicit reservation level.
    pub fn with_reservation(&self, reservation: T) -> Result<Self, ModelError> {
        if !reservation.is_finite() {
            return Err(ModelError::NonFinite {
                what: "reservation level",
                value: reservation.as_f64(),
            });
        }
        let mut out = self.clone();
        out.agent.reservation = Some(reservation);
        Ok(out)
    }

    /// Same scenario with the action costs replaced (levels and loss
    /// laws unchanged).
    pub fn with_action_costs(&self, costs: Vec<T>) -> Result<Self, ModelError> {
        let actions = self.actions();
        if costs.len() != actions.len() {
            return Err(ModelError::ActionCostShape {
                expected: actions.len(),
                got: costs.len(),
            });
        }
        let rebuilt = ActionGrid::new(
            actions
                .actions()
                .iter()
                .zip(costs)
                .map(|(a, cost)| InvestmentAction::new(a.level, cost))
                .collect(),
        )?;
        let rows = self
            .kernel
            .rows()
            .iter()
            .map(|d| d.probs().to_vec())
            .collect();
        let kernel = RiskKernel::new(Arc::clone(self.space()), rebuilt, rows)?;
        Ok(Scenario {
            name: self.name.clone(),
            kernel,
            agent: self.agent.clone(),
            insurer: self.insurer.clone(),
        })
    }

    /// The reservation level the solvers hold the agent to, and whether
    /// it was derived from the uninsured problem (`true`) or supplied
    /// explicitly (`false`).
    pub fn effective_reservation(&self) -> Result<(T, bool), ModelError> {
        match self.agent.reservation {
            Some(r) => Ok((r, false)),
            None => Ok((compute_reservation(self)?.value, true)),
        }
    }

    /// Content hash of the whole problem. Results carry this stamp so a
    /// result computed for one scenario cannot be interpreted against
    /// another.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write_str("scenario/v1");
        h.write_str(&self.name);
        let space = self.space();
        h.write_u64(space.len() as u64);
        for o in space.outcomes() {
            h.write_str(&o.label);
            h.write_f64(o.loss.as_f64());
        }
        let actions = self.actions();
        h.write_u64(actions.len() as u64);
        for a in actions.actions() {
            h.write_f64(a.level.as_f64());
            h.write_f64(a.cost.as_f64());
        }
        for row in self.kernel.rows() {
            for &p in row.probs() {
                h.write_f64(p.as_f64());
            }
        }
        encode_risk(&mut h, &self.agent.risk);
        match self.agent.reservation {
            None => h.write_u8(0),
            Some(r) => {
                h.write_u8(1);
                h.write_f64(r.as_f64());
            }
        }
        encode_curve(&mut h, &self.insurer.utility);
        h.finish()
    }
}

pub(crate) fn encode_risk<T: Scalar>(h: &mut Fnv64, risk: &RiskFunctional<T>) {
    match risk {
        RiskFunctional::Expectation => h.write_u8(0),
        RiskFunctional::ExpectedDisutility { curve } => {
            h.write_u8(1);
            encode_curve(h, curve);
        }
        RiskFunctional::AverageValueAtRisk { alpha } => {
            h.write_u8(2);
            h.write_f64(alpha.as_f64());
        }
        RiskFunctional::Distortion { g } => {
            h.write_u8(3);
            encode_distortion(h, g);
        }
    }
}

fn encode_curve<T: Scalar>(h: &mut Fnv64, curve: &UtilityCurve<T>) {
    h.write_u8(match curve.orientation() {
        Orientation::Disutility => 0,
        Orientation::Gain => 1,
    });
    match curve.kind() {
        CurveKind::Linear => h.write_u8(0),
        CurveKind::Exponential { gamma } => {
            h.write_u8(1);
            h.write_f64(gamma.as_f64());
        }
        CurveKind::Power { eta } => {
            h.write_u8(2);
            h.write_f64(eta.as_f64());
        }
        CurveKind::Tabulated { knots } => {
            h.write_u8(3);
            h.write_u64(knots.len() as u64);
            for &(x, y) in knots {
                h.write_f64(x.as_f64());
                h.write_f64(y.as_f64());
            }
        }
    }
}

fn encode_distortion<T: Scalar>(h: &mut Fnv64, g: &DistortionFunction<T>) {
    match g {
        DistortionFunction::Identity => h.write_u8(0),
        DistortionFunction::Power { beta } => {
            h.write_u8(1);
            h.write_f64(beta.as_f64());
        }
        DistortionFunction::Tabulated { knots } => {
            h.write_u8(2);
            h.write_u64(knots.len() as u64);
            for &(x, y) in knots {
                h.write_f64(x.as_f64());
                h.write_f64(y.as_f64());
            }
        }
    }
}

fn check_pair<T: Scalar>(
    scenario: &Scenario<T>,
    contract: &Contract<T>,
    action: usize,
) -> Result<(), ModelError> {
    if contract.indemnity.len() != scenario.space().len() {
        return Err(ModelError::IndemnityShape {
            expected: scenario.space().len(),
            got: contract.indemnity.len(),
        });
    }
    if action >= scenario.actions().len() {
        return Err(ModelError::ActionOutOfRange {
            index: action,
            len: scenario.actions().len(),
        });
    }
    Ok(())
}

/// The agent's out-of-pocket cost lottery under a contract and action:
/// `action cost + premium + loss - indemnity`, outcome by outcome.
pub fn user_cost_distribution<T: Scalar>(
    scenario: &Scenario<T>,
    contract: &Contract<T>,
    action: usize,
) -> Result<Lottery<T>, ModelError> {
    check_pair(scenario, contract, action)?;
    let kappa = scenario.actions().cost(action);
    let dist = scenario.kernel().distribution(action);
    let values = scenario
        .space()
        .losses()
        .into_iter()
        .zip(&contract.indemnity)
        .map(|(loss, &pay)| kappa + contract.premium + loss - pay)
        .collect();
    Lottery::new(values, dist.probs().to_vec())
}

/// The insurer's profit lottery under a contract and action:
/// `premium - indemnity`, outcome by outcome.
pub fn insurer_profit_distribution<T: Scalar>(
    scenario: &Scenario<T>,
    contract: &Contract<T>,
    action: usize,
) -> Result<Lottery<T>, ModelError> {
    check_pair(scenario, contract, action)?;
    let dist = scenario.kernel().distribution(action);
    let values = contract
        .indemnity
        .iter()
        .map(|&pay| contract.premium - pay)
        .collect();
    Lottery::new(values, dist.probs().to_vec())
}

/// Expected utility of profit for the insurer, under its gain curve.
/// With the default linear curve this is expected profit.
pub fn insurer_objective<T: Scalar>(
    scenario: &Scenario<T>,
    contract: &Contract<T>,
    action: usize,
) -> Result<T, ModelError> {
    let profit = insurer_profit_distribution(scenario, contract, action)?;
    let mut acc = T::zero();
    for (&z, &p) in profit.values().iter().zip(profit.probs()) {
        acc = acc + p * scenario.insurer().utility.evaluate(z)?;
    }
    Ok(acc)
}

/// The uninsured problem's optimum: the smallest risk value of
/// `action cost + loss` over actions, and the first action attaining it
/// (within `tol::VALUE`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reservation<T: Scalar> {
    pub value: T,
    pub action: usize,
}

/// Solve the agent's uninsured problem to obtain the reservation level:
/// the best the agent can do by self-protecting without any contract.
pub fn compute_reservation<T: Scalar>(
    scenario: &Scenario<T>,
) -> Result<Reservation<T>, ModelError> {
    let zero = Contract::zero(scenario.space());
    let mut costs = Vec::with_capacity(scenario.actions().len());
    for x in 0..scenario.actions().len() {
        let lottery = user_cost_distribution(scenario, &zero, x)?;
        costs.push(evaluate_risk(&scenario.agent().risk, &lottery)?);
    }
    let value = costs
        .iter()
        .copied()
        .fold(None::<T>, |best, c| match best {
            Some(b) if b <= c => Some(b),
            _ => Some(c),
        })
        .expect("action grid is non-empty");
    let slack = T::of(tol::VALUE);
    let action = costs
        .iter()
        .position(|&c| c <= value + slack)
        .expect("the minimum is attained");
    Ok(Reservation { value, action })
}

/// Participation check for one (contract, action) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrCheck<T: Scalar> {
    /// Whether signing is acceptable: evaluated cost at most the
    /// reservation, within `tol::VALUE`.
    pub ok: bool,
    /// Risk value of the agent's cost under the contract and action.
    pub evaluated_cost: T,
    /// Reservation level the cost is held against.
    pub reservation: T,
}

/// Check the participation constraint: under this contract and action,
/// is the agent at least as well off as its uninsured optimum?
pub fn ir_check<T: Scalar>(
    scenario: &Scenario<T>,
    contract: &Contract<T>,
    action: usize,
) -> Result<IrCheck<T>, ModelError> {
    let lottery = user_cost_distribution(scenario, contract, action)?;
    let evaluated_cost = evaluate_risk(&scenario.agent().risk, &lottery)?;
    let (reservation, _) = scenario.effective_reservation()?;
    Ok(IrCheck {
        ok: evaluated_cost <= reservation + T::of(tol::VALUE),
        evaluated_cost,
        reservation,
    })
}

/// The agent's action choice under a fixed contract.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse<T: Scalar> {
    /// Risk value of the agent's cost at every action.
    pub costs: Vec<T>,
    /// Actions within `tol::TIE` of the minimum, ascending.
    pub argmin: Vec<usize>,
    /// The selected action after tie-breaking.
    pub chosen: usize,
}

/// Minimize the agent's risk over actions under a fixed contract, with
/// ties resolved by the given rule.
pub fn best_response<T: Scalar>(
    scenario: &Scenario<T>,
    contract: &Contract<T>,
    tie: TieBreak,
) -> Result<BestResponse<T>, ModelError> {
    let mut costs = Vec::with_capacity(scenario.actions().len());
    for x in 0..scenario.actions().len() {
        let lottery = user_cost_distribution(scenario, contract, x)?;
        costs.push(evaluate_risk(&scenario.agent().risk, &lottery)?);
    }
    let min = costs
        .iter()
        .copied()
        .fold(None::<T>, |best, c| match best {
            Some(b) if b <= c => Some(b),
            _ => Some(c),
        })
        .expect("action grid is non-empty");
    let slack = T::of(tol::TIE);
    let argmin: Vec<usize> = (0..costs.len())
        .filter(|&x| costs[x] <= min + slack)
        .collect();
    let chosen = match tie {
        TieBreak::LowestAction => argmin[0],
        TieBreak::InsurerOptimal | TieBreak::Pessimistic => {
            let mut chosen = argmin[0];
            let mut chosen_obj = insurer_objective(scenario, contract, chosen)?;
            for &x in &argmin[1..] {
                let obj = insurer_objective(scenario, contract, x)?;
                let better = match tie {
                    TieBreak::InsurerOptimal => obj > chosen_obj + slack,
                    _ => obj < chosen_obj - slack,
                };
                if better {
                    chosen = x;
                    chosen_obj = obj;
                }
            }
            chosen
        }
    };
    Ok(BestResponse {
        costs,
        argmin,
        chosen,
    })
}
