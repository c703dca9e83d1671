//! Ready-made scenario families and the JSON file format.
//!
//! Everything here is concrete in `f64`: these are the construction and
//! persistence conveniences for the generic core. The JSON layer uses
//! dedicated data-transfer structs with strict field checking, so a
//! misspelled key fails loudly instead of silently defaulting.
//!
//! Orientation conventions in files: agent curves are read as
//! disutility curves (applied to costs), the insurer curve as a gain
//! curve (applied to profit).

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contracts::{AgentSpec, InsurerSpec, Scenario};
use crate::error::ModelError;
use crate::preferences::{
    CurveKind, DistortionFunction, Orientation, RiskFunctional, UtilityCurve,
};
use crate::riskspace::{ActionGrid, InvestmentAction, Outcome, OutcomeSpace, RiskKernel};

/// Outcome space with exactly one way to be safe and one way to lose.
pub fn two_point_space(loss: f64) -> Result<Arc<OutcomeSpace<f64>>, ModelError> {
    if !loss.is_finite() || loss <= 0.0 {
        return Err(ModelError::OutOfRange {
            what: "breach loss",
            value: loss,
            bounds: "(0, inf)",
        });
    }
    Ok(Arc::new(OutcomeSpace::new(vec![
        Outcome::new("no_breach", 0.0),
        Outcome::new("breach", loss),
    ])?))
}

/// Scenario on a two-point space: action `x` costs `action_costs[x]`
/// and gets breached with probability `breach_probs[x]`. Action levels
/// are `0, 1, 2, ...`; the agent starts risk-neutral with a derived
/// reservation and the insurer maximizes expected profit.
pub fn preset_two_point(
    loss: f64,
    breach_probs: &[f64],
    action_costs: &[f64],
) -> Result<Scenario<f64>, ModelError> {
    if breach_probs.len() != action_costs.len() {
        return Err(ModelError::ActionCostShape {
            expected: breach_probs.len(),
            got: action_costs.len(),
        });
    }
    let space = two_point_space(loss)?;
    let actions = ActionGrid::new(
        action_costs
            .iter()
            .enumerate()
            .map(|(i, &cost)| InvestmentAction::new(i as f64, cost))
            .collect(),
    )?;
    let mut rows = Vec::with_capacity(breach_probs.len());
    for &p in breach_probs {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(ModelError::OutOfRange {
                what: "breach probability",
                value: p,
                bounds: "[0, 1]",
            });
        }
        rows.push(vec![1.0 - p, p]);
    }
    let kernel = RiskKernel::new(space, actions, rows)?;
    Scenario::new(
        "two_point",
        kernel,
        AgentSpec::new(RiskFunctional::Expectation),
        InsurerSpec::default(),
    )
}

/// Binomial probabilities for `n` independent units each disabled with
/// probability `q`, normalized so the row passes the exact mass check.
fn binomial_row(n: usize, q: f64) -> Vec<f64> {
    let mut coef = 1.0_f64;
    let mut row = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            coef = coef * ((n - k + 1) as f64) / (k as f64);
        }
        row.push(coef * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32));
    }
    let sum: f64 = row.iter().sum();
    for p in &mut row {
        *p /= sum;
    }
    row
}

/// Ransomware scenario: `units` independent machines, each disabled
/// with a per-action infection probability, each disabled machine
/// costing `ransom_per_unit`. Outcome `disabled_k` carries loss
/// `ransom_per_unit * k`; losses follow a binomial law per action.
/// Actions start at zero cost; attach real costs with
/// [`Scenario::with_action_costs`]. Capped at 64 units to keep the
/// binomial coefficients inside exact floating-point range.
pub fn preset_ransomware(
    units: usize,
    infection_probs: &[f64],
    ransom_per_unit: f64,
) -> Result<Scenario<f64>, ModelError> {
    if units == 0 || units > 64 {
        return Err(ModelError::OutOfRange {
            what: "unit count",
            value: units as f64,
            bounds: "[1, 64]",
        });
    }
    if !ransom_per_unit.is_finite() || ransom_per_unit < 0.0 {
        return Err(ModelError::OutOfRange {
            what: "ransom per unit",
            value: ransom_per_unit,
            bounds: "[0, inf)",
        });
    }
    if infection_probs.is_empty() {
        return Err(ModelError::EmptyActions);
    }
    let outcomes = (0..=units)
        .map(|k| Outcome::new(format!("disabled_{k}"), ransom_per_unit * k as f64))
        .collect();
    let space = Arc::new(OutcomeSpace::new(outcomes)?);
    let actions = ActionGrid::new(
        (0..infection_probs.len())
            .map(|i| InvestmentAction::new(i as f64, 0.0))
            .collect(),
    )?;
    let mut rows = Vec::with_capacity(infection_probs.len());
    for &q in infection_probs {
        if !q.is_finite() || !(0.0..=1.0).contains(&q) {
            return Err(ModelError::OutOfRange {
                what: "infection probability",
                value: q,
                bounds: "[0, 1]",
            });
        }
        rows.push(binomial_row(units, q));
    }
    let kernel = RiskKernel::new(space, actions, rows)?;
    Scenario::new(
        "ransomware",
        kernel,
        AgentSpec::new(RiskFunctional::Expectation),
        InsurerSpec::default(),
    )
}

/// One attack intensity the adversary can choose, at a cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackerEffort {
    pub level: f64,
    pub cost: f64,
}

/// An adversary that observes the defender's action and picks the
/// effort maximizing `gain * breach_prob - cost`. `breach[x][a]` is the
/// breach probability when the defender plays action `x` against
/// effort `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct StackelbergSpec {
    gain: f64,
    efforts: Vec<AttackerEffort>,
    breach: Vec<Vec<f64>>,
}

impl StackelbergSpec {
    pub fn new(
        gain: f64,
        efforts: Vec<AttackerEffort>,
        breach: Vec<Vec<f64>>,
    ) -> Result<Self, ModelError> {
        if !gain.is_finite() || gain < 0.0 {
            return Err(ModelError::OutOfRange {
                what: "attacker gain",
                value: gain,
                bounds: "[0, inf)",
            });
        }
        if efforts.is_empty() {
            return Err(ModelError::EmptyActions);
        }
        for (i, e) in efforts.iter().enumerate() {
            if !e.level.is_finite() {
                return Err(ModelError::NonFinite {
                    what: "attacker effort level",
                    value: e.level,
                });
            }
            if !e.cost.is_finite() || e.cost < 0.0 {
                return Err(ModelError::OutOfRange {
                    what: "attacker effort cost",
                    value: e.cost,
                    bounds: "[0, inf)",
                });
            }
            if i > 0 && efforts[i - 1].level >= e.level {
                return Err(ModelError::UnorderedActions { index: i });
            }
        }
        if breach.is_empty() {
            return Err(ModelError::AttackTableShape {
                detail: "no defender rows".to_string(),
            });
        }
        for (x, row) in breach.iter().enumerate() {
            if row.len() != efforts.len() {
                return Err(ModelError::AttackTableShape {
                    detail: format!(
                        "row {x} has {} entries for {} efforts",
                        row.len(),
                        efforts.len()
                    ),
                });
            }
            for &p in row {
                if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                    return Err(ModelError::OutOfRange {
                        what: "breach probability",
                        value: p,
                        bounds: "[0, 1]",
                    });
                }
            }
        }
        Ok(StackelbergSpec {
            gain,
            efforts,
            breach,
        })
    }

    pub fn efforts(&self) -> &[AttackerEffort] {
        &self.efforts
    }
}

/// Fold the adversary's best response into a two-point risk kernel:
/// for each defender action, the breach probability is the one at the
/// attacker's payoff-maximizing effort (exact payoff ties take the
/// lowest effort). Returns the kernel and the chosen effort per action.
pub fn stackelberg_kernel(
    spec: &StackelbergSpec,
    loss: f64,
    actions: ActionGrid<f64>,
) -> Result<(RiskKernel<f64>, Vec<usize>), ModelError> {
    if spec.breach.len() != actions.len() {
        return Err(ModelError::AttackTableShape {
            detail: format!(
                "{} defender rows for {} actions",
                spec.breach.len(),
                actions.len()
            ),
        });
    }
    let space = two_point_space(loss)?;
    let mut rows = Vec::with_capacity(actions.len());
    let mut chosen = Vec::with_capacity(actions.len());
    for row in &spec.breach {
        let mut best = 0;
        let mut best_payoff = spec.gain * row[0] - spec.efforts[0].cost;
        for (a, &p) in row.iter().enumerate().skip(1) {
            let payoff = spec.gain * p - spec.efforts[a].cost;
            if payoff > best_payoff {
                best = a;
                best_payoff = payoff;
            }
        }
        chosen.push(best);
        rows.push(vec![1.0 - row[best], row[best]]);
    }
    let kernel = RiskKernel::new(space, actions, rows)?;
    Ok((kernel, chosen))
}

// ── JSON file format ────────────────────────────────────────────────────────

/// Failure to read or write a scenario file.
#[derive(Debug, Error)]
pub enum ScenarioFileError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] ModelError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDto {
    name: String,
    outcomes: Vec<OutcomeDto>,
    actions: Vec<ActionDto>,
    /// Row-major: one probability row per action.
    kernel: Vec<Vec<f64>>,
    agent: AgentDto,
    #[serde(default)]
    insurer: InsurerDto,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutcomeDto {
    label: String,
    loss: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionDto {
    level: f64,
    cost: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentDto {
    risk: RiskDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reservation: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InsurerDto {
    utility: CurveDto,
}

impl Default for InsurerDto {
    fn default() -> Self {
        InsurerDto {
            utility: CurveDto::Linear,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
enum RiskDto {
    Expectation,
    ExpectedDisutility(CurveParams),
    Avar(AlphaParams),
    Distortion(DistortionParams),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveParams {
    curve: CurveDto,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlphaParams {
    alpha: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistortionParams {
    g: DistortionDto,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
enum CurveDto {
    Linear,
    Exponential(GammaParams),
    Power(EtaParams),
    Tabulated(KnotsParams),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaParams {
    gamma: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EtaParams {
    eta: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KnotsParams {
    knots: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
enum DistortionDto {
    Identity,
    Power(BetaParams),
    Tabulated(KnotsParams),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BetaParams {
    beta: f64,
}

fn curve_from_dto(
    dto: &CurveDto,
    orientation: Orientation,
) -> Result<UtilityCurve<f64>, ModelError> {
    match dto {
        CurveDto::Linear => Ok(UtilityCurve::linear(orientation)),
        CurveDto::Exponential(p) => UtilityCurve::exponential(p.gamma, orientation),
        CurveDto::Power(p) => UtilityCurve::power(p.eta, orientation),
        CurveDto::Tabulated(p) => {
            UtilityCurve::tabulated(p.knots.iter().map(|&[x, y]| (x, y)).collect(), orientation)
        }
    }
}

fn curve_to_dto(curve: &UtilityCurve<f64>) -> CurveDto {
    match curve.kind() {
        CurveKind::Linear => CurveDto::Linear,
        CurveKind::Exponential { gamma } => CurveDto::Exponential(GammaParams { gamma: *gamma }),
        CurveKind::Power { eta } => CurveDto::Power(EtaParams { eta: *eta }),
        CurveKind::Tabulated { knots } => CurveDto::Tabulated(KnotsParams {
            knots: knots.iter().map(|&(x, y)| [x, y]).collect(),
        }),
    }
}

fn risk_from_dto(dto: &RiskDto) -> Result<RiskFunctional<f64>, ModelError> {
    match dto {
        RiskDto::Expectation => Ok(RiskFunctional::Expectation),
        RiskDto::ExpectedDisutility(p) => Ok(RiskFunctional::ExpectedDisutility {
            curve: curve_from_dto(&p.curve, Orientation::Disutility)?,
        }),
        RiskDto::Avar(p) => RiskFunctional::avar(p.alpha),
        RiskDto::Distortion(p) => Ok(RiskFunctional::Distortion {
            g: match &p.g {
                DistortionDto::Identity => DistortionFunction::Identity,
                DistortionDto::Power(b) => DistortionFunction::power(b.beta)?,
                DistortionDto::Tabulated(k) => {
                    DistortionFunction::tabulated(k.knots.iter().map(|&[x, y]| (x, y)).collect())?
                }
            },
        }),
    }
}

fn risk_to_dto(risk: &RiskFunctional<f64>) -> RiskDto {
    match risk {
        RiskFunctional::Expectation => RiskDto::Expectation,
        RiskFunctional::ExpectedDisutility { curve } => RiskDto::ExpectedDisutility(CurveParams {
            curve: curve_to_dto(curve),
        }),
        RiskFunctional::AverageValueAtRisk { alpha } => {
            RiskDto::Avar(AlphaParams { alpha: *alpha })
        }
        RiskFunctional::Distortion { g } => RiskDto::Distortion(DistortionParams {
            g: match g {
                DistortionFunction::Identity => DistortionDto::Identity,
                DistortionFunction::Power { beta } => {
                    DistortionDto::Power(BetaParams { beta: *beta })
                }
                DistortionFunction::Tabulated { knots } => DistortionDto::Tabulated(KnotsParams {
                    knots: knots.iter().map(|&(x, y)| [x, y]).collect(),
                }),
            },
        }),
    }
}

fn scenario_from_dto(dto: ScenarioDto) -> Result<Scenario<f64>, ModelError> {
    let space = Arc::new(OutcomeSpace::new(
        dto.outcomes
            .into_iter()
            .map(|o| Outcome::new(o.label, o.loss))
            .collect(),
    )?);
    let actions = ActionGrid::new(
        dto.actions
            .into_iter()
            .map(|a| InvestmentAction::new(a.level, a.cost))
            .collect(),
    )?;
    let kernel = RiskKernel::new(space, actions, dto.kernel)?;
    let mut agent = AgentSpec::new(risk_from_dto(&dto.agent.risk)?);
    agent.reservation = dto.agent.reservation;
    let insurer = InsurerSpec {
        utility: curve_from_dto(&dto.insurer.utility, Orientation::Gain)?,
    };
    Scenario::new(dto.name, kernel, agent, insurer)
}

fn scenario_to_dto(scenario: &Scenario<f64>) -> ScenarioDto {
    ScenarioDto {
        name: scenario.name().to_string(),
        outcomes: scenario
            .space()
            .outcomes()
            .iter()
            .map(|o| OutcomeDto {
                label: o.label.clone(),
                loss: o.loss,
            })
            .collect(),
        actions: scenario
            .actions()
            .actions()
            .iter()
            .map(|a| ActionDto {
                level: a.level,
                cost: a.cost,
            })
            .collect(),
        kernel: scenario
            .kernel()
            .rows()
            .iter()
            .map(|d| d.probs().to_vec())
            .collect(),
        agent: AgentDto {
            risk: risk_to_dto(&scenario.agent().risk),
            reservation: scenario.agent().reservation,
        },
        insurer: InsurerDto {
            utility: curve_to_dto(&scenario.insurer().utility),
        },
    }
}

/// Render a scenario as pretty-printed JSON.
pub fn scenario_to_json(scenario: &Scenario<f64>) -> String {
    serde_json::to_string_pretty(&scenario_to_dto(scenario))
        .expect("scenario serialization cannot fail")
}

/// Parse and validate a scenario from JSON text.
pub fn scenario_from_json(text: &str) -> Result<Scenario<f64>, ScenarioFileError> {
    let dto: ScenarioDto = serde_json::from_str(text)?;
    Ok(scenario_from_dto(dto)?)
}

/// Write a scenario to a JSON file.
pub fn save_scenario(
    path: impl AsRef<Path>,
    scenario: &Scenario<f64>,
) -> Result<(), ScenarioFileError> {
    let mut text = scenario_to_json(scenario);
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Read and validate a scenario from a JSON file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario<f64>, ScenarioFileError> {
    let text = std::fs::read_to_string(path)?;
    scenario_from_json(&text)
}
