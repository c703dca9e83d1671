//! Command-line front end: validate scenario files, run the design
//! solvers, and sweep parameters into CSV reports.
//!
//! Exit codes: 0 on success (including a valid-but-warned scenario),
//! 1 on usage or validation errors, 2 when the requested design is
//! infeasible. An infeasible run never leaves a partial `--out` file.
//! All numeric output uses fixed 9-digit decimals so repeated runs are
//! byte-identical.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use premia::contracts::TieBreak;
use premia::preferences::RiskFunctional as GenericRisk;
use premia::riskspace::check_kernel_monotone;
use premia::scenarios::load_scenario;
use premia::solvers::first_order::solve_first_order;
use premia::solvers::{
    solve_full_info, solve_hidden_info, solve_preference_design, ContractTerms, SolveKind,
};
use premia::{
    BreachCurve, ContractGrid, DesignResult, InvestCost, PreferenceCandidate,
    PreferenceDesignSpace, PreferenceReport, RiskFunctional, Scenario, SmoothFamily, SolverError,
};

#[derive(Parser)]
#[command(
    name = "premia",
    version,
    about = "Design cyber-insurance contracts over scenario files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file and report its structure.
    Validate {
        /// Scenario JSON file.
        scenario: PathBuf,
    },
    /// Solve one contract-design problem.
    Design(DesignArgs),
    /// Re-solve across a swept parameter and emit CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Which design problem to solve.
    #[arg(long, value_enum, default_value_t = Mode::Full)]
    mode: Mode,
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    /// How the agent settles exact ties between actions.
    #[arg(long, value_enum, default_value_t = TieArg::Insurer)]
    tie_break: TieArg,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Preference candidate for --mode pref, repeatable. Comma-joined
    /// key=value pairs: kind=expectation|avar|distortion|exp-disutility,
    /// alpha=, beta=, gamma=, cost=, label=, plus a bare `sq` marking
    /// the status quo. Example: --theta kind=avar,alpha=0.25,cost=5
    #[arg(long = "theta")]
    thetas: Vec<String>,
    #[command(flatten)]
    fo: FirstOrderArgs,
}

#[derive(Args)]
struct GridArgs {
    /// Premium axis as LO:HI:STEP. Default 0:max_loss:max_loss/20.
    #[arg(long)]
    premium_range: Option<String>,
    /// Coverage axis as LO:HI:STEP. Default 0:1:0.25.
    #[arg(long)]
    coverage_range: Option<String>,
}

#[derive(Args)]
struct FirstOrderArgs {
    /// Breach loss for --mode first-order. Default: the scenario's
    /// maximum loss.
    #[arg(long)]
    fo_loss: Option<f64>,
    /// Breach probability curve as KIND:BASE:RATE with KIND one of
    /// exp (base*e^(-rate*x)) or rational (base/(1+rate*x)).
    #[arg(long, default_value = "exp:0.5:1")]
    fo_breach: String,
    /// Investment cost as LINEAR[:QUADRATIC].
    #[arg(long, default_value = "10")]
    fo_cost: String,
    /// Investment range as LO:HI.
    #[arg(long, default_value = "0:10")]
    fo_action_range: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Parameter to sweep.
    #[arg(long, value_enum)]
    param: SweepParam,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    /// Number of sweep points; 1 means just `from`.
    #[arg(long)]
    steps: usize,
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    /// How the agent settles exact ties between actions.
    #[arg(long, value_enum, default_value_t = TieArg::Insurer)]
    tie_break: TieArg,
    /// Also write the CSV to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Mode {
    Full,
    Hidden,
    FirstOrder,
    Pref,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    /// Lowest investment level wins.
    Low,
    /// The insurer's favorite best response wins.
    Insurer,
}

impl TieArg {
    fn policy(self) -> TieBreak {
        match self {
            TieArg::Low => TieBreak::LowestAction,
            TieArg::Insurer => TieBreak::InsurerOptimal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    AvarAlpha,
    Reservation,
    Premium,
    Coverage,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Infeasible { reservation: f64, closest: f64 },
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Infeasible {
                reservation,
                closest,
            } => CliError::Infeasible {
                reservation,
                closest,
            },
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    let outcome = match cli.command {
        Command::Validate { scenario } => cmd_validate(&scenario),
        Command::Design(args) => cmd_design(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Infeasible {
            reservation,
            closest,
        }) => {
            eprintln!(
                "infeasible: no contract on the grid clears the reservation {} \
                 (closest agent cost {})",
                fmt9(reservation),
                fmt9(closest)
            );
            2
        }
    }
}

/// Fixed 9-digit decimal with negative zero folded into plain zero.
fn fmt9(v: f64) -> String {
    let s = format!("{v:.9}");
    if s.starts_with('-') && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn load(path: &PathBuf) -> Result<Scenario, CliError> {
    load_scenario(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Emit the report: always to stdout, and to `--out` when given.
fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    print!("{text}");
    if let Some(path) = out {
        std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

// ── validate ────────────────────────────────────────────────────────────────

fn cmd_validate(path: &PathBuf) -> Result<(), CliError> {
    let scenario = load(path)?;
    let (reservation, derived) = scenario
        .effective_reservation()
        .map_err(|e| usage(e.to_string()))?;
    let report = check_kernel_monotone(scenario.kernel());
    let mut text = String::new();
    let mut row = |k: &str, v: &str| {
        let _ = writeln!(text, "{k:<16}{v}");
    };
    row("scenario", scenario.name());
    row("outcomes", &scenario.space().len().to_string());
    row("actions", &scenario.actions().len().to_string());
    row("agent", &scenario.agent().risk.to_string());
    row(
        "reservation",
        &format!(
            "{} ({})",
            fmt9(reservation),
            if derived { "derived" } else { "explicit" }
        ),
    );
    row("insurer", &scenario.insurer().utility.to_string());
    row(
        "kernel",
        &if report.is_monotone() {
            "FOSD-monotone".to_string()
        } else {
            format!(
                "not FOSD-monotone ({} violating action pair(s))",
                report.violations.len()
            )
        },
    );
    row("fingerprint", &format!("{:016x}", scenario.fingerprint()));
    if !report.is_monotone() {
        eprintln!(
            "warning: more investment does not uniformly reduce losses; \
             violating action pairs: {:?}",
            report.violations
        );
    }
    print!("{text}");
    Ok(())
}

// ── shared parsing ──────────────────────────────────────────────────────────

fn parse_f64(token: &str, what: &str) -> Result<f64, CliError> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("{what}: cannot parse number from '{token}'")))
}

fn parse_range(text: &str, what: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("{what}: expected LO:HI:STEP, got '{text}'")));
    }
    Ok((
        parse_f64(parts[0], what)?,
        parse_f64(parts[1], what)?,
        parse_f64(parts[2], what)?,
    ))
}

fn build_grid(grid: &GridArgs, max_loss: f64) -> Result<ContractGrid, CliError> {
    let premium = match &grid.premium_range {
        Some(text) => parse_range(text, "--premium-range")?,
        None => (0.0, max_loss, (max_loss / 20.0).max(f64::MIN_POSITIVE)),
    };
    let coverage = match &grid.coverage_range {
        Some(text) => parse_range(text, "--coverage-range")?,
        None => (0.0, 1.0, 0.25),
    };
    ContractGrid::linear_ranges(premium, coverage).map_err(|e| usage(e.to_string()))
}

fn grid_axes(grid: &GridArgs, max_loss: f64) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let built = build_grid(grid, max_loss)?;
    let premiums = built.premiums().to_vec();
    let coverages = match built.mode() {
        premia::solvers::GridMode::Linear { coverages } => coverages.clone(),
        premia::solvers::GridMode::Tabular { .. } => unreachable!("ranges build linear grids"),
    };
    Ok((premiums, coverages))
}

// ── design ──────────────────────────────────────────────────────────────────

fn cmd_design(args: DesignArgs) -> Result<(), CliError> {
    let scenario = load(&args.scenario)?;
    if args.mode != Mode::Pref && !args.thetas.is_empty() {
        return Err(usage("--theta is only meaningful with --mode pref"));
    }
    match args.mode {
        Mode::Full => {
            let grid = build_grid(&args.grid, scenario.space().max_loss())?;
            let result = solve_full_info(&scenario, &grid)?;
            emit(&render_design(&result, args.format), args.out.as_ref())
        }
        Mode::Hidden => {
            let grid = build_grid(&args.grid, scenario.space().max_loss())?;
            let result = solve_hidden_info(&scenario, &grid, args.tie_break.policy())?;
            emit(&render_design(&result, args.format), args.out.as_ref())
        }
        Mode::FirstOrder => {
            let loss = args.fo.fo_loss.unwrap_or(scenario.space().max_loss());
            let family = build_family(&args.fo, loss, scenario.agent().risk.clone())?;
            let (premiums, coverages) = grid_axes(&args.grid, loss)?;
            let result = solve_first_order(&family, &premiums, &coverages)?;
            emit(&render_design(&result, args.format), args.out.as_ref())
        }
        Mode::Pref => {
            let grid = build_grid(&args.grid, scenario.space().max_loss())?;
            if args.thetas.is_empty() {
                return Err(usage("--mode pref needs at least one --theta"));
            }
            let candidates = args
                .thetas
                .iter()
                .map(|t| parse_theta(t))
                .collect::<Result<Vec<_>, _>>()?;
            let space = PreferenceDesignSpace::new(candidates).map_err(|e| usage(e.to_string()))?;
            let report =
                solve_preference_design(&scenario, &space, &grid, args.tie_break.policy())?;
            emit(&render_pref(&report, args.format), args.out.as_ref())
        }
    }
}

fn build_family(
    fo: &FirstOrderArgs,
    loss: f64,
    risk: RiskFunctional,
) -> Result<SmoothFamily, CliError> {
    let parts: Vec<&str> = fo.fo_breach.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!(
            "--fo-breach: expected KIND:BASE:RATE, got '{}'",
            fo.fo_breach
        )));
    }
    let base = parse_f64(parts[1], "--fo-breach")?;
    let rate = parse_f64(parts[2], "--fo-breach")?;
    let curve = match parts[0] {
        "exp" => BreachCurve::ExponentialDecay { base, rate },
        "rational" => BreachCurve::RationalDecay { base, rate },
        other => {
            return Err(usage(format!(
                "--fo-breach: unknown curve kind '{other}' (use exp or rational)"
            )))
        }
    };
    let cost_parts: Vec<&str> = fo.fo_cost.split(':').collect();
    let invest = match cost_parts.as_slice() {
        [lin] => InvestCost::new(parse_f64(lin, "--fo-cost")?, 0.0),
        [lin, quad] => InvestCost::new(parse_f64(lin, "--fo-cost")?, parse_f64(quad, "--fo-cost")?),
        _ => {
            return Err(usage(format!(
                "--fo-cost: expected LINEAR[:QUADRATIC], got '{}'",
                fo.fo_cost
            )))
        }
    }
    .map_err(|e| usage(e.to_string()))?;
    let range_parts: Vec<&str> = fo.fo_action_range.split(':').collect();
    if range_parts.len() != 2 {
        return Err(usage(format!(
            "--fo-action-range: expected LO:HI, got '{}'",
            fo.fo_action_range
        )));
    }
    let lo = parse_f64(range_parts[0], "--fo-action-range")?;
    let hi = parse_f64(range_parts[1], "--fo-action-range")?;
    SmoothFamily::new(loss, curve, invest, (lo, hi), risk).map_err(CliError::from)
}

fn parse_theta(text: &str) -> Result<PreferenceCandidate, CliError> {
    let mut kind: Option<&str> = None;
    let mut alpha: Option<f64> = None;
    let mut beta: Option<f64> = None;
    let mut gamma: Option<f64> = None;
    let mut cost = 0.0;
    let mut label: Option<String> = None;
    let mut status_quo = false;
    for token in text.split(',') {
        let token = token.trim();
        if token == "sq" {
            status_quo = true;
            continue;
        }
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| usage(format!("--theta: expected key=value, got '{token}'")))?;
        match key {
            "kind" => kind = Some(value),
            "alpha" => alpha = Some(parse_f64(value, "--theta alpha")?),
            "beta" => beta = Some(parse_f64(value, "--theta beta")?),
            "gamma" => gamma = Some(parse_f64(value, "--theta gamma")?),
            "cost" => cost = parse_f64(value, "--theta cost")?,
            "label" => label = Some(value.to_string()),
            other => return Err(usage(format!("--theta: unknown key '{other}'"))),
        }
    }
    let kind = kind.ok_or_else(|| usage("--theta: missing kind="))?;
    let risk: RiskFunctional = match kind {
        "expectation" => GenericRisk::Expectation,
        "avar" => {
            let a = alpha.ok_or_else(|| usage("--theta: kind=avar needs alpha="))?;
            GenericRisk::avar(a).map_err(|e| usage(e.to_string()))?
        }
        "distortion" => {
            let b = beta.ok_or_else(|| usage("--theta: kind=distortion needs beta="))?;
            GenericRisk::Distortion {
                g: premia::preferences::DistortionFunction::power(b)
                    .map_err(|e| usage(e.to_string()))?,
            }
        }
        "exp-disutility" => {
            let g = gamma.ok_or_else(|| usage("--theta: kind=exp-disutility needs gamma="))?;
            GenericRisk::ExpectedDisutility {
                curve: premia::preferences::UtilityCurve::exponential(
                    g,
                    premia::preferences::Orientation::Disutility,
                )
                .map_err(|e| usage(e.to_string()))?,
            }
        }
        other => return Err(usage(format!("--theta: unknown kind '{other}'"))),
    };
    Ok(PreferenceCandidate {
        label: label.unwrap_or_else(|| risk.to_string()),
        risk,
        shaping_cost: cost,
        status_quo,
    })
}

// ── rendering ───────────────────────────────────────────────────────────────

fn mode_name(kind: SolveKind) -> &'static str {
    match kind {
        SolveKind::FullInfo => "full",
        SolveKind::HiddenInfo => "hidden",
        SolveKind::FirstOrder => "first-order",
    }
}

fn render_design(r: &DesignResult, format: Format) -> String {
    match format {
        Format::Table => render_design_table(r),
        Format::Json => render_design_json(r),
        Format::Csv => render_design_csv(r),
    }
}

fn render_design_table(r: &DesignResult) -> String {
    let mut text = String::new();
    let mut row = |k: &str, v: String| {
        let _ = writeln!(text, "{k:<16}{v}");
    };
    row("mode", mode_name(r.kind).to_string());
    row("premium", fmt9(r.terms.premium()));
    match &r.terms {
        ContractTerms::Linear { coverage, .. } => row("coverage", fmt9(*coverage)),
        ContractTerms::Tabular { indemnity, .. } => row(
            "indemnity",
            indemnity
                .iter()
                .map(|&v| fmt9(v))
                .collect::<Vec<_>>()
                .join(" "),
        ),
    }
    row(
        "action index",
        r.action_index
            .map(|i| i.to_string())
            .unwrap_or_else(|| "-".to_string()),
    );
    row("action level", fmt9(r.action_level));
    row("objective", fmt9(r.objective));
    row("user cost", fmt9(r.user_cost));
    row("reservation", fmt9(r.reservation));
    row("ir binding", yes_no(r.ir_binding).to_string());
    row("ic satisfied", yes_no(r.ic_satisfied).to_string());
    row("market viable", yes_no(r.market_viable).to_string());
    row(
        "intensity",
        match &r.intensity {
            Some(i) => format!(
                "action {}, profit {}",
                fmt9(i.action_gap),
                fmt9(i.profit_gap)
            ),
            None => "-".to_string(),
        },
    );
    row("fingerprint", format!("{:016x}", r.fingerprint));
    text
}

fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn render_design_json(r: &DesignResult) -> String {
    let mut text = String::from("{");
    let _ = write!(text, "\"mode\":{}", json_str(mode_name(r.kind)));
    let _ = write!(text, ",\"premium\":{}", fmt9(r.terms.premium()));
    match &r.terms {
        ContractTerms::Linear { coverage, .. } => {
            let _ = write!(text, ",\"coverage\":{}", fmt9(*coverage));
        }
        ContractTerms::Tabular { indemnity, .. } => {
            let _ = write!(
                text,
                ",\"indemnity\":[{}]",
                indemnity
                    .iter()
                    .map(|&v| fmt9(v))
                    .collect::<Vec<_>>()
                    .join(",")
            );
        }
    }
    match r.action_index {
        Some(i) => {
            let _ = write!(text, ",\"action_index\":{i}");
        }
        None => text.push_str(",\"action_index\":null"),
    }
    let _ = write!(text, ",\"action_level\":{}", fmt9(r.action_level));
    let _ = write!(text, ",\"objective\":{}", fmt9(r.objective));
    let _ = write!(text, ",\"user_cost\":{}", fmt9(r.user_cost));
    let _ = write!(text, ",\"reservation\":{}", fmt9(r.reservation));
    let _ = write!(text, ",\"ir_binding\":{}", r.ir_binding);
    let _ = write!(text, ",\"ic_satisfied\":{}", r.ic_satisfied);
    let _ = write!(text, ",\"market_viable\":{}", r.market_viable);
    match &r.intensity {
        Some(i) => {
            let _ = write!(
                text,
                ",\"intensity\":{{\"action_gap\":{},\"profit_gap\":{}}}",
                fmt9(i.action_gap),
                fmt9(i.profit_gap)
            );
        }
        None => text.push_str(",\"intensity\":null"),
    }
    let _ = write!(
        text,
        ",\"fingerprint\":{}",
        json_str(&format!("{:016x}", r.fingerprint))
    );
    text.push_str("}\n");
    text
}

fn render_design_csv(r: &DesignResult) -> String {
    let mut text = String::from(
        "premium,coverage,action_level,objective,user_cost,reservation,\
         ir_binding,ic_satisfied,market_viable,intensity_action,intensity_profit\n",
    );
    let coverage = match &r.terms {
        ContractTerms::Linear { coverage, .. } => fmt9(*coverage),
        ContractTerms::Tabular { .. } => "nan".to_string(),
    };
    let (ia, ip) = match &r.intensity {
        Some(i) => (fmt9(i.action_gap), fmt9(i.profit_gap)),
        None => ("nan".to_string(), "nan".to_string()),
    };
    let _ = writeln!(
        text,
        "{},{},{},{},{},{},{},{},{},{},{}",
        fmt9(r.terms.premium()),
        coverage,
        fmt9(r.action_level),
        fmt9(r.objective),
        fmt9(r.user_cost),
        fmt9(r.reservation),
        r.ir_binding,
        r.ic_satisfied,
        r.market_viable,
        ia,
        ip
    );
    text
}

fn render_pref(report: &PreferenceReport, format: Format) -> String {
    match format {
        Format::Table => render_pref_table(report),
        Format::Json => render_pref_json(report),
        Format::Csv => render_pref_csv(report),
    }
}

fn pref_columns(row: &premia::PreferenceRow) -> [String; 5] {
    let obj = |r: &Option<DesignResult>| {
        r.as_ref()
            .map(|d| fmt9(d.objective))
            .unwrap_or_else(|| "nan".to_string())
    };
    let (ia, ip) = match &row.intensity {
        Some(i) => (fmt9(i.action_gap), fmt9(i.profit_gap)),
        None => ("nan".to_string(), "nan".to_string()),
    };
    let net = row.net_value.map(fmt9).unwrap_or_else(|| "nan".to_string());
    [obj(&row.full), obj(&row.hidden), ia, ip, net]
}

fn render_pref_table(report: &PreferenceReport) -> String {
    let mut text = String::new();
    let label_width = report
        .rows
        .iter()
        .map(|r| r.label.len())
        .chain(std::iter::once("label".len()))
        .max()
        .unwrap_or(5)
        + 2;
    let _ = writeln!(
        text,
        "{:<label_width$}{:<14}{:<4}{:<16}{:<16}{:<16}{:<16}{:<16}viable",
        "label", "cost", "sq", "obj_full", "obj_hidden", "gap_action", "gap_profit", "net_value",
    );
    for row in &report.rows {
        let [full, hidden, ia, ip, net] = pref_columns(row);
        let _ = writeln!(
            text,
            "{:<label_width$}{:<14}{:<4}{:<16}{:<16}{:<16}{:<16}{:<16}{}",
            row.label,
            fmt9(row.shaping_cost),
            yes_no(row.status_quo),
            full,
            hidden,
            ia,
            ip,
            net,
            yes_no(row.market_viable)
        );
    }
    let best = report
        .best
        .map(|i| report.rows[i].label.clone())
        .unwrap_or_else(|| "-".to_string());
    let _ = writeln!(text, "best{}{}", " ".repeat(label_width - 4), best);
    text
}

fn render_pref_json(report: &PreferenceReport) -> String {
    let mut text = String::from("{\"mode\":\"pref\",\"rows\":[");
    for (i, row) in report.rows.iter().enumerate() {
        if i > 0 {
            text.push(',');
        }
        let opt = |v: &Option<DesignResult>| match v {
            Some(d) => fmt9(d.objective),
            None => "null".to_string(),
        };
        let (ia, ip) = match &row.intensity {
            Some(x) => (fmt9(x.action_gap), fmt9(x.profit_gap)),
            None => ("null".to_string(), "null".to_string()),
        };
        let net = row
            .net_value
            .map(fmt9)
            .unwrap_or_else(|| "null".to_string());
        let _ = write!(
            text,
            "{{\"label\":{},\"shaping_cost\":{},\"status_quo\":{},\
             \"objective_full\":{},\"objective_hidden\":{},\
             \"intensity_action\":{},\"intensity_profit\":{},\
             \"net_value\":{},\"market_viable\":{}}}",
            json_str(&row.label),
            fmt9(row.shaping_cost),
            row.status_quo,
            opt(&row.full),
            opt(&row.hidden),
            ia,
            ip,
            net,
            row.market_viable
        );
    }
    text.push_str("],\"best\":");
    match report.best {
        Some(i) => text.push_str(&json_str(&report.rows[i].label)),
        None => text.push_str("null"),
    }
    text.push_str("}\n");
    text
}

fn render_pref_csv(report: &PreferenceReport) -> String {
    let mut text = String::from(
        "label,shaping_cost,status_quo,objective_full,objective_hidden,\
         intensity_action,intensity_profit,net_value,market_viable\n",
    );
    for row in &report.rows {
        let [full, hidden, ia, ip, net] = pref_columns(row);
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{},{}",
            row.label,
            fmt9(row.shaping_cost),
            row.status_quo,
            full,
            hidden,
            ia,
            ip,
            net,
            row.market_viable
        );
    }
    let _ = writeln!(
        text,
        "best,{},,,,,,,",
        report
            .best
            .map(|i| report.rows[i].label.clone())
            .unwrap_or_default()
    );
    text
}

// ── sweep ───────────────────────────────────────────────────────────────────

fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![from];
    }
    (0..steps)
        .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
        .collect()
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    if args.steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    if !args.from.is_finite() || !args.to.is_finite() {
        return Err(usage("--from and --to must be finite"));
    }
    let scenario = load(&args.scenario)?;
    if matches!(args.param, SweepParam::AvarAlpha)
        && !matches!(
            scenario.agent().risk,
            GenericRisk::AverageValueAtRisk { .. }
        )
    {
        return Err(usage(format!(
            "--param avar-alpha needs an avar agent, but the scenario's agent is {}",
            scenario.agent().risk
        )));
    }
    let tie = args.tie_break.policy();
    let mut text = String::from(
        "param,objective_full,objective_hidden,x_full,x_hidden,intensity_action,intensity_profit\n",
    );
    for value in linspace(args.from, args.to, args.steps) {
        let (point_scenario, grid) = sweep_point(&scenario, &args, value)?;
        let full = solve_full_info(&point_scenario, &grid);
        let hidden = solve_hidden_info(&point_scenario, &grid, tie);
        let (obj_f, x_f, ia, ip) = match &full {
            Ok(r) => {
                let (ia, ip) = match &r.intensity {
                    Some(i) => (fmt9(i.action_gap), fmt9(i.profit_gap)),
                    None => ("nan".to_string(), "nan".to_string()),
                };
                (fmt9(r.objective), fmt9(r.action_level), ia, ip)
            }
            Err(SolverError::Infeasible { .. }) => (
                "nan".to_string(),
                "nan".to_string(),
                "nan".to_string(),
                "nan".to_string(),
            ),
            Err(e) => return Err(usage(e.to_string())),
        };
        let (obj_h, x_h) = match &hidden {
            Ok(r) => (fmt9(r.objective), fmt9(r.action_level)),
            Err(SolverError::Infeasible { .. }) => ("nan".to_string(), "nan".to_string()),
            Err(e) => return Err(usage(e.to_string())),
        };
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{}",
            fmt9(value),
            obj_f,
            obj_h,
            x_f,
            x_h,
            ia,
            ip
        );
    }
    emit(&text, args.out.as_ref())
}

/// Materialize one sweep point: the scenario variant and the grid to
/// solve on.
fn sweep_point(
    scenario: &Scenario,
    args: &SweepArgs,
    value: f64,
) -> Result<(Scenario, ContractGrid), CliError> {
    let max_loss = scenario.space().max_loss();
    match args.param {
        SweepParam::AvarAlpha => {
            let shifted = scenario
                .with_risk(GenericRisk::avar(value).map_err(|e| usage(e.to_string()))?)
                .map_err(|e| usage(e.to_string()))?;
            Ok((shifted, build_grid(&args.grid, max_loss)?))
        }
        SweepParam::Reservation => {
            let shifted = scenario
                .with_reservation(value)
                .map_err(|e| usage(e.to_string()))?;
            Ok((shifted, build_grid(&args.grid, max_loss)?))
        }
        SweepParam::Premium => {
            let coverages = match &args.grid.coverage_range {
                Some(text) => {
                    let built = build_grid(
                        &GridArgs {
                            premium_range: Some("0:0:1".to_string()),
                            coverage_range: Some(text.clone()),
                        },
                        max_loss,
                    )?;
                    match built.mode() {
                        premia::solvers::GridMode::Linear { coverages } => coverages.clone(),
                        premia::solvers::GridMode::Tabular { .. } => unreachable!(),
                    }
                }
                None => vec![0.0, 0.25, 0.5, 0.75, 1.0],
            };
            if value < 0.0 {
                return Err(usage(format!("swept premium {value} must be >= 0")));
            }
            let grid =
                ContractGrid::linear(vec![value], coverages).map_err(|e| usage(e.to_string()))?;
            Ok((scenario.clone(), grid))
        }
        SweepParam::Coverage => {
            let premiums = match &args.grid.premium_range {
                Some(text) => {
                    let (lo, hi, step) = parse_range(text, "--premium-range")?;
                    let built = ContractGrid::linear_ranges((lo, hi, step), (0.0, 0.0, 1.0))
                        .map_err(|e| usage(e.to_string()))?;
                    built.premiums().to_vec()
                }
                None => {
                    let built = build_grid(&args.grid, max_loss)?;
                    built.premiums().to_vec()
                }
            };
            if !(0.0..=1.0).contains(&value) {
                return Err(usage(format!("swept coverage {value} must lie in [0, 1]")));
            }
            let grid =
                ContractGrid::linear(premiums, vec![value]).map_err(|e| usage(e.to_string()))?;
            Ok((scenario.clone(), grid))
        }
    }
}
