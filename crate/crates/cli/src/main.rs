mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use ftqc::ftcalc::{self, FtError};
use ftqc::io::{format_number, to_rounded_json};
use ftqc::qcc::{self, LinkingMaps, QccError, QccReport};
use ftqc::vote::{self, VoteError, VotePlan};
use serde::Serialize;

use crate::config::{BudgetParams, OutputFormat, RunConfig, VerifyParams, VoteParams};

#[derive(Parser)]
#[command(name = "ftqc", version, about = "Concatenation planner and failure-bound verifier for fault-tolerant computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal concatenation level for a required overall failure bound
    Plan(Common),
    /// Required levels over a log-spaced grid of elementary gate errors (CSV)
    Tradeoff(Common),
    /// Simulate a noisy circuit and certify failure <= p + alpha per input
    Verify(Common),
    /// Majority-vote success for k runs, or the smallest k for a target
    Vote(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Elementary gate error (plan)
    #[arg(long)]
    eps0: Option<f64>,
    /// Fixed concatenation level: plan reports the largest admissible eps0
    #[arg(long)]
    levels: Option<u32>,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized estimates
    #[arg(long, env = "FTQC_SEED")]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

/// Exit codes: 1 domain or infeasibility error, 2 configuration error,
/// 3 violated theorem check.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn domain(message: impl ToString) -> Self {
        Self { code: 1, message: message.to_string() }
    }

    fn config(err: impl Into<anyhow::Error>) -> Self {
        Self { code: 2, message: format!("{:#}", err.into()) }
    }
}

impl From<FtError> for Failure {
    fn from(e: FtError) -> Self {
        Failure::domain(e)
    }
}

impl From<VoteError> for Failure {
    fn from(e: VoteError) -> Self {
        Failure::domain(e)
    }
}

struct Run {
    config: RunConfig,
    common: Common,
}

impl Run {
    fn format(&self, default: OutputFormat) -> OutputFormat {
        self.common.format.or(self.config.output_format).unwrap_or(default)
    }

    fn seed(&self) -> u64 {
        self.common.seed.or(self.config.seed).unwrap_or(0)
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        let out = self.common.out.clone().or_else(|| self.config.output_path.as_ref().map(|p| self.config.resolve(p)));
        match out {
            Some(path) => std::fs::write(&path, text)
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(Failure::config),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .context("cannot write output")
                    .map_err(Failure::config)
            }
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<String, Failure> {
        to_rounded_json(value).map_err(Failure::domain)
    }
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

#[derive(Serialize)]
struct GateRequirement {
    levels: u32,
    eps_th: f64,
    gate_count: u64,
    p: f64,
    p_hat: f64,
    max_eps0: f64,
}

fn cmd_plan(run: &Run) -> Result<(), Failure> {
    let mut params: BudgetParams = run.config.parameters().map_err(Failure::config)?;
    if run.common.eps0.is_some() {
        params.eps0 = run.common.eps0;
    }
    if run.common.levels.is_some() {
        params.levels = run.common.levels;
    }
    let format = run.format(OutputFormat::Json);

    if let Some(levels) = params.levels {
        let base = params.ft_params(false).map_err(Failure::config)?;
        let max_eps0 = ftcalc::max_gate_error(levels, base.eps_th, base.gate_count, base.p_hat, base.p)?;
        let req = GateRequirement { levels, eps_th: base.eps_th, gate_count: base.gate_count, p: base.p, p_hat: base.p_hat, max_eps0 };
        let text = match format {
            OutputFormat::Json => run.json(&req)?,
            OutputFormat::Csv => csv(
                &["levels", "eps_th", "gate_count", "p", "p_hat", "max_eps0"],
                [vec![
                    levels.to_string(),
                    format_number(req.eps_th),
                    req.gate_count.to_string(),
                    format_number(req.p),
                    format_number(req.p_hat),
                    format_number(max_eps0),
                ]],
            ),
        };
        return run.emit(&text);
    }

    let params = params.ft_params(true).map_err(Failure::config)?;
    let plan = ftcalc::required_levels(&params)?;
    let text = match format {
        OutputFormat::Json => run.json(&plan)?,
        OutputFormat::Csv => csv(
            &["levels", "eps_n", "eps_qc", "budget", "alpha_required", "closed_form_levels"],
            [vec![
                plan.levels.to_string(),
                format_number(plan.eps_n),
                format_number(plan.eps_qc),
                format_number(plan.budget),
                format_number(plan.alpha_required),
                format_number(plan.closed_form_levels),
            ]],
        ),
    };
    run.emit(&text)
}

#[derive(Serialize)]
struct CurveRow {
    eps0: f64,
    levels: i64,
    eps_qc: Option<f64>,
    closed_form: f64,
}

fn cmd_tradeoff(run: &Run) -> Result<(), Failure> {
    let params: BudgetParams = run.config.parameters().map_err(Failure::config)?;
    let base = params.ft_params(false).map_err(Failure::config)?;
    let (lo, hi, points) = params.grid().map_err(Failure::config)?;
    let curve = ftcalc::tradeoff_curve(lo, hi, points, &base)?;
    let rows: Vec<CurveRow> = curve
        .iter()
        .map(|pt| CurveRow {
            eps0: pt.eps0,
            levels: pt.levels.map_or(-1, i64::from),
            eps_qc: pt.eps_qc,
            closed_form: pt.closed_form,
        })
        .collect();
    let text = match run.format(OutputFormat::Csv) {
        OutputFormat::Json => run.json(&rows)?,
        OutputFormat::Csv => csv(
            &["eps0", "levels", "eps_qc", "closed_form"],
            rows.iter().map(|r| {
                vec![
                    format_number(r.eps0),
                    r.levels.to_string(),
                    r.eps_qc.map(format_number).unwrap_or_default(),
                    format_number(r.closed_form),
                ]
            }),
        ),
    };
    run.emit(&text)
}

#[derive(Serialize)]
struct AlphaSearch {
    trials: usize,
    seed: u64,
    alpha_sup_estimate: f64,
}

#[derive(Serialize)]
struct VerifyOutput {
    #[serde(flatten)]
    report: QccReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_search: Option<AlphaSearch>,
}

fn qcc_failure(e: QccError) -> Failure {
    match e {
        QccError::BoundViolated { .. } => Failure { code: 3, message: e.to_string() },
        other => Failure::domain(other),
    }
}

fn cmd_verify(run: &Run) -> Result<(), Failure> {
    let params: VerifyParams = run.config.parameters().map_err(Failure::config)?;
    let circuit_spec = params.circuit.load(&run.config, "circuit").map_err(Failure::config)?;
    let computation_spec = params.computation.load(&run.config, "computation").map_err(Failure::config)?;
    let circuit = circuit_spec.build().map_err(Failure::config)?;
    let computation = computation_spec.build(circuit.num_qubits()).map_err(Failure::config)?;
    params.noise.validate().map_err(Failure::config)?;
    let link = LinkingMaps::with_ancilla(params.ancilla_dim).map_err(Failure::config)?;

    let report = qcc::certify_combined_bound(&circuit, &params.noise, &computation, &link).map_err(qcc_failure)?;
    let alpha_search = match params.search_trials {
        None => None,
        Some(trials) => {
            let ideal = ftqc::channels::compile_ideal(&circuit).map_err(Failure::domain)?;
            let actual = ftqc::channels::compile_noisy(&circuit, &params.noise)
                .and_then(|c| c.extend_with_identity(link.ancilla_dim))
                .map_err(Failure::domain)?;
            let seed = run.seed();
            let estimate = qcc::alpha_random_search(&actual, &ideal, &link, trials, seed).map_err(qcc_failure)?;
            Some(AlphaSearch { trials, seed, alpha_sup_estimate: estimate })
        }
    };

    let text = match run.format(OutputFormat::Json) {
        OutputFormat::Json => run.json(&VerifyOutput { report, alpha_search })?,
        OutputFormat::Csv => csv(
            &["x", "ideal_success", "actual_success", "inaccuracy_x"],
            report.per_input.iter().map(|r| {
                vec![
                    r.x.clone(),
                    format_number(r.ideal_success),
                    format_number(r.actual_success),
                    format_number(r.inaccuracy_x),
                ]
            }),
        ),
    };
    run.emit(&text)
}

#[derive(Serialize)]
struct RepetitionPlan {
    per_run_failure: f64,
    target: f64,
    repetitions: u64,
    success_probability: f64,
}

fn cmd_vote(run: &Run) -> Result<(), Failure> {
    let params: VoteParams = run.config.parameters().map_err(Failure::config)?;
    let p_prime = params
        .per_run_failure
        .ok_or_else(|| Failure::config(anyhow!("missing parameter \"per_run_failure\"")))?;
    let format = run.format(OutputFormat::Json);
    let text = match (params.repetitions, params.target) {
        (Some(k), None) => {
            let plan = VotePlan::new(p_prime, k)?;
            match format {
                OutputFormat::Json => run.json(&plan)?,
                OutputFormat::Csv => csv(
                    &["per_run_failure", "repetitions", "success_probability"],
                    [vec![format_number(p_prime), k.to_string(), format_number(plan.success_probability)]],
                ),
            }
        }
        (None, Some(target)) => {
            let k = vote::min_repetitions(p_prime, target)?;
            let plan = RepetitionPlan {
                per_run_failure: p_prime,
                target,
                repetitions: k,
                success_probability: vote::majority_success(p_prime, k)?,
            };
            match format {
                OutputFormat::Json => run.json(&plan)?,
                OutputFormat::Csv => csv(
                    &["per_run_failure", "target", "repetitions", "success_probability"],
                    [vec![
                        format_number(p_prime),
                        format_number(target),
                        k.to_string(),
                        format_number(plan.success_probability),
                    ]],
                ),
            }
        }
        _ => return Err(Failure::config(anyhow!("give exactly one of \"repetitions\" or \"target\""))),
    };
    run.emit(&text)
}

type Handler = fn(&Run) -> Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common, handler): (&str, Common, Handler) = match cli.command {
        Command::Plan(c) => ("plan", c, cmd_plan),
        Command::Tradeoff(c) => ("tradeoff", c, cmd_tradeoff),
        Command::Verify(c) => ("verify", c, cmd_verify),
        Command::Vote(c) => ("vote", c, cmd_vote),
    };
    let result = (|| {
        let config = match &common.config {
            Some(path) => RunConfig::load(path).map_err(Failure::config)?,
            None => RunConfig::default(),
        };
        if let Some(command) = &config.command {
            if command != name {
                return Err(Failure::config(anyhow!("config is for {command:?}, not {name:?}")));
            }
        }
        handler(&Run { config, common })
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("ftqc {name}: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
