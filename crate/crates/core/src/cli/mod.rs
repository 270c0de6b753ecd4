//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on any
//! input error (unreadable or invalid scenario, bad flags).

mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use crate::generator::{generate, GeneratorConfig};
use crate::model::{Bid, Instance, LseId};
use crate::payments::{all_schedules, settle};
use crate::rational::Rational;
use crate::scenario::ScenarioFile;
use crate::solver::solve_stage1_dp;
use crate::verify::{
    check_externality_against, run_checks, CheckKind, DeviationGrid, Deviations, FixedDeviations,
};
use crate::welfare::expected_social_welfare;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "svcg",
    version,
    about = "Stochastic VCG allocation of random generation among LSEs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the day-ahead selection and print payments.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        /// Directory for schedules.csv and summary.csv.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Settle at a realized generation level.
    Settle {
        #[arg(long)]
        scenario: PathBuf,
        /// Realized generation level; defaults to the scenario's realized_w.
        #[arg(long)]
        w: Option<usize>,
    },
    /// Run mechanism checks.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated subset of ir, ic, efficiency, lemmas, externality, boundary.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "ir,ic,efficiency,lemmas,externality"
        )]
        check: Vec<CheckKind>,
        /// Comma-separated valuations for the deviation grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid_v: Option<Vec<Rational>>,
        /// Comma-separated costs for the deviation grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid_c: Option<Vec<Rational>>,
        #[arg(long)]
        epsilon: Option<Rational>,
        /// Check only this report (`id:v:c`) instead of the grid. Repeatable.
        #[arg(long, allow_hyphen_values = true)]
        deviation: Vec<String>,
    },
    /// Write a seeded random scenario.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w_max: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        v_min: Option<Rational>,
        #[arg(long, allow_hyphen_values = true)]
        v_max: Option<Rational>,
        #[arg(long, allow_hyphen_values = true)]
        c_min: Option<Rational>,
        #[arg(long, allow_hyphen_values = true)]
        c_max: Option<Rational>,
        #[arg(long)]
        denominator_bound: Option<u32>,
        #[arg(long)]
        max_retries: Option<usize>,
        /// Allow equal gammas.
        #[arg(long)]
        allow_ties: bool,
        /// Allow v + c < 0.
        #[arg(long)]
        allow_negative_gamma: bool,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INPUT
        }
    }
}

fn load(path: &Path) -> Result<(ScenarioFile, Instance)> {
    let doc = ScenarioFile::read(path)?;
    let inst = doc.to_instance(&path.display().to_string())?;
    Ok((doc, inst))
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Solve { scenario, csv } => {
            let (_, inst) = load(&scenario)?;
            let sel = solve_stage1_dp(&inst);
            let welfare = expected_social_welfare(&sel, &inst);
            let schedules = all_schedules(&sel, &inst)?;
            report::write_solve(out, &inst, &sel, &welfare, &schedules)?;
            if let Some(dir) = csv {
                report::write_csv(&dir, &schedules)?;
            }
            Ok(EXIT_OK)
        }
        Command::Settle { scenario, w } => {
            let (doc, inst) = load(&scenario)?;
            let w = w
                .or(doc.realized_w)
                .ok_or_else(|| anyhow!("no --w given and the scenario has no realized_w"))?;
            let sel = solve_stage1_dp(&inst);
            let settlement = settle(&sel, w, &inst)
                .with_context(|| format!("settling {}", scenario.display()))?;
            report::write_settlement(out, &settlement)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            scenario,
            check,
            grid_v,
            grid_c,
            epsilon,
            deviation,
        } => {
            let (doc, inst) = load(&scenario)?;
            let mut grid = DeviationGrid::default();
            if let Some(values) = grid_v {
                grid.values = values;
            }
            if let Some(costs) = grid_c {
                grid.costs = costs;
            }
            if let Some(eps) = epsilon {
                grid.epsilon = eps;
            }
            let fixed = FixedDeviations {
                reports: deviation
                    .iter()
                    .map(|d| parse_deviation(d))
                    .collect::<Result<_>>()?,
            };
            let deviations: &dyn Deviations = if fixed.reports.is_empty() {
                &grid
            } else {
                &fixed
            };
            verify(&scenario, &doc, &inst, &check, deviations, out, err)
        }
        Command::Gen {
            seed,
            n,
            w_max,
            out: path,
            v_min,
            v_max,
            c_min,
            c_max,
            denominator_bound,
            max_retries,
            allow_ties,
            allow_negative_gamma,
        } => {
            let mut config = GeneratorConfig::new(seed, n, w_max);
            config.v_min = v_min.unwrap_or(config.v_min);
            config.v_max = v_max.unwrap_or(config.v_max);
            config.c_min = c_min.unwrap_or(config.c_min);
            config.c_max = c_max.unwrap_or(config.c_max);
            config.denominator_bound = denominator_bound.unwrap_or(config.denominator_bound);
            config.max_retries = max_retries.unwrap_or(config.max_retries);
            config.allow_ties = allow_ties;
            config.allow_negative_gamma = allow_negative_gamma;
            let inst = generate(&config)?;
            let text = ScenarioFile::from_instance(&inst, None).emit();
            match path {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn parse_deviation(text: &str) -> Result<Bid> {
    let parts: Vec<&str> = text.split(':').collect();
    let [id, v, c] = parts.as_slice() else {
        bail!("deviation `{text}` is not of the form id:v:c");
    };
    let id: u32 = id
        .parse()
        .with_context(|| format!("deviation `{text}`: bad id"))?;
    let v: Rational = v
        .parse()
        .with_context(|| format!("deviation `{text}`: bad v"))?;
    let c: Rational = c
        .parse()
        .with_context(|| format!("deviation `{text}`: bad c"))?;
    Ok(Bid::new(LseId(id), v, c))
}

fn verify(
    path: &Path,
    doc: &ScenarioFile,
    inst: &Instance,
    checks: &[CheckKind],
    deviations: &dyn Deviations,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let declared = doc.declared();
    let mut verdicts = Vec::with_capacity(checks.len());
    for &check in checks {
        let verdict = if check == CheckKind::Externality && !declared.is_empty() {
            check_externality_against(inst, &declared)?
        } else {
            run_checks(inst, &[check], deviations)?.remove(0)
        };
        verdicts.push(verdict);
    }
    let mut code = EXIT_OK;
    for verdict in &verdicts {
        report::write_verdict(out, verdict)?;
        if !verdict.passed {
            code = EXIT_VERIFY_FAILED;
            let mut replay = format!(
                "svcg verify --scenario {} --check {}",
                path.display(),
                verdict.check
            );
            if let Some(d) = verdict.witness.as_ref().and_then(|w| w.deviation.as_ref()) {
                replay.push_str(&format!(
                    " --deviation {}:{}:{}",
                    d.id(),
                    d.v_hat(),
                    d.c_hat()
                ));
            }
            writeln!(err, "replay: {replay}")?;
        }
    }
    Ok(code)
}
