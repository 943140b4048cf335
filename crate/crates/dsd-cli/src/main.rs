//! Command-line interface for interval-valued regression.
//!
//! Subcommands: `fit` (one method, writes a model file plus a fit report),
//! `predict` (apply a saved model to a table), `compare` (all five methods
//! side by side), `loo` (leave-one-out observed/predicted pairs), and
//! `study` (Monte Carlo study from a config file).
//!
//! Outputs go to `--out`-style paths when given, otherwise to stdout.
//! Re-running a command with identical inputs and seed produces identical
//! bytes. Usage errors exit with 2 (clap), runtime errors with 1.

use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use dsd_regress::baselines::{self, BaselineMethod, PredictedBounds};
use dsd_regress::io;
use dsd_regress::metrics::{build_report, FitReport, MethodTag};
use dsd_regress::model;
use dsd_regress::SymbolicTable;

#[derive(Parser)]
#[command(
    name = "dsd",
    version,
    about = "Linear regression for interval-valued variables (DSD model and baselines)"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit one method; write the model file and a one-row fit report
    Fit {
        /// Interval table (CSV with V_lb/V_ub column pairs)
        table: PathBuf,
        /// Response variable name
        #[arg(long)]
        response: String,
        /// Predictor names (default: every other variable)
        #[arg(long, value_delimiter = ',')]
        predictors: Option<Vec<String>>,
        /// Method: dsd, cm, minmax, crm or ccrm
        #[arg(long, default_value = "dsd", value_parser = parse_method)]
        method: MethodTag,
        /// Replace the response y by ln(y + SHIFT) at load time
        #[arg(long, value_name = "SHIFT")]
        log_shift: Option<f64>,
        /// Model file destination (default: stdout)
        #[arg(long)]
        out_model: Option<PathBuf>,
        /// Fit report CSV destination (default: stdout)
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Predict bounds for every unit of a table with a saved model
    Predict {
        model: PathBuf,
        table: PathBuf,
        /// Predictions CSV destination (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit all five methods and report their fit quality side by side
    Compare {
        table: PathBuf,
        #[arg(long)]
        response: String,
        #[arg(long, value_delimiter = ',')]
        predictors: Option<Vec<String>>,
        #[arg(long, value_name = "SHIFT")]
        log_shift: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leave-one-out DSD predictions as observed/predicted pairs
    Loo {
        table: PathBuf,
        #[arg(long)]
        response: String,
        #[arg(long, value_delimiter = ',')]
        predictors: Option<Vec<String>>,
        #[arg(long, value_name = "SHIFT")]
        log_shift: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo study from a config file
    Study {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's replication count
        #[arg(long)]
        replications: Option<usize>,
        /// Override the config's master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Study report CSV destination (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_method(s: &str) -> Result<MethodTag, String> {
    s.parse()
        .map_err(|_| format!("unknown method {s:?} (expected dsd, cm, minmax, crm or ccrm)"))
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Cmd::Fit {
            table,
            response,
            predictors,
            method,
            log_shift,
            out_model,
            report,
        } => {
            let table = load_table(&table, &response, predictors.as_deref(), log_shift)?;
            let (model_file, fit_report) = fit_one(&table, method)?;
            emit(&io::model_to_string(&model_file), out_model.as_deref())?;
            emit(&io::fit_reports_csv(&[fit_report])?, report.as_deref())?;
        }
        Cmd::Predict { model, table, out } => {
            let model = io::read_model(&model)
                .with_context(|| format!("reading model {}", model.display()))?;
            let raw = io::read_raw_table(&table)
                .with_context(|| format!("reading table {}", table.display()))?;
            let predicted = model.predict_table(&raw)?;
            emit(&io::predictions_csv(&raw.labels, &predicted)?, out.as_deref())?;
        }
        Cmd::Compare {
            table,
            response,
            predictors,
            log_shift,
            out,
        } => {
            let table = load_table(&table, &response, predictors.as_deref(), log_shift)?;
            let reports = MethodTag::ALL
                .iter()
                .map(|&m| Ok(fit_one(&table, m)?.1))
                .collect::<anyhow::Result<Vec<_>>>()?;
            emit(&io::fit_reports_csv(&reports)?, out.as_deref())?;
        }
        Cmd::Loo {
            table,
            response,
            predictors,
            log_shift,
            out,
        } => {
            let table = load_table(&table, &response, predictors.as_deref(), log_shift)?;
            let predicted: Vec<PredictedBounds> = model::loo_predict(&table)?
                .into_iter()
                .map(Into::into)
                .collect();
            emit(
                &io::observed_predicted_csv(
                    table.labels(),
                    table.response().values(),
                    &predicted,
                )?,
                out.as_deref(),
            )?;
        }
        Cmd::Study {
            config,
            replications,
            seed,
            out,
        } => {
            let mut cfg = io::read_config(&config)
                .with_context(|| format!("reading config {}", config.display()))?;
            if let Some(r) = replications {
                cfg.replications = r;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = match cfg.study {
                dsd_regress::sim::StudyKind::I => dsd_regress::sim::run_study1(&cfg)?,
                dsd_regress::sim::StudyKind::II => dsd_regress::sim::run_study2(&cfg)?,
            };
            emit(&io::study_report_csv(&report)?, out.as_deref())?;
        }
    }
    Ok(())
}

fn load_table(
    path: &std::path::Path,
    response: &str,
    predictors: Option<&[String]>,
    log_shift: Option<f64>,
) -> anyhow::Result<SymbolicTable> {
    let table = io::read_table(path, response, predictors)
        .with_context(|| format!("reading table {}", path.display()))?;
    Ok(match log_shift {
        Some(shift) => table.log_shift_response(shift)?,
        None => table,
    })
}

/// Fits one method and builds its model file plus fit report.
fn fit_one(table: &SymbolicTable, method: MethodTag) -> anyhow::Result<(io::ModelFile, FitReport)> {
    let observed = table.response().values();
    Ok(match method {
        MethodTag::Dsd => {
            let fit = model::fit(table)?;
            let predicted: Vec<PredictedBounds> =
                fit.predicted.iter().map(|&i| i.into()).collect();
            let report = build_report(method, observed, &predicted)?;
            (io::ModelFile::from_dsd(&fit), report)
        }
        _ => {
            let baseline_method = match method {
                MethodTag::Cm => BaselineMethod::Cm,
                MethodTag::MinMax => BaselineMethod::MinMax,
                MethodTag::Crm => BaselineMethod::Crm,
                MethodTag::Ccrm => BaselineMethod::Ccrm,
                MethodTag::Dsd => unreachable!(),
            };
            let fit = baselines::fit_baseline(table, baseline_method)?;
            let predicted = (0..table.m())
                .map(|j| baselines::predict_baseline(&fit, &table.explicative_row(j)))
                .collect::<dsd_regress::Result<Vec<_>>>()?;
            let report = build_report(method, observed, &predicted)?;
            (
                io::ModelFile::from_baseline(&fit, table.m(), report.omega),
                report,
            )
        }
    })
}

fn emit(text: &str, path: Option<&std::path::Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
