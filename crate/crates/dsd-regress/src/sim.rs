//! Monte Carlo study harnesses.
//!
//! Two factorial designs measure how well constrained least squares recovers
//! a known DSD relation from interval data built out of microdata:
//!
//! * **Study I** varies the amplitude of centre noise (`s_a`) and half-range
//!   noise (`s_b`) over a grid of cells, for a single predictor.
//! * **Study II** varies sample size and the degree of linearity (noise
//!   amplitudes tied to the scale of the noiseless response), for one or
//!   three predictors.
//!
//! Every explicative interval is generated from microdata: per unit, a pair
//! of bounds `(δ_a, δ_b)` is drawn from the variability catalogue, then
//! `microdata` uniform draws on `[δ_a, δ_b]` are taken and the interval is
//! their `[min, max]`. The response adds to the noiseless DSD image an error
//! `ε_j(t) = a_j + (2t − 1) b_j` with `a_j ~ U(−s_a, s_a)` and
//! `b_j ~ U(−b_eff, b_eff)`, `b_eff = min(s_b, min_j r⁰_j)` — clamping
//! guarantees predicted half-ranges stay non-negative, so generated
//! responses are always valid intervals.
//!
//! # Reproducibility
//!
//! Randomness comes from ChaCha8, a counter-based generator. Replication
//! `rep` of cell `cell` uses the stream `cell · 2³² + rep` of the master
//! seed, so every replication is an independent, addressable substream:
//! results do not depend on thread scheduling, and single cells can be
//! regenerated in isolation. Within a replication the draw order is fixed:
//! for each predictor in turn, unit by unit, the bound pair (after the mixed
//! catalogue's option index, when applicable) then the microdata draws; then
//! the response errors unit by unit, `a_j` before `b_j`. A zero amplitude
//! consumes no draws. Aggregation uses compensated summation in replication
//! order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{DsdError, Result};
use crate::interval::{Interval, IntervalVariable, SymbolicTable};
use crate::metrics::{build_report, compensated_sum, mse_params, MethodTag, ParamStat};
use crate::model;
use crate::solver::DsdCoefficients;

/// Microdata draws per generated interval unless overridden.
pub const DEFAULT_MICRODATA: usize = 5000;
/// Monte Carlo replications per cell unless overridden.
pub const DEFAULT_REPLICATIONS: usize = 1000;
/// Environment variable that caps the study thread pool.
pub const THREADS_ENV: &str = "DSD_STUDY_THREADS";

/// Which factorial design to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    I,
    II,
}

/// Spread of the per-unit bounds from which explicative microdata are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariabilitySpec {
    Low,
    High,
    /// Each unit picks one of five bound-pair options uniformly at random.
    Mixed,
}

impl VariabilitySpec {
    pub fn name(&self) -> &'static str {
        match self {
            VariabilitySpec::Low => "low",
            VariabilitySpec::High => "high",
            VariabilitySpec::Mixed => "mixed",
        }
    }
}

/// Error amplitudes tied to the scale of the noiseless response (Study II).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearityLevel {
    /// `s_a = (m_l + m_u)/2`, `s_b = m_r`: noise comparable to the signal.
    Low,
    /// One eighth of the low-linearity amplitudes.
    High,
}

impl LinearityLevel {
    pub fn name(&self) -> &'static str {
        match self {
            LinearityLevel::Low => "low",
            LinearityLevel::High => "high",
        }
    }
}

/// Full description of a study run.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub study: StudyKind,
    /// Sample sizes; each forms its own block of cells.
    pub m_values: Vec<usize>,
    pub p: usize,
    pub truth: DsdCoefficients,
    pub variability: VariabilitySpec,
    /// Study I: centre-noise amplitudes of the grid.
    pub s_a_values: Vec<f64>,
    /// Study I: half-range-noise amplitudes of the grid.
    pub s_b_values: Vec<f64>,
    /// Study II: linearity level.
    pub linearity: Option<LinearityLevel>,
    pub replications: usize,
    pub seed: u64,
    pub microdata: usize,
}

impl StudyConfig {
    /// The Study I grid used throughout: `s_a` and `s_b` lists default to
    /// the full factorial axes.
    pub fn study1_default_grid() -> (Vec<f64>, Vec<f64>) {
        (
            vec![0.0, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0, 120.0, 180.0],
            vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 10.0, 20.0, 40.0, 80.0, 120.0],
        )
    }

    fn validate(&self) -> Result<()> {
        if self.p == 0 || self.p > 3 {
            return Err(DsdError::InvalidArgument(format!(
                "variability catalogues are defined for 1 to 3 predictors, got p = {}",
                self.p
            )));
        }
        if self.truth.p() != self.p {
            return Err(DsdError::InvalidArgument(format!(
                "truth has {} predictors but p = {}",
                self.truth.p(),
                self.p
            )));
        }
        if self.truth.alphas.iter().chain(&self.truth.betas).any(|&v| v < 0.0) {
            return Err(DsdError::InvalidArgument(
                "truth must satisfy the non-negativity constraints".into(),
            ));
        }
        if self.m_values.is_empty() || self.m_values.iter().any(|&m| m < 3) {
            return Err(DsdError::InvalidArgument(
                "every sample size must be at least 3".into(),
            ));
        }
        if self.replications == 0 {
            return Err(DsdError::InvalidArgument(
                "at least one replication is required".into(),
            ));
        }
        if self.microdata < 2 {
            return Err(DsdError::InvalidArgument(
                "at least two microdata draws are needed per interval".into(),
            ));
        }
        match self.study {
            StudyKind::I => {
                if self.p != 1 {
                    return Err(DsdError::InvalidArgument(
                        "study I is specified for a single predictor".into(),
                    ));
                }
                if self.s_a_values.is_empty() || self.s_b_values.is_empty() {
                    return Err(DsdError::InvalidArgument(
                        "study I needs non-empty s_a and s_b grids".into(),
                    ));
                }
                if self
                    .s_a_values
                    .iter()
                    .chain(&self.s_b_values)
                    .any(|&v| !v.is_finite() || v < 0.0)
                {
                    return Err(DsdError::InvalidArgument(
                        "noise amplitudes must be finite and non-negative".into(),
                    ));
                }
            }
            StudyKind::II => {
                if self.linearity.is_none() {
                    return Err(DsdError::InvalidArgument(
                        "study II needs a linearity level".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Error amplitudes of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellError {
    /// Study I: fixed amplitudes.
    Fixed { s_a: f64, s_b: f64 },
    /// Study II: amplitudes derived from the noiseless response.
    Linearity(LinearityLevel),
}

/// Mean and sample standard deviation of one per-replication statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
}

fn summarize(values: &[f64]) -> Summary {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let sd = if values.len() > 1 {
        (compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Summary { mean, sd }
}

/// Aggregated results of one cell.
#[derive(Debug, Clone)]
pub struct CellReport {
    pub m: usize,
    pub error: CellError,
    pub replications: usize,
    /// Per-parameter mean, sample s, bias and MSE across replications.
    pub params: Vec<ParamStat>,
    pub omega: Summary,
    pub rmse_m: Summary,
    pub rmse_l: Summary,
    pub rmse_u: Summary,
}

/// Results of a whole study run.
#[derive(Debug, Clone)]
pub struct StudyReport {
    pub study: StudyKind,
    pub p: usize,
    pub truth: DsdCoefficients,
    pub variability: VariabilitySpec,
    pub replications: usize,
    pub seed: u64,
    pub microdata: usize,
    pub cells: Vec<CellReport>,
}

/// Uniform range pair `(for δ_a, for δ_b)`.
type BoundRanges = ((f64, f64), (f64, f64));

const LOW_CATALOG: [BoundRanges; 3] = [
    ((-2.0, 0.0), (4.0, 6.0)),
    ((1.0, 3.0), (3.0, 5.0)),
    ((4.0, 6.0), (9.0, 11.0)),
];

const HIGH_CATALOG: [BoundRanges; 3] = [
    ((-14.0, -12.0), (16.0, 18.0)),
    ((1.0, 3.0), (25.0, 27.0)),
    ((-16.0, -14.0), (-1.0, 1.0)),
];

const MIXED_OPTIONS: [BoundRanges; 5] = [
    ((-2.0, 0.0), (0.0, 2.0)),
    ((-1.0, 1.0), (2.0, 4.0)),
    ((-3.0, -1.0), (9.0, 11.0)),
    ((-11.0, -9.0), (29.0, 31.0)),
    ((-1.0, 1.0), (19.0, 21.0)),
];

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Draws one explicative variable: `m` intervals for predictor `k`
/// (0-based), each the `[min, max]` of `microdata` uniform draws between
/// freshly drawn bounds.
pub fn gen_explicative(
    rng: &mut ChaCha8Rng,
    k: usize,
    m: usize,
    microdata: usize,
    variability: VariabilitySpec,
) -> Result<Vec<Interval>> {
    if k >= 3 {
        return Err(DsdError::InvalidArgument(format!(
            "variability catalogues are defined for predictor indices 0..3, got {k}"
        )));
    }
    if microdata < 2 {
        return Err(DsdError::InvalidArgument(
            "at least two microdata draws are needed per interval".into(),
        ));
    }
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let ranges = match variability {
            VariabilitySpec::Low => LOW_CATALOG[k],
            VariabilitySpec::High => HIGH_CATALOG[k],
            VariabilitySpec::Mixed => MIXED_OPTIONS[rng.random_range(0..MIXED_OPTIONS.len())],
        };
        let da = uniform(rng, ranges.0);
        let db = uniform(rng, ranges.1);
        let (mut umin, mut umax) = (1.0_f64, 0.0_f64);
        for _ in 0..microdata {
            let u = rng.random::<f64>();
            umin = umin.min(u);
            umax = umax.max(u);
        }
        out.push(Interval::with_context(
            da + (db - da) * umin,
            da + (db - da) * umax,
            "generated explicative".into(),
        )?);
    }
    Ok(out)
}

/// Draws the response for generated explicative data: the noiseless DSD
/// image of `xs` plus the per-unit error `a_j + (2t − 1) b_j`. The
/// half-range amplitude is clamped at the smallest noiseless half-range.
pub fn gen_response(
    rng: &mut ChaCha8Rng,
    xs: &[Vec<Interval>],
    truth: &DsdCoefficients,
    error: &CellError,
) -> Result<Vec<Interval>> {
    let m = xs.first().map_or(0, Vec::len);
    if xs.len() != truth.p() || m == 0 {
        return Err(DsdError::InvalidArgument(
            "explicative data and truth dimensions disagree".into(),
        ));
    }
    // Noiseless image.
    let mut c0 = vec![truth.gamma; m];
    let mut r0 = vec![0.0; m];
    for (k, x) in xs.iter().enumerate() {
        for j in 0..m {
            let (c, r) = x[j].center_halfrange();
            c0[j] += (truth.alphas[k] - truth.betas[k]) * c;
            r0[j] += (truth.alphas[k] + truth.betas[k]) * r;
        }
    }
    let min_halfrange = r0.iter().copied().fold(f64::INFINITY, f64::min);
    let (s_a, s_b) = match *error {
        CellError::Fixed { s_a, s_b } => (s_a, s_b),
        CellError::Linearity(level) => {
            let ml = c0
                .iter()
                .zip(&r0)
                .map(|(c, r)| c - r)
                .fold(f64::INFINITY, f64::min)
                .abs();
            let mu = c0
                .iter()
                .zip(&r0)
                .map(|(c, r)| c + r)
                .fold(f64::NEG_INFINITY, f64::max)
                .abs();
            let (sa, sb) = ((ml + mu) / 2.0, min_halfrange);
            match level {
                LinearityLevel::Low => (sa, sb),
                LinearityLevel::High => (sa / 8.0, sb / 8.0),
            }
        }
    };
    let b_eff = s_b.min(min_halfrange);

    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let a = if s_a > 0.0 {
            uniform(rng, (-s_a, s_a))
        } else {
            0.0
        };
        let b = if b_eff > 0.0 {
            uniform(rng, (-b_eff, b_eff))
        } else {
            0.0
        };
        let c = c0[j] + a;
        let r = r0[j] + b;
        out.push(Interval::with_context(
            c - r,
            c + r,
            "generated response".into(),
        )?);
    }
    Ok(out)
}

/// One replication's fitted outcome.
struct RepOutcome {
    coefficients: DsdCoefficients,
    omega: f64,
    rmse_m: f64,
    rmse_l: f64,
    rmse_u: f64,
}

fn rep_rng(seed: u64, cell: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((cell << 32) | rep);
    rng
}

fn run_replication(
    config: &StudyConfig,
    m: usize,
    error: &CellError,
    cell: u64,
    rep: u64,
) -> Result<RepOutcome> {
    let mut rng = rep_rng(config.seed, cell, rep);
    let xs: Vec<Vec<Interval>> = (0..config.p)
        .map(|k| gen_explicative(&mut rng, k, m, config.microdata, config.variability))
        .collect::<Result<_>>()?;
    let y = gen_response(&mut rng, &xs, &config.truth, error)?;

    let labels = (0..m).map(|j| format!("u{j}")).collect();
    let response = IntervalVariable::new("y", y)?;
    let explicatives = xs
        .into_iter()
        .enumerate()
        .map(|(k, v)| IntervalVariable::new(format!("x{}", k + 1), v))
        .collect::<Result<Vec<_>>>()?;
    let table = SymbolicTable::new(labels, response, explicatives)?;

    let fitted = model::fit(&table)?;
    let predicted: Vec<_> = fitted.predicted.iter().map(|&i| i.into()).collect();
    let report = build_report(MethodTag::Dsd, table.response().values(), &predicted)?;
    Ok(RepOutcome {
        coefficients: fitted.coefficients,
        omega: fitted.omega,
        rmse_m: report.rmse_m,
        rmse_l: report.rmse_l,
        rmse_u: report.rmse_u,
    })
}

fn run_cell(
    config: &StudyConfig,
    m: usize,
    error: CellError,
    cell: u64,
) -> Result<CellReport> {
    let outcomes: Vec<RepOutcome> = (0..config.replications as u64)
        .into_par_iter()
        .map(|rep| run_replication(config, m, &error, cell, rep))
        .collect::<Result<_>>()?;

    let coeffs: Vec<DsdCoefficients> =
        outcomes.iter().map(|o| o.coefficients.clone()).collect();
    let collect = |f: &dyn Fn(&RepOutcome) -> f64| -> Vec<f64> {
        outcomes.iter().map(f).collect()
    };
    Ok(CellReport {
        m,
        error,
        replications: config.replications,
        params: mse_params(&coeffs, &config.truth)?,
        omega: summarize(&collect(&|o| o.omega)),
        rmse_m: summarize(&collect(&|o| o.rmse_m)),
        rmse_l: summarize(&collect(&|o| o.rmse_l)),
        rmse_u: summarize(&collect(&|o| o.rmse_u)),
    })
}

fn cell_specs(config: &StudyConfig) -> Vec<(usize, CellError)> {
    let mut specs = Vec::new();
    for &m in &config.m_values {
        match config.study {
            StudyKind::I => {
                for &s_a in &config.s_a_values {
                    for &s_b in &config.s_b_values {
                        specs.push((m, CellError::Fixed { s_a, s_b }));
                    }
                }
            }
            StudyKind::II => {
                specs.push((
                    m,
                    CellError::Linearity(config.linearity.expect("validated")),
                ));
            }
        }
    }
    specs
}

fn run_study_impl(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let run = || -> Result<Vec<CellReport>> {
        cell_specs(config)
            .into_iter()
            .enumerate()
            .map(|(cell, (m, error))| run_cell(config, m, error, cell as u64))
            .collect()
    };
    let cells = match study_threads()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| DsdError::InvalidArgument(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }?;
    Ok(StudyReport {
        study: config.study,
        p: config.p,
        truth: config.truth.clone(),
        variability: config.variability,
        replications: config.replications,
        seed: config.seed,
        microdata: config.microdata,
        cells,
    })
}

fn study_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v.parse().map_err(|_| {
                DsdError::InvalidArgument(format!(
                    "{THREADS_ENV} must be a positive integer, got {v:?}"
                ))
            })?;
            if n == 0 {
                return Err(DsdError::InvalidArgument(format!(
                    "{THREADS_ENV} must be positive"
                )));
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

/// Runs a Study I (noise-amplitude grid) configuration.
pub fn run_study1(config: &StudyConfig) -> Result<StudyReport> {
    if config.study != StudyKind::I {
        return Err(DsdError::InvalidArgument(
            "run_study1 requires a study I configuration".into(),
        ));
    }
    run_study_impl(config)
}

/// Runs a Study II (linearity / sample size) configuration.
pub fn run_study2(config: &StudyConfig) -> Result<StudyReport> {
    if config.study != StudyKind::II {
        return Err(DsdError::InvalidArgument(
            "run_study2 requires a study II configuration".into(),
        ));
    }
    run_study_impl(config)
}
