//! Fitting and prediction for the DSD linear model.
//!
//! The fitted quantile function for a unit with predictor intervals
//! `x_1, …, x_p` is
//!
//! `Ψ_Ŷ⁻¹(t) = Σ_k [α_k Ψ_k⁻¹(t) + β_k Ψ̃_k⁻¹(t)] + γ`
//!
//! where `Ψ̃_k⁻¹` is the quantile function of the symmetric distribution of
//! predictor `k`. In centre/half-range form the predicted interval has
//! centre `Σ (α_k − β_k) c_k + γ` and half-range `Σ (α_k + β_k) r_k`, which
//! is non-negative whenever the constraints hold — predictions are always
//! valid intervals.

use rayon::prelude::*;

use crate::error::{DsdError, Result};
use crate::interval::{Interval, SymbolicTable};
use crate::mallows::mallows_sq;
use crate::solver::{
    build_stacked_system, kkt_certificate, solve_constrained_ls, DsdCoefficients, KktCertificate,
    SolveDiagnostics, StackedSystem,
};

/// A fitted DSD model plus everything needed to audit the fit.
#[derive(Debug, Clone)]
pub struct FittedDsdModel {
    pub coefficients: DsdCoefficients,
    pub diagnostics: SolveDiagnostics,
    pub response_name: String,
    pub predictor_names: Vec<String>,
    /// In-sample predicted intervals, unit by unit.
    pub predicted: Vec<Interval>,
    /// Goodness of fit `Ω ∈ [0, 1]` (1 = exact linear relation).
    pub omega: f64,
}

/// Fits the DSD model to a table by constrained least squares.
pub fn fit(table: &SymbolicTable) -> Result<FittedDsdModel> {
    let system = build_stacked_system(table);
    let (coefficients, diagnostics) = solve_constrained_ls(&system)?;
    let predicted: Vec<Interval> = (0..table.m())
        .map(|j| predict_interval(&coefficients, &table.explicative_row(j)))
        .collect::<Result<_>>()?;
    let omega = omega(table.response().values(), &predicted);
    Ok(FittedDsdModel {
        coefficients,
        diagnostics,
        response_name: table.response().name().to_string(),
        predictor_names: table
            .explicatives()
            .iter()
            .map(|x| x.name().to_string())
            .collect(),
        predicted,
        omega,
    })
}

impl FittedDsdModel {
    /// Predicts the response interval for one row of predictor intervals.
    pub fn predict(&self, row: &[Interval]) -> Result<Interval> {
        predict_interval(&self.coefficients, row)
    }

    /// KKT optimality certificate of the stored coefficients on a table's
    /// stacked system.
    pub fn certificate(&self, system: &StackedSystem) -> KktCertificate {
        kkt_certificate(system, &self.coefficients)
    }
}

/// Predicted quantile `Ψ_Ŷ⁻¹(t)` for one row of predictor intervals.
pub fn predict_quantile(coefficients: &DsdCoefficients, row: &[Interval], t: f64) -> Result<f64> {
    check_row(coefficients, row)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(DsdError::InvalidArgument(format!(
            "quantile level {t} outside [0, 1]"
        )));
    }
    let (c, r) = predict_center_halfrange(coefficients, row);
    Ok(c + r * (2.0 * t - 1.0))
}

/// Predicted interval for one row of predictor intervals. Always a valid
/// interval: the half-range is a non-negative combination of non-negative
/// half-ranges.
pub fn predict_interval(coefficients: &DsdCoefficients, row: &[Interval]) -> Result<Interval> {
    check_row(coefficients, row)?;
    let (c, r) = predict_center_halfrange(coefficients, row);
    Interval::with_context(c - r, c + r, "DSD prediction".into())
}

fn check_row(coefficients: &DsdCoefficients, row: &[Interval]) -> Result<()> {
    if row.len() != coefficients.p() {
        return Err(DsdError::InvalidArgument(format!(
            "prediction row has {} predictors, model has {}",
            row.len(),
            coefficients.p()
        )));
    }
    Ok(())
}

fn predict_center_halfrange(coefficients: &DsdCoefficients, row: &[Interval]) -> (f64, f64) {
    let mut c = coefficients.gamma;
    let mut r = 0.0;
    for (k, x) in row.iter().enumerate() {
        let (cx, rx) = x.center_halfrange();
        c += (coefficients.alphas[k] - coefficients.betas[k]) * cx;
        r += (coefficients.alphas[k] + coefficients.betas[k]) * rx;
    }
    (c, r)
}

/// One linear form of an induced classical regression.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub slopes: Vec<f64>,
    pub intercept: f64,
}

/// The two classical regressions induced by a DSD fit: centres follow slopes
/// `α_k − β_k` with intercept `γ`; half-ranges follow slopes `α_k + β_k`
/// through the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedRegressions {
    pub centers: LinearForm,
    pub half_ranges: LinearForm,
}

pub fn induced_regressions(coefficients: &DsdCoefficients) -> InducedRegressions {
    InducedRegressions {
        centers: LinearForm {
            slopes: coefficients.center_slopes(),
            intercept: coefficients.gamma,
        },
        half_ranges: LinearForm {
            slopes: coefficients.halfrange_slopes(),
            intercept: 0.0,
        },
    }
}

/// Sum used as the dispersion reference of [`omega`] and
/// [`decomposition_check`]: squared Mallows distances to the degenerate
/// interval at the mean observed centre,
/// `Σ_j (c_j − c̄)² + r_j² / 3`.
fn dispersion_about_mean_center(values: &[Interval], mean_center: f64) -> f64 {
    values
        .iter()
        .map(|v| {
            let (c, r) = v.center_halfrange();
            (c - mean_center) * (c - mean_center) + r * r / 3.0
        })
        .sum()
}

/// Goodness of fit
/// `Ω = Σ D²(ŷ_j, ȳ) / Σ D²(y_j, ȳ)`,
/// where `ȳ` is the degenerate interval at the mean observed centre. At a
/// least-squares optimum the residuals are orthogonal to the fit, giving
/// `Ω = 1 − residual/total` and `Ω ∈ [0, 1]`. Returns NaN when the observed
/// response has zero dispersion.
pub fn omega(observed: &[Interval], predicted: &[Interval]) -> f64 {
    let mean_center =
        observed.iter().map(Interval::center).sum::<f64>() / observed.len() as f64;
    let den = dispersion_about_mean_center(observed, mean_center);
    let num = dispersion_about_mean_center(predicted, mean_center);
    num / den
}

/// The three sums of squares of a fit and their closure gap.
#[derive(Debug, Clone, Copy)]
pub struct Decomposition {
    /// `Σ D²(y_j, ȳ)` — dispersion of the observed response.
    pub total: f64,
    /// `Σ D²(ŷ_j, ȳ)` — dispersion of the predictions.
    pub explained: f64,
    /// `Σ D²(y_j, ŷ_j)` — the least-squares objective.
    pub residual: f64,
    /// `|total − explained − residual|` relative to `max(total, 1)`.
    pub gap: f64,
}

/// Checks the analysis-of-variance identity
/// `total = explained + residual`, exact at any least-squares optimum.
pub fn decomposition_check(observed: &[Interval], predicted: &[Interval]) -> Decomposition {
    let mean_center =
        observed.iter().map(Interval::center).sum::<f64>() / observed.len() as f64;
    let total = dispersion_about_mean_center(observed, mean_center);
    let explained = dispersion_about_mean_center(predicted, mean_center);
    let residual = observed
        .iter()
        .zip(predicted)
        .map(|(&y, &yh)| mallows_sq(y, yh))
        .sum::<f64>();
    let gap = (total - explained - residual).abs() / total.max(1.0);
    Decomposition {
        total,
        explained,
        residual,
        gap,
    }
}

/// The residual of unit `j` as a function on `[0, 1]`:
/// `e_j(t) = Ψ_y⁻¹(t) − Ψ_ŷ⁻¹(t) = a + b (2t − 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualFunction {
    /// Centre residual `c_y − c_ŷ`.
    pub a: f64,
    /// Half-range residual `r_y − r_ŷ`; may be negative.
    pub b: f64,
}

impl ResidualFunction {
    pub fn at(&self, t: f64) -> f64 {
        self.a + self.b * (2.0 * t - 1.0)
    }
}

/// Residual functions of a set of predictions.
pub fn residual_functions(observed: &[Interval], predicted: &[Interval]) -> Vec<ResidualFunction> {
    observed
        .iter()
        .zip(predicted)
        .map(|(y, yh)| ResidualFunction {
            a: y.center() - yh.center(),
            b: y.half_range() - yh.half_range(),
        })
        .collect()
}

/// Leave-one-out predictions: for each unit, the model is refit without it
/// and the held-out response is predicted. Requires at least three units so
/// every reduced fit still has two. The per-unit refits run in parallel;
/// results are ordered by unit, so the output is deterministic.
pub fn loo_predict(table: &SymbolicTable) -> Result<Vec<Interval>> {
    if table.m() < 3 {
        return Err(DsdError::InvalidArgument(format!(
            "leave-one-out needs at least 3 units, table has {}",
            table.m()
        )));
    }
    (0..table.m())
        .into_par_iter()
        .map(|j| {
            let reduced = table.without_unit(j)?;
            let model = fit(&reduced)?;
            model.predict(&table.explicative_row(j))
        })
        .collect()
}
