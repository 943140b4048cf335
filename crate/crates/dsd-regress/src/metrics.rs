//! Goodness-of-fit and estimation-accuracy metrics.

use crate::baselines::PredictedBounds;
use crate::error::{DsdError, Result};
use crate::interval::Interval;
use crate::mallows::mallows_sq_bounds;
use crate::solver::DsdCoefficients;

/// Which estimator produced a set of predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    Dsd,
    Cm,
    MinMax,
    Crm,
    Ccrm,
}

impl MethodTag {
    pub const ALL: [MethodTag; 5] = [
        MethodTag::Dsd,
        MethodTag::Cm,
        MethodTag::MinMax,
        MethodTag::Crm,
        MethodTag::Ccrm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MethodTag::Dsd => "dsd",
            MethodTag::Cm => "cm",
            MethodTag::MinMax => "minmax",
            MethodTag::Crm => "crm",
            MethodTag::Ccrm => "ccrm",
        }
    }
}

impl std::str::FromStr for MethodTag {
    type Err = DsdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dsd" => Ok(MethodTag::Dsd),
            "cm" => Ok(MethodTag::Cm),
            "minmax" => Ok(MethodTag::MinMax),
            "crm" => Ok(MethodTag::Crm),
            "ccrm" => Ok(MethodTag::Ccrm),
            other => Err(DsdError::InvalidArgument(format!(
                "unknown method {other:?}; expected dsd, cm, minmax, crm or ccrm"
            ))),
        }
    }
}

impl std::fmt::Display for MethodTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-method goodness-of-fit summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub method: MethodTag,
    /// Share of dispersion reproduced by the predictions; NaN when the
    /// observed response has no dispersion.
    pub omega: f64,
    /// Root mean squared Mallows distance.
    pub rmse_m: f64,
    /// Root mean squared error on lower bounds.
    pub rmse_l: f64,
    /// Root mean squared error on upper bounds.
    pub rmse_u: f64,
}

fn check_lengths(observed: &[Interval], predicted: &[PredictedBounds]) -> Result<()> {
    if observed.is_empty() {
        return Err(DsdError::InvalidArgument(
            "metrics need at least one observation".into(),
        ));
    }
    if observed.len() != predicted.len() {
        return Err(DsdError::InvalidArgument(format!(
            "{} observations vs {} predictions",
            observed.len(),
            predicted.len()
        )));
    }
    Ok(())
}

/// `√((1/m) Σ D²(y_j, ŷ_j))` in the Mallows metric. Inverted predicted
/// bounds are scored through their (negative) half-range, no reordering.
pub fn rmse_m(observed: &[Interval], predicted: &[PredictedBounds]) -> Result<f64> {
    check_lengths(observed, predicted)?;
    let s: f64 = observed
        .iter()
        .zip(predicted)
        .map(|(y, p)| mallows_sq_bounds((y.lower(), y.upper()), (p.lower, p.upper)))
        .sum();
    Ok((s / observed.len() as f64).sqrt())
}

/// Root mean squared errors on the two bounds, `(rmse_lower, rmse_upper)`.
pub fn rmse_bounds(observed: &[Interval], predicted: &[PredictedBounds]) -> Result<(f64, f64)> {
    check_lengths(observed, predicted)?;
    let m = observed.len() as f64;
    let (mut sl, mut su) = (0.0, 0.0);
    for (y, p) in observed.iter().zip(predicted) {
        sl += (y.lower() - p.lower) * (y.lower() - p.lower);
        su += (y.upper() - p.upper) * (y.upper() - p.upper);
    }
    Ok(((sl / m).sqrt(), (su / m).sqrt()))
}

/// Ω computed on possibly-inverted predicted bounds, with the same
/// degenerate-mean reference as [`crate::model::omega`].
pub fn omega_bounds(observed: &[Interval], predicted: &[PredictedBounds]) -> Result<f64> {
    check_lengths(observed, predicted)?;
    let cbar = observed.iter().map(Interval::center).sum::<f64>() / observed.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (y, p) in observed.iter().zip(predicted) {
        let (cy, ry) = y.center_halfrange();
        den += (cy - cbar) * (cy - cbar) + ry * ry / 3.0;
        let (cp, rp) = (p.center(), p.half_range());
        num += (cp - cbar) * (cp - cbar) + rp * rp / 3.0;
    }
    Ok(num / den)
}

/// Builds the full report for one method's predictions.
pub fn build_report(
    method: MethodTag,
    observed: &[Interval],
    predicted: &[PredictedBounds],
) -> Result<FitReport> {
    let (rmse_l, rmse_u) = rmse_bounds(observed, predicted)?;
    Ok(FitReport {
        method,
        omega: omega_bounds(observed, predicted)?,
        rmse_m: rmse_m(observed, predicted)?,
        rmse_l,
        rmse_u,
    })
}

/// Monte Carlo accuracy summary for one scalar parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamStat {
    pub name: String,
    /// Mean of the estimates.
    pub mean: f64,
    /// Sample standard deviation (divisor `n − 1`).
    pub sd: f64,
    /// `mean − truth`.
    pub bias: f64,
    /// Population mean squared error `(1/n) Σ (est − truth)²`, which equals
    /// `sd² (n−1)/n + bias²`.
    pub mse: f64,
}

/// Per-parameter Monte Carlo summaries for a set of coefficient estimates
/// against the truth. Parameters are reported in the order
/// `alpha_1, …, alpha_p, beta_1, …, beta_p, gamma`.
pub fn mse_params(estimates: &[DsdCoefficients], truth: &DsdCoefficients) -> Result<Vec<ParamStat>> {
    if estimates.is_empty() {
        return Err(DsdError::InvalidArgument(
            "need at least one estimate".into(),
        ));
    }
    let p = truth.p();
    for e in estimates {
        if e.p() != p {
            return Err(DsdError::InvalidArgument(format!(
                "estimate has {} predictors, truth has {p}",
                e.p()
            )));
        }
    }
    let mut out = Vec::with_capacity(2 * p + 1);
    let col = |f: &dyn Fn(&DsdCoefficients) -> f64| -> Vec<f64> {
        estimates.iter().map(f).collect()
    };
    for k in 0..p {
        out.push(scalar_stat(
            format!("alpha_{}", k + 1),
            &col(&|c| c.alphas[k]),
            truth.alphas[k],
        ));
    }
    for k in 0..p {
        out.push(scalar_stat(
            format!("beta_{}", k + 1),
            &col(&|c| c.betas[k]),
            truth.betas[k],
        ));
    }
    out.push(scalar_stat(
        "gamma".to_string(),
        &col(&|c| c.gamma),
        truth.gamma,
    ));
    Ok(out)
}

/// Summary of one parameter's estimates; exposed for scalar use by the study
/// harnesses.
pub fn scalar_stat(name: String, values: &[f64], truth: f64) -> ParamStat {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let sd = if values.len() > 1 {
        let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mse = compensated_sum(values.iter().map(|v| (v - truth) * (v - truth))) / n;
    ParamStat {
        name,
        mean,
        sd,
        bias: mean - truth,
        mse,
    }
}

/// Neumaier compensated summation: the study harnesses aggregate thousands
/// of replications and must give results independent of accumulation noise.
pub fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(l: f64, u: f64) -> Interval {
        Interval::new(l, u).unwrap()
    }

    fn pb(l: f64, u: f64) -> PredictedBounds {
        PredictedBounds { lower: l, upper: u }
    }

    #[test]
    fn perfect_predictions_have_zero_rmse() {
        let obs = vec![i(0.0, 2.0), i(1.0, 5.0)];
        let pred = vec![pb(0.0, 2.0), pb(1.0, 5.0)];
        assert_eq!(rmse_m(&obs, &pred).unwrap(), 0.0);
        assert_eq!(rmse_bounds(&obs, &pred).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn rmse_m_matches_hand_computation() {
        let obs = vec![i(0.0, 2.0)];
        let pred = vec![pb(1.0, 5.0)];
        // Centres 1 vs 3, half-ranges 1 vs 2: D² = 4 + 1/3.
        let expect = (4.0 + 1.0 / 3.0_f64).sqrt();
        assert!((rmse_m(&obs, &pred).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn objective_identity_links_rmse_and_sum() {
        // m · rmse_m² equals the summed squared Mallows distances.
        let obs = vec![i(0.0, 2.0), i(1.0, 5.0), i(-2.0, 0.5)];
        let pred = vec![pb(0.2, 2.1), pb(0.5, 4.0), pb(-2.5, 1.0)];
        let r = rmse_m(&obs, &pred).unwrap();
        let direct: f64 = obs
            .iter()
            .zip(&pred)
            .map(|(y, p)| mallows_sq_bounds((y.lower(), y.upper()), (p.lower, p.upper)))
            .sum();
        assert!((r * r * 3.0 - direct).abs() < 1e-13);
    }

    #[test]
    fn mse_decomposes_into_variance_and_bias() {
        let vals = [1.9, 2.1, 2.3, 1.7, 2.2];
        let s = scalar_stat("a".into(), &vals, 2.0);
        let n = vals.len() as f64;
        let recomposed = s.sd * s.sd * (n - 1.0) / n + s.bias * s.bias;
        assert!((s.mse - recomposed).abs() <= 1e-10 * (1.0 + s.mse.abs()));
    }

    #[test]
    fn mse_params_orders_parameters() {
        let truth = DsdCoefficients::new(vec![2.0], vec![1.0], -1.0).unwrap();
        let ests = vec![
            DsdCoefficients::new(vec![2.1], vec![0.9], -1.2).unwrap(),
            DsdCoefficients::new(vec![1.9], vec![1.1], -0.8).unwrap(),
        ];
        let stats = mse_params(&ests, &truth).unwrap();
        assert_eq!(stats.len(), 3);
        assert_eq!(stats[0].name, "alpha_1");
        assert_eq!(stats[1].name, "beta_1");
        assert_eq!(stats[2].name, "gamma");
        assert!((stats[0].mean - 2.0).abs() < 1e-12);
        assert!((stats[2].mse - 0.04).abs() < 1e-12);
    }

    #[test]
    fn method_tags_round_trip_through_strings() {
        for tag in MethodTag::ALL {
            assert_eq!(tag.name().parse::<MethodTag>().unwrap(), tag);
        }
        assert!("ols".parse::<MethodTag>().is_err());
    }
}
