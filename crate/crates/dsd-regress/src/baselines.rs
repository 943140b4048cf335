//! Classical interval-regression baselines.
//!
//! Four methods are provided for comparison with the DSD model:
//!
//! * **CM** (centre method): one ordinary regression fitted on interval
//!   midpoints, applied to both bounds; the two results are sorted, so a
//!   negative slope still yields an ordered interval.
//! * **MinMax**: two ordinary regressions, lower bounds on lower bounds and
//!   upper bounds on upper bounds; predictions may cross.
//! * **CRM** (centre and range): ordinary regressions of centres on centres
//!   and of full ranges `u − l` on ranges, both with intercepts; a negative
//!   predicted range yields crossed bounds.
//! * **CCRM**: as CRM but the range regression is constrained — every slope
//!   and the intercept non-negative — so predictions are always valid.
//!
//! Range fits work on full ranges rather than half-ranges; slopes are
//! unaffected, the intercept is simply twice the half-range one.

use nalgebra::{DMatrix, DVector};

use crate::error::{DsdError, Result};
use crate::interval::{Interval, SymbolicTable};
use crate::model::LinearForm;
use crate::solver::active_set_nnls;

/// The four baseline estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    Cm,
    MinMax,
    Crm,
    Ccrm,
}

impl BaselineMethod {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineMethod::Cm => "cm",
            BaselineMethod::MinMax => "minmax",
            BaselineMethod::Crm => "crm",
            BaselineMethod::Ccrm => "ccrm",
        }
    }
}

/// A fitted baseline: which linear forms are present depends on the method.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineModel {
    pub method: BaselineMethod,
    pub response_name: String,
    pub predictor_names: Vec<String>,
    /// CM, CRM, CCRM: regression on centres.
    pub center_fit: Option<LinearForm>,
    /// CRM, CCRM: regression on full ranges `u − l`.
    pub range_fit: Option<LinearForm>,
    /// MinMax: regression of lower bounds on lower bounds.
    pub lower_fit: Option<LinearForm>,
    /// MinMax: regression of upper bounds on upper bounds.
    pub upper_fit: Option<LinearForm>,
}

/// A predicted pair of bounds. Unlike [`Interval`], the pair may be
/// inverted (`lower > upper`) for methods that cannot guarantee order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedBounds {
    pub lower: f64,
    pub upper: f64,
}

impl PredictedBounds {
    pub fn is_valid(&self) -> bool {
        self.lower <= self.upper
    }

    pub fn center(&self) -> f64 {
        (self.lower + self.upper) / 2.0
    }

    /// Half of `upper − lower`; negative when the bounds are inverted.
    pub fn half_range(&self) -> f64 {
        (self.upper - self.lower) / 2.0
    }
}

impl From<Interval> for PredictedBounds {
    fn from(i: Interval) -> Self {
        PredictedBounds {
            lower: i.lower(),
            upper: i.upper(),
        }
    }
}

/// Fits one baseline method to a table.
pub fn fit_baseline(table: &SymbolicTable, method: BaselineMethod) -> Result<BaselineModel> {
    let m = table.m();
    let p = table.p();
    let take = |f: fn(&Interval) -> f64, var: &crate::interval::IntervalVariable| -> Vec<f64> {
        var.values().iter().map(f).collect()
    };

    let mut model = BaselineModel {
        method,
        response_name: table.response().name().to_string(),
        predictor_names: table
            .explicatives()
            .iter()
            .map(|x| x.name().to_string())
            .collect(),
        center_fit: None,
        range_fit: None,
        lower_fit: None,
        upper_fit: None,
    };

    let xs_of = |f: fn(&Interval) -> f64| -> Vec<Vec<f64>> {
        table.explicatives().iter().map(|x| take(f, x)).collect()
    };

    match method {
        BaselineMethod::Cm => {
            model.center_fit = Some(ols(
                &xs_of(Interval::center),
                &take(Interval::center, table.response()),
                m,
                p,
                "centre regression",
            )?);
        }
        BaselineMethod::MinMax => {
            model.lower_fit = Some(ols(
                &xs_of(Interval::lower),
                &take(Interval::lower, table.response()),
                m,
                p,
                "lower-bound regression",
            )?);
            model.upper_fit = Some(ols(
                &xs_of(Interval::upper),
                &take(Interval::upper, table.response()),
                m,
                p,
                "upper-bound regression",
            )?);
        }
        BaselineMethod::Crm | BaselineMethod::Ccrm => {
            model.center_fit = Some(ols(
                &xs_of(Interval::center),
                &take(Interval::center, table.response()),
                m,
                p,
                "centre regression",
            )?);
            let xr = xs_of(Interval::range);
            let yr = take(Interval::range, table.response());
            model.range_fit = Some(if method == BaselineMethod::Crm {
                ols(&xr, &yr, m, p, "range regression")?
            } else {
                nonnegative_ols(&xr, &yr, m, p)?
            });
        }
    }
    Ok(model)
}

/// Predicts the response bounds for one row of predictor intervals.
pub fn predict_baseline(model: &BaselineModel, row: &[Interval]) -> Result<PredictedBounds> {
    if row.len() != model.predictor_names.len() {
        return Err(DsdError::InvalidArgument(format!(
            "prediction row has {} predictors, model has {}",
            row.len(),
            model.predictor_names.len()
        )));
    }
    let apply = |fit: &LinearForm, f: fn(&Interval) -> f64| -> f64 {
        fit.intercept
            + fit
                .slopes
                .iter()
                .zip(row)
                .map(|(s, x)| s * f(x))
                .sum::<f64>()
    };
    Ok(match model.method {
        BaselineMethod::Cm => {
            let fit = model.center_fit.as_ref().expect("CM stores a centre fit");
            let a = apply(fit, Interval::lower);
            let b = apply(fit, Interval::upper);
            // The same line is applied to both bounds; order the results.
            PredictedBounds {
                lower: a.min(b),
                upper: a.max(b),
            }
        }
        BaselineMethod::MinMax => PredictedBounds {
            lower: apply(
                model.lower_fit.as_ref().expect("MinMax stores a lower fit"),
                Interval::lower,
            ),
            upper: apply(
                model.upper_fit.as_ref().expect("MinMax stores an upper fit"),
                Interval::upper,
            ),
        },
        BaselineMethod::Crm | BaselineMethod::Ccrm => {
            let c = apply(
                model.center_fit.as_ref().expect("CRM stores a centre fit"),
                Interval::center,
            );
            let r = apply(
                model.range_fit.as_ref().expect("CRM stores a range fit"),
                Interval::range,
            );
            PredictedBounds {
                lower: c - r / 2.0,
                upper: c + r / 2.0,
            }
        }
    })
}

fn build_design(xs: &[Vec<f64>], m: usize, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, p + 1, |j, k| if k == 0 { 1.0 } else { xs[k - 1][j] })
}

/// Ordinary least squares with intercept; fails on rank-deficient designs.
fn ols(xs: &[Vec<f64>], y: &[f64], m: usize, p: usize, what: &str) -> Result<LinearForm> {
    let a = build_design(xs, m, p);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if smax <= 0.0 || svd.rank(smax * 1e-10) < p + 1 {
        return Err(DsdError::SingularFit(format!(
            "{what}: design is rank deficient"
        )));
    }
    let sol = svd
        .solve(&b, smax * 1e-12)
        .expect("SVD solve cannot fail when U and V are computed");
    Ok(LinearForm {
        intercept: sol[0],
        slopes: (1..=p).map(|k| sol[k]).collect(),
    })
}

/// Least squares with every coefficient (intercept included) constrained
/// non-negative; used by the CCRM range regression.
fn nonnegative_ols(xs: &[Vec<f64>], y: &[f64], m: usize, p: usize) -> Result<LinearForm> {
    let a = build_design(xs, m, p);
    let b = DVector::from_column_slice(y);
    let free = vec![false; p + 1];
    let (sol, _) = active_set_nnls(&a, &b, &free)?;
    Ok(LinearForm {
        intercept: sol[0],
        slopes: (1..=p).map(|k| sol[k]).collect(),
    })
}
