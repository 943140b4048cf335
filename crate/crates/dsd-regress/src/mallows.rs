//! Mallows (L2 Wasserstein) distance between interval-valued observations.
//!
//! For uniform distributions on intervals the squared distance
//! `∫₀¹ (Ψ_a⁻¹(t) − Ψ_b⁻¹(t))² dt` has the closed form
//! `(c_a − c_b)² + (r_a − r_b)² / 3`. A quadrature evaluation of the same
//! integral is provided as an independent cross-check; because the integrand
//! is a quadratic polynomial in `t`, composite Simpson quadrature is exact
//! for it up to rounding, at any number of subintervals.

use crate::error::{DsdError, Result};
use crate::interval::{symbolic_mean, Interval, IntervalVariable};

/// Squared Mallows distance `(c_a − c_b)² + (r_a − r_b)² / 3`.
pub fn mallows_sq(a: Interval, b: Interval) -> f64 {
    let (ca, ra) = a.center_halfrange();
    let (cb, rb) = b.center_halfrange();
    let dc = ca - cb;
    let dr = ra - rb;
    dc * dc + dr * dr / 3.0
}

/// Squared Mallows distance on raw bound pairs. Accepts inverted pairs
/// (`lower > upper`), for which the centre/half-range algebra still applies;
/// used when scoring baseline predictions that may cross.
pub fn mallows_sq_bounds(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (ca, ra) = ((a.0 + a.1) / 2.0, (a.1 - a.0) / 2.0);
    let (cb, rb) = ((b.0 + b.1) / 2.0, (b.1 - b.0) / 2.0);
    let dc = ca - cb;
    let dr = ra - rb;
    dc * dc + dr * dr / 3.0
}

/// Numerical evaluation of `∫₀¹ (Ψ_a⁻¹(t) − Ψ_b⁻¹(t))² dt` by composite
/// Simpson quadrature over `subintervals` panels. Fails for fewer than two
/// subintervals; an odd count is rounded up to the next even number, as
/// Simpson panels pair subintervals.
pub fn mallows_sq_numeric(a: Interval, b: Interval, subintervals: usize) -> Result<f64> {
    if subintervals < 2 {
        return Err(DsdError::InvalidArgument(format!(
            "Simpson quadrature needs at least 2 subintervals, got {subintervals}"
        )));
    }
    let n = subintervals + subintervals % 2;
    let h = 1.0 / n as f64;
    let f = |t: f64| {
        // Quantile difference is affine in t; squaring gives the quadratic
        // integrand that Simpson integrates exactly.
        let d = (a.quantile_at(t).unwrap_or(0.0)) - (b.quantile_at(t).unwrap_or(0.0));
        d * d
    };
    let mut acc = f(0.0) + f(1.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    Ok(acc * h / 3.0)
}

/// Sum of squared Mallows distances of each observation to the symbolic mean
/// of the variable.
pub fn total_dispersion(variable: &IntervalVariable) -> f64 {
    let mean = symbolic_mean(variable);
    variable
        .values()
        .iter()
        .map(|&v| mallows_sq(v, mean))
        .sum()
}
