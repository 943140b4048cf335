//! Constrained least squares for the DSD model.
//!
//! Fitting minimises the sum of squared Mallows distances between observed
//! and predicted response intervals. Writing each predictor's centre and
//! half-range as `c_k`, `r_k`, the problem stacks, per unit, one centre row
//! and one half-range row scaled by `1/√3`:
//!
//! ```text
//! centre row:      ( c_1, −c_1, …, c_p, −c_p, 1 ) · b ≈ c_y
//! half-range row:  ( r_1,  r_1, …, r_p,  r_p, 0 ) / √3 · b ≈ r_y / √3
//! ```
//!
//! with the coefficient vector `b = (α_1, β_1, …, α_p, β_p, γ)`. The ordinary
//! Euclidean least-squares objective on the stacked system equals the Mallows
//! objective exactly. All `α_k, β_k` are constrained non-negative; `γ` is
//! free. The solver is a Lawson–Hanson style active-set iteration extended
//! with permanently free columns; subproblems are solved by SVD, so
//! rank-deficient passive sets get their minimum-norm solution.

use nalgebra::{DMatrix, DVector};

use crate::error::{DsdError, Result};
use crate::interval::SymbolicTable;

/// Relative tolerance used by the KKT certificate: gradient components are
/// compared against `KKT_REL_TOL` times the largest absolute design entry.
pub const KKT_REL_TOL: f64 = 1e-8;

/// Relative tolerance for classifying a column as all-symmetric or
/// all-degenerate.
pub const COLLINEARITY_REL_TOL: f64 = 1e-12;

/// Fitted DSD coefficients: `alphas[k]` and `betas[k]` (both non-negative)
/// weight predictor `k` and its symmetric distribution; `gamma` is the free
/// intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct DsdCoefficients {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub gamma: f64,
}

impl DsdCoefficients {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>, gamma: f64) -> Result<Self> {
        if alphas.len() != betas.len() {
            return Err(DsdError::InvalidData(format!(
                "{} alpha coefficients vs {} beta coefficients",
                alphas.len(),
                betas.len()
            )));
        }
        if alphas.is_empty() {
            return Err(DsdError::InvalidData(
                "coefficient vectors must not be empty".into(),
            ));
        }
        Ok(Self { alphas, betas, gamma })
    }

    /// Number of predictors.
    pub fn p(&self) -> usize {
        self.alphas.len()
    }

    /// Flattens to stacked order `(α_1, β_1, …, α_p, β_p, γ)`.
    pub fn to_stacked(&self) -> DVector<f64> {
        let p = self.p();
        let mut b = DVector::zeros(2 * p + 1);
        for k in 0..p {
            b[2 * k] = self.alphas[k];
            b[2 * k + 1] = self.betas[k];
        }
        b[2 * p] = self.gamma;
        b
    }

    /// Rebuilds from stacked order.
    pub fn from_stacked(b: &DVector<f64>) -> Result<Self> {
        if b.len() % 2 != 1 || b.len() < 3 {
            return Err(DsdError::InvalidData(format!(
                "stacked coefficient vector has length {}, expected odd >= 3",
                b.len()
            )));
        }
        let p = (b.len() - 1) / 2;
        Self::new(
            (0..p).map(|k| b[2 * k]).collect(),
            (0..p).map(|k| b[2 * k + 1]).collect(),
            b[2 * p],
        )
    }

    /// Slopes of the induced regression on centres, `α_k − β_k`.
    pub fn center_slopes(&self) -> Vec<f64> {
        self.alphas
            .iter()
            .zip(&self.betas)
            .map(|(a, b)| a - b)
            .collect()
    }

    /// Slopes of the induced regression on half-ranges, `α_k + β_k`.
    pub fn halfrange_slopes(&self) -> Vec<f64> {
        self.alphas
            .iter()
            .zip(&self.betas)
            .map(|(a, b)| a + b)
            .collect()
    }
}

/// The stacked linear system described in the module docs: `2m` rows
/// (first the `m` centre rows, then the `m` scaled half-range rows) by
/// `2p + 1` columns.
#[derive(Debug, Clone)]
pub struct StackedSystem {
    pub design: DMatrix<f64>,
    pub target: DVector<f64>,
    pub m: usize,
    pub p: usize,
}

/// Diagnostics attached to a solve.
#[derive(Debug, Clone)]
pub struct SolveDiagnostics {
    /// Final value of the Mallows least-squares objective `‖Ab − y‖²`.
    pub objective: f64,
    /// Stacked indices of constrained coefficients held at zero.
    pub active_set: Vec<usize>,
    /// Whether the minimiser is unique (stacked design has full column
    /// rank). When false the returned solution is the minimum-norm one.
    pub unique: bool,
    /// Number of least-squares subproblems solved.
    pub iterations: usize,
}

/// Per-predictor collinearity classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ColumnCollinearity {
    /// All centres are (relatively) zero: the predictor's α and β columns
    /// coincide and only `α_k + β_k` is identified.
    pub all_symmetric: bool,
    /// All half-ranges are (relatively) zero: the columns are opposite and
    /// only `α_k − β_k` is identified.
    pub all_degenerate: bool,
}

/// Collinearity report over all predictors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollinearityReport {
    pub columns: Vec<ColumnCollinearity>,
}

impl CollinearityReport {
    /// True when no column is flagged.
    pub fn is_clean(&self) -> bool {
        self.columns
            .iter()
            .all(|c| !c.all_symmetric && !c.all_degenerate)
    }
}

/// Classifies every predictor column. A column is `all_symmetric` when every
/// centre is at most [`COLLINEARITY_REL_TOL`] times the column scale (the
/// largest absolute bound, with 1 as a floor), and `all_degenerate` when
/// every half-range is.
pub fn detect_collinearity(table: &SymbolicTable) -> CollinearityReport {
    let columns = table
        .explicatives()
        .iter()
        .map(|x| {
            let scale = x
                .values()
                .iter()
                .map(|v| v.lower().abs().max(v.upper().abs()))
                .fold(0.0_f64, f64::max)
                .max(1.0);
            let tol = COLLINEARITY_REL_TOL * scale;
            ColumnCollinearity {
                all_symmetric: x.values().iter().all(|v| v.center().abs() <= tol),
                all_degenerate: x.values().iter().all(|v| v.half_range() <= tol),
            }
        })
        .collect();
    CollinearityReport { columns }
}

/// Builds the stacked design and target for a table.
pub fn build_stacked_system(table: &SymbolicTable) -> StackedSystem {
    let m = table.m();
    let p = table.p();
    let n = 2 * p + 1;
    let s3 = 3.0_f64.sqrt();
    let mut design = DMatrix::zeros(2 * m, n);
    let mut target = DVector::zeros(2 * m);
    for j in 0..m {
        let (cy, ry) = table.response().values()[j].center_halfrange();
        target[j] = cy;
        target[m + j] = ry / s3;
        for (k, x) in table.explicatives().iter().enumerate() {
            let (c, r) = x.values()[j].center_halfrange();
            design[(j, 2 * k)] = c;
            design[(j, 2 * k + 1)] = -c;
            design[(m + j, 2 * k)] = r / s3;
            design[(m + j, 2 * k + 1)] = r / s3;
        }
        design[(j, n - 1)] = 1.0;
        // Half-range rows carry no intercept.
    }
    StackedSystem { design, target, m, p }
}

/// `‖A b − y‖²` for a candidate coefficient vector — by construction equal to
/// the sum of squared Mallows distances between observed and predicted
/// response intervals.
pub fn objective_value(system: &StackedSystem, coefficients: &DsdCoefficients) -> f64 {
    let b = coefficients.to_stacked();
    (&system.design * b - &system.target).norm_squared()
}

/// KKT optimality certificate for the non-negativity-constrained problem,
/// evaluated at a candidate solution. Gradient components are those of
/// `½‖y − Ab‖²`, i.e. `g = Aᵀ(Ab − y)`.
#[derive(Debug, Clone, Copy)]
pub struct KktCertificate {
    /// `max |g_i|` over the free coefficient and constrained coefficients
    /// strictly above zero. Must be ≈ 0.
    pub stationarity: f64,
    /// `max(0, −min g_i)` over constrained coefficients at zero: a positive
    /// value means the objective could be reduced by activating that
    /// coefficient.
    pub dual_feasibility: f64,
    /// `max |b_i · g_i|` over constrained coefficients.
    pub complementarity: f64,
    /// `max(0, −min b_i)` over constrained coefficients: primal feasibility.
    pub feasibility: f64,
    /// Absolute tolerance the certificate is judged against.
    pub tolerance: f64,
    /// Largest absolute coefficient, used to scale the complementarity test.
    pub max_abs_coeff: f64,
}

impl KktCertificate {
    /// All four residuals within tolerance. The complementarity residual
    /// scales with `|b|`, so it is compared against `tolerance · (1 + |b|∞)`.
    pub fn holds(&self) -> bool {
        self.stationarity <= self.tolerance
            && self.dual_feasibility <= self.tolerance
            && self.feasibility <= self.tolerance
            && self.complementarity <= self.tolerance * (1.0 + self.max_abs_coeff)
    }
}

/// Evaluates the KKT certificate at `coefficients`. The tolerance is
/// [`KKT_REL_TOL`] times the largest absolute design entry (with 1 as a
/// floor), following the solver's own stopping rule.
pub fn kkt_certificate(system: &StackedSystem, coefficients: &DsdCoefficients) -> KktCertificate {
    let b = coefficients.to_stacked();
    let g = system.design.transpose() * (&system.design * &b - &system.target);
    let n = b.len();
    let free = n - 1;
    let tol = KKT_REL_TOL * design_scale(&system.design);

    let mut stationarity = g[free].abs();
    let mut dual = 0.0_f64;
    let mut compl = 0.0_f64;
    let mut feas = 0.0_f64;
    for i in 0..free {
        compl = compl.max((b[i] * g[i]).abs());
        feas = feas.max(-b[i]);
        if b[i] > tol {
            stationarity = stationarity.max(g[i].abs());
        } else {
            dual = dual.max(-g[i]);
        }
    }
    KktCertificate {
        stationarity,
        dual_feasibility: dual,
        complementarity: compl,
        feasibility: feas,
        tolerance: tol,
        max_abs_coeff: b.amax(),
    }
}

fn design_scale(a: &DMatrix<f64>) -> f64 {
    a.amax().max(1.0)
}

/// Solves the stacked system under `α, β >= 0` with free `γ`.
///
/// Returns the coefficients and diagnostics; fails with
/// [`DsdError::Convergence`] if more than `10 · (2p + 1)` least-squares
/// subproblems are needed (never returns a truncated iterate). When the
/// design is rank deficient — some predictor all-symmetric or
/// all-degenerate — the minimum-norm optimum is returned: an all-symmetric
/// predictor gets `α_k = β_k = (α_k + β_k)/2`, an all-degenerate one gets
/// `min(α_k, β_k) = 0`.
pub fn solve_constrained_ls(
    system: &StackedSystem,
) -> Result<(DsdCoefficients, SolveDiagnostics)> {
    let n = 2 * system.p + 1;
    let mut free = vec![false; n];
    free[n - 1] = true;
    let (b, info) = active_set_nnls(&system.design, &system.target, &free)?;

    let mut coeffs = DsdCoefficients::from_stacked(&b)?;
    let rank = {
        let svd = system.design.clone().svd(false, false);
        let smax = svd.singular_values.max();
        if smax > 0.0 {
            svd.rank(smax * 1e-10)
        } else {
            0
        }
    };
    let unique = rank == n;
    if !unique {
        // Pin down the minimum-norm representative for the two recognised
        // degeneracy patterns; other rank deficiencies keep the iterate,
        // which SVD subproblems already made minimum-norm over the passive
        // set.
        normalize_degenerate(&mut coeffs, system);
    }

    let objective = objective_value(system, &coeffs);
    let active_set = (0..n - 1).filter(|&i| coeffs_at(&coeffs, i) == 0.0).collect();
    Ok((
        coeffs.clone(),
        SolveDiagnostics {
            objective,
            active_set,
            unique,
            iterations: info.iterations,
        },
    ))
}

fn coeffs_at(c: &DsdCoefficients, stacked_index: usize) -> f64 {
    if stacked_index % 2 == 0 {
        c.alphas[stacked_index / 2]
    } else {
        c.betas[stacked_index / 2]
    }
}

fn normalize_degenerate(coeffs: &mut DsdCoefficients, system: &StackedSystem) {
    let (m, p) = (system.m, system.p);
    let s3 = 3.0_f64.sqrt();
    for k in 0..p {
        // Reconstruct the column's centre/half-range scales from the design.
        let mut cmax = 0.0_f64;
        let mut rmax = 0.0_f64;
        let mut scale = 0.0_f64;
        for j in 0..m {
            let c = system.design[(j, 2 * k)];
            let r = system.design[(m + j, 2 * k)] * s3;
            cmax = cmax.max(c.abs());
            rmax = rmax.max(r.abs());
            scale = scale.max((c.abs() + r).max(1.0));
        }
        let tol = COLLINEARITY_REL_TOL * scale;
        let symmetric = cmax <= tol;
        let degenerate = rmax <= tol;
        let (a, b) = (coeffs.alphas[k], coeffs.betas[k]);
        if symmetric && degenerate {
            coeffs.alphas[k] = 0.0;
            coeffs.betas[k] = 0.0;
        } else if symmetric {
            let s = (a + b) / 2.0;
            coeffs.alphas[k] = s;
            coeffs.betas[k] = s;
        } else if degenerate {
            let d = a - b;
            coeffs.alphas[k] = d.max(0.0);
            coeffs.betas[k] = (-d).max(0.0);
        }
    }
}

pub(crate) struct NnlsInfo {
    pub iterations: usize,
}

/// Lawson–Hanson active-set non-negative least squares with an arbitrary set
/// of permanently free columns. Free columns are always in the passive set
/// and may take any sign. Ties between candidate entering columns (equal
/// gradients) are broken towards the lowest index.
pub(crate) fn active_set_nnls(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    free: &[bool],
) -> Result<(DVector<f64>, NnlsInfo)> {
    let n = a.ncols();
    assert_eq!(free.len(), n);
    let cap = 10 * n;
    let tol = KKT_REL_TOL * design_scale(a);

    let mut passive: Vec<bool> = free.to_vec();
    let mut b = DVector::zeros(n);
    let mut iterations = 0usize;

    // Seed with the unconstrained solve over the free columns, if any.
    if passive.iter().any(|&x| x) {
        iterations += 1;
        let z = ls_subproblem(a, y, &passive);
        scatter(&mut b, &passive, &z);
    }

    loop {
        // Gradient of ½‖y − Ab‖² is −Aᵀ(y − Ab); a constrained column wants
        // to enter when w = Aᵀ(y − Ab) is positive there.
        let w = a.transpose() * (y - a * &b);
        let mut entering: Option<usize> = None;
        for k in 0..n {
            if passive[k] || free[k] {
                continue;
            }
            if w[k] > tol && entering.map_or(true, |e| w[k] > w[e]) {
                entering = Some(k);
            }
        }
        let Some(k) = entering else {
            break;
        };
        passive[k] = true;

        // Inner loop: restore primal feasibility after each subproblem.
        loop {
            iterations += 1;
            if iterations > cap {
                return Err(DsdError::Convergence { cap });
            }
            let z = ls_subproblem(a, y, &passive);
            let mut zfull = DVector::zeros(n);
            scatter(&mut zfull, &passive, &z);

            let mut theta = 1.0_f64;
            let mut blocked = false;
            for i in 0..n {
                if passive[i] && !free[i] && zfull[i] <= 0.0 {
                    blocked = true;
                    let denom = b[i] - zfull[i];
                    if denom > 0.0 {
                        theta = theta.min(b[i] / denom);
                    } else {
                        theta = 0.0;
                    }
                }
            }
            if !blocked {
                b = zfull;
                break;
            }
            for i in 0..n {
                if passive[i] {
                    b[i] += theta * (zfull[i] - b[i]);
                }
            }
            // Move every constrained coefficient that landed on the boundary
            // back to the active set.
            for i in 0..n {
                if passive[i] && !free[i] && (b[i] <= 0.0 || (zfull[i] <= 0.0 && b[i] < 1e-14)) {
                    passive[i] = false;
                    b[i] = 0.0;
                }
            }
        }
    }

    Ok((b, NnlsInfo { iterations }))
}

/// Minimum-norm least squares over the passive columns.
fn ls_subproblem(a: &DMatrix<f64>, y: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..a.ncols()).filter(|&i| passive[i]).collect();
    let sub = a.select_columns(cols.iter());
    let svd = sub.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = if smax > 0.0 { smax * 1e-12 } else { f64::EPSILON };
    svd.solve(y, eps)
        .expect("SVD solve cannot fail when U and V are computed")
        .column(0)
        .into_owned()
}

fn scatter(full: &mut DVector<f64>, passive: &[bool], packed: &DVector<f64>) {
    let mut idx = 0;
    for i in 0..full.len() {
        if passive[i] {
            full[i] = packed[idx];
            idx += 1;
        } else {
            full[i] = 0.0;
        }
    }
}

/// Closed-form single-predictor solution.
///
/// With centred sums `S_cc = Σ (c_y − ȳ)(c_x − x̄)`, `S_xx = Σ (c_x − x̄)²`,
/// `S_rr = ⅓ Σ r_x r_y` and `S_xx^r = ⅓ Σ r_x²`, the unconstrained optimum in
/// `(α − β, α + β)` is `(S_cc/S_xx, S_rr/S_xx^r)`. If it violates a sign
/// constraint the optimum moves to the corresponding face of the
/// non-negative quadrant, and to the origin only when both `S_cc` and `S_rr`
/// vanish; `γ` always equals `ȳ − (α − β) x̄`. Requires a strictly convex
/// problem: fails on all-degenerate, all-symmetric, or constant-centre
/// predictors.
pub fn solve_single_closed_form(table: &SymbolicTable) -> Result<DsdCoefficients> {
    if table.p() != 1 {
        return Err(DsdError::InvalidArgument(format!(
            "closed form applies to exactly one predictor, table has {}",
            table.p()
        )));
    }
    let x = &table.explicatives()[0];
    let y = table.response();
    let m = table.m() as f64;

    let report = detect_collinearity(table);
    let flags = report.columns[0];
    if flags.all_degenerate {
        return Err(DsdError::DegenerateDesign(format!(
            "predictor {} is degenerate on every unit; only α − β is identified",
            x.name()
        )));
    }
    if flags.all_symmetric {
        return Err(DsdError::DegenerateDesign(format!(
            "predictor {} is symmetric about zero on every unit; only α + β is identified",
            x.name()
        )));
    }

    let cx = x.centers();
    let rx = x.half_ranges();
    let cy = y.centers();
    let ry = y.half_ranges();
    let xb = cx.iter().sum::<f64>() / m;
    let yb = cy.iter().sum::<f64>() / m;

    let mut scc = 0.0;
    let mut sxx = 0.0;
    let mut srr = 0.0;
    let mut sxxr = 0.0;
    for j in 0..cx.len() {
        scc += (cy[j] - yb) * (cx[j] - xb);
        sxx += (cx[j] - xb) * (cx[j] - xb);
        srr += rx[j] * ry[j] / 3.0;
        sxxr += rx[j] * rx[j] / 3.0;
    }

    let cscale = cx.iter().fold(0.0_f64, |a, c| a.max(c.abs())).max(1.0);
    if sxx <= m * (COLLINEARITY_REL_TOL * cscale).powi(2) {
        return Err(DsdError::DegenerateDesign(format!(
            "predictor {} has constant centres; α − β and γ are not jointly identified",
            x.name()
        )));
    }
    debug_assert!(sxxr > 0.0);

    let ustar = scc / sxx;
    let vstar = srr / sxxr;
    let mut alpha = (ustar + vstar) / 2.0;
    let mut beta = (vstar - ustar) / 2.0;
    if !(alpha > 0.0 && beta > 0.0) {
        if beta <= 0.0 {
            // Optimum on the β = 0 face.
            alpha = ((scc + srr) / (sxx + sxxr)).max(0.0);
            beta = 0.0;
        } else {
            // Optimum on the α = 0 face.
            beta = ((srr - scc) / (sxx + sxxr)).max(0.0);
            alpha = 0.0;
        }
    }
    let gamma = yb - (alpha - beta) * xb;
    DsdCoefficients::new(vec![alpha], vec![beta], gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{Interval, IntervalVariable};

    fn table(y: &[(f64, f64)], x: &[(f64, f64)]) -> SymbolicTable {
        let iv = |pairs: &[(f64, f64)]| {
            pairs
                .iter()
                .map(|&(l, u)| Interval::new(l, u).unwrap())
                .collect::<Vec<_>>()
        };
        let labels = (0..y.len()).map(|i| format!("u{i}")).collect();
        SymbolicTable::new(
            labels,
            IntervalVariable::new("y", iv(y)).unwrap(),
            vec![IntervalVariable::new("x", iv(x)).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn stacked_rows_match_hand_example() {
        let t = table(&[(-3.0, 3.0)], &[(0.0, 2.0)]);
        let s = build_stacked_system(&t);
        let s3 = 3.0_f64.sqrt();
        assert_eq!(s.design.nrows(), 2);
        assert_eq!(s.design.ncols(), 3);
        assert_eq!(s.design[(0, 0)], 1.0);
        assert_eq!(s.design[(0, 1)], -1.0);
        assert_eq!(s.design[(0, 2)], 1.0);
        assert!((s.design[(1, 0)] - 1.0 / s3).abs() < 1e-15);
        assert!((s.design[(1, 1)] - 1.0 / s3).abs() < 1e-15);
        assert_eq!(s.design[(1, 2)], 0.0);
        assert_eq!(s.target[0], 0.0);
        assert!((s.target[1] - 3.0 / s3).abs() < 1e-15);
    }

    #[test]
    fn exact_relation_is_recovered() {
        // y = 2 x ⊕ 1 x^sym ⊖ 1 elementwise on quantiles.
        let t = table(
            &[(-3.0, 3.0), (-2.0, 4.0), (-3.0, 9.0)],
            &[(0.0, 2.0), (1.0, 3.0), (2.0, 6.0)],
        );
        let s = build_stacked_system(&t);
        let (c, d) = solve_constrained_ls(&s).unwrap();
        assert!((c.alphas[0] - 2.0).abs() < 1e-10, "alpha {:?}", c);
        assert!((c.betas[0] - 1.0).abs() < 1e-10);
        assert!((c.gamma + 1.0).abs() < 1e-10);
        assert!(d.objective < 1e-18);
        assert!(d.unique);
        assert!(kkt_certificate(&s, &c).holds());
    }

    #[test]
    fn closed_form_agrees_with_active_set_on_exact_relation() {
        let t = table(
            &[(-3.0, 3.0), (-2.0, 4.0), (-3.0, 9.0)],
            &[(0.0, 2.0), (1.0, 3.0), (2.0, 6.0)],
        );
        let cf = solve_single_closed_form(&t).unwrap();
        assert!((cf.alphas[0] - 2.0).abs() < 1e-12);
        assert!((cf.betas[0] - 1.0).abs() < 1e-12);
        assert!((cf.gamma + 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_relation_activates_alpha() {
        // Centres drop ~4.3 per unit while ranges grow only mildly, so the
        // unconstrained α = (u* + v*)/2 is negative and the constraint pins
        // it at zero.
        let t = table(
            &[(19.0, 21.0), (5.0, 8.0), (-10.0, -6.0)],
            &[(0.0, 2.0), (3.0, 5.0), (6.0, 9.0)],
        );
        let s = build_stacked_system(&t);
        let (c, d) = solve_constrained_ls(&s).unwrap();
        assert_eq!(c.alphas[0], 0.0);
        assert!(c.betas[0] > 0.0);
        assert!(d.active_set.contains(&0));
        assert!(kkt_certificate(&s, &c).holds());
        let cf = solve_single_closed_form(&t).unwrap();
        assert!((cf.alphas[0] - c.alphas[0]).abs() < 1e-10);
        assert!((cf.betas[0] - c.betas[0]).abs() < 1e-10);
        assert!((cf.gamma - c.gamma).abs() < 1e-10);
    }

    #[test]
    fn all_degenerate_design_errors_in_closed_form_and_normalizes_in_solver() {
        let t = table(
            &[(1.0, 1.0), (3.0, 3.0), (4.8, 4.8)],
            &[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)],
        );
        assert!(matches!(
            solve_single_closed_form(&t),
            Err(DsdError::DegenerateDesign(_))
        ));
        let s = build_stacked_system(&t);
        let (c, d) = solve_constrained_ls(&s).unwrap();
        assert!(!d.unique);
        // Minimum-norm representation keeps one of the pair at zero.
        assert_eq!(c.alphas[0].min(c.betas[0]), 0.0);
        // The identified combination matches the ordinary regression of
        // centres on centres: slope 1.9, intercept 0.0333…
        assert!((c.alphas[0] - c.betas[0] - 1.9).abs() < 1e-10);
    }

    #[test]
    fn all_symmetric_design_splits_equally() {
        let t = table(
            &[(-4.0, 4.0), (-6.0, 6.0), (-10.0, 10.0)],
            &[(-1.0, 1.0), (-2.0, 2.0), (-3.0, 3.0)],
        );
        let s = build_stacked_system(&t);
        let (c, d) = solve_constrained_ls(&s).unwrap();
        assert!(!d.unique);
        assert!((c.alphas[0] - c.betas[0]).abs() < 1e-12);
        assert!(c.alphas[0] > 0.0);
    }

    #[test]
    fn iteration_counts_are_reported() {
        let t = table(
            &[(0.0, 2.0), (1.0, 5.0), (2.0, 9.0)],
            &[(0.0, 1.0), (1.0, 2.0), (2.0, 4.0)],
        );
        let s = build_stacked_system(&t);
        let (_, d) = solve_constrained_ls(&s).unwrap();
        assert!(d.iterations >= 1);
        assert!(d.iterations <= 30);
    }
}
