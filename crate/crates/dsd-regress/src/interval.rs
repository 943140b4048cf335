//! Core interval types: single intervals, named interval variables, and the
//! table of one response plus explicative variables that fitting operates on.
//!
//! An interval `[l, u]` is read as the uniform distribution on `[l, u]`; its
//! quantile function is `Ψ⁻¹(t) = c + r (2t − 1)` with centre
//! `c = (l + u) / 2` and half-range `r = (u − l) / 2 ≥ 0`. The quantile
//! function of the symmetric distribution (the law of `−X`) is
//! `−Ψ⁻¹(1 − t) = −c + r (2t − 1)`.

use crate::error::{DsdError, Result};

/// A closed interval `[lower, upper]` with finite bounds and
/// `lower <= upper`. Construction validates; a malformed pair is reported,
/// never silently reordered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    /// Builds `[lower, upper]`, rejecting non-finite bounds and
    /// `lower > upper`.
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        Self::with_context(lower, upper, String::new())
    }

    /// Like [`Interval::new`] but attaches a caller-supplied context (unit
    /// label, row number, …) to the error message.
    pub fn with_context(lower: f64, upper: f64, context: String) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(DsdError::InvalidInterval {
                lower,
                upper,
                context,
                reason: "bounds must be finite",
            });
        }
        if lower > upper {
            return Err(DsdError::InvalidInterval {
                lower,
                upper,
                context,
                reason: "lower bound exceeds upper bound",
            });
        }
        Ok(Self { lower, upper })
    }

    /// A single point `[x, x]`.
    pub fn degenerate(x: f64) -> Result<Self> {
        Self::new(x, x)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Midpoint `(l + u) / 2`.
    pub fn center(&self) -> f64 {
        (self.lower + self.upper) / 2.0
    }

    /// Half of the width, `(u − l) / 2`; always `>= 0`.
    pub fn half_range(&self) -> f64 {
        (self.upper - self.lower) / 2.0
    }

    /// `(centre, half-range)` in one call.
    pub fn center_halfrange(&self) -> (f64, f64) {
        (self.center(), self.half_range())
    }

    /// Width `u − l`.
    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }

    /// True when the interval is a single point.
    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    /// Quantile function of the uniform distribution on the interval,
    /// `Ψ⁻¹(t) = c + r (2t − 1)` for `t` in `[0, 1]`.
    pub fn quantile_at(&self, t: f64) -> Result<f64> {
        check_level(t)?;
        let (c, r) = self.center_halfrange();
        Ok(c + r * (2.0 * t - 1.0))
    }

    /// Quantile function of the symmetric distribution (the law of the
    /// negated variable): `−Ψ⁻¹(1 − t) = −c + r (2t − 1)`.
    pub fn symmetric_quantile_at(&self, t: f64) -> Result<f64> {
        check_level(t)?;
        let (c, r) = self.center_halfrange();
        Ok(-c + r * (2.0 * t - 1.0))
    }
}

fn check_level(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(DsdError::InvalidArgument(format!(
            "quantile level {t} outside [0, 1]"
        )));
    }
    Ok(())
}

/// A named sequence of interval observations (one column of a symbolic data
/// table).
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalVariable {
    name: String,
    values: Vec<Interval>,
}

impl IntervalVariable {
    /// Builds a variable from at least one observation.
    pub fn new(name: impl Into<String>, values: Vec<Interval>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(DsdError::InvalidData(
                "variable name must be non-empty".into(),
            ));
        }
        if values.is_empty() {
            return Err(DsdError::InvalidData(format!(
                "variable {name} has no observations"
            )));
        }
        Ok(Self { name, values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[Interval] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Centres of all observations.
    pub fn centers(&self) -> Vec<f64> {
        self.values.iter().map(Interval::center).collect()
    }

    /// Half-ranges of all observations.
    pub fn half_ranges(&self) -> Vec<f64> {
        self.values.iter().map(Interval::half_range).collect()
    }

    /// Returns the variable renamed.
    pub fn renamed(&self, name: impl Into<String>) -> Result<Self> {
        Self::new(name, self.values.clone())
    }
}

/// The symbolic mean of a set of intervals: the interval whose lower and upper
/// bounds are the means of the observed bounds. Its quantile function is the
/// pointwise mean of the observed quantile functions.
pub fn symbolic_mean(variable: &IntervalVariable) -> Interval {
    let m = variable.len() as f64;
    let (mut sl, mut su) = (0.0, 0.0);
    for v in variable.values() {
        sl += v.lower();
        su += v.upper();
    }
    // Means of valid bounds stay ordered and finite.
    Interval {
        lower: sl / m,
        upper: su / m,
    }
}

/// Applies `x ↦ ln(x + shift)` to both bounds of every observation. The map
/// is increasing, so `[l, u]` becomes `[ln(l + shift), ln(u + shift)]`. Fails
/// if any `l + shift <= 0`, identifying the offending unit. `labels`, when
/// given, must be parallel to the variable and supplies the unit names used
/// in error messages; otherwise the 1-based position is reported.
pub fn log_shift_transform(
    variable: &IntervalVariable,
    shift: f64,
    labels: Option<&[String]>,
) -> Result<IntervalVariable> {
    if !shift.is_finite() {
        return Err(DsdError::InvalidArgument(format!(
            "log-shift {shift} must be finite"
        )));
    }
    if let Some(labels) = labels {
        if labels.len() != variable.len() {
            return Err(DsdError::InvalidData(format!(
                "{} labels supplied for {} observations",
                labels.len(),
                variable.len()
            )));
        }
    }
    let mut out = Vec::with_capacity(variable.len());
    for (j, v) in variable.values().iter().enumerate() {
        if v.lower() + shift <= 0.0 {
            let unit = match labels {
                Some(l) => l[j].clone(),
                None => format!("#{}", j + 1),
            };
            return Err(DsdError::LogShiftDomain {
                unit,
                lower: v.lower(),
                shift,
            });
        }
        out.push(Interval::with_context(
            (v.lower() + shift).ln(),
            (v.upper() + shift).ln(),
            format!("log-shift of {}", variable.name()),
        )?);
    }
    IntervalVariable::new(variable.name(), out)
}

/// A rectangular symbolic data set: unit labels, one response variable and
/// `p >= 1` explicative variables, all of the same length `m >= 1`, with
/// unique unit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicTable {
    labels: Vec<String>,
    response: IntervalVariable,
    explicatives: Vec<IntervalVariable>,
}

impl SymbolicTable {
    pub fn new(
        labels: Vec<String>,
        response: IntervalVariable,
        explicatives: Vec<IntervalVariable>,
    ) -> Result<Self> {
        let m = labels.len();
        if m == 0 {
            return Err(DsdError::InvalidData("table has no units".into()));
        }
        if response.len() != m {
            return Err(DsdError::InvalidData(format!(
                "response {} has {} observations but there are {} unit labels",
                response.name(),
                response.len(),
                m
            )));
        }
        if explicatives.is_empty() {
            return Err(DsdError::InvalidData(
                "at least one explicative variable is required".into(),
            ));
        }
        for x in &explicatives {
            if x.len() != m {
                return Err(DsdError::InvalidData(format!(
                    "explicative {} has {} observations but there are {} unit labels",
                    x.name(),
                    x.len(),
                    m
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(DsdError::InvalidData(format!(
                    "duplicate unit label {l:?}"
                )));
            }
        }
        let mut names = std::collections::HashSet::new();
        for v in std::iter::once(&response).chain(explicatives.iter()) {
            if !names.insert(v.name()) {
                return Err(DsdError::InvalidData(format!(
                    "duplicate variable name {:?}",
                    v.name()
                )));
            }
        }
        Ok(Self {
            labels,
            response,
            explicatives,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn response(&self) -> &IntervalVariable {
        &self.response
    }

    pub fn explicatives(&self) -> &[IntervalVariable] {
        &self.explicatives
    }

    /// Number of units.
    pub fn m(&self) -> usize {
        self.labels.len()
    }

    /// Number of explicative variables.
    pub fn p(&self) -> usize {
        self.explicatives.len()
    }

    /// The row of explicative observations for unit `j`.
    pub fn explicative_row(&self, j: usize) -> Vec<Interval> {
        self.explicatives.iter().map(|x| x.values()[j]).collect()
    }

    /// Replaces the response with `ln(response + shift)`, reporting the unit
    /// label if the transform is undefined somewhere.
    pub fn log_shift_response(&self, shift: f64) -> Result<Self> {
        let transformed = log_shift_transform(&self.response, shift, Some(&self.labels))?;
        Self::new(self.labels.clone(), transformed, self.explicatives.clone())
    }

    /// A copy of the table without unit `j` (for leave-one-out fitting).
    pub fn without_unit(&self, j: usize) -> Result<Self> {
        if j >= self.m() {
            return Err(DsdError::InvalidArgument(format!(
                "unit index {j} out of range for table with {} units",
                self.m()
            )));
        }
        let keep =
            |v: &IntervalVariable| -> Result<IntervalVariable> {
                let values: Vec<Interval> = v
                    .values()
                    .iter()
                    .enumerate()
                    .filter_map(|(i, iv)| (i != j).then_some(*iv))
                    .collect();
                IntervalVariable::new(v.name(), values)
            };
        let labels: Vec<String> = self
            .labels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| (i != j).then(|| l.clone()))
            .collect();
        Self::new(
            labels,
            keep(&self.response)?,
            self.explicatives.iter().map(keep).collect::<Result<_>>()?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(pairs: &[(f64, f64)]) -> Vec<Interval> {
        pairs.iter().map(|&(l, u)| Interval::new(l, u).unwrap()).collect()
    }

    #[test]
    fn rejects_swapped_bounds() {
        let err = Interval::new(2.0, 1.0).unwrap_err();
        assert!(matches!(err, DsdError::InvalidInterval { .. }));
    }

    #[test]
    fn rejects_non_finite_bounds() {
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn center_halfrange_roundtrip() {
        let i = Interval::new(-3.0, 9.0).unwrap();
        let (c, r) = i.center_halfrange();
        assert_eq!(c, 3.0);
        assert_eq!(r, 6.0);
        assert_eq!(i.range(), 12.0);
    }

    #[test]
    fn quantile_endpoints_and_midpoint() {
        let i = Interval::new(2.0, 10.0).unwrap();
        assert_eq!(i.quantile_at(0.0).unwrap(), 2.0);
        assert_eq!(i.quantile_at(1.0).unwrap(), 10.0);
        assert_eq!(i.quantile_at(0.5).unwrap(), 6.0);
        assert!(i.quantile_at(1.5).is_err());
    }

    #[test]
    fn symmetric_quantile_negates_and_reverses() {
        let i = Interval::new(2.0, 10.0).unwrap();
        // −Ψ⁻¹(1 − t) at t = 0 is −upper; at t = 1 it is −lower.
        assert_eq!(i.symmetric_quantile_at(0.0).unwrap(), -10.0);
        assert_eq!(i.symmetric_quantile_at(1.0).unwrap(), -2.0);
    }

    #[test]
    fn symbolic_mean_averages_bounds() {
        let v = IntervalVariable::new("y", iv(&[(0.0, 2.0), (4.0, 10.0)])).unwrap();
        let mean = symbolic_mean(&v);
        assert_eq!(mean.lower(), 2.0);
        assert_eq!(mean.upper(), 6.0);
    }

    #[test]
    fn log_shift_maps_bounds_monotonically() {
        let v = IntervalVariable::new("y", iv(&[(0.0, 16.0)])).unwrap();
        let t = log_shift_transform(&v, 2.0, None).unwrap();
        assert!((t.values()[0].lower() - 2.0_f64.ln()).abs() < 1e-15);
        assert!((t.values()[0].upper() - 18.0_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log_shift_names_offending_unit() {
        let v = IntervalVariable::new("y", iv(&[(1.0, 2.0), (-3.0, 4.0)])).unwrap();
        let labels = vec!["a".to_string(), "b".to_string()];
        let err = log_shift_transform(&v, 2.0, Some(&labels)).unwrap_err();
        match err {
            DsdError::LogShiftDomain { unit, lower, shift } => {
                assert_eq!(unit, "b");
                assert_eq!(lower, -3.0);
                assert_eq!(shift, 2.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn table_rejects_duplicate_labels() {
        let y = IntervalVariable::new("y", iv(&[(0.0, 1.0), (1.0, 2.0)])).unwrap();
        let x = IntervalVariable::new("x", iv(&[(0.0, 1.0), (1.0, 2.0)])).unwrap();
        let labels = vec!["u".to_string(), "u".to_string()];
        assert!(SymbolicTable::new(labels, y, vec![x]).is_err());
    }

    #[test]
    fn table_rejects_length_mismatch() {
        let y = IntervalVariable::new("y", iv(&[(0.0, 1.0), (1.0, 2.0)])).unwrap();
        let x = IntervalVariable::new("x", iv(&[(0.0, 1.0)])).unwrap();
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(SymbolicTable::new(labels, y, vec![x]).is_err());
    }

    #[test]
    fn without_unit_drops_one_row() {
        let y = IntervalVariable::new("y", iv(&[(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)])).unwrap();
        let x = IntervalVariable::new("x", iv(&[(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)])).unwrap();
        let labels = vec!["a".into(), "b".into(), "c".into()];
        let t = SymbolicTable::new(labels, y, vec![x]).unwrap();
        let t2 = t.without_unit(1).unwrap();
        assert_eq!(t2.m(), 2);
        assert_eq!(t2.labels(), ["a".to_string(), "c".to_string()]);
        assert_eq!(t2.response().values()[1].lower(), 2.0);
    }
}
