//! File formats: interval tables as CSV, fitted models and study
//! configurations as flat `key = value` text, and CSV report writers.
//!
//! # Table format
//!
//! CSV with a header row. Column 1 holds the unit label; every interval
//! variable `V` contributes an adjacent column pair `V_lb`, `V_ub`. Decimal
//! separator is `.`, encoding UTF-8. Bounds must satisfy `V_lb ≤ V_ub` on
//! every row. Numbers are written with the shortest representation that
//! round-trips, so `write` followed by `read` reproduces a table exactly.
//!
//! # Model and config format
//!
//! One `key = value` pair per line; blank lines and `#` comments are
//! ignored. Model files carry coefficients with 17 significant digits, which
//! round-trips `f64` exactly: a written model predicts identically after
//! re-reading. Unknown or duplicate keys are errors in both formats.

use std::collections::HashSet;
use std::path::Path;

use crate::baselines::{predict_baseline, BaselineMethod, BaselineModel, PredictedBounds};
use crate::error::{DsdError, Result};
use crate::interval::{Interval, IntervalVariable, SymbolicTable};
use crate::metrics::{FitReport, MethodTag};
use crate::model::{self, FittedDsdModel, LinearForm};
use crate::sim::{
    CellError, LinearityLevel, StudyConfig, StudyKind, StudyReport, VariabilitySpec,
    DEFAULT_MICRODATA, DEFAULT_REPLICATIONS,
};
use crate::solver::DsdCoefficients;

// ---------------------------------------------------------------------------
// Interval tables
// ---------------------------------------------------------------------------

/// One variable as read from a table file, bounds untyped.
#[derive(Debug, Clone, PartialEq)]
pub struct RawVariable {
    pub name: String,
    pub bounds: Vec<(f64, f64)>,
}

/// A parsed table file: unit labels plus variables in file order.
///
/// This is the untyped form — no variable is designated as the response
/// yet. [`RawTable::to_symbolic`] selects the roles.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub labels: Vec<String>,
    pub variables: Vec<RawVariable>,
}

fn table_err(row: usize, column: Option<&str>, message: impl Into<String>) -> DsdError {
    DsdError::TableFormat {
        row,
        column: column.map(str::to_string),
        message: message.into(),
    }
}

/// Parses a table from raw file bytes.
///
/// Errors name the offending data row (1-based) and, where it applies, the
/// column. Never panics on malformed input.
pub fn parse_table_bytes(bytes: &[u8]) -> Result<RawTable> {
    let bytes = bytes.strip_prefix(b"\xef\xbb\xbf").unwrap_or(bytes);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);

    let headers = reader
        .headers()
        .map_err(|e| table_err(0, None, format!("unreadable header: {e}")))?
        .clone();
    if headers.len() < 3 || headers.len() % 2 == 0 {
        return Err(table_err(
            0,
            None,
            format!(
                "header must be a unit-label column followed by _lb/_ub pairs; \
                 found {} columns",
                headers.len()
            ),
        ));
    }
    let mut names = Vec::new();
    let mut seen = HashSet::new();
    for k in 0..(headers.len() - 1) / 2 {
        let lb = &headers[1 + 2 * k];
        let ub = &headers[2 + 2 * k];
        let base = lb.strip_suffix("_lb").ok_or_else(|| {
            table_err(0, Some(lb), "expected a column name ending in _lb")
        })?;
        let base_ub = ub.strip_suffix("_ub").ok_or_else(|| {
            table_err(0, Some(ub), "expected a column name ending in _ub")
        })?;
        if base.is_empty() {
            return Err(table_err(0, Some(lb), "empty variable name"));
        }
        if base != base_ub {
            return Err(table_err(
                0,
                Some(ub),
                format!("column pair mismatch: {lb} next to {ub}"),
            ));
        }
        if !seen.insert(base.to_string()) {
            return Err(table_err(0, Some(lb), format!("duplicate variable {base}")));
        }
        names.push(base.to_string());
    }

    let mut labels: Vec<String> = Vec::new();
    let mut bounds: Vec<Vec<(f64, f64)>> = vec![Vec::new(); names.len()];
    let mut seen_labels = HashSet::new();
    for (j0, record) in reader.records().enumerate() {
        let row = j0 + 1;
        let record = record.map_err(|e| table_err(row, None, format!("{e}")))?;
        if record.len() != headers.len() {
            return Err(table_err(
                row,
                None,
                format!(
                    "ragged row: expected {} fields, found {}",
                    headers.len(),
                    record.len()
                ),
            ));
        }
        let label = record[0].trim();
        if label.is_empty() {
            return Err(table_err(row, None, "empty unit label"));
        }
        if !seen_labels.insert(label.to_string()) {
            return Err(table_err(row, None, format!("duplicate unit label {label}")));
        }
        labels.push(label.to_string());
        for (k, name) in names.iter().enumerate() {
            let parse = |idx: usize, col: String| -> Result<f64> {
                let cell = record[idx].trim();
                let v: f64 = cell.parse().map_err(|_| {
                    table_err(row, Some(&col), format!("non-numeric value {cell:?}"))
                })?;
                if !v.is_finite() {
                    return Err(table_err(row, Some(&col), format!("non-finite value {cell:?}")));
                }
                Ok(v)
            };
            let l = parse(1 + 2 * k, format!("{name}_lb"))?;
            let u = parse(2 + 2 * k, format!("{name}_ub"))?;
            if l > u {
                return Err(table_err(
                    row,
                    Some(&format!("{name}_ub")),
                    format!("lower bound {l} exceeds upper bound {u}"),
                ));
            }
            bounds[k].push((l, u));
        }
    }
    if labels.is_empty() {
        return Err(table_err(0, None, "table has no data rows"));
    }
    Ok(RawTable {
        labels,
        variables: names
            .into_iter()
            .zip(bounds)
            .map(|(name, bounds)| RawVariable { name, bounds })
            .collect(),
    })
}

impl RawTable {
    pub fn m(&self) -> usize {
        self.labels.len()
    }

    fn variable(&self, name: &str) -> Result<&RawVariable> {
        self.variables.iter().find(|v| v.name == name).ok_or_else(|| {
            let known: Vec<&str> = self.variables.iter().map(|v| v.name.as_str()).collect();
            DsdError::InvalidArgument(format!(
                "variable {name:?} not in table (available: {})",
                known.join(", ")
            ))
        })
    }

    fn interval_variable(&self, name: &str) -> Result<IntervalVariable> {
        let raw = self.variable(name)?;
        let values = raw
            .bounds
            .iter()
            .zip(&self.labels)
            .map(|(&(l, u), label)| {
                Interval::with_context(l, u, format!("{name} of unit {label}"))
            })
            .collect::<Result<_>>()?;
        IntervalVariable::new(name, values)
    }

    /// Selects a response and predictors to build a typed table.
    ///
    /// With `predictors = None` every non-response variable becomes a
    /// predictor, in file order.
    pub fn to_symbolic(
        &self,
        response: &str,
        predictors: Option<&[String]>,
    ) -> Result<SymbolicTable> {
        let resp = self.interval_variable(response)?;
        let explicatives = match predictors {
            Some(names) => names
                .iter()
                .map(|n| {
                    if n == response {
                        return Err(DsdError::InvalidArgument(format!(
                            "{n:?} cannot be both response and predictor"
                        )));
                    }
                    self.interval_variable(n)
                })
                .collect::<Result<Vec<_>>>()?,
            None => self
                .variables
                .iter()
                .filter(|v| v.name != response)
                .map(|v| self.interval_variable(&v.name))
                .collect::<Result<Vec<_>>>()?,
        };
        SymbolicTable::new(self.labels.clone(), resp, explicatives)
    }
}

/// Reads a table file without assigning variable roles.
pub fn read_raw_table(path: impl AsRef<Path>) -> Result<RawTable> {
    parse_table_bytes(&std::fs::read(path)?)
}

/// Reads a table file and designates `response`; remaining variables (or
/// the explicit `predictors` list) become predictors.
pub fn read_table(
    path: impl AsRef<Path>,
    response: &str,
    predictors: Option<&[String]>,
) -> Result<SymbolicTable> {
    read_raw_table(path)?.to_symbolic(response, predictors)
}

/// Serializes a table: unit labels first, then the response pair, then each
/// predictor pair. Numbers use the shortest round-trip representation.
pub fn table_to_csv_string(table: &SymbolicTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["unit".to_string()];
    for v in std::iter::once(table.response()).chain(table.explicatives()) {
        header.push(format!("{}_lb", v.name()));
        header.push(format!("{}_ub", v.name()));
    }
    w.write_record(&header)?;
    for (j, label) in table.labels().iter().enumerate() {
        let mut rec = vec![label.clone()];
        for v in std::iter::once(table.response()).chain(table.explicatives()) {
            let iv = v.values()[j];
            rec.push(format!("{}", iv.lower()));
            rec.push(format!("{}", iv.upper()));
        }
        w.write_record(&rec)?;
    }
    finish_csv(w)
}

pub fn write_table(table: &SymbolicTable, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, table_to_csv_string(table)?)?;
    Ok(())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| DsdError::InvalidData(format!("csv buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| DsdError::InvalidData(format!("csv encoding: {e}")))
}

// ---------------------------------------------------------------------------
// Flat key = value parsing (models and study configs)
// ---------------------------------------------------------------------------

fn parse_kv(text: &str, err: fn(String) -> DsdError) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("line {}: expected `key = value`, got {line:?}", i + 1)))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(err(format!("line {}: empty key", i + 1)));
        }
        if !seen.insert(key.clone()) {
            return Err(err(format!("line {}: duplicate key {key:?}", i + 1)));
        }
        pairs.push((key, value));
    }
    Ok(pairs)
}

struct KvMap {
    pairs: Vec<(String, String)>,
    used: HashSet<String>,
    err: fn(String) -> DsdError,
}

impl KvMap {
    fn new(text: &str, err: fn(String) -> DsdError) -> Result<Self> {
        Ok(KvMap {
            pairs: parse_kv(text, err)?,
            used: HashSet::new(),
            err,
        })
    }

    fn optional(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.optional(key)
            .ok_or_else(|| (self.err)(format!("missing key {key:?}")))
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.required(key)?;
        self.parse_as(key, &v)
    }

    fn parse_as<T: std::str::FromStr>(&self, key: &str, v: &str) -> Result<T> {
        v.parse()
            .map_err(|_| (self.err)(format!("key {key:?}: cannot parse {v:?}")))
    }

    fn finite(&mut self, key: &str) -> Result<f64> {
        let v: f64 = self.number(key)?;
        if !v.is_finite() {
            return Err((self.err)(format!("key {key:?}: non-finite value")));
        }
        Ok(v)
    }

    fn list<T: std::str::FromStr>(&self, key: &str, v: &str) -> Result<Vec<T>> {
        v.split(',')
            .map(|s| self.parse_as(key, s.trim()))
            .collect()
    }

    fn finish(self) -> Result<()> {
        for (k, _) in &self.pairs {
            if !self.used.contains(k) {
                return Err((self.err)(format!("unknown key {k:?}")));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

/// A fitted model in serializable form.
///
/// `dsd` is present for the DSD method; baselines carry the linear forms
/// they use (`center`/`range` for CRM and CCRM, `center` alone for CM,
/// `lower`/`upper` for MinMax). `range` is the fit of the full range
/// `u − l`, matching how CRM and CCRM are reported.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub method: MethodTag,
    pub response: String,
    pub predictors: Vec<String>,
    pub m: usize,
    pub omega: f64,
    pub dsd: Option<DsdCoefficients>,
    pub center: Option<LinearForm>,
    pub range: Option<LinearForm>,
    pub lower: Option<LinearForm>,
    pub upper: Option<LinearForm>,
}

impl ModelFile {
    pub fn p(&self) -> usize {
        self.predictors.len()
    }

    pub fn from_dsd(fit: &FittedDsdModel) -> Self {
        ModelFile {
            method: MethodTag::Dsd,
            response: fit.response_name.clone(),
            predictors: fit.predictor_names.clone(),
            m: fit.predicted.len(),
            omega: fit.omega,
            dsd: Some(fit.coefficients.clone()),
            center: None,
            range: None,
            lower: None,
            upper: None,
        }
    }

    pub fn from_baseline(fit: &BaselineModel, m: usize, omega: f64) -> Self {
        ModelFile {
            method: match fit.method {
                BaselineMethod::Cm => MethodTag::Cm,
                BaselineMethod::MinMax => MethodTag::MinMax,
                BaselineMethod::Crm => MethodTag::Crm,
                BaselineMethod::Ccrm => MethodTag::Ccrm,
            },
            response: fit.response_name.clone(),
            predictors: fit.predictor_names.clone(),
            m,
            omega,
            dsd: None,
            center: fit.center_fit.clone(),
            range: fit.range_fit.clone(),
            lower: fit.lower_fit.clone(),
            upper: fit.upper_fit.clone(),
        }
    }

    fn to_baseline(&self) -> Result<BaselineModel> {
        let method = match self.method {
            MethodTag::Cm => BaselineMethod::Cm,
            MethodTag::MinMax => BaselineMethod::MinMax,
            MethodTag::Crm => BaselineMethod::Crm,
            MethodTag::Ccrm => BaselineMethod::Ccrm,
            MethodTag::Dsd => {
                return Err(DsdError::InvalidArgument(
                    "not a baseline model".into(),
                ))
            }
        };
        Ok(BaselineModel {
            method,
            response_name: self.response.clone(),
            predictor_names: self.predictors.clone(),
            center_fit: self.center.clone(),
            range_fit: self.range.clone(),
            lower_fit: self.lower.clone(),
            upper_fit: self.upper.clone(),
        })
    }

    /// Predicts bounds for every unit of `table`, matching predictors by
    /// name.
    pub fn predict_table(&self, table: &RawTable) -> Result<Vec<PredictedBounds>> {
        let vars = self
            .predictors
            .iter()
            .map(|n| table.interval_variable(n))
            .collect::<Result<Vec<_>>>()?;
        let rows = (0..table.m())
            .map(|j| vars.iter().map(|v| v.values()[j]).collect::<Vec<_>>());
        match self.method {
            MethodTag::Dsd => {
                let coeffs = self
                    .dsd
                    .as_ref()
                    .ok_or_else(|| DsdError::ModelFormat("missing DSD coefficients".into()))?;
                rows.map(|row| Ok(model::predict_interval(coeffs, &row)?.into()))
                    .collect()
            }
            _ => {
                let baseline = self.to_baseline()?;
                rows.map(|row| predict_baseline(&baseline, &row)).collect()
            }
        }
    }
}

fn push_form(out: &mut String, prefix: &str, form: &LinearForm) {
    out.push_str(&format!("{prefix}_intercept = {:.16e}\n", form.intercept));
    for (k, s) in form.slopes.iter().enumerate() {
        out.push_str(&format!("{prefix}_slope_{} = {s:.16e}\n", k + 1));
    }
}

/// Serializes a model as flat `key = value` text with 17-significant-digit
/// coefficients (exact `f64` round-trip).
pub fn model_to_string(model: &ModelFile) -> String {
    let mut out = String::new();
    out.push_str(&format!("method = {}\n", model.method.name()));
    out.push_str(&format!("response = {}\n", model.response));
    out.push_str(&format!("predictors = {}\n", model.predictors.join(",")));
    out.push_str(&format!("m = {}\n", model.m));
    out.push_str(&format!("p = {}\n", model.p()));
    out.push_str(&format!("omega = {:.16e}\n", model.omega));
    if let Some(c) = &model.dsd {
        for (k, a) in c.alphas.iter().enumerate() {
            out.push_str(&format!("alpha_{} = {a:.16e}\n", k + 1));
        }
        for (k, b) in c.betas.iter().enumerate() {
            out.push_str(&format!("beta_{} = {b:.16e}\n", k + 1));
        }
        out.push_str(&format!("gamma = {:.16e}\n", c.gamma));
    }
    for (prefix, form) in [
        ("center", &model.center),
        ("range", &model.range),
        ("lower", &model.lower),
        ("upper", &model.upper),
    ] {
        if let Some(form) = form {
            push_form(&mut out, prefix, form);
        }
    }
    out
}

fn form_from_kv(kv: &mut KvMap, prefix: &str, p: usize) -> Result<Option<LinearForm>> {
    let Some(int) = kv.optional(&format!("{prefix}_intercept")) else {
        // Mark slope keys as used only when the block exists; an orphan
        // slope without its intercept is an unknown-key error.
        return Ok(None);
    };
    let intercept: f64 = kv.parse_as(&format!("{prefix}_intercept"), &int)?;
    let mut slopes = Vec::with_capacity(p);
    for k in 1..=p {
        let key = format!("{prefix}_slope_{k}");
        let v = kv.required(&key)?;
        slopes.push(kv.parse_as(&key, &v)?);
    }
    Ok(Some(LinearForm { slopes, intercept }))
}

/// Parses a model file. Strict: unknown, duplicate, and missing keys are
/// all errors, so a file that parses predicts exactly like the model that
/// wrote it.
pub fn parse_model_str(text: &str) -> Result<ModelFile> {
    let mut kv = KvMap::new(text, DsdError::ModelFormat)?;
    let method: MethodTag = {
        let v = kv.required("method")?;
        v.parse()
            .map_err(|_| DsdError::ModelFormat(format!("unknown method {v:?}")))?
    };
    let response = kv.required("response")?;
    let predictors: Vec<String> = kv
        .required("predictors")?
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    let m: usize = kv.number("m")?;
    let p: usize = kv.number("p")?;
    if p == 0 || p != predictors.len() {
        return Err(DsdError::ModelFormat(format!(
            "p = {p} but {} predictors named",
            predictors.len()
        )));
    }
    if m == 0 {
        return Err(DsdError::ModelFormat("m must be positive".into()));
    }
    let omega = kv.finite("omega")?;

    let dsd = if method == MethodTag::Dsd {
        let mut alphas = Vec::with_capacity(p);
        let mut betas = Vec::with_capacity(p);
        for k in 1..=p {
            alphas.push(kv.finite(&format!("alpha_{k}"))?);
        }
        for k in 1..=p {
            betas.push(kv.finite(&format!("beta_{k}"))?);
        }
        let gamma = kv.finite("gamma")?;
        Some(DsdCoefficients::new(alphas, betas, gamma)?)
    } else {
        None
    };
    let center = form_from_kv(&mut kv, "center", p)?;
    let range = form_from_kv(&mut kv, "range", p)?;
    let lower = form_from_kv(&mut kv, "lower", p)?;
    let upper = form_from_kv(&mut kv, "upper", p)?;

    let ok = match method {
        MethodTag::Dsd => dsd.is_some(),
        MethodTag::Cm => center.is_some(),
        MethodTag::MinMax => lower.is_some() && upper.is_some(),
        MethodTag::Crm | MethodTag::Ccrm => center.is_some() && range.is_some(),
    };
    if !ok {
        return Err(DsdError::ModelFormat(format!(
            "method {} is missing its coefficient block",
            method.name()
        )));
    }
    kv.finish()?;
    Ok(ModelFile {
        method,
        response,
        predictors,
        m,
        omega,
        dsd,
        center,
        range,
        lower,
        upper,
    })
}

pub fn read_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    parse_model_str(&std::fs::read_to_string(path)?)
}

pub fn write_model(model: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model_to_string(model))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Study configuration files
// ---------------------------------------------------------------------------

/// Parses a study configuration from flat `key = value` text.
///
/// Required keys: `study` (1 or 2), `variability` (low/high/mixed), `m`
/// (comma-separated sample sizes), `alpha`, `beta` (comma-separated, one
/// per predictor), `gamma`; study II also requires `linearity` (low/high).
/// Optional: `p` (default: length of `alpha`), `s_a`, `s_b` (study I noise
/// grids; default full grid), `replications`, `seed`, `microdata`.
pub fn parse_config_str(text: &str) -> Result<StudyConfig> {
    let mut kv = KvMap::new(text, DsdError::ConfigFormat)?;
    let study = {
        let v = kv.required("study")?;
        match v.to_ascii_lowercase().as_str() {
            "1" | "i" => StudyKind::I,
            "2" | "ii" => StudyKind::II,
            _ => {
                return Err(DsdError::ConfigFormat(format!(
                    "key \"study\": expected 1 or 2, got {v:?}"
                )))
            }
        }
    };
    let variability = {
        let v = kv.required("variability")?;
        match v.to_ascii_lowercase().as_str() {
            "low" => VariabilitySpec::Low,
            "high" => VariabilitySpec::High,
            "mixed" => VariabilitySpec::Mixed,
            _ => {
                return Err(DsdError::ConfigFormat(format!(
                    "key \"variability\": expected low, high or mixed, got {v:?}"
                )))
            }
        }
    };
    let m_values: Vec<usize> = {
        let v = kv.required("m")?;
        kv.list("m", &v)?
    };
    let alphas: Vec<f64> = {
        let v = kv.required("alpha")?;
        kv.list("alpha", &v)?
    };
    let betas: Vec<f64> = {
        let v = kv.required("beta")?;
        kv.list("beta", &v)?
    };
    let gamma = kv.finite("gamma")?;
    if alphas.iter().chain(&betas).any(|v| !v.is_finite()) {
        return Err(DsdError::ConfigFormat("non-finite coefficient".into()));
    }
    let p = match kv.optional("p") {
        Some(v) => kv.parse_as("p", &v)?,
        None => alphas.len(),
    };
    if alphas.len() != p || betas.len() != p {
        return Err(DsdError::ConfigFormat(format!(
            "alpha and beta must each name {p} coefficients"
        )));
    }
    let truth = DsdCoefficients::new(alphas, betas, gamma)?;

    let (default_sa, default_sb) = StudyConfig::study1_default_grid();
    let s_a_values = match kv.optional("s_a") {
        Some(v) => kv.list("s_a", &v)?,
        None => default_sa,
    };
    let s_b_values = match kv.optional("s_b") {
        Some(v) => kv.list("s_b", &v)?,
        None => default_sb,
    };
    let linearity = match kv.optional("linearity") {
        Some(v) => Some(match v.to_ascii_lowercase().as_str() {
            "low" => LinearityLevel::Low,
            "high" => LinearityLevel::High,
            _ => {
                return Err(DsdError::ConfigFormat(format!(
                    "key \"linearity\": expected low or high, got {v:?}"
                )))
            }
        }),
        None => None,
    };
    if study == StudyKind::I && linearity.is_some() {
        return Err(DsdError::ConfigFormat(
            "key \"linearity\" is not used in study 1".into(),
        ));
    }
    let replications = match kv.optional("replications") {
        Some(v) => kv.parse_as("replications", &v)?,
        None => DEFAULT_REPLICATIONS,
    };
    let seed = match kv.optional("seed") {
        Some(v) => kv.parse_as("seed", &v)?,
        None => 0,
    };
    let microdata = match kv.optional("microdata") {
        Some(v) => kv.parse_as("microdata", &v)?,
        None => DEFAULT_MICRODATA,
    };
    kv.finish()?;
    Ok(StudyConfig {
        study,
        m_values,
        p,
        truth,
        variability,
        s_a_values,
        s_b_values,
        linearity,
        replications,
        seed,
        microdata,
    })
}

pub fn read_config(path: impl AsRef<Path>) -> Result<StudyConfig> {
    parse_config_str(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Report writers
// ---------------------------------------------------------------------------

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// CSV of fit quality, one row per method.
pub fn fit_reports_csv(reports: &[FitReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "omega", "rmse_m", "rmse_l", "rmse_u"])?;
    for r in reports {
        w.write_record([
            r.method.name().to_string(),
            fmt(r.omega),
            fmt(r.rmse_m),
            fmt(r.rmse_l),
            fmt(r.rmse_u),
        ])?;
    }
    finish_csv(w)
}

/// CSV of predicted bounds, one row per unit.
pub fn predictions_csv(labels: &[String], predicted: &[PredictedBounds]) -> Result<String> {
    if labels.len() != predicted.len() {
        return Err(DsdError::InvalidArgument(
            "labels and predictions differ in length".into(),
        ));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["unit", "pred_lb", "pred_ub"])?;
    for (label, p) in labels.iter().zip(predicted) {
        w.write_record([label.clone(), fmt(p.lower), fmt(p.upper)])?;
    }
    finish_csv(w)
}

/// CSV of observed vs predicted bounds, one row per unit (plot-ready).
pub fn observed_predicted_csv(
    labels: &[String],
    observed: &[Interval],
    predicted: &[PredictedBounds],
) -> Result<String> {
    if labels.len() != observed.len() || labels.len() != predicted.len() {
        return Err(DsdError::InvalidArgument(
            "labels, observations and predictions differ in length".into(),
        ));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["unit", "obs_lb", "obs_ub", "pred_lb", "pred_ub"])?;
    for ((label, o), p) in labels.iter().zip(observed).zip(predicted) {
        w.write_record([
            label.clone(),
            fmt(o.lower()),
            fmt(o.upper()),
            fmt(p.lower),
            fmt(p.upper),
        ])?;
    }
    finish_csv(w)
}

/// CSV of a study report, one row per cell.
///
/// Studies I and II share the schema: study I fills `s_a`/`s_b` and leaves
/// `linearity` empty, study II the reverse.
pub fn study_report_csv(report: &StudyReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "m".to_string(),
        "s_a".to_string(),
        "s_b".to_string(),
        "linearity".to_string(),
        "replications".to_string(),
    ];
    let first = report
        .cells
        .first()
        .ok_or_else(|| DsdError::InvalidArgument("study report has no cells".into()))?;
    for p in &first.params {
        for stat in ["mean", "sd", "bias", "mse"] {
            header.push(format!("{}_{stat}", p.name));
        }
    }
    for name in [
        "omega_mean",
        "omega_sd",
        "rmse_m_mean",
        "rmse_m_sd",
        "rmse_l_mean",
        "rmse_l_sd",
        "rmse_u_mean",
        "rmse_u_sd",
    ] {
        header.push(name.to_string());
    }
    w.write_record(&header)?;
    for cell in &report.cells {
        let (s_a, s_b, lin) = match cell.error {
            CellError::Fixed { s_a, s_b } => (fmt(s_a), fmt(s_b), String::new()),
            CellError::Linearity(level) => {
                (String::new(), String::new(), level.name().to_string())
            }
        };
        let mut rec = vec![
            cell.m.to_string(),
            s_a,
            s_b,
            lin,
            cell.replications.to_string(),
        ];
        for p in &cell.params {
            rec.push(fmt(p.mean));
            rec.push(fmt(p.sd));
            rec.push(fmt(p.bias));
            rec.push(fmt(p.mse));
        }
        for s in [cell.omega, cell.rmse_m, cell.rmse_l, cell.rmse_u] {
            rec.push(fmt(s.mean));
            rec.push(fmt(s.sd));
        }
        w.write_record(&rec)?;
    }
    finish_csv(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_csv() -> &'static str {
        "unit,y_lb,y_ub,x_lb,x_ub\n\
         a,1.5,2.5,0,1\n\
         b,-3,3,2,2\n\
         c,0.25,0.75,-1,4\n"
    }

    #[test]
    fn parses_and_selects_roles() {
        let raw = parse_table_bytes(sample_csv().as_bytes()).unwrap();
        assert_eq!(raw.m(), 3);
        assert_eq!(raw.variables.len(), 2);
        let table = raw.to_symbolic("y", None).unwrap();
        assert_eq!(table.p(), 1);
        assert_eq!(table.response().name(), "y");
        assert_eq!(table.explicatives()[0].values()[1].center(), 2.0);
    }

    #[test]
    fn round_trips_exactly() {
        let table = parse_table_bytes(sample_csv().as_bytes())
            .unwrap()
            .to_symbolic("y", None)
            .unwrap();
        let text = table_to_csv_string(&table).unwrap();
        let again = parse_table_bytes(text.as_bytes())
            .unwrap()
            .to_symbolic("y", None)
            .unwrap();
        assert_eq!(table.labels(), again.labels());
        for (a, b) in std::iter::once(table.response())
            .chain(table.explicatives())
            .zip(std::iter::once(again.response()).chain(again.explicatives()))
        {
            assert_eq!(a.name(), b.name());
            for (x, y) in a.values().iter().zip(b.values()) {
                assert_eq!(x.lower(), y.lower());
                assert_eq!(x.upper(), y.upper());
            }
        }
    }

    #[test]
    fn errors_name_row_and_column() {
        let bad = "unit,y_lb,y_ub\na,3,1\n";
        let err = parse_table_bytes(bad.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 1") && msg.contains("y_ub"), "{msg}");

        let ragged = "unit,y_lb,y_ub\na,1\n";
        let msg = parse_table_bytes(ragged.as_bytes()).unwrap_err().to_string();
        assert!(msg.contains("ragged") && msg.contains("row 1"), "{msg}");

        let nonnum = "unit,y_lb,y_ub\na,1,zap\n";
        let msg = parse_table_bytes(nonnum.as_bytes()).unwrap_err().to_string();
        assert!(msg.contains("non-numeric") && msg.contains("y_ub"), "{msg}");
    }

    #[test]
    fn rejects_malformed_headers() {
        for bad in [
            "unit,y_lb\na,1\n",
            "unit,y_lb,z_ub\na,1,2\n",
            "unit,y_ub,y_lb\na,1,2\n",
            "unit,y_lb,y_ub,y_lb,y_ub\na,1,2,3,4\n",
        ] {
            assert!(parse_table_bytes(bad.as_bytes()).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn model_file_round_trips_predictions() {
        let raw = parse_table_bytes(sample_csv().as_bytes()).unwrap();
        let table = raw.to_symbolic("y", None).unwrap();
        let fit = model::fit(&table).unwrap();
        let file = ModelFile::from_dsd(&fit);
        let parsed = parse_model_str(&model_to_string(&file)).unwrap();
        assert_eq!(file, parsed);
        let before = file.predict_table(&raw).unwrap();
        let after = parsed.predict_table(&raw).unwrap();
        for (a, b) in before.iter().zip(&after) {
            assert_eq!(a.lower, b.lower);
            assert_eq!(a.upper, b.upper);
        }
    }

    #[test]
    fn baseline_model_file_round_trips() {
        use crate::baselines::fit_baseline;
        let raw = parse_table_bytes(sample_csv().as_bytes()).unwrap();
        let table = raw.to_symbolic("y", None).unwrap();
        for method in [
            BaselineMethod::Cm,
            BaselineMethod::MinMax,
            BaselineMethod::Crm,
            BaselineMethod::Ccrm,
        ] {
            let fit = fit_baseline(&table, method).unwrap();
            let file = ModelFile::from_baseline(&fit, table.m(), 0.5);
            let parsed = parse_model_str(&model_to_string(&file)).unwrap();
            assert_eq!(file, parsed);
        }
    }

    #[test]
    fn model_parser_rejects_unknown_and_missing_keys() {
        let raw = parse_table_bytes(sample_csv().as_bytes()).unwrap();
        let fit = model::fit(&raw.to_symbolic("y", None).unwrap()).unwrap();
        let text = model_to_string(&ModelFile::from_dsd(&fit));
        assert!(parse_model_str(&format!("{text}mystery = 1\n")).is_err());
        let missing = text.replace("gamma", "gamba");
        assert!(parse_model_str(&missing).is_err());
        assert!(parse_model_str("method = dsd\n").is_err());
    }

    #[test]
    fn config_parses_with_defaults() {
        let cfg = parse_config_str(
            "study = 1\nvariability = low\nm = 10,100\nalpha = 2\nbeta = 1\ngamma = -1\n",
        )
        .unwrap();
        assert_eq!(cfg.study, StudyKind::I);
        assert_eq!(cfg.m_values, vec![10, 100]);
        assert_eq!(cfg.replications, DEFAULT_REPLICATIONS);
        assert_eq!(cfg.s_a_values.len(), 9);
        assert_eq!(cfg.s_b_values.len(), 12);

        let cfg2 = parse_config_str(
            "study = 2\nvariability = high\nm = 10,30\nalpha = 6,0,2\nbeta = 8,10,5\n\
             gamma = 3\nlinearity = high\nreplications = 7\nseed = 42\nmicrodata = 100\n",
        )
        .unwrap();
        assert_eq!(cfg2.p, 3);
        assert_eq!(cfg2.replications, 7);
        assert_eq!(cfg2.seed, 42);
    }

    #[test]
    fn config_rejects_bad_input() {
        assert!(parse_config_str("study = 3\nvariability = low\nm = 10\n").is_err());
        assert!(parse_config_str(
            "study = 1\nvariability = low\nm = 10\nalpha = 2\nbeta = 1\ngamma = -1\nwat = 1\n"
        )
        .is_err());
        assert!(parse_config_str(
            "study = 1\nvariability = low\nm = 10\nalpha = 2,3\nbeta = 1\ngamma = -1\n"
        )
        .is_err());
        // duplicate key
        assert!(parse_config_str(
            "study = 1\nstudy = 2\nvariability = low\nm = 10\nalpha = 2\nbeta = 1\ngamma = -1\n"
        )
        .is_err());
    }

    #[test]
    fn study_csv_has_stable_schema() {
        use crate::metrics::ParamStat;
        use crate::sim::{CellReport, Summary};
        let stat = |name: &str| ParamStat {
            name: name.into(),
            mean: 1.0,
            sd: 0.1,
            bias: 0.0,
            mse: 0.01,
        };
        let s = Summary { mean: 0.9, sd: 0.05 };
        let cell = |error| CellReport {
            m: 10,
            error,
            replications: 4,
            params: vec![stat("alpha_1"), stat("beta_1"), stat("gamma")],
            omega: s,
            rmse_m: s,
            rmse_l: s,
            rmse_u: s,
        };
        let report = StudyReport {
            study: StudyKind::I,
            p: 1,
            truth: DsdCoefficients::new(vec![2.0], vec![1.0], -1.0).unwrap(),
            variability: VariabilitySpec::Low,
            replications: 4,
            seed: 0,
            microdata: 10,
            cells: vec![cell(CellError::Fixed { s_a: 0.0, s_b: 1.0 })],
        };
        let text1 = study_report_csv(&report).unwrap();
        assert!(text1.starts_with("m,s_a,s_b,linearity,replications,alpha_1_mean"));
        assert!(text1.contains("\n10,0,1,,4,"));

        let mut report2 = report.clone();
        report2.study = StudyKind::II;
        report2.cells = vec![cell(CellError::Linearity(LinearityLevel::High))];
        let text2 = study_report_csv(&report2).unwrap();
        assert_eq!(
            text1.lines().next().unwrap(),
            text2.lines().next().unwrap(),
            "study I and II share one schema"
        );
        assert!(text2.contains("\n10,,,high,4,"));
    }
}
