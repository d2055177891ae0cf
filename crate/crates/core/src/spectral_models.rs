//! Operators presented by explicit spectral data.
//!
//! A `SpectralModel` carries the decreasing singular-value function
//! μ_t, its integral F(t) = ∫_0^t μ_s ds, the distribution function
//! λ_u = #{singular values > u}, and trace evaluations τ(f(T)) as sums or
//! integrals over the spectral data. Four presentations are supported:
//!
//! * `closed_form_mu`  — μ given by an expression in t;
//! * `integrated_form` — F given by an expression (μ is its derivative);
//! * `diagonal_sequence` — μ_n given by an expression in n, or a finite list;
//! * `matrix`          — a dense matrix, reduced to singular values by SVD.
//!
//! Infinite models must declare a tail law μ_t ≤ c(1+t)^(-q) for t ≥ t0;
//! every infinite sum or integral here is truncated only against that law,
//! with Euler–Maclaurin corrections so that exponents s arbitrarily close to
//! the summability abscissa stay computable. Trace integrals substitute
//! logarithmic variables and evaluate expressions in sign/log form, so the
//! effective spectral parameter may exceed f64 range (e.g. t = e^(10^8) in
//! zeta tails near the abscissa).

use crate::error::{Error, Result};
use crate::expr::ParsedExpr;
use crate::grid::LogGrid;
use crate::lognum::LogNum;
use crate::quad::{adaptive_gl32, gl32_integrate};
use crate::tail::{d1, d3, Kahan};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Relative accuracy contract for F(t).
pub const F_REL_TOL: f64 = 1e-10;
/// Terms below this (relative) size are truncated in spectral sums.
pub const TERM_CUTOFF: f64 = 1e-18;

const X_KNOT_MAX: usize = 700; // cumulative tables cover t up to e^700
const N_ENUM: usize = 1 << 18; // diagonal prefix-sum length
const N_HEAD: usize = 10_000; // direct part of zeta sums
const N_HEAT: usize = 4096; // direct part of heat sums
const N_WEIGHT: usize = 1 << 18; // window for weight mean/centered sums

/// Asymptotic bound μ_t ≤ c (1+t)^(-q) for t ≥ t0.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct TailLaw {
    pub c: f64,
    pub q: f64,
    pub t0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    ClosedFormMu,
    IntegratedForm,
    DiagonalSequence,
    Matrix,
}

#[derive(Debug, Clone)]
enum DiagSeq {
    Expr {
        mu: ParsedExpr,
        head: Vec<f64>,
        prefix: Vec<f64>,
        /// Cumulative ∫ μ(x) dx from N_ENUM, tabulated at x = e^y for
        /// integer y-knots starting at ln(N_ENUM).
        int_knots: Vec<f64>,
    },
    List {
        vals: Vec<f64>,
        prefix: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
enum ModelData {
    ClosedForm {
        mu: ParsedExpr,
        /// F(e^k - 1) for k = 0..=X_KNOT_MAX.
        f_knots: Vec<f64>,
    },
    Integrated {
        f: ParsedExpr,
    },
    Diagonal(DiagSeq),
    Matrix {
        svals: Vec<f64>,
    },
}

/// Bounded diagonal weight a_n, with the split data used for trace sums:
/// a_n = mean + centered part, the centered prefix sums staying bounded.
#[derive(Debug, Clone)]
struct WeightData {
    expr: ParsedExpr,
    mean: f64,
    /// max_m |sum_{n<=m} (a_n - mean)| over the sampled window.
    prefix_bound: f64,
}

#[derive(Debug, Clone)]
pub struct SpectralModel {
    kind: ModelKind,
    data: ModelData,
    tail_law: Option<TailLaw>,
    weight: Option<WeightData>,
    grid_hint: Option<(f64, f64)>,
    band_windows: Option<usize>,
}

/// Parameters of the Marcinkiewicz ideal: p, the norm estimate, and the
/// comparison constants used by the μ^p and distribution checks.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdealParams {
    pub p: f64,
    pub norm_estimate: f64,
    /// Constant K with ∫_0^t μ_s^p ds ≤ K^p ∫_0^t (1+s)^(-p) ds.
    pub k_constant: f64,
    /// Constant C for the distribution bound λ_{1/t} ≤ C t log t.
    pub c_constant: f64,
}

/// ψ_p(t): identity below 1, t^(1-1/p) above. The p = 1 ideal norm uses
/// log(1+t) instead, as a separate named case.
pub fn psi_p(p: f64, t: f64) -> f64 {
    if t <= 1.0 {
        t
    } else {
        t.powf(1.0 - 1.0 / p)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdealNormReport {
    pub params: IdealParams,
    pub in_ideal: bool,
    /// Best constant in μ_t ≤ C/t over the grid.
    pub small_ideal_c: f64,
    pub small_ideal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubmajorizationReport {
    pub holds: bool,
    pub max_violation: f64,
    pub at_t: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma21Report {
    /// Worst ratio of ∫_0^t μ^p over K^p ∫_0^t (1+s)^(-p), over the grid.
    pub worst_ratio: f64,
    pub worst_p: f64,
    pub worst_t: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma23Report {
    /// Smallest grid t from which λ_{1/t} ≤ C t log t holds at all later
    /// grid points; None if never satisfied on the grid.
    pub holds_from: Option<f64>,
    pub max_t_tested: f64,
}

// ---------------------------------------------------------------------------
// JSON model files
// ---------------------------------------------------------------------------

fn default_schema_version() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridHint {
    pub t_min: f64,
    pub t_max: f64,
}

/// On-disk model description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_law: Option<TailLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_expression: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridHint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_windows: Option<usize>,
}

impl SpectralModel {
    pub fn from_json(json: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(json)?;
        Self::from_model_file(file)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_model_file(file: ModelFile) -> Result<Self> {
        if file.schema_version != 1 {
            return Err(Error::InvalidModel(format!(
                "unsupported schema_version {}",
                file.schema_version
            )));
        }
        let mut model = match file.kind {
            ModelKind::ClosedFormMu => {
                let src = file.expression.as_deref().ok_or_else(|| {
                    Error::InvalidModel("closed_form_mu requires an expression".into())
                })?;
                let tail = file.tail_law.ok_or_else(|| {
                    Error::InvalidModel("closed_form_mu requires a tail_law".into())
                })?;
                Self::closed_form(src, tail)?
            }
            ModelKind::IntegratedForm => {
                let src = file.expression.as_deref().ok_or_else(|| {
                    Error::InvalidModel("integrated_form requires an expression".into())
                })?;
                let tail = file.tail_law.ok_or_else(|| {
                    Error::InvalidModel("integrated_form requires a tail_law".into())
                })?;
                Self::integrated_form(src, tail)?
            }
            ModelKind::DiagonalSequence => {
                let src = file.expression.as_deref().ok_or_else(|| {
                    Error::InvalidModel("diagonal_sequence requires an expression".into())
                })?;
                let tail = file.tail_law.ok_or_else(|| {
                    Error::InvalidModel("diagonal_sequence requires a tail_law".into())
                })?;
                Self::diagonal(src, tail)?
            }
            ModelKind::Matrix => {
                let rows = file
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::InvalidModel("matrix kind requires matrix data".into()))?;
                Self::from_matrix_rows(rows)?
            }
        };
        if let Some(w) = file.weight_expression.as_deref() {
            model = model.with_weight(w)?;
        }
        if let Some(g) = file.grid {
            model.grid_hint = Some((g.t_min, g.t_max));
        }
        model.band_windows = file.band_windows;
        Ok(model)
    }

    // -----------------------------------------------------------------------
    // Constructors
    // -----------------------------------------------------------------------

    pub fn closed_form(mu_src: &str, tail: TailLaw) -> Result<Self> {
        let mu = ParsedExpr::parse(mu_src)?;
        validate_tail_law(&tail)?;
        // Sample checks: nonnegative, nonincreasing, tail law.
        let check = |t: f64| -> Result<f64> { mu.eval(t) };
        validate_mu_samples(&check, &tail)?;
        let f_knots = build_closed_form_f_knots(&mu)?;
        Ok(SpectralModel {
            kind: ModelKind::ClosedFormMu,
            data: ModelData::ClosedForm { mu, f_knots },
            tail_law: Some(tail),
            weight: None,
            grid_hint: None,
            band_windows: None,
        })
    }

    pub fn integrated_form(f_src: &str, tail: TailLaw) -> Result<Self> {
        let f = ParsedExpr::parse(f_src)?;
        validate_tail_law(&tail)?;
        let model = SpectralModel {
            kind: ModelKind::IntegratedForm,
            data: ModelData::Integrated { f },
            tail_law: Some(tail),
            weight: None,
            grid_hint: None,
            band_windows: None,
        };
        // μ = F' must be nonnegative and F nondecreasing on samples.
        let check = |t: f64| -> Result<f64> { model.mu_at(t) };
        validate_mu_samples(&check, &tail)?;
        Ok(model)
    }

    pub fn diagonal(mu_src: &str, tail: TailLaw) -> Result<Self> {
        let mu = ParsedExpr::parse(mu_src)?;
        validate_tail_law(&tail)?;
        // For sequences the law binds at the integer indices.
        let check = |t: f64| -> Result<f64> { mu.eval(t.floor()) };
        validate_mu_samples_at(&check, &tail, true)?;
        let mut head = Vec::with_capacity(N_HEAD);
        for n in 0..N_HEAD {
            head.push(mu.eval(n as f64)?);
        }
        let mut prefix = Vec::with_capacity(N_ENUM + 1);
        let mut acc = Kahan::default();
        prefix.push(0.0);
        for n in 0..N_ENUM {
            let v = if n < N_HEAD {
                head[n]
            } else {
                mu.eval(n as f64)?
            };
            if v < 0.0 {
                return Err(Error::InvalidModel(format!("mu({n}) = {v} is negative")));
            }
            acc.add(v);
            prefix.push(acc.value());
        }
        let int_knots = build_diagonal_int_knots(&mu)?;
        Ok(SpectralModel {
            kind: ModelKind::DiagonalSequence,
            data: ModelData::Diagonal(DiagSeq::Expr {
                mu,
                head,
                prefix,
                int_knots,
            }),
            tail_law: Some(tail),
            weight: None,
            grid_hint: None,
            band_windows: None,
        })
    }

    /// Finite diagonal model from explicit singular values.
    pub fn from_singular_values(mut vals: Vec<f64>) -> Result<Self> {
        if vals.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidModel(
                "singular values must be finite and nonnegative".into(),
            ));
        }
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut prefix = Vec::with_capacity(vals.len() + 1);
        let mut acc = Kahan::default();
        prefix.push(0.0);
        for v in &vals {
            acc.add(*v);
            prefix.push(acc.value());
        }
        Ok(SpectralModel {
            kind: ModelKind::DiagonalSequence,
            data: ModelData::Diagonal(DiagSeq::List { vals, prefix }),
            tail_law: None,
            weight: None,
            grid_hint: None,
            band_windows: None,
        })
    }

    pub fn from_matrix_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel("matrix must be square".into()));
        }
        if n > 4096 {
            return Err(Error::InvalidModel(format!(
                "matrix dimension {n} exceeds the 4096 limit"
            )));
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let mut svals: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
        svals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut prefix = Vec::with_capacity(n + 1);
        let mut acc = Kahan::default();
        prefix.push(0.0);
        for v in &svals {
            acc.add(*v);
            prefix.push(acc.value());
        }
        Ok(SpectralModel {
            kind: ModelKind::Matrix,
            data: ModelData::Matrix { svals },
            tail_law: None,
            weight: None,
            grid_hint: None,
            band_windows: None,
        })
    }

    pub fn with_weight(mut self, weight_src: &str) -> Result<Self> {
        let expr = ParsedExpr::parse(weight_src)?;
        // Estimate the asymptotic mean and the centered prefix bound over a
        // long window; constants come out exact.
        let mut acc = Kahan::default();
        let n_probe = match &self.data {
            ModelData::Diagonal(DiagSeq::List { vals, .. }) => vals.len().max(1).min(N_WEIGHT),
            _ => N_WEIGHT,
        };
        let mut samples = Vec::with_capacity(n_probe);
        for n in 0..n_probe {
            let v = expr.eval(n as f64)?;
            if !v.is_finite() {
                return Err(Error::InvalidModel(format!("weight({n}) is not finite")));
            }
            samples.push(v);
            acc.add(v);
        }
        let mean = acc.value() / n_probe as f64;
        let mut bound: f64 = 0.0;
        let mut s = Kahan::default();
        for v in &samples {
            s.add(v - mean);
            bound = bound.max(s.value().abs());
        }
        self.weight = Some(WeightData {
            expr,
            mean,
            prefix_bound: bound,
        });
        Ok(self)
    }

    pub fn with_grid_hint(mut self, t_min: f64, t_max: f64) -> Self {
        self.grid_hint = Some((t_min, t_max));
        self
    }

    pub fn with_band_windows(mut self, windows: usize) -> Self {
        self.band_windows = Some(windows);
        self
    }

    // -----------------------------------------------------------------------
    // Accessors
    // -----------------------------------------------------------------------

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn tail_law(&self) -> Option<TailLaw> {
        self.tail_law
    }

    pub fn is_finite_rank(&self) -> bool {
        matches!(
            &self.data,
            ModelData::Diagonal(DiagSeq::List { .. }) | ModelData::Matrix { .. }
        )
    }

    pub fn has_weight(&self) -> bool {
        self.weight.is_some()
    }

    pub fn weight_mean(&self) -> Option<f64> {
        self.weight.as_ref().map(|w| w.mean)
    }

    /// Bound on the centered weight prefix sums; controls the Abel-summation
    /// remainder 2 B mu(N)^s of the centered trace sums.
    pub fn weight_prefix_bound(&self) -> Option<f64> {
        self.weight.as_ref().map(|w| w.prefix_bound)
    }

    pub fn grid_hint(&self) -> Option<(f64, f64)> {
        self.grid_hint
    }

    pub fn band_windows(&self) -> Option<usize> {
        self.band_windows
    }

    /// Summability abscissa: τ(T^s) < ∞ for s strictly above this.
    pub fn abscissa(&self) -> f64 {
        if self.is_finite_rank() {
            0.0
        } else {
            self.tail_law.map(|t| 1.0 / t.q).unwrap_or(0.0)
        }
    }

    // -----------------------------------------------------------------------
    // mu, F, distribution, cutoff
    // -----------------------------------------------------------------------

    /// t-th generalized singular value. For diagonal/matrix kinds this is the
    /// (⌊t⌋+1)-th largest singular value.
    pub fn mu_at(&self, t: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::Domain(format!("mu_at requires t >= 0, got {t}")));
        }
        match &self.data {
            ModelData::ClosedForm { mu, .. } => {
                let v = mu.eval(t)?;
                if v < 0.0 {
                    return Err(Error::Domain(format!("mu({t}) = {v} is negative")));
                }
                Ok(v)
            }
            ModelData::Integrated { .. } => {
                let h = self.integrated_h_of_x(t.ln_1p())?;
                Ok((h / (1.0 + t)).max(0.0))
            }
            ModelData::Diagonal(seq) => {
                let n = t.floor();
                match seq {
                    DiagSeq::Expr { mu, head, .. } => {
                        if (n as usize) < head.len() {
                            Ok(head[n as usize])
                        } else {
                            Ok(mu.eval(n)?)
                        }
                    }
                    DiagSeq::List { vals, .. } => {
                        Ok(vals.get(n as usize).copied().unwrap_or(0.0))
                    }
                }
            }
            ModelData::Matrix { svals } => {
                Ok(svals.get(t.floor() as usize).copied().unwrap_or(0.0))
            }
        }
    }

    /// F(t) = ∫_0^t μ_s ds, absolute error ≤ 1e-10 (1 + F(t)).
    pub fn integral_mu(&self, t: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::Domain(format!("integral_mu requires t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        match &self.data {
            ModelData::ClosedForm { mu, f_knots } => {
                let x = t.ln_1p();
                if x >= X_KNOT_MAX as f64 {
                    return Err(Error::Domain(format!("t = {t} beyond the F table range")));
                }
                let k = x.floor() as usize;
                let part = gl32_integrate(|u| closed_form_h(mu, u), k as f64, x);
                Ok(f_knots[k] + part)
            }
            ModelData::Integrated { .. } => self.integrated_f_of_x(t.ln_1p()),
            ModelData::Diagonal(seq) => self.diagonal_f(seq, t),
            ModelData::Matrix { svals } => {
                let n = (t.floor() as usize).min(svals.len());
                let head: f64 = svals[..n].iter().sum();
                let frac = if n < svals.len() { t - n as f64 } else { 0.0 };
                Ok(head + frac * svals.get(n).copied().unwrap_or(0.0))
            }
        }
    }

    /// λ_u: count (with multiplicity) of singular values strictly greater
    /// than u; generalized inverse of μ for continuous kinds.
    pub fn distribution_at(&self, u: f64) -> Result<f64> {
        if u <= 0.0 || !u.is_finite() {
            return Err(Error::Domain(format!("distribution_at requires u > 0, got {u}")));
        }
        match &self.data {
            ModelData::ClosedForm { .. } | ModelData::Integrated { .. } => {
                if self.mu_at(0.0)? <= u {
                    return Ok(0.0);
                }
                // Bisection on x = ln(1+s); μ is nonincreasing.
                let mut lo = 0.0f64;
                let mut hi = 1.0f64;
                let x_cap = (X_KNOT_MAX - 2) as f64;
                while self.mu_at(hi.exp_m1())? > u {
                    hi *= 2.0;
                    if hi > x_cap {
                        hi = x_cap;
                        if self.mu_at(hi.exp_m1())? > u {
                            return Err(Error::Domain(format!(
                                "distribution_at({u}): level set extends beyond representable range"
                            )));
                        }
                        break;
                    }
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.mu_at(mid.exp_m1())? > u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-14 * hi.max(1.0) {
                        break;
                    }
                }
                Ok((0.5 * (lo + hi)).exp_m1())
            }
            ModelData::Diagonal(seq) => match seq {
                DiagSeq::Expr { mu, head, .. } => {
                    let mu_n = |n: f64| -> Result<f64> {
                        if n >= 0.0 && n < head.len() as f64 {
                            Ok(head[n as usize])
                        } else {
                            mu.eval(n)
                        }
                    };
                    if mu_n(0.0)? <= u {
                        return Ok(0.0);
                    }
                    // Invariant: mu(lo) > u >= mu(hi); answer is the smallest
                    // integer with mu <= u, which equals the count of larger
                    // singular values.
                    let mut lo = 0.0f64;
                    let mut hi = 1.0f64;
                    while mu_n(hi)? > u {
                        lo = hi;
                        hi *= 2.0;
                        if hi > 1e306 {
                            return Err(Error::Domain(format!(
                                "distribution_at({u}) overflows the index range"
                            )));
                        }
                    }
                    while hi - lo > 1.0 {
                        let mid = (0.5 * (lo + hi)).floor();
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        if mu_n(mid)? > u {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    Ok(hi)
                }
                DiagSeq::List { vals, .. } => {
                    Ok(vals.partition_point(|v| *v > u) as f64)
                }
            },
            ModelData::Matrix { svals } => Ok(svals.partition_point(|v| *v > u) as f64),
        }
    }

    /// τ(T χ_(u,∞)(T)) = ∫_0^{λ_u} μ_s ds, with the direct spectral sum as a
    /// built-in consistency check where the spectrum is enumerable.
    pub fn cutoff_trace(&self, u: f64) -> Result<f64> {
        let lambda = self.distribution_at(u)?;
        let val = self.integral_mu(lambda)?;
        // Identity check against the direct sum when cheap (prefix range).
        match &self.data {
            ModelData::Diagonal(DiagSeq::Expr { prefix, .. }) => {
                let n = lambda as usize;
                if n < prefix.len() {
                    let direct = prefix[n];
                    if (val - direct).abs() > 1e-9 * (1.0 + direct.abs()) {
                        return Err(Error::Inconsistent(format!(
                            "cutoff_trace({u}): F(lambda) = {val} vs direct sum {direct}"
                        )));
                    }
                }
            }
            ModelData::Diagonal(DiagSeq::List { prefix, .. }) => {
                let n = (lambda as usize).min(prefix.len() - 1);
                let direct = prefix[n];
                if (val - direct).abs() > 1e-9 * (1.0 + direct.abs()) {
                    return Err(Error::Inconsistent(format!(
                        "cutoff_trace({u}): F(lambda) = {val} vs direct sum {direct}"
                    )));
                }
            }
            _ => {}
        }
        Ok(val)
    }

    // -----------------------------------------------------------------------
    // Ideal norms and the distribution lemmas
    // -----------------------------------------------------------------------

    /// sup of F(t)/log(1+t) (p = 1) or F(t)/ψ_p(t) (p > 1) over the grid,
    /// with growth detection, plus the small-ideal constant sup t μ_t.
    pub fn ideal_norm(&self, p: f64, grid: &LogGrid) -> Result<IdealNormReport> {
        if p < 1.0 {
            return Err(Error::Domain(format!("ideal_norm requires p >= 1, got {p}")));
        }
        if grid.decades() < 12.0 {
            return Err(Error::Domain(format!(
                "ideal_norm requires a grid covering >= 12 decades, got {:.1}",
                grid.decades()
            )));
        }
        let pts = grid.points();
        let mut sup: f64 = 0.0;
        let mut small_sup: f64 = 0.0;
        let mut decade_vals = Vec::new();
        let mut small_decade_vals = Vec::new();
        let per_decade = grid.points_per_decade;
        for (i, &t) in pts.iter().enumerate() {
            let f = self.integral_mu(t)?;
            let denom = if p == 1.0 { t.ln_1p() } else { psi_p(p, t) };
            let ratio = if denom > 0.0 { f / denom } else { 0.0 };
            sup = sup.max(ratio);
            let tm = t * self.mu_at(t)?;
            small_sup = small_sup.max(tm);
            if i % per_decade == 0 {
                decade_vals.push(ratio);
                small_decade_vals.push(tm);
            }
        }
        let in_ideal = !diverging(&decade_vals);
        let small_ideal = !diverging(&small_decade_vals);
        Ok(IdealNormReport {
            params: IdealParams {
                p,
                norm_estimate: sup,
                k_constant: sup,
                c_constant: 1.05 * sup,
            },
            in_ideal,
            small_ideal_c: small_sup,
            small_ideal,
        })
    }

    /// Worst ratio of ∫_0^t μ_s^p ds against K^p ∫_0^t (1+s)^(-p) ds over a
    /// log grid, for each p in `p_grid` (the μ^p comparison bound).
    pub fn lemma21_check(&self, k: f64, p_grid: &[f64], grid: &LogGrid) -> Result<Lemma21Report> {
        let mut worst = Lemma21Report {
            worst_ratio: 0.0,
            worst_p: 0.0,
            worst_t: 0.0,
            holds: true,
        };
        for &p in p_grid {
            if p < 1.0 {
                return Err(Error::Domain(format!("lemma21_check requires p >= 1, got {p}")));
            }
            let powered = self.power(p)?;
            for &t in &grid.points() {
                let lhs = powered.integral_mu(t)?;
                let rhs = k.powf(p) * integral_inv_power(t, p);
                let ratio = lhs / rhs;
                if ratio > worst.worst_ratio {
                    worst.worst_ratio = ratio;
                    worst.worst_p = p;
                    worst.worst_t = t;
                }
            }
        }
        worst.holds = worst.worst_ratio <= 1.0 + 1e-9;
        Ok(worst)
    }

    /// Smallest grid t from which λ_{1/t} ≤ C t log t holds for all larger
    /// grid points.
    pub fn lemma23_check(&self, c: f64, grid: &LogGrid) -> Result<Lemma23Report> {
        let pts: Vec<f64> = grid.points().into_iter().filter(|t| *t > 1.0).collect();
        let mut holds_from = None;
        for &t in pts.iter().rev() {
            let lam = self.distribution_at(1.0 / t)?;
            if lam <= c * t * t.ln() {
                holds_from = Some(t);
            } else {
                break;
            }
        }
        Ok(Lemma23Report {
            holds_from,
            max_t_tested: pts.last().copied().unwrap_or(0.0),
        })
    }

    /// F_self(t) ≤ F_other(t) + 1e-12 at every grid point.
    pub fn submajorizes(&self, other: &SpectralModel, grid: &[f64]) -> Result<SubmajorizationReport> {
        let mut rep = SubmajorizationReport {
            holds: true,
            max_violation: 0.0,
            at_t: 0.0,
        };
        for &t in grid {
            let a = self.integral_mu(t)?;
            let b = other.integral_mu(t)?;
            let viol = a - b;
            if viol > rep.max_violation {
                rep.max_violation = viol;
                rep.at_t = t;
            }
        }
        rep.holds = rep.max_violation <= 1e-12;
        Ok(rep)
    }

    /// Model with singular-value function μ^p.
    pub fn power(&self, p: f64) -> Result<SpectralModel> {
        if p <= 0.0 {
            return Err(Error::Domain(format!("power requires p > 0, got {p}")));
        }
        let tail = self.tail_law.map(|t| TailLaw {
            c: t.c.powf(p),
            q: t.q * p,
            t0: t.t0,
        });
        match &self.data {
            ModelData::ClosedForm { mu, .. } => {
                SpectralModel::closed_form(&format!("({})^{}", mu.src, p), tail.unwrap())
            }
            ModelData::Diagonal(DiagSeq::Expr { mu, .. }) => {
                SpectralModel::diagonal(&format!("({})^{}", mu.src, p), tail.unwrap())
            }
            ModelData::Diagonal(DiagSeq::List { vals, .. }) => {
                SpectralModel::from_singular_values(vals.iter().map(|v| v.powf(p)).collect())
            }
            ModelData::Matrix { svals } => {
                SpectralModel::from_singular_values(svals.iter().map(|v| v.powf(p)).collect())
            }
            ModelData::Integrated { .. } => Err(Error::Domain(
                "powering an integrated_form model is not supported".into(),
            )),
        }
    }

    // -----------------------------------------------------------------------
    // Zeta and heat traces
    // -----------------------------------------------------------------------

    /// τ(T^s) = Σ μ_n^s (diagonal) or ∫_0^∞ μ_t^s dt (continuous kinds).
    pub fn zeta(&self, s: f64) -> Result<f64> {
        let abscissa = self.abscissa();
        if s <= abscissa {
            return Err(Error::Divergent {
                what: format!("zeta({s})"),
                abscissa,
            });
        }
        match &self.data {
            ModelData::Matrix { svals } => {
                Ok(svals.iter().filter(|v| **v > 0.0).map(|v| v.powf(s)).sum())
            }
            ModelData::Diagonal(DiagSeq::List { vals, .. }) => {
                Ok(vals.iter().filter(|v| **v > 0.0).map(|v| v.powf(s)).sum())
            }
            ModelData::Diagonal(DiagSeq::Expr { mu, head, .. }) => {
                let mut acc = Kahan::default();
                for v in head {
                    acc.add(v.powf(s));
                }
                let g = |x: f64| -> f64 { mu.eval(x).map(|v| v.powf(s)).unwrap_or(f64::NAN) };
                let a = N_HEAD as f64;
                // EM from N_HEAD: ∫ + g/2 - g'/12 + g'''/720. The integral
                // ∫_a^∞ μ(x)^s dx is taken in v = ln x, where the heavy power
                // tail becomes exp-linear; the panel integrator then handles
                // the remaining slow decay in its own log variable.
                let ln_big_g = |v: f64| -> f64 {
                    match mu.eval_log(LogNum::from_ln(v)) {
                        Ok(m) if m.is_positive() => {
                            // Grouped so that ln mu + v cancels exactly for
                            // 1/n-type tails; the residual (s-1) ln mu term is
                            // then small and multiplies cleanly.
                            let lm = m.ln_abs();
                            (lm + v) + (s - 1.0) * lm
                        }
                        _ => f64::NEG_INFINITY,
                    }
                };
                let integral = log_panel_integral(&ln_big_g, a.ln())?;
                let tail =
                    integral + 0.5 * g(a) - d1(&g, a, 1.0) / 12.0 + d3(&g, a, 1.0) / 720.0;
                Ok(acc.value() + tail)
            }
            ModelData::ClosedForm { mu, .. } => {
                // ∫_0^∞ μ_t^s dt = ∫_0^∞ h(x)^s e^{-(s-1)x} dx, x = ln(1+t).
                let ln_integrand = |x: f64| s * ln_closed_form_h(mu, x) - (s - 1.0) * x;
                let head = gl32_integrate(|x| ln_integrand(x).exp(), 0.0, 0.5)
                    + gl32_integrate(|x| ln_integrand(x).exp(), 0.5, 1.0);
                let tail = log_panel_integral(&ln_integrand, 1.0)?;
                Ok(head + tail)
            }
            ModelData::Integrated { .. } => {
                let ln_integrand = |x: f64| {
                    let h = self.integrated_h_of_x(x).unwrap_or(0.0);
                    if h <= 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        s * h.ln() - (s - 1.0) * x
                    }
                };
                let head = gl32_integrate(|x| ln_integrand(x).exp(), 0.0, 0.5)
                    + gl32_integrate(|x| ln_integrand(x).exp(), 0.5, 1.0);
                let tail = log_panel_integral(&ln_integrand, 1.0)?;
                Ok(head + tail)
            }
        }
    }

    /// τ(A T^s) for the diagonal weight a_n = mean + centered part: the mean
    /// rides on ζ(s) and the centered sum stays bounded by Abel summation
    /// against the bounded centered prefix sums.
    pub fn zeta_weighted(&self, s: f64) -> Result<f64> {
        let w = self
            .weight
            .as_ref()
            .ok_or_else(|| Error::Domain("zeta_weighted requires a trace_weight".into()))?;
        let expr = w.expr.clone();
        let mean = w.mean;
        self.weight_split_sum(s, &move |n, _| expr.eval(n), mean)
    }

    /// τ((b^(1/2) T b^(1/2))^s) for the diagonal weight b: the compression of
    /// a diagonal model is diagonal with entries b_n μ_n, so this is
    /// Σ (b_n μ_n)^s = Σ b_n^s μ_n^s.
    pub fn zeta_compressed(&self, s: f64) -> Result<f64> {
        let w = self
            .weight
            .as_ref()
            .ok_or_else(|| Error::Domain("zeta_compressed requires a trace_weight".into()))?;
        let expr = w.expr.clone();
        let mean_s = self.window_mean(&|n| Ok(expr.eval(n)?.powf(s)))?;
        self.weight_split_sum(s, &move |n, _| Ok(expr.eval(n)?.powf(s)), mean_s)
    }

    /// Σ (b_n - b_n^s) μ_n^s: the compression residue numerator, computed in
    /// one pass so the two near-cancelling traces share their samples.
    pub fn zeta_weight_gap(&self, s: f64) -> Result<f64> {
        let w = self
            .weight
            .as_ref()
            .ok_or_else(|| Error::Domain("zeta_weight_gap requires a trace_weight".into()))?;
        let expr = w.expr.clone();
        let diff = move |n: f64, _s: f64| -> Result<f64> {
            let b = expr.eval(n)?;
            Ok(b - b.powf(s))
        };
        let mean = self.window_mean(&|n| diff(n, s))?;
        self.weight_split_sum(s, &diff, mean)
    }

    /// Mean of a per-index functional over the weight window.
    fn window_mean(&self, f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
        let n_probe = match &self.data {
            ModelData::Diagonal(DiagSeq::List { vals, .. }) => vals.len().max(1),
            ModelData::Matrix { svals } => svals.len().max(1),
            _ => N_WEIGHT,
        };
        let mut acc = Kahan::default();
        for n in 0..n_probe {
            acc.add(f(n as f64)?);
        }
        Ok(acc.value() / n_probe as f64)
    }

    /// Σ_n w(n, s) μ_n^s as mean·ζ(s) plus the centered window sum. For
    /// finite models the sum is exact.
    fn weight_split_sum(
        &self,
        s: f64,
        w: &dyn Fn(f64, f64) -> Result<f64>,
        mean: f64,
    ) -> Result<f64> {
        match &self.data {
            ModelData::Diagonal(DiagSeq::List { vals, .. }) => {
                let mut acc = Kahan::default();
                for (n, v) in vals.iter().enumerate() {
                    if *v > 0.0 {
                        acc.add(w(n as f64, s)? * v.powf(s));
                    }
                }
                Ok(acc.value())
            }
            ModelData::Matrix { svals } => {
                let mut acc = Kahan::default();
                for (n, v) in svals.iter().enumerate() {
                    if *v > 0.0 {
                        acc.add(w(n as f64, s)? * v.powf(s));
                    }
                }
                Ok(acc.value())
            }
            ModelData::Diagonal(DiagSeq::Expr { mu, head, .. }) => {
                let zeta = self.zeta(s)?;
                let mut acc = Kahan::default();
                for (n, m) in head.iter().enumerate() {
                    acc.add((w(n as f64, s)? - mean) * m.powf(s));
                }
                for n in head.len()..N_WEIGHT {
                    let m = mu.eval(n as f64)?;
                    acc.add((w(n as f64, s)? - mean) * m.powf(s));
                }
                Ok(mean * zeta + acc.value())
            }
            _ => Err(Error::Domain(
                "weighted traces require a diagonal model".into(),
            )),
        }
    }

    /// τ(exp(-λ^(-2/p) T^(-2))), the kernel of T contributing zero.
    pub fn heat_trace(&self, lambda: f64, p: f64) -> Result<f64> {
        if lambda <= 0.0 {
            return Err(Error::Domain(format!("heat_trace requires lambda > 0, got {lambda}")));
        }
        if p < 1.0 {
            return Err(Error::Domain(format!("heat_trace requires p >= 1, got {p}")));
        }
        let a = lambda.powf(-2.0 / p);
        let term = |m: f64| -> f64 {
            if m <= 0.0 {
                0.0
            } else {
                (-a / (m * m)).exp()
            }
        };
        match &self.data {
            ModelData::Matrix { svals } => Ok(svals.iter().map(|v| term(*v)).sum()),
            ModelData::Diagonal(DiagSeq::List { vals, .. }) => {
                Ok(vals.iter().map(|v| term(*v)).sum())
            }
            ModelData::Diagonal(DiagSeq::Expr { mu, head, .. }) => {
                let mut acc = Kahan::default();
                for v in head.iter().take(N_HEAT) {
                    acc.add(term(*v));
                }
                let g = |x: f64| -> f64 { term(mu.eval(x).unwrap_or(0.0)) };
                let a0 = N_HEAT as f64;
                if g(a0) < TERM_CUTOFF * acc.value().max(1.0) {
                    return Ok(acc.value());
                }
                let x_cut = find_heat_cutoff(&g, a0)?;
                let integral = adaptive_gl32(&g, a0, x_cut, 1e-11, 1e-18);
                let tail =
                    integral + 0.5 * g(a0) - d1(&g, a0, 1.0) / 12.0 + d3(&g, a0, 1.0) / 720.0;
                Ok(acc.value() + tail)
            }
            ModelData::ClosedForm { mu, .. } => {
                let g = |t: f64| -> f64 { term(mu.eval(t).unwrap_or(0.0)) };
                let x_cut = find_heat_cutoff(&g, 1.0)?;
                Ok(adaptive_gl32(&g, 0.0, x_cut, 1e-11, 1e-18))
            }
            ModelData::Integrated { .. } => {
                let g = |t: f64| -> f64 { term(self.mu_at(t).unwrap_or(0.0)) };
                let x_cut = find_heat_cutoff(&g, 1.0)?;
                Ok(adaptive_gl32(&g, 0.0, x_cut, 1e-9, 1e-15))
            }
        }
    }

    /// τ(A exp(-λ^(-2/p) T^(-2))) for the diagonal weight a_n.
    pub fn heat_trace_weighted(&self, lambda: f64, p: f64) -> Result<f64> {
        let w = self
            .weight
            .as_ref()
            .ok_or_else(|| Error::Domain("heat_trace_weighted requires a trace_weight".into()))?;
        let base = self.heat_trace(lambda, p)?;
        let a = lambda.powf(-2.0 / p);
        let term = |m: f64| -> f64 {
            if m <= 0.0 {
                0.0
            } else {
                (-a / (m * m)).exp()
            }
        };
        match &self.data {
            ModelData::Diagonal(DiagSeq::Expr { mu, head, .. }) => {
                let mut acc = Kahan::default();
                for (n, m) in head.iter().enumerate() {
                    acc.add((w.expr.eval(n as f64)? - w.mean) * term(*m));
                }
                for n in head.len()..N_WEIGHT {
                    let m = mu.eval(n as f64)?;
                    let t = term(m);
                    if t < 1e-20 {
                        break;
                    }
                    acc.add((w.expr.eval(n as f64)? - w.mean) * t);
                }
                Ok(w.mean * base + acc.value())
            }
            ModelData::Diagonal(DiagSeq::List { vals, .. }) => {
                let mut acc = Kahan::default();
                for (n, v) in vals.iter().enumerate() {
                    acc.add(w.expr.eval(n as f64)? * term(*v));
                }
                Ok(acc.value())
            }
            ModelData::Matrix { svals } => {
                let mut acc = Kahan::default();
                for (n, v) in svals.iter().enumerate() {
                    acc.add(w.expr.eval(n as f64)? * term(*v));
                }
                Ok(acc.value())
            }
            _ => Err(Error::Domain(
                "weighted traces require a diagonal model".into(),
            )),
        }
    }

    // -----------------------------------------------------------------------
    // Internals
    // -----------------------------------------------------------------------

    fn integrated_f_of_x(&self, x: f64) -> Result<f64> {
        let f = match &self.data {
            ModelData::Integrated { f } => f,
            _ => unreachable!(),
        };
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x < 690.0 {
            f.eval(x.exp_m1())
        } else {
            let t = LogNum::from_ln(x);
            Ok(f.eval_log(t)?.to_f64())
        }
    }

    /// dF/dx at x = ln(1+t); equals (1+t) μ_t. The step scales with x so the
    /// difference stays above the f64 resolution of F at huge arguments.
    fn integrated_h_of_x(&self, x: f64) -> Result<f64> {
        let d = (1e-9 * x).max(1e-5);
        let lo = (x - d).max(0.0);
        Ok((self.integrated_f_of_x(x + d)? - self.integrated_f_of_x(lo)?) / (x + d - lo))
    }

    fn diagonal_f(&self, seq: &DiagSeq, t: f64) -> Result<f64> {
        match seq {
            DiagSeq::List { vals, prefix } => {
                let n = (t.floor() as usize).min(vals.len());
                let frac = if n < vals.len() { t - n as f64 } else { 0.0 };
                Ok(prefix[n] + frac * vals.get(n).copied().unwrap_or(0.0))
            }
            DiagSeq::Expr {
                mu,
                head,
                prefix,
                int_knots,
            } => {
                let nf = t.floor();
                let mu_at_n = |n: f64| -> Result<f64> {
                    if n >= 0.0 && n < head.len() as f64 {
                        Ok(head[n as usize])
                    } else {
                        mu.eval(n)
                    }
                };
                if nf < (prefix.len() - 1) as f64 {
                    let n = nf as usize;
                    return Ok(prefix[n] + (t - nf) * mu_at_n(nf)?);
                }
                // Euler–Maclaurin for sum_{n=N_ENUM}^{m} mu(n), m = floor(t) - 1.
                let a = (prefix.len() - 1) as f64;
                let m = nf - 1.0;
                let middle = if m < a {
                    0.0
                } else {
                    let integral = self.diagonal_integral(int_knots, mu, a, m)?;
                    let ga = mu_at_n(a)?;
                    let gm = mu_at_n(m)?;
                    let h_a = 1.0;
                    let h_m = (1e-9 * m).max(1.0);
                    let g = |x: f64| mu.eval(x).unwrap_or(f64::NAN);
                    integral
                        + 0.5 * (ga + gm)
                        + (d1(&g, m, h_m) - d1(&g, a, h_a)) / 12.0
                        - (d3(&g, m, h_m) - d3(&g, a, h_a)) / 720.0
                };
                Ok(prefix[prefix.len() - 1] + middle + (t - nf) * mu_at_n(nf)?)
            }
        }
    }

    /// ∫_a^m μ(x) dx using the tabulated cumulative integral in y = ln x.
    fn diagonal_integral(
        &self,
        int_knots: &[f64],
        mu: &ParsedExpr,
        a: f64,
        m: f64,
    ) -> Result<f64> {
        if m <= a {
            return Ok(0.0);
        }
        let y0 = a.ln();
        let y = m.ln();
        let k = ((y - y0).floor() as usize).min(int_knots.len() - 1);
        let part = gl32_integrate(
            |yy| diag_h_of_y(mu, yy),
            y0 + k as f64,
            y,
        );
        Ok(int_knots[k] + part)
    }
}

/// h(x) = (1+t) μ_t at x = ln(1+t); uses log-space evaluation when t
/// overflows f64.
fn closed_form_h(mu: &ParsedExpr, x: f64) -> f64 {
    ln_closed_form_h_opt(mu, x).map(|l| l.exp()).unwrap_or(0.0)
}

fn ln_closed_form_h(mu: &ParsedExpr, x: f64) -> f64 {
    ln_closed_form_h_opt(mu, x).unwrap_or(f64::NEG_INFINITY)
}

fn ln_closed_form_h_opt(mu: &ParsedExpr, x: f64) -> Option<f64> {
    if x < 300.0 {
        let t = x.exp_m1();
        let v = mu.eval(t).ok()?;
        if v <= 0.0 {
            return None;
        }
        Some(v.ln() + x)
    } else {
        // ln t = x + ln(1 - e^{-x}); the correction is below resolution here.
        let t = LogNum::from_ln(x);
        let v = mu.eval_log(t).ok()?;
        if !v.is_positive() {
            return None;
        }
        Some(v.ln_abs() + x)
    }
}

/// μ(e^y) e^y as an integrand in y = ln x for diagonal index integrals.
fn diag_h_of_y(mu: &ParsedExpr, y: f64) -> f64 {
    match mu.eval_log(LogNum::from_ln(y)) {
        Ok(v) if v.is_positive() => (v.ln_abs() + y).exp(),
        _ => 0.0,
    }
}

fn build_closed_form_f_knots(mu: &ParsedExpr) -> Result<Vec<f64>> {
    let mut knots = Vec::with_capacity(X_KNOT_MAX + 1);
    let mut acc = Kahan::default();
    knots.push(0.0);
    for k in 0..X_KNOT_MAX {
        let v = gl32_integrate(|x| closed_form_h(mu, x), k as f64, (k + 1) as f64);
        if !v.is_finite() {
            return Err(Error::InvalidModel(format!(
                "F integration failed on x-panel [{k}, {}]",
                k + 1
            )));
        }
        acc.add(v);
        knots.push(acc.value());
    }
    Ok(knots)
}

fn build_diagonal_int_knots(mu: &ParsedExpr) -> Result<Vec<f64>> {
    let y0 = (N_ENUM as f64).ln();
    let panels = (X_KNOT_MAX as f64 - y0).ceil() as usize;
    let mut knots = Vec::with_capacity(panels + 1);
    let mut acc = Kahan::default();
    knots.push(0.0);
    for k in 0..panels {
        let v = gl32_integrate(
            |y| diag_h_of_y(mu, y),
            y0 + k as f64,
            y0 + (k + 1) as f64,
        );
        if !v.is_finite() {
            return Err(Error::InvalidModel(format!(
                "index integration failed on y-panel {k}"
            )));
        }
        acc.add(v);
        knots.push(acc.value());
    }
    Ok(knots)
}

/// ∫_{u0}^∞ exp(ln_f(u)) du by unit Gauss–Legendre panels in v = ln u,
/// stopping when the integrand has dropped 130 e-folds below its running
/// peak. Handles both slowly decaying power tails (the peak sits far out)
/// and localized bumps.
fn log_panel_integral(ln_f: &dyn Fn(f64) -> f64, u0: f64) -> Result<f64> {
    assert!(u0 > 0.0);
    let v0 = u0.ln();
    let mut acc = Kahan::default();
    let mut peak = f64::NEG_INFINITY;
    for j in 0..3000usize {
        let a = v0 + j as f64;
        let b = a + 1.0;
        let mut panel_max = f64::NEG_INFINITY;
        let val = gl32_integrate(
            |v| {
                let e = ln_f(v.exp()) + v;
                if e > panel_max {
                    panel_max = e;
                }
                if e < -745.0 {
                    0.0
                } else {
                    e.exp()
                }
            },
            a,
            b,
        );
        if !val.is_finite() {
            return Err(Error::Domain(format!(
                "tail integrand overflowed on panel [{a}, {b}]"
            )));
        }
        acc.add(val);
        peak = peak.max(panel_max);
        if panel_max < peak - 130.0 || panel_max == f64::NEG_INFINITY {
            return Ok(acc.value());
        }
    }
    Err(Error::Domain(
        "tail integral did not converge within the panel budget".into(),
    ))
}

/// Doubling search for the point where the heat integrand is negligible.
fn find_heat_cutoff(g: &dyn Fn(f64) -> f64, from: f64) -> Result<f64> {
    let mut x = from.max(1.0);
    for _ in 0..80 {
        if g(x) < 1e-24 {
            return Ok(x);
        }
        x *= 2.0;
    }
    Err(Error::Domain(
        "heat-trace integrand does not decay within the search range".into(),
    ))
}

/// ∫_0^t (1+s)^(-p) ds in closed form.
pub fn integral_inv_power(t: f64, p: f64) -> f64 {
    if (p - 1.0).abs() < 1e-12 {
        t.ln_1p()
    } else {
        ((1.0 + t).powf(1.0 - p) - 1.0) / (1.0 - p)
    }
}

fn validate_tail_law(tail: &TailLaw) -> Result<()> {
    if !(tail.c > 0.0 && tail.q > 0.0 && tail.t0 >= 0.0) {
        return Err(Error::InvalidModel(format!(
            "tail_law must have c > 0, q > 0, t0 >= 0; got {tail:?}"
        )));
    }
    Ok(())
}

fn validate_mu_samples(mu: &dyn Fn(f64) -> Result<f64>, tail: &TailLaw) -> Result<()> {
    validate_mu_samples_at(mu, tail, false)
}

fn validate_mu_samples_at(
    mu: &dyn Fn(f64) -> Result<f64>,
    tail: &TailLaw,
    integer_points: bool,
) -> Result<()> {
    // Nonnegative and nonincreasing over a wide log grid.
    let grid = LogGrid::new(1e-2, 1e12, 5).points();
    let mut prev = f64::INFINITY;
    for &t in &grid {
        let v = mu(t)?;
        if v < -1e-12 {
            return Err(Error::InvalidModel(format!("mu({t}) = {v} is negative")));
        }
        if v > prev + 1e-9 * (1.0 + prev.abs()) {
            return Err(Error::InvalidModel(format!(
                "mu is increasing near t = {t}: {prev} -> {v}"
            )));
        }
        prev = v;
    }
    // Tail law at 64 log-spaced points in [t0, t0 * 1e12]. For sequence
    // models both sides are evaluated at the integer index.
    let start = tail.t0.max(1e-2);
    for &t in &LogGrid::new(start, start * 1e12, 6).points()[..64] {
        let t_eff = if integer_points { t.floor().max(0.0) } else { t };
        let v = mu(t_eff)?;
        let bound = tail.c * (1.0 + t_eff).powf(-tail.q);
        if v > bound * (1.0 + 1e-9) {
            return Err(Error::InvalidModel(format!(
                "tail law violated at t = {t_eff}: mu = {v} > {bound}"
            )));
        }
    }
    Ok(())
}

fn diverging(decade_vals: &[f64]) -> bool {
    if decade_vals.len() < 5 {
        return false;
    }
    let last = &decade_vals[decade_vals.len() - 4..];
    let increasing = last.windows(2).all(|w| w[1] > w[0] * (1.0 + 1e-9));
    increasing && last[3] > last[0] * 1.2
}
