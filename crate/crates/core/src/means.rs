//! Hardy/Cesàro mean calculus on grid functions and the limit-band
//! estimator.
//!
//! H(f)(u) = (1/u) ∫_0^u f(v) dv averages over the additive half-line;
//! M(g)(t) = (1/log t) ∫_1^t g(s) ds/s over the multiplicative one. The two
//! are intertwined by the substitution L(f) = f ∘ log. Invariant states built
//! on these means are non-constructive, so the artifact replaces ω-limits by
//! a deterministic estimator: when the data extrapolates stably the band
//! collapses to a value, otherwise a [liminf, limsup] band over tail windows
//! is reported and no value is invented.

use crate::error::{Error, Result};
use crate::quad::cumtrapz;
use crate::richardson::neville_zero;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Domain of a grid function: additive [a, ∞) sampled uniformly, or
/// multiplicative (0, ∞) sampled log-uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Additive,
    Multiplicative,
}

type SourceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A bounded function sampled on a grid, optionally backed by a closure
/// for exact re-evaluation under transforms.
#[derive(Clone)]
pub struct GridFunction {
    pub domain: Domain,
    points: Vec<f64>,
    values: Vec<f64>,
    source: Option<SourceFn>,
}

impl std::fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridFunction")
            .field("domain", &self.domain)
            .field("n", &self.points.len())
            .field("first", &self.points.first())
            .field("last", &self.points.last())
            .finish()
    }
}

impl GridFunction {
    /// Sample a closure on a uniform additive grid over [a, b].
    pub fn additive(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        a: f64,
        b: f64,
        n: usize,
    ) -> Self {
        assert!(b > a && n >= 2);
        let pts: Vec<f64> = (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect();
        let vals = pts.iter().map(|&x| f(x)).collect();
        GridFunction {
            domain: Domain::Additive,
            points: pts,
            values: vals,
            source: Some(Arc::new(f)),
        }
    }

    /// Sample a closure on a log-spaced multiplicative grid.
    pub fn multiplicative(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        t_min: f64,
        t_max: f64,
        points_per_decade: usize,
    ) -> Self {
        assert!(t_min > 0.0 && t_max > t_min);
        let grid = crate::grid::LogGrid::new(t_min, t_max, points_per_decade);
        let pts = grid.points();
        let vals = pts.iter().map(|&x| f(x)).collect();
        GridFunction {
            domain: Domain::Multiplicative,
            points: pts,
            values: vals,
            source: Some(Arc::new(f)),
        }
    }

    /// Wrap existing samples (strictly increasing points).
    pub fn from_samples(domain: Domain, points: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() || points.len() < 2 {
            return Err(Error::Domain("samples must pair up, n >= 2".into()));
        }
        if !points.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
        Ok(GridFunction {
            domain,
            points,
            values,
            source: None,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Evaluate at x: through the source closure when available, otherwise
    /// by interpolation (linear in the native coordinate), constant beyond
    /// the grid ends.
    pub fn eval(&self, x: f64) -> f64 {
        if let Some(src) = &self.source {
            return src(x);
        }
        let coord = |v: f64| match self.domain {
            Domain::Additive => v,
            Domain::Multiplicative => v.ln(),
        };
        let cx = coord(x);
        let n = self.points.len();
        if cx <= coord(self.points[0]) {
            return self.values[0];
        }
        if cx >= coord(self.points[n - 1]) {
            return self.values[n - 1];
        }
        let idx = self.points.partition_point(|&p| coord(p) < cx);
        let (x0, x1) = (coord(self.points[idx - 1]), coord(self.points[idx]));
        let (y0, y1) = (self.values[idx - 1], self.values[idx]);
        y0 + (y1 - y0) * (cx - x0) / (x1 - x0)
    }
}

// ---------------------------------------------------------------------------
// Means
// ---------------------------------------------------------------------------

/// H(f)(u) = (1/u) ∫_0^u f, on f's own grid. Below the grid start the
/// integrand is extended by the constant f(t_min), contributing an O(t_min/u)
/// error at tail windows. Trapezoid in the native variable, exact for
/// functions linear in it.
pub fn hardy_mean(f: &GridFunction) -> Result<GridFunction> {
    let pts = &f.points;
    if pts[0] < 0.0 {
        return Err(Error::Domain("hardy_mean requires a grid in [0, inf)".into()));
    }
    let cum = cumtrapz(pts, &f.values);
    let head = pts[0] * f.values[0]; // constant extension on [0, t_min]
    let mut out_pts = Vec::with_capacity(pts.len());
    let mut out_vals = Vec::with_capacity(pts.len());
    for (i, &u) in pts.iter().enumerate() {
        out_pts.push(u);
        if u <= 0.0 {
            // Continuity value H f(0+) = f(0+).
            out_vals.push(f.values[i]);
        } else {
            out_vals.push((head + cum[i]) / u);
        }
    }
    GridFunction::from_samples(f.domain, out_pts, out_vals)
}

/// M(g)(t) = (1/log t) ∫_1^t g(s) ds/s, cumulative trapezoid in log s.
/// The grid must start at or above 1; output points with log t below half a
/// grid step are dropped. A grid starting slightly above 1 is filled by
/// constant extension of the first sample.
pub fn cesaro_mean(g: &GridFunction) -> Result<GridFunction> {
    if g.domain != Domain::Multiplicative {
        return Err(Error::Domain("cesaro_mean needs a multiplicative grid".into()));
    }
    let x: Vec<f64> = g.points.iter().map(|t| t.ln()).collect();
    if x[0] < -1e-9 {
        return Err(Error::Domain(format!(
            "cesaro_mean requires t >= 1, grid starts at {}",
            g.points[0]
        )));
    }
    let cum = cumtrapz(&x, &g.values);
    let head = x[0].max(0.0) * g.values[0]; // constant extension on [0, x0]
    let mut out_pts = Vec::new();
    let mut out_vals = Vec::new();
    for (i, &xi) in x.iter().enumerate() {
        if xi <= 0.0 {
            // Continuity value: M g(t) -> g(1+) as t -> 1+. Keeping the
            // point (instead of dropping it) matters under iteration; a
            // frozen head mass would otherwise spread outward geometrically.
            out_pts.push(g.points[i]);
            out_vals.push(g.values[i]);
        } else {
            out_pts.push(g.points[i]);
            out_vals.push((head + cum[i]) / xi);
        }
    }
    if out_pts.len() < 2 {
        return Err(Error::Domain("cesaro_mean left fewer than 2 points".into()));
    }
    GridFunction::from_samples(Domain::Multiplicative, out_pts, out_vals)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// T_b(f)(x) = f(x + b), additive domain.
    Translate(f64),
    /// D_a(f)(x) = f(a x), a > 0.
    Dilate(f64),
    /// P^a(f)(x) = f(x^a), a > 0, multiplicative domain.
    Power(f64),
    /// L(f) = f ∘ log: maps an additive-domain function to a
    /// multiplicative-domain one.
    LogSubstitute,
}

/// Re-sample the transformed function on the appropriate grid.
pub fn transform(f: &GridFunction, kind: Transform) -> Result<GridFunction> {
    match kind {
        Transform::Translate(b) => {
            if f.domain != Domain::Additive {
                return Err(Error::Domain("translate acts on additive domains".into()));
            }
            let vals = f.points.iter().map(|&x| f.eval(x + b)).collect();
            GridFunction::from_samples(f.domain, f.points.clone(), vals)
        }
        Transform::Dilate(a) => {
            if a <= 0.0 {
                return Err(Error::Domain(format!("dilate requires a > 0, got {a}")));
            }
            let vals = f.points.iter().map(|&x| f.eval(a * x)).collect();
            GridFunction::from_samples(f.domain, f.points.clone(), vals)
        }
        Transform::Power(a) => {
            if a <= 0.0 {
                return Err(Error::Domain(format!("power requires a > 0, got {a}")));
            }
            if f.domain != Domain::Multiplicative {
                return Err(Error::Domain("power acts on multiplicative domains".into()));
            }
            let vals = f.points.iter().map(|&x| f.eval(x.powf(a))).collect();
            GridFunction::from_samples(f.domain, f.points.clone(), vals)
        }
        Transform::LogSubstitute => {
            if f.domain != Domain::Additive {
                return Err(Error::Domain(
                    "log_substitute maps additive functions to multiplicative ones".into(),
                ));
            }
            let pts: Vec<f64> = f.points.iter().map(|&x| x.exp()).collect();
            let vals = f.values.clone();
            let mut g = GridFunction::from_samples(Domain::Multiplicative, pts, vals)?;
            if let Some(src) = &f.source {
                let src = src.clone();
                g.source = Some(Arc::new(move |t: f64| src(t.ln())));
            }
            Ok(g)
        }
    }
}

/// Residuals of the asymptotic and exact mean/transform identities.
#[derive(Debug, Clone, Serialize)]
pub struct MeanIdentityReport {
    /// max |(H T_b - T_b H) f| over the last tenth of the grid.
    pub hardy_translate_tail: f64,
    /// max |(M D_a - D_a M) f| over the last decade.
    pub cesaro_dilate_tail: f64,
    /// Pointwise residual of D_a H = H D_a.
    pub dilate_hardy_exact: f64,
    /// Pointwise residual of P^a M = M P^a.
    pub power_cesaro_exact: f64,
    /// Pointwise residual of L H = M L on aligned grids.
    pub intertwine_exact: f64,
}

/// Commutator residuals of H with translation by b and M with dilation by a,
/// plus the exact identities, for an additive-domain f.
pub fn mean_identity_residuals(f: &GridFunction, a: f64, b: f64) -> Result<MeanIdentityReport> {
    if f.domain != Domain::Additive {
        return Err(Error::Domain("residual check expects an additive-domain f".into()));
    }
    if a <= 0.0 {
        return Err(Error::Domain("dilation parameter must be positive".into()));
    }

    // (H T_b - T_b H) f, over the last tenth of the range on which both
    // sides stay inside the sampled grid (x + b must not run off the end).
    let tb = transform(f, Transform::Translate(b))?;
    let h_tb = hardy_mean(&tb)?;
    let hf = hardy_mean(f)?;
    let tb_h = transform(&hf, Transform::Translate(b))?;
    let x_max = f.points[f.points.len() - 1];
    let x_hi = x_max - b.max(0.0);
    let x_lo = x_hi - (x_max - f.points[0]) / 10.0;
    let mut hardy_tail: f64 = 0.0;
    for (i, &x) in h_tb.points().iter().enumerate() {
        if x >= x_lo && x <= x_hi && i < tb_h.values().len() {
            hardy_tail = hardy_tail.max((h_tb.values()[i] - tb_h.values()[i]).abs());
        }
    }

    // (M D_a - D_a M) g for g = L f on the exponential of f's grid, capped
    // so the multiplicative grid stays within f64 range.
    let f_capped = if f.points[f.points.len() - 1] > 690.0 {
        let n_keep = f.points.partition_point(|&x| x <= 690.0);
        let mut capped = GridFunction::from_samples(
            Domain::Additive,
            f.points[..n_keep].to_vec(),
            f.values[..n_keep].to_vec(),
        )?;
        capped.source = f.source.clone();
        capped
    } else {
        f.clone()
    };
    let g = transform(&f_capped, Transform::LogSubstitute)?;
    let da_g = transform(&g, Transform::Dilate(a))?;
    let m_da = cesaro_mean(&da_g)?;
    let mg = cesaro_mean(&g)?;
    let da_m = transform(&mg, Transform::Dilate(a))?;
    // Compare over the last decade on which a*t stays inside the grid.
    let t_grid_max = g.points()[g.points().len() - 1];
    let t_hi = t_grid_max / a.max(1.0);
    let t_lo = t_hi / 10.0;
    let mut cesaro_tail: f64 = 0.0;
    for (i, &t) in m_da.points().iter().enumerate() {
        if t >= t_lo && t <= t_hi {
            let other = da_m.eval(t);
            cesaro_tail = cesaro_tail.max((m_da.values()[i] - other).abs());
        }
    }

    // Exact identity: D_a H = H D_a.
    let da_f = transform(f, Transform::Dilate(a))?;
    let h_da = hardy_mean(&da_f)?;
    let da_h = transform(&hf, Transform::Dilate(a))?;
    let mut dilate_hardy: f64 = 0.0;
    // Compare where both sides stay inside the sampled range.
    for (i, &x) in h_da.points().iter().enumerate() {
        if a * x <= f.points[f.points.len() - 1] {
            dilate_hardy = dilate_hardy.max((h_da.values()[i] - da_h.values()[i]).abs());
        }
    }

    // Exact identity: P^a M = M P^a.
    let pa_g = transform(&g, Transform::Power(a))?;
    let m_pa = cesaro_mean(&pa_g)?;
    let pa_m = transform(&mg, Transform::Power(a))?;
    let mut power_cesaro: f64 = 0.0;
    for (i, &t) in m_pa.points().iter().enumerate() {
        let ta = t.powf(a);
        if ta <= g.points()[g.points().len() - 1] && ta >= mg.points()[0] {
            power_cesaro = power_cesaro.max((m_pa.values()[i] - pa_m.eval(t)).abs());
        }
    }

    // Exact identity: L H = M L on the aligned grid.
    let hf_capped = hardy_mean(&f_capped)?;
    let lh = transform(&hf_capped, Transform::LogSubstitute)?;
    let ml = cesaro_mean(&g)?;
    let mut intertwine: f64 = 0.0;
    for (i, &t) in ml.points().iter().enumerate() {
        intertwine = intertwine.max((ml.values()[i] - lh.eval(t)).abs());
    }

    Ok(MeanIdentityReport {
        hardy_translate_tail: hardy_tail,
        cesaro_dilate_tail: cesaro_tail,
        dilate_hardy_exact: dilate_hardy,
        power_cesaro_exact: power_cesaro,
        intertwine_exact: intertwine,
    })
}

// ---------------------------------------------------------------------------
// Limit bands
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandMethod {
    /// Tail-window statistics only, no extrapolation.
    RawTail,
    /// Richardson in 1/log t (log-spaced grids).
    RichardsonLog,
    /// Richardson in 1/r (geometric grids).
    RichardsonR,
    /// Iterated Cesàro means until the band collapses.
    CesaroIterate,
}

impl BandMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            BandMethod::RawTail => "raw_tail",
            BandMethod::RichardsonLog => "richardson_log",
            BandMethod::RichardsonR => "richardson_r",
            BandMethod::CesaroIterate => "cesaro_iterate",
        }
    }
}

/// Estimator output: an extrapolated value when stable convergence is
/// detected, otherwise a [liminf, limsup] band over the tail windows.
#[derive(Debug, Clone, Serialize)]
pub struct LimitBand {
    pub converged: bool,
    pub value: Option<f64>,
    pub liminf_est: f64,
    pub limsup_est: f64,
    pub band_width: f64,
    pub method: BandMethod,
    pub windows: String,
}

impl LimitBand {
    pub fn overlaps(&self, other: &LimitBand, slack: f64) -> bool {
        self.liminf_est <= other.limsup_est + slack
            && other.liminf_est <= self.limsup_est + slack
    }

    /// Representative value: the extrapolated one, or the band midpoint.
    pub fn midpoint(&self) -> f64 {
        self.value
            .unwrap_or(0.5 * (self.liminf_est + self.limsup_est))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BandPolicy {
    pub method: BandMethod,
    /// Number of one-decade tail windows for the band extrema; capped by the
    /// grid span.
    pub windows: usize,
    pub tol: f64,
    /// Minimum grid span in decades.
    pub min_decades: f64,
}

impl BandPolicy {
    pub fn new(method: BandMethod, tol: f64) -> Self {
        BandPolicy {
            method,
            windows: 3,
            tol,
            min_decades: 6.0,
        }
    }

    pub fn with_windows(mut self, w: usize) -> Self {
        self.windows = w;
        self
    }
}

/// Estimate the limit of samples (coordinate, value), coordinates strictly
/// increasing. Convergence requires the Richardson extrapolant in the
/// method's small parameter to be stable under dropping the newest and the
/// oldest probe, with combined spread at most tol/2; the converged band is
/// the extrapolation uncertainty, so the value always lies inside it.
/// Non-converged bands are min/max over the last `windows` one-decade
/// windows.
pub fn limit_band(points: &[f64], values: &[f64], policy: &BandPolicy) -> Result<LimitBand> {
    if points.len() != values.len() || points.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "limit_band needs at least 4 samples, got {}",
            points.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("limit_band requires finite samples".into()));
    }
    let decades = (points[points.len() - 1] / points[0]).log10();
    if decades < policy.min_decades - 1e-9 {
        return Err(Error::InsufficientData(format!(
            "limit_band needs >= {} decades, got {decades:.2}",
            policy.min_decades
        )));
    }

    // Tail-window extrema.
    let w_decades = (policy.windows as f64).min(decades);
    let cut = points[points.len() - 1] / 10f64.powf(w_decades);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (p, v) in points.iter().zip(values) {
        if *p >= cut {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    let windows_desc = format!(
        "{}x1-decade windows ending at {:.3e}",
        w_decades.ceil() as usize,
        points[points.len() - 1]
    );

    match policy.method {
        BandMethod::RawTail => {
            let last_cut = points[points.len() - 1] / 10.0;
            let tail: Vec<f64> = points
                .iter()
                .zip(values)
                .filter(|(p, _)| **p >= last_cut)
                .map(|(_, v)| *v)
                .collect();
            let mean = tail.iter().sum::<f64>() / tail.len() as f64;
            let spread = hi - lo;
            let converged = spread <= policy.tol;
            Ok(LimitBand {
                converged,
                value: converged.then_some(mean),
                liminf_est: if converged { mean - spread } else { lo },
                limsup_est: if converged { mean + spread } else { hi },
                band_width: spread,
                method: policy.method,
                windows: windows_desc,
            })
        }
        BandMethod::RichardsonLog | BandMethod::RichardsonR => {
            let (xi, probes, alias_err) = if policy.method == BandMethod::RichardsonLog {
                // Decade-aligned probes can alias with log-periodic data, so
                // a half-decade-shifted probe set must agree.
                let (xi_a, f_a) = decade_probes(points, values, 8, 1.0);
                let (xi_b, f_b) = decade_probes(points, values, 8, 10f64.sqrt());
                let ex_a = neville_zero(&xi_a, &f_a);
                let ex_b = neville_zero(&xi_b, &f_b);
                (xi_a, f_a, (ex_a.value - ex_b.value).abs())
            } else {
                // Geometric grids: all samples, with the decay order fitted
                // from consecutive differences so fractional-power tails
                // (e.g. heat traces of trace-class models) extrapolate clean.
                let mut xi: Vec<f64> = points.iter().map(|p| 1.0 / p).collect();
                if let Some(alpha) = fit_decay_order(&xi, values) {
                    for x in &mut xi {
                        *x = x.powf(alpha);
                    }
                }
                (xi, values.to_vec(), 0.0)
            };
            let full = neville_zero(&xi, &probes);
            let drop_new = neville_zero(&xi[..xi.len() - 1], &probes[..probes.len() - 1]);
            let drop_old = neville_zero(&xi[1..], &probes[1..]);
            let err = full
                .err
                .max((full.value - drop_new.value).abs())
                .max((full.value - drop_old.value).abs())
                .max(alias_err);
            let converged = err <= 0.5 * policy.tol;
            if converged {
                Ok(LimitBand {
                    converged: true,
                    value: Some(full.value),
                    liminf_est: full.value - err,
                    limsup_est: full.value + err,
                    band_width: 2.0 * err,
                    method: policy.method,
                    windows: windows_desc,
                })
            } else {
                Ok(LimitBand {
                    converged: false,
                    value: None,
                    liminf_est: lo,
                    limsup_est: hi,
                    band_width: hi - lo,
                    method: policy.method,
                    windows: windows_desc,
                })
            }
        }
        BandMethod::CesaroIterate => Err(Error::Domain(
            "cesaro_iterate runs through limit_band_fn on a GridFunction".into(),
        )),
    }
}

/// limit_band on a GridFunction; for CesaroIterate the Cesàro mean is applied
/// repeatedly (up to 40 times) until the raw tail band collapses below tol.
pub fn limit_band_fn(f: &GridFunction, policy: &BandPolicy) -> Result<LimitBand> {
    match policy.method {
        BandMethod::CesaroIterate => {
            if f.domain != Domain::Multiplicative {
                return Err(Error::Domain("cesaro_iterate needs a multiplicative grid".into()));
            }
            // Apply M repeatedly until the spread over the last HALF of the
            // grid has collapsed and the tail mean has stopped drifting
            // between iterations. Narrow tail windows alone stop at false
            // plateaus; extrapolation cannot see the slow phases at all.
            // Transient humps travel through the grid under iteration and can
            // fake both conditions for an iteration or two, so the stop
            // requires a three-iteration hold.
            let mut g = f.clone();
            let mut prev_mean = f64::INFINITY;
            let mut iterations = 0usize;
            let mut hold = 0usize;
            loop {
                let pts = g.points();
                let vals = g.values();
                let half_cut = (pts[0].max(1.0) * pts[pts.len() - 1]).sqrt();
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for (p, v) in pts.iter().zip(vals) {
                    if *p >= half_cut {
                        lo = lo.min(*v);
                        hi = hi.max(*v);
                    }
                }
                let mean = tail_mean(pts, vals);
                let drift = (mean - prev_mean).abs();
                if hi - lo <= policy.tol && drift <= policy.tol {
                    hold += 1;
                } else {
                    hold = 0;
                }
                if hold >= 3 {
                    let err = (hi - lo).max(drift);
                    return Ok(LimitBand {
                        converged: true,
                        value: Some(mean),
                        liminf_est: mean - err,
                        limsup_est: mean + err,
                        band_width: 2.0 * err,
                        method: BandMethod::CesaroIterate,
                        windows: format!("half-grid window after {iterations} Cesaro iterations"),
                    });
                }
                if iterations >= 40 {
                    return Ok(LimitBand {
                        converged: false,
                        value: None,
                        liminf_est: lo,
                        limsup_est: hi,
                        band_width: hi - lo,
                        method: BandMethod::CesaroIterate,
                        windows: format!("half-grid window after {iterations} Cesaro iterations"),
                    });
                }
                prev_mean = mean;
                g = cesaro_mean(&g)?;
                iterations += 1;
            }
        }
        _ => limit_band(f.points(), f.values(), policy),
    }
}

/// Mean over the last decade of samples.
fn tail_mean(points: &[f64], values: &[f64]) -> f64 {
    let cut = points[points.len() - 1] / 10.0;
    let tail: Vec<f64> = points
        .iter()
        .zip(values)
        .filter(|(p, _)| **p >= cut)
        .map(|(_, v)| *v)
        .collect();
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// Probe samples at the decade boundaries nearest (grid end)/shift (up to
/// `max_probes`), with ξ = 1/ln t.
fn decade_probes(
    points: &[f64],
    values: &[f64],
    max_probes: usize,
    shift: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut xi = Vec::new();
    let mut fv = Vec::new();
    let last = points[points.len() - 1] / shift;
    let decades = (last / points[0]).log10().floor() as usize;
    let n_probe = decades.min(max_probes - 1);
    let mut prev_idx = usize::MAX;
    for k in (0..=n_probe).rev() {
        let target = last / 10f64.powi(k as i32);
        let idx = points.partition_point(|&p| p < target * (1.0 - 1e-12));
        let idx = idx.min(points.len() - 1);
        if idx == prev_idx {
            continue;
        }
        prev_idx = idx;
        let t = points[idx];
        xi.push(1.0 / t.ln());
        fv.push(values[idx]);
    }
    (xi, fv)
}

/// Fit the leading decay order of f - lim f from consecutive differences on
/// a geometric ξ-grid: d_k/d_{k+1} → (ξ_k/ξ_{k+1})^α. Returns a fractional α
/// when the last ratios agree tightly and are genuinely non-polynomial.
fn fit_decay_order(xi: &[f64], f: &[f64]) -> Option<f64> {
    let n = f.len();
    if n < 8 {
        return None;
    }
    let sigma = xi[n - 1] / xi[n - 2];
    if !(0.01..0.999).contains(&sigma) {
        return None;
    }
    // Require a uniform ratio grid.
    for k in 1..n {
        if ((xi[k] / xi[k - 1]) / sigma - 1.0).abs() > 1e-9 {
            return None;
        }
    }
    let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut alphas = Vec::new();
    for k in (n - 7)..(n - 1) {
        let d0 = f[k] - f[k - 1];
        let d1 = f[k + 1] - f[k];
        if d0.abs() < 1e-12 * scale || d1.abs() < 1e-12 * scale {
            return None; // already at the noise floor: plain Neville is fine
        }
        let rho = d1 / d0;
        if rho <= 1e-3 || rho >= 0.999 {
            return None; // growing, oscillating, or not settling
        }
        alphas.push(rho.ln() / sigma.ln());
    }
    let mean = alphas.iter().sum::<f64>() / alphas.len() as f64;
    if alphas.iter().any(|a| (a - mean).abs() > 0.02 * mean.abs().max(0.1)) {
        return None;
    }
    // Near-integer orders are already polynomial in ξ.
    if (mean - mean.round()).abs() < 0.02 || mean <= 0.05 || mean > 8.0 {
        return None;
    }
    Some(mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardy_and_cesaro_fix_constants_exactly() {
        let f = GridFunction::multiplicative(|_| 4.25, 1e-2, 1e8, 32);
        let h = hardy_mean(&f).unwrap();
        for v in h.values() {
            assert!((v - 4.25).abs() < 1e-12);
        }
        let g = GridFunction::multiplicative(|_| 4.25, 1.0, 1e8, 32);
        let m = cesaro_mean(&g).unwrap();
        for v in m.values() {
            assert!((v - 4.25).abs() < 1e-12);
        }
    }

    #[test]
    fn hardy_of_identity_is_half() {
        // f(u) = u has H(f)(u) = u/2 exactly (trapezoid exact on linear).
        let f = GridFunction::additive(|x| x, 0.0, 100.0, 2001);
        let h = hardy_mean(&f).unwrap();
        for (i, &u) in h.points().iter().enumerate() {
            assert!((h.values()[i] - u / 2.0).abs() < 1e-10 * (1.0 + u));
        }
    }

    #[test]
    fn hardy_of_sine_closed_form() {
        // H(sin)(u) = (1 - cos u)/u; at u = pi this is 2/pi = 0.6366...
        let f = GridFunction::additive(|x| x.sin(), 0.0, 10.0, 10_001);
        let h = hardy_mean(&f).unwrap();
        let target = std::f64::consts::PI;
        let idx = h.points().partition_point(|&p| p < target);
        let u = h.points()[idx];
        let expect = (1.0 - u.cos()) / u;
        assert!(
            (h.values()[idx] - expect).abs() < 1e-6,
            "{} vs {expect}",
            h.values()[idx]
        );
        assert!((expect - 2.0 / std::f64::consts::PI).abs() < 1e-3);
    }

    #[test]
    fn cesaro_closed_forms() {
        // g = log-periodic sine with period ln 100: at t = 1e8 the phase is
        // 8 pi, so M(g)(1e8) = 0 exactly; spec bound |M| <= 0.05.
        let l = 100f64.ln();
        let g = GridFunction::multiplicative(
            move |s: f64| (2.0 * std::f64::consts::PI * s.ln() / l).sin(),
            1.0,
            1e8,
            64,
        );
        let m = cesaro_mean(&g).unwrap();
        let v = m.values()[m.values().len() - 1];
        assert!(v.abs() <= 0.05, "{v}");

        // indicator of [1, e]: M(g)(t) = 1/ln t; at t = e^10 -> 0.1.
        let g = GridFunction::multiplicative(
            |s| if s <= std::f64::consts::E { 1.0 } else { 0.0 },
            1.0,
            (10.0f64).exp(),
            512,
        );
        let m = cesaro_mean(&g).unwrap();
        let v = *m.values().last().unwrap();
        assert!((v - 0.1).abs() < 2e-3, "{v}");
    }

    #[test]
    fn transform_examples() {
        // dilate a = 1 is the identity.
        let f = GridFunction::additive(|x| x * x, 0.0, 10.0, 101);
        let d = transform(&f, Transform::Dilate(1.0)).unwrap();
        for (a, b) in f.values().iter().zip(d.values()) {
            assert_eq!(a, b);
        }
        // f(x) = x^2 dilated by 3: value at x = 2 is f(6) = 36.
        let d = transform(&f, Transform::Dilate(3.0)).unwrap();
        let idx = d.points().iter().position(|&p| (p - 2.0).abs() < 1e-12).unwrap();
        assert!((d.values()[idx] - 36.0).abs() < 1e-12);
        // f = ln x under power a = 2: f(x^2) = 2 ln x; at x = e gives 2.
        let f = GridFunction::multiplicative(|x: f64| x.ln(), 1.0, 1e3, 64);
        let p = transform(&f, Transform::Power(2.0)).unwrap();
        let e = std::f64::consts::E;
        let v = p.eval(e);
        let src_check = f.eval(e * e);
        assert!((src_check - 2.0).abs() < 1e-12);
        assert!((v - 2.0).abs() < 1e-2, "{v}"); // resampled grid point nearest e
        assert!(transform(&f, Transform::Power(-1.0)).is_err());
        assert!(transform(&f, Transform::Dilate(0.0)).is_err());
    }

    #[test]
    fn identity_residuals_on_constants_vanish() {
        let f = GridFunction::additive(|_| 1.0, 0.0, 1e3, 10_000);
        let rep = mean_identity_residuals(&f, 2.0, 5.0).unwrap();
        assert!(rep.hardy_translate_tail < 1e-10, "{rep:?}");
        assert!(rep.cesaro_dilate_tail < 1e-10);
        assert!(rep.dilate_hardy_exact < 1e-10);
        assert!(rep.power_cesaro_exact < 1e-10);
        assert!(rep.intertwine_exact < 1e-10);
    }

    #[test]
    fn translate_commutator_decays_like_the_proof_bound() {
        // |(H T_b - T_b H) f| <= 2 ||f|| |b| / (t + b); at t ~ 1e4, b = 5
        // this is about 1e-3, plus quadrature error.
        let f = GridFunction::additive(|x: f64| x.sin(), 0.0, 1e4, 400_001);
        let rep = mean_identity_residuals(&f, 2.0, 5.0).unwrap();
        assert!(
            rep.hardy_translate_tail <= 2.0 * 1.0 * 5.0 / 9e3 + 1e-4,
            "{}",
            rep.hardy_translate_tail
        );
    }

    #[test]
    fn dilate_commutator_tail_vanishes() {
        // f log-periodic with period ln 4. Closed form: the (M D_a - D_a M)
        // residual is G(ln a)/ln t + O(1/ln^2 t) with
        // G(y) = (ln4 / 2 pi)(1 - cos(2 pi y / ln 4)), so it decays like
        // 1/ln t; dilating by the full period a = 4 makes G(ln a) = 0 and the
        // residual drops to the 1/ln^2 floor.
        let l4 = 4f64.ln();
        let f = GridFunction::additive(
            move |x: f64| (2.0 * std::f64::consts::PI * x / l4).sin(),
            0.0,
            (1e6f64).ln(),
            40_000,
        );
        let rep = mean_identity_residuals(&f, 2.0, 1.0).unwrap();
        let g_half_period = l4 / std::f64::consts::PI; // G(ln 2)
        let bound = g_half_period / (1e5f64).ln(); // worst t in the last decade
        assert!(
            rep.cesaro_dilate_tail <= 1.1 * bound,
            "{} vs {bound}",
            rep.cesaro_dilate_tail
        );

        let rep = mean_identity_residuals(&f, 4.0, 1.0).unwrap();
        assert!(rep.cesaro_dilate_tail <= 0.01, "{}", rep.cesaro_dilate_tail);
    }

    #[test]
    fn intertwining_on_random_functions() {
        // L H = M L pointwise to 1e-8 for a batch of random smooth functions.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let c0: f64 = rng.gen_range(-2.0..2.0);
            let c1: f64 = rng.gen_range(-1.0..1.0);
            let w1: f64 = rng.gen_range(0.3..3.0);
            let c2: f64 = rng.gen_range(-1.0..1.0);
            let w2: f64 = rng.gen_range(0.1..1.0);
            let f = GridFunction::additive(
                move |x: f64| c0 + c1 * (w1 * x).sin() + c2 * (w2 * x).cos(),
                0.0,
                30.0,
                30_001,
            );
            let rep = mean_identity_residuals(&f, 1.7, 3.0).unwrap();
            assert!(rep.intertwine_exact < 1e-8, "{}", rep.intertwine_exact);
        }
    }

    #[test]
    fn order_preservation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let base: f64 = rng.gen_range(0.0..1.0);
            let gap: f64 = rng.gen_range(0.0..0.5);
            let w: f64 = rng.gen_range(0.5..2.0);
            let f = GridFunction::multiplicative(
                move |t: f64| base + (w * t.ln()).sin() * 0.3,
                1.0,
                1e8,
                32,
            );
            let g = GridFunction::multiplicative(
                move |t: f64| base + gap + 0.61 + (w * t.ln()).sin() * 0.3,
                1.0,
                1e8,
                32,
            );
            let (hf, hg) = (hardy_mean(&f).unwrap(), hardy_mean(&g).unwrap());
            for (a, b) in hf.values().iter().zip(hg.values()) {
                assert!(a <= b);
            }
            let (mf, mg) = (cesaro_mean(&f).unwrap(), cesaro_mean(&g).unwrap());
            for (a, b) in mf.values().iter().zip(mg.values()) {
                assert!(a <= b);
            }
        }
    }

    #[test]
    fn limit_band_converges_on_log_corrections() {
        // f(t) = 1 + gamma/ln t: converged to 1.000 via richardson_log.
        let f = GridFunction::multiplicative(|t: f64| 1.0 + 0.577 / t.ln(), 1e2, 1e12, 32);
        let band = limit_band_fn(&f, &BandPolicy::new(BandMethod::RichardsonLog, 1e-3)).unwrap();
        assert!(band.converged);
        let v = band.value.unwrap();
        assert!((v - 1.0).abs() < 1e-3, "{v}");
        // Oracle: direct evaluation far out.
        let direct = 1.0 + 0.577 / (1e16f64).ln();
        assert!((v - direct).abs() < 2e-2);
        assert!(band.liminf_est <= v && v <= band.limsup_est);
        assert!(band.band_width <= 1e-3);
    }

    #[test]
    fn limit_band_reports_oscillation() {
        // f = 1 + 0.5 sin(2 pi ln t / ln 100): band ~ [0.5, 1.5] +- 0.02.
        let l = 100f64.ln();
        let f = GridFunction::multiplicative(
            move |t: f64| 1.0 + 0.5 * (2.0 * std::f64::consts::PI * t.ln() / l).sin(),
            1e2,
            1e12,
            64,
        );
        let band = limit_band_fn(&f, &BandPolicy::new(BandMethod::RichardsonLog, 1e-3)).unwrap();
        assert!(!band.converged);
        assert!((band.liminf_est - 0.5).abs() < 0.02, "{}", band.liminf_est);
        assert!((band.limsup_est - 1.5).abs() < 0.02, "{}", band.limsup_est);
    }

    #[test]
    fn limit_band_constant() {
        let f = GridFunction::multiplicative(|_| 7.0, 1.0, 1e8, 16);
        let band = limit_band_fn(&f, &BandPolicy::new(BandMethod::RawTail, 1e-9)).unwrap();
        assert!(band.converged);
        assert_eq!(band.value.unwrap(), 7.0);
        assert_eq!(band.band_width, 0.0);
    }

    #[test]
    fn limit_band_requires_span() {
        let f = GridFunction::multiplicative(|_| 1.0, 1.0, 100.0, 8);
        match limit_band_fn(&f, &BandPolicy::new(BandMethod::RichardsonLog, 1e-3)) {
            Err(Error::InsufficientData(_)) => {}
            other => panic!("expected insufficient data, got {other:?}"),
        }
    }

    #[test]
    fn band_brackets_oscillatory_truth() {
        // Band containment within eps = 0.02 of the true extrema for the
        // log-periodic family with various phases.
        for phase in [0.0, 1.0, 2.5] {
            let l = 1000f64.ln();
            let f = GridFunction::multiplicative(
                move |t: f64| {
                    1.0 + 0.5 * (2.0 * std::f64::consts::PI * t.ln() / l + phase).sin()
                },
                1e2,
                1e14,
                64,
            );
            let band = limit_band_fn(
                &f,
                &BandPolicy::new(BandMethod::RichardsonLog, 1e-3).with_windows(4),
            )
            .unwrap();
            assert!(!band.converged);
            assert!((band.liminf_est - 0.5).abs() <= 0.02, "{}", band.liminf_est);
            assert!((band.limsup_est - 1.5).abs() <= 0.02, "{}", band.limsup_est);
        }
    }

    #[test]
    fn richardson_r_handles_fractional_decay() {
        // Samples c/sqrt(r) on a ratio-2 grid must extrapolate to 0 tightly
        // (the heat route of trace-class models decays this way).
        let pts: Vec<f64> = (0..28).map(|k| 2f64.powi(k)).collect();
        let vals: Vec<f64> = pts.iter().map(|r| 1.28 / r.sqrt()).collect();
        let band = limit_band(&pts, &vals, &BandPolicy::new(BandMethod::RichardsonR, 2e-6)).unwrap();
        assert!(band.converged, "{band:?}");
        assert!(band.value.unwrap().abs() < 1e-6, "{band:?}");
    }

    #[test]
    fn cesaro_iteration_collapses_oscillation_to_mean() {
        // Iterated M contracts the log-periodic part toward its mean. The
        // grid must be wide: the M-transients decay only like powers of
        // (log log t)/(log t), so collapse to +-0.01 needs tens of decades.
        let l = 100f64.ln();
        let f = GridFunction::multiplicative(
            move |t: f64| 1.0 + 0.5 * (2.0 * std::f64::consts::PI * t.ln() / l).sin(),
            1.0,
            1e40,
            64,
        );
        let band = limit_band_fn(&f, &BandPolicy::new(BandMethod::CesaroIterate, 5e-3)).unwrap();
        assert!(band.converged, "{band:?}");
        assert!((band.value.unwrap() - 1.0).abs() <= 0.01, "{band:?}");
    }

    #[test]
    fn cesaro_iteration_on_loglog_oscillation_collapses_within_band() {
        // Oscillation in log log t: less than one period fits below 1e50, so
        // iterated M provably cannot recover the symbolic mean 1.0 here; the
        // iteration kernel reaches the t = 1 germ (value 1 + 0.4 sin(0.272))
        // before the amplitude damps out. What the M-invariance gives at desk
        // scale is collapse of the band to a point INSIDE the original band.
        let g = GridFunction::multiplicative(
            |t: f64| 1.0 + 0.4 * ((t + std::f64::consts::E).ln().ln()).sin(),
            1.0,
            1e50,
            64,
        );
        let band = limit_band_fn(&g, &BandPolicy::new(BandMethod::CesaroIterate, 5e-3)).unwrap();
        assert!(band.converged, "{band:?}");
        let v = band.value.unwrap();
        assert!(band.band_width <= 0.01);
        assert!((0.6..=1.4).contains(&v), "{v}");
        let germ = 1.0 + 0.4 * ((1.0 + std::f64::consts::E).ln().ln()).sin();
        assert!((v - germ).abs() < 0.01, "{v} vs germ {germ}");
    }
}
