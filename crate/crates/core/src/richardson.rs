//! Polynomial extrapolation to ξ → 0 (Neville scheme).

/// Result of extrapolating samples (ξ_i, f_i) to ξ = 0.
#[derive(Debug, Clone, Copy)]
pub struct Extrapolation {
    pub value: f64,
    /// Difference between the chosen table entry and its lower-order
    /// neighbours; an internal error estimate, not a bound.
    pub err: f64,
    pub order: usize,
}

/// Neville table evaluated at 0 over the given (ξ, f) samples, ξ > 0
/// strictly decreasing or increasing. Picks the diagonal entry whose
/// last correction is smallest.
pub fn neville_zero(xi: &[f64], f: &[f64]) -> Extrapolation {
    assert_eq!(xi.len(), f.len());
    let n = xi.len();
    assert!(n >= 2, "extrapolation needs at least two samples");
    // last[k] = extrapolant of order k anchored at the most recent samples.
    let mut last: Vec<f64> = Vec::with_capacity(n);
    let mut corrections: Vec<f64> = vec![0.0; n];
    for i in 0..n {
        let mut row = Vec::with_capacity(i + 1);
        row.push(f[i]);
        for k in 1..=i {
            let ratio = xi[i - k] / xi[i];
            let prev_lower = last[k - 1];
            let cur_lower = row[k - 1];
            let next = cur_lower + (cur_lower - prev_lower) / (ratio - 1.0);
            row.push(next);
        }
        last = row;
    }
    for k in 1..n {
        corrections[k] = (last[k] - last[k - 1]).abs();
    }
    let mut best = 1;
    for k in 2..n {
        if corrections[k] < corrections[best] {
            best = k;
        }
    }
    Extrapolation {
        value: last[best],
        err: corrections[best],
        order: best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        // f(xi) = 3 - 2 xi + 5 xi^2: limit 3.
        let xi: Vec<f64> = (0..8).map(|k| 2f64.powi(-k)).collect();
        let f: Vec<f64> = xi.iter().map(|&x| 3.0 - 2.0 * x + 5.0 * x * x).collect();
        let e = neville_zero(&xi, &f);
        assert!((e.value - 3.0).abs() < 1e-12, "{}", e.value);
    }

    #[test]
    fn handles_harmonic_like_series() {
        // f = 1 + gamma * xi with xi = 1/log t: exactly linear.
        let gamma = 0.577_215_664_901_532_9;
        let xi: Vec<f64> = (2..9).map(|d| 1.0 / (d as f64 * std::f64::consts::LN_10)).collect();
        let f: Vec<f64> = xi.iter().map(|&x| 1.0 + gamma * x).collect();
        let e = neville_zero(&xi, &f);
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!(e.err < 1e-12);
    }

    #[test]
    fn fractional_powers_stall_without_order_fit() {
        // f = c sqrt(xi): polynomial extrapolation stalls near half the last
        // sample (the band estimator fits the order first for this reason);
        // in the transformed variable xi' = sqrt(xi) it is exact.
        let xi: Vec<f64> = (0..26).map(|k| 2f64.powi(-k)).collect();
        let f: Vec<f64> = xi.iter().map(|&x| 1.3 * x.sqrt()).collect();
        let e = neville_zero(&xi, &f);
        assert!(e.value.abs() > 1e-5 && e.value.abs() < 3e-4, "{}", e.value);
        let xi_fit: Vec<f64> = xi.iter().map(|x| x.sqrt()).collect();
        let e = neville_zero(&xi_fit, &f);
        assert!(e.value.abs() < 1e-12, "{}", e.value);
    }
}
