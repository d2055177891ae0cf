//! Gamma function via the Lanczos approximation (g = 7, 9 terms).

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument");
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx).
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_reference_values() {
        // Γ(3/2) = sqrt(pi)/2, Γ(2) = 1, Γ(5) = 24, Γ(1/2) = sqrt(pi).
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((gamma(1.5) - sqrt_pi / 2.0).abs() < 1e-14);
        assert!((gamma(2.0) - 1.0).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 2e-13);
        assert!((gamma(0.5) - sqrt_pi).abs() < 1e-14);
    }

    #[test]
    fn gamma_near_pole() {
        // Γ(0.05) = 19.470085311... (pole-adjacent, needs the reflection branch)
        assert!((gamma(0.05) - 19.470_085_311_255_513).abs() < 1e-10);
        // Γ(0.25) = 3.6256099082219083
        assert!((gamma(0.25) - 3.625_609_908_221_908_3).abs() < 1e-12);
    }

    #[test]
    fn recurrence_holds() {
        for &x in &[0.3, 1.7, 4.2, 9.9] {
            let lhs = gamma(x + 1.0);
            let rhs = x * gamma(x);
            assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs());
        }
    }
}
