//! Euler–Maclaurin tail summation and analytic tails for lattice sums.
//!
//! Sums over spectra with heavy tails (terms like n^(-1-1/r) with r up to
//! 2^24) cannot be truncated term-by-term. Every tail here is the
//! Euler–Maclaurin form
//!
//!   sum_{n>=a} g(n) = int_a^inf g + g(a)/2 - g'(a)/12 + g'''(a)/720 - R,
//!
//! with |R| bounded by the next correction term. Derivatives are taken
//! analytically where available and by five-point stencils otherwise.

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// g'(x) by the five-point central stencil with step h.
pub fn d1<F: Fn(f64) -> f64>(g: &F, x: f64, h: f64) -> f64 {
    (-g(x + 2.0 * h) + 8.0 * g(x + h) - 8.0 * g(x - h) + g(x - 2.0 * h)) / (12.0 * h)
}

/// g'''(x) by the five-point central stencil with step h.
pub fn d3<F: Fn(f64) -> f64>(g: &F, x: f64, h: f64) -> f64 {
    (g(x + 2.0 * h) - 2.0 * g(x + h) + 2.0 * g(x - h) - g(x - 2.0 * h)) / (2.0 * h * h * h)
}

/// Euler–Maclaurin value of sum_{n >= a, n - a integer} g(n) given the exact
/// integral of g over [a, inf). `h` is the stencil step for the derivative
/// corrections.
pub fn em_sum_from<F: Fn(f64) -> f64>(g: &F, integral_from_a: f64, a: f64, h: f64) -> f64 {
    integral_from_a + 0.5 * g(a) - d1(g, a, h) / 12.0 + d3(g, a, h) / 720.0
}

/// int_a^inf (1 + x^2)^(-q) dx for a >= 10, via the binomial expansion
/// (1+x^2)^(-q) = sum_m C(-q, m) x^(-2q-2m); each term integrates in closed
/// form and the series converges geometrically in a^(-2).
pub fn integral_inv_quad_power(a: f64, q: f64) -> f64 {
    assert!(a >= 10.0, "series tail requires a >= 10, got {a}");
    let mut coeff = 1.0; // C(-q, m) * (-1)^m accumulated as q(q+1).../m!
    let mut sign = 1.0;
    let mut acc = Kahan::default();
    let lna = a.ln();
    for m in 0..60 {
        let mf = m as f64;
        if m > 0 {
            coeff *= (q + mf - 1.0) / mf;
            sign = -sign;
        }
        let power = 2.0 * q + 2.0 * mf - 1.0;
        let term = sign * coeff * (-power * lna).exp() / power;
        acc.add(term);
        if term.abs() < 1e-18 * acc.value().abs() {
            break;
        }
    }
    acc.value()
}

/// (1 + x^2)^(-q) and its first and third derivatives, closed form.
fn inv_quad(x: f64, q: f64) -> f64 {
    (1.0 + x * x).powf(-q)
}

fn inv_quad_d1(x: f64, q: f64) -> f64 {
    -2.0 * q * x * (1.0 + x * x).powf(-q - 1.0)
}

fn inv_quad_d3(x: f64, q: f64) -> f64 {
    let u = 1.0 + x * x;
    12.0 * q * (q + 1.0) * x * u.powf(-q - 2.0)
        - 8.0 * q * (q + 1.0) * (q + 2.0) * x * x * x * u.powf(-q - 3.0)
}

/// sum_{k >= 1} (1 + (a + k)^2)^(-p/2) for a >= 20: the one-sided lattice
/// tail after truncation at |k| <= K, allowing a real shift a (the moving
/// path D_t displaces the spectrum by at most a few units).
pub fn lattice_tail_shifted(a: f64, p: f64) -> f64 {
    let q = 0.5 * p;
    let g = |x: f64| inv_quad(x, q);
    // sum_{j>=0} g(a+j) = int + g(a)/2 - g'(a)/12 + g'''(a)/720; drop j = 0.
    let full = integral_inv_quad_power(a, q) + 0.5 * g(a) - inv_quad_d1(a, q) / 12.0
        + inv_quad_d3(a, q) / 720.0;
    full - g(a)
}

/// sum_{k in Z} (1 + (k - shift)^2)^(-p/2): direct part |k| <= kmax plus
/// analytic tails on both sides.
pub fn lattice_sum_inv_quad(shift: f64, p: f64, kmax: i64) -> f64 {
    let q = 0.5 * p;
    let mut acc = Kahan::default();
    for k in -kmax..=kmax {
        acc.add(inv_quad(k as f64 - shift, q));
    }
    acc.value()
        + lattice_tail_shifted(kmax as f64 - shift, p)
        + lattice_tail_shifted(kmax as f64 + shift, p)
}
