//! One-dimensional Jacobi polynomials and Gauss–Legendre rules.

use crate::error::{param_err, Result};
use crate::real::{Dd, Real};

/// Exponents of the Jacobi weight `(1 - x)^alpha (1 + x)^beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    alpha: f64,
    beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(param_err!("Jacobi exponents must exceed -1, got ({alpha}, {beta})"));
        }
        Ok(JacobiParams { alpha, beta })
    }

    /// Legendre case, `alpha = beta = 0`.
    pub const LEGENDRE: JacobiParams = JacobiParams { alpha: 0.0, beta: 0.0 };

    /// `(alpha, 0)` with a nonnegative integer alpha, the only family the
    /// collapsed-coordinate bases need.
    pub fn alpha_only(alpha: u32) -> Self {
        JacobiParams { alpha: alpha as f64, beta: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn integer_pair(&self) -> Option<(u32, u32)> {
        let is_int = |v: f64| v >= 0.0 && v.fract() == 0.0 && v < 1e6;
        (is_int(self.alpha) && is_int(self.beta)).then(|| (self.alpha as u32, self.beta as u32))
    }
}

/// Nodes and weights of a one-dimensional rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule1D<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussRule1D<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `P_n^{(alpha,beta)}(x)` by the three-term recurrence.
pub fn jacobi_eval<T: Real>(n: usize, params: JacobiParams, x: T) -> T {
    jacobi_with_prev(n, params, x).0
}

/// Returns `(P_n, P_{n-1})`; `P_{-1}` is reported as zero.
fn jacobi_with_prev<T: Real>(n: usize, params: JacobiParams, x: T) -> (T, T) {
    let a = T::from_f64(params.alpha);
    let b = T::from_f64(params.beta);
    let one = T::one();
    let two = T::from_f64(2.0);
    let p0 = one;
    if n == 0 {
        return (p0, T::zero());
    }
    let mut prev = p0;
    let mut cur = (a + one) + (a + b + two) * (x - one) / two;
    for k in 1..n {
        let k = T::from_usize(k);
        let s = two * k + a + b;
        let c1 = two * (k + one) * (k + a + b + one) * s;
        let c2 = (s + one) * ((s + two) * s * x + a * a - b * b);
        let c3 = two * (k + a) * (k + b) * (s + two);
        let next = (c2 * cur - c3 * prev) / c1;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Squared norm `h_n = ∫ (1-x)^a (1+x)^b P_n^2 dx`.
pub fn jacobi_norm_sq<T: Real>(n: usize, params: JacobiParams) -> T {
    if let Some((ia, ib)) = params.integer_pair() {
        // (n+a)!(n+b)! / (n!(n+a+b)!) = prod_{k=1..a} (n+k)/(n+b+k)
        let mut ratio = T::one();
        for k in 1..=ia as usize {
            ratio *= T::from_usize(n + k) / T::from_usize(n + ib as usize + k);
        }
        let pow = T::from_f64(2.0).powi((ia + ib + 1) as i32);
        return pow / T::from_usize(2 * n + (ia + ib) as usize + 1) * ratio;
    }
    // generic exponents through log-gamma, double precision only
    let (a, b) = (params.alpha, params.beta);
    let nf = n as f64;
    let log_h = if n == 0 {
        (a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0)
    } else {
        (a + b + 1.0) * std::f64::consts::LN_2 - (2.0 * nf + a + b + 1.0).ln()
            + ln_gamma(nf + a + 1.0)
            + ln_gamma(nf + b + 1.0)
            - ln_gamma(nf + 1.0)
            - ln_gamma(nf + a + b + 1.0)
    };
    T::from_f64(log_h.exp())
}

/// Orthonormal Jacobi polynomial `P_n / sqrt(h_n)`.
pub fn jacobi_orthonormal_eval<T: Real>(n: usize, params: JacobiParams, x: T) -> T {
    jacobi_eval(n, params, x) / jacobi_norm_sq::<T>(n, params).sqrt()
}

/// `[P̂_0(x), ..., P̂_nmax(x)]` in one pass of the recurrence.
pub fn jacobi_orthonormal_all<T: Real>(nmax: usize, params: JacobiParams, x: T) -> Vec<T> {
    let a = T::from_f64(params.alpha);
    let b = T::from_f64(params.beta);
    let one = T::one();
    let two = T::from_f64(2.0);
    let mut p = Vec::with_capacity(nmax + 1);
    p.push(one);
    if nmax >= 1 {
        p.push((a + one) + (a + b + two) * (x - one) / two);
    }
    for k in 1..nmax {
        let kf = T::from_usize(k);
        let s = two * kf + a + b;
        let c1 = two * (kf + one) * (kf + a + b + one) * s;
        let c2 = (s + one) * ((s + two) * s * x + a * a - b * b);
        let c3 = two * (kf + a) * (kf + b) * (s + two);
        let next = (c2 * p[k] - c3 * p[k - 1]) / c1;
        p.push(next);
    }
    for (n, v) in p.iter_mut().enumerate() {
        *v /= jacobi_norm_sq::<T>(n, params).sqrt();
    }
    p
}

/// Lanczos approximation (g = 7, 9 terms) of `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = C[0];
    for (i, &c) in C.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Legendre value and derivative at `x`.
fn legendre_and_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let (p, pm1) = jacobi_with_prev(n, JacobiParams::LEGENDRE, x);
    let nf = T::from_usize(n);
    // (1 - x^2) P_n' = n (P_{n-1} - x P_n)
    let dp = nf * (pm1 - x * p) / (T::one() - x * x);
    (p, dp)
}

pub const MAX_GAUSS_POINTS: usize = 64;

/// `npts`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
///
/// Roots are always polished in double-double and then rounded to `T`, so the
/// `f64` rule is correctly rounded.
pub fn gauss_legendre<T: Real>(npts: usize) -> Result<GaussRule1D<T>> {
    if npts == 0 || npts > MAX_GAUSS_POINTS {
        return Err(param_err!("Gauss-Legendre point count must be in 1..={MAX_GAUSS_POINTS}, got {npts}"));
    }
    let n = npts;
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Chebyshev-type seed for the i-th largest root
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5);
        let mut xf = theta.cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative::<f64>(n, xf);
            let dx = p / dp;
            xf -= dx;
            if dx.abs() <= 1e-16 * xf.abs().max(1e-300) {
                break;
            }
        }
        let mut x = Dd::from_f64(xf);
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs().to_f64() <= 4.0 * Dd::EPSILON * x.abs().to_f64().max(1e-300) {
                break;
            }
        }
        if n % 2 == 1 && i == half - 1 {
            x = Dd::ZERO;
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = Dd::from_f64(2.0) / ((Dd::ONE - x * x) * dp * dp);
        let (x, w) = (T::from_dd(x), T::from_dd(w));
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    Ok(GaussRule1D { nodes, weights })
}
