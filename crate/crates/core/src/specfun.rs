//! Special functions for the sideband series.
//!
//! * exponentially scaled modified Bessel functions `e^{-x} I_n(x)` of integer order,
//! * generalized Laguerre polynomials and the Tricomi coefficients
//!   `W_{n,p}(eta) = (-1)^n U(-n, 1-n+p, eta^2) = n! L_n^{(p-n)}(eta^2)`,
//! * log-factorials.
//!
//! Bessel values are always handled in scaled (or logarithmic) form so that large
//! thermal arguments neither overflow nor underflow.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest supported |order| of the Bessel functions.
pub const MAX_BESSEL_ORDER: u64 = 1_000_000;
/// Largest supported index for the Laguerre/Tricomi coefficients.
pub const MAX_POLY_INDEX: u64 = 10_000;

/// Below this argument the power series converges in a handful of terms.
const SERIES_MAX_X: f64 = 2.0;
const RESCALE: f64 = 1e250;

/// ln(n!). Exact integer product for n <= 20, log-gamma above.
pub fn log_factorial(n: u64) -> f64 {
    if n <= 20 {
        let f: u64 = (1..=n).product();
        (f as f64).ln()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

fn check_bessel_args(n: i64, x: f64) -> Result<u64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be finite and >= 0 (got {x})")));
    }
    let order = n.unsigned_abs();
    if order > MAX_BESSEL_ORDER {
        return Err(Error::IndexBound { index: "bessel order", value: order, max: MAX_BESSEL_ORDER });
    }
    Ok(order)
}

/// `e^{-x} I_n(x)` for integer `n` and `x >= 0`.
pub fn bessel_i_scaled(n: i64, x: f64) -> Result<f64> {
    let order = check_bessel_args(n, x)?;
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    if x <= SERIES_MAX_X {
        let (ln_lead, sum) = series_parts(order, x);
        return Ok(ln_lead.exp() * sum);
    }
    Ok(miller_single(order, x).exp())
}

/// `ln(e^{-x} I_n(x))`; `-inf` where the function vanishes.
///
/// Stays finite in the small-argument regime where the scaled value itself
/// underflows.
pub fn ln_bessel_i_scaled(n: i64, x: f64) -> Result<f64> {
    let order = check_bessel_args(n, x)?;
    if x == 0.0 {
        return Ok(if order == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    if x <= SERIES_MAX_X {
        let (ln_lead, sum) = series_parts(order, x);
        return Ok(ln_lead + sum.ln());
    }
    Ok(miller_single(order, x))
}

/// `e^{-x} I_k(x)` for `k = 0..=n_max` from a single backward recurrence.
pub fn bessel_i_scaled_seq(n_max: usize, x: f64) -> Result<Vec<f64>> {
    check_bessel_args(n_max as i64, x)?;
    if x == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        return Ok(v);
    }
    if x <= SERIES_MAX_X {
        return Ok((0..=n_max as u64)
            .map(|k| {
                let (ln_lead, sum) = series_parts(k, x);
                ln_lead.exp() * sum
            })
            .collect());
    }
    let start = miller_start(n_max as u64, x);
    let mut out = vec![0.0; n_max + 1];
    let mut above = 0.0; // b_{k+1}
    let mut cur = 1.0; // b_k
    let mut sum = 0.0;
    for k in (0..=start).rev() {
        if k <= n_max as u64 {
            out[k as usize] = cur;
        }
        sum += if k == 0 { cur } else { 2.0 * cur };
        if k == 0 {
            break;
        }
        let below = 2.0 * k as f64 / x * cur + above;
        above = cur;
        cur = below;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            above /= RESCALE;
            sum /= RESCALE;
            for v in out.iter_mut() {
                *v /= RESCALE;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= sum;
    }
    Ok(out)
}

/// Leading log term and the normalized power-series sum:
/// `e^{-x} I_n(x) = exp(ln_lead) * sum`.
fn series_parts(order: u64, x: f64) -> (f64, f64) {
    let half = 0.5 * x;
    let ln_lead = -x + order as f64 * half.ln() - log_factorial(order);
    let q = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 0u64;
    loop {
        j += 1;
        term *= q / (j as f64 * (j + order) as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    (ln_lead, sum)
}

fn miller_start(order: u64, x: f64) -> u64 {
    order.max(x.ceil() as u64) + 30 + (12.0 * x.sqrt()).ceil() as u64
}

/// Miller backward recurrence normalized by `e^{-x}(I_0 + 2 sum_k I_k) = 1`.
/// Returns the logarithm of the scaled value of `order`.
fn miller_single(order: u64, x: f64) -> f64 {
    let start = miller_start(order, x);
    let mut above = 0.0;
    let mut cur: f64 = 1.0;
    let mut sum = 0.0;
    let mut captured = f64::NEG_INFINITY;
    let ln_rescale = RESCALE.ln();
    for k in (0..=start).rev() {
        if k == order {
            captured = cur.ln();
        }
        sum += if k == 0 { cur } else { 2.0 * cur };
        if k == 0 {
            break;
        }
        let below = 2.0 * k as f64 / x * cur + above;
        above = cur;
        cur = below;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            above /= RESCALE;
            sum /= RESCALE;
            captured -= ln_rescale;
        }
    }
    captured - sum.ln()
}

/// Generalized Laguerre polynomial `L_n^{(alpha)}(x)` by the three-term recurrence.
///
/// Accurate for `alpha >= 0`; negative integer orders should go through
/// [`laguerre_shifted`], which reflects them first.
pub fn laguerre(n: u64, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_n^{(p-n)}(x)`, the polynomial behind `W_{n,p}`.
///
/// For `n > p` the order is negative and
/// `L_n^{(-k)}(x) = (-x)^k (n-k)!/n! L_{n-k}^{(k)}(x)` is applied so that the
/// recurrence only ever runs at non-negative order.
pub fn laguerre_shifted(n: u64, p: u64, x: f64) -> f64 {
    if p >= n {
        return laguerre(n, (p - n) as f64, x);
    }
    let k = n - p;
    if x == 0.0 {
        return 0.0;
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let ln_mag = k as f64 * x.ln() + log_factorial(p) - log_factorial(n);
    sign * ln_mag.exp() * laguerre(p, k as f64, x)
}

/// `W_{n,p}(eta) = (-1)^n U(-n, 1-n+p, eta^2) = n! L_n^{(p-n)}(eta^2)`.
pub fn w_coefficient(n: u64, p: u64, eta: f64) -> Result<f64> {
    for (index, value) in [("n", n), ("p", p)] {
        if value > MAX_POLY_INDEX {
            return Err(Error::IndexBound { index, value, max: MAX_POLY_INDEX });
        }
    }
    if !eta.is_finite() || eta < 0.0 {
        return Err(Error::Domain(format!("eta must be finite and >= 0 (got {eta})")));
    }
    let x = eta * eta;
    if p >= n {
        let fact = log_factorial(n).exp();
        return Ok(fact * laguerre(n, (p - n) as f64, x));
    }
    // n! L_n^{(p-n)}(x) = (-x)^{n-p} p! L_p^{(n-p)}(x)
    if x == 0.0 {
        return Ok(0.0);
    }
    let k = n - p;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let ln_mag = k as f64 * x.ln() + log_factorial(p);
    Ok(sign * ln_mag.exp() * laguerre(p, k as f64, x))
}
