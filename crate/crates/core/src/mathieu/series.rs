//! Asymptotic expansions of the characteristic values.

use super::{Kind, MathieuOrder};
use crate::error::{domain, Result};

/// Smallest q accepted by the large-q expansion.
pub const LARGE_Q_MIN: f64 = 10.0;

/// `a_ν ≃ b_ν = ν² + q² / (2(ν² − 1))`, for `q < 1`.
///
/// Accepted for `ν ≥ 5`, or for half-integer `ν` where the expansion has no
/// small denominators of the form `ν² − m²`.
pub fn small_q_series(nu: f64, q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return domain(format!("small-q series needs 0 <= q < 1, got {q}"));
    }
    let half_integer = ((nu - 0.5).fract()).abs() < 1e-12 && nu > 0.0;
    if nu < 5.0 && !half_integer {
        return domain(format!(
            "small-q series needs order >= 5 or a half-integer order, got {nu}"
        ));
    }
    Ok(nu * nu + q * q / (2.0 * (nu * nu - 1.0)))
}

/// `a_ν ≈ b_{ν+1} ≈ −2q + 2s√q − (s²+1)/8 − (s³+3s)/(128√q)` with `s = 2ν + 1`.
///
/// For `b_ν` the ladder index is shifted by one (`s = 2ν − 1`).
pub fn large_q_series(order: MathieuOrder, q: f64) -> Result<f64> {
    if q < LARGE_Q_MIN {
        return domain(format!("large-q series needs q >= {LARGE_Q_MIN}, got {q}"));
    }
    let nu = order.order;
    let rq = q.sqrt();
    if nu > rq {
        return domain(format!(
            "large-q series needs order <= sqrt(q) = {rq:.3}, got {nu}"
        ));
    }
    let s = match order.kind {
        Kind::EvenA => 2.0 * nu + 1.0,
        Kind::OddB => 2.0 * nu - 1.0,
    };
    Ok(large_q_terms(s, q))
}

pub(crate) fn large_q_terms(s: f64, q: f64) -> f64 {
    let rq = q.sqrt();
    -2.0 * q + 2.0 * s * rq - (s * s + 1.0) / 8.0 - (s * s * s + 3.0 * s) / (128.0 * rq)
}

/// Width `b_{ν+1} − a_ν` of the ν-th stability band for deep coupling.
pub fn band_width(nu: u32, q: f64) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return domain(format!("band width asymptotics need q >= 1, got {q}"));
    }
    let n = nu as f64;
    let ln_factorial: f64 = (1..=nu).map(|k| (k as f64).ln()).sum();
    let ln_w = (4.0 * n + 5.0) * std::f64::consts::LN_2
        + 0.5 * (2.0 / std::f64::consts::PI).ln()
        + (n / 2.0 + 0.75) * q.ln()
        - 4.0 * q.sqrt()
        - ln_factorial;
    Ok(ln_w.exp())
}
