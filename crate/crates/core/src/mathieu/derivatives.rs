//! Derivatives of the exact characteristic value with respect to the order.
//!
//! Two schemes:
//!
//! * `FloquetExponent` differentiates the characteristic value along the
//!   continuous Floquet exponent with staggered central differences and two
//!   Richardson levels. This is the right object above the crossover order,
//!   where the levels are rotor-like and the exponent dependence is smooth.
//! * `LevelInterpolation` interpolates the integer-order ladder
//!   `a_0, a_1, a_2, …` with a local quartic and differentiates that. Below the
//!   crossover the exponent dependence is a staircase (exponentially narrow
//!   bands separated by gaps of order `√q`), so only the ladder carries the
//!   level spacing that sets recurrence frequencies.

use super::{crossover_index, exact, Kind, MathieuOrder};
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeScheme {
    /// `LevelInterpolation` below the crossover order, `FloquetExponent` above.
    Auto,
    FloquetExponent,
    LevelInterpolation,
}

const LADDER_POINTS: usize = 5;

/// `[∂a/∂ν, …, ∂^max a/∂ν^max]` on the exact branch.
pub fn char_derivatives(order: MathieuOrder, q: f64, max_deriv: usize) -> Result<Vec<f64>> {
    char_derivatives_with(order, q, max_deriv, DerivativeScheme::Auto)
}

pub fn char_derivatives_with(
    order: MathieuOrder,
    q: f64,
    max_deriv: usize,
    scheme: DerivativeScheme,
) -> Result<Vec<f64>> {
    if !(1..=3).contains(&max_deriv) {
        return domain(format!(
            "derivative order must be 1, 2 or 3, got {max_deriv}"
        ));
    }
    exact(order, q)?;
    let scheme = match scheme {
        DerivativeScheme::Auto if q > 0.0 && order.order < crossover_index(q) as f64 => {
            DerivativeScheme::LevelInterpolation
        }
        DerivativeScheme::Auto => DerivativeScheme::FloquetExponent,
        s => s,
    };
    match scheme {
        DerivativeScheme::LevelInterpolation => ladder_derivatives(order, q, max_deriv),
        _ => (1..=max_deriv)
            .map(|k| floquet_derivative(order, q, k))
            .collect(),
    }
}

fn ladder_derivatives(order: MathieuOrder, q: f64, max_deriv: usize) -> Result<Vec<f64>> {
    let first = match order.kind {
        Kind::EvenA => 0i64,
        Kind::OddB => 1,
    };
    let center = order.order.round() as i64;
    let lo = (center - (LADDER_POINTS as i64) / 2).max(first);
    let mut xs = [0.0; LADDER_POINTS];
    let mut ys = [0.0; LADDER_POINTS];
    for i in 0..LADDER_POINTS {
        let m = lo + i as i64;
        xs[i] = m as f64 - order.order;
        ys[i] = exact(MathieuOrder::new(order.kind, m as f64)?, q)?;
    }
    let coeffs = polynomial_through(&xs, &ys);
    // d^k/dx^k at x = 0 is k! c_k
    let mut factorial = 1.0;
    Ok((1..=max_deriv)
        .map(|k| {
            factorial *= k as f64;
            factorial * coeffs[k]
        })
        .collect())
}

/// Coefficients `c_0..c_{n-1}` of the interpolating polynomial, by Gaussian
/// elimination on the Vandermonde system.
fn polynomial_through(
    xs: &[f64; LADDER_POINTS],
    ys: &[f64; LADDER_POINTS],
) -> [f64; LADDER_POINTS] {
    const N: usize = LADDER_POINTS;
    let mut m = [[0.0; N + 1]; N];
    for (i, row) in m.iter_mut().enumerate() {
        let mut p = 1.0;
        for cell in row.iter_mut().take(N) {
            *cell = p;
            p *= xs[i];
        }
        row[N] = ys[i];
    }
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for r in col + 1..N {
            let f = m[r][col] / m[col][col];
            for c in col..=N {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut c = [0.0; N];
    for r in (0..N).rev() {
        let tail: f64 = (r + 1..N).map(|k| m[r][k] * c[k]).sum();
        c[r] = (m[r][N] - tail) / m[r][r];
    }
    c
}

fn floquet_value(kind: Kind, x: f64, q: f64) -> Result<f64> {
    // the characteristic value is even in the exponent
    exact(MathieuOrder::new(kind, x.abs())?, q)
}

/// Staggered stencils that never touch the centre point, so integer orders
/// are handled without landing on the band edge itself.
fn stencil(kind: Kind, nu: f64, q: f64, h: f64, k: usize) -> Result<f64> {
    let f = |x: f64| floquet_value(kind, nu + x, q);
    Ok(match k {
        1 => (f(h)? - f(-h)?) / (2.0 * h),
        2 => (f(3.0 * h)? - f(h)? - f(-h)? + f(-3.0 * h)?) / (8.0 * h * h),
        _ => (f(3.0 * h)? - 3.0 * f(h)? + 3.0 * f(-h)? - f(-3.0 * h)?) / (8.0 * h * h * h),
    })
}

fn richardson(kind: Kind, nu: f64, q: f64, h: f64, k: usize) -> Result<f64> {
    let mut table = [[0.0; 3]; 3];
    for i in 0..3 {
        table[i][0] = stencil(kind, nu, q, h / f64::powi(2.0, i as i32), k)?;
        for j in 1..=i {
            let w = f64::powi(4.0, j as i32);
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (w - 1.0);
        }
    }
    Ok(table[2][2])
}

/// Richardson estimates on a geometric ladder of steps starting at
/// `1e-3·max(1, ν)`; the estimate taken is the one where neighbouring steps
/// agree best (truncation error falling, roundoff not yet dominant).
fn floquet_derivative(order: MathieuOrder, q: f64, k: usize) -> Result<f64> {
    let nu = order.order;
    let h0 = 1e-3 * nu.max(1.0);
    // keep the widest stencil point (3h) inside the current stability band
    let to_integer = (nu - nu.round()).abs();
    let h_max = if to_integer > 1e-9 && q > 0.0 {
        (0.3 * to_integer).max(h0)
    } else {
        0.1 * nu.max(1.0)
    };
    let mut steps = vec![h0];
    while steps.last().unwrap() * 2.0 <= h_max && steps.len() < 10 {
        steps.push(steps.last().unwrap() * 2.0);
    }
    let estimates = steps
        .iter()
        .map(|&h| richardson(order.kind, nu, q, h, k))
        .collect::<Result<Vec<_>>>()?;
    if estimates.len() == 1 {
        return Ok(estimates[0]);
    }
    let best = (0..estimates.len() - 1)
        .min_by(|&i, &j| {
            let di = (estimates[i + 1] - estimates[i]).abs();
            let dj = (estimates[j + 1] - estimates[j]).abs();
            di.total_cmp(&dj)
        })
        .unwrap();
    Ok(estimates[best])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_rotor_derivatives() {
        let o = MathieuOrder::even(3.0).unwrap();
        let d = char_derivatives(o, 0.0, 3).unwrap();
        assert!((d[0] - 6.0).abs() < 1e-8, "{d:?}");
        assert!((d[1] - 2.0).abs() < 1e-6, "{d:?}");
        assert!(d[2].abs() < 1e-3, "{d:?}");
    }

    #[test]
    fn ladder_is_exact_for_quadratic_levels() {
        let o = MathieuOrder::even(0.0).unwrap();
        let d = char_derivatives_with(o, 0.0, 3, DerivativeScheme::LevelInterpolation).unwrap();
        assert!((d[0] - 0.0).abs() < 1e-10);
        assert!((d[1] - 2.0).abs() < 1e-10);
        assert!(d[2].abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_derivative_order() {
        let o = MathieuOrder::even(1.0).unwrap();
        assert!(char_derivatives(o, 1.0, 0).is_err());
        assert!(char_derivatives(o, 1.0, 4).is_err());
    }
}
