//! Mathieu characteristic values `a_ν(q)`, `b_ν(q)`.
//!
//! The exact branch diagonalizes the Fourier-mode representation of
//! `y'' + (a - 2q cos 2θ) y = 0`, which is symmetric tridiagonal in every
//! parity sector. Integer orders use the four classical parity blocks; a
//! fractional order `ν = μ + 2k` uses the Floquet block with diagonal
//! `(μ + 2m)²`, `m ∈ ℤ`.

mod derivatives;
mod series;
pub mod tridiag;

pub use derivatives::{char_derivatives, char_derivatives_with, DerivativeScheme};
pub use series::{band_width, large_q_series, small_q_series};

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use tridiag::SymTridiagonal;

/// Truncation grows from this many Fourier modes, doubling on each refinement.
pub const INITIAL_MODES: usize = 64;
pub const MAX_MODES: usize = 4096;
pub const EXACT_TOLERANCE: f64 = 1e-12;

const INTEGER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// Even solutions, characteristic value `a_ν`.
    EvenA,
    /// Odd solutions, characteristic value `b_ν`.
    OddB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    SeriesSmallQ,
    SeriesLargeQ,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::SeriesSmallQ => "series_small_q",
            Method::SeriesLargeQ => "series_large_q",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "series_small_q" | "small_q" => Ok(Method::SeriesSmallQ),
            "series_large_q" | "large_q" => Ok(Method::SeriesLargeQ),
            other => Err(Error::Config(format!("unknown Mathieu method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MathieuOrder {
    pub kind: Kind,
    pub order: f64,
}

impl MathieuOrder {
    pub fn new(kind: Kind, order: f64) -> Result<Self> {
        if !order.is_finite() || order < 0.0 {
            return domain(format!(
                "Mathieu order must be finite and >= 0, got {order}"
            ));
        }
        let o = Self { kind, order };
        if kind == Kind::OddB && o.integer() == Some(0) {
            return domain("b_0 does not exist (odd solutions start at order 1)");
        }
        Ok(o)
    }

    pub fn even(order: f64) -> Result<Self> {
        Self::new(Kind::EvenA, order)
    }

    pub fn odd(order: f64) -> Result<Self> {
        Self::new(Kind::OddB, order)
    }

    /// `Some(n)` when the order is an integer.
    pub fn integer(&self) -> Option<u32> {
        let r = self.order.round();
        ((self.order - r).abs() <= INTEGER_SLACK).then_some(r as u32)
    }

    /// Split `ν = μ + 2k` with `μ ∈ [0, 2)`.
    pub fn decompose(&self) -> (f64, u32) {
        let k = (self.order / 2.0).floor();
        let mu = self.order - 2.0 * k;
        if mu >= 2.0 {
            (mu - 2.0, k as u32 + 1)
        } else {
            (mu, k as u32)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MathieuCharacteristic {
    pub order: MathieuOrder,
    pub q: f64,
    pub value: f64,
    pub method: Method,
}

/// Characteristic value of the requested order by the requested method.
///
/// The small-q series is routed to the exact branch for integer orders
/// `ν ≤ 4`, where the expansion is not available; the returned `method`
/// records which branch produced the value.
pub fn char_value(order: MathieuOrder, q: f64, method: Method) -> Result<MathieuCharacteristic> {
    check_q(q)?;
    let (value, used) = match method {
        Method::Exact => (exact_value(order, q)?, Method::Exact),
        Method::SeriesSmallQ => match order.integer() {
            Some(n) if n <= 4 => (exact_value(order, q)?, Method::Exact),
            _ => (small_q_series(order.order, q)?, Method::SeriesSmallQ),
        },
        Method::SeriesLargeQ => (large_q_series(order, q)?, Method::SeriesLargeQ),
    };
    Ok(MathieuCharacteristic {
        order,
        q,
        value,
        method: used,
    })
}

/// Shorthand for `char_value(order, q, Method::Exact)`.
pub fn exact(order: MathieuOrder, q: f64) -> Result<f64> {
    check_q(q)?;
    exact_value(order, q)
}

pub fn a(order: f64, q: f64) -> Result<f64> {
    exact(MathieuOrder::even(order)?, q)
}

pub fn b(order: f64, q: f64) -> Result<f64> {
    exact(MathieuOrder::odd(order)?, q)
}

fn check_q(q: f64) -> Result<()> {
    if !q.is_finite() || q < 0.0 {
        return domain(format!(
            "Mathieu parameter q must be finite and >= 0, got {q}"
        ));
    }
    Ok(())
}

/// Which tridiagonal block holds the requested value and at what rank.
enum Block {
    /// cos(2kθ), k ≥ 0
    EvenEven,
    /// cos((2k+1)θ)
    EvenOdd,
    /// sin((2k+1)θ)
    OddOdd,
    /// sin((2k+2)θ)
    OddEven,
    /// e^{i(μ+2m)θ}, m ∈ [-M, M]
    Floquet(f64),
}

fn locate(order: MathieuOrder) -> (Block, usize) {
    match (order.integer(), order.kind) {
        (Some(n), Kind::EvenA) if n % 2 == 0 => (Block::EvenEven, n as usize / 2),
        (Some(n), Kind::EvenA) => (Block::EvenOdd, n as usize / 2),
        (Some(n), Kind::OddB) if n % 2 == 1 => (Block::OddOdd, n as usize / 2),
        (Some(n), Kind::OddB) => (Block::OddEven, n as usize / 2 - 1),
        (None, _) => {
            let (mu, _) = order.decompose();
            (Block::Floquet(mu), 0)
        }
    }
}

fn build(block: &Block, modes: usize, q: f64) -> (SymTridiagonal, bool) {
    let sq = |x: f64| x * x;
    match *block {
        Block::EvenEven => {
            let diag = (0..modes).map(|k| sq(2.0 * k as f64)).collect();
            let mut off = vec![q; modes - 1];
            off[0] = std::f64::consts::SQRT_2 * q;
            (SymTridiagonal::new(diag, off), false)
        }
        Block::EvenOdd | Block::OddOdd => {
            let mut diag: Vec<f64> = (0..modes).map(|k| sq(2.0 * k as f64 + 1.0)).collect();
            diag[0] += if matches!(block, Block::EvenOdd) {
                q
            } else {
                -q
            };
            (SymTridiagonal::new(diag, vec![q; modes - 1]), false)
        }
        Block::OddEven => {
            let diag = (0..modes).map(|k| sq(2.0 * k as f64 + 2.0)).collect();
            (SymTridiagonal::new(diag, vec![q; modes - 1]), false)
        }
        Block::Floquet(mu) => {
            let half = (modes / 2) as i64;
            let diag = (-half..=half)
                .map(|m| sq(mu + 2.0 * m as f64))
                .collect::<Vec<_>>();
            let n = diag.len();
            (SymTridiagonal::new(diag, vec![q; n - 1]), true)
        }
    }
}

fn exact_value(order: MathieuOrder, q: f64) -> Result<f64> {
    let (block, int_rank) = locate(order);
    if q == 0.0 {
        return Ok(order.order * order.order);
    }
    let nu = order.order;
    let mut modes = INITIAL_MODES.max(2 * (nu.ceil() as usize) + 16);
    let mut previous: Option<f64> = None;
    while modes <= MAX_MODES {
        let (matrix, floquet) = build(&block, modes, q);
        // rank among the q = 0 levels |μ + 2m| lying below ν
        let rank = if floquet {
            matrix
                .diag()
                .iter()
                .filter(|d| d.sqrt() < nu - 1e-12 * nu.max(1.0))
                .count()
        } else {
            int_rank
        };
        let value = matrix.eigenvalue(rank);
        if let Some(prev) = previous {
            if (value - prev).abs() < EXACT_TOLERANCE * value.abs().max(1.0) {
                return Ok(value);
            }
        }
        previous = Some(value);
        modes *= 2;
    }
    Err(Error::Convergence {
        what: "Mathieu truncation",
        detail: format!("order {nu}, q = {q}: not stable at {MAX_MODES} modes"),
    })
}

/// Crossover order `ν_c = 2·round(√(q/2))` separating the harmonic-like
/// lower spectrum from the free-rotor-like upper spectrum.
pub fn crossover_index(q: f64) -> u32 {
    2 * (q.max(0.0) / 2.0).sqrt().round() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_limit_is_order_squared() {
        for twice in 0..=20 {
            let nu = twice as f64 / 2.0;
            let a_val = exact(MathieuOrder::even(nu).unwrap(), 0.0).unwrap();
            assert!((a_val - nu * nu).abs() < 1e-12);
        }
        assert_eq!(
            char_value(MathieuOrder::even(2.0).unwrap(), 0.0, Method::Exact)
                .unwrap()
                .value,
            4.0
        );
    }

    #[test]
    fn a0_at_q1() {
        // 101-mode dense oracle value, see tests/mathieu_oracles.rs
        let v = a(0.0, 1.0).unwrap();
        assert!((v - (-0.455_138_604_107_413_7)).abs() < 1e-12, "{v}");
    }

    #[test]
    fn fractional_order_tends_to_neighbouring_integers() {
        // a and b are the two edges of the stability band around an integer
        let q = 0.8;
        let below = exact(MathieuOrder::even(2.0 - 1e-7).unwrap(), q).unwrap();
        let above = exact(MathieuOrder::even(2.0 + 1e-7).unwrap(), q).unwrap();
        assert!((below - b(2.0, q).unwrap()).abs() < 1e-5);
        assert!((above - a(2.0, q).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn decompose_fractional_order() {
        let (mu, k) = MathieuOrder::even(5.5).unwrap().decompose();
        assert!((mu - 1.5).abs() < 1e-15);
        assert_eq!(k, 2);
        let (mu, k) = MathieuOrder::even(0.25).unwrap().decompose();
        assert_eq!((mu, k), (0.25, 0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(MathieuOrder::even(-1.0).is_err());
        assert!(MathieuOrder::odd(0.0).is_err());
        assert!(a(1.0, -0.1).is_err());
        assert!(a(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn small_q_series_routes_low_integer_orders_to_exact() {
        let c = char_value(MathieuOrder::even(3.0).unwrap(), 0.5, Method::SeriesSmallQ).unwrap();
        assert_eq!(c.method, Method::Exact);
        assert!(char_value(MathieuOrder::even(2.3).unwrap(), 0.5, Method::SeriesSmallQ).is_err());
        assert!(char_value(MathieuOrder::even(6.0).unwrap(), 1.5, Method::SeriesSmallQ).is_err());
    }

    #[test]
    fn crossover() {
        assert_eq!(crossover_index(2.0), 2);
        assert_eq!(crossover_index(50.0), 10);
        assert_eq!(crossover_index(0.1), 0);
    }
}
