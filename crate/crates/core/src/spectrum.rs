//! Resonance parameter bundles and quasi-energy spectra.
//!
//! Unit conventions. Undriven band parameters (`ω`, `ζ`) come out in recoil
//! units: `ω = ∂E_n/∂n` and `ζ = ∂²E_n/∂n²` with `E_n` in units of `E_r`.
//! A [`ResonanceModel`] lives in the scaled units of the driven problem
//! (`i k̄ ∂_τ ψ = H̃ ψ`, drive frequency 1), where the scaled energy is
//! `Ẽ = (k̄²/2) E/E_r`, hence
//!
//! ```text
//! ω_sc = k̄ ω_rec / 2      ζ_sc = ζ_rec / 2      Ṽ0 = k̄² V0 / 2
//! ```
//!
//! and the coupling `V` is the matrix element of `z` between neighbouring
//! bands. The Mathieu parameter `q = 4λV/(N²ζk̄²)` is the same number in
//! either convention when `V` is the harmonic-oscillator element.

use crate::error::{domain, Error, Result};
use crate::mathieu::{self, MathieuOrder, Method};
use serde::{Deserialize, Serialize};

pub use crate::mathieu::crossover_index;

/// Deep-lattice formulas are rejected below this rescaled depth.
pub const DEEP_Q0_MIN: f64 = 4.0;
/// ... and trusted above this one.
pub const DEEP_Q0_COMFORTABLE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Shallow,
    Deep,
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shallow" => Ok(Regime::Shallow),
            "deep" => Ok(Regime::Deep),
            other => Err(Error::Config(format!("unknown regime `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    /// Depth in recoil energies.
    pub v0: f64,
    pub kbar: f64,
    pub lambda: f64,
    /// `k̄² V0 / 2`, the depth entering the scaled Hamiltonian.
    pub v0_tilde: f64,
    /// `V0 / 4` in recoil units.
    pub q0: f64,
}

impl LatticeParams {
    pub fn new(v0: f64, kbar: f64, lambda: f64) -> Result<Self> {
        if !(v0 > 0.0 && v0.is_finite()) {
            return domain(format!("lattice depth must be positive, got {v0}"));
        }
        if !(kbar > 0.0 && kbar.is_finite()) {
            return domain(format!(
                "effective Planck constant must be positive, got {kbar}"
            ));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return domain(format!("modulation amplitude must be >= 0, got {lambda}"));
        }
        Ok(Self {
            v0,
            kbar,
            lambda,
            v0_tilde: 0.5 * kbar * kbar * v0,
            q0: v0 / 4.0,
        })
    }

    /// From the scaled depth `Ṽ0` instead of `V0/E_r`.
    pub fn from_scaled(v0_tilde: f64, kbar: f64, lambda: f64) -> Result<Self> {
        if !(kbar > 0.0) {
            return domain(format!(
                "effective Planck constant must be positive, got {kbar}"
            ));
        }
        Self::new(2.0 * v0_tilde / (kbar * kbar), kbar, lambda)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.v0, self.kbar, lambda)
    }
}

/// `(ω, ζ)` of band `n` of the undriven lattice, recoil units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandParams {
    pub omega: f64,
    pub zeta: f64,
}

pub fn undriven_band_params(lattice: &LatticeParams, n: u32, regime: Regime) -> Result<BandParams> {
    let q0 = lattice.q0;
    match regime {
        Regime::Shallow => {
            if q0 >= 1.0 {
                return domain(format!("shallow-lattice formulas need q0 < 1, got {q0}"));
            }
            if n < 2 {
                return domain(format!(
                    "shallow-lattice formulas need band index n >= 2, got {n}"
                ));
            }
            let u = (n * n) as f64 - 1.0;
            let nf = n as f64;
            Ok(BandParams {
                omega: 2.0 * nf * (1.0 - q0 * q0 / (2.0 * u * u)),
                zeta: 2.0 + 0.5 * q0 * q0 * (3.0 * nf * nf + 1.0) / u.powi(3),
            })
        }
        Regime::Deep => {
            check_deep(q0)?;
            let s = 2.0 * n as f64 + 1.0;
            let rq = q0.sqrt();
            Ok(BandParams {
                omega: 4.0 * (rq - s / 8.0),
                zeta: (-1.0 - 3.0 * s / (16.0 * rq)).abs(),
            })
        }
    }
}

fn check_deep(q0: f64) -> Result<()> {
    if q0 < DEEP_Q0_MIN {
        return domain(format!(
            "deep-lattice formulas need q0 >= {DEEP_Q0_MIN}, got {q0}"
        ));
    }
    if q0 < DEEP_Q0_COMFORTABLE {
        log::warn!("q0 = {q0} is marginal for the deep-lattice expansions");
    }
    Ok(())
}

/// `q = 4λV / (N² |ζ| k̄²)`.
pub fn mathieu_q(lambda: f64, v: f64, n_res: u32, zeta: f64, kbar: f64) -> Result<f64> {
    if n_res == 0 {
        return domain("resonance order N must be >= 1");
    }
    if zeta == 0.0 {
        return Err(Error::Singularity(
            "ζ = 0: linear spectrum has no nonlinear resonance".into(),
        ));
    }
    if !(kbar > 0.0) {
        return domain(format!(
            "effective Planck constant must be positive, got {kbar}"
        ));
    }
    let nn = (n_res * n_res) as f64;
    Ok(4.0 * lambda * v / (nn * zeta.abs() * kbar * kbar))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum CouplingMode {
    /// Harmonic-oscillator matrix element of `z`; deep lattices only.
    HarmonicApprox,
    UserSupplied(f64),
}

/// Everything describing an `N:M` nonlinear resonance, in scaled units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceModel {
    pub n_res: u32,
    pub m_res: i64,
    pub alpha: f64,
    pub kbar: f64,
    pub zeta: f64,
    pub omega: f64,
    pub v: f64,
    pub lambda: f64,
    pub q: f64,
    pub beta: f64,
    pub l: i64,
    pub n_bar: f64,
    /// Reference frequency in `Δ = 1 − ω_N/ω`; `1/N` unless overridden.
    pub omega_n: f64,
    pub delta: f64,
    pub mu1: f64,
    pub h0_bar: f64,
    pub lattice: Option<LatticeParams>,
    pub regime: Option<Regime>,
}

impl ResonanceModel {
    /// Model from scaled `ω`, `ζ`, `V` directly (no lattice behind it).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        n_res: u32,
        m_res: i64,
        kbar: f64,
        omega: f64,
        zeta: f64,
        v: f64,
        lambda: f64,
        l: i64,
        n_bar: f64,
    ) -> Result<Self> {
        if n_res == 0 {
            return domain("resonance order N must be >= 1");
        }
        if gcd(m_res.unsigned_abs(), n_res as u64) != 1 {
            return domain(format!("M/N = {m_res}/{n_res} is not in lowest terms"));
        }
        if !(lambda >= 0.0) {
            return domain(format!("modulation amplitude must be >= 0, got {lambda}"));
        }
        if omega == 0.0 {
            return Err(Error::Singularity("ω = 0".into()));
        }
        let q = mathieu_q(lambda, v, n_res, zeta, kbar)?;
        let mut model = Self {
            n_res,
            m_res,
            alpha: m_res as f64 / n_res as f64,
            kbar,
            zeta: zeta.abs(),
            omega,
            v,
            lambda,
            q,
            beta: 0.0,
            l,
            n_bar,
            omega_n: 1.0 / n_res as f64,
            delta: 0.0,
            mu1: 0.0,
            h0_bar: 0.0,
            lattice: None,
            regime: None,
        };
        model.refresh();
        Ok(model)
    }

    fn refresh(&mut self) {
        let nf = self.n_res as f64;
        self.beta = (nf * self.omega - 1.0) / (nf * nf * self.zeta * self.kbar);
        self.delta = 1.0 - self.omega_n / self.omega;
        self.mu1 = self.kbar * self.zeta * self.delta / (2.0 * self.omega);
    }

    pub fn with_omega_n(mut self, omega_n: f64) -> Self {
        self.omega_n = omega_n;
        self.refresh();
        self
    }

    pub fn with_h0_bar(mut self, h0_bar: f64) -> Self {
        self.h0_bar = h0_bar;
        self
    }

    /// Same resonance at another modulation amplitude; `q` scales linearly.
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        self.q = mathieu_q(lambda, self.v, self.n_res, self.zeta, self.kbar)?;
        self.lambda = lambda;
        if let Some(lat) = self.lattice.as_mut() {
            *lat = lat.with_lambda(lambda)?;
        }
        Ok(self)
    }

    /// Mathieu order at the resonance band `l`: `ν = 2(l + β)`.
    pub fn nu(&self) -> f64 {
        2.0 * (self.l as f64 + self.beta)
    }

    /// `k̄ω`, the quasi-energy zone width.
    pub fn zone(&self) -> f64 {
        self.kbar * self.omega
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Scaled resonance model for band `n` of a lattice driven at its `N:M` resonance.
#[allow(clippy::too_many_arguments)]
pub fn lattice_resonance_model(
    lattice: &LatticeParams,
    n: u32,
    n_res: u32,
    m_res: i64,
    l: i64,
    regime: Regime,
    coupling: CouplingMode,
) -> Result<ResonanceModel> {
    let band = undriven_band_params(lattice, n, regime)?;
    let kbar = lattice.kbar;
    let omega = 0.5 * kbar * band.omega;
    let zeta = 0.5 * band.zeta;
    let v = match coupling {
        CouplingMode::HarmonicApprox => {
            if regime != Regime::Deep {
                return domain(
                    "the harmonic matrix-element approximation is only available for deep lattices",
                );
            }
            harmonic_coupling(lattice.q0, n)
        }
        CouplingMode::UserSupplied(v) => v,
    };
    let mut model = ResonanceModel::from_parts(
        n_res,
        m_res,
        kbar,
        omega,
        zeta,
        v,
        lattice.lambda,
        l,
        n as f64,
    )?;
    model.lattice = Some(*lattice);
    model.regime = Some(regime);
    Ok(model)
}

/// `⟨n|z|n+1⟩ = √(n+1)/(2 q0^{1/4})` for the harmonic well of depth `q0`.
///
/// With this element `q = 4√(n+1) λ / (q0^{1/4} k̄² ζ_rec)`.
pub fn harmonic_coupling(q0: f64, n: u32) -> f64 {
    ((n + 1) as f64).sqrt() / (2.0 * q0.powf(0.25))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiEnergy {
    pub j: u32,
    pub nu: f64,
    /// Floquet exponent class `μ(j) = 2j/N`.
    pub mu: f64,
    pub unwrapped: f64,
    /// `unwrapped mod k̄ω`, in `[0, k̄ω)`.
    pub wrapped: f64,
    pub method: Method,
}

/// `E = [N²k̄²ζ/8 · a_ν(q) + k̄αj + H̄0] mod k̄ω`.
///
/// `ν` is the full Mathieu order. `j` is taken modulo `N`, which makes the
/// spectrum periodic in `j`. A nonzero `h0_bar` on the model gives the
/// coupled-degrees-of-freedom form of the spectrum.
pub fn quasi_energy(
    model: &ResonanceModel,
    j: i64,
    nu: f64,
    method: Method,
) -> Result<QuasiEnergy> {
    let n = model.n_res as i64;
    let j = j.rem_euclid(n) as u32;
    let c = mathieu::char_value(MathieuOrder::even(nu.abs())?, model.q, method)?;
    let nn = (model.n_res * model.n_res) as f64;
    let unwrapped = nn * model.kbar * model.kbar * model.zeta / 8.0 * c.value
        + model.kbar * model.alpha * j as f64
        + model.h0_bar;
    Ok(QuasiEnergy {
        j,
        nu,
        mu: 2.0 * j as f64 / model.n_res as f64,
        unwrapped,
        wrapped: wrap(unwrapped, model.zone()),
        method: c.method,
    })
}

fn wrap(x: f64, zone: f64) -> f64 {
    let zone = zone.abs();
    if zone == 0.0 {
        return x;
    }
    let w = x.rem_euclid(zone);
    // rem_euclid can round up to the modulus itself
    if w >= zone {
        0.0
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_params_reference_values() {
        let deep = LatticeParams::new(16.0, 0.5, 0.0).unwrap();
        let b = undriven_band_params(&deep, 2, Regime::Deep).unwrap();
        assert!((b.omega - 5.5).abs() < 1e-14);
        assert!((b.zeta - 1.46875).abs() < 1e-14);
        let free = LatticeParams {
            q0: 0.0,
            ..LatticeParams::new(1e-9, 0.5, 0.0).unwrap()
        };
        let b = undriven_band_params(&free, 3, Regime::Shallow).unwrap();
        assert_eq!((b.omega, b.zeta), (6.0, 2.0));
        let shallow = LatticeParams::new(2.0, 0.5, 0.0).unwrap();
        assert!(undriven_band_params(&shallow, 1, Regime::Shallow).is_err());
        assert!(undriven_band_params(&shallow, 2, Regime::Deep).is_err());
    }

    #[test]
    fn deep_zeta_tends_to_one() {
        let lat = LatticeParams::new(4e12, 0.5, 0.0).unwrap();
        let b = undriven_band_params(&lat, 3, Regime::Deep).unwrap();
        assert!((b.zeta - 1.0).abs() < 1e-5);
    }

    #[test]
    fn fig4_chain_gives_q_near_20() {
        let lat = LatticeParams::new(16.0, 0.5, 1.5).unwrap();
        let m =
            lattice_resonance_model(&lat, 2, 1, 0, 0, Regime::Deep, CouplingMode::HarmonicApprox)
                .unwrap();
        let closed_form = 4.0 * 3f64.sqrt() * 1.5 / (4f64.powf(0.25) * 0.25 * 1.46875);
        assert!((m.q - closed_form).abs() < 1e-12);
        assert!((m.q - 20.0).abs() < 0.05);
        assert_eq!(m.alpha, 0.0);
        assert!((m.omega - 1.375).abs() < 1e-14);
        assert!((m.beta - 0.375 / (0.734375 * 0.5)).abs() < 1e-14);
    }

    #[test]
    fn scaled_depth_round_trip() {
        let lat = LatticeParams::from_scaled(0.36, 0.16, 3.0).unwrap();
        assert!((lat.v0 - 28.125).abs() < 1e-12);
        assert!((lat.v0_tilde - 0.36).abs() < 1e-14);
        assert!((lat.q0 - lat.v0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_zero_gives_q_zero() {
        let lat = LatticeParams::new(16.0, 0.5, 0.0).unwrap();
        let m =
            lattice_resonance_model(&lat, 2, 1, 0, 0, Regime::Deep, CouplingMode::HarmonicApprox)
                .unwrap();
        assert_eq!(m.q, 0.0);
        assert!(m.delta.is_finite() && m.beta.is_finite() && m.mu1.is_finite());
    }

    #[test]
    fn rejects_zero_zeta_and_reducible_ratio() {
        assert!(matches!(
            mathieu_q(1.0, 1.0, 1, 0.0, 0.5),
            Err(Error::Singularity(_))
        ));
        assert!(ResonanceModel::from_parts(2, 2, 0.5, 1.0, 1.0, 1.0, 0.1, 0, 0.0).is_err());
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap(-0.25, 1.0), 0.75);
        assert_eq!(wrap(2.5, 1.0), 0.5);
        assert!(wrap(-1e-18, 1.0) < 1.0);
    }
}
