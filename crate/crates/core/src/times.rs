//! Classical period, revival and super-revival times.
//!
//! All driven-system times are in scaled time `τ = ω_m t` (drive period
//! `2π`). Undriven-lattice formulas come out in units of `1/ω_r`; use
//! [`TimeScales::recoil_to_drive`] to put them on the same axis.
//!
//! A vanishing frequency is reported as `+∞` rather than an error, since
//! sweeps legitimately start at `λ = 0` where the super revival disappears.

use crate::error::{domain, Error, Result};
use crate::mathieu::{char_derivatives, MathieuOrder};
use crate::spectrum::{
    crossover_index, undriven_band_params, LatticeParams, Regime, ResonanceModel,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Below this `q` the large-q forms are refused.
pub const ROBUST_Q_MIN: f64 = 10.0;
const ROBUST_Q_COMFORTABLE: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMethod {
    NumericExact,
    DelicateGeneral,
    RobustGeneral,
    RobustPrimary,
    LatticeShallow,
    LatticeDeep,
    LatticeDeepHarmonic,
    UndrivenShallow,
    UndrivenDeep,
}

impl TimeMethod {
    pub const ALL: [TimeMethod; 9] = [
        TimeMethod::NumericExact,
        TimeMethod::DelicateGeneral,
        TimeMethod::RobustGeneral,
        TimeMethod::RobustPrimary,
        TimeMethod::LatticeShallow,
        TimeMethod::LatticeDeep,
        TimeMethod::LatticeDeepHarmonic,
        TimeMethod::UndrivenShallow,
        TimeMethod::UndrivenDeep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TimeMethod::NumericExact => "numeric_exact",
            TimeMethod::DelicateGeneral => "delicate_general",
            TimeMethod::RobustGeneral => "robust_general",
            TimeMethod::RobustPrimary => "robust_primary",
            TimeMethod::LatticeShallow => "lattice_shallow",
            TimeMethod::LatticeDeep => "lattice_deep",
            TimeMethod::LatticeDeepHarmonic => "lattice_deep_harmonic",
            TimeMethod::UndrivenShallow => "undriven_shallow",
            TimeMethod::UndrivenDeep => "undriven_deep",
        }
    }
}

impl std::str::FromStr for TimeMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TimeMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown time-scale method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScales {
    pub t_cl: f64,
    pub t_rev: f64,
    pub t_spr: f64,
    pub method: TimeMethod,
}

impl TimeScales {
    /// Undriven-lattice times (units `1/ω_r`) in drive units: `τ = 2t ω_r / k̄`.
    pub fn recoil_to_drive(self, kbar: f64) -> Self {
        let f = 2.0 / kbar;
        Self {
            t_cl: self.t_cl * f,
            t_rev: self.t_rev * f,
            t_spr: self.t_spr * f,
            ..self
        }
    }

    /// Scaled times to seconds for a drive at angular frequency `omega_m`.
    pub fn to_seconds(self, omega_m: f64) -> Self {
        Self {
            t_cl: self.t_cl / omega_m,
            t_rev: self.t_rev / omega_m,
            t_spr: self.t_spr / omega_m,
            ..self
        }
    }

    pub fn all_positive(&self) -> bool {
        self.t_cl > 0.0 && self.t_rev > 0.0 && self.t_spr > 0.0
    }

    pub fn ordered(&self) -> bool {
        self.t_cl < self.t_rev && self.t_rev < self.t_spr
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModificationFactors {
    pub m_cl: f64,
    pub m_rev: f64,
}

/// `2π/Ω`, with a vanishing frequency mapped to `+∞`.
fn period(omega: f64) -> f64 {
    if omega == 0.0 {
        f64::INFINITY
    } else {
        2.0 * PI / omega.abs()
    }
}

/// `(Ω1, Ω2, Ω3)` from derivatives of the exact quasi-energy with respect to `ν`.
pub fn omegas_numeric(model: &ResonanceModel, nu: f64) -> Result<[f64; 3]> {
    let d = char_derivatives(MathieuOrder::even(nu.abs())?, model.q, 3)?;
    // a is even in ν, so odd derivatives flip sign for ν < 0
    let sign = if nu < 0.0 { -1.0 } else { 1.0 };
    let nn = (model.n_res * model.n_res) as f64;
    let k = model.kbar;
    let scale = nn * k * k * model.zeta / 8.0;
    let e1 = scale * d[0] * sign;
    let e2 = scale * d[1];
    let e3 = scale * d[2] * sign;
    let ak = model.alpha * k;
    Ok([
        (e1 + ak) / k,
        (e2 + 2.0 * ak * e1) / (2.0 * k * k),
        (e3 + 3.0 * ak * e2) / (6.0 * k * k * k),
    ])
}

/// Times from [`omegas_numeric`] at the model's own order `ν = 2(l + β)`.
pub fn times_numeric(model: &ResonanceModel) -> Result<TimeScales> {
    let [w1, w2, w3] = omegas_numeric(model, model.nu())?;
    Ok(TimeScales {
        t_cl: period(w1),
        t_rev: period(w2),
        t_spr: period(w3),
        method: TimeMethod::NumericExact,
    })
}

/// Weak-coupling (`q < 1`) times of the primary resonance.
pub fn times_delicate(model: &ResonanceModel) -> Result<(TimeScales, ModificationFactors)> {
    if model.n_res != 1 {
        return domain("weak-coupling closed forms are for the primary resonance N = 1");
    }
    if model.q >= 1.0 {
        return domain(format!(
            "weak-coupling closed forms need q < 1, got {}",
            model.q
        ));
    }
    let mu2 = model.mu1 * model.mu1;
    if (1.0 - mu2).abs() < 1e-12 {
        return Err(Error::Singularity(format!(
            "μ₁ = {} (resonance overlap)",
            model.mu1
        )));
    }
    let (w, z, d) = (model.omega, model.zeta, model.delta);
    let factors = modification_factors(model.lambda * model.v * z * d * d / (w * w), model.mu1);
    let t0_cl = 2.0 * PI / w;
    let t0_rev = 2.0 * PI / (0.5 * model.kbar * z);
    let spr_den = 2.0 * model.lambda * model.v * z * d * d * model.mu1;
    let t_spr = if spr_den == 0.0 {
        f64::INFINITY
    } else {
        PI * w * w * (1.0 - mu2).powi(4) / spr_den
    };
    Ok((
        TimeScales {
            t_cl: (1.0 - factors.m_cl) * t0_cl * d,
            t_rev: (1.0 - factors.m_rev) * t0_rev,
            t_spr,
            method: TimeMethod::DelicateGeneral,
        },
        factors,
    ))
}

/// `M_cl`, `M_rev` for coupling strength `g = λVζΔ²/ω²` and rescaled nonlinearity `μ₁`.
pub fn modification_factors(g: f64, mu1: f64) -> ModificationFactors {
    let mu2 = mu1 * mu1;
    ModificationFactors {
        m_cl: -0.5 * g * g / (1.0 - mu2).powi(2),
        m_rev: 0.5 * g * g * (3.0 + mu2) / (1.0 - mu2).powi(3),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustForm {
    /// Any `N`, winding number `α`.
    GeneralN,
    /// `N = 1` written through `μ₁`, `Δ` and the undriven times.
    PrimarySimplified,
}

fn check_robust(model: &ResonanceModel) -> Result<()> {
    if model.q < ROBUST_Q_MIN {
        return domain(format!(
            "strong-coupling closed forms need q >= {ROBUST_Q_MIN}, got {}",
            model.q
        ));
    }
    if model.q < ROBUST_Q_COMFORTABLE {
        log::warn!(
            "q = {} is marginal for the strong-coupling expansions",
            model.q
        );
    }
    if model.nu().abs() > crossover_index(model.q) as f64 {
        log::warn!(
            "ν = {} lies above the crossover order {}",
            model.nu(),
            crossover_index(model.q)
        );
    }
    Ok(())
}

/// Strong-coupling (`q ≫ 1`) times.
pub fn times_robust(model: &ResonanceModel, form: RobustForm) -> Result<TimeScales> {
    check_robust(model)?;
    let q = model.q;
    let rq = q.sqrt();
    let nn = (model.n_res * model.n_res) as f64;
    let (k, z, a) = (model.kbar, model.zeta, model.alpha);
    match form {
        RobustForm::GeneralN => {
            let s = 2.0 * model.nu() + 1.0;
            let t_cl = 4.0 * PI
                / (nn * k * z * rq * (1.0 - s / (8.0 * rq) - (3.0 * s * s + 3.0) / (256.0 * q))
                    + 2.0 * a);
            let t_rev =
                32.0 * PI / (nn * z * (1.0 + 3.0 * s / (16.0 * rq) + 8.0 * a * k * rq - s * a * k));
            let t_spr = if a == 0.0 {
                f64::INFINITY
            } else {
                32.0 * PI / (nn * z * a) * (1.0 - (1.0 + 1.5 * a * k * s) / (8.0 * a * k * rq))
            };
            Ok(TimeScales {
                t_cl,
                t_rev,
                t_spr,
                method: TimeMethod::RobustGeneral,
            })
        }
        RobustForm::PrimarySimplified => {
            if model.n_res != 1 {
                return domain("simplified strong-coupling forms are for N = 1");
            }
            let mu = model.mu1;
            if mu == 0.0 {
                return Err(Error::Singularity(
                    "μ₁ = 0 in the simplified strong-coupling forms".into(),
                ));
            }
            let t0_cl = 2.0 * PI / model.omega;
            let t0_rev = 2.0 * PI / (0.5 * k * z);
            let c = (4.0 + mu) / (8.0 * mu);
            let t_cl = t0_cl * model.delta / (8.0 * mu) * (1.0 - c * z.sqrt() / rq - c * c * z / q);
            let r = 3.0 * (4.0 + mu) / (16.0 * mu);
            let t_rev = t0_rev * 2.0 * (1.0 - r / rq + r * r / q);
            let t_spr = 32.0 * PI * rq / (k * z);
            Ok(TimeScales {
                t_cl,
                t_rev,
                t_spr,
                method: TimeMethod::RobustPrimary,
            })
        }
    }
}

/// Undriven lattice band `n`, units `1/ω_r`.
pub fn undriven_times(lattice: &LatticeParams, n: u32, regime: Regime) -> Result<TimeScales> {
    // validates (q0, n) for the regime
    undriven_band_params(lattice, n, regime)?;
    let q0 = lattice.q0;
    let nf = n as f64;
    match regime {
        Regime::Shallow => {
            let u = nf * nf - 1.0;
            let t_spr = if q0 == 0.0 {
                f64::INFINITY
            } else {
                PI * u.powi(4) / (q0 * q0 * nf * (nf * nf + 1.0))
            };
            Ok(TimeScales {
                t_cl: (1.0 + q0 * q0 / (2.0 * u * u)) * PI / nf,
                t_rev: 2.0 * PI * (1.0 - 0.5 * q0 * q0 * (3.0 * nf * nf + 1.0) / u.powi(3)),
                t_spr,
                method: TimeMethod::UndrivenShallow,
            })
        }
        Regime::Deep => {
            let s = 2.0 * nf + 1.0;
            let rq = q0.sqrt();
            Ok(TimeScales {
                t_cl: PI / (2.0 * rq) * (1.0 + s / (8.0 * rq) + 3.0 * (s * s + 1.0) / (256.0 * q0)),
                t_rev: 4.0 * PI * (1.0 - 3.0 * s / (16.0 * q0)),
                t_spr: 32.0 * PI * rq,
                method: TimeMethod::UndrivenDeep,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeForm {
    Shallow,
    Deep,
    DeepHarmonic,
}

/// Driven-lattice primary-resonance times with `ν = 2(l + β)`.
pub fn driven_lattice_times(model: &ResonanceModel, form: LatticeForm) -> Result<TimeScales> {
    let lb = model.l as f64 + model.beta;
    let nn = (model.n_res * model.n_res) as f64;
    let (k, z, q) = (model.kbar, model.zeta, model.q);
    match form {
        LatticeForm::Shallow => {
            let u = 4.0 * lb * lb - 1.0;
            if u.abs() < 1e-12 {
                return Err(Error::Singularity(format!("4(l+β)² = 1 at l+β = {lb}")));
            }
            // ω(l+β): the classical frequency of the band at the resonance
            let t0_cl = 2.0 * PI / model.omega;
            let t0_rev = 4.0 * PI / (k * z);
            let spr_den = 2.0 * nn * z * k * q * q * lb * (4.0 * lb * lb + 1.0);
            let t_spr = if spr_den == 0.0 {
                f64::INFINITY
            } else {
                PI * u.powi(4) / spr_den.abs()
            };
            Ok(TimeScales {
                t_cl: t0_cl * (1.0 + 0.5 * q * q / (u * u)) * model.delta,
                t_rev: t0_rev * (1.0 - 0.5 * q * q * (12.0 * lb * lb + 1.0) / u.powi(3)),
                t_spr,
                method: TimeMethod::LatticeShallow,
            })
        }
        LatticeForm::Deep => {
            let rq = q.sqrt();
            let c = 4.0 * lb + 1.0;
            let pre = nn * k * z;
            Ok(TimeScales {
                t_cl: 2.0 * PI / (pre * (rq - c / 8.0)),
                t_rev: 8.0 * PI / pre * (1.0 - 3.0 * c / (16.0 * rq)),
                t_spr: 32.0 * PI * rq / pre,
                method: TimeMethod::LatticeDeep,
            })
        }
        LatticeForm::DeepHarmonic => {
            let lattice = model.lattice.ok_or_else(|| {
                Error::Domain("harmonic lattice forms need the lattice parameters".into())
            })?;
            let n = model.n_bar;
            let q8 = lattice.q0.powf(0.125);
            let n4 = (n + 1.0).powf(0.25);
            let sl = model.lambda.sqrt();
            let c = 4.0 * lb + 1.0;
            let sz = z.sqrt();
            let rev_corr = if sl == 0.0 {
                f64::INFINITY
            } else {
                3.0 * c * q8 * k * sz / (32.0 * n4 * sl)
            };
            Ok(TimeScales {
                t_cl: 16.0 * PI * q8 / (nn * sz) / (16.0 * n4 * sl - c * q8 * k * sz),
                t_rev: 8.0 * PI / (nn * k * z) * (1.0 - rev_corr),
                t_spr: 64.0 * PI * n4 * sl / (nn * k * k * z.powf(1.5) * q8),
                method: TimeMethod::LatticeDeepHarmonic,
            })
        }
    }
}

/// Times by any driven method, for sweeps.
pub fn times_by_method(model: &ResonanceModel, method: TimeMethod) -> Result<TimeScales> {
    match method {
        TimeMethod::NumericExact => times_numeric(model),
        TimeMethod::DelicateGeneral => times_delicate(model).map(|(t, _)| t),
        TimeMethod::RobustGeneral => times_robust(model, RobustForm::GeneralN),
        TimeMethod::RobustPrimary => times_robust(model, RobustForm::PrimarySimplified),
        TimeMethod::LatticeShallow => driven_lattice_times(model, LatticeForm::Shallow),
        TimeMethod::LatticeDeep => driven_lattice_times(model, LatticeForm::Deep),
        TimeMethod::LatticeDeepHarmonic => driven_lattice_times(model, LatticeForm::DeepHarmonic),
        TimeMethod::UndrivenShallow | TimeMethod::UndrivenDeep => {
            let lattice = model.lattice.ok_or_else(|| {
                Error::Domain("undriven times need the lattice parameters".into())
            })?;
            let regime = if method == TimeMethod::UndrivenShallow {
                Regime::Shallow
            } else {
                Regime::Deep
            };
            Ok(undriven_times(&lattice, model.n_bar as u32, regime)?.recoil_to_drive(model.kbar))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub method: TimeMethod,
    pub q: f64,
    pub nu: f64,
    /// `Err` carries the error text; the sweep itself never aborts.
    pub times: std::result::Result<TimeScales, String>,
}

impl SweepRow {
    /// Short tags for the CSV `flags` column.
    pub fn flags(&self) -> String {
        match &self.times {
            Err(e) => format!("error:{}", e.replace([',', '\n'], ";")),
            Ok(t) => {
                let mut f = Vec::new();
                if !t.all_positive() {
                    f.push("nonpositive");
                }
                if !t.ordered() {
                    f.push("unordered");
                }
                if t.t_spr.is_infinite() {
                    f.push("spr_infinite");
                }
                f.join("|")
            }
        }
    }
}

/// One row per `(λ, method)`, computed in parallel; rows that fail carry the error.
pub fn sweep_times(
    template: &ResonanceModel,
    lambdas: &[f64],
    methods: &[TimeMethod],
) -> Result<Vec<SweepRow>> {
    if lambdas.is_empty() || methods.is_empty() {
        return domain("sweep needs at least one λ and one method");
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l >= 0.0)) {
        return domain(format!("sweep λ must be >= 0, got {bad}"));
    }
    let pairs: Vec<(f64, TimeMethod)> = lambdas
        .iter()
        .flat_map(|&l| methods.iter().map(move |&m| (l, m)))
        .collect();
    Ok(pairs
        .par_iter()
        .map(|&(lambda, method)| {
            let model = template.with_lambda(lambda);
            let (q, nu) = model
                .as_ref()
                .map(|m| (m.q, m.nu()))
                .unwrap_or((f64::NAN, f64::NAN));
            let times = model
                .and_then(|m| times_by_method(&m, method))
                .map_err(|e| e.to_string());
            SweepRow {
                lambda,
                method,
                q,
                nu,
                times,
            }
        })
        .collect())
}
