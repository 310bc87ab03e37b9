use super::grid::{inner, SpatialGrid, WaveFunction};
use super::inverse_participation_ratio;
use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;

/// Largest tolerated relative norm change over a run.
pub const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Phase-modulated lattice `(Ṽ0/2) cos 2(z + λ sin τ)`; periodic, the default.
    Lab,
    /// Static lattice plus the inertial force `λ z sin τ`; needs a grid wide
    /// enough that the packet never reaches the edges.
    Comoving,
}

impl Frame {
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::Lab => "lab",
            Frame::Comoving => "comoving",
        }
    }
}

impl FromStr for Frame {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lab" => Ok(Frame::Lab),
            "comoving" => Ok(Frame::Comoving),
            _ => Err(Error::Config(format!("unknown frame '{s}' (lab|comoving)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameDirection {
    ToLab,
    ToComoving,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub v0_tilde: f64,
    pub kbar: f64,
    pub lambda: f64,
    pub frame: Frame,
    pub dt: f64,
}

impl DriveConfig {
    pub const DEFAULT_DT: f64 = 2.0 * PI / 500.0;
    pub const MAX_DT: f64 = 2.0 * PI / 200.0;

    pub fn new(v0_tilde: f64, kbar: f64, lambda: f64) -> Self {
        Self {
            v0_tilde,
            kbar,
            lambda,
            frame: Frame::Lab,
            dt: Self::DEFAULT_DT,
        }
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kbar > 0.0) || !self.kbar.is_finite() {
            return domain(format!(
                "effective Planck constant must be positive, got {}",
                self.kbar
            ));
        }
        if !self.v0_tilde.is_finite() || !self.lambda.is_finite() {
            return domain("lattice depth and drive amplitude must be finite");
        }
        if !(self.dt > 0.0) || self.dt > Self::MAX_DT * (1.0 + 1e-12) {
            return domain(format!("time step {} outside (0, 2π/200]", self.dt));
        }
        Ok(())
    }
}

/// Inertial displacement `ξ(τ) = −λ sin τ`, velocity and the gauge phase
/// `S(τ) = λ²(τ/4 − 3 sin 2τ / 8)` linking the two frames via
/// `ψ_lab(z) = exp[i(ξ̇ z + S)/k̄] ψ_com(z − ξ)`.
fn frame_shift(tau: f64, lambda: f64) -> (f64, f64, f64) {
    let xi = -lambda * tau.sin();
    let xi_dot = -lambda * tau.cos();
    let s = lambda * lambda * (0.25 * tau - 0.375 * (2.0 * tau).sin());
    (xi, xi_dot, s)
}

/// Which samples to keep during [`evolve`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecordSpec {
    /// Comoving density and IPR every this many steps (`None` keeps only the ends).
    pub snapshot_stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub grid: SpatialGrid,
    pub dt: f64,
    /// One entry per step, starting at `τ = 0`.
    pub times: Vec<f64>,
    /// Comoving-frame autocorrelation `⟨ψ(0)|ψ(τ)⟩`.
    pub autocorrelation: Vec<Complex64>,
    pub snapshot_times: Vec<f64>,
    /// Comoving-frame densities `|ψ(z)|²`.
    pub densities: Vec<Vec<f64>>,
    pub ipr: Vec<f64>,
    pub max_norm_drift: f64,
}

impl TrajectoryRecord {
    pub fn survival(&self) -> Vec<f64> {
        self.autocorrelation.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Split-operator stepper with cached FFT plans and phase tables.
pub struct Propagator {
    grid: SpatialGrid,
    config: DriveConfig,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    positions: Vec<f64>,
    wavenumbers: Vec<f64>,
}

impl Propagator {
    pub fn new(grid: &SpatialGrid, config: &DriveConfig) -> Result<Self> {
        config.validate()?;
        let mut planner = FftPlanner::new();
        let n = grid.n_points();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch = vec![
            Complex64::new(0.0, 0.0);
            forward
                .get_inplace_scratch_len()
                .max(inverse.get_inplace_scratch_len())
        ];
        let mut prop = Self {
            grid: grid.clone(),
            config: *config,
            forward,
            inverse,
            scratch,
            kinetic: Vec::new(),
            positions: grid.positions().collect(),
            wavenumbers: grid.wavenumbers(),
        };
        prop.set_dt(config.dt);
        Ok(prop)
    }

    fn set_dt(&mut self, dt: f64) {
        let n = self.grid.n_points() as f64;
        let kbar = self.config.kbar;
        self.config.dt = dt;
        self.kinetic = self
            .wavenumbers
            .iter()
            .map(|k| Complex64::from_polar(1.0 / n, -0.5 * kbar * k * k * dt))
            .collect();
    }

    pub fn config(&self) -> &DriveConfig {
        &self.config
    }

    fn potential(&self, z: f64, tau: f64) -> f64 {
        let c = &self.config;
        match c.frame {
            Frame::Lab => 0.5 * c.v0_tilde * (2.0 * (z + c.lambda * tau.sin())).cos(),
            Frame::Comoving => 0.5 * c.v0_tilde * (2.0 * z).cos() + c.lambda * z * tau.sin(),
        }
    }

    fn potential_half(&self, psi: &mut [Complex64], tau: f64) {
        let f = -0.5 * self.config.dt / self.config.kbar;
        for (a, &z) in psi.iter_mut().zip(&self.positions) {
            *a *= Complex64::from_polar(1.0, f * self.potential(z, tau));
        }
    }

    /// One Strang step `V/2 · K · V/2` from `tau` to `tau + dt`; each potential
    /// half is evaluated at the midpoint of its own half interval.
    pub fn step(&mut self, psi: &mut [Complex64], tau: f64) {
        let dt = self.config.dt;
        self.potential_half(psi, tau + 0.25 * dt);
        self.forward.process_with_scratch(psi, &mut self.scratch);
        for (a, k) in psi.iter_mut().zip(&self.kinetic) {
            *a *= k;
        }
        self.inverse.process_with_scratch(psi, &mut self.scratch);
        self.potential_half(psi, tau + 0.75 * dt);
    }

    /// Translate by `shift` spectrally: `ψ(z) → ψ(z − shift)`.
    fn translate(&mut self, psi: &mut [Complex64], shift: f64) {
        let n = psi.len() as f64;
        self.forward.process_with_scratch(psi, &mut self.scratch);
        for (a, k) in psi.iter_mut().zip(&self.wavenumbers) {
            *a *= Complex64::from_polar(1.0 / n, -k * shift);
        }
        self.inverse.process_with_scratch(psi, &mut self.scratch);
    }

    /// Map amplitudes between frames at time `tau` in place.
    pub fn transform(&mut self, psi: &mut [Complex64], tau: f64, direction: FrameDirection) {
        let (xi, xi_dot, s) = frame_shift(tau, self.config.lambda);
        let kbar = self.config.kbar;
        match direction {
            FrameDirection::ToLab => {
                self.translate(psi, xi);
                for (a, &z) in psi.iter_mut().zip(&self.positions) {
                    *a *= Complex64::from_polar(1.0, (xi_dot * z + s) / kbar);
                }
            }
            FrameDirection::ToComoving => {
                for (a, &z) in psi.iter_mut().zip(&self.positions) {
                    *a *= Complex64::from_polar(1.0, -(xi_dot * z + s) / kbar);
                }
                self.translate(psi, -xi);
            }
        }
    }

    fn comoving_copy(&mut self, psi: &[Complex64], tau: f64, out: &mut Vec<Complex64>) {
        out.clear();
        out.extend_from_slice(psi);
        if self.config.frame == Frame::Lab {
            self.transform(out, tau, FrameDirection::ToComoving);
        }
    }

    /// Propagate `psi0` (given in the configured frame at `τ = psi0.time`) for
    /// `duration`. The step is shrunk uniformly so the run ends exactly.
    pub fn run(
        &mut self,
        psi0: &WaveFunction,
        duration: f64,
        record: &RecordSpec,
    ) -> Result<(TrajectoryRecord, WaveFunction)> {
        if psi0.grid() != &self.grid {
            return domain("wave function grid does not match the propagator grid");
        }
        if !(duration >= 0.0) || !duration.is_finite() {
            return domain(format!(
                "duration must be finite and non-negative, got {duration}"
            ));
        }
        let requested = self.config.dt;
        let n_steps = (duration / requested - 1e-9).ceil().max(0.0) as usize;
        if n_steps > 0 {
            self.set_dt(duration / n_steps as f64);
        }
        let dt = self.config.dt;
        let dz = self.grid.dz();
        let t0 = psi0.time;
        let mut psi = psi0.amplitudes().to_vec();
        let norm0 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>() * dz;
        if !(norm0 > 0.0) {
            return domain("initial state has zero norm");
        }

        let mut reference = Vec::with_capacity(psi.len());
        self.comoving_copy(&psi, t0, &mut reference);
        let mut work = Vec::with_capacity(psi.len());

        let mut rec = TrajectoryRecord {
            grid: self.grid.clone(),
            dt,
            times: Vec::with_capacity(n_steps + 1),
            autocorrelation: Vec::with_capacity(n_steps + 1),
            snapshot_times: Vec::new(),
            densities: Vec::new(),
            ipr: Vec::new(),
            max_norm_drift: 0.0,
        };
        let stride = record.snapshot_stride.unwrap_or(usize::MAX).max(1);
        let snapshot = |rec: &mut TrajectoryRecord, tau: f64, com: &[Complex64]| -> Result<()> {
            let wf = WaveFunction::new(rec.grid.clone(), com.to_vec(), tau)?;
            rec.snapshot_times.push(tau);
            rec.ipr
                .push(inverse_participation_ratio(&wf) / norm0.powi(2));
            rec.densities
                .push(com.iter().map(|a| a.norm_sqr() / norm0).collect());
            Ok(())
        };

        rec.times.push(t0);
        rec.autocorrelation.push(Complex64::new(1.0, 0.0));
        snapshot(&mut rec, t0, &reference)?;

        for i in 0..n_steps {
            let tau = t0 + i as f64 * dt;
            self.step(&mut psi, tau);
            let t_next = t0 + (i + 1) as f64 * dt;
            let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>() * dz;
            let drift = (norm / norm0 - 1.0).abs();
            rec.max_norm_drift = rec.max_norm_drift.max(drift);
            if drift > NORM_TOLERANCE || !norm.is_finite() {
                return Err(Error::NormDrift {
                    norm: norm / norm0,
                    tau: t_next,
                    tolerance: NORM_TOLERANCE,
                });
            }
            self.comoving_copy(&psi, t_next, &mut work);
            rec.times.push(t_next);
            rec.autocorrelation
                .push(inner(&reference, &work) * dz / norm0);
            if (i + 1) % stride == 0 || i + 1 == n_steps {
                snapshot(&mut rec, t_next, &work)?;
            }
        }
        self.set_dt(requested);
        let final_state = WaveFunction::new(self.grid.clone(), psi, t0 + n_steps as f64 * dt)?;
        Ok((rec, final_state))
    }
}

/// Propagate `psi0` for `duration` under `config`; see [`Propagator::run`].
pub fn evolve(
    psi0: &WaveFunction,
    config: &DriveConfig,
    duration: f64,
    record: &RecordSpec,
) -> Result<(TrajectoryRecord, WaveFunction)> {
    Propagator::new(psi0.grid(), config)?.run(psi0, duration, record)
}

/// Convert a state between the lab and comoving frames at `psi.time`.
///
/// At `cos τ = 0` the velocity term vanishes but the displacement `ξ = ∓λ`
/// does not, so the map is a translation plus a global phase there.
pub fn frame_transform(
    psi: &WaveFunction,
    lambda: f64,
    kbar: f64,
    direction: FrameDirection,
) -> Result<WaveFunction> {
    let config = DriveConfig::new(0.0, kbar, lambda);
    let mut prop = Propagator::new(psi.grid(), &config)?;
    let mut amps = psi.amplitudes().to_vec();
    prop.transform(&mut amps, psi.time, direction);
    WaveFunction::new(psi.grid().clone(), amps, psi.time)
}
