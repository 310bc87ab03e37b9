//! Run configuration read from TOML. Unknown keys are rejected and every
//! physical value is checked by the owning module when the file is loaded.
//!
//! ```toml
//! [lattice]
//! V0 = 16.0
//! kbar = 0.5
//! lambda = 1.5
//!
//! [resonance]
//! N = 1
//! M = 0
//! l = 0
//! n = 2
//! regime = "deep"
//!
//! [evolve]
//! grid = { points = 2048, cells = 16 }
//! dt = 0.012566370614359173
//! n_steps = 20000
//! frame = "lab"
//! packet = { z0 = 1.5707963267948966, delta_z = 0.5, band = 2.0 }  # or p0 / delta_p
//!
//! [poincare]
//! seeds = 40
//! periods = 300
//!
//! [sweep]
//! lambda_min = 1.0
//! lambda_max = 6.0
//! n_points = 50
//! methods = ["lattice_deep", "robust_general"]
//! ```

use crate::classical::SectionConfig;
use crate::error::{Error, Result};
use crate::quantum::{
    band_matched_momentum, init_gaussian, uncertainty_mismatch, DriveConfig, Frame, SpatialGrid,
    WaveFunction,
};
use crate::recipes;
use crate::spectrum::{
    lattice_resonance_model, CouplingMode, LatticeParams, Regime, ResonanceModel,
};
use crate::times::TimeMethod;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    pub resonance: ResonanceSection,
    pub evolve: EvolveSection,
    pub poincare: PoincareSection,
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSection {
    #[serde(rename = "V0")]
    pub v0: f64,
    pub kbar: f64,
    pub lambda: f64,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self {
            v0: recipes::DEEP_V0,
            kbar: recipes::KBAR,
            lambda: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonanceSection {
    #[serde(rename = "N")]
    pub n_res: u32,
    #[serde(rename = "M")]
    pub m_res: i64,
    pub l: i64,
    /// Undriven band the resonance is built on.
    pub n: u32,
    pub regime: Regime,
    /// Coupling matrix element; the harmonic approximation when absent.
    pub coupling: Option<f64>,
}

impl Default for ResonanceSection {
    fn default() -> Self {
        Self {
            n_res: 1,
            m_res: 0,
            l: 0,
            n: recipes::DEEP_BAND,
            regime: Regime::Deep,
            coupling: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub points: usize,
    pub cells: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            points: SpatialGrid::DEFAULT_POINTS,
            cells: SpatialGrid::DEFAULT_CELLS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PacketSection {
    pub z0: f64,
    /// Mean momentum; exclusive with `band`.
    pub p0: Option<f64>,
    /// Target mean undriven band index, reached by choosing `p0`. Band 2
    /// when neither this nor `p0` is given.
    pub band: Option<f64>,
    /// Position spread; 0.5 when neither this nor `delta_p` is given.
    pub delta_z: Option<f64>,
    pub delta_p: Option<f64>,
}

impl Default for PacketSection {
    fn default() -> Self {
        Self {
            z0: recipes::CENTRAL_WELL,
            p0: None,
            band: None,
            delta_z: None,
            delta_p: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveSection {
    pub grid: GridSection,
    pub dt: f64,
    pub n_steps: usize,
    pub frame: Frame,
    /// Density snapshot stride in steps.
    pub snapshot_stride: usize,
    pub packet: PacketSection,
}

impl Default for EvolveSection {
    fn default() -> Self {
        Self {
            grid: GridSection::default(),
            dt: DriveConfig::DEFAULT_DT,
            n_steps: 20_000,
            frame: Frame::Lab,
            snapshot_stride: 50,
            packet: PacketSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoincareSection {
    pub seeds: usize,
    pub periods: usize,
    pub steps_per_period: usize,
    /// Momentum half-range of the seed grid; `2√Ṽ0` when absent.
    pub p_max: Option<f64>,
}

impl Default for PoincareSection {
    fn default() -> Self {
        Self {
            seeds: 40,
            periods: 300,
            steps_per_period: SectionConfig::DEFAULT_STEPS_PER_PERIOD,
            p_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_points: usize,
    pub methods: Vec<TimeMethod>,
}

impl Default for SweepSection {
    fn default() -> Self {
        let (lambda_min, lambda_max) = recipes::ROBUST_WINDOW;
        Self {
            lambda_min,
            lambda_max,
            n_points: 50,
            methods: vec![
                TimeMethod::LatticeDeep,
                TimeMethod::RobustGeneral,
                TimeMethod::NumericExact,
            ],
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Canonical TOML of the resolved configuration (defaults filled in).
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Builds every derived object once so errors surface at load time.
    pub fn validate(&self) -> Result<()> {
        self.lattice()?;
        self.model()?;
        let grid = self.grid()?;
        self.drive()?.validate()?;
        let p = &self.evolve.packet;
        if p.p0.is_some() && p.band.is_some() {
            return Err(Error::Config(
                "packet: give either p0 or band, not both".into(),
            ));
        }
        if !p.z0.is_finite() {
            return Err(Error::Config("packet: z0 must be finite".into()));
        }
        let dz = self.packet_width()?;
        if dz < 2.0 * grid.dz() {
            return Err(Error::Config(format!(
                "packet: width {dz} is below two grid spacings"
            )));
        }
        if self.evolve.n_steps == 0 || self.evolve.snapshot_stride == 0 {
            return Err(Error::Config(
                "evolve: n_steps and snapshot_stride must be positive".into(),
            ));
        }
        if self.poincare.seeds == 0 {
            return Err(Error::Config("poincare: need at least one seed".into()));
        }
        self.section_config(self.lattice.lambda)?.validate()?;
        let s = &self.sweep;
        if s.n_points == 0
            || s.methods.is_empty()
            || !(s.lambda_min >= 0.0)
            || !(s.lambda_max >= s.lambda_min)
        {
            return Err(Error::Config(
                "sweep: need n_points > 0, methods, and 0 <= lambda_min <= lambda_max".into(),
            ));
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<LatticeParams> {
        LatticeParams::new(self.lattice.v0, self.lattice.kbar, self.lattice.lambda)
    }

    pub fn model(&self) -> Result<ResonanceModel> {
        let r = &self.resonance;
        let coupling = r
            .coupling
            .map_or(CouplingMode::HarmonicApprox, CouplingMode::UserSupplied);
        lattice_resonance_model(
            &self.lattice()?,
            r.n,
            r.n_res,
            r.m_res,
            r.l,
            r.regime,
            coupling,
        )
    }

    pub fn grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.evolve.grid.points, self.evolve.grid.cells, 0.0)
    }

    pub fn drive(&self) -> Result<DriveConfig> {
        let lat = self.lattice()?;
        let drive = DriveConfig::new(lat.v0_tilde, lat.kbar, lat.lambda)
            .with_frame(self.evolve.frame)
            .with_dt(self.evolve.dt);
        drive.validate()?;
        Ok(drive)
    }

    pub fn duration(&self) -> f64 {
        self.evolve.dt * self.evolve.n_steps as f64
    }

    /// `Δz`, taking the minimum-uncertainty partner of `Δp` when only that is given.
    pub fn packet_width(&self) -> Result<f64> {
        let p = &self.evolve.packet;
        let kbar = self.lattice.kbar;
        match (p.delta_z, p.delta_p) {
            (Some(dz), dp) => {
                if let Some(dp) = dp {
                    let mismatch = uncertainty_mismatch(dz, dp, kbar);
                    if mismatch > 1e-9 {
                        log::warn!(
                            "packet: Δz·Δp differs from k̄/2 by {:.1}%; the Gaussian has Δp = {}",
                            100.0 * mismatch,
                            kbar / (2.0 * dz)
                        );
                    }
                }
                if !(dz > 0.0) {
                    return Err(Error::Config(format!(
                        "packet: delta_z must be positive, got {dz}"
                    )));
                }
                Ok(dz)
            }
            (None, Some(dp)) if dp > 0.0 => {
                log::info!("packet: Δz = k̄/(2Δp) = {} assumed", kbar / (2.0 * dp));
                Ok(kbar / (2.0 * dp))
            }
            (None, None) => Ok(recipes::PACKET_WIDTH),
            (None, Some(dp)) => Err(Error::Config(format!(
                "packet: delta_p must be positive, got {dp}"
            ))),
        }
    }

    pub fn packet(&self, grid: &SpatialGrid) -> Result<WaveFunction> {
        let p = &self.evolve.packet;
        let lat = self.lattice()?;
        let dz = self.packet_width()?;
        let p0 = match (p.p0, p.band) {
            (Some(p0), _) => p0,
            (None, Some(band)) => {
                band_matched_momentum(grid, lat.v0_tilde, lat.kbar, p.z0, dz, band)?
            }
            (None, None) => band_matched_momentum(
                grid,
                lat.v0_tilde,
                lat.kbar,
                p.z0,
                dz,
                recipes::DEEP_BAND as f64,
            )?,
        };
        init_gaussian(grid, p.z0, p0, dz, lat.kbar)
    }

    /// Seeds on the configured grid, for modulation `lambda`.
    pub fn section_config(&self, lambda: f64) -> Result<SectionConfig> {
        let lat = self.lattice()?;
        let ps = &self.poincare;
        let (nz, np) = seed_layout(ps.seeds);
        let p_max = ps.p_max.unwrap_or(2.0 * lat.v0_tilde.sqrt());
        let mut cfg =
            SectionConfig::new(lambda, lat.v0_tilde, ps.periods).with_seed_grid(nz, np, p_max);
        cfg.initial_conditions.truncate(ps.seeds);
        cfg.steps_per_period = ps.steps_per_period;
        Ok(cfg)
    }

    pub fn sweep_lambdas(&self) -> Vec<f64> {
        recipes::linspace(
            self.sweep.lambda_min,
            self.sweep.lambda_max,
            self.sweep.n_points,
        )
    }
}

/// `nz × np ≥ seeds` with `nz ≈ 2 np` (the cell is wider in z than in p).
fn seed_layout(seeds: usize) -> (usize, usize) {
    let np = ((seeds as f64 / 2.0).sqrt().ceil() as usize).max(1);
    (seeds.div_ceil(np), np)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_layout_covers_request() {
        for s in [1, 7, 40, 41, 100] {
            let (a, b) = seed_layout(s);
            assert!(a * b >= s);
        }
        assert_eq!(seed_layout(40), (8, 5));
    }
}
