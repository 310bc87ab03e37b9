//! Parameter sets of the reference figures, shared by the validation report
//! and the command-line figure recipes.

use crate::classical::SectionConfig;
use crate::error::Result;
use crate::quantum::{
    band_matched_momentum, init_gaussian, DriveConfig, RecurrenceHints, SpatialGrid, WaveFunction,
};
use crate::spectrum::{
    lattice_resonance_model, undriven_band_params, CouplingMode, LatticeParams, Regime,
    ResonanceModel,
};
use crate::times::{driven_lattice_times, undriven_times, LatticeForm, TimeScales};
use std::f64::consts::PI;

/// Depth of the deep reference lattice, recoil units.
pub const DEEP_V0: f64 = 16.0;
pub const KBAR: f64 = 0.5;
/// Band of the deep reference resonance and of the figure 4 packet.
pub const DEEP_BAND: u32 = 2;
/// Shallow sweep lattice: `q0 = 0.5`, band 3, supplied coupling.
pub const SHALLOW_V0: f64 = 2.0;
pub const SHALLOW_BAND: u32 = 3;
pub const SHALLOW_COUPLING: f64 = 0.5;
/// `λ` windows where the weak- and strong-coupling forms apply.
pub const DELICATE_WINDOW: (f64, f64) = (0.005, 0.1);
pub const ROBUST_WINDOW: (f64, f64) = (1.0, 6.0);
/// Packet width used for the deep-lattice runs.
pub const PACKET_WIDTH: f64 = 0.5;
/// Figure 2 parameters; `Δz = k̄/(2Δp)`.
pub const FIG2_LAMBDA: f64 = 3.0;
pub const FIG2_V0_TILDE: f64 = 0.36;
pub const FIG2_KBAR: f64 = 0.16;
pub const FIG2_DELTA_P: f64 = 0.1;
pub const FIG2_Q: f64 = 85.14;
/// Lowest well of `+(Ṽ0/2) cos 2z` on a grid centred at 0.
pub const CENTRAL_WELL: f64 = PI / 2.0;

pub fn deep_lattice(lambda: f64) -> Result<LatticeParams> {
    LatticeParams::new(DEEP_V0, KBAR, lambda)
}

/// Primary resonance of band 2 in the deep lattice, harmonic coupling.
pub fn deep_model(lambda: f64) -> Result<ResonanceModel> {
    lattice_resonance_model(
        &deep_lattice(lambda)?,
        DEEP_BAND,
        1,
        0,
        0,
        Regime::Deep,
        CouplingMode::HarmonicApprox,
    )
}

pub fn shallow_model(lambda: f64) -> Result<ResonanceModel> {
    let lat = LatticeParams::new(SHALLOW_V0, KBAR, lambda)?;
    lattice_resonance_model(
        &lat,
        SHALLOW_BAND,
        1,
        0,
        0,
        Regime::Shallow,
        CouplingMode::UserSupplied(SHALLOW_COUPLING),
    )
}

/// `n` equally spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// A ready-to-run packet experiment.
#[derive(Debug, Clone)]
pub struct PacketRun {
    pub psi0: WaveFunction,
    pub drive: DriveConfig,
    pub duration: f64,
    pub hints: RecurrenceHints,
    pub predicted: TimeScales,
}

fn deep_packet(grid: &SpatialGrid, lattice: &LatticeParams) -> Result<WaveFunction> {
    let p0 = band_matched_momentum(
        grid,
        lattice.v0_tilde,
        KBAR,
        CENTRAL_WELL,
        PACKET_WIDTH,
        DEEP_BAND as f64,
    )?;
    init_gaussian(grid, CENTRAL_WELL, p0, PACKET_WIDTH, KBAR)
}

/// Figure 4: `λ = 1.5`, packet in band 2 of the central well, lab frame, run
/// to 1.5 super-revival times.
pub fn fig4_run(grid: &SpatialGrid) -> Result<PacketRun> {
    let model = deep_model(1.5)?;
    let lattice = model.lattice.expect("lattice model");
    let predicted = driven_lattice_times(&model, LatticeForm::Deep)?;
    Ok(PacketRun {
        psi0: deep_packet(grid, &lattice)?,
        drive: DriveConfig::new(lattice.v0_tilde, KBAR, lattice.lambda),
        duration: 1.5 * predicted.t_spr,
        hints: RecurrenceHints {
            t_cl: predicted.t_cl,
            t_rev: Some(predicted.t_rev),
            t_spr: Some(predicted.t_spr),
        },
        predicted,
    })
}

/// Same lattice and packet without drive, run to 1.5 undriven revival times.
pub fn undriven_run(grid: &SpatialGrid) -> Result<PacketRun> {
    let lattice = deep_lattice(0.0)?;
    let predicted = undriven_times(&lattice, DEEP_BAND, Regime::Deep)?.recoil_to_drive(KBAR);
    Ok(PacketRun {
        psi0: deep_packet(grid, &lattice)?,
        drive: DriveConfig::new(lattice.v0_tilde, KBAR, 0.0),
        duration: 1.5 * predicted.t_rev,
        hints: RecurrenceHints {
            t_cl: predicted.t_cl,
            t_rev: Some(predicted.t_rev),
            t_spr: None,
        },
        predicted,
    })
}

/// Figure 2: minimum-uncertainty packet at rest in the central well. Hints come
/// from the deep-lattice forms for band 0 with the coupling set so that `q`
/// equals `FIG2_Q`.
pub fn fig2_run(grid: &SpatialGrid) -> Result<PacketRun> {
    let lattice = LatticeParams::from_scaled(FIG2_V0_TILDE, FIG2_KBAR, FIG2_LAMBDA)?;
    let zeta_sc = 0.5 * undriven_band_params(&lattice, 0, Regime::Deep)?.zeta;
    let v = FIG2_Q * zeta_sc * FIG2_KBAR * FIG2_KBAR / (4.0 * FIG2_LAMBDA);
    let model = lattice_resonance_model(
        &lattice,
        0,
        1,
        0,
        0,
        Regime::Deep,
        CouplingMode::UserSupplied(v),
    )?;
    let predicted = driven_lattice_times(&model, LatticeForm::Deep)?;
    let delta_z = FIG2_KBAR / (2.0 * FIG2_DELTA_P);
    Ok(PacketRun {
        psi0: init_gaussian(grid, CENTRAL_WELL, 0.0, delta_z, FIG2_KBAR)?,
        drive: DriveConfig::new(FIG2_V0_TILDE, FIG2_KBAR, FIG2_LAMBDA),
        duration: 1.5 * predicted.t_rev,
        hints: RecurrenceHints {
            t_cl: predicted.t_cl,
            t_rev: Some(predicted.t_rev),
            t_spr: None,
        },
        predicted,
    })
}

/// Figure 3 panels: `Ṽ0` of the deep lattice, 40 seeds over the cell, 300 periods.
pub fn fig3_section(lambda: f64) -> Result<SectionConfig> {
    let v0_tilde = deep_lattice(lambda)?.v0_tilde;
    Ok(SectionConfig::new(lambda, v0_tilde, 300).with_seed_grid(8, 5, 2.0 * v0_tilde.sqrt()))
}

pub const FIG3_LAMBDAS: [f64; 3] = [0.0, 1.5, 3.0];
