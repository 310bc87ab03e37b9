//! Wave-packet dynamics in the driven lattice.
//!
//! Scaled Schrödinger equation `i k̄ ∂_τ ψ = H̃ ψ` with
//!
//! ```text
//! comoving:  H̃ = −(k̄²/2) ∂²_z + (Ṽ0/2) cos 2z + λ z sin τ
//! lab:       H̃ = −(k̄²/2) ∂²_z + (Ṽ0/2) cos 2(z + λ sin τ)
//! ```
//!
//! The lattice period is `π`. Wells of `+(Ṽ0/2) cos 2z` sit at `z = π/2 + mπ`.

mod effective;
mod eigen;
mod grid;
mod propagate;
mod recurrence;

pub use effective::{effective_evolve, EffectiveTrajectory};
pub use eigen::{band_populations, mean_band, undriven_eigenbasis, Eigenstate};
pub use grid::{SpatialGrid, WaveFunction};
pub use propagate::{
    evolve, frame_transform, DriveConfig, Frame, FrameDirection, Propagator, RecordSpec,
    TrajectoryRecord, NORM_TOLERANCE,
};
pub use recurrence::{
    detect_recurrences, RecurrenceEstimate, RecurrenceHints, Recurrences, PROMINENCE_THRESHOLD,
};

use crate::error::{domain, Error, Result};
use num_complex::Complex64;

/// Normalized Gaussian `exp(−(z−z0)²/4Δz² + i p0 z/k̄)`, periodized over the grid.
///
/// The packet has `Δp = k̄/(2Δz)`; see [`uncertainty_mismatch`] for checking a
/// requested `(Δz, Δp)` pair.
pub fn init_gaussian(
    grid: &SpatialGrid,
    z0: f64,
    p0: f64,
    delta_z: f64,
    kbar: f64,
) -> Result<WaveFunction> {
    if !(delta_z > 0.0) {
        return domain(format!("packet width must be positive, got {delta_z}"));
    }
    if delta_z < 2.0 * grid.dz() {
        return domain(format!(
            "packet width {delta_z} is below two grid spacings ({})",
            2.0 * grid.dz()
        ));
    }
    if !(kbar > 0.0) {
        return domain(format!(
            "effective Planck constant must be positive, got {kbar}"
        ));
    }
    let l = grid.length();
    // images beyond a few widths are below roundoff
    let images = ((8.0 * delta_z / l).ceil() as i64).max(1);
    let amps = grid
        .positions()
        .map(|z| {
            let mut sum = Complex64::new(0.0, 0.0);
            for m in -images..=images {
                let d = z - z0 + m as f64 * l;
                sum += (-(d * d) / (4.0 * delta_z * delta_z)).exp()
                    * Complex64::from_polar(1.0, p0 * d / kbar);
            }
            // the image sum carries the phase relative to z0; restore the absolute phase
            sum * Complex64::from_polar(1.0, p0 * z0 / kbar)
        })
        .collect();
    let mut psi = WaveFunction::new(grid.clone(), amps, 0.0)?;
    psi.normalize();
    Ok(psi)
}

/// Minimum-uncertainty width `Δz = k̄/(2Δp)`.
pub fn min_uncertainty_width(delta_p: f64, kbar: f64) -> f64 {
    kbar / (2.0 * delta_p)
}

/// Relative deviation of `Δz·Δp` from the minimum `k̄/2`.
pub fn uncertainty_mismatch(delta_z: f64, delta_p: f64, kbar: f64) -> f64 {
    (delta_z * delta_p / (0.5 * kbar) - 1.0).abs()
}

/// Inverse participation ratio `∫|ψ|⁴ dz` (large for localized states).
pub fn inverse_participation_ratio(psi: &WaveFunction) -> f64 {
    psi.amplitudes()
        .iter()
        .map(|a| a.norm_sqr().powi(2))
        .sum::<f64>()
        * psi.grid().dz()
}

/// Momentum `p0 ≥ 0` that puts the mean undriven band index of the Gaussian
/// `(z0, p0, Δz)` at `band`, found by bisection on the band populations.
pub fn band_matched_momentum(
    grid: &SpatialGrid,
    v0_tilde: f64,
    kbar: f64,
    z0: f64,
    delta_z: f64,
    band: f64,
) -> Result<f64> {
    if !(band >= 0.0) {
        return domain(format!("target band must be non-negative, got {band}"));
    }
    let count = (band.ceil() as usize + 8) * grid.n_cells();
    let basis = undriven_eigenbasis(grid, v0_tilde, kbar, count.min(grid.n_points() / 2))?;
    let nbar = |p0: f64| -> Result<f64> {
        Ok(mean_band(
            &init_gaussian(grid, z0, p0, delta_z, kbar)?,
            &basis,
        ))
    };
    let (mut lo, mut hi) = (0.0, kbar.max(0.5));
    if nbar(lo)? >= band {
        return Ok(0.0);
    }
    let mut doublings = 0;
    while nbar(hi)? < band {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 12 || hi > grid.max_momentum(kbar) {
            return Err(Error::Convergence {
                what: "band-matched momentum",
                detail: format!("band {band} not reached below p0 = {hi}"),
            });
        }
    }
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if nbar(mid)? < band {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
