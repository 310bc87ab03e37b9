use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Periodic grid of `n_cells` lattice periods (`π` each), centred on `centre`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    n_points: usize,
    n_cells: usize,
    z_min: f64,
}

impl SpatialGrid {
    pub const DEFAULT_POINTS: usize = 2048;
    pub const DEFAULT_CELLS: usize = 16;

    pub fn new(n_points: usize, n_cells: usize, centre: f64) -> Result<Self> {
        if !n_points.is_power_of_two() || n_points < 16 {
            return domain(format!(
                "grid size must be a power of two >= 16, got {n_points}"
            ));
        }
        if n_cells == 0 {
            return domain("grid needs at least one lattice cell");
        }
        if n_points / n_cells < 8 {
            return domain(format!(
                "{n_points} points over {n_cells} cells leaves fewer than 8 points per cell"
            ));
        }
        Ok(Self {
            n_points,
            n_cells,
            z_min: centre - 0.5 * PI * n_cells as f64,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_min + self.length()
    }

    pub fn length(&self) -> f64 {
        PI * self.n_cells as f64
    }

    pub fn dz(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn position(&self, i: usize) -> f64 {
        self.z_min + i as f64 * self.dz()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.position(i))
    }

    /// Wavenumbers in FFT order: `2πm/L` with `m = 0, 1, …, N/2−1, −N/2, …, −1`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points as i64;
        let dk = 2.0 * PI / self.length();
        (0..n)
            .map(|m| dk * if m < n / 2 { m } else { m - n } as f64)
            .collect()
    }

    /// Largest representable momentum `k̄·k_max`.
    pub fn max_momentum(&self, kbar: f64) -> f64 {
        kbar * PI / self.dz()
    }
}

/// Complex amplitudes on a [`SpatialGrid`] at scaled time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: SpatialGrid,
    amps: Vec<Complex64>,
    pub time: f64,
}

impl WaveFunction {
    pub fn new(grid: SpatialGrid, amps: Vec<Complex64>, time: f64) -> Result<Self> {
        if amps.len() != grid.n_points() {
            return Err(Error::Domain(format!(
                "{} amplitudes for a grid of {} points",
                amps.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, amps, time })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// `Σ|ψ|² dz`.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dz()
    }

    pub fn normalize(&mut self) {
        let s = 1.0 / self.norm().sqrt();
        self.amps.iter_mut().for_each(|a| *a *= s);
    }

    /// `⟨self|other⟩ = Σ ψ̄ φ dz`.
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        inner(&self.amps, &other.amps) * self.grid.dz()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨z⟩` on the unwrapped grid coordinate.
    pub fn mean_position(&self) -> f64 {
        self.grid
            .positions()
            .zip(&self.amps)
            .map(|(z, a)| z * a.norm_sqr())
            .sum::<f64>()
            * self.grid.dz()
            / self.norm()
    }

    /// `(⟨p⟩, Δp)` with `p = k̄ k`, from the discrete Fourier transform.
    pub fn momentum_moments(&self, kbar: f64) -> (f64, f64) {
        let mut buf = self.amps.clone();
        FftPlanner::new()
            .plan_fft_forward(buf.len())
            .process(&mut buf);
        let ks = self.grid.wavenumbers();
        let total: f64 = buf.iter().map(|a| a.norm_sqr()).sum();
        let mean: f64 = buf
            .iter()
            .zip(&ks)
            .map(|(a, k)| a.norm_sqr() * k)
            .sum::<f64>()
            / total;
        let var: f64 = buf
            .iter()
            .zip(&ks)
            .map(|(a, k)| a.norm_sqr() * (k - mean).powi(2))
            .sum::<f64>()
            / total;
        (kbar * mean, kbar * var.sqrt())
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
