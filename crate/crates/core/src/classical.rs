//! Classical scaled dynamics `ż = p`, `ṗ = Ṽ0 sin 2z − λ sin τ` and
//! stroboscopic sections at `τ = τ0 + 2πm`.

use crate::error::{domain, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub z: f64,
    pub p: f64,
    pub tau: f64,
}

impl PhasePoint {
    pub fn new(z: f64, p: f64, tau: f64) -> Self {
        Self { z, p, tau }
    }

    /// Position reduced to `[−π, π)` and the number of `2π` windings removed.
    pub fn reduced(&self) -> (f64, i64) {
        let w = ((self.z + PI) / (2.0 * PI)).floor();
        (self.z - 2.0 * PI * w, w as i64)
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        (self.z - other.z).hypot(self.p - other.p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionConfig {
    pub lambda: f64,
    pub v0_tilde: f64,
    pub n_periods: usize,
    pub initial_conditions: Vec<PhasePoint>,
    pub steps_per_period: usize,
}

impl SectionConfig {
    pub const MIN_STEPS_PER_PERIOD: usize = 500;
    /// Keeps the undriven energy error below `1e-8` at moderate depths.
    pub const DEFAULT_STEPS_PER_PERIOD: usize = 1000;

    pub fn new(lambda: f64, v0_tilde: f64, n_periods: usize) -> Self {
        Self {
            lambda,
            v0_tilde,
            n_periods,
            initial_conditions: Vec::new(),
            steps_per_period: Self::DEFAULT_STEPS_PER_PERIOD,
        }
    }

    pub fn with_seeds(mut self, seeds: Vec<PhasePoint>) -> Self {
        self.initial_conditions = seeds;
        self
    }

    /// `nz × np` seeds on `[−π/2, π/2) × [−p_max, p_max]` at `τ = 0`.
    pub fn with_seed_grid(self, nz: usize, np: usize, p_max: f64) -> Self {
        let mut seeds = Vec::with_capacity(nz * np);
        for i in 0..nz {
            for j in 0..np {
                let z = -0.5 * PI + PI * (i as f64 + 0.5) / nz as f64;
                let p = if np == 1 {
                    0.0
                } else {
                    -p_max + 2.0 * p_max * j as f64 / (np - 1) as f64
                };
                seeds.push(PhasePoint::new(z, p, 0.0));
            }
        }
        self.with_seeds(seeds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_period < Self::MIN_STEPS_PER_PERIOD {
            return domain(format!(
                "{} steps per period is below {}",
                self.steps_per_period,
                Self::MIN_STEPS_PER_PERIOD
            ));
        }
        if !self.lambda.is_finite() || !self.v0_tilde.is_finite() {
            return domain("drive amplitude and lattice depth must be finite");
        }
        if let Some(bad) = self
            .initial_conditions
            .iter()
            .find(|s| !(s.z.is_finite() && s.p.is_finite() && s.tau.is_finite()))
        {
            return domain(format!("non-finite initial condition {bad:?}"));
        }
        Ok(())
    }

    fn step(&self) -> f64 {
        2.0 * PI / self.steps_per_period as f64
    }
}

/// Fourth-order symmetric composition of leapfrog (Forest–Ruth coefficients).
const FR_THETA: f64 = 1.351_207_191_959_657_8;
const DRIFT: [f64; 4] = [
    0.5 * FR_THETA,
    0.5 * (1.0 - FR_THETA),
    0.5 * (1.0 - FR_THETA),
    0.5 * FR_THETA,
];
const KICK: [f64; 3] = [FR_THETA, 1.0 - 2.0 * FR_THETA, FR_THETA];

/// One step of size `h` (negative `h` runs backwards). Time advances with the
/// drifts, so each kick sees the force at its own substep time.
#[inline]
pub fn symplectic_step(x: &mut PhasePoint, h: f64, lambda: f64, v0_tilde: f64) {
    for i in 0..3 {
        x.z += DRIFT[i] * h * x.p;
        x.tau += DRIFT[i] * h;
        x.p += KICK[i] * h * (v0_tilde * (2.0 * x.z).sin() - lambda * x.tau.sin());
    }
    x.z += DRIFT[3] * h * x.p;
    x.tau += DRIFT[3] * h;
}

/// Advance `n` steps of size `h`.
pub fn integrate_steps(
    start: PhasePoint,
    h: f64,
    n: usize,
    lambda: f64,
    v0_tilde: f64,
) -> PhasePoint {
    let mut x = start;
    for _ in 0..n {
        symplectic_step(&mut x, h, lambda, v0_tilde);
    }
    x
}

/// Full trajectory, one point per step, `n_periods` drive periods from `start`.
pub fn integrate_trajectory(start: PhasePoint, config: &SectionConfig) -> Result<Vec<PhasePoint>> {
    config.validate()?;
    if !(start.z.is_finite() && start.p.is_finite() && start.tau.is_finite()) {
        return domain(format!("non-finite initial condition {start:?}"));
    }
    let h = config.step();
    let n = config.n_periods * config.steps_per_period;
    let mut out = Vec::with_capacity(n + 1);
    let mut x = start;
    out.push(x);
    for _ in 0..n {
        symplectic_step(&mut x, h, config.lambda, config.v0_tilde);
        out.push(x);
    }
    Ok(out)
}

/// Stroboscopic samples of one seed at `τ0 + 2πm`, `m = 0..=n_periods`.
pub fn section_of(start: PhasePoint, config: &SectionConfig) -> Vec<PhasePoint> {
    let h = config.step();
    let mut x = start;
    let mut out = Vec::with_capacity(config.n_periods + 1);
    out.push(x);
    for m in 1..=config.n_periods {
        x = integrate_steps(
            x,
            h,
            config.steps_per_period,
            config.lambda,
            config.v0_tilde,
        );
        // keep the section time free of accumulated roundoff
        x.tau = start.tau + 2.0 * PI * m as f64;
        out.push(x);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub seed: usize,
    pub period: usize,
    pub point: PhasePoint,
}

/// Sections of every seed, tagged by seed index; seeds run in parallel.
pub fn poincare_section(config: &SectionConfig) -> Result<Vec<SectionPoint>> {
    config.validate()?;
    if config.initial_conditions.is_empty() {
        return domain("no initial conditions");
    }
    let per_seed: Vec<Vec<SectionPoint>> = config
        .initial_conditions
        .par_iter()
        .enumerate()
        .map(|(seed, s)| {
            section_of(*s, config)
                .into_iter()
                .enumerate()
                .map(|(period, point)| SectionPoint {
                    seed,
                    period,
                    point,
                })
                .collect()
        })
        .collect();
    Ok(per_seed.into_iter().flatten().collect())
}

/// Stable period-1 orbit of the stroboscopic map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Island {
    pub centre: PhasePoint,
    /// Trace of the one-period monodromy matrix; `|trace| < 2` is elliptic.
    pub trace: f64,
    /// `|P(x) − x|` at the returned centre.
    pub residual: f64,
}

impl Island {
    pub fn is_stable(&self) -> bool {
        self.trace.abs() < 2.0
    }
}

/// Search box for [`find_island`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub z_min: f64,
    pub z_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_z: usize,
    pub n_p: usize,
}

impl SearchBox {
    /// One lattice cell around the well at `π/2`.
    pub fn cell(p_max: f64) -> Self {
        Self {
            z_min: 0.0,
            z_max: PI,
            p_min: -p_max,
            p_max,
            n_z: 40,
            n_p: 40,
        }
    }
}

fn period_map(x: PhasePoint, config: &SectionConfig) -> PhasePoint {
    let mut y = integrate_steps(
        x,
        config.step(),
        config.steps_per_period,
        config.lambda,
        config.v0_tilde,
    );
    y.tau = x.tau + 2.0 * PI;
    y
}

/// Mean squared distance of the first `periods` section points from the seed.
fn dispersion(x: PhasePoint, config: &SectionConfig, periods: usize) -> f64 {
    let mut y = x;
    let mut sum = 0.0;
    for _ in 0..periods {
        y = period_map(y, config);
        let d = y.distance(&x);
        if !d.is_finite() {
            return f64::INFINITY;
        }
        sum += d * d;
    }
    sum / periods as f64
}

/// Locate the stable period-1 orbit with the smallest section dispersion.
///
/// Coarse grid over `search` ranked by the dispersion of ten section points,
/// then Newton refinement of `P(x) = x` on the best candidates. Returns
/// `None` when no candidate converges to an elliptic orbit.
pub fn find_island(lambda: f64, v0_tilde: f64, search: &SearchBox) -> Result<Option<Island>> {
    if search.n_z < 2
        || search.n_p < 2
        || !(search.z_max > search.z_min)
        || !(search.p_max > search.p_min)
    {
        return domain("degenerate island search box");
    }
    let config = SectionConfig::new(lambda, v0_tilde, 0);
    let mut ranked: Vec<(f64, PhasePoint)> = (0..search.n_z * search.n_p)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / search.n_p, k % search.n_p);
            let z =
                search.z_min + (search.z_max - search.z_min) * i as f64 / (search.n_z - 1) as f64;
            let p =
                search.p_min + (search.p_max - search.p_min) * j as f64 / (search.n_p - 1) as f64;
            let x = PhasePoint::new(z, p, 0.0);
            (dispersion(x, &config, 10), x)
        })
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best: Option<Island> = None;
    for (_, guess) in ranked.iter().take(12) {
        if let Some(island) = newton_fixed_point(*guess, &config) {
            if island.is_stable() && best.is_none_or(|b| island.residual < b.residual) {
                best = Some(island);
            }
        }
    }
    Ok(best)
}

fn newton_fixed_point(mut x: PhasePoint, config: &SectionConfig) -> Option<Island> {
    let eps = 1e-6;
    for _ in 0..40 {
        let fx = period_map(x, config);
        let (gz, gp) = (fx.z - x.z, fx.p - x.p);
        let shift =
            |dz: f64, dp: f64| period_map(PhasePoint::new(x.z + dz, x.p + dp, x.tau), config);
        let (zp, zm) = (shift(eps, 0.0), shift(-eps, 0.0));
        let (pp, pm) = (shift(0.0, eps), shift(0.0, -eps));
        // monodromy matrix by central differences
        let m = [
            [(zp.z - zm.z) / (2.0 * eps), (pp.z - pm.z) / (2.0 * eps)],
            [(zp.p - zm.p) / (2.0 * eps), (pp.p - pm.p) / (2.0 * eps)],
        ];
        let residual = gz.hypot(gp);
        if !residual.is_finite() {
            return None;
        }
        if residual < 1e-11 {
            return Some(Island {
                centre: x,
                trace: m[0][0] + m[1][1],
                residual,
            });
        }
        let a = [[m[0][0] - 1.0, m[0][1]], [m[1][0], m[1][1] - 1.0]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.abs() < 1e-14 {
            return None;
        }
        let dz = (a[1][1] * gz - a[0][1] * gp) / det;
        let dp = (-a[1][0] * gz + a[0][0] * gp) / det;
        x.z -= dz;
        x.p -= dp;
        if dz.hypot(dp) > 2.0 {
            return None;
        }
    }
    None
}

/// Largest distance from `centre` over `n_periods` section points of the orbit
/// seeded at `centre`.
pub fn island_excursion(centre: PhasePoint, lambda: f64, v0_tilde: f64, n_periods: usize) -> f64 {
    let config = SectionConfig::new(lambda, v0_tilde, n_periods);
    section_of(centre, &config)
        .iter()
        .map(|x| x.distance(&centre))
        .fold(0.0, f64::max)
}

/// Fraction of an `n × n` grid over one lattice cell (`z mod π`) and
/// `|p| ≤ p_max` visited by the section of an orbit seeded at the unstable
/// equilibrium `z = 0, p = 0` of the undriven lattice.
pub fn stochastic_coverage(
    lambda: f64,
    v0_tilde: f64,
    n_periods: usize,
    p_max: f64,
    n: usize,
) -> Result<f64> {
    if n == 0 || !(p_max > 0.0) {
        return domain("coverage grid needs n > 0 and p_max > 0");
    }
    let config = SectionConfig::new(lambda, v0_tilde, n_periods);
    config.validate()?;
    let mut visited = vec![false; n * n];
    for x in section_of(PhasePoint::new(0.0, 0.0, 0.0), &config) {
        if !x.p.is_finite() {
            return Err(Error::Domain("orbit left the representable range".into()));
        }
        if x.p.abs() > p_max {
            continue;
        }
        let zc = x.z.rem_euclid(PI) / PI;
        let i = ((zc * n as f64) as usize).min(n - 1);
        let j = (((x.p + p_max) / (2.0 * p_max) * n as f64) as usize).min(n - 1);
        visited[i * n + j] = true;
    }
    Ok(visited.iter().filter(|v| **v).count() as f64 / (n * n) as f64)
}

/// Undriven energy `p²/2 + (Ṽ0/2) cos 2z`.
pub fn undriven_energy(x: &PhasePoint, v0_tilde: f64) -> f64 {
    0.5 * x.p * x.p + 0.5 * v0_tilde * (2.0 * x.z).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_weights_sum_to_one() {
        assert!((DRIFT.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((KICK.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        // θ = 1/(2 − 2^{1/3})
        assert!((FR_THETA - 1.0 / (2.0 - 2f64.cbrt())).abs() < 1e-15);
    }

    #[test]
    fn reduction_keeps_windings() {
        let x = PhasePoint::new(7.0, 0.0, 0.0);
        let (z, w) = x.reduced();
        assert!((z + 2.0 * PI * w as f64 - 7.0).abs() < 1e-15);
        assert!((-PI..PI).contains(&z));
    }
}
