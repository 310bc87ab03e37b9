use crate::error::{domain, Error, Result};
use crate::spectrum::ResonanceModel;
use num_complex::Complex64;

/// Edge population above which the band window is considered too small.
pub const EDGE_THRESHOLD: f64 = 1e-8;
/// Substeps keep `h·‖H‖/k̄` below this, which holds the RK4 norm error near roundoff.
const STEP_SCALE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveTrajectory {
    /// Band indices of the window, ascending.
    pub bands: Vec<i64>,
    pub times: Vec<f64>,
    /// `Σ C̄_n(0) C_n(τ)`.
    pub autocorrelation: Vec<Complex64>,
    pub final_coefficients: Vec<Complex64>,
    pub max_norm_drift: f64,
    pub max_edge_population: f64,
}

/// Integrate the averaged amplitude equations
///
/// ```text
/// i k̄ dC_n/dτ = [k̄(n−n̄)(ω−ω_N) + ½ k̄² ζ (n−n̄)²] C_n + (λV/2i)(C_{n+N} − C_{n−N})
/// ```
///
/// on the band window `first_band ..= first_band + initial.len() − 1` with RK4,
/// sampling every `sample_dt`. Fails with [`Error::Truncation`] when the outer
/// `N` bands on either side ever hold more than [`EDGE_THRESHOLD`].
pub fn effective_evolve(
    model: &ResonanceModel,
    first_band: i64,
    initial: &[Complex64],
    duration: f64,
    sample_dt: f64,
) -> Result<EffectiveTrajectory> {
    let n_res = model.n_res as usize;
    if initial.len() < 2 * n_res + 1 {
        return domain(format!(
            "band window of {} is too small for N = {}",
            initial.len(),
            n_res
        ));
    }
    if !(sample_dt > 0.0) || !(duration >= 0.0) || !duration.is_finite() {
        return domain("sample step must be positive and the duration finite and non-negative");
    }
    let kbar = model.kbar;
    let bands: Vec<i64> = (0..initial.len() as i64).map(|i| first_band + i).collect();
    let diag: Vec<f64> = bands
        .iter()
        .map(|&n| {
            let d = n as f64 - model.n_bar;
            (kbar * d * (model.omega - model.omega_n) + 0.5 * kbar * kbar * model.zeta * d * d)
                / kbar
        })
        .collect();
    // coupling term divided by i k̄
    let g = model.lambda * model.v / (2.0 * kbar);
    let rho = diag.iter().fold(0.0f64, |m, d| m.max(d.abs())) + 2.0 * g.abs();
    let n_samples = (duration / sample_dt).round() as usize;
    let substeps = ((sample_dt * rho / STEP_SCALE).ceil() as usize).max(1);
    let h = sample_dt / substeps as f64;

    // dC/dτ = −i·diag·C − g (C_{n+N} − C_{n−N})
    let deriv = |c: &[Complex64], out: &mut [Complex64]| {
        let len = c.len();
        for i in 0..len {
            let up = if i + n_res < len {
                c[i + n_res]
            } else {
                Complex64::new(0.0, 0.0)
            };
            let down = if i >= n_res {
                c[i - n_res]
            } else {
                Complex64::new(0.0, 0.0)
            };
            out[i] = Complex64::new(0.0, -diag[i]) * c[i] - g * (up - down);
        }
    };

    let norm0: f64 = initial.iter().map(|c| c.norm_sqr()).sum();
    if !(norm0 > 0.0) {
        return domain("initial amplitudes have zero norm");
    }
    let len = initial.len();
    let mut c = initial.to_vec();
    let zero = vec![Complex64::new(0.0, 0.0); len];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero);

    let edge = |c: &[Complex64]| -> f64 {
        let lo: f64 = c[..n_res].iter().map(|x| x.norm_sqr()).sum();
        let hi: f64 = c[len - n_res..].iter().map(|x| x.norm_sqr()).sum();
        lo.max(hi) / norm0
    };
    let overlap = |c: &[Complex64]| -> Complex64 {
        initial
            .iter()
            .zip(c)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            / norm0
    };

    let mut traj = EffectiveTrajectory {
        bands,
        times: vec![0.0],
        autocorrelation: vec![Complex64::new(1.0, 0.0)],
        final_coefficients: Vec::new(),
        max_norm_drift: 0.0,
        max_edge_population: edge(&c),
    };
    if traj.max_edge_population > EDGE_THRESHOLD {
        return Err(Error::Truncation {
            population: traj.max_edge_population,
            threshold: EDGE_THRESHOLD,
        });
    }

    for s in 1..=n_samples {
        for _ in 0..substeps {
            deriv(&c, &mut k1);
            for i in 0..len {
                tmp[i] = c[i] + 0.5 * h * k1[i];
            }
            deriv(&tmp, &mut k2);
            for i in 0..len {
                tmp[i] = c[i] + 0.5 * h * k2[i];
            }
            deriv(&tmp, &mut k3);
            for i in 0..len {
                tmp[i] = c[i] + h * k3[i];
            }
            deriv(&tmp, &mut k4);
            for i in 0..len {
                c[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        let e = edge(&c);
        traj.max_edge_population = traj.max_edge_population.max(e);
        if e > EDGE_THRESHOLD {
            return Err(Error::Truncation {
                population: e,
                threshold: EDGE_THRESHOLD,
            });
        }
        let norm: f64 = c.iter().map(|x| x.norm_sqr()).sum();
        traj.max_norm_drift = traj.max_norm_drift.max((norm / norm0 - 1.0).abs());
        traj.times.push(s as f64 * sample_dt);
        traj.autocorrelation.push(overlap(&c));
    }
    traj.final_coefficients = c;
    Ok(traj)
}
