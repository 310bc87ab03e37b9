use floquet_core::mathieu;
use floquet_core::quantum::*;
use floquet_core::spectrum::{undriven_band_params, LatticeParams, Regime, ResonanceModel};
use floquet_core::times::{times_robust, undriven_times, RobustForm};
use floquet_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn default_grid() -> SpatialGrid {
    SpatialGrid::new(2048, 16, 0.0).unwrap()
}

#[test]
fn gaussian_is_normalized_and_centred() {
    let grid = default_grid();
    let psi = init_gaussian(&grid, 0.0, 0.0, 0.5, 0.5).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-12);
    assert!(psi.mean_position().abs() < 1e-10);
    let (p, _) = psi.momentum_moments(0.5);
    assert!(p.abs() < 1e-10);
    let off = init_gaussian(&grid, 1.3, -0.7, 0.4, 0.3).unwrap();
    assert!((off.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn gaussian_momentum_width() {
    // Fourier transform of a Gaussian of width Δz has width k̄/(2Δz)
    let psi = init_gaussian(&default_grid(), 0.3, 0.0, 0.5, 0.5).unwrap();
    let (_, dp) = psi.momentum_moments(0.5);
    let expected = 0.5 / (2.0 * 0.5);
    assert!((dp / expected - 1.0).abs() < 0.02, "Δp = {dp}");
}

#[test]
fn gaussian_rejects_unresolved_width() {
    let grid = default_grid();
    let too_narrow = 1.5 * grid.dz();
    assert!(matches!(
        init_gaussian(&grid, 0.0, 0.0, too_narrow, 0.5),
        Err(Error::Domain(_))
    ));
}

#[test]
fn uncertainty_pairing() {
    assert!((min_uncertainty_width(0.1, 0.16) - 0.8).abs() < 1e-15);
    assert!(uncertainty_mismatch(0.5, 0.5, 0.5) < 1e-15);
    assert!((uncertainty_mismatch(0.5, 0.1, 0.16) - (0.05f64 / 0.08 - 1.0).abs()).abs() < 1e-12);
}

#[test]
fn free_particle_spectrum() {
    let grid = default_grid();
    let kbar = 0.5;
    let states = undriven_eigenbasis(&grid, 0.0, kbar, 41).unwrap();
    // plane waves k = 2πm/L, one state at m = 0 then pairs ±m
    let dk = 2.0 * PI / grid.length();
    let mut expected = vec![0.0];
    for m in 1..=20 {
        let e = 0.5 * kbar * kbar * (dk * m as f64).powi(2);
        expected.push(e);
        expected.push(e);
    }
    for (s, e) in states.iter().zip(&expected) {
        assert!((s.energy - e).abs() < 1e-12, "{} vs {}", s.energy, e);
    }
    for pair in states[1..].chunks(2) {
        assert_eq!(pair[0].parity, -pair[1].parity);
    }
}

#[test]
fn eigenbasis_is_orthonormal_with_definite_parity() {
    let grid = SpatialGrid::new(1024, 8, 0.0).unwrap();
    let states = undriven_eigenbasis(&grid, 2.0, 0.5, 40).unwrap();
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((a.state.inner(&b.state).norm() - expected).abs() < 1e-10);
        }
        // parity about z = 0: grid point i ↔ n − i
        let amps = a.state.amplitudes();
        let n = amps.len();
        let worst = (1..n)
            .map(|k| (amps[n - k] - amps[k] * a.parity as f64).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10);
    }
}

#[test]
fn deep_lattice_spacing_is_harmonic() {
    // q0 = 100: Ṽ0 = 50 at k̄ = 0.5, small-oscillation frequency √(2Ṽ0)
    let (kbar, v0t) = (0.5, 50.0);
    let grid = default_grid();
    let states = undriven_eigenbasis(&grid, v0t, kbar, 48).unwrap();
    let spacing = states[16].energy - states[0].energy;
    let harmonic = kbar * (2.0 * v0t).sqrt();
    assert!(
        (spacing / harmonic - 1.0).abs() < 0.05,
        "{spacing} vs {harmonic}"
    );
}

#[test]
fn band_curvature_matches_deep_band_params() {
    // q0 = 25 (V0 = 100 E_r); second difference of band centres in recoil units
    let kbar = 0.5;
    let lattice = LatticeParams::new(100.0, kbar, 0.0).unwrap();
    let grid = default_grid();
    let states = undriven_eigenbasis(&grid, lattice.v0_tilde, kbar, 16 * 4).unwrap();
    let centre = |b: usize| {
        states[16 * b..16 * (b + 1)]
            .iter()
            .map(|s| s.energy)
            .sum::<f64>()
            / 16.0
    };
    let to_recoil = 2.0 / (kbar * kbar);
    let curvature = (centre(2) - 2.0 * centre(1) + centre(0)) * to_recoil;
    let zeta = undriven_band_params(&lattice, 1, Regime::Deep)
        .unwrap()
        .zeta;
    assert!(
        (curvature.abs() / zeta - 1.0).abs() < 0.1,
        "{curvature} vs {zeta}"
    );
}

#[test]
fn eigenstates_are_stationary() {
    let grid = default_grid();
    let states = undriven_eigenbasis(&grid, 2.0, 0.5, 48).unwrap();
    let config = DriveConfig::new(2.0, 0.5, 0.0);
    for idx in [0, 17, 40] {
        let (rec, _) = evolve(
            &states[idx].state,
            &config,
            20.0 * PI,
            &RecordSpec::default(),
        )
        .unwrap();
        let worst = rec
            .autocorrelation
            .iter()
            .map(|c| (c.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "state {idx}: {worst}");
    }
}

#[test]
fn grid_propagation_matches_eigen_expansion() {
    let (kbar, v0t) = (0.5, 2.0);
    let grid = default_grid();
    let basis = undriven_eigenbasis(&grid, v0t, kbar, 400).unwrap();
    let psi0 = init_gaussian(&grid, PI / 2.0, 0.0, 0.5, kbar).unwrap();
    let t = 10.0 * 2.0 * PI;
    let config = DriveConfig::new(v0t, kbar, 0.0).with_dt(2.0 * PI / 1000.0);
    let (_, numeric) = evolve(&psi0, &config, t, &RecordSpec::default()).unwrap();
    let mut amps = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    for e in &basis {
        let c = e.state.inner(&psi0) * Complex64::from_polar(1.0, -e.energy * t / kbar);
        for (a, b) in amps.iter_mut().zip(e.state.amplitudes()) {
            *a += c * b;
        }
    }
    let analytic = WaveFunction::new(grid, amps, t).unwrap();
    let fidelity = analytic.inner(&numeric).norm_sqr();
    assert!(fidelity > 1.0 - 1e-8, "fidelity defect {}", 1.0 - fidelity);
}

#[test]
fn norm_drift_per_ten_thousand_steps() {
    let grid = default_grid();
    let psi0 = init_gaussian(&grid, PI / 2.0, 1.0, 0.5, 0.5).unwrap();
    let config = DriveConfig::new(2.0, 0.5, 1.5);
    let (rec, fin) = evolve(&psi0, &config, 1e4 * config.dt, &RecordSpec::default()).unwrap();
    assert_eq!(rec.times.len(), 10_001);
    assert!((fin.norm() - 1.0).abs() < 1e-10);
    assert!(rec.max_norm_drift < 1e-10);
    assert_eq!(rec.autocorrelation[0], Complex64::new(1.0, 0.0));
    assert!(rec.autocorrelation.iter().all(|c| c.norm() <= 1.0 + 1e-12));
}

#[test]
fn time_step_bounds() {
    let grid = default_grid();
    let psi0 = init_gaussian(&grid, 0.0, 0.0, 0.5, 0.5).unwrap();
    let coarse = DriveConfig::new(2.0, 0.5, 1.0).with_dt(2.0 * PI / 100.0);
    assert!(matches!(
        evolve(&psi0, &coarse, 1.0, &RecordSpec::default()),
        Err(Error::Domain(_))
    ));
    // the run ends exactly at the requested time
    let config = DriveConfig::new(2.0, 0.5, 1.0);
    let (rec, fin) = evolve(
        &psi0,
        &config,
        1.0,
        &RecordSpec {
            snapshot_stride: Some(10),
        },
    )
    .unwrap();
    assert!((fin.time - 1.0).abs() < 1e-12);
    assert!(rec.dt <= config.dt);
    assert_eq!(rec.densities.len(), rec.snapshot_times.len());
    assert!((rec.ipr[0] - inverse_participation_ratio(&psi0)).abs() < 1e-12);
}

#[test]
fn frame_transform_round_trip() {
    let grid = default_grid();
    let mut psi = init_gaussian(&grid, 0.4, 0.3, 0.5, 0.5).unwrap();
    psi.time = 0.7;
    let lab = frame_transform(&psi, 1.5, 0.5, FrameDirection::ToLab).unwrap();
    let back = frame_transform(&lab, 1.5, 0.5, FrameDirection::ToComoving).unwrap();
    let worst = psi
        .amplitudes()
        .iter()
        .zip(back.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn frame_transform_at_zero_velocity_is_a_translation() {
    // cos τ = 0: no momentum boost, the lab state is the comoving one displaced by ξ = −λ
    let (lambda, kbar) = (1.5, 0.5);
    let grid = default_grid();
    let mut psi = init_gaussian(&grid, 0.2, 0.4, 0.5, kbar).unwrap();
    psi.time = PI / 2.0;
    let lab = frame_transform(&psi, lambda, kbar, FrameDirection::ToLab).unwrap();
    let shifted = init_gaussian(&grid, 0.2 - lambda, 0.4, 0.5, kbar).unwrap();
    assert!((shifted.inner(&lab).norm() - 1.0).abs() < 1e-10);
    assert!((lab.mean_position() - (0.2 - lambda)).abs() < 1e-8);
}

#[test]
fn undriven_classical_period() {
    // packet centred on the mean band n = 1; period from the deep-lattice formula in drive units
    let (kbar, v0) = (0.5, 16.0);
    let lattice = LatticeParams::new(v0, kbar, 0.0).unwrap();
    let grid = default_grid();
    let p0 = band_matched_momentum(&grid, lattice.v0_tilde, kbar, PI / 2.0, 0.5, 1.0).unwrap();
    let psi0 = init_gaussian(&grid, PI / 2.0, p0, 0.5, kbar).unwrap();
    let config = DriveConfig::new(lattice.v0_tilde, kbar, 0.0);
    let (rec, _) = evolve(&psi0, &config, 60.0, &RecordSpec::default()).unwrap();
    let predicted = undriven_times(&lattice, 1, Regime::Deep)
        .unwrap()
        .recoil_to_drive(kbar)
        .t_cl;
    let hints = RecurrenceHints {
        t_cl: predicted,
        t_rev: None,
        t_spr: None,
    };
    let found = detect_recurrences(&rec.survival(), rec.dt, &hints).unwrap();
    let t_cl = found.t_cl.expect("classical period detected").time;
    assert!(
        (t_cl / predicted - 1.0).abs() < 0.1,
        "{t_cl} vs {predicted}"
    );
}

#[test]
fn band_matched_momentum_hits_target() {
    let grid = default_grid();
    let basis = undriven_eigenbasis(&grid, 2.0, 0.5, 16 * 10).unwrap();
    let p0 = band_matched_momentum(&grid, 2.0, 0.5, PI / 2.0, 0.5, 2.0).unwrap();
    let psi = init_gaussian(&grid, PI / 2.0, p0, 0.5, 0.5).unwrap();
    assert!((mean_band(&psi, &basis) - 2.0).abs() < 1e-6);
}

#[test]
fn synthetic_two_frequency_signal() {
    let dt = 0.01;
    let s: Vec<f64> = (0..100_000)
        .map(|i| {
            let t = i as f64 * dt;
            (0.5 * t).cos().powi(2) * (0.005 * t).cos().powi(2)
        })
        .collect();
    let hints = RecurrenceHints {
        t_cl: 6.0,
        t_rev: Some(650.0),
        t_spr: None,
    };
    let found = detect_recurrences(&s, dt, &hints).unwrap();
    let t_cl = found.t_cl.unwrap().time;
    let t_rev = found.t_rev.unwrap().time;
    assert!((t_cl / (2.0 * PI) - 1.0).abs() < 0.01, "{t_cl}");
    assert!((t_rev / (200.0 * PI) - 1.0).abs() < 0.01, "{t_rev}");
    assert!(found.t_spr.is_none());
}

#[test]
fn flat_signal_has_no_recurrences() {
    let s = vec![0.3; 5000];
    let hints = RecurrenceHints {
        t_cl: 1.0,
        t_rev: Some(20.0),
        t_spr: Some(40.0),
    };
    let found = detect_recurrences(&s, 0.01, &hints).unwrap();
    assert_eq!(found, Recurrences::default());
}

fn pendulum_packet(half: i64, centre: f64, q: f64) -> Vec<Complex64> {
    // coherent state in the pendulum well at θ = π/2 with ground-state width in n
    let sigma2 = q.sqrt() / 4.0;
    let c: Vec<Complex64> = (-half..=half)
        .map(|n| {
            let d = n as f64 - centre;
            Complex64::from_polar((-(d * d) / (4.0 * sigma2)).exp(), n as f64 * PI / 2.0)
        })
        .collect();
    let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    c.into_iter().map(|x| x / norm).collect()
}

#[test]
fn effective_model_without_drive_is_diagonal() {
    let model = ResonanceModel::from_parts(1, 0, 0.5, 1.2, 0.8, 1.0, 0.0, 0, 0.3).unwrap();
    let c0 = pendulum_packet(10, 0.0, 4.0);
    let t = 7.5;
    let traj = effective_evolve(&model, -10, &c0, t, 0.5).unwrap();
    for (k, (c_t, c_0)) in traj.final_coefficients.iter().zip(&c0).enumerate() {
        let d = (k as f64 - 10.0) - model.n_bar;
        let phase = (d * (model.omega - model.omega_n) + 0.5 * model.kbar * model.zeta * d * d) * t;
        let expected = c_0 * Complex64::from_polar(1.0, -phase);
        assert!((c_t - expected).norm() < 1e-9);
    }
}

#[test]
fn effective_model_conserves_norm() {
    let model =
        ResonanceModel::from_parts(1, 0, 0.25, 1.0, 1.0, 1.0, 12.5 * 0.0625, 1, 0.0).unwrap();
    let traj =
        effective_evolve(&model, -40, &pendulum_packet(40, 3.0, model.q), 100.0, 0.05).unwrap();
    assert!(traj.max_norm_drift < 1e-10, "{}", traj.max_norm_drift);
    assert!(traj.max_edge_population < 1e-8);
}

#[test]
fn effective_model_detects_truncation() {
    let model =
        ResonanceModel::from_parts(1, 0, 0.25, 1.0, 1.0, 1.0, 12.5 * 0.0625, 1, 0.0).unwrap();
    let c0 = pendulum_packet(6, 0.0, model.q);
    assert!(matches!(
        effective_evolve(&model, -6, &c0, 50.0, 0.05),
        Err(Error::Truncation { .. })
    ));
}

#[test]
fn effective_revival_matches_strong_coupling_form() {
    // q = 50, N = 1, α = 0, level ν = 2; at k̄ = 1/4 the ν-derivative convention of the
    // closed form and the l-ladder of the amplitude equations coincide
    let kbar = 0.25;
    let model =
        ResonanceModel::from_parts(1, 0, kbar, 1.0, 1.0, 1.0, 12.5 * kbar * kbar, 1, 0.0).unwrap();
    assert!((model.q - 50.0).abs() < 1e-12);
    let predicted = times_robust(&model, RobustForm::GeneralN).unwrap().t_rev;
    let dt = 0.01;
    let traj = effective_evolve(
        &model,
        -40,
        &pendulum_packet(40, 3.0, model.q),
        1.6 * predicted,
        dt,
    )
    .unwrap();
    let s: Vec<f64> = traj.autocorrelation.iter().map(|c| c.norm_sqr()).collect();
    let hints = RecurrenceHints {
        t_cl: 4.0,
        t_rev: Some(predicted),
        t_spr: None,
    };
    let t_rev = detect_recurrences(&s, dt, &hints)
        .unwrap()
        .t_rev
        .expect("revival detected")
        .time;
    assert!(
        (t_rev / predicted - 1.0).abs() < 0.1,
        "{t_rev} vs {predicted}"
    );
}

#[test]
fn effective_revival_matches_exact_level_curvature() {
    // revival 4πk̄/|E(l+1) − 2E(l) + E(l−1)| with E(l) = (k̄²ζ/8) a_{2l}(q)
    let kbar = 0.5;
    let model =
        ResonanceModel::from_parts(1, 0, kbar, 1.0, 1.0, 1.0, 12.5 * kbar * kbar, 1, 0.0).unwrap();
    let e = |l: f64| kbar * kbar / 8.0 * mathieu::a(2.0 * l, model.q).unwrap();
    let predicted = 4.0 * PI * kbar / (e(2.0) - 2.0 * e(1.0) + e(0.0)).abs();
    let dt = 0.01;
    let traj = effective_evolve(
        &model,
        -40,
        &pendulum_packet(40, 3.0, model.q),
        1.6 * predicted,
        dt,
    )
    .unwrap();
    let s: Vec<f64> = traj.autocorrelation.iter().map(|c| c.norm_sqr()).collect();
    let hints = RecurrenceHints {
        t_cl: 2.0,
        t_rev: Some(predicted),
        t_spr: None,
    };
    let t_rev = detect_recurrences(&s, dt, &hints)
        .unwrap()
        .t_rev
        .expect("revival detected")
        .time;
    assert!(
        (t_rev / predicted - 1.0).abs() < 0.1,
        "{t_rev} vs {predicted}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn frame_round_trip_is_identity(tau in 0.0..20.0f64, lambda in 0.0..3.0f64, z0 in -1.0..1.0f64) {
        let grid = SpatialGrid::new(512, 8, 0.0).unwrap();
        let mut psi = init_gaussian(&grid, z0, 0.2, 0.5, 0.5).unwrap();
        psi.time = tau;
        let lab = frame_transform(&psi, lambda, 0.5, FrameDirection::ToLab).unwrap();
        let back = frame_transform(&lab, lambda, 0.5, FrameDirection::ToComoving).unwrap();
        prop_assert!((lab.norm() - 1.0).abs() < 1e-12);
        let worst = psi.amplitudes().iter().zip(back.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12);
    }

    #[test]
    fn propagation_preserves_norm(lambda in 0.0..3.0f64, p0 in -2.0..2.0f64) {
        let grid = SpatialGrid::new(512, 8, 0.0).unwrap();
        let psi = init_gaussian(&grid, PI / 2.0, p0, 0.5, 0.5).unwrap();
        let (rec, fin) = evolve(&psi, &DriveConfig::new(2.0, 0.5, lambda), 2.0 * PI, &RecordSpec::default()).unwrap();
        prop_assert!((fin.norm() - 1.0).abs() < 1e-11);
        prop_assert!(rec.autocorrelation.iter().all(|c| c.norm() <= 1.0 + 1e-12));
    }
}
