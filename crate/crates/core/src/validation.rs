//! The acceptance suite as data: one report row per criterion.
//!
//! Each criterion runs one or more checks. A row passes when every check
//! passes; the row shows the binding check (largest error relative to its
//! tolerance) and lists all of them in `detail`.

use crate::classical::{
    self, find_island, island_excursion, stochastic_coverage, undriven_energy, PhasePoint,
    SearchBox, SectionConfig,
};
use crate::error::Result;
use crate::mathieu::{self, a, b, band_width, char_value, MathieuOrder, Method};
use crate::quantum::{
    detect_recurrences, evolve, undriven_eigenbasis, DriveConfig, Frame, FrameDirection,
    Propagator, RecordSpec, SpatialGrid, WaveFunction,
};
use crate::recipes::{self, linspace};
use crate::spectrum::{quasi_energy, ResonanceModel};
use crate::times::{
    omegas_numeric, sweep_times, times_delicate, times_robust, RobustForm, TimeMethod,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

pub const CRITERIA: usize = 13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub id: usize,
    pub name: &'static str,
    pub source: &'static str,
    pub measured: f64,
    pub predicted: f64,
    pub relative_error: f64,
    pub pass: bool,
    pub seconds: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }
}

#[derive(Debug, Clone)]
struct Check {
    label: String,
    measured: f64,
    predicted: f64,
    /// Compared against `tolerance`; relative unless stated in the label.
    error: f64,
    tolerance: f64,
}

impl Check {
    fn relative(label: impl Into<String>, measured: f64, predicted: f64, tolerance: f64) -> Self {
        Self {
            label: label.into(),
            measured,
            predicted,
            error: rel(measured, predicted),
            tolerance,
        }
    }

    fn absolute(label: impl Into<String>, measured: f64, predicted: f64, tolerance: f64) -> Self {
        Self {
            label: label.into(),
            measured,
            predicted,
            error: (measured - predicted).abs(),
            tolerance,
        }
    }

    /// `measured` must stay below `bound`.
    fn below(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            measured,
            predicted: bound,
            error: measured,
            tolerance: bound,
        }
    }

    /// `measured` must exceed `bound`; the error is the shortfall ratio.
    fn above(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        let error = if measured.is_nan() {
            f64::INFINITY
        } else {
            bound / measured.max(f64::MIN_POSITIVE)
        };
        Self {
            label: label.into(),
            measured,
            predicted: bound,
            error,
            tolerance: 1.0,
        }
    }

    fn flag(label: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self {
            label: label.into(),
            measured: v,
            predicted: 1.0,
            error: 1.0 - v,
            tolerance: 0.5,
        }
    }

    fn pass(&self) -> bool {
        self.error.is_finite() && self.error < self.tolerance
    }

    fn load(&self) -> f64 {
        if self.error.is_nan() {
            f64::INFINITY
        } else {
            self.error / self.tolerance
        }
    }
}

fn rel(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        (x - y).abs()
    } else {
        ((x - y) / y).abs()
    }
}

struct Spec {
    name: &'static str,
    source: &'static str,
    budget_seconds: f64,
    run: fn() -> Result<Vec<Check>>,
}

const SPECS: [Spec; CRITERIA] = [
    Spec {
        name: "mathieu exactness",
        source: "exact tridiagonal branch",
        budget_seconds: 1.0,
        run: mathieu_exactness,
    },
    Spec {
        name: "series agreement",
        source: "small-q and large-q series",
        budget_seconds: 1.0,
        run: series_agreement,
    },
    Spec {
        name: "band-width asymptotics",
        source: "large-q band-width formula",
        budget_seconds: 1.0,
        run: band_width_asymptotics,
    },
    Spec {
        name: "harmonic limit",
        source: "pendulum frequency 2√(λVζ)",
        budget_seconds: 5.0,
        run: harmonic_limit,
    },
    Spec {
        name: "limit recovery",
        source: "undriven times, √λ scaling",
        budget_seconds: 5.0,
        run: limit_recovery,
    },
    Spec {
        name: "cross-method consistency",
        source: "strong-coupling closed forms",
        budget_seconds: 30.0,
        run: cross_method,
    },
    Spec {
        name: "simulation vs theory (figure 4)",
        source: "deep driven-lattice times",
        budget_seconds: 300.0,
        run: fig4,
    },
    Spec {
        name: "undriven revival",
        source: "undriven deep revival time",
        budget_seconds: 120.0,
        run: undriven_revival,
    },
    Spec {
        name: "propagator hygiene",
        source: "unitarity, convergence, eigen-expansion",
        budget_seconds: 300.0,
        run: hygiene,
    },
    Spec {
        name: "frame equivalence",
        source: "lab vs comoving propagation",
        budget_seconds: 120.0,
        run: frame_equivalence,
    },
    Spec {
        name: "classical suite",
        source: "energy, island, stochastic layer",
        budget_seconds: 60.0,
        run: classical_suite,
    },
    Spec {
        name: "figure 1 trends",
        source: "time-scale sweeps",
        budget_seconds: 60.0,
        run: fig1_trends,
    },
    Spec {
        name: "spatiotemporal revival (figure 2)",
        source: "inverse participation ratio",
        budget_seconds: 300.0,
        run: fig2,
    },
];

/// Run criterion `id` (1-based).
pub fn run_criterion(id: usize) -> Option<ValidationRow> {
    let spec = SPECS.get(id.checked_sub(1)?)?;
    let start = Instant::now();
    let outcome = (spec.run)();
    let seconds = start.elapsed().as_secs_f64();
    Some(match outcome {
        Err(e) => ValidationRow {
            id,
            name: spec.name,
            source: spec.source,
            measured: f64::NAN,
            predicted: f64::NAN,
            relative_error: f64::NAN,
            pass: false,
            seconds,
            detail: format!("error: {e}"),
        },
        Ok(mut checks) => {
            let runtime = Check::below("runtime [s]", seconds, spec.budget_seconds);
            // the runtime budget is shown as the binding check only when it fails
            let binding = if runtime.pass() {
                checks
                    .iter()
                    .max_by(|x, y| x.load().total_cmp(&y.load()))
                    .cloned()
                    .unwrap_or_else(|| runtime.clone())
            } else {
                runtime.clone()
            };
            checks.push(runtime);
            let detail = checks
                .iter()
                .map(|c| {
                    format!(
                        "{}{}: {:.6e} vs {:.6e} (err {:.3e}, tol {:.1e})",
                        if c.pass() { "" } else { "FAIL " },
                        c.label,
                        c.measured,
                        c.predicted,
                        c.error,
                        c.tolerance
                    )
                })
                .collect::<Vec<_>>()
                .join("; ");
            ValidationRow {
                id,
                name: spec.name,
                source: spec.source,
                measured: binding.measured,
                predicted: binding.predicted,
                relative_error: rel(binding.measured, binding.predicted),
                pass: checks.iter().all(Check::pass),
                seconds,
                detail: format!("[{}] {detail}", binding.label),
            }
        }
    })
}

/// All criteria, in order. Independent criteria run concurrently.
pub fn run_all() -> ValidationReport {
    let rows = (1..=CRITERIA)
        .into_par_iter()
        .map(|id| run_criterion(id).expect("valid id"))
        .collect();
    ValidationReport { rows }
}

fn mathieu_exactness() -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    for nu in 0..=10 {
        let nu = nu as f64;
        worst = worst.max((a(nu, 0.0)? - nu * nu).abs());
        if nu >= 1.0 {
            worst = worst.max((b(nu, 0.0)? - nu * nu).abs());
        }
    }
    let mut violations = 0;
    for q in [0.1, 1.0, 10.0, 100.0] {
        for nu in 0..=20 {
            if a(nu as f64, q)? > b(nu as f64 + 1.0, q)? {
                violations += 1;
            }
        }
    }
    Ok(vec![
        Check::absolute("max |a_ν(0) − ν²|", worst, 0.0, 1e-12),
        Check::absolute("interlacing violations", violations as f64, 0.0, 0.5),
    ])
}

fn series_agreement() -> Result<Vec<Check>> {
    let small = char_value(MathieuOrder::even(5.0)?, 0.5, Method::SeriesSmallQ)?.value;
    let mut checks = vec![Check::relative(
        "small-q series a_5(0.5)",
        small,
        a(5.0, 0.5)?,
        1e-3,
    )];
    let mut worst = Check::relative("", 0.0, 1.0, 1e-2);
    worst.error = -1.0;
    for nu in 0..=3 {
        for kind in [mathieu::Kind::EvenA, mathieu::Kind::OddB] {
            if nu == 0 && kind == mathieu::Kind::OddB {
                continue;
            }
            let order = MathieuOrder::new(kind, nu as f64)?;
            let series = char_value(order, 100.0, Method::SeriesLargeQ)?.value;
            let c = Check::relative(
                format!("large-q series {kind:?} ν={nu} q=100"),
                series,
                mathieu::exact(order, 100.0)?,
                1e-2,
            );
            if c.error > worst.error {
                worst = c;
            }
        }
    }
    checks.push(worst);
    Ok(checks)
}

fn band_width_asymptotics() -> Result<Vec<Check>> {
    (0..=1u32)
        .map(|nu| {
            let exact = b(nu as f64 + 1.0, 50.0)? - a(nu as f64, 50.0)?;
            let asym = band_width(nu, 50.0)?;
            let mut c = Check::relative(
                format!("band width ν={nu} q=50 (|ln ratio|)"),
                asym,
                exact,
                1.5f64.ln(),
            );
            c.error = (asym / exact).ln().abs();
            Ok(c)
        })
        .collect()
}

/// Scaled model with `V = 1` and `λ` chosen to give `q`.
fn model_at_q(q: f64, kbar: f64, zeta: f64, omega: f64, l: i64) -> Result<ResonanceModel> {
    let lambda = q * zeta * kbar * kbar / 4.0;
    ResonanceModel::from_parts(1, 0, kbar, omega, zeta, 1.0, lambda, l, 2.0)
}

fn harmonic_limit() -> Result<Vec<Check>> {
    let m = model_at_q(200.0, 0.5, 0.7, 1.3, 0)?;
    let omega_h = 2.0 * (m.lambda * m.v * m.zeta).sqrt();
    let e0 = quasi_energy(&m, 0, 0.0, Method::Exact)?.unwrapped;
    let e2 = quasi_energy(&m, 0, 2.0, Method::Exact)?.unwrapped;
    Ok(vec![Check::relative(
        "E(2) − E(0) vs k̄ω_h at q=200",
        e2 - e0,
        m.kbar * omega_h,
        0.05,
    )])
}

fn limit_recovery() -> Result<Vec<Check>> {
    let m = recipes::shallow_model(1e-8)?;
    let (t, _) = times_delicate(&m)?;
    let t0_cl = 2.0 * PI / m.omega * m.delta;
    let t0_rev = 4.0 * PI / (m.kbar * m.zeta);
    let base = recipes::deep_model(1.5)?;
    let t1 = times_robust(&base, RobustForm::PrimarySimplified)?;
    let t4 = times_robust(&base.with_lambda(6.0)?, RobustForm::PrimarySimplified)?;
    Ok(vec![
        Check::relative("delicate T_cl at λ=1e-8", t.t_cl, t0_cl, 1e-6),
        Check::relative("delicate T_rev at λ=1e-8", t.t_rev, t0_rev, 1e-6),
        Check::absolute(
            "T_spr(4λ)/T_spr(λ)",
            t4.t_spr / t1.t_spr,
            2.0,
            4.0 * f64::EPSILON,
        ),
    ])
}

fn cross_method() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for q in [100.0, 400.0] {
        for l in [0, 1] {
            // ω just above 1 puts β ≈ 0, so ν = 2l
            let m = model_at_q(q, 0.5, 1.46875, 1.0 + 1e-9, l)?;
            let [w1, w2, _] = omegas_numeric(&m, m.nu())?;
            let closed = times_robust(&m, RobustForm::GeneralN)?;
            let nu = m.nu().round();
            checks.push(Check::relative(
                format!("T_cl q={q} ν={nu}"),
                2.0 * PI / w1.abs(),
                closed.t_cl,
                0.05,
            ));
            checks.push(Check::relative(
                format!("T_rev q={q} ν={nu}"),
                2.0 * PI / w2.abs(),
                closed.t_rev,
                0.05,
            ));
        }
    }
    Ok(checks)
}

fn packet_grid() -> Result<SpatialGrid> {
    SpatialGrid::new(SpatialGrid::DEFAULT_POINTS, SpatialGrid::DEFAULT_CELLS, 0.0)
}

fn estimate_or_nan(e: Option<crate::quantum::RecurrenceEstimate>) -> (f64, f64) {
    e.map_or((f64::NAN, 0.0), |e| (e.time, e.prominence))
}

fn fig4() -> Result<Vec<Check>> {
    let run = recipes::fig4_run(&packet_grid()?)?;
    let (rec, _) = evolve(
        &run.psi0,
        &run.drive.with_frame(Frame::Lab),
        run.duration,
        &RecordSpec::default(),
    )?;
    let found = detect_recurrences(&rec.survival(), rec.dt, &run.hints)?;
    let (t_cl, _) = estimate_or_nan(found.t_cl);
    let (t_rev, _) = estimate_or_nan(found.t_rev);
    let (_, spr_prominence) = estimate_or_nan(found.t_spr);
    Ok(vec![
        Check::relative("T_cl", t_cl, run.predicted.t_cl, 0.1),
        Check::relative("T_rev", t_rev, run.predicted.t_rev, 0.2),
        Check::above("super-revival prominence", spr_prominence, 0.1),
    ])
}

fn undriven_revival() -> Result<Vec<Check>> {
    let run = recipes::undriven_run(&packet_grid()?)?;
    let (rec, _) = evolve(&run.psi0, &run.drive, run.duration, &RecordSpec::default())?;
    let found = detect_recurrences(&rec.survival(), rec.dt, &run.hints)?;
    let (t_rev, _) = estimate_or_nan(found.t_rev);
    Ok(vec![Check::relative(
        "T_rev",
        t_rev,
        run.predicted.t_rev,
        0.1,
    )])
}

fn hygiene() -> Result<Vec<Check>> {
    let grid = packet_grid()?;
    let lattice = recipes::deep_lattice(1.5)?;
    let (v0t, kbar) = (lattice.v0_tilde, lattice.kbar);

    let drive = DriveConfig::new(v0t, kbar, 1.5);
    let psi0 = crate::quantum::init_gaussian(
        &grid,
        recipes::CENTRAL_WELL,
        1.0,
        recipes::PACKET_WIDTH,
        kbar,
    )?;
    let (rec, _) = evolve(&psi0, &drive, 1e4 * drive.dt, &RecordSpec::default())?;
    let mut checks = vec![Check::below(
        "norm drift per 1e4 steps",
        rec.max_norm_drift,
        1e-10,
    )];

    let run = recipes::fig4_run(&grid)?;
    let duration = 50.0 * 2.0 * PI;
    let finals: Vec<f64> = [4000.0, 8000.0]
        .par_iter()
        .map(|steps| {
            let cfg = run.drive.with_dt(2.0 * PI / steps);
            evolve(&run.psi0, &cfg, duration, &RecordSpec::default())
                .map(|(r, _)| *r.survival().last().unwrap())
        })
        .collect::<Result<_>>()?;
    checks.push(Check::below(
        "|Δ final |C|²| on halving dt = 2π/4000",
        (finals[0] - finals[1]).abs(),
        1e-6,
    ));

    let basis = undriven_eigenbasis(&grid, v0t, kbar, 400)?;
    let psi0 = crate::quantum::init_gaussian(
        &grid,
        recipes::CENTRAL_WELL,
        0.0,
        recipes::PACKET_WIDTH,
        kbar,
    )?;
    let t = 10.0 * 2.0 * PI;
    let cfg = DriveConfig::new(v0t, kbar, 0.0).with_dt(2.0 * PI / 1000.0);
    let (_, numeric) = evolve(&psi0, &cfg, t, &RecordSpec::default())?;
    let mut amps = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    for e in &basis {
        let c = e.state.inner(&psi0) * Complex64::from_polar(1.0, -e.energy * t / kbar);
        for (x, y) in amps.iter_mut().zip(e.state.amplitudes()) {
            *x += c * y;
        }
    }
    let analytic = WaveFunction::new(grid, amps, t)?;
    let fidelity = analytic.inner(&numeric).norm_sqr();
    checks.push(Check::below(
        "eigen-expansion fidelity defect",
        1.0 - fidelity,
        1e-8,
    ));
    Ok(checks)
}

/// Cells and points of the extended grid for the tilted-frame comparison.
const FRAME_CELLS: usize = 128;
const FRAME_POINTS: usize = 16384;

fn frame_equivalence() -> Result<Vec<Check>> {
    let grid = SpatialGrid::new(FRAME_POINTS, FRAME_CELLS, 0.0)?;
    let lattice = recipes::deep_lattice(1.5)?;
    let drive = DriveConfig::new(lattice.v0_tilde, lattice.kbar, lattice.lambda);
    let com0 = crate::quantum::init_gaussian(
        &grid,
        recipes::CENTRAL_WELL,
        0.0,
        recipes::PACKET_WIDTH,
        lattice.kbar,
    )?;
    let lab0 = frame_transform_with(&com0, &drive, FrameDirection::ToLab)?;
    let duration = 5.0 * 2.0 * PI;
    let (_, com) = evolve(
        &com0,
        &drive.with_frame(Frame::Comoving),
        duration,
        &RecordSpec::default(),
    )?;
    let (_, lab) = evolve(
        &lab0,
        &drive.with_frame(Frame::Lab),
        duration,
        &RecordSpec::default(),
    )?;
    let lab_as_com = frame_transform_with(&lab, &drive, FrameDirection::ToComoving)?;
    let fidelity = com.inner(&lab_as_com).norm();
    Ok(vec![Check::below(
        "1 − |⟨ψ_com|T ψ_lab⟩| after 5 periods",
        1.0 - fidelity,
        1e-4,
    )])
}

fn frame_transform_with(
    psi: &WaveFunction,
    drive: &DriveConfig,
    direction: FrameDirection,
) -> Result<WaveFunction> {
    let mut prop = Propagator::new(psi.grid(), drive)?;
    let mut amps = psi.amplitudes().to_vec();
    prop.transform(&mut amps, psi.time, direction);
    WaveFunction::new(psi.grid().clone(), amps, psi.time)
}

fn classical_suite() -> Result<Vec<Check>> {
    let v0t = recipes::deep_lattice(0.0)?.v0_tilde;
    let cfg = SectionConfig::new(0.0, v0t, 1000);
    let mut energy_error: f64 = 0.0;
    for seed in [
        PhasePoint::new(0.3, 0.5, 0.0),
        PhasePoint::new(1.5, 1.9, 0.0),
        PhasePoint::new(0.1, 2.5, 0.0),
    ] {
        let traj = classical::integrate_trajectory(seed, &cfg)?;
        let e0 = undriven_energy(&traj[0], v0t);
        energy_error = traj
            .iter()
            .map(|x| (undriven_energy(x, v0t) - e0).abs())
            .fold(energy_error, f64::max);
    }
    let mut checks = vec![Check::below(
        "λ=0 energy error over 1e3 periods",
        energy_error,
        1e-8,
    )];

    match find_island(1.5, v0t, &SearchBox::cell(3.0))? {
        Some(island) => {
            let excursion = island_excursion(island.centre, 1.5, v0t, 500);
            checks.push(Check::below(
                "island excursion over 500 periods at λ=1.5",
                excursion,
                0.2,
            ));
        }
        None => checks.push(Check::flag("island found at λ=1.5", false)),
    }

    let p_max = 3.0 * (2.0 * v0t).sqrt();
    let weak = stochastic_coverage(1.5, v0t, 20_000, p_max, 100)?;
    let strong = stochastic_coverage(3.0, v0t, 20_000, p_max, 100)?;
    let mut c = Check::above("coverage λ=3 / coverage λ=1.5", strong / weak, 1.0);
    if strong == weak {
        c.error = 1.0;
    }
    checks.push(c);
    Ok(checks)
}

fn fig1_trends() -> Result<Vec<Check>> {
    let monotone = |v: &[f64], up: bool| {
        v.windows(2)
            .all(|w| if up { w[1] > w[0] } else { w[1] < w[0] })
    };
    let (lo, hi) = recipes::DELICATE_WINDOW;
    let weak = sweep_times(
        &recipes::shallow_model(0.0)?,
        &linspace(lo, hi, 50),
        &[TimeMethod::DelicateGeneral],
    )?;
    let (lo, hi) = recipes::ROBUST_WINDOW;
    let strong = sweep_times(
        &recipes::deep_model(lo)?,
        &linspace(lo, hi, 50),
        &[TimeMethod::LatticeDeep],
    )?;
    let series = |rows: &[crate::times::SweepRow],
                  pick: fn(&crate::times::TimeScales) -> f64|
     -> Result<Vec<f64>> {
        rows.iter()
            .map(|r| {
                r.times
                    .as_ref()
                    .map(pick)
                    .map_err(|e| crate::Error::Domain(e.clone()))
            })
            .collect()
    };
    Ok(vec![
        Check::flag(
            "delicate T_cl increasing",
            monotone(&series(&weak, |t| t.t_cl)?, true),
        ),
        Check::flag(
            "delicate T_spr decreasing",
            monotone(&series(&weak, |t| t.t_spr)?, false),
        ),
        Check::flag(
            "robust T_cl decreasing",
            monotone(&series(&strong, |t| t.t_cl)?, false),
        ),
        Check::flag(
            "robust T_spr increasing",
            monotone(&series(&strong, |t| t.t_spr)?, true),
        ),
    ])
}

/// IPR dip below half its initial value, then recovery above 0.9 inside the
/// revival window (detected revival ± one classical period, or the hinted
/// window when no revival is detected).
fn fig2() -> Result<Vec<Check>> {
    let grid = packet_grid()?;
    let run = recipes::fig2_run(&grid)?;
    let (rec, _) = evolve(
        &run.psi0,
        &run.drive,
        run.duration,
        &RecordSpec {
            snapshot_stride: Some(10),
        },
    )?;
    let found = detect_recurrences(&rec.survival(), rec.dt, &run.hints)?;
    let t_cl = found.t_cl.map_or(run.predicted.t_cl, |e| e.time);
    let hint = run.predicted.t_rev;
    let (lo, hi) = match found.t_rev {
        Some(e) => (e.time - t_cl, e.time + t_cl),
        None => (0.5 * hint, 1.5 * hint),
    };
    let i0 = rec.ipr[0];
    let ratio: Vec<(f64, f64)> = rec
        .snapshot_times
        .iter()
        .zip(&rec.ipr)
        .map(|(t, v)| (*t, v / i0))
        .collect();
    let dip = ratio
        .iter()
        .filter(|(t, _)| *t < lo)
        .map(|(_, r)| *r)
        .fold(f64::INFINITY, f64::min);
    let recovery = ratio
        .iter()
        .filter(|(t, _)| *t >= lo && *t <= hi)
        .map(|(_, r)| *r)
        .fold(0.0, f64::max);
    Ok(vec![
        Check::below("IPR dip before the revival window", dip, 0.5),
        Check::above(format!("IPR recovery in [{lo:.1}, {hi:.1}]"), recovery, 0.9),
    ])
}
