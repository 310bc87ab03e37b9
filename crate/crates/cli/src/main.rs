//! Command-line front end: spectra, time scales, sweeps, wave-packet and
//! classical runs, figure recipes and the validation report.

// `!(x > 0.0)` is used on purpose so NaN lands in the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod figures;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use floquet_core::config::RunConfig;
use floquet_core::mathieu::{char_value, Kind, MathieuOrder, Method};
use floquet_core::quantum::{
    detect_recurrences, evolve, Frame, RecordSpec, RecurrenceHints, Recurrences, TrajectoryRecord,
};
use floquet_core::spectrum::{quasi_energy, Regime, ResonanceModel};
use floquet_core::times::{sweep_times, times_by_method, TimeMethod, TimeScales};
use floquet_core::validation::{self, ValidationReport};
use floquet_core::{Error, Result};
use output::{num, Meta, Output};
use std::path::PathBuf;
use std::process::ExitCode;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "FLOQUET_THREADS";

const EXIT_DOMAIN: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "floquet",
    version,
    about = "Nonlinear-resonance spectra, recurrence times and driven-lattice dynamics"
)]
struct Cli {
    /// TOML run configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mathieu characteristic values as CSV on stdout.
    Mathieu {
        #[arg(long, value_enum, default_value_t = KindArg::Even)]
        kind: KindArg,
        #[arg(long, value_delimiter = ',', required = true)]
        order: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<f64>,
        #[arg(long, default_value = "exact")]
        method: Method,
    },
    /// Quasi-energies of the configured resonance.
    Spectrum {
        #[arg(long, default_value_t = 8.0)]
        nu_max: f64,
        #[arg(long, default_value_t = 1.0)]
        nu_step: f64,
    },
    /// Time scales of the configured resonance by every method.
    Times,
    /// Time scales against λ over the configured sweep.
    Sweep,
    /// Wave-packet propagation.
    Evolve(EvolveArgs),
    /// Stroboscopic sections of the classical dynamics.
    Poincare {
        /// One file per value when more than one is given.
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
    },
    /// Run the acceptance suite; exit 2 if any criterion fails.
    Validate {
        /// Criterion numbers to run (all by default).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
    /// Data behind one of the reference figures.
    ReproduceFigure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        figure: u8,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Even,
    Odd,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    kbar: Option<f64>,
    /// Scaled depth Ṽ0 (overrides the lattice V0).
    #[arg(long)]
    v0_tilde: Option<f64>,
    #[arg(long)]
    frame: Option<Frame>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    n_steps: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = cap_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}

fn cap_threads() -> std::result::Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .map_err(|_| format!("{THREADS_ENV} must be a positive integer, got `{value}`"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be positive"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let Format::Csv = cli.format;
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mut out = Output::new(&cli.out)?;
    match cli.command {
        Command::Mathieu {
            kind,
            order,
            q,
            method,
        } => {
            mathieu(kind, &order, &q, method)?;
            return Ok(ExitCode::SUCCESS);
        }
        Command::Spectrum { nu_max, nu_step } => spectrum(&config, &mut out, nu_max, nu_step)?,
        Command::Times => times(&config, &mut out)?,
        Command::Sweep => sweep(&config, &mut out)?,
        Command::Evolve(args) => {
            apply_overrides(&mut config, &args)?;
            evolve_cmd(&config, &mut out)?
        }
        Command::Poincare { lambda } => poincare(&config, &mut out, &lambda)?,
        Command::Validate { only } => {
            let report = validate(&config, &mut out, &only)?;
            report_written(&out);
            return Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VALIDATION)
            });
        }
        Command::ReproduceFigure { figure } => figures::reproduce(figure, &config, &mut out)?,
    }
    report_written(&out);
    Ok(ExitCode::SUCCESS)
}

fn report_written(out: &Output) {
    for path in out.written() {
        println!("wrote {}", path.display());
    }
}

fn mathieu(kind: KindArg, orders: &[f64], qs: &[f64], method: Method) -> Result<()> {
    let kind = match kind {
        KindArg::Even => Kind::EvenA,
        KindArg::Odd => Kind::OddB,
    };
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(["order", "q", "method", "value"])
        .map_err(|e| Error::Io(e.to_string()))?;
    for &order in orders {
        for &q in qs {
            let c = char_value(MathieuOrder::new(kind, order)?, q, method)?;
            w.write_record([
                num(order),
                num(q),
                c.method.as_str().to_string(),
                num(c.value),
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn base_meta(command: &str, config: &RunConfig) -> Meta {
    Meta::new(command, &config.canonical())
}

fn model_meta(meta: Meta, model: &ResonanceModel) -> Meta {
    meta.with("q", num(model.q))
        .with("nu", num(model.nu()))
        .with("beta", num(model.beta))
        .with("kbar", num(model.kbar))
}

fn spectrum(config: &RunConfig, out: &mut Output, nu_max: f64, nu_step: f64) -> Result<()> {
    if !(nu_step > 0.0) || !(nu_max >= 0.0) {
        return Err(Error::Domain("need nu_step > 0 and nu_max >= 0".into()));
    }
    let model = config.model()?;
    let meta = model_meta(base_meta("spectrum", config), &model);
    let mut t = out.table(
        "spectrum.csv",
        &meta,
        &["j", "nu", "mu", "unwrapped", "wrapped", "method"],
    )?;
    let steps = (nu_max / nu_step + 1e-9).floor() as usize;
    for j in 0..model.n_res as i64 {
        for i in 0..=steps {
            let e = quasi_energy(&model, j, i as f64 * nu_step, Method::Exact)?;
            t.row([
                e.j.to_string(),
                num(e.nu),
                num(e.mu),
                num(e.unwrapped),
                num(e.wrapped),
                e.method.as_str().into(),
            ])?;
        }
    }
    t.finish()
}

fn times_row(r: std::result::Result<TimeScales, String>) -> [String; 4] {
    match r {
        Ok(t) => [num(t.t_cl), num(t.t_rev), num(t.t_spr), String::new()],
        Err(e) => [
            String::new(),
            String::new(),
            String::new(),
            e.replace(['\n', ','], ";"),
        ],
    }
}

fn times(config: &RunConfig, out: &mut Output) -> Result<()> {
    let model = config.model()?;
    let meta = model_meta(base_meta("times", config), &model)
        .with("units", "scaled time τ (drive period 2π)");
    let mut t = out.table(
        "times.csv",
        &meta,
        &["method", "t_cl", "t_rev", "t_spr", "error"],
    )?;
    for method in TimeMethod::ALL {
        let [a, b, c, e] = times_row(times_by_method(&model, method).map_err(|e| e.to_string()));
        t.row([method.as_str().to_string(), a, b, c, e])?;
    }
    t.finish()
}

fn sweep(config: &RunConfig, out: &mut Output) -> Result<()> {
    let model = config.model()?;
    let rows = sweep_times(&model, &config.sweep_lambdas(), &config.sweep.methods)?;
    let meta = base_meta("sweep", config);
    let mut t = out.table(
        "sweep.csv",
        &meta,
        &[
            "lambda", "method", "q", "nu", "t_cl", "t_rev", "t_spr", "flags",
        ],
    )?;
    for r in rows {
        let flags = r.flags();
        let [a, b, c, _] = times_row(r.times);
        t.row([
            num(r.lambda),
            r.method.as_str().into(),
            num(r.q),
            num(r.nu),
            a,
            b,
            c,
            flags,
        ])?;
    }
    t.finish()
}

fn apply_overrides(config: &mut RunConfig, args: &EvolveArgs) -> Result<()> {
    if let Some(l) = args.lambda {
        config.lattice.lambda = l;
    }
    if let Some(k) = args.kbar {
        config.lattice.kbar = k;
    }
    if let Some(v) = args.v0_tilde {
        config.lattice.v0 = 2.0 * v / (config.lattice.kbar * config.lattice.kbar);
    }
    if let Some(f) = args.frame {
        config.evolve.frame = f;
    }
    if let Some(dt) = args.dt {
        config.evolve.dt = dt;
    }
    if let Some(n) = args.n_steps {
        config.evolve.n_steps = n;
    }
    config.validate()
}

/// Recurrence hints from the closed forms: driven deep/shallow lattice forms
/// for `λ > 0`, undriven band times otherwise.
fn hints_for(config: &RunConfig) -> Result<(RecurrenceHints, TimeScales)> {
    let model = config.model()?;
    let regime = config.resonance.regime;
    let method = match (config.lattice.lambda > 0.0, regime) {
        (true, Regime::Deep) => TimeMethod::LatticeDeep,
        (true, Regime::Shallow) => TimeMethod::LatticeShallow,
        (false, Regime::Deep) => TimeMethod::UndrivenDeep,
        (false, Regime::Shallow) => TimeMethod::UndrivenShallow,
    };
    let t = times_by_method(&model, method)?;
    let finite = |x: f64| (x.is_finite() && x > 0.0).then_some(x);
    let hints = RecurrenceHints {
        t_cl: t.t_cl.abs(),
        t_rev: finite(t.t_rev),
        t_spr: finite(t.t_spr),
    };
    Ok((hints, t))
}

fn evolve_cmd(config: &RunConfig, out: &mut Output) -> Result<()> {
    let grid = config.grid()?;
    let psi0 = config.packet(&grid)?;
    let drive = config.drive()?;
    let (rec, _) = evolve(
        &psi0,
        &drive,
        config.duration(),
        &RecordSpec {
            snapshot_stride: Some(config.evolve.snapshot_stride),
        },
    )?;
    let meta = base_meta("evolve", config)
        .with(
            "grid",
            format!(
                "points={} cells={} extent={}",
                grid.n_points(),
                grid.n_cells(),
                num(grid.length())
            ),
        )
        .with("dt", num(rec.dt))
        .with("frame", drive.frame.as_str())
        .with("autocorrelation_frame", "comoving")
        .with("max_norm_drift", num(rec.max_norm_drift));
    write_trajectory(out, "", &meta, &rec)?;
    match hints_for(config) {
        Ok((hints, predicted)) => {
            let found = detect_recurrences(&rec.survival(), rec.dt, &hints)?;
            let meta = meta.with("hints_method", predicted.method.as_str());
            write_recurrences(out, "recurrences.csv", &meta, &found, &predicted)
        }
        Err(e) => {
            log::warn!("no closed-form hints for recurrence detection: {e}");
            Ok(())
        }
    }
}

pub(crate) fn write_trajectory(
    out: &mut Output,
    prefix: &str,
    meta: &Meta,
    rec: &TrajectoryRecord,
) -> Result<()> {
    let mut t = out.table(
        &format!("{prefix}autocorr.csv"),
        meta,
        &["tau", "re_C", "im_C", "abs2_C"],
    )?;
    for (tau, c) in rec.times.iter().zip(&rec.autocorrelation) {
        t.row([num(*tau), num(c.re), num(c.im), num(c.norm_sqr())])?;
    }
    t.finish()?;
    let zs: Vec<f64> = rec.grid.positions().collect();
    let mut t = out.table(
        &format!("{prefix}density.csv"),
        meta,
        &["tau", "z", "abs2_psi"],
    )?;
    for (tau, dens) in rec.snapshot_times.iter().zip(&rec.densities) {
        for (z, d) in zs.iter().zip(dens) {
            t.row([num(*tau), num(*z), num(*d)])?;
        }
    }
    t.finish()?;
    let i0 = rec.ipr.first().copied().unwrap_or(f64::NAN);
    let mut t = out.table(
        &format!("{prefix}ipr.csv"),
        meta,
        &["tau", "ipr", "ipr_ratio"],
    )?;
    for (tau, ipr) in rec.snapshot_times.iter().zip(&rec.ipr) {
        t.row([num(*tau), num(*ipr), num(ipr / i0)])?;
    }
    t.finish()
}

pub(crate) fn write_recurrences(
    out: &mut Output,
    name: &str,
    meta: &Meta,
    found: &Recurrences,
    predicted: &TimeScales,
) -> Result<()> {
    let mut t = out.table(
        name,
        meta,
        &["scale", "estimate", "prominence", "predicted", "found"],
    )?;
    for (scale, est, pred) in [
        ("t_cl", found.t_cl, predicted.t_cl),
        ("t_rev", found.t_rev, predicted.t_rev),
        ("t_spr", found.t_spr, predicted.t_spr),
    ] {
        let (e, p) = est.map_or((String::new(), String::new()), |e| {
            (num(e.time), num(e.prominence))
        });
        t.row([
            scale.to_string(),
            e,
            p,
            num(pred),
            est.is_some().to_string(),
        ])?;
    }
    t.finish()
}

fn poincare(config: &RunConfig, out: &mut Output, lambdas: &[f64]) -> Result<()> {
    let lambdas = if lambdas.is_empty() {
        vec![config.lattice.lambda]
    } else {
        lambdas.to_vec()
    };
    for &lambda in &lambdas {
        let name = if lambdas.len() == 1 {
            "poincare.csv".to_string()
        } else {
            format!("poincare_lambda_{lambda}.csv")
        };
        figures::write_section(out, &name, config, &config.section_config(lambda)?)?;
    }
    Ok(())
}

fn validate(config: &RunConfig, out: &mut Output, only: &[usize]) -> Result<ValidationReport> {
    let report = if only.is_empty() {
        validation::run_all()
    } else {
        let rows = only
            .iter()
            .map(|&id| {
                validation::run_criterion(id)
                    .ok_or_else(|| Error::Domain(format!("no criterion {id}")))
            })
            .collect::<Result<_>>()?;
        ValidationReport { rows }
    };
    let meta = base_meta("validate", config);
    let mut t = out.table(
        "validation.csv",
        &meta,
        &[
            "id",
            "check",
            "source",
            "measured",
            "predicted",
            "relative_error",
            "pass",
            "seconds",
            "detail",
        ],
    )?;
    for r in &report.rows {
        println!(
            "{:>2} {} {}: measured {} vs {} ({:.1} s)",
            r.id,
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            num(r.measured),
            num(r.predicted),
            r.seconds
        );
        t.row([
            r.id.to_string(),
            r.name.to_string(),
            r.source.to_string(),
            num(r.measured),
            num(r.predicted),
            num(r.relative_error),
            r.pass.to_string(),
            format!("{:.3}", r.seconds),
            r.detail.clone(),
        ])?;
    }
    t.finish()?;
    Ok(report)
}
