use crate::output::{num, Meta, Output};
use crate::{write_recurrences, write_trajectory};
use floquet_core::classical::{poincare_section, SectionConfig};
use floquet_core::config::RunConfig;
use floquet_core::quantum::{detect_recurrences, evolve, RecordSpec, SpatialGrid};
use floquet_core::recipes::{self, linspace, PacketRun};
use floquet_core::times::{sweep_times, TimeMethod, TimeScales};
use floquet_core::Result;

const FIG1_POINTS: usize = 100;
const DELICATE_METHODS: [TimeMethod; 3] = [
    TimeMethod::DelicateGeneral,
    TimeMethod::LatticeShallow,
    TimeMethod::NumericExact,
];
const ROBUST_METHODS: [TimeMethod; 5] = [
    TimeMethod::LatticeDeep,
    TimeMethod::LatticeDeepHarmonic,
    TimeMethod::RobustGeneral,
    TimeMethod::RobustPrimary,
    TimeMethod::NumericExact,
];
/// Density snapshots every this many steps in the figure runs.
const SNAPSHOT_STRIDE: usize = 50;

type Scale = (&'static str, fn(&TimeScales) -> f64);

pub fn reproduce(figure: u8, config: &RunConfig, out: &mut Output) -> Result<()> {
    let meta = Meta::new(&format!("reproduce-figure {figure}"), &config.canonical());
    match figure {
        1 => fig1(out, &meta),
        2 => packet_figure(out, meta, "fig2_", recipes::fig2_run),
        3 => fig3(out, &meta, config),
        4 => packet_figure(out, meta, "fig4_", recipes::fig4_run),
        _ => unreachable!("figure number checked by the argument parser"),
    }
}

/// Six panels: classical period, revival and super revival against λ, in
/// the weak-coupling window (a–c) and the strong-coupling window (d–f).
fn fig1(out: &mut Output, meta: &Meta) -> Result<()> {
    let regimes = [
        (
            "delicate",
            recipes::shallow_model(0.0)?,
            recipes::DELICATE_WINDOW,
            &DELICATE_METHODS[..],
        ),
        (
            "robust",
            recipes::deep_model(recipes::ROBUST_WINDOW.0)?,
            recipes::ROBUST_WINDOW,
            &ROBUST_METHODS[..],
        ),
    ];
    let scales: [Scale; 3] = [
        ("t_cl", |t| t.t_cl),
        ("t_rev", |t| t.t_rev),
        ("t_spr", |t| t.t_spr),
    ];
    let mut panel = b'a';
    for (regime, template, (lo, hi), methods) in regimes {
        let lambdas = linspace(lo, hi, FIG1_POINTS);
        let rows = sweep_times(&template, &lambdas, methods)?;
        for (scale, pick) in scales {
            let name = format!("fig1_{}_{regime}_{scale}.csv", panel as char);
            let mut header = vec!["lambda".to_string(), "q".to_string()];
            header.extend(methods.iter().map(|m| m.as_str().to_string()));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let meta = meta
                .clone()
                .with("panel", format!("{} {regime} {scale}", panel as char));
            let mut t = out.table(&name, &meta, &header)?;
            for (i, lambda) in lambdas.iter().enumerate() {
                let block = &rows[i * methods.len()..(i + 1) * methods.len()];
                let mut fields = vec![num(*lambda), num(block[0].q)];
                fields.extend(
                    block
                        .iter()
                        .map(|r| r.times.as_ref().map_or(String::new(), |t| num(pick(t)))),
                );
                t.row(fields)?;
            }
            t.finish()?;
            panel += 1;
        }
    }
    Ok(())
}

fn packet_figure(
    out: &mut Output,
    meta: Meta,
    prefix: &str,
    recipe: fn(&SpatialGrid) -> Result<PacketRun>,
) -> Result<()> {
    let grid = SpatialGrid::new(SpatialGrid::DEFAULT_POINTS, SpatialGrid::DEFAULT_CELLS, 0.0)?;
    let run = recipe(&grid)?;
    let (rec, _) = evolve(
        &run.psi0,
        &run.drive,
        run.duration,
        &RecordSpec {
            snapshot_stride: Some(SNAPSHOT_STRIDE),
        },
    )?;
    let meta = meta
        .with("lambda", num(run.drive.lambda))
        .with("kbar", num(run.drive.kbar))
        .with("v0_tilde", num(run.drive.v0_tilde))
        .with(
            "grid",
            format!("points={} cells={}", grid.n_points(), grid.n_cells()),
        )
        .with("dt", num(rec.dt))
        .with("frame", run.drive.frame.as_str())
        .with("max_norm_drift", num(rec.max_norm_drift));
    write_trajectory(out, prefix, &meta, &rec)?;
    let found = detect_recurrences(&rec.survival(), rec.dt, &run.hints)?;
    write_recurrences(
        out,
        &format!("{prefix}recurrences.csv"),
        &meta,
        &found,
        &run.predicted,
    )
}

fn fig3(out: &mut Output, meta: &Meta, config: &RunConfig) -> Result<()> {
    for lambda in recipes::FIG3_LAMBDAS {
        let mut section = recipes::fig3_section(lambda)?;
        section.steps_per_period = config.poincare.steps_per_period;
        let meta = meta.clone();
        write_section_with(out, &format!("fig3_lambda_{lambda}.csv"), meta, &section)?;
    }
    Ok(())
}

pub fn write_section(
    out: &mut Output,
    name: &str,
    config: &RunConfig,
    section: &SectionConfig,
) -> Result<()> {
    write_section_with(
        out,
        name,
        Meta::new("poincare", &config.canonical()),
        section,
    )
}

fn write_section_with(
    out: &mut Output,
    name: &str,
    meta: Meta,
    section: &SectionConfig,
) -> Result<()> {
    let points = poincare_section(section)?;
    let meta = meta
        .with("lambda", num(section.lambda))
        .with("v0_tilde", num(section.v0_tilde))
        .with("seeds", section.initial_conditions.len())
        .with("periods", section.n_periods)
        .with("steps_per_period", section.steps_per_period)
        .with("z_mod", "z reduced to [-pi, pi)");
    let mut t = out.table(name, &meta, &["seed_id", "period_index", "z_mod", "p"])?;
    for s in points {
        let (z, _) = s.point.reduced();
        t.row([
            s.seed.to_string(),
            s.period.to_string(),
            num(z),
            num(s.point.p),
        ])?;
    }
    t.finish()
}
