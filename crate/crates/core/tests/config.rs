use floquet_core::config::RunConfig;
use floquet_core::quantum::Frame;
use floquet_core::Error;

#[test]
fn empty_file_gives_defaults() {
    let c = RunConfig::from_toml("").unwrap();
    assert_eq!(c, RunConfig::default());
    assert_eq!(c.lattice.v0, 16.0);
    assert_eq!(c.lattice.kbar, 0.5);
    assert_eq!(c.evolve.frame, Frame::Lab);
}

#[test]
fn unknown_keys_are_rejected() {
    for text in [
        "[lattice]\nV0 = 16.0\nfoo = 1",
        "[nonsense]\na = 1",
        "[evolve.packet]\nwidth = 0.5",
    ] {
        assert!(
            matches!(RunConfig::from_toml(text), Err(Error::Config(_))),
            "{text}"
        );
    }
}

#[test]
fn wrong_types_are_rejected() {
    assert!(RunConfig::from_toml("[lattice]\nkbar = \"half\"").is_err());
    assert!(RunConfig::from_toml("[evolve]\nframe = \"rotating\"").is_err());
}

#[test]
fn physical_values_checked_at_load() {
    assert!(RunConfig::from_toml("[lattice]\nkbar = 0.0").is_err());
    assert!(RunConfig::from_toml("[lattice]\nV0 = -1.0").is_err());
    assert!(RunConfig::from_toml("[evolve]\nn_steps = 0").is_err());
    assert!(RunConfig::from_toml("[sweep]\nlambda_min = 3.0\nlambda_max = 1.0").is_err());
    assert!(RunConfig::from_toml("[poincare]\nsteps_per_period = 10").is_err());
}

#[test]
fn p0_and_band_are_exclusive() {
    let text = "[evolve.packet]\np0 = 1.0\nband = 2.0";
    assert!(matches!(RunConfig::from_toml(text), Err(Error::Config(_))));
    let c = RunConfig::from_toml("[evolve.packet]\np0 = 1.0").unwrap();
    assert_eq!(c.evolve.packet.p0, Some(1.0));
    assert_eq!(c.evolve.packet.band, None);
}

#[test]
fn width_inferred_from_momentum_spread() {
    let c = RunConfig::from_toml("[evolve.packet]\ndelta_p = 0.25").unwrap();
    assert!((c.packet_width().unwrap() - 0.5 / (2.0 * 0.25)).abs() < 1e-15);
}

#[test]
fn canonical_form_round_trips() {
    let c = RunConfig::from_toml("[lattice]\nlambda = 2.5\n[sweep]\nn_points = 7").unwrap();
    let back = RunConfig::from_toml(&c.canonical()).unwrap();
    assert_eq!(c, back);
    assert_eq!(c.canonical(), back.canonical());
    assert_eq!(c.sweep_lambdas().len(), 7);
}

#[test]
fn section_seeds_match_request() {
    let c = RunConfig::from_toml("[poincare]\nseeds = 13").unwrap();
    assert_eq!(c.section_config(1.5).unwrap().initial_conditions.len(), 13);
}
