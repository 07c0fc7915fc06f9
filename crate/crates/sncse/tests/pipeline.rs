use std::path::PathBuf;

use sncse::checkpoint::Checkpoint;
use sncse::cli::{resolve_run, RunArgs};
use sncse::config::DATA_DIR_ENV;
use sncse::io::{load_corpus, load_sts};
use sncse::workflow::{best_checkpoint, evaluate_checkpoint, last_checkpoint, prepare, train_run, DataPaths};
use sncse_core::evaluation::evaluate;
use sncse_core::objectives::Hyperparams;
use sncse_core::trainer::{LossMode, RunConfig};

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixture")
}

fn fixture_paths() -> DataPaths {
    let mut paths = DataPaths::new(fixture().join("corpus.txt"));
    paths.negations = Some(fixture().join("negations.tsv"));
    paths.sts_dir = Some(fixture().join("sts"));
    paths
}

#[test]
fn fixture_loads_with_expected_counts() {
    assert_eq!(load_corpus(&fixture().join("corpus.txt")).unwrap().len(), 2000);
    let sts = load_sts(&fixture().join("sts")).unwrap();
    assert_eq!(sts.counts.get(&("toy".into(), "dev".into())), Some(&100));
    assert_eq!(sts.counts.get(&("toy".into(), "test".into())), Some(&100));
    let data = prepare(&fixture_paths()).unwrap();
    assert_eq!(data.sentences.len() + data.dropped, 2000);
    assert_eq!(data.negations.as_ref().unwrap().len(), data.sentences.len());
    assert!(data.dropped > 0, "fragments should be skipped by negation");
}

#[test]
fn checkpoint_round_trip_reproduces_dev_rho() {
    let data = prepare(&fixture_paths()).unwrap();
    let config = RunConfig {
        hyper: Hyperparams { batch_size: 8, ..Hyperparams::default() },
        max_steps: Some(6),
        eval_interval: 3,
        ..RunConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let out = train_run(&config, &data, Some(dir.path()), |_| {}).unwrap();
    let best_rho = out.log.best_dev_rho.unwrap();
    assert_eq!(best_rho, out.log.evals.iter().map(|e| e.dev_rho).fold(f64::MIN, f64::max));

    let loaded = Checkpoint::load(&dir.path().join("best.ckpt")).unwrap();
    assert!(loaded.params.bitwise_eq(&best_checkpoint(&config, &data, &out).params));
    let rho = evaluate_checkpoint(&loaded, &data.dev, false).unwrap().average;
    assert!((rho - best_rho).abs() <= 1e-12, "{rho} vs {best_rho}");
    assert_eq!(loaded.meta.dev_rho, Some(best_rho));

    let last = Checkpoint::load(&dir.path().join("last.ckpt")).unwrap();
    let opt = last.optimizer.clone().expect("last checkpoint keeps the optimizer");
    assert_eq!(opt.step_count(), 6);
    assert_eq!(Some(opt), last_checkpoint(&config, &data, &out).optimizer);
    let direct = evaluate(&out.last, &data.vocab, &data.dev, config.eval_options()).unwrap().average;
    assert_eq!(evaluate_checkpoint(&last, &data.dev, false).unwrap().average, direct);
}

#[test]
fn modes_without_negations_are_rejected() {
    let mut paths = fixture_paths();
    paths.negations = None;
    let data = prepare(&paths).unwrap();
    let config = RunConfig { mode: LossMode::Sncse, max_steps: Some(1), ..RunConfig::default() };
    assert!(train_run(&config, &data, None, |_| {}).is_err());
    let config = RunConfig { mode: LossMode::InfoNce, max_steps: Some(1), ..RunConfig::default() };
    assert!(train_run(&config, &data, None, |_| {}).is_ok());
}

// The only test in this binary that touches the environment.
#[test]
fn precedence_flags_config_env_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "alpha = 0.2\nseed = 7\ncorpus = c.txt\n").unwrap();

    std::env::set_var(DATA_DIR_ENV, "/data/root");
    let a = RunArgs { config: Some(conf.clone()), seed: Some(9), ..RunArgs::default() };
    let r = resolve_run(&a).unwrap();
    assert_eq!(r.config.hyper.alpha, 0.2);
    assert_eq!(r.config.hyper.seed, 9);
    assert_eq!(r.config.hyper.beta, 0.3);
    assert_eq!(r.paths.corpus, PathBuf::from("/data/root/c.txt"));

    std::env::remove_var(DATA_DIR_ENV);
    let r = resolve_run(&a).unwrap();
    assert_eq!(r.paths.corpus, dir.path().join("c.txt"));

    let r = resolve_run(&RunArgs { config: Some(fixture().join("fixture.conf")), ..RunArgs::default() }).unwrap();
    assert_eq!(r.paths.dev_subtasks, vec!["toy"]);
    assert!(r.paths.negations.unwrap().ends_with("negations.tsv"));
}
