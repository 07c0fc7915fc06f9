//! Held-out gap with and without the margin loss on the bundled fixture.
//!
//! `cargo run --release -p sncse-tools --example suppression -- [seeds] [batch] [lr]`

use std::path::PathBuf;
use std::time::Instant;

use sncse::workflow::{heldout_gap, prepare, DataPaths};
use sncse_core::trainer::{LossMode, RunConfig};

fn main() -> sncse::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seeds: u64 = args.first().map_or(3, |s| s.parse().unwrap());
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixture");
    let mut paths = DataPaths::new(root.join("corpus.txt"));
    paths.negations = Some(root.join("negations.tsv"));
    let data = prepare(&paths)?;
    let mut base = RunConfig::default();
    if let Some(b) = args.get(1) {
        base.hyper.batch_size = b.parse().unwrap();
    }
    if let Some(lr) = args.get(2) {
        base.hyper.lr = lr.parse().unwrap();
    }
    for seed in 42..42 + seeds {
        for mode in [LossMode::Sncse, LossMode::InfoNce] {
            let mut cfg = base.clone();
            cfg.mode = mode;
            cfg.hyper.seed = seed;
            let t = Instant::now();
            let g = heldout_gap(&cfg, &data, 0.1, seed)?;
            println!(
                "seed {} mode {:<8} steps {} initial {:+.4} final {:+.4} ({:.1}s)",
                seed,
                mode.as_str(),
                g.steps,
                g.initial,
                g.last,
                t.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
