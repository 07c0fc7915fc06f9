//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on a usage error (help text printed), 2 on
//! a data, config or numerical error. Flag values override config-file
//! values, which override the built-in defaults.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use sncse_core::encoder::EncodeOptions;
use sncse_core::evaluation::{error_analysis, similarity_distribution, EvalReport};
use sncse_core::gradsuite::{run_suite, SuiteConfig};
use sncse_core::negation::{negate_corpus, NegateOptions};
use sncse_core::numerics::AdamWConfig;
use sncse_core::objectives::Hyperparams;
use sncse_core::trainer::{sort_rows, sweep_row, EncoderShape, Event, LossMode, RunConfig, SweepGrid};

use crate::checkpoint::Checkpoint;
use crate::config::{parse_f64_list, resolve, split_list, ConfigFile};
use crate::conllu::load_conllu;
use crate::error::{read_to_string, write_file, Error, Result};
use crate::io::{
    align_negations, analysis_tsv, eval_json, histogram_csv, load_corpus, load_negations, load_sts, modes_csv, negations_tsv, step_json, sweep_csv,
    SkipReport,
};
use crate::workflow::{compare_modes, evaluate_checkpoint, prepare, train_run, DataPaths, Prepared};

#[derive(Debug, Parser)]
#[command(name = "sncse", version, about = "Contrastive sentence embeddings with soft negative samples", arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Negate the sentences of a CoNLL-U file
    Negate(NegateArgs),
    /// Train one model
    Train(TrainArgs),
    /// Grid search over alpha, beta and lambda, or compare loss modes
    Sweep(SweepArgs),
    /// Score a checkpoint on STS-style data
    Eval(EvalArgs),
    /// Largest rank errors of an evaluation report
    Analyze(AnalyzeArgs),
    /// Cosine-similarity histograms of positive, negative and soft-negative pairs
    Simdist(SimdistArgs),
    /// Check every analytic gradient against finite differences
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
pub struct NegateArgs {
    /// Parsed input sentences
    #[arg(long)]
    pub conllu: PathBuf,
    /// Output TSV of original<TAB>negation
    #[arg(long)]
    pub out: PathBuf,
    /// JSON report of skipped sentences [default: not written]
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Drop sentences that are already negated instead of removing their negator
    #[arg(long)]
    pub skip_negated: bool,
}

/// Data and hyperparameter flags shared by `train` and `sweep`.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Run-config file (key = value lines)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Training corpus, one sentence per line
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// original<TAB>negation pairs aligned with the corpus
    #[arg(long)]
    pub negations: Option<PathBuf>,
    /// STS root holding <subtask>/<split>.tsv
    #[arg(long)]
    pub sts_dir: Option<PathBuf>,
    /// Comma-separated subtasks used for model selection [default: all]
    #[arg(long)]
    pub dev_subtasks: Option<String>,
    /// Output directory [default: out]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Objective: sncse, infonce, pl or nl [default: sncse]
    #[arg(long)]
    pub loss_mode: Option<LossMode>,
    /// Lower margin of the cosine gap [default: 0.1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Upper margin of the cosine gap [default: 0.3]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Weight of the margin loss [default: 0.001]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Softmax temperature [default: 0.05]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Sentences per batch [default: 64]
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Dropout rate [default: 0.1]
    #[arg(long)]
    pub dropout: Option<f64>,
    /// Learning rate [default: 0.001]
    #[arg(long)]
    pub lr: Option<f64>,
    /// Seed of every random stream [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Passes over the corpus [default: 1]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Stop after this many steps [default: no limit]
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Steps between dev evaluations [default: 125]
    #[arg(long)]
    pub eval_interval: Option<usize>,
    /// Linear warmup steps [default: 0]
    #[arg(long)]
    pub warmup_steps: Option<usize>,
    /// Global gradient-norm cap, or "none" [default: 1]
    #[arg(long)]
    pub clip_norm: Option<String>,
    /// Keep the projection head at evaluation time [default: off]
    #[arg(long)]
    pub keep_mlp: bool,
    /// Embedding width [default: 64]
    #[arg(long)]
    pub dim: Option<usize>,
    /// Attention heads [default: 4]
    #[arg(long)]
    pub heads: Option<usize>,
    /// Transformer layers [default: 2]
    #[arg(long)]
    pub layers: Option<usize>,
    /// Feed-forward width [default: 128]
    #[arg(long)]
    pub ffn_dim: Option<usize>,
    /// AdamW first-moment decay [default: 0.9]
    #[arg(long)]
    pub beta1: Option<f64>,
    /// AdamW second-moment decay [default: 0.999]
    #[arg(long)]
    pub beta2: Option<f64>,
    /// AdamW epsilon [default: 1e-8]
    #[arg(long)]
    pub eps: Option<f64>,
    /// AdamW decoupled weight decay [default: 0.01]
    #[arg(long)]
    pub weight_decay: Option<f64>,
    /// Minimum token count for the vocabulary [default: 2]
    #[arg(long)]
    pub min_freq: Option<usize>,
    /// Worker threads [default: 1]
    #[arg(long)]
    pub threads: Option<usize>,
    /// No progress output
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated alpha axis [default: 0,0.1,0.2]
    #[arg(long)]
    pub alphas: Option<String>,
    /// Comma-separated beta axis; 2 leaves the upper gap free [default: 0.2,0.3,0.4,2]
    #[arg(long)]
    pub betas: Option<String>,
    /// Comma-separated lambda axis [default: 0.0005,0.001,0.005]
    #[arg(long)]
    pub lambdas: Option<String>,
    /// Compare these loss modes (e.g. pl,nl,infonce,sncse) instead of the grid
    #[arg(long)]
    pub modes: Option<String>,
    /// CSV output [default: <out_dir>/sweep.csv or <out_dir>/modes.csv]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// STS root holding <subtask>/<split>.tsv
    #[arg(long)]
    pub sts_dir: PathBuf,
    /// Split to score
    #[arg(long, default_value = "test")]
    pub split: String,
    /// Comma-separated subtasks [default: all]
    #[arg(long)]
    pub subtasks: Option<String>,
    /// JSON report [default: not written]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Keep the projection head [default: as trained]
    #[arg(long)]
    pub keep_mlp: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// JSON report written by `eval`
    #[arg(long)]
    pub report: PathBuf,
    /// Pairs per subtask
    #[arg(short, long, default_value_t = 5)]
    pub k: usize,
    /// TSV output [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimdistArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Sentences to sample from
    #[arg(long)]
    pub corpus: PathBuf,
    /// original<TAB>negation pairs aligned with the corpus
    #[arg(long)]
    pub negations: PathBuf,
    /// Sentences sampled
    #[arg(short, long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// CSV output [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Keep the projection head [default: as trained]
    #[arg(long)]
    pub keep_mlp: bool,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Random instances per check
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Largest relative error accepted
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            2
        }
    }
}

pub fn run(command: Command) -> Result<i32> {
    match command {
        Command::Negate(a) => negate_cmd(a),
        Command::Train(a) => train_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Simdist(a) => simdist_cmd(a),
        Command::Gradcheck(a) => gradcheck_cmd(a),
    }
}

fn negate_cmd(a: NegateArgs) -> Result<i32> {
    let doc = load_conllu(&a.conllu)?;
    let texts: Vec<String> = doc.sentences.iter().map(|s| s.text.clone()).collect();
    let opts = NegateOptions { skip_negated: a.skip_negated };
    let mut neg = negate_corpus(&texts, &doc.sentences, &opts)?;
    for s in &mut neg.skips {
        s.line = doc.lines[s.line - 1];
    }
    for p in &mut neg.pairs {
        p.line = doc.lines[p.line - 1];
    }
    write_file(&a.out, negations_tsv(&neg).as_bytes())?;
    let report = SkipReport::new(&neg, doc.missing_root);
    if let Some(path) = &a.report {
        write_file(path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    }
    eprintln!(
        "{} sentences: {} negated, {} skipped, {} without a root",
        report.sentences,
        report.negated,
        report.skipped.len(),
        report.missing_root
    );
    Ok(0)
}

/// Everything `train` and `sweep` need, after merging flags, config file
/// and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub config: RunConfig,
    pub paths: DataPaths,
    pub out_dir: PathBuf,
    pub threads: usize,
}

fn pick<T: std::str::FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str, default: T) -> Result<T> {
    Ok(match flag {
        Some(v) => v,
        None => cfg.get(key)?.unwrap_or(default),
    })
}

fn parse_clip(s: &str) -> Result<Option<f64>> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| Error::Config(format!("clip_norm {:?} is neither a number nor \"none\"", s)))
}

/// Merges flags over the config file over defaults.
pub fn resolve_run(a: &RunArgs) -> Result<Resolved> {
    let cfg = match &a.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let h = Hyperparams::default();
    let hyper = Hyperparams {
        tau: pick(a.tau, &cfg, "tau", h.tau)?,
        alpha: pick(a.alpha, &cfg, "alpha", h.alpha)?,
        beta: pick(a.beta, &cfg, "beta", h.beta)?,
        lambda: pick(a.lambda, &cfg, "lambda", h.lambda)?,
        batch_size: pick(a.batch_size, &cfg, "batch_size", h.batch_size)?,
        dropout: pick(a.dropout, &cfg, "dropout", h.dropout)?,
        lr: pick(a.lr, &cfg, "lr", h.lr)?,
        seed: pick(a.seed, &cfg, "seed", h.seed)?,
    };
    let o = AdamWConfig::default();
    let optimizer = AdamWConfig {
        lr: hyper.lr,
        beta1: pick(a.beta1, &cfg, "beta1", o.beta1)?,
        beta2: pick(a.beta2, &cfg, "beta2", o.beta2)?,
        eps: pick(a.eps, &cfg, "eps", o.eps)?,
        weight_decay: pick(a.weight_decay, &cfg, "weight_decay", o.weight_decay)?,
    };
    let e = EncoderShape::default();
    let encoder = EncoderShape {
        dim: pick(a.dim, &cfg, "dim", e.dim)?,
        heads: pick(a.heads, &cfg, "heads", e.heads)?,
        layers: pick(a.layers, &cfg, "layers", e.layers)?,
        ffn_dim: pick(a.ffn_dim, &cfg, "ffn_dim", e.ffn_dim)?,
    };
    let d = RunConfig::default();
    let clip_norm = match a.clip_norm.as_deref().or(cfg.raw("clip_norm")) {
        Some(s) => parse_clip(s)?,
        None => d.clip_norm,
    };
    let max_steps = match a.max_steps {
        Some(m) => Some(m),
        None => cfg.get("max_steps")?,
    };
    let config = RunConfig {
        hyper,
        mode: pick(a.loss_mode, &cfg, "loss_mode", d.mode)?,
        optimizer,
        encoder,
        epochs: pick(a.epochs, &cfg, "epochs", d.epochs)?,
        max_steps,
        eval_interval: pick(a.eval_interval, &cfg, "eval_interval", d.eval_interval)?,
        warmup_steps: pick(a.warmup_steps, &cfg, "warmup_steps", d.warmup_steps)?,
        clip_norm,
        keep_mlp: a.keep_mlp || cfg.get("keep_mlp")?.unwrap_or(d.keep_mlp),
    };
    config.validate()?;

    let root = cfg.data_root();
    let path = |flag: &Option<PathBuf>, key: &str, default: &str| -> Option<PathBuf> {
        flag.clone().or_else(|| cfg.path(key)).or_else(|| root.as_ref().map(|r| resolve(Some(r), Path::new(default))))
    };
    let corpus = path(&a.corpus, "corpus", "corpus.txt")
        .ok_or_else(|| Error::Config("no corpus given (use --corpus, a config file or SNCSE_DATA_DIR)".into()))?;
    let mut paths = DataPaths::new(corpus);
    paths.negations = path(&a.negations, "negations", "negations.tsv").filter(|p| a.negations.is_some() || cfg.raw("negations").is_some() || p.exists());
    paths.sts_dir = path(&a.sts_dir, "sts_dir", "sts").filter(|p| a.sts_dir.is_some() || cfg.raw("sts_dir").is_some() || p.exists());
    paths.dev_subtasks = a.dev_subtasks.as_deref().map(split_list).or_else(|| cfg.get_list("dev_subtasks")).unwrap_or_default();
    paths.test_subtasks = cfg.get_list("test_subtasks").unwrap_or_default();
    paths.dev_split = cfg.raw("dev_split").unwrap_or("dev").into();
    paths.test_split = cfg.raw("test_split").unwrap_or("test").into();
    paths.min_freq = pick(a.min_freq, &cfg, "min_freq", 2)?;
    let out_dir = a.out_dir.clone().or_else(|| cfg.path("out_dir")).unwrap_or_else(|| PathBuf::from("out"));
    let threads = pick(a.threads, &cfg, "threads", 1)?.max(1);
    Ok(Resolved { config, paths, out_dir, threads })
}

fn load_prepared(r: &Resolved, quiet: bool) -> Result<Prepared> {
    let data = prepare(&r.paths)?;
    if !quiet {
        eprintln!(
            "{} sentences ({} dropped without a negation), vocabulary {}, {} dev pairs, {} test pairs",
            data.sentences.len(),
            data.dropped,
            data.vocab.len(),
            data.dev.len(),
            data.test.len()
        );
    }
    Ok(data)
}

fn train_cmd(a: TrainArgs) -> Result<i32> {
    let r = resolve_run(&a.run)?;
    let data = load_prepared(&r, a.run.quiet)?;
    let quiet = a.run.quiet;
    let interval = r.config.eval_interval;
    let outcome = train_run(&r.config, &data, Some(&r.out_dir), |ev| {
        if quiet {
            return;
        }
        match ev {
            Event::Step(s) if (s.step + 1) % interval == 0 || s.step == 0 => eprintln!("{}", step_json(s)),
            Event::Eval(e) => eprintln!("{}", eval_json(e)),
            _ => {}
        }
    })?;
    let log = &outcome.log;
    println!(
        "mode {} steps {} best_step {} best_dev_rho {}",
        r.config.mode,
        log.steps.len(),
        log.best_step.map_or("-".into(), |s| s.to_string()),
        log.best_dev_rho.map_or("-".into(), |x| format!("{:.6}", x))
    );
    println!("wrote {}", r.out_dir.display());
    Ok(0)
}

/// Runs `jobs` on up to `threads` workers; results keep job order.
fn parallel_map<T, R, F>(jobs: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    if threads <= 1 || jobs.len() <= 1 {
        return jobs.iter().map(&f).collect();
    }
    let chunk = jobs.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    })
}

fn sweep_cmd(a: SweepArgs) -> Result<i32> {
    let r = resolve_run(&a.run)?;
    let data = load_prepared(&r, a.run.quiet)?;
    if let Some(modes) = &a.modes {
        let modes = split_list(modes)
            .iter()
            .map(|m| m.parse::<LossMode>().map_err(Error::Core))
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<_> = parallel_map(&modes, r.threads, |m| compare_modes(&r.config, &data, &[*m]))
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let csv = modes_csv(&rows);
        write_file(&a.out.unwrap_or_else(|| r.out_dir.join("modes.csv")), csv.as_bytes())?;
        print!("{}", csv);
        return Ok(0);
    }
    let d = SweepGrid::default();
    let grid = SweepGrid {
        alphas: a.alphas.as_deref().map(parse_f64_list).transpose()?.unwrap_or(d.alphas),
        betas: a.betas.as_deref().map(parse_f64_list).transpose()?.unwrap_or(d.betas),
        lambdas: a.lambdas.as_deref().map(parse_f64_list).transpose()?.unwrap_or(d.lambdas),
    };
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(Error::Config("sweep grid has an empty axis".into()));
    }
    let quiet = a.run.quiet;
    let results = parallel_map(&cells, r.threads, |&(alpha, beta, lambda)| -> Result<f64> {
        let mut cfg = r.config.clone();
        cfg.hyper.alpha = alpha;
        cfg.hyper.beta = beta;
        cfg.hyper.lambda = lambda;
        let out = sncse_core::trainer::train(&cfg, &data.train_data())?;
        let rho = out.log.best_dev_rho.unwrap_or(f64::NAN);
        if !quiet {
            eprintln!("alpha {} beta {} lambda {} dev_rho {:.6}", alpha, beta, lambda, rho);
        }
        Ok(rho)
    });
    let mut rows = Vec::with_capacity(cells.len());
    for (&(alpha, beta, lambda), rho) in cells.iter().zip(results) {
        rows.push(sweep_row(alpha, beta, lambda, rho?));
    }
    sort_rows(&mut rows);
    let csv = sweep_csv(&rows);
    write_file(&a.out.unwrap_or_else(|| r.out_dir.join("sweep.csv")), csv.as_bytes())?;
    print!("{}", csv);
    Ok(0)
}

fn eval_cmd(a: EvalArgs) -> Result<i32> {
    let ckpt = Checkpoint::load(&a.checkpoint)?;
    let coll = load_sts(&a.sts_dir)?;
    let subtasks = a.subtasks.as_deref().map(split_list).unwrap_or_default();
    let pairs = coll.split(&a.split, &subtasks);
    if pairs.is_empty() {
        return Err(Error::Config(format!("no {} pairs under {}", a.split, a.sts_dir.display())));
    }
    let report = evaluate_checkpoint(&ckpt, &pairs, a.keep_mlp || ckpt.meta.keep_mlp)?;
    let mut out = std::io::stdout().lock();
    for s in &report.subtasks {
        let _ = write!(out, "{}\t{} pairs\trho {:.6}", s.subtask, s.pairs.len(), s.rho);
        if let Some(c) = s.rho_closed_form {
            let _ = write!(out, "\tclosed-form {:.6}", c);
        }
        if s.excluded > 0 {
            let _ = write!(out, "\t{} excluded", s.excluded);
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out, "average\t{:.6}", report.average);
    if let Some(p) = &a.out {
        write_file(p, serde_json::to_string_pretty(&report)?.as_bytes())?;
    }
    Ok(0)
}

fn analyze_cmd(a: AnalyzeArgs) -> Result<i32> {
    let report: EvalReport = serde_json::from_str(&read_to_string(&a.report)?)?;
    let analysis = error_analysis(&report, a.k)?;
    for n in &analysis.notes {
        eprintln!("note: {}", n);
    }
    let tsv = analysis_tsv(&analysis);
    match &a.out {
        Some(p) => write_file(p, tsv.as_bytes())?,
        None => print!("{}", tsv),
    }
    Ok(0)
}

fn simdist_cmd(a: SimdistArgs) -> Result<i32> {
    let ckpt = Checkpoint::load(&a.checkpoint)?;
    let corpus = load_corpus(&a.corpus)?;
    let (sentences, negations) = align_negations(&corpus, &load_negations(&a.negations)?)?;
    let opts = EncodeOptions { training: false, dropout: 0.0, keep_mlp: a.keep_mlp || ckpt.meta.keep_mlp };
    let n = a.n.min(sentences.len());
    if n < a.n {
        eprintln!("note: sample size {} exceeds {} sentences; sampling all of them", a.n, sentences.len());
    }
    let s: Vec<&str> = sentences.iter().map(String::as_str).collect();
    let ng: Vec<&str> = negations.iter().map(String::as_str).collect();
    let dist = similarity_distribution(&ckpt.params, &ckpt.vocab, &s, &ng, n, a.seed, opts)?;
    let csv = histogram_csv(&dist);
    match &a.out {
        Some(p) => write_file(p, csv.as_bytes())?,
        None => print!("{}", csv),
    }
    let peak = |h: &sncse_core::evaluation::Histogram| h.peak().map_or("-".into(), |p| format!("{:.3}", p));
    eprintln!("peaks: positive {} negative {} soft_negative {}", peak(&dist.positive), peak(&dist.negative), peak(&dist.soft_negative));
    Ok(0)
}

fn gradcheck_cmd(a: GradcheckArgs) -> Result<i32> {
    let cfg = SuiteConfig { trials: a.trials, seed: a.seed, ..SuiteConfig::default() };
    let results = run_suite(&cfg)?;
    let mut ok = true;
    for r in &results {
        let pass = r.max_error < a.tolerance;
        ok &= pass;
        println!("{:<14} max_rel_err {:.3e} {}", r.name, r.max_error, if pass { "ok" } else { "FAIL" });
    }
    if !ok {
        eprintln!("error: gradient check above tolerance {:e}", a.tolerance);
        return Ok(2);
    }
    Ok(0)
}
