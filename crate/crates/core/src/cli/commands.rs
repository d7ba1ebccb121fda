use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use serde::{Deserialize, Serialize};

use super::manifest::{sha256_file, RunManifest};
use super::{
    Cli, CliError, Command, Context, EvalArgs, GradcheckArgs, IngestArgs, Protocol, ReplayArgs,
    ReportArgs, SynthArgs, TrainArgs,
};
use crate::corpus::{
    build_vocab, load_corpus, parse_corpus, save_corpus, Corpus, CorpusOptions, CorpusPaths,
    Stopwords, TruncationCaps, SCHEMA_VERSION,
};
use crate::evalharness::{
    read_results, render_table, run_in_session_cv, run_out_of_session, write_report, EvalResult,
    Experiment,
};
use crate::ndcore::GradCheckOptions;
use crate::synthgen::{oracle_accuracies, write_synthetic, SynthSpec};
use crate::votemodel::{
    check_gradients, micro_instance, Dataset, ModelConfig, ModelKind, VoteModel, PRESETS,
};
use crate::Error;

type CliResult<T = ()> = std::result::Result<T, CliError>;

pub(super) fn dispatch(command: Command, argv: Vec<String>, ctx: &Context) -> CliResult {
    match command {
        Command::Ingest(a) => ingest(a, argv, ctx),
        Command::Train(a) => train(a, argv, ctx),
        Command::Eval(a) => eval(a, argv, ctx),
        Command::Synth(a) => synth(a, argv, ctx),
        Command::Gradcheck(a) => gradcheck(a, argv, ctx),
        Command::Report(a) => report(a, argv, ctx),
        Command::Replay(a) => replay(a),
    }
}

fn require_file(path: &Path) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "input file `{}` does not exist",
            path.display()
        )))
    }
}

/// Unknown preset names and missing files are usage errors; a config file
/// that fails to parse is a runtime error.
fn resolve_model(spec: &str, ctx: &Context) -> CliResult<ModelConfig> {
    let mut cfg = if PRESETS.contains(&spec) {
        ModelConfig::preset(spec)?
    } else if Path::new(spec).is_file() {
        ModelConfig::from_file(Path::new(spec))?
    } else {
        return Err(CliError::Usage(format!(
            "`{spec}` is neither a model preset ({}) nor a config file",
            PRESETS.join(", ")
        )));
    };
    if let Some(seed) = ctx.seed_override {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn finish(manifest: &mut RunManifest, path: &Path, started: Instant, ctx: &Context) -> CliResult {
    if ctx.replaying {
        return Ok(());
    }
    manifest.duration_secs = started.elapsed().as_secs_f64();
    manifest.write(path)?;
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct IngestOptions {
    summary_cap: Option<usize>,
    fulltext_cap: Option<usize>,
    percentile_caps: Option<f64>,
    unanimity_threshold: Option<f64>,
    sessions: Option<Vec<String>>,
    schema_version: Option<String>,
}

fn ingest(args: IngestArgs, argv: Vec<String>, ctx: &Context) -> CliResult {
    let started = Instant::now();
    for p in [&args.bills, &args.legislators, &args.votes] {
        require_file(p)?;
    }
    let mut manifest = RunManifest::new("ingest", argv, ctx.seed_override)?;
    let options: IngestOptions = match &args.options {
        Some(path) => {
            require_file(path)?;
            manifest.add_input(path)?;
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text).map_err(Error::from)?
        }
        None => IngestOptions::default(),
    };
    let stopwords = match &args.stopwords {
        Some(path) => {
            require_file(path)?;
            manifest.add_input(path)?;
            Stopwords::from_file(path)?
        }
        None => Stopwords::builtin(),
    };
    let defaults = CorpusOptions::default();
    let opts = CorpusOptions {
        stopwords,
        caps: TruncationCaps {
            summary: options.summary_cap.unwrap_or(defaults.caps.summary),
            fulltext: options.fulltext_cap.unwrap_or(defaults.caps.fulltext),
        },
        percentile_caps: options.percentile_caps,
        unanimity_threshold: options
            .unanimity_threshold
            .unwrap_or(defaults.unanimity_threshold),
        sessions: options
            .sessions
            .clone()
            .map(|s| s.into_iter().collect::<BTreeSet<_>>()),
    };
    let paths = CorpusPaths {
        bills: args.bills.clone(),
        legislators: args.legislators.clone(),
        votes: args.votes.clone(),
    };
    for p in [&paths.bills, &paths.legislators, &paths.votes] {
        manifest.add_input(p)?;
    }
    let version = options.schema_version.as_deref().unwrap_or(SCHEMA_VERSION);
    let corpus = Corpus::build(parse_corpus(&paths, version)?, &opts)?;
    save_corpus(&args.out, &corpus)?;
    print_stats(&corpus);
    manifest.config = serde_json::to_value(&options).map_err(Error::from)?;
    manifest.add_output(&args.out)?;
    finish(
        &mut manifest,
        &sibling(&args.out, ".manifest.json"),
        started,
        ctx,
    )
}

fn print_stats(corpus: &Corpus) {
    let s = &corpus.stats;
    println!(
        "parsed {} bills, dropped {} unanimous, kept {} bills and {} votes",
        s.bills_parsed,
        s.bills_dropped_unanimous,
        corpus.bills.len(),
        corpus.votes.len()
    );
    println!(
        "{:<12} {:>7} {:>9} {:>7}",
        "session", "bills", "votes", "% yes"
    );
    for (session, st) in &s.sessions {
        println!(
            "{session:<12} {:>7} {:>9} {:>7.2}",
            st.bills,
            st.votes,
            100.0 * st.yes_rate()
        );
    }
    println!(
        "{:<12} {:>7} {:>9} {:>7.2}",
        "all",
        corpus.bills.len(),
        corpus.votes.len(),
        100.0 * corpus.yes_rate()
    );
}

fn load_cache(path: &Path, manifest: &mut RunManifest) -> CliResult<Corpus> {
    require_file(path)?;
    manifest.add_input(path)?;
    Ok(load_corpus(path)?)
}

fn note_model_input(cfg: &ModelConfig, manifest: &mut RunManifest) -> CliResult {
    if let Some(path) = &cfg.embeddings {
        require_file(path)?;
        manifest.add_input(path)?;
    }
    Ok(())
}

fn train(args: TrainArgs, argv: Vec<String>, ctx: &Context) -> CliResult {
    let started = Instant::now();
    let mut manifest = RunManifest::new("train", argv, ctx.seed_override)?;
    let cfg = resolve_model(&args.model_config, ctx)?;
    if Path::new(&args.model_config).is_file() {
        manifest.add_input(Path::new(&args.model_config))?;
    }
    note_model_input(&cfg, &mut manifest)?;
    if cfg.kind != ModelKind::Neural {
        return Err(CliError::Usage(format!(
            "`train` writes neural checkpoints; `{}` is not neural",
            cfg.name
        )));
    }
    let mut corpus = load_cache(&args.corpus, &mut manifest)?;
    if !args.sessions.is_empty() {
        corpus = corpus.restrict_sessions(&args.sessions);
    }
    let vocab = build_vocab(corpus.bills.values());
    let data = Dataset::from_votes(&corpus, &vocab, &corpus.votes)?;
    let mut model = VoteModel::for_corpus(cfg.clone(), vocab, &corpus)?;
    let history = model.train(&data)?;
    model.save(&args.out_checkpoint)?;
    let history_path = sibling(&args.out_checkpoint, ".history.json");
    std::fs::write(
        &history_path,
        serde_json::to_string_pretty(&history).map_err(Error::from)? + "\n",
    )
    .map_err(|e| Error::io(&history_path, e))?;
    if let Some(acc) = history.final_train_accuracy {
        println!(
            "{}: {} votes, final train accuracy {:.4}",
            cfg.name,
            data.len(),
            acc
        );
    }
    manifest.config = serde_json::to_value(&cfg).map_err(Error::from)?;
    manifest.seeds.insert("model".into(), cfg.seed);
    manifest.add_output(&args.out_checkpoint)?;
    manifest.add_output(&history_path)?;
    finish(
        &mut manifest,
        &sibling(&args.out_checkpoint, ".manifest.json"),
        started,
        ctx,
    )
}

fn eval(args: EvalArgs, argv: Vec<String>, ctx: &Context) -> CliResult {
    let started = Instant::now();
    let mut manifest = RunManifest::new("eval", argv, ctx.seed_override)?;
    let mut experiment = match &args.experiment {
        Some(path) => {
            require_file(path)?;
            manifest.add_input(path)?;
            Experiment::from_file(path)?
        }
        None => Experiment::default(),
    };
    if let Some(seed) = ctx.seed_override {
        experiment.fold_seed = seed;
    }
    if args.protocol == Protocol::OutOfSession
        && (experiment.train_sessions.is_empty() || experiment.test_blocks.is_empty())
    {
        return Err(CliError::Usage(
            "out-of-session evaluation needs --experiment with train_sessions and test_blocks"
                .into(),
        ));
    }
    let configs = args
        .models
        .iter()
        .map(|m| resolve_model(m, ctx))
        .collect::<CliResult<Vec<_>>>()?;
    for (spec, cfg) in args.models.iter().zip(&configs) {
        if Path::new(spec).is_file() {
            manifest.add_input(Path::new(spec))?;
        }
        note_model_input(cfg, &mut manifest)?;
    }
    let corpus = load_cache(&args.corpus, &mut manifest)?;
    let mut results: Vec<EvalResult> = Vec::new();
    for cfg in &configs {
        log::info!("evaluating {}", cfg.name);
        match args.protocol {
            Protocol::InSession => results.push(run_in_session_cv(&corpus, cfg, &experiment)?),
            Protocol::OutOfSession => {
                results.extend(run_out_of_session(&corpus, cfg, &experiment)?)
            }
        }
        manifest
            .seeds
            .insert(format!("model:{}", cfg.name), cfg.seed);
    }
    manifest.seeds.insert("folds".into(), experiment.fold_seed);
    let files = write_report(&results, &args.out_dir, "results")?;
    print!("{}", render_table(&results));
    manifest.config = serde_json::json!({ "experiment": experiment, "models": configs });
    for f in [&files.csv, &files.table, &files.json] {
        manifest.add_output(f)?;
    }
    finish(
        &mut manifest,
        &args.out_dir.join("manifest.json"),
        started,
        ctx,
    )
}

fn synth(args: SynthArgs, argv: Vec<String>, ctx: &Context) -> CliResult {
    let started = Instant::now();
    require_file(&args.spec)?;
    let mut manifest = RunManifest::new("synth", argv, ctx.seed_override)?;
    manifest.add_input(&args.spec)?;
    let mut spec = SynthSpec::from_file(&args.spec)?;
    if let Some(seed) = ctx.seed_override {
        spec.seed = seed;
    }
    let paths = write_synthetic(&spec, &args.out)?;
    let mut outputs = vec![paths.bills, paths.legislators, paths.votes];
    if !args.oracle_train.is_empty() {
        let report = oracle_accuracies(&spec, &args.oracle_train)?;
        let path = args.out.join("oracle.json");
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n",
        )
        .map_err(|e| Error::io(&path, e))?;
        println!(
            "oracle in-session: text-only {:.4}, with sponsor {:.4}",
            report.in_session.text_only, report.in_session.with_sponsor
        );
        for (label, acc) in &report.out_of_session {
            println!(
                "oracle {label}: text-only {:.4}, with sponsor {:.4}",
                acc.text_only, acc.with_sponsor
            );
        }
        outputs.push(path);
    }
    println!("wrote synthetic corpus to {}", args.out.display());
    manifest.config = serde_json::to_value(&spec).map_err(Error::from)?;
    manifest.seeds.insert("synth".into(), spec.seed);
    for f in &outputs {
        manifest.add_output(f)?;
    }
    finish(&mut manifest, &args.out.join("manifest.json"), started, ctx)
}

fn gradcheck(args: GradcheckArgs, argv: Vec<String>, ctx: &Context) -> CliResult {
    let started = Instant::now();
    let mut manifest = RunManifest::new("gradcheck", argv, ctx.seed_override)?;
    let cfg = resolve_model(&args.model_config, ctx)?;
    if cfg.kind != ModelKind::Neural {
        return Err(CliError::Usage(format!(
            "`{}` has no gradients to check",
            cfg.name
        )));
    }
    let (model, data) = micro_instance(&cfg)?;
    let opts = GradCheckOptions {
        tolerance: args.tolerance,
        max_coords_per_param: args.max_coords,
        seed: cfg.seed,
        ..GradCheckOptions::default()
    };
    let sabotage = args.sabotage;
    let report = check_gradients(&model, &data, &opts, |g| {
        if sabotage {
            g.scale(2.0);
        }
    })?;
    for (name, err) in &report.per_param {
        println!("{name:<16} max rel err {err:.3e}");
    }
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    println!(
        "{verdict}: {} coordinates, max relative error {:.3e} (tolerance {:.0e})",
        report.checked, report.max_rel_error, report.tolerance
    );
    if let Some(out) = &args.out {
        std::fs::write(
            out,
            serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n",
        )
        .map_err(|e| Error::io(out, e))?;
        manifest.config = serde_json::to_value(&cfg).map_err(Error::from)?;
        manifest.seeds.insert("model".into(), cfg.seed);
        manifest.add_output(out)?;
        finish(&mut manifest, &sibling(out, ".manifest.json"), started, ctx)?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Runtime(Error::Check(format!(
            "{} coordinates exceed the tolerance",
            report.failures.len()
        ))))
    }
}

fn report(args: ReportArgs, argv: Vec<String>, ctx: &Context) -> CliResult {
    let started = Instant::now();
    let mut manifest = RunManifest::new("report", argv, ctx.seed_override)?;
    let mut results = Vec::new();
    for path in &args.results {
        require_file(path)?;
        manifest.add_input(path)?;
        results.extend(read_results(path)?);
    }
    let files = write_report(&results, &args.out_dir, "report")?;
    print!("{}", render_table(&results));
    for f in [&files.csv, &files.table, &files.json] {
        manifest.add_output(f)?;
    }
    finish(
        &mut manifest,
        &args.out_dir.join("manifest.json"),
        started,
        ctx,
    )
}

fn replay(args: ReplayArgs) -> CliResult {
    require_file(&args.manifest)?;
    let manifest = RunManifest::read(&args.manifest)?;
    std::env::set_current_dir(&manifest.cwd).map_err(|e| Error::io(&manifest.cwd, e))?;
    for (path, hash) in &manifest.inputs {
        let now = sha256_file(Path::new(path))?;
        if &now != hash {
            return Err(CliError::Runtime(Error::Check(format!(
                "input `{path}` changed since the recorded run"
            ))));
        }
    }
    let mut full = vec!["rollcall".to_string()];
    full.extend(manifest.argv.iter().cloned());
    let cli = Cli::try_parse_from(&full).map_err(|e| CliError::Usage(e.to_string()))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Usage(
            "a replay manifest cannot point at another replay".into(),
        ));
    }
    let inner = Context {
        seed_override: manifest.seed_override,
        replaying: true,
    };
    dispatch(cli.command, manifest.argv.clone(), &inner)?;
    let mut mismatched = Vec::new();
    for (path, hash) in &manifest.outputs {
        let now = sha256_file(Path::new(path))?;
        let same = &now == hash;
        println!("{} {path}", if same { "identical" } else { "DIFFERS  " });
        if !same {
            mismatched.push(path.clone());
        }
    }
    if mismatched.is_empty() {
        println!(
            "replay reproduced {} output file(s)",
            manifest.outputs.len()
        );
        Ok(())
    } else {
        Err(CliError::Runtime(Error::Check(format!(
            "replay outputs differ: {}",
            mismatched.join(", ")
        ))))
    }
}
