//! Implementations behind the subcommands.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use srl_core::align::{intersect, parse_alignments, write_alignments, SentencePair};
use srl_core::bootstrap::{
    bootstrap, checkpoint_metrics, round_metrics_csv, BootstrapConfig, PartitionedData,
};
use srl_core::conll::{parse_conll_with, write_conll, ParseOptions, Provenance, Sentence};
use srl_core::eval::{emit_iteration_curves, render_text_report, report_csv, score, EvalReport};
use srl_core::pipeline::{run_pipeline, train_supervised, ModelBundle, PredicateSource};
use srl_core::project::{
    project_corpus, projection_density, write_cost_sidecar, CostMode, RoleBlacklist,
};
use srl_core::synth::{generate, SynthConfig};

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {}", path.display(), e)))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Data(format!("cannot write {}: {}", path.display(), e)))
}

fn read_corpus(
    path: &Path,
    options: &ParseOptions,
) -> Result<Vec<Sentence>, CliError> {
    let text = read(path)?;
    parse_conll_with(&text, options)
        .map_err(|e| CliError::Data(format!("{}: {}", path.display(), e)))
}

pub fn parse_options(any_pos: bool, provenance: Provenance) -> ParseOptions {
    let base = if any_pos {
        ParseOptions::any_pos()
    } else {
        ParseOptions::default()
    };
    base.with_provenance(provenance)
}

pub struct SynthArgs {
    pub out_dir: std::path::PathBuf,
    pub pairs: usize,
    pub vocab: usize,
    pub mean_length: usize,
    pub shift_rate: f64,
    pub dropout: f64,
    pub label_noise: f64,
    pub seed: u64,
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let config = SynthConfig {
        n_pairs: args.pairs,
        vocab_size: args.vocab,
        mean_length: args.mean_length,
        shift_rate: args.shift_rate,
        alignment_dropout: args.dropout,
        label_noise: args.label_noise,
        seed: args.seed,
    };
    let corpus = generate(&config)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {}", args.out_dir.display(), e)))?;
    write(&args.out_dir.join("source.conll"), &write_conll(&corpus.source))?;
    write(&args.out_dir.join("target.conll"), &write_conll(&corpus.target))?;
    write(&args.out_dir.join("gold.conll"), &write_conll(&corpus.gold_target))?;
    write(
        &args.out_dir.join("forward.align"),
        &write_alignments(&corpus.forward, false, false),
    )?;
    write(
        &args.out_dir.join("backward.align"),
        &write_alignments(&corpus.backward, false, true),
    )?;
    println!(
        "wrote {} pairs to {}",
        corpus.source.len(),
        args.out_dir.display()
    );
    Ok(())
}

pub struct ProjectArgs {
    pub source: std::path::PathBuf,
    pub target: std::path::PathBuf,
    pub forward: Option<std::path::PathBuf>,
    pub backward: Option<std::path::PathBuf>,
    pub backward_swapped: bool,
    pub intersected: Option<std::path::PathBuf>,
    pub out_dir: std::path::PathBuf,
    pub threshold: f64,
    pub blacklist: RoleBlacklist,
    pub one_based: bool,
    pub any_pos: bool,
}

pub fn cmd_project(args: &ProjectArgs) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&args.threshold) {
        return Err(CliError::Usage(format!(
            "threshold {} outside [0, 1]",
            args.threshold
        )));
    }
    let source = read_corpus(&args.source, &parse_options(args.any_pos, Provenance::Gold))?;
    let target = read_corpus(&args.target, &parse_options(args.any_pos, Provenance::Gold))?;
    if source.len() != target.len() {
        return Err(CliError::Data(format!(
            "corpora do not line up: {} has {} sentences, {} has {}",
            args.source.display(),
            source.len(),
            args.target.display(),
            target.len()
        )));
    }

    let alignments = match (&args.intersected, &args.forward, &args.backward) {
        (Some(path), _, _) => {
            let sets = parse_alignments(&read(path)?, args.one_based)
                .map_err(|e| CliError::Data(format!("{}: {}", path.display(), e)))?;
            check_line_count(path, sets.len(), &args.source, source.len())?;
            sets
        }
        (None, Some(fwd_path), Some(bwd_path)) => {
            let forward = parse_alignments(&read(fwd_path)?, args.one_based)
                .map_err(|e| CliError::Data(format!("{}: {}", fwd_path.display(), e)))?;
            let backward = parse_alignments(&read(bwd_path)?, args.one_based)
                .map_err(|e| CliError::Data(format!("{}: {}", bwd_path.display(), e)))?;
            check_line_count(fwd_path, forward.len(), &args.source, source.len())?;
            check_line_count(bwd_path, backward.len(), &args.source, source.len())?;
            forward
                .iter()
                .zip(&backward)
                .map(|(f, b)| {
                    let b = if args.backward_swapped {
                        b.swapped()
                    } else {
                        b.clone()
                    };
                    intersect(f, &b)
                })
                .collect()
        }
        _ => {
            return Err(CliError::Usage(
                "need either --intersected or both --forward and --backward".to_string(),
            ));
        }
    };

    let mut pairs = Vec::with_capacity(source.len());
    for (i, ((s, t), alignment)) in source
        .into_iter()
        .zip(target)
        .zip(alignments)
        .enumerate()
    {
        let pair = SentencePair::new(s, t, alignment)
            .map_err(|e| CliError::Data(format!("pair {}: {}", i, e)))?;
        pairs.push(pair);
    }

    let total = pairs.len();
    let densities: Vec<f64> = pairs
        .par_iter()
        .map(|pair| projection_density(pair).value)
        .collect();
    let kept: Vec<SentencePair> = pairs
        .into_iter()
        .zip(&densities)
        .filter(|(_, &d)| d >= args.threshold)
        .map(|(pair, _)| pair)
        .collect();

    let projections = project_corpus(&kept, &args.blacklist)?;
    let sentences: Vec<Sentence> = projections.iter().map(|p| p.sentence.clone()).collect();
    let collisions: usize = projections.iter().map(|p| p.collisions.len()).sum();

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {}", args.out_dir.display(), e)))?;
    write(&args.out_dir.join("projected.conll"), &write_conll(&sentences))?;
    write(&args.out_dir.join("costs.tsv"), &write_cost_sidecar(&projections))?;
    let report = density_report(total, kept.len(), args.threshold, &densities, collisions);
    write(&args.out_dir.join("density_report.txt"), &report)?;
    print!("{}", report);
    Ok(())
}

fn check_line_count(
    alignment_path: &Path,
    alignment_lines: usize,
    corpus_path: &Path,
    sentences: usize,
) -> Result<(), CliError> {
    if alignment_lines != sentences {
        return Err(CliError::Data(format!(
            "{} has {} lines but {} has {} sentences",
            alignment_path.display(),
            alignment_lines,
            corpus_path.display(),
            sentences
        )));
    }
    Ok(())
}

fn density_report(
    total: usize,
    kept: usize,
    threshold: f64,
    densities: &[f64],
    collisions: usize,
) -> String {
    let mut bins = [0usize; 10];
    for &d in densities {
        let bin = ((d * 10.0).floor() as usize).min(9);
        bins[bin] += 1;
    }
    let mut out = String::new();
    out.push_str(&format!("total pairs: {}\n", total));
    let percent = if total > 0 {
        100.0 * kept as f64 / total as f64
    } else {
        0.0
    };
    out.push_str(&format!("kept pairs: {} ({:.1}%)\n", kept, percent));
    out.push_str(&format!("threshold: {}\n", threshold));
    out.push_str(&format!("projection collisions: {}\n", collisions));
    out.push_str("density histogram:\n");
    for (i, count) in bins.iter().enumerate() {
        let upper = if i == 9 { "1.0]" } else { ")" };
        let label = if i == 9 {
            format!("[0.9, {}", upper)
        } else {
            format!("[{:.1}, {:.1})", i as f64 / 10.0, (i + 1) as f64 / 10.0)
        };
        out.push_str(&format!("  {} {}\n", label, count));
    }
    out
}

pub struct TrainArgs {
    pub input: std::path::PathBuf,
    pub model: std::path::PathBuf,
    pub epochs: u32,
    pub seed: u64,
    pub any_pos: bool,
}

pub fn cmd_train(args: &TrainArgs) -> Result<(), CliError> {
    let corpus = read_corpus(&args.input, &parse_options(args.any_pos, Provenance::Gold))?;
    let bundle = train_supervised(&corpus, args.epochs, args.seed)?;
    write(&args.model, &bundle.serialize())?;
    println!("wrote model to {}", args.model.display());
    Ok(())
}

pub struct BootstrapArgs {
    pub projected: std::path::PathBuf,
    pub costs: Option<std::path::PathBuf>,
    pub out_dir: std::path::PathBuf,
    pub dev: Option<std::path::PathBuf>,
    pub config: BootstrapConfig,
    pub blacklist: RoleBlacklist,
    pub curve_keys: Vec<(String, String)>,
    pub any_pos: bool,
}

pub fn cmd_bootstrap(args: &BootstrapArgs) -> Result<(), CliError> {
    let sentences = read_corpus(
        &args.projected,
        &parse_options(args.any_pos, Provenance::Projected),
    )?;
    let data = match &args.costs {
        Some(path) => {
            let rows = srl_core::project::parse_cost_sidecar(&read(path)?)
                .map_err(|e| CliError::Data(format!("{}: {}", path.display(), e)))?;
            PartitionedData::from_projection(sentences, &rows)?
        }
        None => {
            if args.config.cost_mode != CostMode::Uniform {
                return Err(CliError::Data(format!(
                    "cost mode '{}' needs a cost sidecar (--costs)",
                    args.config.cost_mode.as_str()
                )));
            }
            PartitionedData::from_labels_only(sentences)?
        }
    };

    let run = bootstrap(&data, &args.config)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {}", args.out_dir.display(), e)))?;
    for (round, checkpoint) in run.checkpoints.iter().enumerate() {
        write(
            &args.out_dir.join(format!("model_round_{}.model", round)),
            &checkpoint.serialize(),
        )?;
    }

    if let Some(dev_path) = &args.dev {
        let dev = read_corpus(dev_path, &parse_options(args.any_pos, Provenance::Gold))?;
        let reports: Vec<EvalReport> = run
            .checkpoints
            .iter()
            .map(|bundle| checkpoint_metrics(bundle, &dev, &args.blacklist))
            .collect::<srl_core::Result<_>>()?;
        write(&args.out_dir.join("metrics.csv"), &round_metrics_csv(&reports))?;
        write(
            &args.out_dir.join("curves.csv"),
            &emit_iteration_curves(&reports, &args.curve_keys),
        )?;
        for (round, report) in reports.iter().enumerate() {
            println!(
                "round {}: precision {:.4} recall {:.4} f1 {:.4}",
                round, report.overall.precision, report.overall.recall, report.overall.f1
            );
        }
    }
    println!(
        "wrote {} checkpoints to {} ({} labeled, {} unlabeled instances)",
        run.checkpoints.len(),
        args.out_dir.display(),
        data.labeled_count(),
        data.unlabeled_count()
    );
    Ok(())
}

pub struct PredictArgs {
    pub model: std::path::PathBuf,
    pub input: std::path::PathBuf,
    pub output: std::path::PathBuf,
    pub predicates: PredicateSource,
    pub any_pos: bool,
}

pub fn cmd_predict(args: &PredictArgs) -> Result<(), CliError> {
    let bundle = ModelBundle::deserialize(&read(&args.model)?)
        .map_err(|e| CliError::Data(format!("{}: {}", args.model.display(), e)))?;
    let corpus = read_corpus(&args.input, &parse_options(args.any_pos, Provenance::Gold))?;
    let predicted: Vec<Sentence> = corpus
        .par_iter()
        .map(|sentence| run_pipeline(&bundle, sentence, args.predicates))
        .collect::<srl_core::Result<_>>()?;
    write(&args.output, &write_conll(&predicted))?;
    println!("wrote predictions to {}", args.output.display());
    Ok(())
}

pub struct EvaluateArgs {
    pub gold: std::path::PathBuf,
    pub pred: std::path::PathBuf,
    pub csv: Option<std::path::PathBuf>,
    pub score_senses: bool,
    pub blacklist: RoleBlacklist,
    pub any_pos: bool,
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let gold = read_corpus(&args.gold, &parse_options(args.any_pos, Provenance::Gold))?;
    let pred = read_corpus(&args.pred, &parse_options(args.any_pos, Provenance::Predicted))?;
    let report = score(&gold, &pred, !args.score_senses, &args.blacklist)?;
    print!("{}", render_text_report(&report));
    if let Some(path) = &args.csv {
        write(path, &report_csv(&report))?;
    }
    Ok(())
}
