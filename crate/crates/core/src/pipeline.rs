//! The staged SRL classifier: predicate identification, predicate sense
//! disambiguation, argument identification and argument classification,
//! each backed by its own [`LinearModel`], decoded greedily.
//!
//! # Bundle file format (version 1)
//!
//! A bundle serializes to a single UTF-8 text file:
//!
//! ```text
//! srl-model v1
//! stages <count>
//! stage <name>                   # predicate_id | predicate_sense |
//! labels <n>                     # argument_id | argument_label
//! <label>                        # n lines, label-list order
//! update_count <u64>
//! cells <m>
//! <feature-hex16> <label-index> <weight-bits-hex16> <accumulated-bits-hex16>
//! ```
//!
//! Cells are sorted by (feature, label index) and weights are written as
//! raw IEEE-754 bit patterns, so equal models serialize to equal bytes.

use crate::conll::{PredicateFrame, Provenance, Sentence};
use crate::error::{Error, Result};
use crate::features::{extract_features, Stage};
use crate::model::{train_stage_with_labels, LinearModel, TrainingInstance};

/// Labels of the binary identification stages; "N" first so an untrained
/// model rejects.
pub const BINARY_LABELS: [&str; 2] = ["N", "Y"];

/// Where predicate positions and senses come from during decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateSource {
    /// Copy predicate positions and senses from the input frames and run
    /// only the argument stages.
    Gold,
    /// Run predicate identification and sense disambiguation first.
    Predict,
}

/// One trained model per pipeline stage; stages may be absent when a
/// training regime does not produce them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelBundle {
    pub predicate_id: Option<LinearModel>,
    pub predicate_sense: Option<LinearModel>,
    pub argument_id: Option<LinearModel>,
    pub argument_label: Option<LinearModel>,
}

impl ModelBundle {
    pub fn stage(&self, stage: Stage) -> Option<&LinearModel> {
        match stage {
            Stage::PredicateId => self.predicate_id.as_ref(),
            Stage::PredicateSense => self.predicate_sense.as_ref(),
            Stage::ArgumentId => self.argument_id.as_ref(),
            Stage::ArgumentLabel => self.argument_label.as_ref(),
        }
    }

    pub fn set_stage(&mut self, stage: Stage, model: LinearModel) {
        match stage {
            Stage::PredicateId => self.predicate_id = Some(model),
            Stage::PredicateSense => self.predicate_sense = Some(model),
            Stage::ArgumentId => self.argument_id = Some(model),
            Stage::ArgumentLabel => self.argument_label = Some(model),
        }
    }

    fn require(&self, stage: Stage) -> Result<&LinearModel> {
        self.stage(stage).ok_or_else(|| {
            Error::InvalidArgument(format!("bundle is missing the {} stage", stage.as_str()))
        })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::from("srl-model v1\n");
        let stages: Vec<(Stage, &LinearModel)> = Stage::ALL
            .iter()
            .filter_map(|&s| self.stage(s).map(|m| (s, m)))
            .collect();
        out.push_str(&format!("stages {}\n", stages.len()));
        for (stage, model) in stages {
            out.push_str(&format!("stage {}\n", stage.as_str()));
            out.push_str(&format!("labels {}\n", model.labels().len()));
            for label in model.labels() {
                out.push_str(label);
                out.push('\n');
            }
            out.push_str(&format!("update_count {}\n", model.update_count()));
            let cells = model.sorted_cells();
            out.push_str(&format!("cells {}\n", cells.len()));
            for (feature, idx, weight, accumulated) in cells {
                out.push_str(&format!(
                    "{:016x} {} {:016x} {:016x}\n",
                    feature,
                    idx,
                    weight.to_bits(),
                    accumulated.to_bits()
                ));
            }
        }
        out
    }

    pub fn deserialize(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::ModelFormat(format!("unexpected end of file, expected {}", what)))
        };
        if next("header")? != "srl-model v1" {
            return Err(Error::ModelFormat("bad header".to_string()));
        }
        let stage_count: usize = parse_kv(next("stage count")?, "stages")?;
        let mut bundle = ModelBundle::default();
        for _ in 0..stage_count {
            let stage_line = next("stage name")?;
            let name = stage_line
                .strip_prefix("stage ")
                .ok_or_else(|| Error::ModelFormat(format!("expected 'stage', got '{}'", stage_line)))?;
            let stage = Stage::from_name(name)?;
            let label_count: usize = parse_kv(next("label count")?, "labels")?;
            let mut labels = Vec::with_capacity(label_count);
            for _ in 0..label_count {
                labels.push(next("label")?.to_string());
            }
            let update_count: u64 = parse_kv(next("update count")?, "update_count")?;
            let cell_count: usize = parse_kv(next("cell count")?, "cells")?;
            let mut cells = Vec::with_capacity(cell_count);
            for _ in 0..cell_count {
                let line = next("cell")?;
                let mut parts = line.split(' ');
                let feature = u64::from_str_radix(
                    parts.next().ok_or_else(|| bad_cell(line))?,
                    16,
                )
                .map_err(|_| bad_cell(line))?;
                let idx: usize = parts
                    .next()
                    .ok_or_else(|| bad_cell(line))?
                    .parse()
                    .map_err(|_| bad_cell(line))?;
                let weight = f64::from_bits(
                    u64::from_str_radix(parts.next().ok_or_else(|| bad_cell(line))?, 16)
                        .map_err(|_| bad_cell(line))?,
                );
                let accumulated = f64::from_bits(
                    u64::from_str_radix(parts.next().ok_or_else(|| bad_cell(line))?, 16)
                        .map_err(|_| bad_cell(line))?,
                );
                if parts.next().is_some() {
                    return Err(bad_cell(line));
                }
                cells.push((feature, idx, weight, accumulated));
            }
            bundle.set_stage(stage, LinearModel::from_parts(labels, update_count, cells)?);
        }
        if lines.next().is_some() {
            return Err(Error::ModelFormat("trailing content".to_string()));
        }
        Ok(bundle)
    }
}

fn parse_kv<T: std::str::FromStr>(line: &str, key: &str) -> Result<T> {
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::ModelFormat(format!("expected '{} <value>', got '{}'", key, line)))
}

fn bad_cell(line: &str) -> Error {
    Error::ModelFormat(format!("malformed cell line '{}'", line))
}

/// Decode one sentence. Uses averaged weights throughout.
pub fn run_pipeline(
    bundle: &ModelBundle,
    sentence: &Sentence,
    predicates: PredicateSource,
) -> Result<Sentence> {
    let arg_id = bundle.require(Stage::ArgumentId)?;
    let arg_label = bundle.require(Stage::ArgumentLabel)?;

    let predicate_seeds: Vec<(usize, String)> = match predicates {
        PredicateSource::Gold => sentence
            .frames()
            .iter()
            .map(|f| (f.predicate_index, f.sense.clone()))
            .collect(),
        PredicateSource::Predict => {
            let pred_id = bundle.require(Stage::PredicateId)?;
            let pred_sense = bundle.require(Stage::PredicateSense)?;
            let mut seeds = Vec::new();
            for token in sentence.tokens() {
                let fv = extract_features(sentence, Stage::PredicateId, token.index, token.index)?;
                if pred_id.predict(&fv, true) == "Y" {
                    let fv = extract_features(
                        sentence,
                        Stage::PredicateSense,
                        token.index,
                        token.index,
                    )?;
                    let sense = pred_sense.predict(&fv, true).to_string();
                    seeds.push((token.index, sense));
                }
            }
            seeds
        }
    };

    let mut frames = Vec::with_capacity(predicate_seeds.len());
    for (predicate_index, sense) in predicate_seeds {
        let mut frame = PredicateFrame::new(predicate_index, sense);
        for token in sentence.tokens() {
            if token.index == predicate_index {
                continue;
            }
            let fv = extract_features(sentence, Stage::ArgumentId, token.index, predicate_index)?;
            if arg_id.predict(&fv, true) == "Y" {
                let fv =
                    extract_features(sentence, Stage::ArgumentLabel, token.index, predicate_index)?;
                let role = arg_label.predict(&fv, true).to_string();
                frame.args.insert(token.index, role);
            }
        }
        frames.push(frame);
    }
    sentence.with_frames(frames, Provenance::Predicted)
}

/// Per-stage training instances.
#[derive(Debug, Default)]
pub struct StageInstances {
    pub predicate_id: Vec<TrainingInstance>,
    pub predicate_sense: Vec<TrainingInstance>,
    pub argument_id: Vec<TrainingInstance>,
    pub argument_label: Vec<TrainingInstance>,
}

/// Assemble fully supervised training instances: every token is a
/// predicate-identification decision and, per frame, every non-predicate
/// token an argument-identification decision, with roleless tokens as
/// negatives. All costs are 1.
pub fn gold_training_instances(sentences: &[Sentence]) -> Result<StageInstances> {
    let mut out = StageInstances::default();
    for sentence in sentences {
        for token in sentence.tokens() {
            let fv = extract_features(sentence, Stage::PredicateId, token.index, token.index)?;
            let is_pred = sentence
                .frames()
                .iter()
                .any(|f| f.predicate_index == token.index);
            out.predicate_id.push(TrainingInstance::new(
                fv,
                if is_pred { "Y" } else { "N" },
                1.0,
            ));
        }
        for frame in sentence.frames() {
            let p = frame.predicate_index;
            let fv = extract_features(sentence, Stage::PredicateSense, p, p)?;
            out.predicate_sense
                .push(TrainingInstance::new(fv, frame.sense.clone(), 1.0));
            for token in sentence.tokens() {
                if token.index == p {
                    continue;
                }
                let fv = extract_features(sentence, Stage::ArgumentId, token.index, p)?;
                match frame.args.get(&token.index) {
                    Some(role) => {
                        out.argument_id.push(TrainingInstance::new(fv, "Y", 1.0));
                        let fv =
                            extract_features(sentence, Stage::ArgumentLabel, token.index, p)?;
                        out.argument_label
                            .push(TrainingInstance::new(fv, role.clone(), 1.0));
                    }
                    None => out.argument_id.push(TrainingInstance::new(fv, "N", 1.0)),
                }
            }
        }
    }
    Ok(out)
}

/// Train all four stages on fully labeled sentences.
pub fn train_supervised(sentences: &[Sentence], epochs: u32, seed: u64) -> Result<ModelBundle> {
    let instances = gold_training_instances(sentences)?;
    let mut senses: Vec<String> = instances
        .predicate_sense
        .iter()
        .map(|i| i.gold_label.clone())
        .collect();
    senses.sort();
    senses.dedup();
    let mut roles: Vec<String> = instances
        .argument_label
        .iter()
        .map(|i| i.gold_label.clone())
        .collect();
    roles.sort();
    roles.dedup();
    let binary: Vec<String> = BINARY_LABELS.iter().map(|s| s.to_string()).collect();

    let mut bundle = ModelBundle::default();
    bundle.predicate_id = Some(train_stage_with_labels(
        &instances.predicate_id,
        binary.clone(),
        epochs,
        seed,
    )?);
    bundle.predicate_sense = Some(train_stage_with_labels(
        &instances.predicate_sense,
        senses,
        epochs,
        seed.wrapping_add(1),
    )?);
    bundle.argument_id = Some(train_stage_with_labels(
        &instances.argument_id,
        binary,
        epochs,
        seed.wrapping_add(2),
    )?);
    bundle.argument_label = Some(train_stage_with_labels(
        &instances.argument_label,
        roles,
        epochs,
        seed.wrapping_add(3),
    )?);
    Ok(bundle)
}
