//! Iterative self-training over partially projected data.
//!
//! The instance universe is fixed up front: one sense decision per
//! projected frame and one argument decision per (frame, candidate
//! token) pair. Decisions grounded in the alignment — projected roles,
//! projected senses and aligned tokens the source frame leaves roleless
//! — form the labeled partition; candidates without any alignment
//! evidence form the unlabeled partition. Round 0 trains on the labeled
//! partition alone. Each following round labels the unlabeled partition
//! with the previous model and, in the relabel variant, overwrites the
//! labeled partition too, then retrains on everything.

use rayon::prelude::*;

use crate::conll::Sentence;
use crate::error::{Error, Result};
use crate::eval::EvalReport;
use crate::features::{extract_features, FeatureVector, Stage};
use crate::model::{train_stage_from, train_stage_with_labels, Origin, TrainingInstance};
use crate::pipeline::{run_pipeline, ModelBundle, PredicateSource, BINARY_LABELS};
use crate::project::{completeness_cost, CostMode, CostRow, InstanceKind, RoleBlacklist};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Label only the unlabeled partition; projected labels stay fixed.
    FillIn,
    /// Overwrite every label, projected ones included, each round.
    Relabel,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::FillIn => "fill-in",
            Variant::Relabel => "relabel",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fill-in" | "fill_in" => Ok(Variant::FillIn),
            "relabel" => Ok(Variant::Relabel),
            other => Err(Error::InvalidArgument(format!(
                "unknown bootstrap variant '{}'",
                other
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    /// Number of self-training rounds m; round 0 is the initial training
    /// run on the labeled partition.
    pub rounds: usize,
    pub variant: Variant,
    pub cost_mode: CostMode,
    pub epochs_per_round: u32,
    pub seed: u64,
    /// Initialize each round from the previous round's weights instead
    /// of zeros.
    pub warm_start: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            rounds: 7,
            variant: Variant::Relabel,
            cost_mode: CostMode::Uniform,
            epochs_per_round: 10,
            seed: 1,
            warm_start: false,
        }
    }
}

/// The current decision held by an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ItemLabel {
    Sense(String),
    Role(String),
    NotArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemKind {
    Sense,
    Argument { token: usize },
}

/// One decision of the fixed instance universe with its cost components
/// and precomputed features.
#[derive(Debug, Clone)]
pub struct Item {
    pub sentence: usize,
    pub frame: usize,
    pub kind: ItemKind,
    /// Projection-derived label; `None` marks the unlabeled partition.
    pub initial: Option<ItemLabel>,
    pub comp: f64,
    pub dep: f64,
    id_features: FeatureVector,
    label_features: Option<FeatureVector>,
}

/// Projected sentences with their itemized decision universe. The item
/// list never changes size: labeled and unlabeled partitions together
/// cover it at every round.
#[derive(Debug, Clone)]
pub struct PartitionedData {
    sentences: Vec<Sentence>,
    items: Vec<Item>,
    /// Item span per sentence, for the parallel labeling pass.
    spans: Vec<std::ops::Range<usize>>,
    sense_labels: Vec<String>,
    role_labels: Vec<String>,
}

impl PartitionedData {
    /// Build the universe from a projected corpus and its cost sidecar.
    /// Sidecar rows attribute costs: labeled rows to projected senses
    /// and roles, "_" rows to aligned tokens without a source role
    /// (negatives). Candidates with no row form the unlabeled partition.
    /// Sentences without frames carry no items.
    pub fn from_projection(sentences: Vec<Sentence>, rows: &[CostRow]) -> Result<Self> {
        use std::collections::HashMap;
        use std::collections::VecDeque;

        let mut positives: HashMap<(usize, usize, bool, &str), VecDeque<&CostRow>> =
            HashMap::new();
        let mut negatives: HashMap<(usize, usize), VecDeque<&CostRow>> = HashMap::new();
        let mut sentence_comp: HashMap<usize, f64> = HashMap::new();
        for row in rows {
            if row.sentence_id >= sentences.len() {
                return Err(Error::Data(format!(
                    "cost sidecar references sentence {} but the corpus has {}",
                    row.sentence_id,
                    sentences.len()
                )));
            }
            sentence_comp.entry(row.sentence_id).or_insert(row.comp);
            match &row.label {
                Some(label) => positives
                    .entry((
                        row.sentence_id,
                        row.token_index,
                        row.kind == InstanceKind::Predicate,
                        label.as_str(),
                    ))
                    .or_default()
                    .push_back(row),
                None => negatives
                    .entry((row.sentence_id, row.token_index))
                    .or_default()
                    .push_back(row),
            }
        }

        let mut builder = PartitionBuilder::default();
        for (s, sentence) in sentences.iter().enumerate() {
            builder.start_sentence();
            for (f, frame) in sentence.frames().iter().enumerate() {
                let p = frame.predicate_index;
                let row = positives
                    .get_mut(&(s, p, true, frame.sense.as_str()))
                    .and_then(|q| q.pop_front())
                    .ok_or_else(|| {
                        Error::Data(format!(
                            "cost sidecar has no row for predicate '{}' at sentence {} token {}",
                            frame.sense, s, p
                        ))
                    })?;
                builder.push_sense(sentence, s, f, row.comp, row.dep)?;
                for t in 1..=sentence.len() {
                    if t == p {
                        continue;
                    }
                    if let Some(role) = frame.args.get(&t) {
                        let row = positives
                            .get_mut(&(s, t, false, role.as_str()))
                            .and_then(|q| q.pop_front())
                            .ok_or_else(|| {
                                Error::Data(format!(
                                    "cost sidecar has no row for role '{}' at sentence {} token {}",
                                    role, s, t
                                ))
                            })?;
                        builder.push_argument(
                            sentence,
                            s,
                            f,
                            t,
                            Some(ItemLabel::Role(role.clone())),
                            row.comp,
                            row.dep,
                        )?;
                    } else if let Some(row) =
                        negatives.get_mut(&(s, t)).and_then(|q| q.pop_front())
                    {
                        builder.push_argument(
                            sentence,
                            s,
                            f,
                            t,
                            Some(ItemLabel::NotArg),
                            row.comp,
                            row.dep,
                        )?;
                    } else {
                        let comp = sentence_comp.get(&s).copied().unwrap_or(1.0);
                        builder.push_argument(sentence, s, f, t, None, comp, 1.0)?;
                    }
                }
            }
            builder.end_sentence();
        }
        builder.finish(sentences)
    }

    /// Build the universe from labels alone, when no sidecar exists:
    /// every roleless candidate joins the unlabeled partition, costs are
    /// sentence completeness and a neutral relation match.
    pub fn from_labels_only(sentences: Vec<Sentence>) -> Result<Self> {
        let mut builder = PartitionBuilder::default();
        for (s, sentence) in sentences.iter().enumerate() {
            builder.start_sentence();
            let comp = completeness_cost(sentence);
            for (f, frame) in sentence.frames().iter().enumerate() {
                builder.push_sense(sentence, s, f, comp, 1.0)?;
                for t in 1..=sentence.len() {
                    if t == frame.predicate_index {
                        continue;
                    }
                    let label = frame.args.get(&t).map(|r| ItemLabel::Role(r.clone()));
                    builder.push_argument(sentence, s, f, t, label, comp, 1.0)?;
                }
            }
            builder.end_sentence();
        }
        builder.finish(sentences)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn labeled_count(&self) -> usize {
        self.items.iter().filter(|i| i.initial.is_some()).count()
    }

    pub fn unlabeled_count(&self) -> usize {
        self.items.len() - self.labeled_count()
    }
}

#[derive(Default)]
struct PartitionBuilder {
    items: Vec<Item>,
    spans: Vec<std::ops::Range<usize>>,
    span_start: usize,
}

impl PartitionBuilder {
    fn start_sentence(&mut self) {
        self.span_start = self.items.len();
    }

    fn end_sentence(&mut self) {
        self.spans.push(self.span_start..self.items.len());
    }

    fn push_sense(
        &mut self,
        sentence: &Sentence,
        s: usize,
        f: usize,
        comp: f64,
        dep: f64,
    ) -> Result<()> {
        let p = sentence.frames()[f].predicate_index;
        self.items.push(Item {
            sentence: s,
            frame: f,
            kind: ItemKind::Sense,
            initial: Some(ItemLabel::Sense(sentence.frames()[f].sense.clone())),
            comp,
            dep,
            id_features: extract_features(sentence, Stage::PredicateSense, p, p)?,
            label_features: None,
        });
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn push_argument(
        &mut self,
        sentence: &Sentence,
        s: usize,
        f: usize,
        token: usize,
        initial: Option<ItemLabel>,
        comp: f64,
        dep: f64,
    ) -> Result<()> {
        let p = sentence.frames()[f].predicate_index;
        self.items.push(Item {
            sentence: s,
            frame: f,
            kind: ItemKind::Argument { token },
            initial,
            comp,
            dep,
            id_features: extract_features(sentence, Stage::ArgumentId, token, p)?,
            label_features: Some(extract_features(sentence, Stage::ArgumentLabel, token, p)?),
        });
        Ok(())
    }

    fn finish(self, sentences: Vec<Sentence>) -> Result<PartitionedData> {
        let mut sense_labels: Vec<String> = Vec::new();
        let mut role_labels: Vec<String> = Vec::new();
        for item in &self.items {
            match &item.initial {
                Some(ItemLabel::Sense(s)) => sense_labels.push(s.clone()),
                Some(ItemLabel::Role(r)) => role_labels.push(r.clone()),
                _ => {}
            }
        }
        sense_labels.sort();
        sense_labels.dedup();
        role_labels.sort();
        role_labels.dedup();
        Ok(PartitionedData {
            sentences,
            items: self.items,
            spans: self.spans,
            sense_labels,
            role_labels,
        })
    }
}

/// Result of a bootstrap run: one model bundle per round (theta^0 to
/// theta^m), the number of labeling passes taken and the final labeling
/// state, index-aligned with the partition's items.
#[derive(Debug)]
pub struct BootstrapRun {
    pub checkpoints: Vec<ModelBundle>,
    pub labeling_passes: usize,
    pub final_labels: Vec<Option<ItemLabel>>,
}

impl BootstrapRun {
    /// The final model theta^m.
    pub fn final_model(&self) -> &ModelBundle {
        self.checkpoints.last().expect("at least round 0 exists")
    }
}

/// Run the self-training loop and return all per-round checkpoints.
pub fn bootstrap(data: &PartitionedData, config: &BootstrapConfig) -> Result<BootstrapRun> {
    if data.labeled_count() == 0 {
        return Err(Error::InvalidArgument(
            "bootstrap needs a non-empty labeled partition".to_string(),
        ));
    }
    if data.sense_labels.is_empty() || data.role_labels.is_empty() {
        return Err(Error::InvalidArgument(
            "the labeled partition covers no senses or no roles".to_string(),
        ));
    }
    if config.epochs_per_round < 1 {
        return Err(Error::InvalidArgument("epochs must be >= 1".to_string()));
    }

    let mut labels: Vec<Option<ItemLabel>> =
        data.items.iter().map(|i| i.initial.clone()).collect();
    let mut checkpoints = Vec::with_capacity(config.rounds + 1);
    checkpoints.push(train_round(data, &labels, config, 0, None)?);

    let mut labeling_passes = 0;
    for round in 1..=config.rounds {
        let previous = &checkpoints[round - 1];
        labels = label_pass(data, previous, config.variant);
        labeling_passes += 1;
        let init = config.warm_start.then_some(previous);
        let bundle = train_round(data, &labels, config, round, init)
            .or_else(|_| fallback_round(previous))?;
        checkpoints.push(bundle);
    }

    Ok(BootstrapRun {
        checkpoints,
        labeling_passes,
        final_labels: labels,
    })
}

// A later round can in principle drive a stage's instance list empty
// (e.g. relabeling rejects every argument); reuse the previous round's
// models in that case rather than aborting the run.
fn fallback_round(previous: &ModelBundle) -> Result<ModelBundle> {
    Ok(previous.clone())
}

/// Label the universe with a frozen model: unlabeled items always, the
/// labeled partition too under the relabel variant. Sentences are
/// processed in parallel; output order is the item order.
fn label_pass(
    data: &PartitionedData,
    bundle: &ModelBundle,
    variant: Variant,
) -> Vec<Option<ItemLabel>> {
    let sense_model = bundle
        .stage(Stage::PredicateSense)
        .expect("bootstrap bundles always carry a sense stage");
    let arg_id = bundle
        .stage(Stage::ArgumentId)
        .expect("bootstrap bundles always carry an argument-id stage");
    let arg_label = bundle
        .stage(Stage::ArgumentLabel)
        .expect("bootstrap bundles always carry an argument-label stage");

    let per_sentence: Vec<Vec<Option<ItemLabel>>> = data
        .spans
        .par_iter()
        .map(|span| {
            data.items[span.clone()]
                .iter()
                .map(|item| {
                    if variant == Variant::FillIn && item.initial.is_some() {
                        return item.initial.clone();
                    }
                    match item.kind {
                        ItemKind::Sense => Some(ItemLabel::Sense(
                            sense_model.predict(&item.id_features, true).to_string(),
                        )),
                        ItemKind::Argument { .. } => {
                            if arg_id.predict(&item.id_features, true) == "Y" {
                                let features = item
                                    .label_features
                                    .as_ref()
                                    .expect("argument items carry label features");
                                Some(ItemLabel::Role(
                                    arg_label.predict(features, true).to_string(),
                                ))
                            } else {
                                Some(ItemLabel::NotArg)
                            }
                        }
                    }
                })
                .collect()
        })
        .collect();
    per_sentence.into_iter().flatten().collect()
}

fn train_round(
    data: &PartitionedData,
    labels: &[Option<ItemLabel>],
    config: &BootstrapConfig,
    round: usize,
    init: Option<&ModelBundle>,
) -> Result<ModelBundle> {
    let mut sense_instances = Vec::new();
    let mut arg_id_instances = Vec::new();
    let mut arg_label_instances = Vec::new();

    for (item, label) in data.items.iter().zip(labels) {
        let Some(label) = label else { continue };
        let cost = match config.cost_mode {
            CostMode::Uniform => 1.0,
            CostMode::Comp => item.comp,
            CostMode::Dep => item.dep,
            CostMode::CompDep => (item.comp + item.dep) / 2.0,
        };
        let origin = if item.initial.is_none() {
            Origin::FilledIn
        } else if round > 0 && config.variant == Variant::Relabel {
            Origin::Relabeled
        } else {
            Origin::ProjectedLabeled
        };
        let instance = |features: &FeatureVector, gold: &str| {
            let mut inst = TrainingInstance::new(features.clone(), gold, cost);
            inst.origin = origin;
            inst
        };
        match label {
            ItemLabel::Sense(sense) => {
                sense_instances.push(instance(&item.id_features, sense));
            }
            ItemLabel::NotArg => {
                arg_id_instances.push(instance(&item.id_features, "N"));
            }
            ItemLabel::Role(role) => {
                arg_id_instances.push(instance(&item.id_features, "Y"));
                let features = item
                    .label_features
                    .as_ref()
                    .expect("argument items carry label features");
                arg_label_instances.push(instance(features, role));
            }
        }
    }

    let binary: Vec<String> = BINARY_LABELS.iter().map(|s| s.to_string()).collect();
    let mut bundle = ModelBundle::default();
    bundle.predicate_sense = Some(train_stage_for(
        &sense_instances,
        data.sense_labels.clone(),
        init.and_then(|b| b.stage(Stage::PredicateSense)),
        config,
        round,
        0,
    )?);
    bundle.argument_id = Some(train_stage_for(
        &arg_id_instances,
        binary,
        init.and_then(|b| b.stage(Stage::ArgumentId)),
        config,
        round,
        1,
    )?);
    bundle.argument_label = Some(train_stage_for(
        &arg_label_instances,
        data.role_labels.clone(),
        init.and_then(|b| b.stage(Stage::ArgumentLabel)),
        config,
        round,
        2,
    )?);
    Ok(bundle)
}

fn train_stage_for(
    instances: &[TrainingInstance],
    labels: Vec<String>,
    init: Option<&crate::model::LinearModel>,
    config: &BootstrapConfig,
    round: usize,
    stage_index: u64,
) -> Result<crate::model::LinearModel> {
    let seed = derive_seed(config.seed, round, stage_index);
    match init {
        Some(model) => train_stage_from(model.clone(), instances, config.epochs_per_round, seed),
        None => train_stage_with_labels(instances, labels, config.epochs_per_round, seed),
    }
}

/// Per-(round, stage) shuffle seed, derived deterministically from the
/// configured base seed.
fn derive_seed(base: u64, round: usize, stage: u64) -> u64 {
    base.wrapping_add((round as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(stage)
}

/// Evaluate a checkpoint on a gold development set in gold-predicate
/// mode.
pub fn checkpoint_metrics(
    bundle: &ModelBundle,
    dev: &[Sentence],
    blacklist: &RoleBlacklist,
) -> Result<EvalReport> {
    let predictions: Vec<Sentence> = dev
        .par_iter()
        .map(|sentence| run_pipeline(bundle, sentence, PredicateSource::Gold))
        .collect::<Result<_>>()?;
    crate::eval::score(dev, &predictions, true, blacklist)
}

/// Round-by-round CSV: (round, stage, scope, precision, recall, f1) with
/// an overall row and one row per dependency key for every report.
pub fn round_metrics_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from("round,stage,scope,precision,recall,f1\n");
    for (round, report) in reports.iter().enumerate() {
        out.push_str(&format!(
            "{},arguments,overall,{},{},{}\n",
            round, report.overall.precision, report.overall.recall, report.overall.f1
        ));
        for ((pos, role), dep) in &report.per_dependency {
            out.push_str(&format!(
                "{},arguments,{}+{},{},{},{}\n",
                round, pos, role, dep.prf.precision, dep.prf.recall, dep.prf.f1
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::{AlignmentSet, SentencePair};
    use crate::conll::{PredicateFrame, Provenance, Token};
    use crate::project::{project_corpus, write_cost_sidecar, parse_cost_sidecar};
    use approx::assert_relative_eq;

    fn token(index: usize, form: &str, pos: &str, head: usize, deprel: &str) -> Token {
        Token {
            index,
            form: form.to_string(),
            lemma: form.to_lowercase(),
            pos: pos.to_string(),
            head,
            deprel: deprel.to_string(),
        }
    }

    /// Clauses of subject, verb, object, an aligned roleless token
    /// (negative evidence) and optionally one unaligned token that lands
    /// in the unlabeled partition. Subject and object forms repeat, so a
    /// planted outlier label conflicts with the majority mapping.
    fn projected_corpus(
        role_for_subject: &[&str],
        with_unaligned: bool,
        verb_cycle: usize,
    ) -> PartitionedData {
        let pairs: Vec<SentencePair> = role_for_subject
            .iter()
            .enumerate()
            .map(|(i, subj_role)| {
                let n = if with_unaligned { 5 } else { 4 };
                let mut src = vec![
                    token(1, "subj", "NOUN", 2, "nsubj"),
                    token(2, &format!("verb{}", i % verb_cycle), "VERB", 0, "root"),
                    token(3, "obj", "NOUN", 2, "dobj"),
                    token(4, "filler", "ADV", 2, "advmod"),
                ];
                let mut tgt = vec![
                    token(1, "tsubj", "NOUN", 2, "nsubj"),
                    token(2, &format!("tverb{}", i % verb_cycle), "VERB", 0, "root"),
                    token(3, "tobj", "NOUN", 2, "dobj"),
                    token(4, "tfiller", "ADV", 2, "advmod"),
                ];
                if with_unaligned {
                    src.push(token(5, "extra", "PRT", 2, "prt"));
                    tgt.push(token(5, "textra", "PRT", 2, "prt"));
                }
                let source = Sentence::new(
                    src,
                    vec![PredicateFrame::new(2, format!("verb{}.01", i % verb_cycle))
                        .with_arg(1, *subj_role)
                        .with_arg(3, "A1")],
                    Provenance::Gold,
                )
                .unwrap();
                let target = Sentence::new(tgt, vec![], Provenance::Gold).unwrap();
                // Token 5, when present, is unaligned on purpose.
                let alignment =
                    AlignmentSet::from_links((1..=n.min(4)).map(|k| (k, k)));
                SentencePair::new(source, target, alignment).unwrap()
            })
            .collect();
        let projections = project_corpus(&pairs, &RoleBlacklist::default()).unwrap();
        let sidecar = write_cost_sidecar(&projections);
        let rows = parse_cost_sidecar(&sidecar).unwrap();
        let sentences: Vec<Sentence> = projections.into_iter().map(|p| p.sentence).collect();
        PartitionedData::from_projection(sentences, &rows).unwrap()
    }

    #[test]
    fn partition_splits_labeled_and_unlabeled() {
        let data = projected_corpus(&["A0", "A0", "A0"], true, 3);
        // Per sentence: 1 sense, 2 roles, 1 negative, 1 unaligned.
        assert_eq!(data.items().len(), 15);
        assert_eq!(data.labeled_count(), 12);
        assert_eq!(data.unlabeled_count(), 3);
        assert_eq!(data.sense_labels.len(), 3);
        assert_eq!(data.role_labels, vec!["A0".to_string(), "A1".to_string()]);
        let negatives = data
            .items()
            .iter()
            .filter(|i| i.initial == Some(ItemLabel::NotArg))
            .count();
        assert_eq!(negatives, 3);
    }

    #[test]
    fn zero_rounds_trains_once_on_labeled_data() {
        let data = projected_corpus(&["A0", "A0", "A0"], true, 3);
        let config = BootstrapConfig {
            rounds: 0,
            epochs_per_round: 3,
            ..Default::default()
        };
        let run = bootstrap(&data, &config).unwrap();
        assert_eq!(run.checkpoints.len(), 1);
        assert_eq!(run.labeling_passes, 0);
    }

    #[test]
    fn rounds_imply_passes_and_checkpoints() {
        let data = projected_corpus(&["A0", "A0", "A0", "A0"], true, 3);
        for rounds in [1usize, 3] {
            let config = BootstrapConfig {
                rounds,
                epochs_per_round: 2,
                ..Default::default()
            };
            let run = bootstrap(&data, &config).unwrap();
            assert_eq!(run.checkpoints.len(), rounds + 1);
            assert_eq!(run.labeling_passes, rounds);
            assert_eq!(run.final_labels.len(), data.items().len());
            assert!(run.final_labels.iter().all(|l| l.is_some()));
        }
    }

    #[test]
    fn fill_in_keeps_projected_labels() {
        let data = projected_corpus(&["A0", "A3", "A0", "A0"], true, 3);
        let config = BootstrapConfig {
            rounds: 3,
            variant: Variant::FillIn,
            epochs_per_round: 3,
            ..Default::default()
        };
        let run = bootstrap(&data, &config).unwrap();
        for (item, label) in data.items().iter().zip(&run.final_labels) {
            if item.initial.is_some() {
                assert_eq!(label.as_ref(), item.initial.as_ref());
            }
        }
    }

    #[test]
    fn relabel_overwrites_an_outlier_label() {
        // Three of four subjects say A0; the outlier sentence shares the
        // same subject form as sentence 0, so relabeling snaps it to A0.
        let data = projected_corpus(&["A0", "A0", "A0", "A3"], true, 1);
        let outlier = data
            .items()
            .iter()
            .position(|i| i.initial == Some(ItemLabel::Role("A3".to_string())))
            .unwrap();
        let config = BootstrapConfig {
            rounds: 2,
            variant: Variant::Relabel,
            epochs_per_round: 5,
            ..Default::default()
        };
        let run = bootstrap(&data, &config).unwrap();
        assert_eq!(
            run.final_labels[outlier],
            Some(ItemLabel::Role("A0".to_string()))
        );

        let fill = BootstrapConfig {
            variant: Variant::FillIn,
            ..config
        };
        let run = bootstrap(&data, &fill).unwrap();
        assert_eq!(
            run.final_labels[outlier],
            Some(ItemLabel::Role("A3".to_string()))
        );
    }

    #[test]
    fn fixed_seed_reproduces_checkpoints() {
        let data = projected_corpus(&["A0", "A1", "A0", "A0"], true, 3);
        let config = BootstrapConfig {
            rounds: 2,
            epochs_per_round: 3,
            cost_mode: CostMode::CompDep,
            ..Default::default()
        };
        let a = bootstrap(&data, &config).unwrap();
        let b = bootstrap(&data, &config).unwrap();
        assert_eq!(a.checkpoints.len(), b.checkpoints.len());
        for (x, y) in a.checkpoints.iter().zip(&b.checkpoints) {
            assert_eq!(x.serialize(), y.serialize());
        }
    }

    #[test]
    fn empty_labeled_partition_is_an_error() {
        let sentences = vec![Sentence::new(
            vec![token(1, "a", "NOUN", 0, "root")],
            vec![],
            Provenance::Projected,
        )
        .unwrap()];
        let data = PartitionedData::from_projection(sentences, &[]).unwrap();
        assert!(bootstrap(&data, &BootstrapConfig::default()).is_err());
    }

    #[test]
    fn missing_sidecar_rows_are_a_data_error() {
        let data = projected_corpus(&["A0"], true, 3);
        let sentences = data.sentences().to_vec();
        assert!(PartitionedData::from_projection(sentences, &[]).is_err());
    }

    #[test]
    fn warm_start_differs_from_cold_start_but_stays_deterministic() {
        let data = projected_corpus(&["A0", "A1", "A0", "A0"], true, 3);
        let cold = BootstrapConfig {
            rounds: 2,
            epochs_per_round: 2,
            ..Default::default()
        };
        let warm = BootstrapConfig {
            warm_start: true,
            ..cold
        };
        let w1 = bootstrap(&data, &warm).unwrap();
        let w2 = bootstrap(&data, &warm).unwrap();
        assert_eq!(
            w1.final_model().serialize(),
            w2.final_model().serialize()
        );
        let c = bootstrap(&data, &cold).unwrap();
        // Warm-started weights accumulate across rounds.
        assert_ne!(
            w1.final_model().serialize(),
            c.final_model().serialize()
        );
    }

    #[test]
    fn checkpoint_metrics_perfect_and_degenerate() {
        let data = projected_corpus(&["A0", "A0", "A0", "A0"], false, 3);
        let run = bootstrap(
            &data,
            &BootstrapConfig {
                rounds: 0,
                epochs_per_round: 5,
                ..Default::default()
            },
        )
        .unwrap();
        // The training sentences themselves: every decision was seen.
        let report = checkpoint_metrics(
            run.final_model(),
            data.sentences(),
            &RoleBlacklist::default(),
        )
        .unwrap();
        assert_relative_eq!(report.overall.f1, 1.0);

        // A dev set with no predicted output: an untrained rejector plus
        // frames stripped of arguments.
        let bare: Vec<Sentence> = data
            .sentences()
            .iter()
            .map(|s| {
                let frames = s
                    .frames()
                    .iter()
                    .map(|f| PredicateFrame::new(f.predicate_index, f.sense.clone()))
                    .collect();
                s.with_frames(frames, Provenance::Gold).unwrap()
            })
            .collect();
        let gold = data.sentences();
        let empty_pred = crate::eval::score(gold, &bare, true, &RoleBlacklist::default()).unwrap();
        assert_eq!(empty_pred.overall.recall, 0.0);
        assert_eq!(empty_pred.overall.precision, 0.0);
    }

    #[test]
    fn checkpoint_metrics_hand_counted_dev_errors() {
        // Train until the mapping subj->A0, obj->A1 is exact, then plant
        // two wrong gold labels in a copy of three sentences: scoring the
        // model against that dev set yields hand-computable counts.
        let data = projected_corpus(&["A0", "A0", "A0", "A0"], false, 3);
        let run = bootstrap(
            &data,
            &BootstrapConfig {
                rounds: 0,
                epochs_per_round: 8,
                ..Default::default()
            },
        )
        .unwrap();
        let mut dev: Vec<Sentence> = data.sentences()[..3].to_vec();
        // Plant gold errors: sentence 0 subject labeled A1 in gold,
        // sentence 1 object dropped from gold.
        let f0 = vec![PredicateFrame::new(2, "verb0.01")
            .with_arg(1, "A1")
            .with_arg(3, "A1")];
        dev[0] = dev[0].with_frames(f0, Provenance::Gold).unwrap();
        let f1 = vec![PredicateFrame::new(2, "verb1.01").with_arg(1, "A0")];
        dev[1] = dev[1].with_frames(f1, Provenance::Gold).unwrap();

        let report =
            checkpoint_metrics(run.final_model(), &dev, &RoleBlacklist::default()).unwrap();
        // Predictions per sentence: subj=A0, obj=A1 (6 predictions).
        // Gold: s0 {A1 subj, A1 obj}, s1 {A0 subj}, s2 {A0 subj, A1 obj}.
        // TP = 4 (s1 subj, s2 subj, s0 obj, s2 obj), FP = 2, FN = 1.
        assert_eq!(report.counts.true_positives, 4);
        assert_eq!(report.counts.false_positives, 2);
        assert_eq!(report.counts.false_negatives, 1);
        assert_relative_eq!(report.overall.precision, 4.0 / 6.0);
        assert_relative_eq!(report.overall.recall, 4.0 / 5.0);
    }

    #[test]
    fn round_csv_has_expected_schema() {
        let data = projected_corpus(&["A0", "A0"], false, 3);
        let run = bootstrap(
            &data,
            &BootstrapConfig {
                rounds: 1,
                epochs_per_round: 2,
                ..Default::default()
            },
        )
        .unwrap();
        let reports: Vec<EvalReport> = run
            .checkpoints
            .iter()
            .map(|b| checkpoint_metrics(b, data.sentences(), &RoleBlacklist::default()).unwrap())
            .collect();
        let csv = round_metrics_csv(&reports);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "round,stage,scope,precision,recall,f1");
        assert!(lines.next().unwrap().starts_with("0,arguments,overall,"));
    }
}
