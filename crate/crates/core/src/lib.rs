//! Cross-lingual semantic role projection and training.
//!
//! The crate covers the full workflow: reading CoNLL-2009 corpora and
//! Pharaoh word alignments, intersecting alignment directions, filtering
//! sentence pairs by projection density, transferring predicate senses
//! and argument roles across the surviving links, attaching per-instance
//! quality costs, training a staged averaged-perceptron SRL classifier
//! on the partial projections (optionally cost-weighted), self-training
//! over the unlabeled remainder and scoring the result.

pub mod align;
pub mod bootstrap;
pub mod conll;
pub mod error;
pub mod eval;
pub mod features;
pub mod model;
pub mod pipeline;
pub mod project;
pub mod synth;

pub use align::{intersect, parse_alignments, write_alignments, AlignmentSet, SentencePair};
pub use bootstrap::{
    bootstrap, checkpoint_metrics, round_metrics_csv, BootstrapConfig, BootstrapRun,
    PartitionedData, Variant,
};
pub use conll::{parse_conll, write_conll, PredicateFrame, Provenance, Sentence, Token};
pub use error::{Error, Result};
pub use eval::{emit_iteration_curves, render_text_report, report_csv, score, EvalReport};
pub use features::{extract_features, FeatureVector, Stage};
pub use model::{train_stage, LinearModel, TrainingInstance};
pub use pipeline::{run_pipeline, train_supervised, ModelBundle, PredicateSource};
pub use project::{
    assign_costs, completeness_cost, dep_match_cost, filter_by_density, parse_cost_sidecar,
    project_corpus, project_pair, projection_density, write_cost_sidecar, CostMode, CostVector,
    DensityScore, ProjectedInstance, Projection, RoleBlacklist,
};
pub use synth::{generate, SynthConfig, SynthCorpus};
