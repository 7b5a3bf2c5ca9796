//! Deterministic feature extraction for the pipeline stages.
//!
//! Features are binary indicators named "template=value"; the vector
//! stores 64-bit FNV-1a hashes of those strings. Identical inputs always
//! produce identical vectors.

use crate::conll::Sentence;
use crate::error::{Error, Result};

/// Pipeline stages, in running order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    PredicateId,
    PredicateSense,
    ArgumentId,
    ArgumentLabel,
}

impl Stage {
    pub const ALL: [Stage; 4] = [
        Stage::PredicateId,
        Stage::PredicateSense,
        Stage::ArgumentId,
        Stage::ArgumentLabel,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::PredicateId => "predicate_id",
            Stage::PredicateSense => "predicate_sense",
            Stage::ArgumentId => "argument_id",
            Stage::ArgumentLabel => "argument_label",
        }
    }

    pub fn from_name(name: &str) -> Result<Stage> {
        match name {
            "predicate_id" => Ok(Stage::PredicateId),
            "predicate_sense" => Ok(Stage::PredicateSense),
            "argument_id" => Ok(Stage::ArgumentId),
            "argument_label" => Ok(Stage::ArgumentLabel),
            other => Err(Error::ModelFormat(format!("unknown stage '{}'", other))),
        }
    }

    fn is_argument_stage(&self) -> bool {
        matches!(self, Stage::ArgumentId | Stage::ArgumentLabel)
    }
}

/// 64-bit FNV-1a hash of a feature string.
pub fn feature_id(feature: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in feature.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    }
    hash
}

/// Sparse binary feature vector: sorted, deduplicated (id, value) pairs
/// with no zero entries. Values are 1.0 for the indicator templates in
/// use.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<(u64, f64)>);

impl FeatureVector {
    pub fn from_strings<I, S>(features: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut entries: Vec<(u64, f64)> = features
            .into_iter()
            .map(|f| (feature_id(f.as_ref()), 1.0))
            .collect();
        entries.sort_unstable_by_key(|&(id, _)| id);
        entries.dedup_by_key(|&mut (id, _)| id);
        FeatureVector(entries)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, feature: &str) -> bool {
        let id = feature_id(feature);
        self.0.binary_search_by_key(&id, |&(i, _)| i).is_ok()
    }
}

/// Extract the feature vector for one classification decision. For the
/// predicate stages `token_index` must equal `predicate_index`.
pub fn extract_features(
    sentence: &Sentence,
    stage: Stage,
    token_index: usize,
    predicate_index: usize,
) -> Result<FeatureVector> {
    let n = sentence.len();
    if token_index == 0 || token_index > n || predicate_index == 0 || predicate_index > n {
        return Err(Error::InvalidArgument(format!(
            "token {} / predicate {} out of range for a {}-token sentence",
            token_index, predicate_index, n
        )));
    }
    if !stage.is_argument_stage() && token_index != predicate_index {
        return Err(Error::InvalidArgument(
            "predicate stages take the predicate token itself".to_string(),
        ));
    }

    let pred = sentence.token(predicate_index);
    let mut feats: Vec<String> = vec![
        format!("pred-lemma={}", pred.lemma),
        format!("pred-pos={}", pred.pos),
        format!("pred-deprel={}", pred.deprel),
    ];

    if stage == Stage::PredicateSense {
        let mut dep_bag: Vec<&str> = sentence
            .tokens()
            .iter()
            .filter(|t| t.head == predicate_index)
            .map(|t| t.deprel.as_str())
            .collect();
        dep_bag.sort_unstable();
        dep_bag.dedup();
        for rel in dep_bag {
            feats.push(format!("pred-dep-bag={}", rel));
        }
    }

    if stage.is_argument_stage() {
        let arg = sentence.token(token_index);
        feats.push(format!("arg-form={}", arg.form));
        feats.push(format!("arg-lemma={}", arg.lemma));
        feats.push(format!("arg-pos={}", arg.pos));
        feats.push(format!("arg-deprel={}", arg.deprel));

        let distance = token_index.abs_diff(predicate_index);
        feats.push(format!("dist={}", distance));
        feats.push(format!(
            "dir={}",
            if token_index < predicate_index {
                "left"
            } else if token_index > predicate_index {
                "right"
            } else {
                "self"
            }
        ));

        let head_pos = if arg.head == 0 {
            "ROOT"
        } else {
            sentence.token(arg.head).pos.as_str()
        };
        feats.push(format!("head-pos={}", head_pos));

        let path = deprel_path(sentence, token_index, predicate_index);
        feats.push(format!("path={}", path));

        let (lo, hi) = (
            token_index.min(predicate_index),
            token_index.max(predicate_index),
        );
        if hi - lo > 1 {
            feats.push(format!("between-first={}", sentence.token(lo + 1).pos));
            feats.push(format!("between-last={}", sentence.token(hi - 1).pos));
        } else {
            feats.push("between-first=none".to_string());
            feats.push("between-last=none".to_string());
        }

        feats.push(format!("pred-lemma|arg-deprel={}|{}", pred.lemma, arg.deprel));
        feats.push(format!("pred-pos|path={}|{}", pred.pos, path));
    }

    Ok(FeatureVector::from_strings(feats))
}

const MAX_PATH_STEPS: usize = 8;

/// Dependency path from the argument up to the lowest common ancestor
/// and down to the predicate: each climbed edge contributes "rel^", each
/// descended edge "rel v" (rendered with arrows). Paths longer than
/// [`MAX_PATH_STEPS`] collapse to "!long".
fn deprel_path(sentence: &Sentence, arg: usize, pred: usize) -> String {
    let chain = |start: usize| {
        let mut nodes = vec![start];
        let mut cur = start;
        while sentence.token(cur).head != 0 {
            cur = sentence.token(cur).head;
            nodes.push(cur);
        }
        nodes
    };
    let arg_chain = chain(arg);
    let pred_chain = chain(pred);
    let lca = *arg_chain
        .iter()
        .find(|node| pred_chain.contains(node))
        .expect("a single-rooted tree always has a common ancestor");

    let mut up = Vec::new();
    for &node in &arg_chain {
        if node == lca {
            break;
        }
        up.push(format!("{}↑", sentence.token(node).deprel));
    }
    let mut down = Vec::new();
    for &node in &pred_chain {
        if node == lca {
            break;
        }
        down.push(format!("{}↓", sentence.token(node).deprel));
    }
    down.reverse();

    if up.len() + down.len() > MAX_PATH_STEPS {
        return "!long".to_string();
    }
    let mut path = up.concat();
    path.push_str(&down.concat());
    path
}
