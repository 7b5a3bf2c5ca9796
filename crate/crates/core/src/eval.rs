//! Labeled scoring of predicted frames against gold frames, with
//! per-semantic-dependency breakdowns and plot-ready CSV emission.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::conll::Sentence;
use crate::error::{Error, Result};
use crate::project::RoleBlacklist;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    /// Precision with zero predictions (and recall with zero gold) is 0
    /// by convention; F1 is 0 when P + R is 0.
    fn from_counts(counts: &Counts) -> Prf {
        let tp = counts.true_positives as f64;
        let precision = if counts.true_positives + counts.false_positives > 0 {
            tp / (counts.true_positives + counts.false_positives) as f64
        } else {
            0.0
        };
        let recall = if counts.true_positives + counts.false_negatives > 0 {
            tp / (counts.true_positives + counts.false_negatives) as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
             2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

/// Scores for one (predicate POS, role) dependency key.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DependencyScore {
    pub prf: Prf,
    pub counts: Counts,
    /// Number of gold dependencies under this key.
    pub support: usize,
}

/// Labeled precision/recall/F1 overall and per (predicate POS, role).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub overall: Prf,
    pub counts: Counts,
    pub per_dependency: BTreeMap<(String, String), DependencyScore>,
}

/// Score predicted sentences against gold. Sentences align by position
/// and must pair up in length. A predicted argument is correct exactly
/// when gold contains the identical (predicate, token, role) triple.
/// With `gold_predicate_mode` set, predicate senses stay out of the
/// scoring; otherwise each (predicate, sense) decision is scored as a
/// dependency of its own under the role key "SENSE". Blacklisted roles
/// are invisible on both sides.
pub fn score(
    gold: &[Sentence],
    pred: &[Sentence],
    gold_predicate_mode: bool,
    blacklist: &RoleBlacklist,
) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::Data(format!(
            "gold has {} sentences, predictions have {}",
            gold.len(),
            pred.len()
        )));
    }

    let mut counts = Counts::default();
    let mut per_dep: BTreeMap<(String, String), DependencyScore> = BTreeMap::new();

    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(Error::Data(format!(
                "sentence {}: gold has {} tokens, prediction has {}",
                i,
                g.len(),
                p.len()
            )));
        }
        let gold_triples = triples(g, gold_predicate_mode, blacklist);
        let pred_triples = triples(p, gold_predicate_mode, blacklist);

        for triple in pred_triples.iter() {
            let key = dependency_key(g, triple);
            let entry = per_dep.entry(key).or_default();
            if gold_triples.contains(triple) {
                counts.true_positives += 1;
                entry.counts.true_positives += 1;
            } else {
                counts.false_positives += 1;
                entry.counts.false_positives += 1;
            }
        }
        for triple in gold_triples.iter() {
            if !pred_triples.contains(triple) {
                counts.false_negatives += 1;
                let key = dependency_key(g, triple);
                per_dep.entry(key).or_default().counts.false_negatives += 1;
            }
        }
    }

    for entry in per_dep.values_mut() {
        entry.prf = Prf::from_counts(&entry.counts);
        entry.support = entry.counts.true_positives + entry.counts.false_negatives;
    }

    Ok(EvalReport {
        overall: Prf::from_counts(&counts),
        counts,
        per_dependency: per_dep,
    })
}

/// Scored items of one sentence: (predicate index, token index, label).
/// Sense decisions appear as (p, p, "SENSE:<sense>") when senses are in
/// scope.
fn triples(
    sentence: &Sentence,
    gold_predicate_mode: bool,
    blacklist: &RoleBlacklist,
) -> BTreeSet<(usize, usize, String)> {
    let mut set = BTreeSet::new();
    for frame in sentence.frames() {
        if !gold_predicate_mode {
            set.insert((
                frame.predicate_index,
                frame.predicate_index,
                format!("SENSE:{}", frame.sense),
            ));
        }
        for (&token, role) in &frame.args {
            if blacklist.is_blocked(role) {
                continue;
            }
            set.insert((frame.predicate_index, token, role.clone()));
        }
    }
    set
}

fn dependency_key(gold: &Sentence, triple: &(usize, usize, String)) -> (String, String) {
    let pos = gold.token(triple.0).pos.clone();
    let role = match triple.2.strip_prefix("SENSE:") {
        Some(_) => "SENSE".to_string(),
        None => triple.2.clone(),
    };
    (pos, role)
}

/// Plot-ready CSV over bootstrap rounds: one row per (round, key), with
/// all-zero rows for keys a report does not cover.
pub fn emit_iteration_curves(reports: &[EvalReport], keys: &[(String, String)]) -> String {
    let mut out = String::from("round,pos,role,precision,recall,f1\n");
    for (round, report) in reports.iter().enumerate() {
        for key in keys {
            let dep = report.per_dependency.get(key).copied().unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                round, key.0, key.1, dep.prf.precision, dep.prf.recall, dep.prf.f1
            ));
        }
    }
    out
}

/// Human-readable report.
pub fn render_text_report(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "labeled precision {:.4} recall {:.4} f1 {:.4} (tp {} fp {} fn {})\n",
        report.overall.precision,
        report.overall.recall,
        report.overall.f1,
        report.counts.true_positives,
        report.counts.false_positives,
        report.counts.false_negatives
    ));
    for ((pos, role), dep) in &report.per_dependency {
        out.push_str(&format!(
            "{}+{}: precision {:.4} recall {:.4} f1 {:.4} support {}\n",
            pos, role, dep.prf.precision, dep.prf.recall, dep.prf.f1, dep.support
        ));
    }
    out
}

/// Machine-readable report: overall row plus one row per dependency key.
pub fn report_csv(report: &EvalReport) -> String {
    let mut out = String::from("scope,precision,recall,f1,support\n");
    out.push_str(&format!(
        "overall,{},{},{},{}\n",
        report.overall.precision,
        report.overall.recall,
        report.overall.f1,
        report.counts.true_positives + report.counts.false_negatives
    ));
    for ((pos, role), dep) in &report.per_dependency {
        out.push_str(&format!(
            "{}+{},{},{},{},{}\n",
            pos, role, dep.prf.precision, dep.prf.recall, dep.prf.f1, dep.support
        ));
    }
    out
}
