//! Annotation projection across intersected word alignments: density
//! scoring, corpus filtering, frame transfer and per-instance quality
//! costs.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::align::SentencePair;
use crate::conll::{PredicateFrame, Provenance, Sentence};
use crate::error::{Error, Result};

/// Per-pair projection density: (p' * f) / (p * w) where w is the target
/// length, f the number of target tokens with at least one link, p the
/// number of source predicates and p' the number of those whose token is
/// aligned. Defined as 0 when p or w is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityScore {
    pub value: f64,
    pub aligned_words: usize,
    pub total_words: usize,
    pub projected_predicates: usize,
    pub source_predicates: usize,
}

pub fn projection_density(pair: &SentencePair) -> DensityScore {
    let w = pair.target.len();
    let f = pair.alignment.aligned_targets().len();
    let p = pair.source.frames().len();
    let p_prime = pair
        .source
        .frames()
        .iter()
        .filter(|frame| pair.alignment.target_of(frame.predicate_index).is_some())
        .count();
    let value = if p == 0 || w == 0 {
        0.0
    } else {
        (p_prime * f) as f64 / (p * w) as f64
    };
    DensityScore {
        value,
        aligned_words: f,
        total_words: w,
        projected_predicates: p_prime,
        source_predicates: p,
    }
}

/// Keep exactly the pairs whose density is at least `threshold`,
/// preserving input order.
pub fn filter_by_density(
    pairs: Vec<SentencePair>,
    threshold: f64,
) -> Result<Vec<SentencePair>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidArgument(format!(
            "density threshold {} outside [0, 1]",
            threshold
        )));
    }
    Ok(pairs
        .into_iter()
        .filter(|pair| projection_density(pair).value >= threshold)
        .collect())
}

/// Quality cost components attached to one projected instance. The
/// combined value is always the arithmetic mean of the two parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostVector {
    comp: f64,
    dep: f64,
    combined: f64,
}

impl CostVector {
    pub fn new(comp: f64, dep: f64) -> Self {
        CostVector {
            comp,
            dep,
            combined: (comp + dep) / 2.0,
        }
    }

    pub fn comp(&self) -> f64 {
        self.comp
    }

    pub fn dep(&self) -> f64 {
        self.dep
    }

    pub fn combined(&self) -> f64 {
        self.combined
    }
}

/// Which cost a training run consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostMode {
    Uniform,
    Comp,
    Dep,
    CompDep,
}

impl CostMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CostMode::Uniform => "uniform",
            CostMode::Comp => "comp",
            CostMode::Dep => "dep",
            CostMode::CompDep => "comp+dep",
        }
    }

    /// The training weight a cost vector yields under this mode.
    pub fn apply(&self, cost: &CostVector) -> f64 {
        match self {
            CostMode::Uniform => 1.0,
            CostMode::Comp => cost.comp(),
            CostMode::Dep => cost.dep(),
            CostMode::CompDep => cost.combined(),
        }
    }
}

impl std::str::FromStr for CostMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(CostMode::Uniform),
            "comp" => Ok(CostMode::Comp),
            "dep" => Ok(CostMode::Dep),
            "comp+dep" | "comp_dep" => Ok(CostMode::CompDep),
            other => Err(Error::InvalidArgument(format!(
                "unknown cost mode '{}'",
                other
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Predicate,
    Argument,
}

impl InstanceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InstanceKind::Predicate => "predicate",
            InstanceKind::Argument => "argument",
        }
    }
}

/// One projected predicate or argument together with the link it came
/// through and its quality costs.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedInstance {
    pub sentence_id: usize,
    pub token_index: usize,
    pub kind: InstanceKind,
    /// Role label for arguments, sense string for predicates.
    pub label: String,
    pub source_token_index: usize,
    pub source_deprel: String,
    pub target_deprel: String,
    pub cost: CostVector,
}

/// An aligned target token whose source counterpart carries no role in
/// the source frame: projection evidence that the token is not an
/// argument of that frame.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeEvidence {
    pub sentence_id: usize,
    /// Target predicate position of the frame this evidence belongs to.
    pub predicate_index: usize,
    pub token_index: usize,
    pub source_token_index: usize,
    pub source_deprel: String,
    pub target_deprel: String,
    pub cost: CostVector,
}

/// Two source tokens of one frame landing on the same target token; the
/// lower source index wins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionDiag {
    pub sentence_id: usize,
    pub target_token: usize,
    pub kept_source: usize,
    pub dropped_source: usize,
    pub kept_label: String,
    pub dropped_label: String,
}

/// Role labels excluded from projection (and, symmetrically, from
/// scoring). With `match_prefixes` set, "X" also blocks "X-..." labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoleBlacklist {
    exact: Vec<String>,
    match_prefixes: bool,
}

impl RoleBlacklist {
    pub fn new<I: IntoIterator<Item = String>>(roles: I, match_prefixes: bool) -> Self {
        let mut exact: Vec<String> = roles.into_iter().collect();
        exact.sort();
        exact.dedup();
        RoleBlacklist {
            exact,
            match_prefixes,
        }
    }

    /// The modifier-role blacklist: "AM" plus all "AM-*" labels.
    pub fn modifiers() -> Self {
        RoleBlacklist::new(["AM".to_string()], true)
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty()
    }

    pub fn is_blocked(&self, role: &str) -> bool {
        self.exact.iter().any(|entry| {
            role == entry
                || (self.match_prefixes
                    && role.len() > entry.len() + 1
                    && role.starts_with(entry)
                    && role.as_bytes()[entry.len()] == b'-')
        })
    }
}

/// Everything one pair projects: the partially annotated target
/// sentence, the positive instances, the alignment-grounded negative
/// evidence and any collision diagnostics.
#[derive(Debug, Clone)]
pub struct Projection {
    pub sentence: Sentence,
    pub instances: Vec<ProjectedInstance>,
    pub negatives: Vec<NegativeEvidence>,
    pub collisions: Vec<CollisionDiag>,
}

/// Match cost between a source and a target dependency relation: 1.0 on
/// an exact label match, 0.5 otherwise.
pub fn deprel_match(source_deprel: &str, target_deprel: &str) -> f64 {
    if source_deprel == target_deprel {
        1.0
    } else {
        0.5
    }
}

/// Dependency-match cost of a projected instance.
pub fn dep_match_cost(instance: &ProjectedInstance) -> f64 {
    deprel_match(&instance.source_deprel, &instance.target_deprel)
}

/// Proportion of verbs and direct dependents of verbs that carry a
/// projected sense or role; 1.0 when the sentence has no such tokens.
pub fn completeness_cost(target: &Sentence) -> f64 {
    let mut scope = Vec::new();
    for token in target.tokens() {
        let is_verb = token.pos == "VERB";
        let verb_dependent = token.head != 0 && target.token(token.head).pos == "VERB";
        if is_verb || verb_dependent {
            scope.push(token.index);
        }
    }
    if scope.is_empty() {
        return 1.0;
    }
    let labeled = scope
        .iter()
        .filter(|&&idx| target.is_labeled(idx))
        .count();
    labeled as f64 / scope.len() as f64
}

/// Project one filtered pair. Every source frame whose predicate token
/// is aligned yields a target frame at the aligned token carrying the
/// source sense verbatim; aligned, non-blacklisted arguments follow.
/// Unaligned material stays unlabeled (partial annotation).
pub fn project_pair(
    pair: &SentencePair,
    sentence_id: usize,
    blacklist: &RoleBlacklist,
) -> Result<Projection> {
    struct Planned {
        frame: PredicateFrame,
        source_predicate: usize,
        // target arg token -> source arg token
        arg_sources: BTreeMap<usize, usize>,
    }

    let mut planned: Vec<Planned> = Vec::new();
    let mut collisions = Vec::new();

    for sframe in pair.source.frames() {
        let Some(target_pred) = pair.alignment.target_of(sframe.predicate_index) else {
            continue;
        };
        if let Some(prev) = planned
            .iter()
            .find(|p| p.frame.predicate_index == target_pred)
        {
            // Frame collision on a shared target token; source frames are
            // sorted, so the earlier (lower) source predicate stays.
            collisions.push(CollisionDiag {
                sentence_id,
                target_token: target_pred,
                kept_source: prev.source_predicate,
                dropped_source: sframe.predicate_index,
                kept_label: prev.frame.sense.clone(),
                dropped_label: sframe.sense.clone(),
            });
            continue;
        }
        let mut frame = PredicateFrame::new(target_pred, sframe.sense.clone());
        let mut arg_sources = BTreeMap::new();
        for (&source_arg, role) in &sframe.args {
            if blacklist.is_blocked(role) {
                continue;
            }
            let Some(target_arg) = pair.alignment.target_of(source_arg) else {
                continue;
            };
            if let Some(&kept_source) = arg_sources.get(&target_arg) {
                // args iterate in ascending source order: first wins.
                collisions.push(CollisionDiag {
                    sentence_id,
                    target_token: target_arg,
                    kept_source,
                    dropped_source: source_arg,
                    kept_label: frame.args[&target_arg].clone(),
                    dropped_label: role.clone(),
                });
                continue;
            }
            frame.args.insert(target_arg, role.clone());
            arg_sources.insert(target_arg, source_arg);
        }
        planned.push(Planned {
            frame,
            source_predicate: sframe.predicate_index,
            arg_sources,
        });
    }

    planned.sort_by_key(|p| p.frame.predicate_index);
    let frames: Vec<PredicateFrame> = planned.iter().map(|p| p.frame.clone()).collect();
    let sentence = pair.target.with_frames(frames, Provenance::Projected)?;
    let comp = completeness_cost(&sentence);

    let mut instances = Vec::new();
    let mut negatives = Vec::new();
    for plan in &planned {
        let target_pred = plan.frame.predicate_index;
        instances.push(ProjectedInstance {
            sentence_id,
            token_index: target_pred,
            kind: InstanceKind::Predicate,
            label: plan.frame.sense.clone(),
            source_token_index: plan.source_predicate,
            source_deprel: pair.source.token(plan.source_predicate).deprel.clone(),
            target_deprel: pair.target.token(target_pred).deprel.clone(),
            // The relation-match cost is defined for arguments; predicate
            // instances carry the neutral value.
            cost: CostVector::new(comp, 1.0),
        });
        for (&target_arg, &source_arg) in &plan.arg_sources {
            let source_deprel = pair.source.token(source_arg).deprel.clone();
            let target_deprel = pair.target.token(target_arg).deprel.clone();
            let dep = deprel_match(&source_deprel, &target_deprel);
            instances.push(ProjectedInstance {
                sentence_id,
                token_index: target_arg,
                kind: InstanceKind::Argument,
                label: plan.frame.args[&target_arg].clone(),
                source_token_index: source_arg,
                source_deprel,
                target_deprel,
                cost: CostVector::new(comp, dep),
            });
        }
        // Aligned target tokens the source frame assigns no role: negative
        // evidence for this frame. Tokens whose source role was
        // blacklisted make no claim either way and are skipped.
        let source_frame = pair
            .source
            .frames()
            .iter()
            .find(|f| f.predicate_index == plan.source_predicate)
            .expect("planned frame comes from a source frame");
        for target_token in 1..=pair.target.len() {
            if target_token == target_pred || plan.frame.args.contains_key(&target_token) {
                continue;
            }
            let Some(source_token) = pair.alignment.source_of(target_token) else {
                continue;
            };
            if let Some(role) = source_frame.args.get(&source_token) {
                if blacklist.is_blocked(role) {
                    continue;
                }
                // The source token carries a role but its projection went
                // elsewhere (collision or multi-link); make no claim.
                continue;
            }
            let source_deprel = pair.source.token(source_token).deprel.clone();
            let target_deprel = pair.target.token(target_token).deprel.clone();
            let dep = deprel_match(&source_deprel, &target_deprel);
            negatives.push(NegativeEvidence {
                sentence_id,
                predicate_index: target_pred,
                token_index: target_token,
                source_token_index: source_token,
                source_deprel,
                target_deprel,
                cost: CostVector::new(comp, dep),
            });
        }
    }

    Ok(Projection {
        sentence,
        instances,
        negatives,
        collisions,
    })
}

/// Project a whole corpus; pairs are processed in parallel and results
/// come back in input order.
pub fn project_corpus(
    pairs: &[SentencePair],
    blacklist: &RoleBlacklist,
) -> Result<Vec<Projection>> {
    pairs
        .par_iter()
        .enumerate()
        .map(|(id, pair)| project_pair(pair, id, blacklist))
        .collect()
}

/// The training weight of each instance under the given mode.
pub fn assign_costs(instances: &[ProjectedInstance], mode: CostMode) -> Vec<f64> {
    instances
        .iter()
        .map(|inst| mode.apply(&inst.cost))
        .collect()
}

/// One row of the per-instance cost sidecar. Rows with a label carry
/// projected predicates and arguments; rows with label "_" carry the
/// alignment-grounded not-an-argument evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct CostRow {
    pub sentence_id: usize,
    pub token_index: usize,
    pub kind: InstanceKind,
    pub label: Option<String>,
    pub comp: f64,
    pub dep: f64,
    pub combined: f64,
}

/// Serialize the cost sidecar: TSV with columns (sentence_id,
/// token_index, kind, label, comp, dep, combined), one row per projected
/// instance followed by the negative-evidence rows of each sentence.
pub fn write_cost_sidecar(projections: &[Projection]) -> String {
    let mut out = String::from("# sentence_id\ttoken_index\tkind\tlabel\tcomp\tdep\tcombined\n");
    for projection in projections {
        for inst in &projection.instances {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                inst.sentence_id,
                inst.token_index,
                inst.kind.as_str(),
                inst.label,
                inst.cost.comp(),
                inst.cost.dep(),
                inst.cost.combined()
            ));
        }
        for neg in &projection.negatives {
            out.push_str(&format!(
                "{}\t{}\t{}\t_\t{}\t{}\t{}\n",
                neg.sentence_id,
                neg.token_index,
                InstanceKind::Argument.as_str(),
                neg.cost.comp(),
                neg.cost.dep(),
                neg.cost.combined()
            ));
        }
    }
    out
}

pub fn parse_cost_sidecar(text: &str) -> Result<Vec<CostRow>> {
    let mut rows = Vec::new();
    for (lineno0, raw) in text.lines().enumerate() {
        let lineno = lineno0 + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 7 {
            return Err(Error::parse(
                lineno,
                format!("expected 7 columns, found {}", cols.len()),
            ));
        }
        let number = |i: usize| -> Result<f64> {
            cols[i]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("non-numeric value '{}'", cols[i])))
        };
        let kind = match cols[2] {
            "predicate" => InstanceKind::Predicate,
            "argument" => InstanceKind::Argument,
            other => {
                return Err(Error::parse(lineno, format!("unknown kind '{}'", other)));
            }
        };
        rows.push(CostRow {
            sentence_id: cols[0]
                .parse()
                .map_err(|_| Error::parse(lineno, "non-numeric sentence id"))?,
            token_index: cols[1]
                .parse()
                .map_err(|_| Error::parse(lineno, "non-numeric token index"))?,
            kind,
            label: if cols[3] == "_" {
                None
            } else {
                Some(cols[3].to_string())
            },
            comp: number(4)?,
            dep: number(5)?,
            combined: number(6)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::AlignmentSet;
    use crate::conll::Token;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

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

    fn chain_sentence(n: usize, frames: Vec<PredicateFrame>) -> Sentence {
        // Token 1 is the root; each later token attaches to the previous.
        let tokens = (1..=n)
            .map(|i| token(i, &format!("w{}", i), "NOUN", i - 1, "dep"))
            .collect();
        Sentence::new(tokens, frames, Provenance::Gold).unwrap()
    }

    /// English source, German target and the four intersected links of
    /// the running example pair.
    fn english_german_pair() -> SentencePair {
        let english = Sentence::new(
            vec![
                token(1, "I", "PRON", 3, "nsubj"),
                token(2, "would", "VERB", 3, "aux"),
                token(3, "urge", "VERB", 0, "root"),
                token(4, "you", "PRON", 6, "nsubj"),
                token(5, "to", "PRT", 6, "aux"),
                token(6, "endorse", "VERB", 3, "xcomp"),
                token(7, "this", "DET", 6, "dobj"),
            ],
            vec![
                PredicateFrame::new(3, "urge.01")
                    .with_arg(1, "A0")
                    .with_arg(4, "A1")
                    .with_arg(6, "A2"),
                PredicateFrame::new(6, "endorse.01")
                    .with_arg(4, "A0")
                    .with_arg(7, "A1"),
            ],
            Provenance::Gold,
        )
        .unwrap();
        let german = Sentence::new(
            vec![
                token(1, "Ich", "PRON", 2, "nsubj"),
                token(2, "bitte", "VERB", 0, "root"),
                token(3, "Sie", "PRON", 2, "dobj"),
                token(4, "um", "ADP", 2, "adpmod"),
                token(5, "Zustimmung", "NOUN", 4, "adpobj"),
            ],
            vec![],
            Provenance::Gold,
        )
        .unwrap();
        let alignment = AlignmentSet::from_links([(1, 1), (3, 2), (4, 3), (6, 5)]);
        SentencePair::new(english, german, alignment).unwrap()
    }

    #[test]
    fn density_direct_evaluation() {
        // w=10, f=8, p=2, p'=1 -> 0.4. Source: predicates at 1 and 2, only
        // token 1 aligned; eight distinct target tokens aligned.
        let source = chain_sentence(
            3,
            vec![
                PredicateFrame::new(1, "a.01"),
                PredicateFrame::new(2, "b.01"),
            ],
        );
        let target = chain_sentence(10, vec![]);
        let links = (1..=8).map(|t| (1usize, t)).collect::<Vec<_>>();
        let pair =
            SentencePair::new(source, target, AlignmentSet::from_links(links)).unwrap();
        let d = projection_density(&pair);
        assert_eq!(d.aligned_words, 8);
        assert_eq!(d.total_words, 10);
        assert_eq!(d.source_predicates, 2);
        assert_eq!(d.projected_predicates, 1);
        assert_relative_eq!(d.value, 0.4);
    }

    #[test]
    fn density_maximal_case() {
        let source = chain_sentence(4, vec![PredicateFrame::new(2, "x.01")]);
        let target = chain_sentence(4, vec![]);
        let links = (1..=4).map(|i| (i, i)).collect::<Vec<_>>();
        let pair =
            SentencePair::new(source, target, AlignmentSet::from_links(links)).unwrap();
        assert_relative_eq!(projection_density(&pair).value, 1.0);
    }

    #[test]
    fn density_degenerate_cases() {
        let no_pred = SentencePair::new(
            chain_sentence(3, vec![]),
            chain_sentence(3, vec![]),
            AlignmentSet::from_links([(1, 1)]),
        )
        .unwrap();
        assert_eq!(projection_density(&no_pred).value, 0.0);

        let empty_target = SentencePair::new(
            chain_sentence(2, vec![PredicateFrame::new(1, "x.01")]),
            Sentence::new(vec![], vec![], Provenance::Gold).unwrap(),
            AlignmentSet::new(),
        )
        .unwrap();
        assert_eq!(projection_density(&empty_target).value, 0.0);
    }

    #[test]
    fn density_of_example_pair() {
        // Four aligned target tokens out of five, both predicates aligned:
        // (2*4)/(2*5) = 0.8.
        let d = projection_density(&english_german_pair());
        assert_relative_eq!(d.value, 0.8);
    }

    #[test]
    fn filter_threshold_zero_is_identity() {
        let pairs = vec![english_german_pair(), english_german_pair()];
        let kept = filter_by_density(pairs.clone(), 0.0).unwrap();
        assert_eq!(kept, pairs);
    }

    #[test]
    fn filter_threshold_one_drops_sparse_corpus() {
        let pairs = vec![english_german_pair()];
        assert!(filter_by_density(pairs, 1.0).unwrap().is_empty());
    }

    #[test]
    fn filter_rejects_out_of_range_threshold() {
        assert!(filter_by_density(vec![], 1.01).is_err());
        assert!(filter_by_density(vec![], -0.1).is_err());
        assert!(filter_by_density(vec![], f64::NAN).is_err());
    }

    fn random_pair(rng: &mut ChaCha8Rng) -> SentencePair {
        let src_len = rng.random_range(1..10);
        let tgt_len = rng.random_range(0..10usize);
        let n_preds = rng.random_range(0..=src_len.min(3));
        let mut pred_positions: Vec<usize> = (1..=src_len).collect();
        pred_positions.shuffle(rng);
        let frames = pred_positions[..n_preds]
            .iter()
            .map(|&i| PredicateFrame::new(i, format!("p{}.01", i)))
            .collect();
        let source = chain_sentence(src_len, frames);
        let target = chain_sentence(tgt_len, vec![]);
        let mut alignment = AlignmentSet::new();
        if tgt_len > 0 {
            for s in 1..=src_len {
                if rng.random_bool(0.6) {
                    alignment.insert(s, rng.random_range(1..=tgt_len));
                }
            }
        }
        SentencePair::new(source, target, alignment).unwrap()
    }

    #[test]
    fn filter_matches_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pairs: Vec<SentencePair> = (0..1000).map(|_| random_pair(&mut rng)).collect();
        let kept = filter_by_density(pairs.clone(), 0.4).unwrap();
        // Independent recomputation straight from the definition.
        let expected: Vec<SentencePair> = pairs
            .into_iter()
            .filter(|pair| {
                let w = pair.target.len();
                let f = pair.alignment.aligned_targets().len();
                let p = pair.source.frames().len();
                let p_prime = pair
                    .source
                    .frames()
                    .iter()
                    .filter(|fr| {
                        pair.alignment
                            .iter()
                            .any(|(s, _)| s == fr.predicate_index)
                    })
                    .count();
                if p == 0 || w == 0 {
                    false
                } else {
                    (p_prime * f) as f64 / (p * w) as f64 >= 0.4
                }
            })
            .collect();
        assert_eq!(kept, expected);
    }

    #[test]
    fn density_monotone_under_added_links() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let pair = random_pair(&mut rng);
            if pair.source.len() == 0 || pair.target.len() == 0 {
                continue;
            }
            let before = projection_density(&pair).value;
            let mut augmented = pair.clone();
            augmented.alignment.insert(
                rng.random_range(1..=pair.source.len()),
                rng.random_range(1..=pair.target.len()),
            );
            assert!(projection_density(&augmented).value >= before);
        }
    }

    #[test]
    fn projects_example_pair_including_shifted_argument() {
        let pair = english_german_pair();
        let projection = project_pair(&pair, 0, &RoleBlacklist::modifiers()).unwrap();
        let frames = projection.sentence.frames();
        assert_eq!(frames.len(), 2);
        // "bitte" takes the source sense of "urge"; "Ich" A0, "Sie" A1 and
        // "Zustimmung" the shifted A2 the cost function must down-weight.
        assert_eq!(frames[0].predicate_index, 2);
        assert_eq!(frames[0].sense, "urge.01");
        assert_eq!(frames[0].args[&1], "A0");
        assert_eq!(frames[0].args[&3], "A1");
        assert_eq!(frames[0].args[&5], "A2");
        // "endorse" lands on "Zustimmung" with its aligned A0.
        assert_eq!(frames[1].predicate_index, 5);
        assert_eq!(frames[1].sense, "endorse.01");
        assert_eq!(frames[1].args[&3], "A0");

        // The shifted projection has mismatched relations: xcomp/adpobj.
        let shifted = projection
            .instances
            .iter()
            .find(|i| i.token_index == 5 && i.label == "A2")
            .unwrap();
        assert_eq!(shifted.source_deprel, "xcomp");
        assert_eq!(shifted.target_deprel, "adpobj");
        assert_eq!(shifted.cost.dep(), 0.5);
        // "Ich" keeps nsubj on both sides.
        let straight = projection
            .instances
            .iter()
            .find(|i| i.token_index == 1 && i.label == "A0")
            .unwrap();
        assert_eq!(straight.cost.dep(), 1.0);
    }

    #[test]
    fn blacklist_suppresses_modifier_roles() {
        let source = chain_sentence(
            3,
            vec![PredicateFrame::new(1, "x.01")
                .with_arg(2, "AM-TMP")
                .with_arg(3, "A0")],
        );
        let target = chain_sentence(3, vec![]);
        let pair = SentencePair::new(
            source,
            target,
            AlignmentSet::from_links([(1, 1), (2, 2), (3, 3)]),
        )
        .unwrap();
        let projection = project_pair(&pair, 0, &RoleBlacklist::modifiers()).unwrap();
        let roles: Vec<&str> = projection
            .instances
            .iter()
            .filter(|i| i.kind == InstanceKind::Argument)
            .map(|i| i.label.as_str())
            .collect();
        assert_eq!(roles, vec!["A0"]);
        // The AM-bearing token makes no negative claim either.
        assert!(projection.negatives.iter().all(|n| n.token_index != 2));
    }

    #[test]
    fn empty_alignment_projects_nothing() {
        let pair = SentencePair::new(
            chain_sentence(3, vec![PredicateFrame::new(1, "x.01").with_arg(2, "A0")]),
            chain_sentence(3, vec![]),
            AlignmentSet::new(),
        )
        .unwrap();
        let projection = project_pair(&pair, 0, &RoleBlacklist::default()).unwrap();
        assert!(projection.instances.is_empty());
        assert!(projection.sentence.frames().is_empty());
    }

    #[test]
    fn identity_alignment_reproduces_source_frames() {
        for n in [3usize, 5, 7] {
            let frames = vec![
                PredicateFrame::new(1, "v.01").with_arg(2, "A0").with_arg(n, "A1"),
            ];
            let source = chain_sentence(n, frames.clone());
            let target = chain_sentence(n, vec![]);
            let links = (1..=n).map(|i| (i, i)).collect::<Vec<_>>();
            let pair =
                SentencePair::new(source, target, AlignmentSet::from_links(links)).unwrap();
            let projection = project_pair(&pair, 0, &RoleBlacklist::default()).unwrap();
            assert_eq!(projection.sentence.frames(), frames.as_slice());
        }
    }

    #[test]
    fn collision_keeps_lower_source_index() {
        // Tokens 2 and 3 both project onto target 2 within one frame.
        let source = chain_sentence(
            3,
            vec![PredicateFrame::new(1, "x.01")
                .with_arg(2, "A0")
                .with_arg(3, "A1")],
        );
        let target = chain_sentence(2, vec![]);
        let pair = SentencePair::new(
            source,
            target,
            AlignmentSet::from_links([(1, 1), (2, 2), (3, 2)]),
        )
        .unwrap();
        let projection = project_pair(&pair, 4, &RoleBlacklist::default()).unwrap();
        assert_eq!(projection.sentence.frames()[0].args[&2], "A0");
        assert_eq!(projection.collisions.len(), 1);
        let diag = &projection.collisions[0];
        assert_eq!(diag.sentence_id, 4);
        assert_eq!(diag.kept_source, 2);
        assert_eq!(diag.dropped_source, 3);
    }

    #[test]
    fn projected_links_always_in_alignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let pair = random_pair(&mut rng);
            let projection = project_pair(&pair, 0, &RoleBlacklist::default()).unwrap();
            for inst in &projection.instances {
                assert!(pair
                    .alignment
                    .contains(inst.source_token_index, inst.token_index));
            }
            for inst in &projection.instances {
                assert!((0.0..=1.0).contains(&inst.cost.comp()));
                assert!(inst.cost.dep() == 0.5 || inst.cost.dep() == 1.0);
                assert!((0.0..=1.0).contains(&inst.cost.combined()));
            }
        }
    }

    #[test]
    fn completeness_fully_labeled_is_one() {
        let tokens = vec![
            token(1, "er", "PRON", 2, "nsubj"),
            token(2, "sieht", "VERB", 0, "root"),
            token(3, "sie", "PRON", 2, "dobj"),
        ];
        let frames = vec![PredicateFrame::new(2, "sehen.01")
            .with_arg(1, "A0")
            .with_arg(3, "A1")];
        let s = Sentence::new(tokens, frames, Provenance::Projected).unwrap();
        assert_relative_eq!(completeness_cost(&s), 1.0);
    }

    #[test]
    fn completeness_unlabeled_is_zero_and_empty_scope_is_one() {
        let tokens = vec![
            token(1, "er", "PRON", 2, "nsubj"),
            token(2, "sieht", "VERB", 0, "root"),
        ];
        let s = Sentence::new(tokens, vec![], Provenance::Projected).unwrap();
        assert_relative_eq!(completeness_cost(&s), 0.0);

        let no_verbs = chain_sentence(3, vec![]);
        assert_relative_eq!(completeness_cost(&no_verbs), 1.0);
    }

    #[test]
    fn completeness_half_labeled() {
        // One verb with three direct dependents; verb and one dependent
        // labeled: 2 of 4.
        let tokens = vec![
            token(1, "a", "NOUN", 2, "nsubj"),
            token(2, "v", "VERB", 0, "root"),
            token(3, "b", "NOUN", 2, "dobj"),
            token(4, "c", "NOUN", 2, "iobj"),
        ];
        let frames = vec![PredicateFrame::new(2, "v.01").with_arg(1, "A0")];
        let s = Sentence::new(tokens, frames, Provenance::Projected).unwrap();
        assert_relative_eq!(completeness_cost(&s), 0.5);
    }

    #[test]
    fn dep_match_cost_cases() {
        assert_eq!(deprel_match("nsubj", "nsubj"), 1.0);
        assert_eq!(deprel_match("xcomp", "adpmod"), 0.5);
        assert_eq!(deprel_match("anything", "anything"), 1.0);
    }

    #[test]
    fn assign_costs_by_mode() {
        let inst = |comp: f64, dep: f64| ProjectedInstance {
            sentence_id: 0,
            token_index: 1,
            kind: InstanceKind::Argument,
            label: "A0".to_string(),
            source_token_index: 1,
            source_deprel: "nsubj".to_string(),
            target_deprel: "nsubj".to_string(),
            cost: CostVector::new(comp, dep),
        };
        let instances = vec![inst(0.8, 0.5), inst(0.25, 1.0)];
        assert_eq!(assign_costs(&instances, CostMode::Uniform), vec![1.0, 1.0]);
        assert_eq!(assign_costs(&instances, CostMode::Comp), vec![0.8, 0.25]);
        assert_eq!(assign_costs(&instances, CostMode::Dep), vec![0.5, 1.0]);
        assert_eq!(
            assign_costs(&instances, CostMode::CompDep),
            vec![0.65, 0.625]
        );
    }

    #[test]
    fn cost_sidecar_round_trips_exactly() {
        let pair = english_german_pair();
        let projection = project_pair(&pair, 3, &RoleBlacklist::modifiers()).unwrap();
        let text = write_cost_sidecar(std::slice::from_ref(&projection));
        let rows = parse_cost_sidecar(&text).unwrap();
        assert_eq!(
            rows.len(),
            projection.instances.len() + projection.negatives.len()
        );
        for (row, inst) in rows.iter().zip(&projection.instances) {
            assert_eq!(row.sentence_id, 3);
            assert_eq!(row.token_index, inst.token_index);
            assert_eq!(row.label.as_deref(), Some(inst.label.as_str()));
            // Display round-trips f64 exactly.
            assert_eq!(row.comp, inst.cost.comp());
            assert_eq!(row.dep, inst.cost.dep());
            assert_eq!(row.combined, inst.cost.combined());
        }
    }

    #[test]
    fn assign_costs_matches_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let instances: Vec<ProjectedInstance> = (0..20)
            .map(|i| {
                let comp = (rng.random_range(0..=10) as f64) / 10.0;
                let dep = if rng.random_bool(0.5) { 1.0 } else { 0.5 };
                ProjectedInstance {
                    sentence_id: i,
                    token_index: 1,
                    kind: InstanceKind::Argument,
                    label: "A1".to_string(),
                    source_token_index: 1,
                    source_deprel: if dep == 1.0 { "dobj" } else { "xcomp" }.to_string(),
                    target_deprel: "dobj".to_string(),
                    cost: CostVector::new(comp, dep),
                }
            })
            .collect();
        let combined = assign_costs(&instances, CostMode::CompDep);
        for (inst, lambda) in instances.iter().zip(&combined) {
            let dep = dep_match_cost(inst);
            assert_relative_eq!(*lambda, (inst.cost.comp() + dep) / 2.0);
        }
    }
}
