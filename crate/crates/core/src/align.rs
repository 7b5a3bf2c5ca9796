//! Word-alignment ingestion and direction intersection.
//!
//! Alignments arrive in the Pharaoh format: one line per sentence pair,
//! space-separated "i-j" link tokens, 0-based on disk by convention.
//! Indices are 1-based in memory to match CoNLL token ids.

use std::collections::BTreeSet;

use crate::conll::Sentence;
use crate::error::{Error, Result};

/// Word-to-word links for one sentence pair, stored as
/// (source_index, target_index) with 1-based indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignmentSet {
    links: BTreeSet<(usize, usize)>,
}

impl AlignmentSet {
    pub fn new() -> Self {
        AlignmentSet::default()
    }

    pub fn from_links<I: IntoIterator<Item = (usize, usize)>>(links: I) -> Self {
        AlignmentSet {
            links: links.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, source: usize, target: usize) {
        self.links.insert((source, target));
    }

    pub fn remove(&mut self, source: usize, target: usize) {
        self.links.remove(&(source, target));
    }

    pub fn contains(&self, source: usize, target: usize) -> bool {
        self.links.contains(&(source, target))
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.links.iter().copied()
    }

    /// Swap link orientation, e.g. to normalize a target-to-source file.
    pub fn swapped(&self) -> AlignmentSet {
        AlignmentSet::from_links(self.links.iter().map(|&(s, t)| (t, s)))
    }

    /// Lowest-indexed target token aligned to `source`, if any.
    pub fn target_of(&self, source: usize) -> Option<usize> {
        self.links
            .range((source, 0)..(source + 1, 0))
            .next()
            .map(|&(_, t)| t)
    }

    /// Lowest-indexed source token aligned to `target`, if any.
    pub fn source_of(&self, target: usize) -> Option<usize> {
        self.links
            .iter()
            .filter(|&&(_, t)| t == target)
            .map(|&(s, _)| s)
            .min()
    }

    /// Distinct target indices with at least one link.
    pub fn aligned_targets(&self) -> BTreeSet<usize> {
        self.links.iter().map(|&(_, t)| t).collect()
    }

    /// Distinct source indices with at least one link.
    pub fn aligned_sources(&self) -> BTreeSet<usize> {
        self.links.iter().map(|&(s, _)| s).collect()
    }
}

/// Set intersection of two alignment directions. Both inputs must
/// already be in (source, target) orientation.
pub fn intersect(forward: &AlignmentSet, backward: &AlignmentSet) -> AlignmentSet {
    AlignmentSet {
        links: forward
            .links
            .intersection(&backward.links)
            .copied()
            .collect(),
    }
}

/// Parse a Pharaoh alignment file; one `AlignmentSet` per line, empty
/// lines included. With `one_based` unset, 0-based indices on disk are
/// shifted to the internal 1-based convention.
pub fn parse_alignments(text: &str, one_based: bool) -> Result<Vec<AlignmentSet>> {
    let mut sets = Vec::new();
    for (lineno0, line) in text.lines().enumerate() {
        let lineno = lineno0 + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut set = AlignmentSet::new();
        for token in line.split_whitespace() {
            let (left, right) = token.split_once('-').ok_or_else(|| {
                Error::parse(lineno, format!("malformed alignment pair '{}'", token))
            })?;
            let src: usize = left.parse().map_err(|_| {
                Error::parse(lineno, format!("malformed alignment pair '{}'", token))
            })?;
            let tgt: usize = right.parse().map_err(|_| {
                Error::parse(lineno, format!("malformed alignment pair '{}'", token))
            })?;
            let (src, tgt) = if one_based {
                if src == 0 || tgt == 0 {
                    return Err(Error::parse(
                        lineno,
                        format!("index 0 in one-based alignment pair '{}'", token),
                    ));
                }
                (src, tgt)
            } else {
                (src + 1, tgt + 1)
            };
            set.insert(src, tgt);
        }
        sets.push(set);
    }
    Ok(sets)
}

/// Serialize alignment sets in the Pharaoh format. `one_based` controls
/// the on-disk base; `swapped` writes target-source pair order.
pub fn write_alignments(sets: &[AlignmentSet], one_based: bool, swapped: bool) -> String {
    let offset = if one_based { 0 } else { 1 };
    let mut out = String::new();
    for set in sets {
        let mut links: Vec<(usize, usize)> = set
            .iter()
            .map(|(s, t)| if swapped { (t, s) } else { (s, t) })
            .collect();
        links.sort_unstable();
        let line: Vec<String> = links
            .iter()
            .map(|&(a, b)| format!("{}-{}", a - offset, b - offset))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// A source sentence with annotations, its target translation and the
/// (already intersected) alignment between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub source: Sentence,
    pub target: Sentence,
    pub alignment: AlignmentSet,
}

impl SentencePair {
    pub fn new(source: Sentence, target: Sentence, alignment: AlignmentSet) -> Result<Self> {
        for (s, t) in alignment.iter() {
            if s == 0 || s > source.len() {
                return Err(Error::Data(format!(
                    "alignment source index {} out of bounds (sentence length {})",
                    s,
                    source.len()
                )));
            }
            if t == 0 || t > target.len() {
                return Err(Error::Data(format!(
                    "alignment target index {} out of bounds (sentence length {})",
                    t,
                    target.len()
                )));
            }
        }
        Ok(SentencePair {
            source,
            target,
            alignment,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_based_input_is_normalized() {
        let sets = parse_alignments("0-0 2-1\n", false).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0], AlignmentSet::from_links([(1, 1), (3, 2)]));
    }

    #[test]
    fn empty_line_is_empty_set() {
        let sets = parse_alignments("0-0\n\n1-1\n", false).unwrap();
        assert_eq!(sets.len(), 3);
        assert!(sets[1].is_empty());
    }

    #[test]
    fn three_line_file_matches_hand_check() {
        let text = "0-1 1-0\n2-2\n0-0 1-1 2-2\n";
        let sets = parse_alignments(text, false).unwrap();
        assert_eq!(sets[0], AlignmentSet::from_links([(1, 2), (2, 1)]));
        assert_eq!(sets[1], AlignmentSet::from_links([(3, 3)]));
        assert_eq!(sets[2], AlignmentSet::from_links([(1, 1), (2, 2), (3, 3)]));
    }

    #[test]
    fn malformed_pair_reports_line() {
        for bad in ["1-\n", "x-1\n", "3\n", "1-2-3\n"] {
            match parse_alignments(bad, false) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
                other => panic!("expected parse error for {:?}, got {:?}", bad, other),
            }
        }
        // Negative indices never parse as unsigned pairs.
        assert!(parse_alignments("-1-2\n", false).is_err());
    }

    #[test]
    fn one_based_rejects_zero() {
        assert!(parse_alignments("0-1\n", true).is_err());
        assert_eq!(
            parse_alignments("1-1\n", true).unwrap()[0],
            AlignmentSet::from_links([(1, 1)])
        );
    }

    #[test]
    fn intersect_matches_hand_example() {
        let a = AlignmentSet::from_links([(1, 2), (3, 4)]);
        let b = AlignmentSet::from_links([(3, 4), (5, 6)]);
        assert_eq!(intersect(&a, &b), AlignmentSet::from_links([(3, 4)]));
    }

    #[test]
    fn intersect_is_idempotent() {
        let a = AlignmentSet::from_links([(1, 2), (3, 4), (7, 1)]);
        assert_eq!(intersect(&a, &a), a);
    }

    #[test]
    fn intersect_matches_brute_force_on_random_sets() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let draw = |rng: &mut ChaCha8Rng| {
                AlignmentSet::from_links(
                    (0..50).map(|_| (rng.random_range(1..30), rng.random_range(1..30))),
                )
            };
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            let expected =
                AlignmentSet::from_links(a.iter().filter(|&(s, t)| b.contains(s, t)));
            assert_eq!(intersect(&a, &b), expected);
        }
    }

    #[test]
    fn write_round_trips() {
        let sets = parse_alignments("0-1 1-0\n\n2-2\n", false).unwrap();
        assert_eq!(write_alignments(&sets, false, false), "0-1 1-0\n\n2-2\n");
        let swapped = write_alignments(&sets, false, true);
        let back: Vec<AlignmentSet> = parse_alignments(&swapped, false)
            .unwrap()
            .iter()
            .map(|s| s.swapped())
            .collect();
        assert_eq!(back, sets);
    }

    proptest! {
        #[test]
        fn prop_intersect_commutes_and_bounds(
            a in proptest::collection::btree_set((1usize..20, 1usize..20), 0..40),
            b in proptest::collection::btree_set((1usize..20, 1usize..20), 0..40),
        ) {
            let a = AlignmentSet::from_links(a);
            let b = AlignmentSet::from_links(b);
            let ab = intersect(&a, &b);
            prop_assert_eq!(&ab, &intersect(&b, &a));
            for (s, t) in ab.iter() {
                prop_assert!(a.contains(s, t) && b.contains(s, t));
            }
        }
    }
}
