//! Data model for dependency-parsed, role-labeled sentences plus the
//! CoNLL-2009 tabular format.
//!
//! Column layout: ID, FORM, LEMMA, PLEMMA, POS, PPOS, FEAT, PFEAT, HEAD,
//! PHEAD, DEPREL, PDEPREL, FILLPRED, PRED, APRED1..N. The predicted
//! columns (PLEMMA, PPOS, PHEAD, PDEPREL) are the model inputs; the
//! writer mirrors each value into both the gold and the predicted column
//! and leaves FEAT/PFEAT as "_". Files are UTF-8, tab-separated, one
//! blank line between sentences; comment lines starting with '#' are
//! ignored on read and never written.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// The 12-tag universal part-of-speech set.
pub const UNIVERSAL_POS: [&str; 12] = [
    "VERB", "NOUN", "PRON", "ADJ", "ADV", "ADP", "CONJ", "DET", "NUM", "PRT", "X", ".",
];

/// Where a sentence's annotation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Gold,
    Projected,
    Predicted,
}

/// One token of a dependency-parsed sentence.
///
/// `index` is the 1-based position, `head` is the 1-based index of the
/// parent token with 0 marking the root. `pos` is expected to come from
/// the universal tagset in use; membership is enforced at the parse
/// boundary (see [`ParseOptions`]), not on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub pos: String,
    pub head: usize,
    pub deprel: String,
}

/// A predicate with its sense label and argument map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateFrame {
    pub predicate_index: usize,
    pub sense: String,
    /// Argument token index -> role label. A token carries at most one
    /// role within a frame by construction of the map.
    pub args: BTreeMap<usize, String>,
}

impl PredicateFrame {
    pub fn new(predicate_index: usize, sense: impl Into<String>) -> Self {
        PredicateFrame {
            predicate_index,
            sense: sense.into(),
            args: BTreeMap::new(),
        }
    }

    pub fn with_arg(mut self, token_index: usize, role: impl Into<String>) -> Self {
        self.args.insert(token_index, role.into());
        self
    }
}

/// A sentence with tokens, dependency tree and predicate-argument frames.
///
/// Construction validates that head indices form a single-rooted acyclic
/// tree and that frames are sorted by predicate position with unique,
/// in-range indices. An empty sentence (zero tokens, zero frames) is
/// permitted so degenerate corpus statistics stay well-defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<Token>,
    frames: Vec<PredicateFrame>,
    provenance: Provenance,
}

impl Sentence {
    pub fn new(
        tokens: Vec<Token>,
        mut frames: Vec<PredicateFrame>,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = tokens.len();
        for (i, tok) in tokens.iter().enumerate() {
            if tok.index != i + 1 {
                return Err(Error::Structure(format!(
                    "token index {} at position {} (expected {})",
                    tok.index,
                    i + 1,
                    i + 1
                )));
            }
            if tok.head == tok.index {
                return Err(Error::Structure(format!(
                    "token {} is its own head",
                    tok.index
                )));
            }
            if tok.head > n {
                return Err(Error::Structure(format!(
                    "token {} has head {} beyond sentence length {}",
                    tok.index, tok.head, n
                )));
            }
        }
        if n > 0 {
            let roots = tokens.iter().filter(|t| t.head == 0).count();
            if roots != 1 {
                return Err(Error::Structure(format!(
                    "expected exactly one root, found {}",
                    roots
                )));
            }
            // Every token must reach the root by parent pointers.
            for tok in &tokens {
                let mut cur = tok.head;
                let mut steps = 0;
                while cur != 0 {
                    cur = tokens[cur - 1].head;
                    steps += 1;
                    if steps > n {
                        return Err(Error::Structure(format!(
                            "cyclic head structure involving token {}",
                            tok.index
                        )));
                    }
                }
            }
        }
        frames.sort_by_key(|f| f.predicate_index);
        let mut seen = BTreeSet::new();
        for frame in &frames {
            if frame.predicate_index == 0 || frame.predicate_index > n {
                return Err(Error::Structure(format!(
                    "predicate index {} out of range",
                    frame.predicate_index
                )));
            }
            if !seen.insert(frame.predicate_index) {
                return Err(Error::Structure(format!(
                    "duplicate predicate index {}",
                    frame.predicate_index
                )));
            }
            for (&arg, role) in &frame.args {
                if arg == 0 || arg > n {
                    return Err(Error::Structure(format!(
                        "argument index {} out of range in frame at {}",
                        arg, frame.predicate_index
                    )));
                }
                if role.is_empty() {
                    return Err(Error::Structure(format!(
                        "empty role label on token {} in frame at {}",
                        arg, frame.predicate_index
                    )));
                }
            }
        }
        Ok(Sentence {
            tokens,
            frames,
            provenance,
        })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn frames(&self) -> &[PredicateFrame] {
        &self.frames
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based index. Panics when out of range.
    pub fn token(&self, index: usize) -> &Token {
        &self.tokens[index - 1]
    }

    /// True when the token carries a sense or a role in any frame.
    pub fn is_labeled(&self, token_index: usize) -> bool {
        self.frames
            .iter()
            .any(|f| f.predicate_index == token_index || f.args.contains_key(&token_index))
    }

    /// Same tokens, different frames.
    pub fn with_frames(
        &self,
        frames: Vec<PredicateFrame>,
        provenance: Provenance,
    ) -> Result<Sentence> {
        Sentence::new(self.tokens.clone(), frames, provenance)
    }
}

/// Parser configuration.
#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Closed POS set to enforce, or `None` to accept any tag.
    pub tagset: Option<BTreeSet<String>>,
    pub provenance: Provenance,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            tagset: Some(UNIVERSAL_POS.iter().map(|s| s.to_string()).collect()),
            provenance: Provenance::Gold,
        }
    }
}

impl ParseOptions {
    /// Accept any POS string.
    pub fn any_pos() -> Self {
        ParseOptions {
            tagset: None,
            provenance: Provenance::Gold,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

/// Parse a CoNLL-2009 file with the default options (universal tagset).
pub fn parse_conll(text: &str) -> Result<Vec<Sentence>> {
    parse_conll_with(text, &ParseOptions::default())
}

pub fn parse_conll_with(text: &str, options: &ParseOptions) -> Result<Vec<Sentence>> {
    let mut sentences = Vec::new();
    let mut block: Vec<(usize, Vec<String>)> = Vec::new();
    for (lineno0, raw) in text.lines().enumerate() {
        let lineno = lineno0 + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            if !block.is_empty() {
                sentences.push(sentence_from_rows(&block, options)?);
                block.clear();
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        block.push((lineno, line.split('\t').map(|s| s.to_string()).collect()));
    }
    if !block.is_empty() {
        sentences.push(sentence_from_rows(&block, options)?);
    }
    Ok(sentences)
}

fn sentence_from_rows(rows: &[(usize, Vec<String>)], options: &ParseOptions) -> Result<Sentence> {
    let n = rows.len();
    let mut tokens = Vec::with_capacity(n);
    let mut predicate_rows = Vec::new();
    for (pos, (line, cols)) in rows.iter().enumerate() {
        if cols.len() < 14 {
            return Err(Error::parse(
                *line,
                format!("expected at least 14 columns, found {}", cols.len()),
            ));
        }
        if cols.iter().any(|c| c.is_empty()) {
            return Err(Error::parse(*line, "empty column"));
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(*line, format!("non-numeric token index '{}'", cols[0])))?;
        if index != pos + 1 {
            return Err(Error::parse(
                *line,
                format!("token index {} out of sequence (expected {})", index, pos + 1),
            ));
        }
        let head: usize = cols[9]
            .parse()
            .map_err(|_| Error::parse(*line, format!("non-numeric head '{}'", cols[9])))?;
        let pos_tag = cols[5].clone();
        if let Some(tagset) = &options.tagset {
            if !tagset.contains(&pos_tag) {
                return Err(Error::parse(
                    *line,
                    format!("POS '{}' not in the configured tagset", pos_tag),
                ));
            }
        }
        match cols[12].as_str() {
            "Y" => {
                if cols[13] == "_" {
                    return Err(Error::parse(*line, "predicate row without a sense"));
                }
                predicate_rows.push(pos);
            }
            "_" => {
                if cols[13] != "_" {
                    return Err(Error::parse(
                        *line,
                        "sense on a row not marked as a predicate",
                    ));
                }
            }
            other => {
                return Err(Error::parse(
                    *line,
                    format!("FILLPRED must be 'Y' or '_', found '{}'", other),
                ));
            }
        }
        tokens.push(Token {
            index,
            form: cols[1].clone(),
            lemma: cols[3].clone(),
            pos: pos_tag,
            head,
            deprel: cols[11].clone(),
        });
    }

    let n_preds = predicate_rows.len();
    for (line, cols) in rows {
        if cols.len() != 14 + n_preds {
            return Err(Error::parse(
                *line,
                format!(
                    "wrong column count: {} (expected {} for {} predicates)",
                    cols.len(),
                    14 + n_preds,
                    n_preds
                ),
            ));
        }
    }

    let mut frames = Vec::with_capacity(n_preds);
    for (j, &pred_row) in predicate_rows.iter().enumerate() {
        let mut frame = PredicateFrame::new(pred_row + 1, rows[pred_row].1[13].clone());
        for (pos, (_, cols)) in rows.iter().enumerate() {
            let cell = &cols[14 + j];
            if cell != "_" {
                frame.args.insert(pos + 1, cell.clone());
            }
        }
        frames.push(frame);
    }

    let first_line = rows[0].0;
    Sentence::new(tokens, frames, options.provenance).map_err(|e| match e {
        Error::Structure(msg) => {
            Error::Structure(format!("sentence starting at line {}: {}", first_line, msg))
        }
        other => other,
    })
}

/// Serialize sentences in the canonical form: predicted columns mirror
/// the gold columns, FEAT/PFEAT are "_", one blank line after every
/// sentence. `parse_conll(write_conll(s))` is structurally equal to `s`,
/// and re-writing a canonical file reproduces it byte for byte.
pub fn write_conll(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for sentence in sentences {
        let frames = sentence.frames();
        for token in sentence.tokens() {
            let (fillpred, pred) = match frames
                .iter()
                .find(|f| f.predicate_index == token.index)
            {
                Some(frame) => ("Y", frame.sense.as_str()),
                None => ("_", "_"),
            };
            let mut cols: Vec<String> = vec![
                token.index.to_string(),
                token.form.clone(),
                token.lemma.clone(),
                token.lemma.clone(),
                token.pos.clone(),
                token.pos.clone(),
                "_".to_string(),
                "_".to_string(),
                token.head.to_string(),
                token.head.to_string(),
                token.deprel.clone(),
                token.deprel.clone(),
                fillpred.to_string(),
                pred.to_string(),
            ];
            for frame in frames {
                cols.push(
                    frame
                        .args
                        .get(&token.index)
                        .cloned()
                        .unwrap_or_else(|| "_".to_string()),
                );
            }
            out.push_str(&cols.join("\t"));
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
