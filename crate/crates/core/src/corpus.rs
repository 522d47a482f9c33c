//! Sense-annotated corpora: parsing, vocabularies, sense inventories and the
//! corpus-derived most-frequent-sense map.
//!
//! The on-disk format is a UTF-8 TSV with one token per line:
//!
//! ```text
//! # comment
//! surface<TAB>lemma<TAB>pos<TAB>sense[<TAB>instance_id]
//! ```
//!
//! `sense` is `-` for unannotated tokens and a blank line ends a sentence.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coarse part-of-speech tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Other,
}

impl Pos {
    pub const ALL: [Pos; 5] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv, Pos::Other];

    /// Maps a fine-grained or coarse tag onto the five-tag set.
    ///
    /// Accepts the coarse names themselves, Penn Treebank tags, universal
    /// tags and WordNet single-letter tags (`n v a s r`). Anything else is
    /// [`Pos::Other`].
    pub fn from_tag(tag: &str) -> Pos {
        match tag {
            "NOUN" | "PROPN" | "N" | "n" => Pos::Noun,
            "VERB" | "V" | "v" | "MD" => Pos::Verb,
            "ADJ" | "J" | "A" | "a" | "s" => Pos::Adj,
            "ADV" | "R" | "r" => Pos::Adv,
            t if t.starts_with("NN") => Pos::Noun,
            t if t.starts_with("VB") => Pos::Verb,
            t if t.starts_with("JJ") => Pos::Adj,
            t if t.starts_with("RB") => Pos::Adv,
            _ => Pos::Other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Other => "OTHER",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn check_field(name: &'static str, value: &str) -> Result<()> {
    if value.is_empty() {
        return Err(Error::invalid(format!("{name} must be non-empty")));
    }
    if value.contains(['\t', '\n', '\r']) {
        return Err(Error::invalid(format!("{name} contains a tab or newline: {value:?}")));
    }
    Ok(())
}

fn check_id(name: &'static str, value: &str) -> Result<()> {
    if value.is_empty() || value.chars().any(char::is_whitespace) {
        return Err(Error::invalid(format!("{name} must be non-empty without whitespace: {value:?}")));
    }
    if value == "-" {
        return Err(Error::invalid(format!("{name} may not be the placeholder `-`")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    surface: String,
    lemma: String,
    pos: Pos,
    sense_id: Option<String>,
    instance_id: Option<String>,
}

impl Token {
    pub fn new(
        surface: impl Into<String>,
        lemma: impl Into<String>,
        pos: Pos,
        sense_id: Option<String>,
    ) -> Result<Self> {
        let surface = surface.into();
        let lemma = lemma.into();
        check_field("surface", &surface)?;
        check_field("lemma", &lemma)?;
        if let Some(s) = &sense_id {
            check_id("sense id", s)?;
        }
        Ok(Token { surface, lemma, pos, sense_id, instance_id: None })
    }

    pub fn with_instance(mut self, instance_id: impl Into<String>) -> Result<Self> {
        let id = instance_id.into();
        check_id("instance id", &id)?;
        self.instance_id = Some(id);
        Ok(self)
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn pos(&self) -> Pos {
        self.pos
    }

    pub fn sense_id(&self) -> Option<&str> {
        self.sense_id.as_deref()
    }

    pub fn instance_id(&self) -> Option<&str> {
        self.instance_id.as_deref()
    }

    pub fn key(&self) -> WordKey {
        WordKey::new(self.lemma.clone(), self.pos)
    }

    /// The token as it enters a sense-embedding training stream: the sense id
    /// when annotated, otherwise the surface form.
    pub fn sense_or_surface(&self) -> &str {
        self.sense_id.as_deref().unwrap_or(&self.surface)
    }
}

/// `(lemma, pos)` pair identifying an inventory entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WordKey {
    pub lemma: String,
    pub pos: Pos,
}

impl WordKey {
    pub fn new(lemma: impl Into<String>, pos: Pos) -> Self {
        WordKey { lemma: lemma.into(), pos }
    }
}

impl fmt::Display for WordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.lemma, self.pos)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    sentences: Vec<Vec<Token>>,
}

impl Corpus {
    /// Builds a corpus, rejecting empty sentences and duplicate instance ids.
    pub fn new(sentences: Vec<Vec<Token>>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, sentence) in sentences.iter().enumerate() {
            if sentence.is_empty() {
                return Err(Error::invalid(format!("sentence {i} is empty")));
            }
            for tok in sentence {
                if let Some(id) = tok.instance_id() {
                    if !seen.insert(id) {
                        return Err(Error::invalid(format!("duplicate instance id {id}")));
                    }
                }
            }
        }
        Ok(Corpus { sentences })
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut sentences = Vec::new();
        let mut current = Vec::new();
        let mut seen = HashSet::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                if !current.is_empty() {
                    sentences.push(std::mem::take(&mut current));
                }
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 && fields.len() != 5 {
                return Err(Error::parse(
                    lineno,
                    format!("expected 4 or 5 tab-separated fields, found {}", fields.len()),
                ));
            }
            let sense = match fields[3] {
                "-" => None,
                s => Some(s.to_owned()),
            };
            let mut tok = Token::new(fields[0], fields[1], Pos::from_tag(fields[2]), sense)
                .map_err(|e| Error::parse(lineno, e.to_string()))?;
            if let Some(&inst) = fields.get(4) {
                if inst != "-" {
                    if !seen.insert(inst.to_owned()) {
                        return Err(Error::parse(lineno, format!("duplicate instance id {inst}")));
                    }
                    tok = tok.with_instance(inst).map_err(|e| Error::parse(lineno, e.to_string()))?;
                }
            }
            current.push(tok);
        }
        if !current.is_empty() {
            sentences.push(current);
        }
        Ok(Corpus { sentences })
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for sentence in &self.sentences {
            for t in sentence {
                write!(w, "{}\t{}\t{}\t{}", t.surface, t.lemma, t.pos, t.sense_id.as_deref().unwrap_or("-"))?;
                if let Some(inst) = &t.instance_id {
                    write!(w, "\t{inst}")?;
                }
                writeln!(w)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn sentences(&self) -> &[Vec<Token>] {
        &self.sentences
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn num_tokens(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    /// Per-sentence training stream for sense embeddings: annotated tokens
    /// contribute their sense id, the rest their surface form.
    pub fn sense_stream(&self) -> Vec<Vec<String>> {
        self.sentences.iter().map(|s| s.iter().map(|t| t.sense_or_surface().to_owned()).collect()).collect()
    }

    /// Per-sentence stream of surface forms.
    pub fn word_stream(&self) -> Vec<Vec<String>> {
        self.sentences.iter().map(|s| s.iter().map(|t| t.surface.clone()).collect()).collect()
    }
}

/// Contiguous string ids ordered by descending count, ties lexicographic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdMap {
    keys: Vec<String>,
    index: HashMap<String, usize>,
}

impl IdMap {
    pub fn from_counts(counts: &HashMap<String, u64>) -> Self {
        let mut keys: Vec<&String> = counts.keys().collect();
        keys.sort_by(|a, b| counts[*b].cmp(&counts[*a]).then_with(|| a.cmp(b)));
        let keys: Vec<String> = keys.into_iter().cloned().collect();
        let index = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        IdMap { keys, index }
    }

    pub fn id(&self, key: &str) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn key(&self, id: usize) -> &str {
        &self.keys[id]
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocab {
    pub word_freq: HashMap<String, u64>,
    pub sense_freq: HashMap<String, u64>,
    pub total_tokens: u64,
    pub word_ids: IdMap,
    pub sense_ids: IdMap,
}

pub fn build_vocab(corpus: &Corpus) -> Result<Vocab> {
    if corpus.num_tokens() == 0 {
        return Err(Error::invalid("cannot build a vocabulary from an empty corpus"));
    }
    let mut word_freq: HashMap<String, u64> = HashMap::new();
    let mut sense_freq: HashMap<String, u64> = HashMap::new();
    let mut total = 0u64;
    for tok in corpus.tokens() {
        total += 1;
        *word_freq.entry(tok.surface.clone()).or_default() += 1;
        if let Some(s) = &tok.sense_id {
            *sense_freq.entry(s.clone()).or_default() += 1;
        }
    }
    let word_ids = IdMap::from_counts(&word_freq);
    let sense_ids = IdMap::from_counts(&sense_freq);
    Ok(Vocab { word_freq, sense_freq, total_tokens: total, word_ids, sense_ids })
}

/// `(lemma, pos)` → candidate senses, each list sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenseInventory {
    entries: BTreeMap<WordKey, Vec<String>>,
}

impl SenseInventory {
    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (WordKey, Vec<S>)>,
        S: Into<String>,
    {
        let mut inv = SenseInventory::default();
        for (key, senses) in entries {
            let senses: Vec<String> = senses.into_iter().map(Into::into).collect();
            if senses.is_empty() {
                return Err(Error::invalid(format!("inventory entry {key} has no senses")));
            }
            for s in &senses {
                check_id("sense id", s)?;
            }
            inv.add_all(key, senses);
        }
        Ok(inv)
    }

    fn add_all(&mut self, key: WordKey, senses: impl IntoIterator<Item = String>) {
        let list = self.entries.entry(key).or_default();
        list.extend(senses);
        list.sort();
        list.dedup();
    }

    /// Union of two inventories.
    pub fn merge(&mut self, other: &SenseInventory) {
        for (k, v) in &other.entries {
            self.add_all(k.clone(), v.iter().cloned());
        }
    }

    pub fn get(&self, key: &WordKey) -> Option<&[String]> {
        self.entries.get(key).map(Vec::as_slice)
    }

    pub fn candidates(&self, lemma: &str, pos: Pos) -> Option<&[String]> {
        self.get(&WordKey::new(lemma, pos))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WordKey, &[String])> {
        self.entries.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Reads `lemma<TAB>pos<TAB>sense1<TAB>sense2...` lines.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut inv = SenseInventory::default();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 3 {
                return Err(Error::parse(idx + 1, "expected lemma, pos and at least one sense"));
            }
            check_field("lemma", fields[0]).map_err(|e| Error::parse(idx + 1, e.to_string()))?;
            for s in &fields[2..] {
                check_id("sense id", s).map_err(|e| Error::parse(idx + 1, e.to_string()))?;
            }
            let key = WordKey::new(fields[0], Pos::from_tag(fields[1]));
            inv.add_all(key, fields[2..].iter().map(|s| s.to_string()));
        }
        Ok(inv)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, senses) in &self.entries {
            write!(w, "{}\t{}", k.lemma, k.pos)?;
            for s in senses {
                write!(w, "\t{s}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

pub fn build_inventory(corpus: &Corpus) -> Result<SenseInventory> {
    let mut inv = SenseInventory::default();
    for tok in corpus.tokens() {
        if let Some(s) = &tok.sense_id {
            inv.add_all(tok.key(), std::iter::once(s.clone()));
        }
    }
    if inv.is_empty() {
        return Err(Error::invalid("corpus has no sense-annotated tokens"));
    }
    Ok(inv)
}

/// Annotated occurrence counts per `(lemma, pos)` and sense.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SenseStats {
    entries: BTreeMap<WordKey, BTreeMap<String, u64>>,
}

impl SenseStats {
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let mut entries: BTreeMap<WordKey, BTreeMap<String, u64>> = BTreeMap::new();
        for tok in corpus.tokens() {
            if let Some(s) = &tok.sense_id {
                *entries.entry(tok.key()).or_default().entry(s.clone()).or_default() += 1;
            }
        }
        SenseStats { entries }
    }

    pub fn get(&self, key: &WordKey) -> Option<&BTreeMap<String, u64>> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WordKey, &BTreeMap<String, u64>)> {
        self.entries.iter()
    }

    /// Total annotated occurrences of a `(lemma, pos)`.
    pub fn total(&self, key: &WordKey) -> u64 {
        self.entries.get(key).map_or(0, |m| m.values().sum())
    }

    /// Senses of `key` sorted by descending count, ties lexicographic.
    pub fn ranked(&self, key: &WordKey) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> =
            self.entries.get(key).map(|m| m.iter().map(|(s, &c)| (s.as_str(), c)).collect()).unwrap_or_default();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSense {
    pub sense: String,
    pub count: u64,
    /// Another sense shares the maximal count; `sense` is the lexicographically
    /// smallest of them.
    pub tied: bool,
}

/// Most frequent annotated sense for every `(lemma, pos)` in the corpus.
pub fn gold_mfs(corpus: &Corpus) -> Result<BTreeMap<WordKey, GoldSense>> {
    let stats = SenseStats::from_corpus(corpus);
    if stats.entries.is_empty() {
        return Err(Error::invalid("corpus has no sense-annotated tokens"));
    }
    Ok(gold_from_stats(&stats))
}

pub fn gold_from_stats(stats: &SenseStats) -> BTreeMap<WordKey, GoldSense> {
    stats
        .entries
        .keys()
        .map(|k| {
            let ranked = stats.ranked(k);
            let (sense, count) = ranked[0];
            let tied = ranked.get(1).is_some_and(|&(_, c)| c == count);
            (k.clone(), GoldSense { sense: sense.to_owned(), count, tied })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(surface: &str, sense: Option<&str>) -> Token {
        Token::new(surface, surface, Pos::Noun, sense.map(str::to_owned)).unwrap()
    }

    #[test]
    fn empty_stream_parses_to_empty_corpus() {
        let c = Corpus::parse("".as_bytes()).unwrap();
        assert_eq!(c.sentences().len(), 0);
    }

    #[test]
    fn single_annotated_line() {
        let c = Corpus::parse("bank\tbank\tNOUN\tbank%1:17:01::\n\n".as_bytes()).unwrap();
        assert_eq!(c.sentences().len(), 1);
        let t = &c.sentences()[0][0];
        assert_eq!(t.sense_id(), Some("bank%1:17:01::"));
        assert_eq!(t.pos(), Pos::Noun);
    }

    #[test]
    fn dash_means_unannotated_and_comments_skip() {
        let text = "# header\nthe\tthe\tDT\t-\nbank\tbank\tNN\tA\tdoc:0:1\n";
        let c = Corpus::parse(text.as_bytes()).unwrap();
        let toks: Vec<_> = c.tokens().collect();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].sense_id(), None);
        assert_eq!(toks[0].pos(), Pos::Other);
        assert_eq!(toks[1].instance_id(), Some("doc:0:1"));
    }

    #[test]
    fn wrong_field_count_reports_line() {
        let err = Corpus::parse("a\ta\tNOUN\t-\n\nb\tb\tNOUN\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn duplicate_instance_ids_rejected() {
        let text = "a\ta\tNOUN\tA\tx\nb\tb\tNOUN\tB\tx\n";
        assert!(Corpus::parse(text.as_bytes()).is_err());
    }

    #[test]
    fn empty_sentence_rejected() {
        assert!(Corpus::new(vec![vec![tok("a", None)], vec![]]).is_err());
    }

    #[test]
    fn token_rejects_whitespace_sense() {
        assert!(Token::new("a", "a", Pos::Noun, Some("x y".into())).is_err());
        assert!(Token::new("", "a", Pos::Noun, None).is_err());
    }

    #[test]
    fn pos_table() {
        assert_eq!(Pos::from_tag("NNS"), Pos::Noun);
        assert_eq!(Pos::from_tag("VBD"), Pos::Verb);
        assert_eq!(Pos::from_tag("JJR"), Pos::Adj);
        assert_eq!(Pos::from_tag("RB"), Pos::Adv);
        assert_eq!(Pos::from_tag("s"), Pos::Adj);
        assert_eq!(Pos::from_tag("DT"), Pos::Other);
    }

    #[test]
    fn vocab_single_token() {
        let c = Corpus::new(vec![vec![tok("bank", Some("A"))]]).unwrap();
        let v = build_vocab(&c).unwrap();
        assert_eq!(v.word_freq["bank"], 1);
        assert_eq!(v.sense_freq["A"], 1);
        assert_eq!(v.total_tokens, 1);
    }

    #[test]
    fn unannotated_token_counts_only_as_word() {
        let c = Corpus::new(vec![vec![tok("bank", Some("A")), tok("the", None)]]).unwrap();
        let v = build_vocab(&c).unwrap();
        assert_eq!(v.word_freq["the"], 1);
        assert_eq!(v.total_tokens, 2);
        assert_eq!(v.sense_freq.len(), 1);
    }

    #[test]
    fn empty_corpus_vocab_errors() {
        assert!(build_vocab(&Corpus::default()).is_err());
    }

    #[test]
    fn inventory_sorted_and_deduped() {
        let c =
            Corpus::new(vec![vec![tok("bank", Some("B")), tok("bank", Some("A")), tok("bank", Some("B"))]]).unwrap();
        let inv = build_inventory(&c).unwrap();
        assert_eq!(inv.candidates("bank", Pos::Noun).unwrap(), ["A", "B"]);
        assert_eq!(inv.len(), 1);
    }

    #[test]
    fn inventory_requires_annotation() {
        let c = Corpus::new(vec![vec![tok("the", None)]]).unwrap();
        assert!(build_inventory(&c).is_err());
    }

    #[test]
    fn gold_mfs_argmax_and_tie() {
        let c = Corpus::new(vec![vec![
            tok("x", Some("A")),
            tok("x", Some("A")),
            tok("x", Some("A")),
            tok("x", Some("B")),
            tok("y", Some("D")),
            tok("y", Some("C")),
            tok("y", Some("D")),
            tok("y", Some("C")),
        ]])
        .unwrap();
        let g = gold_mfs(&c).unwrap();
        let x = &g[&WordKey::new("x", Pos::Noun)];
        assert_eq!((x.sense.as_str(), x.tied), ("A", false));
        let y = &g[&WordKey::new("y", Pos::Noun)];
        assert_eq!((y.sense.as_str(), y.tied), ("C", true));
    }

    #[test]
    fn inventory_file_round_trip() {
        let inv = SenseInventory::from_entries(vec![
            (WordKey::new("bank", Pos::Noun), vec!["b2", "b1"]),
            (WordKey::new("run", Pos::Verb), vec!["r1"]),
        ])
        .unwrap();
        let mut buf = Vec::new();
        inv.write(&mut buf).unwrap();
        assert_eq!(SenseInventory::read(buf.as_slice()).unwrap(), inv);
    }
}
