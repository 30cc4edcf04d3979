//! Loading and querying the WordNet 3.0 noun database.
//!
//! The noun hierarchy is a DAG, not a tree: synsets may have several
//! hypernyms. The loader enforces the structural invariants the rest of
//! the toolkit relies on — exactly one root (`entity`), acyclic hypernym
//! relation, mirror-symmetric pointers, and a lemma index that covers
//! every word of every synset in both directions.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Identifier of a noun synset. Only nouns are in scope, so the part of
/// speech is fixed and the identifier is just the database offset,
/// rendered as `n<offset>` (e.g. `n00001740`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SynsetId(u32);

impl SynsetId {
    pub fn new(offset: u32) -> Self {
        SynsetId(offset)
    }

    pub fn offset(self) -> u32 {
        self.0
    }

    /// Parses the `n<offset>` notation used by manifests and reports.
    /// The offset must be exactly eight digits, as in the database files.
    pub fn parse(s: &str) -> Result<Self, InvalidSynsetRef> {
        let digits = s
            .strip_prefix('n')
            .ok_or_else(|| InvalidSynsetRef(s.to_string()))?;
        if digits.len() != 8 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(InvalidSynsetRef(s.to_string()));
        }
        // Eight digits always fit in u32.
        Ok(SynsetId(digits.parse().unwrap()))
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{:08}", self.0)
    }
}

#[derive(Debug, Error)]
#[error("invalid synset reference {0:?}: expected n<8-digit offset>")]
pub struct InvalidSynsetRef(pub String);

#[derive(Debug, Error)]
#[error("unknown synset {0}")]
pub struct UnknownSynset(pub SynsetId);

/// One noun synset: its word forms (file order, first one is the display
/// form), gloss, and the pointer sets the toolkit consumes. Pointers are
/// split by direction: hypernym/holonym point up, hyponym/meronym point
/// down. Instance edges are kept separate so callers can tell a named
/// individual (a specific river) from a type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synset {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub gloss: String,
    pub hypernyms: Vec<SynsetId>,
    pub instance_hypernyms: Vec<SynsetId>,
    pub hyponyms: Vec<SynsetId>,
    pub instance_hyponyms: Vec<SynsetId>,
    /// Part/member/substance meronyms: synsets that are parts of this one.
    pub meronyms: Vec<SynsetId>,
    /// Part/member/substance holonyms: synsets this one is a part of.
    pub holonyms: Vec<SynsetId>,
}

impl Synset {
    /// Hypernym and instance-hypernym targets, in file order.
    pub fn all_hypernyms(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.hypernyms
            .iter()
            .chain(&self.instance_hypernyms)
            .copied()
    }

    /// Hyponym and instance-hyponym targets, in file order.
    pub fn all_hyponyms(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.hyponyms.iter().chain(&self.instance_hyponyms).copied()
    }

    /// Every edge that leads to a narrower or contained concept:
    /// hyponyms, instance hyponyms, and meronyms. This is the edge set
    /// the descendant analytics traverse.
    pub fn downward_edges(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.all_hyponyms().chain(self.meronyms.iter().copied())
    }

    /// The display form: the first word of the synset as written in the
    /// database (case and underscores preserved).
    pub fn first_lemma(&self) -> &str {
        &self.lemmas[0]
    }
}

/// Normalizes a word form the way the lemma index is keyed: trimmed,
/// ASCII-lowercased, spaces mapped to underscores. No stemming.
pub fn normalize_lemma(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace(' ', "_")
}

#[derive(Debug, Error)]
pub enum WordNetError {
    #[error("missing database file {path}: {source}")]
    MissingFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: malformed {field}: {detail}")]
    MalformedLine {
        file: String,
        line: usize,
        field: &'static str,
        detail: String,
    },
    #[error("{file}:{line}: pointer target n{target:08} does not exist")]
    DanglingPointer {
        file: String,
        line: usize,
        target: u32,
    },
    #[error("cyclic hypernym chain involving n{offset:08}")]
    CyclicHypernymChain { offset: u32 },
    #[error("noun hierarchy must have exactly one root, found {count} (zero or multiple roots)")]
    RootCount { count: usize },
    #[error("{relation} pointer n{from:08} -> n{to:08} has no mirror pointer")]
    AsymmetricPointer {
        relation: &'static str,
        from: u32,
        to: u32,
    },
    #[error("lemma index does not cover word {lemma:?} of synset n{offset:08}")]
    IndexIncomplete { lemma: String, offset: u32 },
}

/// The loaded noun database: synsets by offset, the sense-ordered lemma
/// index, and the unique root. Immutable after loading; safe to share
/// across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct WordNetGraph {
    synsets: BTreeMap<u32, Synset>,
    lemma_index: HashMap<String, Vec<SynsetId>>,
    root: SynsetId,
}

impl WordNetGraph {
    pub fn root(&self) -> SynsetId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    /// Number of distinct normalized lemmas in the index.
    pub fn lemma_count(&self) -> usize {
        self.lemma_index.len()
    }

    pub fn contains(&self, id: SynsetId) -> bool {
        self.synsets.contains_key(&id.offset())
    }

    pub fn get(&self, id: SynsetId) -> Option<&Synset> {
        self.synsets.get(&id.offset())
    }

    pub fn synset(&self, id: SynsetId) -> Result<&Synset, UnknownSynset> {
        self.get(id).ok_or(UnknownSynset(id))
    }

    /// All synsets in ascending offset order.
    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    /// All synsets containing the lemma, in WordNet sense order (most
    /// frequent sense first). The query is normalized; an unknown lemma
    /// yields an empty slice, not an error.
    pub fn lookup_lemma(&self, lemma: &str) -> &[SynsetId] {
        self.lemma_index
            .get(&normalize_lemma(lemma))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Every maximal hypernym path from `id` up to the root, inclusive of
    /// both endpoints. Because the hierarchy has exactly one root, every
    /// maximal path ends there. Paths are returned in lexicographic order
    /// of their offset sequences.
    pub fn hypernym_paths(&self, id: SynsetId) -> Result<Vec<Vec<SynsetId>>, UnknownSynset> {
        self.synset(id)?;
        let mut paths = Vec::new();
        let mut current = vec![id];
        self.collect_paths(id, &mut current, &mut paths);
        Ok(paths)
    }

    fn collect_paths(
        &self,
        at: SynsetId,
        current: &mut Vec<SynsetId>,
        out: &mut Vec<Vec<SynsetId>>,
    ) {
        let synset = &self.synsets[&at.offset()];
        let mut parents: Vec<SynsetId> = synset.all_hypernyms().collect();
        if parents.is_empty() {
            out.push(current.clone());
            return;
        }
        parents.sort();
        parents.dedup();
        for parent in parents {
            current.push(parent);
            self.collect_paths(parent, current, out);
            current.pop();
        }
    }

    /// Validates every structural invariant and fixes the root. Shared by
    /// the file loader and the programmatic builder. `lines` maps offsets
    /// to source line numbers for error reporting (empty for built graphs).
    fn finish(
        synsets: BTreeMap<u32, Synset>,
        lemma_index: HashMap<String, Vec<SynsetId>>,
        file: &str,
        lines: &HashMap<u32, usize>,
    ) -> Result<Self, WordNetError> {
        // Dangling pointers: every kept pointer must resolve.
        for synset in synsets.values() {
            let targets = synset
                .all_hypernyms()
                .chain(synset.all_hyponyms())
                .chain(synset.meronyms.iter().copied())
                .chain(synset.holonyms.iter().copied());
            for target in targets {
                if !synsets.contains_key(&target.offset()) {
                    return Err(WordNetError::DanglingPointer {
                        file: file.to_string(),
                        line: lines.get(&synset.id.offset()).copied().unwrap_or(0),
                        target: target.offset(),
                    });
                }
            }
        }

        // Pointer symmetry, per relation kind.
        type MirrorOf = fn(&Synset) -> &Vec<SynsetId>;
        for synset in synsets.values() {
            let mirrors: [(&str, &Vec<SynsetId>, MirrorOf); 6] = [
                ("hypernym", &synset.hypernyms, |s| &s.hyponyms),
                ("hyponym", &synset.hyponyms, |s| &s.hypernyms),
                ("instance hypernym", &synset.instance_hypernyms, |s| {
                    &s.instance_hyponyms
                }),
                ("instance hyponym", &synset.instance_hyponyms, |s| {
                    &s.instance_hypernyms
                }),
                ("holonym", &synset.holonyms, |s| &s.meronyms),
                ("meronym", &synset.meronyms, |s| &s.holonyms),
            ];
            for (relation, edges, mirror_of) in mirrors {
                for &target in edges {
                    if !mirror_of(&synsets[&target.offset()]).contains(&synset.id) {
                        return Err(WordNetError::AsymmetricPointer {
                            relation,
                            from: synset.id.offset(),
                            to: target.offset(),
                        });
                    }
                }
            }
        }

        // Unique root: exactly one synset with no upward type edge.
        let roots: Vec<u32> = synsets
            .values()
            .filter(|s| s.hypernyms.is_empty() && s.instance_hypernyms.is_empty())
            .map(|s| s.id.offset())
            .collect();
        if roots.len() != 1 {
            return Err(WordNetError::RootCount { count: roots.len() });
        }
        let root = SynsetId::new(roots[0]);

        // Acyclicity of the hypernym relation (Kahn's algorithm over
        // child -> parent edges).
        let mut indegree: HashMap<u32, usize> = synsets.keys().map(|&o| (o, 0)).collect();
        for synset in synsets.values() {
            for parent in synset.all_hypernyms() {
                *indegree.get_mut(&parent.offset()).unwrap() += 1;
            }
        }
        let mut queue: VecDeque<u32> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&o, _)| o)
            .collect();
        let mut processed = 0usize;
        while let Some(offset) = queue.pop_front() {
            processed += 1;
            for parent in synsets[&offset].all_hypernyms() {
                let d = indegree.get_mut(&parent.offset()).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push_back(parent.offset());
                }
            }
        }
        if processed != synsets.len() {
            let stuck = synsets
                .keys()
                .find(|o| indegree[o] > 0)
                .copied()
                .unwrap_or(0);
            return Err(WordNetError::CyclicHypernymChain { offset: stuck });
        }

        // Index completeness, data -> index direction: every word of every
        // synset must be findable. The index -> data direction is checked
        // while the index is read.
        for synset in synsets.values() {
            for lemma in &synset.lemmas {
                let normalized = normalize_lemma(lemma);
                let covered = lemma_index
                    .get(&normalized)
                    .is_some_and(|ids| ids.contains(&synset.id));
                if !covered {
                    return Err(WordNetError::IndexIncomplete {
                        lemma: lemma.clone(),
                        offset: synset.id.offset(),
                    });
                }
            }
        }

        Ok(WordNetGraph {
            synsets,
            lemma_index,
            root,
        })
    }
}

/// Loads `data.noun` and `index.noun` from a WordNet 3.0 `dict` directory
/// and returns the validated graph.
pub fn load_wordnet(dir: impl AsRef<Path>) -> Result<WordNetGraph, WordNetError> {
    let dir = dir.as_ref();
    let data_path = dir.join("data.noun");
    let index_path = dir.join("index.noun");

    let data_text = fs::read_to_string(&data_path).map_err(|source| WordNetError::MissingFile {
        path: data_path.clone(),
        source,
    })?;
    let index_text =
        fs::read_to_string(&index_path).map_err(|source| WordNetError::MissingFile {
            path: index_path.clone(),
            source,
        })?;

    let mut synsets = BTreeMap::new();
    let mut lines = HashMap::new();
    for (number, raw) in data_text.lines().enumerate() {
        let number = number + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        // License header lines start with whitespace; blank lines are
        // tolerated at the end of hand-edited files.
        if line.is_empty() || line.starts_with(' ') || line.starts_with('\t') {
            continue;
        }
        let synset = parse_data_line("data.noun", number, line)?;
        let offset = synset.id.offset();
        if synsets.insert(offset, synset).is_some() {
            return Err(WordNetError::MalformedLine {
                file: "data.noun".into(),
                line: number,
                field: "synset_offset",
                detail: format!("duplicate synset offset {offset:08}"),
            });
        }
        lines.insert(offset, number);
    }

    let mut lemma_index: HashMap<String, Vec<SynsetId>> = HashMap::new();
    for (number, raw) in index_text.lines().enumerate() {
        let number = number + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() || line.starts_with(' ') || line.starts_with('\t') {
            continue;
        }
        let (lemma, ids) = parse_index_line("index.noun", number, line)?;
        // Index -> data direction of the completeness invariant: every
        // listed sense must exist and actually contain the lemma.
        for id in &ids {
            let synset = synsets
                .get(&id.offset())
                .ok_or(WordNetError::DanglingPointer {
                    file: "index.noun".into(),
                    line: number,
                    target: id.offset(),
                })?;
            let has_word = synset
                .lemmas
                .iter()
                .any(|w| normalize_lemma(w) == normalize_lemma(&lemma));
            if !has_word {
                return Err(WordNetError::MalformedLine {
                    file: "index.noun".into(),
                    line: number,
                    field: "synset_offset",
                    detail: format!("synset {id} does not contain lemma {lemma:?}"),
                });
            }
        }
        let key = normalize_lemma(&lemma);
        if lemma_index.insert(key, ids).is_some() {
            return Err(WordNetError::MalformedLine {
                file: "index.noun".into(),
                line: number,
                field: "lemma",
                detail: format!("duplicate index entry for {lemma:?}"),
            });
        }
    }

    WordNetGraph::finish(synsets, lemma_index, "data.noun", &lines)
}

/// Token cursor over one database line, producing field-labelled errors.
struct Fields<'a> {
    tokens: std::str::SplitWhitespace<'a>,
    file: &'static str,
    line: usize,
}

impl<'a> Fields<'a> {
    fn new(file: &'static str, line: usize, text: &'a str) -> Self {
        Fields {
            tokens: text.split_whitespace(),
            file,
            line,
        }
    }

    fn error(&self, field: &'static str, detail: impl Into<String>) -> WordNetError {
        WordNetError::MalformedLine {
            file: self.file.into(),
            line: self.line,
            field,
            detail: detail.into(),
        }
    }

    fn next(&mut self, field: &'static str) -> Result<&'a str, WordNetError> {
        self.tokens
            .next()
            .ok_or_else(|| self.error(field, "unexpected end of line"))
    }

    fn next_u32(&mut self, field: &'static str, radix: u32) -> Result<u32, WordNetError> {
        let tok = self.next(field)?;
        u32::from_str_radix(tok, radix)
            .map_err(|e| self.error(field, format!("cannot parse {tok:?}: {e}")))
    }

    fn next_offset(&mut self, field: &'static str) -> Result<u32, WordNetError> {
        let tok = self.next(field)?;
        if tok.len() != 8 || !tok.bytes().all(|b| b.is_ascii_digit()) {
            return Err(self.error(field, format!("expected 8-digit offset, got {tok:?}")));
        }
        Ok(tok.parse().unwrap())
    }

    fn finish(mut self, field: &'static str) -> Result<(), WordNetError> {
        match self.tokens.next() {
            Some(tok) => Err(self.error(field, format!("unexpected trailing token {tok:?}"))),
            None => Ok(()),
        }
    }
}

fn parse_data_line(file: &'static str, number: usize, line: &str) -> Result<Synset, WordNetError> {
    let (left, gloss) = line.split_once('|').ok_or(WordNetError::MalformedLine {
        file: file.into(),
        line: number,
        field: "gloss",
        detail: "missing `|` gloss separator".into(),
    })?;
    let mut fields = Fields::new(file, number, left);

    let offset = fields.next_offset("synset_offset")?;
    let _lex_filenum = fields.next_u32("lex_filenum", 10)?;
    let ss_type = fields.next("ss_type")?;
    if ss_type != "n" {
        return Err(fields.error(
            "ss_type",
            format!("expected noun type `n`, got {ss_type:?}"),
        ));
    }

    let w_cnt = fields.next_u32("w_cnt", 16)?;
    if w_cnt == 0 {
        return Err(fields.error("w_cnt", "synset must contain at least one word"));
    }
    let mut lemmas = Vec::with_capacity(w_cnt as usize);
    for _ in 0..w_cnt {
        let word = fields.next("word")?;
        lemmas.push(word.to_string());
        let _lex_id = fields.next_u32("lex_id", 16)?;
    }

    let p_cnt = fields.next_u32("p_cnt", 10)?;
    let mut synset = Synset {
        id: SynsetId::new(offset),
        lemmas,
        gloss: gloss.trim().to_string(),
        hypernyms: Vec::new(),
        instance_hypernyms: Vec::new(),
        hyponyms: Vec::new(),
        instance_hyponyms: Vec::new(),
        meronyms: Vec::new(),
        holonyms: Vec::new(),
    };
    for _ in 0..p_cnt {
        let symbol = fields.next("pointer_symbol")?;
        let target = fields.next_offset("pointer_offset")?;
        let pos = fields.next("pointer_pos")?;
        if !matches!(pos, "n" | "v" | "a" | "s" | "r") {
            return Err(fields.error("pointer_pos", format!("unknown part of speech {pos:?}")));
        }
        let source_target = fields.next("pointer_source_target")?;
        if source_target.len() != 4 || !source_target.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(fields.error(
                "pointer_source_target",
                format!("expected 4 hex digits, got {source_target:?}"),
            ));
        }
        if pos != "n" {
            // Cross-part-of-speech pointers (derivations etc.) are out of
            // scope for the noun hierarchy.
            continue;
        }
        let target = SynsetId::new(target);
        match symbol {
            "@" => synset.hypernyms.push(target),
            "@i" => synset.instance_hypernyms.push(target),
            "~" => synset.hyponyms.push(target),
            "~i" => synset.instance_hyponyms.push(target),
            "%p" | "%m" | "%s" => synset.meronyms.push(target),
            "#p" | "#m" | "#s" => synset.holonyms.push(target),
            other => {
                log::debug!("{file}:{number}: ignoring pointer symbol {other:?}");
            }
        }
    }
    fields.finish("line_tail")?;
    Ok(synset)
}

fn parse_index_line(
    file: &'static str,
    number: usize,
    line: &str,
) -> Result<(String, Vec<SynsetId>), WordNetError> {
    let mut fields = Fields::new(file, number, line);
    let lemma = fields.next("lemma")?.to_string();
    let pos = fields.next("pos")?;
    if pos != "n" {
        return Err(fields.error("pos", format!("expected noun entry `n`, got {pos:?}")));
    }
    let synset_cnt = fields.next_u32("synset_cnt", 10)?;
    if synset_cnt == 0 {
        return Err(fields.error("synset_cnt", "entry must list at least one synset"));
    }
    let p_cnt = fields.next_u32("p_cnt", 10)?;
    for _ in 0..p_cnt {
        fields.next("ptr_symbol")?;
    }
    let _sense_cnt = fields.next_u32("sense_cnt", 10)?;
    let _tagsense_cnt = fields.next_u32("tagsense_cnt", 10)?;
    let mut ids = Vec::with_capacity(synset_cnt as usize);
    for _ in 0..synset_cnt {
        ids.push(SynsetId::new(fields.next_offset("synset_offset")?));
    }
    fields.finish("line_tail")?;
    Ok((lemma, ids))
}

/// Programmatic graph construction with the same validation as the file
/// loader. Mirror pointers are derived automatically: declaring a
/// hypernym edge creates the matching hyponym edge, declaring a part
/// creates the holonym edge.
///
/// Useful for tests and for callers that synthesize hierarchies instead
/// of loading database files.
#[derive(Default)]
pub struct GraphBuilder {
    synsets: BTreeMap<u32, Synset>,
    order: Vec<u32>,
    duplicate: Option<u32>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn synset(mut self, offset: u32, lemmas: &[&str], gloss: &str) -> Self {
        let synset = Synset {
            id: SynsetId::new(offset),
            lemmas: lemmas.iter().map(|s| s.to_string()).collect(),
            gloss: gloss.to_string(),
            hypernyms: Vec::new(),
            instance_hypernyms: Vec::new(),
            hyponyms: Vec::new(),
            instance_hyponyms: Vec::new(),
            meronyms: Vec::new(),
            holonyms: Vec::new(),
        };
        if self.synsets.insert(offset, synset).is_some() && self.duplicate.is_none() {
            self.duplicate = Some(offset);
        }
        self.order.push(offset);
        self
    }

    /// Declares `child` to be a hyponym of `parent`; the mirror edge is
    /// added automatically. Unknown offsets surface as dangling-pointer
    /// errors in [`GraphBuilder::build`].
    pub fn hypernym(mut self, child: u32, parent: u32) -> Self {
        if let Some(s) = self.synsets.get_mut(&child) {
            s.hypernyms.push(SynsetId::new(parent));
        }
        if let Some(s) = self.synsets.get_mut(&parent) {
            s.hyponyms.push(SynsetId::new(child));
        }
        self
    }

    /// Declares `part` to be a meronym of `whole` (mirrored as a holonym).
    pub fn part(mut self, whole: u32, part: u32) -> Self {
        if let Some(s) = self.synsets.get_mut(&whole) {
            s.meronyms.push(SynsetId::new(part));
        }
        if let Some(s) = self.synsets.get_mut(&part) {
            s.holonyms.push(SynsetId::new(whole));
        }
        self
    }

    pub fn build(self) -> Result<WordNetGraph, WordNetError> {
        if let Some(offset) = self.duplicate {
            return Err(WordNetError::MalformedLine {
                file: "<builder>".into(),
                line: 0,
                field: "synset_offset",
                detail: format!("duplicate synset offset {offset:08}"),
            });
        }
        let mut lemma_index: HashMap<String, Vec<SynsetId>> = HashMap::new();
        for &offset in &self.order {
            let synset = &self.synsets[&offset];
            for lemma in &synset.lemmas {
                let ids = lemma_index.entry(normalize_lemma(lemma)).or_default();
                if !ids.contains(&synset.id) {
                    ids.push(synset.id);
                }
            }
        }
        WordNetGraph::finish(self.synsets, lemma_index, "<builder>", &HashMap::new())
    }
}
