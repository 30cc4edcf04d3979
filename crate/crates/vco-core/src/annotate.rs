//! The two ontology applications: mapping free-text image keywords to
//! their covering taxonomy classes, and scoring an annotation vocabulary
//! against the metadata of visually similar images.
//!
//! Scoring is similarity-weighted voting: each neighbor image votes for
//! every concept matched by at least one of its keywords, with weight
//! equal to its visual similarity. The vote is binary per neighbor so a
//! verbose neighbor cannot outvote a close one, and all senses of an
//! ambiguous keyword contribute — rich annotations are expected to be
//! redundant enough to drown out stray senses. Raw vote totals are
//! divided by their maximum so the best concept always scores 1 and
//! score vectors stay comparable across queries (all-zero vectors stay
//! zero). Scores are relative relevance, not calibrated probabilities.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::taxonomy::{resolve_class, Level, Taxonomy, VcoClassId};
use crate::wordnet::{normalize_lemma, SynsetId, WordNetGraph};

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("duplicate vocabulary concept {0}")]
    DuplicateConcept(Concept),
    #[error("neighbor {image_id:?} has similarity {similarity} outside [0, 1]")]
    SimilarityOutOfRange { image_id: String, similarity: f64 },
    #[error("neighbor file must start with the header line \"#image_id\\tsimilarity\\tkeywords\"")]
    MissingHeader,
    #[error("malformed neighbor line {line}: {detail}")]
    MalformedLine { line: usize, detail: String },
    #[error("malformed vocabulary line {line}: {detail}")]
    MalformedConcept { line: usize, detail: String },
}

/// A vocabulary entry: either a plain word form (matched against
/// neighbor keywords by normalized equality or shared synset) or a
/// taxonomy class (matched when a keyword resolves to it).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Concept {
    Word(String),
    Class(VcoClassId),
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Word(w) => write!(f, "{w}"),
            Concept::Class(c) => write!(f, "class:{c}"),
        }
    }
}

/// The candidate concepts an image gets scored against. Entries are
/// unique; word entries are stored in normalized form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    concepts: Vec<Concept>,
}

impl Vocabulary {
    pub fn new(concepts: Vec<Concept>) -> Result<Self, AnnotateError> {
        let mut seen = HashSet::new();
        let mut normalized = Vec::with_capacity(concepts.len());
        for concept in concepts {
            let concept = match concept {
                Concept::Word(w) => Concept::Word(normalize_lemma(&w)),
                class => class,
            };
            if !seen.insert(concept.clone()) {
                return Err(AnnotateError::DuplicateConcept(concept));
            }
            normalized.push(concept);
        }
        Ok(Vocabulary {
            concepts: normalized,
        })
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }
}

/// One visually similar image: its identifier, its visual similarity to
/// the query image, and its keyword metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageRecord {
    pub image_id: String,
    pub similarity: f64,
    pub keywords: Vec<String>,
}

/// Scores for every vocabulary concept, in vocabulary iteration order
/// under the concept ordering. `scores` are max-normalized to [0, 1];
/// `raw_evidence` keeps the additive pre-normalization vote totals,
/// which is what monotonicity arguments are about.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnotationResult {
    pub scores: BTreeMap<Concept, f64>,
    pub raw_evidence: BTreeMap<Concept, f64>,
}

/// The covering classes of one keyword list: per class, the normalized
/// keywords supporting it; keywords resolving to no class end up in
/// `unmapped` (first-occurrence order, deduplicated).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoverageResult {
    pub covering: Vec<(VcoClassId, BTreeSet<String>)>,
    pub unmapped: Vec<String>,
}

/// Maps free-text keywords to the taxonomy classes covering them: each
/// keyword is normalized, looked up, and every sense resolved to its
/// nearest linked ancestors; the union of those classes covers the
/// keyword. Multiword keywords are tried whole (underscore-joined) and
/// never token-split — splitting would invent senses the annotator
/// didn't mean.
pub fn map_keywords<S: AsRef<str>>(
    graph: &WordNetGraph,
    taxonomy: &Taxonomy,
    keywords: &[S],
) -> CoverageResult {
    let mut covering: BTreeMap<VcoClassId, BTreeSet<String>> = BTreeMap::new();
    let mut unmapped: Vec<String> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for keyword in keywords {
        let keyword = normalize_lemma(keyword.as_ref());
        if keyword.is_empty() || !seen.insert(keyword.clone()) {
            continue;
        }
        let classes = keyword_classes(graph, taxonomy, &keyword);
        if classes.is_empty() {
            unmapped.push(keyword);
        } else {
            for class in classes {
                covering.entry(class).or_default().insert(keyword.clone());
            }
        }
    }
    CoverageResult {
        covering: covering.into_iter().collect(),
        unmapped,
    }
}

/// Union of the covering classes over all senses of one normalized
/// keyword; empty when the keyword has no senses or no linked ancestor.
fn keyword_classes(
    graph: &WordNetGraph,
    taxonomy: &Taxonomy,
    keyword: &str,
) -> BTreeSet<VcoClassId> {
    let mut classes = BTreeSet::new();
    for &sense in graph.lookup_lemma(keyword) {
        // The sense comes from the lemma index, so it cannot be unknown.
        classes.extend(resolve_class(taxonomy, graph, sense).unwrap());
    }
    classes
}

/// Scores every vocabulary concept against the neighbor images.
pub fn annotate(
    neighbors: &[ImageRecord],
    vocabulary: &Vocabulary,
    graph: &WordNetGraph,
    taxonomy: &Taxonomy,
) -> Result<AnnotationResult, AnnotateError> {
    if vocabulary.is_empty() {
        return Err(AnnotateError::EmptyVocabulary);
    }
    for neighbor in neighbors {
        if !neighbor.similarity.is_finite()
            || neighbor.similarity < 0.0
            || neighbor.similarity > 1.0
        {
            return Err(AnnotateError::SimilarityOutOfRange {
                image_id: neighbor.image_id.clone(),
                similarity: neighbor.similarity,
            });
        }
    }

    // Senses of the word concepts, computed once.
    let word_senses: HashMap<&str, HashSet<SynsetId>> = vocabulary
        .concepts()
        .iter()
        .filter_map(|c| match c {
            Concept::Word(w) => Some((w.as_str(), graph.lookup_lemma(w).iter().copied().collect())),
            Concept::Class(_) => None,
        })
        .collect();

    let mut raw: BTreeMap<Concept, f64> = vocabulary
        .concepts()
        .iter()
        .map(|c| (c.clone(), 0.0))
        .collect();

    // Resolve every distinct keyword once up front: keyword lists repeat
    // heavily across neighbors in real metadata.
    let mut keyword_cache: HashMap<String, (HashSet<SynsetId>, BTreeSet<VcoClassId>)> =
        HashMap::new();
    for neighbor in neighbors {
        for keyword in &neighbor.keywords {
            let keyword = normalize_lemma(keyword);
            if keyword.is_empty() || keyword_cache.contains_key(&keyword) {
                continue;
            }
            let senses = graph.lookup_lemma(&keyword).iter().copied().collect();
            let classes = keyword_classes(graph, taxonomy, &keyword);
            keyword_cache.insert(keyword, (senses, classes));
        }
    }

    for neighbor in neighbors {
        let keywords: BTreeSet<String> = neighbor
            .keywords
            .iter()
            .map(|k| normalize_lemma(k))
            .filter(|k| !k.is_empty())
            .collect();
        for (concept, evidence) in raw.iter_mut() {
            let matched = match concept {
                Concept::Word(word) => {
                    keywords.contains(word)
                        || keywords
                            .iter()
                            .any(|k| !word_senses[word.as_str()].is_disjoint(&keyword_cache[k].0))
                }
                Concept::Class(class) => {
                    keywords.iter().any(|k| keyword_cache[k].1.contains(class))
                }
            };
            if matched {
                *evidence += neighbor.similarity;
            }
        }
    }

    let max = raw.values().fold(0.0_f64, |acc, &v| acc.max(v));
    let scores = raw
        .iter()
        .map(|(c, &v)| (c.clone(), if max > 0.0 { v / max } else { 0.0 }))
        .collect();
    Ok(AnnotationResult {
        scores,
        raw_evidence: raw,
    })
}

/// Lifts class scores to the requested taxonomy level: a class at that
/// level reports the maximum score found anywhere in its subtree (itself
/// included). Classes whose subtree holds no scored concept are left
/// out, so an empty result stays empty. Sorted by descending score,
/// slug-ascending on ties. Word concepts have no place in the class
/// tree and are ignored.
pub fn hierarchical_report(
    result: &AnnotationResult,
    taxonomy: &Taxonomy,
    level: Level,
) -> Vec<(VcoClassId, f64)> {
    let mut report: Vec<(VcoClassId, f64)> = taxonomy
        .classes()
        .filter(|class| class.level == level)
        .filter_map(|class| {
            let mut best: Option<f64> = None;
            let mut stack = vec![class.id.clone()];
            while let Some(id) = stack.pop() {
                if let Some(&score) = result.scores.get(&Concept::Class(id.clone())) {
                    best = Some(best.map_or(score, |b: f64| b.max(score)));
                }
                stack.extend(taxonomy.children(&id).map(|c| c.id.clone()));
            }
            best.map(|score| (class.id.clone(), score))
        })
        .collect();
    report.sort_by(|(a_id, a), (b_id, b)| b.partial_cmp(a).unwrap().then_with(|| a_id.cmp(b_id)));
    report
}

/// Header required at the top of a neighbor metadata file.
pub const NEIGHBOR_HEADER: &str = "#image_id\tsimilarity\tkeywords";

/// Parses neighbor metadata: a required header line, then one
/// tab-separated record per line — image id, decimal similarity,
/// semicolon-separated keywords (the keyword field may be empty). Blank
/// lines and further `#` comment lines are skipped.
pub fn parse_neighbors(input: &str) -> Result<Vec<ImageRecord>, AnnotateError> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == NEIGHBOR_HEADER => {}
        _ => return Err(AnnotateError::MissingHeader),
    }
    let mut records = Vec::new();
    for (index, line) in lines {
        let line_no = index + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let image_id = fields.next().unwrap_or_default().trim();
        let similarity = fields.next().ok_or_else(|| AnnotateError::MalformedLine {
            line: line_no,
            detail: "missing similarity field".into(),
        })?;
        let keywords = fields.next().unwrap_or("");
        if fields.next().is_some() {
            return Err(AnnotateError::MalformedLine {
                line: line_no,
                detail: "more than three tab-separated fields".into(),
            });
        }
        if image_id.is_empty() {
            return Err(AnnotateError::MalformedLine {
                line: line_no,
                detail: "empty image id".into(),
            });
        }
        let similarity: f64 =
            similarity
                .trim()
                .parse()
                .map_err(|e| AnnotateError::MalformedLine {
                    line: line_no,
                    detail: format!("similarity is not a number: {e}"),
                })?;
        if !similarity.is_finite() || !(0.0..=1.0).contains(&similarity) {
            return Err(AnnotateError::SimilarityOutOfRange {
                image_id: image_id.to_string(),
                similarity,
            });
        }
        records.push(ImageRecord {
            image_id: image_id.to_string(),
            similarity,
            keywords: keywords
                .split(';')
                .map(str::trim)
                .filter(|k| !k.is_empty())
                .map(str::to_string)
                .collect(),
        });
    }
    Ok(records)
}

/// Parses a vocabulary: one concept per line — `class:<slug>` for a
/// taxonomy class, anything else a word form. Blank lines and `#`
/// comments are skipped; duplicates (after word normalization) are an
/// error.
pub fn parse_vocabulary(input: &str) -> Result<Vocabulary, AnnotateError> {
    let mut concepts = Vec::new();
    for (index, line) in input.lines().enumerate() {
        let line_no = index + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let concept = match line.strip_prefix("class:") {
            Some(slug) => Concept::Class(VcoClassId::new(slug.trim()).map_err(|e| {
                AnnotateError::MalformedConcept {
                    line: line_no,
                    detail: e.to_string(),
                }
            })?),
            None => Concept::Word(normalize_lemma(line)),
        };
        concepts.push(concept);
    }
    let mut seen = HashSet::new();
    for concept in &concepts {
        if !seen.insert(concept) {
            return Err(AnnotateError::DuplicateConcept(concept.clone()));
        }
    }
    Vocabulary::new(concepts)
}
