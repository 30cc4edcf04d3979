//! Core library of the Visual Concept Ontology (VCO) toolkit.
//!
//! The toolkit builds a compact, image-annotation-oriented concept
//! hierarchy on top of the WordNet noun database. The pieces, in the
//! order they feed each other:
//!
//! - [`wordnet`] loads the `data.noun` / `index.noun` database files
//!   into an in-memory graph and validates its structural invariants.
//! - [`analytics`] finds "significant" synsets — those with enough
//!   distinct descendants to anchor a visual category — and measures
//!   hypernym depth.
//! - [`manifest`] reads the TOML curation manifest that records the
//!   human decisions: which significant synsets become classes, which
//!   are removed as too abstract, which merge.
//! - [`taxonomy`] assembles the manifest into a three-level class tree
//!   linked back to synsets, resolves synsets to their covering
//!   classes, and validates the result.
//! - [`owl`] serializes a taxonomy as an OWL 2 document in Turtle
//!   syntax, and counts entities back out of one.
//! - [`annotate`] applies the ontology: mapping free-text keywords to
//!   covering classes and scoring annotation vocabularies against
//!   similar-image metadata.

pub mod analytics;
pub mod annotate;
pub mod manifest;
pub mod owl;
pub mod taxonomy;
pub mod wordnet;

pub use analytics::{depth_to_root, extract_significant, hyponym_count, SignificanceReport};
pub use annotate::{
    annotate, hierarchical_report, map_keywords, parse_neighbors, parse_vocabulary,
    AnnotationResult, Concept, CoverageResult, ImageRecord, Vocabulary,
};
pub use manifest::{load_manifest, parse_manifest, CurationManifest};
pub use owl::{count_owl_entities, export_owl, OwlCounts};
pub use taxonomy::{
    assemble_taxonomy, build_taxonomy, resolve_class, validate_taxonomy, Level, LinkKind, Taxonomy,
    VcoClassId,
};
pub use wordnet::{load_wordnet, normalize_lemma, GraphBuilder, SynsetId, WordNetGraph};
