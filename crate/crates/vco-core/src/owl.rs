//! OWL 2 serialization of a taxonomy, in Turtle syntax: one OWL class
//! per taxonomy class, one named individual per linked synset, and the
//! class-to-synset anchors asserted through two annotation properties,
//! `equivalenceOf` and `superClassOf`. Annotation properties (rather
//! than object properties) keep the individual-to-class assertions
//! outside OWL DL's punning restrictions while staying queryable.
//!
//! Serialization order is fixed — prefixes, ontology header, property
//! declarations, classes by slug, individuals by offset — so identical
//! inputs produce byte-identical documents.

use std::collections::HashSet;

use rio_api::model::{Subject, Term, Triple};
use rio_api::parser::TriplesParser;
use rio_turtle::{TurtleError, TurtleParser};
use thiserror::Error;

use crate::taxonomy::{validate_taxonomy, LinkKind, Taxonomy, Violation};
use crate::wordnet::{SynsetId, WordNetGraph};

#[derive(Debug, Error)]
pub enum OwlError {
    #[error("taxonomy has {} validation violation(s), first: {}", .violations.len(), first_violation(.violations))]
    InvalidTaxonomy { violations: Vec<Violation> },
    #[error("invalid ontology IRI {iri:?}: {reason}")]
    InvalidIri { iri: String, reason: String },
    #[error("linked synset {0} is not in the graph")]
    UnknownSynset(SynsetId),
    #[error("cannot parse Turtle document: {0}")]
    Parse(String),
}

fn first_violation(violations: &[Violation]) -> String {
    violations
        .first()
        .map(|v| format!("{} ({})", v.kind, v.detail))
        .unwrap_or_default()
}

/// Entity counts read back from a serialized document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OwlCounts {
    pub classes: usize,
    pub individuals: usize,
    pub links: usize,
}

/// Serializes the taxonomy and its linked synsets as OWL 2 Turtle.
///
/// The taxonomy must validate with zero violations, and the ontology IRI
/// must be an absolute IRI without a fragment (the export appends its
/// own `#class-<slug>` / `#syn-<synset>` fragments).
pub fn export_owl(
    taxonomy: &Taxonomy,
    graph: &WordNetGraph,
    ontology_iri: &str,
) -> Result<String, OwlError> {
    let report = validate_taxonomy(taxonomy);
    if !report.is_valid() {
        return Err(OwlError::InvalidTaxonomy {
            violations: report.violations,
        });
    }
    let iri = oxiri::Iri::parse(ontology_iri).map_err(|e| OwlError::InvalidIri {
        iri: ontology_iri.to_string(),
        reason: e.to_string(),
    })?;
    if ontology_iri.contains('#') {
        return Err(OwlError::InvalidIri {
            iri: ontology_iri.to_string(),
            reason: "must not already contain a fragment".into(),
        });
    }
    let iri = iri.as_str();

    let mut out = String::new();
    out.push_str("@prefix owl: <http://www.w3.org/2002/07/owl#> .\n");
    out.push_str("@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n");
    out.push('\n');
    out.push_str(&format!("<{iri}> a owl:Ontology .\n"));
    out.push('\n');
    out.push_str(&format!(
        "<{iri}#equivalenceOf> a owl:AnnotationProperty .\n"
    ));
    out.push('\n');
    out.push_str(&format!(
        "<{iri}#superClassOf> a owl:AnnotationProperty .\n"
    ));

    // Classes, slug-ascending; subclass axioms mirror parent edges and
    // nothing else.
    for class in taxonomy.classes() {
        out.push('\n');
        out.push_str(&format!("<{iri}#class-{}> a owl:Class ;\n", class.id));
        match &class.parent {
            Some(parent) => {
                out.push_str(&format!(
                    "    rdfs:label \"{}\" ;\n",
                    escape_literal(&class.label)
                ));
                out.push_str(&format!("    rdfs:subClassOf <{iri}#class-{parent}> .\n"));
            }
            None => {
                out.push_str(&format!(
                    "    rdfs:label \"{}\" .\n",
                    escape_literal(&class.label)
                ));
            }
        }
    }

    // Individuals: one per distinct linked synset, offset-ascending, each
    // carrying its display lemma, its gloss, and its link assertions.
    for synset_id in taxonomy.linked_synsets() {
        let synset = graph
            .get(synset_id)
            .ok_or(OwlError::UnknownSynset(synset_id))?;
        out.push('\n');
        out.push_str(&format!(
            "<{iri}#syn-{synset_id}> a owl:NamedIndividual ;\n"
        ));
        out.push_str(&format!(
            "    rdfs:label \"{}\" ;\n",
            escape_literal(synset.first_lemma())
        ));
        out.push_str(&format!(
            "    rdfs:comment \"{}\"",
            escape_literal(&synset.gloss)
        ));
        let mut links: Vec<(LinkKind, &str)> = taxonomy
            .links_for_synset(synset_id)
            .map(|l| (l.kind, l.class.as_str()))
            .collect();
        links.sort();
        for (kind, class) in links {
            out.push_str(" ;\n");
            out.push_str(&format!("    <{iri}#{kind}> <{iri}#class-{class}>"));
        }
        out.push_str(" .\n");
    }

    Ok(out)
}

fn escape_literal(s: &str) -> String {
    let mut escaped = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => escaped.push_str("\\\\"),
            '"' => escaped.push_str("\\\""),
            '\n' => escaped.push_str("\\n"),
            '\r' => escaped.push_str("\\r"),
            '\t' => escaped.push_str("\\t"),
            other => escaped.push(other),
        }
    }
    escaped
}

/// Parses a Turtle document (with an independent parser, not this
/// module's writer) and counts the OWL classes, named individuals, and
/// link assertions it declares. Failing to parse means the document is
/// not well-formed Turtle.
pub fn count_owl_entities(document: &str) -> Result<OwlCounts, OwlError> {
    const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
    const OWL_INDIVIDUAL: &str = "http://www.w3.org/2002/07/owl#NamedIndividual";

    let mut classes: HashSet<String> = HashSet::new();
    let mut individuals: HashSet<String> = HashSet::new();
    let mut links = 0usize;

    let mut parser = TurtleParser::new(document.as_bytes(), None);
    parser
        .parse_all(&mut |triple: Triple<'_>| -> Result<(), TurtleError> {
            if triple.predicate.iri == RDF_TYPE {
                if let (Subject::NamedNode(subject), Term::NamedNode(object)) =
                    (triple.subject, triple.object)
                {
                    if object.iri == OWL_CLASS {
                        classes.insert(subject.iri.to_string());
                    } else if object.iri == OWL_INDIVIDUAL {
                        individuals.insert(subject.iri.to_string());
                    }
                }
            } else if let Some((_, fragment)) = triple.predicate.iri.split_once('#') {
                if fragment == "equivalenceOf" || fragment == "superClassOf" {
                    links += 1;
                }
            }
            Ok(())
        })
        .map_err(|e: TurtleError| OwlError::Parse(e.to_string()))?;

    Ok(OwlCounts {
        classes: classes.len(),
        individuals: individuals.len(),
        links,
    })
}
