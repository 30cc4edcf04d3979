//! The visual concept taxonomy: a three-level forest of classes (super,
//! top, sub) whose classes are anchored to synsets by `equivalenceOf`
//! and `superClassOf` links, plus the build step that assembles it from
//! a curation manifest and checks it against a significance report.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::analytics::SignificanceReport;
use crate::manifest::CurationManifest;
use crate::wordnet::{SynsetId, UnknownSynset, WordNetGraph};

/// Slug identifier of a taxonomy class: non-empty, lowercase ASCII
/// letters, digits, and hyphens.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VcoClassId(String);

impl VcoClassId {
    pub fn new(slug: &str) -> Result<Self, InvalidSlug> {
        let valid = !slug.is_empty()
            && slug
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-');
        if valid {
            Ok(VcoClassId(slug.to_string()))
        } else {
            Err(InvalidSlug(slug.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VcoClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error)]
#[error("invalid class slug {0:?}: expected lowercase letters, digits, and hyphens")]
pub struct InvalidSlug(pub String);

/// The three levels of the taxonomy, from the four broad super-classes
/// down to specific sub-classes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Level {
    Super,
    Top,
    Sub,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Super => "super",
            Level::Top => "top",
            Level::Sub => "sub",
        }
    }

    /// The level a parent of this level must have, if a parent is
    /// required at all.
    fn required_parent(self) -> Option<Level> {
        match self {
            Level::Super => None,
            Level::Top => Some(Level::Super),
            Level::Sub => Some(Level::Top),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcoClass {
    pub id: VcoClassId,
    pub label: String,
    pub level: Level,
    pub parent: Option<VcoClassId>,
}

/// How a class is anchored to a synset: semantically equal, or a broader
/// category that merely contains it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum LinkKind {
    EquivalenceOf,
    SuperClassOf,
}

impl LinkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::EquivalenceOf => "equivalenceOf",
            LinkKind::SuperClassOf => "superClassOf",
        }
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcoLink {
    pub class: VcoClassId,
    pub synset: SynsetId,
    pub kind: LinkKind,
}

/// An assembled taxonomy. Invariants (three strict levels, every class
/// linked, no duplicate links) are reported by [`validate_taxonomy`]
/// rather than enforced at construction, so that imperfect taxonomies
/// can be inspected instead of rejected.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Taxonomy {
    classes: BTreeMap<VcoClassId, VcoClass>,
    links: Vec<VcoLink>,
    by_synset: HashMap<SynsetId, Vec<usize>>,
}

impl Taxonomy {
    pub fn new(classes: Vec<VcoClass>, links: Vec<VcoLink>) -> Self {
        let classes = classes.into_iter().map(|c| (c.id.clone(), c)).collect();
        let mut by_synset: HashMap<SynsetId, Vec<usize>> = HashMap::new();
        for (i, link) in links.iter().enumerate() {
            by_synset.entry(link.synset).or_default().push(i);
        }
        Taxonomy {
            classes,
            links,
            by_synset,
        }
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn get(&self, id: &VcoClassId) -> Option<&VcoClass> {
        self.classes.get(id)
    }

    /// Classes in ascending slug order.
    pub fn classes(&self) -> impl Iterator<Item = &VcoClass> {
        self.classes.values()
    }

    pub fn links(&self) -> &[VcoLink] {
        &self.links
    }

    /// The links anchored at one synset, in declaration order.
    pub fn links_for_synset(&self, synset: SynsetId) -> impl Iterator<Item = &VcoLink> {
        self.by_synset
            .get(&synset)
            .into_iter()
            .flatten()
            .map(|&i| &self.links[i])
    }

    pub fn is_linked(&self, synset: SynsetId) -> bool {
        self.by_synset.contains_key(&synset)
    }

    /// Distinct linked synsets, ascending.
    pub fn linked_synsets(&self) -> BTreeSet<SynsetId> {
        self.links.iter().map(|l| l.synset).collect()
    }

    /// Direct children of a class, slug-ascending.
    pub fn children<'a>(&'a self, id: &'a VcoClassId) -> impl Iterator<Item = &'a VcoClass> + 'a {
        self.classes
            .values()
            .filter(move |c| c.parent.as_ref() == Some(id))
    }
}

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("manifest references unknown class {0:?}")]
    UnknownClass(String),
    #[error("manifest references synset {0} which is not in the graph")]
    UnknownSynset(SynsetId),
    #[error("duplicate class declaration {0}")]
    DuplicateClass(VcoClassId),
    #[error("class {class} has level {level} but its parent {parent} has level {parent_level}")]
    LevelConstraint {
        class: VcoClassId,
        level: Level,
        parent: VcoClassId,
        parent_level: Level,
    },
    #[error("{level}-level class {class} must {expected}")]
    ParentPresence {
        class: VcoClassId,
        level: Level,
        expected: &'static str,
    },
    #[error("synset {synset} is listed in removals but linked to class {class}")]
    RemovedButLinked { synset: SynsetId, class: VcoClassId },
    #[error("synset {0} is listed both in removals and in retained_abstract")]
    RemovedButRetained(SynsetId),
    #[error(
        "conflicting links for class {class} and synset {synset}: {existing} vs {conflicting}"
    )]
    ConflictingLinkKinds {
        class: VcoClassId,
        synset: SynsetId,
        existing: LinkKind,
        conflicting: LinkKind,
    },
    #[error(transparent)]
    InvalidSlug(#[from] InvalidSlug),
}

/// A significant synset the manifest neither removed nor organized into
/// the taxonomy — the curator's remaining to-do list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UncuratedWarning {
    pub synset: SynsetId,
    pub lemma: String,
    pub count: u32,
}

/// Result of [`build_taxonomy`]: the taxonomy plus the uncurated
/// leftovers from the significance report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildOutcome {
    pub taxonomy: Taxonomy,
    pub warnings: Vec<UncuratedWarning>,
}

/// Assembles a [`Taxonomy`] from a manifest against a graph, without a
/// significance report: declarations are checked (known synsets, level
/// structure, link conflicts, removal consistency) and merges expand to
/// `superClassOf` links.
pub fn assemble_taxonomy(
    manifest: &CurationManifest,
    graph: &WordNetGraph,
) -> Result<Taxonomy, TaxonomyError> {
    // Classes: unique ids, declared parents, strict level structure.
    let mut classes: BTreeMap<VcoClassId, VcoClass> = BTreeMap::new();
    for decl in &manifest.classes {
        let class = decl.to_class()?;
        if classes.contains_key(&class.id) {
            return Err(TaxonomyError::DuplicateClass(class.id));
        }
        classes.insert(class.id.clone(), class);
    }
    let declared: HashMap<&VcoClassId, &VcoClass> = classes.iter().collect();
    for class in declared.values() {
        match (class.level.required_parent(), &class.parent) {
            (None, None) => {}
            (None, Some(_)) => {
                return Err(TaxonomyError::ParentPresence {
                    class: class.id.clone(),
                    level: class.level,
                    expected: "have no parent",
                })
            }
            (Some(_), None) => {
                return Err(TaxonomyError::ParentPresence {
                    class: class.id.clone(),
                    level: class.level,
                    expected: "declare a parent",
                })
            }
            (Some(required), Some(parent_id)) => {
                let parent = declared
                    .get(parent_id)
                    .ok_or_else(|| TaxonomyError::UnknownClass(parent_id.as_str().to_string()))?;
                if parent.level != required {
                    return Err(TaxonomyError::LevelConstraint {
                        class: class.id.clone(),
                        level: class.level,
                        parent: parent.id.clone(),
                        parent_level: parent.level,
                    });
                }
            }
        }
    }

    // Links: explicit declarations first, then merge expansions. A merge
    // states that its synsets all belong under the target class, which is
    // exactly a superClassOf anchor. Identical duplicates collapse;
    // contradicting kinds for the same (class, synset) pair are an error.
    let mut links: Vec<VcoLink> = Vec::new();
    let mut kinds: HashMap<(VcoClassId, SynsetId), LinkKind> = HashMap::new();
    let mut push_link = |class: VcoClassId,
                         synset: SynsetId,
                         kind: LinkKind,
                         links: &mut Vec<VcoLink>|
     -> Result<(), TaxonomyError> {
        match kinds.get(&(class.clone(), synset)) {
            Some(&existing) if existing == kind => Ok(()),
            Some(&existing) => Err(TaxonomyError::ConflictingLinkKinds {
                class,
                synset,
                existing,
                conflicting: kind,
            }),
            None => {
                kinds.insert((class.clone(), synset), kind);
                links.push(VcoLink {
                    class,
                    synset,
                    kind,
                });
                Ok(())
            }
        }
    };

    for decl in &manifest.links {
        let class = VcoClassId::new(&decl.class)?;
        if !classes.contains_key(&class) {
            return Err(TaxonomyError::UnknownClass(decl.class.clone()));
        }
        let synset = decl.synset;
        if !graph.contains(synset) {
            return Err(TaxonomyError::UnknownSynset(synset));
        }
        push_link(class, synset, decl.kind, &mut links)?;
    }
    for merge in &manifest.merges {
        let class = VcoClassId::new(&merge.into)?;
        if !classes.contains_key(&class) {
            return Err(TaxonomyError::UnknownClass(merge.into.clone()));
        }
        for &synset in &merge.synsets {
            if !graph.contains(synset) {
                return Err(TaxonomyError::UnknownSynset(synset));
            }
            push_link(class.clone(), synset, LinkKind::SuperClassOf, &mut links)?;
        }
    }

    // Removal consistency: a removed synset must exist, must not also be
    // linked, and must not simultaneously be declared retained.
    let linked: HashMap<SynsetId, VcoClassId> =
        links.iter().map(|l| (l.synset, l.class.clone())).collect();
    let retained: HashSet<SynsetId> = manifest
        .retained_abstract
        .iter()
        .map(|r| r.synset)
        .collect();
    for removal in &manifest.removals {
        if !graph.contains(removal.synset) {
            return Err(TaxonomyError::UnknownSynset(removal.synset));
        }
        if let Some(class) = linked.get(&removal.synset) {
            return Err(TaxonomyError::RemovedButLinked {
                synset: removal.synset,
                class: class.clone(),
            });
        }
        if retained.contains(&removal.synset) {
            return Err(TaxonomyError::RemovedButRetained(removal.synset));
        }
    }
    for retained in &manifest.retained_abstract {
        if !graph.contains(retained.synset) {
            return Err(TaxonomyError::UnknownSynset(retained.synset));
        }
    }

    Ok(Taxonomy::new(classes.into_values().collect(), links))
}

/// Assembles the taxonomy and reports the uncurated leftovers: report
/// candidates that were not removed, are not linked, and have no linked
/// ancestor either — synsets the curation has not dealt with in any way.
pub fn build_taxonomy(
    report: &SignificanceReport,
    manifest: &CurationManifest,
    graph: &WordNetGraph,
) -> Result<BuildOutcome, TaxonomyError> {
    let taxonomy = assemble_taxonomy(manifest, graph)?;
    let removed: HashSet<SynsetId> = manifest.removals.iter().map(|r| r.synset).collect();

    let mut warnings = Vec::new();
    for &(synset, count) in &report.candidates {
        if removed.contains(&synset) || taxonomy.is_linked(synset) {
            continue;
        }
        let covering = resolve_class(&taxonomy, graph, synset)
            .map_err(|UnknownSynset(id)| TaxonomyError::UnknownSynset(id))?;
        if covering.is_empty() {
            warnings.push(UncuratedWarning {
                synset,
                lemma: graph
                    .get(synset)
                    .map(|s| s.first_lemma().to_string())
                    .unwrap_or_default(),
                count,
            });
        }
    }
    Ok(BuildOutcome { taxonomy, warnings })
}

/// The covering classes of a synset: walk the hypernym DAG upward from
/// the synset (itself included) and stop each branch at the first linked
/// synset found — the nearest covering class wins, more general links
/// behind it are shadowed. Returns slug-ascending distinct classes;
/// empty when no ancestor is linked.
pub fn resolve_class(
    taxonomy: &Taxonomy,
    graph: &WordNetGraph,
    synset: SynsetId,
) -> Result<Vec<VcoClassId>, UnknownSynset> {
    graph.synset(synset)?;
    let mut found: BTreeSet<VcoClassId> = BTreeSet::new();
    let mut seen: HashSet<SynsetId> = HashSet::new();
    let mut frontier: Vec<SynsetId> = vec![synset];
    seen.insert(synset);
    while let Some(node) = frontier.pop() {
        if taxonomy.is_linked(node) {
            // First hit on this branch: take the classes, do not walk on.
            found.extend(taxonomy.links_for_synset(node).map(|l| l.class.clone()));
            continue;
        }
        for parent in graph.synset(node).unwrap().all_hypernyms() {
            if seen.insert(parent) {
                frontier.push(parent);
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// One invariant violation found by [`validate_taxonomy`]. Violations
/// are data: an invalid taxonomy is inspected, not rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub class: Option<VcoClassId>,
    pub detail: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ViolationKind {
    /// A parent edge that skips or inverts the super > top > sub order.
    LevelSkip,
    /// A class with no synset links at all.
    UnlinkedClass,
    /// A parent reference to a class that does not exist, or a missing
    /// required parent.
    OrphanClass,
    /// The same (class, synset) pair linked more than once.
    DuplicateLink,
    /// A link naming a class that is not part of the taxonomy.
    UnknownLinkClass,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::LevelSkip => "level skip",
            ViolationKind::UnlinkedClass => "unlinked class",
            ViolationKind::OrphanClass => "orphan class",
            ViolationKind::DuplicateLink => "duplicate link",
            ViolationKind::UnknownLinkClass => "unknown class in link",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-level class counts plus every invariant violation. A valid
/// taxonomy has an empty violation list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub level_counts: BTreeMap<Level, usize>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn count(&self, level: Level) -> usize {
        self.level_counts.get(&level).copied().unwrap_or(0)
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every structural invariant: strict three-level parent chains,
/// link coverage for every class, link uniqueness, and referential
/// integrity of parent and link targets.
pub fn validate_taxonomy(taxonomy: &Taxonomy) -> ValidationReport {
    let mut level_counts = BTreeMap::new();
    let mut violations = Vec::new();

    for class in taxonomy.classes() {
        *level_counts.entry(class.level).or_insert(0) += 1;

        match (class.level.required_parent(), &class.parent) {
            (None, None) => {}
            (None, Some(parent)) => violations.push(Violation {
                kind: ViolationKind::LevelSkip,
                class: Some(class.id.clone()),
                detail: format!("super-level class must have no parent, found parent {parent}"),
            }),
            (Some(_), None) => violations.push(Violation {
                kind: ViolationKind::OrphanClass,
                class: Some(class.id.clone()),
                detail: format!("{}-level class has no parent", class.level),
            }),
            (Some(required), Some(parent_id)) => match taxonomy.get(parent_id) {
                None => violations.push(Violation {
                    kind: ViolationKind::OrphanClass,
                    class: Some(class.id.clone()),
                    detail: format!("parent {parent_id} does not exist"),
                }),
                Some(parent) if parent.level != required => violations.push(Violation {
                    kind: ViolationKind::LevelSkip,
                    class: Some(class.id.clone()),
                    detail: format!(
                        "{}-level class requires a {}-level parent, but {} is {}-level",
                        class.level, required, parent.id, parent.level
                    ),
                }),
                Some(_) => {}
            },
        }

        if !taxonomy.links().iter().any(|l| l.class == class.id) {
            violations.push(Violation {
                kind: ViolationKind::UnlinkedClass,
                class: Some(class.id.clone()),
                detail: "class has no synset links".into(),
            });
        }
    }

    let mut seen_pairs: HashSet<(&VcoClassId, SynsetId)> = HashSet::new();
    for link in taxonomy.links() {
        if taxonomy.get(&link.class).is_none() {
            violations.push(Violation {
                kind: ViolationKind::UnknownLinkClass,
                class: Some(link.class.clone()),
                detail: format!("link to {} names an undeclared class", link.synset),
            });
        }
        if !seen_pairs.insert((&link.class, link.synset)) {
            violations.push(Violation {
                kind: ViolationKind::DuplicateLink,
                class: Some(link.class.clone()),
                detail: format!("synset {} linked more than once", link.synset),
            });
        }
    }

    ValidationReport {
        level_counts,
        violations,
    }
}
