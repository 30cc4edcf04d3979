//! Acceptance suite: one test per release gate, each printing a single
//! PASS/FAIL line. Run with
//!
//! ```text
//! cargo test -p vco-cli --test acceptance -- --nocapture --test-threads=1
//! ```
//!
//! Gates 1-3, 5-6 and 9 run against the bundled WordNet 3.0 noun
//! database (override the location with `VCO_WORDNET_DIR`); the rest use
//! randomized inputs with fixed seeds.

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use vco_core::analytics::{depth_to_root, extract_significant, hyponym_count};
use vco_core::annotate::{annotate, map_keywords, Concept, ImageRecord, Vocabulary};
use vco_core::manifest::load_manifest;
use vco_core::owl::{count_owl_entities, export_owl, OwlCounts};
use vco_core::taxonomy::{
    assemble_taxonomy, validate_taxonomy, Level, LinkKind, Taxonomy, VcoClass, VcoClassId, VcoLink,
};
use vco_core::wordnet::{load_wordnet, normalize_lemma, GraphBuilder, SynsetId, WordNetGraph};

// ------------------------------------------------------------- plumbing

fn report(number: u8, label: &str, outcome: Result<(), String>) {
    match outcome {
        Ok(()) => println!("acceptance {number} ({label}): PASS"),
        Err(detail) => {
            println!("acceptance {number} ({label}): FAIL - {detail}");
            panic!("acceptance {number} ({label}): {detail}");
        }
    }
}

fn fail(detail: impl Into<String>) -> Result<(), String> {
    Err(detail.into())
}

fn dict_dir() -> PathBuf {
    std::env::var_os("VCO_WORDNET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/wordnet/dict")
        })
}

fn sample_manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../manifests/sample.toml")
}

fn graph() -> &'static WordNetGraph {
    static GRAPH: OnceLock<WordNetGraph> = OnceLock::new();
    GRAPH.get_or_init(|| load_wordnet(dict_dir()).expect("bundled database loads"))
}

fn buildings() -> &'static (WordNetGraph, Taxonomy) {
    static FIXTURE: OnceLock<(WordNetGraph, Taxonomy)> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let dir =
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../vco-core/tests/fixtures/buildings");
        let graph = load_wordnet(&dir).expect("fixture database loads");
        let manifest = load_manifest(dir.join("manifest.toml")).expect("fixture manifest loads");
        let taxonomy = assemble_taxonomy(&manifest, &graph).expect("fixture taxonomy assembles");
        (graph, taxonomy)
    })
}

// --------------------------------------------------------------- gates

#[test]
fn a1_database_fidelity() {
    report(
        1,
        "database fidelity",
        (|| {
            let started = Instant::now();
            let graph = load_wordnet(dict_dir()).map_err(|e| e.to_string())?;
            let elapsed = started.elapsed();
            if elapsed >= Duration::from_secs(30) {
                return fail(format!("load took {elapsed:?}, budget is 30s"));
            }
            if graph.len() <= 82_000 || graph.len() >= 83_000 {
                return fail(format!(
                    "{} synsets, expected strictly between 82000 and 83000",
                    graph.len()
                ));
            }
            if graph.lemma_count() != 117_798 {
                return fail(format!("{} lemmas, expected 117798", graph.lemma_count()));
            }
            Ok(())
        })(),
    );
}

#[test]
fn a2_significance_band() {
    report(
        2,
        "significance band",
        (|| {
            let started = Instant::now();
            let graph = load_wordnet(dict_dir()).map_err(|e| e.to_string())?;
            let found = extract_significant(&graph, 300).candidates.len();
            let elapsed = started.elapsed();
            if elapsed >= Duration::from_secs(60) {
                return fail(format!("load + extraction took {elapsed:?}, budget is 60s"));
            }
            if !(401..=599).contains(&found) {
                return fail(format!(
                    "{found} candidates at threshold 300, expected strictly between 400 and 600"
                ));
            }
            Ok(())
        })(),
    );
}

#[test]
fn a3_depth_anchors() {
    report(
        3,
        "depth anchors",
        (|| {
            let graph = graph();
            // Path length in synsets (edges to the root, plus one).
            let nodes_on_path = |lemma: &str| -> Result<u32, String> {
                let senses = graph.lookup_lemma(lemma);
                let &first = senses.first().ok_or_else(|| format!("{lemma} not found"))?;
                Ok(depth_to_root(graph, first).map_err(|e| e.to_string())? + 1)
            };
            let rhino = nodes_on_path("white_rhinoceros")?;
            if !(14..=16).contains(&rhino) {
                return fail(format!(
                    "white_rhinoceros path holds {rhino} synsets, expected 15 +/- 1"
                ));
            }
            let thames = nodes_on_path("thames")?;
            if !(6..=8).contains(&thames) {
                return fail(format!(
                    "thames path holds {thames} synsets, expected 7 +/- 1"
                ));
            }
            Ok(())
        })(),
    );
}

/// A random single-rooted DAG: node 1 is the root, every later node
/// picks one to three distinct parents among the earlier nodes.
fn random_dag(seed: u64, max_nodes: usize) -> WordNetGraph {
    let mut rng = StdRng::seed_from_u64(seed);
    let nodes = rng.gen_range(2..=max_nodes.max(2));
    let mut builder = GraphBuilder::new();
    for i in 1..=nodes {
        let lemma = format!("w{i:05}");
        builder = builder.synset(i as u32, &[lemma.as_str()], "generated");
    }
    for child in 2..=nodes {
        let parent_count = rng.gen_range(1..=3.min(child - 1));
        let mut parents: Vec<u32> = (1..child as u32).collect();
        parents.shuffle(&mut rng);
        for &parent in parents.iter().take(parent_count) {
            builder = builder.hypernym(child as u32, parent);
        }
    }
    builder
        .build()
        .expect("generated DAG is valid by construction")
}

#[test]
fn a4_closure_oracle() {
    report(
        4,
        "closure oracle",
        (|| {
            for seed in 0..50u64 {
                let graph = random_dag(seed, 2000);
                // Index the graph once, then DFS per node over plain vectors.
                let ids: Vec<SynsetId> = graph.synsets().map(|s| s.id).collect();
                let index: HashMap<SynsetId, usize> =
                    ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
                let down: Vec<Vec<usize>> = ids
                    .iter()
                    .map(|&id| {
                        graph
                            .get(id)
                            .unwrap()
                            .downward_edges()
                            .map(|t| index[&t])
                            .collect()
                    })
                    .collect();
                let mut visited = vec![false; ids.len()];
                let mut stack = Vec::new();
                for (start, &id) in ids.iter().enumerate() {
                    visited.fill(false);
                    stack.clear();
                    stack.push(start);
                    visited[start] = true;
                    let mut reached = 0u32;
                    while let Some(node) = stack.pop() {
                        for &next in &down[node] {
                            if !visited[next] {
                                visited[next] = true;
                                reached += 1;
                                stack.push(next);
                            }
                        }
                    }
                    let counted = hyponym_count(&graph, id).map_err(|e| e.to_string())?;
                    if counted != reached {
                        return fail(format!(
                            "seed {seed}, {id}: counted {counted}, oracle says {reached}"
                        ));
                    }
                }
            }
            Ok(())
        })(),
    );
}

#[test]
fn a5_curated_manifest() {
    report(
        5,
        "curated manifest",
        (|| {
            let graph = graph();
            let manifest = load_manifest(sample_manifest()).map_err(|e| e.to_string())?;
            let taxonomy = assemble_taxonomy(&manifest, graph).map_err(|e| e.to_string())?;
            let validation = validate_taxonomy(&taxonomy);
            if !validation.violations.is_empty() {
                return fail(format!(
                    "{} violations: {:?}",
                    validation.violations.len(),
                    validation.violations
                ));
            }
            let supers = validation.count(Level::Super);
            if supers != 4 {
                return fail(format!("{supers} super-classes, expected exactly 4"));
            }
            Ok(())
        })(),
    );
}

/// A random structurally valid taxonomy over the graph: parents sit one
/// level up, every class carries at least one link, links never repeat.
fn random_valid_taxonomy(seed: u64, graph: &WordNetGraph) -> Taxonomy {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5151_5151);
    let offsets: Vec<SynsetId> = graph.synsets().map(|s| s.id).collect();
    let mut classes: Vec<VcoClass> = Vec::new();
    let mut links: Vec<VcoLink> = Vec::new();
    let mut used: BTreeSet<(String, SynsetId)> = BTreeSet::new();
    let mut lower: Vec<VcoClassId> = Vec::new();
    let mut serial = 0u32;
    for (level, min, max) in [
        (Level::Super, 1usize, 3usize),
        (Level::Top, 0, 4),
        (Level::Sub, 0, 5),
    ] {
        let parent_pool = std::mem::take(&mut lower);
        if level != Level::Super && parent_pool.is_empty() {
            break;
        }
        for _ in 0..rng.gen_range(min..=max) {
            serial += 1;
            let id = VcoClassId::new(&format!("k{serial:03}")).unwrap();
            classes.push(VcoClass {
                id: id.clone(),
                label: format!("K {serial}"),
                level,
                parent: match level {
                    Level::Super => None,
                    _ => Some(parent_pool[rng.gen_range(0..parent_pool.len())].clone()),
                },
            });
            for _ in 0..rng.gen_range(1..=3) {
                let synset = offsets[rng.gen_range(0..offsets.len())];
                let kind = if rng.gen_bool(0.5) {
                    LinkKind::EquivalenceOf
                } else {
                    LinkKind::SuperClassOf
                };
                // The validator flags a (class, synset) pair linked twice
                // regardless of kind.
                if used.insert((id.to_string(), synset)) {
                    links.push(VcoLink {
                        class: id.clone(),
                        synset,
                        kind,
                    });
                }
            }
            lower.push(id);
        }
    }
    Taxonomy::new(classes, links)
}

#[test]
fn a6_owl_round_trip() {
    report(
        6,
        "owl round-trip",
        (|| {
            let round_trip = |taxonomy: &Taxonomy, graph: &WordNetGraph, what: &str| {
                let document = export_owl(taxonomy, graph, "http://example.org/vco")
                    .map_err(|e| e.to_string())?;
                let counts = count_owl_entities(&document)
                    .map_err(|e| format!("{what}: not well-formed: {e}"))?;
                let expected = OwlCounts {
                    classes: taxonomy.classes().count(),
                    individuals: taxonomy.linked_synsets().len(),
                    links: taxonomy.links().len(),
                };
                if counts != expected {
                    return Err(format!(
                        "{what}: re-parsed {counts:?}, exported {expected:?}"
                    ));
                }
                let again = export_owl(taxonomy, graph, "http://example.org/vco")
                    .map_err(|e| e.to_string())?;
                if document != again {
                    return Err(format!("{what}: export is not byte-deterministic"));
                }
                Ok(())
            };
            let graph = graph();
            let manifest = load_manifest(sample_manifest()).map_err(|e| e.to_string())?;
            let taxonomy = assemble_taxonomy(&manifest, graph).map_err(|e| e.to_string())?;
            round_trip(&taxonomy, graph, "curated manifest")?;
            for seed in 0..20u64 {
                let dag = random_dag(seed, 60);
                let taxonomy = random_valid_taxonomy(seed, &dag);
                round_trip(&taxonomy, &dag, &format!("seed {seed}"))?;
            }
            Ok(())
        })(),
    );
}

const KEYWORD_POOL: &[&str] = &[
    "entity",
    "object",
    "artifact",
    "structure",
    "house",
    "roof",
    "vehicle",
    "car",
    "auto",
    "animal",
    "dog",
    "poodle",
    "pet",
    "Dog",
    "fire truck",
    "nonsense",
    "zzz-unknown",
    "",
];

fn random_neighbors(seed: u64, max_similarity: f64) -> Vec<ImageRecord> {
    let mut rng = StdRng::seed_from_u64(seed ^ 0xabcd_ef01);
    let count = rng.gen_range(0..=20);
    (0..count)
        .map(|i| {
            let keyword_count = rng.gen_range(0..=5);
            ImageRecord {
                image_id: format!("img-{i}"),
                similarity: rng.gen_range(0.0..=max_similarity),
                keywords: (0..keyword_count)
                    .map(|_| KEYWORD_POOL[rng.gen_range(0..KEYWORD_POOL.len())].to_string())
                    .collect(),
            }
        })
        .collect()
}

fn mixed_vocabulary() -> Vocabulary {
    Vocabulary::new(vec![
        Concept::Word("dog".into()),
        Concept::Word("car".into()),
        Concept::Word("zzz-unknown".into()),
        Concept::Class(VcoClassId::new("buildings").unwrap()),
        Concept::Class(VcoClassId::new("vehicles").unwrap()),
        Concept::Class(VcoClassId::new("pets").unwrap()),
        Concept::Class(VcoClassId::new("things").unwrap()),
    ])
    .unwrap()
}

#[test]
fn a7_scoring_laws() {
    report(
        7,
        "scoring laws",
        (|| {
            let (graph, taxonomy) = buildings();
            let vocabulary = mixed_vocabulary();
            for seed in 0..100u64 {
                // Keep base similarities at or below one half so doubling
                // still lands inside [0, 1].
                let base = random_neighbors(seed, 0.5);
                let result =
                    annotate(&base, &vocabulary, graph, taxonomy).map_err(|e| e.to_string())?;
                for (concept, &score) in &result.scores {
                    if !(0.0..=1.0).contains(&score) {
                        return fail(format!("seed {seed}: {concept} scored {score}"));
                    }
                }
                let best = result.scores.values().fold(0.0_f64, |a, &b| a.max(b));
                if result.scores.values().any(|&s| s > 0.0) && best != 1.0 {
                    return fail(format!(
                        "seed {seed}: best normalized score is {best}, not 1"
                    ));
                }
                for k in [0.1, 0.5, 2.0] {
                    let scaled: Vec<ImageRecord> = base
                        .iter()
                        .map(|n| ImageRecord {
                            similarity: n.similarity * k,
                            ..n.clone()
                        })
                        .collect();
                    let rescored = annotate(&scaled, &vocabulary, graph, taxonomy)
                        .map_err(|e| e.to_string())?;
                    for (concept, &score) in &result.scores {
                        let other = rescored.scores[concept];
                        if (score - other).abs() >= 1e-12 {
                            return fail(format!(
                                "seed {seed}, k = {k}: {concept} moved from {score} to {other}"
                            ));
                        }
                    }
                }
                // Raw evidence never shrinks when a neighbor is added.
                let mut extended = base.clone();
                extended.push(ImageRecord {
                    image_id: "extra".into(),
                    similarity: StdRng::seed_from_u64(seed).gen_range(0.0..=1.0),
                    keywords: vec![KEYWORD_POOL[seed as usize % KEYWORD_POOL.len()].to_string()],
                });
                let grown =
                    annotate(&extended, &vocabulary, graph, taxonomy).map_err(|e| e.to_string())?;
                for (concept, &raw) in &result.raw_evidence {
                    let after = grown.raw_evidence[concept];
                    if after < raw {
                        return fail(format!(
                            "seed {seed}: {concept} lost raw evidence, {raw} -> {after}"
                        ));
                    }
                }
            }
            Ok(())
        })(),
    );
}

#[test]
fn a8_coverage_partition() {
    report(
        8,
        "coverage partition",
        (|| {
            let (graph, taxonomy) = buildings();
            for seed in 0..100u64 {
                let mut rng = StdRng::seed_from_u64(seed ^ 0x0f0f_0f0f);
                let count = rng.gen_range(0..=12);
                let keywords: Vec<String> = (0..count)
                    .map(|_| KEYWORD_POOL[rng.gen_range(0..KEYWORD_POOL.len())].to_string())
                    .collect();
                let coverage = map_keywords(graph, taxonomy, &keywords);
                let mapped: BTreeSet<String> = coverage
                    .covering
                    .iter()
                    .flat_map(|(_, support)| support.iter().cloned())
                    .collect();
                let unmapped: BTreeSet<String> = coverage.unmapped.iter().cloned().collect();
                if !mapped.is_disjoint(&unmapped) {
                    return fail(format!(
                        "seed {seed}: a keyword is both covered and unmapped"
                    ));
                }
                let together: BTreeSet<String> = mapped.union(&unmapped).cloned().collect();
                let expected: BTreeSet<String> = keywords
                    .iter()
                    .map(|k| normalize_lemma(k))
                    .filter(|k| !k.is_empty())
                    .collect();
                if together != expected {
                    return fail(format!(
                        "seed {seed}: partition covers {together:?}, input was {expected:?}"
                    ));
                }
            }
            Ok(())
        })(),
    );
}

#[test]
fn a9_cli_determinism() {
    report(
        9,
        "cli determinism",
        (|| {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let vocabulary = dir.path().join("vocabulary.txt");
            std::fs::write(&vocabulary, "dog\nclass:dogs\nclass:vehicles\n")
                .map_err(|e| e.to_string())?;
            let neighbors = dir.path().join("neighbors.tsv");
            std::fs::write(
                &neighbors,
                "#image_id\tsimilarity\tkeywords\nimg-1\t0.9\tdog;car\nimg-2\t0.5\tbeagle\n",
            )
            .map_err(|e| e.to_string())?;

            let wordnet = dict_dir().display().to_string();
            let manifest = sample_manifest().display().to_string();
            let vocabulary = vocabulary.display().to_string();
            let neighbors = neighbors.display().to_string();
            let invocations: Vec<Vec<&str>> = vec![
                vec!["stats", "--wordnet", &wordnet],
                vec!["candidates", "--wordnet", &wordnet, "--json"],
                vec!["build", "--wordnet", &wordnet, "--manifest", &manifest],
                vec!["validate", "--wordnet", &wordnet, "--manifest", &manifest],
                vec!["export-owl", "--wordnet", &wordnet, "--manifest", &manifest],
                vec![
                    "map-keywords",
                    "--wordnet",
                    &wordnet,
                    "--manifest",
                    &manifest,
                    "--keywords",
                    "dog,car,bridge,zzz",
                ],
                vec![
                    "annotate",
                    "--wordnet",
                    &wordnet,
                    "--manifest",
                    &manifest,
                    "--vocabulary",
                    &vocabulary,
                    "--neighbors",
                    &neighbors,
                ],
                vec![
                    "annotate",
                    "--wordnet",
                    &wordnet,
                    "--manifest",
                    &manifest,
                    "--vocabulary",
                    &vocabulary,
                    "--neighbors",
                    &neighbors,
                    "--level",
                    "top",
                    "--json",
                ],
            ];
            for args in invocations {
                let run = || {
                    Command::new(env!("CARGO_BIN_EXE_vco"))
                        .args(&args)
                        .env_remove("VCO_WORDNET_DIR")
                        .output()
                        .map_err(|e| e.to_string())
                };
                let first = run()?;
                let second = run()?;
                if first.status.code() != Some(0) {
                    return fail(format!(
                        "{args:?} exited with {:?}: {}",
                        first.status.code(),
                        String::from_utf8_lossy(&first.stderr)
                    ));
                }
                if first.stdout != second.stdout {
                    return fail(format!("{args:?} produced different bytes across two runs"));
                }
            }
            Ok(())
        })(),
    );
}
