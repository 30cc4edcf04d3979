//! `vco` — batch frontend for the Visual Concept Ontology toolkit.
//!
//! Wires the pipeline end to end: ingest the WordNet noun database,
//! compute significance candidates, build/validate/export the ontology,
//! and run the two annotation applications (keyword coverage and
//! vocabulary scoring).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go
//! to standard error; data goes to standard output or `--out`, and is
//! byte-deterministic for identical inputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use vco_core::analytics::extract_significant;
use vco_core::annotate::{
    annotate, hierarchical_report, map_keywords, parse_neighbors, parse_vocabulary, Concept,
};
use vco_core::manifest::load_manifest;
use vco_core::owl::export_owl;
use vco_core::taxonomy::{assemble_taxonomy, build_taxonomy, validate_taxonomy, Level, Taxonomy};
use vco_core::wordnet::{load_wordnet, WordNetGraph};

#[derive(Parser)]
#[command(
    name = "vco",
    version,
    about = "Visual Concept Ontology toolkit",
    long_about = "Builds a compact three-level concept hierarchy over the WordNet noun \
                  database and applies it to image-annotation tasks."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct WordNetArgs {
    /// Directory containing data.noun and index.noun
    #[arg(long, value_name = "DIR", env = "VCO_WORDNET_DIR")]
    wordnet: PathBuf,
}

#[derive(Args)]
struct OutputArgs {
    /// Write data output to FILE instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Emit JSON instead of tab-separated text
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Super,
    Top,
    Sub,
}

impl From<LevelArg> for Level {
    fn from(level: LevelArg) -> Level {
        match level {
            LevelArg::Super => Level::Super,
            LevelArg::Top => Level::Top,
            LevelArg::Sub => Level::Sub,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the significance report: summary lines plus candidate rows
    Stats {
        #[command(flatten)]
        wordnet: WordNetArgs,
        /// Keep synsets with more than N distinct descendants
        #[arg(long, value_name = "N", default_value_t = 300)]
        threshold: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print candidate synsets only, one row per candidate
    Candidates {
        #[command(flatten)]
        wordnet: WordNetArgs,
        /// Keep synsets with more than N distinct descendants
        #[arg(long, value_name = "N", default_value_t = 300)]
        threshold: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build the taxonomy from a curation manifest and report its classes
    Build {
        #[command(flatten)]
        wordnet: WordNetArgs,
        /// Curation manifest (TOML)
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
        /// Threshold for the uncurated-candidate warnings
        #[arg(long, value_name = "N", default_value_t = 300)]
        threshold: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check taxonomy invariants; violations are reported as data
    Validate {
        #[command(flatten)]
        wordnet: WordNetArgs,
        /// Curation manifest (TOML)
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Serialize the taxonomy as an OWL 2 document in Turtle syntax
    ExportOwl {
        #[command(flatten)]
        wordnet: WordNetArgs,
        /// Curation manifest (TOML)
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
        /// Ontology IRI (absolute, without a fragment)
        #[arg(long, value_name = "IRI", default_value = "http://example.org/vco")]
        iri: String,
        /// Write the document to FILE instead of standard output
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Map comma-separated keywords to their covering taxonomy classes
    MapKeywords {
        #[command(flatten)]
        wordnet: WordNetArgs,
        /// Curation manifest (TOML)
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
        /// Comma-separated keyword list, e.g. "roof,house"
        #[arg(long, value_name = "LIST")]
        keywords: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Score a vocabulary against neighbor-image metadata
    Annotate {
        #[command(flatten)]
        wordnet: WordNetArgs,
        /// Curation manifest (TOML)
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
        /// Vocabulary file: one concept per line, `class:` prefix for classes
        #[arg(long, value_name = "FILE")]
        vocabulary: PathBuf,
        /// Neighbor metadata file (TSV: image_id, similarity, keywords)
        #[arg(long, value_name = "FILE")]
        neighbors: PathBuf,
        /// Lift scores to one taxonomy level instead of per-concept output
        #[arg(long, value_enum, value_name = "LEVEL")]
        level: Option<LevelArg>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap reserves exit code 2 for usage errors; this tool's
            // contract gives that meaning to data errors instead.
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Stats {
            wordnet,
            threshold,
            output,
        } => {
            let graph = load_graph(&wordnet.wordnet)?;
            let report = extract_significant(&graph, threshold);
            let data = if output.json {
                to_json_text(&json!({
                    "threshold": report.threshold,
                    "total_synsets": report.total_synsets,
                    "candidates": candidate_rows_json(&graph, &report.candidates),
                }))
            } else {
                let mut text = String::new();
                let _ = writeln!(text, "# threshold\t{}", report.threshold);
                let _ = writeln!(text, "# total_synsets\t{}", report.total_synsets);
                let _ = writeln!(text, "# candidates\t{}", report.candidates.len());
                text.push_str(&candidate_rows_tsv(&graph, &report.candidates));
                text
            };
            write_output(output.out.as_deref(), &data)
        }
        Command::Candidates {
            wordnet,
            threshold,
            output,
        } => {
            let graph = load_graph(&wordnet.wordnet)?;
            let report = extract_significant(&graph, threshold);
            let data = if output.json {
                to_json_text(&candidate_rows_json(&graph, &report.candidates).into())
            } else {
                candidate_rows_tsv(&graph, &report.candidates)
            };
            write_output(output.out.as_deref(), &data)
        }
        Command::Build {
            wordnet,
            manifest,
            threshold,
            output,
        } => {
            let graph = load_graph(&wordnet.wordnet)?;
            let manifest = load_manifest_file(&manifest)?;
            let report = extract_significant(&graph, threshold);
            let outcome = build_taxonomy(&report, &manifest, &graph)?;
            for warning in &outcome.warnings {
                eprintln!(
                    "warning: significant synset {} ({}, {} descendants) is neither removed nor covered",
                    warning.synset, warning.lemma, warning.count
                );
            }
            let data = if output.json {
                to_json_text(&json!({
                    "classes": class_rows_json(&outcome.taxonomy),
                    "warnings": outcome
                        .warnings
                        .iter()
                        .map(|w| {
                            json!({
                                "synset": w.synset.to_string(),
                                "lemma": w.lemma,
                                "count": w.count,
                            })
                        })
                        .collect::<Vec<_>>(),
                }))
            } else {
                class_rows_tsv(&outcome.taxonomy)
            };
            write_output(output.out.as_deref(), &data)
        }
        Command::Validate {
            wordnet,
            manifest,
            output,
        } => {
            let graph = load_graph(&wordnet.wordnet)?;
            let manifest = load_manifest_file(&manifest)?;
            let taxonomy = assemble_taxonomy(&manifest, &graph)?;
            let report = validate_taxonomy(&taxonomy);
            let data = if output.json {
                to_json_text(&json!({
                    "levels": {
                        "super": report.count(Level::Super),
                        "top": report.count(Level::Top),
                        "sub": report.count(Level::Sub),
                    },
                    "violations": report
                        .violations
                        .iter()
                        .map(|v| {
                            json!({
                                "kind": v.kind.to_string(),
                                "class": v.class.as_ref().map(ToString::to_string),
                                "detail": v.detail,
                            })
                        })
                        .collect::<Vec<_>>(),
                }))
            } else {
                let mut text = String::new();
                let _ = writeln!(text, "# super\t{}", report.count(Level::Super));
                let _ = writeln!(text, "# top\t{}", report.count(Level::Top));
                let _ = writeln!(text, "# sub\t{}", report.count(Level::Sub));
                let _ = writeln!(text, "# violations\t{}", report.violations.len());
                for violation in &report.violations {
                    let class = violation
                        .class
                        .as_ref()
                        .map_or_else(|| "-".to_string(), ToString::to_string);
                    let _ = writeln!(text, "{}\t{class}\t{}", violation.kind, violation.detail);
                }
                text
            };
            write_output(output.out.as_deref(), &data)
        }
        Command::ExportOwl {
            wordnet,
            manifest,
            iri,
            out,
        } => {
            let graph = load_graph(&wordnet.wordnet)?;
            let manifest = load_manifest_file(&manifest)?;
            let taxonomy = assemble_taxonomy(&manifest, &graph)?;
            let document = export_owl(&taxonomy, &graph, &iri)?;
            write_output(out.as_deref(), &document)
        }
        Command::MapKeywords {
            wordnet,
            manifest,
            keywords,
            output,
        } => {
            let graph = load_graph(&wordnet.wordnet)?;
            let manifest = load_manifest_file(&manifest)?;
            let taxonomy = assemble_taxonomy(&manifest, &graph)?;
            let keywords: Vec<&str> = keywords
                .split(',')
                .map(str::trim)
                .filter(|k| !k.is_empty())
                .collect();
            let coverage = map_keywords(&graph, &taxonomy, &keywords);
            let data = if output.json {
                to_json_text(&json!({
                    "covering": coverage
                        .covering
                        .iter()
                        .map(|(class, support)| {
                            json!({
                                "class": class.to_string(),
                                "keywords": support.iter().collect::<Vec<_>>(),
                            })
                        })
                        .collect::<Vec<_>>(),
                    "unmapped": coverage.unmapped,
                }))
            } else {
                let mut text = String::new();
                for (class, support) in &coverage.covering {
                    let support: Vec<&str> = support.iter().map(String::as_str).collect();
                    let _ = writeln!(text, "{class}\t{}", support.join(";"));
                }
                for keyword in &coverage.unmapped {
                    let _ = writeln!(text, "-\t{keyword}");
                }
                text
            };
            write_output(output.out.as_deref(), &data)
        }
        Command::Annotate {
            wordnet,
            manifest,
            vocabulary,
            neighbors,
            level,
            output,
        } => {
            let graph = load_graph(&wordnet.wordnet)?;
            let manifest = load_manifest_file(&manifest)?;
            let taxonomy = assemble_taxonomy(&manifest, &graph)?;
            let vocabulary = parse_vocabulary(&read_file(&vocabulary)?)?;
            let neighbors = parse_neighbors(&read_file(&neighbors)?)?;
            let result = annotate(&neighbors, &vocabulary, &graph, &taxonomy)?;
            let data = match level {
                Some(level) => {
                    let report = hierarchical_report(&result, &taxonomy, level.into());
                    if output.json {
                        to_json_text(&json!({
                            "level": Level::from(level).to_string(),
                            "scores": report
                                .iter()
                                .map(|(class, score)| {
                                    json!({ "class": class.to_string(), "score": score })
                                })
                                .collect::<Vec<_>>(),
                        }))
                    } else {
                        let mut text = String::new();
                        for (class, score) in &report {
                            let _ = writeln!(text, "{class}\t{score:.6}");
                        }
                        text
                    }
                }
                None => {
                    // Per-concept output: best first, concept order on ties.
                    let mut rows: Vec<(&Concept, f64)> =
                        result.scores.iter().map(|(c, &s)| (c, s)).collect();
                    rows.sort_by(|(a_c, a), (b_c, b)| {
                        b.partial_cmp(a).unwrap().then_with(|| a_c.cmp(b_c))
                    });
                    if output.json {
                        to_json_text(&json!({
                            "scores": rows
                                .iter()
                                .map(|(concept, score)| {
                                    json!({ "concept": concept.to_string(), "score": score })
                                })
                                .collect::<Vec<_>>(),
                        }))
                    } else {
                        let mut text = String::new();
                        for (concept, score) in &rows {
                            let _ = writeln!(text, "{concept}\t{score:.6}");
                        }
                        text
                    }
                }
            };
            write_output(output.out.as_deref(), &data)
        }
    }
}

fn load_graph(dir: &Path) -> anyhow::Result<WordNetGraph> {
    load_wordnet(dir)
        .with_context(|| format!("cannot load WordNet database from {}", dir.display()))
}

fn load_manifest_file(path: &Path) -> anyhow::Result<vco_core::manifest::CurationManifest> {
    load_manifest(path).with_context(|| format!("cannot load curation manifest {}", path.display()))
}

fn read_file(path: &Path) -> Result<String, anyhow::Error> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn candidate_rows_tsv(
    graph: &WordNetGraph,
    candidates: &[(vco_core::wordnet::SynsetId, u32)],
) -> String {
    let mut text = String::new();
    for &(id, count) in candidates {
        let lemma = graph.get(id).map(|s| s.first_lemma()).unwrap_or("?");
        let _ = writeln!(text, "{id}\t{lemma}\t{count}");
    }
    text
}

fn candidate_rows_json(
    graph: &WordNetGraph,
    candidates: &[(vco_core::wordnet::SynsetId, u32)],
) -> Vec<serde_json::Value> {
    candidates
        .iter()
        .map(|&(id, count)| {
            json!({
                "synset": id.to_string(),
                "lemma": graph.get(id).map(|s| s.first_lemma()).unwrap_or("?"),
                "count": count,
            })
        })
        .collect()
}

fn class_rows_tsv(taxonomy: &Taxonomy) -> String {
    let mut text = String::new();
    for class in taxonomy.classes() {
        let parent = class
            .parent
            .as_ref()
            .map_or_else(|| "-".to_string(), ToString::to_string);
        let links = taxonomy
            .links()
            .iter()
            .filter(|l| l.class == class.id)
            .count();
        let _ = writeln!(
            text,
            "{}\t{}\t{parent}\t{links}\t{}",
            class.id, class.level, class.label
        );
    }
    text
}

fn class_rows_json(taxonomy: &Taxonomy) -> Vec<serde_json::Value> {
    taxonomy
        .classes()
        .map(|class| {
            json!({
                "id": class.id.to_string(),
                "label": class.label,
                "level": class.level.to_string(),
                "parent": class.parent.as_ref().map(ToString::to_string),
                "links": taxonomy
                    .links()
                    .iter()
                    .filter(|l| l.class == class.id)
                    .count(),
            })
        })
        .collect()
}

fn to_json_text(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    text.push('\n');
    text
}

fn write_output(out: Option<&Path>, data: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, data).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{data}");
            Ok(())
        }
    }
}
