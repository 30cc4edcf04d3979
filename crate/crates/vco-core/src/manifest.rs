//! The curation manifest: a TOML document that records the manual
//! decisions behind a taxonomy — which over-general synsets were
//! removed, which abstract ones retained, the class declarations, the
//! class-to-synset links, and merge decisions that pull scattered
//! synsets under one class.
//!
//! Reifying curation as a file keeps the pipeline deterministic and
//! auditable: the same graph plus the same manifest always yields the
//! same taxonomy, and curation history lives in version control.

use std::path::{Path, PathBuf};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer};
use thiserror::Error;

use crate::taxonomy::{Level, LinkKind, TaxonomyError, VcoClass, VcoClassId};
use crate::wordnet::SynsetId;

/// The manifest format version this build understands.
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CurationManifest {
    pub manifest_version: u32,
    #[serde(default)]
    pub removals: Vec<Removal>,
    #[serde(default)]
    pub retained_abstract: Vec<Retained>,
    #[serde(default)]
    pub classes: Vec<ClassDecl>,
    #[serde(default)]
    pub links: Vec<LinkDecl>,
    #[serde(default)]
    pub merges: Vec<MergeDecl>,
}

impl CurationManifest {
    /// A manifest with no curation decisions at all.
    pub fn empty() -> Self {
        CurationManifest {
            manifest_version: MANIFEST_VERSION,
            removals: Vec::new(),
            retained_abstract: Vec::new(),
            classes: Vec::new(),
            links: Vec::new(),
            merges: Vec::new(),
        }
    }
}

/// A synset dropped from consideration, with the curator's reason.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Removal {
    pub synset: SynsetId,
    pub reason: String,
}

/// An abstract synset deliberately kept despite its generality.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Retained {
    pub synset: SynsetId,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ClassDecl {
    pub id: String,
    pub label: String,
    pub level: Level,
    #[serde(default)]
    pub parent: Option<String>,
}

impl ClassDecl {
    pub(crate) fn to_class(&self) -> Result<VcoClass, TaxonomyError> {
        let parent = match &self.parent {
            Some(p) => Some(VcoClassId::new(p)?),
            None => None,
        };
        Ok(VcoClass {
            id: VcoClassId::new(&self.id)?,
            label: self.label.clone(),
            level: self.level,
            parent,
        })
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LinkDecl {
    pub class: String,
    pub synset: SynsetId,
    pub kind: LinkKind,
}

/// A merge decision: all listed synsets belong under the `into` class.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MergeDecl {
    pub synsets: Vec<SynsetId>,
    pub into: String,
}

impl<'de> Deserialize<'de> for SynsetId {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: Deserializer<'de>,
    {
        let s = String::deserialize(deserializer)?;
        SynsetId::parse(&s).map_err(D::Error::custom)
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: Deserializer<'de>,
    {
        let s = String::deserialize(deserializer)?;
        match s.as_str() {
            "super" => Ok(Level::Super),
            "top" => Ok(Level::Top),
            "sub" => Ok(Level::Sub),
            other => Err(D::Error::custom(format!(
                "unknown level {other:?}: expected super, top, or sub"
            ))),
        }
    }
}

impl<'de> Deserialize<'de> for LinkKind {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: Deserializer<'de>,
    {
        let s = String::deserialize(deserializer)?;
        match s.as_str() {
            "equivalenceOf" => Ok(LinkKind::EquivalenceOf),
            "superClassOf" => Ok(LinkKind::SuperClassOf),
            other => Err(D::Error::custom(format!(
                "unknown link kind {other:?}: expected equivalenceOf or superClassOf"
            ))),
        }
    }
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse manifest: {0}")]
    Parse(#[source] Box<toml::de::Error>),
    #[error(
        "unsupported manifest_version {found}; this build understands version {MANIFEST_VERSION}"
    )]
    Version { found: u32 },
}

/// Reads and parses a manifest file, enforcing the format version.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<CurationManifest, ManifestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_manifest(&text)
}

/// Parses manifest text, enforcing the format version. TOML parse
/// errors carry their own line/column positions.
pub fn parse_manifest(text: &str) -> Result<CurationManifest, ManifestError> {
    let manifest: CurationManifest =
        toml::from_str(text).map_err(|e| ManifestError::Parse(Box::new(e)))?;
    if manifest.manifest_version != MANIFEST_VERSION {
        return Err(ManifestError::Version {
            found: manifest.manifest_version,
        });
    }
    Ok(manifest)
}
