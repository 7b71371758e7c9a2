//! Labeled source-code corpus: manifest loading, validation and
//! serialization.
//!
//! A corpus is described by a TOML manifest with one `[[unit]]` record per
//! source file (see the repository README for the format). Ground-truth
//! labels travel in the same record, so every loaded unit has exactly one
//! truth entry by construction. A loaded [`Corpus`] is immutable and safe to
//! share across threads.

pub mod tokens;

use crate::prompt::Algorithm;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Source language of a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    C,
    Cpp,
}

/// Ground-truth algorithm class of a unit. `None` marks false-positive
/// material that contains no target kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Gemm,
    Conv,
    Fft,
    None,
}

impl Label {
    pub fn algorithm(&self) -> Option<Algorithm> {
        match self {
            Label::Gemm => Some(Algorithm::Gemm),
            Label::Conv => Some(Algorithm::Conv),
            Label::Fft => Some(Algorithm::Fft),
            Label::None => None,
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            Label::Gemm => "gemm",
            Label::Conv => "conv",
            Label::Fft => "fft",
            Label::None => "none",
        }
    }
}

impl From<Algorithm> for Label {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Gemm => Label::Gemm,
            Algorithm::Conv => Label::Conv,
            Algorithm::Fft => Label::Fft,
        }
    }
}

/// One ingested source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub id: String,
    /// Path as written in the manifest, relative to the corpus root.
    pub path: PathBuf,
    pub language: Language,
    pub text: String,
    pub token_estimate: usize,
    pub suite: String,
}

/// Expected answer for one unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub unit_id: String,
    pub algorithm: Label,
    pub variant: Option<String>,
    pub outermost_function: Option<String>,
}

/// A validated set of units plus their ground truth.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    units: Vec<SourceUnit>,
    truths: BTreeMap<String, GroundTruth>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("duplicate unit id \"{id}\"")]
    DuplicateId { id: String },
    #[error("unit \"{id}\": source file {path} is missing or unreadable: {source}")]
    MissingSource {
        id: String,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unit \"{id}\": source file {path} is not valid UTF-8 text")]
    Undecodable { id: String, path: PathBuf },
    #[error("unit \"{id}\": source text is empty")]
    EmptyText { id: String },
    #[error("unit \"{id}\": suite \"{suite}\" is inconsistent with algorithm \"{algorithm}\"")]
    SuiteMismatch {
        id: String,
        suite: String,
        algorithm: &'static str,
    },
    #[error("unit \"{id}\": algorithm \"{algorithm}\" requires an outermost_function")]
    MissingOutermost { id: String, algorithm: &'static str },
    #[error("unit \"{id}\": outermost_function \"{name}\" is not a plausible identifier")]
    BadOutermost { id: String, name: String },
    #[error("unit \"{id}\": units labeled none must not name an outermost_function")]
    UnexpectedOutermost { id: String },
    #[error("unit \"{id}\": units and ground-truth entries do not pair up")]
    Unpaired { id: String },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One `[[unit]]` record of the manifest file.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ManifestRecord {
    id: String,
    path: String,
    language: Language,
    suite: String,
    algorithm: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outermost_function: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct ManifestDoc {
    #[serde(default, rename = "unit")]
    units: Vec<ManifestRecord>,
}

impl Corpus {
    /// Load and validate the corpus named by `manifest`, resolving unit
    /// paths against `corpus_root`.
    pub fn load(manifest: &Path, corpus_root: &Path) -> Result<Self, CorpusError> {
        let raw = std::fs::read_to_string(manifest).map_err(|source| CorpusError::Io {
            path: manifest.to_path_buf(),
            source,
        })?;
        let doc: ManifestDoc = toml::from_str(&raw).map_err(|e| CorpusError::Manifest {
            path: manifest.to_path_buf(),
            message: e.to_string(),
        })?;

        let mut units = Vec::with_capacity(doc.units.len());
        let mut truths = BTreeMap::new();
        for record in doc.units {
            validate_labels(&record)?;
            if truths.contains_key(&record.id) {
                return Err(CorpusError::DuplicateId { id: record.id });
            }
            let full_path = corpus_root.join(&record.path);
            let bytes =
                std::fs::read(&full_path).map_err(|source| CorpusError::MissingSource {
                    id: record.id.clone(),
                    path: full_path.clone(),
                    source,
                })?;
            let text = String::from_utf8(bytes).map_err(|_| CorpusError::Undecodable {
                id: record.id.clone(),
                path: full_path.clone(),
            })?;
            if text.is_empty() {
                return Err(CorpusError::EmptyText { id: record.id });
            }
            let token_estimate = tokens::estimate_tokens(&text);
            truths.insert(
                record.id.clone(),
                GroundTruth {
                    unit_id: record.id.clone(),
                    algorithm: record.algorithm,
                    variant: record.variant,
                    outermost_function: record.outermost_function,
                },
            );
            units.push(SourceUnit {
                id: record.id,
                path: PathBuf::from(record.path),
                language: record.language,
                text,
                token_estimate,
                suite: record.suite,
            });
        }
        Ok(Corpus { units, truths })
    }

    /// Build a corpus from already-loaded parts, enforcing the same
    /// invariants as manifest loading. `units` and `truths` must pair 1:1.
    pub fn from_parts(
        units: Vec<SourceUnit>,
        truths: Vec<GroundTruth>,
    ) -> Result<Self, CorpusError> {
        let mut truth_map = BTreeMap::new();
        for truth in truths {
            let id = truth.unit_id.clone();
            if truth_map.insert(id.clone(), truth).is_some() {
                return Err(CorpusError::DuplicateId { id });
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for unit in &units {
            if !seen.insert(&unit.id) {
                return Err(CorpusError::DuplicateId {
                    id: unit.id.clone(),
                });
            }
            if unit.text.is_empty() {
                return Err(CorpusError::EmptyText {
                    id: unit.id.clone(),
                });
            }
            let truth = truth_map
                .get(&unit.id)
                .ok_or_else(|| CorpusError::Unpaired {
                    id: unit.id.clone(),
                })?;
            let record = ManifestRecord {
                id: unit.id.clone(),
                path: unit.path.to_string_lossy().into_owned(),
                language: unit.language,
                suite: unit.suite.clone(),
                algorithm: truth.algorithm,
                variant: truth.variant.clone(),
                outermost_function: truth.outermost_function.clone(),
            };
            validate_labels(&record)?;
        }
        if truth_map.len() != units.len() {
            let extra = truth_map
                .keys()
                .find(|id| !units.iter().any(|u| &u.id == *id))
                .cloned()
                .unwrap_or_default();
            return Err(CorpusError::Unpaired { id: extra });
        }
        Ok(Corpus {
            units,
            truths: truth_map,
        })
    }

    /// Write a manifest equivalent to this corpus. Loading it back against
    /// the same root yields an equal corpus.
    pub fn save_manifest(&self, path: &Path) -> Result<(), CorpusError> {
        let doc = ManifestDoc {
            units: self
                .units
                .iter()
                .map(|u| {
                    let truth = &self.truths[&u.id];
                    ManifestRecord {
                        id: u.id.clone(),
                        path: u.path.to_string_lossy().into_owned(),
                        language: u.language,
                        suite: u.suite.clone(),
                        algorithm: truth.algorithm,
                        variant: truth.variant.clone(),
                        outermost_function: truth.outermost_function.clone(),
                    }
                })
                .collect(),
        };
        let text = toml::to_string(&doc).expect("manifest records always serialize");
        std::fs::write(path, text).map_err(|source| CorpusError::Write {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Units in manifest order.
    pub fn units(&self) -> &[SourceUnit] {
        &self.units
    }

    pub fn truth(&self, unit_id: &str) -> Option<&GroundTruth> {
        self.truths.get(unit_id)
    }

    pub fn truths(&self) -> &BTreeMap<String, GroundTruth> {
        &self.truths
    }

    pub fn unit(&self, unit_id: &str) -> Option<&SourceUnit> {
        self.units.iter().find(|u| u.id == unit_id)
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Suite names in first-appearance order; drives report row order.
    pub fn suites(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for u in &self.units {
            if !seen.contains(&u.suite) {
                seen.push(u.suite.clone());
            }
        }
        seen
    }
}

/// Label coherence checks that do not need the source text.
fn validate_labels(record: &ManifestRecord) -> Result<(), CorpusError> {
    let expected = Algorithm::from_key(&record.suite).map(Label::from);
    match expected {
        Some(expected) if record.algorithm != expected => {
            return Err(CorpusError::SuiteMismatch {
                id: record.id.clone(),
                suite: record.suite.clone(),
                algorithm: record.algorithm.key(),
            });
        }
        None if record.algorithm != Label::None => {
            return Err(CorpusError::SuiteMismatch {
                id: record.id.clone(),
                suite: record.suite.clone(),
                algorithm: record.algorithm.key(),
            });
        }
        _ => {}
    }
    match (&record.algorithm, &record.outermost_function) {
        (Label::None, Some(_)) => Err(CorpusError::UnexpectedOutermost {
            id: record.id.clone(),
        }),
        (Label::None, None) => Ok(()),
        (_, None) => Err(CorpusError::MissingOutermost {
            id: record.id.clone(),
            algorithm: record.algorithm.key(),
        }),
        (_, Some(name)) => {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                Err(CorpusError::BadOutermost {
                    id: record.id.clone(),
                    name: name.clone(),
                })
            } else {
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_corpus(dir: &Path, records: &str, files: &[(&str, &str)]) -> PathBuf {
        for (name, text) in files {
            let p = dir.join(name);
            fs::create_dir_all(p.parent().unwrap()).unwrap();
            fs::write(p, text).unwrap();
        }
        let manifest = dir.join("manifest.toml");
        fs::write(&manifest, records).unwrap();
        manifest
    }

    #[test]
    fn loads_units_in_manifest_order() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(
            dir.path(),
            r#"
[[unit]]
id = "g1"
path = "g1.c"
language = "c"
suite = "gemm"
algorithm = "gemm"
variant = "naive"
outermost_function = "matmul"

[[unit]]
id = "n1"
path = "n1.c"
language = "c"
suite = "cpufetch"
algorithm = "none"
"#,
            &[("g1.c", "void matmul(){}\n"), ("n1.c", "int main(){}\n")],
        );
        let corpus = Corpus::load(&manifest, dir.path()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.units()[0].id, "g1");
        assert_eq!(corpus.units()[1].id, "n1");
        assert_eq!(corpus.truth("g1").unwrap().algorithm, Label::Gemm);
        assert_eq!(
            corpus.truth("g1").unwrap().outermost_function.as_deref(),
            Some("matmul")
        );
        assert_eq!(corpus.truth("n1").unwrap().algorithm, Label::None);
        let u = &corpus.units()[0];
        assert_eq!(u.token_estimate, tokens::estimate_tokens(&u.text));
    }

    #[test]
    fn empty_manifest_is_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(dir.path(), "", &[]);
        let corpus = Corpus::load(&manifest, dir.path()).unwrap();
        assert!(corpus.is_empty());
        assert!(corpus.truths().is_empty());
    }

    #[test]
    fn duplicate_id_is_rejected_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(
            dir.path(),
            r#"
[[unit]]
id = "a"
path = "a.c"
language = "c"
suite = "gemm"
algorithm = "gemm"
outermost_function = "f"

[[unit]]
id = "a"
path = "a.c"
language = "c"
suite = "gemm"
algorithm = "gemm"
outermost_function = "f"
"#,
            &[("a.c", "void f(){}\n")],
        );
        let err = Corpus::load(&manifest, dir.path()).unwrap_err();
        match err {
            CorpusError::DuplicateId { id } => assert_eq!(id, "a"),
            other => panic!("expected duplicate id, got {other}"),
        }
    }

    #[test]
    fn suite_algorithm_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(
            dir.path(),
            r#"
[[unit]]
id = "x"
path = "x.c"
language = "c"
suite = "gemm"
algorithm = "fft"
outermost_function = "f"
"#,
            &[("x.c", "void f(){}\n")],
        );
        let err = Corpus::load(&manifest, dir.path()).unwrap_err();
        assert!(matches!(err, CorpusError::SuiteMismatch { .. }));
        assert!(err.to_string().contains("\"x\""));
    }

    #[test]
    fn none_label_in_algorithm_suite_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(
            dir.path(),
            r#"
[[unit]]
id = "x"
path = "x.c"
language = "c"
suite = "fft"
algorithm = "none"
"#,
            &[("x.c", "void f(){}\n")],
        );
        assert!(matches!(
            Corpus::load(&manifest, dir.path()).unwrap_err(),
            CorpusError::SuiteMismatch { .. }
        ));
    }

    #[test]
    fn missing_source_names_unit() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(
            dir.path(),
            r#"
[[unit]]
id = "ghost"
path = "nope.c"
language = "c"
suite = "acotsp"
algorithm = "none"
"#,
            &[],
        );
        let err = Corpus::load(&manifest, dir.path()).unwrap_err();
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn undecodable_source_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("bin.c"), [0xff, 0xfe, 0x00, 0x41]).unwrap();
        let manifest = write_corpus(
            dir.path(),
            r#"
[[unit]]
id = "bin"
path = "bin.c"
language = "c"
suite = "parboil"
algorithm = "none"
"#,
            &[],
        );
        assert!(matches!(
            Corpus::load(&manifest, dir.path()).unwrap_err(),
            CorpusError::Undecodable { .. }
        ));
    }

    #[test]
    fn outermost_function_coherence() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(
            dir.path(),
            r#"
[[unit]]
id = "g"
path = "g.c"
language = "c"
suite = "conv"
algorithm = "conv"
"#,
            &[("g.c", "void f(){}\n")],
        );
        assert!(matches!(
            Corpus::load(&manifest, dir.path()).unwrap_err(),
            CorpusError::MissingOutermost { .. }
        ));
    }

    #[test]
    fn manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(
            dir.path(),
            r#"
[[unit]]
id = "g1"
path = "src/g1.cpp"
language = "cpp"
suite = "gemm"
algorithm = "gemm"
variant = "tiled"
outermost_function = "Gemm::run"

[[unit]]
id = "n1"
path = "n1.c"
language = "c"
suite = "caffe"
algorithm = "none"
"#,
            &[
                ("src/g1.cpp", "struct Gemm { static void run(); };\n"),
                ("n1.c", "int main(){}\n"),
            ],
        );
        let corpus = Corpus::load(&manifest, dir.path()).unwrap();
        let saved = dir.path().join("saved.toml");
        corpus.save_manifest(&saved).unwrap();
        let reloaded = Corpus::load(&saved, dir.path()).unwrap();
        assert_eq!(corpus, reloaded);
    }

    #[test]
    fn label_partition_covers_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(
            dir.path(),
            r#"
[[unit]]
id = "g"
path = "g.c"
language = "c"
suite = "gemm"
algorithm = "gemm"
outermost_function = "f"

[[unit]]
id = "c"
path = "c.c"
language = "c"
suite = "conv"
algorithm = "conv"
outermost_function = "f"

[[unit]]
id = "n"
path = "n.c"
language = "c"
suite = "parboil"
algorithm = "none"
"#,
            &[
                ("g.c", "void f(){}\n"),
                ("c.c", "void f(){}\n"),
                ("n.c", "void g(){}\n"),
            ],
        );
        let corpus = Corpus::load(&manifest, dir.path()).unwrap();
        let count = |label: Label| {
            corpus
                .truths()
                .values()
                .filter(|t| t.algorithm == label)
                .count()
        };
        assert_eq!(
            count(Label::Gemm) + count(Label::Conv) + count(Label::Fft) + count(Label::None),
            corpus.len()
        );
    }
}
