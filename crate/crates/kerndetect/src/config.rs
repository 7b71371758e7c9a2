//! Run configuration: defaults, optional TOML config file, CLI overrides.
//! Precedence is flags > config file > defaults; every flag has a
//! config-file equivalent.

use crate::client::{Mode, ModelConfig, DEFAULT_BASE_URL};
use crate::prompt::Algorithm;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("unknown algorithm \"{0}\" (gemm|conv|fft)")]
    BadQuery(String),
    #[error("{0}")]
    BadMode(String),
}

/// TOML config-file schema; every field mirrors a CLI flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub manifest: Option<PathBuf>,
    pub corpus_root: Option<PathBuf>,
    pub strategy: Option<String>,
    pub queries: Option<Vec<String>>,
    pub mode: Option<String>,
    pub model: Option<String>,
    pub temperature: Option<f64>,
    pub top_p: Option<f64>,
    pub max_tokens: Option<u32>,
    pub context_window: Option<u32>,
    pub parallelism: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub base_url: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&raw).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// CLI-provided overrides; `None` means "not given on the command line".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub manifest: Option<PathBuf>,
    pub corpus_root: Option<PathBuf>,
    pub strategy: Option<String>,
    pub queries: Option<Vec<String>>,
    pub mode: Option<Mode>,
    pub model: Option<String>,
    pub temperature: Option<f64>,
    pub top_p: Option<f64>,
    pub max_tokens: Option<u32>,
    pub context_window: Option<u32>,
    pub parallelism: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub base_url: Option<String>,
}

/// Fully resolved run settings. Defaults reproduce the benchmark setup:
/// gpt-3.5-turbo-16k, temperature 0.0, top_p 1.0, max_tokens 512, 16k
/// window, all three queries, replay mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub corpus_root: Option<PathBuf>,
    pub strategy: String,
    pub queries: Vec<Algorithm>,
    pub mode: Mode,
    pub model: ModelConfig,
    pub parallelism: usize,
    pub cache_dir: PathBuf,
    pub out_dir: PathBuf,
    pub base_url: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest: None,
            corpus_root: None,
            strategy: "direct".into(),
            queries: Algorithm::ALL.to_vec(),
            mode: Mode::Replay,
            model: ModelConfig::default(),
            parallelism: 4,
            cache_dir: PathBuf::from("cache"),
            out_dir: PathBuf::from("out"),
            base_url: DEFAULT_BASE_URL.into(),
        }
    }
}

impl RunConfig {
    /// Merge defaults, then the config file, then CLI overrides.
    pub fn resolve(flags: &Overrides, file: &FileConfig) -> Result<Self, ConfigError> {
        let mut config = RunConfig::default();

        // config file layer
        if let Some(v) = &file.manifest {
            config.manifest = Some(v.clone());
        }
        if let Some(v) = &file.corpus_root {
            config.corpus_root = Some(v.clone());
        }
        if let Some(v) = &file.strategy {
            config.strategy = v.clone();
        }
        if let Some(v) = &file.queries {
            config.queries = parse_queries(v)?;
        }
        if let Some(v) = &file.mode {
            config.mode = v.parse::<Mode>().map_err(ConfigError::BadMode)?;
        }
        if let Some(v) = &file.model {
            config.model.model_id = v.clone();
        }
        if let Some(v) = file.temperature {
            config.model.temperature = v;
        }
        if let Some(v) = file.top_p {
            config.model.top_p = v;
        }
        if let Some(v) = file.max_tokens {
            config.model.max_output_tokens = v;
        }
        if let Some(v) = file.context_window {
            config.model.context_window = v;
        }
        if let Some(v) = file.parallelism {
            config.parallelism = v;
        }
        if let Some(v) = &file.cache_dir {
            config.cache_dir = v.clone();
        }
        if let Some(v) = &file.out_dir {
            config.out_dir = v.clone();
        }
        if let Some(v) = &file.base_url {
            config.base_url = v.clone();
        }

        // flag layer
        if let Some(v) = &flags.manifest {
            config.manifest = Some(v.clone());
        }
        if let Some(v) = &flags.corpus_root {
            config.corpus_root = Some(v.clone());
        }
        if let Some(v) = &flags.strategy {
            config.strategy = v.clone();
        }
        if let Some(v) = &flags.queries {
            config.queries = parse_queries(v)?;
        }
        if let Some(v) = flags.mode {
            config.mode = v;
        }
        if let Some(v) = &flags.model {
            config.model.model_id = v.clone();
        }
        if let Some(v) = flags.temperature {
            config.model.temperature = v;
        }
        if let Some(v) = flags.top_p {
            config.model.top_p = v;
        }
        if let Some(v) = flags.max_tokens {
            config.model.max_output_tokens = v;
        }
        if let Some(v) = flags.context_window {
            config.model.context_window = v;
        }
        if let Some(v) = flags.parallelism {
            config.parallelism = v;
        }
        if let Some(v) = &flags.cache_dir {
            config.cache_dir = v.clone();
        }
        if let Some(v) = &flags.out_dir {
            config.out_dir = v.clone();
        }
        if let Some(v) = &flags.base_url {
            config.base_url = v.clone();
        }

        Ok(config)
    }

    /// Root for resolving manifest-relative unit paths: explicit flag or
    /// the manifest's directory.
    pub fn effective_corpus_root(&self) -> Option<PathBuf> {
        self.corpus_root.clone().or_else(|| {
            self.manifest
                .as_ref()
                .map(|m| m.parent().unwrap_or(Path::new(".")).to_path_buf())
        })
    }
}

fn parse_queries(keys: &[String]) -> Result<Vec<Algorithm>, ConfigError> {
    let mut queries = Vec::new();
    for key in keys {
        let algorithm =
            Algorithm::from_key(key).ok_or_else(|| ConfigError::BadQuery(key.clone()))?;
        if !queries.contains(&algorithm) {
            queries.push(algorithm);
        }
    }
    Ok(queries)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL_FILE: &str = r#"
manifest = "corpus/manifest.toml"
corpus_root = "corpus"
strategy = "explain-then-ask"
queries = ["gemm", "fft"]
mode = "record"
model = "other-model"
temperature = 0.5
top_p = 0.9
max_tokens = 256
context_window = 8192
parallelism = 2
cache_dir = "my-cache"
out_dir = "my-out"
base_url = "http://localhost:9000/v1"
"#;

    #[test]
    fn defaults_reproduce_benchmark_settings() {
        let config = RunConfig::default();
        assert_eq!(config.model.model_id, "gpt-3.5-turbo-16k");
        assert_eq!(config.model.temperature, 0.0);
        assert_eq!(config.model.top_p, 1.0);
        assert_eq!(config.model.max_output_tokens, 512);
        assert_eq!(config.model.context_window, 16_384);
        assert_eq!(config.queries, Algorithm::ALL.to_vec());
        assert_eq!(config.mode, Mode::Replay);
    }

    #[test]
    fn every_flag_has_a_config_file_equivalent() {
        let file: FileConfig = toml::from_str(FULL_FILE).unwrap();
        let config = RunConfig::resolve(&Overrides::default(), &file).unwrap();
        assert_eq!(config.manifest.as_deref(), Some(Path::new("corpus/manifest.toml")));
        assert_eq!(config.corpus_root.as_deref(), Some(Path::new("corpus")));
        assert_eq!(config.strategy, "explain-then-ask");
        assert_eq!(config.queries, vec![Algorithm::Gemm, Algorithm::Fft]);
        assert_eq!(config.mode, Mode::Record);
        assert_eq!(config.model.model_id, "other-model");
        assert_eq!(config.model.temperature, 0.5);
        assert_eq!(config.model.top_p, 0.9);
        assert_eq!(config.model.max_output_tokens, 256);
        assert_eq!(config.model.context_window, 8192);
        assert_eq!(config.parallelism, 2);
        assert_eq!(config.cache_dir, PathBuf::from("my-cache"));
        assert_eq!(config.out_dir, PathBuf::from("my-out"));
        assert_eq!(config.base_url, "http://localhost:9000/v1");
    }

    #[test]
    fn flags_override_config_file() {
        let file: FileConfig = toml::from_str(FULL_FILE).unwrap();
        let flags = Overrides {
            strategy: Some("direct".into()),
            temperature: Some(0.0),
            mode: Some(Mode::Replay),
            queries: Some(vec!["conv".into()]),
            ..Default::default()
        };
        let config = RunConfig::resolve(&flags, &file).unwrap();
        assert_eq!(config.strategy, "direct");
        assert_eq!(config.model.temperature, 0.0);
        assert_eq!(config.mode, Mode::Replay);
        assert_eq!(config.queries, vec![Algorithm::Conv]);
        // untouched flag falls back to the file layer
        assert_eq!(config.model.model_id, "other-model");
    }

    #[test]
    fn bad_query_is_rejected() {
        let flags = Overrides {
            queries: Some(vec!["sort".into()]),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(&flags, &FileConfig::default()),
            Err(ConfigError::BadQuery(_))
        ));
    }

    #[test]
    fn corpus_root_defaults_to_manifest_directory() {
        let config = RunConfig {
            manifest: Some(PathBuf::from("fixtures/manifest.toml")),
            ..RunConfig::default()
        };
        assert_eq!(
            config.effective_corpus_root(),
            Some(PathBuf::from("fixtures"))
        );
    }
}
