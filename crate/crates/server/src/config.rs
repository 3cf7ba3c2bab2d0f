use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use lexatlas::{load_atlas, load_dictionary, Atlas, BilingualDictionary};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("no atlas configured")]
    NoAtlas,
    #[error("{what} {path} does not exist")]
    Missing { what: &'static str, path: PathBuf },
    #[error("dictionary {source_lang}->{target_lang} is configured twice")]
    DuplicateDictionary { source_lang: String, target_lang: String },
    #[error("loading {path}: {source}")]
    Load { path: PathBuf, source: lexatlas::Error },
    #[error("atlas {path} declares language {found}, configured as {expected}")]
    LanguageMismatch { path: PathBuf, found: String, expected: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionaryConfig {
    pub source: String,
    pub target: String,
    pub path: PathBuf,
}

/// Contents of the `serve` TOML file.
///
/// ```toml
/// bind = "127.0.0.1:8080"
/// cors = ["http://localhost:5173"]
///
/// [atlases]
/// fr = "atlas-fr"
/// en = "atlas-en"
///
/// [[dictionaries]]
/// source = "fr"
/// target = "en"
/// path = "fr_en.tsv"
/// ```
///
/// Relative paths are resolved against the directory holding the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_bind")]
    pub bind: String,
    pub atlases: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub dictionaries: Vec<DictionaryConfig>,
    #[serde(default)]
    pub cors: Vec<String>,
}

fn default_bind() -> String {
    "127.0.0.1:8080".into()
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        for p in self.atlases.values_mut() {
            *p = base.join(&*p);
        }
        for d in &mut self.dictionaries {
            d.path = base.join(&d.path);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.atlases.is_empty() {
            return Err(ConfigError::NoAtlas);
        }
        for p in self.atlases.values() {
            if !p.is_dir() {
                return Err(ConfigError::Missing { what: "atlas", path: p.clone() });
            }
        }
        let mut pairs = std::collections::BTreeSet::new();
        for d in &self.dictionaries {
            if !d.path.is_file() {
                return Err(ConfigError::Missing { what: "dictionary", path: d.path.clone() });
            }
            if !pairs.insert((&d.source, &d.target)) {
                return Err(ConfigError::DuplicateDictionary {
                    source_lang: d.source.clone(),
                    target_lang: d.target.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Everything the handlers read. Immutable once loaded.
#[derive(Debug)]
pub struct Catalog {
    pub atlases: BTreeMap<String, Atlas>,
    pub dictionaries: BTreeMap<(String, String), BilingualDictionary>,
}

impl Catalog {
    pub fn load(cfg: &ServiceConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let mut atlases = BTreeMap::new();
        for (lang, path) in &cfg.atlases {
            let atlas = load_atlas(path).map_err(|source| ConfigError::Load { path: path.clone(), source })?;
            if &atlas.language != lang {
                return Err(ConfigError::LanguageMismatch {
                    path: path.clone(),
                    found: atlas.language.clone(),
                    expected: lang.clone(),
                });
            }
            atlases.insert(lang.clone(), atlas);
        }
        let mut dictionaries = BTreeMap::new();
        for d in &cfg.dictionaries {
            let load = || -> lexatlas::Result<BilingualDictionary> {
                load_dictionary(BufReader::new(File::open(&d.path)?), &d.source, &d.target)
            };
            let dict = load().map_err(|source| ConfigError::Load { path: d.path.clone(), source })?;
            dictionaries.insert((d.source.clone(), d.target.clone()), dict);
        }
        // an unconfigured reverse direction uses the inverse dictionary
        let inverses: Vec<_> = dictionaries
            .iter()
            .filter(|((s, t), _)| !dictionaries.contains_key(&(t.clone(), s.clone())))
            .map(|((s, t), d)| ((t.clone(), s.clone()), d.inverse()))
            .collect();
        dictionaries.extend(inverses);
        Ok(Catalog { atlases, dictionaries })
    }

    pub fn dictionary(&self, src: &str, tgt: &str) -> Option<&BilingualDictionary> {
        self.dictionaries.get(&(src.to_string(), tgt.to_string()))
    }
}
