//! File-backed evaluation store with optimistic revisions.
//!
//! Each evaluation lives in `<data dir>/<id>.json`. The store keeps the
//! loaded document and a revision counter per evaluation; writes to one
//! evaluation are serialized by its own mutex and persisted before the lock
//! is released.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use anameter::gridmodel::{GridError, LoadError};
use anameter::taxonomy::{load_taxonomy, slugify, TaxonomyError};
use anameter::{load_evaluation, save_evaluation, Evaluation, Mark, Mode, Taxonomy, TaxonomyRegistry};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Subdirectory of the data dir holding extra taxonomy documents.
pub const TAXONOMY_DIR: &str = "taxonomies";

/// File stem used for an evaluation: `gps-nav-alice-adaptability`.
pub fn evaluation_id(system: &str, evaluator: &str, mode: Mode) -> String {
    format!("{}-{}-{}", slugify(system), slugify(evaluator), mode)
}

pub fn evaluation_path(data_dir: &Path, id: &str) -> PathBuf {
    data_dir.join(format!("{id}.json"))
}

#[derive(Debug, Error)]
pub enum RegistryLoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Taxonomy { path: PathBuf, source: TaxonomyError },
    #[error("{path}: {source}")]
    Duplicate {
        path: PathBuf,
        source: anameter::taxonomy::RegistryError,
    },
}

/// The bundled taxonomy plus every `*.json` under `<data dir>/taxonomies`.
pub fn load_registry(data_dir: &Path) -> Result<TaxonomyRegistry, RegistryLoadError> {
    let mut registry = TaxonomyRegistry::default();
    let dir = data_dir.join(TAXONOMY_DIR);
    if !dir.is_dir() {
        return Ok(registry);
    }
    let io_err = |path: &Path| {
        let path = path.to_owned();
        move |source| RegistryLoadError::Io { path, source }
    };
    let mut paths: Vec<_> = fs::read_dir(&dir)
        .map_err(io_err(&dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    for path in paths {
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        let t = load_taxonomy(&bytes).map_err(|source| RegistryLoadError::Taxonomy {
            path: path.clone(),
            source,
        })?;
        registry
            .insert(t)
            .map_err(|source| RegistryLoadError::Duplicate { path, source })?;
    }
    Ok(registry)
}

/// Writes through a temporary file so readers never see a partial document.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// One requested edit in a patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum Change {
    Mark {
        sub_aspect: String,
        sub_factor: String,
        aspect_element: String,
        factor_element: String,
        checked: bool,
    },
    Na {
        sub_aspect: String,
        sub_factor: String,
        na: bool,
    },
}

/// Marks removed because a change set a micro-grid N/A.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClearedMarks {
    /// Index of the change that cleared them.
    pub change: usize,
    pub sub_aspect: String,
    pub sub_factor: String,
    pub marks: Vec<Mark>,
}

#[derive(Debug, Clone)]
pub struct VersionedEvaluation {
    pub id: String,
    pub revision: u64,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone)]
pub struct PatchOutcome {
    pub current: VersionedEvaluation,
    pub cleared: Vec<ClearedMarks>,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("evaluation {0:?} not found")]
    NotFound(String),
    #[error("evaluation {0:?} already exists")]
    Exists(String),
    #[error("stale revision {given}; current revision is {current}")]
    StaleRevision { given: u64, current: u64 },
    #[error("change {index} rejected: {source}")]
    Rejected { index: usize, source: GridError },
    #[error("unknown taxonomy {0}")]
    UnknownTaxonomy(String),
    #[error("evaluation {id:?} cannot be loaded: {source}")]
    Load { id: String, source: LoadError },
    #[error("storage: {0}")]
    Io(#[from] io::Error),
}

struct Entry {
    revision: u64,
    evaluation: Evaluation,
}

pub struct Store {
    data_dir: PathBuf,
    registry: TaxonomyRegistry,
    entries: RwLock<HashMap<String, Arc<Mutex<Entry>>>>,
}

impl Store {
    pub fn open(data_dir: impl Into<PathBuf>, registry: TaxonomyRegistry) -> io::Result<Self> {
        let data_dir = data_dir.into();
        fs::create_dir_all(&data_dir)?;
        Ok(Self {
            data_dir,
            registry,
            entries: RwLock::new(HashMap::new()),
        })
    }

    pub fn data_dir(&self) -> &Path {
        &self.data_dir
    }

    pub fn registry(&self) -> &TaxonomyRegistry {
        &self.registry
    }

    pub fn taxonomy_of(&self, e: &Evaluation) -> Result<&Taxonomy, StoreError> {
        self.registry
            .resolve(&e.taxonomy)
            .ok_or_else(|| StoreError::UnknownTaxonomy(e.taxonomy.to_string()))
    }

    /// Ids of every evaluation document in the data dir, sorted.
    pub fn ids(&self) -> Result<Vec<String>, StoreError> {
        let mut ids: Vec<String> = fs::read_dir(&self.data_dir)?
            .filter_map(|e| e.ok())
            .filter(|e| e.file_type().is_ok_and(|t| t.is_file()))
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                let id = name.strip_suffix(".json")?;
                valid_id(id).then(|| id.to_owned())
            })
            .collect();
        ids.sort();
        Ok(ids)
    }

    fn entry(&self, id: &str) -> Result<Arc<Mutex<Entry>>, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::NotFound(id.to_owned()));
        }
        if let Some(e) = self.entries.read().expect("lock").get(id) {
            return Ok(Arc::clone(e));
        }
        let mut entries = self.entries.write().expect("lock");
        if let Some(e) = entries.get(id) {
            return Ok(Arc::clone(e));
        }
        let path = evaluation_path(&self.data_dir, id);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::NotFound(id.to_owned()))
            }
            Err(e) => return Err(e.into()),
        };
        let evaluation = load_evaluation(&bytes, &self.registry).map_err(|source| StoreError::Load {
            id: id.to_owned(),
            source,
        })?;
        let entry = Arc::new(Mutex::new(Entry {
            revision: 1,
            evaluation,
        }));
        entries.insert(id.to_owned(), Arc::clone(&entry));
        Ok(entry)
    }

    pub fn get(&self, id: &str) -> Result<VersionedEvaluation, StoreError> {
        let entry = self.entry(id)?;
        let e = entry.lock().expect("lock");
        Ok(VersionedEvaluation {
            id: id.to_owned(),
            revision: e.revision,
            evaluation: e.evaluation.clone(),
        })
    }

    /// Creates and persists an empty evaluation. Fails if the file exists.
    pub fn create(
        &self,
        taxonomy: &str,
        system: &str,
        evaluator: &str,
        mode: Mode,
    ) -> Result<VersionedEvaluation, StoreError> {
        let t = self
            .registry
            .lookup(taxonomy)
            .map_err(|_| StoreError::UnknownTaxonomy(taxonomy.to_owned()))?;
        let id = evaluation_id(system, evaluator, mode);
        let evaluation = Evaluation::new(t, system, evaluator, mode);

        let mut entries = self.entries.write().expect("lock");
        let path = evaluation_path(&self.data_dir, &id);
        let mut file = match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => return Err(StoreError::Exists(id)),
            Err(e) => return Err(e.into()),
        };
        file.write_all(&save_evaluation(&evaluation))?;
        file.sync_all()?;
        entries.insert(
            id.clone(),
            Arc::new(Mutex::new(Entry {
                revision: 1,
                evaluation: evaluation.clone(),
            })),
        );
        Ok(VersionedEvaluation {
            id,
            revision: 1,
            evaluation,
        })
    }

    /// Applies all changes or none. An empty change list is a no-op that
    /// still checks the revision.
    pub fn patch(&self, id: &str, revision: u64, changes: &[Change]) -> Result<PatchOutcome, StoreError> {
        let entry = self.entry(id)?;
        let mut guard = entry.lock().expect("lock");
        if guard.revision != revision {
            return Err(StoreError::StaleRevision {
                given: revision,
                current: guard.revision,
            });
        }
        if changes.is_empty() {
            return Ok(PatchOutcome {
                current: VersionedEvaluation {
                    id: id.to_owned(),
                    revision: guard.revision,
                    evaluation: guard.evaluation.clone(),
                },
                cleared: Vec::new(),
            });
        }

        let taxonomy = self.taxonomy_of(&guard.evaluation)?;
        let mut next = guard.evaluation.clone();
        let mut cleared = Vec::new();
        for (index, change) in changes.iter().enumerate() {
            let result = match change {
                Change::Mark {
                    sub_aspect,
                    sub_factor,
                    aspect_element,
                    factor_element,
                    checked,
                } => next.set_mark(taxonomy, sub_aspect, sub_factor, aspect_element, factor_element, *checked),
                Change::Na {
                    sub_aspect,
                    sub_factor,
                    na,
                } => next.set_na(taxonomy, sub_aspect, sub_factor, *na).map(|marks| {
                    if !marks.is_empty() {
                        cleared.push(ClearedMarks {
                            change: index,
                            sub_aspect: sub_aspect.clone(),
                            sub_factor: sub_factor.clone(),
                            marks,
                        });
                    }
                }),
            };
            result.map_err(|source| StoreError::Rejected { index, source })?;
        }

        write_atomically(&evaluation_path(&self.data_dir, id), &save_evaluation(&next))?;
        guard.evaluation = next;
        guard.revision += 1;
        Ok(PatchOutcome {
            current: VersionedEvaluation {
                id: id.to_owned(),
                revision: guard.revision,
                evaluation: guard.evaluation.clone(),
            },
            cleared,
        })
    }
}

fn valid_id(id: &str) -> bool {
    anameter::taxonomy::is_slug(id)
}
