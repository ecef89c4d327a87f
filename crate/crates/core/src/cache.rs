//! On-disk store for transition matrices.
//!
//! One JSON file per `(weight, from, to)` under a subdirectory named after
//! the value of α. Writes go to a temporary file that is then renamed into
//! place, so a concurrent reader sees either nothing or a complete file.
//! Two processes computing the same entry write identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactscalar::Coeff;
use crate::partitions::{partitions_cached, Partition};
use crate::symfunc::{Basis, TransitionMatrix};

pub const FORMAT_VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "JACKVERTEX_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".jackvertex-cache";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed cache file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionCache {
    root: PathBuf,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct EntryRepr {
    row: Partition,
    col: Partition,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct FileRepr {
    format_version: u32,
    alpha: String,
    weight: u32,
    from: Basis,
    to: Basis,
    entries: Vec<EntryRepr>,
}

/// Entry counts per α tag and weight.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CacheStatus {
    pub entries: BTreeMap<String, BTreeMap<u32, usize>>,
}

impl CacheStatus {
    pub fn total(&self) -> usize {
        self.entries.values().flat_map(|m| m.values()).sum()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CacheError + '_ {
    move |source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Directory-safe rendering of an α value: `1/2` becomes `alpha-1_2`.
pub fn alpha_tag(alpha: &str) -> String {
    let body: String = alpha
        .chars()
        .map(|c| match c {
            '/' => '_',
            c if c.is_ascii_alphanumeric() || c == '-' => c,
            _ => '.',
        })
        .collect();
    format!("alpha-{body}")
}

impl TransitionCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        TransitionCache { root: root.into() }
    }

    /// Root from the environment variable, falling back to the default
    /// relative directory.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(CACHE_DIR_ENV).map_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR), PathBuf::from))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn file_path(&self, alpha: &str, weight: u32, from: Basis, to: Basis) -> PathBuf {
        self.root
            .join(alpha_tag(alpha))
            .join(format!("w{weight:03}-{from}-{to}.json"))
    }

    /// Returns `None` when the file is absent or written by another format
    /// version.
    pub fn load<C: Coeff>(
        &self,
        alpha: &str,
        weight: u32,
        from: Basis,
        to: Basis,
    ) -> Result<Option<TransitionMatrix<C>>, CacheError> {
        let path = self.file_path(alpha, weight, from, to);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io_err(&path)(e)),
        };
        let bad = |reason: String| CacheError::Format {
            path: path.clone(),
            reason,
        };
        let repr: FileRepr = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        if repr.format_version != FORMAT_VERSION {
            return Ok(None);
        }
        if repr.alpha != alpha || repr.weight != weight || repr.from != from || repr.to != to {
            return Err(bad("header does not match file name".into()));
        }
        let parts = partitions_cached(weight);
        let index = |p: &Partition| {
            parts
                .iter()
                .position(|q| q == p)
                .ok_or_else(|| bad(format!("partition {p} has the wrong weight")))
        };
        let mut entries = vec![vec![C::zero(); parts.len()]; parts.len()];
        for e in &repr.entries {
            let c = C::parse_text(&e.coeff).map_err(|err| bad(err.to_string()))?;
            entries[index(&e.row)?][index(&e.col)?] = c;
        }
        TransitionMatrix::new(weight, from, to, entries)
            .map(Some)
            .map_err(|e| bad(e.to_string()))
    }

    pub fn store<C: Coeff>(&self, alpha: &str, m: &TransitionMatrix<C>) -> Result<(), CacheError> {
        let path = self.file_path(alpha, m.weight(), m.from_basis(), m.to_basis());
        let dir = path.parent().expect("cache files live in a subdirectory");
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let parts = m.partitions();
        let mut entries = Vec::new();
        for (i, row) in m.entries().iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    entries.push(EntryRepr {
                        row: parts[i].clone(),
                        col: parts[j].clone(),
                        coeff: c.to_string(),
                    });
                }
            }
        }
        let repr = FileRepr {
            format_version: FORMAT_VERSION,
            alpha: alpha.to_string(),
            weight: m.weight(),
            from: m.from_basis(),
            to: m.to_basis(),
            entries,
        };
        let text = serde_json::to_string(&repr).expect("cache entries serialize");
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
        tmp.write_all(text.as_bytes()).map_err(io_err(&path))?;
        tmp.persist(&path).map_err(|e| io_err(&path)(e.error))?;
        Ok(())
    }

    pub fn status(&self) -> Result<CacheStatus, CacheError> {
        let mut status = CacheStatus::default();
        let tags = match fs::read_dir(&self.root) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(status),
            Err(e) => return Err(io_err(&self.root)(e)),
        };
        for tag in tags {
            let tag = tag.map_err(io_err(&self.root))?;
            if !tag.path().is_dir() {
                continue;
            }
            let name = tag.file_name().to_string_lossy().into_owned();
            for file in fs::read_dir(tag.path()).map_err(io_err(&tag.path()))? {
                let file = file.map_err(io_err(&tag.path()))?;
                let fname = file.file_name().to_string_lossy().into_owned();
                let weight = fname
                    .strip_prefix('w')
                    .and_then(|r| r.split('-').next())
                    .and_then(|w| w.parse::<u32>().ok());
                if let (Some(w), true) = (weight, fname.ends_with(".json")) {
                    *status
                        .entries
                        .entry(name.clone())
                        .or_default()
                        .entry(w)
                        .or_default() += 1;
                }
            }
        }
        Ok(status)
    }

    /// Removes every cached matrix; returns how many files were deleted.
    pub fn clear(&self) -> Result<usize, CacheError> {
        let removed = self.status()?.total();
        match fs::remove_dir_all(&self.root) {
            Ok(()) => Ok(removed),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(0),
            Err(e) => Err(io_err(&self.root)(e)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactscalar::RatFn;
    use crate::symfunc::SymRing;

    #[test]
    fn store_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TransitionCache::new(dir.path());
        let ring = SymRing::symbolic().with_disk_cache(cache.clone());
        let m = ring
            .transition_matrix(4, Basis::GenHomogeneous, Basis::JackQ)
            .unwrap();
        let loaded = cache
            .load::<RatFn>("a", 4, Basis::GenHomogeneous, Basis::JackQ)
            .unwrap()
            .unwrap();
        assert_eq!(loaded, *m);
        let status = cache.status().unwrap();
        assert_eq!(status.total(), 1);
        assert_eq!(status.entries["alpha-a"][&4], 1);
        assert_eq!(cache.clear().unwrap(), 1);
        assert_eq!(cache.status().unwrap().total(), 0);
    }

    #[test]
    fn tags() {
        assert_eq!(alpha_tag("a"), "alpha-a");
        assert_eq!(alpha_tag("1/2"), "alpha-1_2");
        assert_eq!(alpha_tag("-3"), "alpha--3");
    }
}
