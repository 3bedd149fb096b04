//! Optional read-through factorization cache.
//!
//! Records are stored one per line as `n<TAB>p1^a1,p2^a2,...` in ASCII
//! decimal, in the file `factors.tsv` under the directory named by
//! `POWREP_CACHE_DIR`. A missing file is an empty cache. Records that fail to
//! parse or do not multiply back to `n` are ignored, so the cache can only
//! ever return what `factor` would have computed.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;

use super::{factor_biguint, FactoredInteger, PrimePower};
use crate::error::{Error, Result};

pub const CACHE_ENV_VAR: &str = "POWREP_CACHE_DIR";
pub const CACHE_FILE_NAME: &str = "factors.tsv";

#[derive(Debug, Default)]
pub struct FactorCache {
    file: Option<PathBuf>,
    entries: Mutex<HashMap<BigUint, FactoredInteger>>,
}

impl FactorCache {
    /// In-memory cache with no backing file.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Cache backed by `dir/factors.tsv`; existing records are loaded.
    pub fn open(dir: impl AsRef<Path>) -> Self {
        let file = dir.as_ref().join(CACHE_FILE_NAME);
        let entries = match fs::read_to_string(&file) {
            Ok(text) => text.lines().filter_map(parse_record).collect(),
            Err(_) => HashMap::new(),
        };
        FactorCache {
            file: Some(file),
            entries: Mutex::new(entries),
        }
    }

    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_ENV_VAR) {
            Some(dir) if !dir.is_empty() => Self::open(dir),
            _ => Self::in_memory(),
        }
    }

    /// Process-wide cache configured from the environment on first use.
    pub fn global() -> &'static FactorCache {
        static GLOBAL: OnceLock<FactorCache> = OnceLock::new();
        GLOBAL.get_or_init(FactorCache::from_env)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn factor(&self, n: &BigUint) -> Result<FactoredInteger> {
        if let Some(hit) = self.entries.lock().expect("cache lock").get(n) {
            return Ok(hit.clone());
        }
        let f = factor_biguint(n)?;
        let fresh = self
            .entries
            .lock()
            .expect("cache lock")
            .insert(n.clone(), f.clone())
            .is_none();
        if fresh {
            if let Some(path) = &self.file {
                // a read-only cache location degrades to in-memory caching
                let _ = append_record(path, &f);
            }
        }
        Ok(f)
    }
}

fn append_record(path: &Path, f: &FactoredInteger) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut out = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(out, "{}\t{}", f.value(), f)
}

pub(crate) fn parse_record(line: &str) -> Option<(BigUint, FactoredInteger)> {
    let (n, factors) = line.split_once('\t')?;
    let n: BigUint = n.trim().parse().ok()?;
    let factors = parse_factor_list(factors.trim()).ok()?;
    let f = FactoredInteger::from_factors(factors).ok()?;
    (f.value() == &n).then_some((n, f))
}

fn parse_factor_list(s: &str) -> Result<Vec<PrimePower>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            let (p, a) = item
                .split_once('^')
                .ok_or_else(|| Error::Parse(format!("bad factor {item:?}")))?;
            Ok(PrimePower {
                prime: p
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad prime {p:?}")))?,
                exp: a
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent {a:?}")))?,
            })
        })
        .collect()
}
