//! On-disk cache of `Γ_p` values, one CSV file per `(p, K_w)`.
//!
//! ```text
//! p,K_w,count
//! 7,6,42
//! 0,1
//! 1,117648
//! ...
//! ```
//!
//! After the two header lines, each row is `m,residue` with
//! `residue = Γ_p(m) mod p^K_w`, sorted by `m`. A file that fails any check is
//! ignored with a warning and rewritten from fresh values.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use dwork_core::residue::big_pow;
use dwork_core::Engine;

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "DWORK_CACHE_DIR";

/// Rows per file that are recomputed from scratch when loading.
const SPOT_CHECKS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub p: u64,
    pub k: u32,
    pub entries: Vec<(BigUint, BigUint)>,
}

#[derive(Debug)]
pub enum CacheError {
    Io(io::Error),
    Corrupt(String),
}

impl std::fmt::Display for CacheError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CacheError::Io(e) => write!(f, "{e}"),
            CacheError::Corrupt(why) => f.write_str(why),
        }
    }
}

impl From<io::Error> for CacheError {
    fn from(e: io::Error) -> Self {
        CacheError::Io(e)
    }
}

impl From<csv::Error> for CacheError {
    fn from(e: csv::Error) -> Self {
        CacheError::Corrupt(e.to_string())
    }
}

fn corrupt<T>(why: impl Into<String>) -> Result<T, CacheError> {
    Err(CacheError::Corrupt(why.into()))
}

pub fn file_name(p: u64, k: u32) -> String {
    format!("gamma_p{p}_k{k}.csv")
}

pub fn path_for(dir: &Path, p: u64, k: u32) -> PathBuf {
    dir.join(file_name(p, k))
}

/// `Γ_p(m) mod p`, which only depends on `m mod p`.
fn gamma_mod_p(m: &BigUint, p: u64) -> u64 {
    let r = (m % p).to_u64().expect("residue below p");
    if r == 0 {
        return 1;
    }
    let fact = (1..r).fold(1u64, |acc, j| acc * j % p);
    if r % 2 == 1 {
        (p - fact) % p
    } else {
        fact
    }
}

impl CacheEntry {
    pub fn write(&self, path: &Path) -> Result<(), CacheError> {
        let tmp = path.with_extension("csv.tmp");
        {
            let mut w = csv::WriterBuilder::new().flexible(true).from_path(&tmp)?;
            w.write_record(["p", "K_w", "count"])?;
            w.write_record([self.p.to_string(), self.k.to_string(), self.entries.len().to_string()])?;
            for (m, g) in &self.entries {
                w.write_record([m.to_string(), g.to_string()])?;
            }
            w.flush()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Parses a file and checks its structure. Values are checked by [`CacheEntry::validate`].
    pub fn read(path: &Path) -> Result<Self, CacheError> {
        let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_path(path)?;
        let mut rows = r.records();
        let mut next = || -> Result<Option<csv::StringRecord>, CacheError> { Ok(rows.next().transpose()?) };
        match next()? {
            Some(h) if h.iter().collect::<Vec<_>>() == ["p", "K_w", "count"] => {}
            _ => return corrupt("missing header line p,K_w,count"),
        }
        let meta = next()?.ok_or_else(|| CacheError::Corrupt("missing p,K_w,count values".into()))?;
        if meta.len() != 3 {
            return corrupt("p,K_w,count line needs three fields");
        }
        let field = |i: usize| meta[i].parse::<u64>().map_err(|_| CacheError::Corrupt(format!("bad header field {:?}", &meta[i])));
        let (p, k, count) = (field(0)?, field(1)? as u32, field(2)? as usize);
        let mut entries = Vec::with_capacity(count);
        while let Some(row) = next()? {
            if row.len() != 2 {
                return corrupt(format!("row {} does not have two fields", entries.len() + 1));
            }
            let parse = |s: &str| s.parse::<BigUint>().map_err(|_| CacheError::Corrupt(format!("bad number {s:?}")));
            entries.push((parse(&row[0])?, parse(&row[1])?));
        }
        if entries.len() != count {
            return corrupt(format!("header promises {count} rows, found {}", entries.len()));
        }
        Ok(CacheEntry { p, k, entries })
    }

    /// Checks ranges, ordering, units, every value mod `p`, and recomputes a spread of rows.
    pub fn validate(&self, engine: &Engine) -> Result<(), CacheError> {
        let modulus = big_pow(self.p, self.k);
        if self.entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return corrupt("lifts are not strictly increasing");
        }
        for (m, g) in &self.entries {
            if *m >= modulus || *g >= modulus {
                return corrupt(format!("row {m} is out of range for p^K"));
            }
            if (g % self.p).is_zero() {
                return corrupt(format!("value at {m} is not a unit"));
            }
            if (g % self.p).to_u64() != Some(gamma_mod_p(m, self.p)) {
                return corrupt(format!("value at {m} is wrong modulo p"));
            }
        }
        let len = self.entries.len();
        let picks = len.min(SPOT_CHECKS);
        for i in 0..picks {
            let (m, g) = &self.entries[i * len / picks];
            let fresh = engine.gamma_fresh(self.p, self.k, m).map_err(|e| CacheError::Corrupt(e.to_string()))?;
            if fresh != *g {
                return corrupt(format!("value at {m} does not match a fresh evaluation"));
            }
        }
        Ok(())
    }
}

/// Cache location from the flag, else the environment.
pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

/// Seeds `engine` from the file for `(p, k)` if it exists and validates.
/// Returns the number of rows loaded.
pub fn load(engine: &Engine, dir: &Path, p: u64, k: u32, warn: &mut dyn Write) -> usize {
    let path = path_for(dir, p, k);
    if !path.exists() {
        return 0;
    }
    let checked = CacheEntry::read(&path).and_then(|c| {
        if c.p != p || c.k != k {
            return corrupt(format!("file holds p={}, K_w={}", c.p, c.k));
        }
        c.validate(engine)?;
        Ok(c)
    });
    match checked {
        Ok(c) => {
            engine.seed_gamma(p, k, &c.entries).expect("validated entries seed cleanly");
            c.entries.len()
        }
        Err(e) => {
            let _ = writeln!(warn, "warning: ignoring gamma cache {}: {e}; recomputing", path.display());
            0
        }
    }
}

/// Writes every memoized value the engine holds for `(p, k)`.
pub fn store(engine: &Engine, dir: &Path, p: u64, k: u32) -> Result<(), CacheError> {
    let entries = engine.gamma_entries(p, k);
    if entries.is_empty() {
        return Ok(());
    }
    fs::create_dir_all(dir)?;
    CacheEntry { p, k, entries }.write(&path_for(dir, p, k))
}
