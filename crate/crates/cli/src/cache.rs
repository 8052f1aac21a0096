// SPDX-License-Identifier: Apache-2.0

//! Content-addressed prime-table cache.

use std::path::{Path, PathBuf};

use cheb_core::PrimeTable;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn prime_cache_path(dir: &Path, x_max: u64) -> PathBuf {
    let digest = Sha256::digest(format!("CHEBPRIMES1|x_max={x_max}").as_bytes());
    dir.join(format!("primes-{}.bin", hex::encode(&digest[..8])))
}

/// Builds (or loads from `dir`) a prime table to `x_max`.
pub fn prime_table(x_max: f64, dir: Option<&Path>) -> Result<PrimeTable, CliError> {
    if !(x_max.is_finite() && x_max >= 2.0) {
        return Err(CliError::Config(format!("x_max must be at least 2, got {x_max}")));
    }
    let n = x_max.floor() as u64;
    let Some(dir) = dir else {
        return Ok(PrimeTable::build(n)?);
    };
    std::fs::create_dir_all(dir)?;
    let path = prime_cache_path(dir, n);
    if path.exists() {
        if let Ok(t) = PrimeTable::read_cache(&path) {
            if t.x_max() == n {
                return Ok(t);
            }
        }
    }
    let t = PrimeTable::build(n)?;
    t.write_cache(&path)?;
    Ok(t)
}
