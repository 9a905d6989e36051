//! On-disk cache of tabulated densities.
//!
//! JSON with a SHA-256 checksum over a canonical text rendering of the
//! numeric payload. Writes go to a temporary file in the target directory
//! and are renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::densities::{ChebLogInterpolant, DensityHandle, StableIndex};
use crate::error::{LevyError, Result};

pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    chain: Vec<[i64; 2]>,
    u_lo: f64,
    u_hi: f64,
    coeffs: Vec<f64>,
    tail_exponent: f64,
    origin_c: f64,
    origin_rho: f64,
    checksum: String,
}

impl CacheFile {
    fn digest(&self) -> String {
        // f64 Display is the shortest round-trip decimal
        let mut s = format!("version={}\nchain=", self.version);
        for [l, k] in &self.chain {
            s.push_str(&format!("{l}/{k};"));
        }
        s.push_str(&format!("\nu_lo={}\nu_hi={}\ncoeffs=", self.u_lo, self.u_hi));
        for c in &self.coeffs {
            s.push_str(&format!("{c},"));
        }
        s.push_str(&format!(
            "\ntail_exponent={}\norigin_c={}\norigin_rho={}\n",
            self.tail_exponent, self.origin_c, self.origin_rho
        ));
        hex::encode(Sha256::digest(s.as_bytes()))
    }
}

/// `$LEVY_CACHE_DIR`, or `.levy-cache` in the working directory.
pub fn cache_dir() -> PathBuf {
    std::env::var_os("LEVY_CACHE_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".levy-cache"))
}

fn cache_err(path: &Path, detail: impl Into<String>) -> LevyError {
    LevyError::Cache { path: path.to_path_buf(), detail: detail.into() }
}

pub fn cache_save(d: &DensityHandle, path: &Path) -> Result<()> {
    let interp = d.interpolant().ok_or_else(|| cache_err(path, "only tabulated densities can be cached"))?;
    let mut file = CacheFile {
        version: CACHE_VERSION,
        chain: d.chain().iter().map(|s| [s.l(), s.k()]).collect(),
        u_lo: interp.u_lo,
        u_hi: interp.u_hi,
        coeffs: interp.coeffs.clone(),
        tail_exponent: interp.tail_exponent,
        origin_c: interp.origin_c,
        origin_rho: interp.origin_rho,
        checksum: String::new(),
    };
    file.checksum = file.digest();
    let text = serde_json::to_string_pretty(&file).map_err(|e| cache_err(path, e.to_string()))?;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.write_all(b"\n")?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| cache_err(path, e.to_string()))?;
    Ok(())
}

pub fn cache_load(path: &Path) -> Result<DensityHandle> {
    let text = fs::read_to_string(path).map_err(|e| cache_err(path, e.to_string()))?;
    let file: CacheFile = serde_json::from_str(&text).map_err(|e| cache_err(path, format!("malformed: {e}")))?;
    if file.version != CACHE_VERSION {
        return Err(cache_err(path, format!("version {} is not {CACHE_VERSION}", file.version)));
    }
    if file.digest() != file.checksum {
        return Err(cache_err(path, "checksum mismatch"));
    }
    let chain = file
        .chain
        .iter()
        .map(|[l, k]| StableIndex::new(*l, *k))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| cache_err(path, e.to_string()))?;
    if file.coeffs.len() < 8 || !(file.u_lo < file.u_hi) {
        return Err(cache_err(path, "interpolant payload is inconsistent"));
    }
    let interp = ChebLogInterpolant {
        u_lo: file.u_lo,
        u_hi: file.u_hi,
        coeffs: file.coeffs,
        tail_exponent: file.tail_exponent,
        origin_c: file.origin_c,
        origin_rho: file.origin_rho,
    };
    DensityHandle::tabulated(chain, interp).map_err(|e| cache_err(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{cheb_nodes, g_half};

    fn sample() -> DensityHandle {
        let (lo, hi) = (-3.0, 5.0);
        let v: Vec<f64> = cheb_nodes(40, lo, hi).into_iter().map(|u| g_half(f64::exp(u)).ln()).collect();
        let i = ChebLogInterpolant::from_node_values(lo, hi, &v).unwrap();
        let c = vec![StableIndex::new(1, 2).unwrap(), StableIndex::new(1, 3).unwrap()];
        DensityHandle::tabulated(c, i).unwrap()
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.json");
        let d = sample();
        cache_save(&d, &path).unwrap();
        let back = cache_load(&path).unwrap();
        assert_eq!(back.alpha(), StableIndex::new(1, 6).unwrap());
        for x in [1e-4, 0.05, 1.0, 17.0, 1e6] {
            assert_eq!(d.pdf(x).unwrap().to_bits(), back.pdf(x).unwrap().to_bits());
        }
    }

    #[test]
    fn corrupted_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.json");
        cache_save(&sample(), &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["tail_exponent"] = serde_json::json!(1.25);
        fs::write(&path, v.to_string()).unwrap();
        let e = cache_load(&path).unwrap_err().to_string();
        assert!(e.contains("checksum"), "{e}");

        v["version"] = serde_json::json!(2);
        fs::write(&path, v.to_string()).unwrap();
        assert!(cache_load(&path).unwrap_err().to_string().contains("version"));

        fs::write(&path, "{ not json").unwrap();
        assert!(cache_load(&path).unwrap_err().to_string().contains("malformed"));
    }

    #[test]
    fn closed_forms_are_not_cacheable() {
        let dir = tempfile::tempdir().unwrap();
        let g = DensityHandle::closed(crate::densities::ClosedForm::Half);
        assert!(cache_save(&g, &dir.path().join("x.json")).is_err());
    }
}
