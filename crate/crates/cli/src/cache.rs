//! Cache layout: weight-2 bases keyed by (N, k, precision) in the MFB1
//! format, reports keyed by a hash of the run configuration.

use hsm_core::weight2::{self, CuspformBasis};
use std::path::{Path, PathBuf};

pub fn cache_dir(explicit: Option<&str>) -> PathBuf {
    if let Some(d) = explicit {
        return PathBuf::from(d);
    }
    if let Ok(d) = std::env::var("HSM_CACHE") {
        return PathBuf::from(d);
    }
    PathBuf::from("./.hsm-cache")
}

pub fn basis_path(dir: &Path, n: u64, k: u32, precision: i64) -> PathBuf {
    dir.join(format!("s2_{n}_{k}_{precision}.mfb"))
}

/// Load a cached basis with at least the requested precision, or compute
/// and cache it. Corrupt cache files are rebuilt with a warning.
pub fn basis_with_precision(dir: &Path, n: u64, precision: i64) -> CuspformBasis {
    if let Ok(entries) = std::fs::read_dir(dir) {
        let mut best: Option<(i64, PathBuf)> = None;
        for e in entries.flatten() {
            let name = e.file_name().to_string_lossy().to_string();
            let Some(rest) = name.strip_prefix(&format!("s2_{n}_2_")) else {
                continue;
            };
            let Some(pstr) = rest.strip_suffix(".mfb") else {
                continue;
            };
            let Ok(p) = pstr.parse::<i64>() else { continue };
            if p >= precision && best.as_ref().map_or(true, |(bp, _)| p < *bp) {
                best = Some((p, e.path()));
            }
        }
        if let Some((_, path)) = best {
            match weight2::load_basis(&path) {
                Ok((basis, warnings)) => {
                    for w in warnings {
                        eprintln!("cache warning ({}): {w}", path.display());
                    }
                    if basis.level == n && basis.precision >= precision {
                        return basis;
                    }
                    eprintln!(
                        "cache warning: {} does not match its key; rebuilding",
                        path.display()
                    );
                }
                Err(e) => {
                    eprintln!(
                        "cache warning: failed to read {} ({e}); rebuilding",
                        path.display()
                    );
                }
            }
        }
    }
    let basis = weight2::q_basis(n, precision);
    let _ = std::fs::create_dir_all(dir);
    let path = basis_path(dir, n, 2, precision);
    if let Err(e) = weight2::save_basis(&path, &basis) {
        eprintln!("cache warning: could not write {} ({e})", path.display());
    }
    basis
}

/// FNV-1a, for config keys and input hashes.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn report_path(dir: &Path, key: u64) -> PathBuf {
    dir.join(format!("report_{key:016x}.json"))
}
