//! On-disk cache of Hecke matrices.
//!
//! One file per (field, level, weight, character, prime). The header records
//! all of these plus a hash of the quotient basis and of the payload; an entry
//! is used only if every field matches, so stale or damaged files are
//! recomputed and overwritten.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use bianchi::{hecke_matrix, FqMatrix, GaussianInt, HeckeMatrix, ManinSpace, QuotientSpace};
use sha2::{Digest, Sha256};

pub const CACHE_VERSION: u32 = 1;
const MAGIC: &str = "bianchi-hecke";

fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Hash of the quotient basis, which fixes the coordinates of every matrix.
pub fn basis_hash(space: &ManinSpace, q: &QuotientSpace) -> String {
    let mut s = format!("{} {} {}\n", space.field().descriptor(), q.ambient_dim(), space.dim_v());
    for c in q.basis_columns() {
        let _ = write!(s, "{c},");
    }
    sha256_hex(s.as_bytes())
}

/// The header fields in file order.
fn header(space: &ManinSpace, q: &QuotientSpace, prime: &GaussianInt) -> Vec<(&'static str, String)> {
    vec![
        ("field", space.field().descriptor()),
        ("level", space.table().level().to_string()),
        ("weight", space.weight().spec().to_string()),
        ("character", space.character().to_string()),
        ("prime", prime.to_string()),
        ("basis", basis_hash(space, q)),
        ("size", q.dim().to_string()),
    ]
}

#[derive(Clone, Debug)]
pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(MatrixCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// File for a matrix. The basis hash is left out of the name so that a
    /// changed basis overwrites the old entry instead of orphaning it.
    pub fn path(&self, space: &ManinSpace, prime: &GaussianInt) -> PathBuf {
        let id = format!(
            "{CACHE_VERSION}|{}|{}|{}|{}|{}",
            space.field().descriptor(),
            space.table().level(),
            space.weight().spec(),
            space.character(),
            prime
        );
        self.dir.join(format!("{}.hecke", &sha256_hex(id.as_bytes())[..32]))
    }

    /// A cached matrix, if present and consistent with the current space.
    pub fn load(&self, space: &ManinSpace, q: &QuotientSpace, prime: &GaussianInt) -> Option<HeckeMatrix> {
        let path = self.path(space, prime);
        let text = fs::read_to_string(&path).ok()?;
        match parse_entry(&text, space, q, prime) {
            Ok(m) => Some(m),
            Err(why) => {
                log::warn!("ignoring cache entry {}: {why}", path.display());
                None
            }
        }
    }

    /// Write a matrix atomically: a temporary file in the cache directory is
    /// renamed over the final name.
    pub fn store(&self, space: &ManinSpace, q: &QuotientSpace, m: &HeckeMatrix) -> io::Result<()> {
        let f = m.matrix.field();
        let mut payload = String::new();
        for r in 0..m.matrix.rows() {
            for (c, &x) in m.matrix.row(r).iter().enumerate() {
                if !x.is_zero() {
                    let _ = writeln!(payload, "{r} {c} {}", f.format(x));
                }
            }
        }
        let mut text = format!("{MAGIC} {CACHE_VERSION}\n");
        for (k, v) in header(space, q, &m.prime) {
            let _ = writeln!(text, "{k} {v}");
        }
        let _ = writeln!(text, "payload {}", sha256_hex(payload.as_bytes()));
        text.push_str(&payload);

        let path = self.path(space, &m.prime);
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("entry");
        let tmp = self.dir.join(format!(".{name}.{}.tmp", std::process::id()));
        let mut file = fs::File::create(&tmp)?;
        file.write_all(text.as_bytes())?;
        file.sync_all()?;
        drop(file);
        fs::rename(&tmp, &path)
    }

    /// Load `T_prime`, or compute and store it. The flag is true on a cache hit.
    pub fn get_or_compute(
        &self,
        prime: &GaussianInt,
        space: &ManinSpace,
        q: &QuotientSpace,
        threads: usize,
    ) -> bianchi::Result<(HeckeMatrix, bool)> {
        if let Some(m) = self.load(space, q, prime) {
            log::info!("T_{prime}: loaded from cache");
            return Ok((m, true));
        }
        let m = hecke_matrix(prime, space, q, threads)?;
        if let Err(e) = self.store(space, q, &m) {
            log::warn!("could not write cache entry for T_{prime}: {e}");
        }
        Ok((m, false))
    }
}

/// Compute `T_prime` through the cache when there is one.
pub fn hecke_via(
    cache: Option<&MatrixCache>,
    prime: &GaussianInt,
    space: &ManinSpace,
    q: &QuotientSpace,
    threads: usize,
) -> bianchi::Result<HeckeMatrix> {
    match cache {
        Some(c) => c.get_or_compute(prime, space, q, threads).map(|(m, _)| m),
        None => hecke_matrix(prime, space, q, threads),
    }
}

fn parse_entry(text: &str, space: &ManinSpace, q: &QuotientSpace, prime: &GaussianInt) -> Result<HeckeMatrix, String> {
    let mut lines = text.split_inclusive('\n');
    let first = lines.next().ok_or("empty file")?;
    if first.trim_end() != format!("{MAGIC} {CACHE_VERSION}") {
        return Err(format!("unexpected format line {:?}", first.trim_end()));
    }
    for (k, want) in header(space, q, prime) {
        let line = lines.next().ok_or("truncated header")?;
        let got = line.trim_end().strip_prefix(k).and_then(|v| v.strip_prefix(' '));
        if got != Some(want.as_str()) {
            return Err(format!("{k} mismatch"));
        }
    }
    let line = lines.next().ok_or("truncated header")?;
    let digest = line.trim_end().strip_prefix("payload ").ok_or("missing payload hash")?;
    let payload: String = lines.collect();
    if sha256_hex(payload.as_bytes()) != digest {
        return Err("payload hash mismatch".into());
    }
    let f = space.field();
    let n = q.dim();
    let mut m = FqMatrix::zeros(f, n, n);
    for line in payload.lines() {
        let mut it = line.split(' ');
        let (Some(r), Some(c), Some(x), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(format!("bad entry {line:?}"));
        };
        let r: usize = r.parse().map_err(|_| format!("bad row in {line:?}"))?;
        let c: usize = c.parse().map_err(|_| format!("bad column in {line:?}"))?;
        if r >= n || c >= n {
            return Err(format!("entry {line:?} out of range"));
        }
        m.set(r, c, f.parse(x).map_err(|e| e.to_string())?);
    }
    Ok(HeckeMatrix { prime: prime.clone(), matrix: m })
}
