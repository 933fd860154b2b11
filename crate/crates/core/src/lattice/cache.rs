//! Write-once disk cache of enumerated eigenspaces.
//!
//! One file per `(d, λ)`:
//!
//! ```text
//! offset  size  field
//! 0       4     magic  b"TQSP"
//! 4       4     format version, u32 LE (currently 1)
//! 8       4     dimension d, u32 LE
//! 12      8     λ, u64 LE
//! 20      8     point count, u64 LE
//! 28      8·d·count  coordinates, i64 LE, point-major
//! ```
//!
//! Files are written to a temporary name in the same directory and renamed
//! into place, so concurrent writers of the same key never expose a torn
//! file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use super::{enumerate_sphere, Eigenspace, LatticePoint};
use crate::error::{check_dim, Error, Result};

const MAGIC: &[u8; 4] = b"TQSP";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 28;

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Debug)]
pub struct SphereCache {
    dir: PathBuf,
}

impl SphereCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(SphereCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, d: usize, lambda: u64) -> PathBuf {
        self.dir.join(format!("sphere-d{d}-{lambda}.bin"))
    }

    pub fn load(&self, d: usize, lambda: u64) -> Result<Option<Eigenspace>> {
        let path = self.path_for(d, lambda);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        decode(&bytes, d, lambda).map(Some)
    }

    /// Stores `space` unless an entry for its key already exists.
    pub fn store(&self, space: &Eigenspace) -> Result<()> {
        let path = self.path_for(space.dim(), space.eigenvalue());
        if path.exists() {
            return Ok(());
        }
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}-{}",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed),
            path.file_name().and_then(|s| s.to_str()).unwrap_or("entry")
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&encode(space))?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn get_or_enumerate(&self, d: usize, lambda: u64) -> Result<Eigenspace> {
        if let Some(space) = self.load(d, lambda)? {
            return Ok(space);
        }
        let space = enumerate_sphere(d, lambda)?;
        self.store(&space)?;
        Ok(space)
    }
}

pub fn encode(space: &Eigenspace) -> Vec<u8> {
    let d = space.dim();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * d * space.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    out.extend_from_slice(&space.eigenvalue().to_le_bytes());
    out.extend_from_slice(&(space.len() as u64).to_le_bytes());
    for p in space.iter() {
        for c in p.as_slice() {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    out
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

fn read_u64(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode(bytes: &[u8], d: usize, lambda: u64) -> Result<Eigenspace> {
    check_dim(d)?;
    let bad = |msg: &str| Error::Cache(format!("sphere-d{d}-{lambda}: {msg}"));
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(bad("bad magic"));
    }
    if read_u32(bytes, 4) != VERSION {
        return Err(bad("unsupported version"));
    }
    if read_u32(bytes, 8) as usize != d || read_u64(bytes, 12) != lambda {
        return Err(bad("header does not match key"));
    }
    let count = read_u64(bytes, 20) as usize;
    if bytes.len() != HEADER_LEN + 8 * d * count {
        return Err(bad("truncated body"));
    }
    let mut points = Vec::with_capacity(count);
    let mut coords = [0i64; 4];
    for chunk in bytes[HEADER_LEN..].chunks_exact(8 * d) {
        for (k, c) in chunk.chunks_exact(8).enumerate() {
            coords[k] = i64::from_le_bytes(c.try_into().expect("8 bytes"));
        }
        let p = LatticePoint::new(&coords[..d])?;
        if p.norm_sq() as u64 != lambda {
            return Err(bad("point off the sphere"));
        }
        points.push(p);
    }
    if !points.windows(2).all(|w| w[0] < w[1]) {
        return Err(bad("points not sorted"));
    }
    Ok(Eigenspace::from_sorted(d, lambda, points))
}
