//! On-disk grid cache: a one-line JSON header, a newline, then the samples as
//! little-endian f64, row-major with the t index fastest.

use hspline::splines::Grid3D;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const FORMAT_NAME: &str = "hspline-grid";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub format: String,
    pub version: u32,
    pub order: usize,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub shape: [usize; 3],
    pub tolerance: f64,
    pub method: String,
}

#[derive(Debug)]
pub enum CacheError {
    Io(std::io::Error),
    Malformed(String),
    /// Written by a different format version; never reused.
    StaleVersion { found: u32, path: PathBuf },
    /// Header does not describe the requested grid.
    Mismatch(String),
}

impl std::fmt::Display for CacheError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CacheError::Io(e) => write!(f, "cache i/o error: {e}"),
            CacheError::Malformed(s) => write!(f, "malformed cache file: {s}"),
            CacheError::StaleVersion { found, path } => write!(
                f,
                "cache file {} has format version {found}, expected {FORMAT_VERSION}; remove it or pass --refresh-cache",
                path.display()
            ),
            CacheError::Mismatch(s) => write!(f, "cache file does not match the request: {s}"),
        }
    }
}

impl std::error::Error for CacheError {}

impl From<std::io::Error> for CacheError {
    fn from(e: std::io::Error) -> Self {
        CacheError::Io(e)
    }
}

impl CacheHeader {
    pub fn new(order: usize, lo: [f64; 3], hi: [f64; 3], shape: [usize; 3], tolerance: f64, method: &str) -> Self {
        CacheHeader { format: FORMAT_NAME.into(), version: FORMAT_VERSION, order, lo, hi, shape, tolerance, method: method.into() }
    }

    /// SHA-256 over (version, order, box, shape, tolerance, method); floats by bit pattern.
    pub fn key(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.version.to_le_bytes());
        h.update((self.order as u64).to_le_bytes());
        for v in self.lo.iter().chain(&self.hi) {
            h.update(v.to_bits().to_le_bytes());
        }
        for s in self.shape {
            h.update((s as u64).to_le_bytes());
        }
        h.update(self.tolerance.to_bits().to_le_bytes());
        h.update(self.method.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn file_name(&self) -> String {
        format!("phi{}-{}.grid", self.order, &self.key()[..16])
    }

    fn same_request(&self, o: &CacheHeader) -> bool {
        self.order == o.order
            && self.shape == o.shape
            && self.method == o.method
            && self.tolerance.to_bits() == o.tolerance.to_bits()
            && self.lo.iter().zip(&o.lo).all(|(a, b)| a.to_bits() == b.to_bits())
            && self.hi.iter().zip(&o.hi).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

pub fn encode(header: &CacheHeader, grid: &Grid3D) -> Vec<u8> {
    let mut out = serde_json::to_vec(header).expect("header serializes");
    out.push(b'\n');
    out.reserve(8 * grid.samples.len());
    for v in &grid.samples {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<(CacheHeader, Grid3D), CacheError> {
    let nl = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| CacheError::Malformed("no header line".into()))?;
    let raw: serde_json::Value =
        serde_json::from_slice(&bytes[..nl]).map_err(|e| CacheError::Malformed(format!("header: {e}")))?;
    let version = raw.get("version").and_then(|v| v.as_u64()).ok_or_else(|| CacheError::Malformed("missing version".into()))?;
    if version != FORMAT_VERSION as u64 {
        return Err(CacheError::StaleVersion { found: version as u32, path: path.to_path_buf() });
    }
    let header: CacheHeader = serde_json::from_value(raw).map_err(|e| CacheError::Malformed(format!("header: {e}")))?;
    if header.format != FORMAT_NAME {
        return Err(CacheError::Malformed(format!("format {:?}", header.format)));
    }
    let payload = &bytes[nl + 1..];
    let n: usize = header.shape.iter().product();
    if payload.len() != 8 * n {
        return Err(CacheError::Malformed(format!("payload has {} bytes, shape needs {}", payload.len(), 8 * n)));
    }
    let samples: Vec<f64> = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let grid = Grid3D::new(header.lo, header.hi, header.shape, samples).map_err(|e| CacheError::Malformed(e.to_string()))?;
    Ok((header, grid))
}

/// Writes to a temporary sibling, then renames over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CacheError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("grid"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Cached grid for `header` in `dir`, if one exists and matches.
pub fn load(dir: &Path, header: &CacheHeader) -> Result<Option<Grid3D>, CacheError> {
    let path = dir.join(header.file_name());
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let (found, grid) = decode(&bytes, &path)?;
    if !found.same_request(header) {
        return Err(CacheError::Mismatch(format!("{} was written for a different grid", path.display())));
    }
    Ok(Some(grid))
}

pub fn store(dir: &Path, header: &CacheHeader, grid: &Grid3D) -> Result<PathBuf, CacheError> {
    let path = dir.join(header.file_name());
    write_atomic(&path, &encode(header, grid))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (CacheHeader, Grid3D) {
        let lo = [0.0, 0.0, -0.5];
        let hi = [2.0, 1.0, 1.5];
        let shape = [3, 2, 4];
        let g = Grid3D::fill(lo, hi, shape, |p| (p.x * 1.1 + p.y).sin() * p.t + 1.0 / 3.0).unwrap();
        (CacheHeader::new(1, lo, hi, shape, 0.0, "closed"), g)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let (h, g) = sample();
        let path = store(dir.path(), &h, &g).unwrap();
        let back = load(dir.path(), &h).unwrap().unwrap();
        assert_eq!(back.samples.len(), g.samples.len());
        assert!(back.samples.iter().zip(&g.samples).all(|(a, b)| a.to_bits() == b.to_bits()));
        // layout: header line then little-endian t-fastest payload
        let bytes = fs::read(path).unwrap();
        let nl = bytes.iter().position(|&b| b == b'\n').unwrap();
        let second = f64::from_le_bytes(bytes[nl + 9..nl + 17].try_into().unwrap());
        assert_eq!(second.to_bits(), g.get(0, 0, 1).to_bits());
    }

    #[test]
    fn stale_version_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let (h, g) = sample();
        let mut old = h.clone();
        old.version = 0;
        write_atomic(&dir.path().join(h.file_name()), &encode(&old, &g)).unwrap();
        assert!(matches!(load(dir.path(), &h), Err(CacheError::StaleVersion { found: 0, .. })));
    }

    #[test]
    fn truncated_payload_rejected() {
        let (h, g) = sample();
        let mut bytes = encode(&h, &g);
        bytes.pop();
        assert!(matches!(decode(&bytes, Path::new("x")), Err(CacheError::Malformed(_))));
    }

    #[test]
    fn key_depends_on_every_field() {
        let (h, _) = sample();
        let mut other = h.clone();
        other.tolerance = 1e-9;
        assert_ne!(h.key(), other.key());
        other = h.clone();
        other.shape[2] = 5;
        assert_ne!(h.key(), other.key());
        other = h.clone();
        other.version += 1;
        assert_ne!(h.key(), other.key());
        assert_eq!(h.key(), sample().0.key());
    }
}
