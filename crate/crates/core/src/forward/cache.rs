//! Binary cache for an assembled boundary operator.
//!
//! Layout (little endian):
//!
//! | bytes | field |
//! |-------|-------|
//! | 4     | magic `VBOP` |
//! | 4     | version (`u32`) |
//! | 4     | dim (`u32`) |
//! | 4     | n_per_axis (`u32`) |
//! | 4     | receiver count M (`u32`) |
//! | 8     | wavenumber k (`f64`) |
//! | 8     | q-hash (`u64`) |
//! | 8·2M·2N | payload, row-major `f64` |
//!
//! The q-hash is FNV-1a over the contrast samples, the box half width and
//! the receiver coordinates, so a cache hit implies the same operator.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::grid::{Grid, Medium, ReceiverSet};
use crate::error::{Error, Result};
use crate::realfield::RealifiedMatrix;

pub const MAGIC: [u8; 4] = *b"VBOP";
pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CacheHeader {
    pub version: u32,
    pub dim: u32,
    pub n_per_axis: u32,
    pub receivers: u32,
    pub k: f64,
    pub q_hash: u64,
}

impl CacheHeader {
    pub fn describe(grid: &Grid, medium: &Medium, receivers: &ReceiverSet) -> Self {
        let mut h = Fnv1a::new();
        for q in medium.q() {
            h.write(&q.to_le_bytes());
        }
        h.write(&grid.half_width().to_le_bytes());
        for p in receivers.points() {
            for c in p {
                h.write(&c.to_le_bytes());
            }
        }
        Self {
            version: VERSION,
            dim: grid.dim() as u32,
            n_per_axis: grid.n_per_axis() as u32,
            receivers: receivers.len() as u32,
            k: medium.k(),
            q_hash: h.finish(),
        }
    }

    fn shape(&self) -> (usize, usize) {
        let n = (self.n_per_axis as usize).pow(self.dim);
        (2 * self.receivers as usize, 2 * n)
    }
}

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

pub fn write_operator(path: &Path, header: &CacheHeader, op: &RealifiedMatrix) -> Result<()> {
    let (rows, cols) = header.shape();
    if op.as_dmatrix().shape() != (rows, cols) {
        return Err(Error::Cache(format!(
            "operator shape {:?} does not match header {rows}x{cols}",
            op.as_dmatrix().shape()
        )));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&MAGIC)?;
    w.write_all(&header.version.to_le_bytes())?;
    w.write_all(&header.dim.to_le_bytes())?;
    w.write_all(&header.n_per_axis.to_le_bytes())?;
    w.write_all(&header.receivers.to_le_bytes())?;
    w.write_all(&header.k.to_le_bytes())?;
    w.write_all(&header.q_hash.to_le_bytes())?;
    let m = op.as_dmatrix();
    for i in 0..rows {
        for j in 0..cols {
            w.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_header(r: &mut impl Read) -> Result<CacheHeader> {
    if read_array::<4>(r)? != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let header = CacheHeader {
        version: u32::from_le_bytes(read_array(r)?),
        dim: u32::from_le_bytes(read_array(r)?),
        n_per_axis: u32::from_le_bytes(read_array(r)?),
        receivers: u32::from_le_bytes(read_array(r)?),
        k: f64::from_le_bytes(read_array(r)?),
        q_hash: u64::from_le_bytes(read_array(r)?),
    };
    if header.version != VERSION {
        return Err(Error::Cache(format!("unsupported version {}", header.version)));
    }
    Ok(header)
}

pub fn read_operator(path: &Path) -> Result<(CacheHeader, RealifiedMatrix)> {
    let mut r = BufReader::new(File::open(path)?);
    let header = read_header(&mut r)?;
    let (rows, cols) = header.shape();
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = f64::from_le_bytes(read_array(&mut r)?);
        }
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Cache("trailing bytes after payload".into()));
    }
    Ok((header, RealifiedMatrix::from_raw(m, 0.0)?))
}

/// Returns the cached operator when its header matches `expected`.
pub fn load_if_matching(path: &Path, expected: &CacheHeader) -> Result<Option<RealifiedMatrix>> {
    if !path.exists() {
        return Ok(None);
    }
    let (header, op) = read_operator(path)?;
    Ok((header == *expected).then_some(op))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::measurement::assemble_vb;

    #[test]
    fn roundtrip_and_header_layout() {
        let g = Grid::new(2, 6, 1.0).unwrap();
        let m = Medium::homogeneous(&g, 2.0).unwrap();
        let rs = ReceiverSet::uniform(&g, 5).unwrap();
        let op = assemble_vb(&g, &m, &rs).unwrap();
        let header = CacheHeader::describe(&g, &m, &rs);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vb.cache");
        write_operator(&path, &header, &op).unwrap();

        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"VBOP");
        assert_eq!(bytes.len(), 36 + 8 * 10 * 72);
        // First payload value is row 0, column 0; second is row 0, column 1.
        let v0 = f64::from_le_bytes(bytes[36..44].try_into().unwrap());
        let v1 = f64::from_le_bytes(bytes[44..52].try_into().unwrap());
        assert_eq!(v0, op.as_dmatrix()[(0, 0)]);
        assert_eq!(v1, op.as_dmatrix()[(0, 1)]);

        let (h2, op2) = read_operator(&path).unwrap();
        assert_eq!(h2, header);
        assert_eq!(op2, op);
        assert!(load_if_matching(&path, &header).unwrap().is_some());
        let other = CacheHeader { k: 3.0, ..header };
        assert!(load_if_matching(&path, &other).unwrap().is_none());
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk");
        std::fs::write(&path, b"NOPE0000").unwrap();
        assert!(matches!(read_operator(&path), Err(Error::Cache(_))));
    }
}
