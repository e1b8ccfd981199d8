//! Plain-text and image export of grid fields.
//!
//! A 2D field becomes an `n × n` CSV matrix (row `j` holds the cells with
//! y index `j`) and an 8-bit binary PGM. A 3D field is written as `n` stacked
//! matrices in one CSV, z slowest, and as one PGM per z slice.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::forward::Grid;

fn check(grid: &Grid, values: &[f64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::Dimension(format!("field has {} samples, grid has {} nodes", values.len(), grid.len())));
    }
    Ok(())
}

pub fn write_field_csv(path: &Path, grid: &Grid, values: &[f64]) -> Result<()> {
    check(grid, values)?;
    let n = grid.n_per_axis();
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in values.chunks(n) {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_field_csv`] back into a flat field.
pub fn read_field_csv(path: &Path) -> Result<Vec<f64>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        for s in rec?.iter() {
            out.push(s.parse::<f64>().map_err(|e| Error::InvalidParameter(format!("bad number {s:?}: {e}")))?);
        }
    }
    Ok(out)
}

/// Min–max normalised 8-bit grey levels; a constant field maps to 0.
pub fn to_gray(values: &[f64]) -> Vec<u8> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    values
        .iter()
        .map(|v| if span > 0.0 { ((v - lo) / span * 255.0).round() as u8 } else { 0 })
        .collect()
}

fn write_pgm_slice(path: &Path, n: usize, gray: &[u8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{n} {n}\n255\n")?;
    // PGM rows run top to bottom; put the largest y first.
    for row in gray.chunks(n).rev() {
        w.write_all(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the field as PGM image(s); returns the files written.
///
/// In 3D, `path` is used as a stem and slices go to `<stem>_z000.pgm`, ...
pub fn write_field_pgm(path: &Path, grid: &Grid, values: &[f64]) -> Result<Vec<PathBuf>> {
    check(grid, values)?;
    let n = grid.n_per_axis();
    let gray = to_gray(values);
    if grid.dim() == 2 {
        write_pgm_slice(path, n, &gray)?;
        return Ok(vec![path.to_path_buf()]);
    }
    let stem = path.with_extension("");
    let mut files = Vec::with_capacity(n);
    for (z, slice) in gray.chunks(n * n).enumerate() {
        let p = PathBuf::from(format!("{}_z{z:03}.pgm", stem.display()));
        write_pgm_slice(&p, n, slice)?;
        files.push(p);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_is_exact() {
        let g = Grid::new(2, 5, 1.0).unwrap();
        let v: Vec<f64> = (0..25).map(|i| (i as f64 * 0.731).sin() / 3.0).collect();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        write_field_csv(&p, &g, &v).unwrap();
        assert_eq!(read_field_csv(&p).unwrap(), v);
        assert_eq!(std::fs::read_to_string(&p).unwrap().lines().count(), 5);
    }

    #[test]
    fn pgm_layout() {
        let g = Grid::new(2, 4, 1.0).unwrap();
        let mut v = vec![0.0; 16];
        v[15] = 2.0;
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.pgm");
        write_field_pgm(&p, &g, &v).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        let header = b"P5\n4 4\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        let pixels = &bytes[header.len()..];
        assert_eq!(pixels.len(), 16);
        // Top-right pixel is the cell with the largest x and y.
        assert_eq!(pixels[3], 255);
        assert_eq!(pixels.iter().filter(|p| **p == 0).count(), 15);
    }

    #[test]
    fn pgm_stack_in_3d() {
        let g = Grid::new(3, 4, 1.0).unwrap();
        let v: Vec<f64> = (0..64).map(|i| i as f64).collect();
        let dir = tempfile::tempdir().unwrap();
        let files = write_field_pgm(&dir.path().join("vol.pgm"), &g, &v).unwrap();
        assert_eq!(files.len(), 4);
        assert!(files[2].ends_with("vol_z002.pgm"));
    }

    #[test]
    fn constant_field_is_black() {
        assert_eq!(to_gray(&[3.0, 3.0]), vec![0, 0]);
    }
}
