//! Renders every phantom family to CSV and PGM: the 2D ones on a 96² grid,
//! the 3D ones on 24³ (one image per z slice).
//!
//! cargo run --example phantom_gallery [-- <output dir>]

use std::path::PathBuf;

use sparse_source::export::{write_field_csv, write_field_pgm};
use sparse_source::forward::Grid;
use sparse_source::phantoms::{make_phantom, PhantomSpec};

fn main() -> sparse_source::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("phantoms"));
    std::fs::create_dir_all(&out)?;
    let specs = [
        ("peaks1", 2, r#"{"kind": "peaks"}"#),
        ("peaks4", 2, r#"{"kind": "peaks", "count": 4}"#),
        ("strip_skew", 2, r#"{"kind": "strip_skew"}"#),
        ("strip_diag", 2, r#"{"kind": "strip_diag"}"#),
        ("balls", 3, r#"{"kind": "balls3d"}"#),
        ("tripod_right_up", 3, r#"{"kind": "tripod_right_up"}"#),
        ("two_tripods", 3, r#"{"kind": "two_tripods"}"#),
    ];
    for (name, dim, json) in specs {
        let spec: PhantomSpec = serde_json::from_str(json)?;
        let grid = if dim == 3 { Grid::new(3, 24, 1.5)? } else { Grid::new(2, 96, 3.0)? };
        let mu = make_phantom(&spec, &grid)?;
        let support = mu.re().iter().filter(|v| **v != 0.0).count();
        write_field_csv(&out.join(format!("{name}.csv")), &grid, mu.re())?;
        let images = write_field_pgm(&out.join(format!("{name}.pgm")), &grid, mu.re())?;
        println!("{:<16} {:<28} {}D, {support} cells, {} image(s)", name, spec.label(), grid.dim(), images.len());
    }
    println!("written to {}", out.display());
    Ok(())
}
