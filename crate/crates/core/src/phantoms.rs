//! Ground-truth sources and the bump contrast used in the experiments.
//!
//! Geometry is given in physical coordinates and snapped to cells with
//! `floor`, so the same spec can be rendered on the data grid and on the
//! reconstruction grid. The default peak lattice is centred at
//! `(3/32, 3/32)` with spacing `0.75`. On `[-3, 3]²` every lattice point is
//! then the centre of a 96-grid cell and a common corner of four 64-grid
//! cells, so each fine peak restricts to four equal coarse values and the
//! coarse operator can represent it without a geometric bias.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{Grid, Medium, Point};
use crate::realfield::RealifiedVector;

/// Cells closer than this to the box face may not carry source.
pub const INTERIOR_MARGIN: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhantomSpec {
    Peaks {
        #[serde(default = "one")]
        count: usize,
        #[serde(default = "unit")]
        amplitude: f64,
        /// Lattice spacing of the default layout.
        #[serde(default = "peak_spacing")]
        spacing: f64,
        /// Lattice centre in the `z = 0` plane.
        #[serde(default = "peak_center")]
        center: [f64; 2],
        /// Explicit peak locations; overrides `count` and `spacing`.
        #[serde(default)]
        positions: Option<Vec<Point>>,
        /// Use `amplitude / h^dim`, a discrete Dirac mass, instead of `amplitude`.
        #[serde(default)]
        dirac_scaling: bool,
    },
    StripSkew {
        #[serde(default)]
        center: [f64; 2],
        #[serde(default = "strip_length")]
        length: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    StripDiag {
        #[serde(default)]
        center: [f64; 2],
        #[serde(default = "strip_length")]
        length: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    Balls3d {
        #[serde(default = "ball_centers")]
        centers: Vec<Point>,
        #[serde(default = "ball_radius")]
        radius: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    TripodRightUp {
        #[serde(default = "right_up_corner")]
        corner: Point,
        #[serde(default = "arm_length")]
        arm: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    TripodLeftDown {
        #[serde(default = "left_down_corner")]
        corner: Point,
        #[serde(default = "arm_length")]
        arm: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    TwoTripods {
        #[serde(default = "arm_length")]
        arm: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
}

fn one() -> usize {
    1
}
fn unit() -> f64 {
    1.0
}
fn peak_spacing() -> f64 {
    0.75
}
fn peak_center() -> [f64; 2] {
    [0.09375, 0.09375]
}
fn strip_length() -> f64 {
    1.5
}
fn ball_centers() -> Vec<Point> {
    vec![[-0.5, 0.0, 0.0], [0.5, 0.0, 0.0]]
}
fn ball_radius() -> f64 {
    0.25
}
fn right_up_corner() -> Point {
    [-0.5, -0.5, -0.5]
}
fn left_down_corner() -> Point {
    [0.5, 0.5, 0.5]
}
fn arm_length() -> f64 {
    1.0
}

impl PhantomSpec {
    pub fn peaks(count: usize) -> Self {
        Self::Peaks {
            count,
            amplitude: 1.0,
            spacing: peak_spacing(),
            center: peak_center(),
            positions: None,
            dirac_scaling: false,
        }
    }

    /// Peaks of total mass `mass` each, i.e. `mass / h^dim` on one cell.
    pub fn dirac_peaks(count: usize, mass: f64) -> Self {
        match Self::peaks(count) {
            Self::Peaks { count, spacing, center, positions, .. } => {
                Self::Peaks { count, amplitude: mass, spacing, center, positions, dirac_scaling: true }
            }
            _ => unreachable!(),
        }
    }

    /// Unit peaks at the given points.
    pub fn peaks_at(points: Vec<Point>) -> Self {
        Self::Peaks {
            count: points.len(),
            amplitude: 1.0,
            spacing: peak_spacing(),
            center: peak_center(),
            positions: Some(points),
            dirac_scaling: false,
        }
    }

    /// Short label used in result tables.
    pub fn label(&self) -> String {
        match self {
            Self::Peaks { count, positions, .. } => {
                let c = positions.as_ref().map_or(*count, Vec::len);
                match c {
                    1 => "one".into(),
                    4 => "four".into(),
                    6 => "six".into(),
                    8 => "eight".into(),
                    10 => "ten".into(),
                    c => format!("{c} peaks"),
                }
            }
            Self::StripSkew { .. } => "skew diagonal".into(),
            Self::StripDiag { .. } => "diagonal".into(),
            Self::Balls3d { .. } => "two balls".into(),
            Self::TripodRightUp { .. } => "right-up tripod".into(),
            Self::TripodLeftDown { .. } => "left-down tripod".into(),
            Self::TwoTripods { .. } => "two tripods".into(),
        }
    }
}

/// Lattice around `center` in the `z = 0` plane with `⌈√count⌉` columns, filled row by row.
pub fn peak_lattice(count: usize, spacing: f64, center: [f64; 2]) -> Vec<Point> {
    let cols = (count as f64).sqrt().ceil().max(1.0) as usize;
    let rows = count.div_ceil(cols);
    let offset = |i: usize, n: usize| (i as f64 - (n as f64 - 1.0) / 2.0) * spacing;
    (0..count)
        .map(|p| [center[0] + offset(p % cols, cols), center[1] + offset(p / cols, rows), 0.0])
        .collect()
}

fn snap(grid: &Grid, x: f64) -> Result<usize> {
    // The nudge keeps exact cell faces on the upper side despite rounding.
    let t = ((x + grid.half_width()) / grid.spacing() + 1e-9).floor();
    if t < 0.0 || t >= grid.n_per_axis() as f64 {
        return Err(Error::InvalidParameter(format!("coordinate {x} lies outside the box")));
    }
    Ok(t as usize)
}

fn snap_point(grid: &Grid, p: &Point) -> Result<[usize; 3]> {
    let mut mi = [0; 3];
    for (a, m) in mi.iter_mut().enumerate().take(grid.dim()) {
        *m = snap(grid, p[a])?;
    }
    Ok(mi)
}

struct Canvas<'a> {
    grid: &'a Grid,
    values: Vec<f64>,
}

impl<'a> Canvas<'a> {
    fn new(grid: &'a Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    fn set(&mut self, mi: [isize; 3], value: f64) -> Result<()> {
        let n = self.grid.n_per_axis() as isize;
        let lo = INTERIOR_MARGIN as isize;
        for &m in &mi[..self.grid.dim()] {
            if m < lo || m >= n - lo {
                return Err(Error::InvalidParameter(format!(
                    "phantom reaches cell {mi:?}, within {INTERIOR_MARGIN} cells of the boundary"
                )));
            }
        }
        let idx = self.grid.linear_index([mi[0] as usize, mi[1] as usize, mi[2].max(0) as usize]);
        self.values[idx] = value;
        Ok(())
    }
}

fn signed(mi: [usize; 3]) -> [isize; 3] {
    [mi[0] as isize, mi[1] as isize, mi[2] as isize]
}

fn require_dim(grid: &Grid, dim: usize, what: &str) -> Result<()> {
    if grid.dim() != dim {
        return Err(Error::InvalidParameter(format!("{what} phantom needs a {dim}D grid")));
    }
    Ok(())
}

fn tripod(canvas: &mut Canvas, corner: &Point, arm: f64, dir: isize, amplitude: f64) -> Result<()> {
    let c = signed(snap_point(canvas.grid, corner)?);
    let cells = (arm / canvas.grid.spacing()).round() as isize;
    for axis in 0..3 {
        for t in 0..=cells {
            let mut mi = c;
            mi[axis] += dir * t;
            canvas.set(mi, amplitude)?;
        }
    }
    Ok(())
}

/// Real source on `grid`; the imaginary block is zero.
pub fn make_phantom(spec: &PhantomSpec, grid: &Grid) -> Result<RealifiedVector> {
    let mut canvas = Canvas::new(grid);
    let h = grid.spacing();
    match spec {
        PhantomSpec::Peaks { count, amplitude, spacing, center, positions, dirac_scaling } => {
            let pts = match positions {
                Some(p) => p.clone(),
                None => peak_lattice(*count, *spacing, *center),
            };
            if pts.is_empty() {
                return Err(Error::InvalidParameter("peak phantom needs at least one peak".into()));
            }
            let value = if *dirac_scaling { amplitude / grid.cell_volume() } else { *amplitude };
            for p in &pts {
                canvas.set(signed(snap_point(grid, p)?), value)?;
            }
        }
        PhantomSpec::StripDiag { center, length, amplitude } | PhantomSpec::StripSkew { center, length, amplitude } => {
            require_dim(grid, 2, "strip")?;
            let cells = (length / h).round() as isize;
            let i0 = snap(grid, center[0] - length / 2.0)? as isize;
            let j0 = snap(grid, center[1] - length / 2.0)? as isize;
            let skew = matches!(spec, PhantomSpec::StripSkew { .. });
            for t in 0..cells {
                let j = if skew { j0 + cells - 1 - t } else { j0 + t };
                canvas.set([i0 + t, j, 0], *amplitude)?;
            }
        }
        PhantomSpec::Balls3d { centers, radius, amplitude } => {
            require_dim(grid, 3, "ball")?;
            for (idx, node) in grid.nodes().enumerate() {
                if centers.iter().any(|c| crate::forward::grid::distance(&node, c) <= *radius) {
                    canvas.set(signed(grid.multi_index(idx)), *amplitude)?;
                }
            }
        }
        PhantomSpec::TripodRightUp { corner, arm, amplitude } => {
            require_dim(grid, 3, "tripod")?;
            tripod(&mut canvas, corner, *arm, 1, *amplitude)?;
        }
        PhantomSpec::TripodLeftDown { corner, arm, amplitude } => {
            require_dim(grid, 3, "tripod")?;
            tripod(&mut canvas, corner, *arm, -1, *amplitude)?;
        }
        PhantomSpec::TwoTripods { arm, amplitude } => {
            require_dim(grid, 3, "tripod")?;
            tripod(&mut canvas, &right_up_corner(), *arm, 1, *amplitude)?;
            tripod(&mut canvas, &left_down_corner(), *arm, -1, *amplitude)?;
        }
    }
    let n = canvas.values.len();
    RealifiedVector::from_parts(&canvas.values, &vec![0.0; n])
}

/// `χ(t) = exp(-1/(1 - |t|²))` for `|t| < 1`, zero otherwise.
pub fn bump(t: &Point) -> f64 {
    let r2 = t[0] * t[0] + t[1] * t[1] + t[2] * t[2];
    if r2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r2)).exp()
    }
}

/// Homogeneous medium, or the bump contrast `q(x) = χ(x)` centred at the origin.
pub fn make_medium(grid: &Grid, k: f64, inhomogeneous: bool) -> Result<Medium> {
    if !inhomogeneous {
        return Medium::homogeneous(grid, k);
    }
    let q = grid.nodes().map(|x| bump(&x)).collect();
    Medium::new(grid, k, q)
}
