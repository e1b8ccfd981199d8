use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in physical space; the third coordinate is zero in 2D.
pub type Point = [f64; 3];

/// Uniform cell-centred discretization of the box `[-R, R]^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n_per_axis: usize,
    half_width: f64,
}

impl Grid {
    pub fn new(dim: usize, n_per_axis: usize, half_width: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidParameter(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n_per_axis < 4 {
            return Err(Error::InvalidParameter(format!(
                "need at least 4 cells per axis, got {n_per_axis}"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("half width must be positive, got {half_width}")));
        }
        Ok(Self { dim, n_per_axis, half_width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Cell width `h = 2R / n`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n_per_axis as f64
    }

    /// Cell measure `h^dim`, the midpoint quadrature weight.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total node count `n^dim`.
    pub fn len(&self) -> usize {
        self.n_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of cell centre `i` along one axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing()
    }

    /// Per-axis indices of a linear node index (x fastest).
    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let n = self.n_per_axis;
        let ix = idx % n;
        let iy = (idx / n) % n;
        let iz = if self.dim == 3 { idx / (n * n) } else { 0 };
        [ix, iy, iz]
    }

    pub fn linear_index(&self, mi: [usize; 3]) -> usize {
        let n = self.n_per_axis;
        match self.dim {
            2 => mi[1] * n + mi[0],
            _ => (mi[2] * n + mi[1]) * n + mi[0],
        }
    }

    pub fn node(&self, idx: usize) -> Point {
        let mi = self.multi_index(idx);
        let z = if self.dim == 3 { self.axis_coord(mi[2]) } else { 0.0 };
        [self.axis_coord(mi[0]), self.axis_coord(mi[1]), z]
    }

    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// Axis index of the cell containing coordinate `x`, if inside the box.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        let t = ((x + self.half_width) / self.spacing()).floor();
        if t < 0.0 || t >= self.n_per_axis as f64 {
            None
        } else {
            Some(t as usize)
        }
    }

    /// Distance (in cells) from node `idx` to the nearest face of the box, 0 for boundary cells.
    pub fn boundary_layer(&self, idx: usize) -> usize {
        let mi = self.multi_index(idx);
        let n = self.n_per_axis;
        mi[..self.dim].iter().map(|&i| i.min(n - 1 - i)).min().unwrap_or(0)
    }
}

pub fn distance(a: &Point, b: &Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Wavenumber together with the real contrast `q = n - 1` sampled at the grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Medium {
    k: f64,
    q: Vec<f64>,
}

impl Medium {
    pub fn homogeneous(grid: &Grid, k: f64) -> Result<Self> {
        Self::new(grid, k, vec![0.0; grid.len()])
    }

    pub fn new(grid: &Grid, k: f64, q: Vec<f64>) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("wavenumber must be positive, got {k}")));
        }
        if q.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "contrast has {} samples, grid has {} nodes",
                q.len(),
                grid.len()
            )));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("contrast must be finite".into()));
        }
        if (0..grid.len()).any(|i| grid.boundary_layer(i) == 0 && q[i] != 0.0) {
            return Err(Error::InvalidParameter("contrast must vanish on boundary cells".into()));
        }
        Ok(Self { k, q })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn is_homogeneous(&self) -> bool {
        self.q.iter().all(|&v| v == 0.0)
    }
}

/// Receiver locations on the boundary of the computational box.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceiverSet {
    points: Vec<Point>,
}

/// Cap on the default 3D receiver count.
pub const MAX_DEFAULT_RECEIVERS_3D: usize = 600;

impl ReceiverSet {
    pub fn new(grid: &Grid, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("need at least one receiver".into()));
        }
        let r = grid.half_width();
        let tol = 1e-12 * r;
        for p in &points {
            let coords = &p[..grid.dim()];
            let inside = coords.iter().all(|c| c.abs() <= r + tol);
            let on_face = coords.iter().any(|c| (c.abs() - r).abs() <= tol);
            if !inside || !on_face || (grid.dim() == 2 && p[2] != 0.0) {
                return Err(Error::InvalidParameter(format!("receiver {p:?} is not on the boundary")));
            }
        }
        for (i, a) in points.iter().enumerate() {
            if points[..i].iter().any(|b| distance(a, b) <= tol) {
                return Err(Error::InvalidParameter(format!("duplicate receiver {a:?}")));
            }
        }
        Ok(Self { points })
    }

    /// Default layout: `4n` perimeter points in 2D (one per boundary cell edge),
    /// boundary face centres in 3D capped at 600 by uniform subsampling.
    pub fn boundary_default(grid: &Grid) -> Result<Self> {
        match grid.dim() {
            2 => Self::uniform(grid, 4 * grid.n_per_axis()),
            _ => {
                let total = 6 * grid.n_per_axis().pow(2);
                Self::uniform(grid, total.min(MAX_DEFAULT_RECEIVERS_3D))
            }
        }
    }

    /// `count` receivers spread uniformly over the boundary.
    ///
    /// In 2D the points are equispaced in arclength, starting half a spacing
    /// past the corner `(-R, -R)`. In 3D they are drawn by uniform index
    /// subsampling from the `6n²` boundary face centres.
    pub fn uniform(grid: &Grid, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter("need at least one receiver".into()));
        }
        let r = grid.half_width();
        let points = if grid.dim() == 2 {
            let perimeter = 8.0 * r;
            let ds = perimeter / count as f64;
            (0..count)
                .map(|i| perimeter_point(r, (i as f64 + 0.5) * ds))
                .collect()
        } else {
            let faces = face_centres(grid);
            if count > faces.len() {
                return Err(Error::InvalidParameter(format!(
                    "at most {} receivers available in 3D, asked for {count}",
                    faces.len()
                )));
            }
            (0..count).map(|i| faces[i * faces.len() / count]).collect()
        };
        Self::new(grid, points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
}

// Counter-clockwise walk along the square perimeter from (-R, -R).
fn perimeter_point(r: f64, s: f64) -> Point {
    let side = 2.0 * r;
    let (edge, t) = ((s / side).floor() as usize % 4, s % side);
    match edge {
        0 => [-r + t, -r, 0.0],
        1 => [r, -r + t, 0.0],
        2 => [r - t, r, 0.0],
        _ => [-r, r - t, 0.0],
    }
}

fn face_centres(grid: &Grid) -> Vec<Point> {
    let n = grid.n_per_axis();
    let r = grid.half_width();
    let mut out = Vec::with_capacity(6 * n * n);
    for axis in 0..3 {
        for side in [-r, r] {
            for a in 0..n {
                for b in 0..n {
                    let mut p = [0.0; 3];
                    p[axis] = side;
                    p[(axis + 1) % 3] = grid.axis_coord(a);
                    p[(axis + 2) % 3] = grid.axis_coord(b);
                    out.push(p);
                }
            }
        }
    }
    out
}
