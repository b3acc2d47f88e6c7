//! Rectangular phase-space lattices, sampled fields, Simpson integration and
//! the CSV / JSON+binary field formats.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::special::simpson_weights;

/// Uniform lattice over `[x_min, x_max] × [y_min, y_max]` with `nx × ny`
/// points including both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct PhaseSpaceGrid {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
}

impl TryFrom<GridRepr> for PhaseSpaceGrid {
    type Error = Error;

    fn try_from(r: GridRepr) -> Result<Self> {
        Self::new(r.x_min, r.x_max, r.nx, r.y_min, r.y_max, r.ny)
    }
}

impl From<PhaseSpaceGrid> for GridRepr {
    fn from(g: PhaseSpaceGrid) -> Self {
        Self {
            x_min: g.x_min,
            x_max: g.x_max,
            y_min: g.y_min,
            y_max: g.y_max,
            nx: g.nx,
            ny: g.ny,
        }
    }
}

impl PhaseSpaceGrid {
    pub fn new(
        x_min: f64,
        x_max: f64,
        nx: usize,
        y_min: f64,
        y_max: f64,
        ny: usize,
    ) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidGrid("non-finite bounds".into()));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points per axis, got {nx}x{ny}"
            )));
        }
        if x_max <= x_min || y_max <= y_min {
            return Err(Error::InvalidGrid("axis bounds must be increasing".into()));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        })
    }

    /// `[−half, half]²` with `n` points per axis.
    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n, -half_width, half_width, n)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.y_min, self.y_max)
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x_max
        } else {
            self.x_min + self.hx() * i as f64
        }
    }

    pub fn y(&self, j: usize) -> f64 {
        if j + 1 == self.ny {
            self.y_max
        } else {
            self.y_min + self.hy() * j as f64
        }
    }

    /// Coordinates of flat index `k` (row-major, y outer).
    pub fn point(&self, k: usize) -> (f64, f64) {
        (self.x(k % self.nx), self.y(k / self.nx))
    }

    /// Every other point; `None` unless both axes have an even number of
    /// intervals.
    pub fn coarsened(&self) -> Option<Self> {
        if !(self.nx - 1).is_multiple_of(2)
            || !(self.ny - 1).is_multiple_of(2)
            || self.nx < 3
            || self.ny < 3
        {
            return None;
        }
        Some(Self {
            nx: (self.nx - 1) / 2 + 1,
            ny: (self.ny - 1) / 2 + 1,
            ..*self
        })
    }
}

/// Real samples over a [`PhaseSpaceGrid`], stored row-major with y outer.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: PhaseSpaceGrid,
    values: Vec<f64>,
}

/// Simpson integral with the Richardson `h` vs `2h` error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    /// `|I_h − I_{2h}| / 15`; `None` when the grid cannot be coarsened.
    pub error: Option<f64>,
}

impl ScalarField {
    pub fn new(grid: PhaseSpaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar field"));
        }
        Ok(Self { grid, values })
    }

    /// Sample `f(x, y)` at every grid point (parallel when enabled).
    pub fn from_fn<F>(grid: &PhaseSpaceGrid, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let values = par::map_indexed(grid.len(), |k| {
            let (x, y) = grid.point(k);
            f(x, y)
        });
        Self {
            grid: *grid,
            values,
        }
    }

    pub fn from_fn_sequential<F>(grid: &PhaseSpaceGrid, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64,
    {
        let values = par::map_indexed_sequential(grid.len(), |k| {
            let (x, y) = grid.point(k);
            f(x, y)
        });
        Self {
            grid: *grid,
            values,
        }
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Largest `|value|` on the outer frame of the grid.
    pub fn boundary_max(&self) -> f64 {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut m = 0.0f64;
        for i in 0..nx {
            m = m.max(self.get(i, 0).abs()).max(self.get(i, ny - 1).abs());
        }
        for j in 0..ny {
            m = m.max(self.get(0, j).abs()).max(self.get(nx - 1, j).abs());
        }
        m
    }

    /// Largest pointwise `|self − other|`; grids must match.
    pub fn sup_distance(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn simpson_stride(&self, stride: usize) -> f64 {
        let nx = (self.grid.nx - 1) / stride + 1;
        let ny = (self.grid.ny - 1) / stride + 1;
        let wx = simpson_weights(nx);
        let wy = simpson_weights(ny);
        let mut total = 0.0;
        for (jj, wyj) in wy.iter().enumerate() {
            let row: f64 = wx
                .iter()
                .enumerate()
                .map(|(ii, wxi)| wxi * self.get(ii * stride, jj * stride))
                .sum();
            total += wyj * row;
        }
        total * self.grid.hx() * self.grid.hy() * (stride * stride) as f64
    }

    /// Composite Simpson integral over the grid with a Richardson estimate.
    pub fn integrate(&self) -> Quadrature {
        let value = self.simpson_stride(1);
        let error = self
            .grid
            .coarsened()
            .map(|_| (value - self.simpson_stride(2)).abs() / 15.0);
        Quadrature { value, error }
    }

    /// CSV with `#` metadata lines, a header row and 17 significant digits.
    pub fn write_csv<W: Write>(
        &self,
        mut w: W,
        labels: [&str; 3],
        metadata: &[(String, String)],
    ) -> io::Result<()> {
        for (k, v) in metadata {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{},{},{}", labels[0], labels[1], labels[2])?;
        for (k, v) in self.values.iter().enumerate() {
            let (x, y) = self.grid.point(k);
            writeln!(w, "{},{},{}", fmt_f64(x), fmt_f64(y), fmt_f64(*v))?;
        }
        Ok(())
    }

    /// JSON header (grid, layout, labels, metadata) plus a flat
    /// little-endian `f64` array, row-major with y outer.
    pub fn write_binary<H: Write, D: Write>(
        &self,
        header: H,
        mut data: D,
        labels: [&str; 3],
        metadata: serde_json::Value,
    ) -> io::Result<()> {
        let head = BinaryHeader {
            format: "f64le".into(),
            layout: "row_major_y_outer".into(),
            grid: self.grid,
            labels: labels.map(String::from),
            count: self.values.len(),
            metadata,
        };
        serde_json::to_writer_pretty(header, &head).map_err(io::Error::other)?;
        for v in &self.values {
            data.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Inverse of [`ScalarField::write_binary`].
    pub fn read_binary(header: &[u8], data: &[u8]) -> Result<(Self, BinaryHeader)> {
        let head: BinaryHeader = serde_json::from_slice(header)
            .map_err(|e| Error::InvalidGrid(format!("bad header: {e}")))?;
        if data.len() != head.count * 8 {
            return Err(Error::InvalidGrid("binary payload length mismatch".into()));
        }
        let values = data
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Ok((Self::new(head.grid, values)?, head))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryHeader {
    pub format: String,
    pub layout: String,
    pub grid: PhaseSpaceGrid,
    pub labels: [String; 3],
    pub count: usize,
    pub metadata: serde_json::Value,
}

/// 17 significant digits, `.` decimal separator.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
