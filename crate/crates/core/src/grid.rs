//! Uniform cell grids with one ghost layer per side.
//!
//! Cells are numbered `0..=M+1` along every axis; `0` and `M+1` are ghosts.
//! Multi-dimensional grids store the full tensor of extended indices
//! (corner ghosts included) with axis 0 varying fastest.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    lower: f64,
    upper: f64,
    cells: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(lower: f64, upper: f64, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::Domain("cell count must be at least 1".into()));
        }
        if !(lower.is_finite() && upper.is_finite()) || upper <= lower {
            return Err(Error::Domain(format!(
                "interval [{lower}, {upper}] must be finite with upper > lower"
            )));
        }
        Ok(Self {
            lower,
            upper,
            cells,
            dx: (upper - lower) / cells as f64,
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Number of interior cells `M`.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Cell count including both ghosts.
    pub fn extended_len(&self) -> usize {
        self.cells + 2
    }

    /// Center of cell `j`, valid for ghosts `j = 0` and `j = M + 1` too.
    pub fn center(&self, j: usize) -> f64 {
        self.lower + (j as f64 - 0.5) * self.dx
    }

    /// Left interface `x_{j-1/2}` of cell `j`.
    pub fn interface(&self, j: usize) -> f64 {
        self.lower + (j as f64 - 1.0) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.extended_len()).map(|j| self.center(j)).collect()
    }
}

pub fn build_grid_1d(lower: f64, upper: f64, cells: usize) -> Result<Grid1D> {
    Grid1D::new(lower, upper, cells)
}

/// Tensor-product grid over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMD {
    axes: Vec<Grid1D>,
    strides: Vec<usize>,
    len: usize,
}

impl GridMD {
    pub fn new(bounds: &[(f64, f64)], counts: &[usize]) -> Result<Self> {
        if bounds.len() != counts.len() {
            return Err(Error::Domain(format!(
                "{} axis bounds but {} cell counts",
                bounds.len(),
                counts.len()
            )));
        }
        if bounds.is_empty() {
            return Err(Error::Domain("grid needs at least one axis".into()));
        }
        let axes = bounds
            .iter()
            .zip(counts)
            .map(|(&(lo, hi), &m)| Grid1D::new(lo, hi, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_axes(axes))
    }

    pub fn from_axes(axes: Vec<Grid1D>) -> Self {
        let mut strides = Vec::with_capacity(axes.len());
        let mut len = 1;
        for axis in &axes {
            strides.push(len);
            len *= axis.extended_len();
        }
        Self { axes, strides, len }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, k: usize) -> &Grid1D {
        &self.axes[k]
    }

    pub fn axes(&self) -> &[Grid1D] {
        &self.axes
    }

    pub fn counts(&self) -> Vec<usize> {
        self.axes.iter().map(Grid1D::cells).collect()
    }

    /// Memory stride of axis `k` in the flat layout.
    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    /// Length of the flat storage, i.e. the size of the extended index set.
    pub fn extended_len(&self) -> usize {
        self.len
    }

    pub fn interior_len(&self) -> usize {
        self.axes.iter().map(Grid1D::cells).product()
    }

    /// `|V|`, identical for every cell.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Grid1D::dx).product()
    }

    pub fn flat(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.dim());
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        self.axes
            .iter()
            .map(|axis| {
                let n = axis.extended_len();
                let i = flat % n;
                flat /= n;
                i
            })
            .collect()
    }

    pub fn center(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .zip(&self.axes)
            .map(|(&j, axis)| axis.center(j))
            .collect()
    }

    /// Flat offsets of all interior cells, axis 0 fastest.
    pub fn interior_flat(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.interior_len());
        let ranges: Vec<_> = self.axes.iter().map(|a| (1, a.cells())).collect();
        for_each_index(&ranges, |idx| out.push(self.flat(idx)));
        out
    }

    pub fn interior_indices(&self) -> Vec<Vec<usize>> {
        let ranges: Vec<_> = self.axes.iter().map(|a| (1, a.cells())).collect();
        collect_indices(&ranges)
    }

    /// Ghost cells on the lower face of axis `k`: entry `k` is 0, all others interior.
    pub fn ghost_left(&self, k: usize) -> Vec<Vec<usize>> {
        self.face_ghosts(k, 0)
    }

    /// Ghost cells on the upper face of axis `k`: entry `k` is `M_k + 1`.
    pub fn ghost_right(&self, k: usize) -> Vec<Vec<usize>> {
        self.face_ghosts(k, self.axes[k].cells() + 1)
    }

    fn face_ghosts(&self, k: usize, at: usize) -> Vec<Vec<usize>> {
        let ranges: Vec<_> = self
            .axes
            .iter()
            .enumerate()
            .map(|(l, a)| if l == k { (at, at) } else { (1, a.cells()) })
            .collect();
        collect_indices(&ranges)
    }

    /// Flat offsets of the lower ghost of every line along axis `k`.
    ///
    /// Element `i` of a line starting at `s` lives at `s + i * stride(k)`.
    pub fn line_starts(&self, k: usize) -> Vec<usize> {
        self.face_ghosts(k, 0)
            .iter()
            .map(|idx| self.flat(idx))
            .collect()
    }
}

pub fn build_grid_md(bounds: &[(f64, f64)], counts: &[usize]) -> Result<GridMD> {
    GridMD::new(bounds, counts)
}

/// Visit every multi-index in the inclusive box `ranges`, first axis fastest.
fn for_each_index(ranges: &[(usize, usize)], mut f: impl FnMut(&[usize])) {
    if ranges.iter().any(|&(lo, hi)| hi < lo) {
        return;
    }
    let mut idx: Vec<usize> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&idx);
        let mut axis = 0;
        loop {
            if axis == ranges.len() {
                return;
            }
            if idx[axis] < ranges[axis].1 {
                idx[axis] += 1;
                break;
            }
            idx[axis] = ranges[axis].0;
            axis += 1;
        }
    }
}

fn collect_indices(ranges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_index(ranges, |idx| out.push(idx.to_vec()));
    out
}

/// Time step `cfl * min_k dx_k / |a_k|`.
pub fn cfl_timestep(speeds: &[f64], grid: &GridMD, cfl: f64) -> Result<f64> {
    if speeds.len() != grid.dim() {
        return Err(Error::Validation(format!(
            "{} speeds for a {}-dimensional grid",
            speeds.len(),
            grid.dim()
        )));
    }
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::Validation(format!("CFL number {cfl} outside (0, 1]")));
    }
    if let Some(k) = speeds.iter().position(|a| *a == 0.0 || !a.is_finite()) {
        return Err(Error::Validation(format!(
            "advection speed along axis {k} must be finite and nonzero"
        )));
    }
    let limit = speeds
        .iter()
        .zip(grid.axes())
        .map(|(a, axis)| axis.dx() / a.abs())
        .fold(f64::INFINITY, f64::min);
    Ok(cfl * limit)
}

/// Number of fixed steps until the first `t_n >= final_time`.
pub fn step_count(final_time: f64, dt: f64) -> usize {
    if final_time <= 0.0 {
        return 0;
    }
    let ratio = final_time / dt;
    // t_n = n dt lands on T up to round-off for the usual CFL choices
    let n = ratio.round();
    if (ratio - n).abs() <= 1e-9 * ratio.max(1.0) {
        n as usize
    } else {
        ratio.ceil() as usize
    }
}
