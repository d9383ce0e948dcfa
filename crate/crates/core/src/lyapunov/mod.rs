//! Discrete Lyapunov functionals, residual ledgers and decay bounds.

mod bounds;
mod residual;
mod viscous;

pub use bounds::{bound_trajectory, multid_bound_preconditions, BoundRecursion, BoundTrajectory};
pub use residual::{residual_terms_1d, sweep_residual, ResidualBreakdown};
pub use viscous::viscous_residual;

use crate::error::{Error, Result};
use crate::grid::GridMD;
use crate::quadrature::GaussLegendre;
use crate::splitmd::{FieldMD, Stage};
use crate::weights::{WeightSpec, WeightTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSample {
    pub t: f64,
    pub value: f64,
    pub stage: Stage,
}

/// `sum_{interior} w_j^2 E_j |V|`, summed in flat index order.
pub fn discrete_lyapunov(field: &FieldMD, weights: &WeightTable) -> f64 {
    let grid = field.grid();
    let values = field.values();
    let mut sum = 0.0;
    for j in grid.interior_flat() {
        sum += values[j] * values[j] * weights.at(j);
    }
    sum * grid.cell_volume()
}

pub fn sample(field: &FieldMD, weights: &WeightTable, t: f64) -> LyapunovSample {
    LyapunovSample {
        t,
        value: discrete_lyapunov(field, weights),
        stage: field.stage(),
    }
}

/// Tensor Gauss-Legendre approximation of `int w^2 exp(mu) dx` for a
/// cellwise-constant field.
pub fn quadrature_lyapunov(field: &FieldMD, weights: &WeightSpec, points_per_axis: usize) -> Result<f64> {
    Ok(CellQuadrature::new(field.grid(), weights, points_per_axis)?.lyapunov(field))
}

/// Per-cell Gauss-Legendre integrals of `exp(mu)`, so that the quadrature
/// Lyapunov value of a cellwise-constant field is a weighted sum of squares.
#[derive(Debug, Clone, PartialEq)]
pub struct CellQuadrature {
    cells: Vec<(usize, f64)>,
}

impl CellQuadrature {
    pub fn new(grid: &GridMD, weights: &WeightSpec, points_per_axis: usize) -> Result<Self> {
        let mut cells = Vec::with_capacity(grid.interior_len());
        let mut current = 0;
        quadrature_cells(grid, weights, points_per_axis, |flat, x, w| {
            if cells.last().map(|c: &(usize, f64)| c.0) != Some(flat) {
                cells.push((flat, 0.0));
                current = cells.len() - 1;
            }
            cells[current].1 += w * weights.mu_unchecked(x).exp();
        })?;
        Ok(Self { cells })
    }

    pub fn lyapunov(&self, field: &FieldMD) -> f64 {
        let v = field.values();
        self.cells.iter().map(|&(j, q)| v[j] * v[j] * q).sum()
    }
}

/// As [`quadrature_lyapunov`] for a field evaluated pointwise inside each
/// cell; `eval` receives the flat cell index and the quadrature node.
pub fn quadrature_lyapunov_with<F>(
    grid: &GridMD,
    weights: &WeightSpec,
    points_per_axis: usize,
    eval: F,
) -> Result<f64>
where
    F: Fn(usize, &[f64]) -> f64,
{
    let mut total = 0.0;
    quadrature_cells(grid, weights, points_per_axis, |flat, x, w| {
        let v = eval(flat, x);
        total += w * v * v * weights.mu_unchecked(x).exp();
    })?;
    Ok(total)
}

/// Visit every interior quadrature node with its cell index and weight
/// (normalized weights times cell volume).
fn quadrature_cells<F>(grid: &GridMD, weights: &WeightSpec, points_per_axis: usize, mut f: F) -> Result<()>
where
    F: FnMut(usize, &[f64], f64),
{
    if points_per_axis == 0 {
        return Err(Error::Validation("points_per_axis must be positive".into()));
    }
    if weights.dim() != grid.dim() {
        return Err(Error::Validation("weight and grid dimensions differ".into()));
    }
    let rule = GaussLegendre::new(points_per_axis)?;
    let volume = grid.cell_volume();
    let mut point = vec![0.0; grid.dim()];
    for idx in grid.interior_indices() {
        let flat = grid.flat(&idx);
        let nodes: Vec<Vec<(f64, f64)>> = (0..grid.dim())
            .map(|k| {
                let axis = grid.axis(k);
                rule.on_interval(axis.interface(idx[k]), axis.interface(idx[k] + 1))
            })
            .collect();
        crate::initial::tensor_sum(&nodes, 0, volume, &mut point, &mut |x, w| f(flat, x, w));
    }
    Ok(())
}
