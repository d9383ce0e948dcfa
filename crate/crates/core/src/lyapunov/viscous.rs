use crate::splitmd::FieldMD;
use crate::weights::WeightTable;

/// Midpoint-rule value of `int 2 q w E laplace(w) dx`, with the Laplacian
/// replaced by central second differences. Ghost values close the stencil.
pub fn viscous_residual(field: &FieldMD, weights: &WeightTable, viscosity: f64) -> f64 {
    if viscosity == 0.0 {
        return 0.0;
    }
    let grid = field.grid();
    let w = field.values();
    let inv_dx2: Vec<f64> = grid.axes().iter().map(|g| 1.0 / (g.dx() * g.dx())).collect();
    let strides: Vec<usize> = (0..grid.dim()).map(|k| grid.stride(k)).collect();
    let mut sum = 0.0;
    for j in grid.interior_flat() {
        let mut lap = 0.0;
        for (s, h) in strides.iter().zip(&inv_dx2) {
            lap += (w[j + s] - 2.0 * w[j] + w[j - s]) * h;
        }
        sum += w[j] * weights.at(j) * lap;
    }
    2.0 * viscosity * sum * grid.cell_volume()
}
