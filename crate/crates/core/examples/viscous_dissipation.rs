// Weighted viscous dissipation of a smooth field for increasing viscosity.

use fvstab::grid::GridMD;
use fvstab::lyapunov::viscous_residual;
use fvstab::splitmd::FieldMD;
use fvstab::weights::{WeightSpec, WeightTable};

pub fn run_example() -> fvstab::Result<()> {
    let grid = GridMD::new(&[(0.0, 1.0), (0.0, 1.0)], &[64, 64])?;
    let table = WeightTable::new(&grid, &WeightSpec::general(&[-1.25, 1.0], 0.0)?)?;
    let mut field = FieldMD::zeros(&grid);
    for flat in 0..grid.extended_len() {
        let x = grid.center(&grid.multi(flat));
        field.values_mut()[flat] = (std::f64::consts::TAU * x[0]).sin() * (std::f64::consts::TAU * x[1]).sin();
    }
    for q in [0.0, 0.25, 0.5, 1.0] {
        println!("q = {q:<5} dissipation {:+.6e}", viscous_residual(&field, &table, q));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> fvstab::Result<()> {
    run_example()
}
