// Empirical order of convergence of the final Lyapunov value for the three
// viscosity presets.

use fvstab::analysis::run_refinement_study;
use fvstab::grid::Grid1D;
use fvstab::initial::InitialData;
use fvstab::scheme1d::{ControlLaw, ViscosityPreset};
use fvstab::sim::{run_1d, Setup1d};
use fvstab::weights::WeightSpec;

pub fn run_example() -> fvstab::Result<()> {
    let levels = [vec![10], vec![100], vec![1000]];
    for preset in [
        ViscosityPreset::LaxWendroff,
        ViscosityPreset::Courant,
        ViscosityPreset::LaxFriedrichs,
    ] {
        let study = run_refinement_study(preset.into(), &levels, 3.0, |cells| {
            let setup = Setup1d {
                grid: Grid1D::new(0.0, 1.0, cells[0])?,
                speed: 2.0,
                viscosity: preset.into(),
                c_l: 3.0,
                weights: WeightSpec::per_direction(3.0, &[2.0])?,
                law: ControlLaw::EqualityReflect,
                initial: InitialData::Sin1d,
                final_time: 3.0,
                cfl: 0.5,
                dt: None,
                exact_final_time: false,
            };
            let s = run_1d(&setup)?;
            Ok(fvstab::analysis::LevelResult {
                l_final: s.last().lyapunov,
                t_final: s.last().t,
                l0_grid: s.rows[0].lyapunov,
                l0_cont: s.lyapunov0_cont,
            })
        })?;
        println!("{preset:?}");
        for (i, l) in study.levels.iter().enumerate() {
            let p = if i == 0 { String::new() } else { format!("{:.4}", study.eoc_grid[i - 1]) };
            println!("  M = {:>5}  error {:.4e}  eoc {p}", l.cells[0], l.error_grid);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> fvstab::Result<()> {
    run_example()
}
