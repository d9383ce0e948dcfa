// Split of the per-step Lyapunov change into transport, boundary and
// viscous contributions, and how closely the split accounts for it.

use fvstab::grid::Grid1D;
use fvstab::initial::InitialData;
use fvstab::scheme1d::{ControlLaw, ViscosityPreset};
use fvstab::sim::{run_1d, Setup1d};
use fvstab::weights::WeightSpec;

pub fn run_example() -> fvstab::Result<()> {
    for (name, preset) in [
        ("lax-wendroff", ViscosityPreset::LaxWendroff),
        ("courant", ViscosityPreset::Courant),
        ("lax-friedrichs", ViscosityPreset::LaxFriedrichs),
    ] {
        let setup = Setup1d {
            grid: Grid1D::new(0.0, 1.0, 100)?,
            speed: 2.0,
            viscosity: preset.into(),
            c_l: 3.0,
            weights: WeightSpec::per_direction(3.0, &[2.0])?,
            law: ControlLaw::ScaledReflect(0.5),
            initial: InitialData::Sin1d,
            final_time: 1.0,
            cfl: 0.5,
            dt: None,
            exact_final_time: false,
        };
        let series = run_1d(&setup)?;
        let worst = series.rows[..series.rows.len() - 1]
            .iter()
            .map(|r| r.residual.ledger_defect_with_gap().abs())
            .fold(0.0, f64::max);
        let mid = &series.rows[series.rows.len() / 2].residual;
        println!("{name}: q = {}", series.params.q());
        println!("  rate {:+.6e} = RE {:+.6e} + Ru {:+.6e} + R2 {:+.6e} + R1 {:+.6e} + gap {:+.6e}",
            mid.rate, mid.re_exact, mid.ru, mid.r2, mid.r1, mid.control_gap);
        println!("  R_total {:+.6e}, worst ledger defect {worst:.2e}", mid.total);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> fvstab::Result<()> {
    run_example()
}
