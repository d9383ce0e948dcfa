// Two decoupled components stabilized by one scalar control on the left
// face, chosen so that incoming and outgoing weighted energy balance.

use fvstab::grid::GridMD;
use fvstab::initial::InitialData;
use fvstab::scheme1d::ViscosityPreset;
use fvstab::sim::{emitted_indices, run_md, ComponentSpec, MdControlMode, SetupMd};
use fvstab::splitmd::{Face, Side};
use fvstab::weights::{DecayCondition, WeightSpec, DEFAULT_CONDITION_TOL};

pub fn run_example() -> fvstab::Result<()> {
    let components = vec![
        ComponentSpec {
            speeds: vec![4.0, 2.0],
            weights: WeightSpec::general(&[-1.25, 1.0], 0.0)?,
            initial: InitialData::SinSin2d,
        },
        ComponentSpec {
            speeds: vec![2.0, -2.0],
            weights: WeightSpec::general(&[-0.5, 1.0], 0.0)?,
            initial: InitialData::SinSin2d,
        },
    ];
    for c in &components {
        let r = c.weights.verify_decay_condition(&c.speeds, 3.0, DecayCondition::Aggregate, DEFAULT_CONDITION_TOL);
        println!("aggregate decay condition for speeds {:?}: {}", c.speeds, r.holds);
    }
    let setup = SetupMd {
        grid: GridMD::new(&[(0.0, 1.0), (0.0, 1.0)], &[48, 48])?,
        components,
        viscosity: vec![ViscosityPreset::LaxFriedrichs.into(); 2],
        c_l: 3.0,
        cfl: 0.7,
        dt: None,
        final_time: 3.0,
        exact_final_time: false,
        control: MdControlMode::Aggregate {
            controlled: vec![Face::new(0, Side::Lower)],
            uncontrolled_value: 0.0,
        },
        audit: false,
        quadrature_points: 1,
        snapshot_times: Vec::new(),
    };
    let series = run_md(&setup)?;
    for i in emitted_indices(series.rows.len(), None) {
        let r = &series.rows[i];
        println!(
            "t = {:.4}  L_hat = {:.4e}  L_hat(0) e^-3t = {:.4e}  u = {:+.4e}",
            r.t,
            r.l_hat,
            r.l_hat_ref,
            r.control.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> fvstab::Result<()> {
    run_example()
}
