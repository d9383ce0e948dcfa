// Which weights satisfy the per-direction and the aggregate decay condition.

use fvstab::weights::{DecayCondition, WeightSpec, DEFAULT_CONDITION_TOL};

pub fn run_example() -> fvstab::Result<()> {
    let cases = [
        ("per-direction, a = (1, -2)", WeightSpec::per_direction(2.0, &[1.0, -2.0])?, vec![1.0, -2.0], 2.0),
        ("affine, a = (4, 2)", WeightSpec::general(&[-1.25, 1.0], 0.0)?, vec![4.0, 2.0], 3.0),
        ("affine, a = (2, -2)", WeightSpec::general(&[-0.5, 1.0], 0.0)?, vec![2.0, -2.0], 3.0),
        ("unit weight, a = (1, 1)", WeightSpec::unit(2), vec![1.0, 1.0], 1.0),
    ];
    for (name, w, speeds, c_l) in cases {
        let per = w.verify_decay_condition(&speeds, c_l, DecayCondition::PerDirection, DEFAULT_CONDITION_TOL);
        let agg = w.verify_decay_condition(&speeds, c_l, DecayCondition::Aggregate, DEFAULT_CONDITION_TOL);
        println!(
            "{name:<28} per-direction {:<5} (violation {:.2e})  aggregate {:<5} (violation {:.2e})",
            per.holds, per.residual, agg.holds, agg.residual
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> fvstab::Result<()> {
    run_example()
}
