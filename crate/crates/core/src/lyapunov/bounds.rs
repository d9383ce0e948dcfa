use crate::error::{Error, Result};
use crate::weights::{DecayCondition, WeightSpec, DEFAULT_CONDITION_TOL};

/// Running geometric and exponential bounds, updated once per sweep.
///
/// With `d` sweeps per step and `c = C_L dt / d`, each sweep applies
/// `G <- (1 - c) G + dt R` and `X <- exp(-c) X + dt R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRecursion {
    dt: f64,
    rate: f64,
    geometric_factor: f64,
    exponential_factor: f64,
    geometric: f64,
    exponential: f64,
}

impl BoundRecursion {
    pub fn new(initial: f64, c_l: f64, dt: f64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("dimension must be at least one".into()));
        }
        if !(1.0 - c_l * dt > 0.0) {
            return Err(Error::PreconditionsUnmet(format!(
                "1 - C_L dt = {} must be positive",
                1.0 - c_l * dt
            )));
        }
        let c = c_l * dt / dim as f64;
        Ok(Self {
            dt,
            rate: c_l / dim as f64,
            geometric_factor: 1.0 - c,
            exponential_factor: (-c).exp(),
            geometric: initial,
            exponential: initial,
        })
    }

    pub fn push(&mut self, residual: f64) {
        self.geometric = self.geometric_factor * self.geometric + self.dt * residual;
        self.exponential = self.exponential_factor * self.exponential + self.dt * residual;
    }

    /// Update with a step other than the nominal one, e.g. a shortened final step.
    pub fn push_sweep(&mut self, residual: f64, dt: f64) {
        let c = self.rate * dt;
        self.geometric = (1.0 - c) * self.geometric + dt * residual;
        self.exponential = (-c).exp() * self.exponential + dt * residual;
    }

    pub fn geometric(&self) -> f64 {
        self.geometric
    }

    pub fn exponential(&self) -> f64 {
        self.exponential
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundTrajectory {
    pub geometric: Vec<f64>,
    pub exponential: Vec<f64>,
    /// `L^0 exp(-C_L n dt)`.
    pub reference: Vec<f64>,
}

/// Bounds at every time level from `L^0` and the per-sweep residuals
/// (`dim` entries per step, sweep order).
pub fn bound_trajectory(
    initial: f64,
    residuals: &[f64],
    c_l: f64,
    dt: f64,
    dim: usize,
) -> Result<BoundTrajectory> {
    let mut rec = BoundRecursion::new(initial, c_l, dt, dim)?;
    if !residuals.len().is_multiple_of(dim) {
        return Err(Error::InputData(format!(
            "{} residuals is not a multiple of {dim} sweeps",
            residuals.len()
        )));
    }
    let steps = residuals.len() / dim;
    let mut out = BoundTrajectory {
        geometric: Vec::with_capacity(steps + 1),
        exponential: Vec::with_capacity(steps + 1),
        reference: Vec::with_capacity(steps + 1),
    };
    out.geometric.push(initial);
    out.exponential.push(initial);
    out.reference.push(initial);
    for (n, chunk) in residuals.chunks(dim).enumerate() {
        for r in chunk {
            rec.push(*r);
        }
        out.geometric.push(rec.geometric());
        out.exponential.push(rec.exponential());
        out.reference.push(initial * (-c_l * (n + 1) as f64 * dt).exp());
    }
    Ok(out)
}

/// Multi-dimensional bounds need `a_k mu_k' = -C_L / d` in every direction.
pub fn multid_bound_preconditions(weights: &WeightSpec, speeds: &[f64], c_l: f64) -> Result<()> {
    let report = weights.verify_decay_condition(
        speeds,
        c_l,
        DecayCondition::PerDirection,
        DEFAULT_CONDITION_TOL,
    );
    if report.holds {
        Ok(())
    } else {
        Err(Error::PreconditionsUnmet(format!(
            "weight violates the per-direction decay condition by {}",
            report.residual
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_residuals_closed_form() {
        let (c, dt) = (3.0, 0.01);
        let b = bound_trajectory(2.0, &[0.0; 50], c, dt, 1).unwrap();
        assert_eq!(b.geometric[0], 2.0);
        assert_eq!(b.exponential[0], 2.0);
        for n in 0..=50 {
            let g = 2.0 * (1.0 - c * dt).powi(n as i32);
            let x = 2.0 * (-c * n as f64 * dt).exp();
            assert!((b.geometric[n] - g).abs() < 1e-14);
            assert!((b.exponential[n] - x).abs() < 1e-14);
            assert!(b.geometric[n] <= b.exponential[n]);
        }
    }

    #[test]
    fn closed_sum_matches_recursion() {
        let (c, dt) = (2.0, 0.05);
        let r = [0.3, -0.1, 0.2, 0.05, -0.02, 0.4];
        let b = bound_trajectory(1.0, &r, c, dt, 1).unwrap();
        let n = r.len();
        let mut g = (1.0 - c * dt).powi(n as i32);
        let mut x = (-c * n as f64 * dt).exp();
        for i in 1..=n {
            g += dt * (1.0 - c * dt).powi(i as i32 - 1) * r[n - i];
            x += dt * (-c * (i as f64 - 1.0) * dt).exp() * r[n - i];
        }
        assert!((b.geometric[n] - g).abs() < 1e-14);
        assert!((b.exponential[n] - x).abs() < 1e-14);
    }

    #[test]
    fn multid_exponential_closed_sum() {
        // exp(-C (k - 1 + (i - 1) d) dt / d) weights the sweep residuals
        let (c, dt, d) = (2.0, 0.05, 2usize);
        let r = [0.3, -0.1, 0.2, 0.05, -0.02, 0.4];
        let b = bound_trajectory(1.0, &r, c, dt, d).unwrap();
        let steps = r.len() / d;
        let mut x = (-c * steps as f64 * dt).exp();
        for i in 1..=steps {
            for k in 1..=d {
                let idx = (steps - i) * d + (d - k);
                x += dt * (-c * ((k - 1) + (i - 1) * d) as f64 * dt / d as f64).exp() * r[idx];
            }
        }
        assert!((b.exponential[steps] - x).abs() < 1e-14);
    }

    #[test]
    fn precondition_on_time_step() {
        assert!(matches!(
            bound_trajectory(1.0, &[], 3.0, 0.5, 1),
            Err(Error::PreconditionsUnmet(_))
        ));
    }

    #[test]
    fn multid_preconditions() {
        let sep = WeightSpec::per_direction(2.0, &[1.0, -2.0]).unwrap();
        assert!(multid_bound_preconditions(&sep, &[1.0, -2.0], 2.0).is_ok());
        let general = WeightSpec::general(&[-1.25, 1.0], 0.0).unwrap();
        assert!(matches!(
            multid_bound_preconditions(&general, &[4.0, 2.0], 3.0),
            Err(Error::PreconditionsUnmet(_))
        ));
    }
}
