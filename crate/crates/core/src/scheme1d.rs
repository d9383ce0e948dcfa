//! Three-point finite-volume kernel in viscous form with feedback boundary closure.
//!
//! One step on a line `w_0 .. w_{M+1}` is
//!
//! ```text
//! w_j <- w_j - (a lambda / 2) (w_{j+1} - w_{j-1}) + (q / 2) (w_{j-1} - 2 w_j + w_{j+1}),   j = 1..M
//! ```
//!
//! where `q` is the numerical viscosity. `q = 1` is Lax-Friedrichs and
//! `q = (lambda a)^2` is Lax-Wendroff. The inflow ghost carries the control
//! `u^n`. The outflow ghost is a constant extrapolation of the adjacent cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::weights::WeightSpec;

/// Relative slack allowed when checking the CFL and viscosity bands, so that
/// `q = (lambda a)^2` computed from a CFL-derived time step is not rejected.
const BAND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViscosityPreset {
    /// `q = (lambda a)^2`
    LaxWendroff,
    /// `q = lambda |a|`
    Courant,
    /// `q = 1`
    LaxFriedrichs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Viscosity {
    Preset(ViscosityPreset),
    Value(f64),
}

impl Viscosity {
    /// Coefficient `q` for a Courant number `lambda |a|`.
    pub fn resolve(&self, courant: f64) -> f64 {
        let c = courant.abs();
        match self {
            Viscosity::Preset(ViscosityPreset::LaxWendroff) => c * c,
            Viscosity::Preset(ViscosityPreset::Courant) => c,
            Viscosity::Preset(ViscosityPreset::LaxFriedrichs) => 1.0,
            Viscosity::Value(q) => *q,
        }
    }
}

impl From<ViscosityPreset> for Viscosity {
    fn from(p: ViscosityPreset) -> Self {
        Viscosity::Preset(p)
    }
}

/// Parameters of one directional sweep. Validated on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    a: f64,
    dx: f64,
    dt: f64,
    q: f64,
    c_l: f64,
}

impl SchemeParams {
    pub fn new(a: f64, dx: f64, dt: f64, q: f64, c_l: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::Validation("advection speed must be finite and nonzero".into()));
        }
        if !(dx > 0.0 && dt > 0.0 && dx.is_finite() && dt.is_finite()) {
            return Err(Error::Validation(format!("need dx > 0 and dt > 0, got {dx}, {dt}")));
        }
        let courant = dt / dx * a.abs();
        if courant > 1.0 + BAND_TOL {
            return Err(Error::Validation(format!(
                "CFL condition violated: lambda |a| = {courant} > 1"
            )));
        }
        if !(q.is_finite() && q >= courant * courant * (1.0 - BAND_TOL) && q <= 1.0 + BAND_TOL) {
            return Err(Error::Validation(format!(
                "viscosity q = {q} outside the stability band [{}, 1]",
                courant * courant
            )));
        }
        if !(c_l >= 0.0 && c_l.is_finite()) {
            return Err(Error::Validation(format!("decay constant {c_l} must be >= 0")));
        }
        if 1.0 - c_l * dt <= 0.0 {
            return Err(Error::Validation(format!(
                "time step too large for the decay constant: 1 - C_L dt = {}",
                1.0 - c_l * dt
            )));
        }
        Ok(Self { a, dx, dt, q, c_l })
    }

    pub fn with_viscosity(a: f64, dx: f64, dt: f64, viscosity: Viscosity, c_l: f64) -> Result<Self> {
        let q = viscosity.resolve(dt / dx * a);
        Self::new(a, dx, dt, q, c_l)
    }

    /// Same speed, viscosity and decay constant with a different time step.
    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        Self::new(self.a, self.dx, dt, self.q, self.c_l)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn c_l(&self) -> f64 {
        self.c_l
    }

    /// Mesh ratio `dt / dx`.
    pub fn lambda(&self) -> f64 {
        self.dt / self.dx
    }

    /// Signed Courant number `lambda a`.
    pub fn courant(&self) -> f64 {
        self.lambda() * self.a
    }
}

/// Cell averages `w_0 .. w_{M+1}` of one line together with `exp(mu)` at the same centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl Line {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::InputData(format!(
                "a line needs at least one interior cell plus two ghosts, got {} values",
                values.len()
            )));
        }
        if values.len() != weights.len() {
            return Err(Error::InputData(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InputData("line values must be finite".into()));
        }
        if weights.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InputData("weights must be finite and positive".into()));
        }
        Ok(Self { values, weights })
    }

    /// Line over `grid` with the given interior values and zero ghosts.
    pub fn from_grid(grid: &Grid1D, interior: &[f64], spec: &WeightSpec) -> Result<Self> {
        if interior.len() != grid.cells() {
            return Err(Error::InputData(format!(
                "{} interior values for {} cells",
                interior.len(),
                grid.cells()
            )));
        }
        let mut values = Vec::with_capacity(grid.extended_len());
        values.push(0.0);
        values.extend_from_slice(interior);
        values.push(0.0);
        let weights = grid
            .centers()
            .iter()
            .map(|&x| spec.exp_weight(&[x]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(values, weights)
    }

    /// Interior cell count `M`.
    pub fn cells(&self) -> usize {
        self.values.len() - 2
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }

    /// `sum_{j=1}^M w_j^2 E_j dx`.
    pub fn lyapunov(&self, dx: f64) -> f64 {
        let m = self.cells();
        let mut sum = 0.0;
        for j in 1..=m {
            sum += self.values[j] * self.values[j] * self.weights[j];
        }
        sum * dx
    }

    /// Value in the inflow ghost for speed `a`.
    pub fn inflow_ghost(&self, a: f64) -> f64 {
        if a > 0.0 {
            self.values[0]
        } else {
            self.values[self.cells() + 1]
        }
    }
}

/// Boundary feedback law for a single line.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlLaw {
    /// Equality in the discrete admissibility condition.
    EqualityReflect,
    /// `theta` times the equality value, `theta` in `[0, 1]`.
    ScaledReflect(f64),
    Zero,
    /// `u(t_n)` given externally, indexed by step.
    Prescribed(Vec<f64>),
}

impl ControlLaw {
    pub fn evaluate(&self, line: &Line, a: f64, step: usize) -> Result<f64> {
        match self {
            ControlLaw::EqualityReflect => Ok(control_equality_1d(line, a)),
            ControlLaw::ScaledReflect(theta) => {
                if !(0.0..=1.0).contains(theta) {
                    return Err(Error::Validation(format!("theta = {theta} outside [0, 1]")));
                }
                Ok(theta * control_equality_1d(line, a))
            }
            ControlLaw::Zero => Ok(0.0),
            ControlLaw::Prescribed(seq) => seq.get(step).copied().ok_or_else(|| {
                Error::InputData(format!(
                    "prescribed control has {} values, step {step} requested",
                    seq.len()
                ))
            }),
        }
    }
}

/// Control value that turns the admissibility condition into an equality.
///
/// For `a > 0` the outflow ghost `w_{M+1}` is observed and the value is fed
/// into `w_0`; for `a < 0` the roles are mirrored. The nonnegative root is taken.
pub fn control_equality_1d(line: &Line, a: f64) -> f64 {
    let w = &line.values;
    let e = &line.weights;
    let m = line.cells();
    let (observed, e_out, e_in) = if a > 0.0 {
        (w[m + 1], e[m] + e[m + 1], e[0] + e[1])
    } else {
        (w[0], e[0] + e[1], e[m] + e[m + 1])
    };
    (observed * observed * e_out / e_in).sqrt()
}

/// Signed gap in the admissibility condition, written in magnitude form:
/// `|a|/2 (u^2 (E_in pair) - w_obs^2 (E_out pair))`. Admissible iff `<= 0`.
pub fn admissibility_gap(line: &Line, a: f64) -> f64 {
    let w = &line.values;
    let e = &line.weights;
    let m = line.cells();
    let (u, observed, e_in, e_out) = if a > 0.0 {
        (w[0], w[m + 1], e[0] + e[1], e[m] + e[m + 1])
    } else {
        (w[m + 1], w[0], e[m] + e[m + 1], e[0] + e[1])
    };
    0.5 * a.abs() * (u * u * e_in - observed * observed * e_out)
}

/// Copy the adjacent interior value into the outflow ghost.
pub fn refresh_outflow(line: &mut Line, a: f64) {
    let m = line.cells();
    if a > 0.0 {
        line.values[m + 1] = line.values[m];
    } else {
        line.values[0] = line.values[1];
    }
}

/// Outflow copy-out followed by writing `value` into the inflow ghost.
pub fn set_ghosts(line: &mut Line, a: f64, value: f64) {
    refresh_outflow(line, a);
    let m = line.cells();
    if a > 0.0 {
        line.values[0] = value;
    } else {
        line.values[m + 1] = value;
    }
}

/// Populate both ghosts for time `t_step`; returns the control value applied.
pub fn apply_boundary(
    line: &mut Line,
    p: &SchemeParams,
    law: &ControlLaw,
    step: usize,
) -> Result<f64> {
    refresh_outflow(line, p.a());
    let u = law.evaluate(line, p.a(), step)?;
    set_ghosts(line, p.a(), u);
    Ok(u)
}

/// Viscous-form update of the interior cells; ghosts are copied unchanged.
pub fn step_interior(line: &Line, p: &SchemeParams) -> Line {
    let mut next = line.clone();
    update_interior(&line.values, &mut next.values, p);
    next
}

pub(crate) fn update_interior(old: &[f64], new: &mut [f64], p: &SchemeParams) {
    let half_courant = 0.5 * p.courant();
    let half_q = 0.5 * p.q();
    let m = old.len() - 2;
    for j in 1..=m {
        let (left, mid, right) = (old[j - 1], old[j], old[j + 1]);
        new[j] = mid - half_courant * (right - left) + half_q * (left - 2.0 * mid + right);
    }
}

/// One full time step: boundary, interior update, outflow copy-out.
/// Returns the control value that was applied at `t_step`.
pub fn step_line(line: &mut Line, p: &SchemeParams, law: &ControlLaw, step: usize) -> Result<f64> {
    let u = apply_boundary(line, p, law, step)?;
    advance(line, p);
    Ok(u)
}

/// Interior update and outflow refresh on a line whose ghosts are already set.
pub(crate) fn advance(line: &mut Line, p: &SchemeParams) {
    let old = line.values.clone();
    update_interior(&old, &mut line.values, p);
    refresh_outflow(line, p.a());
}
