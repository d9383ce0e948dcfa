//! Affine weight exponents `mu` and the exponential weights `exp(mu)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridMD;

/// Weight exponent `mu(x)`, always affine.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// `mu(x) = sum_k -(c_l / d) / a_k * x_k`, so that `a_k mu_k' = -c_l / d` on every axis.
    PerDirectionAffine { c_l: f64, speeds: Vec<f64> },
    /// `mu(x) = gradient . x + offset`.
    GeneralAffine { gradient: Vec<f64>, offset: f64 },
}

/// Which decay condition [`WeightSpec::verify_decay_condition`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayCondition {
    /// `a_k d(mu)/dx_k = -C_L / d` for every axis separately.
    PerDirection,
    /// `a . grad(mu) = -C_L`.
    Aggregate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayReport {
    pub holds: bool,
    /// Largest absolute violation over the checked equations.
    pub residual: f64,
}

pub const DEFAULT_CONDITION_TOL: f64 = 1e-12;

impl WeightSpec {
    pub fn per_direction(c_l: f64, speeds: &[f64]) -> Result<Self> {
        if !(c_l > 0.0 && c_l.is_finite()) {
            return Err(Error::Validation(format!("decay constant {c_l} must be positive")));
        }
        if speeds.is_empty() || speeds.iter().any(|a| *a == 0.0 || !a.is_finite()) {
            return Err(Error::Validation(
                "per-direction weight needs finite nonzero speeds".into(),
            ));
        }
        Ok(Self::PerDirectionAffine {
            c_l,
            speeds: speeds.to_vec(),
        })
    }

    pub fn general(gradient: &[f64], offset: f64) -> Result<Self> {
        if gradient.is_empty() || gradient.iter().chain([&offset]).any(|v| !v.is_finite()) {
            return Err(Error::Validation("affine weight needs finite coefficients".into()));
        }
        Ok(Self::GeneralAffine {
            gradient: gradient.to_vec(),
            offset,
        })
    }

    /// `mu == 0`.
    pub fn unit(dim: usize) -> Self {
        Self::GeneralAffine {
            gradient: vec![0.0; dim],
            offset: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::PerDirectionAffine { speeds, .. } => speeds.len(),
            Self::GeneralAffine { gradient, .. } => gradient.len(),
        }
    }

    pub fn gradient(&self) -> Vec<f64> {
        match self {
            Self::PerDirectionAffine { c_l, speeds } => {
                let d = speeds.len() as f64;
                speeds.iter().map(|a| -(c_l / d) / a).collect()
            }
            Self::GeneralAffine { gradient, .. } => gradient.clone(),
        }
    }

    pub fn offset(&self) -> f64 {
        match self {
            Self::PerDirectionAffine { .. } => 0.0,
            Self::GeneralAffine { offset, .. } => *offset,
        }
    }

    pub fn mu_value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.mu_unchecked(x))
    }

    pub fn exp_weight(&self, x: &[f64]) -> Result<f64> {
        self.mu_value(x).map(f64::exp)
    }

    pub(crate) fn mu_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            Self::PerDirectionAffine { c_l, speeds } => {
                let d = speeds.len() as f64;
                speeds.iter().zip(x).map(|(a, xk)| -(c_l / d) / a * xk).sum()
            }
            Self::GeneralAffine { gradient, offset } => {
                gradient.iter().zip(x).map(|(g, xk)| g * xk).sum::<f64>() + offset
            }
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::Validation(format!(
                "point of dimension {n} for a {}-dimensional weight",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Checks the decay condition for constant speeds. Never errors: a
    /// dimension mismatch is reported as a failed condition with infinite residual.
    pub fn verify_decay_condition(
        &self,
        speeds: &[f64],
        c_l: f64,
        condition: DecayCondition,
        tol: f64,
    ) -> DecayReport {
        if speeds.len() != self.dim() {
            return DecayReport {
                holds: false,
                residual: f64::INFINITY,
            };
        }
        let grad = self.gradient();
        let residual = match condition {
            DecayCondition::PerDirection => {
                let d = speeds.len() as f64;
                speeds
                    .iter()
                    .zip(&grad)
                    .map(|(a, g)| (a * g + c_l / d).abs())
                    .fold(0.0, f64::max)
            }
            DecayCondition::Aggregate => {
                (speeds.iter().zip(&grad).map(|(a, g)| a * g).sum::<f64>() + c_l).abs()
            }
        };
        DecayReport {
            holds: residual <= tol,
            residual,
        }
    }

    /// `int exp(mu)` over the box `prod [lo_k, hi_k]`, in closed form.
    pub fn box_integral(&self, bounds: &[(f64, f64)]) -> Result<f64> {
        self.check_dim(bounds.len())?;
        let factor: f64 = self
            .gradient()
            .iter()
            .zip(bounds)
            .map(|(&g, &(lo, hi))| {
                if g == 0.0 {
                    hi - lo
                } else {
                    ((g * hi).exp() - (g * lo).exp()) / g
                }
            })
            .product();
        Ok(factor * self.offset().exp())
    }

    /// `int exp(mu)` over the face `x_axis = at` of the box, in closed form.
    pub fn face_integral(&self, bounds: &[(f64, f64)], axis: usize, at: f64) -> Result<f64> {
        self.check_dim(bounds.len())?;
        if axis >= bounds.len() {
            return Err(Error::Validation(format!("no axis {axis} in a {}-d box", bounds.len())));
        }
        let mut face = bounds.to_vec();
        face[axis] = (0.0, 1.0);
        let mut flat = self.clone();
        if let Self::GeneralAffine { gradient, offset } = &mut flat {
            *offset += gradient[axis] * at;
            gradient[axis] = 0.0;
        } else {
            let mut gradient = self.gradient();
            let offset = gradient[axis] * at;
            gradient[axis] = 0.0;
            flat = Self::GeneralAffine { gradient, offset };
        }
        flat.box_integral(&face)
    }
}

/// `exp(mu)` sampled at every cell center of the extended grid, ghosts included.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    values: Vec<f64>,
}

impl WeightTable {
    pub fn new(grid: &GridMD, spec: &WeightSpec) -> Result<Self> {
        if spec.dim() != grid.dim() {
            return Err(Error::Validation(format!(
                "{}-dimensional weight on a {}-dimensional grid",
                spec.dim(),
                grid.dim()
            )));
        }
        let values = (0..grid.extended_len())
            .map(|f| spec.mu_unchecked(&grid.center(&grid.multi(f))).exp())
            .collect();
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, flat: usize) -> f64 {
        self.values[flat]
    }
}
