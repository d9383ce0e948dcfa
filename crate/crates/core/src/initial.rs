//! Initial data and their projection onto cell averages.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridMD;
use crate::quadrature::GaussLegendre;
use crate::weights::WeightSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    /// `sin(2 pi x_1)`, only the first coordinate is used.
    Sin1d,
    /// `prod_k sin(2 pi x_k)`.
    #[serde(rename = "sinsin2d")]
    SinSin2d,
    Constant { value: f64 },
    /// Interior cell averages, first axis fastest.
    Table { values: Vec<f64> },
}

impl InitialData {
    /// Point value; `None` for tabulated data.
    pub fn eval(&self, x: &[f64]) -> Option<f64> {
        match self {
            InitialData::Sin1d => Some((2.0 * PI * x[0]).sin()),
            InitialData::SinSin2d => Some(x.iter().map(|xk| (2.0 * PI * xk).sin()).product()),
            InitialData::Constant { value } => Some(*value),
            InitialData::Table { .. } => None,
        }
    }

    /// Exact cell averages over the interior cells of `grid`, first axis fastest.
    pub fn project(&self, grid: &GridMD) -> Result<Vec<f64>> {
        let n = grid.interior_len();
        match self {
            InitialData::Table { values } => {
                if values.len() != n {
                    return Err(Error::InputData(format!(
                        "table has {} values, grid has {n} interior cells",
                        values.len()
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InputData("table values must be finite".into()));
                }
                Ok(values.clone())
            }
            InitialData::Constant { value } => Ok(vec![*value; n]),
            InitialData::Sin1d | InitialData::SinSin2d => {
                let factors: Vec<Vec<f64>> = (0..grid.dim())
                    .map(|k| {
                        let axis = grid.axis(k);
                        let use_axis = matches!(self, InitialData::SinSin2d) || k == 0;
                        (1..=axis.cells())
                            .map(|j| {
                                if use_axis {
                                    sine_average(axis.interface(j), axis.interface(j + 1))
                                } else {
                                    1.0
                                }
                            })
                            .collect()
                    })
                    .collect();
                Ok(grid
                    .interior_indices()
                    .iter()
                    .map(|idx| {
                        idx.iter()
                            .enumerate()
                            .map(|(k, &j)| factors[k][j - 1])
                            .product()
                    })
                    .collect())
            }
        }
    }

    /// `int_box w0(x)^2 exp(mu(x)) dx` by composite Gauss-Legendre.
    pub fn continuous_lyapunov(&self, bounds: &[(f64, f64)], weights: &WeightSpec) -> Result<f64> {
        if bounds.len() != weights.dim() {
            return Err(Error::Validation(format!(
                "{}-dimensional box for a {}-dimensional weight",
                bounds.len(),
                weights.dim()
            )));
        }
        if matches!(self, InitialData::Table { .. }) {
            return Err(Error::InputData(
                "tabulated data has no continuous Lyapunov value".into(),
            ));
        }
        let rule = GaussLegendre::new(16)?;
        let panels = if bounds.len() == 1 { 64 } else { 24 };
        let per_axis: Vec<Vec<(f64, f64)>> = bounds
            .iter()
            .map(|&(lo, hi)| {
                let h = (hi - lo) / panels as f64;
                (0..panels)
                    .flat_map(|p| {
                        let a = lo + p as f64 * h;
                        rule.on_interval(a, a + h)
                            .into_iter()
                            .map(move |(x, w)| (x, w * h))
                    })
                    .collect()
            })
            .collect();
        let mut total = 0.0;
        let mut point = vec![0.0; bounds.len()];
        tensor_sum(&per_axis, 0, 1.0, &mut point, &mut |x, w| {
            let v = self.eval(x).unwrap_or(0.0);
            total += w * v * v * weights.mu_unchecked(x).exp();
        });
        Ok(total)
    }
}

fn sine_average(lo: f64, hi: f64) -> f64 {
    ((2.0 * PI * lo).cos() - (2.0 * PI * hi).cos()) / (2.0 * PI * (hi - lo))
}

pub(crate) fn tensor_sum<F: FnMut(&[f64], f64)>(
    axes: &[Vec<(f64, f64)>],
    k: usize,
    weight: f64,
    point: &mut Vec<f64>,
    f: &mut F,
) {
    if k == axes.len() {
        f(point, weight);
        return;
    }
    for &(x, w) in &axes[k] {
        point[k] = x;
        tensor_sum(axes, k + 1, weight * w, point, f);
    }
}
