//! Refinement studies and empirical orders of convergence.

use crate::error::{Error, Result};
use crate::scheme1d::Viscosity;

/// `L0 exp(-C_L t)`.
pub fn exact_reference(l0: f64, c_l: f64, t: f64) -> f64 {
    l0 * (-c_l * t).exp()
}

/// `ln(err_coarse / err_fine) / ln(ratio)`.
pub fn eoc(err_coarse: f64, err_fine: f64, ratio: f64) -> Result<f64> {
    if !(err_coarse > 0.0 && err_fine > 0.0) {
        return Err(Error::UndefinedOrder(format!(
            "errors must be positive, got {err_coarse} and {err_fine}"
        )));
    }
    if !(ratio > 1.0) {
        return Err(Error::Validation(format!("refinement ratio {ratio} must exceed 1")));
    }
    Ok((err_coarse / err_fine).ln() / ratio.ln())
}

/// Outcome of one simulation entering a study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelResult {
    pub l_final: f64,
    pub t_final: f64,
    /// Discrete Lyapunov value of the projected initial data.
    pub l0_grid: f64,
    /// Lyapunov value of the continuous initial data, if defined.
    pub l0_cont: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyLevel {
    pub cells: Vec<usize>,
    pub result: LevelResult,
    /// Error against the continuous reference `L(0) exp(-C_L t)`.
    pub error: Option<f64>,
    /// Error against the grid reference `L^0 exp(-C_L t)`.
    pub error_grid: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementStudy {
    pub viscosity: Viscosity,
    pub levels: Vec<StudyLevel>,
    /// Cell-volume ratio between consecutive levels.
    pub ratios: Vec<f64>,
    /// One entry per consecutive pair of levels.
    pub eoc: Vec<Option<f64>>,
    pub eoc_grid: Vec<f64>,
}

/// Run `simulate` at each resolution and compute errors and orders.
///
/// `simulate` receives the cell counts per axis for one level.
pub fn run_refinement_study<F>(
    viscosity: Viscosity,
    resolutions: &[Vec<usize>],
    c_l: f64,
    mut simulate: F,
) -> Result<RefinementStudy>
where
    F: FnMut(&[usize]) -> Result<LevelResult>,
{
    if resolutions.len() < 2 {
        return Err(Error::Validation("a study needs at least two resolutions".into()));
    }
    let mut ratios = Vec::new();
    for pair in resolutions.windows(2) {
        let (c, f) = (&pair[0], &pair[1]);
        if c.len() != f.len() || c.iter().zip(f).any(|(a, b)| b <= a) {
            return Err(Error::Validation(format!(
                "resolutions {c:?} -> {f:?} are not strictly refining"
            )));
        }
        ratios.push(c.iter().zip(f).map(|(a, b)| *b as f64 / *a as f64).product());
    }
    let mut levels = Vec::new();
    for cells in resolutions {
        let result = simulate(cells)?;
        let error = result
            .l0_cont
            .map(|l0| (result.l_final - exact_reference(l0, c_l, result.t_final)).abs());
        let error_grid = (result.l_final - exact_reference(result.l0_grid, c_l, result.t_final)).abs();
        levels.push(StudyLevel {
            cells: cells.clone(),
            result,
            error,
            error_grid,
        });
    }
    let mut orders = Vec::new();
    let mut orders_grid = Vec::new();
    for (i, ratio) in ratios.iter().enumerate() {
        let (c, f) = (&levels[i], &levels[i + 1]);
        orders.push(match (c.error, f.error) {
            (Some(ec), Some(ef)) => Some(eoc(ec, ef, *ratio)?),
            _ => None,
        });
        orders_grid.push(eoc(c.error_grid, f.error_grid, *ratio)?);
    }
    Ok(RefinementStudy {
        viscosity,
        levels,
        ratios,
        eoc: orders,
        eoc_grid: orders_grid,
    })
}
