//! TOML run configuration. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, GridMD};
use crate::initial::InitialData;
use crate::scheme1d::{ControlLaw, Viscosity};
use crate::sim::{ComponentSpec, MdControlMode, Setup1d, SetupMd};
use crate::splitmd::Face;
use crate::weights::WeightSpec;

/// The only solver this crate implements: first-order dimensional splitting.
pub const SOLVER_ID: &str = "fv-split-1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub solver: String,
    pub domain: DomainConfig,
    pub time: TimeConfig,
    pub scheme: SchemeConfig,
    pub components: Vec<ComponentConfig>,
    pub control: ControlConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudyConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    /// `[lower, upper]` per axis.
    pub bounds: Vec<[f64; 2]>,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub final_time: f64,
    pub cfl: f64,
    #[serde(default)]
    pub exact_final_time: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    /// One entry per axis: a preset name or a number.
    pub viscosity: Vec<Viscosity>,
    pub decay_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub speeds: Vec<f64>,
    pub weight: WeightConfig,
    pub initial: InitialData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightForm {
    PerDirection,
    General,
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub form: WeightForm,
    /// Defaults to the scheme decay constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ControlConfig {
    EqualityReflect,
    ScaledReflect {
        theta: f64,
    },
    Zero,
    Prescribed {
        values: Vec<f64>,
    },
    PerDirectionEquality,
    AggregateIntegral {
        controlled: Vec<Face>,
        #[serde(default)]
        uncontrolled_value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Emit every `stride`-th level; by default twelve levels including both ends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Track per-sweep residuals and decay bounds in multi-D runs.
    #[serde(default)]
    pub bounds: bool,
    #[serde(default = "default_points")]
    pub quadrature_points: usize,
}

/// `P + 1` points per axis for cellwise-constant (`P = 0`) data.
fn default_points() -> usize {
    1
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            stride: None,
            snapshot_times: Vec::new(),
            bounds: false,
            quadrature_points: default_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    /// Cell counts per axis for each level, coarse to fine.
    pub resolutions: Vec<Vec<usize>>,
    /// Viscosities to sweep; defaults to the scheme setting.
    #[serde(default)]
    pub viscosities: Vec<Viscosity>,
}

/// A validated problem ready to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    OneD(Setup1d),
    MultiD(SetupMd),
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.domain.bounds.len()
    }

    /// Copy with a different resolution.
    pub fn with_cells(&self, cells: &[usize]) -> Self {
        let mut c = self.clone();
        c.domain.cells = cells.to_vec();
        c
    }

    pub fn with_viscosity(&self, viscosity: Viscosity) -> Self {
        let mut c = self.clone();
        c.scheme.viscosity = vec![viscosity; self.dim()];
        c
    }

    /// Check every structural constraint and build the setup. Scheme
    /// preconditions (CFL and viscosity bands, `1 - C_L dt > 0`) are checked
    /// here too, so nothing is simulated from an invalid file.
    pub fn problem(&self) -> Result<Problem> {
        if self.solver != SOLVER_ID {
            return Err(Error::Config(format!(
                "solver must be \"{SOLVER_ID}\", got \"{}\"",
                self.solver
            )));
        }
        let d = self.dim();
        if d == 0 || self.domain.cells.len() != d {
            return Err(Error::Config(format!(
                "domain needs matching bounds and cells, got {} and {}",
                d,
                self.domain.cells.len()
            )));
        }
        if self.scheme.viscosity.len() != d {
            return Err(Error::Config(format!("scheme.viscosity needs {d} entries")));
        }
        if self.components.is_empty() {
            return Err(Error::Config("at least one component is required".into()));
        }
        let bounds: Vec<(f64, f64)> = self.domain.bounds.iter().map(|b| (b[0], b[1])).collect();
        let grid = GridMD::new(&bounds, &self.domain.cells)?;
        let mut comps = Vec::new();
        for (i, c) in self.components.iter().enumerate() {
            if c.speeds.len() != d {
                return Err(Error::Config(format!("component {i}: need {d} speeds")));
            }
            comps.push(ComponentSpec {
                speeds: c.speeds.clone(),
                weights: self.weight(i)?,
                initial: c.initial.clone(),
            });
        }
        if d == 1 {
            if comps.len() != 1 {
                return Err(Error::Config("one-dimensional runs take exactly one component".into()));
            }
            let law = match &self.control {
                ControlConfig::EqualityReflect => ControlLaw::EqualityReflect,
                ControlConfig::ScaledReflect { theta } => ControlLaw::ScaledReflect(*theta),
                ControlConfig::Zero => ControlLaw::Zero,
                ControlConfig::Prescribed { values } => ControlLaw::Prescribed(values.clone()),
                other => {
                    return Err(Error::Config(format!(
                        "control {other:?} is not available in one dimension"
                    )))
                }
            };
            let comp = comps.pop().expect("checked above");
            let axis: Grid1D = grid.axis(0).clone();
            let setup = Setup1d {
                grid: axis,
                speed: comp.speeds[0],
                viscosity: self.scheme.viscosity[0],
                c_l: self.scheme.decay_constant,
                weights: comp.weights,
                law,
                initial: comp.initial,
                final_time: self.time.final_time,
                cfl: self.time.cfl,
                dt: self.time.dt,
                exact_final_time: self.time.exact_final_time,
            };
            setup.params()?;
            if let ControlLaw::ScaledReflect(theta) = setup.law {
                if !(0.0..=1.0).contains(&theta) {
                    return Err(Error::Validation(format!("theta {theta} outside [0, 1]")));
                }
            }
            return Ok(Problem::OneD(setup));
        }
        let control = match &self.control {
            ControlConfig::Zero => MdControlMode::Zero,
            ControlConfig::PerDirectionEquality => MdControlMode::PerDirectionEquality,
            ControlConfig::AggregateIntegral {
                controlled,
                uncontrolled_value,
            } => MdControlMode::Aggregate {
                controlled: controlled.clone(),
                uncontrolled_value: *uncontrolled_value,
            },
            other => {
                return Err(Error::Config(format!(
                    "control {other:?} is only available in one dimension"
                )))
            }
        };
        let setup = SetupMd {
            grid,
            components: comps,
            viscosity: self.scheme.viscosity.clone(),
            c_l: self.scheme.decay_constant,
            cfl: self.time.cfl,
            dt: self.time.dt,
            final_time: self.time.final_time,
            exact_final_time: self.time.exact_final_time,
            control,
            audit: self.output.bounds,
            quadrature_points: self.output.quadrature_points,
            snapshot_times: self.output.snapshot_times.clone(),
        };
        setup.validate()?;
        Ok(Problem::MultiD(setup))
    }

    fn weight(&self, i: usize) -> Result<WeightSpec> {
        let c = &self.components[i];
        let w = &c.weight;
        let d = self.dim();
        match w.form {
            WeightForm::PerDirection => {
                if w.gradient.is_some() || w.offset.is_some() {
                    return Err(Error::Config(format!(
                        "component {i}: per-direction weight takes no gradient or offset"
                    )));
                }
                WeightSpec::per_direction(w.c_l.unwrap_or(self.scheme.decay_constant), &c.speeds)
            }
            WeightForm::General => {
                let g = w.gradient.as_ref().ok_or_else(|| {
                    Error::Config(format!("component {i}: general weight needs a gradient"))
                })?;
                if g.len() != d || w.c_l.is_some() {
                    return Err(Error::Config(format!(
                        "component {i}: general weight needs {d} gradient entries and no c_l"
                    )));
                }
                WeightSpec::general(g, w.offset.unwrap_or(0.0))
            }
            WeightForm::Unit => {
                if w.gradient.is_some() || w.offset.is_some() || w.c_l.is_some() {
                    return Err(Error::Config(format!("component {i}: unit weight takes no parameters")));
                }
                Ok(WeightSpec::unit(d))
            }
        }
    }
}
