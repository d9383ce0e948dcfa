//! Time-marching drivers that record Lyapunov values, residuals and bounds.

use crate::error::{Error, Result};
use crate::grid::{cfl_timestep, step_count, Grid1D, GridMD};
use crate::initial::InitialData;
use crate::lyapunov::{
    discrete_lyapunov, multid_bound_preconditions, residual_terms_1d, BoundRecursion,
    CellQuadrature, ResidualBreakdown,
};
use crate::scheme1d::{self, ControlLaw, Line, SchemeParams, Viscosity};
use crate::splitmd::{
    aggregate_control_2d, step_md, sweep_direction_inspect, AggregateInput, Face, FieldMD,
    MDControl,
};
use crate::weights::{WeightSpec, WeightTable};

/// Steps shorter than this fraction of `dt` are dropped when hitting `T` exactly.
const SHORT_STEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Setup1d {
    pub grid: Grid1D,
    pub speed: f64,
    pub viscosity: Viscosity,
    pub c_l: f64,
    pub weights: WeightSpec,
    pub law: ControlLaw,
    pub initial: InitialData,
    pub final_time: f64,
    pub cfl: f64,
    /// Overrides the CFL-derived step.
    pub dt: Option<f64>,
    pub exact_final_time: bool,
}

impl Setup1d {
    pub fn time_step(&self) -> Result<f64> {
        match self.dt {
            Some(dt) => Ok(dt),
            None => cfl_timestep(&[self.speed], &GridMD::from_axes(vec![self.grid.clone()]), self.cfl),
        }
    }

    pub fn params(&self) -> Result<SchemeParams> {
        SchemeParams::with_viscosity(self.speed, self.grid.dx(), self.time_step()?, self.viscosity, self.c_l)
    }
}

/// State of a 1D run at time level `n`; `control` and `residual` describe the
/// step leaving `t_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row1d {
    pub n: usize,
    pub t: f64,
    pub lyapunov: f64,
    pub bound_geom: f64,
    pub bound_exp: f64,
    pub exact_ref_grid: f64,
    pub exact_ref_cont: f64,
    pub control: f64,
    pub residual: ResidualBreakdown,
}

#[derive(Debug, Clone)]
pub struct Series1d {
    pub rows: Vec<Row1d>,
    pub params: SchemeParams,
    pub lyapunov0_cont: Option<f64>,
    pub final_line: Line,
}

impl Series1d {
    pub fn last(&self) -> &Row1d {
        self.rows.last().expect("a series always holds the initial row")
    }
}

pub fn run_1d(setup: &Setup1d) -> Result<Series1d> {
    let params = setup.params()?;
    let dt = params.dt();
    let gmd = GridMD::from_axes(vec![setup.grid.clone()]);
    let interior = setup.initial.project(&gmd)?;
    let mut line = Line::from_grid(&setup.grid, &interior, &setup.weights)?;
    let bounds = [(setup.grid.lower(), setup.grid.upper())];
    let l0_cont = setup.initial.continuous_lyapunov(&bounds, &setup.weights).ok();
    let (steps, last_dt) = schedule(setup.final_time, dt, setup.exact_final_time)?;
    let last_params = if last_dt == dt { params } else { params.with_dt(last_dt)? };

    let dx = setup.grid.dx();
    let l0 = line.lyapunov(dx);
    let c = setup.c_l;
    let mut rec = BoundRecursion::new(l0, c, dt, 1)?;
    let mut rows = Vec::with_capacity(steps + 1);
    let mut t = 0.0;
    for n in 0..steps {
        let p = if n + 1 == steps { last_params } else { params };
        let u = scheme1d::apply_boundary(&mut line, &p, &setup.law, n)?;
        let before = line.clone();
        scheme1d::advance(&mut line, &p);
        let residual = residual_terms_1d(&before, &line, &p, u)?;
        if !residual.rate.is_finite() {
            return Err(Error::Numerical(format!("non-finite Lyapunov value at step {n}")));
        }
        rows.push(row(n, t, &rec, residual.lyapunov_before, l0, l0_cont, c, u, residual));
        rec.push_sweep(residual.total, p.dt());
        t = if n + 1 == steps && setup.exact_final_time {
            setup.final_time
        } else {
            (n + 1) as f64 * dt
        };
    }
    // residual of the step that would leave the final level
    let mut probe = line.clone();
    let (u, residual) = match scheme1d::apply_boundary(&mut probe, &params, &setup.law, steps) {
        Ok(u) => {
            let before = probe.clone();
            scheme1d::advance(&mut probe, &params);
            (u, residual_terms_1d(&before, &probe, &params, u)?)
        }
        Err(_) => (f64::NAN, nan_breakdown(line.lyapunov(dx))),
    };
    rows.push(row(steps, t, &rec, line.lyapunov(dx), l0, l0_cont, c, u, residual));
    Ok(Series1d {
        rows,
        params,
        lyapunov0_cont: l0_cont,
        final_line: line,
    })
}

#[allow(clippy::too_many_arguments)]
fn row(
    n: usize,
    t: f64,
    rec: &BoundRecursion,
    lyapunov: f64,
    l0: f64,
    l0_cont: Option<f64>,
    c: f64,
    control: f64,
    residual: ResidualBreakdown,
) -> Row1d {
    let decay = (-c * t).exp();
    Row1d {
        n,
        t,
        lyapunov,
        bound_geom: rec.geometric(),
        bound_exp: rec.exponential(),
        exact_ref_grid: l0 * decay,
        exact_ref_cont: l0_cont.map_or(f64::NAN, |l| l * decay),
        control,
        residual,
    }
}

fn nan_breakdown(lyapunov: f64) -> ResidualBreakdown {
    let nan = f64::NAN;
    ResidualBreakdown {
        r0: nan,
        re1: nan,
        re2_bound: nan,
        ru: nan,
        r2: nan,
        r1: nan,
        re_exact: nan,
        control_gap: nan,
        total: nan,
        lyapunov_before: lyapunov,
        rate: nan,
    }
}

/// Number of steps and length of the last one.
fn schedule(final_time: f64, dt: f64, exact: bool) -> Result<(usize, f64)> {
    if !(final_time >= 0.0 && final_time.is_finite()) {
        return Err(Error::Validation(format!("final time {final_time} must be >= 0")));
    }
    let steps = step_count(final_time, dt);
    if !exact || steps == 0 {
        return Ok((steps, dt));
    }
    let last = final_time - (steps - 1) as f64 * dt;
    if last <= SHORT_STEP_TOL * dt {
        Ok((steps - 1, dt))
    } else {
        Ok((steps, last.min(dt)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MdControlMode {
    Zero,
    PerDirectionEquality,
    Aggregate {
        controlled: Vec<Face>,
        uncontrolled_value: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpec {
    pub speeds: Vec<f64>,
    pub weights: WeightSpec,
    pub initial: InitialData,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetupMd {
    pub grid: GridMD,
    pub components: Vec<ComponentSpec>,
    /// One entry per direction.
    pub viscosity: Vec<Viscosity>,
    pub c_l: f64,
    pub cfl: f64,
    pub dt: Option<f64>,
    pub final_time: f64,
    pub exact_final_time: bool,
    pub control: MdControlMode,
    /// Record per-sweep residuals and decay bounds.
    pub audit: bool,
    pub quadrature_points: usize,
    pub snapshot_times: Vec<f64>,
}

impl SetupMd {
    /// Shared step: the most restrictive CFL step over all components.
    pub fn time_step(&self) -> Result<f64> {
        if let Some(dt) = self.dt {
            return Ok(dt);
        }
        let mut dt = f64::INFINITY;
        for c in &self.components {
            dt = dt.min(cfl_timestep(&c.speeds, &self.grid, self.cfl)?);
        }
        Ok(dt)
    }

    /// Per-direction parameters of one component, carrying `C_L / d`.
    pub fn params(&self, component: usize, dt: f64) -> Result<Vec<SchemeParams>> {
        let d = self.grid.dim();
        let comp = &self.components[component];
        if comp.speeds.len() != d || self.viscosity.len() != d {
            return Err(Error::Validation(format!(
                "need {d} speeds and {d} viscosities per component"
            )));
        }
        (0..d)
            .map(|k| {
                SchemeParams::with_viscosity(
                    comp.speeds[k],
                    self.grid.axis(k).dx(),
                    dt,
                    self.viscosity[k],
                    self.c_l / d as f64,
                )
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::Validation("at least one component is required".into()));
        }
        let dt = self.time_step()?;
        if !(1.0 - self.c_l * dt > 0.0) {
            return Err(Error::Validation(format!(
                "1 - C_L dt = {} must be positive",
                1.0 - self.c_l * dt
            )));
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.weights.dim() != self.grid.dim() {
                return Err(Error::Validation(format!("component {i}: weight dimension mismatch")));
            }
            self.params(i, dt)?;
            if self.audit {
                multid_bound_preconditions(&c.weights, &c.speeds, self.c_l)
                    .map_err(|e| match e {
                        Error::PreconditionsUnmet(m) => {
                            Error::PreconditionsUnmet(format!("component {i}: {m}"))
                        }
                        other => other,
                    })?;
            }
        }
        if let MdControlMode::Aggregate { controlled, .. } = &self.control {
            if self.grid.dim() != 2 {
                return Err(Error::Validation("aggregate control is defined for two dimensions".into()));
            }
            if controlled.iter().any(|f| f.axis >= 2) {
                return Err(Error::Validation("controlled face axis out of range".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComponentRow {
    pub lyapunov: f64,
    pub max_abs: f64,
    /// Per-sweep residuals of the step leaving this level (audit mode).
    pub sweeps: Vec<ResidualBreakdown>,
    pub bound_geom: Option<f64>,
    pub bound_exp: Option<f64>,
}

impl ComponentRow {
    /// Sum of the sweep residual totals.
    pub fn residual_total(&self) -> Option<f64> {
        (!self.sweeps.is_empty()).then(|| self.sweeps.iter().map(|s| s.total).sum())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowMd {
    pub n: usize,
    pub t: f64,
    /// Quadrature Lyapunov value summed over components.
    pub l_hat: f64,
    pub l_hat_ref: f64,
    /// Aggregate control applied from `t_n`, if that mode is active.
    pub control: Option<f64>,
    pub components: Vec<ComponentRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub t: f64,
    /// Interior values per component, first axis fastest.
    pub fields: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct SeriesMd {
    pub rows: Vec<RowMd>,
    pub dt: f64,
    pub snapshots: Vec<Snapshot>,
    pub final_fields: Vec<FieldMD>,
    pub lyapunov0_cont: Option<f64>,
}

pub fn run_md(setup: &SetupMd) -> Result<SeriesMd> {
    setup.validate()?;
    let d = setup.grid.dim();
    let dt = setup.time_step()?;
    let (steps, last_dt) = schedule(setup.final_time, dt, setup.exact_final_time)?;
    let volume = setup.grid.cell_volume();

    let mut fields = Vec::new();
    let mut tables = Vec::new();
    let mut quads = Vec::new();
    let mut params = Vec::new();
    let mut last_params = Vec::new();
    let mut l0_cont = Some(0.0);
    let bounds: Vec<(f64, f64)> = setup.grid.axes().iter().map(|g| (g.lower(), g.upper())).collect();
    for (i, c) in setup.components.iter().enumerate() {
        fields.push(FieldMD::from_interior(&setup.grid, &c.initial.project(&setup.grid)?)?);
        tables.push(WeightTable::new(&setup.grid, &c.weights)?);
        quads.push(CellQuadrature::new(&setup.grid, &c.weights, setup.quadrature_points)?);
        params.push(setup.params(i, dt)?);
        last_params.push(setup.params(i, last_dt)?);
        l0_cont = match (l0_cont, c.initial.continuous_lyapunov(&bounds, &c.weights)) {
            (Some(acc), Ok(v)) => Some(acc + v),
            _ => None,
        };
    }
    let l_hat0: f64 = quads.iter().zip(&fields).map(|(q, f)| q.lyapunov(f)).sum();
    let mut recs = Vec::new();
    if setup.audit {
        for (f, tab) in fields.iter().zip(&tables) {
            recs.push(BoundRecursion::new(discrete_lyapunov(f, tab), setup.c_l, dt, d)?);
        }
    }

    let mut snapshot_queue: Vec<f64> = setup.snapshot_times.clone();
    snapshot_queue.sort_by(f64::total_cmp);
    let mut snapshot_queue = snapshot_queue.into_iter().peekable();
    let mut snapshots = Vec::new();

    let mut rows = Vec::with_capacity(steps + 1);
    let mut t = 0.0;
    for n in 0..=steps {
        while let Some(&ts) = snapshot_queue.peek() {
            if t + 1e-12 * dt.max(1.0) >= ts {
                snapshots.push(Snapshot {
                    n,
                    t,
                    fields: fields.iter().map(|f| f.interior_values()).collect(),
                });
                snapshot_queue.next();
            } else {
                break;
            }
        }
        let control = match &setup.control {
            MdControlMode::Zero => MDControl::Zero,
            MdControlMode::PerDirectionEquality => MDControl::PerDirectionEquality,
            MdControlMode::Aggregate {
                controlled,
                uncontrolled_value,
            } => {
                let inputs: Vec<AggregateInput> = setup
                    .components
                    .iter()
                    .zip(&fields)
                    .map(|(c, f)| AggregateInput {
                        field: f,
                        weights: &c.weights,
                        speeds: &c.speeds,
                    })
                    .collect();
                MDControl::AggregateIntegral2D {
                    u: aggregate_control_2d(&inputs, controlled)?.u,
                    controlled: controlled.clone(),
                    uncontrolled_value: *uncontrolled_value,
                }
            }
        };
        let l_hat: f64 = quads.iter().zip(&fields).map(|(q, f)| q.lyapunov(f)).sum();
        if !l_hat.is_finite() {
            return Err(Error::Numerical(format!("non-finite Lyapunov value at step {n}")));
        }
        let mut comps: Vec<ComponentRow> = fields
            .iter()
            .zip(&tables)
            .enumerate()
            .map(|(i, (f, tab))| ComponentRow {
                lyapunov: discrete_lyapunov(f, tab),
                max_abs: f.max_abs(),
                sweeps: Vec::new(),
                bound_geom: recs.get(i).map(|r| r.geometric()),
                bound_exp: recs.get(i).map(|r| r.exponential()),
            })
            .collect();
        let u = match &control {
            MDControl::AggregateIntegral2D { u, .. } => Some(*u),
            _ => None,
        };
        if n < steps {
            for (i, field) in fields.iter_mut().enumerate() {
                let ps = if n + 1 == steps { &last_params[i] } else { &params[i] };
                if setup.audit {
                    for (k, p) in ps.iter().enumerate() {
                        let mut acc = ResidualBreakdown::default();
                        let mut failure = None;
                        let factor = volume / p.dx();
                        sweep_direction_inspect(field, k, p, &tables[i], &control, |upd| {
                            match residual_terms_1d(&upd.before, &upd.after, p, upd.control) {
                                Ok(r) => acc.accumulate(&r, factor),
                                Err(e) => failure = Some(e),
                            }
                        })?;
                        if let Some(e) = failure {
                            return Err(e);
                        }
                        recs[i].push_sweep(acc.total, p.dt());
                        comps[i].sweeps.push(acc);
                    }
                } else {
                    step_md(field, ps, &tables[i], &control)?;
                }
            }
        }
        rows.push(RowMd {
            n,
            t,
            l_hat,
            l_hat_ref: l_hat0 * (-setup.c_l * t).exp(),
            control: u,
            components: comps,
        });
        if n < steps {
            t = if n + 1 == steps && setup.exact_final_time {
                setup.final_time
            } else {
                (n + 1) as f64 * dt
            };
        }
    }
    Ok(SeriesMd {
        rows,
        dt,
        snapshots,
        final_fields: fields,
        lyapunov0_cont: l0_cont,
    })
}

/// Row indices to emit: every `stride`-th level plus the last, or by default
/// ten equidistant interior levels plus both endpoints.
pub fn emitted_indices(levels: usize, stride: Option<usize>) -> Vec<usize> {
    if levels == 0 {
        return Vec::new();
    }
    let last = levels - 1;
    let mut out: Vec<usize> = match stride {
        Some(s) if s > 0 => (0..=last).step_by(s).collect(),
        _ => (0..=11).map(|i| ((i * last) as f64 / 11.0).round() as usize).collect(),
    };
    out.push(last);
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme1d::ViscosityPreset;
    use crate::splitmd::Side;

    fn section_one(m: usize, visc: ViscosityPreset, law: ControlLaw) -> Setup1d {
        Setup1d {
            grid: Grid1D::new(0.0, 1.0, m).unwrap(),
            speed: 2.0,
            viscosity: visc.into(),
            c_l: 3.0,
            weights: WeightSpec::per_direction(3.0, &[2.0]).unwrap(),
            law,
            initial: InitialData::Sin1d,
            final_time: 3.0,
            cfl: 0.5,
            dt: None,
            exact_final_time: false,
        }
    }

    #[test]
    fn one_step_matches_direct_recurrence() {
        let mut setup = section_one(10, ViscosityPreset::LaxFriedrichs, ControlLaw::EqualityReflect);
        setup.final_time = 0.025;
        let s = run_1d(&setup).unwrap();
        assert_eq!(s.rows.len(), 2);
        // oracle: straight transcription of the three boundary equations
        let m = 10;
        let dx = 0.1;
        let x: Vec<f64> = (0..m + 2).map(|j| (j as f64 - 0.5) * dx).collect();
        let e: Vec<f64> = x.iter().map(|x| (-1.5 * x).exp()).collect();
        let mut w = vec![0.0; m + 2];
        for j in 1..=m {
            let (l, r) = ((j - 1) as f64 * dx, j as f64 * dx);
            w[j] = ((2.0 * std::f64::consts::PI * l).cos() - (2.0 * std::f64::consts::PI * r).cos())
                / (2.0 * std::f64::consts::PI * dx);
        }
        w[m + 1] = w[m];
        let u = (w[m + 1] * w[m + 1] * (e[m] + e[m + 1]) / (e[0] + e[1])).sqrt();
        w[0] = u;
        let (c, q) = (0.5, 1.0);
        let mut next = w.clone();
        for j in 1..=m {
            next[j] = w[j] - c / 2.0 * (w[j + 1] - w[j - 1]) + q / 2.0 * (w[j - 1] - 2.0 * w[j] + w[j + 1]);
        }
        next[m + 1] = next[m];
        assert_eq!(s.rows[0].control, u);
        for j in 1..=m + 1 {
            assert!((s.final_line.values()[j] - next[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_data_zero_everything() {
        let mut setup = section_one(20, ViscosityPreset::LaxWendroff, ControlLaw::Zero);
        setup.initial = InitialData::Constant { value: 0.0 };
        setup.final_time = 0.2;
        let s = run_1d(&setup).unwrap();
        for r in &s.rows {
            assert_eq!(r.lyapunov, 0.0);
            assert_eq!(r.bound_geom, 0.0);
            assert_eq!(r.residual.total, 0.0);
            assert_eq!(r.control, 0.0);
        }
    }

    #[test]
    fn exact_final_time_shortens_last_step() {
        let mut setup = section_one(10, ViscosityPreset::LaxFriedrichs, ControlLaw::EqualityReflect);
        setup.final_time = 0.06;
        setup.exact_final_time = true;
        let s = run_1d(&setup).unwrap();
        assert_eq!(s.rows.len(), 4);
        assert_eq!(s.last().t, 0.06);
        setup.exact_final_time = false;
        let s = run_1d(&setup).unwrap();
        assert!((s.last().t - 0.075).abs() < 1e-15);
    }

    #[test]
    fn emission_defaults() {
        let idx = emitted_indices(1201, None);
        assert_eq!(idx.len(), 12);
        assert_eq!(idx[0], 0);
        assert_eq!(*idx.last().unwrap(), 1200);
        assert_eq!(emitted_indices(11, Some(4)), vec![0, 4, 8, 10]);
        assert_eq!(emitted_indices(9, Some(4)), vec![0, 4, 8]);
        assert_eq!(emitted_indices(3, None), vec![0, 1, 2]);
    }

    fn section_two(m: usize, control: MdControlMode) -> SetupMd {
        SetupMd {
            grid: GridMD::new(&[(0.0, 1.0), (0.0, 1.0)], &[m, m]).unwrap(),
            components: vec![
                ComponentSpec {
                    speeds: vec![4.0, 2.0],
                    weights: WeightSpec::general(&[-1.25, 1.0], 0.0).unwrap(),
                    initial: InitialData::SinSin2d,
                },
                ComponentSpec {
                    speeds: vec![2.0, -2.0],
                    weights: WeightSpec::general(&[-0.5, 1.0], 0.0).unwrap(),
                    initial: InitialData::SinSin2d,
                },
            ],
            viscosity: vec![ViscosityPreset::LaxFriedrichs.into(); 2],
            c_l: 3.0,
            cfl: 0.7,
            dt: None,
            final_time: 0.1,
            exact_final_time: false,
            control,
            audit: false,
            quadrature_points: 2,
            snapshot_times: vec![0.0, 0.05],
        }
    }

    #[test]
    fn aggregate_run_smoke() {
        let setup = section_two(
            12,
            MdControlMode::Aggregate {
                controlled: vec![Face::new(0, Side::Lower)],
                uncontrolled_value: 0.0,
            },
        );
        let s = run_md(&setup).unwrap();
        assert!((s.dt - 0.7 / 12.0 / 4.0).abs() < 1e-15);
        assert_eq!(s.snapshots.len(), 2);
        assert_eq!(s.snapshots[0].fields[0], s.snapshots[0].fields[1]);
        assert!(s.rows.iter().all(|r| r.control.unwrap() >= 0.0));
        assert!(s.rows.last().unwrap().l_hat < s.rows[0].l_hat);
    }

    #[test]
    fn audit_refuses_general_weights() {
        let mut setup = section_two(6, MdControlMode::PerDirectionEquality);
        setup.audit = true;
        assert!(matches!(run_md(&setup), Err(Error::PreconditionsUnmet(_))));
    }
}
