//! Dimensional splitting: one full-`dt` sweep of the 1D kernel per direction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridMD;
use crate::scheme1d::{self, ControlLaw, Line, SchemeParams};
use crate::weights::{WeightSpec, WeightTable};

/// Time-step index and number of completed sweeps within that step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stage {
    pub step: usize,
    pub sweep: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldMD {
    grid: GridMD,
    values: Vec<f64>,
    stage: Stage,
}

impl FieldMD {
    pub fn zeros(grid: &GridMD) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.extended_len()],
            stage: Stage::default(),
        }
    }

    /// Field with the given interior values (first axis fastest) and zero ghosts.
    pub fn from_interior(grid: &GridMD, interior: &[f64]) -> Result<Self> {
        if interior.len() != grid.interior_len() {
            return Err(Error::InputData(format!(
                "{} values for {} interior cells",
                interior.len(),
                grid.interior_len()
            )));
        }
        let mut field = Self::zeros(grid);
        for (flat, v) in grid.interior_flat().into_iter().zip(interior) {
            field.values[flat] = *v;
        }
        Ok(field)
    }

    pub fn grid(&self) -> &GridMD {
        &self.grid
    }

    /// All values on the extended index set, first axis fastest.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.values[self.grid.flat(index)]
    }

    pub fn interior_values(&self) -> Vec<f64> {
        self.grid
            .interior_flat()
            .into_iter()
            .map(|f| self.values[f])
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.grid
            .interior_flat()
            .into_iter()
            .map(|f| self.values[f].abs())
            .fold(0.0, f64::max)
    }

    fn gather(&self, start: usize, stride: usize, len: usize, weights: &WeightTable) -> Result<Line> {
        let values = (0..len).map(|j| self.values[start + j * stride]).collect();
        let w = (0..len).map(|j| weights.at(start + j * stride)).collect();
        Line::new(values, w).map_err(|e| match e {
            Error::InputData(msg) => Error::Numerical(msg),
            other => other,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Lower,
    Upper,
}

/// Boundary face `x_axis = lower` or `x_axis = upper` of the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub axis: usize,
    pub side: Side,
}

impl Face {
    pub fn new(axis: usize, side: Side) -> Self {
        Self { axis, side }
    }

    /// Component of the outer unit normal along `axis`.
    pub fn normal_sign(&self) -> f64 {
        match self.side {
            Side::Lower => -1.0,
            Side::Upper => 1.0,
        }
    }

    /// Inflow face of direction `axis` for speed `a`.
    pub fn inflow(axis: usize, a: f64) -> Self {
        Self::new(axis, if a > 0.0 { Side::Lower } else { Side::Upper })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MDControl {
    Zero,
    /// Equality in the admissibility condition on every boundary line of every sweep.
    PerDirectionEquality,
    /// One scalar value `u` on the controlled faces, `uncontrolled_value` on the
    /// remaining inflow faces.
    AggregateIntegral2D {
        u: f64,
        controlled: Vec<Face>,
        uncontrolled_value: f64,
    },
}

impl MDControl {
    fn line_law(&self, axis: usize, a: f64) -> ControlLaw {
        match self {
            MDControl::Zero => ControlLaw::Zero,
            MDControl::PerDirectionEquality => ControlLaw::EqualityReflect,
            MDControl::AggregateIntegral2D {
                u,
                controlled,
                uncontrolled_value,
            } => {
                let face = Face::inflow(axis, a);
                let v = if controlled.contains(&face) {
                    *u
                } else {
                    *uncontrolled_value
                };
                ControlLaw::Prescribed(vec![v])
            }
        }
    }
}

/// One line of a sweep: state with ghosts at the start of the sweep, state
/// after the update, and the inflow value used.
#[derive(Debug, Clone)]
pub struct LineUpdate {
    pub start: usize,
    pub before: Line,
    pub after: Line,
    pub control: f64,
}

/// Advance all lines along `axis` by one step of the 1D kernel.
pub fn sweep_direction(
    field: &mut FieldMD,
    axis: usize,
    params: &SchemeParams,
    weights: &WeightTable,
    ctl: &MDControl,
) -> Result<()> {
    sweep_direction_inspect(field, axis, params, weights, ctl, |_| {})
}

/// As [`sweep_direction`], calling `visit` on every line in a fixed order.
pub fn sweep_direction_inspect<F: FnMut(&LineUpdate)>(
    field: &mut FieldMD,
    axis: usize,
    params: &SchemeParams,
    weights: &WeightTable,
    ctl: &MDControl,
    mut visit: F,
) -> Result<()> {
    let d = field.grid.dim();
    if axis >= d {
        return Err(Error::Validation(format!(
            "direction {axis} out of range for dimension {d}"
        )));
    }
    if field.stage.sweep != axis {
        return Err(Error::Validation(format!(
            "field is at sweep {} but direction {axis} was requested",
            field.stage.sweep
        )));
    }
    if weights.values().len() != field.values.len() {
        return Err(Error::Validation("weight table does not match the field grid".into()));
    }
    let stride = field.grid.stride(axis);
    let len = field.grid.axis(axis).cells() + 2;
    let law = ctl.line_law(axis, params.a());
    let starts = field.grid.line_starts(axis);
    let updates: Vec<LineUpdate> = {
        let src = &*field;
        starts
            .par_iter()
            .map(|&start| {
                let mut line = src.gather(start, stride, len, weights)?;
                let control = scheme1d::apply_boundary(&mut line, params, &law, 0)?;
                let before = line.clone();
                scheme1d::advance(&mut line, params);
                Ok(LineUpdate {
                    start,
                    before,
                    after: line,
                    control,
                })
            })
            .collect::<Result<_>>()?
    };
    for upd in &updates {
        for (j, v) in upd.after.values().iter().enumerate() {
            field.values[upd.start + j * stride] = *v;
        }
        visit(upd);
    }
    field.stage.sweep += 1;
    if field.stage.sweep == d {
        field.stage = Stage {
            step: field.stage.step + 1,
            sweep: 0,
        };
    }
    Ok(())
}

/// Full time step: sweeps in ascending direction order.
pub fn step_md(
    field: &mut FieldMD,
    params: &[SchemeParams],
    weights: &WeightTable,
    ctl: &MDControl,
) -> Result<()> {
    if params.len() != field.grid.dim() {
        return Err(Error::Validation(format!(
            "{} parameter sets for dimension {}",
            params.len(),
            field.grid.dim()
        )));
    }
    if field.stage.sweep != 0 {
        return Err(Error::Validation("step must start from a completed time level".into()));
    }
    for (k, p) in params.iter().enumerate() {
        sweep_direction(field, k, p, weights, ctl)?;
    }
    Ok(())
}

/// One component entering the aggregate boundary integral.
#[derive(Debug, Clone, Copy)]
pub struct AggregateInput<'a> {
    pub field: &'a FieldMD,
    pub weights: &'a WeightSpec,
    pub speeds: &'a [f64],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateValue {
    pub u: f64,
    /// Outflow integral `sum_i int_{outflow} w_i^2 (a_i . n) exp(mu_i)`.
    pub integral: f64,
    /// `sum_i sum_{controlled inflow faces} (-a_i . n) int exp(mu_i)`.
    pub normalization: f64,
}

/// Outflow boundary integral by the face-midpoint rule with the adjacent
/// interior cell as trace.
pub fn outflow_integral(input: &AggregateInput) -> Result<f64> {
    let grid = input.field.grid();
    if input.speeds.len() != grid.dim() || input.weights.dim() != grid.dim() {
        return Err(Error::Validation("speeds, weights and grid dimensions differ".into()));
    }
    let mut total = 0.0;
    for axis in 0..grid.dim() {
        let a = input.speeds[axis];
        for side in [Side::Lower, Side::Upper] {
            let face = Face::new(axis, side);
            let flux = a * face.normal_sign();
            if flux <= 0.0 {
                continue;
            }
            let (cells, at) = match side {
                Side::Lower => (grid.ghost_left(axis), grid.axis(axis).lower()),
                Side::Upper => (grid.ghost_right(axis), grid.axis(axis).upper()),
            };
            let area: f64 = (0..grid.dim())
                .filter(|&k| k != axis)
                .map(|k| grid.axis(k).dx())
                .product();
            let mut sum = 0.0;
            for mut idx in cells {
                idx[axis] = match side {
                    Side::Lower => 1,
                    Side::Upper => grid.axis(axis).cells(),
                };
                let w = input.field.get(&idx);
                let mut x = grid.center(&idx);
                x[axis] = at;
                sum += w * w * input.weights.mu_unchecked(&x).exp();
            }
            total += flux * sum * area;
        }
    }
    Ok(total)
}

/// Scalar control `u = sqrt(I / N)` shared by all components on the controlled faces.
pub fn aggregate_control_2d(inputs: &[AggregateInput], controlled: &[Face]) -> Result<AggregateValue> {
    let mut integral = 0.0;
    let mut normalization = 0.0;
    for input in inputs {
        integral += outflow_integral(input)?;
        let bounds: Vec<(f64, f64)> = input
            .field
            .grid()
            .axes()
            .iter()
            .map(|g| (g.lower(), g.upper()))
            .collect();
        for face in controlled {
            let flux = input.speeds[face.axis] * face.normal_sign();
            if flux < 0.0 {
                let at = match face.side {
                    Side::Lower => bounds[face.axis].0,
                    Side::Upper => bounds[face.axis].1,
                };
                normalization += -flux * input.weights.face_integral(&bounds, face.axis, at)?;
            }
        }
    }
    if normalization <= 0.0 {
        return Err(Error::Validation(
            "no controlled face is an inflow face of any component".into(),
        ));
    }
    if integral < 0.0 || !integral.is_finite() {
        return Err(Error::Numerical(format!("outflow integral {integral} is not a nonnegative number")));
    }
    Ok(AggregateValue {
        u: (integral / normalization).sqrt(),
        integral,
        normalization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::initial::InitialData;
    use std::f64::consts::E;

    fn square(m: usize) -> GridMD {
        GridMD::new(&[(0.0, 1.0), (0.0, 1.0)], &[m, m]).unwrap()
    }

    #[test]
    fn one_dimension_matches_step_line() {
        let grid = GridMD::new(&[(0.0, 1.0)], &[10]).unwrap();
        let spec = WeightSpec::per_direction(3.0, &[2.0]).unwrap();
        let table = WeightTable::new(&grid, &spec).unwrap();
        let init = InitialData::Sin1d.project(&grid).unwrap();
        let mut field = FieldMD::from_interior(&grid, &init).unwrap();
        let p = SchemeParams::new(2.0, 0.1, 0.025, 1.0, 3.0).unwrap();
        let mut line =
            Line::from_grid(&Grid1D::new(0.0, 1.0, 10).unwrap(), &init, &spec).unwrap();
        for n in 0..5 {
            step_md(&mut field, &[p], &table, &MDControl::PerDirectionEquality).unwrap();
            scheme1d::step_line(&mut line, &p, &ControlLaw::EqualityReflect, n).unwrap();
        }
        assert_eq!(field.values(), line.values());
        assert_eq!(field.stage(), Stage { step: 5, sweep: 0 });
    }

    #[test]
    fn zero_field_stays_zero() {
        let grid = square(6);
        let spec = WeightSpec::per_direction(2.0, &[1.0, -2.0]).unwrap();
        let table = WeightTable::new(&grid, &spec).unwrap();
        let p1 = SchemeParams::new(1.0, 1.0 / 6.0, 1.0 / 24.0, 1.0, 2.0).unwrap();
        let p2 = SchemeParams::new(-2.0, 1.0 / 6.0, 1.0 / 24.0, 1.0, 2.0).unwrap();
        for ctl in [MDControl::Zero, MDControl::PerDirectionEquality] {
            let mut f = FieldMD::zeros(&grid);
            step_md(&mut f, &[p1, p2], &table, &ctl).unwrap();
            assert!(f.values().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn separable_first_sweep() {
        let m = 8;
        let grid = square(m);
        let dx = 1.0 / m as f64;
        let table = WeightTable::new(&grid, &WeightSpec::unit(2)).unwrap();
        let f: Vec<f64> = (0..m).map(|j| (j as f64 * 0.7).sin() + 0.3).collect();
        let g: Vec<f64> = (0..m).map(|j| (j as f64 * 1.3).cos()).collect();
        let mut interior = Vec::new();
        for j2 in 0..m {
            for j1 in 0..m {
                interior.push(f[j1] * g[j2]);
            }
        }
        let mut field = FieldMD::from_interior(&grid, &interior).unwrap();
        let p = SchemeParams::new(1.0, dx, 0.5 * dx, 0.5, 0.0).unwrap();
        sweep_direction(&mut field, 0, &p, &table, &MDControl::Zero).unwrap();
        // oracle: direct recurrence on f with zero inflow and copy-out
        let mut ext = vec![0.0; m + 2];
        ext[1..=m].copy_from_slice(&f);
        ext[m + 1] = f[m - 1];
        let stepped: Vec<f64> = (1..=m)
            .map(|j| ext[j] - 0.25 * (ext[j + 1] - ext[j - 1]) + 0.25 * (ext[j - 1] - 2.0 * ext[j] + ext[j + 1]))
            .collect();
        for j2 in 1..=m {
            for j1 in 1..=m {
                let want = stepped[j1 - 1] * g[j2 - 1];
                assert!((field.get(&[j1, j2]) - want).abs() < 1e-14);
            }
        }
        assert_eq!(field.stage(), Stage { step: 0, sweep: 1 });
    }

    #[test]
    fn constants_with_unit_weights_and_equality() {
        let grid = square(5);
        let table = WeightTable::new(&grid, &WeightSpec::unit(2)).unwrap();
        let mut field = FieldMD::from_interior(&grid, &[1.5; 25]).unwrap();
        let p1 = SchemeParams::new(1.0, 0.2, 0.05, 0.5, 0.0).unwrap();
        let p2 = SchemeParams::new(2.0, 0.2, 0.05, 1.0, 0.0).unwrap();
        for _ in 0..3 {
            step_md(&mut field, &[p1, p2], &table, &MDControl::PerDirectionEquality).unwrap();
        }
        assert!(field.interior_values().iter().all(|v| (v - 1.5).abs() < 1e-14));
    }

    #[test]
    fn sweep_order_is_checked() {
        let grid = square(3);
        let table = WeightTable::new(&grid, &WeightSpec::unit(2)).unwrap();
        let mut field = FieldMD::zeros(&grid);
        let p = SchemeParams::new(1.0, 1.0 / 3.0, 0.1, 1.0, 0.0).unwrap();
        assert!(sweep_direction(&mut field, 1, &p, &table, &MDControl::Zero).is_err());
        assert!(sweep_direction(&mut field, 2, &p, &table, &MDControl::Zero).is_err());
        assert!(step_md(&mut field, &[p], &table, &MDControl::Zero).is_err());
    }

    #[test]
    fn reversed_order_differs() {
        // linear line-local closures commute; the equality control does not

        let m = 12;
        let grid = square(m);
        let spec = WeightSpec::per_direction(3.0, &[4.0, 2.0]).unwrap();
        let table = WeightTable::new(&grid, &spec).unwrap();
        let init = InitialData::SinSin2d.project(&grid).unwrap();
        let dx = 1.0 / m as f64;
        let dt = 0.7 * dx / 4.0;
        let p1 = SchemeParams::new(4.0, dx, dt, 1.0, 3.0).unwrap();
        let p2 = SchemeParams::new(2.0, dx, dt, 1.0, 3.0).unwrap();
        let mut forward = FieldMD::from_interior(&grid, &init).unwrap();
        step_md(&mut forward, &[p1, p2], &table, &MDControl::PerDirectionEquality).unwrap();

        // reversed composition on the transposed problem
        let mut transposed = vec![0.0; m * m];
        for j2 in 0..m {
            for j1 in 0..m {
                transposed[j2 + m * j1] = init[j1 + m * j2];
            }
        }
        let tspec = WeightSpec::per_direction(3.0, &[2.0, 4.0]).unwrap();
        let ttable = WeightTable::new(&grid, &tspec).unwrap();
        let mut reversed = FieldMD::from_interior(&grid, &transposed).unwrap();
        step_md(&mut reversed, &[p2, p1], &ttable, &MDControl::PerDirectionEquality).unwrap();
        let mut max_diff: f64 = 0.0;
        for j2 in 1..=m {
            for j1 in 1..=m {
                max_diff = max_diff.max((forward.get(&[j1, j2]) - reversed.get(&[j2, j1])).abs());
            }
        }
        assert!(max_diff > 1e-12);
    }

    #[test]
    fn section_two_step_matches_recurrence() {
        let m = 12;
        let grid = square(m);
        let spec = WeightSpec::general(&[-1.25, 1.0], 0.0).unwrap();
        let table = WeightTable::new(&grid, &spec).unwrap();
        let init = InitialData::SinSin2d.project(&grid).unwrap();
        let dx = 1.0 / m as f64;
        let dt = 0.7 * dx / 4.0;
        let (c1, c2) = (4.0 * dt / dx, 2.0 * dt / dx);
        let p1 = SchemeParams::new(4.0, dx, dt, 1.0, 3.0).unwrap();
        let p2 = SchemeParams::new(2.0, dx, dt, 1.0, 3.0).unwrap();
        let mut field = FieldMD::from_interior(&grid, &init).unwrap();
        step_md(&mut field, &[p1, p2], &table, &MDControl::Zero).unwrap();

        // oracle on a dense (m+2)^2 array
        let n = m + 2;
        let mut w = vec![vec![0.0; n]; n];
        for j2 in 1..=m {
            for j1 in 1..=m {
                w[j1][j2] = init[(j1 - 1) + m * (j2 - 1)];
            }
        }
        for j2 in 1..=m {
            w[0][j2] = 0.0;
            w[m + 1][j2] = w[m][j2];
        }
        let mut s = w.clone();
        for j2 in 1..=m {
            for j1 in 1..=m {
                s[j1][j2] = w[j1][j2] - 0.5 * c1 * (w[j1 + 1][j2] - w[j1 - 1][j2])
                    + 0.5 * (w[j1 - 1][j2] - 2.0 * w[j1][j2] + w[j1 + 1][j2]);
            }
            s[m + 1][j2] = s[m][j2];
        }
        for j1 in 1..=m {
            s[j1][0] = 0.0;
            s[j1][m + 1] = s[j1][m];
        }
        let mut r = s.clone();
        for j1 in 1..=m {
            for j2 in 1..=m {
                r[j1][j2] = s[j1][j2] - 0.5 * c2 * (s[j1][j2 + 1] - s[j1][j2 - 1])
                    + 0.5 * (s[j1][j2 - 1] - 2.0 * s[j1][j2] + s[j1][j2 + 1]);
            }
        }
        for j2 in 1..=m {
            for j1 in 1..=m {
                assert!((field.get(&[j1, j2]) - r[j1][j2]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn equality_holds_on_every_line() {
        let m = 10;
        let grid = square(m);
        let spec = WeightSpec::per_direction(2.0, &[1.0, -2.0]).unwrap();
        let table = WeightTable::new(&grid, &spec).unwrap();
        let init = InitialData::SinSin2d.project(&grid).unwrap();
        let mut field = FieldMD::from_interior(&grid, &init).unwrap();
        let dx = 0.1;
        let dt = 0.5 * dx / 2.0;
        let ps = [
            SchemeParams::new(1.0, dx, dt, 1.0, 1.0).unwrap(),
            SchemeParams::new(-2.0, dx, dt, 1.0, 1.0).unwrap(),
        ];
        for _ in 0..4 {
            for (k, p) in ps.iter().enumerate() {
                sweep_direction_inspect(&mut field, k, p, &table, &MDControl::PerDirectionEquality, |u| {
                    let gap = scheme1d::admissibility_gap(&u.before, p.a());
                    assert!(gap.abs() < 1e-14, "{gap}");
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn aggregate_normalization() {
        let grid = square(4);
        let s1 = WeightSpec::general(&[-1.25, 1.0], 0.0).unwrap();
        let s2 = WeightSpec::general(&[-0.5, 1.0], 0.0).unwrap();
        let f = FieldMD::zeros(&grid);
        let left = [Face::new(0, Side::Lower)];
        let a1 = [4.0, 2.0];
        let a2 = [2.0, -2.0];
        let v = aggregate_control_2d(
            &[
                AggregateInput { field: &f, weights: &s1, speeds: &a1 },
                AggregateInput { field: &f, weights: &s2, speeds: &a2 },
            ],
            &left,
        )
        .unwrap();
        assert_eq!(v.u, 0.0);
        assert!((v.normalization - 6.0 * (E - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn aggregate_integral_unit_first_component() {
        let m = 200;
        let grid = square(m);
        let s1 = WeightSpec::general(&[-1.25, 1.0], 0.0).unwrap();
        let s2 = WeightSpec::general(&[-0.5, 1.0], 0.0).unwrap();
        let ones = FieldMD::from_interior(&grid, &vec![1.0; m * m]).unwrap();
        let zeros = FieldMD::zeros(&grid);
        let a1 = [4.0, 2.0];
        let a2 = [2.0, -2.0];
        let v = aggregate_control_2d(
            &[
                AggregateInput { field: &ones, weights: &s1, speeds: &a1 },
                AggregateInput { field: &zeros, weights: &s2, speeds: &a2 },
            ],
            &[Face::new(0, Side::Lower)],
        )
        .unwrap();
        // oracle: 1D Gauss-Legendre quadrature of the two face integrals
        let rule = crate::quadrature::GaussLegendre::new(20).unwrap();
        let right = rule.integrate(|y| (y - 1.25f64).exp(), 0.0, 1.0, 4);
        let top = rule.integrate(|x| (1.0 - 1.25 * x).exp(), 0.0, 1.0, 4);
        let exact = 4.0 * right + 2.0 * top;
        let h = 1.0 / m as f64;
        assert!((v.integral - exact).abs() < 10.0 * h * h, "{} vs {exact}", v.integral);
    }

    #[test]
    fn aggregate_rejects_non_inflow_faces() {
        let grid = square(3);
        let s = WeightSpec::unit(2);
        let f = FieldMD::zeros(&grid);
        let a = [1.0, 1.0];
        let r = aggregate_control_2d(
            &[AggregateInput { field: &f, weights: &s, speeds: &a }],
            &[Face::new(0, Side::Upper)],
        );
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn aggregate_uses_uncontrolled_value_elsewhere() {
        let grid = square(4);
        let table = WeightTable::new(&grid, &WeightSpec::unit(2)).unwrap();
        let mut field = FieldMD::zeros(&grid);
        let dx = 0.25;
        let p = SchemeParams::new(1.0, dx, dx, 1.0, 0.0).unwrap();
        let ctl = MDControl::AggregateIntegral2D {
            u: 2.0,
            controlled: vec![Face::new(0, Side::Lower)],
            uncontrolled_value: 0.5,
        };
        step_md(&mut field, &[p, p], &table, &ctl).unwrap();
        // sweep 1 injects 2 into column 1; sweep 2 shifts up and injects 0.5 at row 1
        assert_eq!(field.get(&[1, 1]), 0.5);
        assert_eq!(field.get(&[1, 2]), 2.0);
        assert_eq!(field.get(&[2, 2]), 0.0);
    }
}
