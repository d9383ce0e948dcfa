//! CSV writers. Floats use the shortest representation that round-trips.

use std::io::Write;

use crate::analysis::RefinementStudy;
use crate::error::{Error, Result};
use crate::lyapunov::ResidualBreakdown;
use crate::scheme1d::{Viscosity, ViscosityPreset};
use crate::sim::{emitted_indices, Series1d, SeriesMd, Snapshot};

pub const SERIES_1D_COLUMNS: [&str; 16] = [
    "n",
    "t",
    "L",
    "bound_geom",
    "bound_exp",
    "exact_ref_grid",
    "exact_ref_cont",
    "u",
    "R0",
    "RE1",
    "RE2_bound",
    "Ru",
    "R2",
    "R1",
    "RE_exact",
    "R_total",
];

/// Per-component column stems of the multi-D series, suffixed `_c{i}`.
pub const SERIES_MD_COMPONENT_COLUMNS: [&str; 12] = [
    "L",
    "max_abs",
    "bound_geom",
    "bound_exp",
    "R0",
    "RE1",
    "RE2_bound",
    "Ru",
    "R2",
    "R1",
    "RE_exact",
    "R_total",
];

pub const STUDY_COLUMNS: [&str; 7] = ["q", "resolution", "L_final", "error", "eoc", "error_grid", "eoc_grid"];

pub fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Numerical(format!("csv: {other:?}")),
    }
}

fn residual_fields(r: &ResidualBreakdown) -> [f64; 8] {
    [r.r0, r.re1, r.re2_bound, r.ru, r.r2, r.r1, r.re_exact, r.total]
}

pub fn write_series_1d<W: Write>(out: W, series: &Series1d, stride: Option<usize>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_1D_COLUMNS).map_err(csv_err)?;
    for i in emitted_indices(series.rows.len(), stride) {
        let r = &series.rows[i];
        let mut rec = vec![
            r.n.to_string(),
            fmt(r.t),
            fmt(r.lyapunov),
            fmt(r.bound_geom),
            fmt(r.bound_exp),
            fmt(r.exact_ref_grid),
            fmt(r.exact_ref_cont),
            fmt(r.control),
        ];
        rec.extend(residual_fields(&r.residual).iter().map(|v| fmt(*v)));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn series_md_header(components: usize) -> Vec<String> {
    let mut h: Vec<String> = ["n", "t", "L_hat", "L_hat_ref", "u"].iter().map(|s| s.to_string()).collect();
    for i in 0..components {
        h.extend(SERIES_MD_COMPONENT_COLUMNS.iter().map(|c| format!("{c}_c{i}")));
    }
    h
}

pub fn write_series_md<W: Write>(out: W, series: &SeriesMd, stride: Option<usize>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let comps = series.rows.first().map_or(0, |r| r.components.len());
    w.write_record(series_md_header(comps)).map_err(csv_err)?;
    for i in emitted_indices(series.rows.len(), stride) {
        let r = &series.rows[i];
        let mut rec = vec![r.n.to_string(), fmt(r.t), fmt(r.l_hat), fmt(r.l_hat_ref), opt(r.control)];
        for c in &r.components {
            rec.extend([fmt(c.lyapunov), fmt(c.max_abs), opt(c.bound_geom), opt(c.bound_exp)]);
            if c.sweeps.is_empty() {
                rec.extend(std::iter::repeat_n(String::new(), 8));
            } else {
                let mut sum = ResidualBreakdown::default();
                for s in &c.sweeps {
                    sum.accumulate(s, 1.0);
                }
                rec.extend(residual_fields(&sum).iter().map(|v| fmt(*v)));
            }
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// File name of the snapshot of `component` at step `n`.
pub fn snapshot_name(component: usize, n: usize) -> String {
    format!("snapshot_c{component}_n{n}.csv")
}

/// One row per index of the second axis (and beyond), first axis along the row.
pub fn write_snapshot<W: Write>(out: W, snapshot: &Snapshot, component: usize, row_len: usize) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let values = snapshot
        .fields
        .get(component)
        .ok_or_else(|| Error::InputData(format!("snapshot has no component {component}")))?;
    for row in values.chunks(row_len.max(1)) {
        w.write_record(row.iter().map(|v| fmt(*v))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn viscosity_label(v: &Viscosity) -> String {
    match v {
        Viscosity::Preset(ViscosityPreset::LaxWendroff) => "lax-wendroff".into(),
        Viscosity::Preset(ViscosityPreset::Courant) => "courant".into(),
        Viscosity::Preset(ViscosityPreset::LaxFriedrichs) => "lax-friedrichs".into(),
        Viscosity::Value(q) => fmt(*q),
    }
}

/// One row per level; the order columns refer to the refinement into that level.
pub fn write_study<W: Write>(out: W, studies: &[RefinementStudy]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STUDY_COLUMNS).map_err(csv_err)?;
    for s in studies {
        let q = viscosity_label(&s.viscosity);
        for (i, level) in s.levels.iter().enumerate() {
            let res = level.cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("x");
            let (p, pg) = if i == 0 {
                (None, None)
            } else {
                (s.eoc[i - 1], Some(s.eoc_grid[i - 1]))
            };
            w.write_record([
                q.clone(),
                res,
                fmt(level.result.l_final),
                opt(level.error),
                opt(p),
                fmt(level.error_grid),
                opt(pg),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}
