use crate::error::{Error, Result};
use crate::scheme1d::{self, Line, SchemeParams};
use crate::splitmd::LineUpdate;

/// Residual terms of one step on one line, plus the measured Lyapunov rate.
///
/// `total = r0 dx + re1 dx^2 + re2_bound dx^3 + ru + r2 + r1`. The exact
/// weight residual `re_exact` replaces the first three terms in the per-step
/// identity `rate = re_exact + ru + r2 + r1 + control_gap`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidualBreakdown {
    pub r0: f64,
    pub re1: f64,
    pub re2_bound: f64,
    pub ru: f64,
    pub r2: f64,
    pub r1: f64,
    pub re_exact: f64,
    /// Gap in the control admissibility condition; zero under equality control.
    pub control_gap: f64,
    pub total: f64,
    pub lyapunov_before: f64,
    /// `(L^{n+1} - L^n) / dt`.
    pub rate: f64,
}

impl ResidualBreakdown {
    /// `rate - (re_exact + ru + r2 + r1)`.
    pub fn ledger_defect(&self) -> f64 {
        self.rate - (self.re_exact + self.ru + self.r2 + self.r1)
    }

    /// Defect of the identity including the admissibility gap.
    pub fn ledger_defect_with_gap(&self) -> f64 {
        self.ledger_defect() - self.control_gap
    }

    /// `self += factor * other`, field by field.
    pub fn accumulate(&mut self, other: &ResidualBreakdown, factor: f64) {
        self.r0 += factor * other.r0;
        self.re1 += factor * other.re1;
        self.re2_bound += factor * other.re2_bound;
        self.ru += factor * other.ru;
        self.r2 += factor * other.r2;
        self.r1 += factor * other.r1;
        self.re_exact += factor * other.re_exact;
        self.control_gap += factor * other.control_gap;
        self.total += factor * other.total;
        self.lyapunov_before += factor * other.lyapunov_before;
        self.rate += factor * other.rate;
    }
}

/// Residual terms for the step `line -> next` with inflow value `control`.
/// `line` must hold the ghosts used for the step.
pub fn residual_terms_1d(
    line: &Line,
    next: &Line,
    p: &SchemeParams,
    control: f64,
) -> Result<ResidualBreakdown> {
    if line.values().len() != next.values().len() || line.weights() != next.weights() {
        return Err(Error::InputData("lines before and after the step differ in shape".into()));
    }
    let w = line.values();
    let e = line.weights();
    let m = line.cells();
    let a = p.a();
    let c = p.c_l();
    let dx = p.dx();
    let lambda = p.lambda();
    let q = p.q();
    let half_a = 0.5 * a;

    let mut r1_visc = 0.0;
    let mut r1_sq = 0.0;
    let mut r2 = 0.0;
    let mut re_exact = 0.0;
    let mut re2_sum = 0.0;
    for i in 1..=m {
        let d1 = w[i + 1] - w[i - 1];
        let d2 = w[i + 1] - 2.0 * w[i] + w[i - 1];
        let incr = -0.5 * lambda * a * d1 + 0.5 * q * d2;
        r1_visc += q * w[i] * d2 * e[i];
        r1_sq += incr * incr * e[i];
        r2 += e[i] * d1 * d2;
        let up = w[i + 1] * w[i + 1];
        let down = w[i - 1] * w[i - 1];
        re_exact += up * (e[i + 1] - e[i]) + down * (e[i] - e[i - 1]);
        re2_sum += up * e[i].min(e[i + 1]) + down * e[i - 1].min(e[i]);
    }
    let r1 = (r1_visc + r1_sq) / lambda;
    let r2 = half_a * r2;
    let re_exact = half_a * re_exact;
    let re2_bound = -(c * c * c) / (12.0 * a * a) * re2_sum;

    let (s0, s1, sm, sm1) = (
        w[0] * w[0] * e[0],
        w[1] * w[1] * e[1],
        w[m] * w[m] * e[m],
        w[m + 1] * w[m + 1] * e[m + 1],
    );
    let ru = if a > 0.0 {
        half_a * (w[1] * w[1] - control * control) * e[1]
    } else {
        half_a * (control * control - w[m] * w[m]) * e[m]
    };
    let r0 = -0.5 * c * (s0 - s1 - sm + sm1);
    let re1 = c * c / (4.0 * a) * (s0 + s1 - sm - sm1);
    let total = r0 * dx + re1 * dx * dx + re2_bound * dx * dx * dx + ru + r2 + r1;

    let lyapunov_before = line.lyapunov(dx);
    let rate = (next.lyapunov(dx) - lyapunov_before) / p.dt();
    Ok(ResidualBreakdown {
        r0,
        re1,
        re2_bound,
        ru,
        r2,
        r1,
        re_exact,
        control_gap: scheme1d::admissibility_gap(line, a),
        total,
        lyapunov_before,
        rate,
    })
}

/// Residual of one splitting sweep: line residuals weighted by `|V| / dx_k`.
/// `params` must carry the per-direction decay constant.
pub fn sweep_residual(
    lines: &[LineUpdate],
    params: &SchemeParams,
    cell_volume: f64,
) -> Result<ResidualBreakdown> {
    let factor = cell_volume / params.dx();
    let mut acc = ResidualBreakdown::default();
    for upd in lines {
        let r = residual_terms_1d(&upd.before, &upd.after, params, upd.control)?;
        acc.accumulate(&r, factor);
    }
    Ok(acc)
}
