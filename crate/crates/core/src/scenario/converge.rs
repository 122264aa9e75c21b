use std::fmt::Write as _;

use serde::Serialize;

use super::checks::{evaluate_points, fd_check_indices, tag, CheckSpec, RunError, CHECKS};
use super::report::sig17;
use super::Scenario;
use crate::error::Error;

/// Residuals at or below this are treated as rounding noise.
pub const SATURATION_FLOOR: f64 = 1e-10;

/// Minimum observed order for a smooth scenario.
pub const MIN_ORDER: f64 = 1.8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum Order {
    Observed(f64),
    Saturated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub name: String,
    pub equation: String,
    pub residuals: Vec<f64>,
    pub order: Order,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub scenario: String,
    pub steps: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Every non-saturated check converges with at least [`MIN_ORDER`].
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| match r.order {
            Order::Observed(p) => p >= MIN_ORDER,
            Order::Saturated => true,
        })
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let order = match r.order {
                    Order::Observed(p) => sig17(p),
                    Order::Saturated => "\"saturated\"".into(),
                };
                format!(
                    "    {{\"name\": {:?}, \"equation\": {:?}, \"residuals\": [{}], \"order\": {}}}",
                    r.name,
                    r.equation,
                    r.residuals.iter().map(|v| sig17(*v)).collect::<Vec<_>>().join(", "),
                    order
                )
            })
            .collect();
        format!(
            "{{\n  \"scenario\": {:?},\n  \"steps\": [{}],\n  \"rows\": [\n{}\n  ],\n  \"passed\": {}\n}}",
            self.scenario,
            self.steps.iter().map(|v| sig17(*v)).collect::<Vec<_>>().join(", "),
            rows.join(",\n"),
            self.passed()
        )
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<26}", "step");
        for s in &self.steps {
            let _ = write!(out, " {s:>10.3e}");
        }
        let _ = writeln!(out, "  order");
        for r in &self.rows {
            let _ = write!(out, "{:<26}", r.name);
            for v in &r.residuals {
                let _ = write!(out, " {v:>10.3e}");
            }
            let order = match r.order {
                Order::Observed(p) => format!("{p:.3}"),
                Order::Saturated => "saturated".into(),
            };
            let _ = writeln!(out, "  {order}");
        }
        out
    }
}

/// Least-squares slope of `ln r` against `ln step`.
pub fn fitted_order(steps: &[f64], residuals: &[f64]) -> Order {
    if residuals.iter().all(|&r| r <= SATURATION_FLOOR) {
        return Order::Saturated;
    }
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(residuals)
        .filter(|(_, &r)| r > 0.0 && r.is_finite())
        .map(|(&s, &r)| (s.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return Order::Observed(f64::NAN);
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Order::Observed(sxy / sxx)
}

/// Re-runs every enforced finite-difference check with both difference
/// steps set to each entry of `steps`.
pub fn convergence_study(s: &Scenario, steps: &[f64]) -> Result<ConvergenceTable, RunError> {
    let precondition = |m: &str| RunError { point: [f64::NAN; 4], error: Error::InvalidArgument(m.into()) };
    if steps.len() < 3 {
        return Err(precondition("convergence study needs at least 3 steps"));
    }
    if steps.iter().any(|&h| !(h > 0.0 && h.is_finite())) || steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(precondition("steps must be positive and strictly decreasing"));
    }
    let points = s.sampling.points();
    let indices = fd_check_indices(s);
    let mut residuals = vec![Vec::with_capacity(steps.len()); indices.len()];
    for &h in steps {
        let mut t = s.clone();
        t.nested_step = h;
        t.outer_step = h;
        let agg = evaluate_points(&t, &points, Some(&indices))?;
        for (row, &i) in residuals.iter_mut().zip(&indices) {
            row.push(agg.maxima[i]);
        }
    }
    let rows = indices
        .iter()
        .zip(residuals)
        .map(|(&i, r)| {
            let c: &CheckSpec = &CHECKS[i];
            ConvergenceRow { name: c.name.into(), equation: tag(c.name).into(), order: fitted_order(steps, &r), residuals: r }
        })
        .collect();
    Ok(ConvergenceTable { scenario: s.name.clone(), steps: steps.to_vec(), rows })
}
