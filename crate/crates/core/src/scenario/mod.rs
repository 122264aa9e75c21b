//! Scenario files, the check runner, convergence studies and reports.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! name = "frw"
//! adjoint_sign = "as-printed"        # or "standard"
//!
//! [constants]
//! a = 0.5
//!
//! [gravity]
//! vierbein = [["1", "0", "0", "0"], ["0", "exp(-x0)", "0", "0"],
//!             ["0", "0", "exp(-x0)", "0"], ["0", "0", "0", "exp(-x0)"]]
//!
//! [sfield]
//! phi = "0"
//! lambda = 0.0
//!
//! [connection]
//! mode = "levi-civita"               # "frame" (with `frame = [[..]]`) or "direct"
//! # [connection.components]
//! # "01" = ["x1", "0", "0", "0"]
//!
//! [dirac]
//! psi = [["re0", "im0"], ["re1", "im1"], ["re2", "im2"], ["re3", "im3"]]
//! mass = 1.0
//!
//! [sample]
//! mode = "random"                    # or "grid" with `n`
//! box = [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]
//! count = 64
//! seed = 7
//!
//! [fd]
//! nested = 1e-4
//! outer = 1e-5
//!
//! [expect]                           # field equations the configuration solves
//! dirac_equation = true
//!
//! [tolerances]
//! commutator = 1e-5
//! ```

mod checks;
mod converge;
mod report;

pub use checks::{
    run_all_checks, run_all_checks_with, spot_check_generator, tag, threads_from_env, CheckKind, CheckSpec, RunError, CHECKS,
};
pub use converge::{convergence_study, fitted_order, ConvergenceRow, ConvergenceTable, Order, MIN_ORDER, SATURATION_FLOOR};
pub use report::{sig17, CheckRecord, CheckReport, Environment, Status};

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::dirac::{AdjointSignConvention, DiracField};
use crate::expr::{parse_expression, ComplexExpression, Constants, Expression, Point4};
use crate::geometry::{
    CompositeVierbein, ConnectionField, DirectConnection, FrameField, SFieldConfig, VierbeinBundle, PAIRS,
};

pub const DEFAULT_NESTED_STEP: f64 = 1e-4;
pub const DEFAULT_OUTER_STEP: f64 = 1e-5;

/// Problems with a scenario file, each naming the offending field.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },

    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
}

impl ScenarioError {
    pub fn field(&self) -> Option<&str> {
        match self {
            ScenarioError::Io { .. } => None,
            ScenarioError::Parse { field, .. } | ScenarioError::Validation { field, .. } => Some(field),
        }
    }

    fn parse(field: impl Into<String>, message: impl ToString) -> Self {
        ScenarioError::Parse { field: field.into(), message: message.to_string() }
    }

    fn invalid(field: impl Into<String>, message: impl ToString) -> Self {
        ScenarioError::Validation { field: field.into(), message: message.to_string() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    Random,
    Grid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sampling {
    pub mode: SampleMode,
    pub bounds: [[f64; 2]; 4],
    /// Random points, or points per axis for the grid.
    pub count: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { mode: SampleMode::Random, bounds: [[-1.0, 1.0]; 4], count: 64, seed: 0 }
    }
}

impl Sampling {
    /// Sample points in a fixed order: seeded SplitMix64 draws, or `N^4` cell
    /// midpoints in lexicographic order.
    pub fn points(&self) -> Vec<Point4> {
        let b = &self.bounds;
        match self.mode {
            SampleMode::Random => {
                use rand::{RngCore, SeedableRng};
                let mut rng = rand_xoshiro::SplitMix64::seed_from_u64(self.seed);
                (0..self.count)
                    .map(|_| {
                        let mut x = [0.0; 4];
                        for (i, xi) in x.iter_mut().enumerate() {
                            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                            *xi = b[i][0] + (b[i][1] - b[i][0]) * u;
                        }
                        Point4(x)
                    })
                    .collect()
            }
            SampleMode::Grid => {
                let n = self.count;
                let mid = |axis: usize, i: usize| b[axis][0] + (i as f64 + 0.5) * (b[axis][1] - b[axis][0]) / n as f64;
                let mut out = Vec::with_capacity(n.pow(4));
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                out.push(Point4::new(mid(0, i), mid(1, j), mid(2, k), mid(3, l)));
                            }
                        }
                    }
                }
                out
            }
        }
    }
}

/// Field equations the configuration is declared to satisfy; undeclared
/// ones are reported without affecting the verdict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Expectations {
    pub dirac_equation: bool,
    pub connection_equation: bool,
    pub vierbein_equation: bool,
    pub current_conservation: bool,
}

/// A fully parsed and validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub constants: Constants,
    pub gravity: VierbeinBundle,
    pub sfield: SFieldConfig,
    pub connection: ConnectionField,
    pub dirac: DiracField,
    pub adjoint: AdjointSignConvention,
    pub sampling: Sampling,
    pub nested_step: f64,
    pub outer_step: f64,
    pub expect: Expectations,
    pub tolerances: BTreeMap<String, f64>,
}

impl Scenario {
    /// The vierbein used for every check: gravity plus the S-field.
    pub fn vierbein(&self) -> CompositeVierbein {
        CompositeVierbein::new(self.gravity.clone(), self.sfield.clone())
    }

    /// Tolerance for a check, honoring overrides.
    pub fn tolerance(&self, check: &CheckSpec) -> Option<f64> {
        check.tolerance.map(|t| self.tolerances.get(check.name).copied().unwrap_or(t))
    }

    /// Overrides a named tolerance; unknown names are rejected.
    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<(), ScenarioError> {
        validate_tolerance(name, value)?;
        self.tolerances.insert(name.to_string(), value);
        Ok(())
    }

    pub fn is_torsion_free(&self) -> bool {
        self.connection.is_levi_civita()
    }
}

fn validate_tolerance(name: &str, value: f64) -> Result<(), ScenarioError> {
    let field = format!("tolerances.{name}");
    match CHECKS.iter().find(|c| c.name == name) {
        None => Err(ScenarioError::invalid(field, "no check with this name")),
        Some(c) if c.tolerance.is_none() => Err(ScenarioError::invalid(field, "check is informational")),
        Some(_) if !(value > 0.0 && value.is_finite()) => Err(ScenarioError::invalid(field, "must be positive and finite")),
        Some(_) => Ok(()),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    adjoint_sign: Option<String>,
    #[serde(default)]
    constants: BTreeMap<String, f64>,
    gravity: Option<RawGravity>,
    sfield: Option<RawSField>,
    connection: Option<RawConnection>,
    dirac: Option<RawDirac>,
    sample: Option<RawSample>,
    fd: Option<RawFd>,
    #[serde(default)]
    expect: Expectations,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGravity {
    vierbein: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSField {
    phi: Option<String>,
    lambda: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConnection {
    mode: Option<String>,
    frame: Option<Vec<Vec<String>>>,
    components: Option<BTreeMap<String, Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDirac {
    psi: Option<Vec<Vec<String>>>,
    mass: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    mode: Option<String>,
    #[serde(rename = "box")]
    bounds: Option<Vec<Vec<f64>>>,
    count: Option<i64>,
    n: Option<i64>,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFd {
    nested: Option<f64>,
    outer: Option<f64>,
}

fn expr(field: &str, text: &str, c: &Constants) -> Result<Expression, ScenarioError> {
    parse_expression(text, c).map_err(|e| ScenarioError::parse(field, e))
}

fn matrix(field: &str, rows: &[Vec<String>], c: &Constants) -> Result<[[Expression; 4]; 4], ScenarioError> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(ScenarioError::invalid(field, "expected 4 rows of 4 expressions"));
    }
    let mut out: [[Expression; 4]; 4] = Default::default();
    for (k, row) in rows.iter().enumerate() {
        for (mu, text) in row.iter().enumerate() {
            out[k][mu] = expr(&format!("{field}[{k}][{mu}]"), text, c)?;
        }
    }
    Ok(out)
}

fn positive_step(field: &str, v: Option<f64>, default: f64) -> Result<f64, ScenarioError> {
    match v {
        None => Ok(default),
        Some(s) if s > 0.0 && s.is_finite() => Ok(s),
        Some(_) => Err(ScenarioError::invalid(field, "must be positive and finite")),
    }
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str, default_name: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| {
        let field = e.span().map(|s| format!("byte {}", s.start)).unwrap_or_else(|| "document".into());
        ScenarioError::parse(field, e.message())
    })?;

    let constants = raw.constants;
    for (name, v) in &constants {
        if !v.is_finite() {
            return Err(ScenarioError::invalid(format!("constants.{name}"), "must be finite"));
        }
        if ["x0", "x1", "x2", "x3", "pi"].contains(&name.as_str()) {
            return Err(ScenarioError::invalid(format!("constants.{name}"), "reserved symbol"));
        }
    }

    let gravity = match raw.gravity.and_then(|g| g.vierbein) {
        Some(rows) => VierbeinBundle::new(matrix("gravity.vierbein", &rows, &constants)?),
        None => VierbeinBundle::identity(),
    };

    let sfield = match raw.sfield {
        None => SFieldConfig::off(),
        Some(s) => {
            let phi = match s.phi {
                Some(t) => expr("sfield.phi", &t, &constants)?,
                None => return Err(ScenarioError::invalid("sfield.phi", "missing")),
            };
            let lambda = s.lambda.ok_or_else(|| ScenarioError::invalid("sfield.lambda", "missing"))?;
            SFieldConfig::new(phi, lambda).map_err(|e| ScenarioError::invalid("sfield.lambda", e))?
        }
    };

    let connection = match raw.connection {
        None => ConnectionField::LeviCivita,
        Some(c) => match c.mode.as_deref() {
            Some("levi-civita") => ConnectionField::LeviCivita,
            Some("frame") => {
                let rows = c.frame.ok_or_else(|| ScenarioError::invalid("connection.frame", "missing"))?;
                ConnectionField::Derived(FrameField::new(matrix("connection.frame", &rows, &constants)?))
            }
            Some("direct") => {
                let mut pairs: [[Expression; 4]; 6] = Default::default();
                for (key, comps) in c.components.unwrap_or_default() {
                    let field = format!("connection.components.{key}");
                    let b = key.as_bytes();
                    let idx = (b.len() == 2)
                        .then(|| ((b[0] as char).to_digit(10), (b[1] as char).to_digit(10)))
                        .and_then(|(k, l)| Some((k? as usize, l? as usize)))
                        .and_then(|kl| PAIRS.iter().position(|&p| p == kl))
                        .ok_or_else(|| ScenarioError::invalid(&field, "key must be a pair kl with k < l <= 3"))?;
                    if comps.len() != 4 {
                        return Err(ScenarioError::invalid(&field, "expected 4 expressions"));
                    }
                    for (mu, t) in comps.iter().enumerate() {
                        pairs[idx][mu] = expr(&format!("{field}[{mu}]"), t, &constants)?;
                    }
                }
                ConnectionField::Direct(DirectConnection::new(pairs))
            }
            Some(other) => {
                return Err(ScenarioError::invalid("connection.mode", format!("unknown mode `{other}`")));
            }
            None => return Err(ScenarioError::invalid("connection.mode", "missing")),
        },
    };

    let dirac = match raw.dirac {
        None => DiracField::zero(0.0).expect("zero mass is valid"),
        Some(d) => {
            let mass = d.mass.ok_or_else(|| ScenarioError::invalid("dirac.mass", "missing"))?;
            let mut psi: [ComplexExpression; 4] = Default::default();
            if let Some(rows) = d.psi {
                if rows.len() != 4 || rows.iter().any(|r| r.len() != 2) {
                    return Err(ScenarioError::invalid("dirac.psi", "expected 4 [re, im] pairs"));
                }
                for (a, r) in rows.iter().enumerate() {
                    psi[a] = ComplexExpression::new(
                        expr(&format!("dirac.psi[{a}].re"), &r[0], &constants)?,
                        expr(&format!("dirac.psi[{a}].im"), &r[1], &constants)?,
                    );
                }
            }
            DiracField::new(psi, mass).map_err(|e| ScenarioError::invalid("dirac.mass", e))?
        }
    };

    let adjoint = match raw.adjoint_sign.as_deref() {
        None => AdjointSignConvention::default(),
        Some(s) => AdjointSignConvention::from_name(s)
            .ok_or_else(|| ScenarioError::invalid("adjoint_sign", format!("expected as-printed or standard, got `{s}`")))?,
    };

    let mut sampling = Sampling::default();
    if let Some(s) = raw.sample {
        sampling.mode = match s.mode.as_deref() {
            None | Some("random") => SampleMode::Random,
            Some("grid") => SampleMode::Grid,
            Some(other) => return Err(ScenarioError::invalid("sample.mode", format!("unknown mode `{other}`"))),
        };
        if let Some(b) = s.bounds {
            if b.len() != 4 || b.iter().any(|r| r.len() != 2) {
                return Err(ScenarioError::invalid("sample.box", "expected 4 [lo, hi] pairs"));
            }
            for (i, r) in b.iter().enumerate() {
                if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1]) {
                    return Err(ScenarioError::invalid("sample.box", format!("axis {i} is empty")));
                }
                sampling.bounds[i] = [r[0], r[1]];
            }
        }
        let (key, count) = match sampling.mode {
            SampleMode::Random => ("sample.count", s.count),
            SampleMode::Grid => ("sample.n", s.n),
        };
        if let Some(c) = count {
            if c < 1 {
                return Err(ScenarioError::invalid(key, "must be at least 1"));
            }
            sampling.count = c as usize;
        } else if sampling.mode == SampleMode::Grid {
            sampling.count = 2;
        }
        sampling.seed = s.seed.unwrap_or(0);
    }

    let (nested, outer) = raw.fd.map(|f| (f.nested, f.outer)).unwrap_or((None, None));
    let nested_step = positive_step("fd.nested", nested, DEFAULT_NESTED_STEP)?;
    let outer_step = positive_step("fd.outer", outer, DEFAULT_OUTER_STEP)?;

    for (name, v) in &raw.tolerances {
        validate_tolerance(name, *v)?;
    }

    Ok(Scenario {
        name: raw.name.unwrap_or_else(|| default_name.to_string()),
        constants,
        gravity,
        sfield,
        connection,
        dirac,
        adjoint,
        sampling,
        nested_step,
        outer_step,
        expect: raw.expect,
        tolerances: raw.tolerances,
    })
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_scenario(&text, stem)
}
