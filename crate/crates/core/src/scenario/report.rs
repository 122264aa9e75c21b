use std::fmt::Write as _;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Informational,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Informational => "INFO",
        }
    }
}

/// Formats with 17 significant digits; non-finite values become `null`.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    RawValue::from_string(sig17(*x)).map_err(serde::ser::Error::custom)?.serialize(s)
}

fn ser_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_f64(v, s),
        None => s.serialize_none(),
    }
}

fn ser_point<S: Serializer>(x: &Option<[f64; 4]>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(p) => {
            let text = format!("[{}]", p.iter().map(|v| sig17(*v)).collect::<Vec<_>>().join(", "));
            RawValue::from_string(text).map_err(serde::ser::Error::custom)?.serialize(s)
        }
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub equation: String,
    pub description: String,
    pub points: usize,
    #[serde(serialize_with = "ser_f64")]
    pub max_residual: f64,
    #[serde(serialize_with = "ser_point")]
    pub worst_point: Option<[f64; 4]>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub tolerance: Option<f64>,
    pub status: Status,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
    pub sample_mode: String,
    pub points: usize,
    #[serde(serialize_with = "ser_f64")]
    pub fd_nested_step: f64,
    #[serde(serialize_with = "ser_f64")]
    pub fd_outer_step: f64,
    pub adjoint_sign: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub scenario: String,
    pub environment: Environment,
    /// Seconds since the Unix epoch; the only field allowed to differ between runs.
    pub timestamp: Option<u64>,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

impl CheckReport {
    pub fn stamped(mut self) -> Self {
        self.timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// 0 when every enforced check passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let env = &self.environment;
        let _ = writeln!(
            out,
            "scenario {}  ({} {} points, seed {}, steps {:.1e}/{:.1e}, adjoint {})",
            self.scenario, env.points, env.sample_mode, env.seed, env.fd_nested_step, env.fd_outer_step, env.adjoint_sign
        );
        for c in &self.checks {
            let tol = c.tolerance.map(|t| format!("{t:.1e}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "  {}  {:<26} ({:>2})  max {:>10.3e}  tol {:>7}",
                c.status.label(),
                c.name,
                c.equation,
                c.max_residual,
                tol
            );
            if let Some(n) = &c.note {
                let _ = writeln!(out, "        {n}");
            }
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let _ = writeln!(out, "{}", if failed == 0 { "all enforced checks pass".to_string() } else { format!("{failed} check(s) failed") });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(sig17(0.1), "1.0000000000000001e-1");
        assert_eq!(sig17(0.0), "0.0000000000000000e0");
        assert_eq!(sig17(f64::NAN), "null");
        assert_eq!(sig17(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
