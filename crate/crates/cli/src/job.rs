//! Job description read from JSON.

use arcsection::decide::{axis_direction, XYZ};
use arcsection::polyarith::{fmt_rat, parse_poly, parse_rat, MPoly, Rational};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeSet;
use thiserror::Error;

/// Invalid job input (exit code 2).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JobError {
    #[error("malformed job JSON: {0}")]
    Json(String),
    #[error("invalid surface: {0}")]
    Surface(String),
    #[error("invalid projection: {0}")]
    Projection(String),
    #[error("invalid arc: {0}")]
    Arc(String),
    #[error("invalid tasks: {0}")]
    Tasks(String),
    #[error("invalid precision: {0}")]
    Precision(String),
}

/// Computations a job may request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Analyze,
    TangentCone,
    Generic,
    Section,
    ReduceWitness,
    ConeDiscriminant,
    ScreenBranches,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Analyze => "analyze",
            Task::TangentCone => "tangent-cone",
            Task::Generic => "generic",
            Task::Section => "section",
            Task::ReduceWitness => "reduce-witness",
            Task::ConeDiscriminant => "cone-discriminant",
            Task::ScreenBranches => "screen-branches",
        }
    }
}

/// Numerical settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Precision {
    /// Significant digits trusted in floating-point root comparisons; sets
    /// the cluster merge tolerance to `10^-(working_digits - 9)`.
    #[serde(default = "default_digits")]
    pub working_digits: u32,
    /// Cap on tracking steps per loop pass.
    #[serde(default = "default_step_cap")]
    pub step_cap: usize,
    /// Cap on nested blowups.
    #[serde(default = "default_depth_cap")]
    pub depth_cap: u32,
}

pub const MIN_DIGITS: u32 = 10;
pub const MAX_DIGITS: u32 = 15;

fn default_digits() -> u32 {
    MAX_DIGITS
}

fn default_step_cap() -> usize {
    1 << 20
}

fn default_depth_cap() -> u32 {
    arcsection::resolve::DEFAULT_DEPTH_CAP
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            working_digits: default_digits(),
            step_cap: default_step_cap(),
            depth_cap: default_depth_cap(),
        }
    }
}

impl Precision {
    pub fn merge_tol(&self) -> f64 {
        10f64.powi(-(self.working_digits as i32 - 9))
    }
}

fn default_true() -> bool {
    true
}

/// A job as written by the user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub surface: String,
    /// Axis name (`"x"`, `"y"`, `"z"`) or a vector of three rationals given
    /// as numbers or strings such as `"1/10"`.
    pub projection: Value,
    pub tasks: Vec<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arc: Option<[String; 2]>,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub seed: u64,
    /// Skip crossings over discriminant branches with reducible sections.
    #[serde(default = "default_true")]
    pub prune: bool,
    /// Record braid words along monodromy loops.
    #[serde(default)]
    pub braids: bool,
}

/// A validated job.
#[derive(Clone, Debug, PartialEq)]
pub struct Job {
    pub spec: JobSpec,
    pub surface: MPoly,
    pub direction: [Rational; 3],
    pub tasks: BTreeSet<Task>,
    pub arc: Option<(MPoly, MPoly)>,
}

impl JobSpec {
    pub fn from_json(text: &str) -> Result<JobSpec, JobError> {
        serde_json::from_str(text).map_err(|e| JobError::Json(e.to_string()))
    }

    /// Check the invariants and parse the expressions.
    pub fn validate(&self) -> Result<Job, JobError> {
        let surface = parse_poly(&self.surface, &XYZ).map_err(|e| JobError::Surface(e.to_string()))?;
        let direction = parse_projection(&self.projection)?;
        if self.tasks.is_empty() {
            return Err(JobError::Tasks("at least one task is required".into()));
        }
        let tasks: BTreeSet<Task> = self.tasks.iter().copied().collect();
        let wants_section = tasks.contains(&Task::Section);
        let arc = match (&self.arc, wants_section) {
            (Some([x, y]), true) => {
                let px = parse_poly(x, &["t"]).map_err(|e| JobError::Arc(format!("x(t): {e}")))?;
                let py = parse_poly(y, &["t"]).map_err(|e| JobError::Arc(format!("y(t): {e}")))?;
                Some((px, py))
            }
            (None, true) => return Err(JobError::Arc("the section task needs an arc".into())),
            (Some(_), false) => return Err(JobError::Arc("an arc is only accepted with the section task".into())),
            (None, false) => None,
        };
        let p = &self.precision;
        if !(MIN_DIGITS..=MAX_DIGITS).contains(&p.working_digits) {
            return Err(JobError::Precision(format!(
                "working_digits must lie in {MIN_DIGITS}..={MAX_DIGITS} (double-precision numerics)"
            )));
        }
        if p.step_cap < 64 {
            return Err(JobError::Precision("step_cap must be at least 64".into()));
        }
        if p.depth_cap == 0 {
            return Err(JobError::Precision("depth_cap must be positive".into()));
        }
        Ok(Job {
            spec: self.clone(),
            surface,
            direction,
            tasks,
            arc,
        })
    }
}

fn parse_projection(v: &Value) -> Result<[Rational; 3], JobError> {
    match v {
        Value::String(s) => {
            axis_direction(s).ok_or_else(|| JobError::Projection(format!("unknown axis '{s}' (use x, y or z)")))
        }
        Value::Array(items) if items.len() == 3 => {
            let mut out = Vec::new();
            for it in items {
                let q = match it {
                    Value::String(s) => parse_rat(s).or_else(|| parse_decimal(s)),
                    Value::Number(n) => parse_rat(&n.to_string()).or_else(|| parse_decimal(&n.to_string())),
                    _ => None,
                };
                out.push(q.ok_or_else(|| JobError::Projection(format!("bad entry {it}")))?);
            }
            Ok([out[0].clone(), out[1].clone(), out[2].clone()])
        }
        _ => Err(JobError::Projection("expected an axis name or three rationals".into())),
    }
}

/// Exact value of a plain decimal such as `-0.125` (no exponent).
fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (int, frac) = s.split_once('.')?;
    if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let scale = Rational::from_integer(10u32.into()).pow(frac.len() as i32);
    let digits = parse_rat(&format!("{int}{frac}"))?;
    Some(digits / scale)
}

/// Canonical text of a direction vector.
pub fn direction_text(d: &[Rational; 3]) -> [String; 3] {
    [fmt_rat(&d[0]), fmt_rat(&d[1]), fmt_rat(&d[2])]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> JobSpec {
        JobSpec::from_json(s).unwrap()
    }

    #[test]
    fn axis_and_vector_projections() {
        let j = spec(r#"{"surface":"z^2-x","projection":"z","tasks":["analyze"]}"#).validate().unwrap();
        assert_eq!(direction_text(&j.direction), ["0", "0", "1"]);
        let j = spec(r#"{"surface":"z^2-x","projection":[0,"1/10",1],"tasks":["analyze"]}"#)
            .validate()
            .unwrap();
        assert_eq!(direction_text(&j.direction), ["0", "1/10", "1"]);
        let j = spec(r#"{"surface":"z^2-x","projection":[0,0.5,1],"tasks":["analyze"]}"#)
            .validate()
            .unwrap();
        assert_eq!(direction_text(&j.direction), ["0", "1/2", "1"]);
        let j = spec(r#"{"surface":"z^2-x","projection":["-0.1","2",1],"tasks":["analyze"]}"#)
            .validate()
            .unwrap();
        assert_eq!(direction_text(&j.direction), ["-1/10", "2", "1"]);
    }

    #[test]
    fn defaults() {
        let s = spec(r#"{"surface":"z^2-x","projection":"z","tasks":["generic"]}"#);
        assert_eq!(s.precision, Precision::default());
        assert!(s.prune && !s.braids);
        assert_eq!(s.seed, 0);
        assert!((s.precision.merge_tol() - 1e-6).abs() < 1e-18);
    }

    #[test]
    fn invariants() {
        let bad = [
            r#"{"surface":"z^2-x","projection":"z","tasks":[]}"#,
            r#"{"surface":"z^2-x","projection":"z","tasks":["section"]}"#,
            r#"{"surface":"z^2-x","projection":"z","tasks":["analyze"],"arc":["t","t"]}"#,
            r#"{"surface":"z^2-x","projection":"w","tasks":["analyze"]}"#,
            r#"{"surface":"z^2-x","projection":[1,2],"tasks":["analyze"]}"#,
            r#"{"surface":"z^^2","projection":"z","tasks":["analyze"]}"#,
            r#"{"surface":"z^2-x","projection":"z","tasks":["analyze"],"precision":{"working_digits":30}}"#,
        ];
        for b in bad {
            assert!(spec(b).validate().is_err(), "{b}");
        }
        assert!(JobSpec::from_json(r#"{"surface":"z","projection":"z","tasks":["fly"]}"#).is_err());
        assert!(JobSpec::from_json(r#"{"surface":"z","projection":"z","tasks":["analyze"],"x":1}"#).is_err());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let s = spec(r#"{"surface":"z^3-x*y","projection":[1,2,3],"tasks":["section","analyze"],"arc":["t","t^2"],"seed":5}"#);
        let back: JobSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
