//! Running a job and assembling the JSON report.

use crate::job::{direction_text, Job, JobError, JobSpec, Task};
use arcsection::decide::{
    analyze, arc_section, cone_discriminant_check, generic_directions, screen_discriminant_branches,
    setup_projection, tangent_cone_screen, totally_reducible_arc, AnalyzeOptions, Arc, ArcProvenance,
    BranchScreen, ConeDiscriminantReport, CrossingReport, DecideError, Existence, ProjectionSetup,
    SectionOptions, SectionReport, TangentCone, WitnessReport,
};
use arcsection::monodromy::crossing::generic_monodromy;
use arcsection::monodromy::{TrackOptions, TrackingCertificate};
use arcsection::polyarith::{initial_form, MPoly, Rational};
use arcsection::resolve::{resolve_embedded_with, ResolutionTree, ResolveOptions};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

/// Machine-readable diagnostic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEntry {
    /// `invalid_input`, `certification` or `internal`.
    pub code: String,
    /// Task (or `job` / `setup`) that raised it.
    pub task: String,
    pub message: String,
}

impl ErrorEntry {
    fn new(code: &str, task: &str, message: impl Into<String>) -> Self {
        ErrorEntry {
            code: code.into(),
            task: task.into(),
            message: message.into(),
        }
    }

    fn from_decide(task: &str, e: &DecideError) -> Self {
        let code = if e.is_certification() {
            "certification"
        } else if is_input_error(e) {
            "invalid_input"
        } else {
            "internal"
        };
        ErrorEntry::new(code, task, e.to_string())
    }
}

fn is_input_error(e: &DecideError) -> bool {
    matches!(
        e,
        DecideError::NotThroughOrigin
            | DecideError::ZeroDirection
            | DecideError::LineInSurface
            | DecideError::UnsupportedProjection(_)
            | DecideError::InvalidArc(_)
            | DecideError::ArcMeetsDelta { .. }
            | DecideError::Poly(_)
    )
}

/// The projection after the linear change of coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetupSummary {
    pub direction: [String; 3],
    pub adapted: MPoly,
    pub d: u32,
    pub m: u32,
    pub transverse: bool,
    pub degree_z: u32,
}

/// Existence answer with the reasoning notes of the decision procedure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub exists_irreducible: Existence,
    pub notes: Vec<String>,
}

/// Monodromy and section of the generic linear arc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericReport {
    pub direction: [String; 2],
    pub radius: f64,
    /// 1-based cycle notation.
    pub permutation: String,
    pub cycle_type: Vec<usize>,
    pub certificate: TrackingCertificate,
    pub braid: Option<String>,
    pub section: Option<SectionReport>,
}

/// Section over the arc given in the job.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserSection {
    pub arc: [String; 2],
    pub report: SectionReport,
}

/// Everything produced by [`run`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// The effective job; running it again reproduces this report (up to
    /// timings).
    pub echo: JobSpec,
    pub setup: Option<SetupSummary>,
    pub discriminant: Option<MPoly>,
    pub tree: Option<ResolutionTree>,
    pub crossings: Vec<CrossingReport>,
    pub verdict: Option<VerdictSummary>,
    pub witnesses: Vec<WitnessReport>,
    pub generic: Option<GenericReport>,
    pub totally_reducible_witness: Option<WitnessReport>,
    pub tangent_cone: Option<TangentCone>,
    pub cone_discriminant: Option<ConeDiscriminantReport>,
    pub section: Option<UserSection>,
    pub branch_screens: Option<Vec<BranchScreen>>,
    /// Wall-clock milliseconds per stage.
    pub timings: BTreeMap<String, f64>,
    pub errors: Vec<ErrorEntry>,
    pub exit_code: i32,
}

impl Report {
    fn empty(echo: JobSpec) -> Self {
        Report {
            echo,
            setup: None,
            discriminant: None,
            tree: None,
            crossings: Vec::new(),
            verdict: None,
            witnesses: Vec::new(),
            generic: None,
            totally_reducible_witness: None,
            tangent_cone: None,
            cone_discriminant: None,
            section: None,
            branch_screens: None,
            timings: BTreeMap::new(),
            errors: Vec::new(),
            exit_code: EXIT_OK,
        }
    }

    /// Report for a job that failed validation.
    pub fn invalid(echo: Option<JobSpec>, e: &JobError) -> Self {
        let echo = echo.unwrap_or_else(|| JobSpec {
            surface: String::new(),
            projection: serde_json::Value::Null,
            tasks: Vec::new(),
            arc: None,
            precision: Default::default(),
            seed: 0,
            prune: true,
            braids: false,
        });
        let mut r = Report::empty(echo);
        r.errors.push(ErrorEntry::new("invalid_input", "job", e.to_string()));
        r.exit_code = EXIT_INVALID_INPUT;
        r
    }

    /// The report as JSON with the timings removed, for reproducibility
    /// comparisons.
    pub fn without_timings(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["timings"] = serde_json::json!({});
        v
    }

    fn finish(&mut self) {
        let has = |code: &str| self.errors.iter().any(|e| e.code == code);
        self.exit_code = if has("invalid_input") {
            EXIT_INVALID_INPUT
        } else if has("certification")
            || has("internal")
            || self.verdict.as_ref().map(|v| v.exists_irreducible) == Some(Existence::Unknown)
        {
            EXIT_CERTIFICATION
        } else {
            EXIT_OK
        };
    }
}

/// Numerical options derived from the job.
pub fn section_options(job: &Job) -> SectionOptions {
    SectionOptions {
        track: TrackOptions {
            step_cap: job.spec.precision.step_cap,
            braids: job.spec.braids,
            ..TrackOptions::default()
        },
        merge_tol: job.spec.precision.merge_tol(),
    }
}

pub fn analyze_options(job: &Job) -> AnalyzeOptions {
    AnalyzeOptions {
        prune: job.spec.prune,
        seed: job.spec.seed,
        section: section_options(job),
        depth_cap: job.spec.precision.depth_cap,
        parallel: true,
    }
}

struct Clock(BTreeMap<String, f64>);

impl Clock {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }
}

/// Generic direction for the job's seed, avoiding the tangent directions of
/// the discriminant.
pub fn job_generic_direction(delta: &MPoly, seed: u64) -> Result<(Rational, Rational), DecideError> {
    let bad = if delta.constant_term() == Rational::from_integer(0.into()) {
        initial_form(delta)?
    } else {
        MPoly::one(&["x", "y"])
    };
    generic_directions(&bad, seed, 1)
        .pop()
        .ok_or_else(|| DecideError::UnsupportedProjection("no generic direction found".into()))
}

fn run_generic(setup: &ProjectionSetup, delta: &MPoly, job: &Job) -> Result<GenericReport, DecideError> {
    let opts = section_options(job);
    let dir = job_generic_direction(delta, job.spec.seed)?;
    let g = generic_monodromy(&setup.adapted, delta, (&dir.0, &dir.1), setup.sheets(), &opts.track)?;
    let t = MPoly::var("t", &["t"]);
    let arc = Arc::exact(
        &t.scale(&dir.0),
        &t.scale(&dir.1),
        ArcProvenance::Generic {
            direction: g.direction.clone(),
        },
    )?;
    let section = arc_section(setup, delta, &arc, &opts)?;
    Ok(GenericReport {
        direction: g.direction,
        radius: g.radius,
        permutation: g.permutation.cycle_notation(),
        cycle_type: g.cycle_type,
        certificate: g.certificate,
        braid: g.braid.map(|b| b.to_text()),
        section: Some(section),
    })
}

fn run_reduce_witness(setup: &ProjectionSetup, delta: &MPoly, job: &Job) -> Result<WitnessReport, DecideError> {
    let opts = section_options(job);
    let dir = job_generic_direction(delta, job.spec.seed)?;
    let g = generic_monodromy(&setup.adapted, delta, (&dir.0, &dir.1), setup.sheets(), &opts.track)?;
    totally_reducible_arc(setup, delta, (&dir.0, &dir.1), &g.permutation, &opts)
}

/// Run every requested task.  Output assembly is sequential and ordered by
/// task; crossings inside `analyze` may be tracked concurrently.
pub fn run(job: &Job) -> Report {
    let mut r = Report::empty(job.spec.clone());
    let mut clock = Clock(BTreeMap::new());
    let tasks = &job.tasks;

    if tasks.contains(&Task::TangentCone) {
        match clock.time("tangent-cone", || tangent_cone_screen(&job.surface)) {
            Ok(c) => r.tangent_cone = Some(c),
            Err(e) => r.errors.push(ErrorEntry::from_decide("tangent-cone", &e)),
        }
    }
    let needs_setup = tasks.iter().any(|t| *t != Task::TangentCone);
    if !needs_setup {
        r.timings = clock.0;
        r.finish();
        return r;
    }
    let setup = match clock.time("setup", || setup_projection(&job.surface, &job.direction)) {
        Ok(s) => s,
        Err(e) => {
            r.errors.push(ErrorEntry::from_decide("setup", &e));
            r.timings = clock.0;
            r.finish();
            return r;
        }
    };
    r.setup = Some(SetupSummary {
        direction: direction_text(&job.direction),
        adapted: setup.adapted.clone(),
        d: setup.d,
        m: setup.m,
        transverse: setup.transverse,
        degree_z: setup.degree_z,
    });
    let delta = match clock.time("discriminant", || setup.discriminant()) {
        Ok(d) => d,
        Err(e) => {
            r.errors.push(ErrorEntry::from_decide("discriminant", &e));
            r.timings = clock.0;
            r.finish();
            return r;
        }
    };
    r.discriminant = Some(delta.clone());

    if tasks.contains(&Task::Analyze) {
        match clock.time("analyze", || analyze(&setup, &analyze_options(job))) {
            Ok(a) => {
                for e in &a.verdict.errors {
                    r.errors.push(ErrorEntry::new(
                        if a.verdict.exists_irreducible == Existence::Unknown {
                            "certification"
                        } else {
                            "diagnostic"
                        },
                        "analyze",
                        e.clone(),
                    ));
                }
                r.tree = a.tree;
                r.crossings = a.verdict.crossings;
                r.witnesses = a.verdict.witnesses;
                r.totally_reducible_witness = a.verdict.totally_reducible_witness;
                if job.spec.prune {
                    r.branch_screens = Some(a.branch_screens);
                }
                r.verdict = Some(VerdictSummary {
                    exists_irreducible: a.verdict.exists_irreducible,
                    notes: a.verdict.notes,
                });
            }
            Err(e) => {
                r.errors.push(ErrorEntry::from_decide("analyze", &e));
                r.verdict = Some(VerdictSummary {
                    exists_irreducible: Existence::Unknown,
                    notes: Vec::new(),
                });
            }
        }
    }
    if tasks.contains(&Task::Generic) {
        match clock.time("generic", || run_generic(&setup, &delta, job)) {
            Ok(g) => r.generic = Some(g),
            Err(e) => r.errors.push(ErrorEntry::from_decide("generic", &e)),
        }
    }
    if tasks.contains(&Task::Section) {
        let (x, y) = job.arc.as_ref().expect("validated job has an arc");
        let out = clock.time("section", || {
            let arc = Arc::exact(x, y, ArcProvenance::User)?;
            let rep = arc_section(&setup, &delta, &arc, &section_options(job))?;
            Ok::<_, DecideError>(UserSection { arc: arc.text(), report: rep })
        });
        match out {
            Ok(s) => r.section = Some(s),
            Err(e) => r.errors.push(ErrorEntry::from_decide("section", &e)),
        }
    }
    if tasks.contains(&Task::ReduceWitness) && r.totally_reducible_witness.is_none() {
        match clock.time("reduce-witness", || run_reduce_witness(&setup, &delta, job)) {
            Ok(w) => r.totally_reducible_witness = Some(w),
            Err(e) => r.errors.push(ErrorEntry::from_decide("reduce-witness", &e)),
        }
    }
    if tasks.contains(&Task::ConeDiscriminant) {
        match clock.time("cone-discriminant", || cone_discriminant_check(&setup, &delta)) {
            Ok(c) => r.cone_discriminant = Some(c),
            Err(e) => r.errors.push(ErrorEntry::from_decide("cone-discriminant", &e)),
        }
    }
    if tasks.contains(&Task::ScreenBranches) {
        if r.tree.is_none() {
            let opts = ResolveOptions {
                depth_cap: job.spec.precision.depth_cap,
            };
            match clock.time("resolve", || resolve_embedded_with(&delta, opts)) {
                Ok(t) => r.tree = Some(t),
                Err(e) => r
                    .errors
                    .push(ErrorEntry::from_decide("screen-branches", &DecideError::Resolve(e))),
            }
        }
        if let Some(tree) = &r.tree {
            let screens = clock.time("screen-branches", || {
                screen_discriminant_branches(&setup, &delta, tree, &section_options(job))
            });
            r.branch_screens = Some(screens);
        }
    }
    r.timings = clock.0;
    r.finish();
    r
}

/// Parse, validate and run a job given as JSON text.
pub fn run_json(text: &str) -> Report {
    let spec = match JobSpec::from_json(text) {
        Ok(s) => s,
        Err(e) => return Report::invalid(None, &e),
    };
    run_spec(spec)
}

/// Validate and run a parsed job.
pub fn run_spec(spec: JobSpec) -> Report {
    match spec.validate() {
        Ok(job) => run(&job),
        Err(e) => Report::invalid(Some(spec), &e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_json_exits_with_two() {
        let r = run_json("{not json");
        assert_eq!(r.exit_code, EXIT_INVALID_INPUT);
        assert_eq!(r.errors[0].code, "invalid_input");
    }

    #[test]
    fn surface_off_the_origin_is_invalid_input() {
        let r = run_json(r#"{"surface":"z^2-x+1","projection":"z","tasks":["generic"]}"#);
        assert_eq!(r.exit_code, EXIT_INVALID_INPUT);
        assert_eq!(r.errors[0].task, "setup");
    }

    #[test]
    fn tangent_cone_alone_needs_no_projection_setup() {
        let r = run_json(r#"{"surface":"x*z+y","projection":"z","tasks":["tangent-cone"]}"#);
        assert_eq!(r.exit_code, EXIT_OK, "{:?}", r.errors);
        assert!(r.tangent_cone.is_some() && r.setup.is_none());
    }

    #[test]
    fn generic_task_on_a_suspension() {
        let r = run_json(r#"{"surface":"z^2-x^3-y^3","projection":"z","tasks":["generic","reduce-witness"]}"#);
        assert_eq!(r.exit_code, EXIT_OK, "{:?}", r.errors);
        let g = r.generic.unwrap();
        assert_eq!(g.cycle_type, vec![2]);
        assert!(g.section.unwrap().irreducible);
        assert_eq!(r.totally_reducible_witness.unwrap().section.branch_count, 2);
    }
}
