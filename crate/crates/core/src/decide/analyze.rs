//! The crossing-by-crossing decision procedure.

use super::section::{arc_section, direction_text, linear_arc, Arc, ArcPath, ArcProvenance, SectionOptions};
use super::witness::{
    branch_arc_at_crossing, crossing_exponent_candidates, totally_reducible_arc, witness_irreducible_arc,
    BranchScreen, WitnessReport,
};
use super::{generic_directions, DecideError, ProjectionSetup};
use crate::group::{generated_group, Permutation};
use crate::monodromy::crossing::{crossing_monodromies, generic_monodromy, GenericMonodromy};
use crate::monodromy::TrackingCertificate;
use crate::polyarith::{fmt_rat, initial_form, MPoly};
use crate::resolve::{resolve_embedded_with, DivisorKind, NormalCrossing, ResolutionTree, ResolveOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Options for [`analyze`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyzeOptions {
    /// Skip crossings on discriminant branches whose own section is
    /// reducible (such crossings cannot yield irreducible sections).
    pub prune: bool,
    pub seed: u64,
    pub section: SectionOptions,
    pub depth_cap: u32,
    /// Track crossings on the rayon pool.
    pub parallel: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            prune: true,
            seed: 0,
            section: SectionOptions::default(),
            depth_cap: ResolveOptions::default().depth_cap,
            parallel: true,
        }
    }
}

/// Answer to the existence question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Existence {
    Yes,
    No,
    Unknown,
}

/// What happened at one crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingStatus {
    Tracked,
    Pruned,
    Failed,
}

/// Monodromy data at one crossing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub id: usize,
    pub chart: String,
    pub point: [String; 2],
    pub branches: [String; 2],
    pub branch_kinds: [DivisorKind; 2],
    pub multiplicities: [u32; 2],
    pub radii: [String; 2],
    pub basepoint: [String; 2],
    pub status: CrossingStatus,
    /// Cycle notation, 1-based.
    pub p1: Option<String>,
    pub p2: Option<String>,
    pub cycle_types: Option<[Vec<usize>; 2]>,
    pub commute: Option<bool>,
    pub group_order: Option<usize>,
    pub has_transitive: Option<bool>,
    pub cycle_type_census: Option<BTreeMap<String, usize>>,
    pub loops: Option<[String; 2]>,
    pub certificates: Vec<TrackingCertificate>,
    pub avoidance_margin: Option<f64>,
    pub braids: Option<[String; 2]>,
    pub pruned_by: Option<String>,
    pub error: Option<String>,
    #[serde(skip)]
    pub permutations: Option<(Permutation, Permutation)>,
}

/// Outcome of [`analyze`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub exists_irreducible: Existence,
    pub witnesses: Vec<WitnessReport>,
    pub crossings: Vec<CrossingReport>,
    pub generic: Option<GenericMonodromy>,
    pub totally_reducible_witness: Option<WitnessReport>,
    pub notes: Vec<String>,
    pub errors: Vec<String>,
}

/// Everything computed by [`analyze`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub discriminant: MPoly,
    pub tree: Option<ResolutionTree>,
    pub branch_screens: Vec<BranchScreen>,
    pub verdict: Verdict,
}

fn base_report(c: &NormalCrossing, status: CrossingStatus) -> CrossingReport {
    CrossingReport {
        id: c.id,
        chart: c.chart.clone(),
        point: c.point.clone(),
        branches: [c.branches[0].label.clone(), c.branches[1].label.clone()],
        branch_kinds: [c.branches[0].kind, c.branches[1].kind],
        multiplicities: [c.branches[0].multiplicity, c.branches[1].multiplicity],
        radii: [fmt_rat(&c.disk_radii[0]), fmt_rat(&c.disk_radii[1])],
        basepoint: c.basepoint.clone(),
        status,
        p1: None,
        p2: None,
        cycle_types: None,
        commute: None,
        group_order: None,
        has_transitive: None,
        cycle_type_census: None,
        loops: None,
        certificates: Vec::new(),
        avoidance_margin: None,
        braids: None,
        pruned_by: None,
        error: None,
        permutations: None,
    }
}

fn track_crossing(setup: &ProjectionSetup, tree: &ResolutionTree, c: &NormalCrossing, opts: &AnalyzeOptions) -> CrossingReport {
    let mut rep = base_report(c, CrossingStatus::Tracked);
    let m = match crossing_monodromies(&setup.adapted, tree, c, setup.sheets(), &opts.section.track) {
        Ok(m) => m,
        Err(e) => {
            rep.status = CrossingStatus::Failed;
            rep.error = Some(e.to_string());
            return rep;
        }
    };
    rep.p1 = Some(m.p1.cycle_notation());
    rep.p2 = Some(m.p2.cycle_notation());
    rep.cycle_types = Some([m.p1.cycle_type(), m.p2.cycle_type()]);
    rep.commute = Some(m.commute);
    rep.loops = Some(m.loops.clone());
    rep.certificates = m.certificates.to_vec();
    rep.avoidance_margin = Some(m.avoidance_margin);
    rep.braids = m.braids.as_ref().map(|b| [b[0].to_text(), b[1].to_text()]);
    match generated_group(&m.p1, &m.p2) {
        Ok(g) => {
            rep.group_order = Some(g.order);
            rep.has_transitive = Some(g.has_transitive);
            rep.cycle_type_census = Some(g.cycle_type_census);
        }
        Err(e) => {
            rep.status = CrossingStatus::Failed;
            rep.error = Some(e.to_string());
        }
    }
    rep.permutations = Some((m.p1, m.p2));
    rep
}

/// Labels of strict discriminant branches whose exact parametrization has a
/// reducible reduced section.
fn prunable_branches(
    setup: &ProjectionSetup,
    delta: &MPoly,
    tree: &ResolutionTree,
    opts: &SectionOptions,
) -> Vec<BranchScreen> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for c in &tree.crossings {
        for (i, b) in c.branches.iter().enumerate() {
            if b.kind != DivisorKind::Strict || !seen.insert(b.label.clone()) {
                continue;
            }
            let Some(arc) = branch_arc_at_crossing(tree, c, i, 16) else {
                continue;
            };
            if !matches!(arc.path, ArcPath::Exact { .. }) {
                continue;
            }
            let (section, error) = match arc_section(setup, delta, &arc, opts) {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            out.push(BranchScreen {
                label: b.label.clone(),
                arc_text: arc.text(),
                exact: true,
                prunable: section.as_ref().map(|s| !s.irreducible).unwrap_or(false),
                section,
                error,
            });
        }
    }
    out
}

fn generic_witness(
    setup: &ProjectionSetup,
    delta: &MPoly,
    g: &GenericMonodromy,
    dir: &(crate::polyarith::Rational, crate::polyarith::Rational),
    opts: &SectionOptions,
) -> Result<WitnessReport, DecideError> {
    let (x, y) = linear_arc(&dir.0, &dir.1);
    let arc = Arc::exact(
        &x,
        &y,
        ArcProvenance::Generic {
            direction: direction_text(&dir.0, &dir.1),
        },
    )?;
    let section = arc_section(setup, delta, &arc, opts)?;
    if !section.irreducible {
        return Err(DecideError::ValidationFailed(format!(
            "generic arc with a {}-cycle has a section with {} branches",
            setup.d, section.branch_count
        )));
    }
    Ok(WitnessReport {
        arc_text: arc.text(),
        arc: Arc {
            valid_radius: crate::polyarith::rat_from_f64(section.radius),
            ..arc
        },
        section,
        crossing: None,
        exponents: None,
        element: Some(g.permutation.cycle_notation()),
    })
}

/// Decide whether the projection admits an irreducible arc-section.
pub fn analyze(setup: &ProjectionSetup, opts: &AnalyzeOptions) -> Result<Analysis, DecideError> {
    let delta = setup.discriminant()?;
    let d = setup.d as usize;
    let mut verdict = Verdict {
        exists_irreducible: Existence::Unknown,
        witnesses: Vec::new(),
        crossings: Vec::new(),
        generic: None,
        totally_reducible_witness: None,
        notes: Vec::new(),
        errors: Vec::new(),
    };
    let through_origin = delta.constant_term() == num_traits::Zero::zero();
    let bad = if through_origin {
        initial_form(&delta)?
    } else {
        MPoly::one(&["x", "y"])
    };
    let dir = generic_directions(&bad, opts.seed, 1)
        .pop()
        .ok_or_else(|| DecideError::UnsupportedProjection("no generic direction found".into()))?;
    let mut generic_cycle = false;
    match generic_monodromy(&setup.adapted, &delta, (&dir.0, &dir.1), setup.sheets(), &opts.section.track) {
        Ok(g) => {
            match totally_reducible_arc(setup, &delta, (&dir.0, &dir.1), &g.permutation, &opts.section) {
                Ok(w) => verdict.totally_reducible_witness = Some(w),
                Err(e) => verdict.errors.push(format!("totally reducible arc: {e}")),
            }
            if g.cycle_type == vec![d] {
                match generic_witness(setup, &delta, &g, &dir, &opts.section) {
                    Ok(w) => {
                        verdict.witnesses.push(w);
                        verdict.exists_irreducible = Existence::Yes;
                        generic_cycle = true;
                        verdict.notes.push(format!(
                            "the generic arc ({}·t, {}·t) already has an irreducible section",
                            fmt_rat(&dir.0),
                            fmt_rat(&dir.1)
                        ));
                    }
                    Err(e) => verdict.errors.push(format!("generic witness: {e}")),
                }
            }
            verdict.generic = Some(g);
        }
        Err(e) => verdict.errors.push(format!("generic monodromy: {e}")),
    }
    let tree = match resolve_embedded_with(&delta, ResolveOptions { depth_cap: opts.depth_cap }) {
        Ok(t) => t,
        Err(e) => {
            verdict.errors.push(format!("resolution: {e}"));
            return Ok(Analysis {
                discriminant: delta,
                tree: None,
                branch_screens: Vec::new(),
                verdict,
            });
        }
    };
    if generic_cycle {
        return Ok(Analysis {
            discriminant: delta,
            tree: Some(tree),
            branch_screens: Vec::new(),
            verdict,
        });
    }
    let screens = if opts.prune {
        prunable_branches(setup, &delta, &tree, &opts.section)
    } else {
        Vec::new()
    };
    let pruned: BTreeSet<String> = screens.iter().filter(|s| s.prunable).map(|s| s.label.clone()).collect();
    let work = |c: &NormalCrossing| {
        if let Some(b) = c.branches.iter().find(|b| pruned.contains(&b.label)) {
            let mut r = base_report(c, CrossingStatus::Pruned);
            r.pruned_by = Some(b.label.clone());
            r
        } else {
            track_crossing(setup, &tree, c, opts)
        }
    };
    let mut reports: Vec<CrossingReport> = if opts.parallel {
        tree.crossings.par_iter().map(work).collect()
    } else {
        tree.crossings.iter().map(work).collect()
    };
    reports.sort_by_key(|r| r.id);
    if !pruned.is_empty() {
        let n = reports.iter().filter(|r| r.status == CrossingStatus::Pruned).count();
        verdict.notes.push(format!(
            "{n} crossing(s) skipped: the sections over discriminant branches {} are reducible",
            pruned.iter().cloned().collect::<Vec<_>>().join(", ")
        ));
    }
    for r in &reports {
        if let (Some(false), Some(_)) = (r.commute, &r.p1) {
            verdict.errors.push(format!("crossing {}: permutations do not commute", r.id));
        }
        if let Some(e) = &r.error {
            verdict.errors.push(format!("crossing {}: {e}", r.id));
        }
    }
    // Witness search: crossings by total multiplicity, first d-cycle wins.
    let mut order: Vec<&CrossingReport> = reports.iter().filter(|r| r.has_transitive == Some(true)).collect();
    order.sort_by_key(|r| (r.multiplicities[0] + r.multiplicities[1], r.id));
    'search: for r in order {
        let c = tree.crossings.iter().find(|c| c.id == r.id).expect("crossing");
        let chart = tree.chart(&c.chart).expect("chart");
        let (p1, p2) = r.permutations.clone().expect("tracked");
        for (a, b) in crossing_exponent_candidates(chart, c, &p1, &p2).into_iter().take(3) {
            let e = p1.pow(a as u64).then(&p2.pow(b as u64));
            match witness_irreducible_arc(setup, &delta, &tree, c, (a, b), &e, opts.seed, &opts.section) {
                Ok(w) => {
                    verdict.witnesses.push(w);
                    break 'search;
                }
                Err(e) => verdict.errors.push(format!("crossing {}: {e}", c.id)),
            }
        }
    }
    let failed = reports.iter().any(|r| r.status == CrossingStatus::Failed) || verdict.generic.is_none();
    verdict.exists_irreducible = if !verdict.witnesses.is_empty() {
        Existence::Yes
    } else if failed || reports.iter().any(|r| r.has_transitive == Some(true)) {
        Existence::Unknown
    } else {
        Existence::No
    };
    if let Some(w) = verdict.witnesses.first() {
        let (a, b) = w.arc.tangent_direction();
        let v = bad.eval_complex(&[a, b]).norm();
        let scale = a.norm().max(b.norm()).powi(bad.total_degree() as i32).max(1e-300);
        verdict.notes.push(format!(
            "witness tangent direction is {}a tangent direction of the discriminant",
            if v <= 1e-9 * scale { "" } else { "not " }
        ));
    }
    verdict.crossings = reports;
    Ok(Analysis {
        discriminant: delta,
        tree: Some(tree),
        branch_screens: screens,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{axis_direction, setup_projection, XYZ};
    use crate::polyarith::parse_poly;

    fn run(s: &str, prune: bool) -> Analysis {
        let f = parse_poly(s, &XYZ).unwrap();
        let st = setup_projection(&f, &axis_direction("z").unwrap()).unwrap();
        analyze(
            &st,
            &AnalyzeOptions {
                prune,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn quartic_example_has_no_irreducible_section() {
        let a = run("z^4 - 4*x*z + 3*y^2", false);
        let v = &a.verdict;
        assert_eq!(v.exists_irreducible, Existence::No, "{:?}", v.errors);
        assert_eq!(v.crossings.len(), 4);
        assert!(v.crossings.iter().all(|c| c.commute == Some(true)));
        let pruned = run("z^4 - 4*x*z + 3*y^2", true);
        assert_eq!(pruned.verdict.exists_irreducible, Existence::No);
        let n = pruned
            .verdict
            .crossings
            .iter()
            .filter(|c| c.status == CrossingStatus::Pruned)
            .count();
        assert_eq!(n, 2);
        let tr = v.totally_reducible_witness.as_ref().unwrap();
        assert_eq!(tr.section.branch_count, 4);
    }

    #[test]
    fn generic_cycle_answers_immediately() {
        let a = run("z^3 - (x - y)*(x + y)*(x - 2*y)*(x + 2*y)", true);
        assert_eq!(a.verdict.exists_irreducible, Existence::Yes);
        assert!(a.verdict.witnesses[0].section.irreducible);
        let a = run("z^2 - x^3 - y^3", true);
        assert_eq!(a.verdict.exists_irreducible, Existence::Yes);
    }

    #[test]
    fn crossing_witness_for_a_transposition_cover() {
        // z^2 = x y^2 ... use z^2 - x*(x - y^2): generic arcs split, a crossing
        // loop around the tangent branch gives the 2-cycle.
        let a = run("z^2 - x*(x - y^2)", true);
        let v = &a.verdict;
        assert_eq!(v.exists_irreducible, Existence::Yes, "{:?}", v.errors);
        let w = &v.witnesses[0];
        assert!(w.section.irreducible);
    }
}
