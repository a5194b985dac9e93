//! Monodromy at normal crossings of a resolved discriminant, transversal
//! monodromy of its components, and monodromy of generic linear arcs.

use super::{
    certify_avoids, compose_univariate, ctrim, half_min_root_modulus, to_cupoly, track_loop_full,
    BraidWord, LoopSpec, MonodromyError, TrackOptions, TrackingCertificate,
};
use crate::group::Permutation;
use crate::polyarith::{fmt_rat, rat_to_f64, MPoly, Rational};
use crate::resolve::{Chart, DivisorKind, NormalCrossing, ResolutionTree};
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Monodromy of the two boundary loops at a crossing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingMonodromy {
    pub crossing: usize,
    /// Around `branches[0]` (boundary of `D1`).
    pub p1: Permutation,
    /// Around `branches[1]` (boundary of `D2`).
    pub p2: Permutation,
    pub commute: bool,
    pub certificates: [TrackingCertificate; 2],
    pub loops: [String; 2],
    /// Smallest distance between a loop and the discriminant.
    pub avoidance_margin: f64,
    pub braids: Option<[BraidWord; 2]>,
}

/// Restrict `F` (in `x, y, z`) to `sheets` when `deg_z F` exceeds the
/// covering degree `d`.
pub fn sheets_for(f: &MPoly, d: u32) -> Option<usize> {
    (f.degree_in("z") > d).then_some(d as usize)
}

fn chart_to_t(p: &MPoly, x: &MPoly, y: &MPoly) -> MPoly {
    let mut m = BTreeMap::new();
    m.insert("x".to_string(), x.clone());
    m.insert("y".to_string(), y.clone());
    p.substitute(&m).with_vars(&["t"])
}

/// The base-plane arcs of the loops `∂D1` and `∂D2` of a crossing.
pub fn crossing_loops(chart: &Chart, c: &NormalCrossing, sheets: Option<usize>) -> [LoopSpec; 2] {
    let (r1f, r2f) = c.radii_f64();
    let desc1 = format!(
        "chart {}: x = {}, |y - {}| = {}",
        chart.id,
        fmt_rat(&c.disk_radii[0]),
        c.point[1],
        fmt_rat(&c.disk_radii[1])
    );
    let desc2 = format!(
        "chart {}: y = {}, |x| = {}",
        chart.id,
        c.basepoint[1],
        fmt_rat(&c.disk_radii[0])
    );
    match &c.point_exact {
        Some((_, yp)) => {
            let t = MPoly::var("t", &["t"]);
            let k = |q: &Rational| MPoly::constant(q.clone(), &["t"]);
            let r1 = k(&c.disk_radii[0]);
            let y1 = &k(yp) + &t;
            let y2 = k(&(yp + &c.disk_radii[1]));
            let mut l1 = LoopSpec::from_arc(
                &chart_to_t(&chart.map_to_base[0], &r1, &y1),
                &chart_to_t(&chart.map_to_base[1], &r1, &y1),
                r2f,
                sheets,
            );
            let mut l2 = LoopSpec::from_arc(
                &chart_to_t(&chart.map_to_base[0], &t, &y2),
                &chart_to_t(&chart.map_to_base[1], &t, &y2),
                r1f,
                sheets,
            );
            l1.description = desc1;
            l2.description = desc2;
            [l1, l2]
        }
        None => {
            let vp = c.point_value[1];
            let one = Complex64::new(1.0, 0.0);
            let r1 = vec![Complex64::new(r1f, 0.0)];
            let y1 = vec![vp, one];
            let y2 = vec![vp + r2f];
            let t = vec![Complex64::zero(), one];
            let m = |p: &MPoly, x: &[Complex64], y: &[Complex64]| {
                ctrim(compose_univariate(p, &[("x", x.to_vec()), ("y", y.to_vec())]))
            };
            let o = Complex64::zero();
            [
                LoopSpec::from_complex(
                    m(&chart.map_to_base[0], &r1, &y1),
                    m(&chart.map_to_base[1], &r1, &y1),
                    o,
                    r2f,
                    sheets,
                    desc1,
                ),
                LoopSpec::from_complex(
                    m(&chart.map_to_base[0], &t, &y2),
                    m(&chart.map_to_base[1], &t, &y2),
                    o,
                    r1f,
                    sheets,
                    desc2,
                ),
            ]
        }
    }
}

/// Permutations `(P1, P2)` of `F` along the two boundary loops of a crossing,
/// labelled in the common fiber over the basepoint `q`.
pub fn crossing_monodromies(
    f: &MPoly,
    tree: &ResolutionTree,
    crossing: &NormalCrossing,
    sheets: Option<usize>,
    opts: &TrackOptions,
) -> Result<CrossingMonodromy, MonodromyError> {
    let chart = tree
        .chart(&crossing.chart)
        .ok_or_else(|| MonodromyError::Certification(format!("unknown chart {}", crossing.chart)))?;
    let loops = crossing_loops(chart, crossing, sheets);
    let mut margin = f64::INFINITY;
    for lp in &loops {
        margin = margin.min(certify_avoids(&tree.curve, lp)?);
    }
    let o1 = track_loop_full(f, &loops[0], opts)?;
    let o2 = track_loop_full(f, &loops[1], opts)?;
    let commute = o1.permutation.commutes_with(&o2.permutation);
    let braids = match (o1.braid, o2.braid) {
        (Some(a), Some(b)) => Some([a, b]),
        _ => None,
    };
    Ok(CrossingMonodromy {
        crossing: crossing.id,
        p1: o1.permutation,
        p2: o2.permutation,
        commute,
        certificates: [o1.certificate, o2.certificate],
        loops: [loops[0].description.clone(), loops[1].description.clone()],
        avoidance_margin: margin,
        braids,
    })
}

/// Transversal monodromy of a component of the total transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransversalMonodromy {
    pub divisor: String,
    pub permutation: Permutation,
    pub cycle_type: Vec<usize>,
    pub loop_description: String,
    pub certificate: TrackingCertificate,
}

/// Generic rational points used to place transverse disks.
const POSITIONS: [(i64, i64); 6] = [(1, 3), (-2, 5), (3, 7), (-4, 9), (5, 11), (-6, 13)];

/// Monodromy around a small disk transverse to the divisor `label` at a
/// smooth point; `position` selects one of several points on it.
pub fn transversal_monodromy(
    f: &MPoly,
    tree: &ResolutionTree,
    label: &str,
    position: usize,
    sheets: Option<usize>,
    opts: &TrackOptions,
) -> Result<TransversalMonodromy, MonodromyError> {
    let fail = |m: String| MonodromyError::Certification(m);
    // Exceptional divisor: the `·u` chart of its blowup has it as {x = 0}.
    if let Some(edge) = tree.edges.iter().find(|e| e.exceptional == label) {
        let chart = tree.chart(&edge.children[0]).expect("child chart");
        let s0 = chart.strict.eval_var("x", &Rational::zero());
        let mut found = None;
        for (k, &(n, d)) in POSITIONS.iter().enumerate().skip(position) {
            let c = Rational::new(n.into(), d.into());
            if !s0.eval_var("y", &c).constant_term().is_zero() {
                found = Some((k, c));
                break;
            }
        }
        let (_, c) = found.ok_or_else(|| fail(format!("no generic point on {label}")))?;
        // radius: keep the strict transform out of |x| ≤ r on y = c
        let sx = chart.strict.eval_var("y", &c).with_vars(&["x"]);
        let q = if sx.is_zero() { vec![] } else { to_cupoly(&sx, "x") };
        let r = half_min_root_modulus(&q, 0.0)?.unwrap_or(0.5).min(0.5);
        let t = MPoly::var("t", &["t"]);
        let yc = MPoly::constant(c.clone(), &["t"]);
        let mut lp = LoopSpec::from_arc(
            &chart_to_t(&chart.map_to_base[0], &t, &yc),
            &chart_to_t(&chart.map_to_base[1], &t, &yc),
            r,
            sheets,
        );
        lp.description = format!("chart {}: y = {}, |x| = {r}", chart.id, fmt_rat(&c));
        certify_avoids(&tree.curve, &lp)?;
        let o = track_loop_full(f, &lp, opts)?;
        return Ok(TransversalMonodromy {
            divisor: label.to_string(),
            cycle_type: o.permutation.cycle_type(),
            permutation: o.permutation,
            loop_description: lp.description,
            certificate: o.certificate,
        });
    }
    // Strict branch or labelled axis: use the loop of a crossing on it,
    // shrunk along the branch for further positions.
    for c in &tree.crossings {
        let Some(which) = c.branches.iter().position(|b| b.label == label) else {
            continue;
        };
        let chart = tree.chart(&c.chart).expect("crossing chart");
        let mut cc = c.clone();
        let shrink = Rational::new(1.into(), (1i64 << position).into());
        // Moving along the branch = shrinking the radius of the other disk.
        cc.disk_radii[1 - which] = &cc.disk_radii[1 - which] * &shrink;
        let loops = crossing_loops(chart, &cc, sheets);
        let lp = &loops[which];
        certify_avoids(&tree.curve, lp)?;
        let o = track_loop_full(f, lp, opts)?;
        return Ok(TransversalMonodromy {
            divisor: label.to_string(),
            cycle_type: o.permutation.cycle_type(),
            permutation: o.permutation,
            loop_description: lp.description.clone(),
            certificate: o.certificate,
        });
    }
    Err(fail(format!("no divisor labelled {label}")))
}

/// Monodromy of the generic linear arc `t ↦ (a·t, b·t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericMonodromy {
    pub direction: [String; 2],
    pub radius: f64,
    pub permutation: Permutation,
    pub cycle_type: Vec<usize>,
    pub certificate: TrackingCertificate,
    pub braid: Option<BraidWord>,
}

/// Radius for a loop of the arc `(x(t), y(t))`: half the smallest nonzero
/// root modulus of `Δ(x(t), y(t))`, at most `1/2`.
pub fn arc_loop_radius(delta: &MPoly, x: &MPoly, y: &MPoly) -> Result<f64, MonodromyError> {
    let q = chart_to_t(delta, x, y);
    if q.is_zero() {
        return Err(MonodromyError::LoopTouchesDelta(
            "the arc lies inside the discriminant".into(),
        ));
    }
    let q = q.div_monomial(&q.monomial_content());
    Ok(half_min_root_modulus(&to_cupoly(&q, "t"), 0.0)?
        .unwrap_or(0.5)
        .min(0.5))
}

/// Permutation monodromy of `F` along `|t| = r` for an exact arc, halving
/// the radius while the covering sheets are not separated.
pub fn arc_monodromy(
    f: &MPoly,
    delta: &MPoly,
    x: &MPoly,
    y: &MPoly,
    sheets: Option<usize>,
    opts: &TrackOptions,
) -> Result<(LoopSpec, super::TrackOutcome), MonodromyError> {
    let mut r = arc_loop_radius(delta, x, y)?;
    let mut last = None;
    for _ in 0..30 {
        let lp = LoopSpec::from_arc(x, y, r, sheets);
        certify_avoids(delta, &lp)?;
        match track_loop_full(f, &lp, opts) {
            Ok(o) => return Ok((lp, o)),
            Err(e @ MonodromyError::FiberDegenerate(_)) => {
                last = Some(e);
                r /= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Monodromy of the arc `(a·t, b·t)`; the direction must avoid the tangent
/// directions of the discriminant.
pub fn generic_monodromy(
    f: &MPoly,
    delta: &MPoly,
    direction: (&Rational, &Rational),
    sheets: Option<usize>,
    opts: &TrackOptions,
) -> Result<GenericMonodromy, MonodromyError> {
    let t = MPoly::var("t", &["t"]);
    let x = t.scale(direction.0);
    let y = t.scale(direction.1);
    let (lp, o) = arc_monodromy(f, delta, &x, &y, sheets, opts)?;
    Ok(GenericMonodromy {
        direction: [fmt_rat(direction.0), fmt_rat(direction.1)],
        radius: lp.radius,
        cycle_type: o.permutation.cycle_type(),
        permutation: o.permutation,
        certificate: o.certificate,
        braid: o.braid,
    })
}

/// Whether a crossing branch is an exceptional divisor.
pub fn is_exceptional(c: &NormalCrossing, which: usize) -> bool {
    c.branches[which].kind == DivisorKind::Exceptional
}

/// Numeric value of a rational (re-exported convenience for reports).
pub fn value(q: &Rational) -> f64 {
    rat_to_f64(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::{discriminant_z, parse_poly, rat};
    use crate::resolve::resolve_embedded;

    fn f71() -> MPoly {
        parse_poly("z^4 - 4*x*z + 3*y^2", &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn crossings_of_the_quartic_example() {
        let f = f71();
        let delta = discriminant_z(&f, "z").unwrap();
        let tree = resolve_embedded(&delta).unwrap();
        let opts = TrackOptions::default();
        let mut others = Vec::new();
        for c in &tree.crossings {
            let m = crossing_monodromies(&f, &tree, c, None, &opts).unwrap();
            assert!(m.commute);
            // E3 is the divisor common to all four crossings; its loop is trivial.
            let e3 = c.branches.iter().position(|b| b.label == "E3").unwrap();
            let (pe, po) = if e3 == 0 { (&m.p1, &m.p2) } else { (&m.p2, &m.p1) };
            assert!(pe.is_identity());
            others.push(po.cycle_type());
        }
        others.sort();
        assert_eq!(others, vec![vec![2, 1, 1], vec![2, 1, 1], vec![2, 2], vec![3, 1]]);
    }

    #[test]
    fn featured_loops_match_fiber_families() {
        let f = f71();
        let delta = discriminant_z(&f, "z").unwrap();
        let tree = resolve_embedded(&delta).unwrap();
        let c = tree.crossings.iter().find(|c| c.chart == "R·v·u·v").unwrap();
        let loops = crossing_loops(tree.chart(&c.chart).unwrap(), c, None);
        let fam = |lp: &LoopSpec| {
            let (x, y) = lp.exact.clone().unwrap();
            let mut m = BTreeMap::new();
            m.insert("x".to_string(), x);
            m.insert("y".to_string(), y);
            f.substitute(&m).with_vars(&["t", "z"])
        };
        // D1: x = 1/2, y = t (|t| = 1/2): rescaled by t -> t/2 in the text form.
        let g1 = fam(&loops[0]);
        let g2 = fam(&loops[1]);
        let tz = ["t", "z"];
        let s = |src: &str| parse_poly(src, &tz).unwrap();
        let half = |g: &MPoly| {
            let mut m = BTreeMap::new();
            m.insert("t".to_string(), s("t/2"));
            g.substitute(&m).with_vars(&tz)
        };
        assert_eq!(half(&g1), s("z^4 - 1/8*t^3*z + 3/64*t^4"));
        assert_eq!(half(&g2), s("z^4 - 1/8*t^2*z + 3/64*t^2"));
    }

    #[test]
    fn transversal_cycle_types_agree_across_positions() {
        let f = f71();
        let delta = discriminant_z(&f, "z").unwrap();
        let tree = resolve_embedded(&delta).unwrap();
        let opts = TrackOptions::default();
        for label in ["E1", "E2", "E3", "Δ1"] {
            let a = transversal_monodromy(&f, &tree, label, 0, None, &opts).unwrap();
            let b = transversal_monodromy(&f, &tree, label, 1, None, &opts).unwrap();
            assert_eq!(a.cycle_type, b.cycle_type, "{label}");
        }
        let e2 = transversal_monodromy(&f, &tree, "E2", 0, None, &opts).unwrap();
        assert_eq!(e2.cycle_type, vec![2, 2]);
    }

    #[test]
    fn generic_arcs() {
        let f = parse_poly("z^3 - (x - y)*(x + y)*(x - 2*y)*(x + 2*y)", &["x", "y", "z"]).unwrap();
        let delta = discriminant_z(&f, "z").unwrap();
        let g = generic_monodromy(&f, &delta, (&rat(0), &rat(1)), None, &TrackOptions::default()).unwrap();
        assert_eq!(g.cycle_type, vec![3]);
        let f = parse_poly("z^2 - x", &["x", "y", "z"]).unwrap();
        let delta = discriminant_z(&f, "z").unwrap();
        let g = generic_monodromy(&f, &delta, (&rat(1), &rat(0)), None, &TrackOptions::default()).unwrap();
        assert_eq!(g.cycle_type, vec![2]);
    }

    #[test]
    fn axis_crossing_of_square_root() {
        // Δ of z^2 - x is {x = 0}, a component of the resolved curve x*y.
        let f = parse_poly("z^2 - x", &["x", "y", "z"]).unwrap();
        let tree = resolve_embedded(&parse_poly("x*y", &["x", "y"]).unwrap()).unwrap();
        let c = &tree.crossings[0];
        let m = crossing_monodromies(&f, &tree, c, None, &TrackOptions::default()).unwrap();
        assert!(m.p1.is_identity());
        assert_eq!(m.p2.cycle_type(), vec![2]);
    }
}
