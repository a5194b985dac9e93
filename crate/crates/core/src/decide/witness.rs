//! Witness arcs: pushed-down monomial arcs at crossings of the resolved
//! discriminant, totally reducible arcs, and arcs along discriminant
//! branches.

use super::section::{arc_section, Arc, ArcPath, ArcProvenance, SectionOptions, SectionReport};
use super::{seeded_constant, DecideError, ProjectionSetup};
use crate::group::Permutation;
use crate::monodromy::{compose_univariate, CUPoly};
use crate::polyarith::{MPoly, Rational};
use crate::resolve::{
    branch_series, graph_root, BranchRole, BranchSeries, Chart, ChartKind, DivisorKind, Field, NormalCrossing,
    ResolutionTree,
};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A validated witness arc with its section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub arc: Arc,
    pub arc_text: [String; 2],
    pub section: SectionReport,
    pub crossing: Option<usize>,
    /// `(a, b)` with the arc winding `a` times around the first branch of
    /// the crossing and `b` times around the second.
    pub exponents: Option<[u32; 2]>,
    /// The permutation `P1^a P2^b` in cycle notation.
    pub element: Option<String>,
}

/// Exponent pairs `(a, b)` (small first) for which `P1^a P2^b` is a
/// `d`-cycle and the monomial arc with these orders passes through the
/// origin of the base.
pub fn crossing_exponent_candidates(
    chart: &Chart,
    crossing: &NormalCrossing,
    p1: &Permutation,
    p2: &Permutation,
) -> Vec<(u32, u32)> {
    let d = p1.degree();
    let exc = |i: usize| crossing.branches[i].kind == DivisorKind::Exceptional;
    let root = chart.kind == ChartKind::Base;
    let (o1, o2) = (p1.order() as u32, p2.order() as u32);
    let mut out = Vec::new();
    for a in 0..(2 * o1).max(2) {
        for b in 0..(2 * o2).max(2) {
            if a == 0 && b == 0 || num_integer::gcd(a, b) != 1 {
                continue;
            }
            if (a == 0 && (root || !exc(1))) || (b == 0 && (root || !exc(0))) {
                continue;
            }
            let e = p1.pow(a as u64).then(&p2.pow(b as u64));
            if e.cycle_type() == vec![d] {
                out.push((a, b));
            }
        }
    }
    out.sort_by_key(|&(a, b)| (a + b, a));
    out
}

// ---------------------------------------------------------- series helpers

fn mul_trunc<K: Field>(a: &[K], b: &[K], n: usize) -> Vec<K> {
    let mut out = vec![K::f_zero(); n];
    for (i, ai) in a.iter().enumerate().take(n) {
        if ai.f_is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n - i) {
            out[i + j] = out[i + j].add(&ai.mul(bj));
        }
    }
    out
}

/// `Σ φ_k u^k` truncated to degree `< n` (`u` of positive order or `φ`
/// constant).
fn compose_series<K: Field>(phi: &[K], u: &[K], n: usize) -> Vec<K> {
    let mut acc = vec![K::f_zero(); n];
    for c in phi.iter().rev() {
        acc = mul_trunc(&acc, u, n);
        acc[0] = acc[0].add(c);
    }
    acc
}

fn monomial<K: Field>(c: &K, e: u32, n: usize) -> Vec<K> {
    let mut v = vec![K::f_zero(); n];
    if (e as usize) < n {
        v[e as usize] = c.clone();
    }
    v
}

fn add<K: Field>(a: &[K], b: &[K]) -> Vec<K> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

/// Chart-coordinate arc `(x(s), y(s))` with `ord W = a`, `ord U = b`, where
/// `W = y - φ(x)` vanishes on the first branch and `U = x - h(y - y_p)` on
/// the second.
fn chart_arc<K: Field>(phi: &[K], h: &[K], yp: &K, cu: &K, cv: &K, a: u32, b: u32, n: usize) -> (Vec<K>, Vec<K>) {
    let mut x = monomial(cu, b, n);
    let mut y = vec![K::f_zero(); n];
    for _ in 0..=n {
        y = add(&compose_series(phi, &x, n), &monomial(cv, a, n));
        let mut w = y.clone();
        w[0] = w[0].sub(yp);
        x = add(&compose_series(h, &w, n), &monomial(cu, b, n));
    }
    (x, y)
}

/// The branch series as (possibly complex) coefficient vectors.
fn both_series(
    chart: &Chart,
    crossing: &NormalCrossing,
    n: usize,
) -> Option<(BranchSeries, BranchSeries)> {
    let s0 = branch_series(chart, crossing, 0, n)?;
    let s1 = branch_series(chart, crossing, 1, n)?;
    Some((s0, s1))
}

fn to_c(s: &BranchSeries) -> Vec<Complex64> {
    match s {
        BranchSeries::Exact(v) => v.iter().map(Complex64::from_rat).collect(),
        BranchSeries::Numeric(v) => v.clone(),
    }
}

fn push_exact(chart: &Chart, x: &[Rational], y: &[Rational]) -> (MPoly, MPoly) {
    let poly = |c: &[Rational]| {
        let mut p = MPoly::zero(&["t"]);
        for (k, q) in c.iter().enumerate() {
            if !q.is_zero() {
                p = &p + &MPoly::monomial(q.clone(), &["t"], &[k as u32]);
            }
        }
        p
    };
    let (xs, ys) = (poly(x), poly(y));
    (
        super::compose_arc(&chart.map_to_base[0], &xs, &ys, &["t"]),
        super::compose_arc(&chart.map_to_base[1], &xs, &ys, &["t"]),
    )
}

fn push_complex(chart: &Chart, x: &[Complex64], y: &[Complex64]) -> (CUPoly, CUPoly) {
    let subs = [("x", x.to_vec()), ("y", y.to_vec())];
    (
        compose_univariate(&chart.map_to_base[0], &subs),
        compose_univariate(&chart.map_to_base[1], &subs),
    )
}

/// Build the pushed-down arc with orders `(a, b)` at a crossing, using the
/// constants `(cu, cv)`.
fn build_arc(
    chart: &Chart,
    crossing: &NormalCrossing,
    a: u32,
    b: u32,
    cu: &Rational,
    cv: &Rational,
) -> Result<Arc, DecideError> {
    let n = 2 * (a + b) as usize + 6;
    let (s0, s1) = both_series(chart, crossing, n).ok_or_else(|| {
        DecideError::ValidationFailed(format!("no branch series at crossing {}", crossing.id))
    })?;
    let prov = ArcProvenance::ChartPushdown {
        chart: chart.id.clone(),
        crossing: crossing.id,
        exponents: [a, b],
    };
    match (&s0, &s1, &crossing.point_exact) {
        (BranchSeries::Exact(phi), BranchSeries::Exact(h), Some((_, yp))) => {
            let phi = if crossing.branches[0].role == BranchRole::AxisY {
                vec![Rational::zero()]
            } else {
                phi.clone()
            };
            let (x, y) = chart_arc(&phi, h, yp, cu, cv, a, b, n);
            let (px, py) = push_exact(chart, &x, &y);
            Arc::exact(&px, &py, prov)
        }
        _ => {
            let yp = crossing.point_value[1];
            let mut phi = to_c(&s0);
            if crossing.branches[0].role == BranchRole::AxisY {
                phi = vec![Complex64::zero()];
            }
            let h = to_c(&s1);
            let (x, y) = chart_arc(
                &phi,
                &h,
                &yp,
                &Complex64::from_rat(cu),
                &Complex64::from_rat(cv),
                a,
                b,
                n,
            );
            let (px, py) = push_complex(chart, &x, &y);
            Arc::numeric(px, py, prov)
        }
    }
}

/// A monomial arc `(u, w) = (c₁ s^b, c₂ s^a)` in straightened coordinates of
/// the crossing, pushed down to the base and validated as irreducible.
#[allow(clippy::too_many_arguments)]
pub fn witness_irreducible_arc(
    setup: &ProjectionSetup,
    delta: &MPoly,
    tree: &ResolutionTree,
    crossing: &NormalCrossing,
    exponents: (u32, u32),
    element: &Permutation,
    seed: u64,
    opts: &SectionOptions,
) -> Result<WitnessReport, DecideError> {
    let chart = tree
        .chart(&crossing.chart)
        .ok_or_else(|| DecideError::ValidationFailed(format!("unknown chart {}", crossing.chart)))?;
    let (a, b) = exponents;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (crossing.id as u64).wrapping_mul(0x9E37_79B9));
    let mut last = String::new();
    for _ in 0..4 {
        let cu = seeded_constant(&mut rng, &crossing.disk_radii[0]);
        let cv = seeded_constant(&mut rng, &crossing.disk_radii[1]);
        let arc = build_arc(chart, crossing, a, b, &cu, &cv)?;
        match arc_section(setup, delta, &arc, opts) {
            Ok(section) if section.irreducible && !section.inside_discriminant => {
                return Ok(WitnessReport {
                    arc_text: arc.text(),
                    arc: Arc {
                        valid_radius: crate::polyarith::rat_from_f64(section.radius),
                        ..arc
                    },
                    section,
                    crossing: Some(crossing.id),
                    exponents: Some([a, b]),
                    element: Some(element.cycle_notation()),
                });
            }
            Ok(section) => {
                last = format!(
                    "section has {} branches with multiplicities {:?}",
                    section.branch_count, section.multiplicities
                );
            }
            Err(e @ DecideError::ArcMeetsDelta { .. }) => last = e.to_string(),
            Err(e) if e.is_certification() => last = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(DecideError::ValidationFailed(format!(
        "witness at crossing {} with exponents ({a}, {b}): {last}",
        crossing.id
    )))
}

/// An arc whose section splits into `d` components: the `k`-fold generic
/// loop, `(a s^k, b s^k + s^{k+1})` with `k` the order of the generic
/// permutation along direction `(a : b)`.
pub fn totally_reducible_arc(
    setup: &ProjectionSetup,
    delta: &MPoly,
    direction: (&Rational, &Rational),
    generic: &Permutation,
    opts: &SectionOptions,
) -> Result<WitnessReport, DecideError> {
    let k = generic.order() as u32;
    let (a, b) = direction;
    let mono = |c: &Rational, e: u32| MPoly::monomial(c.clone(), &["t"], &[e]);
    let one = Rational::one();
    let (x, y) = if !a.is_zero() {
        (mono(a, k), &mono(b, k) + &mono(&one, k + 1))
    } else {
        (mono(&one, k + 1), mono(b, k))
    };
    let arc = Arc::exact(&x, &y, ArcProvenance::TotallyReducible { order: k as u64 })?;
    let section = arc_section(setup, delta, &arc, opts)?;
    if section.branch_count != setup.d as usize || section.multiplicities.iter().any(|&m| m != 1) {
        return Err(DecideError::ValidationFailed(format!(
            "totally reducible arc has {} branches (expected {})",
            section.branch_count, setup.d
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
        element: Some(generic.pow(k as u64).cycle_notation()),
    })
}

/// Section data of one branch of the discriminant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchScreen {
    pub label: String,
    pub arc_text: [String; 2],
    /// The parametrization is exact and lies in the discriminant.
    pub exact: bool,
    pub section: Option<SectionReport>,
    /// The reduced section is reducible, so crossings on this branch cannot
    /// produce irreducible sections.
    pub prunable: bool,
    pub error: Option<String>,
}

/// Parametrization of branch `which` of a crossing pushed down to the base:
/// `(s, φ(s))` for a `y`-type branch, `(h(s), y_p + s)` for an `x`-type
/// one.  Returns the arc and whether it is exact.
pub fn branch_arc_at_crossing(
    tree: &ResolutionTree,
    crossing: &NormalCrossing,
    which: usize,
    order: usize,
) -> Option<Arc> {
    let chart = tree.chart(&crossing.chart)?;
    let series = branch_series(chart, crossing, which, order)?;
    let label = crossing.branches[which].label.clone();
    let prov = ArcProvenance::DiscriminantBranch { branch: label };
    let y_type = matches!(crossing.branches[which].role, BranchRole::AxisY | BranchRole::GraphY);
    let terminating = |c: &[Rational]| c.iter().rposition(|q| !q.is_zero()).unwrap_or(0) <= order / 2;
    match (&series, &crossing.point_exact) {
        (BranchSeries::Exact(c), Some((_, yp))) if terminating(c) && lies_on_strict(chart, crossing, which, c) => {
            let mut s = vec![Rational::zero(); order + 1];
            s[1] = Rational::one();
            let (x, y) = if y_type {
                let mut phi = c.clone();
                if crossing.branches[which].role == BranchRole::AxisY {
                    phi = vec![yp.clone()];
                }
                (s, phi)
            } else {
                let mut ys = vec![Rational::zero(); 2];
                ys[0] = yp.clone();
                ys[1] = Rational::one();
                (c.clone(), ys)
            };
            let (px, py) = push_exact(chart, &x, &y);
            Arc::exact(&px, &py, prov).ok()
        }
        _ => {
            let c = to_c(&series);
            let c = if y_type && crossing.branches[which].role == BranchRole::AxisY {
                vec![crossing.point_value[1]]
            } else {
                c
            };
            let one = Complex64::new(1.0, 0.0);
            let (x, y) = if y_type {
                (vec![Complex64::zero(), one], c)
            } else {
                (c, vec![crossing.point_value[1], one])
            };
            let (px, py) = push_complex(chart, &x, &y);
            Arc::numeric(px, py, prov).ok()
        }
    }
}

/// Whether the polynomial branch `c` of a crossing lies exactly on the strict
/// transform of its chart.
fn lies_on_strict(chart: &Chart, crossing: &NormalCrossing, which: usize, c: &[Rational]) -> bool {
    let role = crossing.branches[which].role;
    if matches!(role, BranchRole::AxisX | BranchRole::AxisY) {
        return true;
    }
    let Some((_, yp)) = &crossing.point_exact else {
        return false;
    };
    let vars = ["t"];
    let poly = |c: &[Rational]| {
        c.iter().enumerate().fold(MPoly::zero(&vars), |p, (k, q)| {
            &p + &MPoly::monomial(q.clone(), &vars, &[k as u32])
        })
    };
    let t = MPoly::var("t", &vars);
    let (x, y) = if role == BranchRole::GraphY {
        (t, poly(c))
    } else {
        (poly(c), &t + &MPoly::constant(yp.clone(), &vars))
    };
    super::compose_arc(&chart.strict, &x, &y, &vars).is_zero()
}

/// Parametrization of a smooth discriminant through the origin.
fn smooth_branch_arc(delta: &MPoly, order: usize) -> Option<Arc> {
    let prov = ArcProvenance::DiscriminantBranch { branch: "Δ1".into() };
    let t = MPoly::var("t", &["t"]);
    let poly = |c: &[Rational]| {
        let mut p = MPoly::zero(&["t"]);
        for (k, q) in c.iter().enumerate() {
            p = &p + &MPoly::monomial(q.clone(), &["t"], &[k as u32]);
        }
        p
    };
    let delta = delta.with_vars(&["x", "y"]);
    let (graph, swap) = match graph_root(&delta, "x", "y", Rational::zero(), order) {
        Some(phi) => (phi, false),
        None => (graph_root(&delta, "y", "x", Rational::zero(), order)?, true),
    };
    let (x, y) = if swap { (poly(&graph), t) } else { (t, poly(&graph)) };
    let terminating = graph.iter().rposition(|q| !q.is_zero()).unwrap_or(0) <= order / 2;
    if terminating && super::compose_arc(&delta, &x, &y, &["t"]).is_zero() {
        return Arc::exact(&x, &y, prov).ok();
    }
    let g: Vec<Complex64> = graph.iter().map(|q| Complex64::new(crate::polyarith::rat_to_f64(q), 0.0)).collect();
    let id = vec![Complex64::zero(), Complex64::new(1.0, 0.0)];
    let (x, y) = if swap { (g, id) } else { (id, g) };
    Arc::numeric(x, y, prov).ok()
}

/// Section reports over every branch of the discriminant through the origin.
pub fn screen_discriminant_branches(
    setup: &ProjectionSetup,
    delta: &MPoly,
    tree: &ResolutionTree,
    opts: &SectionOptions,
) -> Vec<BranchScreen> {
    const ORDER: usize = 40;
    let mut arcs: Vec<(String, Option<Arc>)> = Vec::new();
    for c in &tree.crossings {
        for (i, b) in c.branches.iter().enumerate() {
            if b.kind == DivisorKind::Strict && !arcs.iter().any(|(l, _)| l == &b.label) {
                arcs.push((b.label.clone(), branch_arc_at_crossing(tree, c, i, ORDER)));
            }
        }
    }
    if arcs.is_empty() && delta.constant_term().is_zero() && delta.order() == 1 {
        arcs.push(("Δ1".into(), smooth_branch_arc(delta, ORDER)));
    }
    arcs.into_iter()
        .map(|(label, arc)| {
            let Some(arc) = arc else {
                return BranchScreen {
                    label,
                    arc_text: [String::new(), String::new()],
                    exact: false,
                    section: None,
                    prunable: false,
                    error: Some("no parametrization available".into()),
                };
            };
            let exact = matches!(arc.path, ArcPath::Exact { .. });
            match arc_section(setup, delta, &arc, opts) {
                Ok(s) => BranchScreen {
                    label,
                    arc_text: arc.text(),
                    exact,
                    prunable: exact && !s.irreducible,
                    section: Some(s),
                    error: None,
                },
                Err(e) => BranchScreen {
                    label,
                    arc_text: arc.text(),
                    exact,
                    section: None,
                    prunable: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{axis_direction, setup_projection, XYZ};
    use crate::polyarith::parse_poly;
    use crate::resolve::resolve_embedded;

    #[test]
    fn series_composition() {
        // φ(u) = 1 + u + u^2 at u = s + s^2
        let phi: Vec<Rational> = [1, 1, 1].iter().map(|&k| Rational::from_integer(k.into())).collect();
        let u: Vec<Rational> = [0, 1, 1].iter().map(|&k| Rational::from_integer(k.into())).collect();
        let c = compose_series(&phi, &u, 5);
        let want: Vec<Rational> = [1, 1, 2, 2, 1].iter().map(|&k| Rational::from_integer(k.into())).collect();
        assert_eq!(c, want);
    }

    #[test]
    fn straightened_arc_has_requested_orders() {
        // branch y = 1 + x (GraphY), other branch x = 0: W = y - 1 - x
        let phi = vec![Rational::one(), Rational::one()];
        let h = vec![Rational::zero()];
        let one = Rational::one();
        let (x, y) = chart_arc(&phi, &h, &one, &one, &one, 3, 2, 10);
        let w: Vec<Rational> = (0..10)
            .map(|k| &(&y[k] - &x[k]) - &(if k == 0 { one.clone() } else { Rational::zero() }))
            .collect();
        assert_eq!(w.iter().position(|c| !c.is_zero()), Some(3));
        assert_eq!(x.iter().position(|c| !c.is_zero()), Some(2));
    }

    #[test]
    fn branches_of_the_quartic_example_are_prunable() {
        let f = parse_poly("z^4 - 4*x*z + 3*y^2", &XYZ).unwrap();
        let s = setup_projection(&f, &axis_direction("z").unwrap()).unwrap();
        let delta = s.discriminant().unwrap();
        let tree = resolve_embedded(&delta).unwrap();
        let screens = screen_discriminant_branches(&s, &delta, &tree, &SectionOptions::default());
        assert_eq!(screens.len(), 2);
        for b in &screens {
            assert!(b.exact, "{b:?}");
            let sec = b.section.as_ref().unwrap();
            assert_eq!(sec.branch_count, 3);
            assert_eq!(sec.multiplicities, vec![2, 1, 1]);
            assert!(b.prunable);
        }
    }

    #[test]
    fn smooth_discriminant_branch() {
        let f = parse_poly("z^2 - x", &XYZ).unwrap();
        let s = setup_projection(&f, &axis_direction("z").unwrap()).unwrap();
        let delta = s.discriminant().unwrap();
        let tree = resolve_embedded(&delta).unwrap();
        let screens = screen_discriminant_branches(&s, &delta, &tree, &SectionOptions::default());
        assert_eq!(screens.len(), 1);
        let sec = screens[0].section.as_ref().unwrap();
        assert_eq!((sec.branch_count, sec.multiplicities.clone()), (1, vec![2]));
        assert!(sec.irreducible && !screens[0].prunable);
    }

    #[test]
    fn exponent_rules() {
        let f = parse_poly("z^4 - 4*x*z + 3*y^2", &XYZ).unwrap();
        let s = setup_projection(&f, &axis_direction("z").unwrap()).unwrap();
        let delta = s.discriminant().unwrap();
        let tree = resolve_embedded(&delta).unwrap();
        let c = tree.crossings.iter().find(|c| c.chart == "R·v·u·v").unwrap();
        let chart = tree.chart(&c.chart).unwrap();
        let id = Permutation::identity(4);
        let p2 = Permutation::from_cycles("(1,2,3,4)", 4).unwrap();
        let cands = crossing_exponent_candidates(chart, c, &id, &p2);
        // both branches exceptional: (0, 1) is allowed and comes first
        assert_eq!(cands[0], (0, 1));
        assert!(cands.iter().all(|&(a, b)| num_integer::gcd(a, b) == 1));
        assert!(crossing_exponent_candidates(chart, c, &id, &Permutation::from_cycles("(1,2)(3,4)", 4).unwrap())
            .is_empty());
    }
}
