//! Embedded resolution of plane curves by iterated point blowups.
//!
//! Every chart has coordinates `(x, y)` and a polynomial map to the base
//! plane.  Blowing up the point `(0, c)` of a chart produces
//!
//! * chart `·u`: `(x, y) ↦ (x, c + x·y)`, exceptional divisor `{x = 0}`;
//! * chart `·v`: `(x, y) ↦ (x·y, c + y)`, exceptional divisor `{y = 0}`.
//!
//! In every chart the pulled-back curve is written `x^a · y^b · S(x, y)`
//! with `S` not divisible by `x` or `y`; the coordinate axes carry labels
//! (an exceptional divisor `E_k` or a strict component of the curve).  Points
//! over the origin of the base are examined chart by chart: all points of
//! the new divisor `{x = 0}` in a `·u` chart, and only the origin in the base
//! chart and in `·v` charts (the remaining points of `{y = 0}` there are
//! already covered by the sibling `·u` chart).

mod series;

pub use series::{graph_root, Field};

use crate::polyarith::{
    fmt_rat, radical, rat, rational_roots_with_rest, squarefree_factors, univariate_roots,
    MPoly, PolyError, Rational,
};
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Default cap on the number of nested blowups.
pub const DEFAULT_DEPTH_CAP: u32 = 32;

/// Errors raised by the resolution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolveError {
    #[error("blowup center {center} is not on the curve in chart {chart}")]
    CenterNotOnCurve { chart: String, center: String },
    #[error(
        "irrational singular point on {divisor} in chart {chart}: its coordinate is a multiple root of {minimal_polynomial}"
    )]
    IrrationalCenter {
        chart: String,
        divisor: String,
        minimal_polynomial: String,
    },
    #[error("resolution exceeded the depth cap {0}")]
    DepthExceeded(u32),
    #[error("could not certify a bidisk around {point} in chart {chart}")]
    BidiskNotCertified { chart: String, point: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Exceptional divisor or strict component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisorKind {
    Exceptional,
    Strict,
}

/// Label carried by a coordinate axis of a chart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisLabel {
    pub label: String,
    pub kind: DivisorKind,
}

/// A component of the total transform in one chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Divisor {
    pub label: String,
    pub kind: DivisorKind,
    pub equation: MPoly,
    pub multiplicity: u32,
}

/// How a chart arose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Base,
    /// `(x, y) ↦ (x, c + x·y)`.
    U,
    /// `(x, y) ↦ (x·y, c + y)`.
    V,
}

/// One affine chart of the resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub id: String,
    pub parent: Option<String>,
    pub kind: ChartKind,
    pub depth: u32,
    pub coords: [String; 2],
    /// `(x_base(x, y), y_base(x, y))`.
    pub map_to_base: [MPoly; 2],
    /// Pullback of the curve.
    pub total_transform: MPoly,
    /// Reduced strict part `S` (no monomial factor).
    pub strict: MPoly,
    /// Label of `{x = 0}` when it is part of the total transform.
    pub axis_x: Option<AxisLabel>,
    /// Label of `{y = 0}` when it is part of the total transform.
    pub axis_y: Option<AxisLabel>,
    pub divisors: Vec<Divisor>,
}

/// A blowup performed during the resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub parent: String,
    /// Center in the parent chart's coordinates.
    pub center: [String; 2],
    pub exceptional: String,
    /// Multiplicity of the new exceptional divisor.
    pub multiplicity: u32,
    pub children: [String; 2],
}

/// How a branch sits at a crossing in local chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchRole {
    /// The axis `{x = 0}`.
    AxisX,
    /// The axis `{y = 0}`.
    AxisY,
    /// A strict branch `x = h(y)` (transverse to `{y = const}`).
    GraphX,
    /// A strict branch `y = φ(x)` (transverse to `{x = const}`).
    GraphY,
}

/// One of the two branches through a normal crossing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingBranch {
    pub label: String,
    pub kind: DivisorKind,
    pub role: BranchRole,
    pub multiplicity: u32,
}

/// A normal crossing of the total transform with its bidisk.
///
/// `branches[0]` is of `y`-type (`AxisY` or `GraphY`) and is encircled by
/// the loop `x = r1`, `|y - y_p| = r2` (the boundary of the disk `D1`);
/// `branches[1]` is of `x`-type and is encircled by `y = y_p + r2`,
/// `|x| = r1` (the boundary of `D2`).  Both loops start at the basepoint
/// `q = (r1, y_p + r2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalCrossing {
    pub id: usize,
    pub chart: String,
    /// Human-readable coordinates of the crossing point.
    pub point: [String; 2],
    /// Exact coordinates when rational.
    #[serde(skip)]
    pub point_exact: Option<(Rational, Rational)>,
    pub point_value: [Complex64; 2],
    pub branches: [CrossingBranch; 2],
    #[serde(with = "crate::serde_rational_vec")]
    pub disk_radii: Vec<Rational>,
    /// `q` in chart coordinates.
    pub basepoint: [String; 2],
    pub basepoint_value: [Complex64; 2],
}

impl NormalCrossing {
    /// Radii `(r1, r2)` as floats.
    pub fn radii_f64(&self) -> (f64, f64) {
        (
            crate::polyarith::rat_to_f64(&self.disk_radii[0]),
            crate::polyarith::rat_to_f64(&self.disk_radii[1]),
        )
    }

    /// Sum of the branch multiplicities (used to order witness searches).
    pub fn total_multiplicity(&self) -> u32 {
        self.branches.iter().map(|b| b.multiplicity).sum()
    }
}

/// The complete resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionTree {
    pub curve: MPoly,
    pub charts: Vec<Chart>,
    pub edges: Vec<TreeEdge>,
    pub crossings: Vec<NormalCrossing>,
    pub exceptional_count: usize,
}

impl ResolutionTree {
    pub fn chart(&self, id: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.id == id)
    }

    /// Charts with no children.
    pub fn leaves(&self) -> Vec<&Chart> {
        self.charts
            .iter()
            .filter(|c| !self.edges.iter().any(|e| e.parent == c.id))
            .collect()
    }
}

/// Resolution settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolveOptions {
    pub depth_cap: u32,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions {
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }
}

const XY: [&str; 2] = ["x", "y"];

fn xv() -> MPoly {
    MPoly::var("x", &XY)
}

fn yv() -> MPoly {
    MPoly::var("y", &XY)
}

fn sub_xy(f: &MPoly, x: &MPoly, y: &MPoly) -> MPoly {
    let mut m = BTreeMap::new();
    m.insert("x".to_string(), x.clone());
    m.insert("y".to_string(), y.clone());
    f.substitute(&m).with_vars(&XY)
}

/// Split `f = x^a y^b · g` with `g` free of monomial factors.
fn split_monomial(f: &MPoly) -> (u32, u32, MPoly) {
    let f = f.with_vars(&XY);
    let m = f.monomial_content();
    (m[0], m[1], f.div_monomial(&m))
}

/// Multiplicity structure `f = ∏ g_i^i` via iterated radicals.
fn squarefree_decomposition(f: &MPoly) -> Vec<(MPoly, u32)> {
    let mut levels = Vec::new();
    let mut g = f.clone();
    while !g.is_constant() {
        let r = radical(&g);
        g = g.exact_div(&r).expect("radical divides");
        levels.push(r);
    }
    let mut out = Vec::new();
    for i in 0..levels.len() {
        let next = levels.get(i + 1).cloned().unwrap_or_else(|| MPoly::one(&XY));
        let q = levels[i].exact_div(&next).expect("nested radicals");
        if !q.is_constant() {
            out.push((q.normalized(), (i + 1) as u32));
        }
    }
    out
}

/// One candidate point on a chart.
#[derive(Clone, Debug)]
struct Candidate {
    exact: Option<Rational>,
    value: Complex64,
}

/// Result of the local analysis at a point.
enum Local {
    Nothing,
    Crossing([(AxisOrStrict, BranchRole); 2]),
    Blowup,
}

#[derive(Clone, Debug)]
enum AxisOrStrict {
    Axis(AxisLabel, u32),
    Strict,
}

struct Builder<'a> {
    curve: &'a MPoly,
    opts: ResolveOptions,
    charts: Vec<Chart>,
    edges: Vec<TreeEdge>,
    crossings: Vec<NormalCrossing>,
    exceptional: usize,
    strict_count: usize,
}

/// Resolve the plane curve `delta(x, y) = 0` at the origin.
pub fn resolve_embedded(delta: &MPoly) -> Result<ResolutionTree, ResolveError> {
    resolve_embedded_with(delta, ResolveOptions::default())
}

/// As [`resolve_embedded`] with explicit options.
pub fn resolve_embedded_with(delta: &MPoly, opts: ResolveOptions) -> Result<ResolutionTree, ResolveError> {
    let delta = delta.with_vars(&XY);
    if delta.is_zero() {
        return Err(PolyError::ZeroPolynomial.into());
    }
    let mut b = Builder {
        curve: &delta,
        opts,
        charts: Vec::new(),
        edges: Vec::new(),
        crossings: Vec::new(),
        exceptional: 0,
        strict_count: 0,
    };
    let (a, bb, _) = split_monomial(&delta);
    let red = radical(&delta);
    let (_, _, s) = split_monomial(&red);
    let strict_axis = |e: u32, name: &str| {
        (e > 0).then(|| AxisLabel {
            label: format!("Δ[{name}=0]"),
            kind: DivisorKind::Strict,
        })
    };
    let root = make_chart(
        "R".into(),
        None,
        ChartKind::Base,
        0,
        [xv(), yv()],
        delta.clone(),
        s,
        strict_axis(a, "x"),
        strict_axis(bb, "y"),
        squarefree_decomposition(&split_monomial(&delta).2),
    );
    b.charts.push(root);
    if !delta.constant_term().is_zero() {
        return Ok(b.finish());
    }
    b.process(0)?;
    Ok(b.finish())
}

#[allow(clippy::too_many_arguments)]
fn make_chart(
    id: String,
    parent: Option<String>,
    kind: ChartKind,
    depth: u32,
    map_to_base: [MPoly; 2],
    total: MPoly,
    strict: MPoly,
    axis_x: Option<AxisLabel>,
    axis_y: Option<AxisLabel>,
    strict_factors: Vec<(MPoly, u32)>,
) -> Chart {
    let (a, b, _) = split_monomial(&total);
    let mut divisors = Vec::new();
    if let Some(l) = &axis_x {
        divisors.push(Divisor {
            label: l.label.clone(),
            kind: l.kind,
            equation: xv(),
            multiplicity: a,
        });
    }
    if let Some(l) = &axis_y {
        divisors.push(Divisor {
            label: l.label.clone(),
            kind: l.kind,
            equation: yv(),
            multiplicity: b,
        });
    }
    for (g, m) in strict_factors {
        divisors.push(Divisor {
            label: "Δ".into(),
            kind: DivisorKind::Strict,
            equation: g,
            multiplicity: m,
        });
    }
    Chart {
        id,
        parent,
        kind,
        depth,
        coords: ["x".into(), "y".into()],
        map_to_base,
        total_transform: total,
        strict: strict.normalized(),
        axis_x,
        axis_y,
        divisors,
    }
}

fn point_text(c: &Candidate) -> String {
    match &c.exact {
        Some(q) => fmt_rat(q),
        None => format!("{:.12}{:+.12}i", c.value.re, c.value.im),
    }
}

impl Builder<'_> {
    fn finish(self) -> ResolutionTree {
        ResolutionTree {
            curve: self.curve.clone(),
            charts: self.charts,
            edges: self.edges,
            crossings: self.crossings,
            exceptional_count: self.exceptional,
        }
    }

    fn candidates(&self, idx: usize) -> Result<Vec<Candidate>, ResolveError> {
        let ch = &self.charts[idx];
        let origin = Candidate {
            exact: Some(Rational::zero()),
            value: Complex64::new(0.0, 0.0),
        };
        if ch.kind != ChartKind::U {
            return Ok(vec![origin]);
        }
        let s0 = ch.strict.eval_var("x", &Rational::zero()).with_vars(&["y"]);
        let coeffs = s0.univariate_rational("y").unwrap_or_default();
        let (roots, rest) = rational_roots_with_rest(&coeffs);
        let mut out: Vec<Candidate> = roots
            .into_iter()
            .map(|(r, _)| Candidate {
                value: Complex64::new(crate::polyarith::rat_to_f64(&r), 0.0),
                exact: Some(r),
            })
            .collect();
        if ch.axis_y.is_some() && !out.iter().any(|c| c.exact.as_ref().is_some_and(|q| q.is_zero())) {
            out.push(origin);
        }
        if rest.len() > 1 {
            let restp = MPoly::from_terms(
                &["y"],
                rest.iter().enumerate().map(|(i, c)| (vec![i as u32], c.clone())),
            );
            for sf in squarefree_factors(&restp, "y") {
                if sf.multiplicity > 1 {
                    return Err(ResolveError::IrrationalCenter {
                        chart: ch.id.clone(),
                        divisor: ch.axis_x.as_ref().map(|l| l.label.clone()).unwrap_or_default(),
                        minimal_polynomial: sf.factor.to_string(),
                    });
                }
            }
            let c: Vec<Complex64> = rest
                .iter()
                .map(|q| Complex64::new(crate::polyarith::rat_to_f64(q), 0.0))
                .collect();
            for b in univariate_roots(&c)? {
                out.push(Candidate {
                    exact: None,
                    value: b.center(),
                });
            }
        }
        out.sort_by(|a, b| {
            a.value
                .re
                .total_cmp(&b.value.re)
                .then(a.value.im.total_cmp(&b.value.im))
        });
        Ok(out)
    }

    fn axis_mult(&self, idx: usize, which: usize) -> u32 {
        let ch = &self.charts[idx];
        let (a, b, _) = split_monomial(&ch.total_transform);
        if which == 0 {
            a
        } else {
            b
        }
    }

    fn classify(&self, idx: usize, p: &Candidate) -> Local {
        let ch = &self.charts[idx];
        let at_origin = p.exact.as_ref().is_some_and(|q| q.is_zero());
        let ax = ch
            .axis_x
            .clone()
            .map(|l| (AxisOrStrict::Axis(l, self.axis_mult(idx, 0)), BranchRole::AxisX));
        let ay = if at_origin {
            ch.axis_y
                .clone()
                .map(|l| (AxisOrStrict::Axis(l, self.axis_mult(idx, 1)), BranchRole::AxisY))
        } else {
            None
        };
        let Some(c) = &p.exact else {
            // Irrational points are simple roots of S(0, y): S is smooth there
            // and transverse to {x = 0}.
            return match ax {
                Some(ax) => Local::Crossing([(AxisOrStrict::Strict, BranchRole::GraphY), ax]),
                None => Local::Nothing,
            };
        };
        let local = sub_xy(&ch.strict, &xv(), &(&yv() + &MPoly::constant(c.clone(), &XY)));
        let on_curve = local.constant_term().is_zero();
        let axes: Vec<_> = [ay.clone(), ax.clone()].into_iter().flatten().collect();
        if !on_curve {
            return match (ay, ax) {
                (Some(ay), Some(ax)) => Local::Crossing([ay, ax]),
                _ => Local::Nothing,
            };
        }
        let ord = local.order();
        let sx = local.coeff(&[1, 0]);
        let sy = local.coeff(&[0, 1]);
        match (ord, axes.len()) {
            (1, 0) => Local::Nothing,
            (1, 1) => {
                if let Some(ax) = ax {
                    if !sy.is_zero() {
                        return Local::Crossing([(AxisOrStrict::Strict, BranchRole::GraphY), ax]);
                    }
                } else if let Some(ay) = ay {
                    if !sx.is_zero() {
                        return Local::Crossing([ay, (AxisOrStrict::Strict, BranchRole::GraphX)]);
                    }
                }
                Local::Blowup
            }
            (2, 0) => {
                let q = local.homogeneous_component(2);
                if q.nterms() == 1 && !q.coeff(&[1, 1]).is_zero() {
                    Local::Crossing([
                        (AxisOrStrict::Strict, BranchRole::GraphY),
                        (AxisOrStrict::Strict, BranchRole::GraphX),
                    ])
                } else {
                    Local::Blowup
                }
            }
            _ => Local::Blowup,
        }
    }

    fn process(&mut self, idx: usize) -> Result<(), ResolveError> {
        for p in self.candidates(idx)? {
            match self.classify(idx, &p) {
                Local::Nothing => {}
                Local::Crossing(br) => self.add_crossing(idx, &p, br)?,
                Local::Blowup => {
                    let c = p.exact.clone().expect("blowups only at rational points");
                    let (ia, ib) = self.blowup(idx, &c)?;
                    self.process(ia)?;
                    self.process(ib)?;
                }
            }
        }
        Ok(())
    }

    fn blowup(&mut self, idx: usize, c: &Rational) -> Result<(usize, usize), ResolveError> {
        let parent = self.charts[idx].clone();
        if parent.depth >= self.opts.depth_cap {
            return Err(ResolveError::DepthExceeded(self.opts.depth_cap));
        }
        let (nu, nv) = blowup(&parent, c, self.exceptional + 1)?;
        self.exceptional += 1;
        self.edges.push(TreeEdge {
            parent: parent.id.clone(),
            center: ["0".into(), fmt_rat(c)],
            exceptional: format!("E{}", self.exceptional),
            multiplicity: split_monomial(&nu.total_transform).0,
            children: [nu.id.clone(), nv.id.clone()],
        });
        self.charts.push(nu);
        self.charts.push(nv);
        Ok((self.charts.len() - 2, self.charts.len() - 1))
    }

    fn add_crossing(
        &mut self,
        idx: usize,
        p: &Candidate,
        br: [(AxisOrStrict, BranchRole); 2],
    ) -> Result<(), ResolveError> {
        let ch = self.charts[idx].clone();
        let vp = p.value;
        let (r1, r2) = certify_bidisk(&ch, vp, [br[0].1, br[1].1])?;
        let r1f = crate::polyarith::rat_to_f64(&r1);
        let r2f = crate::polyarith::rat_to_f64(&r2);
        let mut branches = Vec::new();
        for (which, role) in br.iter() {
            let b = match which {
                AxisOrStrict::Axis(l, m) => CrossingBranch {
                    label: l.label.clone(),
                    kind: l.kind,
                    role: *role,
                    multiplicity: *m,
                },
                AxisOrStrict::Strict => {
                    // A resolved strict branch meets the exceptional locus
                    // exactly once, so a running counter names it uniquely.
                    self.strict_count += 1;
                    CrossingBranch {
                        label: format!("Δ{}", self.strict_count),
                        kind: DivisorKind::Strict,
                        role: *role,
                        multiplicity: 1,
                    }
                }
            };
            branches.push(b);
        }
        let q = [Complex64::new(r1f, 0.0), vp + Complex64::new(r2f, 0.0)];
        let qtext = [
            fmt_rat(&r1),
            match &p.exact {
                Some(c) => fmt_rat(&(c + &r2)),
                None => format!("{:.12}{:+.12}i", q[1].re, q[1].im),
            },
        ];
        let id = self.crossings.len();
        self.crossings.push(NormalCrossing {
            id,
            chart: ch.id.clone(),
            point: ["0".into(), point_text(p)],
            point_exact: p.exact.clone().map(|c| (Rational::zero(), c)),
            point_value: [Complex64::new(0.0, 0.0), vp],
            branches: [branches[0].clone(), branches[1].clone()],
            disk_radii: vec![r1, r2],
            basepoint: qtext,
            basepoint_value: q,
        });
        Ok(())
    }
}

/// Blow up the point `(0, c)` of `parent`; the new exceptional divisor is
/// labelled `E{index}`.  Returns the `·u` and `·v` charts.
pub fn blowup(parent: &Chart, c: &Rational, index: usize) -> Result<(Chart, Chart), ResolveError> {
    let cpoly = MPoly::constant(c.clone(), &XY);
    let local = sub_xy(&parent.total_transform, &xv(), &(&yv() + &cpoly));
    if !local.constant_term().is_zero() {
        return Err(ResolveError::CenterNotOnCurve {
            chart: parent.id.clone(),
            center: format!("(0, {})", fmt_rat(c)),
        });
    }
    let e = AxisLabel {
        label: format!("E{index}"),
        kind: DivisorKind::Exceptional,
    };
    let suffix = if c.is_zero() {
        String::new()
    } else {
        format!("[{}]", fmt_rat(c))
    };
    let xy = &xv() * &yv();
    let subs_u = (xv(), &cpoly + &xy);
    let subs_v = (xy.clone(), &cpoly + &yv());
    let mut out = Vec::new();
    for (kind, (sx, sy), tag) in [(ChartKind::U, subs_u, "u"), (ChartKind::V, subs_v, "v")] {
        let map = [
            sub_xy(&parent.map_to_base[0], &sx, &sy),
            sub_xy(&parent.map_to_base[1], &sx, &sy),
        ];
        let total = sub_xy(&parent.total_transform, &sx, &sy);
        let (a, b, strict) = split_monomial(&sub_xy(&parent.strict, &sx, &sy));
        let strict_axis = |exp: u32, name: &str| {
            (exp > 0).then(|| AxisLabel {
                label: format!("Δ[{name}=0]"),
                kind: DivisorKind::Strict,
            })
        };
        let (axis_x, axis_y) = match kind {
            ChartKind::U => (
                Some(e.clone()),
                if c.is_zero() {
                    parent.axis_y.clone()
                } else {
                    None
                }
                .or_else(|| strict_axis(b, "y")),
            ),
            _ => (
                parent.axis_x.clone().or_else(|| strict_axis(a, "x")),
                Some(e.clone()),
            ),
        };
        out.push(make_chart(
            format!("{}{}·{}", parent.id, suffix, tag),
            Some(parent.id.clone()),
            kind,
            parent.depth + 1,
            map,
            total,
            strict,
            axis_x,
            axis_y,
            // Strict transforms of the squarefree levels of the parent.
            parent
                .divisors
                .iter()
                .filter(|d| d.label == "Δ")
                .filter_map(|d| {
                    let (_, _, g) = split_monomial(&sub_xy(&d.equation, &sx, &sy));
                    (!g.is_constant()).then(|| (g.normalized(), d.multiplicity))
                })
                .collect(),
        ));
    }
    let v = out.pop().unwrap();
    let u = out.pop().unwrap();
    Ok((u, v))
}

/// Count the roots of `p(t)` with `|t - center| < r`, failing when a root
/// lies within `margin` of the circle.  Uses the argument principle on the
/// circles of radii `r ∓ margin`, so far-away roots and badly scaled leading
/// coefficients do not matter.
fn roots_inside(p: Vec<Complex64>, center: Complex64, r: f64, margin: f64) -> Option<usize> {
    let p = crate::monodromy::ctrim(p);
    if p.is_empty() {
        return None;
    }
    if p.len() == 1 {
        return Some(0);
    }
    let inner = winding_number(&p, center, r - margin)?;
    let outer = winding_number(&p, center, r + margin)?;
    (inner == outer).then_some(inner)
}

/// Winding number of `p` around 0 along `|t - center| = r`, with adaptive
/// sampling so that consecutive arguments differ by less than π/4.
fn winding_number(p: &[Complex64], center: Complex64, r: f64) -> Option<usize> {
    use crate::polyarith::horner;
    use std::f64::consts::{FRAC_PI_4, TAU};
    if r <= 0.0 {
        return Some(0);
    }
    let scale: f64 = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let at = |theta: f64| horner(p, center + Complex64::from_polar(r, theta));
    let tiny = 1e-14 * scale * (1.0 + center.norm() + r).powi(p.len() as i32 - 1);
    let n0 = 64;
    let mut total = 0.0;
    let mut stack: Vec<(f64, f64, Complex64, Complex64, u32)> = Vec::new();
    for k in (0..n0).rev() {
        let (a, b) = (TAU * k as f64 / n0 as f64, TAU * (k + 1) as f64 / n0 as f64);
        stack.push((a, b, at(a), at(b), 0));
    }
    while let Some((a, b, fa, fb, depth)) = stack.pop() {
        if fa.norm() <= tiny || fb.norm() <= tiny {
            return None;
        }
        let d = (fb / fa).arg();
        if d.abs() < FRAC_PI_4 {
            total += d;
            continue;
        }
        if depth >= 16 {
            return None;
        }
        let m = 0.5 * (a + b);
        let fm = at(m);
        stack.push((m, b, fm, fb, depth + 1));
        stack.push((a, m, fa, fm, depth + 1));
    }
    let w = (total / TAU).round();
    (w >= 0.0).then_some(w as usize)
}

/// Radii `(r1, r2)` of a bidisk `|x| ≤ r1, |y - vp| ≤ r2` in which the
/// total transform consists of the two crossing branches: on sampled slices
/// of the face `|x| = r1` exactly one point (the `y`-type branch) lies in the
/// `y`-disk, and on the face `|y - vp| = r2` exactly one point (the `x`-type
/// branch) lies in the `x`-disk.  The ratio `r2 / r1` is a dyadic number
/// adapted to the slopes of the branches; `r1` is halved until the check
/// passes.
fn certify_bidisk(
    ch: &Chart,
    vp: Complex64,
    roles: [BranchRole; 2],
) -> Result<(Rational, Rational), ResolveError> {
    let ylab = ch.axis_y.is_some();
    let xlab = ch.axis_x.is_some();
    let py = if ylab { &ch.strict * &yv() } else { ch.strict.clone() };
    let px = if xlab { &ch.strict * &xv() } else { ch.strict.clone() };
    // Slopes |dy/dx| of the y-type branch and |dx/dy| of the x-type branch.
    let at = [("x", Complex64::new(0.0, 0.0)), ("y", vp)];
    let sx = ch.strict.derivative("x").eval_named(&at).norm();
    let sy = ch.strict.derivative("y").eval_named(&at).norm();
    let slope_y = if roles[0] == BranchRole::GraphY && sy > 0.0 { sx / sy } else { 0.0 };
    let slope_x = if roles[1] == BranchRole::GraphX && sx > 0.0 { sy / sx } else { 0.0 };
    let lambda = if slope_y > 0.0 && slope_x > 0.0 {
        (slope_y / slope_x).sqrt()
    } else if slope_y > 0.0 {
        (2.0 * slope_y).max(1.0)
    } else if slope_x > 0.0 {
        (0.5 / slope_x).min(1.0)
    } else {
        1.0
    };
    let ratio = Rational::from_integer(2.into()).pow(lambda.log2().round() as i32);
    let mut r = Rational::new(1.into(), 2.into());
    for _ in 0..40 {
        let r1 = if ratio > rat(1) { &r / &ratio } else { r.clone() };
        let r2 = &r1 * &ratio;
        let (r1f, r2f) = (crate::polyarith::rat_to_f64(&r1), crate::polyarith::rat_to_f64(&r2));
        let nang = 64;
        let ok = (0..nang).all(|k| {
            let e = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / nang as f64 + 0.1);
            let cy = py.univariate_complex("y", &[("x", e * r1f)]);
            let cx = px.univariate_complex("x", &[("y", vp + e * r2f)]);
            roots_inside(cy, vp, r2f, 1e-3 * r2f) == Some(1)
                && roots_inside(cx, Complex64::new(0.0, 0.0), r1f, 1e-3 * r1f) == Some(1)
        });
        if ok {
            return Ok((r1, r2));
        }
        r /= rat(2);
    }
    Err(ResolveError::BidiskNotCertified {
        chart: ch.id.clone(),
        point: format!("(0, {vp})"),
    })
}

/// Local series of a crossing branch in chart coordinates: for `GraphY`
/// the coefficients of `φ(x)` with `y = φ(x)`, for `GraphX` those of
/// `h(y - y_p)` with `x = h`, for axes the zero series.  Exact when the
/// crossing point is rational.
pub enum BranchSeries {
    Exact(Vec<Rational>),
    Numeric(Vec<Complex64>),
}

/// Truncated series of one branch of a crossing (see [`BranchSeries`]).
pub fn branch_series(chart: &Chart, crossing: &NormalCrossing, which: usize, order: usize) -> Option<BranchSeries> {
    let b = &crossing.branches[which];
    let vp = crossing.point_value[1];
    match b.role {
        BranchRole::AxisY => Some(BranchSeries::Exact(vec![Rational::zero()])),
        BranchRole::AxisX => Some(BranchSeries::Exact(vec![Rational::zero()])),
        BranchRole::GraphY => match &crossing.point_exact {
            Some((_, c)) => graph_root(&chart.strict, "x", "y", c.clone(), order).map(BranchSeries::Exact),
            None => graph_root(&chart.strict, "x", "y", vp, order).map(BranchSeries::Numeric),
        },
        BranchRole::GraphX => {
            // x = h(w) with y = y_p + w
            let c = crossing.point_exact.as_ref().map(|(_, c)| c.clone())?;
            let local = sub_xy(&chart.strict, &xv(), &(&yv() + &MPoly::constant(c, &XY)));
            graph_root(&local, "y", "x", Rational::zero(), order).map(BranchSeries::Exact)
        }
    }
}

/// All normal crossings of a resolved tree.
pub fn enumerate_crossings(tree: &ResolutionTree) -> Vec<NormalCrossing> {
    tree.crossings.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::parse_poly;

    fn p(s: &str) -> MPoly {
        parse_poly(s, &XY).unwrap()
    }

    #[test]
    fn cusp_pair_resolution_matches_chart_sequence() {
        let tree = resolve_embedded(&p("y^6 - x^4")).unwrap();
        assert_eq!(tree.exceptional_count, 3);
        let t = |id: &str| tree.chart(id).unwrap().total_transform.clone();
        assert!(t("R·v").equal_up_to_unit(&p("y^4*(x^2 - y)*(x^2 + y)")));
        assert!(t("R·v·u").equal_up_to_unit(&p("x^6*y^4*(y - x)*(y + x)")));
        assert!(t("R·v·u·u").equal_up_to_unit(&p("x^12*y^4*(y - 1)*(y + 1)")));
        assert_eq!(tree.crossings.len(), 4);
        let featured = tree
            .crossings
            .iter()
            .find(|c| c.chart == "R·v·u·v")
            .unwrap();
        assert_eq!(featured.disk_radii, vec![Rational::new(1.into(), 2.into()); 2]);
        assert_eq!(featured.basepoint, ["1/2".to_string(), "1/2".to_string()]);
        let ch = tree.chart("R·v·u·v").unwrap();
        assert_eq!(ch.map_to_base[0], p("x^2*y^3"));
        assert_eq!(ch.map_to_base[1], p("x*y^2"));
        let labels: Vec<_> = featured.branches.iter().map(|b| b.label.clone()).collect();
        assert_eq!(labels, vec!["E3", "E2"]);
    }

    #[test]
    fn pullback_and_multiplicities_are_consistent() {
        let delta = p("y^6 - x^4");
        let tree = resolve_embedded(&delta).unwrap();
        for ch in &tree.charts {
            let pulled = sub_xy(&delta, &ch.map_to_base[0], &ch.map_to_base[1]);
            assert_eq!(pulled, ch.total_transform);
            let mut prod = MPoly::one(&XY);
            for d in &ch.divisors {
                prod = &prod * &d.equation.pow(d.multiplicity);
            }
            assert!(prod.equal_up_to_unit(&ch.total_transform), "{}", ch.id);
        }
        for e in &tree.edges {
            let parent = tree.chart(&e.parent).unwrap();
            let c = crate::polyarith::parse_rat(&e.center[1]).unwrap();
            let local = sub_xy(&parent.total_transform, &xv(), &(&yv() + &MPoly::constant(c, &XY)));
            assert_eq!(local.order(), e.multiplicity);
        }
        let mults: Vec<u32> = tree.edges.iter().map(|e| e.multiplicity).collect();
        assert_eq!(mults, vec![4, 6, 12]);
    }

    #[test]
    fn trivial_cases() {
        let tree = resolve_embedded(&p("y - x^2")).unwrap();
        assert_eq!(tree.charts.len(), 1);
        assert!(tree.crossings.is_empty());
        let tree = resolve_embedded(&p("x*y")).unwrap();
        assert_eq!(tree.charts.len(), 1);
        assert_eq!(tree.crossings.len(), 1);
        let c = &tree.crossings[0];
        assert_eq!(c.basepoint, ["1/2".to_string(), "1/2".to_string()]);
        assert_eq!(c.branches[0].role, BranchRole::AxisY);
        assert_eq!(c.branches[1].role, BranchRole::AxisX);
    }

    #[test]
    fn cusp_resolution() {
        let tree = resolve_embedded(&p("y^2 - x^3")).unwrap();
        assert_eq!(tree.exceptional_count, 3);
        // E3 meets E1, E2 and the strict transform.
        assert_eq!(tree.crossings.len(), 3);
        for c in &tree.crossings {
            assert!(c.branches.iter().any(|b| b.label == "E3"));
        }
    }

    #[test]
    fn irrational_simple_points_become_numeric_crossings() {
        // four lines through the origin, two with irrational slopes
        let tree = resolve_embedded(&p("(y^2 - 2*x^2)*(y - x)*(y + 3*x)")).unwrap();
        assert_eq!(tree.exceptional_count, 1);
        assert_eq!(tree.crossings.len(), 4);
        assert_eq!(tree.crossings.iter().filter(|c| c.point_exact.is_none()).count(), 2);
    }

    #[test]
    fn tacnode_needs_two_blowups() {
        let tree = resolve_embedded(&p("(y - x^2)*(y + x^2)")).unwrap();
        assert_eq!(tree.exceptional_count, 2);
        assert!(tree.leaves().len() >= 3);
    }
}
