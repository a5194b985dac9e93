//! Arcs in the base plane and the plane-curve germs they cut out.

use super::{compose_arc, DecideError, ProjectionSetup};
use crate::germ::{branch_count_with, PlaneCurveGerm};
use crate::monodromy::{
    compose_univariate, ctrim, half_min_root_modulus, to_cupoly, track_circle, CUPoly, FiberFamily,
    MonodromyError, TrackOptions, TrackingCertificate,
};
use crate::polyarith::{cluster_roots, fmt_rat, gcd, rat_to_f64, univariate_roots, MPoly, Rational};
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Parametrization of an arc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArcPath {
    /// Polynomials in `t` over ℚ.
    Exact { x: MPoly, y: MPoly },
    /// Polynomials in `t` with complex coefficients (ascending).
    Numeric { x: CUPoly, y: CUPoly },
}

/// Where an arc comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArcProvenance {
    Generic { direction: [String; 2] },
    ChartPushdown { chart: String, crossing: usize, exponents: [u32; 2] },
    DiscriminantBranch { branch: String },
    TotallyReducible { order: u64 },
    User,
}

/// An arc germ `t ↦ (x(t), y(t))` through the origin of the base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub path: ArcPath,
    pub provenance: ArcProvenance,
    /// The arc meets the discriminant only at `t = 0` for `|t| ≤ valid_radius`
    /// (zero when not yet certified).
    #[serde(with = "crate::serde_rational")]
    pub valid_radius: Rational,
}

fn exponents_of(p: &MPoly) -> Vec<u32> {
    p.terms().map(|(e, _)| e.first().copied().unwrap_or(0)).collect()
}

fn exponents_of_c(p: &CUPoly) -> Vec<u32> {
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    p.iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 1e-14 * scale)
        .map(|(k, _)| k as u32)
        .collect()
}

fn check_injective(exps: &[u32]) -> Result<(), DecideError> {
    if exps.contains(&0) {
        return Err(DecideError::InvalidArc("the arc does not start at the origin".into()));
    }
    let g = exps.iter().fold(0u32, |g, &e| num_integer::gcd(g, e));
    if g == 0 {
        return Err(DecideError::InvalidArc("the arc is constant".into()));
    }
    if g > 1 {
        return Err(DecideError::InvalidArc(format!(
            "the arc factors through t ↦ t^{g} (not generically injective)"
        )));
    }
    Ok(())
}

/// Largest `2^-k ≤ r`, `k ≥ 1`.
pub(crate) fn dyadic_below(r: f64) -> Rational {
    let mut q = Rational::new(1.into(), 2.into());
    let mut k = 0;
    while rat_to_f64(&q) > r && k < 200 {
        q = &q / &Rational::from_integer(2.into());
        k += 1;
    }
    q
}

impl Arc {
    /// Exact arc; checks that it starts at the origin and is generically
    /// injective.
    pub fn exact(x: &MPoly, y: &MPoly, provenance: ArcProvenance) -> Result<Arc, DecideError> {
        let (x, y) = (x.with_vars(&["t"]), y.with_vars(&["t"]));
        let mut e = exponents_of(&x);
        e.extend(exponents_of(&y));
        check_injective(&e)?;
        Ok(Arc {
            path: ArcPath::Exact { x, y },
            provenance,
            valid_radius: Rational::zero(),
        })
    }

    /// Arc with complex coefficients.
    pub fn numeric(x: CUPoly, y: CUPoly, provenance: ArcProvenance) -> Result<Arc, DecideError> {
        let mut e = exponents_of_c(&x);
        e.extend(exponents_of_c(&y));
        check_injective(&e)?;
        Ok(Arc {
            path: ArcPath::Numeric {
                x: ctrim(x),
                y: ctrim(y),
            },
            provenance,
            valid_radius: Rational::zero(),
        })
    }

    /// Coefficients as complex polynomials.
    pub fn complex(&self) -> (CUPoly, CUPoly) {
        match &self.path {
            ArcPath::Exact { x, y } => (cu(x), cu(y)),
            ArcPath::Numeric { x, y } => (x.clone(), y.clone()),
        }
    }

    /// Human-readable `(x(t), y(t))`.
    pub fn text(&self) -> [String; 2] {
        match &self.path {
            ArcPath::Exact { x, y } => [x.to_string(), y.to_string()],
            ArcPath::Numeric { x, y } => [ctext(x), ctext(y)],
        }
    }

    /// Tangent direction `(a : b)` (lowest-order coefficients).
    pub fn tangent_direction(&self) -> (Complex64, Complex64) {
        let (x, y) = self.complex();
        let ox = exponents_of_c(&x).into_iter().min().unwrap_or(u32::MAX);
        let oy = exponents_of_c(&y).into_iter().min().unwrap_or(u32::MAX);
        let o = ox.min(oy) as usize;
        let at = |p: &CUPoly| p.get(o).copied().unwrap_or_default();
        (at(&x), at(&y))
    }

    /// `Δ(x(t), y(t))` over ℚ, for exact arcs.
    pub fn restrict_exact(&self, p: &MPoly) -> Option<MPoly> {
        match &self.path {
            ArcPath::Exact { x, y } => Some(compose_arc(p, x, y, &["t"])),
            ArcPath::Numeric { .. } => None,
        }
    }
}

fn cu(p: &MPoly) -> CUPoly {
    if p.is_zero() {
        Vec::new()
    } else {
        to_cupoly(p, "t")
    }
}

/// Human-readable form of a numeric arc coordinate: the first few nonzero
/// terms, then the order of the omitted tail.
fn ctext(p: &CUPoly) -> String {
    const SHOWN: usize = 6;
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let terms: Vec<(usize, Complex64)> = p
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, c)| c.norm() > 1e-300 && c.norm() > 1e-15 * scale)
        .collect();
    if terms.is_empty() {
        return "0".into();
    }
    let mut parts: Vec<String> = terms
        .iter()
        .take(SHOWN)
        .map(|(k, c)| {
            let coeff = if c.im.abs() <= 1e-15 * c.norm() {
                format!("{:.6e}", c.re)
            } else {
                format!("({:.6e}{:+.6e}i)", c.re, c.im)
            };
            match k {
                0 => coeff,
                1 => format!("{coeff}*t"),
                _ => format!("{coeff}*t^{k}"),
            }
        })
        .collect();
    if let Some((k, _)) = terms.get(SHOWN) {
        parts.push(format!("O(t^{k})"));
    }
    parts.join(" + ")
}

/// Options for [`arc_section`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionOptions {
    pub track: TrackOptions,
    /// Relative distance below which fiber roots are merged into one
    /// multiple root (sections inside the discriminant).
    pub merge_tol: f64,
}

impl Default for SectionOptions {
    fn default() -> Self {
        SectionOptions {
            track: TrackOptions::default(),
            merge_tol: 1e-6,
        }
    }
}

/// Branch data of an arc-section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionReport {
    /// `F(x(t), y(t), z)` for exact arcs.
    pub equation: Option<MPoly>,
    /// The arc lies in the discriminant; multiplicities are those of the
    /// non-reduced section and irreducibility refers to the reduced one.
    pub inside_discriminant: bool,
    pub branch_count: usize,
    /// Multiplicity of each branch, descending.
    pub multiplicities: Vec<u32>,
    pub irreducible: bool,
    /// `"newton"`, `"tracking"` or `"clusters"`.
    pub method: String,
    /// Radius of the loop `|t| = r` used (or certified) for the arc.
    pub radius: f64,
    pub certificates: Vec<TrackingCertificate>,
}

fn report(
    equation: Option<MPoly>,
    inside: bool,
    mut multiplicities: Vec<u32>,
    method: &str,
    radius: f64,
    certificates: Vec<TrackingCertificate>,
) -> SectionReport {
    multiplicities.sort_unstable_by(|a, b| b.cmp(a));
    let count = multiplicities.len();
    SectionReport {
        equation,
        inside_discriminant: inside,
        branch_count: count,
        irreducible: count == 1 && (inside || multiplicities == [1]),
        multiplicities,
        method: method.into(),
        radius,
        certificates,
    }
}

/// Certified radius for an exact arc not contained in `Δ`: no nonzero root
/// of `Δ(x(t), y(t))` lies in `|t| ≤ r`.  Errors if the arc's declared
/// radius is too large.
fn certify_exact_radius(dt: &MPoly, declared: &Rational) -> Result<Rational, DecideError> {
    let q = dt.div_monomial(&dt.monomial_content());
    if q.total_degree() == 0 {
        return Ok(if declared.is_zero() {
            Rational::new(1.into(), 2.into())
        } else {
            declared.clone()
        });
    }
    let g = gcd(&q, &q.derivative("t"));
    let q = q.exact_div(&g).expect("gcd divides");
    let boxes = univariate_roots(&to_cupoly(&q, "t"))?;
    let decl = rat_to_f64(declared);
    let mut inner = f64::INFINITY;
    for b in &boxes {
        let lo = b.center().norm() - b.radius;
        if decl > 0.0 && lo <= decl {
            return Err(DecideError::ArcMeetsDelta {
                t: format!("{:.6}{:+.6}i", b.re, b.im),
                modulus: b.center().norm(),
            });
        }
        inner = inner.min(lo);
    }
    if decl > 0.0 {
        return Ok(declared.clone());
    }
    Ok(dyadic_below((inner / 2.0).min(0.5)))
}

/// Arc-section `F(x(t), y(t), z) = 0` of an arc with its branch data.
pub fn arc_section(
    setup: &ProjectionSetup,
    delta: &MPoly,
    arc: &Arc,
    opts: &SectionOptions,
) -> Result<SectionReport, DecideError> {
    let sheets = setup.sheets();
    match &arc.path {
        ArcPath::Exact { x, y } => {
            let dt = compose_arc(delta, x, y, &["t"]);
            let g = compose_arc(&setup.adapted, x, y, &["t", "z"]);
            if dt.is_zero() {
                let germ = PlaneCurveGerm::new(g.clone(), true)?;
                let bc = branch_count_with(&germ, &opts.track)?;
                return Ok(report(Some(g), true, bc.multiplicities, &bc.method, 0.0, bc.certificates));
            }
            if matches!(arc.provenance, ArcProvenance::DiscriminantBranch { .. }) {
                // A truncated parametrization of a discriminant branch.
                return cluster_section(setup, &cu(x), &cu(y), opts, Some(g));
            }
            let r = certify_exact_radius(&dt, &arc.valid_radius)?;
            let germ = PlaneCurveGerm::new(g.clone(), false)?;
            let bc = branch_count_with(&germ, &opts.track)?;
            Ok(report(
                Some(g),
                false,
                bc.multiplicities,
                &bc.method,
                rat_to_f64(&r),
                bc.certificates,
            ))
        }
        ArcPath::Numeric { x, y } => {
            if matches!(arc.provenance, ArcProvenance::DiscriminantBranch { .. }) {
                return cluster_section(setup, x, y, opts, None);
            }
            let q = compose_univariate(delta, &[("x", x.clone()), ("y", y.clone())]);
            let scale = q.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if scale == 0.0 {
                return cluster_section(setup, x, y, opts, None);
            }
            let k = q.iter().take_while(|c| c.norm() <= 1e-10 * scale).count();
            let mut r = half_min_root_modulus(&q[k..], 0.0)
                .map_err(DecideError::from)?
                .unwrap_or(0.5)
                .min(0.5);
            let decl = rat_to_f64(&arc.valid_radius);
            if decl > 0.0 {
                if decl >= 2.0 * r {
                    return Err(DecideError::ArcMeetsDelta {
                        t: "numeric".into(),
                        modulus: 2.0 * r,
                    });
                }
                r = decl;
            }
            let fam = FiberFamily::compose(&setup.adapted, x, y, "z");
            let mut last = None;
            for _ in 0..30 {
                match track_circle(&fam, Complex64::zero(), r, sheets, &opts.track) {
                    Ok(o) => {
                        let mults = vec![1; o.permutation.cycle_count()];
                        return Ok(report(None, false, mults, "tracking", r, vec![o.certificate]));
                    }
                    Err(e @ MonodromyError::FiberDegenerate(_)) => {
                        last = Some(e);
                        r /= 2.0;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Err(last.expect("attempted").into())
        }
    }
}

/// Fiber roots at `t` merged into clusters: `(center, size)`.
fn fiber_clusters(
    fam: &FiberFamily,
    t: Complex64,
    sheets: Option<usize>,
    tol: f64,
) -> Result<Vec<(Complex64, usize)>, DecideError> {
    let c = ctrim(fam.at(t));
    let boxes = univariate_roots(&c)?;
    let mut boxes = boxes;
    boxes.sort_by(|a, b| a.center().norm().total_cmp(&b.center().norm()));
    if let Some(k) = sheets {
        if boxes.len() > k {
            let (inner, outer) = (boxes[k - 1].center().norm(), boxes[k].center().norm());
            if outer < 2.0 * inner {
                return Err(MonodromyError::FiberDegenerate(format!(
                    "sheets not separated over t = {t}"
                ))
                .into());
            }
            boxes.truncate(k);
        }
    }
    let scale = boxes.iter().map(|b| b.center().norm()).fold(0.0, f64::max).max(t.norm());
    // Merge distance is relative to the size of the fiber.
    let shrunk: Vec<_> = boxes
        .iter()
        .map(|b| crate::polyarith::ComplexBox::new(b.center(), 0.0))
        .collect();
    let cl = cluster_roots(&shrunk, 0.0);
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    // single-linkage with the relative tolerance
    let mut parent: Vec<usize> = (0..cl.len()).collect();
    for i in 0..cl.len() {
        for j in 0..i {
            if (cl[i].center - cl[j].center).norm() <= tol * scale.max(1e-300) {
                let (a, b) = (root(&parent, i), root(&parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    for i in 0..cl.len() {
        let r = root(&parent, i);
        if r == i {
            let members: Vec<usize> = (0..cl.len()).filter(|&k| root(&parent, k) == i).collect();
            let size: usize = members.iter().map(|&k| cl[k].members.len()).sum();
            let c = members
                .iter()
                .map(|&k| cl[k].center * cl[k].members.len() as f64)
                .sum::<Complex64>()
                / size as f64;
            out.push((c, size));
        }
    }
    Ok(out)
}

fn root(p: &[usize], mut i: usize) -> usize {
    while p[i] != i {
        i = p[i];
    }
    i
}

/// Branches of the section over an arc lying in the discriminant: the
/// fiber is clustered into multiple roots, cluster centers are tracked
/// around `|t| = r`, and every cycle of clusters is one branch whose
/// multiplicity is the cluster size.
fn cluster_section(
    setup: &ProjectionSetup,
    x: &CUPoly,
    y: &CUPoly,
    opts: &SectionOptions,
    equation: Option<MPoly>,
) -> Result<SectionReport, DecideError> {
    let fam = FiberFamily::compose(&setup.adapted, x, y, "z");
    let sheets = setup.sheets();
    let mut last: Option<DecideError> = None;
    let mut r = 0.25;
    for _ in 0..24 {
        match track_clusters(&fam, r, sheets, opts) {
            Ok((mults, cert)) => {
                return Ok(report(equation, true, mults, "clusters", r, vec![cert]));
            }
            Err(e) => {
                last = Some(e);
                r /= 2.0;
            }
        }
    }
    Err(last.expect("attempted"))
}

fn track_clusters(
    fam: &FiberFamily,
    r: f64,
    sheets: Option<usize>,
    opts: &SectionOptions,
) -> Result<(Vec<u32>, TrackingCertificate), DecideError> {
    let at = |theta: f64| fiber_clusters(fam, Complex64::from_polar(r, theta), sheets, opts.merge_tol);
    let start = at(0.0)?;
    let profile = |c: &[(Complex64, usize)]| {
        let mut s: Vec<usize> = c.iter().map(|p| p.1).collect();
        s.sort_unstable();
        s
    };
    let want = profile(&start);
    let fail = |m: String| DecideError::from(MonodromyError::Certification(m));
    let mut n = opts.track.initial_steps.max(64);
    while n <= opts.track.step_cap.min(1 << 16) {
        let mut cur = start.clone();
        // label[i] = index in `start` of the cluster now at position i
        let mut labels: Vec<usize> = (0..cur.len()).collect();
        let mut min_sep = f64::INFINITY;
        let mut max_move: f64 = 0.0;
        let mut ok = true;
        for k in 1..=n {
            let next = at(TAU * k as f64 / n as f64)?;
            if profile(&next) != want {
                return Err(fail(format!("cluster profile changes along |t| = {r}")));
            }
            let sep = separation(&next);
            min_sep = min_sep.min(sep);
            let mut new_labels = vec![usize::MAX; next.len()];
            for (i, (c, size)) in cur.iter().enumerate() {
                let (j, dist) = next
                    .iter()
                    .enumerate()
                    .map(|(j, (d, _))| (j, (c - d).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("nonempty fiber");
                if dist >= sep / 3.0 || new_labels[j] != usize::MAX || next[j].1 != *size {
                    ok = false;
                    break;
                }
                max_move = max_move.max(dist);
                new_labels[j] = labels[i];
            }
            if !ok {
                break;
            }
            cur = next;
            labels = new_labels;
        }
        if ok {
            // Permutation: cluster labels[i] ended at position i; the final
            // fiber equals the start fiber up to order, match positions.
            let mut perm = vec![usize::MAX; start.len()];
            for (i, (c, _)) in cur.iter().enumerate() {
                let j = start
                    .iter()
                    .enumerate()
                    .min_by(|a, b| (a.1 .0 - c).norm().total_cmp(&(b.1 .0 - c).norm()))
                    .map(|(j, _)| j)
                    .expect("nonempty");
                perm[labels[i]] = j;
            }
            let mut seen = vec![false; perm.len()];
            let mut mults = Vec::new();
            for s in 0..perm.len() {
                if seen[s] {
                    continue;
                }
                let mut k = s;
                while !seen[k] {
                    seen[k] = true;
                    k = perm[k];
                    if k == usize::MAX {
                        return Err(fail("cluster matching is not a bijection".into()));
                    }
                }
                mults.push(start[s].1 as u32);
            }
            let cert = TrackingCertificate {
                steps: n,
                min_root_separation: min_sep,
                max_step_perturbation: max_move,
                refinement_passes: 0,
                halvings: 0,
            };
            return Ok((mults, cert));
        }
        n *= 2;
    }
    Err(fail(format!("cluster tracking did not resolve along |t| = {r}")))
}

fn separation(c: &[(Complex64, usize)]) -> f64 {
    let mut s = f64::INFINITY;
    for i in 0..c.len() {
        for j in 0..i {
            s = s.min((c[i].0 - c[j].0).norm());
        }
    }
    s
}

/// `(a·t, b·t)`.
pub(crate) fn linear_arc(a: &Rational, b: &Rational) -> (MPoly, MPoly) {
    let t = MPoly::var("t", &["t"]);
    (t.scale(a), t.scale(b))
}

/// Direction text.
pub(crate) fn direction_text(a: &Rational, b: &Rational) -> [String; 2] {
    [fmt_rat(a), fmt_rat(b)]
}
