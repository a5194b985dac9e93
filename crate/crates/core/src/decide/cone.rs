//! Tangent-cone screening: lines of the projective plane meeting the
//! (reduced) tangent cone in a single point, and the comparison between the
//! tangent directions of the discriminant and the branch directions of the
//! projected cone.

use super::{DecideError, ProjectionSetup, XYZ};
use crate::monodromy::compose_univariate;
use crate::polyarith::{
    cluster_roots, discriminant_raw, fmt_rat, gcd, initial_form, radical, rational_approximation,
    rational_roots_with_rest, resultant, univariate_roots, MPoly, Rational,
};
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Relative tolerance for numerically vanishing contact coefficients.
pub const CONTACT_TOL: f64 = 1e-6;

/// Shape of the reduced tangent cone with respect to admissible lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeClass {
    /// A single line: every line is admissible.
    SingleLine,
    /// Lines through a common vertex: the lines through the vertex.
    ConcurrentLines,
    /// A smooth conic: its tangent lines.
    Conic,
    /// A line with maximal contact at a smooth point (hyperflex).
    MaxContactCurve,
    /// A line through a singular point meeting the cone nowhere else.
    ReducibleWithCommonPoint,
    /// No line meets the cone in exactly one point.
    NoAdmissibleLine,
    /// Numerical screening was inconclusive.
    UnknownNumeric,
}

/// A line `a·x + b·y + c·z = 0` meeting the cone in one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleLine {
    /// Exact coefficients when rational.
    pub exact: Option<[String; 3]>,
    pub coefficients: [Complex64; 3],
    pub point: [Complex64; 3],
    /// Intersection multiplicity at the point (`= deg` of the reduced cone).
    pub contact: u32,
    pub numeric_certified: bool,
}

/// An inflection point of the reduced cone with the contact order of its
/// tangent line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlexPoint {
    pub point: [Complex64; 3],
    pub contact: u32,
    /// `|c_j| / max|c|` for the coefficients of the cone restricted to the
    /// tangent line, `j = 0..=deg`.
    pub relative_coefficients: Vec<f64>,
}

/// Result of [`tangent_cone_screen`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentCone {
    pub form: MPoly,
    /// Multiplicity `m` (degree of the initial form).
    pub degree: u32,
    pub reduced: MPoly,
    pub reduced_degree: u32,
    pub classification: ConeClass,
    /// Description of the admissible lines (e.g. "every line").
    pub admissible: String,
    pub admissible_lines: Vec<AdmissibleLine>,
    /// Vertex of a cone made of concurrent lines.
    pub vertex: Option<[String; 3]>,
    pub flexes: Vec<FlexPoint>,
    pub singular_points: Vec<[Complex64; 3]>,
    pub notes: Vec<String>,
}

// ---------------------------------------------------------------- linear algebra

/// Rank and one nonzero nullspace vector (if any) of a rational matrix.
fn rank_nullspace(rows: &[Vec<Rational>], ncols: usize) -> (usize, Option<Vec<Rational>>) {
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = Rational::one() / &a[r][c];
        for j in 0..ncols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..ncols {
                    let v = &a[r][j] * &f;
                    a[i][j] = &a[i][j] - &v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free = (0..ncols).find(|c| !pivots.contains(c));
    let null = free.map(|f| {
        let mut v = vec![Rational::zero(); ncols];
        v[f] = Rational::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[i][f].clone();
        }
        v
    });
    (r, null)
}

fn linear_coeffs(l: &MPoly) -> Vec<Rational> {
    let l = l.with_vars(&XYZ);
    vec![l.coeff(&[1, 0, 0]), l.coeff(&[0, 1, 0]), l.coeff(&[0, 0, 1])]
}

/// All partial derivatives of order `k` of `p`.
fn partials(p: &MPoly, k: u32) -> Vec<MPoly> {
    let mut cur = vec![p.clone()];
    for _ in 0..k {
        let mut next = Vec::new();
        for q in &cur {
            for v in XYZ {
                let d = q.derivative(v);
                if !d.is_zero() {
                    next.push(d);
                }
            }
        }
        cur = next;
    }
    cur
}

fn cross(a: &[Complex64; 3], b: &[Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn cnorm(v: &[Complex64; 3]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Distance between two unit vectors as points of the projective plane.
fn projective_distance(a: &[Complex64; 3], b: &[Complex64; 3]) -> f64 {
    let ip: Complex64 = (0..3).map(|i| a[i] * b[i].conj()).sum();
    (1.0 - ip.norm()).max(0.0).sqrt()
}

fn unit(v: [Complex64; 3]) -> [Complex64; 3] {
    let n = cnorm(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

fn grad_at(r: &MPoly, p: &[Complex64; 3]) -> [Complex64; 3] {
    let g = |v: &str| r.derivative(v).with_vars(&XYZ).eval_complex(p);
    [g("x"), g("y"), g("z")]
}

fn coeff_norm(r: &MPoly) -> f64 {
    r.terms()
        .map(|(_, c)| crate::polyarith::rat_to_f64(c).abs())
        .fold(0.0, f64::max)
}

/// `R(P + s·V)` as a polynomial in `s`.
fn restrict_to_line(r: &MPoly, p: &[Complex64; 3], v: &[Complex64; 3]) -> Vec<Complex64> {
    let subs: Vec<(&str, Vec<Complex64>)> = XYZ
        .iter()
        .zip(p.iter().zip(v))
        .map(|(n, (a, b))| (*n, vec![*a, *b]))
        .collect();
    let mut c = compose_univariate(&r.with_vars(&XYZ), &subs);
    c.resize(r.total_degree() as usize + 1, Complex64::zero());
    c
}

// ------------------------------------------------------- numeric intersection

/// Generic projective change used to put intersection points in the affine
/// chart `z = 1` with distinct `x`-coordinates.
const GENERIC: [[i64; 3]; 3] = [[3, 1, -2], [-1, 4, 1], [2, -3, 5]];

fn apply_generic(p: &MPoly) -> MPoly {
    let mut m = BTreeMap::new();
    for (i, v) in XYZ.iter().enumerate() {
        let mut l = MPoly::zero(&XYZ);
        for (j, w) in XYZ.iter().enumerate() {
            let c = Rational::from_integer(GENERIC[i][j].into());
            l = &l + &MPoly::var(w, &XYZ).scale(&c);
        }
        m.insert(v.to_string(), l);
    }
    p.with_vars(&XYZ).substitute(&m).with_vars(&XYZ)
}

fn from_generic(q: &[Complex64; 3]) -> [Complex64; 3] {
    let mut out = [Complex64::zero(); 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i] += q[j] * GENERIC[i][j] as f64;
        }
    }
    out
}

/// Common zeros of two ternary forms without common components, as unit
/// vectors (numerical; multiple intersections appear once).
fn intersect(a: &MPoly, b: &MPoly) -> Result<Vec<[Complex64; 3]>, DecideError> {
    let one = Rational::one();
    let ga = apply_generic(a).eval_var("z", &one).with_vars(&["x", "y"]);
    let gb = apply_generic(b).eval_var("z", &one).with_vars(&["x", "y"]);
    let res = resultant(&ga, &gb, "y").with_vars(&["x"]);
    if res.is_zero() {
        return Err(DecideError::UnsupportedProjection(
            "the cone and an auxiliary curve share a component".into(),
        ));
    }
    if res.total_degree() == 0 {
        return Ok(Vec::new());
    }
    // Work with the squarefree part so that every root is simple.
    let res = radical(&res).with_vars(&["x"]);
    let coeffs = crate::monodromy::to_cupoly(&res, "x");
    let boxes = univariate_roots(&coeffs)?;
    let cl = cluster_roots(&boxes, 1e-7);
    let mut out = Vec::new();
    for c in cl {
        let x0 = c.center;
        let ya = univariate_roots(&ctrim_lead(ga.univariate_complex("y", &[("x", x0)])))
            .unwrap_or_default();
        let best = ya
            .iter()
            .map(|yb| {
                let y = yb.center();
                (y, gb.eval_complex(&[x0, y]).norm() / (1.0 + y.norm()).powi(gb.total_degree() as i32))
            })
            .min_by(|u, v| u.1.total_cmp(&v.1));
        let Some((mut y, _)) = best else { continue };
        // x0 is a simple root of the squarefree resultant, hence accurate;
        // polish y on the first curve with x fixed (the vertical line is not
        // tangent to it in generic coordinates).
        let x = x0;
        let ay = ga.derivative("y");
        for _ in 0..8 {
            let pt = [x, y];
            let d = ay.eval_complex(&pt);
            if d.norm() < 1e-14 {
                break;
            }
            let dy = ga.eval_complex(&pt) / d;
            y -= dy;
            if dy.norm() < 1e-15 * (1.0 + y.norm()) {
                break;
            }
        }
        out.push(unit(from_generic(&[x, y, Complex64::new(1.0, 0.0)])));
    }
    Ok(out)
}

/// Rational singular points of the curve `{r = 0}` (exact).
fn exact_singular_points(r: &MPoly) -> Vec<[Rational; 3]> {
    let one = Rational::one();
    let g = apply_generic(r).eval_var("z", &one).with_vars(&["x", "y"]);
    let (gx, gy) = (g.derivative("x"), g.derivative("y"));
    let mut res = resultant(&gx, &gy, "y").with_vars(&["x"]);
    if res.is_zero() {
        res = resultant(&g, &gx, "y").with_vars(&["x"]);
    }
    // Squarefree part: rational root detection is numerical.
    let res = radical(&res).with_vars(&["x"]);
    let Some(rc) = res.univariate_rational("x") else {
        return Vec::new();
    };
    let mut out: Vec<[Rational; 3]> = Vec::new();
    for (x0, _) in rational_roots_with_rest(&rc).0 {
        let h = [&g, &gx, &gy]
            .iter()
            .map(|p| p.eval_var("x", &x0).with_vars(&["y"]))
            .fold(MPoly::zero(&["y"]), |acc, p| gcd(&acc, &p).with_vars(&["y"]));
        if h.total_degree() == 0 {
            continue;
        }
        let Some(hc) = radical(&h).with_vars(&["y"]).univariate_rational("y") else { continue };
        for (y0, _) in rational_roots_with_rest(&hc).0 {
            let q = [x0.clone(), y0, one.clone()];
            let mut p = [Rational::zero(), Rational::zero(), Rational::zero()];
            for (i, pi) in p.iter_mut().enumerate() {
                for (j, qj) in q.iter().enumerate() {
                    *pi += qj * &Rational::from_integer(GENERIC[i][j].into());
                }
            }
            if XYZ.iter().all(|v| eval_exact(&r.derivative(v), &p).is_zero()) && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

fn ctrim_lead(mut c: Vec<Complex64>) -> Vec<Complex64> {
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    while c.len() > 1 && c.last().map(|z| z.norm() <= 1e-13 * scale).unwrap_or(false) {
        c.pop();
    }
    c
}

/// Contact order of the tangent line at `p` (relative tolerance).
fn contact_at(r: &MPoly, p: &[Complex64; 3]) -> Option<(u32, Vec<f64>, [Complex64; 3])> {
    let g = grad_at(r, p);
    if cnorm(&g) == 0.0 {
        return None;
    }
    let v = cross(&g, p);
    if cnorm(&v) < 1e-12 {
        return None;
    }
    let v = unit(v);
    let c = restrict_to_line(r, p, &v);
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rel: Vec<f64> = c.iter().map(|z| z.norm() / scale).collect();
    let contact = rel.iter().position(|&x| x > CONTACT_TOL).unwrap_or(rel.len()) as u32;
    let line = unit(g);
    Some((contact, rel, line))
}

fn hessian(r: &MPoly) -> MPoly {
    let h: Vec<Vec<MPoly>> = XYZ
        .iter()
        .map(|a| XYZ.iter().map(|b| r.derivative(a).derivative(b).with_vars(&XYZ)).collect())
        .collect();
    let m2 = |i: usize, j: usize, k: usize, l: usize| &(&h[i][k] * &h[j][l]) - &(&h[i][l] * &h[j][k]);
    let t0 = &h[0][0] * &m2(1, 2, 1, 2);
    let t1 = &h[0][1] * &m2(1, 2, 0, 2);
    let t2 = &h[0][2] * &m2(1, 2, 0, 1);
    &(&t0 - &t1) + &t2
}

fn is_singular(r: &MPoly, p: &[Complex64; 3]) -> bool {
    let g = grad_at(r, p);
    cnorm(&g) <= 1e-7 * coeff_norm(r).max(1e-300)
}

fn exact_point(p: &[Complex64; 3]) -> Option<[Rational; 3]> {
    let k = (0..3).max_by(|&i, &j| p[i].norm().total_cmp(&p[j].norm()))?;
    let q: Vec<Complex64> = p.iter().map(|c| c / p[k]).collect();
    let mut out: Vec<Rational> = Vec::new();
    for c in q {
        if c.im.abs() > 1e-7 {
            return None;
        }
        out.push(rational_approximation(c.re, 1e-7, 1000)?);
    }
    Some([out[0].clone(), out[1].clone(), out[2].clone()])
}

fn eval_exact(p: &MPoly, q: &[Rational; 3]) -> Rational {
    let mut v = p.with_vars(&XYZ);
    for (n, c) in XYZ.iter().zip(q) {
        v = v.eval_var(n, c);
    }
    v.constant_term()
}

fn to_c3(q: &[Rational; 3]) -> [Complex64; 3] {
    [0, 1, 2].map(|i| Complex64::new(crate::polyarith::rat_to_f64(&q[i]), 0.0))
}

fn cross_exact(a: &[Rational; 3], b: &[Rational; 3]) -> [Rational; 3] {
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

/// Lines through the rational point `p` meeting `{r = 0}` only at `p`.
fn lines_through(r: &MPoly, p: &[Rational; 3]) -> Vec<AdmissibleLine> {
    let k = r.total_degree();
    let e = |i: usize| {
        let mut v = [Rational::zero(), Rational::zero(), Rational::zero()];
        v[i] = Rational::one();
        v
    };
    // Two points completing `p` to a basis.
    let mut basis = None;
    'outer: for i in 0..3 {
        for j in (i + 1)..3 {
            let (a, b) = (e(i), e(j));
            let c = cross_exact(&a, &b);
            let det = &(&(&p[0] * &c[0]) + &(&p[1] * &c[1])) + &(&p[2] * &c[2]);
            if !det.is_zero() {
                basis = Some((a, b));
                break 'outer;
            }
        }
    }
    let (q0, q1) = basis.expect("p is nonzero");
    let vars = ["l", "m", "s"];
    let v = |n: &str| MPoly::var(n, &vars);
    let k3 = |q: &Rational| MPoly::constant(q.clone(), &vars);
    let mut sub = BTreeMap::new();
    for i in 0..3 {
        let img = &(&v("l") * &k3(&p[i])) + &(&v("m") * &(&k3(&q0[i]) + &(&v("s") * &k3(&q1[i]))));
        sub.insert(XYZ[i].to_string(), img);
    }
    let g = r.with_vars(&XYZ).substitute(&sub).with_vars(&vars);
    // coefficient of l^{k-j} m^j as a polynomial in s
    let (im, is) = (g.var_index("m").expect("m"), g.var_index("s").expect("s"));
    let coeff = |j: u32| {
        let mut c = MPoly::zero(&["s"]);
        for (ex, q) in g.terms() {
            if ex[im] == j {
                c = &c + &MPoly::monomial(q.clone(), &["s"], &[ex[is]]);
            }
        }
        c
    };
    let mut out = Vec::new();
    let mut common = MPoly::zero(&["s"]);
    for j in 1..k {
        common = gcd(&common, &coeff(j));
    }
    let top = coeff(k);
    let mk = |point: &[Rational; 3], other: &[Rational; 3]| {
        let l = cross_exact(point, other);
        AdmissibleLine {
            exact: Some([fmt_rat(&l[0]), fmt_rat(&l[1]), fmt_rat(&l[2])]),
            coefficients: to_c3(&l),
            point: to_c3(point),
            contact: k,
            numeric_certified: false,
        }
    };
    if common.is_zero() {
        // every line through p (cone of concurrent lines) — not expected here
        return out;
    }
    if common.total_degree() > 0 {
        let cs = common.univariate_rational("s").expect("univariate");
        let (roots, rest) = rational_roots_with_rest(&cs);
        for (s0, _) in roots {
            if top.eval_var("s", &s0).constant_term().is_zero() {
                continue;
            }
            let q = [0, 1, 2].map(|i| &q0[i] + &(&s0 * &q1[i]));
            out.push(mk(p, &q));
        }
        if rest.len() > 1 {
            let rc: Vec<Complex64> = rest
                .iter()
                .map(|c| Complex64::new(crate::polyarith::rat_to_f64(c), 0.0))
                .collect();
            for b in univariate_roots(&rc).unwrap_or_default() {
                let s0 = b.center();
                let pc = to_c3(p);
                let qc = [0, 1, 2].map(|i| to_c3(&q0)[i] + s0 * to_c3(&q1)[i]);
                out.push(AdmissibleLine {
                    exact: None,
                    coefficients: unit(cross(&pc, &qc)),
                    point: pc,
                    contact: k,
                    numeric_certified: true,
                });
            }
        }
    }
    // The line through p and q1 (s = ∞): leading coefficients in s.
    // The coefficient of m^j has degree at most j in s; its top part is the
    // restriction to that line.
    let lead = |j: u32| coeff(j).coeff(&[j]);
    if (1..k).all(|j| lead(j).is_zero()) && !lead(k).is_zero() {
        out.push(mk(p, &q1));
    }
    out
}

// ------------------------------------------------------------ screening

/// Classify the tangent cone of `F` and list the lines meeting its reduced
/// cone in exactly one point.
pub fn tangent_cone_screen(f: &MPoly) -> Result<TangentCone, DecideError> {
    let form = initial_form(&f.with_vars(&XYZ))?.with_vars(&XYZ);
    let reduced = radical(&form).with_vars(&XYZ);
    let k = reduced.total_degree();
    let mut tc = TangentCone {
        degree: form.total_degree(),
        form,
        reduced: reduced.clone(),
        reduced_degree: k,
        classification: ConeClass::UnknownNumeric,
        admissible: String::new(),
        admissible_lines: Vec::new(),
        vertex: None,
        flexes: Vec::new(),
        singular_points: Vec::new(),
        notes: Vec::new(),
    };
    if k == 1 {
        tc.classification = ConeClass::SingleLine;
        tc.admissible = "every line".into();
        return Ok(tc);
    }
    let rows: Vec<Vec<Rational>> = partials(&reduced, k - 1).iter().map(linear_coeffs).collect();
    let (rank, null) = rank_nullspace(&rows, 3);
    if rank <= 2 {
        let p = null.expect("rank deficient");
        tc.vertex = Some([fmt_rat(&p[0]), fmt_rat(&p[1]), fmt_rat(&p[2])]);
        tc.classification = ConeClass::ConcurrentLines;
        tc.admissible = "every line through the vertex".into();
        return Ok(tc);
    }
    if k == 2 {
        tc.classification = ConeClass::Conic;
        tc.admissible = "tangent lines of the conic".into();
        return Ok(tc);
    }
    // Singular points: zeros of R and a generic combination of its partials
    // where the whole gradient vanishes.
    let comb = &(&reduced.derivative("x") + &reduced.derivative("y").scale(&Rational::from_integer(2.into())))
        + &reduced.derivative("z").scale(&Rational::from_integer((-3).into()));
    let mut exact_sing = exact_singular_points(&reduced);
    let cand = intersect(&reduced, &comb)?;
    let mut sing: Vec<[Complex64; 3]> = exact_sing.iter().map(|q| unit(to_c3(q))).collect();
    let mut irrational_singular = false;
    for p in cand.into_iter().filter(|p| is_singular(&reduced, p)) {
        if sing.iter().any(|q| projective_distance(q, &p) < 1e-5) {
            continue;
        }
        match exact_point(&p).filter(|q| XYZ.iter().all(|v| eval_exact(&reduced.derivative(v), q).is_zero())) {
            Some(q) if !exact_sing.contains(&q) => {
                sing.push(unit(to_c3(&q)));
                exact_sing.push(q);
            }
            Some(_) => {}
            None => {
                irrational_singular = true;
                sing.push(p);
            }
        }
    }
    tc.singular_points = sing;
    for q in &exact_sing {
        tc.admissible_lines.extend(lines_through(&reduced, q));
    }
    let through_singular = !tc.admissible_lines.is_empty();
    // Flexes: smooth points of R ∩ Hessian.
    let h = hessian(&reduced);
    if !h.is_zero() {
        // Line components of the cone lie in the Hessian; drop them.
        let common = gcd(&reduced, &h).with_vars(&XYZ);
        let curved = if common.total_degree() > 0 {
            reduced.exact_div(&common).expect("gcd divides").with_vars(&XYZ)
        } else {
            reduced.clone()
        };
        let flex_candidates = if curved.total_degree() > 0 {
            intersect(&curved, &h)?
        } else {
            Vec::new()
        };
        for p in flex_candidates {
            if is_singular(&reduced, &p) || tc.singular_points.iter().any(|q| projective_distance(q, &p) < 1e-5) {
                continue;
            }
            if let Some((contact, rel, line)) = contact_at(&reduced, &p) {
                if contact >= k {
                    tc.admissible_lines.push(AdmissibleLine {
                        exact: None,
                        coefficients: line,
                        point: p,
                        contact,
                        numeric_certified: true,
                    });
                }
                tc.flexes.push(FlexPoint {
                    point: p,
                    contact,
                    relative_coefficients: rel,
                });
            }
        }
    } else {
        tc.notes.push("the Hessian vanishes identically".into());
    }
    let hyperflex = tc.flexes.iter().any(|p| p.contact >= k);
    tc.classification = if hyperflex {
        ConeClass::MaxContactCurve
    } else if through_singular {
        ConeClass::ReducibleWithCommonPoint
    } else if irrational_singular {
        tc.notes
            .push("singular points of the cone are not rational; lines through them were not searched".into());
        ConeClass::UnknownNumeric
    } else {
        ConeClass::NoAdmissibleLine
    };
    tc.admissible = match tc.classification {
        ConeClass::MaxContactCurve => "tangent lines at hyperflexes".into(),
        ConeClass::ReducibleWithCommonPoint => "lines through a singular point meeting the cone only there".into(),
        ConeClass::NoAdmissibleLine => "none".into(),
        _ => "undetermined".into(),
    };
    Ok(tc)
}

// ------------------------------------------------ cone vs. discriminant

/// Result of [`cone_discriminant_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeDiscriminantReport {
    pub applicable: bool,
    pub reason: Option<String>,
    /// Reduced binary form whose roots are the tangent directions of `Δ`.
    pub delta_directions: Option<MPoly>,
    /// Reduced binary form of the branch directions of the projected cone.
    pub cone_directions: Option<MPoly>,
    /// Equality of the two forms up to a rational unit.
    pub exact_equal: bool,
    /// Largest chordal distance between matched direction sets.
    pub max_distance: f64,
    /// Roots `(a : b)` normalized as points of ℙ¹.
    pub delta_points: Vec<[Complex64; 2]>,
    pub cone_points: Vec<[Complex64; 2]>,
    /// The direction is assumed not to be an exceptional tangent (automatic
    /// when the reduced cone is smooth).
    pub hypothesis_assumed: bool,
}

fn binary_points(b: &MPoly) -> Vec<[Complex64; 2]> {
    let b = b.with_vars(&["x", "y"]);
    let e = b.total_degree();
    // points (x : y) with b(x, y) = 0: roots w of b(1, w) plus (0 : 1) when
    // the degree in w drops.
    let w = b.eval_var("x", &Rational::one()).with_vars(&["y"]);
    let dw = w.degree_in("y");
    let mut out: Vec<[Complex64; 2]> = Vec::new();
    if dw >= 1 {
        let c = crate::monodromy::to_cupoly(&w, "y");
        for r in univariate_roots(&c).unwrap_or_default() {
            out.push(normalize2([Complex64::new(1.0, 0.0), r.center()]));
        }
    }
    for _ in dw..e {
        out.push([Complex64::zero(), Complex64::new(1.0, 0.0)]);
    }
    out
}

fn normalize2(p: [Complex64; 2]) -> [Complex64; 2] {
    let n = (p[0].norm_sqr() + p[1].norm_sqr()).sqrt();
    [p[0] / n, p[1] / n]
}

fn chordal(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    // |a × b| for unit vectors
    (a[0] * b[1] - a[1] * b[0]).norm()
}

fn hausdorff(a: &[[Complex64; 2]], b: &[[Complex64; 2]]) -> f64 {
    let one = |u: &[[Complex64; 2]], v: &[[Complex64; 2]]| {
        u.iter()
            .map(|p| v.iter().map(|q| chordal(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    one(a, b).max(one(b, a))
}

/// Compare the tangent directions of `Δ` with the directions of the lines
/// through the projection center that are tangent to the cone (branch
/// directions of the projected cone).
pub fn cone_discriminant_check(
    setup: &ProjectionSetup,
    delta: &MPoly,
) -> Result<ConeDiscriminantReport, DecideError> {
    let screen = tangent_cone_screen(&setup.adapted)?;
    let mut rep = ConeDiscriminantReport {
        applicable: true,
        reason: None,
        delta_directions: None,
        cone_directions: None,
        exact_equal: false,
        max_distance: f64::INFINITY,
        delta_points: Vec::new(),
        cone_points: Vec::new(),
        hypothesis_assumed: false,
    };
    if matches!(screen.classification, ConeClass::SingleLine | ConeClass::ConcurrentLines) {
        rep.applicable = false;
        rep.reason = Some("the tangent cone is a line or a union of lines".into());
        return Ok(rep);
    }
    let r = screen.reduced.clone();
    let smooth = screen.reduced_degree == 2 || screen.singular_points.is_empty();
    rep.hypothesis_assumed = !smooth;
    // Cone side.
    let mut cone_side = if r.degree_in("z") >= 2 {
        radical(&discriminant_raw(&r, "z")?.with_vars(&["x", "y"]))
    } else {
        MPoly::one(&["x", "y"])
    };
    let at_p = r.eval_var("x", &Rational::zero()).eval_var("y", &Rational::zero());
    if at_p.is_zero() {
        let zero = Rational::zero();
        let one = Rational::one();
        let pe = [zero.clone(), zero, one];
        let (a, b) = (eval_exact(&r.derivative("x"), &pe), eval_exact(&r.derivative("y"), &pe));
        if a.is_zero() && b.is_zero() {
            rep.reason = Some("the projection center is a singular point of the cone".into());
        } else {
            let line = &MPoly::var("x", &["x", "y"]).scale(&a) + &MPoly::var("y", &["x", "y"]).scale(&b);
            cone_side = &cone_side * &line;
        }
    }
    let cone_side = if cone_side.total_degree() == 0 {
        cone_side
    } else {
        radical(&cone_side).with_vars(&["x", "y"])
    };
    let delta_side = radical(&initial_form(&delta.with_vars(&["x", "y"]))?).with_vars(&["x", "y"]);
    rep.exact_equal = cone_side.equal_up_to_unit(&delta_side);
    rep.delta_points = binary_points(&delta_side);
    rep.cone_points = binary_points(&cone_side);
    rep.max_distance = if rep.delta_points.len() == rep.cone_points.len() {
        hausdorff(&rep.delta_points, &rep.cone_points)
    } else {
        f64::INFINITY
    };
    rep.delta_directions = Some(delta_side);
    rep.cone_directions = Some(cone_side);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{axis_direction, setup_projection};
    use crate::polyarith::parse_poly;

    fn f(s: &str) -> MPoly {
        parse_poly(s, &XYZ).unwrap()
    }

    #[test]
    fn classification_of_simple_cones() {
        assert_eq!(tangent_cone_screen(&f("z^3 - x^4 - y^5")).unwrap().classification, ConeClass::SingleLine);
        assert_eq!(tangent_cone_screen(&f("z^4 - 4*x*z + 3*y^2")).unwrap().classification, ConeClass::Conic);
        let c = tangent_cone_screen(&f("x*y*(x - y) + z^4")).unwrap();
        assert_eq!(c.classification, ConeClass::ConcurrentLines);
        assert_eq!(c.vertex.unwrap(), ["0", "0", "1"]);
        let c = tangent_cone_screen(&f("x^2*y - y^2*z + x^4")).unwrap();
        assert_ne!(c.classification, ConeClass::ConcurrentLines);
    }

    #[test]
    fn quartic_without_hyperflexes() {
        let c = tangent_cone_screen(&f("x^4 + y^4 + x^2*z^2 + y*z^3 + z^4")).unwrap();
        assert_eq!(c.classification, ConeClass::NoAdmissibleLine);
        assert!(c.singular_points.is_empty());
        assert!(!c.flexes.is_empty());
        assert!(c.flexes.iter().all(|p| p.contact < 4));
    }

    #[test]
    fn fermat_quartic_has_hyperflexes() {
        // The Fermat quartic has 12 hyperflexes, e.g. at (1 : ζ : 0), ζ^4 = -1.
        let c = tangent_cone_screen(&f("x^4 + y^4 + z^4")).unwrap();
        assert_eq!(c.classification, ConeClass::MaxContactCurve);
        assert!(c.admissible_lines.iter().all(|l| l.contact == 4));
    }

    #[test]
    fn lines_through_singular_points() {
        // Two conics with fourfold contact at (0:0:1); their common tangent
        // y = 0 meets the union only there.
        let c = tangent_cone_screen(&f("(y*z - x^2)*(y*z - x^2 - y^2) + x^5")).unwrap();
        assert_eq!(c.classification, ConeClass::ReducibleWithCommonPoint);
        let l = c.admissible_lines.iter().find(|l| l.exact.is_some()).unwrap();
        assert_eq!(l.contact, 4);
        // The cuspidal cubic has a flex with contact 3 at (0:1:0).
        let c = tangent_cone_screen(&f("y^2*z - x^3 + x^5")).unwrap();
        assert_eq!(c.classification, ConeClass::MaxContactCurve);
    }

    #[test]
    fn cone_discriminant_circle() {
        let s = setup_projection(&f("z^2 + x^2 + y^2 + y^3"), &axis_direction("z").unwrap()).unwrap();
        let d = s.discriminant().unwrap();
        let r = cone_discriminant_check(&s, &d).unwrap();
        assert!(r.applicable && r.exact_equal);
        assert!(r.max_distance < 1e-12);
        assert_eq!(r.delta_points.len(), 2);
        assert!((r.delta_points[0][1] / r.delta_points[0][0]).im.abs() > 0.99);
    }

    #[test]
    fn cone_discriminant_through_center() {
        let s = setup_projection(&f("z^4 - 4*x*z + 3*y^2"), &axis_direction("z").unwrap()).unwrap();
        let d = s.discriminant().unwrap();
        let r = cone_discriminant_check(&s, &d).unwrap();
        assert!(r.exact_equal);
        assert_eq!(r.cone_directions.unwrap(), parse_poly("x", &["x", "y"]).unwrap());
        let s = setup_projection(&f("z^3 - x^4 - y^4"), &axis_direction("z").unwrap()).unwrap();
        let d = s.discriminant().unwrap();
        assert!(!cone_discriminant_check(&s, &d).unwrap().applicable);
    }
}
