//! Resultants, discriminants, gcds and squarefree decomposition.
//!
//! Polynomials are viewed as univariate in a distinguished variable with
//! coefficients in ℚ[other variables].  Resultants use the fraction-free
//! subresultant remainder sequence; gcds use primitive remainder sequences
//! with recursive content extraction.

use super::mpoly::{rat, MPoly};
use super::PolyError;

type UPoly = Vec<MPoly>;

fn trim(p: &mut UPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn deg(p: &UPoly) -> isize {
    p.len() as isize - 1
}

fn to_u(f: &MPoly, var: &str) -> UPoly {
    let mut v = f.coeffs_in(var);
    trim(&mut v);
    v
}

fn from_u(p: &UPoly, var: &str, template: &MPoly) -> MPoly {
    if p.is_empty() {
        return MPoly::zero(template.vars());
    }
    MPoly::from_coeffs_in(var, p).with_vars(template.vars())
}

/// Pseudo-remainder on coefficient lists: `lc(b)^(da-db+1) a mod b`.
fn prem_u(a: &UPoly, b: &UPoly) -> UPoly {
    let db = deg(b);
    assert!(db >= 0, "pseudo-division by zero");
    let mut r = a.clone();
    if deg(&r) < db {
        return r;
    }
    let lb = b.last().unwrap().clone();
    let mut e = deg(a) - db + 1;
    while deg(&r) >= db && !r.is_empty() {
        let shift = (deg(&r) - db) as usize;
        let lr = r.last().unwrap().clone();
        let mut nr: UPoly = r.iter().map(|c| c * &lb).collect();
        for (i, bc) in b.iter().enumerate() {
            nr[i + shift] = &nr[i + shift] - &(&lr * bc);
        }
        trim(&mut nr);
        r = nr;
        e -= 1;
    }
    if e > 0 {
        let f = lb.pow(e as u32);
        r = r.iter().map(|c| c * &f).collect();
    }
    r
}

/// Pseudo-remainder of `a` by `b` with respect to `var`.
pub fn prem(a: &MPoly, b: &MPoly, var: &str) -> MPoly {
    let (a, b) = MPoly::unify(a, b);
    let r = prem_u(&to_u(&a, var), &to_u(&b, var));
    from_u(&r, var, &a)
}

fn exact(a: &MPoly, b: &MPoly) -> MPoly {
    a.exact_div(b)
        .expect("subresultant sequence division must be exact")
}

/// Resultant `Res_var(f, g)` via the subresultant remainder sequence.
pub fn resultant(f: &MPoly, g: &MPoly, var: &str) -> MPoly {
    let (f, g) = MPoly::unify(f, g);
    let out_vars: Vec<String> = f.vars().iter().filter(|v| *v != var).cloned().collect();
    let mut a = to_u(&f, var);
    let mut b = to_u(&g, var);
    if a.is_empty() || b.is_empty() {
        return MPoly::zero(&out_vars);
    }
    let mut s = 1i64;
    if deg(&a) < deg(&b) {
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            s = -1;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if deg(&b) == 0 {
        let r = b[0].pow(deg(&a) as u32);
        return r.scale(&rat(s)).with_vars(&out_vars);
    }
    let one = MPoly::one(f.vars());
    let mut gg = one.clone();
    let mut h = one;
    loop {
        let da = deg(&a);
        let db = deg(&b);
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = prem_u(&a, &b);
        a = b;
        let den = &gg * &h.pow(delta);
        b = r.iter().map(|c| exact(c, &den)).collect();
        gg = a.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            exact(&gg.pow(delta), &h.pow(delta - 1))
        };
        if b.is_empty() {
            return MPoly::zero(&out_vars);
        }
        if deg(&b) == 0 {
            break;
        }
    }
    let da = deg(&a) as u32;
    let lb = b.last().unwrap();
    let res = exact(&lb.pow(da), &h.pow(da - 1));
    res.scale(&rat(s)).with_vars(&out_vars)
}

/// Unnormalized discriminant `(-1)^(d(d-1)/2) Res(f, f') / lc(f)`.
pub fn discriminant_raw(f: &MPoly, var: &str) -> Result<MPoly, PolyError> {
    let d = f.degree_in(var);
    if d == 0 {
        return Err(PolyError::ConstantInVariable(var.to_string()));
    }
    let r = resultant(f, &f.derivative(var), var);
    let lc = f.lc_in(var).with_vars(r.vars());
    let mut q = exact(&r, &lc);
    if (d as u64 * (d as u64 - 1) / 2) % 2 == 1 {
        q = -q;
    }
    Ok(q)
}

/// Discriminant with respect to `var`, normalized to integer primitive form
/// with positive lex-leading coefficient.
pub fn discriminant_z(f: &MPoly, var: &str) -> Result<MPoly, PolyError> {
    Ok(discriminant_raw(f, var)?.normalized())
}

fn main_var(a: &MPoly, b: &MPoly) -> Option<String> {
    let mut used = a.used_vars();
    used.extend(b.used_vars());
    let used = super::mpoly::canonical_vars(&used);
    used.last().cloned()
}

/// Content of `f` with respect to `var` (gcd of its coefficients).
pub fn content_in(f: &MPoly, var: &str) -> MPoly {
    let cs = f.coeffs_in(var);
    let mut g = MPoly::zero(f.vars());
    for c in cs.iter().rev() {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, c);
        if g.is_constant() {
            break;
        }
    }
    g.with_vars(f.vars())
}

/// Primitive part of `f` with respect to `var`.
pub fn primitive_part_in(f: &MPoly, var: &str) -> MPoly {
    if f.is_zero() {
        return f.clone();
    }
    let c = content_in(f, var);
    exact(f, &c).normalized()
}

/// Greatest common divisor, normalized (integer primitive, positive lex
/// leading coefficient).  `gcd(0, 0) = 0`.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    let (a, b) = MPoly::unify(a, b);
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one(a.vars());
    }
    let var = match main_var(&a, &b) {
        Some(v) => v,
        None => return MPoly::one(a.vars()),
    };
    if a.degree_in(&var) == 0 {
        return gcd(&a, &content_in(&b, &var));
    }
    if b.degree_in(&var) == 0 {
        return gcd(&b, &content_in(&a, &var));
    }
    let ca = content_in(&a, &var);
    let cb = content_in(&b, &var);
    let c = gcd(&ca, &cb);
    let mut p = to_u(&exact(&a, &ca), &var);
    let mut q = to_u(&exact(&b, &cb), &var);
    if deg(&p) < deg(&q) {
        std::mem::swap(&mut p, &mut q);
    }
    let template = a.clone();
    // Subresultant remainder sequence: coefficient growth stays polynomial
    // without a content computation at every step.
    let one = MPoly::one(a.vars());
    let (mut lg, mut h) = (one.clone(), one);
    let g = loop {
        let delta = (deg(&p) - deg(&q)) as u32;
        let r = prem_u(&p, &q);
        if r.is_empty() {
            break from_u(&q, &var, &template);
        }
        if deg(&r) == 0 {
            break MPoly::one(a.vars());
        }
        p = q;
        let den = &lg * &h.pow(delta);
        q = r.iter().map(|c| exact(c, &den)).collect();
        lg = p.last().unwrap().clone();
        if delta > 0 {
            h = exact(&lg.pow(delta), &h.pow(delta - 1));
        }
    };
    let g = if g.is_constant() {
        g
    } else {
        primitive_part_in(&g, &var)
    };
    (&c * &g).normalized()
}

/// One factor of a squarefree decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeFactor {
    pub factor: MPoly,
    pub multiplicity: u32,
}

/// Yun decomposition of the primitive part of `f` with respect to `var`:
/// `pp(f) = ∏ factor_i^multiplicity_i` up to a rational unit, factors
/// pairwise coprime and squarefree, all of positive degree in `var`.
pub fn squarefree_factors(f: &MPoly, var: &str) -> Vec<SquarefreeFactor> {
    let p = primitive_part_in(f, var);
    if p.degree_in(var) == 0 {
        return Vec::new();
    }
    let dp = p.derivative(var);
    let g = gcd(&p, &dp);
    let mut c = exact(&p, &g);
    let mut d = &exact(&dp, &g) - &c.derivative(var);
    let mut out = Vec::new();
    let mut i = 1;
    while c.degree_in(var) > 0 {
        let a = gcd(&c, &d);
        c = exact(&c, &a);
        d = &exact(&d, &a) - &c.derivative(var);
        if a.degree_in(var) > 0 {
            out.push(SquarefreeFactor {
                factor: a.normalized(),
                multiplicity: i,
            });
        }
        i += 1;
    }
    out
}

/// Squarefree part with respect to `var` and the multiplicity profile (one
/// entry per squarefree factor of the Yun decomposition, ascending).
pub fn squarefree_part(f: &MPoly, var: &str) -> (MPoly, Vec<u32>) {
    let fs = squarefree_factors(f, var);
    let mut prod = MPoly::one(f.vars());
    let mut prof = Vec::new();
    for sf in &fs {
        prod = &prod * &sf.factor;
        prof.push(sf.multiplicity);
    }
    if fs.is_empty() && !f.is_zero() {
        return (MPoly::one(f.vars()), Vec::new());
    }
    (prod.normalized(), prof)
}

/// Determinant of the Sylvester matrix of two univariate rational
/// polynomials; an independent (slow) oracle used in tests.
#[cfg(test)]
pub(crate) fn sylvester_resultant(
    a: &[super::Rational],
    b: &[super::Rational],
) -> super::Rational {
    use super::Rational;
    use num_traits::Zero;
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    let mut mat = vec![vec![Rational::zero(); size]; size];
    for i in 0..n {
        for (j, c) in a.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in b.iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    let mut det = Rational::from_integer(1.into());
    for col in 0..size {
        let piv = (col..size).find(|&r| !mat[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => return Rational::zero(),
        };
        if piv != col {
            mat.swap(piv, col);
            det = -det;
        }
        let pv = mat[col][col].clone();
        det *= &pv;
        for r in col + 1..size {
            let fct = &mat[r][col] / &pv;
            if fct.is_zero() {
                continue;
            }
            for c in col..size {
                let v = &mat[col][c] * &fct;
                mat[r][c] -= v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::{parse_poly, ratio};

    const V: [&str; 4] = ["x", "y", "z", "t"];

    fn p(s: &str) -> MPoly {
        parse_poly(s, &V).unwrap()
    }

    #[test]
    fn quartic_discriminant_unit_is_6912() {
        // z^4 + P z + Q has discriminant 256 Q^3 - 27 P^4.
        let f = p("z^4 - 4*x*z + 3*y^2");
        let raw = discriminant_raw(&f, "z").unwrap();
        assert_eq!(raw, p("6912*y^6 - 6912*x^4"));
        let n = discriminant_z(&f, "z").unwrap();
        assert_eq!(n, p("x^4 - y^6"));
        assert!(n.equal_up_to_unit(&p("(y^3-x^2)*(y^3+x^2)")));
    }

    #[test]
    fn quadratic_and_cubic_discriminants() {
        let g = p("x^3 + 2*x*y - y^5");
        let d2 = discriminant_raw(&(&p("z^2") - &g), "z").unwrap();
        assert_eq!(d2, g.scale(&rat(4)));
        let d3 = discriminant_raw(&(&p("z^3") - &g), "z").unwrap();
        assert_eq!(d3, (&g * &g).scale(&rat(-27)));
    }

    #[test]
    fn resultant_matches_sylvester_oracle_univariate() {
        let a = p("3*t^4 - t^3 + 1/2*t - 7");
        let b = p("t^3 + 2*t^2 - 5");
        let r = resultant(&a, &b, "t").as_constant().unwrap();
        let ca = a.univariate_rational("t").unwrap();
        let cb = b.univariate_rational("t").unwrap();
        assert_eq!(r, sylvester_resultant(&ca, &cb));
        // swapped arguments: sign (-1)^(4*3) = +1
        assert_eq!(resultant(&b, &a, "t").as_constant().unwrap(), r);
    }

    #[test]
    fn resultant_sign_for_odd_degrees() {
        let a = p("t^3 - 2");
        let b = p("t - 5");
        // Res(a, b) = (-1)^3 * a(5)... with lc(b)=1: Res(a,b) = (-1)^{3} a(5)
        let r = resultant(&a, &b, "t").as_constant().unwrap();
        let ca = a.univariate_rational("t").unwrap();
        let cb = b.univariate_rational("t").unwrap();
        assert_eq!(r, sylvester_resultant(&ca, &cb));
        assert_eq!(resultant(&b, &a, "t").as_constant().unwrap(), rat(123));
    }

    #[test]
    fn resultant_multivariate_specialization() {
        let a = p("z^3 - x*z + y^2 - 1");
        let b = p("x*z^2 + y*z - 3");
        let r = resultant(&a, &b, "z");
        for (xv, yv) in [(ratio(1, 2), ratio(-2, 3)), (rat(3), rat(5)), (ratio(-7, 4), rat(1))] {
            let rs = r.eval_var("x", &xv).eval_var("y", &yv).as_constant().unwrap();
            let aa = a.eval_var("x", &xv).eval_var("y", &yv);
            let bb = b.eval_var("x", &xv).eval_var("y", &yv);
            let o = sylvester_resultant(
                &aa.univariate_rational("z").unwrap(),
                &bb.univariate_rational("z").unwrap(),
            );
            assert_eq!(rs, o);
        }
    }

    #[test]
    fn common_factor_gives_zero_resultant() {
        let a = p("(z - x)*(z^2 + y)");
        let b = p("(z - x)*(z + 1)");
        assert!(resultant(&a, &b, "z").is_zero());
    }

    #[test]
    fn gcd_multivariate() {
        let c = p("x^2 - y*z + 1");
        let a = &c * &p("x - y^2");
        let b = &c * &p("x + z^3 - 2");
        assert_eq!(gcd(&a, &b), c.normalized());
        assert!(gcd(&p("x+y"), &p("x-y")).is_constant());
        assert_eq!(gcd(&p("6*x^2*y"), &p("4*x*y^3")), p("x*y"));
    }

    #[test]
    fn squarefree_examples() {
        let (s, prof) = squarefree_part(&p("z^3"), "z");
        assert_eq!(s, p("z"));
        assert_eq!(prof, vec![3]);
        let (s, prof) = squarefree_part(&p("(y^3-x^2)*(y^3+x^2)"), "y");
        assert_eq!(s, p("x^4 - y^6"));
        assert_eq!(prof, vec![1]);
        let (s, prof) = squarefree_part(&p("z^2*(z-t)"), "z");
        assert_eq!(s, p("z^2 - t*z").normalized());
        assert_eq!(prof, vec![1, 2]);
        let fs = squarefree_factors(&p("z^2*(z-t)"), "z");
        assert_eq!(fs[0].factor, p("z - t").normalized());
        assert_eq!(fs[1].factor, p("z"));
    }

    #[test]
    fn squarefree_ignores_content() {
        // x^2 is content in z, not a repeated factor in z.
        let (s, prof) = squarefree_part(&p("x^2*(z-x)^2*(z+1)"), "z");
        assert_eq!(s, p("(z-x)*(z+1)").normalized());
        assert_eq!(prof, vec![1, 2]);
    }

    #[test]
    fn prem_identity() {
        let a = p("x*z^3 + y*z + 1");
        let b = p("y*z^2 - x");
        let r = prem(&a, &b, "z");
        assert!(r.degree_in("z") < 2);
        // lc(b)^2 a - r is divisible by b
        let lhs = &(&p("y^2") * &a) - &r;
        assert!(lhs.exact_div(&b).is_some());
    }
}
