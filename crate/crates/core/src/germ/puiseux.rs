//! Newton–Puiseux expansion of plane-curve germs.
//!
//! Each branch is produced as a parametrization `t = λ·S^N`,
//! `z = Σ c_k S^{e_k}`.  While every edge root is rational the expansion
//! uses Duval's substitution `s = ξ^v S^q`, `w = S^p (ξ^u + w')` with
//! `uq - vp = 1`, which keeps all coefficients in ℚ and selects exactly one
//! member of each conjugacy class.  At the first irrational edge root the
//! subtree switches to complex floats with the plain substitution
//! `s = S^q`, `w = S^p (ξ^{1/q} + w')`, one fixed `q`-th root per class.
//! In float mode coefficients below a relative threshold are treated as
//! zero, and multiple edge roots are refined as simple roots of the
//! appropriate derivative.

use super::GermError;
use crate::polyarith::{
    aberth, certify_roots, cluster_roots, fmt_rat, horner, rat_to_f64, rational_roots_with_rest,
    squarefree_factors, ComplexBox, MPoly, Rational,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Num, One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::Neg;

/// Relative magnitude below which float coefficients are dropped.
pub const FLOAT_ZERO_TOL: f64 = 1e-9;

/// Exact parametrization `t = lambda·S^n`, `z = Σ c S^e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactParam {
    #[serde(with = "crate::serde_rational")]
    pub lambda: Rational,
    pub n: u32,
    #[serde(with = "crate::serde_rational_terms")]
    pub terms: Vec<(u32, Rational)>,
}

impl ExactParam {
    /// `(t(S), z(S))` as polynomials in the variable `var`.
    pub fn as_polys(&self, var: &str) -> (MPoly, MPoly) {
        let t = MPoly::monomial(self.lambda.clone(), &[var], &[self.n]);
        let mut z = MPoly::zero(&[var]);
        for (e, c) in &self.terms {
            z = &z + &MPoly::monomial(c.clone(), &[var], &[*e]);
        }
        (t, z)
    }
}

/// One Puiseux branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxBranch {
    pub ramification_index: u32,
    /// Exponents in `t` (`e_k / N`), strictly increasing.
    #[serde(with = "crate::serde_rational_vec")]
    pub exponents: Vec<Rational>,
    /// Coefficients of `t^{exponent}` for one choice of `λ^{1/N}`.
    pub coefficients: Vec<ComplexBox>,
    pub multiplicity: u32,
    #[serde(with = "crate::serde_rational")]
    pub truncation_order: Rational,
    /// Present when every Newton step stayed rational.
    pub exact: Option<ExactParam>,
    /// Parametrization in `S` with float coefficients (always present).
    pub lambda: Complex64,
    pub n: u32,
    pub terms: Vec<(u32, Complex64)>,
}

impl PuiseuxBranch {
    /// Report text: `t^(1/e): c1 t^(a1) + …`.
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .exponents
            .iter()
            .zip(&self.coefficients)
            .map(|(e, c)| format!("{} t^({})", c.to_text(), fmt_rat(e)))
            .collect();
        format!(
            "e={} m={}: {}",
            self.ramification_index,
            self.multiplicity,
            if parts.is_empty() { "0".into() } else { parts.join(" + ") }
        )
    }

    /// Evaluate `(t(S), z(S))` for the float parametrization.
    pub fn eval(&self, s: Complex64) -> (Complex64, Complex64) {
        let t = self.lambda * s.powu(self.n);
        let z = self
            .terms
            .iter()
            .fold(Complex64::new(0.0, 0.0), |a, (e, c)| a + c * s.powu(*e));
        (t, z)
    }
}

trait Coef: Clone + Debug + Num + Neg<Output = Self> {
    const EXACT: bool;
    fn to_c(&self) -> Complex64;
    fn powi(&self, k: i64) -> Self {
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc * self.clone();
        }
        if k < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }
}

impl Coef for Rational {
    const EXACT: bool = true;
    fn to_c(&self) -> Complex64 {
        Complex64::new(rat_to_f64(self), 0.0)
    }
}

impl Coef for Complex64 {
    const EXACT: bool = false;
    fn to_c(&self) -> Complex64 {
        *self
    }
    fn powi(&self, k: i64) -> Self {
        self.powi(k as i32)
    }
}

type Poly2<K> = BTreeMap<(u32, u32), K>;

#[derive(Clone, Debug)]
struct State<K> {
    h: Poly2<K>,
    lambda: K,
    n: u32,
    terms: Vec<(u32, K)>,
    mu: K,
    m: u32,
    mult: u32,
}

#[derive(Clone, Debug)]
struct RawBranch {
    lambda: Complex64,
    n: u32,
    terms: Vec<(u32, Complex64)>,
    exact: Option<ExactParam>,
    multiplicity: u32,
}

fn to_complex_state(st: &State<Rational>) -> State<Complex64> {
    State {
        h: st.h.iter().map(|(k, v)| (*k, v.to_c())).collect(),
        lambda: st.lambda.to_c(),
        n: st.n,
        terms: st.terms.iter().map(|(e, c)| (*e, c.to_c())).collect(),
        mu: st.mu.to_c(),
        m: st.m,
        mult: st.mult,
    }
}

fn clean<K: Coef>(h: &mut Poly2<K>) {
    if K::EXACT {
        h.retain(|_, v| !v.is_zero());
        return;
    }
    let maxc = h.values().map(|v| v.to_c().norm()).fold(0.0, f64::max);
    h.retain(|_, v| v.to_c().norm() > FLOAT_ZERO_TOL * maxc);
}

fn emit<K: Coef>(st: &State<K>, out: &mut Vec<RawBranch>, exact: Option<ExactParam>) {
    out.push(RawBranch {
        lambda: st.lambda.to_c(),
        n: st.n,
        terms: st
            .terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (*e, c.to_c()))
            .collect(),
        exact,
        multiplicity: st.mult,
    });
}

fn exact_param(st: &State<Rational>) -> ExactParam {
    ExactParam {
        lambda: st.lambda.clone(),
        n: st.n,
        terms: st
            .terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .cloned()
            .collect(),
    }
}

/// Substitute `s = α S^q`, `w = S^p (β + w')` and divide by the lowest `S`
/// power.
fn substitute<K: Coef>(h: &Poly2<K>, p: u32, q: u32, alpha: &K, beta: &K) -> Poly2<K> {
    let maxi = h.keys().map(|k| k.0).max().unwrap_or(0) as usize;
    // binomial rows and powers of beta
    let mut binom = vec![vec![K::one()]];
    for i in 1..=maxi {
        let prev = &binom[i - 1];
        let mut row = vec![K::one(); i + 1];
        for k in 1..i {
            row[k] = prev[k - 1].clone() + prev[k].clone();
        }
        binom.push(row);
    }
    let mut bpow = vec![K::one()];
    for i in 1..=maxi {
        bpow.push(bpow[i - 1].clone() * beta.clone());
    }
    let mut out: Poly2<K> = BTreeMap::new();
    for (&(i, j), c) in h {
        let cj = c.clone() * alpha.powi(j as i64);
        let sexp = q * j + p * i;
        for k in 0..=i as usize {
            let coef = cj.clone() * binom[i as usize][k].clone() * bpow[i as usize - k].clone();
            let e = out.entry((k as u32, sexp)).or_insert_with(K::zero);
            *e = e.clone() + coef;
        }
    }
    clean(&mut out);
    let minj = out.keys().map(|k| k.1).min().unwrap_or(0);
    out.into_iter().map(|((i, j), c)| ((i, j - minj), c)).collect()
}

fn egcd_uv(p: u32, q: u32) -> (i64, i64) {
    // u q - v p = 1
    let e = (q as i64).extended_gcd(&(p as i64));
    debug_assert_eq!(e.gcd, 1);
    (e.x, -e.y)
}

fn rational_roots(psi: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let (found, rest) = rational_roots_with_rest(psi);
    (
        found.into_iter().filter(|(r, _)| !r.is_zero()).map(|(r, _)| r).collect(),
        rest,
    )
}

fn float_roots(psi: &[Complex64]) -> Vec<Complex64> {
    let mut psi = psi.to_vec();
    while psi.len() > 1 && psi.last().unwrap().norm() == 0.0 {
        psi.pop();
    }
    if psi.len() < 2 {
        return Vec::new();
    }
    let approx = aberth(&psi, None);
    let boxes = certify_roots(&psi, &approx);
    let mut out = Vec::new();
    for cl in cluster_roots(&boxes, 1e-7) {
        let k = cl.members.len();
        let mut xi = cl.center;
        if k > 1 {
            // refine as a simple root of the (k-1)-th derivative
            let mut d = psi.clone();
            for _ in 0..k - 1 {
                d = d
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, c)| c * i as f64)
                    .collect();
            }
            let dd: Vec<Complex64> = d
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect();
            for _ in 0..50 {
                let f = horner(&d, xi);
                let fp = horner(&dd, xi);
                if fp.norm() == 0.0 {
                    break;
                }
                let step = f / fp;
                xi -= step;
                if step.norm() <= 1e-16 * (1.0 + xi.norm()) {
                    break;
                }
            }
        }
        if xi.norm() > 0.0 {
            out.push(xi);
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

const MAX_DEPTH: usize = 200;

struct Edge<K> {
    p: u32,
    q: u32,
    psi: Vec<K>,
}

/// Shared bookkeeping for one expansion node: emits finished branches and
/// returns the Newton edges still to be explored.
fn prelude<K: Coef>(
    st: &mut State<K>,
    order: &Rational,
    depth: usize,
    out: &mut Vec<RawBranch>,
    exact: fn(&State<K>) -> Option<ExactParam>,
) -> Result<Vec<Edge<K>>, GermError> {
    if depth > MAX_DEPTH {
        return Err(GermError::Puiseux("expansion depth exceeded".into()));
    }
    clean(&mut st.h);
    if st.h.is_empty() {
        return Err(GermError::Puiseux("expansion polynomial vanished".into()));
    }
    let imin = st.h.keys().map(|k| k.0).min().unwrap();
    if imin > 0 {
        // w ≡ 0 is a root of multiplicity imin: the series terminates.
        let mut fin = st.clone();
        fin.mult = st.mult * imin;
        emit(&fin, out, exact(&fin));
        st.h = std::mem::take(&mut st.h)
            .into_iter()
            .map(|((i, j), c)| ((i - imin, j), c))
            .collect();
    }
    let dh = match st.h.keys().filter(|k| k.1 == 0).map(|k| k.0).min() {
        Some(d) => d,
        None => return Err(GermError::Puiseux("germ is not z-finite".into())),
    };
    if dh == 0 {
        return Ok(Vec::new());
    }
    let next_exp = Rational::new(BigInt::from(st.m), BigInt::from(st.n));
    if dh == 1 && &next_exp > order && st.m > 0 {
        emit(st, out, exact(st));
        return Ok(Vec::new());
    }
    let pts: Vec<(u32, u32)> = st.h.keys().cloned().collect();
    let poly = super::newton::newton_polygon_of_points(&pts);
    Ok(poly
        .segments
        .iter()
        .map(|seg| {
            let (ia, ja) = seg.from;
            let (ib, jb) = seg.to;
            let g = (ib - ia).gcd(&(ja - jb));
            let q = (ib - ia) / g;
            let p = (ja - jb) / g;
            let psi = (0..=g)
                .map(|k| {
                    st.h.get(&(ia + k * q, ja - k * p))
                        .cloned()
                        .unwrap_or_else(K::zero)
                })
                .collect();
            Edge { p, q, psi }
        })
        .collect())
}

fn expand_exact(
    mut st: State<Rational>,
    order: &Rational,
    depth: usize,
    out: &mut Vec<RawBranch>,
) -> Result<(), GermError> {
    let edges = prelude(&mut st, order, depth, out, |s| Some(exact_param(s)))?;
    for e in edges {
        let (roots, rest) = rational_roots(&e.psi);
        let (u, v) = egcd_uv(e.p, e.q);
        for r in roots {
            let alpha = r.powi(v);
            let beta = r.powi(u);
            let child = step(&st, e.p, e.q, &alpha, &beta);
            expand_exact(child, order, depth + 1, out)?;
        }
        if rest.len() > 1 {
            let st_c = to_complex_state(&st);
            let rest_c: Vec<Complex64> = rest.iter().map(|c| c.to_c()).collect();
            for r in float_roots(&rest_c) {
                let beta = r.powf(1.0 / e.q as f64);
                let child = step(&st_c, e.p, e.q, &Complex64::one(), &beta);
                expand_float(child, order, depth + 1, out)?;
            }
        }
    }
    Ok(())
}

fn expand_float(
    mut st: State<Complex64>,
    order: &Rational,
    depth: usize,
    out: &mut Vec<RawBranch>,
) -> Result<(), GermError> {
    let edges = prelude(&mut st, order, depth, out, |_| None)?;
    for e in edges {
        for r in float_roots(&e.psi) {
            let beta = r.powf(1.0 / e.q as f64);
            let child = step(&st, e.p, e.q, &Complex64::one(), &beta);
            expand_float(child, order, depth + 1, out)?;
        }
    }
    Ok(())
}

fn step<K: Coef>(st: &State<K>, p: u32, q: u32, alpha: &K, beta: &K) -> State<K> {
    let h = substitute(&st.h, p, q, alpha, beta);
    let lambda = st.lambda.clone() * alpha.powi(st.n as i64);
    let mut terms: Vec<(u32, K)> = st
        .terms
        .iter()
        .map(|(e, c)| (e * q, c.clone() * alpha.powi(*e as i64)))
        .collect();
    let am = alpha.powi(st.m as i64);
    terms.push((q * st.m + p, st.mu.clone() * am.clone() * beta.clone()));
    State {
        h,
        lambda,
        n: st.n * q,
        terms,
        mu: st.mu.clone() * am,
        m: q * st.m + p,
        mult: st.mult,
    }
}

fn to_branch(raw: RawBranch, order: &Rational) -> PuiseuxBranch {
    let n = raw.n;
    let g = raw.terms.iter().fold(n, |g, (e, _)| g.gcd(e)).max(1);
    let ram = n / g;
    let lam_root = raw.lambda.powf(1.0 / n as f64);
    let mut exps = Vec::new();
    let mut coefs = Vec::new();
    for (e, c) in &raw.terms {
        exps.push(Rational::new(BigInt::from(*e), BigInt::from(n)));
        let v = c / lam_root.powu(*e);
        let rad = if raw.exact.is_some() { 1e-12 } else { 1e-7 } * (1.0 + v.norm());
        coefs.push(ComplexBox::new(v, rad));
    }
    PuiseuxBranch {
        ramification_index: ram,
        exponents: exps,
        coefficients: coefs,
        multiplicity: raw.multiplicity,
        truncation_order: order.clone(),
        exact: raw.exact,
        lambda: raw.lambda,
        n: raw.n,
        terms: raw.terms,
    }
}

/// Puiseux branches of `g(t, z)` through the origin, truncated so that every
/// branch is separated and carries all terms of `t`-exponent ≤ `order`.
/// Multiplicities come from the squarefree decomposition of `g` in `z`.
pub fn puiseux_expand(g: &MPoly, tvar: &str, zvar: &str, order: &Rational) -> Result<Vec<PuiseuxBranch>, GermError> {
    let g = g.with_vars(&[tvar, zvar]);
    let ti = g.var_index(tvar).unwrap();
    let zi = g.var_index(zvar).unwrap();
    let mut out = Vec::new();
    for sf in squarefree_factors(&g, zvar) {
        let f = sf.factor.with_vars(&[tvar, zvar]);
        let h: Poly2<Rational> = f
            .terms()
            .map(|(e, c)| ((e[zi], e[ti]), c.clone()))
            .collect();
        let st = State {
            h,
            lambda: Rational::one(),
            n: 1,
            terms: Vec::new(),
            mu: Rational::one(),
            m: 0,
            mult: sf.multiplicity,
        };
        // A factor that does not vanish at the origin contributes nothing.
        if !f.constant_term().is_zero() {
            continue;
        }
        let mut raw = Vec::new();
        expand_exact(st, order, 0, &mut raw)?;
        out.extend(raw.into_iter().map(|r| to_branch(r, order)));
    }
    Ok(out)
}
