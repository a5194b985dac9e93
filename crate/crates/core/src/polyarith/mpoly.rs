//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are kept sorted in the canonical order `x, y, z, t, u, v, s`
//! (unknown names sort after these, alphabetically).  Terms live in a
//! `BTreeMap` keyed by exponent vectors, so iteration order is lexicographic
//! with the first variable most significant and the last entry is the
//! lex-leading term.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact rational number (reduced, positive denominator).
pub type Rational = BigRational;

/// Canonical variable order used for storage and serialization.
pub const CANONICAL_ORDER: [&str; 7] = ["x", "y", "z", "t", "u", "v", "s"];

fn var_key(name: &str) -> (usize, String) {
    match CANONICAL_ORDER.iter().position(|v| *v == name) {
        Some(i) => (i, String::new()),
        None => (CANONICAL_ORDER.len(), name.to_string()),
    }
}

/// Deduplicate and sort variable names into canonical order.
pub fn canonical_vars<S: AsRef<str>>(names: &[S]) -> Vec<String> {
    let mut v: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
    v.sort_by_key(|a| var_key(a));
    v.dedup();
    v
}

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Lossy conversion of a rational to `f64`.
pub fn rat_to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale down huge numerators/denominators before dividing.
            let nb = q.numer().bits() as i64;
            let db = q.denom().bits() as i64;
            let shift = (nb.max(db) - 900).max(0) as usize;
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                if n >= 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                n / d
            }
        }
    }
}

/// Exact rational from an `f64` (finite input).
pub fn rat_from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Sparse multivariate polynomial over ℚ.
#[derive(Clone, Debug)]
pub struct MPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MPoly {
    /// The zero polynomial in the given variables.
    pub fn zero<S: AsRef<str>>(vars: &[S]) -> Self {
        MPoly {
            vars: canonical_vars(vars),
            terms: BTreeMap::new(),
        }
    }

    /// A constant polynomial.
    pub fn constant<S: AsRef<str>>(c: Rational, vars: &[S]) -> Self {
        let vars = canonical_vars(vars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; vars.len()], c);
        }
        MPoly { vars, terms }
    }

    /// The constant one.
    pub fn one<S: AsRef<str>>(vars: &[S]) -> Self {
        Self::constant(Rational::one(), vars)
    }

    /// The polynomial consisting of a single variable.  The variable is
    /// added to `vars` if missing.
    pub fn var<S: AsRef<str>>(name: &str, vars: &[S]) -> Self {
        let mut all: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        all.push(name.to_string());
        let vars = canonical_vars(&all);
        let idx = vars.iter().position(|v| v == name).expect("variable present");
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, Rational::one());
        MPoly { vars, terms }
    }

    /// Single monomial `c * prod vars[i]^exps[i]` with `vars` in any order.
    pub fn monomial<S: AsRef<str>>(c: Rational, vars: &[S], exps: &[u32]) -> Self {
        assert_eq!(vars.len(), exps.len(), "exponent length mismatch");
        let pairs: Vec<(String, u32)> = vars
            .iter()
            .map(|s| s.as_ref().to_string())
            .zip(exps.iter().copied())
            .collect();
        let names: Vec<String> = pairs.iter().map(|p| p.0.clone()).collect();
        let cv = canonical_vars(&names);
        let mut e = vec![0; cv.len()];
        for (n, k) in pairs {
            let i = cv.iter().position(|v| *v == n).unwrap();
            e[i] += k;
        }
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        MPoly { vars: cv, terms }
    }

    /// Build from raw terms; exponent vectors are interpreted against `vars`
    /// in the order given (which may be non-canonical).
    pub fn from_terms<S: AsRef<str>>(
        vars: &[S],
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Self {
        let given: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        let cv = canonical_vars(&given);
        let perm: Vec<usize> = given
            .iter()
            .map(|n| cv.iter().position(|v| v == n).unwrap())
            .collect();
        let mut out = MPoly {
            vars: cv.clone(),
            terms: BTreeMap::new(),
        };
        for (e, c) in terms {
            assert_eq!(e.len(), given.len(), "exponent length mismatch");
            let mut ne = vec![0; cv.len()];
            for (i, k) in e.into_iter().enumerate() {
                ne[perm[i]] += k;
            }
            out.add_term(ne, c);
        }
        out
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Variable names (canonical order).
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Iterate `(exponents, coefficient)` in ascending lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the polynomial has no term of positive degree.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// The constant value when [`is_constant`](Self::is_constant).
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    /// Coefficient of the monomial 1.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.vars.len()])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Coefficient of a monomial given against `self.vars()`.
    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Index of a variable, if present.
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Variables with a positive exponent in some term.
    pub fn used_vars(&self) -> Vec<String> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| self.terms.keys().any(|e| e[*i] > 0))
            .map(|(_, v)| v.clone())
            .collect()
    }

    /// Re-express over a superset (or any set containing all used
    /// variables) of the current variables.
    pub fn with_vars<S: AsRef<str>>(&self, vars: &[S]) -> MPoly {
        let cv = canonical_vars(vars);
        if cv == self.vars {
            return self.clone();
        }
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|n| cv.iter().position(|v| v == n))
            .collect();
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = vec![0; cv.len()];
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let j = map[i].unwrap_or_else(|| {
                        panic!("variable {} is used but missing from target set", self.vars[i])
                    });
                    ne[j] = k;
                }
            }
            terms.insert(ne, c.clone());
        }
        MPoly { vars: cv, terms }
    }

    /// Drop variables that do not occur.
    pub fn trimmed(&self) -> MPoly {
        self.with_vars(&self.used_vars())
    }

    /// Bring two polynomials onto the union of their variables.
    pub fn unify(a: &MPoly, b: &MPoly) -> (MPoly, MPoly) {
        if a.vars == b.vars {
            return (a.clone(), b.clone());
        }
        let mut all = a.vars.clone();
        all.extend(b.vars.iter().cloned());
        (a.with_vars(&all), b.with_vars(&all))
    }

    /// Multiply every coefficient by `c`.
    pub fn scale(&self, c: &Rational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.vars);
        }
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Non-negative integer power.
    pub fn pow(&self, mut k: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::one(&self.vars);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Degree in a named variable (0 for the zero polynomial or absent var).
    pub fn degree_in(&self, name: &str) -> u32 {
        match self.var_index(name) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Lowest exponent of a named variable over all terms.
    pub fn order_in(&self, name: &str) -> u32 {
        match self.var_index(name) {
            Some(i) => self.terms.keys().map(|e| e[i]).min().unwrap_or(0),
            None => 0,
        }
    }

    /// Maximal total degree (0 for zero).
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Minimal total degree, i.e. the order at the origin (0 for zero).
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .min()
            .unwrap_or(0)
    }

    /// Homogeneous component of total degree `k`.
    pub fn homogeneous_component(&self, k: u32) -> MPoly {
        MPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == k)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// True when all terms share one total degree.
    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match it.next() {
            None => true,
            Some(d) => it.all(|k| k == d),
        }
    }

    /// Coefficients with respect to `name`: entry `k` is the coefficient of
    /// `name^k`, expressed over the same variable list.
    pub fn coeffs_in(&self, name: &str) -> Vec<MPoly> {
        let i = match self.var_index(name) {
            Some(i) => i,
            None => return vec![self.clone()],
        };
        let deg = self.degree_in(name) as usize;
        let mut out = vec![MPoly::zero(&self.vars); deg + 1];
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            let mut ne = e.clone();
            ne[i] = 0;
            out[k].terms.insert(ne, c.clone());
        }
        out
    }

    /// Inverse of [`coeffs_in`](Self::coeffs_in).
    pub fn from_coeffs_in(name: &str, coeffs: &[MPoly]) -> MPoly {
        let mut all: Vec<String> = vec![name.to_string()];
        for c in coeffs {
            all.extend(c.vars.iter().cloned());
        }
        let vars = canonical_vars(&all);
        let i = vars.iter().position(|v| v == name).unwrap();
        let mut out = MPoly::zero(&vars);
        for (k, c) in coeffs.iter().enumerate() {
            let c = c.with_vars(&vars);
            for (e, v) in c.terms {
                let mut ne = e;
                ne[i] += k as u32;
                out.add_term(ne, v);
            }
        }
        out
    }

    /// Leading coefficient with respect to `name` (an `MPoly` in the rest).
    pub fn lc_in(&self, name: &str) -> MPoly {
        self.coeffs_in(name).pop().unwrap_or_else(|| MPoly::zero(&self.vars))
    }

    /// Partial derivative.
    pub fn derivative(&self, name: &str) -> MPoly {
        let i = match self.var_index(name) {
            Some(i) => i,
            None => return MPoly::zero(&self.vars),
        };
        let mut out = MPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                out.add_term(ne, c * rat(e[i] as i64));
            }
        }
        out
    }

    /// Substitute polynomials for variables.  Variables not in `map` are
    /// kept as themselves.
    pub fn substitute(&self, map: &BTreeMap<String, MPoly>) -> MPoly {
        let mut all: Vec<String> = Vec::new();
        for (i, v) in self.vars.iter().enumerate() {
            match map.get(v) {
                Some(p) => all.extend(p.vars.iter().cloned()),
                None => {
                    if self.terms.keys().any(|e| e[i] > 0) {
                        all.push(v.clone())
                    }
                }
            }
        }
        let target = canonical_vars(&all);
        let images: Vec<MPoly> = self
            .vars
            .iter()
            .map(|v| match map.get(v) {
                Some(p) => p.with_vars(&target),
                None => MPoly::var(v, &target),
            })
            .collect();
        // Cache powers per variable.
        let mut powers: Vec<Vec<MPoly>> = images
            .iter()
            .map(|p| vec![MPoly::one(&target), p.clone()])
            .collect();
        let mut out = MPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut term = MPoly::constant(c.clone(), &target);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][k as usize];
            }
            out = &out + &term;
        }
        out
    }

    /// Substitute a single variable.
    pub fn subs1(&self, name: &str, value: &MPoly) -> MPoly {
        let mut m = BTreeMap::new();
        m.insert(name.to_string(), value.clone());
        self.substitute(&m)
    }

    /// Evaluate one variable at a rational value (the variable is kept in the
    /// variable list with exponent 0).
    pub fn eval_var(&self, name: &str, value: &Rational) -> MPoly {
        let i = match self.var_index(name) {
            Some(i) => i,
            None => return self.clone(),
        };
        let mut out = MPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[i];
            ne[i] = 0;
            out.add_term(ne, c * pow_rat(value, k));
        }
        out
    }

    /// Evaluate at a full complex point given in `self.vars()` order.
    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = Complex64::new(rat_to_f64(c), 0.0);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    m *= point[i].powu(k);
                }
            }
            acc += m;
        }
        acc
    }

    /// Evaluate at named complex values; missing variables are treated as 0.
    pub fn eval_named(&self, vals: &[(&str, Complex64)]) -> Complex64 {
        let pt: Vec<Complex64> = self
            .vars
            .iter()
            .map(|v| {
                vals.iter()
                    .find(|(n, _)| *n == v)
                    .map(|p| p.1)
                    .unwrap_or_else(|| Complex64::new(0.0, 0.0))
            })
            .collect();
        self.eval_complex(&pt)
    }

    /// Lex-leading term `(exponents, coefficient)`.
    pub fn leading_term(&self) -> Option<(&Vec<u32>, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let (mut r, d) = MPoly::unify(self, d);
        let vars = r.vars.clone();
        if let Some(c) = d.as_constant() {
            return Some(r.scale(&c.recip()));
        }
        let (dle, dlc) = {
            let (e, c) = d.leading_term().unwrap();
            (e.clone(), c.clone())
        };
        let mut q = MPoly::zero(&vars);
        while let Some((re, rc)) = r.leading_term() {
            if re.iter().zip(dle.iter()).any(|(a, b)| a < b) {
                return None;
            }
            let te: Vec<u32> = re.iter().zip(dle.iter()).map(|(a, b)| a - b).collect();
            let tc = rc / &dlc;
            let mut t = MPoly::zero(&vars);
            t.terms.insert(te, tc);
            r = &r - &(&t * &d);
            q = &q + &t;
        }
        Some(q)
    }

    /// Scale to integer coefficients with gcd 1 and positive lex-leading
    /// coefficient; returns `(unit, primitive)` with `self = unit * primitive`.
    pub fn primitive_rational(&self) -> (Rational, MPoly) {
        if self.is_zero() {
            return (Rational::one(), self.clone());
        }
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        let mut unit = Rational::new(num, den);
        if self.leading_term().unwrap().1.is_negative() {
            unit = -unit;
        }
        (unit.clone(), self.scale(&unit.recip()))
    }

    /// Primitive normalization without the unit.
    pub fn normalized(&self) -> MPoly {
        self.primitive_rational().1
    }

    /// Monic with respect to the lex-leading coefficient.
    pub fn monic(&self) -> MPoly {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Equal up to a nonzero rational factor.
    pub fn equal_up_to_unit(&self, other: &MPoly) -> bool {
        self.normalized() == other.normalized()
    }

    /// Largest monomial dividing every term, as exponent vector.
    pub fn monomial_content(&self) -> Vec<u32> {
        let n = self.vars.len();
        let mut m: Option<Vec<u32>> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(p) => (0..n).map(|i| p[i].min(e[i])).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; n])
    }

    /// Divide by a monomial given as exponent vector (must divide).
    pub fn div_monomial(&self, m: &[u32]) -> MPoly {
        MPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    (
                        e.iter().zip(m.iter()).map(|(a, b)| a - b).collect(),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    /// Complex coefficients in `name` after evaluating the other variables
    /// at the given named values.  Entry `k` is the coefficient of `name^k`.
    pub fn univariate_complex(&self, name: &str, vals: &[(&str, Complex64)]) -> Vec<Complex64> {
        self.coeffs_in(name)
            .iter()
            .map(|c| c.eval_named(vals))
            .collect()
    }

    /// Univariate rational coefficients in `name`; `None` if other variables
    /// occur.
    pub fn univariate_rational(&self, name: &str) -> Option<Vec<Rational>> {
        let cs = self.coeffs_in(name);
        cs.iter().map(|c| c.as_constant()).collect()
    }

    /// Canonical text (also available through `Display`).
    pub fn to_canonical_string(&self) -> String {
        format!("{}", self)
    }
}

/// `q^k` for rationals.
pub fn pow_rat(q: &Rational, k: u32) -> Rational {
    num_traits::pow(q.clone(), k as usize)
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        let (a, b) = MPoly::unify(self, other);
        a.terms == b.terms
    }
}

impl Eq for MPoly {}

impl<'a> Add<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn add(self, rhs: &'a MPoly) -> MPoly {
        let (mut a, b) = MPoly::unify(self, rhs);
        for (e, c) in b.terms {
            a.add_term(e, c);
        }
        a
    }
}

impl<'a> Sub<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &'a MPoly) -> MPoly {
        let (mut a, b) = MPoly::unify(self, rhs);
        for (e, c) in b.terms {
            a.add_term(e, -c);
        }
        a
    }
}

impl<'a> Mul<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &'a MPoly) -> MPoly {
        let (a, b) = MPoly::unify(self, rhs);
        let mut out = MPoly::zero(&a.vars);
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<u32> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: &'a MPoly) -> MPoly {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<MPoly> for &'a MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                self.$m(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

/// Format a rational as `p/q` (`q` omitted when 1).
pub fn fmt_rat(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `p/q` or `p` into a rational.
pub fn parse_rat(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().ok()?;
            let d: BigInt = b.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

impl fmt::Display for MPoly {
    /// Graded-lex order, highest first; coefficients as `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ts: Vec<(&Vec<u32>, &Rational)> = self.terms.iter().collect();
        ts.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (k, (e, c)) in ts.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| {
                    if p == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], p)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", fmt_rat(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rat(&abs), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl serde::Serialize for MPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for MPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let mut vars: Vec<String> = CANONICAL_ORDER.iter().map(|v| v.to_string()).collect();
        for tok in s.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
            if tok.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') && !vars.iter().any(|v| v == tok) {
                vars.push(tok.to_string());
            }
        }
        crate::polyarith::parse_poly(&s, &vars)
            .map(|p| p.trimmed())
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MPoly {
        crate::polyarith::parse_poly(s, &["x", "y", "z", "t"]).unwrap()
    }

    #[test]
    fn canonical_var_order() {
        let v = canonical_vars(&["t", "z", "x", "w", "y"]);
        assert_eq!(v, vec!["x", "y", "z", "t", "w"]);
    }

    #[test]
    fn display_graded_lex() {
        let f = p("3*y^2 + z^4 - 4*x*z");
        assert_eq!(f.to_string(), "z^4 - 4*x*z + 3*y^2");
        assert_eq!(p("-1/2*x + 7").to_string(), "-1/2*x + 7");
        assert_eq!(p("0").to_string(), "0");
    }

    #[test]
    fn exact_division_roundtrip() {
        let a = p("x^2 - y^3 + z");
        let b = p("x*y - 2*z + 1");
        let prod = &a * &b;
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        assert!(a.exact_div(&p("x + y")).is_none());
    }

    #[test]
    fn derivative_and_coeffs() {
        let f = p("z^4 - 4*x*z + 3*y^2");
        assert_eq!(f.derivative("z"), p("4*z^3 - 4*x"));
        let cs = f.coeffs_in("z");
        assert_eq!(cs.len(), 5);
        assert_eq!(cs[1], p("-4*x"));
        assert_eq!(MPoly::from_coeffs_in("z", &cs), f);
    }

    #[test]
    fn primitive_rational_normalizes_sign_and_content() {
        let f = p("-6*x^4 + 3/2*y^6");
        let (u, g) = f.primitive_rational();
        assert_eq!(g, p("4*x^4 - y^6"));
        assert_eq!(g.scale(&u), f);
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = Rational::new(BigInt::from(10).pow(400), BigInt::from(10).pow(399));
        assert!((rat_to_f64(&big) - 10.0).abs() < 1e-12);
    }
}
