//! Complex one-parameter families of fiber polynomials `G(t, z)`.

use crate::polyarith::{rat_to_f64, MPoly};
use num_complex::Complex64;

/// Dense complex univariate polynomial, ascending coefficients.
pub type CUPoly = Vec<Complex64>;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Product of dense complex polynomials.
pub fn cmul(a: &[Complex64], b: &[Complex64]) -> CUPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![czero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == czero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Sum of dense complex polynomials.
pub fn cadd(a: &[Complex64], b: &[Complex64]) -> CUPoly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default())
        .collect()
}

/// Strip trailing (exactly) zero coefficients.
pub fn ctrim(mut a: CUPoly) -> CUPoly {
    while a.last().is_some_and(|c| *c == czero()) {
        a.pop();
    }
    a
}

/// Complex coefficients of a rational univariate `MPoly` in `var`.
pub fn to_cupoly(p: &MPoly, var: &str) -> CUPoly {
    let cs = p.coeffs_in(var);
    cs.iter()
        .map(|c| {
            let q = c.as_constant().unwrap_or_else(|| {
                panic!("{p} is not univariate in {var}")
            });
            Complex64::new(rat_to_f64(&q), 0.0)
        })
        .collect()
}

/// Compose `p` with complex univariate polynomials in a new parameter.
/// Variables missing from `subs` must not occur in `p`.
pub fn compose_univariate(p: &MPoly, subs: &[(&str, CUPoly)]) -> CUPoly {
    let images: Vec<Option<&CUPoly>> = p
        .vars()
        .iter()
        .map(|v| subs.iter().find(|(n, _)| *n == v).map(|(_, c)| c))
        .collect();
    let mut pows: Vec<Vec<CUPoly>> = images
        .iter()
        .map(|c| match c {
            Some(c) => vec![vec![Complex64::new(1.0, 0.0)], (*c).clone()],
            None => Vec::new(),
        })
        .collect();
    let mut out: CUPoly = Vec::new();
    for (e, c) in p.terms() {
        let mut term = vec![Complex64::new(rat_to_f64(c), 0.0)];
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let img = images[i]
                .unwrap_or_else(|| panic!("no substitution for {}", p.vars()[i]));
            while pows[i].len() <= k as usize {
                let next = cmul(pows[i].last().unwrap(), img);
                pows[i].push(next);
            }
            term = cmul(&term, &pows[i][k as usize]);
        }
        out = cadd(&out, &term);
    }
    ctrim(out)
}

/// `G(t, z) = Σ_k coeffs[k](t) z^k` with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberFamily {
    pub coeffs: Vec<CUPoly>,
}

impl FiberFamily {
    /// From an exact polynomial in `(tvar, zvar)`.
    pub fn from_germ(g: &MPoly, tvar: &str, zvar: &str) -> Self {
        let coeffs = g
            .coeffs_in(zvar)
            .iter()
            .map(|c| {
                if c.is_zero() {
                    Vec::new()
                } else {
                    to_cupoly(&c.trimmed().with_vars(&[tvar]), tvar)
                }
            })
            .collect();
        FiberFamily { coeffs }
    }

    /// `F(x(t), y(t), z)` for complex arcs `x(t), y(t)`.
    pub fn compose(f: &MPoly, x: &CUPoly, y: &CUPoly, zvar: &str) -> Self {
        let coeffs = f
            .coeffs_in(zvar)
            .iter()
            .map(|c| compose_univariate(c, &[("x", x.clone()), ("y", y.clone())]))
            .collect();
        FiberFamily { coeffs }
    }

    /// Degree in `z` (formal).
    pub fn degree(&self) -> usize {
        let mut d = self.coeffs.len();
        while d > 0 && self.coeffs[d - 1].is_empty() {
            d -= 1;
        }
        d.saturating_sub(1)
    }

    /// Fiber polynomial coefficients at `t`.
    pub fn at(&self, t: Complex64) -> CUPoly {
        self.coeffs[..=self.degree()]
            .iter()
            .map(|c| crate::polyarith::horner(c, t))
            .collect()
    }

    /// `∂G/∂t` coefficients at `t`.
    pub fn dt_at(&self, t: Complex64) -> CUPoly {
        self.coeffs[..=self.degree()]
            .iter()
            .map(|c| {
                let d: CUPoly = c
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, a)| a * k as f64)
                    .collect();
                crate::polyarith::horner(&d, t)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::parse_poly;

    #[test]
    fn compose_matches_exact_substitution() {
        let v = ["x", "y", "z"];
        let f = parse_poly("z^4 - 4*x*z + 3*y^2", &v).unwrap();
        let half = Complex64::new(0.5, 0.0);
        // x = 1/2 t, y = 1/2
        let fam = FiberFamily::compose(&f, &vec![czero(), half], &vec![half], "z");
        let t = Complex64::new(0.3, -0.7);
        let c = fam.at(t);
        assert!((c[0] - 0.75).norm() < 1e-15);
        assert!((c[1] - (-2.0 * t)).norm() < 1e-15);
        assert!((c[4] - 1.0).norm() < 1e-15);
        assert_eq!(fam.degree(), 4);
    }

    #[test]
    fn germ_family_derivative() {
        let g = parse_poly("z^2 - t^3", &["t", "z"]).unwrap();
        let fam = FiberFamily::from_germ(&g, "t", "z");
        let t = Complex64::new(2.0, 0.0);
        assert!((fam.dt_at(t)[0] + 12.0).norm() < 1e-14);
    }
}
