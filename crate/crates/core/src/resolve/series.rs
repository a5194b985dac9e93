//! Truncated power-series roots `y = φ(x)` of `S(x, y) = 0` through a point
//! where `∂S/∂y ≠ 0`, over ℚ or over ℂ (floating point).

use crate::polyarith::{rat_to_f64, MPoly, Rational};
use num_complex::Complex64;
use num_traits::{One, Zero};

/// Minimal field interface for series arithmetic.
pub trait Field: Clone + PartialEq {
    fn f_zero() -> Self;
    fn f_one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn from_rat(q: &Rational) -> Self;
    fn f_is_zero(&self) -> bool;
    /// Absolute value as a float.
    fn magnitude(&self) -> f64;
    /// Whether arithmetic is exact.
    const EXACT: bool;
}

impl Field for Rational {
    fn f_zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn f_one() -> Self {
        <Rational as One>::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn from_rat(q: &Rational) -> Self {
        q.clone()
    }
    fn f_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        rat_to_f64(self).abs()
    }
    const EXACT: bool = true;
}

impl Field for Complex64 {
    fn f_zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn f_one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn from_rat(q: &Rational) -> Self {
        Complex64::new(rat_to_f64(q), 0.0)
    }
    fn f_is_zero(&self) -> bool {
        self.norm() == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    const EXACT: bool = false;
}

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

fn add_trunc<K: Field>(a: &[K], b: &[K], n: usize) -> Vec<K> {
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(K::f_zero);
            let y = b.get(i).cloned().unwrap_or_else(K::f_zero);
            x.add(&y)
        })
        .collect()
}

fn div_trunc<K: Field>(a: &[K], b: &[K], n: usize) -> Vec<K> {
    let mut q = vec![K::f_zero(); n];
    for k in 0..n {
        let mut acc = a.get(k).cloned().unwrap_or_else(K::f_zero);
        for j in 1..=k {
            if let Some(bj) = b.get(j) {
                acc = acc.sub(&bj.mul(&q[k - j]));
            }
        }
        q[k] = acc.div(&b[0]);
    }
    q
}

/// `S(x, φ(x))` truncated to `n` terms, with `S` given by its coefficient
/// series in `y` (ascending).
fn eval_series<K: Field>(coeffs: &[Vec<K>], phi: &[K], n: usize) -> Vec<K> {
    let mut acc = vec![K::f_zero(); n];
    for c in coeffs.iter().rev() {
        acc = add_trunc(&mul_trunc(&acc, phi, n), c, n);
    }
    acc
}

fn coeff_series<K: Field>(s: &MPoly, xvar: &str, yvar: &str, n: usize) -> Vec<Vec<K>> {
    s.coeffs_in(yvar)
        .iter()
        .map(|c| {
            let mut v = vec![K::f_zero(); n];
            let xi = c.var_index(xvar);
            for (e, q) in c.terms() {
                let k = xi.map(|i| e[i] as usize).unwrap_or(0);
                if k < n {
                    v[k] = v[k].add(&K::from_rat(q));
                }
            }
            v
        })
        .collect()
}

/// Coefficients `φ_0 = y0, φ_1, …, φ_order` of the root `y = φ(x)` of
/// `S(x, y) = 0` with `φ(0) = y0`.  Requires `S(0, y0) = 0` and
/// `∂S/∂y(0, y0) ≠ 0`; returns `None` otherwise.
pub fn graph_root<K: Field>(s: &MPoly, xvar: &str, yvar: &str, y0: K, order: usize) -> Option<Vec<K>> {
    let n = order + 1;
    let cs: Vec<Vec<K>> = coeff_series(s, xvar, yvar, n);
    let dcs: Vec<Vec<K>> = coeff_series(&s.derivative(yvar), xvar, yvar, n);
    let mut phi = vec![y0];
    let base = eval_series(&cs, &phi, 1);
    let dbase = eval_series(&dcs, &phi, 1);
    if dbase[0].f_is_zero() {
        return None;
    }
    let off = if K::EXACT {
        !base[0].f_is_zero()
    } else {
        base[0].magnitude() > 1e-8 * dbase[0].magnitude().max(1e-300)
    };
    if off {
        return None;
    }
    let mut prec = 1;
    while prec < n {
        prec = (2 * prec).min(n);
        phi.resize(prec, K::f_zero());
        let a = eval_series(&cs, &phi, prec);
        let b = eval_series(&dcs, &phi, prec);
        let corr = div_trunc(&a, &b, prec);
        phi = (0..prec).map(|i| phi[i].sub(&corr[i])).collect();
    }
    Some(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::{parse_poly, rat, ratio};

    #[test]
    fn exact_root_of_parabola() {
        let s = parse_poly("y - 1 - x^2", &["x", "y"]).unwrap();
        let phi = graph_root(&s, "x", "y", rat(1), 4).unwrap();
        assert_eq!(phi, vec![rat(1), rat(0), rat(1), rat(0), rat(0)]);
    }

    #[test]
    fn exact_root_of_circle() {
        // y = sqrt(1 - x^2) = 1 - x^2/2 - x^4/8 - ...
        let s = parse_poly("x^2 + y^2 - 1", &["x", "y"]).unwrap();
        let phi = graph_root(&s, "x", "y", rat(1), 4).unwrap();
        assert_eq!(phi, vec![rat(1), rat(0), ratio(-1, 2), rat(0), ratio(-1, 8)]);
        assert!(graph_root(&s, "x", "y", rat(2), 4).is_none());
    }

    #[test]
    fn complex_root() {
        let s = parse_poly("y^2 + 2 - x", &["x", "y"]).unwrap();
        let y0 = Complex64::new(0.0, 2f64.sqrt());
        let phi = graph_root(&s, "x", "y", y0, 6).unwrap();
        for x in [0.05f64, -0.03] {
            let y: Complex64 = phi
                .iter()
                .enumerate()
                .map(|(k, c)| c * x.powi(k as i32))
                .sum();
            assert!((y * y + 2.0 - x).norm() < 1e-8);
        }
    }
}
