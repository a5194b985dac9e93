//! Complex roots of univariate polynomials with certified inclusion radii.
//!
//! Approximations come from the Aberth–Ehrlich simultaneous iteration.
//! Certification uses the Gershgorin bound for the Smith companion matrix:
//! with `W_i = p(z_i) / (a_d ∏_{j≠i} (z_i - z_j))` every root lies in the
//! union of the disks `D(z_i, d·|W_i|)`, and any connected union of `k` disks
//! that is disjoint from the remaining ones holds exactly `k` roots.  The
//! evaluation error of `p(z_i)` is added to `|p(z_i)|` before dividing, and a
//! floor of a few ulps keeps radii strictly positive.  Overlapping disks are
//! merged into clusters, which are reported as multiple roots.

use super::mpoly::Rational;
use super::PolyError;
use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex disk: center `re + i·im`, radius `radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexBox {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
}

impl ComplexBox {
    pub fn new(c: Complex64, radius: f64) -> Self {
        ComplexBox {
            re: c.re,
            im: c.im,
            radius,
        }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center()).norm() <= self.radius
    }

    pub fn overlaps(&self, other: &ComplexBox) -> bool {
        (self.center() - other.center()).norm() <= self.radius + other.radius
    }

    /// Text form `re±im·i (±radius)`.
    pub fn to_text(&self) -> String {
        let sign = if self.im < 0.0 { '-' } else { '+' };
        format!(
            "{:.12e}{}{:.12e}i (±{:.3e})",
            self.re,
            sign,
            self.im.abs(),
            self.radius
        )
    }
}

/// A group of root approximations whose inclusion disks overlap.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster {
    pub center: Complex64,
    pub radius: f64,
    pub members: Vec<usize>,
}

const EPS: f64 = f64::EPSILON;

/// Horner evaluation; `coeffs[k]` multiplies `z^k`.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn horner_d(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// A priori rounding bound for Horner evaluation at `z`.
fn eval_error(coeffs: &[Complex64], z: Complex64) -> f64 {
    let az = z.norm();
    let s = coeffs.iter().rev().fold(0.0, |acc, c| acc * az + c.norm());
    let n = coeffs.len() as f64;
    4.0 * (2.0 * n + 2.0) * EPS * s
}

/// Aberth–Ehrlich iteration.  `coeffs` must have a nonzero leading entry.
/// `init` warm-starts the iteration (length must equal the degree).
pub fn aberth(coeffs: &[Complex64], init: Option<&[Complex64]>) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = coeffs[d];
    if d == 1 {
        return vec![-coeffs[0] / lead];
    }
    let mut z: Vec<Complex64> = match init {
        Some(v) if v.len() == d => v.to_vec(),
        _ => {
            let mut r: f64 = 0.0;
            for (k, c) in coeffs.iter().enumerate().take(d) {
                let q = (c / lead).norm();
                if q > 0.0 {
                    r = r.max(q.powf(1.0 / (d - k) as f64));
                }
            }
            if r == 0.0 || !r.is_finite() {
                r = 1.0;
            }
            (0..d)
                .map(|k| {
                    let a = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
                    Complex64::from_polar(r, a)
                })
                .collect()
        }
    };
    // Break exact coincidences in warm starts.
    separate_duplicates(&mut z);
    let mut done = vec![false; d];
    for _ in 0..2000 {
        let mut all = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (p, dp) = horner_d(coeffs, z[i]);
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        s += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * s;
            let w = if denom.norm() > 0.0 && (ratio / denom).is_finite() {
                ratio / denom
            } else {
                ratio
            };
            if !w.is_finite() {
                done[i] = true;
                continue;
            }
            z[i] -= w;
            if w.norm() <= 2.0 * EPS * (1.0 + z[i].norm()) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    z
}

fn separate_duplicates(z: &mut [Complex64]) {
    let n = z.len();
    for i in 0..n {
        for j in 0..i {
            if z[i] == z[j] {
                let bump = 1e-9 * (1.0 + z[i].norm());
                z[i] += Complex64::new(bump, bump * 0.5 * (i as f64 + 1.0));
            }
        }
    }
}

/// Per-approximation inclusion radii (before clustering).
pub fn certify_roots(coeffs: &[Complex64], approx: &[Complex64]) -> Vec<ComplexBox> {
    let d = approx.len();
    let lead = coeffs[coeffs.len() - 1].norm();
    (0..d)
        .map(|i| {
            let zi = approx[i];
            let p = horner(coeffs, zi).norm() + eval_error(coeffs, zi);
            let mut prod = lead;
            for (j, zj) in approx.iter().enumerate() {
                if j != i {
                    prod *= (zi - zj).norm();
                }
            }
            let floor = 4.0 * EPS * (1.0 + zi.norm());
            let r = if prod > 0.0 {
                d as f64 * p / prod * (1.0 + 1e-12) + floor
            } else {
                f64::INFINITY
            };
            ComplexBox::new(zi, if r.is_finite() { r } else { f64::MAX })
        })
        .collect()
}

/// Group boxes into clusters of overlapping disks (plus an optional
/// absolute merge distance `merge_tol·(1+|z|)`).
pub fn cluster_roots(boxes: &[ComplexBox], merge_tol: f64) -> Vec<RootCluster> {
    let n = boxes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let nx = p[k];
            p[k] = r;
            k = nx;
        }
        r
    }
    for i in 0..n {
        for j in 0..i {
            let dist = (boxes[i].center() - boxes[j].center()).norm();
            let scale = 1.0 + boxes[i].center().norm().max(boxes[j].center().norm());
            if dist <= boxes[i].radius + boxes[j].radius || dist <= merge_tol * scale {
                let a = find(&mut parent, i);
                let b = find(&mut parent, j);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups
        .into_values()
        .map(|members| {
            let k = members.len() as f64;
            let c = members
                .iter()
                .fold(Complex64::new(0.0, 0.0), |a, &i| a + boxes[i].center())
                / k;
            let radius = members
                .iter()
                .map(|&i| (boxes[i].center() - c).norm() + boxes[i].radius)
                .fold(0.0, f64::max);
            RootCluster {
                center: c,
                radius,
                members,
            }
        })
        .collect()
}

/// All `d` roots with multiplicity, each as a certified disk.  Members of a
/// multiple-root cluster share the cluster's disk.  Output is sorted by
/// `(re, im)`.
pub fn univariate_roots(coeffs: &[Complex64]) -> Result<Vec<ComplexBox>, PolyError> {
    if coeffs.len() < 2 {
        return Err(PolyError::DegenerateLeading);
    }
    let lead = coeffs[coeffs.len() - 1].norm();
    let maxc = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if lead == 0.0 || !lead.is_finite() || lead < 1e-14 * maxc {
        return Err(PolyError::DegenerateLeading);
    }
    // Exact zero roots.
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let rest = &coeffs[zeros..];
    let mut out: Vec<ComplexBox> = vec![ComplexBox::new(Complex64::new(0.0, 0.0), 0.0); zeros];
    if rest.len() > 1 {
        let approx = aberth(rest, None);
        let boxes = certify_roots(rest, &approx);
        for cl in cluster_roots(&boxes, 0.0) {
            if cl.members.len() == 1 {
                out.push(boxes[cl.members[0]]);
            } else {
                for _ in &cl.members {
                    out.push(ComplexBox::new(cl.center, cl.radius));
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(out)
}

/// Continued-fraction reconstruction of a rational within `tol`, with
/// denominator at most `max_den`.
pub fn rational_approximation(x: f64, tol: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= tol {
            return Some(Rational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Exact rational roots of `p = Σ coeffs[i]·w^i` with multiplicities, and
/// the cofactor left after dividing them out (ascending coefficients).
/// Candidates come from continued-fraction reconstruction of the numeric
/// roots; every reported root is verified by exact synthetic division.
pub fn rational_roots_with_rest(coeffs: &[Rational]) -> (Vec<(Rational, u32)>, Vec<Rational>) {
    use num_traits::Zero;
    let mut rest = coeffs.to_vec();
    while rest.len() > 1 && rest.last().is_some_and(|c| c.is_zero()) {
        rest.pop();
    }
    let mut found = Vec::new();
    if rest.len() < 2 {
        return (found, rest);
    }
    // Candidates come from the squarefree part, whose roots are simple and
    // therefore numerically accurate.
    let w = super::MPoly::from_terms(&["w"], rest.iter().enumerate().map(|(i, c)| (vec![i as u32], c.clone())));
    let sqf = super::radical(&w).with_vars(&["w"]).univariate_rational("w").unwrap_or_else(|| rest.clone());
    let c: Vec<Complex64> = sqf.iter().map(|v| Complex64::new(super::rat_to_f64(v), 0.0)).collect();
    let mut cands: Vec<Rational> = Vec::new();
    for z in aberth(&c, None) {
        if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
            continue;
        }
        for tol in [1e-12, 1e-9, 1e-6] {
            if let Some(r) = rational_approximation(z.re, tol * (1.0 + z.re.abs()), 1_000_000_000) {
                if !cands.contains(&r) {
                    cands.push(r);
                }
                break;
            }
        }
    }
    cands.sort();
    for r in cands {
        let mut k = 0;
        while rest.len() > 1 {
            let n = rest.len() - 1;
            let mut q = vec![Rational::zero(); n];
            let mut acc = Rational::zero();
            for idx in (0..=n).rev() {
                acc = &acc * &r + &rest[idx];
                if idx > 0 {
                    q[idx - 1] = acc.clone();
                }
            }
            if acc.is_zero() {
                rest = q;
                k += 1;
            } else {
                break;
            }
        }
        if k > 0 {
            found.push((r, k));
        }
    }
    (found, rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn quadratic_roots() {
        let r = univariate_roots(&[c(-1.0), c(0.0), c(1.0)]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].contains(c(-1.0)));
        assert!(r[1].contains(c(1.0)));
        assert!(r[0].radius < 1e-12);
    }

    #[test]
    fn triple_zero() {
        let r = univariate_roots(&[c(0.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|b| b.re == 0.0 && b.im == 0.0));
    }

    #[test]
    fn multiple_root_cluster() {
        // (z-1)^3 (z+2)
        let coeffs = [c(-2.0), c(5.0), c(-3.0), c(-1.0), c(1.0)];
        let r = univariate_roots(&coeffs).unwrap();
        let at_one = r.iter().filter(|b| b.contains(c(1.0))).count();
        assert_eq!(at_one, 3);
        assert!(r.iter().any(|b| b.contains(c(-2.0)) && b.radius < 1e-10));
    }

    #[test]
    fn rejects_degenerate() {
        assert!(univariate_roots(&[c(1.0), c(0.0)]).is_err());
        assert!(univariate_roots(&[c(1.0)]).is_err());
    }

    #[test]
    fn rational_reconstruction() {
        let q = rational_approximation(-0.375, 1e-12, 1_000_000).unwrap();
        assert_eq!(q, Rational::new((-3).into(), 8.into()));
        assert!(rational_approximation(std::f64::consts::PI, 1e-12, 1000).is_none());
        assert_eq!(
            rational_approximation(2.0, 1e-12, 10).unwrap(),
            Rational::from_integer(2.into())
        );
    }

    #[test]
    fn warm_start_converges() {
        let coeffs = [c(-6.0), c(11.0), c(-6.0), c(1.0)];
        let z = aberth(&coeffs, Some(&[c(0.9), c(2.2), c(2.9)]));
        let mut re: Vec<f64> = z.iter().map(|w| w.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in re.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rational_roots_exact() {
        use crate::polyarith::{rat, ratio};
        // (w - 1/2)^2 (w + 3) (w^2 - 2)
        let f = crate::polyarith::parse_poly("(w - 1/2)^2*(w + 3)*(w^2 - 2)", &["w"]).unwrap();
        let c = f.univariate_rational("w").unwrap();
        let (roots, rest) = rational_roots_with_rest(&c);
        assert_eq!(roots, vec![(rat(-3), 1), (ratio(1, 2), 2)]);
        assert_eq!(rest, vec![rat(-2), rat(0), rat(1)]);
    }
}
