//! Plane-curve germs `g(t, z) = 0`: Newton polygons, Puiseux branches and
//! branch counting by monodromy.

mod newton;
mod puiseux;

pub use newton::{newton_polygon_of, newton_polygon_of_points, NewtonPolygon, Segment};
pub use puiseux::{puiseux_expand, ExactParam, PuiseuxBranch, FLOAT_ZERO_TOL};

use crate::monodromy::{
    half_min_root_modulus, to_cupoly, track_circle, FiberFamily, MonodromyError, TrackOptions,
    TrackingCertificate,
};
use crate::polyarith::{
    discriminant_raw, squarefree_factors, MPoly, PolyError, Rational,
};
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors raised by germ analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GermError {
    #[error("germ is not z-finite (g(0, z) vanishes identically)")]
    NotZFinite,
    #[error("germ does not pass through the origin")]
    NotAtOrigin,
    #[error("germ involves variables other than t and z: {0:?}")]
    ExtraVariables(Vec<String>),
    #[error("Puiseux expansion failed: {0}")]
    Puiseux(String),
    #[error(transparent)]
    Tracking(#[from] MonodromyError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A germ `g(t, z) = 0` at the origin, finite over the `t`-line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneCurveGerm {
    /// Polynomial in the variables `t` (parameter) and `z` (fiber).
    pub equation: MPoly,
    /// Order of `g(0, z)`: the number of sheets over the `t`-line.
    pub weierstrass_degree: u32,
    /// Analyze with the reduced structure (ignore multiplicities).
    pub reduced: bool,
}

impl PlaneCurveGerm {
    /// Validate and wrap a polynomial in `t, z`.
    pub fn new(equation: MPoly, reduced: bool) -> Result<Self, GermError> {
        let extra: Vec<String> = equation
            .used_vars()
            .into_iter()
            .filter(|v| v != "t" && v != "z")
            .collect();
        if !extra.is_empty() {
            return Err(GermError::ExtraVariables(extra));
        }
        let equation = equation.with_vars(&["t", "z"]);
        if !equation.constant_term().is_zero() {
            return Err(GermError::NotAtOrigin);
        }
        let g0 = equation.eval_var("t", &Rational::zero());
        if g0.is_zero() {
            return Err(GermError::NotZFinite);
        }
        let weierstrass_degree = g0.order_in("z");
        Ok(PlaneCurveGerm {
            equation,
            weierstrass_degree,
            reduced,
        })
    }

    /// Rename the variables of a plane curve `f(tvar, zvar)` to `(t, z)`.
    pub fn from_curve(f: &MPoly, tvar: &str, zvar: &str, reduced: bool) -> Result<Self, GermError> {
        let mut m = BTreeMap::new();
        m.insert(tvar.to_string(), MPoly::var("t", &["t", "z"]));
        m.insert(zvar.to_string(), MPoly::var("z", &["t", "z"]));
        Self::new(f.substitute(&m), reduced)
    }

    /// Newton polygon of the equation.
    pub fn newton_polygon(&self) -> NewtonPolygon {
        newton_polygon_of(&self.equation, "t", "z")
    }
}

/// Lower convex hull of the support of `g`.
pub fn newton_polygon(g: &PlaneCurveGerm) -> NewtonPolygon {
    g.newton_polygon()
}

/// Branch count with multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchCount {
    /// Number of distinct branches (irreducible factors of the reduced germ).
    pub count: usize,
    /// Multiplicity of each branch, descending.
    pub multiplicities: Vec<u32>,
    /// `"newton"` when every factor was decided by the Newton-polygon fast
    /// path, otherwise `"tracking"`.
    pub method: String,
    pub certificates: Vec<TrackingCertificate>,
}

/// Monodromy tracking of one squarefree factor: number of cycles.
fn factor_cycles(
    f: &MPoly,
    d: u32,
    opts: &TrackOptions,
) -> Result<(usize, Option<TrackingCertificate>), GermError> {
    let disc = discriminant_raw(f, "z")?.with_vars(&["t"]);
    let mc = disc.monomial_content();
    let disc = disc.div_monomial(&mc);
    let lc = f.lc_in("z").with_vars(&["t"]);
    let lc = lc.div_monomial(&lc.monomial_content());
    let q = &disc * &lc;
    let mut r = half_min_root_modulus(&to_cupoly(&q, "t"), 0.0)?
        .unwrap_or(0.5)
        .min(0.5);
    let fam = FiberFamily::from_germ(f, "t", "z");
    let sheets = if f.degree_in("z") > d { Some(d as usize) } else { None };
    let mut last_err = None;
    for _ in 0..40 {
        match track_circle(&fam, Complex64::new(0.0, 0.0), r, sheets, opts) {
            Ok(o) => return Ok((o.permutation.cycle_count(), Some(o.certificate))),
            Err(MonodromyError::FiberDegenerate(msg)) => {
                last_err = Some(MonodromyError::FiberDegenerate(msg));
                r /= 2.0;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(last_err.unwrap().into())
}

/// Number of branches of `g` and their multiplicities, by the Newton fast
/// path or by tracking the fiber around `|t| = r`.
pub fn branch_count(g: &PlaneCurveGerm) -> Result<BranchCount, GermError> {
    branch_count_with(g, &TrackOptions::default())
}

/// As [`branch_count`] with explicit tracking options.
pub fn branch_count_with(g: &PlaneCurveGerm, opts: &TrackOptions) -> Result<BranchCount, GermError> {
    let mut mults = Vec::new();
    let mut certs = Vec::new();
    let mut tracked = false;
    for sf in squarefree_factors(&g.equation, "z") {
        let f = sf.factor.with_vars(&["t", "z"]);
        if !f.constant_term().is_zero() {
            continue;
        }
        let d = f.eval_var("t", &Rational::zero()).order_in("z");
        let np = newton_polygon_of(&f, "t", "z");
        let cycles = if d <= 1 || np.is_irreducible_fast_path() {
            d.min(1) as usize
        } else {
            tracked = true;
            let (c, cert) = factor_cycles(&f, d, opts)?;
            certs.extend(cert);
            c
        };
        mults.extend(std::iter::repeat_n(sf.multiplicity, cycles));
    }
    mults.sort_unstable_by(|a, b| b.cmp(a));
    Ok(BranchCount {
        count: mults.len(),
        multiplicities: mults,
        method: if tracked { "tracking" } else { "newton" }.to_string(),
        certificates: certs,
    })
}

/// Puiseux branches of `g` with all terms up to `order`.
pub fn puiseux_branches(g: &PlaneCurveGerm, order: &Rational) -> Result<Vec<PuiseuxBranch>, GermError> {
    puiseux_expand(&g.equation, "t", "z", order)
}

/// Branch count computed independently from the Puiseux expansion.
pub fn puiseux_branch_count(g: &PlaneCurveGerm) -> Result<(usize, Vec<u32>), GermError> {
    let bs = puiseux_branches(g, &Rational::zero())?;
    let mut m: Vec<u32> = bs.iter().map(|b| b.multiplicity).collect();
    m.sort_unstable_by(|a, b| b.cmp(a));
    Ok((bs.len(), m))
}

/// Irreducibility of the germ; with `reduced` set multiplicities are
/// ignored, otherwise a multiple branch counts as reducible.
pub fn is_irreducible_germ(g: &PlaneCurveGerm) -> Result<bool, GermError> {
    let bc = branch_count(g)?;
    Ok(bc.count == 1 && (g.reduced || bc.multiplicities == vec![1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::{parse_poly, rat};

    fn germ(s: &str) -> PlaneCurveGerm {
        PlaneCurveGerm::new(parse_poly(s, &["t", "z"]).unwrap(), false).unwrap()
    }

    #[test]
    fn validation() {
        let p = |s| parse_poly(s, &["t", "z"]).unwrap();
        assert_eq!(PlaneCurveGerm::new(p("z - 1"), false), Err(GermError::NotAtOrigin));
        assert_eq!(PlaneCurveGerm::new(p("t*z"), false), Err(GermError::NotZFinite));
        assert_eq!(germ("z^3 - t^4").weierstrass_degree, 3);
    }

    #[test]
    fn counts() {
        let bc = branch_count(&germ("z^3 - t^4")).unwrap();
        assert_eq!((bc.count, bc.multiplicities.clone()), (1, vec![1]));
        assert_eq!(bc.method, "newton");
        let bc = branch_count(&germ("z^3 - 12*t^6 - 40*t^8 - 12*t^10")).unwrap();
        assert_eq!((bc.count, bc.multiplicities), (3, vec![1, 1, 1]));
        let bc = branch_count(&germ("z^4 - 1/8*t^3*z + 3/64*t^4")).unwrap();
        assert_eq!((bc.count, bc.multiplicities), (4, vec![1, 1, 1, 1]));
        let bc = branch_count(&germ("z^4 - 1/8*t^2*z + 3/64*t^2")).unwrap();
        assert_eq!(bc.count, 2);
    }

    #[test]
    fn irreducibility_flags() {
        assert!(is_irreducible_germ(&germ("z^2 - t^3")).unwrap());
        assert!(!is_irreducible_germ(&germ("z^4 - 1/8*t^2*z + 3/64*t^2")).unwrap());
        let mut g = germ("z^3");
        assert!(!is_irreducible_germ(&g).unwrap());
        g.reduced = true;
        assert!(is_irreducible_germ(&g).unwrap());
        assert_eq!(branch_count(&g).unwrap().multiplicities, vec![3]);
    }

    #[test]
    fn puiseux_cusp_exact() {
        let g = PlaneCurveGerm::from_curve(
            &parse_poly("y^3 - x^2", &["x", "y"]).unwrap(),
            "x",
            "y",
            false,
        )
        .unwrap();
        let bs = puiseux_branches(&g, &rat(2)).unwrap();
        assert_eq!(bs.len(), 1);
        let ex = bs[0].exact.clone().unwrap();
        assert_eq!(ex.n, 3);
        assert_eq!(ex.terms, vec![(2, rat(1))]);
        assert_eq!(bs[0].ramification_index, 3);
    }

    #[test]
    fn puiseux_two_cusps() {
        let g = PlaneCurveGerm::from_curve(
            &parse_poly("(y^3 - x^2)*(y^3 + x^2)", &["x", "y"]).unwrap(),
            "x",
            "y",
            false,
        )
        .unwrap();
        let bs = puiseux_branches(&g, &rat(1)).unwrap();
        assert_eq!(bs.len(), 2);
        assert!(bs.iter().all(|b| b.ramification_index == 3 && b.exact.is_some()));
    }

    #[test]
    fn puiseux_smooth_and_float() {
        let bs = puiseux_branches(&germ("z - t"), &rat(3)).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].ramification_index, 1);
        let (n, m) = puiseux_branch_count(&germ("z^4 - 1/8*t^3*z + 3/64*t^4")).unwrap();
        assert_eq!((n, m), (4, vec![1, 1, 1, 1]));
        let (n, _) = puiseux_branch_count(&germ("z^3 - 12*t^6 - 40*t^8 - 12*t^10")).unwrap();
        assert_eq!(n, 3);
        let (n, m) = puiseux_branch_count(&germ("z^2*(z - t)")).unwrap();
        assert_eq!((n, m), (2, vec![2, 1]));
    }

    #[test]
    fn ramification_times_multiplicity_sums_to_degree() {
        for s in [
            "z^4 - 1/8*t^2*z + 3/64*t^2",
            "(z^2 - t^3)*(z - t)^2",
            "z^5 - t^7 + t^4*z",
            "(z^2 - t^5)*(z^3 - t^2)",
        ] {
            let g = germ(s);
            let bs = puiseux_branches(&g, &rat(2)).unwrap();
            let total: u32 = bs.iter().map(|b| b.ramification_index * b.multiplicity).sum();
            assert_eq!(total, g.weierstrass_degree, "{s}");
        }
    }
}
