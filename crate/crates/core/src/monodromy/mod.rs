//! Permutation and braid monodromy of fiber roots along loops in the base.

mod family;
mod track;
pub mod crossing;

pub use family::{cadd, cmul, compose_univariate, ctrim, to_cupoly, CUPoly, FiberFamily};
pub use track::{
    labelled_fiber, track_circle, BraidLetter, BraidWord, TrackOptions, TrackOutcome,
    TrackingCertificate,
};

use crate::group::Permutation;
use crate::polyarith::{univariate_roots, MPoly, PolyError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while tracking.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonodromyError {
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("loop meets the discriminant: {0}")]
    LoopTouchesDelta(String),
    #[error("fiber degenerates: {0}")]
    FiberDegenerate(String),
    #[error("braid projection is degenerate along the loop")]
    ProjectionDegenerate,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A loop `θ ↦ (x(t), y(t))`, `t = center + radius·e^{iθ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    /// `x(t)` ascending complex coefficients.
    pub x: CUPoly,
    /// `y(t)` ascending complex coefficients.
    pub y: CUPoly,
    /// Exact arc polynomials in `t`, when the loop is defined over ℚ.
    #[serde(skip)]
    pub exact: Option<(MPoly, MPoly)>,
    pub center: Complex64,
    pub radius: f64,
    /// Number of fiber roots that form the covering (smallest in modulus).
    pub sheets: Option<usize>,
    pub description: String,
}

impl LoopSpec {
    /// Loop of an exact arc `(x(t), y(t))` around `|t| = radius`.
    pub fn from_arc(x: &MPoly, y: &MPoly, radius: f64, sheets: Option<usize>) -> Self {
        let xt = x.with_vars(&["t"]);
        let yt = y.with_vars(&["t"]);
        LoopSpec {
            x: to_cupoly(&xt, "t"),
            y: to_cupoly(&yt, "t"),
            exact: Some((xt.clone(), yt.clone())),
            center: Complex64::new(0.0, 0.0),
            radius,
            sheets,
            description: format!("({xt}, {yt}), |t| = {radius}"),
        }
    }

    /// Loop of a complex arc.
    pub fn from_complex(
        x: CUPoly,
        y: CUPoly,
        center: Complex64,
        radius: f64,
        sheets: Option<usize>,
        description: String,
    ) -> Self {
        LoopSpec {
            x,
            y,
            exact: None,
            center,
            radius,
            sheets,
            description,
        }
    }

    /// The point `(x, y)` at angle `θ`.
    pub fn point(&self, theta: f64) -> (Complex64, Complex64) {
        let t = self.center + Complex64::from_polar(self.radius, theta);
        (
            crate::polyarith::horner(&self.x, t),
            crate::polyarith::horner(&self.y, t),
        )
    }

    /// Basepoint (θ = 0).
    pub fn basepoint(&self) -> (Complex64, Complex64) {
        self.point(0.0)
    }

    /// `p(x(t), y(t))` as a complex polynomial in `t`, exact when possible.
    pub fn compose(&self, p: &MPoly) -> CUPoly {
        match &self.exact {
            Some((x, y)) => {
                let mut m = std::collections::BTreeMap::new();
                m.insert("x".to_string(), x.clone());
                m.insert("y".to_string(), y.clone());
                let q = p.substitute(&m).with_vars(&["t"]);
                if q.is_zero() {
                    Vec::new()
                } else {
                    to_cupoly(&q, "t")
                }
            }
            None => compose_univariate(p, &[("x", self.x.clone()), ("y", self.y.clone())]),
        }
    }
}

/// Fiber family `F(x(t), y(t), z)` of a loop.
pub fn loop_family(f: &MPoly, lp: &LoopSpec) -> FiberFamily {
    match &lp.exact {
        Some((x, y)) => {
            let mut m = std::collections::BTreeMap::new();
            m.insert("x".to_string(), x.clone());
            m.insert("y".to_string(), y.clone());
            let g = f.substitute(&m).with_vars(&["t", "z"]);
            FiberFamily::from_germ(&g, "t", "z")
        }
        None => FiberFamily::compose(f, &lp.x, &lp.y, "z"),
    }
}

/// Permutation monodromy of `F` along a loop.
pub fn track_loop(
    f: &MPoly,
    lp: &LoopSpec,
    opts: &TrackOptions,
) -> Result<(Permutation, TrackingCertificate), MonodromyError> {
    let o = track_loop_full(f, lp, opts)?;
    Ok((o.permutation, o.certificate))
}

/// As [`track_loop`], returning the full outcome.
pub fn track_loop_full(
    f: &MPoly,
    lp: &LoopSpec,
    opts: &TrackOptions,
) -> Result<TrackOutcome, MonodromyError> {
    let fam = loop_family(f, lp);
    track_circle(&fam, lp.center, lp.radius, lp.sheets, opts)
}

/// Braid word of `F` along a loop (real-part projection; see [`BraidWord`]).
pub fn compute_braid(
    f: &MPoly,
    lp: &LoopSpec,
    opts: &TrackOptions,
) -> Result<BraidWord, MonodromyError> {
    let o = track_loop_full(
        f,
        lp,
        &TrackOptions {
            braids: true,
            ..*opts
        },
    )?;
    Ok(o.braid.expect("braid requested"))
}

/// Certify that the loop avoids the zero set of `delta` (a polynomial in
/// `x, y`): the roots of `delta(x(t), y(t))` are enclosed in certified disks
/// and none of the disks meets the circle.  Returns the smallest gap
/// between a disk and the circle.
pub fn certify_avoids(delta: &MPoly, lp: &LoopSpec) -> Result<f64, MonodromyError> {
    let q = match &lp.exact {
        // Exact arcs: isolate the roots of the squarefree part, so clustered
        // multiple roots do not inflate the inclusion disks.
        Some((x, y)) => {
            let mut m = std::collections::BTreeMap::new();
            m.insert("x".to_string(), x.clone());
            m.insert("y".to_string(), y.clone());
            let q = delta.substitute(&m).with_vars(&["t"]);
            if q.is_zero() {
                Vec::new()
            } else {
                let g = crate::polyarith::gcd(&q, &q.derivative("t"));
                to_cupoly(&q.exact_div(&g).expect("gcd divides"), "t")
            }
        }
        None => lp.compose(delta),
    };
    let q = ctrim(q);
    if q.is_empty() {
        return Err(MonodromyError::LoopTouchesDelta(
            "the arc lies inside the discriminant".into(),
        ));
    }
    if q.len() == 1 {
        return Ok(f64::INFINITY);
    }
    let boxes = univariate_roots(&q)?;
    let mut margin = f64::INFINITY;
    for b in boxes {
        let dist = (b.center() - lp.center).norm();
        let gap = (dist - lp.radius).abs() - b.radius;
        if gap <= 1e-12 * (1.0 + lp.radius) {
            return Err(MonodromyError::LoopTouchesDelta(format!(
                "root of the restricted discriminant at t = {} (±{:.2e})",
                b.center(),
                b.radius
            )));
        }
        margin = margin.min(gap);
    }
    Ok(margin)
}

/// Half the smallest modulus of a root of `q` outside `|t| ≤ inner`.
/// Returns `None` when all roots are inside (any radius works then).
pub fn half_min_root_modulus(q: &[Complex64], inner: f64) -> Result<Option<f64>, MonodromyError> {
    let q = ctrim(q.to_vec());
    if q.len() <= 1 {
        return Ok(None);
    }
    let boxes = univariate_roots(&q)?;
    let m = boxes
        .iter()
        .map(|b| b.center().norm() - b.radius)
        .filter(|&m| m > inner)
        .fold(f64::INFINITY, f64::min);
    Ok(if m.is_finite() { Some(m / 2.0) } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::parse_poly;

    #[test]
    fn avoidance_certificate() {
        let delta = parse_poly("x - 1/4", &["x", "y"]).unwrap();
        let t = parse_poly("t", &["t"]).unwrap();
        let zero = MPoly::zero(&["t"]);
        let lp = LoopSpec::from_arc(&t, &zero, 0.5, None);
        assert!(certify_avoids(&delta, &lp).unwrap() > 0.2);
        let lp2 = LoopSpec::from_arc(&t, &zero, 0.25, None);
        assert!(certify_avoids(&delta, &lp2).is_err());
        let inside = parse_poly("y", &["x", "y"]).unwrap();
        assert!(matches!(
            certify_avoids(&inside, &lp),
            Err(MonodromyError::LoopTouchesDelta(_))
        ));
    }

    #[test]
    fn arc_loop_of_square_root() {
        let f = parse_poly("z^2 - x", &["x", "y", "z"]).unwrap();
        let t = parse_poly("t", &["t"]).unwrap();
        let zero = MPoly::zero(&["t"]);
        let lp = LoopSpec::from_arc(&t, &zero, 1.0, None);
        let (p, _) = track_loop(&f, &lp, &TrackOptions::default()).unwrap();
        assert_eq!(p.cycle_type(), vec![2]);
        let lp = LoopSpec::from_arc(&zero, &t, 1.0, None);
        assert!(matches!(
            track_loop(&f, &lp, &TrackOptions::default()),
            Err(MonodromyError::LoopTouchesDelta(_))
        ));
    }

    #[test]
    fn radius_from_roots() {
        let q: Vec<Complex64> = [0.0, 0.0, -4.0, 1.0]
            .iter()
            .map(|&r| Complex64::new(r, 0.0))
            .collect();
        let r = half_min_root_modulus(&q, 1e-9).unwrap().unwrap();
        assert!((r - 2.0).abs() < 1e-9);
    }
}
