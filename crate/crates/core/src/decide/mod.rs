//! Decision procedures: projection setup, tangent-cone screening, the
//! crossing-by-crossing search for irreducible arc-sections, witness arcs and
//! arc-section evaluation.

mod analyze;
mod cone;
mod section;
mod witness;

pub use analyze::{analyze, AnalyzeOptions, Analysis, CrossingReport, CrossingStatus, Existence, Verdict};
pub use cone::{
    cone_discriminant_check, tangent_cone_screen, AdmissibleLine, ConeClass, ConeDiscriminantReport,
    FlexPoint, TangentCone,
};
pub use section::{arc_section, Arc, ArcPath, ArcProvenance, SectionOptions, SectionReport};
pub use witness::{
    branch_arc_at_crossing, crossing_exponent_candidates, screen_discriminant_branches, totally_reducible_arc,
    witness_irreducible_arc, BranchScreen, WitnessReport,
};

use crate::germ::GermError;
use crate::group::GroupError;
use crate::monodromy::MonodromyError;
use crate::polyarith::{discriminant_raw, initial_form, MPoly, PolyError, Rational};
use crate::resolve::ResolveError;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Coordinates of the ambient space.
pub const XYZ: [&str; 3] = ["x", "y", "z"];

/// Errors raised by the decision procedures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecideError {
    #[error("the surface does not pass through the origin")]
    NotThroughOrigin,
    #[error("the projection direction is zero")]
    ZeroDirection,
    #[error("the projection is not finite: the direction line lies in the surface")]
    LineInSurface,
    #[error("unsupported projection: {0}")]
    UnsupportedProjection(String),
    #[error("invalid arc: {0}")]
    InvalidArc(String),
    #[error("the arc meets the discriminant at t = {t} (|t| = {modulus:.3e}) inside its radius")]
    ArcMeetsDelta { t: String, modulus: f64 },
    #[error("witness validation failed: {0}")]
    ValidationFailed(String),
    #[error("no admissible exponents: {0}")]
    NoExponents(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

impl DecideError {
    /// Whether the error stems from numerical certification (as opposed to
    /// invalid input).
    pub fn is_certification(&self) -> bool {
        matches!(
            self,
            DecideError::Monodromy(_)
                | DecideError::Germ(GermError::Tracking(_))
                | DecideError::ValidationFailed(_)
                | DecideError::Resolve(ResolveError::BidiskNotCertified { .. })
        )
    }
}

/// A surface germ `F(x, y, z) = 0` with a linear projection along a
/// direction, brought into the form where the direction is the `z`-axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSetup {
    pub surface: MPoly,
    #[serde(with = "crate::serde_rational_vec")]
    pub direction: Vec<Rational>,
    /// `F ∘ L` for a linear change `L` sending the `z`-axis to the direction.
    pub adapted: MPoly,
    /// Degree of the covering (Weierstrass degree in `z`).
    pub d: u32,
    /// Multiplicity of the surface at the origin.
    pub m: u32,
    /// The direction is not on the tangent cone.
    pub transverse: bool,
    /// `deg_z` of the adapted equation (may exceed `d`).
    pub degree_z: u32,
}

impl ProjectionSetup {
    /// Sheets restriction for tracking when far sheets are present.
    pub fn sheets(&self) -> Option<usize> {
        (self.degree_z > self.d).then_some(self.d as usize)
    }

    /// Discriminant of the adapted equation, normalized.
    pub fn discriminant(&self) -> Result<MPoly, DecideError> {
        Ok(discriminant_raw(&self.adapted, "z")?.with_vars(&["x", "y"]).normalized())
    }
}

/// The linear change `(l1, l2, l3)` sending `e3` to the direction.
fn adapting_map(p: &[Rational]) -> [MPoly; 3] {
    let v = |n: &str| MPoly::var(n, &XYZ);
    let k = |q: &Rational| MPoly::constant(q.clone(), &XYZ);
    let z = v("z");
    if !p[2].is_zero() {
        [
            &v("x") + &(&k(&p[0]) * &z),
            &v("y") + &(&k(&p[1]) * &z),
            &k(&p[2]) * &z,
        ]
    } else if !p[1].is_zero() {
        [&v("x") + &(&k(&p[0]) * &z), &k(&p[1]) * &z, v("y")]
    } else {
        [&k(&p[0]) * &z, v("x"), v("y")]
    }
}

/// Parse an axis name or return `None`.
pub fn axis_direction(name: &str) -> Option<[Rational; 3]> {
    let (o, z) = (Rational::one(), Rational::zero());
    match name.trim() {
        "x" => Some([o, z.clone(), z]),
        "y" => Some([z.clone(), o, z]),
        "z" => Some([z.clone(), z, o]),
        _ => None,
    }
}

/// Bring `F` into adapted form for the projection along `direction`.
pub fn setup_projection(f: &MPoly, direction: &[Rational; 3]) -> Result<ProjectionSetup, DecideError> {
    let f = f.with_vars(&XYZ);
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial.into());
    }
    if !f.constant_term().is_zero() {
        return Err(DecideError::NotThroughOrigin);
    }
    if direction.iter().all(|c| c.is_zero()) {
        return Err(DecideError::ZeroDirection);
    }
    let l = adapting_map(direction);
    let mut sub = BTreeMap::new();
    for (name, li) in XYZ.iter().zip(&l) {
        sub.insert(name.to_string(), li.clone());
    }
    let adapted = f.substitute(&sub).with_vars(&XYZ);
    let zero = Rational::zero();
    let on_axis = adapted.eval_var("x", &zero).eval_var("y", &zero);
    if on_axis.is_zero() {
        return Err(DecideError::LineInSurface);
    }
    let d = on_axis.order_in("z");
    let degree_z = adapted.degree_in("z");
    if on_axis.degree_in("z") != degree_z {
        return Err(DecideError::UnsupportedProjection(
            "the leading coefficient in z vanishes at the origin".into(),
        ));
    }
    // Far sheets must stay apart over the origin, otherwise the discriminant
    // acquires components through the origin that are not branch curves.
    let far = on_axis
        .div_monomial(&[0, 0, d])
        .with_vars(&["z"]);
    if far.degree_in("z") >= 2 && discriminant_raw(&far, "z")?.is_zero() {
        return Err(DecideError::UnsupportedProjection(
            "sheets away from the origin collide over it".into(),
        ));
    }
    let cone = initial_form(&f)?;
    let mut at = BTreeMap::new();
    for (name, c) in XYZ.iter().zip(direction) {
        at.insert(name.to_string(), MPoly::constant(c.clone(), &XYZ));
    }
    let transverse = !cone.substitute(&at).constant_term().is_zero();
    Ok(ProjectionSetup {
        m: f.order(),
        surface: f,
        direction: direction.to_vec(),
        adapted,
        d,
        transverse,
        degree_z,
    })
}

/// `count` reproducible directions `(a : b)` with small integer entries on
/// which the binary form `bad` does not vanish.
pub fn generic_directions(bad: &MPoly, seed: u64, count: usize) -> Vec<(Rational, Rational)> {
    let bad = bad.with_vars(&["x", "y"]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < 10_000 {
        tries += 1;
        let a: i64 = rng.gen_range(1..=9);
        let b: i64 = rng.gen_range(-9..=9);
        if num_integer::gcd(a, b) != 1 {
            continue;
        }
        let (a, b) = (Rational::from_integer(a.into()), Rational::from_integer(b.into()));
        let v = bad.eval_var("x", &a).eval_var("y", &b).constant_term();
        if v.is_zero() || out.iter().any(|(p, q)| p == &a && q == &b) {
            continue;
        }
        out.push((a, b));
    }
    out
}

/// Seeded nonzero rational in `[3/10, 4/5]·scale` with small denominator.
pub(crate) fn seeded_constant(rng: &mut ChaCha8Rng, scale: &Rational) -> Rational {
    let n: i64 = rng.gen_range(3..=8);
    scale * &Rational::new(n.into(), 10.into())
}

/// Substitute an arc `(x(t), y(t))` into a polynomial in `x, y[, z]`.
pub(crate) fn compose_arc(p: &MPoly, x: &MPoly, y: &MPoly, vars: &[&str]) -> MPoly {
    let mut m = BTreeMap::new();
    m.insert("x".to_string(), x.with_vars(vars));
    m.insert("y".to_string(), y.with_vars(vars));
    p.substitute(&m).with_vars(vars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::{parse_poly, rat, ratio};

    fn f(s: &str) -> MPoly {
        parse_poly(s, &XYZ).unwrap()
    }

    #[test]
    fn projection_degrees_and_transversality() {
        let z = axis_direction("z").unwrap();
        let s = setup_projection(&f("z^4 - 4*x*z + 3*y^2"), &z).unwrap();
        assert_eq!((s.d, s.m, s.transverse), (4, 2, false));
        assert!(s.d > s.m);
        let s = setup_projection(&f("z^2 - x^3 - y^3"), &z).unwrap();
        assert_eq!((s.d, s.m, s.transverse), (2, 2, true));
        let s = setup_projection(&f("z^3 - (x - y)*(x + y)*(x - 2*y)*(x + 2*y)"), &z).unwrap();
        assert_eq!((s.d, s.m, s.transverse), (3, 3, true));
    }

    #[test]
    fn projection_errors() {
        let z = axis_direction("z").unwrap();
        assert_eq!(setup_projection(&f("x*z + y"), &z), Err(DecideError::LineInSurface));
        assert_eq!(setup_projection(&f("z^2 - x + 1"), &z), Err(DecideError::NotThroughOrigin));
        let zero = [rat(0), rat(0), rat(0)];
        assert_eq!(setup_projection(&f("z^2 - x"), &zero), Err(DecideError::ZeroDirection));
    }

    #[test]
    fn perturbed_direction_is_a_linear_change() {
        let s = setup_projection(
            &f("z^3 - (x - y)*(x + y)*(x - 2*y)*(x + 2*y)"),
            &[rat(0), ratio(1, 10), rat(1)],
        )
        .unwrap();
        assert_eq!(s.d, 3);
        assert_eq!(s.degree_z, 4);
        assert_eq!(s.sheets(), Some(3));
        let expected = f("z^3 - (x - y - z/10)*(x + y + z/10)*(x - 2*y - z/5)*(x + 2*y + z/5)");
        assert_eq!(s.adapted, expected);
    }

    #[test]
    fn axis_directions_permute_coordinates() {
        let s = setup_projection(&f("x^2 - y*z"), &axis_direction("x").unwrap()).unwrap();
        assert_eq!(s.adapted, f("z^2 - x*y"));
        assert_eq!(s.d, 2);
    }

    #[test]
    fn generic_directions_avoid_bad_set() {
        let bad = parse_poly("x*y*(x - y)", &["x", "y"]).unwrap();
        let ds = generic_directions(&bad, 7, 5);
        assert_eq!(ds.len(), 5);
        for (a, b) in &ds {
            assert!(!b.is_zero() && a != b);
        }
        assert_eq!(ds, generic_directions(&bad, 7, 5));
    }
}
