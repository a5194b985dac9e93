//! Exact polynomial arithmetic over ℚ plus complex-float root finding.

mod gcd;
mod mpoly;
mod parse;
mod roots;

pub use gcd::{
    content_in, discriminant_raw, discriminant_z, gcd, prem, primitive_part_in, resultant, squarefree_factors,
    squarefree_part, SquarefreeFactor,
};
pub use mpoly::{
    canonical_vars, fmt_rat, parse_rat, pow_rat, rat, rat_from_f64, rat_to_f64, ratio, MPoly,
    Rational, CANONICAL_ORDER,
};
pub use parse::parse_poly;
pub use roots::{
    aberth, certify_roots, cluster_roots, horner, rational_approximation, rational_roots_with_rest,
    univariate_roots,
    ComplexBox, RootCluster,
};

use thiserror::Error;

/// Errors raised by polynomial operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable '{name}' at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("polynomial is constant in {0}")]
    ConstantInVariable(String),
    #[error("zero polynomial has no initial form")]
    ZeroPolynomial,
    #[error("degenerate leading coefficient")]
    DegenerateLeading,
}

/// Product of the distinct irreducible factors of `f` (up to a unit):
/// `f / gcd(f, ∂f/∂v₁, …, ∂f/∂vₙ)`.
pub fn radical(f: &MPoly) -> MPoly {
    if f.is_zero() || f.is_constant() {
        return f.clone();
    }
    let mut g = f.clone();
    for v in f.used_vars() {
        g = gcd(&g, &f.derivative(&v));
    }
    f.exact_div(&g).expect("gcd divides").normalized()
}

/// Homogeneous component of lowest total degree.
pub fn initial_form(f: &MPoly) -> Result<MPoly, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    Ok(f.homogeneous_component(f.order()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_forms() {
        let v = ["x", "y", "z"];
        let f = parse_poly("z^4-4*x*z+3*y^2", &v).unwrap();
        assert_eq!(initial_form(&f).unwrap(), parse_poly("3*y^2-4*x*z", &v).unwrap());
        let h = parse_poly("x^2*y - y^3", &v).unwrap();
        assert_eq!(initial_form(&h).unwrap(), h);
        let g = parse_poly("z^3-(x-y)*(x+y)*(x-2*y)*(x+2*y)", &v).unwrap();
        assert_eq!(initial_form(&g).unwrap(), parse_poly("z^3", &v).unwrap());
        assert_eq!(
            initial_form(&MPoly::zero(&v)),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn radicals() {
        let v = ["x", "y"];
        let f = parse_poly("x^3*(y - x^2)^2*(y + 1)", &v).unwrap();
        let r = parse_poly("x*(y - x^2)*(y + 1)", &v).unwrap();
        assert!(radical(&f).equal_up_to_unit(&r));
        let g = parse_poly("y^6 - x^4", &v).unwrap();
        assert!(radical(&g).equal_up_to_unit(&g));
    }
}
