//! Arc-sections of complex surface germs under finite linear projections.
//!
//! A surface germ `F(x, y, z) = 0` with a finite linear projection to the
//! `(x, y)`-plane admits an *irreducible arc-section* when some arc
//! `γ(t) = (x(t), y(t))` has an irreducible preimage curve
//! `F(x(t), y(t), z) = 0`.  This crate decides the question by resolving the
//! discriminant curve, computing the local monodromy at every normal
//! crossing, and searching the generated permutation groups for a full
//! cycle.  Independent oracles (Newton–Puiseux branch counts, tangent-cone
//! screening) cross-check the monodromy results.

pub mod decide;
pub mod germ;
pub mod group;
pub mod monodromy;
pub mod polyarith;
pub mod resolve;

/// Serialize a rational as `"p/q"` (or `"p"`).
pub(crate) mod serde_rational {
    use crate::polyarith::{fmt_rat, parse_rat, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).ok_or_else(|| D::Error::custom(format!("bad rational '{s}'")))
    }
}

/// Serialize a list of rationals as strings.
pub(crate) mod serde_rational_vec {
    use crate::polyarith::{fmt_rat, parse_rat, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let t: Vec<String> = v.iter().map(fmt_rat).collect();
        t.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rat(s).ok_or_else(|| D::Error::custom(format!("bad rational '{s}'"))))
            .collect()
    }
}

/// Serialize `(exponent, rational)` pairs as `[e, "p/q"]`.
pub(crate) mod serde_rational_terms {
    use crate::polyarith::{fmt_rat, parse_rat, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(u32, Rational)], s: S) -> Result<S::Ok, S::Error> {
        let t: Vec<(u32, String)> = v.iter().map(|(e, q)| (*e, fmt_rat(q))).collect();
        t.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(u32, Rational)>, D::Error> {
        let v = Vec::<(u32, String)>::deserialize(d)?;
        v.into_iter()
            .map(|(e, s)| {
                parse_rat(&s)
                    .map(|q| (e, q))
                    .ok_or_else(|| D::Error::custom(format!("bad rational '{s}'")))
            })
            .collect()
    }
}
