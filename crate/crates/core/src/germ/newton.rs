//! Newton polygons of plane-curve germs.
//!
//! Support points are written `(i, j)` with `i` the exponent of the fiber
//! variable `z` and `j` the exponent of the parameter `t`.  The polygon is
//! the compact part of the lower convex hull running from the support point
//! with the smallest `i` (lowest `j` among those) to `(d, 0)`, where `d` is
//! the order of `g(0, z)`.

use crate::polyarith::{MPoly, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// One edge of a Newton polygon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub from: (u32, u32),
    pub to: (u32, u32),
    /// `Δj / Δi`: roots on this edge satisfy `ord_t z = slope`.
    #[serde(with = "crate::serde_rational")]
    pub slope: Rational,
    /// Lattice length (gcd of the edge's extents).
    pub lattice_length: u32,
    /// Lattice points strictly inside the edge.
    pub interior_points: u32,
}

/// Lower-left convex hull of the exponent support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(u32, u32)>,
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    /// Single edge with no interior lattice point starting on the `t`-axis:
    /// the germ is irreducible (and reduced).
    pub fn is_irreducible_fast_path(&self) -> bool {
        self.segments.len() == 1
            && self.segments[0].from.0 == 0
            && self.segments[0].lattice_length == 1
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Newton polygon from raw support points `(i, j)`.
pub fn newton_polygon_of_points(points: &[(u32, u32)]) -> NewtonPolygon {
    if points.is_empty() {
        return NewtonPolygon {
            vertices: Vec::new(),
            segments: Vec::new(),
        };
    }
    let d = points
        .iter()
        .filter(|p| p.1 == 0)
        .map(|p| p.0)
        .min()
        .unwrap_or_else(|| points.iter().map(|p| p.0).max().unwrap());
    // lowest j for each i <= d
    let mut best: std::collections::BTreeMap<u32, u32> = Default::default();
    for &(i, j) in points {
        if i <= d {
            let e = best.entry(i).or_insert(j);
            if j < *e {
                *e = j;
            }
        }
    }
    let pts: Vec<(i64, i64)> = best.iter().map(|(&i, &j)| (i as i64, j as i64)).collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    // Keep only the descending (compact) part.
    let mut verts: Vec<(u32, u32)> = Vec::new();
    for (k, &(i, j)) in hull.iter().enumerate() {
        if k > 0 && j >= hull[k - 1].1 {
            break;
        }
        verts.push((i as u32, j as u32));
    }
    let segments = verts
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let di = b.0 - a.0;
            let dj = a.1 - b.1;
            let g = di.gcd(&dj);
            Segment {
                from: a,
                to: b,
                slope: Rational::new(BigInt::from(dj), BigInt::from(di)),
                lattice_length: g,
                interior_points: g - 1,
            }
        })
        .collect();
    NewtonPolygon {
        vertices: verts,
        segments,
    }
}

/// Newton polygon of `g(t, z)`.
pub fn newton_polygon_of(g: &MPoly, tvar: &str, zvar: &str) -> NewtonPolygon {
    let ti = g.var_index(tvar);
    let zi = g.var_index(zvar);
    let pts: Vec<(u32, u32)> = g
        .terms()
        .map(|(e, _)| {
            (
                zi.map(|k| e[k]).unwrap_or(0),
                ti.map(|k| e[k]).unwrap_or(0),
            )
        })
        .collect();
    newton_polygon_of_points(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::{parse_poly, ratio};

    fn np(s: &str) -> NewtonPolygon {
        newton_polygon_of(&parse_poly(s, &["t", "z"]).unwrap(), "t", "z")
    }

    #[test]
    fn cusp_single_edge() {
        let p = np("z^2 - t^3");
        assert_eq!(p.vertices, vec![(0, 3), (2, 0)]);
        assert_eq!(p.segments[0].interior_points, 0);
        assert_eq!(p.segments[0].slope, ratio(3, 2));
        assert!(p.is_irreducible_fast_path());
        assert!(np("z^3 - t^4").is_irreducible_fast_path());
    }

    #[test]
    fn four_lines_edge_has_interior_points() {
        let p = np("z^4 - 1/8*t^3*z + 3/64*t^4");
        assert_eq!(p.vertices, vec![(0, 4), (4, 0)]);
        assert_eq!(p.segments.len(), 1);
        assert_eq!(p.segments[0].lattice_length, 4);
        assert_eq!(p.segments[0].interior_points, 3);
        assert!(!p.is_irreducible_fast_path());
    }

    #[test]
    fn two_edges() {
        // z (z - t^2) (z - t): slopes 1 and 2
        let p = np("z*(z - t^2)*(z - t)");
        assert_eq!(p.vertices, vec![(1, 3), (2, 1), (3, 0)]);
        assert_eq!(p.segments[0].slope, ratio(2, 1));
        assert_eq!(p.segments[1].slope, ratio(1, 1));
    }
}
