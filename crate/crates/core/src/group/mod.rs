//! Permutations of fiber labels and the groups they generate.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

/// Errors from permutation parsing and group enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("not a permutation: {0}")]
    Invalid(String),
    #[error("generators act on different sets ({0} vs {1})")]
    DegreeMismatch(usize, usize),
    #[error("group closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
}

/// Bijection of `{0, …, d-1}`; `images[i]` is the image of label `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Permutation {
            images: (0..d).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, GroupError> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(GroupError::Invalid(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Parse 1-based cycle notation such as `(1,4)(2,3)`; `()` or the empty
    /// string is the identity.
    pub fn from_cycles(src: &str, d: usize) -> Result<Self, GroupError> {
        let mut images: Vec<usize> = (0..d).collect();
        let mut seen = vec![false; d];
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || GroupError::Invalid(src.to_string());
        let mut rest = s.as_str();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(bad());
            }
            let close = rest.find(')').ok_or_else(bad)?;
            let body = &rest[1..close];
            rest = &rest[close + 1..];
            if body.is_empty() {
                continue;
            }
            let pts: Vec<usize> = body
                .split(',')
                .map(|t| t.parse::<usize>().ok().filter(|&k| k >= 1 && k <= d))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(bad)?;
            for &p in &pts {
                if seen[p - 1] {
                    return Err(bad());
                }
                seen[p - 1] = true;
            }
            for k in 0..pts.len() {
                images[pts[k] - 1] = pts[(k + 1) % pts.len()] - 1;
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self` followed by `other`: `i ↦ other(self(i))`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, k: u64) -> Permutation {
        let mut acc = Permutation::identity(self.degree());
        for _ in 0..(k % self.order().max(1)) {
            acc = acc.then(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycles (including fixed points), each starting at its smallest label,
    /// ordered by that label.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for s in 0..d {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut k = self.images[s];
            while k != s {
                seen[k] = true;
                c.push(k);
                k = self.images[k];
            }
            out.push(c);
        }
        out
    }

    /// Cycle lengths in descending order (fixed points included).
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    pub fn order(&self) -> u64 {
        self.cycle_type()
            .iter()
            .fold(1u64, |acc, &l| num_integer::lcm(acc, l as u64))
    }

    /// 1-based cycle notation omitting fixed points; `()` for the identity.
    pub fn cycle_notation(&self) -> String {
        let parts: Vec<String> = self
            .cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let s: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
                format!("({})", s.join(","))
            })
            .collect();
        if parts.is_empty() {
            "()".to_string()
        } else {
            parts.concat()
        }
    }

    /// `g⁻¹ ∘ self ∘ g` in the relabeling sense: label `i` becomes `g(i)`.
    pub fn relabel(&self, g: &Permutation) -> Permutation {
        g.inverse().then(self).then(g)
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.then(other) == other.then(self)
    }
}

/// True iff `p` is a single cycle through all labels.
pub fn is_transitive(p: &Permutation) -> bool {
    p.degree() > 0 && p.cycle_count() == 1
}

/// Cycle type formatted as `(2,2)` / `(3,1)` / `(1,1,1,1)`.
pub fn cycle_type_text(p: &Permutation) -> String {
    let t: Vec<String> = p.cycle_type().iter().map(|k| k.to_string()).collect();
    format!("({})", t.join(","))
}

/// A d-cycle found in a generated group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupWitness {
    pub element: Permutation,
    /// `(a, b)` with `element = P1^a P2^b` when the generators commute.
    pub exponents: Option<(u64, u64)>,
    /// Generator word (indices 0/1) producing the element otherwise.
    pub word: Vec<u8>,
}

/// Result of [`generated_group`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermGroupReport {
    pub generators: Vec<Permutation>,
    pub commuting: bool,
    pub order: usize,
    pub elements: Vec<Permutation>,
    /// Some element is a single d-cycle.
    pub has_transitive: bool,
    /// The generated group acts transitively (weaker reading).
    pub group_transitive: bool,
    pub witness: Option<GroupWitness>,
    /// Cycle type text → number of elements with that type.
    pub cycle_type_census: BTreeMap<String, usize>,
}

/// Default cap on enumerated elements.
pub const GROUP_CAP: usize = 1_000_000;

/// Subgroup generated by two permutations.
pub fn generated_group(p1: &Permutation, p2: &Permutation) -> Result<PermGroupReport, GroupError> {
    generated_group_capped(p1, p2, GROUP_CAP)
}

/// As [`generated_group`] with an explicit element cap.
pub fn generated_group_capped(
    p1: &Permutation,
    p2: &Permutation,
    cap: usize,
) -> Result<PermGroupReport, GroupError> {
    if p1.degree() != p2.degree() {
        return Err(GroupError::DegreeMismatch(p1.degree(), p2.degree()));
    }
    let d = p1.degree();
    let commuting = p1.commutes_with(p2);
    // element -> (exponents, word)
    let mut found: BTreeMap<Permutation, (Option<(u64, u64)>, Vec<u8>)> = BTreeMap::new();
    if commuting {
        let (o1, o2) = (p1.order(), p2.order());
        if (o1 as u128) * (o2 as u128) > cap as u128 * 4 {
            return Err(GroupError::CapExceeded(cap));
        }
        // Visit (a, b) by increasing a + b so witnesses use small exponents.
        let mut pairs: Vec<(u64, u64)> = Vec::new();
        for a in 0..o1 {
            for b in 0..o2 {
                pairs.push((a, b));
            }
        }
        pairs.sort_by_key(|&(a, b)| (a + b, a));
        for (a, b) in pairs {
            let e = p1.pow(a).then(&p2.pow(b));
            found.entry(e).or_insert_with(|| {
                let mut w = vec![0u8; a as usize];
                w.extend(std::iter::repeat_n(1u8, b as usize));
                (Some((a, b)), w)
            });
            if found.len() > cap {
                return Err(GroupError::CapExceeded(cap));
            }
        }
    } else {
        let id = Permutation::identity(d);
        found.insert(id.clone(), (None, Vec::new()));
        let mut queue = VecDeque::from([id]);
        let gens = [p1, p2];
        while let Some(g) = queue.pop_front() {
            let word = found[&g].1.clone();
            for (k, h) in gens.iter().enumerate() {
                let n = g.then(h);
                if !found.contains_key(&n) {
                    let mut w = word.clone();
                    w.push(k as u8);
                    found.insert(n.clone(), (None, w));
                    if found.len() > cap {
                        return Err(GroupError::CapExceeded(cap));
                    }
                    queue.push_back(n);
                }
            }
        }
    }
    let mut census: BTreeMap<String, usize> = BTreeMap::new();
    for e in found.keys() {
        *census.entry(cycle_type_text(e)).or_default() += 1;
    }
    let witness = found
        .iter()
        .filter(|(e, _)| is_transitive(e))
        .min_by_key(|(_, (ex, w))| (w.len(), ex.map(|(a, _)| a)))
        .map(|(e, (ex, w))| GroupWitness {
            element: e.clone(),
            exponents: *ex,
            word: w.clone(),
        });
    // Orbit of label 0 under the generators.
    let mut orbit = vec![false; d];
    if d > 0 {
        orbit[0] = true;
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            for g in [p1, p2] {
                for j in [g.apply(i), g.inverse().apply(i)] {
                    if !orbit[j] {
                        orbit[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    Ok(PermGroupReport {
        generators: vec![p1.clone(), p2.clone()],
        commuting,
        order: found.len(),
        has_transitive: witness.is_some(),
        group_transitive: orbit.iter().all(|&b| b),
        witness,
        elements: found.into_keys().collect(),
        cycle_type_census: census,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(s: &str) -> Permutation {
        Permutation::from_cycles(s, 4).unwrap()
    }

    #[test]
    fn cycle_notation_roundtrip() {
        let p = pc("(1,4)(2,3)");
        assert_eq!(p.images(), &[3, 2, 1, 0]);
        assert_eq!(p.cycle_notation(), "(1,4)(2,3)");
        assert_eq!(pc("()").cycle_notation(), "()");
        assert_eq!(pc("(4,2,1)").cycle_notation(), "(1,4,2)");
        assert!(Permutation::from_cycles("(1,1)", 4).is_err());
        assert!(Permutation::from_cycles("(1,5)", 4).is_err());
    }

    #[test]
    fn transitivity() {
        assert!(is_transitive(&pc("(1,2,3,4)")));
        assert!(!is_transitive(&pc("(1,4)(2,3)")));
        assert!(!is_transitive(&pc("(1,4,2)")));
        assert_eq!(pc("(1,4,2)").cycle_type(), vec![3, 1]);
    }

    #[test]
    fn identity_and_double_transposition() {
        let r = generated_group(&pc("()"), &pc("(1,4)(2,3)")).unwrap();
        assert_eq!(r.order, 2);
        assert!(!r.has_transitive);
        assert!(r.commuting);
    }

    #[test]
    fn four_cycle_witness() {
        let r = generated_group(&pc("()"), &pc("(1,2,3,4)")).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.element, pc("(1,2,3,4)"));
        assert_eq!(w.exponents, Some((0, 1)));
    }

    #[test]
    fn klein_four() {
        let r = generated_group(&pc("(1,2)(3,4)"), &pc("(1,3)(2,4)")).unwrap();
        assert_eq!(r.order, 4);
        assert!(!r.has_transitive);
        assert!(r.group_transitive);
    }

    #[test]
    fn non_commuting_closure() {
        let r = generated_group(&pc("(1,2)"), &pc("(1,2,3,4)")).unwrap();
        assert!(!r.commuting);
        assert_eq!(r.order, 24);
        assert!(r.has_transitive);
        assert!(matches!(
            generated_group_capped(&pc("(1,2)"), &pc("(1,2,3,4)"), 10),
            Err(GroupError::CapExceeded(10))
        ));
    }
}
