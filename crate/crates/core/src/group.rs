//! Finite groups given by explicit multiplication tables.
//!
//! Group axioms are checked exhaustively at construction time, so every
//! [`FiniteGroup`] value in circulation is a genuine group. The built-in
//! catalogue covers the cyclic groups up to order 6, the symmetric group on
//! three letters and the dihedral group of the square.

use std::fmt;

use crate::{Error, Result};

/// A finite group: ordered element labels plus total multiplication table.
#[derive(Clone)]
pub struct FiniteGroup {
    name: String,
    elements: Vec<String>,
    /// `mult[a][b]` is the index of `a·b`
    mult: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Builds a group from tables, verifying every group axiom exhaustively.
    pub fn from_tables(
        name: impl Into<String>,
        elements: Vec<String>,
        mult: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let name = name.into();
        let n = elements.len();
        if n == 0 {
            return Err(Error::InvalidGroup(format!("{name}: empty element list")));
        }
        {
            let mut seen = std::collections::BTreeSet::new();
            for e in &elements {
                if !seen.insert(e) {
                    return Err(Error::InvalidGroup(format!("{name}: duplicate label {e}")));
                }
            }
        }
        if mult.len() != n || mult.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGroup(format!(
                "{name}: multiplication table is not {n}x{n}"
            )));
        }
        if mult.iter().flatten().any(|&x| x >= n) {
            return Err(Error::InvalidGroup(format!(
                "{name}: table entry out of range"
            )));
        }
        // associativity
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "{name}: associativity fails at ({}, {}, {})",
                            elements[a], elements[b], elements[c]
                        )));
                    }
                }
            }
        }
        // two-sided identity
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mult[e][a] == a && mult[a][e] == a))
            .ok_or_else(|| Error::InvalidGroup(format!("{name}: no identity element")))?;
        // inverses
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| mult[a][b] == identity && mult[b][a] == identity)
                .ok_or_else(|| {
                    Error::InvalidGroup(format!("{name}: {} has no inverse", elements[a]))
                })?;
        }
        Ok(FiniteGroup {
            name,
            elements,
            mult,
            identity,
            inverse,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn label(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn conjugate(&self, a: usize, by: usize) -> usize {
        // by⁻¹ · a · by
        self.mul(self.mul(self.inv(by), a), by)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Checks that `subset` is a union of conjugacy classes.
    pub fn conjugation_closed(&self, subset: &[usize]) -> std::result::Result<(), (usize, usize)> {
        let inside: std::collections::BTreeSet<usize> = subset.iter().copied().collect();
        for &a in subset {
            for by in 0..self.order() {
                let c = self.conjugate(a, by);
                if !inside.contains(&c) {
                    return Err((a, by));
                }
            }
        }
        Ok(())
    }

    // -- catalogue ---------------------------------------------------------

    /// Cyclic group of order `n`, elements `g0..g{n-1}` with `g1` a generator.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let elements = (0..n).map(|i| format!("g{i}")).collect();
        let mult = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        FiniteGroup::from_tables(format!("Z{n}"), elements, mult).expect("cyclic tables")
    }

    /// Symmetric group on three letters, labelled by cycle notation.
    pub fn s3() -> Self {
        // permutations of {0,1,2} as images (p[0], p[1], p[2])
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2], // e
            [1, 2, 0], // (123)
            [2, 0, 1], // (132)
            [1, 0, 2], // (12)
            [0, 2, 1], // (23)
            [2, 1, 0], // (13)
        ];
        let labels = vec!["e", "(123)", "(132)", "(12)", "(23)", "(13)"];
        let compose = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
            // (p·q)(x) = p(q(x))
            [p[q[0]], p[q[1]], p[q[2]]]
        };
        let mult = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| {
                        let pq = compose(p, q);
                        perms.iter().position(|r| *r == pq).unwrap()
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_tables("S3", labels.into_iter().map(String::from).collect(), mult)
            .expect("s3 tables")
    }

    /// The three transpositions of [`FiniteGroup::s3`].
    pub fn s3_reflections(g: &FiniteGroup) -> Vec<usize> {
        ["(12)", "(23)", "(13)"]
            .iter()
            .filter_map(|l| g.index_of(l))
            .collect()
    }

    /// Dihedral group of the square: `r` rotates by a quarter turn, `s`
    /// reflects; `s·r·s = r⁻¹`.
    pub fn d4() -> Self {
        let labels: Vec<String> = ["e", "r", "r2", "r3", "s", "rs", "r2s", "r3s"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        // element = r^a s^x; with s r s = r⁻¹: r^a s^x · r^b s^y = r^{a+(-1)^x b} s^{x+y}
        let enc = |rot: usize, refl: usize| -> usize { refl * 4 + rot };
        let mut mult = vec![vec![0; 8]; 8];
        for a in 0..4 {
            for x in 0..2 {
                for b in 0..4 {
                    for y in 0..2 {
                        let rot = if x == 0 { (a + b) % 4 } else { (a + 4 - b) % 4 };
                        mult[enc(a, x)][enc(b, y)] = enc(rot, (x + y) % 2);
                    }
                }
            }
        }
        FiniteGroup::from_tables("D4", labels, mult).expect("d4 tables")
    }

    /// The named catalogue used by the CLI and the corepresentation tables.
    pub fn catalogue(name: &str) -> Result<Self> {
        match name {
            "Z1" => Ok(FiniteGroup::cyclic(1)),
            "Z2" => Ok(FiniteGroup::cyclic(2)),
            "Z3" => Ok(FiniteGroup::cyclic(3)),
            "Z4" => Ok(FiniteGroup::cyclic(4)),
            "Z5" => Ok(FiniteGroup::cyclic(5)),
            "Z6" => Ok(FiniteGroup::cyclic(6)),
            "S3" => Ok(FiniteGroup::s3()),
            "D4" => Ok(FiniteGroup::d4()),
            other => Err(Error::UnsupportedGroup(other.to_string())),
        }
    }

    pub fn catalogue_names() -> &'static [&'static str] {
        &["Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "S3", "D4"]
    }
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_groups_are_valid_and_abelian() {
        for n in 1..=6 {
            let g = FiniteGroup::cyclic(n);
            assert_eq!(g.order(), n);
            assert!(g.is_abelian());
        }
    }

    #[test]
    fn s3_structure() {
        let g = FiniteGroup::s3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        let refl = FiniteGroup::s3_reflections(&g);
        assert_eq!(refl.len(), 3);
        assert!(g.conjugation_closed(&refl).is_ok());
        // transpositions are involutions
        for &t in &refl {
            assert_eq!(g.inv(t), t);
        }
        // a single transposition is not conjugation closed
        assert!(g.conjugation_closed(&refl[..1]).is_err());
    }

    #[test]
    fn d4_relations() {
        let g = FiniteGroup::d4();
        assert_eq!(g.order(), 8);
        let r = g.index_of("r").unwrap();
        let s = g.index_of("s").unwrap();
        // s r s = r⁻¹
        assert_eq!(g.mul(g.mul(s, r), s), g.inv(r));
        assert_eq!(g.mul(r, g.mul(r, g.mul(r, r))), g.identity());
    }

    #[test]
    fn bad_tables_are_rejected() {
        // index out of range
        assert!(FiniteGroup::from_tables("bad", vec!["e".into()], vec![vec![1]]).is_err());
        // no identity: constant table on two elements
        let res = FiniteGroup::from_tables(
            "bad2",
            vec!["a".into(), "b".into()],
            vec![vec![0, 0], vec![0, 0]],
        );
        assert!(res.is_err());
    }
}
