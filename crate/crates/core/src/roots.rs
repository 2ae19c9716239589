//! Crystallographic root systems and their reflection groups.
//!
//! Only the rational families A/B/D are in the catalogue: every root has
//! rational coordinates, so reflections are exact rational matrices and the
//! generated Coxeter group is enumerated exactly. Dihedral angles needing
//! `cos(π/m)` are out of scope.

use std::fmt;

use crate::group::FiniteGroup;
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// A root system realized with rational coordinates.
#[derive(Clone)]
pub struct RootSystem {
    pub kind: char,
    pub rank: usize,
    /// ambient dimension (rank + 1 for A, rank for B/D)
    pub dim: usize,
    /// all roots; the first `positive_count` are the positive ones
    roots: Vec<Vec<Scalar>>,
    positive_count: usize,
}

fn basis_vec(dim: usize, entries: &[(usize, i64)]) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); dim];
    for &(i, c) in entries {
        v[i] = Scalar::from_int(c);
    }
    v
}

impl RootSystem {
    /// Builds `A_n ⊆ R^{n+1}`, `B_n ⊆ R^n` or `D_n ⊆ R^n` (`kind` is `'A'`,
    /// `'B'` or `'D'`); bounded so the total number of roots stays small.
    pub fn build(kind: char, rank: usize) -> Result<Self> {
        let (dim, mut positives): (usize, Vec<Vec<Scalar>>) = match (kind, rank) {
            ('A', n) if (1..=5).contains(&n) => {
                let dim = n + 1;
                let mut pos = Vec::new();
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        pos.push(basis_vec(dim, &[(i, 1), (j, -1)]));
                    }
                }
                (dim, pos)
            }
            ('B', n) if (1..=4).contains(&n) => {
                let mut pos = Vec::new();
                for i in 0..n {
                    pos.push(basis_vec(n, &[(i, 1)]));
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        pos.push(basis_vec(n, &[(i, 1), (j, -1)]));
                        pos.push(basis_vec(n, &[(i, 1), (j, 1)]));
                    }
                }
                (n, pos)
            }
            ('D', n) if (2..=4).contains(&n) => {
                let mut pos = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        pos.push(basis_vec(n, &[(i, 1), (j, -1)]));
                        pos.push(basis_vec(n, &[(i, 1), (j, 1)]));
                    }
                }
                (n, pos)
            }
            _ => {
                return Err(Error::UnsupportedRootSystem(format!(
                    "{kind}{rank} is outside the rational catalogue"
                )))
            }
        };
        let positive_count = positives.len();
        let mut roots = positives.clone();
        for p in positives.drain(..) {
            roots.push(p.iter().map(|c| -c.clone()).collect());
        }
        let rs = RootSystem {
            kind,
            rank,
            dim,
            roots,
            positive_count,
        };
        rs.verify()?;
        Ok(rs)
    }

    fn verify(&self) -> Result<()> {
        for (ri, r) in self.roots.iter().enumerate() {
            let m = self.reflection_matrix(ri);
            // σ_r² = id
            let mut sq = Matrix::zeros(self.dim, self.dim);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let mut acc = Scalar::zero();
                    for k in 0..self.dim {
                        acc += &(m.at(i, k) * m.at(k, j));
                    }
                    *sq.at_mut(i, j) = acc;
                }
            }
            if sq != Matrix::identity(self.dim) {
                return Err(Error::Internal(format!("σ² ≠ id for root {ri}")));
            }
            // σ_r(r) = −r
            let img = apply_matrix(&m, r);
            let neg: Vec<Scalar> = r.iter().map(|c| -c.clone()).collect();
            if img != neg {
                return Err(Error::Internal(format!("σ_r(r) ≠ −r for root {ri}")));
            }
            // closure of the root set under every reflection
            for s in &self.roots {
                let img = apply_matrix(&m, s);
                if !self.roots.contains(&img) {
                    return Err(Error::Internal(format!(
                        "roots not closed under reflection {ri}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn root(&self, i: usize) -> &[Scalar] {
        &self.roots[i]
    }

    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    pub fn positive(&self) -> impl Iterator<Item = usize> {
        0..self.positive_count
    }

    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    pub fn inner(&self, a: &[Scalar], b: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (x, y) in a.iter().zip(b) {
            acc += &(x * y);
        }
        acc
    }

    /// `σ_r(x) = x − 2⟨r,x⟩/⟨r,r⟩ · r` as an exact matrix.
    pub fn reflection_matrix(&self, root: usize) -> Matrix {
        let r = &self.roots[root];
        let norm = self.inner(r, r);
        let factor = Scalar::from_int(2) * norm.inv();
        Matrix::from_fn(self.dim, self.dim, |i, j| {
            let mut v = if i == j {
                Scalar::one()
            } else {
                Scalar::zero()
            };
            v -= &(&(&r[i] * &r[j]) * &factor);
            v
        })
    }

    /// Orbits of the full reflection group on the positive roots; κ must be
    /// constant on these.
    pub fn positive_orbits(&self) -> Vec<Vec<usize>> {
        // act by all reflections, identify ±r
        let mut orbit_of: Vec<Option<usize>> = vec![None; self.positive_count];
        let mut orbits = Vec::new();
        for start in 0..self.positive_count {
            if orbit_of[start].is_some() {
                continue;
            }
            let id = orbits.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            orbit_of[start] = Some(id);
            while let Some(p) = stack.pop() {
                members.push(p);
                for refl in 0..self.root_count() {
                    let m = self.reflection_matrix(refl);
                    let img = apply_matrix(&m, &self.roots[p]);
                    let img_idx = self.index_of_root_up_to_sign(&img).expect("closed");
                    if orbit_of[img_idx].is_none() {
                        orbit_of[img_idx] = Some(id);
                        stack.push(img_idx);
                    }
                }
            }
            members.sort();
            orbits.push(members);
        }
        orbits
    }

    /// Index of `±v` among the positive roots.
    pub fn index_of_root_up_to_sign(&self, v: &[Scalar]) -> Option<usize> {
        for i in 0..self.positive_count {
            if self.roots[i] == v {
                return Some(i);
            }
            let neg: Vec<Scalar> = self.roots[i].iter().map(|c| -c.clone()).collect();
            if neg == v {
                return Some(i);
            }
        }
        None
    }
}

impl fmt::Debug for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RootSystem({}{}, {} roots in R^{})",
            self.kind,
            self.rank,
            self.root_count(),
            self.dim
        )
    }
}

pub fn apply_matrix(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    (0..m.rows)
        .map(|i| {
            let mut acc = Scalar::zero();
            for (j, x) in v.iter().enumerate() {
                acc += &(m.at(i, j) * x);
            }
            acc
        })
        .collect()
}

/// The Coxeter group generated by the reflections, enumerated as exact
/// matrices; returns the group, the indices of its reflection elements
/// (conjugation closed by construction) and the matrix of every element.
pub fn coxeter_group(rs: &RootSystem) -> Result<(FiniteGroup, Vec<usize>, Vec<Matrix>)> {
    let generators: Vec<Matrix> = rs.positive().map(|i| rs.reflection_matrix(i)).collect();
    let identity = Matrix::identity(rs.dim);
    let mut elements: Vec<Matrix> = vec![identity.clone()];
    let mut queue = std::collections::VecDeque::from([identity]);
    while let Some(m) = queue.pop_front() {
        for g in &generators {
            let prod = mat_mul(&m, g);
            if !elements.contains(&prod) {
                elements.push(prod.clone());
                queue.push_back(prod);
                if elements.len() > 1200 {
                    return Err(Error::UnsupportedRootSystem(
                        "reflection group too large for the catalogue".into(),
                    ));
                }
            }
        }
    }
    // reflections: elements equal to some root reflection
    let mut reflections = Vec::new();
    for (i, m) in elements.iter().enumerate() {
        if rs.positive().any(|r| rs.reflection_matrix(r) == *m) {
            reflections.push(i);
        }
    }
    // labels: e, then reflections σ⟨positive root index⟩, then w#
    let labels: Vec<String> = elements
        .iter()
        .enumerate()
        .map(|(i, m)| {
            if i == 0 {
                "e".to_string()
            } else if let Some(r) = rs.positive().find(|&r| rs.reflection_matrix(r) == *m) {
                format!("σ{r}")
            } else {
                format!("w{i}")
            }
        })
        .collect();
    let mult: Vec<Vec<usize>> = elements
        .iter()
        .map(|a| {
            elements
                .iter()
                .map(|b| {
                    let p = mat_mul(a, b);
                    elements.iter().position(|e| *e == p).expect("closure")
                })
                .collect()
        })
        .collect();
    let group = FiniteGroup::from_tables(format!("W({}{})", rs.kind, rs.rank), labels, mult)?;
    if let Err((a, by)) = group.conjugation_closed(&reflections) {
        return Err(Error::NotConjugationClosed(format!(
            "{} by {}",
            group.label(a),
            group.label(by)
        )));
    }
    Ok((group, reflections, elements))
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    Matrix::from_fn(a.rows, b.cols, |i, j| {
        let mut acc = Scalar::zero();
        for k in 0..a.cols {
            acc += &(a.at(i, k) * b.at(k, j));
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a1_has_one_positive_root_and_z2_group() {
        let rs = RootSystem::build('A', 1).unwrap();
        assert_eq!(rs.positive_count(), 1);
        assert_eq!(rs.root(0), &[Scalar::one(), Scalar::from_int(-1)][..]);
        let (w, refl, _) = coxeter_group(&rs).unwrap();
        assert_eq!(w.order(), 2);
        assert_eq!(refl.len(), 1);
    }

    #[test]
    fn a2_is_the_symmetric_group_on_three_letters() {
        let rs = RootSystem::build('A', 2).unwrap();
        assert_eq!(rs.positive_count(), 3);
        let (w, refl, _) = coxeter_group(&rs).unwrap();
        assert_eq!(w.order(), 6);
        assert_eq!(refl.len(), 3);
        assert!(!w.is_abelian());
        // single orbit of positive roots
        assert_eq!(rs.positive_orbits().len(), 1);
    }

    #[test]
    fn b2_has_two_orbits_and_order_eight() {
        let rs = RootSystem::build('B', 2).unwrap();
        assert_eq!(rs.positive_count(), 4);
        let (w, refl, _) = coxeter_group(&rs).unwrap();
        assert_eq!(w.order(), 8);
        assert_eq!(refl.len(), 4);
        assert_eq!(rs.positive_orbits().len(), 2);
    }

    #[test]
    fn d2_is_the_klein_group() {
        let rs = RootSystem::build('D', 2).unwrap();
        let (w, _, _) = coxeter_group(&rs).unwrap();
        assert_eq!(w.order(), 4);
        assert!(w.is_abelian());
    }

    #[test]
    fn b1_is_the_sign_flip_on_the_line() {
        let rs = RootSystem::build('B', 1).unwrap();
        assert_eq!(rs.dim, 1);
        assert_eq!(rs.positive_count(), 1);
        let m = rs.reflection_matrix(0);
        assert_eq!(*m.at(0, 0), Scalar::from_int(-1));
    }

    #[test]
    fn unsupported_kinds_are_rejected() {
        assert!(RootSystem::build('E', 8).is_err());
        assert!(RootSystem::build('A', 9).is_err());
    }
}
