//! Function Hopf algebras of finite groups, the windowed Laurent algebra for
//! U(1), and unitary corepresentations.
//!
//! Two coefficient algebras cover every construction in this crate:
//!
//! * `Fun(G)` for a finite group `G`, with the delta-function basis. The
//!   product is pointwise, the coproduct dualizes group multiplication, the
//!   antipode dualizes inversion.
//! * The Laurent algebra spanned by monomials `z^n` on a symmetric window
//!   `[-r, r]`. Monomials are group-like; any product that would leave the
//!   window is a hard [`Error::TruncationOverflow`], never a silent wrap.
//!
//! Every constructor runs the full Hopf axiom suite exhaustively before
//! returning, so a value of [`HopfAlgebra`] is always a verified Hopf
//! ∗-algebra on its window.

use std::fmt;

use crate::group::FiniteGroup;
use crate::linalg::{Matrix, PairVec, Span, SparseVec, TripleVec, VectorSpace};
use crate::report::Check;
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Clone)]
enum Structure {
    /// Fun(G) with basis δ_g in group-element order.
    Function(FiniteGroup),
    /// Laurent monomials z^n, n ∈ [-radius, radius].
    Laurent { radius: i64 },
}

/// A function Hopf ∗-algebra with verified structure maps.
#[derive(Clone)]
pub struct HopfAlgebra {
    structure: Structure,
    space: VectorSpace,
}

impl HopfAlgebra {
    /// The Hopf algebra of functions on a finite group.
    pub fn function_algebra(group: FiniteGroup) -> Result<Self> {
        let labels = group.labels().iter().map(|l| format!("δ_{l}")).collect();
        let space = VectorSpace::new(format!("Fun({})", group.name()), labels);
        let h = HopfAlgebra {
            structure: Structure::Function(group),
            space,
        };
        h.expect_axioms()?;
        Ok(h)
    }

    /// The Laurent algebra on the symmetric window `[lo, hi]`.
    ///
    /// The window must contain 0 and be symmetric about it so that the
    /// antipode and star stay total.
    pub fn laurent(lo: i64, hi: i64) -> Result<Self> {
        if lo > 0 || hi < 0 || lo != -hi {
            return Err(Error::Parse(format!(
                "Laurent window [{lo}, {hi}] must be symmetric about 0"
            )));
        }
        let radius = hi;
        let labels = (-radius..=radius).map(monomial_label).collect();
        let space = VectorSpace::new(format!("Laurent[{lo},{hi}]"), labels);
        let h = HopfAlgebra {
            structure: Structure::Laurent { radius },
            space,
        };
        h.expect_axioms()?;
        Ok(h)
    }

    fn expect_axioms(&self) -> Result<()> {
        for c in self.verify_axioms() {
            if !c.passed {
                return Err(Error::Internal(format!(
                    "Hopf axiom {} failed on {}: {}",
                    c.law,
                    self.space.name(),
                    c.witness.unwrap_or_default()
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &VectorSpace {
        &self.space
    }

    pub fn name(&self) -> &str {
        self.space.name()
    }

    pub fn group(&self) -> Option<&FiniteGroup> {
        match &self.structure {
            Structure::Function(g) => Some(g),
            Structure::Laurent { .. } => None,
        }
    }

    pub fn is_laurent(&self) -> bool {
        matches!(self.structure, Structure::Laurent { .. })
    }

    pub fn laurent_radius(&self) -> Option<i64> {
        match &self.structure {
            Structure::Laurent { radius } => Some(*radius),
            _ => None,
        }
    }

    /// Laurent exponent of basis vector `i`.
    pub fn exponent(&self, i: usize) -> i64 {
        match &self.structure {
            Structure::Laurent { radius } => i as i64 - radius,
            Structure::Function(_) => panic!("exponent() on a function algebra"),
        }
    }

    /// Basis index of `z^n`.
    pub fn monomial(&self, n: i64) -> Result<usize> {
        match &self.structure {
            Structure::Laurent { radius } => {
                if n < -radius || n > *radius {
                    Err(Error::TruncationOverflow {
                        degree: n,
                        lo: -radius,
                        hi: *radius,
                    })
                } else {
                    Ok((n + radius) as usize)
                }
            }
            Structure::Function(_) => panic!("monomial() on a function algebra"),
        }
    }

    /// Basis index of the delta function at group element `g`.
    pub fn delta(&self, g: usize) -> usize {
        debug_assert!(matches!(self.structure, Structure::Function(_)));
        g
    }

    /// The multiplicative unit.
    pub fn one(&self) -> SparseVec {
        match &self.structure {
            // the constant function 1 = Σ_g δ_g
            Structure::Function(g) => {
                SparseVec::from_terms((0..g.order()).map(|i| (i, Scalar::one())))
            }
            Structure::Laurent { radius } => SparseVec::unit(*radius as usize),
        }
    }

    pub fn is_one(&self, v: &SparseVec) -> bool {
        let mut d = v.clone();
        d.sub(&self.one());
        d.is_zero()
    }

    // -- structure maps ------------------------------------------------------

    pub fn mul_basis(&self, i: usize, j: usize) -> Result<SparseVec> {
        match &self.structure {
            Structure::Function(_) => Ok(if i == j {
                SparseVec::unit(i)
            } else {
                SparseVec::zero()
            }),
            Structure::Laurent { radius } => {
                let n = self.exponent(i) + self.exponent(j);
                if n < -radius || n > *radius {
                    Err(Error::TruncationOverflow {
                        degree: n,
                        lo: -radius,
                        hi: *radius,
                    })
                } else {
                    Ok(SparseVec::unit((n + radius) as usize))
                }
            }
        }
    }

    pub fn mul(&self, a: &SparseVec, b: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::zero();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                out.add_scaled(&self.mul_basis(*i, *j)?, &(x * y));
            }
        }
        Ok(out)
    }

    pub fn mul_all(&self, factors: &[SparseVec]) -> Result<SparseVec> {
        let mut acc = self.one();
        for f in factors {
            acc = self.mul(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn counit_basis(&self, i: usize) -> Scalar {
        match &self.structure {
            Structure::Function(g) => {
                if i == g.identity() {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            }
            Structure::Laurent { .. } => Scalar::one(),
        }
    }

    pub fn counit(&self, v: &SparseVec) -> Scalar {
        let mut out = Scalar::zero();
        for (i, c) in v.iter() {
            out += &(c * &self.counit_basis(*i));
        }
        out
    }

    pub fn coprod_basis(&self, i: usize) -> PairVec {
        let mut out = PairVec::zero();
        match &self.structure {
            Structure::Function(g) => {
                for a in 0..g.order() {
                    for b in 0..g.order() {
                        if g.mul(a, b) == i {
                            out.add_term(a, b, Scalar::one());
                        }
                    }
                }
            }
            Structure::Laurent { .. } => {
                out.add_term(i, i, Scalar::one());
            }
        }
        out
    }

    pub fn coprod(&self, v: &SparseVec) -> PairVec {
        let mut out = PairVec::zero();
        for (i, c) in v.iter() {
            out.add_scaled(&self.coprod_basis(*i), c);
        }
        out
    }

    /// `(Δ ⊗ id)Δ(v)`, with coassociativity making the order immaterial.
    pub fn sweedler3(&self, v: &SparseVec) -> TripleVec {
        let mut out = TripleVec::zero();
        for ((a, c), x) in self.coprod(v).iter() {
            for ((a1, a2), y) in self.coprod_basis(*a).iter() {
                out.add_term(*a1, *a2, *c, x * y);
            }
        }
        out
    }

    pub fn antipode_basis(&self, i: usize) -> usize {
        match &self.structure {
            Structure::Function(g) => g.inv(i),
            Structure::Laurent { radius } => (2 * radius) as usize - i,
        }
    }

    pub fn antipode(&self, v: &SparseVec) -> SparseVec {
        v.map_indices(|i| Some(self.antipode_basis(i)))
    }

    /// Star index map: δ_g ↦ δ_g, z^n ↦ z^{-n}; coefficients conjugate.
    pub fn star_basis(&self, i: usize) -> usize {
        match &self.structure {
            Structure::Function(_) => i,
            Structure::Laurent { radius } => (2 * radius) as usize - i,
        }
    }

    pub fn star(&self, v: &SparseVec) -> SparseVec {
        v.conj().map_indices(|i| Some(self.star_basis(i)))
    }

    /// Right adjoint coaction `g ↦ g⁽²⁾ ⊗ S(g⁽¹⁾)·g⁽³⁾`.
    pub fn adjoint_coaction(&self, v: &SparseVec) -> Result<PairVec> {
        let mut out = PairVec::zero();
        for ((a, b, c), x) in self.sweedler3(v).iter() {
            let sa = self.antipode_basis(*a);
            let prod = self.mul_basis(sa, *c)?;
            for (j, y) in prod.iter() {
                out.add_term(*b, *j, x * y);
            }
        }
        Ok(out)
    }

    /// Basis of `Ker ε`, in a fixed canonical order.
    pub fn ker_eps_basis(&self) -> Vec<SparseVec> {
        match &self.structure {
            Structure::Function(g) => (0..g.order())
                .filter(|&i| i != g.identity())
                .map(SparseVec::unit)
                .collect(),
            Structure::Laurent { radius } => {
                let one = *radius as usize;
                (0..self.dim())
                    .filter(|&i| i != one)
                    .map(|i| {
                        SparseVec::from_terms([(i, Scalar::one()), (one, Scalar::from_int(-1))])
                    })
                    .collect()
            }
        }
    }

    /// Renders an element in the basis of this algebra.
    pub fn render(&self, v: &SparseVec) -> String {
        self.space.render(v)
    }

    // -- axiom suite ---------------------------------------------------------

    /// Runs the full Hopf ∗-algebra axiom suite exhaustively on the basis (and
    /// on pairs/triples where the law needs them). Laurent triples whose
    /// intermediate products leave the window are skipped; every representable
    /// combination is checked.
    pub fn verify_axioms(&self) -> Vec<Check> {
        let n = self.dim();
        let idx: Vec<usize> = (0..n).collect();
        let mut checks = Vec::new();

        // unit law
        let w = crate::exec::first_failure(&idx, |&i| {
            let e = SparseVec::unit(i);
            let left = self.mul(&self.one(), &e).ok()?;
            let right = self.mul(&e, &self.one()).ok()?;
            (left != e || right != e).then(|| self.render(&e))
        });
        checks.push(Check::from_witness("unit-law", "1·a = a = a·1", w));

        // associativity on basis triples (window-representable ones)
        let mut triples: Vec<(usize, usize, usize)> = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    triples.push((a, b, c));
                }
            }
        }
        let w = crate::exec::first_failure(&triples, |&(a, b, c)| {
            let ab = self.mul_basis(a, b).ok()?;
            let bc = self.mul_basis(b, c).ok()?;
            let left = self.mul(&ab, &SparseVec::unit(c)).ok()?;
            let right = self.mul(&SparseVec::unit(a), &bc).ok()?;
            (left != right).then(|| {
                format!(
                    "({}, {}, {})",
                    self.space.label(a),
                    self.space.label(b),
                    self.space.label(c)
                )
            })
        });
        checks.push(Check::from_witness(
            "product-associativity",
            "(ab)c = a(bc)",
            w,
        ));

        // coassociativity
        let w = crate::exec::first_failure(&idx, |&i| {
            let v = SparseVec::unit(i);
            let mut left = TripleVec::zero(); // (Δ⊗id)Δ
            let mut right = TripleVec::zero(); // (id⊗Δ)Δ
            for ((a, b), x) in self.coprod(&v).iter() {
                for ((a1, a2), y) in self.coprod_basis(*a).iter() {
                    left.add_term(*a1, *a2, *b, x * y);
                }
                for ((b1, b2), y) in self.coprod_basis(*b).iter() {
                    right.add_term(*a, *b1, *b2, x * y);
                }
            }
            (left != right).then(|| self.space.label(i).to_string())
        });
        checks.push(Check::from_witness(
            "coassociativity",
            "(Δ⊗id)Δ = (id⊗Δ)Δ",
            w,
        ));

        // counit law
        let w = crate::exec::first_failure(&idx, |&i| {
            let v = SparseVec::unit(i);
            let cp = self.coprod(&v);
            let mut left = SparseVec::zero(); // (id⊗ε)Δ
            let mut right = SparseVec::zero(); // (ε⊗id)Δ
            for ((a, b), x) in cp.iter() {
                left.add_term(*a, x * &self.counit_basis(*b));
                right.add_term(*b, x * &self.counit_basis(*a));
            }
            (left != v || right != v).then(|| self.space.label(i).to_string())
        });
        checks.push(Check::from_witness(
            "counit-law",
            "(id⊗ε)Δ = id = (ε⊗id)Δ",
            w,
        ));

        // antipode law
        let w = crate::exec::first_failure(&idx, |&i| {
            let v = SparseVec::unit(i);
            let target = self.one().scaled(&self.counit_basis(i));
            let cp = self.coprod(&v);
            let left = cp.contract(|a, b| {
                self.mul(
                    &SparseVec::unit(self.antipode_basis(a)),
                    &SparseVec::unit(b),
                )
            });
            let right = cp.contract(|a, b| {
                self.mul(
                    &SparseVec::unit(a),
                    &SparseVec::unit(self.antipode_basis(b)),
                )
            });
            match (left, right) {
                (Ok(l), Ok(r)) => {
                    (l != target || r != target).then(|| self.space.label(i).to_string())
                }
                _ => Some(format!("{} (product overflow)", self.space.label(i))),
            }
        });
        checks.push(Check::from_witness(
            "antipode-law",
            "m(S⊗id)Δ = 1ε = m(id⊗S)Δ",
            w,
        ));

        // S² = id (commutative function algebras)
        let w = crate::exec::first_failure(&idx, |&i| {
            (self.antipode_basis(self.antipode_basis(i)) != i)
                .then(|| self.space.label(i).to_string())
        });
        checks.push(Check::from_witness("antipode-involutive", "S∘S = id", w));

        // ε∘S = ε
        let w = crate::exec::first_failure(&idx, |&i| {
            (self.counit_basis(self.antipode_basis(i)) != self.counit_basis(i))
                .then(|| self.space.label(i).to_string())
        });
        checks.push(Check::from_witness("counit-antipode", "ε∘S = ε", w));

        // star involution
        let w = crate::exec::first_failure(&idx, |&i| {
            let v = SparseVec::single(i, Scalar::gaussian(1, 2, 1, 3));
            (self.star(&self.star(&v)) != v).then(|| self.space.label(i).to_string())
        });
        checks.push(Check::from_witness("star-involution", "∗∘∗ = id", w));

        // star antihomomorphism on pairs
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                pairs.push((a, b));
            }
        }
        let w = crate::exec::first_failure(&pairs, |&(a, b)| {
            let ab = self.mul_basis(a, b).ok()?;
            let left = self.star(&ab);
            let right = self
                .mul(
                    &self.star(&SparseVec::unit(b)),
                    &self.star(&SparseVec::unit(a)),
                )
                .ok()?;
            (left != right).then(|| format!("({}, {})", self.space.label(a), self.space.label(b)))
        });
        checks.push(Check::from_witness("star-antihom", "(ab)∗ = b∗a∗", w));

        // Δ∘∗ = (∗⊗∗)∘Δ
        let w = crate::exec::first_failure(&idx, |&i| {
            let v = SparseVec::single(i, Scalar::gaussian(2, 1, -1, 2));
            let left = self.coprod(&self.star(&v));
            let mut right = PairVec::zero();
            for ((a, b), x) in self.coprod(&v).iter() {
                right.add_term(self.star_basis(*a), self.star_basis(*b), x.conj());
            }
            (left != right).then(|| self.space.label(i).to_string())
        });
        checks.push(Check::from_witness("star-coproduct", "Δ∘∗ = (∗⊗∗)∘Δ", w));

        // ε(a∗) = conj ε(a)
        let w = crate::exec::first_failure(&idx, |&i| {
            let v = SparseVec::single(i, Scalar::gaussian(1, 3, 2, 5));
            (self.counit(&self.star(&v)) != self.counit(&v).conj())
                .then(|| self.space.label(i).to_string())
        });
        checks.push(Check::from_witness("star-counit", "ε∘∗ = conj∘ε", w));

        // (S∘∗)² = id
        let w = crate::exec::first_failure(&idx, |&i| {
            let v = SparseVec::single(i, Scalar::gaussian(3, 4, 5, 7));
            let once = self.antipode(&self.star(&v));
            let twice = self.antipode(&self.star(&once));
            (twice != v).then(|| self.space.label(i).to_string())
        });
        checks.push(Check::from_witness("antipode-star", "(S∘∗)² = id", w));

        checks
    }
}

impl fmt::Debug for HopfAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HopfAlgebra({}, dim {})", self.space.name(), self.dim())
    }
}

fn monomial_label(n: i64) -> String {
    match n {
        0 => "1".to_string(),
        1 => "z".to_string(),
        -1 => "z^-1".to_string(),
        n => format!("z^{n}"),
    }
}

// ---------------------------------------------------------------------------
// Corepresentations
// ---------------------------------------------------------------------------

/// A finite-dimensional unitary corepresentation given by its matrix
/// coefficients `g_ij ∈ H`.
///
/// `gram` is the invariant inner product on the underlying space. It is the
/// identity whenever the model is unitary for the standard inner product;
/// over the Gaussian rationals some irreducible corepresentations only admit
/// an invariant form with a non-trivial Gram matrix, and the unitarity
/// relations then hold in Gram-twisted form.
#[derive(Clone)]
pub struct Corepresentation {
    pub name: String,
    pub dim: usize,
    coeffs: Vec<SparseVec>,
    pub gram: Matrix,
}

impl Corepresentation {
    pub fn coeff(&self, i: usize, j: usize) -> &SparseVec {
        &self.coeffs[i * self.dim + j]
    }

    pub fn coeffs(&self) -> &[SparseVec] {
        &self.coeffs
    }

    pub fn is_standard_unitary(&self) -> bool {
        self.gram == Matrix::identity(self.dim)
    }

    /// Assembles a corepresentation from parts without validation; run
    /// [`check_corepresentation`] on anything that did not come from the
    /// catalogue.
    pub fn from_parts(
        name: impl Into<String>,
        dim: usize,
        coeffs: Vec<SparseVec>,
        gram: Matrix,
    ) -> Self {
        assert_eq!(coeffs.len(), dim * dim, "coefficient matrix shape");
        Corepresentation {
            name: name.into(),
            dim,
            coeffs,
            gram,
        }
    }

    /// The trivial corepresentation `v ↦ v ⊗ 1`.
    pub fn trivial(h: &HopfAlgebra) -> Self {
        Corepresentation {
            name: "triv".into(),
            dim: 1,
            coeffs: vec![h.one()],
            gram: Matrix::identity(1),
        }
    }

    /// Builds the corepresentation dual to a matrix representation of the
    /// group: `g_ij = Σ_w ρ(w)_ij δ_w`. Verifies that `ρ` is a homomorphism
    /// and that `gram` is `ρ`-invariant.
    pub fn from_rep_matrices(
        h: &HopfAlgebra,
        name: impl Into<String>,
        mats: &[Matrix],
        gram: Matrix,
    ) -> Result<Self> {
        let name = name.into();
        let group = h
            .group()
            .ok_or_else(|| Error::UnsupportedGroup("corepresentation needs Fun(G)".into()))?;
        if mats.len() != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "{name}: one matrix per group element required"
            )));
        }
        let dim = mats[0].rows;
        for m in mats {
            if m.rows != dim || m.cols != dim {
                return Err(Error::DimensionMismatch(format!("{name}: ragged matrices")));
            }
        }
        // homomorphism property and identity
        for (a, ma) in mats.iter().enumerate() {
            for (b, mb) in mats.iter().enumerate() {
                let ab = group.mul(a, b);
                for i in 0..dim {
                    for j in 0..dim {
                        let mut acc = Scalar::zero();
                        for k in 0..dim {
                            acc += &(ma.at(i, k) * mb.at(k, j));
                        }
                        if acc != *mats[ab].at(i, j) {
                            return Err(Error::Internal(format!(
                                "{name}: matrices are not a homomorphism at ({}, {})",
                                group.label(a),
                                group.label(b)
                            )));
                        }
                    }
                }
            }
        }
        if mats[group.identity()] != Matrix::identity(dim) {
            return Err(Error::Internal(format!("{name}: identity matrix missing")));
        }
        // gram invariance: ρ(w)† Q ρ(w) = Q
        for (w, m) in mats.iter().enumerate() {
            for i in 0..dim {
                for j in 0..dim {
                    let mut acc = Scalar::zero();
                    for k in 0..dim {
                        for l in 0..dim {
                            let t = &m.at(k, i).conj() * gram.at(k, l);
                            acc += &(&t * m.at(l, j));
                        }
                    }
                    if acc != *gram.at(i, j) {
                        return Err(Error::Internal(format!(
                            "{name}: gram not invariant under {}",
                            group.label(w)
                        )));
                    }
                }
            }
        }
        let mut coeffs = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                coeffs.push(SparseVec::from_terms(
                    mats.iter()
                        .enumerate()
                        .filter(|(_, m)| !m.at(i, j).is_zero())
                        .map(|(w, m)| (w, m.at(i, j).clone())),
                ));
            }
        }
        Ok(Corepresentation {
            name,
            dim,
            coeffs,
            gram,
        })
    }
}

impl fmt::Debug for Corepresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Corepresentation({}, dim {})", self.name, self.dim)
    }
}

/// Verifies the corepresentation laws for an explicit coefficient matrix:
/// counit law, compatibility with the coproduct, and both unitarity
/// relations (Gram-twisted when `gram` is not the identity).
pub fn check_corepresentation(h: &HopfAlgebra, corep: &Corepresentation) -> Vec<Check> {
    let dim = corep.dim;
    let mut checks = Vec::new();
    let cells: Vec<(usize, usize)> = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .collect();

    // ε(g_ij) = δ_ij
    let w = crate::exec::first_failure(&cells, |&(i, j)| {
        let expected = if i == j {
            Scalar::one()
        } else {
            Scalar::zero()
        };
        (h.counit(corep.coeff(i, j)) != expected).then(|| format!("g[{i}][{j}]"))
    });
    checks.push(Check::from_witness("counit-law", "ε(g_ij) = δ_ij", w));

    // Δ(g_ij) = Σ_k g_ik ⊗ g_kj
    let w = crate::exec::first_failure(&cells, |&(i, j)| {
        let left = h.coprod(corep.coeff(i, j));
        let mut right = PairVec::zero();
        for k in 0..dim {
            right.add_scaled(
                &PairVec::outer(corep.coeff(i, k), corep.coeff(k, j), &Scalar::one()),
                &Scalar::one(),
            );
        }
        (left != right).then(|| format!("g[{i}][{j}]"))
    });
    checks.push(Check::from_witness(
        "coassociativity-compat",
        "Δ(g_ij) = Σ_k g_ik⊗g_kj",
        w,
    ));

    // Σ_kl g*_ki Q_kl g_lj = Q_ij·1
    let gram_inv = invert(&corep.gram);
    let w = crate::exec::first_failure(&cells, |&(i, j)| {
        let mut acc = SparseVec::zero();
        for k in 0..dim {
            for l in 0..dim {
                let q = corep.gram.at(k, l);
                if q.is_zero() {
                    continue;
                }
                match h.mul(&h.star(corep.coeff(k, i)), corep.coeff(l, j)) {
                    Ok(p) => acc.add_scaled(&p, q),
                    Err(e) => return Some(format!("g[{i}][{j}]: {e}")),
                }
            }
        }
        let mut expected = SparseVec::zero();
        expected.add_scaled(&h.one(), corep.gram.at(i, j));
        (acc != expected).then(|| format!("g[{i}][{j}]"))
    });
    checks.push(Check::from_witness(
        "unitarity-left",
        "Σ_kl g∗_ki Q_kl g_lj = Q_ij·1",
        w,
    ));

    // Σ_kl g_ik (Q⁻¹)_kl g*_jl = (Q⁻¹)_ij·1
    let w = match &gram_inv {
        None => Some("gram matrix is singular".to_string()),
        Some(qi) => crate::exec::first_failure(&cells, |&(i, j)| {
            let mut acc = SparseVec::zero();
            for k in 0..dim {
                for l in 0..dim {
                    let q = qi.at(k, l);
                    if q.is_zero() {
                        continue;
                    }
                    match h.mul(corep.coeff(i, k), &h.star(corep.coeff(j, l))) {
                        Ok(p) => acc.add_scaled(&p, q),
                        Err(e) => return Some(format!("g[{i}][{j}]: {e}")),
                    }
                }
            }
            let mut expected = SparseVec::zero();
            expected.add_scaled(&h.one(), qi.at(i, j));
            (acc != expected).then(|| format!("g[{i}][{j}]"))
        }),
    };
    checks.push(Check::from_witness(
        "unitarity-right",
        "Σ_kl g_ik (Q⁻¹)_kl g∗_jl = (Q⁻¹)_ij·1",
        w,
    ));

    checks
}

fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.rows;
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![Scalar::zero(); n];
        e[j] = Scalar::one();
        cols.push(m.solve(&e)?);
    }
    Some(Matrix::from_fn(n, n, |r, c| cols[c][r].clone()))
}

/// The built-in list of pairwise non-equivalent irreducible unitary
/// corepresentations whose matrix coefficients span `Fun(G)`.
///
/// Only groups whose irreducible representations are realizable over the
/// Gaussian rationals are in the catalogue: `Z1`, `Z2`, `Z4`, `S3`, `D4`.
/// `Z3`, `Z5` and `Z6` need cube or fifth roots of unity, which do not lie
/// in `Q(i)`, so they are rejected rather than approximated.
pub fn decompose_regular(h: &HopfAlgebra) -> Result<Vec<Corepresentation>> {
    let group = h
        .group()
        .ok_or_else(|| Error::UnsupportedGroup("decompose_regular needs Fun(G)".into()))?;
    let n = group.order();
    let id = Matrix::identity(1);
    let coreps: Vec<Corepresentation> = match group.name() {
        "Z1" => vec![Corepresentation::trivial(h)],
        "Z2" => {
            let chars: Vec<Vec<i64>> = vec![vec![1, 1], vec![1, -1]];
            char_family(h, &chars)?
        }
        "Z4" => {
            // characters g^j ↦ i^{jk}
            let powers_of_i = [
                Scalar::one(),
                Scalar::i(),
                Scalar::from_int(-1),
                -Scalar::i(),
            ];
            let mut out = Vec::new();
            for k in 0..4usize {
                let mats: Vec<Matrix> = (0..4)
                    .map(|j| Matrix::from_fn(1, 1, |_, _| powers_of_i[(j * k) % 4].clone()))
                    .collect();
                out.push(Corepresentation::from_rep_matrices(
                    h,
                    format!("chi{k}"),
                    &mats,
                    id.clone(),
                )?);
            }
            out
        }
        "S3" => {
            // order: e, (123), (132), (12), (23), (13)
            let parity = [1i64, 1, 1, -1, -1, -1];
            let sign_mats: Vec<Matrix> = parity
                .iter()
                .map(|&p| Matrix::from_fn(1, 1, |_, _| Scalar::from_int(p)))
                .collect();
            // plane model on f1 = e0-e1, f2 = e1-e2; invariant gram [[2,-1],[-1,2]]
            let std_mats: Vec<Matrix> = [
                [[1, 0], [0, 1]],   // e
                [[0, -1], [1, -1]], // (123)
                [[-1, 1], [-1, 0]], // (132)
                [[-1, 1], [0, 1]],  // (12)
                [[1, 0], [1, -1]],  // (23)
                [[0, -1], [-1, 0]], // (13)
            ]
            .iter()
            .map(|rows| Matrix::from_fn(2, 2, |r, c| Scalar::from_int(rows[r][c])))
            .collect();
            let gram = Matrix::from_fn(2, 2, |r, c| Scalar::from_int([[2, -1], [-1, 2]][r][c]));
            vec![
                Corepresentation::trivial(h),
                Corepresentation::from_rep_matrices(h, "sign", &sign_mats, id.clone())?,
                Corepresentation::from_rep_matrices(h, "std2", &std_mats, gram)?,
            ]
        }
        "D4" => {
            // order: e, r, r2, r3, s, rs, r2s, r3s  (element = r^a s^x)
            let mut out = Vec::new();
            for (name, rv, sv) in [
                ("triv", 1i64, 1i64),
                ("chi-r", 1, -1),
                ("chi-s", -1, 1),
                ("chi-rs", -1, -1),
            ] {
                let mats: Vec<Matrix> = (0..8)
                    .map(|idx| {
                        let (a, x) = (idx % 4, idx / 4);
                        let v = rv.pow(a as u32) * sv.pow(x as u32);
                        Matrix::from_fn(1, 1, |_, _| Scalar::from_int(v))
                    })
                    .collect();
                out.push(Corepresentation::from_rep_matrices(
                    h,
                    name,
                    &mats,
                    id.clone(),
                )?);
            }
            // 2-dimensional: r = quarter turn, s = axis flip; orthogonal, gram = I
            let rot = |a: usize| -> [[i64; 2]; 2] {
                [
                    [[1, 0], [0, 1]],
                    [[0, -1], [1, 0]],
                    [[-1, 0], [0, -1]],
                    [[0, 1], [-1, 0]],
                ][a]
            };
            let refl = [[1i64, 0], [0, -1]];
            let mats: Vec<Matrix> = (0..8)
                .map(|idx| {
                    let (a, x) = (idx % 4, idx / 4);
                    let r = rot(a);
                    let m = if x == 0 {
                        r
                    } else {
                        // r^a · s
                        [
                            [
                                r[0][0] * refl[0][0] + r[0][1] * refl[1][0],
                                r[0][0] * refl[0][1] + r[0][1] * refl[1][1],
                            ],
                            [
                                r[1][0] * refl[0][0] + r[1][1] * refl[1][0],
                                r[1][0] * refl[0][1] + r[1][1] * refl[1][1],
                            ],
                        ]
                    };
                    Matrix::from_fn(2, 2, |r0, c0| Scalar::from_int(m[r0][c0]))
                })
                .collect();
            out.push(Corepresentation::from_rep_matrices(
                h,
                "rot2",
                &mats,
                Matrix::identity(2),
            )?);
            out
        }
        other => {
            return Err(Error::UnsupportedGroup(format!(
                "{other}: irreducible corepresentations are not realizable over Q(i)"
            )))
        }
    };
    // matrix-coefficient basis property: the coefficients span Fun(G) with
    // exactly dim H independent elements
    let mut span = Span::new();
    for c in &coreps {
        for v in c.coeffs() {
            span.insert(v);
        }
    }
    if span.rank() != n {
        return Err(Error::Internal(format!(
            "matrix coefficients of {} span rank {} != {}",
            group.name(),
            span.rank(),
            n
        )));
    }
    Ok(coreps)
}

fn char_family(h: &HopfAlgebra, chars: &[Vec<i64>]) -> Result<Vec<Corepresentation>> {
    let id = Matrix::identity(1);
    chars
        .iter()
        .enumerate()
        .map(|(k, vals)| {
            let mats: Vec<Matrix> = vals
                .iter()
                .map(|&v| Matrix::from_fn(1, 1, |_, _| Scalar::from_int(v)))
                .collect();
            let name = if k == 0 {
                "triv".to_string()
            } else {
                "sign".to_string()
            };
            Corepresentation::from_rep_matrices(h, name, &mats, id.clone())
        })
        .collect()
}
