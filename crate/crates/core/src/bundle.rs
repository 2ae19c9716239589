//! Quantum principal bundles and their differential calculi.
//!
//! A bundle is a triple `(P, B, Δ_P)`. Three total spaces are materialized:
//!
//! * `Fun(X)` for a finite free right `G`-set `X`;
//! * the Laurent algebra itself (the U(1) bundle over a point, whose
//!   one-forms are spanned by the invariant form `ζ = π(z)` of the classical
//!   calculus);
//! * localized polynomials on the line for the rank-one reflection bundle,
//!   with monomial exponents kept on a window.
//!
//! Forms are kept as `Hor ⊗ qg#∧`: a basis vector of `Ω^n(P)` is a horizontal
//! basis form of degree `i` together with a germ word of degree `n − i`. The
//! structure-group germ machinery is borrowed from the [`Envelope`] of the
//! bundle's calculus.

use std::collections::BTreeMap;
use std::fmt;

use crate::envelope::Envelope;
use crate::group::FiniteGroup;
use crate::hopf::{Corepresentation, HopfAlgebra};
use crate::linalg::{Matrix, PairVec, Span, SparseVec, VectorSpace};
use crate::report::Check;
use crate::scalar::Scalar;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Quantum principal bundles
// ---------------------------------------------------------------------------

#[derive(Clone)]
enum Total {
    /// P = Fun(X) for a finite right G-set, Δ_P(f)(x, g) = f(x·g)
    Finite {
        points: Vec<String>,
        /// action[x][g] = x·g
        action: Vec<Vec<usize>>,
        orbits: Vec<Vec<usize>>,
    },
    /// P = H itself (Laurent), Δ_P = Δ
    SelfBundle,
    /// P = span{x^k : lo ≤ k ≤ hi}, W = Z2 acting by x ↦ −x
    Line { lo: i64, hi: i64 },
}

/// A quantum principal bundle `(P, B, Δ_P)` with verified axioms.
#[derive(Clone)]
pub struct Qpb {
    h: HopfAlgebra,
    total: Total,
    p_space: VectorSpace,
    /// basis of the fixed-point subalgebra B
    base_basis: Vec<SparseVec>,
}

impl Qpb {
    /// Bundle from a finite right action; fails with [`Error::NotFree`] when
    /// some point has a nontrivial stabilizer (β is then not surjective).
    pub fn finite(
        points: Vec<String>,
        group: FiniteGroup,
        action: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = points.len();
        if action.len() != n || action.iter().any(|row| row.len() != group.order()) {
            return Err(Error::DimensionMismatch("action table shape".into()));
        }
        // right action laws
        for (x, row) in action.iter().enumerate() {
            if row[group.identity()] != x {
                return Err(Error::InvalidGroup(format!(
                    "action: {} · e ≠ {}",
                    points[x], points[x]
                )));
            }
            for a in 0..group.order() {
                for b in 0..group.order() {
                    if action[action[x][a]][b] != action[x][group.mul(a, b)] {
                        return Err(Error::InvalidGroup(format!(
                            "action is not a right action at ({}, {}, {})",
                            points[x],
                            group.label(a),
                            group.label(b)
                        )));
                    }
                }
            }
        }
        // freeness
        for x in 0..n {
            for g in 0..group.order() {
                if g != group.identity() && action[x][g] == x {
                    return Err(Error::NotFree(points[x].clone()));
                }
            }
        }
        // orbits
        let mut seen = vec![false; n];
        let mut orbits = Vec::new();
        for x in 0..n {
            if seen[x] {
                continue;
            }
            let mut orbit = Vec::new();
            for g in 0..group.order() {
                let y = action[x][g];
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            orbit.sort();
            orbits.push(orbit);
        }
        let h = HopfAlgebra::function_algebra(group)?;
        let p_space = VectorSpace::new("Fun(X)", points.iter().map(|p| format!("δ_{p}")).collect());
        let base_basis = orbits
            .iter()
            .map(|o| SparseVec::from_terms(o.iter().map(|&x| (x, Scalar::one()))))
            .collect();
        let q = Qpb {
            h,
            total: Total::Finite {
                points,
                action,
                orbits,
            },
            p_space,
            base_basis,
        };
        q.verify_axioms()?;
        Ok(q)
    }

    /// The U(1) bundle over a point: `P = H`, `Δ_P = Δ`, `B = C·1`.
    pub fn u1(radius: i64) -> Result<Self> {
        let h = HopfAlgebra::laurent(-radius, radius)?;
        let p_space = h.space().clone();
        let one = SparseVec::unit(h.monomial(0)?);
        let q = Qpb {
            h,
            total: Total::SelfBundle,
            p_space,
            base_basis: vec![one],
        };
        q.verify_axioms()?;
        Ok(q)
    }

    /// The rank-one reflection bundle: localized polynomials on the line with
    /// `W = Z2` acting by `x ↦ −x`; `B` = even monomials.
    pub fn line(lo: i64, hi: i64) -> Result<Self> {
        if lo > 0 || hi < 1 {
            return Err(Error::Parse(format!(
                "line window [{lo}, {hi}] must contain 0 and 1"
            )));
        }
        let h = HopfAlgebra::function_algebra(FiniteGroup::cyclic(2))?;
        let labels = (lo..=hi)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "x".to_string(),
                k => format!("x^{k}"),
            })
            .collect();
        let p_space = VectorSpace::new(format!("Poly[{lo},{hi}]"), labels);
        let base_basis = (lo..=hi)
            .filter(|k| k.rem_euclid(2) == 0)
            .map(|k| SparseVec::unit((k - lo) as usize))
            .collect();
        let q = Qpb {
            h,
            total: Total::Line { lo, hi },
            p_space,
            base_basis,
        };
        q.verify_axioms()?;
        Ok(q)
    }

    pub fn hopf(&self) -> &HopfAlgebra {
        &self.h
    }

    pub fn p_space(&self) -> &VectorSpace {
        &self.p_space
    }

    pub fn p_dim(&self) -> usize {
        self.p_space.dim()
    }

    pub fn base_basis(&self) -> &[SparseVec] {
        &self.base_basis
    }

    pub fn orbit_count(&self) -> usize {
        match &self.total {
            Total::Finite { orbits, .. } => orbits.len(),
            _ => 1,
        }
    }

    /// Monomial index helpers for the line bundle.
    pub fn line_monomial(&self, k: i64) -> Result<usize> {
        match &self.total {
            Total::Line { lo, hi } => {
                if k < *lo || k > *hi {
                    Err(Error::TruncationOverflow {
                        degree: k,
                        lo: *lo,
                        hi: *hi,
                    })
                } else {
                    Ok((k - lo) as usize)
                }
            }
            _ => Err(Error::Internal("line_monomial on a non-line bundle".into())),
        }
    }

    pub fn one_p(&self) -> SparseVec {
        match &self.total {
            Total::Finite { points, .. } => {
                SparseVec::from_terms((0..points.len()).map(|i| (i, Scalar::one())))
            }
            Total::SelfBundle => self.h.one(),
            Total::Line { lo, .. } => SparseVec::unit((-lo) as usize),
        }
    }

    pub fn mul_p_basis(&self, a: usize, b: usize) -> Result<SparseVec> {
        match &self.total {
            Total::Finite { .. } => Ok(if a == b {
                SparseVec::unit(a)
            } else {
                SparseVec::zero()
            }),
            Total::SelfBundle => self.h.mul_basis(a, b),
            Total::Line { lo, hi } => {
                let k = (a as i64 + lo) + (b as i64 + lo);
                if k < *lo || k > *hi {
                    Err(Error::TruncationOverflow {
                        degree: k,
                        lo: *lo,
                        hi: *hi,
                    })
                } else {
                    Ok(SparseVec::unit((k - lo) as usize))
                }
            }
        }
    }

    pub fn mul_p(&self, x: &SparseVec, y: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::zero();
        for (a, c) in x.iter() {
            for (b, e) in y.iter() {
                out.add_scaled(&self.mul_p_basis(*a, *b)?, &(c * e));
            }
        }
        Ok(out)
    }

    pub fn star_p(&self, x: &SparseVec) -> SparseVec {
        match &self.total {
            Total::Finite { .. } => x.conj(),
            Total::SelfBundle => self.h.star(x),
            // real coordinate: conjugation acts on coefficients only
            Total::Line { .. } => x.conj(),
        }
    }

    /// The coaction `Δ_P` on a P basis vector, as a `(P, H)` pair element.
    pub fn coaction_basis(&self, x: usize) -> PairVec {
        match &self.total {
            Total::Finite { action, .. } => {
                // Δ_P(δ_x) = Σ_{y·g = x} δ_y ⊗ δ_g
                let mut out = PairVec::zero();
                for (y, row) in action.iter().enumerate() {
                    for (g, &img) in row.iter().enumerate() {
                        if img == x {
                            out.add_term(y, g, Scalar::one());
                        }
                    }
                }
                out
            }
            Total::SelfBundle => self.h.coprod_basis(x),
            Total::Line { lo, .. } => {
                // Δ_P(x^k) = x^k⊗δ_e + (−1)^k x^k⊗δ_s
                let k = x as i64 + lo;
                let mut out = PairVec::zero();
                out.add_term(x, 0, Scalar::one());
                out.add_term(
                    x,
                    1,
                    if k.rem_euclid(2) == 0 {
                        Scalar::one()
                    } else {
                        Scalar::from_int(-1)
                    },
                );
                out
            }
        }
    }

    pub fn coaction(&self, v: &SparseVec) -> PairVec {
        let mut out = PairVec::zero();
        for (i, c) in v.iter() {
            out.add_scaled(&self.coaction_basis(*i), c);
        }
        out
    }

    fn verify_axioms(&self) -> Result<()> {
        let n = self.p_dim();
        // Δ_P is a corepresentation: counit and coassociativity laws
        for x in 0..n {
            let cp = self.coaction_basis(x);
            let mut counit = SparseVec::zero();
            for ((p, g), c) in cp.iter() {
                counit.add_term(*p, c * &self.h.counit_basis(*g));
            }
            if counit != SparseVec::unit(x) {
                return Err(Error::Internal(format!(
                    "coaction counit law fails at {}",
                    self.p_space.label(x)
                )));
            }
            let mut lhs = crate::linalg::TripleVec::zero();
            let mut rhs = crate::linalg::TripleVec::zero();
            for ((p, g), c) in cp.iter() {
                for ((g1, g2), y) in self.h.coprod_basis(*g).iter() {
                    lhs.add_term(*p, *g1, *g2, c * y);
                }
                for ((p1, g1), y) in self.coaction_basis(*p).iter() {
                    rhs.add_term(*p1, *g1, *g, c * y);
                }
            }
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "coaction coassociativity fails at {}",
                    self.p_space.label(x)
                )));
            }
        }
        // ∗-morphism: Δ_P(x∗) = (∗⊗∗)Δ_P(x)
        for x in 0..n {
            let v = SparseVec::single(x, Scalar::gaussian(1, 2, 1, 3));
            let lhs = self.coaction(&self.star_p(&v));
            let mut rhs = PairVec::zero();
            for ((p, g), c) in self.coaction(&v).iter() {
                let sp = self.star_p(&SparseVec::unit(*p));
                let sg = self.h.star(&SparseVec::unit(*g));
                for (pp, a) in sp.iter() {
                    for (gg, b) in sg.iter() {
                        let t = &c.conj() * a;
                        rhs.add_term(*pp, *gg, &t * b);
                    }
                }
            }
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "coaction star compatibility fails at {}",
                    self.p_space.label(x)
                )));
            }
        }
        // freeness once more through the rank of β on finite bundles (the
        // stabilizer scan above supplies the witness; this ties the axiom to
        // surjectivity). Windowed total spaces certify bijectivity through
        // the translation-map inverse identities instead.
        if matches!(self.total, Total::Finite { .. }) && !self.beta_surjective()? {
            return Err(Error::NotFree("β is not surjective".into()));
        }
        // B is exactly the fixed-point subalgebra
        let fixed = self.fixed_point_basis();
        let declared = Span::from_vectors(self.base_basis.iter());
        if fixed.len() != declared.rank() || fixed.iter().any(|v| !declared.contains(v)) {
            return Err(Error::Internal(
                "declared base differs from fixed points".into(),
            ));
        }
        Ok(())
    }

    /// Basis of `{v : Δ_P(v) = v⊗1}` computed as a kernel.
    pub fn fixed_point_basis(&self) -> Vec<SparseVec> {
        let n = self.p_dim();
        let hd = self.h.dim();
        // rows: (p, g) pairs; columns: P basis
        let mut m = Matrix::zeros(n * hd, n);
        let one_h = self.h.one();
        for x in 0..n {
            let mut defect = self.coaction_basis(x);
            let mut minus = PairVec::zero();
            for (g, c) in one_h.iter() {
                minus.add_term(x, *g, -c.clone());
            }
            defect.add_scaled(&minus, &Scalar::one());
            for ((p, g), c) in defect.iter() {
                *m.at_mut(p * hd + g, x) = c.clone();
            }
        }
        m.kernel_basis()
    }

    /// Surjectivity of `β(x⊗y) = (x⊗1)Δ_P(y)`, the freeness axiom.
    pub fn beta_surjective(&self) -> Result<bool> {
        let n = self.p_dim();
        let mut image = Span::new();
        for x in 0..n {
            for y in 0..n {
                let mut v = SparseVec::zero();
                let mut representable = true;
                for ((p, g), c) in self.coaction_basis(y).iter() {
                    match self.mul_p_basis(x, *p) {
                        Ok(prod) => {
                            for (pp, e) in prod.iter() {
                                v.add_term(pp * self.h.dim() + g, c * e);
                            }
                        }
                        Err(Error::TruncationOverflow { .. }) => {
                            representable = false;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                if representable {
                    image.insert(&v);
                }
            }
        }
        Ok(image.rank() == n * self.h.dim())
    }

    pub fn render_p(&self, v: &SparseVec) -> String {
        self.p_space.render(v)
    }
}

impl fmt::Debug for Qpb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Qpb(P dim {}, H = {}, B dim {})",
            self.p_dim(),
            self.h.name(),
            self.base_basis.len()
        )
    }
}

// ---------------------------------------------------------------------------
// The calculus on a bundle
// ---------------------------------------------------------------------------

/// Degrees of the horizontal part of the calculus.
#[derive(Clone)]
enum HorKind {
    /// functions only (finite bundles)
    Degree0,
    /// P ⊕ P·ζ with dζ = 0, ζ the invariant one-form of the U(1) calculus
    U1Form,
    /// P ⊕ P·dx with the de Rham differential (line bundle)
    LineForm,
}

/// `Ω•(P) = Hor ⊗ qg#∧` with the total differential, star, product and the
/// coaction into `Ω•(P) ⊗ Γ∧`.
pub struct BundleCalculus {
    qpb: Qpb,
    env: Envelope,
    hor: HorKind,
    max_degree: usize,
    /// flat basis per total degree: (hor_deg, hor_idx, wedge_idx)
    basis: Vec<Vec<(usize, usize, usize)>>,
    offsets: Vec<usize>,
    total: usize,
    lookup: BTreeMap<(usize, usize, usize, usize), usize>,
    /// base forms per degree, computed at construction
    base_forms: Vec<Vec<SparseVec>>,
}

impl BundleCalculus {
    pub fn new(qpb: Qpb, env: Envelope, hor: HorKind0, max_degree: usize) -> Result<Self> {
        let hor = match hor {
            HorKind0::Degree0 => HorKind::Degree0,
            HorKind0::U1Form => HorKind::U1Form,
            HorKind0::LineForm => HorKind::LineForm,
        };
        let mut basis = Vec::new();
        let mut offsets = Vec::new();
        let mut lookup = BTreeMap::new();
        let mut total = 0;
        let wedge_dims = env.wedge_dims();
        for n in 0..=max_degree {
            offsets.push(total);
            let mut layer = Vec::new();
            for hor_deg in 0..=n.min(hor_max(&hor)) {
                let germ_deg = n - hor_deg;
                if germ_deg > env.max_degree() {
                    continue;
                }
                let hd = hor_dim_of(&hor, &qpb, hor_deg);
                for a in 0..hd {
                    for w in 0..wedge_dims[germ_deg] {
                        lookup.insert((hor_deg, a, germ_deg, w), total + layer.len());
                        layer.push((hor_deg, a, w));
                    }
                }
            }
            total += layer.len();
            basis.push(layer);
        }
        offsets.push(total);
        let mut bc = BundleCalculus {
            qpb,
            env,
            hor,
            max_degree,
            basis,
            offsets,
            total,
            lookup,
            base_forms: Vec::new(),
        };
        bc.base_forms = (0..=max_degree)
            .map(|n| bc.compute_base_forms(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(bc)
    }

    pub fn qpb(&self) -> &Qpb {
        &self.qpb
    }

    pub fn envelope(&self) -> &Envelope {
        &self.env
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn degree_dim(&self, n: usize) -> usize {
        self.basis[n].len()
    }

    pub fn degree_of(&self, flat: usize) -> usize {
        (0..=self.max_degree)
            .find(|&n| flat < self.offsets[n + 1])
            .expect("flat in range")
    }

    /// `(total degree, hor degree, hor index, wedge index)`.
    pub fn split(&self, flat: usize) -> (usize, usize, usize, usize) {
        let n = self.degree_of(flat);
        let (i, a, w) = self.basis[n][flat - self.offsets[n]];
        (n, i, a, w)
    }

    pub fn flat(&self, hor_deg: usize, hor_idx: usize, germ_deg: usize, wedge_idx: usize) -> usize {
        self.lookup[&(hor_deg, hor_idx, germ_deg, wedge_idx)]
    }

    pub fn one(&self) -> SparseVec {
        self.embed_p(&self.qpb.one_p())
    }

    /// P as the degree-0 part of Ω.
    pub fn embed_p(&self, v: &SparseVec) -> SparseVec {
        v.map_indices(|a| Some(self.flat(0, a, 0, 0)))
    }

    /// A structure-group germ as the one-form `1_P ⊗ θ`.
    pub fn embed_germ(&self, theta: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (t, c) in theta.iter() {
            for (a, x) in self.qpb.one_p().iter() {
                out.add_term(self.flat(0, *a, 1, self.wedge_pos(1, *t)), c * x);
            }
        }
        out
    }

    fn wedge_pos(&self, _deg: usize, germ: usize) -> usize {
        // germ basis index equals the degree-1 wedge position
        germ
    }

    // -- horizontal structure ------------------------------------------------

    fn hor_mul(
        &self,
        (i, a): (usize, usize),
        (j, b): (usize, usize),
    ) -> Result<Option<(usize, SparseVec)>> {
        // product of horizontal basis forms; None when the degree collapses
        let k = i + j;
        if k > hor_max(&self.hor) {
            return Ok(None);
        }
        match &self.hor {
            HorKind::Degree0 => Ok(Some((0, self.qpb.mul_p_basis(a, b)?))),
            HorKind::U1Form | HorKind::LineForm => {
                if i == 1 && j == 1 {
                    return Ok(None); // dζ∧ζ-type square of a single generator
                }
                Ok(Some((k, self.qpb.mul_p_basis(a, b)?)))
            }
        }
    }

    fn hor_d(&self, (i, a): (usize, usize)) -> Result<SparseVec> {
        // differential of the horizontal part alone, in hor degree i+1
        match &self.hor {
            HorKind::Degree0 => Ok(SparseVec::zero()),
            HorKind::U1Form => {
                if i == 1 {
                    return Ok(SparseVec::zero());
                }
                // d(z^m) = m z^m ζ
                let m = self.qpb.hopf().exponent(a);
                Ok(SparseVec::single(a, Scalar::from_int(m)))
            }
            HorKind::LineForm => {
                if i == 1 {
                    return Ok(SparseVec::zero());
                }
                // d(x^k) = k x^{k−1} dx
                let Total::Line { lo, hi } = &self.qpb.total else {
                    return Err(Error::Internal("line horizontal on non-line bundle".into()));
                };
                let k = a as i64 + lo;
                if k == 0 {
                    return Ok(SparseVec::zero());
                }
                if k - 1 < *lo || k - 1 > *hi {
                    return Err(Error::TruncationOverflow {
                        degree: k - 1,
                        lo: *lo,
                        hi: *hi,
                    });
                }
                Ok(SparseVec::single(
                    (k - 1 - lo) as usize,
                    Scalar::from_int(k),
                ))
            }
        }
    }

    fn hor_star(&self, (i, a): (usize, usize)) -> SparseVec {
        // star of a horizontal basis form (linear part; callers conjugate
        // coefficients)
        match &self.hor {
            HorKind::Degree0 => SparseVec::unit(a),
            HorKind::U1Form => {
                if i == 0 {
                    self.qpb.star_p(&SparseVec::unit(a))
                } else {
                    // (z^m ζ)∗ = −z^{−m} ζ
                    self.qpb.star_p(&SparseVec::unit(a)).negated()
                }
            }
            HorKind::LineForm => SparseVec::unit(a),
        }
    }

    /// The H-coaction on a horizontal basis form, `(hor, H)` pairs.
    fn hor_coaction(&self, (i, a): (usize, usize)) -> PairVec {
        match &self.hor {
            HorKind::Degree0 => self.qpb.coaction_basis(a),
            HorKind::U1Form => {
                // ζ is invariant: Δ(z^m ζ) = z^m ζ ⊗ z^m
                let _ = i;
                let mut out = PairVec::zero();
                out.add_term(a, a, Scalar::one());
                out
            }
            HorKind::LineForm => {
                if i == 0 {
                    self.qpb.coaction_basis(a)
                } else {
                    // dx∘s = −dx
                    let Total::Line { lo, .. } = &self.qpb.total else {
                        unreachable!()
                    };
                    let k = a as i64 + lo;
                    let mut out = PairVec::zero();
                    out.add_term(a, 0, Scalar::one());
                    out.add_term(
                        a,
                        1,
                        if (k + 1).rem_euclid(2) == 0 {
                            Scalar::one()
                        } else {
                            Scalar::from_int(-1)
                        },
                    );
                    out
                }
            }
        }
    }

    // -- Ω structure ----------------------------------------------------------

    /// `(μ⊗θ)(ν⊗ϑ) = (−1)^{∂θ·∂ν} Σ μν⁽⁰⁾ ⊗ (θ∘ν⁽¹⁾)ϑ`
    pub fn mul_basis(&self, x: usize, y: usize) -> Result<SparseVec> {
        let (nx, ix, ax, wx) = self.split(x);
        let (ny, iy, ay, wy) = self.split(y);
        if nx + ny > self.max_degree {
            return Err(Error::DegreeOverflow(nx + ny, self.max_degree));
        }
        let germ_x = nx - ix;
        let germ_y = ny - iy;
        let sign = if (germ_x * iy) % 2 == 0 {
            Scalar::one()
        } else {
            Scalar::from_int(-1)
        };
        let mut out = SparseVec::zero();
        for ((nu0, h1), c) in self.hor_coaction((iy, ay)).iter() {
            // θ_x ∘ h1 at the wedge level
            let acted = self.env.extended_module_action(
                germ_x,
                &SparseVec::unit(wx),
                &SparseVec::unit(*h1),
            )?;
            if acted.is_zero() {
                continue;
            }
            let Some((hk, hprod)) = self.hor_mul((ix, ax), (iy, *nu0))? else {
                continue;
            };
            if hprod.is_zero() {
                continue;
            }
            let wedge = self.env_wedge_mul(germ_x, &acted, germ_y, &SparseVec::unit(wy))?;
            if wedge.is_zero() {
                continue;
            }
            for (hb, hc) in hprod.iter() {
                for (wb, wc) in wedge.iter() {
                    out.add_term(
                        self.flat(hk, *hb, germ_x + germ_y, *wb),
                        &(&(c * &sign) * hc) * wc,
                    );
                }
            }
        }
        Ok(out)
    }

    fn env_wedge_mul(
        &self,
        k1: usize,
        a: &SparseVec,
        k2: usize,
        b: &SparseVec,
    ) -> Result<SparseVec> {
        // delegate to the envelope's wedge product through degree-1 words
        self.env.wedge_concat(k1, a, k2, b)
    }

    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::zero();
        for (a, c) in x.iter() {
            for (b, e) in y.iter() {
                out.add_scaled(&self.mul_basis(*a, *b)?, &(c * e));
            }
        }
        Ok(out)
    }

    /// Total differential: de Rham on the horizontal leg plus the germ leg
    /// produced by the coaction, plus Maurer–Cartan on the germ word.
    pub fn d_basis(&self, x: usize) -> Result<SparseVec> {
        let (n, i, a, w) = self.split(x);
        if n + 1 > self.max_degree {
            return Err(Error::DegreeOverflow(n + 1, self.max_degree));
        }
        let germ_deg = n - i;
        let mut out = SparseVec::zero();
        // d_hor μ ⊗ θ
        for (b, c) in self.hor_d((i, a))?.iter() {
            out.add_term(self.flat(i + 1, *b, germ_deg, w), c.clone());
        }
        // (−1)^{∂μ} [ μ⁽⁰⁾ ⊗ π(μ⁽¹⁾)·θ + μ ⊗ d∧θ ]
        let sign = if i % 2 == 0 {
            Scalar::one()
        } else {
            Scalar::from_int(-1)
        };
        for ((nu0, h1), c) in self.hor_coaction((i, a)).iter() {
            let germ = self.env.fodc().germs().pi(&SparseVec::unit(*h1));
            if germ.is_zero() {
                continue;
            }
            let germ_w = germ.map_indices(|t| Some(self.wedge_pos(1, t)));
            let wedge = self
                .env
                .wedge_concat(1, &germ_w, germ_deg, &SparseVec::unit(w))?;
            for (wb, wc) in wedge.iter() {
                out.add_term(self.flat(i, *nu0, germ_deg + 1, *wb), &(c * wc) * &sign);
            }
        }
        for (wb, wc) in self.env.wedge_d(germ_deg, &SparseVec::unit(w))?.iter() {
            out.add_term(self.flat(i, a, germ_deg + 1, *wb), wc * &sign);
        }
        Ok(out)
    }

    pub fn d(&self, v: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::zero();
        for (a, c) in v.iter() {
            out.add_scaled(&self.d_basis(*a)?, c);
        }
        Ok(out)
    }

    /// `(μ·θ)∗ = (−1)^{∂μ∂θ} θ∗·μ∗`, with the germ word starred through the
    /// calculus and commuted past the horizontal star by the coaction.
    pub fn star_basis(&self, x: usize) -> Result<SparseVec> {
        let (n, i, a, w) = self.split(x);
        let germ_deg = n - i;
        let word_star = self.env.wedge_star(germ_deg, &SparseVec::unit(w))?;
        let hor_star = self.hor_star((i, a));
        let mut out = SparseVec::zero();
        for (hb, hc) in hor_star.iter() {
            for ((nu0, h1), c) in self.hor_coaction((i, *hb)).iter() {
                let acted =
                    self.env
                        .extended_module_action(germ_deg, &word_star, &SparseVec::unit(*h1))?;
                for (wb, wc) in acted.iter() {
                    out.add_term(self.flat(i, *nu0, germ_deg, *wb), &(hc * c) * wc);
                }
            }
        }
        let sign = if (i * germ_deg) % 2 == 0 {
            Scalar::one()
        } else {
            Scalar::from_int(-1)
        };
        Ok(out.scaled(&sign))
    }

    pub fn star(&self, v: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::zero();
        for (a, c) in v.iter() {
            out.add_scaled(&self.star_basis(*a)?, &c.conj());
        }
        Ok(out)
    }

    /// The coaction `Δ_Ω : Ω → Ω ⊗ Γ∧` on a flat basis vector.
    pub fn coaction_basis(&self, x: usize) -> Result<PairVec> {
        let (n, i, a, w) = self.split(x);
        let germ_deg = n - i;
        // horizontal part: Δ_Hor(μ) ∈ Ω ⊗ Γ∧ (degree-0 Γ leg)
        let mut acc = PairVec::zero();
        for ((nu0, h1), c) in self.hor_coaction((i, a)).iter() {
            acc.add_term(
                self.flat(i, *nu0, 0, 0),
                self.env.flat(0, *h1, 0),
                c.clone(),
            );
        }
        // germ letters: Δ_Ω(qleg θ) = qleg(θ⁽⁰⁾)⊗θ⁽¹⁾ + 1⊗θ
        for &t in self.env.word_letters_of(germ_deg, w).iter() {
            let mut dq = PairVec::zero();
            for ((tt, hh), c) in self.env.fodc().ad_germ(&SparseVec::unit(t))?.iter() {
                for (p, x0) in self.embed_germ(&SparseVec::unit(*tt)).iter() {
                    dq.add_term(*p, self.env.flat(0, *hh, 0), c * x0);
                }
            }
            for (p, x0) in self.one().iter() {
                for (q, y0) in self.env.embed_germ(&SparseVec::unit(t)).iter() {
                    dq.add_term(*p, *q, x0 * y0);
                }
            }
            acc = self.mul_mixed_pairs(&acc, &dq)?;
        }
        Ok(acc)
    }

    /// Koszul product on `Ω ⊗ Γ∧`.
    pub fn mul_mixed_pairs(&self, x: &PairVec, y: &PairVec) -> Result<PairVec> {
        let mut out = PairVec::zero();
        for ((x1, x2), c) in x.iter() {
            let dx2 = self.env.degree_of(*x2);
            for ((y1, y2), e) in y.iter() {
                let dy1 = self.degree_of(*y1);
                let sign = if (dx2 * dy1) % 2 == 0 {
                    Scalar::one()
                } else {
                    Scalar::from_int(-1)
                };
                let left = self.mul_basis(*x1, *y1)?;
                if left.is_zero() {
                    continue;
                }
                let right = self.env.mul_basis(*x2, *y2)?;
                for (l, lc) in left.iter() {
                    for (r, rc) in right.iter() {
                        out.add_term(*l, *r, &(&(c * e) * &sign) * &(lc * rc));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn coaction(&self, v: &SparseVec) -> Result<PairVec> {
        let mut out = PairVec::zero();
        for (a, c) in v.iter() {
            out.add_scaled(&self.coaction_basis(*a)?, c);
        }
        Ok(out)
    }

    // -- horizontal and base forms ---------------------------------------------

    /// Basis of the horizontal forms in total degree `n`: coaction lands in
    /// `Ω ⊗ H`.
    pub fn horizontal_forms(&self, n: usize) -> Result<Vec<SparseVec>> {
        let dim = self.degree_dim(n);
        let off = self.offsets[n];
        // rows indexed by (Ω-flat, Γ∧-flat of degree ≥ 1) pairs appearing
        let mut rows: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut cols: Vec<Vec<(usize, Scalar)>> = Vec::with_capacity(dim);
        for a in 0..dim {
            let cp = self.coaction_basis(off + a)?;
            let mut col = Vec::new();
            for ((p, t), c) in cp.iter() {
                if self.env.degree_of(*t) >= 1 {
                    let next = rows.len();
                    let r = *rows.entry((*p, *t)).or_insert(next);
                    col.push((r, c.clone()));
                }
            }
            cols.push(col);
        }
        let mut m = Matrix::zeros(rows.len(), dim);
        for (a, col) in cols.iter().enumerate() {
            for (r, c) in col {
                *m.at_mut(*r, a) = c.clone();
            }
        }
        Ok(m.kernel_basis()
            .into_iter()
            .map(|v| v.map_indices(|i| Some(off + i)))
            .collect())
    }

    fn compute_base_forms(&self, n: usize) -> Result<Vec<SparseVec>> {
        let dim = self.degree_dim(n);
        let off = self.offsets[n];
        let mut rows: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut cols: Vec<Vec<(usize, Scalar)>> = Vec::with_capacity(dim);
        let env_one: Vec<(usize, Scalar)> = {
            let mut v = Vec::new();
            for (t, c) in self.env.unit().iter() {
                v.push((*t, c.clone()));
            }
            v
        };
        for a in 0..dim {
            let mut cp = self.coaction_basis(off + a)?;
            // subtract v ⊗ 1
            for (t, c) in &env_one {
                cp.add_term(off + a, *t, -c.clone());
            }
            let mut col = Vec::new();
            for ((p, t), c) in cp.iter() {
                let next = rows.len();
                let r = *rows.entry((*p, *t)).or_insert(next);
                col.push((r, c.clone()));
            }
            cols.push(col);
        }
        let mut m = Matrix::zeros(rows.len(), dim);
        for (a, col) in cols.iter().enumerate() {
            for (r, c) in col {
                *m.at_mut(*r, a) = c.clone();
            }
        }
        Ok(m.kernel_basis()
            .into_iter()
            .map(|v| v.map_indices(|i| Some(off + i)))
            .collect())
    }

    /// Basis of `Ω^n(B) = {μ : Δ_Ω(μ) = μ⊗1}`, precomputed.
    pub fn base_forms(&self, n: usize) -> &[SparseVec] {
        &self.base_forms[n]
    }

    /// Horizontal forms are a graded ∗-subalgebra; base forms additionally
    /// closed under d. Returns the verification checks.
    pub fn verify_form_subalgebras(&self) -> Result<Vec<Check>> {
        let mut checks = Vec::new();
        // horizontal: closed under product and star
        let mut hor: Vec<Vec<SparseVec>> = Vec::new();
        for n in 0..=self.max_degree {
            hor.push(self.horizontal_forms(n)?);
        }
        let mut witness = None;
        'outer: for n1 in 0..=self.max_degree {
            for n2 in 0..=(self.max_degree - n1) {
                let target = Span::from_vectors(hor[n1 + n2].iter());
                for v in &hor[n1] {
                    for wv in &hor[n2] {
                        match self.mul(v, wv) {
                            Ok(p) => {
                                if !target.contains(&p) {
                                    witness = Some(format!("degrees ({n1}, {n2})"));
                                    break 'outer;
                                }
                            }
                            Err(Error::TruncationOverflow { .. }) => continue,
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
        }
        checks.push(Check::from_witness(
            "horizontal-closed-product",
            "Hor·Hor ⊆ Hor",
            witness,
        ));
        let mut witness = None;
        'outer2: for (n, layer) in hor.iter().enumerate() {
            let target = Span::from_vectors(layer.iter());
            for v in layer {
                match self.star(v) {
                    Ok(s) => {
                        if !target.contains(&s) {
                            witness = Some(format!("degree {n}"));
                            break 'outer2;
                        }
                    }
                    Err(Error::TruncationOverflow { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
        checks.push(Check::from_witness(
            "horizontal-closed-star",
            "Hor∗ ⊆ Hor",
            witness,
        ));
        // horizontal coaction is a corepresentation (counit + coassociativity)
        let mut witness = None;
        'outer3: for layer in &hor {
            for v in layer {
                let cp = self.coaction(v)?;
                let mut counit = SparseVec::zero();
                for ((p, t), c) in cp.iter() {
                    counit.add_term(*p, c * &self.env.counit_basis(*t));
                }
                if counit != *v {
                    witness = Some("counit".to_string());
                    break 'outer3;
                }
                let mut lhs = crate::linalg::TripleVec::zero();
                let mut rhs = crate::linalg::TripleVec::zero();
                for ((p, t), c) in cp.iter() {
                    for ((t1, t2), y) in self.env.coprod_basis(*t)?.iter() {
                        lhs.add_term(*p, *t1, *t2, c * y);
                    }
                    for ((p1, t1), y) in self.coaction_basis(*p)?.iter() {
                        rhs.add_term(*p1, *t1, *t, c * y);
                    }
                }
                if lhs != rhs {
                    witness = Some("coassociativity".to_string());
                    break 'outer3;
                }
            }
        }
        checks.push(Check::from_witness(
            "horizontal-corepresentation",
            "Δ_Hor is a corepresentation",
            witness,
        ));
        // base forms closed under d and star
        let mut witness = None;
        'outer4: for n in 0..=self.max_degree {
            let layer = self.base_forms(n);
            if n + 1 <= self.max_degree {
                let target = Span::from_vectors(self.base_forms(n + 1).iter());
                for v in layer {
                    match self.d(v) {
                        Ok(dv) => {
                            if !target.contains(&dv) {
                                witness = Some(format!("d at degree {n}"));
                                break 'outer4;
                            }
                        }
                        Err(Error::TruncationOverflow { .. }) => continue,
                        Err(e) => return Err(e),
                    }
                }
            }
            let target = Span::from_vectors(layer.iter());
            for v in layer {
                match self.star(v) {
                    Ok(s) => {
                        if !target.contains(&s) {
                            witness = Some(format!("star at degree {n}"));
                            break 'outer4;
                        }
                    }
                    Err(Error::TruncationOverflow { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
        checks.push(Check::from_witness(
            "base-forms-closed",
            "d(Ω(B)) ⊆ Ω(B), Ω(B)∗ ⊆ Ω(B)",
            witness,
        ));
        Ok(checks)
    }

    pub fn render(&self, v: &SparseVec) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = v
            .iter()
            .map(|(f, c)| {
                let (n, i, a, w) = self.split(*f);
                let hor = match (&self.hor, i) {
                    (_, 0) => self.qpb.p_space.label(a).to_string(),
                    (HorKind::U1Form, _) => format!("{}·ζ", self.qpb.p_space.label(a)),
                    (HorKind::LineForm, _) => format!("{}·dx", self.qpb.p_space.label(a)),
                    (HorKind::Degree0, _) => unreachable!(),
                };
                let germ_deg = n - i;
                if germ_deg == 0 {
                    format!("({c})·{hor}")
                } else {
                    format!("({c})·{hor}·{}", self.env.wedge_label(germ_deg, w))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Public constructor selector for the horizontal layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HorKind0 {
    Degree0,
    U1Form,
    LineForm,
}

fn hor_max(h: &HorKind) -> usize {
    match h {
        HorKind::Degree0 => 0,
        HorKind::U1Form | HorKind::LineForm => 1,
    }
}

fn hor_dim_of(h: &HorKind, qpb: &Qpb, deg: usize) -> usize {
    match (h, deg) {
        (_, 0) => qpb.p_dim(),
        (HorKind::U1Form, 1) | (HorKind::LineForm, 1) => qpb.p_dim(),
        _ => 0,
    }
}

impl fmt::Debug for BundleCalculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<usize> = (0..=self.max_degree).map(|n| self.degree_dim(n)).collect();
        write!(f, "BundleCalculus(dims {dims:?})")
    }
}

// ---------------------------------------------------------------------------
// Intertwiner families
// ---------------------------------------------------------------------------

/// A family `{T_k}` in `Mor(δ^V, Δ_P)` whose values satisfy the (possibly
/// Gram-twisted) completeness relation `Σ_k x∗_ki x_kj = Q_ij·1`.
pub struct IntertwinerFamily {
    pub corep: Corepresentation,
    /// `values[k * n + i] = T_k(e_i) ∈ P`
    values: Vec<SparseVec>,
    pub family_size: usize,
    /// true when `Q = I`, i.e. the relation is the untwisted one
    pub normalized: bool,
}

impl IntertwinerFamily {
    pub fn value(&self, k: usize, i: usize) -> &SparseVec {
        &self.values[k * self.corep.dim + i]
    }
}

/// Rows of an exact isometry-like factor `C` with `C†C = gram`, used to build
/// intertwiner families for Gram-twisted corepresentations. For `gram = I`
/// this is the identity.
fn gram_isometry_rows(corep: &Corepresentation) -> Result<Vec<Vec<Scalar>>> {
    let n = corep.dim;
    if corep.is_standard_unitary() {
        return Ok((0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        if k == i {
                            Scalar::one()
                        } else {
                            Scalar::zero()
                        }
                    })
                    .collect()
            })
            .collect());
    }
    // catalogue factorizations of the non-identity Gram matrices in use
    let plane_gram = Matrix::from_fn(2, 2, |r, c| Scalar::from_int([[2, -1], [-1, 2]][r][c]));
    if corep.gram == plane_gram {
        // rows (1,−1), (1,0), (0,1): C†C = [[2,−1],[−1,2]]
        return Ok(vec![
            vec![Scalar::one(), Scalar::from_int(-1)],
            vec![Scalar::one(), Scalar::zero()],
            vec![Scalar::zero(), Scalar::one()],
        ]);
    }
    Err(Error::MissingCorepresentation(format!(
        "no isometry factor on file for the gram matrix of {}",
        corep.name
    )))
}

/// Builds the intertwiner family of a catalogue corepresentation on a finite
/// bundle: one block per orbit, each block the composite of the orbit chart
/// with the corepresentation matrix and the Gram isometry factor.
pub fn build_intertwiners(qpb: &Qpb, corep: &Corepresentation) -> Result<IntertwinerFamily> {
    let n = corep.dim;
    match &qpb.total {
        Total::Finite {
            points: _,
            action,
            orbits,
        } => {
            let group = qpb.hopf().group().expect("finite bundle").clone();
            let c_rows = gram_isometry_rows(corep)?;
            let block = c_rows.len();
            let d = orbits.len() * block;
            // chart: for x in orbit of x0, the unique a with x0·a = x
            let mut values = vec![SparseVec::zero(); d * n];
            for (o, orbit) in orbits.iter().enumerate() {
                let x0 = orbit[0];
                for kb in 0..block {
                    for i in 0..n {
                        let mut f = SparseVec::zero();
                        for a in 0..group.order() {
                            let x = action[x0][a];
                            // Σ_m C_{kb,m}·g_mi evaluated at the chart element a
                            let mut coeff = Scalar::zero();
                            for (m, cm) in c_rows[kb].iter().enumerate() {
                                if cm.is_zero() {
                                    continue;
                                }
                                coeff += &(cm * &corep.coeff(m, i).get(a));
                            }
                            f.add_term(x, coeff);
                        }
                        values[(o * block + kb) * n + i] = f;
                    }
                }
            }
            let fam = IntertwinerFamily {
                corep: corep.clone(),
                values,
                family_size: d,
                normalized: corep.is_standard_unitary(),
            };
            verify_intertwiners(qpb, &fam)?;
            Ok(fam)
        }
        Total::SelfBundle => {
            // characters z^n: the single intertwiner T(1) = z^n
            if n != 1 {
                return Err(Error::MissingCorepresentation(
                    "U(1) bundle carries the character corepresentations".into(),
                ));
            }
            let fam = IntertwinerFamily {
                corep: corep.clone(),
                values: vec![corep.coeff(0, 0).clone()],
                family_size: 1,
                normalized: true,
            };
            verify_intertwiners(qpb, &fam)?;
            Ok(fam)
        }
        Total::Line { .. } => Err(Error::MissingCorepresentation(
            "line-bundle families are supplied by the reflection-connection layer".into(),
        )),
    }
}

/// Checks the morphism property and the completeness relation of a family.
pub fn verify_intertwiners(qpb: &Qpb, fam: &IntertwinerFamily) -> Result<()> {
    let n = fam.corep.dim;
    let h = qpb.hopf();
    // Mor: Δ_P(T_k(e_i)) = Σ_j T_k(e_j) ⊗ g_ji
    for k in 0..fam.family_size {
        for i in 0..n {
            let lhs = qpb.coaction(fam.value(k, i));
            let mut rhs = PairVec::zero();
            for j in 0..n {
                for (p, c) in fam.value(k, j).iter() {
                    for (g, e) in fam.corep.coeff(j, i).iter() {
                        rhs.add_term(*p, *g, c * e);
                    }
                }
            }
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "intertwiner {k} is not a corepresentation morphism at e_{i}"
                )));
            }
        }
    }
    // Σ_k x∗_ki x_kj = Q_ij·1
    for i in 0..n {
        for j in 0..n {
            let mut acc = SparseVec::zero();
            for k in 0..fam.family_size {
                let prod = qpb.mul_p(&qpb.star_p(fam.value(k, i)), fam.value(k, j))?;
                acc.add_scaled(&prod, &Scalar::one());
            }
            let mut expected = SparseVec::zero();
            expected.add_scaled(&qpb.one_p(), fam.corep.gram.at(i, j));
            if acc != expected {
                return Err(Error::Internal(format!(
                    "completeness relation fails at ({i}, {j})"
                )));
            }
        }
    }
    let _ = h;
    Ok(())
}

// ---------------------------------------------------------------------------
// Connections
// ---------------------------------------------------------------------------

/// A principal connection: a linear map `qg# → Ω¹(P)` with `ω(θ)` coacting as
/// `(ω⊗id)ad(θ) + 1⊗θ`; `real` records `ω(θ∗) = ω(θ)∗`.
pub struct Connection {
    /// value on each germ basis vector, degree-1 Ω elements
    pub values: Vec<SparseVec>,
    pub real: bool,
    pub name: String,
}

impl Connection {
    pub fn value(&self, theta: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (t, c) in theta.iter() {
            out.add_scaled(&self.values[*t], c);
        }
        out
    }

    /// The canonical flat connection `θ ↦ 1⊗θ`.
    pub fn canonical(calc: &BundleCalculus) -> Result<Self> {
        let g = calc.envelope().germ_dim();
        let values = (0..g)
            .map(|t| calc.embed_germ(&SparseVec::unit(t)))
            .collect();
        let c = Connection {
            values,
            real: true,
            name: "canonical".into(),
        };
        c.verify(calc)?;
        Ok(c)
    }

    /// Checks the connection axiom and the reality flag.
    pub fn verify(&self, calc: &BundleCalculus) -> Result<()> {
        let fodc = calc.envelope().fodc();
        for t in 0..self.values.len() {
            let theta = SparseVec::unit(t);
            let lhs = calc.coaction(&self.values[t])?;
            let mut rhs = PairVec::zero();
            for ((tt, hh), c) in fodc.ad_germ(&theta)?.iter() {
                for (p, x) in self.values[*tt].iter() {
                    rhs.add_term(*p, calc.envelope().flat(0, *hh, 0), c * x);
                }
            }
            for (p, x) in calc.one().iter() {
                for (q, y) in calc.envelope().embed_germ(&theta).iter() {
                    rhs.add_term(*p, *q, x * y);
                }
            }
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "connection {} fails the coaction axiom at germ {t}",
                    self.name
                )));
            }
            if self.real {
                let star_theta = fodc.star_germ(&theta);
                let lhs = self.value(&star_theta);
                let rhs = calc.star(&self.values[t])?;
                if lhs != rhs {
                    return Err(Error::Internal(format!(
                        "connection {} is not real at germ {t}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// The quantum translation map
// ---------------------------------------------------------------------------

/// The translation map tabulated on the graded basis of `Γ∧`, with values
/// given by representatives in `Ω ⊗ Ω` (classes modulo the `Ω(B)`-balanced
/// relations).
pub struct TranslationMap {
    /// representative of `qtrs(t)` for every Γ∧ flat basis index
    table: Vec<PairVec>,
}

impl TranslationMap {
    pub fn of_basis(&self, t: usize) -> &PairVec {
        &self.table[t]
    }

    pub fn of(&self, v: &SparseVec) -> PairVec {
        let mut out = PairVec::zero();
        for (t, c) in v.iter() {
            out.add_scaled(&self.table[*t], c);
        }
        out
    }
}

impl BundleCalculus {
    /// Degree-0 translation values `qtrs(g) = Σ_l (Q⁻¹)_il Σ_k x∗_kl ⊗_B x_kj`
    /// per matrix coefficient, extended linearly to all of `H` through the
    /// coefficient basis; verified against `β̃∘qtrs = 1⊗g`.
    pub fn qtrs0(&self, families: &[IntertwinerFamily]) -> Result<Vec<PairVec>> {
        let h = self.qpb.hopf();
        let hd = h.dim();
        // coefficient vectors and their qtrs values
        let mut coeff_vectors: Vec<SparseVec> = Vec::new();
        let mut coeff_qtrs: Vec<PairVec> = Vec::new();
        for fam in families {
            let n = fam.corep.dim;
            let qinv = invert_matrix(&fam.corep.gram)
                .ok_or_else(|| Error::Internal(format!("singular gram for {}", fam.corep.name)))?;
            for i in 0..n {
                for j in 0..n {
                    coeff_vectors.push(fam.corep.coeff(i, j).clone());
                    let mut val = PairVec::zero();
                    for l in 0..n {
                        let c = qinv.at(i, l);
                        if c.is_zero() {
                            continue;
                        }
                        for k in 0..fam.family_size {
                            let left = self.embed_p(&self.qpb.star_p(fam.value(k, l)));
                            let right = self.embed_p(fam.value(k, j));
                            for (p, x) in left.iter() {
                                for (q, y) in right.iter() {
                                    val.add_term(*p, *q, &(c * x) * y);
                                }
                            }
                        }
                    }
                    coeff_qtrs.push(val);
                }
            }
        }
        // solve for each H basis element in the coefficient basis
        let m = Matrix::from_fn(hd, coeff_vectors.len(), |r, c| coeff_vectors[c].get(r));
        let mut out = Vec::with_capacity(hd);
        for b in 0..hd {
            let mut rhs = vec![Scalar::zero(); hd];
            rhs[b] = Scalar::one();
            let sol = m.solve(&rhs).ok_or_else(|| {
                Error::MissingCorepresentation(format!(
                    "matrix coefficients do not span {}",
                    h.space().label(b)
                ))
            })?;
            let mut val = PairVec::zero();
            for (c, coeff) in sol.iter().enumerate() {
                val.add_scaled(&coeff_qtrs[c], coeff);
            }
            out.push(val);
        }
        // β̃ ∘ qtrs = 1 ⊗ g exactly
        for (b, val) in out.iter().enumerate() {
            let beta = self.beta_tilde(val)?;
            let mut expected = PairVec::zero();
            for (p, x) in self.one().iter() {
                expected.add_term(*p, self.env.flat(0, b, 0), x.clone());
            }
            if beta != expected {
                return Err(Error::Internal(format!(
                    "β̃(qtrs({})) ≠ 1⊗{}",
                    h.space().label(b),
                    h.space().label(b)
                )));
            }
        }
        Ok(out)
    }

    /// `β̃(w1 ⊗ w2) = (w1 ⊗ 1)·Δ_Ω(w2)`, valued in `Ω ⊗ Γ∧`.
    pub fn beta_tilde(&self, pair: &PairVec) -> Result<PairVec> {
        let mut out = PairVec::zero();
        for ((w1, w2), c) in pair.iter() {
            for ((p, t), e) in self.coaction_basis(*w2)?.iter() {
                let left = self.mul_basis(*w1, *p)?;
                for (l, lc) in left.iter() {
                    out.add_term(*l, *t, &(c * e) * lc);
                }
            }
        }
        Ok(out)
    }

    /// Builds the full translation map using a real connection for the germ
    /// extension; the table is degree-complete up to the calculus cap.
    pub fn translation_map(
        &self,
        families: &[IntertwinerFamily],
        omega: &Connection,
    ) -> Result<TranslationMap> {
        let deg0 = self.qtrs0(families)?;
        self.translation_map_from(deg0, omega)
    }

    /// Same as [`BundleCalculus::translation_map`], starting from an explicit
    /// degree-0 table (used when the coefficient families are not
    /// normalizable); the table is validated against `β̃∘qtrs = 1⊗g`.
    pub fn translation_map_from(
        &self,
        deg0: Vec<PairVec>,
        omega: &Connection,
    ) -> Result<TranslationMap> {
        if !omega.real {
            return Err(Error::Internal(
                "translation extension requires a real connection".into(),
            ));
        }
        for (b, val) in deg0.iter().enumerate() {
            let beta = self.beta_tilde(val)?;
            let mut expected = PairVec::zero();
            for (p, x) in self.one().iter() {
                expected.add_term(*p, self.env.flat(0, b, 0), x.clone());
            }
            if beta != expected {
                return Err(Error::Internal(format!(
                    "degree-0 translation value {b} fails β̃∘qtrs = 1⊗g"
                )));
            }
        }
        let env = &self.env;
        let fodc = env.fodc();
        // germ values: qtrs(θ) = 1 ⊗ ω(θ) − (m⊗id)(ω⊗qtrs)ad(θ)
        let germ_dim = env.germ_dim();
        let mut germ_vals = Vec::with_capacity(germ_dim);
        for t in 0..germ_dim {
            let theta = SparseVec::unit(t);
            let mut val = PairVec::zero();
            for (p, x) in self.one().iter() {
                for (q, y) in omega.values[t].iter() {
                    val.add_term(*p, *q, x * y);
                }
            }
            for ((tt, hh), c) in fodc.ad_germ(&theta)?.iter() {
                // ω(θ⁽⁰⁾)·[h-leg of qtrs(θ⁽¹⁾)] ⊗ [second leg]
                for ((a, b), e) in deg0[*hh].iter() {
                    let prod = self.mul(&omega.values[*tt], &SparseVec::unit(*a))?;
                    for (l, lc) in prod.iter() {
                        val.add_term(*l, *b, -(&(c * e) * lc));
                    }
                }
            }
            germ_vals.push(val);
        }
        // extend over the Γ∧ basis by right-peeling letters:
        // qtrs(ϑ·υ) = (−1)^{∂ϑ ∂[υ]_1} [υ]_1·qtrs(ϑ)·[υ]_2
        let mut table = Vec::with_capacity(env.total_dim());
        for f in 0..env.total_dim() {
            let (k, gi, wi) = env.split(f);
            let letters = env.word_letters_of(k, wi);
            let mut acc = deg0[gi].clone();
            let mut deg_acc = 0usize;
            for &t in letters.iter() {
                let mut next = PairVec::zero();
                for ((u, v), c) in acc.iter() {
                    for ((a, b), e) in germ_vals[t].iter() {
                        let da = self.degree_of(*a);
                        let sign = if (deg_acc * da) % 2 == 0 {
                            Scalar::one()
                        } else {
                            Scalar::from_int(-1)
                        };
                        let left = self.mul_basis(*a, *u)?;
                        if left.is_zero() {
                            continue;
                        }
                        let right = self.mul_basis(*v, *b)?;
                        for (l, lc) in left.iter() {
                            for (r, rc) in right.iter() {
                                next.add_term(*l, *r, &(&(c * e) * &sign) * &(lc * rc));
                            }
                        }
                    }
                }
                acc = next;
                deg_acc += 1;
            }
            table.push(acc);
        }
        Ok(TranslationMap { table })
    }

    /// Relations `w·μ ⊗ v − w ⊗ μ·v` over base forms `μ`, spanning the
    /// balanced-tensor kernel in total degree `n`; the span is over fused
    /// `Ω⊗Ω` indices.
    pub fn balanced_relations(&self, n: usize) -> Result<Span> {
        let t = self.total;
        let mut span = Span::new();
        for mu_deg in 0..=n.min(self.max_degree) {
            for mu in self.base_forms(mu_deg) {
                for rest in 0..=(n - mu_deg) {
                    let left_deg = rest;
                    let right_deg = n - mu_deg - rest;
                    if right_deg > self.max_degree {
                        continue;
                    }
                    for w in self.degree_indices(left_deg) {
                        for v in self.degree_indices(right_deg) {
                            let mut rel = SparseVec::zero();
                            let mut ok = true;
                            match self.mul(&SparseVec::unit(w), mu) {
                                Ok(wm) => {
                                    for (l, lc) in wm.iter() {
                                        rel.add_term(l * t + v, lc.clone());
                                    }
                                }
                                Err(Error::TruncationOverflow { .. }) => ok = false,
                                Err(e) => return Err(e),
                            }
                            match self.mul(mu, &SparseVec::unit(v)) {
                                Ok(mv) => {
                                    for (r, rc) in mv.iter() {
                                        rel.add_term(w * t + r, -rc.clone());
                                    }
                                }
                                Err(Error::TruncationOverflow { .. }) => ok = false,
                                Err(e) => return Err(e),
                            }
                            if ok {
                                span.insert(&rel);
                            }
                        }
                    }
                }
            }
        }
        Ok(span)
    }

    pub fn degree_indices(&self, n: usize) -> std::ops::Range<usize> {
        self.offsets[n]..self.offsets[n + 1]
    }

    /// Equality in `Ω ⊗_{Ω(B)} Ω`: the difference of representatives lies in
    /// the balanced span of the matching degree.
    pub fn balanced_eq(&self, relations: &Span, x: &PairVec, y: &PairVec) -> bool {
        let t = self.total;
        let mut diff = SparseVec::zero();
        for ((a, b), c) in x.iter() {
            diff.add_term(a * t + b, c.clone());
        }
        for ((a, b), c) in y.iter() {
            diff.add_term(a * t + b, -c.clone());
        }
        relations.contains(&diff)
    }
}

fn invert_matrix(m: &Matrix) -> Option<Matrix> {
    let n = m.rows;
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![Scalar::zero(); n];
        e[j] = Scalar::one();
        cols.push(m.solve(&e)?);
    }
    Some(Matrix::from_fn(n, n, |r, c| cols[c][r].clone()))
}

// ---------------------------------------------------------------------------
// Translation-map property suite
// ---------------------------------------------------------------------------

impl BundleCalculus {
    /// Exhaustive verification of the translation-map laws up to the degree
    /// cap: both inverse identities against `β̃`, the counit collapse, both
    /// coaction compatibilities with their graded twists, the commutation
    /// with base forms, and the compatibility with the differentials.
    pub fn verify_qtrs_properties(&self, qtrs: &TranslationMap) -> Result<Vec<Check>> {
        let env = &self.env;
        let cap = self.max_degree;
        let mut checks = Vec::new();
        let relations: Vec<Span> = (0..=cap)
            .map(|n| self.balanced_relations(n))
            .collect::<Result<Vec<_>>>()?;

        // β̃ ∘ q̃trs = id on Ω ⊗ Γ∧
        let mut witness = None;
        'a: for w in 0..self.total {
            for t in 0..env.total_dim() {
                if self.degree_of(w) + env.degree_of(t) > cap {
                    continue;
                }
                let mut arg = PairVec::zero();
                arg.add_term(w, t, Scalar::one());
                let round = self
                    .qtrs_tilde(qtrs, &arg)
                    .and_then(|qt| self.beta_tilde(&qt));
                let back = match round {
                    Ok(b) => b,
                    Err(Error::TruncationOverflow { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if back != arg {
                    witness = Some(format!(
                        "({}, {})",
                        self.render(&SparseVec::unit(w)),
                        env.render(&SparseVec::unit(t))
                    ));
                    break 'a;
                }
            }
        }
        checks.push(Check::from_witness(
            "beta-after-qtrs",
            "β̃ ∘ q̃trs = id",
            witness,
        ));

        // q̃trs ∘ β̃ = id on Ω ⊗_{Ω(B)} Ω
        let mut witness = None;
        'b: for w1 in 0..self.total {
            for w2 in 0..self.total {
                let n = self.degree_of(w1) + self.degree_of(w2);
                if n > cap {
                    continue;
                }
                let mut arg = PairVec::zero();
                arg.add_term(w1, w2, Scalar::one());
                let round = self
                    .beta_tilde(&arg)
                    .and_then(|beta| self.qtrs_tilde(qtrs, &beta));
                let back = match round {
                    Ok(b) => b,
                    Err(Error::TruncationOverflow { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if !self.balanced_eq(&relations[n], &back, &arg) {
                    witness = Some(format!(
                        "({}, {})",
                        self.render(&SparseVec::unit(w1)),
                        self.render(&SparseVec::unit(w2))
                    ));
                    break 'b;
                }
            }
        }
        checks.push(Check::from_witness(
            "qtrs-after-beta",
            "q̃trs ∘ β̃ = id",
            witness,
        ));

        // point 1: [ϑ]₁[ϑ]₂ = ε(ϑ)1
        let mut witness = None;
        for t in 0..env.total_dim() {
            if env.degree_of(t) > cap {
                continue;
            }
            let mut prod = SparseVec::zero();
            let mut ok = true;
            for ((a, b), c) in qtrs.of_basis(t).iter() {
                match self.mul_basis(*a, *b) {
                    Ok(p) => prod.add_scaled(&p, c),
                    Err(Error::TruncationOverflow { .. }) => {
                        ok = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !ok {
                continue;
            }
            let expected = self.one().scaled(&env.counit_basis(t));
            if prod != expected {
                witness = Some(env.render(&SparseVec::unit(t)));
                break;
            }
        }
        checks.push(Check::from_witness(
            "qtrs-counit",
            "[ϑ]₁[ϑ]₂ = ε(ϑ)1",
            witness,
        ));

        // point 2: (id ⊗_B Δ_Ω) ∘ qtrs = (qtrs ⊗ id) ∘ Δ
        let et = env.total_dim();
        let mut witness = None;
        'c: for t in 0..env.total_dim() {
            let k = env.degree_of(t);
            if k > cap {
                continue;
            }
            // LHS triples (u, v', τ) fused as (u*T + v')*E + τ
            let mut lhs = SparseVec::zero();
            let mut representable = true;
            for ((u, v), c) in qtrs.of_basis(t).iter() {
                match self.coaction_basis(*v) {
                    Ok(cp) => {
                        for ((vp, tau), e) in cp.iter() {
                            lhs.add_term((u * self.total + vp) * et + tau, c * e);
                        }
                    }
                    Err(Error::TruncationOverflow { .. }) => {
                        representable = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !representable {
                continue;
            }
            let mut rhs = SparseVec::zero();
            for ((t1, t2), c) in env.coprod_basis(t)?.iter() {
                for ((u, v), e) in qtrs.of_basis(*t1).iter() {
                    rhs.add_term((u * self.total + v) * et + t2, c * e);
                }
            }
            // relations: balanced on the first two legs, Γ∧ leg rides along
            let mut diff = lhs;
            diff.sub(&rhs);
            if !self.triple_balanced_zero(&relations, &diff, et, k)? {
                witness = Some(env.render(&SparseVec::unit(t)));
                break 'c;
            }
        }
        checks.push(Check::from_witness(
            "qtrs-right-coaction",
            "(id⊗_BΔ_Ω)∘qtrs = (qtrs⊗id)∘Δ",
            witness,
        ));

        // point 3: (Δ_Ω ⊗_B id) ∘ qtrs = (σ ⊗_B id)(S ⊗ qtrs)Δ
        let mut witness = None;
        'd: for t in 0..env.total_dim() {
            let k = env.degree_of(t);
            if k > cap {
                continue;
            }
            // triples (u', τ, v) fused as (u'*E + τ)*T + v
            let mut lhs = SparseVec::zero();
            let mut representable = true;
            for ((u, v), c) in qtrs.of_basis(t).iter() {
                match self.coaction_basis(*u) {
                    Ok(cp) => {
                        for ((up, tau), e) in cp.iter() {
                            lhs.add_term((up * et + tau) * self.total + v, c * e);
                        }
                    }
                    Err(Error::TruncationOverflow { .. }) => {
                        representable = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !representable {
                continue;
            }
            let mut rhs = SparseVec::zero();
            for ((t1, t2), c) in env.coprod_basis(t)?.iter() {
                let s1 = env.antipode_basis(*t1)?;
                for (st, sc) in s1.iter() {
                    let ds = env.degree_of(*st);
                    for ((u, v), e) in qtrs.of_basis(*t2).iter() {
                        let du = self.degree_of(*u);
                        // σ(ϑ⊗w) = (−1)^{kl} w⊗ϑ
                        let sign = if (ds * du) % 2 == 0 {
                            Scalar::one()
                        } else {
                            Scalar::from_int(-1)
                        };
                        rhs.add_term((u * et + st) * self.total + v, &(&(c * sc) * e) * &sign);
                    }
                }
            }
            let mut diff = lhs;
            diff.sub(&rhs);
            if !self.mixed_triple_balanced_zero(&diff, et, k)? {
                witness = Some(env.render(&SparseVec::unit(t)));
                break 'd;
            }
        }
        checks.push(Check::from_witness(
            "qtrs-left-coaction",
            "(Δ_Ω⊗_Bid)∘qtrs = (σ⊗_Bid)(S⊗qtrs)Δ",
            witness,
        ));

        // point 4: μ·qtrs(ϑ) = (−1)^{lk} qtrs(ϑ)·μ
        let mut witness = None;
        'e: for t in 0..env.total_dim() {
            let l = env.degree_of(t);
            if l > cap {
                continue;
            }
            for mu_deg in 0..=(cap - l) {
                for mu in self.base_forms(mu_deg) {
                    let mut lhs = PairVec::zero();
                    let mut rhs = PairVec::zero();
                    let mut ok = true;
                    for ((a, b), c) in qtrs.of_basis(t).iter() {
                        match self.mul(mu, &SparseVec::unit(*a)) {
                            Ok(p) => {
                                for (x, xc) in p.iter() {
                                    lhs.add_term(*x, *b, c * xc);
                                }
                            }
                            Err(Error::TruncationOverflow { .. }) => ok = false,
                            Err(e) => return Err(e),
                        }
                        match self.mul(&SparseVec::unit(*b), mu) {
                            Ok(p) => {
                                for (x, xc) in p.iter() {
                                    rhs.add_term(*a, *x, c * xc);
                                }
                            }
                            Err(Error::TruncationOverflow { .. }) => ok = false,
                            Err(e) => return Err(e),
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let sign = if (l * mu_deg) % 2 == 0 {
                        Scalar::one()
                    } else {
                        Scalar::from_int(-1)
                    };
                    let mut rhs_signed = PairVec::zero();
                    rhs_signed.add_scaled(&rhs, &sign);
                    if !self.balanced_eq(&relations[l + mu_deg], &lhs, &rhs_signed) {
                        witness = Some(format!(
                            "(μ deg {mu_deg}, {})",
                            env.render(&SparseVec::unit(t))
                        ));
                        break 'e;
                    }
                }
            }
        }
        checks.push(Check::from_witness(
            "qtrs-base-commutation",
            "μ·qtrs(ϑ) = (−1)^{∂μ∂ϑ} qtrs(ϑ)·μ",
            witness,
        ));

        // qtrs ∘ d = d_⊗ ∘ qtrs on degrees 0 and 1
        let mut witness = None;
        'f: for t in 0..env.total_dim() {
            let k = env.degree_of(t);
            if k > 1 || k + 1 > cap {
                continue;
            }
            let dt = match env.d_basis(t) {
                Ok(v) => v,
                Err(Error::TruncationOverflow { .. }) => continue,
                Err(e) => return Err(e),
            };
            let lhs = qtrs.of(&dt);
            let mut rhs = PairVec::zero();
            let mut ok = true;
            for ((a, b), c) in qtrs.of_basis(t).iter() {
                match self.d_basis(*a) {
                    Ok(da) => {
                        for (x, xc) in da.iter() {
                            rhs.add_term(*x, *b, c * xc);
                        }
                    }
                    Err(Error::TruncationOverflow { .. }) => ok = false,
                    Err(e) => return Err(e),
                }
                let sign = if self.degree_of(*a) % 2 == 0 {
                    Scalar::one()
                } else {
                    Scalar::from_int(-1)
                };
                match self.d_basis(*b) {
                    Ok(db) => {
                        for (x, xc) in db.iter() {
                            rhs.add_term(*a, *x, &(c * xc) * &sign);
                        }
                    }
                    Err(Error::TruncationOverflow { .. }) => ok = false,
                    Err(e) => return Err(e),
                }
            }
            if !ok {
                continue;
            }
            if !self.balanced_eq(&relations[k + 1], &lhs, &rhs) {
                witness = Some(env.render(&SparseVec::unit(t)));
                break 'f;
            }
        }
        checks.push(Check::from_witness(
            "qtrs-commutes-d",
            "qtrs∘d = d_⊗∘qtrs",
            witness,
        ));

        Ok(checks)
    }

    /// `q̃trs(w ⊗ ϑ) = (w ⊗ 1)·qtrs(ϑ)`.
    pub fn qtrs_tilde(&self, qtrs: &TranslationMap, arg: &PairVec) -> Result<PairVec> {
        let mut out = PairVec::zero();
        for ((w, t), c) in arg.iter() {
            for ((a, b), e) in qtrs.of_basis(*t).iter() {
                let left = self.mul_basis(*w, *a)?;
                for (l, lc) in left.iter() {
                    out.add_term(*l, *b, &(c * e) * lc);
                }
            }
        }
        Ok(out)
    }

    /// Zero test in `(Ω ⊗_{Ω(B)} Ω) ⊗ Γ∧` for a fused triple element whose
    /// first two legs have total degree `n − ∂τ` and overall degree is `n`.
    fn triple_balanced_zero(
        &self,
        relations: &[Span],
        diff: &SparseVec,
        env_total: usize,
        n: usize,
    ) -> Result<bool> {
        // group terms by the Γ∧ leg and reduce each group by the balanced span
        let mut groups: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (idx, c) in diff.iter() {
            let tau = idx % env_total;
            let pair = idx / env_total;
            groups.entry(tau).or_default().add_term(pair, c.clone());
        }
        for (tau, v) in groups {
            let dtau = self.env.degree_of(tau);
            if dtau > n {
                return Ok(false);
            }
            if !relations[n - dtau].contains(&v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Zero test in `(Ω ⊗ Γ∧) ⊗_{Ω(B)} Ω` for fused triples `(u·E + τ)·T + v`
    /// of overall degree `n`. Relations: `(−1)^{∂τ∂μ}(uμ⊗τ⊗v) − (u⊗τ⊗μv)`.
    fn mixed_triple_balanced_zero(
        &self,
        diff: &SparseVec,
        env_total: usize,
        n: usize,
    ) -> Result<bool> {
        if diff.is_zero() {
            return Ok(true);
        }
        let t = self.total;
        let mut span = Span::new();
        for mu_deg in 0..=n.min(self.max_degree) {
            for mu in self.base_forms(mu_deg) {
                for u in 0..t {
                    let du = self.degree_of(u);
                    for tau in 0..env_total {
                        let dtau = self.env.degree_of(tau);
                        if du + dtau + mu_deg > n {
                            continue;
                        }
                        let v_deg = n - du - dtau - mu_deg;
                        if v_deg > self.max_degree {
                            continue;
                        }
                        let sign = if (dtau * mu_deg) % 2 == 0 {
                            Scalar::one()
                        } else {
                            Scalar::from_int(-1)
                        };
                        for v in self.degree_indices(v_deg) {
                            let mut rel = SparseVec::zero();
                            let mut ok = true;
                            match self.mul(&SparseVec::unit(u), mu) {
                                Ok(um) => {
                                    for (l, lc) in um.iter() {
                                        rel.add_term((l * env_total + tau) * t + v, lc * &sign);
                                    }
                                }
                                Err(Error::TruncationOverflow { .. }) => ok = false,
                                Err(e) => return Err(e),
                            }
                            match self.mul(mu, &SparseVec::unit(v)) {
                                Ok(mv) => {
                                    for (r, rc) in mv.iter() {
                                        rel.add_term((u * env_total + tau) * t + r, -rc.clone());
                                    }
                                }
                                Err(Error::TruncationOverflow { .. }) => ok = false,
                                Err(e) => return Err(e),
                            }
                            if ok {
                                span.insert(&rel);
                            }
                        }
                    }
                }
            }
        }
        Ok(span.contains(diff))
    }
}

// ---------------------------------------------------------------------------
// Ready-made bundle scenarios
// ---------------------------------------------------------------------------

/// The U(1) bundle over a point with the classical total calculus and the
/// trivial structure calculus (`R = Ker ε`, so `Γ∧ = H` and `d = 0` there).
pub fn u1_example(radius: i64, cap: usize) -> Result<BundleCalculus> {
    let qpb = Qpb::u1(radius)?;
    let h = qpb.hopf().clone();
    let ideal = crate::fodc::trivial_ideal(&h)?;
    let fodc = crate::fodc::Fodc::from_ideal(&h, ideal)?;
    let env = Envelope::new(fodc, cap.max(2))?;
    BundleCalculus::new(qpb, env, HorKind0::U1Form, cap)
}

/// A finite bundle with the universal structure calculus (`R = 0`).
pub fn finite_bundle_universal(qpb: Qpb, cap: usize) -> Result<BundleCalculus> {
    let h = qpb.hopf().clone();
    let fodc = crate::fodc::Fodc::from_ideal(&h, crate::fodc::universal_ideal())?;
    let env = Envelope::new(fodc, cap.max(2))?;
    BundleCalculus::new(qpb, env, HorKind0::Degree0, cap)
}

/// The regular bundle `X = G` under right translation.
pub fn regular_bundle(group: FiniteGroup) -> Result<Qpb> {
    let points: Vec<String> = group.labels().to_vec();
    let n = group.order();
    let action = (0..n)
        .map(|x| (0..n).map(|g| group.mul(x, g)).collect())
        .collect();
    Qpb::finite(points, group, action)
}

/// A disjoint union of `copies` regular orbits.
pub fn multi_orbit_bundle(group: FiniteGroup, copies: usize) -> Result<Qpb> {
    let n = group.order();
    let mut points = Vec::new();
    for c in 0..copies {
        for g in 0..n {
            points.push(format!("{}@{}", group.label(g), c));
        }
    }
    let action = (0..copies * n)
        .map(|x| {
            let (c, g0) = (x / n, x % n);
            (0..n).map(|g| c * n + group.mul(g0, g)).collect()
        })
        .collect();
    Qpb::finite(points, group, action)
}

/// The character corepresentations of the Laurent algebra, one per window
/// exponent.
pub fn u1_characters(h: &HopfAlgebra) -> Result<Vec<Corepresentation>> {
    let radius = h
        .laurent_radius()
        .ok_or_else(|| Error::UnsupportedGroup("u1_characters expects Laurent".into()))?;
    let mut out = Vec::new();
    for n in -radius..=radius {
        out.push(Corepresentation::from_parts(
            format!("chi{n}"),
            1,
            vec![SparseVec::unit(h.monomial(n)?)],
            Matrix::identity(1),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fodc;

    #[test]
    fn regular_z2_bundle_has_point_base() {
        let q = regular_bundle(FiniteGroup::cyclic(2)).unwrap();
        assert_eq!(q.base_basis().len(), 1);
        assert!(q.beta_surjective().unwrap());
    }

    #[test]
    fn two_orbit_bundle_has_two_dimensional_base() {
        let q = multi_orbit_bundle(FiniteGroup::cyclic(2), 2).unwrap();
        assert_eq!(q.base_basis().len(), 2);
        assert!(q.beta_surjective().unwrap());
    }

    #[test]
    fn action_with_fixed_point_is_rejected() {
        // trivial action of Z2 on one point: s fixes it
        let g = FiniteGroup::cyclic(2);
        let res = Qpb::finite(vec!["p".into()], g, vec![vec![0, 0]]);
        assert!(matches!(res, Err(Error::NotFree(_))));
    }

    #[test]
    fn u1_example_reproduces_base_form_structure() {
        let calc = u1_example(5, 2).unwrap();
        // degree-0 base = C·1
        assert_eq!(calc.base_forms(0).len(), 1);
        // Ω¹(B) is one-dimensional, spanned by ζ
        let b1 = calc.base_forms(1);
        assert_eq!(b1.len(), 1);
        // dB = 0
        for b in calc.base_forms(0) {
            assert!(calc.d(b).unwrap().is_zero());
        }
        // yet Ω¹(B) ≠ 0: base forms are not generated by the base
        assert!(!b1[0].is_zero());
        // no forms above degree 1 on this bundle
        assert_eq!(calc.degree_dim(2), 0);
        // every 1-form is horizontal: the structure calculus is trivial
        assert_eq!(calc.horizontal_forms(1).unwrap().len(), calc.degree_dim(1));
        for c in calc.verify_form_subalgebras().unwrap() {
            assert!(c.passed, "{}: {:?}", c.name, c.witness);
        }
    }

    #[test]
    fn z2_regular_calculus_dimensions_and_laws() {
        let q = regular_bundle(FiniteGroup::cyclic(2)).unwrap();
        let calc = finite_bundle_universal(q, 2).unwrap();
        assert_eq!(calc.degree_dim(0), 2);
        assert_eq!(calc.degree_dim(1), 2);
        assert_eq!(calc.degree_dim(2), 2);
        for c in calc.verify_form_subalgebras().unwrap() {
            assert!(c.passed, "{}: {:?}", c.name, c.witness);
        }
        // base: degree 0 is C·1 (single orbit)
        assert_eq!(calc.base_forms(0).len(), 1);
    }

    #[test]
    fn intertwiners_on_finite_bundles() {
        // trivial corepresentation: the unit itself
        let q = regular_bundle(FiniteGroup::cyclic(2)).unwrap();
        let h = q.hopf().clone();
        let reps = crate::hopf::decompose_regular(&h).unwrap();
        for rep in &reps {
            let fam = build_intertwiners(&q, rep).unwrap();
            assert!(fam.normalized);
            assert_eq!(fam.family_size, rep.dim);
        }
        // sign corepresentation: x∗x = 1 with x = δ_e − δ_s
        let sign = &reps[1];
        let fam = build_intertwiners(&q, sign).unwrap();
        let x = fam.value(0, 0);
        let sq = q.mul_p(&q.star_p(x), x).unwrap();
        assert_eq!(sq, q.one_p());

        // two orbits: family of size 2, relation sums over both indicators
        let q2 = multi_orbit_bundle(FiniteGroup::cyclic(2), 2).unwrap();
        let fam2 = build_intertwiners(&q2, sign).unwrap();
        assert_eq!(fam2.family_size, 2);
    }

    #[test]
    fn s3_gram_twisted_family() {
        let q = regular_bundle(FiniteGroup::s3()).unwrap();
        let h = q.hopf().clone();
        let reps = crate::hopf::decompose_regular(&h).unwrap();
        let std2 = reps.iter().find(|r| r.dim == 2).unwrap();
        let fam = build_intertwiners(&q, std2).unwrap();
        // three rows, gram-twisted relation (verified inside the builder)
        assert_eq!(fam.family_size, 3);
        assert!(!fam.normalized);
    }

    #[test]
    fn u1_translation_values() {
        let calc = u1_example(5, 2).unwrap();
        let h = calc.qpb().hopf().clone();
        let fams: Vec<IntertwinerFamily> = u1_characters(&h)
            .unwrap()
            .iter()
            .map(|c| build_intertwiners(calc.qpb(), c).unwrap())
            .collect();
        let deg0 = calc.qtrs0(&fams).unwrap();
        // qtrs(1) = 1⊗1
        let one_idx = h.monomial(0).unwrap();
        let mut expected = PairVec::zero();
        for (p, x) in calc.one().iter() {
            for (q, y) in calc.one().iter() {
                expected.add_term(*p, *q, x * y);
            }
        }
        assert_eq!(deg0[one_idx], expected);
        // qtrs(z) = z⁻¹ ⊗ z  (= S(z⁽¹⁾)⊗z⁽²⁾ for the group-like z)
        let z = h.monomial(1).unwrap();
        let zm = h.monomial(-1).unwrap();
        let mut expected = PairVec::zero();
        expected.add_term(calc.flat(0, zm, 0, 0), calc.flat(0, z, 0, 0), Scalar::one());
        assert_eq!(deg0[z], expected);
    }

    #[test]
    fn z2_regular_translation_values() {
        let q = regular_bundle(FiniteGroup::cyclic(2)).unwrap();
        let calc = finite_bundle_universal(q, 2).unwrap();
        let h = calc.qpb().hopf().clone();
        let reps = crate::hopf::decompose_regular(&h).unwrap();
        let fams: Vec<IntertwinerFamily> = reps
            .iter()
            .map(|c| build_intertwiners(calc.qpb(), c).unwrap())
            .collect();
        let deg0 = calc.qtrs0(&fams).unwrap();
        // sign character χ = δ_e − δ_s has qtrs(χ) = χ⊗χ
        let chi = SparseVec::from_terms([(0, Scalar::one()), (1, Scalar::from_int(-1))]);
        let mut expected = PairVec::zero();
        for (p, x) in calc.embed_p(&chi).iter() {
            for (qq, y) in calc.embed_p(&chi).iter() {
                expected.add_term(*p, *qq, x * y);
            }
        }
        // qtrs(χ) = qtrs(δ_e) − qtrs(δ_s)
        let mut actual = deg0[0].clone();
        actual.sub(&deg0[1]);
        assert_eq!(actual, expected);
    }

    #[test]
    fn z2_regular_qtrs_properties_hold() {
        let q = regular_bundle(FiniteGroup::cyclic(2)).unwrap();
        let calc = finite_bundle_universal(q, 2).unwrap();
        let h = calc.qpb().hopf().clone();
        let reps = crate::hopf::decompose_regular(&h).unwrap();
        let fams: Vec<IntertwinerFamily> = reps
            .iter()
            .map(|c| build_intertwiners(calc.qpb(), c).unwrap())
            .collect();
        let omega = Connection::canonical(&calc).unwrap();
        let qtrs = calc.translation_map(&fams, &omega).unwrap();
        for c in calc.verify_qtrs_properties(&qtrs).unwrap() {
            assert!(c.passed, "{}: {:?}", c.name, c.witness);
        }
    }

    #[test]
    fn u1_qtrs_properties_hold() {
        let calc = u1_example(4, 2).unwrap();
        let h = calc.qpb().hopf().clone();
        let fams: Vec<IntertwinerFamily> = u1_characters(&h)
            .unwrap()
            .iter()
            .map(|c| build_intertwiners(calc.qpb(), c).unwrap())
            .collect();
        let omega = Connection::canonical(&calc).unwrap();
        let qtrs = calc.translation_map(&fams, &omega).unwrap();
        for c in calc.verify_qtrs_properties(&qtrs).unwrap() {
            assert!(c.passed, "{}: {:?}", c.name, c.witness);
        }
    }

    #[test]
    fn fixed_points_match_orbit_indicators() {
        let q = multi_orbit_bundle(FiniteGroup::s3(), 2).unwrap();
        let fixed = q.fixed_point_basis();
        assert_eq!(fixed.len(), 2);
        let declared = Span::from_vectors(q.base_basis().iter());
        for v in &fixed {
            assert!(declared.contains(v));
        }
        let _ = fodc::universal_ideal();
    }
}
