//! Exact finite-dimensional linear algebra: spans, kernels, quotients.
//!
//! Vectors are sparse maps from basis index to [`Scalar`]; spans keep a fully
//! reduced echelon form with the pivot chosen at the first nonzero entry in
//! label order, so every computed basis is canonical for the subspace and
//! identical inputs always produce bit-identical outputs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::scalar::Scalar;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Vector spaces
// ---------------------------------------------------------------------------

struct SpaceInner {
    name: String,
    labels: Vec<String>,
}

/// A finite-dimensional space with a fixed ordered basis of labelled vectors.
#[derive(Clone)]
pub struct VectorSpace {
    inner: Arc<SpaceInner>,
}

impl VectorSpace {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Self {
        let name = name.into();
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            assert!(
                seen.insert(l.clone()),
                "duplicate basis label {l} in {name}"
            );
        }
        VectorSpace {
            inner: Arc::new(SpaceInner { name, labels }),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.labels.len()
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn label(&self, i: usize) -> &str {
        &self.inner.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    /// Tensor product space, with labels `a⊗b` in row-major order.
    pub fn tensor(&self, other: &VectorSpace) -> VectorSpace {
        let mut labels = Vec::with_capacity(self.dim() * other.dim());
        for a in self.labels() {
            for b in other.labels() {
                labels.push(format!("{a}⊗{b}"));
            }
        }
        VectorSpace::new(format!("{}⊗{}", self.name(), other.name()), labels)
    }

    /// Index of `(i, j)` in `self ⊗ other`.
    pub fn pair_index(&self, other: &VectorSpace, i: usize, j: usize) -> usize {
        i * other.dim() + j
    }

    pub fn same_space(&self, other: &VectorSpace) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    /// Renders a sparse vector in this space's basis, e.g. `δ_e - 2i·δ_s`.
    pub fn render(&self, v: &SparseVec) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, c) in v.iter() {
            if !out.is_empty() {
                out.push_str(" + ");
            }
            if c.is_one() {
                out.push_str(self.label(*idx));
            } else {
                out.push_str(&format!("({})·{}", c, self.label(*idx)));
            }
        }
        out
    }
}

impl fmt::Debug for VectorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorSpace({}, dim {})", self.name(), self.dim())
    }
}

// ---------------------------------------------------------------------------
// Sparse vectors
// ---------------------------------------------------------------------------

/// Sparse exact vector: a finite map from basis index to nonzero scalar.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SparseVec {
    terms: BTreeMap<usize, Scalar>,
}

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec::default()
    }

    pub fn unit(i: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(i, Scalar::one());
        SparseVec { terms }
    }

    pub fn single(i: usize, c: Scalar) -> Self {
        let mut v = SparseVec::zero();
        v.add_term(i, c);
        v
    }

    pub fn from_terms(it: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut v = SparseVec::zero();
        for (i, c) in it {
            v.add_term(i, c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &Scalar)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().copied()
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.terms.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    /// First (smallest-index) nonzero entry.
    pub fn leading(&self) -> Option<(usize, &Scalar)> {
        self.terms.iter().next().map(|(i, c)| (*i, c))
    }

    pub fn add_term(&mut self, i: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(i) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SparseVec, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (i, x) in other.iter() {
            self.add_term(*i, c * x);
        }
    }

    pub fn add(&mut self, other: &SparseVec) {
        for (i, x) in other.iter() {
            self.add_term(*i, x.clone());
        }
    }

    pub fn sub(&mut self, other: &SparseVec) {
        for (i, x) in other.iter() {
            self.add_term(*i, -x.clone());
        }
    }

    pub fn scaled(&self, c: &Scalar) -> SparseVec {
        let mut v = SparseVec::zero();
        v.add_scaled(self, c);
        v
    }

    pub fn negated(&self) -> SparseVec {
        self.scaled(&Scalar::from_int(-1))
    }

    /// Entrywise complex conjugation.
    pub fn conj(&self) -> SparseVec {
        SparseVec {
            terms: self.terms.iter().map(|(i, c)| (*i, c.conj())).collect(),
        }
    }

    /// Reindexes every term, dropping terms mapped to `None`.
    pub fn map_indices(&self, f: impl Fn(usize) -> Option<usize>) -> SparseVec {
        let mut v = SparseVec::zero();
        for (i, c) in self.iter() {
            if let Some(j) = f(*i) {
                v.add_term(j, c.clone());
            }
        }
        v
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); dim];
        for (i, c) in self.iter() {
            out[*i] = c.clone();
        }
        out
    }

    pub fn from_dense(coeffs: &[Scalar]) -> SparseVec {
        SparseVec::from_terms(
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone())),
        )
    }
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.iter().map(|(i, c)| format!("{c}·e{i}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// Sparse tensor elements
// ---------------------------------------------------------------------------

/// Sparse element of a tensor product of two indexed spaces.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct PairVec {
    terms: BTreeMap<(usize, usize), Scalar>,
}

impl PairVec {
    pub fn zero() -> Self {
        PairVec::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((i, j)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &PairVec, c: &Scalar) {
        for ((i, j), x) in other.iter() {
            self.add_term(*i, *j, c * x);
        }
    }

    pub fn sub(&mut self, other: &PairVec) {
        self.add_scaled(other, &Scalar::from_int(-1));
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.terms.iter()
    }

    /// `a ⊗ b`, scaled.
    pub fn outer(a: &SparseVec, b: &SparseVec, c: &Scalar) -> PairVec {
        let mut out = PairVec::zero();
        for (i, x) in a.iter() {
            let cx = c * x;
            for (j, y) in b.iter() {
                out.add_term(*i, *j, &cx * y);
            }
        }
        out
    }

    /// Applies a linear substitution to the left leg.
    pub fn map_left(&self, f: impl Fn(usize) -> SparseVec) -> PairVec {
        let mut out = PairVec::zero();
        for ((i, j), c) in self.iter() {
            for (k, x) in f(*i).iter() {
                out.add_term(*k, *j, c * x);
            }
        }
        out
    }

    /// Applies a linear substitution to the right leg.
    pub fn map_right(&self, f: impl Fn(usize) -> SparseVec) -> PairVec {
        let mut out = PairVec::zero();
        for ((i, j), c) in self.iter() {
            for (k, x) in f(*j).iter() {
                out.add_term(*i, *k, c * x);
            }
        }
        out
    }

    /// Contracts both legs with a bilinear product, summing the images.
    pub fn contract(
        &self,
        mut f: impl FnMut(usize, usize) -> crate::Result<SparseVec>,
    ) -> crate::Result<SparseVec> {
        let mut out = SparseVec::zero();
        for ((i, j), c) in self.iter() {
            out.add_scaled(&f(*i, *j)?, c);
        }
        Ok(out)
    }

    /// Groups terms by right-leg index: returns `j -> Σ c·e_i`.
    pub fn collect_by_right(&self) -> BTreeMap<usize, SparseVec> {
        let mut out: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for ((i, j), c) in self.iter() {
            out.entry(*j).or_default().add_term(*i, c.clone());
        }
        out
    }

    /// Flattens to a [`SparseVec`] over the fused index `i * right_dim + j`.
    pub fn fuse(&self, right_dim: usize) -> SparseVec {
        SparseVec::from_terms(
            self.iter()
                .map(|((i, j), c)| (i * right_dim + j, c.clone())),
        )
    }

    pub fn conj(&self) -> PairVec {
        PairVec {
            terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect(),
        }
    }
}

/// Sparse element of a triple tensor product.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct TripleVec {
    terms: BTreeMap<(usize, usize, usize), Scalar>,
}

impl TripleVec {
    pub fn zero() -> Self {
        TripleVec::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, i: usize, j: usize, k: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((i, j, k)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Scalar)> {
        self.terms.iter()
    }
}

// ---------------------------------------------------------------------------
// Spans: incremental reduced echelon forms
// ---------------------------------------------------------------------------

/// A subspace kept in reduced row-echelon form.
///
/// Rows are keyed by pivot index; each pivot column occurs in exactly one row
/// with coefficient 1, so reduction against a `Span` is a single pass and the
/// row set is the canonical reduced basis of the subspace.
#[derive(Clone, Default)]
pub struct Span {
    rows: BTreeMap<usize, SparseVec>,
}

impl Span {
    pub fn new() -> Self {
        Span::default()
    }

    pub fn from_vectors<'a>(vs: impl IntoIterator<Item = &'a SparseVec>) -> Self {
        let mut s = Span::new();
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// The canonical reduced basis, in pivot order.
    pub fn basis(&self) -> Vec<SparseVec> {
        self.rows.values().cloned().collect()
    }

    /// Residual of `v` after eliminating every pivot of the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut r = v.clone();
        loop {
            let hit = r
                .iter()
                .find(|(i, _)| self.rows.contains_key(i))
                .map(|(i, c)| (*i, c.clone()));
            match hit {
                Some((p, c)) => {
                    let row = &self.rows[&p];
                    r.add_scaled(row, &-c);
                }
                None => break,
            }
        }
        r
    }

    /// Reduction that also records the eliminated pivot coefficients.
    pub fn reduce_with_coords(&self, v: &SparseVec) -> (SparseVec, BTreeMap<usize, Scalar>) {
        let mut r = v.clone();
        let mut coords = BTreeMap::new();
        loop {
            let hit = r
                .iter()
                .find(|(i, _)| self.rows.contains_key(i))
                .map(|(i, c)| (*i, c.clone()));
            match hit {
                Some((p, c)) => {
                    let row = &self.rows[&p];
                    r.add_scaled(row, &-c.clone());
                    coords.insert(p, c);
                }
                None => break,
            }
        }
        (r, coords)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns `true` when the span grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let mut r = self.reduce(v);
        match r.leading() {
            None => false,
            Some((p, c)) => {
                let inv = c.inv();
                r = r.scaled(&inv);
                // keep the form fully reduced: clear column p from older rows
                let fixups: Vec<(usize, Scalar)> = self
                    .rows
                    .iter()
                    .filter_map(|(q, row)| {
                        let c = row.get(p);
                        (!c.is_zero()).then(|| (*q, c))
                    })
                    .collect();
                for (q, c) in fixups {
                    let row = self.rows.get_mut(&q).unwrap();
                    row.add_scaled(&r, &-c);
                }
                self.rows.insert(p, r);
                true
            }
        }
    }
}

/// Echelonizes `vectors`: returns the span together with the coordinates of
/// each admissible vector in the canonical reduced basis.
///
/// The coordinate function is total on the span and errors on anything
/// outside it.
pub fn span_and_reduce(vectors: &[SparseVec]) -> Span {
    Span::from_vectors(vectors)
}

impl Span {
    /// Coordinates of `v` in the canonical reduced basis (pivot order).
    pub fn coordinates(&self, v: &SparseVec) -> Result<Vec<Scalar>> {
        let (r, coords) = self.reduce_with_coords(v);
        if !r.is_zero() {
            return Err(Error::NotInSpan(format!("{v:?}")));
        }
        Ok(self
            .rows
            .keys()
            .map(|p| coords.get(p).cloned().unwrap_or_else(Scalar::zero))
            .collect())
    }
}

// ---------------------------------------------------------------------------
// Dense matrices (small systems only)
// ---------------------------------------------------------------------------

/// Dense exact matrix, used for the small solve/kernel computations.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                *m.at_mut(r, c) = f(r, c);
            }
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, pr);
            let inv = self.at(row, col).inv();
            for c in col..self.cols {
                let v = self.at(row, c) * &inv;
                *self.at_mut(row, c) = v;
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let factor = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = self.at(r, c).clone() - self.at(row, c) * &factor;
                        *self.at_mut(r, c) = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the null space.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_row: BTreeMap<usize, usize> =
            pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_row.contains_key(&free) {
                continue;
            }
            let mut v = SparseVec::unit(free);
            for (&pc, &pr) in &pivot_row {
                let c = m.at(pr, free).clone();
                if !c.is_zero() {
                    v.add_term(pc, -c);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// One exact solution of `self * x = b`, if any.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, self.cols) = b[r].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(r, self.cols).clone();
        }
        Some(x)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// Linear maps
// ---------------------------------------------------------------------------

/// A linear map stored by columns (images of the domain basis vectors).
#[derive(Clone)]
pub struct LinearMap {
    pub domain: VectorSpace,
    pub codomain: VectorSpace,
    cols: Vec<SparseVec>,
}

impl LinearMap {
    pub fn from_columns(domain: VectorSpace, codomain: VectorSpace, cols: Vec<SparseVec>) -> Self {
        assert_eq!(cols.len(), domain.dim(), "column count mismatch");
        LinearMap {
            domain,
            codomain,
            cols,
        }
    }

    pub fn from_fn(
        domain: VectorSpace,
        codomain: VectorSpace,
        f: impl Fn(usize) -> SparseVec,
    ) -> Self {
        let cols = (0..domain.dim()).map(f).collect();
        LinearMap::from_columns(domain, codomain, cols)
    }

    pub fn identity(space: &VectorSpace) -> Self {
        LinearMap::from_fn(space.clone(), space.clone(), SparseVec::unit)
    }

    pub fn zero(domain: VectorSpace, codomain: VectorSpace) -> Self {
        LinearMap::from_fn(domain, codomain, |_| SparseVec::zero())
    }

    pub fn column(&self, i: usize) -> &SparseVec {
        &self.cols[i]
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (i, c) in v.iter() {
            out.add_scaled(&self.cols[*i], c);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        assert!(
            other.codomain.same_space(&self.domain),
            "composition domain mismatch"
        );
        LinearMap::from_fn(other.domain.clone(), self.codomain.clone(), |i| {
            self.apply(other.column(i))
        })
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.codomain.dim(), self.domain.dim());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, c) in col.iter() {
                *m.at_mut(*i, j) = c.clone();
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        Span::from_vectors(self.cols.iter()).rank()
    }

    /// Basis of `Ker f`, canonical for the stored basis order.
    pub fn kernel(&self) -> Vec<SparseVec> {
        self.to_matrix().kernel_basis()
    }

    pub fn equals(&self, other: &LinearMap) -> bool {
        self.cols == other.cols
    }
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LinearMap({} -> {})",
            self.domain.name(),
            self.codomain.name()
        )
    }
}

// ---------------------------------------------------------------------------
// Quotients
// ---------------------------------------------------------------------------

/// A quotient `V / span(sub)` with a canonical coset basis.
///
/// The coset basis is indexed by the non-pivot columns of the reduced echelon
/// form of the subspace, so each quotient basis vector lifts to the matching
/// unit coset representative in `V`.
#[derive(Clone)]
pub struct Quotient {
    pub ambient: VectorSpace,
    pub space: VectorSpace,
    sub: Span,
    /// ambient index of the representative of each quotient basis vector
    reps: Vec<usize>,
    rep_pos: BTreeMap<usize, usize>,
}

impl Quotient {
    pub fn new(
        ambient: VectorSpace,
        sub_vectors: &[SparseVec],
        name: impl Into<String>,
    ) -> Result<Self> {
        for v in sub_vectors {
            if let Some(i) = v.support().max() {
                if i >= ambient.dim() {
                    return Err(Error::DimensionMismatch(format!(
                        "subspace vector touches index {i} outside {}",
                        ambient.name()
                    )));
                }
            }
        }
        let sub = Span::from_vectors(sub_vectors.iter());
        let pivots: std::collections::BTreeSet<usize> = sub.pivots().collect();
        let reps: Vec<usize> = (0..ambient.dim()).filter(|i| !pivots.contains(i)).collect();
        let rep_pos: BTreeMap<usize, usize> =
            reps.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let labels = reps
            .iter()
            .map(|&i| format!("[{}]", ambient.label(i)))
            .collect();
        let space = VectorSpace::new(name, labels);
        Ok(Quotient {
            ambient,
            space,
            sub,
            reps,
            rep_pos,
        })
    }

    pub fn sub_rank(&self) -> usize {
        self.sub.rank()
    }

    pub fn sub_span(&self) -> &Span {
        &self.sub
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Projection `V -> V/sub` in quotient coordinates.
    pub fn project(&self, v: &SparseVec) -> SparseVec {
        let r = self.sub.reduce(v);
        r.map_indices(|i| self.rep_pos.get(&i).copied())
    }

    /// The canonical coset representative of a quotient element.
    pub fn lift(&self, q: &SparseVec) -> SparseVec {
        q.map_indices(|i| Some(self.reps[i]))
    }

    pub fn projection_map(&self) -> LinearMap {
        LinearMap::from_fn(self.ambient.clone(), self.space.clone(), |i| {
            self.project(&SparseVec::unit(i))
        })
    }

    pub fn contains_in_sub(&self, v: &SparseVec) -> bool {
        self.sub.contains(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sc(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn space(n: usize) -> VectorSpace {
        VectorSpace::new("V", (0..n).map(|i| format!("e{i}")).collect())
    }

    #[test]
    fn span_of_standard_basis_has_full_rank() {
        let vs = [SparseVec::unit(0), SparseVec::unit(1)];
        assert_eq!(span_and_reduce(&vs).rank(), 2);
    }

    #[test]
    fn collinear_vectors_span_a_line() {
        let a = SparseVec::from_terms([(0, sc(1)), (1, sc(1))]);
        let b = SparseVec::from_terms([(0, sc(2)), (1, sc(2))]);
        assert_eq!(span_and_reduce(&[a, b]).rank(), 1);
    }

    #[test]
    fn complex_multiple_is_detected() {
        // (1, i) and (i, -1): the second is i times the first.
        let a = SparseVec::from_terms([(0, sc(1)), (1, Scalar::i())]);
        let b = SparseVec::from_terms([(0, Scalar::i()), (1, sc(-1))]);
        // independent oracle: b - i*a must vanish
        let mut diff = b.clone();
        diff.add_scaled(&a, &-Scalar::i());
        assert!(diff.is_zero());
        assert_eq!(span_and_reduce(&[a, b]).rank(), 1);
    }

    #[test]
    fn span_results_are_bit_identical_across_calls() {
        let vs = [
            SparseVec::from_terms([(0, sc(2)), (1, sc(3)), (3, sc(-1))]),
            SparseVec::from_terms([(1, sc(5)), (2, sc(7))]),
        ];
        let a = span_and_reduce(&vs);
        let b = span_and_reduce(&vs);
        assert_eq!(a.basis(), b.basis());
    }

    #[test]
    fn coordinates_are_exact_and_total_on_span() {
        let a = SparseVec::from_terms([(0, sc(1)), (1, sc(1))]);
        let b = SparseVec::from_terms([(1, sc(1)), (2, sc(1))]);
        let span = span_and_reduce(&[a.clone(), b.clone()]);
        let mut v = a.clone();
        v.add_scaled(&b, &sc(3));
        let coords = span.coordinates(&v).unwrap();
        // reconstruct from the canonical basis
        let basis = span.basis();
        let mut w = SparseVec::zero();
        for (c, bv) in coords.iter().zip(&basis) {
            w.add_scaled(bv, c);
        }
        assert_eq!(w, v);
        assert!(span.coordinates(&SparseVec::unit(3)).is_err());
    }

    #[test]
    fn quotient_by_nothing_is_identity() {
        let v = space(3);
        let q = Quotient::new(v, &[], "Q").unwrap();
        assert_eq!(q.dim(), 3);
        let x = SparseVec::from_terms([(0, sc(2)), (2, sc(5))]);
        assert_eq!(q.lift(&q.project(&x)), x);
    }

    #[test]
    fn quotient_of_c3_by_two_planes_vector() {
        // quotient(C^3, {(1,1,0),(0,1,1)}) is 1-dimensional and (1,0,0)
        // projects to something nonzero.
        let v = space(3);
        let s1 = SparseVec::from_terms([(0, sc(1)), (1, sc(1))]);
        let s2 = SparseVec::from_terms([(1, sc(1)), (2, sc(1))]);
        // oracle: rank of the subspace
        assert_eq!(span_and_reduce(&[s1.clone(), s2.clone()]).rank(), 2);
        let q = Quotient::new(v, &[s1, s2], "Q").unwrap();
        assert_eq!(q.dim(), 1);
        assert!(!q.project(&SparseVec::unit(0)).is_zero());
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        let v = space(2);
        assert!(LinearMap::identity(&v).kernel().is_empty());
        let z = LinearMap::zero(v.clone(), v);
        assert_eq!(z.kernel().len(), 2);
    }

    #[test]
    fn solve_simple_system() {
        let m = Matrix::from_fn(2, 2, |r, c| sc([[2, 1], [1, 3]][r][c]));
        let b = [sc(5), sc(10)];
        let x = m.solve(&b).unwrap();
        assert_eq!(x, vec![sc(1), sc(3)]);
        let inconsistent = Matrix::from_fn(2, 1, |r, _| sc([1, 1][r]));
        assert!(inconsistent.solve(&[sc(0), sc(1)]).is_none());
    }

    fn arb_vec(dim: usize) -> impl Strategy<Value = SparseVec> {
        proptest::collection::vec(-4i64..=4, dim).prop_map(|cs| {
            SparseVec::from_terms(cs.into_iter().enumerate().map(|(i, c)| (i, sc(c))))
        })
    }

    proptest! {
        // rank(A) + dim ker(A) = number of columns
        #[test]
        fn rank_nullity(cols in proptest::collection::vec(arb_vec(4), 1..6)) {
            let dom = space(cols.len());
            let cod = space(4);
            let m = LinearMap::from_columns(dom, cod, cols);
            prop_assert_eq!(m.rank() + m.kernel().len(), m.domain.dim());
        }

        // projecting a canonical representative is idempotent
        #[test]
        fn quotient_projection_idempotent(subs in proptest::collection::vec(arb_vec(5), 0..4),
                                          v in arb_vec(5)) {
            let q = Quotient::new(space(5), &subs, "Q").unwrap();
            let p = q.project(&v);
            prop_assert_eq!(q.project(&q.lift(&p)), p);
        }

        // reduction by a span leaves the class unchanged
        #[test]
        fn span_reduce_fixpoint(subs in proptest::collection::vec(arb_vec(5), 1..4), v in arb_vec(5)) {
            let span = Span::from_vectors(subs.iter());
            let r = span.reduce(&v);
            let mut diff = v.clone();
            diff.sub(&r);
            prop_assert!(span.contains(&diff));
            prop_assert_eq!(span.reduce(&r), r);
        }
    }
}
