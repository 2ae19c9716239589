//! Convolution-invertible maps and covariant module automorphisms.
//!
//! A gauge map is a graded linear map `f : Γ∧ → Ω•(P)` with `f(1) = 1` and
//! `(f⊗id)∘Ad = Δ_Ω∘f`; these form a group under the convolution product
//! `f₁∗f₂ = m_Ω∘(f₁⊗f₂)∘Δ`. The mirror picture is the group of graded left
//! `Ω(B)`-module automorphisms `F` with `F(1) = 1` and
//! `(F⊗id)∘Δ_Ω = Δ_Ω∘F`, with the product `(F₁∘F₂)(w) = F₂(F₁(w))`. The two
//! pictures are exchanged by
//!
//! ```text
//! F_f = m∘(id⊗f)∘Δ_Ω          f_F = m∘(id⊗_B F)∘qtrs
//! ```
//!
//! and this module verifies the exchange is a group isomorphism on seeded
//! exact samples.

use std::fmt;

use crate::bundle::{BundleCalculus, TranslationMap};
use crate::linalg::{Matrix, PairVec, SparseVec};
use crate::report::Check;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Deterministic pseudo-random stream for exact sample generation
/// (SplitMix64; identical seeds give identical samples on every platform).
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// A small exact rational in `[-3/2, 3/2]`-ish range.
    pub fn small_rational(&mut self) -> Scalar {
        let num = (self.next_u64() % 7) as i64 - 3;
        let den = (self.next_u64() % 2) as i64 + 1;
        Scalar::from_ratio(num, den)
    }
}

/// A graded linear map `Γ∧ → Ω•(P)`, tabulated on the flat basis.
#[derive(Clone, PartialEq, Eq)]
pub struct ConvolutionMap {
    values: Vec<SparseVec>,
}

impl ConvolutionMap {
    pub fn from_values(values: Vec<SparseVec>) -> Self {
        ConvolutionMap { values }
    }

    pub fn value(&self, t: usize) -> &SparseVec {
        &self.values[t]
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (t, c) in v.iter() {
            out.add_scaled(&self.values[*t], c);
        }
        out
    }

    /// The convolution unit `1ε`.
    pub fn unit_counit(calc: &BundleCalculus) -> Self {
        let env = calc.envelope();
        let one = calc.one();
        let values = (0..env.total_dim())
            .map(|t| one.scaled(&env.counit_basis(t)))
            .collect();
        ConvolutionMap { values }
    }

    /// Verifies `f(1) = 1` and the covariance law `(f⊗id)∘Ad = Δ_Ω∘f`.
    pub fn check_covariance(&self, calc: &BundleCalculus) -> Result<Option<String>> {
        let env = calc.envelope();
        if self.apply(&env.unit()) != calc.one() {
            return Ok(Some("f(1) ≠ 1".into()));
        }
        for t in 0..env.total_dim() {
            let lhs = match calc.coaction(&self.values[t]) {
                Ok(x) => x,
                Err(Error::TruncationOverflow { .. }) => continue,
                Err(e) => return Err(e),
            };
            let mut rhs = PairVec::zero();
            match env.extended_ad(&SparseVec::unit(t)) {
                Ok(ad) => {
                    for ((t1, t2), c) in ad.iter() {
                        for (p, x) in self.values[*t1].iter() {
                            rhs.add_term(*p, *t2, c * x);
                        }
                    }
                }
                Err(Error::TruncationOverflow { .. }) => continue,
                Err(e) => return Err(e),
            }
            if lhs != rhs {
                return Ok(Some(env.render(&SparseVec::unit(t))));
            }
        }
        Ok(None)
    }
}

impl fmt::Debug for ConvolutionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConvolutionMap({} basis values)", self.values.len())
    }
}

/// `f₁ ∗ f₂ = m_Ω ∘ (f₁⊗f₂) ∘ Δ`.
pub fn convolve(
    calc: &BundleCalculus,
    f1: &ConvolutionMap,
    f2: &ConvolutionMap,
) -> Result<ConvolutionMap> {
    let env = calc.envelope();
    let mut values = Vec::with_capacity(env.total_dim());
    for t in 0..env.total_dim() {
        let mut out = SparseVec::zero();
        for ((t1, t2), c) in env.coprod_basis(t)?.iter() {
            let prod = calc.mul(f1.value(*t1), f2.value(*t2))?;
            out.add_scaled(&prod, c);
        }
        values.push(out);
    }
    Ok(ConvolutionMap { values })
}

/// Solves `f ∗ g = g ∗ f = 1ε` degree by degree. Fails with
/// [`Error::NotConvolutionInvertible`] when the linear system of some degree
/// has no solution.
pub fn convolution_inverse(calc: &BundleCalculus, f: &ConvolutionMap) -> Result<ConvolutionMap> {
    let env = calc.envelope();
    let cap = calc.max_degree().min(env.max_degree());
    let mut values: Vec<Option<SparseVec>> = vec![None; env.total_dim()];
    for k in 0..=cap {
        // unknowns: coordinates of g on degree-k basis elements
        let t_basis: Vec<usize> = (0..env.total_dim())
            .filter(|&t| env.degree_of(t) == k)
            .collect();
        let omega_basis: Vec<usize> = calc.degree_indices(k).collect();
        let cols: Vec<(usize, usize)> = t_basis
            .iter()
            .flat_map(|&t| omega_basis.iter().map(move |&p| (t, p)))
            .collect();
        // precompute f(t1)·e_p products, dropping columns whose products are
        // not representable on the window
        let mut usable = vec![true; cols.len()];
        // equations: for each degree-k basis t and each Ω flat r:
        //   Σ coeff·g-col + known = ε(t)·1
        let mut rows: Vec<(Vec<Scalar>, Scalar)> = Vec::new();
        for &t in &t_basis {
            let mut lhs_cols = vec![SparseVec::zero(); cols.len()];
            let mut known = SparseVec::zero();
            for ((t1, t2), c) in env.coprod_basis(t)?.iter() {
                let k2 = env.degree_of(*t2);
                if k2 == k {
                    // unknown part: f(t1) has degree 0 here
                    for (ci, (tc, p)) in cols.iter().enumerate() {
                        if *tc != *t2 || !usable[ci] {
                            continue;
                        }
                        match calc.mul(f.value(*t1), &SparseVec::unit(*p)) {
                            Ok(prod) => lhs_cols[ci].add_scaled(&prod, c),
                            Err(Error::TruncationOverflow { .. }) => usable[ci] = false,
                            Err(e) => return Err(e),
                        }
                    }
                } else {
                    // lower-degree values of g are already known
                    let g2 = values[*t2]
                        .as_ref()
                        .ok_or_else(|| Error::Internal("inverse recursion out of order".into()))?;
                    match calc.mul(f.value(*t1), g2) {
                        Ok(prod) => known.add_scaled(&prod, c),
                        Err(Error::TruncationOverflow { .. }) => {
                            return Err(Error::NotConvolutionInvertible(k))
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            let mut target = calc.one().scaled(&env.counit_basis(t));
            target.sub(&known);
            // expand into scalar rows over the Ω support
            let mut support: std::collections::BTreeSet<usize> = target.support().collect();
            for col in &lhs_cols {
                support.extend(col.support());
            }
            for r in support {
                let row: Vec<Scalar> = lhs_cols.iter().map(|col| col.get(r)).collect();
                rows.push((row, target.get(r)));
            }
        }
        let active: Vec<usize> = (0..cols.len()).filter(|&i| usable[i]).collect();
        let m = Matrix::from_fn(rows.len(), active.len(), |r, c| {
            rows[r].0[active[c]].clone()
        });
        let b: Vec<Scalar> = rows.iter().map(|(_, t)| t.clone()).collect();
        let sol = m.solve(&b).ok_or(Error::NotConvolutionInvertible(k))?;
        for &t in &t_basis {
            let mut v = SparseVec::zero();
            for (ai, &ci) in active.iter().enumerate() {
                let (tc, p) = cols[ci];
                if tc == t && !sol[ai].is_zero() {
                    v.add_term(p, sol[ai].clone());
                }
            }
            values[t] = Some(v);
        }
    }
    let g = ConvolutionMap {
        values: values.into_iter().map(|v| v.unwrap_or_default()).collect(),
    };
    // exactness of both products
    let left = convolve(calc, f, &g)?;
    let right = convolve(calc, &g, f)?;
    let unit = ConvolutionMap::unit_counit(calc);
    if left != unit || right != unit {
        return Err(Error::NotConvolutionInvertible(0));
    }
    Ok(g)
}

/// A graded linear endomorphism of `Ω•(P)`, tabulated on the flat basis.
///
/// On windowed total spaces some basis images may be honestly unrepresentable
/// (they would leave the exponent window); those entries are marked undefined
/// and every verification skips them.
#[derive(Clone, PartialEq, Eq)]
pub struct ModuleAutomorphism {
    values: Vec<SparseVec>,
    defined: Vec<bool>,
}

impl ModuleAutomorphism {
    pub fn from_values(values: Vec<SparseVec>) -> Self {
        let defined = vec![true; values.len()];
        ModuleAutomorphism { values, defined }
    }

    pub fn from_partial(values: Vec<SparseVec>, defined: Vec<bool>) -> Self {
        assert_eq!(values.len(), defined.len());
        ModuleAutomorphism { values, defined }
    }

    pub fn identity(calc: &BundleCalculus) -> Self {
        ModuleAutomorphism::from_values((0..calc.total_dim()).map(SparseVec::unit).collect())
    }

    pub fn is_defined(&self, w: usize) -> bool {
        self.defined[w]
    }

    pub fn value(&self, w: usize) -> &SparseVec {
        debug_assert!(self.defined[w], "undefined automorphism entry");
        &self.values[w]
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (w, c) in v.iter() {
            debug_assert!(self.defined[*w], "undefined automorphism entry");
            out.add_scaled(&self.values[*w], c);
        }
        out
    }

    /// Like [`ModuleAutomorphism::apply`], erroring on undefined entries.
    pub fn try_apply(&self, v: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::zero();
        for (w, c) in v.iter() {
            if !self.defined[*w] {
                return Err(Error::DegreeOverflow(0, 0));
            }
            out.add_scaled(&self.values[*w], c);
        }
        Ok(out)
    }

    /// The group product of the automorphism picture:
    /// `(F₁∘F₂)(w) = F₂(F₁(w))`.
    pub fn compose(&self, other: &ModuleAutomorphism) -> ModuleAutomorphism {
        let mut values = Vec::with_capacity(self.values.len());
        let mut defined = Vec::with_capacity(self.values.len());
        for (v, d) in self.values.iter().zip(&self.defined) {
            match (d, other.try_apply(v)) {
                (true, Ok(x)) => {
                    values.push(x);
                    defined.push(true);
                }
                _ => {
                    values.push(SparseVec::zero());
                    defined.push(false);
                }
            }
        }
        ModuleAutomorphism { values, defined }
    }

    /// Checks `F(1) = 1`, left `Ω(B)`-linearity, the covariance law and
    /// per-degree invertibility.
    pub fn verify(&self, calc: &BundleCalculus) -> Result<Vec<Check>> {
        let mut checks = Vec::new();
        let w = if self.apply(&calc.one()) != calc.one() {
            Some("F(1) ≠ 1".to_string())
        } else {
            None
        };
        checks.push(Check::from_witness("gauge-unit", "F(1) = 1", w));

        // left module linearity over base forms
        let mut witness = None;
        'lin: for mu_deg in 0..=calc.max_degree() {
            for mu in calc.base_forms(mu_deg) {
                for w in 0..calc.total_dim() {
                    if calc.degree_of(w) + mu_deg > calc.max_degree() || !self.defined[w] {
                        continue;
                    }
                    let res = (|| -> Result<bool> {
                        let mw = calc.mul(mu, &SparseVec::unit(w))?;
                        let lhs = self.try_apply(&mw).map_err(|_| Error::TruncationOverflow {
                            degree: 0,
                            lo: 0,
                            hi: 0,
                        })?;
                        let rhs = calc.mul(mu, self.value(w))?;
                        Ok(lhs == rhs)
                    })();
                    match res {
                        Ok(true) => {}
                        Ok(false) => {
                            witness = Some(format!("μ deg {mu_deg}, w = {w}"));
                            break 'lin;
                        }
                        Err(Error::TruncationOverflow { .. }) => continue,
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        checks.push(Check::from_witness(
            "gauge-module-linearity",
            "F(μw) = μF(w)",
            witness,
        ));

        // covariance
        let mut witness = None;
        for w in 0..calc.total_dim() {
            if !self.defined[w] {
                continue;
            }
            let res = (|| -> Result<bool> {
                let lhs = calc.coaction(self.value(w))?;
                let mut rhs = PairVec::zero();
                for ((p, t), c) in calc.coaction_basis(w)?.iter() {
                    if !self.defined[*p] {
                        return Err(Error::TruncationOverflow {
                            degree: 0,
                            lo: 0,
                            hi: 0,
                        });
                    }
                    for (q, x) in self.value(*p).iter() {
                        rhs.add_term(*q, *t, c * x);
                    }
                }
                Ok(lhs == rhs)
            })();
            match res {
                Ok(true) => {}
                Ok(false) => {
                    witness = Some(calc.render(&SparseVec::unit(w)));
                    break;
                }
                Err(Error::TruncationOverflow { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        checks.push(Check::from_witness(
            "gauge-covariance",
            "(F⊗id)∘Δ_Ω = Δ_Ω∘F",
            witness,
        ));

        // invertibility in each computed degree (on the defined part)
        let mut witness = None;
        for n in 0..=calc.max_degree() {
            let idx: Vec<usize> = calc
                .degree_indices(n)
                .filter(|&w| self.defined[w])
                .collect();
            if idx.is_empty() {
                continue;
            }
            let all: Vec<usize> = calc.degree_indices(n).collect();
            let off = all.first().copied().unwrap_or(0);
            let m = Matrix::from_fn(all.len(), idx.len(), |r, c| {
                self.values[idx[c]].get(off + r)
            });
            if m.rank() != idx.len() {
                witness = Some(format!("degree {n} singular"));
                break;
            }
        }
        checks.push(Check::from_witness(
            "gauge-invertible",
            "F invertible degreewise",
            witness,
        ));
        Ok(checks)
    }
}

impl fmt::Debug for ModuleAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleAutomorphism({} basis values)", self.values.len())
    }
}

/// `F_f = m_Ω ∘ (id ⊗ f) ∘ Δ_Ω`.
pub fn automorphism_from_map(
    calc: &BundleCalculus,
    f: &ConvolutionMap,
) -> Result<ModuleAutomorphism> {
    let mut values = Vec::with_capacity(calc.total_dim());
    for w in 0..calc.total_dim() {
        let mut out = SparseVec::zero();
        for ((p, t), c) in calc.coaction_basis(w)?.iter() {
            let prod = calc.mul(&SparseVec::unit(*p), f.value(*t))?;
            out.add_scaled(&prod, c);
        }
        values.push(out);
    }
    Ok(ModuleAutomorphism::from_values(values))
}

/// `f_F = m_Ω ∘ (id ⊗_B F) ∘ qtrs`.
pub fn map_from_automorphism(
    calc: &BundleCalculus,
    qtrs: &TranslationMap,
    big_f: &ModuleAutomorphism,
) -> Result<ConvolutionMap> {
    let env = calc.envelope();
    let mut values = Vec::with_capacity(env.total_dim());
    for t in 0..env.total_dim() {
        let mut out = SparseVec::zero();
        for ((u, v), c) in qtrs.of_basis(t).iter() {
            if !big_f.is_defined(*v) {
                return Err(Error::Internal(format!(
                    "translation leg {v} is outside the automorphism's window"
                )));
            }
            let prod = calc.mul(&SparseVec::unit(*u), big_f.value(*v))?;
            out.add_scaled(&prod, c);
        }
        values.push(out);
    }
    Ok(ConvolutionMap { values })
}

/// `F_f` built entrywise, marking images that leave the window undefined
/// instead of failing.
pub fn automorphism_from_map_partial(
    calc: &BundleCalculus,
    f: &ConvolutionMap,
) -> Result<ModuleAutomorphism> {
    let mut values = Vec::with_capacity(calc.total_dim());
    let mut defined = Vec::with_capacity(calc.total_dim());
    for w in 0..calc.total_dim() {
        let entry = (|| -> Result<SparseVec> {
            let mut out = SparseVec::zero();
            for ((p, t), c) in calc.coaction_basis(w)?.iter() {
                let prod = calc.mul(&SparseVec::unit(*p), f.value(*t))?;
                out.add_scaled(&prod, c);
            }
            Ok(out)
        })();
        match entry {
            Ok(v) => {
                values.push(v);
                defined.push(true);
            }
            Err(Error::TruncationOverflow { .. }) => {
                values.push(SparseVec::zero());
                defined.push(false);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ModuleAutomorphism::from_partial(values, defined))
}

/// Samples exact gauge maps: the affine space `{f : f(1) = 1, covariance}` is
/// solved once, then seeded rational coordinates pick points; candidates that
/// fail to invert are skipped deterministically.
pub fn sample_gauge_maps(
    calc: &BundleCalculus,
    count: usize,
    seed: u64,
) -> Result<Vec<ConvolutionMap>> {
    let env = calc.envelope();
    let cap = calc.max_degree().min(env.max_degree());
    // unknowns: (t, p) with matching degrees ≤ cap
    let mut cols: Vec<(usize, usize)> = Vec::new();
    for t in 0..env.total_dim() {
        let k = env.degree_of(t);
        if k > cap {
            continue;
        }
        for p in calc.degree_indices(k) {
            cols.push((t, p));
        }
    }
    let col_pos: std::collections::BTreeMap<(usize, usize), usize> =
        cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    // constraint rows: covariance per t, plus f(1) = 0 for the kernel
    let mut rows: Vec<SparseVec> = Vec::new();
    for t in 0..env.total_dim() {
        if env.degree_of(t) > cap {
            continue;
        }
        // row group: Δ_Ω(f(t)) − (f⊗id)Ad(t) = 0 over Ω⊗Γ∧ pairs
        let mut per_pair: std::collections::BTreeMap<(usize, usize), SparseVec> =
            std::collections::BTreeMap::new();
        for p in calc.degree_indices(env.degree_of(t)) {
            let ci = col_pos[&(t, p)];
            match calc.coaction_basis(p) {
                Ok(cp) => {
                    for ((q, tau), c) in cp.iter() {
                        per_pair
                            .entry((*q, *tau))
                            .or_default()
                            .add_term(ci, c.clone());
                    }
                }
                Err(Error::TruncationOverflow { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        match env.extended_ad(&SparseVec::unit(t)) {
            Ok(ad) => {
                for ((t1, t2), c) in ad.iter() {
                    if env.degree_of(*t1) > cap {
                        continue;
                    }
                    for p in calc.degree_indices(env.degree_of(*t1)) {
                        let ci = col_pos[&(*t1, p)];
                        per_pair
                            .entry((p, *t2))
                            .or_default()
                            .add_term(ci, -c.clone());
                    }
                }
            }
            Err(Error::TruncationOverflow { .. }) => continue,
            Err(e) => return Err(e),
        }
        rows.extend(per_pair.into_values());
    }
    // f(1) = 0 rows (kernel directions fix the unit)
    {
        let one = env.unit();
        let mut per_omega: std::collections::BTreeMap<usize, SparseVec> =
            std::collections::BTreeMap::new();
        for (t, c) in one.iter() {
            for p in calc.degree_indices(0) {
                per_omega
                    .entry(p)
                    .or_default()
                    .add_term(col_pos[&(*t, p)], c.clone());
            }
        }
        rows.extend(per_omega.into_values());
    }
    let m = Matrix::from_fn(rows.len(), cols.len(), |r, c| rows[r].get(c));
    let kernel = m.kernel_basis();
    let base = ConvolutionMap::unit_counit(calc);
    let mut rng = Rng::new(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 50 * (count + 1) {
            return Err(Error::Internal(
                "gauge sampling failed to find invertible maps".into(),
            ));
        }
        let mut values: Vec<SparseVec> = (0..env.total_dim())
            .map(|t| base.value(t).clone())
            .collect();
        for kv in &kernel {
            let c = rng.small_rational();
            if c.is_zero() {
                continue;
            }
            for (ci, x) in kv.iter() {
                let (t, p) = cols[*ci];
                values[t].add_term(p, &c * x);
            }
        }
        let candidate = ConvolutionMap { values };
        if candidate.check_covariance(calc)?.is_some() {
            return Err(Error::Internal("sampled map violates covariance".into()));
        }
        if convolution_inverse(calc, &candidate).is_ok() {
            out.push(candidate);
        }
    }
    Ok(out)
}

/// The full isomorphism suite on seeded samples: roundtrips both ways, the
/// anti-homomorphism law for the chosen composition convention, inverse
/// exchange, and the convolution group axioms.
pub fn verify_group_isomorphism(
    calc: &BundleCalculus,
    qtrs: &TranslationMap,
    samples: &[ConvolutionMap],
) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let unit = ConvolutionMap::unit_counit(calc);

    // identity exchange: F = id ↔ f = 1ε
    let id_f = map_from_automorphism(calc, qtrs, &ModuleAutomorphism::identity(calc))?;
    let w = (id_f != unit).then(|| "f_id ≠ 1ε".to_string());
    checks.push(Check::from_witness("identity-exchange", "f_id = 1ε", w));
    let f_unit = automorphism_from_map(calc, &unit)?;
    let w = (f_unit != ModuleAutomorphism::identity(calc)).then(|| "F_{1ε} ≠ id".to_string());
    checks.push(Check::from_witness("unit-exchange", "F_{1ε} = id", w));

    // roundtrips on every sample
    let mut witness = None;
    for (i, f) in samples.iter().enumerate() {
        let big = automorphism_from_map(calc, f)?;
        let back = map_from_automorphism(calc, qtrs, &big)?;
        if back != *f {
            witness = Some(format!("sample {i}: f_{{F_f}} ≠ f"));
            break;
        }
        let big_back = automorphism_from_map(calc, &back)?;
        if big_back != big {
            witness = Some(format!("sample {i}: F_{{f_F}} ≠ F"));
            break;
        }
    }
    checks.push(Check::from_witness(
        "roundtrip",
        "f_{F_f} = f and F_{f_F} = F",
        witness,
    ));

    // covariance of the sampled maps and their automorphism laws
    let mut witness = None;
    for (i, f) in samples.iter().enumerate() {
        if let Some(w) = f.check_covariance(calc)? {
            witness = Some(format!("sample {i}: {w}"));
            break;
        }
        let big = automorphism_from_map(calc, f)?;
        for c in big.verify(calc)? {
            if !c.passed {
                witness = Some(format!("sample {i}: {}", c.name));
                break;
            }
        }
        if witness.is_some() {
            break;
        }
    }
    checks.push(Check::from_witness(
        "sample-laws",
        "samples satisfy the gauge laws",
        witness,
    ));

    // anti-homomorphism: f_{F₁∘F₂} = f_{F₁} ∗ f_{F₂} with (F₁∘F₂)(w) = F₂(F₁(w))
    let mut witness = None;
    for i in 0..samples.len().min(6) {
        for j in 0..samples.len().min(6) {
            let f1 = &samples[i];
            let f2 = &samples[j];
            let big1 = automorphism_from_map(calc, f1)?;
            let big2 = automorphism_from_map(calc, f2)?;
            let composed = big1.compose(&big2);
            let lhs = map_from_automorphism(calc, qtrs, &composed)?;
            let rhs = convolve(calc, f1, f2)?;
            if lhs != rhs {
                witness = Some(format!("samples ({i}, {j})"));
                break;
            }
        }
        if witness.is_some() {
            break;
        }
    }
    checks.push(Check::from_witness(
        "group-product-exchange",
        "f_{F₁∘F₂} = f_{F₁}∗f_{F₂}",
        witness,
    ));

    // inverse exchange and group axioms
    let mut witness = None;
    for (i, f) in samples.iter().enumerate() {
        let finv = convolution_inverse(calc, f)?;
        let lhs = convolve(calc, f, &finv)?;
        let rhs = convolve(calc, &finv, f)?;
        if lhs != unit || rhs != unit {
            witness = Some(format!("sample {i}: f∗f⁻¹ ≠ 1ε"));
            break;
        }
        // F_{f⁻¹} inverts F_f
        let big = automorphism_from_map(calc, f)?;
        let big_inv = automorphism_from_map(calc, &finv)?;
        let composed = big.compose(&big_inv);
        if composed != ModuleAutomorphism::identity(calc) {
            witness = Some(format!("sample {i}: F_f∘F_{{f⁻¹}} ≠ id"));
            break;
        }
    }
    checks.push(Check::from_witness(
        "inverse-exchange",
        "F⁻¹_f = F_{f⁻¹}",
        witness,
    ));

    // the two mid-proof expansions of Δ_Ω∘f_F agree with the direct value
    // on every basis element of degree ≤ 2
    let mut witness = None;
    'expansions: for f in samples.iter().take(4) {
        let big = automorphism_from_map(calc, f)?;
        let ff = map_from_automorphism(calc, qtrs, &big)?;
        let env = calc.envelope();
        for t in 0..env.total_dim() {
            let direct = match calc.coaction(ff.value(t)) {
                Ok(x) => x,
                Err(Error::TruncationOverflow { .. }) => continue,
                Err(e) => return Err(e),
            };
            // route a: Σ_{qtrs(t) = u⊗v} Δ_Ω(u)·Δ_Ω(F(v))
            // route b: Σ_{qtrs(t) = u⊗v} Δ_Ω(u)·(F⊗id)Δ_Ω(v)
            let mut route_a = PairVec::zero();
            let mut route_b = PairVec::zero();
            let mut representable = true;
            for ((u, v), c) in qtrs.of_basis(t).iter() {
                let du = match calc.coaction_basis(*u) {
                    Ok(x) => x,
                    Err(Error::TruncationOverflow { .. }) => {
                        representable = false;
                        break;
                    }
                    Err(e) => return Err(e),
                };
                let a_leg = match calc.coaction(big.value(*v)) {
                    Ok(x) => x,
                    Err(Error::TruncationOverflow { .. }) => {
                        representable = false;
                        break;
                    }
                    Err(e) => return Err(e),
                };
                let mut b_leg = PairVec::zero();
                match calc.coaction_basis(*v) {
                    Ok(cv) => {
                        for ((p, tau), e) in cv.iter() {
                            for (q, x) in big.value(*p).iter() {
                                b_leg.add_term(*q, *tau, e * x);
                            }
                        }
                    }
                    Err(Error::TruncationOverflow { .. }) => {
                        representable = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
                match (
                    calc.mul_mixed_pairs(&du, &a_leg),
                    calc.mul_mixed_pairs(&du, &b_leg),
                ) {
                    (Ok(pa), Ok(pb)) => {
                        route_a.add_scaled(&pa, c);
                        route_b.add_scaled(&pb, c);
                    }
                    _ => {
                        representable = false;
                        break;
                    }
                }
            }
            if !representable {
                continue;
            }
            if route_a != direct || route_b != direct {
                witness = Some(format!("basis element {t}"));
                break 'expansions;
            }
        }
    }
    checks.push(Check::from_witness(
        "coaction-expansions",
        "both expansions of Δ_Ω∘f_F match",
        witness,
    ));

    // closure: the convolution of two gauge maps is again one
    let mut witness = None;
    for i in 0..samples.len().min(4) {
        for j in 0..samples.len().min(4) {
            let prod = convolve(calc, &samples[i], &samples[j])?;
            if let Some(w) = prod.check_covariance(calc)? {
                witness = Some(format!("samples ({i}, {j}): {w}"));
                break;
            }
            if convolution_inverse(calc, &prod).is_err() {
                witness = Some(format!("samples ({i}, {j}): product not invertible"));
                break;
            }
        }
        if witness.is_some() {
            break;
        }
    }
    checks.push(Check::from_witness(
        "convolution-closure",
        "gauge maps are closed under ∗",
        witness,
    ));

    // associativity of convolution on a few triples
    let mut witness = None;
    for i in 0..samples.len().min(3) {
        for j in 0..samples.len().min(3) {
            for k in 0..samples.len().min(3) {
                let ab_c = convolve(
                    calc,
                    &convolve(calc, &samples[i], &samples[j])?,
                    &samples[k],
                )?;
                let a_bc = convolve(
                    calc,
                    &samples[i],
                    &convolve(calc, &samples[j], &samples[k])?,
                )?;
                if ab_c != a_bc {
                    witness = Some(format!("triple ({i}, {j}, {k})"));
                }
            }
        }
    }
    checks.push(Check::from_witness(
        "convolution-associative",
        "(f₁∗f₂)∗f₃ = f₁∗(f₂∗f₃)",
        witness,
    ));

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{
        build_intertwiners, finite_bundle_universal, regular_bundle, u1_characters, u1_example,
        Connection, IntertwinerFamily,
    };
    use crate::group::FiniteGroup;

    fn z2_setup() -> (BundleCalculus, TranslationMap) {
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
        (calc, qtrs)
    }

    fn u1_setup(radius: i64) -> (BundleCalculus, TranslationMap) {
        let calc = u1_example(radius, 2).unwrap();
        let h = calc.qpb().hopf().clone();
        let fams: Vec<IntertwinerFamily> = u1_characters(&h)
            .unwrap()
            .iter()
            .map(|c| build_intertwiners(calc.qpb(), c).unwrap())
            .collect();
        let omega = Connection::canonical(&calc).unwrap();
        let qtrs = calc.translation_map(&fams, &omega).unwrap();
        (calc, qtrs)
    }

    #[test]
    fn unit_convolution_laws() {
        let (calc, _) = z2_setup();
        let unit = ConvolutionMap::unit_counit(&calc);
        // (1ε)∗(1ε) = 1ε
        assert_eq!(convolve(&calc, &unit, &unit).unwrap(), unit);
        // inverse of 1ε is 1ε
        assert_eq!(convolution_inverse(&calc, &unit).unwrap(), unit);
        assert!(unit.check_covariance(&calc).unwrap().is_none());
    }

    #[test]
    fn convolution_unit_is_neutral_on_samples() {
        let (calc, _) = z2_setup();
        let unit = ConvolutionMap::unit_counit(&calc);
        let samples = sample_gauge_maps(&calc, 5, 11).unwrap();
        for f in &samples {
            assert_eq!(&convolve(&calc, f, &unit).unwrap(), f);
            assert_eq!(&convolve(&calc, &unit, f).unwrap(), f);
        }
    }

    #[test]
    fn u1_diagonal_scaling_convolution() {
        // the U(1) gauge maps are the scalar sequences f(z^n) = c_n·1 with
        // c_0 = 1; convolution multiplies the sequences pointwise
        let (calc, _) = u1_setup(4);
        let h = calc.qpb().hopf().clone();
        let mk = |c: i64| -> ConvolutionMap {
            let env = calc.envelope();
            let values = (0..env.total_dim())
                .map(|t| {
                    let (k, gi, _) = env.split(t);
                    assert_eq!(k, 0);
                    let n = h.exponent(gi);
                    let pow = c.pow(n.unsigned_abs() as u32);
                    let coeff = if n >= 0 {
                        Scalar::from_int(pow)
                    } else {
                        Scalar::from_ratio(1, pow)
                    };
                    calc.one().scaled(&coeff)
                })
                .collect();
            ConvolutionMap::from_values(values)
        };
        let f2 = mk(2);
        let f3 = mk(3);
        assert!(f2.check_covariance(&calc).unwrap().is_none());
        let f6 = convolve(&calc, &f2, &f3).unwrap();
        assert_eq!(f6, mk(6));
        // inverse scales by the reciprocal
        let inv = convolution_inverse(&calc, &f2).unwrap();
        let prod = convolve(&calc, &f2, &inv).unwrap();
        assert_eq!(prod, ConvolutionMap::unit_counit(&calc));
    }

    #[test]
    fn u1_group_like_rescaling_has_antipodal_inverse() {
        // the non-covariant map f(z^n) = c^n z^n still inverts, with
        // f⁻¹(z^n) = c^{−n} z^{−n} (checked by direct convolution)
        let (calc, _) = u1_setup(4);
        let h = calc.qpb().hopf().clone();
        let c = Scalar::from_ratio(3, 2);
        let env = calc.envelope();
        let values = (0..env.total_dim())
            .map(|t| {
                let (_, gi, _) = env.split(t);
                let n = h.exponent(gi);
                let mut pow = Scalar::one();
                for _ in 0..n.unsigned_abs() {
                    pow = &pow * &c;
                }
                if n < 0 {
                    pow = pow.inv();
                }
                calc.embed_p(&SparseVec::unit(gi)).scaled(&pow)
            })
            .collect();
        let f = ConvolutionMap::from_values(values);
        let inv = convolution_inverse(&calc, &f).unwrap();
        // check the expected antipodal form on a couple of exponents
        for n in [-2i64, 1, 3] {
            let t = calc.envelope().flat(0, h.monomial(n).unwrap(), 0);
            let mut pow = Scalar::one();
            for _ in 0..n.unsigned_abs() {
                pow = &pow * &c;
            }
            if n > 0 {
                pow = pow.inv();
            }
            let expected = calc
                .embed_p(&SparseVec::unit(h.monomial(-n).unwrap()))
                .scaled(&pow);
            assert_eq!(inv.value(t), &expected, "n = {n}");
        }
    }

    #[test]
    fn vanishing_degree_zero_value_is_not_invertible() {
        let (calc, _) = u1_setup(3);
        let h = calc.qpb().hopf().clone();
        let unit = ConvolutionMap::unit_counit(&calc);
        let mut values: Vec<SparseVec> = (0..calc.envelope().total_dim())
            .map(|t| unit.value(t).clone())
            .collect();
        values[calc.envelope().flat(0, h.monomial(1).unwrap(), 0)] = SparseVec::zero();
        let f = ConvolutionMap::from_values(values);
        assert!(matches!(
            convolution_inverse(&calc, &f),
            Err(Error::NotConvolutionInvertible(_))
        ));
    }

    #[test]
    fn z2_isomorphism_suite() {
        let (calc, qtrs) = z2_setup();
        let samples = sample_gauge_maps(&calc, 8, 42).unwrap();
        for c in verify_group_isomorphism(&calc, &qtrs, &samples).unwrap() {
            assert!(c.passed, "{}: {:?}", c.name, c.witness);
        }
    }

    #[test]
    fn u1_isomorphism_suite() {
        let (calc, qtrs) = u1_setup(3);
        let samples = sample_gauge_maps(&calc, 6, 7).unwrap();
        for c in verify_group_isomorphism(&calc, &qtrs, &samples).unwrap() {
            assert!(c.passed, "{}: {:?}", c.name, c.witness);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let (calc, _) = z2_setup();
        let a = sample_gauge_maps(&calc, 4, 99).unwrap();
        let b = sample_gauge_maps(&calc, 4, 99).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x, y);
        }
    }
}
