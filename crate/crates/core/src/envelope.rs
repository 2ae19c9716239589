//! The universal differential envelope ∗-calculus, truncated at a degree cap.
//!
//! In left-trivialized form the envelope of a calculus `(Γ, d)` over `H` is
//! `H ⊗ qg#∧`, where `qg#∧` is the tensor algebra of the germs space divided
//! by the two-sided ideal generated in degree two by `π(r⁽¹⁾) ⊗ π(r⁽²⁾)` over
//! the ideal `R` of the calculus. Degrees are materialized up to `max_degree`
//! and every structure map is tabulated on the graded basis at construction.
//!
//! Grading conventions used throughout (`∂` is the degree):
//!
//! * product on the tensor square: `(a⊗b)(c⊗d) = (−1)^{∂b·∂c} ac ⊗ bd`
//! * antipode and star are graded antimultiplicative:
//!   `S(ab) = (−1)^{∂a∂b} S(b)S(a)`, `(ab)∗ = (−1)^{∂a∂b} b∗a∗`
//! * tensor differential: `d(a⊗b) = da⊗b + (−1)^{∂a} a⊗db`

use std::collections::BTreeMap;
use std::fmt;

use crate::fodc::Fodc;
use crate::hopf::HopfAlgebra;
use crate::linalg::{PairVec, Span, SparseVec, TripleVec};
use crate::report::Check;
use crate::scalar::Scalar;
use crate::{Error, Result};

struct WedgeDegree {
    /// span of the antisymmetrization ideal inside the k-fold tensor power,
    /// over fused word indices
    ideal: Span,
    /// fused word index of each coset basis vector (always a free unit coset)
    reps: Vec<usize>,
    pos: BTreeMap<usize, usize>,
    labels: Vec<String>,
}

impl WedgeDegree {
    fn dim(&self) -> usize {
        self.reps.len()
    }
}

/// The degree-truncated universal envelope `Γ∧ = H ⊗ qg#∧`.
pub struct Envelope {
    fodc: Fodc,
    max_degree: usize,
    wedge: Vec<WedgeDegree>,
    offsets: Vec<usize>,
    total: usize,
    /// [k][wedge basis][H basis] — extended right module action on words
    wedge_act: Vec<Vec<Vec<Result<SparseVec>>>>,
    /// Maurer–Cartan differential of each germ basis vector, in degree-2
    /// wedge coordinates
    mc: Vec<SparseVec>,
    mul_table: BTreeMap<(usize, usize), Result<SparseVec>>,
    d_table: Vec<Result<SparseVec>>,
    coprod_table: Vec<Result<PairVec>>,
    antipode_table: Vec<Result<SparseVec>>,
    star_table: Vec<Result<SparseVec>>,
}

impl Envelope {
    pub fn new(fodc: Fodc, max_degree: usize) -> Result<Self> {
        if max_degree < 2 {
            return Err(Error::DegreeOverflow(max_degree, 2));
        }
        let g = fodc.germ_dim();
        let h = fodc.hopf().clone();

        // degree-2 ideal generators π(r⁽¹⁾)⊗π(r⁽²⁾), fused as a*g + b
        let mut gens2: Vec<SparseVec> = Vec::new();
        for r in fodc.germs().ideal().closure_basis() {
            let mut gen = SparseVec::zero();
            for ((a, b), c) in h.coprod(&r).iter() {
                let pa = fodc.germs().pi(&SparseVec::unit(*a));
                let pb = fodc.germs().pi(&SparseVec::unit(*b));
                for (i, x) in pa.iter() {
                    for (j, y) in pb.iter() {
                        gen.add_term(i * g + j, &(c * x) * y);
                    }
                }
            }
            if !gen.is_zero() {
                gens2.push(gen);
            }
        }

        // wedge degrees: quotients of tensor powers by the spliced ideal
        let mut wedge = Vec::with_capacity(max_degree + 1);
        for k in 0..=max_degree {
            let dim_k = g.checked_pow(k as u32).unwrap_or(0);
            let mut ideal = Span::new();
            if k >= 2 {
                let rest = k - 2;
                for gen in &gens2 {
                    for p in 0..=rest {
                        // words u (length p) ⊗ gen ⊗ v (length rest - p)
                        let left_count = g.pow(p as u32);
                        let right_count = g.pow((rest - p) as u32);
                        for u in 0..left_count {
                            for v in 0..right_count {
                                let mut spliced = SparseVec::zero();
                                for (t, c) in gen.iter() {
                                    // fused index of u · t-word · v
                                    let idx = (u * g * g + t) * right_count + v;
                                    spliced.add_term(idx, c.clone());
                                }
                                ideal.insert(&spliced);
                            }
                        }
                    }
                }
            }
            let pivots: std::collections::BTreeSet<usize> = ideal.pivots().collect();
            let reps: Vec<usize> = (0..dim_k).filter(|i| !pivots.contains(i)).collect();
            let pos = reps.iter().enumerate().map(|(p, &i)| (i, p)).collect();
            let labels = reps
                .iter()
                .map(|&w| word_label(fodc.germs().space(), g, k, w))
                .collect();
            wedge.push(WedgeDegree {
                ideal,
                reps,
                pos,
                labels,
            });
        }

        let mut offsets = Vec::with_capacity(max_degree + 2);
        let mut total = 0;
        for wd in &wedge {
            offsets.push(total);
            total += h.dim() * wd.dim();
        }
        offsets.push(total);

        let mut env = Envelope {
            fodc,
            max_degree,
            wedge,
            offsets,
            total,
            wedge_act: Vec::new(),
            mc: Vec::new(),
            mul_table: BTreeMap::new(),
            d_table: Vec::new(),
            coprod_table: Vec::new(),
            antipode_table: Vec::new(),
            star_table: Vec::new(),
        };
        env.build_wedge_action();
        env.build_maurer_cartan()?;
        env.build_mul_table();
        env.build_d_table();
        env.build_antipode_table();
        env.build_star_table();
        env.build_coprod_table();
        Ok(env)
    }

    // -- indexing ------------------------------------------------------------

    pub fn fodc(&self) -> &Fodc {
        &self.fodc
    }

    pub fn hopf(&self) -> &HopfAlgebra {
        self.fodc.hopf()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn germ_dim(&self) -> usize {
        self.fodc.germ_dim()
    }

    /// Per-degree dimensions of `qg#∧`.
    pub fn wedge_dims(&self) -> Vec<usize> {
        self.wedge.iter().map(|w| w.dim()).collect()
    }

    pub fn degree_dim(&self, k: usize) -> usize {
        self.hopf().dim() * self.wedge[k].dim()
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn flat(&self, k: usize, h_i: usize, w_i: usize) -> usize {
        self.offsets[k] + h_i * self.wedge[k].dim() + w_i
    }

    /// `(degree, H index, wedge index)` of a flat basis index.
    pub fn split(&self, flat: usize) -> (usize, usize, usize) {
        let k = (0..=self.max_degree)
            .find(|&k| flat < self.offsets[k + 1])
            .expect("flat index in range");
        let local = flat - self.offsets[k];
        let wd = self.wedge[k].dim();
        (k, local / wd, local % wd)
    }

    pub fn degree_of(&self, flat: usize) -> usize {
        self.split(flat).0
    }

    /// Degree of a homogeneous element; errors on mixed degrees.
    pub fn degree(&self, v: &SparseVec) -> Result<usize> {
        let mut deg = None;
        for (i, _) in v.iter() {
            let k = self.degree_of(*i);
            match deg {
                None => deg = Some(k),
                Some(d) if d == k => {}
                Some(d) => {
                    return Err(Error::DimensionMismatch(format!(
                        "mixed degrees {d} and {k}"
                    )))
                }
            }
        }
        Ok(deg.unwrap_or(0))
    }

    pub fn unit(&self) -> SparseVec {
        self.embed_h(&self.hopf().one())
    }

    /// H as the degree-0 part.
    pub fn embed_h(&self, v: &SparseVec) -> SparseVec {
        v.map_indices(|i| Some(self.flat(0, i, 0)))
    }

    /// A germ as a degree-1 invariant element `1 ⊗ θ`.
    pub fn embed_germ(&self, theta: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (t, c) in theta.iter() {
            let w = self.wedge[1].pos[t];
            for (i, x) in self.hopf().one().iter() {
                out.add_term(self.flat(1, *i, w), c * x);
            }
        }
        out
    }

    /// A wedge-coordinate element as `1 ⊗ w` in degree `k`.
    pub fn embed_wedge(&self, k: usize, w: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (wi, c) in w.iter() {
            for (i, x) in self.hopf().one().iter() {
                out.add_term(self.flat(k, *i, *wi), c * x);
            }
        }
        out
    }

    /// Letters of the canonical word representative of a wedge basis vector.
    pub fn word_letters_of(&self, k: usize, w_i: usize) -> Vec<usize> {
        self.word_letters(k, w_i)
    }

    pub fn wedge_label(&self, k: usize, w_i: usize) -> &str {
        &self.wedge[k].labels[w_i]
    }

    fn word_letters(&self, k: usize, w_i: usize) -> Vec<usize> {
        let g = self.germ_dim();
        let mut fused = self.wedge[k].reps[w_i];
        let mut letters = vec![0; k];
        for slot in (0..k).rev() {
            letters[slot] = fused % g;
            fused /= g;
        }
        letters
    }

    /// Reduces a fused tensor word element into wedge coordinates.
    fn wedge_reduce(&self, k: usize, v: &SparseVec) -> SparseVec {
        let wd = &self.wedge[k];
        wd.ideal.reduce(v).map_indices(|i| wd.pos.get(&i).copied())
    }

    /// Concatenation product of wedge coordinates.
    pub fn wedge_concat(
        &self,
        k1: usize,
        a: &SparseVec,
        k2: usize,
        b: &SparseVec,
    ) -> Result<SparseVec> {
        self.wedge_mul(k1, a, k2, b)
    }

    /// Maurer–Cartan derivation on a wedge element of degree `k`.
    pub fn wedge_d(&self, k: usize, v: &SparseVec) -> Result<SparseVec> {
        if k + 1 > self.max_degree {
            return Err(Error::DegreeOverflow(k + 1, self.max_degree));
        }
        let g_dim = self.germ_dim();
        let mut out = SparseVec::zero();
        for (wi, coeff) in v.iter() {
            let letters = self.word_letters(k, *wi);
            for j in 0..letters.len() {
                let sign = if j % 2 == 0 {
                    Scalar::one()
                } else {
                    Scalar::from_int(-1)
                };
                let left_fused: usize = letters[..j].iter().fold(0, |acc, &t| acc * g_dim + t);
                let right_fused: usize = letters[j + 1..].iter().fold(0, |acc, &t| acc * g_dim + t);
                let right_count = g_dim.pow((letters.len() - j - 1) as u32);
                let mut fused = SparseVec::zero();
                for (m, mc_c) in self.mc[letters[j]].iter() {
                    let mc_fused = self.wedge[2].reps[*m];
                    let idx = ((left_fused * g_dim * g_dim + mc_fused) * right_count) + right_fused;
                    fused.add_term(idx, mc_c * &sign);
                }
                out.add_scaled(&self.wedge_reduce(k + 1, &fused), coeff);
            }
        }
        Ok(out)
    }

    /// Star on a wedge element: letters starred and reversed, with the
    /// graded reversal sign `(−1)^{k(k−1)/2}`; antilinear part left to the
    /// caller.
    pub fn wedge_star(&self, k: usize, v: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::zero();
        for (wi, coeff) in v.iter() {
            let letters = self.word_letters(k, *wi);
            let mut word_star = SparseVec::unit(0);
            let mut deg = 0;
            for &t in letters.iter().rev() {
                let st = self.fodc.star_germ(&SparseVec::unit(t));
                let st_w = st.map_indices(|x| Some(self.wedge[1].pos[&x]));
                word_star = self.wedge_mul(deg, &word_star, 1, &st_w)?;
                deg += 1;
            }
            let sign = if (k * (k.saturating_sub(1)) / 2) % 2 == 0 {
                Scalar::one()
            } else {
                Scalar::from_int(-1)
            };
            out.add_scaled(&word_star, &(coeff * &sign));
        }
        Ok(out)
    }

    fn wedge_mul(&self, k1: usize, a: &SparseVec, k2: usize, b: &SparseVec) -> Result<SparseVec> {
        let k = k1 + k2;
        if k > self.max_degree {
            return Err(Error::DegreeOverflow(k, self.max_degree));
        }
        let g = self.germ_dim();
        let shift = g.pow(k2 as u32);
        let mut fused = SparseVec::zero();
        for (i, x) in a.iter() {
            let base = self.wedge[k1].reps[*i] * shift;
            for (j, y) in b.iter() {
                fused.add_term(base + self.wedge[k2].reps[*j], x * y);
            }
        }
        Ok(self.wedge_reduce(k, &fused))
    }

    // -- table construction ----------------------------------------------------

    fn build_wedge_action(&mut self) {
        let h = self.hopf().clone();
        let g = self.germ_dim();
        // germ-level action table
        let germ_act: Vec<Vec<Result<SparseVec>>> = (0..g)
            .map(|t| {
                (0..h.dim())
                    .map(|b| {
                        self.fodc
                            .module_action(&SparseVec::unit(t), &SparseVec::unit(b))
                    })
                    .collect()
            })
            .collect();
        let mut act: Vec<Vec<Vec<Result<SparseVec>>>> = Vec::with_capacity(self.max_degree + 1);
        for k in 0..=self.max_degree {
            let mut per_w = Vec::with_capacity(self.wedge[k].dim());
            for w_i in 0..self.wedge[k].dim() {
                let letters = self.word_letters(k, w_i);
                let per_h: Vec<Result<SparseVec>> = (0..h.dim())
                    .map(|b| self.word_action(&letters, b, &germ_act))
                    .collect();
                per_w.push(per_h);
            }
            act.push(per_w);
        }
        self.wedge_act = act;
    }

    /// `(θ_1 ⋯ θ_k)∘g = (θ_1∘g⁽¹⁾)⋯(θ_k∘g⁽ᵏ⁾)`, recursively over the word.
    fn word_action(
        &self,
        letters: &[usize],
        h_basis: usize,
        germ_act: &[Vec<Result<SparseVec>>],
    ) -> Result<SparseVec> {
        let h = self.hopf();
        let k = letters.len();
        if k == 0 {
            // 1∘g = ε(g)
            return Ok(SparseVec::single(0, h.counit_basis(h_basis)));
        }
        let first = letters[0];
        let rest = &letters[1..];
        let mut out = SparseVec::zero();
        for ((g1, g2), c) in h.coprod_basis(h_basis).iter() {
            let head = germ_act[first][*g1].clone()?;
            if head.is_zero() {
                continue;
            }
            let tail = self.word_action(rest, *g2, germ_act)?;
            if tail.is_zero() {
                continue;
            }
            // assemble in tensor coordinates of degree k, then reduce
            let g = self.germ_dim();
            let shift = g.pow((k - 1) as u32);
            let mut fused = SparseVec::zero();
            for (t, x) in head.iter() {
                for (wr, y) in tail.iter() {
                    fused.add_term(t * shift + self.wedge[k - 1].reps[*wr], &(c * x) * y);
                }
            }
            out.add(&self.wedge_reduce(k, &fused));
        }
        Ok(out)
    }

    fn build_maurer_cartan(&mut self) -> Result<()> {
        let h = self.hopf().clone();
        let g = self.germ_dim();
        let mut mc = Vec::with_capacity(g);
        for t in 0..g {
            // dπ(x) = −π(x⁽¹⁾)π(x⁽²⁾) on the canonical lift x
            let lift = self.fodc.germs().lift(&SparseVec::unit(t));
            let mut fused = SparseVec::zero();
            for ((a, b), c) in h.coprod(&lift).iter() {
                let pa = self.fodc.germs().pi(&SparseVec::unit(*a));
                let pb = self.fodc.germs().pi(&SparseVec::unit(*b));
                for (i, x) in pa.iter() {
                    for (j, y) in pb.iter() {
                        fused.add_term(i * g + j, -(&(c * x) * y));
                    }
                }
            }
            mc.push(self.wedge_reduce(2, &fused));
        }
        self.mc = mc;
        Ok(())
    }

    fn build_mul_table(&mut self) {
        let mut table = BTreeMap::new();
        for a in 0..self.total {
            let (ka, _, _) = self.split(a);
            for b in 0..self.total {
                let (kb, _, _) = self.split(b);
                if ka + kb > self.max_degree {
                    continue;
                }
                table.insert((a, b), self.mul_basis_uncached(a, b));
            }
        }
        self.mul_table = table;
    }

    /// `(g ⊗ w)(h ⊗ v) = Σ g·h⁽¹⁾ ⊗ (w∘h⁽²⁾)·v`
    fn mul_basis_uncached(&self, a: usize, b: usize) -> Result<SparseVec> {
        let h = self.hopf();
        let (ka, ga, wa) = self.split(a);
        let (kb, gb, wb) = self.split(b);
        let k = ka + kb;
        let mut out = SparseVec::zero();
        for ((h1, h2), c) in h.coprod_basis(gb).iter() {
            let acted = self.wedge_act[ka][wa][*h2].clone()?;
            if acted.is_zero() {
                continue;
            }
            let wedge = self.wedge_mul(ka, &acted, kb, &SparseVec::unit(wb))?;
            if wedge.is_zero() {
                continue;
            }
            let left = h.mul_basis(ga, *h1)?;
            for (l, lc) in left.iter() {
                for (w, wc) in wedge.iter() {
                    out.add_term(self.flat(k, *l, *w), &(c * lc) * wc);
                }
            }
        }
        Ok(out)
    }

    fn build_d_table(&mut self) {
        let h = self.hopf().clone();
        let mut table = Vec::with_capacity(self.total);
        for a in 0..self.total {
            let (k, gi, wi) = self.split(a);
            if k + 1 > self.max_degree {
                table.push(Err(Error::DegreeOverflow(k + 1, self.max_degree)));
                continue;
            }
            table.push((|| {
                let mut out = SparseVec::zero();
                // g⁽¹⁾ ⊗ π(g⁽²⁾)·w
                for ((g1, g2), c) in h.coprod_basis(gi).iter() {
                    let germ = self.fodc.germs().pi(&SparseVec::unit(*g2));
                    if germ.is_zero() {
                        continue;
                    }
                    let germ_w = germ.map_indices(|t| Some(self.wedge[1].pos[&t]));
                    let wedge = self.wedge_mul(1, &germ_w, k, &SparseVec::unit(wi))?;
                    for (w, wc) in wedge.iter() {
                        out.add_term(self.flat(k + 1, *g1, *w), c * wc);
                    }
                }
                // g ⊗ d∧(w): graded Leibniz over the letters with Maurer–Cartan
                let letters = self.word_letters(k, wi);
                for j in 0..letters.len() {
                    let sign = if j % 2 == 0 {
                        Scalar::one()
                    } else {
                        Scalar::from_int(-1)
                    };
                    // left letters (length j), mc (degree 2), right letters
                    let g_dim = self.germ_dim();
                    let left_fused: usize = letters[..j].iter().fold(0, |acc, &t| acc * g_dim + t);
                    let right_fused: usize =
                        letters[j + 1..].iter().fold(0, |acc, &t| acc * g_dim + t);
                    let right_len = letters.len() - j - 1;
                    let right_count = g_dim.pow(right_len as u32);
                    let mut fused = SparseVec::zero();
                    for (m, mc_c) in self.mc[letters[j]].iter() {
                        let mc_fused = self.wedge[2].reps[*m];
                        let idx =
                            ((left_fused * g_dim * g_dim + mc_fused) * right_count) + right_fused;
                        fused.add_term(idx, mc_c * &sign);
                    }
                    let reduced = self.wedge_reduce(k + 1, &fused);
                    for (w, wc) in reduced.iter() {
                        out.add_term(self.flat(k + 1, gi, *w), wc.clone());
                    }
                }
                Ok(out)
            })());
        }
        self.d_table = table;
    }

    fn build_antipode_table(&mut self) {
        let h = self.hopf().clone();
        // S on germs: S¹(π(x)) = −π(x⁽²⁾)·S(x⁽³⁾)·S(S(x⁽¹⁾)) as a 1-form
        let germ_s: Vec<Result<SparseVec>> = (0..self.germ_dim())
            .map(|t| {
                let lift = self.fodc.germs().lift(&SparseVec::unit(t));
                let mut out = SparseVec::zero();
                for ((a, b, c), x) in h.sweedler3(&lift).iter() {
                    let germ = self.fodc.germs().pi(&SparseVec::unit(*b));
                    if germ.is_zero() {
                        continue;
                    }
                    // S(x⁽³⁾)·S(S(x⁽¹⁾)) in H
                    let factor =
                        h.mul_basis(h.antipode_basis(*c), h.antipode_basis(h.antipode_basis(*a)))?;
                    // (1⊗θ)·u = Σ u⁽¹⁾ ⊗ θ∘u⁽²⁾
                    for (u, uc) in factor.iter() {
                        for ((u1, u2), yc) in h.coprod_basis(*u).iter() {
                            let acted = self.fodc.module_action(&germ, &SparseVec::unit(*u2))?;
                            for (tt, tc) in acted.iter() {
                                out.add_term(
                                    self.flat(1, *u1, self.wedge[1].pos[tt]),
                                    -(&(&(x * uc) * yc) * tc),
                                );
                            }
                        }
                    }
                }
                Ok(out)
            })
            .collect();

        let mut table = Vec::with_capacity(self.total);
        for a in 0..self.total {
            let (k, gi, wi) = self.split(a);
            table.push((|| {
                // S(g·θ_1⋯θ_k) = (−1)^{k(k−1)/2} S(θ_k)⋯S(θ_1)·S(g)
                let letters = self.word_letters(k, wi);
                let mut acc = self.embed_h(&h.antipode(&SparseVec::unit(gi)));
                for &t in letters.iter() {
                    // multiply on the left, walking the word from the front:
                    // acc := S(θ_t) · acc
                    acc = self.mul(&germ_s[t].clone()?, &acc)?;
                }
                let sign = if (k * (k.saturating_sub(1)) / 2) % 2 == 0 {
                    Scalar::one()
                } else {
                    Scalar::from_int(-1)
                };
                Ok(acc.scaled(&sign))
            })());
        }
        self.antipode_table = table;
    }

    fn build_star_table(&mut self) {
        let h = self.hopf().clone();
        let mut table = Vec::with_capacity(self.total);
        for a in 0..self.total {
            let (k, gi, wi) = self.split(a);
            table.push((|| {
                // (g·θ_1⋯θ_k)∗ = (−1)^{k(k−1)/2} θ_k∗⋯θ_1∗ · g∗
                let letters = self.word_letters(k, wi);
                let mut word_star = SparseVec::unit(0); // wedge degree 0
                let mut deg = 0;
                for &t in letters.iter().rev() {
                    let st = self.fodc.star_germ(&SparseVec::unit(t));
                    let st_w = st.map_indices(|x| Some(self.wedge[1].pos[&x]));
                    word_star = self.wedge_mul(deg, &word_star, 1, &st_w)?;
                    deg += 1;
                }
                // multiply by g∗ from the right through the module action
                let g_star = h.star(&SparseVec::unit(gi));
                let mut out = SparseVec::zero();
                for (u, uc) in g_star.iter() {
                    for ((u1, u2), c) in h.coprod_basis(*u).iter() {
                        let mut acted = SparseVec::zero();
                        for (w, wc) in word_star.iter() {
                            acted.add_scaled(&self.wedge_act[deg][*w][*u2].clone()?, wc);
                        }
                        for (w, wc) in acted.iter() {
                            out.add_term(self.flat(k, *u1, *w), &(uc * c) * wc);
                        }
                    }
                }
                let sign = if (k * (k.saturating_sub(1)) / 2) % 2 == 0 {
                    Scalar::one()
                } else {
                    Scalar::from_int(-1)
                };
                Ok(out.scaled(&sign))
            })());
        }
        self.star_table = table;
    }

    fn build_coprod_table(&mut self) {
        let h = self.hopf().clone();
        let mut table = Vec::with_capacity(self.total);
        for a in 0..self.total {
            let (k, gi, wi) = self.split(a);
            table.push((|| {
                // Δ(g) as degree-0 pairs
                let mut acc = PairVec::zero();
                for ((a1, a2), c) in h.coprod_basis(gi).iter() {
                    acc.add_term(self.flat(0, *a1, 0), self.flat(0, *a2, 0), c.clone());
                }
                // multiply by Δ(θ) = 1⊗θ + ad(θ) for each letter
                for &t in self.word_letters(k, wi).iter() {
                    let mut dtheta = PairVec::zero();
                    // 1 ⊗ θ
                    for (i, x) in self.unit().iter() {
                        for (j, y) in self.embed_germ(&SparseVec::unit(t)).iter() {
                            dtheta.add_term(*i, *j, x * y);
                        }
                    }
                    // ad(θ) ∈ qg# ⊗ H
                    let ad = self.fodc.ad_germ(&SparseVec::unit(t))?;
                    for ((tt, hh), c) in ad.iter() {
                        for (i, x) in self.embed_germ(&SparseVec::unit(*tt)).iter() {
                            dtheta.add_term(*i, self.flat(0, *hh, 0), &(c * x) * &Scalar::one());
                        }
                    }
                    acc = self.mul_pairs(&acc, &dtheta)?;
                }
                Ok(acc)
            })());
        }
        self.coprod_table = table;
    }

    /// Koszul product on the tensor square of the envelope.
    pub fn mul_pairs(&self, x: &PairVec, y: &PairVec) -> Result<PairVec> {
        let mut out = PairVec::zero();
        for ((x1, x2), c) in x.iter() {
            let dx2 = self.degree_of(*x2);
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
                let right = self.mul_basis(*x2, *y2)?;
                for (l, lc) in left.iter() {
                    for (r, rc) in right.iter() {
                        out.add_term(*l, *r, &(&(c * e) * &sign) * &(lc * rc));
                    }
                }
            }
        }
        Ok(out)
    }

    // -- public structure maps -------------------------------------------------

    pub fn mul_basis(&self, a: usize, b: usize) -> Result<SparseVec> {
        match self.mul_table.get(&(a, b)) {
            Some(r) => r.clone(),
            None => {
                let ka = self.degree_of(a);
                let kb = self.degree_of(b);
                Err(Error::DegreeOverflow(ka + kb, self.max_degree))
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

    pub fn d_basis(&self, a: usize) -> Result<SparseVec> {
        self.d_table[a].clone()
    }

    pub fn d(&self, v: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::zero();
        for (i, c) in v.iter() {
            out.add_scaled(&self.d_basis(*i)?, c);
        }
        Ok(out)
    }

    pub fn counit_basis(&self, a: usize) -> Scalar {
        let (k, gi, _) = self.split(a);
        if k == 0 {
            self.hopf().counit_basis(gi)
        } else {
            Scalar::zero()
        }
    }

    pub fn counit(&self, v: &SparseVec) -> Scalar {
        let mut out = Scalar::zero();
        for (i, c) in v.iter() {
            out += &(c * &self.counit_basis(*i));
        }
        out
    }

    pub fn coprod_basis(&self, a: usize) -> Result<PairVec> {
        self.coprod_table[a].clone()
    }

    pub fn coprod(&self, v: &SparseVec) -> Result<PairVec> {
        let mut out = PairVec::zero();
        for (i, c) in v.iter() {
            out.add_scaled(&self.coprod_basis(*i)?, c);
        }
        Ok(out)
    }

    pub fn antipode_basis(&self, a: usize) -> Result<SparseVec> {
        self.antipode_table[a].clone()
    }

    pub fn antipode(&self, v: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::zero();
        for (i, c) in v.iter() {
            out.add_scaled(&self.antipode_basis(*i)?, c);
        }
        Ok(out)
    }

    pub fn star(&self, v: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::zero();
        for (i, c) in v.iter() {
            out.add_scaled(&self.star_table[*i].clone()?, &c.conj());
        }
        Ok(out)
    }

    /// Maurer–Cartan value `dπ(g)` computed through the tabulated `d` and
    /// through `−π(g⁽¹⁾)π(g⁽²⁾)` directly; both routes must agree.
    pub fn maurer_cartan(&self, g: &SparseVec) -> Result<SparseVec> {
        let h = self.hopf();
        let via_d = self.d(&self.embed_germ(&self.fodc.germs().pi(g)))?;
        let mut fused = SparseVec::zero();
        let gd = self.germ_dim();
        for ((a, b), c) in h.coprod(g).iter() {
            let pa = self.fodc.germs().pi(&SparseVec::unit(*a));
            let pb = self.fodc.germs().pi(&SparseVec::unit(*b));
            for (i, x) in pa.iter() {
                for (j, y) in pb.iter() {
                    fused.add_term(i * gd + j, -(&(c * x) * y));
                }
            }
        }
        let via_formula = self.embed_wedge(2, &self.wedge_reduce(2, &fused));
        if via_d != via_formula {
            return Err(Error::Internal(format!(
                "Maurer-Cartan mismatch at {}",
                h.render(g)
            )));
        }
        Ok(via_d)
    }

    /// Extended right adjoint coaction
    /// `Ad(t) = (−1)^{∂t⁽¹⁾∂t⁽²⁾} t⁽²⁾ ⊗ S(t⁽¹⁾)t⁽³⁾`.
    pub fn extended_ad(&self, v: &SparseVec) -> Result<PairVec> {
        // Δ²(v) over flats
        let mut tri = TripleVec::zero();
        for (i, c) in v.iter() {
            for ((a, b), x) in self.coprod_basis(*i)?.iter() {
                for ((a1, a2), y) in self.coprod_basis(*a)?.iter() {
                    tri.add_term(*a1, *a2, *b, &(c * x) * y);
                }
            }
        }
        let mut out = PairVec::zero();
        for ((a, b, c), x) in tri.iter() {
            let da = self.degree_of(*a);
            let db = self.degree_of(*b);
            let sign = if (da * db) % 2 == 0 {
                Scalar::one()
            } else {
                Scalar::from_int(-1)
            };
            let sa = self.antipode_basis(*a)?;
            let factor = self.mul(&sa, &SparseVec::unit(*c))?;
            for (f, fc) in factor.iter() {
                out.add_term(*b, *f, &(x * &sign) * fc);
            }
        }
        Ok(out)
    }

    /// Extended module action of `g ∈ H` on wedge coordinates in degree `k`.
    pub fn extended_module_action(
        &self,
        k: usize,
        w: &SparseVec,
        g: &SparseVec,
    ) -> Result<SparseVec> {
        let mut out = SparseVec::zero();
        for (wi, c) in w.iter() {
            for (gi, x) in g.iter() {
                out.add_scaled(&self.wedge_act[k][*wi][*gi].clone()?, &(c * x));
            }
        }
        Ok(out)
    }

    pub fn render(&self, v: &SparseVec) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = v
            .iter()
            .map(|(i, c)| {
                let (k, gi, wi) = self.split(*i);
                let h_label = self.hopf().space().label(gi);
                let w_label = &self.wedge[k].labels[wi];
                if k == 0 {
                    format!("({c})·{h_label}")
                } else {
                    format!("({c})·{h_label}·{w_label}")
                }
            })
            .collect();
        parts.join(" + ")
    }

    // -- verification ------------------------------------------------------------

    /// The full envelope law suite: differential laws, graded Hopf laws
    /// degreewise, star laws, ideal well-definedness, and the restriction
    /// checks tying degree 0 and the germs back to `H` and the calculus.
    pub fn verify_laws(&self) -> Vec<Check> {
        let mut checks = Vec::new();
        let h = self.hopf().clone();
        let idx: Vec<usize> = (0..self.total).collect();

        // d² = 0
        let low: Vec<usize> = idx
            .iter()
            .copied()
            .filter(|&i| self.degree_of(i) + 2 <= self.max_degree)
            .collect();
        let w = crate::exec::first_failure(&low, |&i| {
            match self.d_basis(i).and_then(|dv| self.d(&dv)) {
                Ok(dd) => (!dd.is_zero()).then(|| self.render(&SparseVec::unit(i))),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness("d-squared", "d∘d = 0", w));

        // graded Leibniz on pairs
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for &a in &idx {
            for &b in &idx {
                if self.degree_of(a) + self.degree_of(b) + 1 <= self.max_degree {
                    pairs.push((a, b));
                }
            }
        }
        let w = crate::exec::first_failure(&pairs, |&(a, b)| {
            let res = (|| -> Result<bool> {
                let ab = self.mul_basis(a, b)?;
                let lhs = self.d(&ab)?;
                let mut rhs = self.mul(&self.d_basis(a)?, &SparseVec::unit(b))?;
                let sign = if self.degree_of(a) % 2 == 0 {
                    Scalar::one()
                } else {
                    Scalar::from_int(-1)
                };
                rhs.add_scaled(&self.mul(&SparseVec::unit(a), &self.d_basis(b)?)?, &sign);
                Ok(lhs == rhs)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(format!(
                    "({}, {})",
                    self.render(&SparseVec::unit(a)),
                    self.render(&SparseVec::unit(b))
                )),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness(
            "graded-leibniz",
            "d(ab) = (da)b + (−1)^{∂a} a(db)",
            w,
        ));

        // Maurer–Cartan on the H basis
        let hidx: Vec<usize> = (0..h.dim()).collect();
        let w =
            crate::exec::first_failure(&hidx, |&i| match self.maurer_cartan(&SparseVec::unit(i)) {
                Ok(_) => None,
                Err(Error::TruncationOverflow { .. }) => None,
                Err(_) => Some(h.space().label(i).to_string()),
            });
        checks.push(Check::from_witness(
            "maurer-cartan",
            "dπ(g) = −π(g⁽¹⁾)π(g⁽²⁾)",
            w,
        ));

        // coassociativity degreewise
        let w = crate::exec::first_failure(&idx, |&i| {
            let res = (|| -> Result<bool> {
                let cp = self.coprod_basis(i)?;
                let mut left = TripleVec::zero();
                let mut right = TripleVec::zero();
                for ((a, b), x) in cp.iter() {
                    for ((a1, a2), y) in self.coprod_basis(*a)?.iter() {
                        left.add_term(*a1, *a2, *b, x * y);
                    }
                    for ((b1, b2), y) in self.coprod_basis(*b)?.iter() {
                        right.add_term(*a, *b1, *b2, x * y);
                    }
                }
                Ok(left == right)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(self.render(&SparseVec::unit(i))),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness(
            "coassociativity",
            "(Δ⊗id)Δ = (id⊗Δ)Δ",
            w,
        ));

        // counit law
        let w = crate::exec::first_failure(&idx, |&i| {
            let res = (|| -> Result<bool> {
                let cp = self.coprod_basis(i)?;
                let mut left = SparseVec::zero();
                let mut right = SparseVec::zero();
                for ((a, b), x) in cp.iter() {
                    left.add_term(*b, x * &self.counit_basis(*a));
                    right.add_term(*a, x * &self.counit_basis(*b));
                }
                let v = SparseVec::unit(i);
                Ok(left == v && right == v)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(self.render(&SparseVec::unit(i))),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness(
            "counit-law",
            "(ε⊗id)Δ = id = (id⊗ε)Δ",
            w,
        ));

        // antipode law degreewise
        let w = crate::exec::first_failure(&idx, |&i| {
            let res = (|| -> Result<bool> {
                let cp = self.coprod_basis(i)?;
                let target = self.unit().scaled(&self.counit_basis(i));
                let mut left = SparseVec::zero();
                let mut right = SparseVec::zero();
                for ((a, b), x) in cp.iter() {
                    left.add_scaled(
                        &self.mul(&self.antipode_basis(*a)?, &SparseVec::unit(*b))?,
                        x,
                    );
                    right.add_scaled(
                        &self.mul(&SparseVec::unit(*a), &self.antipode_basis(*b)?)?,
                        x,
                    );
                }
                Ok(left == target && right == target)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(self.render(&SparseVec::unit(i))),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness(
            "antipode-law",
            "m(S⊗id)Δ = 1ε = m(id⊗S)Δ",
            w,
        ));

        // Δ is a graded algebra morphism (pairs against degree ≤ 1 generators)
        let mut gen_pairs: Vec<(usize, usize)> = Vec::new();
        for &a in &idx {
            for &b in &idx {
                if self.degree_of(b) <= 1
                    && self.degree_of(a) + self.degree_of(b) <= self.max_degree
                {
                    gen_pairs.push((a, b));
                }
            }
        }
        let w = crate::exec::first_failure(&gen_pairs, |&(a, b)| {
            let res = (|| -> Result<bool> {
                let ab = self.mul_basis(a, b)?;
                let lhs = self.coprod(&ab)?;
                let rhs = self.mul_pairs(&self.coprod_basis(a)?, &self.coprod_basis(b)?)?;
                Ok(lhs == rhs)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(format!(
                    "({}, {})",
                    self.render(&SparseVec::unit(a)),
                    self.render(&SparseVec::unit(b))
                )),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness(
            "coproduct-homomorphism",
            "Δ(ab) = Δ(a)Δ(b) (Koszul signs)",
            w,
        ));

        // Δ commutes with d
        let low1: Vec<usize> = idx
            .iter()
            .copied()
            .filter(|&i| self.degree_of(i) + 1 <= self.max_degree)
            .collect();
        let w = crate::exec::first_failure(&low1, |&i| {
            let res = (|| -> Result<bool> {
                let lhs = self.coprod(&self.d_basis(i)?)?;
                let mut rhs = PairVec::zero();
                for ((a, b), x) in self.coprod_basis(i)?.iter() {
                    for (da, c) in self.d_basis(*a)?.iter() {
                        rhs.add_term(*da, *b, x * c);
                    }
                    let sign = if self.degree_of(*a) % 2 == 0 {
                        Scalar::one()
                    } else {
                        Scalar::from_int(-1)
                    };
                    for (db, c) in self.d_basis(*b)?.iter() {
                        rhs.add_term(*a, *db, &(x * c) * &sign);
                    }
                }
                Ok(lhs == rhs)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(self.render(&SparseVec::unit(i))),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness(
            "coproduct-commutes-d",
            "Δ∘d = (d⊗id + (−1)^∂⊗d)∘Δ",
            w,
        ));

        // S commutes with d
        let w = crate::exec::first_failure(&low1, |&i| {
            let res = (|| -> Result<bool> {
                Ok(self.antipode(&self.d_basis(i)?)? == self.d(&self.antipode_basis(i)?)?)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(self.render(&SparseVec::unit(i))),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness("antipode-commutes-d", "S∘d = d∘S", w));

        // star: graded involution, d∘∗ = ∗∘d, graded antimultiplicativity
        let w = crate::exec::first_failure(&idx, |&i| {
            let v = SparseVec::single(i, Scalar::gaussian(1, 2, 1, 3));
            let res = (|| -> Result<bool> { Ok(self.star(&self.star(&v)?)? == v) })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(self.render(&SparseVec::unit(i))),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness("star-involution", "∗∘∗ = id", w));

        let w = crate::exec::first_failure(&low1, |&i| {
            let res = (|| -> Result<bool> {
                Ok(self.star(&self.d_basis(i)?)? == self.d(&self.star(&SparseVec::unit(i))?)?)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(self.render(&SparseVec::unit(i))),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness("star-commutes-d", "∗∘d = d∘∗", w));

        let w = crate::exec::first_failure(&gen_pairs, |&(a, b)| {
            let res = (|| -> Result<bool> {
                let ab = self.mul_basis(a, b)?;
                let lhs = self.star(&ab)?;
                let sign = if (self.degree_of(a) * self.degree_of(b)) % 2 == 0 {
                    Scalar::one()
                } else {
                    Scalar::from_int(-1)
                };
                let rhs = self
                    .mul(
                        &self.star(&SparseVec::unit(b))?,
                        &self.star(&SparseVec::unit(a))?,
                    )?
                    .scaled(&sign);
                Ok(lhs == rhs)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(format!(
                    "({}, {})",
                    self.render(&SparseVec::unit(a)),
                    self.render(&SparseVec::unit(b))
                )),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness(
            "star-antimultiplicative",
            "(ab)∗ = (−1)^{∂a∂b} b∗a∗",
            w,
        ));

        // structure maps annihilate the degree-2 ideal generators
        checks.push(self.check_ideal_annihilation());

        // the germ antipode formula kills the calculus ideal, so S descends
        let ideal_basis = self.fodc.germs().ideal().closure_basis();
        let w = crate::exec::first_failure(&ideal_basis, |r| {
            let res = (|| -> Result<bool> {
                // S¹(r) = −π(r⁽²⁾)·S(r⁽³⁾)·S(S(r⁽¹⁾)) evaluated on r ∈ R
                let mut out = SparseVec::zero();
                for ((a, b, cc), x) in h.sweedler3(r).iter() {
                    let germ = self.fodc.germs().pi(&SparseVec::unit(*b));
                    if germ.is_zero() {
                        continue;
                    }
                    let factor = h.mul_basis(
                        h.antipode_basis(*cc),
                        h.antipode_basis(h.antipode_basis(*a)),
                    )?;
                    for (u, uc) in factor.iter() {
                        for ((u1, u2), yc) in h.coprod_basis(*u).iter() {
                            let acted = self.fodc.module_action(&germ, &SparseVec::unit(*u2))?;
                            for (tt, tc) in acted.iter() {
                                out.add_term(
                                    self.flat(1, *u1, self.wedge[1].pos[tt]),
                                    -(&(&(x * uc) * yc) * tc),
                                );
                            }
                        }
                    }
                }
                Ok(out.is_zero())
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(h.render(r)),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness(
            "antipode-well-defined",
            "S¹ vanishes on the calculus ideal",
            w,
        ));

        // restriction checks
        let w = crate::exec::first_failure(&hidx, |&i| {
            let res = (|| -> Result<bool> {
                // degree-0 product, coproduct, counit and Ad agree with H
                let v = SparseVec::unit(i);
                let emb = self.embed_h(&v);
                let mut cp_h = PairVec::zero();
                for ((a, b), c) in h.coprod_basis(i).iter() {
                    cp_h.add_term(self.flat(0, *a, 0), self.flat(0, *b, 0), c.clone());
                }
                if self.coprod(&emb)? != cp_h {
                    return Ok(false);
                }
                if self.counit(&emb) != h.counit(&v) {
                    return Ok(false);
                }
                let ad_h = h.adjoint_coaction(&v)?;
                let mut ad_emb = PairVec::zero();
                for ((a, b), c) in ad_h.iter() {
                    ad_emb.add_term(self.flat(0, *a, 0), self.flat(0, *b, 0), c.clone());
                }
                Ok(self.extended_ad(&emb)? == ad_emb)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(h.space().label(i).to_string()),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness(
            "degree-zero-restriction",
            "Γ∧ degree 0 = H (Δ, ε, Ad agree)",
            w,
        ));

        let germs: Vec<usize> = (0..self.germ_dim()).collect();
        let w = crate::exec::first_failure(&germs, |&t| {
            let res = (|| -> Result<bool> {
                // Δ(θ) = 1⊗θ + ad(θ) and Ad restriction
                let theta = SparseVec::unit(t);
                let emb = self.embed_germ(&theta);
                let mut expected = PairVec::zero();
                for (i, x) in self.unit().iter() {
                    for (j, y) in emb.iter() {
                        expected.add_term(*i, *j, x * y);
                    }
                }
                let ad = self.fodc.ad_germ(&theta)?;
                for ((tt, hh), c) in ad.iter() {
                    for (i, x) in self.embed_germ(&SparseVec::unit(*tt)).iter() {
                        expected.add_term(*i, self.flat(0, *hh, 0), c * x);
                    }
                }
                Ok(self.coprod(&emb)? == expected)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(self.fodc.germs().space().label(t).to_string()),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        checks.push(Check::from_witness(
            "germ-restriction",
            "Δ(θ) = 1⊗θ + ad(θ)",
            w,
        ));

        // the extended Ad collapses onto the germ-level ad exactly when the
        // coefficient algebra is cocommutative (abelian group or Laurent);
        // the cross-module equality is only a law there
        if self.is_cocommutative() {
            checks.push(self.check_ad_germ_restriction());
        }

        checks
    }

    pub fn is_cocommutative(&self) -> bool {
        match self.hopf().group() {
            Some(g) => g.is_abelian(),
            None => true, // Laurent monomials are group-like
        }
    }

    /// `Ad` restricted to germ generators equals the germ-level `ad`; holds
    /// for cocommutative coefficient algebras.
    pub fn check_ad_germ_restriction(&self) -> Check {
        let germs: Vec<usize> = (0..self.germ_dim()).collect();
        let w = crate::exec::first_failure(&germs, |&t| {
            let res = (|| -> Result<bool> {
                let theta = SparseVec::unit(t);
                let emb = self.embed_germ(&theta);
                let ad = self.fodc.ad_germ(&theta)?;
                let mut ad_pairs = PairVec::zero();
                for ((tt, hh), c) in ad.iter() {
                    for (i, x) in self.embed_germ(&SparseVec::unit(*tt)).iter() {
                        ad_pairs.add_term(*i, self.flat(0, *hh, 0), c * x);
                    }
                }
                Ok(self.extended_ad(&emb)? == ad_pairs)
            })();
            match res {
                Ok(true) => None,
                Ok(false) => Some(self.fodc.germs().space().label(t).to_string()),
                Err(Error::TruncationOverflow { .. }) => None,
                Err(e) => Some(format!("error: {e}")),
            }
        });
        Check::from_witness("ad-germ-restriction", "Ad|germs = ad", w)
    }

    /// Every structure map must send the degree-2 antisymmetrization
    /// generators to zero when evaluated through the quotient.
    fn check_ideal_annihilation(&self) -> Check {
        let name = "ideal-annihilation";
        let law = "structure maps vanish on the relation ideal";
        let h = self.hopf();
        let g = self.germ_dim();
        for r in self.fodc.germs().ideal().closure_basis() {
            // generator as a list of germ-pair terms
            let mut terms: Vec<(usize, usize, Scalar)> = Vec::new();
            for ((a, b), c) in h.coprod(&r).iter() {
                let pa = self.fodc.germs().pi(&SparseVec::unit(*a));
                let pb = self.fodc.germs().pi(&SparseVec::unit(*b));
                for (i, x) in pa.iter() {
                    for (j, y) in pb.iter() {
                        terms.push((*i, *j, &(c * x) * y));
                    }
                }
            }
            let witness = || format!("generator from {}", h.render(&r));
            // product route
            let mut prod = SparseVec::zero();
            for (a, b, c) in &terms {
                let pa = self.embed_germ(&SparseVec::unit(*a));
                let pb = self.embed_germ(&SparseVec::unit(*b));
                match self.mul(&pa, &pb) {
                    Ok(p) => prod.add_scaled(&p, c),
                    Err(_) => continue,
                }
            }
            if !prod.is_zero() {
                return Check::fail(name, law, witness());
            }
            // star route: (θa θb)∗ summed must vanish
            let mut star_sum = SparseVec::zero();
            for (a, b, c) in &terms {
                let pa = self.embed_germ(&SparseVec::unit(*a));
                let pb = self.embed_germ(&SparseVec::unit(*b));
                if let Ok(p) = self.mul(&pa, &pb).and_then(|p| self.star(&p)) {
                    star_sum.add_scaled(&p, &c.conj());
                }
            }
            if !star_sum.is_zero() {
                return Check::fail(name, law, witness());
            }
            // d route
            if self.max_degree >= 3 {
                let mut d_sum = SparseVec::zero();
                for (a, b, c) in &terms {
                    let pa = self.embed_germ(&SparseVec::unit(*a));
                    let pb = self.embed_germ(&SparseVec::unit(*b));
                    if let Ok(p) = self.mul(&pa, &pb).and_then(|p| self.d(&p)) {
                        d_sum.add_scaled(&p, c);
                    }
                }
                if !d_sum.is_zero() {
                    return Check::fail(name, law, witness());
                }
            }
            // module action route, against every H basis element
            for gb in 0..h.dim() {
                let mut act_sum = SparseVec::zero();
                let mut skipped = false;
                for (a, b, c) in &terms {
                    let mut acted = SparseVec::zero();
                    let mut ok = true;
                    for ((g1, g2), x) in h.coprod_basis(gb).iter() {
                        let ha = self
                            .fodc
                            .module_action(&SparseVec::unit(*a), &SparseVec::unit(*g1));
                        let hb = self
                            .fodc
                            .module_action(&SparseVec::unit(*b), &SparseVec::unit(*g2));
                        match (ha, hb) {
                            (Ok(ha), Ok(hb)) => {
                                for (i, u) in ha.iter() {
                                    for (j, v) in hb.iter() {
                                        acted.add_term(i * g + j, &(x * u) * v);
                                    }
                                }
                            }
                            _ => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if !ok {
                        skipped = true;
                        break;
                    }
                    act_sum.add_scaled(&acted, c);
                }
                if !skipped {
                    let reduced = self.wedge_reduce(2, &act_sum);
                    if !reduced.is_zero() {
                        return Check::fail(name, law, witness());
                    }
                }
            }
        }
        Check::pass(name, law)
    }
}

impl fmt::Debug for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Envelope({}, wedge dims {:?})",
            self.hopf().name(),
            self.wedge_dims()
        )
    }
}

fn word_label(germs: &crate::linalg::VectorSpace, g: usize, k: usize, fused: usize) -> String {
    if k == 0 {
        return "1".to_string();
    }
    let mut letters = vec![0usize; k];
    let mut f = fused;
    for slot in (0..k).rev() {
        letters[slot] = f % g;
        f /= g;
    }
    letters
        .iter()
        .map(|&t| germs.label(t).to_string())
        .collect::<Vec<_>>()
        .join("")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fodc::{laurent_classical_fodc, reflection_fodc, Fodc};
    use crate::group::FiniteGroup;

    fn laurent_envelope(radius: i64, max: usize) -> Envelope {
        let h = HopfAlgebra::laurent(-radius, radius).unwrap();
        Envelope::new(laurent_classical_fodc(&h).unwrap(), max).unwrap()
    }

    fn s3_envelope(max: usize) -> Envelope {
        let w = FiniteGroup::s3();
        let f = reflection_fodc(&w, &FiniteGroup::s3_reflections(&w)).unwrap();
        Envelope::new(f, max).unwrap()
    }

    #[test]
    fn laurent_classical_envelope_collapses_in_degree_two() {
        let env = laurent_envelope(5, 3);
        // Ω has no elements of degree n ≥ 2
        assert_eq!(env.wedge_dims(), vec![1, 1, 0, 0]);
    }

    #[test]
    fn antisymmetrization_generator_for_z_minus_one_squared() {
        // the degree-2 generator for g = (z−1)² is 2π(z)⊗π(z)
        let h = HopfAlgebra::laurent(-5, 5).unwrap();
        let f = laurent_classical_fodc(&h).unwrap();
        let g = SparseVec::from_terms([
            (h.monomial(2).unwrap(), Scalar::one()),
            (h.monomial(1).unwrap(), Scalar::from_int(-2)),
            (h.monomial(0).unwrap(), Scalar::one()),
        ]);
        let mut gen = SparseVec::zero();
        let gd = f.germ_dim();
        for ((a, b), c) in h.coprod(&g).iter() {
            let pa = f.germs().pi(&SparseVec::unit(*a));
            let pb = f.germs().pi(&SparseVec::unit(*b));
            for (i, x) in pa.iter() {
                for (j, y) in pb.iter() {
                    gen.add_term(i * gd + j, &(c * x) * y);
                }
            }
        }
        // germ space is 1-dimensional with basis π(z): index (0,0), coeff 2
        assert_eq!(gen, SparseVec::single(0, Scalar::from_int(2)));
    }

    #[test]
    fn classical_generator_is_symmetrized_product() {
        // on the classical calculus (R = Ker²ε) the degree-2 generator of
        // g = ab is π(b)⊗π(a) + π(a)⊗π(b); with a = z^m−1, b = z^n−1 both
        // sides reduce to 2mn·π(z)⊗π(z)
        let h = HopfAlgebra::laurent(-5, 5).unwrap();
        let f = laurent_classical_fodc(&h).unwrap();
        let gd = f.germ_dim();
        for (m, n) in [(1i64, 1i64), (1, 2), (2, 2), (-1, 2)] {
            let a = SparseVec::from_terms([
                (h.monomial(m).unwrap(), Scalar::one()),
                (h.monomial(0).unwrap(), Scalar::from_int(-1)),
            ]);
            let b = SparseVec::from_terms([
                (h.monomial(n).unwrap(), Scalar::one()),
                (h.monomial(0).unwrap(), Scalar::from_int(-1)),
            ]);
            let g = h.mul(&a, &b).unwrap();
            let mut gen = SparseVec::zero();
            for ((x, y), c) in h.coprod(&g).iter() {
                let px = f.germs().pi(&SparseVec::unit(*x));
                let py = f.germs().pi(&SparseVec::unit(*y));
                for (i, u) in px.iter() {
                    for (j, v) in py.iter() {
                        gen.add_term(i * gd + j, &(c * u) * v);
                    }
                }
            }
            let pa = f.germs().pi(&a);
            let pb = f.germs().pi(&b);
            let mut expected = SparseVec::zero();
            for (i, u) in pb.iter() {
                for (j, v) in pa.iter() {
                    expected.add_term(i * gd + j, u * v);
                }
            }
            for (i, u) in pa.iter() {
                for (j, v) in pb.iter() {
                    expected.add_term(i * gd + j, u * v);
                }
            }
            assert_eq!(gen, expected, "m={m} n={n}");
            assert_eq!(gen, SparseVec::single(0, Scalar::from_int(2 * m * n)));
        }
    }

    #[test]
    fn universal_calculus_degree_two_is_computed_not_assumed() {
        // R = 0 on Fun(Z2): no relations at all, wedge dims stay 1
        let h = HopfAlgebra::function_algebra(FiniteGroup::cyclic(2)).unwrap();
        let f = Fodc::from_ideal(&h, crate::fodc::universal_ideal()).unwrap();
        let env = Envelope::new(f, 3).unwrap();
        assert_eq!(env.wedge_dims(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn s3_reflection_envelope_dimensions() {
        let env = s3_envelope(3);
        let dims = env.wedge_dims();
        assert_eq!(dims[0], 1);
        assert_eq!(dims[1], 3);
        // two Ker²ε-relations cut the 9-dimensional square down
        assert!(dims[2] < 9 && dims[2] > 0, "dims = {dims:?}");
    }

    #[test]
    fn laurent_maurer_cartan_vanishes() {
        let env = laurent_envelope(4, 2);
        let h = env.hopf().clone();
        // dπ(z) = −π(z)π(z) = 0 because degree 2 collapses
        let z = SparseVec::unit(h.monomial(1).unwrap());
        let mc = env.maurer_cartan(&z).unwrap();
        assert!(mc.is_zero());
        // dπ(1) = 0
        assert!(env.maurer_cartan(&h.one()).unwrap().is_zero());
    }

    #[test]
    fn laurent_antipode_of_germ_is_minus_germ() {
        let env = laurent_envelope(4, 2);
        // S(π(z)) = −π(z): group-like z makes the S¹ formula collapse
        let theta = env.embed_germ(&SparseVec::unit(0));
        let s = env.antipode(&theta).unwrap();
        assert_eq!(s, theta.negated());
    }

    #[test]
    fn laurent_coproduct_of_germ() {
        let env = laurent_envelope(4, 2);
        // Δ(π(z)) = 1⊗π(z) + π(z)⊗1 since ad(π(z)) = π(z)⊗1
        let theta = env.embed_germ(&SparseVec::unit(0));
        let cp = env.coprod(&theta).unwrap();
        let mut expected = PairVec::zero();
        for (i, x) in env.unit().iter() {
            for (j, y) in theta.iter() {
                expected.add_term(*i, *j, x * y);
                expected.add_term(*j, *i, x * y);
            }
        }
        assert_eq!(cp, expected);
    }

    #[test]
    fn envelope_laws_pass_on_laurent_and_z2() {
        for c in laurent_envelope(3, 3).verify_laws() {
            assert!(c.passed, "laurent: {} {:?}", c.name, c.witness);
        }
        let h = HopfAlgebra::function_algebra(FiniteGroup::cyclic(2)).unwrap();
        let f = Fodc::from_ideal(&h, crate::fodc::universal_ideal()).unwrap();
        let env = Envelope::new(f, 3).unwrap();
        for c in env.verify_laws() {
            assert!(c.passed, "z2 universal: {} {:?}", c.name, c.witness);
        }
    }

    #[test]
    fn envelope_laws_pass_on_s3_to_degree_three() {
        let env = s3_envelope(3);
        for c in env.verify_laws() {
            assert!(c.passed, "s3: {} {:?}", c.name, c.witness);
        }
    }

    #[test]
    fn s3_maurer_cartan_brute_force() {
        let env = s3_envelope(3);
        let h = env.hopf().clone();
        // dπ(φ_σ) computed along both routes for every basis delta
        for i in 0..h.dim() {
            env.maurer_cartan(&SparseVec::unit(i)).unwrap();
        }
    }

    #[test]
    fn degree_cap_is_enforced() {
        let env = laurent_envelope(3, 2);
        assert!(matches!(
            Envelope::new(
                laurent_classical_fodc(&HopfAlgebra::laurent(-3, 3).unwrap()).unwrap(),
                1
            ),
            Err(Error::DegreeOverflow(1, 2))
        ));
        let _ = env;
    }

    #[test]
    fn extended_module_action_examples() {
        let env = s3_envelope(3);
        let h = env.hopf().clone();
        // 1∘δ_e = ε(δ_e)·1 = 1 in wedge degree 0
        let act = env
            .extended_module_action(
                0,
                &SparseVec::unit(0),
                &SparseVec::unit(h.group().unwrap().identity()),
            )
            .unwrap();
        assert_eq!(act, SparseVec::unit(0));
        // (θθ')∘1 = θθ'
        for w in 0..env.wedge_dims()[2] {
            let acted = env
                .extended_module_action(2, &SparseVec::unit(w), &h.one())
                .unwrap();
            assert_eq!(acted, SparseVec::unit(w));
        }
        // multiplicativity: (θ1θ2)∘g = (θ1∘g⁽¹⁾)(θ2∘g⁽²⁾) on the S3 basis
        let gd = env.germ_dim();
        for t1 in 0..gd {
            for t2 in 0..gd {
                let mut fused = SparseVec::zero();
                fused.add_term(t1 * gd + t2, Scalar::one());
                let word = env.wedge_reduce(2, &fused);
                for gb in 0..h.dim() {
                    let lhs = env
                        .extended_module_action(2, &word, &SparseVec::unit(gb))
                        .unwrap();
                    let mut rhs = SparseVec::zero();
                    for ((g1, g2), c) in h.coprod_basis(gb).iter() {
                        let a1 = env
                            .fodc()
                            .module_action(&SparseVec::unit(t1), &SparseVec::unit(*g1))
                            .unwrap();
                        let a2 = env
                            .fodc()
                            .module_action(&SparseVec::unit(t2), &SparseVec::unit(*g2))
                            .unwrap();
                        let mut f2 = SparseVec::zero();
                        for (i, x) in a1.iter() {
                            for (j, y) in a2.iter() {
                                f2.add_term(i * gd + j, &(c * x) * y);
                            }
                        }
                        rhs.add(&env.wedge_reduce(2, &f2));
                    }
                    assert_eq!(lhs, rhs, "t1={t1} t2={t2} g={gb}");
                }
            }
        }
    }
}
