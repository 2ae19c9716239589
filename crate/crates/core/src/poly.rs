//! Exact multivariate polynomials and root-localized rational functions.

use std::collections::BTreeMap;
use std::fmt;

use crate::linalg::Matrix;
use crate::roots::RootSystem;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// A polynomial in `nvars` variables with Gaussian-rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    pub nvars: usize,
    terms: BTreeMap<Vec<u16>, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Scalar::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(exps, Scalar::one());
        p
    }

    /// The monomial with the given exponents.
    pub fn monomial(nvars: usize, exps: &[u16], c: Scalar) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Poly::zero(nvars);
        p.add_term(exps.to_vec(), c);
        p
    }

    /// A linear form `Σ c_i x_i`.
    pub fn linear_form(coeffs: &[Scalar]) -> Self {
        let mut p = Poly::zero(coeffs.len());
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut exps = vec![0; coeffs.len()];
                exps[i] = 1;
                p.add_term(exps, c.clone());
            }
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u16>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
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

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, x) in self.terms() {
            out.add_term(e.clone(), c * x);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    pub fn conj(&self) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in self.terms() {
            out.add_term(e.clone(), c.conj());
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn partial(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in self.terms() {
            if e[var] == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[var] -= 1;
            out.add_term(exps, c * &Scalar::from_int(e[var] as i64));
        }
        out
    }

    /// `f(Mx)`: substitutes `x_i ↦ Σ_j M_ij x_j`.
    pub fn apply_matrix(&self, m: &Matrix) -> Poly {
        assert_eq!(m.rows, self.nvars);
        let images: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                let coeffs: Vec<Scalar> = (0..self.nvars).map(|j| m.at(i, j).clone()).collect();
                Poly::linear_form(&coeffs)
            })
            .collect();
        let mut out = Poly::zero(self.nvars);
        for (e, c) in self.terms() {
            let mut term = Poly::constant(self.nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term = term.mul(&images[i]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Exact division by a nonzero linear form; errors with the remainder's
    /// witness when the division is not exact.
    pub fn divide_exact_by_linear(&self, form: &[Scalar]) -> Result<Poly> {
        let v = form
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| Error::DivisibilityFailure("zero linear form".into()))?;
        let lead = form[v].clone();
        // collect by the degree in x_v
        let mut by_deg: BTreeMap<u16, Poly> = BTreeMap::new();
        for (e, c) in self.terms() {
            let k = e[v];
            let mut rest = e.clone();
            rest[v] = 0;
            by_deg
                .entry(k)
                .or_insert_with(|| Poly::zero(self.nvars))
                .add_term(rest, c.clone());
        }
        let max_deg = by_deg.keys().next_back().copied().unwrap_or(0);
        // synthetic division, highest degree first
        let mut quotient = Poly::zero(self.nvars);
        let mut carry: BTreeMap<u16, Poly> = by_deg;
        for k in (1..=max_deg).rev() {
            let coeff = match carry.remove(&k) {
                Some(p) => p,
                None => continue,
            };
            if coeff.is_zero() {
                continue;
            }
            // q_k = coeff / lead, contributes q_k·x_v^{k−1}
            let qk = coeff.scale(&lead.inv());
            let mut shifted = Poly::zero(self.nvars);
            for (e, c) in qk.terms() {
                let mut exps = e.clone();
                exps[v] += k - 1;
                shifted.add_term(exps, c.clone());
            }
            quotient = quotient.add(&shifted);
            // subtract q_k·x_v^{k−1}·(rest of the form)
            for (j, fc) in form.iter().enumerate() {
                if j == v || fc.is_zero() {
                    continue;
                }
                let mut lower = Poly::zero(self.nvars);
                for (e, c) in qk.terms() {
                    let mut exps = e.clone();
                    exps[j] += 1;
                    lower.add_term(exps, c * fc);
                }
                let entry = carry.entry(k - 1).or_insert_with(|| Poly::zero(self.nvars));
                *entry = entry.sub(&lower);
            }
        }
        let remainder = carry.remove(&0).unwrap_or_else(|| Poly::zero(self.nvars));
        if !remainder.is_zero() {
            return Err(Error::DivisibilityFailure(format!(
                "remainder {remainder:?}"
            )));
        }
        Ok(quotient)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["x", "y", "z", "u", "v", "w"];
        let parts: Vec<String> = self
            .terms()
            .map(|(e, c)| {
                let vars: String = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| {
                        let n = names.get(i).copied().unwrap_or("t");
                        if k == 1 {
                            n.to_string()
                        } else {
                            format!("{n}^{k}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("·");
                if vars.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})·{vars}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A rational function `num / Π ⟨r_k|x⟩^{p_k}` with denominators drawn from
/// the positive-root linear forms of a root system.
#[derive(Clone)]
pub struct LocalizedPoly {
    pub num: Poly,
    /// positive-root index → power
    pub den: BTreeMap<usize, u32>,
}

impl LocalizedPoly {
    pub fn from_poly(p: Poly) -> Self {
        LocalizedPoly {
            num: p,
            den: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn den_poly(&self, rs: &RootSystem) -> Poly {
        let mut out = Poly::one(rs.dim);
        for (&r, &p) in &self.den {
            let form = Poly::linear_form(rs.root(r));
            for _ in 0..p {
                out = out.mul(&form);
            }
        }
        out
    }

    pub fn mul(&self, other: &LocalizedPoly) -> LocalizedPoly {
        let mut den = self.den.clone();
        for (&r, &p) in &other.den {
            *den.entry(r).or_insert(0) += p;
        }
        LocalizedPoly {
            num: self.num.mul(&other.num),
            den,
        }
    }

    pub fn add(&self, other: &LocalizedPoly, rs: &RootSystem) -> LocalizedPoly {
        // common denominator: max powers
        let mut den: BTreeMap<usize, u32> = self.den.clone();
        for (&r, &p) in &other.den {
            let e = den.entry(r).or_insert(0);
            *e = (*e).max(p);
        }
        let scale_up = |x: &LocalizedPoly| -> Poly {
            let mut num = x.num.clone();
            for (&r, &p) in &den {
                let have = x.den.get(&r).copied().unwrap_or(0);
                let form = Poly::linear_form(rs.root(r));
                for _ in have..p {
                    num = num.mul(&form);
                }
            }
            num
        };
        let num = scale_up(self).add(&scale_up(other));
        LocalizedPoly { num, den }.reduced(rs)
    }

    pub fn scale(&self, c: &Scalar) -> LocalizedPoly {
        LocalizedPoly {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Cancels denominator factors that divide the numerator exactly.
    pub fn reduced(&self, rs: &RootSystem) -> LocalizedPoly {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        let keys: Vec<usize> = den.keys().copied().collect();
        for r in keys {
            while den.get(&r).copied().unwrap_or(0) > 0 {
                match num.divide_exact_by_linear(rs.root(r)) {
                    Ok(q) => {
                        num = q;
                        let e = den.get_mut(&r).unwrap();
                        *e -= 1;
                        if *e == 0 {
                            den.remove(&r);
                        }
                    }
                    Err(_) => break,
                }
            }
        }
        LocalizedPoly { num, den }
    }

    /// Equality by cross-multiplication (exact).
    pub fn eq(&self, other: &LocalizedPoly, rs: &RootSystem) -> bool {
        let lhs = self.num.mul(&other.den_poly(rs));
        let rhs = other.num.mul(&self.den_poly(rs));
        lhs == rhs
    }
}

impl fmt::Debug for LocalizedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?}) / {:?}", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(2, 0)
    }

    fn y() -> Poly {
        Poly::var(2, 1)
    }

    #[test]
    fn arithmetic_and_derivative() {
        let f = x().mul(&x()).add(&y().scale(&Scalar::from_int(3)));
        assert_eq!(f.partial(0), x().scale(&Scalar::from_int(2)));
        assert_eq!(f.partial(1), Poly::constant(2, Scalar::from_int(3)));
        assert_eq!(f.degree(), 2);
    }

    #[test]
    fn exact_linear_division() {
        // (x² − y²) / (x − y) = x + y
        let f = x().mul(&x()).sub(&y().mul(&y()));
        let form = [Scalar::one(), Scalar::from_int(-1)];
        let q = f.divide_exact_by_linear(&form).unwrap();
        assert_eq!(q, x().add(&y()));
        // x² + y² is not divisible by x − y
        let g = x().mul(&x()).add(&y().mul(&y()));
        assert!(g.divide_exact_by_linear(&form).is_err());
    }

    #[test]
    fn division_oracle_by_multiplication() {
        // quotient times divisor must reproduce the dividend
        let form = [Scalar::from_int(2), Scalar::from_int(1)];
        let ell = Poly::linear_form(&form);
        let q0 = x().mul(&y()).add(&Poly::one(2));
        let f = q0.mul(&ell);
        let q = f.divide_exact_by_linear(&form).unwrap();
        assert_eq!(q, q0);
    }

    #[test]
    fn matrix_substitution() {
        // swap variables
        let m = Matrix::from_fn(2, 2, |i, j| {
            if i + j == 1 {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        let f = x().mul(&x()).add(&y());
        assert_eq!(f.apply_matrix(&m), y().mul(&y()).add(&x()));
    }

    #[test]
    fn localized_arithmetic() {
        let rs = RootSystem::build('B', 1).unwrap();
        // 1/x + 1/x = 2/x, and (x²)/x reduces to x
        let inv_x = LocalizedPoly {
            num: Poly::one(1),
            den: [(0usize, 1u32)].into_iter().collect(),
        };
        let two_over_x = inv_x.add(&inv_x, &rs);
        assert!(two_over_x.eq(
            &LocalizedPoly {
                num: Poly::constant(1, Scalar::from_int(2)),
                den: [(0usize, 1u32)].into_iter().collect(),
            },
            &rs
        ));
        let x1 = Poly::var(1, 0);
        let xsq_over_x = LocalizedPoly {
            num: x1.mul(&x1),
            den: [(0usize, 1u32)].into_iter().collect(),
        }
        .reduced(&rs);
        assert!(xsq_over_x.den.is_empty());
        assert_eq!(xsq_over_x.num, x1);
    }
}
