//! Truncated power series in curve-class variables `Q` with coefficients in
//! the localized ring, and the exponential/logarithm pairs acting on them.

use crate::ring::{int, Coeff, LocalizedElem};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Exponent vector of `Q`.
pub type Degree = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("constant term must be 1")]
    ConstantTermNotOne,
    #[error("incompatible series shapes")]
    Shape,
}

/// Linear form on degrees, positive on every nonzero effective class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading(pub Vec<u32>);

impl Grading {
    pub fn uniform(r: usize) -> Self {
        Grading(vec![1; r])
    }

    pub fn of(&self, d: &[u32]) -> u32 {
        self.0.iter().zip(d).map(|(a, b)| a * b).sum()
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// Every degree of grading `<= cutoff`, in lexicographic order.
    pub fn degrees_up_to(&self, cutoff: u32) -> Vec<Degree> {
        let r = self.0.len();
        let mut out = Vec::new();
        let mut cur = vec![0u32; r];
        fn rec(g: &[u32], i: usize, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Degree>) {
            if i == g.len() {
                out.push(cur.clone());
                return;
            }
            let mut k = 0;
            loop {
                cur[i] = k;
                rec(g, i + 1, budget - k * g[i], cur, out);
                if (k + 1) * g[i] > budget {
                    break;
                }
                k += 1;
            }
            cur[i] = 0;
        }
        rec(&self.0, 0, cutoff, &mut cur, &mut out);
        out
    }
}

/// `sum_d c_d Q^d` truncated at grading `cutoff`; zero coefficients are not stored.
#[derive(Clone, Debug)]
pub struct GradedSeries {
    pub nvars: usize,
    pub grading: Grading,
    pub cutoff: u32,
    coeffs: BTreeMap<Degree, LocalizedElem>,
}

impl GradedSeries {
    pub fn zero(nvars: usize, grading: Grading, cutoff: u32) -> Self {
        GradedSeries { nvars, grading, cutoff, coeffs: BTreeMap::new() }
    }

    pub fn one(nvars: usize, grading: Grading, cutoff: u32) -> Self {
        let mut s = Self::zero(nvars, grading, cutoff);
        let r = s.grading.rank();
        s.set(vec![0; r], LocalizedElem::one(nvars));
        s
    }

    pub fn rank(&self) -> usize {
        self.grading.rank()
    }

    pub fn set(&mut self, d: Degree, c: LocalizedElem) {
        if self.grading.of(&d) > self.cutoff {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&d);
        } else {
            self.coeffs.insert(d, c);
        }
    }

    pub fn get(&self, d: &[u32]) -> LocalizedElem {
        self.coeffs.get(d).cloned().unwrap_or_else(|| LocalizedElem::zero(self.nvars))
    }

    pub fn coeff(&self, d: &[u32]) -> Option<&LocalizedElem> {
        self.coeffs.get(d)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Degree, &LocalizedElem)> {
        self.coeffs.iter()
    }

    pub fn constant(&self) -> LocalizedElem {
        self.get(&vec![0; self.rank()])
    }

    fn same_shape(&self, other: &Self) -> Result<(), SeriesError> {
        if self.nvars == other.nvars && self.grading == other.grading {
            Ok(())
        } else {
            Err(SeriesError::Shape)
        }
    }

    /// Coefficient-wise value equality up to the smaller cutoff.
    pub fn equals(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }

    /// First degree (lexicographic) where the two series differ.
    pub fn first_mismatch(&self, other: &Self) -> Option<Degree> {
        let cutoff = self.cutoff.min(other.cutoff);
        for d in self.grading.degrees_up_to(cutoff) {
            if !self.get(&d).equals(&other.get(&d)) {
                return Some(d);
            }
        }
        None
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_shape(other)?;
        let mut out = Self::zero(self.nvars, self.grading.clone(), self.cutoff.min(other.cutoff));
        for d in out.grading.degrees_up_to(out.cutoff) {
            out.set(d.clone(), &self.get(&d) + &other.get(&d));
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_shape(other)?;
        let cutoff = self.cutoff.min(other.cutoff);
        let mut acc: BTreeMap<Degree, Vec<LocalizedElem>> = BTreeMap::new();
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                let d: Degree = a.iter().zip(b).map(|(i, j)| i + j).collect();
                if self.grading.of(&d) <= cutoff {
                    acc.entry(d).or_default().push(x.mul_uncancelled(y));
                }
            }
        }
        let mut out = Self::zero(self.nvars, self.grading.clone(), cutoff);
        for (d, terms) in acc {
            out.set(d, LocalizedElem::sum_all(self.nvars, terms.iter()));
        }
        Ok(out)
    }

    /// Adams operation on coefficients together with `Q^d -> Q^{kd}`.
    pub fn adams(&self, k: u32) -> Self {
        let mut out = Self::zero(self.nvars, self.grading.clone(), self.cutoff);
        for (d, c) in &self.coeffs {
            out.set(d.iter().map(|x| x * k).collect(), c.adams(k));
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = Self::zero(self.nvars, self.grading.clone(), self.cutoff);
        for (d, x) in &self.coeffs {
            out.set(d.clone(), x.scale(c));
        }
        out
    }

    /// Substitutes `Q_i -> s_i Q_i` for signs `s_i = ±1`.
    pub fn flip_q_signs(&self, signs: &[i64]) -> Self {
        let mut out = Self::zero(self.nvars, self.grading.clone(), self.cutoff);
        for (d, x) in &self.coeffs {
            let neg = d.iter().zip(signs).filter(|(&e, &s)| s < 0 && e % 2 == 1).count() % 2 == 1;
            out.set(d.clone(), if neg { -x } else { x.clone() });
        }
        out
    }

    /// Nonzero degrees in order of increasing grading, then lexicographic.
    fn positive_degrees(&self) -> Vec<Degree> {
        let mut ds: Vec<Degree> = self
            .grading
            .degrees_up_to(self.cutoff)
            .into_iter()
            .filter(|d| d.iter().any(|&x| x > 0))
            .collect();
        ds.sort_by_key(|d| (self.grading.of(d), d.clone()));
        ds
    }

    /// Formal logarithm of a series with constant term 1.
    ///
    /// With the grading derivation `D Q^d = g(d) Q^d`, `D G = (D L) G` gives
    /// `g(d) L_d = g(d) G_d - sum_{a+b=d, a,b != 0} g(a) L_a G_b`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.constant().is_one() {
            return Err(SeriesError::ConstantTermNotOne);
        }
        let mut out = Self::zero(self.nvars, self.grading.clone(), self.cutoff);
        for d in self.positive_degrees() {
            let gd = self.grading.of(&d);
            let mut terms: Vec<LocalizedElem> = vec![self.get(&d)];
            for (a, la) in out.coeffs.iter() {
                if let Some(b) = sub_degree(&d, a) {
                    if let Some(gb) = self.coeffs.get(&b) {
                        if b.iter().any(|&x| x > 0) {
                            let w = Coeff::new((self.grading.of(a) as i64).into(), (gd as i64).into());
                            terms.push(la.mul_uncancelled(gb).scale(&-w));
                        }
                    }
                }
            }
            let v = LocalizedElem::sum_all(self.nvars, terms.iter());
            out.set(d, v);
        }
        Ok(out)
    }

    /// Formal exponential of a series with zero constant term.
    pub fn exp(&self) -> Self {
        let mut out = Self::one(self.nvars, self.grading.clone(), self.cutoff);
        for d in self.positive_degrees() {
            let gd = self.grading.of(&d);
            let mut terms: Vec<LocalizedElem> = Vec::new();
            for (a, la) in self.coeffs.iter() {
                if a.iter().all(|&x| x == 0) {
                    continue;
                }
                if let Some(b) = sub_degree(&d, a) {
                    if let Some(gb) = out.coeffs.get(&b) {
                        let w = Coeff::new((self.grading.of(a) as i64).into(), (gd as i64).into());
                        terms.push(la.mul_uncancelled(gb).scale(&w));
                    }
                }
            }
            let v = LocalizedElem::sum_all(self.nvars, terms.iter());
            out.set(d, v);
        }
        out
    }

    /// Plethystic exponential `exp(sum_k Psi_k(F)/k)` of a series without constant term.
    pub fn pexp(&self) -> Self {
        let mut arg = Self::zero(self.nvars, self.grading.clone(), self.cutoff);
        for k in 1..=self.cutoff.max(1) {
            let term = self.adams(k).scale(&Coeff::new(1.into(), (k as i64).into()));
            arg = arg.add(&term).expect("same shape");
        }
        arg.exp()
    }

    /// Plethystic logarithm: `Omega_d = sum_{k | gcd d} mu(k)/k Psi_k(L_{d/k})`.
    pub fn plog(&self) -> Result<Self, SeriesError> {
        let l = self.log()?;
        let mut out = Self::zero(self.nvars, self.grading.clone(), self.cutoff);
        for d in self.positive_degrees() {
            let g = d.iter().fold(0u32, |g, &x| g.gcd(&x));
            let mut terms = Vec::new();
            for k in 1..=g {
                if g % k != 0 {
                    continue;
                }
                let mu = mobius(k);
                if mu == 0 {
                    continue;
                }
                let dk: Degree = d.iter().map(|x| x / k).collect();
                if let Some(c) = l.coeffs.get(&dk) {
                    terms.push(c.adams(k).scale(&Coeff::new(mu.into(), (k as i64).into())));
                }
            }
            out.set(d, LocalizedElem::sum_all(self.nvars, terms.iter()));
        }
        Ok(out)
    }

    /// Connected series rebuilt from indices: `sum_k Psi_k(Omega)/k`.
    pub fn divisor_sum(&self) -> Self {
        let mut out = Self::zero(self.nvars, self.grading.clone(), self.cutoff);
        for k in 1..=self.cutoff.max(1) {
            let term = self.adams(k).scale(&Coeff::new(1.into(), (k as i64).into()));
            out = out.add(&term).expect("same shape");
        }
        out
    }

    /// Series with the same shape whose coefficients are `f(d)`.
    pub fn from_fn(
        nvars: usize,
        grading: Grading,
        cutoff: u32,
        mut f: impl FnMut(&[u32]) -> LocalizedElem,
    ) -> Self {
        let mut out = Self::zero(nvars, grading, cutoff);
        for d in out.grading.degrees_up_to(cutoff) {
            let v = f(&d);
            out.set(d, v);
        }
        out
    }

    pub fn is_one_at(&self, d: &[u32]) -> bool {
        self.get(d).is_one()
    }

    /// Coefficient at a single variable power `Q_i^n` (rank-one convenience).
    pub fn monomial_series(nvars: usize, grading: Grading, cutoff: u32, d: Degree, c: LocalizedElem) -> Self {
        let mut s = Self::zero(nvars, grading, cutoff);
        s.set(d, c);
        s
    }
}

fn sub_degree(d: &[u32], a: &[u32]) -> Option<Degree> {
    d.iter().zip(a).map(|(x, y)| x.checked_sub(*y)).collect()
}

/// Möbius function.
pub fn mobius(n: u32) -> i64 {
    let mut n = n;
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `int(c)` as a constant element.
pub fn constant(m: usize, c: i64) -> LocalizedElem {
    LocalizedElem::from_coeff(m, int(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_values() {
        let v: Vec<i64> = (1..=10).map(mobius).collect();
        assert_eq!(v, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }

    #[test]
    fn degrees_enumerate() {
        assert_eq!(Grading(vec![1, 2]).degrees_up_to(2), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![2, 0]]);
    }
}
