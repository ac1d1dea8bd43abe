//! Principal specializations of skew Schur functions at `q^{rho+gamma}` and
//! the three-leg topological vertex, as elements of the one-variable ring.

use crate::partitions::{partitions_of, Partition};
use crate::ring::{int, Coeff, HalfExponent, LaurentPoly, LocalizedElem};
use crate::series::{GradedSeries, Grading};
use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};
use thiserror::Error;

/// Element of the ring in the single variable `q` (context `m = 1`).
pub type UniRat = LocalizedElem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchurError {
    #[error("degenerate distinct direction: character is zero")]
    DegenerateDirection,
}

fn q_half(c: i32) -> HalfExponent {
    HalfExponent::from_slice(&[c])
}

/// `q^{c/2}` with coefficient `k`.
fn qmono(c: i32, k: i64) -> UniRat {
    LocalizedElem::monomial(q_half(c), int(k))
}

/// `1 / (q^{k/2} - q^{-k/2}) = -q^{k/2} / (1 - q^k)`.
pub fn inv_qdiff(k: i32) -> UniRat {
    qmono(k, -1).div_one_minus(&q_half(2 * k))
}

/// `p_k(q^{rho+mu}) = 1/(q^{k/2} - q^{-k/2}) + sum_i (q^{(-i+1/2+mu_i)k} - q^{(-i+1/2)k})`.
pub fn power_sum_spec(k: u32, mu: &Partition) -> UniRat {
    let k = k as i32;
    let mut corr = Vec::new();
    for (i, &p) in mu.parts().iter().enumerate() {
        let i = i as i32 + 1;
        corr.push((q_half((-2 * i + 1 + 2 * p as i32) * k), int(1)));
        corr.push((q_half((-2 * i + 1) * k), int(-1)));
    }
    &inv_qdiff(k) + &LocalizedElem::from_poly(LaurentPoly::from_terms(1, corr))
}

type HKey = (u32, Partition);

fn h_cache() -> &'static RwLock<HashMap<HKey, UniRat>> {
    static C: OnceLock<RwLock<HashMap<HKey, UniRat>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Complete homogeneous `h_n(q^{rho+gamma})` by Newton's identities.
pub fn complete_spec(n: u32, gamma: &Partition) -> UniRat {
    if n == 0 {
        return LocalizedElem::one(1);
    }
    let key = (n, gamma.clone());
    if let Some(v) = h_cache().read().unwrap().get(&key) {
        return v.clone();
    }
    let terms: Vec<UniRat> = (1..=n)
        .map(|k| power_sum_spec(k, gamma).mul_uncancelled(&complete_spec(n - k, gamma)))
        .collect();
    let v = LocalizedElem::sum_all(1, terms.iter()).scale(&Coeff::new(1.into(), (n as i64).into()));
    h_cache().write().unwrap().insert(key, v.clone());
    v
}

/// Determinant by Laplace expansion along rows, memoized on used columns.
fn determinant(entries: &[Vec<Option<UniRat>>]) -> UniRat {
    let n = entries.len();
    let mut memo: HashMap<u64, UniRat> = HashMap::new();
    fn rec(
        row: usize,
        used: u64,
        entries: &[Vec<Option<UniRat>>],
        memo: &mut HashMap<u64, UniRat>,
    ) -> UniRat {
        let n = entries.len();
        if row == n {
            return LocalizedElem::one(1);
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut terms = Vec::new();
        let mut pos = 0;
        for c in 0..n {
            if used & (1 << c) != 0 {
                continue;
            }
            if let Some(x) = &entries[row][c] {
                let minor = rec(row + 1, used | (1 << c), entries, memo);
                if !minor.is_zero() {
                    let t = x.mul_uncancelled(&minor);
                    terms.push(if pos % 2 == 0 { t } else { -&t });
                }
            }
            pos += 1;
        }
        let v = LocalizedElem::sum_all(1, terms.iter());
        memo.insert(used, v.clone());
        v
    }
    if n == 0 {
        return LocalizedElem::one(1);
    }
    rec(0, 0, entries, &mut memo)
}

/// `s_{alpha/beta}(q^{rho+gamma})`, zero unless `beta ⊆ alpha`.
///
/// Jacobi-Trudi: `det h_{alpha_i - beta_j - i + j}`.
pub fn skew_schur_spec(alpha: &Partition, beta: &Partition, gamma: &Partition) -> UniRat {
    if !alpha.contains(beta) {
        return LocalizedElem::zero(1);
    }
    let n = alpha.len();
    let entries: Vec<Vec<Option<UniRat>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let k = alpha.part(i) as i64 - beta.part(j) as i64 - i as i64 + j as i64;
                    (k >= 0).then(|| complete_spec(k as u32, gamma))
                })
                .collect()
        })
        .collect();
    determinant(&entries)
}

/// `s_lambda(q^rho)`.
pub fn schur_spec(lambda: &Partition) -> UniRat {
    skew_schur_spec(lambda, &Partition::empty(), &Partition::empty())
}

type VKey = (Partition, Partition, Partition);

fn vertex_cache() -> &'static RwLock<HashMap<VKey, UniRat>> {
    static C: OnceLock<RwLock<HashMap<VKey, UniRat>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Snapshot of the vertex memo, for persistence.
pub fn vertex_cache_entries() -> Vec<(VKey, UniRat)> {
    let mut v: Vec<_> = vertex_cache().read().unwrap().iter().map(|(k, x)| (k.clone(), x.clone())).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// Seeds the vertex memo with previously computed values.
pub fn preload_vertex_cache(entries: impl IntoIterator<Item = (VKey, UniRat)>) {
    let mut c = vertex_cache().write().unwrap();
    for (k, v) in entries {
        c.entry(k).or_insert(v);
    }
}

/// `W_{mu1,mu2,mu3}(q) = q^{kappa(mu1)/2} s_{mu3}(q^rho) sum_nu s_{mu1^t/nu}(q^{rho+mu3}) s_{mu2/nu}(q^{rho+mu3^t})`.
pub fn topological_vertex(mu1: &Partition, mu2: &Partition, mu3: &Partition) -> UniRat {
    let key = (mu1.clone(), mu2.clone(), mu3.clone());
    if let Some(v) = vertex_cache().read().unwrap().get(&key) {
        return v.clone();
    }
    let m1t = mu1.transpose();
    let m3t = mu3.transpose();
    let terms: Vec<UniRat> = m1t
        .subpartitions()
        .into_iter()
        .filter(|nu| mu2.contains(nu))
        .map(|nu| skew_schur_spec(&m1t, &nu, mu3).mul_uncancelled(&skew_schur_spec(mu2, &nu, &m3t)))
        .collect();
    let sum = LocalizedElem::sum_all(1, terms.iter());
    let v = (&schur_spec(mu3) * &sum).mul_monomial(&q_half(mu1.kappa() as i32), &int(1));
    vertex_cache().write().unwrap().insert(key, v.clone());
    v
}

/// Substitutes `q = prod q_i^{chi_i}`: `q^{j/2}` becomes half-exponent `j chi`.
pub fn substitute_character(f: &UniRat, chi: &[i64]) -> Result<LocalizedElem, SchurError> {
    if chi.iter().all(|&c| c == 0) {
        return Err(SchurError::DegenerateDirection);
    }
    let m = chi.len();
    let map = |e: &HalfExponent| -> HalfExponent {
        let j = e.entries()[0] as i64;
        HalfExponent::from(chi.iter().map(|&c| (j * c) as i32).collect::<Vec<_>>())
    };
    f.map_exponents(m, map).map_err(|_| SchurError::DegenerateDirection)
}

/// Checks both specialized skew Cauchy identities to `Q`-degree `cutoff`.
///
/// With `F = Q / ((q^{1/2} - q^{-1/2})(t^{1/2} - t^{-1/2}))` in variables `(q, t)`:
/// `sum_mu s_{mu/nu1}(Qq^rho) s_{mu/nu2}(t^rho) = Exp(F) sum_mu s_{nu2/mu}(Qq^rho) s_{nu1/mu}(t^rho)`,
/// and, for the transposed variant, `Exp(-F)` evaluated at `-Q` (the dual
/// Cauchy kernel `prod (1 + x_i y_j)`).
pub fn pexp_check_cauchy(nu1: &Partition, nu2: &Partition, cutoff: u32) -> bool {
    cauchy_sides(nu1, nu2, cutoff, false).map(|(l, r)| l.equals(&r)).unwrap_or(false)
        && cauchy_sides(nu1, nu2, cutoff, true).map(|(l, r)| l.equals(&r)).unwrap_or(false)
}

fn in_q(f: &UniRat) -> LocalizedElem {
    substitute_character(f, &[1, 0]).expect("nonzero")
}

fn in_t(f: &UniRat) -> LocalizedElem {
    substitute_character(f, &[0, 1]).expect("nonzero")
}

/// Both sides of the (possibly transposed) identity as series in one `Q`.
pub fn cauchy_sides(
    nu1: &Partition,
    nu2: &Partition,
    cutoff: u32,
    transposed: bool,
) -> Option<(GradedSeries, GradedSeries)> {
    let g = Grading::uniform(1);
    let empty = Partition::empty();
    let mut lhs = GradedSeries::zero(2, g.clone(), cutoff);
    let base = nu1.size();
    for d in 0..=cutoff {
        let mut acc = LocalizedElem::zero(2);
        for mu in partitions_of(d + base) {
            let a = if transposed { mu.transpose() } else { mu.clone() };
            let x = in_q(&skew_schur_spec(&a, nu1, &empty));
            let y = in_t(&skew_schur_spec(&mu, nu2, &empty));
            acc = &acc + &(&x * &y);
        }
        lhs.set(vec![d], acc);
    }
    let mut sum = GradedSeries::zero(2, g.clone(), cutoff);
    let (outer_x, outer_y) = if transposed { (nu2.transpose(), nu1.transpose()) } else { (nu2.clone(), nu1.clone()) };
    for mu in outer_x.subpartitions() {
        let inner_y = if transposed { mu.transpose() } else { mu.clone() };
        let a = skew_schur_spec(&outer_x, &mu, &empty);
        let b = skew_schur_spec(&outer_y, &inner_y, &empty);
        let deg = outer_x.size() - mu.size();
        let v = &in_q(&a) * &in_t(&b);
        let cur = sum.get(&[deg]);
        sum.set(vec![deg], &cur + &v);
    }
    let f = &in_q(&inv_qdiff(1)) * &in_t(&inv_qdiff(1));
    let sign = if transposed { -1 } else { 1 };
    let arg = GradedSeries::monomial_series(2, g, cutoff, vec![1], f.scale(&int(sign)));
    let mut kernel = arg.pexp();
    if transposed {
        kernel = kernel.flip_q_signs(&[-1]);
    }
    Some((lhs, kernel.mul(&sum).ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h1_is_p1() {
        assert!(complete_spec(1, &Partition::empty()).equals(&inv_qdiff(1)));
    }
}
