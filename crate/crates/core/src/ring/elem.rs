use super::exponent::HalfExponent;
use super::poly::{monomial_value, Coeff, LaurentPoly};
use super::RingError;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

/// The factor `(1 - x^character)^multiplicity`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DenomFactor {
    pub character: HalfExponent,
    pub multiplicity: u32,
}

/// Element of the localized ring: `numerator / prod (1 - x^c)^k`.
///
/// Always canonical: factors normalized and sorted by character, and no factor
/// divides the numerator.
#[derive(Clone, Debug)]
pub struct LocalizedElem {
    num: LaurentPoly,
    den: Vec<DenomFactor>,
}

/// Integrality flags of a canonical element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct IntegralityReport {
    pub in_r_integer: bool,
    pub denominators_of_two: bool,
}

impl LocalizedElem {
    pub fn zero(m: usize) -> Self {
        LocalizedElem { num: LaurentPoly::zero(m), den: Vec::new() }
    }

    pub fn one(m: usize) -> Self {
        Self::from_poly(LaurentPoly::one(m))
    }

    pub fn from_int(m: usize, c: i64) -> Self {
        Self::from_poly(LaurentPoly::constant(m, Coeff::from_integer(c.into())))
    }

    pub fn from_coeff(m: usize, c: Coeff) -> Self {
        Self::from_poly(LaurentPoly::constant(m, c))
    }

    pub fn monomial(e: HalfExponent, c: Coeff) -> Self {
        Self::from_poly(LaurentPoly::monomial(e, c))
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        LocalizedElem { num, den: Vec::new() }
    }

    /// `1 / (1 - x^c)`.
    pub fn inv_one_minus(c: &HalfExponent) -> Self {
        Self::new(LaurentPoly::one(c.len()), vec![DenomFactor { character: c.clone(), multiplicity: 1 }])
    }

    /// Canonicalizing constructor.
    pub fn new(num: LaurentPoly, den: Vec<DenomFactor>) -> Self {
        canonicalize(num, den)
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &[DenomFactor] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    /// True when the denominator is trivial.
    pub fn is_laurent(&self) -> bool {
        self.den.is_empty()
    }

    /// Re-runs canonicalization (idempotent on canonical input).
    pub fn canonicalize(&self) -> Self {
        canonicalize(self.num.clone(), self.den.clone())
    }

    /// Division by `(1 - x^c)`.
    pub fn div_one_minus(&self, c: &HalfExponent) -> Self {
        let mut den = self.den.clone();
        den.push(DenomFactor { character: c.clone(), multiplicity: 1 });
        canonicalize(self.num.clone(), den)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        LocalizedElem { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_monomial(&self, e: &HalfExponent, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        LocalizedElem { num: self.num.mul_monomial(e, c), den: self.den.clone() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Adams operation: every exponent multiplied by `k`.
    pub fn adams(&self, k: u32) -> Self {
        assert!(k >= 1, "Adams operation needs k >= 1");
        let k = k as i32;
        let num = self.num.map_exponents_monotone(|e| e.scale(k));
        let den = self
            .den
            .iter()
            .map(|f| DenomFactor { character: f.character.scale(k), multiplicity: f.multiplicity })
            .collect();
        LocalizedElem { num, den }
    }

    /// Pulls back along an exponent map `f` (a group homomorphism of lattices).
    pub fn map_exponents(
        &self,
        new_m: usize,
        f: impl Fn(&HalfExponent) -> HalfExponent,
    ) -> Result<Self, RingError> {
        let mut den = Vec::with_capacity(self.den.len());
        for d in &self.den {
            let c = f(&d.character);
            if c.is_zero() {
                return Err(RingError::Pole);
            }
            den.push(DenomFactor { character: c, multiplicity: d.multiplicity });
        }
        Ok(canonicalize(self.num.map_exponents(new_m, &f), den))
    }

    /// Exact value at a point given by values of `q_i^{1/2}`.
    pub fn eval_rational(&self, point: &[Coeff]) -> Result<Coeff, RingError> {
        if point.len() != self.nvars() {
            return Err(RingError::DimensionMismatch { expected: self.nvars(), found: point.len() });
        }
        if point.iter().any(|x| x.is_zero()) {
            return Err(RingError::Pole);
        }
        let mut d = Coeff::one();
        for f in &self.den {
            let v = Coeff::one() - monomial_value(&f.character, point);
            if v.is_zero() {
                return Err(RingError::Pole);
            }
            d *= num_traits::pow(v, f.multiplicity as usize);
        }
        Ok(self.num.eval(point) / d)
    }

    pub fn integrality_report(&self) -> IntegralityReport {
        IntegralityReport {
            in_r_integer: self.num.all_integer(),
            denominators_of_two: self.num.all_dyadic(),
        }
    }

    /// Multiplicative inverse, for units of the ring.
    ///
    /// Supports numerators of the form `c x^e prod (1 - x^{c_j})`; the binomial
    /// factors are found by trial division along directions between terms.
    pub fn inverse(&self) -> Result<Self, RingError> {
        if self.is_zero() {
            return Err(RingError::NonInvertible);
        }
        let Some((rest, chars)) = split_binomials(&self.num) else {
            return Err(RingError::NonInvertible);
        };
        let found: Vec<DenomFactor> =
            chars.into_iter().map(|character| DenomFactor { character, multiplicity: 1 }).collect();
        let (e, c) = rest.as_monomial().expect("nonzero remainder");
        let m = self.nvars();
        let mut num = LaurentPoly::monomial(-e, Coeff::one() / c);
        for f in &self.den {
            num = &num * &LaurentPoly::one_minus(&f.character).pow(f.multiplicity);
        }
        Ok(canonicalize(num, found).with_nvars(m))
    }

    fn with_nvars(self, m: usize) -> Self {
        debug_assert_eq!(self.nvars(), m);
        self
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, RingError> {
        Ok(self * &other.inverse()?)
    }

    /// Sum of many elements over one common denominator, canonicalized once.
    pub fn sum_all<'a>(m: usize, items: impl IntoIterator<Item = &'a LocalizedElem>) -> Self {
        let items: Vec<&LocalizedElem> = items.into_iter().filter(|x| !x.is_zero()).collect();
        match items.len() {
            0 => return Self::zero(m),
            1 => return items[0].clone(),
            _ => {}
        }
        let common = common_multiple(items.iter().map(|x| x.den.as_slice()));
        let mut cofactors: HashMap<&[DenomFactor], LaurentPoly> = HashMap::new();
        let mut num = LaurentPoly::zero(m);
        for x in &items {
            let cof = cofactors
                .entry(x.den.as_slice())
                .or_insert_with(|| cofactor(m, &common, &x.den));
            num = &num + &(&x.num * cof);
        }
        canonicalize(num, units_to_factors(&common))
    }

    /// Value equality: cross-multiplied numerators agree.
    pub fn equals(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        let common = common_multiple([self.den.as_slice(), other.den.as_slice()]);
        &self.num * &cofactor(self.nvars(), &common, &self.den) == &other.num * &cofactor(self.nvars(), &common, &other.den)
    }

    /// Product without the final cancellation pass.
    pub(crate) fn mul_uncancelled(&self, other: &Self) -> Self {
        LocalizedElem { num: &self.num * &other.num, den: merge_factors(&self.den, &other.den) }
    }
}

impl PartialEq for LocalizedElem {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

fn merge_factors(a: &[DenomFactor], b: &[DenomFactor]) -> Vec<DenomFactor> {
    let mut out: Vec<DenomFactor> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].character <= b[j].character);
        let f = if take_a {
            i += 1;
            &a[i - 1]
        } else {
            j += 1;
            &b[j - 1]
        };
        match out.last_mut() {
            Some(last) if last.character == f.character => last.multiplicity += f.multiplicity,
            _ => out.push(f.clone()),
        }
    }
    out
}

fn binomial_candidates(p: &LaurentPoly) -> Vec<HalfExponent> {
    let terms = p.terms();
    let anchors = [&terms[0].0, &terms[terms.len() - 1].0];
    let mut out: Vec<HalfExponent> = Vec::new();
    for a in anchors {
        for (e, _) in terms {
            let d = e - a;
            if d.is_zero() {
                continue;
            }
            let d = if d.is_normalized() { d } else { -&d };
            let g = d.content();
            let prim = HalfExponent::from(d.entries().iter().map(|x| x / g).collect::<Vec<_>>());
            for j in (1..=g).rev().filter(|j| g % j == 0) {
                let c = prim.scale(j);
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Writes `p` as a monomial times a product of binomials `1 - x^c`, backtracking
/// over trial divisors; the monomial part is returned as a one-term polynomial.
fn split_binomials(p: &LaurentPoly) -> Option<(LaurentPoly, Vec<HalfExponent>)> {
    if p.len() <= 1 {
        return Some((p.clone(), Vec::new()));
    }
    for c in binomial_candidates(p) {
        if let Some(q) = p.exact_divide(&c) {
            if let Some((rest, mut chars)) = split_binomials(&q) {
                chars.push(c);
                return Some((rest, chars));
            }
        }
    }
    None
}

/// Brings factors to normal form, merges them and cancels common binomials.
pub(crate) fn canonicalize(mut num: LaurentPoly, den: Vec<DenomFactor>) -> LocalizedElem {
    let m = num.nvars();
    if num.is_zero() {
        return LocalizedElem::zero(m);
    }
    let mut merged: Vec<DenomFactor> = Vec::with_capacity(den.len());
    for f in den {
        if f.multiplicity == 0 {
            continue;
        }
        assert!(!f.character.is_zero(), "denominator factor 1 - 1");
        let f = if f.character.is_normalized() {
            f
        } else {
            // 1/(1 - x^c) = -x^{-c} / (1 - x^{-c})
            let k = f.multiplicity;
            let sign = if k % 2 == 1 { -Coeff::one() } else { Coeff::one() };
            num = num.mul_monomial(&f.character.scale(-(k as i32)), &sign);
            DenomFactor { character: -&f.character, multiplicity: k }
        };
        merged.push(f);
    }
    merged.sort();
    let mut den: Vec<DenomFactor> = Vec::with_capacity(merged.len());
    for f in merged {
        match den.last_mut() {
            Some(last) if last.character == f.character => last.multiplicity += f.multiplicity,
            _ => den.push(f),
        }
    }
    for f in den.iter_mut() {
        while f.multiplicity > 0 {
            match num.exact_divide(&f.character) {
                Some(q) => {
                    num = q;
                    f.multiplicity -= 1;
                }
                None => break,
            }
        }
    }
    den.retain(|f| f.multiplicity > 0);
    LocalizedElem { num, den }
}

fn expand_units(den: &[DenomFactor]) -> impl Iterator<Item = &HalfExponent> {
    den.iter().flat_map(|f| std::iter::repeat_n(&f.character, f.multiplicity as usize))
}

/// A common multiple of denominators, as a list of unit factors `1 - x^c`.
///
/// A factor `1 - x^a` divides `1 - x^b` when `b = k a`, which lets one unit
/// absorb several smaller ones.
fn common_multiple<'a>(dens: impl IntoIterator<Item = &'a [DenomFactor]>) -> Vec<HalfExponent> {
    let mut big: Vec<HalfExponent> = Vec::new();
    for den in dens {
        let mut used = vec![false; big.len()];
        let mut rest: Vec<&HalfExponent> = Vec::new();
        for c in expand_units(den) {
            match (0..big.len()).find(|&i| !used[i] && &big[i] == c) {
                Some(i) => used[i] = true,
                None => rest.push(c),
            }
        }
        let mut pending: Vec<&HalfExponent> = Vec::new();
        for c in rest {
            match (0..big.len()).find(|&i| !used[i] && big[i].multiple_of(c).is_some()) {
                Some(i) => used[i] = true,
                None => pending.push(c),
            }
        }
        for c in pending {
            match (0..big.len()).find(|&i| !used[i] && c.multiple_of(&big[i]).is_some()) {
                Some(i) => {
                    big[i] = c.clone();
                    used[i] = true;
                }
                None => {
                    big.push(c.clone());
                    used.push(true);
                }
            }
        }
    }
    big.sort();
    big
}

/// `prod(common) / prod(den)` as a polynomial; `den` must divide `common`.
fn cofactor(m: usize, common: &[HalfExponent], den: &[DenomFactor]) -> LaurentPoly {
    let mut used = vec![false; common.len()];
    let mut rest: Vec<&HalfExponent> = Vec::new();
    for c in expand_units(den) {
        match (0..common.len()).find(|&i| !used[i] && &common[i] == c) {
            Some(i) => used[i] = true,
            None => rest.push(c),
        }
    }
    let mut factors: Vec<LaurentPoly> = Vec::new();
    for c in rest {
        let (i, k) = (0..common.len())
            .filter(|&i| !used[i])
            .find_map(|i| common[i].multiple_of(c).map(|k| (i, k)))
            .expect("common multiple covers every denominator");
        used[i] = true;
        factors.push(LaurentPoly::geometric(c, k));
    }
    for (i, c) in common.iter().enumerate() {
        if !used[i] {
            factors.push(LaurentPoly::one_minus(c));
        }
    }
    factors.sort_by_key(|f| f.len());
    factors.iter().fold(LaurentPoly::one(m), |acc, f| &acc * f)
}

fn units_to_factors(units: &[HalfExponent]) -> Vec<DenomFactor> {
    let mut out: Vec<DenomFactor> = Vec::new();
    for c in units {
        match out.last_mut() {
            Some(last) if &last.character == c => last.multiplicity += 1,
            _ => out.push(DenomFactor { character: c.clone(), multiplicity: 1 }),
        }
    }
    out
}

impl Add for &LocalizedElem {
    type Output = LocalizedElem;
    fn add(self, rhs: &LocalizedElem) -> LocalizedElem {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return canonicalize(&self.num + &rhs.num, self.den.clone());
        }
        LocalizedElem::sum_all(self.nvars(), [self, rhs])
    }
}

impl Neg for &LocalizedElem {
    type Output = LocalizedElem;
    fn neg(self) -> LocalizedElem {
        LocalizedElem { num: -&self.num, den: self.den.clone() }
    }
}

impl Sub for &LocalizedElem {
    type Output = LocalizedElem;
    fn sub(self, rhs: &LocalizedElem) -> LocalizedElem {
        self + &(-rhs)
    }
}

impl Mul for &LocalizedElem {
    type Output = LocalizedElem;
    fn mul(self, rhs: &LocalizedElem) -> LocalizedElem {
        if self.is_zero() || rhs.is_zero() {
            return LocalizedElem::zero(self.nvars());
        }
        if rhs.den.is_empty() && rhs.num.len() == 1 {
            let (e, c) = rhs.num.as_monomial().unwrap();
            return self.mul_monomial(e, c);
        }
        if self.den.is_empty() && self.num.len() == 1 {
            let (e, c) = self.num.as_monomial().unwrap();
            return rhs.mul_monomial(e, c);
        }
        let p = self.mul_uncancelled(rhs);
        canonicalize(p.num, p.den)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for LocalizedElem {
            type Output = LocalizedElem;
            fn $method(self, rhs: LocalizedElem) -> LocalizedElem {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
