use super::exponent::HalfExponent;
use super::lattice::unimodular_completion;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

pub type Coeff = BigRational;

/// Laurent polynomial in `q_1^{1/2}, ..., q_m^{1/2}` with rational coefficients.
///
/// Terms are kept sorted by exponent with no zero coefficients, so structural
/// equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LaurentPoly {
    nvars: usize,
    terms: Vec<(HalfExponent, Coeff)>,
}

impl LaurentPoly {
    pub fn zero(m: usize) -> Self {
        LaurentPoly { nvars: m, terms: Vec::new() }
    }

    pub fn one(m: usize) -> Self {
        Self::constant(m, Coeff::one())
    }

    pub fn constant(m: usize, c: Coeff) -> Self {
        Self::monomial(HalfExponent::zero(m), c)
    }

    pub fn monomial(e: HalfExponent, c: Coeff) -> Self {
        let nvars = e.len();
        let terms = if c.is_zero() { Vec::new() } else { vec![(e, c)] };
        LaurentPoly { nvars, terms }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(m: usize, terms: impl IntoIterator<Item = (HalfExponent, Coeff)>) -> Self {
        let mut acc: HashMap<HalfExponent, Coeff> = HashMap::new();
        for (e, c) in terms {
            debug_assert_eq!(e.len(), m);
            *acc.entry(e).or_insert_with(Coeff::zero) += c;
        }
        Self::from_map(m, acc)
    }

    fn from_map(m: usize, acc: HashMap<HalfExponent, Coeff>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        LaurentPoly { nvars: m, terms }
    }

    /// Trusted constructor for terms already sorted, merged and nonzero.
    pub(crate) fn from_sorted(m: usize, terms: Vec<(HalfExponent, Coeff)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        LaurentPoly { nvars: m, terms }
    }

    /// `1 - x^c`.
    pub fn one_minus(c: &HalfExponent) -> Self {
        let m = c.len();
        Self::from_terms(m, [(HalfExponent::zero(m), Coeff::one()), (c.clone(), -Coeff::one())])
    }

    /// `1 + x^c + ... + x^{(j-1)c}`, the quotient `(1 - x^{jc}) / (1 - x^c)`.
    pub fn geometric(c: &HalfExponent, j: i32) -> Self {
        Self::from_terms(c.len(), (0..j).map(|i| (c.scale(i), Coeff::one())))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(HalfExponent, Coeff)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_zero() && self.terms[0].1.is_one()
    }

    /// The single term of a monomial.
    pub fn as_monomial(&self) -> Option<(&HalfExponent, &Coeff)> {
        match self.terms.as_slice() {
            [(e, c)] => Some((e, c)),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect();
        LaurentPoly { nvars: self.nvars, terms }
    }

    /// Multiplication by `c * x^e`.
    pub fn mul_monomial(&self, e: &HalfExponent, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let terms = self.terms.iter().map(|(f, x)| (f + e, x * c)).collect();
        LaurentPoly { nvars: self.nvars, terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Applies a map on exponents; terms landing on the same exponent merge.
    pub fn map_exponents(&self, new_m: usize, f: impl Fn(&HalfExponent) -> HalfExponent) -> Self {
        Self::from_terms(new_m, self.terms.iter().map(|(e, c)| (f(e), c.clone())))
    }

    /// Exponent map preserving strict order (e.g. scaling by a positive integer).
    pub(crate) fn map_exponents_monotone(&self, f: impl Fn(&HalfExponent) -> HalfExponent) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (f(e), c.clone())).collect();
        Self::from_sorted(self.nvars, terms)
    }

    /// Value at a point given by the values of the generators `q_i^{1/2}`.
    pub fn eval(&self, point: &[Coeff]) -> Coeff {
        let mut total = Coeff::zero();
        for (e, c) in &self.terms {
            total += c * monomial_value(e, point);
        }
        total
    }

    /// Quotient `q` with `self = (1 - x^c) q`, if it exists.
    ///
    /// With `c = g p`, `p` primitive, a unimodular change of basis sends `p`
    /// to the first axis; the first new coordinate splits every exponent into a
    /// chain `base + t c`, and division by `1 - t` along each chain is a running sum.
    pub fn exact_divide(&self, c: &HalfExponent) -> Option<LaurentPoly> {
        assert!(!c.is_zero(), "exact_divide by 1 - 1");
        if self.is_zero() {
            return Some(self.clone());
        }
        let g = c.content() as i64;
        let prim: Vec<i64> = c.entries().iter().map(|&x| x as i64 / g).collect();
        let (u, _) = unimodular_completion(&prim);
        let row = &u[0];
        let mut chains: HashMap<HalfExponent, Vec<(i64, &Coeff)>> = HashMap::new();
        for (e, coeff) in &self.terms {
            let t = e.dot(row).div_euclid(g);
            let base = e - &c.scale(t as i32);
            chains.entry(base).or_default().push((t, coeff));
        }
        let mut out = Vec::with_capacity(self.terms.len());
        for (base, mut chain) in chains {
            chain.sort_unstable_by_key(|x| x.0);
            let mut run = Coeff::zero();
            let mut idx = 0;
            let (tmin, tmax) = (chain[0].0, chain[chain.len() - 1].0);
            for t in tmin..tmax {
                while idx < chain.len() && chain[idx].0 == t {
                    run += chain[idx].1;
                    idx += 1;
                }
                if !run.is_zero() {
                    out.push((&base + &c.scale(t as i32), run.clone()));
                }
            }
            while idx < chain.len() {
                run += chain[idx].1;
                idx += 1;
            }
            if !run.is_zero() {
                return None;
            }
        }
        out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Some(Self::from_sorted(self.nvars, out))
    }

    pub fn all_integer(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_integer())
    }

    /// True when every coefficient lies in `Z[1/2]`.
    pub fn all_dyadic(&self) -> bool {
        self.terms.iter().all(|(_, c)| {
            let d = c.denom();
            let mut d = d.clone();
            let two = BigInt::from(2);
            while (&d % &two).is_zero() {
                d /= &two;
            }
            d.is_one()
        })
    }

    /// Lowest and highest exponents in lexicographic order.
    pub fn extreme_exponents(&self) -> Option<(&HalfExponent, &HalfExponent)> {
        Some((&self.terms.first()?.0, &self.terms.last()?.0))
    }

    pub fn max_abs_coeff(&self) -> Coeff {
        self.terms.iter().map(|(_, c)| c.abs()).max().unwrap_or_else(Coeff::zero)
    }
}

/// Value of `x^e` at `point` (values of `q_i^{1/2}`).
pub fn monomial_value(e: &HalfExponent, point: &[Coeff]) -> Coeff {
    let mut v = Coeff::one();
    for (&k, x) in e.entries().iter().zip(point) {
        if k > 0 {
            v *= num_traits::pow(x.clone(), k as usize);
        } else if k < 0 {
            v /= num_traits::pow(x.clone(), (-k) as usize);
        }
    }
    v
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let (a, b) = (&self.terms, &rhs.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = &a[i].1 + &b[j].1;
                    if !s.is_zero() {
                        out.push((a[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        LaurentPoly { nvars: self.nvars, terms: out }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        LaurentPoly { nvars: self.nvars, terms }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero(self.nvars);
        }
        if let Some((e, c)) = rhs.as_monomial() {
            return self.mul_monomial(e, c);
        }
        if let Some((e, c)) = self.as_monomial() {
            return rhs.mul_monomial(e, c);
        }
        let mut acc: HashMap<HalfExponent, Coeff> =
            HashMap::with_capacity((self.len() * rhs.len()).min(1 << 16));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let c = ca * cb;
                match acc.entry(ea + eb) {
                    std::collections::hash_map::Entry::Occupied(mut o) => *o.get_mut() += c,
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                }
            }
        }
        LaurentPoly::from_map(self.nvars, acc)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
