use smallvec::SmallVec;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Exponent vector of a monomial in the half-power generators `q_i^{1/2}`.
///
/// Entry `c` at position `i` stands for `q_i^{c/2}`. Ordering is lexicographic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfExponent(SmallVec<[i32; 6]>);

impl HalfExponent {
    pub fn zero(m: usize) -> Self {
        HalfExponent(SmallVec::from_elem(0, m))
    }

    pub fn from_slice(entries: &[i32]) -> Self {
        HalfExponent(SmallVec::from_slice(entries))
    }

    /// Unit vector times `c` half-units.
    pub fn axis(m: usize, i: usize, c: i32) -> Self {
        let mut e = Self::zero(m);
        e.0[i] = c;
        e
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i32) -> Self {
        HalfExponent(self.0.iter().map(|&c| c * k).collect())
    }

    /// First nonzero entry, if any.
    pub fn leading(&self) -> Option<i32> {
        self.0.iter().copied().find(|&c| c != 0)
    }

    /// A character is normalized when its first nonzero entry is positive.
    pub fn is_normalized(&self) -> bool {
        self.leading().is_some_and(|c| c > 0)
    }

    /// Gcd of the absolute values of the entries.
    pub fn content(&self) -> i32 {
        self.0.iter().fold(0i32, |g, &c| num_integer::gcd(g, c))
    }

    /// `Some(k)` when `self = k * base` for an integer `k >= 1`.
    pub fn multiple_of(&self, base: &HalfExponent) -> Option<i32> {
        let i = base.0.iter().position(|&c| c != 0)?;
        if self.0[i] % base.0[i] != 0 {
            return None;
        }
        let k = self.0[i] / base.0[i];
        if k < 1 {
            return None;
        }
        self.0
            .iter()
            .zip(base.0.iter())
            .all(|(&a, &b)| a == k * b)
            .then_some(k)
    }

    pub fn dot(&self, v: &[i64]) -> i64 {
        self.0.iter().zip(v).map(|(&a, &b)| a as i64 * b).sum()
    }
}

impl Add for &HalfExponent {
    type Output = HalfExponent;
    fn add(self, rhs: &HalfExponent) -> HalfExponent {
        debug_assert_eq!(self.len(), rhs.len());
        HalfExponent(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &HalfExponent {
    type Output = HalfExponent;
    fn sub(self, rhs: &HalfExponent) -> HalfExponent {
        debug_assert_eq!(self.len(), rhs.len());
        HalfExponent(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &HalfExponent {
    type Output = HalfExponent;
    fn neg(self) -> HalfExponent {
        HalfExponent(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Debug for HalfExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl From<Vec<i32>> for HalfExponent {
    fn from(v: Vec<i32>) -> Self {
        HalfExponent(SmallVec::from_vec(v))
    }
}
