//! Integer partitions: enumeration, conjugation, Casimir, centralizer orders
//! and symmetric-group characters.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("parts must be positive and weakly decreasing: {0:?}")]
    NotAPartition(Vec<u32>),
    #[error("size mismatch: |lambda| = {0}, |nu| = {1}")]
    SizeMismatch(u32, u32),
}

/// Weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl TryFrom<Vec<u32>> for Partition {
    type Error = PartitionError;
    fn try_from(parts: Vec<u32>) -> Result<Self, PartitionError> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.0
    }
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, PartitionError> {
        let ok = parts.iter().all(|&x| x > 0) && parts.windows(2).all(|w| w[0] >= w[1]);
        if ok {
            Ok(Partition(parts))
        } else {
            Err(PartitionError::NotAPartition(parts))
        }
    }

    /// Sorts and drops zeros.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Part `i` (0-based), zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn transpose(&self) -> Partition {
        let first = self.part(0);
        Partition((1..=first).map(|j| self.0.iter().take_while(|&&p| p >= j).count() as u32).collect())
    }

    /// Second Casimir `sum mu_i (mu_i - 2i + 1)`, 1-based `i`.
    pub fn kappa(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &p)| p as i64 * (p as i64 - 2 * (i as i64 + 1) + 1))
            .sum()
    }

    /// `|Aut nu| * prod nu_i`.
    pub fn z_aut(&self) -> u128 {
        let mut z: u128 = 1;
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            let mult = (j - i) as u128;
            z *= (1..=mult).product::<u128>() * (self.0[i] as u128).pow(mult as u32);
            i = j;
        }
        z
    }

    /// Young-diagram containment `other ⊆ self`.
    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.0.iter().zip(&self.0).all(|(a, b)| a <= b)
    }

    /// Hook lengths of all boxes.
    pub fn hooks(&self) -> Vec<u32> {
        let t = self.transpose();
        let mut out = Vec::with_capacity(self.size() as usize);
        for (i, &row) in self.0.iter().enumerate() {
            for j in 0..row as usize {
                out.push(row - j as u32 + t.part(j) - i as u32 - 1);
            }
        }
        out
    }

    /// All partitions contained in `self`.
    pub fn subpartitions(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(outer: &[u32], i: usize, bound: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            out.push(Partition(cur.clone()));
            if i >= outer.len() {
                return;
            }
            for v in (1..=bound.min(outer[i])).rev() {
                cur.push(v);
                rec(outer, i + 1, v, cur, out);
                cur.pop();
            }
        }
        rec(&self.0, 0, u32::MAX, &mut cur, &mut out);
        out
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All partitions of `n` in reverse-lexicographic order, `(n)` first.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rest: u32, bound: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for v in (1..=rest.min(bound)).rev() {
            cur.push(v);
            rec(rest - v, v, cur, out);
            cur.pop();
        }
    }
    rec(n, n, &mut cur, &mut out);
    out
}

/// Number of partitions of `n`.
pub fn partition_count(n: u32) -> usize {
    partitions_of(n).len()
}

/// Character `chi_lambda(nu)` of the symmetric group by Murnaghan-Nakayama.
pub fn mn_character(lambda: &Partition, nu: &Partition) -> Result<i64, PartitionError> {
    if lambda.size() != nu.size() {
        return Err(PartitionError::SizeMismatch(lambda.size(), nu.size()));
    }
    let mut memo = HashMap::new();
    Ok(mn_rec(beta_set(lambda), nu.parts(), &mut memo))
}

/// Beta-numbers `lambda_i + (l - i)` for 1-based `i`, decreasing.
fn beta_set(lambda: &Partition) -> Vec<u32> {
    let l = lambda.len() as u32;
    lambda.0.iter().enumerate().map(|(i, &p)| p + l - 1 - i as u32).collect()
}

fn mn_rec(beta: Vec<u32>, nu: &[u32], memo: &mut HashMap<(Vec<u32>, usize), i64>) -> i64 {
    let Some((&r, rest)) = nu.split_first() else {
        return 1;
    };
    let key = (beta.clone(), nu.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0;
    for i in 0..beta.len() {
        let b = beta[i];
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        // beads strictly between target and b give the leg length
        let between = beta.iter().filter(|&&x| x > target && x < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        let mut next = beta.clone();
        next[i] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        total += sign * mn_rec(next, rest, memo);
    }
    memo.insert(key, total);
    total
}
