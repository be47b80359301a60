//! Multi-indices `α ∈ N_0^d`, shells `{α : |α| = n}` and their counts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multi-index `α = (α_1, …, α_d)`.
///
/// Ordering is lexicographic on the entries, which is also the order in
/// which [`shell`] enumerates a shell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|α| = Σ_j α_j`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn log_factorial(&self) -> f64 {
        log_factorial(self)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(entries: Vec<u32>) -> Self {
        Self(entries)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// All `α ∈ N_0^d` with `|α| = n`, in lexicographic order.
///
/// Panics if `d == 0`.
pub fn shell(d: usize, n: u32) -> Vec<MultiIndex> {
    assert!(d >= 1, "multi-index dimension must be positive");
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(d);
    fill_shell(d, n, &mut current, &mut out);
    out
}

fn fill_shell(d: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if current.len() + 1 == d {
        current.push(remaining);
        out.push(MultiIndex(current.clone()));
        current.pop();
        return;
    }
    for first in 0..=remaining {
        current.push(first);
        fill_shell(d, remaining - first, current, out);
        current.pop();
    }
}

/// `C(n + d - 1, d - 1)`, the number of multi-indices of order `n`.
pub fn shell_count(d: usize, n: u32) -> Result<u64> {
    assert!(d >= 1, "multi-index dimension must be positive");
    binomial(u64::from(n) + d as u64 - 1, d as u64 - 1).ok_or(Error::CountOverflow {
        dim: d,
        order: u64::from(n),
    })
}

/// `C(N + d, d)`, the number of multi-indices with `|α| ≤ N`.
pub fn total_count(d: usize, order_cap: u32) -> Result<u64> {
    assert!(d >= 1, "multi-index dimension must be positive");
    binomial(u64::from(order_cap) + d as u64, d as u64).ok_or(Error::CountOverflow {
        dim: d,
        order: u64::from(order_cap),
    })
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    // r = C(n - k + i, i) after step i; every intermediate is an exact integer.
    let mut r: u128 = 1;
    for i in 1..=u128::from(k) {
        r = r.checked_mul(u128::from(n - k) + i)? / i;
    }
    u64::try_from(r).ok()
}

/// `ln(m!)` by summing logarithms.
pub fn ln_factorial(m: u32) -> f64 {
    (2..=m).map(|i| f64::from(i).ln()).sum()
}

/// `ln(α!) = Σ_j ln(α_j!)`; exactly `0.0` for the zero index.
pub fn log_factorial(alpha: &MultiIndex) -> f64 {
    alpha.0.iter().map(|&a| ln_factorial(a)).sum()
}
