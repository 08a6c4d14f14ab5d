//! Multi-indices α ∈ Z≥0^n and the combinatorics built on them.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponent vector of fixed dimension.
///
/// The total order is graded lexicographic: lower total degree first, and
/// within a degree the larger leading exponent first, so that
/// `(2,0) < (1,1) < (0,2)`. Every sorted map keyed by `MultiIndex` therefore
/// iterates low degree first.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The unit index e_j.
    pub fn unit(dim: usize, j: usize) -> Self {
        let mut e = vec![0; dim];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// |α| = α_1 + … + α_n.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// α! = α_1! ⋯ α_n!, exact.
    pub fn factorial(&self) -> BigUint {
        self.0.iter().map(|&a| factorial(a as usize)).product()
    }

    /// Componentwise β ≤ α, with `self` as β.
    pub fn leq(&self, alpha: &MultiIndex) -> Result<bool> {
        check_dims(self, alpha)?;
        Ok(self.0.iter().zip(&alpha.0).all(|(b, a)| b <= a))
    }

    pub fn add(&self, other: &MultiIndex) -> Result<MultiIndex> {
        check_dims(self, other)?;
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// α − β, defined only when β ≤ α.
    pub fn sub(&self, beta: &MultiIndex) -> Result<MultiIndex> {
        if !beta.leq(self)? {
            return Err(Error::NotBelow {
                beta: beta.clone(),
                alpha: self.clone(),
            });
        }
        Ok(MultiIndex(
            self.0.iter().zip(&beta.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// μ!/(μ−α)! with `self` as μ; zero unless α ≤ μ.
    pub fn falling_factorial(&self, alpha: &MultiIndex) -> BigUint {
        let mut out = BigUint::one();
        for (&m, &a) in self.0.iter().zip(&alpha.0) {
            if a > m {
                return BigUint::default();
            }
            for j in (m - a + 1)..=m {
                out *= j;
            }
        }
        out
    }

    /// binom(α, δ) = α!/(δ!(α−δ)!), exact; zero unless δ ≤ α.
    pub fn binomial(&self, delta: &MultiIndex) -> BigUint {
        let mut out = BigUint::one();
        for (&a, &d) in self.0.iter().zip(&delta.0) {
            if d > a {
                return BigUint::default();
            }
            out *= binomial(a as usize, d as usize);
        }
        out
    }

    /// z^α for a complex point z.
    pub fn pow<S: Scalar>(&self, z: &[Complex<S>]) -> Complex<S> {
        let mut acc = Complex::new(S::one(), S::zero());
        for (zj, &a) in z.iter().zip(&self.0) {
            if a > 0 {
                acc = acc * zj.powu(a);
            }
        }
        acc
    }

    /// All β ≤ `self`, in graded lexicographic order.
    pub fn enumerate_below(&self) -> Vec<MultiIndex> {
        let mut out: Vec<MultiIndex> = Vec::new();
        let mut cur = vec![0u32; self.dim()];
        below_rec(&self.0, 0, &mut cur, &mut out);
        out.sort();
        out
    }
}

fn below_rec(bound: &[u32], j: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if j == bound.len() {
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in 0..=bound[j] {
        cur[j] = v;
        below_rec(bound, j + 1, cur, out);
    }
    cur[j] = 0;
}

fn check_dims(a: &MultiIndex, b: &MultiIndex) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        if self.0.len() == 1 {
            write!(f, ",")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// All α of dimension `n` with |α| = k, graded lexicographic order.
pub fn enumerate_degree(n: usize, k: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return out;
    }
    let mut cur = vec![0u32; n];
    degree_rec(n, 0, k as u32, &mut cur, &mut out);
    out
}

fn degree_rec(n: usize, j: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if j == n - 1 {
        cur[j] = left;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in (0..=left).rev() {
        cur[j] = v;
        degree_rec(n, j + 1, left - v, cur, out);
    }
}

/// All α with |α| ≤ k, low degree first.
pub fn enumerate_up_to(n: usize, k: usize) -> Vec<MultiIndex> {
    (0..=k).flat_map(|d| enumerate_degree(n, d)).collect()
}

pub fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, j| acc * j)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut num = BigUint::one();
    for j in 0..k {
        num *= n - j;
    }
    num / factorial(k)
}
