//! Truncated multivariate Taylor expansions with complex coefficients.
//!
//! A [`TaylorPoly`] stores monomial coefficients `c_μ = f_μ / μ!` of
//! `f(z) = Σ c_μ z^μ` for all `|μ| ≤ trunc`; an absent key is a zero
//! coefficient. Truncation is by total degree.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::growth::{self, GrowthParams};
use crate::multiindex::MultiIndex;
use crate::scalar::{complex_abs, complex_is_finite, complex_is_negligible, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorPoly<S: Scalar> {
    dim: usize,
    trunc: usize,
    coeffs: BTreeMap<MultiIndex, Complex<S>>,
}

fn zero_c<S: Scalar>() -> Complex<S> {
    Complex::new(S::zero(), S::zero())
}

fn one_c<S: Scalar>() -> Complex<S> {
    Complex::new(S::one(), S::zero())
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

impl<S: Scalar> TaylorPoly<S> {
    pub fn zero(dim: usize, trunc: usize) -> Self {
        TaylorPoly {
            dim,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, trunc: usize, c: Complex<S>) -> Self {
        let mut f = Self::zero(dim, trunc);
        f.accumulate(MultiIndex::zero(dim), c);
        f
    }

    /// The polynomial `c·z^β`.
    pub fn monomial(dim: usize, beta: MultiIndex, c: Complex<S>, trunc: usize) -> Result<Self> {
        check_dim(dim, beta.dim())?;
        if beta.degree() > trunc {
            return Err(Error::DegreeExceedsTruncation {
                degree: beta.degree(),
                trunc,
            });
        }
        let mut f = Self::zero(dim, trunc);
        f.accumulate(beta, c);
        Ok(f)
    }

    /// The coordinate function `z_j`.
    pub fn variable(dim: usize, j: usize, trunc: usize) -> Result<Self> {
        Self::monomial(dim, MultiIndex::unit(dim, j), one_c(), trunc.max(1))
    }

    /// Builds a polynomial from explicit terms, summing repeated keys.
    ///
    /// Fails on dimension mismatch, on a key above `trunc`, or on a
    /// non-finite coefficient.
    pub fn from_terms<I>(dim: usize, trunc: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex<S>)>,
    {
        let mut f = Self::zero(dim, trunc);
        for (mu, c) in terms {
            check_dim(dim, mu.dim())?;
            if mu.degree() > trunc {
                return Err(Error::DegreeExceedsTruncation {
                    degree: mu.degree(),
                    trunc,
                });
            }
            if !complex_is_finite(&c) {
                return Err(Error::NonFinite(mu));
            }
            f.accumulate(mu, c);
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Complex<S>> {
        &self.coeffs
    }

    pub fn coeff(&self, mu: &MultiIndex) -> Complex<S> {
        self.coeffs.get(mu).cloned().unwrap_or_else(zero_c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest stored total degree.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().next_back().map(MultiIndex::degree)
    }

    /// Adds `c` to the coefficient of `z^μ`, dropping keys above the
    /// truncation and coefficients that become negligible.
    fn accumulate(&mut self, mu: MultiIndex, c: Complex<S>) {
        if mu.degree() > self.trunc {
            return;
        }
        match self.coeffs.get_mut(&mu) {
            Some(v) => {
                *v = v.clone() + c;
                if complex_is_negligible(v) {
                    self.coeffs.remove(&mu);
                }
            }
            None => {
                if !complex_is_negligible(&c) {
                    self.coeffs.insert(mu, c);
                }
            }
        }
    }

    /// Same coefficients in a container with a different truncation;
    /// lowering it drops the terms above the new bound.
    pub fn with_trunc(&self, trunc: usize) -> Self {
        TaylorPoly {
            dim: self.dim,
            trunc,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(mu, _)| mu.degree() <= trunc)
                .map(|(mu, c)| (mu.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms with `|μ| < m`.
    pub fn partial_below(&self, m: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.retain(|mu, _| mu.degree() < m);
        out
    }

    /// Terms with `|μ| ≥ m`.
    pub fn tail_from(&self, m: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.retain(|mu, _| mu.degree() >= m);
        out
    }

    /// Σ c_μ z^μ, summed in graded order.
    pub fn eval(&self, z: &[Complex<S>]) -> Result<Complex<S>> {
        check_dim(self.dim, z.len())?;
        let top = self.degree().unwrap_or(0);
        // powers[j][e] = z_j^e
        let powers: Vec<Vec<Complex<S>>> = z
            .iter()
            .map(|zj| {
                let mut row = Vec::with_capacity(top + 1);
                let mut acc = one_c::<S>();
                for _ in 0..=top {
                    row.push(acc.clone());
                    acc = acc * zj.clone();
                }
                row
            })
            .collect();
        let mut sum = zero_c::<S>();
        for (mu, c) in &self.coeffs {
            let mut term = c.clone();
            for (j, &e) in mu.entries().iter().enumerate() {
                if e > 0 {
                    term = term * powers[j][e as usize].clone();
                }
            }
            sum = sum + term;
        }
        Ok(sum)
    }

    /// ∂^α f. The result is truncated at `trunc − |α|` (floor 0), since
    /// coefficients above that depend on unknown terms of `f`.
    pub fn derivative(&self, alpha: &MultiIndex) -> Result<Self> {
        check_dim(self.dim, alpha.dim())?;
        let trunc = self.trunc.saturating_sub(alpha.degree());
        let mut out = Self::zero(self.dim, trunc);
        for (mu, c) in &self.coeffs {
            if !alpha.leq(mu)? {
                continue;
            }
            let factor = S::from_biguint(&mu.falling_factorial(alpha));
            out.accumulate(mu.sub(alpha)?, c.clone() * factor);
        }
        Ok(out)
    }

    /// f + g, truncated at the smaller truncation.
    pub fn add(&self, g: &Self) -> Result<Self> {
        check_dim(self.dim, g.dim)?;
        let mut out = self.with_trunc(self.trunc.min(g.trunc));
        for (mu, c) in &g.coeffs {
            out.accumulate(mu.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, g: &Self) -> Result<Self> {
        self.add(&g.neg())
    }

    pub fn neg(&self) -> Self {
        TaylorPoly {
            dim: self.dim,
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .map(|(mu, c)| (mu.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Complex<S>) -> Self {
        let mut out = Self::zero(self.dim, self.trunc);
        for (mu, c) in &self.coeffs {
            out.accumulate(mu.clone(), c.clone() * s.clone());
        }
        out
    }

    /// Multiplies by `c·z^shift`, keeping this truncation bound unless
    /// `trunc` lowers it.
    pub fn shift_scale(&self, shift: &MultiIndex, c: &Complex<S>, trunc: usize) -> Result<Self> {
        check_dim(self.dim, shift.dim())?;
        let mut out = Self::zero(self.dim, trunc.min(self.trunc));
        for (mu, v) in &self.coeffs {
            out.accumulate(mu.add(shift)?, v.clone() * c.clone());
        }
        Ok(out)
    }

    /// Cauchy product truncated at `min(trunc_f, trunc_g)`.
    pub fn mul(&self, g: &Self) -> Result<Self> {
        check_dim(self.dim, g.dim)?;
        let trunc = self.trunc.min(g.trunc);
        let mut out = Self::zero(self.dim, trunc);
        for (mu, a) in &self.coeffs {
            if mu.degree() > trunc {
                break;
            }
            let room = trunc - mu.degree();
            for (nu, b) in &g.coeffs {
                if nu.degree() > room {
                    break;
                }
                out.accumulate(mu.add(nu)?, a.clone() * b.clone());
            }
        }
        Ok(out)
    }

    /// Expansion of `z ↦ f(z + a)` by binomial re-expansion; exact on
    /// polynomial input, same truncation.
    pub fn translate(&self, a: &[Complex<S>]) -> Result<Self> {
        check_dim(self.dim, a.len())?;
        let mut out = Self::zero(self.dim, self.trunc);
        for (mu, c) in &self.coeffs {
            for nu in mu.enumerate_below() {
                let rest = mu.sub(&nu)?;
                let w = S::from_biguint(&mu.binomial(&nu));
                out.accumulate(nu, c.clone() * rest.pow(a) * w);
            }
        }
        Ok(out)
    }

    /// Expansion of `z ↦ f(λz)`: `c_μ ↦ c_μ λ^{|μ|}`.
    pub fn dilate(&self, lambda: &Complex<S>) -> Self {
        let mut out = Self::zero(self.dim, self.trunc);
        for (mu, c) in &self.coeffs {
            out.accumulate(mu.clone(), c.clone() * lambda.powu(mu.degree() as u32));
        }
        out
    }

    /// Σ_{|μ|=k} |c_μ| for k = 0..=degree; the radial majorant
    /// `M(r) = Σ_k m_k r^k` dominates `sup_{|z|=r} |f(z)|`.
    pub fn degree_magnitudes(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.degree().map_or(0, |d| d + 1)];
        for (mu, c) in &self.coeffs {
            m[mu.degree()] += complex_abs(c);
        }
        m
    }

    /// Upper bound for `‖f − Σ_{|μ|<m} c_μ z^μ‖_{p,τ}`, via the radial
    /// majorant of the tail.
    pub fn taylor_tail_norm(&self, m: usize, params: &GrowthParams) -> f64 {
        let tail = self.tail_from(m);
        if tail.is_zero() {
            return 0.0;
        }
        growth::norm_upper(&tail, params)
    }

    /// Largest coefficientwise |f_μ − g_μ| (absent keys count as zero).
    pub fn max_abs_diff(&self, g: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (mu, c) in &self.coeffs {
            worst = worst.max(complex_abs(&(c.clone() - g.coeff(mu))));
        }
        for (mu, c) in &g.coeffs {
            if !self.coeffs.contains_key(mu) {
                worst = worst.max(complex_abs(c));
            }
        }
        worst
    }

    /// Like [`max_abs_diff`](Self::max_abs_diff) but only over `|μ| ≤ deg`.
    pub fn max_abs_diff_up_to(&self, g: &Self, deg: usize) -> f64 {
        self.with_trunc(deg).max_abs_diff(&g.with_trunc(deg))
    }

    /// Converts every coefficient into another scalar field.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TaylorPoly<T> {
        let mut out = TaylorPoly::zero(self.dim, self.trunc);
        for (mu, c) in &self.coeffs {
            out.accumulate(mu.clone(), Complex::new(f(&c.re), f(&c.im)));
        }
        out
    }
}

/// Truncated exponential `Σ_{k≤trunc} (c·z_j)^k / k!` in variable `j`, with
/// exact `1/k!`.
pub fn exp_linear<S: Scalar>(dim: usize, j: usize, c: &Complex<S>, trunc: usize) -> TaylorPoly<S> {
    let mut f = TaylorPoly::zero(dim, trunc);
    let mut power = one_c::<S>();
    for k in 0..=trunc {
        let inv = BigRational::new(BigInt::one(), BigInt::from(crate::multiindex::factorial(k)));
        let mut idx = vec![0u32; dim];
        idx[j] = k as u32;
        f.accumulate(MultiIndex::new(idx), power.clone() * S::from_rational(&inv));
        power = power * c.clone();
    }
    f
}
