//! Infinite-order differential operators `P = Σ_α a_α(z) ∂^α`, stored up to
//! a finite order `|α| ≤ max_order`.
//!
//! Polynomial semantics: the stored coefficients of a [`TaylorPoly`] are
//! taken as the function itself. Applying a symbol to `f` therefore yields
//! `Σ a_α ∂^α f` truncated at `f.trunc()`, and the omitted orders
//! `|α| > max_order` are accounted for only through a growth certificate.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::{
    check_condition, default_b_grid, default_eps_grid, norm_upper, ClassVerdict, Condition,
    GrowthParams, Mode, Status,
};
use crate::multiindex::MultiIndex;
use crate::scalar::Scalar;
use crate::series::TaylorPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSymbol<S: Scalar> {
    dim: usize,
    max_order: usize,
    coeffs: BTreeMap<MultiIndex, TaylorPoly<S>>,
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

impl<S: Scalar> OperatorSymbol<S> {
    /// The zero operator of order `max_order`.
    pub fn new(dim: usize, max_order: usize) -> Self {
        OperatorSymbol {
            dim,
            max_order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn zero(dim: usize, max_order: usize) -> Self {
        Self::new(dim, max_order)
    }

    /// `a_0 = 1`, everything else zero.
    pub fn identity(dim: usize, max_order: usize, coeff_trunc: usize) -> Self {
        let mut s = Self::new(dim, max_order);
        let one = Complex::new(S::one(), S::zero());
        s.coeffs.insert(
            MultiIndex::zero(dim),
            TaylorPoly::constant(dim, coeff_trunc, one),
        );
        s
    }

    /// Sets `a_α`; a zero polynomial removes the entry.
    pub fn insert(&mut self, alpha: MultiIndex, a: TaylorPoly<S>) -> Result<()> {
        check_dim(self.dim, alpha.dim())?;
        check_dim(self.dim, a.dim())?;
        if alpha.degree() > self.max_order {
            return Err(Error::DegreeExceedsTruncation {
                degree: alpha.degree(),
                trunc: self.max_order,
            });
        }
        if a.is_zero() {
            self.coeffs.remove(&alpha);
        } else {
            self.coeffs.insert(alpha, a);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Non-zero coefficients in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &TaylorPoly<S>)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Option<&TaylorPoly<S>> {
        self.coeffs.get(alpha)
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

    /// Largest truncation among the stored coefficients.
    pub fn coeff_trunc(&self) -> Option<usize> {
        self.coeffs.values().map(|a| a.trunc()).max()
    }

    /// Drops orders above `n`.
    pub fn truncate_order(&self, n: usize) -> Self {
        OperatorSymbol {
            dim: self.dim,
            max_order: n,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(a, _)| a.degree() <= n)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Complex<S>) -> Self {
        let mut out = Self::new(self.dim, self.max_order);
        for (alpha, a) in &self.coeffs {
            let v = a.scale(s);
            if !v.is_zero() {
                out.coeffs.insert(alpha.clone(), v);
            }
        }
        out
    }

    /// Largest coefficientwise difference over all `a_α`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        let zero = TaylorPoly::zero(self.dim, 0);
        for (alpha, a) in &self.coeffs {
            worst = worst.max(a.max_abs_diff(other.coeff(alpha).unwrap_or(&zero)));
        }
        for (alpha, b) in &other.coeffs {
            if !self.coeffs.contains_key(alpha) {
                worst = worst.max(b.max_abs_diff(&zero));
            }
        }
        worst
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> OperatorSymbol<T> {
        let mut out = OperatorSymbol::new(self.dim, self.max_order);
        for (alpha, a) in &self.coeffs {
            let v = a.map_scalar(&f);
            if !v.is_zero() {
                out.coeffs.insert(alpha.clone(), v);
            }
        }
        out
    }

    /// `Σ_α a_α ∂^α f` over the stored orders, truncated at `f.trunc()`.
    /// Orders with `∂^α f = 0` are skipped.
    pub fn act(&self, f: &TaylorPoly<S>) -> Result<(TaylorPoly<S>, usize)> {
        check_dim(self.dim, f.dim())?;
        let trunc = f.trunc();
        let top = f.degree();
        let mut out = TaylorPoly::zero(self.dim, trunc);
        let mut used = 0;
        for (alpha, a) in &self.coeffs {
            let k = alpha.degree();
            if top.is_none_or(|d| k > d) {
                break;
            }
            let d = f.with_trunc(trunc + k).derivative(alpha)?;
            if d.is_zero() {
                continue;
            }
            used += 1;
            out = out.add(&a.with_trunc(trunc).mul(&d)?)?;
        }
        Ok((out, used))
    }
}

/// Data behind a tail bound: a normal-type (IV) triple and the derived
/// constants of the continuity estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailParams {
    pub eps: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub tau: f64,
    pub tau_prime: f64,
    pub ratio: f64,
    pub c_prime: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApplyReport<S: Scalar> {
    pub result: TaylorPoly<S>,
    pub terms_used: usize,
    pub tail_bound: Option<f64>,
    pub tail_params: Option<TailParams>,
}

/// Normal-type (IV) triples `(ε, B, C)` implied by a verdict.
///
/// Normal (I)/(III) bounds imply (IV) with the same constants since
/// `1/|α|!^{1/q} ≤ |α|^{|α|/p}/α!`. A minimal-type bound
/// `‖a_α‖_{p,ε} ≤ C B^{|α|+1} w_α` reads as (IV) with `ε' = B`, `B' = ε`
/// and `C' = BC`.
fn normal_triples(cert: &ClassVerdict) -> Vec<(f64, f64, f64)> {
    cert.certificates
        .iter()
        .filter_map(|c| {
            let cc = c.c?;
            Some(match cert.mode {
                Mode::Normal => (c.eps, c.b, cc),
                Mode::Minimal => (c.b, c.eps, c.b * cc),
            })
        })
        .collect()
}

fn tail_from_certificate<S: Scalar>(
    p_op: &OperatorSymbol<S>,
    f: &TaylorPoly<S>,
    params: &GrowthParams,
    cert: &ClassVerdict,
) -> Result<(f64, TailParams)> {
    if cert.status != Status::Pass {
        return Err(Error::CertificateNotPass);
    }
    let (p, tau) = (params.p(), params.tau());
    let n = p_op.dim() as f64;
    let base = (std::f64::consts::E * tau * p).powf(1.0 / p) * 4.0 * n.sqrt();
    let two_n1 = 2f64.powi(p_op.dim() as i32 - 1);
    let f_norm = norm_upper(f, params);
    let top = p_op.max_order() as i32;

    let mut best: Option<(f64, TailParams)> = None;
    let mut best_ratio = f64::INFINITY;
    for (eps, b, c) in normal_triples(cert) {
        let ratio = base * eps;
        best_ratio = best_ratio.min(ratio);
        if ratio.is_nan() || ratio >= 1.0 {
            continue;
        }
        let tail = two_n1 * c * ratio.powi(top + 1) / (1.0 - ratio) * f_norm;
        let tp = TailParams {
            eps,
            b,
            c,
            tau,
            tau_prime: b + params.s_p() * tau,
            ratio,
            c_prime: two_n1 * c / (1.0 - ratio),
        };
        if best.as_ref().is_none_or(|(t, _)| tail < *t) {
            best = Some((tail, tp));
        }
    }
    best.ok_or(Error::CertificateTooWeak { ratio: best_ratio })
}

/// `Pf` on the stored orders, with a bound on the omitted orders when a
/// passing certificate for `P` at order `params.p()` is supplied.
pub fn apply<S: Scalar>(
    p_op: &OperatorSymbol<S>,
    f: &TaylorPoly<S>,
    params: &GrowthParams,
    certificate: Option<&ClassVerdict>,
) -> Result<ApplyReport<S>> {
    let (result, terms_used) = p_op.act(f)?;
    let (tail_bound, tail_params) = match certificate {
        Some(cert) => {
            let (t, tp) = tail_from_certificate(p_op, f, params, cert)?;
            (Some(t), Some(tp))
        }
        None => (None, None),
    };
    Ok(ApplyReport {
        result,
        terms_used,
        tail_bound,
        tail_params,
    })
}

/// Coefficientwise sum; orders up to the larger of the two.
pub fn add_ops<S: Scalar>(p: &OperatorSymbol<S>, q: &OperatorSymbol<S>) -> Result<OperatorSymbol<S>> {
    check_dim(p.dim, q.dim)?;
    let mut out = OperatorSymbol::new(p.dim, p.max_order.max(q.max_order));
    out.coeffs = p.coeffs.clone();
    for (alpha, b) in &q.coeffs {
        let v = match out.coeffs.get(alpha) {
            Some(a) => {
                let t = a.trunc().max(b.trunc());
                a.with_trunc(t).add(&b.with_trunc(t))?
            }
            None => b.clone(),
        };
        if v.is_zero() {
            out.coeffs.remove(alpha);
        } else {
            out.coeffs.insert(alpha.clone(), v);
        }
    }
    Ok(out)
}

/// Symbol of `P∘Q` up to order `n`, by the Leibniz rule
/// `∂^α(b_β ∂^β f) = Σ_{δ≤α} binom(α,δ) (∂^δ b_β) ∂^{α−δ+β} f`.
pub fn compose<S: Scalar>(
    p: &OperatorSymbol<S>,
    q: &OperatorSymbol<S>,
    n: usize,
) -> Result<OperatorSymbol<S>> {
    check_dim(p.dim, q.dim)?;
    let trunc = p.coeff_trunc().into_iter().chain(q.coeff_trunc()).max().unwrap_or(0);
    let mut acc: BTreeMap<MultiIndex, TaylorPoly<S>> = BTreeMap::new();
    for (alpha, a) in &p.coeffs {
        let a = a.with_trunc(trunc);
        for delta in alpha.enumerate_below() {
            let rest = alpha.sub(&delta)?;
            let w = Complex::new(S::from_biguint(&alpha.binomial(&delta)), S::zero());
            for (beta, b) in &q.coeffs {
                let gamma = rest.add(beta)?;
                if gamma.degree() > n {
                    continue;
                }
                let db = b.with_trunc(trunc + delta.degree()).derivative(&delta)?;
                if db.is_zero() {
                    continue;
                }
                let term = a.mul(&db)?.scale(&w);
                let slot = acc
                    .entry(gamma)
                    .or_insert_with(|| TaylorPoly::zero(p.dim, trunc));
                *slot = slot.add(&term)?;
            }
        }
    }
    let mut out = OperatorSymbol::new(p.dim, n);
    for (gamma, c) in acc {
        if !c.is_zero() {
            out.coeffs.insert(gamma, c);
        }
    }
    Ok(out)
}

/// Membership test for `D_p` (normal) or `D_{p,0}` (minimal) via condition
/// (IV) / (IV)₀ on the default grids.
pub fn classify<S: Scalar>(p_op: &OperatorSymbol<S>, p: f64, mode: Mode) -> Result<ClassVerdict> {
    check_condition(
        p_op,
        p,
        mode,
        Condition::IV,
        &default_eps_grid(),
        &default_b_grid(),
    )
}
