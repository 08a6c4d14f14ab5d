//! Recovering the symbol of a linear operator from its values on monomials:
//!
//! `a_α(z) = Σ_{β≤α} (−1)^{|α−β|} z^{α−β} F(z^β) / ((α−β)! β!)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiindex::{enumerate_up_to, MultiIndex};
use crate::operator::OperatorSymbol;
use crate::scalar::Scalar;
use crate::series::TaylorPoly;

/// A linear operator known only through `β ↦ F(z^β)`.
pub trait BlackBox<S: Scalar> {
    fn dim(&self) -> usize;

    /// Truncation the returned polynomials are guaranteed to carry.
    fn declared_trunc(&self) -> usize;

    fn action(&self, beta: &MultiIndex) -> Result<TaylorPoly<S>>;
}

/// Black box backed by a closure.
pub struct FnBlackBox<F> {
    dim: usize,
    trunc: usize,
    f: F,
}

impl<F> FnBlackBox<F> {
    pub fn new(dim: usize, trunc: usize, f: F) -> Self {
        FnBlackBox { dim, trunc, f }
    }
}

impl<S: Scalar, F: Fn(&MultiIndex) -> Result<TaylorPoly<S>>> BlackBox<S> for FnBlackBox<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn declared_trunc(&self) -> usize {
        self.trunc
    }

    fn action(&self, beta: &MultiIndex) -> Result<TaylorPoly<S>> {
        (self.f)(beta)
    }
}

/// The action of a stored symbol. Monomials are built with truncation
/// `coeff_trunc + max_order` so no coefficient of `a_α` is cut off.
pub struct SymbolBlackBox<'a, S: Scalar> {
    symbol: &'a OperatorSymbol<S>,
    trunc: usize,
}

impl<'a, S: Scalar> SymbolBlackBox<'a, S> {
    pub fn new(symbol: &'a OperatorSymbol<S>) -> Self {
        let trunc = symbol.coeff_trunc().unwrap_or(0) + symbol.max_order();
        SymbolBlackBox { symbol, trunc }
    }

    pub fn with_trunc(symbol: &'a OperatorSymbol<S>, trunc: usize) -> Self {
        SymbolBlackBox { symbol, trunc }
    }
}

impl<S: Scalar> BlackBox<S> for SymbolBlackBox<'_, S> {
    fn dim(&self) -> usize {
        self.symbol.dim()
    }

    fn declared_trunc(&self) -> usize {
        self.trunc
    }

    fn action(&self, beta: &MultiIndex) -> Result<TaylorPoly<S>> {
        let one = Complex::new(S::one(), S::zero());
        let m = TaylorPoly::monomial(self.symbol.dim(), beta.clone(), one, self.trunc.max(beta.degree()))?;
        Ok(self.symbol.act(&m)?.0)
    }
}

/// Tabulated values `F(z^β)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TableBlackBox<S: Scalar> {
    dim: usize,
    entries: BTreeMap<MultiIndex, TaylorPoly<S>>,
}

impl<S: Scalar> TableBlackBox<S> {
    pub fn new(dim: usize) -> Self {
        TableBlackBox {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, beta: MultiIndex, value: TaylorPoly<S>) -> Result<()> {
        if beta.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: beta.dim(),
            });
        }
        if value.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: value.dim(),
            });
        }
        self.entries.insert(beta, value);
        Ok(())
    }

    /// Tabulates another black box on all `|β| ≤ max_order`.
    pub fn from_black_box<B: BlackBox<S> + ?Sized>(f: &B, max_order: usize) -> Result<Self> {
        let mut t = Self::new(f.dim());
        for beta in enumerate_up_to(f.dim(), max_order) {
            let v = f.action(&beta)?;
            t.insert(beta, v)?;
        }
        Ok(t)
    }

    pub fn entries(&self) -> &BTreeMap<MultiIndex, TaylorPoly<S>> {
        &self.entries
    }

    /// Indices `|β| ≤ max_order` with no entry.
    pub fn missing(&self, max_order: usize) -> Vec<MultiIndex> {
        enumerate_up_to(self.dim, max_order)
            .into_iter()
            .filter(|b| !self.entries.contains_key(b))
            .collect()
    }
}

impl<S: Scalar> BlackBox<S> for TableBlackBox<S> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn declared_trunc(&self) -> usize {
        self.entries.values().map(|v| v.trunc()).min().unwrap_or(0)
    }

    fn action(&self, beta: &MultiIndex) -> Result<TaylorPoly<S>> {
        self.entries
            .get(beta)
            .cloned()
            .ok_or_else(|| Error::MissingMonomials(vec![beta.clone()]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionReport<S: Scalar> {
    pub symbol: OperatorSymbol<S>,
    /// Distinct monomials `F(z^β)` evaluated.
    pub monomial_calls: usize,
    /// Non-zero products `z^{α−β}·F(z^β)` terms that landed above
    /// `coeff_trunc` and were dropped.
    pub dropped_terms: usize,
    pub coeff_trunc: usize,
}

/// Signed prefactor `(−1)^{|α−β|} / ((α−β)! β!)`, exact.
fn prefactor(alpha: &MultiIndex, beta: &MultiIndex) -> Result<BigRational> {
    let rest = alpha.sub(beta)?;
    let den = BigInt::from(rest.factorial() * beta.factorial());
    let num = if rest.degree() % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    Ok(BigRational::new(num, den))
}

fn evaluate_all<S: Scalar, B: BlackBox<S> + ?Sized>(
    f: &B,
    max_order: usize,
) -> Result<BTreeMap<MultiIndex, TaylorPoly<S>>> {
    let mut values = BTreeMap::new();
    let mut missing = Vec::new();
    for beta in enumerate_up_to(f.dim(), max_order) {
        match f.action(&beta) {
            Ok(v) => {
                if v.dim() != f.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: f.dim(),
                        got: v.dim(),
                    });
                }
                values.insert(beta, v);
            }
            Err(Error::MissingMonomials(m)) => missing.extend(m),
            Err(e) => return Err(e),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingMonomials(missing));
    }
    Ok(values)
}

/// Symbol of `F` up to order `max_order`, coefficients truncated at
/// `coeff_trunc` (default: the black box's declared truncation).
pub fn extract_symbol_report<S: Scalar, B: BlackBox<S> + ?Sized>(
    f: &B,
    max_order: usize,
    coeff_trunc: Option<usize>,
) -> Result<ExtractionReport<S>> {
    let n = f.dim();
    let nc = coeff_trunc.unwrap_or_else(|| f.declared_trunc());
    let values = evaluate_all(f, max_order)?;
    let mut symbol = OperatorSymbol::new(n, max_order);
    let mut dropped = 0;
    for alpha in enumerate_up_to(n, max_order) {
        let mut a = TaylorPoly::zero(n, nc);
        // largest |β| first
        for beta in alpha.enumerate_below().into_iter().rev() {
            let fb = &values[&beta];
            if fb.is_zero() {
                continue;
            }
            let shift = alpha.sub(&beta)?;
            let room = nc.checked_sub(shift.degree());
            dropped += fb
                .coeffs()
                .keys()
                .filter(|mu| room.is_none_or(|r| mu.degree() > r))
                .count();
            let w = Complex::new(S::from_rational(&prefactor(&alpha, &beta)?), S::zero());
            a = a.add(&fb.shift_scale(&shift, &w, nc)?)?;
        }
        symbol.insert(alpha, a)?;
    }
    Ok(ExtractionReport {
        symbol,
        monomial_calls: values.len(),
        dropped_terms: dropped,
        coeff_trunc: nc,
    })
}

pub fn extract_symbol<S: Scalar, B: BlackBox<S> + ?Sized>(
    f: &B,
    max_order: usize,
    coeff_trunc: Option<usize>,
) -> Result<OperatorSymbol<S>> {
    Ok(extract_symbol_report(f, max_order, coeff_trunc)?.symbol)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundtripCase {
    pub index: usize,
    pub covered: bool,
    pub error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundtripReport {
    pub max_error: f64,
    pub pass: bool,
    pub tol: f64,
    pub cases: Vec<RoundtripCase>,
}

/// `F f = Σ_μ c_μ F(z^μ)` from the monomial values.
pub fn action_by_linearity<S: Scalar, B: BlackBox<S> + ?Sized>(
    f_op: &B,
    f: &TaylorPoly<S>,
) -> Result<TaylorPoly<S>> {
    let mut out: Option<TaylorPoly<S>> = None;
    for (mu, c) in f.coeffs() {
        let term = f_op.action(mu)?.scale(c);
        out = Some(match out {
            Some(acc) => acc.add(&term)?,
            None => term,
        });
    }
    Ok(out.unwrap_or_else(|| TaylorPoly::zero(f.dim(), f_op.declared_trunc())))
}

/// Compares `F f` (by linearity over monomials) with `P f` on each test
/// polynomial. Tests of degree above `P.max_order()` are reported as not
/// covered.
pub fn verify_roundtrip<S: Scalar, B: BlackBox<S> + ?Sized>(
    f_op: &B,
    p: &OperatorSymbol<S>,
    testset: &[TaylorPoly<S>],
    tol: f64,
) -> Result<RoundtripReport> {
    let mut cases = Vec::with_capacity(testset.len());
    let mut max_error: f64 = 0.0;
    for (index, f) in testset.iter().enumerate() {
        if f.degree().is_some_and(|d| d > p.max_order()) {
            cases.push(RoundtripCase {
                index,
                covered: false,
                error: None,
            });
            continue;
        }
        let lhs = action_by_linearity(f_op, f)?;
        let rhs = p.act(f)?.0;
        let upto = lhs.trunc().min(rhs.trunc());
        let err = lhs.max_abs_diff_up_to(&rhs, upto);
        max_error = max_error.max(err);
        cases.push(RoundtripCase {
            index,
            covered: true,
            error: Some(err),
        });
    }
    Ok(RoundtripReport {
        max_error,
        pass: max_error < tol,
        tol,
        cases,
    })
}

pub const UNIQUENESS_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub agree: bool,
    pub actions_agree: bool,
    /// Orders where the re-extracted symbols differ by more than the
    /// tolerance.
    pub discrepancies: Vec<MultiIndex>,
}

/// Extracts a symbol from the action of `P` and of `Q` on monomials up to
/// `max_degree` and compares the two.
pub fn extraction_uniqueness_probe<S: Scalar>(
    p: &OperatorSymbol<S>,
    q: &OperatorSymbol<S>,
    max_degree: usize,
) -> Result<UniquenessReport> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let ct = p.coeff_trunc().into_iter().chain(q.coeff_trunc()).max().unwrap_or(0);
    let trunc = ct + max_degree;
    let fp = SymbolBlackBox::with_trunc(p, trunc);
    let fq = SymbolBlackBox::with_trunc(q, trunc);

    let mut actions_agree = true;
    for beta in enumerate_up_to(p.dim(), max_degree) {
        if fp.action(&beta)?.max_abs_diff(&fq.action(&beta)?) > UNIQUENESS_TOL {
            actions_agree = false;
            break;
        }
    }

    let sp = extract_symbol(&fp, max_degree, Some(ct))?;
    let sq = extract_symbol(&fq, max_degree, Some(ct))?;
    let zero = TaylorPoly::zero(p.dim(), 0);
    let discrepancies: Vec<MultiIndex> = enumerate_up_to(p.dim(), max_degree)
        .into_iter()
        .filter(|a| {
            let x = sp.coeff(a).unwrap_or(&zero);
            let y = sq.coeff(a).unwrap_or(&zero);
            x.max_abs_diff(y) > UNIQUENESS_TOL
        })
        .collect();
    Ok(UniquenessReport {
        agree: discrepancies.is_empty(),
        actions_agree,
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{dilation_symbol, translation_symbol};
    use num_traits::Zero;

    type Q = BigRational;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn c64(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn identity_box<S: Scalar>(dim: usize, trunc: usize) -> impl BlackBox<S> {
        FnBlackBox::new(dim, trunc, move |b: &MultiIndex| {
            TaylorPoly::monomial(dim, b.clone(), Complex::new(S::one(), S::zero()), trunc)
        })
    }

    #[test]
    fn identity_exact_rational() {
        for n in 1..=2 {
            let s: OperatorSymbol<Q> = extract_symbol(&identity_box(n, 12), 6, None).unwrap();
            assert_eq!(s.len(), 1);
            let a0 = s.coeff(&MultiIndex::zero(n)).unwrap();
            assert_eq!(a0.coeff(&MultiIndex::zero(n)), Complex::new(Q::one(), Q::zero()));
            assert_eq!(a0.len(), 1);
        }
    }

    #[test]
    fn identity_float_cancellation() {
        for n in 1..=2 {
            let s: OperatorSymbol<f64> = extract_symbol(&identity_box(n, 12), 6, None).unwrap();
            for (alpha, a) in s.terms() {
                if alpha.is_zero() {
                    continue;
                }
                let worst = a.coeffs().values().map(|c| c.norm()).fold(0.0, f64::max);
                assert!(worst < 1e-14, "{alpha}: {worst}");
            }
        }
    }

    #[test]
    fn derivative_operator() {
        let d = FnBlackBox::new(1, 10, |b: &MultiIndex| {
            TaylorPoly::<Q>::monomial(1, b.clone(), Complex::new(Q::one(), Q::zero()), 10)?
                .with_trunc(11)
                .derivative(&mi(&[1]))
        });
        let s = extract_symbol(&d, 6, None).unwrap();
        assert_eq!(s.len(), 1);
        let a1 = s.coeff(&mi(&[1])).unwrap();
        assert_eq!(a1.len(), 1);
        assert_eq!(a1.coeff(&mi(&[0])), Complex::new(Q::one(), Q::zero()));
    }

    #[test]
    fn translation_by_two() {
        let shift = FnBlackBox::new(1, 12, |b: &MultiIndex| {
            TaylorPoly::monomial(1, b.clone(), c64(1.0, 0.0), 12)?.translate(&[c64(2.0, 0.0)])
        });
        let s = extract_symbol(&shift, 8, None).unwrap();
        let mut fact = 1.0;
        for k in 0..=8u32 {
            if k > 0 {
                fact *= k as f64;
            }
            let a = s.coeff(&mi(&[k])).unwrap();
            let want = 2f64.powi(k as i32) / fact;
            assert!((a.coeff(&mi(&[0])).re - want).abs() < 1e-12);
            assert!(a.tail_from(1).coeffs().values().all(|c| c.norm() < 1e-12));
        }
    }

    #[test]
    fn multiplication_operator() {
        let g = TaylorPoly::from_terms(2, 10, [(mi(&[0, 0]), Complex::new(Q::from_integer(3.into()), Q::zero())), (mi(&[1, 2]), Complex::new(Q::new(1.into(), 2.into()), Q::zero()))]).unwrap();
        let gg = g.clone();
        let f = FnBlackBox::new(2, 10, move |b: &MultiIndex| {
            TaylorPoly::monomial(2, b.clone(), Complex::new(Q::one(), Q::zero()), 10)?.mul(&gg)
        });
        let s = extract_symbol(&f, 4, None).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(&mi(&[0, 0])).unwrap(), &g);
    }

    #[test]
    fn table_lists_missing() {
        let mut t = TableBlackBox::<f64>::new(1);
        t.insert(mi(&[0]), TaylorPoly::constant(1, 4, c64(1.0, 0.0))).unwrap();
        t.insert(mi(&[2]), TaylorPoly::monomial(1, mi(&[2]), c64(1.0, 0.0), 4).unwrap()).unwrap();
        let err = extract_symbol(&t, 3, None).unwrap_err();
        match err {
            Error::MissingMonomials(m) => assert_eq!(m, vec![mi(&[1]), mi(&[3])]),
            e => panic!("{e}"),
        }
        assert_eq!(t.missing(3), vec![mi(&[1]), mi(&[3])]);
    }

    #[test]
    fn mismatched_dimension() {
        let f = FnBlackBox::new(2, 4, |_: &MultiIndex| Ok(TaylorPoly::<f64>::constant(1, 4, c64(1.0, 0.0))));
        assert!(matches!(extract_symbol(&f, 2, None), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn roundtrip_translation_and_dilation() {
        for sym in [
            translation_symbol(&[c64(1.0, 0.0)], 8, 8),
            dilation_symbol(c64(1.0, 0.0), 1, 8, 8),
        ] {
            let f = SymbolBlackBox::new(&sym);
            let back = extract_symbol(&f, 8, Some(8)).unwrap();
            assert!(back.max_abs_diff(&sym) < 1e-12);
            let tests: Vec<_> = (0..=8u32)
                .map(|k| TaylorPoly::monomial(1, mi(&[k]), c64(1.0, 0.0), 16).unwrap())
                .collect();
            let r = verify_roundtrip(&f, &back, &tests, 1e-12).unwrap();
            assert!(r.pass, "{}", r.max_error);
            assert!(r.cases.iter().all(|c| c.covered));
        }
    }

    #[test]
    fn roundtrip_flags_uncovered() {
        let sym = translation_symbol(&[c64(1.0, 0.0)], 3, 8);
        let f = SymbolBlackBox::new(&sym);
        let tests = vec![TaylorPoly::monomial(1, mi(&[5]), c64(1.0, 0.0), 8).unwrap()];
        let r = verify_roundtrip(&f, &sym, &tests, 1e-12).unwrap();
        assert!(!r.cases[0].covered);
        assert!(r.pass);
    }

    #[test]
    fn zero_operator_roundtrip() {
        let z = OperatorSymbol::<f64>::new(1, 4);
        let f = FnBlackBox::new(1, 8, |_: &MultiIndex| Ok(TaylorPoly::<f64>::zero(1, 8)));
        let tests = vec![TaylorPoly::monomial(1, mi(&[2]), c64(1.0, 0.0), 8).unwrap()];
        let r = verify_roundtrip(&f, &z, &tests, 1e-12).unwrap();
        assert_eq!(r.max_error, 0.0);
    }

    #[test]
    fn uniqueness_probe() {
        let t = translation_symbol(&[c64(1.0, 0.0)], 6, 6);
        assert!(extraction_uniqueness_probe(&t, &t, 6).unwrap().agree);

        let mut bent = t.clone();
        let a3 = t.coeff(&mi(&[3])).unwrap().add(&TaylorPoly::constant(1, 6, c64(1e-3, 0.0))).unwrap();
        bent.insert(mi(&[3]), a3).unwrap();
        let r = extraction_uniqueness_probe(&t, &bent, 6).unwrap();
        assert!(!r.agree);
        assert!(!r.actions_agree);
        assert_eq!(r.discrepancies, vec![mi(&[3])]);
    }

    #[test]
    fn extraction_is_linear() {
        let p = translation_symbol(&[c64(0.5, 0.2)], 6, 6);
        let q = dilation_symbol(c64(-0.7, 0.0), 1, 6, 6);
        let (a, b) = (c64(2.0, -1.0), c64(0.25, 0.5));
        let (fp, fq) = (SymbolBlackBox::new(&p), SymbolBlackBox::new(&q));
        let comb = FnBlackBox::new(1, 12, |beta: &MultiIndex| {
            fp.action(beta)?.scale(&a).add(&fq.action(beta)?.scale(&b))
        });
        let s = extract_symbol(&comb, 6, Some(6)).unwrap();
        let want = crate::operator::add_ops(
            &extract_symbol(&fp, 6, Some(6)).unwrap().scale(&a),
            &extract_symbol(&fq, 6, Some(6)).unwrap().scale(&b),
        )
        .unwrap();
        assert!(s.max_abs_diff(&want) < 1e-12);
    }
}
