//! Named operators (translation, dilation, the free-particle-in-a-field
//! propagator) and the direct series solution used to cross-check the
//! propagator.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiindex::{enumerate_up_to, MultiIndex};
use crate::operator::OperatorSymbol;
use crate::scalar::{complex_abs, complex_from_f64, FloatScalar, Scalar};
use crate::series::{exp_linear, TaylorPoly};

pub const DEFAULT_MAX_ORDER: usize = 24;
pub const DEFAULT_COEFF_TRUNC: usize = 60;
pub const DEFAULT_SERIES_ORDER: usize = 40;
pub const FD_STEP: f64 = 1e-4;
pub const RESIDUAL_TOL: f64 = 1e-5;

fn inv_factorial<S: Scalar>(alpha: &MultiIndex) -> S {
    S::from_rational(&BigRational::new(BigInt::one(), BigInt::from(alpha.factorial())))
}

/// `Σ_α a^α/α! ∂^α`, i.e. `f ↦ f(z + a)`.
pub fn translation_symbol<S: Scalar>(
    a: &[Complex<S>],
    max_order: usize,
    coeff_trunc: usize,
) -> OperatorSymbol<S> {
    let n = a.len();
    let mut s = OperatorSymbol::new(n, max_order);
    for alpha in enumerate_up_to(n, max_order) {
        let c = alpha.pow(a) * inv_factorial::<S>(&alpha);
        s.insert(alpha, TaylorPoly::constant(n, coeff_trunc, c))
            .expect("index within order");
    }
    s
}

/// `Σ_α σ^{|α|} z^α/α! ∂^α`, i.e. `f ↦ f((1+σ)z)`. Coefficients whose
/// degree exceeds `coeff_trunc` are dropped.
pub fn dilation_symbol<S: Scalar>(
    sigma: Complex<S>,
    dim: usize,
    max_order: usize,
    coeff_trunc: usize,
) -> OperatorSymbol<S> {
    let mut s = OperatorSymbol::new(dim, max_order);
    for alpha in enumerate_up_to(dim, max_order) {
        let k = alpha.degree();
        if k > coeff_trunc {
            break;
        }
        let c = sigma.powu(k as u32) * inv_factorial::<S>(&alpha);
        let a = TaylorPoly::monomial(dim, alpha.clone(), c, coeff_trunc).expect("degree checked");
        s.insert(alpha, a).expect("index within order");
    }
    s
}

/// `exp(−i(tz + t³/6)) · exp((it/2)∂² + (t²/2)∂)` in one variable.
///
/// The second factor has constant coefficients, so
/// `exp(...) = Σ_k e_k ∂^k` with `e_k = Σ_{2j+l=k} (it/2)^j (t²/2)^l/(j! l!)`.
pub fn schrodinger_propagator<S: FloatScalar>(
    t: S,
    max_order: usize,
    coeff_trunc: usize,
) -> OperatorSymbol<S> {
    let zero = S::zero();
    let half = S::from_f64_lossy(0.5);
    let u = Complex::new(zero, t * half); // it/2
    let v = Complex::new(t * t * half, zero); // t²/2

    let one = Complex::new(S::one(), zero);
    let mut u_pow = vec![one];
    let mut v_pow = vec![one];
    for j in 1..=max_order {
        u_pow.push(u_pow[j - 1] * u);
        v_pow.push(v_pow[j - 1] * v);
    }
    let inv_fact = |k: usize| inv_factorial::<S>(&MultiIndex::new(vec![k as u32]));

    let phase = t * t * t / S::from_f64_lossy(6.0);
    let front = Complex::new(phase.cos(), -phase.sin());
    let prefactor = exp_linear(1, 0, &Complex::new(zero, -t), coeff_trunc).scale(&front);

    let mut s = OperatorSymbol::new(1, max_order);
    for k in 0..=max_order {
        let mut e = Complex::new(zero, zero);
        for (j, uj) in u_pow.iter().enumerate().take(k / 2 + 1) {
            let l = k - 2 * j;
            e = e + uj * v_pow[l] * (inv_fact(j) * inv_fact(l));
        }
        s.insert(MultiIndex::new(vec![k as u32]), prefactor.scale(&e))
            .expect("index within order");
    }
    s
}

/// `Hf = −½ f'' + z f`.
fn hamiltonian<S: Scalar>(f: &TaylorPoly<S>) -> Result<TaylorPoly<S>> {
    let half = Complex::new(S::from_f64_lossy(-0.5), S::zero());
    let d2 = f.derivative(&MultiIndex::new(vec![2]))?.scale(&half);
    let one = Complex::new(S::one(), S::zero());
    let zf = f.shift_scale(&MultiIndex::new(vec![1]), &one, d2.trunc())?;
    d2.add(&zf)
}

/// Truncation the series solution needs for `k` applications of `H`.
pub fn hamiltonian_required_trunc<S: Scalar>(phi: &TaylorPoly<S>, k: usize) -> usize {
    phi.degree().unwrap_or(0) + 3 * k
}

/// `Σ_{k≤K} (t/i)^k H^k φ / k!`, computed without any symbol machinery.
pub fn hamiltonian_series_oracle<S: Scalar>(phi: &TaylorPoly<S>, t: S, k_max: usize) -> Result<TaylorPoly<S>> {
    if phi.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: phi.dim(),
        });
    }
    let need = hamiltonian_required_trunc(phi, k_max);
    if phi.trunc() < need {
        return Err(Error::InsufficientTruncation {
            have: phi.trunc(),
            need,
            what: format!("{k_max} Hamiltonian applications"),
        });
    }
    let minus_it = Complex::new(S::zero(), -t);
    let mut coef = Complex::new(S::one(), S::zero());
    let mut h_pow = phi.clone();
    let mut psi = phi.clone();
    for k in 1..=k_max {
        h_pow = hamiltonian(&h_pow)?;
        coef = coef * minus_it.clone() / S::from_usize(k);
        psi = psi.add(&h_pow.scale(&coef))?;
    }
    Ok(psi)
}

/// Points `r·e^{iθ}` with `r = r_max·i/n_radii` (i = 1..=n_radii) and
/// `θ = 2πj/n_angles`.
pub fn polar_grid(r_max: f64, n_radii: usize, n_angles: usize) -> Vec<Complex<f64>> {
    let mut pts = Vec::with_capacity(n_radii * n_angles);
    for i in 1..=n_radii {
        let r = r_max * i as f64 / n_radii as f64;
        for j in 0..n_angles {
            let th = 2.0 * std::f64::consts::PI * j as f64 / n_angles as f64;
            pts.push(Complex::from_polar(r, th));
        }
    }
    pts
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchrodingerSettings {
    pub max_order: usize,
    pub coeff_trunc: usize,
    pub h: f64,
    pub residual_tol: f64,
}

impl Default for SchrodingerSettings {
    fn default() -> Self {
        SchrodingerSettings {
            max_order: DEFAULT_MAX_ORDER,
            coeff_trunc: DEFAULT_COEFF_TRUNC,
            h: FD_STEP,
            residual_tol: RESIDUAL_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchrodingerReport {
    pub t: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub points: usize,
    pub max_relative_deviation: f64,
    pub max_pde_residual: f64,
    pub tol: f64,
    pub residual_tol: f64,
    pub pass: bool,
}

fn max_abs_at<S: Scalar>(f: &TaylorPoly<S>, pts: &[Complex<S>]) -> Result<f64> {
    let mut m: f64 = 0.0;
    for z in pts {
        m = m.max(complex_abs(&f.eval(std::slice::from_ref(z))?));
    }
    Ok(m)
}

pub fn schrodinger_check<S: FloatScalar>(
    phi: &TaylorPoly<S>,
    t: f64,
    points: &[Complex<f64>],
    k: usize,
    tol: f64,
) -> Result<SchrodingerReport> {
    schrodinger_check_with(phi, t, points, k, tol, &SchrodingerSettings::default())
}

/// Compares the factored propagator with the direct series at the sample
/// points and checks the PDE `i∂_t ψ = (−½∂² + z)ψ` by a centred difference
/// in `t`. `φ` is taken as the polynomial it stores; its container is
/// widened to whatever truncation the series solution needs.
pub fn schrodinger_check_with<S: FloatScalar>(
    phi: &TaylorPoly<S>,
    t: f64,
    points: &[Complex<f64>],
    k: usize,
    tol: f64,
    settings: &SchrodingerSettings,
) -> Result<SchrodingerReport> {
    if phi.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: phi.dim(),
        });
    }
    let trunc = phi
        .trunc()
        .max(hamiltonian_required_trunc(phi, k))
        .max(settings.coeff_trunc);
    let phi = phi.with_trunc(trunc);
    let pts: Vec<Complex<S>> = points.iter().map(|&z| complex_from_f64(z)).collect();
    let propagate = |tt: f64| -> Result<TaylorPoly<S>> {
        let p = schrodinger_propagator(S::from_f64_lossy(tt), settings.max_order, settings.coeff_trunc);
        Ok(p.act(&phi)?.0)
    };

    let psi = propagate(t)?;
    let oracle = hamiltonian_series_oracle(&phi, S::from_f64_lossy(t), k)?;
    let diff = psi.with_trunc(oracle.trunc().max(psi.trunc())).sub(&oracle.with_trunc(oracle.trunc().max(psi.trunc())))?;
    let scale = max_abs_at(&oracle, &pts)?;
    let dev_abs = max_abs_at(&diff, &pts)?;
    let deviation = if scale > 0.0 { dev_abs / scale } else { dev_abs };

    let h = settings.h;
    let fwd = propagate(t + h)?;
    let bwd = propagate(t - h)?;
    let h_psi = hamiltonian(&psi.with_trunc(psi.trunc() + 2))?;
    let mut residual: f64 = 0.0;
    for z in &pts {
        let zs = std::slice::from_ref(z);
        let dt = (fwd.eval(zs)? - bwd.eval(zs)?) / S::from_f64_lossy(2.0 * h);
        let i_dt = Complex::new(-dt.im, dt.re);
        let r = complex_abs(&(i_dt - h_psi.eval(zs)?));
        let size = complex_abs(&psi.eval(zs)?).max(1.0);
        residual = residual.max(r / size);
    }

    Ok(SchrodingerReport {
        t,
        k,
        points: points.len(),
        max_relative_deviation: deviation,
        max_pde_residual: residual,
        tol,
        residual_tol: settings.residual_tol,
        pass: deviation < tol && residual < settings.residual_tol,
    })
}
