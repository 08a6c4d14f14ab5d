//! Growth metrics: the (p,τ)-norm, derivative and monomial bounds, and the
//! coefficient growth conditions characterising the operator classes.

mod condition;
mod norm;

pub use condition::{
    check_condition, default_b_grid, default_eps_grid, Certificate, ClassVerdict, Condition, Mode,
    Status,
};
pub use norm::{golden_section_max, norm_bracket, norm_upper, norm_upper_log, NormBracket};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

/// Order `p` and type `τ` of the weight `exp(−τ|z|^p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    p: f64,
    tau: f64,
}

impl GrowthParams {
    pub fn new(p: f64, tau: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("order p must be positive, got {p}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("type tau must be positive, got {tau}")));
        }
        Ok(GrowthParams { p, tau })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.p, tau)
    }

    /// s_p = max(2^{p−1}, 1).
    pub fn s_p(&self) -> f64 {
        s_p(self.p)
    }

    /// 1/q = 1 − 1/p, and exactly 0 when p = 1.
    pub fn inv_q(&self) -> f64 {
        inv_q(self.p)
    }
}

pub fn s_p(p: f64) -> f64 {
    if p <= 1.0 {
        1.0
    } else {
        2f64.powf(p - 1.0)
    }
}

pub fn inv_q(p: f64) -> f64 {
    if p == 1.0 {
        0.0
    } else {
        1.0 - 1.0 / p
    }
}

/// ln(k^{k/p}), with 0^0 = 1.
fn ln_k_pow(k: usize, p: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        (k as f64) * (k as f64).ln() / p
    }
}

pub(crate) fn ln_factorial(alpha: &MultiIndex) -> f64 {
    alpha
        .entries()
        .iter()
        .map(|&a| ln_gamma(a as f64 + 1.0))
        .sum()
}

/// `sup_z |z^β| exp(−τ|z|^p) = (|β|/(eτp))^{|β|/p}`, and 1 for β = 0.
pub fn monomial_norm_bound(beta: &MultiIndex, params: &GrowthParams) -> f64 {
    let k = beta.degree();
    if k == 0 {
        return 1.0;
    }
    let (p, tau) = (params.p, params.tau);
    ((k as f64) / (std::f64::consts::E * tau * p)).powf(k as f64 / p)
}

/// The factor `α!·|α|^{−|α|/p}·(eτp)^{|α|/p}·(2√n)^{|α|}` bounding
/// `‖∂^α f‖_{p, s_p τ} / ‖f‖_{p,τ}`.
pub fn derivative_norm_bound(alpha: &MultiIndex, params: &GrowthParams, n: usize) -> f64 {
    let k = alpha.degree();
    if k == 0 {
        return 1.0;
    }
    let (p, tau) = (params.p, params.tau);
    let kf = k as f64;
    let ln = ln_factorial(alpha) - ln_k_pow(k, p)
        + kf / p * (std::f64::consts::E * tau * p).ln()
        + kf * (2.0 * (n as f64).sqrt()).ln();
    ln.exp()
}

/// The chain `n^{−|α|} e^{−|α|/p} |α|^{|α|/p}/α! ≤ 1/|α|!^{1/q} ≤ |α|^{|α|/p}/α!`
/// as `(low, mid, high)`.
pub fn equivalence_factors(alpha: &MultiIndex, p: f64, n: usize) -> Result<(f64, f64, f64)> {
    let k = alpha.degree();
    if k == 0 {
        return Err(Error::InvalidParameter(
            "equivalence factors need |alpha| >= 1".into(),
        ));
    }
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidParameter(format!("order p must be positive, got {p}")));
    }
    let kf = k as f64;
    let ln_high = ln_k_pow(k, p) - ln_factorial(alpha);
    let ln_low = -kf * (n as f64).ln() - kf / p + ln_high;
    let ln_mid = -inv_q(p) * ln_gamma(kf + 1.0);
    Ok((ln_low.exp(), ln_mid.exp(), ln_high.exp()))
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7, n = 9); relative error ~1e-15.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    // Exact for small integers, which dominate the call sites.
    if x.fract() == 0.0 && x <= 171.0 {
        let mut acc = 0.0;
        let mut j = 2.0;
        while j < x {
            acc += f64::ln(j);
            j += 1.0;
        }
        return acc;
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}
