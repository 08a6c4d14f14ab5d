//! Finite-truncation checks of the coefficient growth conditions.
//!
//! Normal type, for every ε there are B, C with
//!
//! * (I)/(III)  `‖a_α‖_{p,B} ≤ C ε^{|α|} / |α|!^{1/q}`
//! * (II)/(IV)  `‖a_α‖_{p,B} ≤ C ε^{|α|} |α|^{|α|/p} / α!`
//!
//! and minimal type, for every ε there is B with
//!
//! * (I)₀/(III)₀  `‖a_α‖_{p,ε} ≤ B^{|α|+1} / |α|!^{1/q}`
//! * (II)₀/(IV)₀  `‖a_α‖_{p,ε} ≤ B^{|α|+1} |α|^{|α|/p} / α!`
//!
//! The pointwise forms (I), (II) and the norm forms (III), (IV) are the same
//! inequality once `sup_z |a_α(z)| e^{−B|z|^p}` is written as a norm, so they
//! share one numeric test.
//!
//! Only degrees `|α| ≤ N` can be inspected, so a verdict is evidence rather
//! than proof. For each ε the checker looks at the margins
//! `C_k = max_{|α|=k} ‖a_α‖ / (right-hand side without C)` over the top
//! third of the degrees:
//!
//! * some B makes the margins non-increasing: the ε passes directly;
//! * otherwise the ε-free profile `lw_k = ln C_k + k ln ε` is fitted as
//!   `a·k ln k + b·k + c`. An exponent `a ≤` [`PASS_SLOPE`] means the
//!   margins eventually fall faster than any geometric sequence, so the ε
//!   passes. An exponent above [`FAIL_SLOPE`] together with margins that
//!   trend upwards at every B is a failure.
//! * anything in between is inconclusive.
//!
//! The minimal-type check takes the smallest grid B above every
//! `B_k = w_k^{1/(k+1)}` and judges boundedness of `B_k` by the same
//! exponent: `B_k` stays bounded iff `a ≤ 0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{inv_q, ln_factorial, ln_gamma, ln_k_pow, norm_upper_log, GrowthParams};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::operator::OperatorSymbol;
use crate::scalar::Scalar;

/// Normal-type ε passes when the `k ln k` exponent is at most this.
pub const PASS_SLOPE: f64 = -0.3;
/// Normal-type ε fails when the `k ln k` exponent is above this.
pub const FAIL_SLOPE: f64 = -0.2;
/// Minimal-type ε passes when the `k ln k` exponent is at most this
/// (`B_k` stays bounded).
pub const MINIMAL_PASS_SLOPE: f64 = 0.1;
/// Minimal-type ε fails when the `k ln k` exponent is at least this.
pub const MINIMAL_FAIL_SLOPE: f64 = 0.3;

const LOG_SLACK: f64 = 1e-9;

/// Decades appended to the B grid when no grid value makes the margins
/// turn over.
const B_EXTENSION: [f64; 9] = [1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Normal,
    Minimal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    I,
    II,
    III,
    IV,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::I, Condition::II, Condition::III, Condition::IV];

    fn uses_multinomial_weight(self) -> bool {
        matches!(self, Condition::II | Condition::IV)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::I => "I",
            Condition::II => "II",
            Condition::III => "III",
            Condition::IV => "IV",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim_end_matches('0') {
            "I" => Ok(Condition::I),
            "II" => Ok(Condition::II),
            "III" => Ok(Condition::III),
            "IV" => Ok(Condition::IV),
            _ => Err(Error::Parse(format!("unknown condition {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// Witness data for one ε. In normal mode `C` is the constant of the
/// inequality; in minimal mode it is the largest margin `C_k ≤ 1` at the
/// chosen B.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub eps: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub margin_by_degree: Vec<Option<f64>>,
}

impl Certificate {
    pub fn c_or_inf(&self) -> f64 {
        self.c.unwrap_or(f64::INFINITY)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub mode: Mode,
    #[serde(with = "condition_serde")]
    pub condition: (Mode, Condition),
    pub status: Status,
    pub certificates: Vec<Certificate>,
    pub max_degree_checked: usize,
}

impl ClassVerdict {
    pub fn which(&self) -> Condition {
        self.condition.1
    }
}

/// Conditions serialise as `"IV"` in normal mode and `"IV0"` in minimal.
mod condition_serde {
    use super::{Condition, Mode};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &(Mode, Condition), s: S) -> Result<S::Ok, S::Error> {
        match v.0 {
            Mode::Normal => s.serialize_str(&v.1.to_string()),
            Mode::Minimal => s.serialize_str(&format!("{}0", v.1)),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(Mode, Condition), D::Error> {
        let s = String::deserialize(d)?;
        let mode = if s.ends_with('0') {
            Mode::Minimal
        } else {
            Mode::Normal
        };
        let c = s.parse().map_err(serde::de::Error::custom)?;
        Ok((mode, c))
    }
}

/// {1, 1/2, …, 2^{−8}}.
pub fn default_eps_grid() -> Vec<f64> {
    (0..=8).map(|j| 0.5f64.powi(j)).collect()
}

/// 32 log-spaced points in [1e−3, 1e3].
pub fn default_b_grid() -> Vec<f64> {
    (0..32)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 31.0))
        .collect()
}

fn check_grid(name: &str, g: &[f64], ascending: bool) -> Result<()> {
    if g.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} grid is empty")));
    }
    if g.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter(format!("{name} grid must be positive")));
    }
    if ascending && g.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!("{name} grid must be ascending")));
    }
    Ok(())
}

/// Right-hand-side factor of the condition without ε, B or C, in log form:
/// `ln(1/|α|!^{1/q})` or `ln(|α|^{|α|/p}/α!)`. Returns its negation, i.e.
/// the log weight that multiplies the norm.
fn log_weight(alpha: &MultiIndex, p: f64, which: Condition) -> f64 {
    let k = alpha.degree();
    if which.uses_multinomial_weight() {
        ln_factorial(alpha) - ln_k_pow(k, p)
    } else {
        inv_q(p) * ln_gamma(k as f64 + 1.0)
    }
}

/// `lw_k = max_{|α|=k} (ln‖a_α‖_{p,type} + log_weight(α))` for k = 0..=N.
fn degree_profile<S: Scalar>(
    symbol: &OperatorSymbol<S>,
    p: f64,
    norm_type: f64,
    which: Condition,
    top: usize,
) -> Result<Vec<f64>> {
    let params = GrowthParams::new(p, norm_type)?;
    let mut lw = vec![f64::NEG_INFINITY; top + 1];
    for (alpha, a) in symbol.terms() {
        let v = norm_upper_log(a, &params) + log_weight(alpha, p, which);
        let k = alpha.degree();
        if v > lw[k] || v.is_nan() {
            lw[k] = v;
        }
    }
    Ok(lw)
}

/// Degrees inspected for trend evidence: the top third, at least two.
fn window(top: usize) -> std::ops::RangeInclusive<usize> {
    let lo = (2 * top).div_ceil(3).min(top.saturating_sub(1));
    lo..=top
}

fn finite_points(values: &[f64], range: std::ops::RangeInclusive<usize>) -> Vec<(usize, f64)> {
    range
        .filter(|&k| values[k].is_finite())
        .map(|k| (k, values[k]))
        .collect()
}

fn non_increasing(pts: &[(usize, f64)]) -> bool {
    pts.windows(2).all(|w| w[1].1 <= w[0].1 + LOG_SLACK)
}

/// Least-squares slope of `y` against `k`.
fn linear_trend(pts: &[(usize, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 as f64 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Least-squares `a` in `y ≈ a·k ln k + b·k + c`; needs three points.
fn fit_k_ln_k(pts: &[(usize, f64)]) -> Option<f64> {
    if pts.len() < 3 {
        return None;
    }
    let mut m = [[0.0f64; 4]; 3];
    for &(k, y) in pts {
        let k = k as f64;
        let r = [if k > 0.0 { k * k.ln() } else { 0.0 }, k, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += r[i] * r[j];
            }
            m[i][3] += r[i] * y;
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..3 {
        let piv = (col..3).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        m.swap(col, piv);
        if m[col][col].abs() < 1e-300 {
            return None;
        }
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                let pivot = m[col];
                for (x, y) in m[row][col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(m[0][3] / m[0][0])
}

/// Growth exponent `a` of the ε-free profile, `lw_k ≈ a·k ln k + b·k + c`,
/// fitted over `k ∈ [N/3, N]`. Even and odd degrees are fitted separately
/// (symbols built from `∂²` alternate in size) and the larger exponent is
/// kept. Falls back to one fit over all `k ≥ 1` when a parity class is too
/// thin.
fn growth_exponent(lw: &[f64], top: usize) -> Option<f64> {
    let lo = top.div_ceil(3).max(1);
    let pts = finite_points(lw, lo..=top);
    let even: Vec<_> = pts.iter().copied().filter(|(k, _)| k % 2 == 0).collect();
    let odd: Vec<_> = pts.iter().copied().filter(|(k, _)| k % 2 == 1).collect();
    if even.len() >= 3 && odd.len() >= 3 {
        return Some(fit_k_ln_k(&even)?.max(fit_k_ln_k(&odd)?));
    }
    fit_k_ln_k(&finite_points(lw, 1..=top.max(1)))
}

fn exp_or_none(l: f64) -> Option<f64> {
    let v = l.exp();
    if v.is_finite() {
        Some(v)
    } else {
        None
    }
}

fn certificate(eps: f64, b: f64, margins: &[f64]) -> Certificate {
    let c = margins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Certificate {
        eps,
        b,
        c: if c == f64::NEG_INFINITY {
            Some(0.0)
        } else {
            exp_or_none(c)
        },
        margin_by_degree: margins.iter().map(|&m| exp_or_none(m)).collect(),
    }
}

fn combine(statuses: &[Status]) -> Status {
    if statuses.contains(&Status::Fail) {
        Status::Fail
    } else if statuses.iter().all(|s| *s == Status::Pass) {
        Status::Pass
    } else {
        Status::Inconclusive
    }
}

struct Candidate {
    b: f64,
    margins: Vec<f64>,
    log_c: f64,
}

fn pick_min(cands: impl Iterator<Item = Candidate>) -> Option<Candidate> {
    cands.fold(None, |best: Option<Candidate>, c| match best {
        Some(b) if b.log_c <= c.log_c => Some(b),
        _ => Some(c),
    })
}

fn normal_eps(profiles: &[(f64, Vec<f64>)], base_len: usize, eps: f64, top: usize) -> (Status, Certificate) {
    let le = eps.ln();
    let candidates = |range: std::ops::Range<usize>| {
        profiles[range].iter().map(move |(b, lw)| {
            let margins: Vec<f64> = lw
                .iter()
                .enumerate()
                .map(|(k, &l)| l - k as f64 * le)
                .collect();
            let log_c = margins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Candidate {
                b: *b,
                margins,
                log_c,
            }
        })
    };
    let decaying = |c: &Candidate| {
        !c.log_c.is_nan()
            && c.log_c < f64::INFINITY
            && non_increasing(&finite_points(&c.margins, window(top)))
    };

    for range in [0..base_len, base_len..profiles.len()] {
        if let Some(c) = pick_min(candidates(range).filter(decaying)) {
            return (Status::Pass, certificate(eps, c.b, &c.margins));
        }
    }

    let fast = pick_min(
        candidates(0..profiles.len())
            .zip(profiles.iter())
            .filter(|(c, (_, lw))| {
                c.log_c.is_finite() && growth_exponent(lw, top).is_some_and(|a| a <= PASS_SLOPE)
            })
            .map(|(c, _)| c),
    );
    if let Some(c) = fast {
        return (Status::Pass, certificate(eps, c.b, &c.margins));
    }

    let all_growing = candidates(0..profiles.len()).zip(profiles.iter()).all(|(c, (_, lw))| {
        !c.log_c.is_finite()
            || (linear_trend(&finite_points(&c.margins, window(top))).is_some_and(|t| t > LOG_SLACK)
                && growth_exponent(lw, top).is_none_or(|a| a > FAIL_SLOPE))
    });
    let best = pick_min(candidates(0..profiles.len())).expect("non-empty B grid");
    let status = if all_growing {
        Status::Fail
    } else {
        Status::Inconclusive
    };
    (status, certificate(eps, best.b, &best.margins))
}

fn minimal_eps(lw: &[f64], b_grid: &[f64], eps: f64, top: usize) -> (Status, Certificate) {
    // ln of the smallest B admissible at degree k.
    let need: Vec<f64> = lw
        .iter()
        .enumerate()
        .map(|(k, &l)| l / (k as f64 + 1.0))
        .collect();
    let b_min = need.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let margins_at = |b: f64| -> Vec<f64> {
        lw.iter()
            .enumerate()
            .map(|(k, &l)| l - (k as f64 + 1.0) * b.ln())
            .collect()
    };

    let pts = finite_points(&need, window(top));
    let exponent = growth_exponent(lw, top);
    let trend_ok = non_increasing(&pts) || exponent.is_some_and(|a| a <= MINIMAL_PASS_SLOPE);
    let trend_bad = exponent.is_some_and(|a| a >= MINIMAL_FAIL_SLOPE);

    if b_min.is_nan() || b_min == f64::INFINITY {
        let b = *b_grid.last().expect("non-empty B grid");
        return (Status::Fail, certificate(eps, b, &margins_at(b)));
    }
    let chosen = b_grid
        .iter()
        .chain(B_EXTENSION.iter().filter(|&&x| x > *b_grid.last().unwrap()))
        .copied()
        .find(|b| b.ln() >= b_min - LOG_SLACK);
    match chosen {
        Some(b) => {
            let status = if trend_ok {
                Status::Pass
            } else if trend_bad {
                Status::Fail
            } else {
                Status::Inconclusive
            };
            (status, certificate(eps, b, &margins_at(b)))
        }
        None => {
            let b = B_EXTENSION[B_EXTENSION.len() - 1].max(*b_grid.last().unwrap());
            let status = if trend_ok {
                Status::Inconclusive
            } else {
                Status::Fail
            };
            (status, certificate(eps, b, &margins_at(b)))
        }
    }
}

/// Tests one of the four growth conditions on the stored part of a symbol.
///
/// Both grids must be non-empty and positive, `b_grid` ascending. The
/// empty symbol passes with `C = 0`.
pub fn check_condition<S: Scalar>(
    symbol: &OperatorSymbol<S>,
    p: f64,
    mode: Mode,
    which: Condition,
    eps_grid: &[f64],
    b_grid: &[f64],
) -> Result<ClassVerdict> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("order p must be positive, got {p}")));
    }
    check_grid("eps", eps_grid, false)?;
    check_grid("B", b_grid, true)?;
    let top = symbol.max_order();

    let mut statuses = Vec::with_capacity(eps_grid.len());
    let mut certificates = Vec::with_capacity(eps_grid.len());

    if symbol.is_zero() {
        for &eps in eps_grid {
            statuses.push(Status::Pass);
            certificates.push(Certificate {
                eps,
                b: b_grid[0],
                c: Some(0.0),
                margin_by_degree: vec![Some(0.0); top + 1],
            });
        }
    } else {
        match mode {
            Mode::Normal => {
                let mut profiles = Vec::new();
                for &b in b_grid {
                    profiles.push((b, degree_profile(symbol, p, b, which, top)?));
                }
                let last = *b_grid.last().unwrap();
                for &b in B_EXTENSION.iter().filter(|&&x| x > last) {
                    profiles.push((b, degree_profile(symbol, p, b, which, top)?));
                }
                for &eps in eps_grid {
                    let (s, c) = normal_eps(&profiles, b_grid.len(), eps, top);
                    statuses.push(s);
                    certificates.push(c);
                }
            }
            Mode::Minimal => {
                for &eps in eps_grid {
                    let lw = degree_profile(symbol, p, eps, which, top)?;
                    let (s, c) = minimal_eps(&lw, b_grid, eps, top);
                    statuses.push(s);
                    certificates.push(c);
                }
            }
        }
    }

    Ok(ClassVerdict {
        mode,
        condition: (mode, which),
        status: combine(&statuses),
        certificates,
        max_degree_checked: top,
    })
}
