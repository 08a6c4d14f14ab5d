//! Bracketing `‖f‖_{p,τ} = sup_z |f(z)| exp(−τ|z|^p)`.
//!
//! The upper end is the supremum of the radial majorant
//! `M(r) exp(−τ r^p)`, `M(r) = Σ_k (Σ_{|μ|=k} |c_μ|) r^k`, found by a
//! log-spaced scan followed by golden-section refinement. The lower end is
//! the best value of `|f(z)| exp(−τ|z|^p)` over a fixed witness set.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GrowthParams;
use crate::scalar::Scalar;
use crate::series::TaylorPoly;

const GRID_POINTS: usize = 512;
const GRID_FLOOR: f64 = 1e-6;
const REFINE_RTOL: f64 = 1e-9;
const RANDOM_DIRECTIONS: usize = 64;
const WITNESS_STRIDE: usize = 4;
const WITNESS_SEED: u64 = 0x5_eed0_fa11;

/// Certified enclosure `lower ≤ ‖f‖_{p,τ} ≤ upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub lower: f64,
    /// `None` when the majorant supremum overflows.
    pub upper: Option<f64>,
    /// Point `z` realising `lower`, as `[re, im]` pairs.
    pub witness: Vec<[f64; 2]>,
}

impl NormBracket {
    pub fn upper_or_inf(&self) -> f64 {
        self.upper.unwrap_or(f64::INFINITY)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper_or_inf()
    }
}

struct RadialSup {
    log_value: f64,
    r_star: f64,
    grid: Vec<f64>,
}

/// ln of the radial majorant objective at `r`.
fn log_objective(logm: &[(usize, f64)], params: &GrowthParams, r: f64) -> f64 {
    let weight = params.tau() * r.powf(params.p());
    if r == 0.0 {
        return logm
            .iter()
            .find(|(k, _)| *k == 0)
            .map_or(f64::NEG_INFINITY, |(_, l)| *l);
    }
    let lr = r.ln();
    let mut top = f64::NEG_INFINITY;
    for &(k, l) in logm {
        top = top.max(l + k as f64 * lr);
    }
    if top == f64::NEG_INFINITY {
        return top;
    }
    let s: f64 = logm
        .iter()
        .map(|&(k, l)| (l + k as f64 * lr - top).exp())
        .sum();
    top + s.ln() - weight
}

fn radial_sup(mags: &[f64], params: &GrowthParams) -> RadialSup {
    let logm: Vec<(usize, f64)> = mags
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(k, &m)| (k, m.ln()))
        .collect();
    let at_zero = log_objective(&logm, params, 0.0);
    let (p, tau) = (params.p(), params.tau());

    // Radius past which every term r^k e^{−τ r^p} decreases.
    let peak = logm
        .iter()
        .filter(|(k, _)| *k > 0)
        .map(|&(k, _)| (k as f64 / (tau * p)).powf(1.0 / p))
        .fold(0.0f64, f64::max);
    if peak == 0.0 {
        return RadialSup {
            log_value: at_zero,
            r_star: 0.0,
            grid: Vec::new(),
        };
    }

    let obj = |r: f64| log_objective(&logm, params, r);
    let mut r_max = 2.0 * peak;
    for _ in 0..64 {
        let mut r = r_max;
        let mut prev = obj(r);
        let mut rising = None;
        for _ in 0..8 {
            let next = 2.0 * r;
            let v = obj(next);
            if v >= prev {
                rising = Some(next);
                break;
            }
            prev = v;
            r = next;
        }
        match rising {
            Some(r) => r_max = 2.0 * r,
            None => break,
        }
    }

    let lo = GRID_FLOOR.min(r_max * 1e-6);
    let ratio = (r_max / lo).ln() / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| lo * (ratio * i as f64).exp())
        .collect();
    let values: Vec<f64> = grid.iter().map(|&r| obj(r)).collect();
    let (best_i, best_v) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| {
            if v > acc.1 {
                (i, v)
            } else {
                acc
            }
        });

    let a = if best_i == 0 { 0.0 } else { grid[best_i - 1] };
    let b = grid[(best_i + 1).min(GRID_POINTS - 1)];
    let (r_ref, v_ref) = golden_section_max(obj, a, b, REFINE_RTOL);

    let mut out = RadialSup {
        log_value: best_v,
        r_star: grid[best_i],
        grid,
    };
    if v_ref > out.log_value {
        out.log_value = v_ref;
        out.r_star = r_ref;
    }
    if at_zero > out.log_value {
        out.log_value = at_zero;
        out.r_star = 0.0;
    }
    out
}

/// Maximises a unimodal `f` on `[a, b]` until the bracket is within
/// `rtol` relative width; returns `(argmax, max)`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= rtol * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// ln of the upper end of the bracket; `-inf` for the zero polynomial.
pub fn norm_upper_log<S: Scalar>(f: &TaylorPoly<S>, params: &GrowthParams) -> f64 {
    radial_sup(&f.degree_magnitudes(), params).log_value
}

/// Upper end of the bracket alone (no witness search).
pub fn norm_upper<S: Scalar>(f: &TaylorPoly<S>, params: &GrowthParams) -> f64 {
    let l = norm_upper_log(f, params);
    if l == f64::NEG_INFINITY {
        0.0
    } else {
        l.exp()
    }
}

fn witness_directions(dim: usize) -> Vec<Vec<Complex<f64>>> {
    let mut dirs = Vec::with_capacity(RANDOM_DIRECTIONS + 2);
    let diag = 1.0 / (dim as f64).sqrt();
    dirs.push(vec![Complex::new(diag, 0.0); dim]);
    if dim > 1 {
        let mut e1 = vec![Complex::new(0.0, 0.0); dim];
        e1[0] = Complex::new(1.0, 0.0);
        dirs.push(e1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
    while dirs.len() < RANDOM_DIRECTIONS + 2 {
        let v: Vec<Complex<f64>> = (0..dim)
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            dirs.push(v.into_iter().map(|c| c / norm).collect());
        }
    }
    dirs
}

/// Certified bracket of `‖f‖_{p,τ}`; the zero polynomial gives `[0, 0]`.
pub fn norm_bracket<S: Scalar>(f: &TaylorPoly<S>, params: &GrowthParams) -> NormBracket {
    let dim = f.dim();
    if f.is_zero() {
        return NormBracket {
            lower: 0.0,
            upper: Some(0.0),
            witness: vec![[0.0, 0.0]; dim],
        };
    }
    let sup = radial_sup(&f.degree_magnitudes(), params);
    let upper = sup.log_value.exp();

    let f64poly: TaylorPoly<f64> = f.map_scalar(|x| x.to_f64_lossy());
    let mut radii = vec![0.0];
    radii.extend(sup.grid.iter().step_by(WITNESS_STRIDE).copied());
    radii.push(sup.r_star);
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let weights: Vec<f64> = radii.iter().map(|r| params.tau() * r.powf(params.p())).collect();

    let deg = f64poly.degree().unwrap_or(0);
    let log_at = |g: &[Complex<f64>], r: f64, w: f64| {
        let a = g.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * r + c).norm();
        if a.is_finite() && a > 0.0 {
            a.ln() - w
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut best = f64::NEG_INFINITY;
    let mut best_at = None;
    for dir in witness_directions(dim) {
        // f(r u) = Σ_k g_k r^k along the direction u
        let mut g = vec![Complex::new(0.0, 0.0); deg + 1];
        for (mu, c) in f64poly.coeffs() {
            g[mu.degree()] += c * mu.pow(&dir);
        }
        for (i, (&r, &w)) in radii.iter().zip(&weights).enumerate() {
            let lv = log_at(&g, r, w);
            if lv > best {
                best = lv;
                best_at = Some((dir.clone(), g.clone(), i));
            }
        }
    }
    let mut witness = vec![Complex::new(0.0, 0.0); dim];
    if let Some((dir, g, i)) = best_at {
        let mut r_best = radii[i];
        let (a, b) = (radii[i.saturating_sub(1)], radii[(i + 1).min(radii.len() - 1)]);
        if b > a {
            let obj = |r: f64| log_at(&g, r, params.tau() * r.powf(params.p()));
            let (r, v) = golden_section_max(obj, a, b, REFINE_RTOL);
            if v > best {
                best = v;
                r_best = r;
            }
        }
        witness = dir.iter().map(|u| u * r_best).collect();
    }
    let lower = if best == f64::NEG_INFINITY { 0.0 } else { best.exp() };
    let upper = if upper.is_finite() {
        Some(upper.max(lower))
    } else {
        None
    };
    NormBracket {
        lower,
        upper,
        witness: witness
            .iter()
            .map(|c| [c.re, c.im])
            .collect(),
    }
}
