//! The heat-kernel Rayleigh bound and the dimensional exactness constants.
//!
//! For a normalized rule (Σ a_i = vol M), the mollified point measure
//! G_t = Σ a_i e^{tΔ}δ_{x_i} satisfies, whenever the rule integrates the
//! eigenfunctions of ordinals 0..=k exactly,
//!
//!   λ_k ≤ N(t)/D(t),   N(t) = Σ_{ij} a_i a_j ⟨∇e^{tΔ}δ_{x_i}, ∇e^{tΔ}δ_{x_j}⟩,
//!                      D(t) = Σ_{ij} a_i a_j ⟨e^{tΔ}δ_{x_i}, e^{tΔ}δ_{x_j}⟩ − vol(M),
//!
//! for every t > 0. The quotient is evaluated with exact kernels, so the
//! bound is sound at machine precision; minimizing over a geometric grid of
//! times gives the certified spectral ceiling for the rule.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heat_kernel::{inner_pair, KernelConfig};
use crate::manifold::ManifoldSpec;
use crate::math::{gamma_half_integer, unit_ball_volume, KahanSum};
use crate::quadrature::{QuadratureRule, NORMALIZATION_TOL};

/// Denominators below this fraction of vol(M) are treated as zero: they sit
/// at the cancellation/truncation noise floor of the double sum, where the
/// quotient certifies nothing, so the sample reports +∞ instead of a
/// meaningless ratio.
pub const NO_INFO_DENOM_FACTOR: f64 = 1e-10;

/// Pairs are summed in fixed-size chunks whose partial sums combine in
/// order, so results do not depend on the number of worker threads.
const PAIR_CHUNK: usize = 2048;

/// The Rayleigh quotient N(t)/D(t) at one diffusion time, or +∞ when D(t)
/// carries no information.
pub fn rayleigh_bound(rule: &QuadratureRule, t: f64, cfg: &KernelConfig) -> Result<f64> {
    let vol = rule.manifold().volume();
    let gap = (rule.weight_sum() - vol).abs();
    if gap > NORMALIZATION_TOL {
        return Err(Error::Precondition(format!(
            "rule is not normalized: Σ weights = {}, vol = {}",
            rule.weight_sum(),
            vol
        )));
    }
    let (inner_sum, grad_sum) = pairwise_sums(rule, t, cfg)?;
    let denom = inner_sum - vol;
    if denom <= NO_INFO_DENOM_FACTOR * vol {
        return Ok(f64::INFINITY);
    }
    Ok(grad_sum / denom)
}

/// Σ_{ij} a_i a_j ⟨e^{tΔ}δ_i, e^{tΔ}δ_j⟩ and the same with gradients, each
/// compensated and chunk-deterministic.
fn pairwise_sums(rule: &QuadratureRule, t: f64, cfg: &KernelConfig) -> Result<(f64, f64)> {
    let n = rule.len();
    let points = rule.points();
    let weights = rule.weights();
    let m = rule.manifold();

    // unique unordered pairs; off-diagonal entries count twice by symmetry
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();

    let chunk_sums: Vec<(f64, f64)> = pairs
        .par_chunks(PAIR_CHUNK)
        .map(|chunk| -> Result<(f64, f64)> {
            let mut inner = KahanSum::new();
            let mut grad = KahanSum::new();
            for &(i, j) in chunk {
                let (ki, gi) = inner_pair(m, t, &points[i], &points[j], cfg)?;
                let factor = if i == j { 1.0 } else { 2.0 };
                let w = factor * weights[i] * weights[j];
                inner.add(w * ki);
                grad.add(w * gi);
            }
            Ok((inner.value(), grad.value()))
        })
        .collect::<Result<_>>()?;

    let mut inner = KahanSum::new();
    let mut grad = KahanSum::new();
    for (a, b) in chunk_sums {
        inner.add(a);
        grad.add(b);
    }
    Ok((inner.value(), grad.value()))
}

/// One sampled point of a bound curve. `bound` may be +∞.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundSample {
    pub t: f64,
    pub bound: f64,
}

/// Rayleigh bounds over a geometric grid of diffusion times together with
/// the best (smallest finite) sample, which is the certified ceiling.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCurve {
    pub samples: Vec<BoundSample>,
    pub best: Option<BoundSample>,
}

/// Evaluate the bound on a geometric grid of `num ≥ 2` times in
/// [t_min, t_max].
pub fn bound_curve(
    rule: &QuadratureRule,
    t_min: f64,
    t_max: f64,
    num: usize,
    cfg: &KernelConfig,
) -> Result<BoundCurve> {
    if t_min <= 0.0 || t_min.is_nan() || t_max <= t_min || t_max.is_nan() {
        return Err(Error::InvalidInput(format!(
            "need 0 < t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    if num < 2 {
        return Err(Error::InvalidInput("need at least two grid points".into()));
    }
    let ratio = t_max / t_min;
    let mut samples = Vec::with_capacity(num);
    for i in 0..num {
        let t = t_min * ratio.powf(i as f64 / (num - 1) as f64);
        let bound = rayleigh_bound(rule, t, cfg)?;
        samples.push(BoundSample { t, bound });
    }
    let best = samples
        .iter()
        .filter(|s| s.bound.is_finite())
        .min_by(|a, b| a.bound.partial_cmp(&b.bound).unwrap())
        .copied();
    Ok(BoundCurve { samples, best })
}

/// Default diffusion-time window for a bound curve: the optimal scale is
/// t ~ n^{-2/d} in the manifold's own units, so a geometric grid spanning
/// [1e-4, 1] · vol^{2/d} brackets it for every n in desk range.
pub fn default_time_window(m: &ManifoldSpec) -> (f64, f64) {
    let scale = m.volume().powf(2.0 / m.dim() as f64);
    (1e-4 * scale, scale)
}

/// The dimensional constant c_d = (d/2 + 1)^{d/2+1} / Γ(d/2 + 1): no rule on
/// n nodes can integrate more than c_d·n + o(n) eigenfunctions exactly.
pub fn exactness_constant(d: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let half = d as f64 / 2.0 + 1.0;
    Ok(half.powf(half) / gamma_half_integer(d + 2))
}

/// Leading-order ceilings for an n-node rule in dimension d under the
/// vol(M) = 1 normalization.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExactnessCeiling {
    /// Largest exactly integrated eigenvalue: 2^{1-2/d} (d+2)^{2/d+1} π n^{2/d}.
    pub lambda: f64,
    /// Eigenfunction-count ceiling c_d · n, the Weyl count of `lambda`.
    pub count: f64,
}

pub fn exactness_ceiling(d: u32, n: u64) -> Result<ExactnessCeiling> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidInput("need d ≥ 1 and n ≥ 1".into()));
    }
    let df = d as f64;
    let lambda = 2f64.powf(1.0 - 2.0 / df)
        * (df + 2.0).powf(2.0 / df + 1.0)
        * std::f64::consts::PI
        * (n as f64).powf(2.0 / df);
    let count = exactness_constant(d)? * n as f64;
    Ok(ExactnessCeiling { lambda, count })
}

/// Weyl eigenfunction count below eigenvalue `lambda` at unit volume:
/// ω_d λ^{d/2} / (2π)^d.
pub fn weyl_count_unit_volume(d: u32, lambda: f64) -> f64 {
    unit_ball_volume(d) * lambda.powf(d as f64 / 2.0) / (2.0 * std::f64::consts::PI).powi(d as i32)
}
