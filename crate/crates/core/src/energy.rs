//! Gaussian pairwise repulsion energies and gradient-descent point synthesis.
//!
//! The simplified energy of a weighted configuration at diffusion scale t is
//!
//!   E(x) = Σ_{i,j} a_i a_j (8πt)^{-d/2} exp(-d(x_i, x_j)²/(8t)),
//!
//! the short-time Gaussian form of the heat-kernel interaction, diagonal
//! terms included. Minimizing it spreads points evenly over the manifold.
//! The approximating energy is the matching Gaussian form of the Rayleigh
//! quotient: the same sum with an extra (1/t + d²/t²) factor in the
//! numerator, divided by (E − vol).
//!
//! `optimize_points` runs Riemannian gradient descent with backtracking line
//! search from a seeded uniform-random start: step candidates halve until
//! the energy decreases, torus points re-wrap and sphere points renormalize
//! after every step, and the energy trace is non-increasing by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::manifold::{ManifoldSpec, Point};
use crate::math::{wrap_angle, wrap_diff, KahanSum};
use crate::quadrature::QuadratureRule;
use crate::spectral::NO_INFO_DENOM_FACTOR;

const PAIR_CHUNK: usize = 2048;

/// Descent controls. `step0` defaults to the diffusion scale itself, which
/// is the natural unit of the energy landscape.
#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig {
    /// Diffusion scale of the energy.
    pub t: f64,
    pub max_iters: usize,
    /// Stop when the full gradient norm drops below this.
    pub grad_tol: f64,
    /// Initial line-search step.
    pub step0: f64,
    /// Step shrink factor in (0, 1).
    pub backtrack: f64,
    /// Seed for the random initial configuration.
    pub seed: u64,
}

impl OptimizerConfig {
    /// Defaults for n points on m: t = vol^{2/d} · n^{-2/d}, 5000 iterations,
    /// gradient tolerance 1e-8, halving line search.
    pub fn for_problem(m: &ManifoldSpec, n: usize) -> Self {
        let t = default_diffusion_time(m, n);
        OptimizerConfig {
            t,
            max_iters: 5000,
            grad_tol: 1e-8,
            step0: t,
            backtrack: 0.5,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t <= 0.0 || !self.t.is_finite() {
            return Err(Error::InvalidInput(
                "diffusion scale t must be positive".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be at least 1".into()));
        }
        if self.backtrack <= 0.0 || self.backtrack >= 1.0 || self.backtrack.is_nan() {
            return Err(Error::InvalidInput(
                "backtrack factor must lie in (0, 1)".into(),
            ));
        }
        if self.step0 <= 0.0 || self.step0.is_nan() {
            return Err(Error::InvalidInput("step0 must be positive".into()));
        }
        Ok(())
    }
}

/// The n^{-2/d} diffusion scale in the manifold's own units, with the
/// constant chosen so the Gaussian spatial scale sqrt(8t) equals the mean
/// point spacing (vol/n)^{1/d}. Wider kernels leave the regime where the
/// Gaussian surrogate of the heat kernel is positive definite, and descent
/// then clusters points instead of spreading them.
pub fn default_diffusion_time(m: &ManifoldSpec, n: usize) -> f64 {
    let d = m.dim() as f64;
    m.volume().powf(2.0 / d) * (n.max(1) as f64).powf(-2.0 / d) / 8.0
}

/// Σ_{i,j} a_i a_j (8πt)^{-d/2} exp(-d(x_i,x_j)²/8t), diagonal included.
pub fn simplified_energy(rule: &QuadratureRule, t: f64) -> Result<f64> {
    check_time(t)?;
    energy_of(rule.manifold(), rule.points(), rule.weights(), t)
}

/// The Gaussian-kernel counterpart of the Rayleigh quotient. Returns +∞
/// when the denominator is at or below the no-information floor.
pub fn approx_energy(rule: &QuadratureRule, t: f64) -> Result<f64> {
    check_time(t)?;
    let m = rule.manifold();
    let vol = m.volume();
    let pref = (8.0 * PI * t).powf(-(m.dim() as f64) / 2.0);
    let pairs = pair_list(rule.len());
    let sums: Vec<(f64, f64)> = pairs
        .par_chunks(PAIR_CHUNK)
        .map(|chunk| -> Result<(f64, f64)> {
            let mut num = KahanSum::new();
            let mut den = KahanSum::new();
            for &(i, j) in chunk {
                let dist = m.geodesic_distance(&rule.points()[i], &rule.points()[j])?;
                let factor = if i == j { 1.0 } else { 2.0 };
                let base = factor
                    * rule.weights()[i]
                    * rule.weights()[j]
                    * pref
                    * (-dist * dist / (8.0 * t)).exp();
                num.add(base * (1.0 / t + dist * dist / (t * t)));
                den.add(base);
            }
            Ok((num.value(), den.value()))
        })
        .collect::<Result<_>>()?;
    let mut num = KahanSum::new();
    let mut den = KahanSum::new();
    for (a, b) in sums {
        num.add(a);
        den.add(b);
    }
    let denom = den.value() - vol;
    if denom <= NO_INFO_DENOM_FACTOR * vol {
        return Ok(f64::INFINITY);
    }
    Ok(num.value() / denom)
}

/// Gradient of the simplified energy with respect to each point, as tangent
/// vectors: wrapped displacement directions on circle/torus, tangent-plane
/// 3-vectors on the sphere. Cut-locus pairs (coincident points, antipodes,
/// half-period ties) contribute the zero subgradient.
pub fn energy_gradient(rule: &QuadratureRule, t: f64) -> Result<Vec<Vec<f64>>> {
    check_time(t)?;
    gradient_of(rule.manifold(), rule.points(), rule.weights(), t)
}

/// Minimize the simplified energy over point positions with weights held
/// fixed (vol/n when not supplied). Returns the final rule and the energy
/// trace, whose first entry is the energy of the seeded random start.
///
/// The initial configuration is `random_points(m, n, cfg.seed)`.
pub fn optimize_points(
    m: &ManifoldSpec,
    n: usize,
    weights: Option<&[f64]>,
    cfg: &OptimizerConfig,
) -> Result<(QuadratureRule, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "cannot optimize an empty configuration".into(),
        ));
    }
    cfg.validate()?;
    let weights: Vec<f64> = match weights {
        Some(w) => {
            if w.len() != n {
                return Err(Error::InvalidInput(format!(
                    "{} weights supplied for {} points",
                    w.len(),
                    n
                )));
            }
            if w.iter().any(|wi| !wi.is_finite() || *wi < 0.0) {
                return Err(Error::InvalidInput(
                    "weights must be finite and nonnegative".into(),
                ));
            }
            w.to_vec()
        }
        None => vec![m.volume() / n as f64; n],
    };

    let mut points = random_points(m, n, cfg.seed);
    let mut energy = energy_of(m, &points, &weights, cfg.t)?;
    let mut trace = vec![energy];
    let min_step = cfg.step0 * 1e-20;
    let mut step = cfg.step0 / 2.0;

    for _ in 0..cfg.max_iters {
        let grad = gradient_of(m, &points, &weights, cfg.t)?;
        let grad_norm: f64 = grad
            .iter()
            .flat_map(|g| g.iter().map(|c| c * c))
            .sum::<f64>()
            .sqrt();
        if grad_norm < cfg.grad_tol {
            break;
        }
        // start a little above the last accepted step, then halve
        step = (step * 2.0).min(cfg.step0 * 1e3);
        let mut accepted = false;
        while step > min_step {
            let candidate = retract_all(m, &points, &grad, step);
            let cand_energy = energy_of(m, &candidate, &weights, cfg.t)?;
            if cand_energy.is_finite() && cand_energy < energy {
                points = candidate;
                energy = cand_energy;
                trace.push(energy);
                accepted = true;
                break;
            }
            step *= cfg.backtrack;
        }
        if !accepted {
            break; // no descent direction at any step: stationary
        }
        debug_assert!(
            trace.windows(2).all(|w| w[1] <= w[0]),
            "energy trace must be non-increasing"
        );
    }

    let rule = QuadratureRule::new(*m, points, weights)?;
    Ok((rule, trace))
}

/// Seeded uniform random configuration: independent uniform angles on the
/// circle and torus, area-uniform points on the sphere.
pub fn random_points(m: &ManifoldSpec, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| match m {
            ManifoldSpec::Circle | ManifoldSpec::Torus { .. } => {
                let coords: Vec<f64> = (0..m.coord_len()).map(|_| TAU * rng.gen::<f64>()).collect();
                Point::new(m, coords).unwrap()
            }
            ManifoldSpec::Sphere2 => {
                let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
                let phi: f64 = TAU * rng.gen::<f64>();
                let s = (1.0 - z * z).max(0.0).sqrt();
                Point::new(m, vec![s * phi.cos(), s * phi.sin(), z]).unwrap()
            }
        })
        .collect()
}

fn check_time(t: f64) -> Result<()> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "diffusion time must be positive, got {t}"
        )));
    }
    Ok(())
}

fn pair_list(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

fn energy_of(m: &ManifoldSpec, points: &[Point], weights: &[f64], t: f64) -> Result<f64> {
    let pref = (8.0 * PI * t).powf(-(m.dim() as f64) / 2.0);
    let pairs = pair_list(points.len());
    let partials: Vec<f64> = pairs
        .par_chunks(PAIR_CHUNK)
        .map(|chunk| -> Result<f64> {
            let mut sum = KahanSum::new();
            for &(i, j) in chunk {
                let dist = m.geodesic_distance(&points[i], &points[j])?;
                let factor = if i == j { 1.0 } else { 2.0 };
                sum.add(factor * weights[i] * weights[j] * pref * (-dist * dist / (8.0 * t)).exp());
            }
            Ok(sum.value())
        })
        .collect::<Result<_>>()?;
    let mut total = KahanSum::new();
    for p in partials {
        total.add(p);
    }
    Ok(total.value())
}

fn gradient_of(
    m: &ManifoldSpec,
    points: &[Point],
    weights: &[f64],
    t: f64,
) -> Result<Vec<Vec<f64>>> {
    let pref = (8.0 * PI * t).powf(-(m.dim() as f64) / 2.0);
    points
        .par_iter()
        .enumerate()
        .map(|(i, xi)| {
            let mut g = vec![0.0; m.coord_len()];
            for (j, xj) in points.iter().enumerate() {
                if j == i {
                    continue;
                }
                let dist = m.geodesic_distance(xi, xj)?;
                let Some(dir) = distance_gradient(m, xi, xj, dist) else {
                    continue; // cut locus: zero subgradient for this pair
                };
                // both (i,j) and (j,i) of the double sum move x_i
                let coeff = -2.0
                    * weights[i]
                    * weights[j]
                    * pref
                    * (dist / (4.0 * t))
                    * (-dist * dist / (8.0 * t)).exp();
                for (gc, dc) in g.iter_mut().zip(&dir) {
                    *gc += coeff * dc;
                }
            }
            Ok(g)
        })
        .collect()
}

/// ∇_x d(x, y) as a unit tangent vector at x, or `None` on the cut locus
/// (d = 0, any wrapped coordinate difference at exactly half period, or
/// antipodal sphere points).
fn distance_gradient(m: &ManifoldSpec, x: &Point, y: &Point, dist: f64) -> Option<Vec<f64>> {
    if dist == 0.0 {
        return None;
    }
    match m {
        ManifoldSpec::Circle | ManifoldSpec::Torus { .. } => {
            let mut dir = Vec::with_capacity(x.coords().len());
            for (a, b) in x.coords().iter().zip(y.coords()) {
                let w = wrap_diff(a - b);
                if w == -PI {
                    return None; // half-period tie
                }
                dir.push(w / dist);
            }
            Some(dir)
        }
        ManifoldSpec::Sphere2 => {
            let u: f64 = x.coords().iter().zip(y.coords()).map(|(a, b)| a * b).sum();
            let u = u.clamp(-1.0, 1.0);
            let sin = (1.0 - u * u).sqrt();
            if sin == 0.0 {
                return None; // antipodal
            }
            Some(
                x.coords()
                    .iter()
                    .zip(y.coords())
                    .map(|(xc, yc)| -(yc - u * xc) / sin)
                    .collect(),
            )
        }
    }
}

fn retract_all(m: &ManifoldSpec, points: &[Point], grad: &[Vec<f64>], step: f64) -> Vec<Point> {
    points
        .iter()
        .zip(grad)
        .map(|(p, g)| {
            let moved: Vec<f64> = p
                .coords()
                .iter()
                .zip(g)
                .map(|(c, gc)| c - step * gc)
                .collect();
            match m {
                ManifoldSpec::Circle | ManifoldSpec::Torus { .. } => {
                    Point::new(m, moved.into_iter().map(wrap_angle).collect()).unwrap()
                }
                // renormalization; Point::new rejects the (unreachable for
                // finite steps from a unit vector) zero case, so fall back
                // to the original point rather than panic
                ManifoldSpec::Sphere2 => Point::new(m, moved).unwrap_or_else(|_| p.clone()),
            }
        })
        .collect()
}
