//! Quadrature rules and spectral exactness audits.
//!
//! A rule is a finite set of manifold points with nonnegative weights. The
//! audit evaluates, for every eigenfunction up to an eigenvalue cutoff, the
//! residual |Σ_i a_i φ_j(x_i) − ∫ φ_j| and reports two exactness measures:
//!
//!   k*  — the longest exact prefix in ordinal order, and
//!   Λ*  — the largest eigenvalue whose entire eigenspace is exact
//!          (an eigenspace with any failing member caps Λ* below it).
//!
//! k* follows the eigenfunction indexing; Λ* is the basis- and
//! rotation-invariant statement.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::{EigenDescriptor, ManifoldSpec, Point};
use crate::math::KahanSum;

/// Absolute slack allowed between Σ weights and vol(M) for a rule to count
/// as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Points with nonnegative weights on a model manifold.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    manifold: ManifoldSpec,
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(manifold: ManifoldSpec, points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput(
                "a quadrature rule needs at least one point".into(),
            ));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "weight {i} is {w}; weights must be finite and nonnegative"
                )));
            }
        }
        for p in &points {
            manifold.check_point(p)?;
        }
        Ok(QuadratureRule {
            manifold,
            points,
            weights,
        })
    }

    /// Equal weights vol(M)/n, the normalized default.
    pub fn equal_weight(manifold: ManifoldSpec, points: Vec<Point>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidInput(
                "a quadrature rule needs at least one point".into(),
            ));
        }
        let w = manifold.volume() / n as f64;
        QuadratureRule::new(manifold, points, vec![w; n])
    }

    pub fn manifold(&self) -> &ManifoldSpec {
        &self.manifold
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n ≥ 1 by construction
    }

    pub fn weight_sum(&self) -> f64 {
        let mut s = KahanSum::new();
        for w in &self.weights {
            s.add(*w);
        }
        s.value()
    }

    /// Σ weights within `NORMALIZATION_TOL` of vol(M).
    pub fn is_normalized(&self) -> bool {
        (self.weight_sum() - self.manifold.volume()).abs() <= NORMALIZATION_TOL
    }
}

/// Default audit tolerance: 1e-10 · vol(M). Exact rules sit at ~1e-13 in
/// double precision, genuine failures at O(1).
pub fn default_audit_tol(m: &ManifoldSpec) -> f64 {
    1e-10 * m.volume()
}

/// Outcome of an exactness audit.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    /// Per-eigenfunction integration residuals, in ordinal order.
    pub residuals: Vec<(EigenDescriptor, f64)>,
    /// Largest k with ordinals 0..=k all exact; `None` if even the constant
    /// fails (unnormalized rule).
    pub k_star: Option<usize>,
    /// Largest eigenvalue whose whole eigenspace is exact; equals the scan
    /// cutoff when nothing fails, `None` when the constant itself fails.
    pub lambda_star: Option<f64>,
    /// Lowest-ordinal failing eigenfunction, if any.
    pub first_failure: Option<EigenDescriptor>,
    /// Number of scanned eigenfunctions with residual ≤ tol.
    pub exact_count: usize,
    /// Whether Σ weights matched vol(M); an unnormalized rule is audited
    /// as-is and flagged here rather than rejected.
    pub normalized: bool,
    pub weight_sum: f64,
    pub tol: f64,
    pub lambda_max: f64,
}

/// Audit which eigenfunctions with eigenvalue ≤ `lambda_max` the rule
/// integrates exactly (residual ≤ `tol`).
pub fn audit_exactness(rule: &QuadratureRule, lambda_max: f64, tol: f64) -> Result<AuditReport> {
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::InvalidInput(format!(
            "audit tolerance must be positive, got {tol}"
        )));
    }
    if lambda_max <= 0.0 || lambda_max.is_nan() {
        return Err(Error::InvalidInput(format!(
            "lambda_max must be positive, got {lambda_max}"
        )));
    }
    let m = rule.manifold();
    let basis = m.eigenbasis(lambda_max)?;
    let vol = m.volume();

    let residuals: Vec<(EigenDescriptor, f64)> = basis
        .into_par_iter()
        .map(|desc| {
            let mut sum = KahanSum::new();
            for (p, w) in rule.points().iter().zip(rule.weights()) {
                sum.add(w * m.eval_eigenfunction(&desc, p)?);
            }
            // ∫ φ_0 = vol^{1/2}; every other eigenfunction has mean zero
            let target = if desc.is_constant() { vol.sqrt() } else { 0.0 };
            let r = (sum.value() - target).abs();
            Ok((desc, r))
        })
        .collect::<Result<_>>()?;

    let first_failure = residuals
        .iter()
        .find(|(_, r)| *r > tol)
        .map(|(d, _)| d.clone());
    let k_star = match &first_failure {
        Some(d) if d.ordinal == 0 => None,
        Some(d) => Some(d.ordinal - 1),
        None => Some(residuals.len() - 1),
    };

    // Λ* treats eigenspaces atomically: the first eigenvalue group with any
    // failing member caps it at the previous group's eigenvalue.
    let lambda_star = match &first_failure {
        None => Some(lambda_max),
        Some(d) => residuals
            .iter()
            .map(|(desc, _)| desc.eigenvalue)
            .filter(|lam| *lam < d.eigenvalue)
            .fold(None, |acc: Option<f64>, lam| {
                Some(acc.map_or(lam, |a| a.max(lam)))
            }),
    };

    let exact_count = residuals.iter().filter(|(_, r)| *r <= tol).count();

    Ok(AuditReport {
        k_star,
        lambda_star,
        first_failure,
        exact_count,
        normalized: rule.is_normalized(),
        weight_sum: rule.weight_sum(),
        tol,
        lambda_max,
        residuals,
    })
}

/// Iteration budget of the projected-gradient weight fit.
const FIT_ITERS: usize = 10_000;

/// Fit nonnegative weights summing to vol(M) that minimize the squared
/// integration residual over all eigenfunctions with eigenvalue ≤
/// `lambda_max`, by projected gradient descent from equal weights with step
/// 1/L, L estimated by power iteration on the moment matrix.
pub fn fit_weights(m: &ManifoldSpec, points: &[Point], lambda_max: f64) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    let vol = m.volume();
    let n = points.len();
    if n == 1 {
        return Ok(vec![vol]);
    }
    let basis = m.eigenbasis(lambda_max)?;
    // rows: eigenfunctions evaluated at the points
    let rows: Vec<Vec<f64>> = basis
        .iter()
        .map(|desc| {
            points
                .iter()
                .map(|p| m.eval_eigenfunction(desc, p))
                .collect()
        })
        .collect::<Result<_>>()?;
    let targets: Vec<f64> = basis
        .iter()
        .map(|d| if d.is_constant() { vol.sqrt() } else { 0.0 })
        .collect();

    let apply_moment = |v: &[f64]| -> Vec<f64> {
        // AᵀA v without forming the matrix
        let mut out = vec![0.0; n];
        for row in &rows {
            let dot: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            for (o, a) in out.iter_mut().zip(row) {
                *o += dot * a;
            }
        }
        out
    };

    // spectral norm of AᵀA by power iteration, with margin so that 1/L is a
    // valid descent step for the gradient 2Aᵀ(Aw − b)
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut sigma = 1.0;
    for _ in 0..100 {
        let w = apply_moment(&v);
        sigma = w.iter().map(|c| c * c).sum::<f64>().sqrt();
        if sigma == 0.0 {
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / sigma;
        }
    }
    let lipschitz = 2.0 * sigma * 1.2 + 1e-30;
    let step = 1.0 / lipschitz;

    let mut w = vec![vol / n as f64; n];
    for _ in 0..FIT_ITERS {
        // gradient of ‖Aw − b‖²
        let mut grad = vec![0.0; n];
        for (row, target) in rows.iter().zip(&targets) {
            let resid: f64 = row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() - target;
            for (g, a) in grad.iter_mut().zip(row) {
                *g += 2.0 * resid * a;
            }
        }
        for (wi, g) in w.iter_mut().zip(&grad) {
            *wi -= step * g;
        }
        project_scaled_simplex(&mut w, vol);
    }
    Ok(w)
}

/// Euclidean projection onto {w ≥ 0, Σw = total}. Projection runs last in
/// every fit iteration, so the returned weights satisfy both constraints
/// exactly.
fn project_scaled_simplex(w: &mut [f64], total: f64) {
    let mut sorted: Vec<f64> = w.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    let mut rho = 0;
    for (j, u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - total) / (j + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
            rho = j + 1;
        }
    }
    debug_assert!(rho > 0);
    for wi in w.iter_mut() {
        *wi = (*wi - tau).max(0.0);
    }
}
