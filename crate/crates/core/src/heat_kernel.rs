//! Exact heat kernels on the model manifolds, with the two inner products
//! used by the spectral bound:
//!
//!   kernel_inner(t, x, y)      = ⟨e^{tΔ}δ_x, e^{tΔ}δ_y⟩ = K_{2t}(x, y)
//!   grad_kernel_inner(t, x, y) = ⟨∇e^{tΔ}δ_x, ∇e^{tΔ}δ_y⟩ = -∂_s K_s(x, y)|_{s=2t}
//!
//! Circle and torus kernels factor per coordinate into the periodic 1-d
//! kernel, which has two convergent series: the image (lattice) sum
//!
//!   K_s(δ) = (4πs)^{-1/2} Σ_{j∈Z} exp(-(δ + 2πj)² / 4s)
//!
//! fast for small s, and the Fourier sum
//!
//!   K_s(δ) = 1/(2π) + (1/π) Σ_{m≥1} e^{-m²s} cos(mδ)
//!
//! fast for large s. The representation switches at `switch_time`, and each
//! series is truncated when a geometric-tail majorant of the remainder drops
//! below `tail_tol`, so the tolerance is a guarantee rather than a heuristic.
//! The sphere kernel is the spectral sum Σ_ℓ e^{-ℓ(ℓ+1)s} (2ℓ+1)/(4π) P_ℓ(cos θ).
//!
//! Time derivatives are taken term by term inside the truncated series, with
//! the truncation criterion enlarged by the polynomial factor they introduce.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::manifold::{wrapped_coord_distance, ManifoldSpec, Point};

/// Hard cap on terms of a single 1-d series evaluation.
const MAX_SERIES_TERMS: usize = 1_000_000;
/// Hard cap on the sphere spectral sum.
const MAX_SPHERE_DEGREE: u64 = 10_000;

/// Evaluation controls for the kernel series.
#[derive(Debug, Clone, Copy)]
pub struct KernelConfig {
    /// Absolute bound enforced on every truncated series tail.
    pub tail_tol: f64,
    /// Kernel-time crossover between the image sum (below) and the Fourier
    /// sum (above). Set to `f64::INFINITY` or a denormal-small value to pin
    /// one representation, e.g. for cross-validation.
    pub switch_time: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            tail_tol: 1e-14,
            switch_time: 1.0 / (2.0 * PI),
        }
    }
}

impl KernelConfig {
    fn validate(&self) -> Result<()> {
        if self.tail_tol <= 0.0 || !self.tail_tol.is_finite() {
            return Err(Error::InvalidInput(
                "tail_tol must be positive and finite".into(),
            ));
        }
        if self.switch_time <= 0.0 || self.switch_time.is_nan() {
            return Err(Error::InvalidInput("switch_time must be positive".into()));
        }
        Ok(())
    }
}

/// The heat kernel K_t(x, y). Positive for all t > 0.
pub fn heat_kernel(
    m: &ManifoldSpec,
    t: f64,
    x: &Point,
    y: &Point,
    cfg: &KernelConfig,
) -> Result<f64> {
    Ok(kernel_with_dt(m, t, x, y, cfg)?.0)
}

/// ⟨e^{tΔ}δ_x, e^{tΔ}δ_y⟩, by self-adjointness the kernel at doubled time.
pub fn kernel_inner(
    m: &ManifoldSpec,
    t: f64,
    x: &Point,
    y: &Point,
    cfg: &KernelConfig,
) -> Result<f64> {
    check_time(t)?;
    heat_kernel(m, 2.0 * t, x, y, cfg)
}

/// ⟨∇e^{tΔ}δ_x, ∇e^{tΔ}δ_y⟩ = [-½ ∂_t e^{2tΔ}δ_x](y), evaluated as the
/// analytic -∂_s of the kernel at s = 2t. May be negative for well-separated
/// points.
pub fn grad_kernel_inner(
    m: &ManifoldSpec,
    t: f64,
    x: &Point,
    y: &Point,
    cfg: &KernelConfig,
) -> Result<f64> {
    check_time(t)?;
    Ok(-kernel_with_dt(m, 2.0 * t, x, y, cfg)?.1)
}

/// Both inner products at once, sharing the series work. This is the hot
/// path of the pairwise double sums.
pub(crate) fn inner_pair(
    m: &ManifoldSpec,
    t: f64,
    x: &Point,
    y: &Point,
    cfg: &KernelConfig,
) -> Result<(f64, f64)> {
    check_time(t)?;
    let (value, dvalue) = kernel_with_dt(m, 2.0 * t, x, y, cfg)?;
    Ok((value, -dvalue))
}

fn check_time(t: f64) -> Result<()> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "diffusion time must be positive, got {t}"
        )));
    }
    Ok(())
}

/// (K_s(x,y), ∂_s K_s(x,y)) at kernel time s.
fn kernel_with_dt(
    m: &ManifoldSpec,
    s: f64,
    x: &Point,
    y: &Point,
    cfg: &KernelConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    check_time(s)?;
    m.check_point(x)?;
    m.check_point(y)?;
    match m {
        ManifoldSpec::Circle | ManifoldSpec::Torus { .. } => {
            let d = m.coord_len();
            let use_image = s <= cfg.switch_time;
            // split the tolerance across coordinates of the product
            let bound_1d = 1.0 / (2.0 * PI) + 1.0 / (2.0 * (PI * s).sqrt());
            let tol = cfg.tail_tol / (d as f64 * bound_1d.max(1.0).powi(d as i32 - 1));
            let mut values = Vec::with_capacity(d);
            let mut dvalues = Vec::with_capacity(d);
            for (a, b) in x.coords().iter().zip(y.coords()) {
                let delta = wrapped_coord_distance(*a, *b);
                let (v, dv) = if use_image {
                    periodic_factor_image(s, delta, tol)?
                } else {
                    periodic_factor_fourier(s, delta, tol)?
                };
                values.push(v);
                dvalues.push(dv);
            }
            let value: f64 = values.iter().product();
            let mut dvalue = 0.0;
            for (c, dv) in dvalues.iter().enumerate() {
                let mut term = *dv;
                for (j, v) in values.iter().enumerate() {
                    if j != c {
                        term *= v;
                    }
                }
                dvalue += term;
            }
            Ok((value, dvalue))
        }
        ManifoldSpec::Sphere2 => {
            let dot: f64 = x.coords().iter().zip(y.coords()).map(|(a, b)| a * b).sum();
            sphere_kernel_with_dt(s, dot.clamp(-1.0, 1.0), cfg.tail_tol)
        }
    }
}

/// Periodic 1-d kernel and its s-derivative by the image sum.
fn periodic_factor_image(s: f64, delta: f64, tol: f64) -> Result<(f64, f64)> {
    let amp = 1.0 / (4.0 * PI * s).sqrt();
    let mut value = 0.0;
    let mut dvalue = 0.0;
    let add = |r: f64, value: &mut f64, dvalue: &mut f64| {
        let e = amp * (-r * r / (4.0 * s)).exp();
        *value += e;
        *dvalue += e * (r * r / (4.0 * s * s) - 1.0 / (2.0 * s));
    };
    add(delta, &mut value, &mut dvalue);

    let two_pi = 2.0 * PI;
    let mut level = 1usize;
    loop {
        // images at level ≥ j have radius ≥ (2j-1)π; majorize each level by
        // the polynomial factor at its largest radius and the exponential at
        // its smallest, then sum the geometric tail
        let r_min = (2 * level - 1) as f64 * PI;
        let r_max = r_min + two_pi;
        let decay = (-r_min * r_min / (4.0 * s)).exp();
        let m_val = amp * decay;
        let m_dval = amp * decay * (0.5 / s + r_max * r_max / (4.0 * s * s));
        let q = ((r_min + 2.0 * two_pi) / r_max).powi(2) * (-PI * r_min / s).exp();
        if q < 1.0 {
            let tail_val = 2.0 * m_val / (1.0 - q);
            let tail_dval = 2.0 * m_dval / (1.0 - q);
            if tail_val < tol && tail_dval < tol {
                return Ok((value, dvalue));
            }
        }
        if level > MAX_SERIES_TERMS {
            return Err(Error::Resource(format!(
                "periodic image sum did not converge within {MAX_SERIES_TERMS} terms (s = {s})"
            )));
        }
        let shift = two_pi * level as f64;
        add(delta + shift, &mut value, &mut dvalue);
        add(delta - shift, &mut value, &mut dvalue);
        level += 1;
    }
}

/// Periodic 1-d kernel and its s-derivative by the Fourier sum.
fn periodic_factor_fourier(s: f64, delta: f64, tol: f64) -> Result<(f64, f64)> {
    let mut value = 1.0 / (2.0 * PI);
    let mut dvalue = 0.0;
    let mut m = 1u64;
    loop {
        let mf = m as f64;
        let decay = (-mf * mf * s).exp();
        // remaining-terms majorant, valid for both the kernel (factor 1)
        // and the derivative (factor m²)
        let q = ((mf + 1.0) / mf).powi(2) * (-(2.0 * mf + 1.0) * s).exp();
        if q < 1.0 {
            let head = decay / PI / (1.0 - q);
            if head < tol && head * mf * mf < tol {
                return Ok((value, dvalue));
            }
        }
        if m as usize > MAX_SERIES_TERMS {
            return Err(Error::Resource(format!(
                "periodic Fourier sum did not converge within {MAX_SERIES_TERMS} terms (s = {s})"
            )));
        }
        let c = (mf * delta).cos();
        value += decay * c / PI;
        dvalue -= mf * mf * decay * c / PI;
        m += 1;
    }
}

/// Sphere kernel and its s-derivative: Σ_ℓ e^{-ℓ(ℓ+1)s} (2ℓ+1)/(4π) P_ℓ(cos θ).
fn sphere_kernel_with_dt(s: f64, cos_theta: f64, tol: f64) -> Result<(f64, f64)> {
    let mut value = 0.0;
    let mut dvalue = 0.0;
    let mut legendre = crate::harmonics::LegendreIter::new(cos_theta);
    for ell in 0..=MAX_SPHERE_DEGREE {
        let p = legendre.next().unwrap();
        let lam = (ell * (ell + 1)) as f64;
        let w = (-lam * s).exp() * (2.0 * ell as f64 + 1.0) / (4.0 * PI);
        value += w * p;
        dvalue -= lam * w * p;
        let guard = (-lam * s).exp() * (2.0 * ell as f64 + 1.0).powi(2);
        if guard < tol && guard * lam.max(1.0) < tol {
            return Ok((value, dvalue));
        }
    }
    Err(Error::Resource(format!(
        "sphere spectral sum needs degree beyond {MAX_SPHERE_DEGREE} (s = {s})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::wrap_diff;
    use std::f64::consts::TAU;

    fn cfg() -> KernelConfig {
        KernelConfig::default()
    }

    fn image_cfg() -> KernelConfig {
        KernelConfig {
            switch_time: f64::INFINITY,
            ..KernelConfig::default()
        }
    }

    fn fourier_cfg() -> KernelConfig {
        KernelConfig {
            switch_time: f64::MIN_POSITIVE,
            ..KernelConfig::default()
        }
    }

    #[test]
    fn circle_equilibrates_to_uniform() {
        let m = ManifoldSpec::Circle;
        let x = Point::circle(0.4);
        let y = Point::circle(5.2);
        let k = heat_kernel(&m, 1e3, &x, &y, &cfg()).unwrap();
        assert!((k - 1.0 / TAU).abs() < 1e-12);
    }

    #[test]
    fn torus_representations_agree() {
        let m = ManifoldSpec::torus(2).unwrap();
        let x = Point::new(&m, vec![0.3, 5.9]).unwrap();
        let y = Point::new(&m, vec![2.8, 1.1]).unwrap();
        for &t in &[0.05f64, 0.1, 0.3, 1.0] {
            let a = heat_kernel(&m, t, &x, &y, &image_cfg()).unwrap();
            let b = heat_kernel(&m, t, &x, &y, &fourier_cfg()).unwrap();
            assert!((a - b).abs() < 1e-12, "t = {t}: image {a} vs fourier {b}");
        }
    }

    #[test]
    fn torus_diagonal_lower_bound() {
        // K_{2t}(x,x) ≥ (8πt)^{-d/2}: the zero image alone contributes that
        let m = ManifoldSpec::torus(2).unwrap();
        let x = Point::new(&m, vec![1.0, 2.0]).unwrap();
        for &t in &[0.01f64, 0.05, 0.1, 0.5] {
            let v = kernel_inner(&m, t, &x, &x, &cfg()).unwrap();
            assert!(v >= 1.0 / (8.0 * PI * t) - 1e-12, "t = {t}");
        }
    }

    #[test]
    fn kernel_inner_is_doubled_time() {
        let m = ManifoldSpec::Sphere2;
        let x = Point::new(&m, vec![1.0, 0.0, 0.0]).unwrap();
        let y = Point::new(&m, vec![0.0, 1.0, 1.0]).unwrap();
        let a = kernel_inner(&m, 0.07, &x, &y, &cfg()).unwrap();
        let b = heat_kernel(&m, 0.14, &x, &y, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn inner_equilibrates_to_inverse_volume() {
        for m in [
            ManifoldSpec::Circle,
            ManifoldSpec::torus(2).unwrap(),
            ManifoldSpec::Sphere2,
        ] {
            let coords = match m {
                ManifoldSpec::Circle => vec![0.3],
                ManifoldSpec::Torus { .. } => vec![0.3, 4.4],
                ManifoldSpec::Sphere2 => vec![0.0, 1.0, 0.0],
            };
            let x = Point::new(&m, coords.clone()).unwrap();
            let y = Point::new(&m, coords).unwrap();
            let v = kernel_inner(&m, 500.0, &x, &y, &cfg()).unwrap();
            assert!((v - 1.0 / m.volume()).abs() < 1e-12, "{}", m.name());
        }
    }

    #[test]
    fn grad_inner_matches_lattice_sum_display() {
        // d = 2 image-sum form:
        //   1/(16πt²) Σ_k e^{-‖Δ+k‖²/8t} - Σ_k ‖Δ+k‖²/(128πt³) e^{-‖Δ+k‖²/8t}
        let m = ManifoldSpec::torus(2).unwrap();
        let x = Point::new(&m, vec![0.7, 3.0]).unwrap();
        let y = Point::new(&m, vec![1.2, 2.1]).unwrap();
        let t = 0.04;
        let (dx, dy) = (wrap_diff(0.7 - 1.2), wrap_diff(3.0 - 2.1));
        let mut expected = 0.0;
        for kx in -6i32..=6 {
            for ky in -6i32..=6 {
                let rx = dx + TAU * kx as f64;
                let ry = dy + TAU * ky as f64;
                let r2 = rx * rx + ry * ry;
                let e = (-r2 / (8.0 * t)).exp();
                expected += e / (16.0 * PI * t * t) - r2 / (128.0 * PI * t * t * t) * e;
            }
        }
        let got = grad_kernel_inner(&m, t, &x, &y, &image_cfg()).unwrap();
        assert!((got - expected).abs() < 1e-10 * expected.abs().max(1.0));
    }

    #[test]
    fn grad_inner_diagonal_majorized_by_kernel() {
        // at x = y the distance term only vanishes in the zero image, so
        // grad_kernel_inner ≤ (d/4t) · kernel_inner
        for d in [1u32, 2, 3] {
            let m = ManifoldSpec::torus(d).unwrap();
            let x = Point::new(&m, vec![0.5; d as usize]).unwrap();
            for &t in &[0.01f64, 0.05] {
                let g = grad_kernel_inner(&m, t, &x, &x, &cfg()).unwrap();
                let k = kernel_inner(&m, t, &x, &x, &cfg()).unwrap();
                assert!(g <= d as f64 / (4.0 * t) * k + 1e-12, "d = {d}, t = {t}");
            }
        }
    }

    #[test]
    fn rejects_bad_time() {
        let m = ManifoldSpec::Circle;
        let x = Point::circle(0.0);
        assert!(matches!(
            heat_kernel(&m, 0.0, &x, &x, &cfg()),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            grad_kernel_inner(&m, -1.0, &x, &x, &cfg()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn resource_errors_on_hopeless_truncation() {
        let m = ManifoldSpec::Sphere2;
        let x = Point::new(&m, vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            heat_kernel(&m, 1e-10, &x, &x, &cfg()),
            Err(Error::Resource(_))
        ));
        let c = ManifoldSpec::Circle;
        let p = Point::circle(1.0);
        assert!(matches!(
            heat_kernel(&c, 1e-14, &p, &p, &fourier_cfg()),
            Err(Error::Resource(_))
        ));
    }
}
