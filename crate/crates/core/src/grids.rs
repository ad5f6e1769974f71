//! Dense reference grids for numerical integration over the model manifolds.
//!
//! These are verification aids (orthonormality checks, mass-preservation and
//! semigroup tests), not production quadrature rules. Trapezoid grids are
//! spectrally exact for trigonometric polynomials on the circle and torus;
//! the sphere grid pairs Gauss–Legendre nodes in cos θ with a uniform
//! azimuthal grid and integrates spherical polynomials of bounded degree
//! exactly.

use std::f64::consts::TAU;

use crate::harmonics::gauss_legendre;
use crate::manifold::{ManifoldSpec, Point};

/// Nodes and weights of a reference grid with roughly `resolution` points
/// per dimension. Weights sum to the manifold volume to machine precision.
pub fn reference_grid(m: &ManifoldSpec, resolution: usize) -> Vec<(Point, f64)> {
    assert!(resolution >= 2);
    match m {
        ManifoldSpec::Circle => {
            let w = TAU / resolution as f64;
            (0..resolution)
                .map(|i| {
                    (
                        Point::new(m, vec![TAU * i as f64 / resolution as f64]).unwrap(),
                        w,
                    )
                })
                .collect()
        }
        ManifoldSpec::Torus { dim } => {
            let d = *dim as usize;
            let n = resolution;
            let w = (TAU / n as f64).powi(*dim as i32);
            let mut out = Vec::with_capacity(n.pow(*dim));
            let mut idx = vec![0usize; d];
            'outer: loop {
                let coords: Vec<f64> = idx.iter().map(|&i| TAU * i as f64 / n as f64).collect();
                out.push((Point::new(m, coords).unwrap(), w));
                for i in (0..d).rev() {
                    idx[i] += 1;
                    if idx[i] < n {
                        continue 'outer;
                    }
                    idx[i] = 0;
                }
                break;
            }
            out
        }
        ManifoldSpec::Sphere2 => {
            let n_theta = resolution;
            let n_phi = 2 * resolution;
            let gl = gauss_legendre(n_theta);
            let wphi = TAU / n_phi as f64;
            let mut out = Vec::with_capacity(n_theta * n_phi);
            for &(z, wz) in &gl {
                let s = (1.0 - z * z).max(0.0).sqrt();
                for j in 0..n_phi {
                    let phi = TAU * j as f64 / n_phi as f64;
                    let p = Point::new(m, vec![s * phi.cos(), s * phi.sin(), z]).unwrap();
                    out.push((p, wz * wphi));
                }
            }
            out
        }
    }
}
