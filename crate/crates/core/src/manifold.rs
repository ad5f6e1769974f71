//! Model manifolds and their Laplacian eigenbases.
//!
//! Three closed manifolds are supported: the circle of circumference 2π,
//! the flat d-torus with side 2π per coordinate, and the unit 2-sphere.
//! Each carries an explicit real L²-normalized eigenbasis of the
//! Laplace–Beltrami operator, ordered by eigenvalue with deterministic
//! tie-breaking, so that "the first k eigenfunctions" is well defined.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonics::normalized_assoc_legendre;
use crate::math::{unit_ball_volume, wrap_angle};

/// One of the supported model manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldSpec {
    /// S¹ realized as [0, 2π), volume 2π.
    Circle,
    /// Flat torus [0, 2π)^d, volume (2π)^d.
    Torus { dim: u32 },
    /// Unit sphere in R³, volume 4π.
    Sphere2,
}

impl ManifoldSpec {
    pub fn circle() -> Self {
        ManifoldSpec::Circle
    }

    pub fn torus(dim: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "torus dimension must be positive".into(),
            ));
        }
        Ok(ManifoldSpec::Torus { dim })
    }

    pub fn sphere2() -> Self {
        ManifoldSpec::Sphere2
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> u32 {
        match self {
            ManifoldSpec::Circle => 1,
            ManifoldSpec::Torus { dim } => *dim,
            ManifoldSpec::Sphere2 => 2,
        }
    }

    /// Number of coordinates a point carries (ambient for the sphere).
    pub fn coord_len(&self) -> usize {
        match self {
            ManifoldSpec::Circle => 1,
            ManifoldSpec::Torus { dim } => *dim as usize,
            ManifoldSpec::Sphere2 => 3,
        }
    }

    /// Riemannian volume: 2π, (2π)^d, or 4π.
    pub fn volume(&self) -> f64 {
        match self {
            ManifoldSpec::Circle => TAU,
            ManifoldSpec::Torus { dim } => TAU.powi(*dim as i32),
            ManifoldSpec::Sphere2 => 4.0 * PI,
        }
    }

    /// Canonical config/CLI name: "circle", "torus:d", "sphere2".
    pub fn name(&self) -> String {
        match self {
            ManifoldSpec::Circle => "circle".into(),
            ManifoldSpec::Torus { dim } => format!("torus:{dim}"),
            ManifoldSpec::Sphere2 => "sphere2".into(),
        }
    }

    /// Parse the canonical name.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "circle" => Ok(ManifoldSpec::Circle),
            "sphere2" => Ok(ManifoldSpec::Sphere2),
            _ => {
                if let Some(d) = s.strip_prefix("torus:") {
                    let dim: u32 = d
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad torus dimension {d:?}")))?;
                    ManifoldSpec::torus(dim)
                } else {
                    Err(Error::InvalidInput(format!(
                        "unknown manifold {s:?} (expected circle, torus:d, or sphere2)"
                    )))
                }
            }
        }
    }

    /// Geodesic distance between two points of this manifold.
    ///
    /// Circle/torus distances wrap each coordinate difference into [-π, π)
    /// and combine in the Euclidean norm; sphere distance is the great-circle
    /// angle arccos⟨x, y⟩ with the dot product clamped to [-1, 1].
    pub fn geodesic_distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        match self {
            ManifoldSpec::Circle | ManifoldSpec::Torus { .. } => {
                let mut sq = 0.0;
                for (a, b) in x.coords().iter().zip(y.coords()) {
                    let d = wrapped_coord_distance(*a, *b);
                    sq += d * d;
                }
                Ok(sq.sqrt())
            }
            ManifoldSpec::Sphere2 => {
                let dot: f64 = x.coords().iter().zip(y.coords()).map(|(a, b)| a * b).sum();
                Ok(dot.clamp(-1.0, 1.0).acos())
            }
        }
    }

    pub(crate) fn check_point(&self, p: &Point) -> Result<()> {
        if p.coords().len() != self.coord_len() {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates but {} expects {}",
                p.coords().len(),
                self.name(),
                self.coord_len()
            )));
        }
        Ok(())
    }

    /// All eigenfunction descriptors with eigenvalue ≤ `lambda_max`, sorted
    /// by (eigenvalue, label) with the constant at ordinal 0.
    pub fn eigenbasis(&self, lambda_max: f64) -> Result<Vec<EigenDescriptor>> {
        if !lambda_max.is_finite() || lambda_max < 0.0 {
            return Err(Error::InvalidInput(format!(
                "lambda_max must be finite and nonnegative, got {lambda_max}"
            )));
        }
        let mut entries: Vec<(f64, EigenLabel)> = Vec::new();
        match self {
            ManifoldSpec::Circle => {
                let m_max = lambda_max.sqrt().floor() as u64;
                entries.push((
                    0.0,
                    EigenLabel::Circle {
                        freq: 0,
                        parity: Parity::Cos,
                    },
                ));
                for m in 1..=m_max {
                    let lam = (m * m) as f64;
                    if lam > lambda_max {
                        break;
                    }
                    entries.push((
                        lam,
                        EigenLabel::Circle {
                            freq: m,
                            parity: Parity::Cos,
                        },
                    ));
                    entries.push((
                        lam,
                        EigenLabel::Circle {
                            freq: m,
                            parity: Parity::Sin,
                        },
                    ));
                }
            }
            ManifoldSpec::Torus { dim } => {
                let d = *dim as usize;
                let reach = lambda_max.sqrt().floor() as i64;
                let mut k = vec![-reach; d];
                'outer: loop {
                    let norm_sq: i64 = k.iter().map(|c| c * c).sum();
                    if norm_sq as f64 <= lambda_max {
                        if norm_sq == 0 {
                            entries.push((
                                0.0,
                                EigenLabel::Torus {
                                    vector: k.clone(),
                                    parity: Parity::Cos,
                                },
                            ));
                        } else if is_canonical_rep(&k) {
                            let lam = norm_sq as f64;
                            entries.push((
                                lam,
                                EigenLabel::Torus {
                                    vector: k.clone(),
                                    parity: Parity::Cos,
                                },
                            ));
                            entries.push((
                                lam,
                                EigenLabel::Torus {
                                    vector: k.clone(),
                                    parity: Parity::Sin,
                                },
                            ));
                        }
                    }
                    // odometer over the box [-reach, reach]^d
                    for i in (0..d).rev() {
                        if k[i] < reach {
                            k[i] += 1;
                            continue 'outer;
                        }
                        k[i] = -reach;
                    }
                    break;
                }
            }
            ManifoldSpec::Sphere2 => {
                let mut ell = 0u64;
                while (ell * (ell + 1)) as f64 <= lambda_max {
                    let lam = (ell * (ell + 1)) as f64;
                    for order in -(ell as i64)..=(ell as i64) {
                        entries.push((lam, EigenLabel::Sphere { degree: ell, order }));
                    }
                    ell += 1;
                }
            }
        }
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
        Ok(entries
            .into_iter()
            .enumerate()
            .map(|(ordinal, (eigenvalue, label))| EigenDescriptor {
                eigenvalue,
                ordinal,
                label,
            })
            .collect())
    }

    /// Evaluate the real L²-normalized eigenfunction described by `e` at `x`.
    pub fn eval_eigenfunction(&self, e: &EigenDescriptor, x: &Point) -> Result<f64> {
        self.check_point(x)?;
        let vol = self.volume();
        match (&e.label, self) {
            (EigenLabel::Circle { freq, parity }, ManifoldSpec::Circle) => {
                if *freq == 0 {
                    return Ok(1.0 / vol.sqrt());
                }
                let arg = *freq as f64 * x.coords()[0];
                let norm = (vol / 2.0).sqrt();
                Ok(parity.apply(arg) / norm)
            }
            (EigenLabel::Torus { vector, parity }, ManifoldSpec::Torus { dim }) => {
                if vector.len() != *dim as usize {
                    return Err(Error::InvalidInput(
                        "eigenfunction label dimension does not match manifold".into(),
                    ));
                }
                if vector.iter().all(|&c| c == 0) {
                    return Ok(1.0 / vol.sqrt());
                }
                let arg: f64 = vector
                    .iter()
                    .zip(x.coords())
                    .map(|(&k, &c)| k as f64 * c)
                    .sum();
                let norm = (vol / 2.0).sqrt();
                Ok(parity.apply(arg) / norm)
            }
            (EigenLabel::Sphere { degree, order }, ManifoldSpec::Sphere2) => {
                let c = x.coords();
                let z = c[2].clamp(-1.0, 1.0);
                let m_abs = order.unsigned_abs();
                let p = normalized_assoc_legendre(*degree, m_abs, z);
                if *order == 0 {
                    Ok(p)
                } else {
                    let phi = c[1].atan2(c[0]);
                    let arg = m_abs as f64 * phi;
                    let trig = if *order > 0 { arg.cos() } else { arg.sin() };
                    Ok(std::f64::consts::SQRT_2 * p * trig)
                }
            }
            _ => Err(Error::InvalidInput(format!(
                "eigenfunction label {:?} does not belong to manifold {}",
                e.label,
                self.name()
            ))),
        }
    }
}

/// min(|a-b|, 2π-|a-b|) for canonicalized angles. |a-b| is identical for
/// both argument orders in floating point, so the result is bit-symmetric.
pub(crate) fn wrapped_coord_distance(a: f64, b: f64) -> f64 {
    let raw = (a - b).abs();
    raw.min(TAU - raw)
}

/// True if `k` is the chosen representative of the pair {k, -k}:
/// its first nonzero component is positive.
fn is_canonical_rep(k: &[i64]) -> bool {
    for &c in k {
        if c > 0 {
            return true;
        }
        if c < 0 {
            return false;
        }
    }
    false
}

/// Leading-order Weyl prediction for the k-th Laplacian eigenvalue on a
/// d-dimensional manifold of the given volume:
///
///   λ_k ≈ ( (2π)^d k / (ω_d · vol) )^{2/d},   ω_d = unit-ball volume.
pub fn weyl_lambda(d: u32, k: u64, volume: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if volume <= 0.0 || volume.is_nan() {
        return Err(Error::InvalidInput("volume must be positive".into()));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let df = d as f64;
    let count_coeff = unit_ball_volume(d) * volume / TAU.powi(d as i32);
    Ok((k as f64 / count_coeff).powf(2.0 / df))
}

/// A point on a model manifold: angles in [0, 2π) per coordinate for the
/// circle and torus, a unit 3-vector for the sphere. Canonicalized on
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(m: &ManifoldSpec, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != m.coord_len() {
            return Err(Error::InvalidInput(format!(
                "{} expects {} coordinates, got {}",
                m.name(),
                m.coord_len(),
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "point coordinates must be finite".into(),
            ));
        }
        match m {
            ManifoldSpec::Circle | ManifoldSpec::Torus { .. } => Ok(Point {
                coords: coords.into_iter().map(wrap_angle).collect(),
            }),
            ManifoldSpec::Sphere2 => {
                let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm < 1e-12 {
                    return Err(Error::InvalidInput(
                        "sphere point must be a nonzero 3-vector".into(),
                    ));
                }
                Ok(Point {
                    coords: coords.into_iter().map(|c| c / norm).collect(),
                })
            }
        }
    }

    pub fn circle(angle: f64) -> Self {
        Point::new(&ManifoldSpec::Circle, vec![angle]).unwrap()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// cos/sin branch of a real trigonometric eigenfunction pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Cos,
    Sin,
}

impl Parity {
    fn apply(&self, arg: f64) -> f64 {
        match self {
            Parity::Cos => arg.cos(),
            Parity::Sin => arg.sin(),
        }
    }
}

/// Multiplicity-resolving label of one real eigenfunction.
///
/// The derived `Ord` gives the deterministic tie order within an eigenvalue:
/// lattice vector (lexicographic) then cos before sin on circle and torus,
/// degree then order on the sphere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenLabel {
    Circle { freq: u64, parity: Parity },
    Torus { vector: Vec<i64>, parity: Parity },
    Sphere { degree: u64, order: i64 },
}

impl std::fmt::Display for EigenLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EigenLabel::Circle { freq: 0, .. } => write!(f, "const"),
            EigenLabel::Circle { freq, parity } => {
                write!(
                    f,
                    "{}({freq}x)",
                    if *parity == Parity::Cos { "cos" } else { "sin" }
                )
            }
            EigenLabel::Torus { vector, parity } => {
                if vector.iter().all(|&c| c == 0) {
                    return write!(f, "const");
                }
                let comps: Vec<String> = vector.iter().map(|c| c.to_string()).collect();
                write!(
                    f,
                    "{}<({}),x>",
                    if *parity == Parity::Cos { "cos" } else { "sin" },
                    comps.join(",")
                )
            }
            EigenLabel::Sphere { degree, order } => write!(f, "Y({degree},{order})"),
        }
    }
}

/// One real L²-normalized Laplacian eigenfunction: its eigenvalue, its index
/// in the global eigenvalue-sorted ordering, and its evaluation label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenDescriptor {
    pub eigenvalue: f64,
    pub ordinal: usize,
    pub label: EigenLabel,
}

impl EigenDescriptor {
    pub fn is_constant(&self) -> bool {
        match &self.label {
            EigenLabel::Circle { freq, .. } => *freq == 0,
            EigenLabel::Torus { vector, .. } => vector.iter().all(|&c| c == 0),
            EigenLabel::Sphere { degree, .. } => *degree == 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geodesic_closed_forms() {
        let c = ManifoldSpec::Circle;
        let d = c
            .geodesic_distance(&Point::circle(0.0), &Point::circle(3.0 * PI / 2.0))
            .unwrap();
        assert!((d - PI / 2.0).abs() < 1e-14);

        let t2 = ManifoldSpec::torus(2).unwrap();
        let a = Point::new(&t2, vec![0.0, 0.0]).unwrap();
        let b = Point::new(&t2, vec![PI, PI]).unwrap();
        assert!((t2.geodesic_distance(&a, &b).unwrap() - 2.0f64.sqrt() * PI).abs() < 1e-14);

        let s = ManifoldSpec::Sphere2;
        let n = Point::new(&s, vec![0.0, 0.0, 1.0]).unwrap();
        let sp = Point::new(&s, vec![0.0, 0.0, -1.0]).unwrap();
        assert!((s.geodesic_distance(&n, &sp).unwrap() - PI).abs() < 1e-14);
    }

    #[test]
    fn geodesic_dimension_mismatch() {
        let t2 = ManifoldSpec::torus(2).unwrap();
        let p2 = Point::new(&t2, vec![0.0, 0.0]).unwrap();
        let err = ManifoldSpec::Circle.geodesic_distance(&p2, &p2);
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn circle_eigenbasis_spectrum() {
        let basis = ManifoldSpec::Circle.eigenbasis(4.0).unwrap();
        let lambdas: Vec<f64> = basis.iter().map(|e| e.eigenvalue).collect();
        assert_eq!(lambdas, vec![0.0, 1.0, 1.0, 4.0, 4.0]);
        assert!(basis[0].is_constant());
        assert_eq!(
            basis[1].label,
            EigenLabel::Circle {
                freq: 1,
                parity: Parity::Cos
            }
        );
        assert_eq!(
            basis[2].label,
            EigenLabel::Circle {
                freq: 1,
                parity: Parity::Sin
            }
        );
    }

    #[test]
    fn sphere_eigenbasis_multiplicities() {
        let basis = ManifoldSpec::Sphere2.eigenbasis(6.0).unwrap();
        assert_eq!(basis.len(), 9); // ℓ = 0, 1, 2
        assert_eq!(basis.iter().filter(|e| e.eigenvalue == 2.0).count(), 3);
        assert_eq!(basis.iter().filter(|e| e.eigenvalue == 6.0).count(), 5);
    }

    #[test]
    fn torus_eigenbasis_small() {
        let t2 = ManifoldSpec::torus(2).unwrap();
        let basis = t2.eigenbasis(1.0).unwrap();
        // k = 0 plus cos/sin over the representatives (0,1) and (1,0)
        assert_eq!(basis.len(), 5);
        assert_eq!(basis[0].eigenvalue, 0.0);
        assert!(basis[1..].iter().all(|e| e.eigenvalue == 1.0));
    }

    #[test]
    fn eigenfunction_values() {
        let c = ManifoldSpec::Circle;
        let basis = c.eigenbasis(1.0).unwrap();
        let x = Point::circle(0.0);
        assert!((c.eval_eigenfunction(&basis[0], &x).unwrap() - 1.0 / TAU.sqrt()).abs() < 1e-15);
        assert!((c.eval_eigenfunction(&basis[1], &x).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-15);

        let s = ManifoldSpec::Sphere2;
        let north = Point::new(&s, vec![0.0, 0.0, 1.0]).unwrap();
        let y10 = EigenDescriptor {
            eigenvalue: 2.0,
            ordinal: 2,
            label: EigenLabel::Sphere {
                degree: 1,
                order: 0,
            },
        };
        let expected = (3.0 / (4.0 * PI)).sqrt();
        assert!((s.eval_eigenfunction(&y10, &north).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn eval_rejects_foreign_label() {
        let c = ManifoldSpec::Circle;
        let desc = EigenDescriptor {
            eigenvalue: 2.0,
            ordinal: 1,
            label: EigenLabel::Sphere {
                degree: 1,
                order: 0,
            },
        };
        assert!(c.eval_eigenfunction(&desc, &Point::circle(0.1)).is_err());
    }

    #[test]
    fn weyl_special_cases() {
        // flat 2-torus of volume 4π²: λ_k = k/π
        for k in [1u64, 10, 1000] {
            let lam = weyl_lambda(2, k, 4.0 * PI * PI).unwrap();
            assert!((lam - k as f64 / PI).abs() < 1e-10 * k as f64);
        }
        assert_eq!(weyl_lambda(1, 0, TAU).unwrap(), 0.0);
        // circle: λ_k ≈ (k/2)²
        let lam = weyl_lambda(1, 100, TAU).unwrap();
        assert!((lam - 2500.0).abs() < 1e-9 * 2500.0);
    }

    #[test]
    fn manifold_names_round_trip() {
        for m in [
            ManifoldSpec::Circle,
            ManifoldSpec::torus(3).unwrap(),
            ManifoldSpec::Sphere2,
        ] {
            assert_eq!(ManifoldSpec::parse(&m.name()).unwrap(), m);
        }
        assert!(ManifoldSpec::parse("klein").is_err());
        assert!(ManifoldSpec::parse("torus:0").is_err());
    }

    #[test]
    fn sphere_point_renormalizes() {
        let s = ManifoldSpec::Sphere2;
        let p = Point::new(&s, vec![0.0, 0.0, 2.0]).unwrap();
        assert!((p.coords()[2] - 1.0).abs() < 1e-15);
        assert!(Point::new(&s, vec![0.0, 0.0, 0.0]).is_err());
    }
}
