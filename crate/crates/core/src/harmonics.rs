//! Legendre polynomials and fully normalized associated Legendre functions.
//!
//! The normalized functions P̄_ℓ^m carry the spherical-harmonic normalization
//!
//!   P̄_ℓ^m(x) = sqrt((2ℓ+1)/(4π) · (ℓ−m)!/(ℓ+m)!) · P_ℓ^m(x)
//!
//! so that Y_{ℓ0} = P̄_ℓ^0(cos θ) and Y_{ℓm} = √2 · P̄_ℓ^m(cos θ) · cos/sin(mφ)
//! integrate to 1 in L²(S²). The normalization is folded into the recurrence
//! itself, which keeps every intermediate O(1) and avoids the factorial
//! overflow of the unnormalized P_ℓ^m for large ℓ.

/// P̄_ℓ^m(z) with z = cos θ, 0 ≤ m ≤ ℓ. Condon–Shortley phase omitted.
pub fn normalized_assoc_legendre(degree: u64, order: u64, z: f64) -> f64 {
    assert!(order <= degree, "order must not exceed degree");
    let sin_theta = (1.0 - z * z).max(0.0).sqrt();

    // diagonal start: P̄_m^m = sinθ · sqrt((2m+1)/(2m)) · P̄_{m-1}^{m-1}
    let mut pmm = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
    for m in 1..=order {
        pmm *= sin_theta * ((2.0 * m as f64 + 1.0) / (2.0 * m as f64)).sqrt();
    }
    if degree == order {
        return pmm;
    }

    // first off-diagonal step, then the three-term upward recurrence in ℓ
    let m = order as f64;
    let mut prev = pmm;
    let mut curr = z * (2.0 * m + 3.0).sqrt() * pmm;
    if degree == order + 1 {
        return curr;
    }
    for ell in (order + 2)..=degree {
        let l = ell as f64;
        let a = ((4.0 * l * l - 1.0) / (l * l - m * m)).sqrt();
        let b = (((2.0 * l + 1.0) * (l - 1.0 + m) * (l - 1.0 - m))
            / ((2.0 * l - 3.0) * (l * l - m * m)))
            .sqrt();
        let next = a * z * curr - b * prev;
        prev = curr;
        curr = next;
    }
    curr
}

/// Iterator over P_ℓ(x) for ℓ = 0, 1, 2, … via the standard recurrence
/// (ℓ+1) P_{ℓ+1} = (2ℓ+1) x P_ℓ − ℓ P_{ℓ-1}. Values stay in [-1, 1] for
/// |x| ≤ 1, so the iteration is stable for arbitrary ℓ.
pub struct LegendreIter {
    x: f64,
    ell: u64,
    prev: f64,
    curr: f64,
}

impl LegendreIter {
    pub fn new(x: f64) -> Self {
        Self {
            x,
            ell: 0,
            prev: 0.0,
            curr: 1.0,
        }
    }
}

impl Iterator for LegendreIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.curr;
        let l = self.ell as f64;
        let next = if self.ell == 0 {
            self.x
        } else {
            ((2.0 * l + 1.0) * self.x * self.curr - l * self.prev) / (l + 1.0)
        };
        self.prev = self.curr;
        self.curr = next;
        self.ell += 1;
        Some(out)
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut rule = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_and_derivative(n, x);
                x -= p2 / d2;
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
        if 2 * (i + 1) <= n {
            rule.push((-x, w));
        }
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut curr = x;
    for ell in 1..n {
        let l = ell as f64;
        let next = ((2.0 * l + 1.0) * x * curr - l * prev) / (l + 1.0);
        prev = curr;
        curr = next;
    }
    let n = n as f64;
    let deriv = n * (x * curr - prev) / (x * x - 1.0);
    (curr, deriv)
}
