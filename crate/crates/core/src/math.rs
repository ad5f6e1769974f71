//! Small numeric helpers shared across the crate.

use std::f64::consts::{PI, TAU};

/// Neumaier-compensated accumulator. Pairwise interaction sums subtract
/// quantities that nearly cancel (e.g. a weighted kernel sum minus the
/// manifold volume), so plain `f64` accumulation is not accurate enough.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Wrap an angle into the fundamental domain [0, 2π).
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wrap a coordinate difference into [-π, π).
pub fn wrap_diff(x: f64) -> f64 {
    let r = wrap_angle(x);
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

/// Γ(half/2) for positive integer `half`, by the half-integer recurrence
/// from Γ(1/2) = √π and Γ(1) = 1. Exact for integer arguments.
pub fn gamma_half_integer(half: u32) -> f64 {
    assert!(half >= 1, "gamma argument must be at least 1/2");
    let even = half.is_multiple_of(2);
    let mut x: u32 = if even { 2 } else { 1 };
    let mut value = if even { 1.0 } else { PI.sqrt() };
    // value = Γ(x/2) throughout; raise x by 2 until it reaches `half`
    while x < half {
        value *= x as f64 / 2.0;
        x += 2;
    }
    value
}

/// Volume of the unit ball in `d` dimensions, π^{d/2} / Γ(d/2 + 1).
pub fn unit_ball_volume(d: u32) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half_integer(d + 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_small_values() {
        assert!((gamma_half_integer(1) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half_integer(2) - 1.0).abs() < 1e-15);
        assert!((gamma_half_integer(3) - 0.5 * PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half_integer(4) - 1.0).abs() < 1e-15);
        assert!((gamma_half_integer(6) - 2.0).abs() < 1e-15);
        assert!((gamma_half_integer(8) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_angle(TAU), 0.0);
        assert!((wrap_angle(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        assert!((wrap_diff(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_angle(-1e-20), 0.0);
    }

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        let mut k = KahanSum::new();
        k.add(1e16);
        for _ in 0..1000 {
            k.add(0.1);
        }
        k.add(-1e16);
        assert!((k.value() - 100.0).abs() < 1e-9);
    }
}
