//! Closed real intervals, enough to bound the constraint polynomials over a
//! grid cell.

use std::ops::{Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// Distance from the interval to 0 (0 when it straddles 0).
    pub fn gap_to_zero(&self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    pub fn add(self, other: Self) -> Self {
        Self::new(self.lo + other.lo, self.hi + other.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, other: Self) -> Self {
        Self::new(self.lo - other.hi, self.hi - other.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, other: Self) -> Self {
        let products = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi];
        let lo = products.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = products.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_encloses_samples() {
        let a = Interval::new(-0.5, 0.25);
        let b = Interval::new(0.1, 0.4);
        let prod = a * b;
        let diff = a - b;
        for i in 0..=10 {
            for j in 0..=10 {
                let x = -0.5 + 0.075 * i as f64;
                let y = 0.1 + 0.03 * j as f64;
                assert!(prod.lo <= x * y && x * y <= prod.hi);
                assert!(diff.lo <= x - y && x - y <= diff.hi);
            }
        }
        assert_eq!(Interval::new(0.2, 0.3).gap_to_zero(), 0.2);
        assert_eq!(Interval::new(-0.3, -0.2).gap_to_zero(), 0.2);
        assert_eq!(a.gap_to_zero(), 0.0);
        assert_eq!(Interval::point(1.0).add(Interval::point(2.0)), Interval::point(3.0));
    }
}
