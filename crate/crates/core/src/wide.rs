//! Double-double accumulator used while building embeddings.
//!
//! Path lengths, coordinates and residual weights are kept as an unevaluated
//! sum `hi + lo` of two `f64`s (about 106 significant bits). Sums of a few
//! hundred `f64` weights are then usually exact, so an edge lying on both
//! shortest-path trees gets a residual of exactly zero rather than a rounding
//! error of either sign.

use std::cmp::Ordering;

use crate::graph::PathLength;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Wide {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Wide {
    pub const ZERO: Wide = Wide { hi: 0.0, lo: 0.0 };
    pub const INFINITY: Wide = Wide {
        hi: f64::INFINITY,
        lo: 0.0,
    };

    #[inline]
    pub fn from_f64(v: f64) -> Wide {
        Wide { hi: v, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    #[inline]
    pub fn add(self, other: Wide) -> Wide {
        if !self.hi.is_finite() || !other.hi.is_finite() {
            return Wide::from_f64(self.hi + other.hi);
        }
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = fast_two_sum(s, e + t);
        let (hi, lo) = fast_two_sum(s, e + f);
        Wide { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Wide {
        Wide {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, other: Wide) -> Wide {
        self.add(other.neg())
    }

    /// Exact division by two (barring underflow).
    #[inline]
    pub fn half(self) -> Wide {
        Wide {
            hi: self.hi * 0.5,
            lo: self.lo * 0.5,
        }
    }

    #[inline]
    pub fn abs(self) -> Wide {
        if self.is_negative() {
            self.neg()
        } else {
            self
        }
    }

    #[inline]
    pub fn hi_positive(self) -> bool {
        self.hi > 0.0
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    #[inline]
    pub fn total_order(&self, other: &Wide) -> Ordering {
        self.hi
            .total_cmp(&other.hi)
            .then_with(|| self.lo.total_cmp(&other.lo))
    }
}

impl PathLength for Wide {
    fn zero() -> Self {
        Wide::ZERO
    }

    fn infinity() -> Self {
        Wide::INFINITY
    }

    #[inline]
    fn plus(self, other: Self) -> Self {
        self.add(other)
    }

    #[inline]
    fn order(&self, other: &Self) -> Ordering {
        // -0.0 and 0.0 are equal path lengths.
        if self.hi == other.hi && self.lo == other.lo {
            Ordering::Equal
        } else {
            self.total_order(other)
        }
    }

    #[inline]
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_lost_low_bits() {
        let a = Wide::from_f64(1e16);
        let b = Wide::from_f64(1.0);
        let s = a.add(b);
        assert_eq!(s.sub(a), b);
        assert_eq!(s.sub(b), a);
    }

    #[test]
    fn tight_edges_cancel_exactly() {
        // Summing 0.1 ten times in f64 is not 1.0; in double-double the
        // difference of consecutive prefix sums is exactly the weight.
        let w = Wide::from_f64(0.1);
        let mut d = Wide::ZERO;
        let mut prev = d;
        for _ in 0..100 {
            prev = d;
            d = d.add(w);
        }
        assert_eq!(d.sub(prev), w);
        let r = w.sub(d.sub(prev).abs());
        assert!(!r.is_negative());
        assert_eq!(r.to_f64(), 0.0);
    }

    #[test]
    fn ordering_and_sign() {
        let x = Wide::from_f64(1.0).add(Wide::from_f64(1e-20));
        assert_eq!(x.total_order(&Wide::from_f64(1.0)), Ordering::Greater);
        assert!(Wide::from_f64(1.0).sub(x).is_negative());
        assert_eq!(x.neg().abs(), x);
        assert_eq!(Wide::INFINITY.add(Wide::from_f64(3.0)), Wide::INFINITY);
        assert_eq!(Wide::from_f64(3.0).half().to_f64(), 1.5);
    }
}
