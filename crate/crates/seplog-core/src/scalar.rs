//! Exact arithmetic in the quadratic field Q(√2).
//!
//! Permission amounts and numeric front-end values are elements `a + b·√2`
//! with rational coefficients. Rational quantities are exactly the elements
//! with `b = 0`, so the rational-permission front-ends embed as a subfield.
//! Everything is computed exactly; there is no floating point anywhere.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{Signed, Zero};

pub type Rational = Ratio<i64>;

/// An element `rat + rad·√2` of Q(√2), kept in canonical (reduced) form.
///
/// `Ratio` normalizes on construction, so structural equality coincides with
/// field equality: `a + b√2 = c + d√2` iff `a = c` and `b = d` (√2 is
/// irrational).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    pub rat: Rational,
    pub rad: Rational,
}

impl Scalar {
    pub const fn new(rat: Rational, rad: Rational) -> Self {
        Scalar { rat, rad }
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar { rat: r, rad: Rational::new_raw(0, 1) }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(Rational::new(num, den))
    }

    /// `num/den + (rnum/rden)·√2`
    pub fn with_rad(num: i64, den: i64, rnum: i64, rden: i64) -> Self {
        Scalar { rat: Rational::new(num, den), rad: Rational::new(rnum, rden) }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// 1/√2 = √2/2, the witness permission of the real-vs-rational example.
    pub fn inv_sqrt2() -> Self {
        Scalar { rat: Rational::zero(), rad: Rational::new(1, 2) }
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.rad.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.rad.is_zero()
    }

    /// Exact sign: -1, 0, or 1.
    ///
    /// For mixed-sign coefficients the sign of `a + b√2` is decided by
    /// rationalizing against the conjugate: with `a > 0 > b` the value is
    /// positive iff `a² > 2b²`, and symmetrically.
    pub fn signum(&self) -> i32 {
        let (a, b) = (&self.rat, &self.rad);
        match (sign(a), sign(b)) {
            (0, 0) => 0,
            (sa, 0) => sa,
            (0, sb) => sb,
            (1, 1) => 1,
            (-1, -1) => -1,
            (1, -1) => sign(&(a * a - b * b * 2)),
            (-1, 1) => -sign(&(a * a - b * b * 2)),
            _ => unreachable!(),
        }
    }

    pub fn is_nonneg(&self) -> bool {
        self.signum() >= 0
    }

    pub fn in_unit_interval(&self) -> bool {
        self.signum() >= 0 && (Scalar::one() - *self).signum() >= 0
    }

    /// Multiplicative inverse; `None` for zero. Uses the conjugate:
    /// `(a + b√2)⁻¹ = (a - b√2) / (a² - 2b²)`.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = self.rat * self.rat - self.rad * self.rad * 2;
        debug_assert!(!norm.is_zero());
        Some(Scalar { rat: self.rat / norm, rad: -self.rad / norm })
    }

    pub fn half(&self) -> Self {
        Scalar { rat: self.rat / 2, rad: self.rad / 2 }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

fn sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar { rat: self.rat + rhs.rat, rad: self.rad + rhs.rad }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar { rat: self.rat - rhs.rat, rad: self.rad - rhs.rad }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { rat: -self.rat, rad: -self.rad }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        // (a + b√2)(c + d√2) = ac + 2bd + (ad + bc)√2
        Scalar {
            rat: self.rat * rhs.rat + self.rad * rhs.rad * 2,
            rad: self.rat * rhs.rad + self.rad * rhs.rat,
        }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self * rhs.recip().expect("division by zero in Q(\u{221a}2)")
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (*self - *other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rad.is_zero() {
            write!(f, "{}", self.rat)
        } else if self.rat.is_zero() {
            write!(f, "{}*sqrt2", self.rad)
        } else {
            write!(f, "({}+{}*sqrt2)", self.rat, self.rad)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn canonical_equality() {
        assert_eq!(s(1, 2), s(2, 4));
        assert_eq!(Scalar::with_rad(0, 1, 2, 4), Scalar::inv_sqrt2());
        assert_ne!(Scalar::inv_sqrt2(), s(7071, 10000));
    }

    #[test]
    fn sign_of_mixed_coefficients() {
        // 3/4 - 1/2·√2 ≈ 0.043 > 0, and 2/3 - 1/2·√2 ≈ -0.04 < 0.
        assert_eq!(Scalar::with_rad(3, 4, -1, 2).signum(), 1);
        assert_eq!(Scalar::with_rad(2, 3, -1, 2).signum(), -1);
        assert_eq!(Scalar::with_rad(-1, 1, 3, 4).signum(), 1); // 3/4·√2 > 1
        assert_eq!(Scalar::with_rad(-3, 2, 1, 1).signum(), -1); // √2 < 3/2
    }

    #[test]
    fn inv_sqrt2_boundary_comparisons() {
        let w = Scalar::inv_sqrt2();
        assert!(s(7, 10) < w);
        assert!(w < s(3, 4));
        assert_eq!(w * w, s(1, 2));
        // The two real footprints of the rational-vs-real example sum to 1.
        assert_eq!(w + (Scalar::one() - w), Scalar::one());
        assert!((Scalar::one() - w) < s(1, 2));
        assert!(s(2, 7) < Scalar::one() - w);
    }

    #[test]
    fn field_inverse() {
        let x = Scalar::with_rad(3, 4, -1, 2);
        assert_eq!(x * x.recip().unwrap(), Scalar::one());
        assert_eq!(Scalar::zero().recip(), None);
    }

    proptest! {
        #[test]
        fn ordering_matches_float_approx(a in -8i64..8, b in -8i64..8, c in -8i64..8, d in -8i64..8) {
            let x = Scalar::with_rad(a, 4, b, 4);
            let y = Scalar::with_rad(c, 4, d, 4);
            let fx = a as f64 / 4.0 + (b as f64 / 4.0) * 2f64.sqrt();
            let fy = c as f64 / 4.0 + (d as f64 / 4.0) * 2f64.sqrt();
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(x < y, fx < fy);
            }
        }

        #[test]
        fn mul_distributes(a in -4i64..4, b in -4i64..4, c in -4i64..4) {
            let (x, y, z) = (Scalar::with_rad(a, 2, b, 2), Scalar::with_rad(b, 3, c, 3), Scalar::with_rad(c, 2, a, 2));
            prop_assert_eq!(x * (y + z), x * y + x * z);
        }
    }
}
