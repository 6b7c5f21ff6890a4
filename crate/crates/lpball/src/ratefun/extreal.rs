//! Extended reals [-inf excluded]: rate functions take values in [0, inf],
//! and +inf must flow through grids and minimizations without turning into
//! NaN.  The type has a total order with `PosInf` greatest and absorbing
//! addition; subtraction is deliberately not implemented, so an inf - inf
//! can never be formed.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

#[derive(Debug, Clone, Copy)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Wrap a float; +infinity maps to `PosInf`.  NaN and -infinity are
    /// programming errors here, not data.
    pub fn new(x: f64) -> Self {
        assert!(!x.is_nan(), "ExtReal cannot hold NaN");
        assert!(x != f64::NEG_INFINITY, "ExtReal cannot hold -inf");
        if x == f64::INFINITY {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            ExtReal::PosInf => None,
        }
    }

    /// Collapse to f64, with `PosInf` becoming `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(v) => *v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Multiply by a nonnegative scalar (0 * inf is refused).
    pub fn scale(self, c: f64) -> ExtReal {
        assert!(c >= 0.0 && !c.is_nan(), "scale factor must be nonnegative");
        match self {
            ExtReal::Finite(v) => ExtReal::new(c * v),
            ExtReal::PosInf => {
                assert!(c > 0.0, "0 * inf is undefined");
                ExtReal::PosInf
            }
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::new(x)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::new(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a == b,
            (ExtReal::PosInf, ExtReal::PosInf) => true,
            _ => false,
        }
    }
}
impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                a.partial_cmp(b).expect("ExtReal holds no NaN")
            }
            (ExtReal::Finite(_), ExtReal::PosInf) => Ordering::Less,
            (ExtReal::PosInf, ExtReal::Finite(_)) => Ordering::Greater,
            (ExtReal::PosInf, ExtReal::PosInf) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ordering_and_absorption() {
        let inf = ExtReal::PosInf;
        let one = ExtReal::new(1.0);
        let two = ExtReal::new(2.0);
        assert!(one < two && two < inf);
        assert_eq!(inf, inf);
        assert_eq!(one + inf, inf);
        assert_eq!(inf + inf, inf);
        assert_eq!(one + two, ExtReal::new(3.0));
        assert_eq!(inf.min(two), two);
        assert_eq!(ExtReal::new(f64::INFINITY), inf);
        assert_eq!(inf.as_f64(), f64::INFINITY);
    }

    #[test]
    #[should_panic]
    fn nan_is_rejected() {
        let _ = ExtReal::new(f64::NAN);
    }

    proptest! {
        #[test]
        fn add_commutes(a in -1e12f64..1e12, b in -1e12f64..1e12) {
            prop_assert_eq!(ExtReal::new(a) + ExtReal::new(b), ExtReal::new(b) + ExtReal::new(a));
        }

        #[test]
        fn inf_is_greatest(a in -1e300f64..1e300) {
            prop_assert!(ExtReal::new(a) < ExtReal::PosInf);
            prop_assert_eq!(ExtReal::new(a) + ExtReal::PosInf, ExtReal::PosInf);
        }
    }
}
