use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// An extended real number: a finite value, `+inf` or `-inf`.
///
/// The ordering is total with `-inf < r < +inf` for every finite `r`.
/// Addition follows the usual conventions of extended arithmetic except that
/// `(+inf) + (-inf)` is rejected as an error instead of being evaluated.
/// Finite payloads are never NaN; constructors enforce this.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Wraps a finite float. Errors on NaN; maps IEEE infinities to the
    /// matching extended value.
    pub fn new(v: f64) -> Result<ExtReal> {
        if v.is_nan() {
            return Err(Error::ExtReal("NaN is not an extended real".into()));
        }
        Ok(if v == f64::INFINITY {
            ExtReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(v)
        })
    }

    /// Wraps a value already known to be finite and non-NaN.
    pub fn finite(v: f64) -> ExtReal {
        debug_assert!(v.is_finite());
        ExtReal::Finite(v)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    /// The finite payload, if any.
    pub fn as_finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Collapses to `f64`, mapping the infinities to IEEE infinities.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    /// Total addition; rejects `(+inf) + (-inf)`.
    pub fn add(self, rhs: ExtReal) -> Result<ExtReal> {
        use ExtReal::*;
        match (self, rhs) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::ExtReal(
                "(+inf) + (-inf) is a rejected operation".into(),
            )),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => ExtReal::new(a + b),
        }
    }

    /// Negation; exact, maps the infinities to each other.
    pub fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(v) => ExtReal::Finite(-v),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }

    /// Scales by a finite nonzero factor.
    pub fn scale(self, lambda: f64) -> ExtReal {
        debug_assert!(lambda.is_finite() && lambda != 0.0);
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(lambda * v),
            inf => {
                if lambda > 0.0 {
                    inf
                } else {
                    inf.neg()
                }
            }
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
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) => Ordering::Less,
            (_, NegInf) => Ordering::Greater,
            (PosInf, _) => Ordering::Greater,
            (_, PosInf) => Ordering::Less,
            // Finite payloads are non-NaN by construction.
            (Finite(a), Finite(b)) => a.partial_cmp(b).unwrap(),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_total() {
        assert!(ExtReal::NegInf < ExtReal::finite(-1e300));
        assert!(ExtReal::finite(0.0) < ExtReal::PosInf);
        assert!(ExtReal::NegInf < ExtReal::PosInf);
        assert_eq!(ExtReal::finite(2.0).cmp(&ExtReal::finite(2.0)), Ordering::Equal);
    }

    #[test]
    fn addition_conventions() {
        let a = ExtReal::finite(3.0);
        assert_eq!(a.add(ExtReal::PosInf).unwrap(), ExtReal::PosInf);
        assert_eq!(a.add(ExtReal::NegInf).unwrap(), ExtReal::NegInf);
        assert_eq!(
            a.add(ExtReal::finite(4.0)).unwrap(),
            ExtReal::finite(7.0)
        );
        assert!(ExtReal::PosInf.add(ExtReal::NegInf).is_err());
        assert!(ExtReal::NegInf.add(ExtReal::PosInf).is_err());
    }

    #[test]
    fn nan_rejected() {
        assert!(ExtReal::new(f64::NAN).is_err());
        assert_eq!(ExtReal::new(f64::INFINITY).unwrap(), ExtReal::PosInf);
    }
}
