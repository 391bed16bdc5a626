use std::fmt;

use crate::scalar::Scalar;

/// Extended real. Infinities are explicit variants and never stored as IEEE infinities.
///
/// Variant order gives the natural total order: `NegInf < Finite(_) < PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Ext<S> {
    NegInf,
    Finite(S),
    PosInf,
}

impl<S: Scalar> Ext<S> {
    /// Maps IEEE infinities to the explicit variants. NaN is a programming error.
    pub fn from_scalar(x: S) -> Self {
        assert!(!x.is_nan(), "NaN cannot be an extended real");
        if x == S::infinity() {
            Ext::PosInf
        } else if x == S::neg_infinity() {
            Ext::NegInf
        } else {
            Ext::Finite(x)
        }
    }

    pub fn finite(self) -> Option<S> {
        match self {
            Ext::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    /// IEEE view, for printing and for comparisons against plain numbers.
    pub fn to_scalar(self) -> S {
        match self {
            Ext::NegInf => S::neg_infinity(),
            Ext::Finite(x) => x,
            Ext::PosInf => S::infinity(),
        }
    }

    pub fn neg(self) -> Self {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::Finite(x) => Ext::Finite(-x),
            Ext::PosInf => Ext::NegInf,
        }
    }

    pub fn cast<T: Scalar>(self) -> Ext<T> {
        match self {
            Ext::NegInf => Ext::NegInf,
            Ext::Finite(x) => Ext::Finite(T::lit(x.as_f64())),
            Ext::PosInf => Ext::PosInf,
        }
    }
}

impl<S: Scalar> fmt::Display for Ext<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::Finite(x) => write!(f, "{x}"),
            Ext::PosInf => write!(f, "inf"),
        }
    }
}
