//! Scalar bounds for the exact integer routines.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{CheckedNeg, PrimInt, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// Signed primitive integers usable as lattice entries.
///
/// All arithmetic in this crate goes through the checked helpers below, so a
/// narrower type (`i32`) simply fails earlier with [`Error::Overflow`] instead
/// of wrapping.
pub trait LatticeInt:
    PrimInt + Signed + CheckedNeg + ToPrimitive + Hash + Debug + Display + FromStr + Send + Sync + 'static
{
    #[inline]
    fn add_c(self, rhs: Self) -> Result<Self> {
        self.checked_add(&rhs).ok_or(Error::Overflow)
    }

    #[inline]
    fn sub_c(self, rhs: Self) -> Result<Self> {
        self.checked_sub(&rhs).ok_or(Error::Overflow)
    }

    #[inline]
    fn mul_c(self, rhs: Self) -> Result<Self> {
        self.checked_mul(&rhs).ok_or(Error::Overflow)
    }

    #[inline]
    fn neg_c(self) -> Result<Self> {
        self.checked_neg().ok_or(Error::Overflow)
    }

    /// Truncating division; `rhs` must be nonzero.
    #[inline]
    fn div_c(self, rhs: Self) -> Result<Self> {
        self.checked_div(&rhs).ok_or(Error::Overflow)
    }

    /// Floor division; `rhs` must be nonzero.
    fn div_floor_c(self, rhs: Self) -> Result<Self> {
        let q = self.div_c(rhs)?;
        if (self % rhs != Self::zero()) && ((self < Self::zero()) != (rhs < Self::zero())) {
            q.sub_c(Self::one())
        } else {
            Ok(q)
        }
    }

    /// Lossless conversion from `i64`.
    fn from_i64_c(v: i64) -> Result<Self> {
        Self::from(v).ok_or(Error::Overflow)
    }
}

impl<T> LatticeInt for T where
    T: PrimInt
        + Signed
        + CheckedNeg
        + ToPrimitive
        + Hash
        + Debug
        + Display
        + FromStr
        + Send
        + Sync
        + 'static
{
}

/// `Σ a_i b_i` with overflow detection.
pub fn dot<T: LatticeInt>(a: &[T], b: &[T]) -> Result<T> {
    a.iter()
        .zip(b)
        .try_fold(T::zero(), |acc, (&x, &y)| acc.add_c(x.mul_c(y)?))
}

/// `a + s·b` elementwise.
pub fn axpy<T: LatticeInt>(a: &[T], s: T, b: &[T]) -> Result<Vec<T>> {
    a.iter().zip(b).map(|(&x, &y)| x.add_c(s.mul_c(y)?)).collect()
}
