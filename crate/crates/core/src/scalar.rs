//! Coefficient field abstraction.
//!
//! Every algebraic routine in this crate is generic over [`Scalar`]. The
//! intended instance is arbitrary-precision rationals ([`crate::Rational`]);
//! `Ratio<i64>` also satisfies the bound and is handy for small tests, but it
//! panics on overflow. Identity checking relies on exact zero tests, so the
//! bound deliberately requires `Eq + Hash`, which rules out floats.

use num_traits::{FromPrimitive, Num, NumAssign};
use std::fmt::Debug;
use std::hash::Hash;
use std::ops::Neg;

/// An exact field of characteristic zero.
pub trait Scalar:
    Num + NumAssign + Neg<Output = Self> + FromPrimitive + Clone + Debug + Eq + Hash + Send + Sync + 'static
{
    /// Embeds a non-negative integer.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("field element from integer")
    }
}

impl<T> Scalar for T where
    T: Num + NumAssign + Neg<Output = T> + FromPrimitive + Clone + Debug + Eq + Hash + Send + Sync + 'static
{
}

/// `n!` as a field element.
pub fn factorial<T: Scalar>(n: u32) -> T {
    (1..=n as u64).fold(T::one(), |acc, k| acc * T::from_count(k))
}

/// Falling factorial `n (n-1) ... (n-k+1)`; zero when `k > n`.
pub fn falling_factorial<T: Scalar>(n: u32, k: u32) -> T {
    if k > n {
        return T::zero();
    }
    ((n - k + 1) as u64..=n as u64).fold(T::one(), |acc, m| acc * T::from_count(m))
}
