//! Formal power series in `λ` with polynomial coefficients, truncated
//! modulo `λ^(K+1)`.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use num_traits::Signed;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// `f = Σ_{r=0}^{K} λ^r f_(r)`. The truncation order `K` is part of the
/// value; combining series of different orders is an error.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LambdaSeries<T> {
    dim: usize,
    coeffs: Vec<Polynomial<T>>,
}

impl<T: Scalar> LambdaSeries<T> {
    pub fn zero(dim: usize, order: usize) -> Self {
        LambdaSeries { dim, coeffs: vec![Polynomial::zero(dim); order + 1] }
    }

    /// `λ^0 p`.
    pub fn from_poly(p: Polynomial<T>, order: usize) -> Self {
        Self::lambda_pow(p, 0, order)
    }

    /// `λ^power p`; zero when `power > order`.
    pub fn lambda_pow(p: Polynomial<T>, power: usize, order: usize) -> Self {
        let mut s = Self::zero(p.dim(), order);
        if power <= order {
            s.coeffs[power] = p;
        }
        s
    }

    /// Builds from explicit coefficients `f_(0), ..., f_(K)`.
    pub fn from_coefficients(dim: usize, coeffs: Vec<Polynomial<T>>) -> Result<Self> {
        assert!(!coeffs.is_empty(), "a series has at least one coefficient");
        for c in &coeffs {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: c.dim() });
            }
        }
        Ok(LambdaSeries { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `f_(r)`; zero above the truncation order.
    pub fn coefficient(&self, r: usize) -> Polynomial<T> {
        self.coeffs.get(r).cloned().unwrap_or_else(|| Polynomial::zero(self.dim))
    }

    pub fn coefficients(&self) -> &[Polynomial<T>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Polynomial::is_zero)
    }

    /// The lowest non-vanishing order and its coefficient, or `None` for zero.
    pub fn lowest_order(&self) -> Option<(usize, &Polynomial<T>)> {
        self.coeffs.iter().enumerate().find(|(_, c)| !c.is_zero())
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::TruncationMismatch {
                left: self.truncation_order(),
                right: other.truncation_order(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self - other)
    }

    /// Cauchy product of the pointwise products, truncated at `K`.
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|p| p.scale(c))
    }

    pub fn map(&self, mut f: impl FnMut(&Polynomial<T>) -> Polynomial<T>) -> Self {
        LambdaSeries { dim: self.dim, coeffs: self.coeffs.iter().map(&mut f).collect() }
    }

    /// Combines two series bilinearly: `Σ_{s+u=t} op(a_(s), b_(u))`.
    pub(crate) fn cauchy(&self, other: &Self, op: impl Fn(&Polynomial<T>, &Polynomial<T>) -> Polynomial<T>) -> Self {
        let k = self.truncation_order();
        let mut out = Self::zero(self.dim, k);
        for (s, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (u, b) in other.coeffs.iter().enumerate().take(k + 1 - s) {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[s + u] += &op(a, b);
            }
        }
        out
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Polynomial<T>] {
        &mut self.coeffs
    }
}

impl<'a, T: Scalar> Add<&'a LambdaSeries<T>> for &'a LambdaSeries<T> {
    type Output = LambdaSeries<T>;

    fn add(self, rhs: &'a LambdaSeries<T>) -> LambdaSeries<T> {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "truncation order mismatch");
        LambdaSeries {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a, T: Scalar> Sub<&'a LambdaSeries<T>> for &'a LambdaSeries<T> {
    type Output = LambdaSeries<T>;

    fn sub(self, rhs: &'a LambdaSeries<T>) -> LambdaSeries<T> {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "truncation order mismatch");
        LambdaSeries {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a, T: Scalar> Mul<&'a LambdaSeries<T>> for &'a LambdaSeries<T> {
    type Output = LambdaSeries<T>;

    fn mul(self, rhs: &'a LambdaSeries<T>) -> LambdaSeries<T> {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "truncation order mismatch");
        self.cauchy(rhs, |a, b| a * b)
    }
}

impl<T: Scalar> AddAssign<&LambdaSeries<T>> for LambdaSeries<T> {
    fn add_assign(&mut self, rhs: &LambdaSeries<T>) {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "truncation order mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }
}

impl<T: Scalar> Neg for &LambdaSeries<T> {
    type Output = LambdaSeries<T>;

    fn neg(self) -> LambdaSeries<T> {
        self.map(|p| -p)
    }
}

/// `f0 + λ*(f1) + λ^2*(f2)`, omitting zero orders.
impl<T: Scalar + Signed + fmt::Display> fmt::Display for LambdaSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (r, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match r {
                0 => write!(f, "({c})")?,
                1 => write!(f, "lambda*({c})")?,
                _ => write!(f, "lambda^{r}*({c})")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
