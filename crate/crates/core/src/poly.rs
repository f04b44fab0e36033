//! Sparse multivariate polynomials with exact coefficients.

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::scalar::{falling_factorial, Scalar};
use num_traits::Signed;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// A polynomial in `x1..xn`, stored as a map from exponent vector to
/// nonzero coefficient. Two polynomials are equal iff their maps are equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial<T> {
    dim: usize,
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, T::one())
    }

    pub fn constant(dim: usize, c: T) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    /// The coordinate function `x_{axis+1}` (axes are zero-based).
    pub fn var(dim: usize, axis: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, axis), T::one())
    }

    pub fn monomial(index: MultiIndex, c: T) -> Self {
        let dim = index.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(index, c);
        }
        Polynomial { dim, terms }
    }

    /// Builds a polynomial from possibly repeated or zero terms.
    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, T)>>(dim: usize, terms: I) -> Self {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            assert_eq!(m.dim(), dim, "multi-index dimension");
            p.add_term(m, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, index: &MultiIndex) -> T {
        self.terms.get(index).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(MultiIndex::is_zero)
    }

    pub fn constant_term(&self) -> T {
        self.coefficient(&MultiIndex::zero(self.dim))
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    /// Largest exponent of `x_{axis+1}` in any term.
    pub fn degree_in(&self, axis: usize) -> u32 {
        self.terms.keys().map(|m| m.get(axis)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: MultiIndex, c: T) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        if c.is_one() {
            return self.clone();
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c.clone())).collect(),
        }
    }

    /// Multiplies by the monomial `c x^shift`.
    pub fn mul_monomial(&self, shift: &MultiIndex, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, a)| (m.add(shift), a.clone() * c.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.dim), |acc, _| &acc * self)
    }

    /// The formal partial derivative along a zero-based axis.
    pub fn partial(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        Ok(self.derivative(&MultiIndex::unit(self.dim, axis)))
    }

    /// `∂^alpha` applied to `self`.
    pub fn derivative(&self, alpha: &MultiIndex) -> Self {
        debug_assert_eq!(alpha.dim(), self.dim);
        if alpha.is_zero() {
            return self.clone();
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if let Some(rest) = m.checked_sub(alpha) {
                let small = m
                    .exponents()
                    .iter()
                    .zip(alpha.exponents())
                    .try_fold(1u64, |acc, (&e, &a)| ((e - a + 1)..=e).try_fold(acc, |x, k| x.checked_mul(k as u64)));
                let factor = match small {
                    Some(f) => T::from_count(f),
                    None => m
                        .exponents()
                        .iter()
                        .zip(alpha.exponents())
                        .fold(T::one(), |acc, (&e, &a)| acc * falling_factorial::<T>(e, a)),
                };
                // distinct m give distinct rest, so no merging is needed
                terms.insert(rest, c.clone() * factor);
            }
        }
        Polynomial { dim: self.dim, terms }
    }

    pub fn eval(&self, point: &[T]) -> Result<T> {
        if point.len() != self.dim {
            return Err(Error::PointLength { got: point.len(), expected: self.dim });
        }
        let mut total = T::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    v = v * x.clone();
                }
            }
            total = total + v;
        }
        Ok(total)
    }

    /// A point of the grid `{0..=deg_1} x ... x {0..=deg_n}` where `self` is
    /// nonzero, first in lexicographic order. Such a point exists for every
    /// nonzero polynomial whose degree in each variable is bounded by the grid.
    pub fn nonvanishing_point(&self) -> Option<Vec<T>> {
        if self.is_zero() {
            return None;
        }
        let bounds: Vec<u32> = (0..self.dim).map(|a| self.degree_in(a)).collect();
        let mut cur = vec![0u32; self.dim];
        loop {
            let point: Vec<T> = cur.iter().map(|&v| T::from_count(v as u64)).collect();
            if !self.eval(&point).expect("dimension").is_zero() {
                return Some(point);
            }
            // odometer, last axis fastest
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return None;
                }
                axis -= 1;
                if cur[axis] < bounds[axis] {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = 0;
            }
        }
    }
}

impl<'a, T: Scalar> Add<&'a Polynomial<T>> for &'a Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: &'a Polynomial<T>) -> Polynomial<T> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<T: Scalar> AddAssign<&Polynomial<T>> for Polynomial<T> {
    fn add_assign(&mut self, rhs: &Polynomial<T>) {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<T: Scalar> SubAssign<&Polynomial<T>> for Polynomial<T> {
    fn sub_assign(&mut self, rhs: &Polynomial<T>) {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a, T: Scalar> Sub<&'a Polynomial<T>> for &'a Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: &'a Polynomial<T>) -> Polynomial<T> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a, T: Scalar> Mul<&'a Polynomial<T>> for &'a Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: &'a Polynomial<T>) -> Polynomial<T> {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        let mut out = Polynomial::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.add(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl<T: Scalar> Neg for Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        -&self
    }
}

/// Renders in the input grammar, highest degree first: `x1*x2 - 1/2*x3^2 + 4`.
impl<T: Scalar + Signed + fmt::Display> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&MultiIndex> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.degree().cmp(&a.degree()).then_with(|| a.cmp(b)));
        for (pos, m) in keys.into_iter().enumerate() {
            let c = &self.terms[m];
            let mag = c.abs();
            match (pos, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_zero() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}
