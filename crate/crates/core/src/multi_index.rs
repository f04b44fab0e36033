//! Exponent vectors for monomials and derivative orders.

use smallvec::SmallVec;
use std::cmp::Ordering;
use std::fmt;

/// A multi-index `(a_1, ..., a_n)`, used both as the exponent vector of a
/// monomial `x^a` and as the derivative order of `∂^a`.
///
/// Ordering is graded: total degree first, then lexicographic with `x1`
/// leading, so ascending iteration visits `1, x1, x2, ..., x1^2, x1*x2, ...`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(SmallVec<[u32; 6]>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, dim))
    }

    /// The unit index `e_axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut m = Self::zero(dim);
        m.0[axis] = 1;
        m
    }

    pub fn from_slice(exps: &[u32]) -> Self {
        MultiIndex(SmallVec::from_slice(exps))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    /// Total degree `|a|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` unless `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<SmallVec<_>>>()
            .map(MultiIndex)
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn increment(&self, axis: usize) -> MultiIndex {
        let mut m = self.clone();
        m.0[axis] += 1;
        m
    }

    /// All indices of total degree exactly `degree`, in ascending order.
    pub fn of_degree(dim: usize, degree: u32) -> Vec<MultiIndex> {
        fn fill(dim: usize, axis: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if axis + 1 == dim {
                cur.push(left);
                out.push(MultiIndex::from_slice(cur));
                cur.pop();
                return;
            }
            for e in (0..=left).rev() {
                cur.push(e);
                fill(dim, axis + 1, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if dim == 0 {
            if degree == 0 {
                out.push(MultiIndex::zero(0));
            }
            return out;
        }
        fill(dim, 0, degree, &mut Vec::with_capacity(dim), &mut out);
        out
    }

    /// All indices of total degree at most `max_degree`, in ascending order.
    pub fn up_to_degree(dim: usize, max_degree: u32) -> Vec<MultiIndex> {
        (0..=max_degree).flat_map(|d| Self::of_degree(dim, d)).collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Renders as a monomial in the input grammar, e.g. `x1^2*x3`; `1` for zero.
impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "1");
        }
        let mut first = true;
        for (axis, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{}", axis + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}
