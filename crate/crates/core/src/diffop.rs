//! Differential and bidifferential operators with polynomial coefficients,
//! stored in expanded normal form.

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::poly::Polynomial;
use crate::scalar::{factorial, falling_factorial, Scalar};
use std::collections::BTreeMap;

/// One term `c(x) ∂^α ⊗ ∂^β`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BidiffTerm<T> {
    pub coefficient: Polynomial<T>,
    pub left: MultiIndex,
    pub right: MultiIndex,
}

/// `B(f, g) = Σ c_{αβ}(x) ∂^α f ∂^β g` with at most one term per `(α, β)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BidiffOperator<T> {
    dim: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), Polynomial<T>>,
}

impl<T: Scalar> BidiffOperator<T> {
    pub fn zero(dim: usize) -> Self {
        BidiffOperator { dim, terms: BTreeMap::new() }
    }

    pub fn from_terms<I: IntoIterator<Item = BidiffTerm<T>>>(dim: usize, terms: I) -> Result<Self> {
        let mut op = Self::zero(dim);
        for t in terms {
            for d in [t.coefficient.dim(), t.left.dim(), t.right.dim()] {
                if d != dim {
                    return Err(Error::DimensionMismatch { left: dim, right: d });
                }
            }
            op.add_term(t.left, t.right, t.coefficient);
        }
        Ok(op)
    }

    /// The pointwise product `f·g` as an operator.
    pub fn pointwise(dim: usize) -> Self {
        let mut op = Self::zero(dim);
        op.add_term(MultiIndex::zero(dim), MultiIndex::zero(dim), Polynomial::one(dim));
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &Polynomial<T>)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn coefficient(&self, left: &MultiIndex, right: &MultiIndex) -> Polynomial<T> {
        self.terms
            .get(&(left.clone(), right.clone()))
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.dim))
    }

    pub fn add_term(&mut self, left: MultiIndex, right: MultiIndex, c: Polynomial<T>) {
        if c.is_zero() {
            return;
        }
        let key = (left, right);
        let sum = match self.terms.remove(&key) {
            Some(prev) => &prev + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    /// `(max |α|, max |β|)` over the terms; `(0, 0)` when empty.
    pub fn orders(&self) -> (u32, u32) {
        self.terms.keys().fold((0, 0), |(l, r), (a, b)| (l.max(a.degree()), r.max(b.degree())))
    }

    /// Largest `|α| + |β|` over the terms.
    pub fn total_order(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a.degree() + b.degree()).max().unwrap_or(0)
    }

    pub fn apply(&self, f: &Polynomial<T>, g: &Polynomial<T>) -> Result<Polynomial<T>> {
        for d in [f.dim(), g.dim()] {
            if d != self.dim {
                return Err(Error::DimensionMismatch { left: self.dim, right: d });
            }
        }
        Ok(self.apply_unchecked(f, g))
    }

    pub(crate) fn apply_unchecked(&self, f: &Polynomial<T>, g: &Polynomial<T>) -> Polynomial<T> {
        let mut out = Polynomial::zero(self.dim);
        if f.is_zero() || g.is_zero() {
            return out;
        }
        // derivatives of f are shared between terms with the same α
        let mut left_cache: BTreeMap<&MultiIndex, Polynomial<T>> = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            let da = left_cache.entry(a).or_insert_with(|| f.derivative(a));
            if da.is_zero() {
                continue;
            }
            let db = g.derivative(b);
            if db.is_zero() {
                continue;
            }
            let prod = &*da * &db;
            if c.is_constant() {
                out += &prod.scale(&c.constant_term());
            } else {
                out += &(&prod * c);
            }
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.dim);
        for ((a, b), p) in &self.terms {
            out.add_term(a.clone(), b.clone(), p.scale(c));
        }
        out
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = self.clone();
        for ((a, b), p) in &other.terms {
            out.add_term(a.clone(), b.clone(), p.clone());
        }
        Ok(out)
    }

    /// The operator `(f, g) ↦ B(g, f)`.
    pub fn swapped(&self) -> Self {
        BidiffOperator {
            dim: self.dim,
            terms: self.terms.iter().map(|((a, b), c)| ((b.clone(), a.clone()), c.clone())).collect(),
        }
    }

    /// `B⁻(f, g) = ½ (B(f, g) − B(g, f))`.
    pub fn antisymmetrize(&self) -> Self {
        let half = T::one() / T::from_count(2);
        let mut out = self.scale(&half);
        for ((a, b), c) in &self.swapped().terms {
            out.add_term(a.clone(), b.clone(), c.scale(&-half.clone()));
        }
        out
    }

    /// Recovers the normal form of a bidifferential operator of orders at
    /// most `(left_bound, right_bound)` from its values on monomial pairs.
    ///
    /// `values(γ, δ)` must return `B(x^γ, x^δ)`. Pairs are visited in order
    /// of `|γ| + |δ|`, so every term that contributes to `B(x^γ, x^δ)` other
    /// than `(γ, δ)` itself is already known, and `∂^γ x^γ ∂^δ x^δ = γ! δ!`.
    pub fn interpolate(
        dim: usize,
        left_bound: u32,
        right_bound: u32,
        mut values: impl FnMut(&MultiIndex, &MultiIndex) -> Polynomial<T>,
    ) -> Self {
        let lefts = MultiIndex::up_to_degree(dim, left_bound);
        let rights = MultiIndex::up_to_degree(dim, right_bound);
        let mut pairs: Vec<(&MultiIndex, &MultiIndex)> =
            lefts.iter().flat_map(|a| rights.iter().map(move |b| (a, b))).collect();
        pairs.sort_by_key(|(a, b)| a.degree() + b.degree());
        let mut op = Self::zero(dim);
        for (gamma, delta) in pairs {
            let xg = Polynomial::monomial(gamma.clone(), T::one());
            let xd = Polynomial::monomial(delta.clone(), T::one());
            let residual = &values(gamma, delta) - &op.apply_unchecked(&xg, &xd);
            if residual.is_zero() {
                continue;
            }
            let norm = multi_factorial::<T>(gamma) * multi_factorial::<T>(delta);
            op.add_term(gamma.clone(), delta.clone(), residual.scale(&(T::one() / norm)));
        }
        op
    }
}

/// `α! = Π α_i!`.
pub fn multi_factorial<T: Scalar>(alpha: &MultiIndex) -> T {
    alpha.exponents().iter().fold(T::one(), |acc, &e| acc * factorial::<T>(e))
}

fn multi_binomial<T: Scalar>(alpha: &MultiIndex, gamma: &MultiIndex) -> T {
    alpha
        .exponents()
        .iter()
        .zip(gamma.exponents())
        .fold(T::one(), |acc, (&a, &g)| acc * falling_factorial::<T>(a, g) / factorial::<T>(g))
}

fn sub_indices(alpha: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::zero(alpha.dim())];
    for axis in 0..alpha.dim() {
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..=alpha.get(axis)).map(move |e| {
                    let mut exps = m.exponents().to_vec();
                    exps[axis] = e;
                    MultiIndex::from_slice(&exps)
                })
            })
            .collect();
    }
    out
}

/// A linear differential operator `D f = Σ c_α(x) ∂^α f`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DiffOperator<T> {
    dim: usize,
    terms: BTreeMap<MultiIndex, Polynomial<T>>,
}

impl<T: Scalar> DiffOperator<T> {
    pub fn zero(dim: usize) -> Self {
        DiffOperator { dim, terms: BTreeMap::new() }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zero(dim);
        op.add_term(MultiIndex::zero(dim), Polynomial::one(dim));
        op
    }

    pub fn from_terms<I: IntoIterator<Item = (Polynomial<T>, MultiIndex)>>(dim: usize, terms: I) -> Result<Self> {
        let mut op = Self::zero(dim);
        for (c, alpha) in terms {
            for d in [c.dim(), alpha.dim()] {
                if d != dim {
                    return Err(Error::DimensionMismatch { left: dim, right: d });
                }
            }
            op.add_term(alpha, c);
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Polynomial<T>)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: Polynomial<T>) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&alpha) {
            Some(prev) => &prev + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(alpha, sum);
        }
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn apply(&self, f: &Polynomial<T>) -> Polynomial<T> {
        assert_eq!(f.dim(), self.dim, "operator dimension mismatch");
        let mut out = Polynomial::zero(self.dim);
        for (alpha, c) in &self.terms {
            let d = f.derivative(alpha);
            if !d.is_zero() {
                out += &(c * &d);
            }
        }
        out
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(alpha.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        DiffOperator { dim: self.dim, terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect() }
    }

    /// The composition `self ∘ other`, expanded with the Leibniz rule:
    /// `(a ∂^α)(b ∂^β) = a Σ_{γ ≤ α} C(α, γ) (∂^γ b) ∂^{α − γ + β}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = Self::zero(self.dim);
        for (alpha, a) in &self.terms {
            let gammas = sub_indices(alpha);
            for (beta, b) in &other.terms {
                for gamma in &gammas {
                    let db = b.derivative(gamma);
                    if db.is_zero() {
                        continue;
                    }
                    let coeff = (a * &db).scale(&multi_binomial::<T>(alpha, gamma));
                    let rest = alpha.checked_sub(gamma).expect("sub-index").add(beta);
                    out.add_term(rest, coeff);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    type P = Polynomial<Rational>;

    fn x(dim: usize, i: usize) -> P {
        P::var(dim, i - 1)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::from_slice(e)
    }

    fn term(c: P, a: &[u32], b: &[u32]) -> BidiffTerm<Rational> {
        BidiffTerm { coefficient: c, left: mi(a), right: mi(b) }
    }

    fn half() -> Rational {
        Rational::new(1.into(), 2.into())
    }

    #[test]
    fn apply_examples() {
        let op = BidiffOperator::from_terms(2, [term(P::one(2), &[1, 0], &[0, 1])]).unwrap();
        assert_eq!(op.apply(&x(2, 1), &x(2, 2)).unwrap(), P::one(2));
        assert!(op.apply(&P::one(2), &x(2, 2)).unwrap().is_zero());

        let op3 = BidiffOperator::from_terms(3, [term(x(3, 3), &[1, 0, 0], &[0, 1, 0])]).unwrap();
        let got = op3.apply(&x(3, 1).pow(2), &x(3, 2)).unwrap();
        assert_eq!(got, (&x(3, 1) * &x(3, 3)).scale(&Rational::from_integer(2.into())));
        assert!(op3.apply(&x(2, 1), &x(3, 1)).is_err());
    }

    #[test]
    fn orders() {
        let op = BidiffOperator::from_terms(2, [term(P::one(2), &[1, 0], &[0, 1])]).unwrap();
        assert_eq!(op.orders(), (1, 1));
        assert_eq!(BidiffOperator::<Rational>::zero(2).orders(), (0, 0));
        let op2 = BidiffOperator::from_terms(
            2,
            [term(P::one(2), &[2, 0], &[0, 1]), term(P::one(2), &[1, 0], &[0, 2])],
        )
        .unwrap();
        assert_eq!(op2.orders(), (2, 2));
    }

    #[test]
    fn antisymmetrize_examples() {
        let sym = BidiffOperator::from_terms(2, [term(P::one(2), &[1, 0], &[1, 0])]).unwrap();
        assert!(sym.antisymmetrize().is_zero());

        let op = BidiffOperator::from_terms(2, [term(P::one(2), &[1, 0], &[0, 1])]).unwrap();
        let expected = BidiffOperator::from_terms(
            2,
            [
                term(P::constant(2, half()), &[1, 0], &[0, 1]),
                term(P::constant(2, -half()), &[0, 1], &[1, 0]),
            ],
        )
        .unwrap();
        assert_eq!(op.antisymmetrize(), expected);
        // already antisymmetric: fixed point
        assert_eq!(expected.antisymmetrize(), expected);
    }

    #[test]
    fn interpolation_recovers_operator() {
        let op = BidiffOperator::from_terms(
            2,
            [
                term(&x(2, 1) + &P::one(2), &[1, 0], &[0, 1]),
                term(x(2, 2).pow(2), &[2, 0], &[0, 0]),
                term(P::constant(2, half()), &[0, 0], &[1, 1]),
                term(P::one(2), &[0, 0], &[0, 0]),
            ],
        )
        .unwrap();
        let (l, r) = op.orders();
        let rebuilt = BidiffOperator::interpolate(2, l, r, |g, d| {
            op.apply_unchecked(&P::monomial(g.clone(), Rational::from_integer(1.into())), &P::monomial(d.clone(), Rational::from_integer(1.into())))
        });
        assert_eq!(rebuilt, op);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let d1 = DiffOperator::from_terms(2, [(x(2, 1), mi(&[0, 1])), (P::one(2), mi(&[2, 0]))]).unwrap();
        let d2 = DiffOperator::from_terms(2, [(x(2, 2).pow(2), mi(&[1, 0])), (x(2, 1), mi(&[0, 0]))]).unwrap();
        let comp = d1.compose(&d2).unwrap();
        let f = &(&x(2, 1).pow(3) * &x(2, 2).pow(2)) + &x(2, 2);
        assert_eq!(comp.apply(&f), d1.apply(&d2.apply(&f)));
        assert_eq!(DiffOperator::identity(2).compose(&d1).unwrap(), d1);
        assert_eq!(comp.order(), 3);
    }
}
