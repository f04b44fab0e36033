//! Star products `f ⋆ g = f·g + Σ_{r≥1} λ^r C_r(f, g)` truncated at `λ^K`.

use crate::diffop::BidiffOperator;
use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::poisson::Bivector;
use crate::poly::Polynomial;
use crate::scalar::{factorial, Scalar};
use crate::series::LambdaSeries;

/// A truncated star product. `C_0` (the pointwise product) is implicit;
/// `corrections[r - 1]` holds `C_r` for `r = 1..=K`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StarProduct<T> {
    dim: usize,
    order: usize,
    corrections: Vec<BidiffOperator<T>>,
    bivector: Bivector<T>,
}

/// How an iterated product is bracketed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Association {
    /// `((f ⋆ f) ⋆ f) ⋆ ...`
    Left,
    /// `f ⋆ (f ⋆ (f ⋆ ...))`
    Right,
}

/// Per-order differential orders of the corrections, which is all the
/// certificate engine needs to know about a product.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrderProfile {
    pub truncation: usize,
    /// `(left, right, total)` orders of `C_r` at index `r - 1`; `None` when
    /// `C_r` vanishes. `total` bounds `|α| + |β|` over the terms.
    pub corrections: Vec<Option<(u32, u32, u32)>>,
}

impl OrderProfile {
    /// Orders of `C_r`, with `C_0` the pointwise product.
    pub fn at(&self, r: usize) -> Option<(u32, u32, u32)> {
        if r == 0 {
            Some((0, 0, 0))
        } else {
            self.corrections.get(r - 1).copied().flatten()
        }
    }

    pub fn bracket_only() -> Self {
        OrderProfile { truncation: 0, corrections: Vec::new() }
    }
}

impl<T: Scalar> StarProduct<T> {
    /// Moyal product of a constant bivector:
    /// `C_r = (1/r!) P^{i1 j1} ... P^{ir jr} ∂_{i1..ir} ⊗ ∂_{j1..jr}`.
    pub fn moyal(bivector: &Bivector<T>, order: usize) -> Result<Self> {
        let n = bivector.dim();
        for i in 0..n {
            for j in 0..n {
                if !bivector.entry(i, j).is_constant() {
                    return Err(Error::NonConstantBivector { i, j });
                }
            }
        }
        let first = bivector.bracket_operator();
        let mut power = BidiffOperator::pointwise(n);
        let mut corrections = Vec::with_capacity(order);
        for r in 1..=order {
            let mut next = BidiffOperator::zero(n);
            for (a, b, c) in power.terms() {
                for (a1, b1, c1) in first.terms() {
                    next.add_term(a.add(a1), b.add(b1), c * c1);
                }
            }
            power = next;
            corrections.push(power.scale(&(T::one() / factorial::<T>(r as u32))));
        }
        Ok(StarProduct { dim: n, order, corrections, bivector: bivector.clone() })
    }

    /// `f ⋆ g = f·g + λ{f, g}` with all higher corrections zero.
    pub fn flexible(bivector: &Bivector<T>, order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::TruncationTooLow { given: order, min: 1 });
        }
        let n = bivector.dim();
        let mut corrections = vec![BidiffOperator::zero(n); order];
        corrections[0] = bivector.bracket_operator();
        Ok(StarProduct { dim: n, order, corrections, bivector: bivector.clone() })
    }

    /// A product with user-supplied corrections `C_1..C_m`, `m <= K`,
    /// zero-padded to `K`. The antisymmetric part of `C_1` must equal the
    /// bracket; a symmetric part is allowed. The constant `1` must be a
    /// two-sided unit.
    pub fn custom(bivector: &Bivector<T>, corrections: Vec<BidiffOperator<T>>, order: usize) -> Result<Self> {
        let s = Self::assemble(bivector, corrections, order)?;
        match s.unitality_check() {
            UnitalityVerdict::Holds => Ok(s),
            UnitalityVerdict::Fails { order, left, right } => Err(Error::NotUnital { order, left, right }),
        }
    }

    /// [`custom`](Self::custom) without the unit requirement.
    pub(crate) fn assemble(bivector: &Bivector<T>, corrections: Vec<BidiffOperator<T>>, order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::TruncationTooLow { given: order, min: 1 });
        }
        if corrections.len() > order {
            return Err(Error::TooManyCorrections { given: corrections.len(), order });
        }
        let n = bivector.dim();
        for c in &corrections {
            if c.dim() != n {
                return Err(Error::DimensionMismatch { left: n, right: c.dim() });
            }
        }
        let mut corrections = corrections;
        corrections.resize(order, BidiffOperator::zero(n));
        check_first_order(bivector, &corrections[0])?;
        Ok(StarProduct { dim: n, order, corrections, bivector: bivector.clone() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation_order(&self) -> usize {
        self.order
    }

    pub fn bivector(&self) -> &Bivector<T> {
        &self.bivector
    }

    /// `C_r` for `1 <= r <= K`.
    pub fn correction(&self, r: usize) -> &BidiffOperator<T> {
        &self.corrections[r - 1]
    }

    pub fn corrections(&self) -> &[BidiffOperator<T>] {
        &self.corrections
    }

    pub fn order_profile(&self) -> OrderProfile {
        OrderProfile {
            truncation: self.order,
            corrections: self
                .corrections
                .iter()
                .map(|c| (!c.is_zero()).then(|| (c.orders().0, c.orders().1, c.total_order())))
                .collect(),
        }
    }

    fn check_series(&self, f: &LambdaSeries<T>) -> Result<()> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: f.dim() });
        }
        if f.truncation_order() != self.order {
            return Err(Error::TruncationMismatch { left: self.order, right: f.truncation_order() });
        }
        Ok(())
    }

    /// `(f ⋆ g)_(t) = Σ_{r+s+u=t} C_r(f_(s), g_(u))`.
    pub fn star(&self, f: &LambdaSeries<T>, g: &LambdaSeries<T>) -> Result<LambdaSeries<T>> {
        self.check_series(f)?;
        self.check_series(g)?;
        Ok(self.star_unchecked(f, g))
    }

    pub(crate) fn star_unchecked(&self, f: &LambdaSeries<T>, g: &LambdaSeries<T>) -> LambdaSeries<T> {
        let k = self.order;
        let mut out = f * g;
        let fc = f.coefficients();
        let gc = g.coefficients();
        for (r, c) in self.corrections.iter().enumerate().map(|(i, c)| (i + 1, c)) {
            if c.is_zero() {
                continue;
            }
            for (s, a) in fc.iter().enumerate().take(k + 1 - r) {
                if a.is_zero() {
                    continue;
                }
                for (u, b) in gc.iter().enumerate().take(k + 1 - r - s) {
                    if b.is_zero() {
                        continue;
                    }
                    let v = c.apply_unchecked(a, b);
                    if !v.is_zero() {
                        out.coeffs_mut()[r + s + u] += &v;
                    }
                }
            }
        }
        out
    }

    /// `[f, g] = f ⋆ g − g ⋆ f`.
    pub fn commutator(&self, f: &LambdaSeries<T>, g: &LambdaSeries<T>) -> Result<LambdaSeries<T>> {
        Ok(&self.star(f, g)? - &self.star(g, f)?)
    }

    /// The `k`-fold star product of `f` with the requested bracketing.
    pub fn power(&self, f: &LambdaSeries<T>, k: u32, association: Association) -> Result<LambdaSeries<T>> {
        self.check_series(f)?;
        if k == 0 {
            return Err(Error::ZeroPower);
        }
        let mut acc = f.clone();
        for _ in 1..k {
            acc = match association {
                Association::Left => self.star_unchecked(&acc, f),
                Association::Right => self.star_unchecked(f, &acc),
            };
        }
        Ok(acc)
    }

    /// Checks that no power of `f` can vanish: with `r` the lowest order of
    /// `f`, the orders below `rk` of `f^k` vanish and the `λ^{rk}`
    /// coefficient is the pointwise power `f_(r)^k ≠ 0`, under both
    /// bracketings.
    pub fn nilpotency_probe(&self, f: &LambdaSeries<T>, k: u32) -> Result<ProbeVerdict<T>> {
        self.check_series(f)?;
        let (r, lowest) = f.lowest_order().ok_or(Error::ZeroElement)?;
        let target = r * k as usize;
        if target > self.order {
            return Ok(ProbeVerdict::Inconclusive { lowest_order: r, power: k, truncation: self.order });
        }
        let expected = lowest.pow(k);
        for association in [Association::Left, Association::Right] {
            let p = self.power(f, k, association)?;
            let below_clean = p.coefficients()[..target].iter().all(Polynomial::is_zero);
            let got = p.coefficient(target);
            if !below_clean || got != expected || expected.is_zero() {
                return Ok(ProbeVerdict::Fail { order: target, association, expected, got });
            }
        }
        Ok(ProbeVerdict::Pass { order: target, coefficient: expected })
    }

    /// Checks `1 ⋆ f = f ⋆ 1 = f` on monomials up to the orders of every
    /// correction; the witness is the first offending monomial pair.
    pub fn unitality_check(&self) -> UnitalityVerdict {
        let one = MultiIndex::zero(self.dim);
        let unit = Polynomial::one(self.dim);
        for (r, c) in self.corrections.iter().enumerate().map(|(i, c)| (i + 1, c)) {
            let (l, rr) = c.orders();
            for m in MultiIndex::up_to_degree(self.dim, rr) {
                let xm = Polynomial::monomial(m.clone(), T::one());
                if !c.apply_unchecked(&unit, &xm).is_zero() {
                    return UnitalityVerdict::Fails { order: r, left: one, right: m };
                }
            }
            for m in MultiIndex::up_to_degree(self.dim, l) {
                let xm = Polynomial::monomial(m.clone(), T::one());
                if !c.apply_unchecked(&xm, &unit).is_zero() {
                    return UnitalityVerdict::Fails { order: r, left: m, right: one };
                }
            }
        }
        UnitalityVerdict::Holds
    }
}

/// Compares `½(C_1(f,g) − C_1(g,f))` with `{f, g}` on monomial pairs up to
/// the orders of both operators.
fn check_first_order<T: Scalar>(bivector: &Bivector<T>, c1: &BidiffOperator<T>) -> Result<()> {
    let n = bivector.dim();
    let anti = c1.antisymmetrize();
    let (l, r) = anti.orders();
    let bound = l.max(r).max(1);
    let monomials = MultiIndex::up_to_degree(n, bound);
    for a in &monomials {
        let xa = Polynomial::monomial(a.clone(), T::one());
        for b in &monomials {
            let xb = Polynomial::monomial(b.clone(), T::one());
            if anti.apply_unchecked(&xa, &xb) != bivector.bracket_unchecked(&xa, &xb) {
                return Err(Error::FirstOrderMismatch { left: a.clone(), right: b.clone() });
            }
        }
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ProbeVerdict<T> {
    Pass { order: usize, coefficient: Polynomial<T> },
    Fail { order: usize, association: Association, expected: Polynomial<T>, got: Polynomial<T> },
    /// `r·k` exceeds the truncation order, so truncation alone decides.
    Inconclusive { lowest_order: usize, power: u32, truncation: usize },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum UnitalityVerdict {
    Holds,
    /// `C_order(left, right) ≠ 0` with one slot the constant `1`.
    Fails { order: usize, left: MultiIndex, right: MultiIndex },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::BidiffTerm;
    use crate::Rational;

    type P = Polynomial<Rational>;
    type S = LambdaSeries<Rational>;

    fn x(dim: usize, i: usize) -> P {
        P::var(dim, i - 1)
    }

    fn lift(p: P, k: usize) -> S {
        S::from_poly(p, k)
    }

    fn lam(p: P, r: usize, k: usize) -> S {
        S::lambda_pow(p, r, k)
    }

    #[test]
    fn moyal_examples() {
        let s = StarProduct::moyal(&Bivector::symplectic(1), 2).unwrap();
        let (a, b) = (lift(x(2, 1), 2), lift(x(2, 2), 2));
        let expected = &lift(&x(2, 1) * &x(2, 2), 2) + &lam(P::one(2), 1, 2);
        assert_eq!(s.star(&a, &b).unwrap(), expected);
        assert_eq!(s.commutator(&a, &b).unwrap(), lam(P::constant(2, Rational::from_integer(2.into())), 1, 2));
        assert_eq!(s.star(&a, &a).unwrap(), lift(x(2, 1).pow(2), 2));
        let f = lift(&x(2, 1).pow(3) + &x(2, 2), 2);
        assert_eq!(s.star(&f, &lift(P::one(2), 2)).unwrap(), f);
    }

    #[test]
    fn moyal_rejects_non_constant() {
        assert_eq!(StarProduct::moyal(&Bivector::<Rational>::su2(), 2), Err(Error::NonConstantBivector { i: 0, j: 1 }));
    }

    #[test]
    fn flexible_examples() {
        let b = Bivector::su2();
        let s = StarProduct::flexible(&b, 1).unwrap();
        let (f, g) = (x(3, 1), &x(3, 2) * &x(3, 3));
        let got = &s.star(&lift(f.clone(), 1), &lift(g.clone(), 1)).unwrap() - &lift(&f * &g, 1);
        assert_eq!(got, lam(b.bracket(&f, &g).unwrap(), 1, 1));
        let c = s.commutator(&lift(f.clone(), 1), &lift(g.clone(), 1)).unwrap();
        assert_eq!(c, lam(b.bracket(&f, &g).unwrap().scale(&Rational::from_integer(2.into())), 1, 1));
        assert!(StarProduct::flexible(&b, 0).is_err());
    }

    #[test]
    fn custom_validation() {
        let b = Bivector::symplectic(1);
        let moyal = StarProduct::moyal(&b, 3).unwrap();
        let same = StarProduct::custom(&b, moyal.corrections().to_vec(), 3).unwrap();
        assert_eq!(same, moyal);
        let flex = StarProduct::custom(&b, vec![b.bracket_operator()], 2).unwrap();
        assert_eq!(flex, StarProduct::flexible(&b, 2).unwrap());

        let sym = BidiffOperator::from_terms(
            2,
            [BidiffTerm { coefficient: P::one(2), left: MultiIndex::unit(2, 0), right: MultiIndex::unit(2, 0) }],
        )
        .unwrap();
        match StarProduct::custom(&b, vec![sym], 2) {
            Err(Error::FirstOrderMismatch { left, right }) => {
                assert_eq!((left.to_string(), right.to_string()), ("x1".into(), "x2".into()));
            }
            other => panic!("expected mismatch, got {other:?}"),
        }
        assert!(matches!(
            StarProduct::custom(&b, vec![b.bracket_operator(); 3], 2),
            Err(Error::TooManyCorrections { .. })
        ));
    }

    #[test]
    fn star_examples() {
        let b = Bivector::symplectic(1);
        let flex = StarProduct::flexible(&b, 1).unwrap();
        let got = flex.star(&lift(x(2, 1), 1), &lift(x(2, 2), 1)).unwrap();
        assert_eq!(got, &lift(&x(2, 1) * &x(2, 2), 1) + &lam(P::one(2), 1, 1));
        let g = &lift(x(2, 2).pow(2), 1) + &lam(x(2, 1), 1, 1);
        assert_eq!(flex.star(&lift(P::one(2), 1), &g).unwrap(), g);
        assert!(flex.star(&lift(x(2, 1), 2), &g).is_err());
    }

    #[test]
    fn power_examples() {
        let b = Bivector::symplectic(1);
        let flex = StarProduct::flexible(&b, 2).unwrap();
        let f = &lift(x(2, 1), 2) + &lam(x(2, 2), 1, 2);
        assert_eq!(flex.power(&f, 1, Association::Left).unwrap(), f);
        let sq = flex.power(&f, 2, Association::Left).unwrap();
        let expected = &(&lift(x(2, 1).pow(2), 2) + &lam((&x(2, 1) * &x(2, 2)).scale(&Rational::from_integer(2.into())), 1, 2))
            + &lam(x(2, 2).pow(2), 2, 2);
        assert_eq!(sq, expected);
        let tiny = lam(x(2, 1), 1, 2);
        assert!(flex.power(&tiny, 3, Association::Right).unwrap().is_zero());
        assert_eq!(flex.power(&f, 0, Association::Left), Err(Error::ZeroPower));
    }

    #[test]
    fn nilpotency_probe_examples() {
        let b = Bivector::symplectic(1);
        let flex = StarProduct::flexible(&b, 2).unwrap();
        match flex.nilpotency_probe(&lift(x(2, 1), 2), 3).unwrap() {
            ProbeVerdict::Pass { order, coefficient } => {
                assert_eq!(order, 0);
                assert_eq!(coefficient, x(2, 1).pow(3));
            }
            other => panic!("{other:?}"),
        }
        let f = lam(&x(2, 1) + &P::one(2), 1, 2);
        match flex.nilpotency_probe(&f, 2).unwrap() {
            ProbeVerdict::Pass { order, coefficient } => {
                assert_eq!(order, 2);
                assert_eq!(coefficient, (&x(2, 1) + &P::one(2)).pow(2));
            }
            other => panic!("{other:?}"),
        }
        let k1 = StarProduct::flexible(&b, 1).unwrap();
        assert!(matches!(k1.nilpotency_probe(&lam(x(2, 1), 1, 1), 2).unwrap(), ProbeVerdict::Inconclusive { .. }));
        assert_eq!(k1.nilpotency_probe(&S::zero(2, 1), 2), Err(Error::ZeroElement));
    }

    #[test]
    fn unitality() {
        let b = Bivector::symplectic(1);
        assert_eq!(StarProduct::moyal(&b, 3).unwrap().unitality_check(), UnitalityVerdict::Holds);
        assert_eq!(StarProduct::flexible(&b, 2).unwrap().unitality_check(), UnitalityVerdict::Holds);
        let mut c1 = b.bracket_operator();
        c1.add_term(MultiIndex::zero(2), MultiIndex::zero(2), P::one(2));
        let bad = StarProduct::assemble(&b, vec![c1.clone()], 2).unwrap();
        let one = lift(P::one(2), 2);
        assert_eq!(bad.star(&one, &one).unwrap(), &one + &lam(P::one(2), 1, 2));
        assert_eq!(
            bad.unitality_check(),
            UnitalityVerdict::Fails { order: 1, left: MultiIndex::zero(2), right: MultiIndex::zero(2) }
        );
        assert_eq!(
            StarProduct::custom(&b, vec![c1], 2),
            Err(Error::NotUnital { order: 1, left: MultiIndex::zero(2), right: MultiIndex::zero(2) })
        );
    }
}
