//! Gauge transformations `D = 1 + Σ λ^r D_r` and the equivalent products
//! `f ⋆' g = D⁻¹((Df) ⋆ (Dg))`.

use crate::diffop::{BidiffOperator, DiffOperator};
use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::series::LambdaSeries;
use crate::star::StarProduct;
use std::collections::HashMap;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaugeTransform<T> {
    dim: usize,
    order: usize,
    /// `layers[r - 1]` is `D_r`.
    layers: Vec<DiffOperator<T>>,
}

impl<T: Scalar> GaugeTransform<T> {
    pub fn identity(dim: usize, order: usize) -> Self {
        GaugeTransform { dim, order, layers: vec![DiffOperator::zero(dim); order] }
    }

    /// `layers` lists `D_1, D_2, ...`; missing layers are zero.
    pub fn new(dim: usize, order: usize, layers: Vec<DiffOperator<T>>) -> Result<Self> {
        if layers.len() > order {
            return Err(Error::TooManyCorrections { given: layers.len(), order });
        }
        for l in &layers {
            if l.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: l.dim() });
            }
        }
        let mut layers = layers;
        layers.resize(order, DiffOperator::zero(dim));
        Ok(GaugeTransform { dim, order, layers })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation_order(&self) -> usize {
        self.order
    }

    pub fn layer(&self, r: usize) -> &DiffOperator<T> {
        &self.layers[r - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.layers.iter().all(DiffOperator::is_zero)
    }

    /// `(Df)_(t) = f_(t) + Σ_{s=1}^{t} D_s f_(t−s)`.
    pub fn apply(&self, f: &LambdaSeries<T>) -> Result<LambdaSeries<T>> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: f.dim() });
        }
        if f.truncation_order() != self.order {
            return Err(Error::TruncationMismatch { left: self.order, right: f.truncation_order() });
        }
        let mut out = f.clone();
        for t in 1..=self.order {
            for s in 1..=t {
                let d = &self.layers[s - 1];
                if d.is_zero() {
                    continue;
                }
                let v = d.apply(&f.coefficients()[t - s]);
                out.coeffs_mut()[t] += &v;
            }
        }
        Ok(out)
    }

    /// The inverse modulo `λ^{K+1}`: `E_r = −D_r − Σ_{s=1}^{r−1} D_s ∘ E_{r−s}`.
    pub fn inverse(&self) -> GaugeTransform<T> {
        let mut inv: Vec<DiffOperator<T>> = Vec::with_capacity(self.order);
        for r in 1..=self.order {
            let mut e = self.layers[r - 1].neg();
            for s in 1..r {
                let prod = self.layers[s - 1].compose(&inv[r - s - 1]).expect("same dimension");
                e = e.checked_add(&prod.neg()).expect("same dimension");
            }
            inv.push(e);
        }
        GaugeTransform { dim: self.dim, order: self.order, layers: inv }
    }

    /// The equivalent product `f ⋆' g = D⁻¹((Df) ⋆ (Dg))`, with each `C'_t`
    /// recovered in normal form from its values on monomial pairs.
    pub fn transform(&self, product: &StarProduct<T>) -> Result<StarProduct<T>> {
        if product.dim() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: product.dim() });
        }
        if product.truncation_order() != self.order {
            return Err(Error::TruncationMismatch { left: self.order, right: product.truncation_order() });
        }
        if self.is_identity() {
            return Ok(product.clone());
        }
        let k = self.order;
        let inverse = self.inverse();
        let order_of = |g: &GaugeTransform<T>, a: usize| -> Option<u32> {
            if a == 0 {
                Some(0)
            } else {
                let l = g.layer(a);
                (!l.is_zero()).then(|| l.order())
            }
        };
        let profile = product.order_profile();
        // bounds[t] = orders of the λ^t part of E ∘ C ∘ (D ⊗ D)
        let mut bounds = vec![(0u32, 0u32); k + 1];
        for (t, bound) in bounds.iter_mut().enumerate().skip(1) {
            for a in 0..=t {
                let Some(ea) = order_of(&inverse, a) else { continue };
                for r in 0..=(t - a) {
                    let Some((lr, rr, _)) = profile.at(r) else { continue };
                    for b in 0..=(t - a - r) {
                        let c = t - a - r - b;
                        let (Some(db), Some(dc)) = (order_of(self, b), order_of(self, c)) else { continue };
                        bound.0 = bound.0.max(ea + lr + db);
                        bound.1 = bound.1.max(ea + rr + dc);
                    }
                }
            }
        }
        let mut cache: HashMap<(MultiIndex, MultiIndex), LambdaSeries<T>> = HashMap::new();
        let mut composite = |g: &MultiIndex, d: &MultiIndex| -> LambdaSeries<T> {
            cache
                .entry((g.clone(), d.clone()))
                .or_insert_with(|| {
                    let f = LambdaSeries::from_poly(Polynomial::monomial(g.clone(), T::one()), k);
                    let h = LambdaSeries::from_poly(Polynomial::monomial(d.clone(), T::one()), k);
                    let prod = product.star_unchecked(&self.apply(&f).expect("checked"), &self.apply(&h).expect("checked"));
                    inverse.apply(&prod).expect("checked")
                })
                .clone()
        };
        let mut corrections = Vec::with_capacity(k);
        for (t, &(l, r)) in bounds.iter().enumerate().skip(1) {
            corrections.push(BidiffOperator::interpolate(self.dim, l, r, |g, d| composite(g, d).coefficient(t)));
        }
        StarProduct::assemble(product.bivector(), corrections, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::Bivector;
    use crate::Rational;

    type P = Polynomial<Rational>;

    fn x(i: usize) -> P {
        P::var(2, i - 1)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::from_slice(e)
    }

    fn sample() -> GaugeTransform<Rational> {
        let d1 = DiffOperator::from_terms(2, [(x(1), mi(&[0, 1])), (P::one(2), mi(&[2, 0]))]).unwrap();
        let d2 = DiffOperator::from_terms(2, [(x(2).pow(2), mi(&[1, 1]))]).unwrap();
        GaugeTransform::new(2, 3, vec![d1, d2]).unwrap()
    }

    #[test]
    fn inverse_undoes_apply() {
        let d = sample();
        let f = &LambdaSeries::from_poly(&x(1).pow(3) * &x(2).pow(2), 3) + &LambdaSeries::lambda_pow(x(2).pow(4), 1, 3);
        let there = d.apply(&f).unwrap();
        assert_ne!(there, f);
        assert_eq!(d.inverse().apply(&there).unwrap(), f);
        assert_eq!(d.apply(&d.inverse().apply(&f).unwrap()).unwrap(), f);
        assert_eq!(d.inverse().inverse(), d);
    }

    #[test]
    fn identity_transform_is_noop() {
        let s = StarProduct::moyal(&Bivector::<Rational>::symplectic(1), 3).unwrap();
        assert_eq!(GaugeTransform::identity(2, 3).transform(&s).unwrap(), s);
    }

    #[test]
    fn transformed_product_matches_definition() {
        let s = StarProduct::moyal(&Bivector::<Rational>::symplectic(1), 3).unwrap();
        let d = sample();
        let t = d.transform(&s).unwrap();
        let f = LambdaSeries::from_poly(&(&x(1).pow(4) * &x(2)) + &x(2).pow(3), 3);
        let g = LambdaSeries::from_poly(&x(1).pow(2) * &x(2).pow(3), 3);
        let direct = d.inverse().apply(&s.star(&d.apply(&f).unwrap(), &d.apply(&g).unwrap()).unwrap()).unwrap();
        assert_eq!(t.star(&f, &g).unwrap(), direct);
        assert_eq!(t.correction(1).antisymmetrize(), s.correction(1).antisymmetrize());
    }
}
