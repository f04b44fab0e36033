#![allow(dead_code)]

use naq_core::{LambdaSeries, MultiIndex, Polynomial, Rational};
use proptest::prelude::*;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

pub fn monomial(dim: usize, max_exp: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_exp, dim).prop_map(|e| MultiIndex::from_slice(&e))
}

pub fn poly(dim: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((monomial(dim, max_exp), rational()), 0..=max_terms)
        .prop_map(move |terms| Polynomial::from_terms(dim, terms))
}

pub fn nonzero_poly(dim: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    poly(dim, max_exp, max_terms).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn series(dim: usize, order: usize, max_exp: u32) -> impl Strategy<Value = LambdaSeries> {
    prop::collection::vec(poly(dim, max_exp, 3), order + 1)
        .prop_map(move |c| LambdaSeries::from_coefficients(dim, c).unwrap())
}

pub fn point(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), dim)
}

pub fn lift(p: &Polynomial, order: usize) -> LambdaSeries {
    LambdaSeries::from_poly(p.clone(), order)
}
