//! Rendering in the input grammar, and the JSON shapes of bivectors and
//! bidifferential corrections.

use crate::parse::{parse_poly_expr, ParseError};
use naq_core::{BidiffOperator, Bivector, MultiIndex, Polynomial, Rational};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// `p` in the grammar accepted by [`parse_poly_expr`], highest degree first.
pub fn render_poly(p: &Polynomial) -> String {
    let mut out = String::new();
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| b.exponents().cmp(a.exponents())));
    for (i, (m, c)) in terms.into_iter().enumerate() {
        let mag = c.abs();
        match (i, c.is_negative()) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mono = render_monomial(m);
        if mono.is_empty() {
            out.push_str(&render_rational(&mag));
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            let _ = write!(out, "{}*{mono}", render_rational(&mag));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn render_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn render_monomial(m: &MultiIndex) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}^{e}", i + 1)),
        }
    }
    parts.join("*")
}

/// The full antisymmetric matrix of a bivector as expression strings.
pub fn bivector_matrix(p: &Bivector) -> Vec<Vec<String>> {
    p.rows().map(|row| row.iter().map(render_poly).collect()).collect()
}

pub fn parse_matrix(rows: &[Vec<String>], dim: usize) -> Result<Vec<Vec<Polynomial>>, ParseError> {
    rows.iter().map(|row| row.iter().map(|e| parse_poly_expr(e, dim)).collect()).collect()
}

/// One term `coeff · ∂^alpha ⊗ ∂^beta` of a correction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: String,
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

pub fn operator_terms(op: &BidiffOperator) -> Vec<TermSpec> {
    op.terms()
        .map(|(l, r, c)| TermSpec { coeff: render_poly(c), alpha: l.exponents().to_vec(), beta: r.exponents().to_vec() })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum OperatorError {
    #[error("term {term}: multi-index length {got}, expected {dim}")]
    IndexLength { term: usize, got: usize, dim: usize },
    #[error("term {term}: {source}")]
    Coefficient { term: usize, source: ParseError },
}

pub fn parse_operator(terms: &[TermSpec], dim: usize) -> Result<BidiffOperator, OperatorError> {
    let mut op = BidiffOperator::zero(dim);
    for (t, spec) in terms.iter().enumerate() {
        for idx in [&spec.alpha, &spec.beta] {
            if idx.len() != dim {
                return Err(OperatorError::IndexLength { term: t, got: idx.len(), dim });
            }
        }
        let c = parse_poly_expr(&spec.coeff, dim).map_err(|source| OperatorError::Coefficient { term: t, source })?;
        op.add_term(MultiIndex::from_slice(&spec.alpha), MultiIndex::from_slice(&spec.beta), c);
    }
    Ok(op)
}
