//! Bivector fields, their brackets and Jacobiators, and the bracket-level
//! identities (Jacobi, Malcev, Shestakov).

use crate::certificate::CertifyOptions;
use crate::diffop::BidiffOperator;
use crate::error::{Error, Result};
use crate::expr::EvalContext;
use crate::identities::{self, IdentityVerdict};
use crate::multi_index::MultiIndex;
use crate::poly::Polynomial;
use crate::scalar::Scalar;

/// An antisymmetric `n × n` matrix of polynomials `P^{ij}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Bivector<T> {
    dim: usize,
    entries: Vec<Polynomial<T>>,
}

impl<T: Scalar> Bivector<T> {
    pub fn zero(dim: usize) -> Self {
        Bivector { dim, entries: vec![Polynomial::zero(dim); dim * dim] }
    }

    /// Validates a full matrix; it must satisfy `P^{ij} = −P^{ji}`.
    pub fn from_matrix(rows: Vec<Vec<Polynomial<T>>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: row.len() });
            }
            for p in row {
                if p.dim() != dim {
                    return Err(Error::DimensionMismatch { left: dim, right: p.dim() });
                }
                entries.push(p);
            }
        }
        let b = Bivector { dim, entries };
        for i in 0..dim {
            for j in i..dim {
                if b.entry(i, j) != &-b.entry(j, i) {
                    return Err(Error::NotAntisymmetric { i, j });
                }
            }
        }
        Ok(b)
    }

    /// Sets `P^{ij} = p` and `P^{ji} = −p` for every listed `(i, j, p)`
    /// with `i != j` (zero-based). Repeated pairs accumulate.
    pub fn from_entries<I: IntoIterator<Item = (usize, usize, Polynomial<T>)>>(dim: usize, entries: I) -> Result<Self> {
        let mut b = Self::zero(dim);
        for (i, j, p) in entries {
            if i >= dim || j >= dim {
                return Err(Error::AxisOutOfRange { axis: i.max(j), dim });
            }
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: p.dim() });
            }
            if i == j {
                if p.is_zero() {
                    continue;
                }
                return Err(Error::NotAntisymmetric { i, j });
            }
            b.entries[i * dim + j] += &p;
            b.entries[j * dim + i] -= &p;
        }
        Ok(b)
    }

    /// Constant bivector from a scalar matrix.
    pub fn constant(rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.len();
        Self::from_matrix(
            rows.into_iter()
                .map(|r| r.into_iter().map(|c| Polynomial::constant(dim, c)).collect())
                .collect(),
        )
    }

    /// The standard symplectic form on `R^{2m}`: `{x_i, x_{i+m}} = 1`.
    pub fn symplectic(half_dim: usize) -> Self {
        let dim = 2 * half_dim;
        Self::from_entries(dim, (0..half_dim).map(|i| (i, i + half_dim, Polynomial::one(dim)))).expect("valid")
    }

    /// Linear bivector `P^{ij} = Σ_k c^{ij}_k x_k` from structure constants
    /// `(i, j, k, c)`, zero-based.
    pub fn linear<I: IntoIterator<Item = (usize, usize, usize, T)>>(dim: usize, constants: I) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, j, k, c) in constants {
            if k >= dim {
                return Err(Error::AxisOutOfRange { axis: k, dim });
            }
            entries.push((i, j, Polynomial::var(dim, k).scale(&c)));
        }
        Self::from_entries(dim, entries)
    }

    /// `P^{ij} = ε^{ijk} x_k` on `R^3`.
    pub fn su2() -> Self {
        Self::linear(3, [(0, 1, 2, T::one()), (1, 2, 0, T::one()), (2, 0, 1, T::one())]).expect("valid")
    }

    /// Heisenberg algebra on `R^3`: `{x1, x2} = x3`, other brackets zero.
    pub fn heisenberg() -> Self {
        Self::linear(3, [(0, 1, 2, T::one())]).expect("valid")
    }

    /// Magnetic monopole bracket on `R^6` with coordinates `(x1, x2, x3, p1,
    /// p2, p3)` stored as axes `0..6`: `{x_i, p_j} = δ_ij` and
    /// `{p_i, p_j} = ε_{ijk} B_k(x)`. The field components must be
    /// six-dimensional polynomials.
    pub fn monopole(field: [Polynomial<T>; 3]) -> Result<Self> {
        let mut entries: Vec<(usize, usize, Polynomial<T>)> = (0..3).map(|i| (i, i + 3, Polynomial::one(6))).collect();
        let [b1, b2, b3] = field;
        entries.push((4, 5, b1));
        entries.push((5, 3, b2));
        entries.push((3, 4, b3));
        Self::from_entries(6, entries)
    }

    /// Monopole with `B(x) = (x1, x2, x3)`, whose divergence is 3.
    pub fn monopole_radial() -> Self {
        Self::monopole([Polynomial::var(6, 0), Polynomial::var(6, 1), Polynomial::var(6, 2)]).expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `P^{ij}`, zero-based.
    pub fn entry(&self, i: usize, j: usize) -> &Polynomial<T> {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Polynomial<T>]> {
        self.entries.chunks(self.dim.max(1))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(Polynomial::is_constant)
    }

    /// The bracket as the bidifferential operator `Σ P^{ij} ∂_i ⊗ ∂_j`.
    pub fn bracket_operator(&self) -> BidiffOperator<T> {
        let mut op = BidiffOperator::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                op.add_term(MultiIndex::unit(self.dim, i), MultiIndex::unit(self.dim, j), self.entry(i, j).clone());
            }
        }
        op
    }

    /// `{f, g} = P^{ij} ∂_i f ∂_j g`.
    pub fn bracket(&self, f: &Polynomial<T>, g: &Polynomial<T>) -> Result<Polynomial<T>> {
        for d in [f.dim(), g.dim()] {
            if d != self.dim {
                return Err(Error::DimensionMismatch { left: self.dim, right: d });
            }
        }
        Ok(self.bracket_unchecked(f, g))
    }

    pub(crate) fn bracket_unchecked(&self, f: &Polynomial<T>, g: &Polynomial<T>) -> Polynomial<T> {
        let mut out = Polynomial::zero(self.dim);
        if f.is_constant() || g.is_constant() {
            return out;
        }
        let df: Vec<Polynomial<T>> = (0..self.dim).map(|i| f.derivative(&MultiIndex::unit(self.dim, i))).collect();
        let dg: Vec<Polynomial<T>> = (0..self.dim).map(|i| g.derivative(&MultiIndex::unit(self.dim, i))).collect();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let p = self.entry(i, j);
                if p.is_zero() {
                    continue;
                }
                let cross = &(&df[i] * &dg[j]) - &(&df[j] * &dg[i]);
                if !cross.is_zero() {
                    out += &(p * &cross);
                }
            }
        }
        out
    }

    /// The Jacobiator `{f,{g,h}} + {h,{f,g}} + {g,{h,f}}` by nested brackets.
    pub fn jacobiator(&self, f: &Polynomial<T>, g: &Polynomial<T>, h: &Polynomial<T>) -> Result<Polynomial<T>> {
        for d in [f.dim(), g.dim(), h.dim()] {
            if d != self.dim {
                return Err(Error::DimensionMismatch { left: self.dim, right: d });
            }
        }
        Ok(self.jacobiator_unchecked(f, g, h))
    }

    pub(crate) fn jacobiator_unchecked(&self, f: &Polynomial<T>, g: &Polynomial<T>, h: &Polynomial<T>) -> Polynomial<T> {
        let a = self.bracket_unchecked(f, &self.bracket_unchecked(g, h));
        let b = self.bracket_unchecked(h, &self.bracket_unchecked(f, g));
        let c = self.bracket_unchecked(g, &self.bracket_unchecked(h, f));
        &(&a + &b) + &c
    }

    /// `J^{ijk} = P^{il} ∂_l P^{jk} + P^{jl} ∂_l P^{ki} + P^{kl} ∂_l P^{ij}`.
    pub fn jacobiator_tensor(&self) -> JacobiatorTensor<T> {
        let n = self.dim;
        // grad[j * n + k][l] = ∂_l P^{jk}
        let grad: Vec<Vec<Polynomial<T>>> = self
            .entries
            .iter()
            .map(|p| (0..n).map(|l| p.derivative(&MultiIndex::unit(n, l))).collect())
            .collect();
        let term = |i: usize, j: usize, k: usize| -> Polynomial<T> {
            let mut acc = Polynomial::zero(n);
            for l in 0..n {
                let p = self.entry(i, l);
                let d = &grad[j * n + k][l];
                if !p.is_zero() && !d.is_zero() {
                    acc += &(p * d);
                }
            }
            acc
        };
        let mut entries = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    entries.push(&(&term(i, j, k) + &term(j, k, i)) + &term(k, i, j));
                }
            }
        }
        JacobiatorTensor { dim: n, entries }
    }

    /// Holds iff every `J^{ijk}` vanishes; otherwise reports the first
    /// nonzero entry with `i < j < k` and a rational point where it is nonzero.
    pub fn jacobi_check(&self) -> JacobiVerdict<T> {
        let tensor = self.jacobiator_tensor();
        match tensor.nonzero_entries().into_iter().next() {
            None => JacobiVerdict::Holds,
            Some(((i, j, k), p)) => {
                let point = p.nonvanishing_point().expect("nonzero polynomial");
                let value = p.eval(&point).expect("dimension");
                JacobiVerdict::Fails { indices: (i, j, k), point, value }
            }
        }
    }

    /// Malcev identity `{h,f,{h,g}} = {{h,f,g},h}`, certified on monomials.
    /// `degree_bound`, when given, must be at least the certificate bound.
    pub fn malcev_check(&self, degree_bound: Option<u32>) -> Result<IdentityVerdict<T>> {
        let ctx = EvalContext::bracket_only(self);
        identities::certify_bracket_identity(&identities::malcev(), &ctx, &bound_options(degree_bound))
    }

    /// Shestakov identity `{f,g,h}·{f,g} = 0` together with its partial
    /// linearization `{f,g,h}·{f,d} + {f,d,h}·{f,g} = 0`.
    pub fn shestakov_check(&self, degree_bound: Option<u32>) -> Result<ShestakovVerdict<T>> {
        let ctx = EvalContext::bracket_only(self);
        let opts = bound_options(degree_bound);
        let full = identities::certify_bracket_identity(&identities::shestakov(), &ctx, &opts)?;
        let linearized = identities::certify_bracket_identity(&identities::shestakov_linearized(), &ctx, &opts)?;
        Ok(ShestakovVerdict { identity: full, linearized })
    }

    /// `J(x0)(v1, v2, v3) = J^{ijk}(x0) v1_i v2_j v3_k`.
    pub fn contract_jacobiator_at(&self, x0: &[T], v1: &Covector<T>, v2: &Covector<T>, v3: &Covector<T>) -> Result<T> {
        self.jacobiator_tensor().contract_at(x0, v1, v2, v3)
    }

    /// `P(x0)(v1, v4) = P^{ij}(x0) v1_i v4_j`.
    pub fn contract_at(&self, x0: &[T], v1: &Covector<T>, v4: &Covector<T>) -> Result<T> {
        check_len(x0.len(), self.dim)?;
        check_len(v1.0.len(), self.dim)?;
        check_len(v4.0.len(), self.dim)?;
        let mut total = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let p = self.entry(i, j);
                if p.is_zero() || v1.0[i].is_zero() || v4.0[j].is_zero() {
                    continue;
                }
                total += p.eval(x0)? * v1.0[i].clone() * v4.0[j].clone();
            }
        }
        Ok(total)
    }
}

fn bound_options(degree_bound: Option<u32>) -> CertifyOptions {
    CertifyOptions { degree_override: degree_bound, require_override_sufficient: true, ..CertifyOptions::default() }
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::PointLength { got, expected });
    }
    Ok(())
}

/// A cotangent vector at a point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Covector<T>(pub Vec<T>);

impl<T: Scalar> Covector<T> {
    /// The coordinate covector `dx_{axis+1}`.
    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = vec![T::zero(); dim];
        v[axis] = T::one();
        Covector(v)
    }
}

/// The totally antisymmetric tensor `J^{ijk}` with
/// `{f, g, h} = J^{ijk} ∂_i f ∂_j g ∂_k h`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JacobiatorTensor<T> {
    dim: usize,
    entries: Vec<Polynomial<T>>,
}

impl<T: Scalar> JacobiatorTensor<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize, k: usize) -> &Polynomial<T> {
        &self.entries[(i * self.dim + j) * self.dim + k]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    /// Nonzero entries with `i < j < k`, lexicographic.
    pub fn nonzero_entries(&self) -> Vec<((usize, usize, usize), &Polynomial<T>)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let p = self.entry(i, j, k);
                    if !p.is_zero() {
                        out.push(((i, j, k), p));
                    }
                }
            }
        }
        out
    }

    /// `J^{ijk} ∂_i f ∂_j g ∂_k h`.
    pub fn contract(&self, f: &Polynomial<T>, g: &Polynomial<T>, h: &Polynomial<T>) -> Polynomial<T> {
        let n = self.dim;
        let grad = |p: &Polynomial<T>| -> Vec<Polynomial<T>> { (0..n).map(|i| p.derivative(&MultiIndex::unit(n, i))).collect() };
        let (df, dg, dh) = (grad(f), grad(g), grad(h));
        let mut out = Polynomial::zero(n);
        for i in 0..n {
            if df[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if dg[j].is_zero() {
                    continue;
                }
                let fg = &df[i] * &dg[j];
                for k in 0..n {
                    let e = self.entry(i, j, k);
                    if e.is_zero() || dh[k].is_zero() {
                        continue;
                    }
                    out += &(&(e * &fg) * &dh[k]);
                }
            }
        }
        out
    }

    pub fn contract_at(&self, x0: &[T], v1: &Covector<T>, v2: &Covector<T>, v3: &Covector<T>) -> Result<T> {
        for len in [x0.len(), v1.0.len(), v2.0.len(), v3.0.len()] {
            check_len(len, self.dim)?;
        }
        let n = self.dim;
        let mut total = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let e = self.entry(i, j, k);
                    if e.is_zero() || v1.0[i].is_zero() || v2.0[j].is_zero() || v3.0[k].is_zero() {
                        continue;
                    }
                    total = total + e.eval(x0)? * v1.0[i].clone() * v2.0[j].clone() * v3.0[k].clone();
                }
            }
        }
        Ok(total)
    }
}

/// Outcome of [`Bivector::jacobi_check`]. Indices are zero-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum JacobiVerdict<T> {
    Holds,
    Fails { indices: (usize, usize, usize), point: Vec<T>, value: T },
}

impl<T> JacobiVerdict<T> {
    pub fn holds(&self) -> bool {
        matches!(self, JacobiVerdict::Holds)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ShestakovVerdict<T> {
    pub identity: IdentityVerdict<T>,
    pub linearized: IdentityVerdict<T>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    type P = Polynomial<Rational>;
    type B = Bivector<Rational>;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn bracket_examples() {
        let b = B::symplectic(1);
        assert_eq!(b.bracket(&P::var(2, 0), &P::var(2, 1)).unwrap(), P::one(2));
        let f = &P::var(2, 0).pow(2) + &P::var(2, 1);
        assert!(b.bracket(&f, &f).unwrap().is_zero());
        let su2 = B::su2();
        assert_eq!(su2.bracket(&P::var(3, 0), &P::var(3, 1)).unwrap(), P::var(3, 2));
        assert!(su2.bracket(&P::var(2, 0), &P::var(3, 1)).is_err());
    }

    #[test]
    fn construction_rejects_non_antisymmetric() {
        let rows = vec![vec![P::zero(2), P::one(2)], vec![P::one(2), P::zero(2)]];
        assert_eq!(B::from_matrix(rows), Err(Error::NotAntisymmetric { i: 0, j: 1 }));
        let diag = vec![vec![P::one(1)]];
        assert!(B::from_matrix(diag).is_err());
    }

    #[test]
    fn monopole_jacobiator_is_minus_divergence() {
        // Hand expansion: {p2,p3} = B1 = x1 and {p1, x1} = -1, so each
        // cyclic term contributes -1.
        let m = B::monopole_radial();
        let p = |i: usize| P::var(6, 3 + i);
        assert_eq!(m.jacobiator(&p(0), &p(1), &p(2)).unwrap(), P::constant(6, q(-3)));
        let t = m.jacobiator_tensor();
        assert_eq!(t.entry(3, 4, 5), &P::constant(6, q(-3)));
        assert_eq!(t.nonzero_entries().len(), 1);
    }

    #[test]
    fn su2_and_constant_are_jacobi() {
        assert!(B::su2().jacobiator_tensor().is_zero());
        assert!(B::heisenberg().jacobiator_tensor().is_zero());
        assert!(B::symplectic(2).jacobiator_tensor().is_zero());
        let x = |i| P::var(3, i);
        assert!(B::su2().jacobiator(&x(0), &x(1), &x(2)).unwrap().is_zero());
        assert!(B::symplectic(1).jacobi_check().holds());
        assert!(B::su2().jacobi_check().holds());
    }

    #[test]
    fn jacobi_check_reports_witness() {
        match B::monopole_radial().jacobi_check() {
            JacobiVerdict::Fails { indices, point, value } => {
                assert_eq!(indices, (3, 4, 5));
                assert_eq!(value, q(-3));
                assert_eq!(point.len(), 6);
            }
            JacobiVerdict::Holds => panic!("monopole violates Jacobi"),
        }
    }

    #[test]
    fn tensor_is_totally_antisymmetric() {
        let b = B::monopole([&P::var(6, 0) * &P::var(6, 1), P::var(6, 2).pow(2), P::var(6, 0)]).unwrap();
        let t = b.jacobiator_tensor();
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    let e = t.entry(i, j, k);
                    assert_eq!(e, &-t.entry(j, i, k));
                    assert_eq!(e, &-t.entry(i, k, j));
                }
            }
        }
    }

    #[test]
    fn pointwise_contractions() {
        let origin = vec![q(0); 6];
        let m = B::monopole_radial();
        let e = |a| Covector::<Rational>::basis(6, a);
        assert_eq!(m.contract_jacobiator_at(&origin, &e(3), &e(4), &e(5)).unwrap(), q(-3));
        assert_eq!(m.contract_jacobiator_at(&origin, &e(3), &e(3), &e(5)).unwrap(), q(0));
        assert_eq!(B::symplectic(1).contract_at(&[q(0), q(0)], &Covector::basis(2, 0), &Covector::basis(2, 1)).unwrap(), q(1));
        let v = Covector(vec![q(1), q(2)]);
        assert_eq!(B::symplectic(1).contract_at(&[q(5), q(5)], &v, &v).unwrap(), q(0));
        let w = Covector(vec![q(1), q(-1), q(3)]);
        assert_eq!(B::su2().contract_at(&[q(0), q(0), q(0)], &w, &Covector::basis(3, 1)).unwrap(), q(0));
        assert!(B::su2().contract_at(&[q(0)], &w, &w).is_err());
    }
}
