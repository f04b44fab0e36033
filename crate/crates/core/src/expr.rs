//! Expression trees over star products and brackets, their evaluation, and
//! the structural bound on the differential order each argument can see.

use crate::error::{Error, Result};
use crate::poisson::{Bivector, JacobiatorTensor};
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::series::LambdaSeries;
use crate::star::{OrderProfile, StarProduct};
use smallvec::SmallVec;
use std::collections::HashMap;
use std::sync::Arc;

/// A multilinear expression in argument slots `0..arity`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expr<T> {
    Arg(usize),
    Star(Box<Expr<T>>, Box<Expr<T>>),
    /// `a ⋆ b − b ⋆ a`. Kept separate from a sum of stars because the
    /// pointwise parts cancel, which sharpens the certificate bound.
    Commutator(Box<Expr<T>>, Box<Expr<T>>),
    Pointwise(Box<Expr<T>>, Box<Expr<T>>),
    Bracket(Box<Expr<T>>, Box<Expr<T>>),
    Jacobiator(Box<Expr<T>>, Box<Expr<T>>, Box<Expr<T>>),
    Sum(Vec<(T, Expr<T>)>),
}

impl<T: Scalar> Expr<T> {
    pub fn arg(slot: usize) -> Self {
        Expr::Arg(slot)
    }

    pub fn star(a: Self, b: Self) -> Self {
        Expr::Star(Box::new(a), Box::new(b))
    }

    pub fn commutator(a: Self, b: Self) -> Self {
        Expr::Commutator(Box::new(a), Box::new(b))
    }

    pub fn pointwise(a: Self, b: Self) -> Self {
        Expr::Pointwise(Box::new(a), Box::new(b))
    }

    pub fn bracket(a: Self, b: Self) -> Self {
        Expr::Bracket(Box::new(a), Box::new(b))
    }

    pub fn jacobiator(a: Self, b: Self, c: Self) -> Self {
        Expr::Jacobiator(Box::new(a), Box::new(b), Box::new(c))
    }

    pub fn add(a: Self, b: Self) -> Self {
        Expr::Sum(vec![(T::one(), a), (T::one(), b)])
    }

    pub fn sub(a: Self, b: Self) -> Self {
        Expr::Sum(vec![(T::one(), a), (-T::one(), b)])
    }

    pub fn sum<I: IntoIterator<Item = Self>>(parts: I) -> Self {
        Expr::Sum(parts.into_iter().map(|e| (T::one(), e)).collect())
    }

    /// `A(a, b, c) = a ⋆ (b ⋆ c) − (a ⋆ b) ⋆ c`.
    pub fn associator(a: Self, b: Self, c: Self) -> Self {
        Self::sub(
            Self::star(a.clone(), Self::star(b.clone(), c.clone())),
            Self::star(Self::star(a, b), c),
        )
    }

    /// Number of argument slots (one past the largest slot used).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Arg(i) => i + 1,
            Expr::Star(a, b) | Expr::Commutator(a, b) | Expr::Pointwise(a, b) | Expr::Bracket(a, b) => {
                a.arity().max(b.arity())
            }
            Expr::Jacobiator(a, b, c) => a.arity().max(b.arity()).max(c.arity()),
            Expr::Sum(parts) => parts.iter().map(|(_, e)| e.arity()).max().unwrap_or(0),
        }
    }

    /// Evaluates on explicit arguments.
    pub fn eval(&self, ctx: &EvalContext<'_, T>, args: &[LambdaSeries<T>]) -> Result<LambdaSeries<T>> {
        let compiled = Compiled::new(self);
        if args.len() < compiled.arity {
            return Err(Error::MissingArgument { slot: compiled.arity - 1, given: args.len() });
        }
        ctx.validate(&compiled)?;
        for a in args {
            if a.dim() != ctx.dim {
                return Err(Error::DimensionMismatch { left: ctx.dim, right: a.dim() });
            }
            if a.truncation_order() != ctx.order {
                return Err(Error::TruncationMismatch { left: ctx.order, right: a.truncation_order() });
            }
        }
        Ok(compiled.eval_all(ctx, args))
    }
}

/// What the operators in an expression refer to.
#[derive(Clone, Debug)]
pub struct EvalContext<'a, T> {
    pub dim: usize,
    /// Truncation order of every value.
    pub order: usize,
    pub product: Option<&'a StarProduct<T>>,
    pub bivector: Option<&'a Bivector<T>>,
    /// Jacobiator nodes contract this tensor; `None` when it vanishes.
    jacobiator: Option<Arc<JacobiatorTensor<T>>>,
}

impl<'a, T: Scalar> EvalContext<'a, T> {
    /// Star nodes use `product`; bracket nodes use its source bivector.
    pub fn for_product(product: &'a StarProduct<T>) -> Self {
        let mut ctx = Self::bracket_only(product.bivector());
        ctx.order = product.truncation_order();
        ctx.product = Some(product);
        ctx
    }

    /// Bracket-level identities live at truncation order zero.
    pub fn bracket_only(bivector: &'a Bivector<T>) -> Self {
        let tensor = bivector.jacobiator_tensor();
        EvalContext {
            dim: bivector.dim(),
            order: 0,
            product: None,
            bivector: Some(bivector),
            jacobiator: (!tensor.is_zero()).then(|| Arc::new(tensor)),
        }
    }

    pub fn order_profile(&self) -> OrderProfile {
        match self.product {
            Some(p) => p.order_profile(),
            None => OrderProfile { truncation: self.order, corrections: vec![None; self.order] },
        }
    }

    pub(crate) fn validate(&self, compiled: &Compiled<T>) -> Result<()> {
        for n in &compiled.nodes {
            match n {
                Node::Star(..) | Node::Commutator(..) if self.product.is_none() => return Err(Error::NoProduct),
                Node::Bracket(..) | Node::Jacobiator(..) if self.bivector.is_none() => return Err(Error::NoBivector),
                _ => {}
            }
        }
        Ok(())
    }

    pub(crate) fn bracket(&self, a: &LambdaSeries<T>, b: &LambdaSeries<T>) -> LambdaSeries<T> {
        let p = self.bivector.expect("validated");
        a.cauchy(b, |x, y| p.bracket_unchecked(x, y))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) enum Node<T> {
    Arg(usize),
    Star(usize, usize),
    Commutator(usize, usize),
    Pointwise(usize, usize),
    Bracket(usize, usize),
    Jacobiator(usize, usize, usize),
    Sum(Vec<(T, usize)>),
}

pub(crate) type SlotSet = SmallVec<[usize; 8]>;

/// An expression flattened into a DAG with shared subexpressions merged.
/// Children always precede their parents.
#[derive(Clone, Debug)]
pub(crate) struct Compiled<T> {
    pub nodes: Vec<Node<T>>,
    pub slots: Vec<SlotSet>,
    pub root: usize,
    pub arity: usize,
}

impl<T: Scalar> Compiled<T> {
    pub fn new(expr: &Expr<T>) -> Self {
        let mut c = Compiled { nodes: Vec::new(), slots: Vec::new(), root: 0, arity: expr.arity() };
        let mut seen = HashMap::new();
        c.root = c.intern(expr, &mut seen);
        c
    }

    fn intern(&mut self, e: &Expr<T>, seen: &mut HashMap<Node<T>, usize>) -> usize {
        let node = match e {
            Expr::Arg(i) => Node::Arg(*i),
            Expr::Star(a, b) => Node::Star(self.intern(a, seen), self.intern(b, seen)),
            Expr::Commutator(a, b) => Node::Commutator(self.intern(a, seen), self.intern(b, seen)),
            Expr::Pointwise(a, b) => Node::Pointwise(self.intern(a, seen), self.intern(b, seen)),
            Expr::Bracket(a, b) => Node::Bracket(self.intern(a, seen), self.intern(b, seen)),
            Expr::Jacobiator(a, b, c) => {
                Node::Jacobiator(self.intern(a, seen), self.intern(b, seen), self.intern(c, seen))
            }
            Expr::Sum(parts) => Node::Sum(parts.iter().map(|(c, e)| (c.clone(), self.intern(e, seen))).collect()),
        };
        if let Some(&id) = seen.get(&node) {
            return id;
        }
        let mut slots: SlotSet = match &node {
            Node::Arg(i) => SmallVec::from_elem(*i, 1),
            _ => children(&node).iter().flat_map(|&c| self.slots[c].iter().copied()).collect(),
        };
        slots.sort_unstable();
        slots.dedup();
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.slots.push(slots);
        seen.insert(node, id);
        id
    }

    /// Evaluates every node bottom-up on explicit arguments.
    pub fn eval_all(&self, ctx: &EvalContext<'_, T>, args: &[LambdaSeries<T>]) -> LambdaSeries<T> {
        let mut values: Vec<Arc<LambdaSeries<T>>> = Vec::with_capacity(self.nodes.len());
        for id in 0..=self.root {
            let v = match &self.nodes[id] {
                Node::Arg(i) => args[*i].clone(),
                n => {
                    let kids: SmallVec<[&LambdaSeries<T>; 4]> = children(n).iter().map(|&c| &*values[c]).collect();
                    self.combine(id, ctx, &kids)
                }
            };
            values.push(Arc::new(v));
        }
        values[self.root].as_ref().clone()
    }

    /// Value of a non-argument node from the values of its children.
    pub fn combine(&self, id: usize, ctx: &EvalContext<'_, T>, kids: &[&LambdaSeries<T>]) -> LambdaSeries<T> {
        match &self.nodes[id] {
            Node::Arg(_) => unreachable!("arguments have no children"),
            Node::Star(..) => ctx.product.expect("validated").star_unchecked(kids[0], kids[1]),
            Node::Commutator(..) => {
                let p = ctx.product.expect("validated");
                &p.star_unchecked(kids[0], kids[1]) - &p.star_unchecked(kids[1], kids[0])
            }
            Node::Pointwise(..) => kids[0] * kids[1],
            Node::Bracket(..) => ctx.bracket(kids[0], kids[1]),
            Node::Jacobiator(..) => {
                let out = LambdaSeries::zero(ctx.dim, ctx.order);
                match &ctx.jacobiator {
                    Some(j) => triple_cauchy(out, kids, |f, g, h| j.contract(f, g, h)),
                    None => out,
                }
            }
            Node::Sum(parts) => {
                let mut acc = LambdaSeries::zero(ctx.dim, ctx.order);
                for ((c, _), v) in parts.iter().zip(kids) {
                    if c.is_one() {
                        acc += *v;
                    } else {
                        acc += &v.scale(c);
                    }
                }
                acc
            }
        }
    }

    /// Per-node bounds on the differential order each λ-order can apply.
    fn order_tables(&self, profile: &OrderProfile) -> Vec<OrderTable> {
        let k = profile.truncation;
        let mut tables: Vec<OrderTable> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let mut out = OrderTable::blank(self.arity, k);
            match node {
                Node::Arg(i) => {
                    out.slot[*i][0] = Some(0);
                    out.total[0] = Some(0);
                }
                Node::Star(a, b) | Node::Commutator(a, b) | Node::Pointwise(a, b) | Node::Bracket(a, b) => {
                    let ops: Vec<(usize, (u32, u32, u32))> = match node {
                        Node::Star(..) => (0..=k).filter_map(|r| profile.at(r).map(|o| (r, o))).collect(),
                        Node::Commutator(..) => (1..=k).filter_map(|r| profile.at(r).map(|o| (r, o))).collect(),
                        Node::Pointwise(..) => vec![(0, (0, 0, 0))],
                        _ => vec![(0, (1, 1, 2))],
                    };
                    let (ta, tb) = (&tables[*a], &tables[*b]);
                    for &(r, (l, rr, tot)) in &ops {
                        for sa in (0..=k).filter(|&t| ta.present(t)) {
                            for sb in (0..=k).filter(|&t| tb.present(t)) {
                                let t = r + sa + sb;
                                if t > k {
                                    continue;
                                }
                                out.raise(ta, sa, t, l);
                                out.raise(tb, sb, t, rr);
                                out.raise_total(ta.total[sa].unwrap() + tb.total[sb].unwrap() + tot, t);
                            }
                        }
                    }
                }
                Node::Jacobiator(a, b, c) => {
                    let (ta, tb, tc) = (&tables[*a], &tables[*b], &tables[*c]);
                    for sa in (0..=k).filter(|&t| ta.present(t)) {
                        for sb in (0..=k - sa).filter(|&t| tb.present(t)) {
                            for sc in (0..=k - sa - sb).filter(|&t| tc.present(t)) {
                                let t = sa + sb + sc;
                                out.raise(ta, sa, t, 1);
                                out.raise(tb, sb, t, 1);
                                out.raise(tc, sc, t, 1);
                                let sum = ta.total[sa].unwrap() + tb.total[sb].unwrap() + tc.total[sc].unwrap();
                                out.raise_total(sum + 3, t);
                            }
                        }
                    }
                }
                Node::Sum(parts) => {
                    for (_, e) in parts {
                        let te = &tables[*e];
                        for t in (0..=k).filter(|&t| te.present(t)) {
                            out.raise(te, t, t, 0);
                            out.raise_total(te.total[t].unwrap(), t);
                        }
                    }
                }
            }
            tables.push(out);
        }
        tables
    }

    pub fn certificate_degree(&self, profile: &OrderProfile) -> Vec<u32> {
        let tables = self.order_tables(profile);
        tables[self.root].slot.iter().map(|row| row.iter().flatten().copied().max().unwrap_or(0)).collect()
    }

    /// Bound on the summed differential order over all slots.
    pub fn total_degree(&self, profile: &OrderProfile) -> u32 {
        let tables = self.order_tables(profile);
        tables[self.root].total.iter().flatten().copied().max().unwrap_or(0)
    }
}

struct OrderTable {
    /// `slot[s][t]`: order applied to slot `s` within the `λ^t` part.
    slot: Vec<Vec<Option<u32>>>,
    /// `total[t]`: summed order over slots within the `λ^t` part; `None`
    /// when the node has no `λ^t` part.
    total: Vec<Option<u32>>,
}

impl OrderTable {
    fn blank(arity: usize, k: usize) -> Self {
        OrderTable { slot: vec![vec![None; k + 1]; arity], total: vec![None; k + 1] }
    }

    fn present(&self, t: usize) -> bool {
        self.total[t].is_some()
    }

    fn raise(&mut self, src: &OrderTable, ts: usize, t: usize, add: u32) {
        for (slot, row) in src.slot.iter().enumerate() {
            if let Some(o) = row[ts] {
                let cell = &mut self.slot[slot][t];
                *cell = Some(cell.map_or(o + add, |c| c.max(o + add)));
            }
        }
    }

    fn raise_total(&mut self, v: u32, t: usize) {
        let cell = &mut self.total[t];
        *cell = Some(cell.map_or(v, |c| c.max(v)));
    }
}

/// `Σ_{s+u+v=t} op(a_(s), b_(u), c_(v))` accumulated into `out`.
fn triple_cauchy<T: Scalar>(
    mut out: LambdaSeries<T>,
    kids: &[&LambdaSeries<T>],
    op: impl Fn(&Polynomial<T>, &Polynomial<T>, &Polynomial<T>) -> Polynomial<T>,
) -> LambdaSeries<T> {
    let k = out.truncation_order();
    let (a, b, c) = (kids[0].coefficients(), kids[1].coefficients(), kids[2].coefficients());
    for (s, f) in a.iter().enumerate().filter(|(_, f)| !f.is_zero()) {
        for (u, g) in b.iter().enumerate().take(k + 1 - s).filter(|(_, g)| !g.is_zero()) {
            for (v, h) in c.iter().enumerate().take(k + 1 - s - u).filter(|(_, h)| !h.is_zero()) {
                let p = op(f, g, h);
                if !p.is_zero() {
                    out.coeffs_mut()[s + u + v] += &p;
                }
            }
        }
    }
    out
}

pub(crate) fn children<T>(n: &Node<T>) -> SmallVec<[usize; 4]> {
    match n {
        Node::Arg(_) => SmallVec::new(),
        Node::Star(a, b) | Node::Commutator(a, b) | Node::Pointwise(a, b) | Node::Bracket(a, b) => {
            SmallVec::from_slice(&[*a, *b])
        }
        Node::Jacobiator(a, b, c) => SmallVec::from_slice(&[*a, *b, *c]),
        Node::Sum(parts) => parts.iter().map(|(_, e)| *e).collect(),
    }
}

/// For each argument slot, a degree `m` such that checking all monomial
/// arguments of degree `<= m` in that slot decides the identity
/// `expr ≡ 0` for all polynomial arguments.
///
/// Arguments enter at `λ^0`. A star node at total order `t` applies `C_r`
/// with `r` at most what is left of the budget `K`, so along any path the
/// orders of the applied corrections are summed under the constraint that
/// the λ-orders add up to at most `K`. Brackets and Jacobiators add one
/// derivative per slot.
pub fn certificate_degree<T: Scalar>(expr: &Expr<T>, profile: &OrderProfile) -> Vec<u32> {
    Compiled::new(expr).certificate_degree(profile)
}

/// A bound on the summed degree of the monomial tuples that must be checked;
/// a multi-slot operator is determined by tuples up to its total order.
pub fn total_degree<T: Scalar>(expr: &Expr<T>, profile: &OrderProfile) -> u32 {
    Compiled::new(expr).total_degree(profile)
}
