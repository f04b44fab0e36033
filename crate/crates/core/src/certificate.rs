//! Monomial certificate sweeps.
//!
//! A multilinear polydifferential expression whose differential order in
//! slot `s` is at most `m_s` vanishes on all polynomials iff it vanishes on
//! every tuple of monomials with `deg(slot s) <= m_s`. The sweep walks those
//! tuples in graded order (total degree, then the degree split across slots,
//! then the monomials themselves) and stops at the first nonzero defect.

use crate::error::{Error, Result};
use crate::expr::{children, Compiled, EvalContext, Node};
use crate::multi_index::MultiIndex;
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::series::LambdaSeries;
use rayon::prelude::*;
use smallvec::SmallVec;
use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::sync::Arc;

const CACHE_CAP: usize = 1 << 15;
const CHUNK: usize = 2048;

/// Knobs for a certificate run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Raises every per-slot bound to at least this degree.
    pub degree_override: Option<u32>,
    /// Reject an override below the computed bound instead of ignoring it.
    pub require_override_sufficient: bool,
    /// Cap on tuples tried when searching non-multilinear forms for a witness.
    pub diagonal_search_limit: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { degree_override: None, require_override_sufficient: false, diagonal_search_limit: 50_000 }
    }
}

impl CertifyOptions {
    pub(crate) fn apply(&self, computed: Vec<u32>) -> Result<Vec<u32>> {
        let Some(o) = self.degree_override else { return Ok(computed) };
        let required = computed.iter().copied().max().unwrap_or(0);
        if self.require_override_sufficient && o < required {
            return Err(Error::InsufficientDegree { given: o, required });
        }
        Ok(computed.into_iter().map(|m| m.max(o)).collect())
    }
}

/// A tuple with a nonzero defect.
#[derive(Clone, Debug)]
pub(crate) struct Failure<T> {
    pub args: Vec<MultiIndex>,
    pub lambda_order: usize,
    pub defect: Polynomial<T>,
}

#[derive(Clone, Debug)]
pub(crate) struct Outcome<T> {
    pub tuples: u64,
    pub failure: Option<Failure<T>>,
}

/// Monomial arguments for one form under fixed per-slot bounds.
pub(crate) struct Sweep<'c, T> {
    compiled: &'c Compiled<T>,
    ctx: &'c EvalContext<'c, T>,
    bounds: Vec<u32>,
    max_total: u32,
    monomials: Vec<Vec<MultiIndex>>,
    by_degree: Vec<Vec<Range<usize>>>,
    args: Vec<Vec<Arc<LambdaSeries<T>>>>,
    cacheable: Vec<bool>,
}

impl<'c, T: Scalar> Sweep<'c, T> {
    /// Tuples with `deg(slot s) <= bounds[s]` and summed degree `<= max_total`.
    pub fn new(compiled: &'c Compiled<T>, ctx: &'c EvalContext<'c, T>, bounds: Vec<u32>, max_total: u32) -> Self {
        let n = ctx.dim;
        let monomials: Vec<Vec<MultiIndex>> = bounds.iter().map(|&b| MultiIndex::up_to_degree(n, b)).collect();
        let by_degree = monomials
            .iter()
            .map(|list| {
                let mut ranges: Vec<Range<usize>> = Vec::new();
                for (i, m) in list.iter().enumerate() {
                    let d = m.degree() as usize;
                    if ranges.len() <= d {
                        ranges.push(i..i);
                    }
                    ranges[d].end = i + 1;
                }
                ranges
            })
            .collect();
        let args = monomials
            .iter()
            .map(|list| {
                list.iter()
                    .map(|m| Arc::new(LambdaSeries::from_poly(Polynomial::monomial(m.clone(), T::one()), ctx.order)))
                    .collect()
            })
            .collect();
        let arity = compiled.arity;
        let cacheable = compiled
            .nodes
            .iter()
            .zip(&compiled.slots)
            .map(|(node, slots)| !matches!(node, Node::Arg(_)) && slots.len() < arity)
            .collect();
        Sweep { compiled, ctx, bounds, max_total, monomials, by_degree, args, cacheable }
    }

    fn counts(&self) -> Vec<Vec<Range<usize>>> {
        self.by_degree.clone()
    }

    fn failure(&self, tuple: &[u32], value: &LambdaSeries<T>) -> Option<Failure<T>> {
        value.lowest_order().map(|(r, p)| Failure {
            args: tuple.iter().enumerate().map(|(s, &i)| self.monomials[s][i as usize].clone()).collect(),
            lambda_order: r,
            defect: p.clone(),
        })
    }

    /// First failing tuple in graded order, trying at most `limit` tuples.
    pub fn find_first(&self, limit: Option<u64>) -> Outcome<T> {
        let mut tuples = GradedTuples::new(self.counts(), self.bounds.clone(), self.max_total);
        let mut checked = 0u64;
        let parallel = rayon::current_num_threads() > 1;
        let mut ev = Evaluator::new(self);
        loop {
            let room = limit.map_or(CHUNK as u64, |l| (l - checked).min(CHUNK as u64)) as usize;
            if room == 0 {
                return Outcome { tuples: checked, failure: None };
            }
            let chunk: Vec<Vec<u32>> = tuples.by_ref().take(room).collect();
            if chunk.is_empty() {
                return Outcome { tuples: checked, failure: None };
            }
            let hit = if parallel {
                chunk
                    .par_iter()
                    .enumerate()
                    .map_init(|| Evaluator::new(self), |ev, (i, t)| (i, ev.failure(t)))
                    .find_first(|(_, f)| f.is_some())
                    .map(|(i, f)| (i, f.expect("found")))
            } else {
                chunk.iter().enumerate().find_map(|(i, t)| ev.failure(t).map(|f| (i, f)))
            };
            if let Some((i, f)) = hit {
                return Outcome { tuples: checked + i as u64 + 1, failure: Some(f) };
            }
            checked += chunk.len() as u64;
        }
    }

    /// Decides the form, reducing through a linear separator when one exists.
    pub fn decide(&self) -> Outcome<T> {
        match find_separator(self.compiled) {
            Some(sep) => self.decide_through(sep),
            None => self.find_first(None),
        }
    }

    /// The root is linear in the value of node `sep`, whose slots feed the
    /// root only through it. Checking the root on a spanning set of `sep`
    /// values, each realized by an actual tuple, therefore covers every tuple.
    fn decide_through(&self, sep: usize) -> Outcome<T> {
        let arity = self.compiled.arity;
        let inner: Vec<usize> = self.compiled.slots[sep].to_vec();
        let outer: Vec<usize> = (0..arity).filter(|s| !inner.contains(s)).collect();
        let counts = self.counts();
        let pick = |slots: &[usize]| -> (Vec<Vec<Range<usize>>>, Vec<u32>) {
            (slots.iter().map(|&s| counts[s].clone()).collect(), slots.iter().map(|&s| self.bounds[s]).collect())
        };
        let mut ev = Evaluator::new(self);
        let mut checked = 0u64;
        let mut basis = Echelon::new();
        let mut spanning: Vec<Vec<u32>> = Vec::new();
        let mut tuple = vec![0u32; arity];
        let degree = |slots: &[usize], part: &[u32]| -> u32 {
            slots.iter().zip(part).map(|(&s, &i)| self.monomials[s][i as usize].degree()).sum()
        };
        // inserted in graded order, so the spanning tuples of degree <= e
        // span the values on all tuples of degree <= e
        let (c_in, b_in) = pick(&inner);
        for part in GradedTuples::new(c_in, b_in, self.max_total) {
            for (&s, &i) in inner.iter().zip(&part) {
                tuple[s] = i;
            }
            ev.reset();
            let v = ev.node(sep, &tuple);
            checked += 1;
            if basis.insert(&v) {
                spanning.push(part);
            }
        }
        let (c_out, b_out) = pick(&outer);
        let outer_tuples: Vec<(u32, Vec<u32>)> = GradedTuples::new(c_out, b_out, self.max_total)
            .map(|t| (degree(&outer, &t), t))
            .collect();
        for part in &spanning {
            let d_in = degree(&inner, part);
            for (&s, &i) in inner.iter().zip(part) {
                tuple[s] = i;
            }
            for (d_out, rest) in &outer_tuples {
                if d_in + d_out > self.max_total {
                    break;
                }
                for (&s, &i) in outer.iter().zip(rest) {
                    tuple[s] = i;
                }
                checked += 1;
                if ev.failure(&tuple).is_some() {
                    let first = self.find_first(None);
                    return Outcome { tuples: checked + first.tuples, failure: first.failure };
                }
            }
        }
        Outcome { tuples: checked, failure: None }
    }
}

/// Tuples of monomial indices in graded order.
pub(crate) struct GradedTuples {
    ranges: Vec<Vec<Range<usize>>>,
    max_total: u32,
    total: u32,
    comps: Vec<Vec<u32>>,
    comp: usize,
    current: Option<Vec<u32>>,
    bounds: Vec<u32>,
}

impl GradedTuples {
    pub fn new(ranges: Vec<Vec<Range<usize>>>, bounds: Vec<u32>, max_total: u32) -> Self {
        let max_total = max_total.min(bounds.iter().sum());
        let mut g = GradedTuples { ranges, max_total, total: 0, comps: Vec::new(), comp: 0, current: None, bounds };
        g.comps = compositions(0, &g.bounds);
        g
    }

    fn start(&self) -> Vec<u32> {
        let c = &self.comps[self.comp];
        c.iter().enumerate().map(|(s, &d)| self.ranges[s][d as usize].start as u32).collect()
    }
}

impl Iterator for GradedTuples {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if let Some(cur) = &mut self.current {
            let c = &self.comps[self.comp];
            let mut s = cur.len();
            let advanced = loop {
                if s == 0 {
                    break false;
                }
                s -= 1;
                let r = &self.ranges[s][c[s] as usize];
                if (cur[s] as usize) + 1 < r.end {
                    cur[s] += 1;
                    break true;
                }
                cur[s] = r.start as u32;
            };
            if advanced {
                return Some(cur.clone());
            }
            self.current = None;
            self.comp += 1;
        }
        if self.bounds.is_empty() {
            if self.total == 0 {
                self.total = 1;
                return Some(Vec::new());
            }
            return None;
        }
        while self.comp >= self.comps.len() {
            if self.total >= self.max_total {
                return None;
            }
            self.total += 1;
            self.comps = compositions(self.total, &self.bounds);
            self.comp = 0;
        }
        let t = self.start();
        self.current = Some(t.clone());
        Some(t)
    }
}

/// Splits of `total` across slots with `d_s <= bounds[s]`, earlier slots
/// taking the larger share first.
fn compositions(total: u32, bounds: &[u32]) -> Vec<Vec<u32>> {
    fn go(left: u32, bounds: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let s = cur.len();
        if s + 1 == bounds.len() {
            if left <= bounds[s] {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let room: u32 = bounds[s + 1..].iter().sum();
        for d in (0..=left.min(bounds[s])).rev() {
            if left - d > room {
                break;
            }
            cur.push(d);
            go(left - d, bounds, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if !bounds.is_empty() {
        go(total, bounds, &mut Vec::new(), &mut out);
    }
    out
}

type Key = SmallVec<[u32; 8]>;

/// Evaluates the DAG on tuples, memoizing proper subexpressions by the
/// monomials they depend on.
struct Evaluator<'s, 'c, T> {
    sweep: &'s Sweep<'c, T>,
    caches: Vec<HashMap<Key, Arc<LambdaSeries<T>>>>,
    local: Vec<Option<Arc<LambdaSeries<T>>>>,
}

impl<'s, 'c, T: Scalar> Evaluator<'s, 'c, T> {
    fn new(sweep: &'s Sweep<'c, T>) -> Self {
        let n = sweep.compiled.nodes.len();
        Evaluator { sweep, caches: vec![HashMap::new(); n], local: vec![None; n] }
    }

    fn reset(&mut self) {
        self.local.iter_mut().for_each(|v| *v = None);
    }

    fn failure(&mut self, tuple: &[u32]) -> Option<Failure<T>> {
        self.reset();
        let v = self.node(self.sweep.compiled.root, tuple);
        self.sweep.failure(tuple, &v)
    }

    fn node(&mut self, id: usize, tuple: &[u32]) -> Arc<LambdaSeries<T>> {
        if let Some(v) = &self.local[id] {
            return v.clone();
        }
        let sweep = self.sweep;
        let compiled = sweep.compiled;
        let v = match &compiled.nodes[id] {
            Node::Arg(s) => sweep.args[*s][tuple[*s] as usize].clone(),
            node => {
                let key: Option<Key> =
                    sweep.cacheable[id].then(|| compiled.slots[id].iter().map(|&s| tuple[s]).collect());
                if let Some(hit) = key.as_ref().and_then(|k| self.caches[id].get(k)) {
                    hit.clone()
                } else {
                    let kids: SmallVec<[Arc<LambdaSeries<T>>; 4]> =
                        children(node).iter().map(|&c| self.node(c, tuple)).collect();
                    let annihilates = !matches!(node, Node::Sum(_)) && kids.iter().any(|k| k.is_zero());
                    let value = if annihilates {
                        LambdaSeries::zero(sweep.ctx.dim, sweep.ctx.order)
                    } else {
                        let refs: SmallVec<[&LambdaSeries<T>; 4]> = kids.iter().map(|k| &**k).collect();
                        compiled.combine(id, sweep.ctx, &refs)
                    };
                    let value = Arc::new(value);
                    if let Some(k) = key {
                        let cache = &mut self.caches[id];
                        if cache.len() >= CACHE_CAP {
                            cache.clear();
                        }
                        cache.insert(k, value.clone());
                    }
                    value
                }
            }
        };
        self.local[id] = Some(v.clone());
        v
    }
}

/// A node whose slots reach the root only through it and in which the
/// root is linear. Prefers the node covering the most slots.
fn find_separator<T: Scalar>(c: &Compiled<T>) -> Option<usize> {
    let arity = c.arity;
    let mut best: Option<(usize, usize)> = None;
    for (id, node) in c.nodes.iter().enumerate() {
        let k = c.slots[id].len();
        if id == c.root || matches!(node, Node::Arg(_)) || k < 2 || k >= arity {
            continue;
        }
        // slots of every node with `id` treated as a leaf without slots
        let mut reach: Vec<u64> = Vec::with_capacity(c.nodes.len());
        let mut degree: Vec<u32> = Vec::with_capacity(c.nodes.len());
        let mut linear = true;
        for (j, n) in c.nodes.iter().enumerate() {
            let (r, d) = if j == id {
                (0, 1)
            } else {
                match n {
                    Node::Arg(s) => (1u64 << s, 0),
                    Node::Sum(_) => {
                        let ks = children(n);
                        (ks.iter().fold(0, |a, &x| a | reach[x]), ks.iter().map(|&x| degree[x]).max().unwrap_or(0))
                    }
                    _ => {
                        let ks = children(n);
                        (ks.iter().fold(0, |a, &x| a | reach[x]), ks.iter().map(|&x| degree[x]).sum())
                    }
                }
            };
            linear &= d <= 1;
            reach.push(r);
            degree.push(d);
        }
        let mine = c.slots[id].iter().fold(0u64, |a, &s| a | (1 << s));
        if linear && degree[c.root] == 1 && reach[c.root] & mine == 0 && best.is_none_or(|(_, bk)| k > bk) {
            best = Some((id, k));
        }
    }
    best.map(|(id, _)| id)
}

/// Incremental reduced row echelon form over coordinates `(λ-order, monomial)`.
struct Echelon<T> {
    rows: Vec<((usize, MultiIndex), BTreeMap<(usize, MultiIndex), T>)>,
}

impl<T: Scalar> Echelon<T> {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    /// Adds `v` to the span; returns whether it was independent.
    fn insert(&mut self, v: &LambdaSeries<T>) -> bool {
        let mut vec: BTreeMap<(usize, MultiIndex), T> = BTreeMap::new();
        for (r, p) in v.coefficients().iter().enumerate() {
            for (m, c) in p.terms() {
                vec.insert((r, m.clone()), c.clone());
            }
        }
        for (pivot, row) in &self.rows {
            if let Some(c) = vec.get(pivot).cloned() {
                axpy(&mut vec, &c, row);
            }
        }
        let Some((pivot, lead)) = vec.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        for c in vec.values_mut() {
            *c = c.clone() / lead.clone();
        }
        for (_, row) in &mut self.rows {
            if let Some(c) = row.get(&pivot).cloned() {
                axpy(row, &c, &vec);
            }
        }
        self.rows.push((pivot, vec));
        true
    }
}

/// `dst -= c * src`, dropping zeros.
fn axpy<T: Scalar>(dst: &mut BTreeMap<(usize, MultiIndex), T>, c: &T, src: &BTreeMap<(usize, MultiIndex), T>) {
    for (k, x) in src {
        let delta = c.clone() * x.clone();
        match dst.get_mut(k) {
            Some(y) => {
                *y = y.clone() - delta;
                if y.is_zero() {
                    dst.remove(k);
                }
            }
            None => {
                dst.insert(k.clone(), -delta);
            }
        }
    }
}
