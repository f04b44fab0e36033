//! The associator and the catalogue of nearly-associative identities.
//!
//! Identities that are not multilinear are certified through their
//! polarization. Their diagonal form is searched first so that a failure is
//! reported, when possible, on the identity as usually written.

use crate::certificate::{CertifyOptions, Failure, Sweep};
use crate::error::{Error, Result};
use crate::expr::{Compiled, EvalContext, Expr};
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::series::LambdaSeries;
use crate::star::{ProbeVerdict, StarProduct};
use std::fmt;

/// `A(f, g, h) = f ⋆ (g ⋆ h) − (f ⋆ g) ⋆ h`.
pub fn associator<T: Scalar>(
    s: &StarProduct<T>,
    f: &LambdaSeries<T>,
    g: &LambdaSeries<T>,
    h: &LambdaSeries<T>,
) -> Result<LambdaSeries<T>> {
    let left = s.star(f, &s.star(g, h)?)?;
    let right = s.star(&s.star(f, g)?, h)?;
    left.checked_sub(&right)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum IdentityName {
    Associative,
    Flexible,
    RightAlternative,
    RightMoufang,
    Alternative,
    Sandwich,
    SandwichSquare,
    Malcev,
    Shestakov,
    ShestakovLinearized,
}

impl IdentityName {
    pub const ALL: [IdentityName; 10] = [
        IdentityName::Associative,
        IdentityName::Flexible,
        IdentityName::RightAlternative,
        IdentityName::RightMoufang,
        IdentityName::Alternative,
        IdentityName::Sandwich,
        IdentityName::SandwichSquare,
        IdentityName::Malcev,
        IdentityName::Shestakov,
        IdentityName::ShestakovLinearized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityName::Associative => "associative",
            IdentityName::Flexible => "flexible",
            IdentityName::RightAlternative => "right_alternative",
            IdentityName::RightMoufang => "right_moufang",
            IdentityName::Alternative => "alternative",
            IdentityName::Sandwich => "sandwich",
            IdentityName::SandwichSquare => "sandwich_square",
            IdentityName::Malcev => "malcev",
            IdentityName::Shestakov => "shestakov",
            IdentityName::ShestakovLinearized => "shestakov_linearized",
        }
    }

    pub fn spec<T: Scalar>(self) -> IdentitySpec<T> {
        match self {
            IdentityName::Associative => associative(),
            IdentityName::Flexible => flexible(),
            IdentityName::RightAlternative => right_alternative(),
            IdentityName::RightMoufang => right_moufang(),
            IdentityName::Alternative => alternative(),
            IdentityName::Sandwich => sandwich(),
            IdentityName::SandwichSquare => sandwich_square(),
            IdentityName::Malcev => malcev(),
            IdentityName::Shestakov => shestakov(),
            IdentityName::ShestakovLinearized => shestakov_linearized(),
        }
    }
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One expression that must vanish, with named argument slots.
#[derive(Clone, Debug)]
pub struct IdentityForm<T> {
    pub label: &'static str,
    pub slots: Vec<&'static str>,
    pub expr: Expr<T>,
}

impl<T: Scalar> IdentityForm<T> {
    fn new(label: &'static str, slots: &[&'static str], expr: Expr<T>) -> Self {
        debug_assert!(expr.arity() <= slots.len());
        IdentityForm { label, slots: slots.to_vec(), expr }
    }

    /// The expression on polynomial arguments placed at `λ^0`.
    pub fn evaluate(&self, ctx: &EvalContext<'_, T>, args: &[Polynomial<T>]) -> Result<LambdaSeries<T>> {
        let series: Vec<LambdaSeries<T>> = args.iter().map(|p| LambdaSeries::from_poly(p.clone(), ctx.order)).collect();
        self.expr.eval(ctx, &series)
    }
}

/// An identity: all `forms` must vanish identically. `forms` are
/// multilinear; `diagonal` holds the same identity before polarization.
#[derive(Clone, Debug)]
pub struct IdentitySpec<T> {
    pub name: IdentityName,
    pub forms: Vec<IdentityForm<T>>,
    pub diagonal: Vec<IdentityForm<T>>,
}

impl<T: Scalar> IdentitySpec<T> {
    pub fn form(&self, label: &str) -> Option<&IdentityForm<T>> {
        self.forms.iter().chain(&self.diagonal).find(|f| f.label == label)
    }
}

type E<T> = Expr<T>;

fn a<T: Scalar>(i: usize) -> E<T> {
    E::arg(i)
}

fn assoc<T: Scalar>(x: E<T>, y: E<T>, z: E<T>) -> E<T> {
    E::associator(x, y, z)
}

pub fn associative<T: Scalar>() -> IdentitySpec<T> {
    IdentitySpec {
        name: IdentityName::Associative,
        forms: vec![IdentityForm::new("A(f,g,h)", &["f", "g", "h"], assoc(a(0), a(1), a(2)))],
        diagonal: Vec::new(),
    }
}

pub fn flexible<T: Scalar>() -> IdentitySpec<T> {
    IdentitySpec {
        name: IdentityName::Flexible,
        forms: vec![IdentityForm::new(
            "A(f,g,h) + A(h,g,f)",
            &["f", "g", "h"],
            E::add(assoc(a(0), a(1), a(2)), assoc(a(2), a(1), a(0))),
        )],
        diagonal: vec![IdentityForm::new("A(f,g,f)", &["f", "g"], assoc(a(0), a(1), a(0)))],
    }
}

pub fn right_alternative<T: Scalar>() -> IdentitySpec<T> {
    IdentitySpec {
        name: IdentityName::RightAlternative,
        forms: vec![right_alt_form()],
        diagonal: vec![IdentityForm::new("A(f,g,g)", &["f", "g"], assoc(a(0), a(1), a(1)))],
    }
}

fn right_alt_form<T: Scalar>() -> IdentityForm<T> {
    IdentityForm::new(
        "A(f,g,h) + A(f,h,g)",
        &["f", "g", "h"],
        E::add(assoc(a(0), a(1), a(2)), assoc(a(0), a(2), a(1))),
    )
}

/// `((f ⋆ g) ⋆ h) ⋆ k − f ⋆ ((g ⋆ h) ⋆ k)`.
fn moufang_part<T: Scalar>(f: E<T>, g: E<T>, h: E<T>, k: E<T>) -> E<T> {
    E::sub(
        E::star(E::star(E::star(f.clone(), g.clone()), h.clone()), k.clone()),
        E::star(f, E::star(E::star(g, h), k)),
    )
}

pub fn right_moufang<T: Scalar>() -> IdentitySpec<T> {
    IdentitySpec {
        name: IdentityName::RightMoufang,
        forms: vec![IdentityForm::new(
            "M(f,g1,h,g2) + M(f,g2,h,g1)",
            &["f", "g1", "g2", "h"],
            E::add(moufang_part(a(0), a(1), a(3), a(2)), moufang_part(a(0), a(2), a(3), a(1))),
        )],
        diagonal: vec![IdentityForm::new(
            "((f*g)*h)*g - f*((g*h)*g)",
            &["f", "g", "h"],
            moufang_part(a(0), a(1), a(2), a(1)),
        )],
    }
}

pub fn alternative<T: Scalar>() -> IdentitySpec<T> {
    IdentitySpec {
        name: IdentityName::Alternative,
        forms: vec![
            IdentityForm::new(
                "A(f,g,h) + A(g,f,h)",
                &["f", "g", "h"],
                E::add(assoc(a(0), a(1), a(2)), assoc(a(1), a(0), a(2))),
            ),
            right_alt_form(),
        ],
        diagonal: vec![
            IdentityForm::new("A(f,f,g)", &["f", "g"], assoc(a(0), a(0), a(1))),
            IdentityForm::new("A(f,g,g)", &["f", "g"], assoc(a(0), a(1), a(1))),
        ],
    }
}

/// `[g,h]_⋆ ⋆ [g,h]_⋆` polarized in both `g` and `h`.
fn polarized_square<T: Scalar>(g1: usize, g2: usize, h1: usize, h2: usize) -> E<T> {
    let c = |g: usize, h: usize| E::commutator(a(g), a(h));
    E::sum([
        E::star(c(g1, h1), c(g2, h2)),
        E::star(c(g2, h2), c(g1, h1)),
        E::star(c(g1, h2), c(g2, h1)),
        E::star(c(g2, h1), c(g1, h2)),
    ])
}

fn diagonal_sandwich<T: Scalar>() -> E<T> {
    let c = E::commutator(a(0), a(1));
    assoc(E::star(c.clone(), c), a(2), a(3))
}

pub fn sandwich<T: Scalar>() -> IdentitySpec<T> {
    IdentitySpec {
        name: IdentityName::Sandwich,
        forms: vec![IdentityForm::new(
            "A(X(g1,g2,h1,h2),r,s)",
            &["g1", "g2", "h1", "h2", "r", "s"],
            assoc(polarized_square(0, 1, 2, 3), a(4), a(5)),
        )],
        diagonal: vec![IdentityForm::new("A([g,h]^2,r,s)", &["g", "h", "r", "s"], diagonal_sandwich())],
    }
}

/// Decided from [`sandwich`]; it carries only the diagonal expression.
pub fn sandwich_square<T: Scalar>() -> IdentitySpec<T> {
    let inner = diagonal_sandwich::<T>();
    IdentitySpec {
        name: IdentityName::SandwichSquare,
        forms: Vec::new(),
        diagonal: vec![IdentityForm::new("A([g,h]^2,r,s)^2", &["g", "h", "r", "s"], E::star(inner.clone(), inner))],
    }
}

pub fn malcev<T: Scalar>() -> IdentitySpec<T> {
    let j = |x: E<T>, y: E<T>, z: E<T>| E::jacobiator(x, y, z);
    let b = |x: E<T>, y: E<T>| E::bracket(x, y);
    let part = |h: usize, k: usize| {
        E::sub(j(a(h), a(2), b(a(k), a(3))), b(j(a(h), a(2), a(3)), a(k)))
    };
    IdentitySpec {
        name: IdentityName::Malcev,
        forms: vec![IdentityForm::new(
            "{h1,f,{h2,g}} + {h2,f,{h1,g}} - {{h1,f,g},h2} - {{h2,f,g},h1}",
            &["h1", "h2", "f", "g"],
            E::add(part(0, 1), part(1, 0)),
        )],
        diagonal: vec![IdentityForm::new(
            "{h,f,{h,g}} - {{h,f,g},h}",
            &["f", "g", "h"],
            E::sub(j(a(2), a(0), b(a(2), a(1))), b(j(a(2), a(0), a(1)), a(2))),
        )],
    }
}

/// `Σ {f_a, g_b, h}·{f_a', g_b'}` over the two ways to pair the copies.
fn shestakov_polarized<T: Scalar>() -> E<T> {
    let term = |f: usize, g: usize, f2: usize, g2: usize| {
        E::pointwise(E::jacobiator(a(f), a(g), a(4)), E::bracket(a(f2), a(g2)))
    };
    E::sum([term(0, 2, 1, 3), term(0, 3, 1, 2), term(1, 2, 0, 3), term(1, 3, 0, 2)])
}

pub fn shestakov<T: Scalar>() -> IdentitySpec<T> {
    IdentitySpec {
        name: IdentityName::Shestakov,
        forms: vec![IdentityForm::new(
            "sum {fa,gb,h}.{fa',gb'}",
            &["f1", "f2", "g1", "g2", "h"],
            shestakov_polarized(),
        )],
        diagonal: vec![IdentityForm::new(
            "{f,g,h}.{f,g}",
            &["f", "g", "h"],
            E::pointwise(E::jacobiator(a(0), a(1), a(2)), E::bracket(a(0), a(1))),
        )],
    }
}

/// The linearization in `g` polarizes further in `f` to the same
/// multilinear form as [`shestakov`].
pub fn shestakov_linearized<T: Scalar>() -> IdentitySpec<T> {
    let j = |x, y, z| E::jacobiator(a(x), a(y), a(z));
    let b = |x, y| E::bracket(a(x), a(y));
    IdentitySpec {
        name: IdentityName::ShestakovLinearized,
        forms: vec![IdentityForm::new(
            "sum {fa,g,h}.{fa',d} + {fa,d,h}.{fa',g}",
            &["f1", "f2", "g", "d", "h"],
            shestakov_polarized(),
        )],
        diagonal: vec![IdentityForm::new(
            "{f,g,h}.{f,d} + {f,d,h}.{f,g}",
            &["f", "g", "d", "h"],
            E::add(E::pointwise(j(0, 1, 3), b(0, 2)), E::pointwise(j(0, 2, 3), b(0, 1))),
        )],
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Status {
    /// Every monomial tuple within the certificate bounds gave zero, which
    /// proves the identity for all polynomial arguments.
    HoldsOnCertificate,
    Fails,
    /// Truncation leaves no order at which the answer shows.
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::HoldsOnCertificate => "holds-on-certificate",
            Status::Fails => "fails",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// Arguments on which a form is nonzero, with the lowest nonzero order of
/// the defect and its coefficient there.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Witness<T> {
    pub form: &'static str,
    pub slots: Vec<&'static str>,
    pub args: Vec<Polynomial<T>>,
    pub lambda_order: usize,
    pub defect: Polynomial<T>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IdentityVerdict<T> {
    pub identity: IdentityName,
    pub status: Status,
    /// Largest per-slot degree bound over the certified forms.
    pub certificate_degree: u32,
    /// Per-slot bounds of the first certified form.
    pub slot_degrees: Vec<u32>,
    /// Orders `0..=lambda_orders_checked` were inspected.
    pub lambda_orders_checked: usize,
    pub tuples_checked: u64,
    pub witness: Option<Witness<T>>,
}

impl<T: Scalar> IdentityVerdict<T> {
    pub fn holds(&self) -> bool {
        self.status == Status::HoldsOnCertificate
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }

    /// Re-evaluates the witness and compares with the stored defect.
    pub fn verify(&self, ctx: &EvalContext<'_, T>) -> Result<bool> {
        let Some(w) = &self.witness else { return Ok(!self.fails()) };
        verify_witness(self.identity, ctx, w)
    }
}

pub fn verify_witness<T: Scalar>(name: IdentityName, ctx: &EvalContext<'_, T>, w: &Witness<T>) -> Result<bool> {
    let spec = name.spec::<T>();
    let Some(form) = spec.form(w.form) else { return Ok(false) };
    let value = form.evaluate(ctx, &w.args)?;
    Ok(match value.lowest_order() {
        Some((r, p)) => r == w.lambda_order && *p == w.defect && !w.defect.is_zero(),
        None => false,
    })
}

fn witness_from<T: Scalar>(form: &IdentityForm<T>, f: Failure<T>) -> Witness<T> {
    Witness {
        form: form.label,
        slots: form.slots.clone(),
        args: f.args.into_iter().map(|m| Polynomial::monomial(m, T::one())).collect(),
        lambda_order: f.lambda_order,
        defect: f.defect,
    }
}

/// Certifies `spec` in `ctx`. Each form must be multilinear.
pub fn certify<T: Scalar>(spec: &IdentitySpec<T>, ctx: &EvalContext<'_, T>, opts: &CertifyOptions) -> Result<IdentityVerdict<T>> {
    let profile = ctx.order_profile();
    let compiled: Vec<Compiled<T>> = spec.forms.iter().map(|f| Compiled::new(&f.expr)).collect();
    let diagonal: Vec<Compiled<T>> = spec.diagonal.iter().map(|f| Compiled::new(&f.expr)).collect();
    for c in compiled.iter().chain(&diagonal) {
        ctx.validate(c)?;
    }
    let mut bounds = Vec::with_capacity(compiled.len());
    for c in &compiled {
        bounds.push(opts.apply(c.certificate_degree(&profile))?);
    }
    // an override asks for the whole box
    let total = |c: &Compiled<T>, b: &[u32]| match opts.degree_override {
        Some(_) => b.iter().sum(),
        None => c.total_degree(&profile),
    };
    let mut verdict = IdentityVerdict {
        identity: spec.name,
        status: Status::HoldsOnCertificate,
        certificate_degree: bounds.iter().flatten().copied().max().unwrap_or(0),
        slot_degrees: bounds.first().cloned().unwrap_or_default(),
        lambda_orders_checked: ctx.order,
        tuples_checked: 0,
        witness: None,
    };
    let relaxed = CertifyOptions { require_override_sufficient: false, ..opts.clone() };
    for (form, c) in spec.diagonal.iter().zip(&diagonal) {
        let b = relaxed.apply(c.certificate_degree(&profile))?;
        let cap = total(c, &b);
        let out = Sweep::new(c, ctx, b, cap).find_first(Some(opts.diagonal_search_limit));
        verdict.tuples_checked += out.tuples;
        if let Some(f) = out.failure {
            verdict.status = Status::Fails;
            verdict.witness = Some(witness_from(form, f));
            return Ok(verdict);
        }
    }
    for ((form, c), b) in spec.forms.iter().zip(&compiled).zip(bounds) {
        let cap = total(c, &b);
        let out = Sweep::new(c, ctx, b, cap).decide();
        verdict.tuples_checked += out.tuples;
        if let Some(f) = out.failure {
            verdict.status = Status::Fails;
            verdict.witness = Some(witness_from(form, f));
            return Ok(verdict);
        }
    }
    Ok(verdict)
}

/// Bracket identities are certified in a context without a product.
pub fn certify_bracket_identity<T: Scalar>(
    spec: &IdentitySpec<T>,
    ctx: &EvalContext<'_, T>,
    opts: &CertifyOptions,
) -> Result<IdentityVerdict<T>> {
    certify(spec, ctx, opts)
}

/// The checks that can be requested against a star product.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Check {
    Associative,
    Flexible,
    /// Yields the right alternative and right Moufang verdicts.
    RightAlternative,
    Alternative,
    /// Yields the sandwich identity and its square.
    Sandwich,
}

impl Check {
    pub const ALL: [Check; 5] = [Check::Associative, Check::Flexible, Check::RightAlternative, Check::Alternative, Check::Sandwich];

    pub fn as_str(self) -> &'static str {
        match self {
            Check::Associative => "associative",
            Check::Flexible => "flexible",
            Check::RightAlternative => "right_alternative",
            Check::Alternative => "alternative",
            Check::Sandwich => "sandwich",
        }
    }
}

pub fn run_check<T: Scalar>(check: Check, s: &StarProduct<T>, opts: &CertifyOptions) -> Result<Vec<IdentityVerdict<T>>> {
    let ctx = EvalContext::for_product(s);
    Ok(match check {
        Check::Associative => vec![certify(&associative(), &ctx, opts)?],
        Check::Flexible => vec![certify(&flexible(), &ctx, opts)?],
        Check::RightAlternative => {
            vec![certify(&right_alternative(), &ctx, opts)?, certify(&right_moufang(), &ctx, opts)?]
        }
        Check::Alternative => vec![certify(&alternative(), &ctx, opts)?],
        Check::Sandwich => {
            let plain = certify(&sandwich(), &ctx, opts)?;
            let squared = square_verdict(&ctx, &plain)?;
            vec![plain, squared]
        }
    })
}

fn check_one<T: Scalar>(check: Check, s: &StarProduct<T>) -> Vec<IdentityVerdict<T>> {
    run_check(check, s, &CertifyOptions::default()).expect("product context with default options")
}

pub fn check_associative<T: Scalar>(s: &StarProduct<T>) -> IdentityVerdict<T> {
    check_one(Check::Associative, s).remove(0)
}

pub fn check_flexible<T: Scalar>(s: &StarProduct<T>) -> IdentityVerdict<T> {
    check_one(Check::Flexible, s).remove(0)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RightAlternativeVerdict<T> {
    pub right_alternative: IdentityVerdict<T>,
    pub moufang: IdentityVerdict<T>,
}

pub fn check_right_alternative<T: Scalar>(s: &StarProduct<T>) -> RightAlternativeVerdict<T> {
    let mut v = check_one(Check::RightAlternative, s);
    let moufang = v.pop().expect("two verdicts");
    RightAlternativeVerdict { right_alternative: v.pop().expect("two verdicts"), moufang }
}

pub fn check_alternative<T: Scalar>(s: &StarProduct<T>) -> IdentityVerdict<T> {
    check_one(Check::Alternative, s).remove(0)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SandwichVerdict<T> {
    pub sandwich: IdentityVerdict<T>,
    pub square: IdentityVerdict<T>,
}

pub fn check_sandwich_identity<T: Scalar>(s: &StarProduct<T>) -> SandwichVerdict<T> {
    let mut v = check_one(Check::Sandwich, s);
    let square = v.pop().expect("two verdicts");
    SandwichVerdict { sandwich: v.pop().expect("two verdicts"), square }
}

/// The square of the sandwich associator. It vanishes when the associator
/// does; otherwise a diagonal witness with lowest order `r` squares to a
/// nonzero `λ^{2r}` coefficient, visible when `2r <= K`.
fn square_verdict<T: Scalar>(ctx: &EvalContext<'_, T>, plain: &IdentityVerdict<T>) -> Result<IdentityVerdict<T>> {
    let spec = sandwich_square::<T>();
    let mut verdict = IdentityVerdict { identity: IdentityName::SandwichSquare, witness: None, ..plain.clone() };
    let Some(w) = &plain.witness else { return Ok(verdict) };
    let diag = sandwich::<T>();
    let diag_form = &diag.diagonal[0];
    let args = if w.form == diag_form.label {
        Some(w.args.clone())
    } else {
        diagonalize(ctx, diag_form, &w.args)?
    };
    let square = &spec.diagonal[0];
    verdict.status = Status::Inconclusive;
    if let Some(args) = args {
        let value = square.evaluate(ctx, &args)?;
        if let Some((r, p)) = value.lowest_order() {
            verdict.status = Status::Fails;
            verdict.witness = Some(Witness {
                form: square.label,
                slots: square.slots.clone(),
                args,
                lambda_order: r,
                defect: p.clone(),
            });
        }
    }
    Ok(verdict)
}

/// Finds `g = a1 g1 + a2 g2`, `h = b1 h1 + b2 h2` with small integer weights
/// on which the diagonal sandwich is nonzero, lowest order first.
fn diagonalize<T: Scalar>(
    ctx: &EvalContext<'_, T>,
    form: &IdentityForm<T>,
    polarized: &[Polynomial<T>],
) -> Result<Option<Vec<Polynomial<T>>>> {
    let (g1, g2, h1, h2) = (&polarized[0], &polarized[1], &polarized[2], &polarized[3]);
    let mut best: Option<(usize, Vec<Polynomial<T>>)> = None;
    for w in 0..81u32 {
        let c: Vec<T> = (0..4).map(|i| T::from_count(((w / 3u32.pow(i)) % 3) as u64)).collect();
        let g = &g1.scale(&c[0]) + &g2.scale(&c[1]);
        let h = &h1.scale(&c[2]) + &h2.scale(&c[3]);
        let args = vec![g, h, polarized[4].clone(), polarized[5].clone()];
        if let Some((r, _)) = form.evaluate(ctx, &args)?.lowest_order() {
            if best.as_ref().is_none_or(|(br, _)| r < *br) {
                best = Some((r, args));
            }
        }
    }
    Ok(best.map(|(_, a)| a))
}

/// Outcome of [`cross_check_nilpotency`]. Any entry in `failures` means the
/// product is broken, since no element of a star product is nilpotent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NilpotencyReport<T> {
    pub passes: usize,
    pub inconclusive: usize,
    pub failures: Vec<(usize, u32, ProbeVerdict<T>)>,
}

/// Runs the nilpotency probe on every corpus element for `k = 2..=⌊K/r⌋`,
/// `r` the lowest order of the element. When `⌊K/r⌋ < 2` the probe at `k = 2`
/// is still recorded (as inconclusive); elements with `r = 0` use
/// `k = 2..=max(K, 2)`.
pub fn cross_check_nilpotency<T: Scalar>(s: &StarProduct<T>, corpus: &[LambdaSeries<T>]) -> Result<NilpotencyReport<T>> {
    let k_order = s.truncation_order();
    let mut report = NilpotencyReport { passes: 0, inconclusive: 0, failures: Vec::new() };
    for (i, f) in corpus.iter().enumerate() {
        let (r, _) = f.lowest_order().ok_or(Error::ZeroElement)?;
        let top = if r == 0 { k_order.max(2) } else { (k_order / r).max(2) };
        for k in 2..=top as u32 {
            match s.nilpotency_probe(f, k)? {
                ProbeVerdict::Pass { .. } => report.passes += 1,
                ProbeVerdict::Inconclusive { .. } => report.inconclusive += 1,
                fail => report.failures.push((i, k, fail)),
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::Bivector;
    use crate::Rational;

    type P = Polynomial<Rational>;
    type S = LambdaSeries<Rational>;

    fn x(dim: usize, i: usize) -> P {
        P::var(dim, i)
    }

    fn monopole() -> Bivector<Rational> {
        Bivector::monopole_radial()
    }

    #[test]
    fn flexible_associator_is_the_bracket_defect_at_second_order() {
        let p = Bivector::<Rational>::su2();
        let s = StarProduct::flexible(&p, 2).unwrap();
        let (f, g, h) = (x(3, 0), x(3, 1), &x(3, 0) * &x(3, 2));
        let lift = |q: &P| S::from_poly(q.clone(), 2);
        let got = associator(&s, &lift(&f), &lift(&g), &lift(&h)).unwrap();
        let expected = &p.bracket(&f, &p.bracket(&g, &h).unwrap()).unwrap() - &p.bracket(&p.bracket(&f, &g).unwrap(), &h).unwrap();
        assert!(got.coefficient(0).is_zero() && got.coefficient(1).is_zero());
        assert_eq!(got.coefficient(2), expected);
        let one = lift(&P::one(3));
        assert!(associator(&s, &one, &lift(&g), &lift(&h)).unwrap().is_zero());
    }

    #[test]
    fn moyal_is_associative() {
        let s = StarProduct::moyal(&Bivector::<Rational>::symplectic(1), 3).unwrap();
        let v = check_associative(&s);
        assert!(v.holds());
        assert_eq!(v.slot_degrees, vec![3, 3, 3]);
        assert_eq!(v.lambda_orders_checked, 3);
    }

    #[test]
    fn flexible_product_on_monopole() {
        let s = StarProduct::flexible(&monopole(), 2).unwrap();
        let ctx = EvalContext::for_product(&s);
        let assoc = check_associative(&s);
        assert!(assoc.fails());
        let w = assoc.witness.as_ref().unwrap();
        assert_eq!(w.lambda_order, 2);
        assert!(w.args.iter().all(|a| a.degree() <= Some(1)));
        assert!(assoc.verify(&ctx).unwrap());
        assert!(check_flexible(&s).holds());
        let ra = check_right_alternative(&s);
        assert!(ra.right_alternative.fails());
        assert!(ra.right_alternative.verify(&ctx).unwrap());
        assert!(check_alternative(&s).fails());
    }

    #[test]
    fn flexible_product_on_su2_is_not_associative() {
        let s = StarProduct::flexible(&Bivector::<Rational>::su2(), 2).unwrap();
        assert!(check_associative(&s).fails());
        assert!(check_alternative(&s).fails());
        assert!(check_flexible(&s).holds());
    }

    #[test]
    fn zero_bivector_gives_pointwise_product() {
        let s = StarProduct::flexible(&Bivector::<Rational>::zero(2), 2).unwrap();
        for check in Check::ALL {
            for v in run_check(check, &s, &CertifyOptions::default()).unwrap() {
                assert!(v.holds(), "{}", v.identity);
            }
        }
    }

    #[test]
    fn sandwich_on_flexible_monopole_fails_at_fourth_order() {
        let s = StarProduct::flexible(&monopole(), 4).unwrap();
        let ctx = EvalContext::for_product(&s);
        let v = check_sandwich_identity(&s);
        assert!(v.sandwich.fails());
        let w = v.sandwich.witness.as_ref().unwrap();
        assert_eq!(w.form, "A([g,h]^2,r,s)");
        assert_eq!(w.lambda_order, 4);
        assert!(v.sandwich.verify(&ctx).unwrap());
        // the square would start at λ^8
        assert_eq!(v.square.status, Status::Inconclusive);
    }

    #[test]
    fn sandwich_square_fails_when_truncation_allows() {
        // C_1 = P∂⊗∂ with C_2(f,g) = ∂1² f · ∂2 g is not associative at λ^2
        use crate::diffop::{BidiffOperator, BidiffTerm};
        use crate::multi_index::MultiIndex;
        let p = Bivector::<Rational>::symplectic(1);
        let c1 = p.bracket_operator();
        let c2 = BidiffOperator::from_terms(
            2,
            [BidiffTerm { coefficient: P::one(2), left: MultiIndex::from_slice(&[2, 0]), right: MultiIndex::unit(2, 1) }],
        )
        .unwrap();
        let s = StarProduct::custom(&p, vec![c1, c2], 4).unwrap();
        let ctx = EvalContext::for_product(&s);
        let v = check_sandwich_identity(&s);
        assert!(v.sandwich.fails());
        let r = v.sandwich.witness.as_ref().unwrap().lambda_order;
        if 2 * r <= 4 {
            assert!(v.square.fails());
            assert_eq!(v.square.witness.as_ref().unwrap().lambda_order, 2 * r);
            assert!(v.square.verify(&ctx).unwrap());
        } else {
            assert_eq!(v.square.status, Status::Inconclusive);
        }
    }

    #[test]
    fn malcev_and_shestakov_on_monopole() {
        let p = monopole();
        let m = p.malcev_check(None).unwrap();
        assert!(m.fails());
        assert!(m.verify(&EvalContext::bracket_only(&p)).unwrap());
        let sh = p.shestakov_check(None).unwrap();
        assert!(sh.identity.fails());
        let lin = &sh.linearized;
        assert!(lin.fails());
        let w = lin.witness.as_ref().unwrap();
        assert_eq!(w.slots, vec!["f", "g", "d", "h"]);
        assert!(lin.verify(&EvalContext::bracket_only(&p)).unwrap());
    }

    #[test]
    fn malcev_holds_for_lie_brackets() {
        for p in [Bivector::<Rational>::su2(), Bivector::heisenberg(), Bivector::symplectic(1), Bivector::zero(2)] {
            let m = p.malcev_check(None).unwrap();
            assert!(m.holds());
            assert_eq!(m.certificate_degree, 2);
            assert!(p.shestakov_check(None).unwrap().identity.holds());
        }
    }

    #[test]
    fn insufficient_bound_is_rejected() {
        let p = Bivector::<Rational>::su2();
        assert_eq!(p.malcev_check(Some(1)), Err(Error::InsufficientDegree { given: 1, required: 2 }));
        assert!(p.malcev_check(Some(3)).unwrap().holds());
    }

    #[test]
    fn bracket_identity_needs_a_bivector_and_star_needs_a_product() {
        let p = Bivector::<Rational>::su2();
        let ctx = EvalContext::bracket_only(&p);
        assert_eq!(certify(&associative::<Rational>(), &ctx, &CertifyOptions::default()), Err(Error::NoProduct));
    }

    #[test]
    fn nilpotency_corpus_has_no_failures() {
        let s = StarProduct::flexible(&Bivector::<Rational>::su2(), 4).unwrap();
        let corpus = vec![
            S::from_poly(x(3, 0), 4),
            &S::from_poly(P::one(3), 4) + &S::lambda_pow(x(3, 1), 1, 4),
            S::lambda_pow(x(3, 2), 2, 4),
        ];
        let report = cross_check_nilpotency(&s, &corpus).unwrap();
        assert!(report.failures.is_empty());
        assert!(report.passes > 0);
        assert_eq!(cross_check_nilpotency(&s, &[S::zero(3, 4)]), Err(Error::ZeroElement));
    }
}
