//! Randomized arguments beyond the certificate bound.

use naq_core::{EvalContext, IdentityVerdict, MultiIndex, Polynomial, Rational};
use rand::Rng;

/// A polynomial of exact degree `degree` with `extra` further terms of
/// lower or equal degree and small rational coefficients.
pub fn random_poly<R: Rng>(rng: &mut R, dim: usize, degree: u32, extra: usize) -> Polynomial {
    let mut terms = vec![(random_monomial(rng, dim, degree), nonzero_coefficient(rng))];
    for _ in 0..extra {
        let d = rng.gen_range(0..=degree);
        terms.push((random_monomial(rng, dim, d), nonzero_coefficient(rng)));
    }
    let p = Polynomial::from_terms(dim, terms);
    if p.degree() == Some(degree) {
        p
    } else {
        // the lead term cancelled against an extra term
        random_poly(rng, dim, degree, extra)
    }
}

fn random_monomial<R: Rng>(rng: &mut R, dim: usize, degree: u32) -> MultiIndex {
    let mut e = vec![0u32; dim];
    for _ in 0..degree {
        e[rng.gen_range(0..dim)] += 1;
    }
    MultiIndex::from_slice(&e)
}

fn nonzero_coefficient<R: Rng>(rng: &mut R) -> Rational {
    let n: i64 = if rng.gen_bool(0.5) { rng.gen_range(1..=3) } else { -rng.gen_range(1..=3) };
    Rational::new(n.into(), rng.gen_range(1i64..=3).into())
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BackstopOutcome {
    pub tuples: u64,
    pub violations: u64,
}

/// Evaluates every multilinear form of the verdict's identity (its diagonal
/// form when it has none) on `tuples` random tuples whose slots all have
/// degree strictly above the certificate degree.
pub fn backstop<R: Rng>(
    verdict: &IdentityVerdict,
    ctx: &EvalContext<'_>,
    tuples: u32,
    rng: &mut R,
) -> naq_core::Result<BackstopOutcome> {
    let spec = verdict.identity.spec::<Rational>();
    let forms = if spec.forms.is_empty() { &spec.diagonal } else { &spec.forms };
    let mut out = BackstopOutcome { tuples: 0, violations: 0 };
    for _ in 0..tuples {
        for form in forms {
            let args: Vec<Polynomial> = (0..form.slots.len())
                .map(|_| {
                    let degree = verdict.certificate_degree + rng.gen_range(1..=2);
                    random_poly(rng, ctx.dim, degree, 1)
                })
                .collect();
            out.tuples += 1;
            if !form.evaluate(ctx, &args)?.is_zero() {
                out.violations += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_polys_have_the_requested_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 0..6 {
            assert_eq!(random_poly(&mut rng, 3, d, 2).degree(), Some(d));
        }
    }
}
