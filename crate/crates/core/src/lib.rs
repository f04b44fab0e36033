//! Exact truncated star products over polynomial algebras, Poisson
//! brackets, and monomial certificates for nearly-associative identities.
//!
//! Everything is generic over a [`Scalar`] field; [`Rational`] and the
//! aliases below fix it to arbitrary-precision rationals.

pub mod certificate;
pub mod diffop;
pub mod error;
pub mod expr;
pub mod gauge;
pub mod identities;
pub mod multi_index;
pub mod poisson;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod star;

pub use certificate::CertifyOptions;
pub use error::{Error, Result};
pub use identities::{Check, IdentityName, Status};
pub use multi_index::MultiIndex;
pub use scalar::Scalar;
pub use star::Association;

pub type Rational = num_rational::BigRational;
pub type Polynomial = poly::Polynomial<Rational>;
pub type LambdaSeries = series::LambdaSeries<Rational>;
pub type BidiffOperator = diffop::BidiffOperator<Rational>;
pub type BidiffTerm = diffop::BidiffTerm<Rational>;
pub type DiffOperator = diffop::DiffOperator<Rational>;
pub type Bivector = poisson::Bivector<Rational>;
pub type Covector = poisson::Covector<Rational>;
pub type JacobiatorTensor = poisson::JacobiatorTensor<Rational>;
pub type JacobiVerdict = poisson::JacobiVerdict<Rational>;
pub type StarProduct = star::StarProduct<Rational>;
pub type GaugeTransform = gauge::GaugeTransform<Rational>;
pub type Expr = expr::Expr<Rational>;
pub type EvalContext<'a> = expr::EvalContext<'a, Rational>;
pub type IdentityVerdict = identities::IdentityVerdict<Rational>;
pub type Witness = identities::Witness<Rational>;
pub type ProbeVerdict = star::ProbeVerdict<Rational>;
