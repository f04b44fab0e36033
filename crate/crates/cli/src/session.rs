//! Running a session and the report it emits.

use crate::backstop::{backstop, BackstopOutcome};
use crate::config::{ConfigError, SessionConfig};
use crate::parse::StarExpr;
use crate::render::{bivector_matrix, operator_terms, render_poly, render_rational, TermSpec};
use naq_core::identities::run_check;
use naq_core::{Bivector, CertifyOptions, EvalContext, IdentityVerdict, JacobiVerdict, Status};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::Path;
use std::time::Instant;

pub const ENGINE_VERSION: &str = concat!("naq ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub engine_version: &'static str,
    pub config: SessionConfig,
    pub bivector: Vec<Vec<String>>,
    pub product: ProductDump,
    pub bracket_diagnostics: BracketDiagnostics,
    pub checks: Vec<VerdictReport>,
    pub backstop: BackstopReport,
    pub outcome: Outcome,
    pub timing: Timing,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductDump {
    pub truncation_order: usize,
    /// `corrections[r - 1]` is `C_r`.
    pub corrections: Vec<Vec<TermSpec>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketDiagnostics {
    pub jacobi: JacobiReport,
    pub malcev: VerdictReport,
    pub shestakov: VerdictReport,
    pub shestakov_linearized: VerdictReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiReport {
    pub status: &'static str,
    /// One-based `(i, j, k)` of a nonzero `J^{ijk}`, a point, and its value there.
    pub witness: Option<JacobiWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiWitness {
    pub indices: [usize; 3],
    pub point: Vec<String>,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub identity: &'static str,
    pub status: &'static str,
    pub certificate_degree: u32,
    pub slot_degrees: Vec<u32>,
    pub lambda_orders_checked: usize,
    pub tuples_checked: u64,
    pub witness: Option<WitnessReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub form: &'static str,
    pub args: Vec<SlotValue>,
    pub lambda_order: usize,
    pub defect: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlotValue {
    pub slot: &'static str,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BackstopReport {
    pub seed: u64,
    pub tuples_per_verdict: u32,
    pub entries: Vec<BackstopEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BackstopEntry {
    pub identity: &'static str,
    #[serde(flatten)]
    pub outcome: BackstopOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// No requested check failed.
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

impl VerdictReport {
    pub fn from_verdict(v: &IdentityVerdict) -> Self {
        VerdictReport {
            identity: v.identity.as_str(),
            status: v.status.as_str(),
            certificate_degree: v.certificate_degree,
            slot_degrees: v.slot_degrees.clone(),
            lambda_orders_checked: v.lambda_orders_checked,
            tuples_checked: v.tuples_checked,
            witness: v.witness.as_ref().map(|w| WitnessReport {
                form: w.form,
                args: w.slots.iter().zip(&w.args).map(|(s, a)| SlotValue { slot: s, value: render_poly(a) }).collect(),
                lambda_order: w.lambda_order,
                defect: render_poly(&w.defect),
            }),
        }
    }
}

impl Report {
    /// 0 when every requested check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn jacobi_report(p: &Bivector) -> JacobiReport {
    match p.jacobi_check() {
        JacobiVerdict::Holds => JacobiReport { status: "holds", witness: None },
        JacobiVerdict::Fails { indices: (i, j, k), point, value } => JacobiReport {
            status: "fails",
            witness: Some(JacobiWitness {
                indices: [i + 1, j + 1, k + 1],
                point: point.iter().map(render_rational).collect(),
                value: render_rational(&value),
            }),
        },
    }
}

/// Builds the bivector and product, runs the bracket diagnostics, then the
/// requested checks, then the randomized backstop on every holding verdict.
/// `base` resolves relative paths in the config.
pub fn run_session(config: &SessionConfig, base: &Path) -> Result<Report, ConfigError> {
    let start = Instant::now();
    config.validate()?;
    let checks = config.requested_checks()?;
    let p = config.build_bivector()?;
    let s = config.build_product(&p, base)?;

    let bound = config.certificate_degree_override;
    let malcev = p.malcev_check(bound)?;
    let shestakov = p.shestakov_check(bound)?;
    let bracket_verdicts = [malcev, shestakov.identity, shestakov.linearized];

    let opts = CertifyOptions { degree_override: bound, ..CertifyOptions::default() };
    let mut verdicts = Vec::new();
    for check in checks {
        verdicts.extend(run_check(check, &s, &opts)?);
    }
    let failed = verdicts.iter().any(|v| v.status == Status::Fails);

    let mut rng = ChaCha8Rng::seed_from_u64(config.corpus_seed);
    let mut entries = Vec::new();
    let bracket_ctx = EvalContext::bracket_only(&p);
    let product_ctx = EvalContext::for_product(&s);
    let runs = bracket_verdicts.iter().map(|v| (v, &bracket_ctx)).chain(verdicts.iter().map(|v| (v, &product_ctx)));
    for (v, ctx) in runs.filter(|(v, _)| v.holds()) {
        let outcome = backstop(v, ctx, config.backstop_tuples, &mut rng)?;
        entries.push(BackstopEntry { identity: v.identity.as_str(), outcome });
    }
    let violated = entries.iter().any(|e| e.outcome.violations > 0);

    let [malcev, shestakov, shestakov_linearized] = bracket_verdicts.map(|v| VerdictReport::from_verdict(&v));
    Ok(Report {
        engine_version: ENGINE_VERSION,
        config: config.clone(),
        bivector: bivector_matrix(&p),
        product: ProductDump {
            truncation_order: s.truncation_order(),
            corrections: s.corrections().iter().map(operator_terms).collect(),
        },
        bracket_diagnostics: BracketDiagnostics { jacobi: jacobi_report(&p), malcev, shestakov, shestakov_linearized },
        checks: verdicts.iter().map(VerdictReport::from_verdict).collect(),
        backstop: BackstopReport { seed: config.corpus_seed, tuples_per_verdict: config.backstop_tuples, entries },
        outcome: if failed || violated { Outcome::Fail } else { Outcome::Pass },
        timing: Timing { elapsed_ms: start.elapsed().as_millis() as u64 },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiatorReport {
    pub engine_version: &'static str,
    pub dimension: usize,
    pub vanishes: bool,
    /// Nonzero `J^{ijk}` with one-based `i < j < k`.
    pub entries: Vec<JacobiatorEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiatorEntry {
    pub indices: [usize; 3],
    pub value: String,
}

pub fn jacobiator_report(config: &SessionConfig) -> Result<JacobiatorReport, ConfigError> {
    let p = config.build_bivector()?;
    let tensor = p.jacobiator_tensor();
    let entries = tensor
        .nonzero_entries()
        .into_iter()
        .map(|((i, j, k), v)| JacobiatorEntry { indices: [i + 1, j + 1, k + 1], value: render_poly(v) })
        .collect();
    Ok(JacobiatorReport { engine_version: ENGINE_VERSION, dimension: p.dim(), vanishes: tensor.is_zero(), entries })
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    pub engine_version: &'static str,
    pub expr: String,
    pub truncation_order: usize,
    /// `coefficients[r]` is the `λ^r` coefficient.
    pub coefficients: Vec<String>,
}

pub fn eval_report(config: &SessionConfig, base: &Path, expr: &str) -> Result<EvalReport, ConfigError> {
    let p = config.build_bivector()?;
    let s = config.build_product(&p, base)?;
    let parsed = StarExpr::parse(expr, config.dimension)
        .map_err(|source| ConfigError::Parse { context: "expression".into(), source })?;
    let value = parsed.eval(&s)?;
    Ok(EvalReport {
        engine_version: ENGINE_VERSION,
        expr: expr.to_string(),
        truncation_order: s.truncation_order(),
        coefficients: value.coefficients().iter().map(render_poly).collect(),
    })
}
