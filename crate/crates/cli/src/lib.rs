//! Configuration, expression parsing, and report emission for the `naq`
//! command-line tool.

pub mod backstop;
pub mod config;
pub mod parse;
pub mod render;
pub mod session;

pub use config::{BivectorSpec, ConfigError, ProductSpec, SessionConfig};
pub use parse::{parse_poly_expr, ParseError, ParseErrorKind, StarExpr};
pub use render::render_poly;
pub use session::{eval_report, jacobiator_report, run_session, Report};
