//! Exact symbolic expression engine.
//!
//! Expressions are immutable trees with exact rational constants. On top of them the crate
//! provides a controllable simplifier (lazy operators and quoted nouns are left alone),
//! parallel substitution with function patterns and capture-avoiding beta reduction,
//! path-addressed holes for exercise generation, a checker for justified derivations,
//! finite set-comprehension evaluation with trace trees, and ASCII/LaTeX/JSON renderers.
//!
//! ```
//! use mex_core::{parse, simplify::simplify_default};
//!
//! let e = parse("2+3+4*x+5*x").unwrap();
//! assert_eq!(simplify_default(&e).unwrap(), parse("9*x + 5").unwrap());
//! ```

pub mod comprehension;
pub mod derivation;
pub mod error;
pub mod expr;
pub mod json;
pub mod parser;
pub mod paths;
pub mod registry;
pub mod render;
pub mod rules;
pub mod session;
pub mod simplify;
pub mod subst;

pub use error::{Error, Result, SourceSpan};
pub use expr::{expr_equal, free_variables, Expr, Rational};
pub use parser::{parse, parse_statement};
pub use registry::{OperatorDef, OperatorRegistry};
