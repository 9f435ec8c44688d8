//! Rule catalog (named equation schemas), rule instantiation and the linear solver.

mod solve;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::parser::parse;
use crate::subst::{self, Substitution, DEFAULT_STEP_LIMIT};

pub use solve::{solve_linear, solve_linear_with, solve_for};

/// A named equation schema `lhs = rhs` written with lazy operators and quoted nouns.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub name: String,
    pub schema: Expr,
    /// Symbols and function heads a substitution may bind.
    pub params: Vec<String>,
}

impl Rule {
    pub fn new(name: &str, schema: &str, params: &[&str]) -> Result<Self> {
        let schema = parse(schema)?;
        if schema.as_equation().is_none() {
            return Err(Error::wrong_shape("an equation", &schema));
        }
        Ok(Rule {
            name: name.to_string(),
            schema,
            params: params.iter().map(|p| p.to_string()).collect(),
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "schema": crate::json::to_value(&self.schema),
            "params": self.params,
        })
    }
}

/// A head that differentiation never looks into.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpaqueDecl {
    pub head: String,
    pub arity: usize,
}

static CATALOG: Lazy<Vec<Rule>> = Lazy::new(|| {
    let defs: &[(&str, &str, &[&str])] = &[
        (
            "RChain",
            "'diff(f(g(x)), x) = f'(g(x)) *. g'(x)",
            &["f", "f'", "g", "g'"],
        ),
        (
            "RProd",
            "'diff(f(x) *. g(x), x) = f(x) *. 'diff(g(x), x) +. g(x) *. 'diff(f(x), x)",
            &["f", "g"],
        ),
        (
            "RConstMul",
            "'diff(c *. f(x), x) = c *. 'diff(f(x), x)",
            &["c", "f"],
        ),
        ("RPot", "'diff(x^.n, x) = n *. x^.(n -. 1)", &["n"]),
        (
            "RSum",
            "'diff(f(x) +. g(x), x) = 'diff(f(x), x) +. 'diff(g(x), x)",
            &["f", "g"],
        ),
        ("RSin", "'diff(sin(x), x) = cos(x)", &[]),
        ("RCos", "'diff(cos(x), x) = -1 *. sin(x)", &[]),
        ("RTan", "'diff(tan(x), x) = 1 /. cos(x)^.2", &[]),
        ("RExp", "'diff(exp(x), x) = exp(x)", &[]),
        ("RLog", "'diff(log(x), x) = 1 /. x", &[]),
        ("RSqrt", "'diff(sqrt(x), x) = 1 /. (2 *. sqrt(x))", &[]),
    ];
    defs.iter()
        .map(|(n, s, p)| Rule::new(n, s, p).expect("catalog schemas parse"))
        .collect()
});

/// The builtin rules.
pub fn builtin_catalog() -> &'static [Rule] {
    &CATALOG
}

pub fn find_rule(name: &str) -> Result<&'static Rule> {
    CATALOG
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| Error::UnknownRule(name.to_string()))
}

/// The catalog as JSON for clients that list rules.
pub fn catalog_json() -> Value {
    Value::Array(CATALOG.iter().map(Rule::to_json).collect())
}

/// Apply `s` to the schema of `r` without simplifying.
pub fn instantiate_rule(r: &Rule, s: &Substitution) -> Result<Expr> {
    for b in &s.bindings {
        if !r.params.iter().any(|p| p == b.lhs.head()) {
            return Err(Error::ForeignBinding(b.lhs.head().to_string(), r.name.clone()));
        }
    }
    Ok(subst::apply_subst_raw(&r.schema, s, DEFAULT_STEP_LIMIT)?.output)
}
