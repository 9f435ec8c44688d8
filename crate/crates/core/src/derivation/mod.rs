//! Derivation documents: numbered equality steps with particles and justifications.
//!
//! A document mirrors the L/M/R tables used on the blackboard: a particle column
//! (`if`, `then`, `and`), the equalities, and a justification column. A step without an
//! explicit left side continues from the previous right side.

mod check;
pub mod corpus;
mod expand;
mod text;

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::simplify::Definitions;
use crate::subst::Substitution;

pub use check::{check_derivation, check_step, Report, StepStatus, StepVerdict};
pub use expand::{diff_highlight, expand_step, HighlightPair};
pub use text::{parse_text, to_text};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Particle {
    If,
    Then,
    And,
    None,
}

impl Particle {
    pub fn as_str(self) -> &'static str {
        match self {
            Particle::If => "if",
            Particle::Then => "then",
            Particle::And => "and",
            Particle::None => "none",
        }
    }

    pub fn parse(s: &str) -> Result<Particle> {
        match s.to_ascii_lowercase().as_str() {
            "if" => Ok(Particle::If),
            "then" => Ok(Particle::Then),
            "and" => Ok(Particle::And),
            "none" | "" => Ok(Particle::None),
            other => Err(Error::MalformedStep(format!("unknown particle `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Justification {
    /// A hypothesis, usually introduced by `if`.
    Assumption,
    /// Plain arithmetic.
    Simplify,
    /// Replace a subterm by the other side of a referenced equality.
    RewriteBy(Vec<String>),
    /// Symmetry and transitivity over the referenced equalities.
    Chain(Vec<String>),
    /// Solve-for style manipulation of the referenced equalities.
    Algebra(Vec<String>),
    /// A particular case of a named rule.
    RuleInstance { rule: String, subst: Substitution },
}

impl Justification {
    pub fn refs(&self) -> &[String] {
        match self {
            Justification::RewriteBy(r) | Justification::Chain(r) | Justification::Algebra(r) => r,
            _ => &[],
        }
    }

    fn refs_mut(&mut self) -> Option<&mut Vec<String>> {
        match self {
            Justification::RewriteBy(r) | Justification::Chain(r) | Justification::Algebra(r) => {
                Some(r)
            }
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Justification::Assumption => "assumption",
            Justification::Simplify => "simplify",
            Justification::RewriteBy(_) => "rewrite",
            Justification::Chain(_) => "chain",
            Justification::Algebra(_) => "algebra",
            Justification::RuleInstance { .. } => "rule",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Justification::RuleInstance { rule, subst } => json!({
                "kind": "rule",
                "rule": rule,
                "subst": subst.to_json(),
            }),
            Justification::Assumption | Justification::Simplify => json!({"kind": self.kind()}),
            _ => json!({"kind": self.kind(), "refs": self.refs()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Justification> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Json("justification needs a string `kind`".into()))?;
        let refs = || -> Result<Vec<String>> {
            let arr = v
                .get("refs")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Json(format!("`{kind}` justification needs `refs`")))?;
            arr.iter()
                .map(|r| {
                    r.as_str()
                        .map(normalize_label)
                        .ok_or_else(|| Error::Json("refs must be strings".into()))
                })
                .collect()
        };
        Ok(match kind {
            "assumption" => Justification::Assumption,
            "simplify" => Justification::Simplify,
            "rewrite" | "by" => Justification::RewriteBy(refs()?),
            "chain" => Justification::Chain(refs()?),
            "algebra" => Justification::Algebra(refs()?),
            "rule" => Justification::RuleInstance {
                rule: v
                    .get("rule")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Json("rule justification needs `rule`".into()))?
                    .to_string(),
                subst: Substitution::from_json(v.get("subst").unwrap_or(&Value::Null))?,
            },
            other => return Err(Error::Json(format!("unknown justification kind `{other}`"))),
        })
    }
}

/// `5` and `(5)` both name the step labeled `(5)`.
pub fn normalize_label(s: &str) -> String {
    let t = s.trim();
    if t.starts_with('(') && t.ends_with(')') {
        t.to_string()
    } else {
        format!("({t})")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub particle: Particle,
    /// `None` continues from the previous step's right side.
    pub lhs: Option<Expr>,
    pub label: String,
    pub rhs: Expr,
    pub just: Justification,
    pub comment: Option<String>,
}

impl Step {
    pub fn new(
        particle: Particle,
        lhs: Option<Expr>,
        label: impl Into<String>,
        rhs: Expr,
        just: Justification,
    ) -> Self {
        Step {
            particle,
            lhs,
            label: normalize_label(&label.into()),
            rhs,
            just,
            comment: None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("particle".into(), json!(self.particle.as_str()));
        m.insert(
            "lhs".into(),
            self.lhs.as_ref().map_or(Value::Null, crate::json::to_value),
        );
        m.insert("label".into(), json!(self.label));
        m.insert("rhs".into(), crate::json::to_value(&self.rhs));
        m.insert("just".into(), self.just.to_json());
        if let Some(c) = &self.comment {
            m.insert("comment".into(), json!(c));
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Step> {
        let particle = match v.get("particle") {
            None | Some(Value::Null) => Particle::None,
            Some(Value::String(s)) => Particle::parse(s)?,
            Some(other) => return Err(Error::Json(format!("bad particle {other}"))),
        };
        let lhs = match v.get("lhs") {
            None | Some(Value::Null) => None,
            Some(e) => Some(expr_field(e)?),
        };
        let label = v
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Json("step needs a string `label`".into()))?;
        let rhs = expr_field(
            v.get("rhs")
                .ok_or_else(|| Error::Json(format!("step {label} has no `rhs`")))?,
        )?;
        let just = match v.get("just") {
            None | Some(Value::Null) => Justification::Simplify,
            Some(j) => Justification::from_json(j)?,
        };
        let mut step = Step::new(particle, lhs, label, rhs, just);
        step.comment = v.get("comment").and_then(Value::as_str).map(str::to_string);
        Ok(step)
    }
}

/// Expressions in documents may be AST objects or surface source strings.
fn expr_field(v: &Value) -> Result<Expr> {
    match v {
        Value::String(src) => crate::parser::parse(src),
        other => crate::json::from_value(other),
    }
}

/// Record of an expansion: which step was replaced and by which labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Collapsed {
    /// Label of the replaced step in the original document.
    pub label: String,
    /// Labels of the expansion's steps in the new document.
    pub span: Vec<String>,
    /// The document before expansion.
    pub original: Box<Derivation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    pub title: String,
    pub steps: Vec<Step>,
    /// Show the particle and justification columns.
    pub columns: bool,
    /// Function heads treated as unknown but differentiable.
    pub opaque: Vec<String>,
    pub collapsed: Vec<Collapsed>,
}

impl Derivation {
    pub fn new(title: impl Into<String>) -> Self {
        Derivation {
            title: title.into(),
            steps: Vec::new(),
            columns: true,
            opaque: Vec::new(),
            collapsed: Vec::new(),
        }
    }

    pub fn with_opaque<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.opaque.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        let label = normalize_label(label);
        self.steps.iter().position(|s| s.label == label)
    }

    pub fn definitions(&self) -> Definitions {
        Definitions::with_opaque(self.opaque.iter().map(String::as_str))
    }

    /// Left side of step `i`, following omitted left sides back.
    pub fn effective_lhs(&self, i: usize) -> Result<Expr> {
        let step = self
            .steps
            .get(i)
            .ok_or_else(|| Error::MalformedStep(format!("no step at index {i}")))?;
        match &step.lhs {
            Some(l) => Ok(l.clone()),
            None if i == 0 => Err(Error::MalformedStep(format!(
                "step {} has no left side and nothing precedes it",
                step.label
            ))),
            None => Ok(self.steps[i - 1].rhs.clone()),
        }
    }

    /// The equality established by step `i`.
    pub fn equality(&self, i: usize) -> Result<Expr> {
        Ok(Expr::eq(self.effective_lhs(i)?, self.steps[i].rhs.clone()))
    }

    /// Left side of the last step that states one, equal to the final right side.
    pub fn conclusion(&self) -> Option<Expr> {
        let last = self.steps.last()?;
        let lhs = self.steps.iter().rev().find_map(|s| s.lhs.clone())?;
        Some(Expr::eq(lhs, last.rhs.clone()))
    }

    /// Labels unique, references resolvable to earlier steps, first step has a left side.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (i, s) in self.steps.iter().enumerate() {
            if i == 0 && s.lhs.is_none() {
                return Err(Error::MalformedStep(format!(
                    "first step {} has no left side",
                    s.label
                )));
            }
            for r in s.just.refs() {
                if !seen.contains(r) {
                    return Err(Error::DanglingReference(format!("{r} in step {}", s.label)));
                }
            }
            if !seen.insert(s.label.clone()) {
                return Err(Error::MalformedStep(format!("duplicate label {}", s.label)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("title".into(), json!(self.title));
        m.insert("columns".into(), json!(self.columns));
        if !self.opaque.is_empty() {
            m.insert("opaque".into(), json!(self.opaque));
        }
        m.insert(
            "steps".into(),
            Value::Array(self.steps.iter().map(Step::to_json).collect()),
        );
        if !self.collapsed.is_empty() {
            m.insert(
                "collapsed".into(),
                Value::Array(
                    self.collapsed
                        .iter()
                        .map(|c| {
                            json!({
                                "label": c.label,
                                "span": c.span,
                                "original": c.original.to_json(),
                            })
                        })
                        .collect(),
                ),
            );
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Derivation> {
        let steps = v
            .get("steps")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("derivation needs a `steps` array".into()))?
            .iter()
            .map(Step::from_json)
            .collect::<Result<Vec<_>>>()?;
        let strings = |k: &str| -> Result<Vec<String>> {
            match v.get(k) {
                None | Some(Value::Null) => Ok(Vec::new()),
                Some(Value::Array(a)) => a
                    .iter()
                    .map(|x| {
                        x.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| Error::Json(format!("`{k}` must hold strings")))
                    })
                    .collect(),
                Some(_) => Err(Error::Json(format!("`{k}` must be an array"))),
            }
        };
        let mut collapsed = Vec::new();
        if let Some(Value::Array(cs)) = v.get("collapsed") {
            for c in cs {
                let label = c.get("label").and_then(Value::as_str).unwrap_or_default();
                let span = c
                    .get("span")
                    .and_then(Value::as_array)
                    .map(|a| a.iter().filter_map(Value::as_str).map(str::to_string).collect())
                    .unwrap_or_default();
                let original = Derivation::from_json(
                    c.get("original")
                        .ok_or_else(|| Error::Json("collapsed entry needs `original`".into()))?,
                )?;
                collapsed.push(Collapsed {
                    label: label.to_string(),
                    span,
                    original: Box::new(original),
                });
            }
        }
        let d = Derivation {
            title: v
                .get("title")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
            steps,
            columns: v.get("columns").and_then(Value::as_bool).unwrap_or(true),
            opaque: strings("opaque")?,
            collapsed,
        };
        d.validate()?;
        Ok(d)
    }

    /// Read a document in either the JSON or the text format.
    pub fn load(src: &str) -> Result<Derivation> {
        if src.trim_start().starts_with('{') {
            let v: Value = serde_json::from_str(src).map_err(|e| Error::Json(e.to_string()))?;
            Derivation::from_json(&v)
        } else {
            parse_text(src)
        }
    }
}

/// Rewrite each reference of `just` through `f`.
pub(crate) fn rename_refs(just: &mut Justification, f: impl Fn(&str) -> String) {
    if let Some(refs) = just.refs_mut() {
        for r in refs.iter_mut() {
            *r = f(r);
        }
    }
}
