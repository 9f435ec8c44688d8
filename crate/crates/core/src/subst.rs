//! Parallel substitution with function patterns, capture-avoiding beta reduction and the
//! presentation forms `_ss_`, `_sss_`, `_ssu_`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::parser;
use crate::render::RenderableDocument;
use crate::simplify::{self, Definitions, SimplifyOptions};

pub const DEFAULT_STEP_LIMIT: usize = 10_000;

/// Left-hand side of a binding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lhs {
    Sym(String),
    /// `head(params...)`, params pairwise distinct.
    Pattern { head: String, params: Vec<String> },
}

impl Lhs {
    pub fn head(&self) -> &str {
        match self {
            Lhs::Sym(s) => s,
            Lhs::Pattern { head, .. } => head,
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Lhs::Sym(s) => Expr::sym(s.clone()),
            Lhs::Pattern { head, params } => {
                Expr::call(head.clone(), params.iter().map(|p| Expr::sym(p.clone())).collect())
            }
        }
    }

    pub fn from_expr(e: &Expr) -> Result<Lhs> {
        parser::binding_head(e)?;
        Ok(match e {
            Expr::Sym(s) => Lhs::Sym(s.clone()),
            Expr::App(head, args) => Lhs::Pattern {
                head: head.as_sym().unwrap_or_default().to_string(),
                params: args
                    .iter()
                    .map(|a| a.as_sym().unwrap_or_default().to_string())
                    .collect(),
            },
            _ => unreachable!("binding_head accepts only names and patterns"),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binding {
    pub lhs: Lhs,
    pub rhs: Expr,
}

impl Binding {
    pub fn new(lhs: Lhs, rhs: Expr) -> Self {
        Binding { lhs, rhs }
    }

    /// `lhs := rhs`.
    pub fn to_expr(&self) -> Expr {
        Expr::op(":=", vec![self.lhs.to_expr(), self.rhs.clone()])
    }

    /// The value the head is replaced by: the rhs, or a lambda for a pattern.
    pub fn as_lambda(&self) -> Expr {
        match &self.lhs {
            Lhs::Sym(_) => self.rhs.clone(),
            Lhs::Pattern { params, .. } => Expr::lambda(params.clone(), self.rhs.clone()),
        }
    }
}

/// Ordered list of bindings with pairwise distinct heads.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Substitution {
    pub bindings: Vec<Binding>,
}

impl Substitution {
    pub fn new(bindings: Vec<Binding>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for b in &bindings {
            if !seen.insert(b.lhs.head().to_string()) {
                return Err(Error::DuplicateBinding(b.lhs.head().to_string()));
            }
        }
        Ok(Substitution { bindings })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    /// Read bindings from `[a := 1, f(x) := x^2]` (also `=`), a `V` matrix, or `[[...]]`.
    pub fn from_expr(e: &Expr) -> Result<Self> {
        let items: Vec<Expr> = match e {
            Expr::Op(name, items) if name == "list" => {
                if let [Expr::Op(inner, nested)] = items.as_slice() {
                    if inner == "list" {
                        return Self::from_expr(&Expr::op("list", nested.clone()));
                    }
                }
                items.clone()
            }
            Expr::Op(name, rows) if name == "matrix" => rows
                .iter()
                .map(|r| match r.as_op("list") {
                    Some([item]) => Ok(item.clone()),
                    _ => Err(Error::MalformedBinding(format!("`{r}` is not a binding row"))),
                })
                .collect::<Result<_>>()?,
            Expr::Op(name, _) if name == ":=" || name == "=" => vec![e.clone()],
            other => {
                return Err(Error::MalformedBinding(format!(
                    "`{other}` is not a list of bindings"
                )))
            }
        };
        let bindings = items
            .iter()
            .map(|item| {
                let [lhs, rhs] = item
                    .as_op(":=")
                    .or_else(|| item.as_op("="))
                    .ok_or_else(|| {
                        Error::MalformedBinding(format!("`{item}` is not `lhs := rhs`"))
                    })?
                else {
                    return Err(Error::MalformedBinding(format!("`{item}`")));
                };
                Ok(Binding::new(Lhs::from_expr(lhs)?, rhs.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bindings)
    }

    /// Parse `[a := 2, b := 3]`.
    pub fn parse(src: &str) -> Result<Self> {
        parse_bindings(src)
    }

    /// `[lhs := rhs, ...]` as an expression.
    pub fn to_list_expr(&self) -> Expr {
        Expr::op("list", self.bindings.iter().map(Binding::to_expr).collect())
    }

    /// The `V` form: a one-column matrix with a `lhs := rhs` row per binding.
    pub fn to_matrix(&self) -> Expr {
        Expr::op(
            "matrix",
            self.bindings
                .iter()
                .map(|b| Expr::op("list", vec![b.to_expr()]))
                .collect(),
        )
    }

    /// `h := rhs` for symbols, `h := lambda(params, rhs)` for patterns.
    pub fn fstolambdas(&self) -> BTreeMap<String, Expr> {
        self.bindings
            .iter()
            .map(|b| (b.lhs.head().to_string(), b.as_lambda()))
            .collect()
    }

    /// `[{"lhs": AST, "rhs": AST}, ...]`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.bindings
                .iter()
                .map(|b| {
                    json!({
                        "lhs": crate::json::to_value(&b.lhs.to_expr()),
                        "rhs": crate::json::to_value(&b.rhs),
                    })
                })
                .collect(),
        )
    }

    /// Accepts the array form of [`Substitution::to_json`], with items given as objects or as
    /// source strings like `"n := 3"`, or a whole source string `"[n := 3]"`.
    pub fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Null => Ok(Self::empty()),
            Value::String(src) => parse_bindings(src),
            Value::Array(items) => {
                let mut bindings = Vec::new();
                for item in items {
                    match item {
                        Value::String(src) => {
                            let e = parser::parse(src)?;
                            bindings.extend(Self::from_expr(&e)?.bindings);
                        }
                        Value::Object(o) => {
                            let lhs = o
                                .get("lhs")
                                .ok_or_else(|| Error::Json("binding without `lhs`".into()))?;
                            let rhs = o
                                .get("rhs")
                                .ok_or_else(|| Error::Json("binding without `rhs`".into()))?;
                            bindings.push(Binding::new(
                                Lhs::from_expr(&json_or_source(lhs)?)?,
                                json_or_source(rhs)?,
                            ));
                        }
                        other => {
                            return Err(Error::Json(format!("bad binding {other}")));
                        }
                    }
                }
                Self::new(bindings)
            }
            other => Err(Error::Json(format!("bad substitution {other}"))),
        }
    }
}

fn json_or_source(v: &Value) -> Result<Expr> {
    match v {
        Value::String(src) => parser::parse(src),
        other => crate::json::from_value(other),
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_list_expr())
    }
}

/// Parse a bracketed binding list.
pub fn parse_bindings(src: &str) -> Result<Substitution> {
    let e = parser::parse(src)?;
    if let Some(items) = e.as_op("list") {
        let normalized = Expr::op(
            "list",
            items
                .iter()
                .map(|i| match i {
                    Expr::Op(n, a) if n == "=" => Expr::Op(":=".into(), a.clone()),
                    other => other.clone(),
                })
                .collect(),
        );
        parser::validate_binding_list(&normalized)?;
    }
    Substitution::from_expr(&e)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubstResult {
    pub input: Expr,
    pub subst: Substitution,
    pub output: Expr,
    pub beta_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstOptions {
    pub step_limit: usize,
    /// Actively simplify the result.
    pub simplify: bool,
}

impl Default for SubstOptions {
    fn default() -> Self {
        SubstOptions {
            step_limit: DEFAULT_STEP_LIMIT,
            simplify: true,
        }
    }
}

/// `e [s]` with simplification of the result.
pub fn apply_subst(e: &Expr, s: &Substitution, step_limit: usize) -> Result<SubstResult> {
    apply_subst_with(
        e,
        s,
        &SubstOptions {
            step_limit,
            simplify: true,
        },
        &Definitions::new(),
    )
}

/// `e [s]`: one parallel pass, then beta reduction; nothing is simplified.
pub fn apply_subst_raw(e: &Expr, s: &Substitution, step_limit: usize) -> Result<SubstResult> {
    apply_subst_with(
        e,
        s,
        &SubstOptions {
            step_limit,
            simplify: false,
        },
        &Definitions::new(),
    )
}

pub fn apply_subst_with(
    e: &Expr,
    s: &Substitution,
    opts: &SubstOptions,
    defs: &Definitions,
) -> Result<SubstResult> {
    if s.is_empty() {
        return Ok(SubstResult {
            input: e.clone(),
            subst: s.clone(),
            output: e.clone(),
            beta_steps: 0,
        });
    }
    let replaced = subst_vars(e, &s.fstolambdas());
    let (reduced, steps) = beta_reduce_traced(
        &replaced,
        opts.step_limit,
        Strategy::LeftmostOutermost,
        |_, _| {},
    )?;
    let output = if opts.simplify {
        simplify::simplify_with(&reduced, &SimplifyOptions::default(), defs)?
    } else {
        reduced
    };
    Ok(SubstResult {
        input: e.clone(),
        subst: s.clone(),
        output,
        beta_steps: steps,
    })
}

/// The pattern-matching rewrite used by the sequential and `psubst` semantics: a pattern
/// `h(v...) := body` rewrites `h(w...)` only when every `w` is a name.
fn rewrite_once(e: &Expr, table: &BTreeMap<String, &Binding>) -> Expr {
    match e {
        Expr::Sym(s) => match table.get(s.as_str()) {
            Some(b) => match &b.lhs {
                Lhs::Sym(_) => b.rhs.clone(),
                Lhs::Pattern { .. } => e.clone(),
            },
            None => e.clone(),
        },
        Expr::App(head, args) => {
            if let Some(h) = head.as_sym() {
                if let Some(b) = table.get(h) {
                    if let Lhs::Pattern { params, .. } = &b.lhs {
                        if params.len() == args.len() && args.iter().all(|a| a.as_sym().is_some()) {
                            let map = params.iter().cloned().zip(args.iter().cloned()).collect();
                            return subst_vars(&b.rhs, &map);
                        }
                    }
                }
            }
            Expr::App(
                Box::new(rewrite_once(head, table)),
                args.iter().map(|a| rewrite_once(a, table)).collect(),
            )
        }
        Expr::Lambda(params, body) => {
            let inner: BTreeMap<String, &Binding> = table
                .iter()
                .filter(|(k, _)| !params.contains(k))
                .map(|(k, v)| (k.clone(), *v))
                .collect();
            Expr::Lambda(params.clone(), Box::new(rewrite_once(body, &inner)))
        }
        other => other.map_subexprs(|c| rewrite_once(c, table)),
    }
}

/// Bindings applied one at a time, left to right, each over the whole current tree.
pub fn apply_sequential(e: &Expr, s: &Substitution) -> Result<Expr> {
    let mut cur = e.clone();
    for b in &s.bindings {
        let table = BTreeMap::from([(b.lhs.head().to_string(), b)]);
        cur = rewrite_once(&cur, &table);
    }
    beta_reduce(&cur, DEFAULT_STEP_LIMIT)
}

/// All bindings in one pass, with the same matching as [`apply_sequential`].
pub fn psubst(e: &Expr, s: &Substitution) -> Result<Expr> {
    let table = s
        .bindings
        .iter()
        .map(|b| (b.lhs.head().to_string(), b))
        .collect();
    beta_reduce(&rewrite_once(e, &table), DEFAULT_STEP_LIMIT)
}

/// `base%k` with the smallest `k >= 1` not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.split('%').next().unwrap_or(base);
    (1..)
        .map(|k| format!("{stem}%{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded search")
}

/// Capture-avoiding simultaneous substitution of free symbols.
pub fn subst_vars(e: &Expr, map: &BTreeMap<String, Expr>) -> Expr {
    if map.is_empty() {
        return e.clone();
    }
    match e {
        Expr::Sym(s) => map.get(s).cloned().unwrap_or_else(|| e.clone()),
        Expr::Lambda(params, body) => {
            let fv_body = body.free_variables();
            let inner: BTreeMap<String, Expr> = map
                .iter()
                .filter(|(k, _)| !params.contains(k) && fv_body.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            if inner.is_empty() {
                return e.clone();
            }
            let incoming: BTreeSet<String> =
                inner.values().flat_map(|v| v.free_variables()).collect();
            let mut avoid: BTreeSet<String> = incoming.clone();
            avoid.extend(body.all_symbols());
            avoid.extend(params.iter().cloned());
            avoid.extend(inner.keys().cloned());
            let mut renames = BTreeMap::new();
            let mut new_params = Vec::with_capacity(params.len());
            for p in params {
                if incoming.contains(p) {
                    let f = fresh_name(p, &avoid);
                    avoid.insert(f.clone());
                    renames.insert(p.clone(), Expr::sym(f.clone()));
                    new_params.push(f);
                } else {
                    new_params.push(p.clone());
                }
            }
            let body = if renames.is_empty() {
                (**body).clone()
            } else {
                subst_vars(body, &renames)
            };
            Expr::Lambda(new_params, Box::new(subst_vars(&body, &inner)))
        }
        other => other.map_subexprs(|c| subst_vars(c, map)),
    }
}

/// Reduction order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
}

fn contract(e: &Expr) -> Option<Expr> {
    match e {
        Expr::App(head, args) => match head.as_ref() {
            Expr::Lambda(params, body) if params.len() == args.len() => {
                let map = params.iter().cloned().zip(args.iter().cloned()).collect();
                Some(subst_vars(body, &map))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Direct subexpressions in left-to-right order, with a way to put one back.
fn parts(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::App(head, args) => std::iter::once(head.as_ref()).chain(args.iter()).collect(),
        other => other.children().iter().collect(),
    }
}

fn replace_part(e: &Expr, i: usize, new: Expr) -> Expr {
    match e {
        Expr::App(head, args) => {
            if i == 0 {
                Expr::App(Box::new(new), args.clone())
            } else {
                let mut args = args.clone();
                args[i - 1] = new;
                Expr::App(head.clone(), args)
            }
        }
        other => {
            let mut kids = other.children().to_vec();
            kids[i] = new;
            other.with_children(kids)
        }
    }
}

fn step(e: &Expr, strategy: Strategy) -> Option<Expr> {
    match strategy {
        Strategy::LeftmostOutermost => {
            if let Some(r) = contract(e) {
                return Some(r);
            }
            for (i, p) in parts(e).into_iter().enumerate() {
                if let Some(r) = step(p, strategy) {
                    return Some(replace_part(e, i, r));
                }
            }
            None
        }
        Strategy::RightmostInnermost => {
            let ps = parts(e);
            for i in (0..ps.len()).rev() {
                if let Some(r) = step(ps[i], strategy) {
                    return Some(replace_part(e, i, r));
                }
            }
            contract(e)
        }
    }
}

/// Normal form under leftmost-outermost reduction.
pub fn beta_reduce(e: &Expr, step_limit: usize) -> Result<Expr> {
    Ok(beta_reduce_traced(e, step_limit, Strategy::LeftmostOutermost, |_, _| {})?.0)
}

/// Reduce to normal form, calling `on_step(before, after)` for every contraction.
/// Returns the normal form and the number of steps.
pub fn beta_reduce_traced(
    e: &Expr,
    step_limit: usize,
    strategy: Strategy,
    mut on_step: impl FnMut(&Expr, &Expr),
) -> Result<(Expr, usize)> {
    let mut cur = e.clone();
    let mut steps = 0;
    while let Some(next) = step(&cur, strategy) {
        steps += 1;
        if steps > step_limit {
            return Err(Error::NonTermination(step_limit));
        }
        on_step(&cur, &next);
        cur = next;
    }
    Ok((cur, steps))
}

/// Equality up to renaming of bound variables.
pub fn alpha_equal(a: &Expr, b: &Expr) -> bool {
    fn go(a: &Expr, b: &Expr, env_a: &mut Vec<String>, env_b: &mut Vec<String>) -> bool {
        match (a, b) {
            (Expr::Sym(x), Expr::Sym(y)) => {
                let ia = env_a.iter().rposition(|v| v == x);
                let ib = env_b.iter().rposition(|v| v == y);
                match (ia, ib) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Expr::Lambda(pa, ba), Expr::Lambda(pb, bb)) => {
                if pa.len() != pb.len() {
                    return false;
                }
                let (la, lb) = (env_a.len(), env_b.len());
                env_a.extend(pa.iter().cloned());
                env_b.extend(pb.iter().cloned());
                let r = go(ba, bb, env_a, env_b);
                env_a.truncate(la);
                env_b.truncate(lb);
                r
            }
            (Expr::App(ha, aa), Expr::App(hb, ab)) => {
                aa.len() == ab.len()
                    && go(ha, hb, env_a, env_b)
                    && aa.iter().zip(ab).all(|(x, y)| go(x, y, env_a, env_b))
            }
            (Expr::Op(na, aa), Expr::Op(nb, ab)) => {
                na == nb
                    && aa.len() == ab.len()
                    && aa.iter().zip(ab).all(|(x, y)| go(x, y, env_a, env_b))
            }
            (Expr::Quoted(x), Expr::Quoted(y)) => go(x, y, env_a, env_b),
            _ => a == b,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

/// Which presentation of a substitution to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubstForm {
    /// The result only.
    S,
    /// `input [V(s)]`, unevaluated.
    Ss,
    /// `input [V(s)] = output`.
    Sss,
    /// `input [V(s)]` with the output under an underbrace.
    Ssu,
}

impl FromStr for SubstForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s" => Ok(SubstForm::S),
            "ss" => Ok(SubstForm::Ss),
            "sss" => Ok(SubstForm::Sss),
            "ssu" => Ok(SubstForm::Ssu),
            other => Err(Error::wrong_shape("one of s, ss, sss, ssu", other)),
        }
    }
}

impl SubstForm {
    pub fn op_name(self) -> &'static str {
        match self {
            SubstForm::S => "_s_",
            SubstForm::Ss => "_ss_",
            SubstForm::Sss => "_sss_",
            SubstForm::Ssu => "_ssu_",
        }
    }

    pub fn from_op_name(name: &str) -> Option<Self> {
        match name {
            "_s_" => Some(SubstForm::S),
            "_ss_" => Some(SubstForm::Ss),
            "_sss_" => Some(SubstForm::Sss),
            "_ssu_" => Some(SubstForm::Ssu),
            _ => None,
        }
    }
}

/// The expression a presentation form stands for, plus the substitution result.
pub fn presentation(
    form: SubstForm,
    e: &Expr,
    s: &Substitution,
    defs: &Definitions,
) -> Result<(Expr, SubstResult)> {
    let r = apply_subst_with(e, s, &SubstOptions::default(), defs)?;
    let ss = || Expr::op("_ss_", vec![e.clone(), s.to_matrix()]);
    let out = match form {
        SubstForm::S => r.output.clone(),
        SubstForm::Ss => ss(),
        SubstForm::Sss => Expr::op("_sss_", vec![ss(), r.output.clone()]),
        SubstForm::Ssu => Expr::op("_ssu_", vec![ss(), r.output.clone()]),
    };
    Ok((out, r))
}

/// A renderable document for one of the four forms.
pub fn render_subst_forms(e: &Expr, s: &Substitution, form: SubstForm) -> Result<RenderableDocument> {
    let (out, _) = presentation(form, e, s, &Definitions::new())?;
    Ok(RenderableDocument::expr(out))
}
