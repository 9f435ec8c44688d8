//! Finite set comprehensions.
//!
//! Both surface notations, `{e | x in S, cond}` and `{x in S | cond}`, normalize to one
//! clause list of generators and filters with the resulting expression last. Evaluation is
//! depth-first and records every branch in a [`TraceTree`], pruned ones included.

mod loops;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::simplify::simplify_default;
use crate::subst::subst_vars;

pub use loops::{emit_loops, parse_loops, run_loops, LoopStmt};

#[derive(Clone, Debug, PartialEq)]
pub enum Clause {
    /// `x in S`, or `(x, y) in S` for sets of pairs.
    Gen { vars: Vec<String>, source: Expr },
    Filter(Expr),
    Result(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comprehension {
    pub clauses: Vec<Clause>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceNode {
    pub var: String,
    pub value: Option<Expr>,
    pub children: Vec<TraceNode>,
    pub pruned: bool,
    pub annotations: BTreeMap<String, Expr>,
}

impl TraceNode {
    fn new(var: impl Into<String>, value: Option<Expr>) -> Self {
        TraceNode {
            var: var.into(),
            value,
            children: Vec::new(),
            pruned: false,
            annotations: BTreeMap::new(),
        }
    }

    /// Results at the leaves, in depth-first order.
    pub fn leaf_results(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        fn go<'a>(n: &'a TraceNode, out: &mut Vec<&'a Expr>) {
            if let Some(r) = n.annotations.get("result") {
                out.push(r);
            }
            for c in &n.children {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }

    /// Nodes marked pruned (failed filter or empty range).
    pub fn pruned_count(&self) -> usize {
        usize::from(self.pruned) + self.children.iter().map(TraceNode::pruned_count).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceTree {
    pub root: TraceNode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// Generation order, duplicates removed.
    pub values: Vec<Expr>,
    /// Every produced result, duplicates kept.
    pub raw: Vec<Expr>,
    pub tree: TraceTree,
}

impl Evaluation {
    /// Values in canonical order, for set-style display.
    pub fn sorted_values(&self) -> Vec<Expr> {
        let mut v = self.values.clone();
        v.sort();
        v
    }
}

/// First occurrences only, order kept.
pub fn dedup_in_order(xs: &[Expr]) -> Vec<Expr> {
    let mut seen = BTreeSet::new();
    xs.iter().filter(|x| seen.insert((*x).clone())).cloned().collect()
}

/// Free symbols of `e`, not counting function heads.
fn value_symbols(e: &Expr) -> BTreeSet<String> {
    fn go(e: &Expr, out: &mut BTreeSet<String>) {
        match e {
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::App(_, args) => args.iter().for_each(|a| go(a, out)),
            Expr::Lambda(params, body) => {
                let mut inner = BTreeSet::new();
                go(body, &mut inner);
                out.extend(inner.into_iter().filter(|s| !params.contains(s)));
            }
            other => other.children().iter().for_each(|c| go(c, out)),
        }
    }
    let mut out = BTreeSet::new();
    go(e, &mut out);
    out
}

fn gen_vars(pattern: &Expr) -> Result<Vec<String>> {
    match pattern {
        Expr::Sym(s) => Ok(vec![s.clone()]),
        Expr::Op(n, items) if n == "tuple" && !items.is_empty() => items
            .iter()
            .map(|i| {
                i.as_sym()
                    .map(str::to_string)
                    .ok_or_else(|| Error::wrong_shape("a generator variable", i))
            })
            .collect(),
        other => Err(Error::wrong_shape("a generator variable", other)),
    }
}

fn qualifier(q: &Expr) -> Result<Clause> {
    match q.as_op("in") {
        Some([pat, source]) => Ok(Clause::Gen {
            vars: gen_vars(pat)?,
            source: source.clone(),
        }),
        _ => Ok(Clause::Filter(q.clone())),
    }
}

impl Comprehension {
    /// Check the scoping rules: fresh generator variables, no unbound names.
    pub fn new(clauses: Vec<Clause>) -> Result<Self> {
        let mut bound: BTreeSet<String> = BTreeSet::new();
        let n_results = clauses.iter().filter(|c| matches!(c, Clause::Result(_))).count();
        if n_results != 1 || !matches!(clauses.last(), Some(Clause::Result(_))) {
            return Err(Error::wrong_shape(
                "exactly one result clause, in last position",
                format!("{} result clauses", n_results),
            ));
        }
        for c in &clauses {
            match c {
                Clause::Gen { vars, .. } => {
                    for v in vars {
                        if !bound.insert(v.clone()) {
                            return Err(Error::DuplicateGenerator(v.clone()));
                        }
                    }
                }
                Clause::Filter(e) | Clause::Result(e) => {
                    if let Some(u) = value_symbols(e)
                        .into_iter()
                        .find(|s| !bound.contains(s) && !is_constant_name(s))
                    {
                        return Err(Error::UnboundVariable(u));
                    }
                }
            }
        }
        Ok(Comprehension { clauses })
    }

    pub fn generators(&self) -> impl Iterator<Item = (&[String], &Expr)> {
        self.clauses.iter().filter_map(|c| match c {
            Clause::Gen { vars, source } => Some((vars.as_slice(), source)),
            _ => None,
        })
    }

    pub fn result(&self) -> &Expr {
        match self.clauses.last() {
            Some(Clause::Result(e)) => e,
            _ => unreachable!("checked in Comprehension::new"),
        }
    }

    /// Back to the surface syntax, in the `{e | quals}` notation.
    pub fn to_expr(&self) -> Expr {
        let mut args = vec![self.result().clone()];
        for c in &self.clauses {
            match c {
                Clause::Gen { vars, source } => args.push(Expr::op(
                    "in",
                    vec![pattern_expr(vars), source.clone()],
                )),
                Clause::Filter(e) => args.push(e.clone()),
                Clause::Result(_) => {}
            }
        }
        Expr::op("compre", args)
    }
}

fn is_constant_name(s: &str) -> bool {
    matches!(s, "true" | "false")
}

fn pattern_expr(vars: &[String]) -> Expr {
    if vars.len() == 1 {
        Expr::sym(vars[0].clone())
    } else {
        Expr::op("tuple", vars.iter().map(|v| Expr::sym(v.clone())).collect())
    }
}

/// Normalize either surface form to the clause list.
pub fn normalize(e: &Expr) -> Result<Comprehension> {
    match e {
        Expr::Op(name, args) if name == "compre" && !args.is_empty() => {
            let mut clauses = args[1..].iter().map(qualifier).collect::<Result<Vec<_>>>()?;
            clauses.push(Clause::Result(args[0].clone()));
            Comprehension::new(clauses)
        }
        Expr::Op(name, args) if name == "select" && !args.is_empty() => {
            let Clause::Gen { vars, source } = qualifier(&args[0])? else {
                return Err(Error::wrong_shape("`x in S` before `|`", &args[0]));
            };
            let result = pattern_expr(&vars);
            let mut clauses = vec![Clause::Gen { vars, source }];
            for q in &args[1..] {
                clauses.push(qualifier(q)?);
            }
            clauses.push(Clause::Result(result));
            Comprehension::new(clauses)
        }
        other => Err(Error::wrong_shape("a set comprehension", other)),
    }
}

/// The set `{(x, y) in R^2 | y = rhs}` of a function graph; symbolic only.
pub fn graph_comprehension(fn_eq: &Expr) -> Result<Comprehension> {
    match fn_eq.as_equation() {
        Some((Expr::Sym(y), _)) if y == "y" => Comprehension::new(vec![
            Clause::Gen {
                vars: vec!["x".into(), "y".into()],
                source: Expr::op("^", vec![Expr::sym("R"), Expr::int(2)]),
            },
            Clause::Filter(fn_eq.clone()),
            Clause::Result(Expr::op("tuple", vec![Expr::sym("x"), Expr::sym("y")])),
        ]),
        _ => Err(Error::wrong_shape("an equation `y = f(x)`", fn_eq)),
    }
}

/// The graph comprehension in the `{(x, y) in R^2 | ...}` notation.
pub fn graph_expr(c: &Comprehension) -> Expr {
    let mut args = Vec::new();
    for cl in &c.clauses {
        match cl {
            Clause::Gen { vars, source } => {
                args.push(Expr::op("in", vec![pattern_expr(vars), source.clone()]))
            }
            Clause::Filter(f) => args.push(f.clone()),
            Clause::Result(_) => {}
        }
    }
    Expr::op("select", args)
}

pub(crate) type Env = BTreeMap<String, Expr>;

fn instantiate(e: &Expr, env: &Env) -> Result<Expr> {
    simplify_default(&subst_vars(e, env))
}

/// Elements of a generator source under `env`; explicit sets/lists or integer ranges.
pub(crate) fn source_elements(source: &Expr, env: &Env) -> Result<(Expr, Vec<Expr>)> {
    let s = instantiate(source, env)?;
    let elems = match &s {
        Expr::Op(n, items) if n == "set" || n == "list" => items.clone(),
        Expr::Op(n, bounds) if n == "range" && bounds.len() == 2 => {
            let lo = bounds[0]
                .as_integer()
                .ok_or_else(|| Error::NonInteger(bounds[0].to_string()))?;
            let hi = bounds[1]
                .as_integer()
                .ok_or_else(|| Error::NonInteger(bounds[1].to_string()))?;
            let mut out = Vec::new();
            let mut k = lo;
            while k <= hi {
                out.push(Expr::num(crate::expr::Rational::from_integer(k.clone())));
                k += 1;
            }
            out
        }
        other => return Err(Error::NonFinite(other.to_string())),
    };
    Ok((s, elems))
}

/// Bind `vars` to `value`, destructuring tuples.
pub(crate) fn bind(vars: &[String], value: &Expr, env: &mut Env) -> Result<()> {
    if vars.len() == 1 {
        env.insert(vars[0].clone(), value.clone());
        return Ok(());
    }
    match value.as_op("tuple") {
        Some(items) if items.len() == vars.len() => {
            for (v, x) in vars.iter().zip(items) {
                env.insert(v.clone(), x.clone());
            }
            Ok(())
        }
        _ => Err(Error::wrong_shape(
            format!("a {}-tuple", vars.len()),
            value,
        )),
    }
}

/// Decide a condition whose variables are all bound.
pub(crate) fn truth(cond: &Expr, env: &Env) -> Result<bool> {
    let c = subst_vars(cond, env);
    let unevaluable = || Error::Unevaluable(c.to_string());
    match &c {
        Expr::Sym(s) if s == "true" => return Ok(true),
        Expr::Sym(s) if s == "false" => return Ok(false),
        _ => {}
    }
    let Expr::Op(name, args) = &c else {
        return Err(unevaluable());
    };
    match (name.as_str(), args.as_slice()) {
        ("not", [a]) => return Ok(!truth(a, env)?),
        ("and", _) => {
            for a in args {
                if !truth(a, env)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        ("or", _) => {
            for a in args {
                if truth(a, env)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        ("in", [x, s]) => {
            let x = simplify_default(x)?;
            let (_, elems) = source_elements(s, &Env::new())?;
            return Ok(elems.contains(&x));
        }
        _ => {}
    }
    let [a, b] = args.as_slice() else {
        return Err(unevaluable());
    };
    let a = simplify_default(a)?;
    let b = simplify_default(b)?;
    if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
        return match name.as_str() {
            "<" => Ok(x < y),
            ">" => Ok(x > y),
            "<=" => Ok(x <= y),
            ">=" => Ok(x >= y),
            "=" => Ok(x == y),
            "!=" => Ok(x != y),
            _ => Err(unevaluable()),
        };
    }
    let closed = value_symbols(&a).is_empty() && value_symbols(&b).is_empty();
    match name.as_str() {
        "=" if closed => Ok(a == b),
        "!=" if closed => Ok(a != b),
        _ => Err(unevaluable()),
    }
}

struct Evaluator<'a> {
    clauses: &'a [Clause],
    raw: Vec<Expr>,
}

impl Evaluator<'_> {
    fn run(&mut self, k: usize, env: &mut Env, node: &mut TraceNode) -> Result<()> {
        match &self.clauses[k] {
            Clause::Result(e) => {
                let v = instantiate(e, env)?;
                node.annotations.insert("result".into(), v.clone());
                self.raw.push(v);
                Ok(())
            }
            Clause::Filter(c) => {
                if truth(c, env)? {
                    self.run(k + 1, env, node)
                } else {
                    node.pruned = true;
                    Ok(())
                }
            }
            Clause::Gen { vars, source } => {
                let (shown, elems) = source_elements(source, env)?;
                let label = vars.join(",");
                node.annotations.insert(label.clone(), shown);
                if elems.is_empty() {
                    node.pruned = true;
                    return Ok(());
                }
                for x in elems {
                    let saved = env.clone();
                    bind(vars, &x, env)?;
                    let mut child = TraceNode::new(label.clone(), Some(x));
                    self.run(k + 1, env, &mut child)?;
                    node.children.push(child);
                    *env = saved;
                }
                Ok(())
            }
        }
    }
}

/// Depth-first evaluation with a trace of every branch.
pub fn evaluate(c: &Comprehension) -> Result<Evaluation> {
    let mut ev = Evaluator {
        clauses: &c.clauses,
        raw: Vec::new(),
    };
    let mut root = TraceNode::new("", None);
    ev.run(0, &mut Env::new(), &mut root)?;
    Ok(Evaluation {
        values: dedup_in_order(&ev.raw),
        raw: ev.raw,
        tree: TraceTree { root },
    })
}

/// Parse-normalize-evaluate in one go.
pub fn evaluate_expr(e: &Expr) -> Result<Evaluation> {
    evaluate(&normalize(e)?)
}
