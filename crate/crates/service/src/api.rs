//! Endpoint bodies as plain functions over a session, independent of the HTTP layer.
//!
//! Every request expression may be surface source or a JSON AST; every expression in a
//! response comes with its `ast`, `latex` and `ascii` renderings.

use std::collections::BTreeMap;

use mex_core::comprehension::{emit_loops, evaluate, normalize};
use mex_core::derivation::{check_derivation, corpus, Derivation};
use mex_core::paths::{check_holes, mkholes, parse_path_list, Path};
use mex_core::render::{
    checked_derivation_ascii, checked_derivation_latex, render_ascii, render_latex, DocBase,
    Layout, RenderableDocument,
};
use mex_core::session::{Object, Session};
use mex_core::simplify::diff_verb_with;
use mex_core::subst::{parse_bindings, presentation, SubstForm, Substitution};
use mex_core::{json, parse, parse_statement, Expr};
use serde_json::{json, Value};

use crate::error::{ApiError, ApiResult};

/// A fresh session with the derivation corpus preloaded under its names.
pub fn new_session() -> Session {
    let mut s = Session::new();
    for (name, d) in corpus::all() {
        s.set(name, Object::Derivation(d));
    }
    s
}

fn field<'a>(body: &'a Value, key: &str) -> ApiResult<&'a Value> {
    match body.get(key) {
        Some(Value::Null) | None => Err(ApiError::bad_request(format!("missing field `{key}`"))),
        Some(v) => Ok(v),
    }
}

fn str_field<'a>(body: &'a Value, key: &str) -> ApiResult<&'a str> {
    field(body, key)?
        .as_str()
        .ok_or_else(|| ApiError::bad_request(format!("field `{key}` must be a string")))
}

fn opt_str<'a>(body: &'a Value, key: &str) -> ApiResult<Option<&'a str>> {
    match body.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => str_field(body, key).map(Some),
    }
}

/// A session name, surface source, or AST.
fn target(s: &Session, v: &Value) -> ApiResult<Expr> {
    match v {
        Value::String(src) => Ok(s.target(src)?),
        other => Ok(s.resolve(&json::from_value(other)?)),
    }
}

/// Surface source or AST, taken literally.
fn literal(v: &Value) -> ApiResult<Expr> {
    match v {
        Value::String(src) => Ok(parse(src)?),
        other => Ok(json::from_value(other)?),
    }
}

fn bindings(s: &Session, v: &Value) -> ApiResult<Substitution> {
    match v {
        Value::String(src) => match s.get(src.trim()) {
            Some(Object::Expr(e)) => Ok(Substitution::from_expr(e)?),
            _ => Ok(parse_bindings(src)?),
        },
        other => Ok(Substitution::from_expr(&json::from_value(other)?)?),
    }
}

fn rendered(e: &Expr) -> Value {
    let doc = RenderableDocument::expr(e.clone());
    json!({
        "ast": json::to_value(e),
        "latex": render_latex(&doc),
        "ascii": render_ascii(&doc),
    })
}

fn with(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(x)) = (base.as_object_mut(), extra) {
        b.extend(x);
    }
    base
}

/// `POST /session/:id/parse {src, eval?}`: store the expression and return it. With
/// `eval: true` the line runs like a REPL input (`S : [a=2, b=3]`, `RCV _ssu_ S`).
pub fn parse_expr(s: &mut Session, body: &Value) -> ApiResult<Value> {
    let src = str_field(body, "src")?;
    let eval = body.get("eval").and_then(Value::as_bool).unwrap_or(false);
    let stmt = parse_statement(src)?;
    let (name, value) = if eval {
        if let Some(l) = &stmt.label {
            if s.get(l).is_some() {
                return Err(mex_core::Error::DuplicateName(l.clone()).into());
            }
        }
        let out = s.run_statement(&stmt)?;
        (out.name, out.value)
    } else {
        let name = s.store(stmt.label.as_deref(), stmt.expr.clone())?;
        (name, stmt.expr)
    };
    Ok(with(json!({ "name": name }), rendered(&value)))
}

/// `POST /session/:id/subst {target, bindings, form}`.
pub fn subst(s: &mut Session, body: &Value) -> ApiResult<Value> {
    let e = target(s, field(body, "target")?)?;
    let sub = bindings(s, field(body, "bindings")?)?;
    let form: SubstForm = opt_str(body, "form")?.unwrap_or("s").parse()?;
    let (out, r) = presentation(form, &e, &sub, s.definitions())?;
    Ok(with(rendered(&out), json!({ "betaSteps": r.beta_steps })))
}

/// `POST /session/:id/simplify {target}`.
pub fn simplify(s: &mut Session, body: &Value) -> ApiResult<Value> {
    let e = target(s, field(body, "target")?)?;
    let v = s.eval(&e)?;
    Ok(rendered(&v))
}

/// `POST /session/:id/diff {target, var, noun}`: the derivative, or with `noun` the
/// unevaluated `d/dvar` form.
pub fn diff(s: &mut Session, body: &Value) -> ApiResult<Value> {
    let e = target(s, field(body, "target")?)?;
    let var = str_field(body, "var")?;
    let noun = body.get("noun").and_then(Value::as_bool).unwrap_or(false);
    let out = if noun {
        Expr::quote(Expr::call("diff", vec![e, Expr::sym(var)]))
    } else {
        diff_verb_with(&e, var, s.definitions())?
    };
    Ok(rendered(&out))
}

fn paths(v: &Value) -> ApiResult<Vec<Path>> {
    match v {
        Value::String(text) => Ok(parse_path_list(text)?),
        Value::Array(items) => items
            .iter()
            .map(|p| {
                serde_json::from_value::<Path>(p.clone())
                    .map_err(|_| ApiError::bad_request("paths must be arrays of integers"))
            })
            .collect(),
        _ => Err(ApiError::bad_request("paths must be a list")),
    }
}

/// `POST /session/:id/exercise/make {target, paths}`. The response carries the student
/// view only; answers stay in the session.
pub fn exercise_make(s: &mut Session, body: &Value) -> ApiResult<Value> {
    let e = target(s, field(body, "target")?)?;
    let x = mkholes(&e, &paths(field(body, "paths")?)?)?;
    let mut n = 1;
    while s.get(&format!("ex{n}")).is_some() {
        n += 1;
    }
    let id = format!("ex{n}");
    let statement = x.student_view();
    let shown = rendered(&x.statement);
    s.insert_new(&id, Object::Exercise(x))?;
    Ok(json!({
        "exerciseId": id,
        "statement": statement,
        "latex": shown["latex"],
        "ascii": shown["ascii"],
    }))
}

/// `POST /session/:id/exercise/check {exerciseId, answers: {label: src}}`.
pub fn exercise_check(s: &mut Session, body: &Value) -> ApiResult<Value> {
    let id = str_field(body, "exerciseId")?;
    let x = match s.get(id) {
        Some(Object::Exercise(x)) => x.clone(),
        _ => return Err(ApiError::not_found("exercise", id)),
    };
    let answers = field(body, "answers")?
        .as_object()
        .ok_or_else(|| ApiError::bad_request("answers must map labels to expressions"))?;
    let mut proposed = BTreeMap::new();
    for (k, v) in answers {
        let label: u32 = k
            .trim()
            .parse()
            .map_err(|_| ApiError::bad_request(format!("hole label `{k}` is not a number")))?;
        proposed.insert(label, literal(v)?);
    }
    let report = check_holes(&x, &proposed)?;
    Ok(serde_json::to_value(report).expect("hole report serializes"))
}

fn derivation_view(name: Option<&str>, d: &Derivation) -> Value {
    let report = check_derivation(d);
    let layout = Layout::default();
    json!({
        "name": name,
        "document": d.to_json(),
        "report": serde_json::to_value(&report).expect("report serializes"),
        "latex": checked_derivation_latex(d, &report, &layout),
        "ascii": checked_derivation_ascii(d, &report, &layout),
    })
}

/// `GET /session/:id/derivation/:name`: the document with per-step verdicts and the
/// highlight paths of each step.
pub fn derivation_get(s: &Session, name: &str) -> ApiResult<Value> {
    match s.get(name) {
        Some(Object::Derivation(d)) => Ok(derivation_view(Some(name), d)),
        _ => Err(ApiError::not_found("derivation", name)),
    }
}

/// `POST /session/:id/derivation/check {document, name?}`. The document is JSON or the
/// text format; with `name` it is kept in the session.
pub fn derivation_check(s: &mut Session, body: &Value) -> ApiResult<Value> {
    let d = match field(body, "document")? {
        Value::String(text) => Derivation::load(text)?,
        other => Derivation::from_json(other)?,
    };
    let name = opt_str(body, "name")?;
    if let Some(n) = name {
        s.insert_new(n, Object::Derivation(d.clone()))?;
    }
    Ok(derivation_view(name, &d))
}

/// `POST /session/:id/comprehension/eval {src}`.
pub fn comprehension_eval(_s: &mut Session, body: &Value) -> ApiResult<Value> {
    let c = normalize(&literal(field(body, "src")?)?)?;
    let ev = evaluate(&c)?;
    let set = Expr::op("set", ev.values.clone());
    let trace = RenderableDocument::new(DocBase::Trace(ev.tree.clone()));
    Ok(with(
        json!({
            "values": ev.values.iter().map(json::to_value).collect::<Vec<_>>(),
            "traceTree": serde_json::to_value(&ev.tree).expect("trace serializes"),
            "loopProgram": emit_loops(&c),
            "traceAscii": render_ascii(&trace),
        }),
        json!({
            "latex": rendered(&set)["latex"],
            "ascii": rendered(&set)["ascii"],
        }),
    ))
}
