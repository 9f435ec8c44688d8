//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function has a plain Rust twin returning `Result<String, String>`
//! so the logic is testable without a wasm toolchain. The page keeps one session
//! per tab; evaluated statements can refer to earlier ones.

use std::cell::RefCell;

use mex_core::comprehension::{emit_loops, evaluate, normalize};
use mex_core::render::{render_ascii, render_latex, DocBase, RenderableDocument};
use mex_core::session::Session;
use mex_core::subst::{parse_bindings, presentation, SubstForm};
use mex_core::{parse, Expr};
use wasm_bindgen::prelude::*;

thread_local! {
    static SESSION: RefCell<Session> = RefCell::new(Session::new());
}

fn err(e: mex_core::Error) -> String {
    e.to_string()
}

fn shown(e: &Expr) -> (String, String) {
    let doc = RenderableDocument::expr(e.clone());
    (render_ascii(&doc), render_latex(&doc))
}

/// Run one statement in the page session; returns `(%oN) value` or `name: value`.
pub fn eval_line(src: &str) -> Result<String, String> {
    SESSION.with(|s| {
        let out = s.borrow_mut().run_line(src).map_err(err)?;
        Ok(format!("({}) {}", out.name, shown(&out.value).0))
    })
}

/// Forget everything the page session has stored.
pub fn reset_session() {
    SESSION.with(|s| *s.borrow_mut() = Session::new());
}

/// Substitute and present the result in form `s`, `ss`, `sss` or `ssu`.
/// Returns the ascii rendering, a blank line, then the LaTeX source.
pub fn substitute(src: &str, bindings: &str, form: &str) -> Result<String, String> {
    let form: SubstForm = form.parse().map_err(err)?;
    let e = parse(src).map_err(err)?;
    let s = parse_bindings(bindings).map_err(err)?;
    let (v, _) = presentation(form, &e, &s, &Default::default()).map_err(err)?;
    let (ascii, latex) = shown(&v);
    Ok(format!("{ascii}\n\n{latex}"))
}

/// Evaluate a set comprehension: values, the trace tree, and the loop program.
pub fn comprehend(src: &str) -> Result<String, String> {
    let c = normalize(&parse(src).map_err(err)?).map_err(err)?;
    let ev = evaluate(&c).map_err(err)?;
    let values = shown(&Expr::op("set", ev.values.clone())).0;
    let tree = render_ascii(&RenderableDocument::new(DocBase::Trace(ev.tree)));
    Ok(format!("{values}\n\n{tree}\n\n{}", emit_loops(&c)))
}

#[wasm_bindgen(js_name = evalLine)]
pub fn eval_line_js(src: &str) -> Result<String, JsValue> {
    eval_line(src).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = resetSession)]
pub fn reset_session_js() {
    reset_session()
}

#[wasm_bindgen(js_name = substitute)]
pub fn substitute_js(src: &str, bindings: &str, form: &str) -> Result<String, JsValue> {
    substitute(src, bindings, form).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = comprehend)]
pub fn comprehend_js(src: &str) -> Result<String, JsValue> {
    comprehend(src).map_err(|e| JsValue::from_str(&e))
}
