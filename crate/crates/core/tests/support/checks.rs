//! Per-case property checks shared by the proptest suites and the acceptance run.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use mex_core::comprehension::{emit_loops, evaluate, run_loops, Clause, Comprehension};
use mex_core::paths::{mkholes, part, substpart};
use mex_core::simplify::{diff_verb, simplify_default};
use mex_core::subst::{alpha_equal, beta_reduce_traced, Strategy as Reduction};
use mex_core::{Error, Expr, Rational};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::{central_difference, env_f, eval_f64, eval_q, is_prefix, q, walk};

pub type CaseResult<T = ()> = Result<T, TestCaseError>;

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

/// 20 rational sample points for `x` and `y`.
pub fn sample_points() -> Vec<BTreeMap<String, Rational>> {
    (0..20)
        .map(|k: i64| {
            let mut env = BTreeMap::new();
            env.insert("x".to_string(), q(3 * k - 29, 7));
            env.insert("y".to_string(), q(5 - 2 * k, 3 + k % 4));
            env
        })
        .collect()
}

/// Idempotence and exact soundness of the simplifier on one expression.
pub fn simplify_case(e: &Expr) -> CaseResult {
    let points = sample_points();
    let s = match simplify_default(e) {
        Ok(s) => s,
        Err(err) => {
            if points.iter().any(|pt| eval_q(e, pt).is_some()) {
                return Err(fail(format!("simplify({e}) failed: {err}")));
            }
            return Ok(());
        }
    };
    let again = simplify_default(&s).map_err(|err| fail(format!("re-simplify: {err}")))?;
    if again != s {
        return Err(fail(format!("not idempotent: {e} -> {s} -> {again}")));
    }
    for pt in &points {
        let Some(before) = eval_q(e, pt) else { continue };
        match eval_q(&s, pt) {
            Some(after) if after == before => {}
            other => {
                return Err(fail(format!(
                    "{e} -> {s}: at {pt:?} expected {before}, got {other:?}"
                )))
            }
        }
    }
    Ok(())
}

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOLERANCE: f64 = 1e-6;
pub const FD_POINTS: [f64; 3] = [-0.7, 0.3, 1.1];

/// Symbolic derivative against central differences at three points.
pub fn diff_case(e: &Expr) -> CaseResult {
    let d = diff_verb(e, "x").map_err(|err| fail(format!("diff({e}): {err}")))?;
    for &x in &FD_POINTS {
        let (Some(fd), Some(sym)) = (
            central_difference(e, "x", x, FD_STEP),
            eval_f64(&d, &env_f(&[("x", x)])),
        ) else {
            return Err(fail(format!("d/dx {e} = {d} undefined at {x}")));
        };
        if (fd - sym).abs() >= FD_TOLERANCE {
            return Err(fail(format!(
                "d/dx {e} = {d}: at {x} symbolic {sym}, finite difference {fd}"
            )));
        }
    }
    Ok(())
}

/// Lambda terms with a few redexes and capture opportunities.
pub fn lambda_term() -> impl Strategy<Value = Expr> {
    let var = prop_oneof![Just("a"), Just("b"), Just("c"), Just("x")];
    let leaf = var.clone().prop_map(Expr::sym);
    leaf.prop_recursive(5, 40, 2, move |inner| {
        prop_oneof![
            (var.clone(), inner.clone()).prop_map(|(v, b)| Expr::lambda(vec![v.into()], b)),
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Expr::app(f, vec![a])),
            (var.clone(), inner.clone(), inner.clone()).prop_map(|(v, b, a)| Expr::app(
                Expr::lambda(vec![v.into()], b),
                vec![a]
            )),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::op("+", vec![a, b])),
            inner.prop_map(|a| Expr::call("f", vec![a])),
        ]
    })
}

pub const BETA_STEP_LIMIT: usize = 200;

/// Confluence of the two strategies plus free-variable containment on every step.
/// Returns whether the term terminated under both strategies.
pub fn beta_case(t: &Expr) -> CaseResult<bool> {
    let mut capture_ok = Ok(());
    let mut watch = |before: &Expr, after: &Expr| {
        let fb: BTreeSet<String> = before.free_variables();
        let fa = after.free_variables();
        if capture_ok.is_ok() && !fa.is_subset(&fb) {
            capture_ok = Err(fail(format!("free variables grew: {before} -> {after}")));
        }
    };
    let lo = beta_reduce_traced(t, BETA_STEP_LIMIT, Reduction::LeftmostOutermost, &mut watch);
    let ri = beta_reduce_traced(t, BETA_STEP_LIMIT, Reduction::RightmostInnermost, &mut watch);
    capture_ok?;
    match (lo, ri) {
        (Ok((a, _)), Ok((b, _))) => {
            if !alpha_equal(&a, &b) {
                return Err(fail(format!("{t}: normal forms differ: {a} vs {b}")));
            }
            Ok(true)
        }
        (Err(Error::NonTermination(_)), _) | (_, Err(Error::NonTermination(_))) => Ok(false),
        (Err(e), _) | (_, Err(e)) => Err(fail(format!("{t}: {e}"))),
    }
}

/// `part`/`substpart` round trip at one path.
pub fn paths_case(e: &Expr, path: &[usize], repl: &Expr) -> CaseResult {
    let sub = part(e, path).map_err(|err| fail(format!("part {path:?} of {e}: {err}")))?;
    let expected = walk(e, path);
    if path.last() != Some(&0) && expected != Some(&sub) {
        return Err(fail(format!("part {path:?} of {e} = {sub}, expected {expected:?}")));
    }
    let back = substpart(sub.clone(), e, path).map_err(|err| fail(err.to_string()))?;
    if &back != e {
        return Err(fail(format!("substpart(part) changed {e} into {back}")));
    }
    if path.last() == Some(&0) {
        return Ok(());
    }
    let put = substpart(repl.clone(), e, path).map_err(|err| fail(err.to_string()))?;
    let got = part(&put, path).map_err(|err| fail(err.to_string()))?;
    if &got != repl {
        return Err(fail(format!("part(substpart({repl})) at {path:?} gave {got}")));
    }
    Ok(())
}

/// Non-overlapping, non-head paths chosen by `picks`.
pub fn pick_hole_paths(all: &[Vec<usize>], picks: &[usize]) -> Vec<Vec<usize>> {
    let candidates: Vec<&Vec<usize>> = all
        .iter()
        .filter(|p| !p.is_empty() && p.last() != Some(&0))
        .collect();
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    if candidates.is_empty() {
        return chosen;
    }
    for &k in picks {
        let c = candidates[k % candidates.len()];
        if chosen.iter().all(|o| !is_prefix(o, c) && !is_prefix(c, o)) {
            chosen.push(c.clone());
        }
    }
    chosen
}

/// `mkholes` puts holes exactly at the paths and filling them back restores the tree.
pub fn mkholes_case(e: &Expr, paths: &[Vec<usize>]) -> CaseResult {
    let x = mkholes(e, paths).map_err(|err| fail(format!("mkholes {paths:?}: {err}")))?;
    for p in paths {
        match walk(&x.statement, p) {
            Some(Expr::Hole(_)) => {}
            other => return Err(fail(format!("no hole at {p:?}: {other:?}"))),
        }
    }
    let answers = x.answers().map_err(|err| fail(err.to_string()))?;
    let filled = x.fill(&answers).map_err(|err| fail(err.to_string()))?;
    if &filled != e {
        return Err(fail(format!("fill-back gave {filled}, expected {e}")));
    }
    Ok(())
}

const GEN_VARS: [&str; 3] = ["a", "b", "c"];

fn linear(vars: &[&'static str]) -> BoxedStrategy<Expr> {
    let c = (-3i64..=6).prop_map(Expr::int);
    if vars.is_empty() {
        return c.boxed();
    }
    let vs = vars.to_vec();
    prop_oneof![
        c,
        prop::sample::select(vs.clone()).prop_map(Expr::sym),
        (prop::sample::select(vs.clone()), -2i64..=3)
            .prop_map(|(v, k)| Expr::op("+", vec![Expr::sym(v), Expr::int(k)])),
        (prop::sample::select(vs), 2i64..=3)
            .prop_map(|(v, k)| Expr::op("*", vec![Expr::int(k), Expr::sym(v)])),
    ]
    .boxed()
}

fn source(bound: &[&'static str]) -> BoxedStrategy<Expr> {
    let explicit = prop::collection::btree_set(-3i64..=8, 0..=6)
        .prop_map(|s| Expr::op("set", s.into_iter().map(Expr::int).collect()));
    let range = (linear(bound), -1i64..=5).prop_map(|(lo, k)| {
        let hi = simplify_default(&Expr::op("+", vec![lo.clone(), Expr::int(k)]))
            .expect("linear bound");
        Expr::op("range", vec![lo, hi])
    });
    prop_oneof![explicit, range].boxed()
}

fn filter(bound: &[&'static str]) -> BoxedStrategy<Expr> {
    let rel = prop::sample::select(vec!["<", "<=", ">", ">=", "=", "!="]);
    (rel, linear(bound), linear(bound))
        .prop_map(|(r, a, b)| Expr::op(r, vec![a, b]))
        .boxed()
}

fn result(bound: &[&'static str]) -> BoxedStrategy<Expr> {
    let vs: Vec<Expr> = bound.iter().map(|v| Expr::sym(*v)).collect();
    let tuple = Expr::op("tuple", vs.clone());
    let terms: Vec<Expr> = bound
        .iter()
        .enumerate()
        .map(|(i, v)| Expr::op("*", vec![Expr::int(10i64.pow(i as u32 + 1)), Expr::sym(*v)]))
        .collect();
    let sum = if terms.len() == 1 {
        terms[0].clone()
    } else {
        Expr::op("+", terms)
    };
    let square = Expr::op("^", vec![vs[0].clone(), Expr::int(2)]);
    let mut options = vec![sum, square];
    if vs.len() > 1 {
        options.push(tuple);
    } else {
        options.push(vs[0].clone());
    }
    prop::sample::select(options).boxed()
}

/// Comprehensions with at most three generators over sets of at most six elements.
pub fn comprehension() -> impl Strategy<Value = Comprehension> {
    (1usize..=3)
        .prop_flat_map(|n| {
            let bound: Vec<&'static str> = GEN_VARS[..n].to_vec();
            let sources: Vec<BoxedStrategy<Expr>> =
                (0..n).map(|i| source(&GEN_VARS[..i])).collect();
            let filters: Vec<BoxedStrategy<Option<Expr>>> = (0..n)
                .map(|i| prop::option::weighted(0.4, filter(&GEN_VARS[..=i])).boxed())
                .collect();
            (sources, filters, result(&bound))
        })
        .prop_map(|(sources, filters, res)| {
            let mut clauses = Vec::new();
            for (i, (s, f)) in sources.into_iter().zip(filters).enumerate() {
                clauses.push(Clause::Gen {
                    vars: vec![GEN_VARS[i].to_string()],
                    source: s,
                });
                if let Some(f) = f {
                    clauses.push(Clause::Filter(f));
                }
            }
            clauses.push(Clause::Result(res));
            Comprehension::new(clauses).expect("generated comprehension is well formed")
        })
}

type Env = BTreeMap<String, Rational>;

fn oracle_elements(source: &Expr, env: &Env) -> Vec<Rational> {
    match source {
        Expr::Op(n, items) if n == "set" => {
            items.iter().map(|i| eval_q(i, env).expect("literal")).collect()
        }
        Expr::Op(n, b) if n == "range" => {
            let lo = eval_q(&b[0], env).expect("bound").to_integer();
            let hi = eval_q(&b[1], env).expect("bound").to_integer();
            let mut out = Vec::new();
            let mut k = lo;
            while k <= hi {
                out.push(Rational::from_integer(k.clone()));
                k += 1;
            }
            out
        }
        other => panic!("unexpected source {other}"),
    }
}

fn oracle_truth(c: &Expr, env: &Env) -> bool {
    let Expr::Op(r, args) = c else { panic!("filter {c}") };
    let a = eval_q(&args[0], env).expect("filter side");
    let b = eval_q(&args[1], env).expect("filter side");
    match r.as_str() {
        "<" => a < b,
        "<=" => a <= b,
        ">" => a > b,
        ">=" => a >= b,
        "=" => a == b,
        "!=" => a != b,
        _ => panic!("relation {r}"),
    }
}

fn components(e: &Expr, env: &Env) -> Vec<Rational> {
    match e.as_op("tuple") {
        Some(xs) => xs.iter().map(|x| eval_q(x, env).expect("value")).collect(),
        None => vec![eval_q(e, env).expect("value")],
    }
}

/// Brute-force nested loops, in generator order.
pub fn oracle(c: &Comprehension) -> Vec<Vec<Rational>> {
    fn go(clauses: &[Clause], env: &mut Env, out: &mut Vec<Vec<Rational>>) {
        let Some((first, rest)) = clauses.split_first() else { return };
        match first {
            Clause::Result(e) => out.push(components(e, env)),
            Clause::Filter(f) => {
                if oracle_truth(f, env) {
                    go(rest, env, out)
                }
            }
            Clause::Gen { vars, source } => {
                for x in oracle_elements(source, env) {
                    env.insert(vars[0].clone(), x);
                    go(rest, env, out);
                }
                env.remove(&vars[0]);
            }
        }
    }
    let mut out = Vec::new();
    go(&c.clauses, &mut Env::new(), &mut out);
    out
}

fn as_rows(values: &[Expr]) -> Vec<Vec<Rational>> {
    values.iter().map(|v| components(v, &Env::new())).collect()
}

/// Evaluator against the loop oracle, and the emitted loop program against the evaluator.
pub fn comprehension_case(c: &Comprehension) -> CaseResult {
    let ev = evaluate(c).map_err(|err| fail(format!("evaluate {}: {err}", c.to_expr())))?;
    let expected = oracle(c);
    let got = as_rows(&ev.raw);
    if got != expected {
        return Err(fail(format!(
            "{}: evaluator {got:?}, oracle {expected:?}",
            c.to_expr()
        )));
    }
    let program = emit_loops(c);
    let ran = run_loops(&program).map_err(|err| fail(format!("{program}\n{err}")))?;
    if ran != ev.raw {
        return Err(fail(format!("{program}\nprinted {ran:?}, evaluator {:?}", ev.raw)));
    }
    Ok(())
}
