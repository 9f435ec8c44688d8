//! Test-side oracles, written against the public `Expr` shape only.
#![allow(dead_code)]

pub mod checks;

use std::collections::BTreeMap;

use mex_core::{Expr, Rational};
use num::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

pub fn p(src: &str) -> Expr {
    mex_core::parse(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn base_op(name: &str) -> &str {
    name.strip_suffix('.').unwrap_or(name)
}

/// Exact value of a rational-function expression; `None` when undefined or unsupported.
pub fn eval_q(e: &Expr, env: &BTreeMap<String, Rational>) -> Option<Rational> {
    match e {
        Expr::Num(r) => Some(r.clone()),
        Expr::Sym(s) => env.get(s).cloned(),
        Expr::Op(name, args) => {
            let vals: Option<Vec<Rational>> = args.iter().map(|a| eval_q(a, env)).collect();
            let vals = vals?;
            match (base_op(name), vals.as_slice()) {
                ("+", _) => Some(vals.iter().fold(Rational::zero(), |a, b| a + b)),
                ("*", _) => Some(vals.iter().fold(Rational::one(), |a, b| a * b)),
                ("neg", [a]) => Some(-a),
                ("-", [a, b]) => Some(a - b),
                ("/", [a, b]) if !b.is_zero() => Some(a / b),
                ("^", [a, k]) if k.is_integer() => {
                    let k = k.to_integer().to_i32()?;
                    if k.abs() > 64 || (k < 0 && a.is_zero()) {
                        return None;
                    }
                    let mut r = Rational::one();
                    for _ in 0..k.abs() {
                        r *= a;
                    }
                    Some(if k < 0 { r.recip() } else { r })
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// Floating value of an elementary expression; derivative nouns `'diff(f, v)` are
/// evaluated by central differences.
pub fn eval_f64(e: &Expr, env: &BTreeMap<String, f64>) -> Option<f64> {
    let v = match e {
        Expr::Quoted(inner) => match inner.as_call() {
            Some(("diff", [f, Expr::Sym(v)])) => {
                let at = *env.get(v)?;
                let h = 1e-5;
                let mut env = env.clone();
                env.insert(v.clone(), at + h);
                let up = eval_f64(f, &env)?;
                env.insert(v.clone(), at - h);
                let down = eval_f64(f, &env)?;
                (up - down) / (2.0 * h)
            }
            _ => eval_f64(inner, env)?,
        },
        Expr::Num(r) => r.to_f64()?,
        Expr::Sym(s) => match s.as_str() {
            "pi" | "%pi" => std::f64::consts::PI,
            "%e" => std::f64::consts::E,
            _ => *env.get(s)?,
        },
        Expr::App(head, args) => {
            let [a] = args.as_slice() else { return None };
            let a = eval_f64(a, env)?;
            match head.as_sym()? {
                "sin" => a.sin(),
                "cos" => a.cos(),
                "tan" => a.tan(),
                "exp" => a.exp(),
                "log" | "ln" => a.ln(),
                "sqrt" => a.sqrt(),
                _ => return None,
            }
        }
        Expr::Op(name, args) => {
            let vals: Option<Vec<f64>> = args.iter().map(|a| eval_f64(a, env)).collect();
            let vals = vals?;
            match (base_op(name), vals.as_slice()) {
                ("+", _) => vals.iter().sum(),
                ("*", _) => vals.iter().product(),
                ("neg", [a]) => -a,
                ("-", [a, b]) => a - b,
                ("/", [a, b]) => a / b,
                ("^", [a, b]) => a.powf(*b),
                _ => return None,
            }
        }
        _ => return None,
    };
    v.is_finite().then_some(v)
}

/// Central difference of `e` in `var` at `at`.
pub fn central_difference(e: &Expr, var: &str, at: f64, h: f64) -> Option<f64> {
    let mut env = BTreeMap::new();
    env.insert(var.to_string(), at + h);
    let up = eval_f64(e, &env)?;
    env.insert(var.to_string(), at - h);
    let down = eval_f64(e, &env)?;
    Some((up - down) / (2.0 * h))
}

pub fn env_q(pairs: &[(&str, Rational)]) -> BTreeMap<String, Rational> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

pub fn env_f(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Rational-function expressions over `x` and `y`.
pub fn arith_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-6i64..=6).prop_map(Expr::int),
        ((-6i64..=6), (1i64..=4)).prop_map(|(n, d)| Expr::ratio(n, d)),
        Just(Expr::sym("x")),
        Just(Expr::sym("y")),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(|xs| Expr::op("+", xs)),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(|xs| Expr::op("*", xs)),
            inner.clone().prop_map(|a| Expr::op("neg", vec![a])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::op("-", vec![a, b])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::op("/", vec![a, b])),
            (inner, -2i64..=3).prop_map(|(a, k)| Expr::op("^", vec![a, Expr::int(k)])),
        ]
    })
}

/// Smooth expressions in `x`, bounded on [-1.5, 1.5].
pub fn smooth_expr() -> impl Strategy<Value = Expr> {
    let x = || Expr::sym("x");
    let leaf = prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        Just(x()),
        (1i64..=4).prop_map(move |k| Expr::op("^", vec![Expr::sym("x"), Expr::int(k)])),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        let x2p1 = |a: Expr| {
            Expr::op("+", vec![Expr::op("^", vec![a, Expr::int(2)]), Expr::int(1)])
        };
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::op("+", vec![a, b])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::op("*", vec![a, b])),
            inner.clone().prop_map(|a| Expr::call("sin", vec![a])),
            inner.clone().prop_map(|a| Expr::call("cos", vec![a])),
            inner
                .clone()
                .prop_map(|a| Expr::call("exp", vec![Expr::call("sin", vec![a])])),
            inner.clone().prop_map(move |a| Expr::call("log", vec![x2p1(a)])),
            inner.clone().prop_map(move |a| Expr::call("sqrt", vec![x2p1(a)])),
            inner.prop_map(move |a| Expr::op("/", vec![Expr::int(1), x2p1(a)])),
        ]
    })
}

/// Every path in `e`, heads included.
pub fn all_paths(e: &Expr) -> Vec<Vec<usize>> {
    fn go(e: &Expr, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if matches!(e, Expr::App(..) | Expr::Op(..)) {
            cur.push(0);
            out.push(cur.clone());
            cur.pop();
        }
        for (i, c) in e.children().iter().enumerate() {
            cur.push(i + 1);
            go(c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

/// Subtree at `path` by direct traversal.
pub fn walk<'a>(e: &'a Expr, path: &[usize]) -> Option<&'a Expr> {
    let Some((&i, rest)) = path.split_first() else {
        return Some(e);
    };
    if i == 0 {
        return match e {
            Expr::App(h, _) if rest.is_empty() => Some(h),
            _ => None,
        };
    }
    walk(e.children().get(i - 1)?, rest)
}

pub fn is_prefix(a: &[usize], b: &[usize]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

pub fn rat_signum(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}
