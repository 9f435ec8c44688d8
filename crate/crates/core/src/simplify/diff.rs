//! Symbolic differentiation (the `diff` verb).

use super::{contains_lazy, simplify_with, Definitions, SimplifyOptions};
use crate::error::{Error, Result};
use crate::expr::{Expr, BUILTIN_FUNCTIONS};
use crate::subst;

/// `d/dv e`, actively simplified. Opaque heads need [`diff_verb_with`].
pub fn diff_verb(e: &Expr, v: &str) -> Result<Expr> {
    diff_verb_with(e, v, &Definitions::new())
}

pub fn diff_verb_with(e: &Expr, v: &str, defs: &Definitions) -> Result<Expr> {
    let d = Differ::new(defs).diff(e, v)?;
    simplify_with(&d, &SimplifyOptions::default(), defs)
}

fn mul(args: Vec<Expr>) -> Expr {
    Expr::op("*", args)
}

fn add(args: Vec<Expr>) -> Expr {
    match args.len() {
        0 => Expr::zero(),
        1 => args.into_iter().next().unwrap(),
        _ => Expr::op("+", args),
    }
}

fn pow(b: Expr, x: Expr) -> Expr {
    Expr::op("^", vec![b, x])
}

/// Name of the derivative of a function head: `f` becomes `f'`.
pub fn primed(name: &str) -> String {
    format!("{name}'")
}

pub(crate) struct Differ<'a> {
    defs: &'a Definitions,
}

impl<'a> Differ<'a> {
    pub(crate) fn new(defs: &'a Definitions) -> Self {
        Differ { defs }
    }

    /// Unsimplified derivative.
    pub(crate) fn diff(&self, e: &Expr, v: &str) -> Result<Expr> {
        if let Expr::Quoted(inner) = e {
            return Ok(Expr::quote(Expr::call(
                "diff",
                vec![(**inner).clone(), Expr::sym(v)],
            )));
        }
        if contains_lazy(e) {
            return Ok(Expr::call("diff", vec![e.clone(), Expr::sym(v)]));
        }
        if !e.contains_sym(v) {
            return Ok(Expr::zero());
        }
        match e {
            Expr::Sym(_) => Ok(Expr::one()),
            Expr::Op(name, args) => self.op(name, args, v),
            Expr::App(head, args) => self.app(head, args, v),
            other => Err(Error::CannotDifferentiate(head_name(other))),
        }
    }

    fn op(&self, name: &str, args: &[Expr], v: &str) -> Result<Expr> {
        match (name, args) {
            ("+", _) => Ok(add(
                args.iter()
                    .map(|a| self.diff(a, v))
                    .collect::<Result<_>>()?,
            )),
            ("*", _) => {
                let mut terms = Vec::new();
                for (i, a) in args.iter().enumerate() {
                    if !a.contains_sym(v) {
                        continue;
                    }
                    let mut fs: Vec<Expr> = args
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, f)| f.clone())
                        .collect();
                    fs.push(self.diff(a, v)?);
                    terms.push(mul(fs));
                }
                Ok(add(terms))
            }
            ("neg", [a]) => Ok(mul(vec![Expr::int(-1), self.diff(a, v)?])),
            ("-", [a, b]) => Ok(add(vec![
                self.diff(a, v)?,
                mul(vec![Expr::int(-1), self.diff(b, v)?]),
            ])),
            ("/", [a, b]) => {
                let q = mul(vec![a.clone(), pow(b.clone(), Expr::int(-1))]);
                self.diff(&q, v)
            }
            ("^", [b, n]) => {
                let db = self.diff(b, v)?;
                if !n.contains_sym(v) {
                    let n1 = add(vec![n.clone(), Expr::int(-1)]);
                    return Ok(mul(vec![n.clone(), pow(b.clone(), n1), db]));
                }
                let dn = self.diff(n, v)?;
                let log_b = Expr::call("log", vec![b.clone()]);
                if !b.contains_sym(v) {
                    return Ok(mul(vec![pow(b.clone(), n.clone()), log_b, dn]));
                }
                Ok(mul(vec![
                    pow(b.clone(), n.clone()),
                    add(vec![
                        mul(vec![dn, log_b]),
                        mul(vec![n.clone(), db, pow(b.clone(), Expr::int(-1))]),
                    ]),
                ]))
            }
            ("=", [l, r]) => Ok(Expr::eq(self.diff(l, v)?, self.diff(r, v)?)),
            ("prime", [a]) => {
                let inner = self.diff(a, "x")?;
                self.diff(&inner, v)
            }
            _ => Err(Error::CannotDifferentiate(name.to_string())),
        }
    }

    fn app(&self, head: &Expr, args: &[Expr], v: &str) -> Result<Expr> {
        if let Expr::Lambda(..) = head {
            let r = subst::beta_reduce(
                &Expr::app(head.clone(), args.to_vec()),
                subst::DEFAULT_STEP_LIMIT,
            )?;
            return self.diff(&r, v);
        }
        let Some(name) = head.as_sym() else {
            return Err(Error::CannotDifferentiate(head_name(head)));
        };
        if let Some((params, body)) = self.defs.lookup(name) {
            if params.len() == args.len() {
                let lam = Expr::lambda(params.clone(), body.clone());
                let r = subst::beta_reduce(&Expr::app(lam, args.to_vec()), subst::DEFAULT_STEP_LIMIT)?;
                return self.diff(&r, v);
            }
        }
        if name == "diff" {
            if let [f, Expr::Sym(w)] = args {
                let inner = self.diff(f, w)?;
                return self.diff(&inner, v);
            }
        }
        if self.defs.is_opaque(name) {
            let [u] = args else {
                return Err(Error::CannotDifferentiate(name.to_string()));
            };
            let outer = Expr::call(primed(name), vec![u.clone()]);
            if matches!(u, Expr::Sym(s) if s == v) {
                return Ok(outer);
            }
            return Ok(mul(vec![outer, self.diff(u, v)?]));
        }
        let [u] = args else {
            return Err(Error::CannotDifferentiate(name.to_string()));
        };
        if !BUILTIN_FUNCTIONS.contains(&name) {
            return Err(Error::CannotDifferentiate(name.to_string()));
        }
        let du = self.diff(u, v)?;
        let call = |f: &str| Expr::call(f, vec![u.clone()]);
        let outer = match name {
            "sin" => call("cos"),
            "cos" => mul(vec![Expr::int(-1), call("sin")]),
            "tan" => pow(call("cos"), Expr::int(-2)),
            "exp" => call("exp"),
            "log" => pow(u.clone(), Expr::int(-1)),
            "sqrt" => mul(vec![Expr::ratio(1, 2), pow(call("sqrt"), Expr::int(-1))]),
            _ => unreachable!("checked against BUILTIN_FUNCTIONS"),
        };
        Ok(mul(vec![outer, du]))
    }
}

fn head_name(e: &Expr) -> String {
    match e {
        Expr::Op(name, _) => name.clone(),
        Expr::App(head, _) => head_name(head),
        Expr::Lambda(..) => "lambda".into(),
        Expr::Hole(_) => "?".into(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;
    use crate::simplify::simplify_default;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn polynomials() {
        assert_eq!(diff_verb(&p("x^2"), "x").unwrap(), p("2*x"));
        assert_eq!(
            diff_verb(&p("(6*x^3)*(7*x^4)"), "x").unwrap(),
            p("294*x^6")
        );
        assert_eq!(diff_verb(&p("y"), "x").unwrap(), p("0"));
    }

    #[test]
    fn chain_through_builtins() {
        let d = diff_verb(&p("sin(x^2)"), "x").unwrap();
        assert_eq!(d, simplify_default(&p("2*x*cos(x^2)")).unwrap());
        assert_eq!(diff_verb(&p("log(x)"), "x").unwrap(), p("x^-1"));
    }

    #[test]
    fn opaque_heads_keep_their_name() {
        let defs = Definitions::with_opaque(["f", "g"]);
        let d = diff_verb_with(&p("f(g(x))"), "x", &defs).unwrap();
        assert_eq!(d, simplify_default(&p("f'(g(x)) * g'(x)")).unwrap());
        assert!(matches!(
            diff_verb(&p("f(x)"), "x"),
            Err(Error::CannotDifferentiate(h)) if h == "f"
        ));
    }

    #[test]
    fn noun_stays_a_noun() {
        let d = diff_verb(&p("'(x^2)"), "x").unwrap();
        assert_eq!(d, p("'diff(x^2, x)"));
    }
}
