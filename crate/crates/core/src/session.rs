//! A REPL-style session: named objects, `%`, function definitions and the command set
//! (`solve`, `subst`, `psubst`, `define`, `diff`, `V`, `dpart`, `substpart`, `part`,
//! `mkholes`, `lisptree`).

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::json;
use crate::parser::{parse, parse_statement, Statement, Terminator};
use crate::paths::{self, Exercise, Path};
use crate::rules::solve_linear_with;
use crate::simplify::{self, diff_verb_with, Definitions, SimplifyOptions};
use crate::subst::{self, SubstForm, Substitution};

/// The chain rule as a column: `d/dx f(g(x))` over `= f'(g(x)) g'(x)`.
pub fn rcv() -> Expr {
    let gx = Expr::call("g", vec![Expr::sym("x")]);
    let top = Expr::quote(Expr::call(
        "diff",
        vec![Expr::call("f", vec![gx.clone()]), Expr::sym("x")],
    ));
    let bottom = Expr::op(
        "*",
        vec![
            Expr::call("f'", vec![gx]),
            Expr::call("g'", vec![Expr::sym("x")]),
        ],
    );
    Expr::op(
        "vcol",
        vec![
            Expr::op("list", vec![top]),
            Expr::op("list", vec![Expr::sym("="), bottom]),
        ],
    )
}

#[derive(Clone, Debug, PartialEq)]
pub enum Object {
    Expr(Expr),
    Derivation(Derivation),
    Exercise(Exercise),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Expr(_) => "expr",
            Object::Derivation(_) => "derivation",
            Object::Exercise(_) => "exercise",
        }
    }
}

/// Result of one statement.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub value: Expr,
    /// `false` after a `$` terminator.
    pub show: bool,
    /// The statement asked for a tree drawing (`lisptree`).
    pub tree: bool,
    /// Name the value was stored under.
    pub name: String,
}

const COMMANDS: &[&str] = &[
    "solve", "subst", "psubst", "define", "diff", "V", "dpart", "substpart", "part", "mkholes",
    "lisptree", "lisptree2", "lisptreem", "ev", "simplify",
];

#[derive(Clone, Debug)]
pub struct Session {
    objects: BTreeMap<String, Object>,
    defs: Definitions,
    last: Option<Expr>,
    counter: usize,
    /// Exercise produced by the most recent `mkholes`.
    pub last_exercise: Option<Exercise>,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        let mut s = Session {
            objects: BTreeMap::new(),
            defs: Definitions::new(),
            last: None,
            counter: 0,
            last_exercise: None,
        };
        s.objects.insert("RCV".into(), Object::Expr(rcv()));
        s
    }

    pub fn definitions(&self) -> &Definitions {
        &self.defs
    }

    pub fn get(&self, name: &str) -> Option<&Object> {
        self.objects.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = (&String, &Object)> {
        self.objects.iter()
    }

    pub fn set(&mut self, name: &str, obj: Object) {
        self.objects.insert(name.to_string(), obj);
    }

    /// Bind a new name; rebinding an existing one is an error.
    pub fn insert_new(&mut self, name: &str, obj: Object) -> Result<()> {
        if self.objects.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        self.set(name, obj);
        Ok(())
    }

    pub fn expr(&self, name: &str) -> Result<&Expr> {
        match self.objects.get(name) {
            Some(Object::Expr(e)) => Ok(e),
            Some(other) => Err(Error::wrong_shape("an expression", other.kind())),
            None => Err(Error::UnknownName(name.to_string())),
        }
    }

    /// The previous result, `%`.
    pub fn last(&self) -> Option<&Expr> {
        self.last.as_ref()
    }

    /// A name, if it is bound to an expression, else the source parsed and resolved.
    pub fn target(&self, name_or_src: &str) -> Result<Expr> {
        let t = name_or_src.trim();
        if let Some(Object::Expr(e)) = self.objects.get(t) {
            return Ok(e.clone());
        }
        Ok(self.resolve(&parse(t)?))
    }

    /// Store `e` under `label`, or under the next `%o` name. A label may not rebind an
    /// existing name. The value becomes `%`.
    pub fn store(&mut self, label: Option<&str>, e: Expr) -> Result<String> {
        let name = match label {
            Some(l) => {
                self.insert_new(l, Object::Expr(e.clone()))?;
                self.counter += 1;
                l.to_string()
            }
            None => {
                let n = self.next_name();
                self.set(&n, Object::Expr(e.clone()));
                n
            }
        };
        self.last = Some(e);
        Ok(name)
    }

    /// Everything needed to rebuild the session with [`Session::restore`].
    pub fn snapshot(&self) -> Value {
        let objects: serde_json::Map<String, Value> = self
            .objects
            .iter()
            .map(|(k, o)| {
                let v = match o {
                    Object::Expr(e) => json!({"kind": "expr", "value": json::to_value(e)}),
                    Object::Derivation(d) => json!({"kind": "derivation", "value": d.to_json()}),
                    Object::Exercise(x) => json!({"kind": "exercise", "value": x.to_json()}),
                };
                (k.clone(), v)
            })
            .collect();
        let functions: serde_json::Map<String, Value> = self
            .defs
            .functions
            .iter()
            .map(|(k, (params, body))| {
                (k.clone(), json!({"params": params, "body": json::to_value(body)}))
            })
            .collect();
        json!({
            "objects": objects,
            "functions": functions,
            "opaque": self.defs.opaque,
            "last": self.last.as_ref().map(json::to_value),
            "counter": self.counter,
        })
    }

    pub fn restore(v: &Value) -> Result<Session> {
        let bad = |what: &str| Error::Json(format!("session snapshot: bad `{what}`"));
        let mut s = Session::new();
        s.objects.clear();
        for (k, o) in v["objects"].as_object().ok_or_else(|| bad("objects"))? {
            let value = &o["value"];
            let obj = match o["kind"].as_str() {
                Some("expr") => Object::Expr(json::from_value(value)?),
                Some("derivation") => Object::Derivation(Derivation::from_json(value)?),
                Some("exercise") => Object::Exercise(Exercise::from_json(value)?),
                _ => return Err(bad("kind")),
            };
            s.objects.insert(k.clone(), obj);
        }
        for (k, f) in v["functions"].as_object().ok_or_else(|| bad("functions"))? {
            let params: Vec<String> =
                serde_json::from_value(f["params"].clone()).map_err(|_| bad("params"))?;
            s.defs.functions.insert(k.clone(), (params, json::from_value(&f["body"])?));
        }
        s.defs.opaque =
            serde_json::from_value(v["opaque"].clone()).map_err(|_| bad("opaque"))?;
        s.last = match &v["last"] {
            Value::Null => None,
            e => Some(json::from_value(e)?),
        };
        s.counter = v["counter"].as_u64().ok_or_else(|| bad("counter"))? as usize;
        Ok(s)
    }

    fn next_name(&mut self) -> String {
        self.counter += 1;
        format!("%o{}", self.counter)
    }

    /// Run one input line such as `eq1 : f(P[1]) = P[2];`.
    pub fn run_line(&mut self, src: &str) -> Result<Output> {
        let stmt = parse_statement(src)?;
        self.run_statement(&stmt)
    }

    pub fn run_statement(&mut self, stmt: &Statement) -> Result<Output> {
        let (value, tree) = self.eval_top(&stmt.expr)?;
        let name = match &stmt.label {
            Some(l) => {
                self.set(l, Object::Expr(value.clone()));
                self.counter += 1;
                l.clone()
            }
            None => {
                let n = self.next_name();
                self.set(&n, Object::Expr(value.clone()));
                n
            }
        };
        self.last = Some(value.clone());
        Ok(Output {
            value,
            show: stmt.terminator != Terminator::Silent,
            tree,
            name,
        })
    }

    /// Replace bound names and `%` by their values (function heads are left alone).
    pub fn resolve(&self, e: &Expr) -> Expr {
        let mut map: BTreeMap<String, Expr> = self
            .objects
            .iter()
            .filter(|(k, _)| !k.starts_with('%'))
            .filter_map(|(k, v)| match v {
                Object::Expr(x) => Some((k.clone(), x.clone())),
                _ => None,
            })
            .collect();
        if let Some(l) = &self.last {
            map.insert("%".into(), l.clone());
        }
        for name in self.objects.keys().filter(|k| k.starts_with("%o")) {
            if let Some(Object::Expr(x)) = self.objects.get(name) {
                map.insert(name.clone(), x.clone());
            }
        }
        resolve_values(e, &map)
    }

    fn simp(&self, e: &Expr) -> Result<Expr> {
        simplify::simplify_with(e, &SimplifyOptions::default(), &self.defs)
    }

    fn eval_top(&mut self, e: &Expr) -> Result<(Expr, bool)> {
        if let Expr::App(head, args) = e {
            if let Some(name @ ("lisptree" | "lisptree2" | "lisptreem")) = head.as_sym() {
                let [x] = args.as_slice() else {
                    return Err(Error::wrong_shape(format!("{name}(expr)"), e));
                };
                return Ok((self.eval(x)?, true));
            }
        }
        Ok((self.eval(e)?, false))
    }

    /// Evaluate an expression in this session.
    pub fn eval(&mut self, e: &Expr) -> Result<Expr> {
        if let Some([lhs, rhs]) = e.as_op(":=") {
            return self.assign(lhs, rhs);
        }
        let expanded = self.commands(e)?;
        self.simp(&self.resolve(&expanded))
    }

    fn assign(&mut self, lhs: &Expr, rhs: &Expr) -> Result<Expr> {
        match lhs {
            Expr::Sym(name) => {
                let v = self.eval(rhs)?;
                self.set(name, Object::Expr(v.clone()));
                Ok(Expr::op(":=", vec![lhs.clone(), v]))
            }
            Expr::App(head, params) => {
                let name = head
                    .as_sym()
                    .ok_or_else(|| Error::MalformedBinding(lhs.to_string()))?;
                let params = params
                    .iter()
                    .map(|p| {
                        p.as_sym()
                            .map(str::to_string)
                            .ok_or_else(|| Error::MalformedBinding(lhs.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.defs.define(name, params, rhs.clone())?;
                Ok(Expr::op(":=", vec![lhs.clone(), rhs.clone()]))
            }
            other => Err(Error::MalformedBinding(other.to_string())),
        }
    }

    /// Replace command calls and substitution operators by their results, bottom-up.
    fn commands(&mut self, e: &Expr) -> Result<Expr> {
        match e {
            Expr::Quoted(_) | Expr::Lambda(..) => Ok(e.clone()),
            Expr::App(head, args) => {
                if let Some(name) = head.as_sym().filter(|n| COMMANDS.contains(n)) {
                    let name = name.to_string();
                    return self.command(&name, args);
                }
                let args = args.iter().map(|a| self.commands(a)).collect::<Result<_>>()?;
                Ok(Expr::App(head.clone(), args))
            }
            Expr::Op(name, args) if SubstForm::from_op_name(name).is_some() && args.len() == 2 => {
                let form = SubstForm::from_op_name(name).expect("checked");
                let t = self.commands(&args[0])?;
                let target = self.resolve(&t);
                let b = self.commands(&args[1])?;
                let s = Substitution::from_expr(&self.resolve(&b))?;
                Ok(subst::presentation(form, &target, &s, &self.defs)?.0)
            }
            other => other.try_map_subexprs(|c| self.commands(c)),
        }
    }

    /// Arguments evaluated: commands expanded, names resolved, simplified.
    fn value_arg(&mut self, a: &Expr) -> Result<Expr> {
        let x = self.commands(a)?;
        self.simp(&self.resolve(&x))
    }

    /// Arguments taken as written, with names resolved (for path operations).
    fn literal_arg(&mut self, a: &Expr) -> Result<Expr> {
        let x = self.commands(a)?;
        Ok(self.resolve(&x))
    }

    fn command(&mut self, name: &str, args: &[Expr]) -> Result<Expr> {
        let shape = |what: &str| Error::wrong_shape(what.to_string(), format!("{name}(...)"));
        match name {
            "solve" => {
                let [eqs, unknowns] = args else {
                    return Err(shape("solve(equations, unknowns)"));
                };
                let eqs = as_items(&self.value_arg(eqs)?);
                let unknowns = as_items(&self.literal_arg(unknowns)?);
                let s = solve_linear_with(&eqs, &unknowns, &self.defs)?;
                let row = s
                    .bindings
                    .iter()
                    .map(|b| Expr::eq(b.lhs.to_expr(), b.rhs.clone()))
                    .collect();
                Ok(Expr::op("list", vec![Expr::op("list", row)]))
            }
            "subst" | "psubst" => {
                let [s, e] = args else {
                    return Err(shape("subst(bindings, expr)"));
                };
                let s = Substitution::from_expr(&self.literal_arg(s)?)?;
                let e = self.value_arg(e)?;
                let out = if name == "subst" {
                    subst::apply_sequential(&e, &s)?
                } else {
                    subst::psubst(&e, &s)?
                };
                self.simp(&out)
            }
            "define" => {
                let [lhs, body] = args else {
                    return Err(shape("define(f(x), body)"));
                };
                let body = self.value_arg(body)?;
                self.assign(lhs, &body)
            }
            "diff" => {
                let [e, v] = args else {
                    return Err(shape("diff(expr, var)"));
                };
                let v = v
                    .as_sym()
                    .ok_or_else(|| Error::wrong_shape("a variable", v))?
                    .to_string();
                let e = self.value_arg(e)?;
                diff_verb_with(&e, &v, &self.defs)
            }
            "V" => {
                let [s] = args else {
                    return Err(shape("V(bindings)"));
                };
                Ok(Substitution::from_expr(&self.literal_arg(s)?)?.to_matrix())
            }
            "ev" | "simplify" => {
                let [e] = args else {
                    return Err(shape("ev(expr)"));
                };
                let e = self.literal_arg(e)?;
                simplify::value_form(&e, &self.defs)
            }
            "part" | "dpart" => {
                let Some((e, rest)) = args.split_first() else {
                    return Err(shape("part(expr, k1, k2, ...)"));
                };
                let e = self.literal_arg(e)?;
                let p = path_args(rest)?;
                if name == "part" {
                    paths::part(&e, &p)
                } else {
                    paths::boxed(&e, &p)
                }
            }
            "substpart" => {
                let [repl, e, rest @ ..] = args else {
                    return Err(shape("substpart(new, expr, k1, k2, ...)"));
                };
                let repl = self.literal_arg(repl)?;
                let e = self.literal_arg(e)?;
                paths::substpart(repl, &e, &path_args(rest)?)
            }
            "mkholes" => {
                let Some((e, rest)) = args.split_first() else {
                    return Err(shape("mkholes(expr, path, ...)"));
                };
                let e = self.literal_arg(e)?;
                let ps = rest
                    .iter()
                    .map(|p| path_args(std::slice::from_ref(p)))
                    .collect::<Result<Vec<_>>>()?;
                let x = paths::mkholes(&e, &ps)?;
                let statement = x.statement.clone();
                self.last_exercise = Some(x);
                Ok(statement)
            }
            "lisptree" | "lisptree2" | "lisptreem" => {
                let [e] = args else {
                    return Err(shape("lisptree(expr)"));
                };
                self.literal_arg(e)
            }
            _ => unreachable!("not a command: {name}"),
        }
    }
}

/// Items of a list argument, or the argument itself.
fn as_items(e: &Expr) -> Vec<Expr> {
    match e.as_op("list") {
        Some(items) => items.to_vec(),
        None => vec![e.clone()],
    }
}

/// `k1, k2, ...` or a single list `[k1, k2, ...]`.
fn path_args(args: &[Expr]) -> Result<Path> {
    let items: Vec<Expr> = match args {
        [single] if single.as_op("list").is_some() => as_items(single),
        _ => args.to_vec(),
    };
    items
        .iter()
        .map(|k| {
            k.as_i64()
                .filter(|&n| n >= 0)
                .map(|n| n as usize)
                .ok_or_else(|| Error::wrong_shape("a path index", k))
        })
        .collect()
}

/// Substitute values for free symbols, leaving application heads alone.
fn resolve_values(e: &Expr, map: &BTreeMap<String, Expr>) -> Expr {
    match e {
        Expr::Sym(s) => map.get(s).cloned().unwrap_or_else(|| e.clone()),
        Expr::App(head, args) => Expr::App(
            head.clone(),
            args.iter().map(|a| resolve_values(a, map)).collect(),
        ),
        Expr::Lambda(params, body) => {
            let inner: BTreeMap<String, Expr> = map
                .iter()
                .filter(|(k, _)| !params.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            Expr::Lambda(params.clone(), Box::new(resolve_values(body, &inner)))
        }
        Expr::Op(name, args) if name == ":=" && args.len() == 2 => Expr::Op(
            name.clone(),
            vec![args[0].clone(), resolve_values(&args[1], map)],
        ),
        other => other.map_subexprs(|c| resolve_values(c, map)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn snapshot_round_trip() {
        let mut s = Session::new();
        s.run_line("f(x) := 2*x + 1$").unwrap();
        s.run_line("y : f(3);").unwrap();
        s.run_line("mkholes(x^2 + 1, [1, 1]);").unwrap();
        s.store(Some("d"), p("a + b")).unwrap();
        let back = Session::restore(&s.snapshot()).unwrap();
        assert_eq!(back.snapshot(), s.snapshot());
        assert_eq!(back.definitions(), s.definitions());
        let mut back = back;
        assert_eq!(back.run_line("f(5);").unwrap().value, p("11"));
        assert!(matches!(back.store(Some("d"), p("0")), Err(Error::DuplicateName(_))));
    }

    #[test]
    fn maxima_session() {
        let mut s = Session::new();
        assert!(!s.run_line("P : [1,2]$").unwrap().show);
        s.run_line("Q : [3,-4]$").unwrap();
        s.run_line("f(x) := a*x + b$").unwrap();
        assert_eq!(s.run_line("eq1 : f(P[1]) = P[2];").unwrap().value, p("a + b = 2"));
        assert_eq!(s.run_line("eq2 : f(Q[1]) = Q[2];").unwrap().value, p("3*a + b = -4"));
        assert_eq!(
            s.run_line("ab : solve([eq1,eq2], [a,b]);").unwrap().value,
            p("[[a = -3, b = 5]]")
        );
        let o7 = s.run_line("subst(ab, f(x));").unwrap().value;
        assert_eq!(o7, simplify::simplify_default(&p("5 - 3*x")).unwrap());
        s.run_line("define(g(x), %);").unwrap();
        assert_eq!(s.run_line("g(1);").unwrap().value, p("2"));
        assert_eq!(s.run_line("g(3);").unwrap().value, p("-4"));
    }

    #[test]
    fn substitution_commands() {
        let mut s = Session::new();
        s.run_line("o : f(g(x))$").unwrap();
        s.run_line("S1 : [f(x)=g(g(x)), g(x)=f(f(x))]$").unwrap();
        s.run_line("S2 : [f=lambda([x],g(g(x))), g=lambda([x],f(f(x)))]$").unwrap();
        assert_eq!(s.run_line("subst(S1,o);").unwrap().value, p("f(f(f(x)))"));
        assert_eq!(s.run_line("psubst(S1,o);").unwrap().value, p("f(f(f(x)))"));
        assert_eq!(s.run_line("psubst(S2,o);").unwrap().value, p("g(g(f(f(x))))"));
        let o8 = s.run_line("o _sss_ S1;").unwrap().value;
        assert_eq!(o8.as_op("_sss_").unwrap()[1], p("g(g(f(f(x))))"));
    }

    #[test]
    fn holes_commands() {
        let mut s = Session::new();
        s.run_line("o : 2 +. 3 +. 4 = 2 +. 7;").unwrap();
        assert_eq!(s.run_line("part(o, 2, 1);").unwrap().value, p("2"));
        assert_eq!(
            s.run_line("substpart(?, o, 2, 1);").unwrap().value,
            p("2 +. 3 +. 4 = ? +. 7")
        );
        let t = s.run_line("lisptree2(dpart(o, 2, 1));").unwrap();
        assert!(t.tree);
        s.run_line("S : [f(x)=x^3, f'(x)=3*x^2, g(x)=log(x)+x^2, g'(x)=1/x+2*x]$").unwrap();
        s.run_line("o : RCV _ssu_ S;").unwrap();
        s.run_line("mkholes(o, [1,2,2,1,2], [1,2,3,1,2], [1,2,4,1,2], [2,2,2]);").unwrap();
        let x = s.last_exercise.clone().unwrap();
        assert_eq!(x.holes.len(), 4);
        assert_eq!(x.answers().unwrap()[&2], p("x^2 + log(x)"));
    }

    #[test]
    fn unknown_and_duplicate_names() {
        let mut s = Session::new();
        assert!(matches!(s.expr("nope"), Err(Error::UnknownName(_))));
        s.insert_new("a", Object::Expr(p("1"))).unwrap();
        assert!(matches!(
            s.insert_new("a", Object::Expr(p("2"))),
            Err(Error::DuplicateName(_))
        ));
    }
}
