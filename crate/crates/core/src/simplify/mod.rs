//! The active simplifier.
//!
//! Sums and products are flattened and put in a canonical order, numeric constants are
//! folded and like terms collected. Lazy operators (`+.`, `*.`, ...) and quoted nouns are
//! left exactly as they are, descendants included.

mod diff;

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, Rational};
use crate::registry::{active_name, is_lazy_name};
use crate::subst::{self, Substitution};

pub use diff::{diff_verb, diff_verb_with};

/// Operators that only exist to be displayed; by default the simplifier does not enter them.
pub const PRESENTATION_OPS: &[&str] = &["_ss_", "_sss_", "_ssu_", "box", "hl", "underbrace"];

/// Largest exponent folded exactly; bigger powers stay symbolic.
const MAX_EXACT_EXPONENT: u64 = 4096;
/// Nesting limit for expanding user definitions.
const MAX_EXPANSION_DEPTH: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplifyOptions {
    pub max_passes: usize,
    pub fold_constants: bool,
    pub collect_like_terms: bool,
    /// Leave `_ss_`, `_sss_`, `_ssu_`, `box` and `hl` nodes alone.
    pub inert_presentation: bool,
}

impl Default for SimplifyOptions {
    fn default() -> Self {
        SimplifyOptions {
            max_passes: 32,
            fold_constants: true,
            collect_like_terms: true,
            inert_presentation: true,
        }
    }
}

/// User function definitions and opaque heads.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Definitions {
    /// `name -> (params, body)`.
    pub functions: BTreeMap<String, (Vec<String>, Expr)>,
    /// Heads that are never expanded; `d/dx f(u)` is `f'(u) u'`.
    pub opaque: BTreeSet<String>,
}

impl Definitions {
    pub fn new() -> Self {
        Self::default()
    }

    /// Definitions with the given opaque heads.
    pub fn with_opaque<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Definitions {
            functions: BTreeMap::new(),
            opaque: names.into_iter().map(Into::into).collect(),
        }
    }

    /// Define `name(params) := body`. Returns true when an earlier definition was replaced.
    pub fn define(&mut self, name: &str, params: Vec<String>, body: Expr) -> Result<bool> {
        if self.is_opaque(name) {
            return Err(Error::OpaqueDefinition(name.to_string()));
        }
        for (i, p) in params.iter().enumerate() {
            if params[..i].contains(p) {
                return Err(Error::MalformedBinding(format!(
                    "parameter `{p}` of `{name}` is repeated"
                )));
            }
        }
        Ok(self
            .functions
            .insert(name.to_string(), (params, body))
            .is_some())
    }

    pub fn declare_opaque(&mut self, name: &str) {
        self.functions.remove(name);
        self.opaque.insert(name.to_string());
    }

    /// `f`, and every primed name `f'`, `f''` derived from an opaque `f`.
    pub fn is_opaque(&self, name: &str) -> bool {
        self.opaque.contains(name) || self.opaque.contains(name.trim_end_matches('\''))
    }

    pub fn lookup(&self, name: &str) -> Option<&(Vec<String>, Expr)> {
        self.functions.get(name)
    }
}

static NO_DEFS: once_cell::sync::Lazy<Definitions> = once_cell::sync::Lazy::new(Definitions::new);

/// Simplify with explicit options and no user definitions.
pub fn simplify(e: &Expr, opts: &SimplifyOptions) -> Result<Expr> {
    simplify_with(e, opts, &NO_DEFS)
}

pub fn simplify_default(e: &Expr) -> Result<Expr> {
    simplify(e, &SimplifyOptions::default())
}

pub fn simplify_with(e: &Expr, opts: &SimplifyOptions, defs: &Definitions) -> Result<Expr> {
    Simplifier::new(opts, defs).run(e)
}

/// Replace every lazy operator by its active counterpart and drop quote wrappers.
pub fn delazify(e: &Expr) -> Expr {
    match e {
        Expr::Quoted(inner) => delazify(inner),
        Expr::Op(name, args) => Expr::Op(
            active_name(name).to_string(),
            args.iter().map(delazify).collect(),
        ),
        other => other.map_subexprs(delazify),
    }
}

/// Replace lazy operators by active ones, keeping quote wrappers.
pub fn strip_lazy(e: &Expr) -> Expr {
    match e {
        Expr::Op(name, args) => Expr::Op(
            active_name(name).to_string(),
            args.iter().map(strip_lazy).collect(),
        ),
        other => other.map_subexprs(strip_lazy),
    }
}

/// Canonical form used to compare derivation steps: lazy dots are dropped and arithmetic is
/// normalized, but quoted nouns stay unevaluated (their arguments are normalized).
pub fn canon(e: &Expr, defs: &Definitions) -> Result<Expr> {
    let opts = SimplifyOptions::default();
    let mut s = Simplifier::new(&opts, defs);
    s.canon_quoted = true;
    s.run(&strip_lazy(e))
}

/// The value of `e`: everything lazy or quoted is made active and simplified.
pub fn value_form(e: &Expr, defs: &Definitions) -> Result<Expr> {
    let opts = SimplifyOptions {
        inert_presentation: false,
        ..SimplifyOptions::default()
    };
    simplify_with(&delazify(e), &opts, defs)
}

/// Canonical value equality (no user definitions).
pub fn value_equal(a: &Expr, b: &Expr) -> Result<bool> {
    value_equal_with(a, b, &NO_DEFS)
}

pub fn value_equal_with(a: &Expr, b: &Expr, defs: &Definitions) -> Result<bool> {
    Ok(value_form(a, defs)? == value_form(b, defs)?)
}

/// `(coefficient, monomial)` of a canonical summand.
pub(crate) fn split_coef(t: &Expr) -> (Rational, Expr) {
    match t {
        Expr::Num(n) => (n.clone(), Expr::one()),
        Expr::Op(name, args) if name == "*" => match args.split_first() {
            Some((Expr::Num(c), rest)) => {
                let mono = if rest.len() == 1 {
                    rest[0].clone()
                } else {
                    Expr::Op("*".into(), rest.to_vec())
                };
                (c.clone(), mono)
            }
            _ => (Rational::one(), t.clone()),
        },
        _ => (Rational::one(), t.clone()),
    }
}

/// `c * mono` in canonical shape.
pub(crate) fn scale(c: Rational, mono: Expr) -> Expr {
    if c.is_zero() {
        return Expr::zero();
    }
    if mono.is_one() {
        return Expr::Num(c);
    }
    if c.is_one() {
        return mono;
    }
    match mono {
        Expr::Op(name, fs) if name == "*" => {
            let mut args = vec![Expr::Num(c)];
            args.extend(fs);
            Expr::Op(name, args)
        }
        Expr::Num(n) => Expr::Num(n * c),
        other => Expr::Op("*".into(), vec![Expr::Num(c), other]),
    }
}

/// Total numeric degree of a monomial, for ordering summands.
fn degree(e: &Expr) -> Rational {
    match e {
        Expr::Num(_) => Rational::zero(),
        Expr::Op(name, args) if name == "*" => args.iter().map(degree).sum(),
        Expr::Op(name, args) if name == "^" && args.len() == 2 => match &args[1] {
            Expr::Num(n) => n * degree_base(&args[0]),
            _ => Rational::one(),
        },
        _ => Rational::one(),
    }
}

fn degree_base(e: &Expr) -> Rational {
    match e {
        Expr::Num(_) => Rational::zero(),
        _ => Rational::one(),
    }
}

/// Exact `k`-th root of a non-negative integer.
fn int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    (num::pow(r.clone(), k as usize) == *n).then_some(r)
}

/// `b^e` for rationals when the result is rational.
fn rational_pow(b: &Rational, e: &Rational) -> Result<Option<Rational>> {
    let p = e.numer();
    let q = e.denom();
    let Some(p_abs) = p.abs().to_u64() else {
        return Ok(None);
    };
    if p_abs > MAX_EXACT_EXPONENT {
        return Ok(None);
    }
    if b.is_zero() {
        if p.is_negative() {
            return Err(Error::Arithmetic("division by zero".into()));
        }
        return Ok(Some(Rational::zero()));
    }
    let Some(q) = q.to_u32() else { return Ok(None) };
    let base = if q == 1 {
        b.clone()
    } else {
        let neg = b.is_negative();
        if neg && q % 2 == 0 {
            return Ok(None);
        }
        let (n, d) = (b.numer().abs(), b.denom().clone());
        let (Some(rn), Some(rd)) = (int_root(&n, q), int_root(&d, q)) else {
            return Ok(None);
        };
        let r = Rational::new(rn, rd);
        if neg {
            -r
        } else {
            r
        }
    };
    let mut out = num::pow(base, p_abs as usize);
    if p.is_negative() {
        out = out.recip();
    }
    Ok(Some(out))
}

pub(crate) struct Simplifier<'a> {
    opts: &'a SimplifyOptions,
    pub(crate) defs: &'a Definitions,
    /// Normalize the arguments inside quoted nouns (derivation comparison).
    canon_quoted: bool,
    depth: usize,
}

impl<'a> Simplifier<'a> {
    pub(crate) fn new(opts: &'a SimplifyOptions, defs: &'a Definitions) -> Self {
        Simplifier {
            opts,
            defs,
            canon_quoted: false,
            depth: 0,
        }
    }

    pub(crate) fn run(&mut self, e: &Expr) -> Result<Expr> {
        let mut cur = e.clone();
        for _ in 0..self.opts.max_passes.max(1) {
            let next = self.simp(&cur)?;
            if next == cur {
                return Ok(next);
            }
            cur = next;
        }
        Err(Error::NotConverged(self.opts.max_passes))
    }

    fn inert(&self, name: &str) -> bool {
        is_lazy_name(name) || (self.opts.inert_presentation && PRESENTATION_OPS.contains(&name))
    }

    /// One bottom-up pass.
    pub(crate) fn simp(&mut self, e: &Expr) -> Result<Expr> {
        match e {
            Expr::Num(_) | Expr::Sym(_) | Expr::Hole(_) => Ok(e.clone()),
            Expr::Quoted(inner) => {
                if !self.canon_quoted {
                    return Ok(e.clone());
                }
                let kids = inner
                    .children()
                    .iter()
                    .map(|c| self.simp(c))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Expr::quote(inner.with_children(kids)))
            }
            Expr::Op(name, _) if self.inert(name) => Ok(e.clone()),
            Expr::Op(name, args) if name == ":=" && args.len() == 2 => {
                let rhs = self.simp(&args[1])?;
                Ok(Expr::Op(name.clone(), vec![args[0].clone(), rhs]))
            }
            Expr::Op(name, args) => {
                let args = args
                    .iter()
                    .map(|a| self.simp(a))
                    .collect::<Result<Vec<_>>>()?;
                self.op(name, args)
            }
            Expr::Lambda(params, body) => Ok(Expr::lambda(params.clone(), self.simp(body)?)),
            Expr::App(head, args) => {
                let head = self.simp(head)?;
                let args = args
                    .iter()
                    .map(|a| self.simp(a))
                    .collect::<Result<Vec<_>>>()?;
                self.app(head, args)
            }
        }
    }

    /// Simplify a freshly produced subtree to a fixpoint, guarding against runaway expansion.
    fn resimp(&mut self, e: Expr) -> Result<Expr> {
        self.depth += 1;
        if self.depth > MAX_EXPANSION_DEPTH {
            self.depth -= 1;
            return Err(Error::NotConverged(self.opts.max_passes));
        }
        let mut cur = e;
        let mut out = Err(Error::NotConverged(self.opts.max_passes));
        for _ in 0..self.opts.max_passes.max(1) {
            match self.simp(&cur) {
                Ok(next) if next == cur => {
                    out = Ok(next);
                    break;
                }
                Ok(next) => cur = next,
                Err(err) => {
                    out = Err(err);
                    break;
                }
            }
        }
        self.depth -= 1;
        out
    }

    fn op(&mut self, name: &str, args: Vec<Expr>) -> Result<Expr> {
        match (name, args.as_slice()) {
            ("+", _) => self.sum(args),
            ("*", _) => self.product(args),
            ("^", [b, x]) => self.pow(b.clone(), x.clone()),
            ("neg", [a]) => self.product(vec![Expr::int(-1), a.clone()]),
            ("-", [a, b]) => {
                let nb = self.product(vec![Expr::int(-1), b.clone()])?;
                self.sum(vec![a.clone(), nb])
            }
            ("/", [a, b]) => {
                if b.is_zero() {
                    return Err(Error::Arithmetic("division by zero".into()));
                }
                let inv = self.pow(b.clone(), Expr::int(-1))?;
                self.product(vec![a.clone(), inv])
            }
            ("prime", [a]) => {
                if contains_lazy(a) {
                    return Ok(Expr::op("prime", args));
                }
                let d = diff::Differ::new(self.defs).diff(a, "x")?;
                self.resimp(d)
            }
            ("index", [Expr::Op(list, items), k]) if list == "list" => {
                match k.as_i64() {
                    Some(i) if i >= 1 && (i as usize) <= items.len() => Ok(items[i as usize - 1].clone()),
                    _ => Ok(Expr::op(name, args)),
                }
            }
            ("_s_", [target, bindings]) => {
                let s = Substitution::from_expr(bindings)?;
                let out = subst::apply_subst_raw(target, &s, subst::DEFAULT_STEP_LIMIT)?;
                self.resimp(out.output)
            }
            _ => Ok(Expr::Op(name.to_string(), args)),
        }
    }

    fn app(&mut self, head: Expr, args: Vec<Expr>) -> Result<Expr> {
        match &head {
            Expr::Lambda(params, _) if params.len() == args.len() => {
                let reduced = subst::beta_reduce(&Expr::app(head.clone(), args), subst::DEFAULT_STEP_LIMIT)?;
                self.resimp(reduced)
            }
            Expr::Sym(name) => {
                if let Some((params, body)) = self.defs.lookup(name) {
                    if params.len() == args.len() {
                        let lam = Expr::lambda(params.clone(), body.clone());
                        let reduced =
                            subst::beta_reduce(&Expr::app(lam, args), subst::DEFAULT_STEP_LIMIT)?;
                        return self.resimp(reduced);
                    }
                }
                self.builtin(name, args)
            }
            _ => Ok(Expr::app(head, args)),
        }
    }

    fn builtin(&mut self, name: &str, args: Vec<Expr>) -> Result<Expr> {
        let exact = match (name, args.as_slice()) {
            ("sin" | "tan", [a]) if a.is_zero() => Some(Expr::zero()),
            ("cos" | "exp", [a]) if a.is_zero() => Some(Expr::one()),
            ("log", [a]) if a.is_one() => Some(Expr::zero()),
            ("log", [a]) if a.is_zero() => {
                return Err(Error::Arithmetic("log(0) is undefined".into()))
            }
            ("sqrt", [Expr::Num(n)]) if self.opts.fold_constants => {
                rational_pow(n, &Rational::new(1.into(), 2.into()))?.map(Expr::Num)
            }
            ("diff", [f, Expr::Sym(v)]) => {
                if contains_lazy(f) {
                    None
                } else {
                    let d = diff::Differ::new(self.defs).diff(f, v)?;
                    return self.resimp(d);
                }
            }
            _ => None,
        };
        Ok(exact.unwrap_or_else(|| Expr::call(name, args)))
    }

    pub(crate) fn sum(&mut self, args: Vec<Expr>) -> Result<Expr> {
        let mut flat = Vec::new();
        for a in args {
            match a {
                Expr::Op(n, inner) if n == "+" => flat.extend(inner),
                other => flat.push(other),
            }
        }
        let mut constant = Rational::zero();
        let mut loose_numbers = Vec::new();
        let mut terms: Vec<(Expr, Rational)> = Vec::new();
        for t in flat {
            if let Expr::Num(n) = &t {
                if self.opts.fold_constants {
                    constant += n;
                } else {
                    loose_numbers.push(t);
                }
                continue;
            }
            let (c, mono) = split_coef(&t);
            if self.opts.collect_like_terms {
                if let Some(slot) = terms.iter_mut().find(|(m, _)| *m == mono) {
                    slot.1 += c;
                    continue;
                }
            }
            terms.push((mono, c));
        }
        let mut built: Vec<(Rational, Expr, Expr)> = terms
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (degree(&m), m.clone(), scale(c, m)))
            .collect();
        built.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)).then_with(|| a.2.cmp(&b.2)));
        let mut out: Vec<Expr> = built.into_iter().map(|(_, _, t)| t).collect();
        if !constant.is_zero() {
            out.push(Expr::Num(constant));
        }
        out.extend(loose_numbers);
        Ok(match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Op("+".into(), out),
        })
    }

    pub(crate) fn product(&mut self, args: Vec<Expr>) -> Result<Expr> {
        let mut coef = Rational::one();
        let mut loose_numbers = Vec::new();
        let mut powers: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
        let mut stack: Vec<Expr> = args;
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f {
                Expr::Num(n) => {
                    if n.is_zero() {
                        return Ok(Expr::zero());
                    }
                    if self.opts.fold_constants {
                        coef *= n;
                    } else {
                        loose_numbers.push(Expr::Num(n));
                    }
                }
                Expr::Op(name, inner) if name == "*" => {
                    for x in inner.into_iter().rev() {
                        stack.push(x);
                    }
                }
                Expr::Op(name, inner) if name == "^" && inner.len() == 2 => {
                    let mut it = inner.into_iter();
                    let (b, x) = (it.next().unwrap(), it.next().unwrap());
                    powers.entry(b).or_default().push(x);
                }
                other => powers.entry(other).or_default().push(Expr::one()),
            }
        }
        let mut factors = Vec::new();
        for (base, exps) in powers {
            let x = if exps.len() == 1 {
                exps.into_iter().next().unwrap()
            } else {
                self.sum(exps)?
            };
            match self.pow(base, x)? {
                Expr::Num(n) if self.opts.fold_constants => {
                    if n.is_zero() {
                        return Ok(Expr::zero());
                    }
                    coef *= n;
                }
                Expr::Op(name, inner) if name == "*" => {
                    for g in inner {
                        match g {
                            Expr::Num(n) if self.opts.fold_constants => coef *= n,
                            other => factors.push(other),
                        }
                    }
                }
                other => factors.push(other),
            }
        }
        factors.sort();
        if self.opts.fold_constants && factors.len() == 1 && !coef.is_one() {
            if let Expr::Op(name, terms) = &factors[0] {
                if name == "+" {
                    let scaled = terms
                        .iter()
                        .map(|t| {
                            let (c, m) = split_coef(t);
                            scale(c * coef.clone(), m)
                        })
                        .collect();
                    return self.sum(scaled);
                }
            }
        }
        let mut out = loose_numbers;
        if !coef.is_one() || (factors.is_empty() && out.is_empty()) {
            out.insert(0, Expr::Num(coef));
        }
        out.extend(factors);
        Ok(match out.len() {
            1 => out.pop().unwrap(),
            _ => Expr::Op("*".into(), out),
        })
    }

    pub(crate) fn pow(&mut self, b: Expr, x: Expr) -> Result<Expr> {
        if x.is_zero() {
            return Ok(Expr::one());
        }
        if x.is_one() {
            return Ok(b);
        }
        if b.is_one() {
            return Ok(Expr::one());
        }
        if let (Expr::Num(bn), Expr::Num(xn)) = (&b, &x) {
            if bn.is_zero() && xn.is_negative() {
                return Err(Error::Arithmetic("division by zero".into()));
            }
            if self.opts.fold_constants {
                if let Some(r) = rational_pow(bn, xn)? {
                    return Ok(Expr::Num(r));
                }
            }
            return Ok(Expr::op("^", vec![b, x]));
        }
        if b.is_zero() {
            if let Expr::Num(xn) = &x {
                if xn.is_positive() {
                    return Ok(Expr::zero());
                }
            }
            return Ok(Expr::op("^", vec![b, x]));
        }
        let integer_exp = x.as_integer().is_some();
        match &b {
            Expr::Op(name, inner) if name == "^" && inner.len() == 2 && integer_exp => {
                let e2 = self.product(vec![inner[1].clone(), x])?;
                self.pow(inner[0].clone(), e2)
            }
            Expr::Op(name, inner) if name == "*" && integer_exp => {
                let parts = inner
                    .iter()
                    .map(|f| self.pow(f.clone(), x.clone()))
                    .collect::<Result<Vec<_>>>()?;
                self.product(parts)
            }
            _ => Ok(Expr::op("^", vec![b, x])),
        }
    }
}

/// Whether any lazy operator occurs in `e`.
pub fn contains_lazy(e: &Expr) -> bool {
    let mut found = false;
    e.visit(&mut |n| {
        if let Expr::Op(name, _) = n {
            found |= is_lazy_name(name);
        }
    });
    found
}

/// `a - b` in canonical form (used by solvers and checkers).
pub fn difference(a: &Expr, b: &Expr, defs: &Definitions) -> Result<Expr> {
    let e = Expr::op(
        "+",
        vec![a.clone(), Expr::op("*", vec![Expr::int(-1), b.clone()])],
    );
    simplify_with(&e, &SimplifyOptions::default(), defs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn simp(s: &str) -> Expr {
        simplify_default(&p(s)).unwrap()
    }

    #[test]
    fn collects_and_folds() {
        assert_eq!(simp("2+3+4*x+5*x"), p("9*x + 5"));
        assert_eq!(simp("0*x + 1*y"), p("y"));
        assert_eq!(simp("5 - 3*x"), simp("-3*x + 5"));
        assert_eq!(simp("x^1"), p("x"));
        assert_eq!(simp("x^0"), p("1"));
    }

    #[test]
    fn lazy_operators_survive() {
        assert_eq!(simp("2 +. 3"), p("2 +. 3"));
        assert_eq!(simp("(2 +. 3) + (1 + 1)"), simplify_default(&p("2 + (2 +. 3)")).unwrap());
        assert_eq!(simp("a +. b = b +. a"), p("a +. b = b +. a"));
    }

    #[test]
    fn delazify_then_simplify() {
        assert_eq!(delazify(&p("2 +. 3")), p("2 + 3"));
        assert_eq!(simplify_default(&delazify(&p("2 +. 3"))).unwrap(), p("5"));
        assert_eq!(delazify(&p("a +. (b +. c)")), p("a + (b + c)"));
        let noun = p("'diff(x^2, x)");
        assert_eq!(simplify_default(&noun).unwrap(), noun);
        assert_eq!(simplify_default(&delazify(&noun)).unwrap(), p("2*x"));
    }

    #[test]
    fn substitution_is_evaluated() {
        assert_eq!(simp("(a+b) [a := 42]"), p("b + 42"));
        assert_eq!(simp("(a +. b = b +. a)[a := 2, b := 3]"), p("2 +. 3 = 3 +. 2"));
    }

    #[test]
    fn division() {
        assert!(matches!(
            simplify_default(&p("x / 0")),
            Err(Error::Arithmetic(_))
        ));
        assert_eq!(simp("x / x"), p("1"));
        assert_eq!(simp("6/4"), Expr::ratio(3, 2));
        assert_eq!(simp("(2*x)^2"), p("4*x^2"));
    }

    #[test]
    fn exact_powers() {
        assert_eq!(simp("4^(1/2)"), p("2"));
        assert_eq!(simp("(8/27)^(1/3)"), Expr::ratio(2, 3));
        assert_eq!(simp("2^(-2)"), Expr::ratio(1, 4));
        assert_eq!(simp("2^(1/2)"), Expr::op("^", vec![Expr::int(2), Expr::ratio(1, 2)]));
        assert_eq!(simp("2^(1/2) * 2^(1/2)"), p("2"));
    }

    #[test]
    fn product_of_powers() {
        assert_eq!(simp("(6*x^3)*(7*x^4)"), p("42*x^7"));
        assert_eq!(simp("x * x^-1"), p("1"));
        assert_eq!(simp("2*(x+1)"), p("2*x + 2"));
    }

    #[test]
    fn builtins() {
        assert_eq!(simp("sin(0) + cos(0) + exp(0) + log(1)"), p("2"));
        assert_eq!(simp("sqrt(9/4)"), Expr::ratio(3, 2));
    }

    #[test]
    fn definitions_expand() {
        let mut defs = Definitions::new();
        defs.define("g", vec!["x".into()], p("5 - 3*x")).unwrap();
        let opts = SimplifyOptions::default();
        assert_eq!(simplify_with(&p("g(1)"), &opts, &defs).unwrap(), p("2"));
        assert_eq!(simplify_with(&p("g(3)"), &opts, &defs).unwrap(), p("-4"));
        assert!(matches!(
            {
                let mut d = Definitions::with_opaque(["f"]);
                d.define("f", vec![], p("1"))
            },
            Err(Error::OpaqueDefinition(_))
        ));
    }

    #[test]
    fn canon_keeps_nouns() {
        let defs = Definitions::new();
        let e = p("'diff(x *. x, x)");
        assert_eq!(canon(&e, &defs).unwrap(), p("'diff(x^2, x)"));
        assert_eq!(canon(&p("3 *. x^.(3 -. 1)"), &defs).unwrap(), p("3*x^2"));
    }

    #[test]
    fn idempotent_on_samples() {
        for s in ["2+3+4*x+5*x", "(x+1)^2*(x+1)^-2", "x*y*x/(y^2)", "a*b - b*a + 7"] {
            let once = simp(s);
            assert_eq!(simplify_default(&once).unwrap(), once, "{s}");
        }
    }
}
