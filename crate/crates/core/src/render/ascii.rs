//! One-line ASCII rendering.
//!
//! `Exact` output re-parses to the same tree. `Display` output drops the dots of lazy
//! operators, prints boxes and highlights with glyphs, shows noun derivatives as `d/dx(..)`
//! and writes negative powers as fractions.

use num::{One, Signed};

use super::AsciiStyle;
use crate::expr::{Expr, Rational};
use crate::registry::{active_name, is_lazy_name, Assoc, Fixity, OperatorRegistry};

pub(crate) const ATOM: u16 = 1000;
const POSTFIX: u16 = 80;
const NEG: u16 = 55;
const FRACTION: u16 = 45;

#[derive(Clone, Debug)]
pub(crate) struct Piece {
    pub text: String,
    pub prec: u16,
    /// Text starts with a minus sign.
    pub neg: bool,
}

impl Piece {
    fn atom(text: impl Into<String>) -> Piece {
        Piece {
            text: text.into(),
            prec: ATOM,
            neg: false,
        }
    }

    fn new(text: String, prec: u16) -> Piece {
        let neg = text.starts_with('-');
        Piece { text, prec, neg }
    }
}

/// Render `e` on one line (or several for a display-style underbrace at the root).
pub fn expr_to_string(e: &Expr, style: AsciiStyle) -> String {
    let p = Printer {
        style,
        reg: OperatorRegistry::shared(),
    };
    if style == AsciiStyle::Display {
        if let Some([ss, out]) = e.as_op("_ssu_") {
            return p.underbrace(ss, out);
        }
    }
    p.expr(e).text
}

/// The form `-t` takes inside a sum: `Some(t)` when a summand is printed as ` - t`.
/// Mirrors `parser::negate` so that the printed text parses back to the summand.
pub(crate) fn negated_summand(s: &Expr) -> Option<Expr> {
    match s {
        Expr::Num(n) if n.is_negative() => Some(Expr::Num(-n.clone())),
        Expr::Op(name, args) if name == "*" => match args.first() {
            Some(Expr::Num(c)) if c.is_negative() => {
                let mut args = args.clone();
                args[0] = Expr::Num(-c.clone());
                Some(Expr::Op(name.clone(), args))
            }
            _ => None,
        },
        Expr::Op(name, args) if name == "neg" && args.len() == 1 => {
            let t = &args[0];
            let folds = matches!(t, Expr::Num(_))
                || matches!(t, Expr::Op(n, a) if n == "*" && matches!(a.first(), Some(Expr::Num(_))));
            if folds {
                None
            } else {
                Some(t.clone())
            }
        }
        _ => None,
    }
}

pub(crate) struct Printer<'r> {
    pub style: AsciiStyle,
    pub reg: &'r OperatorRegistry,
}

impl<'r> Printer<'r> {
    fn display(&self) -> bool {
        self.style == AsciiStyle::Display
    }

    fn wrap(&self, p: &Piece, min: u16, strict: bool) -> String {
        if p.prec < min || (strict && p.prec == min) {
            format!("({})", p.text)
        } else {
            p.text.clone()
        }
    }

    /// Operand in a non-leading position of an arithmetic operator: a leading minus gets
    /// parentheses.
    fn wrap_inner(&self, p: &Piece, min: u16, strict: bool) -> String {
        if p.neg && min >= 40 {
            format!("({})", p.text)
        } else {
            self.wrap(p, min, strict)
        }
    }

    fn list(&self, items: &[Expr]) -> String {
        items
            .iter()
            .map(|a| self.expr(a).text)
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn token(&self, name: &str) -> String {
        let tok = self
            .reg
            .get(name)
            .map(|d| if self.display() { d.display.ascii.clone() } else { d.token.clone() })
            .unwrap_or_else(|| name.to_string());
        if self.display() && is_lazy_name(&tok) {
            active_name(&tok).to_string()
        } else {
            tok
        }
    }

    pub fn expr(&self, e: &Expr) -> Piece {
        match e {
            Expr::Num(r) => self.number(r),
            Expr::Sym(s) => Piece::atom(s.clone()),
            Expr::Hole(None) => Piece::atom("?"),
            Expr::Hole(Some(k)) => Piece::atom(format!("?{k}")),
            Expr::App(head, args) => {
                let h = match head.as_ref() {
                    Expr::Sym(s) => s.clone(),
                    Expr::Lambda(..) | Expr::App(..) => self.expr(head).text,
                    other => format!("({})", self.expr(other).text),
                };
                Piece::atom(format!("{h}({})", self.list(args)))
            }
            Expr::Lambda(params, body) => Piece::atom(format!(
                "lambda([{}], {})",
                params.join(", "),
                self.expr(body).text
            )),
            Expr::Quoted(inner) => {
                if self.display() {
                    if let Some(("diff", [f, v])) = inner.as_call() {
                        return Piece::atom(format!("d/d{}({})", self.expr(v).text, self.expr(f).text));
                    }
                }
                let p = self.expr(inner);
                Piece::new(format!("'{}", self.wrap(&p, ATOM, false)), ATOM)
            }
            Expr::Op(name, args) => self.op(name, args),
        }
    }

    fn number(&self, r: &Rational) -> Piece {
        if r.is_integer() {
            let prec = if r.is_negative() { NEG } else { ATOM };
            Piece::new(r.numer().to_string(), prec)
        } else {
            Piece::new(format!("{}/{}", r.numer(), r.denom()), FRACTION)
        }
    }

    fn call(&self, name: &str, args: &[Expr]) -> Piece {
        Piece::atom(format!("{name}({})", self.list(args)))
    }

    fn op(&self, name: &str, args: &[Expr]) -> Piece {
        match (name, args) {
            ("list", _) => return Piece::atom(format!("[{}]", self.list(args))),
            ("set", _) => return Piece::atom(format!("{{{}}}", self.list(args))),
            ("tuple", _) if args.len() != 1 => {
                return Piece::atom(format!("({})", self.list(args)))
            }
            ("range", [lo, hi]) => {
                return Piece::atom(format!(
                    "{{{}, ..., {}}}",
                    self.expr(lo).text,
                    self.expr(hi).text
                ))
            }
            ("compre" | "select", [first, rest @ ..]) if !rest.is_empty() => {
                return Piece::atom(format!(
                    "{{{} | {}}}",
                    self.expr(first).text,
                    self.list(rest)
                ))
            }
            ("index", [target, k]) => {
                let t = self.expr(target);
                return Piece::new(
                    format!("{}[{}]", self.wrap(&t, POSTFIX, false), self.expr(k).text),
                    POSTFIX,
                );
            }
            ("box", [inner]) if self.display() => {
                return Piece::atom(format!("⎡{}⎤", self.expr(inner).text))
            }
            ("hl", [inner]) if self.display() => {
                return Piece::atom(format!("«{}»", self.expr(inner).text))
            }
            ("matrix", rows) if self.display() => {
                return Piece::atom(format!("[{}]", self.rows(rows, "; ", false)))
            }
            ("vcol", rows) if self.display() => {
                return Piece::atom(format!("({})", self.rows(rows, " ", false)))
            }
            ("_s_", [target, list]) if is_binding_list(list) => {
                let t = self.expr(target);
                let items = list.children();
                return Piece::new(
                    format!("{}[{}]", self.wrap(&t, POSTFIX, false), self.list(items)),
                    POSTFIX,
                );
            }
            ("_ss_", [target, s]) if self.display() => {
                return Piece::new(self.ss(target, s), POSTFIX)
            }
            ("_sss_", [ss, out]) if self.display() => {
                let left = match ss.as_op("_ss_") {
                    Some([t, s]) => self.ss(t, s),
                    _ => self.expr(ss).text,
                };
                let o = self.expr(out);
                return Piece::new(format!("{left} = {}", self.wrap(&o, 21, false)), 20);
            }
            ("_ssu_", [ss, out]) if self.display() => {
                let left = match ss.as_op("_ss_") {
                    Some([t, s]) => self.ss(t, s),
                    _ => self.expr(ss).text,
                };
                return Piece::atom(format!("underbrace({left}, {})", self.expr(out).text));
            }
            ("neg", [t]) => {
                let p = self.expr(t);
                let text = if matches!(t, Expr::Num(_)) || p.neg {
                    format!("-({})", p.text)
                } else {
                    format!("-{}", self.wrap(&p, NEG, false))
                };
                return Piece::new(text, NEG);
            }
            ("prime", [t]) => {
                let p = self.expr(t);
                let closed = matches!(t, Expr::App(..))
                    || matches!(t, Expr::Op(n, _) if n == "list" || n == "index");
                let text = if closed {
                    format!("{}'", p.text)
                } else {
                    format!("({})'", p.text)
                };
                return Piece::atom(text);
            }
            ("^", [b, Expr::Num(k)]) if self.display() && k.is_negative() => {
                return self.fraction(&[], &Rational::one(), &[Expr::Op(name.into(), args.to_vec())]);
            }
            ("*", _) if self.display() => {
                if let Some(p) = self.display_product(args) {
                    return p;
                }
            }
            _ => {}
        }
        let Some(def) = self.reg.get(name) else {
            return self.call(name, args);
        };
        let prec = def.precedence;
        match def.fixity {
            Fixity::Nary if args.len() >= 2 => self.nary(name, prec, args),
            Fixity::Infix if args.len() == 2 => {
                let (ls, rs) = match def.assoc {
                    Assoc::Left => (false, true),
                    Assoc::Right => (true, false),
                    Assoc::None => (true, true),
                };
                let l = self.expr(&args[0]);
                let r = self.expr(&args[1]);
                let tok = self.token(name);
                let sep = if tight(active_name(name)) {
                    tok
                } else {
                    format!(" {tok} ")
                };
                let lt = self.wrap(&l, prec, ls);
                let lt = if active_name(name) == "^" && l.neg {
                    format!("({})", l.text)
                } else {
                    lt
                };
                let rt = if active_name(name) == "^" && r.prec == NEG {
                    format!("({})", r.text)
                } else {
                    self.wrap_inner(&r, prec, rs)
                };
                Piece::new(format!("{lt}{sep}{rt}"), prec)
            }
            Fixity::Prefix if args.len() == 1 => {
                let p = self.expr(&args[0]);
                Piece::new(
                    format!("{}{}", self.token(name), self.wrap_inner(&p, prec, false)),
                    prec,
                )
            }
            Fixity::Postfix if args.len() == 1 => {
                let p = self.expr(&args[0]);
                Piece::new(
                    format!("{}{}", self.wrap(&p, prec, false), self.token(name)),
                    prec,
                )
            }
            _ => self.call(name, args),
        }
    }

    fn nary(&self, name: &str, prec: u16, args: &[Expr]) -> Piece {
        let tok = self.token(name);
        let sep = if tight(active_name(name)) {
            tok.clone()
        } else {
            format!(" {tok} ")
        };
        let mut out = String::new();
        for (i, a) in args.iter().enumerate() {
            let nested_same = matches!(a, Expr::Op(n, _) if n == name);
            if i == 0 {
                let p = self.expr(a);
                if nested_same {
                    out.push_str(&format!("({})", p.text));
                } else {
                    out.push_str(&self.wrap(&p, prec, false));
                }
                continue;
            }
            if name == "+" {
                if let Some(t) = negated_summand(a) {
                    let p = self.expr(&t);
                    out.push_str(" - ");
                    out.push_str(&self.wrap_inner(&p, prec, true));
                    continue;
                }
            }
            let p = self.expr(a);
            out.push_str(&sep);
            if nested_same {
                out.push_str(&format!("({})", p.text));
            } else {
                out.push_str(&self.wrap_inner(&p, prec, true));
            }
        }
        Piece::new(out, prec)
    }

    /// Display-style product: leading `-1` becomes a sign, negative powers go below a bar.
    fn display_product(&self, args: &[Expr]) -> Option<Piece> {
        let (coef, rest) = match args.first() {
            Some(Expr::Num(c)) => (c.clone(), &args[1..]),
            _ => (Rational::one(), args),
        };
        let has_den = !coef.is_integer()
            || rest
                .iter()
                .any(|f| matches!(f, Expr::Op(n, a) if n == "^" && a[1].is_negative_num()));
        if has_den {
            let num: Vec<Expr> = rest
                .iter()
                .filter(|f| !matches!(f, Expr::Op(n, a) if n == "^" && a[1].is_negative_num()))
                .cloned()
                .collect();
            let den: Vec<Expr> = rest
                .iter()
                .filter(|f| matches!(f, Expr::Op(n, a) if n == "^" && a[1].is_negative_num()))
                .cloned()
                .collect();
            return Some(self.fraction(&num, &coef, &den));
        }
        if rest.is_empty() {
            return None;
        }
        if coef == -Rational::one() {
            let inner = if rest.len() == 1 {
                rest[0].clone()
            } else {
                Expr::Op("*".into(), rest.to_vec())
            };
            let p = self.expr(&inner);
            return Some(Piece::new(format!("-{}", self.wrap_inner(&p, NEG, false)), NEG));
        }
        if coef.is_one() && rest.len() == 1 {
            return Some(self.expr(&rest[0]));
        }
        None
    }

    /// `coef * num / den`, where `den` holds factors `b^(-k)`.
    fn fraction(&self, num: &[Expr], coef: &Rational, den: &[Expr]) -> Piece {
        let neg = coef.is_negative();
        let c = coef.abs();
        let mut top: Vec<Expr> = Vec::new();
        if !c.numer().is_one() || num.is_empty() {
            top.push(Expr::Num(Rational::from_integer(c.numer().clone())));
        }
        top.extend(num.iter().cloned());
        let mut bottom: Vec<Expr> = Vec::new();
        if !c.denom().is_one() {
            bottom.push(Expr::Num(Rational::from_integer(c.denom().clone())));
        }
        for f in den {
            if let Some([b, Expr::Num(k)]) = f.as_op("^") {
                let k = -k.clone();
                bottom.push(if k.is_one() {
                    b.clone()
                } else {
                    Expr::Op("^".into(), vec![b.clone(), Expr::Num(k)])
                });
            }
        }
        let join = |fs: Vec<Expr>| -> Piece {
            if fs.len() == 1 {
                self.expr(&fs[0])
            } else {
                self.nary("*", 50, &fs)
            }
        };
        let t = join(top);
        let text = if bottom.is_empty() {
            t.text.clone()
        } else {
            let b = join(bottom);
            format!("{}/{}", self.wrap(&t, 50, false), self.wrap_inner(&b, 50, true))
        };
        let text = if neg { format!("-{text}") } else { text };
        Piece::new(text, if neg { NEG.min(50) } else { 50 })
    }

    /// Rows of a matrix or vertical column in display style.
    fn rows(&self, rows: &[Expr], sep: &str, compact: bool) -> String {
        rows.iter()
            .map(|row| {
                let items = match row.as_op("list") {
                    Some(items) => items.to_vec(),
                    None => vec![row.clone()],
                };
                items
                    .iter()
                    .map(|it| match it.as_op(":=") {
                        Some([l, r]) if compact => {
                            format!("{}:={}", self.expr(l).text, self.expr(r).text)
                        }
                        _ => self.expr(it).text,
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(sep)
    }

    fn ss(&self, target: &Expr, s: &Expr) -> String {
        let t = self.expr(target);
        let bracket = match s {
            Expr::Op(n, rows) if n == "matrix" => format!("[{}]", self.rows(rows, "; ", true)),
            Expr::Op(n, items) if n == "list" => format!("[{}]", self.rows(items, "; ", true)),
            other => self.expr(other).text,
        };
        format!("{}{bracket}", self.wrap(&t, ATOM, false))
    }

    fn underbrace(&self, ss: &Expr, out: &Expr) -> String {
        let top = match ss.as_op("_ss_") {
            Some([t, s]) => self.ss(t, s),
            _ => self.expr(ss).text,
        };
        let bottom = self.expr(out).text;
        let w = top.chars().count().max(bottom.chars().count()).max(2);
        let brace = format!("\\{}/", "_".repeat(w - 2));
        let pad = (w.saturating_sub(bottom.chars().count())) / 2;
        format!("{top}\n{brace}\n{}{bottom}", " ".repeat(pad))
    }
}

fn tight(name: &str) -> bool {
    matches!(name, "*" | "/" | "^")
}

/// A `list` of `lhs := rhs` items.
pub(crate) fn is_binding_list(e: &Expr) -> bool {
    match e.as_op("list") {
        Some(items) => items
            .iter()
            .all(|it| matches!(it.as_op(":="), Some([_, _]))),
        None => false,
    }
}
