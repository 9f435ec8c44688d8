//! LaTeX math-mode rendering. Uses the macros in `fixtures/preamble.tex` (`\hl`).

use num::{One, Signed};

use super::ascii::{is_binding_list, negated_summand, ATOM};
use crate::expr::{Expr, Rational};
use crate::registry::{active_name, Fixity, OperatorRegistry};

const NEG: u16 = 55;

struct Piece {
    text: String,
    prec: u16,
    neg: bool,
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

fn paren(s: &str) -> String {
    format!("\\left({s}\\right)")
}

fn wrap(p: &Piece, min: u16, strict: bool) -> String {
    if p.prec < min || (strict && p.prec == min) {
        paren(&p.text)
    } else {
        p.text.clone()
    }
}

fn wrap_inner(p: &Piece, min: u16, strict: bool) -> String {
    if p.neg && min >= 40 {
        paren(&p.text)
    } else {
        wrap(p, min, strict)
    }
}

/// LaTeX for a symbol name: single letters stay italic, longer names are upright.
pub fn symbol(name: &str) -> String {
    let base = name.trim_end_matches('\'');
    let primes = &name[base.len()..];
    let base = match base.split_once('%') {
        Some((b, k)) => format!("{}_{{{k}}}", symbol(b)),
        None if base.chars().count() <= 1 => base.to_string(),
        None if base == "R" => "\\mathbb{R}".to_string(),
        None => format!("\\mathrm{{{}}}", base.replace('_', "\\_")),
    };
    format!("{base}{primes}")
}

fn number(r: &Rational) -> Piece {
    if r.is_integer() {
        let prec = if r.is_negative() { NEG } else { ATOM };
        Piece::new(r.numer().to_string(), prec)
    } else {
        let sign = if r.is_negative() { "-" } else { "" };
        Piece::new(
            format!("{sign}\\frac{{{}}}{{{}}}", r.numer().abs(), r.denom()),
            if r.is_negative() { NEG } else { ATOM },
        )
    }
}

fn list(items: &[Expr]) -> String {
    items
        .iter()
        .map(|a| expr(a).text)
        .collect::<Vec<_>>()
        .join(", ")
}

fn rows(rows: &[Expr], col_sep: &str) -> String {
    rows.iter()
        .map(|row| match row.as_op("list") {
            Some(items) => items
                .iter()
                .map(|it| expr(it).text)
                .collect::<Vec<_>>()
                .join(col_sep),
            None => expr(row).text,
        })
        .collect::<Vec<_>>()
        .join(" \\\\ ")
}

fn bmatrix(s: &Expr) -> String {
    match s {
        Expr::Op(n, r) if n == "matrix" => {
            format!("\\begin{{bmatrix}} {} \\end{{bmatrix}}", rows(r, " & "))
        }
        Expr::Op(n, items) if n == "list" => format!(
            "\\begin{{bmatrix}} {} \\end{{bmatrix}}",
            items
                .iter()
                .map(|i| expr(i).text)
                .collect::<Vec<_>>()
                .join(" \\\\ ")
        ),
        other => expr(other).text,
    }
}

fn ss(target: &Expr, s: &Expr) -> String {
    let t = expr(target);
    format!("{} {}", wrap(&t, ATOM, false), bmatrix(s))
}

/// Render an expression in LaTeX math mode.
pub fn expr_to_latex(e: &Expr) -> String {
    expr(e).text
}

fn expr(e: &Expr) -> Piece {
    match e {
        Expr::Num(r) => number(r),
        Expr::Sym(s) => Piece::atom(symbol(s)),
        Expr::Hole(None) => Piece::atom("?"),
        Expr::Hole(Some(k)) => Piece::atom(format!("?_{{{k}}}")),
        Expr::App(head, args) => app(head, args),
        Expr::Lambda(params, body) => Piece::atom(format!(
            "\\lambda([{}],\\ {})",
            params.iter().map(|p| symbol(p)).collect::<Vec<_>>().join(","),
            expr(body).text
        )),
        Expr::Quoted(inner) => {
            if let Some(("diff", [f, v])) = inner.as_call() {
                let p = expr(f);
                let body = if p.prec >= 60 && !p.neg { p.text } else { paren(&p.text) };
                return Piece::new(format!("\\frac{{d}}{{d{}}} {body}", expr(v).text), 50);
            }
            expr(inner)
        }
        Expr::Op(name, args) => op(name, args),
    }
}

fn app(head: &Expr, args: &[Expr]) -> Piece {
    let h = match head {
        Expr::Sym(s) => s.as_str(),
        other => {
            let p = expr(other);
            return Piece::atom(format!("{}{}", wrap(&p, ATOM, false), paren(&list(args))));
        }
    };
    match (h, args) {
        ("sqrt", [a]) => Piece::atom(format!("\\sqrt{{{}}}", expr(a).text)),
        ("sin" | "cos" | "tan" | "exp" | "log", [a]) => {
            let p = expr(a);
            let arg = if p.prec >= ATOM && !matches!(a, Expr::App(..)) {
                format!("\\,{}", p.text)
            } else {
                paren(&p.text)
            };
            Piece::new(format!("\\{h}{arg}"), 70)
        }
        _ => Piece::atom(format!("{}({})", symbol(h), list(args))),
    }
}

fn is_inverse_power(f: &Expr) -> bool {
    matches!(f.as_op("^"), Some([_, k]) if k.is_negative_num())
}

fn fraction(coef: &Rational, num: &[Expr], den: &[Expr]) -> Piece {
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
                Expr::op("^", vec![b.clone(), Expr::Num(k)])
            });
        }
    }
    let join = |fs: &[Expr]| {
        if fs.len() == 1 {
            expr(&fs[0]).text
        } else {
            product(fs).text
        }
    };
    let sign = if coef.is_negative() { "-" } else { "" };
    Piece::new(
        format!("{sign}\\frac{{{}}}{{{}}}", join(&top), join(&bottom)),
        if coef.is_negative() { NEG } else { ATOM },
    )
}

fn product(args: &[Expr]) -> Piece {
    let (coef, rest) = match args.first() {
        Some(Expr::Num(c)) => (c.clone(), &args[1..]),
        _ => (Rational::one(), args),
    };
    if !coef.is_integer() || rest.iter().any(is_inverse_power) {
        let num: Vec<Expr> = rest.iter().filter(|f| !is_inverse_power(f)).cloned().collect();
        let den: Vec<Expr> = rest.iter().filter(|f| is_inverse_power(f)).cloned().collect();
        return fraction(&coef, &num, &den);
    }
    let mut out = String::new();
    let mut factors: Vec<&Expr> = Vec::new();
    if coef == -Rational::one() && !rest.is_empty() {
        out.push('-');
    } else if !coef.is_one() || rest.is_empty() {
        out.push_str(&number(&coef).text);
        if rest.is_empty() {
            return Piece::new(out, number(&coef).prec);
        }
    }
    factors.extend(rest.iter());
    let mut prev_digit_end = !out.is_empty() && out != "-";
    for (i, f) in factors.iter().enumerate() {
        let p = expr(f);
        let nested = matches!(f, Expr::Op(n, _) if n == "*");
        let t = if nested || (i > 0 || prev_digit_end) && p.neg {
            paren(&p.text)
        } else {
            wrap(&p, 50, i > 0)
        };
        let starts_digit = t.starts_with(|c: char| c.is_ascii_digit()) || t.starts_with("\\frac");
        if prev_digit_end && starts_digit {
            out.push_str(" \\cdot ");
        } else if !out.is_empty() && out != "-" {
            out.push_str("\\,");
        }
        out.push_str(&t);
        prev_digit_end = t.ends_with(|c: char| c.is_ascii_digit());
    }
    Piece::new(out, 50)
}

fn relation_token(name: &str) -> Option<&'static str> {
    Some(match name {
        "=" => "=",
        ":=" => ":=",
        "<" => "<",
        ">" => ">",
        "<=" => "\\le",
        ">=" => "\\ge",
        "!=" => "\\neq",
        "in" => "\\in",
        _ => return None,
    })
}

fn op(name: &str, args: &[Expr]) -> Piece {
    let active = active_name(name);
    match (active, args) {
        ("list", _) => Piece::atom(format!("\\left[{}\\right]", list(args))),
        ("set", _) => Piece::atom(format!("\\{{{}\\}}", list(args))),
        ("tuple", _) => Piece::atom(paren(&list(args))),
        ("range", [lo, hi]) => Piece::atom(format!(
            "\\{{{}, \\dots, {}\\}}",
            expr(lo).text,
            expr(hi).text
        )),
        ("compre" | "select", [first, rest @ ..]) if !rest.is_empty() => Piece::atom(format!(
            "\\{{{} \\mid {}\\}}",
            expr(first).text,
            list(rest)
        )),
        ("index", [t, k]) => {
            let p = expr(t);
            Piece::atom(format!("{}[{}]", wrap(&p, ATOM, false), expr(k).text))
        }
        ("box", [inner]) => Piece::atom(format!("\\boxed{{{}}}", expr(inner).text)),
        ("hl", [inner]) => Piece::atom(format!("\\hl{{{}}}", expr(inner).text)),
        ("underbrace", [inner, caption]) => Piece::atom(format!(
            "\\underbrace{{{}}}_{{{}}}",
            expr(inner).text,
            expr(caption).text
        )),
        ("matrix", _) => Piece::atom(bmatrix(&Expr::op("matrix", args.to_vec()))),
        ("vcol", r) => Piece::atom(format!(
            "\\left(\\begin{{array}}{{c}} {} \\end{{array}}\\right)",
            rows(r, " ")
        )),
        ("_s_", [t, l]) if is_binding_list(l) => Piece::atom(ss(t, l)),
        ("_ss_", [t, s]) => Piece::atom(ss(t, s)),
        ("_sss_", [s, out]) => {
            let left = match s.as_op("_ss_") {
                Some([t, m]) => ss(t, m),
                _ => expr(s).text,
            };
            let o = expr(out);
            Piece::new(format!("{left} = {}", wrap(&o, 21, false)), 20)
        }
        ("_ssu_", [s, out]) => {
            let left = match s.as_op("_ss_") {
                Some([t, m]) => ss(t, m),
                _ => expr(s).text,
            };
            Piece::atom(format!("\\underbrace{{{left}}}_{{{}}}", expr(out).text))
        }
        ("neg", [t]) => {
            let p = expr(t);
            let text = if p.neg || matches!(t, Expr::Num(_)) && p.prec < ATOM {
                format!("-{}", paren(&p.text))
            } else {
                format!("-{}", wrap(&p, NEG, false))
            };
            Piece::new(text, NEG)
        }
        ("prime", [t]) => {
            let p = expr(t);
            Piece::atom(format!("{}'", wrap(&p, ATOM, false)))
        }
        ("+", _) if args.len() >= 2 => {
            let mut out = String::new();
            for (i, a) in args.iter().enumerate() {
                let nested = matches!(a, Expr::Op(n, _) if n == name);
                if i == 0 {
                    let p = expr(a);
                    out.push_str(&if nested { paren(&p.text) } else { wrap(&p, 40, false) });
                    continue;
                }
                if let Some(t) = negated_summand(a) {
                    let p = expr(&t);
                    out.push_str(" - ");
                    out.push_str(&wrap_inner(&p, 40, true));
                    continue;
                }
                let p = expr(a);
                out.push_str(" + ");
                out.push_str(&if nested {
                    paren(&p.text)
                } else {
                    wrap_inner(&p, 40, true)
                });
            }
            Piece::new(out, 40)
        }
        ("-", [a, b]) => {
            let (pa, pb) = (expr(a), expr(b));
            Piece::new(
                format!("{} - {}", wrap(&pa, 40, false), wrap_inner(&pb, 40, true)),
                40,
            )
        }
        ("*", _) if args.len() >= 2 => product(args),
        ("/", [a, b]) => Piece::atom(format!("\\frac{{{}}}{{{}}}", expr(a).text, expr(b).text)),
        ("^", [b, k]) => {
            if k.is_negative_num() && name == "^" {
                return fraction(&Rational::one(), &[], &[Expr::op("^", args.to_vec())]);
            }
            let pb = expr(b);
            let base = if pb.neg || pb.prec <= 60 || matches!(b, Expr::Op(n, _) if n == "^") {
                paren(&pb.text)
            } else {
                pb.text
            };
            Piece::new(format!("{base}^{{{}}}", expr(k).text), 60)
        }
        (rel, [l, r]) if relation_token(rel).is_some() => {
            let tok = relation_token(rel).unwrap();
            let prec = if rel == "in" { 5 } else if rel == ":=" { 10 } else { 20 };
            let (pl, pr) = (expr(l), expr(r));
            Piece::new(
                format!("{} {tok} {}", wrap(&pl, prec, true), wrap(&pr, prec, true)),
                prec,
            )
        }
        _ => {
            let reg = OperatorRegistry::shared();
            match reg.get(name) {
                Some(d) if d.fixity == Fixity::Infix && args.len() == 2 => {
                    let (pl, pr) = (expr(&args[0]), expr(&args[1]));
                    let tok = if d.display.latex == d.name {
                        format!("\\mathbin{{{}}}", d.name.replace('_', "\\_"))
                    } else {
                        d.display.latex.clone()
                    };
                    Piece::new(
                        format!(
                            "{} {tok} {}",
                            wrap(&pl, d.precedence, true),
                            wrap(&pr, d.precedence, true)
                        ),
                        d.precedence,
                    )
                }
                _ => Piece::atom(format!(
                    "\\mathrm{{{}}}({})",
                    name.replace('_', "\\_"),
                    list(args)
                )),
            }
        }
    }
}
