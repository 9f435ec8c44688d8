//! Surface-language parser (Pratt style).
//!
//! Grammar summary, loosest binding first:
//!
//! ```text
//! in  (only inside braces)   :=   = < > <= >= !=   _s_ _ss_ _sss_ _ssu_ (and other
//! registered infix ops)   + - +. -.   * / *. /.   unary -   ^ ^. (right assoc)
//! postfix ' and  e [bindings]  /  e [index]
//! atoms: 12  x  f(a, b)  lambda([x, y], body)  'e  ?  ?3  (a)  (a, b)  [a, b]
//!        {a, b}  {lo, ..., hi}  {e | x in S, cond}  {x in S | cond}
//! ```
//!
//! `a - b` is read as `a + (-b)`: negative literals fold into numbers and numeric
//! coefficients, everything else becomes `neg(b)`.

mod lexer;

pub use lexer::{tokenize, Tok, Token};

use crate::error::{Error, Result, SourceSpan};
use crate::expr::{Expr, Rational};
use crate::registry::{Assoc, Fixity, OperatorRegistry};

/// Binding power of `neg`'s operand: tighter than `*`, looser than `^`.
const PREFIX_BP: u16 = 110;
/// Binding power of the quote prefix.
const QUOTE_BP: u16 = 200;
/// Postfix `[ ... ]` and calls.
const POSTFIX_BP: u16 = 160;

/// How a statement was terminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminator {
    None,
    /// `;`: show the result.
    Show,
    /// `$`: compute silently.
    Silent,
}

/// One REPL-style input line.
#[derive(Clone, Debug, PartialEq)]
pub struct Statement {
    /// `name : expr` target.
    pub label: Option<String>,
    pub expr: Expr,
    pub terminator: Terminator,
}

/// Parse with the shared builtin operator registry.
pub fn parse(src: &str) -> Result<Expr> {
    parse_with(src, OperatorRegistry::shared())
}

pub fn parse_with(src: &str, registry: &OperatorRegistry) -> Result<Expr> {
    Ok(parse_statement_with(src, registry)?.expr)
}

pub fn parse_statement(src: &str) -> Result<Statement> {
    parse_statement_with(src, OperatorRegistry::shared())
}

pub fn parse_statement_with(src: &str, registry: &OperatorRegistry) -> Result<Statement> {
    if src.trim().is_empty() {
        return Err(Error::syntax("empty input", SourceSpan::point(0)));
    }
    let tokens = tokenize(src, registry)?;
    let mut p = Parser {
        toks: tokens,
        pos: 0,
        registry,
        in_braces: false,
    };
    let label = match (&p.peek().tok, &p.peek_at(1).tok) {
        (Tok::Ident(name), Tok::Colon) => {
            let name = name.clone();
            p.pos += 2;
            Some(name)
        }
        _ => None,
    };
    let (expr, _) = p.expr(0)?;
    let terminator = match p.peek().tok {
        Tok::Semi => {
            p.pos += 1;
            Terminator::Show
        }
        Tok::Dollar => {
            p.pos += 1;
            Terminator::Silent
        }
        _ => Terminator::None,
    };
    if p.peek().tok != Tok::Eof {
        let t = p.peek().clone();
        return Err(Error::syntax(
            format!("unexpected {}", describe(&t.tok)),
            t.span,
        ));
    }
    Ok(Statement {
        label,
        expr,
        terminator,
    })
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(s) => format!("operator `{s}`"),
        Tok::Hole(_) => "hole".into(),
        Tok::Apostrophe { .. } => "`'`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Ellipsis => "`...`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Dollar => "`$`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// `-t` as a tree: folds into literals and numeric coefficients.
pub fn negate(t: Expr) -> Expr {
    match t {
        Expr::Num(n) => Expr::Num(-n),
        Expr::Op(name, mut args)
            if name == "*" && matches!(args.first(), Some(Expr::Num(_))) =>
        {
            if let Expr::Num(n) = &args[0] {
                args[0] = Expr::Num(-n.clone());
            }
            Expr::Op(name, args)
        }
        other => Expr::op("neg", vec![other]),
    }
}

/// Whether an item of a postfix `[...]` is a binding `lhs := rhs` (or `lhs = rhs`).
fn is_binding_item(e: &Expr) -> bool {
    matches!(e, Expr::Op(n, a) if (n == ":=" || n == "=") && a.len() == 2)
}

/// Rewrite `=` bindings to `:=`.
fn normalize_binding(e: Expr) -> Expr {
    match e {
        Expr::Op(n, a) if n == "=" => Expr::Op(":=".into(), a),
        other => other,
    }
}

struct Parser<'r> {
    toks: Vec<Token>,
    pos: usize,
    registry: &'r OperatorRegistry,
    in_braces: bool,
}

/// Infix operator found at the current position.
struct InfixOp {
    name: String,
    fixity: Fixity,
    lbp: u16,
    rbp: u16,
    /// `-` continues a `+` chain with a negated operand.
    negated: bool,
}

impl<'r> Parser<'r> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Token {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<SourceSpan> {
        let t = self.next();
        if t.tok == tok {
            Ok(t.span)
        } else {
            Err(Error::syntax(
                format!("expected {}, found {}", describe(&tok), describe(&t.tok)),
                t.span,
            ))
        }
    }

    fn with_braces<T>(&mut self, flag: bool, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let saved = self.in_braces;
        self.in_braces = flag;
        let out = f(self);
        self.in_braces = saved;
        out
    }

    fn infix_at(&self) -> Result<Option<InfixOp>> {
        let t = self.peek();
        let (token, ident) = match &t.tok {
            Tok::Op(s) => (s.as_str(), false),
            Tok::Ident(s) => (s.as_str(), true),
            _ => return Ok(None),
        };
        if token == "in" && !self.in_braces {
            return Ok(None);
        }
        let def = if token == "-" {
            self.registry.get("+")
        } else {
            self.registry.infix_by_token(token)
        };
        let Some(def) = def else {
            if ident && token.len() > 2 && token.starts_with('_') && token.ends_with('_') {
                return Err(Error::UnknownOperator {
                    name: token.to_string(),
                    span: t.span,
                });
            }
            return Ok(None);
        };
        let p = def.precedence * 2;
        let (lbp, rbp) = match (def.fixity, def.assoc) {
            (Fixity::Infix, Assoc::Right) => (p + 1, p),
            _ => (p, p + 1),
        };
        Ok(Some(InfixOp {
            name: def.name.clone(),
            fixity: def.fixity,
            lbp,
            rbp,
            negated: token == "-",
        }))
    }

    fn expr(&mut self, min_bp: u16) -> Result<(Expr, SourceSpan)> {
        let (mut lhs, mut span) = self.prefix()?;
        loop {
            match &self.peek().tok {
                Tok::LBracket if POSTFIX_BP >= min_bp => {
                    let (e, s) = self.bracket_suffix(lhs, span)?;
                    lhs = e;
                    span = s;
                    continue;
                }
                Tok::Apostrophe { attached: true } => {
                    let t = self.next();
                    lhs = Expr::op("prime", vec![lhs]);
                    span = span.join(t.span);
                    continue;
                }
                Tok::LParen if matches!(lhs, Expr::App(..) | Expr::Lambda(..)) => {
                    let (args, s) = self.call_args()?;
                    lhs = Expr::app(lhs, args);
                    span = span.join(s);
                    continue;
                }
                _ => {}
            }
            let Some(op) = self.infix_at()? else { break };
            if op.lbp < min_bp {
                break;
            }
            if op.fixity == Fixity::Nary {
                let mut args = vec![lhs];
                let mut negated = op.negated;
                loop {
                    self.next();
                    let (rhs, s) = self.expr(op.rbp)?;
                    args.push(if negated { negate(rhs) } else { rhs });
                    span = span.join(s);
                    match self.infix_at()? {
                        Some(next) if next.name == op.name => negated = next.negated,
                        _ => break,
                    }
                }
                lhs = Expr::Op(op.name, args);
            } else {
                self.next();
                let (rhs, s) = self.expr(op.rbp)?;
                span = span.join(s);
                let rhs = if op.name == "_s_" {
                    normalize_subst_rhs(rhs)
                } else {
                    rhs
                };
                lhs = Expr::Op(op.name, vec![lhs, rhs]);
            }
        }
        Ok((lhs, span))
    }

    fn prefix(&mut self) -> Result<(Expr, SourceSpan)> {
        let t = self.next();
        let span = t.span;
        match t.tok {
            Tok::Num(n) => Ok((Expr::Num(Rational::from_integer(n)), span)),
            Tok::Hole(label) => Ok((Expr::Hole(label), span)),
            Tok::Ident(name) => {
                if name == "lambda" && self.peek().tok == Tok::LParen {
                    return self.lambda(span);
                }
                if self.peek().tok == Tok::LParen {
                    let (args, s) = self.call_args()?;
                    return Ok((Expr::call(name, args), span.join(s)));
                }
                Ok((Expr::Sym(name), span))
            }
            Tok::Apostrophe { .. } => {
                let (inner, s) = self.expr(QUOTE_BP)?;
                Ok((Expr::quote(inner), span.join(s)))
            }
            Tok::Op(tok) => {
                let Some(def) = self.registry.prefix_by_token(&tok) else {
                    return Err(Error::syntax(format!("unexpected operator `{tok}`"), span));
                };
                let name = def.name.clone();
                let literal = matches!(self.peek().tok, Tok::Num(_));
                let bp = if name == "neg" {
                    PREFIX_BP
                } else {
                    def.precedence * 2
                };
                let (operand, s) = self.expr(bp)?;
                let e = match operand {
                    Expr::Num(n) if name == "neg" && literal => Expr::Num(-n),
                    other => Expr::op(name, vec![other]),
                };
                Ok((e, span.join(s)))
            }
            Tok::LParen => self.with_braces(false, |p| {
                if p.peek().tok == Tok::RParen {
                    let end = p.next().span;
                    return Ok((Expr::op("tuple", vec![]), span.join(end)));
                }
                let (first, _) = p.expr(0)?;
                if p.peek().tok == Tok::Comma {
                    let mut items = vec![first];
                    while p.peek().tok == Tok::Comma {
                        p.next();
                        items.push(p.expr(0)?.0);
                    }
                    let end = p.expect(Tok::RParen)?;
                    return Ok((Expr::op("tuple", items), span.join(end)));
                }
                let end = p.expect(Tok::RParen)?;
                Ok((first, span.join(end)))
            }),
            Tok::LBracket => {
                let (items, end) = self.with_braces(false, |p| p.items(Tok::RBracket))?;
                Ok((Expr::op("list", items), span.join(end)))
            }
            Tok::LBrace => self.brace(span),
            other => Err(Error::syntax(format!("unexpected {}", describe(&other)), span)),
        }
    }

    /// Comma separated expressions up to `close`, which is consumed.
    fn items(&mut self, close: Tok) -> Result<(Vec<Expr>, SourceSpan)> {
        let mut items = Vec::new();
        if self.peek().tok == close {
            return Ok((items, self.next().span));
        }
        loop {
            items.push(self.expr(0)?.0);
            if self.peek().tok == Tok::Comma {
                self.next();
                continue;
            }
            let end = self.expect(close)?;
            return Ok((items, end));
        }
    }

    fn call_args(&mut self) -> Result<(Vec<Expr>, SourceSpan)> {
        self.expect(Tok::LParen)?;
        self.with_braces(false, |p| p.items(Tok::RParen))
    }

    fn lambda(&mut self, start: SourceSpan) -> Result<(Expr, SourceSpan)> {
        self.expect(Tok::LParen)?;
        let open = self.expect(Tok::LBracket)?;
        let mut params: Vec<String> = Vec::new();
        if self.peek().tok != Tok::RBracket {
            loop {
                let t = self.next();
                match t.tok {
                    Tok::Ident(name) => {
                        if params.contains(&name) {
                            return Err(Error::syntax(
                                format!("duplicate lambda parameter `{name}`"),
                                t.span,
                            ));
                        }
                        params.push(name)
                    }
                    other => {
                        return Err(Error::syntax(
                            format!("expected a parameter name, found {}", describe(&other)),
                            t.span,
                        ))
                    }
                }
                if self.peek().tok == Tok::Comma {
                    self.next();
                    continue;
                }
                break;
            }
        }
        self.expect(Tok::RBracket)
            .map_err(|_| Error::syntax("unterminated parameter list", open))?;
        self.expect(Tok::Comma)?;
        let (body, _) = self.with_braces(false, |p| p.expr(0))?;
        let end = self.expect(Tok::RParen)?;
        Ok((Expr::lambda(params, body), start.join(end)))
    }

    /// `e [a := 1, f(x) := x^2]` (substitution) or `e [k]` (indexing).
    fn bracket_suffix(&mut self, target: Expr, span: SourceSpan) -> Result<(Expr, SourceSpan)> {
        let open = self.next().span;
        let (items, end) = self.with_braces(false, |p| p.items(Tok::RBracket))?;
        let span = span.join(end);
        let bindings = items.iter().filter(|e| is_binding_item(e)).count();
        if bindings == items.len() {
            let list = Expr::op("list", items.into_iter().map(normalize_binding).collect());
            validate_binding_list(&list).map_err(|e| match e {
                Error::MalformedBinding(m) => Error::syntax(m, open.join(end)),
                other => other,
            })?;
            return Ok((Expr::op("_s_", vec![target, list]), span));
        }
        if bindings == 0 && items.len() == 1 {
            let index = items.into_iter().next().unwrap();
            return Ok((Expr::op("index", vec![target, index]), span));
        }
        Err(Error::syntax(
            "malformed binding: every item of a substitution must be `lhs := rhs`",
            open.join(end),
        ))
    }

    fn brace(&mut self, open: SourceSpan) -> Result<(Expr, SourceSpan)> {
        self.with_braces(true, |p| {
            if p.peek().tok == Tok::RBrace {
                let end = p.next().span;
                return Ok((Expr::op("set", vec![]), open.join(end)));
            }
            let first = p.brace_item()?;
            match p.peek().tok {
                Tok::Bar => {
                    p.next();
                    let (quals, end) = p.items(Tok::RBrace)?;
                    let first = first.ok_or_else(|| {
                        Error::syntax("`...` is only allowed in ranges", open)
                    })?;
                    let head = if matches!(&first, Expr::Op(n, a) if n == "in" && a.len() == 2) {
                        "select"
                    } else {
                        "compre"
                    };
                    let mut args = vec![first];
                    args.extend(quals);
                    Ok((Expr::op(head, args), open.join(end)))
                }
                _ => {
                    let mut items = vec![first];
                    while p.peek().tok == Tok::Comma {
                        p.next();
                        items.push(p.brace_item()?);
                    }
                    let end = p.expect(Tok::RBrace)?;
                    let span = open.join(end);
                    if items.iter().any(Option::is_none) {
                        return match items.as_slice() {
                            [Some(lo), None, Some(hi)] => {
                                Ok((Expr::op("range", vec![lo.clone(), hi.clone()]), span))
                            }
                            _ => Err(Error::syntax(
                                "a range is written `{lo, ..., hi}`",
                                span,
                            )),
                        };
                    }
                    Ok((Expr::op("set", items.into_iter().flatten().collect()), span))
                }
            }
        })
    }

    /// An item inside braces; `None` for `...`.
    fn brace_item(&mut self) -> Result<Option<Expr>> {
        if self.peek().tok == Tok::Ellipsis {
            self.next();
            return Ok(None);
        }
        Ok(Some(self.expr(0)?.0))
    }
}

/// `e _s_ [a = 1]` stores its bindings with `:=` like the postfix form.
fn normalize_subst_rhs(rhs: Expr) -> Expr {
    match rhs {
        Expr::Op(n, items) if n == "list" && items.iter().all(is_binding_item) => {
            Expr::Op(n, items.into_iter().map(normalize_binding).collect())
        }
        other => other,
    }
}

/// Check that a `list` of `:=` items is a valid substitution.
pub fn validate_binding_list(list: &Expr) -> Result<()> {
    let items = list
        .as_op("list")
        .ok_or_else(|| Error::MalformedBinding("expected a bracketed list".into()))?;
    let mut heads: Vec<String> = Vec::new();
    for item in items {
        let Some([lhs, _]) = item.as_op(":=").or_else(|| item.as_op("=")) else {
            return Err(Error::MalformedBinding(format!("`{item}` is not `lhs := rhs`")));
        };
        let head = binding_head(lhs)?;
        if heads.contains(&head) {
            return Err(Error::DuplicateBinding(head));
        }
        heads.push(head);
    }
    Ok(())
}

/// Head name of a binding left-hand side: a symbol or `h(v1, ..., vk)` with distinct variables.
pub fn binding_head(lhs: &Expr) -> Result<String> {
    match lhs {
        Expr::Sym(s) => Ok(s.clone()),
        Expr::App(head, args) => {
            let Some(h) = head.as_sym() else {
                return Err(Error::MalformedBinding(format!(
                    "`{lhs}`: function pattern head must be a name"
                )));
            };
            let mut seen: Vec<&str> = Vec::new();
            for a in args {
                match a.as_sym() {
                    Some(v) if !seen.contains(&v) => seen.push(v),
                    _ => {
                        return Err(Error::MalformedBinding(format!(
                            "`{lhs}`: pattern parameters must be distinct names"
                        )))
                    }
                }
            }
            Ok(h.to_string())
        }
        other => Err(Error::MalformedBinding(format!(
            "`{other}` is neither a name nor a function pattern"
        ))),
    }
}
