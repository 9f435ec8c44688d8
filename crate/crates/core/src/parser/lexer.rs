use num::BigInt;

use crate::error::{Error, Result, SourceSpan};
use crate::registry::OperatorRegistry;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Num(BigInt),
    Ident(String),
    /// A punctuation operator known to the registry (`+`, `:=`, `+.`, ...).
    Op(String),
    /// `?` or `?3`.
    Hole(Option<u32>),
    /// `'` with `attached` set when it directly follows `)` or `]`.
    Apostrophe { attached: bool },
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Bar,
    Ellipsis,
    Colon,
    Semi,
    Dollar,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str, registry: &OperatorRegistry) -> Result<Vec<Token>> {
    let symbolic = registry.symbolic_tokens();
    let bytes = src.as_bytes();
    let mut out: Vec<Token> = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let c = src[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        let push = |out: &mut Vec<Token>, tok: Tok, end: usize| {
            out.push(Token {
                tok,
                span: SourceSpan::new(start, end),
            })
        };
        if c.is_ascii_digit() {
            while i < src.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = src[start..i].parse().expect("digits");
            push(&mut out, Tok::Num(n), i);
            continue;
        }
        if is_ident_start(c) {
            while i < src.len() && is_ident_char(bytes[i] as char) {
                i += 1;
            }
            // primes attached to a name are part of it: f', g''
            while i < src.len() && bytes[i] == b'\'' {
                i += 1;
            }
            push(&mut out, Tok::Ident(src[start..i].to_string()), i);
            continue;
        }
        if c == '%' {
            i += 1;
            push(&mut out, Tok::Ident("%".into()), i);
            continue;
        }
        if src[i..].starts_with("...") {
            i += 3;
            push(&mut out, Tok::Ellipsis, i);
            continue;
        }
        if c == '?' {
            i += 1;
            let digits = i;
            while i < src.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let label = if i > digits {
                Some(src[digits..i].parse::<u32>().map_err(|_| {
                    Error::syntax("hole label too large", SourceSpan::new(start, i))
                })?)
            } else {
                None
            };
            push(&mut out, Tok::Hole(label), i);
            continue;
        }
        if c == '\'' {
            let attached = start > 0
                && matches!(out.last(), Some(t) if t.span.end == start
                    && matches!(t.tok, Tok::RParen | Tok::RBracket));
            i += 1;
            push(&mut out, Tok::Apostrophe { attached }, i);
            continue;
        }
        if src[i..].starts_with(":=") {
            i += 2;
            push(&mut out, Tok::Op(":=".into()), i);
            continue;
        }
        if let Some(op) = symbolic.iter().find(|t| src[i..].starts_with(t.as_str())) {
            // `-` is also the prefix token of `neg`; it is lexed like any other operator
            i += op.len();
            push(&mut out, Tok::Op(op.clone()), i);
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '|' => Some(Tok::Bar),
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            '$' => Some(Tok::Dollar),
            _ => None,
        };
        match single {
            Some(tok) => {
                i += 1;
                push(&mut out, tok, i);
            }
            None => {
                return Err(Error::syntax(
                    format!("unexpected character `{c}`"),
                    SourceSpan::new(start, start + c.len_utf8()),
                ))
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan::point(src.len()),
    });
    Ok(out)
}
