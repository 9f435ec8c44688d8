//! Loop programs equivalent to a comprehension, and a small interpreter for them.
//!
//! ```text
//! for x = 1, 5 do
//!   for y = x, 6 - x do
//!     print((x, y))
//!   end
//! end
//! ```

use super::{bind, source_elements, truth, Clause, Comprehension, Env};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::parser::parse;
use crate::render::{expr_to_string, AsciiStyle};
use crate::simplify::simplify_default;
use crate::subst::subst_vars;

#[derive(Clone, Debug, PartialEq)]
pub enum LoopStmt {
    For {
        vars: Vec<String>,
        source: Expr,
        body: Vec<LoopStmt>,
    },
    If {
        cond: Expr,
        body: Vec<LoopStmt>,
    },
    Print(Expr),
}

fn src(e: &Expr) -> String {
    expr_to_string(e, AsciiStyle::Exact)
}

fn pattern_text(vars: &[String]) -> String {
    if vars.len() == 1 {
        vars[0].clone()
    } else {
        format!("({})", vars.join(", "))
    }
}

/// Nested `for`/`if`/`print` program for `c`.
pub fn emit_loops(c: &Comprehension) -> String {
    let mut lines = Vec::new();
    let mut depth = 0;
    for cl in &c.clauses {
        let pad = "  ".repeat(depth);
        match cl {
            Clause::Gen { vars, source } => {
                let head = match source.as_op("range") {
                    Some([lo, hi]) if vars.len() == 1 => {
                        format!("for {} = {}, {} do", vars[0], src(lo), src(hi))
                    }
                    _ => format!("for {} in {} do", pattern_text(vars), src(source)),
                };
                lines.push(format!("{pad}{head}"));
                depth += 1;
            }
            Clause::Filter(cond) => {
                lines.push(format!("{pad}if {} then", src(cond)));
                depth += 1;
            }
            Clause::Result(e) => lines.push(format!("{pad}print({})", src(e))),
        }
    }
    for d in (0..depth).rev() {
        lines.push(format!("{}end", "  ".repeat(d)));
    }
    lines.join("\n")
}

fn bad(line_no: usize, msg: impl std::fmt::Display) -> Error {
    Error::syntax(
        format!("loop program line {line_no}: {msg}"),
        crate::error::SourceSpan::point(0),
    )
}

/// Split at the first comma outside brackets.
fn split_top_comma(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

fn parse_vars(s: &str, line_no: usize) -> Result<Vec<String>> {
    let s = s.trim();
    let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
    let vars: Vec<String> = inner.split(',').map(|v| v.trim().to_string()).collect();
    if vars.iter().any(|v| v.is_empty() || !v.chars().all(|c| c.is_alphanumeric() || c == '_')) {
        return Err(bad(line_no, format!("bad loop variable `{s}`")));
    }
    Ok(vars)
}

fn parse_block(lines: &[(usize, &str)], pos: &mut usize, top: bool) -> Result<Vec<LoopStmt>> {
    let mut out = Vec::new();
    while *pos < lines.len() {
        let (no, line) = lines[*pos];
        *pos += 1;
        if line == "end" {
            if top {
                return Err(bad(no, "unmatched `end`"));
            }
            return Ok(out);
        }
        if let Some(rest) = line.strip_prefix("for ") {
            let rest = rest
                .strip_suffix(" do")
                .ok_or_else(|| bad(no, "`for` line must end with `do`"))?;
            let (vars, source) = if let Some((v, s)) = rest.split_once(" in ") {
                (parse_vars(v, no)?, parse(s.trim())?)
            } else if let Some((v, bounds)) = rest.split_once('=') {
                let (lo, hi) =
                    split_top_comma(bounds).ok_or_else(|| bad(no, "expected `lo, hi`"))?;
                (
                    parse_vars(v, no)?,
                    Expr::op("range", vec![parse(lo.trim())?, parse(hi.trim())?]),
                )
            } else {
                return Err(bad(no, "expected `for v = lo, hi do` or `for v in S do`"));
            };
            let body = parse_block(lines, pos, false)?;
            out.push(LoopStmt::For { vars, source, body });
        } else if let Some(rest) = line.strip_prefix("if ") {
            let cond = rest
                .strip_suffix(" then")
                .ok_or_else(|| bad(no, "`if` line must end with `then`"))?;
            let body = parse_block(lines, pos, false)?;
            out.push(LoopStmt::If {
                cond: parse(cond.trim())?,
                body,
            });
        } else if let Some(rest) = line.strip_prefix("print(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| bad(no, "unclosed `print(`"))?;
            out.push(LoopStmt::Print(parse(inner)?));
        } else {
            return Err(bad(no, format!("unknown statement `{line}`")));
        }
    }
    if top {
        Ok(out)
    } else {
        Err(bad(lines.len(), "missing `end`"))
    }
}

/// Parse a loop program.
pub fn parse_loops(text: &str) -> Result<Vec<LoopStmt>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut pos = 0;
    parse_block(&lines, &mut pos, true)
}

fn exec(stmts: &[LoopStmt], env: &mut Env, out: &mut Vec<Expr>) -> Result<()> {
    for s in stmts {
        match s {
            LoopStmt::Print(e) => out.push(simplify_default(&subst_vars(e, env))?),
            LoopStmt::If { cond, body } => {
                if truth(cond, env)? {
                    exec(body, env, out)?;
                }
            }
            LoopStmt::For { vars, source, body } => {
                let (_, elems) = source_elements(source, env)?;
                for x in elems {
                    let saved = env.clone();
                    bind(vars, &x, env)?;
                    exec(body, env, out)?;
                    *env = saved;
                }
            }
        }
    }
    Ok(())
}

/// Run a loop program and collect what it prints, in order.
pub fn run_loops(text: &str) -> Result<Vec<Expr>> {
    let prog = parse_loops(text)?;
    let mut out = Vec::new();
    exec(&prog, &mut Env::new(), &mut out)?;
    Ok(out)
}
