//! Statement splitting and the `;` / `$` prompt loop.

use std::io::{BufRead, Write};

use mex_core::session::Session;
use mex_core::{parse_statement, Expr};

use crate::{show, Format};

/// Drop `/* ... */` comments.
pub fn strip_comments(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut rest = src;
    while let Some(start) = rest.find("/*") {
        out.push_str(&rest[..start]);
        match rest[start + 2..].find("*/") {
            Some(end) => rest = &rest[start + 2 + end + 2..],
            None => return out,
        }
    }
    out.push_str(rest);
    out
}

/// Split after each `;` and `$`, keeping the terminators. Text after the last
/// terminator is returned separately. An unbalanced bracket does not swallow later
/// statements, since neither character can occur inside an expression.
pub fn split_statements(src: &str) -> (Vec<String>, String) {
    let mut done = Vec::new();
    let mut start = 0;
    for (i, c) in src.char_indices() {
        match c {
            ';' | '$' => {
                let stmt = src[start..=i].trim();
                if stmt.len() > 1 {
                    done.push(stmt.to_string());
                }
                start = i + 1;
            }
            _ => {}
        }
    }
    (done, src[start..].trim().to_string())
}

/// A session plus numbering for `(%oN)` labels.
pub struct Repl {
    pub session: Session,
    pub format: Format,
    inputs: usize,
    pub errors: usize,
}

impl Repl {
    pub fn new(format: Format) -> Self {
        Repl {
            session: Session::new(),
            format,
            inputs: 0,
            errors: 0,
        }
    }

    /// Number of the next input, as in `(%i7)`.
    pub fn next_input(&self) -> usize {
        self.inputs + 1
    }

    /// Run one statement; returns its value when it should be printed.
    pub fn run(&mut self, stmt: &str) -> Result<Option<(Expr, bool)>, mex_core::Error> {
        self.inputs += 1;
        let parsed = parse_statement(stmt)?;
        let out = self.session.run_statement(&parsed)?;
        Ok(out.show.then_some((out.value, out.tree)))
    }

    /// Run one statement and write `(%oN) value` or the error.
    pub fn feed(&mut self, stmt: &str, out: &mut impl Write, err: &mut impl Write) {
        let n = self.next_input();
        match self.run(stmt) {
            Ok(Some((v, tree))) => {
                let text = show(&v, self.format, tree);
                if text.contains('\n') {
                    let _ = writeln!(out, "(%o{n})\n{text}");
                } else {
                    let _ = writeln!(out, "(%o{n}) {text}");
                }
            }
            Ok(None) => {}
            Err(e) => {
                self.errors += 1;
                let _ = writeln!(err, "(%i{n}) error: {e}");
            }
        }
    }

    /// Read statements from `input` until it ends, prompting when `prompt` is set.
    pub fn run_loop(
        &mut self,
        input: impl BufRead,
        out: &mut impl Write,
        err: &mut impl Write,
        prompt: bool,
    ) {
        let mut pending = String::new();
        if prompt {
            let _ = write!(out, "(%i{}) ", self.next_input());
            let _ = out.flush();
        }
        for line in input.lines() {
            let Ok(line) = line else { break };
            pending.push_str(&line);
            pending.push('\n');
            let cleaned = strip_comments(&pending);
            if cleaned.contains("/*") {
                continue;
            }
            let (stmts, rest) = split_statements(&cleaned);
            if stmts.is_empty() {
                continue;
            }
            for s in stmts {
                self.feed(&s, out, err);
            }
            pending = rest;
            if prompt {
                let _ = write!(out, "(%i{}) ", self.next_input());
                let _ = out.flush();
            }
        }
        let rest = strip_comments(&pending);
        if !rest.trim().is_empty() {
            self.feed(rest.trim(), out, err);
        }
        if prompt {
            let _ = writeln!(out);
        }
    }
}
