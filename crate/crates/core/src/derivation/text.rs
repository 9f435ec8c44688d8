//! The plain-text derivation format.
//!
//! ```text
//! # title: ln derivative
//! # opaque: f, g
//! if    f(g(x))            =(1) x
//! then  'diff(f(g(x)), x)  =(2) 'diff(x, x)            || by (1)
//! and                      =(3) 1
//! and   'diff(f(g(x)), x)  =(4) f'(g(x)) *. g'(x)      || [RChain]
//! and   f'(g(x))*g'(x)     =(5) 1                      || chain (4), (2), (3)
//! and   g'(x)              =(6) 1/f'(g(x))             || algebra (5)
//! ```
//!
//! Each step is `[particle] [lhs] =(label) rhs [|| justification]`. An empty
//! justification means an assumption after `if` and plain simplification otherwise.
//! Lines starting with `#` are directives (`title`, `opaque`, `columns`) or comments;
//! comments attach to the next step.

use super::{Derivation, Justification, Particle, Step};
use crate::error::{Error, Result};
use crate::parser::parse;
use crate::render::{expr_to_string, AsciiStyle};
use crate::subst::Substitution;

fn malformed(line_no: usize, msg: impl std::fmt::Display) -> Error {
    Error::MalformedStep(format!("line {line_no}: {msg}"))
}

/// Byte offset of `=(` at bracket depth zero, with the label end.
fn find_label(s: &str) -> Option<(usize, usize)> {
    let bytes = s.as_bytes();
    let mut depth = 0i32;
    for i in 0..bytes.len() {
        match bytes[i] {
            b'(' | b'[' | b'{' => depth += 1,
            b')' | b']' | b'}' => depth -= 1,
            b'=' if depth == 0 && bytes.get(i + 1) == Some(&b'(') => {
                let prev = if i > 0 { bytes[i - 1] } else { b' ' };
                if matches!(prev, b'<' | b'>' | b'!' | b':' | b'=') {
                    continue;
                }
                let close = s[i + 2..].find(')')? + i + 2;
                let inner = &s[i + 2..close];
                if !inner.is_empty() && inner.chars().all(|c| c.is_alphanumeric() || c == '\'') {
                    return Some((i, close + 1));
                }
            }
            _ => {}
        }
    }
    None
}

fn parse_refs(s: &str, line_no: usize) -> Result<Vec<String>> {
    let refs: Vec<String> = s
        .split(',')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(super::normalize_label)
        .collect();
    if refs.is_empty() {
        return Err(malformed(line_no, "justification lists no references"));
    }
    Ok(refs)
}

fn parse_just(s: &str, particle: Particle, line_no: usize) -> Result<Justification> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(if particle == Particle::If {
            Justification::Assumption
        } else {
            Justification::Simplify
        });
    }
    let (word, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
    let rest = rest.trim();
    match word {
        "assumption" | "hyp" => Ok(Justification::Assumption),
        "simplify" => Ok(Justification::Simplify),
        "by" => Ok(Justification::RewriteBy(parse_refs(rest, line_no)?)),
        "chain" => Ok(Justification::Chain(parse_refs(rest, line_no)?)),
        "algebra" => Ok(Justification::Algebra(parse_refs(rest, line_no)?)),
        "rule" => rule_instance(rest, line_no),
        _ if s.starts_with('[') => {
            let close = s.find(']').ok_or_else(|| malformed(line_no, "unclosed rule name"))?;
            rule_instance(&format!("{} {}", &s[1..close], &s[close + 1..]), line_no)
        }
        other => Err(malformed(line_no, format!("unknown justification `{other}`"))),
    }
}

fn rule_instance(s: &str, line_no: usize) -> Result<Justification> {
    let s = s.trim();
    let (name, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
    if name.is_empty() {
        return Err(malformed(line_no, "missing rule name"));
    }
    let subst = if rest.trim().is_empty() {
        Substitution::empty()
    } else {
        Substitution::parse(rest.trim())?
    };
    Ok(Justification::RuleInstance {
        rule: name.to_string(),
        subst,
    })
}

/// Parse the text format.
pub fn parse_text(src: &str) -> Result<Derivation> {
    let mut d = Derivation::new("");
    let mut pending: Vec<String> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            let c = c.trim();
            match c.split_once(':') {
                Some(("title", v)) => d.title = v.trim().to_string(),
                Some(("opaque", v)) => d.opaque.extend(
                    v.split(',').map(str::trim).filter(|x| !x.is_empty()).map(str::to_string),
                ),
                Some(("columns", v)) => d.columns = !matches!(v.trim(), "no" | "false" | "off"),
                _ => pending.push(c.to_string()),
            }
            continue;
        }
        let (body, just) = match line.split_once("||") {
            Some((b, j)) => (b.trim(), j),
            None => (line, ""),
        };
        let (particle, body) = match body.split_once(char::is_whitespace) {
            Some((w, rest)) if matches!(w, "if" | "then" | "and") => {
                (Particle::parse(w)?, rest.trim())
            }
            _ => (Particle::None, body),
        };
        let (at, end) = find_label(body).ok_or_else(|| malformed(line_no, "missing `=(label)`"))?;
        let lhs_src = body[..at].trim();
        let lhs = if lhs_src.is_empty() {
            None
        } else {
            Some(parse(lhs_src)?)
        };
        let label = &body[at + 1..end];
        let rhs = parse(body[end..].trim())?;
        let mut step = Step::new(particle, lhs, label, rhs, parse_just(just, particle, line_no)?);
        if !pending.is_empty() {
            step.comment = Some(pending.join("\n"));
            pending.clear();
        }
        d.push(step);
    }
    d.validate()?;
    Ok(d)
}

fn just_text(j: &Justification, particle: Particle) -> String {
    match j {
        Justification::Assumption if particle == Particle::If => String::new(),
        Justification::Assumption => "assumption".into(),
        Justification::Simplify if particle == Particle::If => "simplify".into(),
        Justification::Simplify => String::new(),
        Justification::RewriteBy(r) => format!("by {}", r.join(", ")),
        Justification::Chain(r) => format!("chain {}", r.join(", ")),
        Justification::Algebra(r) => format!("algebra {}", r.join(", ")),
        Justification::RuleInstance { rule, subst } => {
            if subst.is_empty() {
                format!("[{rule}]")
            } else {
                format!("[{rule}] {}", expr_to_string(&subst.to_list_expr(), AsciiStyle::Exact))
            }
        }
    }
}

/// Write the text format; [`parse_text`] reads it back to the same document.
pub fn to_text(d: &Derivation) -> String {
    let mut out = Vec::new();
    if !d.title.is_empty() {
        out.push(format!("# title: {}", d.title));
    }
    if !d.opaque.is_empty() {
        out.push(format!("# opaque: {}", d.opaque.join(", ")));
    }
    if !d.columns {
        out.push("# columns: no".to_string());
    }
    for s in &d.steps {
        if let Some(c) = &s.comment {
            for l in c.lines() {
                out.push(format!("# {l}"));
            }
        }
        let mut line = String::new();
        if s.particle != Particle::None {
            line.push_str(s.particle.as_str());
            line.push(' ');
        }
        if let Some(l) = &s.lhs {
            line.push_str(&expr_to_string(l, AsciiStyle::Exact));
            line.push(' ');
        }
        line.push_str(&format!("={} {}", s.label, expr_to_string(&s.rhs, AsciiStyle::Exact)));
        let j = just_text(&s.just, s.particle);
        if !j.is_empty() {
            line.push_str(" || ");
            line.push_str(&j);
        }
        out.push(line);
    }
    out.join("\n") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN: &str = "\
# title: ln derivative
# opaque: f, g
if    f(g(x))            =(1) x
then  'diff(f(g(x)), x)  =(2) 'diff(x, x)            || by (1)
and                      =(3) 1
and   'diff(f(g(x)), x)  =(4) f'(g(x)) *. g'(x)      || [RChain]
and   f'(g(x))*g'(x)     =(5) 1                      || chain (4), (2), (3)
# divide both sides
and   g'(x)              =(6) 1/f'(g(x))             || algebra (5)
";

    #[test]
    fn reads_the_table() {
        let d = parse_text(LN).unwrap();
        assert_eq!(d.title, "ln derivative");
        assert_eq!(d.opaque, vec!["f", "g"]);
        assert_eq!(d.steps.len(), 6);
        assert!(d.steps[2].lhs.is_none());
        assert_eq!(d.steps[0].just, Justification::Assumption);
        assert_eq!(d.steps[2].just, Justification::Simplify);
        assert_eq!(d.steps[5].comment.as_deref(), Some("divide both sides"));
        assert!(matches!(&d.steps[3].just, Justification::RuleInstance { rule, .. } if rule == "RChain"));
    }

    #[test]
    fn text_round_trip() {
        let d = parse_text(LN).unwrap();
        assert_eq!(parse_text(&to_text(&d)).unwrap(), d);
    }

    #[test]
    fn errors() {
        assert!(parse_text("a = b").is_err());
        assert!(matches!(
            parse_text("a =(1) b || by (2)"),
            Err(Error::DanglingReference(_))
        ));
        assert!(parse_text("=(1) b").is_err());
    }
}
