//! Box-drawing expression trees.

use serde::{Deserialize, Serialize};

use super::ascii::Printer;
use super::AsciiStyle;
use crate::expr::Expr;
use crate::registry::{active_name, OperatorRegistry};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeDirection {
    /// Children drawn to the right of their parent, first child on the parent's line.
    #[default]
    ChildrenRight,
    /// Conventional outline with the root on top.
    RootTop,
}

/// Label and children of `e` as drawn in a tree.
fn node(e: &Expr, style: AsciiStyle) -> (String, Vec<Expr>) {
    let printer = Printer {
        style,
        reg: OperatorRegistry::shared(),
    };
    match e {
        Expr::Num(_) | Expr::Sym(_) | Expr::Hole(_) => (printer.expr(e).text, vec![]),
        Expr::App(head, args) => match head.as_ref() {
            Expr::Sym(s) => (s.clone(), args.clone()),
            other => {
                let mut ch = vec![other.clone()];
                ch.extend(args.iter().cloned());
                ("ap".into(), ch)
            }
        },
        Expr::Lambda(params, body) => {
            let mut ch: Vec<Expr> = params.iter().map(|p| Expr::sym(p.clone())).collect();
            ch.push((**body).clone());
            ("λ".into(), ch)
        }
        Expr::Quoted(inner) => ("'".into(), vec![(**inner).clone()]),
        Expr::Op(name, args) => {
            if style == AsciiStyle::Display {
                if let ("box" | "hl", [inner]) = (name.as_str(), args.as_slice()) {
                    let (label, ch) = node(inner, style);
                    let label = if name == "box" {
                        format!("⎡{label}⎤")
                    } else {
                        format!("«{label}»")
                    };
                    return (label, ch);
                }
            }
            let reg = OperatorRegistry::shared();
            let label = match reg.get(name) {
                Some(d) if style == AsciiStyle::Display => {
                    active_name(&d.display.ascii).to_string()
                }
                Some(d) if d.token != d.name => d.token.clone(),
                _ => name.clone(),
            };
            (label, args.clone())
        }
    }
}

fn width(s: &str) -> usize {
    s.chars().count()
}

fn right(e: &Expr, style: AsciiStyle) -> Vec<String> {
    let (label, children) = node(e, style);
    if children.is_empty() {
        return vec![label];
    }
    let pad = " ".repeat(width(&label));
    let mut lines = Vec::new();
    let n = children.len();
    for (i, c) in children.iter().enumerate() {
        let block = right(c, style);
        let last = i + 1 == n;
        for (j, line) in block.iter().enumerate() {
            let prefix = match (i, j) {
                (0, 0) if n == 1 => format!("{label}───"),
                (0, 0) => format!("{label}─┬─"),
                (_, 0) if last => format!("{pad} └─"),
                (_, 0) => format!("{pad} ├─"),
                _ if last => format!("{pad}   "),
                _ => format!("{pad} │ "),
            };
            lines.push(format!("{prefix}{line}"));
        }
    }
    lines
}

fn top(e: &Expr, style: AsciiStyle, lines: &mut Vec<String>, prefix: &str, branch: &str) {
    let (label, children) = node(e, style);
    lines.push(format!("{prefix}{branch}{label}"));
    let child_prefix = match branch {
        "" => prefix.to_string(),
        "└─ " => format!("{prefix}   "),
        _ => format!("{prefix}│  "),
    };
    let n = children.len();
    for (i, c) in children.iter().enumerate() {
        let b = if i + 1 == n { "└─ " } else { "├─ " };
        top(c, style, lines, &child_prefix, b);
    }
}

/// Draw `e` as a tree.
pub fn render_tree(e: &Expr, direction: TreeDirection, style: AsciiStyle) -> String {
    let lines = match direction {
        TreeDirection::ChildrenRight => right(e, style),
        TreeDirection::RootTop => {
            let mut lines = Vec::new();
            top(e, style, &mut lines, "", "");
            lines
        }
    };
    lines
        .iter()
        .map(|l| l.trim_end())
        .collect::<Vec<_>>()
        .join("\n")
}
