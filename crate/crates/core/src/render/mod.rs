//! Renderers: ASCII (one-line and tree), LaTeX and JSON, over expressions, derivations,
//! comprehension trace trees and exercises, with box/highlight/underbrace annotations.

pub mod ascii;
pub mod latex;
pub mod tree;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::comprehension::TraceTree;
use crate::derivation::{Derivation, Justification, Particle, Report, StepStatus, StepVerdict};
use crate::error::Result;
use crate::expr::Expr;
use crate::paths::{self, Exercise, Path};

pub use ascii::expr_to_string;
pub use latex::expr_to_latex;
pub use tree::{render_tree, TreeDirection};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AsciiStyle {
    /// Textbook look: lazy operators without dots, glyph boxes, fractions.
    #[default]
    Display,
    /// Re-parseable source text.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum AnnotationKind {
    Box,
    Highlight,
    Underbrace { caption: Expr },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub path: Path,
    #[serde(flatten)]
    pub kind: AnnotationKind,
}

/// Who is looking at an exercise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Audience {
    #[default]
    Teacher,
    Student,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    /// Draw expressions as trees instead of one line.
    pub tree: Option<TreeDirection>,
    pub show_labels: bool,
    pub show_justifications: bool,
    pub style: AsciiStyle,
    pub audience: Audience,
}

impl Default for Layout {
    fn default() -> Self {
        Layout {
            tree: None,
            show_labels: true,
            show_justifications: true,
            style: AsciiStyle::Display,
            audience: Audience::Teacher,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DocBase {
    Expr(Expr),
    Derivation(Derivation),
    Trace(TraceTree),
    Exercise(Exercise),
}

/// Something to render, with markup that never changes the underlying value.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderableDocument {
    pub base: DocBase,
    pub annotations: Vec<Annotation>,
    pub layout: Layout,
}

impl RenderableDocument {
    pub fn new(base: DocBase) -> Self {
        RenderableDocument {
            base,
            annotations: Vec::new(),
            layout: Layout::default(),
        }
    }

    pub fn expr(e: Expr) -> Self {
        Self::new(DocBase::Expr(e))
    }

    pub fn with_annotation(mut self, path: Path, kind: AnnotationKind) -> Result<Self> {
        if let DocBase::Expr(e) = &self.base {
            paths::part(e, &path)?;
        }
        self.annotations.push(Annotation { path, kind });
        Ok(self)
    }

    pub fn with_layout(mut self, layout: Layout) -> Self {
        self.layout = layout;
        self
    }

    /// The base expression with annotations turned into markup nodes.
    /// Deeper paths are wrapped first so outer wrappers do not shift them.
    pub fn marked_expr(&self) -> Option<Expr> {
        let DocBase::Expr(e) = &self.base else {
            return None;
        };
        Some(mark(e, &self.annotations))
    }
}

fn mark(e: &Expr, annotations: &[Annotation]) -> Expr {
    let mut anns: Vec<&Annotation> = annotations.iter().collect();
    anns.sort_by(|a, b| b.path.len().cmp(&a.path.len()));
    let mut out = e.clone();
    for a in anns {
        let Ok(sub) = paths::part(&out, &a.path) else {
            continue;
        };
        let wrapped = match &a.kind {
            AnnotationKind::Box => Expr::op("box", vec![sub]),
            AnnotationKind::Highlight => Expr::op("hl", vec![sub]),
            AnnotationKind::Underbrace { caption } => {
                Expr::op("underbrace", vec![sub, caption.clone()])
            }
        };
        if let Ok(next) = paths::replace_at(&out, &a.path, wrapped) {
            out = next;
        }
    }
    out
}

fn expr_ascii(e: &Expr, layout: &Layout) -> String {
    match layout.tree {
        Some(dir) => render_tree(e, dir, layout.style),
        None => expr_to_string(e, layout.style),
    }
}

fn particle_text(p: Particle) -> &'static str {
    match p {
        Particle::If => "if",
        Particle::Then => "then",
        Particle::And => "and",
        Particle::None => "",
    }
}

/// Short human-readable justification, e.g. `by (4), (2)` or `RPot [n := 3]`.
pub fn justification_text(j: &Justification, style: AsciiStyle) -> String {
    let refs = |r: &[String]| r.join(", ");
    match j {
        Justification::Assumption => String::new(),
        Justification::Simplify => String::new(),
        Justification::RewriteBy(r) | Justification::Chain(r) | Justification::Algebra(r) => {
            format!("by {}", refs(r))
        }
        Justification::RuleInstance { rule, subst } => {
            if subst.is_empty() {
                format!("[{rule}]")
            } else {
                format!("[{rule}] {}", expr_to_string(&subst.to_list_expr(), style))
            }
        }
    }
}

fn pad(s: &str, w: usize) -> String {
    let n = s.chars().count();
    format!("{s}{}", " ".repeat(w.saturating_sub(n)))
}

/// Rows of a derivation table: particle, lhs, `=(k)`, rhs, justification.
fn derivation_rows(d: &Derivation, report: Option<&Report>, layout: &Layout) -> Vec<[String; 5]> {
    d.steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let verdict = report.and_then(|r| r.steps.get(i));
            let lhs = s
                .lhs
                .as_ref()
                .map(|e| expr_to_string(e, layout.style))
                .unwrap_or_default();
            let eq = if layout.show_labels {
                format!("={}", s.label)
            } else {
                "=".to_string()
            };
            let mut just = if layout.show_justifications {
                justification_text(&s.just, layout.style)
            } else {
                String::new()
            };
            if let Some(v) = verdict {
                if let Some(inst) = &v.instance {
                    just = format!("{just}: {}", expr_to_string(inst, layout.style));
                }
                let flag = match v.status {
                    StepStatus::Verified => "",
                    StepStatus::Soft => " (?)",
                    StepStatus::Failed => " (x)",
                };
                just = format!("{just}{flag}").trim_start().to_string();
            }
            let particle = if d.columns { particle_text(s.particle) } else { "" };
            [
                particle.to_string(),
                lhs,
                eq,
                expr_to_string(&highlighted_rhs(&s.rhs, verdict), layout.style),
                just,
            ]
        })
        .collect()
}

/// The right side with the changed regions reported by the checker wrapped in `hl`.
fn highlighted_rhs(rhs: &Expr, verdict: Option<&StepVerdict>) -> Expr {
    let Some(v) = verdict else {
        return rhs.clone();
    };
    let anns: Vec<Annotation> = v
        .highlight
        .iter()
        .filter(|(_, b)| !b.is_empty())
        .map(|(_, b)| Annotation {
            path: b.clone(),
            kind: AnnotationKind::Highlight,
        })
        .collect();
    mark(rhs, &anns)
}

fn table(rows: &[[String; 5]]) -> Vec<String> {
    let mut widths = [0usize; 5];
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            widths[i] = widths[i].max(c.chars().count());
        }
    }
    rows.iter()
        .map(|r| {
            let cells: Vec<String> = r
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if i == 1 {
                        format!("{}{c}", " ".repeat(widths[1] - c.chars().count()))
                    } else {
                        pad(c, widths[i])
                    }
                })
                .collect();
            cells.join("  ").trim_end().to_string()
        })
        .collect()
}

/// L/M/R table of a derivation in plain text.
pub fn derivation_ascii(d: &Derivation, layout: &Layout) -> String {
    ascii_table(d, None, layout)
}

/// The table with checker output: changed regions in `«..»`, rule instances after the
/// rule name, `(?)` on soft passes and `(x)` on failures.
pub fn checked_derivation_ascii(d: &Derivation, report: &Report, layout: &Layout) -> String {
    ascii_table(d, Some(report), layout)
}

fn ascii_table(d: &Derivation, report: Option<&Report>, layout: &Layout) -> String {
    let mut out = Vec::new();
    if !d.title.is_empty() {
        out.push(d.title.clone());
    }
    out.extend(table(&derivation_rows(d, report, layout)));
    out.join("\n")
}

/// Two derivations side by side (e.g. an archetypal case next to the general method).
pub fn parallel_ascii(left: &Derivation, right: &Derivation, layout: &Layout) -> String {
    let l = derivation_ascii(left, layout);
    let r = derivation_ascii(right, layout);
    let ll: Vec<&str> = l.lines().collect();
    let rl: Vec<&str> = r.lines().collect();
    let w = ll.iter().map(|s| s.chars().count()).max().unwrap_or(0);
    (0..ll.len().max(rl.len()))
        .map(|i| {
            let a = ll.get(i).copied().unwrap_or("");
            let b = rl.get(i).copied().unwrap_or("");
            format!("{}  ‖  {b}", pad(a, w)).trim_end().to_string()
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn trace_ascii(t: &TraceTree, style: AsciiStyle) -> String {
    let mut lines = Vec::new();
    fn walk(n: &crate::comprehension::TraceNode, depth: usize, style: AsciiStyle, lines: &mut Vec<String>) {
        let mut line = "  ".repeat(depth);
        if let Some(v) = &n.value {
            line.push_str(&format!("{} = {}", n.var, expr_to_string(v, style)));
        }
        for (k, v) in &n.annotations {
            line.push_str(&format!("  [{k}: {}]", expr_to_string(v, style)));
        }
        if n.pruned {
            line.push_str("  —");
        }
        if n.value.is_some() || !n.annotations.is_empty() || n.pruned {
            lines.push(line);
        }
        for c in &n.children {
            walk(c, depth + usize::from(n.value.is_some()), style, lines);
        }
    }
    walk(&t.root, 0, style, &mut lines);
    lines.join("\n")
}

/// Plain-text rendering.
pub fn render_ascii(d: &RenderableDocument) -> String {
    match &d.base {
        DocBase::Expr(_) => expr_ascii(&d.marked_expr().unwrap(), &d.layout),
        DocBase::Derivation(der) => derivation_ascii(der, &d.layout),
        DocBase::Trace(t) => trace_ascii(t, d.layout.style),
        DocBase::Exercise(x) => {
            let statement = mark(&x.statement, &d.annotations);
            let mut out = expr_ascii(&statement, &d.layout);
            for h in &x.holes {
                out.push_str(&format!("\n?{} at {}", h.label, paths::format_path(&h.path)));
            }
            out
        }
    }
}

fn latex_just(j: &Justification) -> String {
    match j {
        Justification::Assumption | Justification::Simplify => String::new(),
        Justification::RewriteBy(r) | Justification::Chain(r) | Justification::Algebra(r) => {
            format!("\\text{{by {}}}", r.join(", "))
        }
        Justification::RuleInstance { rule, subst } => {
            let mut s = format!("\\text{{[{rule}]}}");
            if !subst.is_empty() {
                s.push_str(&format!("\\ {}", expr_to_latex(&subst.to_matrix())));
            }
            s
        }
    }
}

fn latex_just_checked(j: &Justification, verdict: Option<&StepVerdict>) -> String {
    let Justification::RuleInstance { rule, subst } = j else {
        return latex_just(j);
    };
    let formula = crate::rules::find_rule(rule)
        .map(|r| expr_to_latex(&r.schema))
        .unwrap_or_default();
    let mut s = format!("\\underbrace{{\\text{{[{rule}]}}}}_{{{formula}}}");
    if !subst.is_empty() {
        s.push_str(&format!("\\ {}", expr_to_latex(&subst.to_matrix())));
    }
    if let Some(inst) = verdict.and_then(|v| v.instance.as_ref()) {
        s.push_str(&format!("\\ \\left({}\\right)", expr_to_latex(inst)));
    }
    s
}

/// LaTeX for a derivation as an aligned L/M/R array.
pub fn derivation_latex(d: &Derivation, layout: &Layout) -> String {
    latex_table(d, None, layout)
}

/// The array with checker output: `\hl` around changed regions and rule names
/// underbraced with their formulas.
pub fn checked_derivation_latex(d: &Derivation, report: &Report, layout: &Layout) -> String {
    latex_table(d, Some(report), layout)
}

fn latex_table(d: &Derivation, report: Option<&Report>, layout: &Layout) -> String {
    let mut rows = Vec::new();
    for (i, s) in d.steps.iter().enumerate() {
        let verdict = report.and_then(|r| r.steps.get(i));
        let particle = if d.columns {
            match particle_text(s.particle) {
                "" => String::new(),
                p => format!("\\text{{{p}}}"),
            }
        } else {
            String::new()
        };
        let lhs = s.lhs.as_ref().map(expr_to_latex).unwrap_or_default();
        let eq = if layout.show_labels {
            format!("\\overset{{{}}}{{=}}", s.label)
        } else {
            "=".into()
        };
        let just = if !layout.show_justifications {
            String::new()
        } else if verdict.is_some() {
            latex_just_checked(&s.just, verdict)
        } else {
            latex_just(&s.just)
        };
        rows.push(format!(
            "{particle} & {lhs} & {eq} & {} & {just}",
            expr_to_latex(&highlighted_rhs(&s.rhs, verdict))
        ));
    }
    format!(
        "\\begin{{array}}{{lrcll}}\n{}\n\\end{{array}}",
        rows.join(" \\\\\n")
    )
}

/// LaTeX rendering.
pub fn render_latex(d: &RenderableDocument) -> String {
    match &d.base {
        DocBase::Expr(_) => expr_to_latex(&d.marked_expr().unwrap()),
        DocBase::Derivation(der) => derivation_latex(der, &d.layout),
        DocBase::Trace(t) => {
            let mut rows = Vec::new();
            fn walk(n: &crate::comprehension::TraceNode, depth: usize, rows: &mut Vec<String>) {
                if let Some(v) = &n.value {
                    let mut cells = vec![String::new(); depth];
                    cells.push(format!("{} = {}", latex::symbol(&n.var), expr_to_latex(v)));
                    if let Some(r) = n.annotations.get("result") {
                        cells.push(expr_to_latex(r));
                    } else if n.pruned {
                        cells.push("\\text{---}".into());
                    }
                    rows.push(cells.join(" & "));
                }
                for c in &n.children {
                    walk(c, depth + usize::from(n.value.is_some()), rows);
                }
            }
            walk(&t.root, 0, &mut rows);
            format!("\\begin{{array}}{{llll}}\n{}\n\\end{{array}}", rows.join(" \\\\\n"))
        }
        DocBase::Exercise(x) => expr_to_latex(&mark(&x.statement, &d.annotations)),
    }
}

/// JSON rendering; student-audience exercises omit the source (and thus the answers).
pub fn render_json(d: &RenderableDocument) -> Value {
    let base = match &d.base {
        DocBase::Expr(e) => crate::json::to_value(e),
        DocBase::Derivation(der) => der.to_json(),
        DocBase::Trace(t) => serde_json::to_value(t).expect("trace serializes"),
        DocBase::Exercise(x) => match d.layout.audience {
            Audience::Student => x.student_view(),
            Audience::Teacher => x.to_json(),
        },
    };
    if d.annotations.is_empty() {
        return base;
    }
    json!({
        "base": base,
        "annotations": serde_json::to_value(&d.annotations).expect("annotations serialize"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn dpart_style_box() {
        let e = parse("2 +. 3 +. 4 = 2 +. 7").unwrap();
        let doc = RenderableDocument::expr(e.clone())
            .with_annotation(vec![2, 1], AnnotationKind::Box)
            .unwrap();
        assert_eq!(render_ascii(&doc), "2 + 3 + 4 = ⎡2⎤ + 7");
        assert!(render_latex(&doc).contains("\\boxed{2}"));
        // markup leaves the base alone
        assert_eq!(doc.base, DocBase::Expr(e));
    }

    #[test]
    fn invalid_annotation_path() {
        let e = parse("x + 1").unwrap();
        assert!(RenderableDocument::expr(e)
            .with_annotation(vec![3], AnnotationKind::Box)
            .is_err());
    }

    #[test]
    fn json_schema_instance() {
        let doc = RenderableDocument::expr(parse("x + 1").unwrap());
        assert_eq!(
            render_json(&doc).to_string(),
            r#"{"op":"+","args":[{"sym":"x"},{"num":"1/1"}]}"#
        );
    }
}
