//! Change highlighting between two expressions, and step expansion.

use std::collections::BTreeMap;

use super::{normalize_label, rename_refs, Collapsed, Derivation};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::paths::Path;
use crate::simplify::canon;

/// A changed region: path into the first expression, path into the second.
pub type HighlightPair = (Path, Path);

fn same_shape(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::Op(x, xs), Expr::Op(y, ys)) => x == y && xs.len() == ys.len(),
        (Expr::App(_, xs), Expr::App(_, ys)) => xs.len() == ys.len(),
        (Expr::Lambda(x, _), Expr::Lambda(y, _)) => x == y,
        (Expr::Quoted(_), Expr::Quoted(_)) => true,
        _ => false,
    }
}

/// Minimal differing subtree pairs: descend while heads and arities match.
pub fn diff_highlight(a: &Expr, b: &Expr) -> Vec<HighlightPair> {
    fn go(a: &Expr, b: &Expr, path: &mut Path, out: &mut Vec<HighlightPair>) {
        if a == b {
            return;
        }
        if !same_shape(a, b) {
            out.push((path.clone(), path.clone()));
            return;
        }
        if let (Expr::App(ha, _), Expr::App(hb, _)) = (a, b) {
            path.push(0);
            go(ha, hb, path, out);
            path.pop();
        }
        for (i, (x, y)) in a.children().iter().zip(b.children()).enumerate() {
            path.push(i + 1);
            go(x, y, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(a, b, &mut Vec::new(), &mut out);
    out
}

/// Replace the step labeled `label` by the steps of `expansion`.
///
/// References inside the expansion resolve to its own labels first and to the outer
/// document otherwise. Every label is renumbered `(1)`..`(n)`; references to the replaced
/// step now point at the expansion's last step. The original document is kept in
/// `collapsed`.
pub fn expand_step(d: &Derivation, label: &str, expansion: &Derivation) -> Result<Derivation> {
    let label = normalize_label(label);
    let i = d
        .index_of(&label)
        .ok_or_else(|| Error::DanglingReference(label.clone()))?;
    if expansion.steps.is_empty() {
        return Err(Error::MalformedStep("empty expansion".into()));
    }
    let defs = {
        let mut names = d.opaque.clone();
        names.extend(expansion.opaque.iter().cloned());
        crate::simplify::Definitions::with_opaque(names.iter().map(String::as_str))
    };
    let expected = d.equality(i)?;
    let found = match expansion.conclusion() {
        Some(c) => c,
        None => Expr::eq(
            d.effective_lhs(i)?,
            expansion.steps.last().expect("nonempty").rhs.clone(),
        ),
    };
    if canon(&expected, &defs)? != canon(&found, &defs)? {
        return Err(Error::ConclusionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }

    let n_before = i;
    let n_exp = expansion.steps.len();
    let new_label = |k: usize| format!("({})", k + 1);
    let mut outer: BTreeMap<String, String> = BTreeMap::new();
    for (k, s) in d.steps.iter().enumerate() {
        let pos = match k {
            k if k < i => k,
            k if k == i => n_before + n_exp - 1,
            k => k + n_exp - 1,
        };
        outer.insert(s.label.clone(), new_label(pos));
    }
    let local: BTreeMap<String, String> = expansion
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| (s.label.clone(), new_label(n_before + k)))
        .collect();

    let mut steps = Vec::with_capacity(d.steps.len() + n_exp - 1);
    for (k, s) in d.steps.iter().enumerate() {
        if k == i {
            for e in &expansion.steps {
                let mut e = e.clone();
                e.label = local[&e.label].clone();
                rename_refs(&mut e.just, |r| {
                    local
                        .get(r)
                        .or_else(|| outer.get(r))
                        .cloned()
                        .unwrap_or_else(|| r.to_string())
                });
                steps.push(e);
            }
            continue;
        }
        let mut s = s.clone();
        s.label = outer[&s.label].clone();
        rename_refs(&mut s.just, |r| outer.get(r).cloned().unwrap_or_else(|| r.to_string()));
        steps.push(s);
    }
    let mut opaque = d.opaque.clone();
    for o in &expansion.opaque {
        if !opaque.contains(o) {
            opaque.push(o.clone());
        }
    }
    let mut collapsed = d.collapsed.clone();
    collapsed.push(Collapsed {
        label,
        span: (n_before..n_before + n_exp).map(new_label).collect(),
        original: Box::new(Derivation {
            collapsed: Vec::new(),
            ..d.clone()
        }),
    });
    let out = Derivation {
        title: d.title.clone(),
        steps,
        columns: d.columns,
        opaque,
        collapsed,
    };
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn highlight_pairs() {
        assert!(diff_highlight(&p("a = b"), &p("a = b")).is_empty());
        assert_eq!(diff_highlight(&p("x + y"), &p("x + z")), vec![(vec![2], vec![2])]);
        assert_eq!(diff_highlight(&p("x + y"), &p("x * y")), vec![(vec![], vec![])]);
        assert_eq!(diff_highlight(&p("f(x)"), &p("g(x)")), vec![(vec![0], vec![0])]);
    }
}
