//! Path addressing (`part`, `dpart`, `substpart`) and hole-based exercises.
//!
//! A path is a list of child indices: `k >= 1` selects the k-th argument of an `Op`/`App`
//! (or the body of a lambda / quote with `k = 1`); `0` selects the operator or head.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::registry::OperatorRegistry;
use crate::render::{AnnotationKind, RenderableDocument};
use crate::simplify;

pub type Path = Vec<usize>;

/// `1.2.2.1.2`
pub fn format_path(p: &[usize]) -> String {
    p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
}

/// Parse `1.2.2.1.2` (also accepts `1,2,2` and `[1,2,2]`). The empty string is the root.
pub fn parse_path(s: &str) -> Result<Path> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']').trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(['.', ','])
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidPath {
                    step: 0,
                    message: format!("`{t}` is not a child index"),
                })
        })
        .collect()
}

/// Comma-separated list of dotted paths: `1.2.2,2.2.2`.
pub fn parse_path_list(s: &str) -> Result<Vec<Path>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_path).collect()
}

fn head_of(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Op(name, _) => Some(Expr::Sym(name.clone())),
        Expr::App(head, _) => Some((**head).clone()),
        _ => None,
    }
}

fn child(e: &Expr, k: usize, step: usize) -> Result<Expr> {
    if k == 0 {
        return head_of(e).ok_or_else(|| Error::InvalidPath {
            step,
            message: format!("`{e}` has no operator to address with 0"),
        });
    }
    e.children()
        .get(k - 1)
        .cloned()
        .ok_or_else(|| Error::InvalidPath {
            step,
            message: format!("`{e}` has {} children, no child {k}", e.children().len()),
        })
}

/// The subterm at `p`.
pub fn part(e: &Expr, p: &[usize]) -> Result<Expr> {
    let mut cur = e.clone();
    for (step, &k) in p.iter().enumerate() {
        cur = child(&cur, k, step + 1)?;
    }
    Ok(cur)
}

fn replace_head(e: &Expr, repl: Expr, registry: &OperatorRegistry) -> Expr {
    let args = e.children().to_vec();
    match &repl {
        Expr::Sym(name) if registry.contains(name) => Expr::Op(name.clone(), args),
        _ => Expr::app(repl, args),
    }
}

fn replace_rec(e: &Expr, p: &[usize], repl: Expr, depth: usize) -> Result<Expr> {
    let Some((&k, rest)) = p.split_first() else {
        return Ok(repl);
    };
    let step = depth + 1;
    if k == 0 {
        let head = child(e, 0, step)?;
        if rest.is_empty() {
            return Ok(replace_head(e, repl, OperatorRegistry::shared()));
        }
        let new_head = replace_rec(&head, rest, repl, step)?;
        return Ok(match e {
            Expr::App(_, args) => Expr::App(Box::new(new_head), args.clone()),
            _ => replace_head(e, new_head, OperatorRegistry::shared()),
        });
    }
    let c = child(e, k, step)?;
    let new_child = replace_rec(&c, rest, repl, step)?;
    let mut children = e.children().to_vec();
    children[k - 1] = new_child;
    Ok(e.with_children(children))
}

/// Copy of `e` with the subterm at `p` replaced by `repl`. Nothing is simplified.
pub fn replace_at(e: &Expr, p: &[usize], repl: Expr) -> Result<Expr> {
    replace_rec(e, p, repl, 0)
}

/// `substpart(repl, e, p)`.
pub fn substpart(repl: Expr, e: &Expr, p: &[usize]) -> Result<Expr> {
    replace_at(e, p, repl)
}

/// A document showing `e` with a box around the subterm at `p`.
pub fn dpart(e: &Expr, p: &[usize]) -> Result<RenderableDocument> {
    RenderableDocument::expr(e.clone()).with_annotation(p.to_vec(), AnnotationKind::Box)
}

/// `e` with the subterm at `p` wrapped in a `box` node (the REPL value of `dpart`).
pub fn boxed(e: &Expr, p: &[usize]) -> Result<Expr> {
    let sub = part(e, p)?;
    replace_at(e, p, Expr::op("box", vec![sub]))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleSpec {
    pub label: u32,
    pub path: Path,
}

/// A true expression with some subterms replaced by labeled holes.
#[derive(Clone, Debug, PartialEq)]
pub struct Exercise {
    pub statement: Expr,
    pub holes: Vec<HoleSpec>,
    pub source: Expr,
}

fn is_prefix(a: &[usize], b: &[usize]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

/// Replace each listed subterm by a hole labeled 1..n in list order.
pub fn mkholes(e: &Expr, paths: &[Path]) -> Result<Exercise> {
    for (i, a) in paths.iter().enumerate() {
        for b in &paths[i + 1..] {
            if is_prefix(a, b) || is_prefix(b, a) {
                return Err(Error::OverlappingPaths(format_path(a), format_path(b)));
            }
        }
    }
    let mut statement = e.clone();
    let mut holes = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        part(e, p)?;
        let label = i as u32 + 1;
        statement = replace_at(&statement, p, Expr::Hole(Some(label)))?;
        holes.push(HoleSpec {
            label,
            path: p.clone(),
        });
    }
    Ok(Exercise {
        statement,
        holes,
        source: e.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleVerdict {
    pub label: u32,
    pub correct: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleReport {
    #[serde(rename = "perHole")]
    pub per_hole: Vec<HoleVerdict>,
    #[serde(rename = "allCorrect")]
    pub all_correct: bool,
    /// The filled-in statement is a true instance of the source.
    #[serde(rename = "instanceTrue")]
    pub instance_true: bool,
}

impl Exercise {
    /// Hidden answers, recovered from the source.
    pub fn answers(&self) -> Result<BTreeMap<u32, Expr>> {
        self.holes
            .iter()
            .map(|h| Ok((h.label, part(&self.source, &h.path)?)))
            .collect()
    }

    /// Statement with each hole filled from `values` (by label).
    pub fn fill(&self, values: &BTreeMap<u32, Expr>) -> Result<Expr> {
        let mut out = self.statement.clone();
        for h in &self.holes {
            let v = values.get(&h.label).ok_or(Error::MissingHole(h.label))?;
            out = replace_at(&out, &h.path, v.clone())?;
        }
        Ok(out)
    }

    pub fn check(&self, proposed: &BTreeMap<u32, Expr>) -> Result<HoleReport> {
        check_holes(self, proposed)
    }

    /// Full JSON: statement, holes and source.
    pub fn to_json(&self) -> Value {
        json!({
            "statement": crate::json::to_value(&self.statement),
            "holes": serde_json::to_value(&self.holes).expect("holes serialize"),
            "source": crate::json::to_value(&self.source),
        })
    }

    /// JSON without the source, safe to hand to students.
    pub fn student_view(&self) -> Value {
        json!({
            "statement": crate::json::to_value(&self.statement),
            "holes": serde_json::to_value(&self.holes).expect("holes serialize"),
        })
    }

    pub fn from_json(v: &Value) -> Result<Exercise> {
        let get = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::Json(format!("exercise is missing `{k}`")))
        };
        let statement = crate::json::from_value(get("statement")?)?;
        let source = crate::json::from_value(get("source")?)?;
        let holes: Vec<HoleSpec> = serde_json::from_value(get("holes")?.clone())
            .map_err(|e| Error::Json(e.to_string()))?;
        let x = Exercise {
            statement,
            holes,
            source,
        };
        for h in &x.holes {
            if part(&x.statement, &h.path)? != Expr::Hole(Some(h.label)) {
                return Err(Error::Json(format!(
                    "hole {} is not at {}",
                    h.label,
                    format_path(&h.path)
                )));
            }
        }
        Ok(x)
    }
}

/// Value equality, falling back to canonical equality when a value cannot be computed
/// (e.g. a derivative of an undeclared function).
fn same_value(a: &Expr, b: &Expr) -> bool {
    let defs = simplify::Definitions::new();
    match simplify::value_equal(a, b) {
        Ok(true) => true,
        Ok(false) => false,
        Err(_) => matches!(
            (simplify::canon(a, &defs), simplify::canon(b, &defs)),
            (Ok(x), Ok(y)) if x == y
        ),
    }
}

/// Per-hole verdicts (canonical equality with the recorded answer) plus a global verdict.
pub fn check_holes(x: &Exercise, proposed: &BTreeMap<u32, Expr>) -> Result<HoleReport> {
    let answers = x.answers()?;
    let mut per_hole = Vec::new();
    for h in &x.holes {
        let p = proposed.get(&h.label).ok_or(Error::MissingHole(h.label))?;
        let correct = same_value(p, &answers[&h.label]);
        per_hole.push(HoleVerdict {
            label: h.label,
            correct,
        });
    }
    let all_correct = per_hole.iter().all(|v| v.correct);
    let filled = x.fill(proposed)?;
    let instance_true = same_value(&filled, &x.source);
    Ok(HoleReport {
        per_hole,
        all_correct,
        instance_true,
    })
}

/// `check_holes` keyed by path instead of label.
pub fn check_holes_by_path(x: &Exercise, proposed: &BTreeMap<Path, Expr>) -> Result<HoleReport> {
    let by_label = x
        .holes
        .iter()
        .filter_map(|h| proposed.get(&h.path).map(|e| (h.label, e.clone())))
        .collect();
    check_holes(x, &by_label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn part_examples() {
        let o = p("2 +. 3 +. 4 = 2 +. 7");
        assert_eq!(part(&o, &[2, 1]).unwrap(), Expr::int(2));
        assert_eq!(part(&o, &[]).unwrap(), o);
        assert_eq!(part(&p("f(g(x))"), &[1]).unwrap(), p("g(x)"));
        let err = part(&o, &[2, 5]).unwrap_err();
        assert!(matches!(err, Error::InvalidPath { step: 2, .. }));
    }

    #[test]
    fn substpart_examples() {
        let o = p("2 +. 3 +. 4 = 2 +. 7");
        let q = substpart(Expr::hole(), &o, &[2, 1]).unwrap();
        assert_eq!(q, p("2 +. 3 +. 4 = ? +. 7"));
        assert_eq!(substpart(p("x"), &o, &[]).unwrap(), p("x"));
    }

    #[test]
    fn head_paths() {
        let e = p("a + b");
        assert_eq!(part(&e, &[0]).unwrap(), Expr::sym("+"));
        let star = Expr::sym("*");
        assert_eq!(substpart(star, &e, &[0]).unwrap(), p("a*b"));
        assert_eq!(substpart(p("h"), &p("f(x)"), &[0]).unwrap(), p("h(x)"));
    }

    #[test]
    fn overlapping_paths_rejected() {
        let e = p("f(g(x))");
        assert!(matches!(
            mkholes(&e, &[vec![1], vec![1]]),
            Err(Error::OverlappingPaths(..))
        ));
        assert!(mkholes(&e, &[vec![1], vec![1, 1]]).is_err());
        let x = mkholes(&e, &[]).unwrap();
        assert_eq!(x.statement, e);
    }

    #[test]
    fn path_syntax() {
        assert_eq!(parse_path("1.2.2.1.2").unwrap(), vec![1, 2, 2, 1, 2]);
        assert_eq!(parse_path("").unwrap(), Vec::<usize>::new());
        assert_eq!(parse_path_list("1.2,2.2.2").unwrap(), vec![vec![1, 2], vec![2, 2, 2]]);
        assert!(parse_path("1.x").is_err());
    }
}
