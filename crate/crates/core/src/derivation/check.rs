//! Step checking for every justification kind.

use std::collections::BTreeMap;

use serde::Serialize;

use super::expand::{diff_highlight, HighlightPair};
use super::{Derivation, Justification};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::paths::{self, Path};
use crate::render::{justification_text, AsciiStyle};
use crate::rules::{find_rule, instantiate_rule, solve_for};
use crate::simplify::{canon, difference, value_equal_with, Definitions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    Verified,
    /// Accepted without a machine check (algebra the checker could not reproduce).
    Soft,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepVerdict {
    pub label: String,
    pub status: StepStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Rule name and particular case, e.g. `[RPot] [n := 3]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    /// What the rule becomes in this particular case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<Expr>,
    /// Changed regions between the effective left side and the right side.
    pub highlight: Vec<HighlightPair>,
}

impl StepVerdict {
    fn new(label: &str, status: StepStatus) -> Self {
        StepVerdict {
            label: label.to_string(),
            status,
            note: None,
            rule: None,
            instance: None,
            highlight: Vec::new(),
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self, strict: bool) -> bool {
        match self.status {
            StepStatus::Verified => true,
            StepStatus::Soft => !strict,
            StepStatus::Failed => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub title: String,
    pub steps: Vec<StepVerdict>,
    /// No step failed (soft passes count as passes).
    pub verified: bool,
    pub soft: usize,
    pub conclusion: Option<Expr>,
}

impl Report {
    pub fn passed(&self, strict: bool) -> bool {
        self.steps.iter().all(|s| s.passed(strict))
    }

    pub fn failed_labels(&self) -> Vec<&str> {
        self.steps
            .iter()
            .filter(|s| s.status == StepStatus::Failed)
            .map(|s| s.label.as_str())
            .collect()
    }
}

struct Ctx<'a> {
    d: &'a Derivation,
    defs: Definitions,
}

impl Ctx<'_> {
    fn canon(&self, e: &Expr) -> Result<Expr> {
        canon(e, &self.defs)
    }

    fn same(&self, a: &Expr, b: &Expr) -> bool {
        match (self.canon(a), self.canon(b)) {
            (Ok(x), Ok(y)) if x == y => return true,
            _ => {}
        }
        value_equal_with(a, b, &self.defs).unwrap_or(false)
    }

    fn reference(&self, label: &str, before: usize) -> Result<(Expr, Expr)> {
        let k = self
            .d
            .index_of(label)
            .filter(|&k| k < before)
            .ok_or_else(|| Error::DanglingReference(label.to_string()))?;
        Ok((self.d.effective_lhs(k)?, self.d.steps[k].rhs.clone()))
    }

    /// Does replacing occurrences of `from` in `lhs` by `to` give `rhs`, up to canonical form?
    fn rewrites(&self, lhs: &Expr, from: &Expr, to: &Expr, rhs: &Expr) -> Result<bool> {
        let target = self.canon(rhs)?;
        let from_c = self.canon(from)?;
        let to_c = self.canon(to)?;
        let bases = [crate::simplify::strip_lazy(lhs), self.canon(lhs)?];
        for base in &bases {
            let hits: Vec<Path> = positions(base, &from_c, from);
            for p in &hits {
                let replaced = paths::replace_at(base, p, to_c.clone())?;
                if self.canon(&replaced).ok().as_ref() == Some(&target) {
                    return Ok(true);
                }
            }
            if hits.len() > 1 {
                let mut all = base.clone();
                for p in &hits {
                    all = paths::replace_at(&all, p, to_c.clone())?;
                }
                if self.canon(&all).ok().as_ref() == Some(&target) {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn rewrites_either(&self, lhs: &Expr, eq: &(Expr, Expr), rhs: &Expr) -> Result<bool> {
        Ok(self.rewrites(lhs, &eq.0, &eq.1, rhs)? || self.rewrites(lhs, &eq.1, &eq.0, rhs)?)
    }

    /// Symmetric-transitive closure of `eqs` connects `a` and `b`.
    fn chained(&self, eqs: &[(Expr, Expr)], a: &Expr, b: &Expr) -> Result<bool> {
        let mut uf = UnionFind::default();
        for (l, r) in eqs {
            let (l, r) = (self.canon(l)?, self.canon(r)?);
            uf.union(l, r);
        }
        let (a, b) = (self.canon(a)?, self.canon(b)?);
        Ok(a == b || uf.find(a) == uf.find(b))
    }

    /// Solving or scaling one equality gives the step.
    fn algebra_from(&self, eq: &(Expr, Expr), lhs: &Expr, rhs: &Expr) -> Result<bool> {
        let whole = Expr::eq(eq.0.clone(), eq.1.clone());
        if let Ok(sol) = solve_for(&whole, lhs, &self.defs) {
            if self.same(&sol, rhs) {
                return Ok(true);
            }
        }
        if let Ok(sol) = solve_for(&whole, rhs, &self.defs) {
            if self.same(&sol, lhs) {
                return Ok(true);
            }
        }
        // lhs - rhs is a nonzero constant multiple of the referenced residual
        if let (Ok(a), Ok(b)) = (
            difference(lhs, rhs, &self.defs),
            difference(&eq.0, &eq.1, &self.defs),
        ) {
            if !b.is_zero() {
                let ratio = crate::simplify::simplify_with(
                    &Expr::op("*", vec![a, Expr::op("^", vec![b, Expr::int(-1)])]),
                    &Default::default(),
                    &self.defs,
                );
                if matches!(ratio, Ok(Expr::Num(ref n)) if !num::Zero::is_zero(n)) {
                    return Ok(true);
                }
            }
        }
        self.rewrites_either(lhs, eq, rhs)
    }
}

/// Paths in `e` whose subterm equals `c` or `raw` (application heads are not searched).
fn positions(e: &Expr, c: &Expr, raw: &Expr) -> Vec<Path> {
    fn go(e: &Expr, c: &Expr, raw: &Expr, path: &mut Path, out: &mut Vec<Path>) {
        if e == c || e == raw {
            out.push(path.clone());
            return;
        }
        for (i, ch) in e.children().iter().enumerate() {
            path.push(i + 1);
            go(ch, c, raw, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(e, c, raw, &mut Vec::new(), &mut out);
    out
}

#[derive(Default)]
struct UnionFind {
    parent: BTreeMap<Expr, Expr>,
}

impl UnionFind {
    fn find(&mut self, x: Expr) -> Expr {
        let mut cur = x;
        while let Some(p) = self.parent.get(&cur) {
            if *p == cur {
                break;
            }
            cur = p.clone();
        }
        cur
    }

    fn union(&mut self, a: Expr, b: Expr) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent.insert(ra, rb);
        }
    }
}

/// Verdict for step `i`; errors are unknown rules, dangling references and malformed steps.
pub fn check_step(d: &Derivation, i: usize) -> Result<StepVerdict> {
    let step = d
        .steps
        .get(i)
        .ok_or_else(|| Error::MalformedStep(format!("no step at index {i}")))?;
    let ctx = Ctx {
        d,
        defs: d.definitions(),
    };
    let lhs = d.effective_lhs(i)?;
    let rhs = &step.rhs;
    let refs: Vec<(Expr, Expr)> = step
        .just
        .refs()
        .iter()
        .map(|r| ctx.reference(r, i))
        .collect::<Result<_>>()?;
    let ok = |b: bool| if b { StepStatus::Verified } else { StepStatus::Failed };
    let mut v = match &step.just {
        Justification::Assumption => StepVerdict::new(&step.label, StepStatus::Verified),
        Justification::Simplify => {
            let v = StepVerdict::new(&step.label, ok(ctx.same(&lhs, rhs)));
            if v.status == StepStatus::Failed {
                v.note("sides do not simplify to the same value")
            } else {
                v
            }
        }
        Justification::RewriteBy(labels) => {
            let mut found = false;
            for eq in &refs {
                if ctx.rewrites_either(&lhs, eq, rhs)? {
                    found = true;
                    break;
                }
            }
            if !found && refs.len() > 1 {
                found = ctx.chained(&refs, &lhs, rhs)?;
            }
            let v = StepVerdict::new(&step.label, ok(found));
            if found {
                v
            } else {
                v.note(format!("no rewrite by {} turns the left side into the right", labels.join(", ")))
            }
        }
        Justification::Chain(labels) => {
            let found = ctx.chained(&refs, &lhs, rhs)?;
            let v = StepVerdict::new(&step.label, ok(found));
            if found {
                v
            } else {
                v.note(format!("{} do not connect the two sides", labels.join(", ")))
            }
        }
        Justification::Algebra(labels) => {
            let mut status = StepStatus::Soft;
            let mut note = Some("unverified-algebra".to_string());
            for eq in &refs {
                if ctx.algebra_from(eq, &lhs, rhs)? {
                    status = StepStatus::Verified;
                    note = None;
                    break;
                }
            }
            if status == StepStatus::Soft {
                for k in (0..i).rev() {
                    let label = &d.steps[k].label;
                    if labels.contains(label) {
                        continue;
                    }
                    let eq = (d.effective_lhs(k)?, d.steps[k].rhs.clone());
                    if ctx.algebra_from(&eq, &lhs, rhs)? {
                        status = StepStatus::Verified;
                        note = Some(format!(
                            "validated via {label} instead of {}",
                            labels.join(", ")
                        ));
                        break;
                    }
                }
            }
            StepVerdict {
                note,
                ..StepVerdict::new(&step.label, status)
            }
        }
        Justification::RuleInstance { rule, subst } => {
            let r = find_rule(rule)?;
            let inst = instantiate_rule(r, subst)?;
            let (a, b) = inst.as_equation().expect("rule schemas are equations");
            let whole = ctx.canon(&Expr::eq(lhs.clone(), rhs.clone()))?;
            let found = ctx.canon(&inst)? == whole
                || ctx.rewrites(&lhs, a, b, rhs)?
                || ctx.rewrites(&lhs, b, a, rhs)?;
            let mut v = StepVerdict::new(&step.label, ok(found));
            v.rule = Some(justification_text(&step.just, AsciiStyle::Exact));
            v.instance = Some(inst);
            if !found {
                v = v.note(format!("not a particular case of [{rule}]"));
            }
            v
        }
    };
    v.highlight = diff_highlight(&lhs, rhs);
    Ok(v)
}

/// Fold [`check_step`] over the document; errors become failed verdicts.
pub fn check_derivation(d: &Derivation) -> Report {
    let mut steps = Vec::with_capacity(d.steps.len());
    for (i, s) in d.steps.iter().enumerate() {
        let v = check_step(d, i)
            .unwrap_or_else(|e| StepVerdict::new(&s.label, StepStatus::Failed).note(e.to_string()));
        steps.push(v);
    }
    let verified = steps.iter().all(|s| s.status != StepStatus::Failed);
    let soft = steps.iter().filter(|s| s.status == StepStatus::Soft).count();
    Report {
        title: d.title.clone(),
        steps,
        verified,
        soft,
        conclusion: d.conclusion(),
    }
}
