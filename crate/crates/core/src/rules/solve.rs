//! Linear systems by exact Gaussian elimination (`solve`).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::simplify::{self, diff_verb_with, Definitions, SimplifyOptions};
use crate::subst::{fresh_name, subst_vars, Binding, Lhs, Substitution};

fn simp(e: Expr, defs: &Definitions) -> Result<Expr> {
    simplify::simplify_with(&e, &SimplifyOptions::default(), defs)
}

fn sub(a: &Expr, b: &Expr) -> Expr {
    Expr::op("+", vec![a.clone(), Expr::op("*", vec![Expr::int(-1), b.clone()])])
}

fn mul(a: &Expr, b: &Expr) -> Expr {
    Expr::op("*", vec![a.clone(), b.clone()])
}

fn div(a: &Expr, b: &Expr) -> Expr {
    Expr::op("*", vec![a.clone(), Expr::op("^", vec![b.clone(), Expr::int(-1)])])
}

/// Replace every occurrence of `target` in `e` by `by`.
fn replace_subterm(e: &Expr, target: &Expr, by: &Expr) -> Expr {
    if e == target {
        return by.clone();
    }
    match e {
        Expr::App(head, args) => Expr::App(
            Box::new(replace_subterm(head, target, by)),
            args.iter().map(|a| replace_subterm(a, target, by)).collect(),
        ),
        other => other.map_subexprs(|c| replace_subterm(c, target, by)),
    }
}

/// Solve equalities for names.
pub fn solve_linear(eqs: &[Expr], unknowns: &[&str]) -> Result<Substitution> {
    let u: Vec<Expr> = unknowns.iter().map(|n| Expr::sym(*n)).collect();
    solve_linear_with(eqs, &u, &Definitions::new())
}

/// Solve equalities affine in `unknowns`; an unknown may be any subterm such as `g'(x)`.
pub fn solve_linear_with(
    eqs: &[Expr],
    unknowns: &[Expr],
    defs: &Definitions,
) -> Result<Substitution> {
    if eqs.len() != unknowns.len() {
        return Err(Error::Solve(format!(
            "{} equations for {} unknowns",
            eqs.len(),
            unknowns.len()
        )));
    }
    let mut avoid = std::collections::BTreeSet::new();
    for e in eqs.iter().chain(unknowns) {
        avoid.extend(e.all_symbols());
    }
    let mut vars = Vec::new();
    for u in unknowns {
        let name = match u {
            Expr::Sym(s) => s.clone(),
            _ => {
                let f = fresh_name("u", &avoid);
                avoid.insert(f.clone());
                f
            }
        };
        vars.push(name);
    }
    let mut rows: Vec<Vec<Expr>> = Vec::new();
    for eq in eqs {
        let (l, r) = eq
            .as_equation()
            .ok_or_else(|| Error::wrong_shape("an equation", eq))?;
        let mut d = simplify::strip_lazy(&sub(l, r));
        for (u, v) in unknowns.iter().zip(&vars) {
            if !matches!(u, Expr::Sym(_)) {
                d = replace_subterm(&d, u, &Expr::sym(v.clone()));
            }
        }
        let d = simp(d, defs)?;
        let mut row = Vec::new();
        for v in &vars {
            let c = diff_verb_with(&d, v, defs).map_err(|_| Error::Nonlinear(eq.to_string()))?;
            if vars.iter().any(|w| c.contains_sym(w)) {
                return Err(Error::Nonlinear(eq.to_string()));
            }
            row.push(c);
        }
        let zeros: BTreeMap<String, Expr> =
            vars.iter().map(|v| (v.clone(), Expr::zero())).collect();
        let c0 = simp(subst_vars(&d, &zeros), defs)?;
        row.push(simp(Expr::op("*", vec![Expr::int(-1), c0]), defs)?);
        rows.push(row);
    }
    let n = vars.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !rows[r][col].is_zero())
            .ok_or(Error::Singular)?;
        rows.swap(col, pivot);
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = simp(div(&rows[r][col], &rows[col][col]), defs)?;
            for k in col..=n {
                let v = simp(sub(&rows[r][k], &mul(&factor, &rows[col][k])), defs)?;
                rows[r][k] = v;
            }
        }
    }
    let mut solution = vec![Expr::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rows[i][n].clone();
        for k in i + 1..n {
            acc = sub(&acc, &mul(&rows[i][k], &solution[k]));
        }
        solution[i] = simp(div(&acc, &rows[i][i]), defs)?;
    }
    let bindings = unknowns
        .iter()
        .zip(solution)
        .map(|(u, v)| Ok(Binding::new(Lhs::from_expr(u)?, v)))
        .collect::<Result<Vec<_>>>()?;
    Substitution::new(bindings)
}

/// Solve one equality for the subterm `unknown`, e.g. `g'(x)` in `f'(g(x)) * g'(x) = 1`.
pub fn solve_for(eq: &Expr, unknown: &Expr, defs: &Definitions) -> Result<Expr> {
    if paths_contains(eq, unknown) {
        let s = solve_linear_with(std::slice::from_ref(eq), std::slice::from_ref(unknown), defs)?;
        return Ok(s.bindings[0].rhs.clone());
    }
    Err(Error::Solve(format!("`{unknown}` does not occur in `{eq}`")))
}

fn paths_contains(e: &Expr, target: &Expr) -> bool {
    let mut found = false;
    e.visit(&mut |n| found |= n == target);
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn two_by_two() {
        let s = solve_linear(&[p("b + a = 2"), p("b + 3*a = -4")], &["a", "b"]).unwrap();
        assert_eq!(s.to_list_expr(), p("[a := -3, b := 5]"));
        let s = solve_linear(&[p("x = 0")], &["x"]).unwrap();
        assert_eq!(s.bindings[0].rhs, Expr::zero());
    }

    #[test]
    fn singular_and_nonlinear() {
        assert!(matches!(
            solve_linear(&[p("a + b = 1"), p("2*a + 2*b = 2")], &["a", "b"]),
            Err(Error::Singular)
        ));
        assert!(matches!(
            solve_linear(&[p("a^2 = 1")], &["a"]),
            Err(Error::Nonlinear(_))
        ));
    }

    #[test]
    fn symbolic_coefficients_and_subterm_unknowns() {
        let defs = Definitions::new();
        let v = solve_for(&p("f'(g(x)) * g'(x) = 1"), &p("g'(x)"), &defs).unwrap();
        assert_eq!(v, simplify::simplify_default(&p("1/f'(g(x))")).unwrap());
        let s = solve_linear(&[p("k*y = 3")], &["y"]).unwrap();
        assert_eq!(s.bindings[0].rhs, simplify::simplify_default(&p("3/k")).unwrap());
    }
}
