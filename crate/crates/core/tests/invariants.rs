mod support;

use std::collections::BTreeMap;

use mex_core::comprehension::{dedup_in_order, evaluate};
use mex_core::json;
use mex_core::paths::dpart;
use mex_core::render::{expr_to_string, render_ascii, render_json, AnnotationKind, AsciiStyle, RenderableDocument};
use mex_core::rules::{builtin_catalog, instantiate_rule, solve_linear};
use mex_core::simplify::{canon, diff_verb_with, simplify_default, Definitions};
use mex_core::subst::{apply_sequential, apply_subst_raw, Binding, Lhs, Substitution};
use mex_core::{expr_equal, parse, Expr};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use support::checks::{comprehension, lambda_term};
use support::{all_paths, arith_expr};

/// Expressions with applications, lazy operators, quotes, relations and holes.
fn rich_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-20i64..=20).prop_map(Expr::int),
        ((-9i64..=9), (2i64..=5)).prop_map(|(n, d)| Expr::ratio(n, d)),
        prop::sample::select(vec!["x", "y", "a", "b", "t"]).prop_map(Expr::sym),
        Just(Expr::hole()),
    ];
    leaf.prop_recursive(4, 30, 3, |inner| {
        let name = prop::sample::select(vec!["+", "*", "+.", "*.", "^", "^.", "=", "<", ":="]);
        prop_oneof![
            (name, inner.clone(), inner.clone()).prop_map(|(n, a, b)| Expr::op(n, vec![a, b])),
            (prop::sample::select(vec!["f", "g", "sin", "f'"]), prop::collection::vec(inner.clone(), 1..3))
                .prop_map(|(h, args)| Expr::call(h, args)),
            inner.clone().prop_map(|a| Expr::op("neg", vec![a])),
            inner.clone().prop_map(|a| Expr::quote(Expr::call("diff", vec![a, Expr::sym("x")]))),
            prop::collection::vec(inner, 0..3).prop_map(|xs| Expr::op("list", xs)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parse_render_round_trip(e in rich_expr()) {
        let src = expr_to_string(&e, AsciiStyle::Exact);
        let parsed = parse(&src).map_err(|e| TestCaseError::fail(format!("{src}: {e}")))?;
        let again = expr_to_string(&parsed, AsciiStyle::Exact);
        prop_assert_eq!(parse(&again).unwrap(), parsed, "{}", again);
    }

    #[test]
    fn parsed_arithmetic_round_trips(e in arith_expr()) {
        let parsed = parse(&expr_to_string(&e, AsciiStyle::Exact)).unwrap();
        let again = expr_to_string(&parsed, AsciiStyle::Exact);
        prop_assert_eq!(parse(&again).unwrap(), parsed);
    }

    #[test]
    fn json_round_trip(e in rich_expr(), t in lambda_term()) {
        prop_assert_eq!(json::from_value(&json::to_value(&e)).unwrap(), e.clone());
        prop_assert_eq!(json::from_str(&json::to_string(&t)).unwrap(), t);
        let doc = RenderableDocument::expr(e.clone());
        prop_assert_eq!(json::from_value(&render_json(&doc)).unwrap(), e);
    }

    #[test]
    fn equality_is_an_equivalence(a in rich_expr(), b in rich_expr(), c in rich_expr()) {
        prop_assert!(expr_equal(&a, &a));
        prop_assert_eq!(expr_equal(&a, &b), expr_equal(&b, &a));
        if expr_equal(&a, &b) && expr_equal(&b, &c) {
            prop_assert!(expr_equal(&a, &c));
        }
        let copy = a.clone();
        prop_assert!(expr_equal(&a, &copy));
    }

    #[test]
    fn lambda_binds_its_parameter(body in rich_expr(), v in prop::sample::select(vec!["x", "y", "a"])) {
        let mut expected = body.free_variables();
        expected.remove(v);
        prop_assert_eq!(Expr::lambda(vec![v.into()], body).free_variables(), expected);
    }

    #[test]
    fn annotations_leave_the_tree_alone(e in rich_expr(), k in any::<prop::sample::Index>()) {
        let paths: Vec<Vec<usize>> = all_paths(&e).into_iter().filter(|p| p.last() != Some(&0)).collect();
        let path = k.get(&paths).clone();
        let plain = RenderableDocument::expr(e.clone());
        let marked = dpart(&e, &path).unwrap();
        prop_assert_eq!(render_json(&plain), render_json(&RenderableDocument { annotations: vec![], ..marked.clone() }));
        prop_assert_eq!(&marked.base, &plain.base);
        let hl = plain.clone().with_annotation(path, AnnotationKind::Highlight).unwrap();
        prop_assert_eq!(&hl.base, &plain.base);
        let _ = render_ascii(&hl);
    }

    #[test]
    fn disjoint_bindings_apply_in_parallel_or_in_turn(
        e in arith_expr(),
        rx in arith_expr(),
        ry in arith_expr(),
    ) {
        // rhs may mention x and y only through fresh names, so no lhs head occurs in a rhs
        let rename = |r: &Expr| {
            let mut m = BTreeMap::new();
            m.insert("x".to_string(), Expr::sym("u"));
            m.insert("y".to_string(), Expr::sym("v"));
            mex_core::subst::subst_vars(r, &m)
        };
        let s = Substitution::new(vec![
            Binding::new(Lhs::Sym("x".into()), rename(&rx)),
            Binding::new(Lhs::Sym("y".into()), rename(&ry)),
        ]).unwrap();
        let par = apply_subst_raw(&e, &s, 100).unwrap().output;
        let seq = apply_sequential(&e, &s).unwrap();
        prop_assert_eq!(par, seq);
        prop_assert_eq!(apply_subst_raw(&e, &Substitution::empty(), 100).unwrap().output, e);
    }

    #[test]
    fn solutions_satisfy_their_systems(
        m in prop::collection::vec(-5i64..=5, 4),
        rhs in prop::collection::vec(-9i64..=9, 2),
    ) {
        let eq = |a: i64, b: i64, c: i64| {
            Expr::eq(
                Expr::op("+", vec![
                    Expr::op("*", vec![Expr::int(a), Expr::sym("a")]),
                    Expr::op("*", vec![Expr::int(b), Expr::sym("b")]),
                ]),
                Expr::int(c),
            )
        };
        let eqs = vec![eq(m[0], m[1], rhs[0]), eq(m[2], m[3], rhs[1])];
        let det = m[0] * m[3] - m[1] * m[2];
        match solve_linear(&eqs, &["a", "b"]) {
            Ok(s) => {
                prop_assert!(det != 0);
                for e in &eqs {
                    let back = apply_subst_raw(e, &s, 100).unwrap().output;
                    let (l, r) = back.as_equation().unwrap();
                    let diff = simplify_default(&Expr::op("-", vec![l.clone(), r.clone()])).unwrap();
                    prop_assert!(diff.is_zero(), "{}", diff);
                }
            }
            Err(_) => prop_assert_eq!(det, 0),
        }
    }

    #[test]
    fn primes_follow_the_chain_rule(u in arith_expr()) {
        prop_assume!(u.contains_sym("x"));
        let defs = Definitions::with_opaque(["f"]);
        let d = diff_verb_with(&Expr::call("f", vec![u.clone()]), "x", &defs);
        prop_assume!(d.is_ok());
        let du = diff_verb_with(&u, "x", &defs).unwrap();
        let expected = Expr::op("*", vec![Expr::call("f'", vec![u]), du]);
        prop_assert_eq!(canon(&d.unwrap(), &defs).unwrap(), canon(&expected, &defs).unwrap());
    }

    #[test]
    fn values_are_deduplicated_leaves(c in comprehension()) {
        let ev = evaluate(&c).unwrap();
        let leaves: Vec<Expr> = ev.tree.root.leaf_results().into_iter().cloned().collect();
        prop_assert_eq!(dedup_in_order(&leaves), ev.values.clone());
        prop_assert_eq!(leaves, ev.raw);
    }
}

#[test]
fn empty_instantiation_is_the_schema() {
    for r in builtin_catalog() {
        assert_eq!(instantiate_rule(r, &Substitution::empty()).unwrap(), r.schema);
    }
}

#[test]
fn precedence() {
    assert_eq!(parse("2+3*4").unwrap(), Expr::op("+", vec![Expr::int(2), Expr::op("*", vec![Expr::int(3), Expr::int(4)])]));
    assert_eq!(parse("2^3^2").unwrap(), Expr::op("^", vec![Expr::int(2), Expr::op("^", vec![Expr::int(3), Expr::int(2)])]));
}
