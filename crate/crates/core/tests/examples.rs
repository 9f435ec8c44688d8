mod support;

use mex_core::comprehension::{
    emit_loops, evaluate, evaluate_expr, graph_comprehension, graph_expr, normalize, Clause,
};
use mex_core::paths::{check_holes, dpart, mkholes, part, substpart};
use mex_core::registry::{OperatorDef, OperatorRegistry};
use mex_core::render::{
    expr_to_string, render_ascii, render_latex, render_tree, AsciiStyle, RenderableDocument,
    TreeDirection,
};
use mex_core::rules::{builtin_catalog, find_rule, instantiate_rule, solve_linear};
use mex_core::session::Session;
use mex_core::simplify::{delazify, diff_verb, simplify_default};
use mex_core::subst::{
    apply_sequential, apply_subst, apply_subst_raw, parse_bindings, render_subst_forms,
    SubstForm,
};
use mex_core::{expr_equal, free_variables, parser::parse_with, Error, Expr};
use rand::{Rng, SeedableRng};
use support::{env_f, eval_f64, p};

fn simp(src: &str) -> Expr {
    simplify_default(&p(src)).unwrap()
}

fn show(e: &Expr) -> String {
    expr_to_string(e, AsciiStyle::Display)
}

#[test]
fn registry_and_parsing() {
    let mut r = OperatorRegistry::builtin();
    r.register(OperatorDef::infix("_s_", 25)).unwrap();
    let e = parse_with("(a+b) _s_ [a:=42]", &r).unwrap();
    assert!(e.as_op("_s_").is_some());
    assert_eq!(p("a +. b"), Expr::op("+.", vec![p("a"), p("b")]));
    assert_eq!(
        p("lambda([x], g(g(x)))"),
        Expr::lambda(vec!["x".into()], p("g(g(x))"))
    );
    assert!(p("{10*a | a in {2,3,4}}").as_op("compre").is_some());
}

#[test]
fn structural_equality_and_free_variables() {
    assert!(expr_equal(&p("2+3"), &p("2+3")));
    assert!(!expr_equal(&p("a+b"), &p("a+.b")));
    assert_eq!(Expr::ratio(4, 2), Expr::int(2));
    let fv: Vec<String> = free_variables(&p("lambda([x], g(g(x)))")).into_iter().collect();
    assert_eq!(fv, vec!["g"]);
    assert!(free_variables(&p("lambda([x], x)")).is_empty());
}

#[test]
fn simplifier_examples() {
    assert_eq!(simp("2+3+4*x+5*x"), p("9*x + 5"));
    assert_eq!(simp("2 +. 3"), p("2 +. 3"));
    assert_eq!(simp("5 - 3*x"), simp("-3*x + 5"));
    assert_eq!(simp("0*x + 1*y"), p("y"));
    assert_eq!(simplify_default(&delazify(&p("2 +. 3"))).unwrap(), p("5"));
    assert_eq!(simplify_default(&delazify(&p("'diff(x^2, x)"))).unwrap(), p("2*x"));
    assert_eq!(simp("'diff(x^2, x)"), p("'diff(x^2, x)"));
}

#[test]
fn derivative_examples() {
    assert_eq!(diff_verb(&p("x^2"), "x").unwrap(), p("2*x"));
    assert_eq!(diff_verb(&p("(6*x^3)*(7*x^4)"), "x").unwrap(), p("294*x^6"));
    let e = p("sin(cos(tan(42*x)))");
    let d = diff_verb(&e, "x").unwrap();
    // the third derivative reaches 8.6e6 here, so a plain central difference at
    // h = 1e-5 is off by 1.4e-4; one Richardson step removes the h^2 term
    for x in [0.1, 0.2, 0.3] {
        let d1 = support::central_difference(&e, "x", x, 1e-5).unwrap();
        let d2 = support::central_difference(&e, "x", x, 2e-5).unwrap();
        let fd = (4.0 * d1 - d2) / 3.0;
        let sym = eval_f64(&d, &env_f(&[("x", x)])).unwrap();
        assert!((fd - sym).abs() < 1e-6, "{x}: {fd} vs {sym}");
    }
    let noun = diff_verb(&Expr::quote(p("x^2")), "x").unwrap();
    assert_eq!(noun, p("'diff(x^2, x)"));
    assert_eq!(show(&noun), "d/dx(x^2)");
}

#[test]
fn substitution_examples() {
    let s1 = parse_bindings("[f(x) := g(g(x)), g(x) := f(f(x))]").unwrap();
    assert_eq!(apply_subst(&p("f(g(t))"), &s1, 1000).unwrap().output, p("g(g(f(f(t))))"));
    assert_eq!(apply_sequential(&p("f(g(t))"), &s1).unwrap(), p("f(f(f(t)))"));
    let ab = parse_bindings("[a := 2, b := 3]").unwrap();
    let lazy = apply_subst(&p("a +. b = b +. a"), &ab, 1000).unwrap().output;
    assert_eq!(lazy, p("2 +. 3 = 3 +. 2"));
    assert_eq!(show(&lazy), "2 + 3 = 3 + 2");
    let a42 = parse_bindings("[a := 42]").unwrap();
    assert_eq!(apply_subst_raw(&p("a+b"), &a42, 1000).unwrap().output, p("42+b"));
    assert_eq!(show(&apply_subst(&p("a+b"), &a42, 1000).unwrap().output), "b + 42");
    let swap = parse_bindings("[a := b, b := a]").unwrap();
    assert_eq!(apply_sequential(&p("a+b"), &swap).unwrap(), p("a+a"));
    assert_eq!(apply_subst_raw(&p("a+b"), &swap, 10).unwrap().output, p("b+a"));
}

#[test]
fn chain_rule_column_under_substitution() {
    let mut s = Session::new();
    s.run_line("S : [f(x)=x^3, f'(x)=3*x^2, g(x)=log(x)+x^2, g'(x)=1/x+2*x]$").unwrap();
    let v = s.run_line("RCV _s_ S;").unwrap().value;
    let text = show(&v);
    assert!(text.contains("d/dx((x^2 + log(x))^3)"), "{text}");
    assert!(text.contains("3*(2*x + 1/x)*(x^2 + log(x))^2"), "{text}");
}

#[test]
fn presentation_forms() {
    let o = p("a +. b = b +. a");
    let s = parse_bindings("[a := 2, b := 3]").unwrap();
    let sss = render_subst_forms(&o, &s, SubstForm::Sss).unwrap();
    assert_eq!(render_ascii(&sss), "(a + b = b + a)[a:=2; b:=3] = (2 + 3 = 3 + 2)");
    let ssu = render_subst_forms(&o, &s, SubstForm::Ssu).unwrap();
    let tex = render_latex(&ssu);
    assert!(tex.starts_with("\\underbrace{"));
    assert!(tex.ends_with("_{2 + 3 = 3 + 2}"));
    let ascii = render_ascii(&ssu);
    assert_eq!(ascii.lines().last().unwrap().trim(), "2 + 3 = 3 + 2");
    let empty = render_subst_forms(&o, &parse_bindings("[]").unwrap(), SubstForm::Ss).unwrap();
    assert!(render_ascii(&empty).starts_with("(a + b = b + a)"));
    let mut sess = Session::new();
    let v = sess.run_line("V([a:=2, b:=3]);").unwrap().value;
    let tex = render_latex(&RenderableDocument::expr(v));
    assert!(tex.contains("\\begin{bmatrix} a := 2 \\\\ b := 3 \\end{bmatrix}"), "{tex}");
}

#[test]
fn paths_and_holes() {
    let o = p("2 +. 3 +. 4 = 2 +. 7");
    assert_eq!(part(&o, &[2, 1]).unwrap(), p("2"));
    assert_eq!(part(&p("f(g(x))"), &[1]).unwrap(), p("g(x)"));
    assert_eq!(render_ascii(&dpart(&o, &[2, 1]).unwrap()), "2 + 3 + 4 = ⎡2⎤ + 7");
    assert_eq!(render_ascii(&dpart(&o, &[]).unwrap()), "⎡2 + 3 + 4 = 2 + 7⎤");
    let holed = substpart(Expr::hole(), &o, &[2, 1]).unwrap();
    assert_eq!(holed, p("2 +. 3 +. 4 = ? +. 7"));
    assert_eq!(show(&holed), "2 + 3 + 4 = ? + 7");
    assert_eq!(substpart(p("x"), &o, &[]).unwrap(), p("x"));
    assert_eq!(
        render_tree(&o, TreeDirection::ChildrenRight, AsciiStyle::Display).lines().next(),
        Some("=─┬─+─┬─2")
    );
    assert_eq!(render_tree(&Expr::hole(), TreeDirection::ChildrenRight, AsciiStyle::Display), "?");
    let x = mkholes(&o, &[]).unwrap();
    assert!(x.holes.is_empty());
    assert_eq!(x.statement, o);
    assert!(matches!(mkholes(&o, &[vec![2, 1], vec![2, 1]]), Err(Error::OverlappingPaths(..))));
}

#[test]
fn chain_rule_exercise() {
    let mut s = Session::new();
    s.run_line("S : [f(x)=x^3, f'(x)=3*x^2, g(x)=log(x)+x^2, g'(x)=1/x+2*x]$").unwrap();
    s.run_line("o : RCV _ssu_ S;").unwrap();
    s.run_line("mkholes(o, [1,2,2,1,2], [1,2,3,1,2], [1,2,4,1,2], [2,2,2]);").unwrap();
    let x = s.last_exercise.clone().unwrap();
    let o = s.expr("o").unwrap().clone();
    let spots: Vec<Expr> = x.holes.iter().map(|h| part(&o, &h.path).unwrap()).collect();
    assert_eq!(spots[0], p("3*x^2"));
    assert_eq!(spots[1], simp("log(x) + x^2"));
    assert_eq!(spots[2], simp("1/x + 2*x"));
    // the bottom slot holds the result of the substitution
    assert_eq!(x.holes[3].path, vec![2, 2, 2]);
    // the siblings of the holes are the binding heads
    assert_eq!(part(&o, &[1, 2, 2, 1, 1]).unwrap(), p("f'(x)"));
    assert_eq!(part(&o, &[1, 2, 3, 1, 1]).unwrap(), p("g(x)"));
    assert_eq!(part(&o, &[1, 2, 4, 1, 1]).unwrap(), p("g'(x)"));
    assert_eq!(show(&x.statement).matches('?').count(), 4);

    let mut answers = x.answers().unwrap();
    for (lbl, src) in [(3, "2*x + 1/x"), (3, "1/x + 2*x")] {
        answers.insert(lbl, p(src));
        let r = check_holes(&x, &answers).unwrap();
        assert!(r.all_correct, "{src}");
    }
    answers.insert(3, p("2*x"));
    let r = check_holes(&x, &answers).unwrap();
    assert!(!r.all_correct);
    assert!(!r.per_hole.iter().find(|h| h.label == 3).unwrap().correct);
}

fn rule_instance(name: &str, rng: &mut impl Rng) -> String {
    const FS: [(&str, &str); 4] = [
        ("sin(x)", "cos(x)"),
        ("exp(x)", "exp(x)"),
        ("x^2 + 1", "2*x"),
        ("3*x^3", "9*x^2"),
    ];
    let (f, fp) = FS[rng.gen_range(0..FS.len())];
    let (g, gp) = FS[rng.gen_range(0..FS.len())];
    match name {
        "RChain" => format!("[f(x) := {f}, f'(x) := {fp}, g(x) := {g}, g'(x) := {gp}]"),
        "RProd" | "RSum" => format!("[f(x) := {f}, g(x) := {g}]"),
        "RConstMul" => format!("[c := {}, f(x) := {f}]", rng.gen_range(-5..=5)),
        "RPot" => format!("[n := {}]", rng.gen_range(-3..=6)),
        _ => "[]".into(),
    }
}

#[test]
fn catalog_rules_hold_numerically() {
    let rchain = find_rule("RChain").unwrap();
    let i = instantiate_rule(rchain, &parse_bindings("[g(x) := 42*x, g'(x) := 42]").unwrap()).unwrap();
    assert_eq!(show(&i), "d/dx(f(42*x)) = f'(42*x)*42");
    let i = instantiate_rule(rchain, &parse_bindings("[f(x) := sin(x), f'(x) := cos(x)]").unwrap()).unwrap();
    assert_eq!(show(&i), "d/dx(sin(g(x))) = cos(g(x))*g'(x)");
    let rpot = instantiate_rule(find_rule("RPot").unwrap(), &parse_bindings("[n := 3]").unwrap()).unwrap();
    assert_eq!(simplify_default(&delazify(rpot.as_equation().unwrap().1)).unwrap(), p("3*x^2"));

    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for rule in builtin_catalog() {
        for _ in 0..5 {
            let s = parse_bindings(&rule_instance(&rule.name, &mut rng)).unwrap();
            let inst = instantiate_rule(rule, &s).unwrap();
            let (l, r) = inst.as_equation().unwrap();
            let x: f64 = rng.gen_range(0.3..1.2);
            let env = env_f(&[("x", x)]);
            let a = eval_f64(l, &env).unwrap();
            let b = eval_f64(r, &env).unwrap();
            assert!((a - b).abs() < 1e-5 * (1.0 + b.abs()), "{}: {inst} at {x}", rule.name);
        }
    }
}

#[test]
fn solving_and_defining() {
    let s = solve_linear(&[p("b + a = 2"), p("b + 3*a = -4")], &["a", "b"]).unwrap();
    assert_eq!(s.to_list_expr(), p("[a := -3, b := 5]"));
    assert_eq!(solve_linear(&[p("x = 0")], &["x"]).unwrap().to_list_expr(), p("[x := 0]"));
    assert!(matches!(
        solve_linear(&[p("a + b = 1"), p("2*a + 2*b = 2")], &["a", "b"]),
        Err(Error::Singular)
    ));
    let mut sess = Session::new();
    sess.run_line("define(g(x), 5 - 3*x)$").unwrap();
    assert_eq!(sess.run_line("g(1);").unwrap().value, p("2"));
    assert_eq!(sess.run_line("g(3);").unwrap().value, p("-4"));
    sess.run_line("define(id(x), x)$").unwrap();
    assert_eq!(sess.run_line("id(q + 1);").unwrap().value, p("q + 1"));
}

#[test]
fn comprehension_examples() {
    let c = normalize(&p("{a in {2,3,4} | a^2 < 10}")).unwrap();
    assert_eq!(
        c.clauses,
        vec![
            Clause::Gen { vars: vec!["a".into()], source: p("{2,3,4}") },
            Clause::Filter(p("a^2 < 10")),
            Clause::Result(p("a")),
        ]
    );
    assert_eq!(evaluate(&c).unwrap().values, vec![p("2"), p("3")]);
    let ten = normalize(&p("{10*a | a in {2,3,4}}")).unwrap();
    assert_eq!(ten.clauses.len(), 2);
    assert_eq!(evaluate(&ten).unwrap().values, vec![p("20"), p("30"), p("40")]);
    assert_eq!(emit_loops(&ten), "for a in {2, 3, 4} do\n  print(10*a)\nend");
    assert!(evaluate_expr(&p("{x | x in {}}")).unwrap().values.is_empty());

    let pairs = evaluate_expr(&p("{(x, y) | x in {1, ..., 5}, y in {x, ..., 6 - x}}")).unwrap();
    let want: Vec<Expr> = ["(1,1)", "(1,2)", "(1,3)", "(1,4)", "(1,5)", "(2,2)", "(2,3)", "(2,4)", "(3,3)"]
        .iter()
        .map(|s| p(s))
        .collect();
    assert_eq!(pairs.values, want);
    let root = &pairs.tree.root;
    assert_eq!(root.children.len(), 5);
    let leaves: Vec<usize> = root.children.iter().map(|c| c.children.len()).collect();
    assert_eq!(leaves, vec![5, 3, 1, 0, 0]);
    assert!(root.children[3].pruned && root.children[4].pruned);
    assert_eq!(root.leaf_results().len(), 9);

    let g = graph_comprehension(&p("y = (1-x)^2")).unwrap();
    assert_eq!(show(&graph_expr(&g)), "{(x, y) in R^2 | y = (1 - x)^2}");
    assert!(matches!(evaluate(&g), Err(Error::NonFinite(_))));
    let chain = graph_comprehension(&p("y = f'(g(x))*g'(x)")).unwrap();
    assert_eq!(show(&graph_expr(&chain)), "{(x, y) in R^2 | y = f'(g(x))*g'(x)}");
}

#[test]
fn json_schema() {
    let e = p("x + 1");
    assert_eq!(mex_core::json::to_string(&e), r#"{"op":"+","args":[{"sym":"x"},{"num":"1/1"}]}"#);
    let mut sess = Session::new();
    sess.run_line("S : [f(x)=x^3, f'(x)=3*x^2, g(x)=log(x)+x^2, g'(x)=1/x+2*x]$").unwrap();
    sess.run_line("o : RCV _ssu_ S;").unwrap();
    sess.run_line("mkholes(o, [1,2,2,1,2], [1,2,3,1,2], [1,2,4,1,2], [2,2,2]);").unwrap();
    let x = sess.last_exercise.clone().unwrap();
    let student = x.student_view();
    let text = student.to_string();
    assert!(student.get("source").is_none());
    assert!(!text.contains("answer"));
    assert!(x.to_json().get("source").is_some());
}
