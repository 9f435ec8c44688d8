use mex_web::{comprehend, eval_line, reset_session, substitute};

#[test]
fn session_carries_definitions() {
    reset_session();
    assert_eq!(eval_line("f(x) := x^2 + 1;").unwrap(), "(%o1) f(x) := x^2 + 1");
    assert_eq!(eval_line("f(3);").unwrap(), "(%o2) 10");
    assert!(eval_line("f(3").unwrap_err().contains("expected"));
    reset_session();
    assert_eq!(eval_line("f(3);").unwrap(), "(%o1) f(3)");
}

#[test]
fn lazy_substitution_forms() {
    let s = substitute("a +. b = b +. a", "[a := 2, b := 3]", "s").unwrap();
    assert!(s.starts_with("2 + 3 = 3 + 2\n\n"));
    let sss = substitute("f(g(t))", "[f(x) := g(g(x)), g(x) := f(f(x))]", "sss").unwrap();
    assert!(sss.lines().next().unwrap().ends_with("= g(g(f(f(t))))"), "{sss}");
    assert!(substitute("x", "[x := 1]", "sssu").is_err());
}

#[test]
fn comprehension_with_trace_and_loops() {
    let out = comprehend("{(x, y) | x in {1, ..., 5}, y in {x, ..., 6 - x}}").unwrap();
    let mut parts = out.split("\n\n");
    assert!(parts.next().unwrap().starts_with("{(1, 1), (1, 2)"));
    assert!(parts.next().unwrap().contains("x = 4"));
    assert!(parts.next().unwrap().starts_with("for x = 1, 5 do"));
}
