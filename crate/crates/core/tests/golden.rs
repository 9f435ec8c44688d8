//! Rendered corpus documents compared against files in `fixtures/golden`.
//! Regenerate with `MEX_BLESS=1 cargo test --test golden`.

use std::path::PathBuf;

use mex_core::derivation::{check_derivation, corpus};
use mex_core::render::{
    checked_derivation_ascii, checked_derivation_latex, derivation_ascii, parallel_ascii, Layout,
};

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/golden")
        .join(name);
    let actual = format!("{actual}\n");
    if std::env::var_os("MEX_BLESS").is_some() {
        std::fs::write(&path, &actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} differs from its golden file");
}

#[test]
fn corpus_tables() {
    let layout = Layout::default();
    for (name, d) in corpus::all() {
        let report = check_derivation(&d);
        golden(&format!("{name}.txt"), &derivation_ascii(&d, &layout));
        golden(
            &format!("{name}.checked.txt"),
            &checked_derivation_ascii(&d, &report, &layout),
        );
        golden(
            &format!("{name}.tex"),
            &checked_derivation_latex(&d, &report, &layout),
        );
    }
}

#[test]
fn ode_side_by_side() {
    let a = corpus::get("ode-archetypal").unwrap();
    let g = corpus::get("ode-general").unwrap();
    golden("ode-parallel.txt", &parallel_ascii(&a, &g, &Layout::default()));
}

#[test]
fn power_rule_step_is_highlighted() {
    let d = corpus::get("deriv-6x3-7x4").unwrap();
    let report = check_derivation(&d);
    let tex = checked_derivation_latex(&d, &report, &Layout::default());
    let row = tex.lines().find(|l| l.contains("RPot") && l.contains("n := 3")).unwrap();
    assert!(row.contains(r"\hl{3\,x^{2}}"), "{row}");
    assert!(row.contains(r"\underbrace{\text{[RPot]}}"), "{row}");
    let ascii = checked_derivation_ascii(&d, &report, &Layout::default());
    assert!(ascii.contains("«3*x^2»"), "{ascii}");
}

#[test]
fn preamble_defines_highlight() {
    let pre = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/preamble.tex"),
    )
    .unwrap();
    assert!(pre.contains(r"\newcommand{\hl}"));
}
