//! The shipped example documents, compiled into the crate.

use super::Derivation;

/// `(name, text source)` for every shipped document.
pub const SOURCES: &[(&str, &str)] = &[
    (
        "deriv-6x3-7x4",
        include_str!("../../fixtures/derivations/deriv-6x3-7x4.txt"),
    ),
    ("ln-compact", include_str!("../../fixtures/derivations/ln-compact.txt")),
    ("ln-expanded", include_str!("../../fixtures/derivations/ln-expanded.txt")),
    (
        "ode-archetypal",
        include_str!("../../fixtures/derivations/ode-archetypal.txt"),
    ),
    ("ode-general", include_str!("../../fixtures/derivations/ode-general.txt")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _)| *n)
}

/// A shipped document by name.
pub fn get(name: &str) -> Option<Derivation> {
    let (_, src) = SOURCES.iter().find(|(n, _)| *n == name)?;
    Some(super::parse_text(src).expect("shipped documents parse"))
}

pub fn all() -> Vec<(&'static str, Derivation)> {
    names().map(|n| (n, get(n).expect("listed"))).collect()
}
