//! Operator registry: arity, fixity, precedence, laziness and display hints.

use std::collections::HashMap;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fixity {
    Infix,
    Prefix,
    Postfix,
    Nary,
    Matchfix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assoc {
    Left,
    Right,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplayHints {
    /// Token printed by the ASCII renderer in display style.
    pub ascii: String,
    /// LaTeX for the operator symbol.
    pub latex: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDef {
    pub name: String,
    /// Spelling in source text. Equal to `name` except for `neg` (`-`) and `prime` (`'`).
    pub token: String,
    pub fixity: Fixity,
    pub assoc: Assoc,
    pub precedence: u16,
    pub lazy: bool,
    pub display: DisplayHints,
}

impl OperatorDef {
    pub fn new(name: &str, fixity: Fixity, precedence: u16) -> Self {
        OperatorDef {
            name: name.to_string(),
            token: name.to_string(),
            fixity,
            assoc: match fixity {
                Fixity::Infix => Assoc::Left,
                _ => Assoc::None,
            },
            precedence,
            lazy: name.len() > 1 && name.ends_with('.'),
            display: DisplayHints {
                ascii: name.to_string(),
                latex: name.to_string(),
            },
        }
    }

    pub fn infix(name: &str, precedence: u16) -> Self {
        Self::new(name, Fixity::Infix, precedence)
    }

    pub fn with_assoc(mut self, assoc: Assoc) -> Self {
        self.assoc = assoc;
        self
    }

    pub fn with_token(mut self, token: &str) -> Self {
        self.token = token.to_string();
        self
    }

    pub fn with_display(mut self, ascii: &str, latex: &str) -> Self {
        self.display = DisplayHints {
            ascii: ascii.to_string(),
            latex: latex.to_string(),
        };
        self
    }

    /// A lazy copy of this operator: same syntax and display, name suffixed with `.`.
    pub fn lazy_variant(&self) -> Self {
        OperatorDef {
            name: format!("{}.", self.name),
            token: format!("{}.", self.token),
            lazy: true,
            ..self.clone()
        }
    }

    /// Whether `args` is a legal argument count for this operator.
    pub fn accepts_arity(&self, n: usize) -> bool {
        match self.fixity {
            Fixity::Infix => n == 2,
            Fixity::Prefix | Fixity::Postfix => n == 1,
            Fixity::Nary => n >= 2,
            Fixity::Matchfix => true,
        }
    }
}

/// Ordered collection of operator definitions.
#[derive(Clone, Debug, Default)]
pub struct OperatorRegistry {
    defs: Vec<OperatorDef>,
    by_name: HashMap<String, usize>,
}

/// Whether an operator name denotes a lazy operator.
pub fn is_lazy_name(name: &str) -> bool {
    name.len() > 1 && name.ends_with('.')
}

/// Strip the lazy suffix: `+.` becomes `+`.
pub fn active_name(name: &str) -> &str {
    if is_lazy_name(name) {
        &name[..name.len() - 1]
    } else {
        name
    }
}

static BUILTIN: Lazy<OperatorRegistry> = Lazy::new(OperatorRegistry::builtin);

impl OperatorRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Arithmetic, relations and the structural matchfix forms.
    pub fn core() -> Self {
        use Fixity::*;
        let mut r = OperatorRegistry::empty();
        let defs = [
            OperatorDef::infix(":=", 10)
                .with_assoc(Assoc::None)
                .with_display(":=", "\\mathrel{:=}"),
            OperatorDef::infix("=", 20).with_assoc(Assoc::None),
            OperatorDef::infix("<", 20).with_assoc(Assoc::None),
            OperatorDef::infix(">", 20).with_assoc(Assoc::None),
            OperatorDef::infix("<=", 20)
                .with_assoc(Assoc::None)
                .with_display("<=", "\\le"),
            OperatorDef::infix(">=", 20)
                .with_assoc(Assoc::None)
                .with_display(">=", "\\ge"),
            OperatorDef::infix("!=", 20)
                .with_assoc(Assoc::None)
                .with_display("!=", "\\neq"),
            OperatorDef::new("+", Nary, 40),
            OperatorDef::infix("-", 40),
            OperatorDef::new("*", Nary, 50).with_display("*", "\\cdot"),
            OperatorDef::infix("/", 50),
            OperatorDef::new("neg", Prefix, 55)
                .with_token("-")
                .with_display("-", "-"),
            OperatorDef::infix("^", 60).with_assoc(Assoc::Right),
            OperatorDef::new("prime", Postfix, 70)
                .with_token("'")
                .with_display("'", "'"),
            OperatorDef::infix("in", 5)
                .with_assoc(Assoc::None)
                .with_display("in", "\\in"),
        ];
        for d in defs {
            r.register(d).expect("builtin operators are consistent");
        }
        for base in ["+", "-", "*", "/", "^"] {
            let lazy = r.get(base).unwrap().lazy_variant();
            r.register(lazy).unwrap();
        }
        for m in [
            "list", "set", "tuple", "matrix", "vcol", "range", "compre", "select", "index",
            "box", "hl",
        ] {
            r.register(OperatorDef::new(m, Matchfix, 100)).unwrap();
        }
        r
    }

    /// `core()` plus the substitution operators `_s_`, `_ss_`, `_sss_`, `_ssu_`.
    pub fn builtin() -> Self {
        let mut r = Self::core();
        for name in ["_s_", "_ss_", "_sss_", "_ssu_"] {
            r.register(OperatorDef::infix(name, 25)).unwrap();
        }
        r
    }

    /// Shared read-only snapshot of `builtin()`.
    pub fn shared() -> &'static OperatorRegistry {
        &BUILTIN
    }

    pub fn register(&mut self, def: OperatorDef) -> Result<()> {
        if def.name.is_empty() {
            return Err(Error::Registry("operator name is empty".into()));
        }
        if let Some(existing) = self.get(&def.name) {
            if *existing == def {
                return Ok(());
            }
            return Err(Error::Registry(format!(
                "conflicting redefinition of `{}`",
                def.name
            )));
        }
        if def.lazy != is_lazy_name(&def.name) {
            return Err(Error::Registry(format!(
                "`{}`: lazy operators are exactly those named with a trailing `.`",
                def.name
            )));
        }
        if def.lazy {
            let base = active_name(&def.name);
            if self.get(base).is_none() {
                return Err(Error::Registry(format!(
                    "lazy operator `{}` requires `{}` to be registered",
                    def.name, base
                )));
            }
        }
        if def.fixity != Fixity::Matchfix && def.token.is_empty() {
            return Err(Error::Registry(format!("`{}` has no token", def.name)));
        }
        self.by_name.insert(def.name.clone(), self.defs.len());
        self.defs.push(def);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&OperatorDef> {
        self.by_name.get(name).map(|&i| &self.defs[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.by_name.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &OperatorDef> {
        self.defs.iter()
    }

    /// Registration index, used to break precedence ties in messages.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// Infix or n-ary operator spelled `token`.
    pub fn infix_by_token(&self, token: &str) -> Option<&OperatorDef> {
        self.defs.iter().find(|d| {
            d.token == token && matches!(d.fixity, Fixity::Infix | Fixity::Nary)
        })
    }

    pub fn prefix_by_token(&self, token: &str) -> Option<&OperatorDef> {
        self.defs
            .iter()
            .find(|d| d.token == token && d.fixity == Fixity::Prefix)
    }

    pub fn postfix_by_token(&self, token: &str) -> Option<&OperatorDef> {
        self.defs
            .iter()
            .find(|d| d.token == token && d.fixity == Fixity::Postfix)
    }

    /// Tokens made of punctuation, longest first, for the lexer.
    pub fn symbolic_tokens(&self) -> Vec<String> {
        let mut toks: Vec<String> = self
            .defs
            .iter()
            .filter(|d| d.fixity != Fixity::Matchfix)
            .map(|d| d.token.clone())
            .filter(|t| !t.is_empty() && !t.chars().any(|c| c.is_alphanumeric() || c == '_'))
            .collect();
        toks.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        toks.dedup();
        toks
    }
}
