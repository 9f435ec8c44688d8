//! The immutable expression tree shared by every other module.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Exact rational constant.
pub type Rational = BigRational;

/// A symbolic expression.
///
/// `Op` nodes carry the name of a registered operator (`+`, `*`, `=`, `:=`, `+.`, ...);
/// `App` is function application with an arbitrary head, usually a `Sym` or a `Lambda`.
/// `Quoted` is the noun form of its inner node: the simplifier never looks inside it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Rational),
    Sym(String),
    App(Box<Expr>, Vec<Expr>),
    Op(String, Vec<Expr>),
    Lambda(Vec<String>, Box<Expr>),
    Hole(Option<u32>),
    Quoted(Box<Expr>),
}

/// Names of the functions the engine knows how to evaluate and differentiate.
pub const BUILTIN_FUNCTIONS: &[&str] = &["sin", "cos", "tan", "exp", "log", "sqrt"];

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::Num(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn num(r: Rational) -> Expr {
        Expr::Num(r)
    }

    pub fn sym(name: impl Into<String>) -> Expr {
        Expr::Sym(name.into())
    }

    pub fn op(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Op(name.into(), args)
    }

    pub fn app(head: Expr, args: Vec<Expr>) -> Expr {
        Expr::App(Box::new(head), args)
    }

    /// `name(args...)` with a symbol head.
    pub fn call(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::App(Box::new(Expr::Sym(name.into())), args)
    }

    pub fn lambda(params: Vec<String>, body: Expr) -> Expr {
        Expr::Lambda(params, Box::new(body))
    }

    pub fn quote(inner: Expr) -> Expr {
        Expr::Quoted(Box::new(inner))
    }

    pub fn hole() -> Expr {
        Expr::Hole(None)
    }

    pub fn eq(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Op("=".into(), vec![lhs, rhs])
    }

    pub fn zero() -> Expr {
        Expr::Num(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Rational::one())
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self {
            Expr::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Expr::Sym(s) => Some(s),
            _ => None,
        }
    }

    /// The operator name and arguments when this is an `Op` node named `name`.
    pub fn as_op(&self, name: &str) -> Option<&[Expr]> {
        match self {
            Expr::Op(n, args) if n == name => Some(args),
            _ => None,
        }
    }

    /// Left and right side of an `=` node.
    pub fn as_equation(&self) -> Option<(&Expr, &Expr)> {
        match self.as_op("=") {
            Some([l, r]) => Some((l, r)),
            _ => None,
        }
    }

    /// The head name and arguments of `name(args...)`.
    pub fn as_call(&self) -> Option<(&str, &[Expr])> {
        match self {
            Expr::App(head, args) => head.as_sym().map(|h| (h, args.as_slice())),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_one())
    }

    /// Integer value of a numeric constant with denominator 1.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Expr::Num(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_integer().and_then(|n| n.to_i64())
    }

    pub fn is_negative_num(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_negative())
    }

    /// Children in path order: index 1.. are the arguments.
    pub fn children(&self) -> &[Expr] {
        match self {
            Expr::App(_, args) | Expr::Op(_, args) => args,
            Expr::Lambda(_, body) | Expr::Quoted(body) => std::slice::from_ref(body.as_ref()),
            _ => &[],
        }
    }

    /// Rebuild this node with new children; the count must match `children()`.
    pub fn with_children(&self, children: Vec<Expr>) -> Expr {
        match self {
            Expr::App(head, _) => Expr::App(head.clone(), children),
            Expr::Op(name, _) => Expr::Op(name.clone(), children),
            Expr::Lambda(params, _) => {
                let body = children.into_iter().next().expect("lambda has a body");
                Expr::Lambda(params.clone(), Box::new(body))
            }
            Expr::Quoted(_) => {
                let inner = children.into_iter().next().expect("quote has an inner node");
                Expr::Quoted(Box::new(inner))
            }
            leaf => leaf.clone(),
        }
    }

    /// Apply `f` to every direct subexpression, including an `App` head.
    pub fn map_subexprs(&self, mut f: impl FnMut(&Expr) -> Expr) -> Expr {
        match self {
            Expr::App(head, args) => Expr::App(Box::new(f(head)), args.iter().map(&mut f).collect()),
            Expr::Op(name, args) => Expr::Op(name.clone(), args.iter().map(f).collect()),
            Expr::Lambda(params, body) => Expr::Lambda(params.clone(), Box::new(f(body))),
            Expr::Quoted(inner) => Expr::Quoted(Box::new(f(inner))),
            leaf => leaf.clone(),
        }
    }

    pub fn try_map_subexprs<E>(
        &self,
        mut f: impl FnMut(&Expr) -> Result<Expr, E>,
    ) -> Result<Expr, E> {
        Ok(match self {
            Expr::App(head, args) => Expr::App(
                Box::new(f(head)?),
                args.iter().map(&mut f).collect::<Result<_, _>>()?,
            ),
            Expr::Op(name, args) => {
                Expr::Op(name.clone(), args.iter().map(f).collect::<Result<_, _>>()?)
            }
            Expr::Lambda(params, body) => Expr::Lambda(params.clone(), Box::new(f(body)?)),
            Expr::Quoted(inner) => Expr::Quoted(Box::new(f(inner)?)),
            leaf => leaf.clone(),
        })
    }

    /// Symbols not bound by an enclosing lambda. Heads of applications count.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every symbol name occurring anywhere, bound or free, including lambda parameters.
    pub fn all_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| match e {
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Lambda(params, _) => out.extend(params.iter().cloned()),
            _ => {}
        });
        out
    }

    /// Pre-order traversal including application heads.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        if let Expr::App(head, _) = self {
            head.visit(f);
        }
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn contains_sym(&self, name: &str) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if let Expr::Sym(s) = e {
                if s == name {
                    found = true;
                }
            }
        });
        found
    }

    pub fn contains_hole(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Expr::Hole(_)));
        found
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    fn rank(&self) -> u8 {
        match self {
            Expr::Num(_) => 0,
            Expr::Sym(_) => 1,
            Expr::Hole(_) => 2,
            Expr::App(..) => 3,
            Expr::Op(..) => 4,
            Expr::Lambda(..) => 5,
            Expr::Quoted(_) => 6,
        }
    }
}

fn collect_free(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match e {
        Expr::Sym(s) => {
            if !bound.iter().any(|b| b == s) {
                out.insert(s.clone());
            }
        }
        Expr::App(head, args) => {
            collect_free(head, bound, out);
            for a in args {
                collect_free(a, bound, out);
            }
        }
        Expr::Op(_, args) => {
            for a in args {
                collect_free(a, bound, out);
            }
        }
        Expr::Lambda(params, body) => {
            let depth = bound.len();
            bound.extend(params.iter().cloned());
            collect_free(body, bound, out);
            bound.truncate(depth);
        }
        Expr::Quoted(inner) => collect_free(inner, bound, out),
        Expr::Num(_) | Expr::Hole(_) => {}
    }
}

/// Total order used for canonical sorting: variant first, then contents.
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Expr::Num(a), Expr::Num(b)) => a.cmp(b),
            (Expr::Sym(a), Expr::Sym(b)) => a.cmp(b),
            (Expr::Hole(a), Expr::Hole(b)) => a.cmp(b),
            (Expr::App(h1, a1), Expr::App(h2, a2)) => h1.cmp(h2).then_with(|| a1.cmp(a2)),
            (Expr::Op(n1, a1), Expr::Op(n2, a2)) => n1.cmp(n2).then_with(|| a1.cmp(a2)),
            (Expr::Lambda(p1, b1), Expr::Lambda(p2, b2)) => p1.cmp(p2).then_with(|| b1.cmp(b2)),
            (Expr::Quoted(a), Expr::Quoted(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::ascii::expr_to_string(self, crate::render::AsciiStyle::Exact))
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

/// Structural equality; numbers compare as rationals, `Quoted(x) != x`.
pub fn expr_equal(a: &Expr, b: &Expr) -> bool {
    a == b
}

/// Symbols free in `e`.
pub fn free_variables(e: &Expr) -> BTreeSet<String> {
    e.free_variables()
}
