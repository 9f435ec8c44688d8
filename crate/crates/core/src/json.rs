//! The JSON AST encoding of [`Expr`].
//!
//! ```text
//! {"num":"3/1"} {"sym":"x"} {"op":"+","args":[..]} {"app":{"head":..,"args":[..]}}
//! {"lam":{"params":["x"],"body":..}} {"hole":null} {"hole":2} {"quote":..}
//! ```

use std::str::FromStr;

use num::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::expr::{Expr, Rational};

pub fn to_value(e: &Expr) -> Value {
    match e {
        Expr::Num(r) => json!({ "num": format!("{}/{}", r.numer(), r.denom()) }),
        Expr::Sym(s) => json!({ "sym": s }),
        Expr::Op(name, args) => {
            json!({ "op": name, "args": args.iter().map(to_value).collect::<Vec<_>>() })
        }
        Expr::App(head, args) => json!({
            "app": {
                "head": to_value(head),
                "args": args.iter().map(to_value).collect::<Vec<_>>(),
            }
        }),
        Expr::Lambda(params, body) => json!({
            "lam": { "params": params, "body": to_value(body) }
        }),
        Expr::Hole(label) => json!({ "hole": label }),
        Expr::Quoted(inner) => json!({ "quote": to_value(inner) }),
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| bad(format!("missing field `{key}`")))
}

fn args_of(v: &Value) -> Result<Vec<Expr>> {
    v.as_array()
        .ok_or_else(|| bad("`args` must be an array"))?
        .iter()
        .map(from_value)
        .collect()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad(format!("bad numerator in `{s}`")))?;
    let d = BigInt::from_str(d).map_err(|_| bad(format!("bad denominator in `{s}`")))?;
    if d == BigInt::from(0) {
        return Err(bad(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(n, d))
}

pub fn from_value(v: &Value) -> Result<Expr> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("expression must be a JSON object"))?;
    if obj.len() != 1 && !obj.contains_key("op") {
        return Err(bad("expression object must have exactly one tag"));
    }
    if let Some(n) = obj.get("num") {
        let s = n.as_str().ok_or_else(|| bad("`num` must be a string"))?;
        return Ok(Expr::Num(parse_rational(s)?));
    }
    if let Some(s) = obj.get("sym") {
        let s = s.as_str().ok_or_else(|| bad("`sym` must be a string"))?;
        return Ok(Expr::Sym(s.to_string()));
    }
    if let Some(name) = obj.get("op") {
        let name = name.as_str().ok_or_else(|| bad("`op` must be a string"))?;
        return Ok(Expr::Op(name.to_string(), args_of(field(obj, "args")?)?));
    }
    if let Some(app) = obj.get("app") {
        let app = app.as_object().ok_or_else(|| bad("`app` must be an object"))?;
        let head = from_value(field(app, "head")?)?;
        return Ok(Expr::app(head, args_of(field(app, "args")?)?));
    }
    if let Some(lam) = obj.get("lam") {
        let lam = lam.as_object().ok_or_else(|| bad("`lam` must be an object"))?;
        let params = field(lam, "params")?
            .as_array()
            .ok_or_else(|| bad("`params` must be an array"))?
            .iter()
            .map(|p| {
                p.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| bad("lambda parameters must be strings"))
            })
            .collect::<Result<Vec<_>>>()?;
        let body = from_value(field(lam, "body")?)?;
        return Ok(Expr::lambda(params, body));
    }
    if let Some(h) = obj.get("hole") {
        return match h {
            Value::Null => Ok(Expr::Hole(None)),
            Value::Number(n) => n
                .as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .map(|n| Expr::Hole(Some(n)))
                .ok_or_else(|| bad("hole label must be a small non-negative integer")),
            _ => Err(bad("hole label must be null or an integer")),
        };
    }
    if let Some(q) = obj.get("quote") {
        return Ok(Expr::quote(from_value(q)?));
    }
    Err(bad(format!(
        "unknown expression tag `{}`",
        obj.keys().next().map(String::as_str).unwrap_or("")
    )))
}

pub fn to_string(e: &Expr) -> String {
    to_value(e).to_string()
}

pub fn from_str(s: &str) -> Result<Expr> {
    let v: Value = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
    from_value(&v)
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_value(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        from_value(&v).map_err(D::Error::custom)
    }
}

/// An expression given either as surface source or as a JSON AST.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExprInput {
    Source(String),
    Ast(Expr),
}

impl ExprInput {
    pub fn resolve(&self) -> Result<Expr> {
        match self {
            ExprInput::Source(src) => crate::parser::parse(src),
            ExprInput::Ast(e) => Ok(e.clone()),
        }
    }
}

impl From<Expr> for ExprInput {
    fn from(e: Expr) -> Self {
        ExprInput::Ast(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_instance() {
        let e = Expr::op("+", vec![Expr::sym("x"), Expr::int(1)]);
        assert_eq!(
            to_string(&e),
            r#"{"op":"+","args":[{"sym":"x"},{"num":"1/1"}]}"#
        );
        let v: Value = serde_json::from_str(&to_string(&e)).unwrap();
        assert_eq!(v, json!({"op":"+","args":[{"sym":"x"},{"num":"1/1"}]}));
    }

    #[test]
    fn all_variants_decode() {
        let src = r#"{"app":{"head":{"lam":{"params":["x"],"body":{"quote":{"sym":"x"}}}},
                      "args":[{"hole":null},{"hole":3},{"num":"4/2"}]}}"#;
        let e = from_str(src).unwrap();
        let expected = Expr::app(
            Expr::lambda(vec!["x".into()], Expr::quote(Expr::sym("x"))),
            vec![Expr::Hole(None), Expr::Hole(Some(3)), Expr::int(2)],
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn rejects_garbage() {
        assert!(from_str(r#"{"num":"1/0"}"#).is_err());
        assert!(from_str(r#"{"bogus":1}"#).is_err());
        assert!(from_str(r#"[1]"#).is_err());
    }
}
