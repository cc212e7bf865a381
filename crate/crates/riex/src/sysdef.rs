//! System definition files: a small line-oriented format carrying a named
//! first-order polynomial system, its symbols and optional numeric
//! parameter values.
//!
//! ```text
//! # comment
//! name: circle
//! dim: 2
//! vars: x, y
//! params: a, b
//! values: a = 1, b = 0.5
//! P: -y
//! Q: x
//! ```
//!
//! `R:` is required exactly when dim is 3; `params` and `values` may be
//! omitted.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::connection::VectorField;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub name: String,
    pub dim: usize,
    pub variables: Vec<String>,
    pub parameters: Vec<String>,
    pub values: BTreeMap<String, f64>,
    /// component expressions, one per variable (P, Q and for dim 3 R)
    pub components: Vec<String>,
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

impl SystemSpec {
    pub fn parse(text: &str) -> Result<SystemSpec> {
        let mut fields: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| {
                Error::Input(format!("line {}: expected `key: value`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            if fields.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Input(format!("duplicate key `{key}`")));
            }
        }
        let take = |k: &str| -> Result<String> {
            fields
                .get(k)
                .cloned()
                .ok_or_else(|| Error::Input(format!("missing key `{k}`")))
        };
        let name = take("name")?;
        let dim: usize = take("dim")?
            .parse()
            .map_err(|_| Error::Input("dim must be an integer".into()))?;
        if dim != 2 && dim != 3 {
            return Err(Error::Input("dim must be 2 or 3".into()));
        }
        let variables = split_list(&take("vars")?);
        if variables.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: variables.len(),
            });
        }
        let parameters = fields.get("params").map(|v| split_list(v)).unwrap_or_default();
        let mut values = BTreeMap::new();
        if let Some(v) = fields.get("values") {
            for item in split_list(v) {
                let (n, x) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Input(format!("bad value binding `{item}`")))?;
                let n = n.trim().to_string();
                if !parameters.contains(&n) {
                    return Err(Error::Input(format!("value for unknown parameter `{n}`")));
                }
                let x: f64 = x
                    .trim()
                    .parse()
                    .map_err(|_| Error::Input(format!("bad number in `{item}`")))?;
                values.insert(n, x);
            }
        }
        let keys: &[&str] = if dim == 2 { &["P", "Q"] } else { &["P", "Q", "R"] };
        let components = keys.iter().map(|k| take(k)).collect::<Result<Vec<_>>>()?;
        if dim == 2 && fields.contains_key("R") {
            return Err(Error::Input("R given for a dim-2 system".into()));
        }
        Ok(SystemSpec {
            name,
            dim,
            variables,
            parameters,
            values,
            components,
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<SystemSpec> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Input(format!("{}: {e}", path.as_ref().display())))?;
        SystemSpec::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name: {}", self.name);
        let _ = writeln!(out, "dim: {}", self.dim);
        let _ = writeln!(out, "vars: {}", self.variables.join(", "));
        if !self.parameters.is_empty() {
            let _ = writeln!(out, "params: {}", self.parameters.join(", "));
        }
        if !self.values.is_empty() {
            let items: Vec<String> = self
                .values
                .iter()
                .map(|(n, x)| format!("{n} = {x}"))
                .collect();
            let _ = writeln!(out, "values: {}", items.join(", "));
        }
        for (k, c) in ["P", "Q", "R"].iter().zip(&self.components) {
            let _ = writeln!(out, "{k}: {c}");
        }
        out
    }

    pub fn vector_field(&self) -> Result<VectorField> {
        let vars: Vec<&str> = self.variables.iter().map(String::as_str).collect();
        let params: Vec<&str> = self.parameters.iter().map(String::as_str).collect();
        let comps: Vec<&str> = self.components.iter().map(String::as_str).collect();
        VectorField::new(&vars, &params, &comps)
    }

    /// Numeric bindings for every parameter; errors when one is unbound.
    pub fn bindings(&self) -> Result<BTreeMap<String, f64>> {
        for p in &self.parameters {
            if !self.values.contains_key(p) {
                return Err(Error::Input(format!("parameter `{p}` needs a value")));
            }
        }
        Ok(self.values.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = "name: circle\ndim: 2\nvars: x, y\nP: -y\nQ: x\n";

    #[test]
    fn parse_minimal() {
        let s = SystemSpec::parse(CIRCLE).unwrap();
        assert_eq!(s.name, "circle");
        assert_eq!(s.dim, 2);
        assert_eq!(s.components, vec!["-y", "x"]);
        assert!(s.vector_field().is_ok());
    }

    #[test]
    fn round_trip_is_identity() {
        let text = "name: lorenz\ndim: 3\nvars: x, y, z\nparams: s, r, b\n\
                    values: b = 2.6666666666666665, r = 28, s = 10\n\
                    P: s*(y - x)\nQ: r*x - y - x*z\nR: x*y - b*z\n";
        let s = SystemSpec::parse(text).unwrap();
        let back = SystemSpec::parse(&s.to_text()).unwrap();
        assert_eq!(s, back);
        assert_eq!(s.to_text(), back.to_text());
    }

    #[test]
    fn errors_are_reported() {
        assert!(matches!(
            SystemSpec::parse("name: x\ndim: 4\nvars: a,b,c,d\nP: 1\nQ: 1"),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            SystemSpec::parse("dim: 2\nvars: x, y\nP: -y\nQ: x"),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            SystemSpec::parse(&format!("{CIRCLE}R: z")),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            SystemSpec::parse("name: c\ndim: 2\nvars: x, y\nvalues: a = 1\nP: -y\nQ: x"),
            Err(Error::Input(_))
        ));
        let s = SystemSpec::parse("name: c\ndim: 2\nvars: x, y\nparams: a\nP: -y\nQ: a*x")
            .unwrap();
        assert!(matches!(s.bindings(), Err(Error::Input(_))));
    }
}
