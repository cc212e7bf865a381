//! Exact computer-algebra kernel: multivariate polynomials and rational
//! functions over the rationals, with differentiation, substitution,
//! canonicalization and numeric evaluation.
//!
//! Canonical form is fixed once and for all: graded-lexicographic term
//! order with respect to the declared symbol order, no zero coefficients
//! stored, fractions reduced with the denominator primitive over the
//! integers and its leading coefficient positive. Printed forms are
//! byte-stable and round-trip through [`parse`].

mod expr;
mod gcd;
mod parse;
mod poly;

pub use expr::RationalExpr;
pub use parse::{parse, parse_on};
pub use poly::{MultiPoly, Rat};

use std::fmt;
use std::sync::Arc;

/// Shared, ordered list of symbol names (variables followed by parameters).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Symbols(Arc<Vec<String>>);

impl Symbols {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Symbols(Arc::new(names.into_iter().map(Into::into).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// Union of two symbol sets, keeping `self`'s order and appending the
    /// names unique to `other`. Returns the merged set together with the
    /// index remapping for `other`.
    pub fn merge(&self, other: &Symbols) -> (Symbols, Vec<usize>) {
        if self == other {
            return (self.clone(), (0..other.len()).collect());
        }
        let mut names: Vec<String> = self.0.as_ref().clone();
        let mut map_b = Vec::with_capacity(other.len());
        for n in other.0.iter() {
            match names.iter().position(|m| m == n) {
                Some(i) => map_b.push(i),
                None => {
                    names.push(n.clone());
                    map_b.push(names.len() - 1);
                }
            }
        }
        (Symbols(Arc::new(names)), map_b)
    }
}

impl fmt::Debug for Symbols {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbols{:?}", self.0)
    }
}

/// Errors raised by the symbolic kernel.
#[derive(Debug, thiserror::Error)]
pub enum SymError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("pole of substitution: denominator vanishes identically")]
    SubstitutionPole,
    #[error("near-pole evaluation: |den| = {0:e} below threshold")]
    NearPole(f64),
    #[error("symbol `{0}` not bound at evaluation point")]
    Unbound(String),
}

pub type SymResult<T> = Result<T, SymError>;

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn xy(text: &str) -> RationalExpr {
        parse(text, &["x", "y"], &[]).unwrap()
    }

    #[test]
    fn parse_polynomial_literal() {
        let e = xy("x^2 - y");
        assert!(e.is_polynomial());
        assert_eq!(e.to_string(), "x^2 - y");
    }

    #[test]
    fn parse_cancels_common_factor() {
        let e = parse("(x+1)/(x+1)", &["x"], &[]).unwrap();
        assert!(e.is_one());
        let e = parse("(x^2-y^2)/(x-y)", &["x", "y"], &[]).unwrap();
        assert_eq!(e.to_string(), "x + y");
    }

    #[test]
    fn parse_with_parameters() {
        let e = parse("8 - 3*a - 14*a*x - 2*a*x*y - 8*y^2", &["x", "y"], &["a"]).unwrap();
        assert!(e.is_polynomial());
        assert_eq!(e.numerator().total_degree(), 3);
        assert_eq!(e.to_string(), "-2*x*y*a - 14*x*a - 8*y^2 - 3*a + 8");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse("x + ", &["x"], &[]),
            Err(SymError::Syntax { .. })
        ));
        assert!(matches!(
            parse("x + w", &["x"], &[]),
            Err(SymError::Undeclared(_))
        ));
        assert!(matches!(
            parse("1/(x - x)", &["x"], &[]),
            Err(SymError::DivisionByZero)
        ));
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "x^2 - y",
            "(x + y)/(x^2 - x)",
            "(2*x - 3)/(3*y + 1)",
            "-x",
            "0",
            "(x^3 - 2*x*y + 5)/(7*x - y)",
        ] {
            let e = xy(text);
            let back = parse(&e.to_string(), &["x", "y"], &[]).unwrap();
            assert_eq!(e, back, "round trip failed for {text}");
            assert_eq!(e.to_string(), back.to_string());
        }
    }

    #[test]
    fn differentiate_examples() {
        let e = xy("x^2*y");
        assert_eq!(e.differentiate_named("x").unwrap().to_string(), "2*x*y");
        let e = xy("-y");
        assert_eq!(e.differentiate_named("y").unwrap().to_string(), "-1");
        let e = parse("1/x", &["x"], &[]).unwrap();
        assert_eq!(e.differentiate_named("x").unwrap().to_string(), "(-1)/(x^2)");
    }

    #[test]
    fn substitute_identity_and_pole() {
        let syms = Symbols::new(["x", "y", "C"]);
        let y = RationalExpr::var_named(&syms, "y").unwrap();
        let fam = parse_on("C*(x-1)/(x-C)", &syms).unwrap();
        let mut b = BTreeMap::new();
        b.insert("y".to_string(), fam.clone());
        assert_eq!(y.substitute(&b).unwrap(), fam);

        let e = xy("1/(x-y)");
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), RationalExpr::one(e.symbols()));
        b.insert("y".to_string(), RationalExpr::one(e.symbols()));
        assert!(matches!(e.substitute(&b), Err(SymError::SubstitutionPole)));
    }

    #[test]
    fn evaluate_examples() {
        let e = xy("x^2 + y");
        let mut p = BTreeMap::new();
        p.insert("x".to_string(), 2.0);
        p.insert("y".to_string(), 1.0);
        assert_eq!(e.evaluate(&p).unwrap(), 5.0);

        let e = parse("-3/(2*x^2)", &["x"], &[]).unwrap();
        let mut p = BTreeMap::new();
        p.insert("x".to_string(), 2.0);
        assert_eq!(e.evaluate(&p).unwrap(), -0.375);

        let e = parse("1/x", &["x"], &[]).unwrap();
        let mut p = BTreeMap::new();
        p.insert("x".to_string(), 1e-15);
        assert!(matches!(e.evaluate(&p), Err(SymError::NearPole(_))));
    }

    #[test]
    fn is_zero_examples() {
        assert!(xy("(x+y)^2 - x^2 - 2*x*y - y^2").is_zero());
        assert!(xy("x/y - x/y").is_zero());
        assert!(!xy("x/y - y/x").is_zero());
    }

    #[test]
    fn canonical_uniqueness_across_operation_orders() {
        // same function assembled two ways
        let a = xy("(x+y)*(x-y)/(x^2*y - y^3)");
        let b = xy("1/y");
        assert_eq!(a, b);
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn denominator_normalization() {
        // leading denominator coefficient positive, integer-primitive
        let e = xy("x/(2 - 4*y)");
        assert_eq!(e.to_string(), "(-1/2*x)/(2*y - 1)");
        let back = xy(&e.to_string());
        assert_eq!(e, back);
    }

    #[test]
    fn symbol_merge_alignment() {
        let a = parse("x + 1", &["x"], &[]).unwrap();
        let b = parse("y + 1", &["y"], &[]).unwrap();
        let s = a.add(&b);
        assert_eq!(s.to_string(), "x + y + 2");
    }
}

