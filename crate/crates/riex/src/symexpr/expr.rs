use std::collections::BTreeMap;
use std::fmt;

use num::traits::Zero;

use super::gcd::{normalized, poly_gcd, reduce};
use super::poly::{Mono, MultiPoly, Rat};
use super::{SymError, SymResult, Symbols};

/// Exact multivariate rational function, kept in canonical reduced form:
/// gcd(num, den) = 1, den integer-primitive with positive leading
/// coefficient in graded-lex order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalExpr {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalExpr {
    pub fn new(num: MultiPoly, den: MultiPoly) -> SymResult<Self> {
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        let (num, den) = reduce(&num, &den);
        Ok(RationalExpr { num, den })
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let one = MultiPoly::one(p.symbols());
        RationalExpr { num: p, den: one }
    }

    pub fn zero(syms: &Symbols) -> Self {
        Self::from_poly(MultiPoly::zero(syms))
    }

    pub fn one(syms: &Symbols) -> Self {
        Self::from_poly(MultiPoly::one(syms))
    }

    pub fn from_int(syms: &Symbols, n: i64) -> Self {
        Self::from_poly(MultiPoly::from_int(syms, n))
    }

    pub fn var(syms: &Symbols, idx: usize) -> Self {
        Self::from_poly(MultiPoly::var(syms, idx))
    }

    pub fn var_named(syms: &Symbols, name: &str) -> SymResult<Self> {
        let idx = syms
            .index_of(name)
            .ok_or_else(|| SymError::Undeclared(name.to_string()))?;
        Ok(Self::var(syms, idx))
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn symbols(&self) -> &Symbols {
        self.num.symbols()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &RationalExpr) -> RationalExpr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b) = self.align_with(other);
        if a.den.is_one() && b.den.is_one() {
            return RationalExpr::from_poly(a.num.add(&b.num));
        }
        // a/b + c/d with g = gcd(b, d): for coprime denominators the sum is
        // already in lowest terms; otherwise only gcd(t, g) can cancel.
        let g = poly_gcd(&a.den, &b.den);
        if g.constant_value().is_some() {
            let num = a.num.mul(&b.den).add(&b.num.mul(&a.den));
            let den = a.den.mul(&b.den);
            let (num, den) = normalized(&num, &den);
            return RationalExpr { num, den };
        }
        let bg = a.den.div_exact(&g).unwrap();
        let dg = b.den.div_exact(&g).unwrap();
        let t = a.num.mul(&dg).add(&b.num.mul(&bg));
        let h = poly_gcd(&t, &g);
        let (num, g) = if h.constant_value().is_some() {
            (t, g)
        } else {
            (t.div_exact(&h).unwrap(), g.div_exact(&h).unwrap())
        };
        let den = bg.mul(&dg).mul(&g);
        let (num, den) = normalized(&num, &den);
        RationalExpr { num, den }
    }

    pub fn sub(&self, other: &RationalExpr) -> RationalExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalExpr {
        RationalExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RationalExpr) -> RationalExpr {
        if self.is_zero() || other.is_zero() {
            let (s, _) = self.symbols().merge(other.symbols());
            return RationalExpr::zero(&s);
        }
        let (a, b) = self.align_with(other);
        // cross-cancel first so the product needs no further reduction
        let (n1, d2) = cancel(&a.num, &b.den);
        let (n2, d1) = cancel(&b.num, &a.den);
        let (num, den) = normalized(&n1.mul(&n2), &d1.mul(&d2));
        RationalExpr { num, den }
    }

    pub fn div(&self, other: &RationalExpr) -> SymResult<RationalExpr> {
        if other.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        if self.is_zero() {
            let (s, _) = self.symbols().merge(other.symbols());
            return Ok(RationalExpr::zero(&s));
        }
        let (a, b) = self.align_with(other);
        let (n1, n2) = cancel(&a.num, &b.num);
        let (d2, d1) = cancel(&b.den, &a.den);
        let (num, den) = normalized(&n1.mul(&d2), &d1.mul(&n2));
        Ok(RationalExpr { num, den })
    }

    pub fn inv(&self) -> SymResult<RationalExpr> {
        RationalExpr::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, n: u32) -> RationalExpr {
        // already coprime, but den normalization may redistribute constants
        let (num, den) = normalized(&self.num.pow(n), &self.den.pow(n));
        RationalExpr { num, den }
    }

    pub fn scale(&self, c: &Rat) -> RationalExpr {
        if c.is_zero() {
            return RationalExpr::zero(self.symbols());
        }
        RationalExpr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Partial derivative by symbol index (quotient rule, canonical result).
    pub fn differentiate(&self, var: usize) -> RationalExpr {
        if self.den.is_one() {
            return RationalExpr::from_poly(self.num.derivative(var));
        }
        let dd = self.den.derivative(var);
        if dd.is_zero() {
            let (num, den) = reduce(&self.num.derivative(var), &self.den);
            return RationalExpr { num, den };
        }
        // deflate the quotient rule by g = gcd(d, d'); for squarefree d the
        // result is already in lowest terms
        let g = poly_gcd(&self.den, &dd);
        if g.constant_value().is_some() {
            let num = self
                .num
                .derivative(var)
                .mul(&self.den)
                .sub(&self.num.mul(&dd));
            let den = self.den.mul(&self.den);
            let (num, den) = normalized(&num, &den);
            return RationalExpr { num, den };
        }
        let dg = self.den.div_exact(&g).unwrap();
        let ddg = dd.div_exact(&g).unwrap();
        let t = self.num.derivative(var).mul(&dg).sub(&self.num.mul(&ddg));
        let (num, den) = reduce(&t, &self.den.mul(&dg));
        RationalExpr { num, den }
    }

    pub fn differentiate_named(&self, name: &str) -> SymResult<RationalExpr> {
        let idx = self
            .symbols()
            .index_of(name)
            .ok_or_else(|| SymError::Undeclared(name.to_string()))?;
        Ok(self.differentiate(idx))
    }

    /// Simultaneous substitution of rational expressions for symbols.
    /// Symbols absent from `bindings` map to themselves.
    pub fn substitute(&self, bindings: &BTreeMap<String, RationalExpr>) -> SymResult<RationalExpr> {
        let num = subst_poly(&self.num, bindings)?;
        let den = subst_poly(&self.den, bindings)?;
        if den.is_zero() {
            return Err(SymError::SubstitutionPole);
        }
        num.div(&den)
    }

    /// Numeric evaluation; every symbol must be bound. Rejects points where
    /// the denominator magnitude falls below `eps_den`.
    pub fn evaluate_guarded(
        &self,
        point: &BTreeMap<String, f64>,
        eps_den: f64,
    ) -> SymResult<f64> {
        let syms = self.symbols();
        let mut vals = Vec::with_capacity(syms.len());
        for name in syms.names() {
            match point.get(name) {
                Some(v) => vals.push(*v),
                None => return Err(SymError::Unbound(name.clone())),
            }
        }
        let d = self.den.eval(&vals);
        if d.abs() <= eps_den {
            return Err(SymError::NearPole(d.abs()));
        }
        Ok(self.num.eval(&vals) / d)
    }

    /// Default near-pole threshold of 1e-12.
    pub fn evaluate(&self, point: &BTreeMap<String, f64>) -> SymResult<f64> {
        self.evaluate_guarded(point, 1e-12)
    }

    /// Evaluate with symbols bound positionally (same order as the table).
    pub fn eval_slice(&self, vals: &[f64], eps_den: f64) -> SymResult<f64> {
        let d = self.den.eval(vals);
        if d.abs() <= eps_den {
            return Err(SymError::NearPole(d.abs()));
        }
        Ok(self.num.eval(vals) / d)
    }

    pub fn constant_value(&self) -> Option<Rat> {
        match (self.num.constant_value(), self.den.constant_value()) {
            (Some(n), Some(d)) => Some(n / d),
            _ => None,
        }
    }

    /// Rewrite onto a merged symbol table shared with `other`.
    pub fn align_with(&self, other: &RationalExpr) -> (RationalExpr, RationalExpr) {
        if self.symbols() == other.symbols() {
            return (self.clone(), other.clone());
        }
        let (s, map_b) = self.symbols().merge(other.symbols());
        let id: Vec<usize> = (0..self.symbols().len()).collect();
        (
            RationalExpr {
                num: self.num.remap(&s, &id),
                den: self.den.remap(&s, &id),
            },
            RationalExpr {
                num: other.num.remap(&s, &map_b),
                den: other.den.remap(&s, &map_b),
            },
        )
    }

    pub fn remap(&self, syms: &Symbols, map: &[usize]) -> RationalExpr {
        RationalExpr {
            num: self.num.remap(syms, map),
            den: self.den.remap(syms, map),
        }
    }

    /// Rewrite onto a superset symbol table, matching symbols by name.
    pub fn on_symbols(&self, syms: &Symbols) -> SymResult<RationalExpr> {
        let mut map = Vec::with_capacity(self.symbols().len());
        for name in self.symbols().names() {
            match syms.index_of(name) {
                Some(i) => map.push(i),
                None => return Err(SymError::Undeclared(name.clone())),
            }
        }
        Ok(self.remap(syms, &map))
    }
}

/// Divide out the common polynomial factor of `a` and `b`.
fn cancel(a: &MultiPoly, b: &MultiPoly) -> (MultiPoly, MultiPoly) {
    if a.is_one() || b.is_one() {
        return (a.clone(), b.clone());
    }
    let g = poly_gcd(a, b);
    if g.constant_value().is_some() {
        (a.clone(), b.clone())
    } else {
        (a.div_exact(&g).unwrap(), b.div_exact(&g).unwrap())
    }
}

fn subst_poly(
    p: &MultiPoly,
    bindings: &BTreeMap<String, RationalExpr>,
) -> SymResult<RationalExpr> {
    let syms = p.symbols();
    // target symbol set: union of p's symbols with all binding values'
    let mut target = syms.clone();
    for v in bindings.values() {
        let (t, _) = target.merge(v.symbols());
        target = t;
    }
    let mut bound: Vec<Option<RationalExpr>> = vec![None; syms.len()];
    for (name, val) in bindings {
        if let Some(i) = syms.index_of(name) {
            bound[i] = Some(val.on_symbols(&target)?);
        }
    }
    let mut acc = RationalExpr::zero(&target);
    let mut cache: BTreeMap<(usize, u32), RationalExpr> = BTreeMap::new();
    for (m, c) in &p.terms {
        let mut residual = vec![0u32; target.len()];
        let mut term = RationalExpr::from_poly(MultiPoly::constant(&target, c.clone()));
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            match &bound[i] {
                Some(val) => {
                    let val = val.clone();
                    let pw = cache.entry((i, e)).or_insert_with(|| val.pow(e)).clone();
                    term = term.mul(&pw);
                }
                None => {
                    let ti = target.index_of(syms.name(i)).unwrap();
                    residual[ti] = e;
                }
            }
        }
        if residual.iter().any(|&e| e > 0) {
            let mono = MultiPoly::one(&target).mul_monomial(&Mono(residual));
            term = term.mul(&RationalExpr::from_poly(mono));
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
