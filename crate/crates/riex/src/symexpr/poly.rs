use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};

use super::Symbols;

/// Exact rational coefficient.
pub type Rat = num::BigRational;

/// Exponent vector ordered graded-lexicographically (total degree first,
/// then lex on the declared symbol order).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial with exact rational coefficients.
///
/// Invariants: no zero coefficients stored; every exponent vector has
/// length equal to the symbol count.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    pub(crate) syms: Symbols,
    pub(crate) terms: BTreeMap<Mono, Rat>,
}

impl MultiPoly {
    pub fn zero(syms: &Symbols) -> Self {
        MultiPoly {
            syms: syms.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(syms: &Symbols, c: Rat) -> Self {
        let mut p = Self::zero(syms);
        if !c.is_zero() {
            p.terms.insert(Mono(vec![0; syms.len()]), c);
        }
        p
    }

    pub fn one(syms: &Symbols) -> Self {
        Self::constant(syms, Rat::one())
    }

    pub fn from_int(syms: &Symbols, n: i64) -> Self {
        Self::constant(syms, Rat::from_integer(BigInt::from(n)))
    }

    pub fn var(syms: &Symbols, idx: usize) -> Self {
        assert!(idx < syms.len());
        let mut e = vec![0u32; syms.len()];
        e[idx] = 1;
        let mut p = Self::zero(syms);
        p.terms.insert(Mono(e), Rat::one());
        p
    }

    pub fn symbols(&self) -> &Symbols {
        &self.syms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|m| m.total_degree() == 0)
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_value().map_or(false, |c| c.is_one())
    }

    /// Constant value if the polynomial is constant.
    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    /// Split into coefficient polynomials of the powers of one variable;
    /// entry k is the coefficient of var^k (var exponent zeroed out).
    pub fn coefficients_of(&self, var: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![MultiPoly::zero(&self.syms); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[var] as usize;
            let mut e = m.0.clone();
            e[var] = 0;
            out[k].insert_term(Mono(e), c.clone());
        }
        out
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Mono, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn insert_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rat) -> Rat) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.syms);
        for (m, c) in &self.terms {
            out.insert_term(m.clone(), f(c));
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        self.map_coeffs(|c| -c)
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let (a, b) = Self::aligned(self, other);
        let mut out = a;
        for (m, c) in b.terms {
            out.insert_term(m, c);
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        if self.is_zero() || other.is_zero() {
            let (s, _) = self.syms.merge(&other.syms);
            return MultiPoly::zero(&s);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let (a, b) = Self::aligned(self, other);
        let mut out = MultiPoly::zero(&a.syms);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m = Mono(ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect());
                out.insert_term(m, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.syms);
        }
        self.map_coeffs(|k| k * c)
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut out = MultiPoly::one(&self.syms);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                out = out.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    pub fn derivative(&self, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.syms);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e > 0 {
                let mut em = m.0.clone();
                em[var] = e - 1;
                out.insert_term(Mono(em), c * Rat::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Exact multivariate division. Returns `None` when `div` does not
    /// divide `self` exactly.
    pub fn div_exact(&self, div: &MultiPoly) -> Option<MultiPoly> {
        if div.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(MultiPoly::zero(&self.syms));
        }
        if let Some(c) = div.constant_value() {
            return Some(self.scale(&(Rat::one() / c)));
        }
        let (mut rem, d) = Self::aligned(self, div);
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut quo = MultiPoly::zero(&rem.syms);
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
            if rm.0.iter().zip(&lm.0).any(|(a, b)| a < b) {
                return None;
            }
            let qm = Mono(rm.0.iter().zip(&lm.0).map(|(a, b)| a - b).collect());
            let qc = rc / &lc;
            let mut t = MultiPoly::zero(&rem.syms);
            t.terms.insert(qm.clone(), qc.clone());
            rem = rem.sub(&t.mul(&d));
            quo.insert_term(qm, qc);
        }
        Some(quo)
    }

    /// Rewrite onto a (super)set of symbols given an index remapping.
    pub fn remap(&self, syms: &Symbols, map: &[usize]) -> MultiPoly {
        let mut out = MultiPoly::zero(syms);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; syms.len()];
            for (i, &ex) in m.0.iter().enumerate() {
                e[map[i]] += ex;
            }
            out.insert_term(Mono(e), c.clone());
        }
        out
    }

    pub(crate) fn aligned(a: &MultiPoly, b: &MultiPoly) -> (MultiPoly, MultiPoly) {
        if a.syms == b.syms {
            return (a.clone(), b.clone());
        }
        let (s, map_b) = a.syms.merge(&b.syms);
        let id: Vec<usize> = (0..a.syms.len()).collect();
        (a.remap(&s, &id), b.remap(&s, &map_b))
    }

    /// Evaluate at a point given as one f64 per symbol.
    pub fn eval(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.syms.len());
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= point[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact evaluation at a rational point (one value per symbol).
    pub fn eval_exact(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.syms.len());
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num::pow::pow(point[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// View as a dense univariate polynomial in `var`, coefficients being
    /// polynomials in the remaining symbols (stored with `var`-exponent 0).
    pub fn to_univariate(&self, var: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(var) as usize;
        let mut coeffs = vec![MultiPoly::zero(&self.syms); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            let mut em = m.0.clone();
            em[var] = 0;
            coeffs[e].insert_term(Mono(em), c.clone());
        }
        coeffs
    }

    pub fn from_univariate(coeffs: &[MultiPoly], var: usize, syms: &Symbols) -> MultiPoly {
        let mut out = MultiPoly::zero(syms);
        for (e, c) in coeffs.iter().enumerate() {
            for (m, k) in &c.terms {
                let mut em = m.0.clone();
                em[var] += e as u32;
                out.insert_term(Mono(em), k.clone());
            }
        }
        out
    }

    /// Scale to integer coefficients, primitive (content 1) with positive
    /// leading coefficient. Returns the scaled polynomial and the rational
    /// factor `f` such that `self = f * primitive`.
    pub fn primitive_integer(&self) -> (MultiPoly, Rat) {
        if self.is_zero() {
            return (self.clone(), Rat::one());
        }
        let mut denom_lcm = BigInt::one();
        let mut numer_gcd = BigInt::zero();
        for c in self.terms.values() {
            denom_lcm = num::integer::lcm(denom_lcm, c.denom().clone());
            numer_gcd = num::integer::gcd(numer_gcd, c.numer().abs());
        }
        let mut factor = Rat::new(numer_gcd, denom_lcm);
        let lead_neg = self.leading().map(|(_, c)| c.is_negative()).unwrap_or(false);
        if lead_neg {
            factor = -factor;
        }
        let inv = Rat::one() / factor.clone();
        (self.scale(&inv), factor)
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.0.clone(),
            None => return Mono(vec![0; self.syms.len()]),
        };
        let acc = it.fold(first, |mut acc, m| {
            for (a, b) in acc.iter_mut().zip(&m.0) {
                *a = (*a).min(*b);
            }
            acc
        });
        Mono(acc)
    }

    pub fn div_monomial(&self, m: &Mono) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.syms);
        for (k, c) in &self.terms {
            let e: Vec<u32> = k.0.iter().zip(&m.0).map(|(a, b)| a - b).collect();
            out.terms.insert(Mono(e), c.clone());
        }
        out
    }

    pub fn mul_monomial(&self, m: &Mono) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.syms);
        for (k, c) in &self.terms {
            let e: Vec<u32> = k.0.iter().zip(&m.0).map(|(a, b)| a + b).collect();
            out.terms.insert(Mono(e), c.clone());
        }
        out
    }

    /// Simultaneous polynomial substitution; symbols absent from
    /// `bindings` map to themselves.
    pub fn substitute_poly(&self, bindings: &[(usize, MultiPoly)]) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.syms);
        // power cache per bound symbol
        let mut cache: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(&self.syms, c.clone());
            let mut residual = vec![0u32; self.syms.len()];
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if let Some((_, val)) = bindings.iter().find(|(j, _)| *j == i) {
                    let p = cache
                        .entry((i, e))
                        .or_insert_with(|| val.pow(e))
                        .clone();
                    term = term.mul(&p);
                } else {
                    residual[i] = e;
                }
            }
            term = term.mul_monomial(&Mono(residual));
            out = out.add(&term);
        }
        out
    }

    fn fmt_rat(c: &Rat, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if c.denom().is_one() {
            write!(f, "{}", c.numer())
        } else {
            write!(f, "{}/{}", c.numer(), c.denom())
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const_term = m.total_degree() == 0;
            if is_const_term {
                Self::fmt_rat(&abs, f)?;
            } else {
                let mut wrote = false;
                if !abs.is_one() {
                    Self::fmt_rat(&abs, f)?;
                    wrote = true;
                }
                for (i, &e) in m.0.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if wrote {
                        write!(f, "*")?;
                    }
                    write!(f, "{}", self.syms.name(i))?;
                    if e > 1 {
                        write!(f, "^{}", e)?;
                    }
                    wrote = true;
                }
            }
        }
        Ok(())
    }
}
