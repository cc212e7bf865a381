//! Multivariate polynomial gcd via recursive primitive PRS.
//!
//! The result is primitive over the integers with positive leading
//! coefficient, so canonical equality of reduced fractions is decidable.

use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};
use num::Integer;

use super::poly::{Mono, MultiPoly, Rat};

/// Gcd of two polynomials, normalized to the integer-primitive
/// representative with positive leading coefficient. Gcd with a nonzero
/// constant is 1 (we work over the field of rationals).
pub fn poly_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let (a, b) = MultiPoly::aligned(a, b);
    if a.is_zero() {
        return b.primitive_integer().0;
    }
    if b.is_zero() {
        return a.primitive_integer().0;
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(a.symbols());
    }
    // pull out the common monomial factor first
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let common = Mono(ma.0.iter().zip(&mb.0).map(|(x, y)| *x.min(y)).collect());
    let a = a.div_monomial(&ma).primitive_integer().0;
    let b = b.div_monomial(&mb).primitive_integer().0;

    // cheap exits
    if a == b {
        return a.mul_monomial(&common);
    }
    if b.div_exact(&a).is_some() {
        return a.mul_monomial(&common);
    }
    if a.div_exact(&b).is_some() {
        return b.mul_monomial(&common);
    }

    if provably_coprime(&a, &b) {
        return MultiPoly::one(a.symbols()).mul_monomial(&common);
    }
    if let Some(g) = heugcd(&a, &b, 0) {
        return g.primitive_integer().0.mul_monomial(&common);
    }
    let g = gcd_inner(&a, &b);
    g.primitive_integer().0.mul_monomial(&common)
}

/// True if the gcd is provably constant: degree zero in every shared
/// variable, certified by univariate images at random points.
fn provably_coprime(a: &MultiPoly, b: &MultiPoly) -> bool {
    let n = a.symbols().len();
    for v in 0..n {
        if a.uses_var(v)
            && b.uses_var(v)
            && !image_coprime(&a.to_univariate(v), &b.to_univariate(v))
        {
            return false;
        }
    }
    true
}

fn max_coeff(p: &MultiPoly) -> BigInt {
    p.terms
        .values()
        .map(|c| c.numer().abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

fn int_content(p: &MultiPoly) -> BigInt {
    let mut g = BigInt::zero();
    for c in p.terms.values() {
        g = g.gcd(c.numer());
        if g.is_one() {
            break;
        }
    }
    g
}

/// Substitute the integer `xi` for variable `v` (Horner form).
fn subst_int(p: &MultiPoly, v: usize, xi: &BigInt) -> MultiPoly {
    let coeffs = p.to_univariate(v);
    let scale = Rat::from_integer(xi.clone());
    let mut acc = MultiPoly::zero(p.symbols());
    for c in coeffs.iter().rev() {
        acc = acc.scale(&scale).add(c);
    }
    acc
}

fn balanced_mod(c: &BigInt, xi: &BigInt) -> BigInt {
    let mut r = c.mod_floor(xi);
    if &r + &r > *xi {
        r -= xi;
    }
    r
}

/// Recover a polynomial in `v` from its value at `v = xi` by balanced
/// xi-adic digits. Fails if more digits appear than the degree cap allows.
fn xi_adic(gamma: &MultiPoly, v: usize, xi: &BigInt, cap: u32) -> Option<MultiPoly> {
    let syms = gamma.symbols().clone();
    let mut g = MultiPoly::zero(&syms);
    let mut cur = gamma.clone();
    let inv = Rat::one() / Rat::from_integer(xi.clone());
    let mut e = 0u32;
    while !cur.is_zero() {
        if e > cap {
            return None;
        }
        let digit = cur.map_coeffs(|c| Rat::from_integer(balanced_mod(c.numer(), xi)));
        g = g.add(&MultiPoly::var(&syms, v).pow(e).mul(&digit));
        cur = cur.sub(&digit).scale(&inv);
        e += 1;
    }
    Some(g)
}

/// Heuristic gcd by integer substitution: evaluate one variable at a
/// large integer, recurse, reconstruct by balanced xi-adic digits and
/// verify by exact division. `None` means the heuristic gave up; the
/// remainder-sequence path is the sound fallback. Inputs must have
/// integer coefficients.
fn heugcd(a: &MultiPoly, b: &MultiPoly, depth: u32) -> Option<MultiPoly> {
    if depth > 20 {
        return None;
    }
    let n = a.symbols().len();
    // shared variable of smallest degree keeps the digit count low
    let v = (0..n)
        .filter(|&v| a.uses_var(v) && b.uses_var(v))
        .min_by_key(|&v| a.degree_in(v).min(b.degree_in(v)));
    let Some(v) = v else {
        // no shared variable: the gcd is the integer content gcd
        let g = int_content(a).gcd(&int_content(b));
        return Some(MultiPoly::constant(a.symbols(), Rat::from_integer(g)));
    };
    let cap = a.degree_in(v).min(b.degree_in(v));
    let two = BigInt::from(2);
    let mut xi = &two * max_coeff(a).min(max_coeff(b)) + BigInt::from(29);
    if xi.bits() * (cap as u64 + 1) > 30_000 {
        return None;
    }
    for _ in 0..6 {
        let ia = subst_int(a, v, &xi);
        let ib = subst_int(b, v, &xi);
        if !ia.is_zero() && !ib.is_zero() {
            if let Some(gamma) = heugcd(&ia, &ib, depth + 1) {
                if let Some(g) = xi_adic(&gamma, v, &xi, cap) {
                    let g = g.primitive_integer().0;
                    if a.div_exact(&g).is_some() && b.div_exact(&g).is_some() {
                        return Some(g);
                    }
                }
            }
        }
        xi = xi * BigInt::from(73794u32) / BigInt::from(27011u32);
    }
    None
}

fn gcd_inner(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(a.symbols());
    }
    // main variable: appears in both, minimizing the larger degree
    let n = a.symbols().len();
    let mut main: Option<(usize, u32)> = None;
    for v in 0..n {
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        if da > 0 && db > 0 {
            let key = da.max(db);
            if main.map_or(true, |(_, k)| key < k) {
                main = Some((v, key));
            }
        }
    }
    let v = match main {
        Some((v, _)) => v,
        // no shared variable: gcd divides both contents, which are coprime
        // as polynomials in disjoint symbol sets unless one is constant
        None => return MultiPoly::one(a.symbols()),
    };

    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let cont_a = coeff_gcd(&ua);
    let cont_b = coeff_gcd(&ub);
    let cont = gcd_inner(&cont_a, &cont_b);
    let pa: Vec<MultiPoly> = ua.iter().map(|c| c.div_exact(&cont_a).unwrap()).collect();
    let pb: Vec<MultiPoly> = ub.iter().map(|c| c.div_exact(&cont_b).unwrap()).collect();

    // a random-point image proves a trivial gcd in the main variable far
    // cheaper than the remainder sequence; false negatives just fall through
    if image_coprime(&pa, &pb) {
        return cont;
    }

    let g = primitive_prs(pa, pb);
    let g = MultiPoly::from_univariate(&g, v, a.symbols());
    g.mul(&cont)
}

/// True if the gcd of the two primitive univariate images is provably
/// constant. Sound one way: a common divisor maps to a common divisor of
/// the images, and a nonvanishing leading coefficient on either side keeps
/// its degree, so an image gcd of degree zero forces a trivial gcd.
fn image_coprime(pa: &[MultiPoly], pb: &[MultiPoly]) -> bool {
    let n = pa[0].symbols().len();
    for attempt in 0..3u64 {
        let point: Vec<Rat> = (0..n)
            .map(|i| Rat::from_integer(((2 + attempt * 17 + i as u64 * 5) % 43 + 2).into()))
            .collect();
        let la = pa.last().unwrap().eval_exact(&point);
        let lb = pb.last().unwrap().eval_exact(&point);
        if la.is_zero() && lb.is_zero() {
            continue;
        }
        let ia: Vec<Rat> = pa.iter().map(|c| c.eval_exact(&point)).collect();
        let ib: Vec<Rat> = pb.iter().map(|c| c.eval_exact(&point)).collect();
        if univ_rat_gcd_degree(ia, ib) == 0 {
            return true;
        }
    }
    false
}

fn univ_rat_gcd_degree(mut a: Vec<Rat>, mut b: Vec<Rat>) -> usize {
    let deg = |p: &[Rat]| p.iter().rposition(|c| !c.is_zero());
    loop {
        let (da, db) = match (deg(&a), deg(&b)) {
            (None, None) => return 0,
            (Some(d), None) => return d,
            (None, Some(d)) => return d,
            (Some(da), Some(db)) => (da, db),
        };
        if da < db {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        if db == 0 {
            return 0;
        }
        let f = a[da].clone() / b[db].clone();
        for k in 0..=db {
            let t = b[k].clone() * f.clone();
            a[k + da - db] -= t;
        }
        a[da] = Rat::zero();
    }
}

fn coeff_gcd(coeffs: &[MultiPoly]) -> MultiPoly {
    let mut g: Option<MultiPoly> = None;
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = Some(match g {
            None => c.primitive_integer().0,
            Some(prev) => {
                if prev.is_one() {
                    return prev;
                }
                gcd_inner(&prev, &c.primitive_integer().0)
            }
        });
    }
    g.unwrap_or_else(|| MultiPoly::zero(coeffs[0].symbols()))
}

fn univ_deg(p: &[MultiPoly]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn trim(mut p: Vec<MultiPoly>) -> Vec<MultiPoly> {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Primitive polynomial remainder sequence in one variable over the ring
/// of polynomials in the remaining symbols.
fn primitive_prs(mut u: Vec<MultiPoly>, mut w: Vec<MultiPoly>) -> Vec<MultiPoly> {
    u = trim(u);
    w = trim(w);
    if univ_deg(&u) < univ_deg(&w) {
        std::mem::swap(&mut u, &mut w);
    }
    loop {
        let dw = match univ_deg(&w) {
            None => return make_primitive(u),
            Some(d) => d,
        };
        if dw == 0 {
            // nonzero remainder of degree 0: gcd in the main variable is
            // trivial; content was already handled by the caller
            let syms = w[0].symbols().clone();
            return vec![MultiPoly::one(&syms)];
        }
        let r = pseudo_rem(&u, &w);
        u = w;
        w = make_primitive(r);
    }
}

fn make_primitive(p: Vec<MultiPoly>) -> Vec<MultiPoly> {
    let p = trim(p);
    if univ_deg(&p).is_none() {
        return p;
    }
    let cont = coeff_gcd(&p);
    if cont.is_one() {
        return p;
    }
    p.iter()
        .map(|c| {
            if c.is_zero() {
                c.clone()
            } else {
                c.div_exact(&cont).unwrap()
            }
        })
        .collect()
}

/// Pseudo-remainder of `u` by `w` (deg u >= deg w >= 1).
fn pseudo_rem(u: &[MultiPoly], w: &[MultiPoly]) -> Vec<MultiPoly> {
    let du = univ_deg(u).unwrap();
    let dw = univ_deg(w).unwrap();
    debug_assert!(du >= dw);
    let lw = w[dw].clone();
    let mut r: Vec<MultiPoly> = u.to_vec();
    loop {
        let dr = match univ_deg(&r) {
            Some(d) if d >= dw => d,
            _ => return r,
        };
        let lr = r[dr].clone();
        // r = lw*r - lr * x^(dr-dw) * w
        let shift = dr - dw;
        let mut next = vec![MultiPoly::zero(lr.symbols()); dr.max(dw + shift) + 1];
        for (i, c) in r.iter().enumerate() {
            if !c.is_zero() {
                next[i] = c.mul(&lw);
            }
        }
        for (i, c) in w.iter().enumerate() {
            if !c.is_zero() {
                let t = c.mul(&lr);
                next[i + shift] = next[i + shift].sub(&t);
            }
        }
        r = trim(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{parse, RationalExpr};

    fn p(text: &str) -> MultiPoly {
        let e = parse(text, &["x", "y", "z"], &[]).unwrap();
        assert!(e.is_polynomial());
        e.numerator().clone()
    }

    #[test]
    fn gcd_univariate() {
        let g = poly_gcd(&p("x^2 - 1"), &p("x^2 - 2*x + 1"));
        assert_eq!(g, p("x - 1"));
    }

    #[test]
    fn gcd_multivariate() {
        let g = poly_gcd(&p("(x + y)*(x - y)"), &p("(x + y)*(x + 2*y)"));
        assert_eq!(g, p("x + y"));
        let g = poly_gcd(&p("x^2*y + x*y^2"), &p("x*y"));
        assert_eq!(g, p("x*y"));
    }

    #[test]
    fn gcd_coprime_is_one() {
        let g = poly_gcd(&p("x + 1"), &p("y + 1"));
        assert!(g.is_one());
        let g = poly_gcd(&p("x^2 + 1"), &p("x + 3"));
        assert!(g.is_one());
    }

    #[test]
    fn gcd_with_constant() {
        let g = poly_gcd(&p("2*x + 2"), &p("4"));
        assert!(g.is_one());
    }

    #[test]
    fn gcd_normalized_sign() {
        let g = poly_gcd(&p("-x^2 + y^2"), &p("-x - y"));
        assert_eq!(g, p("x + y"));
    }

    #[test]
    fn gcd_dense_trivariate() {
        let a = p("(x + y + z)^2 * (x - z)");
        let b = p("(x + y + z) * (y + z)^2");
        assert_eq!(poly_gcd(&a, &b), p("x + y + z"));
    }

    #[test]
    fn reduce_gives_lowest_terms() {
        let e = RationalExpr::new(p("x^2 - y^2"), p("x^2 - 2*x*y + y^2")).unwrap();
        assert_eq!(e.numerator(), &p("x + y"));
        assert_eq!(e.denominator(), &p("x - y"));
    }
}

/// Normalize an already-reduced fraction: denominator integer-primitive
/// with positive leading coefficient. No gcd is computed.
pub fn normalized(num: &MultiPoly, den: &MultiPoly) -> (MultiPoly, MultiPoly) {
    let (num, den) = MultiPoly::aligned(num, den);
    if num.is_zero() {
        return (num, MultiPoly::one(den.symbols()));
    }
    let (den_prim, factor) = den.primitive_integer();
    let inv = Rat::one() / factor;
    (num.scale(&inv), den_prim)
}

/// Convenience: reduce the fraction `num/den` to lowest terms with the
/// denominator integer-primitive and positive-leading.
pub fn reduce(num: &MultiPoly, den: &MultiPoly) -> (MultiPoly, MultiPoly) {
    let (mut num, mut den) = MultiPoly::aligned(num, den);
    if num.is_zero() {
        return (num, MultiPoly::one(den.symbols()));
    }
    if !den.is_constant() {
        let g = poly_gcd(&num, &den);
        if !g.is_one() {
            num = num.div_exact(&g).unwrap();
            den = den.div_exact(&g).unwrap();
        }
    }
    // normalize: den primitive over Z, positive leading coefficient
    let (den_prim, factor) = den.primitive_integer();
    let inv = Rat::one() / factor;
    (num.scale(&inv), den_prim)
}
