//! Limit-cycle condition pipeline for planar quadratic systems: the
//! cubic-in-slope second order ODE, substitution of the two-parameter
//! rational solution family y = C(x-1)/(x-C), the boundary and residue
//! conditions on the parameter C, and verification of particular
//! integrals and invariant curves.

use std::collections::BTreeMap;

use crate::connection::VectorField;
use crate::symexpr::{parse_on, RationalExpr, Symbols};
use crate::{Error, Result};

/// Planar system dy/dx = a-form / b-form with quadratic forms in (x, y);
/// coefficient order is (1, x, y, x^2, xy, y^2).
#[derive(Debug, Clone)]
pub struct QuadraticSystem {
    syms: Symbols,
    a: [RationalExpr; 6],
    b: [RationalExpr; 6],
}

const COEFF_NAMES: [(&str, &str); 6] = [
    ("a0", "b0"),
    ("a1", "b1"),
    ("a2", "b2"),
    ("a11", "b11"),
    ("a12", "b12"),
    ("a22", "b22"),
];

impl QuadraticSystem {
    pub fn new(syms: &Symbols, a: [RationalExpr; 6], b: [RationalExpr; 6]) -> Result<Self> {
        if b.iter().all(|c| c.is_zero()) {
            return Err(Error::Degenerate("all denominator coefficients zero".into()));
        }
        let fix = |c: &RationalExpr| c.on_symbols(syms).map_err(Error::from);
        Ok(QuadraticSystem {
            syms: syms.clone(),
            a: [
                fix(&a[0])?,
                fix(&a[1])?,
                fix(&a[2])?,
                fix(&a[3])?,
                fix(&a[4])?,
                fix(&a[5])?,
            ],
            b: [
                fix(&b[0])?,
                fix(&b[1])?,
                fix(&b[2])?,
                fix(&b[3])?,
                fix(&b[4])?,
                fix(&b[5])?,
            ],
        })
    }

    /// Fully symbolic system with the twelve named coefficients.
    pub fn generic() -> Self {
        let mut names = vec!["x".to_string(), "y".to_string()];
        for (an, bn) in COEFF_NAMES {
            names.push(an.to_string());
            names.push(bn.to_string());
        }
        let syms = Symbols::new(names);
        let grab = |n: &str| RationalExpr::var_named(&syms, n).unwrap();
        QuadraticSystem {
            syms: syms.clone(),
            a: [
                grab("a0"),
                grab("a1"),
                grab("a2"),
                grab("a11"),
                grab("a12"),
                grab("a22"),
            ],
            b: [
                grab("b0"),
                grab("b1"),
                grab("b2"),
                grab("b11"),
                grab("b12"),
                grab("b22"),
            ],
        }
    }

    /// Extract the twelve coefficients from a planar field whose
    /// components are polynomials of degree at most 2 in (x, y).
    pub fn from_field(vf: &VectorField) -> Result<Self> {
        if vf.dim() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                got: vf.dim(),
            });
        }
        let syms = vf.symbols().clone();
        let zero = RationalExpr::zero(&syms);
        let mut coeffs = [[(); 6]; 2].map(|r| r.map(|_| zero.clone()));
        for (ci, comp) in [vf.component(1), vf.component(0)].into_iter().enumerate() {
            if !comp.is_polynomial() {
                return Err(Error::Input("components must be polynomials".into()));
            }
            for (kx, row) in comp.numerator().coefficients_of(0).iter().enumerate() {
                for (ky, c) in row.coefficients_of(1).iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let slot = match (kx, ky) {
                        (0, 0) => 0,
                        (1, 0) => 1,
                        (0, 1) => 2,
                        (2, 0) => 3,
                        (1, 1) => 4,
                        (0, 2) => 5,
                        _ => {
                            return Err(Error::Input(
                                "components must have degree at most 2 in (x, y)".into(),
                            ))
                        }
                    };
                    coeffs[ci][slot] = RationalExpr::from_poly(c.clone());
                }
            }
        }
        let [a, b] = coeffs;
        QuadraticSystem::new(&syms, a, b)
    }

    pub fn symbols(&self) -> &Symbols {
        &self.syms
    }

    fn form(&self, c: &[RationalExpr; 6]) -> RationalExpr {
        let x = RationalExpr::var_named(&self.syms, "x").unwrap();
        let y = RationalExpr::var_named(&self.syms, "y").unwrap();
        c[0].add(&c[1].mul(&x))
            .add(&c[2].mul(&y))
            .add(&c[3].mul(&x).mul(&x))
            .add(&c[4].mul(&x).mul(&y))
            .add(&c[5].mul(&y).mul(&y))
    }

    /// Numerator of dy/dx (the y-velocity Q).
    pub fn numerator(&self) -> RationalExpr {
        self.form(&self.a)
    }

    /// Denominator of dy/dx (the x-velocity P).
    pub fn denominator(&self) -> RationalExpr {
        self.form(&self.b)
    }

    /// The planar field (P, Q) with P = b-form, Q = a-form.
    pub fn vector_field(&self) -> Result<VectorField> {
        VectorField::from_components(2, &self.syms, vec![self.denominator(), self.numerator()])
    }
}

/// y'' + (n3 y'^3 + n2 y'^2 + n1 y' + n0)/den = 0 with the shared
/// denominator den = y^2 P - y P + Q x^2 - Q x.
#[derive(Debug, Clone)]
pub struct CubicODE {
    syms: Symbols,
    /// numerators of the y'^3 .. y'^0 coefficients
    pub num: [RationalExpr; 4],
    pub den: RationalExpr,
}

/// Build the cubic-in-slope second order equation equivalent to the
/// planar system (P, Q).
pub fn cubic_ode(vf: &VectorField) -> Result<CubicODE> {
    if vf.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: vf.dim(),
        });
    }
    let syms = vf.symbols().clone();
    let p = vf.component(0).clone();
    let q = vf.component(1).clone();
    let px = p.differentiate(0);
    let py = p.differentiate(1);
    let qx = q.differentiate(0);
    let qy = q.differentiate(1);
    let x = RationalExpr::var(&syms, 0);
    let y = RationalExpr::var(&syms, 1);
    let x2 = x.mul(&x);
    let y2 = y.mul(&y);
    let two = RationalExpr::from_int(&syms, 2);

    let den = y2.mul(&p).sub(&y.mul(&p)).add(&q.mul(&x2)).sub(&q.mul(&x));

    let n3 = py.mul(&x2).sub(&py.mul(&x));
    let n2 = px
        .sub(&qy)
        .mul(&x2)
        .add(&qy.sub(&px).sub(&two.mul(&p)).mul(&x))
        .add(&py.mul(&y2))
        .add(&two.mul(&p).add(&py).neg().mul(&y))
        .add(&two.mul(&p));
    let n1 = qx
        .neg()
        .mul(&x2)
        .add(&qx.add(&two.mul(&q)).mul(&x))
        .add(&px.sub(&qy).mul(&y2))
        .add(&two.mul(&q).sub(&px).add(&qy).mul(&y))
        .sub(&two.mul(&q));
    let n0 = qx.neg().mul(&y2).add(&qx.mul(&y));

    // the field proportional to (x(x-1), -y(y-1)) makes every term vanish;
    // a zero denominator with surviving numerators is a genuine degeneracy
    if den.is_zero() && [&n3, &n2, &n1, &n0].iter().any(|c| !c.is_zero()) {
        return Err(Error::Degenerate(
            "the slope-equation denominator vanishes identically".into(),
        ));
    }

    Ok(CubicODE {
        syms,
        num: [n3, n2, n1, n0],
        den,
    })
}

impl CubicODE {
    pub fn symbols(&self) -> &Symbols {
        &self.syms
    }

    /// Cleared numerator of the equation with y' = m/n and the induced
    /// y'' = (d_x + (m/n) d_y)(m/n) substituted.
    pub fn residual(&self, m: &RationalExpr, n: &RationalExpr) -> Result<RationalExpr> {
        if n.is_zero() {
            return Err(Error::ZeroComponent(1));
        }
        let w = m.div(n)?.on_symbols(&self.syms)?;
        let wpp = w.differentiate(0).add(&w.differentiate(1).mul(&w));
        let mut acc = wpp.mul(&self.den);
        let mut pw = RationalExpr::one(&self.syms);
        for i in (0..4).rev() {
            acc = acc.add(&self.num[i].mul(&pw));
            pw = pw.mul(&w);
        }
        Ok(RationalExpr::from_poly(acc.numerator().clone()))
    }
}

/// Returns true when y' = m/n solves the equation identically.
pub fn verify_particular_integral(
    ode: &CubicODE,
    m: &RationalExpr,
    n: &RationalExpr,
) -> Result<bool> {
    Ok(ode.residual(m, n)?.is_zero())
}

/// Returns true when y' = m/n solves the equation along the curve F = 0,
/// i.e. the cleared residual is exactly divisible by F. Slopes obtained by
/// differentiating an invariant curve are solutions in this weaker sense.
pub fn verify_integral_on_curve(
    ode: &CubicODE,
    m: &RationalExpr,
    n: &RationalExpr,
    f: &RationalExpr,
) -> Result<bool> {
    if !f.is_polynomial() {
        return Err(Error::Input("the curve must be a polynomial".into()));
    }
    let r = ode.residual(m, n)?;
    if r.is_zero() {
        return Ok(true);
    }
    let f = f.on_symbols(r.symbols())?;
    Ok(r.numerator().div_exact(f.numerator()).is_some())
}

/// Polynomial in the family parameter; coeffs[k] multiplies var^k.
#[derive(Debug, Clone)]
pub struct CPolynomial {
    pub var: String,
    pub coeffs: Vec<RationalExpr>,
}

impl CPolynomial {
    fn trim(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> RationalExpr {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| RationalExpr::zero(self.coeffs[0].symbols()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn to_display(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let head = format!("({c})");
            parts.push(match k {
                0 => head,
                1 => format!("{head}*{}", self.var),
                _ => format!("{head}*{}^{k}", self.var),
            });
        }
        parts.join(" + ")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                map.insert(k.to_string(), c.to_string().into());
            }
        }
        serde_json::json!({ "var": self.var, "coefficients": map })
    }
}

/// Collect a polynomial expression by powers of one symbol.
fn collect_by(expr: &RationalExpr, var: &str) -> Result<CPolynomial> {
    if !expr.is_polynomial() {
        return Err(Error::Input(format!(
            "expected a polynomial when collecting by `{var}`"
        )));
    }
    let syms = expr.symbols();
    let idx = syms
        .index_of(var)
        .ok_or_else(|| Error::Input(format!("symbol `{var}` not present")))?;
    let coeffs = expr
        .numerator()
        .coefficients_of(idx)
        .into_iter()
        .map(RationalExpr::from_poly)
        .collect();
    Ok(CPolynomial {
        var: var.to_string(),
        coeffs,
    }
    .trim())
}

fn with_symbol(syms: &Symbols, name: &str) -> Result<Symbols> {
    if syms.index_of(name).is_some() {
        return Err(Error::Input(format!(
            "symbol `{name}` collides with a declared symbol"
        )));
    }
    let mut names = syms.names().to_vec();
    names.push(name.to_string());
    Ok(Symbols::new(names))
}

/// The two stages of the family substitution: the (x, y) stage keeps y
/// symbolic after inserting the family's slope and curvature; the x
/// stage additionally substitutes y itself.
#[derive(Debug, Clone)]
pub struct FamilySubstitution {
    pub stage_xy: CPolynomial,
    pub stage_x: CPolynomial,
    syms: Symbols,
}

/// Substitute the solution family y = C(x-1)/(x-C) into the equation:
/// insert y' = C(1-C)/(x-C)^2 and y'' = -2C(1-C)/(x-C)^3, clear the
/// (x-C)^6 denominator and divide out the family polynomial
/// x y - C(x + y - 1) exactly, giving a degree-5 polynomial in C over
/// (x, y); then substitute y itself for the degree-6 polynomial over x.
pub fn substitute_family(ode: &CubicODE) -> Result<FamilySubstitution> {
    let syms = with_symbol(&ode.syms, "C")?;
    let yp = parse_on("C*(1 - C)/(x - C)^2", &syms)?;
    let ypp = parse_on("-2*C*(1 - C)/(x - C)^3", &syms)?;

    let mut acc = ypp.mul(&ode.den.on_symbols(&syms)?);
    let mut pw = RationalExpr::one(&syms);
    for i in (0..4).rev() {
        acc = acc.add(&ode.num[i].on_symbols(&syms)?.mul(&pw));
        pw = pw.mul(&yp);
    }
    let cleared = acc.numerator().clone();
    let fam = parse_on("x*y - C*(x + y - 1)", &syms)?;
    let e26 = match cleared.div_exact(fam.numerator()) {
        Some(q) => RationalExpr::from_poly(q),
        None => {
            return Err(Error::Degenerate(
                "family polynomial does not divide the cleared substitution".into(),
            ))
        }
    };
    let stage_xy = collect_by(&e26, "C")?;

    let yfam = parse_on("C*(x - 1)/(x - C)", &syms)?;
    let mut bind = BTreeMap::new();
    bind.insert("y".to_string(), yfam);
    let cx = parse_on("C - x", &syms)?;
    let subst = e26.substitute(&bind)?.mul(&cx);
    let stage_x = collect_by(&RationalExpr::from_poly(subst.numerator().clone()), "C")?;

    Ok(FamilySubstitution {
        stage_xy,
        stage_x,
        syms,
    })
}

fn substitute_cpoly(
    cp: &CPolynomial,
    syms: &Symbols,
    bind: &BTreeMap<String, RationalExpr>,
) -> Result<RationalExpr> {
    let cvar = RationalExpr::var_named(syms, &cp.var)?;
    let mut acc = RationalExpr::zero(syms);
    let mut pw = RationalExpr::one(syms);
    for c in &cp.coeffs {
        acc = acc.add(&c.on_symbols(syms)?.substitute(bind)?.mul(&pw));
        pw = pw.mul(&cvar);
    }
    Ok(acc)
}

/// Strip the maximal powers of var and (var - 1) dividing the condition.
fn strip_degenerate_roots(cp: CPolynomial, syms: &Symbols) -> Result<CPolynomial> {
    let mut coeffs = cp.coeffs;
    while coeffs.len() > 1 && coeffs[0].is_zero() {
        coeffs.remove(0);
    }
    // synthetic division by (var - 1) while 1 is a root
    loop {
        if coeffs.len() <= 1 {
            break;
        }
        let mut total = RationalExpr::zero(syms);
        for c in &coeffs {
            total = total.add(c);
        }
        if !total.is_zero() {
            break;
        }
        let mut q = vec![RationalExpr::zero(syms); coeffs.len() - 1];
        let mut carry = RationalExpr::zero(syms);
        for k in (1..coeffs.len()).rev() {
            carry = carry.add(&coeffs[k]);
            q[k - 1] = carry.clone();
        }
        coeffs = q;
    }
    Ok(CPolynomial {
        var: cp.var,
        coeffs,
    }
    .trim())
}

/// The five boundary conditions on C: the x = 0 and x = 1 faces of the
/// x stage, the (x = C, y = 1 - C) corner of the (x, y) stage, and the
/// two inverted-parameter conditions from (y = 1 - x, C = 1/C1) at
/// x = 1 and x = 0. Degenerate root factors C^k, (C-1)^k are stripped.
pub fn boundary_conditions(fam: &FamilySubstitution) -> Result<Vec<CPolynomial>> {
    let syms = &fam.syms;
    let zero = RationalExpr::zero(syms);
    let one = RationalExpr::one(syms);
    let cvar = RationalExpr::var_named(syms, "C")?;

    let mut out = Vec::with_capacity(5);

    // x = 0 and x = 1 in the x stage
    for xv in [&zero, &one] {
        let mut bind = BTreeMap::new();
        bind.insert("x".to_string(), xv.clone());
        let e = substitute_cpoly(&fam.stage_x, syms, &bind)?;
        out.push(strip_degenerate_roots(collect_by(&e, "C")?, syms)?);
    }

    // (x = C, y = 1 - C) in the (x, y) stage
    {
        let mut bind = BTreeMap::new();
        bind.insert("x".to_string(), cvar.clone());
        bind.insert("y".to_string(), one.sub(&cvar));
        let e = substitute_cpoly(&fam.stage_xy, syms, &bind)?;
        out.push(strip_degenerate_roots(collect_by(&e, "C")?, syms)?);
    }

    // (y = 1 - x, C = 1/C1) at x = 1 and x = 0: specialize, then invert
    // the parameter by reversing the coefficient list
    for xv in [&one, &zero] {
        let x = RationalExpr::var_named(syms, "x")?;
        let mut bind = BTreeMap::new();
        bind.insert("y".to_string(), one.sub(&x));
        let e = substitute_cpoly(&fam.stage_xy, syms, &bind)?;
        let mut bind2 = BTreeMap::new();
        bind2.insert("x".to_string(), xv.clone());
        let e = e.substitute(&bind2)?;
        let cp = collect_by(&e, "C")?;
        let deg = fam.stage_xy.degree();
        let mut rev = vec![RationalExpr::zero(syms); deg + 1];
        for (k, c) in cp.coeffs.iter().enumerate() {
            rev[deg - k] = c.clone();
        }
        let inverted = CPolynomial {
            var: "C1".to_string(),
            coeffs: rev,
        }
        .trim();
        out.push(strip_degenerate_roots(inverted, syms)?);
    }

    Ok(out)
}

/// Exact residue of a rational function of `var` at `var = at`: shift by
/// a fresh series variable, invert the regular denominator part as a
/// truncated series and read the degree-(k-1) coefficient. Pole orders
/// above 3 are rejected.
fn residue_at(expr: &RationalExpr, var: &str, at: &RationalExpr) -> Result<RationalExpr> {
    let syms = with_symbol(expr.symbols(), "@t")?;
    let t = RationalExpr::var_named(&syms, "@t")?;
    let mut bind = BTreeMap::new();
    bind.insert(var.to_string(), at.on_symbols(&syms)?.add(&t));
    let shifted = expr.on_symbols(&syms)?.substitute(&bind)?;

    let tidx = syms.index_of("@t").unwrap();
    let den = shifted.denominator().coefficients_of(tidx);
    let k = den.iter().take_while(|c| c.is_zero()).count();
    if k == 0 {
        return Ok(RationalExpr::zero(expr.symbols()));
    }
    if k > 3 {
        return Err(Error::PoleOrder(k as u32));
    }
    let u: Vec<RationalExpr> = den[k..]
        .iter()
        .map(|p| RationalExpr::from_poly(p.clone()))
        .collect();
    let num: Vec<RationalExpr> = shifted
        .numerator()
        .coefficients_of(tidx)
        .into_iter()
        .map(RationalExpr::from_poly)
        .collect();

    // inverse series of u up to order k-1
    let mut inv = vec![u[0].inv()?];
    for m in 1..k {
        let mut s = RationalExpr::zero(&syms);
        for j in 1..=m {
            if j < u.len() {
                s = s.add(&u[j].mul(&inv[m - j]));
            }
        }
        inv.push(s.neg().mul(&inv[0]));
    }
    let mut res = RationalExpr::zero(&syms);
    for (m, inv_c) in inv.iter().enumerate().take(k) {
        if k - 1 - m < num.len() {
            res = res.add(&num[k - 1 - m].mul(inv_c));
        }
    }
    // the series variable no longer occurs; project back by name, mapping
    // the spent slot anywhere
    debug_assert!(!res.numerator().uses_var(tidx) && !res.denominator().uses_var(tidx));
    let map: Vec<usize> = syms
        .names()
        .iter()
        .map(|n| expr.symbols().index_of(n).unwrap_or(0))
        .collect();
    Ok(res.remap(expr.symbols(), &map))
}

/// The closed-curve residue conditions: residues of
/// (x-C)^2 [x(x-1)Q + y(y-1)P] / (x^3 (x-1)^3) with y = C(x-1)/(x-C)
/// at the points x = 0, 1, C, each cleared to a polynomial in C.
pub fn residue_conditions(sys: &QuadraticSystem) -> Result<Vec<CPolynomial>> {
    let syms = with_symbol(&sys.syms, "C")?;
    let p = sys.denominator().on_symbols(&syms)?;
    let q = sys.numerator().on_symbols(&syms)?;
    let x = RationalExpr::var_named(&syms, "x")?;
    let y = RationalExpr::var_named(&syms, "y")?;
    let one = RationalExpr::one(&syms);
    let bracket = x
        .mul(&x.sub(&one))
        .mul(&q)
        .add(&y.mul(&y.sub(&one)).mul(&p));
    let shell = parse_on("(x - C)^2/(x^3*(x - 1)^3)", &syms)?;
    let integrand = shell.mul(&bracket);
    let yfam = parse_on("C*(x - 1)/(x - C)", &syms)?;
    let mut bind = BTreeMap::new();
    bind.insert("y".to_string(), yfam);
    let g = integrand.substitute(&bind)?;

    let cvar = RationalExpr::var_named(&syms, "C")?;
    let zero = RationalExpr::zero(&syms);
    let mut out = Vec::with_capacity(3);
    for at in [&zero, &one, &cvar] {
        let r = residue_at(&g, "x", at)?;
        let cleared = RationalExpr::from_poly(r.numerator().clone());
        out.push(collect_by(&cleared, "C")?);
    }
    Ok(out)
}

/// Check that F is an invariant curve of the field: F_x P + F_y Q (+
/// F_z R) must be divisible by F; returns the flag and the cofactor.
pub fn invariant_curve_check(
    f: &RationalExpr,
    vf: &VectorField,
) -> Result<(bool, RationalExpr)> {
    if !f.is_polynomial() {
        return Err(Error::Input("invariant curve candidate must be a polynomial".into()));
    }
    let f = f.on_symbols(vf.symbols())?;
    let mut lie = RationalExpr::zero(vf.symbols());
    for i in 0..vf.dim() {
        lie = lie.add(&f.differentiate(i).mul(vf.component(i)));
    }
    let cof = lie.div(&f)?;
    Ok((cof.is_polynomial(), cof))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(s: &str, syms: &Symbols) -> RationalExpr {
        parse_on(s, syms).unwrap()
    }

    fn system(a: [&str; 6], b: [&str; 6]) -> QuadraticSystem {
        let syms = Symbols::new(["x", "y", "a"]);
        let a = a.map(|s| expr(s, &syms));
        let b = b.map(|s| expr(s, &syms));
        QuadraticSystem::new(&syms, a, b).unwrap()
    }

    fn first_example() -> QuadraticSystem {
        system(
            ["8-3*a", "-14*a", "0", "0", "-2*a", "-8"],
            ["2", "4", "0", "-4*a", "12", "0"],
        )
    }

    fn second_example() -> QuadraticSystem {
        system(
            ["0", "1", "2", "0", "4", "2+3*a"],
            ["0", "5", "0", "6", "4+4*a", "a"],
        )
    }

    fn third_example() -> QuadraticSystem {
        system(
            ["0", "0", "15+15*a", "3*a+3*a^2", "-18-10*a", "16"],
            ["0", "6+6*a", "2", "-12-6*a", "12", "0"],
        )
    }

    // asserts equality up to the shared-denominator scaling: the slope
    // equation is only defined up to a common factor
    fn assert_proportional(ode: &CubicODE, disp_num: [&str; 4], disp_den: &str) {
        let syms = ode.symbols();
        let dd = expr(disp_den, syms);
        for (i, d) in disp_num.iter().enumerate() {
            let d = expr(d, syms);
            let lhs = ode.num[i].mul(&dd);
            let rhs = d.mul(&ode.den);
            assert!(lhs.sub(&rhs).is_zero(), "coefficient {i} mismatch");
        }
    }

    #[test]
    fn coefficients_round_trip_through_the_field() {
        let sys = first_example();
        let vf = sys.vector_field().unwrap();
        let back = QuadraticSystem::from_field(&vf).unwrap();
        assert!(back.numerator().sub(&sys.numerator()).is_zero());
        assert!(back.denominator().sub(&sys.denominator()).is_zero());
        let cubic = VectorField::new(&["x", "y"], &[], &["x^3", "y"]).unwrap();
        assert!(matches!(
            QuadraticSystem::from_field(&cubic),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn base_family_system_substitutes_to_zero() {
        let sys = system(
            ["0", "0", "1", "0", "0", "-1"],
            ["0", "-1", "0", "1", "0", "0"],
        );
        let ode = cubic_ode(&sys.vector_field().unwrap()).unwrap();
        assert!(ode.den.is_zero());
        assert!(ode.num.iter().all(|c| c.is_zero()));
        let fam = substitute_family(&ode).unwrap();
        assert!(fam.stage_xy.is_zero());
        assert!(fam.stage_x.is_zero());
    }

    #[test]
    fn slope_equation_matches_first_example() {
        let ode = cubic_ode(&first_example().vector_field().unwrap()).unwrap();
        assert_proportional(
            &ode,
            [
                "-12*x^3+12*x^2",
                "-4*y*x^2-4+4*x^2+2*a*x^2+24*y*x-8*a*x^2*y-2*a*x^3+12*y^2*x+4*y",
                "-12*y^3+(10*a*x+16*x+8)*y^2+(6*a+20*a*x+2*a*x^2-12)*y+16-8*a*x+14*a*x^2-6*a-16*x",
                "14*a*y-12*a*y^2-2*a*y^3",
            ],
            "-12*y^3*x+(-2+4*a*x^2+8*x^2)*y^2+(2*a*x^3+2-6*a*x^2+4*x)*y-3*a*x-8*x^2+8*x-11*a*x^2+14*a*x^3",
        );
    }

    #[test]
    fn slope_equation_matches_second_example() {
        let ode = cubic_ode(&second_example().vector_field().unwrap()).unwrap();
        assert_proportional(
            &ode,
            [
                "2*x^2*a*y-4*x^2*a-2*x*a*y+4*x^3*a+4*x^3-4*x^2",
                "-6*x*y-20*y*x^2-6*x*y^2*a-3*x^2-10*x^2*a*y-4*y^2*x-4*x^3+7*x+6*x*a*y",
                "6*x*y^2*a-4*a*y^2-7*y+3*y^2+20*y^2*x-x+x^2+4*y^3-6*x*y+4*y*x^2+4*a*y^3",
                "y+3*y^2-4*y^3",
            ],
            "y^4*a+(-a+4*x+4*x*a)*y^3+(-7*x*a-x+3*x^2*a+8*x^2)*y^2+(-8*x^2-7*x+4*x^3)*y-x^2+x^3",
        );
    }

    #[test]
    fn slope_equation_matches_third_example() {
        let ode = cubic_ode(&third_example().vector_field().unwrap()).unwrap();
        assert_proportional(
            &ode,
            [
                "-2*x+12*x^3-10*x^2",
                "16*x*y-20*y*x^2+18*x^3-39*x^2-2*y^2-12*y^2*x+21*x-12*y*x*a+10*x^3*a-31*a*x^2+12*y*x^2*a+21*x*a+2*y",
                "6*y*x^2*a^2-18*y*x^2-21*y+21*y^2*a-10*y^2*x+12*y^3-21*y*a-22*y^2*x*a+9*y^2-4*y*x^2*a+54*x*y+42*y*x*a",
                "18*y^3-18*y^2+6*x*a^2*y-10*y^2*a-6*x*a^2*y^2+10*y^3*a-6*y^2*x*a+6*y*x*a",
            ],
            "(2+12*x)*y^3+(-22*x+4*x^2-2-6*a*x^2+6*x*a)*y^2+(-10*x^3*a-18*x^3+31*a*x^2-21*x*a+45*x^2-21*x)*y-3*x^3*a-3*x^3*a^2+3*x^4*a+3*x^4*a^2",
        );
    }

    #[test]
    fn particular_integrals_of_first_example() {
        let sys = first_example();
        let ode = cubic_ode(&sys.vector_field().unwrap()).unwrap();
        let syms = ode.symbols().clone();
        let cases = [
            ("8-3*a-14*a*x-2*a*x*y-8*y^2", "2+4*x-4*a*x^2+12*x*y"),
            ("-y*(y-1)", "x*(x-1)"),
        ];
        for (m, n) in cases {
            let ok =
                verify_particular_integral(&ode, &expr(m, &syms), &expr(n, &syms)).unwrap();
            assert!(ok, "integral {m}/{n} should solve the slope equation");
        }
        // the slope from differentiating the invariant curve solves the
        // equation along that curve, not identically
        let m = expr("2*x-3*a*x^2-1-y-2*x*y^2", &syms);
        let n = expr("x+2*x^2*y", &syms);
        assert!(!verify_particular_integral(&ode, &m, &n).unwrap());
        let curve = expr("1/4+x-x^2+a*x^3+x*y+x^2*y^2", &syms);
        assert!(verify_integral_on_curve(&ode, &m, &n, &curve).unwrap());
        let bad =
            verify_particular_integral(&ode, &expr("x", &syms), &expr("y", &syms)).unwrap();
        assert!(!bad);
    }

    #[test]
    fn particular_integrals_of_second_example() {
        let sys = second_example();
        let ode = cubic_ode(&sys.vector_field().unwrap()).unwrap();
        let syms = ode.symbols().clone();
        let ok = verify_particular_integral(
            &ode,
            &expr("x+2*y+4*x*y+(2+3*a)*y^2", &syms),
            &expr("5*x+6*x^2+4*(1+a)*x*y+a*y^2", &syms),
        )
        .unwrap();
        assert!(ok);
        let curve = expr("x^2+x^3+x^2*y+2*a*x*y^2+2*a*x*y^3+a^2*y^4", &syms);
        let ok = verify_integral_on_curve(
            &ode,
            &expr("-(2*x+3*x^2+2*x*y+2*a*y^2+2*a*y^3)", &syms),
            &expr("x^2+4*a*x*y+6*a*x*y^2+4*a^2*y^3", &syms),
            &curve,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn invariant_curves_of_the_examples() {
        let vf1 = first_example().vector_field().unwrap();
        let f1 = expr("1/4+x-x^2+a*x^3+x*y+x^2*y^2", vf1.symbols());
        let (ok, _) = invariant_curve_check(&f1, &vf1).unwrap();
        assert!(ok);
        let neg = expr("1+x", vf1.symbols());
        let (ok, _) = invariant_curve_check(&neg, &vf1).unwrap();
        assert!(!ok);

        let vf2 = second_example().vector_field().unwrap();
        let f2 = expr(
            "x^2+x^3+x^2*y+2*a*x*y^2+2*a*x*y^3+a^2*y^4",
            vf2.symbols(),
        );
        let (ok, _) = invariant_curve_check(&f2, &vf2).unwrap();
        assert!(ok);
    }

    #[test]
    fn generic_family_substitution_edge_coefficients() {
        let fam = substitute_family(
            &cubic_ode(&QuadraticSystem::generic().vector_field().unwrap()).unwrap(),
        )
        .unwrap();
        let syms = &fam.syms;
        assert_eq!(fam.stage_xy.degree(), 5);
        assert_eq!(fam.stage_x.degree(), 6);
        let alpha = expr(
            "(a12+b12)*y^2+(b1+b2+(2*a22+2*a11+2*b22+2*b11)*x+a2+a1)*y+(a12+b12)*x^2+(a1+b2+b1+a2)*x+2*a0+2*b0",
            syms,
        );
        assert!(fam.stage_xy.coeff(5).sub(&alpha).is_zero(), "leading coefficient");
        let mu = expr(
            "-y^2*x^5*a12+(-2*x^6*a11+(a12-a1)*x^5)*y+2*x^6*a11+x^5*a1",
            syms,
        );
        assert!(fam.stage_xy.coeff(0).sub(&mu).is_zero(), "trailing coefficient");
        let a_of_x = expr(
            "(2*b12-2*b22-2*b11+2*a12-2*a22-2*a11)*x^2+(2*b22-2*b12-2*a12+2*a11+2*a22+2*b11)*x+a2+a12+b1+b12+b2+2*a0+a1+2*b0",
            syms,
        );
        assert!(fam.stage_x.coeff(6).sub(&a_of_x).is_zero(), "x-stage leading");
        let l_of_x = expr("-2*x^7*a11-x^6*a1", syms);
        assert!(fam.stage_x.coeff(0).sub(&l_of_x).is_zero(), "x-stage trailing");
    }

    #[test]
    fn boundary_conditions_match_displayed_forms() {
        let fam = substitute_family(
            &cubic_ode(&QuadraticSystem::generic().vector_field().unwrap()).unwrap(),
        )
        .unwrap();
        let conds = boundary_conditions(&fam).unwrap();
        let syms = &fam.syms;
        let expected: [&[&str]; 5] = [
            &[
                "-b2-2*b22",
                "-2*b0-2*a0-b1-a2-b12+2*b22",
                "a2+a12+b1+b12+b2+2*a0+a1+2*b0",
            ],
            &[
                "-2*a11-a1",
                "2*a11-2*b0-b1-2*a0-a12-a2",
                "a2+a12+b1+b12+b2+2*a0+a1+2*b0",
            ],
            &["2*b22+b2", "b12-2*b22"],
            &[
                "-a1-a2-a12-2*b0-b12-b1-b2-2*a0",
                "a12-2*a11+b1+a2+2*a0+2*b0",
                "a1+2*a11",
            ],
            &[
                "a1+a2+a12+2*b0+b12+b1+b2+2*a0",
                "-2*b0-b12-b1-a2-2*a0+2*b22",
                "-2*b22-b2",
            ],
        ];
        for (c, exp) in conds.iter().zip(expected) {
            assert_eq!(c.coeffs.len(), exp.len(), "degree of condition in {}", c.var);
            for (k, e) in exp.iter().enumerate() {
                assert!(
                    c.coeff(k).sub(&expr(e, syms)).is_zero(),
                    "coefficient {k} of the condition in {}",
                    c.var
                );
            }
        }
    }

    #[test]
    fn residue_of_simple_rational_functions() {
        let syms = Symbols::new(["x", "C"]);
        let f = expr("(x^2+C)/(x^3*(x-1))", &syms);
        let r0 = residue_at(&f, "x", &RationalExpr::zero(&syms)).unwrap();
        assert!(r0.sub(&expr("-1-C", &syms)).is_zero());
        let r1 = residue_at(&f, "x", &RationalExpr::one(&syms)).unwrap();
        assert!(r1.sub(&expr("1+C", &syms)).is_zero());
        let smooth = residue_at(&expr("x^2+C", &syms), "x", &RationalExpr::zero(&syms)).unwrap();
        assert!(smooth.is_zero());
        let deep = expr("1/x^4", &syms);
        assert!(matches!(
            residue_at(&deep, "x", &RationalExpr::zero(&syms)),
            Err(Error::PoleOrder(4))
        ));
    }

    #[test]
    fn residue_conditions_follow_from_boundary_conditions() {
        let sys = QuadraticSystem::generic();
        let fam = substitute_family(&cubic_ode(&sys.vector_field().unwrap()).unwrap()).unwrap();
        let conds = boundary_conditions(&fam).unwrap();
        let residues = residue_conditions(&sys).unwrap();
        let syms = &fam.syms;

        // pin ten of the twelve coefficients, get C from the corner
        // condition, then solve the two face conditions for a0 and a11
        let mut bind: BTreeMap<String, RationalExpr> = BTreeMap::new();
        for (name, val) in [
            ("b0", "1"),
            ("b1", "2"),
            ("b2", "3"),
            ("b11", "1"),
            ("b12", "5"),
            ("b22", "1"),
            ("a1", "1"),
            ("a2", "2"),
            ("a12", "1"),
            ("a22", "1"),
        ] {
            bind.insert(name.to_string(), expr(val, syms));
        }
        let eval = |cp: &CPolynomial, bind: &BTreeMap<String, RationalExpr>, c: &RationalExpr| {
            let mut acc = RationalExpr::zero(syms);
            let mut pw = RationalExpr::one(syms);
            for coeff in &cp.coeffs {
                acc = acc.add(
                    &coeff
                        .on_symbols(syms)
                        .unwrap()
                        .substitute(bind)
                        .unwrap()
                        .mul(&pw),
                );
                pw = pw.mul(c);
            }
            acc
        };
        // corner condition is linear in C: (b12 - 2 b22) C + 2 b22 + b2 = 3C + 5
        let lin = &conds[2];
        let c_star = eval(&CPolynomial { var: "C".into(), coeffs: vec![lin.coeff(0)] }, &bind, &RationalExpr::zero(syms))
            .neg()
            .div(&eval(&CPolynomial { var: "C".into(), coeffs: vec![lin.coeff(1)] }, &bind, &RationalExpr::zero(syms)))
            .unwrap();

        let solve_linear = |cp: &CPolynomial, unknown: &str, bind: &BTreeMap<String, RationalExpr>| {
            let mut b0 = bind.clone();
            b0.insert(unknown.to_string(), RationalExpr::zero(syms));
            let mut b1 = bind.clone();
            b1.insert(unknown.to_string(), RationalExpr::one(syms));
            let u = eval(cp, &b0, &c_star);
            let v = eval(cp, &b1, &c_star).sub(&u);
            u.neg().div(&v).unwrap()
        };
        let a0 = solve_linear(&conds[0], "a0", &bind);
        bind.insert("a0".to_string(), a0);
        let a11 = solve_linear(&conds[1], "a11", &bind);
        bind.insert("a11".to_string(), a11);

        for (i, cond) in conds.iter().take(3).enumerate() {
            assert!(eval(cond, &bind, &c_star).is_zero(), "boundary condition {i}");
        }
        for (i, r) in residues.iter().enumerate() {
            assert!(eval(r, &bind, &c_star).is_zero(), "residue condition {i}");
        }
    }
}
