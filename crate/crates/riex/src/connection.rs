//! Affine connections attached to first-order systems: the direct and
//! log-form constructions for planar fields, the linear Killing-type
//! solver over covector integrals, the planar limit-cycle connection,
//! the spatial connection, the normalized three-dimensional connection
//! and the projectivization of a planar field to a Pfaff form.

use crate::linsolve::{self, Solution};
use crate::symexpr::{parse_on, MultiPoly, RationalExpr, Symbols};
use crate::{Error, Result};

/// First-order system dx^i/ds = P^i(x), with variables listed before
/// parameters in the symbol table.
#[derive(Debug, Clone)]
pub struct VectorField {
    syms: Symbols,
    dim: usize,
    comps: Vec<RationalExpr>,
}

impl VectorField {
    pub fn new(variables: &[&str], parameters: &[&str], components: &[&str]) -> Result<Self> {
        let syms = Symbols::new(
            variables
                .iter()
                .chain(parameters.iter())
                .map(|s| s.to_string()),
        );
        let comps = components
            .iter()
            .map(|c| parse_on(c, &syms))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if comps.len() != variables.len() {
            return Err(Error::Dimension {
                expected: variables.len(),
                got: comps.len(),
            });
        }
        Ok(VectorField {
            syms,
            dim: variables.len(),
            comps,
        })
    }

    pub fn from_components(dim: usize, syms: &Symbols, comps: Vec<RationalExpr>) -> Result<Self> {
        if comps.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: comps.len(),
            });
        }
        Ok(VectorField {
            syms: syms.clone(),
            dim,
            comps,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbols(&self) -> &Symbols {
        &self.syms
    }

    pub fn component(&self, i: usize) -> &RationalExpr {
        &self.comps[i]
    }

    pub fn components(&self) -> &[RationalExpr] {
        &self.comps
    }

    /// d(component i)/d(variable v).
    pub fn partial(&self, i: usize, v: usize) -> RationalExpr {
        self.comps[i].differentiate(v)
    }

    fn nonzero(&self, i: usize) -> Result<&RationalExpr> {
        if self.comps[i].is_zero() {
            return Err(Error::ZeroComponent(i));
        }
        Ok(&self.comps[i])
    }

    fn require_dim(&self, d: usize) -> Result<()> {
        if self.dim != d {
            return Err(Error::Dimension {
                expected: d,
                got: self.dim,
            });
        }
        Ok(())
    }
}

/// One-form a_i dx^i over the base variables.
#[derive(Debug, Clone)]
pub struct Covector {
    syms: Symbols,
    comps: Vec<RationalExpr>,
}

impl Covector {
    pub fn new(syms: &Symbols, comps: Vec<RationalExpr>) -> Self {
        Covector {
            syms: syms.clone(),
            comps,
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn symbols(&self) -> &Symbols {
        &self.syms
    }

    pub fn component(&self, i: usize) -> &RationalExpr {
        &self.comps[i]
    }

    pub fn components(&self) -> &[RationalExpr] {
        &self.comps
    }
}

fn pair_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row-major over the upper triangle
    i * dim - i * (i + 1) / 2 + j
}

/// Symmetric connection coefficients stored for i <= j.
#[derive(Debug, Clone)]
pub struct AffineConnection {
    dim: usize,
    syms: Symbols,
    gamma: Vec<RationalExpr>,
}

impl AffineConnection {
    pub fn zero(dim: usize, syms: &Symbols) -> Self {
        let pairs = dim * (dim + 1) / 2;
        AffineConnection {
            dim,
            syms: syms.clone(),
            gamma: vec![RationalExpr::zero(syms); dim * pairs],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbols(&self) -> &Symbols {
        &self.syms
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &RationalExpr {
        let pairs = self.dim * (self.dim + 1) / 2;
        &self.gamma[k * pairs + pair_index(self.dim, i, j)]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, e: RationalExpr) {
        let pairs = self.dim * (self.dim + 1) / 2;
        self.gamma[k * pairs + pair_index(self.dim, i, j)] = e;
    }

    /// Entries with i <= j, as ((k, i, j), expr), zero-based indices.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), &RationalExpr)> {
        let dim = self.dim;
        (0..dim).flat_map(move |k| {
            (0..dim).flat_map(move |i| (i..dim).map(move |j| ((k, i, j), self.get(k, i, j))))
        })
    }

    /// Map "k,i,j" (one-based, i <= j) to the canonical expression string.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for ((k, i, j), e) in self.entries() {
            map.insert(format!("{},{},{}", k + 1, i + 1, j + 1), e.to_string().into());
        }
        serde_json::Value::Object(map)
    }

    /// Rewrite every entry onto a superset symbol table.
    pub fn on_symbols(&self, syms: &Symbols) -> Result<AffineConnection> {
        let gamma = self
            .gamma
            .iter()
            .map(|e| e.on_symbols(syms))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(AffineConnection {
            dim: self.dim,
            syms: syms.clone(),
            gamma,
        })
    }
}

/// Direct planar connection: the second-order system obtained by
/// differentiating dx/ds = P, dy/ds = Q along the flow.
pub fn connection_direct(vf: &VectorField) -> Result<AffineConnection> {
    vf.require_dim(2)?;
    let p = vf.nonzero(0)?.clone();
    let q = vf.nonzero(1)?.clone();
    let mut conn = AffineConnection::zero(2, vf.symbols());
    let half = |e: RationalExpr| e.scale(&num::BigRational::new(1.into(), 2.into()));
    conn.set(0, 0, 0, p.differentiate(0).neg().div(&p)?);
    conn.set(0, 0, 1, half(p.differentiate(1).neg().div(&p)?));
    conn.set(1, 0, 1, half(q.differentiate(0).neg().div(&q)?));
    conn.set(1, 1, 1, q.differentiate(1).neg().div(&q)?);
    Ok(conn)
}

/// Log-form planar connection from K = ln(Q/P): only the two diagonal
/// entries K_x and -K_y survive.
pub fn connection_log(vf: &VectorField) -> Result<AffineConnection> {
    vf.require_dim(2)?;
    let p = vf.nonzero(0)?.clone();
    let q = vf.nonzero(1)?.clone();
    let kx = q.differentiate(0).div(&q)?.sub(&p.differentiate(0).div(&p)?);
    let ky = q.differentiate(1).div(&q)?.sub(&p.differentiate(1).div(&p)?);
    let mut conn = AffineConnection::zero(2, vf.symbols());
    conn.set(0, 0, 0, kx);
    conn.set(1, 1, 1, ky.neg());
    Ok(conn)
}

/// Result of a Killing-condition solve: the connection with free
/// unknowns pinned to zero, plus the rank report.
#[derive(Debug, Clone)]
pub struct ConnectionSolve {
    pub connection: AffineConnection,
    pub rank: usize,
    /// Unknowns (k, i, j) left free by the integrals, zero-based.
    pub free: Vec<(usize, usize, usize)>,
}

/// Extra linear constraints on the unknowns Gamma^k_{ij}: a list of
/// ((k, i, j), coefficient) terms summing to zero.
pub type LinearConstraint = Vec<((usize, usize, usize), i64)>;

/// Determine a symmetric connection from linear first integrals
/// a_i dx^i/ds = const of its geodesics: for every integral and every
/// index pair, a_k Gamma^k_{ij} = (d_i a_j + d_j a_i) / 2. Optional
/// homogeneous constraints (trace or gauge conditions) are appended.
pub fn solve_connection_from_integrals(
    integrals: &[Covector],
    dim: usize,
    syms: &Symbols,
    constraints: &[LinearConstraint],
) -> Result<ConnectionSolve> {
    let pairs = dim * (dim + 1) / 2;
    let unknowns = dim * pairs;
    let half = num::BigRational::new(1.into(), 2.into());
    let mut rows: Vec<Vec<RationalExpr>> = Vec::new();
    let mut rhs: Vec<RationalExpr> = Vec::new();
    for a in integrals {
        if a.dim() < dim {
            return Err(Error::Dimension {
                expected: dim,
                got: a.dim(),
            });
        }
        let comps: Vec<RationalExpr> = a.comps[..dim]
            .iter()
            .map(|e| e.on_symbols(syms))
            .collect::<std::result::Result<_, _>>()?;
        for i in 0..dim {
            for j in i..dim {
                let mut row = vec![RationalExpr::zero(syms); unknowns];
                for (k, ak) in comps.iter().enumerate() {
                    row[k * pairs + pair_index(dim, i, j)] = ak.clone();
                }
                rows.push(row);
                let b = comps[j]
                    .differentiate(i)
                    .add(&comps[i].differentiate(j))
                    .scale(&half);
                rhs.push(b);
            }
        }
    }
    for cons in constraints {
        let mut row = vec![RationalExpr::zero(syms); unknowns];
        for &((k, i, j), c) in cons {
            let slot = k * pairs + pair_index(dim, i, j);
            row[slot] = row[slot].add(&RationalExpr::from_int(syms, c));
        }
        rows.push(row);
        rhs.push(RationalExpr::zero(syms));
    }

    let (sol, rank, free_cols) = match linsolve::solve(&rows, &rhs, syms) {
        Solution::Unique(x) => {
            let n = x.len();
            (x, n, Vec::new())
        }
        Solution::Underdetermined { rank, free, pinned } => (pinned, rank, free),
        Solution::Inconsistent { equation } => return Err(Error::Inconsistent(equation)),
    };

    let mut connection = AffineConnection::zero(dim, syms);
    let mut col = 0usize;
    let mut free = Vec::new();
    for k in 0..dim {
        for i in 0..dim {
            for j in i..dim {
                connection.set(k, i, j, sol[col].clone());
                if free_cols.contains(&col) {
                    free.push((k, i, j));
                }
                col += 1;
            }
        }
    }
    Ok(ConnectionSolve {
        connection,
        rank,
        free,
    })
}

/// The common denominator of the planar limit-cycle connection:
/// y^2 P - y P + Q x^2 - Q x.
pub fn pl_denominator(vf: &VectorField) -> Result<RationalExpr> {
    vf.require_dim(2)?;
    let syms = vf.symbols();
    let x = RationalExpr::var(syms, 0);
    let y = RationalExpr::var(syms, 1);
    let p = vf.component(0);
    let q = vf.component(1);
    Ok(y.mul(&y.sub(&RationalExpr::one(syms)))
        .mul(p)
        .add(&x.mul(&x.sub(&RationalExpr::one(syms))).mul(q)))
}

/// Planar connection whose geodesics admit both Q dx - P dy and the
/// reference integral y(y-1) dx + x(x-1) dy.
pub fn connection_pl(vf: &VectorField) -> Result<AffineConnection> {
    vf.require_dim(2)?;
    if pl_denominator(vf)?.is_zero() {
        return Err(Error::Degenerate(
            "y^2*P - y*P + Q*x^2 - Q*x vanishes identically".into(),
        ));
    }
    let syms = vf.symbols();
    let x = RationalExpr::var(syms, 0);
    let y = RationalExpr::var(syms, 1);
    let one = RationalExpr::one(syms);
    let integrals = [
        Covector::new(syms, vec![vf.component(1).clone(), vf.component(0).neg()]),
        Covector::new(
            syms,
            vec![y.mul(&y.sub(&one)), x.mul(&x.sub(&one))],
        ),
    ];
    let solve = solve_connection_from_integrals(&integrals, 2, syms, &[])?;
    require_unique(solve)
}

fn require_unique(solve: ConnectionSolve) -> Result<AffineConnection> {
    if solve.free.is_empty() {
        Ok(solve.connection)
    } else {
        Err(Error::Underdetermined {
            rank: solve.rank,
            free: solve.free.len(),
        })
    }
}

/// Spatial connection: the orthogonal-trajectory form P dx + Q dy + R dz
/// plus the two reference integrals y(y-1) dx + x(x-1) dy and
/// z(z-1) dx + x(x-1) dz.
pub fn connection_spatial(vf: &VectorField) -> Result<AffineConnection> {
    vf.require_dim(3)?;
    let syms = vf.symbols();
    let x = RationalExpr::var(syms, 0);
    let y = RationalExpr::var(syms, 1);
    let z = RationalExpr::var(syms, 2);
    let one = RationalExpr::one(syms);
    let zero = RationalExpr::zero(syms);
    let xx = x.mul(&x.sub(&one));
    let integrals = [
        Covector::new(syms, vf.components().to_vec()),
        Covector::new(syms, vec![y.mul(&y.sub(&one)), xx.clone(), zero.clone()]),
        Covector::new(syms, vec![z.mul(&z.sub(&one)), zero, xx]),
    ];
    let solve = solve_connection_from_integrals(&integrals, 3, syms, &[])?;
    require_unique(solve)
}

/// The cross integrals Q dx - P dy and R dx - P dz of a spatial field.
pub fn cross_integrals(vf: &VectorField) -> Result<Vec<Covector>> {
    vf.require_dim(3)?;
    let syms = vf.symbols();
    let zero = RationalExpr::zero(syms);
    Ok(vec![
        Covector::new(
            syms,
            vec![vf.component(1).clone(), vf.component(0).neg(), zero.clone()],
        ),
        Covector::new(
            syms,
            vec![vf.component(2).clone(), zero, vf.component(0).neg()],
        ),
    ])
}

/// Spatial connection determined by the cross integrals together with
/// the radial form x dx + y dy + z dz.
pub fn connection_spatial_cross(vf: &VectorField) -> Result<AffineConnection> {
    vf.require_dim(3)?;
    let syms = vf.symbols();
    let mut integrals = cross_integrals(vf)?;
    integrals.push(Covector::new(
        syms,
        vec![
            RationalExpr::var(syms, 0),
            RationalExpr::var(syms, 1),
            RationalExpr::var(syms, 2),
        ],
    ));
    let solve = solve_connection_from_integrals(&integrals, 3, syms, &[])?;
    require_unique(solve)
}

/// Normalized spatial connection: the cross integrals plus the three
/// trace conditions and the six coordinate-normalization conditions.
pub fn connection_lorenz_normalized(vf: &VectorField) -> Result<AffineConnection> {
    vf.require_dim(3)?;
    for i in 0..3 {
        vf.nonzero(i)?;
    }
    let syms = vf.symbols();
    let integrals = cross_integrals(vf)?;
    let constraints: Vec<LinearConstraint> = vec![
        // traces: sum_k Gamma^k_{k i} = 0
        vec![((0, 0, 0), 1), ((1, 0, 1), 1), ((2, 0, 2), 1)],
        vec![((0, 0, 1), 1), ((1, 1, 1), 1), ((2, 1, 2), 1)],
        vec![((0, 0, 2), 1), ((1, 1, 2), 1), ((2, 2, 2), 1)],
        // coordinate normalization
        vec![((0, 0, 0), 1)],
        vec![((1, 1, 1), 1)],
        vec![((2, 2, 2), 1)],
        vec![((0, 0, 1), 1), ((2, 1, 2), 1)],
        vec![((1, 0, 1), 1), ((2, 0, 2), 1)],
        vec![((0, 0, 2), 1), ((1, 1, 2), 1)],
    ];
    let solve = solve_connection_from_integrals(&integrals, 3, syms, &constraints)?;
    require_unique(solve)
}

/// Residual of the integral condition for a covector against a
/// connection: (d_i a_j + d_j a_i)/2 - a_k Gamma^k_{ij} per pair.
pub fn killing_residual(a: &Covector, conn: &AffineConnection) -> Result<Vec<RationalExpr>> {
    let dim = conn.dim();
    let syms = conn.symbols();
    let half = num::BigRational::new(1.into(), 2.into());
    let comps: Vec<RationalExpr> = a.comps[..dim]
        .iter()
        .map(|e| e.on_symbols(syms))
        .collect::<std::result::Result<_, _>>()?;
    let mut out = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            let mut r = comps[j]
                .differentiate(i)
                .add(&comps[i].differentiate(j))
                .scale(&half);
            for (k, ak) in comps.iter().enumerate() {
                r = r.sub(&ak.mul(conn.get(k, i, j)));
            }
            out.push(r);
        }
    }
    Ok(out)
}

/// Projectivize a planar polynomial field: homogenize p, q to common
/// degree with the new variable z and return the Pfaff form
/// (-z Q, z P, x Q - y P).
pub fn projectivize(vf: &VectorField) -> Result<Covector> {
    vf.require_dim(2)?;
    for i in 0..2 {
        if !vf.component(i).is_polynomial() {
            return Err(Error::Input(format!(
                "component {i} is not polynomial; projectivization needs polynomial p, q"
            )));
        }
    }
    let syms = vf.symbols();
    // variables x, y, then z, then the parameters
    let mut names: Vec<String> = vec![
        syms.name(0).to_string(),
        syms.name(1).to_string(),
        "z".to_string(),
    ];
    for n in syms.names().iter().skip(2) {
        if n == "z" {
            return Err(Error::Input("symbol `z` already in use".into()));
        }
        names.push(n.clone());
    }
    let tsyms = Symbols::new(names);

    // joint degree in the two variables, parameters not counted
    let var_degree = |p: &MultiPoly| -> u32 {
        let mut d = 0u32;
        for (ex, cx) in p.to_univariate(0).iter().enumerate() {
            for (ey, cy) in cx.to_univariate(1).iter().enumerate() {
                if !cy.is_zero() {
                    d = d.max(ex as u32 + ey as u32);
                }
            }
        }
        d
    };
    let p = vf.component(0).numerator();
    let q = vf.component(1).numerator();
    let d = var_degree(p).max(var_degree(q)).max(1);

    let homogenize = |poly: &MultiPoly| -> RationalExpr {
        let mut acc = RationalExpr::zero(&tsyms);
        for (ex, cx) in poly.to_univariate(0).iter().enumerate() {
            for (ey, cy) in cx.to_univariate(1).iter().enumerate() {
                if cy.is_zero() {
                    continue;
                }
                // cy depends on parameters only
                let coeff = RationalExpr::from_poly(cy.clone()).on_symbols(&tsyms).unwrap();
                let x = RationalExpr::var(&tsyms, 0).pow(ex as u32);
                let y = RationalExpr::var(&tsyms, 1).pow(ey as u32);
                let z = RationalExpr::var(&tsyms, 2).pow(d - ex as u32 - ey as u32);
                acc = acc.add(&coeff.mul(&x).mul(&y).mul(&z));
            }
        }
        acc
    };
    // components carry the overall denominator 1 (polynomial input)
    let scale_p = vf.component(0).denominator().constant_value();
    let scale_q = vf.component(1).denominator().constant_value();
    let mut ph = homogenize(p);
    let mut qh = homogenize(q);
    if let Some(c) = scale_p {
        ph = ph.scale(&(num::BigRational::from_integer(1.into()) / c));
    }
    if let Some(c) = scale_q {
        qh = qh.scale(&(num::BigRational::from_integer(1.into()) / c));
    }
    let x = RationalExpr::var(&tsyms, 0);
    let y = RationalExpr::var(&tsyms, 1);
    let z = RationalExpr::var(&tsyms, 2);
    Ok(Covector::new(
        &tsyms,
        vec![
            z.mul(&qh).neg(),
            z.mul(&ph),
            x.mul(&qh).sub(&y.mul(&ph)),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_on;

    fn circle() -> VectorField {
        VectorField::new(&["x", "y"], &[], &["-y", "x"]).unwrap()
    }

    fn check(conn: &AffineConnection, k: usize, i: usize, j: usize, expect: &str) {
        let e = parse_on(expect, conn.symbols()).unwrap();
        assert!(
            conn.get(k, i, j).sub(&e).is_zero(),
            "entry ({},{},{}): got {}, expected {}",
            k + 1,
            i + 1,
            j + 1,
            conn.get(k, i, j),
            expect
        );
    }

    #[test]
    fn direct_circle() {
        let conn = connection_direct(&circle()).unwrap();
        check(&conn, 0, 0, 1, "-1/(2*y)");
        check(&conn, 1, 0, 1, "-1/(2*x)");
        check(&conn, 0, 0, 0, "0");
        check(&conn, 1, 1, 1, "0");
        check(&conn, 0, 1, 1, "0");
        check(&conn, 1, 0, 0, "0");
    }

    #[test]
    fn direct_constant_field_is_flat() {
        let vf = VectorField::new(&["x", "y"], &[], &["1", "1"]).unwrap();
        let conn = connection_direct(&vf).unwrap();
        assert!(conn.entries().all(|(_, e)| e.is_zero()));
    }

    #[test]
    fn direct_radial() {
        let vf = VectorField::new(&["x", "y"], &[], &["x", "y"]).unwrap();
        let conn = connection_direct(&vf).unwrap();
        check(&conn, 0, 0, 0, "-1/x");
        check(&conn, 1, 1, 1, "-1/y");
        check(&conn, 0, 0, 1, "0");
        check(&conn, 1, 0, 1, "0");
    }

    #[test]
    fn direct_rejects_zero_component() {
        let vf = VectorField::new(&["x", "y"], &[], &["0", "x"]).unwrap();
        assert!(matches!(
            connection_direct(&vf),
            Err(Error::ZeroComponent(0))
        ));
    }

    #[test]
    fn log_circle() {
        let conn = connection_log(&circle()).unwrap();
        check(&conn, 0, 0, 0, "1/x");
        check(&conn, 1, 1, 1, "1/y");
        check(&conn, 0, 0, 1, "0");
        check(&conn, 1, 0, 1, "0");
    }

    #[test]
    fn log_equal_components_flat() {
        let vf = VectorField::new(&["x", "y"], &[], &["x + y^2", "x + y^2"]).unwrap();
        let conn = connection_log(&vf).unwrap();
        assert!(conn.entries().all(|(_, e)| e.is_zero()));
    }

    #[test]
    fn log_one_and_x() {
        let vf = VectorField::new(&["x", "y"], &[], &["1", "x"]).unwrap();
        let conn = connection_log(&vf).unwrap();
        check(&conn, 0, 0, 0, "1/x");
        check(&conn, 1, 1, 1, "0");
    }

    fn generic_quadratic(syms: &Symbols, coeffs: [&str; 6]) -> RationalExpr {
        let [c0, cx, cy, cxx, cxy, cyy] = coeffs;
        parse_on(
            &format!("{c0} + {cx}*x + {cy}*y + {cxx}*x^2 + {cxy}*x*y + {cyy}*y^2"),
            syms,
        )
        .unwrap()
    }

    #[test]
    fn pl_solver_generic_first_entry() {
        let params = [
            "p0", "p1", "p2", "p11", "p12", "p22", "q0", "q1", "q2", "q11", "q12", "q22",
        ];
        let syms = Symbols::new(["x", "y"].iter().chain(params.iter()).copied());
        let p = generic_quadratic(&syms, ["p0", "p1", "p2", "p11", "p12", "p22"]);
        let q = generic_quadratic(&syms, ["q0", "q1", "q2", "q11", "q12", "q22"]);
        let vf = VectorField::from_components(2, &syms, vec![p.clone(), q.clone()]).unwrap();
        let conn = connection_pl(&vf).unwrap();

        let x = RationalExpr::var(&syms, 0);
        let y = RationalExpr::var(&syms, 1);
        let one = RationalExpr::one(&syms);
        let den = y
            .mul(&y.sub(&one))
            .mul(&p)
            .add(&x.mul(&x.sub(&one)).mul(&q));
        let expect = q
            .differentiate(0)
            .mul(&x)
            .mul(&x.sub(&one))
            .div(&den)
            .unwrap();
        assert!(conn.get(0, 0, 0).sub(&expect).is_zero());
    }

    #[test]
    fn solver_single_constant_integral() {
        let syms = Symbols::new(["x", "y"]);
        let a = Covector::new(
            &syms,
            vec![RationalExpr::one(&syms), RationalExpr::zero(&syms)],
        );
        let solve = solve_connection_from_integrals(&[a], 2, &syms, &[]).unwrap();
        // da = 0 pins the whole first row; the second row stays free
        for i in 0..2 {
            for j in i..2 {
                assert!(solve.connection.get(0, i, j).is_zero());
            }
        }
        assert_eq!(solve.rank, 3);
        assert_eq!(solve.free, vec![(1, 0, 0), (1, 0, 1), (1, 1, 1)]);
    }

    fn lorenz() -> VectorField {
        VectorField::new(
            &["x", "y", "z"],
            &["s", "r", "b"],
            &["s*(y - x)", "r*x - y - x*z", "x*y - b*z"],
        )
        .unwrap()
    }

    #[test]
    fn spatial_cross_lorenz_first_entry() {
        let vf = lorenz();
        let conn = connection_spatial_cross(&vf).unwrap();
        let syms = vf.symbols();
        let [p, q, r] = [vf.component(0), vf.component(1), vf.component(2)];
        let x = RationalExpr::var(syms, 0);
        let y = RationalExpr::var(syms, 1);
        let z = RationalExpr::var(syms, 2);
        // coefficient of (dx/ds)^2 in the x geodesic equation
        let expect = r
            .differentiate(0)
            .mul(&z)
            .add(p)
            .add(&y.mul(&q.differentiate(0)))
            .div(&y.mul(q).add(&r.mul(&z)).add(&p.mul(&x)))
            .unwrap();
        assert!(conn.get(0, 0, 0).sub(&expect).is_zero());
    }

    #[test]
    fn normalized_lorenz_entries() {
        let vf = lorenz();
        let conn = connection_lorenz_normalized(&vf).unwrap();
        check(&conn, 1, 0, 0, "-(r - z)/(s*(y - x))");
        check(&conn, 0, 2, 2, "0");
        let [p, q, r] = [vf.component(0), vf.component(1), vf.component(2)];
        // -1/4 (-Q P_y + R P_z + P R_z - 2 P P_x + P Q_y) / (P Q)
        let num = r
            .mul(&p.differentiate(2))
            .sub(&q.mul(&p.differentiate(1)))
            .add(&p.mul(&r.differentiate(2)))
            .sub(&p.mul(&p.differentiate(0)).scale(&num::BigRational::from_integer(2.into())))
            .add(&p.mul(&q.differentiate(1)));
        let expect = num
            .div(&p.mul(q))
            .unwrap()
            .scale(&num::BigRational::new((-1).into(), 4.into()));
        assert!(conn.get(2, 1, 2).sub(&expect).is_zero(), "got {}", conn.get(2, 1, 2));
        check(&conn, 0, 0, 0, "0");
        check(&conn, 1, 1, 1, "0");
        check(&conn, 2, 2, 2, "0");
    }

    #[test]
    fn normalized_lorenz_satisfies_cross_integrals() {
        let vf = lorenz();
        let conn = connection_lorenz_normalized(&vf).unwrap();
        for a in cross_integrals(&vf).unwrap() {
            for r in killing_residual(&a, &conn).unwrap() {
                assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn projectivize_quadratic_example() {
        let vf = VectorField::new(
            &["x", "y"],
            &["l", "d", "e"],
            &[
                "l*x - y - 10*x^2 + (5 + d)*x*y + y^2",
                "x + x^2 + (e - 25)*x*y",
            ],
        )
        .unwrap();
        let form = projectivize(&vf).unwrap();
        let syms = form.symbols().clone();
        let dx = parse_on("-z*x*y*e + 25*z*x*y - z^2*x - z*x^2", &syms).unwrap();
        assert!(form.component(0).sub(&dx).is_zero());
        // dz coefficient: x*q~ - y*p~
        let ph = parse_on("l*x*z - y*z - 10*x^2 + (5 + d)*x*y + y^2", &syms).unwrap();
        let qh = parse_on("x*z + x^2 + (e - 25)*x*y", &syms).unwrap();
        let x = RationalExpr::var(&syms, 0);
        let y = RationalExpr::var(&syms, 1);
        let z = RationalExpr::var(&syms, 2);
        assert!(form.component(1).sub(&z.mul(&ph)).is_zero());
        assert!(form
            .component(2)
            .sub(&x.mul(&qh).sub(&y.mul(&ph)))
            .is_zero());
    }

    #[test]
    fn projectivize_constants() {
        let vf = VectorField::new(&["x", "y"], &[], &["1", "0"]).unwrap();
        let form = projectivize(&vf).unwrap();
        let syms = form.symbols().clone();
        assert!(form.component(0).is_zero());
        assert!(form
            .component(1)
            .sub(&parse_on("z^2", &syms).unwrap())
            .is_zero());
        assert!(form
            .component(2)
            .sub(&parse_on("-y*z", &syms).unwrap())
            .is_zero());
    }

    #[test]
    fn projectivize_euler() {
        let vf = VectorField::new(&["x", "y"], &[], &["x", "y"]).unwrap();
        let form = projectivize(&vf).unwrap();
        let syms = form.symbols().clone();
        assert!(form
            .component(0)
            .sub(&parse_on("-z*y", &syms).unwrap())
            .is_zero());
        assert!(form
            .component(1)
            .sub(&parse_on("z*x", &syms).unwrap())
            .is_zero());
        assert!(form.component(2).is_zero());
    }

    #[test]
    fn pl_connection_solves_its_integrals() {
        let vf = VectorField::new(&["x", "y"], &["a"], &["x + a*y^2", "y - x^2"]).unwrap();
        let conn = connection_pl(&vf).unwrap();
        let syms = vf.symbols();
        let x = RationalExpr::var(syms, 0);
        let y = RationalExpr::var(syms, 1);
        let one = RationalExpr::one(syms);
        let integrals = [
            Covector::new(syms, vec![vf.component(1).clone(), vf.component(0).neg()]),
            Covector::new(syms, vec![y.mul(&y.sub(&one)), x.mul(&x.sub(&one))]),
        ];
        for a in integrals {
            for r in killing_residual(&a, &conn).unwrap() {
                assert!(r.is_zero());
            }
        }
    }
}
