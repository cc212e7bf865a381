//! Riemann-extension metrics over affine connections and their
//! curvature: Christoffel symbols, Riemann and Ricci tensors, the two
//! quadratic scalar invariants and the second-order Killing identity.

use std::collections::BTreeMap;

use num::BigRational;
use rand::{Rng, SeedableRng};

use crate::connection::{connection_direct, AffineConnection, Covector, VectorField};
use crate::symexpr::{RationalExpr, Symbols};
use crate::{Error, Result};

/// Metric of the extended 2n-space: base coordinates followed by one
/// fiber coordinate per base dimension. The base-base block is
/// -2 Gamma^k_{ij} Psi_k, the base-fiber block is the identity pairing
/// and the fiber-fiber block vanishes.
#[derive(Debug, Clone)]
pub struct ExtendedMetric {
    base_dim: usize,
    syms: Symbols,
    lower: Vec<RationalExpr>,
    upper: Vec<RationalExpr>,
}

fn fiber_names(n: usize) -> Result<&'static [&'static str]> {
    match n {
        2 => Ok(&["z", "t"]),
        3 => Ok(&["U", "V", "W"]),
        _ => Err(Error::Dimension { expected: 3, got: n }),
    }
}

/// Build the extension metric 2n ds^2 = -2 Gamma^k_{ij} Psi_k dx^i dx^j
/// + 2 dPsi_k dx^k of a symmetric connection.
pub fn riemann_extension(conn: &AffineConnection) -> Result<ExtendedMetric> {
    let n = conn.dim();
    let fibers = fiber_names(n)?;
    let old = conn.symbols();
    let mut names: Vec<String> = old.names()[..n].to_vec();
    for f in fibers {
        if old.index_of(f).is_some() {
            return Err(Error::Input(format!("fiber coordinate `{f}` collides with a declared symbol")));
        }
        names.push(f.to_string());
    }
    names.extend(old.names()[n..].iter().cloned());
    let syms = Symbols::new(names);
    let conn = conn.on_symbols(&syms)?;

    let m = 2 * n;
    let zero = RationalExpr::zero(&syms);
    let one = RationalExpr::one(&syms);
    let mut lower = vec![zero.clone(); m * m];
    let mut upper = vec![zero.clone(); m * m];
    let minus_two = BigRational::from_integer((-2).into());
    for i in 0..n {
        for j in i..n {
            let mut a = RationalExpr::zero(&syms);
            for k in 0..n {
                let g = conn.get(k, i, j);
                if !g.is_zero() {
                    a = a.add(&g.mul(&RationalExpr::var(&syms, n + k)));
                }
            }
            let a = a.scale(&minus_two);
            lower[i * m + j] = a.clone();
            lower[j * m + i] = a.clone();
            upper[(n + i) * m + (n + j)] = a.neg();
            upper[(n + j) * m + (n + i)] = lower[i * m + j].neg();
        }
        lower[i * m + (n + i)] = one.clone();
        lower[(n + i) * m + i] = one.clone();
        upper[i * m + (n + i)] = one.clone();
        upper[(n + i) * m + i] = one.clone();
    }
    Ok(ExtendedMetric {
        base_dim: n,
        syms,
        lower,
        upper,
    })
}

impl ExtendedMetric {
    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn dim(&self) -> usize {
        2 * self.base_dim
    }

    pub fn symbols(&self) -> &Symbols {
        &self.syms
    }

    pub fn entry(&self, a: usize, b: usize) -> &RationalExpr {
        &self.lower[a * self.dim() + b]
    }

    pub fn inverse_entry(&self, a: usize, b: usize) -> &RationalExpr {
        &self.upper[a * self.dim() + b]
    }

    /// Map "a,b" (one-based, a <= b) to the canonical string of g_{ab}.
    pub fn to_json(&self) -> serde_json::Value {
        let m = self.dim();
        let mut map = serde_json::Map::new();
        for a in 0..m {
            for b in a..m {
                let e = self.entry(a, b);
                if !e.is_zero() {
                    map.insert(format!("{},{}", a + 1, b + 1), e.to_string().into());
                }
            }
        }
        serde_json::Value::Object(map)
    }
}

/// Christoffel symbols of an extended metric together with all their
/// first partials; Riemann and Ricci components are assembled on demand.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    dim: usize,
    syms: Symbols,
    christoffel: Vec<RationalExpr>,
    dgamma: Vec<RationalExpr>,
}

/// Dense Levi-Civita Christoffel table of the metric, indexed as
/// `[(c*m + a)*m + b]` for upper index c and lower pair (a, b).
pub fn christoffel_table(metric: &ExtendedMetric) -> Vec<RationalExpr> {
    let m = metric.dim();
    let syms = metric.symbols().clone();
    let zero = RationalExpr::zero(&syms);
    let half = BigRational::new(1.into(), 2.into());

    let mut dg = vec![zero.clone(); m * m * m];
    for a in 0..m {
        for b in a..m {
            for v in 0..m {
                let d = metric.entry(a, b).differentiate(v);
                dg[(a * m + b) * m + v] = d.clone();
                dg[(b * m + a) * m + v] = d;
            }
        }
    }

    let mut ch = vec![zero.clone(); m * m * m];
    for c in 0..m {
        for a in 0..m {
            for b in a..m {
                let mut acc = RationalExpr::zero(&syms);
                for d in 0..m {
                    let gi = metric.inverse_entry(c, d);
                    if gi.is_zero() {
                        continue;
                    }
                    let t = dg[(d * m + b) * m + a]
                        .add(&dg[(d * m + a) * m + b])
                        .sub(&dg[(a * m + b) * m + d]);
                    if !t.is_zero() {
                        acc = acc.add(&gi.mul(&t));
                    }
                }
                let e = acc.scale(&half);
                ch[(c * m + a) * m + b] = e.clone();
                ch[(c * m + b) * m + a] = e;
            }
        }
    }
    ch
}

/// Compute the Levi-Civita Christoffel symbols of the metric and their
/// partials.
pub fn curvature(metric: &ExtendedMetric) -> CurvatureBundle {
    let m = metric.dim();
    let syms = metric.symbols().clone();
    let zero = RationalExpr::zero(&syms);
    let ch = christoffel_table(metric);

    let mut dgamma = vec![zero; m * m * m * m];
    for (idx, g) in ch.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        for v in 0..m {
            dgamma[idx * m + v] = g.differentiate(v);
        }
    }

    CurvatureBundle {
        dim: m,
        syms,
        christoffel: ch,
        dgamma,
    }
}

impl CurvatureBundle {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbols(&self) -> &Symbols {
        &self.syms
    }

    pub fn christoffel(&self, c: usize, a: usize, b: usize) -> &RationalExpr {
        &self.christoffel[(c * self.dim + a) * self.dim + b]
    }

    fn dgamma(&self, c: usize, a: usize, b: usize, v: usize) -> &RationalExpr {
        &self.dgamma[((c * self.dim + a) * self.dim + b) * self.dim + v]
    }

    /// R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
    /// + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}.
    pub fn riemann(&self, a: usize, b: usize, c: usize, d: usize) -> RationalExpr {
        let mut r = self.dgamma(a, d, b, c).sub(self.dgamma(a, c, b, d));
        for e in 0..self.dim {
            let t1 = self.christoffel(a, c, e);
            let t2 = self.christoffel(e, d, b);
            if !t1.is_zero() && !t2.is_zero() {
                r = r.add(&t1.mul(t2));
            }
            let t3 = self.christoffel(a, d, e);
            let t4 = self.christoffel(e, c, b);
            if !t3.is_zero() && !t4.is_zero() {
                r = r.sub(&t3.mul(t4));
            }
        }
        r
    }

    /// R_{bd} = R^a_{bad}.
    pub fn ricci(&self, b: usize, d: usize) -> RationalExpr {
        let mut r = RationalExpr::zero(&self.syms);
        for a in 0..self.dim {
            r = r.add(&self.riemann(a, b, a, d));
        }
        r
    }

    /// Dense symmetric Ricci matrix.
    pub fn ricci_matrix(&self) -> Vec<RationalExpr> {
        let m = self.dim;
        let mut out = vec![RationalExpr::zero(&self.syms); m * m];
        for b in 0..m {
            for d in b..m {
                let r = self.ricci(b, d);
                out[b * m + d] = r.clone();
                out[d * m + b] = r;
            }
        }
        out
    }
}

/// Fully symbolic quadratic invariants p = R_{ab}R^{ab} and
/// q = R_{abcd}R^{abcd}. Tractable for the four-dimensional extensions;
/// use the sampled variant for the six-dimensional ones.
pub fn scalar_invariants(
    bundle: &CurvatureBundle,
    metric: &ExtendedMetric,
) -> (RationalExpr, RationalExpr) {
    let m = bundle.dim;
    let syms = &bundle.syms;
    let ric = bundle.ricci_matrix();

    let mut p = RationalExpr::zero(syms);
    for a in 0..m {
        for b in 0..m {
            if ric[a * m + b].is_zero() {
                continue;
            }
            for c in 0..m {
                for d in 0..m {
                    if ric[c * m + d].is_zero() {
                        continue;
                    }
                    let gac = metric.inverse_entry(a, c);
                    let gbd = metric.inverse_entry(b, d);
                    if gac.is_zero() || gbd.is_zero() {
                        continue;
                    }
                    p = p.add(&ric[a * m + b].mul(&ric[c * m + d]).mul(gac).mul(gbd));
                }
            }
        }
    }

    // lower the first index, then raise all four stepwise
    let zero = RationalExpr::zero(syms);
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * m + b) * m + c) * m + d;
    let mut rl = vec![zero.clone(); m * m * m * m];
    for b in 0..m {
        for c in 0..m {
            for d in 0..m {
                if c == d {
                    continue;
                }
                let mut up = Vec::with_capacity(m);
                for e in 0..m {
                    up.push(bundle.riemann(e, b, c, d));
                }
                for a in 0..m {
                    let mut acc = RationalExpr::zero(syms);
                    for (e, r) in up.iter().enumerate() {
                        let g = metric.entry(a, e);
                        if !g.is_zero() && !r.is_zero() {
                            acc = acc.add(&g.mul(r));
                        }
                    }
                    rl[idx(a, b, c, d)] = acc;
                }
            }
        }
    }
    let raise = |src: &[RationalExpr], pos: usize| -> Vec<RationalExpr> {
        let mut out = vec![RationalExpr::zero(syms); m * m * m * m];
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let mut acc = RationalExpr::zero(syms);
                        let t = [a, b, c, d];
                        for e in 0..m {
                            let gi = metric.inverse_entry(t[pos], e);
                            if gi.is_zero() {
                                continue;
                            }
                            let mut s = t;
                            s[pos] = e;
                            let r = &src[idx(s[0], s[1], s[2], s[3])];
                            if !r.is_zero() {
                                acc = acc.add(&gi.mul(r));
                            }
                        }
                        out[idx(a, b, c, d)] = acc;
                    }
                }
            }
        }
        out
    };
    let mut ru = rl.clone();
    for pos in 0..4 {
        ru = raise(&ru, pos);
    }
    let mut q = RationalExpr::zero(syms);
    for (lo, hi) in rl.iter().zip(&ru) {
        if !lo.is_zero() && !hi.is_zero() {
            q = q.add(&lo.mul(hi));
        }
    }
    (p, q)
}

/// Numeric p, q at one point (values bound positionally to the metric's
/// symbol table). Rejects points where any Christoffel or derivative
/// denominator falls below `eps_den` in magnitude.
pub fn scalar_invariants_at(
    bundle: &CurvatureBundle,
    metric: &ExtendedMetric,
    vals: &[f64],
    eps_den: f64,
) -> Result<(f64, f64)> {
    let m = bundle.dim;
    let ch: Vec<f64> = bundle
        .christoffel
        .iter()
        .map(|e| e.eval_slice(vals, eps_den))
        .collect::<std::result::Result<_, _>>()?;
    let dg: Vec<f64> = bundle
        .dgamma
        .iter()
        .map(|e| e.eval_slice(vals, eps_den))
        .collect::<std::result::Result<_, _>>()?;
    let g: Vec<f64> = metric
        .lower
        .iter()
        .map(|e| e.eval_slice(vals, eps_den))
        .collect::<std::result::Result<_, _>>()?;
    let gi: Vec<f64> = metric
        .upper
        .iter()
        .map(|e| e.eval_slice(vals, eps_den))
        .collect::<std::result::Result<_, _>>()?;

    let chv = |c: usize, a: usize, b: usize| ch[(c * m + a) * m + b];
    let dgv = |c: usize, a: usize, b: usize, v: usize| dg[((c * m + a) * m + b) * m + v];
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * m + b) * m + c) * m + d;

    let mut riem = vec![0.0; m * m * m * m];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let mut r = dgv(a, d, b, c) - dgv(a, c, b, d);
                    for e in 0..m {
                        r += chv(a, c, e) * chv(e, d, b) - chv(a, d, e) * chv(e, c, b);
                    }
                    riem[idx(a, b, c, d)] = r;
                }
            }
        }
    }
    let mut ric = vec![0.0; m * m];
    for b in 0..m {
        for d in 0..m {
            ric[b * m + d] = (0..m).map(|a| riem[idx(a, b, a, d)]).sum();
        }
    }
    let mut p = 0.0;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    p += ric[a * m + b] * ric[c * m + d] * gi[a * m + c] * gi[b * m + d];
                }
            }
        }
    }
    // lower the first index, then raise all four
    let mut rl = vec![0.0; m * m * m * m];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    rl[idx(a, b, c, d)] =
                        (0..m).map(|e| g[a * m + e] * riem[idx(e, b, c, d)]).sum();
                }
            }
        }
    }
    let mut ru = rl.clone();
    for pos in 0..4 {
        let mut next = vec![0.0; m * m * m * m];
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let t = [a, b, c, d];
                        let mut acc = 0.0;
                        for e in 0..m {
                            let mut s = t;
                            s[pos] = e;
                            acc += gi[t[pos] * m + e] * ru[idx(s[0], s[1], s[2], s[3])];
                        }
                        next[idx(a, b, c, d)] = acc;
                    }
                }
            }
        }
        ru = next;
    }
    let q = rl.iter().zip(&ru).map(|(x, y)| x * y).sum();
    Ok((p, q))
}

/// Largest |p|, |q| over `npoints` random coordinate samples with the
/// parameters fixed; points near a denominator zero set are rejected.
pub fn invariants_max_sampled(
    bundle: &CurvatureBundle,
    metric: &ExtendedMetric,
    params: &BTreeMap<String, f64>,
    npoints: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let m = bundle.dim;
    let syms = &bundle.syms;
    let mut base = vec![0.0; syms.len()];
    for (i, name) in syms.names().iter().enumerate().skip(m) {
        match params.get(name) {
            Some(v) => base[i] = *v,
            None => return Err(Error::Input(format!("parameter `{name}` not bound"))),
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (mut pmax, mut qmax) = (0.0f64, 0.0f64);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < npoints {
        attempts += 1;
        if attempts > 400 * npoints {
            return Err(Error::Input(
                "sampling failed: too many points rejected near singular sets".into(),
            ));
        }
        let mut vals = base.clone();
        for v in vals.iter_mut().take(m) {
            *v = rng.gen_range(-2.0..2.0);
        }
        match scalar_invariants_at(bundle, metric, &vals, 1e-3) {
            Ok((p, q)) => {
                pmax = pmax.max(p.abs());
                qmax = qmax.max(q.abs());
                accepted += 1;
            }
            Err(_) => continue,
        }
    }
    Ok((pmax, qmax))
}

/// Compare the computed base-block Ricci of the direct-connection
/// extension against the three closed forms stated for planar systems.
/// Returns (component label, computed, formula, matched).
pub fn verify_ricci_against_paper(
    vf: &VectorField,
) -> Result<Vec<(String, RationalExpr, RationalExpr, bool)>> {
    let conn = connection_direct(vf)?;
    let metric = riemann_extension(&conn)?;
    let bundle = curvature(&metric);
    let syms = metric.symbols();
    let p = vf.component(0).on_symbols(syms)?;
    let q = vf.component(1).on_symbols(syms)?;
    let half = BigRational::new(1.into(), 2.into());
    let two = BigRational::from_integer(2.into());
    let three = BigRational::from_integer(3.into());
    let (px, py) = (p.differentiate(0), p.differentiate(1));
    let (qx, qy) = (q.differentiate(0), q.differentiate(1));
    let pxy = px.differentiate(1);
    let qxx = qx.differentiate(0);
    let qxy = qx.differentiate(1);
    let pyy = py.differentiate(1);

    let r11 = qx
        .pow(2)
        .mul(&p)
        .scale(&-three.clone())
        .add(&qxx.mul(&p).mul(&q).scale(&two))
        .add(&px.mul(&q).mul(&qx).scale(&two))
        .div(&p.mul(&q.pow(2)))?
        .scale(&half);
    let r22 = py
        .pow(2)
        .mul(&q)
        .scale(&-three)
        .add(&pyy.mul(&p).mul(&q).scale(&two))
        .add(&qy.mul(&p).mul(&py).scale(&two))
        .div(&q.mul(&p.pow(2)))?
        .scale(&half);
    let p2q2 = p.pow(2).mul(&q.pow(2));
    let r12 = pxy
        .mul(&p)
        .mul(&q.pow(2))
        .neg()
        .sub(&qx.mul(&py).mul(&p).mul(&q))
        .div(&p2q2)?
        .scale(&(-half.clone()))
        .sub(
            &px.mul(&py)
                .mul(&q.pow(2))
                .sub(&qxy.mul(&p.pow(2)).mul(&q))
                .div(&p2q2)?
                .scale(&half),
        )
        .sub(&qx.mul(&qy).div(&q.pow(2))?.scale(&half));

    let mut out = Vec::new();
    for (label, i, j, formula) in [
        ("R11", 0, 0, r11),
        ("R12", 0, 1, r12),
        ("R22", 1, 1, r22),
    ] {
        let computed = bundle.ricci(i, j);
        let matched = computed.sub(&formula).is_zero();
        out.push((label.to_string(), computed, formula, matched));
    }
    Ok(out)
}

/// Residual of the second-order Killing identity
/// a_{i;j;k} + R^m_{kij} a_m, flattened over (i, j, k). The covector is
/// extended by zeros to the full dimension.
pub fn second_killing_residual(
    a: &Covector,
    bundle: &CurvatureBundle,
) -> Result<Vec<RationalExpr>> {
    let m = bundle.dim;
    let syms = &bundle.syms;
    if a.dim() > m {
        return Err(Error::Dimension {
            expected: m,
            got: a.dim(),
        });
    }
    let mut av = vec![RationalExpr::zero(syms); m];
    for (i, c) in a.components().iter().enumerate() {
        av[i] = c.on_symbols(syms)?;
    }

    let mut d1 = vec![RationalExpr::zero(syms); m * m];
    for i in 0..m {
        for j in 0..m {
            let mut v = av[i].differentiate(j);
            for (k, ak) in av.iter().enumerate() {
                let g = bundle.christoffel(k, i, j);
                if !ak.is_zero() && !g.is_zero() {
                    v = v.sub(&ak.mul(g));
                }
            }
            d1[i * m + j] = v;
        }
    }

    let mut out = Vec::with_capacity(m * m * m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut v = d1[i * m + j].differentiate(k);
                for l in 0..m {
                    let g1 = bundle.christoffel(l, i, k);
                    if !g1.is_zero() && !d1[l * m + j].is_zero() {
                        v = v.sub(&g1.mul(&d1[l * m + j]));
                    }
                    let g2 = bundle.christoffel(l, j, k);
                    if !g2.is_zero() && !d1[i * m + l].is_zero() {
                        v = v.sub(&g2.mul(&d1[i * m + l]));
                    }
                }
                for (l, al) in av.iter().enumerate() {
                    if al.is_zero() {
                        continue;
                    }
                    let r = bundle.riemann(l, k, i, j);
                    if !r.is_zero() {
                        v = v.add(&r.mul(al));
                    }
                }
                out.push(v);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{connection_log, AffineConnection};
    use crate::symexpr::{parse_on, RationalExpr};

    fn circle() -> VectorField {
        VectorField::new(&["x", "y"], &[], &["-y", "x"]).unwrap()
    }

    fn expr(metric: &ExtendedMetric, text: &str) -> RationalExpr {
        parse_on(text, metric.symbols()).unwrap()
    }

    #[test]
    fn flat_metric_shape_and_curvature() {
        let syms = crate::symexpr::Symbols::new(["x", "y"]);
        let conn = AffineConnection::zero(2, &syms);
        let metric = riemann_extension(&conn).unwrap();
        assert_eq!(metric.dim(), 4);
        for a in 0..4 {
            for b in 0..4 {
                let want = matches!((a, b), (0, 2) | (2, 0) | (1, 3) | (3, 1));
                assert_eq!(metric.entry(a, b).is_one(), want);
                if !want {
                    assert!(metric.entry(a, b).is_zero());
                }
            }
        }
        let bundle = curvature(&metric);
        assert!(bundle.christoffel.iter().all(|e| e.is_zero()));
        let (p, q) = scalar_invariants(&bundle, &metric);
        assert!(p.is_zero() && q.is_zero());
    }

    #[test]
    fn circle_metric_entries() {
        let conn = connection_direct(&circle()).unwrap();
        let metric = riemann_extension(&conn).unwrap();
        assert!(metric.entry(0, 0).is_zero());
        assert!(metric.entry(1, 1).is_zero());
        let g12 = expr(&metric, "z/y + t/x");
        assert!(metric.entry(0, 1).sub(&g12).is_zero());
    }

    #[test]
    fn log_metric_is_diagonal_in_base_block() {
        let vf = VectorField::new(&["x", "y"], &["a"], &["2 + x*y", "a*x - y^2"]).unwrap();
        let conn = connection_log(&vf).unwrap();
        let metric = riemann_extension(&conn).unwrap();
        assert!(metric.entry(0, 1).is_zero());
        assert!(!metric.entry(0, 0).is_zero());
        assert!(!metric.entry(1, 1).is_zero());
    }

    #[test]
    fn inverse_blocks_multiply_to_identity() {
        let conn = connection_direct(&circle()).unwrap();
        let metric = riemann_extension(&conn).unwrap();
        let m = metric.dim();
        for a in 0..m {
            for c in 0..m {
                let mut acc = RationalExpr::zero(metric.symbols());
                for b in 0..m {
                    acc = acc.add(&metric.inverse_entry(a, b).mul(metric.entry(b, c)));
                }
                assert_eq!(acc.is_one(), a == c);
                if a != c {
                    assert!(acc.is_zero());
                }
            }
        }
    }

    #[test]
    fn base_block_christoffels_match_input() {
        let vf = VectorField::new(&["x", "y"], &[], &["x + y^2", "x*y - 3"]).unwrap();
        let conn = connection_direct(&vf).unwrap();
        let metric = riemann_extension(&conn).unwrap();
        let bundle = curvature(&metric);
        let lifted = conn.on_symbols(metric.symbols()).unwrap();
        let n = 2;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    assert!(bundle.christoffel(k, i, j).sub(lifted.get(k, i, j)).is_zero());
                }
            }
        }
        // fiber lower indices never appear
        for c in 0..2 * n {
            for i in n..2 * n {
                for j in n..2 * n {
                    assert!(bundle.christoffel(c, i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn circle_ricci_components() {
        let conn = connection_direct(&circle()).unwrap();
        let metric = riemann_extension(&conn).unwrap();
        let bundle = curvature(&metric);
        assert!(bundle.ricci(0, 0).sub(&expr(&metric, "-3/(2*x^2)")).is_zero());
        assert!(bundle.ricci(1, 1).sub(&expr(&metric, "-3/(2*y^2)")).is_zero());
        assert!(bundle.ricci(0, 1).sub(&expr(&metric, "1/(2*x*y)")).is_zero());
    }

    #[test]
    fn log_metric_is_ricci_flat() {
        let vf = VectorField::new(&["x", "y"], &["a"], &["2 + x*y", "a*x - y^2"]).unwrap();
        let conn = connection_log(&vf).unwrap();
        let metric = riemann_extension(&conn).unwrap();
        let bundle = curvature(&metric);
        for e in bundle.ricci_matrix() {
            assert!(e.is_zero());
        }
    }

    #[test]
    fn circle_invariants_vanish_symbolically() {
        let conn = connection_direct(&circle()).unwrap();
        let metric = riemann_extension(&conn).unwrap();
        let bundle = curvature(&metric);
        let (p, q) = scalar_invariants(&bundle, &metric);
        assert!(p.is_zero());
        assert!(q.is_zero());
    }

    #[test]
    fn first_bianchi_identity() {
        let conn = connection_direct(&circle()).unwrap();
        let metric = riemann_extension(&conn).unwrap();
        let bundle = curvature(&metric);
        let m = metric.dim();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let s = bundle
                            .riemann(a, b, c, d)
                            .add(&bundle.riemann(a, c, d, b))
                            .add(&bundle.riemann(a, d, b, c));
                        assert!(s.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn paper_ricci_comparison_circle() {
        let report = verify_ricci_against_paper(&circle()).unwrap();
        assert_eq!(report.len(), 3);
        for (label, _, _, matched) in &report {
            assert!(matched, "{label} mismatched");
        }
    }

    #[test]
    fn second_killing_zero_covector() {
        let conn = connection_direct(&circle()).unwrap();
        let metric = riemann_extension(&conn).unwrap();
        let bundle = curvature(&metric);
        let a = Covector::new(
            metric.symbols(),
            vec![RationalExpr::zero(metric.symbols()); 4],
        );
        for r in second_killing_residual(&a, &bundle).unwrap() {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn second_killing_flat_is_second_partials() {
        let syms = crate::symexpr::Symbols::new(["x", "y"]);
        let conn = AffineConnection::zero(2, &syms);
        let metric = riemann_extension(&conn).unwrap();
        let bundle = curvature(&metric);
        let a0 = parse_on("x^2*y + z*t", metric.symbols()).unwrap();
        let a1 = parse_on("x*z - y^3", metric.symbols()).unwrap();
        let zero = RationalExpr::zero(metric.symbols());
        let av = [a0, a1, zero.clone(), zero.clone()];
        let a = Covector::new(metric.symbols(), av.to_vec());
        let res = second_killing_residual(&a, &bundle).unwrap();
        let m = 4;
        let mut nonzero = false;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let want = av[i].differentiate(j).differentiate(k);
                    assert!(res[(i * m + j) * m + k].sub(&want).is_zero());
                    nonzero |= !want.is_zero();
                }
            }
        }
        assert!(nonzero);
    }
}
