//! Numerical integration of the split geodesic flow: base geodesics of
//! an affine connection, the linear fiber flow of the extension metric,
//! the linear-in-s first-integral monitor, trajectory embedding checks
//! and the scalar decoupling of the planar fiber system.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::connection::{AffineConnection, VectorField};
use crate::extension::{christoffel_table, riemann_extension};
use crate::symexpr::{RationalExpr, SymError};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct GeodesicOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Integration stops when any denominator magnitude falls below this.
    pub eps_den: f64,
    pub max_steps: usize,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            eps_den: 1e-9,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicState {
    pub s: f64,
    pub x: Vec<f64>,
    pub xdot: Vec<f64>,
    pub psi: Vec<f64>,
    pub psidot: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct GeodesicTrajectory {
    pub base_dim: usize,
    pub samples: Vec<GeodesicState>,
}

impl GeodesicTrajectory {
    /// The monitor channel 2 Psi_k dx^k/ds per sample.
    pub fn first_integral_channel(&self) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .map(|st| {
                let c: f64 = st.psi.iter().zip(&st.xdot).map(|(p, v)| p * v).sum();
                (st.s, 2.0 * c)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let n = self.base_dim;
        let mut out = String::from("s");
        for i in 1..=n {
            write!(out, ",x{i}").unwrap();
        }
        for i in 1..=n {
            write!(out, ",xdot{i}").unwrap();
        }
        for i in 1..=n {
            write!(out, ",psi{i}").unwrap();
        }
        for i in 1..=n {
            write!(out, ",psidot{i}").unwrap();
        }
        out.push_str(",first_integral\n");
        for st in &self.samples {
            write!(out, "{:.12e}", st.s).unwrap();
            for v in st.x.iter().chain(&st.xdot).chain(&st.psi).chain(&st.psidot) {
                write!(out, ",{:.12e}", v).unwrap();
            }
            let c: f64 = st.psi.iter().zip(&st.xdot).map(|(p, v)| p * v).sum();
            writeln!(out, ",{:.12e}", 2.0 * c).unwrap();
        }
        out
    }
}

/// Coefficient samples of the two scalar second-order equations obtained
/// by eliminating one fiber variable through the first integral.
#[derive(Debug, Clone)]
pub struct DecoupledSample {
    pub s: f64,
    /// z'' + m z' + n z + fz = 0
    pub m: f64,
    pub n: f64,
    pub fz: f64,
    /// t'' + u t' + v t + ft = 0
    pub u: f64,
    pub v: f64,
    pub ft: f64,
    pub res_z: f64,
    pub res_t: f64,
}

#[derive(Debug, Clone)]
pub struct DecoupledTracks {
    pub samples: Vec<DecoupledSample>,
}

/// Fiber coefficient matrices A(s), B(s) of psi'' + A psi' + B psi = 0
/// sampled along a base trajectory.
#[derive(Debug, Clone)]
pub struct FiberLinearSystem {
    pub base_dim: usize,
    /// (s, A row-major, B row-major) per sample.
    pub samples: Vec<(f64, Vec<f64>, Vec<f64>)>,
}

/// Symbolic expression table bound to numeric parameter values. The
/// first `coords` symbols are the flowing coordinates; every remaining
/// symbol must be covered by the parameter map.
struct BoundTable {
    exprs: Vec<RationalExpr>,
    coords: usize,
    point: Vec<f64>,
}

impl BoundTable {
    fn new(
        exprs: Vec<RationalExpr>,
        syms: &crate::symexpr::Symbols,
        coords: usize,
        params: &BTreeMap<String, f64>,
    ) -> Result<Self> {
        let mut point = vec![0.0; syms.len()];
        for (i, name) in syms.names().iter().enumerate().skip(coords) {
            match params.get(name) {
                Some(v) => point[i] = *v,
                None => {
                    return Err(Error::Input(format!("parameter `{name}` needs a value")))
                }
            }
        }
        Ok(BoundTable {
            exprs,
            coords,
            point,
        })
    }

    fn eval(&mut self, x: &[f64], idx: usize, s: f64, eps_den: f64) -> Result<f64> {
        self.point[..self.coords].copy_from_slice(x);
        match self.exprs[idx].eval_slice(&self.point, eps_den) {
            Ok(v) => Ok(v),
            Err(SymError::NearPole(d)) => Err(Error::Singularity { s, den: d }),
            Err(e) => Err(Error::Sym(e)),
        }
    }
}

// Dormand-Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive embedded RK 5(4) with PI step control; records the state at
/// each requested grid point (steps are clamped onto grid points, no
/// interpolation).
fn rk_integrate<F>(
    mut f: F,
    y0: &[f64],
    grid: &[f64],
    opts: &GeodesicOptions,
) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dim = y0.len();
    let mut out = Vec::with_capacity(grid.len());
    let mut s = grid[0];
    let mut y = y0.to_vec();
    out.push((s, y.clone()));

    let span = grid[grid.len() - 1] - s;
    if span == 0.0 {
        return Ok(out);
    }
    let dir = span.signum();
    let mut h = span / 100.0;
    let mut k = vec![vec![0.0; dim]; 7];
    f(s, &y, &mut k[0])?;
    let mut err_old: f64 = 1e-4;
    let mut steps = 0usize;
    let mut next = 1usize;

    while next < grid.len() {
        if steps >= opts.max_steps {
            return Err(Error::StepUnderflow(s));
        }
        steps += 1;
        if h.abs() < 1e-14 * span.abs() {
            return Err(Error::StepUnderflow(s));
        }
        let mut target_hit = false;
        if (s + h - grid[next]) * dir >= 0.0 {
            h = grid[next] - s;
            target_hit = true;
        }

        for stage in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = DP_A[stage][j];
                if a != 0.0 {
                    for (yv, kv) in ys.iter_mut().zip(kj) {
                        *yv += h * a * kv;
                    }
                }
            }
            let (head, tail) = k.split_at_mut(stage);
            let _ = head;
            f(s + DP_C[stage] * h, &ys, &mut tail[0])?;
        }
        // stage 7 uses the b-row weights, so k[6] is f at the new point
        let mut ynew = y.clone();
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = DP_A[6][j];
            if a != 0.0 {
                for (yv, kv) in ynew.iter_mut().zip(kj) {
                    *yv += h * a * kv;
                }
            }
        }
        let mut k7 = vec![0.0; dim];
        f(s + h, &ynew, &mut k7)?;

        let mut err: f64 = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                e += DP_E[j] * kj[i];
            }
            e += DP_E[6] * k7[i];
            e *= h;
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(ynew[i].abs());
            err += (e / sc) * (e / sc);
        }
        err = (err / dim as f64).sqrt();

        if err <= 1.0 {
            s += h;
            y = ynew;
            k[0].copy_from_slice(&k7);
            if target_hit {
                out.push((grid[next], y.clone()));
                next += 1;
            }
            let e = err.max(1e-10);
            let fac = (0.9 * e.powf(-0.17) * err_old.powf(0.04)).clamp(0.2, 10.0);
            err_old = e;
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Ok(out)
}

fn uniform_grid(s_span: (f64, f64), samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    (0..n)
        .map(|i| s_span.0 + (s_span.1 - s_span.0) * i as f64 / (n - 1) as f64)
        .collect()
}

fn base_table(
    conn: &AffineConnection,
    params: &BTreeMap<String, f64>,
) -> Result<BoundTable> {
    let n = conn.dim();
    let mut exprs = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                exprs.push(conn.get(k, i, j).clone());
            }
        }
    }
    BoundTable::new(exprs, conn.symbols(), n, params)
}

/// Integrate the base geodesic equation x''^k + Gamma^k_{ij} x'^i x'^j = 0.
pub fn integrate_base(
    conn: &AffineConnection,
    params: &BTreeMap<String, f64>,
    x0: &[f64],
    xdot0: &[f64],
    s_span: (f64, f64),
    samples: usize,
    opts: &GeodesicOptions,
) -> Result<GeodesicTrajectory> {
    let n = conn.dim();
    if x0.len() != n || xdot0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x0.len().max(xdot0.len()),
        });
    }
    let mut table = base_table(conn, params)?;
    let grid = uniform_grid(s_span, samples);
    let mut y0 = x0.to_vec();
    y0.extend_from_slice(xdot0);
    let eps = opts.eps_den;
    let rows = rk_integrate(
        |s, y, dy| {
            let (x, v) = y.split_at(n);
            dy[..n].copy_from_slice(v);
            for k in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let g = table.eval(x, (k * n + i) * n + j, s, eps)?;
                        acc += g * v[i] * v[j];
                    }
                }
                dy[n + k] = -acc;
            }
            Ok(())
        },
        &y0,
        &grid,
        opts,
    )?;
    Ok(GeodesicTrajectory {
        base_dim: n,
        samples: rows
            .into_iter()
            .map(|(s, y)| GeodesicState {
                s,
                x: y[..n].to_vec(),
                xdot: y[n..2 * n].to_vec(),
                psi: vec![0.0; n],
                psidot: vec![0.0; n],
            })
            .collect(),
    })
}

/// Christoffel table of the extension metric bound to parameter values;
/// coordinates are the n base variables followed by the n fiber ones.
struct ExtFlow {
    n: usize,
    table: BoundTable,
}

impl ExtFlow {
    fn new(conn: &AffineConnection, params: &BTreeMap<String, f64>) -> Result<Self> {
        let n = conn.dim();
        let metric = riemann_extension(conn)?;
        let ch = christoffel_table(&metric);
        let table = BoundTable::new(ch, metric.symbols(), 2 * n, params)?;
        Ok(ExtFlow { n, table })
    }

    fn gamma(&mut self, pt: &[f64], c: usize, a: usize, b: usize, s: f64, eps: f64) -> Result<f64> {
        let m = 2 * self.n;
        self.table.eval(pt, (c * m + a) * m + b, s, eps)
    }

    /// Full geodesic right side; state layout (x, xdot, psi, psidot).
    fn rhs(&mut self, s: f64, y: &[f64], dy: &mut [f64], eps: f64) -> Result<()> {
        let n = self.n;
        let mut pt = vec![0.0; 2 * n];
        pt[..n].copy_from_slice(&y[..n]);
        pt[n..].copy_from_slice(&y[2 * n..3 * n]);
        let v = &y[n..2 * n];
        let pdot = &y[3 * n..4 * n];
        dy[..n].copy_from_slice(v);
        dy[2 * n..3 * n].copy_from_slice(pdot);
        for c in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let g = self.gamma(&pt, c, i, j, s, eps)?;
                    acc += g * v[i] * v[j];
                }
            }
            dy[n + c] = -acc;
        }
        for c in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let g = self.gamma(&pt, n + c, i, j, s, eps)?;
                    acc += g * v[i] * v[j];
                }
                for m in 0..n {
                    let g = self.gamma(&pt, n + c, i, n + m, s, eps)?;
                    acc += 2.0 * g * v[i] * pdot[m];
                }
            }
            dy[3 * n + c] = -acc;
        }
        Ok(())
    }
}

/// Integrate the full extended geodesic (base plus linear fiber flow).
pub fn integrate_full(
    conn: &AffineConnection,
    params: &BTreeMap<String, f64>,
    x0: &[f64],
    xdot0: &[f64],
    psi0: &[f64],
    psidot0: &[f64],
    grid: &[f64],
    opts: &GeodesicOptions,
) -> Result<GeodesicTrajectory> {
    let n = conn.dim();
    for part in [x0, xdot0, psi0, psidot0] {
        if part.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: part.len(),
            });
        }
    }
    let mut flow = ExtFlow::new(conn, params)?;
    let mut y0 = Vec::with_capacity(4 * n);
    y0.extend_from_slice(x0);
    y0.extend_from_slice(xdot0);
    y0.extend_from_slice(psi0);
    y0.extend_from_slice(psidot0);
    let eps = opts.eps_den;
    let rows = rk_integrate(|s, y, dy| flow.rhs(s, y, dy, eps), &y0, grid, opts)?;
    Ok(GeodesicTrajectory {
        base_dim: n,
        samples: rows
            .into_iter()
            .map(|(s, y)| GeodesicState {
                s,
                x: y[..n].to_vec(),
                xdot: y[n..2 * n].to_vec(),
                psi: y[2 * n..3 * n].to_vec(),
                psidot: y[3 * n..4 * n].to_vec(),
            })
            .collect(),
    })
}

/// Solve the fiber flow along an existing base trajectory: re-integrates
/// the joint system from the base's initial state, sampling at the base
/// trajectory's own grid.
pub fn integrate_fiber(
    conn: &AffineConnection,
    params: &BTreeMap<String, f64>,
    base: &GeodesicTrajectory,
    psi0: &[f64],
    psidot0: &[f64],
    opts: &GeodesicOptions,
) -> Result<GeodesicTrajectory> {
    let first = base
        .samples
        .first()
        .ok_or_else(|| Error::Input("empty base trajectory".into()))?;
    let grid: Vec<f64> = base.samples.iter().map(|st| st.s).collect();
    integrate_full(
        conn,
        params,
        &first.x,
        &first.xdot,
        psi0,
        psidot0,
        &grid,
        opts,
    )
}

/// Least-squares line fit of the channel 2 Psi_k x'^k against s;
/// returns (slope, intercept, max absolute deviation from the line).
pub fn first_integral_monitor(traj: &GeodesicTrajectory) -> (f64, f64, f64) {
    let chan = traj.first_integral_channel();
    let n = chan.len() as f64;
    if chan.len() < 2 {
        let c = chan.first().map(|&(_, c)| c).unwrap_or(0.0);
        return (0.0, c, 0.0);
    }
    let sum_s: f64 = chan.iter().map(|&(s, _)| s).sum();
    let sum_c: f64 = chan.iter().map(|&(_, c)| c).sum();
    let sum_ss: f64 = chan.iter().map(|&(s, _)| s * s).sum();
    let sum_sc: f64 = chan.iter().map(|&(s, c)| s * c).sum();
    let det = n * sum_ss - sum_s * sum_s;
    let (slope, intercept) = if det.abs() < 1e-300 {
        (0.0, sum_c / n)
    } else {
        (
            (n * sum_sc - sum_s * sum_c) / det,
            (sum_ss * sum_c - sum_s * sum_sc) / det,
        )
    };
    let dev = chan
        .iter()
        .map(|&(s, c)| (c - slope * s - intercept).abs())
        .fold(0.0, f64::max);
    (slope, intercept, dev)
}

/// Integrate the first-order field from x0 and report the maximum
/// geodesic residual |x''^k + Gamma^k_{ij} x'^i x'^j| along the flow,
/// with x' = scale * F(x) and x'' the matching chain-rule acceleration.
/// scale = 1 checks the embedding; other values give the violated-slope
/// negative control.
pub fn embedding_residual(
    vf: &VectorField,
    conn: &AffineConnection,
    params: &BTreeMap<String, f64>,
    x0: &[f64],
    s_span: (f64, f64),
    samples: usize,
    scale: f64,
    opts: &GeodesicOptions,
) -> Result<f64> {
    let n = vf.dim();
    if conn.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: conn.dim(),
        });
    }
    if x0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x0.len(),
        });
    }
    let mut field = BoundTable::new(vf.components().to_vec(), vf.symbols(), n, params)?;
    // chain-rule acceleration d(F^k)/ds = dF^k/dx^m F^m
    let mut accel_exprs = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = RationalExpr::zero(vf.symbols());
        for m in 0..n {
            acc = acc.add(&vf.component(k).differentiate(m).mul(vf.component(m)));
        }
        accel_exprs.push(acc);
    }
    let mut accel = BoundTable::new(accel_exprs, vf.symbols(), n, params)?;
    let mut gammas = base_table(conn, params)?;

    let grid = uniform_grid(s_span, samples.max(2));
    let eps = opts.eps_den;
    let rows = rk_integrate(
        |s, y, dy| {
            for k in 0..n {
                dy[k] = field.eval(y, k, s, eps)?;
            }
            Ok(())
        },
        x0,
        &grid,
        opts,
    )?;

    let mut worst: f64 = 0.0;
    for (s, x) in &rows {
        let mut v = vec![0.0; n];
        let mut a = vec![0.0; n];
        for k in 0..n {
            v[k] = scale * field.eval(x, k, *s, eps)?;
            a[k] = scale * accel.eval(x, k, *s, eps)?;
        }
        for k in 0..n {
            let mut r = a[k];
            for i in 0..n {
                for j in 0..n {
                    r += gammas.eval(x, (k * n + i) * n + j, *s, eps)? * v[i] * v[j];
                }
            }
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}

/// Sample the coefficient matrices of psi'' + A psi' + B psi = 0 along a
/// trajectory (B extracted column-wise from the psi-linear Christoffels).
pub fn fiber_linear_system(
    conn: &AffineConnection,
    params: &BTreeMap<String, f64>,
    traj: &GeodesicTrajectory,
    opts: &GeodesicOptions,
) -> Result<FiberLinearSystem> {
    let n = conn.dim();
    let mut flow = ExtFlow::new(conn, params)?;
    let eps = opts.eps_den;
    let mut samples = Vec::with_capacity(traj.samples.len());
    for st in &traj.samples {
        let (a, b) = fiber_matrices(&mut flow, st, eps)?;
        samples.push((st.s, a, b));
    }
    Ok(FiberLinearSystem {
        base_dim: n,
        samples,
    })
}

fn fiber_matrices(
    flow: &mut ExtFlow,
    st: &GeodesicState,
    eps: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = flow.n;
    let mut pt = vec![0.0; 2 * n];
    pt[..n].copy_from_slice(&st.x);
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n * n];
    for k in 0..n {
        for m in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += 2.0 * flow.gamma(&pt, n + k, i, n + m, st.s, eps)? * st.xdot[i];
            }
            a[k * n + m] = acc;
        }
    }
    // the base-base fiber Christoffels are linear in psi with no
    // constant part, so column m of B is their value at psi = e_m
    for m in 0..n {
        for p in pt[n..].iter_mut() {
            *p = 0.0;
        }
        pt[n + m] = 1.0;
        for k in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += flow.gamma(&pt, n + k, i, j, st.s, eps)? * st.xdot[i] * st.xdot[j];
                }
            }
            b[k * n + m] = acc;
        }
    }
    Ok((a, b))
}

/// Eliminate each planar fiber variable through the fitted first
/// integral z x' + t y' = (slope s + intercept)/2 and return the scalar
/// equation coefficients plus their residuals along the trajectory.
pub fn decouple_fiber(
    conn: &AffineConnection,
    params: &BTreeMap<String, f64>,
    traj: &GeodesicTrajectory,
    slope: f64,
    intercept: f64,
    opts: &GeodesicOptions,
) -> Result<DecoupledTracks> {
    let n = conn.dim();
    if n != 2 {
        return Err(Error::Dimension { expected: 2, got: n });
    }
    let mut flow = ExtFlow::new(conn, params)?;
    let eps = opts.eps_den;
    let mut out = Vec::with_capacity(traj.samples.len());
    for st in &traj.samples {
        let (xd, yd) = (st.xdot[0], st.xdot[1]);
        for (i, d) in [(0usize, xd), (1, yd)] {
            if d.abs() <= eps {
                return Err(Error::Singularity {
                    s: st.s,
                    den: st.xdot[i].abs(),
                });
            }
        }
        let (a, b) = fiber_matrices(&mut flow, st, eps)?;
        // base accelerations from the geodesic equation
        let mut pt = vec![0.0; 2 * n];
        pt[..n].copy_from_slice(&st.x);
        let mut acc = [0.0; 2];
        for (k, ak) in acc.iter_mut().enumerate() {
            let mut t = 0.0;
            for i in 0..n {
                for j in 0..n {
                    t += flow.gamma(&pt, k, i, j, st.s, eps)? * st.xdot[i] * st.xdot[j];
                }
            }
            *ak = -t;
        }
        let g = (slope * st.s + intercept) / 2.0;
        let gdot = slope / 2.0;

        // z-track: substitute t = (g - z x')/y', t' = (g' - z' x' - z x'' - t y'')/y'
        let m = a[0] - a[1] * xd / yd;
        let c12 = b[1] - a[1] * acc[1] / yd;
        let nz = b[0] - a[1] * acc[0] / yd - c12 * xd / yd;
        let fz = a[1] * gdot / yd + c12 * g / yd;

        // t-track: substitute z = (g - t y')/x', z' = (g' - t' y' - t y'' - z x'')/x'
        let u = a[3] - a[2] * yd / xd;
        let c21 = b[2] - a[2] * acc[0] / xd;
        let v = b[3] - a[2] * acc[1] / xd - c21 * yd / xd;
        let ft = a[2] * gdot / xd + c21 * g / xd;

        // residuals against the trajectory's own second derivatives
        let psiddot = {
            let mut full = vec![0.0; 2 * n];
            full[..n].copy_from_slice(&st.psi);
            let mut dd = [0.0; 2];
            for (k, dk) in dd.iter_mut().enumerate() {
                let mut t = 0.0;
                for m2 in 0..n {
                    t += a[k * n + m2] * st.psidot[m2] + b[k * n + m2] * st.psi[m2];
                }
                *dk = -t;
            }
            dd
        };
        let res_z = psiddot[0] + m * st.psidot[0] + nz * st.psi[0] + fz;
        let res_t = psiddot[1] + u * st.psidot[1] + v * st.psi[1] + ft;

        out.push(DecoupledSample {
            s: st.s,
            m,
            n: nz,
            fz,
            u,
            v,
            ft,
            res_z,
            res_t,
        });
    }
    Ok(DecoupledTracks { samples: out })
}
