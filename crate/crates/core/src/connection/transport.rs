//! Parallel transport for `dI = −Ω I` along piecewise-linear paths of
//! complex λ, with an adaptive Dormand–Prince 5(4) integrator.
//!
//! Complex waypoints let a path go around the hyperplanes `ker l_C`, which
//! separate the real domain.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ConnectionForm;
use crate::error::{Error, Result};

type C = Complex64;

/// Piecewise-linear path through the listed waypoints.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaPath {
    pub waypoints: Vec<Vec<C>>,
}

impl LambdaPath {
    pub fn new(waypoints: Vec<Vec<C>>) -> Self {
        LambdaPath { waypoints }
    }

    pub fn real(waypoints: &[Vec<f64>]) -> Self {
        LambdaPath { waypoints: waypoints.iter().map(|w| w.iter().map(|&x| C::new(x, 0.0)).collect()).collect() }
    }

    /// The path followed by its reverse.
    pub fn there_and_back(&self) -> Self {
        let mut waypoints = self.waypoints.clone();
        waypoints.extend(self.waypoints.iter().rev().skip(1).cloned());
        LambdaPath { waypoints }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportOptions {
    /// Local error allowed per accepted step.
    pub tol: f64,
    pub min_step: f64,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions { tol: 1e-10, min_step: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportResult {
    pub value: Vec<C>,
    pub accepted: u64,
    pub rejected: u64,
}

/// A sparse matrix scaled by a coefficient that depends on the position.
struct Operator {
    triplets: Vec<(usize, usize, f64)>,
    form: Vec<i8>,
    cycle: bool,
}

fn form(coeffs: &[i8], v: &[C]) -> C {
    coeffs.iter().zip(v).fold(C::new(0.0, 0.0), |acc, (&c, x)| acc + f64::from(c) * x)
}

/// Rejects segments meeting some `ker l_C` and waypoints with `Re λ_e < 0`.
fn check_path(conn: &ConnectionForm, path: &LambdaPath) -> Result<()> {
    let g = &conn.graph;
    for w in &path.waypoints {
        if w.len() != g.n_edges() {
            return Err(Error::Dimension(format!("waypoint with {} entries for {} edges", w.len(), g.n_edges())));
        }
        if let Some(e) = w.iter().position(|x| x.re.is_nan() || x.re < 0.0) {
            return Err(Error::NegativeLambda(g.edge_id(e).to_string()));
        }
    }
    for pair in path.waypoints.windows(2) {
        let d: Vec<C> = pair[1].iter().zip(&pair[0]).map(|(b, a)| b - a).collect();
        for term in &conn.cycle_terms {
            let la = form(&term.form.coeffs, &pair[0]);
            let ld = form(&term.form.coeffs, &d);
            let hits = if ld.norm() == 0.0 {
                la.norm() == 0.0
            } else {
                // l_C(a + t d) vanishes at t = −l_C(a)/l_C(d)
                let t = -la / ld;
                t.im.abs() <= 1e-12 && t.re >= -1e-12 && t.re <= 1.0 + 1e-12
            };
            if hits {
                return Err(Error::ExcludedLocus(term.set.describe(g)));
            }
        }
    }
    Ok(())
}

/// Transports `start` along `path` by solving
/// `I′(s) = −Ω(λ(s))(λ′(s)) I(s)` on each segment.
pub fn transport(conn: &ConnectionForm, start: &[C], path: &LambdaPath, opts: TransportOptions) -> Result<TransportResult> {
    if start.len() != conn.dimension() {
        return Err(Error::Dimension(format!("{} initial values for {} trees", start.len(), conn.dimension())));
    }
    check_path(conn, path)?;
    let ops: Vec<Operator> = conn
        .path_terms
        .iter()
        .map(|t| (t, false))
        .chain(conn.cycle_terms.iter().map(|t| (t, true)))
        .map(|(t, cycle)| Operator {
            triplets: t.omega.triplets().map(|(i, j, v)| (i, j, crate::scalar::rational_to_f64(v))).collect(),
            form: t.form.coeffs.clone(),
            cycle,
        })
        .collect();
    let mut y = start.to_vec();
    let mut result = TransportResult { value: Vec::new(), accepted: 0, rejected: 0 };
    for (k, pair) in path.waypoints.windows(2).enumerate() {
        let a = &pair[0];
        let d: Vec<C> = pair[1].iter().zip(a).map(|(b, a)| b - a).collect();
        let rhs = |s: f64, y: &[C], out: &mut [C]| {
            out.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
            let lambda: Vec<C> = a.iter().zip(&d).map(|(a, d)| a + s * d).collect();
            for op in &ops {
                let mut coeff = form(&op.form, &d);
                if op.cycle {
                    coeff /= form(&op.form, &lambda);
                }
                if coeff.norm() == 0.0 {
                    continue;
                }
                for &(i, j, v) in &op.triplets {
                    out[i] -= coeff * v * y[j];
                }
            }
        };
        integrate_segment(&rhs, &mut y, opts, k as f64, &mut result)?;
    }
    result.value = y;
    Ok(result)
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const NODES: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// fifth-order weights minus the embedded fourth-order ones
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

fn integrate_segment<F>(rhs: &F, y: &mut [C], opts: TransportOptions, offset: f64, res: &mut TransportResult) -> Result<()>
where
    F: Fn(f64, &[C], &mut [C]),
{
    let n = y.len();
    let mut k = vec![vec![C::new(0.0, 0.0); n]; 7];
    let mut stage = vec![C::new(0.0, 0.0); n];
    let mut s = 0.0;
    let mut h: f64 = 0.01;
    rhs(0.0, y, &mut k[0]);
    while s < 1.0 {
        h = h.min(1.0 - s);
        if h < opts.min_step {
            return Err(Error::StepUnderflow(offset + s));
        }
        for i in 1..7 {
            for (c, yc) in stage.iter_mut().enumerate() {
                *yc = y[c] + h * (0..i).map(|j| A[i - 1][j] * k[j][c]).sum::<C>();
            }
            rhs(s + NODES[i] * h, &stage, &mut k[i]);
        }
        // stage now holds the fifth-order solution, k[6] its derivative
        let err = (0..n)
            .map(|c| (h * (0..7).map(|j| E[j] * k[j][c]).sum::<C>()).norm())
            .fold(0.0, f64::max);
        if err <= opts.tol {
            s += h;
            y.copy_from_slice(&stage);
            k.swap(0, 6);
            res.accepted += 1;
        } else {
            res.rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * (opts.tol / err).powf(0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(())
}
