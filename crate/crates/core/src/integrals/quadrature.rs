//! Nested adaptive Gauss–Kronrod quadrature over a polyhedron in `u`-space.
//!
//! The domain `{u : a·u + b ≥ 0}` is projected onto every prefix of the
//! coordinates by Fourier–Motzkin elimination, so each nested 1-d integral
//! runs over its exact interval and the integrand stays continuous up to the
//! panel ends. Unbounded intervals `[a, ∞)` are mapped to `[0, 1)` by
//! `u = a + v/(1 − v)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Largest supported number of nested coordinates.
pub const MAX_DIM: usize = 4;

const MAX_PANELS: usize = 2000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Value, error estimate and number of integrand calls.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evals: u64,
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point panel. `f` returns a value and the error already made in
/// computing it; those errors are integrated with the Kronrod weights.
fn panel<F>(f: &mut F, a: f64, b: f64, evals: &mut u64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<(f64, f64, u64)>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (mut k, mut g, mut abs, mut inner) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..8 {
        let nodes: &[f64] = if i == 7 { &[0.0] } else { &[-XGK[i], XGK[i]] };
        for &x in nodes {
            let (v, e, n) = f(c + h * x)?;
            *evals += n;
            k += WGK[i] * v;
            abs += WGK[i] * v.abs();
            inner += WGK[i] * e;
            if i % 2 == 1 {
                g += WG[i / 2] * v;
            }
        }
    }
    let value = h * k;
    let error = h.abs() * ((k - g).abs() + inner);
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::NonConvergence { value, error, tol: 0.0 });
    }
    Ok(Panel { a, b, value, error, abs: h.abs() * abs })
}

/// Globally adaptive integral of `f` over `[a, b]`, where `b` may be `+∞`.
pub fn adaptive<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Quad>
where
    F: FnMut(f64) -> Result<(f64, f64, u64)>,
{
    if b <= a {
        return Ok(Quad::default());
    }
    if b.is_infinite() {
        let g = move |v: f64| {
            let w = 1.0 - v;
            let (y, e, n) = f(a + v / w)?;
            let jac = 1.0 / (w * w);
            Ok((y * jac, e * jac, n))
        };
        return adaptive_finite(g, 0.0, 1.0, tol);
    }
    adaptive_finite(f, a, b, tol)
}

fn adaptive_finite<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Quad>
where
    F: FnMut(f64) -> Result<(f64, f64, u64)>,
{
    let mut evals = 0;
    let first = panel(&mut f, a, b, &mut evals)?;
    let (mut value, mut error, mut abs) = (first.value, first.error, first.abs);
    let mut heap = BinaryHeap::from([first]);
    while error > tol.max(64.0 * f64::EPSILON * abs) {
        if heap.len() >= MAX_PANELS {
            return Err(Error::NonConvergence { value, error, tol });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NonConvergence { value, error, tol });
        }
        let left = panel(&mut f, worst.a, mid, &mut evals)?;
        let right = panel(&mut f, mid, worst.b, &mut evals)?;
        value += left.value + right.value - worst.value;
        abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
        // re-summing avoids drift from repeated updates
        error = heap.iter().map(|p| p.error).sum();
    }
    let value = heap.iter().map(|p| p.value).sum();
    Ok(Quad { value, error, evals })
}

/// `a·u + b ≥ 0`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constraint {
    pub a: [f64; MAX_DIM],
    pub b: f64,
}

impl Constraint {
    fn normalized(mut self) -> Self {
        let scale = self.a.iter().chain([&self.b]).fold(0.0f64, |m, x| m.max(x.abs()));
        if scale > 0.0 {
            for x in &mut self.a {
                *x /= scale;
                if x.abs() < 1e-12 {
                    *x = 0.0;
                }
            }
            self.b /= scale;
        }
        self
    }

    fn same_as(&self, other: &Self) -> bool {
        self.a.iter().zip(&other.a).all(|(x, y)| (x - y).abs() < 1e-12) && (self.b - other.b).abs() < 1e-12
    }

    fn partial(&self, u: &[f64]) -> f64 {
        self.b + self.a.iter().zip(u).map(|(a, x)| a * x).sum::<f64>()
    }
}

/// Constraints whose last nonzero coordinate is `k`, for every `k`, after
/// eliminating the later coordinates. `None` if the polyhedron is empty.
pub fn project(constraints: &[Constraint], dim: usize) -> Option<Vec<Vec<Constraint>>> {
    let mut current: Vec<Constraint> = Vec::new();
    for c in constraints {
        push_unique(&mut current, c.normalized());
    }
    let mut levels = vec![Vec::new(); dim];
    for k in (0..dim).rev() {
        let (with, without): (Vec<_>, Vec<_>) = current.iter().partition(|c| c.a[k] != 0.0);
        let mut next: Vec<Constraint> = without.into_iter().copied().collect();
        for p in with.iter().filter(|c| c.a[k] > 0.0) {
            for q in with.iter().filter(|c| c.a[k] < 0.0) {
                let mut c = Constraint { a: [0.0; MAX_DIM], b: p.b * -q.a[k] + q.b * p.a[k] };
                for j in 0..k {
                    c.a[j] = p.a[j] * -q.a[k] + q.a[j] * p.a[k];
                }
                push_unique(&mut next, c.normalized());
            }
        }
        levels[k] = with.into_iter().copied().collect();
        current = next;
    }
    if current.iter().any(|c| c.b < -1e-12) {
        return None;
    }
    Some(levels)
}

fn push_unique(list: &mut Vec<Constraint>, c: Constraint) {
    if c.a.iter().all(|&x| x == 0.0) && c.b >= 0.0 {
        return;
    }
    if !list.iter().any(|d| d.same_as(&c)) {
        list.push(c);
    }
}

/// The interval of coordinate `k` given `u[..k]`.
pub fn interval(level: &[Constraint], k: usize, u: &[f64]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for c in level {
        let rest = c.partial(&u[..k]);
        if c.a[k] > 0.0 {
            lo = lo.max(-rest / c.a[k]);
        } else {
            hi = hi.min(rest / -c.a[k]);
        }
    }
    (lo, hi)
}

/// Integrates `f` over the polyhedron given by `levels`, nesting coordinate
/// 0 outermost. Each inner level is solved to a tenth of its parent's
/// tolerance and its error estimate is integrated outward.
pub fn nested<F>(f: &F, levels: &[Vec<Constraint>], tol: f64) -> Result<Quad>
where
    F: Fn(&[f64]) -> f64,
{
    let mut u = [0.0; MAX_DIM];
    level(f, levels, 0, &mut u, tol)
}

fn level<F>(f: &F, levels: &[Vec<Constraint>], k: usize, u: &mut [f64; MAX_DIM], tol: f64) -> Result<Quad>
where
    F: Fn(&[f64]) -> f64,
{
    let d = levels.len();
    let (lo, hi) = interval(&levels[k], k, u);
    if lo.is_infinite() {
        return Err(Error::NonConvergence { value: f64::NAN, error: f64::INFINITY, tol });
    }
    if hi <= lo {
        return Ok(Quad::default());
    }
    let prefix = *u;
    if k + 1 == d {
        adaptive(
            |x| {
                let mut v = prefix;
                v[k] = x;
                Ok((f(&v[..d]), 0.0, 1))
            },
            lo,
            hi,
            tol,
        )
    } else {
        adaptive(
            |x| {
                let mut v = prefix;
                v[k] = x;
                let q = level(f, levels, k + 1, &mut v, 0.1 * tol)?;
                Ok((q.value, q.error, q.evals))
            },
            lo,
            hi,
            tol,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = adaptive(|x| Ok((x.powi(5) - 3.0 * x * x, 0.0, 1)), 0.0, 2.0, 1e-12).unwrap();
        assert!((q.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
        assert_eq!(q.evals, 15);
    }

    #[test]
    fn half_line() {
        let q = adaptive(|x| Ok(((-x).exp(), 0.0, 1)), 1.0, f64::INFINITY, 1e-10).unwrap();
        assert!((q.value - (-1.0f64).exp()).abs() < 1e-10, "{q:?}");
    }

    #[test]
    fn endpoint_singularity() {
        let q = adaptive(|x| Ok((x.powf(-0.5), 0.0, 1)), 0.0, 1.0, 1e-8).unwrap();
        assert!((q.value - 2.0).abs() < 1e-8, "{q:?}");
    }

    #[test]
    fn divergent_integral_fails() {
        assert!(matches!(
            adaptive(|x| Ok((1.0 / x, 0.0, 1)), 0.0, 1.0, 1e-8),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn triangle_area_by_projection() {
        // u0, u1 ≥ 0, u0 + u1 ≤ 1
        let mut cs = vec![
            Constraint { a: [1.0, 0.0, 0.0, 0.0], b: 0.0 },
            Constraint { a: [0.0, 1.0, 0.0, 0.0], b: 0.0 },
            Constraint { a: [-1.0, -1.0, 0.0, 0.0], b: 1.0 },
        ];
        let levels = project(&cs, 2).unwrap();
        let q = nested(&|u: &[f64]| u[0] * u[1], &levels, 1e-12).unwrap();
        assert!((q.value - 1.0 / 24.0).abs() < 1e-12);
        cs.push(Constraint { a: [-1.0, 0.0, 0.0, 0.0], b: -2.0 });
        assert!(project(&cs, 2).is_none());
    }
}
