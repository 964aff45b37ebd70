//! Adaptive composite Gauss-Legendre quadrature.
//!
//! Fifteen-point panels are bisected worst-first until the summed bisection
//! corrections fall below the tolerance on the running whole-interval
//! estimate. Judging convergence globally keeps the tolerance meaningful even
//! when the first coarse pass steps over a narrow feature and badly
//! underestimates the integral. Callers can seed panel edges near known peaks
//! so such features are found quickly.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::Real;

const GL_POINTS: usize = 15;
const MAX_DEPTH: u32 = 48;
const MAX_SPLITS: usize = 100_000;

/// Nodes and weights on [−1, 1], computed once by Newton iteration on the
/// Legendre recurrence.
fn gl15_nodes() -> &'static [(f64, f64); GL_POINTS] {
    static NODES: OnceLock<[(f64, f64); GL_POINTS]> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_POINTS;
        let mut out = [(0.0, 0.0); GL_POINTS];
        for (i, slot) in out.iter_mut().enumerate() {
            // Chebyshev-like initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            *slot = (x, w);
        }
        out
    })
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Single 15-point panel integral of f over [lo, hi].
fn panel<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> T {
    let half = T::val(0.5) * (hi - lo);
    let center = T::val(0.5) * (hi + lo);
    let mut acc = T::zero();
    for &(x, w) in gl15_nodes() {
        acc += T::val(w) * f(center + half * T::val(x));
    }
    acc * half
}

struct Segment<T> {
    lo: T,
    hi: T,
    // bisected estimate and its halves, kept so children skip one coarse pass
    estimate: T,
    left: T,
    right: T,
    err: T,
    depth: u32,
    // error at the rounding-noise floor: further splits cannot improve it
    settled: bool,
}

fn segment<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T, coarse: T, depth: u32) -> Segment<T> {
    let mid = T::val(0.5) * (lo + hi);
    let left = panel(f, lo, mid);
    let right = panel(f, mid, hi);
    let estimate = left + right;
    let err = (estimate - coarse).abs();
    let noise = T::epsilon() * T::val(8.0) * (left.abs() + right.abs());
    Segment {
        lo,
        hi,
        estimate,
        left,
        right,
        err,
        depth,
        settled: err <= noise,
    }
}

/// Adaptive Gauss-Legendre integral of `f` over [a, b].
///
/// Panels are bisected worst-error-first until the summed bisection
/// corrections drop below `max(abs_tol, rel_tol·|I|)` for the current whole
/// estimate I; `split_hints` inserts initial panel edges (points outside
/// (a, b) are ignored). Fails with a non-convergence error when refinement
/// stalls, as it does on a non-integrable singularity.
pub fn adaptive_gauss_legendre<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
    split_hints: &[T],
) -> Result<T> {
    if !(b > a) {
        return Err(Error::Domain {
            name: "integration interval",
            value: (b - a).approx_f64(),
            expected: "b > a",
        });
    }
    let mut edges: Vec<T> = vec![a];
    let mut hints: Vec<T> = split_hints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    hints.sort_by(|p, q| p.partial_cmp(q).expect("finite split hints"));
    for h in hints {
        if h > *edges.last().expect("non-empty") {
            edges.push(h);
        }
    }
    edges.push(b);

    let mut segments: Vec<Segment<T>> = edges
        .windows(2)
        .map(|w| segment(&f, w[0], w[1], panel(&f, w[0], w[1]), 0))
        .collect();

    for _ in 0..MAX_SPLITS {
        let total: T = segments.iter().map(|s| s.estimate).sum();
        let err: T = segments.iter().map(|s| s.err).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }

        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.settled)
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i);
        let Some(idx) = worst else {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature",
                detail: format!(
                    "residual {} above tolerance but at the rounding-noise floor",
                    err.approx_f64()
                ),
            });
        };

        let s = segments.swap_remove(idx);
        let mid = T::val(0.5) * (s.lo + s.hi);
        if s.depth >= MAX_DEPTH || !(s.lo < mid && mid < s.hi) {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature",
                detail: format!(
                    "bisection depth exhausted on [{}, {}], residual {}",
                    s.lo.approx_f64(),
                    s.hi.approx_f64(),
                    s.err.approx_f64()
                ),
            });
        }
        segments.push(segment(&f, s.lo, mid, s.left, s.depth + 1));
        segments.push(segment(&f, mid, s.hi, s.right, s.depth + 1));
    }
    Err(Error::NoConvergence {
        what: "adaptive quadrature",
        detail: format!("split budget of {MAX_SPLITS} panels exhausted"),
    })
}
