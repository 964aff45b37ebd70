//! Analytic decay laws: fixed-angle results, two-state master solutions,
//! i.i.d. and persistence-chain exact formulas, and the accumulated dephasing
//! exponent W_n.
//!
//! Oscillatory regimes are evaluated by analytic continuation in complex
//! arithmetic; degenerate double roots go through their analytic limits.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::noise::CorrelationModel;
use crate::polarization::AbsorberTransmissivity;
use crate::scalar::Real;

/// Root-splitting threshold below which the double-root analytic limit is
/// used instead of dividing by the root difference.
const DEGENERATE_ROOT_SPLIT: f64 = 1e-9;

/// Default satisfaction threshold for "much smaller than" validity ratios.
pub const VALIDITY_THRESHOLD: f64 = 0.1;

/// One decay-curve sample: round-trip count, horizontal-polarization
/// probability, and the standard error when the curve is an ensemble mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayPoint<T> {
    pub n: usize,
    pub p_h: T,
    pub stderr: Option<T>,
}

/// Provenance of a decay curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveMeta<T> {
    pub model: String,
    pub theta: T,
    pub tau_r: Option<T>,
    pub seed: Option<u64>,
}

/// P_h(n) over round trips, with provenance metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayCurve<T> {
    pub points: Vec<DecayPoint<T>>,
    pub meta: CurveMeta<T>,
}

impl<T: Real> DecayCurve<T> {
    /// Checks that probabilities are in range and counts strictly increase.
    pub fn validate(&self) -> Result<()> {
        let tol = T::val(1e-9).max(T::epsilon() * T::val(16.0));
        let mut prev: Option<usize> = None;
        for pt in &self.points {
            if !(pt.p_h >= T::zero() && pt.p_h <= T::one() + tol) {
                return Err(Error::Domain {
                    name: "p_h",
                    value: pt.p_h.approx_f64(),
                    expected: "0 <= p_h <= 1 within tolerance",
                });
            }
            if let Some(p) = prev {
                if pt.n <= p {
                    return Err(Error::Domain {
                        name: "n",
                        value: pt.n as f64,
                        expected: "strictly increasing round-trip counts",
                    });
                }
            }
            prev = Some(pt.n);
        }
        Ok(())
    }
}

/// Rates (R, Γ₀) of the two-state relaxation solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MasterSolutionParams<T> {
    pub r: T,
    pub gamma0: T,
}

impl<T: Real> MasterSolutionParams<T> {
    pub fn new(r: T, gamma0: T) -> Result<Self> {
        if !(r >= T::zero()) || !r.is_finite() {
            return Err(Error::Domain {
                name: "r",
                value: r.approx_f64(),
                expected: "finite, >= 0",
            });
        }
        if !(gamma0 >= T::zero()) {
            return Err(Error::Domain {
                name: "gamma0",
                value: gamma0.approx_f64(),
                expected: ">= 0",
            });
        }
        Ok(Self { r, gamma0 })
    }
}

/// Free coherent rotation: cos²(nΔφ).
pub fn p_h_rabi<T: Real>(n: usize, delta_phi: T) -> T {
    let c = (T::count(n) * delta_phi).cos();
    c * c
}

/// Ideal projective measurement every round trip: cos^{2n}(Δφ).
pub fn p_h_projective<T: Real>(n: usize, delta_phi: T) -> T {
    let c = delta_phi.cos();
    (c * c).powi(n as i32)
}

/// Fixed rotation angle with partial absorption θ each round trip.
///
/// The probability is the squared linear combination of the nth powers of the
/// two eigenvalues λ = [(1+θ)cosΔφ ± D]/2, D² = (1+θ)²cos²Δφ − 4θ. Complex D
/// is handled by analytic continuation; D → 0 by the double-root limit.
/// Interpolates between cos²(nΔφ) at θ = 1 and cos^{2n}Δφ at θ = 0.
pub fn p_h_fixed_angle<T: Real>(
    n: usize,
    delta_phi: T,
    theta: AbsorberTransmissivity<T>,
) -> T {
    if n == 0 {
        return T::one();
    }
    let th = theta.value();
    let c = delta_phi.cos();
    let one = T::one();
    let two = T::val(2.0);
    let four = T::val(4.0);
    let trace = (one + th) * c;
    let d2 = trace * trace - four * th;
    let split = T::val(DEGENERATE_ROOT_SPLIT);
    if d2.abs() < split * split {
        // double root at λ = (1+θ)cosΔφ / 2
        let lam = trace / two;
        let amp = lam.powi(n as i32 - 1) * (lam + T::count(n) * (c - lam));
        return amp * amp;
    }
    let d = Complex::new(d2, T::zero()).sqrt();
    let l1 = (Complex::new(trace, T::zero()) + d).unscale(two);
    let l2 = (Complex::new(trace, T::zero()) - d).unscale(two);
    let cc = Complex::new(c, T::zero());
    let amp = (l1.powu(n as u32) * (cc - l2) + l2.powu(n as u32) * (l1 - cc)) / d;
    debug_assert!(
        amp.im.abs() < T::val(1e-10) * amp.re.abs().max(one),
        "imaginary residue {:?}",
        amp.im
    );
    amp.re * amp.re
}

/// Two-state relaxation with total dephasing weight w and measurement weight
/// g (both dimensionless, t-integrated): upper-level occupation
/// e^(−w − g/2)[cosh s + (g/2s) sinh s], s = √(w² + g²/4), written in a form
/// without growing exponentials.
fn two_state_relaxation<T: Real>(w: T, g: T) -> T {
    let half = T::val(0.5);
    let a = w + half * g;
    let s = (w * w + T::val(0.25) * g * g).sqrt();
    if s == T::zero() {
        return T::one();
    }
    let coef = half * g / s;
    // a − s computed via (a² − s²)/(a + s) = wg/(a + s) to avoid cancellation
    let slow = (-(w * g) / (a + s)).exp();
    let fast = (-(a + s)).exp();
    half * ((T::one() + coef) * slow + (T::one() - coef) * fast)
}

/// Continuous-time averaged horizontal-polarization probability under
/// dephasing rate R and measurement rate Γ₀.
///
/// Reduces to ½(1 + e^(−2Rt)) without measurements and to e^(−Rt) when
/// Γ₀ ≫ R.
pub fn p_h_master<T: Real>(t: T, params: MasterSolutionParams<T>) -> T {
    two_state_relaxation(params.r * t, params.gamma0 * t)
}

/// Independent identically distributed jumps with ⟨cos 2Δφ⟩ = `mean_cos2`:
/// P_h(n) = ½ + ½·mean_cos2ⁿ.
pub fn p_h_iid<T: Real>(n: usize, mean_cos2: T) -> T {
    debug_assert!(mean_cos2.abs() <= T::one() + T::epsilon());
    let half = T::val(0.5);
    half + half * mean_cos2.powi(n as i32)
}

/// Two-point ±Δφ i.i.d. chain: P_h(n) = ½ + ½ cosⁿ(2Δφ).
pub fn p_h_iid_two_point<T: Real>(n: usize, delta_phi: T) -> T {
    p_h_iid(n, (T::val(2.0) * delta_phi).cos())
}

/// Exact solution for the two-point persistence chain with repeat
/// probability p.
///
/// P_h(n) = ½ + [g(r) − g(−r)]/(4r) with g(r) = (q cos2Δφ + r)(p cos2Δφ + r)ⁿ
/// and r = √(q² − p² sin²2Δφ), q = 1 − p. Oscillatory r² < 0 is evaluated by
/// analytic continuation, r → 0 by the analytic limit.
pub fn p_h_persistence_exact<T: Real>(n: usize, delta_phi: T, p: T) -> T {
    if n == 0 {
        return T::one();
    }
    let one = T::one();
    let half = T::val(0.5);
    let two = T::val(2.0);
    let q = one - p;
    let (s2, c2) = (two * delta_phi).sin_cos();
    let r2 = q * q - p * p * s2 * s2;
    let split = T::val(DEGENERATE_ROOT_SPLIT);
    if r2.abs() < split * split {
        let base = p * c2;
        let lim = base.powi(n as i32) + T::count(n) * q * c2 * base.powi(n as i32 - 1);
        return half + half * lim;
    }
    let r = Complex::new(r2, T::zero()).sqrt();
    let qc = Complex::new(q * c2, T::zero());
    let pc = Complex::new(p * c2, T::zero());
    let gp = (qc + r) * (pc + r).powu(n as u32);
    let gm = (qc - r) * (pc - r).powu(n as u32);
    let diff = (gp - gm) / (r.scale(T::val(4.0)));
    debug_assert!(
        diff.im.abs() < T::val(1e-10),
        "imaginary residue {:?}",
        diff.im
    );
    half + diff.re
}

/// Long-chain approximation of the persistence solution:
/// P_h(n) ≈ ½ + ½[cos(2Δφ·p/q)]^(qn/p). Undefined at p ∈ {0, 1}.
pub fn p_h_persistence_approx<T: Real>(n: usize, delta_phi: T, p: T) -> Result<T> {
    if p <= T::zero() || p >= T::one() {
        return Err(Error::Domain {
            name: "p",
            value: p.approx_f64(),
            expected: "0 < p < 1",
        });
    }
    let q = T::one() - p;
    let two = T::val(2.0);
    let half = T::val(0.5);
    let base = (two * delta_phi * p / q).cos();
    Ok(half + half * base.powf(q * T::count(n) / p))
}

/// Accumulated dephasing exponent over n round trips.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WExponent<T> {
    /// Exact double sum: W_n = nB² + 2·Σ_{m<n} (n−m) B² (γθ)^m.
    pub value: T,
    /// Large-n geometric asymptote
    /// nB²(1+γθ)/(1−γθ) − 2B²γθ/(1−γθ)².
    pub asymptote: T,
    /// Whether the asymptote is inside its validity regime
    /// (B² ≪ (1−γθ)² and n ≫ |γ|θ/(1−(γθ)²), at the default threshold).
    pub asymptote_valid: bool,
}

/// Exact accumulated dephasing exponent W_n for geometric correlations
/// thinned by the absorber, plus its asymptote and a validity flag.
pub fn w_exponent<T: Real>(
    model: &CorrelationModel<T>,
    theta: AbsorberTransmissivity<T>,
    n: usize,
) -> WExponent<T> {
    let one = T::one();
    let two = T::val(2.0);
    let b2 = model.b * model.b;
    let x = model.gamma * theta.value();

    let mut value = T::zero();
    if n > 0 {
        value = b2;
        let mut pow = one; // x^(j−1)
        let mut acc = T::zero(); // Σ_{m=1}^{j−1} x^m
        for _ in 2..=n {
            pow *= x;
            acc += pow;
            value += b2 * (one + two * acc);
        }
    }

    let asymptote = if x == one {
        T::infinity()
    } else {
        let nn = T::count(n);
        nn * b2 * (one + x) / (one - x) - two * b2 * x / ((one - x) * (one - x))
    };

    let threshold = T::val(VALIDITY_THRESHOLD);
    let amplitude_ok = x != one && b2 / ((one - x) * (one - x)) <= threshold;
    let settle = model.gamma.abs() * theta.value();
    let transient_ok = if settle == T::zero() {
        true
    } else if n == 0 || x.abs() == one {
        false
    } else {
        settle / (one - x * x) / T::count(n) <= threshold
    };

    WExponent {
        value,
        asymptote,
        asymptote_valid: amplitude_ok && transient_ok,
    }
}

/// Averaged horizontal-polarization probability after n round trips with
/// geometric jump correlations and absorber transmissivity θ.
///
/// Two-state relaxation driven by the exact exponent W_n and the accumulated
/// measurement weight −2n·lnθ; at θ = 0 the vertical population is pinned at
/// zero and the probability reduces to e^(−W_n) = e^(−nB²).
pub fn p_h_master_discrete<T: Real>(
    n: usize,
    model: &CorrelationModel<T>,
    theta: AbsorberTransmissivity<T>,
) -> T {
    let th = theta.value();
    let b2 = model.b * model.b;
    if th == T::zero() {
        return (-T::count(n) * b2).exp();
    }
    let w = w_exponent(model, theta, n).value;
    let g = -T::val(2.0) * T::count(n) * th.ln();
    two_state_relaxation(w, g)
}
