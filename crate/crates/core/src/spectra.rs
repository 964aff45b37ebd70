//! Decay-rate theory: geometric and series rate formulas, reservoir spectrum,
//! measurement broadening, their overlap integral, the effective measurement
//! rate, the continuous-noise closed form, and validity diagnostics.
//!
//! All spectra live on the frequency zone [−π/τ_r, π/τ_r] fixed by the
//! round-trip discretization.

use crate::error::{Error, Result};
use crate::noise::CorrelationModel;
use crate::polarization::AbsorberTransmissivity;
use crate::quadrature::adaptive_gauss_legendre;
use crate::scalar::Real;

pub use crate::closed_forms::VALIDITY_THRESHOLD;

/// Condition names reported in validity diagnostics.
pub const COND_RATE_VS_MEMORY: &str = "R << Gamma_R";
pub const COND_TRANSIENT: &str = "n >> |gamma| theta / (1 - (gamma theta)^2)";
pub const COND_WEAK_DEPHASING: &str = "B^2 << (1 - gamma)(1 - gamma theta)";
pub const COND_ASYMPTOTE: &str = "B^2 << (1 - gamma theta)^2";
pub const COND_RATE_VS_TOTAL: &str = "R << Gamma_R + Gamma_0";

/// One "much smaller than" inequality reported as a left/right ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidityCondition<T> {
    pub name: &'static str,
    pub ratio: T,
    pub satisfied: bool,
}

/// Decay rate with the validity diagnostics of the formula that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct RateResult<T> {
    pub r: T,
    pub diagnostics: Vec<ValidityCondition<T>>,
}

/// Tabulated spectral density on an increasing frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFunction<T> {
    pub samples: Vec<(T, T)>,
}

impl<T: Real> SpectralFunction<T> {
    /// Samples `f` on a uniform grid of `points` nodes over [lo, hi].
    pub fn tabulate(
        f: impl Fn(T) -> Result<T>,
        lo: T,
        hi: T,
        points: usize,
    ) -> Result<Self> {
        if points < 2 || !(hi > lo) {
            return Err(Error::Domain {
                name: "grid",
                value: points as f64,
                expected: "at least 2 points over a nonempty interval",
            });
        }
        let step = (hi - lo) / T::count(points - 1);
        let mut samples = Vec::with_capacity(points);
        for i in 0..points {
            let omega = if i + 1 == points { hi } else { lo + T::count(i) * step };
            samples.push((omega, f(omega)?));
        }
        Ok(Self { samples })
    }

    /// Checks frequency ordering and pointwise nonnegativity.
    pub fn validate(&self) -> Result<()> {
        for pair in self.samples.windows(2) {
            if !(pair[1].0 > pair[0].0) {
                return Err(Error::Domain {
                    name: "omega",
                    value: pair[1].0.approx_f64(),
                    expected: "strictly increasing frequencies",
                });
            }
        }
        for &(_, v) in &self.samples {
            if !(v >= T::zero()) {
                return Err(Error::Domain {
                    name: "spectral density",
                    value: v.approx_f64(),
                    expected: ">= 0",
                });
            }
        }
        Ok(())
    }

    /// Trapezoid integral over the tabulated grid.
    pub fn trapezoid_integral(&self) -> T {
        let half = T::val(0.5);
        self.samples
            .windows(2)
            .map(|p| half * (p[1].0 - p[0].0) * (p[1].1 + p[0].1))
            .sum()
    }
}

/// Exponentially correlated continuous rotation-rate noise
/// k(t) = k0·e^(−Γ_R t).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuousNoiseModel<T> {
    pub k0: T,
    pub gamma_r: T,
}

impl<T: Real> ContinuousNoiseModel<T> {
    pub fn new(k0: T, gamma_r: T) -> Result<Self> {
        if !(k0 >= T::zero()) || !k0.is_finite() {
            return Err(Error::Domain {
                name: "k0",
                value: k0.approx_f64(),
                expected: "finite, >= 0",
            });
        }
        if !(gamma_r > T::zero()) || !gamma_r.is_finite() {
            return Err(Error::Domain {
                name: "gamma_r",
                value: gamma_r.approx_f64(),
                expected: "finite, > 0",
            });
        }
        Ok(Self { k0, gamma_r })
    }
}

fn ratio_condition<T: Real>(name: &'static str, ratio: T, threshold: T) -> ValidityCondition<T> {
    ValidityCondition {
        name,
        ratio,
        satisfied: ratio.is_finite() && ratio <= threshold,
    }
}

/// Validity diagnostics of the asymptotic rate description for geometric
/// correlations, at the default threshold.
pub fn validity_check<T: Real>(
    model: &CorrelationModel<T>,
    theta: AbsorberTransmissivity<T>,
    n: usize,
) -> Vec<ValidityCondition<T>> {
    validity_check_with_threshold(model, theta, n, T::val(VALIDITY_THRESHOLD))
}

/// Validity diagnostics with a caller-chosen satisfaction threshold.
///
/// Each inequality is reported as the ratio of its left side to its right
/// side; a ratio at or below the threshold counts as satisfied.
pub fn validity_check_with_threshold<T: Real>(
    model: &CorrelationModel<T>,
    theta: AbsorberTransmissivity<T>,
    n: usize,
    threshold: T,
) -> Vec<ValidityCondition<T>> {
    let one = T::one();
    let b2 = model.b * model.b;
    let gamma = model.gamma;
    let th = theta.value();
    let x = gamma * th;

    let rate_vs_memory = if gamma == one || x == one {
        T::infinity()
    } else {
        b2 * (one + x) / ((one - x) * (one - gamma))
    };

    let n_star = if gamma == T::zero() || th == T::zero() {
        T::zero()
    } else if x.abs() == one {
        T::infinity()
    } else {
        gamma.abs() * th / (one - x * x)
    };
    let transient = if n_star == T::zero() {
        T::zero()
    } else if n == 0 {
        T::infinity()
    } else {
        n_star / T::count(n)
    };

    let weak_dephasing = if gamma == one || x == one {
        T::infinity()
    } else {
        b2 / ((one - gamma) * (one - x))
    };

    let asymptote = if x == one {
        T::infinity()
    } else {
        b2 / ((one - x) * (one - x))
    };

    vec![
        ratio_condition(COND_RATE_VS_MEMORY, rate_vs_memory, threshold),
        ratio_condition(COND_TRANSIENT, transient, threshold),
        ratio_condition(COND_WEAK_DEPHASING, weak_dephasing, threshold),
        ratio_condition(COND_ASYMPTOTE, asymptote, threshold),
    ]
}

/// Asymptotic-regime diagnostics attached to rate results: the settling
/// condition evaluated at the first round trip, and the weak-dephasing
/// condition. Callers with a specific horizon should use `validity_check`.
fn rate_diagnostics<T: Real>(
    model: &CorrelationModel<T>,
    theta: AbsorberTransmissivity<T>,
) -> Vec<ValidityCondition<T>> {
    validity_check(model, theta, 1)
        .into_iter()
        .filter(|c| c.name == COND_TRANSIENT || c.name == COND_WEAK_DEPHASING)
        .collect()
}

/// Decay rate for geometric correlations K_lag = B²γ^|lag| thinned by the
/// absorber: R = [(1+γθ)/(1−γθ)]·B²/τ_r.
///
/// Diverges as γθ → 1. Independent of θ at γ = 0, decreasing in measurement
/// effectiveness for γ > 0 and increasing for γ < 0.
pub fn decay_rate_geometric<T: Real>(
    model: &CorrelationModel<T>,
    theta: AbsorberTransmissivity<T>,
) -> Result<RateResult<T>> {
    let one = T::one();
    let x = model.gamma * theta.value();
    if x == one {
        return Err(Error::Divergent {
            what: "geometric decay rate",
            name: "gamma*theta",
            value: 1.0,
        });
    }
    let r = (one + x) / (one - x) * model.b * model.b / model.tau_r;
    Ok(RateResult {
        r,
        diagnostics: rate_diagnostics(model, theta),
    })
}

/// Decay rate from an arbitrary stationary correlation function:
/// R = (1/τ_r)·Σ_k K(k)·θ^|k|, truncated at |k| = `truncation`.
///
/// Fails unless the discarded tail is negligible against K(0) at the cutoff.
pub fn decay_rate_series<T: Real>(
    correlations: impl Fn(i64) -> T,
    theta: AbsorberTransmissivity<T>,
    tau_r: T,
    truncation: usize,
) -> Result<RateResult<T>> {
    if !(tau_r > T::zero()) || !tau_r.is_finite() {
        return Err(Error::Domain {
            name: "tau_r",
            value: tau_r.approx_f64(),
            expected: "finite, > 0",
        });
    }
    let th = theta.value();
    let k0 = correlations(0);
    let cutoff = truncation as i64;
    let edge = th.powi(truncation as i32);
    let bound = T::val(1e-14) * k0.abs();
    let tail = correlations(cutoff).abs().max(correlations(-cutoff).abs()) * edge;
    if tail > bound {
        return Err(Error::NoConvergence {
            what: "correlation series rate",
            detail: format!(
                "tail {} at cutoff {} exceeds {}",
                tail.approx_f64(),
                truncation,
                bound.approx_f64()
            ),
        });
    }
    let mut acc = T::zero();
    for k in (1..=cutoff).rev() {
        acc += (correlations(k) + correlations(-k)) * th.powi(k as i32);
    }
    acc += k0;
    Ok(RateResult {
        r: acc / tau_r,
        diagnostics: Vec::new(),
    })
}

fn zone_check<T: Real>(omega: T, tau_r: T) -> Result<()> {
    let zone = T::PI() / tau_r;
    if !(omega.abs() <= zone * (T::one() + T::epsilon() * T::val(4.0))) {
        return Err(Error::Domain {
            name: "omega",
            value: omega.approx_f64(),
            expected: "inside the zone [-pi/tau_r, pi/tau_r]",
        });
    }
    Ok(())
}

fn reservoir_eval<T: Real>(b: T, gamma: T, tau_r: T, omega: T) -> T {
    let one = T::one();
    let two = T::val(2.0);
    let num = b * b / (two * T::PI() * tau_r) * (one - gamma * gamma);
    num / (one + gamma * gamma - two * gamma * (omega * tau_r).cos())
}

fn broadening_eval<T: Real>(th: T, tau_r: T, omega: T) -> T {
    let one = T::one();
    let two = T::val(2.0);
    let num = tau_r / (two * T::PI()) * (one - th * th);
    num / (one + th * th - two * th * (omega * tau_r).cos())
}

/// Power spectrum of the jump chain on the zone:
/// G(ω) = (B²/2πτ_r)·(1−γ²)/(1+γ² − 2γ cos ωτ_r).
///
/// Flat at γ = 0, peaked at ω = 0 for γ > 0 and at the zone edges for γ < 0;
/// degenerates to a line at |γ| = 1.
pub fn reservoir_spectrum<T: Real>(model: &CorrelationModel<T>, omega: T) -> Result<T> {
    if model.gamma.abs() == T::one() {
        return Err(Error::Divergent {
            what: "reservoir spectrum",
            name: "gamma",
            value: model.gamma.approx_f64(),
        });
    }
    zone_check(omega, model.tau_r)?;
    Ok(reservoir_eval(model.b, model.gamma, model.tau_r, omega))
}

/// Measurement-induced broadening of the coherence on the zone:
/// F(ω) = (τ_r/2π)·(1−θ²)/(1+θ² − 2θ cos ωτ_r), normalized to one.
///
/// Flat at θ = 0; narrows toward a delta line as θ → 1 (rejected at θ = 1).
pub fn measurement_broadening<T: Real>(
    theta: AbsorberTransmissivity<T>,
    tau_r: T,
    omega: T,
) -> Result<T> {
    if !(tau_r > T::zero()) || !tau_r.is_finite() {
        return Err(Error::Domain {
            name: "tau_r",
            value: tau_r.approx_f64(),
            expected: "finite, > 0",
        });
    }
    let th = theta.value();
    if th == T::one() {
        return Err(Error::Divergent {
            what: "measurement broadening",
            name: "theta",
            value: 1.0,
        });
    }
    zone_check(omega, tau_r)?;
    Ok(broadening_eval(th, tau_r, omega))
}

/// Decay rate as the spectral overlap R = 2π·∫ G(ω) F(ω) dω over the zone,
/// by adaptive quadrature. Agrees with `decay_rate_geometric`.
pub fn decay_rate_overlap<T: Real>(
    model: &CorrelationModel<T>,
    theta: AbsorberTransmissivity<T>,
) -> Result<RateResult<T>> {
    let th = theta.value();
    if th == T::one() {
        return Err(Error::Divergent {
            what: "overlap decay rate",
            name: "theta",
            value: 1.0,
        });
    }
    if model.gamma.abs() == T::one() {
        return Err(Error::Divergent {
            what: "overlap decay rate",
            name: "gamma",
            value: model.gamma.approx_f64(),
        });
    }
    let zone = T::PI() / model.tau_r;
    let two_pi = T::val(2.0) * T::PI();
    let b = model.b;
    let gamma = model.gamma;
    let tau_r = model.tau_r;
    let integrand = move |omega: T| {
        two_pi * reservoir_eval(b, gamma, tau_r, omega) * broadening_eval(th, tau_r, omega)
    };
    let half_zone = T::val(0.5) * zone;
    let hints = [-half_zone, T::zero(), half_zone];
    let tol = T::val(1e-10);
    let r = adaptive_gauss_legendre(integrand, -zone, zone, tol, tol, &hints)?;
    Ok(RateResult {
        r,
        diagnostics: rate_diagnostics(model, theta),
    })
}

/// Effective rate of measurements, ν = 2(1−θ)/[(1+θ)τ_r]; equals the
/// reciprocal of π·F(0).
///
/// 2/τ_r for projective measurements, ≈ (1−θ)/τ_r for weak ones.
pub fn effective_measurement_rate<T: Real>(theta: AbsorberTransmissivity<T>, tau_r: T) -> T {
    debug_assert!(tau_r > T::zero());
    let one = T::one();
    let th = theta.value();
    T::val(2.0) * (one - th) / ((one + th) * tau_r)
}

/// Fixed-angle decay rate in the measurement-slowdown form
/// R = 2(Δφ/τ_r)²/ν; identical to (1+θ)Δφ²/[(1−θ)τ_r].
pub fn qze_rate_form<T: Real>(
    delta_phi: T,
    tau_r: T,
    theta: AbsorberTransmissivity<T>,
) -> Result<T> {
    if !(tau_r > T::zero()) || !tau_r.is_finite() {
        return Err(Error::Domain {
            name: "tau_r",
            value: tau_r.approx_f64(),
            expected: "finite, > 0",
        });
    }
    if theta.value() == T::one() {
        return Err(Error::Divergent {
            what: "measurement-slowdown rate form",
            name: "theta",
            value: 1.0,
        });
    }
    let nu = effective_measurement_rate(theta, tau_r);
    let scaled = delta_phi / tau_r;
    Ok(T::val(2.0) * scaled * scaled / nu)
}

/// Lorentzian power spectrum of exponentially correlated continuous noise:
/// G(ω) = (k0/π)·Γ_R/(Γ_R² + ω²).
pub fn lorentzian_reservoir<T: Real>(noise: &ContinuousNoiseModel<T>, omega: T) -> T {
    noise.k0 / T::PI() * noise.gamma_r / (noise.gamma_r * noise.gamma_r + omega * omega)
}

/// Normalized Lorentzian broadening of half-width Γ₀/2:
/// F(ω) = (1/π)·(Γ₀/2)/((Γ₀/2)² + ω²).
pub fn lorentzian_broadening<T: Real>(gamma0: T, omega: T) -> T {
    debug_assert!(gamma0 > T::zero());
    let half = T::val(0.5) * gamma0;
    half / (T::PI() * (half * half + omega * omega))
}

/// Decay rate for continuous exponentially correlated noise under
/// measurement rate Γ₀: R = 2k0/(Γ_R + Γ₀/2).
///
/// Reduces to 2k0/Γ_R without measurements and is suppressed toward zero as
/// Γ₀ grows.
pub fn continuous_rate<T: Real>(
    noise: &ContinuousNoiseModel<T>,
    gamma0: T,
) -> Result<RateResult<T>> {
    if !(gamma0 >= T::zero()) || !gamma0.is_finite() {
        return Err(Error::Domain {
            name: "gamma0",
            value: gamma0.approx_f64(),
            expected: "finite, >= 0",
        });
    }
    let two = T::val(2.0);
    let half = T::val(0.5);
    let r = two * noise.k0 / (noise.gamma_r + half * gamma0);
    let threshold = T::val(VALIDITY_THRESHOLD);
    let diagnostics = vec![
        ratio_condition(COND_RATE_VS_MEMORY, r / noise.gamma_r, threshold),
        ratio_condition(COND_RATE_VS_TOTAL, r / (noise.gamma_r + gamma0), threshold),
    ];
    Ok(RateResult { r, diagnostics })
}
