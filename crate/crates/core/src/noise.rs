//! Random rotation-angle chains: model definitions, seeded sampling, and
//! stationary correlation functions.
//!
//! Chains are stationary with zero mean angle; successive jumps may be
//! correlated. The two-point persistence chain maps onto the geometric
//! correlation family K_lag = B²γ^|lag| with B = Δφ and γ = 2p − 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{persistence_chain_spec, ChainSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Stochastic process generating the per-round-trip rotation angles.
#[derive(Clone, Debug, PartialEq)]
pub enum JumpModel<T> {
    /// Deterministic rotation by the same angle every round trip.
    Fixed { delta_phi: T },
    /// Independent ±Δφ with probability 1/2 each.
    IidTwoPoint { delta_phi: T },
    /// ±Δφ chain that repeats the previous sign with probability p.
    Persistence { delta_phi: T, p: T },
    /// Arbitrary finite Markov chain of angles.
    FiniteMarkov(ChainSpec<T>),
}

impl<T: Real> JumpModel<T> {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &'static str, v: T| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain {
                    name,
                    value: v.approx_f64(),
                    expected: "finite",
                })
            }
        };
        match self {
            Self::Fixed { delta_phi } | Self::IidTwoPoint { delta_phi } => {
                finite("delta_phi", *delta_phi)
            }
            Self::Persistence { delta_phi, p } => {
                finite("delta_phi", *delta_phi)?;
                if !(*p >= T::zero() && *p <= T::one()) {
                    return Err(Error::Domain {
                        name: "p",
                        value: p.approx_f64(),
                        expected: "0 <= p <= 1",
                    });
                }
                Ok(())
            }
            Self::FiniteMarkov(spec) => spec.validate(),
        }
    }

    /// Equivalent finite Markov chain, used for exact reference curves.
    pub fn chain_spec(&self) -> ChainSpec<T> {
        let half = T::val(0.5);
        match self {
            Self::Fixed { delta_phi } => ChainSpec {
                values: vec![*delta_phi],
                p0: vec![T::one()],
                transition: vec![vec![T::one()]],
            },
            Self::IidTwoPoint { delta_phi } => ChainSpec {
                values: vec![*delta_phi, -*delta_phi],
                p0: vec![half, half],
                transition: vec![vec![half, half], vec![half, half]],
            },
            Self::Persistence { delta_phi, p } => persistence_chain_spec(*delta_phi, *p),
            Self::FiniteMarkov(spec) => spec.clone(),
        }
    }

    /// Distinct angle values the chain can take.
    pub fn values(&self) -> Vec<T> {
        match self {
            Self::Fixed { delta_phi } => vec![*delta_phi],
            Self::IidTwoPoint { delta_phi } | Self::Persistence { delta_phi, .. } => {
                vec![*delta_phi, -*delta_phi]
            }
            Self::FiniteMarkov(spec) => spec.values.clone(),
        }
    }

    /// Short human-readable tag for provenance metadata.
    pub fn description(&self) -> String {
        match self {
            Self::Fixed { delta_phi } => format!("fixed(delta_phi={delta_phi})"),
            Self::IidTwoPoint { delta_phi } => format!("iid-two-point(delta_phi={delta_phi})"),
            Self::Persistence { delta_phi, p } => {
                format!("persistence(delta_phi={delta_phi}, p={p})")
            }
            Self::FiniteMarkov(spec) => format!("finite-markov({} states)", spec.len()),
        }
    }
}

/// Stationary geometric correlation family: K_lag = B²γ^|lag|.
///
/// `b` is the root-mean-square jump angle, `gamma` the correlation degree of
/// successive jumps, `tau_r` the round-trip time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationModel<T> {
    pub b: T,
    pub gamma: T,
    pub tau_r: T,
}

impl<T: Real> CorrelationModel<T> {
    pub fn new(b: T, gamma: T, tau_r: T) -> Result<Self> {
        if !(b >= T::zero()) || !b.is_finite() {
            return Err(Error::Domain {
                name: "b",
                value: b.approx_f64(),
                expected: "finite, >= 0",
            });
        }
        if !(gamma >= -T::one() && gamma <= T::one()) {
            return Err(Error::Domain {
                name: "gamma",
                value: gamma.approx_f64(),
                expected: "-1 <= gamma <= 1",
            });
        }
        if !(tau_r > T::zero()) || !tau_r.is_finite() {
            return Err(Error::Domain {
                name: "tau_r",
                value: tau_r.approx_f64(),
                expected: "finite, > 0",
            });
        }
        Ok(Self { b, gamma, tau_r })
    }
}

/// Correlation K_lag = B²γ^|lag|, with 0⁰ := 1 so the zero-lag value is B².
pub fn correlation<T: Real>(model: &CorrelationModel<T>, lag: i64) -> T {
    let b2 = model.b * model.b;
    if lag == 0 {
        b2
    } else {
        b2 * model.gamma.powi(lag.unsigned_abs().min(i32::MAX as u64) as i32)
    }
}

/// Correlation model of the persistence chain: B = |Δφ|, γ = 2p − 1.
pub fn persistence_correlation_model<T: Real>(
    delta_phi: T,
    p: T,
    tau_r: T,
) -> Result<CorrelationModel<T>> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::Domain {
            name: "p",
            value: p.approx_f64(),
            expected: "0 <= p <= 1",
        });
    }
    let two = T::val(2.0);
    CorrelationModel::new(delta_phi.abs(), two * p - T::one(), tau_r)
}

/// Correlation time of the chain, τ_r / (1 − γ); diverges at γ = 1.
pub fn correlation_time<T: Real>(model: &CorrelationModel<T>) -> Result<T> {
    if model.gamma == T::one() {
        return Err(Error::Divergent {
            what: "correlation time",
            name: "gamma",
            value: 1.0,
        });
    }
    Ok(model.tau_r / (T::one() - model.gamma))
}

/// SplitMix64 finalizer; bijective on 64-bit integers.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for an independent substream: SplitMix64 applied to the base seed
/// offset by the stream index times the 64-bit golden ratio.
///
/// Trajectory ensembles assign substream k to trajectory k, which makes
/// results independent of worker count and scheduling.
pub fn substream_seed(base: u64, index: u64) -> u64 {
    splitmix64(base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Per-step state sampler over the model's angle-value table.
///
/// Each step consumes exactly one uniform f64 draw for stochastic models and
/// none for the fixed model, so streams are reproducible by construction.
pub(crate) struct IndexSampler<'a, T> {
    model: &'a JumpModel<T>,
    rng: ChaCha8Rng,
    prev: Option<usize>,
}

impl<'a, T: Real> IndexSampler<'a, T> {
    /// The model must be validated by the caller.
    pub(crate) fn new(model: &'a JumpModel<T>, seed: u64) -> Self {
        Self {
            model,
            rng: ChaCha8Rng::seed_from_u64(seed),
            prev: None,
        }
    }

    /// Index of the next angle in `model.values()`.
    pub(crate) fn next_index(&mut self) -> usize {
        let idx = match self.model {
            JumpModel::Fixed { .. } => 0,
            JumpModel::IidTwoPoint { .. } => usize::from(self.rng.random::<f64>() >= 0.5),
            JumpModel::Persistence { p, .. } => {
                let u = self.rng.random::<f64>();
                match self.prev {
                    None => usize::from(u >= 0.5),
                    Some(prev) => {
                        if u < p.approx_f64() {
                            prev
                        } else {
                            1 - prev
                        }
                    }
                }
            }
            JumpModel::FiniteMarkov(spec) => {
                let u = self.rng.random::<f64>();
                match self.prev {
                    None => inverse_cdf(u, spec.p0.iter().copied()),
                    Some(prev) => {
                        inverse_cdf(u, spec.transition.iter().map(|row| row[prev]))
                    }
                }
            }
        };
        self.prev = Some(idx);
        idx
    }
}

/// Smallest index whose cumulative weight exceeds u; the final state absorbs
/// any rounding deficit in the column sum.
fn inverse_cdf<T: Real>(u: f64, weights: impl Iterator<Item = T>) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        acc += w.approx_f64();
        if u < acc {
            return i;
        }
        last = i;
    }
    last
}

/// Length-n angle chain drawn from the model; deterministic for a given
/// (model, n, seed).
pub fn sample_chain<T: Real>(model: &JumpModel<T>, n: usize, seed: u64) -> Result<Vec<T>> {
    model.validate()?;
    let values = model.values();
    let mut sampler = IndexSampler::new(model, seed);
    Ok((0..n).map(|_| values[sampler.next_index()]).collect())
}

/// Ensemble-and-time average of the lagged product ⟨Δφ_k Δφ_{k+lag}⟩.
pub fn empirical_correlation<T: Real>(chains: &[Vec<T>], lag: usize) -> Result<T> {
    if chains.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut sum = T::zero();
    let mut count: u64 = 0;
    for chain in chains {
        if chain.len() <= lag {
            return Err(Error::Domain {
                name: "lag",
                value: lag as f64,
                expected: "smaller than every chain length",
            });
        }
        for k in 0..chain.len() - lag {
            sum += chain[k] * chain[k + lag];
            count += 1;
        }
    }
    Ok(sum / T::from_u64(count).expect("pair count representable"))
}
