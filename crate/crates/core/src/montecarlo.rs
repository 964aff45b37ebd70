//! Trajectory-ensemble estimates of the decay curve.
//!
//! Each trajectory draws its rotation angles from a jump model, propagates
//! the field amplitudes through the corresponding round-trip operators, and
//! records an intensity observable after every round trip. Ensemble means
//! and standard errors come from a blockwise Welford accumulation that is
//! bitwise reproducible for a fixed seed, independent of worker count:
//! trajectories are partitioned into fixed blocks, each block is reduced
//! sequentially, and block summaries are merged in block order.

use rayon::prelude::*;

use crate::closed_forms::{CurveMeta, DecayCurve, DecayPoint};
use crate::error::{Error, Result};
use crate::noise::{substream_seed, IndexSampler, JumpModel};
use crate::polarization::{round_trip_operator, AbsorberTransmissivity, PolarizationAmplitudes, RoundTripOperator};
use crate::scalar::Real;

const BLOCK: usize = 1024;

/// Ensemble description: jump model, absorber, size, and base seed.
#[derive(Clone, Debug)]
pub struct EnsembleSpec<T> {
    pub jumps: JumpModel<T>,
    pub theta: AbsorberTransmissivity<T>,
    pub trajectories: usize,
    pub seed: u64,
}

impl<T: Real> EnsembleSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.trajectories == 0 {
            return Err(Error::EmptyEnsemble);
        }
        self.jumps.validate()
    }
}

#[derive(Clone, Copy)]
enum Observable {
    Horizontal,
    Survival,
}

struct BlockStat<T> {
    count: usize,
    mean: Vec<T>,
    m2: Vec<T>,
}

fn block_stat<T: Real>(
    spec: &EnsembleSpec<T>,
    ops: &[RoundTripOperator<T>],
    n_max: usize,
    observable: Observable,
    first: usize,
    last: usize,
) -> BlockStat<T> {
    let points = n_max + 1;
    let mut mean = vec![T::zero(); points];
    let mut m2 = vec![T::zero(); points];
    let mut count = 0usize;
    let mut obs = vec![T::zero(); points];

    for t in first..last {
        let mut sampler = IndexSampler::new(&spec.jumps, substream_seed(spec.seed, t as u64));
        let mut state = PolarizationAmplitudes::horizontal();
        obs[0] = T::one();
        for n in 1..=n_max {
            let op = &ops[sampler.next_index()];
            state = op.apply(state);
            obs[n] = match observable {
                Observable::Horizontal => state.eps_h * state.eps_h,
                Observable::Survival => state.norm_sq(),
            };
        }
        count += 1;
        let c = T::count(count);
        for n in 0..points {
            let delta = obs[n] - mean[n];
            mean[n] += delta / c;
            m2[n] += delta * (obs[n] - mean[n]);
        }
    }

    BlockStat { count, mean, m2 }
}

fn merge<T: Real>(into: &mut BlockStat<T>, next: BlockStat<T>) {
    let na = T::count(into.count);
    let nb = T::count(next.count);
    let total = na + nb;
    for n in 0..into.mean.len() {
        let delta = next.mean[n] - into.mean[n];
        into.mean[n] += delta * nb / total;
        into.m2[n] += next.m2[n] + delta * delta * na * nb / total;
    }
    into.count += next.count;
}

fn estimate<T: Real>(
    spec: &EnsembleSpec<T>,
    n_max: usize,
    observable: Observable,
) -> Result<DecayCurve<T>> {
    spec.validate()?;
    let ops: Vec<RoundTripOperator<T>> = spec
        .jumps
        .values()
        .iter()
        .map(|&v| round_trip_operator(v, spec.theta))
        .collect::<Result<_>>()?;

    let blocks = spec.trajectories.div_ceil(BLOCK);
    let stats: Vec<BlockStat<T>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let first = b * BLOCK;
            let last = (first + BLOCK).min(spec.trajectories);
            block_stat(spec, &ops, n_max, observable, first, last)
        })
        .collect();

    let mut total = BlockStat {
        count: 0,
        mean: vec![T::zero(); n_max + 1],
        m2: vec![T::zero(); n_max + 1],
    };
    for s in stats {
        merge(&mut total, s);
    }

    let count = T::count(total.count);
    let points = (0..=n_max)
        .map(|n| {
            let stderr = if total.count < 2 {
                T::zero()
            } else {
                (total.m2[n] / (count * (count - T::one()))).sqrt()
            };
            DecayPoint {
                n,
                p_h: total.mean[n],
                stderr: Some(stderr),
            }
        })
        .collect();

    let curve = DecayCurve {
        points,
        meta: CurveMeta {
            model: spec.jumps.description(),
            theta: spec.theta.value(),
            tau_r: None,
            seed: Some(spec.seed),
        },
    };
    curve.validate()?;
    Ok(curve)
}

/// Ensemble mean of the horizontally polarized intensity after each round
/// trip, with its standard error.
pub fn estimate_decay<T: Real>(spec: &EnsembleSpec<T>, n_max: usize) -> Result<DecayCurve<T>> {
    estimate(spec, n_max, Observable::Horizontal)
}

/// Ensemble mean of the surviving total intensity after each round trip,
/// with its standard error. Identically one at θ = 1.
pub fn estimate_survival<T: Real>(spec: &EnsembleSpec<T>, n_max: usize) -> Result<DecayCurve<T>> {
    estimate(spec, n_max, Observable::Survival)
}
