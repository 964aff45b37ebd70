//! Simulation and rate theory for optical polarization decay under repeated
//! partial measurement.
//!
//! A photon bounces between mirrors; each round trip applies a small, possibly
//! random, polarization rotation followed by a polarization-selective absorber
//! of amplitude transmissivity θ. The absorber acts as a measurement of
//! variable effectiveness: θ = 0 is projective, θ = 1 is no measurement. The
//! crate provides
//!
//! - exact propagation of the two amplitude components ([`polarization`]),
//! - jump-angle noise models and their correlation functions ([`noise`]),
//! - exact ensemble averages for finite-state angle chains ([`chain`]),
//! - closed-form decay curves and coarse-grained master solutions
//!   ([`closed_forms`]),
//! - decay rates, spectra, and validity diagnostics ([`spectra`]),
//! - seeded, reproducible trajectory ensembles ([`montecarlo`]).
//!
//! Depending on the sign of the angle correlations, increasing the
//! measurement strength either slows the decay down or speeds it up; the rate
//! formulas in [`spectra`] quantify both regimes.
//!
//! Everything numeric is generic over the scalar type through
//! [`scalar::Real`]; the aliases at the crate root pin the common choices.

pub mod chain;
pub mod closed_forms;
pub mod error;
pub mod montecarlo;
pub mod noise;
pub mod polarization;
pub mod quadrature;
pub mod scalar;
pub mod spectra;

pub use error::{Error, Result};

pub type AmplitudesF64 = polarization::PolarizationAmplitudes<f64>;
pub type AmplitudesF32 = polarization::PolarizationAmplitudes<f32>;
pub type OperatorF64 = polarization::RoundTripOperator<f64>;
pub type OperatorF32 = polarization::RoundTripOperator<f32>;
pub type TransmissivityF64 = polarization::AbsorberTransmissivity<f64>;
pub type TransmissivityF32 = polarization::AbsorberTransmissivity<f32>;
pub type CorrelationModelF64 = noise::CorrelationModel<f64>;
pub type JumpModelF64 = noise::JumpModel<f64>;
pub type ChainSpecF64 = chain::ChainSpec<f64>;
pub type DecayCurveF64 = closed_forms::DecayCurve<f64>;
pub type EnsembleSpecF64 = montecarlo::EnsembleSpec<f64>;
pub type RateResultF64 = spectra::RateResult<f64>;
pub type SpectralFunctionF64 = spectra::SpectralFunction<f64>;
pub type ContinuousNoiseF64 = spectra::ContinuousNoiseModel<f64>;
