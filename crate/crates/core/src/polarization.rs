//! Per-round-trip propagation of the photon polarization amplitudes.
//!
//! One round trip rotates the polarization plane by a jump angle and then
//! attenuates the vertical component by the absorber transmissivity θ. The
//! corresponding transfer matrix has determinant θ and is orthogonal at θ = 1.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real amplitude pair (ε_h, ε_v) of the photon field envelope.
///
/// The squared norm is the unabsorbed fraction; it never exceeds 1 when
/// propagation starts from a unit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationAmplitudes<T> {
    pub eps_h: T,
    pub eps_v: T,
}

impl<T: Real> PolarizationAmplitudes<T> {
    pub fn new(eps_h: T, eps_v: T) -> Result<Self> {
        if !eps_h.is_finite() || !eps_v.is_finite() {
            return Err(Error::Domain {
                name: "amplitudes",
                value: f64::NAN,
                expected: "finite (eps_h, eps_v)",
            });
        }
        Ok(Self { eps_h, eps_v })
    }

    /// Unit state polarized along the horizontal axis.
    pub fn horizontal() -> Self {
        Self {
            eps_h: T::one(),
            eps_v: T::zero(),
        }
    }

    /// Squared norm ε_h² + ε_v², the surviving photon fraction.
    pub fn norm_sq(&self) -> T {
        self.eps_h * self.eps_h + self.eps_v * self.eps_v
    }
}

/// 2×2 transfer matrix of a single round trip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundTripOperator<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Real> RoundTripOperator<T> {
    pub fn apply(&self, s: PolarizationAmplitudes<T>) -> PolarizationAmplitudes<T> {
        PolarizationAmplitudes {
            eps_h: self.m[0][0] * s.eps_h + self.m[0][1] * s.eps_v,
            eps_v: self.m[1][0] * s.eps_h + self.m[1][1] * s.eps_v,
        }
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Matrix product `self · earlier`: `earlier` acts first.
    pub fn compose(&self, earlier: &Self) -> Self {
        let a = &self.m;
        let b = &earlier.m;
        let mut m = [[T::zero(); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self { m }
    }
}

/// Polarization probabilities and coherence (P_h, P_v, u), with u = 2 ε_v ε_h
/// the first Stokes parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationTensor<T> {
    pub p_h: T,
    pub p_v: T,
    pub u: T,
}

/// Amplitude transmission of the absorber per pass, validated to [0, 1].
///
/// θ = 1 is full transparency (no measurement), θ = 0 an ideal projective
/// measurement; 1 − θ is the measurement effectiveness.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct AbsorberTransmissivity<T>(T);

impl<T: Real> AbsorberTransmissivity<T> {
    pub fn new(theta: T) -> Result<Self> {
        if !(theta >= T::zero() && theta <= T::one()) {
            return Err(Error::Domain {
                name: "theta",
                value: theta.approx_f64(),
                expected: "0 <= theta <= 1",
            });
        }
        Ok(Self(theta))
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// Transfer matrix of one round trip: rotation by `delta_phi` followed by
/// attenuation of the vertical component by θ.
///
/// Returns [[cos Δφ, −sin Δφ], [θ sin Δφ, θ cos Δφ]]; its determinant is θ.
pub fn round_trip_operator<T: Real>(
    delta_phi: T,
    theta: AbsorberTransmissivity<T>,
) -> Result<RoundTripOperator<T>> {
    if !delta_phi.is_finite() {
        return Err(Error::Domain {
            name: "delta_phi",
            value: delta_phi.approx_f64(),
            expected: "finite angle in radians",
        });
    }
    let (s, c) = delta_phi.sin_cos();
    let th = theta.value();
    Ok(RoundTripOperator {
        m: [[c, -s], [th * s, th * c]],
    })
}

/// Applies the round-trip operators for `jumps` in order, returning every
/// intermediate state. Element 0 is `initial`; element n corresponds to the
/// first n jumps.
pub fn propagate<T: Real>(
    initial: PolarizationAmplitudes<T>,
    jumps: &[T],
    theta: AbsorberTransmissivity<T>,
) -> Result<Vec<PolarizationAmplitudes<T>>> {
    let mut states = Vec::with_capacity(jumps.len() + 1);
    states.push(initial);
    let mut current = initial;
    for &phi in jumps {
        let op = round_trip_operator(phi, theta)?;
        current = op.apply(current);
        states.push(current);
    }
    Ok(states)
}

/// Polarization tensor (ε_h², ε_v², 2 ε_v ε_h) of a pure amplitude state.
pub fn stokes_tensor<T: Real>(state: PolarizationAmplitudes<T>) -> PolarizationTensor<T> {
    let two = T::val(2.0);
    PolarizationTensor {
        p_h: state.eps_h * state.eps_h,
        p_v: state.eps_v * state.eps_v,
        u: two * state.eps_v * state.eps_h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn theta(x: f64) -> AbsorberTransmissivity<f64> {
        AbsorberTransmissivity::new(x).unwrap()
    }

    #[test]
    fn identity_at_zero_rotation_full_transparency() {
        let op = round_trip_operator(0.0, theta(1.0)).unwrap();
        assert_eq!(op.m, [[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn quarter_turn_opaque_kills_vertical_channel() {
        let op = round_trip_operator(std::f64::consts::FRAC_PI_2, theta(0.0)).unwrap();
        assert_abs_diff_eq!(op.m[0][0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(op.m[0][1], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(op.m[1][0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(op.m[1][1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn operator_entries_match_direct_trig() {
        let phi = 0.0698132_f64;
        let op = round_trip_operator(phi, theta(0.9)).unwrap();
        assert_relative_eq!(op.m[0][0], phi.cos(), max_relative = 1e-15);
        assert_relative_eq!(op.m[0][1], -phi.sin(), max_relative = 1e-15);
        assert_relative_eq!(op.m[1][0], 0.9 * phi.sin(), max_relative = 1e-15);
        assert_relative_eq!(op.m[1][1], 0.9 * phi.cos(), max_relative = 1e-15);
        // fixed reference entries
        assert_abs_diff_eq!(op.m[0][0], 0.997564, epsilon = 1e-6);
        assert_abs_diff_eq!(op.m[0][1], -0.0697565, epsilon = 1e-6);
        assert_abs_diff_eq!(op.m[1][0], 0.0627809, epsilon = 1e-6);
        assert_abs_diff_eq!(op.m[1][1], 0.897808, epsilon = 1e-6);
    }

    #[test]
    fn determinant_equals_transmissivity() {
        for &th in &[0.0, 0.3, 0.9, 1.0] {
            for &phi in &[0.0, 0.1, 1.0, -2.5] {
                let op = round_trip_operator(phi, theta(th)).unwrap();
                assert_abs_diff_eq!(op.det(), th, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn transparent_operator_is_orthogonal() {
        let op = round_trip_operator(0.77, theta(1.0)).unwrap();
        let m = op.m;
        for i in 0..2 {
            for j in 0..2 {
                let dot = m[0][i] * m[0][j] + m[1][i] * m[1][j];
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn equal_jumps_transparent_accumulate_rotation() {
        let phi = 0.05_f64;
        let n = 37;
        let jumps = vec![phi; n];
        let states =
            propagate(PolarizationAmplitudes::horizontal(), &jumps, theta(1.0)).unwrap();
        let total = phi * n as f64;
        assert_relative_eq!(states[n].eps_h, total.cos(), max_relative = 1e-12);
        assert_relative_eq!(states[n].eps_v, total.sin(), max_relative = 1e-12);
    }

    #[test]
    fn equal_jumps_opaque_project_each_pass() {
        let phi = 0.05_f64;
        let n = 20;
        let jumps = vec![phi; n];
        let states =
            propagate(PolarizationAmplitudes::horizontal(), &jumps, theta(0.0)).unwrap();
        assert_relative_eq!(states[n].eps_h, phi.cos().powi(n as i32), max_relative = 1e-12);
        assert_abs_diff_eq!(states[n].eps_v, 0.0, epsilon = 1e-300);
    }

    #[test]
    fn empty_jump_list_returns_initial_only() {
        let init = PolarizationAmplitudes::new(0.6, 0.8).unwrap();
        let states = propagate(init, &[], theta(0.5)).unwrap();
        assert_eq!(states.len(), 1);
        assert_eq!(states[0], init);
    }

    #[test]
    fn stokes_components_from_amplitudes() {
        let t = stokes_tensor(PolarizationAmplitudes::horizontal());
        assert_eq!((t.p_h, t.p_v, t.u), (1.0, 0.0, 0.0));

        let d = 1.0 / 2.0_f64.sqrt();
        let t = stokes_tensor(PolarizationAmplitudes::new(d, d).unwrap());
        assert_relative_eq!(t.p_h, 0.5, max_relative = 1e-15);
        assert_relative_eq!(t.p_v, 0.5, max_relative = 1e-15);
        assert_relative_eq!(t.u, 1.0, max_relative = 1e-15);

        let a = 4.0_f64.to_radians();
        let t = stokes_tensor(PolarizationAmplitudes::new(a.cos(), a.sin()).unwrap());
        assert_abs_diff_eq!(t.p_h, 0.995134, epsilon = 1e-6);
        assert_abs_diff_eq!(t.p_v, 0.004866, epsilon = 1e-6);
        assert_abs_diff_eq!(t.u, 0.139173, epsilon = 1e-6);
    }

    #[test]
    fn coherence_bound_holds() {
        let t = stokes_tensor(PolarizationAmplitudes::new(0.3, -0.7).unwrap());
        assert!(t.u * t.u <= 4.0 * t.p_h * t.p_v + 1e-12);
    }

    #[test]
    fn transmissivity_rejects_out_of_range() {
        assert!(AbsorberTransmissivity::new(-0.1).is_err());
        assert!(AbsorberTransmissivity::new(1.1).is_err());
        assert!(AbsorberTransmissivity::new(f64::NAN).is_err());
        assert!(AbsorberTransmissivity::new(0.0).is_ok());
        assert!(AbsorberTransmissivity::new(1.0).is_ok());
    }

    #[test]
    fn rejects_non_finite_angle() {
        assert!(round_trip_operator(f64::INFINITY, theta(0.5)).is_err());
        assert!(round_trip_operator(f64::NAN, theta(0.5)).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let th = AbsorberTransmissivity::<f32>::new(0.9).unwrap();
        let op = round_trip_operator(0.1f32, th).unwrap();
        assert_abs_diff_eq!(op.det(), 0.9f32, epsilon = 1e-6);
    }
}
