//! Exact horizontal-polarization probability for a finite Markov chain of
//! rotation angles, by iterated complex matrix-vector products.
//!
//! For free evolution (θ = 1) the probability after n round trips is
//! P_h(n) = 1/2 + 1/2·Re[u (PΦ)ⁿ p₀], where Φ is the diagonal phase matrix
//! with entries e^{2iδφ_j}, P the transition matrix, p₀ the initial
//! distribution and u the all-ones row vector. This serves as the independent
//! oracle for the closed forms and the Monte Carlo ensembles.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance on stochasticity sums, widened for low-precision scalars.
fn stochastic_tol<T: Real>() -> T {
    T::val(1e-12).max(T::epsilon() * T::val(16.0))
}

/// Finite Markov chain of rotation angles.
///
/// `transition[i][j]` is the probability of jumping to angle `values[i]` given
/// the previous angle was `values[j]`; columns sum to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec<T> {
    pub values: Vec<T>,
    pub p0: Vec<T>,
    pub transition: Vec<Vec<T>>,
}

impl<T: Real> ChainSpec<T> {
    /// Number of chain states.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks dimensions, nonnegativity, and column stochasticity.
    pub fn validate(&self) -> Result<()> {
        let m = self.values.len();
        if m == 0 {
            return Err(Error::DimensionMismatch {
                what: "chain values",
                expected: 1,
                got: 0,
            });
        }
        if self.p0.len() != m {
            return Err(Error::DimensionMismatch {
                what: "initial distribution",
                expected: m,
                got: self.p0.len(),
            });
        }
        if self.transition.len() != m {
            return Err(Error::DimensionMismatch {
                what: "transition matrix rows",
                expected: m,
                got: self.transition.len(),
            });
        }
        for row in &self.transition {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    what: "transition matrix columns",
                    expected: m,
                    got: row.len(),
                });
            }
        }
        let tol = stochastic_tol::<T>();
        for &v in &self.values {
            if !v.is_finite() {
                return Err(Error::Domain {
                    name: "chain value",
                    value: v.approx_f64(),
                    expected: "finite angle",
                });
            }
        }
        let mut sum = T::zero();
        for &p in &self.p0 {
            if !(p >= T::zero()) {
                return Err(Error::Domain {
                    name: "p0 entry",
                    value: p.approx_f64(),
                    expected: ">= 0",
                });
            }
            sum += p;
        }
        if (sum - T::one()).abs() > tol {
            return Err(Error::Domain {
                name: "p0 sum",
                value: sum.approx_f64(),
                expected: "1 within stochasticity tolerance",
            });
        }
        for j in 0..m {
            let mut col = T::zero();
            for row in &self.transition {
                let p = row[j];
                if !(p >= T::zero()) {
                    return Err(Error::Domain {
                        name: "transition entry",
                        value: p.approx_f64(),
                        expected: ">= 0",
                    });
                }
                col += p;
            }
            if (col - T::one()).abs() > tol {
                return Err(Error::Domain {
                    name: "transition column sum",
                    value: col.approx_f64(),
                    expected: "1 within stochasticity tolerance",
                });
            }
        }
        Ok(())
    }
}

/// Two-state chain for the persistence process: values ±Δφ, equiprobable
/// start, repeat probability p on the diagonal.
pub fn persistence_chain_spec<T: Real>(delta_phi: T, p: T) -> ChainSpec<T> {
    let q = T::one() - p;
    let half = T::val(0.5);
    ChainSpec {
        values: vec![delta_phi, -delta_phi],
        p0: vec![half, half],
        transition: vec![vec![p, q], vec![q, p]],
    }
}

/// Probability of horizontal polarization after n free round trips of the
/// given chain: 1/2 + 1/2·Re[u (PΦ)ⁿ p₀].
///
/// The vector is updated in place by one phase rotation and one transition
/// application per round trip; no renormalization is performed because the
/// decay of the vector is the signal.
pub fn p_h_chain<T: Real>(n: usize, spec: &ChainSpec<T>) -> Result<T> {
    spec.validate()?;
    let m = spec.len();
    let two = T::val(2.0);
    let phase: Vec<Complex<T>> = spec
        .values
        .iter()
        .map(|&phi| Complex::from_polar(T::one(), two * phi))
        .collect();
    let mut v: Vec<Complex<T>> = spec
        .p0
        .iter()
        .map(|&p| Complex::new(p, T::zero()))
        .collect();
    let mut w = vec![Complex::new(T::zero(), T::zero()); m];
    for _ in 0..n {
        for j in 0..m {
            w[j] = phase[j] * v[j];
        }
        for (i, vi) in v.iter_mut().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, &wj) in w.iter().enumerate() {
                acc += wj.scale(spec.transition[i][j]);
            }
            *vi = acc;
        }
    }
    let mut overlap = Complex::new(T::zero(), T::zero());
    for &vi in &v {
        overlap += vi;
    }
    let half = T::val(0.5);
    Ok(half + half * overlap.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn zero_steps_is_certain() {
        let spec = persistence_chain_spec(4.0f64.to_radians(), 0.8);
        assert_abs_diff_eq!(p_h_chain(0, &spec).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn memoryless_chain_matches_exponential_form() {
        // p = 1/2 is an i.i.d. chain: P_h(n) = 1/2 + 1/2 cos^n(2Δφ)
        let phi = 4.0f64.to_radians();
        let spec = persistence_chain_spec(phi, 0.5);
        let got = p_h_chain(10, &spec).unwrap();
        let expect = 0.5 + 0.5 * (2.0 * phi).cos().powi(10);
        assert_relative_eq!(got, expect, max_relative = 1e-12);
        assert_abs_diff_eq!(got, 0.95341, epsilon = 1e-5);
    }

    #[test]
    fn one_state_chain_oscillates() {
        let phi = 0.3_f64;
        let spec = ChainSpec {
            values: vec![phi],
            p0: vec![1.0],
            transition: vec![vec![1.0]],
        };
        for n in 0..40 {
            let expect = (phi * n as f64).cos().powi(2);
            assert_abs_diff_eq!(p_h_chain(n, &spec).unwrap(), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn persistence_spec_limits() {
        let spec = persistence_chain_spec(0.1, 1.0);
        assert_eq!(spec.transition, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let spec = persistence_chain_spec(0.1, 0.0);
        assert_eq!(spec.transition, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let spec = persistence_chain_spec(0.1, 0.8);
        assert_eq!(spec.transition, vec![vec![0.8, 1.0 - 0.8], vec![1.0 - 0.8, 0.8]]);
        spec.validate().unwrap();
    }

    #[test]
    fn validation_rejects_malformed_chains() {
        let mut spec = persistence_chain_spec(0.1, 0.8);
        spec.p0 = vec![0.6, 0.6];
        assert!(spec.validate().is_err());

        let mut spec = persistence_chain_spec(0.1, 0.8);
        spec.transition[0][0] = 0.9; // column sum 1.1
        assert!(spec.validate().is_err());

        let mut spec = persistence_chain_spec(0.1, 0.8);
        spec.p0 = vec![1.0];
        assert!(spec.validate().is_err());

        let empty = ChainSpec::<f64> {
            values: vec![],
            p0: vec![],
            transition: vec![],
        };
        assert!(empty.validate().is_err());
    }

    #[test]
    fn probability_stays_in_unit_interval() {
        let spec = persistence_chain_spec(0.7, 0.35);
        for n in 0..2000 {
            let p = p_h_chain(n, &spec).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&p), "n={n} p={p}");
        }
    }

    #[test]
    fn symmetric_chain_is_even_in_the_angle() {
        let p = 0.72;
        for n in [1, 7, 50] {
            let a = p_h_chain(n, &persistence_chain_spec(0.23, p)).unwrap();
            let b = p_h_chain(n, &persistence_chain_spec(-0.23, p)).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn three_state_chain_runs() {
        // biased random walk over three angles
        let spec = ChainSpec {
            values: vec![-0.1, 0.0, 0.1],
            p0: vec![0.25, 0.5, 0.25],
            transition: vec![
                vec![0.5, 0.25, 0.25],
                vec![0.25, 0.5, 0.25],
                vec![0.25, 0.25, 0.5],
            ],
        };
        spec.validate().unwrap();
        let p = p_h_chain(100, &spec).unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
}
