//! Acceptance gate: one test per shipped guarantee, each printing a single
//! PASS/FAIL line. Tolerances and runtime budgets are pinned here.

use std::time::Instant;

use zeno_core::chain::{p_h_chain, persistence_chain_spec};
use zeno_core::closed_forms::{
    p_h_fixed_angle, p_h_iid_two_point, p_h_master, p_h_master_discrete, p_h_persistence_exact,
    p_h_projective, p_h_rabi, MasterSolutionParams,
};
use zeno_core::montecarlo::{estimate_decay, EnsembleSpec};
use zeno_core::noise::{CorrelationModel, JumpModel};
use zeno_core::polarization::AbsorberTransmissivity;
use zeno_core::quadrature::adaptive_gauss_legendre;
use zeno_core::spectra::{
    continuous_rate, decay_rate_geometric, decay_rate_overlap, lorentzian_broadening,
    lorentzian_reservoir, measurement_broadening, validity_check, ContinuousNoiseModel,
    COND_TRANSIENT, COND_WEAK_DEPHASING,
};

const REL_RATE_ENDPOINT: f64 = 1e-9;
const ABS_RATE_CONSTANT: f64 = 1e-12;
const REL_OVERLAP_IDENTITY: f64 = 1e-8;
const ABS_NORMALIZATION: f64 = 1e-8;
const ABS_CLOSED_VS_CHAIN: f64 = 1e-10;
const SIGMA_BAND: f64 = 3.0;
const MIN_WITHIN_FRACTION: f64 = 0.99;
const ABS_LIMIT_REDUCTION: f64 = 1e-12;
const REL_MASTER_CONSISTENCY: f64 = 1e-2;
const ABS_MASTER_FREE_LIMIT: f64 = 1e-12;
const REL_CONTINUOUS_IDENTITY: f64 = 1e-4;

const RUNTIME_RATE_ENDPOINTS: f64 = 1.0;
const RUNTIME_MONOTONICITY: f64 = 1.0;
const RUNTIME_OVERLAP: f64 = 10.0;
const RUNTIME_NORMALIZATION: f64 = 5.0;
const RUNTIME_TRIANGLE: f64 = 60.0;
const RUNTIME_REDUCTIONS: f64 = 1.0;
const RUNTIME_WINDOWS: f64 = 1.0;
const RUNTIME_MASTER: f64 = 5.0;
const RUNTIME_CONTINUOUS: f64 = 5.0;

const B: f64 = 0.1;
const TAU_R: f64 = 0.07;
const DEG4: f64 = 4.0 * std::f64::consts::PI / 180.0;

fn theta(x: f64) -> AbsorberTransmissivity<f64> {
    AbsorberTransmissivity::new(x).unwrap()
}

fn model(gamma: f64) -> CorrelationModel<f64> {
    CorrelationModel::new(B, gamma, TAU_R).unwrap()
}

fn report(name: &str, violations: &[String], elapsed: f64, budget: f64) {
    let timing = if elapsed <= budget { "" } else { " OVER TIME BUDGET" };
    if violations.is_empty() {
        println!("acceptance {name}: PASS ({elapsed:.2} s{timing})");
    } else {
        println!(
            "acceptance {name}: FAIL ({} violation(s), first: {}; {elapsed:.2} s{timing})",
            violations.len(),
            violations[0]
        );
    }
    assert!(
        violations.is_empty(),
        "{name}: {} violation(s), first: {}",
        violations.len(),
        violations.first().map(String::as_str).unwrap_or("")
    );
    assert!(elapsed <= budget, "{name}: runtime {elapsed:.2} s over {budget} s");
}

#[test]
fn rate_endpoints_match_closed_fractions() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut check = |gamma: f64, th: f64, expect: f64| {
        let r = decay_rate_geometric(&model(gamma), theta(th)).unwrap().r;
        if ((r - expect) / expect).abs() > REL_RATE_ENDPOINT {
            violations.push(format!("gamma={gamma} theta={th}: R={r} want {expect}"));
        }
    };
    for th in [0.0, 0.5, 1.0] {
        check(0.0, th, 1.0 / 7.0);
    }
    check(0.7, 1.0, 17.0 / 21.0);
    check(-0.9, 1.0, 1.0 / 133.0);
    for gamma in [0.7, -0.9, 0.3] {
        check(gamma, 0.0, 1.0 / 7.0);
    }
    report(
        "rate endpoints",
        &violations,
        start.elapsed().as_secs_f64(),
        RUNTIME_RATE_ENDPOINTS,
    );
}

#[test]
fn rate_monotone_in_measurement_effectiveness() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let rates = |gamma: f64| -> Vec<f64> {
        grid.iter()
            .map(|&one_minus| {
                decay_rate_geometric(&model(gamma), theta(1.0 - one_minus))
                    .unwrap()
                    .r
            })
            .collect()
    };

    let decreasing = rates(0.7);
    for w in decreasing.windows(2) {
        if !(w[1] < w[0]) {
            violations.push(format!("gamma=0.7 not strictly decreasing: {} -> {}", w[0], w[1]));
        }
    }
    let constant = rates(0.0);
    for &r in &constant {
        if (r - constant[0]).abs() > ABS_RATE_CONSTANT {
            violations.push(format!("gamma=0 varies: {} vs {}", r, constant[0]));
        }
    }
    let increasing = rates(-0.9);
    for w in increasing.windows(2) {
        if !(w[1] > w[0]) {
            violations.push(format!("gamma=-0.9 not strictly increasing: {} -> {}", w[0], w[1]));
        }
    }
    report(
        "rate monotonicity in measurement effectiveness",
        &violations,
        start.elapsed().as_secs_f64(),
        RUNTIME_MONOTONICITY,
    );
}

#[test]
fn overlap_quadrature_reproduces_geometric_rate() {
    let start = Instant::now();
    let mut violations = Vec::new();
    for &gamma in &[-0.95, -0.7, 0.0, 0.7, 0.95] {
        for &th in &[0.0, 0.5, 0.9, 0.99] {
            let m = model(gamma);
            let closed = decay_rate_geometric(&m, theta(th)).unwrap().r;
            let quad = decay_rate_overlap(&m, theta(th)).unwrap().r;
            let rel = ((quad - closed) / closed).abs();
            if rel > REL_OVERLAP_IDENTITY {
                violations.push(format!("gamma={gamma} theta={th}: rel {rel:e}"));
            }
        }
    }
    report(
        "overlap integral vs closed-form rate",
        &violations,
        start.elapsed().as_secs_f64(),
        RUNTIME_OVERLAP,
    );
}

#[test]
fn broadening_normalizes_to_unity() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let zone = std::f64::consts::PI / TAU_R;
    for &th in &[0.0, 0.3, 0.9, 0.99] {
        let integral = adaptive_gauss_legendre(
            move |w: f64| measurement_broadening(theta(th), TAU_R, w).unwrap(),
            -zone,
            zone,
            1e-11,
            1e-11,
            &[0.0],
        )
        .unwrap();
        if (integral - 1.0).abs() > ABS_NORMALIZATION {
            violations.push(format!("theta={th}: integral {integral}"));
        }
    }
    report(
        "broadening normalization",
        &violations,
        start.elapsed().as_secs_f64(),
        RUNTIME_NORMALIZATION,
    );
}

#[test]
fn free_evolution_closed_form_chain_and_ensemble_agree() {
    let start = Instant::now();
    let mut violations = Vec::new();
    const N_MAX: usize = 500;
    const TRAJECTORIES: usize = 100_000;

    for &p in &[0.3, 0.5, 0.8] {
        let spec = persistence_chain_spec(DEG4, p);
        let chain: Vec<f64> = (0..=N_MAX).map(|n| p_h_chain(n, &spec).unwrap()).collect();

        for (n, &reference) in chain.iter().enumerate() {
            let closed = p_h_persistence_exact(n, DEG4, p);
            if (closed - reference).abs() > ABS_CLOSED_VS_CHAIN {
                violations.push(format!(
                    "p={p} n={n}: closed {closed} vs chain {reference}"
                ));
            }
        }

        let ensemble = EnsembleSpec {
            jumps: JumpModel::Persistence { delta_phi: DEG4, p },
            theta: theta(1.0),
            trajectories: TRAJECTORIES,
            seed: 2024,
        };
        let curve = estimate_decay(&ensemble, N_MAX).unwrap();
        let mut within = 0usize;
        for point in &curve.points[1..] {
            let diff = (point.p_h - chain[point.n]).abs();
            if diff <= SIGMA_BAND * point.stderr.unwrap() {
                within += 1;
            }
        }
        let fraction = within as f64 / N_MAX as f64;
        if fraction < MIN_WITHIN_FRACTION {
            violations.push(format!(
                "p={p}: only {fraction:.3} of ensemble means within {SIGMA_BAND} standard errors"
            ));
        }
    }
    report(
        "free-evolution closed form, chain recursion, ensemble triangle",
        &violations,
        start.elapsed().as_secs_f64(),
        RUNTIME_TRIANGLE,
    );
}

#[test]
fn limit_reductions_collapse_exactly() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut check = |label: &str, got: f64, want: f64, n: usize| {
        if (got - want).abs() > ABS_LIMIT_REDUCTION {
            violations.push(format!("{label} n={n}: {got} vs {want}"));
        }
    };
    for n in 0..=200 {
        check(
            "balanced persistence = independent signs",
            p_h_persistence_exact(n, DEG4, 0.5),
            p_h_iid_two_point(n, DEG4),
            n,
        );
        check(
            "frozen persistence = coherent rotation",
            p_h_persistence_exact(n, DEG4, 1.0),
            p_h_rabi(n, DEG4),
            n,
        );
        check(
            "transparent absorber = coherent rotation",
            p_h_fixed_angle(n, DEG4, theta(1.0)),
            p_h_rabi(n, DEG4),
            n,
        );
        check(
            "opaque absorber = projective chain",
            p_h_fixed_angle(n, DEG4, theta(0.0)),
            p_h_projective(n, DEG4),
            n,
        );
    }
    report(
        "limit reductions",
        &violations,
        start.elapsed().as_secs_f64(),
        RUNTIME_REDUCTIONS,
    );
}

#[test]
fn measurement_slowdown_window_and_speedup_reversal() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let projective = |n: usize| p_h_projective(n, DEG4);

    // persistent noise: projective measurements keep the photon longer, but
    // only over a finite window because the free average saturates at 1/2
    let window: Vec<usize> = (1..=2000)
        .filter(|&n| projective(n) > p_h_persistence_exact(n, DEG4, 0.8))
        .collect();
    if window.is_empty() {
        violations.push("slowdown window is empty".to_string());
    } else {
        let last = *window.last().unwrap();
        if last >= 500 {
            violations.push(format!("slowdown window extends to n={last}"));
        }
    }

    // antipersistent noise: measurements strictly accelerate the decay
    for n in 2..=200 {
        if !(projective(n) < p_h_persistence_exact(n, DEG4, 0.3)) {
            violations.push(format!("no strict speedup at n={n}"));
        }
    }
    report(
        "slowdown window and speedup reversal",
        &violations,
        start.elapsed().as_secs_f64(),
        RUNTIME_WINDOWS,
    );
}

#[test]
fn coarse_grained_master_matches_discrete_solution() {
    let start = Instant::now();
    let mut violations = Vec::new();

    let m = model(0.7);
    let th = theta(0.9);
    let r = decay_rate_geometric(&m, th).unwrap().r;
    let gamma0 = -2.0 * 0.9f64.ln() / TAU_R;
    let params = MasterSolutionParams::new(r, gamma0).unwrap();

    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for n in 1..=200 {
        let settled = validity_check(&m, th, n)
            .iter()
            .filter(|c| c.name == COND_TRANSIENT || c.name == COND_WEAK_DEPHASING)
            .all(|c| c.satisfied);
        if !settled {
            continue;
        }
        checked += 1;
        let t = n as f64 * TAU_R;
        let coarse = p_h_master(t, params);
        let discrete = p_h_master_discrete(n, &m, th);
        let rel = ((coarse - discrete) / discrete).abs();
        worst = worst.max(rel);
        if rel > REL_MASTER_CONSISTENCY {
            violations.push(format!("n={n}: relative deviation {rel:.4}"));
        }
    }
    if checked == 0 {
        violations.push("no n satisfied the validity flags".to_string());
    }

    // without measurement the master solution is the pure dephasing average
    for i in 0..=50 {
        let t = i as f64 * 0.1;
        let free = p_h_master(t, MasterSolutionParams::new(r, 0.0).unwrap());
        let expect = 0.5 * (1.0 + (-2.0 * r * t).exp());
        if (free - expect).abs() > ABS_MASTER_FREE_LIMIT {
            violations.push(format!("free limit t={t}: {free} vs {expect}"));
        }
    }

    println!(
        "note: worst coarse-grained deviation {worst:.4} over {checked} flag-satisfied n"
    );
    report(
        "coarse-grained master vs discrete relaxation",
        &violations,
        start.elapsed().as_secs_f64(),
        RUNTIME_MASTER,
    );
}

#[test]
fn continuous_noise_rate_matches_lorentzian_overlap() {
    let start = Instant::now();
    let mut violations = Vec::new();
    for &(k0, gamma_r, gamma0) in &[(1.0, 1.0, 0.1), (1.0, 1.0, 10.0), (0.5, 2.0, 1.0)] {
        let noise = ContinuousNoiseModel::new(k0, gamma_r).unwrap();
        let closed = continuous_rate(&noise, gamma0).unwrap().r;
        let lim = 200.0 * gamma_r;
        let quad = adaptive_gauss_legendre(
            move |w: f64| {
                2.0 * std::f64::consts::PI
                    * lorentzian_reservoir(&noise, w)
                    * lorentzian_broadening(gamma0, w)
            },
            -lim,
            lim,
            1e-10,
            1e-10,
            &[0.0],
        )
        .unwrap();
        let rel = ((quad - closed) / closed).abs();
        if rel > REL_CONTINUOUS_IDENTITY {
            violations.push(format!(
                "k0={k0} gamma_r={gamma_r} gamma0={gamma0}: rel {rel:e}"
            ));
        }
    }
    report(
        "continuous-noise rate identity",
        &violations,
        start.elapsed().as_secs_f64(),
        RUNTIME_CONTINUOUS,
    );
}
