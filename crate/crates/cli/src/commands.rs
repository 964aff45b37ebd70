//! Subcommand implementations. Each resolves its parameters from flags, an
//! optional config file, and defaults, computes its table through the core
//! crate, and emits it with a metadata header naming the resolved run.

use std::f64::consts::PI;
use std::path::Path;

use zeno_core::chain::p_h_chain;
use zeno_core::closed_forms::{
    p_h_fixed_angle, p_h_persistence_approx, p_h_persistence_exact, p_h_projective,
};
use zeno_core::montecarlo::{estimate_decay, estimate_survival, EnsembleSpec};
use zeno_core::noise::{substream_seed, CorrelationModel, JumpModel};
use zeno_core::polarization::{propagate, AbsorberTransmissivity, PolarizationAmplitudes};
use zeno_core::spectra::{
    decay_rate_geometric, decay_rate_overlap, measurement_broadening, reservoir_spectrum,
    validity_check_with_threshold, VALIDITY_THRESHOLD,
};

use crate::config::{
    Cli, CliError, Command, CommonArgs, DecayArgs, FileConfig, ModelKind, MontecarloArgs,
    ObservableKind, OutputFormat, RateCurveArgs, ScalarOrList, SpectraArgs, ValidateArgs,
};
use crate::output::{emit, float_repr, render_csv, render_json, Cell, Table};

const DEFAULT_B: f64 = 0.1;
const DEFAULT_TAU_R: f64 = 0.07;
const DEFAULT_RATE_GAMMAS: [f64; 3] = [0.7, 0.0, -0.9];
const DEFAULT_SPECTRA_GAMMAS: [f64; 3] = [0.0, 0.7, -0.7];
const DEFAULT_SPECTRA_THETA: f64 = 0.9;
const DEFAULT_POINTS: usize = 2001;
const DEFAULT_PS: [f64; 3] = [0.8, 0.5, 0.3];
const DEFAULT_N_MAX: usize = 1000;
const DEFAULT_TRAJECTORIES: usize = 10_000;
const DEFAULT_SEED: u64 = 2024;
const RATE_GRID_STEPS: usize = 100;

fn default_delta_phi() -> f64 {
    4.0_f64.to_radians()
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::RateCurve(a) => rate_curve(a),
        Command::Spectra(a) => spectra(a),
        Command::Decay(a) => decay(a),
        Command::Montecarlo(a) => montecarlo(a),
        Command::Validate(a) => validate(a),
    }
}

struct ResolvedCommon {
    format: OutputFormat,
    out: Option<std::path::PathBuf>,
    seed: u64,
}

fn resolve_common(common: &CommonArgs, file: &FileConfig) -> Result<ResolvedCommon, CliError> {
    Ok(ResolvedCommon {
        format: common
            .format
            .or(file.output_format()?)
            .unwrap_or(OutputFormat::Csv),
        out: common.out.clone().or_else(|| file.out.clone()),
        seed: common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
    })
}

fn scalar_from(value: Option<ScalarOrList>, key: &str) -> Result<Option<f64>, CliError> {
    match value {
        None => Ok(None),
        Some(v) => {
            let v = v.into_vec();
            if v.len() == 1 {
                Ok(Some(v[0]))
            } else {
                Err(CliError::Config(format!(
                    "config key {key} must be a single number for this command"
                )))
            }
        }
    }
}

fn model_name(m: ModelKind) -> &'static str {
    match m {
        ModelKind::Fixed => "fixed",
        ModelKind::Iid => "iid",
        ModelKind::Persistence => "persistence",
    }
}

fn observable_name(o: ObservableKind) -> &'static str {
    match o {
        ObservableKind::Decay => "decay",
        ObservableKind::Survival => "survival",
    }
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| float_repr(v))
        .collect::<Vec<_>>()
        .join(",")
}

fn stamp_header(table: &mut Table, subcommand: &str) {
    table.meta("version", env!("CARGO_PKG_VERSION"));
    table.meta("subcommand", subcommand);
}

fn finish(table: &Table, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
    let text = match format {
        OutputFormat::Csv => render_csv(table),
        OutputFormat::Json => render_json(table),
    };
    emit(&text, out)
}

fn rate_curve(args: RateCurveArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let rc = resolve_common(&args.common, &file)?;
    let b = args.b.or(file.b).unwrap_or(DEFAULT_B);
    let tau_r = args.tau_r.or(file.tau_r).unwrap_or(DEFAULT_TAU_R);
    let gammas = if args.gamma.is_empty() {
        file.gamma
            .clone()
            .map(ScalarOrList::into_vec)
            .unwrap_or_else(|| DEFAULT_RATE_GAMMAS.to_vec())
    } else {
        args.gamma.clone()
    };

    let mut table = Table::new(vec![
        "gamma",
        "one_minus_theta",
        "R_closed_form",
        "R_overlap_quadrature",
    ]);
    stamp_header(&mut table, "rate-curve");
    table.meta("b", float_repr(b));
    table.meta("gamma", join_floats(&gammas));
    table.meta("tau_r", float_repr(tau_r));
    table.meta("seed", rc.seed);

    for &gamma in &gammas {
        let model = CorrelationModel::new(b, gamma, tau_r)?;
        for i in 0..=RATE_GRID_STEPS {
            let one_minus_theta = i as f64 / RATE_GRID_STEPS as f64;
            let theta = AbsorberTransmissivity::new(1.0 - one_minus_theta)?;
            let closed = decay_rate_geometric(&model, theta)?.r;
            // At theta = 1 the broadening is a delta line and the overlap
            // collapses to 2*pi*G(0).
            let overlap = if theta.value() == 1.0 {
                2.0 * PI * reservoir_spectrum(&model, 0.0)?
            } else {
                decay_rate_overlap(&model, theta)?.r
            };
            table.push(vec![
                Cell::Float(gamma),
                Cell::Float(one_minus_theta),
                Cell::Float(closed),
                Cell::Float(overlap),
            ]);
        }
    }
    finish(&table, rc.format, rc.out.as_deref())
}

fn spectra(args: SpectraArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let rc = resolve_common(&args.common, &file)?;
    let b = args.b.or(file.b).unwrap_or(DEFAULT_B);
    let tau_r = args.tau_r.or(file.tau_r).unwrap_or(DEFAULT_TAU_R);
    let gammas = if args.gamma.is_empty() {
        file.gamma
            .clone()
            .map(ScalarOrList::into_vec)
            .unwrap_or_else(|| DEFAULT_SPECTRA_GAMMAS.to_vec())
    } else {
        args.gamma.clone()
    };
    let theta_value = args.theta.or(file.theta).unwrap_or(DEFAULT_SPECTRA_THETA);
    let points = args.points.or(file.points).unwrap_or(DEFAULT_POINTS);
    if points < 2 {
        return Err(CliError::Config(format!(
            "points must be at least 2, got {points}"
        )));
    }
    let theta = AbsorberTransmissivity::new(theta_value)?;
    let theta0 = AbsorberTransmissivity::new(0.0)?;

    let multi = gammas.len() > 1;
    let mut columns = vec!["omega", "G", "F_theta0", "F_theta"];
    if multi {
        columns.insert(0, "gamma");
    }
    let mut table = Table::new(columns);
    stamp_header(&mut table, "spectra");
    table.meta("b", float_repr(b));
    table.meta("gamma", join_floats(&gammas));
    table.meta("tau_r", float_repr(tau_r));
    table.meta("theta", float_repr(theta_value));
    table.meta("points", points);
    table.meta("seed", rc.seed);

    let zone = PI / tau_r;
    let step = 2.0 * zone / (points - 1) as f64;
    for &gamma in &gammas {
        let model = CorrelationModel::new(b, gamma, tau_r)?;
        for i in 0..points {
            let omega = if i + 1 == points {
                zone
            } else {
                -zone + i as f64 * step
            };
            let g = reservoir_spectrum(&model, omega)?;
            let f0 = measurement_broadening(theta0, tau_r, omega)?;
            let f = measurement_broadening(theta, tau_r, omega)?;
            let mut row = vec![
                Cell::Float(omega),
                Cell::Float(g),
                Cell::Float(f0),
                Cell::Float(f),
            ];
            if multi {
                row.insert(0, Cell::Float(gamma));
            }
            table.push(row);
        }
    }
    finish(&table, rc.format, rc.out.as_deref())
}

fn decay(args: DecayArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let rc = resolve_common(&args.common, &file)?;
    let delta_phi = match args.delta_phi {
        Some(v) => v,
        None => match &file.delta_phi {
            Some(a) => a.radians()?,
            None => default_delta_phi(),
        },
    };
    let ps = if args.p.is_empty() {
        file.p
            .clone()
            .map(ScalarOrList::into_vec)
            .unwrap_or_else(|| DEFAULT_PS.to_vec())
    } else {
        args.p.clone()
    };
    for &p in &ps {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(CliError::Config(format!("p={p} outside [0, 1]")));
        }
    }
    let n_max = args.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX);
    let trajectories = args.trajectories.or(file.trajectories).unwrap_or(0);

    let multi = ps.len() > 1;
    let mut columns = vec!["n", "P_free_exact", "P_free_approx", "P_projective"];
    if trajectories > 0 {
        columns.push("P_montecarlo");
        columns.push("stderr");
    }
    if multi {
        columns.insert(0, "p");
    }
    let mut table = Table::new(columns);
    stamp_header(&mut table, "decay");
    table.meta("delta_phi", float_repr(delta_phi));
    table.meta("p", join_floats(&ps));
    table.meta("n_max", n_max);
    table.meta("trajectories", trajectories);
    table.meta("seed", rc.seed);

    for (j, &p) in ps.iter().enumerate() {
        let ensemble = if trajectories > 0 {
            let spec = EnsembleSpec {
                jumps: JumpModel::Persistence { delta_phi, p },
                theta: AbsorberTransmissivity::new(1.0)?,
                trajectories,
                seed: substream_seed(rc.seed, j as u64),
            };
            Some(estimate_decay(&spec, n_max)?)
        } else {
            None
        };
        for n in 0..=n_max {
            let exact = p_h_persistence_exact(n, delta_phi, p);
            let approx = p_h_persistence_approx(n, delta_phi, p).unwrap_or(f64::NAN);
            let mut row = vec![
                Cell::Int(n as i64),
                Cell::Float(exact),
                Cell::Float(approx),
                Cell::Float(p_h_projective(n, delta_phi)),
            ];
            if let Some(curve) = &ensemble {
                let pt = curve.points[n];
                row.push(Cell::Float(pt.p_h));
                row.push(Cell::Float(pt.stderr.unwrap_or(0.0)));
            }
            if multi {
                row.insert(0, Cell::Float(p));
            }
            table.push(row);
        }
    }
    finish(&table, rc.format, rc.out.as_deref())
}

fn montecarlo(args: MontecarloArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let rc = resolve_common(&args.common, &file)?;
    let model_kind = args
        .model
        .or(file.model_kind()?)
        .unwrap_or(ModelKind::Persistence);
    let delta_phi = match args.delta_phi {
        Some(v) => v,
        None => match &file.delta_phi {
            Some(a) => a.radians()?,
            None => default_delta_phi(),
        },
    };
    let p = args
        .p
        .or(scalar_from(file.p.clone(), "p")?)
        .unwrap_or(DEFAULT_PS[0]);
    let theta_value = args.theta.or(file.theta).unwrap_or(1.0);
    let n_max = args.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX);
    let trajectories = args
        .trajectories
        .or(file.trajectories)
        .unwrap_or(DEFAULT_TRAJECTORIES);
    let observable = args
        .observable
        .or(file.observable_kind()?)
        .unwrap_or(ObservableKind::Decay);
    let threads = args.threads.or(file.threads);
    if threads == Some(0) {
        return Err(CliError::Config("threads must be at least 1".to_string()));
    }

    let theta = AbsorberTransmissivity::new(theta_value)?;
    let jumps = match model_kind {
        ModelKind::Fixed => JumpModel::Fixed { delta_phi },
        ModelKind::Iid => JumpModel::IidTwoPoint { delta_phi },
        ModelKind::Persistence => JumpModel::Persistence { delta_phi, p },
    };
    let spec = EnsembleSpec {
        jumps: jumps.clone(),
        theta,
        trajectories,
        seed: rc.seed,
    };

    let estimate = || match observable {
        ObservableKind::Decay => estimate_decay(&spec, n_max),
        ObservableKind::Survival => estimate_survival(&spec, n_max),
    };
    // Worker count never changes the numbers: blocks are merged in order.
    let curve = match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
            pool.install(estimate)?
        }
        None => estimate()?,
    };

    let fixed_survival = if matches!(observable, ObservableKind::Survival)
        && matches!(model_kind, ModelKind::Fixed)
        && theta_value < 1.0
    {
        let states = propagate(
            PolarizationAmplitudes::horizontal(),
            &vec![delta_phi; n_max],
            theta,
        )?;
        Some(states.iter().map(|s| s.norm_sq()).collect::<Vec<f64>>())
    } else {
        None
    };
    let chain = jumps.chain_spec();

    let mut table = Table::new(vec!["n", "p_h_mc", "stderr", "p_h_reference"]);
    stamp_header(&mut table, "montecarlo");
    table.meta("model", model_name(model_kind));
    table.meta("delta_phi", float_repr(delta_phi));
    table.meta("p", float_repr(p));
    table.meta("theta", float_repr(theta_value));
    table.meta("n_max", n_max);
    table.meta("trajectories", trajectories);
    table.meta("observable", observable_name(observable));
    table.meta("seed", rc.seed);

    for n in 0..=n_max {
        let reference = match observable {
            ObservableKind::Decay => {
                if theta_value == 1.0 {
                    p_h_chain(n, &chain)?
                } else if matches!(model_kind, ModelKind::Fixed) {
                    p_h_fixed_angle(n, delta_phi, theta)
                } else if theta_value == 0.0 {
                    p_h_projective(n, delta_phi)
                } else {
                    f64::NAN
                }
            }
            ObservableKind::Survival => {
                if theta_value == 1.0 {
                    1.0
                } else if let Some(v) = &fixed_survival {
                    v[n]
                } else if theta_value == 0.0 {
                    p_h_projective(n, delta_phi)
                } else {
                    f64::NAN
                }
            }
        };
        let pt = curve.points[n];
        table.push(vec![
            Cell::Int(n as i64),
            Cell::Float(pt.p_h),
            Cell::Float(pt.stderr.unwrap_or(0.0)),
            Cell::Float(reference),
        ]);
    }
    finish(&table, rc.format, rc.out.as_deref())
}

fn validate(args: ValidateArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let rc = resolve_common(&args.common, &file)?;
    let b = args.b.or(file.b).unwrap_or(DEFAULT_B);
    let gamma = args
        .gamma
        .or(scalar_from(file.gamma.clone(), "gamma")?)
        .unwrap_or(0.0);
    let theta_value = args.theta.or(file.theta).unwrap_or(0.5);
    let n_max = args.n_max.or(file.n_max).unwrap_or(100);
    let threshold = args.threshold.or(file.threshold).unwrap_or(VALIDITY_THRESHOLD);

    // The ratios are scale-free in the round-trip time.
    let model = CorrelationModel::new(b, gamma, 1.0)?;
    let theta = AbsorberTransmissivity::new(theta_value)?;
    let conditions = validity_check_with_threshold(&model, theta, n_max, threshold);

    let mut table = Table::new(vec!["condition", "ratio", "satisfied"]);
    stamp_header(&mut table, "validate");
    table.meta("b", float_repr(b));
    table.meta("gamma", float_repr(gamma));
    table.meta("theta", float_repr(theta_value));
    table.meta("n_max", n_max);
    table.meta("threshold", float_repr(threshold));
    table.meta("seed", rc.seed);

    for c in conditions {
        table.push(vec![
            Cell::Text(c.name.to_string()),
            Cell::Float(c.ratio),
            Cell::Flag(c.satisfied),
        ]);
    }
    finish(&table, rc.format, rc.out.as_deref())
}
