//! Turns a parsed config into a generator, an initial state and the
//! symmetry prediction that goes with it.

use std::path::Path;

use liouville_blocks::fock::{annihilation, build_basis, mode_number, BasisRef, Operator, Statistics};
use liouville_blocks::linalg::{hermitian_eigen, CMatrix};
use liouville_blocks::quadratic::{chain_sigma_x, jordan_wigner_chain, SpinChainSpec};
use liouville_blocks::random::random_graded_instance;
use liouville_blocks::redfield::{
    assemble_liouvillian, check_conditions, decompose_channels, squeezed_single_mode, BathSpec, Channel,
    ConditionReport, LambShift, Liouvillian, PsaPolicy, SecularMode, TwoSpinSystem,
};
use liouville_blocks::{Error, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{
    expand_times, parse_matrix, BathConfig, ConfigError, Generator, InitialState, LambShiftConfig, OutputKind,
    PsaModeConfig, ScenarioConfig, StatisticsConfig, SystemConfig,
};

/// Whether the number symmetry is expected, and why.
#[derive(Debug)]
pub struct Prediction {
    pub symmetric: bool,
    pub reason: String,
    pub conditions: Option<ConditionReport>,
}

/// Inputs for the second-moment equations of linearly coupled bosons.
#[derive(Debug)]
pub struct GaussianSetup {
    pub energies: Vec<f64>,
    pub bath: BathSpec,
}

#[derive(Debug)]
pub struct Scenario {
    pub system: &'static str,
    pub basis: BasisRef,
    pub generator: Liouvillian,
    pub policy: PsaPolicy,
    pub prediction: Prediction,
    pub initial_state: Option<Operator>,
    pub times: Option<Vec<f64>>,
    pub outputs: Vec<OutputKind>,
    pub gaussian: Option<GaussianSetup>,
    /// Two-spin runs report the population/coherence observables.
    pub two_spin: bool,
    pub units: String,
    pub seed: Option<u64>,
}

fn lib_err(field: &str) -> impl Fn(Error) -> ConfigError + '_ {
    move |e| ConfigError::new(field, e.to_string())
}

fn bath_spec(b: &BathConfig, k: usize) -> Result<BathSpec, ConfigError> {
    let field = format!("baths[{k}]");
    let spec = BathSpec::ohmic(b.mu, b.temperature, b.cutoff).map_err(lib_err(&field))?;
    Ok(match b.lamb_shift {
        LambShiftConfig::Off => spec,
        LambShiftConfig::Numeric => spec.with_lamb_shift(LambShift::Numeric),
    })
}

fn build_policy(cfg: &ScenarioConfig, baths: &[BathSpec]) -> Result<PsaPolicy, ConfigError> {
    let mode = match cfg.psa.mode {
        PsaModeConfig::Partial => SecularMode::Partial,
        PsaModeConfig::FullSecular => SecularMode::FullSecular,
        PsaModeConfig::None => SecularMode::None,
    };
    let tau_r = match (cfg.psa.tau_r, baths.first()) {
        (Some(t), _) => t,
        (None, Some(b)) => 1.0 / (b.mu * b.mu),
        (None, None) => 1.0,
    };
    let chi = cfg.psa.chi.unwrap_or(liouville_blocks::redfield::DEFAULT_CHI);
    let freq_tol = cfg.psa.freq_tol.unwrap_or(liouville_blocks::redfield::DEFAULT_FREQ_TOL);
    PsaPolicy::new(tau_r, chi, mode, freq_tol).map_err(lib_err("psa"))
}

/// Resolves bath channel names against a table of named operators.
fn resolve_channels(
    cfg: &[BathConfig],
    lookup: &dyn Fn(&str) -> Option<Operator>,
) -> Result<Vec<Channel>, ConfigError> {
    let mut out = Vec::new();
    for (b, bath) in cfg.iter().enumerate() {
        for (c, ch) in bath.channels.iter().enumerate() {
            let field = format!("baths[{b}].channels[{c}]");
            let op = lookup(ch.name())
                .ok_or_else(|| ConfigError::new(&field, format!("unknown coupling operator `{}`", ch.name())))?;
            if !(ch.weight().is_finite()) {
                return Err(ConfigError::new(&field, "weight must be finite"));
            }
            out.push(Channel::new(ch.name(), op, b).with_weight(ch.weight()));
        }
    }
    if out.is_empty() {
        return Err(ConfigError::new("baths", "at least one channel is required"));
    }
    Ok(out)
}

/// `x{k}` is `a_k + a_k†` and `n{k}` is `a_k†a_k`, with 1-based `k`.
fn mode_operator(basis: &BasisRef, name: &str) -> Option<Operator> {
    let (kind, idx) = name.split_at(1);
    let k: usize = idx.parse().ok()?;
    if k == 0 || k > basis.mode_count() {
        return None;
    }
    match kind {
        "x" => {
            let a = annihilation(basis, k - 1).ok()?;
            Some(&a + &a.adjoint())
        }
        "n" => mode_number(basis, k - 1).ok(),
        _ => None,
    }
}

fn diagonal_hamiltonian(basis: &BasisRef, energies: &[f64]) -> Operator {
    let mut h = Operator::zeros(basis);
    for (k, e) in energies.iter().enumerate() {
        h = &h + &(&mode_number(basis, k).expect("mode in range") * *e);
    }
    h
}

fn predict(
    mode_energies: &[f64],
    h: &Operator,
    channels: &[Channel],
    policy: &PsaPolicy,
) -> Result<Prediction, ConfigError> {
    let decomposed = decompose_channels(h, channels, policy.freq_tol).map_err(lib_err("system"))?;
    let report = check_conditions(mode_energies, &decomposed, policy);
    let reason = if report.symmetry_predicted {
        "retained jump pairs share their excitation change".to_string()
    } else {
        format!(
            "{} retained pair(s) mix different excitation changes",
            report.violations.len() + report.ungraded.len()
        )
    };
    Ok(Prediction {
        symmetric: report.symmetry_predicted,
        reason,
        conditions: Some(report),
    })
}

fn check_positive(values: &[f64], field: &str) -> Result<(), ConfigError> {
    for (k, v) in values.iter().enumerate() {
        if !(v.is_finite() && *v > 0.0) {
            return Err(ConfigError::new(format!("{field}[{k}]"), "must be positive"));
        }
    }
    Ok(())
}

pub fn build(cfg: &ScenarioConfig, config_dir: &Path, seed: Option<u64>) -> Result<Scenario, ConfigError> {
    let times = cfg.times.as_ref().map(expand_times).transpose()?;
    let needs_times = cfg.outputs.contains(&OutputKind::Trajectory);
    if needs_times && (times.is_none() || cfg.initial_state.is_none()) {
        return Err(ConfigError::new(
            "outputs",
            "trajectory output needs both `times` and `initial_state`",
        ));
    }
    let baths: Vec<BathSpec> = cfg
        .baths
        .iter()
        .enumerate()
        .map(|(k, b)| bath_spec(b, k))
        .collect::<Result<_, _>>()?;
    let mut policy = build_policy(cfg, &baths)?;

    let mut gaussian = None;
    let mut two_spin = false;
    let (system, basis, hamiltonian, generator, prediction) = match &cfg.system {
        SystemConfig::TwoSpins {
            omega1,
            omega2,
            lambda,
            generator,
        } => {
            two_spin = true;
            let sys = TwoSpinSystem::new(*omega1, *omega2, *lambda).map_err(lib_err("system"))?;
            let d = &sys.diagonalization;
            let energies = [2.0 * d.e1, 2.0 * d.e2];
            match generator {
                Generator::Global => {
                    let c = &sys.couplings;
                    let lookup = |name: &str| match name {
                        "sigma1x" => Some(c.sigma1x.clone()),
                        "sigma2x" => Some(c.sigma2x.clone()),
                        "sigma1z" => Some(c.sigma1z.clone()),
                        "sigma2z" => Some(c.sigma2z.clone()),
                        _ => None,
                    };
                    let channels = resolve_channels(&cfg.baths, &lookup)?;
                    let l = assemble_liouvillian(&sys.hamiltonian, &channels, &baths, &policy)
                        .map_err(lib_err("system"))?;
                    let p = predict(&energies, &sys.hamiltonian, &channels, &policy)?;
                    ("two_spins", sys.basis.clone(), sys.hamiltonian.clone(), l, p)
                }
                Generator::Local => {
                    let pair: [BathSpec; 2] = baths.clone().try_into().map_err(|_| {
                        ConfigError::new("baths", "the local generator needs exactly two baths (spin 1, spin 2)")
                    })?;
                    let l = sys.local_liouvillian(&pair).map_err(lib_err("system"))?;
                    if let Some(p) = l.provenance() {
                        policy = policy.with_mode(p.mode);
                    }
                    let p = Prediction {
                        symmetric: *lambda == 0.0,
                        reason: "local dissipators are built from bare spin operators, which are not \
                                 eigenoperators of the coupled Hamiltonian"
                            .into(),
                        conditions: None,
                    };
                    ("two_spins_local", sys.basis.clone(), sys.hamiltonian.clone(), l, p)
                }
            }
        }
        SystemConfig::SpinChain { omegas, couplings } => {
            check_positive(omegas, "system.omegas")?;
            let spec = SpinChainSpec::new(omegas.clone(), couplings.clone()).map_err(lib_err("system"))?;
            let basis = build_basis(omegas.len(), Statistics::Fermionic, 1).map_err(lib_err("system"))?;
            let h = jordan_wigner_chain(&spec, &basis).map_err(lib_err("system"))?;
            let lookup = |name: &str| {
                let k: usize = name.strip_prefix("sigma")?.strip_suffix('x')?.parse().ok()?;
                if k == 0 || k > basis.mode_count() {
                    return None;
                }
                chain_sigma_x(&basis, k - 1).ok()
            };
            let lookup = |name: &str| lookup(name).or_else(|| mode_operator(&basis, name));
            let channels = resolve_channels(&cfg.baths, &lookup)?;
            let l = assemble_liouvillian(&h, &channels, &baths, &policy).map_err(lib_err("system"))?;
            let one_particle = single_particle_energies(&h);
            let p = predict(&one_particle, &h, &channels, &policy)?;
            ("spin_chain", basis, h, l, p)
        }
        SystemConfig::Bosons {
            energies,
            n_max,
            squeezing,
        } => {
            check_positive(energies, "system.energies")?;
            let basis = build_basis(energies.len(), Statistics::Bosonic, *n_max).map_err(lib_err("system"))?;
            if let Some(sq) = squeezing {
                if energies.len() != 1 {
                    return Err(ConfigError::new("system.squeezing", "squeezed baths need a single mode"));
                }
                let m = C64::new(sq.m[0], sq.m[1]);
                let l = squeezed_single_mode(&basis, energies[0], sq.gamma, sq.n_th, m)
                    .map_err(lib_err("system.squeezing"))?;
                let p = Prediction {
                    symmetric: m.norm() == 0.0,
                    reason: "squeezing terms change the excitation number by two; parity survives".into(),
                    conditions: None,
                };
                let h = diagonal_hamiltonian(&basis, energies);
                ("bosons_squeezed", basis, h, l, p)
            } else {
                let h = diagonal_hamiltonian(&basis, energies);
                let lookup = |name: &str| mode_operator(&basis, name);
                let channels = resolve_channels(&cfg.baths, &lookup)?;
                let l = assemble_liouvillian(&h, &channels, &baths, &policy).map_err(lib_err("system"))?;
                let p = predict(energies, &h, &channels, &policy)?;
                let linear_common = baths.len() == 1
                    && channels.len() == energies.len()
                    && channels
                        .iter()
                        .all(|c| c.weight == 1.0 && c.label.starts_with('x'))
                    && {
                        let mut names: Vec<&str> = channels.iter().map(|c| c.label.as_str()).collect();
                        names.sort();
                        names.dedup();
                        names.len() == energies.len()
                    };
                if linear_common {
                    gaussian = Some(GaussianSetup {
                        energies: energies.clone(),
                        bath: baths[0],
                    });
                }
                ("bosons", basis, h, l, p)
            }
        }
        SystemConfig::Custom {
            modes,
            statistics,
            n_max,
            hamiltonian,
            operators,
            mode_energies,
        } => {
            let stats = match statistics {
                StatisticsConfig::Fermionic => Statistics::Fermionic,
                StatisticsConfig::Bosonic => Statistics::Bosonic,
            };
            let basis = build_basis(*modes, stats, *n_max).map_err(lib_err("system"))?;
            let dim = basis.dim();
            let h = Operator::hermitian(
                basis.clone(),
                parse_matrix(hamiltonian, dim, "system.hamiltonian")?,
                "Hamiltonian",
            )
            .map_err(lib_err("system.hamiltonian"))?;
            let mut named = std::collections::BTreeMap::new();
            for (name, m) in operators {
                let field = format!("system.operators.{name}");
                let op = Operator::hermitian(basis.clone(), parse_matrix(m, dim, &field)?, "coupling operator")
                    .map_err(lib_err(&field))?;
                named.insert(name.clone(), op);
            }
            let lookup = |name: &str| named.get(name).cloned();
            let channels = resolve_channels(&cfg.baths, &lookup)?;
            let l = assemble_liouvillian(&h, &channels, &baths, &policy).map_err(lib_err("system"))?;
            let p = match mode_energies {
                Some(e) => predict(e, &h, &channels, &policy)?,
                None => {
                    let mut p = predict(&[], &h, &channels, &policy)?;
                    p.reason.push_str(" (mode energies not given)");
                    p
                }
            };
            ("custom", basis, h, l, p)
        }
        SystemConfig::RandomGraded {} => {
            let seed = seed.ok_or_else(|| ConfigError::new("system", "random_graded needs --seed"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_graded_instance(&mut rng).map_err(lib_err("system"))?;
            let l = inst.thermal_liouvillian().map_err(lib_err("system"))?;
            let p = predict(&inst.mode_energies, &inst.hamiltonian, &inst.channels, &inst.policy)?;
            policy = inst.policy;
            ("random_graded", inst.basis.clone(), inst.hamiltonian.clone(), l, p)
        }
    };

    if cfg.outputs.contains(&OutputKind::Gaussian) && gaussian.is_none() {
        return Err(ConfigError::new(
            "outputs",
            "gaussian output needs a bosons system with one bath and unit-weight channels x1..xM",
        ));
    }

    let initial_state = cfg
        .initial_state
        .as_ref()
        .map(|s| initial_state(s, &basis, &hamiltonian, config_dir))
        .transpose()?;

    Ok(Scenario {
        system,
        basis,
        generator,
        policy,
        prediction,
        initial_state,
        times,
        outputs: cfg.outputs.clone(),
        gaussian,
        two_spin,
        units: cfg.units.clone().unwrap_or_else(|| "omega1".into()),
        seed,
    })
}

fn initial_state(
    spec: &InitialState,
    basis: &BasisRef,
    hamiltonian: &Operator,
    config_dir: &Path,
) -> Result<Operator, ConfigError> {
    let field = "initial_state";
    match spec {
        InitialState::BasisState { occupation } => {
            let k = basis.index_of(occupation).ok_or_else(|| {
                ConfigError::new(
                    format!("{field}.occupation"),
                    format!("{occupation:?} is not a state of the basis"),
                )
            })?;
            Ok(Operator::outer(basis, k, k))
        }
        InitialState::Thermal { temperature } => {
            if !(temperature.is_finite() && *temperature > 0.0) {
                return Err(ConfigError::new(format!("{field}.temperature"), "must be positive"));
            }
            // Gibbs state of the bare Hamiltonian, read off the unitary part.
            let h = hamiltonian;
            let (ev, vecs) = hermitian_eigen(h.matrix());
            let e0 = ev.first().copied().unwrap_or(0.0);
            let w: Vec<f64> = ev.iter().map(|e| (-(e - e0) / temperature).exp()).collect();
            let z: f64 = w.iter().sum();
            let mut rho = CMatrix::zeros(basis.dim(), basis.dim());
            for (k, wk) in w.iter().enumerate() {
                let v = vecs.column(k);
                rho += v * v.adjoint() * C64::new(wk / z, 0.0);
            }
            Operator::new(basis.clone(), rho).map_err(lib_err(field))
        }
        InitialState::MatrixFile { path } => {
            let full = config_dir.join(path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| ConfigError::new(format!("{field}.path"), format!("cannot read {}: {e}", full.display())))?;
            let m: crate::config::Matrix = serde_json::from_str(&text)
                .map_err(|e| ConfigError::new(format!("{field}.path"), format!("{}: {e}", full.display())))?;
            let rho = parse_matrix(&m, basis.dim(), &format!("{field}.path"))?;
            let op = Operator::hermitian(basis.clone(), rho, "initial state").map_err(lib_err(field))?;
            if (op.trace() - C64::new(1.0, 0.0)).norm() > 1e-10 {
                return Err(ConfigError::new(field, "initial state must have unit trace"));
            }
            Ok(op)
        }
    }
}

/// Excitation energies of the one-particle sector above the vacuum.
fn single_particle_energies(h: &Operator) -> Vec<f64> {
    let basis = h.basis();
    let one: Vec<usize> = (0..basis.dim()).filter(|&k| basis.excitations(k) == 1).collect();
    let vac = (0..basis.dim()).find(|&k| basis.excitations(k) == 0).expect("vacuum present");
    let sub = CMatrix::from_fn(one.len(), one.len(), |r, c| h.matrix()[(one[r], one[c])]);
    let (ev, _) = hermitian_eigen(&sub);
    let e0 = h.matrix()[(vac, vac)].re;
    ev.into_iter().map(|e| e - e0).collect()
}
