//! Computes everything a run reports, then serializes it. Nothing touches
//! the filesystem until [`write_all`] has every output in memory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use liouville_blocks::blocks::{
    block_decompose, block_spectrum, evolve, fig2_observables, number_superoperator, parity_superoperator,
    steady_state, verify_conjugate_blocks, BlockDecomposition, Uniqueness,
};
use liouville_blocks::gaussian::{block_dims_gaussian, build_moment_eom, common_bath_coefficients, gaussian_steady};
use liouville_blocks::linalg::CMatrix;
use liouville_blocks::{Error, VERSION};
use serde::Serialize;

use crate::config::OutputKind;
use crate::scenario::Scenario;

pub type Pair = [f64; 2];

fn pair(z: liouville_blocks::C64) -> Pair {
    [z.re, z.im]
}

fn matrix_pairs(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| pair(m[(r, c)])).collect()).collect()
}

#[derive(Serialize)]
pub struct KeptTermOut {
    pub alpha: String,
    pub beta: String,
    pub omega: f64,
    pub omega_p: f64,
    pub gamma: Pair,
    pub lamb: Pair,
}

#[derive(Serialize)]
pub struct ProvenanceOut {
    pub mode: String,
    pub chi: f64,
    pub tau_r: f64,
    pub threshold: f64,
    pub freq_tol: f64,
    pub coefficient_rule: String,
    pub channels: Vec<String>,
    pub kept: Vec<KeptTermOut>,
    pub dropped: usize,
}

#[derive(Serialize)]
pub struct ConditionsOut {
    pub condition_one: bool,
    pub condition_two: bool,
    pub energies_resolved: bool,
    pub ungraded: usize,
    pub violations: Vec<[f64; 2]>,
}

#[derive(Serialize)]
pub struct SymmetryOut {
    pub tolerance: f64,
    pub number_commutator_norm: f64,
    pub parity_commutator_norm: f64,
    pub number_symmetric: bool,
    pub parity_symmetric: bool,
    pub predicted_number_symmetric: bool,
    pub prediction_reason: String,
    pub prediction_matches: bool,
    pub conditions: Option<ConditionsOut>,
}

#[derive(Serialize)]
pub struct BlocksOut {
    pub sizes: BTreeMap<i32, usize>,
    pub offblock_norm: f64,
    pub conjugate_deviation: f64,
    /// Nonzero `(to, from)` couplings when blocks leak.
    pub leaks: Vec<(i32, i32, f64)>,
}

#[derive(Serialize)]
pub struct SteadyOut {
    pub unique: bool,
    pub zero_modes: usize,
    pub zero_modes_per_block: BTreeMap<i32, usize>,
    pub residual: f64,
    pub min_eigenvalue: f64,
    pub zero_tolerance: f64,
    pub rho: Vec<Vec<Pair>>,
}

#[derive(Serialize)]
pub struct Report {
    pub version: &'static str,
    pub system: &'static str,
    pub units: String,
    pub seed: Option<u64>,
    pub dimension: usize,
    pub provenance: Option<ProvenanceOut>,
    pub symmetry: Option<SymmetryOut>,
    pub blocks: Option<BlocksOut>,
    pub spectrum: Option<BTreeMap<i32, Vec<Pair>>>,
    pub steady_state: Option<SteadyOut>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct GaussianOut {
    pub labels: Vec<String>,
    pub deltas: Vec<i32>,
    pub block_dims: (usize, usize),
    pub offblock_norm: f64,
    pub b_matrix: Vec<Vec<Pair>>,
    pub b_vector: Vec<Pair>,
    /// In moment-basis order.
    pub steady_moments: Vec<MomentValue>,
}

#[derive(Serialize)]
pub struct MomentValue {
    pub label: String,
    pub value: Pair,
}

pub struct RunOutput {
    pub report: Report,
    pub trajectory_csv: Option<String>,
    pub gaussian: Option<GaussianOut>,
}

/// Symmetry norms and verdicts, shared by `run` and `check-symmetry`.
pub fn symmetry(sc: &Scenario, tol: f64) -> Result<SymmetryOut, Error> {
    let n = number_superoperator(&sc.basis).commutator_norm(&sc.generator)?;
    let p = parity_superoperator(&sc.basis).commutator_norm(&sc.generator)?;
    let number_symmetric = n <= tol;
    let conditions = sc.prediction.conditions.as_ref().map(|c| ConditionsOut {
        condition_one: c.condition_one,
        condition_two: c.condition_two,
        energies_resolved: c.energies_resolved,
        ungraded: c.ungraded.len(),
        violations: c.violations.iter().map(|v| [v.2, v.3]).collect(),
    });
    Ok(SymmetryOut {
        tolerance: tol,
        number_commutator_norm: n,
        parity_commutator_norm: p,
        number_symmetric,
        parity_symmetric: p <= tol,
        predicted_number_symmetric: sc.prediction.symmetric,
        prediction_reason: sc.prediction.reason.clone(),
        prediction_matches: number_symmetric == sc.prediction.symmetric,
        conditions,
    })
}

fn provenance(sc: &Scenario) -> Option<ProvenanceOut> {
    let p = sc.generator.provenance()?;
    let label = |k: usize| p.channel_labels.get(k).cloned().unwrap_or_else(|| k.to_string());
    Some(ProvenanceOut {
        mode: p.mode.name().into(),
        chi: p.chi,
        tau_r: p.tau_r,
        threshold: p.threshold,
        freq_tol: p.freq_tol,
        coefficient_rule: p.coefficient_rule.clone(),
        channels: p.channel_labels.clone(),
        kept: p
            .kept
            .iter()
            .map(|t| KeptTermOut {
                alpha: label(t.alpha),
                beta: label(t.beta),
                omega: t.omega,
                omega_p: t.omega_p,
                gamma: pair(t.gamma),
                lamb: pair(t.lamb),
            })
            .collect(),
        dropped: p.dropped,
    })
}

fn blocks_out(dec: &BlockDecomposition) -> BlocksOut {
    BlocksOut {
        sizes: dec.d_values().into_iter().map(|d| (d, dec.size(d))).collect(),
        offblock_norm: dec.offblock_norm(),
        conjugate_deviation: verify_conjugate_blocks(dec),
        leaks: dec
            .couplings()
            .iter()
            .filter(|(_, v)| **v > 0.0)
            .map(|((to, from), v)| (*to, *from, *v))
            .collect(),
    }
}

fn trajectory_csv(sc: &Scenario, dec: &BlockDecomposition) -> Result<Option<String>, Error> {
    let (Some(rho0), Some(times)) = (&sc.initial_state, &sc.times) else {
        return Ok(None);
    };
    let traj = evolve(&sc.generator, dec, rho0, times)?;
    let mut out = String::new();
    if sc.two_spin {
        out.push_str("t,P11,P00,C0,C1,C2\n");
        for r in fig2_observables(&traj)? {
            writeln!(out, "{:e},{:e},{:e},{:e},{:e},{:e}", r.t, r.p11, r.p00, r.c0, r.c1, r.c2).expect("string");
        }
    } else {
        let names: Vec<String> = sc
            .basis
            .states()
            .iter()
            .map(|s| format!("P{}", s.iter().map(|n| n.to_string()).collect::<String>()))
            .collect();
        writeln!(out, "t,{}", names.join(",")).expect("string");
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            let pops: Vec<String> = (0..sc.basis.dim()).map(|k| format!("{:e}", rho.matrix()[(k, k)].re)).collect();
            writeln!(out, "{t:e},{}", pops.join(",")).expect("string");
        }
    }
    Ok(Some(out))
}

fn gaussian_out(sc: &Scenario) -> Result<Option<GaussianOut>, Error> {
    let Some(g) = &sc.gaussian else {
        return Ok(None);
    };
    let coeffs = common_bath_coefficients(&g.energies, &g.bath, &sc.policy)?;
    let sys = build_moment_eom(&coeffs)?;
    let steady = gaussian_steady(&sys)?;
    Ok(Some(GaussianOut {
        labels: sys.labels.iter().map(|l| l.name()).collect(),
        deltas: sys.deltas(),
        block_dims: block_dims_gaussian(sys.modes),
        offblock_norm: sys.offblock_norm(),
        b_matrix: matrix_pairs(&sys.b_matrix),
        b_vector: sys.b_vector.iter().map(|z| pair(*z)).collect(),
        steady_moments: sys
            .labels
            .iter()
            .zip(steady.iter())
            .map(|(l, z)| MomentValue {
                label: l.name(),
                value: pair(*z),
            })
            .collect(),
    }))
}

pub fn compute(sc: &Scenario, tol: f64) -> Result<RunOutput, Error> {
    let wants = |k: OutputKind| sc.outputs.contains(&k);
    let mut warnings = Vec::new();
    let dec = block_decompose(&sc.generator);
    if dec.offblock_norm() > tol {
        warnings.push(format!(
            "generator couples different d-blocks (off-block norm {:e}); block-wise results use the full generator",
            dec.offblock_norm()
        ));
    }
    let symmetry = if wants(OutputKind::SymmetryReport) { Some(symmetry(sc, tol)?) } else { None };
    if let Some(s) = &symmetry {
        if !s.prediction_matches {
            warnings.push("number-symmetry verdict differs from the a-priori prediction".into());
        }
    }
    let spectrum = if wants(OutputKind::Spectrum) {
        Some(
            block_spectrum(&dec)?
                .into_iter()
                .map(|(d, ev)| (d, ev.into_iter().map(pair).collect()))
                .collect(),
        )
    } else {
        None
    };
    let steady = if wants(OutputKind::SteadyState) {
        let r = steady_state(&sc.generator, &dec)?;
        warnings.extend(r.warnings.iter().cloned());
        let (unique, zero_modes) = match r.uniqueness {
            Uniqueness::Unique => (true, 1),
            Uniqueness::Degenerate(n) => (false, n),
        };
        Some(SteadyOut {
            unique,
            zero_modes,
            zero_modes_per_block: r.zero_modes_per_block.clone(),
            residual: r.residual,
            min_eigenvalue: r.min_eigenvalue,
            zero_tolerance: r.zero_tolerance,
            rho: matrix_pairs(r.rho_ss.matrix()),
        })
    } else {
        None
    };
    let trajectory_csv = if wants(OutputKind::Trajectory) { trajectory_csv(sc, &dec)? } else { None };
    let gaussian = if wants(OutputKind::Gaussian) { gaussian_out(sc)? } else { None };
    let report = Report {
        version: VERSION,
        system: sc.system,
        units: sc.units.clone(),
        seed: sc.seed,
        dimension: sc.basis.dim(),
        provenance: provenance(sc),
        symmetry,
        blocks: wants(OutputKind::Blocks).then(|| blocks_out(&dec)),
        spectrum,
        steady_state: steady,
        warnings,
    };
    Ok(RunOutput {
        report,
        trajectory_csv,
        gaussian,
    })
}

pub fn write_all(out: &RunOutput, dir: &Path) -> std::io::Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> std::io::Result<()> {
        std::fs::write(dir.join(name), body)?;
        written.push(name.to_string());
        Ok(())
    };
    put("report.json", to_json(&out.report))?;
    if let Some(csv) = &out.trajectory_csv {
        put("trajectory.csv", csv.clone())?;
    }
    if let Some(g) = &out.gaussian {
        put("gaussian.json", to_json(g))?;
    }
    Ok(written)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}
