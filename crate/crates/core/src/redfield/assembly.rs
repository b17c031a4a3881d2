//! Vectorized Liouvillian assembly.

use num_complex::Complex64;
use rayon::prelude::*;

use super::bath::BathSpec;
use super::jumps::{jump_decompose, JumpDecomposition};
use super::psa::{PsaPolicy, SecularMode};
use crate::fock::{devectorize, vectorize, BasisRef, Operator, VectorizedOperator};
use crate::linalg::{kron_add, max_abs, CMatrix, I, ONE, ZERO};
use crate::{Error, Result};

/// A system operator coupled linearly to one bath.
#[derive(Clone, Debug)]
pub struct Channel {
    pub label: String,
    pub operator: Operator,
    /// Index into the bath list.
    pub bath: usize,
    pub weight: f64,
}

impl Channel {
    pub fn new(label: impl Into<String>, operator: Operator, bath: usize) -> Self {
        Channel {
            label: label.into(),
            operator,
            bath,
            weight: 1.0,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

#[derive(Clone, Debug)]
pub struct DecomposedChannel {
    pub label: String,
    pub bath: usize,
    pub weight: f64,
    pub jumps: JumpDecomposition,
}

pub fn decompose_channels(h: &Operator, channels: &[Channel], freq_tol: f64) -> Result<Vec<DecomposedChannel>> {
    channels
        .iter()
        .map(|c| {
            Ok(DecomposedChannel {
                label: c.label.clone(),
                bath: c.bath,
                weight: c.weight,
                jumps: jump_decompose(h, &c.operator, freq_tol)?,
            })
        })
        .collect()
}

/// Identifies one retained term: channel `alpha` enters at `omega_p`
/// (daggered side), channel `beta` at `omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairKey {
    pub alpha: usize,
    pub beta: usize,
    pub omega: f64,
    pub omega_p: f64,
}

/// Source of `γ_αβ(ω, ω′)` and `S_αβ(ω, ω′)`.
///
/// A generator stays Hermiticity-preserving if
/// `γ_αβ(ω, ω′) = γ_βα(ω′, ω)*` and likewise for `S`.
pub trait CoefficientModel: Sync {
    fn coefficients(&self, channels: &[DecomposedChannel], key: PairKey) -> (Complex64, Complex64);
    fn rule(&self) -> String;
}

/// `γ_αβ(ω, ω′) = w_α w_β [γ(ω) + γ(ω′)]/2` for channels sharing a bath,
/// zero otherwise; `S` follows the same rule.
#[derive(Clone, Debug)]
pub struct ThermalMeanRule {
    pub baths: Vec<BathSpec>,
}

impl CoefficientModel for ThermalMeanRule {
    fn coefficients(&self, channels: &[DecomposedChannel], key: PairKey) -> (Complex64, Complex64) {
        let a = &channels[key.alpha];
        let b = &channels[key.beta];
        if a.bath != b.bath {
            return (ZERO, ZERO);
        }
        let bath = &self.baths[a.bath];
        let w = a.weight * b.weight;
        let g = 0.5 * (bath.rate(key.omega) + bath.rate(key.omega_p));
        let s = 0.5 * (bath.lamb(key.omega) + bath.lamb(key.omega_p));
        (Complex64::new(w * g, 0.0), Complex64::new(w * s, 0.0))
    }

    fn rule(&self) -> String {
        "arithmetic_mean".into()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeptTerm {
    pub alpha: usize,
    pub beta: usize,
    pub omega: f64,
    pub omega_p: f64,
    pub gamma: Complex64,
    pub lamb: Complex64,
}

/// How a generator was built.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub mode: SecularMode,
    pub chi: f64,
    pub tau_r: f64,
    pub threshold: f64,
    pub freq_tol: f64,
    pub coefficient_rule: String,
    pub channel_labels: Vec<String>,
    pub kept: Vec<KeptTerm>,
    /// Number of `(ω, ω′)` combinations removed by the secular policy.
    pub dropped: usize,
}

/// A Liouvillian acting on `|ρ⟩⟩` (row-major vectorization).
#[derive(Clone, Debug)]
pub struct Liouvillian {
    basis: BasisRef,
    matrix: CMatrix,
    d_labels: Vec<i32>,
    provenance: Option<Provenance>,
}

impl Liouvillian {
    pub fn from_matrix(basis: BasisRef, matrix: CMatrix) -> Result<Self> {
        let n2 = basis.dim() * basis.dim();
        if matrix.nrows() != n2 || matrix.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let d_labels = basis.d_labels();
        Ok(Liouvillian {
            basis,
            matrix,
            d_labels,
            provenance: None,
        })
    }

    /// `−i[H, ·]`.
    pub fn hamiltonian(h: &Operator) -> Liouvillian {
        let basis = h.basis().clone();
        let n = basis.dim();
        let id = CMatrix::identity(n, n);
        let mut m = CMatrix::zeros(n * n, n * n);
        kron_add(&mut m, -I, h.matrix(), &id);
        kron_add(&mut m, I, &id, &h.matrix().transpose());
        Liouvillian::from_matrix(basis, m).expect("dimensions follow from the basis")
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn basis(&self) -> &BasisRef {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn d_labels(&self) -> &[i32] {
        &self.d_labels
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Dimension `N²` of the vectorized space.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn max_norm(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        if **rho.basis() != *self.basis {
            return Err(Error::BasisMismatch);
        }
        let v = vectorize(rho);
        let out = &self.matrix * v.vector();
        Ok(devectorize(&VectorizedOperator::new(self.basis.clone(), out)?))
    }

    /// `max_c |Σ_j ℒ[jN+j, c]|`: zero iff `Tr ℒ[ρ] = 0` for all `ρ`.
    pub fn trace_defect(&self) -> f64 {
        let n = self.basis.dim();
        (0..self.dim())
            .map(|c| {
                (0..n)
                    .map(|j| self.matrix[(j * n + j, c)])
                    .sum::<Complex64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// Deviation from `ℒ[ρ†] = ℒ[ρ]†`, i.e. from
    /// `ℒ[(k,j),(l,i)] = ℒ[(j,k),(i,l)]*`.
    pub fn hermiticity_preservation_defect(&self) -> f64 {
        let n = self.basis.dim();
        let swap = |idx: usize| (idx % n) * n + idx / n;
        let mut worst = 0.0f64;
        for c in 0..self.dim() {
            for r in 0..self.dim() {
                let d = (self.matrix[(swap(r), swap(c))] - self.matrix[(r, c)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Assembles `ℒ` with the thermal mean-rate coefficient model.
pub fn assemble_liouvillian(
    h: &Operator,
    channels: &[Channel],
    baths: &[BathSpec],
    policy: &PsaPolicy,
) -> Result<Liouvillian> {
    policy.validate()?;
    for bath in baths {
        bath.validate()?;
    }
    for c in channels {
        if c.bath >= baths.len() {
            return Err(Error::Domain(format!(
                "channel {} refers to bath {} but only {} are defined",
                c.label,
                c.bath,
                baths.len()
            )));
        }
    }
    let decomposed = decompose_channels(h, channels, policy.freq_tol)?;
    let model = ThermalMeanRule {
        baths: baths.to_vec(),
    };
    assemble_with_model(h, &decomposed, &model, policy)
}

/// `ℒ = −i[(H+H_LS)⊗I − I⊗(H+H_LS)ᵀ]
///    + Σ γ_αβ(ω,ω′)[Â_β(ω)⊗Â_α*(ω′) − ½(K⊗I + I⊗Kᵀ)]`,
/// `K = Â_α†(ω′)Â_β(ω)`, summed over the pairs retained by `policy`.
pub fn assemble_with_model(
    h: &Operator,
    channels: &[DecomposedChannel],
    model: &dyn CoefficientModel,
    policy: &PsaPolicy,
) -> Result<Liouvillian> {
    if channels.is_empty() {
        return Err(Error::EmptyJumpSet);
    }
    let basis = h.basis().clone();
    for c in channels {
        for comp in &c.jumps.components {
            h.same_basis(&comp.operator)?;
        }
    }

    let mut keys = Vec::new();
    let mut dropped = 0usize;
    for (alpha, a) in channels.iter().enumerate() {
        for (beta, b) in channels.iter().enumerate() {
            for (ib, cb) in b.jumps.components.iter().enumerate() {
                for (ia, ca) in a.jumps.components.iter().enumerate() {
                    if policy.keeps(cb.frequency, ca.frequency) {
                        keys.push((
                            PairKey {
                                alpha,
                                beta,
                                omega: cb.frequency,
                                omega_p: ca.frequency,
                            },
                            ia,
                            ib,
                        ));
                    } else {
                        dropped += 1;
                    }
                }
            }
        }
    }

    let coefficients: Vec<(Complex64, Complex64)> = keys
        .par_iter()
        .map(|(key, _, _)| model.coefficients(channels, *key))
        .collect();

    let n = basis.dim();
    let mut l = CMatrix::zeros(n * n, n * n);
    let mut k_total = CMatrix::zeros(n, n);
    let mut h_ls = CMatrix::zeros(n, n);
    let mut kept = Vec::new();
    for ((key, ia, ib), (gamma, lamb)) in keys.iter().zip(coefficients) {
        if gamma == ZERO && lamb == ZERO {
            continue;
        }
        let a_beta = channels[key.beta].jumps.components[*ib].operator.matrix();
        let a_alpha = channels[key.alpha].jumps.components[*ia].operator.matrix();
        let k = a_alpha.adjoint() * a_beta;
        if gamma != ZERO {
            kron_add(&mut l, gamma, a_beta, &a_alpha.conjugate());
            k_total += &k * gamma;
        }
        if lamb != ZERO {
            h_ls += &k * lamb;
        }
        kept.push(KeptTerm {
            alpha: key.alpha,
            beta: key.beta,
            omega: key.omega,
            omega_p: key.omega_p,
            gamma,
            lamb,
        });
    }

    let id = CMatrix::identity(n, n);
    let h_eff = h.matrix() + &h_ls;
    kron_add(&mut l, -I, &h_eff, &id);
    kron_add(&mut l, I, &id, &h_eff.transpose());
    let half = ONE * 0.5;
    kron_add(&mut l, -half, &k_total, &id);
    kron_add(&mut l, -half, &id, &k_total.transpose());

    let provenance = Provenance {
        mode: policy.mode,
        chi: policy.chi,
        tau_r: policy.tau_r,
        threshold: policy.threshold(),
        freq_tol: policy.freq_tol,
        coefficient_rule: model.rule(),
        channel_labels: channels.iter().map(|c| c.label.clone()).collect(),
        kept,
        dropped,
    };
    Ok(Liouvillian::from_matrix(basis, l)?.with_provenance(provenance))
}

/// Adds `c·(X ρ Y)` to a vectorized generator.
pub(crate) fn add_sandwich(l: &mut CMatrix, c: Complex64, x: &CMatrix, y: &CMatrix) {
    kron_add(l, c, x, &y.transpose());
}

/// Adds `c·{X, ρ}` to a vectorized generator.
pub(crate) fn add_anticommutator(l: &mut CMatrix, c: Complex64, x: &CMatrix) {
    let n = x.nrows();
    let id = CMatrix::identity(n, n);
    kron_add(l, c, x, &id);
    kron_add(l, c, &id, &x.transpose());
}

/// Adds `c·D[A]ρ = c(AρA† − ½{A†A, ρ})`.
pub(crate) fn add_dissipator(l: &mut CMatrix, c: Complex64, a: &CMatrix) {
    add_sandwich(l, c, a, &a.adjoint());
    add_anticommutator(l, -c * 0.5, &(a.adjoint() * a));
}
