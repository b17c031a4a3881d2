//! Ready-made generators: two coupled spins (global and local master
//! equations) and a single mode in a squeezed bath.

use num_complex::Complex64;

use super::assembly::{
    add_anticommutator, add_dissipator, add_sandwich, assemble_liouvillian, assemble_with_model, Channel,
    DecomposedChannel, Liouvillian, ThermalMeanRule,
};
use super::bath::BathSpec;
use super::jumps::{grading, JumpComponent, JumpDecomposition};
use super::psa::{PsaPolicy, SecularMode};
use crate::fock::{annihilation, build_basis, BasisRef, Operator, Statistics};
use crate::quadratic::{
    canonical_spin_operators, diagonalize_two_spin, spin_coupling_operators, spin_hamiltonian, SpinCouplings,
    TwoSpinDiagonalization,
};
use crate::{Error, Result};

/// Everything needed to build two-spin generators in the fermionic
/// eigenbasis.
#[derive(Clone, Debug)]
pub struct TwoSpinSystem {
    pub diagonalization: TwoSpinDiagonalization,
    pub basis: BasisRef,
    pub hamiltonian: Operator,
    pub couplings: SpinCouplings,
}

impl TwoSpinSystem {
    pub fn new(omega1: f64, omega2: f64, lambda: f64) -> Result<Self> {
        let diagonalization = diagonalize_two_spin(omega1, omega2, lambda)?;
        let basis = build_basis(2, Statistics::Fermionic, 1)?;
        let hamiltonian = diagonalization.fermionic_hamiltonian(&basis)?;
        let couplings = spin_coupling_operators(&diagonalization, &basis)?;
        Ok(TwoSpinSystem {
            diagonalization,
            basis,
            hamiltonian,
            couplings,
        })
    }

    /// `σ₁ˣ` coupled to `baths[0]`, `σ₂ˣ` to `baths[1]`.
    pub fn global_channels(&self) -> Vec<Channel> {
        vec![
            Channel::new("sigma1x", self.couplings.sigma1x.clone(), 0),
            Channel::new("sigma2x", self.couplings.sigma2x.clone(), 1),
        ]
    }

    pub fn global_liouvillian(&self, baths: &[BathSpec; 2], policy: &PsaPolicy) -> Result<Liouvillian> {
        assemble_liouvillian(&self.hamiltonian, &self.global_channels(), baths, policy)
    }

    /// Local master equation: each spin relaxes through its bare `σᵢ^±` at
    /// frequency `ωᵢ` as if the coupling `λ` were absent from the
    /// dissipator. Expressed in the fermionic eigenbasis.
    pub fn local_liouvillian(&self, baths: &[BathSpec; 2]) -> Result<Liouvillian> {
        let d = &self.diagonalization;
        let ops = canonical_spin_operators();
        let lift = |m: &nalgebra::DMatrix<f64>| d.spin_operator_in_eigenbasis(m, &self.basis);
        let h = lift(&spin_hamiltonian(d.omega1, d.omega2, d.lambda))?;
        let local = [
            (d.omega1, &ops.sigma1_minus, "sigma1"),
            (d.omega2, &ops.sigma2_minus, "sigma2"),
        ];
        let mut channels = Vec::with_capacity(2);
        for (bath, (omega, minus, label)) in local.into_iter().enumerate() {
            let lower = lift(minus)?;
            let raise = lower.adjoint();
            let components = vec![
                JumpComponent {
                    frequency: -omega,
                    delta: grading(&raise),
                    operator: raise,
                },
                JumpComponent {
                    frequency: omega,
                    delta: grading(&lower),
                    operator: lower,
                },
            ];
            channels.push(DecomposedChannel {
                label: label.to_string(),
                bath,
                weight: 1.0,
                jumps: JumpDecomposition { components },
            });
        }
        let policy = PsaPolicy::new(1.0, 2.0, SecularMode::FullSecular, 0.0)?;
        let model = ThermalMeanRule {
            baths: baths.to_vec(),
        };
        assemble_with_model(&h, &channels, &model, &policy)
    }
}

/// Single bosonic mode in a squeezed thermal bath:
/// `−i[E a†a, ρ] + γ(N+1)D[a] + γN D[a†]
///  − γM(a†ρa† − ½{a†a†, ρ}) − γM*(aρa − ½{aa, ρ})`.
///
/// The squeezing terms change the excitation number by two, so this
/// generator breaks the number symmetry while keeping the parity one.
pub fn squeezed_single_mode(
    basis: &BasisRef,
    energy: f64,
    gamma: f64,
    n_th: f64,
    squeezing: Complex64,
) -> Result<Liouvillian> {
    if basis.mode_count() != 1 || basis.statistics() != Statistics::Bosonic {
        return Err(Error::BasisMismatch);
    }
    if !(gamma >= 0.0 && n_th >= 0.0) {
        return Err(Error::Domain("squeezed bath needs γ ≥ 0 and N ≥ 0".into()));
    }
    let a = annihilation(basis, 0)?;
    let ad = a.adjoint();
    let h = &(&ad * &a) * energy;
    let mut l = Liouvillian::hamiltonian(&h).matrix().clone();
    let am = a.matrix();
    let adm = ad.matrix();
    add_dissipator(&mut l, Complex64::new(gamma * (n_th + 1.0), 0.0), am);
    add_dissipator(&mut l, Complex64::new(gamma * n_th, 0.0), adm);
    let c_plus = -squeezing * gamma;
    add_sandwich(&mut l, c_plus, adm, adm);
    add_anticommutator(&mut l, -c_plus * 0.5, &(adm * adm));
    let c_minus = -squeezing.conj() * gamma;
    add_sandwich(&mut l, c_minus, am, am);
    add_anticommutator(&mut l, -c_minus * 0.5, &(am * am));
    Liouvillian::from_matrix(basis.clone(), l)
}
