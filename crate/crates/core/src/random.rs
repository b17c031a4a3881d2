//! Random number-graded open systems for property testing.
//!
//! Every instance has a number-conserving Hamiltonian and couplings that
//! are either linear in the ladder operators (`δ = ±1`) or number
//! conserving (`δ = 0`), with mode energies far above the secular
//! threshold. The partial secular generator of such an instance commutes
//! with the number superoperator whatever the rate values are.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;

use crate::fock::{annihilation, build_basis, BasisRef, Operator, Statistics};
use crate::linalg::CMatrix;
use crate::redfield::{
    assemble_with_model, decompose_channels, BathSpec, Channel, CoefficientModel, DecomposedChannel, Liouvillian,
    PairKey, PsaPolicy, ThermalMeanRule,
};
use crate::Result;

#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub basis: BasisRef,
    pub hamiltonian: Operator,
    pub mode_energies: Vec<f64>,
    pub channels: Vec<Channel>,
    pub baths: Vec<BathSpec>,
    pub policy: PsaPolicy,
}

fn random_complex<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

/// Draws an instance with `M ≤ 3` modes.
pub fn random_graded_instance<R: Rng>(rng: &mut R) -> Result<RandomInstance> {
    let modes = rng.random_range(1..=3usize);
    let statistics = if rng.random_bool(0.5) {
        Statistics::Fermionic
    } else {
        Statistics::Bosonic
    };
    let n_max = match (statistics, modes) {
        (Statistics::Bosonic, 1) => rng.random_range(1..=4),
        (Statistics::Bosonic, 2) => rng.random_range(1..=2),
        _ => 1,
    };
    let basis = build_basis(modes, statistics, n_max)?;
    let ladders: Vec<Operator> = (0..modes).map(|k| annihilation(&basis, k)).collect::<Result<_>>()?;

    // Near-degenerate energies around a common scale, so that slightly
    // detuned pairs are retained by the partial secular rule.
    let base = rng.random_range(0.8..1.5);
    let mode_energies: Vec<f64> = (0..modes).map(|_| base + rng.random_range(0.0..0.03)).collect();
    let mut h = Operator::zeros(&basis);
    for (k, a) in ladders.iter().enumerate() {
        h = &h + &(&(&a.adjoint() * a) * mode_energies[k]);
    }
    for i in 0..modes {
        for j in (i + 1)..modes {
            let t = random_complex(rng, 0.01);
            let hop = &(&ladders[i].adjoint() * &ladders[j]) * t;
            h = &h + &(&hop + &hop.adjoint());
        }
    }
    let h = Operator::hermitian(basis.clone(), h.into_matrix(), "random Hamiltonian")?;

    let mu = rng.random_range(0.02..0.06);
    let bath_count = rng.random_range(1..=2usize);
    let mut baths: Vec<BathSpec> = (0..bath_count)
        .map(|_| BathSpec::ohmic(mu, rng.random_range(0.1..2.0), rng.random_range(2.0..10.0)))
        .collect::<Result<_>>()?;

    let mut channels = Vec::new();
    for bath in 0..bath_count {
        let count = rng.random_range(1..=2usize);
        for c in 0..count {
            let mut x = Operator::zeros(&basis);
            for a in &ladders {
                let coeff = random_complex(rng, 1.0);
                let term = a * coeff;
                x = &x + &(&term + &term.adjoint());
            }
            channels.push(Channel::new(format!("linear_{bath}_{c}"), x, bath).with_weight(rng.random_range(0.5..1.5)));
        }
    }
    // Number-conserving coupling on a bath of its own.
    if rng.random_bool(0.5) {
        let mut q = Operator::zeros(&basis);
        for (i, ai) in ladders.iter().enumerate() {
            for (j, aj) in ladders.iter().enumerate().skip(i) {
                let coeff = if i == j {
                    Complex64::new(rng.random_range(-1.0..1.0), 0.0)
                } else {
                    random_complex(rng, 1.0)
                };
                let term = &(&ai.adjoint() * aj) * coeff;
                q = if i == j { &q + &term } else { &(&q + &term) + &term.adjoint() };
            }
        }
        channels.push(Channel::new("number_conserving", q, baths.len()));
        baths.push(BathSpec::ohmic(mu, rng.random_range(0.1..2.0), rng.random_range(2.0..10.0))?);
    }
    let policy = PsaPolicy::from_coupling(mu)?;
    Ok(RandomInstance {
        basis,
        hamiltonian: h,
        mode_energies,
        channels,
        baths,
        policy,
    })
}

impl RandomInstance {
    pub fn decomposed(&self) -> Result<Vec<DecomposedChannel>> {
        decompose_channels(&self.hamiltonian, &self.channels, self.policy.freq_tol)
    }

    pub fn thermal_liouvillian(&self) -> Result<Liouvillian> {
        let model = ThermalMeanRule {
            baths: self.baths.clone(),
        };
        assemble_with_model(&self.hamiltonian, &self.decomposed()?, &model, &self.policy)
    }

    /// Generator with every retained coefficient randomly perturbed.
    pub fn perturbed_liouvillian<R: Rng>(&self, rng: &mut R, strength: f64) -> Result<Liouvillian> {
        let decomposed = self.decomposed()?;
        let base = ThermalMeanRule {
            baths: self.baths.clone(),
        };
        let model = RandomizedRates::new(base, &decomposed, &self.policy, rng, strength);
        assemble_with_model(&self.hamiltonian, &decomposed, &model, &self.policy)
    }
}

type KeyBits = (usize, usize, u64, u64);

fn bits(k: &PairKey) -> KeyBits {
    (k.alpha, k.beta, k.omega.to_bits(), k.omega_p.to_bits())
}

/// Multiplies each retained coefficient of a base model by a random complex
/// factor `f`, with `f(α,β,ω,ω′) = f(β,α,ω′,ω)*` so that Hermiticity
/// preservation survives.
pub struct RandomizedRates<M> {
    base: M,
    factors: HashMap<KeyBits, Complex64>,
}

impl<M: CoefficientModel> RandomizedRates<M> {
    pub fn new<R: Rng>(
        base: M,
        channels: &[DecomposedChannel],
        policy: &PsaPolicy,
        rng: &mut R,
        strength: f64,
    ) -> Self {
        let mut factors = HashMap::new();
        for (alpha, a) in channels.iter().enumerate() {
            for (beta, b) in channels.iter().enumerate() {
                for cb in &b.jumps.components {
                    for ca in &a.jumps.components {
                        if !policy.keeps(cb.frequency, ca.frequency) {
                            continue;
                        }
                        let key = PairKey {
                            alpha,
                            beta,
                            omega: cb.frequency,
                            omega_p: ca.frequency,
                        };
                        if factors.contains_key(&bits(&key)) {
                            continue;
                        }
                        let mirror = PairKey {
                            alpha: beta,
                            beta: alpha,
                            omega: ca.frequency,
                            omega_p: cb.frequency,
                        };
                        let re = 1.0 + rng.random_range(-strength..strength);
                        let f = if bits(&key) == bits(&mirror) {
                            Complex64::new(re, 0.0)
                        } else {
                            Complex64::new(re, rng.random_range(-strength..strength))
                        };
                        factors.insert(bits(&key), f);
                        factors.insert(bits(&mirror), f.conj());
                    }
                }
            }
        }
        RandomizedRates { base, factors }
    }
}

impl<M: CoefficientModel> CoefficientModel for RandomizedRates<M> {
    fn coefficients(&self, channels: &[DecomposedChannel], key: PairKey) -> (Complex64, Complex64) {
        let (g, s) = self.base.coefficients(channels, key);
        let f = self.factors.get(&bits(&key)).copied().unwrap_or(Complex64::new(1.0, 0.0));
        (g * f, s * f)
    }

    fn rule(&self) -> String {
        format!("{} (randomly perturbed)", self.base.rule())
    }
}

/// Random Hermitian `n × n` matrix with entries in `[-scale, scale]`.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| random_complex(rng, scale));
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random real symmetric `n × n` matrix with entries in `[-scale, scale]`.
pub fn random_real_symmetric<R: Rng>(rng: &mut R, n: usize, scale: f64) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-scale..scale), 0.0));
    (&a + a.transpose()) * Complex64::new(0.5, 0.0)
}
