//! Propagation `ρ(t) = exp(ℒt)[ρ₀]`, sector by sector.

use num_complex::Complex64;
use rayon::prelude::*;

use super::BlockDecomposition;
use crate::fock::{devectorize, vectorize, Operator, Statistics, VectorizedOperator};
use crate::linalg::{expm, CMatrix, CVector, ZERO};
use crate::redfield::Liouvillian;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Propagation {
    /// Each `d` sector propagated with its own block.
    Blocks,
    /// Dense exponential of the whole generator.
    Full,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Operator>,
    pub method: Propagation,
}

fn check_initial(l: &Liouvillian, rho0: &Operator) -> Result<()> {
    if **rho0.basis() != **l.basis() {
        return Err(Error::BasisMismatch);
    }
    let tr = rho0.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::NotNormalized { trace: tr.re });
    }
    Ok(())
}

/// Block-wise propagation. Falls back to the full exponential when the
/// generator leaks between sectors (`offblock_norm` above `10⁻¹²·‖ℒ‖`).
pub fn evolve(l: &Liouvillian, dec: &BlockDecomposition, rho0: &Operator, times: &[f64]) -> Result<Trajectory> {
    check_initial(l, rho0)?;
    if dec.offblock_norm() > 1e-12 * l.max_norm().max(1.0) {
        return evolve_full(l, rho0, times);
    }
    let basis = l.basis().clone();
    let v0 = vectorize(rho0).into_vector();
    let dim = v0.len();
    // Sectors with zero initial weight stay zero.
    let active: Vec<_> = dec
        .blocks()
        .iter()
        .filter(|b| b.indices.iter().any(|&i| v0[i] != ZERO))
        .collect();
    let per_block: Vec<Vec<CVector>> = active
        .par_iter()
        .map(|b| {
            let x0 = CVector::from_iterator(b.indices.len(), b.indices.iter().map(|&i| v0[i]));
            times
                .iter()
                .map(|&t| expm(&(&b.matrix * Complex64::new(t, 0.0))) * &x0)
                .collect()
        })
        .collect();

    let mut states = Vec::with_capacity(times.len());
    for k in 0..times.len() {
        let mut v = CVector::from_element(dim, ZERO);
        for (b, xs) in active.iter().zip(&per_block) {
            for (&idx, x) in b.indices.iter().zip(xs[k].iter()) {
                v[idx] = *x;
            }
        }
        states.push(devectorize(&VectorizedOperator::new(basis.clone(), v)?));
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        method: Propagation::Blocks,
    })
}

/// Dense reference propagation with `exp(ℒt)` of the full generator.
pub fn evolve_full(l: &Liouvillian, rho0: &Operator, times: &[f64]) -> Result<Trajectory> {
    check_initial(l, rho0)?;
    let basis = l.basis().clone();
    let v0 = vectorize(rho0).into_vector();
    let states = times
        .par_iter()
        .map(|&t| {
            let prop: CMatrix = expm(&(l.matrix() * Complex64::new(t, 0.0)));
            VectorizedOperator::new(basis.clone(), prop * &v0).map(|v| devectorize(&v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        method: Propagation::Full,
    })
}

/// Two-qubit observables in the fermionic eigenbasis
/// (`|00⟩_f, |01⟩_f, |10⟩_f, |11⟩_f` = indices 0..4).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig2Row {
    pub t: f64,
    pub p11: f64,
    pub p00: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

pub fn fig2_observables(traj: &Trajectory) -> Result<Vec<Fig2Row>> {
    let Some(first) = traj.states.first() else {
        return Ok(Vec::new());
    };
    let basis = first.basis();
    if basis.mode_count() != 2 || basis.statistics() != Statistics::Fermionic {
        return Err(Error::BasisMismatch);
    }
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, rho)| {
            let r = rho.matrix();
            Fig2Row {
                t,
                p11: r[(3, 3)].re,
                p00: r[(0, 0)].re,
                c0: 2.0 * r[(1, 2)].re,
                c1: 2.0 * r[(3, 1)].re + 2.0 * r[(2, 0)].re,
                c2: 2.0 * r[(3, 0)].re,
            }
        })
        .collect())
}
