//! Block spectra and the steady state extracted from the `d = 0` block.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::BlockDecomposition;
use crate::fock::{devectorize, vectorize, Operator, VectorizedOperator};
use crate::linalg::{eigenvalues, hermitian_eigen, max_abs_vec, null_space, right_singular_pairs, CVector, ZERO};
use crate::redfield::Liouvillian;
use crate::{Error, Result};

/// `|λ| < 10⁻⁹·max(1, ‖ℒ‖_max)` counts as a zero eigenvalue.
pub fn zero_tolerance(l: &Liouvillian) -> f64 {
    1e-9 * l.max_norm().max(1.0)
}

/// Eigenvalues of every block, keyed by `d`.
pub fn block_spectrum(dec: &BlockDecomposition) -> Result<BTreeMap<i32, Vec<Complex64>>> {
    dec.blocks()
        .par_iter()
        .map(|b| Ok((b.d, eigenvalues(&b.matrix)?)))
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Uniqueness {
    Unique,
    Degenerate(usize),
}

#[derive(Clone, Debug)]
pub struct SteadyStateReport {
    pub rho_ss: Operator,
    pub uniqueness: Uniqueness,
    pub zero_modes_per_block: BTreeMap<i32, usize>,
    /// `‖ℒ[ρ_ss]‖_max` evaluated with the full generator.
    pub residual: f64,
    pub min_eigenvalue: f64,
    pub zero_tolerance: f64,
    pub warnings: Vec<String>,
}

/// Steady state from the null space of `ℒ₀` alone.
///
/// The null space is projected onto `|I⟩⟩` (the combination with the
/// largest trace), then normalised and Hermitised.
pub fn steady_state(l: &Liouvillian, dec: &BlockDecomposition) -> Result<SteadyStateReport> {
    let tol = zero_tolerance(l);
    let mut warnings = Vec::new();
    let spectra = block_spectrum(dec)?;
    let zero_modes_per_block: BTreeMap<i32, usize> = spectra
        .iter()
        .map(|(&d, ev)| (d, ev.iter().filter(|z| z.norm() < tol).count()))
        .collect();
    let total_zero: usize = zero_modes_per_block.values().sum();

    let block0 = dec
        .block(0)
        .ok_or_else(|| Error::Numerical("generator has no d = 0 block".into()))?;
    let mut kernel = null_space(&block0.matrix, tol)?;
    if kernel.is_empty() {
        let (s, v) = right_singular_pairs(&block0.matrix)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Numerical("empty d = 0 block".into()))?;
        warnings.push(format!(
            "smallest singular value of the d = 0 block is {s:.3e}, above the zero tolerance {tol:.3e}"
        ));
        kernel.push(v);
    }

    let basis = l.basis().clone();
    let n = basis.dim();
    let trace_weight = |v: &CVector| -> Complex64 {
        block0
            .indices
            .iter()
            .zip(v.iter())
            .filter(|(&idx, _)| idx / n == idx % n)
            .map(|(_, x)| *x)
            .sum()
    };
    let mut combined = CVector::zeros(block0.indices.len());
    let mut largest_trace = 0.0f64;
    for v in &kernel {
        let t = trace_weight(v);
        largest_trace = largest_trace.max(t.norm());
        combined += v * t.conj();
    }
    let trace = trace_weight(&combined);
    if largest_trace < 1e-12 {
        return Err(Error::Numerical(
            "null space of the d = 0 block contains no state with nonzero trace".into(),
        ));
    }

    let mut full = CVector::from_element(n * n, ZERO);
    for (&idx, x) in block0.indices.iter().zip(combined.iter()) {
        full[idx] = *x / trace;
    }
    let raw = devectorize(&VectorizedOperator::new(basis.clone(), full)?);
    let herm = (raw.matrix() + raw.matrix().adjoint()) * Complex64::new(0.5, 0.0);
    let tr: Complex64 = herm.trace();
    let rho_ss = Operator::new(basis, herm / tr)?;

    let residual = max_abs_vec(&(l.matrix() * vectorize(&rho_ss).vector()));
    let (evals, _) = hermitian_eigen(rho_ss.matrix());
    let min_eigenvalue = evals.first().copied().unwrap_or(0.0);
    if min_eigenvalue < -1e-10 {
        warnings.push(format!("steady state has a negative eigenvalue {min_eigenvalue:.3e}"));
    }
    let uniqueness = if total_zero == 1 {
        Uniqueness::Unique
    } else {
        warnings.push(format!("{total_zero} zero eigenvalues: the steady state is not unique"));
        Uniqueness::Degenerate(total_zero)
    };
    Ok(SteadyStateReport {
        rho_ss,
        uniqueness,
        zero_modes_per_block,
        residual,
        min_eigenvalue,
        zero_tolerance: tol,
        warnings,
    })
}
