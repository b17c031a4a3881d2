//! Decomposition of coupling operators into eigenoperators of `H_S`.

use crate::fock::{BasisRef, Operator};
use crate::linalg::{hermitian_eigen, max_abs, CMatrix, ZERO};
use crate::{Error, Result};

/// Entries below this are treated as structural zeros when grading.
const GRADING_TOL: f64 = 1e-12;

/// One frequency component `Â(ω)`.
#[derive(Clone, Debug)]
pub struct JumpComponent {
    /// Energy removed from the system; `ω > 0` lowers the energy.
    pub frequency: f64,
    pub operator: Operator,
    /// Excitation change `δ` with `[N̂, Â(ω)] = δ Â(ω)`, if one exists.
    pub delta: Option<i32>,
}

#[derive(Clone, Debug)]
pub struct JumpDecomposition {
    pub components: Vec<JumpComponent>,
}

impl JumpDecomposition {
    pub fn frequencies(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.frequency).collect()
    }

    /// Sum of all components; equals the decomposed operator.
    pub fn resum(&self, basis: &BasisRef) -> Operator {
        let mut total = Operator::zeros(basis);
        for c in &self.components {
            total = &total + &c.operator;
        }
        total
    }

    pub fn component(&self, frequency: f64, tol: f64) -> Option<&JumpComponent> {
        self.components
            .iter()
            .find(|c| (c.frequency - frequency).abs() <= tol)
    }
}

/// `Â(ω) = Σ_{ε_m − ε_n = ω} |e_n⟩⟨e_n|Â|e_m⟩⟨e_m|`.
///
/// Gaps equal within `freq_tol` are merged; the merged frequency is the mean
/// of its members, and a cluster containing zero is pinned to exactly zero.
/// Components that vanish identically are dropped.
pub fn jump_decompose(h: &Operator, a: &Operator, freq_tol: f64) -> Result<JumpDecomposition> {
    h.same_basis(a)?;
    let defect = h.hermiticity_defect();
    if defect > 1e-12 {
        return Err(Error::NotHermitian {
            what: "system Hamiltonian",
            deviation: defect,
        });
    }
    if !(freq_tol >= 0.0) {
        return Err(Error::Domain(format!("frequency tolerance must be non-negative, got {freq_tol}")));
    }
    let basis = h.basis().clone();
    let n = basis.dim();
    let (energies, vecs) = hermitian_eigen(h.matrix());
    let a_eig = vecs.adjoint() * a.matrix() * &vecs;

    let mut gaps: Vec<f64> = Vec::with_capacity(n * n);
    for &em in &energies {
        for &en in &energies {
            let g = em - en;
            if g >= 0.0 {
                gaps.push(g);
            }
        }
    }
    gaps.sort_by(|x, y| x.total_cmp(y));
    let clusters = cluster(&gaps, freq_tol);

    let scale = max_abs(a.matrix()).max(1.0);
    let mut parts: Vec<(f64, CMatrix)> = Vec::new();
    for m in 0..n {
        for nn in 0..n {
            let entry = a_eig[(nn, m)];
            if entry == ZERO {
                continue;
            }
            let g = energies[m] - energies[nn];
            let rep = representative(&clusters, g.abs());
            let omega = if g < 0.0 { -rep } else { rep };
            let slot = match parts.iter().position(|(w, _)| *w == omega) {
                Some(i) => i,
                None => {
                    parts.push((omega, CMatrix::zeros(n, n)));
                    parts.len() - 1
                }
            };
            parts[slot].1[(nn, m)] = entry;
        }
    }
    parts.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut components = Vec::with_capacity(parts.len());
    for (omega, block) in parts {
        // For diagonal H the eigenvectors are exact unit vectors, so this
        // back-transformation introduces no round-off.
        let m = &vecs * block * vecs.adjoint();
        if max_abs(&m) <= 1e-14 * scale {
            continue;
        }
        let operator = Operator::new(basis.clone(), m)?;
        let delta = grading(&operator);
        components.push(JumpComponent {
            frequency: omega,
            operator,
            delta,
        });
    }
    Ok(JumpDecomposition { components })
}

/// Sorted non-negative gaps → clusters `(lo, hi, mean)`.
fn cluster(sorted: &[f64], tol: f64) -> Vec<(f64, f64, f64)> {
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[start] > tol {
            let members = &sorted[start..i];
            let lo = members[0];
            let hi = members[members.len() - 1];
            let mean = if lo <= tol {
                0.0
            } else {
                members.iter().sum::<f64>() / members.len() as f64
            };
            out.push((lo, hi, mean));
            start = i;
        }
    }
    out
}

fn representative(clusters: &[(f64, f64, f64)], g: f64) -> f64 {
    clusters
        .iter()
        .find(|(lo, hi, _)| g >= *lo && g <= *hi)
        .map(|c| c.2)
        .expect("every gap belongs to a cluster")
}

/// Integer `δ` such that every nonzero entry `(i, j)` has `n_i − n_j = δ`.
pub fn grading(op: &Operator) -> Option<i32> {
    let basis = op.basis();
    let m = op.matrix();
    let scale = max_abs(m).max(1.0);
    let mut delta = None;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)].norm() <= GRADING_TOL * scale {
                continue;
            }
            let d = basis.excitations(i) as i32 - basis.excitations(j) as i32;
            match delta {
                None => delta = Some(d),
                Some(prev) if prev != d => return None,
                _ => {}
            }
        }
    }
    // An all-zero operator is trivially graded; call it δ = 0.
    Some(delta.unwrap_or(0))
}
