//! Second-moment dynamics of `M` linearly damped bosonic modes.
//!
//! For `H = Σ E_k a_k†a_k + Σ s_ij a_i†a_j` and the dissipator
//! `Σ γ↓_ij(a_j ρ a_i† − ½{a_i†a_j, ρ}) + Σ γ↑_ij(a_j† ρ a_i − ½{a_i a_j†, ρ})`,
//! the quadratic moments obey `dx/dt = Bx + b`. Each moment carries the
//! grading `δ` (creations minus annihilations) and `B` never mixes
//! different `δ`.

mod algebra;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::fock::{annihilation, BasisRef, Operator, Statistics};
use crate::linalg::{eigenvalues, expm, hermiticity_defect, max_abs, CMatrix, CVector, ZERO};
use crate::redfield::{BathSpec, PsaPolicy};
use crate::{Error, Result};
use algebra::{annihilate, anticommutator, commutator, create, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MomentKind {
    /// `⟨a_i†a_j†⟩`, `δ = +2`.
    Creation,
    /// `⟨a_i†a_j⟩`, `δ = 0`.
    Number,
    /// `⟨a_i a_j⟩`, `δ = −2`.
    Annihilation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MomentLabel {
    pub kind: MomentKind,
    pub i: usize,
    pub j: usize,
}

impl MomentLabel {
    pub fn delta(&self) -> i32 {
        match self.kind {
            MomentKind::Creation => 2,
            MomentKind::Number => 0,
            MomentKind::Annihilation => -2,
        }
    }

    fn word(&self) -> Vec<(bool, usize)> {
        match self.kind {
            MomentKind::Creation => vec![(true, self.i), (true, self.j)],
            MomentKind::Number => vec![(true, self.i), (false, self.j)],
            MomentKind::Annihilation => vec![(false, self.i), (false, self.j)],
        }
    }

    fn poly(&self) -> Poly {
        Poly::word(self.word(), Complex64::new(1.0, 0.0))
    }

    /// Operator on a truncated bosonic basis (modes are 0-based).
    pub fn operator(&self, basis: &BasisRef) -> Result<Operator> {
        let ai = annihilation(basis, self.i)?;
        let aj = annihilation(basis, self.j)?;
        Ok(match self.kind {
            MomentKind::Creation => &ai.adjoint() * &aj.adjoint(),
            MomentKind::Number => &ai.adjoint() * &aj,
            MomentKind::Annihilation => &ai * &aj,
        })
    }

    /// Human-readable form with 1-based modes, e.g. `a1+a2`.
    pub fn name(&self) -> String {
        let (i, j) = (self.i + 1, self.j + 1);
        match self.kind {
            MomentKind::Creation => format!("a{i}+a{j}+"),
            MomentKind::Number => format!("a{i}+a{j}"),
            MomentKind::Annihilation => format!("a{i}a{j}"),
        }
    }
}

/// Ordered moments: `δ = +2` (`i ≤ j`), then `δ = 0` (all `i, j`), then
/// `δ = −2` (`i ≤ j`), each lexicographic in `(i, j)`.
pub fn moment_basis(modes: usize) -> Result<Vec<MomentLabel>> {
    if modes == 0 {
        return Err(Error::InvalidDimension("moment basis needs at least one mode".into()));
    }
    let mut out = Vec::new();
    let pairs_sym: Vec<(usize, usize)> = (0..modes).flat_map(|i| (i..modes).map(move |j| (i, j))).collect();
    for &(i, j) in &pairs_sym {
        out.push(MomentLabel {
            kind: MomentKind::Creation,
            i,
            j,
        });
    }
    for i in 0..modes {
        for j in 0..modes {
            out.push(MomentLabel {
                kind: MomentKind::Number,
                i,
                j,
            });
        }
    }
    for &(i, j) in &pairs_sym {
        out.push(MomentLabel {
            kind: MomentKind::Annihilation,
            i,
            j,
        });
    }
    Ok(out)
}

/// Block sizes `(δ = ±2, δ = 0)` = `(C(M+1, 2), M²)`.
pub fn block_dims_gaussian(modes: usize) -> (usize, usize) {
    (modes * (modes + 1) / 2, modes * modes)
}

#[derive(Clone, Debug)]
pub struct MomentCoefficients {
    pub energies: Vec<f64>,
    /// Hermitian `s_ij` of `Σ s_ij a_i†a_j`.
    pub lamb: CMatrix,
    pub gamma_down: CMatrix,
    pub gamma_up: CMatrix,
}

impl MomentCoefficients {
    pub fn modes(&self) -> usize {
        self.energies.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.modes();
        if m == 0 {
            return Err(Error::InvalidDimension("no modes".into()));
        }
        for (what, t) in [
            ("Lamb-shift table", &self.lamb),
            ("emission rate table", &self.gamma_down),
            ("absorption rate table", &self.gamma_up),
        ] {
            if t.nrows() != m || t.ncols() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: t.nrows().max(t.ncols()),
                });
            }
            let defect = hermiticity_defect(t);
            if defect > 1e-12 * max_abs(t).max(1.0) {
                return Err(Error::NotHermitian { what, deviation: defect });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct MomentSystem {
    pub modes: usize,
    pub labels: Vec<MomentLabel>,
    pub b_matrix: CMatrix,
    pub b_vector: CVector,
}

impl MomentSystem {
    pub fn deltas(&self) -> Vec<i32> {
        self.labels.iter().map(|l| l.delta()).collect()
    }

    /// Positions of the moments with grading `delta`.
    pub fn indices(&self, delta: i32) -> Vec<usize> {
        (0..self.labels.len()).filter(|&k| self.labels[k].delta() == delta).collect()
    }

    pub fn block(&self, delta: i32) -> (Vec<usize>, CMatrix, CVector) {
        let idx = self.indices(delta);
        let b = CMatrix::from_fn(idx.len(), idx.len(), |r, c| self.b_matrix[(idx[r], idx[c])]);
        let v = CVector::from_iterator(idx.len(), idx.iter().map(|&k| self.b_vector[k]));
        (idx, b, v)
    }

    /// Largest entry of `B` coupling different `δ`.
    pub fn offblock_norm(&self) -> f64 {
        let d = self.deltas();
        let mut worst = 0.0f64;
        for c in 0..d.len() {
            for r in 0..d.len() {
                if d[r] != d[c] {
                    worst = worst.max(self.b_matrix[(r, c)].norm());
                }
            }
        }
        worst
    }

    pub fn position(&self, label: MomentLabel) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }
}

/// Adjoint generator applied to a polynomial, normal ordered.
fn adjoint_action(c: &MomentCoefficients, o: &Poly) -> Poly {
    let m = c.modes();
    let mut h = Poly::default();
    for k in 0..m {
        h.add(&create(k).mul(&annihilate(k)), Complex64::new(c.energies[k], 0.0));
    }
    for i in 0..m {
        for j in 0..m {
            h.add(&create(i).mul(&annihilate(j)), c.lamb[(i, j)]);
        }
    }
    let mut out = Poly::default();
    out.add(&commutator(&h, o), Complex64::new(0.0, 1.0));
    for i in 0..m {
        for j in 0..m {
            let gd = c.gamma_down[(i, j)];
            if gd != ZERO {
                let sandwich = create(i).mul(o).mul(&annihilate(j));
                out.add(&sandwich, gd);
                out.add(&anticommutator(&create(i).mul(&annihilate(j)), o), -gd * 0.5);
            }
            let gu = c.gamma_up[(i, j)];
            if gu != ZERO {
                let sandwich = annihilate(i).mul(o).mul(&create(j));
                out.add(&sandwich, gu);
                out.add(&anticommutator(&annihilate(i).mul(&create(j)), o), -gu * 0.5);
            }
        }
    }
    out.normal_ordered()
}

/// Builds `(B, b)` from the adjoint action on every quadratic moment.
pub fn build_moment_eom(coefficients: &MomentCoefficients) -> Result<MomentSystem> {
    coefficients.validate()?;
    let modes = coefficients.modes();
    let labels = moment_basis(modes)?;
    let n = labels.len();
    let rows: Vec<Result<(Vec<Complex64>, Complex64)>> = labels
        .par_iter()
        .map(|label| {
            let image = adjoint_action(coefficients, &label.poly());
            let mut row = vec![ZERO; n];
            let mut constant = ZERO;
            for (word, coeff) in image.terms() {
                if word.is_empty() {
                    constant += coeff;
                    continue;
                }
                let target = match_label(word, &labels);
                match target {
                    Some(k) => row[k] += coeff,
                    None if coeff.norm() < 1e-12 => {}
                    None => {
                        return Err(Error::Numerical(format!(
                            "moment equations do not close: {} produced a term of degree {}",
                            label.name(),
                            word.len()
                        )))
                    }
                }
            }
            Ok((row, constant))
        })
        .collect();
    let mut b_matrix = CMatrix::zeros(n, n);
    let mut b_vector = CVector::zeros(n);
    for (r, res) in rows.into_iter().enumerate() {
        let (row, constant) = res?;
        for (c, v) in row.into_iter().enumerate() {
            b_matrix[(r, c)] = v;
        }
        b_vector[r] = constant;
    }
    Ok(MomentSystem {
        modes,
        labels,
        b_matrix,
        b_vector,
    })
}

fn match_label(word: &[(bool, usize)], labels: &[MomentLabel]) -> Option<usize> {
    if word.len() != 2 {
        return None;
    }
    let kind = match (word[0].0, word[1].0) {
        (true, true) => MomentKind::Creation,
        (true, false) => MomentKind::Number,
        (false, false) => MomentKind::Annihilation,
        (false, true) => return None,
    };
    let target = MomentLabel {
        kind,
        i: word[0].1,
        j: word[1].1,
    };
    labels.iter().position(|l| *l == target)
}

/// Solves `Bx + b = 0` block by block.
pub fn gaussian_steady(sys: &MomentSystem) -> Result<CVector> {
    let mut x = CVector::zeros(sys.labels.len());
    for delta in [2, 0, -2] {
        let (idx, b, v) = sys.block(delta);
        if idx.is_empty() {
            continue;
        }
        let ev = eigenvalues(&b)?;
        let min_real = ev.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
        if min_real < 1e-12 * max_abs(&b).max(1.0) {
            return Err(Error::SingularBlock { delta, min_real });
        }
        if v.iter().all(|z| *z == ZERO) {
            // A nonsingular homogeneous block has the zero fixed point.
            continue;
        }
        let sol = b
            .lu()
            .solve(&(-v))
            .ok_or(Error::SingularBlock { delta, min_real })?;
        for (k, &i) in idx.iter().enumerate() {
            x[i] = sol[k];
        }
    }
    Ok(x)
}

/// `x(t) = e^{Bt}x₀ + ∫₀ᵗ e^{Bs} ds · b`, per `δ` block.
///
/// The affine term comes from the exponential of the augmented matrix
/// `[[B, b], [0, 0]]`, which stays valid when `B` is singular.
pub fn evolve_covariance(sys: &MomentSystem, x0: &CVector, times: &[f64]) -> Result<Vec<CVector>> {
    if x0.len() != sys.labels.len() {
        return Err(Error::DimensionMismatch {
            expected: sys.labels.len(),
            found: x0.len(),
        });
    }
    let blocks: Vec<_> = [2, 0, -2].iter().map(|&d| sys.block(d)).collect();
    let per_block: Vec<Vec<CVector>> = blocks
        .par_iter()
        .map(|(idx, b, v)| {
            let n = idx.len();
            let mut aug = CMatrix::zeros(n + 1, n + 1);
            aug.view_mut((0, 0), (n, n)).copy_from(b);
            aug.view_mut((0, n), (n, 1)).copy_from(v);
            let mut x = CVector::zeros(n + 1);
            for (k, &i) in idx.iter().enumerate() {
                x[k] = x0[i];
            }
            x[n] = Complex64::new(1.0, 0.0);
            times
                .iter()
                .map(|&t| {
                    let y = expm(&(&aug * Complex64::new(t, 0.0))) * &x;
                    y.rows(0, n).into_owned()
                })
                .collect()
        })
        .collect();
    Ok((0..times.len())
        .map(|k| {
            let mut x = CVector::zeros(sys.labels.len());
            for ((idx, _, _), xs) in blocks.iter().zip(&per_block) {
                for (p, &i) in idx.iter().enumerate() {
                    x[i] = xs[k][p];
                }
            }
            x
        })
        .collect())
}

/// `⟨O⟩ = Tr(ρ O)` for each label, on a truncated bosonic basis.
pub fn moments_of_state(rho: &Operator, labels: &[MomentLabel]) -> Result<CVector> {
    let basis = rho.basis();
    if basis.statistics() != Statistics::Bosonic {
        return Err(Error::BasisMismatch);
    }
    let values = labels
        .iter()
        .map(|l| Ok((rho.matrix() * l.operator(basis)?.matrix()).trace()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(values))
}

/// Coefficients for modes each coupled through `a_k + a_k†` (unit weight)
/// to one shared bath, using the arithmetic-mean cross-frequency rule and
/// the secular policy to decide which `(i, j)` pairs survive.
pub fn common_bath_coefficients(energies: &[f64], bath: &BathSpec, policy: &PsaPolicy) -> Result<MomentCoefficients> {
    bath.validate()?;
    policy.validate()?;
    let m = energies.len();
    if m == 0 {
        return Err(Error::InvalidDimension("no modes".into()));
    }
    if energies.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Domain("mode energies must be positive".into()));
    }
    let mut gamma_down = CMatrix::zeros(m, m);
    let mut gamma_up = CMatrix::zeros(m, m);
    let mut s_down = DMatrix::<f64>::zeros(m, m);
    let mut s_up = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let (ei, ej) = (energies[i], energies[j]);
            if policy.keeps(ej, ei) {
                gamma_down[(i, j)] = Complex64::new(0.5 * (bath.rate(ei) + bath.rate(ej)), 0.0);
                s_down[(i, j)] = 0.5 * (bath.lamb(ei) + bath.lamb(ej));
            }
            if policy.keeps(-ej, -ei) {
                gamma_up[(i, j)] = Complex64::new(0.5 * (bath.rate(-ei) + bath.rate(-ej)), 0.0);
                s_up[(i, j)] = 0.5 * (bath.lamb(-ei) + bath.lamb(-ej));
            }
        }
    }
    // s↑ a_i a_j† = s↑ (a_j†a_i + δ_ij); the constant drops out of every
    // commutator.
    let lamb = CMatrix::from_fn(m, m, |i, j| Complex64::new(s_down[(i, j)] + s_up[(j, i)], 0.0));
    Ok(MomentCoefficients {
        energies: energies.to_vec(),
        lamb,
        gamma_down,
        gamma_up,
    })
}
