//! Excitation (Fock) bases, ladder operators and the vectorization
//! isomorphism `O ↦ |O⟩⟩ = Σ O_jk |e_j⟩⊗|e_k⟩`.
//!
//! Basis states are occupation tuples `(n_1, …, n_M)` ordered
//! lexicographically with mode 1 most significant, so for two fermionic
//! modes the order is `(0,0), (0,1), (1,0), (1,1)`. Mode indices in this
//! API are zero-based.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::linalg::{hermiticity_defect, max_abs, CMatrix, CVector, ONE};
use crate::{Error, Result};

/// Tolerance used when a constructor asserts Hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Statistics {
    Fermionic,
    Bosonic,
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Fermionic => f.write_str("fermionic"),
            Statistics::Bosonic => f.write_str("bosonic"),
        }
    }
}

/// Ordered excitation basis of `M` modes, each truncated at `n_max`.
#[derive(Debug)]
pub struct FockBasis {
    mode_count: usize,
    statistics: Statistics,
    n_max: u32,
    states: Vec<Vec<u32>>,
    index_of: HashMap<Vec<u32>, usize>,
}

/// Shared handle to a basis; operators carry one of these.
pub type BasisRef = Arc<FockBasis>;

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.mode_count == other.mode_count
            && self.statistics == other.statistics
            && self.n_max == other.n_max
    }
}

impl Eq for FockBasis {}

/// Builds the basis of `mode_count` modes. Fermionic bases ignore `n_max`
/// beyond validating it and always use single occupancy.
pub fn build_basis(mode_count: usize, statistics: Statistics, n_max: u32) -> Result<BasisRef> {
    if mode_count == 0 {
        return Err(Error::InvalidDimension("mode count must be at least 1".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidDimension("truncation n_max must be at least 1".into()));
    }
    let n_max = match statistics {
        Statistics::Fermionic => 1,
        Statistics::Bosonic => n_max,
    };
    let levels = n_max as usize + 1;
    let dim = levels
        .checked_pow(mode_count as u32)
        .filter(|&d| d <= 1 << 16)
        .ok_or_else(|| Error::InvalidDimension(format!("{levels}^{mode_count} states is too large")))?;

    let mut states = Vec::with_capacity(dim);
    for index in 0..dim {
        let mut occ = vec![0u32; mode_count];
        let mut rest = index;
        for slot in occ.iter_mut().rev() {
            *slot = (rest % levels) as u32;
            rest /= levels;
        }
        states.push(occ);
    }
    let index_of = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    Ok(Arc::new(FockBasis {
        mode_count,
        statistics,
        n_max,
        states,
        index_of,
    }))
}

impl FockBasis {
    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &[u32] {
        &self.states[index]
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index_of.get(occupation).copied()
    }

    /// Total excitation number `Σ_k n_k` of basis state `index`.
    pub fn excitations(&self, index: usize) -> u32 {
        self.states[index].iter().sum()
    }

    /// Grading label `d = n(e_j) − n(e_k)` of every vectorized index `j·N + k`.
    pub fn d_labels(&self) -> Vec<i32> {
        let n = self.dim();
        let exc: Vec<i32> = (0..n).map(|i| self.excitations(i) as i32).collect();
        let mut labels = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                labels.push(exc[j] - exc[k]);
            }
        }
        labels
    }

    fn check_mode(&self, k: usize) -> Result<()> {
        if k >= self.mode_count {
            return Err(Error::ModeIndex {
                index: k,
                modes: self.mode_count,
            });
        }
        Ok(())
    }
}

/// Dense complex matrix acting on a [`FockBasis`].
#[derive(Clone, Debug)]
pub struct Operator {
    basis: BasisRef,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(basis: BasisRef, matrix: CMatrix) -> Result<Self> {
        let n = basis.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Operator { basis, matrix })
    }

    /// Like [`Operator::new`] but rejects matrices with `‖A − A†‖_max ≥ 1e-12`.
    pub fn hermitian(basis: BasisRef, matrix: CMatrix, what: &'static str) -> Result<Self> {
        let op = Operator::new(basis, matrix)?;
        let deviation = hermiticity_defect(&op.matrix);
        if deviation >= HERMITIAN_TOL {
            return Err(Error::NotHermitian { what, deviation });
        }
        Ok(op)
    }

    pub fn zeros(basis: &BasisRef) -> Self {
        let n = basis.dim();
        Operator {
            basis: basis.clone(),
            matrix: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(basis: &BasisRef) -> Self {
        let n = basis.dim();
        Operator {
            basis: basis.clone(),
            matrix: CMatrix::identity(n, n),
        }
    }

    /// Projector `|e_j⟩⟨e_k|` onto basis states `j`, `k`.
    pub fn outer(basis: &BasisRef, j: usize, k: usize) -> Self {
        let mut op = Operator::zeros(basis);
        op.matrix[(j, k)] = ONE;
        op
    }

    pub fn basis(&self) -> &BasisRef {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            basis: self.basis.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Operator {
            basis: self.basis.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn same_basis(&self, other: &Operator) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || *self.basis == *other.basis {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    pub fn try_mul(&self, rhs: &Operator) -> Result<Operator> {
        self.same_basis(rhs)?;
        Ok(Operator {
            basis: self.basis.clone(),
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    pub fn try_add(&self, rhs: &Operator) -> Result<Operator> {
        self.same_basis(rhs)?;
        Ok(Operator {
            basis: self.basis.clone(),
            matrix: &self.matrix + &rhs.matrix,
        })
    }

    /// `[A, B]`.
    pub fn commutator(&self, rhs: &Operator) -> Result<Operator> {
        self.same_basis(rhs)?;
        Ok(Operator {
            basis: self.basis.clone(),
            matrix: &self.matrix * &rhs.matrix - &rhs.matrix * &self.matrix,
        })
    }

    /// `{A, B}`.
    pub fn anticommutator(&self, rhs: &Operator) -> Result<Operator> {
        self.same_basis(rhs)?;
        Ok(Operator {
            basis: self.basis.clone(),
            matrix: &self.matrix * &rhs.matrix + &rhs.matrix * &self.matrix,
        })
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    /// `‖A − B‖_max`.
    pub fn distance(&self, other: &Operator) -> Result<f64> {
        self.same_basis(other)?;
        Ok(max_abs(&(&self.matrix - &other.matrix)))
    }
}

// The operator overloads panic on a basis mismatch; use the `try_*`
// methods where the bases are not known to agree.
impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.try_mul(rhs).expect("operator product across different bases")
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator sum across different bases")
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.same_basis(rhs).expect("operator difference across different bases");
        Operator {
            basis: self.basis.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul<Complex64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: Complex64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// Annihilation operator of mode `k`.
///
/// Bosonic: `⟨n−1|a_k|n⟩ = √n` inside the truncated space. Fermionic:
/// Jordan-Wigner signs `(−1)^{Σ_{l<k} n_l}` make the canonical
/// anticommutation relations hold as exact matrix identities.
pub fn annihilation(basis: &BasisRef, k: usize) -> Result<Operator> {
    basis.check_mode(k)?;
    let n = basis.dim();
    let mut m = CMatrix::zeros(n, n);
    for (col, occ) in basis.states().iter().enumerate() {
        let nk = occ[k];
        if nk == 0 {
            continue;
        }
        let mut lowered = occ.clone();
        lowered[k] -= 1;
        let row = basis.index_of(&lowered).expect("lowered state lies in the basis");
        let amplitude = match basis.statistics() {
            Statistics::Bosonic => (nk as f64).sqrt(),
            Statistics::Fermionic => {
                let string: u32 = occ[..k].iter().sum();
                if string.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        m[(row, col)] = Complex64::new(amplitude, 0.0);
    }
    Operator::new(basis.clone(), m)
}

pub fn creation(basis: &BasisRef, k: usize) -> Result<Operator> {
    Ok(annihilation(basis, k)?.adjoint())
}

/// `n_k = c_k† c_k`, diagonal.
pub fn mode_number(basis: &BasisRef, k: usize) -> Result<Operator> {
    basis.check_mode(k)?;
    Ok(diagonal(basis, |occ| occ[k] as f64))
}

/// Total number operator `N̂ = Σ_k n_k`.
pub fn number_operator(basis: &BasisRef) -> Operator {
    diagonal(basis, |occ| occ.iter().sum::<u32>() as f64)
}

/// Parity operator `P̂ = exp(iπN̂)`, diagonal with entries `(−1)^{Σ n_k}`.
pub fn parity_operator(basis: &BasisRef) -> Operator {
    diagonal(basis, |occ| {
        if occ.iter().sum::<u32>() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    })
}

fn diagonal(basis: &BasisRef, f: impl Fn(&[u32]) -> f64) -> Operator {
    let n = basis.dim();
    let mut m = CMatrix::zeros(n, n);
    for (i, occ) in basis.states().iter().enumerate() {
        m[(i, i)] = Complex64::new(f(occ), 0.0);
    }
    Operator {
        basis: basis.clone(),
        matrix: m,
    }
}

/// `|O⟩⟩` with entry `O_jk` stored at index `j·N + k`.
#[derive(Clone, Debug)]
pub struct VectorizedOperator {
    basis: BasisRef,
    vector: CVector,
}

impl VectorizedOperator {
    pub fn new(basis: BasisRef, vector: CVector) -> Result<Self> {
        let n = basis.dim();
        if vector.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: vector.len(),
            });
        }
        Ok(VectorizedOperator { basis, vector })
    }

    pub fn basis(&self) -> &BasisRef {
        &self.basis
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn into_vector(self) -> CVector {
        self.vector
    }

    /// Hilbert-Schmidt product `⟨⟨O|R⟩⟩ = Tr(O†R)`.
    pub fn inner(&self, other: &VectorizedOperator) -> Result<Complex64> {
        if *self.basis != *other.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(self.vector.dotc(&other.vector))
    }
}

pub fn vectorize(op: &Operator) -> VectorizedOperator {
    let n = op.dim();
    let vector = CVector::from_fn(n * n, |idx, _| op.matrix[(idx / n, idx % n)]);
    VectorizedOperator {
        basis: op.basis.clone(),
        vector,
    }
}

pub fn devectorize(v: &VectorizedOperator) -> Operator {
    let n = v.basis.dim();
    Operator {
        basis: v.basis.clone(),
        matrix: CMatrix::from_fn(n, n, |j, k| v.vector[j * n + k]),
    }
}

/// `O ⊗ I_N`, so that `|OR⟩⟩ = left_super(O)|R⟩⟩`.
pub fn left_super(op: &Operator) -> CMatrix {
    let n = op.dim();
    let mut out = CMatrix::zeros(n * n, n * n);
    crate::linalg::kron_add(&mut out, ONE, &op.matrix, &CMatrix::identity(n, n));
    out
}

/// `I_N ⊗ Oᵀ`, so that `|RO⟩⟩ = right_super(O)|R⟩⟩`.
pub fn right_super(op: &Operator) -> CMatrix {
    let n = op.dim();
    let mut out = CMatrix::zeros(n * n, n * n);
    crate::linalg::kron_add(&mut out, ONE, &CMatrix::identity(n, n), &op.matrix.transpose());
    out
}

/// Density-matrix sanity helper: `|Tr ρ − 1|`.
pub fn trace_defect(rho: &Operator) -> f64 {
    (rho.trace() - ONE).norm()
}

/// Applies a superoperator matrix to an operator through the isomorphism.
pub fn apply_super(super_op: &CMatrix, op: &Operator) -> Result<Operator> {
    let n = op.dim();
    if super_op.nrows() != n * n || super_op.ncols() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: super_op.nrows(),
        });
    }
    let v = super_op * vectorize(op).vector;
    Ok(devectorize(&VectorizedOperator {
        basis: op.basis.clone(),
        vector: v,
    }))
}
