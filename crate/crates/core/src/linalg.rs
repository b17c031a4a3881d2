//! Small dense helpers shared by the physics modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest absolute entry, `‖A‖_max`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `‖A − A†‖_max`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_diagonal(m: &CMatrix, tol: f64) -> bool {
    m.row_iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, z)| i == j || z.norm() <= tol))
}

/// Non-zero entries `(row, col, value)` of a dense matrix.
pub fn nonzeros(m: &CMatrix) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if z != ZERO {
                out.push((i, j, z));
            }
        }
    }
    out
}

/// `target += coeff · (a ⊗ b)` touching only non-zero products.
pub fn kron_add(target: &mut CMatrix, coeff: Complex64, a: &CMatrix, b: &CMatrix) {
    let nb_r = b.nrows();
    let nb_c = b.ncols();
    let b_nz = nonzeros(b);
    if b_nz.is_empty() {
        return;
    }
    for (i, j, av) in nonzeros(a) {
        let scaled = coeff * av;
        for &(k, l, bv) in &b_nz {
            target[(i * nb_r + k, j * nb_c + l)] += scaled * bv;
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted
/// ascending; columns of the returned matrix are the eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if is_diagonal(m, 0.0) {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re));
        let values = order.iter().map(|&k| m[(k, k)].re).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (col, &k) in order.iter().enumerate() {
            vectors[(k, col)] = ONE;
        }
        return (values, vectors);
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a general complex square matrix (complex Schur form).
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    m.clone()
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))
}

/// Right singular vectors with their singular values, sorted ascending by
/// singular value.
pub fn right_singular_pairs(m: &CMatrix) -> Result<Vec<(f64, CVector)>> {
    let n = m.ncols();
    // Pad wide inputs so that V† carries all n right singular vectors.
    let square = if m.nrows() < n {
        let mut padded = CMatrix::zeros(n, n);
        padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = square
        .try_svd(false, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD returned no right singular vectors".into()))?;
    let mut pairs: Vec<(f64, CVector)> = (0..svd.singular_values.len())
        .map(|k| (svd.singular_values[k], v_t.row(k).adjoint()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

/// Orthonormal basis of the numerical null space (singular values `< tol`).
pub fn null_space(m: &CMatrix, tol: f64) -> Result<Vec<CVector>> {
    Ok(right_singular_pairs(m)?
        .into_iter()
        .take_while(|(s, _)| *s < tol)
        .map(|(_, v)| v)
        .collect())
}

/// `exp(m)` by scaling and squaring with a Padé approximant.
pub fn expm(m: &CMatrix) -> CMatrix {
    if m.nrows() == 0 {
        return m.clone();
    }
    m.exp()
}
