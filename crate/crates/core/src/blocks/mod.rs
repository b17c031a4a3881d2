//! Number-superoperator symmetry of a Liouvillian and the block structure
//! it induces.

mod evolve;
mod steady;

pub use evolve::{evolve, evolve_full, fig2_observables, Fig2Row, Propagation, Trajectory};
pub use steady::{block_spectrum, steady_state, zero_tolerance, SteadyStateReport, Uniqueness};

use std::collections::BTreeMap;

use crate::fock::BasisRef;
use crate::linalg::{CMatrix, ZERO};
use crate::redfield::Liouvillian;
use crate::{Error, Result};

/// Superoperator that is diagonal in the vectorized Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalSuperoperator {
    diagonal: Vec<f64>,
}

impl DiagonalSuperoperator {
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn matrix(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (i, &x) in self.diagonal.iter().enumerate() {
            m[(i, i)].re = x;
        }
        m
    }

    /// `‖Sℒ − ℒS‖_max`, using `(Sℒ − ℒS)_rc = (s_r − s_c) ℒ_rc`.
    pub fn commutator_norm(&self, l: &Liouvillian) -> Result<f64> {
        if self.dim() != l.dim() {
            return Err(Error::DimensionMismatch {
                expected: l.dim(),
                found: self.dim(),
            });
        }
        let m = l.matrix();
        let mut worst = 0.0f64;
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let ds = self.diagonal[r] - self.diagonal[c];
                if ds != 0.0 {
                    worst = worst.max(ds.abs() * m[(r, c)].norm());
                }
            }
        }
        Ok(worst)
    }
}

/// `𝒩 = N̂⊗I − I⊗N̂ᵀ`; entry `j·N + k` is `n(e_j) − n(e_k)`.
pub fn number_superoperator(basis: &BasisRef) -> DiagonalSuperoperator {
    DiagonalSuperoperator {
        diagonal: basis.d_labels().into_iter().map(f64::from).collect(),
    }
}

/// `𝒫 = exp(iπ𝒩)`, entries `(−1)^d`.
pub fn parity_superoperator(basis: &BasisRef) -> DiagonalSuperoperator {
    DiagonalSuperoperator {
        diagonal: basis
            .d_labels()
            .into_iter()
            .map(|d| if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 })
            .collect(),
    }
}

/// `‖Sℒ − ℒS‖_max` for an arbitrary dense superoperator `S`.
pub fn commutator_norm(s: &CMatrix, l: &Liouvillian) -> Result<f64> {
    if s.nrows() != l.dim() || s.ncols() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: s.nrows(),
        });
    }
    let c = s * l.matrix() - l.matrix() * s;
    Ok(crate::linalg::max_abs(&c))
}

#[derive(Clone, Debug)]
pub struct Block {
    pub d: i32,
    /// Vectorized indices `j·N + k`, ascending.
    pub indices: Vec<usize>,
    pub matrix: CMatrix,
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    basis: BasisRef,
    blocks: Vec<Block>,
    offblock_norm: f64,
    couplings: BTreeMap<(i32, i32), f64>,
}

impl BlockDecomposition {
    pub fn basis(&self) -> &BasisRef {
        &self.basis
    }

    /// Blocks sorted by ascending `d`.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn d_values(&self) -> Vec<i32> {
        self.blocks.iter().map(|b| b.d).collect()
    }

    pub fn block(&self, d: i32) -> Option<&Block> {
        self.blocks.iter().find(|b| b.d == d)
    }

    pub fn size(&self, d: i32) -> usize {
        self.block(d).map_or(0, |b| b.indices.len())
    }

    /// Largest entry of `ℒ` outside every diagonal block.
    pub fn offblock_norm(&self) -> f64 {
        self.offblock_norm
    }

    /// Largest entry of `ℒ` mapping sector `from` into sector `to`.
    pub fn coupling(&self, to: i32, from: i32) -> f64 {
        self.couplings.get(&(to, from)).copied().unwrap_or(0.0)
    }

    /// Nonzero inter-sector couplings `((to, from), max entry)`.
    pub fn couplings(&self) -> &BTreeMap<(i32, i32), f64> {
        &self.couplings
    }
}

pub fn block_decompose(l: &Liouvillian) -> BlockDecomposition {
    let labels = l.d_labels();
    let mut sets: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (idx, &d) in labels.iter().enumerate() {
        sets.entry(d).or_default().push(idx);
    }
    let m = l.matrix();
    let blocks = sets
        .into_iter()
        .map(|(d, indices)| {
            let matrix = CMatrix::from_fn(indices.len(), indices.len(), |r, c| m[(indices[r], indices[c])]);
            Block { d, indices, matrix }
        })
        .collect();

    let mut couplings: BTreeMap<(i32, i32), f64> = BTreeMap::new();
    let mut offblock_norm = 0.0f64;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if labels[r] == labels[c] || m[(r, c)] == ZERO {
                continue;
            }
            let v = m[(r, c)].norm();
            offblock_norm = offblock_norm.max(v);
            let e = couplings.entry((labels[r], labels[c])).or_insert(0.0);
            *e = e.max(v);
        }
    }
    BlockDecomposition {
        basis: l.basis().clone(),
        blocks,
        offblock_norm,
        couplings,
    }
}

/// `Σ_{k=|d|}^{M} C(M,k)·C(M,k−|d|)`: size of block `d` for `M` fermions.
pub fn block_dim_fermionic(modes: usize, d: i32) -> Result<usize> {
    let ad = d.unsigned_abs() as usize;
    if ad > modes {
        return Err(Error::Domain(format!("|d| = {ad} exceeds the mode count {modes}")));
    }
    Ok((ad..=modes).map(|k| binomial(modes, k) * binomial(modes, k - ad)).sum())
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `max_d ‖ℒ_d − (ℒ_{−d})*‖_max`, with `ℒ_{−d}` expressed in the swapped
/// basis `(j,k) → (k,j)`. Includes `d = 0`, which maps to itself.
pub fn verify_conjugate_blocks(dec: &BlockDecomposition) -> f64 {
    let n = dec.basis.dim();
    let swap = |idx: usize| (idx % n) * n + idx / n;
    let mut worst = 0.0f64;
    for block in dec.blocks.iter().filter(|b| b.d >= 0) {
        let Some(partner) = dec.block(-block.d) else {
            worst = f64::INFINITY;
            continue;
        };
        let position: BTreeMap<usize, usize> =
            partner.indices.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let map: Vec<usize> = block.indices.iter().map(|&i| position[&swap(i)]).collect();
        for c in 0..block.indices.len() {
            for r in 0..block.indices.len() {
                let dev = (block.matrix[(r, c)] - partner.matrix[(map[r], map[c])].conj()).norm();
                worst = worst.max(dev);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_basis, number_operator, Statistics};

    #[test]
    fn single_fermion_number_superoperator() {
        let b = build_basis(1, Statistics::Fermionic, 1).unwrap();
        assert_eq!(number_superoperator(&b).diagonal(), &[0.0, -1.0, 1.0, 0.0]);
    }

    #[test]
    fn two_fermion_multiplicities() {
        let b = build_basis(2, Statistics::Fermionic, 1).unwrap();
        let n = number_superoperator(&b);
        let count = |d: f64| n.diagonal().iter().filter(|&&x| x == d).count();
        assert_eq!([count(-2.0), count(-1.0), count(0.0), count(1.0), count(2.0)], [1, 4, 6, 4, 1]);
        let p = parity_superoperator(&b).matrix();
        assert_eq!(&p * &p, CMatrix::identity(16, 16));
    }

    #[test]
    fn fermionic_block_dimensions() {
        assert_eq!(block_dim_fermionic(2, 0).unwrap(), 6);
        assert_eq!(block_dim_fermionic(2, 1).unwrap(), 4);
        assert_eq!(block_dim_fermionic(2, -2).unwrap(), 1);
        assert_eq!(block_dim_fermionic(1, 0).unwrap(), 2);
        assert_eq!(block_dim_fermionic(3, 1).unwrap(), 15);
        assert!(block_dim_fermionic(2, 3).is_err());
    }

    #[test]
    fn hamiltonian_generator_is_block_diagonal() {
        let b = build_basis(2, Statistics::Fermionic, 1).unwrap();
        let h = &number_operator(&b) * 0.7;
        let l = Liouvillian::hamiltonian(&h);
        let dec = block_decompose(&l);
        assert_eq!(dec.offblock_norm(), 0.0);
        assert_eq!(verify_conjugate_blocks(&dec), 0.0);
        let n = number_superoperator(&b);
        assert_eq!(n.commutator_norm(&l).unwrap(), 0.0);
        assert_eq!(commutator_norm(&n.matrix(), &l).unwrap(), 0.0);
    }

    #[test]
    fn zero_generator_commutes() {
        let b = build_basis(2, Statistics::Bosonic, 2).unwrap();
        let l = Liouvillian::from_matrix(b.clone(), CMatrix::zeros(81, 81)).unwrap();
        assert_eq!(number_superoperator(&b).commutator_norm(&l).unwrap(), 0.0);
    }
}
