//! Sector-restricted domino Hamiltonians.
//!
//! Every allowed flip contributes one off-diagonal matrix element -h/2; the
//! diagonal is identically zero. Restricted to a closed sector the matrix is
//! real symmetric and, for the open staircase sector in BFS order,
//! tridiagonal.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::SectorBasis;
use crate::spin::{allowed_flips, Topology};
use crate::{Error, DEFAULT_DENSE_CAP};

/// The single coupling constant of the un-modulated chain, units of inverse
/// time (hbar = 1). Each allowed flip enters the matrix as -h/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    h: f64,
}

impl CouplingSpec {
    pub fn new(h: f64) -> Result<Self, Error> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidCoupling { h });
        }
        Ok(Self { h })
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Off-diagonal matrix element of one allowed flip.
    #[inline]
    pub fn element(&self) -> f64 {
        -0.5 * self.h
    }
}

/// Real symmetric sparse matrix of the flip rule restricted to a sector.
///
/// All off-diagonal entries equal -h/2, so only the connectivity is stored
/// (CSR over both triangles for fast matvec).
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    basis: SectorBasis,
    coupling: CouplingSpec,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
}

impl SectorHamiltonian {
    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn coupling(&self) -> CouplingSpec {
        self.coupling
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    /// Neighbor columns of row i.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Number of stored (off-diagonal) entries, both triangles.
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Upper-triangle entries (row, col, value) with row < col, row-major.
    pub fn upper_triangle(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let value = self.coupling.element();
        (0..self.dimension()).flat_map(move |i| {
            self.row(i)
                .iter()
                .filter(move |&&j| (j as usize) > i)
                .map(move |&j| (i, j as usize, value))
        })
    }

    /// y = H x for complex amplitudes.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        let value = self.coupling.element();
        for i in 0..self.dimension() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &j in self.row(i) {
                acc += x[j as usize];
            }
            y[i] = value * acc;
        }
    }

    /// Dense copy of the matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dimension();
        let value = self.coupling.element();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for &j in self.row(i) {
                m[(i, j as usize)] = value;
            }
        }
        m
    }

    /// True when every stored entry sits on the first off-diagonal.
    pub fn is_tridiagonal(&self) -> bool {
        (0..self.dimension())
            .all(|i| self.row(i).iter().all(|&j| (j as usize).abs_diff(i) == 1))
    }
}

/// Build the sector Hamiltonian from the flip rule.
pub fn build_sector_hamiltonian(
    basis: SectorBasis,
    coupling: CouplingSpec,
) -> Result<SectorHamiltonian, Error> {
    let topology: Topology = *basis.topology();
    let mut row_ptr = Vec::with_capacity(basis.dimension() + 1);
    let mut col_idx = Vec::new();
    row_ptr.push(0);
    for (i, state) in basis.states().iter().enumerate() {
        for site in allowed_flips(state, &topology)? {
            let target = state.flipped(site);
            let j = basis
                .index_of(&target)
                .ok_or(Error::ClosureViolation { state_index: i, site })?;
            col_idx.push(j as u32);
        }
        row_ptr.push(col_idx.len());
    }
    Ok(SectorHamiltonian { basis, coupling, row_ptr, col_idx })
}

/// Eigenvalues (ascending) and orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

/// Dense symmetric eigendecomposition, eigenvalues ascending.
pub fn dense_symmetric_eigen(matrix: DMatrix<f64>) -> Spectrum {
    let d = matrix.nrows();
    let eigen = nalgebra::SymmetricEigen::new(matrix);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eigen.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        eigenvectors.set_column(col, &eigen.eigenvectors.column(k));
    }
    Spectrum { eigenvalues, eigenvectors }
}

/// Full diagonalization of a sector Hamiltonian, with the default dense cap.
pub fn exact_spectrum(hamiltonian: &SectorHamiltonian) -> Result<Spectrum, Error> {
    exact_spectrum_with_cap(hamiltonian, DEFAULT_DENSE_CAP)
}

pub fn exact_spectrum_with_cap(
    hamiltonian: &SectorHamiltonian,
    cap: usize,
) -> Result<Spectrum, Error> {
    let d = hamiltonian.dimension();
    if d > cap {
        return Err(Error::DenseCapExceeded { dim: d, cap });
    }
    Ok(dense_symmetric_eigen(hamiltonian.to_dense()))
}

/// One offending matrix element found by the projection check.
#[derive(Debug, Clone, Copy)]
pub struct ProjectionMismatch {
    pub row_bits: u64,
    pub col_bits: u64,
    pub sector_value: f64,
    pub full_value: f64,
}

/// Result of comparing the sector matrix against the full-space oracle.
#[derive(Debug, Clone, Default)]
pub struct ProjectionReport {
    /// Entries where the projected full-space matrix disagrees with the
    /// sector matrix.
    pub mismatches: Vec<ProjectionMismatch>,
    /// Nonzero full-space elements between the sector and its complement.
    pub cross_couplings: Vec<(u64, u64)>,
}

impl ProjectionReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty() && self.cross_couplings.is_empty()
    }
}

/// Check the sector matrix against the independently built full 2^n matrix:
/// projected entries must agree entrywise and the sector must not couple to
/// its complement.
pub fn full_hamiltonian_projection_check(
    hamiltonian: &SectorHamiltonian,
) -> Result<ProjectionReport, Error> {
    let basis = hamiltonian.basis();
    let topology = *basis.topology();
    let full = crate::oracle::full_space_hamiltonian(&topology, hamiltonian.coupling())?;
    let mut report = ProjectionReport::default();
    let d = hamiltonian.dimension();
    let element = hamiltonian.coupling().element();

    // sector entries as a dense-per-row probe against the oracle
    for i in 0..d {
        let bits_i = basis.states()[i].bits();
        let mut oracle_cols: Vec<u64> = full.row_targets(bits_i).collect();
        oracle_cols.sort_unstable();
        let mut sector_cols: Vec<u64> =
            hamiltonian.row(i).iter().map(|&j| basis.states()[j as usize].bits()).collect();
        sector_cols.sort_unstable();
        for &c in &oracle_cols {
            let in_sector = basis.index_of(&crate::spin::SpinConfiguration::new(basis.n(), c)?);
            match in_sector {
                None => report.cross_couplings.push((bits_i, c)),
                Some(_) => {
                    if sector_cols.binary_search(&c).is_err() {
                        report.mismatches.push(ProjectionMismatch {
                            row_bits: bits_i,
                            col_bits: c,
                            sector_value: 0.0,
                            full_value: element,
                        });
                    }
                }
            }
        }
        for &c in &sector_cols {
            if oracle_cols.binary_search(&c).is_err() {
                report.mismatches.push(ProjectionMismatch {
                    row_bits: bits_i,
                    col_bits: c,
                    sector_value: element,
                    full_value: 0.0,
                });
            }
        }
    }
    Ok(report)
}
