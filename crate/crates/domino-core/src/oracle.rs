//! Brute-force reference implementation on the full 2^n Hilbert space.
//!
//! Shares only the single-site flip predicate with the sector path; matrix
//! indexing, reachability and propagation are implemented independently so
//! that bookkeeping bugs on either side show up as disagreements. Test-time
//! only; guarded to small n.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::hamiltonian::{dense_symmetric_eigen, CouplingSpec};
use crate::spin::{flip_allowed, SpinConfiguration, Topology};
use crate::Error;

/// Largest chain the oracle accepts for matrix construction / reachability.
pub const MAX_ORACLE_SITES: usize = 14;
/// Largest chain the oracle accepts for dense propagation.
pub const MAX_ORACLE_EVOLVE_SITES: usize = 12;

/// The flip-rule Hamiltonian on the unrestricted 2^n space, rows indexed
/// directly by configuration bits.
#[derive(Debug, Clone)]
pub struct FullSpaceHamiltonian {
    n: usize,
    coupling: CouplingSpec,
    topology: Topology,
}

impl FullSpaceHamiltonian {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        1usize << self.n
    }

    /// Bit patterns coupled to `bits` by one allowed flip.
    pub fn row_targets(&self, bits: u64) -> impl Iterator<Item = u64> + '_ {
        let config = SpinConfiguration::new(self.n, bits).expect("bits within range");
        (1..=self.n).filter_map(move |site| {
            flip_allowed(&config, &self.topology, site).then(|| bits ^ (1u64 << (site - 1)))
        })
    }

    /// Dense copy; entries are -h/2 on allowed-flip pairs, zero elsewhere.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dimension();
        let value = self.coupling.element();
        let mut m = DMatrix::zeros(d, d);
        for bits in 0..d as u64 {
            for target in self.row_targets(bits) {
                m[(bits as usize, target as usize)] = value;
            }
        }
        m
    }

    pub fn nnz(&self) -> usize {
        (0..self.dimension() as u64).map(|b| self.row_targets(b).count()).sum()
    }
}

pub fn full_space_hamiltonian(
    topology: &Topology,
    coupling: CouplingSpec,
) -> Result<FullSpaceHamiltonian, Error> {
    let n = topology.n();
    if n > MAX_ORACLE_SITES {
        return Err(Error::OracleSizeGuard { n, max: MAX_ORACLE_SITES });
    }
    Ok(FullSpaceHamiltonian { n, coupling, topology: *topology })
}

/// Breadth-first reachability over the nonzero connectivity of the full
/// matrix, starting from the seed.
pub fn full_space_reachability(
    seed: &SpinConfiguration,
    topology: &Topology,
) -> Result<BTreeSet<u64>, Error> {
    if seed.n() != topology.n() {
        return Err(Error::SizeMismatch { config_n: seed.n(), topology_n: topology.n() });
    }
    let full = full_space_hamiltonian(topology, CouplingSpec::new(1.0)?)?;
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut queue = vec![seed.bits()];
    seen.insert(seed.bits());
    while let Some(bits) = queue.pop() {
        for target in full.row_targets(bits) {
            if seen.insert(target) {
                queue.push(target);
            }
        }
    }
    Ok(seen)
}

/// Dense spectral trajectory on the full 2^n space.
#[derive(Debug, Clone)]
pub struct FullTrajectory {
    pub times: Vec<f64>,
    /// Amplitudes indexed by configuration bits, one vector per time.
    pub states: Vec<Vec<Complex64>>,
    /// Per-site polarizations, one row of n values per time.
    pub profiles: Vec<Vec<f64>>,
    pub total_polarization: Vec<f64>,
}

/// Propagate `psi0` (indexed by bits) under the full-space matrix.
pub fn full_space_evolve(
    full: &FullSpaceHamiltonian,
    psi0: &[Complex64],
    times: &[f64],
) -> Result<FullTrajectory, Error> {
    let n = full.n();
    if n > MAX_ORACLE_EVOLVE_SITES {
        return Err(Error::OracleSizeGuard { n, max: MAX_ORACLE_EVOLVE_SITES });
    }
    let d = full.dimension();
    assert_eq!(psi0.len(), d);
    let norm_sq: f64 = psi0.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm_sq });
    }
    let spectrum = dense_symmetric_eigen(full.to_dense());
    // coefficients in the eigenbasis
    let coeff: Vec<Complex64> = (0..d)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..d {
                acc += spectrum.eigenvectors[(i, k)] * psi0[i];
            }
            acc
        })
        .collect();
    let mut out = FullTrajectory {
        times: times.to_vec(),
        states: Vec::with_capacity(times.len()),
        profiles: Vec::with_capacity(times.len()),
        total_polarization: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let phased: Vec<Complex64> = (0..d)
            .map(|k| {
                let angle = -spectrum.eigenvalues[k] * t;
                coeff[k] * Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        let mut psi = vec![Complex64::new(0.0, 0.0); d];
        for (i, amplitude) in psi.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d {
                acc += spectrum.eigenvectors[(i, k)] * phased[k];
            }
            *amplitude = acc;
        }
        let mut profile = vec![0.0f64; n];
        for (bits, amplitude) in psi.iter().enumerate() {
            let p = amplitude.norm_sqr();
            for (site, value) in profile.iter_mut().enumerate() {
                if (bits >> site) & 1 == 1 {
                    *value += p;
                } else {
                    *value -= p;
                }
            }
        }
        out.total_polarization.push(profile.iter().sum());
        out.profiles.push(profile);
        out.states.push(psi);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::EndTerms;

    #[test]
    fn n2_open_no_end_terms_is_zero_matrix() {
        let t = Topology::open(2, EndTerms::NONE).unwrap();
        let full = full_space_hamiltonian(&t, CouplingSpec::new(1.0).unwrap()).unwrap();
        assert_eq!(full.nnz(), 0);
    }

    #[test]
    fn n3_open_bulk_only_entry_pairs() {
        // only site 2 can flip, and only when sites 1 and 3 are antiparallel:
        // 4 configurations qualify, each contributing one entry (entries come
        // in symmetric pairs, 4 stored in total)
        let t = Topology::open(3, EndTerms::NONE).unwrap();
        let full = full_space_hamiltonian(&t, CouplingSpec::new(1.0).unwrap()).unwrap();
        assert_eq!(full.nnz(), 4);
        let dense = full.to_dense();
        assert_eq!(dense, dense.transpose());
    }

    #[test]
    fn reachability_fixed_point_and_staircase() {
        let t = Topology::open(6, EndTerms::NONE).unwrap();
        let all_down = SpinConfiguration::all_down(6).unwrap();
        let r = full_space_reachability(&all_down, &t).unwrap();
        assert_eq!(r.len(), 1);

        let t = Topology::open(6, EndTerms::RIGHT).unwrap();
        let seed = SpinConfiguration::single_up(6).unwrap();
        let r = full_space_reachability(&seed, &t).unwrap();
        let staircase: BTreeSet<u64> =
            (1..=6).map(|k| SpinConfiguration::staircase(6, k).unwrap().bits()).collect();
        assert_eq!(r, staircase);

        let t = Topology::ring_full(6).unwrap();
        let r = full_space_reachability(&seed, &t).unwrap();
        assert_eq!(r.len(), 30);
    }

    #[test]
    fn size_guards() {
        let t = Topology::open(16, EndTerms::RIGHT).unwrap();
        assert!(matches!(
            full_space_hamiltonian(&t, CouplingSpec::new(1.0).unwrap()),
            Err(Error::OracleSizeGuard { n: 16, max: 14 })
        ));
    }

    #[test]
    fn evolve_identity_at_t_zero_and_unit_norm() {
        let t = Topology::open(4, EndTerms::RIGHT).unwrap();
        let full = full_space_hamiltonian(&t, CouplingSpec::new(1.0).unwrap()).unwrap();
        let mut psi0 = vec![Complex64::new(0.0, 0.0); 16];
        psi0[1] = Complex64::new(1.0, 0.0); // site 1 up
        let traj = full_space_evolve(&full, &psi0, &[0.0, 1.0, 5.0]).unwrap();
        for (i, a) in traj.states[0].iter().enumerate() {
            let expected = if i == 1 { 1.0 } else { 0.0 };
            assert!((a - Complex64::new(expected, 0.0)).norm() < 1e-12);
        }
        for psi in &traj.states {
            let norm_sq: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
            assert!((norm_sq - 1.0).abs() < 1e-10);
        }
    }
}
