//! Cross-checks of the sector path against the independent full-space
//! implementation.

use std::collections::BTreeSet;

use num_complex::Complex64;

use domino_core::basis::enumerate_sector;
use domino_core::dynamics::{evolve, time_grid, SectorState};
use domino_core::hamiltonian::{build_sector_hamiltonian, CouplingSpec};
use domino_core::oracle::{full_space_evolve, full_space_hamiltonian, full_space_reachability};
use domino_core::spin::{EndTerms, SpinConfiguration, Topology};

fn variants(n: usize) -> Vec<Topology> {
    vec![
        Topology::open(n, EndTerms::NONE).unwrap(),
        Topology::open(n, EndTerms::LEFT).unwrap(),
        Topology::open(n, EndTerms::RIGHT).unwrap(),
        Topology::open(n, EndTerms::BOTH).unwrap(),
        Topology::ring_bond_only(n, EndTerms::NONE).unwrap(),
        Topology::ring_bond_only(n, EndTerms::RIGHT).unwrap(),
        Topology::ring_full(n).unwrap(),
    ]
}

#[test]
fn sector_enumeration_matches_full_space_reachability() {
    for n in 4..=10 {
        let seed = SpinConfiguration::single_up(n).unwrap();
        for topology in variants(n) {
            let sector = enumerate_sector(seed, topology).unwrap();
            let sector_set: BTreeSet<u64> = sector.states().iter().map(|s| s.bits()).collect();
            let oracle_set = full_space_reachability(&seed, &topology).unwrap();
            assert_eq!(sector_set, oracle_set, "{topology:?}");
        }
    }
}

#[test]
fn full_space_matrix_never_couples_sector_to_complement() {
    let coupling = CouplingSpec::new(1.0).unwrap();
    for n in [6, 9, 12] {
        let seed = SpinConfiguration::single_up(n).unwrap();
        for topology in variants(n) {
            let sector = enumerate_sector(seed, topology).unwrap();
            let full = full_space_hamiltonian(&topology, coupling).unwrap();
            for bits in 0..(1u64 << n) {
                let inside = sector
                    .index_of(&SpinConfiguration::new(n, bits).unwrap())
                    .is_some();
                for target in full.row_targets(bits) {
                    let target_inside = sector
                        .index_of(&SpinConfiguration::new(n, target).unwrap())
                        .is_some();
                    assert_eq!(
                        inside, target_inside,
                        "{topology:?}: coupling {bits:#b} <-> {target:#b} crosses the sector"
                    );
                }
            }
        }
    }
}

#[test]
fn ring_bond_only_is_open_chain_plus_boundary_bond_terms() {
    let coupling = CouplingSpec::new(1.0).unwrap();
    for n in [4usize, 6, 8] {
        for ends in [EndTerms::NONE, EndTerms::RIGHT, EndTerms::BOTH] {
            let open = full_space_hamiltonian(&Topology::open(n, ends).unwrap(), coupling).unwrap();
            let ring =
                full_space_hamiltonian(&Topology::ring_bond_only(n, ends).unwrap(), coupling)
                    .unwrap();
            for bits in 0..(1u64 << n) {
                let open_targets: BTreeSet<u64> = open.row_targets(bits).collect();
                let ring_targets: BTreeSet<u64> = ring.row_targets(bits).collect();
                // deleting the terms that involve the (n,1) bond recovers the
                // open chain: the extra couplings flip only sites 1 or n
                assert!(open_targets.is_subset(&ring_targets));
                for extra in ring_targets.difference(&open_targets) {
                    let site_bit = bits ^ extra;
                    assert!(
                        site_bit == 1 || site_bit == 1 << (n - 1),
                        "n={n}: extra coupling flips interior site"
                    );
                }
            }
        }
    }
}

#[test]
fn sector_propagation_matches_projected_full_space_propagation() {
    let n = 8;
    let topology = Topology::open(n, EndTerms::RIGHT).unwrap();
    let seed = SpinConfiguration::single_up(n).unwrap();
    let basis = enumerate_sector(seed, topology).unwrap();
    let psi0 = SectorState::basis_state(&basis, &seed).unwrap();
    let hamiltonian =
        build_sector_hamiltonian(basis.clone(), CouplingSpec::new(1.0).unwrap()).unwrap();
    let grid = time_grid(40.0, 81);
    let sector_run = evolve(&hamiltonian, &psi0, &grid).unwrap();

    let full = full_space_hamiltonian(&topology, CouplingSpec::new(1.0).unwrap()).unwrap();
    let mut full_psi0 = vec![Complex64::new(0.0, 0.0); 1 << n];
    full_psi0[seed.bits() as usize] = Complex64::new(1.0, 0.0);
    let full_run = full_space_evolve(&full, &full_psi0, &grid).unwrap();

    for (k, state) in sector_run.states.as_ref().unwrap().iter().enumerate() {
        // amplitudes agree on the sector...
        for (i, config) in basis.states().iter().enumerate() {
            let diff = state.amplitudes()[i] - full_run.states[k][config.bits() as usize];
            assert!(diff.norm() <= 1e-9, "t={}: amplitude error {}", grid[k], diff.norm());
        }
        // ...and the complement never gets populated
        let complement: f64 = (0..(1u64 << n))
            .filter(|&b| basis.index_of(&SpinConfiguration::new(n, b).unwrap()).is_none())
            .map(|b| full_run.states[k][b as usize].norm_sqr())
            .sum();
        assert!(complement < 1e-18);
    }
}
