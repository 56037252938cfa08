//! Breadth-first enumeration of the invariant subspace reachable from a seed
//! configuration.
//!
//! Different boundary treatments route the same seed into sectors of very
//! different size: with seed site-1-up the open chain with a right end term
//! reaches the n staircase states, while the fully closed ring reaches all
//! n(n-1) single-block states.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::spin::{allowed_flips, SpinConfiguration, Topology};
use crate::{Error, DEFAULT_SECTOR_CAP};

/// Ordered basis of the configurations reachable from a seed.
///
/// States appear in breadth-first discovery order; within one BFS layer ties
/// are broken by ascending bit pattern, so the ordering (and hence every
/// matrix built on it) is reproducible.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    topology: Topology,
    seed: SpinConfiguration,
    states: Vec<SpinConfiguration>,
    index: BTreeMap<u64, u32>,
}

impl SectorBasis {
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn seed(&self) -> &SpinConfiguration {
        &self.seed
    }

    pub fn states(&self) -> &[SpinConfiguration] {
        &self.states
    }

    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    pub fn n(&self) -> usize {
        self.topology.n()
    }

    /// Position of a configuration in the basis, if present.
    pub fn index_of(&self, config: &SpinConfiguration) -> Option<usize> {
        self.index.get(&config.bits()).map(|&i| i as usize)
    }

    /// FNV-1a hash over the ordered bit patterns; identifies the basis
    /// ordering in exported metadata.
    pub fn ordering_hash(&self) -> u64 {
        let mut hash = 0xcbf29ce484222325u64;
        let mut mix = |byte: u8| {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        };
        mix(self.topology.n() as u8);
        for s in &self.states {
            for b in s.bits().to_le_bytes() {
                mix(b);
            }
        }
        hash
    }

    /// Append a dynamically isolated configuration to the basis.
    ///
    /// Used by the amplification runs to carry the all-down component: it has
    /// no allowed flips (when the left end term is absent), so adding it keeps
    /// the closure invariant. Adding a configuration that does have allowed
    /// flips is rejected.
    pub fn with_isolated(mut self, config: SpinConfiguration) -> Result<Self, Error> {
        if config.n() != self.topology.n() {
            return Err(Error::SizeMismatch { config_n: config.n(), topology_n: self.topology.n() });
        }
        if self.index.contains_key(&config.bits()) {
            return Ok(self);
        }
        if !allowed_flips(&config, &self.topology)?.is_empty() {
            return Err(Error::ClosureViolation { state_index: self.states.len(), site: 0 });
        }
        self.index.insert(config.bits(), self.states.len() as u32);
        self.states.push(config);
        Ok(self)
    }
}

/// Breadth-first closure of `{seed}` under the allowed flips, with the
/// default state cap.
pub fn enumerate_sector(seed: SpinConfiguration, topology: Topology) -> Result<SectorBasis, Error> {
    enumerate_sector_with_cap(seed, topology, DEFAULT_SECTOR_CAP)
}

/// Breadth-first closure with an explicit cap on the number of states.
pub fn enumerate_sector_with_cap(
    seed: SpinConfiguration,
    topology: Topology,
    cap: usize,
) -> Result<SectorBasis, Error> {
    if seed.n() != topology.n() {
        return Err(Error::SizeMismatch { config_n: seed.n(), topology_n: topology.n() });
    }
    let mut states = Vec::new();
    let mut index: BTreeMap<u64, u32> = BTreeMap::new();
    let mut frontier = alloc::vec![seed];
    index.insert(seed.bits(), 0);
    states.push(seed);
    while !frontier.is_empty() {
        let mut next: Vec<SpinConfiguration> = Vec::new();
        for state in &frontier {
            for site in allowed_flips(state, &topology)? {
                let neighbor = state.flipped(site);
                if !index.contains_key(&neighbor.bits()) {
                    // mark now so one layer never holds duplicates
                    index.insert(neighbor.bits(), u32::MAX);
                    next.push(neighbor);
                }
            }
        }
        next.sort_unstable_by_key(|c| c.bits());
        for state in &next {
            if states.len() >= cap {
                return Err(Error::SectorTooLarge { cap });
            }
            index.insert(state.bits(), states.len() as u32);
            states.push(*state);
        }
        frontier = next;
    }
    Ok(SectorBasis { topology, seed, states, index })
}

/// Sector dimensions for the single-flipped-spin seed across chain lengths.
pub fn sector_dimension_scan(
    make_topology: impl Fn(usize) -> Result<Topology, Error>,
    n_list: &[usize],
) -> Result<Vec<(usize, usize)>, Error> {
    n_list
        .iter()
        .map(|&n| {
            let topology = make_topology(n)?;
            let seed = SpinConfiguration::single_up(n)?;
            Ok((n, enumerate_sector(seed, topology)?.dimension()))
        })
        .collect()
}

/// Basis for amplification runs: BFS sector of the single-flipped-spin seed,
/// plus the isolated all-down configuration when it is not already reachable.
pub fn amplification_basis(topology: Topology) -> Result<SectorBasis, Error> {
    let seed = SpinConfiguration::single_up(topology.n())?;
    let basis = enumerate_sector(seed, topology)?;
    let all_down = SpinConfiguration::all_down(topology.n())?;
    if basis.index_of(&all_down).is_some() {
        Ok(basis)
    } else {
        basis.with_isolated(all_down)
    }
}
