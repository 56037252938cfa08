//! Classical spin configurations, chain topologies, and the domino flip rule.
//!
//! Conventions: sites are numbered 1..=n, site k is stored in bit k-1 of a
//! single machine word, and bit value 1 means spin-up. Chains of up to 63
//! spins fit one word; the large-N regime is handled semiclassically, not by
//! brute force.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::Error;

/// One classical basis state of an n-spin chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinConfiguration {
    n: u8,
    bits: u64,
}

impl SpinConfiguration {
    pub const MAX_SITES: usize = 63;

    pub fn new(n: usize, bits: u64) -> Result<Self, Error> {
        if n < 2 || n > Self::MAX_SITES {
            return Err(Error::InvalidTopology { n, reason: "need 2 <= n <= 63" });
        }
        if bits >> n != 0 {
            return Err(Error::InvalidConfiguration { n, bits });
        }
        Ok(Self { n: n as u8, bits })
    }

    pub fn all_down(n: usize) -> Result<Self, Error> {
        Self::new(n, 0)
    }

    pub fn all_up(n: usize) -> Result<Self, Error> {
        let n_checked = Self::new(n, 0)?.n as usize;
        Ok(Self { n: n_checked as u8, bits: (1u64 << n_checked) - 1 })
    }

    /// The amplification seed: site 1 up, all others down.
    pub fn single_up(n: usize) -> Result<Self, Error> {
        Self::new(n, 1)
    }

    /// Staircase configuration with the first k spins up.
    pub fn staircase(n: usize, k: usize) -> Result<Self, Error> {
        if k > n {
            return Err(Error::InvalidConfiguration { n, bits: u64::MAX });
        }
        let bits = if k == 0 { 0 } else { (1u64 << k) - 1 };
        Self::new(n, bits)
    }

    /// Parse a string of 'u'/'d' characters, site 1 leftmost.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let mut bits = 0u64;
        let mut n = 0usize;
        for (k, c) in s.chars().enumerate() {
            match c {
                'u' | 'U' => bits |= 1u64 << k,
                'd' | 'D' => {}
                _ => return Err(Error::InvalidConfiguration { n: s.len(), bits: u64::MAX }),
            }
            n += 1;
            if n > Self::MAX_SITES {
                return Err(Error::InvalidTopology { n, reason: "need 2 <= n <= 63" });
            }
        }
        Self::new(n, bits)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Is spin at site k (1-based) up?
    #[inline]
    pub fn is_up(&self, site: usize) -> bool {
        debug_assert!(site >= 1 && site <= self.n());
        (self.bits >> (site - 1)) & 1 == 1
    }

    /// +1 for spin-up, -1 for spin-down at site k.
    #[inline]
    pub fn sigma_z(&self, site: usize) -> f64 {
        if self.is_up(site) {
            1.0
        } else {
            -1.0
        }
    }

    /// Configuration with the spin at site k flipped.
    #[inline]
    pub fn flipped(&self, site: usize) -> Self {
        debug_assert!(site >= 1 && site <= self.n());
        Self { n: self.n, bits: self.bits ^ (1u64 << (site - 1)) }
    }

    pub fn up_count(&self) -> usize {
        self.bits.count_ones() as usize
    }
}

impl fmt::Display for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(self.n());
        for k in 1..=self.n() {
            s.push(if self.is_up(k) { 'u' } else { 'd' });
        }
        f.write_str(&s)
    }
}

/// Boundary treatment of the chain.
///
/// `RingBondOnly` keeps the open-chain rule (including any end terms) and
/// adds the bulk flip terms that arise from cyclic adjacency at sites 1 and
/// n. `RingFull` applies the bulk rule with cyclic neighbors at every site
/// and carries no end terms. The two closures are inequivalent: they reach
/// different sectors from the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    OpenChain,
    RingBondOnly,
    RingFull,
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopologyKind::OpenChain => "open",
            TopologyKind::RingBondOnly => "ring-bond",
            TopologyKind::RingFull => "ring-full",
        })
    }
}

/// Which ends of the chain carry a boundary flip term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct EndTerms {
    pub left: bool,
    pub right: bool,
}

impl EndTerms {
    pub const NONE: EndTerms = EndTerms { left: false, right: false };
    pub const LEFT: EndTerms = EndTerms { left: true, right: false };
    pub const RIGHT: EndTerms = EndTerms { left: false, right: true };
    pub const BOTH: EndTerms = EndTerms { left: true, right: true };
}

impl fmt::Display for EndTerms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match (self.left, self.right) {
            (false, false) => "none",
            (true, false) => "left",
            (false, true) => "right",
            (true, true) => "both",
        })
    }
}

/// Chain adjacency plus boundary treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Topology {
    n: u8,
    kind: TopologyKind,
    end_terms: EndTerms,
}

impl Topology {
    pub fn new(n: usize, kind: TopologyKind, end_terms: EndTerms) -> Result<Self, Error> {
        if n < 2 || n > SpinConfiguration::MAX_SITES {
            return Err(Error::InvalidTopology { n, reason: "need 2 <= n <= 63" });
        }
        if kind != TopologyKind::OpenChain && n < 3 {
            return Err(Error::InvalidTopology { n, reason: "ring closures need n >= 3" });
        }
        if kind == TopologyKind::RingFull && end_terms != EndTerms::NONE {
            return Err(Error::InvalidTopology {
                n,
                reason: "full ring closure uses the bulk rule everywhere; no end terms",
            });
        }
        Ok(Self { n: n as u8, kind, end_terms })
    }

    pub fn open(n: usize, end_terms: EndTerms) -> Result<Self, Error> {
        Self::new(n, TopologyKind::OpenChain, end_terms)
    }

    pub fn ring_bond_only(n: usize, end_terms: EndTerms) -> Result<Self, Error> {
        Self::new(n, TopologyKind::RingBondOnly, end_terms)
    }

    pub fn ring_full(n: usize) -> Result<Self, Error> {
        Self::new(n, TopologyKind::RingFull, EndTerms::NONE)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    #[inline]
    pub fn end_terms(&self) -> EndTerms {
        self.end_terms
    }

    fn is_ring(&self) -> bool {
        self.kind != TopologyKind::OpenChain
    }

    /// Number of bonds: n-1 for the open chain, n for either ring closure.
    pub fn bond_count(&self) -> usize {
        if self.is_ring() {
            self.n()
        } else {
            self.n() - 1
        }
    }

    /// Does the bulk flip rule see two (cyclic) neighbors at this site?
    #[inline]
    fn has_two_neighbors(&self, site: usize) -> bool {
        self.is_ring() || (site > 1 && site < self.n())
    }

    /// Cyclic or open neighbors of a site; for bulk-rule sites both exist.
    #[inline]
    fn bulk_neighbors(&self, site: usize) -> (usize, usize) {
        let n = self.n();
        let left = if site == 1 { n } else { site - 1 };
        let right = if site == n { 1 } else { site + 1 };
        (left, right)
    }

    fn check_size(&self, config: &SpinConfiguration) -> Result<(), Error> {
        if config.n() != self.n() {
            return Err(Error::SizeMismatch { config_n: config.n(), topology_n: self.n() });
        }
        Ok(())
    }
}

/// Number of antiparallel adjacent pairs under the topology's adjacency.
///
/// For ring closures the count is taken over all n bonds including (n,1),
/// and is always even.
pub fn wall_count(config: &SpinConfiguration, topology: &Topology) -> Result<usize, Error> {
    topology.check_size(config)?;
    let n = topology.n();
    let mut walls = 0;
    for site in 1..n {
        if config.is_up(site) != config.is_up(site + 1) {
            walls += 1;
        }
    }
    if topology.is_ring() && config.is_up(n) != config.is_up(1) {
        walls += 1;
    }
    Ok(walls)
}

/// Is a single-spin flip at `site` allowed by the domino rule?
///
/// Bulk rule: the site has two neighbors under the topology's adjacency and
/// they are antiparallel (the flip then moves a domain wall and conserves the
/// wall count). End-term rule: the site is an end of an open-adjacency chain
/// carrying an end term, and its unique inner neighbor is spin-up.
///
/// This predicate is the single definition of the model; both the sector
/// Hamiltonian and the full-space oracle are built from it.
pub fn flip_allowed(config: &SpinConfiguration, topology: &Topology, site: usize) -> bool {
    let n = topology.n();
    debug_assert!(site >= 1 && site <= n);
    if topology.has_two_neighbors(site) {
        let (l, r) = topology.bulk_neighbors(site);
        if config.is_up(l) != config.is_up(r) {
            return true;
        }
    }
    let ends = topology.end_terms();
    if site == 1 && ends.left && config.is_up(2) {
        return true;
    }
    if site == n && ends.right && config.is_up(n - 1) {
        return true;
    }
    false
}

/// All sites where the flip rule permits a single-spin flip, ascending.
pub fn allowed_flips(config: &SpinConfiguration, topology: &Topology) -> Result<Vec<usize>, Error> {
    topology.check_size(config)?;
    Ok((1..=topology.n()).filter(|&k| flip_allowed(config, topology, k)).collect())
}
