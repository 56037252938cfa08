use core::fmt;

/// Errors reported by the sector, Hamiltonian, dynamics and semiclassics code.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Chain length outside the supported range, or inconsistent with the
    /// topology (ring closures need n >= 3, a ring with full cyclic rule
    /// carries no end terms).
    InvalidTopology { n: usize, reason: &'static str },
    /// Bit pattern has set bits at or beyond position n.
    InvalidConfiguration { n: usize, bits: u64 },
    /// Configuration and topology disagree on the number of spins.
    SizeMismatch { config_n: usize, topology_n: usize },
    /// Breadth-first enumeration exceeded the state cap.
    SectorTooLarge { cap: usize },
    /// Matrix dimension exceeds the dense-diagonalization cap; use the
    /// Krylov propagator or the semiclassical solver instead.
    DenseCapExceeded { dim: usize, cap: usize },
    /// A flip led out of the basis: the closure invariant is broken.
    ClosureViolation { state_index: usize, site: usize },
    /// Coupling amplitude must be positive and finite.
    InvalidCoupling { h: f64 },
    /// A configuration required by the operation is not in the basis.
    MissingConfiguration { what: &'static str },
    /// Input amplitudes are not normalized.
    NotNormalized { norm_sq: f64 },
    /// Propagator produced non-finite amplitudes.
    PropagatorDiverged { time: f64 },
    /// Matrix is not tridiagonal in its stored ordering; the semiclassical
    /// solver applies to linear-scaling sectors only.
    NotTridiagonal { row: usize, col: usize },
    /// Effective chain too short for quantization.
    ChainTooShort { dim: usize },
    /// Full-space oracle refused a chain length (guard, not a limitation of
    /// the sector code).
    OracleSizeGuard { n: usize, max: usize },
    /// Malformed time grid (not ascending or starting below zero).
    InvalidTimeGrid,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidTopology { n, reason } => {
                write!(f, "invalid topology for n={n}: {reason}")
            }
            Error::InvalidConfiguration { n, bits } => {
                write!(f, "bit pattern {bits:#x} has bits beyond site {n}")
            }
            Error::SizeMismatch { config_n, topology_n } => write!(
                f,
                "configuration has {config_n} spins but topology expects {topology_n}"
            ),
            Error::SectorTooLarge { cap } => {
                write!(f, "sector exceeds the enumeration cap of {cap} states")
            }
            Error::DenseCapExceeded { dim, cap } => write!(
                f,
                "dimension {dim} exceeds dense cap {cap}; use the Krylov propagator or semiclassics"
            ),
            Error::ClosureViolation { state_index, site } => write!(
                f,
                "flip at site {site} of state {state_index} leaves the basis (closure violated)"
            ),
            Error::InvalidCoupling { h } => write!(f, "coupling h={h} must be positive and finite"),
            Error::MissingConfiguration { what } => {
                write!(f, "required configuration not in basis: {what}")
            }
            Error::NotNormalized { norm_sq } => {
                write!(f, "state not normalized: |psi|^2 = {norm_sq}")
            }
            Error::PropagatorDiverged { time } => {
                write!(f, "propagator produced non-finite amplitudes at t={time}")
            }
            Error::NotTridiagonal { row, col } => write!(
                f,
                "matrix entry ({row},{col}) breaks tridiagonal structure; \
                 semiclassics applies to linear-scaling sectors only"
            ),
            Error::ChainTooShort { dim } => {
                write!(f, "effective chain of dimension {dim} too short (need >= 4)")
            }
            Error::OracleSizeGuard { n, max } => {
                write!(f, "full-space oracle limited to n <= {max}, got n={n}")
            }
            Error::InvalidTimeGrid => write!(f, "time grid must be ascending and start at t >= 0"),
        }
    }
}

impl core::error::Error for Error {}
