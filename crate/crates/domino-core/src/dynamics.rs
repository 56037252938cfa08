//! Time evolution in a sector and the observables compared across boundary
//! conditions: per-site polarization, total polarization M(t), and the
//! fidelity of the GHZ amplification map.
//!
//! Small sectors are propagated spectrally (exact to roundoff); sectors above
//! the dense cap go through a Lanczos/Krylov propagator with a per-step error
//! tolerance of 1e-10.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::SectorBasis;
use crate::hamiltonian::{dense_symmetric_eigen, exact_spectrum_with_cap, SectorHamiltonian};
use crate::spin::{EndTerms, SpinConfiguration, Topology};
use crate::{Error, DEFAULT_DENSE_CAP};

const KRYLOV_DIM: usize = 30;
const KRYLOV_TOL: f64 = 1e-10;

/// Normalized amplitude vector over a sector basis.
#[derive(Debug, Clone)]
pub struct SectorState {
    amplitudes: Vec<Complex64>,
}

impl SectorState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, Error> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    /// Basis state concentrated on one configuration.
    pub fn basis_state(basis: &SectorBasis, config: &SpinConfiguration) -> Result<Self, Error> {
        let index = basis
            .index_of(config)
            .ok_or(Error::MissingConfiguration { what: "requested basis configuration" })?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dimension()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Input state of the amplification map: amplitude `alpha` on all-down and
/// `beta` on the single-flipped-spin seed.
pub fn make_amplification_state(
    basis: &SectorBasis,
    alpha: Complex64,
    beta: Complex64,
) -> Result<SectorState, Error> {
    let norm_sq = alpha.norm_sqr() + beta.norm_sqr();
    if (norm_sq - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm_sq });
    }
    let n = basis.n();
    let down_index = basis
        .index_of(&SpinConfiguration::all_down(n)?)
        .ok_or(Error::MissingConfiguration { what: "all-down" })?;
    let seed_index = basis
        .index_of(&SpinConfiguration::single_up(n)?)
        .ok_or(Error::MissingConfiguration { what: "single-flipped-spin seed" })?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dimension()];
    amplitudes[down_index] = alpha;
    amplitudes[seed_index] = beta;
    SectorState::new(amplitudes)
}

/// Per-site polarizations <sigma_z^k>, k = 1..=n.
pub fn polarization_profile(basis: &SectorBasis, state: &SectorState) -> Vec<f64> {
    let n = basis.n();
    let mut profile = vec![0.0f64; n];
    for (config, amplitude) in basis.states().iter().zip(state.amplitudes()) {
        let p = amplitude.norm_sqr();
        for (site, value) in profile.iter_mut().enumerate() {
            *value += p * config.sigma_z(site + 1);
        }
    }
    profile
}

/// Total polarization M = sum_k <sigma_z^k>.
pub fn total_polarization(basis: &SectorBasis, state: &SectorState) -> f64 {
    polarization_profile(basis, state).iter().sum()
}

/// Fidelity against the GHZ target alpha|down...> + beta|up...>.
///
/// The all-up overlap counts as zero when all-up lies outside the basis.
pub fn ghz_fidelity(
    basis: &SectorBasis,
    state: &SectorState,
    alpha: Complex64,
    beta: Complex64,
) -> f64 {
    let n = basis.n();
    let overlap_at = |config: Result<SpinConfiguration, Error>| -> Complex64 {
        config
            .ok()
            .and_then(|c| basis.index_of(&c))
            .map(|i| state.amplitudes()[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    };
    let down = overlap_at(SpinConfiguration::all_down(n));
    let up = overlap_at(SpinConfiguration::all_up(n));
    (alpha.conj() * down + beta.conj() * up).norm_sqr()
}

/// Knobs for `evolve`.
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Above this dimension the Krylov propagator is used.
    pub dense_cap: usize,
    /// Keep the full state vector at every sample (memory-heavy for large
    /// sectors; observables are always recorded).
    pub store_states: bool,
    /// GHZ target amplitudes for the fidelity track.
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dense_cap: DEFAULT_DENSE_CAP,
            store_states: true,
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }
}

/// Trajectory with derived observables on a shared time grid.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    /// Present unless `store_states` was off.
    pub states: Option<Vec<SectorState>>,
    pub profiles: Vec<Vec<f64>>,
    pub total_polarization: Vec<f64>,
    pub ghz_fidelity: Vec<f64>,
    /// Largest |norm - 1| observed before renormalization.
    pub norm_drift: f64,
    /// Largest |<H>(t) - <H>(0)| over the grid.
    pub energy_drift: f64,
}

/// Evenly spaced grid 0..=tmax with `samples` points.
pub fn time_grid(tmax: f64, samples: usize) -> Vec<f64> {
    assert!(samples >= 2 && tmax > 0.0);
    (0..samples).map(|i| tmax * i as f64 / (samples - 1) as f64).collect()
}

/// psi(t) = exp(-i H t) psi0 on the given grid.
pub fn evolve(
    hamiltonian: &SectorHamiltonian,
    psi0: &SectorState,
    times: &[f64],
) -> Result<EvolutionResult, Error> {
    evolve_with_options(hamiltonian, psi0, times, EvolveOptions::default())
}

pub fn evolve_with_options(
    hamiltonian: &SectorHamiltonian,
    psi0: &SectorState,
    times: &[f64],
    options: EvolveOptions,
) -> Result<EvolutionResult, Error> {
    if times.is_empty()
        || times[0] < 0.0
        || times.windows(2).any(|w| w[1] <= w[0])
        || times.iter().any(|t| !t.is_finite())
    {
        return Err(Error::InvalidTimeGrid);
    }
    let d = hamiltonian.dimension();
    assert_eq!(psi0.amplitudes().len(), d, "state and Hamiltonian dimensions differ");

    let mut result = EvolutionResult {
        times: times.to_vec(),
        states: options.store_states.then(Vec::new),
        profiles: Vec::with_capacity(times.len()),
        total_polarization: Vec::with_capacity(times.len()),
        ghz_fidelity: Vec::with_capacity(times.len()),
        norm_drift: 0.0,
        energy_drift: 0.0,
    };
    let mut energy_at_start = None;
    let mut record = |amplitudes: &[Complex64],
                      time: f64,
                      result: &mut EvolutionResult|
     -> Result<(), Error> {
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::PropagatorDiverged { time });
        }
        let state = SectorState { amplitudes: amplitudes.to_vec() };
        let energy = expectation_energy(hamiltonian, &state);
        let reference = *energy_at_start.get_or_insert(energy);
        result.energy_drift = result.energy_drift.max((energy - reference).abs());
        result.profiles.push(polarization_profile(hamiltonian.basis(), &state));
        result
            .total_polarization
            .push(result.profiles.last().expect("just pushed").iter().sum());
        result.ghz_fidelity.push(ghz_fidelity(
            hamiltonian.basis(),
            &state,
            options.alpha,
            options.beta,
        ));
        if let Some(states) = result.states.as_mut() {
            states.push(state);
        }
        Ok(())
    };

    if d <= options.dense_cap {
        // spectral propagation
        let spectrum = exact_spectrum_with_cap(hamiltonian, options.dense_cap)?;
        let coeff: Vec<Complex64> = (0..d)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..d {
                    acc += spectrum.eigenvectors[(i, k)] * psi0.amplitudes()[i];
                }
                acc
            })
            .collect();
        let mut psi = vec![Complex64::new(0.0, 0.0); d];
        for &t in times {
            if t == 0.0 {
                // identity at t = 0, bit-exactly
                psi.copy_from_slice(psi0.amplitudes());
                record(&psi, t, &mut result)?;
                continue;
            }
            let phased: Vec<Complex64> = (0..d)
                .map(|k| {
                    let angle = -spectrum.eigenvalues[k] * t;
                    coeff[k] * Complex64::new(libm::cos(angle), libm::sin(angle))
                })
                .collect();
            for (i, amplitude) in psi.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    acc += spectrum.eigenvectors[(i, k)] * phased[k];
                }
                *amplitude = acc;
            }
            let norm_sq: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
            result.norm_drift = result.norm_drift.max((libm::sqrt(norm_sq) - 1.0).abs());
            record(&psi, t, &mut result)?;
        }
    } else {
        let mut psi = psi0.amplitudes().to_vec();
        let mut now = 0.0f64;
        let max_degree = (0..d).map(|i| hamiltonian.row(i).len()).max().unwrap_or(1);
        let norm_bound = 0.5 * hamiltonian.coupling().h() * max_degree as f64;
        let mut stepper =
            KrylovPropagator::new(|x, y| hamiltonian.matvec(x, y), norm_bound);
        for &t in times {
            stepper.advance(&mut psi, t - now, &mut result.norm_drift)?;
            now = t;
            record(&psi, t, &mut result)?;
        }
    }
    Ok(result)
}

fn expectation_energy(hamiltonian: &SectorHamiltonian, state: &SectorState) -> f64 {
    let d = hamiltonian.dimension();
    let mut hx = vec![Complex64::new(0.0, 0.0); d];
    hamiltonian.matvec(state.amplitudes(), &mut hx);
    state
        .amplitudes()
        .iter()
        .zip(&hx)
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}

/// Lanczos short-time stepper for a Hermitian operator given as a matvec:
/// exp(-i H dt) applied through a small Krylov subspace, with the classical
/// beta * |last component| error estimate and step halving on failure.
pub struct KrylovPropagator<F: Fn(&[Complex64], &mut [Complex64])> {
    matvec: F,
    /// Safe step from an upper bound on ||H||.
    dt_max: f64,
}

impl<F: Fn(&[Complex64], &mut [Complex64])> KrylovPropagator<F> {
    pub fn new(matvec: F, norm_bound: f64) -> Self {
        Self { matvec, dt_max: 4.0 / norm_bound.max(1e-300) }
    }

    pub fn advance(
        &mut self,
        psi: &mut Vec<Complex64>,
        dt_total: f64,
        norm_drift: &mut f64,
    ) -> Result<(), Error> {
        let mut remaining = dt_total;
        while remaining > 1e-15 {
            let mut dt = remaining.min(self.dt_max);
            let mut halvings = 0;
            loop {
                match self.try_step(psi, dt) {
                    Ok(next) => {
                        let norm_sq: f64 = next.iter().map(|a| a.norm_sqr()).sum();
                        let norm = libm::sqrt(norm_sq);
                        *norm_drift = norm_drift.max((norm - 1.0).abs());
                        *psi = next;
                        if (norm - 1.0).abs() > 1e-14 {
                            let inv = 1.0 / norm;
                            for a in psi.iter_mut() {
                                *a *= inv;
                            }
                        }
                        break;
                    }
                    Err(StepError::TooLarge) => {
                        dt *= 0.5;
                        halvings += 1;
                        if halvings > 40 {
                            return Err(Error::PropagatorDiverged { time: remaining });
                        }
                    }
                }
            }
            remaining -= dt;
        }
        Ok(())
    }

    fn try_step(&self, psi: &[Complex64], dt: f64) -> Result<Vec<Complex64>, StepError> {
        let d = psi.len();
        let m_max = KRYLOV_DIM.min(d);
        let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(m_max);
        let mut alphas: Vec<f64> = Vec::with_capacity(m_max);
        let mut betas: Vec<f64> = Vec::with_capacity(m_max);

        let norm0 = libm::sqrt(psi.iter().map(|a| a.norm_sqr()).sum());
        let v0: Vec<Complex64> = psi.iter().map(|a| a / norm0).collect();
        vectors.push(v0);
        let mut happy = false;
        let mut w = vec![Complex64::new(0.0, 0.0); d];
        for j in 0..m_max {
            (self.matvec)(&vectors[j], &mut w);
            // Hermitian Lanczos: alpha real
            let alpha: f64 =
                vectors[j].iter().zip(&w).map(|(v, hv)| (v.conj() * hv).re).sum();
            alphas.push(alpha);
            for (wi, vi) in w.iter_mut().zip(&vectors[j]) {
                *wi -= alpha * vi;
            }
            if j > 0 {
                let beta_prev = betas[j - 1];
                for (wi, vi) in w.iter_mut().zip(&vectors[j - 1]) {
                    *wi -= beta_prev * vi;
                }
            }
            // full reorthogonalization keeps the small basis clean
            for v in &vectors {
                let overlap: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= overlap * vi;
                }
            }
            let beta = libm::sqrt(w.iter().map(|a| a.norm_sqr()).sum());
            if beta < 1e-13 || j + 1 == m_max {
                if beta < 1e-13 {
                    happy = true;
                }
                betas.push(beta);
                break;
            }
            betas.push(beta);
            vectors.push(w.iter().map(|a| a / beta).collect());
        }

        let m = alphas.len();
        let mut t_small = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            t_small[(j, j)] = alphas[j];
            if j + 1 < m {
                t_small[(j, j + 1)] = betas[j];
                t_small[(j + 1, j)] = betas[j];
            }
        }
        let spectrum = dense_symmetric_eigen(t_small);
        // y = Q exp(-i Lambda dt) Q^T e1
        let mut y = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..m {
            let angle = -spectrum.eigenvalues[k] * dt;
            let phase = Complex64::new(libm::cos(angle), libm::sin(angle));
            let q0k = spectrum.eigenvectors[(0, k)];
            for (j, yj) in y.iter_mut().enumerate() {
                *yj += spectrum.eigenvectors[(j, k)] * q0k * phase;
            }
        }
        if !happy {
            let residual = betas[m - 1] * y[m - 1].norm();
            if residual > KRYLOV_TOL {
                return Err(StepError::TooLarge);
            }
        }
        let mut next = vec![Complex64::new(0.0, 0.0); d];
        for (j, v) in vectors.iter().enumerate() {
            let weight = y[j] * norm0;
            for (ni, vi) in next.iter_mut().zip(v) {
                *ni += weight * vi;
            }
        }
        Ok(next)
    }
}

enum StepError {
    TooLarge,
}

/// Total polarizations of the three boundary treatments on a shared grid,
/// plus the normalized differences of the ring closures against the open
/// chain.
#[derive(Debug, Clone)]
pub struct TopologyComparison {
    pub n: usize,
    pub times: Vec<f64>,
    pub m_open: Vec<f64>,
    pub m_ring_bond: Vec<f64>,
    pub m_ring_full: Vec<f64>,
    /// |M_open - M_ringFull| / n per time.
    pub delta_full: Vec<f64>,
    /// |M_open - M_ringBond| / n per time.
    pub delta_bond: Vec<f64>,
}

impl TopologyComparison {
    pub fn max_delta_full(&self) -> f64 {
        self.delta_full.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn max_delta_bond(&self) -> f64 {
        self.delta_bond.iter().fold(0.0, |a, &b| a.max(b))
    }
}

/// Evolve the single-flipped-spin seed under each boundary treatment on its
/// own sector and compare the total polarizations.
pub fn compare_topologies(
    n: usize,
    coupling: crate::hamiltonian::CouplingSpec,
    end_terms: EndTerms,
    times: &[f64],
) -> Result<TopologyComparison, Error> {
    let run = |topology: Topology| -> Result<Vec<f64>, Error> {
        let seed = SpinConfiguration::single_up(n)?;
        let basis = crate::basis::enumerate_sector(seed, topology)?;
        let psi0 = SectorState::basis_state(&basis, &seed)?;
        let hamiltonian = crate::hamiltonian::build_sector_hamiltonian(basis, coupling)?;
        let options = EvolveOptions { store_states: false, ..EvolveOptions::default() };
        Ok(evolve_with_options(&hamiltonian, &psi0, times, options)?.total_polarization)
    };
    let m_open = run(Topology::open(n, end_terms)?)?;
    let m_ring_bond = run(Topology::ring_bond_only(n, end_terms)?)?;
    let m_ring_full = run(Topology::ring_full(n)?)?;
    let delta = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| (x - y).abs() / n as f64).collect()
    };
    Ok(TopologyComparison {
        n,
        times: times.to_vec(),
        delta_full: delta(&m_open, &m_ring_full),
        delta_bond: delta(&m_open, &m_ring_bond),
        m_open,
        m_ring_bond,
        m_ring_full,
    })
}
