//! The five subcommands and the file formats they emit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use domino_core::basis::{amplification_basis, enumerate_sector_with_cap, SectorBasis};
use domino_core::dynamics::{
    compare_topologies, evolve_with_options, make_amplification_state, time_grid, EvolveOptions,
    EvolutionResult, SectorState,
};
use domino_core::hamiltonian::{
    build_sector_hamiltonian, full_hamiltonian_projection_check, CouplingSpec, SectorHamiltonian,
};
use domino_core::oracle::{full_space_evolve, full_space_hamiltonian, full_space_reachability};
use domino_core::semiclassics::{convergence_report, EffectiveChain};
use domino_core::Error;

use crate::config::{FormatArg, RunConfig};

/// Failure classified by exit code: 1 config, 2 resource guard, 3 failed
/// verification.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Resource(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Resource(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Resource(m) | CliError::Verification(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SectorTooLarge { .. }
            | Error::DenseCapExceeded { .. }
            | Error::OracleSizeGuard { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<String> for CliError {
    fn from(m: String) -> Self {
        CliError::Config(m)
    }
}

/// 12 significant digits, scientific, locale-independent.
fn fmt(x: f64) -> String {
    format!("{:.11e}", x)
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn coupling(config: &RunConfig) -> Result<CouplingSpec, CliError> {
    Ok(CouplingSpec::new(config.h)?)
}

// --- sector ---------------------------------------------------------------

fn sector_listing(config: &RunConfig, basis: &SectorBasis) -> String {
    let mut out = format!(
        "n={} dim={} topology={} endterms={}\n",
        basis.n(),
        basis.dimension(),
        config.topology_name(),
        config.end_terms_name()
    );
    for state in basis.states() {
        let _ = writeln!(out, "{state}");
    }
    out
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SectorJson<'a> {
    n: usize,
    dim: usize,
    topology: &'a str,
    end_terms: &'a str,
    ordering_hash: String,
    states: Vec<String>,
}

pub fn run_sector(config: &RunConfig, matrix_out: Option<&PathBuf>) -> Result<(), CliError> {
    let topology = config.build_topology()?;
    let seed = config.seed_configuration()?;
    let basis = enumerate_sector_with_cap(seed, topology, config.cap)?;
    println!("dim={}", basis.dimension());
    if let Some(path) = &config.out {
        let contents = match config.format {
            FormatArg::Csv => sector_listing(config, &basis),
            FormatArg::Json => {
                let doc = SectorJson {
                    n: basis.n(),
                    dim: basis.dimension(),
                    topology: config.topology_name(),
                    end_terms: config.end_terms_name(),
                    ordering_hash: format!("{:016x}", basis.ordering_hash()),
                    states: basis.states().iter().map(|s| s.to_string()).collect(),
                };
                serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
            }
        };
        write_output(path, &contents)?;
    }
    if let Some(path) = matrix_out {
        let hamiltonian = build_sector_hamiltonian(basis, coupling(config)?)?;
        write_output(path, &matrix_coordinate_export(&hamiltonian))?;
    }
    Ok(())
}

/// Coordinate text format: header "D=<D> nnz=<count> h=<h>", then 1-indexed
/// "i j value" triples over the upper triangle.
pub fn matrix_coordinate_export(hamiltonian: &SectorHamiltonian) -> String {
    let mut out = format!(
        "D={} nnz={} h={}\n",
        hamiltonian.dimension(),
        hamiltonian.nnz(),
        fmt(hamiltonian.coupling().h())
    );
    for (i, j, value) in hamiltonian.upper_triangle() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, fmt(value));
    }
    out
}

// --- evolve ---------------------------------------------------------------

fn trajectory_csv(result: &EvolutionResult, n: usize) -> String {
    let mut out = String::from("t,M,F");
    for site in 1..=n {
        let _ = write!(out, ",p{site}");
    }
    out.push('\n');
    for (k, &t) in result.times.iter().enumerate() {
        let _ = write!(
            out,
            "{},{},{}",
            fmt(t),
            fmt(result.total_polarization[k]),
            fmt(result.ghz_fidelity[k])
        );
        for p in &result.profiles[k] {
            let _ = write!(out, ",{}", fmt(*p));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TrajectoryMetadata<'a> {
    topology: &'a str,
    end_terms: &'a str,
    h: f64,
    alpha: f64,
    beta: f64,
    #[serde(rename = "D")]
    dimension: usize,
    ordering_hash: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TrajectoryJson<'a> {
    metadata: TrajectoryMetadata<'a>,
    times: &'a [f64],
    total_polarization: &'a [f64],
    ghz_fidelity: &'a [f64],
    profiles: &'a [Vec<f64>],
}

pub fn run_evolve(config: &RunConfig) -> Result<(), CliError> {
    let topology = config.build_topology()?;
    let (alpha, beta) = config.normalized_amplitudes()?;
    let basis = amplification_basis(topology)?;
    let dimension = basis.dimension();
    let ordering_hash = format!("{:016x}", basis.ordering_hash());
    let psi0 =
        make_amplification_state(&basis, Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))?;
    let hamiltonian = build_sector_hamiltonian(basis, coupling(config)?)?;
    let grid = time_grid(config.tmax.unwrap_or(50.0), config.samples);
    let options = EvolveOptions {
        store_states: false,
        alpha: Complex64::new(alpha, 0.0),
        beta: Complex64::new(beta, 0.0),
        ..EvolveOptions::default()
    };
    let result = evolve_with_options(&hamiltonian, &psi0, &grid, options)?;
    let contents = match config.format {
        FormatArg::Csv => trajectory_csv(&result, config.n),
        FormatArg::Json => {
            let doc = TrajectoryJson {
                metadata: TrajectoryMetadata {
                    topology: config.topology_name(),
                    end_terms: config.end_terms_name(),
                    h: config.h,
                    alpha,
                    beta,
                    dimension,
                    ordering_hash,
                },
                times: &result.times,
                total_polarization: &result.total_polarization,
                ghz_fidelity: &result.ghz_fidelity,
                profiles: &result.profiles,
            };
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    };
    match &config.out {
        Some(path) => write_output(path, &contents)?,
        None => print!("{contents}"),
    }
    Ok(())
}

// --- compare --------------------------------------------------------------

pub fn run_compare(config: &RunConfig) -> Result<(), CliError> {
    if config.n_list.is_empty() {
        return Err(CliError::Config("--n-list must not be empty".into()));
    }
    let ends = config
        .end_terms
        .unwrap_or(crate::config::EndTermsArg::Right)
        .to_end_terms();
    let mut summary = String::from("n,max_delta_full,max_delta_bond\n");
    for &n in &config.n_list {
        // default horizon grows with the chain so the wall has time to cross
        let tmax = config.tmax.unwrap_or(10.0 * n as f64);
        let grid = time_grid(tmax, config.samples);
        let comparison = compare_topologies(n, coupling(config)?, ends, &grid)?;
        let _ = writeln!(
            summary,
            "{},{},{}",
            n,
            fmt(comparison.max_delta_full()),
            fmt(comparison.max_delta_bond())
        );
        if let Some(prefix) = &config.out {
            let mut table = String::from("t,M_open,M_ring_bond,M_ring_full,delta_full,delta_bond\n");
            for k in 0..grid.len() {
                let _ = writeln!(
                    table,
                    "{},{},{},{},{},{}",
                    fmt(comparison.times[k]),
                    fmt(comparison.m_open[k]),
                    fmt(comparison.m_ring_bond[k]),
                    fmt(comparison.m_ring_full[k]),
                    fmt(comparison.delta_full[k]),
                    fmt(comparison.delta_bond[k])
                );
            }
            let path = PathBuf::from(format!("{}_n{n}.csv", prefix.display()));
            write_output(&path, &table)?;
        }
    }
    match &config.out {
        Some(prefix) => {
            let path = PathBuf::from(format!("{}_summary.csv", prefix.display()));
            write_output(&path, &summary)?;
        }
        None => print!("{summary}"),
    }
    Ok(())
}

// --- semiclassical --------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ConvergenceJson {
    #[serde(rename = "D")]
    dimension: usize,
    max_eig_error: f64,
    mean_overlap_deficit: f64,
    flagged_levels: usize,
}

pub fn run_semiclassical(config: &RunConfig) -> Result<(), CliError> {
    if config.d_list.is_empty() {
        return Err(CliError::Config("--d-list must not be empty".into()));
    }
    let h = coupling(config)?.h();
    let rows = convergence_report(&config.d_list, |d| EffectiveChain::uniform(d, h))?;
    let contents = match config.format {
        FormatArg::Csv => {
            let mut out = String::from("D,max_eig_error,mean_overlap_deficit,flagged_levels\n");
            for row in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    row.dimension,
                    fmt(row.max_eigenvalue_error),
                    fmt(row.mean_overlap_deficit),
                    row.flagged_levels
                );
            }
            out
        }
        FormatArg::Json => {
            let doc: Vec<ConvergenceJson> = rows
                .iter()
                .map(|row| ConvergenceJson {
                    dimension: row.dimension,
                    max_eig_error: row.max_eigenvalue_error,
                    mean_overlap_deficit: row.mean_overlap_deficit,
                    flagged_levels: row.flagged_levels,
                })
                .collect();
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    };
    match &config.out {
        Some(path) => write_output(path, &contents)?,
        None => print!("{contents}"),
    }
    Ok(())
}

// --- verify ---------------------------------------------------------------

/// Sector pipeline against the brute-force full-space implementation:
/// entrywise matrix agreement, reachability equality, and propagated
/// amplitude agreement. Small n only; the oracle guard turns anything larger
/// into a resource refusal.
pub fn run_verify(config: &RunConfig) -> Result<(), CliError> {
    let topology = config.build_topology()?;
    let seed = config.seed_configuration()?;
    let basis = enumerate_sector_with_cap(seed, topology, config.cap)?;
    let hamiltonian = build_sector_hamiltonian(basis, coupling(config)?)?;

    let report = full_hamiltonian_projection_check(&hamiltonian)?;
    if !report.pass() {
        let located = report
            .mismatches
            .first()
            .map(|m| format!("matrix entry ({:#b}, {:#b})", m.row_bits, m.col_bits))
            .or_else(|| {
                report
                    .cross_couplings
                    .first()
                    .map(|(a, b)| format!("cross-coupling ({a:#b}, {b:#b})"))
            })
            .unwrap_or_default();
        println!("projection: FAIL");
        return Err(CliError::Verification(format!(
            "projection check failed, first discrepancy at {located}"
        )));
    }
    println!("projection: pass");

    let sector_set: std::collections::BTreeSet<u64> =
        hamiltonian.basis().states().iter().map(|s| s.bits()).collect();
    let oracle_set = full_space_reachability(&seed, &topology)?;
    if sector_set != oracle_set {
        let missing = oracle_set.symmetric_difference(&sector_set).next().copied();
        println!("reachability: FAIL");
        return Err(CliError::Verification(format!(
            "reachability mismatch, first differing configuration {:#b}",
            missing.unwrap_or(0)
        )));
    }
    println!("reachability: pass");

    let full = full_space_hamiltonian(&topology, hamiltonian.coupling())?;
    let mut full_psi0 = vec![Complex64::new(0.0, 0.0); 1usize << config.n];
    full_psi0[seed.bits() as usize] = Complex64::new(1.0, 0.0);
    let grid = time_grid(config.tmax.unwrap_or(20.0), 41);
    let full_run = full_space_evolve(&full, &full_psi0, &grid)?;
    let psi0 = SectorState::basis_state(hamiltonian.basis(), &seed)?;
    let options = EvolveOptions { store_states: true, ..EvolveOptions::default() };
    let sector_run = evolve_with_options(&hamiltonian, &psi0, &grid, options)?;
    let mut max_error = 0.0f64;
    for (k, state) in sector_run.states.as_ref().expect("states stored").iter().enumerate() {
        for (i, amplitude) in state.amplitudes().iter().enumerate() {
            let bits = hamiltonian.basis().states()[i].bits();
            let error = (amplitude - full_run.states[k][bits as usize]).norm();
            if error > max_error {
                max_error = error;
            }
            if error > 1e-9 {
                println!("dynamics: FAIL");
                return Err(CliError::Verification(format!(
                    "dynamics mismatch at t={}, configuration {:#b}, amplitude error {:e}",
                    grid[k], bits, error
                )));
            }
        }
    }
    println!("dynamics: pass (max amplitude error {:e})", max_error);
    Ok(())
}
