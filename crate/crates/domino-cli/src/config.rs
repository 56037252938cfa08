//! Run configuration: defaults, optional JSON config file, command-line
//! flags. Flags override the file, the file overrides defaults.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use domino_core::spin::{EndTerms, SpinConfiguration, Topology, TopologyKind};
use domino_core::DEFAULT_SECTOR_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyArg {
    Open,
    RingBond,
    RingFull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndTermsArg {
    None,
    Left,
    Right,
    Both,
}

impl EndTermsArg {
    pub fn to_end_terms(self) -> EndTerms {
        match self {
            EndTermsArg::None => EndTerms::NONE,
            EndTermsArg::Left => EndTerms::LEFT,
            EndTermsArg::Right => EndTerms::RIGHT,
            EndTermsArg::Both => EndTerms::BOTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Csv,
    Json,
}

/// Flags shared by every subcommand; each is optional so the config file can
/// fill the gaps.
#[derive(Debug, Clone, Args, Default)]
pub struct CommonFlags {
    /// Chain length (number of sites)
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated chain lengths for sweeps
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Boundary treatment
    #[arg(long, value_enum)]
    pub topology: Option<TopologyArg>,
    /// Which chain ends carry the single-neighbor flip term
    #[arg(long = "end-terms", value_enum)]
    pub end_terms: Option<EndTermsArg>,
    /// Coupling strength h > 0
    #[arg(long)]
    pub h: Option<f64>,
    /// Amplitude on the all-down component of the initial state
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Amplitude on the single-flipped-spin component of the initial state
    #[arg(long)]
    pub beta: Option<f64>,
    /// Seed configuration as a u/d string, site 1 leftmost
    #[arg(long)]
    pub seed: Option<String>,
    /// Final time of the evolution grid
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of grid points (including t=0)
    #[arg(long)]
    pub samples: Option<usize>,
    /// Comma-separated effective-chain dimensions for the convergence table
    #[arg(long = "d-list", value_delimiter = ',')]
    pub d_list: Option<Vec<usize>>,
    /// Output path (file, or prefix for multi-file subcommands)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// JSON config file supplying defaults for any missing flag
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sector enumeration cap (resource guard)
    #[arg(long)]
    pub cap: Option<usize>,
}

/// The same fields as the flags, read from a JSON file.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub topology: Option<TopologyArg>,
    pub end_terms: Option<EndTermsArg>,
    pub h: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub seed: Option<String>,
    pub tmax: Option<f64>,
    pub samples: Option<usize>,
    pub d_list: Option<Vec<usize>>,
    pub out: Option<PathBuf>,
    pub format: Option<FormatArg>,
    pub cap: Option<usize>,
}

/// Fully resolved configuration after applying precedence.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub n_list: Vec<usize>,
    pub topology: TopologyArg,
    /// As requested; `None` means "not specified", which matters for
    /// ring-full where end terms do not exist.
    pub end_terms: Option<EndTermsArg>,
    pub h: f64,
    pub alpha: f64,
    pub beta: f64,
    pub seed: Option<String>,
    /// `None` lets each subcommand pick its own default horizon.
    pub tmax: Option<f64>,
    pub samples: usize,
    pub d_list: Vec<usize>,
    pub out: Option<PathBuf>,
    pub format: FormatArg,
    pub cap: usize,
}

pub fn resolve(flags: &CommonFlags) -> Result<RunConfig, String> {
    let file: FileConfig = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("invalid config file {}: {e}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let config = RunConfig {
        n: flags.n.or(file.n).unwrap_or(8),
        n_list: flags.n_list.clone().or(file.n_list).unwrap_or_else(|| vec![8, 12, 16, 20]),
        topology: flags.topology.or(file.topology).unwrap_or(TopologyArg::Open),
        end_terms: flags.end_terms.or(file.end_terms),
        h: flags.h.or(file.h).unwrap_or(1.0),
        alpha: flags.alpha.or(file.alpha).unwrap_or(0.0),
        beta: flags.beta.or(file.beta).unwrap_or(1.0),
        seed: flags.seed.clone().or(file.seed),
        tmax: flags.tmax.or(file.tmax),
        samples: flags.samples.or(file.samples).unwrap_or(201),
        d_list: flags.d_list.clone().or(file.d_list).unwrap_or_else(|| vec![50, 100, 200]),
        out: flags.out.clone().or(file.out),
        format: flags.format.or(file.format).unwrap_or(FormatArg::Csv),
        cap: flags.cap.or(file.cap).unwrap_or(DEFAULT_SECTOR_CAP),
    };
    if config.samples < 2 {
        return Err("--samples must be at least 2".into());
    }
    if let Some(tmax) = config.tmax {
        if !(tmax > 0.0 && tmax.is_finite()) {
            return Err("--tmax must be positive and finite".into());
        }
    }
    Ok(config)
}

impl RunConfig {
    pub fn build_topology(&self) -> Result<Topology, domino_core::Error> {
        match self.topology {
            TopologyArg::Open => {
                Topology::open(self.n, self.end_terms.unwrap_or(EndTermsArg::Right).to_end_terms())
            }
            TopologyArg::RingBond => Topology::ring_bond_only(
                self.n,
                self.end_terms.unwrap_or(EndTermsArg::Right).to_end_terms(),
            ),
            TopologyArg::RingFull => Topology::new(
                self.n,
                TopologyKind::RingFull,
                // end terms do not exist on the full ring; only reject an
                // explicit request for them
                self.end_terms.unwrap_or(EndTermsArg::None).to_end_terms(),
            ),
        }
    }

    pub fn seed_configuration(&self) -> Result<SpinConfiguration, String> {
        match &self.seed {
            Some(s) => {
                let config = SpinConfiguration::parse(s).map_err(|e| e.to_string())?;
                if config.n() != self.n {
                    return Err(format!(
                        "seed has {} sites but --n is {}",
                        config.n(),
                        self.n
                    ));
                }
                Ok(config)
            }
            None => SpinConfiguration::single_up(self.n).map_err(|e| e.to_string()),
        }
    }

    /// Normalized (alpha, beta); warns on stderr when renormalization moved
    /// the amplitudes by more than the tolerance.
    pub fn normalized_amplitudes(&self) -> Result<(f64, f64), String> {
        let norm_sq = self.alpha * self.alpha + self.beta * self.beta;
        if !(norm_sq > 0.0 && norm_sq.is_finite()) {
            return Err("alpha and beta must not both be zero".into());
        }
        if (norm_sq - 1.0).abs() > 1e-9 {
            eprintln!("warning: renormalizing (alpha, beta), |alpha|^2 + |beta|^2 = {norm_sq}");
        }
        let norm = norm_sq.sqrt();
        Ok((self.alpha / norm, self.beta / norm))
    }

    pub fn topology_name(&self) -> &'static str {
        match self.topology {
            TopologyArg::Open => "open",
            TopologyArg::RingBond => "ring-bond",
            TopologyArg::RingFull => "ring-full",
        }
    }

    pub fn end_terms_name(&self) -> &'static str {
        let ends = match self.topology {
            TopologyArg::RingFull => return "none",
            _ => self.end_terms.unwrap_or(EndTermsArg::Right),
        };
        match ends {
            EndTermsArg::None => "none",
            EndTermsArg::Left => "left",
            EndTermsArg::Right => "right",
            EndTermsArg::Both => "both",
        }
    }
}
