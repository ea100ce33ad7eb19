//! Experiment configuration files (TOML) and their validation.
//!
//! The top level selects the experiment and the shared fields; each
//! experiment reads one section of the same name. Unknown fields are
//! rejected so typos surface as errors naming the offending field.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use milac::beamforming::Strategy;
use milac::linksim::{LinkConfig, SumRateStrategy, WeightRealization};

/// Reference admittance used when the config does not set one (1/50 ohm).
pub const DEFAULT_Y0: f64 = 0.02;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Optional; must match the subcommand when present.
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub y0: Option<f64>,
    pub link: Option<LinkSection>,
    pub sumrate: Option<SumrateSection>,
    pub ber: Option<BerSection>,
    pub complexity: Option<ComplexitySection>,
    #[serde(rename = "perf-vs-complexity")]
    pub perf_vs_complexity: Option<PerfVsComplexitySection>,
    #[serde(rename = "noisy-csi")]
    pub noisy_csi: Option<NoisyCsiSection>,
    pub quantized: Option<QuantizedSection>,
    #[serde(rename = "dft-check")]
    pub dft_check: Option<DftCheckSection>,
    #[serde(rename = "network-dump")]
    pub network_dump: Option<NetworkDumpSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub n_t: usize,
    pub n_r: usize,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub symbols_per_trial: Option<usize>,
    pub tx_power: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumrateSection {
    /// Entries of the form `<realization>:<strategy>`, e.g.
    /// `digital:rzfbf` or `milac-lmmse:mbf`.
    pub strategies: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerSection {
    /// Receivers among `mmse`, `zf`, `mf`; each runs on both the digital
    /// and the network path.
    pub receivers: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexitySection {
    /// Tasks among `zero-forcing`, `matched-filtering`, `dft`,
    /// `generic-lmmse`.
    pub tasks: Vec<String>,
    pub sizes: Vec<u64>,
    pub tau: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerfVsComplexitySection {
    /// `(n_r, n_t)` pairs with `n_r <= n_t`.
    pub dims: Vec<[usize; 2]>,
    pub tau: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoisyCsiSection {
    pub strategies: Vec<String>,
    pub rho_db: Vec<f64>,
    /// Also run the perfect-knowledge reference (default true).
    pub include_perfect: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizedSection {
    /// Bits per complex component (positive, even).
    pub bits: Vec<u32>,
    /// Also run the exact-component reference (default true).
    pub include_exact: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DftCheckSection {
    /// Power-of-two transform sizes.
    pub sizes: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDumpSection {
    /// `dft`, `tx` or `rx`.
    pub kind: String,
    /// Transform size for `dft`.
    pub size: Option<usize>,
    /// Channel dimensions for `tx`/`rx` (channel drawn from the seed).
    pub n_t: Option<usize>,
    pub n_r: Option<usize>,
    /// Strategy for `tx` (`rzfbf`/`zfbf`/`mbf`) or `rx` (`mmse`/`zf`/`mf`).
    pub strategy: Option<String>,
    pub lambda: Option<f64>,
}

/// A fully validated run plan.
#[derive(Debug)]
pub struct Plan {
    pub experiment: Experiment,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub y0: f64,
}

#[derive(Debug)]
pub enum Experiment {
    Sumrate {
        link: LinkConfig,
        strategies: Vec<SumRateStrategy>,
    },
    Ber {
        link: LinkConfig,
        receivers: Vec<Strategy>,
    },
    Complexity {
        tasks: Vec<milac::complexity::Task>,
        sizes: Vec<u64>,
        tau: u64,
    },
    PerfVsComplexity {
        dims: Vec<(usize, usize)>,
        snr_db: Vec<f64>,
        trials: usize,
        tx_power: f64,
        tau: u64,
    },
    NoisyCsi {
        link: LinkConfig,
        strategies: Vec<SumRateStrategy>,
        rho_db: Vec<Option<f64>>,
    },
    Quantized {
        link: LinkConfig,
        bits: Vec<Option<u32>>,
    },
    DftCheck {
        sizes: Vec<usize>,
    },
    NetworkDump {
        kind: DumpKind,
    },
}

#[derive(Debug)]
pub enum DumpKind {
    Dft { size: usize },
    Tx { n_t: usize, n_r: usize, strategy: Strategy, lambda: f64 },
    Rx { n_t: usize, n_r: usize, strategy: Strategy, lambda: f64 },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Sumrate { .. } => "sumrate",
            Experiment::Ber { .. } => "ber",
            Experiment::Complexity { .. } => "complexity",
            Experiment::PerfVsComplexity { .. } => "perf-vs-complexity",
            Experiment::NoisyCsi { .. } => "noisy-csi",
            Experiment::Quantized { .. } => "quantized",
            Experiment::DftCheck { .. } => "dft-check",
            Experiment::NetworkDump { .. } => "network-dump",
        }
    }
}

fn parse_tx_strategy(name: &str) -> Result<Strategy> {
    match name {
        "rzfbf" => Ok(Strategy::RZfbf),
        "zfbf" => Ok(Strategy::Zfbf),
        "mbf" => Ok(Strategy::Mbf),
        other => bail!("unknown transmit strategy {other:?} (expected rzfbf, zfbf or mbf)"),
    }
}

fn parse_rx_strategy(name: &str) -> Result<Strategy> {
    match name {
        "mmse" => Ok(Strategy::Mmse),
        "zf" => Ok(Strategy::Zf),
        "mf" => Ok(Strategy::Mf),
        other => bail!("unknown receiver {other:?} (expected mmse, zf or mf)"),
    }
}

fn parse_sumrate_strategy(entry: &str) -> Result<SumRateStrategy> {
    let (realization, strategy) = entry
        .split_once(':')
        .ok_or_else(|| anyhow!("strategy {entry:?} is not of the form <realization>:<strategy>"))?;
    let realization = match realization {
        "digital" => WeightRealization::Digital,
        "milac-arbitrary" => WeightRealization::MilacArbitrary,
        "milac-lmmse" => WeightRealization::MilacLmmse,
        other => bail!(
            "unknown realization {other:?} (expected digital, milac-arbitrary or milac-lmmse)"
        ),
    };
    Ok(SumRateStrategy::new(realization, parse_tx_strategy(strategy)?))
}

fn parse_task(name: &str) -> Result<milac::complexity::Task> {
    use milac::complexity::Task;
    match name {
        "zero-forcing" => Ok(Task::ZeroForcing),
        "matched-filtering" => Ok(Task::MatchedFiltering),
        "dft" => Ok(Task::Dft),
        "generic-lmmse" => Ok(Task::GenericLmmse),
        other => bail!(
            "unknown complexity task {other:?} (expected zero-forcing, matched-filtering, dft or generic-lmmse)"
        ),
    }
}

fn link_config(file: &FileConfig, seed: u64, experiment: &str) -> Result<LinkConfig> {
    let section = file
        .link
        .as_ref()
        .ok_or_else(|| anyhow!("{experiment} needs a [link] section"))?;
    Ok(LinkConfig {
        n_t: section.n_t,
        n_r: section.n_r,
        snr_db: section.snr_db.clone(),
        trials: section.trials,
        symbols_per_trial: section.symbols_per_trial.unwrap_or(1),
        seed,
        tx_power: section.tx_power.unwrap_or(1.0),
    })
}

/// Turn a parsed file into a validated plan for the named experiment.
pub fn build_plan(
    file: &FileConfig,
    experiment_name: &str,
    seed_override: Option<u64>,
    out_override: Option<PathBuf>,
) -> Result<Plan> {
    if let Some(declared) = &file.experiment {
        if declared != experiment_name {
            bail!(
                "config declares experiment {declared:?} but the {experiment_name:?} subcommand was invoked"
            );
        }
    }
    let seed = seed_override.or(file.seed).unwrap_or(0);
    let out_dir = out_override
        .or_else(|| file.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let y0 = file.y0.unwrap_or(DEFAULT_Y0);
    if !(y0.is_finite() && y0 > 0.0) {
        bail!("y0 must be finite and positive, got {y0}");
    }

    let experiment = match experiment_name {
        "sumrate" => {
            let section = file.sumrate.as_ref().ok_or_else(|| anyhow!("missing [sumrate] section"))?;
            let strategies: Vec<SumRateStrategy> = section
                .strategies
                .iter()
                .map(|s| parse_sumrate_strategy(s))
                .collect::<Result<_>>()
                .context("in sumrate.strategies")?;
            let link = link_config(file, seed, "sumrate")?;
            link.validate_tx().map_err(|e| anyhow!("[link]: {e}"))?;
            if strategies.is_empty() {
                bail!("sumrate.strategies must not be empty");
            }
            Experiment::Sumrate { link, strategies }
        }
        "ber" => {
            let section = file.ber.as_ref().ok_or_else(|| anyhow!("missing [ber] section"))?;
            let receivers: Vec<Strategy> = section
                .receivers
                .iter()
                .map(|s| parse_rx_strategy(s))
                .collect::<Result<_>>()
                .context("in ber.receivers")?;
            let link = link_config(file, seed, "ber")?;
            link.validate_rx().map_err(|e| anyhow!("[link]: {e}"))?;
            if receivers.is_empty() {
                bail!("ber.receivers must not be empty");
            }
            Experiment::Ber { link, receivers }
        }
        "complexity" => {
            let section = file
                .complexity
                .as_ref()
                .ok_or_else(|| anyhow!("missing [complexity] section"))?;
            let tasks: Vec<milac::complexity::Task> = section
                .tasks
                .iter()
                .map(|s| parse_task(s))
                .collect::<Result<_>>()
                .context("in complexity.tasks")?;
            if tasks.is_empty() || section.sizes.is_empty() {
                bail!("complexity.tasks and complexity.sizes must not be empty");
            }
            if section.sizes.iter().any(|&n| n == 0) {
                bail!("complexity.sizes entries must be positive");
            }
            if tasks.contains(&milac::complexity::Task::Dft)
                && section.sizes.iter().any(|n| !n.is_power_of_two())
            {
                bail!("the dft task needs power-of-two sizes");
            }
            if section.tau == 0 {
                bail!("complexity.tau must be at least 1");
            }
            Experiment::Complexity {
                tasks,
                sizes: section.sizes.clone(),
                tau: section.tau,
            }
        }
        "perf-vs-complexity" => {
            let section = file
                .perf_vs_complexity
                .as_ref()
                .ok_or_else(|| anyhow!("missing [perf-vs-complexity] section"))?;
            let link = link_config(file, seed, "perf-vs-complexity")?;
            if section.dims.is_empty() {
                bail!("perf-vs-complexity.dims must not be empty");
            }
            let mut dims = Vec::new();
            for &[n_r, n_t] in &section.dims {
                if n_r == 0 || n_t == 0 || n_r > n_t {
                    bail!("perf-vs-complexity.dims entry [{n_r}, {n_t}] needs 1 <= n_r <= n_t");
                }
                dims.push((n_r, n_t));
            }
            if link.trials == 0 {
                bail!("[link].trials must be at least 1");
            }
            if section.tau == 0 {
                bail!("perf-vs-complexity.tau must be at least 1");
            }
            Experiment::PerfVsComplexity {
                dims,
                snr_db: link.snr_db.clone(),
                trials: link.trials,
                tx_power: link.tx_power,
                tau: section.tau,
            }
        }
        "noisy-csi" => {
            let section = file
                .noisy_csi
                .as_ref()
                .ok_or_else(|| anyhow!("missing [noisy-csi] section"))?;
            let strategies: Vec<SumRateStrategy> = section
                .strategies
                .iter()
                .map(|s| parse_sumrate_strategy(s))
                .collect::<Result<_>>()
                .context("in noisy-csi.strategies")?;
            let link = link_config(file, seed, "noisy-csi")?;
            link.validate_tx().map_err(|e| anyhow!("[link]: {e}"))?;
            if strategies.is_empty() || section.rho_db.is_empty() {
                bail!("noisy-csi.strategies and noisy-csi.rho_db must not be empty");
            }
            let mut rho_db: Vec<Option<f64>> = Vec::new();
            if section.include_perfect.unwrap_or(true) {
                rho_db.push(None);
            }
            rho_db.extend(section.rho_db.iter().map(|&r| Some(r)));
            Experiment::NoisyCsi { link, strategies, rho_db }
        }
        "quantized" => {
            let section = file
                .quantized
                .as_ref()
                .ok_or_else(|| anyhow!("missing [quantized] section"))?;
            if section.bits.is_empty() {
                bail!("quantized.bits must not be empty");
            }
            for &b in &section.bits {
                if b == 0 || b % 2 != 0 || b / 2 > 8 {
                    bail!("quantized.bits entry {b} must be even, positive and at most 16");
                }
            }
            let link = link_config(file, seed, "quantized")?;
            link.validate_tx().map_err(|e| anyhow!("[link]: {e}"))?;
            let mut bits: Vec<Option<u32>> = Vec::new();
            if section.include_exact.unwrap_or(true) {
                bits.push(None);
            }
            bits.extend(section.bits.iter().map(|&b| Some(b)));
            Experiment::Quantized { link, bits }
        }
        "dft-check" => {
            let section = file
                .dft_check
                .as_ref()
                .ok_or_else(|| anyhow!("missing [dft-check] section"))?;
            if section.sizes.is_empty() {
                bail!("dft-check.sizes must not be empty");
            }
            for &n in &section.sizes {
                if n == 0 || !n.is_power_of_two() {
                    bail!("dft-check.sizes entry {n} must be a positive power of two");
                }
            }
            Experiment::DftCheck { sizes: section.sizes.clone() }
        }
        "network-dump" => {
            let section = file
                .network_dump
                .as_ref()
                .ok_or_else(|| anyhow!("missing [network-dump] section"))?;
            let kind = match section.kind.as_str() {
                "dft" => DumpKind::Dft {
                    size: section
                        .size
                        .filter(|&n| n > 0)
                        .ok_or_else(|| anyhow!("network-dump.size must be a positive integer"))?,
                },
                side @ ("tx" | "rx") => {
                    let n_t = section
                        .n_t
                        .filter(|&n| n > 0)
                        .ok_or_else(|| anyhow!("network-dump.n_t must be a positive integer"))?;
                    let n_r = section
                        .n_r
                        .filter(|&n| n > 0)
                        .ok_or_else(|| anyhow!("network-dump.n_r must be a positive integer"))?;
                    let name = section
                        .strategy
                        .as_deref()
                        .ok_or_else(|| anyhow!("network-dump.strategy is required for {side}"))?;
                    let lambda = section.lambda.unwrap_or(1.0);
                    if !(lambda.is_finite() && lambda > 0.0) {
                        bail!("network-dump.lambda must be finite and positive");
                    }
                    if side == "tx" {
                        if n_r > n_t {
                            bail!("tx dump needs n_r <= n_t");
                        }
                        DumpKind::Tx { n_t, n_r, strategy: parse_tx_strategy(name)?, lambda }
                    } else {
                        if n_r < n_t {
                            bail!("rx dump needs n_r >= n_t");
                        }
                        DumpKind::Rx { n_t, n_r, strategy: parse_rx_strategy(name)?, lambda }
                    }
                }
                other => bail!("unknown network-dump.kind {other:?} (expected dft, tx or rx)"),
            };
            Experiment::NetworkDump { kind }
        }
        other => bail!("unknown experiment {other:?}"),
    };

    Ok(Plan { experiment, seed, out_dir, y0 })
}
