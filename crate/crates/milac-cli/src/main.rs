//! Reproduction driver: runs the toolkit's experiments from TOML config
//! files and writes deterministic CSVs, a plot script and a run manifest.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 numerical trouble
//! (more than 1% of Monte-Carlo channel draws redrawn), 1 other errors.
//! The `MILAC_THREADS` environment variable caps worker parallelism.

mod artifacts;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use artifacts::{Manifest, OutputSet};
use config::{build_plan, DumpKind, Experiment, Plan};
use milac::beamforming::{
    combiner_digital, dft_matrix, dft_network, lmmse_inspired_network, BeamformerSpec,
    Normalization, Side,
};
use milac::complexity;
use milac::fft::fft_radix2;
use milac::linksim::{
    curves_to_csv, rayleigh_channel, run_ber, run_noisy_csi, run_perf_vs_complexity,
    run_quantized, run_sumrate, trial_rng,
};
use milac::network::MilacNetwork;
use milac::numerics::ComplexMatrix;

/// Fraction of redrawn channel draws above which a run is flagged as a
/// singularity storm.
const STORM_THRESHOLD: f64 = 0.01;

#[derive(Parser)]
#[command(
    name = "milac",
    version,
    about = "Circuit-level MiLAC beamforming experiments",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    experiment: ExperimentCmd,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Multi-user downlink sum-rate curves.
    Sumrate(RunArgs),
    /// Single-user uplink QPSK bit-error-rate curves.
    Ber(RunArgs),
    /// Analytic operation-count tables.
    Complexity(RunArgs),
    /// Sum rate against operation count over system sizes.
    #[command(name = "perf-vs-complexity")]
    PerfVsComplexity(RunArgs),
    /// Sum-rate curves under imperfect channel knowledge.
    #[command(name = "noisy-csi")]
    NoisyCsi(RunArgs),
    /// Sum-rate curves with discrete-valued admittance components.
    Quantized(RunArgs),
    /// DFT network verification against an FFT oracle.
    #[command(name = "dft-check")]
    DftCheck(RunArgs),
    /// Serialize a synthesized network to the text format.
    #[command(name = "network-dump")]
    NetworkDump(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parse and validate the configuration, run nothing.
    #[arg(long)]
    validate: bool,
}

impl ExperimentCmd {
    fn name(&self) -> &'static str {
        match self {
            ExperimentCmd::Sumrate(_) => "sumrate",
            ExperimentCmd::Ber(_) => "ber",
            ExperimentCmd::Complexity(_) => "complexity",
            ExperimentCmd::PerfVsComplexity(_) => "perf-vs-complexity",
            ExperimentCmd::NoisyCsi(_) => "noisy-csi",
            ExperimentCmd::Quantized(_) => "quantized",
            ExperimentCmd::DftCheck(_) => "dft-check",
            ExperimentCmd::NetworkDump(_) => "network-dump",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            ExperimentCmd::Sumrate(a)
            | ExperimentCmd::Ber(a)
            | ExperimentCmd::Complexity(a)
            | ExperimentCmd::PerfVsComplexity(a)
            | ExperimentCmd::NoisyCsi(a)
            | ExperimentCmd::Quantized(a)
            | ExperimentCmd::DftCheck(a)
            | ExperimentCmd::NetworkDump(a) => a,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    if let Err(e) = init_thread_pool() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }

    let name = cli.experiment.name();
    let args = cli.experiment.args();

    let raw = match std::fs::read(&args.config) {
        Ok(raw) => raw,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let plan = match parse_and_validate(&raw, name, args) {
        Ok(plan) => plan,
        Err(e) => {
            eprintln!("error: invalid configuration: {e:#}");
            return ExitCode::from(2);
        }
    };
    if args.validate {
        println!("configuration ok: {name} (seed {}, out {})", plan.seed, plan.out_dir.display());
        return ExitCode::SUCCESS;
    }

    match run(&plan, &raw) {
        Ok(RunOutcome { written, redraw_fraction }) => {
            for file in &written {
                println!("wrote {}", plan.out_dir.join(file).display());
            }
            if redraw_fraction > STORM_THRESHOLD {
                eprintln!(
                    "error: numerical trouble: {:.2}% of channel draws were redrawn",
                    redraw_fraction * 100.0
                );
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn init_thread_pool() -> Result<()> {
    if let Ok(value) = std::env::var("MILAC_THREADS") {
        let threads: usize = value
            .parse()
            .map_err(|_| anyhow!("MILAC_THREADS must be a positive integer, got {value:?}"))?;
        if threads == 0 {
            return Err(anyhow!("MILAC_THREADS must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("initializing the worker pool")?;
    }
    Ok(())
}

fn parse_and_validate(raw: &[u8], name: &str, args: &RunArgs) -> Result<Plan> {
    let text = std::str::from_utf8(raw).context("config is not valid UTF-8")?;
    let file: config::FileConfig = toml::from_str(text)?;
    build_plan(&file, name, args.seed, args.out.clone())
}

struct RunOutcome {
    written: Vec<String>,
    redraw_fraction: f64,
}

fn run(plan: &Plan, raw_config: &[u8]) -> Result<RunOutcome> {
    let mut outputs = OutputSet::new(&plan.out_dir);
    let mut redraws = None;
    let mut trials = None;
    let mut note = None;

    match &plan.experiment {
        Experiment::Sumrate { link, strategies } => {
            let run = run_sumrate(link, strategies, plan.y0)?;
            outputs.add("sumrate.csv", curves_to_csv(&run.points));
            outputs.add(
                "plot.py",
                artifacts::curve_plot_script("sumrate.csv", "sum rate [bits/s/Hz]", false),
            );
            redraws = Some(run.redraws);
            trials = Some(run.trials);
        }
        Experiment::Ber { link, receivers } => {
            let run = run_ber(link, receivers, plan.y0)?;
            outputs.add("ber.csv", curves_to_csv(&run.points));
            outputs.add("plot.py", artifacts::curve_plot_script("ber.csv", "bit error rate", true));
            redraws = Some(run.redraws);
            trials = Some(run.trials);
        }
        Experiment::Complexity { tasks, sizes, tau } => {
            let rows = complexity::sweep_square(tasks, sizes, *tau)?;
            outputs.add("complexity.csv", complexity::rows_to_csv(&rows));
            outputs.add("plot.py", artifacts::complexity_plot_script("complexity.csv"));
            note = Some(format!(
                "analog-computed transmit matrices additionally spend {} digital operations per block on the power normalization at the largest size",
                complexity::ratio_string(&complexity::normalization_note(
                    *sizes.last().unwrap(),
                    *sizes.last().unwrap()
                ))
            ));
        }
        Experiment::PerfVsComplexity { dims, snr_db, trials: n_trials, tx_power, tau } => {
            let (points, rows) =
                run_perf_vs_complexity(dims, snr_db, *n_trials, plan.seed, *tx_power, *tau, plan.y0)?;
            outputs.add("rates.csv", curves_to_csv(&points));
            outputs.add("complexity.csv", complexity::rows_to_csv(&rows));
            outputs.add("plot.py", artifacts::perf_vs_complexity_plot_script());
            trials = Some(*n_trials);
        }
        Experiment::NoisyCsi { link, strategies, rho_db } => {
            let run = run_noisy_csi(link, strategies, rho_db, plan.y0)?;
            outputs.add("noisy_csi.csv", curves_to_csv(&run.points));
            outputs.add(
                "plot.py",
                artifacts::curve_plot_script("noisy_csi.csv", "sum rate [bits/s/Hz]", false),
            );
            redraws = Some(run.redraws);
            trials = Some(run.trials);
        }
        Experiment::Quantized { link, bits } => {
            let run = run_quantized(link, bits, plan.y0)?;
            outputs.add("quantized.csv", curves_to_csv(&run.points));
            outputs.add(
                "plot.py",
                artifacts::curve_plot_script("quantized.csv", "sum rate [bits/s/Hz]", false),
            );
            redraws = Some(run.redraws);
            trials = Some(run.trials);
        }
        Experiment::DftCheck { sizes } => {
            outputs.add("dft_check.csv", dft_check_csv(sizes, plan.seed, plan.y0)?);
            outputs.add("plot.py", artifacts::dft_check_plot_script());
        }
        Experiment::NetworkDump { kind } => {
            let net = build_dump_network(kind, plan.seed, plan.y0)?;
            let text = net.to_text();
            let reparsed = MilacNetwork::from_text(&text)
                .map_err(|e| anyhow!("round-trip parse of the dumped network failed: {e}"))?;
            if reparsed != net {
                return Err(anyhow!("dumped network did not round-trip bit-exactly"));
            }
            note = Some(format!(
                "network: {} input ports, {} output ports; text format round-trips bit-exactly",
                net.n_in(),
                net.m_out()
            ));
            outputs.add("network.milac", text);
        }
    }

    let manifest = Manifest {
        experiment: plan.experiment.name().to_string(),
        seed: plan.seed,
        config_sha256: artifacts::sha256_hex(raw_config),
        library_version: milac::VERSION.to_string(),
        outputs: outputs.names(),
        redraws,
        trials,
        note,
    };
    let redraw_fraction = match (redraws, trials) {
        (Some(r), Some(t)) if r + t > 0 => r as f64 / (r + t) as f64,
        _ => 0.0,
    };
    let written = outputs.write_all(&manifest)?;
    Ok(RunOutcome { written, redraw_fraction })
}

fn dft_check_csv(sizes: &[usize], seed: u64, y0: f64) -> Result<String> {
    let mut csv = String::from("n_r,max_error,unitarity_error,parseval_error\n");
    for (i, &n) in sizes.iter().enumerate() {
        let mut rng = trial_rng(seed, i as u64);
        let y = rayleigh_channel(n, 1, &mut rng);
        let v = dft_network(n, y0)?.simulate_nodal(&y)?.v_out;

        let fft = fft_radix2(&y.column_entries(0))?;
        let oracle = ComplexMatrix::column(&fft).scale_re(1.0 / (n as f64).sqrt());
        let max_error = v.relative_distance(&oracle);

        let g = dft_matrix(n);
        let unitarity_error = g
            .hermitian()
            .mat_mul(&g)?
            .relative_distance(&ComplexMatrix::identity(n));
        let parseval_error =
            (v.frobenius_norm() - y.frobenius_norm()).abs() / y.frobenius_norm().max(1e-300);
        csv.push_str(&format!("{n},{max_error:e},{unitarity_error:e},{parseval_error:e}\n"));
    }
    Ok(csv)
}

fn build_dump_network(kind: &DumpKind, seed: u64, y0: f64) -> Result<MilacNetwork> {
    match kind {
        DumpKind::Dft { size } => Ok(dft_network(*size, y0)?),
        DumpKind::Tx { n_t, n_r, strategy, lambda } => {
            let mut rng = trial_rng(seed, 0);
            let h = rayleigh_channel(*n_r, *n_t, &mut rng);
            let spec = BeamformerSpec {
                strategy: *strategy,
                side: Side::Transmitter,
                lambda: *lambda,
                normalization: Normalization::FrobeniusGlobal,
                matrix: None,
            };
            Ok(lmmse_inspired_network(&spec, &h, y0)?)
        }
        DumpKind::Rx { n_t, n_r, strategy, lambda } => {
            let mut rng = trial_rng(seed, 0);
            let h = rayleigh_channel(*n_r, *n_t, &mut rng);
            // Dump the explicit combining network rather than the
            // estimator-computed one, exercising the arbitrary-synthesis
            // path end to end.
            let g = combiner_digital(*strategy, &h, *lambda)?;
            Ok(milac::beamforming::arbitrary_rx_network(&g, y0)?)
        }
    }
}
