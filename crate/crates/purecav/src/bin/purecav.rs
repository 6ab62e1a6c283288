//! Thin command-line front end over the library's command layer.
//!
//! Every flag can also be supplied through a `PURECAV_*` environment
//! variable or a flat `key = value` config file (`--config`); explicit
//! flags win, then the environment, then the file, then defaults.
//!
//! Exit codes: 0 success, 1 verification/tolerance failure, 2 usage
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use purecav::harness::{
    cmd_fusion, cmd_resources, cmd_selftest, cmd_sweep, cmd_verify_appendix, ConfigMap,
    FusionRunConfig, LadderConfig, ResourceConfig, RestartFrom, SweepConfig,
};
use purecav::physlayer::LadderKind;
use purecav::purify::Scheme;
use purecav::{Error, Result};

#[derive(Parser)]
#[command(
    name = "purecav",
    version,
    about = "Cavity-chain entanglement pumping: sweeps, fusion blocks, effective-model \
             checks, and resource estimates"
)]
struct Cli {
    /// Flat `key = value` configuration file; flags and PURECAV_* variables override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the pumping maps over a fidelity grid and emit CSV.
    Sweep {
        /// Pumping scheme: `original` (two-pair) or `modified` (fused resource).
        #[arg(long)]
        scheme: Option<String>,
        /// Smallest channel fidelity on the grid (must exceed 0.5).
        #[arg(long)]
        f_min: Option<f64>,
        /// Largest channel fidelity on the grid (at most 1).
        #[arg(long)]
        f_max: Option<f64>,
        /// Grid spacing.
        #[arg(long)]
        f_step: Option<f64>,
        /// Rounds per grid point (with --init-chain, round 1 initializes).
        #[arg(long)]
        rounds: Option<u32>,
        /// Ring-gate index n of the underlying entangling gate.
        #[arg(long)]
        gate_index: Option<u32>,
        /// Start from |00⟩ via the initialization round and emit the coherence column.
        #[arg(long)]
        init_chain: bool,
        /// Seed recorded in the CSV header.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the CSV here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the fusion block and compare against its closed forms.
    Fusion {
        /// Effective two-atom/cavity coupling.
        #[arg(long)]
        j2: Option<f64>,
        /// Cavity decay rate.
        #[arg(long)]
        kappa: Option<f64>,
        /// Fidelity of the two rank-two input pairs.
        #[arg(long)]
        f: Option<f64>,
        /// Master-equation horizon (defaults to 20/kappa).
        #[arg(long)]
        t_final: Option<f64>,
    },
    /// Verify an effective model against its full Hamiltonian along a detuning ladder.
    VerifyAppendix {
        /// Which setup: `A`/`bus` (two driven atoms + decaying bus) or
        /// `C`/`ring` (three-atom dispersive ring).
        #[arg(long)]
        which: Option<String>,
        /// Comma-separated detuning multipliers, e.g. `1,2,4`.
        #[arg(long)]
        multipliers: Option<String>,
        /// Override the atom-cavity coupling g.
        #[arg(long)]
        g: Option<f64>,
        /// Override the drive amplitude Omega.
        #[arg(long)]
        omega: Option<f64>,
        /// Override the base detuning scaled by each multiplier.
        #[arg(long)]
        delta0: Option<f64>,
        /// Write the ladder table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate temporary-pair costs by restart recursion and Monte Carlo.
    Resources {
        /// Channel-pair fidelity feeding every round.
        #[arg(long)]
        f: Option<f64>,
        /// Total rounds of a successful run (round 1 is the initialization).
        #[arg(long)]
        rounds: Option<u32>,
        /// Monte Carlo trials (at least 100).
        #[arg(long)]
        trials: Option<u64>,
        /// Monte Carlo seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Failure policy: `init` (full restart) or `round1` (keep the initialized register).
        #[arg(long)]
        restart_from: Option<String>,
        /// Debug override: force every stage's success probability.
        #[arg(long)]
        force_probability: Option<f64>,
        /// Scale costs by the no-photon odds of the fusion step.
        #[arg(long)]
        with_fusion_cost: bool,
        /// Write the summary row as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in acceptance criteria and print one line per criterion.
    Selftest,
}

fn load_config(cli: &Cli) -> Result<ConfigMap> {
    match &cli.config {
        Some(path) => ConfigMap::load(path),
        None => Ok(ConfigMap::empty()),
    }
}

fn run(cli: Cli) -> Result<String> {
    let cfg = load_config(&cli)?;
    match cli.command {
        Command::Sweep {
            scheme,
            f_min,
            f_max,
            f_step,
            rounds,
            gate_index,
            init_chain,
            seed,
            out,
        } => {
            let scheme = Scheme::parse(&cfg.resolve("scheme", scheme, "modified".into())?)?;
            let sweep = SweepConfig {
                scheme,
                f_min: cfg.resolve("f-min", f_min, 0.55)?,
                f_max: cfg.resolve("f-max", f_max, 0.95)?,
                f_step: cfg.resolve("f-step", f_step, 0.05)?,
                rounds: cfg.resolve("rounds", rounds, 3)?,
                gate_index: cfg.resolve("gate-index", gate_index, 0)?,
                init_chain: cfg.resolve_flag("init-chain", init_chain)?,
                seed: cfg.resolve("seed", seed, 0)?,
            };
            let out = cfg.resolve_opt("out", out)?;
            cmd_sweep(&sweep, out.as_deref())
        }
        Command::Fusion { j2, kappa, f, t_final } => {
            let kappa = cfg.resolve("kappa", kappa, 1.0)?;
            let run = FusionRunConfig {
                j2: cfg.resolve("j2", j2, 2.0)?,
                kappa,
                f: cfg.resolve("f", f, 0.75)?,
                t_final: cfg
                    .resolve_opt("t-final", t_final)?
                    .unwrap_or(20.0 / kappa),
            };
            cmd_fusion(&run)
        }
        Command::VerifyAppendix { which, multipliers, g, omega, delta0, out } => {
            let kind = LadderKind::parse(&cfg.resolve("which", which, "A".into())?)?;
            let raw = cfg.resolve("multipliers", multipliers, "1,2,4".into())?;
            let mut mults = Vec::new();
            for part in raw.split(',').filter(|s| !s.trim().is_empty()) {
                mults.push(part.trim().parse::<f64>().map_err(|e| {
                    Error::Usage(format!("bad multiplier {part:?}: {e}"))
                })?);
            }
            let ladder = LadderConfig {
                kind,
                multipliers: mults,
                g: cfg.resolve_opt("g", g)?,
                omega: cfg.resolve_opt("omega", omega)?,
                delta0: cfg.resolve_opt("delta0", delta0)?,
            };
            let out = cfg.resolve_opt("out", out)?;
            cmd_verify_appendix(&ladder, out.as_deref())
        }
        Command::Resources {
            f,
            rounds,
            trials,
            seed,
            restart_from,
            force_probability,
            with_fusion_cost,
            out,
        } => {
            let restart =
                RestartFrom::parse(&cfg.resolve("restart-from", restart_from, "init".into())?)?;
            let res = ResourceConfig {
                f: cfg.resolve("f", f, 0.75)?,
                rounds: cfg.resolve("rounds", rounds, 4)?,
                trials: cfg.resolve("trials", trials, 100_000)?,
                seed: cfg.resolve("seed", seed, 12_345)?,
                restart_from: restart,
                force_probability: cfg.resolve_opt("force-probability", force_probability)?,
                with_fusion_cost: cfg.resolve_flag("with-fusion-cost", with_fusion_cost)?,
            };
            let out = cfg.resolve_opt("out", out)?;
            cmd_resources(&res, out.as_deref())
        }
        Command::Selftest => {
            let (report, all_passed) = cmd_selftest();
            if all_passed {
                Ok(report)
            } else {
                print!("{report}");
                Err(Error::Verification("self-test criteria failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
