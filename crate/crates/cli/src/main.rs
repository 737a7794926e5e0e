use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use trust_shaping::lp_design::{build_lp, verify_loss_constraint};
use trust_shaping::sar::{build_sar_game, ThreatMode};
use trust_shaping_cli::config::{self, parse_epsilons, ExperimentConfig, GridConfig};
use trust_shaping_cli::output::{to_json_bytes, write_file, Metadata};
use trust_shaping_cli::simulate::{rollouts_jsonl, run_simulate, PolicyChoice};
use trust_shaping_cli::sweep::{run_sweep, sweep_csv};
use trust_shaping_cli::verify::run_verify;
use trust_shaping_cli::{design_potential, parse_config};

/// Trust-aware reward shaping experiments on the search-and-rescue game.
///
/// Defaults for every config key are printed by `config-schema`.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON config file; unknown keys are rejected. An empty file means all defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte-Carlo seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated loss budgets [default: 0,30,100,300]
    #[arg(long, global = true)]
    epsilon: Option<String>,
    /// Initial-trust grid as a_min,a_max,b_min,b_max,step [default: 1,11,1,11,0.25]
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Threat probability given d_r [default: plugin]
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Monte-Carlo rollouts per estimate [default: 200000]
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Only report errors and failed certificates
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Mode {
    Plugin,
    Bayes,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the original and shaped games at every grid state; writes sweep.csv
    Sweep,
    /// Run every certificate; writes verify.json and exits 1 if any fails
    Verify,
    /// Roll out a policy; writes rollouts.jsonl
    Simulate {
        #[arg(long, value_enum, default_value = "shaped-optimal")]
        policy: PolicyChoice,
    },
    /// Print the designed potential for each budget
    Lp,
    /// Print config defaults with a description of every key
    ConfigSchema,
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => parse_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &common.out {
        config.out_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(eps) = &common.epsilon {
        config.epsilons = parse_epsilons(eps)?;
    }
    if let Some(grid) = &common.grid {
        config.grid = GridConfig::parse(grid)?;
    }
    if let Some(mode) = common.mode {
        config.sar.threat_mode = match mode {
            Mode::Plugin => ThreatMode::Plugin,
            Mode::Bayes => ThreatMode::Bayes,
        };
    }
    if let Some(samples) = common.samples {
        config.samples = samples;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<bool> {
    let quiet = cli.common.quiet;
    if let Command::ConfigSchema = cli.command {
        println!("{}", serde_json::to_string_pretty(&config::config_schema())?);
        return Ok(true);
    }
    let config = load(&cli.common)?;
    match cli.command {
        Command::Sweep => {
            let sweep = run_sweep(&config)?;
            let path = write_file(&config.out_dir, "sweep.csv", &sweep_csv(&sweep)?)?;
            write_file(&config.out_dir, "sweep_summary.json", &to_json_bytes(&sweep.summary))?;
            if !quiet {
                for e in &sweep.summary.epsilons {
                    println!(
                        "epsilon {:>8}: action-0 fraction {:.4}, max loss {:.6}",
                        e.epsilon, e.action_zero_fraction, e.max_loss
                    );
                }
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Verify => {
            let report = run_verify(&config)?;
            let path = write_file(&config.out_dir, "verify.json", &to_json_bytes(&report))?;
            for e in &report.epsilons {
                if !quiet || !e.passed {
                    println!("epsilon {:>8}: {}", e.epsilon, if e.passed { "pass" } else { "FAIL" });
                }
            }
            if !quiet {
                println!("wrote {}", path.display());
            }
            Ok(report.passed)
        }
        Command::Simulate { policy } => {
            let sim = run_simulate(&config, policy)?;
            let path = write_file(&config.out_dir, "rollouts.jsonl", &rollouts_jsonl(&sim)?)?;
            if !quiet {
                let s = &sim.summary;
                println!(
                    "task reward {:.4} +- {:.4}, final expected trust {:.5} +- {:.5}",
                    s.task_reward.mean,
                    s.task_reward.std_error,
                    s.final_expected_trust.mean,
                    s.final_expected_trust.std_error
                );
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Lp => {
            let sar = &config.sar;
            let line = build_sar_game(sar)?.final_line();
            let rows: Vec<serde_json::Value> = config
                .epsilons
                .iter()
                .map(|&eps| {
                    let lp = build_lp(sar.trust_gains, sar.gamma, sar.horizon, eps);
                    let phi = design_potential(&config, eps);
                    serde_json::json!({
                        "epsilon": eps,
                        "bound": lp.bound(),
                        "potential": phi,
                        "objective": lp.objective(phi.a, phi.b),
                        "loss_constraint": verify_loss_constraint(&phi, &line, sar.gamma, sar.horizon, eps),
                    })
                })
                .collect();
            let report = serde_json::json!({ "metadata": Metadata::new(&config, "lp"), "potentials": rows });
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(rows.iter().all(|r| r["loss_constraint"]["satisfied"] == true))
        }
        Command::ConfigSchema => unreachable!(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
