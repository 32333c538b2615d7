use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use viscous_shock::checks::{invariant_suite, profile_report};
use viscous_shock::study::{
    emit_report, refinement_study, simulate, sweep_delta, sweep_epsilon, StudyReport,
};
use viscous_shock::{load_config, StudyConfig};

/// Viscous shock profiles, weighted relative-entropy ledgers and
/// vanishing-viscosity studies.
#[derive(Parser)]
#[command(name = "vshock", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Study configuration (.toml or .json).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `output_dir` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; overrides `jobs` from the config.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Print nothing but errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Solve the traveling-wave profile and write it as CSV.
    Profile,
    /// Evolve the configured initial data and write a snapshot and ledger.
    Simulate,
    /// Vanishing-viscosity sweep with Riemann data.
    SweepEps,
    /// Profile diagnostics across shock strengths.
    SweepDelta,
    /// Grid refinement of the weighted entropy identity.
    Refine,
    /// Run the invariant suite.
    Verify,
}

fn load(cli: &Cli) -> anyhow::Result<StudyConfig> {
    let path = cli.config.as_ref().context("--config <path> is required")?;
    let mut cfg = load_config(path)?;
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = load(cli)?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut extra: Vec<PathBuf> = Vec::new();
    let report: StudyReport = match cli.command {
        Command::Profile => {
            let (rep, p) = profile_report(&cfg)?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let path = out.join(format!("profile-{}.csv", rep.config_hash));
            p.write_csv(&path)?;
            extra.push(path);
            rep
        }
        Command::Simulate => {
            let (rep, run) = simulate(&cfg)?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let path = out.join(format!("simulate-{}-snapshot.csv", rep.config_hash));
            std::fs::write(&path, run.final_field.to_csv(&rep.config_hash))
                .with_context(|| format!("writing {}", path.display()))?;
            extra.push(path);
            rep
        }
        Command::SweepEps => sweep_epsilon(&cfg)?,
        Command::SweepDelta => sweep_delta(&cfg)?,
        Command::Refine => refinement_study(&cfg)?,
        Command::Verify => invariant_suite(&cfg)?,
    };
    let mut written = emit_report(&report, &out)?;
    written.extend(extra);
    if !cli.quiet {
        for c in &report.criteria {
            println!(
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        for p in &written {
            println!("wrote {}", p.display());
        }
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
