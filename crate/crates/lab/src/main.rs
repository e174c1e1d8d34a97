use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use prs_lab::config::{self, Experiment, Overrides, Preset};
use prs_lab::LabError;

#[derive(Parser)]
#[command(name = "prs-lab", version, about = "Seeded experiments on pseudorandom state generators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact distances along the binary-phase hybrid chain.
    HybridsCheck(Common),
    /// Distinguishing attack: `gram` (symmetric-subspace span) or `purity` (SWAP tests).
    AttackRun {
        #[arg(value_parser = ["gram", "purity"])]
        attack: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Base and boosted tomography error against their guarantees.
    TomographyBench(Common),
    /// Same-input and different-input verification rates.
    VerifyCorrectness(Common),
    /// Commit and reveal sessions over the wire codec.
    CommitDemo(Common),
    /// Exhaustive key-pair search for double openings.
    BindingSearch(Common),
    /// Encrypt and decrypt random messages.
    OtpDemo(Common),
    /// Marginal and collision statistics of small-range tables.
    SmallrangeStats(Common),
    /// Write or check the regression fixtures (directory from PRS_LAB_CACHE).
    Fixtures(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Output directory for the report and optional CSV/SVG.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for trial-level parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Override a `[params]` entry, e.g. `--param lambda=8`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    svg: bool,
}

fn split(cmd: Command) -> (Experiment, Common, Vec<String>) {
    match cmd {
        Command::HybridsCheck(c) => (Experiment::HybridsCheck, c, vec![]),
        Command::AttackRun { attack, common } => (
            Experiment::AttackRun,
            common,
            attack.map(|a| vec![format!("attack={a}")]).unwrap_or_default(),
        ),
        Command::TomographyBench(c) => (Experiment::TomographyBench, c, vec![]),
        Command::VerifyCorrectness(c) => (Experiment::VerifyCorrectness, c, vec![]),
        Command::CommitDemo(c) => (Experiment::CommitDemo, c, vec![]),
        Command::BindingSearch(c) => (Experiment::BindingSearch, c, vec![]),
        Command::OtpDemo(c) => (Experiment::OtpDemo, c, vec![]),
        Command::SmallrangeStats(c) => (Experiment::SmallrangeStats, c, vec![]),
        Command::Fixtures(c) => (Experiment::Fixtures, c, vec![]),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common, mut extra) = split(cli.command);
    let mut params = common.params;
    params.append(&mut extra);
    let overrides = Overrides {
        experiment: Some(experiment),
        seed: common.seed,
        trials: common.trials,
        preset: common.preset,
        out: common.out,
        workers: common.workers,
        csv: common.csv,
        svg: common.svg,
        params,
    };
    let cfg = match config::load(common.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("prs-lab: {e}");
            return ExitCode::from(2);
        }
    };
    let output = match prs_lab::run(&cfg) {
        Ok(o) => o,
        Err(e @ LabError::Usage { .. }) => {
            eprintln!("prs-lab: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("prs-lab: {e}");
            return ExitCode::FAILURE;
        }
    };
    let dir = cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("prs-lab-out"));
    match output.write(&dir, cfg.output.csv, cfg.output.svg) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("prs-lab: {e}");
            return ExitCode::FAILURE;
        }
    }
    for flag in &output.report.flags {
        println!(
            "{} {}: measured {} {} {} ({})",
            if flag.pass { "PASS" } else { "FAIL" },
            flag.name,
            flag.measured,
            flag.relation,
            flag.bound,
            flag.anchor
        );
    }
    println!("{:.2}s", output.report.wall_clock_seconds);
    if output.report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
