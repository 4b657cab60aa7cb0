use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcorr::error::{Error, Result};
use qcorr::pipeline::{self, RunConfig, SimModel};
use qcorr::portfolio::{Evaluation, Mode, TieRule};
use qcorr::qdcca::DetrendConfig;
use qcorr::seriesio::{FactorMarket, Seed};

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Multiscale detrended cross-correlation networks and portfolios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute rho(q, s) matrices over the grid.
    Grid(RunArgs),
    /// Eigenvalue reports against random-matrix baselines.
    Rmt(RunArgs),
    /// Planar filtered graphs and their topology.
    Pmfg(RunArgs),
    /// Peripheral, central and random portfolio frontiers.
    Portfolio(RunArgs),
    /// Write a synthetic price panel.
    Simulate(SimArgs),
    /// Write a row-shuffled copy of a price panel.
    Shuffle(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    prices: PathBuf,
    #[arg(long)]
    groups: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    q_min: f64,
    #[arg(long, default_value_t = 5.0)]
    q_max: f64,
    #[arg(long, default_value_t = 0.2)]
    q_step: f64,
    #[arg(long, default_value_t = 30)]
    s_min: usize,
    #[arg(long, default_value_t = 1000)]
    s_max: usize,
    #[arg(long, default_value_t = 40)]
    s_step: usize,
    #[arg(long, default_value_t = 2)]
    poly_order: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
    /// Comma-separated portfolio sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Comma-separated subset of peripheral, central, random.
    #[arg(long, value_delimiter = ',', default_value = "peripheral,central,random")]
    modes: Vec<String>,
    /// Fixed risk level for the return gap; derived per size when absent.
    #[arg(long)]
    risk_level: Option<f64>,
    /// Evaluate on the dates after this leading fraction.
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long, value_enum, default_value = "average")]
    ties: Ties,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ties {
    Average,
    Min,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Factor,
    Gaussian,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "factor")]
    model: Model,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    assets: usize,
    #[arg(long, default_value_t = 4000)]
    len: usize,
    /// Assets in the correlated block (factor model).
    #[arg(long, default_value_t = 10)]
    block: usize,
}

impl RunArgs {
    fn config(self) -> Result<RunConfig> {
        let modes = self.modes.iter().map(|m| m.parse::<Mode>()).collect::<Result<Vec<_>>>()?;
        let evaluation = match self.train_fraction {
            None => Evaluation::InSample,
            Some(f) => Evaluation::TrainTest { train_fraction: f },
        };
        if let Some(r) = self.risk_level {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Config(format!("--risk-level must be positive, got {r}")));
            }
        }
        Ok(RunConfig {
            prices: self.prices,
            groups: self.groups,
            detrend: DetrendConfig {
                poly_order: self.poly_order,
                min_scale: self.s_min,
                max_scale: self.s_max,
                scale_step: self.s_step,
                q_min: self.q_min,
                q_max: self.q_max,
                q_step: self.q_step,
            },
            out: self.out,
            seed: Seed(self.seed),
            jobs: self.jobs,
            sizes: self.sizes,
            modes,
            risk_level: self.risk_level,
            evaluation,
            tie_rule: match self.ties {
                Ties::Average => TieRule::Average,
                Ties::Min => TieRule::Min,
            },
            ..RunConfig::default()
        })
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Grid(a) => {
            let run = pipeline::cmd_grid(&a.config()?)?;
            println!("grid: {} points, {} computed", run.manifest.entries.len(), run.computed);
        }
        Command::Rmt(a) => {
            let run = pipeline::cmd_rmt(&a.config()?)?;
            println!(
                "rmt: {} points, band [{:.4}, {:.4}], {} fully inside",
                run.points, run.bounds.lambda_minus, run.bounds.lambda_plus, run.all_bulk
            );
        }
        Command::Pmfg(a) => {
            let rows = pipeline::cmd_pmfg(&a.config()?)?;
            println!("pmfg: {} networks", rows.len());
        }
        Command::Portfolio(a) => {
            let run = pipeline::cmd_portfolio(&a.config()?)?;
            for (m, level) in run.sizes.iter().zip(&run.risk_levels) {
                println!("portfolio m={m}: risk level {level:e}");
            }
        }
        Command::Simulate(a) => {
            let model = match a.model {
                Model::Factor => SimModel::Factor(FactorMarket { n: a.assets, len: a.len, block: a.block, ..FactorMarket::default() }),
                Model::Gaussian => SimModel::Gaussian { n: a.assets, len: a.len },
            };
            let path = pipeline::cmd_simulate(&a.out, &model, Seed(a.seed))?;
            println!("wrote {}", path.display());
        }
        Command::Shuffle(a) => {
            let path = pipeline::cmd_shuffle(&a.config()?)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qcorr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
