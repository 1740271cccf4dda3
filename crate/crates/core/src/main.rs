use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sve_core::harness::catalog::{catalog_dir, list_cases, resolve};
use sve_core::harness::{HarnessError, RunConfig, convergence_study, output, run_case};
use sve_core::timeint::{SchemeVariant, TimeScheme};

#[derive(Parser)]
#[command(name = "sve", about = "Semi-implicit staggered solver for shallow water and Saint-Venant-Exner")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, global = true, value_enum)]
    time_scheme: Option<SchemeArg>,
    /// Artifact directory (overrides the config).
    #[arg(long, global = true, env = "SVE_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Assert that no random numbers are used. Always holds.
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one case given as a TOML path or catalog name.
    Run { config: String },
    /// Convergence study over nested grids.
    Study {
        config: String,
        #[arg(long, value_delimiter = ',', default_value = "100,200,400,800")]
        levels: Vec<usize>,
        /// Reference grid size; Richardson differencing when absent.
        #[arg(long)]
        reference: Option<usize>,
    },
    /// Catalog operations.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Simplified,
    FullyThirdOrder,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Euler1,
    ImexSsp3,
    Explicit3,
    Explicit1,
}

fn apply_flags(cli: &Cli, mut cfg: RunConfig) -> RunConfig {
    if let Some(v) = cli.variant {
        cfg.variant = match v {
            VariantArg::Simplified => SchemeVariant::Simplified,
            VariantArg::FullyThirdOrder => SchemeVariant::FullyThirdOrder,
        };
    }
    if let Some(s) = cli.time_scheme {
        cfg.time_scheme = match s {
            SchemeArg::Euler1 => TimeScheme::Euler1,
            SchemeArg::ImexSsp3 => TimeScheme::ImexSsp3,
            SchemeArg::Explicit3 => TimeScheme::Explicit3,
            SchemeArg::Explicit1 => TimeScheme::Explicit1,
        };
    }
    cfg
}

fn real_main(cli: &Cli) -> Result<(), HarnessError> {
    if cli.seedless {
        eprintln!("seedless: no random number source is used");
    }
    match &cli.cmd {
        Cmd::Run { config } => {
            let cfg = apply_flags(cli, resolve(config)?);
            let r = run_case(&cfg, cli.out_dir.as_deref())?;
            print!("{}", output::report_csv(&r.report));
        }
        Cmd::Study {
            config,
            levels,
            reference,
        } => {
            let cfg = apply_flags(cli, resolve(config)?);
            let reference = match reference {
                Some(n) => sve_core::harness::ReferenceSpec::FineGrid { n_cells: *n },
                None => sve_core::harness::ReferenceSpec::Richardson,
            };
            let r = convergence_study(&cfg, levels, reference, cli.out_dir.as_deref())?;
            print!("{}", output::study_csv(&r));
        }
        Cmd::Catalog { cmd: CatalogCmd::List } => {
            for name in list_cases(&catalog_dir())? {
                println!("{name}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
