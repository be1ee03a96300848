use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fermidyn_cli::{default_csv_path, load_config, run, RunOptions};

#[derive(Parser)]
#[command(
    name = "fermidyn",
    version,
    about = "Occupation-density dynamics of fermionic mode systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the system described by a config file.
    Run {
        config: PathBuf,
        /// CSV output path (default: the config path with a .csv extension).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write a line chart of the densities.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Cross-check against RK4 and closed forms; exit 6 on disagreement.
        #[arg(long)]
        verify: bool,
        /// Print the orthonormal conserved basis with residuals and drifts.
        #[arg(long)]
        list_conserved: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run {
        config,
        csv,
        svg,
        verify,
        list_conserved,
    } = cli.command;
    let options = RunOptions {
        csv,
        svg,
        verify,
        list_conserved,
    };
    let result = load_config(&config).and_then(|cfg| {
        run(
            &cfg,
            &default_csv_path(&config),
            &options,
            &mut io::stdout().lock(),
        )
    });
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
