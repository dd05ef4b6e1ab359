use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use factorid::bench::{run_bench, write_csv, BenchConfig};
use factorid::filter::{run_filter, FilterOptions};
use factorid::{check, exit_code, io_err, witness, CliError, EXIT_ERROR, EXIT_OK};
use factorid_core::PatternFormat;

#[derive(Parser)]
#[command(
    name = "factorid",
    version,
    about = "Counting-rule checks for sparse factor loading patterns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dense,
    Jsonl,
}

impl From<Format> for PatternFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Dense => PatternFormat::DenseText,
            Format::Jsonl => PatternFormat::JsonlRecord,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide CR(r, s) for one pattern (s = 1 decides variance identification).
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "s", default_value_t = 1)]
        s: usize,
        #[arg(long, value_enum, default_value = "dense")]
        format: Format,
        #[arg(long)]
        json: bool,
    },
    /// Print the two RCM row blocks left after deleting some rows.
    Witness {
        #[arg(long)]
        input: PathBuf,
        /// Rows to delete, e.g. `v1,v6`.
        #[arg(long, default_value = "", num_args = 0..=1, default_missing_value = "")]
        delete: String,
        #[arg(long, value_enum, default_value = "dense")]
        format: Format,
        #[arg(long)]
        json: bool,
    },
    /// Attach identification verdicts to a JSONL stream of posterior draws.
    Filter {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Write the summary JSON to this file.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Append the summary JSON as the final output line.
        #[arg(long)]
        summary_final: bool,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Time min-cut verification against subset enumeration.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = vec![50, 100])]
        m: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![5, 10])]
        r: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.3])]
        density: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Skip the subset-enumeration method entirely.
        #[arg(long)]
        no_bruteforce: bool,
        #[arg(long, default_value_t = factorid_core::identify::DEFAULT_MAX_BRUTEFORCE_COLUMNS)]
        bruteforce_cap: usize,
        #[arg(long)]
        output: PathBuf,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let stdout = io::stdout();
    match cli.command {
        Command::Check {
            input,
            s,
            format,
            json,
        } => check::run(&input, s, format.into(), json, &mut stdout.lock()),
        Command::Witness {
            input,
            delete,
            format,
            json,
        } => witness::run(&input, &delete, format.into(), json, &mut stdout.lock()),
        Command::Filter {
            input,
            output,
            summary,
            summary_final,
            parallel,
        } => {
            let reader =
                File::open(&input).map_err(io_err(format!("cannot open {}", input.display())))?;
            let writer = File::create(&output)
                .map_err(io_err(format!("cannot create {}", output.display())))?;
            let mut writer = BufWriter::new(writer);
            let result = run_filter(
                &mut BufReader::new(reader),
                &mut writer,
                FilterOptions {
                    parallel: parallel.max(1),
                },
            )?;
            let summary_json = serde_json::to_string(&result).expect("summary serializes");
            if summary_final {
                writeln!(writer, "{summary_json}").map_err(io_err("cannot write output"))?;
            }
            writer.flush().map_err(io_err("cannot write output"))?;
            if let Some(path) = summary {
                std::fs::write(&path, summary_json + "\n")
                    .map_err(io_err(format!("cannot write {}", path.display())))?;
            }
            if result.errors > 0 {
                eprintln!("{} malformed line(s)", result.errors);
                Ok(EXIT_ERROR)
            } else {
                Ok(EXIT_OK)
            }
        }
        Command::Bench {
            m,
            r,
            density,
            seed,
            reps,
            no_bruteforce,
            bruteforce_cap,
            output,
        } => {
            let mut file = File::create(&output)
                .map_err(io_err(format!("cannot create {}", output.display())))?;
            let rows = run_bench(&BenchConfig {
                ms: m,
                rs: r,
                densities: density,
                seed,
                reps,
                bruteforce: !no_bruteforce,
                bruteforce_cap,
            });
            write_csv(&rows, &mut file)?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    ExitCode::from(exit_code(run(cli)) as u8)
}
