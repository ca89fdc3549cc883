use std::error::Error;
use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fc_core::{load_graph_path, load_points_path, mix_seed};
use fc_harness::dist::Distribution;
use fc_harness::experiments::{
    discrepancy_sum, graph_check, maxima_counts, nn_check, nn_scaling, DiscrepancyConfig,
    MaximaConfig, NnCheckConfig, NnScalingConfig,
};
use fc_harness::report::{Format as ReportFormat, Record, Report};

#[derive(Parser)]
#[command(
    name = "fc-harness",
    version,
    about = "Experiment driver for discrepancy-sensitive cascading structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Sum of per-edge log2 local discrepancies along a path of catalogs
    Discrepancy {
        /// Path length (number of catalogs)
        #[arg(long, default_value_t = 64)]
        k: usize,
        /// Elements per catalog
        #[arg(long, default_value_t = 4096)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        queries: usize,
        /// KIND or KIND:params (uniform_square, gaussian_cluster:<k>,<sigma>,
        /// grid_jitter:<eps>, adversarial_geometric:<ratio>)
        #[arg(long, default_value = "uniform_square")]
        dist: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte-Carlo maxima counts of uniform point sets against harmonic
    /// numbers
    Maxima {
        /// Comma-separated point-set sizes
        #[arg(long, value_delimiter = ',', default_value = "1024")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Timed update/query batches and staircase candidate counts across
    /// point-set sizes
    NnScaling {
        /// Comma-separated point-set sizes
        #[arg(long, value_delimiter = ',', default_value = "1024,65536")]
        n: Vec<usize>,
        /// Operations per batch
        #[arg(long, default_value_t = 100)]
        ops: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Nearest-neighbor oracle equivalence on an ingested or generated set
    NnCheck {
        /// Point file (lines `x,y`, `#` comments); generated when absent
        #[arg(long)]
        points: Option<PathBuf>,
        /// Generator for the point set when no file is given
        #[arg(long, default_value = "uniform_square")]
        dist: String,
        /// Generated set size when no file is given
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Load a graph description file and audit its bridge maps
    GraphCheck {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit<R: Record>(report: &Report<R>, output: &OutputArgs) -> io::Result<()> {
    match &output.out {
        Some(path) => {
            let file = File::create(path)?;
            report.write(output.format.into(), BufWriter::new(file))
        }
        None => report.write(output.format.into(), io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn Error>> {
    match cli.command {
        Command::Discrepancy {
            k,
            n,
            queries,
            dist,
            seed,
            output,
        } => {
            let dist = Distribution::parse(&dist)?;
            let report = discrepancy_sum(&DiscrepancyConfig {
                dist,
                path_len: k,
                catalog_size: n,
                queries,
                seed,
            })?;
            emit(&report, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Maxima {
            n,
            trials,
            seed,
            output,
        } => {
            let report = maxima_counts(&MaximaConfig {
                sizes: n,
                trials,
                seed,
            })?;
            emit(&report, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::NnScaling {
            n,
            ops,
            seed,
            output,
        } => {
            let report = nn_scaling(&NnScalingConfig {
                sizes: n,
                ops,
                seed,
            })?;
            emit(&report, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::NnCheck {
            points,
            dist,
            n,
            queries,
            seed,
            output,
        } => {
            let points = match points {
                Some(path) => load_points_path(&path)?,
                None => {
                    let dist = Distribution::parse(&dist)?;
                    let mut rng = rand::SeedableRng::seed_from_u64(mix_seed(seed, 0x9e));
                    dist.sample_points(n, &mut rng)
                        .into_iter()
                        .enumerate()
                        .map(|(id, (x, y))| fc_core::Point::new(id as u64, x, y))
                        .collect::<Result<Vec<_>, _>>()?
                }
            };
            let report = nn_check(&points, &NnCheckConfig { queries, seed })?;
            emit(&report, &output)?;
            let mismatches = report.aggregate("mismatches").unwrap_or(f64::NAN);
            eprintln!(
                "nn-check: {} checks, {} mismatches",
                report.aggregate("checks").unwrap_or(f64::NAN),
                mismatches
            );
            Ok(if mismatches == 0.0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::GraphCheck {
            graph,
            max_degree,
            seed,
        } => {
            let g = match load_graph_path(&graph, max_degree, seed) {
                Ok(g) => g,
                Err(fc_core::GraphFileError::Graph(e)) => {
                    // structurally invalid graph: a failed check, not a
                    // usage error
                    println!("graph-check: FAIL ({e})");
                    return Ok(ExitCode::from(1));
                }
                Err(e) => return Err(e.into()),
            };
            let outcome = graph_check(&g);
            println!(
                "graph-check: {} vertices, {} edges, {} elements",
                outcome.vertices, outcome.edges, outcome.elements
            );
            match outcome.failure {
                None => {
                    println!("graph-check: OK (bridges exact and monotone, degrees within bound)");
                    Ok(ExitCode::SUCCESS)
                }
                Some(reason) => {
                    println!("graph-check: FAIL ({reason})");
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
