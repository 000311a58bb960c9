//! Command-line entry point.
//!
//! Exit codes: 0 on success, 1 when `replicate` finds mismatches, 2 for
//! configuration problems, 3 for I/O problems, 4 when filters leave nothing
//! to analyze.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ipcmap::pipeline::{self, Overrides, PipelineConfig, PipelineError, RunReport};
use ipcmap::replicate::{run_replicate, ExpectedManifest};

#[derive(Parser)]
#[command(
    name = "ipcmap",
    version,
    about = "Patent classification co-occurrence maps: build IPC networks, \
             metrics, layouts, and exports from patent records."
)]
struct Cli {
    /// TOML configuration file; flags below override its keys.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Input corpus file.
    #[arg(long, global = true, value_name = "FILE")]
    input: Option<PathBuf>,

    /// Input format: canonical-csv, canonical-jsonl, or patentscope-csv.
    #[arg(long, global = true, value_name = "NAME")]
    format: Option<String>,

    /// Directory for all output files.
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,

    /// Classification level: section, class, subclass, or group.
    #[arg(long, global = true, value_name = "NAME")]
    level: Option<String>,

    /// Drop codes occurring in fewer than this many patents.
    #[arg(long, global = true, value_name = "N")]
    min_occurrence: Option<u32>,

    /// Inclusive Jaccard cutoff for the modularity network.
    #[arg(long, global = true, value_name = "R")]
    jaccard_threshold: Option<f64>,

    /// Louvain resolution parameter.
    #[arg(long, global = true, value_name = "GAMMA")]
    resolution: Option<f64>,

    /// Seed for the Louvain sweep order.
    #[arg(long, global = true, value_name = "SEED")]
    louvain_seed: Option<u64>,

    /// Use edge weights when computing betweenness.
    #[arg(long, global = true)]
    weighted_betweenness: bool,

    /// Keep only records published in or after this year.
    #[arg(long, global = true, value_name = "YEAR")]
    from_year: Option<i32>,

    /// Keep only records published in or before this year.
    #[arg(long, global = true, value_name = "YEAR")]
    to_year: Option<i32>,

    /// Layout iteration count.
    #[arg(long, global = true, value_name = "N")]
    layout_iterations: Option<u32>,

    /// Seed for the initial layout placement.
    #[arg(long, global = true, value_name = "SEED")]
    layout_seed: Option<u64>,

    /// Process every record regardless of applicant names.
    #[arg(long, global = true)]
    no_applicant_filter: bool,

    /// Graph export formats (repeatable): csv, graphml, gexf, dot, svg.
    #[arg(long = "export-format", global = true, value_name = "NAME")]
    export_formats: Option<Vec<String>>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corpus tables: per-year, per-office, and per-applicant-group counts.
    Stats,
    /// Full run: both networks, metrics, layouts, summaries, and exports.
    Network,
    /// Spanning-forest outputs only.
    Mst,
    /// Layout position tables only.
    Layout,
    /// Graph-file exports only.
    Export,
    /// Compare a run against published reference figures.
    Replicate {
        /// Expected-values manifest (JSON); defaults to the embedded one.
        #[arg(long, value_name = "FILE")]
        expected: Option<PathBuf>,
    },
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            input: self.input.clone(),
            format: self.format.clone(),
            output_dir: self.output_dir.clone(),
            level: self.level.clone(),
            min_occurrence: self.min_occurrence,
            jaccard_threshold: self.jaccard_threshold,
            resolution: self.resolution,
            louvain_seed: self.louvain_seed,
            weighted_betweenness: if self.weighted_betweenness {
                Some(true)
            } else {
                None
            },
            from_year: self.from_year,
            to_year: self.to_year,
            layout_iterations: self.layout_iterations,
            layout_seed: self.layout_seed,
            no_applicant_filter: self.no_applicant_filter,
            export_formats: self.export_formats.clone(),
        }
    }
}

fn print_report(report: &RunReport) {
    for name in &report.files {
        println!("wrote {}", report.output_dir.join(name).display());
    }
}

fn run(cli: &Cli) -> Result<ExitCode, PipelineError> {
    let config = PipelineConfig::load(cli.config.as_deref(), &cli.overrides())?;
    match &cli.command {
        Command::Stats => print_report(&pipeline::run_stats(&config)?),
        Command::Network => print_report(&pipeline::run_network(&config)?),
        Command::Mst => print_report(&pipeline::run_mst(&config)?),
        Command::Layout => print_report(&pipeline::run_layout(&config)?),
        Command::Export => print_report(&pipeline::run_export(&config)?),
        Command::Replicate { expected } => {
            let manifest = match expected {
                Some(path) => ExpectedManifest::from_file(path)?,
                None => ExpectedManifest::embedded(),
            };
            let report = run_replicate(&config, &manifest)?;
            print!("{}", report.render());
            if !report.all_pass() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
