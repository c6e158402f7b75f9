use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use atomic::pipeline::{evaluate_soa, run_pipeline, ConfigSource, PipelineOptions, Stage};

#[derive(Parser)]
#[command(
    name = "atomic",
    about = "Validate, simulate and stress-test memristive IMPLY-logic algorithms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline (validate, control, simulate, deviate, plot) for one
    /// algorithm configuration.
    Pipeline {
        /// Algorithm configuration JSON.
        #[arg(long, alias = "config_file")]
        config_file: PathBuf,
        /// Root of the output tree.
        #[arg(long, default_value = "outputs")]
        out_dir: PathBuf,
        /// Comma-separated stage subset: validate,control,simulate,deviate,
        /// plot (or v,c,s,d,p).
        #[arg(long, default_value = "v,c,s,d,p")]
        stages: String,
        /// Largest deviation level of the sweep.
        #[arg(long, default_value_t = 0.5)]
        deviation_max: f64,
        /// Spacing of the deviation grid.
        #[arg(long, default_value_t = 0.05)]
        deviation_step: f64,
        /// Euler substeps per algorithm cycle.
        #[arg(long, default_value_t = 1000)]
        substeps: usize,
        /// Skip writing per-combination waveform traces.
        #[arg(long)]
        no_waveforms: bool,
    },
    /// Run the full pipeline for every bundled algorithm (or every
    /// configuration in --algo-dir) and write a comparison table.
    EvaluateSoa {
        /// Root of the output tree.
        #[arg(long, default_value = "outputs")]
        out_dir: PathBuf,
        /// Directory of configuration JSONs to evaluate instead of the
        /// bundled set.
        #[arg(long)]
        algo_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Pipeline {
            config_file,
            out_dir,
            stages,
            deviation_max,
            deviation_step,
            substeps,
            no_waveforms,
        } => {
            let stages = match Stage::parse_list(&stages) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let opts = PipelineOptions {
                out_dir,
                stages,
                deviation_max,
                deviation_step,
                substeps,
                record_waveforms: !no_waveforms,
            };
            match run_pipeline(&ConfigSource::Path(config_file), &opts) {
                Ok(summary) => {
                    println!(
                        "{}: ok ({} steps, {} memristors, outputs in {})",
                        summary.algo,
                        summary.steps,
                        summary.memristors,
                        summary.out_dir.display()
                    );
                    if let Some(e) = summary.total_energy {
                        println!("total energy: {e} J");
                    }
                    if let Some(p) = summary.max_correct_level {
                        println!("fully correct up to deviation level {p}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::EvaluateSoa { out_dir, algo_dir } => {
            match evaluate_soa(&out_dir, algo_dir.as_deref(), &PipelineOptions::default()) {
                Ok(rows) => {
                    for row in &rows {
                        match &row.status {
                            Ok(_) => println!("{}: pass", row.algo),
                            Err(e) => println!(
                                "{}: FAIL ({})",
                                row.algo,
                                e.lines().next().unwrap_or("error")
                            ),
                        }
                    }
                    println!(
                        "comparison table: {}",
                        out_dir.join("soa_comparison.csv").display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
