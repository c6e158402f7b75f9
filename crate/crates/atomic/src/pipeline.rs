//! End-to-end orchestration: validate → control → simulate → deviate → plot.
//!
//! Later stages recompute what they need from earlier ones in memory, but
//! only the selected stages write their artifacts, so running stages
//! separately in dependency order leaves the same files as one full run.
//!
//! Output tree per algorithm:
//! `<out_dir>/<algo>/{State_History.txt, PWM_output/, Waveforms/, netlists/,
//! deviation_results/, deviation_range.txt, Images/, run.log, tmp/}`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bundle::BundledAlgorithm;
use crate::circuit_sim::{
    export_netlist, nominal_initial_w, run_transient, TransientOptions,
};
use crate::control_logic::{eval_algo, write_pwm_csv};
use crate::deviation::{
    evaluate_deviation, max_fully_correct_level, render_range_table, render_results_csv,
    summarize_ranges, DeviationGrid, DeviationResults,
};
use crate::error::{SimError, SpecError};
use crate::report;
use crate::spec_io::{load_bundled, load_from_config_path, ValidatedBundle};
use crate::state_model::{calc_algorithm, check_equivalence, render_state_history, Mismatch};

/// When this environment variable is set, log timestamps are written as a
/// fixed value so that repeated runs produce byte-identical trees.
pub const FIXED_TIMESTAMP_ENV: &str = "ATOMIC_FIXED_TIMESTAMP";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Validate,
    Control,
    Simulate,
    Deviate,
    Plot,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Validate,
        Stage::Control,
        Stage::Simulate,
        Stage::Deviate,
        Stage::Plot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Validate => "validate",
            Stage::Control => "control",
            Stage::Simulate => "simulate",
            Stage::Deviate => "deviate",
            Stage::Plot => "plot",
        }
    }

    /// Parse a comma-separated stage list; accepts full names or the initial
    /// letters v, c, s, d, p.
    pub fn parse_list(text: &str) -> Result<Vec<Stage>, String> {
        let mut stages = Vec::new();
        for token in text.split(',') {
            let stage = match token.trim() {
                "v" | "validate" => Stage::Validate,
                "c" | "control" => Stage::Control,
                "s" | "simulate" => Stage::Simulate,
                "d" | "deviate" => Stage::Deviate,
                "p" | "plot" => Stage::Plot,
                other => return Err(format!("unknown stage `{other}`")),
            };
            if !stages.contains(&stage) {
                stages.push(stage);
            }
        }
        Ok(stages)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub out_dir: PathBuf,
    pub stages: Vec<Stage>,
    pub deviation_max: f64,
    pub deviation_step: f64,
    pub substeps: usize,
    pub record_waveforms: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            out_dir: PathBuf::from("outputs"),
            stages: Stage::ALL.to_vec(),
            deviation_max: 0.5,
            deviation_step: 0.05,
            substeps: 1000,
            record_waveforms: true,
        }
    }
}

/// Where the algorithm under test comes from.
pub enum ConfigSource<'a> {
    Path(PathBuf),
    Bundled(&'a BundledAlgorithm),
}

impl ConfigSource<'_> {
    pub fn algo_name(&self) -> String {
        match self {
            ConfigSource::Path(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "algorithm".into()),
            ConfigSource::Bundled(b) => b.name.to_string(),
        }
    }
}

#[derive(Debug)]
pub enum PipelineError {
    Spec(SpecError),
    Functional(Vec<Mismatch>),
    Sim(SimError),
    Io(std::io::Error),
}

impl PipelineError {
    /// 1 = parse/validate, 2 = functional mismatch, 3 = simulation, 4 = IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Spec(_) => 1,
            PipelineError::Functional(_) => 2,
            PipelineError::Sim(_) => 3,
            PipelineError::Io(_) => 4,
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Spec(e) => write!(f, "validation failed: {e}"),
            PipelineError::Functional(mismatches) => {
                writeln!(f, "functional mismatch ({} row(s)):", mismatches.len())?;
                for m in mismatches {
                    writeln!(
                        f,
                        "  output {} combination {}: expected {}, got {}",
                        m.output, m.combination, m.expected as u8, m.got as u8
                    )?;
                }
                Ok(())
            }
            PipelineError::Sim(e) => write!(f, "simulation failed: {e}"),
            PipelineError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

// Anything that goes wrong while loading or cross-checking the input files
// belongs to the validate stage (exit code 1), including an unreadable
// configuration; exit code 4 is reserved for failures writing artifacts.
impl From<SpecError> for PipelineError {
    fn from(e: SpecError) -> Self {
        PipelineError::Spec(e)
    }
}

impl From<SimError> for PipelineError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Io(io) => PipelineError::Io(io),
            other => PipelineError::Sim(other),
        }
    }
}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        PipelineError::Io(e)
    }
}

/// Per-run append-only log, flushed to `run.log` at the end of the run.
struct RunLog {
    lines: Vec<String>,
}

impl RunLog {
    fn new() -> Self {
        RunLog { lines: Vec::new() }
    }

    fn timestamp() -> String {
        if std::env::var_os(FIXED_TIMESTAMP_ENV).is_some() {
            "0.000000".into()
        } else {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap_or_default();
            format!("{}.{:06}", now.as_secs(), now.subsec_micros())
        }
    }

    fn entry(&mut self, stage: &str, message: &str) {
        self.lines
            .push(format!("[{}] [{stage}] {message}", Self::timestamp()));
    }

    fn write(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.lines.join("\n") + "\n")
    }
}

#[derive(Debug, Clone)]
pub struct PipelineSummary {
    pub algo: String,
    pub out_dir: PathBuf,
    pub steps: usize,
    pub memristors: usize,
    pub functional_pass: bool,
    /// Summed nominal source energy over all input combinations, when the
    /// simulate stage ran.
    pub total_energy: Option<f64>,
    /// Largest deviation level with zero incorrect corners, when the deviate
    /// stage ran.
    pub max_correct_level: Option<f64>,
}

fn combination_bits(bundle: &ValidatedBundle, k: usize) -> String {
    (0..bundle.config.n_inputs())
        .map(|p| if bundle.config.input_bit(k, p) { '1' } else { '0' })
        .collect()
}

fn write_trace_csv(bundle: &ValidatedBundle, trace: &crate::circuit_sim::TransientTrace) -> String {
    let mut out = String::from("time,");
    out.push_str(&bundle.config.memristors.join(","));
    out.push('\n');
    for (t, row) in trace.times.iter().zip(&trace.states) {
        out.push_str(&format!("{t}"));
        for w in row {
            out.push_str(&format!(",{w}"));
        }
        out.push('\n');
    }
    out
}

/// Run the selected stages for one algorithm.
pub fn run_pipeline(
    source: &ConfigSource,
    opts: &PipelineOptions,
) -> Result<PipelineSummary, PipelineError> {
    let algo = source.algo_name();
    let root = opts.out_dir.join(&algo);
    fs::create_dir_all(root.join("tmp"))?;
    let mut log = RunLog::new();
    let selected = |s: Stage| opts.stages.contains(&s);
    let result = run_stages(source, opts, &algo, &root, &mut log, &selected);
    if let Err(e) = &result {
        log.entry("pipeline", &format!("aborted with exit code {}", e.exit_code()));
    } else {
        log.entry("pipeline", "end ok");
    }
    log.write(&root.join("run.log"))?;
    result
}

fn run_stages(
    source: &ConfigSource,
    opts: &PipelineOptions,
    algo: &str,
    root: &Path,
    log: &mut RunLog,
    selected: &dyn Fn(Stage) -> bool,
) -> Result<PipelineSummary, PipelineError> {
    log.entry("pipeline", &format!("start algorithm `{algo}`"));

    // --- validate ---------------------------------------------------------
    log.entry("validate", "start");
    let bundle = match source {
        ConfigSource::Path(p) => load_from_config_path(p)?,
        ConfigSource::Bundled(b) => load_bundled(b)?,
    };
    let history = calc_algorithm(&bundle);
    let check = check_equivalence(&bundle, &history);
    log.entry(
        "validate",
        &format!(
            "parsed {} steps, {} memristors, topology {}",
            bundle.program.steps.len(),
            bundle.n_devices(),
            bundle.topology.name
        ),
    );
    fs::write(
        root.join("tmp").join("canonical_algorithm.txt"),
        bundle.program.render(),
    )?;
    if selected(Stage::Validate) {
        fs::write(
            root.join("State_History.txt"),
            render_state_history(&bundle, &history),
        )?;
    }
    if !check.passed() {
        log.entry(
            "validate",
            &format!("end functional mismatch: {} row(s)", check.mismatches.len()),
        );
        return Err(PipelineError::Functional(check.mismatches));
    }
    log.entry("validate", "end ok: all output rows match the declared truth table");

    // --- control ----------------------------------------------------------
    log.entry("control", "start");
    let schedule = eval_algo(&bundle);
    if selected(Stage::Control) {
        let pwm_dir = root.join("PWM_output");
        fs::create_dir_all(&pwm_dir)?;
        fs::write(pwm_dir.join("pwm.csv"), write_pwm_csv(&bundle, &schedule))?;
        let net_dir = root.join("netlists");
        fs::create_dir_all(&net_dir)?;
        fs::write(
            net_dir.join(format!("{algo}.cir")),
            export_netlist(&bundle, &schedule),
        )?;
        log.entry("control", "end ok: wrote PWM schedule and netlist");
    } else {
        log.entry("control", "end ok (not selected, schedule kept in memory)");
    }

    // --- simulate ---------------------------------------------------------
    log.entry("simulate", "start");
    let sim_opts = TransientOptions {
        substeps_per_cycle: opts.substeps,
        record_trace: opts.record_waveforms,
    };
    let mut total_energy = None;
    if selected(Stage::Simulate) {
        let wave_dir = root.join("Waveforms");
        fs::create_dir_all(&wave_dir)?;
        let mut energy_csv = String::from("combination,energy_J\n");
        let mut total = 0.0;
        for k in 0..bundle.config.n_combinations() {
            let res = run_transient(&bundle, &nominal_initial_w(&bundle, k), &sim_opts)?;
            let bits = combination_bits(&bundle, k);
            if let Some(trace) = &res.trace {
                fs::write(
                    wave_dir.join(format!("combination_{bits}.csv")),
                    write_trace_csv(&bundle, trace),
                )?;
            }
            energy_csv.push_str(&format!("{bits},{}\n", res.energy.total));
            total += res.energy.total;
        }
        energy_csv.push_str(&format!("total,{total}\n"));
        fs::write(root.join("energy.csv"), energy_csv)?;
        total_energy = Some(total);
        log.entry(
            "simulate",
            &format!("end ok: {} combinations, total energy {total} J",
                bundle.config.n_combinations()),
        );
    } else {
        log.entry("simulate", "end ok (not selected)");
    }

    // --- deviate ----------------------------------------------------------
    log.entry("deviate", "start");
    let grid = DeviationGrid::new(opts.deviation_max, opts.deviation_step);
    let need_results = selected(Stage::Deviate) || selected(Stage::Plot);
    let mut results: Option<DeviationResults> = None;
    let mut max_correct_level = None;
    if need_results {
        let sweep = evaluate_deviation(&bundle, &grid, &TransientOptions {
            substeps_per_cycle: opts.substeps,
            record_trace: false,
        })?;
        max_correct_level = max_fully_correct_level(&sweep);
        if selected(Stage::Deviate) {
            let dev_dir = root.join("deviation_results");
            fs::create_dir_all(&dev_dir)?;
            for output in bundle.config.output_states.keys() {
                for &level in &grid.levels {
                    fs::write(
                        dev_dir.join(format!("{output}_{level}.csv")),
                        render_results_csv(&bundle, &sweep, output, level),
                    )?;
                }
            }
            let table = summarize_ranges(&bundle, &sweep);
            fs::write(root.join("deviation_range.txt"), render_range_table(&table))?;
            log.entry(
                "deviate",
                &format!(
                    "end ok: {} runs, fully correct up to level {:?}",
                    sweep.records.len(),
                    max_correct_level
                ),
            );
        } else {
            log.entry("deviate", "end ok (not selected, results kept in memory)");
        }
        results = Some(sweep);
    } else {
        log.entry("deviate", "end ok (not selected)");
    }

    // --- plot -------------------------------------------------------------
    log.entry("plot", "start");
    if selected(Stage::Plot) {
        let results = results.as_ref().expect("computed when plot is selected");
        let images = root.join("Images");
        fs::create_dir_all(&images)?;

        // Waveform band: the all-ones combination at the closest grid level
        // to 20 % deviation.
        let band_level = grid
            .levels
            .iter()
            .copied()
            .filter(|p| *p > 0.0 && *p <= 0.2 + 1e-12)
            .fold(None::<f64>, |acc, p| Some(acc.map_or(p, |a| a.max(p))))
            .or_else(|| grid.levels.iter().copied().find(|p| *p > 0.0));
        let k = bundle.config.n_combinations() - 1;
        let trace_opts = TransientOptions {
            substeps_per_cycle: opts.substeps,
            record_trace: true,
        };
        let nominal = run_transient(&bundle, &nominal_initial_w(&bundle, k), &trace_opts)?;
        let nominal_trace = nominal.trace.expect("trace requested");
        let mut corner_traces = Vec::new();
        if let Some(level) = band_level {
            for corner in 0..(1usize << bundle.config.n_inputs()) {
                let w0 = crate::deviation::initial_w_for_corner(&bundle, k, level, corner);
                let res = run_transient(&bundle, &w0, &trace_opts)?;
                corner_traces.push(res.trace.expect("trace requested"));
            }
        }
        for output in bundle.config.output_states.keys() {
            let dev = bundle.config.device_index(output).expect("validated output");
            let nom: Vec<f64> = nominal_trace.states.iter().map(|s| s[dev]).collect();
            let (env_min, env_max): (Vec<f64>, Vec<f64>) = if corner_traces.is_empty() {
                (nom.clone(), nom.clone())
            } else {
                (0..nominal_trace.times.len())
                    .map(|i| {
                        let mut lo = f64::INFINITY;
                        let mut hi = f64::NEG_INFINITY;
                        for tr in &corner_traces {
                            lo = lo.min(tr.states[i][dev]);
                            hi = hi.max(tr.states[i][dev]);
                        }
                        (lo, hi)
                    })
                    .unzip()
            };
            fs::write(
                images.join(format!("waveform_{output}.svg")),
                report::plot_waveforms_with_deviation(
                    output,
                    band_level.unwrap_or(0.0),
                    &nominal_trace.times,
                    &nom,
                    &env_min,
                    &env_max,
                ),
            )?;
            fs::write(
                images.join(format!("waveform_{output}.csv")),
                report::waveform_csv(&nominal_trace.times, &nom, &env_min, &env_max),
            )?;
            fs::write(
                images.join(format!("scatter_{output}.svg")),
                report::plot_deviation_scatter(&bundle, results, output),
            )?;
            fs::write(
                images.join(format!("scatter_{output}.csv")),
                report::scatter_csv(&bundle, results, output),
            )?;
        }
        let table = summarize_ranges(&bundle, results);
        fs::write(images.join("range.svg"), report::plot_deviation_range(&table))?;
        log.entry("plot", "end ok: wrote waveform, scatter and range figures");
    } else {
        log.entry("plot", "end ok (not selected)");
    }

    Ok(PipelineSummary {
        algo: algo.to_string(),
        out_dir: root.to_path_buf(),
        steps: bundle.program.steps.len(),
        memristors: bundle.n_devices(),
        functional_pass: true,
        total_energy,
        max_correct_level,
    })
}

/// One row of the batch comparison table.
#[derive(Debug, Clone)]
pub struct SoaRow {
    pub algo: String,
    pub status: Result<PipelineSummary, String>,
}

/// Batch mode: run the full pipeline for every bundled algorithm (or every
/// `*.json` configuration in `algo_dir`), aggregate failures without
/// aborting, and write `soa_comparison.csv` to `out_dir`.
pub fn evaluate_soa(
    out_dir: &Path,
    algo_dir: Option<&Path>,
    opts: &PipelineOptions,
) -> Result<Vec<SoaRow>, PipelineError> {
    let mut sources: Vec<(String, ConfigSource)> = Vec::new();
    match algo_dir {
        Some(dir) => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            for p in paths {
                let src = ConfigSource::Path(p);
                sources.push((src.algo_name(), src));
            }
        }
        None => {
            for b in &crate::bundle::BUNDLED_ALGORITHMS {
                sources.push((b.name.to_string(), ConfigSource::Bundled(b)));
            }
        }
    }
    if sources.is_empty() {
        eprintln!("warning: no algorithm configurations found; table is empty");
    }

    let mut rows = Vec::new();
    let mut opts = opts.clone();
    opts.out_dir = out_dir.to_path_buf();
    opts.stages = Stage::ALL.to_vec();
    for (name, source) in &sources {
        let status = run_pipeline(source, &opts).map_err(|e| e.to_string());
        rows.push(SoaRow {
            algo: name.clone(),
            status,
        });
    }

    let mut csv =
        String::from("algorithm,status,steps,memristors,total_energy_J,max_correct_deviation\n");
    for row in &rows {
        match &row.status {
            Ok(s) => csv.push_str(&format!(
                "{},pass,{},{},{},{}\n",
                row.algo,
                s.steps,
                s.memristors,
                s.total_energy.map_or(String::from(""), |e| format!("{e}")),
                s.max_correct_level
                    .map_or(String::from(""), |p| format!("{p}")),
            )),
            Err(e) => csv.push_str(&format!(
                "{},fail,,,,\n# {}\n",
                row.algo,
                e.lines().next().unwrap_or("error")
            )),
        }
    }
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("soa_comparison.csv"), csv)?;
    Ok(rows)
}
