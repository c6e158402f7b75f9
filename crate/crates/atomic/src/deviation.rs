//! Automated resistive-deviation experiments.
//!
//! For every deviation level p, every input combination and every corner
//! (one ± sign per input memristor) the inputs start from a perturbed
//! resistance, R_init = clamp(R_nom (1 + sign p), R_on, R_off), and the whole
//! algorithm is re-simulated. Work memristors always start nominal. The
//! corners bound the response deterministically, with no sampling noise; at
//! p = 0 all corners coincide, so only one run is made per combination.

use crate::circuit_sim::{
    nominal_initial_w, run_transient, threshold_logic, outputs_correct, TransientOptions, Trit,
};
use crate::error::SimError;
use crate::spec_io::ValidatedBundle;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Ordered deviation levels, each a fraction in [0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationGrid {
    pub levels: Vec<f64>,
}

impl DeviationGrid {
    /// Levels 0, step, 2·step, … up to and including `max` (within rounding).
    pub fn new(max: f64, step: f64) -> Self {
        assert!(step > 0.0 && (0.0..1.0).contains(&max));
        let n = (max / step + 0.5).floor() as usize;
        let levels = (0..=n)
            .map(|i| ((i as f64 * step) * 1e9).round() / 1e9)
            .filter(|p| *p <= max + 1e-12)
            .collect();
        DeviationGrid { levels }
    }

    /// The default sweep: 0 to 50 % in 5 % steps.
    pub fn default_grid() -> Self {
        Self::new(0.5, 0.05)
    }
}

/// One simulated corner.
#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub level: f64,
    pub combination: usize,
    /// Bit `i` set means input `i` (first-listed input = bit 0) deviates with
    /// a `+` sign, clear means `-`.
    pub corner_mask: usize,
    pub final_w: Vec<f64>,
    /// All outputs classified to their expected logic value.
    pub correct: bool,
}

#[derive(Debug, Clone)]
pub struct DeviationResults {
    pub records: Vec<ExperimentRecord>,
}

/// Perturbed initial state for one corner.
pub fn initial_w_for_corner(
    bundle: &ValidatedBundle,
    combination: usize,
    level: f64,
    corner_mask: usize,
) -> Vec<f64> {
    let cfg = &bundle.config;
    let p = &bundle.params;
    let mut w = nominal_initial_w(bundle, combination);
    if level == 0.0 {
        return w;
    }
    for (pos, name) in cfg.inputs.iter().enumerate() {
        let dev = cfg.device_index(name).expect("validated input");
        let sign = if (corner_mask >> pos) & 1 == 1 { 1.0 } else { -1.0 };
        let r_nom = p.resistance(w[dev]);
        let r_init = (r_nom * (1.0 + sign * level)).clamp(p.r_on, p.r_off);
        w[dev] = p.state_from_resistance(r_init);
    }
    w
}

/// Expected number of runs for a grid: one corner at p = 0, 2^n otherwise,
/// times 2^n input combinations.
pub fn expected_run_count(n_inputs: usize, grid: &DeviationGrid) -> usize {
    let n_comb = 1usize << n_inputs;
    grid.levels
        .iter()
        .map(|p| if *p == 0.0 { n_comb } else { n_comb << n_inputs })
        .sum()
}

/// Sweep the grid. Corners are independent, so they run data-parallel when
/// the `parallel` feature is enabled; record order is identical either way.
pub fn evaluate_deviation(
    bundle: &ValidatedBundle,
    grid: &DeviationGrid,
    opts: &TransientOptions,
) -> Result<DeviationResults, SimError> {
    let n_inputs = bundle.config.n_inputs();
    let n_comb = bundle.config.n_combinations();
    let mut jobs: Vec<(f64, usize, usize)> = Vec::new();
    for &level in &grid.levels {
        let corners = if level == 0.0 { 1 } else { 1 << n_inputs };
        for combination in 0..n_comb {
            for corner in 0..corners {
                jobs.push((level, combination, corner));
            }
        }
    }

    let run_one = |&(level, combination, corner_mask): &(f64, usize, usize)| {
        let w0 = initial_w_for_corner(bundle, combination, level, corner_mask);
        let res = run_transient(bundle, &w0, opts)?;
        let correct = outputs_correct(bundle, combination, &res.final_w);
        Ok(ExperimentRecord {
            level,
            combination,
            corner_mask,
            final_w: res.final_w,
            correct,
        })
    };

    #[cfg(feature = "parallel")]
    let records: Result<Vec<_>, SimError> = jobs.par_iter().map(run_one).collect();
    #[cfg(not(feature = "parallel"))]
    let records: Result<Vec<_>, SimError> = jobs.iter().map(run_one).collect();

    Ok(DeviationResults { records: records? })
}

/// Classification of one output in one record.
pub fn classify(bundle: &ValidatedBundle, record: &ExperimentRecord, output: &str) -> Trit {
    let dev = bundle.config.device_index(output).expect("validated output");
    threshold_logic(record.final_w[dev])
}

/// `min_w`/`max_w` of one output at one level, split by the expected logic
/// value of the output.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeRow {
    pub output: String,
    pub level: f64,
    pub expected: u8,
    pub min_w: f64,
    pub max_w: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RangeTable {
    pub rows: Vec<RangeRow>,
}

/// Collapse the sweep into per-output, per-level state ranges.
pub fn summarize_ranges(bundle: &ValidatedBundle, results: &DeviationResults) -> RangeTable {
    let cfg = &bundle.config;
    let mut rows = Vec::new();
    let mut levels: Vec<f64> = results.records.iter().map(|r| r.level).collect();
    levels.dedup();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();
    for (output, bits) in &cfg.output_states {
        let dev = cfg.device_index(output).expect("validated output");
        for &level in &levels {
            for expected in [0u8, 1u8] {
                let mut min_w = f64::INFINITY;
                let mut max_w = f64::NEG_INFINITY;
                for r in &results.records {
                    if r.level == level && bits[r.combination] == expected {
                        min_w = min_w.min(r.final_w[dev]);
                        max_w = max_w.max(r.final_w[dev]);
                    }
                }
                if min_w.is_finite() {
                    rows.push(RangeRow {
                        output: output.clone(),
                        level,
                        expected,
                        min_w,
                        max_w,
                    });
                }
            }
        }
    }
    RangeTable { rows }
}

/// Largest grid level at which every corner of every combination stayed
/// correct (`None` when even p = 0 fails).
pub fn max_fully_correct_level(results: &DeviationResults) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut levels: Vec<f64> = results.records.iter().map(|r| r.level).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();
    for level in levels {
        let all_ok = results
            .records
            .iter()
            .filter(|r| r.level == level)
            .all(|r| r.correct);
        if all_ok {
            best = Some(level);
        } else {
            break;
        }
    }
    best
}

/// CSV body for `deviation_results/<output>_<p>.csv`.
pub fn render_results_csv(
    bundle: &ValidatedBundle,
    results: &DeviationResults,
    output: &str,
    level: f64,
) -> String {
    let dev = bundle.config.device_index(output).expect("validated output");
    let mut out = String::from("combination,corner_mask,final_w,classification\n");
    for r in results.records.iter().filter(|r| r.level == level) {
        let class = match threshold_logic(r.final_w[dev]) {
            Trit::Zero => "0",
            Trit::One => "1",
            Trit::Undefined => "undefined",
        };
        out.push_str(&format!(
            "{},{},{},{class}\n",
            r.combination, r.corner_mask, r.final_w[dev]
        ));
    }
    out
}

/// Text body for `deviation_range.txt`.
pub fn render_range_table(table: &RangeTable) -> String {
    let mut out = String::from("output,level,expected,min_w,max_w\n");
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.output, r.level, r.expected, r.min_w, r.max_w
        ));
    }
    out
}
