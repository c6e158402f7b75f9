//! Figure rendering: self-contained SVG files plus plot-data CSV twins.
//!
//! Three figure kinds are produced per algorithm:
//! - waveform band: the nominal w(t) of an output with the min/max envelope
//!   across all deviation corners at one level;
//! - deviation scatter: final w of an output versus deviation level, one
//!   marker per (combination, corner), incorrect read-outs in red;
//! - deviation range: min/max state bands per output and expected value over
//!   increasing deviation, with the 1/3 and 2/3 read-out thresholds drawn.
//!
//! All geometry is derived from the input data with plain arithmetic and
//! shortest-roundtrip number formatting, so re-rendering identical data gives
//! byte-identical files.

use std::fmt::Write as _;

use crate::deviation::{DeviationResults, RangeTable};
use crate::spec_io::ValidatedBundle;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 45.0;

const COLOR_NOMINAL: &str = "#1f77b4";
const COLOR_BAND: &str = "#aec7e8";
const COLOR_OK: &str = "#1f77b4";
const COLOR_BAD: &str = "#d62728";
const COLOR_THRESHOLD: &str = "#888888";

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(f64::MIN_POSITIVE);
        MARGIN_L + (v - self.x_min) / span * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(f64::MIN_POSITIVE);
        HEIGHT - MARGIN_B - (v - self.y_min) / span * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn svg_open(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tx}\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">{title}</text>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        tx = WIDTH / 2.0,
        title = title
    )
}

fn svg_axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    let _ = writeln!(
        out,
        "<path d=\"M {x0} {y1} L {x0} {y0} L {x1} {y0}\" fill=\"none\" stroke=\"black\"/>"
    );
    for i in 0..=4 {
        let fx = frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 4.0;
        let fy = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 4.0;
        let px = frame.x(fx);
        let py = frame.y(fy);
        let _ = writeln!(
            out,
            "<line x1=\"{px}\" y1=\"{y0}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>",
            y0 + 4.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            y0 + 18.0,
            round_sig(fx)
        );
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{py}\" x2=\"{x0}\" y2=\"{py}\" stroke=\"black\"/>",
            x0 - 4.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            x0 - 8.0,
            py + 4.0,
            round_sig(fy)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 8.0
    );
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{y_label}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

/// Shortest stable tick label: round to 6 significant-ish decimals.
fn round_sig(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn polyline(points: &[(f64, f64)], frame: &Frame, stroke: &str, dash: Option<&str>) -> String {
    let pts: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{},{}", frame.x(*x), frame.y(*y)))
        .collect();
    let dash_attr = dash
        .map(|d| format!(" stroke-dasharray=\"{d}\""))
        .unwrap_or_default();
    format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\"{dash_attr}/>\n",
        pts.join(" ")
    )
}

/// Waveform-band figure: nominal trace plus corner envelope of one output.
pub fn plot_waveforms_with_deviation(
    output: &str,
    level: f64,
    times: &[f64],
    nominal: &[f64],
    env_min: &[f64],
    env_max: &[f64],
) -> String {
    let frame = Frame {
        x_min: 0.0,
        x_max: *times.last().unwrap_or(&1.0),
        y_min: 0.0,
        y_max: 1.0,
    };
    let mut out = svg_open(&format!("{output}: state vs time, deviation {level}"));
    svg_axes(&mut out, &frame, "time [s]", "state w");
    // Envelope as a closed band: max curve forward, min curve backward.
    let mut band: Vec<String> = times
        .iter()
        .zip(env_max)
        .map(|(t, w)| format!("{},{}", frame.x(*t), frame.y(*w)))
        .collect();
    band.extend(
        times
            .iter()
            .zip(env_min)
            .rev()
            .map(|(t, w)| format!("{},{}", frame.x(*t), frame.y(*w))),
    );
    let _ = writeln!(
        out,
        "<polygon points=\"{}\" fill=\"{COLOR_BAND}\" fill-opacity=\"0.6\" stroke=\"none\"/>",
        band.join(" ")
    );
    let pts: Vec<(f64, f64)> = times.iter().copied().zip(nominal.iter().copied()).collect();
    out.push_str(&polyline(&pts, &frame, COLOR_NOMINAL, None));
    out.push_str("</svg>\n");
    out
}

/// CSV twin of the waveform-band figure.
pub fn waveform_csv(times: &[f64], nominal: &[f64], env_min: &[f64], env_max: &[f64]) -> String {
    let mut out = String::from("time,nominal_w,min_w,max_w\n");
    for i in 0..times.len() {
        let _ = writeln!(out, "{},{},{},{}", times[i], nominal[i], env_min[i], env_max[i]);
    }
    out
}

/// Scatter figure: final w of one output over the deviation grid; markers of
/// records whose read-out is incorrect are red.
pub fn plot_deviation_scatter(
    bundle: &ValidatedBundle,
    results: &DeviationResults,
    output: &str,
) -> String {
    let cfg = &bundle.config;
    let dev = cfg.device_index(output).expect("validated output");
    let bits = &cfg.output_states[output];
    let x_max = results
        .records
        .iter()
        .map(|r| r.level)
        .fold(0.0, f64::max)
        .max(1e-9);
    let frame = Frame {
        x_min: 0.0,
        x_max,
        y_min: 0.0,
        y_max: 1.0,
    };
    let mut out = svg_open(&format!("{output}: final state vs deviation"));
    svg_axes(&mut out, &frame, "deviation level", "final state w");
    for th in [1.0 / 3.0, 2.0 / 3.0] {
        out.push_str(&polyline(
            &[(0.0, th), (x_max, th)],
            &frame,
            COLOR_THRESHOLD,
            Some("4 3"),
        ));
    }
    for r in &results.records {
        let w = r.final_w[dev];
        let expected = bits[r.combination] == 1;
        let read = crate::circuit_sim::threshold_logic(w);
        let ok = read
            == if expected {
                crate::circuit_sim::Trit::One
            } else {
                crate::circuit_sim::Trit::Zero
            };
        let color = if ok { COLOR_OK } else { COLOR_BAD };
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{color}\" fill-opacity=\"0.7\"/>",
            frame.x(r.level),
            frame.y(w)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// CSV twin of the scatter figure.
pub fn scatter_csv(bundle: &ValidatedBundle, results: &DeviationResults, output: &str) -> String {
    let cfg = &bundle.config;
    let dev = cfg.device_index(output).expect("validated output");
    let bits = &cfg.output_states[output];
    let mut out = String::from("level,combination,corner_mask,final_w,expected,correct\n");
    for r in &results.records {
        let w = r.final_w[dev];
        let expected = bits[r.combination];
        let read = crate::circuit_sim::threshold_logic(w);
        let ok = read
            == if expected == 1 {
                crate::circuit_sim::Trit::One
            } else {
                crate::circuit_sim::Trit::Zero
            };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.level,
            r.combination,
            r.corner_mask,
            w,
            expected,
            if ok { 1 } else { 0 }
        );
    }
    out
}

/// Range figure: per output and expected logic value, the min/max state band
/// over increasing deviation, plus the read-out thresholds.
pub fn plot_deviation_range(table: &RangeTable) -> String {
    let x_max = table.rows.iter().map(|r| r.level).fold(0.0, f64::max).max(1e-9);
    let frame = Frame {
        x_min: 0.0,
        x_max,
        y_min: 0.0,
        y_max: 1.0,
    };
    let mut out = svg_open("output state ranges vs deviation");
    svg_axes(&mut out, &frame, "deviation level", "final state w");
    for th in [1.0 / 3.0, 2.0 / 3.0] {
        out.push_str(&polyline(
            &[(0.0, th), (x_max, th)],
            &frame,
            COLOR_THRESHOLD,
            Some("4 3"),
        ));
    }
    let mut series: Vec<(String, u8)> = table
        .rows
        .iter()
        .map(|r| (r.output.clone(), r.expected))
        .collect();
    series.dedup();
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut legend_y = MARGIN_T + 12.0;
    for (idx, (output, expected)) in series.iter().enumerate() {
        let color = palette[idx % palette.len()];
        let rows: Vec<_> = table
            .rows
            .iter()
            .filter(|r| &r.output == output && r.expected == *expected)
            .collect();
        let mins: Vec<(f64, f64)> = rows.iter().map(|r| (r.level, r.min_w)).collect();
        let maxs: Vec<(f64, f64)> = rows.iter().map(|r| (r.level, r.max_w)).collect();
        let mut band: Vec<String> = maxs
            .iter()
            .map(|(x, y)| format!("{},{}", frame.x(*x), frame.y(*y)))
            .collect();
        band.extend(
            mins.iter()
                .rev()
                .map(|(x, y)| format!("{},{}", frame.x(*x), frame.y(*y))),
        );
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.25\" stroke=\"none\"/>",
            band.join(" ")
        );
        out.push_str(&polyline(&mins, &frame, color, None));
        out.push_str(&polyline(&maxs, &frame, color, None));
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{legend_y}\" fill=\"{color}\">{output} (expected {expected})</text>",
            WIDTH - MARGIN_R - 160.0
        );
        legend_y += 14.0;
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle;
    use crate::circuit_sim::TransientOptions;
    use crate::deviation::{evaluate_deviation, summarize_ranges, DeviationGrid};
    use crate::spec_io::load_bundled;

    fn small_results() -> (crate::spec_io::ValidatedBundle, DeviationResults) {
        let b = load_bundled(&bundle::BUNDLED_ALGORITHMS[3]).unwrap();
        let opts = TransientOptions {
            substeps_per_cycle: 300,
            record_trace: false,
        };
        let results = evaluate_deviation(&b, &DeviationGrid::new(0.2, 0.2), &opts).unwrap();
        (b, results)
    }

    #[test]
    fn figures_are_wellformed_and_deterministic() {
        let (b, results) = small_results();
        let svg1 = plot_deviation_scatter(&b, &results, "w4");
        let svg2 = plot_deviation_scatter(&b, &results, "w4");
        assert_eq!(svg1, svg2);
        assert!(svg1.starts_with("<svg "));
        assert!(svg1.ends_with("</svg>\n"));
        // one marker per record
        assert_eq!(svg1.matches("<circle").count(), results.records.len());

        let table = summarize_ranges(&b, &results);
        let range_svg = plot_deviation_range(&table);
        assert!(range_svg.contains("<polygon"));
        assert!(range_svg.ends_with("</svg>\n"));
    }

    #[test]
    fn waveform_band_and_csv_twin() {
        let times = vec![0.0, 1.0, 2.0];
        let nominal = vec![0.0, 0.5, 1.0];
        let lo = vec![0.0, 0.4, 0.9];
        let hi = vec![0.0, 0.6, 1.0];
        let svg = plot_waveforms_with_deviation("w6", 0.2, &times, &nominal, &lo, &hi);
        assert!(svg.contains("<polygon") && svg.contains("<polyline"));
        let csv = waveform_csv(&times, &nominal, &lo, &hi);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("time,nominal_w,min_w,max_w\n"));
    }

    #[test]
    fn scatter_csv_marks_incorrect() {
        let (b, results) = small_results();
        let csv = scatter_csv(&b, &results, "w4");
        assert_eq!(csv.lines().count(), 1 + results.records.len());
        // nominal runs of a functionally correct adder are all correct
        for line in csv.lines().skip(1).take(8) {
            assert!(line.ends_with(",1"), "{line}");
        }
    }
}
