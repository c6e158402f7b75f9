//! Compilation of a validated algorithm into drive waveforms.
//!
//! Every step occupies one cycle. Within a step each memristor is either
//! floating (its series switch open) or driven at one of the three rail
//! voltages: V_SET for an IMPLY target, V_COND for an IMPLY source, V_RESET
//! for a FALSE target. Inter-section bridge switches close only for the steps
//! whose IMPLY borrows a device from another section.

use crate::error::SpecError;
use crate::spec_io::{ImplyParameters, SectionOp, ValidatedBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveLevel {
    Floating,
    Set,
    Cond,
    Reset,
}

impl DriveLevel {
    /// Rail voltage for this level, `None` when floating.
    pub fn voltage(self, params: &ImplyParameters) -> Option<f64> {
        match self {
            DriveLevel::Floating => None,
            DriveLevel::Set => Some(params.v_set),
            DriveLevel::Cond => Some(params.v_cond),
            DriveLevel::Reset => Some(params.v_reset),
        }
    }
}

/// Drive state for one cycle: one level per memristor (configuration order)
/// and one closed/open flag per declared switch (configuration order).
#[derive(Debug, Clone, PartialEq)]
pub struct StepWaveform {
    pub drives: Vec<DriveLevel>,
    pub switches: Vec<bool>,
}

/// The whole drive schedule: one [`StepWaveform`] per algorithm step.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformSchedule {
    pub steps: Vec<StepWaveform>,
    pub cycle_time: f64,
}

impl WaveformSchedule {
    pub fn total_time(&self) -> f64 {
        self.cycle_time * self.steps.len() as f64
    }
}

/// Compile the algorithm into its drive schedule.
pub fn eval_algo(bundle: &ValidatedBundle) -> WaveformSchedule {
    let cfg = &bundle.config;
    let n_dev = cfg.memristors.len();
    let switch_index = |name: &str| -> usize {
        cfg.switches
            .iter()
            .position(|s| s == name)
            .expect("cross-validated switch")
    };
    let mut steps = Vec::with_capacity(bundle.program.steps.len());
    for step in &bundle.program.steps {
        let mut drives = vec![DriveLevel::Floating; n_dev];
        let mut switches = vec![false; cfg.switches.len()];
        for (slot, op) in step.iter().enumerate() {
            match op {
                SectionOp::Nop => {}
                SectionOp::False(targets) => {
                    for t in targets {
                        drives[*t] = DriveLevel::Reset;
                        switches[switch_index(&device_switch(cfg, *t))] = true;
                    }
                }
                SectionOp::Imply { src, dst } => {
                    drives[*src] = DriveLevel::Cond;
                    drives[*dst] = DriveLevel::Set;
                    switches[switch_index(&device_switch(cfg, *src))] = true;
                    switches[switch_index(&device_switch(cfg, *dst))] = true;
                    let src_sec = bundle.section_of_device(*src);
                    if src_sec != slot {
                        let bridge = bundle
                            .topology
                            .inter_switch(src_sec, slot)
                            .expect("cross-validated bridge");
                        switches[switch_index(&bridge.name)] = true;
                    }
                }
            }
        }
        steps.push(StepWaveform { drives, switches });
    }
    WaveformSchedule {
        steps,
        cycle_time: bundle.params.cycle_time,
    }
}

fn device_switch(cfg: &crate::spec_io::ConfigSpec, device: usize) -> String {
    crate::spec_io::TopologySpec::device_switch_name(&cfg.memristors[device])
}

/// Format a number the way the CSV stores it: `NaN` for a floating drive,
/// shortest-roundtrip decimal otherwise.
fn fmt_cell(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

/// Render the schedule as a piecewise-constant CSV: columns `time`, one
/// `V(<memristor>)` per device (NaN while floating), one `<switch>` column
/// per declared switch (0/1); two rows per step so plotting the rows directly
/// draws the square waveform.
pub fn write_pwm_csv(bundle: &ValidatedBundle, schedule: &WaveformSchedule) -> String {
    let cfg = &bundle.config;
    let mut out = String::new();
    let mut header = vec!["time".to_string()];
    header.extend(cfg.memristors.iter().map(|m| format!("V({m})")));
    header.extend(cfg.switches.iter().cloned());
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, step) in schedule.steps.iter().enumerate() {
        for t in [
            i as f64 * schedule.cycle_time,
            (i + 1) as f64 * schedule.cycle_time,
        ] {
            let mut row = vec![fmt_cell(t)];
            for d in &step.drives {
                row.push(fmt_cell(d.voltage(&bundle.params).unwrap_or(f64::NAN)));
            }
            for sw in &step.switches {
                row.push(if *sw { "1".into() } else { "0".into() });
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    out
}

/// Numeric table read back from a PWM CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct PwmTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl PwmTable {
    /// Render back to CSV text; `parse` then `render` reproduces the file
    /// byte for byte.
    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| {
                    if v.is_nan() {
                        "NaN".to_string()
                    } else if *v == v.trunc() && v.abs() < 2.0 {
                        // switch columns and integer cells round-trip as 0/1
                        format!("{}", *v as i64)
                    } else {
                        format!("{v}")
                    }
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Parse a PWM CSV produced by [`write_pwm_csv`].
pub fn read_pwm_csv(text: &str) -> Result<PwmTable, SpecError> {
    let mut lines = text.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| SpecError::Json("empty PWM CSV".into()))?;
    let header: Vec<String> = header_line.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(header.len());
        for cell in line.split(',') {
            let v = if cell == "NaN" {
                f64::NAN
            } else {
                cell.parse::<f64>().map_err(|_| {
                    SpecError::Json(format!("PWM CSV row {}: bad number `{cell}`", idx + 2))
                })?
            };
            row.push(v);
        }
        if row.len() != header.len() {
            return Err(SpecError::Json(format!(
                "PWM CSV row {}: expected {} columns, got {}",
                idx + 2,
                header.len(),
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok(PwmTable { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle;
    use crate::spec_io::load_bundled;

    #[test]
    fn imply_step_drives_and_switches() {
        let b = load_bundled(&bundle::BUNDLED_ALGORITHMS[0]).unwrap();
        let sched = eval_algo(&b);
        // Step 3 of the serial adder is I0,3 (a implies w1).
        let step = &sched.steps[2];
        assert_eq!(step.drives[0], DriveLevel::Cond);
        assert_eq!(step.drives[3], DriveLevel::Set);
        assert!(step.drives[1..3]
            .iter()
            .chain(&step.drives[4..])
            .all(|d| *d == DriveLevel::Floating));
        let closed: Vec<&str> = b
            .config
            .switches
            .iter()
            .zip(&step.switches)
            .filter(|(_, on)| **on)
            .map(|(s, _)| s.as_str())
            .collect();
        assert_eq!(closed, vec!["sa", "sw1"]);
    }

    #[test]
    fn cross_section_step_closes_bridge() {
        let b = load_bundled(&bundle::BUNDLED_ALGORITHMS[1]).unwrap();
        let sched = eval_algo(&b);
        // Step 6 of the semi-serial adder is `NOP | I1,5` (b implies w3).
        let step = &sched.steps[5];
        let closed: Vec<&str> = b
            .config
            .switches
            .iter()
            .zip(&step.switches)
            .filter(|(_, on)| **on)
            .map(|(s, _)| s.as_str())
            .collect();
        assert_eq!(closed, vec!["sb", "sw3", "sx01"]);
    }

    #[test]
    fn reset_step_drives_v_reset() {
        let b = load_bundled(&bundle::BUNDLED_ALGORITHMS[0]).unwrap();
        let sched = eval_algo(&b);
        // Step 1 is F3,4,5.
        let step = &sched.steps[0];
        for d in [3, 4, 5] {
            assert_eq!(step.drives[d], DriveLevel::Reset);
            assert_eq!(step.drives[d].voltage(&b.params), Some(b.params.v_reset));
        }
    }

    #[test]
    fn schedule_length_and_duration() {
        let b = load_bundled(&bundle::BUNDLED_ALGORITHMS[0]).unwrap();
        let sched = eval_algo(&b);
        assert_eq!(sched.steps.len(), 23);
        assert!((sched.total_time() - 23.0 * 30e-6).abs() < 1e-18);
    }

    #[test]
    fn pwm_csv_roundtrip_is_byte_identical() {
        for bundled in &bundle::BUNDLED_ALGORITHMS {
            let b = load_bundled(bundled).unwrap();
            let sched = eval_algo(&b);
            let csv = write_pwm_csv(&b, &sched);
            let table = read_pwm_csv(&csv).unwrap();
            assert_eq!(table.render(), csv, "{}", bundled.name);
            assert_eq!(table.rows.len(), 2 * sched.steps.len());
        }
    }

    #[test]
    fn floating_devices_read_back_as_nan() {
        let b = load_bundled(&bundle::BUNDLED_ALGORITHMS[0]).unwrap();
        let sched = eval_algo(&b);
        let table = read_pwm_csv(&write_pwm_csv(&b, &sched)).unwrap();
        // Step 3 = I0,3: memristor b (column index 2) floats.
        assert!(table.rows[4][2].is_nan());
        assert_eq!(table.rows[4][1], b.params.v_cond);
    }
}
