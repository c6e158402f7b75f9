//! Transient simulation of the IMPLY crossbar.
//!
//! Device model: threshold drift. The internal state w in [0, 1] maps
//! linearly to resistance, R(w) = R_off + w (R_on - R_off), and moves only
//! while the device voltage exceeds `v_on` (toward 1) or falls below `v_off`
//! (toward 0):
//!
//!   dw/dt =  k_on  ((v - v_on)  / v_on)^alpha   for v >= v_on
//!   dw/dt = -k_off ((v - v_off) / v_off)^alpha  for v <= v_off
//!   dw/dt = 0 otherwise
//!
//! Circuit model: within a step every operation forms one star node — the
//! driven devices of that operation plus the executing section's ground
//! resistor. Floating devices see no current. The node voltage follows from
//! a single nodal equation, and the state is advanced with fixed-step forward
//! Euler, substeps aligned to cycle boundaries.

use crate::control_logic::WaveformSchedule;
use crate::error::SimError;
use crate::spec_io::{SectionOp, ValidatedBundle};

/// Drift rate of the state variable at device voltage `v`.
pub fn dwdt(v: f64, v_on: f64, v_off: f64, alpha: f64, k_on: f64, k_off: f64) -> f64 {
    if v >= v_on {
        k_on * ((v - v_on) / v_on).powf(alpha)
    } else if v <= v_off {
        -k_off * ((v - v_off) / v_off).powf(alpha)
    } else {
        0.0
    }
}

/// Voltage of a star node: driven branches `(drive voltage, resistance)` plus
/// a ground resistor `r_g`.
pub fn solve_section_node(driven: &[(f64, f64)], r_g: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 1.0 / r_g;
    for (v, r) in driven {
        num += v / r;
        den += 1.0 / r;
    }
    num / den
}

/// Ternary read-out of a final state value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trit {
    Zero,
    One,
    Undefined,
}

/// Threshold read-out: 1 above 2/3, 0 below 1/3, undefined in between.
pub fn threshold_logic(w: f64) -> Trit {
    if w >= 2.0 / 3.0 {
        Trit::One
    } else if w <= 1.0 / 3.0 {
        Trit::Zero
    } else {
        Trit::Undefined
    }
}

#[derive(Debug, Clone)]
pub struct TransientOptions {
    /// Euler substeps per algorithm cycle.
    pub substeps_per_cycle: usize,
    /// Record a decimated state trace (for plots) when set.
    pub record_trace: bool,
}

impl Default for TransientOptions {
    fn default() -> Self {
        TransientOptions {
            substeps_per_cycle: 1000,
            record_trace: false,
        }
    }
}

/// Decimated state trace: `states[i]` holds every device's w at `times[i]`.
#[derive(Debug, Clone, Default)]
pub struct TransientTrace {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// Energy dissipated in the resistive elements, split per step. Because every
/// branch hangs off one driven star node, this equals the energy delivered by
/// the sources.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub per_step: Vec<f64>,
    pub total: f64,
}

#[derive(Debug, Clone)]
pub struct TransientResult {
    pub final_w: Vec<f64>,
    pub energy: EnergyReport,
    pub trace: Option<TransientTrace>,
}

/// Initial state for one input combination: inputs at their logic level,
/// work memristors fully reset.
pub fn nominal_initial_w(bundle: &ValidatedBundle, combination: usize) -> Vec<f64> {
    let cfg = &bundle.config;
    let mut w = vec![0.0; cfg.memristors.len()];
    for (pos, name) in cfg.inputs.iter().enumerate() {
        if cfg.input_bit(combination, pos) {
            w[cfg.device_index(name).expect("validated input")] = 1.0;
        }
    }
    w
}

/// Integrate the algorithm from `initial_w`.
pub fn run_transient(
    bundle: &ValidatedBundle,
    initial_w: &[f64],
    opts: &TransientOptions,
) -> Result<TransientResult, SimError> {
    let params = &bundle.params;
    let (k_on, k_off) = bundle.switching_rates();
    let m = &params.model;
    let n_sub = opts.substeps_per_cycle.max(1);
    let dt = params.cycle_time / n_sub as f64;
    let trace_stride = (n_sub / 50).max(1);

    let mut w = initial_w.to_vec();
    let mut trace = opts.record_trace.then(TransientTrace::default);
    if let Some(tr) = trace.as_mut() {
        tr.times.push(0.0);
        tr.states.push(w.clone());
    }

    let mut per_step = Vec::with_capacity(bundle.program.steps.len());
    for (step_idx, step) in bundle.program.steps.iter().enumerate() {
        // (devices, drive voltages, r_g) for every operation in this step.
        let mut nodes: Vec<(Vec<usize>, Vec<f64>, f64)> = Vec::new();
        for (slot, op) in step.iter().enumerate() {
            let r_g = bundle.topology.sections[slot].r_g;
            match op {
                SectionOp::Nop => {}
                SectionOp::False(targets) => {
                    nodes.push((
                        targets.clone(),
                        vec![params.v_reset; targets.len()],
                        r_g,
                    ));
                }
                SectionOp::Imply { src, dst } => {
                    nodes.push((vec![*src, *dst], vec![params.v_cond, params.v_set], r_g));
                }
            }
        }

        let mut step_energy = 0.0;
        for sub in 0..n_sub {
            for (devices, drives, r_g) in &nodes {
                let branches: Vec<(f64, f64)> = devices
                    .iter()
                    .zip(drives)
                    .map(|(d, v)| (*v, params.resistance(w[*d])))
                    .collect();
                let v_g = solve_section_node(&branches, *r_g);
                if !v_g.is_finite() {
                    return Err(SimError::NumericalBlowup {
                        time: (step_idx * n_sub + sub) as f64 * dt,
                        context: format!("node voltage in step {}", step_idx + 1),
                    });
                }
                step_energy += v_g * v_g / r_g * dt;
                for ((d, v), (_, r)) in devices.iter().zip(drives).zip(&branches) {
                    let v_dev = *v - v_g;
                    step_energy += v_dev * v_dev / r * dt;
                    let rate = dwdt(v_dev, m.v_on, m.v_off, m.alpha, k_on, k_off);
                    w[*d] = (w[*d] + rate * dt).clamp(0.0, 1.0);
                }
            }
            if let Some(tr) = trace.as_mut() {
                if (sub + 1) % trace_stride == 0 || sub + 1 == n_sub {
                    tr.times
                        .push((step_idx as f64 + (sub + 1) as f64 / n_sub as f64)
                            * params.cycle_time);
                    tr.states.push(w.clone());
                }
            }
        }
        per_step.push(step_energy);
    }

    let total = per_step.iter().sum();
    Ok(TransientResult {
        final_w: w,
        energy: EnergyReport { per_step, total },
        trace,
    })
}

/// Read every configured output of a final state and compare against the
/// declared truth table; undefined read-outs count as incorrect.
pub fn outputs_correct(bundle: &ValidatedBundle, combination: usize, final_w: &[f64]) -> bool {
    let cfg = &bundle.config;
    cfg.output_states.iter().all(|(output, bits)| {
        let dev = cfg.device_index(output).expect("validated output");
        let expected = if bits[combination] == 1 {
            Trit::One
        } else {
            Trit::Zero
        };
        threshold_logic(final_w[dev]) == expected
    })
}

/// Export the circuit as a SPICE netlist: a behavioural memristor
/// subcircuit, one instance per device behind its series switch, section
/// ground resistors, inter-section bridge switches and PWL drive sources
/// following the schedule.
pub fn export_netlist(bundle: &ValidatedBundle, schedule: &WaveformSchedule) -> String {
    let cfg = &bundle.config;
    let p = &bundle.params;
    let (k_on, k_off) = bundle.switching_rates();
    let m = &p.model;
    let t_step = schedule.cycle_time;
    let mut out = String::new();
    out.push_str("* IMPLY crossbar transient netlist\n");
    out.push_str(&format!(
        ".param ron={} roff={} von={} voff={} alpha={} kon={} koff={}\n",
        p.r_on, p.r_off, m.v_on, m.v_off, m.alpha, k_on, k_off
    ));
    out.push_str(".model swmod sw vt=0.5 ron=1 roff=1e12\n");
    out.push_str("\n* threshold memristor: state w integrates the drift rate\n");
    out.push_str(".subckt memristor p n w0=0\n");
    out.push_str("Cw w 0 1 ic={w0}\n");
    out.push_str(
        "Bw 0 w I=-(V(p,n) >= von ? kon*pwr((V(p,n)-von)/von,alpha) : \
         V(p,n) <= voff ? -koff*pwr((V(p,n)-voff)/voff,alpha) : 0)\n",
    );
    out.push_str("Rw w 0 1e12\n");
    out.push_str("Bm p n I=V(p,n)/(roff+limit(V(w),0,1)*(ron-roff))\n");
    out.push_str(".ends memristor\n\n");

    // One instance per memristor: drive node -> series switch -> device ->
    // section node; one ground resistor per section.
    for (i, name) in cfg.memristors.iter().enumerate() {
        let sec = bundle.section_of_device(i);
        out.push_str(&format!(
            "Xm_{name} sw_{name} node{sec} memristor w0=0\n"
        ));
        out.push_str(&format!(
            "Ss{name} drv_{name} sw_{name} ctl_s{name} 0 swmod\n"
        ));
    }
    for (sec, section) in bundle.topology.sections.iter().enumerate() {
        out.push_str(&format!("Rg{sec} node{sec} 0 {}\n", section.r_g));
    }
    for bridge in &bundle.topology.inter_section_switches {
        let [a, b] = bridge.sections;
        out.push_str(&format!(
            "Sx{name} node{a} node{b} ctl_{name} 0 swmod\n",
            name = bridge.name
        ));
    }
    out.push('\n');

    // PWL sources: device drive voltages and switch control signals.
    let pwl = |values: &[f64]| -> String {
        let mut pts = Vec::new();
        for (i, v) in values.iter().enumerate() {
            pts.push(format!("{} {v}", i as f64 * t_step));
            pts.push(format!("{} {v}", (i + 1) as f64 * t_step - t_step * 1e-6));
        }
        pts.join(" ")
    };
    for (i, name) in cfg.memristors.iter().enumerate() {
        let levels: Vec<f64> = schedule
            .steps
            .iter()
            .map(|s| s.drives[i].voltage(p).unwrap_or(0.0))
            .collect();
        out.push_str(&format!("Vd_{name} drv_{name} 0 PWL({})\n", pwl(&levels)));
    }
    for (j, sw_name) in cfg.switches.iter().enumerate() {
        let levels: Vec<f64> = schedule
            .steps
            .iter()
            .map(|s| if s.switches[j] { 1.0 } else { 0.0 })
            .collect();
        out.push_str(&format!("Vc_{sw_name} ctl_{sw_name} 0 PWL({})\n", pwl(&levels)));
    }
    out.push('\n');
    out.push_str(&format!(
        ".tran {} {}\n",
        t_step / 1000.0,
        t_step * schedule.steps.len() as f64
    ));
    out.push_str(".end\n");
    out
}

/// Structural sanity check of a netlist: comment first line, balanced
/// subcircuit definitions, known element prefixes, unique element names and a
/// final `.end`.
pub fn lint_netlist(text: &str) -> Result<(), String> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.starts_with('*') => {}
        _ => return Err("first line must be a comment title".into()),
    }
    let mut subckt_depth = 0usize;
    let mut saw_end = false;
    let mut names: Vec<String> = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if saw_end && !line.is_empty() {
            return Err(format!("line {}: content after .end", idx + 1));
        }
        if line.is_empty() || line.starts_with('*') {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if let Some(directive) = lower.strip_prefix('.') {
            let word = directive.split_whitespace().next().unwrap_or("");
            match word {
                "subckt" => subckt_depth += 1,
                "ends" => {
                    subckt_depth = subckt_depth
                        .checked_sub(1)
                        .ok_or_else(|| format!("line {}: unmatched .ends", idx + 1))?;
                }
                "end" => saw_end = true,
                "param" | "model" | "tran" | "ic" | "options" | "func" => {}
                other => return Err(format!("line {}: unknown directive .{other}", idx + 1)),
            }
            continue;
        }
        let prefix = lower.chars().next().unwrap();
        if !"rcvibsxg".contains(prefix) {
            return Err(format!("line {}: unknown element prefix `{prefix}`", idx + 1));
        }
        let name = lower.split_whitespace().next().unwrap().to_string();
        let scoped = format!("{subckt_depth}:{name}");
        if names.contains(&scoped) {
            return Err(format!("line {}: duplicate element name `{name}`", idx + 1));
        }
        names.push(scoped);
        if line.split_whitespace().count() < 3 {
            return Err(format!("line {}: element with fewer than 2 nodes", idx + 1));
        }
        if let Some(start) = lower.find("pwl(") {
            let args = lower[start + 4..]
                .split(')')
                .next()
                .ok_or_else(|| format!("line {}: unterminated PWL", idx + 1))?;
            let values: Result<Vec<f64>, _> =
                args.split_whitespace().map(str::parse::<f64>).collect();
            let values =
                values.map_err(|_| format!("line {}: non-numeric PWL point", idx + 1))?;
            if values.len() % 2 != 0 {
                return Err(format!("line {}: odd PWL point count", idx + 1));
            }
            let times: Vec<f64> = values.iter().step_by(2).copied().collect();
            if times.windows(2).any(|w| w[1] <= w[0]) {
                return Err(format!("line {}: PWL times not increasing", idx + 1));
            }
        }
    }
    if subckt_depth != 0 {
        return Err("unterminated .subckt".into());
    }
    if !saw_end {
        return Err("missing .end".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle;
    use crate::control_logic::eval_algo;
    use crate::spec_io::load_bundled;
    use crate::state_model;

    fn serial() -> ValidatedBundle {
        load_bundled(&bundle::BUNDLED_ALGORITHMS[0]).unwrap()
    }

    #[test]
    fn node_voltage_known_value() {
        // [DERIVED] (0.9/1e4 + 1.0/1e6) / (1/1e4 + 1/1e6 + 1/4e4)
        let v = solve_section_node(&[(0.9, 1e4), (1.0, 1e6)], 4e4);
        assert!((v - 0.7222222222222222).abs() < 1e-12);
    }

    #[test]
    fn node_satisfies_kcl() {
        let branches = [(0.9, 1e4), (1.0, 1e6), (-2.0, 5e4)];
        let r_g = 3e4;
        let v_g = solve_section_node(&branches, r_g);
        let residual: f64 =
            branches.iter().map(|(v, r)| (v - v_g) / r).sum::<f64>() - v_g / r_g;
        assert!(residual.abs() < 1e-12);
    }

    #[test]
    fn imply_gate_cases() {
        // Single-step programs exercising all four IMPLY input pairs.
        let b = serial();
        let mut gate = b.clone();
        gate.program = crate::spec_io::AlgorithmProgram::parse("I0,3", 1).unwrap();
        gate.config.steps = 1;
        let opts = TransientOptions::default();
        for (src_bit, dst_bit) in [(false, false), (false, true), (true, false), (true, true)] {
            let mut w0 = vec![0.0; 9];
            w0[0] = if src_bit { 1.0 } else { 0.0 };
            w0[3] = if dst_bit { 1.0 } else { 0.0 };
            let res = run_transient(&gate, &w0, &opts).unwrap();
            let expected_one = !src_bit | dst_bit;
            if expected_one {
                assert!(res.final_w[3] >= 0.9, "I({src_bit},{dst_bit}) -> {}", res.final_w[3]);
            } else {
                assert!(res.final_w[3] <= 0.1, "I({src_bit},{dst_bit}) -> {}", res.final_w[3]);
            }
        }
    }

    #[test]
    fn false_resets_below_5_percent() {
        let b = serial();
        let mut gate = b.clone();
        gate.program = crate::spec_io::AlgorithmProgram::parse("F3", 1).unwrap();
        gate.config.steps = 1;
        let mut w0 = vec![0.0; 9];
        w0[3] = 1.0;
        let res = run_transient(&gate, &w0, &TransientOptions::default()).unwrap();
        assert!(res.final_w[3] <= 0.05, "{}", res.final_w[3]);
    }

    #[test]
    fn transient_matches_state_model_on_all_combinations() {
        for bundled in &bundle::BUNDLED_ALGORITHMS {
            let b = load_bundled(bundled).unwrap();
            let history = state_model::calc_algorithm(&b);
            let check = state_model::check_equivalence(&b, &history);
            assert!(check.passed());
            for k in 0..b.config.n_combinations() {
                let w0 = nominal_initial_w(&b, k);
                let res = run_transient(&b, &w0, &TransientOptions::default()).unwrap();
                assert!(
                    outputs_correct(&b, k, &res.final_w),
                    "{} combination {k}: {:?}",
                    bundled.name,
                    res.final_w
                );
            }
        }
    }

    #[test]
    fn constant_resistance_energy_matches_closed_form() {
        // A FALSE on an already-reset device keeps R = R_off for the whole
        // cycle, so the source energy is V^2 T / (R_off + R_G).
        let b = serial();
        let mut gate = b.clone();
        gate.program = crate::spec_io::AlgorithmProgram::parse("F3", 1).unwrap();
        gate.config.steps = 1;
        let res = run_transient(&gate, &[0.0; 9], &TransientOptions::default()).unwrap();
        let p = &b.params;
        let r_g = b.topology.sections[0].r_g;
        let oracle = p.v_reset * p.v_reset * p.cycle_time / (p.r_off + r_g);
        assert!(
            (res.energy.total - oracle).abs() / oracle < 1e-3,
            "{} vs {}",
            res.energy.total,
            oracle
        );
    }

    #[test]
    fn substep_halving_converges() {
        let b = serial();
        let coarse = run_transient(
            &b,
            &nominal_initial_w(&b, 5),
            &TransientOptions {
                substeps_per_cycle: 1000,
                record_trace: false,
            },
        )
        .unwrap();
        let fine = run_transient(
            &b,
            &nominal_initial_w(&b, 5),
            &TransientOptions {
                substeps_per_cycle: 2000,
                record_trace: false,
            },
        )
        .unwrap();
        let max_diff = coarse
            .final_w
            .iter()
            .zip(&fine.final_w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-3, "{max_diff}");
    }

    #[test]
    fn trace_is_recorded_when_requested() {
        let b = serial();
        let res = run_transient(
            &b,
            &nominal_initial_w(&b, 0),
            &TransientOptions {
                substeps_per_cycle: 100,
                record_trace: true,
            },
        )
        .unwrap();
        let tr = res.trace.unwrap();
        assert_eq!(tr.times.len(), tr.states.len());
        assert!(tr.times.len() > b.program.steps.len());
        assert_eq!(*tr.times.last().unwrap(), 23.0 * b.params.cycle_time);
    }

    #[test]
    fn netlist_exports_and_lints() {
        for bundled in &bundle::BUNDLED_ALGORITHMS {
            let b = load_bundled(bundled).unwrap();
            let sched = eval_algo(&b);
            let netlist = export_netlist(&b, &sched);
            lint_netlist(&netlist).unwrap_or_else(|e| panic!("{}: {e}", bundled.name));
            assert!(netlist.contains(".subckt memristor"));
        }
    }

    #[test]
    fn lint_rejects_broken_netlists() {
        assert!(lint_netlist("Vd a 0 1\n.end\n").is_err()); // no title
        assert!(lint_netlist("* t\nVd a 0 1\n").is_err()); // missing .end
        assert!(lint_netlist("* t\n.subckt m a b\n.end\n").is_err()); // unterminated
        assert!(lint_netlist("* t\nQd a 0 1\n.end\n").is_err()); // bad prefix
        assert!(lint_netlist("* t\nVd a 0 1\nVd a 0 1\n.end\n").is_err()); // duplicate
    }
}
