//! Idealised boolean device model.
//!
//! Each memristor carries one bit; IMPLY maps the target to `!src | dst` and
//! FALSE resets its targets. Evaluation is vectorised: one `u64` per device
//! holds the state under every input combination at once (bit `k` =
//! combination `k`), so a step is a couple of bitwise operations regardless of
//! how many combinations there are.

use std::fmt::Write as _;

use crate::spec_io::{SectionOp, ValidatedBundle};

/// Per-device state across all input combinations; bit `k` of `masks[d]` is
/// the state of memristor `d` under combination `k` (first-listed input most
/// significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorState {
    pub n_combinations: usize,
    pub masks: Vec<u64>,
}

impl VectorState {
    /// Initial state: inputs loaded with their combination bit, work
    /// memristors reset.
    pub fn initial(bundle: &ValidatedBundle) -> Self {
        let cfg = &bundle.config;
        let n_comb = cfg.n_combinations();
        assert!(n_comb <= 64, "vectorised model supports up to 6 inputs");
        let mut masks = vec![0u64; cfg.memristors.len()];
        for (pos, name) in cfg.inputs.iter().enumerate() {
            let dev = cfg.device_index(name).expect("validated input");
            for k in 0..n_comb {
                if cfg.input_bit(k, pos) {
                    masks[dev] |= 1 << k;
                }
            }
        }
        VectorState {
            n_combinations: n_comb,
            masks,
        }
    }

    fn comb_mask(&self) -> u64 {
        if self.n_combinations == 64 {
            u64::MAX
        } else {
            (1u64 << self.n_combinations) - 1
        }
    }

    /// Apply one algorithm step (all section slots) in place.
    pub fn apply_step(&mut self, step: &[SectionOp]) {
        let all = self.comb_mask();
        for op in step {
            match op {
                SectionOp::Imply { src, dst } => {
                    self.masks[*dst] = (!self.masks[*src] | self.masks[*dst]) & all;
                }
                SectionOp::False(targets) => {
                    for t in targets {
                        self.masks[*t] = 0;
                    }
                }
                SectionOp::Nop => {}
            }
        }
    }

    /// State of one device under one combination.
    pub fn bit(&self, device: usize, combination: usize) -> bool {
        (self.masks[device] >> combination) & 1 == 1
    }
}

/// Snapshot trail of the vectorised run: the initial state plus the state
/// after every step.
#[derive(Debug, Clone)]
pub struct StateHistory {
    pub initial: VectorState,
    pub after_step: Vec<VectorState>,
}

impl StateHistory {
    pub fn final_state(&self) -> &VectorState {
        self.after_step.last().unwrap_or(&self.initial)
    }
}

/// Run the whole algorithm over all input combinations at once.
pub fn calc_algorithm(bundle: &ValidatedBundle) -> StateHistory {
    let mut state = VectorState::initial(bundle);
    let mut after_step = Vec::with_capacity(bundle.program.steps.len());
    for step in &bundle.program.steps {
        state.apply_step(step);
        after_step.push(state.clone());
    }
    StateHistory {
        initial: VectorState::initial(bundle),
        after_step,
    }
}

/// Scalar reference evaluation of a single combination; exists to check the
/// vectorised path against.
pub fn calc_algorithm_scalar(bundle: &ValidatedBundle, combination: usize) -> Vec<bool> {
    let cfg = &bundle.config;
    let mut states = vec![false; cfg.memristors.len()];
    for (pos, name) in cfg.inputs.iter().enumerate() {
        let dev = cfg.device_index(name).expect("validated input");
        states[dev] = cfg.input_bit(combination, pos);
    }
    for step in &bundle.program.steps {
        for op in step {
            match op {
                SectionOp::Imply { src, dst } => states[*dst] |= !states[*src],
                SectionOp::False(targets) => {
                    for t in targets {
                        states[*t] = false;
                    }
                }
                SectionOp::Nop => {}
            }
        }
    }
    states
}

/// One disagreement between the computed truth table and the declared one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub output: String,
    pub combination: usize,
    pub expected: bool,
    pub got: bool,
}

/// Functional verdict for a validated bundle.
#[derive(Debug, Clone)]
pub struct FunctionalCheck {
    pub mismatches: Vec<Mismatch>,
}

impl FunctionalCheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare the computed final states against `output_states` in the
/// configuration.
pub fn check_equivalence(bundle: &ValidatedBundle, history: &StateHistory) -> FunctionalCheck {
    let cfg = &bundle.config;
    let final_state = history.final_state();
    let mut mismatches = Vec::new();
    for (output, expected_bits) in &cfg.output_states {
        let dev = cfg.device_index(output).expect("validated output");
        for (k, expected) in expected_bits.iter().enumerate() {
            let expected = *expected == 1;
            let got = final_state.bit(dev, k);
            if got != expected {
                mismatches.push(Mismatch {
                    output: output.clone(),
                    combination: k,
                    expected,
                    got,
                });
            }
        }
    }
    FunctionalCheck { mismatches }
}

/// Render the step-by-step state trail as the `State_History.txt` table: one
/// block per input combination, one row per step, one column per memristor.
pub fn render_state_history(bundle: &ValidatedBundle, history: &StateHistory) -> String {
    let cfg = &bundle.config;
    let mut out = String::new();
    let names = cfg.memristors.join(" ");
    for k in 0..history.initial.n_combinations {
        let input_bits: String = (0..cfg.n_inputs())
            .map(|p| if cfg.input_bit(k, p) { '1' } else { '0' })
            .collect();
        let _ = writeln!(out, "combination {input_bits}");
        let _ = writeln!(out, "step {names}");
        let row = |state: &VectorState| -> String {
            (0..cfg.memristors.len())
                .map(|d| if state.bit(d, k) { "1" } else { "0" })
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(out, "init {}", row(&history.initial));
        for (i, state) in history.after_step.iter().enumerate() {
            let _ = writeln!(out, "{} {}", i + 1, row(state));
        }
        out.push('\n');
    }
    out
}
