//! Cross-file validation: ties a configuration, a topology structure, an
//! algorithm program and the electrical parameters together and checks the
//! constraints that no single file can express on its own.

use crate::error::SpecError;
use crate::spec_io::algorithm::{AlgorithmProgram, SectionOp};
use crate::spec_io::config::ConfigSpec;
use crate::spec_io::params::ImplyParameters;
use crate::spec_io::topology::TopologySpec;

/// Everything needed to run an algorithm, checked for mutual consistency.
#[derive(Debug, Clone)]
pub struct ValidatedBundle {
    pub config: ConfigSpec,
    pub topology: TopologySpec,
    pub program: AlgorithmProgram,
    pub params: ImplyParameters,
    /// Memristor index (configuration order) -> topology section index.
    pub device_section: Vec<usize>,
}

impl ValidatedBundle {
    pub fn n_devices(&self) -> usize {
        self.config.memristors.len()
    }

    pub fn section_of_device(&self, device: usize) -> usize {
        self.device_section[device]
    }

    /// Largest ground resistance across all sections (worst case for the
    /// reset-rate calibration).
    pub fn max_r_g(&self) -> f64 {
        self.topology
            .sections
            .iter()
            .map(|s| s.r_g)
            .fold(0.0, f64::max)
    }

    /// Calibrated switching rates for this topology.
    pub fn switching_rates(&self) -> (f64, f64) {
        self.params.switching_rates(self.max_r_g())
    }
}

pub fn cross_validate(
    config: ConfigSpec,
    topology: TopologySpec,
    program: AlgorithmProgram,
    params: ImplyParameters,
) -> Result<ValidatedBundle, SpecError> {
    if config.topology_name != topology.name {
        return Err(SpecError::TopologyMismatch(format!(
            "config targets topology `{}` but the structure file describes `{}`",
            config.topology_name, topology.name
        )));
    }
    if program.section_count != topology.section_count() {
        return Err(SpecError::TopologyMismatch(format!(
            "algorithm has {} section column(s), topology has {}",
            program.section_count,
            topology.section_count()
        )));
    }
    if config.steps != program.steps.len() {
        return Err(SpecError::StepCountMismatch {
            config: config.steps,
            program: program.steps.len(),
        });
    }

    // Every configured memristor must sit in exactly one section and vice
    // versa: the two files must agree on the device population.
    let mut device_section = Vec::with_capacity(config.memristors.len());
    for name in &config.memristors {
        match topology.section_of(name) {
            Some(sec) => device_section.push(sec),
            None => {
                return Err(SpecError::TopologyMismatch(format!(
                    "memristor `{name}` is configured but absent from the topology"
                )))
            }
        }
    }
    for sec in &topology.sections {
        for name in &sec.memristors {
            if !config.memristors.contains(name) {
                return Err(SpecError::TopologyMismatch(format!(
                    "topology memristor `{name}` is not declared in the configuration"
                )));
            }
        }
    }

    if let Some(max) = program.max_device_index() {
        if max >= config.memristors.len() {
            return Err(SpecError::IndexOutOfRange {
                device: max,
                count: config.memristors.len(),
            });
        }
    }

    // Every memristor needs its series switch declared; every declared switch
    // must exist in the topology wiring.
    let available = topology.available_switches();
    for name in &config.memristors {
        let sw = TopologySpec::device_switch_name(name);
        if !config.switches.contains(&sw) {
            return Err(SpecError::UndeclaredSwitch(sw));
        }
    }
    for sw in &config.switches {
        if !available.contains(sw) {
            return Err(SpecError::TopologyMismatch(format!(
                "configured switch `{sw}` does not exist in the topology"
            )));
        }
    }

    // Section discipline per operation. An IMPLY is written in its target's
    // column; a cross-section source requires the bridge switch and leaves its
    // own column idle, since closing the bridge merges the two shared nodes.
    for (step_idx, step) in program.steps.iter().enumerate() {
        for (slot, op) in step.iter().enumerate() {
            match op {
                SectionOp::Nop => {}
                SectionOp::False(targets) => {
                    for t in targets {
                        if device_section[*t] != slot {
                            return Err(SpecError::TopologyMismatch(format!(
                                "step {}: FALSE target {t} lies in section {}, not {slot}",
                                step_idx + 1,
                                device_section[*t]
                            )));
                        }
                    }
                }
                SectionOp::Imply { src, dst } => {
                    if device_section[*dst] != slot {
                        return Err(SpecError::TopologyMismatch(format!(
                            "step {}: IMPLY target {dst} lies in section {}, not {slot}",
                            step_idx + 1,
                            device_section[*dst]
                        )));
                    }
                    let src_sec = device_section[*src];
                    if src_sec != slot {
                        if !matches!(step[src_sec], SectionOp::Nop) {
                            return Err(SpecError::TopologyMismatch(format!(
                                "step {}: section {src_sec} must be idle while it lends \
                                 memristor {src} to section {slot}",
                                step_idx + 1
                            )));
                        }
                        let bridge = topology.inter_switch(src_sec, slot).ok_or_else(|| {
                            SpecError::TopologyMismatch(format!(
                                "step {}: no inter-section switch between sections \
                                 {src_sec} and {slot}",
                                step_idx + 1
                            ))
                        })?;
                        if !config.switches.contains(&bridge.name) {
                            return Err(SpecError::UndeclaredSwitch(bridge.name.clone()));
                        }
                    }
                }
            }
        }
    }

    // A logic-1 source must keep holding its target below v_on in every
    // section; this depends on R_G and so is checked here.
    for sec in &topology.sections {
        params.check_hold_condition(sec.r_g)?;
    }

    Ok(ValidatedBundle {
        config,
        topology,
        program,
        params,
        device_section,
    })
}
