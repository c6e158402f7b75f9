//! Shared helpers for the integration test suites: deterministic random
//! generation of well-formed single-section programs and synthetic bundles.

use rand::prelude::*;

use atomic::bundle;
use atomic::spec_io::{
    AlgorithmProgram, ConfigSpec, ImplyParameters, SectionOp, TopologySpec, ValidatedBundle,
};

pub const MAX_DEVICES: usize = 9;

/// A random well-formed single-section step over `n_devices` memristors.
pub fn random_step(rng: &mut StdRng, n_devices: usize) -> Vec<SectionOp> {
    let mut pool: Vec<usize> = (0..n_devices).collect();
    pool.shuffle(rng);
    let op = if rng.gen_bool(0.7) {
        SectionOp::Imply {
            src: pool[0],
            dst: pool[1],
        }
    } else {
        let arity = rng.gen_range(1..=3);
        SectionOp::False(pool[..arity].to_vec())
    };
    vec![op]
}

/// A random well-formed single-section program.
pub fn random_program(rng: &mut StdRng, n_devices: usize, max_steps: usize) -> AlgorithmProgram {
    let steps = (1..=rng.gen_range(1..=max_steps))
        .map(|_| random_step(rng, n_devices))
        .collect();
    AlgorithmProgram {
        section_count: 1,
        steps,
    }
}

/// A synthetic validated bundle around `program`: serial topology, the first
/// `n_inputs` memristors as inputs, no declared output expectations.
pub fn synthetic_bundle(program: AlgorithmProgram, n_inputs: usize) -> ValidatedBundle {
    assert!(n_inputs <= MAX_DEVICES);
    let names: Vec<String> = (0..MAX_DEVICES).map(|i| format!("m{i}")).collect();
    let config = ConfigSpec {
        topology_name: "Serial".into(),
        algorithm_file: "synthetic.txt".into(),
        memristors: names.clone(),
        inputs: names[..n_inputs].to_vec(),
        work: names[n_inputs..].to_vec(),
        outputs: Vec::new(),
        switches: names.iter().map(|n| format!("s{n}")).collect(),
        steps: program.steps.len(),
        output_states: Default::default(),
    };
    let topology_json = format!(
        r#"{{"name":"Serial","sections":[{{"memristors":[{}],"r_g":30000.0}}],"inter_section_switches":[]}}"#,
        names
            .iter()
            .map(|n| format!("\"{n}\""))
            .collect::<Vec<_>>()
            .join(",")
    );
    let topology = TopologySpec::parse(&topology_json).unwrap();
    let params = ImplyParameters::parse(bundle::IMPLY_PARAMETERS).unwrap();
    let device_section = vec![0; MAX_DEVICES];
    ValidatedBundle {
        config,
        topology,
        program,
        params,
        device_section,
    }
}
