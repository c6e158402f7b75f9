//! The per-algorithm configuration file (JSON).

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::SpecError;

pub const TOPOLOGY_NAMES: [&str; 3] = ["Serial", "Semi-Serial", "Semi-Parallel"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    topology: String,
    algorithm: String,
    memristors: Vec<String>,
    inputs: Vec<String>,
    work: Vec<String>,
    outputs: Vec<String>,
    switches: Vec<String>,
    steps: usize,
    output_states: BTreeMap<String, Vec<u8>>,
}

/// Validated configuration: memristor roles, topology binding and the
/// expected output bit vectors (one bit per input combination, first-listed
/// input most significant).
#[derive(Debug, Clone)]
pub struct ConfigSpec {
    pub topology_name: String,
    pub algorithm_file: String,
    pub memristors: Vec<String>,
    pub inputs: Vec<String>,
    pub work: Vec<String>,
    pub outputs: Vec<String>,
    pub switches: Vec<String>,
    pub steps: usize,
    pub output_states: BTreeMap<String, Vec<u8>>,
}

impl ConfigSpec {
    pub fn parse(json_text: &str) -> Result<Self, SpecError> {
        let raw: RawConfig = serde_json::from_str(json_text).map_err(|e| {
            let msg = e.to_string();
            if msg.starts_with("missing field") {
                SpecError::MissingKey(msg)
            } else {
                SpecError::Json(msg)
            }
        })?;
        if !TOPOLOGY_NAMES.contains(&raw.topology.as_str()) {
            return Err(SpecError::UnknownTopologyName(raw.topology));
        }
        for (role, names) in [
            ("inputs", &raw.inputs),
            ("work", &raw.work),
            ("outputs", &raw.outputs),
        ] {
            for name in names {
                if !raw.memristors.contains(name) {
                    return Err(SpecError::RoleReferencesUndeclaredMemristor {
                        role,
                        name: name.clone(),
                    });
                }
            }
        }
        if let Some(name) = raw.inputs.iter().find(|n| raw.work.contains(n)) {
            return Err(SpecError::RoleReferencesUndeclaredMemristor {
                role: "inputs/work overlap",
                name: name.clone(),
            });
        }
        let expected_len = 1usize << raw.inputs.len();
        for (name, bits) in &raw.output_states {
            if !raw.outputs.contains(name) {
                return Err(SpecError::UnknownOutputName(name.clone()));
            }
            if bits.len() != expected_len {
                return Err(SpecError::BadOutputVectorLength {
                    output: name.clone(),
                    expected: expected_len,
                    got: bits.len(),
                });
            }
            if let Some(b) = bits.iter().find(|b| **b > 1) {
                return Err(SpecError::Json(format!(
                    "output `{name}`: bit value {b} is not 0 or 1"
                )));
            }
        }
        Ok(ConfigSpec {
            topology_name: raw.topology,
            algorithm_file: raw.algorithm,
            memristors: raw.memristors,
            inputs: raw.inputs,
            work: raw.work,
            outputs: raw.outputs,
            switches: raw.switches,
            steps: raw.steps,
            output_states: raw.output_states,
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    /// Number of input combinations (2^n).
    pub fn n_combinations(&self) -> usize {
        1 << self.inputs.len()
    }

    pub fn device_index(&self, name: &str) -> Option<usize> {
        self.memristors.iter().position(|m| m == name)
    }

    /// Bit of input `j` (0-based position in `inputs`) under combination `k`;
    /// the first-listed input is most significant.
    pub fn input_bit(&self, combination: usize, input_pos: usize) -> bool {
        let n = self.inputs.len();
        (combination >> (n - 1 - input_pos)) & 1 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template(inputs: &str, vec_len: usize) -> String {
        let bits: Vec<&str> = std::iter::repeat_n("0", vec_len).collect();
        format!(
            r#"{{
              "topology": "Serial",
              "algorithm": "adder.txt",
              "memristors": ["a","b","c","w1","s"],
              "inputs": [{inputs}],
              "work": ["w1"],
              "outputs": ["s"],
              "switches": ["sa","sb","sc","sw1","ss"],
              "steps": 4,
              "output_states": {{"s": [{}]}}
            }}"#,
            bits.join(",")
        )
    }

    #[test]
    fn three_inputs_eight_combinations() {
        let cfg = ConfigSpec::parse(&template(r#""a","b","c""#, 8)).unwrap();
        assert_eq!(cfg.n_combinations(), 8);
        assert_eq!(cfg.output_states["s"].len(), 8);
    }

    #[test]
    fn bad_output_vector_length() {
        let err = ConfigSpec::parse(&template(r#""a","b""#, 8)).unwrap_err();
        assert!(matches!(
            err,
            SpecError::BadOutputVectorLength {
                expected: 4,
                got: 8,
                ..
            }
        ));
    }

    #[test]
    fn output_state_for_undeclared_output() {
        let json = template(r#""a","b","c""#, 8).replace(r#""outputs": ["s"]"#, r#""outputs": []"#);
        assert!(matches!(
            ConfigSpec::parse(&json).unwrap_err(),
            SpecError::UnknownOutputName(_)
        ));
    }

    #[test]
    fn unknown_keys_rejected() {
        let json = template(r#""a","b","c""#, 8).replace(r#""steps": 4"#, r#""steps": 4, "extra": 1"#);
        assert!(matches!(ConfigSpec::parse(&json).unwrap_err(), SpecError::Json(_)));
    }

    #[test]
    fn missing_key() {
        let json = template(r#""a","b","c""#, 8).replace(r#""steps": 4,"#, "");
        assert!(matches!(
            ConfigSpec::parse(&json).unwrap_err(),
            SpecError::MissingKey(_)
        ));
    }

    #[test]
    fn unknown_topology() {
        let json = template(r#""a","b","c""#, 8).replace("Serial", "Parallel");
        assert!(matches!(
            ConfigSpec::parse(&json).unwrap_err(),
            SpecError::UnknownTopologyName(_)
        ));
    }

    #[test]
    fn undeclared_role_member() {
        let json = template(r#""a","b","q""#, 8);
        assert!(matches!(
            ConfigSpec::parse(&json).unwrap_err(),
            SpecError::RoleReferencesUndeclaredMemristor { role: "inputs", .. }
        ));
    }

    #[test]
    fn msb_first_ordering() {
        let cfg = ConfigSpec::parse(&template(r#""a","b","c""#, 8)).unwrap();
        // combination 4 = 0b100: a=1, b=0, c=0
        assert!(cfg.input_bit(4, 0));
        assert!(!cfg.input_bit(4, 1));
        assert!(!cfg.input_bit(4, 2));
    }
}
