//! Assets compiled into the binary: the three topology structure files, the
//! default electrical parameter set and four ready-to-run full-adder
//! algorithms with their configurations.

/// Default IMPLY drive / memristor model parameters (JSON).
pub const IMPLY_PARAMETERS: &str = include_str!("../structures/imply_parameters.json");

pub const TOPOLOGY_SERIAL: &str = include_str!("../structures/Serial.json");
pub const TOPOLOGY_SEMI_SERIAL: &str = include_str!("../structures/Semi-Serial.json");
pub const TOPOLOGY_SEMI_PARALLEL: &str = include_str!("../structures/Semi-Parallel.json");

/// Structure file for a topology name, if it is one of the built-ins.
pub fn topology_json(name: &str) -> Option<&'static str> {
    match name {
        "Serial" => Some(TOPOLOGY_SERIAL),
        "Semi-Serial" => Some(TOPOLOGY_SEMI_SERIAL),
        "Semi-Parallel" => Some(TOPOLOGY_SEMI_PARALLEL),
        _ => None,
    }
}

/// A bundled algorithm: its configuration JSON and program text.
#[derive(Debug, Clone, Copy)]
pub struct BundledAlgorithm {
    pub name: &'static str,
    pub config_json: &'static str,
    pub algorithm_text: &'static str,
}

pub const BUNDLED_ALGORITHMS: [BundledAlgorithm; 4] = [
    BundledAlgorithm {
        name: "serial_full_adder",
        config_json: include_str!("../bundled/serial_full_adder.json"),
        algorithm_text: include_str!("../bundled/serial_full_adder.txt"),
    },
    BundledAlgorithm {
        name: "semi_serial_full_adder",
        config_json: include_str!("../bundled/semi_serial_full_adder.json"),
        algorithm_text: include_str!("../bundled/semi_serial_full_adder.txt"),
    },
    BundledAlgorithm {
        name: "semi_parallel_full_adder",
        config_json: include_str!("../bundled/semi_parallel_full_adder.json"),
        algorithm_text: include_str!("../bundled/semi_parallel_full_adder.txt"),
    },
    BundledAlgorithm {
        name: "approx_full_adder",
        config_json: include_str!("../bundled/approx_full_adder.json"),
        algorithm_text: include_str!("../bundled/approx_full_adder.txt"),
    },
];

/// Bundled algorithm text for a file name referenced by a bundled config.
pub fn algorithm_text(file_name: &str) -> Option<&'static str> {
    BUNDLED_ALGORITHMS
        .iter()
        .find(|a| format!("{}.txt", a.name) == file_name)
        .map(|a| a.algorithm_text)
}
