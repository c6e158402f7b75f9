//! Input-file handling: algorithm text, configuration JSON, topology
//! structures, electrical parameters and the cross-file validation that ties
//! them together.

pub mod algorithm;
pub mod config;
pub mod params;
pub mod topology;
pub mod validate;

use std::fs;
use std::path::Path;

pub use algorithm::{AlgorithmProgram, SectionOp};
pub use config::ConfigSpec;
pub use params::{ImplyParameters, MemristorModelParams};
pub use topology::TopologySpec;
pub use validate::{cross_validate, ValidatedBundle};

use crate::bundle;
use crate::error::SpecError;

/// Load and cross-validate a run from a configuration file on disk.
///
/// The algorithm file is resolved relative to the configuration's directory,
/// falling back to the bundled copy of the same name. A topology structure or
/// parameter file placed next to the configuration (`<Topology>.json`,
/// `imply_parameters.json`) overrides the built-in one.
pub fn load_from_config_path(path: &Path) -> Result<ValidatedBundle, SpecError> {
    let config_text = fs::read_to_string(path)?;
    let config = ConfigSpec::parse(&config_text)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));

    let topo_override = dir.join(format!("{}.json", config.topology_name));
    let topology_text = if topo_override.is_file() {
        fs::read_to_string(&topo_override)?
    } else {
        bundle::topology_json(&config.topology_name)
            .ok_or_else(|| SpecError::UnknownTopologyName(config.topology_name.clone()))?
            .to_string()
    };
    let topology = TopologySpec::parse(&topology_text)?;

    let algo_path = dir.join(&config.algorithm_file);
    let algorithm_text = if algo_path.is_file() {
        fs::read_to_string(&algo_path)?
    } else {
        bundle::algorithm_text(&config.algorithm_file)
            .ok_or_else(|| {
                SpecError::Io(std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("algorithm file `{}` not found", algo_path.display()),
                ))
            })?
            .to_string()
    };
    let program = AlgorithmProgram::parse(&algorithm_text, topology.section_count())?;

    let params_override = dir.join("imply_parameters.json");
    let params_text = if params_override.is_file() {
        fs::read_to_string(&params_override)?
    } else {
        bundle::IMPLY_PARAMETERS.to_string()
    };
    let params = ImplyParameters::parse(&params_text)?;

    cross_validate(config, topology, program, params)
}

/// Load and cross-validate one of the built-in algorithms.
pub fn load_bundled(bundled: &bundle::BundledAlgorithm) -> Result<ValidatedBundle, SpecError> {
    let config = ConfigSpec::parse(bundled.config_json)?;
    let topology = TopologySpec::parse(
        bundle::topology_json(&config.topology_name)
            .ok_or_else(|| SpecError::UnknownTopologyName(config.topology_name.clone()))?,
    )?;
    let program = AlgorithmProgram::parse(bundled.algorithm_text, topology.section_count())?;
    let params = ImplyParameters::parse(bundle::IMPLY_PARAMETERS)?;
    cross_validate(config, topology, program, params)
}
