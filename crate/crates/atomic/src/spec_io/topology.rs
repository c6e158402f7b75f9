//! Topology structure files: sections (shared node + ground resistor),
//! per-device series switches and inter-section switches.

use serde::Deserialize;

use crate::error::SpecError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Section {
    pub memristors: Vec<String>,
    pub r_g: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterSwitch {
    pub name: String,
    pub sections: [usize; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    pub name: String,
    pub sections: Vec<Section>,
    pub inter_section_switches: Vec<InterSwitch>,
}

impl TopologySpec {
    pub fn parse(json_text: &str) -> Result<Self, SpecError> {
        let topo: TopologySpec =
            serde_json::from_str(json_text).map_err(|e| SpecError::Json(e.to_string()))?;
        topo.validate()?;
        Ok(topo)
    }

    fn validate(&self) -> Result<(), SpecError> {
        let expected_sections = match self.name.as_str() {
            "Serial" => Some(1),
            "Semi-Serial" => Some(2),
            "Semi-Parallel" => None, // >= 2
            other => return Err(SpecError::UnknownTopologyName(other.to_string())),
        };
        match expected_sections {
            Some(n) if self.sections.len() != n => {
                return Err(SpecError::TopologyMismatch(format!(
                    "{} topology must have exactly {n} section(s), found {}",
                    self.name,
                    self.sections.len()
                )))
            }
            None if self.sections.len() < 2 => {
                return Err(SpecError::TopologyMismatch(
                    "Semi-Parallel topology must have at least 2 sections".into(),
                ))
            }
            _ => {}
        }
        let mut seen: Vec<&str> = Vec::new();
        for (i, sec) in self.sections.iter().enumerate() {
            if sec.r_g <= 0.0 || !sec.r_g.is_finite() {
                return Err(SpecError::InvalidParameter(format!(
                    "section {i}: R_G must be > 0, got {}",
                    sec.r_g
                )));
            }
            for m in &sec.memristors {
                if seen.contains(&m.as_str()) {
                    return Err(SpecError::TopologyMismatch(format!(
                        "memristor `{m}` appears in more than one section"
                    )));
                }
                seen.push(m);
            }
        }
        for sw in &self.inter_section_switches {
            let [a, b] = sw.sections;
            if a >= self.sections.len() || b >= self.sections.len() || a == b {
                return Err(SpecError::TopologyMismatch(format!(
                    "inter-section switch `{}` wires invalid section pair ({a}, {b})",
                    sw.name
                )));
            }
        }
        Ok(())
    }

    pub fn section_count(&self) -> usize {
        self.sections.len()
    }

    /// Section index holding memristor `name`, if declared.
    pub fn section_of(&self, name: &str) -> Option<usize> {
        self.sections
            .iter()
            .position(|s| s.memristors.iter().any(|m| m == name))
    }

    /// Series-switch name for a memristor (`s<name>` convention).
    pub fn device_switch_name(name: &str) -> String {
        format!("s{name}")
    }

    /// Inter-section switch bridging sections `a` and `b`, if declared.
    pub fn inter_switch(&self, a: usize, b: usize) -> Option<&InterSwitch> {
        self.inter_section_switches
            .iter()
            .find(|sw| (sw.sections == [a, b]) || (sw.sections == [b, a]))
    }

    /// Full switch wiring: every declared memristor's series switch plus the
    /// inter-section switches, as (switch name, device-or-bridge, section).
    pub fn available_switches(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .sections
            .iter()
            .flat_map(|s| s.memristors.iter())
            .map(|m| Self::device_switch_name(m))
            .collect();
        out.extend(self.inter_section_switches.iter().map(|s| s.name.clone()));
        out
    }
}
