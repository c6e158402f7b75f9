//! IMPLY drive voltages, timing, resistance bounds and the threshold
//! memristor model parameters.

use serde::Deserialize;

use crate::error::SpecError;

/// Threshold switching model: the state moves only while the voltage across
/// the device exceeds `v_on` (toward 1) or falls below `v_off` (toward 0).
///
/// `k_on`/`k_off` may be given explicitly; when absent they are calibrated at
/// load time so that a full transition completes in `switching_fraction` of a
/// cycle at the reference drive (V_SET for set; the in-circuit effective
/// reset voltage V_RESET * R_on / (R_on + R_G) for reset, since a reset pulse
/// divides across the ground resistor).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemristorModelParams {
    pub v_on: f64,
    pub v_off: f64,
    pub alpha: f64,
    #[serde(default = "default_switching_fraction")]
    pub switching_fraction: f64,
    #[serde(default)]
    pub k_on: Option<f64>,
    #[serde(default)]
    pub k_off: Option<f64>,
}

fn default_switching_fraction() -> f64 {
    0.1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplyParameters {
    #[serde(rename = "V_SET")]
    pub v_set: f64,
    #[serde(rename = "V_COND")]
    pub v_cond: f64,
    #[serde(rename = "V_RESET")]
    pub v_reset: f64,
    pub cycle_time: f64,
    #[serde(rename = "R_on")]
    pub r_on: f64,
    #[serde(rename = "R_off")]
    pub r_off: f64,
    pub model: MemristorModelParams,
}

impl ImplyParameters {
    pub fn parse(json_text: &str) -> Result<Self, SpecError> {
        let params: ImplyParameters =
            serde_json::from_str(json_text).map_err(|e| SpecError::Json(e.to_string()))?;
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let checks: [(bool, &str); 5] = [
            (
                0.0 < self.v_cond && self.v_cond < self.v_set,
                "0 < V_COND < V_SET",
            ),
            (self.v_reset < 0.0, "V_RESET < 0"),
            (
                self.r_on > 0.0 && self.r_on < self.r_off,
                "0 < R_on < R_off",
            ),
            (self.cycle_time > 0.0, "cycle_time > 0"),
            (self.model.switching_fraction > 0.0, "switching_fraction > 0"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(SpecError::InvalidParameter(msg.to_string()));
            }
        }
        let m = &self.model;
        if !(m.v_on > 0.0 && m.v_off < 0.0 && m.alpha >= 1.0) {
            return Err(SpecError::InvalidParameter(
                "model requires v_on > 0, v_off < 0, alpha >= 1".into(),
            ));
        }
        // IMPLY bias inequality: the target must see more than v_on when the
        // source is at R_off, and V_SET - V_COND alone must not switch it.
        if !(self.v_set - self.v_cond < m.v_on && m.v_on < self.v_set) {
            return Err(SpecError::ElectricalPreconditionViolated(format!(
                "need V_SET - V_COND < v_on < V_SET (V_SET={}, V_COND={}, v_on={})",
                self.v_set, self.v_cond, m.v_on
            )));
        }
        Ok(())
    }

    /// Hold condition: a source at R_on must pull the shared node high enough
    /// that the target sees less than v_on. Depends on R_G, so it is checked
    /// at cross-validation once the topology is known.
    pub fn check_hold_condition(&self, r_g: f64) -> Result<(), SpecError> {
        let node = self.v_cond * r_g / (self.r_on + r_g);
        if node <= self.v_set - self.model.v_on {
            return Err(SpecError::ElectricalPreconditionViolated(format!(
                "V_COND*R_G/(R_on+R_G) = {node:.4} V does not exceed V_SET - v_on = {:.4} V; \
                 a logic-1 source cannot hold its target",
                self.v_set - self.model.v_on
            )));
        }
        Ok(())
    }

    pub fn resistance(&self, w: f64) -> f64 {
        self.r_off + w * (self.r_on - self.r_off)
    }

    /// Inverse of the linear resistance map, clamped to [0, 1].
    pub fn state_from_resistance(&self, r: f64) -> f64 {
        ((self.r_off - r) / (self.r_off - self.r_on)).clamp(0.0, 1.0)
    }

    /// Calibrated (k_on, k_off); `r_g` is the largest ground resistance the
    /// reset pulse will divide across.
    pub fn switching_rates(&self, r_g: f64) -> (f64, f64) {
        let m = &self.model;
        let t = m.switching_fraction * self.cycle_time;
        let k_on = m.k_on.unwrap_or_else(|| {
            1.0 / (t * ((self.v_set - m.v_on) / m.v_on).powf(m.alpha))
        });
        let k_off = m.k_off.unwrap_or_else(|| {
            let v_eff = self.v_reset * self.r_on / (self.r_on + r_g);
            1.0 / (t * ((v_eff - m.v_off) / m.v_off).powf(m.alpha))
        });
        (k_on, k_off)
    }
}
