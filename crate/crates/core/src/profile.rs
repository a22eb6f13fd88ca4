//! Per-layer calibration data for one edge device.
//!
//! Every energy is the cost of the *whole* layer tensor; the strategy models
//! scale these values by partition fractions. Communication energies that a
//! profile document omits are generated from an affine [`CommCostModel`].

use serde::{Deserialize, Serialize};

use crate::document;
use crate::error::{parse_err, Error, Result};
use crate::model::{LayerKind, NetworkModel};

/// Seconds charged per window tap when synthesizing a profile.
pub const SYNTH_SECONDS_PER_OP: f64 = 1e-10;

/// Affine communication cost: one fixed charge per transfer plus a per-element charge.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CommCostModel {
    #[serde(rename = "base")]
    pub base_energy: f64,
    #[serde(rename = "per_element")]
    pub per_element_energy: f64,
}

impl CommCostModel {
    pub const ZERO: CommCostModel = CommCostModel { base_energy: 0.0, per_element_energy: 0.0 };

    pub fn new(base_energy: f64, per_element_energy: f64) -> Self {
        Self { base_energy, per_element_energy }
    }

    /// Energy for one transfer of `elements` tensor elements.
    pub fn energy(&self, elements: u64) -> f64 {
        self.base_energy + self.per_element_energy * elements as f64
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.base_energy >= 0.0 && self.per_element_energy >= 0.0) {
            return Err(Error::Validation(format!("{what} cost model must be non-negative")));
        }
        Ok(())
    }
}

/// Free-function form of [`CommCostModel::energy`].
pub fn comm_energy(model: &CommCostModel, elements: u64) -> f64 {
    model.energy(elements)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LayerProfile {
    /// Integrated power over the full-layer execution, in joules.
    pub comp_energy: f64,
    pub comp_time: f64,
    /// Moving the full output tensor between layers on the same device.
    pub in_comm_energy: f64,
    /// Moving the full output tensor across devices.
    pub ex_comm_energy: f64,
    /// Sending the full output tensor to another device.
    pub send_energy: f64,
    /// Receiving the full input tensor from another device.
    pub recv_energy: f64,
}

impl LayerProfile {
    fn fields(&self) -> [(&'static str, f64); 6] {
        [
            ("comp_energy", self.comp_energy),
            ("comp_time", self.comp_time),
            ("in_comm_energy", self.in_comm_energy),
            ("ex_comm_energy", self.ex_comm_energy),
            ("send_energy", self.send_energy),
            ("recv_energy", self.recv_energy),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProfile {
    pub device_name: String,
    /// Documentation only; energies are computed per element.
    pub bytes_per_element: Option<u32>,
    pub internal_model: CommCostModel,
    pub external_model: CommCostModel,
    /// Indexed by `layer id - 1`.
    pub layer_profiles: Vec<LayerProfile>,
}

impl DeviceProfile {
    pub fn layer(&self, id: usize) -> &LayerProfile {
        &self.layer_profiles[id - 1]
    }

    /// Checks that this profile covers exactly the layers of `model`.
    pub fn check_covers(&self, model: &NetworkModel) -> Result<()> {
        if self.layer_profiles.len() != model.len() {
            return Err(Error::Mismatch(format!(
                "profile covers {} layers but model has {}",
                self.layer_profiles.len(),
                model.len()
            )));
        }
        Ok(())
    }

    pub fn to_document(&self) -> Result<String> {
        let header = ProfileHeader {
            device_name: self.device_name.clone(),
            bytes_per_element: self.bytes_per_element,
            internal: self.internal_model,
            external: self.external_model,
        };
        let records: Vec<ProfileRecord> = self
            .layer_profiles
            .iter()
            .enumerate()
            .map(|(k, p)| ProfileRecord {
                id: k + 1,
                comp_energy: p.comp_energy,
                comp_time: p.comp_time,
                in_comm_energy: Some(p.in_comm_energy),
                ex_comm_energy: Some(p.ex_comm_energy),
                send_energy: Some(p.send_energy),
                recv_energy: Some(p.recv_energy),
            })
            .collect();
        document::write(&header, &records)
    }

    /// Returns a copy with every energy field multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> DeviceProfile {
        let mut out = self.clone();
        for p in &mut out.layer_profiles {
            p.comp_energy *= factor;
            p.in_comm_energy *= factor;
            p.ex_comm_energy *= factor;
            p.send_energy *= factor;
            p.recv_energy *= factor;
        }
        out
    }
}

fn comm_fields(model: &NetworkModel, id: usize, internal: &CommCostModel, external: &CommCostModel) -> LayerProfile {
    let layer = model.layer(id);
    let out = layer.out_shape.element_count();
    let inp = layer.in_shape.element_count();
    LayerProfile {
        comp_energy: 0.0,
        comp_time: 0.0,
        in_comm_energy: internal.energy(out),
        ex_comm_energy: external.energy(out),
        send_energy: external.energy(out),
        recv_energy: external.energy(inp),
    }
}

/// Builds a complete profile from cost constants instead of measurements.
///
/// Computation energy is `comp_joules_per_element × output elements × window
/// volume`; input layers compute nothing.
pub fn synthesize_profile(
    model: &NetworkModel,
    comp_joules_per_element: f64,
    internal: CommCostModel,
    external: CommCostModel,
) -> DeviceProfile {
    let layer_profiles = model
        .layers
        .iter()
        .map(|layer| {
            let mut p = comm_fields(model, layer.id, &internal, &external);
            if layer.kind != LayerKind::Input {
                let ops = layer.out_shape.element_count() as f64 * layer.window_volume() as f64;
                p.comp_energy = comp_joules_per_element * ops;
                p.comp_time = SYNTH_SECONDS_PER_OP * ops;
            }
            p
        })
        .collect();
    DeviceProfile {
        device_name: format!("synthetic-{}", model.name),
        bytes_per_element: Some(4),
        internal_model: internal,
        external_model: external,
        layer_profiles,
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileHeader {
    device_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bytes_per_element: Option<u32>,
    internal: CommCostModel,
    external: CommCostModel,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileRecord {
    id: usize,
    comp_energy: f64,
    comp_time: f64,
    #[serde(default)]
    in_comm_energy: Option<f64>,
    #[serde(default)]
    ex_comm_energy: Option<f64>,
    #[serde(default)]
    send_energy: Option<f64>,
    #[serde(default)]
    recv_energy: Option<f64>,
}

/// Parses a profile document for `model`, filling omitted communication
/// fields from the header cost models.
pub fn load_profile(text: &str, model: &NetworkModel) -> Result<DeviceProfile> {
    let doc = document::read::<ProfileHeader, ProfileRecord>(text)?;
    let h = doc.header;
    h.internal.validate("internal")?;
    h.external.validate("external")?;

    let mut slots: Vec<Option<LayerProfile>> = vec![None; model.len()];
    for (line, r) in doc.records {
        if r.id == 0 || r.id > model.len() {
            return Err(parse_err(line, format!("unknown layer id {} (model has {} layers)", r.id, model.len())));
        }
        if slots[r.id - 1].is_some() {
            return Err(parse_err(line, format!("duplicate record for layer {}", r.id)));
        }
        let defaults = comm_fields(model, r.id, &h.internal, &h.external);
        let p = LayerProfile {
            comp_energy: r.comp_energy,
            comp_time: r.comp_time,
            in_comm_energy: r.in_comm_energy.unwrap_or(defaults.in_comm_energy),
            ex_comm_energy: r.ex_comm_energy.unwrap_or(defaults.ex_comm_energy),
            send_energy: r.send_energy.unwrap_or(defaults.send_energy),
            recv_energy: r.recv_energy.unwrap_or(defaults.recv_energy),
        };
        for (name, v) in p.fields() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("layer {}: {name} must be a finite non-negative value, got {v}", r.id)));
            }
        }
        if model.layer(r.id).kind != LayerKind::Input && p.comp_time <= 0.0 {
            return Err(Error::Validation(format!("layer {}: comp_time must be positive", r.id)));
        }
        slots[r.id - 1] = Some(p);
    }

    let layer_profiles = slots
        .into_iter()
        .enumerate()
        .map(|(k, p)| p.ok_or_else(|| Error::Validation(format!("profile has no record for layer {}", k + 1))))
        .collect::<Result<Vec<_>>>()?;

    Ok(DeviceProfile {
        device_name: h.device_name,
        bytes_per_element: h.bytes_per_element,
        internal_model: h.internal,
        external_model: h.external,
        layer_profiles,
    })
}
