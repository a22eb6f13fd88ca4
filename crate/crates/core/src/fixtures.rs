//! Models and device profiles shipped with the crate.
//!
//! Profiles are synthetic (generated from per-operation and per-element cost
//! constants), not measurements.

use crate::error::Result;
use crate::model::{parse_model, NetworkModel};
use crate::profile::{load_profile, DeviceProfile};

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub model: &'static str,
    pub profile: &'static str,
}

impl Fixture {
    pub fn load(&self) -> Result<(NetworkModel, DeviceProfile)> {
        let model = parse_model(self.model)?;
        let profile = load_profile(self.profile, &model)?;
        Ok((model, profile))
    }
}

macro_rules! fixture {
    ($name:literal, $profile:literal) => {
        Fixture {
            name: $name,
            model: include_str!(concat!("../fixtures/", $name, ".model.jsonl")),
            profile: include_str!(concat!("../fixtures/", $profile, ".profile.jsonl")),
        }
    };
}

/// 23 layers, 224×224×3 input.
pub const VGG16: Fixture = fixture!("vgg16", "vgg16");
/// 19 layers, 64×64×1 input.
pub const EMOTION_FER: Fixture = fixture!("emotion_fer", "emotion_fer");
/// Ten same-padded convolutions with no pooling, so every height divides by 2, 4 and 8.
pub const COMPUTE_HEAVY: Fixture = fixture!("compute_heavy", "compute_heavy");
/// Wide activations with expensive cross-device transfers.
pub const COMM_HEAVY: Fixture = fixture!("comm_heavy", "comm_heavy");
/// Small convolutional front end followed by large dense layers.
pub const FC_HEAVY: Fixture = fixture!("fc_heavy", "fc_heavy");
/// [`COMPUTE_HEAVY`] with every communication cost set to zero.
pub const COMPUTE_HEAVY_ZERO_COMM: Fixture = fixture!("compute_heavy", "compute_heavy.zero_comm");

pub const ALL: [Fixture; 5] = [VGG16, EMOTION_FER, COMPUTE_HEAVY, COMM_HEAVY, FC_HEAVY];

pub fn by_name(name: &str) -> Option<Fixture> {
    ALL.into_iter().chain([COMPUTE_HEAVY_ZERO_COMM]).find(|f| f.name == name)
}
