//! Workloads shared by the planning benchmarks.

use cnnpart_core::fixtures;
use cnnpart_core::{DeviceProfile, GaConfig, NetworkModel};

pub fn vgg16() -> (NetworkModel, DeviceProfile) {
    fixtures::VGG16.load().expect("bundled fixture loads")
}

/// A GA configuration small enough to time repeatedly.
pub fn quick_ga(seed: u64) -> GaConfig {
    GaConfig { population_size: 32, generations: 40, ..GaConfig::with_seed(seed) }
}
