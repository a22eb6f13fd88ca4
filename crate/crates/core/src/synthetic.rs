//! Seeded random inputs for property tests, oracle cross-checks and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{infer_shapes, LayerKind, LayerSpec, NetworkModel, TensorShape};
use crate::partition::{split_balanced, DataPlan};
use crate::profile::{CommCostModel, DeviceProfile, LayerProfile};

/// A chain of `layers` layers with a random per-layer profile.
///
/// Shapes are irrelevant to layer-granular planners, so the chain is an input
/// followed by same-padded convolutions and activations; the energies are
/// drawn independently per layer.
pub fn random_instance(seed: u64, layers: usize) -> (NetworkModel, DeviceProfile) {
    assert!(layers >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut specs = vec![LayerSpec::new(1, LayerKind::Input, (1, 1), 1, 0, 0)];
    for id in 2..=layers {
        let spec = if rng.gen_bool(0.7) {
            LayerSpec::new(id, LayerKind::Convolution, (3, 3), 1, 1, rng.gen_range(4..=32))
        } else {
            LayerSpec::new(id, LayerKind::Activation, (1, 1), 1, 0, 0)
        };
        specs.push(spec);
    }
    let model = infer_shapes(NetworkModel {
        name: format!("random-{seed}-{layers}"),
        input_shape: TensorShape::new(16, 16, 3),
        layers: specs,
    })
    .expect("random chain is well formed");

    let layer_profiles = (0..layers)
        .map(|k| LayerProfile {
            comp_energy: if k == 0 { 0.0 } else { rng.gen_range(0.1..2.0) },
            comp_time: if k == 0 { 0.0 } else { rng.gen_range(1e-4..1e-2) },
            in_comm_energy: rng.gen_range(0.0..0.2),
            ex_comm_energy: rng.gen_range(0.0..0.6),
            send_energy: rng.gen_range(0.0..0.6),
            recv_energy: rng.gen_range(0.0..0.6),
        })
        .collect();
    let profile = DeviceProfile {
        device_name: format!("random-{seed}"),
        bytes_per_element: None,
        internal_model: CommCostModel::ZERO,
        external_model: CommCostModel::ZERO,
        layer_profiles,
    };
    (model, profile)
}

/// One producer/consumer pair with a balanced height split on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairConfig {
    pub height: usize,
    pub window: usize,
    pub stride: usize,
    pub padding: usize,
    pub partitions: usize,
    /// Layer index used to rotate remainders.
    pub layer_index: usize,
}

impl PairConfig {
    /// Draws `height ≤ max_height`, `partitions ≤ 6`, `window ≤ 7`,
    /// `stride ≤ min(3, window)` and `padding ≤ max_padding`, always with a
    /// valid output. Keeping the stride within the window means every
    /// partition's windows touch a contiguous band of rows.
    pub fn random(rng: &mut impl Rng, max_height: usize, max_padding: usize) -> Self {
        loop {
            let height = rng.gen_range(1..=max_height);
            let window = rng.gen_range(1..=7);
            let stride = rng.gen_range(1..=window.min(3));
            let padding = rng.gen_range(0..=max_padding.min(window - 1));
            if height + 2 * padding < window {
                continue;
            }
            return Self { height, window, stride, padding, partitions: rng.gen_range(1..=6), layer_index: rng.gen_range(0..32) };
        }
    }

    /// Input layer of `height` rows feeding a convolution with this window.
    pub fn model(&self) -> NetworkModel {
        infer_shapes(NetworkModel {
            name: "pair".into(),
            input_shape: TensorShape::new(self.height, 3, 2),
            layers: vec![
                LayerSpec::new(1, LayerKind::Input, (1, 1), 1, 0, 0),
                LayerSpec::new(2, LayerKind::Convolution, (self.window, 1), self.stride, self.padding, 2),
            ],
        })
        .expect("pair config yields a valid output extent")
    }

    pub fn plan(&self, model: &NetworkModel) -> DataPlan {
        DataPlan {
            partitions: self.partitions,
            heights: model
                .layers
                .iter()
                .enumerate()
                .map(|(k, l)| split_balanced(l.out_shape.height, self.partitions, self.layer_index + k))
                .collect(),
        }
    }
}
