#![allow(dead_code)]

use cnnpart_core::{
    infer_shapes, CommCostModel, DeviceProfile, LayerKind, LayerProfile, LayerSpec, NetworkModel, TensorShape,
};

/// Input layer followed by `rest`, with shapes inferred.
pub fn chain(input: (usize, usize, usize), rest: Vec<(LayerKind, (usize, usize), usize, usize, usize)>) -> NetworkModel {
    let mut layers = vec![LayerSpec::new(1, LayerKind::Input, (1, 1), 1, 0, 0)];
    for (k, (kind, window, stride, padding, neurons)) in rest.into_iter().enumerate() {
        layers.push(LayerSpec::new(k + 2, kind, window, stride, padding, neurons));
    }
    infer_shapes(NetworkModel { name: "test".into(), input_shape: TensorShape::new(input.0, input.1, input.2), layers }).unwrap()
}

/// A chain of `n` layers whose shapes never matter (1×1 activations).
pub fn flat_chain(n: usize) -> NetworkModel {
    chain((4, 4, 4), (1..n).map(|_| (LayerKind::Activation, (1, 1), 1, 0, 0)).collect())
}

pub fn profile(layers: Vec<LayerProfile>) -> DeviceProfile {
    DeviceProfile {
        device_name: "test".into(),
        bytes_per_element: None,
        internal_model: CommCostModel::ZERO,
        external_model: CommCostModel::ZERO,
        layer_profiles: layers,
    }
}

pub fn comp_only(comp: &[f64]) -> DeviceProfile {
    profile(comp.iter().map(|&c| LayerProfile { comp_energy: c, comp_time: 1.0, ..Default::default() }).collect())
}

pub fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Rows of the producer a consumer partition touches, minus the rows it
/// produced itself, counted by walking every window tap.
pub fn coverage_halo(height: usize, window: usize, stride: usize, padding: usize, produced: &[usize], consumed: &[usize], part: usize) -> usize {
    let x: usize = produced[..part].iter().sum();
    let y = x + produced[part];
    let first: usize = consumed[..part].iter().sum();
    let mut needed = vec![false; height];
    for r in first..first + consumed[part] {
        for t in 0..window {
            let src = (r * stride + t) as i64 - padding as i64;
            if src >= 0 && (src as usize) < height {
                needed[src as usize] = true;
            }
        }
    }
    (0..height).filter(|&row| needed[row] && !(x..y).contains(&row)).count()
}
