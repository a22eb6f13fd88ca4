//! Brute-force communication volumes, counted row by row and channel by
//! channel without using the closed-form halo formulas.

use serde::{Deserialize, Serialize};

use crate::model::NetworkModel;
use crate::partition::{DataPlan, HorizontalPlan};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionVolume {
    /// Elements consumed from the partition's own previous layer.
    pub internal_elements: u64,
    pub external_in_elements: u64,
    pub external_out_elements: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommVolumes {
    pub per_partition: Vec<PartitionVolume>,
    /// `remote_units[pair][partition]`: remote rows (data) or channels
    /// (horizontal) fetched by the consumer of each layer pair.
    pub remote_units: Vec<Vec<u64>>,
}

impl CommVolumes {
    fn new(partitions: usize) -> Self {
        Self { per_partition: vec![PartitionVolume::default(); partitions], remote_units: Vec::new() }
    }

    /// Every element sent externally is received by someone.
    pub fn is_balanced(&self) -> bool {
        let sent: u64 = self.per_partition.iter().map(|p| p.external_out_elements).sum();
        let received: u64 = self.per_partition.iter().map(|p| p.external_in_elements).sum();
        sent == received
    }
}

/// Owner partition of every unit, from cumulative slice sizes.
fn owners(sizes: &[usize]) -> Vec<usize> {
    sizes.iter().enumerate().flat_map(|(p, &n)| std::iter::repeat_n(p, n)).collect()
}

/// Enumerates, for every consumer partition, each producer row touched by its
/// windows and attributes it to the partition that computed it.
pub fn simulate_data_volumes(model: &NetworkModel, plan: &DataPlan) -> CommVolumes {
    let m = plan.partitions;
    let mut vol = CommVolumes::new(m);
    for (i, pair) in model.layers.windows(2).enumerate() {
        let (producer, consumer) = (&pair[0], &pair[1]);
        let rows = producer.out_shape.height;
        let row_elems = producer.out_shape.row_elements();
        let owner = owners(&plan.heights[i]);
        let mut remote = vec![0u64; m];

        let mut first_out = 0usize;
        for j in 0..m {
            let count = plan.heights[i + 1][j];
            let mut needed = vec![false; rows];
            for r in first_out..first_out + count {
                for tap in 0..consumer.window_h {
                    let src = (r * consumer.stride + tap) as i64 - consumer.padding as i64;
                    if (0..rows as i64).contains(&src) {
                        needed[src as usize] = true;
                    }
                }
            }
            for (row, _) in needed.iter().enumerate().filter(|(_, &n)| n) {
                let src = owner[row];
                if src == j {
                    vol.per_partition[j].internal_elements += row_elems;
                } else {
                    remote[j] += 1;
                    vol.per_partition[j].external_in_elements += row_elems;
                    vol.per_partition[src].external_out_elements += row_elems;
                }
            }
            first_out += count;
        }
        vol.remote_units.push(remote);
    }
    vol
}

/// Every consumer partition needs every channel of the previous output;
/// channels computed elsewhere are external.
pub fn simulate_horizontal_volumes(model: &NetworkModel, plan: &HorizontalPlan) -> CommVolumes {
    let m = plan.partitions;
    let mut vol = CommVolumes::new(m);
    for (i, pair) in model.layers.windows(2).enumerate() {
        let shape = pair[0].out_shape;
        let plane = shape.height as u64 * shape.width as u64;
        let owner = owners(&plan.channels[i]);
        let mut remote = vec![0u64; m];
        for (j, slot) in remote.iter_mut().enumerate() {
            for &src in &owner {
                if src == j {
                    vol.per_partition[j].internal_elements += plane;
                } else {
                    *slot += 1;
                    vol.per_partition[j].external_in_elements += plane;
                    vol.per_partition[src].external_out_elements += plane;
                }
            }
        }
        vol.remote_units.push(remote);
    }
    vol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{infer_shapes, LayerKind, LayerSpec, TensorShape};

    fn halo_model() -> NetworkModel {
        infer_shapes(NetworkModel {
            name: "halo".into(),
            input_shape: TensorShape::new(6, 5, 2),
            layers: vec![
                LayerSpec::new(1, LayerKind::Input, (1, 1), 1, 0, 0),
                LayerSpec::new(2, LayerKind::Convolution, (3, 3), 1, 0, 4),
            ],
        })
        .unwrap()
    }

    #[test]
    fn data_halo_example() {
        let model = halo_model();
        let plan = DataPlan { partitions: 2, heights: vec![vec![3, 3], vec![2, 2]] };
        let vol = simulate_data_volumes(&model, &plan);
        assert_eq!(vol.remote_units, vec![vec![1, 1]]);
        assert_eq!(vol.per_partition[0].external_in_elements, 5 * 2);
        assert!(vol.is_balanced());
    }

    #[test]
    fn single_partition_has_no_external_traffic() {
        let model = halo_model();
        let plan = DataPlan { partitions: 1, heights: vec![vec![6], vec![4]] };
        let vol = simulate_data_volumes(&model, &plan);
        assert_eq!(vol.per_partition[0].external_in_elements, 0);
        assert_eq!(vol.per_partition[0].external_out_elements, 0);
    }

    #[test]
    fn horizontal_all_to_all_example() {
        let model = infer_shapes(NetworkModel {
            name: "h".into(),
            input_shape: TensorShape::new(1, 1, 8),
            layers: vec![
                LayerSpec::new(1, LayerKind::Input, (1, 1), 1, 0, 0),
                LayerSpec::new(2, LayerKind::Convolution, (1, 1), 1, 0, 8),
            ],
        })
        .unwrap();
        let plan = HorizontalPlan {
            partitions: 4,
            neurons: vec![vec![0; 4], vec![2, 3, 1, 2]],
            channels: vec![vec![2, 3, 1, 2], vec![2, 3, 1, 2]],
        };
        let vol = simulate_horizontal_volumes(&model, &plan);
        assert_eq!(vol.per_partition[2].external_in_elements, 7);
        assert_eq!(vol.remote_units[0].iter().sum::<u64>(), 3 * 8);
        assert!(vol.is_balanced());
    }
}
