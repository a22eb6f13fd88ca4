//! VGG-16 height and neuron splits for one to four partitions, compared as
//! multisets per layer against the published partition table.

mod common;

use std::collections::BTreeMap;

use cnnpart_core::fixtures::VGG16;
use cnnpart_core::{plan_data, plan_horizontal, NetworkModel};
use common::sorted;
use serde::Deserialize;

#[derive(Deserialize)]
struct Table {
    data: BTreeMap<usize, Vec<Vec<usize>>>,
    horizontal: BTreeMap<usize, Vec<Option<Vec<usize>>>>,
}

fn table() -> Table {
    serde_json::from_str(include_str!("golden/vgg16_partitions.json")).unwrap()
}

fn vgg() -> NetworkModel {
    VGG16.load().unwrap().0
}

#[test]
fn vgg16_height_splits_match_table() {
    let model = vgg();
    for (&m, expected) in &table().data {
        let plan = plan_data(&model, m).unwrap();
        for (i, want) in expected.iter().enumerate() {
            assert_eq!(sorted(plan.heights[i].clone()), sorted(want.clone()), "M = {m}, layer {}", i + 1);
        }
    }
}

#[test]
fn vgg16_neuron_splits_match_table() {
    let model = vgg();
    for (&m, expected) in &table().horizontal {
        let plan = plan_horizontal(&model, m).unwrap();
        for (i, want) in expected.iter().enumerate() {
            let layer = &model.layers[i];
            match want {
                None => assert!(plan.neurons[i].iter().all(|&n| n == 0), "layer {} has no neurons to split", layer.id),
                Some(want) => {
                    let got = if layer.kind.is_weighted() { &plan.neurons[i] } else { &plan.channels[i] };
                    assert_eq!(sorted(got.clone()), sorted(want.clone()), "M = {m}, layer {}", layer.id);
                }
            }
        }
    }
}

#[test]
fn single_unit_layers_rotate_round_robin() {
    let model = vgg();
    for m in 2..=4 {
        let plan = plan_data(&model, m).unwrap();
        let owners: Vec<usize> = (19..23).map(|i| plan.heights[i].iter().position(|&h| h == 1).unwrap()).collect();
        for w in owners.windows(2) {
            assert_eq!(w[1], (w[0] + 1) % m, "M = {m}: {owners:?}");
        }
    }
}

#[test]
fn rotating_remainder_spreads_rows_fairly() {
    let model = vgg();
    // Beyond four partitions the 1-row layers dominate the remainder pattern
    // (2.24% at M = 8), so the 2% bound is asserted over the published range.
    for m in 2..=4 {
        let plan = plan_data(&model, m).unwrap();
        let totals: Vec<usize> = (0..m).map(|j| plan.heights.iter().map(|row| row[j]).sum()).collect();
        let max = *totals.iter().max().unwrap() as f64;
        let min = *totals.iter().min().unwrap() as f64;
        assert!((max - min) / max < 0.02, "M = {m}: {totals:?}");
    }
}
