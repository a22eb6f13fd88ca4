mod common;

use cnnpart_core::fixtures;
use cnnpart_core::{
    energy_data, energy_horizontal, energy_sequential, energy_vertical, estimate, plan_data, plan_horizontal, single_device_total,
    DataPlan, HorizontalPlan, LayerKind, LayerProfile, Plan, SequentialPlan, VerticalPlan,
};
use common::{chain, flat_chain, profile, rel_close};

fn lp(comp: f64, in_comm: f64, ex: f64, send: f64, recv: f64) -> LayerProfile {
    LayerProfile { comp_energy: comp, comp_time: 1.0, in_comm_energy: in_comm, ex_comm_energy: ex, send_energy: send, recv_energy: recv }
}

#[test]
fn data_halves_without_halo() {
    let model = chain((2, 2, 2), vec![(LayerKind::Activation, (1, 1), 1, 0, 0)]);
    let prof = profile(vec![lp(4.0, 0.4, 0.0, 0.0, 0.0), lp(2.0, 0.2, 0.0, 0.0, 0.0)]);
    let plan = DataPlan { partitions: 2, heights: vec![vec![1, 1], vec![1, 1]] };
    let s = energy_data(&model, &prof, &plan).unwrap();
    for b in &s.per_partition {
        assert!(rel_close(b.total, 3.3, 1e-12), "{b:?}");
        assert_eq!(b.ex_comm, 0.0);
    }
}

#[test]
fn data_halo_row_charges_its_share() {
    let model = chain((6, 5, 2), vec![(LayerKind::Convolution, (3, 3), 1, 0, 4)]);
    let prof = profile(vec![lp(0.0, 0.0, 1.2, 0.0, 0.0), lp(1.0, 0.0, 9.0, 0.0, 0.0)]);
    let plan = DataPlan { partitions: 2, heights: vec![vec![3, 3], vec![2, 2]] };
    let s = energy_data(&model, &prof, &plan).unwrap();
    for b in &s.per_partition {
        // The last layer's external figure never counts.
        assert!(rel_close(b.ex_comm, 0.2, 1e-12), "{b:?}");
    }
}

#[test]
fn horizontal_halves_pay_half_the_transfer() {
    let model = chain((2, 2, 2), vec![(LayerKind::Convolution, (1, 1), 1, 0, 2)]);
    let prof = profile(vec![lp(4.0, 0.4, 1.0, 0.0, 0.0), lp(2.0, 0.2, 5.0, 0.0, 0.0)]);
    let plan = HorizontalPlan { partitions: 2, neurons: vec![vec![0, 0], vec![1, 1]], channels: vec![vec![1, 1], vec![1, 1]] };
    let s = energy_horizontal(&model, &prof, &plan).unwrap();
    for b in &s.per_partition {
        assert!(rel_close(b.total, 3.8, 1e-12), "{b:?}");
    }
}

fn three_layer() -> (cnnpart_core::NetworkModel, cnnpart_core::DeviceProfile) {
    let prof = profile(vec![lp(2.0, 0.1, 0.0, 0.5, 0.0), lp(3.0, 0.1, 0.0, 0.3, 0.4), lp(1.0, 0.1, 0.0, 0.0, 0.3)]);
    (flat_chain(3), prof)
}

#[test]
fn sequential_boundary_cases() {
    let (model, prof) = three_layer();
    let two = SequentialPlan { partitions: 2, groups: vec![(1, 1), (2, 3)] };
    let s = energy_sequential(&model, &prof, &two).unwrap();
    assert!(rel_close(s.per_partition[0].total, 2.6, 1e-12));
    assert!(rel_close(s.per_partition[1].total, 3.0 + 1.0 + 0.2 + 0.4, 1e-12));
    assert!(rel_close(s.per_partition[1].total, 4.6, 1e-12));

    let three = SequentialPlan { partitions: 3, groups: vec![(1, 1), (2, 2), (3, 3)] };
    let s = energy_sequential(&model, &prof, &three).unwrap();
    assert!(rel_close(s.per_partition[1].total, 3.8, 1e-12));
    assert!(rel_close(s.per_partition[2].total, 1.0 + 0.1 + 0.3, 1e-12));

    let one = SequentialPlan { partitions: 1, groups: vec![(1, 3)] };
    let s = energy_sequential(&model, &prof, &one).unwrap();
    assert_eq!(s.per_partition[0].ex_comm, 0.0);
    assert_eq!(s.normalized_max, 1.0);
}

#[test]
fn vertical_runs_pay_their_own_boundaries() {
    let model = flat_chain(4);
    let prof = profile(vec![
        lp(1.0, 0.0, 0.0, 0.11, 0.0),
        lp(1.0, 0.0, 0.0, 0.13, 0.17),
        lp(1.0, 0.0, 0.0, 0.19, 0.23),
        lp(1.0, 0.0, 0.0, 0.0, 0.29),
    ]);
    let plan = VerticalPlan { partitions: 2, assignment: vec![1, 2, 1, 2] };
    let s = energy_vertical(&model, &prof, &plan).unwrap();
    assert!(rel_close(s.per_partition[0].ex_comm, 0.11 + 0.23 + 0.19, 1e-12));
    assert!(rel_close(s.per_partition[1].ex_comm, 0.17 + 0.13 + 0.29, 1e-12));
}

fn all_strategies(model: &cnnpart_core::NetworkModel, m: usize, prof: &cnnpart_core::DeviceProfile) -> Vec<Plan> {
    let seq = cnnpart_core::plan_sequential_dp(model, prof, m).unwrap();
    vec![
        Plan::Data(plan_data(model, m).unwrap()),
        Plan::Horizontal(plan_horizontal(model, m).unwrap()),
        Plan::Vertical(seq.to_vertical()),
        Plan::Sequential(seq),
    ]
}

#[test]
fn one_partition_is_one_device_for_every_strategy() {
    for f in fixtures::ALL {
        let (model, prof) = f.load().unwrap();
        let base = single_device_total(&model, &prof).unwrap();
        for plan in all_strategies(&model, 1, &prof) {
            let s = estimate(&model, &prof, &plan).unwrap();
            assert!(rel_close(s.max_energy, base, 1e-12), "{} {}", f.name, plan.strategy());
            assert_eq!(s.per_partition[0].ex_comm, 0.0);
        }
    }
}

#[test]
fn computation_is_conserved() {
    for f in fixtures::ALL {
        let (model, prof) = f.load().unwrap();
        let comp: f64 = prof.layer_profiles.iter().map(|l| l.comp_energy).sum();
        let in_comm: f64 = prof.layer_profiles.iter().map(|l| l.in_comm_energy).sum();
        for m in 1..=4 {
            for plan in all_strategies(&model, m, &prof) {
                let s = estimate(&model, &prof, &plan).unwrap();
                assert!(rel_close(s.comp_sum(), comp, 1e-12), "{} {} M = {m}", f.name, plan.strategy());
                assert!(rel_close(s.in_comm_sum(), in_comm, 1e-12), "{} {} M = {m}", f.name, plan.strategy());
                for b in &s.per_partition {
                    assert_eq!(b.total, b.comp + b.in_comm + b.ex_comm);
                }
            }
        }
    }
}

#[test]
fn horizontal_fleet_transfer_is_m_minus_one_copies() {
    for f in fixtures::ALL {
        let (model, prof) = f.load().unwrap();
        let ex: f64 = prof.layer_profiles[..model.len() - 1].iter().map(|l| l.ex_comm_energy).sum();
        for m in 1..=6 {
            let s = energy_horizontal(&model, &prof, &plan_horizontal(&model, m).unwrap()).unwrap();
            assert!(rel_close(s.ex_comm_sum(), (m - 1) as f64 * ex, 1e-12), "{} M = {m}", f.name);
        }
    }
}

#[test]
fn contiguous_vertical_equals_sequential() {
    for f in fixtures::ALL {
        let (model, prof) = f.load().unwrap();
        for m in 1..=5 {
            let seq = cnnpart_core::plan_sequential_dp(&model, &prof, m).unwrap();
            let a = energy_sequential(&model, &prof, &seq).unwrap();
            let b = energy_vertical(&model, &prof, &seq.to_vertical()).unwrap();
            assert_eq!(a, b, "{} M = {m}", f.name);
        }
    }
}

#[test]
fn scaling_the_profile_scales_every_figure() {
    let (model, prof) = fixtures::FC_HEAVY.load().unwrap();
    let scaled = prof.scaled(3.5);
    for m in 1..=4 {
        for plan in all_strategies(&model, m, &prof) {
            let a = estimate(&model, &prof, &plan).unwrap();
            let b = estimate(&model, &scaled, &plan).unwrap();
            assert_eq!(a.max_partition, b.max_partition);
            assert!(rel_close(a.normalized_max, b.normalized_max, 1e-12));
            for (x, y) in a.per_partition.iter().zip(&b.per_partition) {
                for (u, v) in [(x.comp, y.comp), (x.in_comm, y.in_comm), (x.ex_comm, y.ex_comm), (x.total, y.total)] {
                    assert!(rel_close(u * 3.5, v, 1e-12));
                }
            }
        }
    }
}

#[test]
fn zero_comm_data_reduces_to_height_share() {
    let (model, prof) = fixtures::COMPUTE_HEAVY_ZERO_COMM.load().unwrap();
    let comp: Vec<f64> = prof.layer_profiles.iter().map(|l| l.comp_energy).collect();
    let total: f64 = comp.iter().sum();
    for m in [2, 4, 8] {
        let plan = plan_data(&model, m).unwrap();
        let s = energy_data(&model, &prof, &plan).unwrap();
        let share = (0..m)
            .map(|j| {
                model.layers.iter().enumerate().map(|(i, l)| plan.heights[i][j] as f64 / l.out_shape.height as f64 * comp[i]).sum::<f64>()
                    / total
            })
            .fold(0.0, f64::max);
        assert!((s.normalized_max - share).abs() < 1e-9);
        assert!((s.normalized_max - 1.0 / m as f64).abs() < 1e-9);
    }
}

#[test]
fn shrinking_every_share_never_raises_computation() {
    let (model, prof) = fixtures::EMOTION_FER.load().unwrap();
    let wide = plan_data(&model, 2).unwrap();
    let narrow = plan_data(&model, 4).unwrap();
    let a = energy_data(&model, &prof, &wide).unwrap();
    let b = energy_data(&model, &prof, &narrow).unwrap();
    // Partition 1 of four never holds more rows than partition 1 of two.
    assert!(wide.heights.iter().zip(&narrow.heights).all(|(w, n)| n[0] <= w[0]));
    assert!(b.per_partition[0].comp <= a.per_partition[0].comp);
}

#[test]
fn mismatched_plans_are_rejected() {
    let (model, prof) = fixtures::FC_HEAVY.load().unwrap();
    let mut plan = plan_data(&model, 2).unwrap();
    plan.heights.pop();
    assert!(energy_data(&model, &prof, &plan).is_err());
    let mut plan = plan_data(&model, 2).unwrap();
    plan.heights[1][0] += 1;
    assert!(energy_data(&model, &prof, &plan).is_err());
    let bad = VerticalPlan { partitions: 3, assignment: vec![1; 10] };
    assert!(energy_vertical(&model, &prof, &bad).is_err());
}
