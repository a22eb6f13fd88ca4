//! Analytical per-partition energy models for the four strategies.
//!
//! Each evaluator returns one [`EnergyBreakdown`] per partition, split into
//! computation, on-device (internal) communication and cross-device
//! (external) communication, plus a [`FleetSummary`] normalized to running
//! the whole model on one device.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::partition::{comm_heights, decompose_subpartitions, DataPlan, HorizontalPlan, Plan, SequentialPlan, VerticalPlan};
use crate::profile::DeviceProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// 1-based partition index.
    pub partition: usize,
    pub comp: f64,
    pub in_comm: f64,
    pub ex_comm: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(partition: usize, comp: f64, in_comm: f64, ex_comm: f64) -> Self {
        Self { partition, comp, in_comm, ex_comm, total: comp + in_comm + ex_comm }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetSummary {
    pub per_partition: Vec<EnergyBreakdown>,
    pub max_energy: f64,
    /// 1-based; lowest index on ties.
    pub max_partition: usize,
    pub single_device_total: f64,
    pub normalized_max: f64,
}

impl FleetSummary {
    pub fn comp_sum(&self) -> f64 {
        self.per_partition.iter().map(|b| b.comp).sum()
    }

    pub fn in_comm_sum(&self) -> f64 {
        self.per_partition.iter().map(|b| b.in_comm).sum()
    }

    pub fn ex_comm_sum(&self) -> f64 {
        self.per_partition.iter().map(|b| b.ex_comm).sum()
    }

    /// `max - min` of the partition totals.
    pub fn spread(&self) -> f64 {
        spread(&self.per_partition)
    }
}

pub(crate) fn max_total(parts: &[EnergyBreakdown]) -> f64 {
    parts.iter().map(|b| b.total).fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn spread(parts: &[EnergyBreakdown]) -> f64 {
    let min = parts.iter().map(|b| b.total).fold(f64::INFINITY, f64::min);
    max_total(parts) - min
}

/// Picks the maximum partition and normalizes it to `single_device_total`.
pub fn summarize(per_partition: Vec<EnergyBreakdown>, single_device_total: f64) -> Result<FleetSummary> {
    if per_partition.is_empty() {
        return Err(Error::Validation("cannot summarize an empty partition list".into()));
    }
    if !(single_device_total > 0.0) {
        return Err(Error::Validation(format!(
            "single-device energy must be positive to normalize, got {single_device_total}"
        )));
    }
    let mut arg = 0;
    for (k, b) in per_partition.iter().enumerate() {
        if b.total > per_partition[arg].total {
            arg = k;
        }
    }
    let max_energy = per_partition[arg].total;
    Ok(FleetSummary {
        max_partition: per_partition[arg].partition,
        max_energy,
        single_device_total,
        normalized_max: max_energy / single_device_total,
        per_partition,
    })
}

/// Per-layer energies pulled out of a profile for fast repeated evaluation.
#[derive(Debug, Clone)]
pub(crate) struct CostTable {
    pub comp: Vec<f64>,
    pub in_comm: Vec<f64>,
    pub ex_comm: Vec<f64>,
    pub send: Vec<f64>,
    pub recv: Vec<f64>,
}

impl CostTable {
    pub fn new(model: &NetworkModel, profile: &DeviceProfile) -> Result<Self> {
        profile.check_covers(model)?;
        let p = &profile.layer_profiles;
        Ok(Self {
            comp: p.iter().map(|l| l.comp_energy).collect(),
            in_comm: p.iter().map(|l| l.in_comm_energy).collect(),
            ex_comm: p.iter().map(|l| l.ex_comm_energy).collect(),
            send: p.iter().map(|l| l.send_energy).collect(),
            recv: p.iter().map(|l| l.recv_energy).collect(),
        })
    }

    pub fn layers(&self) -> usize {
        self.comp.len()
    }

    pub fn single_device_total(&self) -> f64 {
        self.comp.iter().sum::<f64>() + self.in_comm.iter().sum::<f64>()
    }

    /// External energy of a contiguous run `first..=last` (0-based): receive
    /// at the run head unless it holds the first layer, send at the run tail
    /// unless it holds the last layer.
    fn boundary(&self, first: usize, last: usize) -> f64 {
        let mut ex = 0.0;
        if first != 0 {
            ex += self.recv[first];
        }
        if last + 1 != self.layers() {
            ex += self.send[last];
        }
        ex
    }

    /// Energy of one contiguous group of layers (0-based inclusive bounds).
    pub fn group(&self, partition: usize, first: usize, last: usize) -> EnergyBreakdown {
        let comp = self.comp[first..=last].iter().sum();
        let in_comm = self.in_comm[first..=last].iter().sum();
        EnergyBreakdown::new(partition, comp, in_comm, self.boundary(first, last))
    }

    /// Breakdowns for a 0-based assignment vector with `partitions` groups.
    pub fn vertical(&self, assignment: &[usize], partitions: usize) -> Vec<EnergyBreakdown> {
        let mut comp = vec![0.0; partitions];
        let mut in_comm = vec![0.0; partitions];
        let mut ex = vec![0.0; partitions];
        let mut start = 0;
        for k in 0..assignment.len() {
            let p = assignment[k];
            comp[p] += self.comp[k];
            in_comm[p] += self.in_comm[k];
            if k + 1 == assignment.len() || assignment[k + 1] != p {
                ex[p] += self.boundary(start, k);
                start = k + 1;
            }
        }
        (0..partitions).map(|p| EnergyBreakdown::new(p + 1, comp[p], in_comm[p], ex[p])).collect()
    }
}

fn check_layers(what: &str, rows: usize, model: &NetworkModel) -> Result<()> {
    if rows != model.len() {
        return Err(Error::Mismatch(format!("{what} has {rows} layers but the model has {}", model.len())));
    }
    Ok(())
}

/// Data strategy: partition `j` computes the fraction `H^Y_i(j)/H^Y_i` of
/// every layer and fetches halo rows for every layer except the last.
pub fn energy_data(model: &NetworkModel, profile: &DeviceProfile, plan: &DataPlan) -> Result<FleetSummary> {
    check_layers("data plan", plan.heights.len(), model)?;
    plan.validate(model)?;
    let costs = CostTable::new(model, profile)?;
    let halos = comm_heights(model, plan);

    let parts = (0..plan.partitions)
        .map(|j| {
            let mut comp = 0.0;
            let mut in_comm = 0.0;
            let mut ex = 0.0;
            for (i, layer) in model.layers.iter().enumerate() {
                let rows = layer.out_shape.height as f64;
                let share = plan.heights[i][j] as f64 / rows;
                comp += share * costs.comp[i];
                in_comm += share * costs.in_comm[i];
                if i + 1 < model.len() {
                    ex += halos[i][j] as f64 / rows * costs.ex_comm[i];
                }
            }
            EnergyBreakdown::new(j + 1, comp, in_comm, ex)
        })
        .collect();
    summarize(parts, costs.single_device_total())
}

/// Horizontal strategy: partition `j` computes the channel fraction
/// `C^Y_i(j)/C^Y_i` of every layer and receives the remaining fraction of
/// every non-final layer's output from the other partitions.
pub fn energy_horizontal(model: &NetworkModel, profile: &DeviceProfile, plan: &HorizontalPlan) -> Result<FleetSummary> {
    check_layers("horizontal plan", plan.channels.len(), model)?;
    plan.validate(model)?;
    let costs = CostTable::new(model, profile)?;

    let parts = (0..plan.partitions)
        .map(|j| {
            let mut comp = 0.0;
            let mut in_comm = 0.0;
            let mut ex = 0.0;
            for (i, layer) in model.layers.iter().enumerate() {
                let share = plan.channels[i][j] as f64 / layer.out_shape.channels as f64;
                comp += share * costs.comp[i];
                in_comm += share * costs.in_comm[i];
                if i + 1 < model.len() {
                    ex += (1.0 - share) * costs.ex_comm[i];
                }
            }
            EnergyBreakdown::new(j + 1, comp, in_comm, ex)
        })
        .collect();
    summarize(parts, costs.single_device_total())
}

/// Sequential strategy: whole layers; only the group boundaries communicate.
pub fn energy_sequential(model: &NetworkModel, profile: &DeviceProfile, plan: &SequentialPlan) -> Result<FleetSummary> {
    plan.validate(model)?;
    let costs = CostTable::new(model, profile)?;
    let parts = plan
        .groups
        .iter()
        .enumerate()
        .map(|(k, &(first, last))| costs.group(k + 1, first - 1, last - 1))
        .collect();
    summarize(parts, costs.single_device_total())
}

/// Vertical strategy: every maximal run of consecutive layers inside a
/// partition pays its own receive and send, as a sequential group would.
pub fn energy_vertical(model: &NetworkModel, profile: &DeviceProfile, plan: &VerticalPlan) -> Result<FleetSummary> {
    plan.validate(model)?;
    let costs = CostTable::new(model, profile)?;
    let parts = decompose_subpartitions(plan)
        .iter()
        .enumerate()
        .map(|(j, runs)| {
            let mut comp = 0.0;
            let mut in_comm = 0.0;
            let mut ex = 0.0;
            for &(first, last) in runs {
                for i in first - 1..last {
                    comp += costs.comp[i];
                    in_comm += costs.in_comm[i];
                }
                ex += costs.boundary(first - 1, last - 1);
            }
            EnergyBreakdown::new(j + 1, comp, in_comm, ex)
        })
        .collect();
    summarize(parts, costs.single_device_total())
}

/// Dispatches to the evaluator matching the plan's strategy.
pub fn estimate(model: &NetworkModel, profile: &DeviceProfile, plan: &Plan) -> Result<FleetSummary> {
    match plan {
        Plan::Data(p) => energy_data(model, profile, p),
        Plan::Horizontal(p) => energy_horizontal(model, profile, p),
        Plan::Sequential(p) => energy_sequential(model, profile, p),
        Plan::Vertical(p) => energy_vertical(model, profile, p),
    }
}

/// Energy of the whole model on one device.
pub fn single_device_total(model: &NetworkModel, profile: &DeviceProfile) -> Result<f64> {
    Ok(CostTable::new(model, profile)?.single_device_total())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryLifetime {
    pub battery_joules: f64,
    pub power_watts: f64,
    pub seconds: f64,
    pub days: f64,
    pub images: u64,
}

/// How long a battery sustains continuous inference at the given per-image
/// energy and latency.
pub fn battery_lifetime(capacity_mah: f64, voltage_v: f64, energy_per_image_j: f64, time_per_image_s: f64) -> Result<BatteryLifetime> {
    for (name, v) in [
        ("capacity", capacity_mah),
        ("voltage", voltage_v),
        ("energy per image", energy_per_image_j),
        ("time per image", time_per_image_s),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Validation(format!("{name} must be positive, got {v}")));
        }
    }
    let battery_joules = capacity_mah * 3600.0 * voltage_v / 1000.0;
    let power_watts = energy_per_image_j / time_per_image_s;
    let seconds = battery_joules / power_watts;
    Ok(BatteryLifetime {
        battery_joules,
        power_watts,
        seconds,
        days: seconds / 86_400.0,
        images: (seconds / time_per_image_s).floor() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summarize_examples() {
        let parts = vec![EnergyBreakdown::new(1, 3.3, 0.0, 0.0), EnergyBreakdown::new(2, 3.3, 0.0, 0.0)];
        let s = summarize(parts, 6.6).unwrap();
        assert_eq!(s.normalized_max, 0.5);
        assert_eq!(s.max_partition, 1);

        let one = summarize(vec![EnergyBreakdown::new(1, 6.6, 0.0, 0.0)], 6.6).unwrap();
        assert_eq!(one.normalized_max, 1.0);

        let parts = vec![EnergyBreakdown::new(1, 2.6, 0.0, 0.0), EnergyBreakdown::new(2, 4.7, 0.0, 0.0)];
        let s = summarize(parts, 6.3).unwrap();
        assert!((s.normalized_max - 4.7 / 6.3).abs() < 1e-15);
        assert!((s.normalized_max - 0.746).abs() < 5e-4);
        assert_eq!(s.max_partition, 2);
    }

    #[test]
    fn summarize_rejects_bad_input() {
        assert!(summarize(vec![], 1.0).is_err());
        assert!(summarize(vec![EnergyBreakdown::new(1, 1.0, 0.0, 0.0)], 0.0).is_err());
    }

    #[test]
    fn lifetime_examples() {
        let small = battery_lifetime(18000.0, 19.0, 0.0175, 0.00565).unwrap();
        assert_eq!((small.days * 10.0).round() / 10.0, 4.6, "{small:?}");
        assert!((small.images as f64 - 70_354_286.0).abs() / 70_354_286.0 < 0.005);

        let large = battery_lifetime(18000.0, 19.0, 0.383, 0.0852).unwrap();
        assert_eq!((large.days * 10.0).round() / 10.0, 3.2, "{large:?}");
        assert!((large.images as f64 - 3_214_621.0).abs() / 3_214_621.0 < 0.005);

        let watt = battery_lifetime(18000.0, 19.0, 0.25, 0.25).unwrap();
        assert_eq!(watt.seconds, 1_231_200.0);
        assert_eq!(watt.seconds, watt.battery_joules);
    }

    #[test]
    fn lifetime_rejects_non_positive() {
        assert!(battery_lifetime(0.0, 19.0, 1.0, 1.0).is_err());
        assert!(battery_lifetime(1.0, 19.0, -1.0, 1.0).is_err());
    }
}
