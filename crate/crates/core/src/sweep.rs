//! Strategy × device-count sweeps of the maximum per-device energy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{estimate, single_device_total};
use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::partition::{check_feasible, Strategy};
use crate::planner::{make_plan, SearchMethod};
use crate::profile::DeviceProfile;

/// CSV columns: `strategy,device_count,max_energy_J,normalized_max,baseline_single_device_J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub strategy: Strategy,
    pub device_count: usize,
    #[serde(rename = "max_energy_J")]
    pub max_energy_j: f64,
    pub normalized_max: f64,
    #[serde(rename = "baseline_single_device_J")]
    pub baseline_single_device_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn get(&self, strategy: Strategy, device_count: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.strategy == strategy && r.device_count == device_count)
    }

    pub fn to_csv(&self) -> Result<String> {
        crate::report::to_csv(&self.rows)
    }
}

/// Plans and evaluates every strategy for 1..=`max_devices` devices.
///
/// Cells run in parallel; rows come back ordered by strategy, then device count.
pub fn run_sweep(model: &NetworkModel, profile: &DeviceProfile, max_devices: usize, method: &SearchMethod) -> Result<SweepReport> {
    if max_devices == 0 {
        return Err(Error::Validation("max devices must be at least 1".into()));
    }
    check_feasible(model, max_devices)?;
    let baseline = single_device_total(model, profile)?;

    let cells: Vec<(Strategy, usize)> =
        Strategy::ALL.iter().flat_map(|&s| (1..=max_devices).map(move |m| (s, m))).collect();
    let mut rows = cells
        .par_iter()
        .map(|&(strategy, m)| {
            let file = make_plan(model, profile, strategy, m, method)?;
            let summary = estimate(model, profile, &file.plan)?;
            Ok(SweepRow {
                strategy,
                device_count: m,
                max_energy_j: summary.max_energy,
                normalized_max: summary.normalized_max,
                baseline_single_device_j: baseline,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.strategy, r.device_count));
    Ok(SweepReport { rows })
}
