//! One entry point for producing a plan under any strategy.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::NetworkModel;
use crate::partition::{
    exhaustive_vertical, plan_data, plan_horizontal, plan_sequential_dp, plan_sequential_ga, plan_vertical_ga, GaConfig, Plan,
    PlanFile, PlannerInfo, Strategy,
};
use crate::profile::DeviceProfile;

/// How layer-granular strategies (sequential, vertical) are searched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SearchMethod {
    Genetic(GaConfig),
    /// Dynamic programming for sequential, exhaustive enumeration for vertical.
    Exact,
}

impl Default for SearchMethod {
    fn default() -> Self {
        SearchMethod::Genetic(GaConfig::default())
    }
}

pub fn make_plan(model: &NetworkModel, profile: &DeviceProfile, strategy: Strategy, partitions: usize, method: &SearchMethod) -> Result<PlanFile> {
    let (plan, planner) = match (strategy, method) {
        (Strategy::Data, _) => (Plan::Data(plan_data(model, partitions)?), info("balanced", None)),
        (Strategy::Horizontal, _) => (Plan::Horizontal(plan_horizontal(model, partitions)?), info("balanced", None)),
        (Strategy::Sequential, SearchMethod::Genetic(cfg)) => (
            Plan::Sequential(plan_sequential_ga(model, profile, partitions, cfg)?),
            info("genetic", Some(cfg.clone())),
        ),
        (Strategy::Sequential, SearchMethod::Exact) => {
            (Plan::Sequential(plan_sequential_dp(model, profile, partitions)?), info("dynamic_programming", None))
        }
        (Strategy::Vertical, SearchMethod::Genetic(cfg)) => (
            Plan::Vertical(plan_vertical_ga(model, profile, partitions, cfg)?),
            info("genetic", Some(cfg.clone())),
        ),
        (Strategy::Vertical, SearchMethod::Exact) => {
            (Plan::Vertical(exhaustive_vertical(model, profile, partitions)?), info("exhaustive", None))
        }
    };
    Ok(PlanFile { plan, planner: Some(planner) })
}

fn info(method: &str, ga: Option<GaConfig>) -> PlannerInfo {
    PlannerInfo { method: method.to_string(), ga }
}
