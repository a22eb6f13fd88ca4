//! Partition planning and per-device energy estimation for CNN inference
//! spread over several edge devices.
//!
//! A [`NetworkModel`] is a chain of layers with inferred tensor shapes; a
//! [`DeviceProfile`] holds per-layer energies measured (or synthesized) on one
//! device. Four strategies split the work:
//!
//! * **data**: every device computes a band of output rows of every layer;
//! * **horizontal**: every device computes a group of output channels of every layer;
//! * **sequential**: every device runs a contiguous range of whole layers;
//! * **vertical**: every device runs an arbitrary set of whole layers.
//!
//! [`estimate`] returns per-device computation, internal and external
//! communication energy for a [`Plan`], normalized to one device running the
//! whole model.

mod document;
pub mod energy;
pub mod error;
pub mod fixtures;
pub mod model;
pub mod oracle;
pub mod partition;
pub mod planner;
pub mod profile;
pub mod report;
pub mod sweep;
pub mod synthetic;

pub use energy::{
    battery_lifetime, energy_data, energy_horizontal, energy_sequential, energy_vertical, estimate, single_device_total,
    summarize, BatteryLifetime, EnergyBreakdown, FleetSummary,
};
pub use error::{Error, Result};
pub use model::{infer_shapes, output_extent, parse_model, LayerKind, LayerSpec, NetworkModel, TensorShape};
pub use oracle::{simulate_data_volumes, simulate_horizontal_volumes, CommVolumes, PartitionVolume};
pub use partition::{
    comm_height, comm_heights, decompose_subpartitions, exhaustive_vertical, plan_data, plan_horizontal, plan_sequential_dp,
    plan_sequential_ga, plan_vertical_ga, required_input_height, split_balanced, DataPlan, GaConfig, HorizontalPlan,
    Objective, Plan, PlanFile, PlannerInfo, SequentialPlan, Strategy, VerticalPlan, EXHAUSTIVE_LIMIT,
};
pub use planner::{make_plan, SearchMethod};
pub use profile::{comm_energy, load_profile, synthesize_profile, CommCostModel, DeviceProfile, LayerProfile};
pub use report::{breakdown_rows, BreakdownRow};
pub use sweep::{run_sweep, SweepReport, SweepRow};
