//! Partition plans for the four distribution strategies.
//!
//! * data: every device runs every layer on a horizontal slice of each tensor;
//! * horizontal: every device runs every layer with a subset of its neurons;
//! * sequential: every device runs a contiguous range of layers;
//! * vertical: every device runs an arbitrary, non-empty set of layers.
//!
//! Partition indices are 1-based in plan documents and 0-based in slices.

mod exact;
mod ga;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LayerKind, LayerSpec, NetworkModel};

pub use exact::{exhaustive_vertical, plan_sequential_dp, EXHAUSTIVE_LIMIT};
pub use ga::{plan_sequential_ga, plan_vertical_ga, GaConfig, Objective};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Data,
    Horizontal,
    Sequential,
    Vertical,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Data, Strategy::Horizontal, Strategy::Sequential, Strategy::Vertical];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Data => "data",
            Strategy::Horizontal => "horizontal",
            Strategy::Sequential => "sequential",
            Strategy::Vertical => "vertical",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation(format!("unknown strategy '{s}' (expected data, horizontal, sequential or vertical)")))
    }
}

/// Per-layer output-height slices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataPlan {
    pub partitions: usize,
    /// `heights[layer][partition]`.
    pub heights: Vec<Vec<usize>>,
}

/// Per-layer neuron and output-channel groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HorizontalPlan {
    pub partitions: usize,
    /// `neurons[layer][partition]`; all zero for weightless layers.
    pub neurons: Vec<Vec<usize>>,
    /// `channels[layer][partition]`.
    pub channels: Vec<Vec<usize>>,
}

/// Contiguous layer ranges, as inclusive `(first_id, last_id)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequentialPlan {
    pub partitions: usize,
    pub groups: Vec<(usize, usize)>,
}

/// Free layer-to-partition assignment, `assignment[layer id - 1]` in `1..=partitions`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerticalPlan {
    pub partitions: usize,
    pub assignment: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "lowercase")]
pub enum Plan {
    Data(DataPlan),
    Horizontal(HorizontalPlan),
    Sequential(SequentialPlan),
    Vertical(VerticalPlan),
}

impl Plan {
    pub fn strategy(&self) -> Strategy {
        match self {
            Plan::Data(_) => Strategy::Data,
            Plan::Horizontal(_) => Strategy::Horizontal,
            Plan::Sequential(_) => Strategy::Sequential,
            Plan::Vertical(_) => Strategy::Vertical,
        }
    }

    pub fn partitions(&self) -> usize {
        match self {
            Plan::Data(p) => p.partitions,
            Plan::Horizontal(p) => p.partitions,
            Plan::Sequential(p) => p.partitions,
            Plan::Vertical(p) => p.partitions,
        }
    }

    pub fn validate(&self, model: &NetworkModel) -> Result<()> {
        match self {
            Plan::Data(p) => p.validate(model),
            Plan::Horizontal(p) => p.validate(model),
            Plan::Sequential(p) => p.validate(model),
            Plan::Vertical(p) => p.validate(model),
        }
    }
}

/// How a plan was produced; recorded in plan documents for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerInfo {
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga: Option<GaConfig>,
}

/// On-disk plan document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    #[serde(flatten)]
    pub plan: Plan,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planner: Option<PlannerInfo>,
}

impl PlanFile {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::error::parse_err(e.line(), e.to_string()))
    }
}

fn check_partitions(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Validation("a plan needs at least one partition".into()));
    }
    Ok(())
}

fn check_vectors(name: &str, rows: &[Vec<usize>], model: &NetworkModel, m: usize, total: impl Fn(&LayerSpec) -> usize) -> Result<()> {
    if rows.len() != model.len() {
        return Err(Error::Mismatch(format!("{name}: {} layer rows for a {}-layer model", rows.len(), model.len())));
    }
    for (layer, row) in model.layers.iter().zip(rows) {
        if row.len() != m {
            return Err(Error::Mismatch(format!("{name}: layer {} has {} entries, expected {m}", layer.id, row.len())));
        }
        let sum: usize = row.iter().sum();
        if sum != total(layer) {
            return Err(Error::Validation(format!(
                "{name}: layer {} entries sum to {sum}, expected {}",
                layer.id,
                total(layer)
            )));
        }
    }
    Ok(())
}

impl DataPlan {
    pub fn validate(&self, model: &NetworkModel) -> Result<()> {
        check_partitions(self.partitions)?;
        check_vectors("heights", &self.heights, model, self.partitions, |l| l.out_shape.height)
    }
}

impl HorizontalPlan {
    pub fn validate(&self, model: &NetworkModel) -> Result<()> {
        check_partitions(self.partitions)?;
        check_vectors("neurons", &self.neurons, model, self.partitions, |l| l.neurons)?;
        check_vectors("channels", &self.channels, model, self.partitions, |l| l.out_shape.channels)
    }
}

impl SequentialPlan {
    pub fn validate(&self, model: &NetworkModel) -> Result<()> {
        check_partitions(self.partitions)?;
        if self.groups.len() != self.partitions {
            return Err(Error::Validation(format!("{} groups for {} partitions", self.groups.len(), self.partitions)));
        }
        let mut next = 1;
        for &(first, last) in &self.groups {
            if first != next || last < first {
                return Err(Error::Validation(format!("group ({first}, {last}) is not a contiguous range starting at layer {next}")));
            }
            next = last + 1;
        }
        if next != model.len() + 1 {
            return Err(Error::Mismatch(format!("groups cover layers 1..{} but the model has {} layers", next - 1, model.len())));
        }
        Ok(())
    }

    /// Equivalent assignment vector (layer → 1-based partition).
    pub fn to_vertical(&self) -> VerticalPlan {
        let mut assignment = Vec::new();
        for (k, &(first, last)) in self.groups.iter().enumerate() {
            assignment.extend(std::iter::repeat_n(k + 1, last - first + 1));
        }
        VerticalPlan { partitions: self.partitions, assignment }
    }

    pub(crate) fn from_cuts(layers: usize, cuts: &[usize]) -> Self {
        let mut groups = Vec::with_capacity(cuts.len() + 1);
        let mut first = 1;
        for &c in cuts {
            groups.push((first, c));
            first = c + 1;
        }
        groups.push((first, layers));
        SequentialPlan { partitions: groups.len(), groups }
    }
}

impl VerticalPlan {
    pub fn validate(&self, model: &NetworkModel) -> Result<()> {
        check_partitions(self.partitions)?;
        if self.assignment.len() != model.len() {
            return Err(Error::Mismatch(format!(
                "assignment has {} entries for a {}-layer model",
                self.assignment.len(),
                model.len()
            )));
        }
        let mut used = vec![false; self.partitions];
        for (k, &p) in self.assignment.iter().enumerate() {
            if p == 0 || p > self.partitions {
                return Err(Error::Validation(format!("layer {} assigned to partition {p}, outside 1..={}", k + 1, self.partitions)));
            }
            used[p - 1] = true;
        }
        if let Some(p) = used.iter().position(|u| !u) {
            return Err(Error::Validation(format!("partition {} has no layers", p + 1)));
        }
        Ok(())
    }
}

/// Splits `total` units over `parts` slots as evenly as possible.
///
/// The `total % parts` extra units go to consecutive slots starting at
/// `(layer_index - 1) mod parts`, wrapping around, so the remainder rotates
/// from layer to layer. When `total < parts` this places the nonzero slots
/// round-robin by layer.
pub fn split_balanced(total: usize, parts: usize, layer_index: usize) -> Vec<usize> {
    assert!(parts >= 1, "split_balanced needs at least one slot");
    let base = total / parts;
    let extra = total % parts;
    let offset = layer_index.saturating_sub(1) % parts;
    let mut out = vec![base; parts];
    for k in 0..extra {
        out[(offset + k) % parts] += 1;
    }
    out
}

/// Input rows needed to produce `out_height` output rows.
pub fn required_input_height(out_height: usize, stride: usize, window_h: usize) -> usize {
    if out_height == 0 {
        0
    } else {
        (out_height - 1) * stride + window_h
    }
}

/// Rows of the producer's output that partition `part` of `consumer` needs
/// but partition `part` of the producer does not compute.
///
/// `heights` is the producer's per-partition output-height vector and
/// `next_heights` the consumer's. Rows are half-open intervals over the
/// producer tensor: partition `part` produces `[x, y)` and needs `[a, b)`.
/// The needed interval is shifted by the consumer's padding and clipped to
/// the tensor, so windows overlapping padding never request rows for it.
pub fn comm_height(consumer: &LayerSpec, heights: &[usize], next_heights: &[usize], part: usize) -> usize {
    let rows: usize = heights.iter().sum();
    let out_rows = next_heights[part];
    if out_rows == 0 {
        return 0;
    }

    let x = heights[..part].iter().sum::<usize>() as i64;
    let y = x + heights[part] as i64;

    let first_out = next_heights[..part].iter().sum::<usize>() as i64;
    let a_raw = first_out * consumer.stride as i64 - consumer.padding as i64;
    let b_raw = a_raw + required_input_height(out_rows, consumer.stride, consumer.window_h) as i64;
    let a = a_raw.max(0);
    let b = b_raw.min(rows as i64);
    if b <= a {
        return 0;
    }

    let h = match (a < x, y < b) {
        (true, false) => x - a,
        (true, true) => x - a + b - y,
        (false, true) => b - y,
        (false, false) => 0,
    };
    // Disjoint produced/needed intervals overcount above; never ask for more than is needed.
    h.clamp(0, b - a) as usize
}

/// `comm_heights(model, plan)[i][j]`: halo rows partition `j` of layer
/// `i + 2` fetches from layer `i + 1`'s output (one row per layer pair).
pub fn comm_heights(model: &NetworkModel, plan: &DataPlan) -> Vec<Vec<usize>> {
    model
        .layers
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            (0..plan.partitions)
                .map(|j| comm_height(&pair[1], &plan.heights[i], &plan.heights[i + 1], j))
                .collect()
        })
        .collect()
}

pub fn plan_data(model: &NetworkModel, partitions: usize) -> Result<DataPlan> {
    check_partitions(partitions)?;
    let heights = model
        .layers
        .iter()
        .map(|l| split_balanced(l.out_shape.height, partitions, l.id))
        .collect();
    Ok(DataPlan { partitions, heights })
}

/// Whether a layer has neurons that the horizontal strategy can group.
pub fn horizontal_applicable(layer: &LayerSpec) -> bool {
    !matches!(layer.kind, LayerKind::Input | LayerKind::Softmax)
}

pub fn plan_horizontal(model: &NetworkModel, partitions: usize) -> Result<HorizontalPlan> {
    check_partitions(partitions)?;
    let mut neurons = Vec::with_capacity(model.len());
    let mut channels = Vec::with_capacity(model.len());
    for l in &model.layers {
        channels.push(split_balanced(l.out_shape.channels, partitions, l.id));
        neurons.push(if l.kind.is_weighted() {
            split_balanced(l.neurons, partitions, l.id)
        } else {
            vec![0; partitions]
        });
    }
    Ok(HorizontalPlan { partitions, neurons, channels })
}

/// Splits each vertical partition into maximal runs of consecutive layers.
///
/// Returns, per partition, its runs as inclusive `(first_id, last_id)` pairs
/// in increasing layer order.
pub fn decompose_subpartitions(plan: &VerticalPlan) -> Vec<Vec<(usize, usize)>> {
    let mut runs = vec![Vec::new(); plan.partitions];
    let mut start = 0;
    for k in 1..=plan.assignment.len() {
        if k == plan.assignment.len() || plan.assignment[k] != plan.assignment[start] {
            runs[plan.assignment[start] - 1].push((start + 1, k));
            start = k;
        }
    }
    runs
}

pub(crate) fn check_feasible(model: &NetworkModel, partitions: usize) -> Result<()> {
    check_partitions(partitions)?;
    if partitions > model.len() {
        return Err(Error::Infeasible { partitions, layers: model.len() });
    }
    Ok(())
}
