//! Tabular breakdown output.
//!
//! CSV columns, in order:
//! `strategy,partitions,partition_index,comp_J,in_comm_J,ex_comm_J,total_J,normalized_max`.
//! One row per partition, then a summary row whose `partition_index` is
//! `max` and whose energies are those of the maximum partition. On partition
//! rows `normalized_max` is that partition's total over the single-device
//! baseline.

use serde::{Deserialize, Serialize};

use crate::energy::FleetSummary;
use crate::error::Result;
use crate::partition::Strategy;

pub const SUMMARY_INDEX: &str = "max";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRow {
    pub strategy: String,
    pub partitions: usize,
    pub partition_index: String,
    #[serde(rename = "comp_J")]
    pub comp_j: f64,
    #[serde(rename = "in_comm_J")]
    pub in_comm_j: f64,
    #[serde(rename = "ex_comm_J")]
    pub ex_comm_j: f64,
    #[serde(rename = "total_J")]
    pub total_j: f64,
    pub normalized_max: f64,
}

pub fn breakdown_rows(strategy: Strategy, summary: &FleetSummary) -> Vec<BreakdownRow> {
    let partitions = summary.per_partition.len();
    let mut rows: Vec<BreakdownRow> = summary
        .per_partition
        .iter()
        .map(|b| BreakdownRow {
            strategy: strategy.to_string(),
            partitions,
            partition_index: b.partition.to_string(),
            comp_j: b.comp,
            in_comm_j: b.in_comm,
            ex_comm_j: b.ex_comm,
            total_j: b.total,
            normalized_max: b.total / summary.single_device_total,
        })
        .collect();
    let mut max = rows[summary.max_partition - 1].clone();
    max.partition_index = SUMMARY_INDEX.to_string();
    max.normalized_max = summary.normalized_max;
    rows.push(max);
    rows
}

/// Serializes any row type as CSV with a header line.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}
