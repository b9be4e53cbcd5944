use std::io::Write;

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

/// One instance. Fields that do not apply to a task are empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Row {
    pub task: String,
    pub n: usize,
    pub instance: usize,
    /// Compact JSON of the parameters the run used.
    pub params: String,
    /// Truth table, or `g/h` for protocols.
    pub oracle: String,
    pub answer: Option<bool>,
    pub prob_one: Option<f64>,
    pub success_prob: Option<f64>,
    pub queries: Option<u64>,
    pub query_constant: Option<f64>,
    pub comm_qubits: Option<u64>,
    pub one_way: Option<bool>,
    pub rank: Option<usize>,
    pub side: Option<usize>,
    /// Seconds; reported, never compared.
    pub wall_time: f64,
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub seed: u64,
    pub date: String,
    pub command: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SweepResult {
    pub metadata: Metadata,
    pub rows: Vec<Row>,
}

impl SweepResult {
    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Io {
            path: "output".into(),
            source: e,
        };
        match format {
            Format::Json => {
                let mut out = out;
                serde_json::to_writer_pretty(&mut out, self).map_err(|e| CliError::Invariant(e.to_string()))?;
                writeln!(out).map_err(io)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                for row in &self.rows {
                    w.serialize(row).map_err(|e| CliError::Invariant(e.to_string()))?;
                }
                w.flush().map_err(io)
            }
        }
    }
}
