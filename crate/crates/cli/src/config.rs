use std::path::PathBuf;

use clap::{ArgGroup, Parser, ValueEnum};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Dj,
    Or,
    Sigma2,
    Sigma,
    Pi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Disj,
    Eqprime,
    Ac0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Run black-box algorithms, communication protocols and rank witnesses.
#[derive(Parser, Debug, Clone)]
#[command(name = "qcomm", version, about)]
#[command(group(ArgGroup::new("task").required(true).args(["algo", "protocol", "rank"])))]
pub struct Cli {
    /// Query algorithm to run.
    #[arg(long, value_enum)]
    pub algo: Option<Algo>,

    /// Two-party protocol to run.
    #[arg(long, value_enum)]
    pub protocol: Option<Problem>,

    /// Communication matrix rank for a predicate (disj, eq, ip, disjointness).
    #[arg(long)]
    pub rank: Option<String>,

    /// Input bits: `3`, a range `1..5` or a list `2,4,6`.
    #[arg(long)]
    pub n: Option<String>,

    /// Quantifier block widths, outermost first, e.g. `1,2`.
    #[arg(long)]
    pub widths: Option<String>,

    /// Repetition count, or one per level for nested runs.
    #[arg(long)]
    pub k: Option<String>,

    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Use the double-exponential parameters `k = 2^(n / (delta d))`.
    #[arg(long)]
    pub delta: Option<f64>,

    /// Oracle file(s) `{"n": .., "bits": ".."}`; two for protocols.
    #[arg(long)]
    pub oracle: Vec<PathBuf>,

    /// Oracle generator(s): all-zero, all-one, single-one[:x], random,
    /// balanced, bits:<table>; for protocols also equal, disjoint,
    /// half-distance, promise.
    #[arg(long)]
    pub gen: Vec<String>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,

    /// Qubit cap for state-vector runs.
    #[arg(long)]
    pub cap: Option<usize>,

    /// Pointwise combiner for ac0: and, or, xor or four table bits.
    #[arg(long, default_value = "and")]
    pub combiner: String,

    /// Instances per value of n.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

pub fn parse_list(field: &'static str, text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Validation(format!("--{field}: cannot parse {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
}

impl Cli {
    pub fn ns(&self) -> Result<Option<Vec<usize>>, CliError> {
        self.n.as_deref().map(|t| parse_list("n", t)).transpose()
    }

    pub fn widths(&self) -> Result<Option<Vec<usize>>, CliError> {
        self.widths.as_deref().map(|t| parse_list("widths", t)).transpose()
    }

    pub fn ks(&self) -> Result<Option<Vec<usize>>, CliError> {
        let ks = self.k.as_deref().map(|t| parse_list("k", t)).transpose()?;
        if ks.as_ref().is_some_and(|ks| ks.contains(&0)) {
            return Err(CliError::Validation("--k: repetition counts must be positive".into()));
        }
        Ok(ks)
    }

    pub fn task_name(&self) -> String {
        if let Some(a) = self.algo {
            format!("{a:?}").to_lowercase()
        } else if let Some(p) = self.protocol {
            format!("{p:?}").to_lowercase()
        } else {
            format!("rank-{}", self.rank.clone().unwrap_or_default())
        }
    }
}
