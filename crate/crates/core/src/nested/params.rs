use serde::{Deserialize, Serialize};

use crate::algorithms::{RunSchedule, Sense};
use crate::error::{Error, Result};

/// Repetition count used for the outermost quantifier.
pub const OUTER_K: usize = 3;
/// Default accuracy target for the inner gates of a two-level evaluation.
pub const DEFAULT_EPSILON: f64 = 1.0 / 12.0;
/// Largest repetition count `double_exp_params` will hand out by default.
pub const DEFAULT_K_CAP: usize = 64;

/// Parameters of a nested quantifier evaluation. Level `i` has
/// `widths[i]` variables and `ks[i]` repetitions; level 0 is outermost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxParams {
    pub n: usize,
    pub widths: Vec<usize>,
    pub ks: Vec<usize>,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl ApproxParams {
    pub fn new(n: usize, widths: Vec<usize>, ks: Vec<usize>, epsilon: f64) -> Result<Self> {
        let p = ApproxParams {
            n,
            widths,
            ks,
            epsilon,
            delta: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// `k_1 = 3` and `k_i = 5n` for the inner levels.
    pub fn sigma_default(n: usize, widths: Vec<usize>) -> Result<Self> {
        let d = widths.len();
        let ks = (0..d).map(|i| if i == 0 { OUTER_K } else { 5 * n.max(1) }).collect();
        Self::new(n, widths, ks, DEFAULT_EPSILON)
    }

    /// Two levels `(n - m, m)` with the inner repetition count from
    /// [`choose_k`].
    pub fn sigma2(n: usize, m: usize, epsilon: f64) -> Result<Self> {
        if m > n {
            return Err(Error::invalid("m", format!("{m} exceeds n = {n}")));
        }
        Self::new(n, vec![n - m, m], vec![OUTER_K, choose_k(n, m, epsilon)?], epsilon)
    }

    pub fn depth(&self) -> usize {
        self.widths.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.widths.is_empty() {
            return Err(Error::invalid("widths", "at least one level is required"));
        }
        let total: usize = self.widths.iter().sum();
        if total != self.n {
            return Err(Error::invalid(
                "widths",
                format!("{:?} sum to {total}, expected n = {}", self.widths, self.n),
            ));
        }
        if self.ks.len() != self.widths.len() {
            return Err(Error::invalid(
                "ks",
                format!("{} repetition counts for {} levels", self.ks.len(), self.widths.len()),
            ));
        }
        if self.ks.contains(&0) {
            return Err(Error::invalid("ks", "repetition counts must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid("epsilon", format!("{} is not in (0, 1)", self.epsilon)));
        }
        if let Some(delta) = self.delta {
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(Error::invalid("delta", format!("{delta} is not positive")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("parameters serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: ApproxParams = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    /// Levels in alternation order starting with an OR block. Empty levels
    /// are dropped and neighbours of equal sense merged (keeping the larger
    /// repetition count), so the result strictly alternates.
    pub(crate) fn levels(&self, first: Sense) -> Vec<Level> {
        let mut out: Vec<Level> = Vec::new();
        let mut sense = first;
        for (w, k) in self.widths.iter().zip(&self.ks) {
            if *w > 0 {
                match out.last_mut() {
                    Some(last) if last.sense == sense => {
                        last.width += w;
                        last.k = last.k.max(*k);
                    }
                    _ => out.push(Level::new(*w, sense, *k)),
                }
            }
            sense = sense.flip();
        }
        for level in &mut out {
            level.schedule = RunSchedule::ladder(level.width);
        }
        out
    }
}

/// One quantifier block as seen by the deciders.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub width: usize,
    pub sense: Sense,
    pub k: usize,
    pub schedule: RunSchedule,
}

impl Level {
    pub fn new(width: usize, sense: Sense, k: usize) -> Self {
        Level {
            width,
            sense,
            k,
            schedule: RunSchedule::ladder(width),
        }
    }

    /// Search runs in one application of this level's decider.
    pub fn runs(&self) -> usize {
        self.k * self.schedule.runs().len()
    }
}

/// Smallest integer `k >= 2(n - m) + 2 log2(2 / epsilon)`.
pub fn choose_k(n: usize, m: usize, epsilon: f64) -> Result<usize> {
    if m > n {
        return Err(Error::invalid("m", format!("{m} exceeds n = {n}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("epsilon", format!("{epsilon} is not in (0, 1)")));
    }
    let bound = 2.0 * (n - m) as f64 + 2.0 * (2.0 / epsilon).log2();
    // absorb rounding noise so exact integers are not bumped up
    Ok((bound - 1e-12).ceil().max(1.0) as usize)
}

/// Parameters of the double-exponential-accuracy variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleExpParams {
    pub params: ApproxParams,
    /// `2^(n / (delta d))` before rounding.
    pub k_exact: f64,
    /// `log2` of the implied error target, `-(2^(n/(delta d) - 1))`.
    pub epsilon_log2: f64,
}

/// All `k_i = ceil(2^(n/(delta d)))` and `epsilon = 2^-(2^(n/(delta d) - 1))`.
/// Widths are split as evenly as possible, outer levels taking the extra
/// bits. Fails when `k` would exceed `k_cap`.
pub fn double_exp_params(n: usize, d: usize, delta: f64, k_cap: usize) -> Result<DoubleExpParams> {
    if d == 0 {
        return Err(Error::invalid("d", "depth must be at least 1"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid("delta", format!("{delta} is not positive")));
    }
    let exponent = n as f64 / (delta * d as f64);
    let k_exact = exponent.exp2();
    let k = (k_exact - 1e-12).ceil().max(1.0);
    if !k.is_finite() || k > k_cap as f64 {
        return Err(Error::Resource {
            what: "repetition count",
            requested: if k.is_finite() { k as usize } else { usize::MAX },
            cap: k_cap,
            detail: format!(
                " (repetition count 2^{exponent:.3} for n = {n}, d = {d}, delta = {delta}; \
                 every level repeats its search this often and the cost multiplies across levels)"
            ),
        });
    }
    let k = k as usize;
    let widths = (0..d).map(|i| n / d + usize::from(i < n % d)).collect();
    let epsilon_log2 = -(exponent - 1.0).exp2();
    let params = ApproxParams {
        n,
        widths,
        ks: vec![k; d],
        epsilon: epsilon_log2.exp2().max(f64::MIN_POSITIVE),
        delta: Some(delta),
    };
    Ok(DoubleExpParams {
        params,
        k_exact,
        epsilon_log2,
    })
}
