//! Nested quantifier evaluation: a measurement-free OR/AND decider `G`,
//! the approximate gate `V = G, CNOT, G^dag`, and the alternating
//! evaluators built from them.
//!
//! Probabilities are computed exactly by the factored engine in
//! [`engine`]; [`dense`] builds the same deciders gate by gate so small
//! instances can be checked on a full state vector.

pub mod dense;
mod engine;
mod params;

use serde::{Deserialize, Serialize};

use crate::algorithms::{search_decider, DeciderResult, RunSchedule, Sense};
use crate::circuit::{circuit_queries, run_from_zero, OracleBackend, TableOracle};
use crate::error::{Error, Result};
use crate::oracle::{check_widths, classical_predicate, OracleTable, Predicate};
use crate::state::{qubits, StateVector, DEFAULT_QUBIT_CAP};

pub use engine::DEFAULT_WORD_BUDGET;
pub use params::{
    choose_k, double_exp_params, ApproxParams, DoubleExpParams, Level, DEFAULT_EPSILON, DEFAULT_K_CAP, OUTER_K,
};

use engine::Engine;

/// A unitary decider for `g(x) = Q_y g'(x, y)` where `x` are the first
/// `control_width` inputs of `f`.
///
/// Register layout of the gate built from it (see [`UnitaryDecider::circuit`]):
/// `[z, x (control_width), ans, ph, runs..]`, each run being
/// `[s (width), a, inner workspace]`. For a single level this is
/// `(n - m) + 1 + R (m + 1) + 2` qubits with `R = k * |schedule|`; the
/// constant covers the answer and phase qubits.
#[derive(Clone, Debug)]
pub struct UnitaryDecider {
    f: OracleTable,
    control_width: usize,
    /// Index 0 is a placeholder for the control block; the decider's own
    /// level is index 1.
    levels: Vec<Level>,
    values: Vec<bool>,
    error_probabilities: Vec<f64>,
    beta_max: f64,
}

/// Single-level decider: `g(x) = AND_y f(x, y)` (or OR) over the last `m`
/// inputs with `k` repetitions of `schedule`.
pub fn build_unitary_decider(f: &OracleTable, m: usize, k: usize, schedule: &RunSchedule, sense: Sense) -> Result<UnitaryDecider> {
    if m > f.n() {
        return Err(Error::invalid("m", format!("{m} exceeds n = {}", f.n())));
    }
    if k == 0 {
        return Err(Error::invalid("k", "at least one repetition is required"));
    }
    let level = Level {
        width: m,
        sense,
        k,
        schedule: schedule.clone(),
    };
    UnitaryDecider::nested(f, f.n() - m, vec![level], DEFAULT_WORD_BUDGET)
}

impl UnitaryDecider {
    /// Decider for the alternation `levels` (outermost first) below a block
    /// of `control_width` free inputs.
    pub fn nested(f: &OracleTable, control_width: usize, levels: Vec<Level>, budget: usize) -> Result<Self> {
        let total: usize = control_width + levels.iter().map(|l| l.width).sum::<usize>();
        if total != f.n() {
            return Err(Error::ArityMismatch {
                expected: f.n(),
                actual: total,
            });
        }
        if levels.is_empty() {
            return Err(Error::invalid("levels", "at least one level is required"));
        }
        let placeholder = Level::new(control_width, levels[0].sense.flip(), 1);
        let levels: Vec<Level> = std::iter::once(placeholder).chain(levels).collect();

        // m = 0: the decider is the f-gate itself, with no workspace.
        if levels[1..].iter().all(|l| l.width == 0) {
            let values: Vec<bool> = (0..1usize << control_width).map(|x| f.get(x)).collect();
            let error_probabilities = vec![0.0; values.len()];
            return Ok(UnitaryDecider {
                f: f.clone(),
                control_width,
                levels,
                values,
                error_probabilities,
                beta_max: 0.0,
            });
        }

        let mut engine = Engine::new(f, levels.clone(), budget);
        let default = levels[1].sense.default_answer();
        let mut values = Vec::with_capacity(1 << control_width);
        let mut error_probabilities = Vec::with_capacity(1 << control_width);
        for x in 0..1usize << control_width {
            let g = engine.g_value(1, x);
            let nf = engine.not_found_probability(1, x)?;
            let wrong = if g == default { 1.0 - nf } else { nf };
            values.push(g);
            error_probabilities.push(wrong.clamp(0.0, 1.0));
        }
        let beta_max = error_probabilities.iter().fold(0.0f64, |a, b| a.max(*b)).sqrt();
        Ok(UnitaryDecider {
            f: f.clone(),
            control_width,
            levels,
            values,
            error_probabilities,
            beta_max,
        })
    }

    pub fn control_width(&self) -> usize {
        self.control_width
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels[1..]
    }

    /// Largest error amplitude over all control settings.
    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    /// Probability of reading the wrong answer, per control setting.
    pub fn error_probabilities(&self) -> &[f64] {
        &self.error_probabilities
    }

    /// The decided function as a truth table over the control inputs.
    pub fn target(&self) -> OracleTable {
        OracleTable::new(self.control_width, self.values.clone()).expect("one value per control setting")
    }

    fn is_exact_gate(&self) -> bool {
        self.levels[1..].iter().all(|l| l.width == 0)
    }

    /// Qubits of the approximate gate: `z`, controls and workspace.
    pub fn qubit_count(&self) -> usize {
        if self.is_exact_gate() {
            return 1 + self.control_width;
        }
        1 + self.control_width + dense::workspace_qubits(&self.levels, 1)
    }

    /// Oracle calls made by one application of `G`.
    pub fn queries(&self) -> u64 {
        if self.is_exact_gate() {
            return 1;
        }
        Engine::new(&self.f, self.levels.clone(), 0).cost_g(1).unwrap_or(u64::MAX)
    }

    /// Gates of `G` alone on `[x, ans, ph, ..]`; the answer qubit sits right
    /// after the controls.
    pub fn g_circuit(&self, cap: usize) -> Result<Vec<crate::state::GateOp>> {
        if self.is_exact_gate() {
            return Err(Error::invalid("m", "with no search variables the gate is the f-gate itself"));
        }
        let width = self.control_width + dense::workspace_qubits(&self.levels, 1);
        dense::check_cap(width, cap, &self.levels, 1)?;
        let controls: Vec<usize> = (0..self.control_width).collect();
        let mut ops = Vec::new();
        dense::build_g(&self.levels, 1, &controls, self.control_width, &mut ops);
        Ok(ops)
    }

    /// Gates of `V` on `[z, x, ans, ph, ..]` (with `z` at qubit 0).
    pub fn circuit(&self, cap: usize) -> Result<Vec<crate::state::GateOp>> {
        let width = self.qubit_count();
        dense::check_cap(width, cap, &self.levels, 1)?;
        let controls: Vec<usize> = (1..=self.control_width).collect();
        let levels = if self.is_exact_gate() { &self.levels[..1] } else { &self.levels[..] };
        let mut ops = Vec::new();
        dense::build_v(levels, 1, &controls, 0, self.control_width + 1, &mut ops);
        Ok(ops)
    }
}

/// The approximate gate `V = G, CNOT, G^dag`.
#[derive(Clone, Debug)]
pub struct ApproxGate {
    pub decider: UnitaryDecider,
    /// `sqrt 2 * beta_max`: bound on `|V|b> - U_g|b>|` for basis inputs.
    pub distance_bound: f64,
}

pub fn approx_g_gate(decider: UnitaryDecider) -> ApproxGate {
    let distance_bound = std::f64::consts::SQRT_2 * decider.beta_max();
    ApproxGate {
        decider,
        distance_bound,
    }
}

/// Result of comparing a gate with the ideal `U_g` on every basis input
/// `|z, x, 0..0>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateDistance {
    pub max_distance: f64,
    /// `sqrt(2^(n - m + 1)) * max_distance`.
    pub superposition_bound: f64,
    /// Largest deviation of `|V|b>|` from 1.
    pub norm_deviation: f64,
    /// Probability mass left outside `|0..0>` on the workspace, maximised
    /// over basis inputs.
    pub workspace_residue: f64,
    pub basis_inputs: usize,
}

impl GateDistance {
    fn from_max(max_distance: f64, control_width: usize, norm_deviation: f64, workspace_residue: f64) -> Self {
        GateDistance {
            max_distance,
            superposition_bound: ((control_width + 1) as f64).exp2().sqrt() * max_distance,
            norm_deviation,
            workspace_residue,
            basis_inputs: 2 << control_width,
        }
    }
}

/// Simulates `V` on every basis input and measures its distance from the
/// ideal gate for `ideal` (a table over the control inputs).
pub fn verify_gate_distance(gate: &ApproxGate, ideal: &OracleTable, cap: usize) -> Result<GateDistance> {
    let d = &gate.decider;
    if ideal.n() != d.control_width {
        return Err(Error::ArityMismatch {
            expected: d.control_width,
            actual: ideal.n(),
        });
    }
    let ops = d.circuit(cap)?;
    let width = d.qubit_count();
    let c = d.control_width;
    let workspace = qubits(c + 1..width);
    let inputs: Vec<(usize, usize)> = (0..2).flat_map(|z| (0..1usize << c).map(move |x| (z, x))).collect();
    let results = crate::par::sweep(&inputs, |&(z, x)| -> Result<(f64, f64, f64)> {
        let shift = width - 1 - c;
        let mut state = StateVector::basis(width, (z << (width - 1)) | (x << shift))?;
        let mut backend = TableOracle::new(&d.f);
        crate::circuit::run_circuit(&mut state, &ops, &mut backend)?;
        let z_ideal = z ^ usize::from(ideal.get(x));
        let expected = StateVector::basis(width, (z_ideal << (width - 1)) | (x << shift))?;
        let dist = state.distance(&expected)?;
        let norm_dev = (state.norm() - 1.0).abs();
        let residue = if workspace.is_empty() {
            0.0
        } else {
            1.0 - state.marginal(&workspace)?[0]
        };
        Ok((dist, norm_dev, residue))
    });
    let mut max = (0.0f64, 0.0f64, 0.0f64);
    for r in results {
        let (a, b, c) = r?;
        max = (max.0.max(a), max.1.max(b), max.2.max(c));
    }
    Ok(GateDistance::from_max(max.0, c, max.1, max.2))
}

/// The same distances from the factored engine: for `V` built from a
/// decider whose answer is wrong with probability `p` the distance on
/// every basis input with that control setting is `sqrt(2 p)`.
pub fn factored_gate_distance(gate: &ApproxGate) -> GateDistance {
    let d = &gate.decider;
    let max = d.error_probabilities.iter().fold(0.0f64, |a, p| a.max((2.0 * p).sqrt()));
    GateDistance::from_max(max, d.control_width, 0.0, 0.0)
}

/// Dense-simulation error probabilities of `G` per control setting: run
/// `G` and read the answer qubit.
pub fn dense_error_probabilities(decider: &UnitaryDecider, cap: usize) -> Result<Vec<f64>> {
    let ops = decider.g_circuit(cap)?;
    let c = decider.control_width;
    let width = c + dense::workspace_qubits(&decider.levels, 1);
    let settings: Vec<usize> = (0..1usize << c).collect();
    crate::par::sweep(&settings, |&x| -> Result<f64> {
        let mut state = StateVector::basis(width, x << (width - c))?;
        let mut backend = TableOracle::new(&decider.f);
        crate::circuit::run_circuit(&mut state, &ops, &mut backend)?;
        let ans = state.marginal(&[crate::state::QubitIndex(c)])?;
        Ok(ans[usize::from(!decider.values[x])])
    })
    .into_iter()
    .collect()
}

/// Outcome of a nested evaluation with the engine's diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedReport {
    #[serde(flatten)]
    pub result: DeciderResult,
    /// Widths after dropping empty levels and merging equal neighbours.
    pub effective_widths: Vec<usize>,
    pub effective_ks: Vec<usize>,
    /// Worst error amplitude of the level-2 decider over all outer
    /// settings; absent for a single level.
    pub inner_beta_max: Option<f64>,
}

/// `SIGMA_d(f)` with explicit parameters.
pub fn sigma_d_eval(f: &OracleTable, params: &ApproxParams) -> Result<DeciderResult> {
    Ok(sigma_d_report(f, params, DEFAULT_WORD_BUDGET)?.result)
}

/// `PI_d(f) = NOT SIGMA_d(NOT f)`.
pub fn pi_d_eval(f: &OracleTable, params: &ApproxParams) -> Result<DeciderResult> {
    let r = sigma_d_eval(&f.negated(), params)?;
    let truth = classical_predicate(&Predicate::Pi(params.widths.clone()), f)?;
    let mut out = DeciderResult::from_prob(1.0 - r.prob_one, truth, r.queries);
    out.query_constant = r.query_constant;
    Ok(out)
}

/// `SIGMA_2` over widths `(n - m, m)` with `k_1 = 3` and the inner
/// repetition count from [`choose_k`].
pub fn sigma2_eval(f: &OracleTable, m: usize, epsilon: f64) -> Result<DeciderResult> {
    sigma_d_eval(f, &ApproxParams::sigma2(f.n(), m, epsilon)?)
}

pub fn sigma_d_report(f: &OracleTable, params: &ApproxParams, budget: usize) -> Result<NestedReport> {
    params.validate()?;
    check_widths(&params.widths, f.n())?;
    let levels = params.levels(Sense::Or);
    if levels.is_empty() {
        return Err(Error::invalid("n", "nested evaluation needs at least one input bit"));
    }
    let effective_widths = levels.iter().map(|l| l.width).collect();
    let effective_ks = levels.iter().map(|l| l.k).collect();
    let truth = classical_predicate(&Predicate::Sigma(params.widths.clone()), f)?;
    let n = f.n();
    let normaliser = (n as f64).exp2().sqrt() * n as f64;

    if levels.len() == 1 {
        let l = &levels[0];
        let mut r = search_decider(f, l.sense, l.k, &l.schedule, &mut TableOracle::new(f), DEFAULT_QUBIT_CAP)?;
        debug_assert_eq!(r.answer, r.prob_one >= 0.5);
        r.success_probability = DeciderResult::from_prob(r.prob_one, truth, r.queries).success_probability;
        return Ok(NestedReport {
            result: r,
            effective_widths,
            effective_ks,
            inner_beta_max: None,
        });
    }

    let mut engine = Engine::new(f, levels.clone(), budget);
    let top = &levels[0];
    let mut miss = 1.0;
    for &j in top.schedule.runs() {
        let p = engine.top_found_probability(j)?;
        miss *= (1.0 - p).powi(top.k as i32);
    }
    let prob_one = if top.sense.marked() { 1.0 - miss } else { miss };
    let queries = engine.cost_top().ok_or_else(|| Error::Resource {
        what: "query count",
        requested: usize::MAX,
        cap: u64::MAX as usize,
        detail: " (the nested query count overflows 64 bits)".into(),
    })?;

    let default = levels[1].sense.default_answer();
    let mut worst = 0.0f64;
    for x in 0..1usize << top.width {
        let nf = engine.not_found_probability(1, x)?;
        let wrong = if engine.g_value(1, x) == default { 1.0 - nf } else { nf };
        worst = worst.max(wrong.clamp(0.0, 1.0));
    }

    let mut result = DeciderResult::from_prob(prob_one.clamp(0.0, 1.0), truth, queries);
    result.query_constant = Some(queries as f64 / normaliser);
    Ok(NestedReport {
        result,
        effective_widths,
        effective_ks,
        inner_beta_max: Some(worst.sqrt()),
    })
}

/// Dense-simulation reference for a nested evaluation with at least two
/// effective levels: each top-level run is simulated gate by gate and each
/// candidate is checked with a fresh level-2 decider. Returns `P(output 1)`.
pub fn dense_sigma_probability(f: &OracleTable, params: &ApproxParams, cap: usize) -> Result<f64> {
    check_widths(&params.widths, f.n())?;
    Ok(dense_sigma_with(params, cap, || Ok(TableOracle::new(f)))?.probability)
}

/// A dense nested evaluation together with the backend used by every
/// circuit it ran.
#[derive(Debug)]
pub struct DenseEvaluation<B> {
    pub probability: f64,
    /// One backend per top-level run length, in schedule order.
    pub runs: Vec<B>,
    /// One backend per top-level prefix check.
    pub checks: Vec<B>,
    pub repetitions: usize,
}

/// [`dense_sigma_probability`] with a fresh backend from `make` for each
/// circuit.
pub fn dense_sigma_with<B: OracleBackend>(
    params: &ApproxParams,
    cap: usize,
    mut make: impl FnMut() -> Result<B>,
) -> Result<DenseEvaluation<B>> {
    params.validate()?;
    let levels = params.levels(Sense::Or);
    if levels.len() < 2 {
        return Err(Error::invalid("widths", "the dense reference needs two effective levels"));
    }
    let top = &levels[0];
    let m = top.width;
    let default = levels[1].sense.default_answer();
    let mut confirm = Vec::with_capacity(1 << m);
    let mut checks = Vec::with_capacity(1 << m);
    for x in 0..1usize << m {
        let (ops, width) = dense::check_circuit(&levels, x, cap)?;
        let mut backend = make()?;
        let state = run_from_zero(width, &ops, &mut backend, cap)?;
        let ans = state.marginal(&[crate::state::QubitIndex(m)])?;
        let report_default = ans[usize::from(default)];
        confirm.push(if default == top.sense.marked() {
            report_default
        } else {
            1.0 - report_default
        });
        checks.push(backend);
    }
    let mut miss = 1.0;
    let mut runs = Vec::new();
    for &j in top.schedule.runs() {
        let (ops, width) = dense::top_run_circuit(&levels, j, cap)?;
        let mut backend = make()?;
        let state = run_from_zero(width, &ops, &mut backend, cap)?;
        let dist = state.marginal(&qubits(0..m))?;
        let found: f64 = dist.iter().zip(&confirm).map(|(p, c)| p * c).sum();
        miss *= (1.0 - found).powi(top.k as i32);
        runs.push(backend);
    }
    Ok(DenseEvaluation {
        probability: if top.sense.marked() { 1.0 - miss } else { miss },
        runs,
        checks,
        repetitions: top.k,
    })
}

/// Oracle calls of the nested evaluation counted from the dense gates.
pub fn dense_query_count(params: &ApproxParams) -> Result<u64> {
    let levels = params.levels(Sense::Or);
    if levels.len() < 2 {
        return Err(Error::invalid("widths", "the dense count needs two effective levels"));
    }
    let top = &levels[0];
    let mut ops = Vec::new();
    let s: Vec<usize> = (0..top.width).collect();
    dense::build_v(&levels, 1, &s, top.width, top.width + 1, &mut ops);
    let per_call = circuit_queries(&ops) as u64;
    let mut check = Vec::new();
    dense::build_g(&levels, 1, &s, top.width, &mut check);
    let per_check = circuit_queries(&check) as u64;
    let per_rep: u64 = top.schedule.runs().iter().map(|j| *j as u64 * per_call + per_check).sum();
    Ok(per_rep * top.k as u64)
}
