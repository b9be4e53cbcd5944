//! Exact evaluation of nested deciders without materialising workspaces.
//!
//! Fix a prefix `q` of a level-`L` decider `G`. Its runs act on disjoint
//! registers, so `K_q = G^dag P G`, with `P` the projector onto "no run
//! found a witness", is a tensor product of per-run projectors. A call of
//! the approximate gate `V = G, CNOT, G^dag` maps the workspace `W` to
//! `K_q W` on one branch of the target and `(1 - K_q) W` on the other.
//! Every workspace state reachable from `|0>` is therefore a combination
//! of the product states `omega_w = K_{q_t} .. K_{q_1} |0>`, labelled by
//! words `w = q_1 .. q_t`. A register of level `L` is stored as a map from
//! word to a dense real vector over `(s, a)`, and inner products of
//! `omega` states factor over runs:
//!
//! `<omega_u|omega_v> = prod_j <phi_j(u)|phi_j(v)>^k`
//!
//! where `phi_j(w)` is one run of length `j` after the projectors of `w`.
//! Both inner products and `phi` states are memoised.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::oracle::OracleTable;

use super::params::Level;

pub(crate) type Word = u32;
pub(crate) const EMPTY: Word = 0;

/// Default ceiling on interned words across all levels.
pub const DEFAULT_WORD_BUDGET: usize = 4_000_000;

const PRUNE: f64 = 1e-15;

struct Trie {
    nodes: Vec<(Word, usize)>,
    index: HashMap<(Word, usize), Word>,
}

impl Trie {
    fn new() -> Self {
        Trie {
            nodes: vec![(EMPTY, usize::MAX)],
            index: HashMap::new(),
        }
    }

    fn node(&self, w: Word) -> (Word, usize) {
        self.nodes[w as usize]
    }
}

type RegState = BTreeMap<Word, Vec<f64>>;

pub(crate) struct Engine<'a> {
    f: &'a OracleTable,
    levels: Vec<Level>,
    tries: Vec<Trie>,
    phi: Vec<HashMap<(usize, Word), Rc<RegState>>>,
    ip: Vec<HashMap<(Word, Word), f64>>,
    words: usize,
    budget: usize,
}

impl<'a> Engine<'a> {
    /// `levels[0]` is the outermost block; the widths must sum to `f.n()`.
    pub(crate) fn new(f: &'a OracleTable, levels: Vec<Level>, budget: usize) -> Self {
        let d = levels.len();
        Engine {
            f,
            levels,
            tries: (0..d).map(|_| Trie::new()).collect(),
            phi: (0..d).map(|_| HashMap::new()).collect(),
            ip: (0..d).map(|_| HashMap::new()).collect(),
            words: 0,
            budget,
        }
    }

    fn is_last(&self, level: usize) -> bool {
        level + 1 == self.levels.len()
    }

    fn head_len(&self, level: usize) -> usize {
        2 << self.levels[level].width
    }

    pub(crate) fn append(&mut self, level: usize, w: Word, q: usize) -> Result<Word> {
        let trie = &mut self.tries[level];
        if w != EMPTY && trie.node(w).1 == q {
            return Ok(w);
        }
        if let Some(id) = trie.index.get(&(w, q)) {
            return Ok(*id);
        }
        if self.words >= self.budget {
            return Err(Error::Resource {
                what: "workspace term count",
                requested: self.words + 1,
                cap: self.budget,
                detail: format!(
                    " (nested evaluation over widths {:?}; deep nesting multiplies the number of distinct workspace states)",
                    self.levels.iter().map(|l| l.width).collect::<Vec<_>>()
                ),
            });
        }
        let id = trie.nodes.len() as Word;
        trie.nodes.push((w, q));
        trie.index.insert((w, q), id);
        self.words += 1;
        Ok(id)
    }

    /// Classical value of the level-`level` function on prefix `q`.
    pub(crate) fn g_value(&self, level: usize, q: usize) -> bool {
        if level == self.levels.len() {
            return self.f.get(q);
        }
        let l = &self.levels[level];
        let mut values = (0..1usize << l.width).map(|s| self.g_value(level + 1, (q << l.width) | s));
        match l.sense {
            crate::algorithms::Sense::Or => values.any(|v| v),
            crate::algorithms::Sense::And => values.all(|v| v),
        }
    }

    fn start_state(&self, level: usize) -> RegState {
        let mut head = vec![0.0; self.head_len(level)];
        head[0] = 1.0;
        BTreeMap::from([(EMPTY, head)])
    }

    fn apply_h(&self, level: usize, state: &mut RegState) {
        let m = self.levels[level].width;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for head in state.values_mut() {
            for bit in 0..m {
                let h = 2 << bit;
                for i in 0..head.len() {
                    if i & h == 0 {
                        let (x, y) = (head[i], head[i | h]);
                        head[i] = r * (x + y);
                        head[i | h] = r * (x - y);
                    }
                }
            }
        }
    }

    fn apply_diffusion(&self, level: usize, state: &mut RegState) {
        let size = 1usize << self.levels[level].width;
        for head in state.values_mut() {
            for a in 0..2 {
                let mean = (0..size).map(|s| head[(s << 1) | a]).sum::<f64>() / size as f64;
                for s in 0..size {
                    head[(s << 1) | a] = 2.0 * mean - head[(s << 1) | a];
                }
            }
        }
    }

    fn add(out: &mut RegState, w: Word, len: usize, idx: usize, v: f64) {
        out.entry(w).or_insert_with(|| vec![0.0; len])[idx] += v;
    }

    /// Phase oracle of a level-`level` run with prefix `q`.
    fn apply_oracle(&mut self, level: usize, q: usize, state: RegState) -> Result<RegState> {
        let m = self.levels[level].width;
        let negate = self.levels[level].sense == crate::algorithms::Sense::And;
        if self.is_last(level) {
            let mut state = state;
            for head in state.values_mut() {
                for s in 0..1usize << m {
                    if self.f.get((q << m) | s) ^ negate {
                        head[s << 1] = -head[s << 1];
                        head[(s << 1) | 1] = -head[(s << 1) | 1];
                    }
                }
            }
            return Ok(state);
        }
        // The inner gate acts as sigma (2K - 1) on a |-> target.
        let next_default = self.levels[level + 1].sense.default_answer();
        let sigma = if next_default ^ negate { -1.0 } else { 1.0 };
        let len = self.head_len(level);
        let mut out = RegState::new();
        for (u, head) in state {
            for s in 0..1usize << m {
                let idx = [s << 1, (s << 1) | 1];
                if idx.iter().all(|i| head[*i] == 0.0) {
                    continue;
                }
                let u2 = self.append(level + 1, u, (q << m) | s)?;
                for i in idx {
                    let v = head[i];
                    Self::add(&mut out, u, len, i, -sigma * v);
                    Self::add(&mut out, u2, len, i, 2.0 * sigma * v);
                }
            }
        }
        Ok(out)
    }

    /// Record the candidate's value into `a`.
    fn apply_check(&mut self, level: usize, q: usize, state: RegState) -> Result<RegState> {
        let m = self.levels[level].width;
        if self.is_last(level) {
            let mut state = state;
            for head in state.values_mut() {
                for s in 0..1usize << m {
                    if self.f.get((q << m) | s) {
                        head.swap(s << 1, (s << 1) | 1);
                    }
                }
            }
            return Ok(state);
        }
        let b = usize::from(self.levels[level + 1].sense.default_answer());
        let len = self.head_len(level);
        let mut out = RegState::new();
        for (u, head) in state {
            for s in 0..1usize << m {
                if head[s << 1] == 0.0 && head[(s << 1) | 1] == 0.0 {
                    continue;
                }
                let u2 = self.append(level + 1, u, (q << m) | s)?;
                for a in 0..2 {
                    let v = head[(s << 1) | a];
                    let with_k = (s << 1) | (a ^ b);
                    let without = (s << 1) | (a ^ b ^ 1);
                    Self::add(&mut out, u2, len, with_k, v);
                    Self::add(&mut out, u, len, without, v);
                    Self::add(&mut out, u2, len, without, -v);
                }
            }
        }
        Ok(out)
    }

    fn project_not_found(&self, level: usize, state: &mut RegState) {
        let keep = usize::from(self.levels[level].sense.default_answer());
        for head in state.values_mut() {
            for (i, v) in head.iter_mut().enumerate() {
                if i & 1 != keep {
                    *v = 0.0;
                }
            }
        }
    }

    fn prune(state: &mut RegState) {
        state.retain(|_, head| head.iter().any(|v| v.abs() > PRUNE));
    }

    /// Applies the not-found projector `U^dag P U` of one run of length `j`
    /// with prefix `q`.
    fn apply_projector(&mut self, level: usize, j: usize, q: usize, state: RegState) -> Result<RegState> {
        let mut st = state;
        self.apply_h(level, &mut st);
        for _ in 0..j {
            st = self.apply_oracle(level, q, st)?;
            self.apply_diffusion(level, &mut st);
        }
        st = self.apply_check(level, q, st)?;
        self.project_not_found(level, &mut st);
        Self::prune(&mut st);
        st = self.apply_check(level, q, st)?;
        for _ in 0..j {
            self.apply_diffusion(level, &mut st);
            st = self.apply_oracle(level, q, st)?;
        }
        self.apply_h(level, &mut st);
        Self::prune(&mut st);
        Ok(st)
    }

    fn phi(&mut self, level: usize, j: usize, w: Word) -> Result<Rc<RegState>> {
        if let Some(st) = self.phi[level].get(&(j, w)) {
            return Ok(Rc::clone(st));
        }
        let st = if w == EMPTY {
            self.start_state(level)
        } else {
            let (parent, q) = self.tries[level].node(w);
            let base = self.phi(level, j, parent)?;
            self.apply_projector(level, j, q, (*base).clone())?
        };
        let st = Rc::new(st);
        self.phi[level].insert((j, w), Rc::clone(&st));
        Ok(st)
    }

    /// `<omega_u|omega_v>` for the workspace of the level-`level` decider.
    pub(crate) fn workspace_inner(&mut self, level: usize, u: Word, v: Word) -> Result<f64> {
        if u == EMPTY && v == EMPTY {
            return Ok(1.0);
        }
        let key = (u.min(v), u.max(v));
        if let Some(x) = self.ip[level].get(&key) {
            return Ok(*x);
        }
        let k = self.levels[level].k as i32;
        let ladder = self.levels[level].schedule.runs().to_vec();
        let mut prod = 1.0;
        for j in ladder {
            prod *= self.run_inner(level, j, key.0, key.1)?.powi(k);
        }
        self.ip[level].insert(key, prod);
        Ok(prod)
    }

    fn run_inner(&mut self, level: usize, j: usize, u: Word, v: Word) -> Result<f64> {
        let a = self.phi(level, j, u)?;
        let b = self.phi(level, j, v)?;
        let last = self.is_last(level);
        let mut sum = 0.0;
        for (u2, hu) in a.iter() {
            for (v2, hv) in b.iter() {
                let dot: f64 = hu.iter().zip(hv).map(|(x, y)| x * y).sum();
                if dot == 0.0 {
                    continue;
                }
                let w = if last { 1.0 } else { self.workspace_inner(level + 1, *u2, *v2)? };
                sum += dot * w;
            }
        }
        Ok(sum)
    }

    /// Probability that the level-`level` decider on prefix `q` finds
    /// nothing, i.e. `<0|K_q|0>`.
    pub(crate) fn not_found_probability(&mut self, level: usize, q: usize) -> Result<f64> {
        let w = self.append(level, EMPTY, q)?;
        self.workspace_inner(level, EMPTY, w)
    }

    /// Exact outcome distribution of the top search register after a run
    /// of length `j`, and for each outcome the probability that checking it
    /// confirms a witness.
    pub(crate) fn top_run(&mut self, j: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut st = self.start_state(0);
        self.apply_h(0, &mut st);
        for _ in 0..j {
            st = self.apply_oracle(0, 0, st)?;
            self.apply_diffusion(0, &mut st);
        }
        Self::prune(&mut st);
        let size = 1usize << self.levels[0].width;
        let terms: Vec<(Word, Vec<f64>)> = st.into_iter().collect();
        let mut dist = vec![0.0; size];
        for (i, (u, hu)) in terms.iter().enumerate() {
            for (v, hv) in &terms[i..] {
                let w = if self.levels.len() == 1 {
                    1.0
                } else {
                    self.workspace_inner(1, *u, *v)?
                };
                let scale = if u == v { 1.0 } else { 2.0 };
                for (x, p) in dist.iter_mut().enumerate() {
                    *p += scale * w * hu[x << 1] * hv[x << 1];
                }
            }
        }
        let marked = self.levels[0].sense.marked();
        let mut confirm = vec![0.0; size];
        for (x, c) in confirm.iter_mut().enumerate() {
            *c = if self.levels.len() == 1 {
                f64::from(u8::from(self.f.get(x) == marked))
            } else {
                let nf = self.not_found_probability(1, x)?;
                if self.levels[1].sense.default_answer() == marked {
                    nf
                } else {
                    1.0 - nf
                }
            };
        }
        Ok((dist, confirm))
    }

    /// Probability that a top-level run of length `j` finds a witness.
    pub(crate) fn top_found_probability(&mut self, j: usize) -> Result<f64> {
        let (dist, confirm) = self.top_run(j)?;
        Ok(dist.iter().zip(&confirm).map(|(p, c)| p * c).sum::<f64>().clamp(0.0, 1.0))
    }

    /// Oracle calls of one `V` at `level` (`levels.len()` means the f-gate).
    pub(crate) fn cost_v(&self, level: usize) -> Option<u64> {
        if level == self.levels.len() {
            return Some(1);
        }
        self.cost_g(level)?.checked_mul(2)
    }

    pub(crate) fn cost_g(&self, level: usize) -> Option<u64> {
        let inner = self.cost_v(level + 1)?;
        let l = &self.levels[level];
        let per_rep = l
            .schedule
            .runs()
            .iter()
            .try_fold(0u64, |acc, j| acc.checked_add((*j as u64 + 1).checked_mul(inner)?))?;
        per_rep.checked_mul(l.k as u64)
    }

    /// Oracle calls of the whole top-level procedure.
    pub(crate) fn cost_top(&self) -> Option<u64> {
        let call = self.cost_v(1)?;
        let check = if self.levels.len() == 1 { 1 } else { self.cost_g(1)? };
        let l = &self.levels[0];
        let per_rep = l
            .schedule
            .runs()
            .iter()
            .try_fold(0u64, |acc, j| acc.checked_add((*j as u64).checked_mul(call)?.checked_add(check)?))?;
        per_rep.checked_mul(l.k as u64)
    }
}
