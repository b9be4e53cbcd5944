//! Gate-level construction of the nested deciders, for direct simulation
//! on a full state vector. Only small parameter sets fit under the qubit
//! cap; the factored engine covers the rest.
//!
//! Layout of a level-`L` workspace, starting at `base`:
//! `[ans, ph, run_0, run_1, ..]` where each run is
//! `[s (width qubits), a, workspace of level L + 1]`.

use crate::algorithms::{diffusion_ops, Sense};
use crate::error::{Error, Result};
use crate::state::{GateOp, QubitIndex};

use super::params::Level;

/// Qubits in the workspace of the level-`level` decider.
pub fn workspace_qubits(levels: &[Level], level: usize) -> usize {
    if level >= levels.len() {
        return 0;
    }
    let l = &levels[level];
    2 + l.runs() * (l.width + 1 + workspace_qubits(levels, level + 1))
}

/// Human-readable per-level qubit breakdown.
pub fn qubit_tally(levels: &[Level], from: usize) -> String {
    (from..levels.len())
        .map(|i| {
            let l = &levels[i];
            format!(
                "level {i}: 2 + {} runs x ({} + 1 + {}) = {}",
                l.runs(),
                l.width,
                workspace_qubits(levels, i + 1),
                workspace_qubits(levels, i)
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub(crate) fn check_cap(total: usize, cap: usize, levels: &[Level], from: usize) -> Result<()> {
    if total > cap {
        return Err(Error::Resource {
            what: "qubit count",
            requested: total,
            cap,
            detail: format!(" ({})", qubit_tally(levels, from)),
        });
    }
    Ok(())
}

/// Appends the gates of `G` for `level`, controlled by the prefix qubits
/// `controls`, with workspace at `base`.
pub fn build_g(levels: &[Level], level: usize, controls: &[usize], base: usize, ops: &mut Vec<GateOp>) {
    let l = &levels[level];
    let (ans, ph) = (base, base + 1);
    let inner = workspace_qubits(levels, level + 1);
    ops.extend([GateOp::x(ph), GateOp::h(ph)]);
    let mut offset = base + 2;
    let mut records = Vec::with_capacity(l.runs());
    for _ in 0..l.k {
        for &j in l.schedule.runs() {
            let s: Vec<usize> = (offset..offset + l.width).collect();
            let a = offset + l.width;
            let ws = a + 1;
            offset = ws + inner;
            let q: Vec<usize> = controls.iter().chain(&s).copied().collect();
            ops.extend(s.iter().map(|&x| GateOp::h(x)));
            for _ in 0..j {
                build_v(levels, level + 1, &q, ph, ws, ops);
                if l.sense == Sense::And {
                    ops.push(GateOp::x(ph));
                }
                ops.extend(diffusion_ops(&s));
            }
            build_v(levels, level + 1, &q, a, ws, ops);
            records.push(a);
        }
    }
    ops.extend([GateOp::h(ph), GateOp::x(ph)]);
    let all = |v: bool| records.iter().map(|r| (QubitIndex(*r), v)).collect::<Vec<_>>();
    match l.sense {
        Sense::Or => {
            ops.push(GateOp::Mcx {
                controls: all(false),
                target: QubitIndex(ans),
            });
            ops.push(GateOp::x(ans));
        }
        Sense::And => ops.push(GateOp::Mcx {
            controls: all(true),
            target: QubitIndex(ans),
        }),
    }
}

/// Appends `V = G, CNOT(ans -> target), G^dag` for `level`; past the last
/// level this is the f-gate itself.
pub fn build_v(levels: &[Level], level: usize, controls: &[usize], target: usize, base: usize, ops: &mut Vec<GateOp>) {
    if level == levels.len() {
        ops.push(GateOp::oracle(controls, target));
        return;
    }
    let mut g = Vec::new();
    build_g(levels, level, controls, base, &mut g);
    ops.extend(g.iter().cloned());
    ops.push(GateOp::cnot(base, target));
    ops.push(GateOp::Adjoint(g));
}

/// One top-level search run of length `j` with the inner gates in place.
/// Layout `[s, ph, workspace of level 1]`; returns the gates and width.
pub fn top_run_circuit(levels: &[Level], j: usize, cap: usize) -> Result<(Vec<GateOp>, usize)> {
    let m = levels[0].width;
    let width = m + 1 + workspace_qubits(levels, 1);
    check_cap(width, cap, levels, 1)?;
    let s: Vec<usize> = (0..m).collect();
    let ph = m;
    let mut ops = vec![GateOp::x(ph), GateOp::h(ph)];
    ops.extend(s.iter().map(|&x| GateOp::h(x)));
    for _ in 0..j {
        build_v(levels, 1, &s, ph, m + 1, &mut ops);
        if levels[0].sense == Sense::And {
            ops.push(GateOp::x(ph));
        }
        ops.extend(diffusion_ops(&s));
    }
    ops.extend([GateOp::h(ph), GateOp::x(ph)]);
    Ok((ops, width))
}

/// The level-1 decider run on the basis prefix `x`. Layout
/// `[prefix, ans, ph, ..]`; the answer qubit is at index `width(levels[0])`.
pub fn check_circuit(levels: &[Level], x: usize, cap: usize) -> Result<(Vec<GateOp>, usize)> {
    if levels.len() < 2 {
        return Err(Error::invalid("levels", "a check circuit needs an inner level"));
    }
    let m = levels[0].width;
    let width = m + workspace_qubits(levels, 1);
    check_cap(width, cap, levels, 1)?;
    let controls: Vec<usize> = (0..m).collect();
    let mut ops: Vec<GateOp> = controls
        .iter()
        .filter(|q| x >> (m - 1 - **q) & 1 == 1)
        .map(|q| GateOp::x(*q))
        .collect();
    build_g(levels, 1, &controls, m, &mut ops);
    Ok((ops, width))
}
