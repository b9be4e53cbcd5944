use std::path::Path;
use std::time::Instant;

use qcomm::circuit::TableOracle;
use qcomm::nested::{self, double_exp_params, ApproxParams, DEFAULT_EPSILON, DEFAULT_K_CAP, OUTER_K};
use qcomm::protocol::{ac0_protocol, disj_protocol, eqprime_protocol, ProtocolOutcome};
use qcomm::state::DEFAULT_QUBIT_CAP;
use qcomm::{
    algorithms, exact_rank, pointwise_combine, CommMatrix, CommPredicate, Combiner, DeciderResult, OracleTable,
    RunSchedule, Sense,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{Algo, Cli, Problem};
use crate::error::CliError;
use crate::output::Row;

#[derive(Clone, Debug)]
enum Task {
    Dj,
    Or { k: usize },
    Nested { params: ApproxParams, pi: bool },
    Disj,
    Eqprime,
    Ac0 { params: ApproxParams, combiner: Combiner },
    Rank { predicate: CommPredicate },
}

#[derive(Clone, Debug)]
struct Job {
    name: String,
    task: Task,
    n: usize,
    instance: usize,
    oracles: Vec<OracleTable>,
    cap: usize,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn load_oracle(path: &Path) -> Result<OracleTable, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(OracleTable::from_json(&text)?)
}

fn gen_table(spec: &str, n: usize, rng: &mut ChaCha8Rng) -> Result<OracleTable, CliError> {
    let (name, arg) = match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    };
    Ok(match name {
        "all-zero" => OracleTable::constant(n, false)?,
        "all-one" => OracleTable::constant(n, true)?,
        "single-one" => {
            let x: usize = arg
                .map(|a| a.parse().map_err(|_| invalid(format!("--gen: bad position in {spec:?}"))))
                .transpose()?
                .unwrap_or(0);
            if x >> n != 0 {
                return Err(invalid(format!("--gen: position {x} is outside 0..2^{n}")));
            }
            OracleTable::from_fn(n, |y| y == x)?
        }
        "random" => OracleTable::random(n, rng)?,
        "balanced" => {
            if n == 0 {
                return Err(invalid("--gen balanced needs n >= 1"));
            }
            OracleTable::random_with_weight(n, 1 << (n - 1), rng)?
        }
        "bits" => {
            let t = OracleTable::from_bit_str(arg.unwrap_or(""))?;
            if t.n() != n {
                return Err(invalid(format!("--gen {spec:?} has n = {}, expected {n}", t.n())));
            }
            t
        }
        other => return Err(invalid(format!("--gen: unknown generator {other:?}"))),
    })
}

fn gen_pair(specs: &[String], n: usize, instance: usize, rng: &mut ChaCha8Rng) -> Result<(OracleTable, OracleTable), CliError> {
    match specs {
        [g, h] => Ok((gen_table(g, n, rng)?, gen_table(h, n, rng)?)),
        [one] => {
            let spec = match one.as_str() {
                "promise" if instance.is_multiple_of(2) => "equal",
                "promise" => "half-distance",
                s => s,
            };
            match spec {
                "equal" => {
                    let g = OracleTable::random(n, rng)?;
                    Ok((g.clone(), g))
                }
                "disjoint" => {
                    let g = OracleTable::random(n, rng)?;
                    let h = OracleTable::random(n, rng)?;
                    let h = pointwise_combine(Combiner([false, true, false, false]), &g, &h)?;
                    Ok((g, h))
                }
                "half-distance" => {
                    if n == 0 {
                        return Err(invalid("--gen half-distance needs n >= 1"));
                    }
                    let g = OracleTable::random(n, rng)?;
                    let mask = OracleTable::random_with_weight(n, 1 << (n - 1), rng)?;
                    let h = pointwise_combine(Combiner::XOR, &g, &mask)?;
                    Ok((g, h))
                }
                s => Ok((gen_table(s, n, rng)?, gen_table(s, n, rng)?)),
            }
        }
        _ => Err(invalid("--gen: give one pair generator or two table generators")),
    }
}

/// Outer levels take the extra bits.
fn even_widths(n: usize, d: usize) -> Vec<usize> {
    (0..d).map(|i| n / d + usize::from(i < n % d)).collect()
}

fn nested_params(cli: &Cli, n: usize, sigma2: bool) -> Result<ApproxParams, CliError> {
    let epsilon = cli.epsilon.unwrap_or(DEFAULT_EPSILON);
    let widths = match cli.widths()? {
        Some(w) => w,
        None if sigma2 => vec![n - n / 2, n / 2],
        None => even_widths(n, 2),
    };
    if sigma2 && widths.len() != 2 {
        return Err(invalid("--widths: sigma2 takes exactly two widths"));
    }
    if widths.iter().sum::<usize>() != n {
        return Err(invalid(format!("--widths {widths:?} must sum to n = {n}")));
    }
    if cli.delta.is_some() && (cli.k.is_some() || cli.epsilon.is_some()) {
        return Err(invalid("--delta fixes k and epsilon; drop --k and --epsilon"));
    }
    let mut params = if let Some(delta) = cli.delta {
        let mut p = double_exp_params(n, widths.len(), delta, DEFAULT_K_CAP)?.params;
        p.widths = widths;
        p
    } else if let Some(ks) = cli.ks()? {
        if ks.len() != widths.len() {
            return Err(invalid(format!("--k: {} counts for {} levels", ks.len(), widths.len())));
        }
        ApproxParams::new(n, widths, ks, epsilon)?
    } else if sigma2 {
        ApproxParams::sigma2(n, widths[1], epsilon)?
    } else {
        ApproxParams::sigma_default(n, widths)?
    };
    if cli.delta.is_none() {
        params.epsilon = epsilon;
    }
    params.validate()?;
    Ok(params)
}

fn single_k(cli: &Cli) -> Result<usize, CliError> {
    match cli.ks()?.as_deref() {
        None => Ok(OUTER_K),
        Some([k]) => Ok(*k),
        Some(_) => Err(invalid("--k: this task takes a single repetition count")),
    }
}

/// Rejects flags the selected task would ignore.
fn check_relevant(cli: &Cli) -> Result<(), CliError> {
    let nested = matches!(cli.algo, Some(Algo::Sigma2 | Algo::Sigma | Algo::Pi)) || cli.protocol == Some(Problem::Ac0);
    let takes_k = nested || cli.algo == Some(Algo::Or);
    let mut stray = Vec::new();
    if !nested {
        for (flag, set) in [("widths", cli.widths.is_some()), ("epsilon", cli.epsilon.is_some()), ("delta", cli.delta.is_some())] {
            if set {
                stray.push(flag);
            }
        }
    }
    if !takes_k && cli.k.is_some() {
        stray.push("k");
    }
    if cli.protocol != Some(Problem::Ac0) && cli.combiner != "and" {
        stray.push("combiner");
    }
    if cli.rank.is_some() && (!cli.gen.is_empty() || !cli.oracle.is_empty()) {
        stray.push("gen/oracle");
    }
    if stray.is_empty() {
        Ok(())
    } else {
        Err(invalid(format!("--{} not used by {}", stray.join(", --"), cli.task_name())))
    }
}

fn build_jobs(cli: &Cli) -> Result<Vec<Job>, CliError> {
    check_relevant(cli)?;
    let cap = cli.cap.unwrap_or(DEFAULT_QUBIT_CAP);
    let files: Vec<OracleTable> = cli.oracle.iter().map(|p| load_oracle(p)).collect::<Result<_, _>>()?;
    let ns = match (cli.ns()?, files.first()) {
        (Some(ns), Some(f)) if ns != [f.n()] => {
            return Err(invalid(format!("--n {ns:?} disagrees with the oracle file (n = {})", f.n())))
        }
        (_, Some(f)) => vec![f.n()],
        (Some(ns), None) => ns,
        (None, None) => return Err(invalid("--n is required without --oracle")),
    };
    if files.iter().any(|f| f.n() != ns[0]) {
        return Err(invalid("oracle files have different n"));
    }
    if cli.count == 0 {
        return Err(invalid("--count must be positive"));
    }
    let name = cli.task_name();
    let mut jobs = Vec::new();
    for &n in &ns {
        for instance in 0..cli.count {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            rng.set_stream(((n as u64) << 32) | instance as u64);
            let (task, oracles) = if let Some(algo) = cli.algo {
                let default_gen = if algo == Algo::Dj { "balanced" } else { "random" };
                let f = match files.first() {
                    Some(f) => f.clone(),
                    None => gen_table(cli.gen.first().map_or(default_gen, String::as_str), n, &mut rng)?,
                };
                if n == 0 {
                    return Err(invalid("--n must be at least 1"));
                }
                let task = match algo {
                    Algo::Dj => Task::Dj,
                    Algo::Or => Task::Or { k: single_k(cli)? },
                    Algo::Sigma2 => Task::Nested {
                        params: nested_params(cli, n, true)?,
                        pi: false,
                    },
                    Algo::Sigma | Algo::Pi => Task::Nested {
                        params: nested_params(cli, n, false)?,
                        pi: algo == Algo::Pi,
                    },
                };
                if matches!(task, Task::Dj | Task::Or { .. }) && n + 2 > cap {
                    return Err(qcomm::Error::Resource {
                        what: "qubit count",
                        requested: n + 2,
                        cap,
                        detail: String::new(),
                    }
                    .into());
                }
                (task, vec![f])
            } else if let Some(problem) = cli.protocol {
                if n == 0 {
                    return Err(invalid("--n must be at least 1"));
                }
                let (g, h) = match files.as_slice() {
                    [g, h] => (g.clone(), h.clone()),
                    [] => {
                        let default = match problem {
                            Problem::Eqprime => vec!["promise".to_string()],
                            _ => vec!["random".to_string()],
                        };
                        let specs = if cli.gen.is_empty() { &default } else { &cli.gen };
                        gen_pair(specs, n, instance, &mut rng)?
                    }
                    _ => return Err(invalid("--oracle: protocols take two files (g, then h)")),
                };
                let task = match problem {
                    Problem::Disj => Task::Disj,
                    Problem::Eqprime => Task::Eqprime,
                    Problem::Ac0 => Task::Ac0 {
                        params: nested_params(cli, n, false)?,
                        combiner: cli.combiner.parse()?,
                    },
                };
                if n + 3 > cap {
                    return Err(qcomm::Error::Resource {
                        what: "qubit count",
                        requested: n + 3,
                        cap,
                        detail: String::new(),
                    }
                    .into());
                }
                (task, vec![g, h])
            } else {
                let predicate: CommPredicate = cli.rank.as_deref().unwrap_or_default().parse()?;
                if instance > 0 {
                    continue;
                }
                (Task::Rank { predicate }, Vec::new())
            };
            jobs.push(Job {
                name: name.clone(),
                task,
                n,
                instance,
                oracles,
                cap,
            });
        }
    }
    Ok(jobs)
}

fn decider_row(row: &mut Row, r: &DeciderResult) {
    row.answer = Some(r.answer);
    row.prob_one = Some(r.prob_one);
    row.success_prob = Some(r.success_probability);
    row.queries = Some(r.queries);
    row.query_constant = r.query_constant;
}

fn protocol_row(row: &mut Row, o: &ProtocolOutcome) -> Result<(), CliError> {
    if !o.one_way && o.comm_qubits != o.t * (2 * o.n as u64 + 4) {
        return Err(CliError::Invariant(format!(
            "{}: {} qubits sent for t = {} calls at n = {}",
            o.problem, o.comm_qubits, o.t, o.n
        )));
    }
    row.answer = Some(o.answer);
    row.prob_one = Some(o.prob_one);
    row.success_prob = Some(o.success_prob);
    row.queries = Some(o.t);
    row.comm_qubits = Some(o.comm_qubits);
    row.one_way = Some(o.one_way);
    Ok(())
}

fn params_json(p: &ApproxParams) -> serde_json::Value {
    json!({"widths": p.widths, "ks": p.ks, "epsilon": p.epsilon, "delta": p.delta})
}

fn run_job(job: &Job) -> Result<Row, CliError> {
    let start = Instant::now();
    let mut row = Row {
        task: job.name.clone(),
        n: job.n,
        instance: job.instance,
        oracle: job.oracles.iter().map(OracleTable::to_bit_string).collect::<Vec<_>>().join("/"),
        ..Row::default()
    };
    let params = match &job.task {
        Task::Dj => {
            let f = &job.oracles[0];
            decider_row(&mut row, &algorithms::deutsch_jozsa_with(f, &mut TableOracle::new(f), job.cap)?);
            json!({})
        }
        Task::Or { k } => {
            let f = &job.oracles[0];
            let schedule = RunSchedule::ladder(job.n);
            let r = algorithms::search_decider(f, Sense::Or, *k, &schedule, &mut TableOracle::new(f), job.cap)?;
            decider_row(&mut row, &r);
            json!({"k": k, "schedule": schedule.runs()})
        }
        Task::Nested { params, pi } => {
            let f = &job.oracles[0];
            let r = if *pi {
                nested::pi_d_eval(f, params)?
            } else {
                nested::sigma_d_eval(f, params)?
            };
            decider_row(&mut row, &r);
            params_json(params)
        }
        Task::Disj => {
            protocol_row(&mut row, &disj_protocol(&job.oracles[0], &job.oracles[1])?)?;
            json!({"k": qcomm::protocol::DISJ_K, "combiner": "and"})
        }
        Task::Eqprime => {
            protocol_row(&mut row, &eqprime_protocol(&job.oracles[0], &job.oracles[1])?)?;
            json!({"combiner": "xor"})
        }
        Task::Ac0 { params, combiner } => {
            let o = ac0_protocol(params, false, *combiner, &job.oracles[0], &job.oracles[1])?;
            protocol_row(&mut row, &o)?;
            let mut p = params_json(params);
            p["combiner"] = json!(combiner.name());
            p
        }
        Task::Rank { predicate } => {
            let m = CommMatrix::build(*predicate, job.n, false)?;
            row.rank = Some(exact_rank(&m));
            row.side = Some(m.side());
            json!({"predicate": predicate.name()})
        }
    };
    row.params = params.to_string();
    row.wall_time = start.elapsed().as_secs_f64();
    Ok(row)
}

/// Validates every job, then runs them; rows keep the job order.
pub fn execute(cli: &Cli) -> Result<Vec<Row>, CliError> {
    let jobs = build_jobs(cli)?;
    qcomm::par::sweep(&jobs, run_job).into_iter().collect()
}
