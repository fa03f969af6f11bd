//! Kinetic Monte Carlo trajectories and empirical flux estimates.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::cycles::Digraph;
use crate::error::{NessError, Result};
use crate::markov::{FluxField, MarkovProcess, TimeKind};

/// One jump. Discrete-time loops appear as events with `from == to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Run until this time; the trajectory's duration is exactly `t_max`.
    Time(f64),
    /// Stop after this many events; the duration ends at the last event.
    Events(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub time_kind: TimeKind,
    pub n_states: usize,
    pub initial: usize,
    pub start_time: f64,
    pub events: Vec<Event>,
    pub total_time: f64,
    pub seed: u64,
}

/// Cumulative jump tables, one per state.
struct JumpTable {
    exit: Vec<f64>,
    targets: Vec<Vec<(usize, f64)>>,
}

impl JumpTable {
    fn new(p: &MarkovProcess) -> Self {
        let n = p.n_states();
        let mut exit = vec![0.0; n];
        let mut targets = vec![Vec::new(); n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                let w = if i == j {
                    p.loop_probability(i)
                } else {
                    p.rate(i, j)
                };
                if w > 0.0 {
                    acc += w;
                    targets[i].push((j, acc));
                }
            }
            exit[i] = acc;
        }
        Self { exit, targets }
    }

    fn draw(&self, i: usize, rng: &mut ChaCha20Rng) -> usize {
        let u = rng.gen::<f64>() * self.exit[i];
        let row = &self.targets[i];
        row.iter()
            .find(|(_, c)| u < *c)
            .map_or(row[row.len() - 1].0, |(j, _)| *j)
    }
}

/// Simulates a trajectory starting in `initial`.
///
/// Continuous time: exponential waiting times with the total exit rate and
/// jumps chosen proportionally to the rates. Discrete time: unit steps with
/// categorical jumps, loops included.
pub fn simulate(
    p: &MarkovProcess,
    stop: StopRule,
    seed: u64,
    initial: usize,
) -> Result<Trajectory> {
    let violations = p.validate();
    if !violations.is_empty() {
        return Err(NessError::InvalidProcess(
            violations.into_iter().map(|v| v.message).collect(),
        ));
    }
    let n = p.n_states();
    if initial >= n {
        return Err(NessError::StateOutOfRange { index: initial, n });
    }
    match stop {
        StopRule::Time(t) if !(t > 0.0 && t.is_finite()) => {
            return Err(NessError::InvalidArgument("t_max must be positive".into()))
        }
        _ => {}
    }
    let table = JumpTable::new(p);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut events = Vec::new();
    if let StopRule::Events(k) = stop {
        events.reserve(k);
    }
    let mut t = 0.0;
    let mut state = initial;
    loop {
        if let StopRule::Events(k) = stop {
            if events.len() >= k {
                break;
            }
        }
        let dt = match p.time_kind() {
            TimeKind::Continuous => -(1.0 - rng.gen::<f64>()).ln() / table.exit[state],
            TimeKind::Discrete => 1.0,
        };
        if let StopRule::Time(t_max) = stop {
            if t + dt > t_max {
                break;
            }
        }
        t += dt;
        let next = table.draw(state, &mut rng);
        events.push(Event {
            time: t,
            from: state,
            to: next,
        });
        state = next;
    }
    let total_time = match stop {
        StopRule::Time(t_max) => t_max,
        StopRule::Events(_) => t,
    };
    Ok(Trajectory {
        time_kind: p.time_kind(),
        n_states: n,
        initial,
        start_time: 0.0,
        events,
        total_time,
        seed,
    })
}

/// Independent replicas with seeds `seed, seed + 1, …`, run in parallel.
pub fn simulate_replicas(
    p: &MarkovProcess,
    stop: StopRule,
    seed: u64,
    initial: usize,
    replicas: usize,
) -> Result<Vec<Trajectory>> {
    (0..replicas as u64)
        .into_par_iter()
        .map(|r| simulate(p, stop, seed.wrapping_add(r), initial))
        .collect()
}

impl Trajectory {
    pub fn final_state(&self) -> usize {
        self.events.last().map_or(self.initial, |e| e.to)
    }

    /// Fraction of the duration spent in each state (fraction of steps in
    /// discrete time).
    pub fn occupation(&self) -> Vec<f64> {
        let mut occ = vec![0.0; self.n_states];
        let mut t = self.start_time;
        let mut s = self.initial;
        for e in &self.events {
            occ[s] += e.time - t;
            t = e.time;
            s = e.to;
        }
        occ[s] += self.start_time + self.total_time - t;
        occ.iter_mut().for_each(|v| *v /= self.total_time);
        occ
    }

    /// Number of `i → j` events.
    pub fn transition_counts(&self) -> DMatrix<u64> {
        let mut c = DMatrix::zeros(self.n_states, self.n_states);
        for e in &self.events {
            c[(e.from, e.to)] += 1;
        }
        c
    }

    /// Consecutive sub-trajectories with (nearly) equal event counts, used
    /// for batch-means error estimates.
    pub fn batches(&self, k: usize) -> Vec<Trajectory> {
        let k = k.max(1);
        let m = self.events.len();
        let mut out = Vec::with_capacity(k);
        let mut start_time = self.start_time;
        let mut state = self.initial;
        for b in 0..k {
            let lo = b * m / k;
            let hi = (b + 1) * m / k;
            let events = self.events[lo..hi].to_vec();
            let end = if b + 1 == k {
                self.start_time + self.total_time
            } else {
                events.last().map_or(start_time, |e| e.time)
            };
            out.push(Trajectory {
                time_kind: self.time_kind,
                n_states: self.n_states,
                initial: state,
                start_time,
                total_time: end - start_time,
                events,
                seed: self.seed,
            });
            state = out[b].final_state();
            start_time = end;
        }
        out
    }

    /// CSV export `time,from,to` (1-based states).
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.events.len() * 24 + 16);
        s.push_str("time,from,to\n");
        for e in &self.events {
            s.push_str(&format!("{},{},{}\n", e.time, e.from + 1, e.to + 1));
        }
        s
    }
}

/// `φ̂[i][j] = (#i→j events) / duration`. Discrete-time loop events fill the
/// loop fluxes.
pub fn empirical_fluxes(t: &Trajectory) -> Result<FluxField> {
    if t.total_time.is_nan() || t.total_time <= 0.0 {
        return Err(NessError::InvalidArgument(
            "trajectory duration must be positive".into(),
        ));
    }
    let counts = t.transition_counts();
    let n = t.n_states;
    let mut phi = DMatrix::zeros(n, n);
    let mut loops = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let v = counts[(i, j)] as f64 / t.total_time;
            if i == j {
                loops[i] = v;
            } else {
                phi[(i, j)] = v;
            }
        }
    }
    let f = FluxField::from_matrix(phi)?;
    match t.time_kind {
        TimeKind::Continuous => Ok(f),
        TimeKind::Discrete => f.with_loops(loops),
    }
}

/// Empirical fluxes with batch-means standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxEstimate {
    /// Estimate from the whole trajectory.
    pub fluxes: FluxField,
    /// Standard error per edge (diagonal: loop fluxes).
    pub std_error: DMatrix<f64>,
    pub batches: usize,
}

/// Standard error of the mean of `values`, treated as independent batch
/// estimates.
pub fn batch_std_error(values: &[f64]) -> f64 {
    let k = values.len();
    if k < 2 {
        return f64::NAN;
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (var / k as f64).sqrt()
}

/// Splits `t` into `batches` consecutive pieces and uses the spread of the
/// per-batch flux estimates as the error bar.
pub fn estimate_fluxes(t: &Trajectory, batches: usize) -> Result<FluxEstimate> {
    if batches < 2 {
        return Err(NessError::InvalidArgument(
            "batch-means estimate needs at least 2 batches".into(),
        ));
    }
    let fluxes = empirical_fluxes(t)?;
    let per_batch = t
        .batches(batches)
        .iter()
        .map(empirical_fluxes)
        .collect::<Result<Vec<_>>>()?;
    let n = t.n_states;
    let std_error = DMatrix::from_fn(n, n, |i, j| {
        let vals: Vec<f64> = per_batch
            .iter()
            .map(|f| {
                if i == j {
                    f.loops().map_or(0.0, |l| l[i])
                } else {
                    f.get(i, j)
                }
            })
            .collect();
        batch_std_error(&vals)
    });
    Ok(FluxEstimate {
        fluxes,
        std_error,
        batches,
    })
}

/// Least-squares projection onto the Kirchhoff-balanced fields supported on
/// the edges of `graph`: the smallest L2 correction that restores the node
/// condition at every state.
///
/// With `B` the node-edge incidence matrix and `L = B Bᵀ` the graph
/// Laplacian, the correction on edge `u → w` is `λ_u − λ_w` where
/// `L λ = B φ̂`. The Laplacian is grounded at state 0.
pub fn project_kirchhoff(field: &FluxField, graph: &Digraph) -> Result<FluxField> {
    let n = field.n_states();
    if graph.n_vertices() != n {
        return Err(NessError::Dimension {
            expected: n,
            got: graph.n_vertices(),
        });
    }
    if let Some((a, b, _)) = field.edges().find(|&(a, b, _)| !graph.has_edge(a, b)) {
        return Err(NessError::InvalidArgument(format!(
            "flux on {}→{} outside the graph",
            a + 1,
            b + 1
        )));
    }
    if n < 2 {
        return Ok(field.clone());
    }
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for (u, w) in graph.edges() {
        lap[(u, u)] += 1.0;
        lap[(w, w)] += 1.0;
        lap[(u, w)] -= 1.0;
        lap[(w, u)] -= 1.0;
    }
    let rhs = DVector::from_iterator(n, (0..n).map(|v| field.node_imbalance(v)));
    let reduced = lap.view((1, 1), (n - 1, n - 1)).clone_owned();
    let lambda_rest = reduced
        .lu()
        .solve(&rhs.rows(1, n - 1).clone_owned())
        .ok_or_else(|| NessError::Numerical {
            what: "singular Laplacian in Kirchhoff projection (graph not connected)".into(),
            residual: f64::INFINITY,
        })?;
    let mut lambda = vec![0.0; n];
    for v in 1..n {
        lambda[v] = lambda_rest[v - 1];
    }

    let mut phi = field.matrix().clone();
    for (u, w) in graph.edges() {
        let v = phi[(u, w)] - (lambda[u] - lambda[w]);
        if v < 0.0 {
            return Err(NessError::InvalidArgument(format!(
                "projection drives edge {}→{} negative; trajectory too short",
                u + 1,
                w + 1
            )));
        }
        phi[(u, w)] = v;
    }
    let out = FluxField::from_matrix(phi)?;
    match field.loops() {
        Some(l) => out.with_loops(l.to_vec()),
        None => Ok(out),
    }
}
