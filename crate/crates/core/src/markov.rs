//! Finite-state Markov processes in continuous and discrete time.
//!
//! A process is stored as a dense `n × n` matrix. Off-diagonal entries hold
//! the transition rates `w[i][j]` (continuous time) or jump probabilities
//! `a[i][j]` (discrete time). The diagonal holds the staying probabilities
//! `a[i][i]` for discrete chains and is zero for continuous ones.
//!
//! Steady-state fluxes `φ[i][j] = p*_i w[i][j]` are carried by [`FluxField`];
//! discrete-time loop fluxes `p*_i a[i][i]` are kept apart from the
//! off-diagonal field so that cycle decompositions never see them.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cycles::Digraph;
use crate::error::{NessError, Result};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeKind {
    Continuous,
    Discrete,
}

impl fmt::Display for TimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeKind::Continuous => f.write_str("continuous"),
            TimeKind::Discrete => f.write_str("discrete"),
        }
    }
}

/// A finite Markov process (continuous-time jump process or discrete chain).
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovProcess {
    time: TimeKind,
    rates: DMatrix<f64>,
}

/// A problem found by [`MarkovProcess::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub rule: ViolationRule,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationRule {
    NegativeRate,
    NoOutgoingRate,
    RowNormalization,
    NotStronglyConnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl MarkovProcess {
    /// Continuous-time process from 0-based `(from, to, rate)` triples.
    pub fn continuous<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let rates = fill_matrix(n, edges, false)?;
        Ok(Self {
            time: TimeKind::Continuous,
            rates,
        })
    }

    /// Discrete-time chain from off-diagonal jump probabilities and loops.
    pub fn discrete<I, L>(n: usize, edges: I, loops: L) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
        L: IntoIterator<Item = (usize, f64)>,
    {
        let mut rates = fill_matrix(n, edges, false)?;
        for (i, p) in loops {
            if i >= n {
                return Err(NessError::StateOutOfRange { index: i, n });
            }
            if !p.is_finite() {
                return Err(NessError::InvalidArgument(format!(
                    "loop probability at state {} is not finite",
                    i + 1
                )));
            }
            rates[(i, i)] = p;
        }
        Ok(Self {
            time: TimeKind::Discrete,
            rates,
        })
    }

    /// Builds a process from a full matrix. For continuous time the diagonal
    /// is ignored (the generator diagonal is implied by the rows).
    pub fn from_matrix(time: TimeKind, mut rates: DMatrix<f64>) -> Result<Self> {
        if rates.nrows() != rates.ncols() {
            return Err(NessError::Dimension {
                expected: rates.nrows(),
                got: rates.ncols(),
            });
        }
        if rates.nrows() == 0 {
            return Err(NessError::InvalidArgument(
                "process needs at least one state".into(),
            ));
        }
        if rates.iter().any(|v| !v.is_finite()) {
            return Err(NessError::InvalidArgument("rates must be finite".into()));
        }
        if time == TimeKind::Continuous {
            rates.fill_diagonal(0.0);
        }
        Ok(Self { time, rates })
    }

    pub fn n_states(&self) -> usize {
        self.rates.nrows()
    }

    pub fn time_kind(&self) -> TimeKind {
        self.time
    }

    /// `w[i][j]` (or `a[i][j]`); the diagonal is the loop probability.
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.rates[(from, to)]
    }

    pub fn rates(&self) -> &DMatrix<f64> {
        &self.rates
    }

    /// Staying probability `a[i][i]`; always zero in continuous time.
    pub fn loop_probability(&self, i: usize) -> f64 {
        match self.time {
            TimeKind::Continuous => 0.0,
            TimeKind::Discrete => self.rates[(i, i)],
        }
    }

    /// Positive off-diagonal transitions `(from, to, rate)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_states();
        (0..n).flat_map(move |i| {
            (0..n).filter(move |&j| j != i).filter_map(move |j| {
                let w = self.rates[(i, j)];
                (w > 0.0).then_some((i, j, w))
            })
        })
    }

    pub fn graph(&self) -> Digraph {
        Digraph::from_edges(self.n_states(), self.edges().map(|(i, j, _)| (i, j)))
            .expect("edges are in range by construction")
    }

    /// Total exit rate `Σ_{k≠i} w[i][k]`.
    pub fn exit_rate(&self, i: usize) -> f64 {
        (0..self.n_states())
            .filter(|&k| k != i)
            .map(|k| self.rates[(i, k)])
            .sum()
    }

    /// Mean sojourn time in state `i`: `1 / Σ_k w[i][k]` in continuous time,
    /// `1 / (1 − a[i][i])` steps in discrete time.
    pub fn mean_waiting_time(&self, i: usize) -> f64 {
        1.0 / self.exit_rate(i)
    }

    /// Checks every structural invariant and reports all violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.n_states();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = self.rates[(i, j)];
                if v < 0.0 {
                    out.push(Violation {
                        rule: ViolationRule::NegativeRate,
                        message: format!("edge {}→{}: negative rate {v}", i + 1, j + 1),
                    });
                }
            }
        }
        for i in 0..n {
            match self.time {
                TimeKind::Continuous => {
                    if self.exit_rate(i) <= 0.0 {
                        out.push(Violation {
                            rule: ViolationRule::NoOutgoingRate,
                            message: format!(
                                "state {}: no outgoing positive rate (infinite waiting time)",
                                i + 1
                            ),
                        });
                    }
                }
                TimeKind::Discrete => {
                    let row: f64 = self.rates.row(i).iter().sum();
                    if (row - 1.0).abs() > tolerance::LINEAR {
                        out.push(Violation {
                            rule: ViolationRule::RowNormalization,
                            message: format!(
                                "state {}: jump probabilities sum to {row}, violating Eq. (B2) normalization Σ_j a[i][j] = 1",
                                i + 1
                            ),
                        });
                    }
                }
            }
        }
        if n > 1 && !self.graph().is_strongly_connected() {
            out.push(Violation {
                rule: ViolationRule::NotStronglyConnected,
                message: "transition graph is not strongly connected".into(),
            });
        }
        out
    }

    fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(NessError::InvalidProcess(
                v.into_iter().map(|v| v.message).collect(),
            ))
        }
    }

    /// Generator whose left null vector is the steady state:
    /// `W` in continuous time and `A − 1` in discrete time.
    fn generator(&self) -> DMatrix<f64> {
        let n = self.n_states();
        let mut g = self.rates.clone();
        for i in 0..n {
            g[(i, i)] = -self.exit_rate(i);
        }
        g
    }

    /// Scale of the rates, used to make residual tolerances relative.
    fn rate_scale(&self) -> f64 {
        (0..self.n_states())
            .map(|i| self.exit_rate(i))
            .fold(1.0, f64::max)
    }

    /// Unique normalized steady state `p*` with `p* W = 0`.
    ///
    /// Solved densely: the balance system `Wᵀ p = 0` with its last row
    /// replaced by the normalization `Σ p = 1`, followed by one round of
    /// iterative refinement.
    pub fn stationary_distribution(&self) -> Result<ProbabilityDistribution> {
        self.ensure_valid()?;
        let n = self.n_states();
        if n == 1 {
            return Ok(ProbabilityDistribution(vec![1.0]));
        }
        let mut m = self.generator().transpose();
        for j in 0..n {
            m[(n - 1, j)] = 1.0;
        }
        let mut rhs = DVector::zeros(n);
        rhs[n - 1] = 1.0;

        let lu = m.clone().lu();
        let mut x = lu.solve(&rhs).ok_or_else(|| NessError::Numerical {
            what: "singular steady-state system".into(),
            residual: f64::INFINITY,
        })?;
        let r = &rhs - &m * &x;
        if let Some(dx) = lu.solve(&r) {
            x += dx;
        }

        let scale = self.rate_scale();
        let mut p: Vec<f64> = x.iter().copied().collect();
        for v in p.iter_mut() {
            if *v < 0.0 {
                if *v < -tolerance::LINEAR {
                    return Err(NessError::Numerical {
                        what: "negative steady-state probability".into(),
                        residual: -*v,
                    });
                }
                *v = 0.0;
            }
        }
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= total);
        let dist = ProbabilityDistribution(p);

        let residual = self
            .master_rhs(&dist)?
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if residual > tolerance::LINEAR * scale {
            return Err(NessError::Numerical {
                what: "steady-state residual above tolerance".into(),
                residual,
            });
        }
        Ok(dist)
    }

    /// Right-hand side of the master equation,
    /// `dp_i/dt = Σ_j (φ[j][i] − φ[i][j])` with `φ[i][j] = p_i w[i][j]`.
    ///
    /// In discrete time this is `p_i(t+1) − p_i(t)`; loops cancel.
    pub fn master_rhs(&self, dist: &ProbabilityDistribution) -> Result<Vec<f64>> {
        let n = self.n_states();
        if dist.len() != n {
            return Err(NessError::Dimension {
                expected: n,
                got: dist.len(),
            });
        }
        let p = dist.as_slice();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                if j != i {
                    acc += p[j] * self.rates[(j, i)] - p[i] * self.rates[(i, j)];
                }
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Instantaneous fluxes `p_i w[i][j]` for an arbitrary distribution.
    pub fn fluxes_for(&self, dist: &ProbabilityDistribution) -> Result<FluxField> {
        let n = self.n_states();
        if dist.len() != n {
            return Err(NessError::Dimension {
                expected: n,
                got: dist.len(),
            });
        }
        let p = dist.as_slice();
        let mut phi = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    phi[(i, j)] = p[i] * self.rates[(i, j)];
                }
            }
        }
        let loops = match self.time {
            TimeKind::Continuous => None,
            TimeKind::Discrete => Some((0..n).map(|i| p[i] * self.rates[(i, i)]).collect()),
        };
        Ok(FluxField { phi, loops })
    }

    /// Steady-state flux field `φ*[i][j] = p*_i w[i][j]`.
    pub fn steady_fluxes(&self) -> Result<FluxField> {
        let p = self.stationary_distribution()?;
        self.fluxes_for(&p)
    }

    /// Product of rates along a vertex sequence.
    pub fn path_weight(&self, path: &[usize]) -> Result<f64> {
        if path.len() < 2 {
            return Err(NessError::EmptyPath);
        }
        let n = self.n_states();
        let mut w = 1.0;
        for pair in path.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            for &s in &[a, b] {
                if s >= n {
                    return Err(NessError::StateOutOfRange { index: s, n });
                }
            }
            let r = if a == b { 0.0 } else { self.rates[(a, b)] };
            if r <= 0.0 {
                return Err(NessError::ZeroRateEdge { from: a, to: b });
            }
            w *= r;
        }
        Ok(w)
    }

    /// Whether all steady-state currents vanish (within 1e-10).
    pub fn detailed_balance(&self) -> Result<DetailedBalance> {
        let f = self.steady_fluxes()?;
        let n = self.n_states();
        let mut max_current = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                max_current = max_current.max(f.current(i, j).abs());
            }
        }
        Ok(DetailedBalance {
            balanced: max_current <= tolerance::DERIVED,
            max_current,
        })
    }

    pub fn is_detailed_balanced(&self) -> Result<bool> {
        Ok(self.detailed_balance()?.balanced)
    }

    /// `w[i][j] > 0 ⇔ w[j][i] > 0` for every pair.
    pub fn is_dynamically_reversible(&self) -> bool {
        let n = self.n_states();
        (0..n)
            .all(|i| ((i + 1)..n).all(|j| (self.rates[(i, j)] > 0.0) == (self.rates[(j, i)] > 0.0)))
    }

    /// Potential `U_i` and partition value `Z` of a detailed-balanced process,
    /// gauged so that `U_0 = 0`.
    ///
    /// Potentials are propagated along a breadth-first spanning tree of the
    /// bidirectional edges; every remaining edge is then checked against the
    /// tree (Kolmogorov's criterion).
    pub fn equilibrium_potential(&self) -> Result<EquilibriumPotential> {
        let db = self.detailed_balance()?;
        if !db.balanced || !self.is_dynamically_reversible() {
            return Err(NessError::DetailedBalanceRequired {
                max_current: db.max_current,
            });
        }
        let n = self.n_states();
        let mut u = vec![f64::NAN; n];
        u[0] = 0.0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if j != i && u[j].is_nan() && self.rates[(i, j)] > 0.0 {
                    // p_j / p_i = w[i][j] / w[j][i]
                    u[j] = u[i] - (self.rates[(i, j)] / self.rates[(j, i)]).ln();
                    queue.push_back(j);
                }
            }
        }
        for (i, j, w) in self.edges() {
            let discrepancy = (u[j] - u[i] + (w / self.rates[(j, i)]).ln()).abs();
            if discrepancy > tolerance::DERIVED {
                return Err(NessError::PathRatioInconsistency {
                    from: i,
                    to: j,
                    discrepancy,
                });
            }
        }
        let partition = u.iter().map(|v| (-v).exp()).sum();
        Ok(EquilibriumPotential {
            potential: u,
            partition,
        })
    }

    /// Rebuilds a discrete chain and its steady state from a flux field that
    /// includes loop fluxes: `p*_i = Σ_j φ[i][j]` and `a[i][j] = φ[i][j] / p*_i`.
    pub fn from_discrete_fluxes(
        fluxes: &FluxField,
    ) -> Result<(MarkovProcess, ProbabilityDistribution)> {
        fluxes.check_node_condition()?;
        let n = fluxes.n_states();
        let loops = fluxes.loops.clone().unwrap_or_else(|| vec![0.0; n]);
        let mut p = vec![0.0; n];
        for i in 0..n {
            let row: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| fluxes.phi[(i, j)])
                .sum::<f64>()
                + loops[i];
            if row <= 0.0 {
                return Err(NessError::UnreachableState(i));
            }
            p[i] = row;
        }
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = if i == j { loops[i] } else { fluxes.phi[(i, j)] } / p[i];
            }
        }
        Ok((
            MarkovProcess {
                time: TimeKind::Discrete,
                rates: a,
            },
            ProbabilityDistribution(p),
        ))
    }
}

fn fill_matrix<I>(n: usize, edges: I, allow_diagonal: bool) -> Result<DMatrix<f64>>
where
    I: IntoIterator<Item = (usize, usize, f64)>,
{
    if n == 0 {
        return Err(NessError::InvalidArgument(
            "process needs at least one state".into(),
        ));
    }
    let mut m = DMatrix::zeros(n, n);
    let mut seen = DMatrix::from_element(n, n, false);
    for (i, j, w) in edges {
        for &s in &[i, j] {
            if s >= n {
                return Err(NessError::StateOutOfRange { index: s, n });
            }
        }
        if i == j && !allow_diagonal {
            return Err(NessError::InvalidArgument(format!(
                "self-transition {}→{} is not an edge",
                i + 1,
                j + 1
            )));
        }
        if !w.is_finite() {
            return Err(NessError::InvalidArgument(format!(
                "edge {}→{}: rate is not finite",
                i + 1,
                j + 1
            )));
        }
        if seen[(i, j)] {
            return Err(NessError::InvalidArgument(format!(
                "edge {}→{} given twice",
                i + 1,
                j + 1
            )));
        }
        seen[(i, j)] = true;
        m[(i, j)] = w;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetailedBalance {
    pub balanced: bool,
    pub max_current: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPotential {
    pub potential: Vec<f64>,
    pub partition: f64,
}

impl EquilibriumPotential {
    /// `p_i = exp(−U_i) / Z`.
    pub fn distribution(&self) -> ProbabilityDistribution {
        ProbabilityDistribution(
            self.potential
                .iter()
                .map(|u| (-u).exp() / self.partition)
                .collect(),
        )
    }
}

/// A probability vector over states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityDistribution(Vec<f64>);

impl ProbabilityDistribution {
    /// Checks non-negativity and normalization (within 1e-12).
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(NessError::InvalidArgument("empty distribution".into()));
        }
        if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(NessError::InvalidArgument(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > tolerance::LINEAR {
            return Err(NessError::InvalidArgument(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self(p))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Point mass on one state.
    pub fn point(n: usize, state: usize) -> Self {
        let mut p = vec![0.0; n];
        p[state] = 1.0;
        Self(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Gibbs entropy `−Σ p ln p` (nats).
    pub fn gibbs_entropy(&self) -> f64 {
        -self
            .0
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    }
}

impl std::ops::Index<usize> for ProbabilityDistribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Non-negative edge weights over ordered pairs `i ≠ j`, plus optional
/// discrete-time loop fluxes.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxField {
    phi: DMatrix<f64>,
    loops: Option<Vec<f64>>,
}

impl FluxField {
    pub fn zeros(n: usize) -> Self {
        Self {
            phi: DMatrix::zeros(n, n),
            loops: None,
        }
    }

    /// Builds a field from a matrix; the diagonal is discarded.
    pub fn from_matrix(mut phi: DMatrix<f64>) -> Result<Self> {
        if phi.nrows() != phi.ncols() {
            return Err(NessError::Dimension {
                expected: phi.nrows(),
                got: phi.ncols(),
            });
        }
        if phi.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(NessError::InvalidArgument(
                "fluxes must be finite and non-negative".into(),
            ));
        }
        phi.fill_diagonal(0.0);
        Ok(Self { phi, loops: None })
    }

    /// Builds a field from 0-based `(from, to, value)` triples.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let m = fill_matrix(n, edges, false)?;
        Self::from_matrix(m)
    }

    pub fn with_loops(mut self, loops: Vec<f64>) -> Result<Self> {
        if loops.len() != self.n_states() {
            return Err(NessError::Dimension {
                expected: self.n_states(),
                got: loops.len(),
            });
        }
        if loops.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(NessError::InvalidArgument(
                "loop fluxes must be finite and non-negative".into(),
            ));
        }
        self.loops = Some(loops);
        Ok(self)
    }

    pub fn n_states(&self) -> usize {
        self.phi.nrows()
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.phi[(from, to)]
    }

    pub(crate) fn get_mut(&mut self, from: usize, to: usize) -> &mut f64 {
        &mut self.phi[(from, to)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn loops(&self) -> Option<&[f64]> {
        self.loops.as_deref()
    }

    /// Edges with positive flux, row-major.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_states();
        (0..n).flat_map(move |i| {
            (0..n).filter_map(move |j| {
                let v = self.phi[(i, j)];
                (i != j && v > 0.0).then_some((i, j, v))
            })
        })
    }

    /// `I[i][j] = φ[i][j] − φ[j][i]`.
    pub fn current(&self, i: usize, j: usize) -> f64 {
        self.phi[(i, j)] - self.phi[(j, i)]
    }

    /// Net outflow `Σ_j (φ[i][j] − φ[j][i])` at a state.
    pub fn node_imbalance(&self, i: usize) -> f64 {
        let n = self.n_states();
        let mut out = 0.0;
        let mut inn = 0.0;
        for j in 0..n {
            if j != i {
                out += self.phi[(i, j)];
                inn += self.phi[(j, i)];
            }
        }
        out - inn
    }

    /// Worst node-condition violation as `(state, |imbalance|)`.
    pub fn max_node_imbalance(&self) -> (usize, f64) {
        (0..self.n_states())
            .map(|i| (i, self.node_imbalance(i).abs()))
            .fold(
                (0, 0.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            )
    }

    pub fn max_flux(&self) -> f64 {
        self.phi.iter().fold(0.0_f64, |a, &b| a.max(b))
    }

    /// Node-condition tolerance, relative to the field's largest entry.
    pub(crate) fn node_tolerance(&self) -> f64 {
        tolerance::LINEAR * self.max_flux().max(1.0)
    }

    pub fn satisfies_node_condition(&self) -> bool {
        self.max_node_imbalance().1 <= self.node_tolerance()
    }

    pub fn check_node_condition(&self) -> Result<()> {
        let (state, imbalance) = self.max_node_imbalance();
        if imbalance > self.node_tolerance() {
            return Err(NessError::NotSteadyState { state, imbalance });
        }
        Ok(())
    }

    /// Largest absolute entrywise difference from another field
    /// (off-diagonal fluxes only).
    pub fn max_abs_diff(&self, other: &FluxField) -> f64 {
        self.phi
            .iter()
            .zip(other.phi.iter())
            .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn scaled(&self, factor: f64) -> FluxField {
        FluxField {
            phi: &self.phi * factor,
            loops: self
                .loops
                .as_ref()
                .map(|l| l.iter().map(|v| v * factor).collect()),
        }
    }
}
