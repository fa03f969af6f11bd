//! The cycle transform: a dual graph whose nodes are the weighted cycles of
//! a decomposition and whose edges connect cycles sharing a state.
//!
//! At every state `i` a cycle `β` is drawn with probability
//! `m_β / Σ_γ χ_{i,γ} m_γ`; summing these exchanges over the states two
//! cycles share gives rates `b[α][β]` and fluxes `ψ[α][β] = m_α b[α][β]`,
//! which are symmetric.

use serde_json::json;

use crate::cycles::Cycle;
use crate::decomposition::CycleDecomposition;
use crate::error::{NessError, Result};
use crate::markov::MarkovProcess;
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct CycleNode {
    pub cycle: Cycle,
    pub weight: f64,
    /// Mean cycle period `Σ_i χ_{i,α} ⟨τ_i⟩`.
    pub period: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleEdge {
    pub a: usize,
    pub b: usize,
    /// Exchange rate from `a` to `b`.
    pub rate_ab: f64,
    pub rate_ba: f64,
    pub flux_ab: f64,
    pub flux_ba: f64,
}

/// The cycle graph `H` of a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleGraph {
    nodes: Vec<CycleNode>,
    edges: Vec<CycleEdge>,
}

impl CycleGraph {
    /// Builds `H` from the nonzero-weight cycles of `d`.
    ///
    /// Waiting times come from `process`: `1 / Σ_k w[i][k]` in continuous
    /// time and `1 / (1 − a[i][i])` steps in discrete time.
    pub fn build(d: &CycleDecomposition, process: &MarkovProcess) -> Result<Self> {
        let n = d.n_states();
        if process.n_states() != n {
            return Err(NessError::Dimension {
                expected: n,
                got: process.n_states(),
            });
        }
        let support: Vec<_> = d.support().collect();

        // Σ_γ χ_{i,γ} m_γ: total cycle weight through each state.
        let mut through = vec![0.0; n];
        for e in &support {
            for &v in e.cycle.vertices() {
                through[v] += e.weight;
            }
        }
        // In an irreducible process every state carries steady flux, so it
        // must lie on some weighted cycle.
        for (i, &t) in through.iter().enumerate() {
            if t == 0.0 && process.exit_rate(i) > 0.0 {
                return Err(NessError::DecompositionInconsistency(i));
            }
        }

        let nodes: Vec<CycleNode> = support
            .iter()
            .map(|e| CycleNode {
                cycle: e.cycle.clone(),
                weight: e.weight,
                period: e
                    .cycle
                    .vertices()
                    .iter()
                    .map(|&i| process.mean_waiting_time(i))
                    .sum(),
            })
            .collect();

        let mut edges = Vec::new();
        for a in 0..nodes.len() {
            for b in (a + 1)..nodes.len() {
                let shared: Vec<usize> = nodes[a]
                    .cycle
                    .vertices()
                    .iter()
                    .copied()
                    .filter(|v| nodes[b].cycle.passes_vertex(*v))
                    .collect();
                if shared.is_empty() {
                    continue;
                }
                let inv: f64 = shared.iter().map(|&i| 1.0 / through[i]).sum();
                let rate_ab = nodes[b].weight * inv;
                let rate_ba = nodes[a].weight * inv;
                edges.push(CycleEdge {
                    a,
                    b,
                    rate_ab,
                    rate_ba,
                    flux_ab: nodes[a].weight * rate_ab,
                    flux_ba: nodes[b].weight * rate_ba,
                });
            }
        }
        let g = Self { nodes, edges };
        let asym = g.max_flux_asymmetry();
        let scale = g.edges.iter().fold(1.0_f64, |m, e| m.max(e.flux_ab));
        if asym > tolerance::LINEAR * scale {
            return Err(NessError::Internal(format!(
                "cycle-graph fluxes not symmetric ({asym:e})"
            )));
        }
        Ok(g)
    }

    pub fn nodes(&self) -> &[CycleNode] {
        &self.nodes
    }

    /// Undirected adjacency, one entry per unordered pair `a < b`.
    pub fn edges(&self) -> &[CycleEdge] {
        &self.edges
    }

    /// `b[α][β]`, zero if the cycles share no state.
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.edges
            .iter()
            .find_map(|e| {
                if (e.a, e.b) == (from, to) {
                    Some(e.rate_ab)
                } else if (e.b, e.a) == (from, to) {
                    Some(e.rate_ba)
                } else {
                    None
                }
            })
            .unwrap_or(0.0)
    }

    /// `ψ[α][β] = m_α b[α][β]`.
    pub fn flux(&self, from: usize, to: usize) -> f64 {
        self.nodes[from].weight * self.rate(from, to)
    }

    pub fn max_flux_asymmetry(&self) -> f64 {
        self.edges
            .iter()
            .fold(0.0_f64, |m, e| m.max((e.flux_ab - e.flux_ba).abs()))
    }

    /// `Σ_α m_α τ_α`; equals one for a steady-state decomposition.
    pub fn normalization(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight * n.period).sum()
    }

    /// Boltzmann form `m_α = exp(−H_α) / Z` in the gauge `Z = 1`.
    ///
    /// Checks the normalization `Σ m τ = 1` and that potential differences
    /// match the exchange-rate ratios on every edge.
    pub fn potential(&self) -> Result<CyclePotential> {
        let norm = self.normalization();
        if (norm - 1.0).abs() > tolerance::DERIVED {
            return Err(NessError::Normalization { value: norm });
        }
        let energy: Vec<f64> = self.nodes.iter().map(|n| -n.weight.ln()).collect();
        for e in &self.edges {
            let expected = -(e.rate_ab / e.rate_ba).ln();
            let got = energy[e.b] - energy[e.a];
            if (got - expected).abs() > tolerance::DERIVED {
                return Err(NessError::Internal(format!(
                    "potential difference {got} disagrees with rate ratio {expected}"
                )));
            }
        }
        Ok(CyclePotential {
            energy,
            partition: 1.0,
        })
    }

    /// Export: nodes with `{cycle, m, tau, H}` and edges with
    /// `{a, b, b_ab, b_ba, psi}` (1-based cycles, 0-based node indices).
    pub fn to_json(&self, potential: Option<&CyclePotential>) -> serde_json::Value {
        json!({
            "nodes": self.nodes.iter().enumerate().map(|(k, n)| json!({
                "cycle": n.cycle.one_based(),
                "m": n.weight,
                "tau": n.period,
                "H": potential.map(|p| p.energy[k]),
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!({
                "a": e.a,
                "b": e.b,
                "b_ab": e.rate_ab,
                "b_ba": e.rate_ba,
                "psi": e.flux_ab,
            })).collect::<Vec<_>>(),
            "Z": potential.map(|p| p.partition),
        })
    }
}

/// Cycle potential `H_α` and partition value `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclePotential {
    pub energy: Vec<f64>,
    pub partition: f64,
}

impl CyclePotential {
    /// `Z⁻¹ exp(−H_α)`.
    pub fn weights(&self) -> Vec<f64> {
        self.energy
            .iter()
            .map(|h| (-h).exp() / self.partition)
            .collect()
    }

    /// Shifts every `H` by `c` and rescales `Z` by `exp(−c)`; weights are unchanged.
    pub fn regauged(&self, c: f64) -> CyclePotential {
        CyclePotential {
            energy: self.energy.iter().map(|h| h + c).collect(),
            partition: self.partition * (-c).exp(),
        }
    }

    /// `Σ_α τ_α exp(−H_α)` for the given periods.
    pub fn partition_from_periods(&self, periods: &[f64]) -> f64 {
        self.energy
            .iter()
            .zip(periods)
            .map(|(h, t)| t * (-h).exp())
            .sum()
    }
}
