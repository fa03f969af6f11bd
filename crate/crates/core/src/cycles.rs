//! Directed graphs, simple cycles and cycle catalogs.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{NessError, Result};

/// Default cap on the number of cycles a catalog may hold.
pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// Simple directed graph on vertices `0..n` (no self-loops, no multi-edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    succ: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut sets = vec![BTreeSet::new(); n];
        for (a, b) in edges {
            for &s in &[a, b] {
                if s >= n {
                    return Err(NessError::StateOutOfRange { index: s, n });
                }
            }
            if a != b {
                sets[a].insert(b);
            }
        }
        Ok(Self {
            succ: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
    }

    /// Unordered pairs `{i, j}` with at least one direction present.
    pub fn undirected_pair_count(&self) -> usize {
        self.edges()
            .filter(|&(a, b)| a < b || !self.has_edge(b, a))
            .count()
    }

    pub fn is_strongly_connected(&self) -> bool {
        let n = self.n_vertices();
        if n == 0 {
            return true;
        }
        let reach = |adj: &dyn Fn(usize) -> Vec<usize>| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for w in adj(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        let mut pred = vec![Vec::new(); n];
        for (a, b) in self.edges() {
            pred[b].push(a);
        }
        reach(&|v| self.succ[v].clone()) && reach(&|v| pred[v].clone())
    }

    /// Adjacency of the subgraph induced on the vertices marked in `keep`.
    fn restricted(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        self.succ
            .iter()
            .enumerate()
            .map(|(v, s)| {
                if keep[v] {
                    s.iter().copied().filter(|&w| keep[w]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect()
    }
}

/// A simple directed cycle, stored rotated so its smallest vertex leads.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle(Vec<usize>);

impl Cycle {
    /// Canonical form of a closed vertex sequence (0-based, without the
    /// repeated start vertex).
    pub fn new(vertices: &[usize]) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(NessError::CycleTooShort(vertices.len()));
        }
        let mut seen = BTreeSet::new();
        for &v in vertices {
            if !seen.insert(v) {
                return Err(NessError::NotSelfAvoiding(v));
            }
        }
        let lead = vertices
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| v)
            .map(|(k, _)| k)
            .unwrap_or(0);
        let mut c = Vec::with_capacity(vertices.len());
        c.extend_from_slice(&vertices[lead..]);
        c.extend_from_slice(&vertices[..lead]);
        Ok(Cycle(c))
    }

    /// Canonical cycle from 1-based vertex labels.
    pub fn from_one_based(vertices: &[usize]) -> Result<Self> {
        if let Some(&bad) = vertices.iter().find(|&&v| v == 0) {
            return Err(NessError::InvalidArgument(format!(
                "vertex label {bad} is not 1-based"
            )));
        }
        let zero: Vec<usize> = vertices.iter().map(|v| v - 1).collect();
        Self::new(&zero)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }

    /// Cycle length `s`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Directed edges traversed, in order, closing back to the start.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let s = self.0.len();
        (0..s).map(move |k| (self.0[k], self.0[(k + 1) % s]))
    }

    /// Edge indicator: 1 if the cycle traverses `from → to`.
    pub fn passes_edge(&self, from: usize, to: usize) -> bool {
        self.edges().any(|e| e == (from, to))
    }

    /// Vertex indicator: 1 if the cycle visits `v`.
    pub fn passes_vertex(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    /// Passage function: edge query when `to` is given, vertex query otherwise.
    pub fn passage(&self, i: usize, to: Option<usize>) -> u8 {
        match to {
            Some(j) => self.passes_edge(i, j) as u8,
            None => self.passes_vertex(i) as u8,
        }
    }

    pub fn shares_vertex(&self, other: &Cycle) -> bool {
        self.0.iter().any(|v| other.0.contains(v))
    }
}

/// Renders as `1→3→6→4` (1-based).
impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("→")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

/// All simple cycles of a graph, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCatalog {
    n_vertices: usize,
    cycles: Vec<Cycle>,
}

impl CycleCatalog {
    /// Enumerates every simple cycle (Johnson's algorithm) and sorts them by
    /// `(length, vertex sequence)`.
    pub fn enumerate(g: &Digraph) -> Result<Self> {
        Self::enumerate_capped(g, DEFAULT_CYCLE_CAP)
    }

    pub fn enumerate_capped(g: &Digraph, cap: usize) -> Result<Self> {
        let mut cycles = johnson(g, cap)?;
        cycles.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(Self {
            n_vertices: g.n_vertices(),
            cycles,
        })
    }

    /// Catalog from explicit cycles; duplicates under rotation are rejected.
    pub fn from_cycles(n_vertices: usize, cycles: Vec<Cycle>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for c in &cycles {
            if let Some(&v) = c.vertices().iter().find(|&&v| v >= n_vertices) {
                return Err(NessError::StateOutOfRange {
                    index: v,
                    n: n_vertices,
                });
            }
            if !seen.insert(c.clone()) {
                return Err(NessError::InvalidArgument(format!("duplicate cycle {c}")));
            }
        }
        Ok(Self { n_vertices, cycles })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn get(&self, k: usize) -> &Cycle {
        &self.cycles[k]
    }

    pub fn position(&self, c: &Cycle) -> Option<usize> {
        self.cycles.iter().position(|x| x == c)
    }

    /// Catalog order `0, 1, …, M−1`.
    pub fn default_ordering(&self) -> Vec<usize> {
        (0..self.cycles.len()).collect()
    }

    /// Ordering with the given cycles first (in the given order) followed by
    /// the rest in catalog order.
    pub fn ordering_with_prefix(&self, prefix: &[Cycle]) -> Result<Vec<usize>> {
        let mut order = Vec::with_capacity(self.len());
        for c in prefix {
            let k = self
                .position(c)
                .ok_or_else(|| NessError::InvalidArgument(format!("cycle {c} not in catalog")))?;
            if order.contains(&k) {
                return Err(NessError::InvalidArgument(format!(
                    "cycle {c} listed twice"
                )));
            }
            order.push(k);
        }
        let rest: Vec<usize> = (0..self.len()).filter(|k| !order.contains(k)).collect();
        order.extend(rest);
        Ok(order)
    }

    /// Catalog export: array of 1-based vertex arrays.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.cycles
                .iter()
                .map(|c| serde_json::json!(c.one_based()))
                .collect(),
        )
    }
}

/// Cycle-count bounds of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleCounts {
    /// Number of simple directed cycles.
    pub total: usize,
    /// Betti number `|E| − N + 1`.
    pub betti: usize,
    /// Fundamental cycles of the undirected support, `U − N + 1`.
    pub fundamental: usize,
}

pub fn cycle_counts(g: &Digraph) -> Result<CycleCounts> {
    let catalog = CycleCatalog::enumerate(g)?;
    let n = g.n_vertices();
    Ok(CycleCounts {
        total: catalog.len(),
        betti: (g.edge_count() + 1).saturating_sub(n),
        fundamental: (g.undirected_pair_count() + 1).saturating_sub(n),
    })
}

/// Johnson's elementary-circuit enumeration. For each start vertex `s`
/// (ascending) it searches the strongly connected component containing `s`
/// within the subgraph on vertices `>= s`, so every cycle is found once with
/// its smallest vertex first.
fn johnson(g: &Digraph, cap: usize) -> Result<Vec<Cycle>> {
    let n = g.n_vertices();
    let mut out = Vec::new();
    let mut blocked = vec![false; n];
    let mut block_map: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack: Vec<usize> = Vec::new();

    for s in 0..n {
        let keep: Vec<bool> = (0..n).map(|v| v >= s).collect();
        let sub = g.restricted(&keep);
        let comp = component_of(&sub, s);
        if comp.iter().filter(|&&c| c).count() < 2 {
            continue;
        }
        let adj: Vec<Vec<usize>> = sub
            .iter()
            .enumerate()
            .map(|(v, succ)| {
                if comp[v] {
                    succ.iter().copied().filter(|&w| comp[w]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        for v in 0..n {
            if comp[v] {
                blocked[v] = false;
                block_map[v].clear();
            }
        }
        circuit(
            s,
            s,
            &adj,
            &mut blocked,
            &mut block_map,
            &mut stack,
            &mut out,
            cap,
        )?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn circuit(
    v: usize,
    s: usize,
    adj: &[Vec<usize>],
    blocked: &mut [bool],
    block_map: &mut [Vec<usize>],
    stack: &mut Vec<usize>,
    out: &mut Vec<Cycle>,
    cap: usize,
) -> Result<bool> {
    let mut found = false;
    stack.push(v);
    blocked[v] = true;
    for &w in &adj[v] {
        if w == s {
            if out.len() >= cap {
                return Err(NessError::CycleExplosion { cap });
            }
            out.push(Cycle(stack.clone()));
            found = true;
        } else if !blocked[w] && circuit(w, s, adj, blocked, block_map, stack, out, cap)? {
            found = true;
        }
    }
    if found {
        unblock(v, blocked, block_map);
    } else {
        for &w in &adj[v] {
            if !block_map[w].contains(&v) {
                block_map[w].push(v);
            }
        }
    }
    stack.pop();
    Ok(found)
}

fn unblock(u: usize, blocked: &mut [bool], block_map: &mut [Vec<usize>]) {
    let mut work = vec![u];
    while let Some(x) = work.pop() {
        if blocked[x] {
            blocked[x] = false;
            work.extend(std::mem::take(&mut block_map[x]));
        }
    }
}

/// Vertices in the strongly connected component of `s` (forward ∩ backward reach).
fn component_of(adj: &[Vec<usize>], s: usize) -> Vec<bool> {
    let n = adj.len();
    let mut fwd = vec![false; n];
    let mut stack = vec![s];
    fwd[s] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !fwd[w] {
                fwd[w] = true;
                stack.push(w);
            }
        }
    }
    let mut pred = vec![Vec::new(); n];
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            pred[w].push(v);
        }
    }
    let mut bwd = vec![false; n];
    stack.push(s);
    bwd[s] = true;
    while let Some(v) = stack.pop() {
        for &w in &pred[v] {
            if !bwd[w] {
                bwd[w] = true;
                stack.push(w);
            }
        }
    }
    fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c1(v: &[usize]) -> Cycle {
        Cycle::from_one_based(v).unwrap()
    }

    #[test]
    fn canonical_rotation() {
        assert_eq!(c1(&[3, 6, 4, 1]).one_based(), vec![1, 3, 6, 4]);
        assert_eq!(c1(&[1, 2]).one_based(), vec![1, 2]);
        assert_eq!(c1(&[6, 5, 1, 2]).one_based(), vec![1, 2, 6, 5]);
        assert_eq!(c1(&[3, 6, 4, 1]).to_string(), "1→3→6→4");
    }

    #[test]
    fn canonical_errors() {
        assert_eq!(Cycle::new(&[1, 2, 1]), Err(NessError::NotSelfAvoiding(1)));
        assert_eq!(Cycle::new(&[4]), Err(NessError::CycleTooShort(1)));
    }

    #[test]
    fn passage_indicators() {
        let alpha = c1(&[1, 3, 6, 4]);
        assert_eq!(alpha.passage(2, Some(5)), 1);
        assert_eq!(alpha.passage(5, Some(2)), 0);
        assert_eq!(alpha.passage(5, None), 1);
        assert_eq!(alpha.passage(1, None), 0);
        // closing edge 4→1
        assert!(alpha.passes_edge(3, 0));
    }

    #[test]
    fn bidirectional_edge_has_one_two_cycle() {
        let g = Digraph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        let cat = CycleCatalog::enumerate(&g).unwrap();
        assert_eq!(cat.cycles(), &[Cycle::new(&[0, 1]).unwrap()]);
    }

    #[test]
    fn complete_bidirectional_k4_has_twenty_cycles() {
        let edges = (0..4).flat_map(|a| (0..4).filter(move |&b| b != a).map(move |b| (a, b)));
        let g = Digraph::from_edges(4, edges).unwrap();
        assert_eq!(CycleCatalog::enumerate(&g).unwrap().len(), 20);
    }

    #[test]
    fn catalog_is_sorted_by_length_then_sequence() {
        let edges = (0..4).flat_map(|a| (0..4).filter(move |&b| b != a).map(move |b| (a, b)));
        let g = Digraph::from_edges(4, edges).unwrap();
        let cat = CycleCatalog::enumerate(&g).unwrap();
        for w in cat.cycles().windows(2) {
            assert!((w[0].len(), &w[0]) < (w[1].len(), &w[1]));
        }
    }

    #[test]
    fn cap_triggers_explosion_error() {
        let edges = (0..5).flat_map(|a| (0..5).filter(move |&b| b != a).map(move |b| (a, b)));
        let g = Digraph::from_edges(5, edges).unwrap();
        assert_eq!(
            CycleCatalog::enumerate_capped(&g, 10),
            Err(NessError::CycleExplosion { cap: 10 })
        );
    }

    #[test]
    fn unidirectional_ring_counts() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = cycle_counts(&g).unwrap();
        assert_eq!(
            c,
            CycleCounts {
                total: 1,
                betti: 1,
                fundamental: 1
            }
        );
    }

    #[test]
    fn strong_connectivity() {
        assert!(Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)])
            .unwrap()
            .is_strongly_connected());
        assert!(!Digraph::from_edges(3, [(0, 1), (1, 2), (2, 1)])
            .unwrap()
            .is_strongly_connected());
    }

    #[test]
    fn prefix_ordering() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
        let cat = CycleCatalog::enumerate(&g).unwrap();
        let second = cat.get(1).clone();
        assert_eq!(cat.ordering_with_prefix(&[second]).unwrap(), vec![1, 0]);
    }
}
