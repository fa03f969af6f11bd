//! Deterministic iterative cycle decomposition of steady-state flux fields.
//!
//! Given a Kirchhoff-balanced field `φ` and an ordering of all simple cycles
//! `α_1 … α_M`, each cycle in turn receives the minimum of the current flux
//! along its edges, which is then subtracted from those edges. Because every
//! subtraction preserves the node condition, the field is exhausted once all
//! cycles have been visited, and `Σ_α m_α χ_α` reproduces `φ`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::cycles::{Cycle, CycleCatalog};
use crate::error::{NessError, Result};
use crate::markov::FluxField;
use crate::tolerance;

/// Default cap on the number of orderings tried exhaustively (`10!`).
pub const DEFAULT_MAX_ORDERINGS: usize = 3_628_800;

/// Entries of the working field at or below this fraction of the largest
/// input flux are flushed to zero after each subtraction.
const FLUSH_RELATIVE: f64 = 1e-14;

/// A cycle together with its assigned weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCycle {
    pub cycle: Cycle,
    pub weight: f64,
    /// Position of the cycle in the catalog it was drawn from, if any.
    pub catalog_index: Option<usize>,
}

/// Non-negative cycle weights whose superposition reproduces a flux field.
///
/// Entries are kept in the order the cycles were processed; zero-weight
/// cycles stay recorded so that decompositions from different orderings can
/// be compared entry by entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleDecomposition {
    n_states: usize,
    entries: Vec<WeightedCycle>,
    residual: FluxField,
}

impl CycleDecomposition {
    pub fn empty(n_states: usize) -> Self {
        Self {
            n_states,
            entries: Vec::new(),
            residual: FluxField::zeros(n_states),
        }
    }

    /// Decomposition from explicit weights (no residual).
    pub fn from_weights(n_states: usize, weights: Vec<(Cycle, f64)>) -> Result<Self> {
        let mut entries = Vec::with_capacity(weights.len());
        for (cycle, weight) in weights {
            if let Some(&v) = cycle.vertices().iter().find(|&&v| v >= n_states) {
                return Err(NessError::StateOutOfRange {
                    index: v,
                    n: n_states,
                });
            }
            if !weight.is_finite() || weight < 0.0 {
                return Err(NessError::InvalidArgument(format!(
                    "cycle {cycle}: weight {weight} is not a non-negative number"
                )));
            }
            entries.push(WeightedCycle {
                cycle,
                weight,
                catalog_index: None,
            });
        }
        Ok(Self {
            n_states,
            entries,
            residual: FluxField::zeros(n_states),
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// All processed cycles, in processing order.
    pub fn entries(&self) -> &[WeightedCycle] {
        &self.entries
    }

    /// Cycles with strictly positive weight.
    pub fn support(&self) -> impl Iterator<Item = &WeightedCycle> {
        self.entries.iter().filter(|e| e.weight > 0.0)
    }

    pub fn support_size(&self) -> usize {
        self.support().count()
    }

    pub fn weight_of(&self, cycle: &Cycle) -> f64 {
        self.entries
            .iter()
            .find(|e| &e.cycle == cycle)
            .map_or(0.0, |e| e.weight)
    }

    /// Catalog indices in processing order (entries built from explicit
    /// weights have none).
    pub fn ordering(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter_map(|e| e.catalog_index)
            .collect()
    }

    /// Field left after the last cycle; identically zero on success.
    pub fn residual(&self) -> &FluxField {
        &self.residual
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// `Σ_α m_α χ_α`.
    pub fn reconstruct_fluxes(&self) -> FluxField {
        let mut f = FluxField::zeros(self.n_states);
        for e in &self.entries {
            if e.weight > 0.0 {
                for (a, b) in e.cycle.edges() {
                    *f.get_mut(a, b) += e.weight;
                }
            }
        }
        f
    }

    /// Weights indexed by catalog position.
    pub fn weight_vector(&self, catalog_len: usize) -> Vec<f64> {
        let mut w = vec![0.0; catalog_len];
        for e in &self.entries {
            if let Some(k) = e.catalog_index {
                w[k] = e.weight;
            }
        }
        w
    }

    /// Same weights up to `1e-10` relative to the larger maximum weight.
    pub fn same_weights(&self, other: &CycleDecomposition) -> bool {
        let max = self
            .entries
            .iter()
            .chain(&other.entries)
            .fold(0.0_f64, |a, e| a.max(e.weight));
        let tol = tolerance::DERIVED * max.max(f64::MIN_POSITIVE);
        let covered = |a: &CycleDecomposition, b: &CycleDecomposition| {
            a.entries
                .iter()
                .all(|e| (e.weight - b.weight_of(&e.cycle)).abs() <= tol)
        };
        covered(self, other) && covered(other, self)
    }

    /// JSON export with 1-based cycles, in processing order.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n_states": self.n_states,
            "ordering": self.entries.iter().map(|e| e.cycle.one_based()).collect::<Vec<_>>(),
            "support_size": self.support_size(),
            "cycles": self
                .entries
                .iter()
                .map(|e| json!({ "cycle": e.cycle.one_based(), "weight": e.weight }))
                .collect::<Vec<_>>(),
        })
    }
}

/// Runs the iterative decomposition over `catalog` in the given order.
///
/// `ordering` must be a permutation of `0..catalog.len()`.
pub fn decompose(
    fluxes: &FluxField,
    catalog: &CycleCatalog,
    ordering: &[usize],
) -> Result<CycleDecomposition> {
    let n = fluxes.n_states();
    if catalog.n_vertices() != n {
        return Err(NessError::Dimension {
            expected: n,
            got: catalog.n_vertices(),
        });
    }
    check_permutation(ordering, catalog.len())?;
    fluxes.check_node_condition()?;

    let tol = fluxes.node_tolerance();
    let flush = FLUSH_RELATIVE * fluxes.max_flux();
    let mut work = FluxField::from_matrix(fluxes.matrix().clone())?;
    let mut entries = Vec::with_capacity(ordering.len());

    for &k in ordering {
        let cycle = catalog.get(k);
        let weight = cycle
            .edges()
            .map(|(a, b)| work.get(a, b))
            .fold(f64::INFINITY, f64::min);
        if weight > 0.0 {
            for (a, b) in cycle.edges() {
                let v = work.get_mut(a, b);
                *v -= weight;
                if *v <= flush {
                    *v = 0.0;
                }
            }
            for &v in cycle.vertices() {
                let imbalance = work.node_imbalance(v);
                if imbalance.abs() > tol {
                    return Err(NessError::Internal(format!(
                        "node condition lost at state {} after cycle {cycle} (imbalance {imbalance:e})",
                        v + 1
                    )));
                }
            }
        }
        entries.push(WeightedCycle {
            cycle: cycle.clone(),
            weight: weight.max(0.0),
            catalog_index: Some(k),
        });
    }

    let leftover = work.max_flux();
    if leftover > tol {
        return Err(NessError::Internal(format!(
            "nonzero residual flux {leftover:e} after all cycles"
        )));
    }
    let d = CycleDecomposition {
        n_states: n,
        entries,
        residual: FluxField::zeros(n),
    };
    let err = d.reconstruct_fluxes().max_abs_diff(fluxes);
    if err > tol {
        return Err(NessError::Internal(format!(
            "reconstruction differs from input by {err:e}"
        )));
    }
    Ok(d)
}

/// Decomposition using the catalog's own order.
pub fn decompose_default(fluxes: &FluxField, catalog: &CycleCatalog) -> Result<CycleDecomposition> {
    decompose(fluxes, catalog, &catalog.default_ordering())
}

fn check_permutation(ordering: &[usize], m: usize) -> Result<()> {
    if ordering.len() != m {
        return Err(NessError::BadOrdering(m));
    }
    let mut seen = vec![false; m];
    for &k in ordering {
        if k >= m || seen[k] {
            return Err(NessError::BadOrdering(m));
        }
        seen[k] = true;
    }
    Ok(())
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// The `rank`-th permutation of `0..m` in lexicographic order.
fn unrank_permutation(m: usize, mut rank: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..m).collect();
    let mut out = Vec::with_capacity(m);
    for k in (0..m).rev() {
        let f = (1..=k).product::<usize>();
        let idx = rank / f;
        rank %= f;
        out.push(pool.remove(idx));
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn push_distinct(set: &mut Vec<CycleDecomposition>, d: CycleDecomposition) {
    if !set.iter().any(|x| x.same_weights(&d)) {
        set.push(d);
    }
}

/// All distinct decompositions over every ordering of the catalog.
///
/// Orderings are visited in lexicographic order (in parallel chunks) and the
/// result lists each distinct weight vector in order of first appearance.
pub fn enumerate_decompositions(
    fluxes: &FluxField,
    catalog: &CycleCatalog,
    max_orderings: usize,
) -> Result<Vec<CycleDecomposition>> {
    let m = catalog.len();
    let count = factorial(m);
    if count > max_orderings as f64 {
        return Err(NessError::TooManyOrderings {
            count,
            cap: max_orderings,
        });
    }
    fluxes.check_node_condition()?;
    if m == 0 {
        return Ok(vec![decompose(fluxes, catalog, &[])?]);
    }
    let total = count as usize;
    let chunk = 720.min(total);
    let n_chunks = total.div_ceil(chunk);

    let partial: Vec<Result<Vec<CycleDecomposition>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(total);
            let mut perm = unrank_permutation(m, start);
            let mut local = Vec::new();
            for r in start..end {
                push_distinct(&mut local, decompose(fluxes, catalog, &perm)?);
                if r + 1 < end {
                    next_permutation(&mut perm);
                }
            }
            Ok(local)
        })
        .collect();

    let mut distinct = Vec::new();
    for part in partial {
        for d in part? {
            push_distinct(&mut distinct, d);
        }
    }
    Ok(distinct)
}

/// Result of decomposing under randomly drawn orderings.
#[derive(Debug, Clone)]
pub struct SampledDecompositions {
    pub distinct: Vec<CycleDecomposition>,
    pub samples: usize,
    pub seed: u64,
}

impl SampledDecompositions {
    /// The number of distinct decompositions seen; the true count may be larger.
    pub fn lower_bound(&self) -> usize {
        self.distinct.len()
    }
}

/// Decomposes under `samples` uniformly random orderings drawn from a seeded
/// generator. Used when the catalog is too large for exhaustive enumeration.
pub fn sample_decompositions(
    fluxes: &FluxField,
    catalog: &CycleCatalog,
    samples: usize,
    seed: u64,
) -> Result<SampledDecompositions> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let orderings: Vec<Vec<usize>> = (0..samples)
        .map(|_| {
            let mut p = catalog.default_ordering();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    let found: Vec<CycleDecomposition> = orderings
        .par_iter()
        .map(|p| decompose(fluxes, catalog, p))
        .collect::<Result<_>>()?;
    let mut distinct = Vec::new();
    for d in found {
        push_distinct(&mut distinct, d);
    }
    Ok(SampledDecompositions {
        distinct,
        samples,
        seed,
    })
}

/// A decomposition whose ordering processes every 2-cycle first.
#[derive(Debug, Clone)]
pub struct DbCurrentSplit {
    pub decomposition: CycleDecomposition,
    n_two_cycles: usize,
}

impl DbCurrentSplit {
    /// The detailed-balance part: one entry per 2-cycle.
    pub fn detailed_balance_part(&self) -> &[WeightedCycle] {
        &self.decomposition.entries[..self.n_two_cycles]
    }

    /// The current part: all longer cycles.
    pub fn current_part(&self) -> &[WeightedCycle] {
        &self.decomposition.entries[self.n_two_cycles..]
    }

    pub fn current_is_empty(&self) -> bool {
        self.current_part().iter().all(|e| e.weight == 0.0)
    }
}

/// Splits a field into its detailed-balance part (2-cycles, each carrying
/// `min(φ[i][j], φ[j][i])`) and the remaining current part.
pub fn db_current_split(fluxes: &FluxField, catalog: &CycleCatalog) -> Result<DbCurrentSplit> {
    let (two, rest): (Vec<usize>, Vec<usize>) =
        (0..catalog.len()).partition(|&k| catalog.get(k).len() == 2);
    let n_two_cycles = two.len();
    let ordering: Vec<usize> = two.into_iter().chain(rest).collect();
    let decomposition = decompose(fluxes, catalog, &ordering)?;
    // 2-cycles use disjoint edge pairs, so each sees the untouched field.
    for e in &decomposition.entries[..n_two_cycles] {
        let v = e.cycle.vertices();
        let expected = fluxes.get(v[0], v[1]).min(fluxes.get(v[1], v[0]));
        if e.weight != expected {
            return Err(NessError::Internal(format!(
                "2-cycle {} weight {} differs from min flux {expected}",
                e.cycle, e.weight
            )));
        }
    }
    Ok(DbCurrentSplit {
        decomposition,
        n_two_cycles,
    })
}
