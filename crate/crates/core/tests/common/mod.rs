#![allow(dead_code)]

use ness_core::cycles::{Cycle, Digraph};
use ness_core::markov::{MarkovProcess, TimeKind};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Edge pattern of a random strongly connected graph: a Hamiltonian ring
/// through a shuffled vertex order plus extra edges with probability `density`.
pub fn random_pattern(
    r: &mut impl Rng,
    n: usize,
    density: f64,
    reversible: bool,
) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(r);
    let mut has = vec![vec![false; n]; n];
    for k in 0..n {
        has[order[k]][order[(k + 1) % n]] = true;
    }
    for (i, row) in has.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            if i != j && r.gen_bool(density) {
                *e = true;
            }
        }
    }
    if reversible {
        let fwd = has.clone();
        for (i, row) in fwd.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                if e {
                    has[j][i] = true;
                }
            }
        }
    }
    let mut out = Vec::new();
    for (i, row) in has.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            if e {
                out.push((i, j));
            }
        }
    }
    out
}

/// Random ergodic continuous-time chain with rates in [0.1, 2].
pub fn random_chain(r: &mut impl Rng, n: usize, density: f64, reversible: bool) -> MarkovProcess {
    let edges: Vec<(usize, usize, f64)> = random_pattern(r, n, density, reversible)
        .into_iter()
        .map(|(i, j)| (i, j, r.gen_range(0.1..2.0)))
        .collect();
    MarkovProcess::continuous(n, edges).expect("valid chain")
}

/// Random chain obeying detailed balance: `w[i][j] = s[i][j] π_j` with
/// symmetric `s`.
pub fn random_db_chain(r: &mut impl Rng, n: usize, density: f64) -> (MarkovProcess, Vec<f64>) {
    let pi: Vec<f64> = (0..n).map(|_| r.gen_range(0.2..3.0)).collect();
    let total: f64 = pi.iter().sum();
    let pattern = random_pattern(r, n, density, true);
    let mut s = vec![vec![0.0; n]; n];
    for &(i, j) in &pattern {
        if i < j {
            let v = r.gen_range(0.1..2.0);
            s[i][j] = v;
            s[j][i] = v;
        }
    }
    let edges: Vec<(usize, usize, f64)> = pattern
        .iter()
        .map(|&(i, j)| (i, j, s[i][j] * pi[j]))
        .collect();
    let p = MarkovProcess::continuous(n, edges).expect("valid chain");
    (p, pi.iter().map(|v| v / total).collect())
}

/// Random ergodic discrete-time chain; every state keeps a loop probability.
pub fn random_discrete_chain(r: &mut impl Rng, n: usize, density: f64) -> MarkovProcess {
    let pattern = random_pattern(r, n, density, false);
    let mut w = vec![vec![0.0; n]; n];
    for &(i, j) in &pattern {
        w[i][j] = r.gen_range(0.1..1.0);
    }
    for (i, row) in w.iter_mut().enumerate() {
        row[i] = r.gen_range(0.05..1.0);
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
    }
    let mut edges = Vec::new();
    let mut loops = Vec::new();
    for (i, row) in w.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if i == j {
                loops.push((i, v));
            } else if v > 0.0 {
                edges.push((i, j, v));
            }
        }
    }
    let p = MarkovProcess::discrete(n, edges, loops).expect("valid chain");
    assert_eq!(p.time_kind(), TimeKind::Discrete);
    p
}

/// All simple cycles by filtering every vertex arrangement: for each length
/// and each ordered selection of distinct vertices starting at its minimum,
/// keep those whose consecutive pairs (closing pair included) are edges.
pub fn brute_force_cycles(g: &Digraph) -> Vec<Cycle> {
    let n = g.n_vertices();
    let mut out = Vec::new();
    let mut seq = Vec::new();
    let mut used = vec![false; n];
    fn arrange(
        g: &Digraph,
        len: usize,
        seq: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Cycle>,
    ) {
        if seq.len() == len {
            let closes = (0..len).all(|k| g.has_edge(seq[k], seq[(k + 1) % len]));
            if closes {
                out.push(Cycle::new(seq).expect("simple"));
            }
            return;
        }
        for v in seq[0] + 1..used.len() {
            if !used[v] {
                used[v] = true;
                seq.push(v);
                arrange(g, len, seq, used, out);
                seq.pop();
                used[v] = false;
            }
        }
    }
    for len in 2..=n {
        for start in 0..n {
            seq.clear();
            seq.push(start);
            used[start] = true;
            arrange(g, len, &mut seq, &mut used, &mut out);
            used[start] = false;
        }
    }
    out.sort_by(|a, b| (a.len(), a.vertices()).cmp(&(b.len(), b.vertices())));
    out
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
