//! Two particles on a four-site periodic lattice, hopping to the right.
//!
//! All hops have rate 1 except those across the boundary (site 4 → site 1),
//! which have rate `x`. The six configurations are numbered
//!
//! | state | sites |   | state | sites |
//! |-------|-------|---|-------|-------|
//! | 1     | ●○●○  |   | 2     | ○●●○  |
//! | 3     | ●○○●  |   | 4     | ●●○○  |
//! | 5     | ○○●●  |   | 6     | ○●○●  |
//!
//! and the state graph has exactly four simple cycles, the gaits α–δ.

use std::fmt;

use rayon::prelude::*;

use crate::cycles::{Cycle, CycleCatalog};
use crate::decomposition::{decompose, CycleDecomposition};
use crate::error::{NessError, Result};
use crate::markov::{FluxField, MarkovProcess, ProbabilityDistribution};

pub const SITES: usize = 4;
pub const N_STATES: usize = 6;

/// Occupied sites per state (0-based states and sites).
pub const CONFIGURATIONS: [[bool; SITES]; N_STATES] = [
    [true, false, true, false],
    [false, true, true, false],
    [true, false, false, true],
    [true, true, false, false],
    [false, false, true, true],
    [false, true, false, true],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TasepConfig {
    x: f64,
}

impl TasepConfig {
    pub fn new(x: f64) -> Result<Self> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(NessError::InvalidArgument(format!(
                "boundary rate x must be positive, got {x}"
            )));
        }
        Ok(Self { x })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// `C(x) = 2 + 5x + 5x²`.
    pub fn normalization(&self) -> f64 {
        2.0 + 5.0 * self.x + 5.0 * self.x * self.x
    }

    /// Common flux factor `x / C(x)`.
    pub fn flux_scale(&self) -> f64 {
        self.x / self.normalization()
    }
}

fn state_of(occupied: [bool; SITES]) -> Option<usize> {
    CONFIGURATIONS.iter().position(|c| *c == occupied)
}

/// Site hopped from in the transition `from → to`, if it is a legal hop.
fn hop_site(from: usize, to: usize) -> Option<usize> {
    let (a, b) = (CONFIGURATIONS[from], CONFIGURATIONS[to]);
    (0..SITES).find(|&s| {
        let t = (s + 1) % SITES;
        a[s] && !a[t] && {
            let mut c = a;
            c[s] = false;
            c[t] = true;
            c == b
        }
    })
}

/// State network generated from the lattice hopping rules.
pub fn build_tasep(c: TasepConfig) -> MarkovProcess {
    let mut edges = Vec::new();
    for (from, conf) in CONFIGURATIONS.iter().enumerate() {
        for s in 0..SITES {
            let t = (s + 1) % SITES;
            if conf[s] && !conf[t] {
                let mut next = *conf;
                next[s] = false;
                next[t] = true;
                let to = state_of(next).expect("hops conserve the particle number");
                let rate = if s == SITES - 1 { c.x } else { 1.0 };
                edges.push((from, to, rate));
            }
        }
    }
    MarkovProcess::continuous(N_STATES, edges).expect("lattice edges are valid")
}

/// Closed-form steady state and fluxes.
pub fn tasep_analytic(c: TasepConfig) -> (ProbabilityDistribution, FluxField) {
    let x = c.x;
    let norm = c.normalization();
    let a = x * (1.0 + x);
    let p: Vec<f64> = [a, a, a, 2.0 * x * x, 2.0, 2.0 * x]
        .iter()
        .map(|v| v / norm)
        .collect();
    let s = c.flux_scale();
    let interior = s * (1.0 + x);
    let fast = s * 2.0 * x;
    let slow = s * 2.0;
    let edges = [
        (0, 1, interior),
        (1, 5, interior),
        (0, 2, interior),
        (2, 5, interior),
        (5, 3, fast),
        (3, 0, fast),
        (5, 4, slow),
        (4, 0, slow),
    ];
    let f = FluxField::from_edges(N_STATES, edges).expect("fixed edge list");
    (
        ProbabilityDistribution::new(p).expect("closed form is normalized"),
        f,
    )
}

/// The four gaits of the two particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gait {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

impl Gait {
    pub const ALL: [Gait; 4] = [Gait::Alpha, Gait::Beta, Gait::Gamma, Gait::Delta];

    /// 1-based vertex sequence.
    pub fn sequence(self) -> [usize; 4] {
        match self {
            Gait::Alpha => [1, 3, 6, 4],
            Gait::Beta => [1, 2, 6, 5],
            Gait::Gamma => [1, 3, 6, 5],
            Gait::Delta => [1, 2, 6, 4],
        }
    }

    pub fn cycle(self) -> Cycle {
        Cycle::from_one_based(&self.sequence()).expect("gait sequences are simple")
    }

    pub fn from_cycle(c: &Cycle) -> Option<Gait> {
        Gait::ALL.into_iter().find(|g| &g.cycle() == c)
    }

    pub fn name(self) -> &'static str {
        match self {
            Gait::Alpha => "alpha",
            Gait::Beta => "beta",
            Gait::Gamma => "gamma",
            Gait::Delta => "delta",
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Gait::Alpha => 'α',
            Gait::Beta => 'β',
            Gait::Gamma => 'γ',
            Gait::Delta => 'δ',
        }
    }

    /// Step size (1 or 2) and whether the front (`f`) or back (`b`)
    /// particle moves first.
    pub fn label(self) -> &'static str {
        match self {
            Gait::Alpha => "1f",
            Gait::Beta => "1b",
            Gait::Gamma => "2f",
            Gait::Delta => "2b",
        }
    }

    pub fn parse(s: &str) -> Option<Gait> {
        Gait::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s) || s.chars().eq(std::iter::once(g.symbol())))
    }
}

impl fmt::Display for Gait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Where the two (distinguishable) particles end up after traversing a
/// closed path of states once. Particles are ranked by site at the start;
/// `result[k]` is the rank particle `k` holds at the end.
pub fn particle_permutation(cycle: &Cycle) -> Result<[usize; 2]> {
    let states = cycle.vertices();
    let start = CONFIGURATIONS[states[0]];
    let mut pos: Vec<usize> = (0..SITES).filter(|&s| start[s]).collect();
    for (from, to) in cycle.edges() {
        let s = hop_site(from, to).ok_or_else(|| {
            NessError::InvalidArgument(format!("{}→{} is not a single hop", from + 1, to + 1))
        })?;
        let k = pos
            .iter()
            .position(|&p| p == s)
            .expect("hop starts at a particle");
        pos[k] = (s + 1) % SITES;
    }
    Ok(if pos[0] < pos[1] { [0, 1] } else { [1, 0] })
}

/// Composition of two rank permutations (apply `first`, then `second`).
pub fn compose_permutations(first: [usize; 2], second: [usize; 2]) -> [usize; 2] {
    [second[first[0]], second[first[1]]]
}

/// One point of a sweep over the boundary rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    /// Weights of α, β, γ, δ.
    pub raw: [f64; 4],
    /// Weights divided by `x / C(x)`.
    pub scaled: [f64; 4],
    pub support: Vec<Gait>,
}

impl SweepRow {
    pub fn support_tag(&self) -> String {
        self.support
            .iter()
            .map(|g| g.name())
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn scaled_weight(&self, g: Gait) -> f64 {
        self.scaled[g as usize]
    }
}

/// Catalog of the four gaits in default (length, sequence) order.
pub fn tasep_catalog(c: TasepConfig) -> Result<CycleCatalog> {
    CycleCatalog::enumerate(&build_tasep(c).graph())
}

/// Decomposes the steady state with `pinned` processed first and the other
/// gaits in catalog order.
pub fn pinned_decomposition(c: TasepConfig, pinned: Gait) -> Result<CycleDecomposition> {
    let p = build_tasep(c);
    let catalog = CycleCatalog::enumerate(&p.graph())?;
    let ordering = catalog.ordering_with_prefix(&[pinned.cycle()])?;
    decompose(&p.steady_fluxes()?, &catalog, &ordering)
}

fn sweep_row(x: f64, pinned: Gait) -> Result<SweepRow> {
    let c = TasepConfig::new(x)?;
    let d = pinned_decomposition(c, pinned)?;
    let raw = Gait::ALL.map(|g| d.weight_of(&g.cycle()));
    let s = c.flux_scale();
    let scaled = raw.map(|w| w / s);
    let support = Gait::ALL
        .into_iter()
        .filter(|g| raw[*g as usize] > 0.0)
        .collect();
    Ok(SweepRow {
        x,
        raw,
        scaled,
        support,
    })
}

/// Pinned decompositions for each `x` (positive, ascending), evaluated in
/// parallel and returned in input order.
pub fn tasep_sweep(xs: &[f64], pinned: Gait) -> Result<Vec<SweepRow>> {
    if xs.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(NessError::InvalidArgument(
            "x values must be positive".into(),
        ));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(NessError::InvalidArgument(
            "x values must be ascending".into(),
        ));
    }
    xs.par_iter().map(|&x| sweep_row(x, pinned)).collect()
}

/// `points` log-spaced values covering `[x_min, x_max]`.
pub fn log_spaced(x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(x_min > 0.0 && x_max > x_min) || points < 2 {
        return Err(NessError::InvalidArgument(
            "need 0 < x_min < x_max and at least two points".into(),
        ));
    }
    let (a, b) = (x_min.ln(), x_max.ln());
    Ok((0..points)
        .map(|k| {
            if k + 1 == points {
                x_max
            } else {
                (a + (b - a) * k as f64 / (points - 1) as f64).exp()
            }
        })
        .collect())
}

/// One-sided slopes of the pinned cycle's scaled weight around a point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Kink {
    pub at: f64,
    pub value: f64,
    pub left_slope: f64,
    pub right_slope: f64,
}

impl Kink {
    /// Jump in the derivative, `|left − right|`.
    pub fn discontinuity(&self) -> f64 {
        (self.left_slope - self.right_slope).abs()
    }
}

/// Finite-difference slopes of the pinned scaled weight at `at ± step`.
pub fn detect_kink(pinned: Gait, at: f64, step: f64) -> Result<Kink> {
    if !(step > 0.0 && at - step > 0.0) {
        return Err(NessError::InvalidArgument("need 0 < step < at".into()));
    }
    let rows = tasep_sweep(&[at - step, at, at + step], pinned)?;
    let w: Vec<f64> = rows.iter().map(|r| r.scaled_weight(pinned)).collect();
    Ok(Kink {
        at,
        value: w[1],
        left_slope: (w[1] - w[0]) / step,
        right_slope: (w[2] - w[1]) / step,
    })
}

/// Sweep CSV: `x`, scaled and raw weights of α–δ, support tag.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(
        "x,m_alpha,m_beta,m_gamma,m_delta,raw_alpha,raw_beta,raw_gamma,raw_delta,support_tag\n",
    );
    for r in rows {
        let cols: Vec<String> = std::iter::once(r.x)
            .chain(r.scaled)
            .chain(r.raw)
            .map(crate::report::num)
            .collect();
        s.push_str(&cols.join(","));
        s.push(',');
        s.push_str(&r.support_tag());
        s.push('\n');
    }
    s
}
