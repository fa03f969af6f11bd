//! Cycle averages, flux averages and thermodynamic edge quantities.

use nalgebra::DMatrix;

use crate::cycles::Cycle;
use crate::decomposition::CycleDecomposition;
use crate::error::{NessError, Result};
use crate::markov::{FluxField, MarkovProcess, ProbabilityDistribution};

/// A real matrix `F[i][j]` over ordered state pairs (diagonal unused).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeObservable {
    values: DMatrix<f64>,
    antisymmetric: bool,
}

impl EdgeObservable {
    pub fn new(mut values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(NessError::Dimension {
                expected: values.nrows(),
                got: values.ncols(),
            });
        }
        values.fill_diagonal(0.0);
        Ok(Self {
            values,
            antisymmetric: false,
        })
    }

    /// An antisymmetric observable; `F[i][j] = −F[j][i]` must hold exactly.
    pub fn antisymmetric(values: DMatrix<f64>) -> Result<Self> {
        let mut f = Self::new(values)?;
        let n = f.values.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                if f.values[(i, j)] != -f.values[(j, i)] {
                    return Err(NessError::InvalidArgument(format!(
                        "observable not antisymmetric on {}↔{}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        f.antisymmetric = true;
        Ok(f)
    }

    /// Indicator of a single directed edge.
    pub fn edge_indicator(n: usize, from: usize, to: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(from, to)] = 1.0;
        Self {
            values: m,
            antisymmetric: false,
        }
    }

    /// `F ≡ 1` off the diagonal.
    pub fn ones(n: usize) -> Self {
        let mut m = DMatrix::from_element(n, n, 1.0);
        m.fill_diagonal(0.0);
        Self {
            values: m,
            antisymmetric: false,
        }
    }

    pub fn n_states(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.antisymmetric
    }
}

/// `⟨F⟩_C = Σ_α m_α F_α` over the nonzero-weight cycles.
pub fn cycle_average<F>(d: &CycleDecomposition, mut value: F) -> Result<f64>
where
    F: FnMut(&Cycle) -> Option<f64>,
{
    let mut acc = 0.0;
    for e in d.support() {
        let v = value(&e.cycle).ok_or_else(|| NessError::MissingCycleValue(e.cycle.to_string()))?;
        acc += e.weight * v;
    }
    Ok(acc)
}

/// `F_α = Σ_{(i,j) ∈ α} F[i][j]`, the integral of `F` along the cycle.
pub fn cycle_observable(f: &EdgeObservable, c: &Cycle) -> f64 {
    c.edges().map(|(a, b)| f.get(a, b)).sum()
}

/// `Σ_{i,j} F[i][j] φ[i][j]` for a given field.
pub fn flux_average_of(fluxes: &FluxField, f: &EdgeObservable) -> f64 {
    let n = fluxes.n_states();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += f.get(i, j) * fluxes.get(i, j);
            }
        }
    }
    acc
}

/// Steady-state flux average `J*_F`.
pub fn flux_average(p: &MarkovProcess, f: &EdgeObservable) -> Result<f64> {
    if f.n_states() != p.n_states() {
        return Err(NessError::Dimension {
            expected: p.n_states(),
            got: f.n_states(),
        });
    }
    Ok(flux_average_of(&p.steady_fluxes()?, f))
}

/// `½ Σ F[i][j] I[i][j]`; equals [`flux_average_of`] for antisymmetric `F`.
pub fn current_average_of(fluxes: &FluxField, f: &EdgeObservable) -> f64 {
    let n = fluxes.n_states();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += f.get(i, j) * fluxes.current(i, j);
            }
        }
    }
    0.5 * acc
}

/// Per-edge thermodynamic and electric quantities. `None` marks a quantity
/// that is undefined on that edge (a missing reverse transition, or zero
/// current for the resistance).
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoEdgeQuantities {
    /// `V_i = −ln p_i`.
    pub potential: Vec<f64>,
    /// `I[i][j] = φ[i][j] − φ[j][i]`.
    pub current: DMatrix<f64>,
    /// `A[i][j] = ln(φ[i][j] / φ[j][i])`.
    pub affinity: DMatrix<Option<f64>>,
    /// `U[i][j] = ln(p_i / p_j)`.
    pub voltage: DMatrix<Option<f64>>,
    /// `E[i][j] = ln(w[i][j] / w[j][i])`.
    pub electromotance: DMatrix<Option<f64>>,
    /// `R[i][j] = A[i][j] / I[i][j]`.
    pub resistance: DMatrix<Option<f64>>,
}

impl ThermoEdgeQuantities {
    pub fn n_states(&self) -> usize {
        self.potential.len()
    }

    /// Ordered pairs connected in at least one direction.
    pub fn edges(&self, p: &MarkovProcess) -> Vec<(usize, usize)> {
        let n = self.n_states();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && (p.rate(i, j) > 0.0 || p.rate(j, i) > 0.0) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// CSV with columns `edge,I,A,U,E,R`; undefined values print as `NA`.
    pub fn to_csv(&self, p: &MarkovProcess) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), crate::report::num);
        let mut s = String::from("edge,I,A,U,E,R\n");
        for (i, j) in self.edges(p) {
            s.push_str(&format!(
                "{}->{},{},{},{},{},{}\n",
                i + 1,
                j + 1,
                crate::report::num(self.current[(i, j)]),
                fmt(self.affinity[(i, j)]),
                fmt(self.voltage[(i, j)]),
                fmt(self.electromotance[(i, j)]),
                fmt(self.resistance[(i, j)]),
            ));
        }
        s
    }
}

/// Currents below this fraction of the largest flux count as zero when
/// deciding whether a resistance is defined.
const ZERO_CURRENT_RELATIVE: f64 = 1e-13;

/// Table of thermodynamic edge quantities at the steady state.
pub fn thermo_quantities(p: &MarkovProcess) -> Result<ThermoEdgeQuantities> {
    let dist = p.stationary_distribution()?;
    let fluxes = p.fluxes_for(&dist)?;
    let n = p.n_states();
    let pr = dist.as_slice();
    let zero_current = ZERO_CURRENT_RELATIVE * fluxes.max_flux();

    let mut current = DMatrix::zeros(n, n);
    let mut affinity = DMatrix::from_element(n, n, None);
    let mut voltage = DMatrix::from_element(n, n, None);
    let mut electromotance = DMatrix::from_element(n, n, None);
    let mut resistance = DMatrix::from_element(n, n, None);

    // each pair is evaluated once and mirrored, so (anti)symmetry is exact
    for i in 0..n {
        for j in i + 1..n {
            if p.rate(i, j) <= 0.0 && p.rate(j, i) <= 0.0 {
                continue;
            }
            let cur = fluxes.current(i, j);
            current[(i, j)] = cur;
            current[(j, i)] = -cur;
            if pr[i] > 0.0 && pr[j] > 0.0 {
                let u = (pr[i] / pr[j]).ln();
                voltage[(i, j)] = Some(u);
                voltage[(j, i)] = Some(-u);
            }
            let (wf, wb) = (p.rate(i, j), p.rate(j, i));
            if wf > 0.0 && wb > 0.0 {
                let a = (fluxes.get(i, j) / fluxes.get(j, i)).ln();
                let e = (wf / wb).ln();
                affinity[(i, j)] = Some(a);
                affinity[(j, i)] = Some(-a);
                electromotance[(i, j)] = Some(e);
                electromotance[(j, i)] = Some(-e);
                if cur.abs() > zero_current {
                    resistance[(i, j)] = Some(a / cur);
                    resistance[(j, i)] = Some(a / cur);
                }
            }
        }
    }
    Ok(ThermoEdgeQuantities {
        potential: pr.iter().map(|v| -v.ln()).collect(),
        current,
        affinity,
        voltage,
        electromotance,
        resistance,
    })
}

/// Distribution at which entropy production is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum EvaluationPoint {
    Steady,
    At(ProbabilityDistribution),
}

/// Total, system and medium entropy production rates (nats per unit time).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EntropyProduction {
    pub total: f64,
    pub system: f64,
    pub medium: f64,
}

/// `P_tot = ½ Σ A I`, `P_sys = ½ Σ U I` and `P_med = ½ Σ I ln(w[i][j]/w[j][i])`.
///
/// Pairs carrying no current contribute nothing. A pair with current but a
/// missing reverse transition (or an unoccupied endpoint) makes the
/// production diverge.
pub fn entropy_production(p: &MarkovProcess, at: &EvaluationPoint) -> Result<EntropyProduction> {
    let dist = match at {
        EvaluationPoint::Steady => p.stationary_distribution()?,
        EvaluationPoint::At(d) => d.clone(),
    };
    let fluxes = p.fluxes_for(&dist)?;
    let pr = dist.as_slice();
    let n = p.n_states();
    let (mut total, mut system, mut medium) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let cur = fluxes.current(i, j);
            if cur == 0.0 {
                continue;
            }
            let (wf, wb) = (p.rate(i, j), p.rate(j, i));
            if wf <= 0.0 || wb <= 0.0 {
                let (from, to) = if wf > 0.0 { (i, j) } else { (j, i) };
                return Err(NessError::DivergentEntropy { from, to });
            }
            if pr[i] <= 0.0 || pr[j] <= 0.0 {
                let (from, to) = if pr[i] > 0.0 { (i, j) } else { (j, i) };
                return Err(NessError::DivergentEntropy { from, to });
            }
            let u = (pr[i] / pr[j]).ln();
            let e = (wf / wb).ln();
            let a = (fluxes.get(i, j) / fluxes.get(j, i)).ln();
            total += a * cur;
            system += u * cur;
            medium += e * cur;
        }
    }
    Ok(EntropyProduction {
        total: 0.5 * total,
        system: 0.5 * system,
        medium: 0.5 * medium,
    })
}

/// Steady-state entropy production as a cycle average of cycle affinities,
/// `Σ_α m_α A_α`.
pub fn entropy_production_cycles(d: &CycleDecomposition, p: &MarkovProcess) -> Result<f64> {
    let fluxes = p.steady_fluxes()?;
    let mut total = 0.0;
    for e in d.support() {
        let mut a_cycle = 0.0;
        for (i, j) in e.cycle.edges() {
            let (wf, wb) = (p.rate(i, j), p.rate(j, i));
            if wf <= 0.0 || wb <= 0.0 {
                let (from, to) = if wf > 0.0 { (i, j) } else { (j, i) };
                return Err(NessError::DivergentEntropy { from, to });
            }
            a_cycle += (fluxes.get(i, j) / fluxes.get(j, i)).ln();
        }
        total += e.weight * a_cycle;
    }
    Ok(total)
}
