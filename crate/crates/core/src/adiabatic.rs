//! Instantaneous spectra of the linear sweep
//! `H(s) = (1 - s) H0 + s H_problem`, `H0 = sum_i (I - sigma^x_i) / 2`.
//!
//! Basis index `b` encodes `q_i` in bit `i - 1`; `q_i = 0` corresponds to
//! `sigma^z_i = +1`. The problem Hamiltonian is diagonal in this basis.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{symmetric_eigen, SymmetricEigen};
use crate::error::{Error, Result};
use crate::pbf::PseudoBooleanFunction as Pbf;

/// Dense matrices are `4^n` doubles; 16 qubits is already 32 GiB.
pub const MAX_QUBITS: usize = 16;

/// Absolute tolerance for grouping eigenvalues as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

pub const DEFAULT_POINTS: usize = 101;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinHamiltonian {
    pub n_qubits: usize,
    /// Energy function value at every computational-basis state.
    pub problem_diagonal: Vec<f64>,
}

impl SpinHamiltonian {
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Row-major dense `H(s)`.
    pub fn interpolate(&self, s: f64) -> Result<Vec<f64>> {
        check_s(s)?;
        let dim = self.dim();
        let n = self.n_qubits;
        let mut m = vec![0.0; dim * dim];
        let off = -(1.0 - s) / 2.0;
        for b in 0..dim {
            m[b * dim + b] = (1.0 - s) * n as f64 / 2.0 + s * self.problem_diagonal[b];
            if off != 0.0 {
                for i in 0..n {
                    m[b * dim + (b ^ 1 << i)] = off;
                }
            }
        }
        Ok(m)
    }

    /// `<u| (H_problem - H0) |v>`, the sweep derivative's matrix element.
    pub fn derivative_element(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.n_qubits;
        let half_n = n as f64 / 2.0;
        (0..self.dim())
            .map(|b| {
                let flips: f64 = (0..n).map(|i| v[b ^ 1 << i]).sum();
                let h0v = half_n * v[b] - 0.5 * flips;
                u[b] * (self.problem_diagonal[b] * v[b] - h0v)
            })
            .sum()
    }

    fn diagonalize(&self, s: f64) -> Result<SymmetricEigen> {
        let m = self.interpolate(s)?;
        symmetric_eigen(&m, self.dim()).ok_or(Error::NoConvergence { s })
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!(
            "sweep parameter {s} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Tabulates `f` over all `2^n` basis states.
pub fn to_spin_hamiltonian(f: &Pbf, n_qubits: usize) -> Result<SpinHamiltonian> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::TooManyVariables {
            count: n_qubits,
            limit: MAX_QUBITS,
        });
    }
    if f.max_var() as usize > n_qubits {
        return Err(Error::InvalidArgument(format!(
            "function mentions q{} but only {n_qubits} qubits were requested",
            f.max_var()
        )));
    }
    let c = f.compile()?;
    let problem_diagonal = (0..1u64 << n_qubits).map(|b| c.eval(b) as f64).collect();
    Ok(SpinHamiltonian {
        n_qubits,
        problem_diagonal,
    })
}

/// Uniform grid of `points` values on `[0, 1]`.
pub fn s_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 grid points, got {points}"
        )));
    }
    Ok((0..points)
        .map(|k| k as f64 / (points - 1) as f64)
        .collect())
}

/// Everything extracted from one diagonalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub s: f64,
    /// Lowest requested levels, ascending.
    pub eigenvalues: Vec<f64>,
    /// Distance from `E0` to the first level above `E0 + DEGENERACY_TOL`.
    pub gap: f64,
    /// Ground level multiplicity.
    pub ground_degeneracy: usize,
    /// `|<1|dH/ds|0>|`, `None` when the ground level is degenerate. When the
    /// first excited level is degenerate this is the norm of the coupling
    /// into the whole level.
    pub epsilon: Option<f64>,
    /// Ground-state basis probabilities (averaged over the ground manifold
    /// when degenerate).
    pub ground_probabilities: Vec<f64>,
}

impl SpectrumPoint {
    pub fn degenerate(&self) -> bool {
        self.ground_degeneracy > 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    pub n_qubits: usize,
    pub levels: usize,
    pub points: Vec<SpectrumPoint>,
    /// Minimum gap over the whole grid.
    pub g_min: f64,
    pub g_min_s: f64,
    /// Minimum gap over interior points `0 < s < 1`.
    pub g_min_interior: Option<f64>,
    /// Largest `|<1|dH/ds|0>|` over non-degenerate points.
    pub epsilon: Option<f64>,
    /// Grid values where the ground level was degenerate.
    pub degenerate_s: Vec<f64>,
}

impl SpectrumTrace {
    pub fn s_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.s).collect()
    }

    pub fn snapshots(&self) -> Vec<(f64, &[f64])> {
        self.points
            .iter()
            .map(|p| (p.s, p.ground_probabilities.as_slice()))
            .collect()
    }
}

fn analyze(h: &SpinHamiltonian, s: f64, levels: usize) -> Result<SpectrumPoint> {
    let eig = h.diagonalize(s)?;
    let e0 = eig.values[0];
    let ground_degeneracy = eig
        .values
        .iter()
        .take_while(|&&e| e <= e0 + DEGENERACY_TOL)
        .count();
    let gap = eig.values.get(ground_degeneracy).map_or(0.0, |&e| e - e0);
    // A degenerate first excited level makes any single matrix element
    // basis-dependent; use the norm of the coupling into the whole level.
    let epsilon = (ground_degeneracy == 1 && eig.n > 1).then(|| {
        let e1 = eig.values[1];
        eig.values[1..]
            .iter()
            .take_while(|&&e| e <= e1 + DEGENERACY_TOL)
            .enumerate()
            .map(|(k, _)| {
                h.derivative_element(eig.vector(k + 1), eig.vector(0))
                    .powi(2)
            })
            .sum::<f64>()
            .sqrt()
    });
    let mut ground_probabilities = vec![0.0; eig.n];
    for k in 0..ground_degeneracy {
        for (p, c) in ground_probabilities.iter_mut().zip(eig.vector(k)) {
            *p += c * c / ground_degeneracy as f64;
        }
    }
    Ok(SpectrumPoint {
        s,
        eigenvalues: eig.values[..levels].to_vec(),
        gap,
        ground_degeneracy,
        epsilon,
        ground_probabilities,
    })
}

/// Diagonalizes `H(s)` on a uniform grid of `s_points` values.
pub fn spectrum_trace(
    h: &SpinHamiltonian,
    s_points: usize,
    levels: usize,
) -> Result<SpectrumTrace> {
    if levels == 0 || levels > h.dim() {
        return Err(Error::OutOfRange {
            what: "levels",
            value: levels as i64,
            lo: 1,
            hi: h.dim() as i64,
        });
    }
    let grid = s_grid(s_points)?;
    let points = grid
        .par_iter()
        .map(|&s| analyze(h, s, levels))
        .collect::<Result<Vec<_>>>()?;

    let (g_min_s, g_min) = points
        .iter()
        .map(|p| (p.s, p.gap))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least two points");
    let g_min_interior = points
        .iter()
        .filter(|p| p.s > 0.0 && p.s < 1.0)
        .map(|p| p.gap)
        .min_by(f64::total_cmp);
    let epsilon = points
        .iter()
        .filter_map(|p| p.epsilon)
        .max_by(f64::total_cmp);
    let degenerate_s = points
        .iter()
        .filter(|p| p.degenerate())
        .map(|p| p.s)
        .collect();
    Ok(SpectrumTrace {
        n_qubits: h.n_qubits,
        levels,
        points,
        g_min,
        g_min_s,
        g_min_interior,
        epsilon,
        degenerate_s,
    })
}

/// Ground-state probability vector `|c_b|^2` at each grid point.
pub fn ground_snapshots(h: &SpinHamiltonian, s_points: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let grid = s_grid(s_points)?;
    grid.par_iter()
        .map(|&s| analyze(h, s, 1).map(|p| (s, p.ground_probabilities)))
        .collect()
}

/// Eigenvalues of `H(s)` at a single point, ascending.
pub fn eigenvalues_at(h: &SpinHamiltonian, s: f64) -> Result<Vec<f64>> {
    Ok(h.diagonalize(s)?.values)
}
