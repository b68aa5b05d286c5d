//! Scans of b_{n*} against flux.

use rayon::prelude::*;
use serde::Serialize;

use super::arnoldi::arnoldi;
use crate::coins::CoinAssignment;
use crate::error::{Error, Result};
use crate::lattice::{FiniteLattice, GaugeField, Graph};
use crate::walk::{StateVector, WalkOperator};

/// Below this relative b the recursion is treated as closed during scans.
const CLOSE_TOL: f64 = 1e-13;

/// The coefficient whose vanishing marks a cage: 8 on the diamond chain,
/// 12 on T3.
pub fn default_n_star(graph: Graph) -> usize {
    match graph {
        Graph::DiamondChain => 8,
        Graph::Dice => 12,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxMinimum {
    pub f: f64,
    pub b: f64,
    /// Grid index of the bracketing minimum.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxScan {
    pub n_star: usize,
    /// (f, relative b_{n*}) on the grid.
    pub curve: Vec<(f64, f64)>,
    pub minima: Vec<FluxMinimum>,
}

impl FluxScan {
    pub fn global_minimum(&self) -> Option<FluxMinimum> {
        self.minima.iter().copied().min_by(|a, b| a.b.total_cmp(&b.b))
    }
}

/// Relative b_{n*} at one flux, in the natural gauge of the graph.
pub fn b_at_flux(
    lattice: &FiniteLattice,
    coins: &CoinAssignment,
    psi0: &StateVector,
    f: f64,
    n_star: usize,
) -> Result<f64> {
    let gauge = GaugeField::natural(lattice.graph(), f);
    let w = WalkOperator::new(lattice.clone(), gauge, coins)?;
    let r = arnoldi(&w, psi0, n_star, CLOSE_TOL)?;
    Ok(r.relative_b(n_star))
}

const EXACT_ZERO: f64 = 1e-12;

fn refine(grid: &[f64], vals: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 == grid.len() {
        return (grid[i], vals[i]);
    }
    let (y0, y1, y2) = (vals[i - 1], vals[i], vals[i + 1]);
    // An exact closure on the grid: b is |f - f_c|-like there, not parabolic.
    if y1 <= EXACT_ZERO {
        return (grid[i], y1);
    }
    let denom = y0 - 2.0 * y1 + y2;
    if denom <= 0.0 {
        return (grid[i], y1);
    }
    let t = (0.5 * (y0 - y2) / denom).clamp(-0.5, 0.5);
    let h = if t >= 0.0 { grid[i + 1] - grid[i] } else { grid[i] - grid[i - 1] };
    let y = (y1 - 0.25 * (y0 - y2) * t).max(0.0);
    (grid[i] + t * h, y)
}

/// b_{n*}(f) over `grid`, with local minima refined by a parabola through
/// the neighbouring points.
pub fn critical_flux_scan(
    lattice: &FiniteLattice,
    coins: &CoinAssignment,
    psi0: &StateVector,
    grid: &[f64],
    n_star: usize,
) -> Result<FluxScan> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty flux grid".into()));
    }
    if n_star == 0 {
        return Err(Error::InvalidArgument("n_star must be >= 1".into()));
    }
    let vals: Vec<f64> = grid
        .par_iter()
        .map(|&f| b_at_flux(lattice, coins, psi0, f, n_star))
        .collect::<Result<_>>()?;
    let n = vals.len();
    let mut minima = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || vals[i] < vals[i - 1];
        let right_ok = i + 1 == n || vals[i] <= vals[i + 1];
        if left_ok && right_ok && n > 1 {
            let (f, b) = refine(grid, &vals, i);
            minima.push(FluxMinimum { f, b, index: i });
        }
    }
    if n == 1 {
        minima.push(FluxMinimum {
            f: grid[0],
            b: vals[0],
            index: 0,
        });
    }
    Ok(FluxScan {
        n_star,
        curve: grid.iter().copied().zip(vals).collect(),
        minima,
    })
}
