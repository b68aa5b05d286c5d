//! Bloch blocks W(k) of translation-invariant walks.

use num_complex::Complex64;
use serde::Serialize;

use crate::coins::CoinAssignment;
use crate::error::{Error, Result};
use crate::lattice::{add, gcd, Cell, GaugeField, Graph, Site, SiteKind};
use crate::linalg::CMatrix;

/// Dense walk operator restricted to one Bloch momentum.
#[derive(Debug, Clone, Serialize)]
pub struct BlochBlock {
    pub graph: Graph,
    /// One component for the diamond chain, two for T3 (along the two
    /// periods of the magnetic cell).
    pub k: Vec<f64>,
    pub f: f64,
    pub matrix: CMatrix,
    /// Magnetic-cell size along the two lattice directions.
    pub cells: [usize; 2],
}

impl BlochBlock {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn indices(&self, hub: bool) -> Vec<usize> {
        let per = self.graph.states_per_cell();
        (0..self.dim())
            .filter(|&i| self.graph.local_state(i % per).0.is_hub() == hub)
            .collect()
    }

    pub fn hub_indices(&self) -> Vec<usize> {
        self.indices(true)
    }

    pub fn rim_indices(&self) -> Vec<usize> {
        self.indices(false)
    }
}

/// Builds W(k) on a magnetic cell of `p1 × p2` unit cells, using the
/// convention ψ(cell + T) = e^{ik·t} ψ(cell) where `t` counts magnetic
/// periods. The gauge must be invariant under the periods (p1, 0), (0, p2).
pub fn bloch_block(
    gauge: &GaugeField,
    coins: &CoinAssignment,
    cells: [usize; 2],
    k: &[f64],
) -> Result<BlochBlock> {
    let graph = gauge.graph();
    coins.validate(graph)?;
    if !coins.hub_overrides.is_empty() {
        return Err(Error::InvalidArgument(
            "Bloch blocks need translation-invariant coins".into(),
        ));
    }
    if k.len() != graph.dimension() {
        return Err(Error::DimensionMismatch {
            expected: graph.dimension(),
            found: k.len(),
        });
    }
    let per = graph.states_per_cell();
    let [p1, p2] = cells;
    let n = p1 * p2 * per;
    let local = |c: Cell| -> (usize, [i64; 2]) {
        let t = [c[0].div_euclid(p1 as i64), c[1].div_euclid(p2 as i64)];
        let r = [c[0].rem_euclid(p1 as i64) as usize, c[1].rem_euclid(p2 as i64) as usize];
        (r[0] * p2 + r[1], t)
    };
    let kdot = |t: [i64; 2]| -> f64 { k.iter().zip(t).map(|(ki, ti)| ki * ti as f64).sum() };

    let mut s = CMatrix::zeros(n, n);
    let mut c = CMatrix::zeros(n, n);
    for i in 0..p1 as i64 {
        for j in 0..p2 as i64 {
            let cell = [i, j];
            let (ci, _) = local(cell);
            let base = ci * per;
            for kind in SiteKind::ALL {
                let coin = coins.coin_for(Site { cell, kind });
                let off = base + graph.kind_offset(kind);
                for a in 0..coin.dim() {
                    for b in 0..coin.dim() {
                        c[(off + a, off + b)] = coin.get(a, b);
                    }
                }
            }
            for e in graph.edges() {
                let (ri, t) = local(add(cell, e.offset));
                let h = base + e.hub_slot;
                let r = ri * per + graph.kind_offset(e.rim_kind) + e.rim_slot;
                let ph = gauge.hub_to_rim_phase(cell, e.hub_slot);
                let z = Complex64::from_polar(1.0, ph - kdot(t));
                s[(r, h)] += z;
                s[(h, r)] += z.conj();
            }
        }
    }
    Ok(BlochBlock {
        graph,
        k: k.to_vec(),
        f: gauge.flux(),
        matrix: s.matmul(&c),
        cells,
    })
}

/// 8×8 diamond-chain block in the single-edge gauge.
pub fn bloch_block_dc(coins: &CoinAssignment, f: f64, k: f64) -> Result<BlochBlock> {
    bloch_block(&GaugeField::dc_single_edge(f), coins, [1, 1], &[k])
}

/// 12q×12q T3 block in the Landau gauge at f = p/q; the magnetic cell is
/// q cells along `a2`, so `k2` is conjugate to `q·a2`.
pub fn bloch_block_t3_landau(coins: &CoinAssignment, p: i64, q: i64, k1: f64, k2: f64) -> Result<BlochBlock> {
    let gauge = GaugeField::t3_landau_rational(p, q)?;
    bloch_block(&gauge, coins, [1, q as usize], &[k1, k2])
}

/// 12×12 T3 block in the periodic gauge at f = ±1/3.
pub fn bloch_block_t3_third(coins: &CoinAssignment, f: f64, k1: f64, k2: f64) -> Result<BlochBlock> {
    let gauge = GaugeField::t3_periodic_third(f)?;
    bloch_block(&gauge, coins, [1, 1], &[k1, k2])
}

/// Smallest-denominator p/q within `tol` of `f`, with q ≤ `q_max`.
pub fn rational_approximation(f: f64, q_max: i64, tol: f64) -> Option<(i64, i64)> {
    (1..=q_max).find_map(|q| {
        let p = (f * q as f64).round();
        ((f - p / q as f64).abs() < tol && gcd(p as i64, q) == 1).then_some((p as i64, q))
    })
}
