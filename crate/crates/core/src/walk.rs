//! Shift and walk operators on finite lattices, and real-space evolution.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::coins::{assemble_coin_operator, CoinAssignment};
use crate::error::{Error, Result};
use crate::lattice::{BasisState, FiniteLattice, GaugeField, Graph, Site, SiteKind};
use crate::linalg::{inner, norm, CsrMatrix, LinearOperator};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Hermitian involution swapping the two directed-edge states of each edge.
/// Dangling states of open patches are left untouched.
pub fn shift_operator(lattice: &FiniteLattice, gauge: &GaugeField) -> Result<CsrMatrix> {
    if gauge.graph() != lattice.graph() {
        return Err(Error::InvalidGauge(format!(
            "gauge for {} used on a {} lattice",
            gauge.graph(),
            lattice.graph()
        )));
    }
    gauge.check_periodic(lattice)?;
    let n = lattice.dim();
    let mut paired = vec![false; n];
    let mut trip = Vec::with_capacity(n);
    for e in lattice.edges() {
        let h = lattice.index_of(&e.hub).expect("edge ends lie on the lattice");
        let r = lattice.index_of(&e.rim).expect("edge ends lie on the lattice");
        let ph = gauge.hub_to_rim_phase(e.hub.cell, e.hub.slot);
        let z = Complex64::from_polar(1.0, ph);
        trip.push((r, h, z));
        trip.push((h, r, z.conj()));
        paired[h] = true;
        paired[r] = true;
    }
    for (i, p) in paired.iter().enumerate() {
        if !p {
            trip.push((i, i, Complex64::new(1.0, 0.0)));
        }
    }
    Ok(CsrMatrix::from_triplets(n, trip))
}

/// W = S·C.
pub fn walk_operator(s: &CsrMatrix, c: &CsrMatrix) -> Result<CsrMatrix> {
    if s.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: c.dim(),
        });
    }
    Ok(s.matmul(c))
}

/// Sparse walk operator on a finite patch.
#[derive(Debug, Clone)]
pub struct WalkOperator {
    lattice: FiniteLattice,
    gauge: GaugeField,
    matrix: CsrMatrix,
}

impl WalkOperator {
    pub fn new(lattice: FiniteLattice, gauge: GaugeField, coins: &CoinAssignment) -> Result<Self> {
        let s = shift_operator(&lattice, &gauge)?;
        let c = assemble_coin_operator(coins, &lattice)?;
        let matrix = walk_operator(&s, &c)?;
        Ok(Self {
            lattice,
            gauge,
            matrix,
        })
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn gauge(&self) -> &GaugeField {
        &self.gauge
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn graph(&self) -> Graph {
        self.lattice.graph()
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.matrix.unitarity_residual()
    }

    pub fn step(&self, psi: &StateVector) -> StateVector {
        StateVector {
            amps: self.matrix.matvec(&psi.amps),
        }
    }
}

impl LinearOperator for WalkOperator {
    fn dim(&self) -> usize {
        self.matrix.dim()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matrix.matvec_into(x, y);
    }
}

/// Amplitudes in lattice basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            amps: vec![ZERO; dim],
        }
    }

    pub fn localized(lattice: &FiniteLattice, s: &BasisState) -> Result<Self> {
        let i = lattice
            .index_of(s)
            .ok_or_else(|| Error::InvalidArgument(format!("state {s} is not on the lattice")))?;
        let mut v = Self::zeros(lattice.dim());
        v.amps[i] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// Normalized superposition over the slots of one site.
    pub fn on_site(lattice: &FiniteLattice, site: Site, slot_amps: &[Complex64]) -> Result<Self> {
        let n = lattice.graph().coordination(site.kind);
        if slot_amps.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: slot_amps.len(),
            });
        }
        let mut v = Self::zeros(lattice.dim());
        for (slot, &a) in slot_amps.iter().enumerate() {
            let i = lattice
                .index_of(&BasisState::new(site.cell, site.kind, slot))
                .ok_or_else(|| Error::InvalidArgument(format!("site {site:?} is not on the lattice")))?;
            v.amps[i] = a;
        }
        v.normalize()?;
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        for a in &mut self.amps {
            *a /= n;
        }
        Ok(())
    }

    pub fn overlap(&self, other: &Self) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    /// Equality up to a global phase: |⟨a|b⟩| > 1 − tol for normalized inputs.
    pub fn equal_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        let (na, nb) = (self.norm(), other.norm());
        if na == 0.0 || nb == 0.0 {
            return false;
        }
        self.overlap(other).norm() / (na * nb) > 1.0 - tol
    }
}

/// W^steps |ψ0⟩.
pub fn evolve(w: &WalkOperator, psi0: &StateVector, steps: usize) -> StateVector {
    let mut cur = psi0.amps.clone();
    let mut next = vec![ZERO; cur.len()];
    for _ in 0..steps {
        w.matrix.matvec_into(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    StateVector { amps: cur }
}

/// Calls `visit(step, ψ(step))` for step = 0..=steps.
pub fn evolve_with(w: &WalkOperator, psi0: &StateVector, steps: usize, mut visit: impl FnMut(usize, &StateVector)) {
    let mut cur = psi0.clone();
    let mut next = vec![ZERO; cur.dim()];
    visit(0, &cur);
    for step in 1..=steps {
        w.matrix.matvec_into(&cur.amps, &mut next);
        std::mem::swap(&mut cur.amps, &mut next);
        visit(step, &cur);
    }
}

/// |amplitude|² summed over the slots of each site.
pub fn site_probabilities(lattice: &FiniteLattice, psi: &StateVector) -> BTreeMap<Site, f64> {
    let mut out = BTreeMap::new();
    for (i, a) in psi.amps.iter().enumerate() {
        let s = lattice.state(i);
        *out.entry(s.site()).or_insert(0.0) += a.norm_sqr();
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotRow {
    pub step: usize,
    pub state: BasisState,
    pub re: f64,
    pub im: f64,
    pub prob: f64,
}

/// Per-slot rows of one snapshot; amplitudes with |a|² ≤ `threshold` skipped.
pub fn snapshot_rows(lattice: &FiniteLattice, step: usize, psi: &StateVector, threshold: f64) -> Vec<SnapshotRow> {
    psi.amps
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > threshold)
        .map(|(i, a)| SnapshotRow {
            step,
            state: lattice.state(i),
            re: a.re,
            im: a.im,
            prob: a.norm_sqr(),
        })
        .collect()
}

pub const SNAPSHOT_HEADER: &str = "step,cell,kind,slot,re,im,prob";

fn cell_label(graph: Graph, cell: [i64; 2]) -> String {
    match graph {
        Graph::DiamondChain => cell[0].to_string(),
        Graph::Dice => format!("{};{}", cell[0], cell[1]),
    }
}

pub fn snapshot_csv(graph: Graph, rows: &[SnapshotRow]) -> String {
    let mut s = String::new();
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.15e},{:.15e},{:.15e}",
            r.step,
            cell_label(graph, r.state.cell),
            r.state.kind.letter(),
            r.state.slot,
            r.re,
            r.im,
            r.prob
        );
    }
    s
}

pub const SITE_HEADER: &str = "step,cell,kind,prob";

pub fn site_csv(graph: Graph, step: usize, probs: &BTreeMap<Site, f64>, threshold: f64) -> String {
    let mut s = String::new();
    for (site, p) in probs {
        if *p > threshold {
            let _ = writeln!(s, "{},{},{},{:.15e}", step, cell_label(graph, site.cell), site.kind.letter(), p);
        }
    }
    s
}

/// Indices of hub states.
pub fn hub_indices(lattice: &FiniteLattice) -> Vec<usize> {
    (0..lattice.dim())
        .filter(|&i| lattice.state(i).kind == SiteKind::HubA)
        .collect()
}
