//! Cage detection built on the Arnoldi recursion.

use std::collections::BTreeSet;

use serde::Serialize;

use super::arnoldi::arnoldi;
use super::period::{dynamics_period, Period, DEFAULT_MAX_PERIOD, DEFAULT_PERIOD_TOL};
use crate::error::{Error, Result};
use crate::lattice::{Cell, Site};
use crate::linalg::{inner, CMatrix};
use crate::walk::{StateVector, WalkOperator};

/// Krylov amplitudes below this are rounding noise.
const SUPPORT_EPS: f64 = 1e-10;

/// Krylov iterations used by [`detect_cage`].
pub const DEFAULT_MAX_KRYLOV: usize = 256;

pub const DEFAULT_ARNOLDI_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct CageReport {
    pub schema: u32,
    pub caged: bool,
    pub n_c: Option<usize>,
    pub b: Vec<f64>,
    pub support: Vec<Site>,
    pub radius: i64,
    pub period: Option<Period>,
    pub chi: Option<f64>,
    /// Largest probability outside the Krylov span over the verification run.
    pub leak: f64,
    pub initial_cell: Cell,
    #[serde(skip)]
    pub basis: Vec<StateVector>,
    #[serde(skip)]
    pub hessenberg: CMatrix,
}

impl CageReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn initial_cell(w: &WalkOperator, psi0: &StateVector) -> Cell {
    let (i, _) = psi0
        .amps
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, a)| if a.norm() > acc.1 { (i, a.norm()) } else { acc });
    w.lattice().state(i).cell
}

/// Largest 1 − Σ_m |⟨m|ψ(t)⟩|² for t ≤ steps.
pub fn span_leak(w: &WalkOperator, basis: &[StateVector], psi0: &StateVector, steps: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let mut psi = psi0.clone();
    psi.amps.iter_mut().for_each(|a| *a /= psi0.norm());
    for t in 0..=steps {
        if t > 0 {
            psi = w.step(&psi);
        }
        let inside: f64 = basis.iter().map(|q| inner(&q.amps, &psi.amps).norm_sqr()).sum();
        worst = worst.max(1.0 - inside);
    }
    worst
}

/// [`detect_cage_with`] using [`DEFAULT_MAX_KRYLOV`] iterations.
pub fn detect_cage(w: &WalkOperator, psi0: &StateVector, tol: f64, verify_steps: usize) -> Result<CageReport> {
    detect_cage_with(w, psi0, tol, verify_steps, DEFAULT_MAX_KRYLOV)
}

pub fn detect_cage_with(
    w: &WalkOperator,
    psi0: &StateVector,
    tol: f64,
    verify_steps: usize,
    max_iter: usize,
) -> Result<CageReport> {
    let ar = arnoldi(w, psi0, max_iter, tol)?;
    let lattice = w.lattice();
    let mut states = BTreeSet::new();
    for q in &ar.basis {
        for (i, a) in q.amps.iter().enumerate() {
            if a.norm() > SUPPORT_EPS {
                states.insert(i);
            }
        }
    }
    let caged = ar.n_c.is_some();
    if caged {
        if let Some(&i) = states.iter().find(|&&i| lattice.is_dangling(&lattice.state(i))) {
            return Err(Error::LatticeTooSmall(format!(
                "cage reaches the open boundary at {}",
                lattice.state(i)
            )));
        }
    }
    let support: BTreeSet<Site> = states.iter().map(|&i| lattice.state(i).site()).collect();
    let c0 = initial_cell(w, psi0);
    let graph = lattice.graph();
    let radius = support.iter().map(|s| graph.cell_distance(c0, s.cell)).max().unwrap_or(0);
    let leak = span_leak(w, &ar.basis, psi0, verify_steps);

    let mut report = CageReport {
        schema: 1,
        caged,
        n_c: ar.n_c,
        b: ar.b,
        support: support.into_iter().collect(),
        radius,
        period: None,
        chi: None,
        leak,
        initial_cell: c0,
        basis: ar.basis,
        hessenberg: ar.hessenberg,
    };
    if caged {
        let (p, chi) = dynamics_period(w, &report, DEFAULT_MAX_PERIOD, DEFAULT_PERIOD_TOL)?;
        report.period = Some(p);
        report.chi = chi;
    }
    Ok(report)
}

/// Cages started from every hub slot of one cell, and the union of supports.
#[derive(Debug, Clone, Serialize)]
pub struct SlotCages {
    pub per_slot: Vec<CageReport>,
    pub union: Vec<Site>,
    pub union_radius: i64,
}

pub fn detect_cage_all_hub_slots(w: &WalkOperator, cell: Cell, tol: f64, verify_steps: usize) -> Result<SlotCages> {
    use crate::lattice::{BasisState, SiteKind};
    let lattice = w.lattice();
    let n = lattice.graph().coordination(SiteKind::HubA);
    let mut per_slot = Vec::with_capacity(n);
    let mut union = BTreeSet::new();
    for slot in 0..n {
        let psi = StateVector::localized(lattice, &BasisState::new(cell, SiteKind::HubA, slot))?;
        let r = detect_cage(w, &psi, tol, verify_steps)?;
        union.extend(r.support.iter().copied());
        per_slot.push(r);
    }
    let graph = lattice.graph();
    let union_radius = union.iter().map(|s: &Site| graph.cell_distance(cell, s.cell)).max().unwrap_or(0);
    Ok(SlotCages {
        per_slot,
        union: union.into_iter().collect(),
        union_radius,
    })
}
