//! Periodicity of the walk restricted to a cage.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::cage::CageReport;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, inner, wrap_phase, LinearOperator};

pub const DEFAULT_MAX_PERIOD: usize = 200;
pub const DEFAULT_PERIOD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Period {
    Periodic(usize),
    Quasiperiodic,
}

impl Serialize for Period {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Period::Periodic(p) => s.serialize_u64(*p as u64),
            Period::Quasiperiodic => s.serialize_str("quasiperiodic"),
        }
    }
}

impl std::fmt::Display for Period {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Period::Periodic(p) => write!(f, "{p}"),
            Period::Quasiperiodic => f.write_str("QP"),
        }
    }
}

/// Smallest P ≤ `max_period` with ‖W^P v − e^{iχ} v‖ < `tol` for every
/// Krylov vector v of the cage, χ shared. Returns (period, χ).
pub fn dynamics_period<O: LinearOperator + ?Sized>(
    w: &O,
    cage: &CageReport,
    max_period: usize,
    tol: f64,
) -> Result<(Period, Option<f64>)> {
    if !cage.caged {
        return Err(Error::NotCaged);
    }
    let v = &cage.basis;
    let mut x: Vec<Vec<Complex64>> = v.iter().map(|s| s.amps.clone()).collect();
    let mut y = vec![Complex64::new(0.0, 0.0); w.dim()];
    for p in 1..=max_period {
        for col in x.iter_mut() {
            w.apply_into(col, &mut y);
            std::mem::swap(col, &mut y);
        }
        let chi = inner(&v[0].amps, &x[0]).arg();
        let phase = Complex64::from_polar(1.0, chi);
        let ok = x.iter().zip(v).all(|(xc, vc)| {
            let d: f64 = xc.iter().zip(&vc.amps).map(|(a, b)| (a - phase * b).norm_sqr()).sum();
            d.sqrt() < tol
        });
        if ok {
            return Ok((Period::Periodic(p), Some(chi)));
        }
    }
    Ok((Period::Quasiperiodic, None))
}

/// Checks that every eigenphase difference of the cage Hessenberg matrix
/// is a multiple of 2π/P within `tol`.
pub fn hessenberg_commensurate(cage: &CageReport, period: usize, tol: f64) -> Result<bool> {
    let ev = eigenvalues(&cage.hessenberg)?;
    let e0 = ev[0].arg();
    let p = period as f64;
    Ok(ev.iter().all(|z| {
        let d = z.arg() - e0;
        (wrap_phase(p * d) / p).abs() < tol
    }))
}

/// The phase quantum 2π/P.
pub fn phase_quantum(period: usize) -> f64 {
    TAU / period as f64
}
