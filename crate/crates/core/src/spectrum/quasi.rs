//! Quasi-energies: eigenphases of Bloch blocks.

use std::f64::consts::PI;

use serde::Serialize;

use super::bloch::BlochBlock;
use crate::error::{Error, Result};
use crate::linalg::{circular_multiset_distance, eigenvalues, sorted_phases, CMatrix};

const UNITARY_TOL: f64 = 1e-10;

/// Sorted eigenphases in (−π, π], with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiEnergySpectrum {
    pub f: f64,
    pub k: Vec<f64>,
    pub values: Vec<f64>,
}

impl QuasiEnergySpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn distance(&self, other: &[f64]) -> f64 {
        circular_multiset_distance(&self.values, other)
    }
}

fn check_unitary(m: &CMatrix) -> Result<()> {
    let r = m.unitarity_residual();
    if r < UNITARY_TOL {
        Ok(())
    } else {
        Err(Error::NotUnitary(r))
    }
}

/// Direct diagonalization of the whole block.
pub fn quasi_energies(block: &BlochBlock) -> Result<QuasiEnergySpectrum> {
    check_unitary(&block.matrix)?;
    let ev = eigenvalues(&block.matrix)?;
    Ok(QuasiEnergySpectrum {
        f: block.f,
        k: block.k.clone(),
        values: sorted_phases(ev.iter().map(|z| z.arg())),
    })
}

/// The hub and rim diagonal blocks of W².
pub fn w2_subblocks(block: &BlochBlock) -> (CMatrix, CMatrix) {
    let w2 = block.matrix.matmul(&block.matrix);
    let hub = block.hub_indices();
    let rim = block.rim_indices();
    (w2.select(&hub, &hub), w2.select(&rim, &rim))
}

/// Spectrum from one W² sub-block: each eigenphase E of the hub block
/// yields ε = E/2 and E/2 + π. Requires the bipartite block structure.
pub fn quasi_energies_fast(block: &BlochBlock) -> Result<QuasiEnergySpectrum> {
    check_unitary(&block.matrix)?;
    let hub = block.hub_indices();
    let rim = block.rim_indices();
    if hub.len() != rim.len() {
        return Err(Error::DimensionMismatch {
            expected: hub.len(),
            found: rim.len(),
        });
    }
    // W maps hubs to rims: W² on hubs = W[hub, rim] · W[rim, hub]
    let a = block.matrix.select(&hub, &rim);
    let b = block.matrix.select(&rim, &hub);
    let e = eigenvalues(&a.matmul(&b))?;
    let half: Vec<f64> = e.iter().map(|z| z.arg() / 2.0).collect();
    Ok(QuasiEnergySpectrum {
        f: block.f,
        k: block.k.clone(),
        values: sorted_phases(half.iter().copied().chain(half.iter().map(|x| x + PI))),
    })
}

/// Eigenphases of an arbitrary square matrix.
pub fn eigenphases(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(sorted_phases(eigenvalues(m)?.iter().map(|z| z.arg())))
}
