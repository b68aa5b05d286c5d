//! Translations and mirrors of diamond-chain spectra.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bloch::bloch_block_dc;
use super::quasi::quasi_energies;
use crate::coins::{CoinAssignment, CoinMatrix, CoinParamsU2};
use crate::error::{Error, Result};
use crate::linalg::circular_multiset_distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    /// f → f + 1.
    FluxTranslation,
    /// ε → ε + π.
    EnergyTranslation,
    /// f → −f + ω/π with k → −k − π + φ.
    FluxMirror,
    /// ε → −ε + φ/2 with k → k + π.
    EnergyMirror,
}

impl Symmetry {
    pub const ALL: [Symmetry; 4] = [
        Symmetry::FluxTranslation,
        Symmetry::EnergyTranslation,
        Symmetry::FluxMirror,
        Symmetry::EnergyMirror,
    ];
}

impl FromStr for Symmetry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flux-translation" => Ok(Symmetry::FluxTranslation),
            "energy-translation" => Ok(Symmetry::EnergyTranslation),
            "flux-mirror" => Ok(Symmetry::FluxMirror),
            "energy-mirror" => Ok(Symmetry::EnergyMirror),
            other => Err(Error::UnknownSymmetry(other.to_string())),
        }
    }
}

/// Largest multiset distance between the spectrum and its symmetry image
/// over the sample points `(f, k)`. `phi`, `omega` enter the mirrors.
pub fn symmetry_residual<F>(spectrum: F, symmetry: Symmetry, phi: f64, omega: f64, samples: &[(f64, f64)]) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<Vec<f64>>,
{
    let mut worst: f64 = 0.0;
    for &(f, k) in samples {
        let base = spectrum(f, k)?;
        let (lhs, rhs) = match symmetry {
            Symmetry::FluxTranslation => (base, spectrum(f + 1.0, k)?),
            Symmetry::EnergyTranslation => {
                let shifted = base.iter().map(|e| e + PI).collect();
                (base, shifted)
            }
            Symmetry::FluxMirror => (base, spectrum(-f + omega / PI, -k - PI + phi)?),
            Symmetry::EnergyMirror => {
                let mirrored = base.iter().map(|e| -e + phi / 2.0).collect();
                (mirrored, spectrum(f, k + PI)?)
            }
        };
        worst = worst.max(circular_multiset_distance(&lhs, &rhs));
    }
    Ok(worst)
}

/// Residual for a diamond chain with rims `U2(θ, φ, 0, β)`, `U2(θ, φ, ω, β)`.
pub fn dc_symmetry_residual(hub: &CoinMatrix, rim: CoinParamsU2, symmetry: Symmetry, samples: &[(f64, f64)]) -> Result<f64> {
    let coins = CoinAssignment::with_u2_rims(hub.clone(), rim);
    symmetry_residual(
        |f, k| Ok(quasi_energies(&bloch_block_dc(&coins, f, k)?)?.values),
        symmetry,
        rim.phi,
        rim.omega,
        samples,
    )
}
