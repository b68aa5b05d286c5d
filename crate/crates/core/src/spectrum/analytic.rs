//! Closed-form quasi-energies.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{sorted_phases, wrap_phase};

const DOMAIN_TOL: f64 = 1e-12;

fn acos_checked(x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0 + DOMAIN_TOL) {
        return Err(Error::FormulaDomain(x));
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

/// Diamond-chain bands for a G4 hub and rims `U2(θ, φ, 0, β)`, `U2(θ, φ, ω, β)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DcBands {
    pub dispersive: [f64; 4],
    pub flat: [f64; 4],
}

impl DcBands {
    /// All eight values, sorted.
    pub fn all(&self) -> Vec<f64> {
        sorted_phases(self.dispersive.iter().chain(self.flat.iter()).copied())
    }
}

pub fn dc_bands_analytic(theta: f64, phi: f64, omega: f64, beta: f64, f: f64, k: f64) -> Result<DcBands> {
    let a = PI * f - omega / 2.0;
    let z = theta.sin() * a.cos() * (a + k + (PI - phi) / 2.0).cos();
    let half = 0.5 * acos_checked(z)?;
    let c = (beta - phi / 2.0).cos() * theta.cos();
    let flat_half = 0.5 * acos_checked(c)?;
    let mut dispersive = [0.0; 4];
    let mut flat = [0.0; 4];
    let mut i = 0;
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            dispersive[i] = wrap_phase((phi + PI) / 4.0 + s1 * half + s2 * FRAC_PI_2);
            flat[i] = wrap_phase(s1 * FRAC_PI_2 + phi / 4.0 + s2 * flat_half);
            i += 1;
        }
    }
    Ok(DcBands { dispersive, flat })
}

/// The eight k-independent levels of an H4 hub at f = ω/2π.
pub fn dc_pinch_energies_h4(theta: f64, phi: f64, beta: f64) -> Result<Vec<f64>> {
    let s = (beta - phi / 2.0).sin();
    let r = (2.0 * theta.sin().powi(2) + theta.cos().powi(2) * s * s).sqrt();
    let mut out = Vec::with_capacity(8);
    for d in [1.0, -1.0] {
        let half = 0.5 * acos_checked((s * theta.cos() + d * r) / 2.0)?;
        for a in [1.0, -1.0] {
            for c in [1.0, -1.0] {
                out.push(FRAC_PI_4 + a * FRAC_PI_2 + phi / 4.0 + c * half);
            }
        }
    }
    Ok(sorted_phases(out))
}

/// Pinch levels of T3 with a G6 hub and R3(α, γ) rims at f = 1/2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct T3PinchLevels {
    /// Twelve levels, sorted; each occurs `degeneracy` times in a 24×24 block.
    pub levels: Vec<f64>,
    pub degeneracy: usize,
}

impl T3PinchLevels {
    pub fn with_multiplicity(&self) -> Vec<f64> {
        sorted_phases(
            self.levels
                .iter()
                .flat_map(|&x| std::iter::repeat_n(x, self.degeneracy)),
        )
    }
}

pub fn t3_pinch_energies(alpha: f64) -> T3PinchLevels {
    let c = 0.5 * ((2.0 + alpha.cos()) / 3.0).clamp(-1.0, 1.0).acos();
    let h = alpha / 2.0;
    let raw = [
        0.0,
        FRAC_PI_2,
        -FRAC_PI_2,
        PI,
        FRAC_PI_2 + h,
        FRAC_PI_2 - h,
        -FRAC_PI_2 + h,
        -FRAC_PI_2 - h,
        FRAC_PI_2 + c,
        FRAC_PI_2 - c,
        -FRAC_PI_2 + c,
        -FRAC_PI_2 - c,
    ];
    T3PinchLevels {
        levels: sorted_phases(raw),
        degeneracy: 2,
    }
}
