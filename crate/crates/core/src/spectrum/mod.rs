//! Bloch reduction, quasi-energies, closed-form bands and butterflies.

pub mod analytic;
pub mod bloch;
pub mod butterfly;
pub mod quasi;
pub mod symmetry;

pub use analytic::{dc_bands_analytic, dc_pinch_energies_h4, t3_pinch_energies, DcBands, T3PinchLevels};
pub use bloch::{
    bloch_block, bloch_block_dc, bloch_block_t3_landau, bloch_block_t3_third, rational_approximation, BlochBlock,
};
pub use butterfly::{band_width, butterfly, spectrum_at, Butterfly, FluxSampling, FluxSlice, PinchReport, PINCH_TOL};
pub use quasi::{eigenphases, quasi_energies, quasi_energies_fast, w2_subblocks, QuasiEnergySpectrum};
pub use symmetry::{dc_symmetry_residual, symmetry_residual, Symmetry};
