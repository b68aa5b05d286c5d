//! Aharonov–Bohm cages: Krylov closure, confinement, periods and flux scans.

pub mod appendix_e;
pub mod arnoldi;
pub mod cage;
pub mod critical;
pub mod period;
pub mod superlattice;

pub use appendix_e::{appendix_e_search, CommensurateAngle};
pub use arnoldi::{arnoldi, ArnoldiResult};
pub use cage::{
    detect_cage, detect_cage_all_hub_slots, detect_cage_with, span_leak, CageReport, SlotCages, DEFAULT_ARNOLDI_TOL,
    DEFAULT_MAX_KRYLOV,
};
pub use critical::{b_at_flux, critical_flux_scan, default_n_star, FluxMinimum, FluxScan};
pub use period::{dynamics_period, hessenberg_commensurate, Period, DEFAULT_MAX_PERIOD, DEFAULT_PERIOD_TOL};
pub use superlattice::{
    k_out_action, k_out_action_with, predict_superlattice_cage, rl_action, rl_image, rl_transform, superlattice_corpus,
    cage_sequence_cases, verify_corpus, verify_superlattice_cage, verify_superlattice_cage_with, HubCoin, KOutEntry,
    KOutTerm, Layout, RlState, SequenceCase, SuperlatticeVerdict, Walls,
};
