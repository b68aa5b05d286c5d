use std::f64::consts::PI;

use proptest::prelude::*;

use qwcage::coins::{grover, CoinAssignment, CoinParamsR3};
use qwcage::lattice::{BasisState, Boundary, FiniteLattice, GaugeField, SiteKind};
use qwcage::walk::{evolve_with, site_probabilities, StateVector, WalkOperator};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Two gauges with the same plaquette fluxes differ by site phases, so
    /// site probabilities agree at every step.
    #[test]
    fn site_probabilities_are_gauge_covariant(
        a in 0.1..PI - 0.1,
        g in -PI..PI,
        slot in 0usize..6,
        sign in prop_oneof![Just(1.0), Just(-1.0)],
    ) {
        let lat = FiniteLattice::plane(9, 9, Boundary::Open).unwrap();
        let coins = CoinAssignment::with_r3_rims(grover(6).unwrap(), CoinParamsR3::new(a, g, 0.0)).unwrap();
        let f = sign / 3.0;
        let landau = WalkOperator::new(lat.clone(), GaugeField::t3_landau(f), &coins).unwrap();
        let third = WalkOperator::new(lat.clone(), GaugeField::t3_periodic_third(f).unwrap(), &coins).unwrap();
        let psi = StateVector::localized(&lat, &BasisState::new(lat.center(), SiteKind::HubA, slot)).unwrap();
        let mut landau_probs = Vec::new();
        evolve_with(&landau, &psi, 12, |_, s| landau_probs.push(site_probabilities(&lat, s)));
        let mut worst: f64 = 0.0;
        evolve_with(&third, &psi, 12, |t, s| {
            for (site, p) in site_probabilities(&lat, s) {
                worst = worst.max((p - landau_probs[t][&site]).abs());
            }
        });
        prop_assert!(worst < 1e-10, "probabilities differ by {worst:.3e}");
    }
}
