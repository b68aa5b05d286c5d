//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::path::Path;
use std::process::Command as Proc;
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qwcage::caging::{
    appendix_e_search, arnoldi, b_at_flux, detect_cage, detect_cage_all_hub_slots, k_out_action, superlattice_corpus,
    cage_sequence_cases, verify_corpus, verify_superlattice_cage, Period, RlState,
};
use qwcage::coins::{dft, grover, hadamard, CoinAssignment, CoinMatrix, CoinParamsR3, CoinParamsU2};
use qwcage::lattice::{hex_norm, BasisState, Boundary, FiniteLattice, GaugeField, Graph, Site, SiteKind};
use qwcage::linalg::{circular_multiset_distance, circular_spread, wrap_phase};
use qwcage::spectrum::{
    bloch_block_dc, bloch_block_t3_landau, bloch_block_t3_third, dc_bands_analytic, dc_pinch_energies_h4,
    dc_symmetry_residual, eigenphases, quasi_energies, quasi_energies_fast, t3_pinch_energies, w2_subblocks, Symmetry,
};
use qwcage::walk::{evolve_with, StateVector, WalkOperator};

fn u(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

fn g4() -> CoinMatrix {
    grover(4).expect("G4")
}

fn h4() -> CoinMatrix {
    hadamard(4).expect("H4")
}

fn g6() -> CoinMatrix {
    grover(6).expect("G6")
}

fn chain() -> FiniteLattice {
    FiniteLattice::chain(30, Boundary::Open).expect("chain")
}

fn plane() -> FiniteLattice {
    FiniteLattice::plane(9, 9, Boundary::Open).expect("plane")
}

fn hub_state(lat: &FiniteLattice, slot: usize) -> StateVector {
    StateVector::localized(lat, &BasisState::new(lat.center(), SiteKind::HubA, slot)).expect("hub state")
}

fn spectrum_dc(coins: &CoinAssignment, f: f64, k: f64) -> Result<Vec<f64>> {
    Ok(quasi_energies(&bloch_block_dc(coins, f, k)?)?.values)
}

/// Random U2 rim parameters with θ away from the diagonal and
/// off-diagonal coin limits.
fn rim(rng: &mut StdRng) -> CoinParamsU2 {
    CoinParamsU2::new(u(rng, 0.3, 1.3), u(rng, -PI, PI), u(rng, -PI, PI), u(rng, -PI, PI))
}

fn c1_band_equivalence() -> Result<String> {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (th, phi, om, be) = (u(&mut rng, 0.0, PI), u(&mut rng, -PI, PI), u(&mut rng, -PI, PI), u(&mut rng, -PI, PI));
        let (f, k) = (u(&mut rng, 0.0, 1.0), u(&mut rng, -PI, PI));
        let coins = CoinAssignment::with_u2_rims(g4(), CoinParamsU2::new(th, phi, om, be));
        let num = spectrum_dc(&coins, f, k)?;
        let an = dc_bands_analytic(th, phi, om, be, f, k)?.all();
        worst = worst.max(circular_multiset_distance(&num, &an));
    }
    let dt = t0.elapsed().as_secs_f64();
    ensure!(worst < 1e-9, "max distance {worst:.3e}");
    ensure!(dt < 5.0, "took {dt:.2} s");
    Ok(format!("max distance {worst:.2e} over 100 draws in {dt:.2} s"))
}

/// Numeric eigenphases closest to each reference value.
fn nearest(spectrum: &[f64], refs: &[f64]) -> Vec<f64> {
    refs.iter()
        .map(|&r| {
            *spectrum
                .iter()
                .min_by(|a, b| wrap_phase(*a - r).abs().total_cmp(&wrap_phase(*b - r).abs()))
                .expect("non-empty spectrum")
        })
        .collect()
}

fn c2_flat_bands() -> Result<String> {
    let mut rng = StdRng::seed_from_u64(2);
    let mut grid_spread: f64 = 0.0;
    for _ in 0..2 {
        let p = rim(&mut rng);
        let coins = CoinAssignment::with_u2_rims(g4(), p);
        let flat = dc_bands_analytic(p.theta, p.phi, p.omega, p.beta, 0.0, 0.0)?.flat;
        let mut tracks: Vec<Vec<f64>> = vec![Vec::new(); 4];
        for i in 0..64 {
            for j in 0..64 {
                let f = i as f64 / 64.0;
                let k = -PI + TAU * j as f64 / 64.0;
                for (t, v) in tracks.iter_mut().zip(nearest(&spectrum_dc(&coins, f, k)?, &flat)) {
                    t.push(v);
                }
            }
        }
        for t in &tracks {
            grid_spread = grid_spread.max(circular_spread(t));
        }
    }
    ensure!(grid_spread < 1e-10, "flat bands vary over (f, k) by {grid_spread:.3e}");

    let mut theta_spread: f64 = 0.0;
    for sign in [1.0, -1.0] {
        let (phi, om) = (u(&mut rng, -PI, PI), u(&mut rng, -PI, PI));
        let be = phi / 2.0 + sign * FRAC_PI_2;
        let (f, k) = (u(&mut rng, 0.0, 1.0), u(&mut rng, -PI, PI));
        let flat = dc_bands_analytic(0.7, phi, om, be, f, k)?.flat;
        let mut tracks: Vec<Vec<f64>> = vec![Vec::new(); 4];
        for i in 0..32 {
            let th = 0.05 + (PI - 0.1) * i as f64 / 31.0;
            let coins = CoinAssignment::with_u2_rims(g4(), CoinParamsU2::new(th, phi, om, be));
            for (t, v) in tracks.iter_mut().zip(nearest(&spectrum_dc(&coins, f, k)?, &flat)) {
                t.push(v);
            }
        }
        for t in &tracks {
            theta_spread = theta_spread.max(circular_spread(t));
        }
    }
    ensure!(theta_spread < 1e-12, "flat bands vary with theta by {theta_spread:.3e}");
    Ok(format!(
        "(f, k) spread {grid_spread:.2e} on 64x64, theta spread {theta_spread:.2e} over 32 values"
    ))
}

fn c3_dc_critical_flux() -> Result<String> {
    let mut rng = StdRng::seed_from_u64(3);
    let lat = chain();
    let states: Vec<StateVector> = (0..4).map(|s| hub_state(&lat, s)).collect();
    let (mut at_max, mut off_min): (f64, f64) = (0.0, f64::INFINITY);
    for _ in 0..20 {
        let (th, phi, be) = (u(&mut rng, 0.3, 1.3), u(&mut rng, -PI, PI), u(&mut rng, -PI, PI));
        for om in [0.0, 0.4 * PI, -0.6 * PI] {
            let p = CoinParamsU2::new(th, phi, om, be);
            for (hub, fc) in [(g4(), 0.5 + om / TAU), (h4(), om / TAU)] {
                let coins = CoinAssignment::with_u2_rims(hub, p);
                for psi in &states {
                    at_max = at_max.max(b_at_flux(&lat, &coins, psi, fc, 8)?);
                    for d in [-0.1, 0.1] {
                        off_min = off_min.min(b_at_flux(&lat, &coins, psi, fc + d, 8)?);
                    }
                }
            }
        }
    }
    ensure!(at_max < 1e-8, "b_8 at f_c reaches {at_max:.3e}");
    ensure!(off_min > 0.01, "b_8 at f_c +- 0.1 drops to {off_min:.3e}");
    Ok(format!(
        "max b_8(f_c) = {at_max:.2e}, min b_8(f_c +- 0.1) = {off_min:.3}, 4 hub slots, G4 and H4"
    ))
}

fn c4_h4_pinch() -> Result<String> {
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (th, phi, om, be) = (u(&mut rng, 0.0, PI), u(&mut rng, -PI, PI), u(&mut rng, -PI, PI), u(&mut rng, -PI, PI));
        let coins = CoinAssignment::with_u2_rims(h4(), CoinParamsU2::new(th, phi, om, be));
        let levels = dc_pinch_energies_h4(th, phi, be)?;
        for i in 0..10 {
            let k = -PI + TAU * (i as f64 + 0.37) / 10.0;
            worst = worst.max(circular_multiset_distance(&spectrum_dc(&coins, om / TAU, k)?, &levels));
        }
    }
    ensure!(worst < 1e-9, "max distance {worst:.3e}");
    Ok(format!("max distance {worst:.2e} over 20 draws x 10 k"))
}

fn t3_k(rng: &mut StdRng) -> (f64, f64) {
    (u(rng, -PI, PI), u(rng, -PI, PI))
}

fn c5_t3_caging() -> Result<String> {
    let mut rng = StdRng::seed_from_u64(5);
    let lat = plane();
    let states: Vec<StateVector> = (0..6).map(|s| hub_state(&lat, s)).collect();
    let gammas = [0.0, (1.0f64 / 3.0).sqrt().asin()];
    let (mut b_max, mut pinch_worst, mut k_spread): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for alpha in [FRAC_PI_2, 2.0 * PI / 3.0, PI] {
        let levels = t3_pinch_energies(alpha);
        ensure!(levels.degeneracy == 2 && levels.levels.len() == 12, "pinch levels are not 12 x 2");
        let expected = levels.with_multiplicity();
        for gamma in gammas {
            let coins = CoinAssignment::with_r3_rims(g6(), CoinParamsR3::new(alpha, gamma, 0.0))?;
            for psi in &states {
                b_max = b_max.max(b_at_flux(&lat, &coins, psi, 0.5, 12)?);
            }
            let mut first: Option<Vec<f64>> = None;
            for _ in 0..5 {
                let (k1, k2) = t3_k(&mut rng);
                let sp = quasi_energies(&bloch_block_t3_landau(&coins, 1, 2, k1, k2)?)?.values;
                pinch_worst = pinch_worst.max(circular_multiset_distance(&sp, &expected));
                match &first {
                    Some(f0) => k_spread = k_spread.max(circular_multiset_distance(f0, &sp)),
                    None => first = Some(sp),
                }
            }
        }
    }
    ensure!(b_max < 1e-8, "b_12 at f = 1/2 reaches {b_max:.3e}");
    ensure!(pinch_worst < 1e-9, "pinch levels off by {pinch_worst:.3e}");
    ensure!(k_spread < 1e-9, "k spread {k_spread:.3e}");
    Ok(format!(
        "max b_12 = {b_max:.2e}, pinch distance {pinch_worst:.2e}, k spread {k_spread:.2e}"
    ))
}

/// Momentum shifts (along a1 and along 3·a2) relating the Landau gauge at
/// f = −1/3 to the periodic gauge, from the gauge transform built by a
/// breadth-first walk over a patch.
fn third_gauge_shift() -> Result<(f64, f64)> {
    let lat = FiniteLattice::plane(9, 9, Boundary::Open)?;
    let landau = GaugeField::t3_landau_rational(-1, 3)?;
    let third = GaugeField::t3_periodic_third(-1.0 / 3.0)?;
    let mut nbr: HashMap<Site, Vec<(Site, f64)>> = HashMap::new();
    for e in lat.edges() {
        let d = landau.hub_to_rim_phase(e.hub.cell, e.hub.slot) - third.hub_to_rim_phase(e.hub.cell, e.hub.slot);
        nbr.entry(e.hub.site()).or_default().push((e.rim.site(), d));
        nbr.entry(e.rim.site()).or_default().push((e.hub.site(), -d));
    }
    let start = Site { cell: [0, 0], kind: SiteKind::HubA };
    let mut chi = HashMap::from([(start, 0.0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        let base = chi[&s];
        for &(t, d) in &nbr[&s] {
            match chi.get(&t) {
                Some(&c) => ensure!(
                    wrap_phase(c - base - d).abs() < 1e-9,
                    "gauges carry different fluxes"
                ),
                None => {
                    chi.insert(t, base + d);
                    queue.push_back(t);
                }
            }
        }
    }
    let diff = |a: Site, b: Site| wrap_phase(chi[&b] - chi[&a]);
    let at = |c: [i64; 2], kind| Site { cell: c, kind };
    let c1 = diff(at([1, 1], SiteKind::HubA), at([2, 1], SiteKind::HubA));
    let c2 = diff(at([1, 1], SiteKind::HubA), at([1, 4], SiteKind::HubA));
    for kind in SiteKind::ALL {
        for cell in [[2, 2], [4, 1], [3, 3]] {
            ensure!(
                wrap_phase(diff(at(cell, kind), at([cell[0] + 1, cell[1]], kind)) - c1).abs() < 1e-9
                    && wrap_phase(diff(at(cell, kind), at([cell[0], cell[1] + 3], kind)) - c2).abs() < 1e-9,
                "gauge transform is not translation covariant"
            );
        }
    }
    Ok((c1, c2))
}

fn c6_tuned_t3() -> Result<String> {
    let mut rng = StdRng::seed_from_u64(6);
    let lat = plane();
    let psi = hub_state(&lat, 0);
    let sets = [
        (FRAC_PI_2, (1.0f64 / 3.0).sqrt().asin()),
        (2.0 * PI / 3.0, 0.0),
        (1.1, 0.4),
    ];
    let (mut b_max, mut q6_spread, mut cross): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let (c1, c2) = third_gauge_shift()?;
    for (alpha, gamma) in sets {
        let coins = CoinAssignment::with_r3_rims(g6(), CoinParamsR3::new(alpha, gamma, -TAU / 3.0))?;
        b_max = b_max.max(b_at_flux(&lat, &coins, &psi, 1.0 / 6.0, 12)?);
        let mut first: Option<Vec<f64>> = None;
        for _ in 0..5 {
            let (k1, k2) = t3_k(&mut rng);
            let sp = quasi_energies(&bloch_block_t3_landau(&coins, 1, 6, k1, k2)?)?.values;
            match &first {
                Some(f0) => q6_spread = q6_spread.max(circular_multiset_distance(f0, &sp)),
                None => first = Some(sp),
            }
        }
        for _ in 0..5 {
            let (k1, k2) = t3_k(&mut rng);
            let lan = quasi_energies(&bloch_block_t3_landau(&coins, -1, 3, k1, k2)?)?.values;
            let mut union = Vec::with_capacity(36);
            for m in 0..3 {
                let kt2 = (k2 - c2 + TAU * m as f64) / 3.0;
                union.extend(quasi_energies(&bloch_block_t3_third(&coins, -1.0 / 3.0, k1 - c1, kt2)?)?.values);
            }
            union.sort_by(f64::total_cmp);
            cross = cross.max(circular_multiset_distance(&lan, &union));
        }
    }
    ensure!(b_max < 1e-8, "b_12 at f = 1/6 reaches {b_max:.3e}");
    ensure!(q6_spread < 1e-9, "Landau q = 6 spectrum depends on k by {q6_spread:.3e}");
    ensure!(cross < 1e-9, "Landau and periodic gauges differ by {cross:.3e}");
    Ok(format!(
        "max b_12(1/6) = {b_max:.2e}, q = 6 k spread {q6_spread:.2e}, cross-gauge {cross:.2e}"
    ))
}

fn cage_period(lat: FiniteLattice, coins: &CoinAssignment, f: f64) -> Result<Period> {
    let psi = hub_state(&lat, 0);
    let gauge = GaugeField::natural(lat.graph(), f);
    let w = WalkOperator::new(lat, gauge, coins)?;
    let r = detect_cage(&w, &psi, 1e-8, 50)?;
    r.period.context("walk is not caged")
}

fn c7_periods() -> Result<String> {
    let mut rng = StdRng::seed_from_u64(7);
    let mut rows = Vec::new();
    let mut check = |label: &str, lat: FiniteLattice, coins: CoinAssignment, f: f64, want: Period| -> Result<()> {
        let got = cage_period(lat, &coins, f)?;
        ensure!(got == want, "{label}: period {got}, expected {want}");
        rows.push(format!("{label}={got}"));
        Ok(())
    };
    for sign in [1.0, -1.0] {
        for _ in 0..3 {
            let (th, phi, om) = (u(&mut rng, 0.3, 1.3), u(&mut rng, -PI, PI), u(&mut rng, -PI, PI));
            let be = (sign * PI + phi) / 2.0;
            let coins = CoinAssignment::with_u2_rims(g4(), CoinParamsU2::new(th, phi, om, be));
            check("G4 beta=(+-pi+phi)/2", chain(), coins, 0.5 + om / TAU, Period::Periodic(8))?;
        }
    }
    for _ in 0..3 {
        let om = u(&mut rng, -PI, PI);
        let coins = CoinAssignment::with_u2_rims(g4(), CoinParamsU2::new(TAU / 5.0, 0.0, om, 0.0));
        check("G4 theta=2pi/5 beta=-phi/2", chain(), coins, 0.5 + om / TAU, Period::Periodic(20))?;
        let phi = u(&mut rng, -PI, PI);
        let coins = CoinAssignment::with_u2_rims(g4(), CoinParamsU2::new(TAU / 5.0, phi, om, phi / 2.0));
        check("G4 theta=2pi/5 beta=phi/2", chain(), coins, 0.5 + om / TAU, Period::Periodic(20))?;
    }
    for (phi, want) in [(PI, 24), (FRAC_PI_2, 10), (0.0, 12)] {
        let om = u(&mut rng, -PI, PI);
        let coins = CoinAssignment::with_u2_rims(h4(), CoinParamsU2::new(FRAC_PI_4, phi, om, 0.0));
        check(&format!("H4 phi={phi:.3}"), chain(), coins, om / TAU, Period::Periodic(want))?;
    }
    for gamma in [0.0, (1.0f64 / 3.0).sqrt().asin(), 0.9] {
        let coins = CoinAssignment::with_r3_rims(g6(), CoinParamsR3::new(2.0 * PI / 3.0, gamma, 0.0))?;
        check("T3 alpha=2pi/3", plane(), coins, 0.5, Period::Periodic(12))?;
    }
    let coins = CoinAssignment::with_u2_rims(g4(), CoinParamsU2::new(0.7, 1.3, 0.0, 0.4));
    check("G4 generic", chain(), coins, 0.5, Period::Quasiperiodic)?;
    let coins = CoinAssignment::with_r3_rims(g6(), CoinParamsR3::new(1.0, 0.3, 0.0))?;
    check("T3 generic", plane(), coins, 0.5, Period::Quasiperiodic)?;
    rows.dedup();
    Ok(rows.join(", "))
}

fn c8_appendix_e() -> Result<String> {
    let t0 = Instant::now();
    let sols = appendix_e_search(100, 100)?;
    let dt = t0.elapsed().as_secs_f64();
    let nontrivial: Vec<_> = sols.iter().filter(|s| !s.trivial).collect();
    ensure!(nontrivial.len() == 1, "{} non-trivial solutions", nontrivial.len());
    let s = nontrivial[0];
    ensure!(
        (s.p1, s.q1, s.p2, s.q2, s.period) == (2, 3, 1, 3, 12),
        "unexpected solution {s:?}"
    );
    ensure!(sols.iter().all(|s| !s.trivial || s.p1 == 0), "mis-flagged trivial solution");
    ensure!(dt < 1.0, "took {dt:.2} s");
    Ok(format!("only alpha = 2pi/3 (period 12), {} trivial, {dt:.3} s", sols.len() - 1))
}

fn c9_symmetries() -> Result<String> {
    let mut rng = StdRng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..16 {
        let p = rim(&mut rng);
        let samples: Vec<(f64, f64)> = (0..4).map(|_| (u(&mut rng, -1.0, 1.0), u(&mut rng, -PI, PI))).collect();
        for sym in Symmetry::ALL {
            worst = worst.max(dc_symmetry_residual(&g4(), p, sym, &samples)?);
        }
    }
    ensure!(worst < 1e-9, "max residual {worst:.3e}");
    Ok(format!("max residual {worst:.2e} over 16 sets x 4 symmetries"))
}

fn c10_cage_geometry() -> Result<String> {
    let mut rng = StdRng::seed_from_u64(10);
    let (mut radius, mut leak): (i64, f64) = (0, 0.0);
    for _ in 0..4 {
        let p = rim(&mut rng);
        for (hub, fc) in [(g4(), 0.5 + p.omega / TAU), (h4(), p.omega / TAU)] {
            let lat = chain();
            let c = lat.center();
            let w = WalkOperator::new(lat, GaugeField::dc_single_edge(fc), &CoinAssignment::with_u2_rims(hub, p))?;
            let cages = detect_cage_all_hub_slots(&w, c, 1e-8, 1000)?;
            ensure!(cages.per_slot.iter().all(|r| r.caged), "a DC hub slot is not caged");
            radius = radius.max(cages.union_radius);
            leak = cages.per_slot.iter().map(|r| r.leak).fold(leak, f64::max);
        }
    }
    ensure!(radius <= 2, "DC cage radius {radius}");

    let (mut hex, mut t3_leak): (f64, f64) = (0.0, 0.0);
    for (alpha, gamma) in [(FRAC_PI_2, 0.0), (2.0 * PI / 3.0, (1.0f64 / 3.0).sqrt().asin()), (1.3, 0.7)] {
        let lat = plane();
        let c = lat.center();
        let coins = CoinAssignment::with_r3_rims(g6(), CoinParamsR3::new(alpha, gamma, 0.0))?;
        let w = WalkOperator::new(lat, GaugeField::t3_landau(0.5), &coins)?;
        let cages = detect_cage_all_hub_slots(&w, c, 1e-8, 1000)?;
        ensure!(cages.per_slot.iter().all(|r| r.caged), "a T3 hub slot is not caged");
        let origin = Graph::Dice.fractional_position(c, SiteKind::HubA);
        for s in &cages.union {
            let p = Graph::Dice.fractional_position(s.cell, s.kind);
            hex = hex.max(hex_norm([p[0] - origin[0], p[1] - origin[1]]));
        }
        t3_leak = cages.per_slot.iter().map(|r| r.leak).fold(t3_leak, f64::max);
    }
    ensure!(hex <= 2.0 + 1e-12, "T3 support leaves the hexagon (norm {hex})");
    ensure!(leak < 1e-9 && t3_leak < 1e-9, "leak {leak:.3e} (DC), {t3_leak:.3e} (T3)");
    Ok(format!(
        "DC radius {radius}, T3 hex norm {hex:.3}, leak {:.2e} over 1000 steps",
        leak.max(t3_leak)
    ))
}

fn c11_superlattices() -> Result<String> {
    let len = 30;
    let cases = cage_sequence_cases(len);
    for case in &cases {
        let init = Site { cell: [case.n0, 0], kind: SiteKind::HubA };
        let v = verify_superlattice_cage(&case.layout, init, case.f, 300)?;
        ensure!(
            v.caged && v.agrees,
            "sequence f = {} `{}` on {}: caged {}, agrees {}",
            case.f,
            case.sequence,
            case.layout,
            v.caged,
            v.agrees
        );
    }
    let corpus = superlattice_corpus(len);
    let mut layouts: Vec<String> = corpus.iter().map(|(f, l, _)| format!("{f}{l}")).collect();
    layouts.sort();
    layouts.dedup();
    ensure!(layouts.len() >= 50, "only {} layouts", layouts.len());
    let verdicts = verify_corpus(&corpus, 300)?;
    let bad = verdicts.iter().filter(|v| !v.agrees).count();
    ensure!(bad == 0, "{bad} of {} predictions disagree", verdicts.len());

    use RlState::*;
    let expected = [(RPlus, LMinus, 1), (RMinus, LPlus, 1), (LPlus, RMinus, -1), (LMinus, RPlus, -1)];
    let table = k_out_action(qwcage::caging::superlattice::default_rim(), 0.5)?;
    let mut moduli = Vec::new();
    for (from, to, dcell) in expected {
        let e = table.iter().find(|e| e.from == from).context("missing K_out row")?;
        ensure!(e.single() == Some((to, dcell)), "K_out {from} -> {:?}", e.single());
        moduli.push(e.terms[0].amplitude().norm());
    }
    // The rim coin splits each path, so rows carry the same transmission modulus.
    let m0 = moduli[0];
    ensure!(m0 > 1e-6, "K_out transmits nothing");
    ensure!(
        moduli.iter().all(|m| (m - m0).abs() < 1e-12),
        "K_out rows have unequal moduli {moduli:?}"
    );
    Ok(format!(
        "{} cage sequences caged, {} corpus predictions on {} layouts agree, K_out matches (|amp| = {m0:.6})",
        cases.len(),
        verdicts.len(),
        layouts.len()
    ))
}

fn c12_w2_blocks() -> Result<String> {
    let mut rng = StdRng::seed_from_u64(12);
    let (mut iso, mut rec): (f64, f64) = (0.0, 0.0);
    let mut blocks = Vec::new();
    for i in 0..50 {
        let hub = if i % 2 == 0 { g4() } else { h4() };
        let coins = CoinAssignment::with_u2_rims(hub, rim(&mut rng));
        blocks.push(bloch_block_dc(&coins, u(&mut rng, -1.0, 1.0), u(&mut rng, -PI, PI))?);
    }
    for _ in 0..20 {
        let om = if rng.gen_bool(0.5) { 0.0 } else { -TAU / 3.0 };
        let coins = CoinAssignment::with_r3_rims(g6(), CoinParamsR3::new(u(&mut rng, 0.0, PI), u(&mut rng, -1.5, 1.5), om))?;
        let q = rng.gen_range(1..=4i64);
        let p = loop {
            let p = rng.gen_range(-q..=q);
            if gcd(p, q) == 1 {
                break p;
            }
        };
        let (k1, k2) = t3_k(&mut rng);
        blocks.push(bloch_block_t3_landau(&coins, p, q, k1, k2)?);
    }
    for b in &blocks {
        let (hub, rim) = w2_subblocks(b);
        iso = iso.max(circular_multiset_distance(&eigenphases(&hub)?, &eigenphases(&rim)?));
        rec = rec.max(quasi_energies_fast(b)?.distance(&quasi_energies(b)?.values));
    }
    ensure!(iso < 1e-10, "sub-blocks differ by {iso:.3e}");
    ensure!(rec < 1e-10, "reconstruction off by {rec:.3e}");
    Ok(format!("isospectral to {iso:.2e}, reconstruction {rec:.2e} on 50 DC + 20 T3 blocks"))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Support radius (probability above 1e-12) and RMS displacement, in cells.
/// Radius holding 99% of the probability, and the RMS distance from `c0`.
fn spread(lat: &FiniteLattice, psi: &StateVector, c0: i64) -> (i64, f64) {
    let mut by_dist = vec![0.0; lat.extent().cells() + 1];
    let mut m2 = 0.0;
    for (i, a) in psi.amps.iter().enumerate() {
        let p = a.norm_sqr();
        let d = lat.state(i).cell[0] - c0;
        m2 += p * (d * d) as f64;
        by_dist[d.unsigned_abs() as usize] += p;
    }
    let mut acc = 0.0;
    let r = by_dist
        .iter()
        .position(|p| {
            acc += p;
            acc >= 0.99
        })
        .unwrap_or(by_dist.len() - 1);
    (r as i64, m2.sqrt())
}

fn c13_negative_controls() -> Result<String> {
    let lat = chain();
    let coins = CoinAssignment::with_u2_rims(dft(4)?, CoinParamsU2::new(FRAC_PI_4, PI, 0.0, 0.0));
    let w = WalkOperator::new(lat.clone(), GaugeField::dc_single_edge(0.5), &coins)?;
    let mut b_min = f64::INFINITY;
    for slot in 0..4 {
        let ar = arnoldi(&w, &hub_state(&lat, slot), 16, 1e-13)?;
        ensure!(ar.b.len() >= 16, "Krylov space closed after {} steps", ar.b.len());
        b_min = (1..=16).map(|n| ar.relative_b(n)).fold(b_min, f64::min);
    }
    ensure!(b_min > 1e-8, "dft(4) relative b_n drops to {b_min:.3e}");

    let mut rng = StdRng::seed_from_u64(13);
    let p = rim(&mut rng);
    let big = FiniteLattice::chain(420, Boundary::Open)?;
    let c0 = big.center()[0];
    let w = WalkOperator::new(
        big.clone(),
        GaugeField::dc_single_edge(0.5 + p.omega / TAU + 0.1),
        &CoinAssignment::with_u2_rims(g4(), p),
    )?;
    let mut marks = HashMap::new();
    evolve_with(&w, &hub_state(&big, 0), 200, |t, psi| {
        if t == 50 || t == 100 || t == 200 {
            marks.insert(t, spread(&big, psi, c0));
        }
    });
    let (r100, s100) = marks[&100];
    let (r200, s200) = marks[&200];
    let (r50, _) = marks[&50];
    let ratio = s200 / s100;
    ensure!((1.8..=2.2).contains(&ratio), "RMS spread ratio {ratio:.3} is not ballistic");
    let growth = r200 as f64 / r100 as f64;
    ensure!(
        r50 < r100 && (1.8..=2.2).contains(&growth),
        "99% radius {r50}, {r100}, {r200} does not grow linearly"
    );
    Ok(format!(
        "dft(4) min b_n {b_min:.2e}; detuned 99% radius {r50}/{r100}/{r200} at T = 50/100/200, RMS ratio {ratio:.2}"
    ))
}

fn run_recipe(bin: &str, recipe: &Path, threads: usize, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(recipe)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let cmd = v["command"].as_str().context("recipe without command")?;
    let status = Proc::new(bin)
        .args([cmd, "--config"])
        .arg(recipe)
        .args(["--threads", &threads.to_string(), "--out"])
        .arg(out)
        .output()?;
    ensure!(
        status.status.success(),
        "{} failed: {}",
        recipe.display(),
        String::from_utf8_lossy(&status.stderr)
    );
    Ok(())
}

fn c14_determinism() -> Result<String> {
    let bin = env!("CARGO_BIN_EXE_qwcage");
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../recipes");
    let mut recipes: Vec<_> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    recipes.sort();
    ensure!(recipes.len() >= 11, "only {} recipes", recipes.len());
    let tmp = tempfile::tempdir()?;
    let mut files = 0;
    for r in &recipes {
        let stem = r.file_stem().expect("file").to_string_lossy().into_owned();
        let mut outputs = Vec::new();
        for (run, threads) in [1usize, 3].into_iter().enumerate() {
            let d = tmp.path().join(format!("{stem}-{run}"));
            std::fs::create_dir(&d)?;
            run_recipe(bin, r, threads, &d.join(format!("{stem}.out")))?;
            let mut names: Vec<_> = std::fs::read_dir(&d)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
            names.sort();
            let contents: Vec<(String, Vec<u8>)> = names
                .iter()
                .map(|p| Ok((p.file_name().expect("file").to_string_lossy().into_owned(), std::fs::read(p)?)))
                .collect::<Result<_>>()?;
            outputs.push(contents);
        }
        ensure!(outputs[0] == outputs[1], "{stem}: outputs differ between 1 and 3 threads");
        files += outputs[0].len();
    }
    Ok(format!("{} recipes, {files} files identical at 1 and 3 threads", recipes.len()))
}

type Criterion = (&'static str, fn() -> Result<String>);

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [Criterion; 14] = [
        ("band equivalence", c1_band_equivalence),
        ("flat bands", c2_flat_bands),
        ("DC critical flux", c3_dc_critical_flux),
        ("H4 pinch", c4_h4_pinch),
        ("T3 caging", c5_t3_caging),
        ("tuned T3 critical flux", c6_tuned_t3),
        ("period catalogue", c7_periods),
        ("commensurate angle search", c8_appendix_e),
        ("spectral symmetries", c9_symmetries),
        ("cage geometry", c10_cage_geometry),
        ("superlattice cages", c11_superlattices),
        ("W^2 sub-blocks", c12_w2_blocks),
        ("negative controls", c13_negative_controls),
        ("determinism", c14_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|x| x == &id.to_string()) {
            continue;
        }
        let t0 = Instant::now();
        let result = f();
        let dt = t0.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} [{dt:.1} s]"),
            Err(e) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {e:#} [{dt:.1} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
