//! Angles on the circle: principal values and multiset comparison mod 2π.

use std::f64::consts::{PI, TAU};

/// Principal value in (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    // rem_euclid can return exactly TAU for tiny negative inputs
    if y <= -PI {
        y += TAU;
    }
    y
}

/// Sorted principal values.
pub fn sorted_phases(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().map(wrap_phase).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Bottleneck distance between two multisets of angles under the circular
/// metric |wrap(a − b)|. On the circle an optimal bottleneck matching pairs
/// the sorted lists up to a cyclic shift, so every shift is tried.
///
/// Returns `f64::INFINITY` when the sizes differ.
pub fn circular_multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let a = sorted_phases(a.iter().copied());
    let b = sorted_phases(b.iter().copied());
    let n = a.len();
    let mut best = f64::INFINITY;
    for shift in 0..n {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let d = wrap_phase(a[(i + shift) % n] - b[i]).abs();
            if d > worst {
                worst = d;
                if worst >= best {
                    break;
                }
            }
        }
        best = best.min(worst);
    }
    best
}

/// Largest circular deviation among a set of angles from their first member.
pub fn circular_spread(values: &[f64]) -> f64 {
    match values.first() {
        None => 0.0,
        Some(&v0) => {
            let devs: Vec<f64> = values.iter().map(|&v| wrap_phase(v - v0)).collect();
            let lo = devs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = devs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        }
    }
}
