//! Rational angles α = πp1/q1 for which acos((2 + cos α)/3) = πp2/q2.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::gcd;

const MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommensurateAngle {
    pub p1: i64,
    pub q1: i64,
    pub p2: i64,
    pub q2: i64,
    pub alpha: f64,
    /// 4·lcm(q1, q2).
    pub period: i64,
    /// α = 0, where the walk is trivially periodic.
    pub trivial: bool,
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

/// Exhaustive scan over α ∈ [0, π] with q1 ≤ `q1_max`, matching the
/// smallest q2 ≤ `q2_max`.
pub fn appendix_e_search(q1_max: i64, q2_max: i64) -> Result<Vec<CommensurateAngle>> {
    if q1_max < 1 || q2_max < 1 {
        return Err(Error::InvalidArgument(format!(
            "bounds must be >= 1, got ({q1_max}, {q2_max})"
        )));
    }
    let mut out = Vec::new();
    for q1 in 1..=q1_max {
        for p1 in 0..=q1 {
            if gcd(p1, q1) != 1 {
                continue;
            }
            let alpha = PI * p1 as f64 / q1 as f64;
            let target = ((2.0 + alpha.cos()) / 3.0).clamp(-1.0, 1.0).acos();
            for q2 in 1..=q2_max {
                let p2 = (target / PI * q2 as f64).round() as i64;
                if gcd(p2, q2) != 1 {
                    continue;
                }
                if (target - PI * p2 as f64 / q2 as f64).abs() < MATCH_TOL {
                    out.push(CommensurateAngle {
                        p1,
                        q1,
                        p2,
                        q2,
                        alpha,
                        period: 4 * lcm(q1, q2),
                        trivial: p1 == 0,
                    });
                    break;
                }
            }
        }
    }
    Ok(out)
}
