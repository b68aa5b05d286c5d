//! Quasi-energy spectra swept over flux, and pinch detection.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bloch::{bloch_block_dc, bloch_block_t3_landau, rational_approximation};
use super::quasi::quasi_energies_fast;
use crate::coins::CoinAssignment;
use crate::error::{Error, Result};
use crate::lattice::{gcd, Graph};
use crate::linalg::wrap_phase;

/// Below this summed band width a flux counts as pinched.
pub const PINCH_TOL: f64 = 1e-6;

/// Largest denominator accepted when a real T3 flux is read as p/q.
const T3_MAX_DENOMINATOR: i64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FluxSampling {
    /// `n` points `start + i·(end − start)/n`, end excluded.
    Grid { start: f64, end: f64, n: usize },
    Values { values: Vec<f64> },
    /// Every p/q in [0, 1) with q ≤ q_max.
    Rationals { q_max: i64 },
}

impl FluxSampling {
    /// Flux values with their p/q form when known.
    pub fn points(&self) -> Result<Vec<(f64, Option<(i64, i64)>)>> {
        let pts: Vec<(f64, Option<(i64, i64)>)> = match self {
            FluxSampling::Grid { start, end, n } => (0..*n)
                .map(|i| (start + (end - start) * i as f64 / *n as f64, None))
                .collect(),
            FluxSampling::Values { values } => values.iter().map(|&v| (v, None)).collect(),
            FluxSampling::Rationals { q_max } => {
                if *q_max < 1 {
                    return Err(Error::InvalidArgument(format!("q_max must be >= 1, got {q_max}")));
                }
                let mut v: Vec<(i64, i64)> = (1..=*q_max)
                    .flat_map(|q| (0..q).filter(move |&p| gcd(p, q) == 1).map(move |p| (p, q)))
                    .collect();
                v.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
                v.into_iter().map(|(p, q)| (p as f64 / q as f64, Some((p, q)))).collect()
            }
        };
        if pts.is_empty() {
            return Err(Error::InvalidArgument("empty flux sampling".into()));
        }
        Ok(pts)
    }
}

/// All spectra at one flux.
#[derive(Debug, Clone, Serialize)]
pub struct FluxSlice {
    pub f: f64,
    pub rational: Option<(i64, i64)>,
    pub k: Vec<Vec<f64>>,
    pub spectra: Vec<Vec<f64>>,
    /// Sum over bands of their spread across the k samples.
    pub width: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Butterfly {
    pub graph: Graph,
    pub k_samples: usize,
    pub slices: Vec<FluxSlice>,
}

/// Sum over bands of (max_k ε − min_k ε), bands matched to the first
/// spectrum by the best cyclic alignment.
pub fn band_width(spectra: &[Vec<f64>]) -> f64 {
    let Some(reference) = spectra.first() else {
        return 0.0;
    };
    let n = reference.len();
    let mut lo = vec![0.0f64; n];
    let mut hi = vec![0.0f64; n];
    for s in spectra {
        let mut best = (f64::INFINITY, 0usize);
        for shift in 0..n {
            let worst = (0..n)
                .map(|i| wrap_phase(s[(i + shift) % n] - reference[i]).abs())
                .fold(0.0, f64::max);
            if worst < best.0 {
                best = (worst, shift);
            }
        }
        for i in 0..n {
            let d = wrap_phase(s[(i + best.1) % n] - reference[i]);
            lo[i] = lo[i].min(d);
            hi[i] = hi[i].max(d);
        }
    }
    lo.iter().zip(&hi).map(|(a, b)| b - a).sum()
}

fn k_points(graph: Graph, k_samples: usize) -> Vec<Vec<f64>> {
    match graph {
        Graph::DiamondChain => (0..k_samples)
            .map(|i| vec![-PI + TAU * i as f64 / k_samples as f64])
            .collect(),
        // R2 low-discrepancy points. Points of a regular grid differ by
        // rational fractions of 2π and get mapped onto each other by
        // magnetic translations, which fakes k-independence at even q.
        Graph::Dice => {
            let g = 1.324_717_957_244_746_f64;
            let (a1, a2) = (1.0 / g, 1.0 / (g * g));
            (0..k_samples)
                .map(|i| {
                    let t = i as f64;
                    vec![-PI + TAU * (0.5 + t * a1).fract(), -PI + TAU * (0.5 + t * a2).fract()]
                })
                .collect()
        }
    }
}

/// Spectrum of one block at (f, k).
pub fn spectrum_at(
    graph: Graph,
    coins: &CoinAssignment,
    f: f64,
    rational: Option<(i64, i64)>,
    k: &[f64],
) -> Result<Vec<f64>> {
    let block = match graph {
        Graph::DiamondChain => bloch_block_dc(coins, f, k[0])?,
        Graph::Dice => {
            let (p, q) = match rational {
                Some(pq) => pq,
                None => rational_approximation(f, T3_MAX_DENOMINATOR, 1e-12).ok_or_else(|| {
                    Error::InvalidArgument(format!("T3 flux {f} is not p/q with q <= {T3_MAX_DENOMINATOR}"))
                })?,
            };
            bloch_block_t3_landau(coins, p, q, k[0], k[1])?
        }
    };
    Ok(quasi_energies_fast(&block)?.values)
}

/// Sweeps the flux sampling; k samples per flux are evenly spaced on the
/// diamond chain and follow an R2 sequence on T3.
pub fn butterfly(graph: Graph, coins: &CoinAssignment, flux: &FluxSampling, k_samples: usize) -> Result<Butterfly> {
    coins.validate(graph)?;
    if k_samples == 0 {
        return Err(Error::InvalidArgument("k_samples must be >= 1".into()));
    }
    let fluxes = flux.points()?;
    let ks = k_points(graph, k_samples);
    let jobs: Vec<(usize, usize)> = (0..fluxes.len())
        .flat_map(|i| (0..ks.len()).map(move |j| (i, j)))
        .collect();
    let spectra: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(i, j)| spectrum_at(graph, coins, fluxes[i].0, fluxes[i].1, &ks[j]))
        .collect::<Result<_>>()?;
    let slices = fluxes
        .iter()
        .enumerate()
        .map(|(i, &(f, rational))| {
            let sp: Vec<Vec<f64>> = spectra[i * ks.len()..(i + 1) * ks.len()].to_vec();
            FluxSlice {
                f,
                rational,
                k: ks.clone(),
                width: band_width(&sp),
                spectra: sp,
            }
        })
        .collect();
    Ok(Butterfly {
        graph,
        k_samples,
        slices,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinchReport {
    /// Flux with the smallest summed band width.
    pub f_star: f64,
    pub width: f64,
    pub pinched: bool,
}

impl Butterfly {
    pub fn pinch(&self) -> PinchReport {
        let best = self
            .slices
            .iter()
            .min_by(|a, b| a.width.total_cmp(&b.width))
            .expect("butterflies are never empty");
        PinchReport {
            f_star: best.f,
            width: best.width,
            pinched: best.width < PINCH_TOL,
        }
    }

    /// Every sampled flux whose bands are pinched.
    pub fn pinched_fluxes(&self) -> Vec<f64> {
        self.slices
            .iter()
            .filter(|s| s.width < PINCH_TOL)
            .map(|s| s.f)
            .collect()
    }

    /// Largest distance between a spectrum and its image under ε → ε + π.
    pub fn energy_translation_residual(&self) -> f64 {
        self.slices
            .iter()
            .flat_map(|s| s.spectra.iter())
            .map(|sp| {
                let shifted: Vec<f64> = sp.iter().map(|e| e + PI).collect();
                crate::linalg::circular_multiset_distance(sp, &shifted)
            })
            .fold(0.0, f64::max)
    }

    pub fn point_count(&self) -> usize {
        self.slices.iter().map(|s| s.spectra.iter().map(Vec::len).sum::<usize>()).sum()
    }

    /// `f,k,epsilon` rows; T3 rows aggregate over k and leave it blank.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("f,k,epsilon\n");
        for slice in &self.slices {
            for (k, sp) in slice.k.iter().zip(&slice.spectra) {
                let klabel = match self.graph {
                    Graph::DiamondChain => format!("{:.12}", k[0]),
                    Graph::Dice => String::new(),
                };
                for e in sp {
                    let _ = writeln!(s, "{:.12},{},{:.12}", slice.f, klabel, e);
                }
            }
        }
        s
    }
}
