//! Diamond chains with mixed H4/G4 hub coins: the right/left (RL) basis,
//! the transmitted part of one diamond crossing, and cage wall rules.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coins::{grover, hadamard, identity, u2, CoinAssignment, CoinMatrix, CoinParamsU2};
use crate::error::{Error, Result};
use crate::lattice::{BasisState, Boundary, FiniteLattice, GaugeField, Site, SiteKind};
use crate::linalg::{CMatrix, CsrMatrix};
use crate::walk::{evolve_with, StateVector, WalkOperator};

const AMP_EPS: f64 = 1e-12;
const WALL_PROB: f64 = 1e-12;
const LEAK_TOL: f64 = 1e-9;
pub const DEFAULT_STEPS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RlState {
    #[serde(rename = "R+")]
    RPlus,
    #[serde(rename = "R-")]
    RMinus,
    #[serde(rename = "L+")]
    LPlus,
    #[serde(rename = "L-")]
    LMinus,
}

impl RlState {
    pub const ALL: [RlState; 4] = [RlState::RPlus, RlState::RMinus, RlState::LPlus, RlState::LMinus];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RlState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RlState::RPlus => "R+",
            RlState::RMinus => "R-",
            RlState::LPlus => "L+",
            RlState::LMinus => "L-",
        })
    }
}

/// Columns |R+⟩, |R−⟩, |L+⟩, |L−⟩ in hub-slot order (ru, lu, ld, rd).
pub fn rl_transform() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    CMatrix::from_real_rows(&[
        vec![s, s, 0.0, 0.0],
        vec![0.0, 0.0, s, s],
        vec![0.0, 0.0, s, -s],
        vec![s, -s, 0.0, 0.0],
    ])
}

fn rl_vector(s: RlState) -> Vec<Complex64> {
    let t = rl_transform();
    (0..4).map(|i| t[(i, s.index())]).collect()
}

fn rl_components(v: &[Complex64]) -> Vec<(RlState, Complex64)> {
    let t = rl_transform();
    RlState::ALL
        .iter()
        .map(|&s| {
            let c: Complex64 = (0..4).map(|i| t[(i, s.index())].conj() * v[i]).sum();
            (s, c)
        })
        .filter(|(_, c)| c.norm() > AMP_EPS)
        .collect()
}

/// If `coin`|s⟩ is proportional to a single RL state, that state and the factor.
pub fn rl_image(coin: &CoinMatrix, s: RlState) -> Option<(RlState, Complex64)> {
    let v = coin.matrix().matvec(&rl_vector(s));
    match rl_components(&v).as_slice() {
        [one] => Some(*one),
        _ => None,
    }
}

/// `rl_image` for every RL state.
pub fn rl_action(coin: &CoinMatrix) -> Vec<(RlState, Option<(RlState, Complex64)>)> {
    RlState::ALL.iter().map(|&s| (s, rl_image(coin, s))).collect()
}

/// One transmitted component: RL state on the hub `dcell` cells away.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KOutTerm {
    pub to: RlState,
    pub dcell: i64,
    pub re: f64,
    pub im: f64,
}

impl KOutTerm {
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KOutEntry {
    pub from: RlState,
    pub terms: Vec<KOutTerm>,
}

impl KOutEntry {
    /// The image when it is a single RL state on a single neighbour.
    pub fn single(&self) -> Option<(RlState, i64)> {
        match self.terms.as_slice() {
            [t] => Some((t.to, t.dcell)),
            _ => None,
        }
    }
}

/// Transmitted part of S·C_rim·S for rims `U2(θ, φ, 0, β)`, `U2(θ, φ, ω, β)`.
pub fn k_out_action(rim: CoinParamsU2, f: f64) -> Result<Vec<KOutEntry>> {
    k_out_action_with(&u2(rim.with_omega(0.0)), &u2(rim), f)
}

pub fn k_out_action_with(rim_b: &CoinMatrix, rim_c: &CoinMatrix, f: f64) -> Result<Vec<KOutEntry>> {
    let lat = FiniteLattice::chain(3, Boundary::Open)?;
    let gauge = GaugeField::dc_single_edge(f);
    let s = crate::walk::shift_operator(&lat, &gauge)?;
    let coins = CoinAssignment::new(identity(4), rim_b.clone(), rim_c.clone());
    let c = crate::coins::assemble_coin_operator(&coins, &lat)?;
    let k: CsrMatrix = s.matmul(&c).matmul(&s);
    let hub = |cell: i64, slot: usize| {
        lat.index_of(&BasisState::new([cell, 0], SiteKind::HubA, slot))
            .expect("hub on 3-cell chain")
    };
    let mut out = Vec::with_capacity(4);
    let mut largest: f64 = 0.0;
    for from in RlState::ALL {
        let v = rl_vector(from);
        let mut terms = Vec::new();
        for dcell in [-1i64, 1] {
            let image: Vec<Complex64> = (0..4)
                .map(|i| (0..4).map(|j| k.get(hub(1 + dcell, i), hub(1, j)) * v[j]).sum())
                .collect();
            for (to, a) in rl_components(&image) {
                largest = largest.max(a.norm());
                terms.push(KOutTerm {
                    to,
                    dcell,
                    re: a.re,
                    im: a.im,
                });
            }
        }
        out.push(KOutEntry { from, terms });
    }
    if largest < AMP_EPS {
        return Err(Error::NoOutChannel);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum HubCoin {
    H,
    G,
}

impl HubCoin {
    pub fn coin(self) -> CoinMatrix {
        match self {
            HubCoin::H => hadamard(4).expect("H4"),
            HubCoin::G => grover(4).expect("G4"),
        }
    }

    pub fn letter(self) -> char {
        match self {
            HubCoin::H => 'H',
            HubCoin::G => 'G',
        }
    }
}

/// A hub coin per chain cell, written as e.g. `HHHHGHHHHG`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Layout(pub Vec<HubCoin>);

impl Layout {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, n: i64) -> Option<HubCoin> {
        usize::try_from(n).ok().and_then(|i| self.0.get(i).copied())
    }

    /// `base` everywhere except every `period`-th cell from `phase`.
    pub fn periodic(len: usize, base: HubCoin, insert: HubCoin, period: usize, phase: usize) -> Self {
        Layout(
            (0..len)
                .map(|n| if n % period == phase % period { insert } else { base })
                .collect(),
        )
    }

    pub fn uniform(len: usize, coin: HubCoin) -> Self {
        Layout(vec![coin; len])
    }
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'H' => Ok(HubCoin::H),
                'G' => Ok(HubCoin::G),
                other => Err(Error::Parse(format!("layout character `{other}` is not H or G"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if v.len() < 3 {
            return Err(Error::Parse(format!("layout needs at least 3 cells, got {}", v.len())));
        }
        Ok(Layout(v))
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{}", c.letter())?;
        }
        Ok(())
    }
}

impl Serialize for Layout {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Outermost hub cells reached; `None` marks an unbounded side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Walls {
    pub left: Option<i64>,
    pub right: Option<i64>,
}

/// The flux section (0 or 1/2) whose rules apply, and its substitution coin.
fn section(f: f64) -> (f64, HubCoin) {
    if (f - 0.5).abs() < (f - 0.0).abs() {
        (0.5, HubCoin::G)
    } else {
        (0.0, HubCoin::H)
    }
}

fn hub_walls(layout: &Layout, n0: i64, sub: HubCoin) -> Walls {
    let n = layout.len() as i64;
    let right = (n0 + 1..n).find(|&m| layout.get(m) == Some(sub)).map(|m| m + 1);
    let left = (0..=n0 - 2).rev().find(|&m| layout.get(m) == Some(sub));
    Walls { left, right }
}

/// Wall cells from the three rules; flux values other than 0 and 1/2 use
/// the rules of the nearer one. A rim in cell n feeds the left rule from
/// hub n + 1 and the right rule from hub n.
pub fn predict_superlattice_cage(layout: &Layout, init: Site, f: f64) -> Result<Walls> {
    let n = init.cell[0];
    if n < 0 || n >= layout.len() as i64 {
        return Err(Error::InvalidArgument(format!("initial cell {n} outside layout")));
    }
    let (_, sub) = section(f);
    Ok(match init.kind {
        SiteKind::HubA => hub_walls(layout, n, sub),
        _ => Walls {
            left: hub_walls(layout, n + 1, sub).left,
            right: hub_walls(layout, n, sub).right,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperlatticeVerdict {
    pub init: Site,
    pub predicted: Walls,
    /// Leftmost and rightmost hub cells with probability above 1e-12.
    pub measured: (i64, i64),
    /// Largest probability outside the predicted region.
    pub leak: f64,
    pub caged: bool,
    pub agrees: bool,
}

/// A generic internal state with no special RL structure.
pub fn generic_site_amplitudes(kind: SiteKind) -> Vec<Complex64> {
    let c = Complex64::new;
    match kind {
        SiteKind::HubA => vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.5, 0.0), c(0.7, 0.3)],
        _ => vec![c(1.0, 0.0), c(0.5, -1.0)],
    }
}

pub fn superlattice_walk(layout: &Layout, f: f64, rim: CoinParamsU2) -> Result<WalkOperator> {
    let lat = FiniteLattice::chain(layout.len() as i64, Boundary::Open)?;
    let mut coins = CoinAssignment::with_u2_rims(HubCoin::H.coin(), rim);
    for (n, c) in layout.0.iter().enumerate() {
        if *c != HubCoin::H {
            coins = coins.with_hub_override([n as i64, 0], c.coin());
        }
    }
    WalkOperator::new(lat, GaugeField::dc_single_edge(f), &coins)
}

/// H2 rims.
pub fn default_rim() -> CoinParamsU2 {
    CoinParamsU2::new(std::f64::consts::FRAC_PI_4, std::f64::consts::PI, 0.0, 0.0)
}

pub fn verify_superlattice_cage(layout: &Layout, init: Site, f: f64, steps: usize) -> Result<SuperlatticeVerdict> {
    verify_superlattice_cage_with(layout, init, f, steps, default_rim())
}

/// Brute-force evolution from a generic state on `init`. Bounded walls must
/// be reached exactly with no leak past them; unbounded sides must reach
/// the chain ends.
pub fn verify_superlattice_cage_with(
    layout: &Layout,
    init: Site,
    f: f64,
    steps: usize,
    rim: CoinParamsU2,
) -> Result<SuperlatticeVerdict> {
    let predicted = predict_superlattice_cage(layout, init, f)?;
    let last = layout.len() as i64 - 1;
    let interior = |w: Option<i64>| w.is_none_or(|c| c > 0 && c < last);
    if !interior(predicted.left) || !interior(predicted.right) {
        return Err(Error::LatticeTooSmall(format!(
            "predicted walls {predicted:?} are not interior to {} cells",
            layout.len()
        )));
    }
    let w = superlattice_walk(layout, f, rim)?;
    let lat = w.lattice().clone();
    let psi0 = StateVector::on_site(&lat, init, &generic_site_amplitudes(init.kind))?;
    let lo = predicted.left.unwrap_or(0);
    let hi = predicted.right.unwrap_or(last);
    let states: Vec<BasisState> = lat.basis();
    let mut seen_lo = i64::MAX;
    let mut seen_hi = i64::MIN;
    let mut leak: f64 = 0.0;
    evolve_with(&w, &psi0, steps, |_, psi| {
        let mut outside = 0.0;
        let mut hub_prob = vec![0.0; layout.len()];
        for (s, a) in states.iter().zip(&psi.amps) {
            let p = a.norm_sqr();
            let c = s.cell[0];
            let allowed = if s.kind.is_hub() {
                hub_prob[c as usize] += p;
                (lo..=hi).contains(&c)
            } else {
                (lo..hi).contains(&c)
            };
            if !allowed {
                outside += p;
            }
        }
        for (c, &p) in hub_prob.iter().enumerate() {
            if p > WALL_PROB {
                seen_lo = seen_lo.min(c as i64);
                seen_hi = seen_hi.max(c as i64);
            }
        }
        leak = leak.max(outside);
    });
    let left_ok = match predicted.left {
        Some(l) => seen_lo == l,
        None => seen_lo == 0,
    };
    let right_ok = match predicted.right {
        Some(r) => seen_hi == r,
        None => seen_hi == last,
    };
    let bounded = predicted.left.is_some() && predicted.right.is_some();
    let agrees = left_ok && right_ok && (leak < LEAK_TOL || !bounded);
    Ok(SuperlatticeVerdict {
        init,
        predicted,
        measured: (seen_lo, seen_hi),
        leak,
        caged: bounded && leak < LEAK_TOL,
        agrees,
    })
}

/// A labelled coin sequence around the initial hub that walls in a cage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceCase {
    pub f: f64,
    pub sequence: String,
    pub layout: Layout,
    pub n0: i64,
}

/// Each sequence lists the coins at distance 1, 2, 3 on both sides of n0;
/// the rest of the chain holds the section's base coin. Both coins are
/// tried on n0.
pub fn cage_sequence_cases(len: usize) -> Vec<SequenceCase> {
    use HubCoin::{G, H};
    let sections: [(f64, HubCoin, &[&[HubCoin]]); 2] = [
        (0.5, H, &[&[G, G], &[H, G, H], &[H, G, G], &[G, H, G]]),
        (0.0, G, &[&[H, H], &[H, G, H], &[G, H, G], &[G, H, H]]),
    ];
    let n0 = (len / 2) as i64;
    let mut out = Vec::new();
    for (f, base, seqs) in sections {
        for seq in seqs {
            for centre in [H, G] {
                let mut v = vec![base; len];
                // uniform sequences keep the same coin beyond distance 2
                if seq.iter().all(|&c| c == seq[0]) {
                    v = vec![seq[0]; len];
                }
                v[n0 as usize] = centre;
                for (d, &c) in seq.iter().enumerate() {
                    let d = d as i64 + 1;
                    v[(n0 - d) as usize] = c;
                    v[(n0 + d) as usize] = c;
                }
                out.push(SequenceCase {
                    f,
                    sequence: seq.iter().map(|c| format!("{}4", c.letter())).collect::<Vec<_>>().join(" "),
                    layout: Layout(v),
                    n0,
                });
            }
        }
    }
    out
}

/// Periodic insertions (periods 2..=8, every phase) at f = 1/2 and 0, with
/// initial hubs and rims across the middle third of a `len`-cell chain.
pub fn superlattice_corpus(len: usize) -> Vec<(f64, Layout, Site)> {
    let mut out = Vec::new();
    let (a, b) = (len as i64 / 3, 2 * len as i64 / 3);
    for (f, base, insert) in [(0.5, HubCoin::H, HubCoin::G), (0.0, HubCoin::G, HubCoin::H)] {
        for period in 2..=8 {
            for phase in 0..period {
                let layout = Layout::periodic(len, base, insert, period, phase);
                for n0 in a..b {
                    for kind in SiteKind::ALL {
                        out.push((f, layout.clone(), Site { cell: [n0, 0], kind }));
                    }
                }
            }
        }
    }
    out
}

/// Verifies every corpus entry in parallel; results keep corpus order.
pub fn verify_corpus(corpus: &[(f64, Layout, Site)], steps: usize) -> Result<Vec<SuperlatticeVerdict>> {
    corpus
        .par_iter()
        .map(|(f, layout, site)| verify_superlattice_cage(layout, *site, *f, steps))
        .collect()
}
