//! Diamond chain and T3 (dice) graphs, their basis of (vertex, directed edge)
//! states, and gauge fields carrying Peierls phases.
//!
//! # Conventions
//!
//! A unit cell holds one hub `A` and two rims `B`, `C`. Cells carry two
//! integer coordinates; the diamond chain only uses the first.
//!
//! Diamond chain. Hub slots: 0 right-up, 1 left-up, 2 left-down, 3
//! right-down. Rim slots: 0 right, 1 left. `B` is the lower rim, `C` the
//! upper one, both sitting between hub `n` and hub `n + 1`.
//!
//! T3. Lattice vectors `a1 = (√3, 0)`, `a2 = (√3/2, 3/2)`. With `A_R` at
//! `n1·a1 + n2·a2`, `B_R = A_R + (0, 1)` and `C_R = A_R − (0, 1)`. Hub slots
//! run anticlockwise from the 30° edge. `C` slots run anticlockwise from
//! 330° (330°, 90°, 210°); `B` slots are numbered clockwise (30°, 270°,
//! 150°). The handedness of the rim numbering matters once a rim coin is not
//! permutation symmetric.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Cell = [i64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Graph {
    #[serde(rename = "dc")]
    DiamondChain,
    #[serde(rename = "t3")]
    Dice,
}

impl Graph {
    pub fn coordination(self, kind: SiteKind) -> usize {
        match (self, kind) {
            (Graph::DiamondChain, SiteKind::HubA) => 4,
            (Graph::DiamondChain, _) => 2,
            (Graph::Dice, SiteKind::HubA) => 6,
            (Graph::Dice, _) => 3,
        }
    }

    pub fn states_per_cell(self) -> usize {
        SiteKind::ALL.iter().map(|&k| self.coordination(k)).sum()
    }

    /// Offset of the first slot of `kind` inside a cell.
    pub fn kind_offset(self, kind: SiteKind) -> usize {
        match kind {
            SiteKind::HubA => 0,
            SiteKind::RimB => self.coordination(SiteKind::HubA),
            SiteKind::RimC => self.coordination(SiteKind::HubA) + self.coordination(SiteKind::RimB),
        }
    }

    /// (kind, slot) of an index inside one cell.
    pub fn local_state(self, local: usize) -> (SiteKind, usize) {
        let hub = self.coordination(SiteKind::HubA);
        let rim = self.coordination(SiteKind::RimB);
        if local < hub {
            (SiteKind::HubA, local)
        } else if local < hub + rim {
            (SiteKind::RimB, local - hub)
        } else {
            (SiteKind::RimC, local - hub - rim)
        }
    }

    /// Hub-slot edge table; one entry per undirected edge of a cell.
    pub fn edges(self) -> &'static [Edge] {
        match self {
            Graph::DiamondChain => &DC_EDGES,
            Graph::Dice => &T3_EDGES,
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            Graph::DiamondChain => 1,
            Graph::Dice => 2,
        }
    }

    pub fn plaquettes_per_cell(self) -> usize {
        match self {
            Graph::DiamondChain => 1,
            Graph::Dice => 3,
        }
    }

    /// Edge entry reached from a rim state.
    pub fn rim_edge(self, kind: SiteKind, slot: usize) -> Option<&'static Edge> {
        self.edges()
            .iter()
            .find(|e| e.rim_kind == kind && e.rim_slot == slot)
    }

    /// Partner state across the edge on the infinite graph.
    pub fn partner(self, s: &BasisState) -> Result<BasisState> {
        if s.slot >= self.coordination(s.kind) {
            return Err(Error::DanglingEdge(s.to_string()));
        }
        Ok(match s.kind {
            SiteKind::HubA => {
                let e = &self.edges()[s.slot];
                BasisState::new(add(s.cell, e.offset), e.rim_kind, e.rim_slot)
            }
            _ => {
                let e = self
                    .rim_edge(s.kind, s.slot)
                    .ok_or_else(|| Error::DanglingEdge(s.to_string()))?;
                BasisState::new(sub(s.cell, e.offset), SiteKind::HubA, e.hub_slot)
            }
        })
    }

    /// Site position in fractional lattice coordinates.
    pub fn fractional_position(self, cell: Cell, kind: SiteKind) -> [f64; 2] {
        let (x, y) = (cell[0] as f64, cell[1] as f64);
        match (self, kind) {
            (_, SiteKind::HubA) => [x, y],
            (Graph::DiamondChain, _) => [x + 0.5, y],
            (Graph::Dice, SiteKind::RimB) => [x - 1.0 / 3.0, y + 2.0 / 3.0],
            (Graph::Dice, SiteKind::RimC) => [x + 1.0 / 3.0, y - 2.0 / 3.0],
        }
    }

    /// Cartesian position (lattice spacing 1 between hub and rim for T3).
    pub fn cartesian_position(self, cell: Cell, kind: SiteKind) -> [f64; 2] {
        match self {
            Graph::DiamondChain => {
                let x = cell[0] as f64;
                match kind {
                    SiteKind::HubA => [x, 0.0],
                    SiteKind::RimB => [x + 0.5, -0.5],
                    SiteKind::RimC => [x + 0.5, 0.5],
                }
            }
            Graph::Dice => {
                let [s1, s2] = self.fractional_position(cell, kind);
                [3f64.sqrt() * (s1 + 0.5 * s2), 1.5 * s2]
            }
        }
    }

    /// Distance in unit cells between two cells.
    pub fn cell_distance(self, a: Cell, b: Cell) -> i64 {
        let d = sub(a, b);
        match self {
            Graph::DiamondChain => d[0].abs(),
            Graph::Dice => d[0].abs().max(d[1].abs()).max((d[0] + d[1]).abs()),
        }
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Graph::DiamondChain => "dc",
            Graph::Dice => "t3",
        })
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dc" | "diamond" => Ok(Graph::DiamondChain),
            "t3" | "dice" => Ok(Graph::Dice),
            other => Err(Error::Parse(format!("unknown graph `{other}`"))),
        }
    }
}

/// Hexagonal norm of a fractional-coordinate vector. Its unit ball is the
/// hexagon with corners at the six nearest hubs.
pub fn hex_norm(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs()).max((v[0] + v[1]).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SiteKind {
    #[serde(rename = "A")]
    HubA,
    #[serde(rename = "B")]
    RimB,
    #[serde(rename = "C")]
    RimC,
}

impl SiteKind {
    pub const ALL: [SiteKind; 3] = [SiteKind::HubA, SiteKind::RimB, SiteKind::RimC];

    pub fn is_hub(self) -> bool {
        self == SiteKind::HubA
    }

    pub fn letter(self) -> char {
        match self {
            SiteKind::HubA => 'A',
            SiteKind::RimB => 'B',
            SiteKind::RimC => 'C',
        }
    }
}

impl FromStr for SiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(SiteKind::HubA),
            "B" | "b" => Ok(SiteKind::RimB),
            "C" | "c" => Ok(SiteKind::RimC),
            other => Err(Error::Parse(format!("unknown site kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState {
    pub cell: Cell,
    pub kind: SiteKind,
    pub slot: usize,
}

impl BasisState {
    pub fn new(cell: Cell, kind: SiteKind, slot: usize) -> Self {
        Self { cell, kind, slot }
    }

    pub fn site(&self) -> Site {
        Site {
            cell: self.cell,
            kind: self.kind,
        }
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.cell[0],
            self.cell[1],
            self.kind.letter(),
            self.slot
        )
    }
}

/// A vertex of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub cell: Cell,
    pub kind: SiteKind,
}

/// One undirected edge, seen from the hub of cell 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub hub_slot: usize,
    pub rim_kind: SiteKind,
    /// Cell of the rim relative to the hub.
    pub offset: Cell,
    pub rim_slot: usize,
}

const fn edge(hub_slot: usize, rim_kind: SiteKind, offset: Cell, rim_slot: usize) -> Edge {
    Edge {
        hub_slot,
        rim_kind,
        offset,
        rim_slot,
    }
}

static DC_EDGES: [Edge; 4] = [
    edge(0, SiteKind::RimC, [0, 0], 1),
    edge(1, SiteKind::RimC, [-1, 0], 0),
    edge(2, SiteKind::RimB, [-1, 0], 0),
    edge(3, SiteKind::RimB, [0, 0], 1),
];

static T3_EDGES: [Edge; 6] = [
    edge(0, SiteKind::RimC, [0, 1], 2),
    edge(1, SiteKind::RimB, [0, 0], 1),
    edge(2, SiteKind::RimC, [-1, 1], 0),
    edge(3, SiteKind::RimB, [0, -1], 0),
    edge(4, SiteKind::RimC, [0, 0], 1),
    edge(5, SiteKind::RimB, [1, -1], 2),
];

pub(crate) fn add(a: Cell, b: Cell) -> Cell {
    [a[0] + b[0], a[1] + b[1]]
}

pub(crate) fn sub(a: Cell, b: Cell) -> Cell {
    [a[0] - b[0], a[1] - b[1]]
}

/// Number of unit cells along each lattice direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extent {
    pub n1: usize,
    pub n2: usize,
}

impl Extent {
    pub fn new(n1: i64, n2: i64) -> Result<Self> {
        if n1 < 1 || n2 < 1 {
            return Err(Error::InvalidExtent(format!("{n1}x{n2}")));
        }
        Ok(Self {
            n1: n1 as usize,
            n2: n2 as usize,
        })
    }

    pub fn chain(n: i64) -> Result<Self> {
        Self::new(n, 1)
    }

    pub fn cells(&self) -> usize {
        self.n1 * self.n2
    }
}

/// Ordered basis: cell-major (second coordinate fastest), then A, B, C,
/// then slot.
pub fn enumerate_basis(graph: Graph, extent: Extent) -> Result<Vec<BasisState>> {
    if extent.n1 == 0 || extent.n2 == 0 {
        return Err(Error::InvalidExtent(format!("{}x{}", extent.n1, extent.n2)));
    }
    if graph == Graph::DiamondChain && extent.n2 != 1 {
        return Err(Error::InvalidExtent(format!(
            "diamond chain is one-dimensional, got {}x{}",
            extent.n1, extent.n2
        )));
    }
    let mut out = Vec::with_capacity(extent.cells() * graph.states_per_cell());
    for i in 0..extent.n1 as i64 {
        for j in 0..extent.n2 as i64 {
            for kind in SiteKind::ALL {
                for slot in 0..graph.coordination(kind) {
                    out.push(BasisState::new([i, j], kind, slot));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// A finite patch of the graph with cells `[0, n1) × [0, n2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLattice {
    graph: Graph,
    extent: Extent,
    boundary: Boundary,
}

/// An edge of a finite lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeEdge {
    pub hub: BasisState,
    pub rim: BasisState,
    /// Rim cell before periodic wrapping; equals `rim.cell` on open lattices.
    pub rim_unwrapped: Cell,
}

impl FiniteLattice {
    pub fn new(graph: Graph, extent: Extent, boundary: Boundary) -> Result<Self> {
        enumerate_basis(graph, Extent { n1: extent.n1, n2: extent.n2 }).map(|_| ())?;
        Ok(Self {
            graph,
            extent,
            boundary,
        })
    }

    pub fn chain(n: i64, boundary: Boundary) -> Result<Self> {
        Self::new(Graph::DiamondChain, Extent::chain(n)?, boundary)
    }

    pub fn plane(n1: i64, n2: i64, boundary: Boundary) -> Result<Self> {
        Self::new(Graph::Dice, Extent::new(n1, n2)?, boundary)
    }

    pub fn graph(&self) -> Graph {
        self.graph
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn dim(&self) -> usize {
        self.extent.cells() * self.graph.states_per_cell()
    }

    pub fn basis(&self) -> Vec<BasisState> {
        enumerate_basis(self.graph, self.extent).expect("validated at construction")
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let n2 = self.extent.n2 as i64;
        (0..self.extent.cells() as i64).map(move |c| [c / n2, c % n2])
    }

    /// Cell closest to the middle of the patch.
    pub fn center(&self) -> Cell {
        [(self.extent.n1 / 2) as i64, (self.extent.n2 / 2) as i64]
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell[0] >= 0
            && cell[1] >= 0
            && (cell[0] as usize) < self.extent.n1
            && (cell[1] as usize) < self.extent.n2
    }

    pub fn cell_index(&self, cell: Cell) -> Option<usize> {
        self.contains(cell)
            .then(|| cell[0] as usize * self.extent.n2 + cell[1] as usize)
    }

    pub fn index_of(&self, s: &BasisState) -> Option<usize> {
        if s.slot >= self.graph.coordination(s.kind) {
            return None;
        }
        let c = self.cell_index(s.cell)?;
        Some(c * self.graph.states_per_cell() + self.graph.kind_offset(s.kind) + s.slot)
    }

    pub fn state(&self, index: usize) -> BasisState {
        let per = self.graph.states_per_cell();
        let c = (index / per) as i64;
        let n2 = self.extent.n2 as i64;
        let (kind, slot) = self.graph.local_state(index % per);
        BasisState::new([c / n2, c % n2], kind, slot)
    }

    /// Maps a cell of the infinite graph onto the patch.
    pub fn wrap_cell(&self, cell: Cell) -> Option<Cell> {
        match self.boundary {
            Boundary::Open => self.contains(cell).then_some(cell),
            Boundary::Periodic => Some([
                cell[0].rem_euclid(self.extent.n1 as i64),
                cell[1].rem_euclid(self.extent.n2 as i64),
            ]),
        }
    }

    /// State on the other end of the same undirected edge.
    pub fn opposite(&self, s: &BasisState) -> Result<BasisState> {
        if self.index_of(s).is_none() {
            return Err(Error::DanglingEdge(format!("{s} is not on the lattice")));
        }
        let p = self.graph.partner(s)?;
        match self.wrap_cell(p.cell) {
            Some(cell) => Ok(BasisState { cell, ..p }),
            None => Err(Error::DanglingEdge(s.to_string())),
        }
    }

    pub fn is_dangling(&self, s: &BasisState) -> bool {
        self.opposite(s).is_err()
    }

    /// Every edge with both ends on the patch, keyed by its hub end.
    pub fn edges(&self) -> Vec<LatticeEdge> {
        let mut out = Vec::new();
        for cell in self.cells() {
            for e in self.graph.edges() {
                let raw = add(cell, e.offset);
                if let Some(rc) = self.wrap_cell(raw) {
                    out.push(LatticeEdge {
                        hub: BasisState::new(cell, SiteKind::HubA, e.hub_slot),
                        rim: BasisState::new(rc, e.rim_kind, e.rim_slot),
                        rim_unwrapped: raw,
                    });
                }
            }
        }
        out
    }

    /// Plaquettes whose four corners all lie on the patch (any plaquette
    /// anchored in the patch when periodic).
    pub fn plaquettes(&self) -> Vec<Plaquette> {
        let mut out = Vec::new();
        for cell in self.cells() {
            for index in 0..self.graph.plaquettes_per_cell() {
                let p = Plaquette { cell, index };
                let inside = p
                    .corners(self.graph)
                    .iter()
                    .all(|&(c, _)| self.wrap_cell(c).is_some());
                if inside {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// Plaquette anchored at a hub: the diamond between hubs `n` and `n + 1`
/// (diamond chain), or rhombus `index ∈ {0, 1, 2}` spanned by hub slots
/// `index` and `index + 1` (T3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plaquette {
    pub cell: Cell,
    pub index: usize,
}

impl Plaquette {
    /// The anticlockwise boundary as (hub cell, hub slot, sign): the walk
    /// goes hub→rim for sign +1 and rim→hub for sign −1.
    fn boundary(&self, graph: Graph) -> Result<[(Cell, usize, f64); 4]> {
        let c = self.cell;
        match graph {
            Graph::DiamondChain if self.index == 0 => {
                let next = add(c, [1, 0]);
                Ok([(c, 3, 1.0), (next, 2, -1.0), (next, 1, 1.0), (c, 0, -1.0)])
            }
            Graph::Dice if self.index < 3 => {
                let j = self.index;
                let d = [[0, 1], [-1, 1], [-1, 0]][j];
                let other = add(c, d);
                Ok([
                    (c, j, 1.0),
                    (other, (j + 4) % 6, -1.0),
                    (other, (j + 3) % 6, 1.0),
                    (c, j + 1, -1.0),
                ])
            }
            _ => Err(Error::UnknownPlaquette(format!(
                "{graph} cell {:?} index {}",
                self.cell, self.index
            ))),
        }
    }

    fn corners(&self, graph: Graph) -> Vec<(Cell, SiteKind)> {
        match self.boundary(graph) {
            Ok(b) => b
                .iter()
                .flat_map(|&(cell, slot, _)| {
                    let e = &graph.edges()[slot];
                    [(cell, SiteKind::HubA), (add(cell, e.offset), e.rim_kind)]
                })
                .collect(),
            Err(_) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeVariant {
    /// Diamond chain: the whole plaquette phase on the upper-right edge.
    DcSingleEdge,
    /// T3 Landau gauge, periodic along `a1` and along `q·a2` for `f = p/q`.
    T3Landau,
    /// T3 gauge with the tiling periodicity, available at `f = ±1/3`.
    T3PeriodicThird,
}

/// Peierls phases for every directed edge of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeField {
    graph: Graph,
    flux: f64,
    variant: GaugeVariant,
    rational: Option<(i64, i64)>,
}

const THIRD_PHASES: [f64; 6] = [0.0, TAU / 3.0, 2.0 * TAU / 3.0, 0.0, 0.0, 0.0];

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl GaugeField {
    pub fn dc_single_edge(f: f64) -> Self {
        Self {
            graph: Graph::DiamondChain,
            flux: f,
            variant: GaugeVariant::DcSingleEdge,
            rational: None,
        }
    }

    /// Landau gauge at any real flux (fine for open lattices).
    pub fn t3_landau(f: f64) -> Self {
        Self {
            graph: Graph::Dice,
            flux: f,
            variant: GaugeVariant::T3Landau,
            rational: None,
        }
    }

    pub fn t3_landau_rational(p: i64, q: i64) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidGauge(format!("denominator {q} < 1")));
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidGauge(format!("{p}/{q} is not in lowest terms")));
        }
        Ok(Self {
            rational: Some((p, q)),
            ..Self::t3_landau(p as f64 / q as f64)
        })
    }

    pub fn t3_periodic_third(f: f64) -> Result<Self> {
        if (f.abs() - 1.0 / 3.0).abs() > 1e-12 {
            return Err(Error::InvalidGauge(format!(
                "periodic gauge exists only at f = ±1/3, got {f}"
            )));
        }
        Ok(Self {
            graph: Graph::Dice,
            flux: f.signum() / 3.0,
            variant: GaugeVariant::T3PeriodicThird,
            rational: Some((f.signum() as i64, 3)),
        })
    }

    /// Default gauge for a graph: single edge (DC) or Landau (T3).
    pub fn natural(graph: Graph, f: f64) -> Self {
        match graph {
            Graph::DiamondChain => Self::dc_single_edge(f),
            Graph::Dice => Self::t3_landau(f),
        }
    }

    pub fn graph(&self) -> Graph {
        self.graph
    }

    pub fn flux(&self) -> f64 {
        self.flux
    }

    pub fn variant(&self) -> GaugeVariant {
        self.variant
    }

    pub fn rational(&self) -> Option<(i64, i64)> {
        self.rational
    }

    /// Phase picked up hopping from hub `(cell, slot)` to its rim partner.
    pub fn hub_to_rim_phase(&self, cell: Cell, slot: usize) -> f64 {
        match self.variant {
            GaugeVariant::DcSingleEdge => {
                if slot == 0 {
                    -TAU * self.flux
                } else {
                    0.0
                }
            }
            GaugeVariant::T3Landau => {
                let e = &self.graph.edges()[slot];
                let h = self.graph.fractional_position(cell, SiteKind::HubA);
                let r = self.graph.fractional_position(add(cell, e.offset), e.rim_kind);
                -3.0 * TAU * self.flux * 0.5 * (h[1] + r[1]) * (r[0] - h[0])
            }
            GaugeVariant::T3PeriodicThird => {
                if self.flux < 0.0 {
                    THIRD_PHASES[slot]
                } else {
                    -THIRD_PHASES[slot]
                }
            }
        }
    }

    /// Phase of the directed hop between the sites of two partner states.
    pub fn peierls_phase(&self, from: &BasisState, to: &BasisState) -> Result<f64> {
        let partner = self.graph.partner(from)?;
        if partner != *to {
            return Err(Error::NotAdjacent(from.to_string(), to.to_string()));
        }
        Ok(if from.kind.is_hub() {
            self.hub_to_rim_phase(from.cell, from.slot)
        } else {
            -self.hub_to_rim_phase(to.cell, to.slot)
        })
    }

    /// Oriented phase sum around a plaquette over 2π, reduced to (−1/2, 1/2].
    pub fn plaquette_flux(&self, p: &Plaquette) -> Result<f64> {
        let sum: f64 = p
            .boundary(self.graph)?
            .iter()
            .map(|&(cell, slot, sign)| sign * self.hub_to_rim_phase(cell, slot))
            .sum();
        Ok(reduce_flux(sum / TAU))
    }

    /// Checks that edge phases are invariant under the patch periods, so
    /// that every plaquette of a periodic patch sees the same flux.
    pub fn check_periodic(&self, lattice: &FiniteLattice) -> Result<()> {
        if lattice.boundary() == Boundary::Open {
            return Ok(());
        }
        let ext = lattice.extent();
        let periods: Vec<Cell> = match lattice.graph() {
            Graph::DiamondChain => vec![[ext.n1 as i64, 0]],
            Graph::Dice => vec![[ext.n1 as i64, 0], [0, ext.n2 as i64]],
        };
        for cell in lattice.cells() {
            for slot in 0..self.graph.coordination(SiteKind::HubA) {
                let base = self.hub_to_rim_phase(cell, slot);
                for t in &periods {
                    let shifted = self.hub_to_rim_phase(add(cell, *t), slot);
                    let d = (shifted - base).rem_euclid(TAU);
                    if d.min(TAU - d) > 1e-9 {
                        return Err(Error::InvalidGauge(format!(
                            "flux {} is not commensurate with a periodic {}x{} patch",
                            self.flux, ext.n1, ext.n2
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Reduces a flux to (−1/2, 1/2].
pub fn reduce_flux(f: f64) -> f64 {
    let mut y = f.rem_euclid(1.0);
    if y > 0.5 {
        y -= 1.0;
    }
    if (y + 0.5).abs() < 1e-12 || (y - 0.5).abs() < 1e-12 {
        y = 0.5;
    }
    y
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseEntry {
    pub from: BasisState,
    pub to: BasisState,
    pub phase: f64,
}

/// Directed-edge phase table of a patch, both directions of every edge.
pub fn phase_table(lattice: &FiniteLattice, gauge: &GaugeField) -> Vec<PhaseEntry> {
    let mut out = Vec::new();
    for e in lattice.edges() {
        let phase = gauge.hub_to_rim_phase(e.hub.cell, e.hub.slot);
        out.push(PhaseEntry {
            from: e.hub,
            to: e.rim,
            phase,
        });
        out.push(PhaseEntry {
            from: e.rim,
            to: e.hub,
            phase: -phase,
        });
    }
    out
}

pub fn phase_table_json(lattice: &FiniteLattice, gauge: &GaugeField) -> serde_json::Value {
    serde_json::to_value(phase_table(lattice, gauge)).expect("plain data serializes")
}

/// Histogram of (kind, kind) pairs over the edges of a patch.
pub fn edge_kind_counts(lattice: &FiniteLattice) -> BTreeMap<(SiteKind, SiteKind), usize> {
    let mut m = BTreeMap::new();
    for e in lattice.edges() {
        *m.entry((e.hub.kind, e.rim.kind)).or_insert(0) += 1;
    }
    m
}
