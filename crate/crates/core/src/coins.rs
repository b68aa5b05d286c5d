//! Coin matrices and the block-diagonal coin operator.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{Cell, FiniteLattice, Graph, Site, SiteKind};
use crate::linalg::{CMatrix, CsrMatrix};

const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinParamsU2 {
    pub theta: f64,
    pub phi: f64,
    pub omega: f64,
    pub beta: f64,
}

impl CoinParamsU2 {
    pub fn new(theta: f64, phi: f64, omega: f64, beta: f64) -> Self {
        Self {
            theta,
            phi,
            omega,
            beta,
        }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinParamsR3 {
    pub alpha: f64,
    pub gamma: f64,
    #[serde(default)]
    pub omega: f64,
}

impl CoinParamsR3 {
    pub fn new(alpha: f64, gamma: f64, omega: f64) -> Self {
        Self {
            alpha,
            gamma,
            omega,
        }
    }

    /// Rotation axis (cos γ/√2, sin γ, cos γ/√2).
    pub fn axis(&self) -> [f64; 3] {
        let c = self.gamma.cos() / 2f64.sqrt();
        [c, self.gamma.sin(), c]
    }
}

/// A validated unitary coin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinMatrix {
    matrix: CMatrix,
}

impl CoinMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let r = matrix.unitarity_residual();
        if !(r < UNITARY_TOL) {
            return Err(Error::NotUnitary(r));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }
}

fn polar(r: f64, phase: f64) -> Complex64 {
    Complex64::from_polar(r, phase)
}

/// U2(θ, φ, ω, β) = [[cos θ e^{iβ}, −sin θ e^{i(φ+ω)}], [sin θ e^{−iω}, cos θ e^{i(φ−β)}]].
pub fn u2(p: CoinParamsU2) -> CoinMatrix {
    let (s, c) = p.theta.sin_cos();
    let m = CMatrix::from_rows(&[
        vec![polar(c, p.beta), -polar(s, p.phi + p.omega)],
        vec![polar(s, -p.omega), polar(c, p.phi - p.beta)],
    ]);
    CoinMatrix { matrix: m }
}

/// G_n = (2/n)·J − I.
pub fn grover(n: usize) -> Result<CoinMatrix> {
    if n < 2 {
        return Err(Error::InvalidCoin(format!("grover needs n >= 2, got {n}")));
    }
    let d = 2.0 / n as f64;
    Ok(CoinMatrix {
        matrix: CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { d - 1.0 } else { d }, 0.0)
        }),
    })
}

/// H2, or H4 = H2 ⊗ H2.
pub fn hadamard(n: usize) -> Result<CoinMatrix> {
    // exact form of U2(π/4, π, 0, 0)
    let s = FRAC_1_SQRT_2;
    let h2 = CMatrix::from_real_rows(&[vec![s, s], vec![s, -s]]);
    match n {
        2 => Ok(CoinMatrix { matrix: h2 }),
        4 => Ok(CoinMatrix {
            matrix: h2.kron(&h2),
        }),
        _ => Err(Error::InvalidCoin(format!("hadamard supports n = 2 or 4, got {n}"))),
    }
}

fn rotation(alpha: f64, gamma: f64) -> [[f64; 3]; 3] {
    let v = CoinParamsR3::new(alpha, gamma, 0.0).axis();
    let k = [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]];
    let (s, c) = alpha.sin_cos();
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let kk: f64 = (0..3).map(|m| k[i][m] * k[m][j]).sum();
            r[i][j] = if i == j { 1.0 } else { 0.0 } + s * k[i][j] + (1.0 - c) * kk;
        }
    }
    r
}

/// Rotation by α about (cos γ/√2, sin γ, cos γ/√2), Rodrigues form.
pub fn r3(alpha: f64, gamma: f64) -> CoinMatrix {
    let r = rotation(alpha, gamma);
    CoinMatrix {
        matrix: CMatrix::from_fn(3, 3, |i, j| Complex64::new(r[i][j], 0.0)),
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    let (i, j, k) = (i as i64, j as i64, k as i64);
    ((i - j) * (j - k) * (k - i)) as f64 / 2.0
}

/// R3 with entry (i, j) multiplied by e^{−iω Σ_k ε_ijk}. Unitary only
/// when 3ω is a multiple of 2π (or the rotation is trivial); other ω
/// give `NotUnitary`.
pub fn r3_tilde(alpha: f64, gamma: f64, omega: f64) -> Result<CoinMatrix> {
    let r = rotation(alpha, gamma);
    CoinMatrix::new(CMatrix::from_fn(3, 3, |i, j| {
        let e: f64 = (0..3).map(|k| levi_civita(i, j, k)).sum();
        polar(r[i][j], -omega * e)
    }))
}

/// Discrete Fourier transform, entries e^{2πi jk/n}/√n.
pub fn dft(n: usize) -> Result<CoinMatrix> {
    if n < 2 {
        return Err(Error::InvalidCoin(format!("dft needs n >= 2, got {n}")));
    }
    let norm = 1.0 / (n as f64).sqrt();
    Ok(CoinMatrix {
        matrix: CMatrix::from_fn(n, n, |j, k| polar(norm, TAU * ((j * k) % n) as f64 / n as f64)),
    })
}

pub fn identity(n: usize) -> CoinMatrix {
    CoinMatrix {
        matrix: CMatrix::identity(n),
    }
}

/// Textual coin description, e.g. `G4`, `H2`, `U2:pi/4,pi,0,0`,
/// `R3:2*pi/3,asin(1/sqrt(3))`, `R3t:pi/2,0.6155,-2*pi/3`, `D4`, `I6`.
/// Angles accept arithmetic with `pi`, `sqrt`, `asin`, `acos`, ...
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoinSpec {
    U2(CoinParamsU2),
    Grover(usize),
    Hadamard(usize),
    R3(CoinParamsR3),
    R3Tilde(CoinParamsR3),
    Dft(usize),
    Identity(usize),
}

/// Evaluates an angle expression.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty angle".into()));
    }
    let v = meval::eval_str(t.to_ascii_lowercase()).map_err(|e| Error::Parse(format!("angle `{t}`: {e}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("angle `{t}` is not finite")));
    }
    Ok(v)
}

fn parse_angles(body: &str, n: usize, name: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = body.split(',').collect();
    if parts.len() != n {
        return Err(Error::Parse(format!(
            "{name} expects {n} angles, got {}",
            parts.len()
        )));
    }
    parts.iter().map(|p| parse_angle(p)).collect()
}

impl CoinSpec {
    pub fn build(&self) -> Result<CoinMatrix> {
        match *self {
            CoinSpec::U2(p) => Ok(u2(p)),
            CoinSpec::Grover(n) => grover(n),
            CoinSpec::Hadamard(n) => hadamard(n),
            CoinSpec::R3(p) => Ok(r3(p.alpha, p.gamma)),
            CoinSpec::R3Tilde(p) => r3_tilde(p.alpha, p.gamma, p.omega),
            CoinSpec::Dft(n) => dft(n),
            CoinSpec::Identity(n) => {
                if n == 0 {
                    Err(Error::InvalidCoin("identity of size 0".into()))
                } else {
                    Ok(identity(n))
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            CoinSpec::U2(_) => 2,
            CoinSpec::R3(_) | CoinSpec::R3Tilde(_) => 3,
            CoinSpec::Grover(n) | CoinSpec::Hadamard(n) | CoinSpec::Dft(n) | CoinSpec::Identity(n) => n,
        }
    }

    /// Same family with ω set to zero (the `C_b = C_c(ω = 0)` convention).
    pub fn without_omega(&self) -> Self {
        match *self {
            CoinSpec::U2(p) => CoinSpec::U2(p.with_omega(0.0)),
            CoinSpec::R3Tilde(p) => CoinSpec::R3(CoinParamsR3 { omega: 0.0, ..p }),
            other => other,
        }
    }
}

impl FromStr for CoinSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, body) = match s.split_once(':') {
            Some((h, b)) => (h.trim(), Some(b)),
            None => (s, None),
        };
        let sized = |prefix: char| -> Result<usize> {
            head[1..]
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("coin `{s}`: expected {prefix}<n>")))
        };
        match (head, body) {
            ("U2", Some(b)) => {
                let a = parse_angles(b, 4, "U2")?;
                Ok(CoinSpec::U2(CoinParamsU2::new(a[0], a[1], a[2], a[3])))
            }
            ("R3", Some(b)) => {
                let a = parse_angles(b, 2, "R3")?;
                Ok(CoinSpec::R3(CoinParamsR3::new(a[0], a[1], 0.0)))
            }
            ("R3t", Some(b)) => {
                let a = parse_angles(b, 3, "R3t")?;
                Ok(CoinSpec::R3Tilde(CoinParamsR3::new(a[0], a[1], a[2])))
            }
            (h, None) if h.len() >= 2 => match h.as_bytes()[0] {
                b'G' => Ok(CoinSpec::Grover(sized('G')?)),
                b'H' => Ok(CoinSpec::Hadamard(sized('H')?)),
                b'D' => Ok(CoinSpec::Dft(sized('D')?)),
                b'I' => Ok(CoinSpec::Identity(sized('I')?)),
                _ => Err(Error::Parse(format!("unknown coin `{s}`"))),
            },
            _ => Err(Error::Parse(format!("unknown coin `{s}`"))),
        }
    }
}

impl fmt::Display for CoinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoinSpec::U2(p) => write!(f, "U2:{},{},{},{}", p.theta, p.phi, p.omega, p.beta),
            CoinSpec::Grover(n) => write!(f, "G{n}"),
            CoinSpec::Hadamard(n) => write!(f, "H{n}"),
            CoinSpec::R3(p) => write!(f, "R3:{},{}", p.alpha, p.gamma),
            CoinSpec::R3Tilde(p) => write!(f, "R3t:{},{},{}", p.alpha, p.gamma, p.omega),
            CoinSpec::Dft(n) => write!(f, "D{n}"),
            CoinSpec::Identity(n) => write!(f, "I{n}"),
        }
    }
}

impl Serialize for CoinSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CoinSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Coins for the three site kinds, with optional per-cell hub overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinAssignment {
    pub hub: CoinMatrix,
    pub rim_b: CoinMatrix,
    pub rim_c: CoinMatrix,
    pub hub_overrides: BTreeMap<Cell, CoinMatrix>,
}

impl CoinAssignment {
    pub fn new(hub: CoinMatrix, rim_b: CoinMatrix, rim_c: CoinMatrix) -> Self {
        Self {
            hub,
            rim_b,
            rim_c,
            hub_overrides: BTreeMap::new(),
        }
    }

    /// Rims `C_b = U2(θ, φ, 0, β)` and `C_c = U2(θ, φ, ω, β)`.
    pub fn with_u2_rims(hub: CoinMatrix, p: CoinParamsU2) -> Self {
        Self::new(hub, u2(p.with_omega(0.0)), u2(p))
    }

    /// Rims `C_b = R3(α, γ)` and `C_c = R3~(α, γ, ω)`.
    pub fn with_r3_rims(hub: CoinMatrix, p: CoinParamsR3) -> Result<Self> {
        Ok(Self::new(hub, r3(p.alpha, p.gamma), r3_tilde(p.alpha, p.gamma, p.omega)?))
    }

    pub fn with_hub_override(mut self, cell: Cell, coin: CoinMatrix) -> Self {
        self.hub_overrides.insert(cell, coin);
        self
    }

    pub fn coin_for(&self, site: Site) -> &CoinMatrix {
        match site.kind {
            SiteKind::HubA => self.hub_overrides.get(&site.cell).unwrap_or(&self.hub),
            SiteKind::RimB => &self.rim_b,
            SiteKind::RimC => &self.rim_c,
        }
    }

    pub fn validate(&self, graph: Graph) -> Result<()> {
        let check = |coin: &CoinMatrix, kind: SiteKind| {
            let expected = graph.coordination(kind);
            if coin.dim() != expected {
                Err(Error::DimensionMismatch {
                    expected,
                    found: coin.dim(),
                })
            } else {
                Ok(())
            }
        };
        check(&self.hub, SiteKind::HubA)?;
        check(&self.rim_b, SiteKind::RimB)?;
        check(&self.rim_c, SiteKind::RimC)?;
        for c in self.hub_overrides.values() {
            check(c, SiteKind::HubA)?;
        }
        Ok(())
    }
}

/// Block-diagonal coin operator in the lattice basis order.
pub fn assemble_coin_operator(assignment: &CoinAssignment, lattice: &FiniteLattice) -> Result<CsrMatrix> {
    let graph = lattice.graph();
    assignment.validate(graph)?;
    let per = graph.states_per_cell();
    let mut trip = Vec::with_capacity(lattice.extent().cells() * (36 + 9 + 9));
    for (ci, cell) in lattice.cells().enumerate() {
        for kind in SiteKind::ALL {
            let coin = assignment.coin_for(Site { cell, kind });
            let base = ci * per + graph.kind_offset(kind);
            let n = coin.dim();
            for i in 0..n {
                for j in 0..n {
                    trip.push((base + i, base + j, coin.get(i, j)));
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(lattice.dim(), trip))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use std::f64::consts::{FRAC_PI_4, PI};
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        a.sub(b).max_abs() <= tol
    }

    #[test]
    fn hadamard_from_u2() {
        let h = u2(CoinParamsU2::new(FRAC_PI_4, PI, 0.0, 0.0));
        let s = FRAC_1_SQRT_2;
        let want = CMatrix::from_real_rows(&[vec![s, s], vec![s, -s]]);
        assert!(close(h.matrix(), &want, 1e-15));
        assert!(close(hadamard(2).unwrap().matrix(), &want, 0.0));
    }

    #[test]
    fn u2_special_cases() {
        assert!(close(u2(CoinParamsU2::new(0.0, 0.0, 0.0, 0.0)).matrix(), &CMatrix::identity(2), 0.0));
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..5 {
            let t: f64 = rng.gen_range(-PI..PI);
            let m = u2(CoinParamsU2::new(t, 0.0, 0.0, 0.0));
            let want = CMatrix::from_real_rows(&[vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]);
            assert!(close(m.matrix(), &want, 1e-15));
        }
    }

    #[test]
    fn u2_determinant_is_e_i_phi() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..20 {
            let p = CoinParamsU2::new(
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
            );
            let m = u2(p);
            let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
            assert!((det - Complex64::from_polar(1.0, p.phi)).norm() < 1e-14);
            assert!(m.matrix().unitarity_residual() < 1e-14);
        }
    }

    #[test]
    fn grover_properties() {
        let g4 = grover(4).unwrap();
        assert_eq!(g4.get(0, 0), Complex64::new(-0.5, 0.0));
        assert_eq!(g4.get(1, 2), Complex64::new(0.5, 0.0));
        let g6 = grover(6).unwrap();
        assert!(close(&g6.matrix().matmul(g6.matrix()), &CMatrix::identity(6), 1e-15));
        assert!(g6.matrix().hermiticity_residual() == 0.0);
        assert!(grover(1).is_err());
    }

    #[test]
    fn grover3_is_a_rotation() {
        let r = r3(PI, (1.0 / 3f64.sqrt()).asin());
        assert!(close(r.matrix(), grover(3).unwrap().matrix(), 1e-12));
    }

    #[test]
    fn hadamard4_entries() {
        let h = hadamard(4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((h.get(i, j).norm() - 0.5).abs() < 1e-15);
                assert!(h.get(i, j).im == 0.0);
            }
        }
        for j in 0..4 {
            assert!((h.get(0, j) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
        assert!(close(&h.matrix().matmul(h.matrix()), &CMatrix::identity(4), 1e-15));
        assert!(hadamard(8).is_err());
    }

    #[test]
    fn r3_fixes_axis_and_is_proper() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..10 {
            let (a, g) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
            let m = r3(a, g);
            let v = CoinParamsR3::new(a, g, 0.0).axis();
            let vc: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let w = m.matrix().matvec(&vc);
            for i in 0..3 {
                assert!((w[i] - vc[i]).norm() < 1e-14);
            }
            let r = rotation(a, g);
            let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
            assert!((det - 1.0).abs() < 1e-13);
        }
        assert!(close(r3(0.0, 0.7).matrix(), &CMatrix::identity(3), 0.0));
    }

    #[test]
    fn r3_tilde_properties() {
        assert!(close(r3_tilde(1.1, 0.3, 0.0).unwrap().matrix(), r3(1.1, 0.3).matrix(), 0.0));
        assert!(matches!(r3_tilde(1.1, 0.3, 0.9), Err(Error::NotUnitary(_))));
        let t = r3_tilde(1.1, 0.3, TAU / 3.0).unwrap();
        let r = r3(1.1, 0.3);
        for i in 0..3 {
            assert_eq!(t.get(i, i), r.get(i, i));
        }
        let m = r3_tilde(PI / 2.0, (1.0 / 3f64.sqrt()).asin(), -TAU / 3.0).unwrap();
        assert!(m.matrix().unitarity_residual() < 1e-12);
    }

    #[test]
    fn dft_properties() {
        assert!(close(dft(2).unwrap().matrix(), hadamard(2).unwrap().matrix(), 1e-15));
        let d4 = dft(4).unwrap();
        assert!(d4.matrix().unitarity_residual() < 1e-15);
        for j in 0..4 {
            assert!((d4.get(0, j) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let m = CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        assert!(matches!(CoinMatrix::new(m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn spec_strings_parse() {
        let c: CoinSpec = "U2:0.7854,2.5,0,0".parse().unwrap();
        assert!(matches!(c, CoinSpec::U2(p) if (p.phi - 2.5).abs() < 1e-15));
        assert_eq!("G4".parse::<CoinSpec>().unwrap(), CoinSpec::Grover(4));
        assert_eq!("H4".parse::<CoinSpec>().unwrap(), CoinSpec::Hadamard(4));
        assert_eq!("D4".parse::<CoinSpec>().unwrap(), CoinSpec::Dft(4));
        assert_eq!("I4".parse::<CoinSpec>().unwrap(), CoinSpec::Identity(4));
        let r: CoinSpec = "R3:2*pi/3,asin(1/sqrt(3))".parse().unwrap();
        assert!(matches!(r, CoinSpec::R3(p) if (p.alpha - TAU / 3.0).abs() < 1e-15));
        let t: CoinSpec = "R3t:1.5708,0.6155,-2.0944".parse().unwrap();
        assert!(matches!(t, CoinSpec::R3Tilde(p) if p.omega == -2.0944));
        assert!("X7".parse::<CoinSpec>().is_err());
        assert!("U2:1,2".parse::<CoinSpec>().is_err());
        assert!("U2:1,2,3,foo".parse::<CoinSpec>().is_err());
    }

    #[test]
    fn spec_display_round_trips() {
        for s in ["U2:pi/4,pi,0.3,-1", "G6", "H2", "R3:1.2,0.4", "R3t:1,2,3", "D4", "I3"] {
            let c: CoinSpec = s.parse().unwrap();
            let back: CoinSpec = c.to_string().parse().unwrap();
            assert_eq!(c, back);
        }
    }

    #[test]
    fn coin_operator_structure() {
        let l = FiniteLattice::chain(1, Boundary::Open).unwrap();
        let a = CoinAssignment::new(grover(4).unwrap(), hadamard(2).unwrap(), hadamard(2).unwrap());
        let c = assemble_coin_operator(&a, &l).unwrap();
        assert_eq!(c.nnz(), 16 + 4 + 4);
        assert_eq!(c.get(0, 4), Complex64::new(0.0, 0.0));
        assert!(c.unitarity_residual() < 1e-15);
        let id = CoinAssignment::new(identity(4), identity(2), identity(2));
        assert_eq!(assemble_coin_operator(&id, &l).unwrap(), CsrMatrix::identity(8));
    }

    #[test]
    fn override_changes_one_block() {
        let l = FiniteLattice::chain(8, Boundary::Open).unwrap();
        let h = CoinAssignment::new(hadamard(4).unwrap(), hadamard(2).unwrap(), hadamard(2).unwrap());
        let g = h.clone().with_hub_override([5, 0], grover(4).unwrap());
        let ch = assemble_coin_operator(&h, &l).unwrap();
        let cg = assemble_coin_operator(&g, &l).unwrap();
        for r in 0..l.dim() {
            for c in 0..l.dim() {
                let differs = (ch.get(r, c) - cg.get(r, c)).norm() > 0.0;
                let in_block = (40..44).contains(&r) && (40..44).contains(&c);
                if differs {
                    assert!(in_block);
                }
            }
        }
    }

    #[test]
    fn wrong_dimension_rejected() {
        let l = FiniteLattice::plane(1, 1, Boundary::Open).unwrap();
        let a = CoinAssignment::new(grover(4).unwrap(), r3(1.0, 0.0), r3(1.0, 0.0));
        assert!(matches!(
            assemble_coin_operator(&a, &l),
            Err(Error::DimensionMismatch { expected: 6, found: 4 })
        ));
    }
}
