//! Experiment configuration: JSON files overlaid with command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use qwcage::coins::{parse_angle, CoinAssignment, CoinParamsU2, CoinSpec};
use qwcage::lattice::{Boundary, Cell, FiniteLattice, Graph, SiteKind};
use qwcage::spectrum::FluxSampling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Bands,
    Butterfly,
    Arnoldi,
    Evolve,
    Superlattice,
    AppendixE,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Bands,
        Command::Butterfly,
        Command::Arnoldi,
        Command::Evolve,
        Command::Superlattice,
        Command::AppendixE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Bands => "bands",
            Command::Butterfly => "butterfly",
            Command::Arnoldi => "arnoldi",
            Command::Evolve => "evolve",
            Command::Superlattice => "superlattice",
            Command::AppendixE => "appendix-e",
        }
    }
}

impl FromStr for Command {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .with_context(|| format!("unknown command `{s}`"))
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

/// `0.5`, `a:b:n` (end excluded) or `q<=Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxSpec {
    Value(f64),
    Grid { start: f64, end: f64, n: usize },
    Rationals { q_max: i64 },
}

impl FluxSpec {
    pub fn sampling(&self) -> FluxSampling {
        match *self {
            FluxSpec::Value(v) => FluxSampling::Values { values: vec![v] },
            FluxSpec::Grid { start, end, n } => FluxSampling::Grid { start, end, n },
            FluxSpec::Rationals { q_max } => FluxSampling::Rationals { q_max },
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        Ok(self.sampling().points()?.into_iter().map(|p| p.0).collect())
    }
}

impl FromStr for FluxSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(q) = t.strip_prefix("q<=") {
            let q_max: i64 = q.trim().parse().with_context(|| format!("flux `{t}`: bad q_max"))?;
            if q_max < 1 {
                bail!("flux `{t}`: q_max must be >= 1");
            }
            return Ok(FluxSpec::Rationals { q_max });
        }
        let parts: Vec<&str> = t.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(FluxSpec::Value(parse_angle(v)?)),
            [a, b, n] => {
                let n: usize = n.trim().parse().with_context(|| format!("flux `{t}`: bad point count"))?;
                if n == 0 {
                    bail!("flux `{t}`: empty flux grid");
                }
                Ok(FluxSpec::Grid {
                    start: parse_angle(a)?,
                    end: parse_angle(b)?,
                    n,
                })
            }
            _ => bail!("flux `{t}`: expected a value, a:b:n or q<=Q"),
        }
    }
}

impl fmt::Display for FluxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FluxSpec::Value(v) => write!(f, "{v}"),
            FluxSpec::Grid { start, end, n } => write!(f, "{start}:{end}:{n}"),
            FluxSpec::Rationals { q_max } => write!(f, "q<={q_max}"),
        }
    }
}

string_serde!(FluxSpec);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellRef {
    Center,
    At(Cell),
}

/// `all` (every hub slot, or every site for superlattices), or `cell,kind,slot` with cell `n`, `n1;n2` or `c` (centre).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitSpec {
    All,
    State { cell: CellRef, kind: SiteKind, slot: usize },
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec::State {
            cell: CellRef::Center,
            kind: SiteKind::HubA,
            slot: 0,
        }
    }
}

impl FromStr for InitSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "all" || t == "all-hub-slots" {
            return Ok(InitSpec::All);
        }
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        let [cell, kind, slot] = parts.as_slice() else {
            bail!("init `{t}`: expected `cell,kind,slot` or `all`");
        };
        let cell = if *cell == "c" {
            CellRef::Center
        } else {
            let xs: Vec<i64> = cell
                .split(';')
                .map(|x| x.trim().parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .with_context(|| format!("init `{t}`: bad cell"))?;
            match xs.as_slice() {
                [a] => CellRef::At([*a, 0]),
                [a, b] => CellRef::At([*a, *b]),
                _ => bail!("init `{t}`: cell needs one or two coordinates"),
            }
        };
        Ok(InitSpec::State {
            cell,
            kind: kind.parse()?,
            slot: slot.parse().with_context(|| format!("init `{t}`: bad slot"))?,
        })
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitSpec::All => f.write_str("all"),
            InitSpec::State { cell, kind, slot } => {
                match cell {
                    CellRef::Center => f.write_str("c")?,
                    CellRef::At([a, 0]) => write!(f, "{a}")?,
                    CellRef::At([a, b]) => write!(f, "{a};{b}")?,
                }
                write!(f, ",{},{}", kind.letter(), slot)
            }
        }
    }
}

string_serde!(InitSpec);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Theta,
    Phi,
    Omega,
    Beta,
    Alpha,
    Gamma,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Theta => "theta",
            SweepParam::Phi => "phi",
            SweepParam::Omega => "omega",
            SweepParam::Beta => "beta",
            SweepParam::Alpha => "alpha",
            SweepParam::Gamma => "gamma",
        }
    }

    /// Sets this parameter on a rim coin spec.
    pub fn apply(self, spec: CoinSpec, v: f64) -> Result<CoinSpec> {
        Ok(match (self, spec) {
            (SweepParam::Theta, CoinSpec::U2(p)) => CoinSpec::U2(CoinParamsU2 { theta: v, ..p }),
            (SweepParam::Phi, CoinSpec::U2(p)) => CoinSpec::U2(CoinParamsU2 { phi: v, ..p }),
            (SweepParam::Omega, CoinSpec::U2(p)) => CoinSpec::U2(CoinParamsU2 { omega: v, ..p }),
            (SweepParam::Beta, CoinSpec::U2(p)) => CoinSpec::U2(CoinParamsU2 { beta: v, ..p }),
            (SweepParam::Alpha, CoinSpec::R3(mut p)) => {
                p.alpha = v;
                CoinSpec::R3(p)
            }
            (SweepParam::Alpha, CoinSpec::R3Tilde(mut p)) => {
                p.alpha = v;
                CoinSpec::R3Tilde(p)
            }
            (SweepParam::Gamma, CoinSpec::R3(mut p)) => {
                p.gamma = v;
                CoinSpec::R3(p)
            }
            (SweepParam::Gamma, CoinSpec::R3Tilde(mut p)) => {
                p.gamma = v;
                CoinSpec::R3Tilde(p)
            }
            (SweepParam::Omega, CoinSpec::R3Tilde(mut p)) => {
                p.omega = v;
                CoinSpec::R3Tilde(p)
            }
            (param, spec) => bail!("cannot sweep {} on coin {spec}", param.name()),
        })
    }
}

/// `name=v1,v2,...` or `name=a:b:n` (end excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl FromStr for SweepSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, body) = s.split_once('=').with_context(|| format!("sweep `{s}`: expected name=values"))?;
        let param: SweepParam = serde_json::from_value(serde_json::Value::String(name.trim().to_string()))
            .with_context(|| format!("sweep `{s}`: unknown parameter `{}`", name.trim()))?;
        let parts: Vec<&str> = body.split(':').collect();
        let values = if let [a, b, n] = parts.as_slice() {
            let (a, b) = (parse_angle(a)?, parse_angle(b)?);
            let n: usize = n.trim().parse().with_context(|| format!("sweep `{s}`: bad count"))?;
            (0..n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
        } else {
            body.split(',').map(parse_angle).collect::<qwcage::Result<Vec<f64>>>()?
        };
        if values.is_empty() {
            bail!("sweep `{s}` has no values");
        }
        Ok(SweepSpec { param, values })
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.values.iter().map(|x| x.to_string()).collect();
        write!(f, "{}={}", self.param.name(), v.join(","))
    }
}

string_serde!(SweepSpec);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Recipe files may name their command; it must match the subcommand.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub graph: Graph,
    pub coin_a: Option<CoinSpec>,
    pub coin_b: Option<CoinSpec>,
    pub coin_c: Option<CoinSpec>,
    pub flux: Option<FluxSpec>,
    pub k: Option<usize>,
    pub init: InitSpec,
    pub cells: Option<Vec<i64>>,
    pub steps: Option<usize>,
    pub tol: f64,
    pub max_iter: Option<usize>,
    pub sweep: Vec<SweepSpec>,
    pub layout: Option<String>,
    pub bounds: Option<[i64; 2]>,
    pub out: Option<PathBuf>,
    pub svg: bool,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            graph: Graph::DiamondChain,
            coin_a: None,
            coin_b: None,
            coin_c: None,
            flux: None,
            k: None,
            init: InitSpec::default(),
            cells: None,
            steps: None,
            tol: 1e-8,
            max_iter: None,
            sweep: Vec::new(),
            layout: None,
            bounds: None,
            out: None,
            svg: false,
            threads: None,
        }
    }
}

fn spec(s: &str) -> CoinSpec {
    s.parse().expect("built-in coin spec")
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid config file")
    }

    /// Fills every unset field with the command's default.
    pub fn fill_defaults(&mut self, cmd: Command) {
        let dc = self.graph == Graph::DiamondChain;
        self.command = Some(cmd);
        self.coin_a.get_or_insert_with(|| spec(if dc { "G4" } else { "G6" }));
        self.coin_c
            .get_or_insert_with(|| spec(if dc { "U2:pi/4,pi,0,0" } else { "R3:2*pi/3,asin(1/sqrt(3))" }));
        let c = self.coin_c.expect("set above");
        self.coin_b.get_or_insert_with(|| c.without_omega());
        self.flux.get_or_insert(match (cmd, dc) {
            (Command::Bands, true) => FluxSpec::Grid { start: 0.0, end: 1.0, n: 512 },
            (Command::Bands, false) | (Command::Butterfly, _) => FluxSpec::Rationals { q_max: 30 },
            _ => FluxSpec::Value(0.5),
        });
        self.k.get_or_insert(match (cmd, dc) {
            (_, true) => 256,
            (_, false) => 4,
        });
        self.steps.get_or_insert(match cmd {
            Command::Evolve => 16,
            Command::Superlattice => 300,
            _ => 1000,
        });
        let steps = self.steps.expect("set above") as i64;
        self.cells.get_or_insert_with(|| match (cmd, dc) {
            (Command::Evolve, true) => vec![2 * steps + 5],
            (Command::Evolve, false) => vec![2 * steps + 5, 2 * steps + 5],
            (_, true) => vec![30],
            (_, false) => vec![9, 9],
        });
        self.max_iter.get_or_insert(if dc { 16 } else { 24 });
        if cmd == Command::AppendixE {
            self.bounds.get_or_insert([100, 100]);
        }
    }

    /// Checks everything that does not need a computation.
    pub fn validate(&self, cmd: Command) -> Result<()> {
        if let Some(c) = self.command {
            if c != cmd {
                bail!("config is for `{}`, not `{}`", c.name(), cmd.name());
            }
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            bail!("tolerance must be > 0, got {}", self.tol);
        }
        if self.k == Some(0) {
            bail!("--k must be >= 1");
        }
        if self.threads == Some(0) {
            bail!("--threads must be >= 1");
        }
        if let Some(cells) = &self.cells {
            let want = if self.graph == Graph::DiamondChain { 1 } else { 2 };
            if cells.len() != want || cells.iter().any(|&n| n < 1) {
                bail!("--cells needs {want} positive value(s) for graph {}", self.graph);
            }
        }
        if let Some([a, b]) = self.bounds {
            if a < 1 || b < 1 {
                bail!("bounds must be >= 1, got ({a}, {b})");
            }
        }
        if let Some(f) = self.flux {
            f.values()?;
        }
        self.assignment()?;
        Ok(())
    }

    pub fn assignment(&self) -> Result<CoinAssignment> {
        let (Some(a), Some(b), Some(c)) = (self.coin_a, self.coin_b, self.coin_c) else {
            bail!("coins are not set");
        };
        let asg = CoinAssignment::new(a.build()?, b.build()?, c.build()?);
        asg.validate(self.graph)
            .with_context(|| format!("coins do not fit graph {}", self.graph))?;
        Ok(asg)
    }

    pub fn lattice(&self) -> Result<FiniteLattice> {
        let cells = self.cells.as_deref().unwrap_or(&[]);
        Ok(match (self.graph, cells) {
            (Graph::DiamondChain, [n]) => FiniteLattice::chain(*n, Boundary::Open)?,
            (Graph::Dice, [a, b]) => FiniteLattice::plane(*a, *b, Boundary::Open)?,
            _ => bail!("lattice size does not match graph {}", self.graph),
        })
    }
}
