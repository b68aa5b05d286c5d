//! Command-line flags and how they overlay a config file.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qwcage::coins::CoinSpec;
use qwcage::lattice::Graph;

use crate::config::{Command, ExperimentConfig, FluxSpec, InitSpec, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "qwcage", version, about = "Quantum walks, butterflies and Aharonov-Bohm cages on the diamond chain and T3 lattice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Quasi-energy bands over a flux grid (CSV f,k,epsilon).
    Bands(Flags),
    /// T3 Floquet-Hofstadter butterfly over rational fluxes.
    Butterfly(Flags),
    /// Arnoldi cage detection at one flux, or b_n(f) surfaces.
    Arnoldi(Flags),
    /// Site probabilities over time.
    Evolve(Flags),
    /// Predicted and measured cage walls for a hub-coin layout.
    Superlattice(Flags),
    /// Commensurate angles for the T3 period condition.
    #[command(name = "appendix-e")]
    AppendixE(Flags),
}

impl Sub {
    pub fn split(self) -> (Command, Flags) {
        match self {
            Sub::Bands(f) => (Command::Bands, f),
            Sub::Butterfly(f) => (Command::Butterfly, f),
            Sub::Arnoldi(f) => (Command::Arnoldi, f),
            Sub::Evolve(f) => (Command::Evolve, f),
            Sub::Superlattice(f) => (Command::Superlattice, f),
            Sub::AppendixE(f) => (Command::AppendixE, f),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config; flags given here override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the resolved config as JSON and exit.
    #[arg(long)]
    pub print_config: bool,
    /// dc or t3.
    #[arg(long)]
    pub graph: Option<Graph>,
    #[arg(long, allow_hyphen_values = true)]
    pub coin_a: Option<CoinSpec>,
    #[arg(long, allow_hyphen_values = true)]
    pub coin_b: Option<CoinSpec>,
    #[arg(long, allow_hyphen_values = true)]
    pub coin_c: Option<CoinSpec>,
    /// A value, a:b:n (end excluded) or q<=Q.
    #[arg(long, allow_hyphen_values = true)]
    pub flux: Option<FluxSpec>,
    /// Momentum samples per flux.
    #[arg(long)]
    pub k: Option<usize>,
    /// cell,kind,slot (cell `c` is the centre) or `all`.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<InitSpec>,
    /// Cells: `n` for dc, `n1,n2` for t3.
    #[arg(long)]
    pub cells: Option<String>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// name=v1,v2 or name=a:b:n; repeat for a product grid.
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Vec<SweepSpec>,
    /// Hub coins per cell, e.g. HHHHGHHHHG.
    #[arg(long)]
    pub layout: Option<String>,
    /// q1_max,q2_max (one value sets both).
    #[arg(long)]
    pub bounds: Option<String>,
    /// Primary output path; extras share its stem. Stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
    #[arg(long)]
    pub threads: Option<usize>,
}

fn int_list(s: &str, what: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().with_context(|| format!("{what} `{s}`: bad integer")))
        .collect()
}

impl Flags {
    /// Starts from the config file (if any) and applies every given flag.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                ExperimentConfig::from_json(&text).with_context(|| format!("in {}", p.display()))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(g) = self.graph {
            cfg.graph = g;
        }
        if self.coin_a.is_some() {
            cfg.coin_a = self.coin_a;
        }
        if self.coin_b.is_some() {
            cfg.coin_b = self.coin_b;
        }
        if self.coin_c.is_some() {
            cfg.coin_c = self.coin_c;
        }
        if self.flux.is_some() {
            cfg.flux = self.flux;
        }
        if self.k.is_some() {
            cfg.k = self.k;
        }
        if let Some(i) = self.init {
            cfg.init = i;
        }
        if let Some(c) = &self.cells {
            cfg.cells = Some(int_list(c, "cells")?);
        }
        if self.steps.is_some() {
            cfg.steps = self.steps;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if self.max_iter.is_some() {
            cfg.max_iter = self.max_iter;
        }
        if !self.sweep.is_empty() {
            cfg.sweep = self.sweep.clone();
        }
        if self.layout.is_some() {
            cfg.layout = self.layout.clone();
        }
        if let Some(b) = &self.bounds {
            cfg.bounds = Some(match int_list(b, "bounds")?.as_slice() {
                [n] => [*n, *n],
                [a, b] => [*a, *b],
                _ => bail!("bounds `{b}`: expected one or two integers"),
            });
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.svg {
            cfg.svg = true;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        Ok(cfg)
    }
}
