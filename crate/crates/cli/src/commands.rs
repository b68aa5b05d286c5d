//! The six subcommands. Each takes a filled, validated config and returns
//! its artifacts without touching the disk.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use qwcage::caging::{
    appendix_e_search, arnoldi, critical_flux_scan, default_n_star, detect_cage_with, k_out_action, Layout,
    SuperlatticeVerdict,
};
use qwcage::coins::{CoinAssignment, CoinSpec};
use qwcage::lattice::{BasisState, FiniteLattice, GaugeField, Graph, Site, SiteKind};
use qwcage::spectrum::{butterfly, Butterfly};
use qwcage::walk::{evolve_with, site_csv, site_probabilities, StateVector, WalkOperator, SITE_HEADER};
use qwcage::Error;

use crate::config::{CellRef, Command, ExperimentConfig, FluxSpec, InitSpec, SweepSpec};
use crate::output::{Artifacts, Svg};

/// Probability below which a site counts as empty.
const OCCUPIED: f64 = 1e-12;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn execute(cmd: Command, cfg: &ExperimentConfig) -> Result<Artifacts> {
    match cmd {
        Command::Bands => cmd_bands(cfg),
        Command::Butterfly => cmd_butterfly(cfg),
        Command::Arnoldi => cmd_arnoldi(cfg),
        Command::Evolve => cmd_evolve(cfg),
        Command::Superlattice => cmd_superlattice(cfg),
        Command::AppendixE => cmd_appendix_e(cfg),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn coin_json(cfg: &ExperimentConfig) -> Value {
    let show = |c: Option<CoinSpec>| c.map(|c| c.to_string());
    json!({"a": show(cfg.coin_a), "b": show(cfg.coin_b), "c": show(cfg.coin_c)})
}

fn single_flux(cfg: &ExperimentConfig, what: &str) -> Result<f64> {
    match cfg.flux {
        Some(FluxSpec::Value(f)) => Ok(f),
        Some(other) => bail!("{what} needs a single flux value, got `{other}`"),
        None => bail!("flux is not set"),
    }
}

fn resolve_cell(lattice: &FiniteLattice, cell: CellRef) -> Result<[i64; 2]> {
    let c = match cell {
        CellRef::Center => lattice.center(),
        CellRef::At(c) => c,
    };
    if !lattice.contains(c) {
        bail!("initial cell {:?} is outside the lattice", c);
    }
    Ok(c)
}

/// Localized initial states with their labels; `all` expands to the hub
/// slots of the central cell.
fn initial_states(cfg: &ExperimentConfig, lattice: &FiniteLattice) -> Result<Vec<(String, StateVector)>> {
    let graph = lattice.graph();
    let states: Vec<BasisState> = match cfg.init {
        InitSpec::All => {
            let c = lattice.center();
            (0..graph.coordination(SiteKind::HubA))
                .map(|slot| BasisState::new(c, SiteKind::HubA, slot))
                .collect()
        }
        InitSpec::State { cell, kind, slot } => {
            vec![BasisState::new(resolve_cell(lattice, cell)?, kind, slot)]
        }
    };
    states
        .into_iter()
        .map(|s| {
            let v = StateVector::localized(lattice, &s).with_context(|| format!("initial state {s}"))?;
            Ok((s.to_string(), v))
        })
        .collect()
}

fn band_svg(b: &Butterfly) -> String {
    let (lo, hi) = b
        .slices
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.f), hi.max(s.f)));
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let mut svg = Svg::new((lo, hi), (-std::f64::consts::PI, std::f64::consts::PI), "f", "epsilon");
    let pts = b
        .slices
        .iter()
        .flat_map(|s| s.spectra.iter().flatten().map(move |&e| (s.f, e)));
    svg.points(pts, 0.8);
    for f in b.pinched_fluxes() {
        svg.vline(f);
    }
    svg.finish()
}

fn spectrum_artifacts(cmd: Command, cfg: &ExperimentConfig) -> Result<Artifacts> {
    let coins = cfg.assignment()?;
    let flux = cfg.flux.context("flux is not set")?;
    let k = cfg.k.context("k is not set")?;
    let b = butterfly(cfg.graph, &coins, &flux.sampling(), k)?;
    let pinch = b.pinch();
    let pinched = b.pinched_fluxes();
    let summary = json!({
        "schema": 1,
        "command": cmd.name(),
        "graph": cfg.graph.to_string(),
        "coins": coin_json(cfg),
        "flux": flux.to_string(),
        "k_samples": k,
        "fluxes": b.slices.len(),
        "points": b.point_count(),
        "f_star": pinch.f_star,
        "width": pinch.width,
        "pinched": pinch.pinched,
        "pinched_fluxes": pinched,
    });
    let mut art = Artifacts::new(b.to_csv()).with_extra("json", pretty(&summary));
    if cfg.svg {
        art = art.with_extra("svg", band_svg(&b));
    }
    art.summary.push(if pinch.pinched {
        let list: Vec<String> = pinched.iter().map(|f| format!("{f:.6}")).collect();
        format!("pinch detected at f = {:.6} (pinched fluxes: {})", pinch.f_star, list.join(", "))
    } else {
        format!(
            "no pinch; narrowest bands at f = {:.6} (width {:.3e})",
            pinch.f_star, pinch.width
        )
    });
    art.summary
        .push(format!("{} fluxes, {} quasi-energies", b.slices.len(), b.point_count()));
    Ok(art)
}

fn cmd_bands(cfg: &ExperimentConfig) -> Result<Artifacts> {
    spectrum_artifacts(Command::Bands, cfg)
}

fn cmd_butterfly(cfg: &ExperimentConfig) -> Result<Artifacts> {
    if cfg.graph != Graph::Dice {
        bail!("butterfly runs on the t3 lattice; use `bands` for the diamond chain");
    }
    spectrum_artifacts(Command::Butterfly, cfg)
}

/// Every combination of sweep values, first sweep outermost.
fn sweep_points(sweeps: &[SweepSpec]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for s in sweeps {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                s.values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Rim coins after applying one sweep point. ω is swept on `C_c` only.
fn swept_assignment(cfg: &ExperimentConfig, point: &[f64]) -> Result<CoinAssignment> {
    let mut c = cfg.clone();
    for (s, &v) in cfg.sweep.iter().zip(point) {
        let rc = c.coin_c.context("coin_c is not set")?;
        c.coin_c = Some(s.param.apply(rc, v)?);
        if s.param != crate::config::SweepParam::Omega {
            let rb = c.coin_b.context("coin_b is not set")?;
            c.coin_b = Some(s.param.apply(rb, v)?);
        }
    }
    c.assignment()
}

fn cmd_arnoldi(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let lattice = cfg.lattice()?;
    let inits = initial_states(cfg, &lattice)?;
    let flux = cfg.flux.context("flux is not set")?;
    if let (FluxSpec::Value(f), true) = (flux, cfg.sweep.is_empty()) {
        return arnoldi_reports(cfg, lattice, &inits, f);
    }
    arnoldi_surface(cfg, &lattice, &inits[0], flux)
}

fn arnoldi_reports(
    cfg: &ExperimentConfig,
    lattice: FiniteLattice,
    inits: &[(String, StateVector)],
    f: f64,
) -> Result<Artifacts> {
    let coins = cfg.assignment()?;
    let max_iter = cfg.max_iter.context("max_iter is not set")?;
    let steps = cfg.steps.context("steps is not set")?;
    let w = WalkOperator::new(lattice, GaugeField::natural(cfg.graph, f), &coins)?;
    let reports: Vec<Value> = inits
        .par_iter()
        .map(|(label, psi0)| -> Result<Value> {
            let report = detect_cage_with(&w, psi0, cfg.tol, steps, max_iter)?;
            let ar = arnoldi(&w, psi0, max_iter, cfg.tol)?;
            let relative: Vec<f64> = (1..=ar.b.len()).map(|n| ar.relative_b(n)).collect();
            let mut v = report.to_json();
            v["init"] = json!(label);
            v["relative_b"] = json!(relative);
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let mut union: Vec<Site> = Vec::new();
    for r in &reports {
        if r["caged"] == json!(true) {
            let sites: Vec<Site> = serde_json::from_value(r["support"].clone())?;
            union.extend(sites);
        }
    }
    union.sort();
    union.dedup();
    let all_caged = reports.iter().all(|r| r["caged"] == json!(true));
    let out = json!({
        "schema": 1,
        "command": "arnoldi",
        "graph": cfg.graph.to_string(),
        "coins": coin_json(cfg),
        "f": f,
        "tol": cfg.tol,
        "max_iter": max_iter,
        "verify_steps": steps,
        "all_caged": all_caged,
        "union_support": union,
        "reports": reports,
    });
    let mut art = Artifacts::new(pretty(&out));
    for r in &reports {
        let line = if r["caged"] == json!(true) {
            format!(
                "{}: caged, n_c = {}, radius {}, period {}",
                r["init"].as_str().unwrap_or("?"),
                r["n_c"],
                r["radius"],
                r["period"]
            )
        } else {
            format!(
                "{}: not caged within {} Arnoldi steps",
                r["init"].as_str().unwrap_or("?"),
                max_iter
            )
        };
        art.summary.push(line);
    }
    Ok(art)
}

fn arnoldi_surface(
    cfg: &ExperimentConfig,
    lattice: &FiniteLattice,
    init: &(String, StateVector),
    flux: FluxSpec,
) -> Result<Artifacts> {
    let grid = flux.values()?;
    let n_star = default_n_star(cfg.graph);
    let points = sweep_points(&cfg.sweep);
    let names: Vec<&str> = cfg.sweep.iter().map(|s| s.param.name()).collect();
    let scans = points
        .iter()
        .map(|p| {
            let coins = swept_assignment(cfg, p)?;
            Ok(critical_flux_scan(lattice, &coins, &init.1, &grid, n_star)?)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = String::new();
    for n in &names {
        let _ = write!(csv, "{n},");
    }
    let _ = writeln!(csv, "f,b{n_star}");
    let mut blocks = Vec::new();
    for (p, scan) in points.iter().zip(&scans) {
        for &(f, b) in &scan.curve {
            for v in p {
                let _ = write!(csv, "{v:.12},");
            }
            let _ = writeln!(csv, "{f:.12},{b:.12e}");
        }
        let params: serde_json::Map<String, Value> =
            names.iter().zip(p).map(|(n, v)| (n.to_string(), json!(v))).collect();
        blocks.push(json!({
            "params": params,
            "global_minimum": scan.global_minimum(),
            "minima": scan.minima,
        }));
    }
    let out = json!({
        "schema": 1,
        "command": "arnoldi",
        "graph": cfg.graph.to_string(),
        "coins": coin_json(cfg),
        "init": init.0,
        "flux": flux.to_string(),
        "n_star": n_star,
        "scans": blocks,
    });
    let mut art = Artifacts::new(csv).with_extra("json", pretty(&out));
    if cfg.svg {
        let (lo, hi) = grid
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &f| (lo.min(f), hi.max(f)));
        let top = scans
            .iter()
            .flat_map(|s| s.curve.iter().map(|c| c.1))
            .fold(0.0, f64::max)
            .max(1e-3);
        let hi = if hi > lo { hi } else { lo + 1.0 };
        let mut svg = Svg::new((lo, hi), (0.0, top), "f", &format!("b{n_star}"));
        for (i, scan) in scans.iter().enumerate() {
            svg.polyline(&scan.curve, PALETTE[i % PALETTE.len()]);
        }
        art = art.with_extra("svg", svg.finish());
    }
    for (p, scan) in points.iter().zip(&scans) {
        let label: Vec<String> = names.iter().zip(p).map(|(n, v)| format!("{n}={v:.4}")).collect();
        if let Some(m) = scan.global_minimum() {
            art.summary.push(format!(
                "{}min b{n_star} = {:.3e} at f = {:.6}",
                if label.is_empty() { String::new() } else { format!("{}: ", label.join(" ")) },
                m.b,
                m.f
            ));
        }
    }
    Ok(art)
}

fn cmd_evolve(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let lattice = cfg.lattice()?;
    let steps = cfg.steps.context("steps is not set")?;
    let f = single_flux(cfg, "evolve")?;
    let inits = initial_states(cfg, &lattice)?;
    let [(label, psi0)] = inits.as_slice() else {
        bail!("evolve needs a single initial state, not `all`");
    };
    let coins = cfg.assignment()?;
    let w = WalkOperator::new(lattice.clone(), GaugeField::natural(cfg.graph, f), &coins)?;
    let graph = cfg.graph;
    let c0 = resolve_cell(
        &lattice,
        match cfg.init {
            InitSpec::State { cell, .. } => cell,
            InitSpec::All => CellRef::Center,
        },
    )?;

    let mut art = Artifacts::new(String::new());
    let need = 2 * steps as i64 + 4;
    if cfg.cells.as_deref().unwrap_or(&[]).iter().any(|&n| n < need) {
        art.summary.push(format!(
            "warning: lattice smaller than 2*steps+4 = {need} cells; the wavefront may touch the boundary"
        ));
    }

    let mut csv = format!("{SITE_HEADER}\n");
    let mut radius = Vec::with_capacity(steps + 1);
    let mut period = None;
    let mut boundary_step = None;
    let mut heat = Vec::new();
    let states = lattice.basis();
    evolve_with(&w, psi0, steps, |t, psi| {
        let probs = site_probabilities(&lattice, psi);
        csv.push_str(&site_csv(graph, t, &probs, 0.0));
        if cfg.svg {
            heat.extend(probs.iter().filter(|(_, &p)| p > OCCUPIED).map(|(s, &p)| ProbRow {
                step: t,
                x: graph.cartesian_position(s.cell, s.kind)[0],
                p,
            }));
        }
        let r = probs
            .iter()
            .filter(|(_, &p)| p > OCCUPIED)
            .map(|(s, _)| graph.cell_distance(c0, s.cell))
            .max()
            .unwrap_or(0);
        radius.push(r);
        if boundary_step.is_none()
            && states
                .iter()
                .zip(&psi.amps)
                .any(|(s, a)| a.norm_sqr() > OCCUPIED && lattice.is_dangling(s))
        {
            boundary_step = Some(t);
        }
        if t > 0 && period.is_none() && psi.equal_up_to_phase(psi0, cfg.tol) {
            period = Some(t);
        }
    });
    if let Some(t) = boundary_step {
        art.summary
            .push(format!("warning: the walker reached the open boundary at step {t}"));
    }
    art.summary.push(match period {
        Some(p) => format!("returns to the initial state (up to phase) at T = {p}"),
        None => format!("no return to the initial state within {steps} steps"),
    });
    art.summary
        .push(format!("final support radius {}", radius.last().copied().unwrap_or(0)));

    let meta = json!({
        "schema": 1,
        "command": "evolve",
        "graph": graph.to_string(),
        "coins": coin_json(cfg),
        "f": f,
        "init": label,
        "steps": steps,
        "period": period,
        "radius": radius,
        "boundary_reached": boundary_step,
    });
    if cfg.svg {
        art = art.with_extra("svg", evolve_svg(&heat, steps));
    }
    art.primary.contents = csv;
    Ok(art.with_extra("json", pretty(&meta)))
}

struct ProbRow {
    step: usize,
    x: f64,
    p: f64,
}

/// Space-time intensity map; x is the site's horizontal position.
fn evolve_svg(cells: &[ProbRow], steps: usize) -> String {
    let (lo, hi) = cells
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.x), hi.max(r.x)));
    let (lo, hi) = if hi > lo { (lo - 1.0, hi + 1.0) } else { (-1.0, 1.0) };
    let mut svg = Svg::new((lo, hi), (-0.5, steps as f64 + 0.5), "x", "T");
    for r in cells {
        svg.cell(r.x, r.step as f64, 0.5, 1.0, r.p.sqrt());
    }
    svg.finish()
}

fn cmd_superlattice(cfg: &ExperimentConfig) -> Result<Artifacts> {
    if cfg.graph != Graph::DiamondChain {
        bail!("superlattice runs on the diamond chain");
    }
    let text = cfg.layout.as_deref().context("superlattice needs --layout")?;
    let layout: Layout = text.parse()?;
    let f = single_flux(cfg, "superlattice")?;
    let steps = cfg.steps.context("steps is not set")?;
    let rim = match cfg.coin_c {
        Some(CoinSpec::U2(p)) => p,
        Some(other) => bail!("superlattice rims must be U2 coins, got {other}"),
        None => bail!("coin_c is not set"),
    };
    let len = layout.len() as i64;
    let explicit = match cfg.init {
        InitSpec::All => None,
        InitSpec::State { cell, kind, slot: _ } => {
            let n = match cell {
                CellRef::Center => len / 2,
                CellRef::At([n, 0]) => n,
                CellRef::At(c) => bail!("diamond-chain cells are one-dimensional, got {:?}", c),
            };
            if !(0..len).contains(&n) {
                bail!("initial cell {n} is outside the layout");
            }
            Some(Site { cell: [n, 0], kind })
        }
    };
    let sites: Vec<Site> = match explicit {
        Some(s) => vec![s],
        None => (0..len)
            .flat_map(|n| SiteKind::ALL.into_iter().map(move |kind| Site { cell: [n, 0], kind }))
            .filter(|s| s.kind.is_hub() || s.cell[0] + 1 < len)
            .collect(),
    };
    let verdicts: Vec<Option<SuperlatticeVerdict>> = sites
        .par_iter()
        .map(|&s| match qwcage::caging::verify_superlattice_cage_with(&layout, s, f, steps, rim) {
            Ok(v) => Ok(Some(v)),
            Err(Error::LatticeTooSmall(_)) if explicit.is_none() => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<qwcage::Result<_>>()?;
    let verdicts: Vec<SuperlatticeVerdict> = verdicts.into_iter().flatten().collect();
    if verdicts.is_empty() {
        bail!("no initial site has walls inside the layout; lengthen it");
    }
    let k_out = match k_out_action(rim, f) {
        Ok(k) => Some(k),
        Err(Error::NoOutChannel) => None,
        Err(e) => return Err(e.into()),
    };
    let agree = verdicts.iter().filter(|v| v.agrees).count();
    let caged = verdicts.iter().filter(|v| v.caged).count();
    let out = json!({
        "schema": 1,
        "command": "superlattice",
        "layout": layout.to_string(),
        "f": f,
        "rim": CoinSpec::U2(rim).to_string(),
        "steps": steps,
        "k_out": k_out,
        "all_agree": agree == verdicts.len(),
        "caged": caged,
        "results": verdicts,
    });
    let mut art = Artifacts::new(pretty(&out));
    art.summary.push(format!(
        "{agree}/{} predictions verified, {caged} caged",
        verdicts.len()
    ));
    Ok(art)
}

fn cmd_appendix_e(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let [q1, q2] = cfg.bounds.context("bounds are not set")?;
    let sols = appendix_e_search(q1, q2)?;
    let nontrivial: Vec<_> = sols.iter().filter(|s| !s.trivial).collect();
    let out = json!({
        "schema": 1,
        "command": "appendix-e",
        "q1_max": q1,
        "q2_max": q2,
        "solutions": sols,
    });
    let mut art = Artifacts::new(pretty(&out));
    art.summary.push(format!(
        "{} solutions, {} non-trivial",
        sols.len(),
        nontrivial.len()
    ));
    for s in nontrivial {
        art.summary.push(format!(
            "alpha = {}pi/{}, companion angle {}pi/{}, period {}",
            s.p1, s.q1, s.p2, s.q2, s.period
        ));
    }
    Ok(art)
}
