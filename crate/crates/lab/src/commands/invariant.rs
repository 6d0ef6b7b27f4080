use nambu_core::flow::integrate;
use nambu_core::hamilton::conservation_drift;
use nambu_core::symmetry::{absolute_invariant, relative_invariant, stokes_check, PrecheckOptions};
use nambu_core::{HamiltonianSystem, InvariantReport};

use super::{block, Run};
use crate::build::{self, System};
use crate::config::{Conservation, InvariantConfig};
use crate::error::{AtPath, ConfigError, Result};
use crate::output::{num, CsvTable};
use crate::report::Comparison;
use crate::Command;

pub fn invariant(run: &mut Run<'_>) -> Result<()> {
    let cfg = block(&run.cfg.invariant, "invariant", Command::Invariant)?;
    let cand = build::candidate(&cfg.candidate, &run.sys, "invariant.candidate")?;
    cand.validate(run.sys.mechanics()).at("invariant.candidate")?;
    match run.sys.clone() {
        System::Hamiltonian(h) => hamiltonian(run, cfg, &h, &cand),
        System::Nambu(_) => nambu(run, cfg, &cand),
    }
}

fn sweep_table(r: &InvariantReport) -> CsvTable {
    let mut t = CsvTable::new(["t", "value", "estimate"]);
    for ((time, v), e) in r.times.iter().zip(&r.values).zip(&r.estimates) {
        t.row(vec![num(*time), num(*v), e.map(num).unwrap_or_default()]);
    }
    t
}

fn nambu(run: &mut Run<'_>, cfg: &InvariantConfig, cand: &nambu_core::SymmetryCandidate) -> Result<()> {
    let n = run.sys.n();
    let times = build::times(block(&cfg.times, "invariant.times", Command::Invariant)?, "invariant.times")?;
    if cfg.cycle.is_none() && cfg.chain.is_none() {
        return Err(ConfigError::new("invariant.cycle", "missing: give a `cycle`, a `chain` or both").into());
    }
    if !cfg.starts.is_empty() || cfg.t_end.is_some() {
        return Err(ConfigError::new("invariant.starts", "trajectory starts apply to hamiltonian systems").into());
    }
    let pre = PrecheckOptions { samples: cfg.precheck_samples, seed: run.seed, tol: cfg.precheck_tol };
    let conserved = cfg.expect == Conservation::Conserved;
    let drift_tol = run.tol.unwrap_or(cfg.drift_tol);
    let m = run.sys.clone();
    let m = m.mechanics();

    let mut precheck = None;
    if let Some(c) = &cfg.cycle {
        let cycle = build::cycle(c, n, run.base, "invariant.cycle")?;
        if times[0] < cycle.t() {
            return Err(ConfigError::new("invariant.times.start", "sweep starts before the cycle time").into());
        }
        let r = relative_invariant(m, cand, &cycle, &times, &run.params, &pre)?;
        if conserved {
            run.report.check("relative invariant drift", r.drift, drift_tol, Comparison::AtMost);
        } else {
            run.report.check("relative invariant drift (broken symmetry)", r.drift, drift_tol, Comparison::Above);
        }
        if let Some(v) = cfg.expected_value {
            run.report.check("relative invariant value", (r.values[0] - v).abs(), cfg.value_tol, Comparison::AtMost);
        }
        for w in &r.refinement {
            run.report.warnings.push(format!("cycle under-resolved at t = {}: spacing grew {:.1}x", w.t, w.growth));
        }
        run.write_csv("invariant_relative.csv", &sweep_table(&r))?;
        precheck = Some(r.symmetry.clone());
        run.report.result("relative", r);
    }
    if let Some(c) = &cfg.chain {
        let chain = build::chain(c, n, run.base, "invariant.chain")?;
        let r = absolute_invariant(m, cand, &chain, &times, &run.params, &pre)?;
        let tol = cfg.absolute_drift_tol;
        if conserved {
            run.report.check("absolute invariant drift", r.drift, tol, Comparison::AtMost);
            let s = stokes_check(m, cand, &chain)?;
            run.report.check("stokes residual", s.residual, cfg.stokes_tol, Comparison::AtMost);
            run.report.result("stokes", s);
        } else {
            run.report.check("absolute invariant drift (broken symmetry)", r.drift, tol, Comparison::Above);
        }
        for w in &r.refinement {
            run.report.warnings.push(format!("chain under-resolved at t = {}: spacing grew {:.1}x", w.t, w.growth));
        }
        run.write_csv("invariant_absolute.csv", &sweep_table(&r))?;
        precheck = Some(r.symmetry.clone());
        run.report.result("absolute", r);
    }
    if let Some(s) = precheck {
        let cmp = if conserved { Comparison::AtMost } else { Comparison::Above };
        run.report.check("symmetry precondition", s.max_residual, s.tol, cmp);
    }
    Ok(())
}

fn hamiltonian(run: &mut Run<'_>, cfg: &InvariantConfig, h: &HamiltonianSystem, cand: &nambu_core::SymmetryCandidate) -> Result<()> {
    if cfg.cycle.is_some() || cfg.chain.is_some() {
        return Err(ConfigError::new("invariant", "hamiltonian systems check conserved functions; use `starts`").into());
    }
    if cfg.starts.is_empty() {
        return Err(ConfigError::new("invariant.starts", "missing: at least one trajectory start").into());
    }
    let t_end = cfg.t_end.ok_or_else(|| ConfigError::new("invariant.t_end", "missing"))?;
    if !(t_end > 0.0) {
        return Err(ConfigError::new("invariant.t_end", "must be positive").into());
    }
    let conserved = cfg.expect == Conservation::Conserved;
    let drift_tol = run.tol.unwrap_or(cfg.drift_tol);
    let f = h.conserved_function(cand, cfg.precheck_samples, run.seed, cfg.precheck_tol)?;
    let n = run.sys.n();
    let mut drift: f64 = 0.0;
    let mut table = CsvTable::new(["start", "initial_value", "drift"]);
    let mut initial = Vec::new();
    for (i, s) in cfg.starts.iter().enumerate() {
        let p0 = build::point(s, 0.0, n, &format!("invariant.starts[{i}]"))?;
        let traj = integrate(h, &p0, 0.0, t_end, &run.params)?;
        let d = conservation_drift(&f.field, &traj)?;
        let v0 = f.field.value(p0.coords()).map_err(nambu_core::Error::from)?;
        table.row(vec![i.to_string(), num(v0), num(d)]);
        initial.push(v0);
        drift = drift.max(d);
    }
    let cmp = if conserved { Comparison::AtMost } else { Comparison::Above };
    run.report.check("conserved function drift", drift, drift_tol, cmp);
    run.report.check("symmetry precondition", f.symmetry.max_residual, f.symmetry.tol, cmp);
    if let Some(v) = cfg.expected_value {
        run.report.check("conserved function value", (initial[0] - v).abs(), cfg.value_tol, Comparison::AtMost);
    }
    run.write_csv("conserved.csv", &table)?;
    run.report.result("initial_values", initial);
    run.report.result("drift", drift);
    run.report.result("symmetry", f.symmetry);
    Ok(())
}
