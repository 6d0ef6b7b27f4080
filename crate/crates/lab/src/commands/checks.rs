use nambu_core::mechanics::divergence;
use nambu_core::symmetry::check_symmetry_seeded;
use nambu_core::{ExtendedPoint, Mechanics};

use super::{block, Run};
use crate::build::{self, System};
use crate::config::Expect;
use crate::error::{AtPath, Result};
use crate::output::{num, CsvTable};
use crate::report::Comparison;
use crate::Command;

/// Per-sample `(point, value)` table, and the index of the largest `|value|`.
fn sweep(
    run: &mut Run<'_>,
    file: &str,
    column: &str,
    pts: &[ExtendedPoint],
    f: impl Fn(&ExtendedPoint) -> nambu_core::Result<f64>,
) -> Result<(f64, usize)> {
    let names = run.sys.coordinate_names();
    let mut table = CsvTable::new(["index".to_string(), "t".to_string()].into_iter().chain(names).chain([column.to_string()]));
    let mut worst = (0.0f64, 0);
    for (i, p) in pts.iter().enumerate() {
        let v = f(p).map_err(|e| nambu_core::Error::Sample { index: i, source: Box::new(e) })?;
        if !(v.abs() <= worst.0) {
            worst = (v.abs(), i);
        }
        let mut row = vec![i.to_string(), num(p.t())];
        row.extend(p.x().iter().map(|v| num(*v)));
        row.push(num(v));
        table.row(row);
    }
    run.write_csv(file, &table)?;
    Ok(worst)
}

pub fn dynamics(run: &mut Run<'_>) -> Result<()> {
    let cfg = block(&run.cfg.check_dynamics, "check_dynamics", Command::CheckDynamics)?;
    let tol = run.tol.or(cfg.tol).unwrap_or(1e-9);
    let pts = run.samples(cfg.region.as_ref(), cfg.samples, "check_dynamics")?;
    let (max, worst) = match &run.sys {
        System::Nambu(s) => {
            let s = s.clone();
            sweep(run, "dynamics.csv", "residual", &pts, |p| s.verify_dynamics(p))?
        }
        System::Hamiltonian(s) => {
            let s = s.clone();
            sweep(run, "dynamics.csv", "residual", &pts, |p| s.hamilton_velocity(p).map(|(_, r)| r))?
        }
    };
    run.report.result("samples", pts.len());
    run.report.result("worst_sample", worst);
    run.report.check("max dynamics residual", max, tol, Comparison::AtMost);
    Ok(())
}

pub fn liouville(run: &mut Run<'_>) -> Result<()> {
    let cfg = block(&run.cfg.check_liouville, "check_liouville", Command::CheckLiouville)?;
    let tol = run.tol.or(cfg.tol).unwrap_or(1e-6);
    let pts = run.samples(cfg.region.as_ref(), cfg.samples, "check_liouville")?;
    let sys = run.sys.clone();
    let m = sys.mechanics();
    let (max, worst) = sweep(run, "liouville.csv", "divergence", &pts, |p| divergence(|q| m.velocity(q), p))?;
    run.report.result("samples", pts.len());
    run.report.result("worst_sample", worst);
    run.report.check("max |div velocity|", max, tol, Comparison::AtMost);
    Ok(())
}

pub fn symmetry(run: &mut Run<'_>) -> Result<()> {
    let cfg = block(&run.cfg.check_symmetry, "check_symmetry", Command::CheckSymmetry)?;
    let tol = run.tol.unwrap_or(cfg.tol);
    if cfg.candidates.is_empty() {
        return Err(crate::error::ConfigError::new("check_symmetry.candidates", "need at least one candidate").into());
    }
    let m: &dyn Mechanics = run.sys.mechanics();
    let mut reports = Vec::new();
    for (i, c) in cfg.candidates.iter().enumerate() {
        let path = format!("check_symmetry.candidates[{i}]");
        let cand = build::candidate(c, &run.sys, &path)?;
        cand.validate(m).at(&path)?;
        reports.push((c.expect, check_symmetry_seeded(m, &cand, cfg.samples, run.seed, tol)?));
    }
    let mut table = CsvTable::new(["label", "max_residual", "worst_sample", "passed"]);
    for (expect, r) in &reports {
        let cmp = match expect {
            Expect::Pass => Comparison::AtMost,
            Expect::Fail => Comparison::Above,
        };
        run.report.check(format!("symmetry residual [{}]", r.label), r.max_residual, tol, cmp);
        table.row(vec![r.label.clone(), num(r.max_residual), r.worst_sample.to_string(), r.passed.to_string()]);
    }
    run.write_csv("symmetry.csv", &table)?;
    run.report.result("candidates", reports.into_iter().map(|(_, r)| r).collect::<Vec<_>>());
    Ok(())
}
