use nambu_core::flow::integrate;
use nambu_core::transport::{refinement_check, transport_cycle};

use super::{block, relative_drift, Run};
use crate::build;
use crate::error::{ConfigError, Result};
use crate::output::{num, points_table, CsvTable};
use crate::report::Comparison;
use crate::Command;

pub fn simulate(run: &mut Run<'_>) -> Result<()> {
    let cfg = block(&run.cfg.simulate, "simulate", Command::Simulate)?;
    let n = run.sys.n();
    let p0 = build::point(&cfg.start, cfg.t0, n, "simulate.start")?;
    if !(cfg.t1 > cfg.t0) {
        return Err(ConfigError::new("simulate.t1", "need t1 > t0").into());
    }
    if cfg.every == 0 {
        return Err(ConfigError::new("simulate.every", "must be at least 1").into());
    }
    let cycle = match &cfg.cycle {
        Some(c) => Some(build::cycle(c, n, run.base, "simulate.cycle")?),
        None => None,
    };

    let traj = integrate(run.sys.mechanics(), &p0, cfg.t0, cfg.t1, &run.params)?;
    let pts = traj.points();
    let last = pts.len() - 1;
    let names = run.sys.coordinate_names();
    let mut table = CsvTable::new(["sample".to_string(), "t".to_string()].into_iter().chain(names.iter().cloned()));
    for (k, p) in pts.iter().enumerate().filter(|(k, _)| k % cfg.every == 0 || *k == last) {
        let mut row = vec![k.to_string(), num(p.t())];
        row.extend(p.x().iter().map(|v| num(*v)));
        table.row(row);
    }
    run.write_csv("trajectory.csv", &table)?;
    run.report.result("steps", last);
    run.report.result("final_t", pts[last].t());
    run.report.result("final_state", pts[last].x());

    let tol = run.tol.or(cfg.conserve_tol);
    let mut drifts = serde_json::Map::new();
    for (name, h) in run.sys.hamiltonians() {
        if h.coord_mask(n) & (1 << n) != 0 {
            run.warn(format!("{name} depends on t; conservation not checked"));
            continue;
        }
        let values =
            pts.iter().map(|p| h.eval_at(p.coords())).collect::<std::result::Result<Vec<_>, _>>().map_err(nambu_core::Error::from)?;
        let d = relative_drift(&values);
        drifts.insert(name.clone(), d.into());
        if let Some(tol) = tol {
            run.report.check(format!("relative drift of {name}"), d, tol, Comparison::AtMost);
        }
    }
    run.report.result("relative_drift", drifts);

    if let Some(c) = cycle {
        let moved = transport_cycle(run.sys.mechanics(), &c, cfg.t1, &run.params)?;
        if let Some(w) = refinement_check(c.as_chain(), moved.as_chain()) {
            run.warn(format!("transported cycle under-resolved: spacing grew {:.1}x near sample {}", w.growth, w.sample));
            run.report.result("refinement", w);
        }
        run.write_csv("cycle_start.csv", &points_table(&names, c.points()))?;
        run.write_csv("cycle_end.csv", &points_table(&names, moved.points()))?;
    }
    Ok(())
}
