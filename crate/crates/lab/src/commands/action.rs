use nambu_core::action::{boundary_term, hamiltonian_action_check, takhtajan_action, trajectory_chain, vary_action, VariationField};
use nambu_core::grid::Axis;
use nambu_core::transport::{build_solution_surface_on, SolutionSurface};
use nambu_core::{Field, VectorField};

use super::{block, Run};
use crate::build::{self, System};
use crate::config::{ActionConfig, TimeAxisKind, VariationConfig, VariationExpect};
use crate::error::{AtPath, ConfigError, Result};
use crate::output::{num, CsvTable};
use crate::report::Comparison;
use crate::Command;

/// Largest clamped boundary component tolerated for an extremality check.
const CLAMP_TOL: f64 = 1e-12;

enum Domain {
    Surface(SolutionSurface),
    Trajectory(nambu_core::Chain),
}

pub fn action(run: &mut Run<'_>) -> Result<()> {
    let cfg = block(&run.cfg.action, "action", Command::Action)?;
    if cfg.variations.is_empty() {
        return Err(ConfigError::new("action.variations", "need at least one variation").into());
    }
    let n = run.sys.n();
    let sys = run.sys.clone();
    let m = sys.mechanics();
    let domain = match (&cfg.surface, &cfg.trajectory) {
        (Some(s), None) => {
            let cycle = build::cycle(&s.cycle, n, run.base, "action.surface.cycle")?;
            let t1 = cycle.t();
            let axis = match s.time_axis {
                TimeAxisKind::Chebyshev => Axis::chebyshev(t1, s.t2, s.time_samples),
                TimeAxisKind::Uniform => Axis::uniform(t1, s.t2, s.time_samples),
            };
            axis.validate(cycle.p()).at("action.surface")?;
            if cycle.p() + 1 != sys.form_degree() {
                return Err(ConfigError::new("action.surface.cycle", "cycle dimension must be one below the form degree").into());
            }
            Domain::Surface(build_solution_surface_on(m, &cycle, axis, &run.params)?)
        }
        (None, Some(t)) => {
            if !matches!(sys, System::Hamiltonian(_)) {
                return Err(ConfigError::new("action.trajectory", "single trajectories apply to hamiltonian systems").into());
            }
            let p0 = build::point(&t.start, t.t1, n, "action.trajectory.start")?;
            if !(t.t2 > t.t1) {
                return Err(ConfigError::new("action.trajectory.t2", "need t2 > t1").into());
            }
            Domain::Trajectory(trajectory_chain(m, &p0, t.t1, t.t2, t.samples, &run.params)?)
        }
        (Some(_), Some(_)) => return Err(ConfigError::new("action", "give either `surface` or `trajectory`, not both").into()),
        (None, None) => return Err(ConfigError::new("action.surface", "missing: give a `surface` or a `trajectory`").into()),
    };
    let chain = match &domain {
        Domain::Surface(s) => s.chain(),
        Domain::Trajectory(c) => c,
    };
    let s = takhtajan_action(m, chain)?;
    run.report.result("action", s);
    if let Some(v) = cfg.expected_action {
        run.report.check("action value", (s.value - v).abs(), cfg.action_tol, Comparison::AtMost);
    }

    let mut table = CsvTable::new(["variation", "epsilon", "delta_s"]);
    let mut reports = serde_json::Map::new();
    for (i, v) in cfg.variations.iter().enumerate() {
        let path = format!("action.variations[{i}]");
        let w = variation(v, n, &path)?;
        let r = match (&domain, &sys) {
            (Domain::Surface(surf), _) => vary_action(m, surf, &w, &cfg.epsilons).at("action.epsilons")?,
            (Domain::Trajectory(c), System::Hamiltonian(h)) => hamiltonian_action_check(h, c, &w, &cfg.epsilons).at("action.epsilons")?,
            (Domain::Trajectory(_), System::Nambu(_)) => unreachable!("rejected above"),
        };
        for (e, d) in r.epsilons.iter().zip(&r.delta_s) {
            table.row(vec![v.label.clone(), num(*e), num(*d)]);
        }
        let mut entry = serde_json::to_value(&r).expect("report serializes");
        assess(run, cfg, v, &r);
        if let (VariationExpect::Boundary, Domain::Surface(surf), 3) = (v.expect, &domain, n) {
            let bt = boundary_term(m, surf, &w)?;
            let mismatch = (r.first_variation - bt.value).abs() / bt.value.abs();
            run.report.check(
                format!("first variation vs explicit boundary term [{}]", v.label),
                mismatch,
                cfg.boundary_rtol,
                Comparison::AtMost,
            );
            entry["boundary_term"] = serde_json::to_value(bt).expect("serializes");
        }
        reports.insert(v.label.clone(), entry);
    }
    run.write_csv("variations.csv", &table)?;
    run.report.result("variations", reports);
    Ok(())
}

fn variation(v: &VariationConfig, n: usize, path: &str) -> Result<VariationField, ConfigError> {
    if v.w.len() != n {
        return Err(ConfigError::new(format!("{path}.w"), format!("expected {n} spatial components, got {}", v.w.len())));
    }
    let mut comps = v.w.iter().enumerate().map(|(k, c)| build::field(c, n, &format!("{path}.w[{k}]"))).collect::<Result<Vec<_>, _>>()?;
    comps.push(Field::zero());
    let clamp = if v.clamp.is_empty() { vec![false; n] } else { v.clamp.clone() };
    VariationField::new(VectorField::new(comps), clamp).at(&format!("{path}.clamp"))
}

fn assess(run: &mut Run<'_>, cfg: &ActionConfig, v: &VariationConfig, r: &nambu_core::action::ActionReport) {
    let max_delta = r.delta_s.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let label = &v.label;
    match v.expect {
        VariationExpect::Zero => {
            run.report.check(format!("max |delta S| [{label}]"), max_delta, 0.0, Comparison::AtMost);
        }
        VariationExpect::Extremal => {
            run.report.check(format!("clamp violation [{label}]"), r.clamp_violation, CLAMP_TOL, Comparison::AtMost);
            match r.slope {
                Some(s) => {
                    run.report.check(format!("delta S slope [{label}]"), s, cfg.min_slope, Comparison::AtLeast);
                }
                None => {
                    run.report.check(format!("max |delta S| [{label}]"), max_delta, 0.0, Comparison::AtMost);
                }
            }
        }
        VariationExpect::Boundary => {
            let tol = run.tol.unwrap_or(cfg.boundary_rtol);
            run.report.check(format!("first variation vs boundary prediction [{label}]"), r.relative_mismatch(), tol, Comparison::AtMost);
        }
    }
}
