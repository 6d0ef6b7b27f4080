use nambu_core::symmetry::{check_momentum, max_over_samples, pandit_gangal_scaling_demo, verify_momentum_one_forms, MomentumCheck};
use nambu_core::MomentumSystem;

use super::{block, Run};
use crate::build::{self, System};
use crate::config::Expect;
use crate::error::{AtPath, ConfigError, Result};
use crate::output::{num, CsvTable};
use crate::report::Comparison;
use crate::Command;

pub fn momentum(run: &mut Run<'_>) -> Result<()> {
    let cfg = block(&run.cfg.momentum, "momentum", Command::Momentum)?;
    if cfg.generators.is_empty() {
        return Err(ConfigError::new("momentum.generators", "need at least one generator").into());
    }
    let n = run.sys.n();
    let degree = run.sys.form_degree() - 1;
    let tol = run.tol.unwrap_or(cfg.tol);
    let mut gens = Vec::new();
    let mut ps = Vec::new();
    for (i, g) in cfg.generators.iter().enumerate() {
        let path = format!("momentum.generators[{i}]");
        gens.push((g.label.clone(), build::vector_field(&g.xi, n, &format!("{path}.xi"))?));
        ps.push(build::form(&g.p, n, degree, &format!("{path}.p"))?);
    }
    let mut ms = MomentumSystem::new(gens, ps).at("momentum.generators")?;
    for (i, c) in cfg.combinations.iter().enumerate() {
        let path = format!("momentum.combinations[{i}]");
        let terms = c.terms.iter().map(|t| (t.generator, t.coeff)).collect();
        ms = ms.with_combination(c.label.clone(), terms).at(&path)?;
    }
    let samples = run.samples(None, cfg.samples, "momentum")?;
    let sys = run.sys.clone();

    let rows: Vec<MomentumCheck> = match &sys {
        System::Nambu(_) => {
            if !cfg.starts.is_empty() || cfg.t_end.is_some() {
                return Err(ConfigError::new("momentum.starts", "trajectory starts apply to hamiltonian systems").into());
            }
            verify_momentum_one_forms(sys.mechanics(), &ms, &samples, tol)?
        }
        System::Hamiltonian(h) => {
            if cfg.starts.is_empty() {
                return Err(ConfigError::new("momentum.starts", "missing: at least one trajectory start").into());
            }
            let t_end = cfg.t_end.ok_or_else(|| ConfigError::new("momentum.t_end", "missing"))?;
            let starts = cfg
                .starts
                .iter()
                .enumerate()
                .map(|(i, s)| build::point(s, 0.0, n, &format!("momentum.starts[{i}]")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let ext = h.verify_extended_momentum_map(&ms, &samples, &starts, t_end, &run.params, tol)?;
            for e in &ext {
                run.report.check(format!("P-dot drift [{}]", e.check.label), e.pdot_drift, cfg.pdot_tol, Comparison::AtMost);
            }
            run.report.result("extended", &ext);
            ext.into_iter().map(|e| e.check).collect()
        }
    };

    let mut table = CsvTable::new(["label", "closedness", "exactness", "passed"]);
    let residual = |r: &MomentumCheck| r.closedness.max(r.exactness);
    for (g, r) in cfg.generators.iter().zip(&rows) {
        let cmp = match g.expect {
            Expect::Pass => Comparison::AtMost,
            Expect::Fail => Comparison::Above,
        };
        run.report.check(format!("momentum residual [{}]", r.label), residual(r), tol, cmp);
    }
    for r in &rows[cfg.generators.len()..] {
        let terms = r.combination.as_deref().unwrap_or_default();
        let inputs: f64 = terms.iter().map(|(j, c)| c.abs() * residual(&rows[*j])).sum();
        run.report.check(format!("linearity excess [{}]", r.label), residual(r) - inputs, cfg.linearity_tol, Comparison::AtMost);
    }
    for r in &rows {
        table.row(vec![r.label.clone(), num(r.closedness), num(r.exactness), r.passed.to_string()]);
    }
    run.write_csv("momentum.csv", &table)?;
    run.report.result("rows", &rows);

    if let Some(s) = &cfg.scaling {
        scaling(run, s, &samples)?;
    }
    if let Some(g) = &cfg.gauge {
        gauge(run, g, &ms, degree, &samples, tol)?;
    }
    Ok(())
}

fn scaling(run: &mut Run<'_>, s: &crate::config::ScalingConfig, samples: &[nambu_core::ExtendedPoint]) -> Result<()> {
    let System::Nambu(sys) = run.sys.clone() else {
        return Err(ConfigError::new("momentum.scaling", "the scaling demo applies to nambu systems").into());
    };
    let n = sys.n();
    if n != 3 {
        return Err(ConfigError::new("momentum.scaling", "the scaling demo is defined for n = 3").into());
    }
    if s.lambdas.is_empty() {
        return Err(ConfigError::new("momentum.scaling.lambdas", "need at least one value").into());
    }
    let xi = build::vector_field(&s.generator, n, "momentum.scaling.generator")?;
    let p1 = build::field(&s.p1, n, "momentum.scaling.p1")?;
    let p2 = build::field(&s.p2, n, "momentum.scaling.p2")?;
    let mut table = CsvTable::new(["lambda", "lhs_scale", "rhs_scale", "ratio"]);
    let mut reports = Vec::new();
    for &l in &s.lambdas {
        let r = pandit_gangal_scaling_demo(&sys, &xi, &p1, &p2, l, samples)?;
        run.report.check(format!("scaling ratio - lambda [lambda = {l}]"), (r.ratio - l).abs(), s.tol, Comparison::AtMost);
        if r.degenerate {
            run.warn("lambda = 1 cannot distinguish the two sides");
        }
        table.row(vec![num(l), num(r.lhs_scale), num(r.rhs_scale), num(r.ratio)]);
        reports.push(r);
    }
    run.write_csv("scaling.csv", &table)?;
    run.report.result("scaling", reports);
    Ok(())
}

fn gauge(
    run: &mut Run<'_>,
    g: &crate::config::GaugeConfig,
    ms: &MomentumSystem,
    degree: usize,
    samples: &[nambu_core::ExtendedPoint],
    tol: f64,
) -> Result<()> {
    let n = run.sys.n();
    let Some((label, xi)) = ms.generators.get(g.generator) else {
        return Err(ConfigError::new("momentum.gauge.generator", "unknown generator index").into());
    };
    let shift = build::form(&g.shift, n, degree, "momentum.gauge.shift")?;
    let (closed, _) = max_over_samples(&shift.exterior_derivative()?, samples)?;
    run.report.check("gauge shift closedness", closed, tol, Comparison::AtMost);
    let p = &ms.candidates[g.generator];
    let shifted = p.add(&shift)?;
    let sys = run.sys.clone();
    let r = check_momentum(sys.mechanics(), &format!("{label} (gauged)"), xi, &shifted, samples, tol)?;
    run.report.check(format!("momentum residual [{}]", r.label), r.closedness.max(r.exactness), tol, Comparison::AtMost);
    let mut table = CsvTable::new(["cycle", "original", "gauged", "difference"]);
    let mut worst: f64 = 0.0;
    for (i, c) in g.cycles.iter().enumerate() {
        let path = format!("momentum.gauge.cycles[{i}]");
        let cycle = build::cycle(c, n, run.base, &path)?;
        if cycle.p() != degree {
            return Err(ConfigError::new(path, format!("cycle dimension must equal the momentum degree {degree}")).into());
        }
        let a = cycle.integrate(p)?.value;
        let b = cycle.integrate(&shifted)?.value;
        worst = worst.max((a - b).abs());
        table.row(vec![i.to_string(), num(a), num(b), num(a - b)]);
    }
    if !g.cycles.is_empty() {
        run.report.check("gauge change of cycle integrals", worst, g.tol, Comparison::AtMost);
        run.write_csv("gauge.csv", &table)?;
    }
    run.report.result("gauge", r);
    Ok(())
}
