use nambu_core::action::takhtajan_action;
use nambu_core::expr::{parse as parse_expr, Expr};
use nambu_core::fit::log_log_slope;
use nambu_core::flow::flow_to;
use nambu_core::grid::Axis;
use nambu_core::transport::build_solution_surface_on;
use nambu_core::{Cycle, IntegratorParams};
use serde::Serialize;

use super::{block, Run};
use crate::build;
use crate::config::{StudyConfig, StudyKind};
use crate::error::{AtPath, ConfigError, Result};
use crate::output::{num, CsvTable};
use crate::report::Comparison;
use crate::Command;

#[derive(Debug, Clone, Serialize)]
struct Row {
    resolution: f64,
    value: f64,
    /// Against the exact value, or the reference resolution.
    error: Option<f64>,
    /// `log(e_{k−1}/e_k) / log(h_{k−1}/h_k)` against the previous row.
    local_order: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct Study {
    label: String,
    kind: StudyKind,
    reference: Option<f64>,
    rows: Vec<Row>,
    fitted_order: Option<f64>,
}

pub fn convergence(run: &mut Run<'_>) -> Result<()> {
    let cfg = block(&run.cfg.convergence, "convergence", Command::Convergence)?;
    if cfg.studies.is_empty() {
        return Err(ConfigError::new("convergence.studies", "need at least one study").into());
    }
    let mut out = Vec::new();
    for (i, s) in cfg.studies.iter().enumerate() {
        let path = format!("convergence.studies[{i}]");
        let study = match s.kind {
            StudyKind::IntegratorOrder => integrator_order(run, s, &path)?,
            StudyKind::CycleQuadrature => cycle_quadrature(run, s, &path)?,
            StudyKind::SurfaceAction => surface_action(run, s, &path)?,
        };
        assert_orders(run, s, &study);
        let mut table = CsvTable::new(["resolution", "value", "error", "local_order"]);
        for r in &study.rows {
            table.row(vec![
                num(r.resolution),
                num(r.value),
                r.error.map(num).unwrap_or_default(),
                r.local_order.map(num).unwrap_or_default(),
            ]);
        }
        run.write_csv(&format!("convergence_{}.csv", file_stem(&s.label)), &table)?;
        out.push(study);
    }
    run.report.result("studies", out);
    Ok(())
}

fn file_stem(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c.to_ascii_lowercase() } else { '_' }).collect()
}

fn assert_orders(run: &mut Run<'_>, s: &StudyConfig, study: &Study) {
    let label = &s.label;
    if s.order_min.is_some() || s.order_max.is_some() {
        // A missing fit (errors at round-off) cannot confirm an order.
        let order = study.fitted_order.unwrap_or(f64::NAN);
        if let Some(lo) = s.order_min {
            run.report.check(format!("fitted order [{label}]"), order, lo, Comparison::AtLeast);
        }
        if let Some(hi) = s.order_max {
            run.report.check(format!("fitted order [{label}]"), order, hi, Comparison::AtMost);
        }
    }
    if let Some(max) = run.tol.or(s.final_error_max) {
        let last = study.rows.iter().rev().find_map(|r| r.error).unwrap_or(f64::NAN);
        run.report.check(format!("finest error [{label}]"), last, max, Comparison::AtMost);
    }
}

/// Rows from `(h, value)` pairs given a reference value; `h` is the step
/// (or inverse resolution) used for local orders and the fit.
fn tabulate(label: &str, kind: StudyKind, resolutions: &[f64], hs: &[f64], values: &[f64], reference: Option<f64>) -> Study {
    let errors: Vec<Option<f64>> = values.iter().map(|v| reference.map(|r| (v - r).abs())).collect();
    let mut study = tabulate_errors(label, kind, resolutions, hs, values, &errors);
    study.reference = reference;
    study
}

fn tabulate_errors(label: &str, kind: StudyKind, resolutions: &[f64], hs: &[f64], values: &[f64], errors: &[Option<f64>]) -> Study {
    let mut rows = Vec::with_capacity(values.len());
    for k in 0..values.len() {
        let local_order = match (k.checked_sub(1).and_then(|j| errors[j]), errors[k]) {
            (Some(a), Some(b)) if a > 0.0 && b > 0.0 => Some((a / b).ln() / (hs[k - 1] / hs[k]).ln()),
            _ => None,
        };
        rows.push(Row { resolution: resolutions[k], value: values[k], error: errors[k], local_order });
    }
    let pairs: Vec<(f64, f64)> = hs.iter().zip(errors).filter_map(|(h, e)| e.filter(|e| *e > 0.0).map(|e| (*h, e))).collect();
    let fitted_order = if pairs.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        log_log_slope(&x, &y).ok()
    } else {
        None
    };
    Study { label: label.into(), kind, reference: None, rows, fitted_order }
}

fn counts(ladder: &[f64], path: &str) -> Result<Vec<usize>, ConfigError> {
    build::monotone(ladder, true, path)?;
    ladder
        .iter()
        .map(|v| {
            if *v >= 1.0 && v.fract() == 0.0 {
                Ok(*v as usize)
            } else {
                Err(ConfigError::new(path, "sample counts must be positive integers"))
            }
        })
        .collect()
}

fn loop_exprs(s: &StudyConfig, n: usize, path: &str) -> Result<Vec<Expr>, ConfigError> {
    let srcs = s.cycle.as_ref().ok_or_else(|| ConfigError::new(format!("{path}.cycle"), "missing"))?;
    if srcs.len() != n {
        return Err(ConfigError::new(format!("{path}.cycle"), format!("expected {n} coordinate expressions")));
    }
    srcs.iter().enumerate().map(|(i, e)| parse_expr(e).at(&format!("{path}.cycle[{i}]"))).collect()
}

fn integrator_order(run: &mut Run<'_>, s: &StudyConfig, path: &str) -> Result<Study> {
    let lpath = format!("{path}.ladder");
    build::monotone(&s.ladder, false, &lpath)?;
    if s.ladder.iter().any(|h| !(*h > 0.0)) {
        return Err(ConfigError::new(lpath, "step sizes must be positive").into());
    }
    let n = run.sys.n();
    let start = s.start.as_ref().ok_or_else(|| ConfigError::new(format!("{path}.start"), "missing"))?;
    let p0 = build::point(start, 0.0, n, &format!("{path}.start"))?;
    let t_end = s.t_end.ok_or_else(|| ConfigError::new(format!("{path}.t_end"), "missing"))?;
    if !(t_end > 0.0) {
        return Err(ConfigError::new(format!("{path}.t_end"), "must be positive").into());
    }
    let exact = match &s.exact_solution {
        Some(srcs) => {
            if srcs.len() != n {
                return Err(ConfigError::new(format!("{path}.exact_solution"), format!("expected {n} expressions in t")).into());
            }
            let mut coords = vec![0.0; n + 1];
            coords[n] = t_end;
            let mut x = Vec::with_capacity(n);
            for (i, src) in srcs.iter().enumerate() {
                let p = format!("{path}.exact_solution[{i}]");
                let e = parse_expr(src).at(&p)?;
                if e.coord_mask(n) & !(1 << n) != 0 {
                    return Err(ConfigError::new(p, "the exact solution may depend on t only").into());
                }
                x.push(e.eval_at(&coords).at(&p)?);
            }
            Some(x)
        }
        None => None,
    };
    let mut finals = Vec::with_capacity(s.ladder.len());
    for &h in &s.ladder {
        let params = IntegratorParams::rk4(h).with_max_steps(run.params.max_steps);
        finals.push(flow_to(run.sys.mechanics(), &p0, t_end, &params)?);
    }
    // Values are the first coordinate at `t_end`; errors are max-norm
    // distances over all coordinates.
    let reference: Vec<f64> = match &exact {
        Some(x) => x.clone(),
        None => finals.last().expect("ladder has entries").x().to_vec(),
    };
    let dist: Vec<f64> = finals.iter().map(|p| p.x().iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)).collect();
    let firsts: Vec<f64> = finals.iter().map(|p| p.x()[0]).collect();
    let mut errors: Vec<Option<f64>> = dist.into_iter().map(Some).collect();
    if exact.is_none() {
        *errors.last_mut().expect("ladder has entries") = None;
    }
    let mut study = tabulate_errors(&s.label, s.kind, &s.ladder, &s.ladder, &firsts, &errors);
    study.reference = exact.map(|x| x[0]);
    Ok(study)
}

fn reference_value(s: &StudyConfig, path: &str, compute: impl Fn(usize) -> Result<f64>) -> Result<Option<f64>> {
    match (s.exact_value, s.reference) {
        (Some(_), Some(_)) => Err(ConfigError::new(path, "give either `exact_value` or `reference`, not both").into()),
        (Some(v), None) => Ok(Some(v)),
        (None, Some(r)) => Ok(Some(compute(r)?)),
        (None, None) => Ok(None),
    }
}

fn cycle_quadrature(run: &mut Run<'_>, s: &StudyConfig, path: &str) -> Result<Study> {
    let lpath = format!("{path}.ladder");
    let ns = counts(&s.ladder, &lpath)?;
    let n = run.sys.n();
    let exprs = loop_exprs(s, n, path)?;
    let terms = s.form.as_ref().ok_or_else(|| ConfigError::new(format!("{path}.form"), "missing"))?;
    let form = build::form(terms, n, 1, &format!("{path}.form"))?;
    let value = |samples: usize| -> Result<f64> {
        let c = Cycle::parametric(&exprs, 0.0, &[samples]).at(&lpath)?;
        Ok(c.integrate(&form)?.value)
    };
    let values = ns.iter().map(|&k| value(k)).collect::<Result<Vec<_>>>()?;
    let hs: Vec<f64> = ns.iter().map(|&k| 1.0 / k as f64).collect();
    if s.reference.is_some() || s.exact_value.is_some() {
        let r = reference_value(s, path, value)?;
        return Ok(tabulate(&s.label, s.kind, &s.ladder, &hs, &values, r));
    }
    let last = values.len() - 1;
    let mut study = tabulate(&s.label, s.kind, &s.ladder[..last], &hs[..last], &values[..last], Some(values[last]));
    study.rows.push(Row { resolution: s.ladder[last], value: values[last], error: None, local_order: None });
    Ok(study)
}

fn surface_action(run: &mut Run<'_>, s: &StudyConfig, path: &str) -> Result<Study> {
    let lpath = format!("{path}.ladder");
    let ns = counts(&s.ladder, &lpath)?;
    let n = run.sys.n();
    let exprs = loop_exprs(s, n, path)?;
    let t_end = s.t_end.ok_or_else(|| ConfigError::new(format!("{path}.t_end"), "missing"))?;
    if !(t_end > 0.0) {
        return Err(ConfigError::new(format!("{path}.t_end"), "must be positive").into());
    }
    if run.sys.form_degree() != 2 {
        return Err(ConfigError::new(path, "surface-action studies need a two-form action (n = 3)").into());
    }
    let cycle = Cycle::parametric(&exprs, 0.0, &[s.cycle_samples]).at(&format!("{path}.cycle_samples"))?;
    let sys = run.sys.clone();
    let params = run.params;
    let value = |cols: usize| -> Result<f64> {
        let axis = Axis::uniform(0.0, t_end, cols);
        axis.validate(1).at(&lpath)?;
        let surf = build_solution_surface_on(sys.mechanics(), &cycle, axis, &params)?;
        Ok(takhtajan_action(sys.mechanics(), surf.chain())?.value)
    };
    let values = ns.iter().map(|&k| value(k)).collect::<Result<Vec<_>>>()?;
    let hs: Vec<f64> = ns.iter().map(|&k| t_end / (k - 1) as f64).collect();
    if s.reference.is_some() || s.exact_value.is_some() {
        let r = reference_value(s, path, value)?;
        return Ok(tabulate(&s.label, s.kind, &s.ladder, &hs, &values, r));
    }
    let last = values.len() - 1;
    let mut study = tabulate(&s.label, s.kind, &s.ladder[..last], &hs[..last], &values[..last], Some(values[last]));
    study.rows.push(Row { resolution: s.ladder[last], value: values[last], error: None, local_order: None });
    Ok(study)
}
