//! Turns validated config pieces into core objects. Every failure carries
//! the JSON path of the offending field.

use std::path::Path;

use nambu_core::expr::{parse as parse_expr, Expr};
use nambu_core::grid::{Axis, AxisKind};
use nambu_core::{
    Chain, Cycle, DifferentialForm, ExtendedPoint, Field, HamiltonianSystem, IntegratorParams, Mechanics, NambuSystem, Region,
    SymmetryCandidate, VectorField,
};

use crate::config::{
    AxisConfig, CandidateConfig, ChainConfig, CycleConfig, FormTerm, IntegratorConfig, MethodName, RegionConfig, SystemConfig, SystemKind,
    TimeGrid,
};
use crate::error::{AtPath, ConfigError};

#[derive(Clone)]
pub enum System {
    Nambu(NambuSystem),
    Hamiltonian(HamiltonianSystem),
}

impl System {
    pub fn mechanics(&self) -> &dyn Mechanics {
        match self {
            System::Nambu(s) => s,
            System::Hamiltonian(s) => s,
        }
    }

    pub fn n(&self) -> usize {
        self.mechanics().n()
    }

    pub fn kind(&self) -> SystemKind {
        match self {
            System::Nambu(_) => SystemKind::Nambu,
            System::Hamiltonian(_) => SystemKind::Hamiltonian,
        }
    }

    pub fn label(&self) -> &str {
        self.mechanics().label()
    }

    pub fn region(&self) -> &Region {
        self.mechanics().region()
    }

    /// Degree of the distinguished form (`n − 1` for Nambu, 1 for Hamiltonian).
    pub fn form_degree(&self) -> usize {
        self.mechanics().distinguished_form().degree()
    }

    /// `(name, expression)` of every Hamiltonian.
    pub fn hamiltonians(&self) -> Vec<(String, Expr)> {
        match self {
            System::Nambu(s) => s.hamiltonians().iter().enumerate().map(|(k, h)| (format!("H{}", k + 1), h.clone())).collect(),
            System::Hamiltonian(s) => vec![("H".into(), s.hamiltonian().clone())],
        }
    }

    /// Names of the phase-space coordinates, for CSV headers.
    pub fn coordinate_names(&self) -> Vec<String> {
        match self {
            System::Nambu(s) => (1..=s.n()).map(|i| format!("x{i}")).collect(),
            System::Hamiltonian(s) => {
                let m = s.m();
                (1..=m).map(|a| format!("q{a}")).chain((1..=m).map(|a| format!("p{a}"))).collect()
            }
        }
    }
}

pub fn system(cfg: &SystemConfig) -> Result<System, ConfigError> {
    let sys = match cfg.kind {
        SystemKind::Nambu => {
            if cfg.hamiltonian.is_some() || cfg.dof.is_some() {
                return Err(ConfigError::new("system", "`hamiltonian` and `dof` belong to hamiltonian systems; use `hamiltonians`"));
            }
            let s = match (&cfg.builtin, &cfg.hamiltonians) {
                (Some(name), None) => NambuSystem::builtin(name, &cfg.params).at("system.builtin")?,
                (None, Some(hs)) => {
                    if !cfg.params.is_empty() {
                        return Err(ConfigError::new("system.params", "parameters apply to built-in systems only"));
                    }
                    let mut exprs = Vec::with_capacity(hs.len());
                    for (i, src) in hs.iter().enumerate() {
                        exprs.push(parse_expr(src).at(&format!("system.hamiltonians[{i}]"))?);
                    }
                    let label = cfg.label.clone().unwrap_or_else(|| "custom".into());
                    NambuSystem::new(label, hs.len() + 1, exprs).at("system.hamiltonians")?
                }
                (Some(_), Some(_)) => return Err(ConfigError::new("system", "give either `builtin` or `hamiltonians`, not both")),
                (None, None) => return Err(ConfigError::new("system.hamiltonians", "missing: required unless `builtin` is given")),
            };
            System::Nambu(s)
        }
        SystemKind::Hamiltonian => {
            if cfg.hamiltonians.is_some() {
                return Err(ConfigError::new("system.hamiltonians", "hamiltonian systems take a single `hamiltonian`"));
            }
            let s = match (&cfg.builtin, &cfg.hamiltonian) {
                (Some(name), None) => HamiltonianSystem::builtin(name, &cfg.params).at("system.builtin")?,
                (None, Some(src)) => {
                    let m = cfg.dof.ok_or_else(|| ConfigError::new("system.dof", "missing: required with `hamiltonian`"))?;
                    let h = parse_expr(src).at("system.hamiltonian")?;
                    let label = cfg.label.clone().unwrap_or_else(|| "custom".into());
                    HamiltonianSystem::new(label, m, h).at("system.hamiltonian")?
                }
                (Some(_), Some(_)) => return Err(ConfigError::new("system", "give either `builtin` or `hamiltonian`, not both")),
                (None, None) => return Err(ConfigError::new("system.hamiltonian", "missing: required unless `builtin` is given")),
            };
            System::Hamiltonian(s)
        }
    };
    match &cfg.region {
        None => Ok(sys),
        Some(r) => {
            let region = region(r, sys.n(), "system.region")?;
            Ok(match sys {
                System::Nambu(s) => System::Nambu(s.with_region(region).at("system.region")?),
                System::Hamiltonian(s) => System::Hamiltonian(s.with_region(region).at("system.region")?),
            })
        }
    }
}

pub fn region(cfg: &RegionConfig, n: usize, path: &str) -> Result<Region, ConfigError> {
    if cfg.lo.len() != n || cfg.hi.len() != n {
        return Err(ConfigError::new(path, format!("bounds must have {n} entries")));
    }
    let r = Region::new(cfg.lo.clone(), cfg.hi.clone()).at(path)?;
    Ok(match cfg.t {
        Some([a, b]) if b >= a => r.with_time(a, b),
        Some(_) => return Err(ConfigError::new(format!("{path}.t"), "need t[0] <= t[1]")),
        None => r,
    })
}

pub fn integrator(cfg: &IntegratorConfig) -> Result<IntegratorParams, ConfigError> {
    let p = match cfg.method {
        MethodName::Rk4Fixed => {
            if cfg.rtol.is_some() || cfg.atol.is_some() {
                return Err(ConfigError::new("integrator", "rtol/atol apply to rk45-adaptive only"));
            }
            IntegratorParams::rk4(cfg.h.ok_or_else(|| ConfigError::new("integrator.h", "missing step size"))?)
        }
        MethodName::Rk45Adaptive => {
            if cfg.h.is_some() {
                return Err(ConfigError::new("integrator.h", "fixed step given for the adaptive method"));
            }
            let rtol = cfg.rtol.ok_or_else(|| ConfigError::new("integrator.rtol", "missing"))?;
            let atol = cfg.atol.ok_or_else(|| ConfigError::new("integrator.atol", "missing"))?;
            IntegratorParams::rk45(rtol, atol)
        }
    };
    let p = match cfg.max_steps {
        Some(m) => p.with_max_steps(m),
        None => p,
    };
    p.validate().at("integrator")?;
    Ok(p)
}

/// Index of a coordinate differential such as `dx2`, `dq1`, `dp3` or `dt`.
fn differential(name: &str, n: usize, path: &str) -> Result<usize, ConfigError> {
    let var = name.strip_prefix('d').ok_or_else(|| ConfigError::new(path, format!("'{name}' is not a coordinate differential")))?;
    match parse_expr(var) {
        Ok(Expr::Var(v)) => v.coord_index(n).ok_or_else(|| ConfigError::new(path, format!("'{name}' does not exist in dimension {n}"))),
        _ => Err(ConfigError::new(path, format!("'{name}' is not a coordinate differential"))),
    }
}

/// A form of the given degree on extended phase space with `n` coordinates.
pub fn form(terms: &[FormTerm], n: usize, degree: usize, path: &str) -> Result<DifferentialForm, ConfigError> {
    let dim = n + 1;
    let mut out = DifferentialForm::zero(dim, degree);
    for (i, term) in terms.iter().enumerate() {
        let tp = format!("{path}[{i}]");
        let basis = term.basis.trim();
        let idx: Vec<usize> = if basis == "1" || basis.is_empty() {
            Vec::new()
        } else {
            basis.split('^').map(|s| differential(s.trim(), n, &format!("{tp}.basis"))).collect::<Result<_, _>>()?
        };
        if idx.len() != degree {
            return Err(ConfigError::new(format!("{tp}.basis"), format!("expected a {degree}-form term, got degree {}", idx.len())));
        }
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(ConfigError::new(format!("{tp}.basis"), "repeated differential"));
        }
        let coeff = field(&term.coeff, n, &format!("{tp}.coeff"))?;
        let t = DifferentialForm::from_terms(dim, degree, [(&idx[..], coeff)]).at(&tp)?;
        out = out.add(&t).at(&tp)?;
    }
    Ok(out)
}

pub fn field(src: &str, n: usize, path: &str) -> Result<Field, ConfigError> {
    let e = parse_expr(src).at(path)?;
    if let Some(v) = e.unbound_var(n) {
        return Err(ConfigError::new(path, format!("variable '{v}' is not a coordinate in dimension {n}")));
    }
    Ok(Field::expr(e, n))
}

pub fn vector_field(comps: &[String], n: usize, path: &str) -> Result<VectorField, ConfigError> {
    if comps.len() != n + 1 {
        return Err(ConfigError::new(path, format!("expected {} components (time last), got {}", n + 1, comps.len())));
    }
    let fields = comps.iter().enumerate().map(|(i, c)| field(c, n, &format!("{path}[{i}]"))).collect::<Result<_, _>>()?;
    Ok(VectorField::new(fields))
}

pub fn candidate(cfg: &CandidateConfig, sys: &System, path: &str) -> Result<SymmetryCandidate, ConfigError> {
    let n = sys.n();
    let xi = vector_field(&cfg.xi, n, &format!("{path}.xi"))?;
    let chi = form(&cfg.chi, n, sys.form_degree() - 1, &format!("{path}.chi"))?;
    Ok(SymmetryCandidate::new(cfg.label.clone(), xi, chi))
}

pub fn point(x: &[f64], t: f64, n: usize, path: &str) -> Result<ExtendedPoint, ConfigError> {
    if x.len() != n {
        return Err(ConfigError::new(path, format!("expected {n} coordinates, got {}", x.len())));
    }
    if x.iter().any(|v| !v.is_finite()) || !t.is_finite() {
        return Err(ConfigError::new(path, "coordinates must be finite"));
    }
    Ok(ExtendedPoint::new(x, t))
}

pub fn times(cfg: &TimeGrid, path: &str) -> Result<Vec<f64>, ConfigError> {
    if cfg.steps == 0 || !(cfg.end > cfg.start) {
        return Err(ConfigError::new(path, "need end > start and steps >= 1"));
    }
    let dt = (cfg.end - cfg.start) / cfg.steps as f64;
    Ok((0..=cfg.steps).map(|k| if k == cfg.steps { cfg.end } else { cfg.start + k as f64 * dt }).collect())
}

fn parametric_exprs(srcs: &[String], n: usize, path: &str) -> Result<Vec<Expr>, ConfigError> {
    if srcs.len() != n {
        return Err(ConfigError::new(path, format!("expected {n} coordinate expressions, got {}", srcs.len())));
    }
    srcs.iter().enumerate().map(|(i, s)| parse_expr(s).at(&format!("{path}[{i}]"))).collect()
}

/// Reads `index,t,x1..xn` rows.
fn read_points(file: &Path, base: &Path, n: usize, path: &str) -> Result<Vec<ExtendedPoint>, ConfigError> {
    let full = if file.is_absolute() { file.to_path_buf() } else { base.join(file) };
    let mut rdr = csv::Reader::from_path(&full).at(path)?;
    let mut pts = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.at(path)?;
        if rec.len() != n + 2 {
            return Err(ConfigError::new(path, format!("row {row}: expected {} columns (index, t, coordinates)", n + 2)));
        }
        let vals = rec
            .iter()
            .skip(1)
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ConfigError::new(path, format!("row {row}: {e}")))?;
        pts.push(point(&vals[1..], vals[0], n, &format!("{path} row {row}"))?);
    }
    Ok(pts)
}

fn one_source<'a>(
    parametric: &'a Option<Vec<String>>,
    csv: &'a Option<std::path::PathBuf>,
    path: &str,
) -> Result<(Option<&'a Vec<String>>, Option<&'a std::path::PathBuf>), ConfigError> {
    match (parametric, csv) {
        (Some(_), Some(_)) => Err(ConfigError::new(path, "give either `parametric` or `csv`, not both")),
        (None, None) => Err(ConfigError::new(format!("{path}.parametric"), "missing: required unless `csv` is given")),
        (p, c) => Ok((p.as_ref(), c.as_ref())),
    }
}

pub fn cycle(cfg: &CycleConfig, n: usize, base: &Path, path: &str) -> Result<Cycle, ConfigError> {
    let (par, file) = one_source(&cfg.parametric, &cfg.csv, path)?;
    if cfg.samples.is_empty() {
        return Err(ConfigError::new(format!("{path}.samples"), "need one sample count per cycle dimension"));
    }
    if let Some(srcs) = par {
        let exprs = parametric_exprs(srcs, n, &format!("{path}.parametric"))?;
        Cycle::parametric(&exprs, cfg.t, &cfg.samples).at(path)
    } else {
        let pts = read_points(file.expect("one source"), base, n, &format!("{path}.csv"))?;
        Cycle::from_samples(pts, &cfg.samples).at(path)
    }
}

fn axis(cfg: &AxisConfig, path: &str) -> Result<Axis, ConfigError> {
    let a = match cfg.kind {
        AxisKind::Periodic => {
            if cfg.lo.is_some() || cfg.hi.is_some() {
                return Err(ConfigError::new(path, "periodic axes always span [0, 2π)"));
            }
            Axis::periodic(cfg.n)
        }
        kind => {
            let lo = cfg.lo.ok_or_else(|| ConfigError::new(format!("{path}.lo"), "missing"))?;
            let hi = cfg.hi.ok_or_else(|| ConfigError::new(format!("{path}.hi"), "missing"))?;
            Axis { kind, lo, hi, n: cfg.n }
        }
    };
    a.validate(0).at(path)?;
    Ok(a)
}

pub fn chain(cfg: &ChainConfig, n: usize, base: &Path, path: &str) -> Result<Chain, ConfigError> {
    let (par, file) = one_source(&cfg.parametric, &cfg.csv, path)?;
    let axes = cfg.axes.iter().enumerate().map(|(i, a)| axis(a, &format!("{path}.axes[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    if axes.is_empty() {
        return Err(ConfigError::new(format!("{path}.axes"), "need at least one axis"));
    }
    if let Some(srcs) = par {
        let exprs = parametric_exprs(srcs, n, &format!("{path}.parametric"))?;
        Chain::parametric(&exprs, cfg.t, axes).at(path)
    } else {
        let pts = read_points(file.expect("one source"), base, n, &format!("{path}.csv"))?;
        Chain::new(axes, pts).at(path)
    }
}

/// Strictly increasing (or decreasing) ladder check.
pub fn monotone(ladder: &[f64], increasing: bool, path: &str) -> Result<(), ConfigError> {
    if ladder.len() < 2 {
        return Err(ConfigError::new(path, "a refinement ladder needs at least two entries"));
    }
    let ok = ladder.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
    if !ok {
        let dir = if increasing { "increasing" } else { "decreasing" };
        return Err(ConfigError::new(path, format!("refinement ladder must be strictly {dir}")));
    }
    Ok(())
}
