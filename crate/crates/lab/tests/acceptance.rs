//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use nambu_core::action::{boundary_term, vary_action, VariationField};
use nambu_core::expr::parse;
use nambu_core::fit::log_log_slope;
use nambu_core::flow::{flow_to, integrate};
use nambu_core::forms::lie_derivative_flow_check;
use nambu_core::grid::Axis;
use nambu_core::hamilton::conservation_drift;
use nambu_core::mechanics::divergence;
use nambu_core::symmetry::{
    absolute_invariant, pandit_gangal_scaling_demo, relative_invariant, stokes_check, verify_momentum_one_forms, PrecheckOptions,
};
use nambu_core::transport::build_solution_surface;
use nambu_core::{
    Chain, Cycle, DifferentialForm, Dynamics, ExtendedPoint, Field, HamiltonianSystem, IntegratorParams, MomentumSystem, NambuSystem,
    Region, SymmetryCandidate, TangentVector, VectorField,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn unit_times(k: usize, t: f64) -> Vec<f64> {
    (0..=k).map(|i| t * i as f64 / k as f64).collect()
}

fn rotation3() -> VectorField {
    VectorField::parse(&["-x2", "x1", "0", "0"], 3).unwrap()
}

fn rotor_candidate() -> SymmetryCandidate {
    let chi = DifferentialForm::dx(4, 2).mul_field(&Field::parse("0.5*(x1^2 - x2^2)", 3).unwrap());
    SymmetryCandidate::new("rotation", rotation3(), chi)
}

fn rotor_loop(n: usize) -> Cycle {
    Cycle::parametric(&[parse("1 + cos(u)").unwrap(), parse("0").unwrap(), parse("sin(u)").unwrap()], 0.0, &[n]).unwrap()
}

fn euler_top() -> NambuSystem {
    NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap()
}

fn scalar(src: &str, n: usize) -> DifferentialForm {
    DifferentialForm::scalar(n + 1, Field::parse(src, n).unwrap())
}

fn dynamics_residuals() -> Outcome {
    let mut worst: f64 = 0.0;
    for sys in [euler_top(), NambuSystem::rotor(), NambuSystem::demo_4d()] {
        for p in sys.region().sample(100, 1) {
            worst = worst.max(sys.verify_dynamics(&p).unwrap());
        }
    }
    verdict(worst <= 1e-9, format!("max |i_v dσ̂| = {worst:.3e} over 100 samples of euler-top, rotor, demo-4d (tol 1e-9)"))
}

fn euler_top_conservation() -> Outcome {
    let top = euler_top();
    let p0 = ExtendedPoint::new(&[1.0, 0.5, 0.2], 0.0);
    let traj = integrate(&top, &p0, 0.0, 10.0, &IntegratorParams::rk4(1e-3)).unwrap();
    let mut worst: f64 = 0.0;
    for h in top.hamiltonian_fields() {
        let h0 = h.value(p0.coords()).unwrap();
        worst = worst.max(conservation_drift(h, &traj).unwrap() / h0.abs());
    }
    verdict(worst <= 1e-8, format!("relative drift of H1, H2 over T = 10 at h = 1e-3 is {worst:.3e} (tol 1e-8)"))
}

fn liouville() -> Outcome {
    let mut worst: f64 = 0.0;
    let nambu = [euler_top(), NambuSystem::rotor(), NambuSystem::linear_shear(), NambuSystem::demo_4d()];
    for sys in &nambu {
        for p in sys.region().sample(100, 2) {
            worst = worst.max(sys.liouville_divergence(&p).unwrap().abs());
        }
    }
    for sys in [HamiltonianSystem::sho(), HamiltonianSystem::central_quartic(), HamiltonianSystem::free_particle(2).unwrap()] {
        for p in sys.region().sample(100, 2) {
            worst = worst.max(divergence(|q| Dynamics::velocity(&sys, q), &p).unwrap().abs());
        }
    }
    verdict(worst <= 1e-6, format!("max |div v| = {worst:.3e} over all built-ins (tol 1e-6)"))
}

fn relative_invariants() -> Outcome {
    let rotor = NambuSystem::rotor();
    let pre = PrecheckOptions::default();
    let r =
        relative_invariant(&rotor, &rotor_candidate(), &rotor_loop(256), &unit_times(10, 1.0), &IntegratorParams::default(), &pre).unwrap();
    let err = (r.values[0] - PI).abs();
    let top = euler_top();
    let c =
        Cycle::from_fn(&[256], |u| Ok(ExtendedPoint::new(&[1.0 + 0.3 * u[0].cos(), 0.5 + 0.3 * u[0].sin(), 0.2 + 0.1 * u[0].sin()], 0.0)))
            .unwrap();
    let time = SymmetryCandidate::without_chi("time", VectorField::coordinate(4, 3), 2);
    let e = relative_invariant(&top, &time, &c, &unit_times(10, 1.0), &IntegratorParams::rk4(1e-3), &pre).unwrap();
    let ok = err <= 1e-6 && r.drift <= 1e-6 && e.drift <= 1e-6 && e.values[0].abs() > 1e-3 && r.symmetry.passed && e.symmetry.passed;
    verdict(
        ok,
        format!(
            "rotor |I - π| = {err:.3e}, drift {:.3e}; euler-top time invariant {:.4} drifts {:.3e} (tol 1e-6)",
            r.drift, e.values[0], e.drift
        ),
    )
}

fn absolute_invariant_and_stokes() -> Outcome {
    let rotor = NambuSystem::rotor();
    let disk = Chain::parametric(
        &[parse("1 + u*cos(v)").unwrap(), parse("0").unwrap(), parse("u*sin(v)").unwrap()],
        0.0,
        vec![Axis::chebyshev(0.0, 1.0, 17), Axis::periodic(64)],
    )
    .unwrap();
    let cand = rotor_candidate();
    let a =
        absolute_invariant(&rotor, &cand, &disk, &unit_times(8, 1.0), &IntegratorParams::default(), &PrecheckOptions::default()).unwrap();
    let s = stokes_check(&rotor, &cand, &disk).unwrap();
    verdict(s.residual <= 1e-5 && a.drift <= 1e-5, format!("Stokes residual {:.3e}, absolute drift {:.3e} (tol 1e-5)", s.residual, a.drift))
}

fn action_variations() -> Outcome {
    let top = euler_top();
    let c =
        Cycle::from_fn(&[64], |u| Ok(ExtendedPoint::new(&[1.0 + 0.1 * u[0].cos(), 0.5 + 0.1 * u[0].sin(), 0.2 + 0.05 * u[0].sin()], 0.0)))
            .unwrap();
    let s = build_solution_surface(&top, &c, 0.0, 1.0, 17, &IntegratorParams::default()).unwrap();
    let ladder = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    let clamped = VariationField::parse(&["x2 + 0.3", "sin(pi*t)*x3", "sin(pi*t)*(x1 - x2)"], vec![false, true, true]).unwrap();
    let r = vary_action(&top, &s, &clamped, &ladder).unwrap();
    let slope = r.slope.unwrap_or(f64::NAN);
    let free = VariationField::parse(&["0", "0", "x2"], vec![false, true, true]).unwrap();
    let bt = boundary_term(&top, &s, &free).unwrap().value;
    let f = vary_action(&top, &s, &free, &ladder).unwrap();
    let ratio = (f.delta_s[4] / ladder[4] - bt).abs() / bt.abs();
    verdict(
        slope >= 1.9 && r.clamp_violation <= 1e-12 && ratio <= 0.05,
        format!("clamped δS slope {slope:.3} (min 1.9); free δS/ε vs boundary term {bt:.4e} off by {:.3}% (max 5%)", 100.0 * ratio),
    )
}

fn hamiltonian_reference() -> Outcome {
    let params = IntegratorParams::rk4(1e-3);
    let sho = HamiltonianSystem::sho();
    let central = HamiltonianSystem::central_quartic();
    let time = |n: usize| SymmetryCandidate::without_chi("time", VectorField::coordinate(n + 1, n), 1);
    let rotation = VectorField::parse(&["-q2", "q1", "-p2", "p1", "0"], 4).unwrap();
    let mut drift: f64 = 0.0;
    let e = sho.conserved_function(&time(2), 200, 0, 1e-8).unwrap();
    let t = integrate(&sho, &ExtendedPoint::new(&[1.0, 0.0], 0.0), 0.0, 10.0, &params).unwrap();
    drift = drift.max(conservation_drift(&e.field, &t).unwrap());
    let l = central.conserved_function(&SymmetryCandidate::without_chi("L", rotation.clone(), 1), 200, 0, 1e-8).unwrap();
    let t = integrate(&central, &ExtendedPoint::new(&[1.0, 0.0, 0.0, 1.0], 0.0), 0.0, 10.0, &params).unwrap();
    drift = drift.max(conservation_drift(&l.field, &t).unwrap());

    let samples = Region::cube(4, 2.0).sample(100, 3);
    let starts = Region::cube(4, 1.0).sample(4, 4);
    let ms = MomentumSystem::new(
        vec![("L".into(), rotation), ("time".into(), VectorField::coordinate(5, 4))],
        vec![scalar("q1*p2 - q2*p1", 4), scalar("-(0.5*(p1^2 + p2^2) + 0.25*(q1^2 + q2^2)^2)", 4)],
    )
    .unwrap();
    let rows = central.verify_extended_momentum_map(&ms, &samples, &starts, 10.0, &params, 1e-8).unwrap();
    let residual = rows.iter().map(|r| r.check.closedness.max(r.check.exactness)).fold(0.0, f64::max);
    let pdot = rows.iter().map(|r| r.pdot_drift).fold(0.0, f64::max);
    verdict(
        drift <= 1e-9 && residual <= 1e-8 && pdot <= 1e-9 && e.symmetry.passed && l.symmetry.passed,
        format!("SHO/central drift {drift:.3e} (tol 1e-9), momentum residual {residual:.3e} (tol 1e-8), P drift {pdot:.3e} (tol 1e-9)"),
    )
}

fn momentum_linearity_and_scaling() -> Outcome {
    let rotor = NambuSystem::rotor();
    let samples = Region::cube(3, 2.0).sample(200, 5);
    let l3 = DifferentialForm::dx(4, 2).mul_field(&Field::parse("0.5*(x1^2 + x2^2)", 3).unwrap());
    let time = DifferentialForm::dx(4, 2).mul_field(&Field::parse("0.5*(x1^2 + x2^2 + x3^2)", 3).unwrap());
    let ms = MomentumSystem::new(vec![("L3".into(), rotation3()), ("time".into(), VectorField::coordinate(4, 3))], vec![l3, time])
        .unwrap()
        .with_combination("L3 + 2 time", vec![(0, 1.0), (1, 2.0)])
        .unwrap()
        .with_combination("-0.5 L3 + 3 time", vec![(0, -0.5), (1, 3.0)])
        .unwrap();
    let rows = verify_momentum_one_forms(&rotor, &ms, &samples, 1e-8).unwrap();
    let res = |i: usize| rows[i].closedness.max(rows[i].exactness);
    let mut excess: f64 = 0.0;
    for (i, row) in rows.iter().enumerate().skip(2) {
        let bound: f64 = row.combination.as_ref().unwrap().iter().map(|(j, c)| c.abs() * res(*j)).sum();
        excess = excess.max(res(i) - bound);
    }
    let x3 = Field::parse("x3", 3).unwrap();
    let rho = Field::parse("0.5*(x1^2 + x2^2)", 3).unwrap();
    let s = pandit_gangal_scaling_demo(&rotor, &rotation3(), &x3, &rho, 2.0, &samples).unwrap();
    let off = (s.ratio - 2.0).abs();
    verdict(excess <= 1e-12 && off <= 1e-12, format!("linearity excess {excess:.3e}, |ratio - λ| = {off:.3e} at λ = 2 (tol 1e-12)"))
}

fn calculus_and_quadrature() -> Outcome {
    let pts = Region::cube(3, 1.0).sample(20, 6);
    let tv = |p: &ExtendedPoint, k: usize| {
        let c = p.coords();
        TangentVector::from_components(&[c[(k + 1) % 4] + 0.3, c[(k + 2) % 4] - 0.2, 1.0 - c[k % 4], 0.5 + c[(k + 3) % 4]])
    };
    let one = DifferentialForm::from_terms(
        4,
        1,
        [
            (&[0usize][..], Field::parse("sin(x1*x2) + t*x3^2", 3).unwrap()),
            (&[2usize][..], Field::parse("exp(x1)*cos(t)", 3).unwrap()),
            (&[3usize][..], Field::parse("x1*x2*x3", 3).unwrap()),
        ],
    )
    .unwrap();
    let dd = one.exterior_derivative().unwrap().exterior_derivative().unwrap();
    let two = NambuSystem::rotor().sigma_hat().clone();
    let xi = VectorField::parse(&["x2*x3", "sin(x1)", "-x3 + t", "0.5"], 3).unwrap();
    let mut d2: f64 = 0.0;
    let mut cartan: f64 = 0.0;
    for p in &pts {
        d2 = d2.max(dd.evaluate(p, &[tv(p, 0), tv(p, 1), tv(p, 2)]).unwrap().abs());
        let vs = [tv(p, 0), tv(p, 1)];
        let c = two.lie_derivative(&xi).unwrap().evaluate(p, &vs).unwrap();
        let f = lie_derivative_flow_check(&xi, &two, p, &vs, 1e-3).unwrap();
        cartan = cartan.max((c - f).abs());
    }

    let rotor = NambuSystem::rotor();
    let p0 = ExtendedPoint::new(&[1.0, 0.0, 0.0], 0.0);
    let hs = [1e-1, 5e-2, 2.5e-2, 1.25e-2];
    let errs: Vec<f64> = hs
        .iter()
        .map(|&h| {
            flow_to(&rotor, &p0, 2.0, &IntegratorParams::rk4(h))
                .unwrap()
                .distance(&ExtendedPoint::new(&[2f64.cos(), -2f64.sin(), 0.0], 2.0))
        })
        .collect();
    let order = log_log_slope(&hs, &errs).unwrap();

    let circle = Cycle::parametric(&[parse("cos(u)").unwrap(), parse("sin(u)").unwrap(), parse("0").unwrap()], 0.0, &[64]).unwrap();
    let x_dy = DifferentialForm::dx(4, 1).mul_field(&Field::coord(0));
    let area = (circle.integrate(&x_dy).unwrap().value - PI).abs();
    verdict(
        d2 <= 1e-7 && cartan <= 1e-5 && (3.8..=4.2).contains(&order) && area <= 1e-10,
        format!("d∘d {d2:.3e} (1e-7), Cartan vs flow {cartan:.3e} (1e-5), RK4 order {order:.3}, |∮x1 dx2 - π| = {area:.3e} (1e-10)"),
    )
}

fn determinism() -> Outcome {
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/rotor-rotation.json");
    let tmp = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    let mut csvs = Vec::new();
    for (k, threads) in ["1", "4"].iter().enumerate() {
        let out = tmp.path().join(k.to_string());
        let status = Command::new(env!("CARGO_BIN_EXE_nambu-lab"))
            .env("NAMBU_LAB_THREADS", threads)
            .args(["invariant", "--config"])
            .arg(&scenario)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap()
            .status;
        if !status.success() {
            return Err(format!("run {k} exited with {status}"));
        }
        let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        bodies.push(serde_json::to_string(&report["body"]).unwrap());
        csvs.push((std::fs::read(out.join("invariant_relative.csv")).unwrap(), std::fs::read(out.join("invariant_absolute.csv")).unwrap()));
    }
    verdict(bodies[0] == bodies[1] && csvs[0] == csvs[1], "two runs (1 and 4 threads) give byte-identical report bodies and CSVs".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("form dynamics", dynamics_residuals),
        ("euler-top conservation", euler_top_conservation),
        ("liouville", liouville),
        ("relative invariants", relative_invariants),
        ("absolute invariant and stokes", absolute_invariant_and_stokes),
        ("action variations", action_variations),
        ("hamiltonian reference", hamiltonian_reference),
        ("momentum linearity and scaling", momentum_linearity_and_scaling),
        ("calculus and quadrature", calculus_and_quadrature),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("PASS criterion {}: {name}: {d}", i + 1),
            Err(d) => {
                println!("FAIL criterion {}: {name}: {d}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
