use std::f64::consts::{PI, TAU};

use nambu_core::action::{boundary_term, hamiltonian_action_check, takhtajan_action, trajectory_chain, vary_action, VariationField};
use nambu_core::expr::parse;
use nambu_core::grid::Axis;
use nambu_core::transport::{build_solution_surface, build_solution_surface_on};
use nambu_core::{Cycle, ExtendedPoint, HamiltonianSystem, IntegratorParams, NambuSystem, SolutionSurface};

const LADDER: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

fn loop_around(center: [f64; 3], r: f64, n: usize) -> Cycle {
    Cycle::from_fn(&[n], |u| {
        Ok(ExtendedPoint::new(&[center[0] + r * u[0].cos(), center[1] + r * u[0].sin(), center[2] + 0.5 * r * u[0].sin()], 0.0))
    })
    .unwrap()
}

fn euler_surface(n: usize, m: usize) -> SolutionSurface {
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    build_solution_surface(&top, &loop_around([1.0, 0.5, 0.2], 0.1, n), 0.0, 1.0, m, &IntegratorParams::default()).unwrap()
}

fn clamped_3d() -> VariationField {
    VariationField::parse(&["x2 + 0.3", "sin(pi*t)*x3", "sin(pi*t)*(x1 - x2)"], vec![false, true, true]).unwrap()
}

#[test]
fn rotor_circle_surface_has_zero_action() {
    let rotor = NambuSystem::rotor();
    let c = Cycle::parametric(&[parse("cos(u)").unwrap(), parse("sin(u)").unwrap(), parse("0").unwrap()], 0.0, &[64]).unwrap();
    let s = build_solution_surface(&rotor, &c, 0.0, 1.0, 33, &IntegratorParams::default()).unwrap();
    assert!(takhtajan_action(&rotor, s.chain()).unwrap().value.abs() <= 1e-9);

    let point = Cycle::from_fn(&[8], |_| Ok(ExtendedPoint::new(&[0.2, 0.7, -0.4], 0.0))).unwrap();
    let s = build_solution_surface(&rotor, &point, 0.0, 1.0, 9, &IntegratorParams::default()).unwrap();
    assert!(takhtajan_action(&rotor, s.chain()).unwrap().value.abs() <= 1e-14);
}

#[test]
fn euler_top_action_self_converges() {
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    let reference = takhtajan_action(&top, euler_surface(128, 33).chain()).unwrap().value;
    assert!(reference.abs() > 1e-4);
    // Uniform time columns: composite trapezoid in t gives algebraic convergence.
    let ms = [9usize, 17, 33, 65];
    let errs: Vec<f64> = ms
        .iter()
        .map(|&m| {
            let c = loop_around([1.0, 0.5, 0.2], 0.1, 64);
            let s = build_solution_surface_on(&top, &c, Axis::uniform(0.0, 1.0, m), &IntegratorParams::default()).unwrap();
            (takhtajan_action(&top, s.chain()).unwrap().value - reference).abs()
        })
        .collect();
    let hs: Vec<f64> = ms.iter().map(|&m| 1.0 / (m - 1) as f64).collect();
    let slope = nambu_core::fit::log_log_slope(&hs, &errs).unwrap();
    assert!(slope >= 2.0, "slope {slope}, errors {errs:?}");
    // Chebyshev columns already sit at round-off by 17 points.
    let cheb = takhtajan_action(&top, euler_surface(64, 17).chain()).unwrap().value;
    assert!((cheb - reference).abs() <= 1e-12 * reference.abs().max(1.0));
}

#[test]
fn action_is_reparameterization_invariant() {
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    let c = loop_around([1.0, 0.5, 0.2], 0.1, 64);
    let params = IntegratorParams::default();
    let a = takhtajan_action(&top, build_solution_surface(&top, &c, 0.0, 1.0, 17, &params).unwrap().chain()).unwrap();
    for k in [1, 13, 40] {
        let b = takhtajan_action(&top, build_solution_surface(&top, &c.rotated(k), 0.0, 1.0, 17, &params).unwrap().chain()).unwrap();
        assert!((a.value - b.value).abs() <= 1e-13, "{} vs {}", a.value, b.value);
    }
}

#[test]
fn clamped_variation_is_second_order() {
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    let r = vary_action(&top, &euler_surface(64, 17), &clamped_3d(), &LADDER).unwrap();
    assert!(r.clamp_violation <= 1e-15);
    assert!(r.slope.unwrap() >= 1.9, "{r:?}");
}

#[test]
fn zero_variation() {
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    let w = VariationField::parse(&["0", "0", "0"], vec![false, true, true]).unwrap();
    let r = vary_action(&top, &euler_surface(16, 9), &w, &LADDER).unwrap();
    assert!(r.delta_s.iter().all(|d| *d == 0.0));
    assert_eq!(r.slope, None);
}

#[test]
fn generic_variation_matches_boundary_term() {
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    let s = euler_surface(64, 17);
    let w = VariationField::parse(&["0", "0", "x2"], vec![false, true, true]).unwrap();
    let bt = boundary_term(&top, &s, &w).unwrap();
    assert!(bt.value.abs() > 1e-6, "{bt:?}");
    let r = vary_action(&top, &s, &w, &LADDER).unwrap();
    assert!((r.boundary_prediction.value - bt.value).abs() <= 1e-12 * bt.value.abs().max(1.0));
    let mismatch = (r.first_variation - bt.value).abs();
    assert!(mismatch <= 0.05 * bt.value.abs(), "δS/ε = {} vs {}", r.first_variation, bt.value);
    assert!(mismatch <= 0.05 * bt.value.abs() + 10.0 * bt.estimate.unwrap_or(0.0));
    assert!(r.slope.unwrap() < 1.2);
}

#[test]
fn boundary_term_examples() {
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    let s = euler_surface(32, 9);
    assert!(boundary_term(&top, &s, &clamped_3d()).unwrap().value.abs() <= 1e-15);

    let rotor = NambuSystem::rotor();
    let c = Cycle::parametric(&[parse("cos(u)").unwrap(), parse("sin(u)").unwrap(), parse("0").unwrap()], 0.0, &[64]).unwrap();
    let s = build_solution_surface(&rotor, &c, 0.0, 1.0, 9, &IntegratorParams::default()).unwrap();
    let w = VariationField::parse(&["0", "0", "1"], vec![false, true, true]).unwrap();
    let (c1, c2) = s.boundary_cycles();
    let x_dy = nambu_core::DifferentialForm::dx(4, 1).mul_field(&nambu_core::Field::coord(0));
    assert!((c1.integrate(&x_dy).unwrap().value - PI).abs() <= 1e-10);
    assert!((c2.integrate(&x_dy).unwrap().value - PI).abs() <= 1e-8);
    assert!(boundary_term(&rotor, &s, &w).unwrap().value.abs() <= 1e-8);

    let demo = NambuSystem::demo_4d();
    let c4 = Cycle::from_fn(&[8, 8], |u| Ok(ExtendedPoint::new(&[u[0].cos(), u[0].sin(), u[1].cos(), u[1].sin()], 0.0))).unwrap();
    let s4 = build_solution_surface(&demo, &c4, 0.0, 0.1, 3, &IntegratorParams::default()).unwrap();
    let w4 = VariationField::parse(&["0", "0", "0", "0"], vec![false; 4]).unwrap();
    assert!(boundary_term(&demo, &s4, &w4).is_err());
}

#[test]
fn extremality_for_builtins() {
    let params = IntegratorParams::default();
    let rotor_loop = loop_around([0.8, 0.1, 0.3], 0.4, 64);
    for sys in [NambuSystem::rotor(), NambuSystem::linear_shear(), NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap()] {
        let s = build_solution_surface(&sys, &rotor_loop, 0.0, 1.0, 17, &params).unwrap();
        let r = vary_action(&sys, &s, &clamped_3d(), &LADDER).unwrap();
        assert!(r.slope.unwrap() >= 1.9, "{}: {r:?}", sys.hamiltonians().len());
    }
    let demo = NambuSystem::demo_4d();
    let c = Cycle::from_fn(&[24, 24], |u| {
        Ok(ExtendedPoint::new(&[0.5 + 0.2 * u[0].cos(), 0.2 * u[0].sin(), 0.3 + 0.15 * u[1].cos(), 0.15 * u[1].sin()], 0.0))
    })
    .unwrap();
    let s = build_solution_surface(&demo, &c, 0.0, 0.5, 9, &params).unwrap();
    let w =
        VariationField::parse(&["x3", "sin(2*pi*t)*x4", "sin(2*pi*t)*x1", "sin(2*pi*t)*(x2 + 1)"], vec![false, true, true, true]).unwrap();
    let r = vary_action(&demo, &s, &w, &LADDER).unwrap();
    assert!(r.clamp_violation <= 1e-15);
    assert!(r.slope.unwrap() >= 1.9, "{r:?}");
}

#[test]
fn hamiltonian_action_variations() {
    let sho = HamiltonianSystem::sho();
    let params = IntegratorParams::rk4(1e-3);
    let p0 = ExtendedPoint::new(&[1.0, 0.0], 0.0);
    let gamma = trajectory_chain(&sho, &p0, 0.0, TAU, 33, &params).unwrap();
    // ∫ p dq − H dt over one period of the unit-energy-½ orbit: π − π = 0.
    assert!(takhtajan_action(&sho, &gamma).unwrap().value.abs() <= 1e-9);

    let clamped = VariationField::parse(&["sin(t/2)", "0"], vec![true, false]).unwrap();
    let r = hamiltonian_action_check(&sho, &gamma, &clamped, &LADDER).unwrap();
    assert!(r.slope.unwrap() >= 1.9, "{r:?}");
    // exact: δS = −ε²/2 ∫ sin²(t/2) dt = −ε² π/2
    for (e, d) in r.epsilons.iter().zip(&r.delta_s) {
        assert!((d + 0.5 * PI * e * e).abs() <= 1e-9 * e * e + 1e-13, "{e}: {d}");
    }

    let zero = VariationField::parse(&["0", "0"], vec![true, false]).unwrap();
    assert!(hamiltonian_action_check(&sho, &gamma, &zero, &LADDER).unwrap().delta_s.iter().all(|d| *d == 0.0));

    let short = trajectory_chain(&sho, &p0, 0.0, 1.0, 17, &params).unwrap();
    let free = VariationField::parse(&["1", "0"], vec![false, false]).unwrap();
    let r = hamiltonian_action_check(&sho, &short, &free, &LADDER).unwrap();
    let dp = -(1.0f64).sin();
    assert!((r.first_variation - dp).abs() <= 0.05 * dp.abs());
    assert!((r.boundary_prediction.value - dp).abs() <= 1e-9);
}

#[test]
fn invalid_variations() {
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    let s = euler_surface(16, 9);
    assert!(vary_action(&top, &s, &clamped_3d(), &[1e-2, 1e-3]).is_err());
    assert!(vary_action(&top, &s, &clamped_3d(), &[1e-3, 1e-2, 1e-4]).is_err());
    let wt = nambu_core::VectorField::parse(&["0", "0", "0", "1"], 3).unwrap();
    assert!(VariationField::new(wt, vec![false; 3]).is_err());
    let far = VariationField::parse(&["1000", "0", "0"], vec![false, true, true]).unwrap();
    assert!(vary_action(&top, &s, &far, &[1.0, 0.5, 0.1]).is_err());
}
