use std::f64::consts::PI;

use nambu_core::expr::parse;
use nambu_core::grid::Axis;
use nambu_core::symmetry::{
    absolute_invariant, check_momentum, check_symmetry, check_symmetry_seeded, pandit_gangal_scaling_demo, relative_invariant,
    stokes_check, verify_momentum_one_forms, PrecheckOptions,
};
use nambu_core::{
    Chain, Cycle, DifferentialForm, ExtendedPoint, Field, IntegratorParams, MomentumSystem, NambuSystem, Region, SymmetryCandidate,
    VectorField,
};
use proptest::prelude::*;

fn f(src: &str) -> Field {
    Field::parse(src, 3).unwrap()
}

fn rotation() -> VectorField {
    VectorField::parse(&["-x2", "x1", "0", "0"], 3).unwrap()
}

fn chi() -> DifferentialForm {
    DifferentialForm::dx(4, 2).mul_field(&f("0.5*(x1^2 - x2^2)"))
}

fn momentum() -> DifferentialForm {
    DifferentialForm::dx(4, 2).mul_field(&f("0.5*(x1^2 + x2^2)"))
}

fn rotation_candidate() -> SymmetryCandidate {
    SymmetryCandidate::new("rotation", rotation(), chi())
}

fn rotor_loop(n: usize) -> Cycle {
    Cycle::parametric(&[parse("1 + cos(u)").unwrap(), parse("0").unwrap(), parse("sin(u)").unwrap()], 0.0, &[n]).unwrap()
}

fn rotor_disk() -> Chain {
    Chain::parametric(
        &[parse("1 + u*cos(v)").unwrap(), parse("0").unwrap(), parse("u*sin(v)").unwrap()],
        0.0,
        vec![Axis::chebyshev(0.0, 1.0, 17), Axis::periodic(64)],
    )
    .unwrap()
}

fn unit_times(k: usize) -> Vec<f64> {
    (0..=k).map(|i| i as f64 / k as f64).collect()
}

fn samples() -> Vec<ExtendedPoint> {
    Region::cube(3, 2.0).sample(200, 0)
}

#[test]
fn symmetry_check_examples() {
    let rotor = NambuSystem::rotor();
    let pass = check_symmetry_seeded(&rotor, &rotation_candidate(), 200, 0, 1e-8).unwrap();
    assert!(pass.passed, "{pass:?}");
    assert_eq!((pass.samples, pass.seed), (200, Some(0)));

    let bare = SymmetryCandidate::without_chi("rotation, χ = 0", rotation(), 2);
    let fail = check_symmetry(&rotor, &bare, &samples(), 1e-8).unwrap();
    assert!(!fail.passed);
    // residual is −dχ = −x1 dx1∧dx3 + x2 dx2∧dx3: max over samples is max |x|
    let expect = samples().iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    assert!((fail.max_residual - expect).abs() < 1e-12);

    let dt = VectorField::coordinate(4, 3);
    for sys in [rotor, NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap(), NambuSystem::linear_shear()] {
        let r = check_symmetry(&sys, &SymmetryCandidate::without_chi("time", dt.clone(), 2), &samples(), 1e-8).unwrap();
        assert!(r.passed);
    }
    let dt4 = VectorField::coordinate(5, 4);
    let demo = NambuSystem::demo_4d();
    let r = check_symmetry_seeded(&demo, &SymmetryCandidate::without_chi("time", dt4, 3), 200, 5, 1e-8).unwrap();
    assert!(r.passed);
}

#[test]
fn rotor_relative_invariant_is_pi() {
    let rotor = NambuSystem::rotor();
    let times = unit_times(10);
    let r = relative_invariant(
        &rotor,
        &rotation_candidate(),
        &rotor_loop(256),
        &times,
        &IntegratorParams::default(),
        &PrecheckOptions::default(),
    )
    .unwrap();
    assert!(r.symmetry.passed);
    assert!((r.values[0] - PI).abs() <= 1e-9);
    assert!(r.drift <= 1e-6, "{}", r.drift);
    assert_eq!(r.times, times);
    assert!(r.refinement.is_empty());
}

#[test]
fn zero_candidate_gives_zero() {
    let rotor = NambuSystem::rotor();
    let zero = SymmetryCandidate::without_chi("zero", VectorField::zero(4), 2);
    let params = IntegratorParams::rk4(1e-2);
    let r = relative_invariant(&rotor, &zero, &rotor_loop(32), &unit_times(4), &params, &PrecheckOptions::default()).unwrap();
    assert!(r.values.iter().all(|v| *v == 0.0));
    let a = absolute_invariant(&rotor, &zero, &rotor_disk(), &unit_times(4), &params, &PrecheckOptions::default()).unwrap();
    assert!(a.values.iter().all(|v| *v == 0.0));
}

#[test]
fn euler_top_time_translation_invariant() {
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    let c =
        Cycle::from_fn(&[256], |u| Ok(ExtendedPoint::new(&[1.0 + 0.3 * u[0].cos(), 0.5 + 0.3 * u[0].sin(), 0.2 + 0.1 * u[0].sin()], 0.0)))
            .unwrap();
    let cand = SymmetryCandidate::without_chi("time", VectorField::coordinate(4, 3), 2);
    let r = relative_invariant(&top, &cand, &c, &unit_times(10), &IntegratorParams::rk4(1e-3), &PrecheckOptions::default()).unwrap();
    assert!(r.symmetry.passed);
    assert!(r.values[0].abs() > 1e-3, "non-trivial invariant expected, got {}", r.values[0]);
    assert!(r.drift <= 1e-6, "{}", r.drift);
}

#[test]
fn rotor_absolute_invariant_and_stokes() {
    let rotor = NambuSystem::rotor();
    let cand = rotation_candidate();
    let times = unit_times(8);
    let a = absolute_invariant(&rotor, &cand, &rotor_disk(), &times, &IntegratorParams::default(), &PrecheckOptions::default()).unwrap();
    assert!(a.drift <= 1e-5, "{}", a.drift);
    // ∂(disk) = loop − (degenerate centre), so Stokes gives −π.
    assert!((a.values[0] + PI).abs() <= 1e-9, "{}", a.values[0]);
    let s = stokes_check(&rotor, &cand, &rotor_disk()).unwrap();
    assert!(s.residual <= 1e-5, "{s:?}");
    assert!(s.residual <= 1e-9);
}

#[test]
fn solution_surfaces_annihilate_any_absolute_form() {
    // γ̇ is tangent to Σ and i_γ̇ dσ̂ = 0, so i_ξ dσ̂ pulls back to zero for
    // every ξ, including ones with a time component. Stokes for i_ξσ̂ holds
    // regardless of symmetry.
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    let c = Cycle::from_fn(&[64], |u| Ok(ExtendedPoint::new(&[1.0 + 0.2 * u[0].cos(), 0.5, 0.2 + 0.2 * u[0].sin()], 0.0))).unwrap();
    let surf = nambu_core::transport::build_solution_surface(&top, &c, 0.0, 1.0, 17, &IntegratorParams::default()).unwrap();
    let xi = VectorField::parse(&["x2*x3", "x1", "0.3", "1"], 3).unwrap();
    let cand = SymmetryCandidate::without_chi("generic", xi.clone(), 2);
    let s = stokes_check(&top, &cand, surf.chain()).unwrap();
    assert!(s.surface.value.abs() <= 1e-10, "{s:?}");
    let alpha = top.sigma_hat().interior(&xi).unwrap();
    let lhs = surf.chain().integrate(&alpha.exterior_derivative().unwrap()).unwrap().value;
    let rhs = surf.chain().integrate_boundary(&alpha).unwrap().value;
    assert!((lhs - rhs).abs() <= 1e-8, "{lhs} vs {rhs}");
    assert!(rhs.abs() > 1e-3);
}

#[test]
fn four_dimensional_time_invariant_on_a_torus() {
    let demo = NambuSystem::demo_4d();
    let c = Cycle::from_fn(&[24, 24], |u| {
        Ok(ExtendedPoint::new(&[0.5 + 0.2 * u[0].cos(), 0.2 * u[0].sin() - 0.1, 0.3 + 0.15 * u[1].cos(), 0.15 * u[1].sin()], 0.0))
    })
    .unwrap();
    let cand = SymmetryCandidate::without_chi("time", VectorField::coordinate(5, 4), 3);
    let r = relative_invariant(&demo, &cand, &c, &unit_times(4), &IntegratorParams::default(), &PrecheckOptions::default()).unwrap();
    assert!(r.symmetry.passed);
    assert!(r.drift <= 1e-6f64.max(20.0 * r.max_estimate().unwrap()), "{r:?}");
}

#[test]
fn broken_symmetry_still_computed() {
    let rotor = NambuSystem::rotor();
    let boost = SymmetryCandidate::without_chi("x1 translation", VectorField::coordinate(4, 0), 2);
    let r = relative_invariant(&rotor, &boost, &rotor_loop(64), &unit_times(4), &IntegratorParams::default(), &PrecheckOptions::default())
        .unwrap();
    assert!(!r.symmetry.passed);
    assert_eq!(r.values.len(), 5);
}

#[test]
fn momentum_examples() {
    let rotor = NambuSystem::rotor();
    let ms = MomentumSystem::new(
        vec![("L3".into(), rotation()), ("2 L3".into(), rotation().scale(2.0))],
        vec![momentum(), momentum().scale(2.0)],
    )
    .unwrap();
    let rows = verify_momentum_one_forms(&rotor, &ms, &samples(), 1e-8).unwrap();
    assert!(rows.iter().all(|r| r.passed), "{rows:?}");

    let gauge = momentum().add(&DifferentialForm::dx(4, 0).mul_field(&f("x1"))).unwrap();
    assert!(check_momentum(&rotor, "gauge", &rotation(), &gauge, &samples(), 1e-8).unwrap().passed);
    for r in [0.2, 0.5, 1.0, 1.7] {
        let c = Cycle::parametric(
            &[parse(&format!("1 + {r}*cos(u)")).unwrap(), parse(&format!("{r}*sin(u)")).unwrap(), parse("sin(u)").unwrap()],
            0.0,
            &[128],
        )
        .unwrap();
        let (a, b) = (c.integrate(&momentum()).unwrap().value, c.integrate(&gauge).unwrap().value);
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }

    let wrong = DifferentialForm::dx(4, 2).mul_field(&f("x1^2"));
    assert!(!check_momentum(&rotor, "wrong", &rotation(), &wrong, &samples(), 1e-8).unwrap().passed);
}

#[test]
fn gauge_term_leaves_invariant_unchanged() {
    let rotor = NambuSystem::rotor();
    let g = f("sin(x1*x2) + x3^3");
    let shifted = chi().add(&nambu_core::nambu::gradient_form(&g, 4)).unwrap();
    let cand = SymmetryCandidate::new("gauged", rotation(), shifted);
    assert!(check_symmetry(&rotor, &cand, &samples(), 1e-8).unwrap().passed);
    let params = IntegratorParams::default();
    let times = unit_times(4);
    let a = relative_invariant(&rotor, &rotation_candidate(), &rotor_loop(256), &times, &params, &PrecheckOptions::default()).unwrap();
    let b = relative_invariant(&rotor, &cand, &rotor_loop(256), &times, &params, &PrecheckOptions::default()).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() <= 1e-10);
    }
}

#[test]
fn scaling_demo_ratios() {
    let rotor = NambuSystem::rotor();
    let pts = samples();
    for lambda in [2.0, 3.0, 0.5] {
        let r = pandit_gangal_scaling_demo(&rotor, &rotation(), &f("x3"), &f("0.5*(x1^2+x2^2)"), lambda, &pts).unwrap();
        assert!((r.ratio - lambda).abs() <= 1e-12, "{r:?}");
        assert!((r.lhs_scale - lambda.abs()).abs() <= 1e-12);
        assert!((r.rhs_scale - lambda * lambda).abs() <= 1e-12);
        assert!(!r.degenerate);
    }
    let one = pandit_gangal_scaling_demo(&rotor, &rotation(), &f("x3"), &f("x1"), 1.0, &pts).unwrap();
    assert!(one.degenerate && one.ratio == 1.0);
    assert!(pandit_gangal_scaling_demo(&NambuSystem::demo_4d(), &VectorField::zero(5), &f("x1"), &f("x2"), 2.0, &pts).is_err());
}

#[test]
fn invalid_requests() {
    let rotor = NambuSystem::rotor();
    let params = IntegratorParams::default();
    let pre = PrecheckOptions::default();
    assert!(relative_invariant(&rotor, &rotation_candidate(), &rotor_loop(16), &[0.5, 0.2], &params, &pre).is_err());
    assert!(relative_invariant(&rotor, &rotation_candidate(), &rotor_loop(16), &[], &params, &pre).is_err());
    let bad = SymmetryCandidate::without_chi("wrong degree", rotation(), 3);
    assert!(check_symmetry(&rotor, &bad, &samples(), 1e-8).is_err());
    assert!(MomentumSystem::new(vec![("a".into(), rotation())], vec![]).is_err());
    let ms = MomentumSystem::new(vec![("a".into(), rotation())], vec![momentum()]).unwrap();
    assert!(ms.clone().with_combination("bad", vec![(3, 1.0)]).is_err());
}

fn shift_generator() -> (VectorField, DifferentialForm) {
    // ξ = ∂₃ paired with i_ξσ̂ = −x1 dx2 − H₁ dt, which misses the χ term, so
    // this row fails exactness; linearity must hold either way.
    let xi = VectorField::coordinate(4, 2);
    let rotor = NambuSystem::rotor();
    let p = rotor.sigma_hat().interior(&xi).unwrap();
    (xi, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn momentum_checks_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let rotor = NambuSystem::rotor();
        let (xi2, p2) = shift_generator();
        let pts = Region::cube(3, 1.5).sample(40, 1);
        let ra = check_momentum(&rotor, "a", &rotation(), &momentum(), &pts, 1e-8).unwrap();
        let rb = check_momentum(&rotor, "b", &xi2, &p2, &pts, 1e-8).unwrap();
        let ms = MomentumSystem::new(vec![("a".into(), rotation()), ("b".into(), xi2)], vec![momentum(), p2])
            .unwrap()
            .with_combination("ab", vec![(0, a), (1, b)])
            .unwrap();
        let rows = verify_momentum_one_forms(&rotor, &ms, &pts, 1e-8).unwrap();
        let bound = |x: f64, y: f64| a.abs() * x + b.abs() * y + 1e-12;
        prop_assert!(rows[2].closedness <= bound(ra.closedness, rb.closedness));
        prop_assert!(rows[2].exactness <= bound(ra.exactness, rb.exactness));
        prop_assert_eq!(rows[2].passed, ra.passed && rb.passed);
    }
}
