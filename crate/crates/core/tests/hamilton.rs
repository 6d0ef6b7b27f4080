use nambu_core::flow::integrate;
use nambu_core::hamilton::{conservation_drift, euler_top_embedding_check};
use nambu_core::symmetry::DEFAULT_TOL;
use nambu_core::{
    DifferentialForm, ExtendedPoint, Field, HamiltonianSystem, IntegratorParams, Mechanics, MomentumSystem, Region, SymmetryCandidate,
    TangentVector, VectorField,
};
use proptest::prelude::*;

fn rotation2() -> VectorField {
    VectorField::parse(&["-q2", "q1", "-p2", "p1", "0"], 4).unwrap()
}

fn scalar(src: &str, n: usize) -> DifferentialForm {
    DifferentialForm::scalar(n + 1, Field::parse(src, n).unwrap())
}

#[test]
fn velocity_hand_values() {
    let sho = HamiltonianSystem::sho();
    let (v, r) = sho.hamilton_velocity(&ExtendedPoint::new(&[1.0, 0.0], 0.0)).unwrap();
    assert_eq!(v.components(), &[0.0, -1.0, 1.0]);
    assert!(r <= 1e-9);

    let free = HamiltonianSystem::free_particle(1).unwrap();
    let (v, _) = free.hamilton_velocity(&ExtendedPoint::new(&[-3.7, 2.0], 1.0)).unwrap();
    assert_eq!(v.spatial(), &[2.0, 0.0]);

    let flat = HamiltonianSystem::from_source("flat", 2, "4.5").unwrap();
    let (v, _) = flat.hamilton_velocity(&ExtendedPoint::new(&[0.1, 0.2, 0.3, 0.4], 0.0)).unwrap();
    assert_eq!(v.spatial(), &[0.0; 4]);
}

#[test]
fn d_sigma_has_canonical_structure() {
    let h = HamiltonianSystem::central_quartic();
    let e = |i| TangentVector::basis(4, i);
    for p in Region::cube(4, 2.0).sample(50, 2) {
        let ds = h.d_sigma();
        // Σ dp∧dq − dH∧dt
        assert_eq!(ds.evaluate(&p, &[e(2), e(0)]).unwrap(), 1.0);
        assert_eq!(ds.evaluate(&p, &[e(3), e(1)]).unwrap(), 1.0);
        assert_eq!(ds.evaluate(&p, &[e(0), e(1)]).unwrap(), 0.0);
        assert_eq!(ds.evaluate(&p, &[e(2), e(3)]).unwrap(), 0.0);
        let grad = h.hamiltonian().gradient(p.coords()).unwrap();
        for a in 0..4 {
            assert_eq!(ds.evaluate(&p, &[e(a), e(4)]).unwrap(), -grad[a]);
        }
        let (_, r) = h.hamilton_velocity(&p).unwrap();
        assert!(r <= 1e-9);
    }
    // the time-dependent case shares the structure
    let driven = HamiltonianSystem::from_source("driven", 1, "0.5*(p1^2 + q1^2) + q1*sin(t)").unwrap();
    for p in Region::cube(2, 2.0).with_time(0.0, 5.0).sample(50, 4) {
        assert!(driven.hamilton_velocity(&p).unwrap().1 <= 1e-9);
    }
}

#[test]
fn energy_is_conserved_function_of_time_translation() {
    let sho = HamiltonianSystem::sho();
    let cand = SymmetryCandidate::without_chi("time", VectorField::coordinate(3, 2), 1);
    let f = sho.conserved_function(&cand, 200, 0, DEFAULT_TOL).unwrap();
    assert!(f.symmetry.passed);
    assert_eq!(f.field.value(&[1.0, 0.0, 0.0]).unwrap(), -0.5);
    let traj = integrate(&sho, &ExtendedPoint::new(&[1.0, 0.0], 0.0), 0.0, 10.0, &IntegratorParams::rk4(1e-3)).unwrap();
    assert!(conservation_drift(&f.field, &traj).unwrap() <= 1e-9);
}

#[test]
fn angular_momentum_of_central_potential() {
    let h = HamiltonianSystem::central_quartic();
    let cand = SymmetryCandidate::without_chi("rotation", rotation2(), 1);
    let f = h.conserved_function(&cand, 200, 0, DEFAULT_TOL).unwrap();
    assert!(f.symmetry.passed);
    assert_eq!(f.field.value(&[1.0, 0.0, 0.0, 1.0, 0.0]).unwrap(), 1.0);
    let traj = integrate(&h, &ExtendedPoint::new(&[1.0, 0.0, 0.0, 1.0], 0.0), 0.0, 10.0, &IntegratorParams::rk4(1e-3)).unwrap();
    assert!(conservation_drift(&f.field, &traj).unwrap() <= 1e-9);

    let zero = SymmetryCandidate::without_chi("zero", VectorField::zero(5), 1);
    let f = h.conserved_function(&zero, 50, 0, DEFAULT_TOL).unwrap();
    assert_eq!(f.field.value(&[0.3, 0.1, -0.2, 0.9, 0.0]).unwrap(), 0.0);

    // a non-symmetry is reported, not raised
    let shift = SymmetryCandidate::without_chi("q1 shift", VectorField::coordinate(5, 0), 1);
    assert!(!h.conserved_function(&shift, 50, 0, DEFAULT_TOL).unwrap().symmetry.passed);
}

#[test]
fn extended_momentum_maps() {
    let params = IntegratorParams::rk4(1e-3);
    let central = HamiltonianSystem::central_quartic();
    let starts = Region::cube(4, 1.0).sample(4, 8);
    let samples = Region::cube(4, 2.0).sample(100, 1);
    let ms = MomentumSystem::new(vec![("L".into(), rotation2())], vec![scalar("q1*p2 - q2*p1", 4)]).unwrap();
    let rows = central.verify_extended_momentum_map(&ms, &samples, &starts, 10.0, &params, 1e-9).unwrap();
    assert!(rows[0].passed, "{rows:?}");
    assert!(rows[0].pdot_drift <= 1e-9);

    let free = HamiltonianSystem::free_particle(2).unwrap();
    let ms = MomentumSystem::new(
        vec![("P1".into(), VectorField::coordinate(5, 0)), ("P2".into(), VectorField::coordinate(5, 1))],
        vec![scalar("p1", 4), scalar("p2", 4)],
    )
    .unwrap()
    .with_combination("P1 + 3 P2", vec![(0, 1.0), (1, 3.0)])
    .unwrap();
    let rows = free.verify_extended_momentum_map(&ms, &samples, &starts, 2.0, &params, 1e-9).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.passed), "{rows:?}");

    let ms = MomentumSystem::new(vec![("2L".into(), rotation2().scale(2.0))], vec![scalar("q1*p2 - q2*p1", 4)]).unwrap();
    let rows = central.verify_extended_momentum_map(&ms, &samples, &starts, 1.0, &params, 1e-9).unwrap();
    assert!(!rows[0].passed);
    // residual = |2 dL − dL| = |dL| = max |(p2, −p1, −q2, q1)|
    let expect = samples.iter().map(|p| p.x().iter().fold(0.0f64, |m, x| m.max(x.abs()))).fold(0.0, f64::max);
    assert!((rows[0].check.exactness - expect).abs() <= 1e-12);
}

#[test]
fn euler_top_embedding() {
    let params = IntegratorParams::rk4(1e-3);
    let r = euler_top_embedding_check([1.0, 2.0, 3.0], [1.0, 0.5, 0.2], 10.0, &params).unwrap();
    assert!(r.energy_drift <= 1e-8 && r.casimir_drift <= 1e-8, "{r:?}");
    assert!(r.max_displacement > 0.1);
    let sphere = euler_top_embedding_check([1.0, 1.0, 1.0], [0.3, -0.4, 0.5], 10.0, &params).unwrap();
    assert_eq!(sphere.final_state, [0.3, -0.4, 0.5]);
    assert_eq!(sphere.max_displacement, 0.0);
    let axis = euler_top_embedding_check([1.0, 2.0, 3.0], [1.0, 0.0, 0.0], 10.0, &params).unwrap();
    assert_eq!(axis.final_state, [1.0, 0.0, 0.0]);
    assert!(euler_top_embedding_check([1.0, 0.0, 3.0], [1.0, 0.0, 0.0], 1.0, &params).is_err());
}

#[test]
fn point_cycle_contrast() {
    // A Nambu relative invariant over a point-degenerate loop vanishes; the
    // Hamiltonian conserved function is nonzero at that same kind of point.
    let rotor = nambu_core::NambuSystem::rotor();
    let point = nambu_core::Cycle::from_fn(&[8], |_| Ok(ExtendedPoint::new(&[0.4, 0.3, 0.2], 0.0))).unwrap();
    let cand = SymmetryCandidate::without_chi("time", VectorField::coordinate(4, 3), 2);
    assert!(point.integrate(&cand.relative_form(&rotor).unwrap()).unwrap().value.abs() <= 1e-15);
    let sho = HamiltonianSystem::sho();
    let f = sho.distinguished_form().interior(&VectorField::coordinate(3, 2)).unwrap();
    assert!(f.coeffs()[0].value(&[0.4, 0.3, 0.0]).unwrap() != 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn passing_candidates_are_conserved(q in prop::array::uniform2(-1.0f64..1.0), p in prop::array::uniform2(-1.0f64..1.0)) {
        let h = HamiltonianSystem::central_quartic();
        let params = IntegratorParams::rk4(1e-3);
        let start = ExtendedPoint::new(&[q[0], q[1], p[0], p[1]], 0.0);
        let traj = integrate(&h, &start, 0.0, 10.0, &params).unwrap();
        for xi in [rotation2(), VectorField::coordinate(5, 4)] {
            let cand = SymmetryCandidate::without_chi("c", xi, 1);
            let f = h.conserved_function(&cand, 50, 0, DEFAULT_TOL).unwrap();
            prop_assert!(f.symmetry.passed);
            let f0 = f.field.value(start.coords()).unwrap();
            prop_assert!(conservation_drift(&f.field, &traj).unwrap() <= 1e-8 * f0.abs().max(1.0));
        }
    }
}
