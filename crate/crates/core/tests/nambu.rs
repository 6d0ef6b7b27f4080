use nambu_core::expr::parse;
use nambu_core::{Dynamics, ExtendedPoint, NambuSystem, Region, TangentVector};
use proptest::prelude::*;

fn all_builtins() -> Vec<NambuSystem> {
    let mut v: Vec<NambuSystem> = NambuSystem::BUILTINS.iter().map(|b| NambuSystem::builtin(b, &[]).unwrap()).collect();
    v.push(NambuSystem::euler_top(0.7, 1.3, 4.0).unwrap());
    v.push(NambuSystem::from_sources("quartic-4d", &["x1*x2 + x3^2", "sin(x4) + x1^2", "x2*x3*x4"]).unwrap());
    v.push(NambuSystem::from_sources("poly-5d", &["x1*x2", "x3^2 + x5", "x4*x1", "0.5*(x1^2+x2^2+x3^2+x4^2+x5^2)"]).unwrap());
    v
}

fn unit_box(sys: &NambuSystem) -> Region {
    Region::cube(sys.n(), 1.0)
}

#[test]
fn velocity_hand_values() {
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    let v = top.velocity(&ExtendedPoint::new(&[0.0, 1.0, 1.0], 0.0)).unwrap();
    assert!((v[0] - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!((v[1], v[2], v.time_component()), (0.0, 0.0, 1.0));

    let rotor = NambuSystem::rotor();
    let v = rotor.velocity(&ExtendedPoint::new(&[1.0, 0.0, 0.0], 0.0)).unwrap();
    assert_eq!(v.spatial(), &[0.0, -1.0, 0.0]);

    let same = NambuSystem::from_sources("same", &["x1*x2 + x3", "x1*x2 + x3"]).unwrap();
    let v = same.velocity(&ExtendedPoint::new(&[0.3, -1.2, 2.0], 0.4)).unwrap();
    assert_eq!(v.spatial(), &[0.0, 0.0, 0.0]);
}

#[test]
fn sigma_hat_four_dimensional_example() {
    let s = NambuSystem::from_sources("lin", &["x1", "x2", "x3"]).unwrap();
    let e = |i| TangentVector::basis(4, i);
    let p = ExtendedPoint::new(&[1.0, 0.3, -0.2, 0.9], 0.5);
    assert_eq!(s.sigma_hat().evaluate(&p, &[e(1), e(2), e(3)]).unwrap(), 1.0);
    // time term: ±x1 dx2∧dx3∧dt on (e2, e3, ∂t)
    let time = s.sigma_hat().evaluate(&p, &[e(1), e(2), e(4)]).unwrap();
    assert_eq!(time.abs(), 1.0);
    assert_eq!(s.sigma_hat().evaluate(&p, &[e(1), e(1), e(2)]).unwrap(), 0.0);
}

#[test]
fn dynamics_identity_holds_for_all_builtins() {
    for sys in all_builtins() {
        for p in unit_box(&sys).sample(200, 3) {
            let r = sys.verify_dynamics(&p).unwrap();
            assert!(r <= 1e-9, "{}: residual {r} at {p:?}", sys.hamiltonians().len());
        }
    }
}

#[test]
fn wrong_velocity_is_detected() {
    let top = NambuSystem::euler_top(1.0, 2.0, 3.0).unwrap();
    let p = ExtendedPoint::new(&[0.0, 1.0, 1.0], 0.0);
    let mut v = top.velocity(&p).unwrap();
    v[0] += 0.1;
    assert!(top.dynamics_residual(&p, &v).unwrap() > 1e-3);
}

#[test]
fn liouville_divergence_vanishes() {
    let rotor = NambuSystem::rotor();
    assert!(rotor.liouville_divergence(&ExtendedPoint::new(&[0.3, 0.4, 0.5], 0.0)).unwrap().abs() <= 1e-6);
    for sys in all_builtins() {
        for p in unit_box(&sys).sample(100, 9) {
            let d = sys.liouville_divergence(&p).unwrap();
            assert!(d.abs() <= 1e-6, "div {d}");
        }
    }
    let control =
        nambu_core::mechanics::divergence(|p| Ok(TangentVector::new(&[p[0], 0.0, 0.0], 1.0)), &ExtendedPoint::new(&[0.3, 0.4, 0.5], 0.0))
            .unwrap();
    assert!((control - 1.0).abs() < 1e-9);
}

#[test]
fn invalid_systems_are_rejected() {
    assert!(NambuSystem::from_sources("n2", &["x1"]).is_err());
    assert!(NambuSystem::new("mismatch", 4, vec![parse("x1").unwrap(), parse("x2").unwrap()]).is_err());
    assert!(NambuSystem::from_sources("oob", &["x4", "x1"]).is_err());
    assert!(NambuSystem::euler_top(1.0, -2.0, 3.0).is_err());
    assert!(NambuSystem::builtin("nope", &[]).is_err());
    assert!(NambuSystem::builtin("rotor", &[1.0]).is_err());
    let rotor = NambuSystem::rotor();
    assert!(rotor.velocity(&ExtendedPoint::new(&[0.0; 4], 0.0)).is_err());
}

fn point(n: usize) -> impl Strategy<Value = ExtendedPoint> {
    (prop::collection::vec(-1.5f64..1.5, n), -1.0f64..1.0).prop_map(|(x, t)| ExtendedPoint::new(&x, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hamiltonians_are_orthogonal_to_flow(k in 0usize..7, seed in any::<u64>()) {
        let systems = all_builtins();
        let sys = &systems[k % systems.len()];
        for p in unit_box(sys).sample(4, seed) {
            let v = sys.velocity(&p).unwrap();
            for h in sys.hamiltonians() {
                let g = h.gradient(p.coords()).unwrap();
                let dot: f64 = g.iter().zip(v.components()).map(|(a, b)| a * b).sum();
                let scale = g.iter().map(|x| x.abs()).fold(1.0, f64::max) * v.norm().max(1.0);
                prop_assert!(dot.abs() <= 1e-12 * scale, "{dot}");
            }
        }
    }

    #[test]
    fn swapping_hamiltonians_flips_velocity(p in point(4), i in 0usize..3, j in 0usize..3) {
        prop_assume!(i != j);
        let sys = NambuSystem::demo_4d();
        let sw = sys.swapped(i, j).unwrap();
        let a = sys.velocity(&p).unwrap();
        let b = sw.velocity(&p).unwrap();
        for k in 0..4 {
            prop_assert!((a[k] + b[k]).abs() <= 1e-14 * a[k].abs().max(1.0));
        }
        prop_assert_eq!(b.time_component(), 1.0);
    }

    #[test]
    fn dynamics_identity_random_points(p in point(3), i1 in 0.2f64..5.0, i2 in 0.2f64..5.0, i3 in 0.2f64..5.0) {
        let top = NambuSystem::euler_top(i1, i2, i3).unwrap();
        prop_assert!(top.verify_dynamics(&p).unwrap() <= 1e-9);
        prop_assert!(top.liouville_divergence(&p).unwrap().abs() <= 1e-6);
    }
}

#[test]
fn dynamics_trait_matches_inherent_velocity() {
    let sys = NambuSystem::demo_4d();
    let p = ExtendedPoint::new(&[0.1, 0.2, -0.3, 0.4], 0.0);
    let d: &dyn Dynamics = &sys;
    assert_eq!(d.velocity(&p).unwrap(), sys.velocity(&p).unwrap());
    assert_eq!(d.n(), 4);
}
