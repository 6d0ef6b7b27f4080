use nambu_core::expr::{parse, EvalError, ParseErrorKind, Var};
use nambu_core::Expr;
use proptest::prelude::*;

fn eval(src: &str, coords: &[f64]) -> f64 {
    parse(src).unwrap().eval_at(coords).unwrap()
}

#[test]
fn hand_arithmetic() {
    assert_eq!(eval("x1^2/2", &[3.0, 0.0, 0.0, 0.0]), 4.5);
    let v = eval("x1^2/2 + x2^2/4 + x3^2/6", &[1.0, 0.5, 0.2, 0.0]);
    assert!((v - (0.5 + 0.0625 + 0.04 / 6.0)).abs() < 1e-15);
    assert!((v - 0.569166666666).abs() < 1e-11);
    assert_eq!(eval("2.5", &[7.0, 1.0, 2.0, 3.0]), 2.5);
    assert_eq!(eval("sin(t)", &[1.0, 1.0, 1.0, 0.0]), 0.0);
    assert_eq!(eval("x1*x2 - x3", &[2.0, 3.0, 5.0, 0.0]), 1.0);
}

#[test]
fn precedence_and_associativity() {
    let z = [0.0; 4];
    assert_eq!(eval("-2^2", &z), -4.0);
    assert_eq!(eval("2^3^2", &z), 512.0);
    assert_eq!(eval("2^-1", &z), 0.5);
    assert_eq!(eval("8/4/2", &z), 1.0);
    assert_eq!(eval("1 - 2 - 3", &z), -4.0);
    assert_eq!(eval("2*3+4*5", &z), 26.0);
    assert_eq!(eval("0^0", &z), 1.0);
    assert!((eval("pi", &z) - std::f64::consts::PI).abs() == 0.0);
}

#[test]
fn syntax_error_points_at_the_star() {
    let e = parse("x1 + * x2").unwrap_err();
    assert_eq!(e.offset, 5);
    assert_eq!(e.kind, ParseErrorKind::UnexpectedToken("*".into()));
}

#[test]
fn parse_failures_carry_positions() {
    assert_eq!(parse("").unwrap_err().kind, ParseErrorKind::Empty);
    let e = parse("x1 + y").unwrap_err();
    assert_eq!((e.kind, e.offset), (ParseErrorKind::UnknownIdentifier("y".into()), 5));
    let e = parse("sin(x1, x2)").unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Arity { func: "sin", expected: 1, found: 2 }));
    let e = parse("(x1 + 2").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::UnexpectedEnd);
    assert_eq!(e.offset, 7);
    assert!(parse("x07").is_err());
    assert!(parse("x7").is_err());
}

#[test]
fn evaluation_errors_are_reported() {
    let unbound = parse("x4").unwrap().eval_at(&[0.0; 4]).unwrap_err();
    assert_eq!(unbound, EvalError::Unbound(Var::X(4)));
    for src in ["log(x1)", "sqrt(x1 - 1)", "1/x1", "(x1 - 1)^0.5", "x1^-1"] {
        assert!(matches!(parse(src).unwrap().eval_at(&[0.0; 4]), Err(EvalError::Domain { .. })), "{src}");
    }
}

#[test]
fn gradient_examples() {
    let g = parse("x1*x2").unwrap().gradient(&[3.0, 4.0, 0.0, 0.0]).unwrap();
    assert_eq!(g[0], 4.0);
    let g = parse("(x1^2+x2^2+x3^2)/2").unwrap().gradient(&[1.0, 2.0, 3.0, 0.5]).unwrap();
    assert_eq!(g, vec![1.0, 2.0, 3.0, 0.0]);
    let g = parse("sin(x1)*t").unwrap().gradient(&[0.0, 0.0, 0.0, 2.0]).unwrap();
    assert_eq!((g[0], g[3]), (2.0, 0.0));
}

#[test]
fn momentum_aliases() {
    // q1, q2, p1, p2 on a four-dimensional phase space
    let e = parse("q1*p2 - q2*p1").unwrap();
    assert_eq!(e.eval_at(&[1.0, 0.0, 0.0, 1.0, 0.0]).unwrap(), 1.0);
}

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        prop::sample::select(vec!["x1", "x2", "x3", "t"]).prop_map(String::from),
        (-3i32..=3).prop_map(|c| format!("{c}")),
        (0.1f64..2.0).prop_map(|c| format!("{c}")),
    ]
}

fn polynomial() -> impl Strategy<Value = String> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), 0u32..4).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.prop_map(|a| format!("-{a}")),
        ]
    })
}

fn smooth() -> impl Strategy<Value = String> {
    polynomial().prop_recursive(2, 8, 1, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(0.1*{a})")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("{a} / (2 + sin({b}))")),
        ]
    })
}

fn point() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-2.0f64..2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gradient_matches_central_differences(src in polynomial(), x in point()) {
        let e = parse(&src).unwrap();
        let g = e.gradient(&x).unwrap();
        for j in 0..4 {
            let h = 1e-6 * x[j].abs().max(1.0);
            let mut a = x;
            a[j] += h;
            let mut b = x;
            b[j] -= h;
            let fd = (e.eval_at(&a).unwrap() - e.eval_at(&b).unwrap()) / (2.0 * h);
            let scale = e.eval_at(&x).unwrap().abs().max(g[j].abs()).max(1.0);
            prop_assert!((fd - g[j]).abs() <= 1e-6 * scale, "{src}: d/dx{j} exact {} fd {fd}", g[j]);
        }
    }

    #[test]
    fn render_round_trips(src in smooth(), x in point()) {
        let e = parse(&src).unwrap();
        let back: Expr = e.render().parse().unwrap();
        prop_assert_eq!(e.eval_at(&x), back.eval_at(&x));
        prop_assert_eq!(&back, &e);
    }

    #[test]
    fn jets_agree_with_duals(src in smooth(), x in point()) {
        let e = parse(&src).unwrap();
        let g = e.gradient(&x).unwrap();
        let jet = e.jet(&x, 2).unwrap();
        let v = e.eval_at(&x).unwrap();
        prop_assert!((jet.value() - v).abs() <= 1e-14 * v.abs().max(1.0));
        for j in 0..4 {
            prop_assert!((jet.grad(j) - g[j]).abs() <= 1e-12 * g[j].abs().max(1.0));
            for k in 0..4 {
                prop_assert_eq!(jet.hess(j, k), jet.hess(k, j));
            }
        }
    }

    #[test]
    fn grammatical_strings_parse(src in smooth()) {
        prop_assert!(parse(&src).is_ok());
    }

    #[test]
    fn garbage_never_panics(src in "[x1-9t+*/^() .,a-z-]{0,24}") {
        if let Err(e) = parse(&src) {
            prop_assert!(e.offset <= src.len());
        }
    }
}
