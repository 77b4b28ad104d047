use finslerkit::classify::{classify, ClassTolerance};
use finslerkit::exprlang::parse;
use finslerkit::geometry::{connection, metric, is_positive_definite, SlitPoint};
use finslerkit::jets::{layout_len, solve_linear_jets, Jet, JetPoint};
use finslerkit::models::{builtin_field, builtin_finsler};
use finslerkit::sampling::SamplePlan;
use proptest::prelude::*;

const VARS: usize = 3;
const ORDER: usize = 3;

fn jet() -> impl Strategy<Value = Jet> {
    prop::collection::vec(-2.0..2.0_f64, layout_len(VARS, ORDER))
        .prop_map(|c| Jet::from_coeffs(c, ORDER, VARS).unwrap())
}

fn close(a: &Jet, b: &Jet, tol: f64) -> bool {
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    a.coeffs().iter().zip(b.coeffs()).all(|(u, v)| (u - v).abs() <= tol * scale)
}

fn randers(b: (f64, f64)) -> finslerkit::models::ModelEntry {
    builtin_finsler("randers", &[("b".into(), format!("{},{}", b.0, b.1))], 2).unwrap()
}

fn covector() -> impl Strategy<Value = (f64, f64)> {
    (-0.6..0.6_f64, -0.6..0.6_f64)
}

fn slit() -> impl Strategy<Value = SlitPoint> {
    (-1.0..1.0_f64, -1.0..1.0_f64, 0.2..1.0_f64, -1.0..1.0_f64)
        .prop_map(|(x1, x2, r, t)| {
            let a = t * std::f64::consts::PI;
            SlitPoint::new(vec![x1, x2], vec![r * a.cos(), r * a.sin()]).unwrap()
        })
}

proptest! {
    #[test]
    fn ring_laws(a in jet(), b in jet(), c in jet()) {
        prop_assert!(close(&(&a * &b), &(&b * &a), 1e-12));
        prop_assert!(close(&((&a + &b) * &c), &(&a * &c + &b * &c), 1e-12));
        prop_assert!(close(&((&a * &b) * &c), &(&a * (&b * &c)), 1e-12));
    }

    #[test]
    fn product_rule(a in jet(), b in jet(), v in 0..VARS) {
        let lhs = (&a * &b).derivative(v).unwrap();
        let rhs = a.derivative(v).unwrap() * &b + &a * b.derivative(v).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn elementary_inverses(a in jet(), shift in 0.5..3.0_f64) {
        let p = a.add_scalar(shift + a.value().abs());
        prop_assert!(close(&p.ln().unwrap().exp().unwrap(), &p, 1e-10));
        let r = p.sqrt().unwrap();
        prop_assert!(close(&(&r * &r), &p, 1e-10));
        let one = a.constant_like(1.0);
        let s = a.sin();
        let c = a.cos();
        prop_assert!(close(&(&s * &s + &c * &c), &one, 1e-10));
        prop_assert!(close(&(&p * p.recip().unwrap()), &one, 1e-10));
    }

    #[test]
    fn chain_rule_through_the_parser(x in 0.2..1.5_f64, y in -1.0..1.0_f64) {
        // d/dy sin(x*y^2) = 2xy cos(x*y^2)
        let e = parse("sin(x1*y1^2)", 1, true).unwrap();
        let j = finslerkit::exprlang::evaluate(&e, &JetPoint::tangent(&[x], &[y]), 2).unwrap();
        let want = 2.0 * x * y * (x * y * y).cos();
        prop_assert!((j.first(1) - want).abs() < 1e-12);
    }

    #[test]
    fn linear_solve_residual(a in prop::collection::vec(jet(), 9), b in prop::collection::vec(jet(), 3)) {
        let mut m: Vec<Vec<Jet>> = a.chunks(3).map(|r| r.to_vec()).collect();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = row[i].add_scalar(8.0);
        }
        let x = solve_linear_jets(&m, &b).unwrap();
        for i in 0..3 {
            let ax = (0..3).fold(b[i].zero_like(), |acc, k| acc + &m[i][k] * &x[k]);
            prop_assert!(close(&ax, &b[i], 1e-10));
        }
    }

    #[test]
    fn randers_metric_is_positive_definite(b in covector(), p in slit()) {
        let m = randers(b);
        prop_assert!(is_positive_definite(&metric(&m.structure, &p).unwrap()));
    }

    #[test]
    fn spray_is_two_homogeneous(b in covector(), p in slit(), lambda in 0.2..5.0_f64) {
        let m = randers(b);
        let g1 = connection(&m.structure, &p).unwrap().spray;
        let q = p.with_fibre(p.y.iter().map(|v| lambda * v).collect());
        let g2 = connection(&m.structure, &q).unwrap().spray;
        for (a, c) in g1.iter().zip(&g2) {
            prop_assert!((lambda * lambda * a - c).abs() <= 1e-10 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn spray_ignores_constant_scaling(b in covector(), p in slit(), c in 0.1..10.0_f64) {
        let m = randers(b);
        let g1 = connection(&m.structure, &p).unwrap().spray;
        let g2 = connection(&m.structure.scaled(c), &p).unwrap().spray;
        for (u, v) in g1.iter().zip(&g2) {
            prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn verdicts_survive_scaling(c in 0.05..20.0_f64, seed in 0u64..1000) {
        let m = randers((0.3, -0.2));
        let field = builtin_field("radial", &[], 2).unwrap().into_field();
        let mut plan = SamplePlan::for_region(&m.region, seed);
        plan.num_base_points = 3;
        plan.fibre_points_per_base = 3;
        let tol = ClassTolerance::default();
        let a = classify(&m.structure, &field, &plan, &tol).unwrap();
        let b = classify(&m.structure.scaled(c), &field, &plan, &tol).unwrap();
        prop_assert_eq!(a.verdicts, b.verdicts);
        let (ha, hb) = (a.factor_estimates.homothety_constant, b.factor_estimates.homothety_constant);
        prop_assert!((ha.unwrap() - 2.0).abs() < 1e-9 && (hb.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn identical_plans_give_identical_reports(seed in 0u64..1000) {
        let m = builtin_finsler("quartic", &[], 2).unwrap();
        let field = builtin_field("rotation", &[], 2).unwrap().into_field();
        let mut plan = SamplePlan::for_region(&m.region, seed);
        plan.num_base_points = 2;
        plan.fibre_points_per_base = 3;
        let tol = ClassTolerance::default();
        let a = classify(&m.structure, &field, &plan, &tol).unwrap().to_json();
        let b = classify(&m.structure, &field, &plan, &tol).unwrap().to_json();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn corpus_verdicts_and_factors_survive_scaling() {
    for gt in finslerkit::models::ground_truth() {
        let entry = finslerkit::models::finsler_from_spec(gt.finsler, gt.dim).unwrap();
        let field = finslerkit::models::field_from_spec(gt.field, gt.dim).unwrap().into_field();
        let mut plan = SamplePlan::for_region(&entry.region, 4);
        plan.num_base_points = 2;
        plan.fibre_points_per_base = 3;
        let tol = ClassTolerance::default();
        let a = classify(&entry.structure, &field, &plan, &tol).unwrap();
        let b = classify(&entry.structure.scaled(3.0), &field, &plan, &tol).unwrap();
        assert_eq!(a.verdicts, b.verdicts, "{}", gt.id);
        for (u, v) in a.factor_estimates.conformal.samples.iter().zip(&b.factor_estimates.conformal.samples) {
            assert!((u - v).abs() <= 1e-9 * (1.0 + u.abs()), "{}: φ̂ {u} vs {v}", gt.id);
        }
    }
}
