use std::sync::Arc;

use graded_darboux::cartan::{exterior_d, interior, lie_bracket, pullback, ChartMap, VectorField};
use graded_darboux::darboux::{one_form_darboux, verify_normal_form, NormalFormSpec, Variant};
use graded_darboux::grexpr::{equal, parse_expr, ChartSpec, EqualPolicy, EqualityMode, Weight};
use graded_darboux::homogeneity::{degree_of, weight_field_of_chart, Tensor, WeightVectorField};
use graded_darboux::pfaffian::{
    characteristic_class, darboux_class_oracle, liouville, presymplectic_check, reeb, FormKind, SampleOptions,
};

const THETA: &str = "y*(cosh(x*y) + 1)*(sinh(x*y) + x*y*cosh(x*y) + 1)*d(x) + x^2*y*cosh(x*y)*(cosh(x*y) + 1)*d(y)";
const ETA: &str = "y*(1 + sin(z) + cos(x*y)*(1 + sin(z)) - sin(x*y)*(exp(z) + x*y*(1 + sin(z))))*d(x) \
                   - x*sin(x*y)*(x*y*(sin(z) + 1) + exp(z))*d(y) + exp(z)*cos(x*y)*d(z)";

fn theta_charts() -> (Arc<ChartSpec>, ChartMap) {
    let src = ChartSpec::even(&[("x", 1), ("y", -1)]);
    let tgt = ChartSpec::even(&[("q", 1), ("p", -1)]);
    let phi = ChartMap::parse(&src, &tgt, &["x*(1 + sinh(x*y))", "y*(1 + cosh(x*y))"], None).unwrap();
    (src, phi)
}

#[test]
fn theta_in_darboux_coordinates() {
    let (src, phi) = theta_charts();
    let theta = parse_expr(THETA, &src).unwrap();
    let pq = parse_expr("p*d(q)", phi.target()).unwrap();
    let report = equal(&pullback(&phi, &pq).unwrap(), &theta, &EqualPolicy::default());
    assert!(report.equal);
    assert_eq!(report.mode, EqualityMode::Exact);

    let nabla = weight_field_of_chart(&src);
    let spec = NormalFormSpec { variant: Variant::Potential, r: 1, s: 0, eps: vec![], k: 0 };
    let rep = verify_normal_form(&theta, &phi, &spec, &nabla, &EqualPolicy::default()).unwrap();
    assert!(rep.passed, "{rep:?}");
    let bad = ChartMap::parse(&src, phi.target(), &["x*(1 + sinh(x*y))", "-y*(1 + cosh(x*y))"], None).unwrap();
    let rep = verify_normal_form(&theta, &bad, &spec, &nabla, &EqualPolicy::default()).unwrap();
    assert!(!rep.passed && rep.pullback.witness.is_some());

    let res = one_form_darboux(&theta, &phi, &presymp_spec(1, 0), &nabla, &[0.0, 0.0], &EqualPolicy::default()).unwrap();
    assert_eq!(res.spec.variant, Variant::Potential);
    assert!(res.report.passed);
}

fn presymp_spec(r: usize, k: usize) -> NormalFormSpec {
    NormalFormSpec { variant: Variant::Presymplectic, r, s: 0, eps: vec![], k }
}

#[test]
fn eta_in_darboux_coordinates() {
    let src = ChartSpec::even(&[("x", 1), ("y", -1), ("z", 0)]);
    let tgt = ChartSpec::even(&[("q", 1), ("p", -1), ("zeta", 0)]);
    let phi = ChartMap::parse(&src, &tgt, &["x*(1 + cos(x*y))", "y*(1 + sin(z))", "exp(z)*cos(x*y)"], None).unwrap();
    let eta = parse_expr(ETA, &src).unwrap();
    let canonical = parse_expr("d(zeta) + p*d(q)", &tgt).unwrap();
    let policy = EqualPolicy::default().with_samples(64);
    assert!(equal(&pullback(&phi, &canonical).unwrap(), &eta, &policy).equal);

    let nabla = weight_field_of_chart(&src);
    let presymp = ChartMap::parse(&src, &ChartSpec::even(&[("q", 1), ("p", -1), ("t", 0)]), &["x*(1 + cos(x*y))", "y*(1 + sin(z))", "z"], None).unwrap();
    let res = one_form_darboux(&eta, &presymp, &presymp_spec(1, 1), &nabla, &[0.0; 3], &EqualPolicy::default()).unwrap();
    assert_eq!(res.spec.variant, Variant::Contact);
    assert!(res.report.passed, "{:?}", res.report);
}

#[test]
fn cylinder() {
    let c = ChartSpec::even(&[("z", 0), ("p", 1), ("q", -1)]).with_boxes(vec![(-0.7, 0.7); 3]).unwrap();
    let alpha = parse_expr("d(z) - p*(2 + sin(p*q))*d(q)", &c).unwrap();
    let report = characteristic_class(&alpha, &SampleOptions::default()).unwrap();
    assert_eq!(report.kind, FormKind::Contact);
    assert_eq!(report.class, Some(3));
    for e in &report.evidence {
        assert_eq!(darboux_class_oracle(&alpha, &e.point).unwrap(), 3);
    }
    let nabla = weight_field_of_chart(&c);
    let deg = degree_of(&Tensor::Form(alpha.clone()), &nabla, &EqualPolicy::default()).unwrap();
    assert_eq!(deg.degree.unwrap().weight, Weight::zero());
    let r = reeb(&alpha, &EqualPolicy::default()).unwrap();
    assert!(r.equals(&VectorField::coordinate(&c, 0), &EqualPolicy::default()));
}

#[test]
fn liouville_fields() {
    let c = ChartSpec::even(&[("q", 1), ("p", -1)]);
    let alpha = parse_expr("p*d(q)", &c).unwrap();
    let x = liouville(&exterior_d(&alpha), &alpha, &EqualPolicy::default()).unwrap();
    assert_eq!(x, VectorField::parse(&c, &["0", "p"]).unwrap());

    let (src, _) = theta_charts();
    let theta = parse_expr(THETA, &src).unwrap();
    let nabla_theta = liouville(&exterior_d(&theta), &theta, &EqualPolicy::default()).unwrap();
    let nabla = weight_field_of_chart(&src);
    let bracket = lie_bracket(nabla.field(), &nabla_theta).unwrap();
    assert!(bracket.equals(&VectorField::zero(&src), &EqualPolicy::default()));
}

#[test]
fn no_homogeneous_chart_near_kernel_weight() {
    let c = ChartSpec::even(&[("q", 0), ("p", 0), ("z", 0)]);
    let field = VectorField::parse(&c, &["-sin(q)", "p*cos(q)", "1"]).unwrap();
    let nabla = WeightVectorField::new(field).unwrap();
    let omega = parse_expr("d(p)*d(q)", &c).unwrap();
    let rep = presymplectic_check(&omega, &SampleOptions::default()).unwrap();
    assert_eq!(rep.rank(), Some((2, 0)));
    let dz = VectorField::coordinate(&c, 2);
    assert!(interior(&dz, &omega).unwrap().is_zero());
    let deg = degree_of(&Tensor::Form(omega.clone()), &nabla, &EqualPolicy::default()).unwrap();
    assert_eq!(deg.degree.unwrap().weight, Weight::zero());
    let df = exterior_d(&parse_expr("p*sin(q)", &c).unwrap());
    assert!(df.components().values().all(|f| graded_darboux::grexpr::eval_body(f, &[0.0; 3]).unwrap() == 0.0));

    let alpha = parse_expr("p*d(q)", &c).unwrap();
    let res = one_form_darboux(&alpha, &ChartMap::identity(&c), &presymp_spec(1, 1), &nabla, &[0.0; 3], &EqualPolicy::default());
    assert!(res.is_err());

    // quotient field on (q, p) and its eigenfunctions
    let n = ChartSpec::even(&[("q", 0), ("p", 0)]).with_boxes(vec![(0.2, 2.0), (-1.0, 1.0)]).unwrap();
    let quotient = VectorField::parse(&n, &["-sin(q)", "p*cos(q)"]).unwrap();
    for w in [1, 2] {
        let f = parse_expr(&format!("(cos(q/2)/sin(q/2))^{w}*(1 + p*sin(q) + (p*sin(q))^2)"), &n).unwrap();
        let lhs = quotient.apply(&f);
        let rhs = f.scale(&w.into());
        assert!(equal(&lhs, &rhs, &EqualPolicy::default()).equal);
        let printed = parse_expr(&format!("(cos(q/p)/sin(q/2))^{w}"), &n).unwrap();
        assert!(!equal(&quotient.apply(&printed), &printed.scale(&w.into()), &EqualPolicy::default()).equal);
    }
}
