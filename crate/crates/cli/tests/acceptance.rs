//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use graded_darboux::cartan::{exterior_d, interior, lie_bracket, lie_derivative, pullback, ChartMap, VectorField};
use graded_darboux::darboux::{homotopy, linear_darboux, poincare_primitive, straighten_commuting, verify_normal_form, GridOptions, NormalFormSpec, Variant};
use graded_darboux::grexpr::{
    equal, equal_randomized, eval_body, eval_body_exact, parse_expr, ChartSpec, Coeff, CoordinateDecl, EqualPolicy, EqualityMode, GradedExpr, Parity, Weight,
};
use graded_darboux::homogeneity::{degree_of, weight_field_of_chart, Tensor};
use graded_darboux::pfaffian::{characteristic_class, darboux_class_oracle, flat_matrix, liouville, presymplectic_check, FormKind, SampleOptions};
use graded_darboux::random::{random_chart, random_field, random_form, random_homogeneous_form, Shape};
use graded_darboux_cli::{run_path, RunOptions};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const THETA: &str = "y*(cosh(x*y) + 1)*(sinh(x*y) + x*y*cosh(x*y) + 1)*d(x) + x^2*y*cosh(x*y)*(cosh(x*y) + 1)*d(y)";
const ETA: &str = "y*(1 + sin(z) + cos(x*y)*(1 + sin(z)) - sin(x*y)*(exp(z) + x*y*(1 + sin(z))))*d(x) \
                   - x*sin(x*y)*(x*y*(sin(z) + 1) + exp(z))*d(y) + exp(z)*cos(x*y)*d(z)";

fn sign(b: bool) -> Coeff {
    Coeff::int(if b { -1 } else { 1 })
}

fn theta_chart() -> Arc<ChartSpec> {
    ChartSpec::even(&[("x", 1), ("y", -1)])
}

fn theta_reproduction() -> Outcome {
    let src = theta_chart();
    let tgt = ChartSpec::even(&[("q", 1), ("p", -1)]);
    let phi = ChartMap::parse(&src, &tgt, &["x*(1 + sinh(x*y))", "y*(1 + cosh(x*y))"], None).map_err(|e| e.to_string())?;
    let theta = parse_expr(THETA, &src).map_err(|e| e.to_string())?;
    let back = pullback(&phi, &parse_expr("p*d(q)", &tgt).unwrap()).map_err(|e| e.to_string())?;
    let r = equal(&back, &theta, &EqualPolicy::default());
    ensure!(r.equal, "pullback differs from theta");
    ensure!(r.mode == EqualityMode::Exact, "equality was decided in {} mode", r.mode);
    Ok("exact".into())
}

fn eta_reproduction() -> Outcome {
    let src = ChartSpec::even(&[("x", 1), ("y", -1), ("z", 0)]);
    let tgt = ChartSpec::even(&[("q", 1), ("p", -1), ("zeta", 0)]);
    let phi = ChartMap::parse(&src, &tgt, &["x*(1 + cos(x*y))", "y*(1 + sin(z))", "exp(z)*cos(x*y)"], None).map_err(|e| e.to_string())?;
    let eta = parse_expr(ETA, &src).map_err(|e| e.to_string())?;
    let back = pullback(&phi, &parse_expr("d(zeta) + p*d(q)", &tgt).unwrap()).map_err(|e| e.to_string())?;
    let r = equal_randomized(&back, &eta, &EqualPolicy::default().with_samples(64).with_tol(1e-9));
    ensure!(r.equal && r.samples == 64, "pullback differs from eta, witness {:?}", r.witness);
    ensure!(equal(&back, &eta, &EqualPolicy::default()).equal, "default equality disagrees");
    Ok(format!("randomized, {} points, residual {:.1e}", r.samples, r.residual))
}

fn cylinder() -> Outcome {
    let c = ChartSpec::even(&[("z", 0), ("p", 1), ("q", -1)]).with_boxes(vec![(-0.7, 0.7); 3]).unwrap();
    let alpha = parse_expr("d(z) - p*(2 + sin(p*q))*d(q)", &c).unwrap();
    let rep = characteristic_class(&alpha, &SampleOptions::default()).map_err(|e| e.to_string())?;
    ensure!(rep.kind == FormKind::Contact && rep.class == Some(3), "got {} class {:?}", rep.kind, rep.class);
    for e in &rep.evidence {
        let o = darboux_class_oracle(&alpha, &e.point).map_err(|e| e.to_string())?;
        ensure!(o == 3, "oracle class {o} at {:?}", e.point);
    }
    let nabla = weight_field_of_chart(&c);
    let d = degree_of(&Tensor::Form(alpha.clone()), &nabla, &EqualPolicy::default()).map_err(|e| e.to_string())?;
    ensure!(d.homogeneous && d.degree.as_ref().map(|d| d.to_string()).as_deref() == Some("(even, 0)"), "degree {:?}", d.degree);
    let tgt = ChartSpec::even(&[("Q", -1), ("P", 1), ("z", 0)]);
    let phi = ChartMap::parse(&c, &tgt, &["q", "-p*(2 + sin(p*q))", "z"], None).unwrap();
    let spec = NormalFormSpec { variant: Variant::Contact, r: 1, s: 0, eps: vec![], k: 0 };
    let v = verify_normal_form(&alpha, &phi, &spec, &nabla, &EqualPolicy::default()).map_err(|e| e.to_string())?;
    ensure!(v.passed, "derived chart rejected: {v:?}");
    Ok(format!("contact, class 3, degree (even, 0), chart verified in {} mode", v.pullback.mode))
}

fn liouville_suite() -> Outcome {
    let c = ChartSpec::even(&[("q", 1), ("p", -1)]);
    let alpha = parse_expr("p*d(q)", &c).unwrap();
    let x = liouville(&exterior_d(&alpha), &alpha, &EqualPolicy::default()).map_err(|e| e.to_string())?;
    ensure!(x == VectorField::parse(&c, &["0", "p"]).unwrap(), "Liouville field of p dq is {x}");

    let src = theta_chart();
    let theta = parse_expr(THETA, &src).unwrap();
    let nt = liouville(&exterior_d(&theta), &theta, &EqualPolicy::default()).map_err(|e| e.to_string())?;
    let b = lie_bracket(weight_field_of_chart(&src).field(), &nt).map_err(|e| e.to_string())?;
    let mut modes = Vec::new();
    for f in b.coeffs() {
        let r = equal(f, &GradedExpr::zero(&src), &EqualPolicy::default());
        ensure!(r.equal, "bracket coefficient {f} is not zero");
        modes.push(r.mode);
    }
    let mode = if modes.contains(&EqualityMode::Randomized) { "randomized" } else { "exact" };
    Ok(format!("p∂p exact; bracket vanishes ({mode})"))
}

fn counterexample() -> Outcome {
    let c = ChartSpec::even(&[("q", 0), ("p", 0), ("z", 0)]);
    let omega = parse_expr("d(p)*d(q)", &c).unwrap();
    let rep = presymplectic_check(&omega, &SampleOptions::default()).map_err(|e| e.to_string())?;
    ensure!(rep.rank() == Some((2, 0)), "rank {:?}", rep.rank());
    ensure!(interior(&VectorField::coordinate(&c, 2), &omega).unwrap().is_zero(), "∂z not in the kernel");
    let df = exterior_d(&parse_expr("p*sin(q)", &c).unwrap());
    for f in df.components().values() {
        ensure!(eval_body(f, &[0.0; 3]).unwrap() == 0.0, "d(p sin q) nonzero at the origin");
    }
    let n = ChartSpec::even(&[("q", 0), ("p", 0)]).with_boxes(vec![(0.2, 2.0), (-1.0, 1.0)]).unwrap();
    let quotient = VectorField::parse(&n, &["-sin(q)", "p*cos(q)"]).unwrap();
    for w in [1i64, 2] {
        for big_f in ["1 + u", "2 - u + 3*u^2", "u^3"] {
            let big_f = big_f.replace('u', "(p*sin(q))");
            let f = parse_expr(&format!("(cos(q/2)/sin(q/2))^{w}*({big_f})"), &n).unwrap();
            let r = equal(&quotient.apply(&f), &f.scale(&Coeff::int(w)), &EqualPolicy::default());
            ensure!(r.equal, "eigenfunction identity fails for w = {w}, F = {big_f}");
        }
    }
    Ok("corank 1, kernel ∂z, eigenfunctions for w = 1, 2".into())
}

/// Generators of a (2|2) chart with bidegrees (form degree, parity).
fn generators(c: &Arc<ChartSpec>) -> Vec<(GradedExpr, u32, u32)> {
    let mut out = Vec::new();
    for i in 0..c.dim() {
        let s = c.parity(i).bit();
        out.push((GradedExpr::coordinate(c, i), 0, s));
        out.push((GradedExpr::differential(c, i), 1, s));
    }
    out
}

/// Bubble-sorts a word of generator indices; returns the Koszul sign and
/// whether a repeated generator squares to zero.
fn koszul(word: &[usize], bideg: &[(u32, u32)]) -> (bool, Vec<usize>, bool) {
    let mut w = word.to_vec();
    let mut negative = false;
    for i in 0..w.len() {
        for j in 0..w.len() - 1 - i {
            if w[j] > w[j + 1] {
                let (a, b) = (bideg[w[j]], bideg[w[j + 1]]);
                negative ^= (a.0 * b.0 + a.1 * b.1) % 2 == 1;
                w.swap(j, j + 1);
            }
        }
    }
    let vanishes = w.windows(2).any(|p| p[0] == p[1] && (bideg[p[0]].0 + bideg[p[0]].1) % 2 == 1);
    (negative, w, vanishes)
}

fn sign_oracle() -> Outcome {
    let c = ChartSpec::from_decls(&[("x", Parity::Even, "0"), ("y", Parity::Even, "0"), ("a", Parity::Odd, "0"), ("b", Parity::Odd, "0")]).unwrap();
    let gens = generators(&c);
    let bideg: Vec<(u32, u32)> = gens.iter().map(|g| (g.1, g.2)).collect();
    let n = gens.len();
    let product = |w: &[usize]| w.iter().fold(GradedExpr::constant(&c, Coeff::int(1)), |acc, &i| &acc * &gens[i].0);
    let mut words: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            words.push(vec![i, j]);
            for k in 0..n {
                words.push(vec![i, j, k]);
            }
        }
    }
    for w in &words {
        let (negative, sorted, vanishes) = koszul(w, &bideg);
        let lhs = product(w);
        if vanishes {
            ensure!(lhs.is_zero(), "{w:?} should vanish");
        } else {
            let rhs = product(&sorted).scale(&sign(negative));
            ensure!(!rhs.is_zero() && lhs == rhs, "reordering {w:?}");
        }
    }
    Ok(format!("{} words, 100% agreement", words.len()))
}

fn contract(x: &VectorField, w: &GradedExpr) -> GradedExpr {
    if w.is_zero() || w.has_form_degree(0) {
        GradedExpr::zero(w.chart())
    } else {
        interior(x, w).unwrap()
    }
}

fn calculus_suite() -> Outcome {
    const N: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let sh = Shape::default();
    let parity = |rng: &mut ChaCha8Rng| Parity::from_bit(rng.gen_range(0..2));
    for case in 0..N {
        let c = random_chart(rng.gen_range(1..=4), rng.gen_range(0..=3), &mut rng);
        let k = rng.gen_range(0..=2);
        let w = random_form(&c, k, None, &sh, &mut rng);
        ensure!(exterior_d(&exterior_d(&w)).is_zero(), "d² ≠ 0 on {w} (case {case})");

        let x = random_field(&c, parity(&mut rng), &sh, &mut rng);
        let y = random_field(&c, parity(&mut rng), &sh, &mut rng);
        let cartan = &contract(&x, &exterior_d(&w)) + &exterior_d(&contract(&x, &w));
        ensure!(lie_derivative(&x, &w) == cartan, "Cartan formula fails (case {case})");

        let ka = rng.gen_range(0..=2);
        let pa = parity(&mut rng);
        let a = random_form(&c, ka, Some(pa), &sh, &mut rng);
        let b = random_form(&c, rng.gen_range(0..=2), None, &sh, &mut rng);
        let ab = &a * &b;
        let rhs = &(&exterior_d(&a) * &b) + &(&a * &exterior_d(&b)).scale(&sign(ka % 2 == 1));
        ensure!(exterior_d(&ab) == rhs, "Leibniz for d fails (case {case})");
        let sx = x.parity().bit();
        let rhs = &(&lie_derivative(&x, &a) * &b) + &(&a * &lie_derivative(&x, &b)).scale(&sign(sx * pa.bit() == 1));
        ensure!(lie_derivative(&x, &ab) == rhs, "Leibniz for L_X fails (case {case})");
        let rhs = &(&contract(&x, &a) * &b) + &(&a * &contract(&x, &b)).scale(&sign((ka as u32 + sx * pa.bit()) % 2 == 1));
        ensure!(contract(&x, &ab) == rhs, "Leibniz for i_X fails (case {case})");

        let s = sx * y.parity().bit() == 1;
        let lhs = &lie_derivative(&x, &contract(&y, &w)) - &contract(&y, &lie_derivative(&x, &w)).scale(&sign(s));
        ensure!(lhs == contract(&lie_bracket(&x, &y).unwrap(), &w), "[L_X, i_Y] ≠ i_[X,Y] (case {case})");
    }
    Ok(format!("{N} instances each of d², Cartan, Leibniz (d, L, i), [L, i]"))
}

fn origin_value(f: &GradedExpr) -> BigRational {
    eval_body_exact(f, &vec![BigRational::zero(); f.chart().dim()]).unwrap()
}

fn homotopy_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let policy = EqualPolicy::default();
    for case in 0..200 {
        let c = random_chart(rng.gen_range(1..=3), rng.gen_range(0..=2), &mut rng);
        let k = rng.gen_range(0..=2);
        let mut w = random_form(&c, k, None, &Shape::default(), &mut rng);
        if k == 0 {
            w = &w - &GradedExpr::constant(&c, Coeff::Exact(origin_value(&w)));
        }
        let back = &exterior_d(&homotopy(&w).unwrap()) + &homotopy(&exterior_d(&w)).unwrap();
        ensure!(back == w, "dK + Kd ≠ id on {w} (case {case})");
    }
    let mut primitives = 0;
    while primitives < 200 {
        let c = random_chart(rng.gen_range(1..=3), rng.gen_range(0..=2), &mut rng);
        let weight = Weight::from_int(rng.gen_range(-2..=2));
        let parity = Parity::from_bit(rng.gen_range(0..2));
        let omega = exterior_d(&random_homogeneous_form(&c, rng.gen_range(0..=1), parity, &weight, &Shape::default(), &mut rng));
        if omega.is_zero() {
            continue;
        }
        let nabla = weight_field_of_chart(&c);
        let alpha = poincare_primitive(&omega, &nabla, &vec![0.0; c.dim()]).map_err(|e| e.to_string())?;
        ensure!(exterior_d(&alpha) == omega, "d(primitive) ≠ ω for {omega}");
        let da = degree_of(&Tensor::Form(alpha.clone()), &nabla, &policy).unwrap();
        let dw = degree_of(&Tensor::Form(omega.clone()), &nabla, &policy).unwrap();
        ensure!(da.homogeneous && da.degree == dw.degree, "primitive of {omega} has degree {:?}", da.degree);
        ensure!(alpha.components().values().all(|f| origin_value(f).is_zero()), "primitive of {omega} is nonzero at the center");
        primitives += 1;
    }
    Ok("200 homotopy identities, 200 homogeneous primitives".into())
}

fn rational_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[rank][col];
                for k in 0..cols {
                    let v = &f * &m[rank][k];
                    m[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Signature of a symmetric rational matrix by congruence elimination.
fn inertia(mut s: Vec<Vec<BigRational>>) -> (usize, usize) {
    let (mut pos, mut neg) = (0, 0);
    loop {
        let n = s.len();
        if n == 0 {
            return (pos, neg);
        }
        let p = match (0..n).find(|&i| !s[i][i].is_zero()) {
            Some(p) => p,
            None => {
                let Some((i, j)) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| !s[i][j].is_zero()) else {
                    return (pos, neg);
                };
                for k in 0..n {
                    let v = s[j][k].clone();
                    s[i][k] += v;
                }
                for k in 0..n {
                    let v = s[k][j].clone();
                    s[k][i] += v;
                }
                i
            }
        };
        let d = s[p][p].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&k| k != p).collect();
        s = rest.iter().map(|&a| rest.iter().map(|&b| &s[a][b] - &s[a][p] * &s[p][b] / &d).collect()).collect();
    }
}

fn linear_darboux_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut decls: Vec<CoordinateDecl> = (0..6).map(|i| CoordinateDecl::new(format!("x{i}"), Parity::Even, Weight::zero())).collect();
    decls.extend((0..3).map(|i| CoordinateDecl::new(format!("a{i}"), Parity::Odd, Weight::zero())));
    let c = ChartSpec::new(decls).unwrap();
    let rat = |v: i64| BigRational::from_integer(v.into());
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let mut omega = GradedExpr::zero(&c);
        let mut a = vec![vec![BigRational::zero(); 6]; 6];
        let mut s = vec![vec![BigRational::zero(); 3]; 3];
        for i in 0..6 {
            for j in i + 1..6 {
                let v = rng.gen_range(-3i64..=3) * i64::from(rng.gen_bool(0.6));
                omega = &omega + &(&GradedExpr::differential(&c, i) * &GradedExpr::differential(&c, j)).scale(&Coeff::int(v));
                a[i][j] = rat(v);
                a[j][i] = -rat(v);
            }
        }
        for l in 0..3 {
            for m in l..3 {
                let v = rng.gen_range(-2i64..=2);
                omega = &omega + &(&GradedExpr::differential(&c, 6 + l) * &GradedExpr::differential(&c, 6 + m)).scale(&Coeff::int(v));
                if l == m {
                    s[l][l] = rat(2 * v);
                } else {
                    s[l][m] = rat(v);
                    s[m][l] = rat(v);
                }
            }
        }
        let ld = linear_darboux(&omega).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(ld.spec.variant == Variant::Presymplectic, "case {case}: variant {}", ld.spec.variant);
        ensure!(2 * ld.spec.r == rational_rank(a), "case {case}: r = {}", ld.spec.r);
        let (p, n) = inertia(s);
        let count = |pos: bool| ld.spec.eps.iter().filter(|e| (**e > 0) == pos).count();
        ensure!(count(true) == p && count(false) == n, "case {case}: eps {:?} vs signature ({p}, {n})", ld.spec.eps);
        let canon = ld.spec.canonical(ld.map.target()).unwrap();
        let back = flat_matrix(&pullback(&ld.map, &canon).unwrap(), &[0.0; 9]).unwrap();
        let orig = flat_matrix(&omega, &[0.0; 9]).unwrap();
        let res = (back.matrix - orig.matrix).amax().max(ld.residual);
        ensure!(res < 1e-12, "case {case}: residual {res:e}");
        worst = worst.max(res);
    }
    Ok(format!("100 forms in dim (6|3), worst residual {worst:.1e}"))
}

fn classification_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut compared, mut drawn) = (0, 0);
    while compared < 100 {
        drawn += 1;
        ensure!(drawn < 2000, "too few regular forms");
        let n = rng.gen_range(2..=5);
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let decls: Vec<(&str, i64)> = names.iter().map(|s| (s.as_str(), 0)).collect();
        let c = ChartSpec::even(&decls);
        let alpha = random_form(&c, 1, None, &Shape { max_degree: 2, terms: 5, max_coeff: 3 }, &mut rng);
        let report = characteristic_class(&alpha, &SampleOptions::default()).map_err(|e| e.to_string())?;
        if report.kind == FormKind::Irregular || report.evidence.iter().any(|e| e.class.is_none()) {
            continue;
        }
        ensure!(report.evidence.len() == 16, "expected 16 sample points, got {}", report.evidence.len());
        for e in &report.evidence {
            let o = darboux_class_oracle(&alpha, &e.point).map_err(|e| e.to_string())?;
            ensure!(e.class == Some(o), "{alpha} at {:?}: {:?} vs oracle {o}", e.point, e.class);
        }
        compared += 1;
    }
    Ok(format!("100 regular forms ({drawn} drawn), 16 points each"))
}

fn quadrature(x: f64) -> f64 {
    let s3 = 3f64.sqrt();
    (2.0 / s3) * ((2.0 * (x / 2.0).tan() + 1.0) / s3).atan()
}

fn straightening() -> Outcome {
    let c = ChartSpec::even(&[("x", 0)]).with_boxes(vec![(-2.0, 2.0)]).unwrap();
    let x = VectorField::parse(&c, &["2 + sin(x)"]).unwrap();
    let grid = straighten_commuting(&[x], &[0.0], &GridOptions { nodes: 9, ..GridOptions::default() }).map_err(|e| e.to_string())?;
    ensure!(grid.certified, "not certified: {:e}", grid.max_error);
    let mut quad: f64 = 0.0;
    for (p, t) in grid.points.iter().zip(&grid.params) {
        quad = quad.max((quadrature(p[0]) - quadrature(0.0) - t[0]).abs());
    }
    ensure!(quad < 1e-6, "quadrature deviation {quad:e}");

    let c = ChartSpec::even(&[("x", 0), ("y", 0), ("z", 0)]).with_boxes(vec![(-2.0, 2.0); 3]).unwrap();
    let x1 = VectorField::parse(&c, &["1", "0", "0"]).unwrap();
    let x2 = VectorField::parse(&c, &["0", "1", "cos(y)"]).unwrap();
    let pair = straighten_commuting(&[x1, x2], &[0.0; 3], &GridOptions::default()).map_err(|e| e.to_string())?;
    ensure!(pair.certified, "pair not certified: {:e}", pair.max_error);
    Ok(format!("errors {:.1e} and {:.1e}, quadrature {quad:.1e}", grid.max_error, pair.max_error))
}

fn degree_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let policy = EqualPolicy::default();
    let mut checked = 0;
    while checked < 500 {
        let c = random_chart(rng.gen_range(1..=3), rng.gen_range(0..=2), &mut rng);
        let nabla = weight_field_of_chart(&c);
        let mut pick = || {
            let w = Weight::from_int(rng.gen_range(-3..=3));
            let k = rng.gen_range(0..=1);
            let p = Parity::from_bit(rng.gen_range(0..2));
            random_homogeneous_form(&c, k, p, &w, &Shape { terms: 2, ..Shape::default() }, &mut rng)
        };
        let (a, b) = (pick(), pick());
        let ab = &a * &b;
        if ab.is_zero() {
            continue;
        }
        let deg = |e: &GradedExpr| degree_of(&Tensor::Form(e.clone()), &nabla, &policy).unwrap();
        let (da, db, dab) = (deg(&a), deg(&b), deg(&ab));
        ensure!(dab.homogeneous && dab.mode == EqualityMode::Exact, "{ab} not exactly homogeneous");
        ensure!(dab.degree == Some(&da.degree.unwrap() + &db.degree.unwrap()), "degree of {a} * {b}");
        checked += 1;
    }
    let mut monomials = 0;
    while monomials < 500 {
        let c = random_chart(rng.gen_range(1..=4), rng.gen_range(0..=3), &mut rng);
        let mut m = GradedExpr::constant(&c, Coeff::int(rng.gen_range(1..=5)));
        let mut w = Weight::zero();
        for i in 0..c.dim() {
            let e = if c.parity(i).is_odd() { rng.gen_range(0..=1) } else { rng.gen_range(0..=3) };
            for _ in 0..e {
                m = &m * &GradedExpr::coordinate(&c, i);
                w = &w + c.weight(i);
            }
        }
        if w == Weight::zero() {
            continue;
        }
        let d = degree_of(&Tensor::Form(m.clone()), &weight_field_of_chart(&c), &policy).unwrap();
        ensure!(d.degree.map(|d| d.weight) == Some(w.clone()), "weight of {m}");
        ensure!(origin_value(&m).is_zero(), "{m} of weight {w} is nonzero at the origin");
        monomials += 1;
    }
    Ok("500 products, 500 monomials".into())
}

fn cli_determinism() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../manifests");
    let mut names: Vec<_> = std::fs::read_dir(&dir).map_err(|e| e.to_string())?.filter_map(Result::ok).map(|e| e.path()).filter(|p| p.extension().is_some_and(|e| e == "json")).collect();
    names.sort();
    for p in &names {
        let opts = RunOptions { seed: 0, ..RunOptions::default() };
        let first = run_path(p, &opts).map_err(|e| format!("{}: {e}", p.display()))?;
        let second = run_path(p, &opts).map_err(|e| format!("{}: {e}", p.display()))?;
        ensure!(first.to_json() == second.to_json(), "{} is not reproducible", p.display());
        ensure!(first.all_pass(), "{} has failing tasks", p.display());
    }
    Ok(format!("{} manifests byte-identical across runs", names.len()))
}

fn main() {
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("theta reproduction", Some(Duration::from_secs(1)), theta_reproduction),
        ("eta reproduction", Some(Duration::from_secs(5)), eta_reproduction),
        ("cylinder example", Some(Duration::from_secs(2)), cylinder),
        ("Liouville suite", Some(Duration::from_secs(1)), liouville_suite),
        ("counterexample suite", Some(Duration::from_secs(2)), counterexample),
        ("sign oracle", None, sign_oracle),
        ("calculus properties", Some(Duration::from_secs(60)), calculus_suite),
        ("homotopy suite", None, homotopy_suite),
        ("linear Darboux", None, linear_darboux_suite),
        ("classification vs oracle", None, classification_suite),
        ("straightening", Some(Duration::from_secs(10)), straightening),
        ("degree laws", None, degree_laws),
        ("CLI determinism", None, cli_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {:>2} {tag} {name} [{elapsed:.2?}]: {detail}", i + 1);
        failures += usize::from(outcome.is_err());
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
