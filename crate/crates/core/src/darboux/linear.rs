//! Normal form of a constant even 2-form by linear congruence: a symplectic
//! basis on the even block, a signed diagonal on the odd block.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::cartan::ChartMap;
use crate::grexpr::{ChartSpec, Coeff, CoordinateDecl, GradedExpr, Parity, Weight};
use crate::linalg::rationalize;
use crate::pfaffian::flat_matrix;

use super::{DarbouxError, NormalFormSpec, Variant};

#[derive(Debug, Clone)]
pub struct LinearDarboux {
    pub map: ChartMap,
    pub spec: NormalFormSpec,
    /// Max-norm of `Tᵀ M' T − M` over both blocks.
    pub residual: f64,
}

const ZERO_TOL: f64 = 1e-10;

/// Symplectic Gram–Schmidt for the antisymmetric `m`: returns the rows of
/// `T` in the order `q1..qr, p1..pr, kernel`, so that `m = Tᵀ J T`.
fn symplectic_basis(m: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let n = m.nrows();
    let b = |u: &[f64], v: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += u[i] * m[(i, j)] * v[j];
            }
        }
        s
    };
    let mut pool: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut ps = Vec::new();
    let mut qs = Vec::new();
    let scale = m.amax().max(1.0);
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let v = b(&pool[i], &pool[j]);
                if v.abs() > ZERO_TOL * scale && best.is_none_or(|(_, _, bv)| v.abs() > bv.abs() * (1.0 + 1e-12)) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((i, j, v)) = best else { break };
        let (u, w, v) = if v > 0.0 { (pool[i].clone(), pool[j].clone(), v) } else { (pool[j].clone(), pool[i].clone(), -v) };
        let sp: Vec<f64> = u.iter().map(|x| x / v).collect();
        let sq = w;
        pool = pool
            .into_iter()
            .enumerate()
            .filter(|(k, _)| *k != i && *k != j)
            .map(|(_, x)| {
                let bp = b(&x, &sp);
                let bq = b(&x, &sq);
                x.iter().zip(sp.iter().zip(&sq)).map(|(xi, (pi, qi))| xi + bp * qi - bq * pi).collect()
            })
            .collect();
        ps.push(sp);
        qs.push(sq);
    }
    let r = ps.len();
    // columns of S: q-vectors, p-vectors, kernel; T = S⁻¹
    let cols: Vec<&Vec<f64>> = qs.iter().chain(ps.iter()).chain(pool.iter()).collect();
    let s = DMatrix::from_fn(n, n, |row, col| cols[col][row]);
    let t = s.try_inverse().expect("basis vectors are independent");
    (t, r)
}

/// Returns the rows of `T` (`+1` block, `−1` block, kernel) and the signs.
fn signed_diagonal(s: &DMatrix<f64>) -> (DMatrix<f64>, Vec<i8>) {
    let n = s.nrows();
    if n == 0 {
        return (DMatrix::zeros(0, 0), vec![]);
    }
    let eig = s.clone().symmetric_eigen();
    let scale = s.amax().max(1.0);
    let mut order: Vec<usize> = (0..n).collect();
    let class = |l: f64| if l > ZERO_TOL * scale { 0 } else if l < -ZERO_TOL * scale { 1 } else { 2 };
    order.sort_by_key(|&k| class(eig.eigenvalues[k]));
    let mut t = DMatrix::zeros(n, n);
    let mut eps = Vec::new();
    for (row, &k) in order.iter().enumerate() {
        let l = eig.eigenvalues[k];
        let factor = match class(l) {
            2 => 1.0,
            c => {
                eps.push(if c == 0 { 1 } else { -1 });
                (l.abs() / 2.0).sqrt()
            }
        };
        for j in 0..n {
            t[(row, j)] = factor * eig.eigenvectors[(j, k)];
        }
    }
    (t, eps)
}

fn coeff_of(x: f64) -> Coeff {
    match rationalize(x, 1_000_000) {
        Some(r) if (crate::grexpr::rational_to_f64(&r) - x).abs() <= 1e-15 * x.abs().max(1.0) => Coeff::Exact(r),
        _ => Coeff::Float(x),
    }
}

/// Linear coordinates in which a constant even 2-form reads
/// `Σ d(p_i)∧d(q^i) + Σ ε_l d(y^l)∧d(y^l)`. The new chart lists
/// `q1..qr, p1..pr, y1..ys, z1..zk`.
pub fn linear_darboux(omega: &GradedExpr) -> Result<LinearDarboux, DarbouxError> {
    let chart = omega.chart().clone();
    let n = chart.dim();
    if !omega.has_parity(Parity::Even) {
        return Err(DarbouxError::OddForm);
    }
    if !omega.is_zero() && !omega.has_form_degree(2) {
        return Err(DarbouxError::FormDegree(2));
    }
    if omega.terms().keys().any(|m| m.powers.iter().any(|&p| p != 0) || !m.atoms.is_empty()) {
        return Err(DarbouxError::NotConstant(omega.to_string()));
    }
    let fm = flat_matrix(omega, &vec![0.0; n])?;
    let even = fm.even.clone();
    let odd = fm.odd.clone();
    let block = |idx: &[usize]| DMatrix::from_fn(idx.len(), idx.len(), |a, b| fm.matrix[(idx[a], idx[b])]);
    let (a, s) = (block(&even), block(&odd));
    let (te, r) = symplectic_basis(&a);
    let (to, eps) = signed_diagonal(&s);
    let s_count = eps.len();

    // residuals of the congruences
    let mut j = DMatrix::zeros(even.len(), even.len());
    for i in 0..r {
        j[(r + i, i)] = 1.0;
        j[(i, r + i)] = -1.0;
    }
    let mut d = DMatrix::zeros(odd.len(), odd.len());
    for (l, e) in eps.iter().enumerate() {
        d[(l, l)] = 2.0 * *e as f64;
    }
    let residual = (te.transpose() * &j * &te - &a).amax().max((to.transpose() * &d * &to - &s).amax());

    // new coordinates as linear images
    let mut rows: Vec<(String, Parity, Vec<(usize, f64)>)> = Vec::new();
    let named = |prefix: &str, k: usize| format!("{prefix}{}", k + 1);
    let mut kernel = 0;
    for (row, _) in even.iter().enumerate() {
        let name = if row < r {
            named("q", row)
        } else if row < 2 * r {
            named("p", row - r)
        } else {
            kernel += 1;
            named("z", kernel - 1)
        };
        rows.push((name, Parity::Even, even.iter().enumerate().map(|(c, &i)| (i, te[(row, c)])).collect()));
    }
    let even_rows = rows.len();
    for (row, _) in odd.iter().enumerate() {
        let name = if row < s_count {
            named("y", row)
        } else {
            kernel += 1;
            named("z", kernel - 1)
        };
        rows.push((name, Parity::Odd, odd.iter().enumerate().map(|(c, &i)| (i, to[(row, c)])).collect()));
    }
    // order: q, p, y, then kernel (even kernel rows first)
    let (even_part, odd_part) = rows.split_at(even_rows);
    let (qp, ek) = even_part.split_at(2 * r);
    let (ys, ok) = odd_part.split_at(s_count);
    let ordered: Vec<&(String, Parity, Vec<(usize, f64)>)> = qp.iter().chain(ys).chain(ek).chain(ok).collect();

    let mut images = Vec::new();
    let mut decls = Vec::new();
    for (name, parity, combo) in ordered {
        let mut img = GradedExpr::zero(&chart);
        let mut weights = Vec::new();
        for &(i, c) in combo {
            if c.abs() > 1e-14 {
                img = &img + &GradedExpr::coordinate(&chart, i).scale(&coeff_of(c));
                weights.push(chart.weight(i).clone());
            }
        }
        let weight = if weights.windows(2).all(|w| w[0] == w[1]) { weights.pop().unwrap_or_else(Weight::zero) } else { Weight::zero() };
        let name = match combo.iter().filter(|(_, c)| c.abs() > 1e-14).collect::<Vec<_>>()[..] {
            [&(i, c)] if c == 1.0 => chart.coord(i).name.clone(),
            _ => name.clone(),
        };
        decls.push(CoordinateDecl::new(name, *parity, weight));
        images.push(img);
    }
    let decls = dedupe_names(decls);
    let target: Arc<ChartSpec> = ChartSpec::new(decls)?;
    let map = ChartMap::new(&chart, &target, images, None)?;
    let spec = NormalFormSpec { variant: Variant::Presymplectic, r, s: s_count, eps, k: n - 2 * r - s_count };
    Ok(LinearDarboux { map, spec, residual })
}

/// Reused source names may clash with generated ones; fall back to the
/// generated scheme with a prime.
fn dedupe_names(mut decls: Vec<CoordinateDecl>) -> Vec<CoordinateDecl> {
    for i in 0..decls.len() {
        while decls[..i].iter().any(|d| d.name == decls[i].name) || decls[i + 1..].iter().any(|d| d.name == decls[i].name) {
            decls[i].name.push('_');
        }
    }
    decls
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::pullback;
    use crate::grexpr::{equal, parse_expr, EqualPolicy};

    #[test]
    fn scaled_pair() {
        let c = ChartSpec::even(&[("x1", 0), ("x2", 0)]);
        let omega = parse_expr("2*d(x1)*d(x2)", &c).unwrap();
        let ld = linear_darboux(&omega).unwrap();
        assert_eq!(ld.spec.r, 1);
        assert!(ld.residual < 1e-12);
        let canon = ld.spec.canonical(ld.map.target()).unwrap();
        assert!(equal(&pullback(&ld.map, &canon).unwrap(), &omega, &EqualPolicy::default()).equal);
    }

    #[test]
    fn canonical_input_is_identity() {
        let c = ChartSpec::even(&[("q", -1), ("p", 1), ("t", 0)]);
        let omega = parse_expr("d(p)*d(q)", &c).unwrap();
        let ld = linear_darboux(&omega).unwrap();
        assert_eq!(ld.map.target().names(), vec!["q", "p", "t"]);
        let ids: Vec<GradedExpr> = ["q", "p", "t"].iter().map(|s| parse_expr(s, &c).unwrap()).collect();
        assert_eq!(ld.map.images(), &ids[..]);
        assert_eq!(ld.map.target().weight(1), &Weight::from_int(1));
    }

    #[test]
    fn odd_signs() {
        let c = ChartSpec::from_decls(&[("a", Parity::Odd, "0"), ("b", Parity::Odd, "0")]).unwrap();
        let omega = parse_expr("d(a)*d(a) - d(b)*d(b)", &c).unwrap();
        let ld = linear_darboux(&omega).unwrap();
        assert_eq!(ld.spec.eps, vec![1, -1]);
        let omega = parse_expr("d(a)*d(b)", &c).unwrap();
        let ld = linear_darboux(&omega).unwrap();
        assert_eq!(ld.spec.eps, vec![1, -1]);
        let canon = ld.spec.canonical(ld.map.target()).unwrap();
        assert!(equal(&pullback(&ld.map, &canon).unwrap(), &omega, &EqualPolicy::default()).equal);
    }
}
