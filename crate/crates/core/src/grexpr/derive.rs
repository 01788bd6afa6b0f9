//! Graded derivations and substitution homomorphisms.

use std::sync::Arc;

use super::chart::{ChartSpec, Parity};
use super::expr::{apply_func, gdiv, Atom, Func, GradedExpr, Monomial};
use super::ExprError;

/// A graded derivation of bidegree `(form_shift, parity)`, determined by its
/// values on the generators. Applied with the left convention
/// `D(uv) = D(u) v + (-1)^{|D||u|} u D(v)`.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub form_shift: i32,
    pub parity: Parity,
    pub on_coords: Vec<GradedExpr>,
    pub on_diffs: Vec<GradedExpr>,
}

fn atom_derivative(chart: &Arc<ChartSpec>, f: Func, u: &GradedExpr) -> Result<GradedExpr, ExprError> {
    Ok(match f {
        Func::Sin => apply_func(Func::Cos, u)?,
        Func::Cos => -apply_func(Func::Sin, u)?,
        Func::Exp => apply_func(Func::Exp, u)?,
        Func::Log => gdiv(&GradedExpr::one(chart), u)?,
        Func::Sinh => apply_func(Func::Cosh, u)?,
        Func::Cosh => apply_func(Func::Sinh, u)?,
    })
}

fn atom_power(chart: &Arc<ChartSpec>, atom: &Atom, e: i32) -> GradedExpr {
    if e == 0 {
        return GradedExpr::one(chart);
    }
    let mut m = Monomial::one(chart.dim());
    m.atoms.push((atom.clone(), e));
    GradedExpr::single(chart, m, super::Coeff::one())
}

impl Derivation {
    pub fn new(form_shift: i32, parity: Parity, on_coords: Vec<GradedExpr>, on_diffs: Vec<GradedExpr>) -> Derivation {
        Derivation { form_shift, parity, on_coords, on_diffs }
    }

    fn shift_bit(&self) -> u32 {
        self.form_shift.rem_euclid(2) as u32
    }

    pub fn apply(&self, a: &GradedExpr) -> GradedExpr {
        let chart = a.chart();
        let n = chart.dim();
        let dp = self.shift_bit();
        let ds = self.parity.bit();
        let mut out = GradedExpr::zero(chart);
        for (mono, c) in a.terms() {
            let mut body = mono.clone();
            body.atoms.clear();
            // Atoms are even functions and sit first; no sign reaches them.
            for (k, (atom, e)) in mono.atoms.iter().enumerate() {
                let (inner, du) = match atom {
                    Atom::Func(f, t) => {
                        let u = GradedExpr::from_terms(chart.clone(), t.clone());
                        let du = self.apply(&u);
                        if du.is_zero() {
                            continue;
                        }
                        match atom_derivative(chart, *f, &u) {
                            Ok(fp) => (fp, du),
                            Err(_) => continue,
                        }
                    }
                    Atom::Group(t) => {
                        let u = GradedExpr::from_terms(chart.clone(), t.clone());
                        let du = self.apply(&u);
                        if du.is_zero() {
                            continue;
                        }
                        (GradedExpr::one(chart), du)
                    }
                };
                let mut others = Monomial::one(n);
                for (j, ae) in mono.atoms.iter().enumerate() {
                    if j != k {
                        others.atoms.push(ae.clone());
                    }
                }
                let others = GradedExpr::single(chart, others, c.clone());
                let lowered = atom_power(chart, atom, e - 1).scale(&super::Coeff::int(*e as i64));
                let front = &(&others * &lowered) * &inner;
                let rest = GradedExpr::single(chart, body.clone(), super::Coeff::one());
                out = &out + &(&(&front * &du) * &rest);
            }

            // Coordinate and differential blocks, in canonical order.
            let mut prefix_p = 0u32;
            let mut prefix_s = 0u32;
            for pos in 0..2 * n {
                let (is_diff, i) = if pos < n { (false, pos) } else { (true, pos - n) };
                let k = if is_diff { mono.diffs[i] as i32 } else { mono.powers[i] };
                if k == 0 {
                    continue;
                }
                let image = if is_diff { &self.on_diffs[i] } else { &self.on_coords[i] };
                let sigma = chart.parity(i).bit();
                let block_p = if is_diff { k as u32 } else { 0 };
                let block_s = if is_diff { (k as u32) * sigma } else { (k.rem_euclid(2) as u32) * sigma };
                if !image.is_zero() {
                    let negative = (dp * prefix_p + ds * prefix_s) % 2 == 1;
                    let mut prefix = Monomial::one(n);
                    let mut lowered = Monomial::one(n);
                    let mut suffix = Monomial::one(n);
                    prefix.atoms = mono.atoms.clone();
                    for q in 0..2 * n {
                        let (qd, qi) = if q < n { (false, q) } else { (true, q - n) };
                        let target = if q < pos {
                            &mut prefix
                        } else if q > pos {
                            &mut suffix
                        } else {
                            &mut lowered
                        };
                        if qd {
                            target.diffs[qi] = mono.diffs[qi];
                        } else {
                            target.powers[qi] = mono.powers[qi];
                        }
                    }
                    if is_diff {
                        lowered.diffs[i] -= 1;
                    } else {
                        lowered.powers[i] -= 1;
                    }
                    let coeff = if negative { c.neg() } else { c.clone() }.mul(&super::Coeff::int(k as i64));
                    let prefix = GradedExpr::single(chart, prefix, coeff);
                    let lowered = GradedExpr::single(chart, lowered, super::Coeff::one());
                    let suffix = GradedExpr::single(chart, suffix, super::Coeff::one());
                    // D(g^k) = k D(g) g^(k-1) for self-commuting g.
                    let term = &(&(&prefix * image) * &lowered) * &suffix;
                    out = &out + &term;
                }
                prefix_p += block_p;
                prefix_s += block_s;
            }
        }
        out
    }
}

/// Left partial derivative with respect to the coordinate with index `i`.
pub fn partial(a: &GradedExpr, i: usize) -> GradedExpr {
    let chart = a.chart();
    let n = chart.dim();
    let mut on_coords = vec![GradedExpr::zero(chart); n];
    on_coords[i] = GradedExpr::one(chart);
    Derivation::new(0, chart.parity(i), on_coords, vec![GradedExpr::zero(chart); n]).apply(a)
}

/// Graded algebra homomorphism sending coordinate `i` to `map[i]` and
/// `d(x_i)` to `d_map[i]`. Images may live on another chart; the result
/// lives on the chart of the images.
pub fn substitute(a: &GradedExpr, map: &[GradedExpr], d_map: &[GradedExpr]) -> Result<GradedExpr, ExprError> {
    let chart = a.chart();
    let n = chart.dim();
    if map.len() != n || d_map.len() != n {
        return Err(ExprError::InvalidDeclaration(format!("substitution needs {n} coordinate and differential images")));
    }
    let target = map[0].chart().clone();
    for i in 0..n {
        map[i].check_chart(&map[0])?;
        d_map[i].check_chart(&map[0])?;
        let name = &chart.coord(i).name;
        let sigma = chart.parity(i);
        if !map[i].is_function() || !map[i].has_parity(sigma) {
            return Err(ExprError::ParityMismatch(format!("image of '{name}' must be a {sigma} function")));
        }
        if !d_map[i].has_parity(sigma) {
            return Err(ExprError::ParityMismatch(format!("image of d({name}) must be {sigma}")));
        }
    }
    substitute_terms(a, map, d_map, &target)
}

fn substitute_terms(
    a: &GradedExpr,
    map: &[GradedExpr],
    d_map: &[GradedExpr],
    target: &Arc<ChartSpec>,
) -> Result<GradedExpr, ExprError> {
    let n = a.chart().dim();
    let mut out = GradedExpr::zero(target);
    for (mono, c) in a.terms() {
        let mut term = GradedExpr::constant(target, c.clone());
        for (atom, e) in &mono.atoms {
            let factor = match atom {
                Atom::Func(f, t) => {
                    let u = GradedExpr::from_terms(a.chart().clone(), t.clone());
                    apply_func(*f, &substitute_terms(&u, map, d_map, target)?)?
                }
                Atom::Group(t) => {
                    let u = GradedExpr::from_terms(a.chart().clone(), t.clone());
                    substitute_terms(&u, map, d_map, target)?
                }
            };
            term = &term * &factor.pow(*e)?;
        }
        for i in 0..n {
            if mono.powers[i] != 0 {
                term = &term * &map[i].pow(mono.powers[i])?;
            }
        }
        for i in 0..n {
            if mono.diffs[i] != 0 {
                term = &term * &d_map[i].pow(mono.diffs[i] as i32)?;
            }
            if term.is_zero() {
                break;
            }
        }
        out = &out + &term;
    }
    Ok(out)
}
