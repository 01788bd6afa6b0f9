//! Printer whose output re-parses to the same canonical expression.

use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::chart::ChartSpec;
use super::coeff::Coeff;
use super::expr::{Atom, GradedExpr, Monomial, Terms};

fn write_terms(out: &mut String, chart: &ChartSpec, terms: &Terms) {
    if terms.is_empty() {
        out.push('0');
        return;
    }
    for (k, (mono, c)) in terms.iter().enumerate() {
        let negative = c.is_negative();
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        write_term(out, chart, mono, &c.abs());
    }
}

fn write_atom(out: &mut String, chart: &ChartSpec, atom: &Atom) {
    match atom {
        Atom::Func(f, t) => {
            out.push_str(f.name());
            out.push('(');
            write_terms(out, chart, t);
            out.push(')');
        }
        Atom::Group(t) => {
            out.push('(');
            write_terms(out, chart, t);
            out.push(')');
        }
    }
}

fn write_power(out: &mut String, k: u32) {
    if k != 1 {
        let _ = write!(out, "^{k}");
    }
}

fn write_term(out: &mut String, chart: &ChartSpec, mono: &Monomial, c: &Coeff) {
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    match c {
        Coeff::Exact(r) => {
            if !r.numer().is_one() {
                num.push(r.numer().abs().to_string());
            }
            if !r.denom().is_one() {
                den.push(r.denom().to_string());
            }
        }
        Coeff::Float(x) => {
            if *x != 1.0 {
                num.push(format!("{x}"));
            }
        }
    }
    for (atom, e) in &mono.atoms {
        let mut s = String::new();
        write_atom(&mut s, chart, atom);
        write_power(&mut s, e.unsigned_abs());
        if *e > 0 {
            num.push(s);
        } else {
            den.push(s);
        }
    }
    for (i, &p) in mono.powers.iter().enumerate() {
        if p == 0 {
            continue;
        }
        let mut s = chart.coord(i).name.clone();
        write_power(&mut s, p.unsigned_abs());
        if p > 0 {
            num.push(s);
        } else {
            den.push(s);
        }
    }
    for (i, &b) in mono.diffs.iter().enumerate() {
        if b == 0 {
            continue;
        }
        let mut s = format!("d({})", chart.coord(i).name);
        write_power(&mut s, b);
        num.push(s);
    }
    if num.is_empty() {
        num.push("1".into());
    }
    out.push_str(&num.join("*"));
    for d in den {
        out.push('/');
        out.push_str(&d);
    }
}

impl fmt::Display for GradedExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_terms(&mut s, self.chart(), self.terms());
        f.write_str(&s)
    }
}
