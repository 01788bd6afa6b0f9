//! One function per manifest command.

use std::fmt::Display;
use std::path::PathBuf;
use std::sync::Arc;

use graded_darboux::cartan::{exterior_d, ChartMap, VectorField};
use graded_darboux::darboux::{
    homog_solve_pde, linear_darboux, log_primitive, one_form_darboux, poincare_primitive, straighten_commuting,
    verify_normal_form, GridOptions, NormalFormReport, NormalFormSpec, Variant,
};
use graded_darboux::grexpr::{equal, ChartSpec, EqualPolicy, EqualityMode, GradedExpr};
use graded_darboux::homogeneity::{
    cotangent_lift, degree_of, distribution_homogeneous, involutive_check, tangent_lift, verify_weight_chart,
    weight_field_of_chart, Distribution, SpanOptions, Tensor, WeightVectorField,
};
use graded_darboux::pfaffian::{
    characteristic_class, darboux_class_oracle, liouville, presymplectic_check, reeb, FormKind, SampleOptions,
};
use serde_json::Value;

use crate::manifest::{Task, Workspace};
use crate::report::{Status, TaskReport};

pub enum TaskError {
    /// The manifest is wrong (exit code 2).
    Config(String),
    /// The computation failed; recorded in the report.
    Failed(String),
}

type Res<T> = Result<T, TaskError>;

fn failed<E: Display>(e: E) -> TaskError {
    TaskError::Failed(e.to_string())
}

fn mode_str(m: EqualityMode) -> String {
    m.to_string()
}

fn combine(a: &str, b: EqualityMode) -> String {
    if a == "randomized" || b == EqualityMode::Randomized {
        "randomized".into()
    } else {
        a.into()
    }
}

pub struct Context<'a> {
    pub ws: &'a Workspace,
    pub policy: EqualPolicy,
    pub samples: usize,
    pub base_dir: PathBuf,
}

struct Args<'a> {
    cmd: &'a str,
    map: &'a std::collections::BTreeMap<String, Value>,
}

impl Args<'_> {
    fn config(&self, msg: impl Display) -> TaskError {
        TaskError::Config(format!("{}: {msg}", self.cmd))
    }

    fn opt_str(&self, key: &str) -> Res<Option<&str>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(self.config(format!("argument '{key}' must be a string, got {v}"))),
        }
    }

    fn str(&self, key: &str) -> Res<&str> {
        self.opt_str(key)?.ok_or_else(|| self.config(format!("missing argument '{key}'")))
    }

    fn opt_usize(&self, key: &str) -> Res<Option<usize>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v.as_u64().map(|n| Some(n as usize)).ok_or_else(|| self.config(format!("argument '{key}' must be a nonnegative integer"))),
        }
    }

    fn opt_f64(&self, key: &str) -> Res<Option<f64>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| self.config(format!("argument '{key}' must be a number"))),
        }
    }

    fn opt_bool(&self, key: &str) -> Res<bool> {
        match self.map.get(key) {
            None => Ok(false),
            Some(Value::Bool(b)) => Ok(*b),
            Some(_) => Err(self.config(format!("argument '{key}' must be a boolean"))),
        }
    }

    fn list<T>(&self, key: &str, f: impl Fn(&Value) -> Option<T>) -> Res<Option<Vec<T>>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| f(v).ok_or_else(|| self.config(format!("bad entry {v} in '{key}'"))))
                .collect::<Res<Vec<T>>>()
                .map(Some),
            Some(v) => Err(self.config(format!("argument '{key}' must be a list, got {v}"))),
        }
    }

    fn strings(&self, key: &str) -> Res<Option<Vec<String>>> {
        self.list(key, |v| v.as_str().map(str::to_string))
    }

    fn point(&self, key: &str, dim: usize) -> Res<Vec<f64>> {
        match self.list(key, Value::as_f64)? {
            None => Ok(vec![0.0; dim]),
            Some(p) if p.len() == dim => Ok(p),
            Some(p) if p.len() == 1 => Ok(vec![p[0]; dim]),
            Some(p) => Err(self.config(format!("'{key}' has {} entries, chart has {dim} coordinates", p.len()))),
        }
    }
}

impl Context<'_> {
    fn form(&self, a: &Args, name: &str) -> Res<GradedExpr> {
        self.ws.forms.get(name).cloned().ok_or_else(|| a.config(format!("unknown form '{name}'")))
    }

    fn field(&self, a: &Args, name: &str) -> Res<VectorField> {
        self.ws.fields.get(name).cloned().ok_or_else(|| a.config(format!("unknown field '{name}'")))
    }

    fn map(&self, a: &Args, name: &str) -> Res<ChartMap> {
        self.ws.maps.get(name).cloned().ok_or_else(|| a.config(format!("unknown map '{name}'")))
    }

    fn chart(&self, a: &Args, name: &str) -> Res<Arc<ChartSpec>> {
        self.ws.charts.get(name).cloned().ok_or_else(|| a.config(format!("unknown chart '{name}'")))
    }

    /// The field named by `nabla`, else the weight field of `chart`.
    fn nabla(&self, a: &Args, chart: &Arc<ChartSpec>) -> Res<WeightVectorField> {
        match a.opt_str("nabla")? {
            None => Ok(weight_field_of_chart(chart)),
            Some(name) => {
                let f = self.field(a, name)?;
                if f.chart() != chart {
                    return Err(a.config(format!("field '{name}' lives on another chart")));
                }
                WeightVectorField::new(f).map_err(|e| a.config(e))
            }
        }
    }

    fn sample_options(&self) -> SampleOptions {
        SampleOptions { samples: self.samples, seed: self.policy.seed, tol: self.policy.tol, points: Vec::new() }
    }

    fn compare_fields(&self, a: &VectorField, b: &VectorField) -> (bool, EqualityMode) {
        let mut mode = EqualityMode::Exact;
        let mut ok = a.parity() == b.parity() || a.is_zero() || b.is_zero();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            let r = equal(x, y, &self.policy);
            ok &= r.equal;
            if r.mode == EqualityMode::Randomized {
                mode = EqualityMode::Randomized;
            }
        }
        (ok, mode)
    }

    fn expect_field(&self, a: &Args, rep: &mut TaskReport, found: &VectorField) -> Res<()> {
        if let Some(exp) = a.strings("expect")? {
            let exprs = exp
                .iter()
                .map(|s| graded_darboux::grexpr::parse_expr(s, found.chart()).map_err(|e| a.config(e)))
                .collect::<Res<Vec<_>>>()?;
            let expected = VectorField::from_exprs(found.chart(), exprs).map_err(|e| a.config(e))?;
            let (ok, mode) = self.compare_fields(found, &expected);
            rep.mode = mode_str(mode);
            rep.require(ok);
        }
        Ok(())
    }
}

/// Records a printed expression, failing the task unless the text re-parses
/// to an equal expression.
fn output_expr(rep: &mut TaskReport, key: &str, e: &GradedExpr) {
    let printed = e.to_string();
    let back = graded_darboux::grexpr::parse_expr(&printed, e.chart());
    let ok = back.is_ok_and(|b| equal(&b, e, &EqualPolicy::default().with_seed(rep.seed)).equal);
    if !ok {
        rep.require(false);
        rep.error = Some(format!("printed {key} does not re-parse to an equal expression"));
    }
    rep.output(key, printed);
}

fn output_field(rep: &mut TaskReport, key: &str, x: &VectorField) {
    for (i, c) in x.coeffs().iter().enumerate() {
        output_expr(rep, &format!("{key}[{}]", x.chart().coord(i).name), c);
    }
}

pub fn label(task: &Task) -> String {
    let of = ["of", "chart", "map", "nabla", "g", "field"]
        .iter()
        .find_map(|k| task.args.get(*k).and_then(Value::as_str))
        .or_else(|| task.args.get("fields").or(task.args.get("generators")).and_then(|v| v.get(0)).and_then(Value::as_str));
    match of {
        Some(name) => format!("{} {name}", task.cmd),
        None => task.cmd.clone(),
    }
}

pub fn run_task(ctx: &Context, task: &Task) -> Result<TaskReport, TaskError> {
    let a = Args { cmd: &task.cmd, map: &task.args };
    let mut rep = TaskReport::new(label(task), ctx.policy.seed);
    let res = match task.cmd.as_str() {
        "check-chart" => check_chart(ctx, &a, &mut rep),
        "degree" => degree(ctx, &a, &mut rep),
        "lift" => lift(ctx, &a, &mut rep),
        "classify" => classify(ctx, &a, &mut rep),
        "presymplectic" => presymplectic(ctx, &a, &mut rep),
        "reeb" => reeb_cmd(ctx, &a, &mut rep),
        "liouville" => liouville_cmd(ctx, &a, &mut rep),
        "poincare" => poincare(ctx, &a, &mut rep),
        "log-primitive" => log_prim(ctx, &a, &mut rep),
        "pde-solve" => pde_solve(ctx, &a, &mut rep),
        "linear-darboux" => linear(ctx, &a, &mut rep),
        "darboux" => darboux(ctx, &a, &mut rep),
        "straighten" => straighten(ctx, &a, &mut rep),
        "verify-darboux" => verify(ctx, &a, &mut rep),
        "dist" => dist(ctx, &a, &mut rep),
        other => Err(TaskError::Config(format!("unknown command '{other}'"))),
    };
    match res {
        Ok(()) => {}
        Err(TaskError::Failed(msg)) => {
            rep.status = Status::Fail;
            rep.error = Some(msg);
        }
        Err(e) => return Err(e),
    }
    if a.opt_bool("expect_fail")? {
        rep.status = match rep.status {
            Status::Pass => Status::Fail,
            _ => Status::Pass,
        };
    }
    Ok(rep)
}

fn check_chart(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let chart = ctx.chart(a, a.str("chart")?)?;
    for c in chart.coords() {
        rep.output(format!("w({})", c.name), format!("({}, {})", c.parity, c.weight));
    }
    if let Some(name) = a.opt_str("nabla")? {
        let f = ctx.field(a, name)?;
        let ok = f.chart() == &chart && verify_weight_chart(&f, &chart);
        rep.require(ok);
        if !ok {
            rep.error = Some(format!("'{name}' is not the weight field Σ w x ∂x of the chart"));
        }
    }
    Ok(())
}

fn degree(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let name = a.str("of")?;
    let tensor = match (ctx.ws.forms.get(name), ctx.ws.fields.get(name)) {
        (Some(f), _) => Tensor::Form(f.clone()),
        (None, Some(x)) => Tensor::Field(x.clone()),
        _ => return Err(a.config(format!("unknown form or field '{name}'"))),
    };
    let chart = match &tensor {
        Tensor::Form(f) => f.chart().clone(),
        Tensor::Field(x) => x.chart().clone(),
    };
    let nabla = ctx.nabla(a, &chart)?;
    let r = degree_of(&tensor, &nabla, &ctx.policy).map_err(failed)?;
    rep.mode = mode_str(r.mode);
    rep.degree = r.degree.as_ref().filter(|_| r.homogeneous).map(|d| d.to_string());
    rep.require(r.homogeneous);
    if !r.homogeneous {
        match &r.residual {
            Tensor::Form(f) => output_expr(rep, "residual", f),
            Tensor::Field(x) => output_field(rep, "residual", x),
        }
    }
    if let Some(exp) = a.opt_str("expect")? {
        let norm = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        rep.require(rep.degree.as_deref().map(norm) == Some(norm(exp)));
    }
    Ok(())
}

fn lift(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let nabla = match (a.opt_str("nabla")?, a.opt_str("chart")?) {
        (Some(_), _) => {
            let f = ctx.field(a, a.str("nabla")?)?;
            let c = f.chart().clone();
            ctx.nabla(a, &c)?
        }
        (None, Some(c)) => weight_field_of_chart(&ctx.chart(a, c)?),
        (None, None) => return Err(a.config("needs 'nabla' or 'chart'")),
    };
    let lifted = match a.str("kind")? {
        "tangent" => tangent_lift(&nabla),
        "cotangent" => cotangent_lift(&nabla),
        k => return Err(a.config(format!("kind must be tangent or cotangent, got '{k}'"))),
    }
    .map_err(failed)?;
    output_field(rep, "field", lifted.field());
    for c in lifted.chart().coords() {
        rep.output(format!("w({})", c.name), &c.weight);
    }
    Ok(())
}

fn classify(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let alpha = ctx.form(a, a.str("of")?)?;
    let chart = alpha.chart().clone();
    let r = characteristic_class(&alpha, &ctx.sample_options()).map_err(failed)?;
    rep.mode = mode_str(r.mode);
    rep.class = r.class;
    rep.kind = Some(r.kind.to_string());
    rep.require(r.kind != FormKind::Irregular);
    if r.kind == FormKind::Irregular {
        let first = r.evidence.iter().find(|e| e.class.is_some()).map(|e| e.class);
        rep.witness = r.evidence.iter().find(|e| e.class.is_some() && Some(e.class) != first).map(|e| e.point.clone());
    }
    if chart.odd_dim() == 0 {
        for e in r.evidence.iter().filter(|e| e.class.is_some()) {
            let oracle = darboux_class_oracle(&alpha, &e.point).map_err(failed)?;
            if Some(oracle) != e.class {
                rep.require(false);
                rep.witness = Some(e.point.clone());
                rep.error = Some(format!("wedge-power class {oracle} disagrees"));
                break;
            }
        }
        rep.output("oracle", "agrees with wedge powers");
    }
    let nabla = ctx.nabla(a, &chart)?;
    if let Ok(d) = degree_of(&Tensor::Form(alpha), &nabla, &ctx.policy) {
        rep.degree = d.degree.filter(|_| d.homogeneous).map(|d| d.to_string());
    }
    if let Some(k) = a.opt_str("expect_kind")? {
        rep.require(rep.kind.as_deref() == Some(k));
    }
    if let Some(c) = a.opt_usize("expect_class")? {
        rep.require(rep.class == Some(c));
    }
    Ok(())
}

fn presymplectic(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let omega = ctx.form(a, a.str("of")?)?;
    let r = presymplectic_check(&omega, &ctx.sample_options()).map_err(failed)?;
    rep.mode = "numeric".into();
    rep.require(r.constant);
    if let Some((_, b)) = &r.witness {
        rep.witness = Some(b.clone());
    }
    if let Some((e, o)) = r.rank() {
        rep.output("rank", format!("({e}, {o})"));
        rep.output("corank", omega.chart().dim() - e - o);
    }
    if let Some(exp) = a.list("expect_rank", Value::as_u64)? {
        rep.require(r.rank().map(|(e, o)| vec![e as u64, o as u64]) == Some(exp));
    }
    Ok(())
}

fn reeb_cmd(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let alpha = ctx.form(a, a.str("of")?)?;
    let r = reeb(&alpha, &ctx.policy).map_err(failed)?;
    rep.mode = "randomized".into();
    output_field(rep, "reeb", &r);
    ctx.expect_field(a, rep, &r)
}

fn liouville_cmd(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let alpha = ctx.form(a, a.str("of")?)?;
    let omega = match a.opt_str("omega")? {
        Some(n) => ctx.form(a, n)?,
        None => exterior_d(&alpha),
    };
    let x = liouville(&omega, &alpha, &ctx.policy).map_err(failed)?;
    rep.mode = "randomized".into();
    output_field(rep, "liouville", &x);
    ctx.expect_field(a, rep, &x)?;
    if let Some(name) = a.opt_str("commutes_with")? {
        let y = ctx.field(a, name)?;
        let b = graded_darboux::cartan::lie_bracket(&y, &x).map_err(failed)?;
        let (ok, mode) = ctx.compare_fields(&b, &VectorField::zero(x.chart()));
        output_field(rep, "bracket", &b);
        rep.mode = combine(&rep.mode, mode);
        rep.require(ok);
    }
    Ok(())
}

fn poincare(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let w = ctx.form(a, a.str("of")?)?;
    let chart = w.chart().clone();
    let nabla = ctx.nabla(a, &chart)?;
    let center = a.point("center", chart.dim())?;
    let prim = poincare_primitive(&w, &nabla, &center).map_err(failed)?;
    let check = equal(&exterior_d(&prim), &w, &ctx.policy);
    rep.mode = mode_str(check.mode);
    rep.require(check.equal);
    output_expr(rep, "primitive", &prim);
    if let Ok(d) = degree_of(&Tensor::Form(prim), &nabla, &ctx.policy) {
        rep.degree = d.degree.filter(|_| d.homogeneous).map(|d| d.to_string());
    }
    Ok(())
}

fn log_prim(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let w = ctx.form(a, a.str("of")?)?;
    let nabla = ctx.nabla(a, &w.chart().clone())?;
    let (c, g) = log_primitive(&w, &nabla, &ctx.policy).map_err(failed)?;
    rep.mode = "randomized".into();
    rep.output("c", &c);
    output_expr(rep, "g", &g);
    Ok(())
}

fn pde_solve(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let g = ctx.form(a, a.str("g")?)?;
    let chart = g.chart().clone();
    let var = a.str("var")?;
    let y = chart.index_of(var).ok_or_else(|| a.config(format!("unknown coordinate '{var}'")))?;
    let nabla = ctx.nabla(a, &chart)?;
    let s = homog_solve_pde(&g, y, &nabla, &ctx.policy).map_err(failed)?;
    let check = equal(&graded_darboux::grexpr::partial(&s.f, y), &g, &ctx.policy);
    rep.mode = mode_str(check.mode);
    rep.require(check.equal);
    output_expr(rep, "f", &s.f);
    if let Some(w) = &s.weight {
        rep.output("weight", w);
    }
    if let Some(warn) = &s.warning {
        rep.output("warning", warn);
    }
    Ok(())
}

fn output_map(rep: &mut TaskReport, map: &ChartMap) {
    for (i, img) in map.images().iter().enumerate() {
        let c = map.target().coord(i);
        output_expr(rep, &format!("image {}", c.name), img);
        rep.output(format!("w({})", c.name), &c.weight);
    }
}

fn linear(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let omega = ctx.form(a, a.str("of")?)?;
    let ld = linear_darboux(&omega).map_err(failed)?;
    rep.mode = "numeric".into();
    rep.residual = Some(ld.residual);
    rep.require(ld.residual < 1e-12);
    rep.output("spec", &ld.spec);
    output_map(rep, &ld.map);
    let _ = ctx;
    Ok(())
}

fn apply_normal_form_report(rep: &mut TaskReport, r: &NormalFormReport) {
    rep.mode = mode_str(r.pullback.mode);
    rep.residual = Some(r.pullback.residual);
    rep.witness = r.pullback.witness.clone();
    rep.degree = r.form_degree.as_ref().map(|d| d.to_string());
    rep.require(r.passed);
    for c in &r.coordinates {
        if !c.ok {
            let found = c.found.as_ref().map(|d| d.to_string()).unwrap_or_else(|| "not homogeneous".into());
            rep.output(format!("coordinate {}", c.name), format!("declared weight {}, found {found}", c.declared));
        }
    }
    for (i, issue) in r.weight_issues.iter().enumerate() {
        rep.output(format!("weight issue {i}"), issue);
    }
    if !r.pullback.equal {
        rep.error = Some("canonical form does not pull back to the input".into());
    }
}

fn spec_from_args(a: &Args, variant: Variant, target_dim: usize) -> Res<NormalFormSpec> {
    let r = a.opt_usize("r")?.unwrap_or(0);
    let eps: Vec<i8> = a.list("eps", |v| v.as_i64().filter(|e| e.abs() == 1).map(|e| e as i8))?.unwrap_or_default();
    let s = a.opt_usize("s")?.unwrap_or(eps.len());
    let z = usize::from(variant.has_z());
    let k = match a.opt_usize("k")? {
        Some(k) => k,
        None => target_dim.checked_sub(2 * r + s + z).ok_or_else(|| a.config("r and s do not fit the target chart"))?,
    };
    Ok(NormalFormSpec { variant, r, s, eps, k })
}

fn variant_of(a: &Args, s: &str) -> Res<Variant> {
    match s {
        "contact" => Ok(Variant::Contact),
        "contact-log" => Ok(Variant::ContactLog),
        "potential" => Ok(Variant::Potential),
        "presymplectic" => Ok(Variant::Presymplectic),
        _ => Err(a.config(format!("unknown variant '{s}'"))),
    }
}

fn darboux(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let alpha = ctx.form(a, a.str("of")?)?;
    let chart = alpha.chart().clone();
    let nabla = ctx.nabla(a, &chart)?;
    let base = a.point("base", chart.dim())?;
    let (presymp, dspec) = match a.opt_str("map")? {
        Some(name) => {
            let m = ctx.map(a, name)?;
            let spec = spec_from_args(a, Variant::Presymplectic, m.target().dim())?;
            (m, spec)
        }
        None => {
            let ld = linear_darboux(&exterior_d(&alpha)).map_err(failed)?;
            (ld.map, ld.spec)
        }
    };
    let res = one_form_darboux(&alpha, &presymp, &dspec, &nabla, &base, &ctx.policy).map_err(failed)?;
    rep.kind = Some(res.spec.variant.to_string());
    rep.output("spec", &res.spec);
    output_map(rep, &res.map);
    apply_normal_form_report(rep, &res.report);
    Ok(())
}

fn verify(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let alpha = ctx.form(a, a.str("of")?)?;
    let map = ctx.map(a, a.str("map")?)?;
    if map.source() != alpha.chart() {
        return Err(a.config("map source differs from the chart of the form"));
    }
    let nabla = ctx.nabla(a, &alpha.chart().clone())?;
    let variant = variant_of(a, a.str("variant")?)?;
    let spec = spec_from_args(a, variant, map.target().dim())?;
    let r = verify_normal_form(&alpha, &map, &spec, &nabla, &ctx.policy).map_err(failed)?;
    rep.kind = Some(variant.to_string());
    rep.output("spec", &spec);
    for c in &r.coordinates {
        if c.ok {
            rep.output(format!("w({})", c.name), &c.declared);
        }
    }
    apply_normal_form_report(rep, &r);
    Ok(())
}

fn straighten(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let names = match (a.strings("fields")?, a.opt_str("field")?) {
        (Some(v), _) => v,
        (None, Some(f)) => vec![f.to_string()],
        (None, None) => return Err(a.config("needs 'field' or 'fields'")),
    };
    let fields = names.iter().map(|n| ctx.field(a, n)).collect::<Res<Vec<_>>>()?;
    let chart = fields[0].chart().clone();
    let base = a.point("base", chart.dim())?;
    let defaults = GridOptions::default();
    let opts = GridOptions {
        step: a.opt_f64("step")?.unwrap_or(defaults.step),
        half_width: a.opt_f64("box")?.unwrap_or(defaults.half_width),
        nodes: a.opt_usize("nodes")?.unwrap_or(defaults.nodes),
        ..defaults
    };
    rep.mode = "numeric".into();
    let grid = straighten_commuting(&fields, &base, &opts).map_err(failed)?;
    rep.residual = Some(grid.max_error);
    rep.require(grid.certified);
    rep.output("nodes", grid.points.len());
    let slice: Vec<&str> = grid.slice.iter().map(|&i| chart.coord(i).name.as_str()).collect();
    rep.output("slice", if slice.is_empty() { "(none)".to_string() } else { slice.join(", ") });
    if let Some(path) = a.opt_str("csv")? {
        let full = ctx.base_dir.join(path);
        std::fs::write(&full, grid.to_csv(&chart)).map_err(|e| failed(format!("writing {}: {e}", full.display())))?;
        rep.output("csv", path);
    }
    Ok(())
}

fn dist(ctx: &Context, a: &Args, rep: &mut TaskReport) -> Res<()> {
    let names = a.strings("generators")?.ok_or_else(|| a.config("missing argument 'generators'"))?;
    let gens = names.iter().map(|n| ctx.field(a, n)).collect::<Res<Vec<_>>>()?;
    let chart = gens.first().map(|g| g.chart().clone()).ok_or_else(|| a.config("empty generator list"))?;
    let base = a.point("base", chart.dim())?;
    let d = Distribution::new(gens, &base).map_err(failed)?;
    let opts = SpanOptions { samples: ctx.samples, seed: ctx.policy.seed, tol: ctx.policy.tol };
    let r = match a.str("mode")? {
        "homogeneous" => distribution_homogeneous(&d, &ctx.nabla(a, &chart)?, &opts),
        "involutive" => involutive_check(&d, &opts),
        m => return Err(a.config(format!("mode must be homogeneous or involutive, got '{m}'"))),
    }
    .map_err(failed)?;
    rep.mode = mode_str(r.mode);
    rep.witness = r.witness.clone();
    rep.require(r.ok);
    rep.output("rank", d.rank());
    if let Some(i) = r.failed {
        rep.output("leaves span", i);
    }
    Ok(())
}
