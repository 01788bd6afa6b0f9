//! Manifest schema and name resolution.

use std::collections::BTreeMap;
use std::sync::Arc;

use graded_darboux::cartan::{ChartMap, VectorField};
use graded_darboux::grexpr::{parse_expr, ChartSpec, CoordinateDecl, GradedExpr, Parity, Weight};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub charts: BTreeMap<String, ChartDecl>,
    #[serde(default)]
    pub fields: BTreeMap<String, FieldDecl>,
    #[serde(default)]
    pub forms: BTreeMap<String, FormDecl>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapDecl>,
    #[serde(default)]
    pub tasks: Vec<Task>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordDecl {
    pub name: String,
    #[serde(default = "even")]
    pub parity: String,
    #[serde(default)]
    pub weight: Option<Value>,
}

fn even() -> String {
    "even".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDecl {
    pub coords: Vec<CoordDecl>,
    /// One `[lo, hi]` per coordinate, or a single pair for all of them.
    #[serde(default)]
    pub boxes: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDecl {
    pub chart: String,
    /// Coefficients in chart order; omitted for the weight field of the chart.
    #[serde(default)]
    pub coeffs: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDecl {
    pub chart: String,
    pub expr: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDecl {
    pub source: String,
    pub target: String,
    pub images: Vec<String>,
    #[serde(default)]
    pub inverse: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub cmd: String,
    #[serde(default)]
    pub args: BTreeMap<String, Value>,
}

/// A manifest with every name resolved and every expression parsed.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub charts: BTreeMap<String, Arc<ChartSpec>>,
    pub fields: BTreeMap<String, VectorField>,
    pub forms: BTreeMap<String, GradedExpr>,
    pub maps: BTreeMap<String, ChartMap>,
    pub tasks: Vec<Task>,
}

fn weight_of(v: &Option<Value>, what: &str) -> Result<Weight, CliError> {
    match v {
        None => Ok(Weight::zero()),
        Some(Value::Number(n)) => match n.as_i64() {
            Some(i) => Ok(Weight::from_int(i)),
            None => Weight::parse(&n.to_string()).map_err(|e| CliError::Config(format!("{what}: {e}"))),
        },
        Some(Value::String(s)) => Weight::parse(s).map_err(|e| CliError::Config(format!("{what}: {e}"))),
        Some(other) => Err(CliError::Config(format!("{what}: weight must be a number or a string, got {other}"))),
    }
}

fn parity_of(s: &str, what: &str) -> Result<Parity, CliError> {
    match s {
        "even" | "0" => Ok(Parity::Even),
        "odd" | "1" => Ok(Parity::Odd),
        _ => Err(CliError::Config(format!("{what}: parity must be 'even' or 'odd', got '{s}'"))),
    }
}

fn chart<'a>(charts: &'a BTreeMap<String, Arc<ChartSpec>>, name: &str, ctx: &str) -> Result<&'a Arc<ChartSpec>, CliError> {
    charts.get(name).ok_or_else(|| CliError::Config(format!("{ctx}: unknown chart '{name}'")))
}

fn parse_in(text: &str, c: &Arc<ChartSpec>, ctx: &str) -> Result<GradedExpr, CliError> {
    parse_expr(text, c).map_err(|e| CliError::Config(format!("{ctx}: {e} in '{text}'")))
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema { line: e.line(), column: e.column(), msg: e.to_string() })
    }

    pub fn resolve(self) -> Result<Workspace, CliError> {
        let mut charts = BTreeMap::new();
        for (name, decl) in &self.charts {
            let ctx = format!("chart '{name}'");
            let coords = decl
                .coords
                .iter()
                .map(|c| {
                    let what = format!("{ctx}, coordinate '{}'", c.name);
                    Ok(CoordinateDecl::new(c.name.clone(), parity_of(&c.parity, &what)?, weight_of(&c.weight, &what)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let mut spec = ChartSpec::new(coords).map_err(|e| CliError::Config(format!("{ctx}: {e}")))?;
            if let Some(b) = &decl.boxes {
                let boxes: Vec<(f64, f64)> = match b.len() {
                    1 => vec![(b[0][0], b[0][1]); spec.dim()],
                    _ => b.iter().map(|p| (p[0], p[1])).collect(),
                };
                spec = spec.with_boxes(boxes).map_err(|e| CliError::Config(format!("{ctx}: {e}")))?;
            }
            charts.insert(name.clone(), spec);
        }
        let mut fields = BTreeMap::new();
        for (name, decl) in &self.fields {
            let ctx = format!("field '{name}'");
            let c = chart(&charts, &decl.chart, &ctx)?;
            let field = match &decl.coeffs {
                None => graded_darboux::homogeneity::weight_field_of_chart(c).field().clone(),
                Some(cs) => {
                    let exprs = cs.iter().map(|s| parse_in(s, c, &ctx)).collect::<Result<Vec<_>, _>>()?;
                    VectorField::from_exprs(c, exprs).map_err(|e| CliError::Config(format!("{ctx}: {e}")))?
                }
            };
            fields.insert(name.clone(), field);
        }
        let mut forms = BTreeMap::new();
        for (name, decl) in &self.forms {
            let ctx = format!("form '{name}'");
            let c = chart(&charts, &decl.chart, &ctx)?;
            forms.insert(name.clone(), parse_in(&decl.expr, c, &ctx)?);
        }
        let mut maps = BTreeMap::new();
        for (name, decl) in &self.maps {
            let ctx = format!("map '{name}'");
            let s = chart(&charts, &decl.source, &ctx)?;
            let t = chart(&charts, &decl.target, &ctx)?;
            let images = decl.images.iter().map(|e| parse_in(e, s, &ctx)).collect::<Result<Vec<_>, _>>()?;
            let inverse = match &decl.inverse {
                Some(inv) => Some(inv.iter().map(|e| parse_in(e, t, &ctx)).collect::<Result<Vec<_>, _>>()?),
                None => None,
            };
            let map = ChartMap::new(s, t, images, inverse).map_err(|e| CliError::Config(format!("{ctx}: {e}")))?;
            maps.insert(name.clone(), map);
        }
        Ok(Workspace { charts, fields, forms, maps, tasks: self.tasks })
    }
}
