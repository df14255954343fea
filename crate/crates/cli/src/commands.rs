use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use funklib::convex::{circumference_direct, circumference_funk, make_body, minkowski_check, width, DirectionTable};
use funklib::harmonics::{analyze, funk_multiplier, synthesize};
use funklib::inversion::{invert_harmonic, AbelInverter, AbelOptions, IdentityChecker, IdentityOptions};
use funklib::transform::{
    cosine_transform, dual_funk, funk, generalized_funk, multiplier_measure, spherical_mean, CircleFunction, Operator,
};
use funklib::{GreatCircle, GridFunction, SphericalField, UnitVector3};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::input::{parse_body, parse_f64, FunctionSpec};
use crate::output::{num, write_grid_function, write_json, write_table};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Which {
    Funk,
    Dual,
    Mean(f64),
    Gen(f64),
    Cosine(f64),
}

impl FromStr for Which {
    type Err = String;

    /// `funk`, `dual`, `mean:<t>`, `gen:<θ>` or `cosine:<α>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let arg = |v: &str| parse_f64(v).map_err(|e| e.to_string());
        match s.split_once(':') {
            None if s == "funk" => Ok(Which::Funk),
            None if s == "dual" => Ok(Which::Dual),
            Some(("mean", v)) => Ok(Which::Mean(arg(v)?)),
            Some(("gen", v)) => Ok(Which::Gen(arg(v)?)),
            Some(("cosine", v)) => Ok(Which::Cosine(arg(v)?)),
            _ => Err(format!("unknown transform '{s}' (funk, dual, mean:<t>, gen:<theta>, cosine:<alpha>)")),
        }
    }
}

impl Which {
    fn name(self) -> &'static str {
        match self {
            Which::Funk => "funk",
            Which::Dual => "dual",
            Which::Mean(_) => "mean",
            Which::Gen(_) => "gen",
            Which::Cosine(_) => "cosine",
        }
    }

    fn parameter(self) -> Option<f64> {
        match self {
            Which::Funk | Which::Dual => None,
            Which::Mean(v) | Which::Gen(v) | Which::Cosine(v) => Some(v),
        }
    }
}

/// Projects `f` onto degrees `<= bandlimit` when a bandlimit is configured.
fn project(cfg: &RunConfig, f: GridFunction) -> CliResult<GridFunction> {
    match cfg.bandlimit {
        Some(l) if l < f.grid.max_bandlimit() => Ok(synthesize(&analyze(&f, l)?, Arc::clone(&f.grid))),
        _ => Ok(f),
    }
}

fn load_function(cfg: &RunConfig, spec: &FunctionSpec) -> CliResult<GridFunction> {
    project(cfg, spec.to_grid_function(&cfg.grid()?)?)
}

/// Evaluates a per-node map over the grid of `f`.
fn on_nodes(f: &GridFunction, op: impl Fn(UnitVector3) -> funklib::Result<f64> + Sync) -> CliResult<GridFunction> {
    let values = f.grid.nodes.par_iter().map(|&p| op(p)).collect::<funklib::Result<Vec<f64>>>()?;
    Ok(GridFunction::new(Arc::clone(&f.grid), values)?)
}

pub fn transform(cfg: &RunConfig, spec: &FunctionSpec, which: Which) -> CliResult<()> {
    let f = load_function(cfg, spec)?;
    let out = match which {
        Which::Funk => funk(&f, cfg.m_circle).into_values(),
        Which::Dual => dual_funk(&CircleFunction::new(f)?, cfg.m_average),
        Which::Mean(t) => {
            let field = SphericalField::from_grid(&f);
            on_nodes(&f, |p| spherical_mean(&field, p, t, cfg.m_circle))?
        }
        Which::Gen(theta) => {
            let field = SphericalField::from_grid(&f);
            on_nodes(&f, |p| generalized_funk(&field, &GreatCircle::new(p), theta, cfg.m_average))?
        }
        Which::Cosine(alpha) => cosine_transform(&f, alpha)?,
    };
    let meta = json!({
        "transform": which.name(),
        "parameter": which.parameter(),
        "m_circle": cfg.m_circle,
        "m_average": cfg.m_average,
    });
    write_grid_function(cfg, &out, meta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Harmonic,
    Abel,
}

#[derive(Serialize)]
struct AbelJson {
    point: UnitVector3,
    recovered_value: f64,
    converged: bool,
    deltas: Vec<f64>,
    samples: Vec<f64>,
    diagonal: Vec<f64>,
    t_nodes: Vec<f64>,
    lhs_profile: Vec<f64>,
    rhs_profile: Vec<f64>,
}

pub fn invert(cfg: &RunConfig, spec: &FunctionSpec, method: Method, points: &[UnitVector3]) -> CliResult<()> {
    let g = CircleFunction::new(load_function(cfg, spec)?)?;
    match method {
        Method::Harmonic => {
            let l = cfg.bandlimit(g.grid());
            let inv = invert_harmonic(&g, l, cfg.range_tol)?;
            let meta = json!({
                "method": "harmonic",
                "bandlimit": l,
                "zeroed_degrees": inv.zeroed_degrees,
            });
            write_grid_function(cfg, &inv.f, meta)
        }
        Method::Abel => {
            let opts = AbelOptions {
                n_t: cfg.n_t,
                m_average: cfg.m_average,
                range_tol: cfg.range_tol,
                ..AbelOptions::default()
            };
            let inverter = AbelInverter::new(&g, opts)?;
            let reports = points.iter().map(|&x| inverter.reconstruct(x)).collect::<funklib::Result<Vec<_>>>()?;
            if cfg.format == Some(Format::Csv) {
                let rows: Vec<Vec<Value>> = reports
                    .iter()
                    .map(|r| {
                        let p = r.point;
                        vec![
                            json!(p.x),
                            json!(p.y),
                            json!(p.z),
                            json!(r.recovered_value),
                            json!(r.extrapolation.converged),
                        ]
                    })
                    .collect();
                return write_table(cfg, &["x", "y", "z", "recovered_value", "converged"], &rows);
            }
            let out: Vec<AbelJson> = reports
                .into_iter()
                .map(|r| AbelJson {
                    point: r.point,
                    recovered_value: r.recovered_value,
                    converged: r.extrapolation.converged,
                    deltas: r.extrapolation.deltas,
                    samples: r.extrapolation.samples,
                    diagonal: r.extrapolation.diagonal,
                    t_nodes: r.t_nodes,
                    lhs_profile: r.lhs_profile.values,
                    rhs_profile: r.rhs_profile.values,
                })
                .collect();
            write_json(cfg.out.as_deref(), &out)
        }
    }
}

/// Writes the identity table and fails the gate when the largest relative
/// error `|lhs − rhs| / (2π max|f|)` exceeds `tol`.
pub fn verify_identity(
    cfg: &RunConfig,
    spec: &FunctionSpec,
    thetas: &[f64],
    x: UnitVector3,
    tol: f64,
) -> CliResult<()> {
    let f = load_function(cfg, spec)?;
    let opts = IdentityOptions { m_circle: cfg.m_circle, m_average: cfg.m_average, n_t: cfg.n_t };
    let checker = IdentityChecker::new(&f, opts)?;
    let scale = 2.0 * PI * f.max_abs().max(f64::MIN_POSITIVE);
    let mut rows = Vec::with_capacity(thetas.len());
    let mut worst: f64 = 0.0;
    for &theta in thetas {
        let (lhs, rhs) = checker.evaluate(x, theta)?;
        let abs = (lhs - rhs).abs();
        worst = worst.max(abs / scale);
        rows.push(vec![json!(theta), json!(lhs), json!(rhs), json!(abs), json!(abs / scale)]);
    }
    write_table(cfg, &["theta", "lhs", "rhs", "abs_err", "rel_err"], &rows)?;
    if worst > tol {
        return Err(CliError::Gate(format!(
            "identity check failed: max relative error {} exceeds {}",
            num(worst),
            num(tol)
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Report {
    Width,
    Circumference,
    Minkowski,
}

fn table_summary(t: &DirectionTable) -> Value {
    json!({ "min": t.min(), "max": t.max(), "mean": t.mean(), "spread": t.spread() })
}

fn direction_rows(directions: &[UnitVector3], columns: &[&[f64]]) -> Vec<Vec<Value>> {
    directions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut row = vec![json!(p.x), json!(p.y), json!(p.z)];
            row.extend(columns.iter().map(|c| json!(c[i])));
            row
        })
        .collect()
}

pub fn convex(
    cfg: &RunConfig,
    body_spec: &str,
    report: Report,
    direction: Option<UnitVector3>,
    summary_path: Option<&Path>,
) -> CliResult<()> {
    let body = make_body(parse_body(body_spec)?)?;
    let directions = match direction {
        Some(d) => vec![d],
        None => cfg.grid()?.nodes.clone(),
    };
    let m = cfg.m_circle;
    let tol = cfg.constant_tol;
    let constant = |t: &DirectionTable| t.spread() <= tol * t.mean().abs();
    let mut gate = None;
    let summary = match report {
        Report::Width => {
            let b = DirectionTable::tabulate(&directions, |w| width(&body, w));
            write_table(cfg, &["x", "y", "z", "width"], &direction_rows(&directions, &[&b.values]))?;
            json!({ "report": "width", "width": table_summary(&b), "constant_width": constant(&b), "tol": tol })
        }
        Report::Circumference => {
            let u = DirectionTable::tabulate(&directions, |w| circumference_funk(&body, w, m));
            let direct = directions
                .par_iter()
                .map(|&w| circumference_direct(&body, w, m))
                .collect::<funklib::Result<Vec<f64>>>()?;
            let gap = u.values.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            write_table(
                cfg,
                &["x", "y", "z", "circumference_funk", "circumference_direct"],
                &direction_rows(&directions, &[&u.values, &direct]),
            )?;
            json!({
                "report": "circumference",
                "circumference": table_summary(&u),
                "constant_circumference": constant(&u),
                "max_formula_gap": gap,
                "tol": tol,
            })
        }
        Report::Minkowski => {
            let r = minkowski_check(&body, &directions, tol, m);
            write_table(
                cfg,
                &["x", "y", "z", "width", "circumference"],
                &direction_rows(&directions, &[&r.widths.values, &r.circumferences.values]),
            )?;
            if r.constant_width != r.constant_circumference {
                gate = Some(format!(
                    "constant width ({}) and constant circumference ({}) disagree",
                    r.constant_width, r.constant_circumference
                ));
            }
            json!({
                "report": "minkowski",
                "constant_width": r.constant_width,
                "constant_circumference": r.constant_circumference,
                "spread_b": r.spread_b,
                "spread_u": r.spread_u,
                "width": table_summary(&r.widths),
                "circumference": table_summary(&r.circumferences),
                "tol": tol,
            })
        }
    };
    match summary_path {
        Some(p) => write_json(Some(p), &summary)?,
        None => eprintln!("{}", serde_json::to_string_pretty(&summary)?),
    }
    match gate {
        Some(msg) => Err(CliError::Gate(msg)),
        None => Ok(()),
    }
}

pub fn multipliers(cfg: &RunConfig, alphas: &[f64], degrees: &[usize]) -> CliResult<()> {
    if let Some(l) = degrees.iter().find(|&&l| l % 2 == 1) {
        return Err(CliError::Precondition(format!("degree {l} is odd; both operators vanish on odd degrees")));
    }
    let grid = cfg.grid()?;
    let mut rows = Vec::new();
    for &alpha in alphas {
        let c0 = multiplier_measure(&grid, Operator::Cosine { alpha }, 0)?;
        for &l in degrees {
            let cl = multiplier_measure(&grid, Operator::Cosine { alpha }, l)?;
            let funk_ratio = funk_multiplier(l) / funk_multiplier(0);
            rows.push(vec![json!(alpha), json!(l), json!(cl / c0), json!(funk_ratio)]);
        }
    }
    write_table(cfg, &["alpha", "degree", "measured_ratio", "funk_ratio"], &rows)
}
