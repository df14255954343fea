//! Function, body and list specifications given on the command line, and the
//! JSON file formats they can refer to.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use funklib::convex::BodyKind;
use funklib::harmonics::{analyze, synthesize};
use funklib::{GridFunction, HarmonicSpectrum, SphereGrid, UnitVector3};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// `{"n_lat", "n_lon", "values"}` with values latitude-major; extra metadata is
/// written by the tool and ignored on input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFile {
    pub n_lat: usize,
    pub n_lon: usize,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

impl GridFile {
    pub fn from_grid_function(f: &GridFunction, metadata: serde_json::Value) -> Self {
        GridFile { n_lat: f.grid.n_lat, n_lon: f.grid.n_lon, values: f.values.clone(), metadata: Some(metadata) }
    }

    fn into_grid_function(self) -> CliResult<GridFunction> {
        let grid = Arc::new(SphereGrid::with_lon(self.n_lat, self.n_lon).map_err(|e| CliError::parse(e.to_string()))?);
        GridFunction::new(grid, self.values).map_err(|e| CliError::parse(e.to_string()))
    }
}

/// One `{"l", "m", "value"}` entry of a spectrum file.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub l: usize,
    pub m: i64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    /// `(l, m, coefficient)` triples; `const:v` is `(0, 0, v √(4π))`.
    Terms(Vec<(usize, i64, f64)>),
    File(PathBuf),
}

enum Loaded {
    Grid(GridFunction),
    Spectrum(HarmonicSpectrum),
}

impl FunctionSpec {
    /// `const:<v>`, `ylm:<l>,<m>`, each optionally prefixed by `<c>*`, joined
    /// with `+`; or `@file.json`.
    pub fn parse(s: &str) -> CliResult<Self> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix('@') {
            return Ok(FunctionSpec::File(PathBuf::from(path)));
        }
        let terms = s.split('+').map(parse_term).collect::<CliResult<Vec<_>>>()?;
        Ok(FunctionSpec::Terms(terms))
    }

    fn load(&self) -> CliResult<Loaded> {
        match self {
            FunctionSpec::Terms(t) => Ok(Loaded::Spectrum(spectrum_from_terms(t)?)),
            FunctionSpec::File(path) => load_file(path),
        }
    }

    /// Samples on `grid`, except that grid files keep their own grid.
    pub fn to_grid_function(&self, grid: &Arc<SphereGrid>) -> CliResult<GridFunction> {
        match self.load()? {
            Loaded::Grid(f) => Ok(f),
            Loaded::Spectrum(s) => {
                if s.bandlimit > grid.max_bandlimit() {
                    return Err(CliError::Precondition(format!(
                        "degree {} cannot be represented on a grid with n_lat = {}",
                        s.bandlimit, grid.n_lat
                    )));
                }
                Ok(synthesize(&s, Arc::clone(grid)))
            }
        }
    }

    pub fn to_spectrum(&self) -> CliResult<HarmonicSpectrum> {
        match self.load()? {
            Loaded::Spectrum(s) => Ok(s),
            Loaded::Grid(f) => Ok(analyze(&f, f.grid.max_bandlimit())?),
        }
    }
}

fn spectrum_from_terms(terms: &[(usize, i64, f64)]) -> CliResult<HarmonicSpectrum> {
    HarmonicSpectrum::from_terms(terms, 0).map_err(|e| CliError::parse(e.to_string()))
}

fn parse_term(term: &str) -> CliResult<(usize, i64, f64)> {
    let term = term.trim();
    let (coef, body) = match term.split_once('*') {
        Some((c, rest)) => (parse_f64(c)?, rest.trim()),
        None => (1.0, term),
    };
    if let Some(v) = body.strip_prefix("const:") {
        return Ok((0, 0, coef * parse_f64(v)? * (4.0 * PI).sqrt()));
    }
    if let Some(args) = body.strip_prefix("ylm:") {
        let (l, m) =
            args.split_once(',').ok_or_else(|| CliError::parse(format!("expected ylm:<l>,<m>, got '{body}'")))?;
        let l: usize = l.trim().parse().map_err(|_| CliError::parse(format!("bad degree in '{body}'")))?;
        let m: i64 = m.trim().parse().map_err(|_| CliError::parse(format!("bad order in '{body}'")))?;
        if m.unsigned_abs() as usize > l {
            return Err(CliError::parse(format!("order |m| must not exceed l in '{body}'")));
        }
        return Ok((l, m, coef));
    }
    Err(CliError::parse(format!("unknown function term '{term}'")))
}

fn load_file(path: &Path) -> CliResult<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let context = |e: serde_json::Error| CliError::parse(format!("{}: {e}", path.display()));
    if value.is_array() {
        let entries: Vec<SpectrumEntry> = serde_json::from_value(value).map_err(context)?;
        let terms: Vec<_> = entries.iter().map(|e| (e.l, e.m, e.value)).collect();
        Ok(Loaded::Spectrum(spectrum_from_terms(&terms)?))
    } else {
        let file: GridFile = serde_json::from_value(value).map_err(context)?;
        Ok(Loaded::Grid(file.into_grid_function()?))
    }
}

/// `ball:<R>`, `ellipsoid:<a>,<b>,<c>` or `harmonic:<function spec>`.
pub fn parse_body(s: &str) -> CliResult<BodyKind> {
    let s = s.trim();
    if let Some(r) = s.strip_prefix("ball:") {
        return Ok(BodyKind::Ball(parse_f64(r)?));
    }
    if let Some(axes) = s.strip_prefix("ellipsoid:") {
        let v = parse_list(axes)?;
        if v.len() != 3 {
            return Err(CliError::parse(format!("ellipsoid needs three semiaxes, got '{axes}'")));
        }
        return Ok(BodyKind::Ellipsoid(v[0], v[1], v[2]));
    }
    if let Some(spec) = s.strip_prefix("harmonic:") {
        return Ok(BodyKind::Harmonic(FunctionSpec::parse(spec)?.to_spectrum()?));
    }
    Err(CliError::parse(format!("unknown body '{s}'")))
}

pub fn parse_f64(s: &str) -> CliResult<f64> {
    let v: f64 = s.trim().parse().map_err(|_| CliError::parse(format!("'{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::parse(format!("'{s}' is not finite")));
    }
    Ok(v)
}

pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

pub fn parse_point(s: &str) -> CliResult<UnitVector3> {
    let v = parse_list(s)?;
    if v.len() != 3 {
        return Err(CliError::parse(format!("expected x,y,z, got '{s}'")));
    }
    UnitVector3::try_new(v[0], v[1], v[2]).map_err(|e| CliError::parse(format!("'{s}': {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_specs() {
        let FunctionSpec::Terms(t) = FunctionSpec::parse("const:2 + 0.5*ylm:4,-2").unwrap() else { panic!() };
        assert_eq!(t.len(), 2);
        assert!((t[0].2 - 2.0 * (4.0 * PI).sqrt()).abs() < 1e-14);
        assert_eq!((t[1].0, t[1].1, t[1].2), (4, -2, 0.5));
        assert_eq!(FunctionSpec::parse("@in.json").unwrap(), FunctionSpec::File(PathBuf::from("in.json")));
        assert!(FunctionSpec::parse("ylm:2,3").is_err());
        assert!(FunctionSpec::parse("sin:1").is_err());
        assert!(FunctionSpec::parse("x*const:1").is_err());
    }

    #[test]
    fn bodies_and_points() {
        assert_eq!(parse_body("ball:1.5").unwrap(), BodyKind::Ball(1.5));
        assert_eq!(parse_body("ellipsoid:1,1,2").unwrap(), BodyKind::Ellipsoid(1.0, 1.0, 2.0));
        assert!(parse_body("ellipsoid:1,2").is_err());
        let BodyKind::Harmonic(s) = parse_body("harmonic:const:1+0.05*ylm:3,0").unwrap() else { panic!() };
        assert_eq!(s.bandlimit, 3);
        assert_eq!(parse_point("0,0,2").unwrap(), UnitVector3::E3);
        assert!(parse_point("0,0,0").is_err());
        assert!(parse_point("1,2").is_err());
    }
}
