//! Convex bodies given by their support function `H` on S².
//!
//! Width `B(ω) = H(ω) + H(−ω)`. The circumference `U(ω)` of the projection onto
//! `ω⊥` is computed two ways: as half the great-circle integral of `B`, and from
//! the planar support function `h(φ)` of the projection as `∫ (h + h'') dφ`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{FunkError, Result};
use crate::harmonics::{HarmonicSpectrum, SphericalField};
use crate::sphere::{great_circle_nodes, rotation_taking_north_to, GreatCircle, Rotation, SphereGrid, UnitVector3};
use crate::transform::SphereFunction;

/// Orientations scanned by the convexity certificate.
pub const CERTIFICATE_ORIENTATIONS: usize = 64;
/// Angles per orientation in the convexity certificate.
pub const CERTIFICATE_ANGLES: usize = 256;
/// Relative agreement required between `∫(h + h'')` and `∫h`.
const SECTION_AGREEMENT: f64 = 1e-9;

/// Which body to build in [`make_body`].
#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    Ball(f64),
    Ellipsoid(f64, f64, f64),
    Harmonic(HarmonicSpectrum),
}

/// A convex body containing the origin, represented by its support function.
#[derive(Debug, Clone)]
pub enum SupportBody {
    Ball {
        radius: f64,
    },
    /// Semiaxes along e₁, e₂, e₃.
    Ellipsoid {
        axes: [f64; 3],
    },
    Harmonic {
        field: SphericalField,
    },
}

impl SupportBody {
    /// `H(ω)`.
    pub fn support(&self, w: UnitVector3) -> f64 {
        match self {
            SupportBody::Ball { radius } => *radius,
            SupportBody::Ellipsoid { axes: [a, b, c] } => {
                ((a * w.x).powi(2) + (b * w.y).powi(2) + (c * w.z).powi(2)).sqrt()
            }
            SupportBody::Harmonic { field } => field.eval(w),
        }
    }

    /// The body `λK`, support function `λH`.
    pub fn scaled(&self, lambda: f64) -> SupportBody {
        match self {
            SupportBody::Ball { radius } => SupportBody::Ball { radius: lambda * radius },
            SupportBody::Ellipsoid { axes } => SupportBody::Ellipsoid { axes: axes.map(|a| lambda * a) },
            SupportBody::Harmonic { field } => {
                SupportBody::Harmonic { field: SphericalField::new(&field.spectrum().scale_degrees(|_| lambda)) }
            }
        }
    }
}

impl SphereFunction for SupportBody {
    fn value_at(&self, p: UnitVector3) -> f64 {
        self.support(p)
    }
}

/// Direction-indexed values (widths or circumferences).
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionTable {
    pub directions: Vec<UnitVector3>,
    pub values: Vec<f64>,
}

impl DirectionTable {
    pub fn new(directions: Vec<UnitVector3>, values: Vec<f64>) -> Result<Self> {
        if directions.len() != values.len() {
            return Err(FunkError::ShapeMismatch { expected: directions.len(), got: values.len() });
        }
        Ok(DirectionTable { directions, values })
    }

    pub fn tabulate(directions: &[UnitVector3], f: impl Fn(UnitVector3) -> f64 + Sync) -> Self {
        let values = directions.par_iter().map(|&w| f(w)).collect();
        DirectionTable { directions: directions.to_vec(), values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn spread(&self) -> f64 {
        self.max() - self.min()
    }
}

/// `B(ω) = H(ω) + H(−ω)`.
pub fn width(body: &SupportBody, w: UnitVector3) -> f64 {
    body.support(w) + body.support(-w)
}

/// `U(ω) = ½ ∫_{S² ∩ ω⊥} B`, trapezoidal with `m` nodes.
pub fn circumference_funk(body: &SupportBody, w: UnitVector3, m: usize) -> f64 {
    0.5 * great_circle_nodes(&GreatCircle::new(w), m).iter().map(|(p, wt)| wt * width(body, *p)).sum::<f64>()
}

/// First and second derivatives of periodic samples on `[0, 2π)`.
fn spectral_derivatives(samples: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = samples.len();
    let coeffs = forward_fft(samples);
    let mut planner = FftPlanner::<f64>::new();
    let inverse = planner.plan_fft_inverse(m);
    let mut d1: Vec<Complex<f64>> = Vec::with_capacity(m);
    let mut d2: Vec<Complex<f64>> = Vec::with_capacity(m);
    for (j, c) in coeffs.iter().enumerate() {
        let k = wavenumber(j, m);
        // the Nyquist mode has no well-defined odd derivative
        let ik = if 2 * j == m { 0.0 } else { k };
        d1.push(c * Complex::new(0.0, ik));
        d2.push(c * -(k * k));
    }
    inverse.process(&mut d1);
    inverse.process(&mut d2);
    let scale = 1.0 / m as f64;
    (d1.iter().map(|c| c.re * scale).collect(), d2.iter().map(|c| c.re * scale).collect())
}

fn forward_fft(samples: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn wavenumber(j: usize, m: usize) -> f64 {
    if 2 * j <= m {
        j as f64
    } else {
        j as f64 - m as f64
    }
}

/// The planar support function of the projection onto `ω⊥`, in the frame
/// where `ω` is e₃: `h(φ) = H(r (cos φ, sin φ, 0))`.
#[derive(Debug, Clone)]
pub struct Section {
    pub pole: UnitVector3,
    pub rotation: Rotation,
    pub phi: Vec<f64>,
    pub h: Vec<f64>,
    pub dh: Vec<f64>,
    pub d2h: Vec<f64>,
    coeffs: Vec<Complex<f64>>,
}

impl Section {
    pub fn new(body: &SupportBody, w: UnitVector3, m: usize) -> Result<Self> {
        Self::with_rotation(body, rotation_taking_north_to(w), m)
    }

    fn with_rotation(body: &SupportBody, rotation: Rotation, m: usize) -> Result<Self> {
        if m < 8 {
            return Err(FunkError::out_of_range("m", m as f64, ">= 8"));
        }
        let phi: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
        let h: Vec<f64> =
            phi.iter().map(|&p| body.support(rotation.apply(UnitVector3::new(p.cos(), p.sin(), 0.0)))).collect();
        let (dh, d2h) = spectral_derivatives(&h);
        Ok(Section { pole: rotation.apply(UnitVector3::E3), rotation, coeffs: forward_fft(&h), phi, h, dh, d2h })
    }

    /// `h + h''` at the sample angles: the radius of curvature of the projection.
    pub fn curvature_radius(&self) -> impl Iterator<Item = f64> + '_ {
        self.h.iter().zip(&self.d2h).map(|(a, b)| a + b)
    }

    /// Smallest `h + h''` and the angle where it occurs.
    pub fn min_curvature_radius(&self) -> (f64, f64) {
        self.curvature_radius().zip(&self.phi).map(|(v, &p)| (v, p)).fold((f64::INFINITY, 0.0), |a, b| {
            if b.0 < a.0 {
                b
            } else {
                a
            }
        })
    }

    /// `(h, h', h'')` at any angle from the trigonometric interpolant.
    pub fn eval(&self, phi: f64) -> (f64, f64, f64) {
        let m = self.coeffs.len();
        let (mut h, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            let k = wavenumber(j, m);
            if 2 * j == m {
                // real Nyquist term c cos(kφ)
                h += c.re * (k * phi).cos();
                d1 -= k * c.re * (k * phi).sin();
                d2 -= k * k * c.re * (k * phi).cos();
                continue;
            }
            let e = c * Complex::from_polar(1.0, k * phi);
            h += e.re;
            d1 -= k * e.im;
            d2 -= k * k * e.re;
        }
        let s = 1.0 / m as f64;
        (h * s, d1 * s, d2 * s)
    }

    /// Trapezoidal `∫(h + h'') dφ` and `∫h dφ`.
    pub fn integrals(&self) -> (f64, f64) {
        let w = 2.0 * PI / self.h.len() as f64;
        let full = w * self.curvature_radius().sum::<f64>();
        let simplified = w * self.h.iter().sum::<f64>();
        (full, simplified)
    }

    fn convexity(&self) -> Result<()> {
        let (value, phi) = self.min_curvature_radius();
        if !(value > 0.0) {
            let p = self.pole;
            return Err(FunkError::Convexity { phi, px: p.x, py: p.y, pz: p.z, value });
        }
        Ok(())
    }
}

/// `U(ω) = ∫₀^{2π} (h + h'') dφ` on the section orthogonal to `ω`.
///
/// Fails if `h + h''` is not positive on the section, or if the result disagrees
/// with `∫h dφ`.
pub fn circumference_direct(body: &SupportBody, w: UnitVector3, m: usize) -> Result<f64> {
    let s = Section::new(body, w, m)?;
    s.convexity()?;
    let (full, simplified) = s.integrals();
    if (full - simplified).abs() > SECTION_AGREEMENT * simplified.abs() {
        return Err(FunkError::FormulaMismatch { integrand_form: full, support_form: simplified });
    }
    Ok(full)
}

/// Point of the projection's boundary with outer normal `(cos φ, sin φ)`, in the rotated frame.
pub fn shadow_boundary(section: &Section, phi: f64) -> (f64, f64) {
    let (h, dh, _) = section.eval(phi);
    let (s, c) = phi.sin_cos();
    (h * c - dh * s, h * s + dh * c)
}

/// Curvature `1/(h + h'')` of the projection's boundary.
pub fn curvature(section: &Section, phi: f64) -> f64 {
    let (h, _, d2h) = section.eval(phi);
    1.0 / (h + d2h)
}

/// Result of [`minkowski_check`].
#[derive(Debug, Clone)]
pub struct MinkowskiReport {
    pub constant_width: bool,
    pub constant_circumference: bool,
    pub spread_b: f64,
    pub spread_u: f64,
    pub widths: DirectionTable,
    pub circumferences: DirectionTable,
}

/// The quasi-uniform direction set used for constant-ness checks: the nodes of a grid.
pub fn check_directions(n_lat: usize) -> Result<Vec<UnitVector3>> {
    Ok(SphereGrid::new(n_lat)?.nodes)
}

/// Evaluates `B` and `U` over `directions`; a table is constant when
/// `max − min ≤ tol · mean`.
pub fn minkowski_check(body: &SupportBody, directions: &[UnitVector3], tol: f64, m: usize) -> MinkowskiReport {
    let widths = DirectionTable::tabulate(directions, |w| width(body, w));
    let circumferences = DirectionTable::tabulate(directions, |w| circumference_funk(body, w, m));
    let constant = |t: &DirectionTable| t.spread() <= tol * t.mean().abs();
    MinkowskiReport {
        constant_width: constant(&widths),
        constant_circumference: constant(&circumferences),
        spread_b: widths.spread(),
        spread_u: circumferences.spread(),
        widths,
        circumferences,
    }
}

/// `n` nearly evenly spread points (golden-angle spiral).
pub fn fibonacci_directions(n: usize) -> Vec<UnitVector3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * i as f64;
            UnitVector3::new(r * a.cos(), r * a.sin(), z)
        })
        .collect()
}

/// Validates and builds a body: `H > 0` on a grid, and `h + h'' > 0` on
/// [`CERTIFICATE_ORIENTATIONS`] sections × [`CERTIFICATE_ANGLES`] angles.
pub fn make_body(kind: BodyKind) -> Result<SupportBody> {
    let body = match kind {
        BodyKind::Ball(radius) => SupportBody::Ball { radius },
        BodyKind::Ellipsoid(a, b, c) => {
            if !(a > 0.0 && b > 0.0 && c > 0.0) {
                return Err(FunkError::Degenerate("ellipsoid semiaxes must be positive"));
            }
            SupportBody::Ellipsoid { axes: [a, b, c] }
        }
        BodyKind::Harmonic(s) => SupportBody::Harmonic { field: SphericalField::new(&s) },
    };
    positivity_certificate(&body)?;
    convexity_certificate(&body)?;
    Ok(body)
}

fn positivity_certificate(body: &SupportBody) -> Result<()> {
    let grid = Arc::new(SphereGrid::new(32)?);
    for &p in &grid.nodes {
        let v = body.support(p);
        if !(v > 0.0) {
            return Err(FunkError::NonPositiveSupport { x: p.x, y: p.y, z: p.z, value: v });
        }
    }
    Ok(())
}

fn convexity_certificate(body: &SupportBody) -> Result<()> {
    fibonacci_directions(CERTIFICATE_ORIENTATIONS)
        .par_iter()
        .map(|&pole| Section::new(body, pole, CERTIFICATE_ANGLES).and_then(|s| s.convexity()))
        .collect()
}
