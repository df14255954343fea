//! Reconstruction of an even function from its great-circle transform.
//!
//! Two independent routes:
//!
//! * [`invert_harmonic`]: divide each even-degree coefficient by `2π P_l(0)`.
//! * [`invert_abel`]: for a fixed point `x`, form the generalized dual
//!   `t ↦ (M*_θ M f)(x)` with `t = cos²θ`, which equals `2√π (I^{1/2} f̃_x)(t)`
//!   with `f̃_x(τ) = τ^{−1/2} (M^{√τ} f)(x)`; undo the half-order integral and
//!   let `t → 1`, since `√t f̃_x(t) = (M^{√t} f)(x) → f(x)`.
//!
//! [`verify_identity`] evaluates both sides of that middle relation by separate
//! quadrature chains.

use std::f64::consts::PI;
use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::error::{FunkError, Result};
use crate::fractional::{rl_derivative, rl_integral_at_end, RadialProfile, DEFAULT_NODES};
use crate::harmonics::{analyze, funk_multiplier, synthesize, HarmonicSpectrum, SphericalField};
use crate::sphere::{sphere_area, GridFunction, UnitVector3};
use crate::transform::{
    funk, generalized_dual, spherical_mean, CircleFunction, SphereFunction, EVEN_TOLERANCE, K_AVERAGE_NODES,
};

/// Default relative size of odd-degree content tolerated by the range check.
pub const RANGE_TOLERANCE: f64 = 1e-6;

/// Multipliers below this fraction of `2π` are treated as zero.
const MULTIPLIER_GUARD: f64 = 1e-6;

/// Quadrature sizes for [`verify_identity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityOptions {
    /// Nodes per great circle in the forward transform.
    pub m_circle: usize,
    /// ρ samples in the generalized dual and nodes per latitude circle.
    pub m_average: usize,
    /// Nodes of the τ grid on `(0, cos²θ]`.
    pub n_t: usize,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        IdentityOptions { m_circle: 128, m_average: K_AVERAGE_NODES, n_t: DEFAULT_NODES }
    }
}

fn check_even(f: &GridFunction) -> Result<()> {
    let odd = f.antipodal_asymmetry();
    if odd > EVEN_TOLERANCE * f.max_abs().max(1.0) {
        return Err(FunkError::NotEven { odd_norm: odd });
    }
    Ok(())
}

/// Holds `f` and its transform so that many `(x, θ)` pairs can be checked cheaply.
pub struct IdentityChecker {
    field: SphericalField,
    transformed: SphericalField,
    opts: IdentityOptions,
}

impl IdentityChecker {
    pub fn new(f: &GridFunction, opts: IdentityOptions) -> Result<Self> {
        check_even(f)?;
        let transformed = funk(f, opts.m_circle).field();
        Ok(IdentityChecker { field: SphericalField::from_grid(f), transformed, opts })
    }

    /// `(M*_θ M f)(x)`.
    pub fn lhs(&self, x: UnitVector3, theta_ang: f64) -> Result<f64> {
        generalized_dual(&self.transformed, x, theta_ang, self.opts.m_average)
    }

    /// `2√π (I^{1/2} f̃_x)(cos²θ)`.
    pub fn rhs(&self, x: UnitVector3, theta_ang: f64) -> Result<f64> {
        let t_end = theta_ang.cos().powi(2);
        let profile = mean_profile(&self.field, x, t_end, self.opts.n_t, self.opts.m_average)?;
        Ok(2.0 * PI.sqrt() * rl_integral_at_end(&profile, 0.5)?)
    }

    pub fn evaluate(&self, x: UnitVector3, theta_ang: f64) -> Result<(f64, f64)> {
        check_open_angle(theta_ang)?;
        Ok((self.lhs(x, theta_ang)?, self.rhs(x, theta_ang)?))
    }
}

fn check_open_angle(theta_ang: f64) -> Result<()> {
    if !(theta_ang > 0.0 && theta_ang < PI / 2.0) {
        return Err(FunkError::out_of_range("theta", theta_ang, "(0, pi/2)"));
    }
    Ok(())
}

/// `τ ↦ τ^{−1/2} (M^{√τ} f)(x)` on the uniform grid over `(0, t_end]`.
fn mean_profile(f: &impl SphereFunction, x: UnitVector3, t_end: f64, n: usize, m: usize) -> Result<RadialProfile> {
    let values = (1..=n)
        .map(|i| {
            let tau = t_end * i as f64 / n as f64;
            spherical_mean(f, x, tau.sqrt(), m).map(|v| v / tau.sqrt())
        })
        .collect::<Result<Vec<_>>>()?;
    let origin = spherical_mean(f, x, 0.0, m)?;
    Ok(RadialProfile::new(t_end, values, -0.5)?.with_origin(origin))
}

/// Both sides of `(M*_θ M f)(x) = 2√π (I^{1/2} f̃_x)(cos²θ)`.
pub fn verify_identity(f: &GridFunction, x: UnitVector3, theta_ang: f64) -> Result<(f64, f64)> {
    IdentityChecker::new(f, IdentityOptions::default())?.evaluate(x, theta_ang)
}

/// The identity for `f ≡ 1` on `S^{n−1}`, dimension treated as a parameter.
///
/// The left side is the area of a great `(n−2)`-sphere. The right side is
/// `2π^{(n−2)/2} cos^{3−n}θ (I^{(n−2)/2} τ^{−1/2})(cos²θ)` with the fractional
/// integral done by the product rule.
pub fn verify_identity_constant(n: usize, theta_ang: f64) -> Result<(f64, f64)> {
    if !(3..=6).contains(&n) {
        return Err(FunkError::out_of_range("n", n as f64, "{3, 4, 5, 6}"));
    }
    check_open_angle(theta_ang)?;
    let lhs = sphere_area(n - 2);
    let order = (n as f64 - 2.0) / 2.0;
    let c = theta_ang.cos();
    let profile = RadialProfile::from_fn(c * c, 16, -0.5, |tau| tau.powf(-0.5))?;
    let integral = rl_integral_at_end(&profile, order)?;
    let rhs = 2.0 * PI.powf(order) * c.powi(3 - n as i32) * integral;
    Ok((lhs, rhs))
}

/// `σ_{n−2} = 2π^{(n−1)/2} / Γ((n−1)/2)`, by the gamma function directly.
pub fn great_sphere_area(n: usize) -> f64 {
    let h = (n as f64 - 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Output of [`invert_harmonic`].
#[derive(Debug, Clone)]
pub struct HarmonicInversion {
    pub f: GridFunction,
    pub spectrum: HarmonicSpectrum,
    /// Even degrees dropped by the conditioning guard.
    pub zeroed_degrees: Vec<usize>,
}

/// Coefficients below this are quadrature noise regardless of the data's size.
const ODD_NOISE_FLOOR: f64 = 1e-12;

/// Odd degrees whose largest coefficient exceeds `tol` times the largest coefficient overall.
fn odd_content(s: &HarmonicSpectrum, tol: f64) -> Vec<usize> {
    let scale = (0..=s.bandlimit).map(|l| s.degree_max_abs(l)).fold(0.0, f64::max);
    let limit = (tol * scale).max(ODD_NOISE_FLOOR);
    (1..=s.bandlimit).step_by(2).filter(|&l| s.degree_max_abs(l) > limit).collect()
}

fn checked_spectrum(g: &CircleFunction, bandlimit: usize, range_tol: f64) -> Result<HarmonicSpectrum> {
    let s = analyze(g.values(), bandlimit)?;
    let bad = odd_content(&s, range_tol);
    if !bad.is_empty() {
        return Err(FunkError::RangeCondition { degrees: bad });
    }
    Ok(s)
}

/// The even `f` with `M f = g`, up to degree `bandlimit`.
pub fn invert_harmonic(g: &CircleFunction, bandlimit: usize, range_tol: f64) -> Result<HarmonicInversion> {
    let s = checked_spectrum(g, bandlimit, range_tol)?;
    let mut zeroed = Vec::new();
    let mut out = HarmonicSpectrum::zeros(bandlimit);
    for l in (0..=bandlimit).step_by(2) {
        let lambda = funk_multiplier(l);
        if lambda.abs() < MULTIPLIER_GUARD * 2.0 * PI {
            zeroed.push(l);
            continue;
        }
        for m in -(l as i64)..=l as i64 {
            out.set(l, m, s.get(l, m) / lambda);
        }
    }
    Ok(HarmonicInversion { f: synthesize(&out, Arc::clone(g.grid())), spectrum: out, zeroed_degrees: zeroed })
}

/// Settings for [`invert_abel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelOptions {
    /// Nodes of the uniform t grid on (0, 1].
    pub n_t: usize,
    /// ρ samples per generalized-dual evaluation.
    pub m_average: usize,
    /// Extrapolation offsets are `δ₀ 2^{−k}`, `k < levels`.
    pub delta0: f64,
    pub levels: usize,
    /// Largest accepted change between the last two extrapolated values.
    pub cauchy_tol: f64,
    pub range_tol: f64,
}

impl Default for AbelOptions {
    fn default() -> Self {
        AbelOptions {
            n_t: DEFAULT_NODES,
            m_average: K_AVERAGE_NODES,
            delta0: 1.0 / 16.0,
            levels: 4,
            cauchy_tol: 1e-3,
            range_tol: RANGE_TOLERANCE,
        }
    }
}

/// Richardson extrapolation of `√t f̃_x(t)` towards `t = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub deltas: Vec<f64>,
    /// `√t f̃_x(t)` at `t = 1 − δ_k`.
    pub samples: Vec<f64>,
    /// Best estimate after each added level.
    pub diagonal: Vec<f64>,
    /// Last two diagonal entries agree within the Cauchy tolerance.
    pub converged: bool,
}

/// Richardson table for samples at offsets halving each level, error in integer powers of δ.
fn richardson(samples: &[f64]) -> Vec<f64> {
    let mut row = samples.to_vec();
    let mut diagonal = vec![row[0]];
    let mut prev_rows: Vec<Vec<f64>> = vec![vec![row[0]]];
    for k in 1..samples.len() {
        row = vec![samples[k]];
        for j in 1..=k {
            let factor = 2f64.powi(j as i32) - 1.0;
            let v = row[j - 1] + (row[j - 1] - prev_rows[k - 1][j - 1]) / factor;
            row.push(v);
        }
        diagonal.push(row[k]);
        prev_rows.push(row.clone());
    }
    diagonal
}

/// Every stage of the Abel-route reconstruction at one point.
#[derive(Debug, Clone)]
pub struct AbelReconstructionReport {
    pub point: UnitVector3,
    pub t_nodes: Vec<f64>,
    /// `(2√π)^{−1} (M*_θ g)(x)` at `θ = arccos √t`.
    pub lhs_profile: RadialProfile,
    /// `f̃_x = D^{1/2}` of the above.
    pub rhs_profile: RadialProfile,
    pub recovered_value: f64,
    pub extrapolation: Extrapolation,
}

/// Prepared data for Abel-route reconstructions at many points.
pub struct AbelInverter {
    field: SphericalField,
    opts: AbelOptions,
}

impl AbelInverter {
    /// Checks the range condition on `g` once.
    pub fn new(g: &CircleFunction, opts: AbelOptions) -> Result<Self> {
        if opts.n_t < 8 || opts.levels == 0 || !(opts.delta0 > 0.0 && opts.delta0 < 0.5) {
            return Err(FunkError::Degenerate("n_t >= 8, levels >= 1 and delta0 in (0, 1/2) required"));
        }
        let s = checked_spectrum(g, g.grid().max_bandlimit(), opts.range_tol)?;
        Ok(AbelInverter { field: SphericalField::new(&s), opts })
    }

    pub fn reconstruct(&self, x: UnitVector3) -> Result<AbelReconstructionReport> {
        let o = &self.opts;
        let scale = 1.0 / (2.0 * PI.sqrt());
        let values = (1..=o.n_t)
            .map(|i| {
                let t = i as f64 / o.n_t as f64;
                generalized_dual(&self.field, x, t.sqrt().acos(), o.m_average).map(|v| scale * v)
            })
            .collect::<Result<Vec<_>>>()?;
        let origin = scale * generalized_dual(&self.field, x, PI / 2.0, o.m_average)?;
        let lhs = RadialProfile::new(1.0, values, 0.0)?.with_origin(origin);
        let rhs = rl_derivative(&lhs, 0.5)?;

        let deltas: Vec<f64> = (0..o.levels).map(|k| o.delta0 / 2f64.powi(k as i32)).collect();
        let samples: Vec<f64> = deltas
            .iter()
            .map(|d| {
                let t = 1.0 - d;
                t.sqrt() * sample(&rhs, t)
            })
            .collect();
        let diagonal = richardson(&samples);
        let value = *diagonal.last().expect("at least one level");
        let converged = match diagonal.len() {
            1 => true,
            n => (diagonal[n - 1] - diagonal[n - 2]).abs() <= o.cauchy_tol * value.abs().max(1.0),
        };
        Ok(AbelReconstructionReport {
            point: x,
            t_nodes: lhs.t_nodes.clone(),
            lhs_profile: lhs,
            rhs_profile: rhs,
            recovered_value: value,
            extrapolation: Extrapolation { deltas, samples, diagonal, converged },
        })
    }
}

/// Node value when `t` is (numerically) a node, cubic interpolation otherwise.
fn sample(p: &RadialProfile, t: f64) -> f64 {
    let pos = t / p.step();
    let idx = pos.round();
    if (pos - idx).abs() < 1e-9 && idx >= 1.0 {
        p.values[idx as usize - 1]
    } else {
        p.value_at(t)
    }
}

/// Recover `f(x)` from `g = M f` by the fractional-calculus route.
pub fn invert_abel(g: &CircleFunction, x: UnitVector3, opts: AbelOptions) -> Result<AbelReconstructionReport> {
    AbelInverter::new(g, opts)?.reconstruct(x)
}

/// `f(x)` from the harmonic route, for comparison with [`invert_abel`].
pub fn harmonic_value_at(inv: &HarmonicInversion, x: UnitVector3) -> f64 {
    SphericalField::new(&inv.spectrum).eval(x)
}
