//! Great-circle transforms on S².
//!
//! * `M f(ξ)`: integral of `f` over the great circle ξ (arc length, total 2π).
//! * `M* φ(x)`: average of a circle-space function over all great circles
//!   through `x` (probability measure).
//! * `M_θ f(ξ)`, `M*_θ φ(x)`: the same over circles at geodesic distance θ.
//! * `M^t f(θ)`: average of `f` over the latitude circle `σ·θ = t`.
//! * `C^α f(θ) = ∫ f(σ) |θ·σ|^{α−1} dσ`: the (unnormalized) cosine transform.
//!
//! Functions on the space of great circles are stored as antipodally even
//! functions of the pole on the same [`SphereGrid`] ([`CircleFunction`]).
//! Every K-average `∫_K F(ρ·) dρ` over the stabilizer K = SO(2) of e₃ is an
//! equispaced average over `m` rotations about e₃.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{FunkError, Result};
use crate::harmonics::{analyze, synthesize, ylm_on_grid, SphericalField};
use crate::sphere::{
    great_circle_nodes, latitude_circle_nodes, make_rotation_g, rotation_taking_north_to, GreatCircle, GridFunction,
    Rotation, SphereGrid, UnitVector3,
};

/// Default number of ρ samples in a K-average.
pub const K_AVERAGE_NODES: usize = 256;

/// Odd parts above this (relative to `max(1, ‖φ‖∞)`) are rejected for circle-space data.
pub const EVEN_TOLERANCE: f64 = 1e-8;

/// Axis index used for `g_{k,3}(θ)` in the generalized transforms.
const G_AXIS: usize = 1;

/// Anything that can be evaluated at a point of S².
pub trait SphereFunction: Sync {
    fn value_at(&self, p: UnitVector3) -> f64;
}

impl SphereFunction for SphericalField {
    fn value_at(&self, p: UnitVector3) -> f64 {
        self.eval(p)
    }
}

impl<F> SphereFunction for F
where
    F: Fn(UnitVector3) -> f64 + Sync,
{
    fn value_at(&self, p: UnitVector3) -> f64 {
        self(p)
    }
}

/// A function on the set of great circles, stored by pole. Always even.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFunction {
    values: GridFunction,
}

impl CircleFunction {
    /// Accepts `values` if its odd part is within [`EVEN_TOLERANCE`].
    pub fn new(values: GridFunction) -> Result<Self> {
        let scale = values.max_abs().max(1.0);
        let odd = values.antipodal_asymmetry();
        if odd > EVEN_TOLERANCE * scale {
            return Err(FunkError::NotEven { odd_norm: odd });
        }
        Ok(CircleFunction { values })
    }

    pub fn values(&self) -> &GridFunction {
        &self.values
    }

    pub fn into_values(self) -> GridFunction {
        self.values
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.values.grid
    }

    /// Harmonic model of φ as a function of the pole.
    pub fn field(&self) -> SphericalField {
        SphericalField::from_grid(&self.values)
    }
}

/// `∫_ξ f` with the `m`-node trapezoidal rule (arc-length measure).
pub fn great_circle_integral(f: &impl SphereFunction, circle: &GreatCircle, m: usize) -> f64 {
    great_circle_nodes(circle, m).iter().map(|(p, w)| w * f.value_at(*p)).sum()
}

/// The great-circle transform of a grid function, evaluated at every grid pole.
///
/// `f` is evaluated off the grid through its harmonic expansion.
pub fn funk(f: &GridFunction, m_circle: usize) -> CircleFunction {
    let field = SphericalField::from_grid(f);
    funk_field(&field, Arc::clone(&f.grid), m_circle)
}

/// As [`funk`] for any evaluable function, sampled on the poles of `grid`.
pub fn funk_field(f: &impl SphereFunction, grid: Arc<SphereGrid>, m_circle: usize) -> CircleFunction {
    let values: Vec<f64> =
        grid.nodes.par_iter().map(|&p| great_circle_integral(f, &GreatCircle::new(p), m_circle)).collect();
    CircleFunction { values: GridFunction { grid, values } }
}

/// `(M^t f)(θ)`: the average of `f` over `{σ : σ·θ = t}`.
pub fn spherical_mean(f: &impl SphereFunction, theta: UnitVector3, t: f64, m: usize) -> Result<f64> {
    Ok(latitude_circle_nodes(theta, t, m)?.iter().map(|(p, w)| w * f.value_at(*p)).sum())
}

fn check_angle(theta_ang: f64) -> Result<()> {
    if !(0.0..=PI / 2.0).contains(&theta_ang) {
        return Err(FunkError::out_of_range("theta", theta_ang, "[0, pi/2]"));
    }
    Ok(())
}

/// Equispaced average of `F(ρ_j v)` over rotations ρ_j about e₃, then mapped by `outer`.
fn k_average(f: &impl SphereFunction, outer: &Rotation, v: UnitVector3, m: usize) -> f64 {
    let sum: f64 = (0..m)
        .map(|j| {
            let rho = Rotation::about_z(2.0 * PI * j as f64 / m as f64);
            f.value_at(outer.apply(rho.apply(v)))
        })
        .sum();
    sum / m as f64
}

/// `(M_θ f)(ξ) = ∫_K f(r_ξ ρ x_θ) dρ`: average of `f` over the circle at geodesic
/// distance `theta_ang` from ξ on the side of its pole.
pub fn generalized_funk(f: &impl SphereFunction, circle: &GreatCircle, theta_ang: f64, m: usize) -> Result<f64> {
    let r_xi = rotation_taking_north_to(circle.pole);
    generalized_funk_with_section(f, &r_xi, theta_ang, m)
}

/// [`generalized_funk`] with an explicit section `r_ξ` (any rotation with `r_ξ e₃ = pole`).
pub fn generalized_funk_with_section(
    f: &impl SphereFunction,
    r_xi: &Rotation,
    theta_ang: f64,
    m: usize,
) -> Result<f64> {
    check_angle(theta_ang)?;
    let x_theta = make_rotation_g(G_AXIS, theta_ang)?.apply(UnitVector3::E3);
    Ok(k_average(f, r_xi, x_theta, m))
}

/// `(M*_θ φ)(x) = ∫_K φ(r_x ρ g⁻¹(θ) ξ_o) dρ`, with φ given as a function of the pole.
pub fn generalized_dual(phi: &impl SphereFunction, x: UnitVector3, theta_ang: f64, m: usize) -> Result<f64> {
    let r_x = rotation_taking_north_to(x);
    generalized_dual_with_section(phi, &r_x, theta_ang, m)
}

/// [`generalized_dual`] with an explicit section `r_x`.
pub fn generalized_dual_with_section(
    phi: &impl SphereFunction,
    r_x: &Rotation,
    theta_ang: f64,
    m: usize,
) -> Result<f64> {
    check_angle(theta_ang)?;
    // pole of g⁻¹(θ) ξ_o is g⁻¹(θ) e₃
    let pole = make_rotation_g(G_AXIS, theta_ang)?.inverse().apply(UnitVector3::E3);
    Ok(k_average(phi, r_x, pole, m))
}

/// The dual transform `M* φ` on every node of φ's grid.
pub fn dual_funk(phi: &CircleFunction, m: usize) -> GridFunction {
    let field = phi.field();
    let grid = Arc::clone(phi.grid());
    let values =
        grid.nodes.par_iter().map(|&x| generalized_dual(&field, x, 0.0, m).expect("angle 0 is admissible")).collect();
    GridFunction { grid, values }
}

/// Both sides of `∫_K F(ρ z) dρ = (M^{z₃} F)(e₃)`, computed independently.
pub fn k_average_identity_check(f: &impl SphereFunction, z: UnitVector3, m: usize) -> Result<(f64, f64)> {
    let lhs = k_average(f, &Rotation::IDENTITY, z, m);
    let rhs = spherical_mean(f, UnitVector3::E3, z.z, m)?;
    Ok((lhs, rhs))
}

/// Gauss rule for `∫_0^1 t^{α−1} g(t) dt`, built by Golub–Welsch on the Jacobi
/// recurrence with parameters (0, α−1).
#[derive(Debug, Clone)]
pub struct PowerWeightRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PowerWeightRule {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(FunkError::out_of_range("alpha", alpha, "(0, inf)"));
        }
        let (a, b) = (0.0f64, alpha - 1.0);
        let ab = a + b;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let kf = k as f64;
            jac[(k, k)] =
                if k == 0 { (b - a) / (ab + 2.0) } else { (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0)) };
            if k + 1 < n {
                let j = kf + 1.0;
                let c = 2.0 * j + ab;
                let beta = 4.0 * j * (j + a) * (j + b) * (j + ab) / (c * c * (c + 1.0) * (c - 1.0));
                jac[(k, k + 1)] = beta.sqrt();
                jac[(k + 1, k)] = beta.sqrt();
            }
        }
        let eig = SymmetricEigen::new(jac);
        // μ₀ = ∫_{−1}^{1} (1+x)^b dx, then map x ↦ t = (1+x)/2.
        let mu0 = 2f64.powf(b + 1.0) / (b + 1.0);
        let scale = 2f64.powf(-b - 1.0);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                ((1.0 + eig.eigenvalues[i]) / 2.0, scale * mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Ok(PowerWeightRule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, w)| w * g(t)).sum()
    }
}

fn check_cosine_alpha(alpha: f64) -> Result<()> {
    let odd_integer = alpha.fract() == 0.0 && (alpha as i64) % 2 == 1;
    if !(alpha > 0.0) || !alpha.is_finite() || odd_integer {
        return Err(FunkError::out_of_range("alpha", alpha, "(0, inf) minus odd integers"));
    }
    Ok(())
}

/// Legendre polynomial `P_l(t)` by the three-term recurrence.
pub fn legendre(l: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if l == 0 {
        return 1.0;
    }
    for k in 2..=l {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Eigenvalues `c_l(α) = 2π ∫_{−1}^{1} |t|^{α−1} P_l(t) dt` of the unnormalized
/// cosine transform for `l = 0..=bandlimit`, computed with the power-weight rule.
pub fn cosine_multipliers(alpha: f64, bandlimit: usize) -> Result<Vec<f64>> {
    check_cosine_alpha(alpha)?;
    let rule = PowerWeightRule::new(alpha, bandlimit / 2 + 2)?;
    Ok((0..=bandlimit).map(|l| if l % 2 == 1 { 0.0 } else { 4.0 * PI * rule.integrate(|t| legendre(l, t)) }).collect())
}

/// `C^α f(θ) = ∫ f(σ) |θ·σ|^{α−1} dσ` on the grid, applied degree by degree
/// (Funk–Hecke) so the equatorial singularity of the kernel is integrated exactly.
pub fn cosine_transform(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    check_cosine_alpha(alpha)?;
    let lmax = f.grid.max_bandlimit();
    let spectrum = analyze(f, lmax)?;
    let mult = cosine_multipliers(alpha, lmax)?;
    Ok(synthesize(&spectrum.scale_degrees(|l| mult[l]), Arc::clone(&f.grid)))
}

/// Operators whose spectral multipliers can be measured with [`multiplier_measure`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operator {
    Funk { m_circle: usize },
    Cosine { alpha: f64 },
}

/// Applies `op` to `Y_{l,0}` on `grid` and returns the weighted least-squares
/// ratio `⟨op Y, Y⟩ / ⟨Y, Y⟩`.
pub fn multiplier_measure(grid: &Arc<SphereGrid>, op: Operator, l: usize) -> Result<f64> {
    if l % 2 == 1 {
        return Err(FunkError::out_of_range("degree", l as f64, "even"));
    }
    if l > grid.max_bandlimit() {
        return Err(FunkError::BandlimitTooLarge { bandlimit: l, max: grid.max_bandlimit() });
    }
    let y = ylm_on_grid(Arc::clone(grid), l, 0);
    let out = match op {
        Operator::Funk { m_circle } => funk(&y, m_circle).into_values(),
        Operator::Cosine { alpha } => cosine_transform(&y, alpha)?,
    };
    let num: f64 = grid.weights.iter().zip(&out.values).zip(&y.values).map(|((w, o), y)| w * o * y).sum();
    let den: f64 = grid.weights.iter().zip(&y.values).map(|(w, y)| w * y * y).sum();
    if den <= f64::MIN_POSITIVE {
        return Err(FunkError::Degenerate("harmonic has vanishing norm on this grid"));
    }
    Ok(num / den)
}
