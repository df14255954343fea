//! Geometry of the unit sphere S² ⊂ R³: points, rotations, great circles,
//! and the quadrature rules every transform in this crate is built from.
//!
//! Two kinds of circle rules are provided. Great circles carry the arc-length
//! measure with total mass 2π; latitude circles `{σ : σ·θ = t}` carry the
//! normalized (probability) measure, so a rule over them computes an average.
//! Both are equispaced trapezoidal rules, which are exact for trigonometric
//! polynomials of degree below the node count.

use std::f64::consts::PI;
use std::hash::{Hash, Hasher};
use std::ops::{Mul, Neg};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FunkError, Result};

/// A point of S², also used as a direction ω and as the pole of a great circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitVector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitVector3 {
    pub const E1: UnitVector3 = UnitVector3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const E2: UnitVector3 = UnitVector3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const E3: UnitVector3 = UnitVector3 { x: 0.0, y: 0.0, z: 1.0 };

    /// Normalizes `(x, y, z)` onto the sphere.
    ///
    /// Panics on the zero vector or non-finite input; use [`UnitVector3::try_new`]
    /// for untrusted data.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self::try_new(x, y, z).expect("cannot normalize a zero or non-finite vector")
    }

    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(FunkError::Degenerate("vector cannot be normalized"));
        }
        Ok(UnitVector3 { x: x / norm, y: y / norm, z: z / norm })
    }

    /// Point with colatitude `theta` (from +e₃) and longitude `phi`.
    pub fn from_colat_lon(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        UnitVector3 { x: st * cp, y: st * sp, z: ct }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: UnitVector3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Unnormalized cross product.
    pub fn cross(self, other: UnitVector3) -> [f64; 3] {
        [self.y * other.z - self.z * other.y, self.z * other.x - self.x * other.z, self.x * other.y - self.y * other.x]
    }

    /// Geodesic distance on S², in [0, π].
    pub fn geodesic_distance(self, other: UnitVector3) -> f64 {
        // atan2 form is accurate for both tiny and near-antipodal separations.
        let c = self.cross(other);
        let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        s.atan2(self.dot(other))
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl Neg for UnitVector3 {
    type Output = UnitVector3;

    fn neg(self) -> UnitVector3 {
        UnitVector3 { x: -self.x, y: -self.y, z: -self.z }
    }
}

/// A proper rotation of R³, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] };

    /// Wraps a matrix after checking orthogonality and det = +1 within `1e-12`.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self> {
        let r = Rotation { m };
        if r.orthogonality_defect() > 1e-12 || (r.determinant() - 1.0).abs() > 1e-12 {
            return Err(FunkError::Degenerate("matrix is not a proper rotation"));
        }
        Ok(r)
    }

    /// Rotation by `angle` (counterclockwise) about e₃. These form the stabilizer
    /// K = SO(2) of the north pole.
    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation { m: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]] }
    }

    /// Rotation by `angle` about an arbitrary unit axis (Rodrigues).
    pub fn about_axis(axis: UnitVector3, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let [x, y, z] = axis.to_array();
        Rotation {
            m: [
                [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
                [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
                [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
            ],
        }
    }

    pub fn apply(&self, v: UnitVector3) -> UnitVector3 {
        let [a, b, c] = self.apply_raw(v.to_array());
        UnitVector3 { x: a, y: b, z: c }
    }

    pub fn apply_raw(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.m;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn transpose(&self) -> Rotation {
        let m = &self.m;
        Rotation { m: [[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]] }
    }

    pub fn inverse(&self) -> Rotation {
        self.transpose()
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// max |RᵀR − I| entrywise.
    pub fn orthogonality_defect(&self) -> f64 {
        let p = self.transpose() * *self;
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.m[i][j] - target).abs());
            }
        }
        worst
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        Rotation { m: out }
    }
}

/// The rotation `g_{k,3}(θ)` in the e_k–e₃ plane with matrix
/// `[sin θ, cos θ; −cos θ, sin θ]`, i.e. a clockwise turn by π/2 − θ.
/// It maps e₃ to `x_θ = e_k cos θ + e₃ sin θ`.
pub fn make_rotation_g(k: usize, theta: f64) -> Result<Rotation> {
    if k != 1 && k != 2 {
        return Err(FunkError::InvalidAxis(k));
    }
    if !(0.0..=PI / 2.0).contains(&theta) {
        return Err(FunkError::out_of_range("theta", theta, "[0, pi/2]"));
    }
    let (s, c) = theta.sin_cos();
    let i = k - 1;
    let mut m = Rotation::IDENTITY.m;
    m[i][i] = s;
    m[i][2] = c;
    m[2][i] = -c;
    m[2][2] = s;
    Ok(Rotation { m })
}

/// A rotation `r` with `r·e₃ = target`: the minimal rotation about `e₃ × target`.
/// For `target = −e₃` this is the half-turn about e₁.
pub fn rotation_taking_north_to(target: UnitVector3) -> Rotation {
    let UnitVector3 { x, y, z } = target;
    let s2 = x * x + y * y;
    if s2 == 0.0 {
        return if z > 0.0 {
            Rotation::IDENTITY
        } else {
            Rotation { m: [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]] }
        };
    }
    // 1 + cos(angle), computed without cancellation in the southern hemisphere.
    let one_plus_c = if z >= 0.0 { 1.0 + z } else { s2 / (1.0 - z) };
    let k = 1.0 / one_plus_c;
    // axis v = e₃ × target = (−y, x, 0); R = I + [v]× + k (v vᵀ − |v|² I)
    let (v1, v2) = (-y, x);
    Rotation {
        m: [
            [1.0 + k * (v1 * v1 - s2), k * v1 * v2, v2],
            [k * v1 * v2, 1.0 + k * (v2 * v2 - s2), -v1],
            [-v2, v1, 1.0 - k * s2],
        ],
    }
}

/// A great circle `S² ∩ pole⊥`. Poles `p` and `−p` name the same circle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GreatCircle {
    pub pole: UnitVector3,
}

impl GreatCircle {
    pub fn new(pole: UnitVector3) -> Self {
        GreatCircle { pole }
    }

    /// Representative pole in the upper hemisphere (ties broken by y > 0, then x > 0).
    pub fn canonical_pole(&self) -> UnitVector3 {
        let p = self.pole;
        let flip = if p.z != 0.0 {
            p.z < 0.0
        } else if p.y != 0.0 {
            p.y < 0.0
        } else {
            p.x < 0.0
        };
        if flip {
            -p
        } else {
            p
        }
    }

    /// Orthonormal basis `{u, v}` of `pole⊥` with `u × v = pole`.
    pub fn basis(&self) -> (UnitVector3, UnitVector3) {
        let r = rotation_taking_north_to(self.pole);
        (r.apply(UnitVector3::E1), r.apply(UnitVector3::E2))
    }
}

impl PartialEq for GreatCircle {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_pole() == other.canonical_pole()
    }
}

impl Eq for GreatCircle {}

impl Hash for GreatCircle {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let p = self.canonical_pole();
        // +0.0 and −0.0 compare equal, so hash them identically.
        for c in [p.x, p.y, p.z] {
            let c = if c == 0.0 { 0.0 } else { c };
            c.to_bits().hash(state);
        }
    }
}

/// `m` equispaced nodes on a great circle, each carrying arc-length weight 2π/m.
pub fn great_circle_nodes(circle: &GreatCircle, m: usize) -> Vec<(UnitVector3, f64)> {
    let (u, v) = circle.basis();
    circle_points(u, v, 0.0, 1.0, m, 2.0 * PI / m as f64)
}

/// `m` equispaced nodes on `{σ : σ·theta = t}` with weights 1/m, so the rule
/// computes the average over that circle.
pub fn latitude_circle_nodes(theta: UnitVector3, t: f64, m: usize) -> Result<Vec<(UnitVector3, f64)>> {
    if !(t.abs() < 1.0) {
        return Err(FunkError::out_of_range("t", t, "(-1, 1)"));
    }
    let (u, v) = GreatCircle::new(theta).basis();
    let radius = (1.0 - t * t).sqrt();
    let mut nodes = circle_points(u, v, 0.0, radius, m, 1.0 / m as f64);
    for (p, _) in nodes.iter_mut() {
        p.x += t * theta.x;
        p.y += t * theta.y;
        p.z += t * theta.z;
    }
    Ok(nodes)
}

fn circle_points(
    u: UnitVector3,
    v: UnitVector3,
    phase: f64,
    radius: f64,
    m: usize,
    weight: f64,
) -> Vec<(UnitVector3, f64)> {
    (0..m)
        .map(|j| {
            let t = phase + 2.0 * PI * j as f64 / m as f64;
            let (s, c) = t.sin_cos();
            let (a, b) = (radius * c, radius * s);
            (UnitVector3 { x: a * u.x + b * v.x, y: a * u.y + b * v.y, z: a * u.z + b * v.z }, weight)
        })
        .collect()
}

/// `∫_{S¹} F(η·e) dη = 2 ∫_{−1}^{1} F(τ) (1 − τ²)^{−1/2} dτ`, evaluated with an
/// `m`-point Gauss–Chebyshev rule (first kind).
pub fn zonal_reduction(f: impl Fn(f64) -> f64, m: usize) -> f64 {
    let sum: f64 = (1..=m).map(|j| f(((2 * j - 1) as f64 * PI / (2 * m) as f64).cos())).sum();
    2.0 * PI / m as f64 * sum
}

/// Surface area `σ_d = 2π^{(d+1)/2} / Γ((d+1)/2)` of the unit sphere `S^d ⊂ R^{d+1}`.
pub fn sphere_area(d: usize) -> f64 {
    let half = (d as f64 + 1.0) / 2.0;
    2.0 * PI.powf(half) / statrs::function::gamma::gamma(half)
}

/// Gauss–Legendre nodes (descending, exactly antisymmetric) and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let legendre = |z: f64| -> (f64, f64) {
        let (mut p1, mut p2) = (1.0, 0.0);
        for j in 1..=n {
            let p3 = p2;
            p2 = p1;
            p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
        }
        let dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
        (p1, dp)
    };
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
        } else {
            for _ in 0..100 {
                let (p, dp) = legendre(z);
                let dz = p / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
        }
        let (_, dp) = legendre(z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre in cos(colatitude) × uniform in longitude.
///
/// Nodes are stored latitude-major: index `i * n_lon + k` is colatitude ring `i`
/// (north to south) and longitude `2πk / n_lon`. The rule integrates products
/// of spherical harmonics of degree ≤ `n_lat − 1` exactly when `n_lon ≥ 2 n_lat − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub n_lat: usize,
    pub n_lon: usize,
    /// cos of the colatitude of each ring.
    pub cos_colat: Vec<f64>,
    pub sin_colat: Vec<f64>,
    /// Gauss–Legendre weight of each ring (sums to 2).
    pub ring_weights: Vec<f64>,
    pub lons: Vec<f64>,
    pub nodes: Vec<UnitVector3>,
    pub weights: Vec<f64>,
}

impl SphereGrid {
    pub const DEFAULT_N_LAT: usize = 64;

    /// Grid with the default `n_lon = 2·n_lat`.
    pub fn new(n_lat: usize) -> Result<Self> {
        Self::with_lon(n_lat, 2 * n_lat)
    }

    pub fn with_lon(n_lat: usize, n_lon: usize) -> Result<Self> {
        if n_lat < 2 {
            return Err(FunkError::out_of_range("n_lat", n_lat as f64, ">= 2"));
        }
        if n_lon < 2 || n_lon % 2 != 0 {
            return Err(FunkError::out_of_range("n_lon", n_lon as f64, "even, >= 2"));
        }
        let (cos_colat, ring_weights) = gauss_legendre(n_lat);
        let sin_colat: Vec<f64> = cos_colat.iter().map(|c| (1.0 - c * c).sqrt()).collect();
        let lons: Vec<f64> = (0..n_lon).map(|k| 2.0 * PI * k as f64 / n_lon as f64).collect();
        let lon_weight = 2.0 * PI / n_lon as f64;
        let mut nodes = Vec::with_capacity(n_lat * n_lon);
        let mut weights = Vec::with_capacity(n_lat * n_lon);
        for i in 0..n_lat {
            for &lon in &lons {
                let (s, c) = lon.sin_cos();
                nodes.push(UnitVector3 { x: sin_colat[i] * c, y: sin_colat[i] * s, z: cos_colat[i] });
                weights.push(ring_weights[i] * lon_weight);
            }
        }
        Ok(SphereGrid { n_lat, n_lon, cos_colat, sin_colat, ring_weights, lons, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest degree that analysis on this grid resolves exactly.
    pub fn max_bandlimit(&self) -> usize {
        (self.n_lat - 1).min((self.n_lon - 1) / 2)
    }

    /// Index of the node antipodal to node `idx`.
    pub fn antipode(&self, idx: usize) -> usize {
        let (i, k) = (idx / self.n_lon, idx % self.n_lon);
        (self.n_lat - 1 - i) * self.n_lon + (k + self.n_lon / 2) % self.n_lon
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// Scalar field sampled on the nodes of a [`SphereGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Arc<SphereGrid>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FunkError::ShapeMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: Arc<SphereGrid>, f: impl Fn(UnitVector3) -> f64) -> Self {
        let values = grid.nodes.iter().map(|&p| f(p)).collect();
        GridFunction { grid, values }
    }

    pub fn constant(grid: Arc<SphereGrid>, c: f64) -> Self {
        let values = vec![c; grid.len()];
        GridFunction { grid, values }
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max over nodes of |f(x) − f(−x)| / 2.
    pub fn antipodal_asymmetry(&self) -> f64 {
        (0..self.values.len())
            .map(|i| 0.5 * (self.values[i] - self.values[self.grid.antipode(i)]).abs())
            .fold(0.0, f64::max)
    }

    /// Weighted L² norm, `(∫ f²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.values.iter().zip(&self.grid.weights).map(|(v, w)| v * v * w).sum::<f64>().sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridFunction { grid: Arc::clone(&self.grid), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(FunkError::ShapeMismatch { expected: self.values.len(), got: other.values.len() });
        }
        Ok(GridFunction {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }
}
