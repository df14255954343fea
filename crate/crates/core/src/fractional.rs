//! Riemann–Liouville fractional integrals and derivatives on a uniform grid.
//!
//! ```text
//! (I^α ψ)(t) = 1/Γ(α) ∫_0^t ψ(τ) (t − τ)^{α−1} dτ,      D^α = d/dt ∘ I^{1−α}
//! ```
//!
//! Profiles carry a left-endpoint exponent γ: the rule treats `ψ(τ) = τ^γ φ(τ)`
//! with φ smooth, interpolates φ piecewise linearly, and integrates the weight
//! `τ^γ (t − τ)^{α−1}` against each hat function exactly. On the first cell
//! `(0, t₁]` φ is interpolated from `φ(0)` when the profile knows that limit,
//! and held at `φ(t₁)` otherwise. Either way every weight is non-negative.

use statrs::function::beta::{beta, beta_reg};
use statrs::function::gamma::gamma;

use crate::error::{FunkError, Result};

/// Default number of nodes on (0, 1].
pub const DEFAULT_NODES: usize = 512;

/// Samples of a function on the uniform grid `t_i = i·T/N`, `i = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub t_nodes: Vec<f64>,
    pub values: Vec<f64>,
    /// Known behaviour `ψ(τ) ~ τ^γ` as τ → 0.
    pub exponent: f64,
    /// `lim τ^{−γ} ψ(τ)` at τ = 0, if known.
    pub origin: Option<f64>,
}

impl RadialProfile {
    pub fn new(t_end: f64, values: Vec<f64>, exponent: f64) -> Result<Self> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(FunkError::out_of_range("t_end", t_end, "(0, inf)"));
        }
        if values.len() < 5 {
            return Err(FunkError::out_of_range("nodes", values.len() as f64, ">= 5"));
        }
        if !(exponent > -1.0) {
            return Err(FunkError::out_of_range("exponent", exponent, "(-1, inf)"));
        }
        let n = values.len();
        let t_nodes = (1..=n).map(|i| t_end * i as f64 / n as f64).collect();
        Ok(RadialProfile { t_nodes, values, exponent, origin: None })
    }

    /// Attaches the limit of `τ^{−γ} ψ(τ)` at the origin.
    pub fn with_origin(mut self, value: f64) -> Self {
        self.origin = Some(value);
        self
    }

    pub fn from_fn(t_end: f64, n: usize, exponent: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (1..=n).map(|i| f(t_end * i as f64 / n as f64)).collect();
        Self::new(t_end, values, exponent)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.t_end() / self.len() as f64
    }

    pub fn t_end(&self) -> f64 {
        *self.t_nodes.last().expect("profiles are never empty")
    }

    /// Cubic Lagrange interpolation on the four nearest nodes.
    pub fn value_at(&self, t: f64) -> f64 {
        let h = self.step();
        let n = self.len();
        let pos = t / h - 1.0; // fractional node index
        let start = (pos.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let mut acc = 0.0;
        for j in start..start + 4 {
            let mut w = 1.0;
            for k in start..start + 4 {
                if k != j {
                    w *= (pos - k as f64) / (j as f64 - k as f64);
                }
            }
            acc += w * self.values[j];
        }
        acc
    }
}

/// Moments `∫_0^x τ^p (t − τ)^{α−1} dτ` of the weight at fixed `t`, for `p = γ` and `γ + 1`.
struct Moments {
    t: f64,
    alpha: f64,
    gamma: f64,
    beta0: f64,
    beta1: f64,
}

impl Moments {
    fn new(t: f64, alpha: f64, gamma: f64) -> Self {
        Moments { t, alpha, gamma, beta0: beta(gamma + 1.0, alpha), beta1: beta(gamma + 2.0, alpha) }
    }

    /// `(∫_0^x τ^γ w, ∫_0^x τ^{γ+1} w)` with `w = (t − τ)^{α−1}`.
    fn cumulative(&self, x: f64) -> (f64, f64) {
        let (t, a, g) = (self.t, self.alpha, self.gamma);
        if x <= 0.0 {
            return (0.0, 0.0);
        }
        if g == 0.0 {
            // elementary: substitute u = t − τ
            let (u0, u1) = (t, t - x);
            let m0 = (u0.powf(a) - u1.powf(a)) / a;
            let m1 = t * m0 - (u0.powf(a + 1.0) - u1.powf(a + 1.0)) / (a + 1.0);
            return (m0, m1);
        }
        let r = (x / t).min(1.0);
        let m0 = t.powf(g + a) * self.beta0 * beta_reg(g + 1.0, a, r);
        let m1 = t.powf(g + 1.0 + a) * self.beta1 * beta_reg(g + 2.0, a, r);
        (m0, m1)
    }
}

/// `Γ(a) / Γ(b)` for `a > 0`, zero when `b` is a pole of Γ.
fn gamma_ratio(a: f64, b: f64) -> f64 {
    if b <= 0.0 && b.fract() == 0.0 {
        0.0
    } else {
        gamma(a) / gamma(b)
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(FunkError::out_of_range("alpha", alpha, "(0, 2]"));
    }
    Ok(())
}

/// `(I^α ψ)(t_i)` for one node index `i` (0-based).
fn integral_at(psi: &RadialProfile, alpha: f64, i: usize, scale: f64) -> f64 {
    let t = psi.t_nodes[i];
    let h = psi.step();
    let g = psi.exponent;
    let phi = |j: usize| psi.values[j] / psi.t_nodes[j].powf(g);
    let mom = Moments::new(t, alpha, g);

    let mut prev = mom.cumulative(psi.t_nodes[0]);
    let mut acc = match psi.origin {
        Some(phi0) => {
            let left = (h * prev.0 - prev.1) / h;
            left.max(0.0) * phi0 + (prev.1 / h).max(0.0) * phi(0)
        }
        None => phi(0) * prev.0,
    };
    for j in 0..i {
        let (a, b) = (psi.t_nodes[j], psi.t_nodes[j + 1]);
        let cur = mom.cumulative(b);
        let (m0, m1) = (cur.0 - prev.0, cur.1 - prev.1);
        let left = (b * m0 - m1) / h;
        let right = (m1 - a * m0) / h;
        acc += left.max(0.0) * phi(j) + right.max(0.0) * phi(j + 1);
        prev = cur;
    }
    acc * scale
}

/// Riemann–Liouville integral of order `alpha ∈ (0, 2]` at every node.
pub fn rl_integral(psi: &RadialProfile, alpha: f64) -> Result<RadialProfile> {
    check_order(alpha)?;
    let scale = 1.0 / gamma(alpha);
    let values = (0..psi.len()).map(|i| integral_at(psi, alpha, i, scale)).collect();
    let g = psi.exponent;
    Ok(RadialProfile {
        t_nodes: psi.t_nodes.clone(),
        values,
        exponent: g + alpha,
        origin: psi.origin.map(|v| v * gamma_ratio(g + 1.0, g + alpha + 1.0)),
    })
}

/// `(I^α ψ)(T)` at the last node only.
pub fn rl_integral_at_end(psi: &RadialProfile, alpha: f64) -> Result<f64> {
    check_order(alpha)?;
    Ok(integral_at(psi, alpha, psi.len() - 1, 1.0 / gamma(alpha)))
}

/// Fourth-order finite-difference derivative on a uniform grid. `origin` is the
/// value at t = 0 when it is known (used as an extra left node).
fn derivative(values: &[f64], h: f64, origin: Option<f64>) -> Vec<f64> {
    let mut v = Vec::with_capacity(values.len() + 1);
    let offset = usize::from(origin.is_some());
    if let Some(o) = origin {
        v.push(o);
    }
    v.extend_from_slice(values);
    let n = v.len();
    let d = |k: usize| -> f64 {
        if k >= 2 && k + 2 < n {
            (v[k - 2] - 8.0 * v[k - 1] + 8.0 * v[k + 1] - v[k + 2]) / (12.0 * h)
        } else if k < 2 {
            // forward 5-point stencil shifted to start at node 0
            let s = k as f64;
            fd_weights(s).iter().enumerate().map(|(j, w)| w * v[j]).sum::<f64>() / h
        } else {
            let base = n - 5;
            let s = (k - base) as f64;
            fd_weights(s).iter().enumerate().map(|(j, w)| w * v[base + j]).sum::<f64>() / h
        }
    };
    (offset..n).map(d).collect()
}

/// Derivative weights at position `s` of the Lagrange interpolant through nodes 0..5.
fn fd_weights(s: f64) -> [f64; 5] {
    let mut w = [0.0; 5];
    for (j, wj) in w.iter_mut().enumerate() {
        let mut denom = 1.0;
        for k in 0..5 {
            if k != j {
                denom *= j as f64 - k as f64;
            }
        }
        // d/ds Π_{k≠j} (s − k)
        let mut sum = 0.0;
        for skip in 0..5 {
            if skip == j {
                continue;
            }
            let mut prod = 1.0;
            for k in 0..5 {
                if k != j && k != skip {
                    prod *= s - k as f64;
                }
            }
            sum += prod;
        }
        *wj = sum / denom;
    }
    w
}

/// Riemann–Liouville derivative of order `alpha ∈ (0, 1)`: `d/dt (I^{1−α} g)`.
pub fn rl_derivative(g: &RadialProfile, alpha: f64) -> Result<RadialProfile> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FunkError::out_of_range("alpha", alpha, "(0, 1)"));
    }
    let integral = rl_integral(g, 1.0 - alpha)?;
    // I^{1−α} g vanishes at the origin whenever its endpoint exponent is positive.
    let origin = (integral.exponent > 0.0).then_some(0.0);
    let values = derivative(&integral.values, g.step(), origin);
    let e = g.exponent;
    Ok(RadialProfile {
        t_nodes: g.t_nodes.clone(),
        values,
        exponent: e - alpha,
        origin: g.origin.map(|v| v * gamma_ratio(e + 1.0, e + 1.0 - alpha)),
    })
}
