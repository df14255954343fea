//! Real spherical harmonics on [`SphereGrid`]s.
//!
//! Convention: `Y_{l,m}` is real and orthonormal on S², built from the fully
//! normalized associated Legendre functions without the Condon–Shortley phase:
//!
//! ```text
//! Y_{l,0}  = p̄_{l,0}(cos θ)
//! Y_{l,m}  = √2 p̄_{l,m}(cos θ) cos(mφ)     m > 0
//! Y_{l,−m} = √2 p̄_{l,m}(cos θ) sin(mφ)     m > 0
//! ```
//!
//! with `p̄_{l,m}` including the factor `√((2l+1)/4π · (l−m)!/(l+m)!)`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FunkError, Result};
use crate::sphere::{GridFunction, SphereGrid, UnitVector3};

/// Coefficients are dropped above the highest degree whose largest coefficient
/// exceeds this fraction of the overall largest coefficient.
const TRUNCATION_RELATIVE: f64 = 1e-14;

/// Real spherical-harmonic coefficients `f_{l,m}` for `0 ≤ l ≤ bandlimit`, `|m| ≤ l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSpectrum {
    pub bandlimit: usize,
    pub coeffs: Vec<f64>,
}

impl HarmonicSpectrum {
    pub fn zeros(bandlimit: usize) -> Self {
        HarmonicSpectrum { bandlimit, coeffs: vec![0.0; (bandlimit + 1) * (bandlimit + 1)] }
    }

    /// Builds a spectrum from `(l, m, value)` triples; the bandlimit is the
    /// largest `l` present (or `min_bandlimit`, if larger).
    pub fn from_terms(terms: &[(usize, i64, f64)], min_bandlimit: usize) -> Result<Self> {
        let bandlimit = terms.iter().map(|t| t.0).max().unwrap_or(0).max(min_bandlimit);
        let mut s = Self::zeros(bandlimit);
        for &(l, m, v) in terms {
            if m.unsigned_abs() as usize > l {
                return Err(FunkError::out_of_range("m", m as f64, "|m| <= l"));
            }
            s.coeffs[Self::index(l, m)] += v;
        }
        Ok(s)
    }

    #[inline]
    pub fn index(l: usize, m: i64) -> usize {
        debug_assert!(m.unsigned_abs() as usize <= l);
        ((l * l + l) as i64 + m) as usize
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        if l > self.bandlimit || m.unsigned_abs() as usize > l {
            0.0
        } else {
            self.coeffs[Self::index(l, m)]
        }
    }

    pub fn set(&mut self, l: usize, m: i64, value: f64) {
        self.coeffs[Self::index(l, m)] = value;
    }

    /// Iterates `(l, m, value)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        (0..=self.bandlimit)
            .flat_map(move |l| (-(l as i64)..=l as i64).map(move |m| (l, m, self.coeffs[Self::index(l, m)])))
    }

    /// Σ f_{l,m}², which equals ∫ f² for the synthesized function.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn degree_max_abs(&self, l: usize) -> f64 {
        (-(l as i64)..=l as i64).map(|m| self.get(l, m).abs()).fold(0.0, f64::max)
    }

    /// Smallest bandlimit that keeps every coefficient above the truncation floor.
    pub fn effective_bandlimit(&self) -> usize {
        let peak = self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        if peak == 0.0 {
            return 0;
        }
        (0..=self.bandlimit).rev().find(|&l| self.degree_max_abs(l) > TRUNCATION_RELATIVE * peak).unwrap_or(0)
    }

    pub fn truncated(&self, bandlimit: usize) -> Self {
        let bandlimit = bandlimit.min(self.bandlimit);
        HarmonicSpectrum { bandlimit, coeffs: self.coeffs[..(bandlimit + 1) * (bandlimit + 1)].to_vec() }
    }

    /// Applies `f_{l,m} ← mult(l) · f_{l,m}`.
    pub fn scale_degrees(&self, mult: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for l in 0..=self.bandlimit {
            let k = mult(l);
            for m in -(l as i64)..=l as i64 {
                out.coeffs[Self::index(l, m)] *= k;
            }
        }
        out
    }
}

/// Recurrence coefficients for the normalized associated Legendre functions up
/// to a fixed degree.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    bandlimit: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    diag: Vec<f64>,
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl LegendreTable {
    pub fn new(bandlimit: usize) -> Self {
        let n = tri(bandlimit, bandlimit) + 1;
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        for m in 0..=bandlimit {
            for l in (m + 2)..=bandlimit {
                let (lf, mf) = (l as f64, m as f64);
                a[tri(l, m)] = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let l1 = lf - 1.0;
                b[tri(l, m)] = ((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt();
            }
        }
        let diag =
            (0..=bandlimit).map(|m| if m == 0 { 1.0 } else { ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() }).collect();
        LegendreTable { bandlimit, a, b, diag }
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    /// Fills `out[tri(l, m)] = p̄_{l,m}(cos θ)` for all `m ≤ l ≤ bandlimit`.
    pub fn fill(&self, cos_t: f64, sin_t: f64, out: &mut Vec<f64>) {
        let lmax = self.bandlimit;
        out.clear();
        out.resize(tri(lmax, lmax) + 1, 0.0);
        let mut pmm = 1.0 / (4.0 * PI).sqrt();
        for m in 0..=lmax {
            if m > 0 {
                pmm *= self.diag[m] * sin_t;
            }
            out[tri(m, m)] = pmm;
            if m < lmax {
                let p1 = ((2 * m + 3) as f64).sqrt() * cos_t * pmm;
                out[tri(m + 1, m)] = p1;
                let (mut prev2, mut prev1) = (pmm, p1);
                for l in (m + 2)..=lmax {
                    let k = tri(l, m);
                    let p = self.a[k] * (cos_t * prev1 - self.b[k] * prev2);
                    out[k] = p;
                    prev2 = prev1;
                    prev1 = p;
                }
            }
        }
    }

    /// Σ_{l,m} s_{l,m} Y_{l,m}(p), without allocating.
    pub fn evaluate(&self, spectrum: &HarmonicSpectrum, p: UnitVector3) -> f64 {
        let lmax = self.bandlimit.min(spectrum.bandlimit);
        let rho = (p.x * p.x + p.y * p.y).sqrt();
        let (cphi, sphi) = if rho > 0.0 { (p.x / rho, p.y / rho) } else { (1.0, 0.0) };
        let cos_t = p.z.clamp(-1.0, 1.0);
        let sin_t = rho.min(1.0);
        let c = &spectrum.coeffs;
        let mut total = 0.0;
        let mut pmm = 1.0 / (4.0 * PI).sqrt();
        // cos(mφ), sin(mφ) by angle addition
        let (mut cm, mut sm) = (1.0, 0.0);
        for m in 0..=lmax {
            if m > 0 {
                pmm *= self.diag[m] * sin_t;
                let next_c = cm * cphi - sm * sphi;
                sm = sm * cphi + cm * sphi;
                cm = next_c;
                if pmm == 0.0 {
                    break;
                }
            }
            let mi = m as i64;
            let (mut acc_c, mut acc_s) = (0.0, 0.0);
            let mut accumulate = |l: usize, p: f64| {
                acc_c += c[HarmonicSpectrum::index(l, mi)] * p;
                if m > 0 {
                    acc_s += c[HarmonicSpectrum::index(l, -mi)] * p;
                }
            };
            accumulate(m, pmm);
            if m < lmax {
                let p1 = ((2 * m + 3) as f64).sqrt() * cos_t * pmm;
                accumulate(m + 1, p1);
                let (mut prev2, mut prev1) = (pmm, p1);
                for l in (m + 2)..=lmax {
                    let k = tri(l, m);
                    let pl = self.a[k] * (cos_t * prev1 - self.b[k] * prev2);
                    accumulate(l, pl);
                    prev2 = prev1;
                    prev1 = pl;
                }
            }
            if m == 0 {
                total += acc_c;
            } else {
                total += std::f64::consts::SQRT_2 * (acc_c * cm + acc_s * sm);
            }
        }
        total
    }
}

/// A spectrum paired with its Legendre table, evaluable at arbitrary points.
///
/// This is how every transform evaluates a grid function off the grid.
#[derive(Debug, Clone)]
pub struct SphericalField {
    spectrum: HarmonicSpectrum,
    table: LegendreTable,
}

impl SphericalField {
    /// Drops trailing degrees below the truncation floor before building the table.
    pub fn new(spectrum: &HarmonicSpectrum) -> Self {
        let spectrum = spectrum.truncated(spectrum.effective_bandlimit());
        let table = LegendreTable::new(spectrum.bandlimit);
        SphericalField { spectrum, table }
    }

    /// Analysis at the grid's full resolution.
    pub fn from_grid(f: &GridFunction) -> Self {
        let l = f.grid.max_bandlimit();
        Self::new(&analyze(f, l).expect("grid bandlimit is always admissible"))
    }

    pub fn spectrum(&self) -> &HarmonicSpectrum {
        &self.spectrum
    }

    pub fn bandlimit(&self) -> usize {
        self.spectrum.bandlimit
    }

    pub fn eval(&self, p: UnitVector3) -> f64 {
        self.table.evaluate(&self.spectrum, p)
    }
}

/// Evaluates a single real harmonic `Y_{l,m}` at `p`.
pub fn real_ylm(l: usize, m: i64, p: UnitVector3) -> f64 {
    let mut s = HarmonicSpectrum::zeros(l);
    s.set(l, m, 1.0);
    LegendreTable::new(l).evaluate(&s, p)
}

/// `Y_{l,m}` sampled on a grid.
pub fn ylm_on_grid(grid: Arc<SphereGrid>, l: usize, m: i64) -> GridFunction {
    let mut s = HarmonicSpectrum::zeros(l);
    s.set(l, m, 1.0);
    synthesize(&s, grid)
}

fn trig_table(grid: &SphereGrid, lmax: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cos_t = Vec::with_capacity(grid.n_lon * (lmax + 1));
    let mut sin_t = Vec::with_capacity(grid.n_lon * (lmax + 1));
    for m in 0..=lmax {
        for k in 0..grid.n_lon {
            // reduce m·k modulo n_lon to keep the angle small
            let ang = 2.0 * PI * ((m * k) % grid.n_lon) as f64 / grid.n_lon as f64;
            let (s, c) = ang.sin_cos();
            cos_t.push(c);
            sin_t.push(s);
        }
    }
    (cos_t, sin_t)
}

/// Coefficients `f_{l,m} = ∫ f Y_{l,m}` by grid quadrature.
pub fn analyze(f: &GridFunction, bandlimit: usize) -> Result<HarmonicSpectrum> {
    let grid = &*f.grid;
    if bandlimit > grid.max_bandlimit() {
        return Err(FunkError::BandlimitTooLarge { bandlimit, max: grid.max_bandlimit() });
    }
    let table = LegendreTable::new(bandlimit);
    let (cos_tab, sin_tab) = trig_table(grid, bandlimit);
    let n_lon = grid.n_lon;
    let lon_w = 2.0 * PI / n_lon as f64;
    let mut out = HarmonicSpectrum::zeros(bandlimit);
    let mut plm = Vec::new();
    let mut a = vec![0.0; bandlimit + 1];
    let mut b = vec![0.0; bandlimit + 1];
    for i in 0..grid.n_lat {
        let row = &f.values[i * n_lon..(i + 1) * n_lon];
        for m in 0..=bandlimit {
            let ct = &cos_tab[m * n_lon..(m + 1) * n_lon];
            let st = &sin_tab[m * n_lon..(m + 1) * n_lon];
            a[m] = row.iter().zip(ct).map(|(v, c)| v * c).sum();
            b[m] = row.iter().zip(st).map(|(v, s)| v * s).sum();
        }
        table.fill(grid.cos_colat[i], grid.sin_colat[i], &mut plm);
        let w = grid.ring_weights[i] * lon_w;
        for l in 0..=bandlimit {
            out.coeffs[HarmonicSpectrum::index(l, 0)] += w * plm[tri(l, 0)] * a[0];
            for m in 1..=l {
                let p = w * std::f64::consts::SQRT_2 * plm[tri(l, m)];
                out.coeffs[HarmonicSpectrum::index(l, m as i64)] += p * a[m];
                out.coeffs[HarmonicSpectrum::index(l, -(m as i64))] += p * b[m];
            }
        }
    }
    Ok(out)
}

/// Pointwise sum `Σ f_{l,m} Y_{l,m}` on every node of `grid`.
pub fn synthesize(s: &HarmonicSpectrum, grid: Arc<SphereGrid>) -> GridFunction {
    let lmax = s.bandlimit;
    let table = LegendreTable::new(lmax);
    let n_lon = grid.n_lon;
    let (cos_tab, sin_tab) = trig_table(&grid, lmax);
    let mut values = vec![0.0; grid.len()];
    let mut plm = Vec::new();
    for i in 0..grid.n_lat {
        table.fill(grid.cos_colat[i], grid.sin_colat[i], &mut plm);
        let row = &mut values[i * n_lon..(i + 1) * n_lon];
        for m in 0..=lmax {
            let (mut am, mut bm) = (0.0, 0.0);
            for l in m..=lmax {
                let p = plm[tri(l, m)];
                am += s.coeffs[HarmonicSpectrum::index(l, m as i64)] * p;
                if m > 0 {
                    bm += s.coeffs[HarmonicSpectrum::index(l, -(m as i64))] * p;
                }
            }
            if m == 0 {
                row.iter_mut().for_each(|v| *v += am);
            } else {
                let ct = &cos_tab[m * n_lon..(m + 1) * n_lon];
                let st = &sin_tab[m * n_lon..(m + 1) * n_lon];
                let (am, bm) = (std::f64::consts::SQRT_2 * am, std::f64::consts::SQRT_2 * bm);
                for ((v, c), sn) in row.iter_mut().zip(ct).zip(st) {
                    *v += am * c + bm * sn;
                }
            }
        }
    }
    GridFunction { grid, values }
}

/// `P_l(0)` by the two-step recurrence `P_l(0) = −P_{l−2}(0) (l−1)/l`.
pub fn legendre_at_zero(l: usize) -> f64 {
    if l % 2 == 1 {
        return 0.0;
    }
    let mut p = 1.0;
    let mut k = 2;
    while k <= l {
        p *= -((k - 1) as f64) / k as f64;
        k += 2;
    }
    p
}

/// Eigenvalue of the great-circle transform on degree-`l` harmonics: `2π P_l(0)`.
pub fn funk_multiplier(l: usize) -> f64 {
    2.0 * PI * legendre_at_zero(l)
}

/// Antipodally even and odd parts, by exact node pairing.
pub fn parity_split(f: &GridFunction) -> (GridFunction, GridFunction) {
    let grid = &f.grid;
    let even: Vec<f64> = (0..f.values.len()).map(|i| 0.5 * (f.values[i] + f.values[grid.antipode(i)])).collect();
    let odd: Vec<f64> = f.values.iter().zip(&even).map(|(v, e)| v - e).collect();
    (GridFunction { grid: Arc::clone(grid), values: even }, GridFunction { grid: Arc::clone(grid), values: odd })
}
