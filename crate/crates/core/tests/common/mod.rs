#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use funklib::convex::{make_body, BodyKind};
use funklib::harmonics::synthesize;
use funklib::{GridFunction, HarmonicSpectrum, SphereGrid, SupportBody, UnitVector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the sphere (uniform z, uniform longitude).
pub fn random_unit(rng: &mut impl Rng) -> UnitVector3 {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).sqrt();
    UnitVector3::new(r * phi.cos(), r * phi.sin(), z)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Degrees {
    Even,
    Odd,
    All,
}

impl Degrees {
    fn admits(self, l: usize) -> bool {
        match self {
            Degrees::Even => l % 2 == 0,
            Degrees::Odd => l % 2 == 1,
            Degrees::All => true,
        }
    }
}

/// Coefficients uniform in `[−1, 1]` on the admitted degrees up to `bandlimit`.
pub fn random_spectrum(rng: &mut impl Rng, bandlimit: usize, degrees: Degrees) -> HarmonicSpectrum {
    let mut s = HarmonicSpectrum::zeros(bandlimit);
    for l in (0..=bandlimit).filter(|&l| degrees.admits(l)) {
        for m in -(l as i64)..=l as i64 {
            s.set(l, m, rng.gen_range(-1.0..1.0));
        }
    }
    s
}

pub fn random_function(rng: &mut impl Rng, grid: &Arc<SphereGrid>, bandlimit: usize, degrees: Degrees) -> GridFunction {
    synthesize(&random_spectrum(rng, bandlimit, degrees), Arc::clone(grid))
}

/// `H = 1 + Σ c_{l,m} Y_{l,m}` over `1 ≤ l ≤ 4`, coefficients scaled by `1/l²`
/// so that the body is usually convex. With `odd_only` every body has constant
/// width; otherwise an even-degree term of size at least `1e-2` is forced.
pub fn random_body(rng: &mut impl Rng, odd_only: bool) -> SupportBody {
    loop {
        let mut s = HarmonicSpectrum::zeros(4);
        s.set(0, 0, (4.0 * PI).sqrt());
        let amp: f64 = rng.gen_range(0.01..0.08);
        for l in 1..=4usize {
            if odd_only && l % 2 == 0 {
                continue;
            }
            for m in -(l as i64)..=l as i64 {
                let c: f64 = rng.gen_range(-1.0..1.0);
                s.set(l, m, amp * c / (l * l) as f64);
            }
        }
        if !odd_only {
            let m = rng.gen_range(-2..=2i64);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            s.set(2, m, sign * rng.gen_range(0.01..0.03));
        }
        if let Ok(body) = make_body(BodyKind::Harmonic(s)) {
            return body;
        }
    }
}
