//! Shared inputs for the benchmarks.

use std::sync::Arc;

use funklib::harmonics::synthesize;
use funklib::{GridFunction, HarmonicSpectrum, SphereGrid};

/// An even test function with every degree up to `bandlimit` present.
pub fn even_function(n_lat: usize, bandlimit: usize) -> GridFunction {
    let grid = Arc::new(SphereGrid::new(n_lat).expect("valid grid"));
    let mut s = HarmonicSpectrum::zeros(bandlimit);
    for l in (0..=bandlimit).step_by(2) {
        for m in -(l as i64)..=l as i64 {
            s.set(l, m, 1.0 / (1.0 + (l * l) as f64 + m.unsigned_abs() as f64));
        }
    }
    synthesize(&s, grid)
}
