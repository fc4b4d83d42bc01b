//! Random pulse grids shared by the integration tests.
#![allow(dead_code)]

use mlsmesh_core::grid::{EchoSample, PulseGridBuilder, ScannerMeta};
use mlsmesh_core::{Pulse, PulseGrid, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Raw scan data, kept alongside the grid so that oracles can recompute
/// everything without going through the grid's accessors.
#[derive(Debug, Clone)]
pub struct RawScan {
    pub n_lines: usize,
    pub n_steps: usize,
    /// Row-major pulses with their (unsorted) ranges.
    pub pulses: Vec<(Pulse, Vec<f64>)>,
}

impl RawScan {
    pub fn grid(&self) -> PulseGrid {
        let mut b =
            PulseGridBuilder::new(self.n_lines, self.n_steps, ScannerMeta { pulses_per_line: self.n_steps as f64 });
        for (pulse, ranges) in &self.pulses {
            let samples: Vec<EchoSample> = ranges.iter().map(|&r| EchoSample::new(r)).collect();
            b.push(*pulse, &samples).unwrap();
        }
        b.build().unwrap()
    }
}

/// A sector scanner driving along +x over a piecewise-smooth depth field:
/// blocks at different depths (discontinuities), gentle slopes, range noise,
/// dropouts and occasional extra returns behind the first surface.
pub fn random_scan(seed: u64, n_lines: usize, n_steps: usize) -> RawScan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let block = rng.random_range(4..12usize);
    let n_bx = n_lines / block + 1;
    let n_by = n_steps / block + 1;
    let depths: Vec<f64> = (0..n_bx * n_by).map(|_| rng.random_range(4.0..9.0)).collect();
    let slope = rng.random_range(-0.02..0.02);
    let noise = [0.0, 1e-4, 2e-3][rng.random_range(0..3usize)];
    let delta = rng.random_range(0.002..0.01);
    let mut pulses = Vec::with_capacity(n_lines * n_steps);
    for s in 0..n_lines {
        for r in 0..n_steps {
            let theta = (r as f64 - n_steps as f64 / 2.0) * delta;
            let direction = Vec3::new(0.0, theta.cos(), theta.sin());
            let origin = Vec3::new(s as f64 * 0.02, 0.0, 1.5);
            let base = depths[(s / block) * n_by + r / block] + slope * r as f64;
            let mut ranges = Vec::new();
            let roll: f64 = rng.random();
            if roll > 0.05 {
                ranges.push(base + noise * rng.random::<f64>());
                while ranges.len() < 4 && rng.random::<f64>() < 0.2 {
                    ranges.push(base + rng.random_range(0.05..3.0));
                }
            }
            pulses.push((Pulse { origin, direction, theta, time: (s * n_steps + r) as f64 * 1e-5 }, ranges));
        }
    }
    RawScan { n_lines, n_steps, pulses }
}
