//! The optimised regularity filter must agree exactly with a direct,
//! loop-by-loop recomputation of C0 and C1 from the raw scan data.

mod common;

use std::collections::BTreeSet;

use common::{random_scan, RawScan};
use mlsmesh_core::edgefilter::regularity_filter;
use mlsmesh_core::{FilterParams, Sequential};

type P = [f64; 3];

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(v: P) -> Option<P> {
    let n = dot(v, v).sqrt();
    (n > 0.0).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

/// Echo positions per pulse, sorted by range, plus their global indices.
fn positions(raw: &RawScan) -> (Vec<Vec<P>>, Vec<usize>) {
    let mut out = Vec::new();
    let mut first = Vec::new();
    let mut next = 0;
    for (pulse, ranges) in &raw.pulses {
        let mut ranges = ranges.clone();
        ranges.sort_by(f64::total_cmp);
        let (o, d) = (pulse.origin, pulse.direction);
        out.push(ranges.iter().map(|&t| [o.x + d.x * t, o.y + d.y * t, o.z + d.z * t]).collect());
        first.push(next);
        next += ranges.len();
    }
    (out, first)
}

fn brute_force(raw: &RawScan, alpha_m: f64, lambda: f64) -> BTreeSet<(usize, usize)> {
    let (pos, first) = positions(raw);
    let (nl, ns) = (raw.n_lines as isize, raw.n_steps as isize);
    let cell = |s: isize, r: isize| (s >= 0 && s < nl && r >= 0 && r < ns).then(|| (s * ns + r) as usize);
    let mut kept = BTreeSet::new();
    for s in 0..nl {
        for r in 0..ns {
            let pa = cell(s, r).unwrap();
            let beam = raw.pulses[pa].0.direction;
            let beam = [beam.x, beam.y, beam.z];
            // (ds, dr) for the Dtheta, Ds and Dd lattice directions.
            for (ds, dr) in [(0, 1), (1, 0), (1, 1)] {
                let Some(pb) = cell(s + ds, r + dr) else { continue };
                let prev = cell(s - ds, r - dr);
                let next = cell(s + 2 * ds, r + 2 * dr);
                for (i, &a) in pos[pa].iter().enumerate() {
                    for (j, &b) in pos[pb].iter().enumerate() {
                        let Some(e) = unit(sub(b, a)) else { continue };
                        let c0 = dot(e, beam).abs();
                        let keep = if c0 <= alpha_m {
                            true
                        } else {
                            let mut f_prev = 1.0f64;
                            for &q in prev.map_or(&[][..], |p| &pos[p][..]) {
                                if let Some(u) = unit(sub(a, q)) {
                                    f_prev = f_prev.min((1.0 - dot(u, e)).abs());
                                }
                            }
                            let mut f_next = 1.0f64;
                            for &q in next.map_or(&[][..], |p| &pos[p][..]) {
                                if let Some(u) = unit(sub(q, b)) {
                                    f_next = f_next.min((1.0 - dot(e, u)).abs());
                                }
                            }
                            f_prev * f_next < lambda * alpha_m * c0 / (c0 - alpha_m)
                        };
                        if keep {
                            kept.insert((first[pa] + i, first[pb] + j));
                        }
                    }
                }
            }
        }
    }
    kept
}

#[test]
fn regularity_filter_matches_brute_force_on_random_grids() {
    for seed in 0..20 {
        let raw = random_scan(seed, 50, 50);
        let grid = raw.grid();
        for (alpha_m, lambda) in [(0.05, 1e-4), (0.01, 1e-2), (0.5, 0.1)] {
            let params = FilterParams { alpha_m, lambda, ..FilterParams::default() };
            let fast: BTreeSet<(usize, usize)> =
                regularity_filter(&grid, &params, &Sequential).iter().map(|k| (k.a as usize, k.b as usize)).collect();
            let slow = brute_force(&raw, alpha_m, lambda);
            let candidates = grid.candidate_edges().count();
            assert!(!slow.is_empty() && slow.len() < candidates, "degenerate test grid");
            assert_eq!(fast, slow, "seed {seed}, alpha_m {alpha_m}, lambda {lambda}");
        }
    }
}
