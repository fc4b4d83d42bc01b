//! Synthetic mobile laser scanning.
//!
//! A scanner moves along a piecewise-linear path and fires pulses on a
//! rotating beam. Scanline `s` is one rotation of the beam; rotation step
//! `r` fires at angle `start_angle + r * angular_resolution` and at time
//! `(s + (r * angular_resolution) / 2pi) / lines_per_second`, so the default
//! resolution `2pi / N_p` samples `floor(N_p)` pulses per full turn and drops
//! the fractional one. A coarser grid over a narrow sector is obtained by
//! setting `angular_resolution` explicitly.
//!
//! Opaque primitives stop a beam at the first hit. Scatter clouds are sets of
//! small spheres; each sphere hit yields an echo and the beam continues past
//! it with probability [`SCATTER_TRANSMISSION`].

mod scenes;
pub mod shapes;

pub use scenes::{builtin_scene, two_planes, BUILTIN_SCENES};

use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::exec::Executor;
use crate::geom::Vec3;
use crate::grid::{EchoSample, GridError, Pulse, PulseGrid, PulseGridBuilder, ScannerMeta, MAX_ECHOES};

use shapes::{ray_aabb, ray_aabb_span, ray_cylinder, ray_rect, ray_sphere, ray_tube};

/// Probability that a beam continues past a scatter point it hit.
pub const SCATTER_TRANSMISSION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("unknown scene `{0}`")]
    UnknownScene(alloc::string::String),
    #[error("invalid primitive #{index}: {reason}")]
    Primitive { index: usize, reason: &'static str },
    #[error("invalid trajectory: {0}")]
    Trajectory(&'static str),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// One labelled object of a synthetic scene.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ScenePrimitive {
    /// Rectangle centred at `center`. `u_axis` (projected into the plane)
    /// carries `half_extent[0]`, `normal x u_axis` carries `half_extent[1]`.
    Plane { center: Vec3, normal: Vec3, u_axis: Vec3, half_extent: [f64; 2], label: u32 },
    /// Closed cylinder from `base` to `base + height * axis`.
    Cylinder { base: Vec3, axis: Vec3, radius: f64, height: f64, label: u32 },
    /// Axis-aligned box.
    Box { min: Vec3, max: Vec3, label: u32 },
    /// `count` spheres of `point_radius` uniformly placed in a box.
    Scatter { min: Vec3, max: Vec3, count: usize, point_radius: f64, label: u32 },
    /// Open tube of `radius` around segment `a -> b`.
    Wire { a: Vec3, b: Vec3, radius: f64, label: u32 },
}

impl ScenePrimitive {
    pub fn label(&self) -> u32 {
        match *self {
            ScenePrimitive::Plane { label, .. }
            | ScenePrimitive::Cylinder { label, .. }
            | ScenePrimitive::Box { label, .. }
            | ScenePrimitive::Scatter { label, .. }
            | ScenePrimitive::Wire { label, .. } => label,
        }
    }

    /// Scatter clouds are not surfaces.
    pub fn is_surface(&self) -> bool {
        !matches!(self, ScenePrimitive::Scatter { .. })
    }

    fn validate(&self, index: usize) -> Result<(), SynthError> {
        let bad = |reason| Err(SynthError::Primitive { index, reason });
        let unit = |v: Vec3| (v.norm() - 1.0).abs() <= 1e-6;
        let pos = |x: f64| x > 0.0 && x.is_finite();
        match *self {
            ScenePrimitive::Plane { normal, u_axis, half_extent, .. } => {
                if !unit(normal) {
                    return bad("plane normal must be unit");
                }
                if normal.cross(u_axis).norm() < 1e-9 {
                    return bad("plane u_axis parallel to normal");
                }
                if !half_extent.iter().all(|&h| pos(h)) {
                    return bad("plane extent must be positive");
                }
            }
            ScenePrimitive::Cylinder { axis, radius, height, .. } => {
                if !unit(axis) {
                    return bad("cylinder axis must be unit");
                }
                if !pos(radius) || !pos(height) {
                    return bad("cylinder dimensions must be positive");
                }
            }
            ScenePrimitive::Box { min, max, .. } => {
                if !(max.x > min.x && max.y > min.y && max.z > min.z) {
                    return bad("box must have positive size");
                }
            }
            ScenePrimitive::Scatter { min, max, count, point_radius, .. } => {
                if !(max.x > min.x && max.y > min.y && max.z > min.z) {
                    return bad("scatter box must have positive size");
                }
                if count == 0 || !pos(point_radius) {
                    return bad("scatter needs points of positive radius");
                }
            }
            ScenePrimitive::Wire { a, b, radius, .. } => {
                if a.distance(b) <= 0.0 || !pos(radius) {
                    return bad("wire needs positive length and radius");
                }
            }
        }
        Ok(())
    }
}

/// Scanner motion and sampling.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectorySpec {
    /// Waypoints of the scanner centre (m); the scanner stops at the last one.
    pub path: Vec<Vec3>,
    /// `[time (s), speed (m/s)]` knots, linearly interpolated and held
    /// constant outside their range.
    pub speed: Vec<[f64; 2]>,
    /// Beam rotations (scanlines) per second.
    pub lines_per_second: f64,
    /// Pulses per scanline, `N_p`; `floor(N_p)` steps are kept.
    pub pulses_per_line: f64,
    /// Angle between rotation steps; defaults to `2pi / N_p`.
    #[cfg_attr(feature = "serde", serde(default))]
    pub angular_resolution: Option<f64>,
    /// Beam angle of step 0.
    #[cfg_attr(feature = "serde", serde(default))]
    pub start_angle: f64,
    /// Normal of the rotation plane.
    pub rotation_axis: Vec3,
    /// Beam direction at angle 0; projected into the rotation plane.
    pub zero_direction: Vec3,
    pub n_lines: usize,
    /// Standard deviation of Gaussian range noise (m).
    #[cfg_attr(feature = "serde", serde(default))]
    pub range_noise: f64,
    pub max_range: f64,
}

impl TrajectorySpec {
    pub fn n_steps(&self) -> usize {
        libm::floor(self.pulses_per_line) as usize
    }

    pub fn step_angle(&self) -> f64 {
        self.angular_resolution.unwrap_or(TAU / self.pulses_per_line)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m| Err(SynthError::Trajectory(m));
        if self.path.is_empty() {
            return bad("path needs at least one waypoint");
        }
        if self.speed.is_empty() || self.speed.iter().any(|k| !(k[1] >= 0.0 && k[1].is_finite())) {
            return bad("speed knots must be present and non-negative");
        }
        if self.speed.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return bad("speed knot times must increase");
        }
        if !(self.pulses_per_line > 3.0 && self.pulses_per_line.is_finite()) {
            return bad("pulses_per_line must exceed 3");
        }
        if !(self.lines_per_second > 0.0 && self.lines_per_second.is_finite()) {
            return bad("lines_per_second must be positive");
        }
        if !(self.range_noise >= 0.0 && self.range_noise.is_finite()) {
            return bad("range_noise must be non-negative");
        }
        if !(self.max_range > 0.0 && self.max_range.is_finite()) {
            return bad("max_range must be positive");
        }
        if self.angular_resolution.is_some_and(|a| !(a > 0.0 && a.is_finite())) {
            return bad("angular_resolution must be positive");
        }
        if self.rotation_axis.normalized().is_none() {
            return bad("rotation_axis must be non-zero");
        }
        if self.rotation_axis.cross(self.zero_direction).norm() < 1e-9 {
            return bad("zero_direction must not be parallel to rotation_axis");
        }
        Ok(())
    }

    /// Distance travelled after `t` seconds.
    pub fn distance_at(&self, t: f64) -> f64 {
        let knots = &self.speed;
        let first = knots[0];
        let mut dist = 0.0;
        // constant speed before the first knot
        let head = t.min(first[0]).max(0.0);
        dist += first[1] * head;
        for w in knots.windows(2) {
            let ([t0, v0], [t1, v1]) = (w[0], w[1]);
            if t <= t0 {
                break;
            }
            let lo = t0.max(0.0);
            let hi = t.min(t1);
            if hi > lo {
                let slope = (v1 - v0) / (t1 - t0);
                let va = v0 + slope * (lo - t0);
                let vb = v0 + slope * (hi - t0);
                dist += 0.5 * (va + vb) * (hi - lo);
            }
        }
        let last = knots[knots.len() - 1];
        let tail_start = last[0].max(0.0);
        if t > tail_start {
            dist += last[1] * (t - tail_start);
        }
        dist
    }

    /// Scanner position after travelling `d` meters along the path.
    pub fn position_at_distance(&self, mut d: f64) -> Vec3 {
        for w in self.path.windows(2) {
            let seg = w[1] - w[0];
            let len = seg.norm();
            if d <= len {
                return if len > 0.0 { w[0] + seg * (d / len) } else { w[0] };
            }
            d -= len;
        }
        self.path[self.path.len() - 1]
    }

    /// Orthonormal `(zero, quarter)` basis of the rotation plane.
    fn beam_basis(&self) -> (Vec3, Vec3) {
        let axis = self.rotation_axis.normalized().unwrap_or(Vec3::Z);
        let zero = (self.zero_direction - axis * self.zero_direction.dot(axis))
            .normalized()
            .unwrap_or_else(|| axis.any_orthogonal());
        (zero, axis.cross(zero))
    }

    /// Geometry of pulse `(s, r)`.
    pub fn pulse(&self, s: usize, r: usize) -> Pulse {
        let (zero, quarter) = self.beam_basis();
        let offset = r as f64 * self.step_angle();
        let theta = self.start_angle + offset;
        let time = (s as f64 + offset / TAU) / self.lines_per_second;
        let direction = (zero * libm::cos(theta) + quarter * libm::sin(theta)).normalized().unwrap_or(zero);
        Pulse { origin: self.position_at_distance(self.distance_at(time)), direction, theta, time }
    }
}

/// Uniform grid over the spheres of one scatter cloud.
#[derive(Debug, Clone)]
struct ScatterCloud {
    min: Vec3,
    max: Vec3,
    radius: f64,
    label: u32,
    centers: Vec<Vec3>,
    dims: [usize; 3],
    cell: Vec3,
    cell_offsets: Vec<u32>,
    cell_items: Vec<u32>,
}

impl ScatterCloud {
    fn new(min: Vec3, max: Vec3, count: usize, radius: f64, label: u32, rng: &mut ChaCha8Rng) -> Self {
        let size = max - min;
        let centers: Vec<Vec3> = (0..count)
            .map(|_| {
                Vec3::new(
                    min.x + rng.random::<f64>() * size.x,
                    min.y + rng.random::<f64>() * size.y,
                    min.z + rng.random::<f64>() * size.z,
                )
            })
            .collect();
        // the cell grid covers the box grown by one radius
        let pad = Vec3::new(radius, radius, radius);
        let (min, max) = (min - pad, max + pad);
        let size = max - min;
        // about two spheres per cell, never thinner than a sphere
        let volume = size.x * size.y * size.z;
        let target = libm::cbrt(volume * 2.0 / count as f64).max(2.0 * radius);
        let dim = |extent: f64| ((extent / target) as usize).clamp(1, 512);
        let dims = [dim(size.x), dim(size.y), dim(size.z)];
        let cell = Vec3::new(size.x / dims[0] as f64, size.y / dims[1] as f64, size.z / dims[2] as f64);
        let n_cells = dims[0] * dims[1] * dims[2];

        let span = |c: Vec3| -> [Range<usize>; 3] {
            let r = |lo: f64, o: f64, w: f64, n: usize| {
                let a = (((lo - radius - o) / w).max(0.0) as usize).min(n - 1);
                let b = (((lo + radius - o) / w).max(0.0) as usize).min(n - 1);
                a..b + 1
            };
            [r(c.x, min.x, cell.x, dims[0]), r(c.y, min.y, cell.y, dims[1]), r(c.z, min.z, cell.z, dims[2])]
        };
        let mut counts = alloc::vec![0u32; n_cells + 1];
        for c in &centers {
            let [ix, iy, iz] = span(*c);
            for x in ix {
                for y in iy.clone() {
                    for z in iz.clone() {
                        counts[(x * dims[1] + y) * dims[2] + z + 1] += 1;
                    }
                }
            }
        }
        for i in 0..n_cells {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut items = alloc::vec![0u32; counts[n_cells] as usize];
        for (k, c) in centers.iter().enumerate() {
            let [ix, iy, iz] = span(*c);
            for x in ix {
                for y in iy.clone() {
                    for z in iz.clone() {
                        let cell = (x * dims[1] + y) * dims[2] + z;
                        items[fill[cell] as usize] = k as u32;
                        fill[cell] += 1;
                    }
                }
            }
        }
        ScatterCloud { min, max, radius, label, centers, dims, cell, cell_offsets: counts, cell_items: items }
    }

    /// Sphere entries along the ray before `t_max`, as `(t, sphere)`, sorted.
    fn hits(&self, o: Vec3, d: Vec3, t_max: f64, out: &mut Vec<(f64, u32)>) {
        let start = out.len();
        let Some((t0, t1)) = ray_aabb_span(o, d, self.min, self.max) else {
            return;
        };
        let t_enter = t0.max(0.0);
        let t_exit = t1.min(t_max);
        if t_enter > t_exit {
            return;
        }
        // 3D DDA over cells
        let p = o + d * t_enter;
        let idx = |v: f64, lo: f64, w: f64, n: usize| (((v - lo) / w).max(0.0) as usize).min(n - 1);
        let mut c = [
            idx(p.x, self.min.x, self.cell.x, self.dims[0]),
            idx(p.y, self.min.y, self.cell.y, self.dims[1]),
            idx(p.z, self.min.z, self.cell.z, self.dims[2]),
        ];
        let dir = d.to_array();
        let lo = self.min.to_array();
        let w = self.cell.to_array();
        let mut step = [0isize; 3];
        let mut t_next = [f64::INFINITY; 3];
        let mut t_delta = [f64::INFINITY; 3];
        for k in 0..3 {
            if dir[k] > 0.0 {
                step[k] = 1;
                t_next[k] = (lo[k] + (c[k] + 1) as f64 * w[k] - o.to_array()[k]) / dir[k];
                t_delta[k] = w[k] / dir[k];
            } else if dir[k] < 0.0 {
                step[k] = -1;
                t_next[k] = (lo[k] + c[k] as f64 * w[k] - o.to_array()[k]) / dir[k];
                t_delta[k] = -w[k] / dir[k];
            }
        }
        loop {
            let cell = (c[0] * self.dims[1] + c[1]) * self.dims[2] + c[2];
            let items = &self.cell_items[self.cell_offsets[cell] as usize..self.cell_offsets[cell + 1] as usize];
            for &k in items {
                if let Some(t) = ray_sphere(o, d, self.centers[k as usize], self.radius) {
                    if t < t_max {
                        out.push((t, k));
                    }
                }
            }
            let axis = if t_next[0] <= t_next[1] && t_next[0] <= t_next[2] {
                0
            } else if t_next[1] <= t_next[2] {
                1
            } else {
                2
            };
            if t_next[axis] > t_exit {
                break;
            }
            let n = c[axis] as isize + step[axis];
            if n < 0 || n as usize >= self.dims[axis] {
                break;
            }
            c[axis] = n as usize;
            t_next[axis] += t_delta[axis];
        }
        let found = &mut out[start..];
        found.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        // a sphere spanning several cells is reported once per cell
        let mut seen: Vec<(f64, u32)> = Vec::with_capacity(found.len());
        for h in found.iter() {
            if !seen.iter().any(|s| s.1 == h.1) {
                seen.push(*h);
            }
        }
        out.truncate(start);
        out.extend(seen);
    }
}

#[derive(Debug, Clone)]
enum Opaque {
    Rect { center: Vec3, normal: Vec3, u: Vec3, v: Vec3, half: [f64; 2] },
    Cylinder { base: Vec3, axis: Vec3, radius: f64, height: f64 },
    Box { min: Vec3, max: Vec3 },
    Tube { base: Vec3, axis: Vec3, radius: f64, height: f64 },
}

impl Opaque {
    fn hit(&self, o: Vec3, d: Vec3) -> Option<f64> {
        match *self {
            Opaque::Rect { center, normal, u, v, half } => ray_rect(o, d, center, normal, u, v, half),
            Opaque::Cylinder { base, axis, radius, height } => ray_cylinder(o, d, base, axis, radius, height),
            Opaque::Box { min, max } => ray_aabb(o, d, min, max),
            Opaque::Tube { base, axis, radius, height } => ray_tube(o, d, base, axis, radius, height),
        }
    }
}

/// Scene with scatter clouds instantiated and indexed.
#[derive(Debug, Clone)]
pub struct PreparedScene {
    opaque: Vec<(Opaque, u32)>,
    clouds: Vec<ScatterCloud>,
}

/// RNG stream reserved for instantiating scatter clouds; scanlines use
/// streams `0..n_lines`.
const SCENE_STREAM: u64 = u64::MAX;

impl PreparedScene {
    pub fn new(scene: &[ScenePrimitive], seed: u64) -> Result<Self, SynthError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(SCENE_STREAM);
        let mut opaque = Vec::new();
        let mut clouds = Vec::new();
        for (i, prim) in scene.iter().enumerate() {
            prim.validate(i)?;
            match *prim {
                ScenePrimitive::Plane { center, normal, u_axis, half_extent, label } => {
                    let n = normal.normalized().unwrap();
                    let u = (u_axis - n * u_axis.dot(n)).normalized().unwrap();
                    opaque.push((Opaque::Rect { center, normal: n, u, v: n.cross(u), half: half_extent }, label));
                }
                ScenePrimitive::Cylinder { base, axis, radius, height, label } => {
                    let axis = axis.normalized().unwrap();
                    opaque.push((Opaque::Cylinder { base, axis, radius, height }, label));
                }
                ScenePrimitive::Box { min, max, label } => opaque.push((Opaque::Box { min, max }, label)),
                ScenePrimitive::Wire { a, b, radius, label } => {
                    let seg = b - a;
                    opaque.push((
                        Opaque::Tube { base: a, axis: seg.normalized().unwrap(), radius, height: seg.norm() },
                        label,
                    ));
                }
                ScenePrimitive::Scatter { min, max, count, point_radius, label } => {
                    clouds.push(ScatterCloud::new(min, max, count, point_radius, label, &mut rng));
                }
            }
        }
        Ok(PreparedScene { opaque, clouds })
    }

    /// Echoes of one beam, nearest first, before noise.
    fn cast(
        &self,
        o: Vec3,
        d: Vec3,
        max_range: f64,
        rng: &mut ChaCha8Rng,
        scratch: &mut Vec<(f64, u32)>,
        out: &mut Vec<EchoSample>,
    ) {
        out.clear();
        let mut stop = max_range;
        let mut stop_label = None;
        for (shape, label) in &self.opaque {
            if let Some(t) = shape.hit(o, d) {
                if t <= stop {
                    stop = t;
                    stop_label = Some(*label);
                }
            }
        }
        scratch.clear();
        let mut merged: Vec<(f64, u32)> = Vec::new();
        for cloud in &self.clouds {
            cloud.hits(o, d, stop, scratch);
            merged.extend(scratch.drain(..).map(|(t, _)| (t, cloud.label)));
        }
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (t, label) in merged {
            out.push(EchoSample::labeled(t, label));
            if out.len() == MAX_ECHOES || !rng.random_bool(SCATTER_TRANSMISSION) {
                return;
            }
        }
        if let Some(label) = stop_label {
            out.push(EchoSample::labeled(stop, label));
        }
    }
}

fn simulate_lines(
    scene: &PreparedScene,
    traj: &TrajectorySpec,
    seed: u64,
    lines: Range<usize>,
) -> Result<PulseGridBuilder, SynthError> {
    let n_steps = traj.n_steps();
    let meta = ScannerMeta { pulses_per_line: traj.pulses_per_line };
    let mut b = PulseGridBuilder::new(lines.len(), n_steps, meta);
    let mut scratch = Vec::new();
    let mut raw = Vec::with_capacity(MAX_ECHOES);
    let mut noisy: Vec<EchoSample> = Vec::with_capacity(MAX_ECHOES);
    for s in lines {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        for r in 0..n_steps {
            let pulse = traj.pulse(s, r);
            scene.cast(pulse.origin, pulse.direction, traj.max_range, &mut rng, &mut scratch, &mut raw);
            noisy.clear();
            for e in &raw {
                let mut range = e.range;
                if traj.range_noise > 0.0 {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    range += traj.range_noise * z;
                }
                if range > 0.0 {
                    noisy.push(EchoSample { range, ..*e });
                }
            }
            noisy.sort_by(|a, b| a.range.total_cmp(&b.range));
            noisy.dedup_by(|b, a| b.range <= a.range);
            b.push(pulse, &noisy)?;
        }
    }
    Ok(b)
}

/// Simulates a scan of `scene` on the calling thread.
pub fn simulate(scene: &[ScenePrimitive], traj: &TrajectorySpec, seed: u64) -> Result<PulseGrid, SynthError> {
    simulate_with(scene, traj, seed, &crate::exec::Sequential)
}

/// Simulates a scan, ray-casting scanline chunks through `exec`. The output
/// depends only on `(scene, traj, seed)`.
pub fn simulate_with<E: Executor>(
    scene: &[ScenePrimitive],
    traj: &TrajectorySpec,
    seed: u64,
    exec: &E,
) -> Result<PulseGrid, SynthError> {
    traj.validate()?;
    let prepared = PreparedScene::new(scene, seed)?;
    let parts: Vec<Result<PulseGridBuilder, SynthError>> =
        exec.map_chunks(traj.n_lines, |lines| alloc::vec![simulate_lines(&prepared, traj, seed, lines)]);
    let parts = parts.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(PulseGridBuilder::concat(
        traj.n_lines,
        traj.n_steps(),
        ScannerMeta { pulses_per_line: traj.pulses_per_line },
        parts,
    )?)
}

/// Labels of `scene` that mark non-surface primitives.
pub fn scatter_labels(scene: &[ScenePrimitive]) -> Vec<(u32, f64)> {
    scene
        .iter()
        .filter_map(|p| match *p {
            ScenePrimitive::Scatter { label, point_radius, .. } => Some((label, point_radius)),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn straight(n_lines: usize, n_p: f64, res: Option<f64>) -> TrajectorySpec {
        TrajectorySpec {
            path: vec![Vec3::ZERO, Vec3::new(100.0, 0.0, 0.0)],
            speed: vec![[0.0, 1.0]],
            lines_per_second: 100.0,
            pulses_per_line: n_p,
            angular_resolution: res,
            start_angle: 0.0,
            rotation_axis: Vec3::X,
            zero_direction: Vec3::Y,
            n_lines,
            range_noise: 0.0,
            max_range: 100.0,
        }
    }

    fn wall(y: f64, label: u32) -> ScenePrimitive {
        ScenePrimitive::Plane {
            center: Vec3::new(0.0, y, 0.0),
            normal: Vec3::new(0.0, -1.0, 0.0),
            u_axis: Vec3::X,
            half_extent: [1000.0, 1000.0],
            label,
        }
    }

    #[test]
    fn parallel_beams_on_facing_plane_have_equal_ranges() {
        let traj = straight(5, 10.5, Some(1e-12));
        let g = simulate(&[wall(7.0, 1)], &traj, 3).unwrap();
        assert_eq!((g.n_lines(), g.n_steps()), (5, 10));
        for e in g.all_echoes() {
            assert!((e.range - 7.0).abs() < 1e-9);
        }
        assert_eq!(g.n_echoes(), 50);
    }

    #[test]
    fn occlusion_leaves_one_echo() {
        let traj = TrajectorySpec { start_angle: -0.2, ..straight(4, 40.5, Some(0.01)) };
        let near = ScenePrimitive::Plane {
            center: Vec3::new(0.0, 5.0, 5.0),
            normal: Vec3::new(0.0, -1.0, 0.0),
            u_axis: Vec3::X,
            half_extent: [1000.0, 5.0],
            label: 1,
        };
        let g = simulate(&[near, wall(6.0, 2)], &traj, 0).unwrap();
        let mut near_hits = 0;
        for s in 0..4 {
            for r in 0..40 {
                let e = g.echoes(s, r).unwrap();
                assert_eq!(e.len(), 1);
                near_hits += usize::from(e[0].label == Some(1));
            }
        }
        assert!(near_hits > 0 && near_hits < 160);
    }

    #[test]
    fn deterministic_and_seeded() {
        let (scene, mut traj) = builtin_scene("foliage").unwrap();
        traj.n_lines = 6;
        let a = simulate(&scene, &traj, 11).unwrap();
        let b = simulate(&scene, &traj, 11).unwrap();
        assert_eq!(a, b);
        let c = simulate(&scene, &traj, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn ranges_strictly_increase_and_cap_holds() {
        let (scene, mut traj) = builtin_scene("foliage").unwrap();
        traj.n_lines = 10;
        let g = simulate(&scene, &traj, 5).unwrap();
        let mut multi = 0;
        for s in 0..g.n_lines() {
            for r in 0..g.n_steps() {
                let e = g.echoes(s, r).unwrap();
                assert!(e.len() <= MAX_ECHOES);
                assert!(e.windows(2).all(|w| w[0].range < w[1].range));
                multi += usize::from(e.len() > 1);
            }
        }
        assert!(multi > 0, "scatter should produce multi-echo pulses");
    }

    #[test]
    fn distance_integrates_speed_profile() {
        let mut t = straight(1, 10.0, None);
        t.speed = vec![[0.0, 0.0], [2.0, 2.0]];
        assert!((t.distance_at(2.0) - 2.0).abs() < 1e-12);
        assert!((t.distance_at(3.0) - 4.0).abs() < 1e-12);
        assert!((t.distance_at(1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        let mut t = straight(1, 3.0, None);
        assert!(t.validate().is_err());
        t.pulses_per_line = 10.0;
        t.range_noise = -1.0;
        assert!(t.validate().is_err());
        let bad = ScenePrimitive::Cylinder { base: Vec3::ZERO, axis: Vec3::Z, radius: -1.0, height: 1.0, label: 0 };
        assert!(PreparedScene::new(&[bad], 0).is_err());
        assert!(builtin_scene("bogus").is_err());
    }
}
