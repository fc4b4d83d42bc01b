//! Ray-primitive intersection.

use crate::geom::Vec3;

/// Hits closer than this to the ray origin are ignored (m).
pub const MIN_HIT_DISTANCE: f64 = 1e-9;

#[inline]
fn first_positive(t0: f64, t1: f64) -> Option<f64> {
    if t0 > MIN_HIT_DISTANCE {
        Some(t0)
    } else if t1 > MIN_HIT_DISTANCE {
        Some(t1)
    } else {
        None
    }
}

/// Rectangle centred at `center`, spanned by unit `u` and `v`.
pub fn ray_rect(o: Vec3, d: Vec3, center: Vec3, normal: Vec3, u: Vec3, v: Vec3, half: [f64; 2]) -> Option<f64> {
    let denom = d.dot(normal);
    if denom.abs() < 1e-12 {
        return None;
    }
    let t = (center - o).dot(normal) / denom;
    if t <= MIN_HIT_DISTANCE {
        return None;
    }
    let q = o + d * t - center;
    (q.dot(u).abs() <= half[0] && q.dot(v).abs() <= half[1]).then_some(t)
}

/// Both roots of `|w + t d|^2 = r^2` restricted to the plane orthogonal to
/// unit `axis`, ascending.
fn tube_roots(w: Vec3, d: Vec3, axis: Vec3, radius: f64) -> Option<(f64, f64)> {
    let dp = d - axis * d.dot(axis);
    let wp = w - axis * w.dot(axis);
    let a = dp.norm_squared();
    if a < 1e-18 {
        return None;
    }
    let b = 2.0 * dp.dot(wp);
    let c = wp.norm_squared() - radius * radius;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = libm::sqrt(disc);
    // numerically stable pair
    let q = if b >= 0.0 { -0.5 * (b + sq) } else { -0.5 * (b - sq) };
    let (t0, t1) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    Some(if t0 <= t1 { (t0, t1) } else { (t1, t0) })
}

/// Lateral surface of the tube of `radius` around segment `base -> base +
/// height * axis`.
pub fn ray_tube(o: Vec3, d: Vec3, base: Vec3, axis: Vec3, radius: f64, height: f64) -> Option<f64> {
    let w = o - base;
    let (t0, t1) = tube_roots(w, d, axis, radius)?;
    [t0, t1].into_iter().find(|&t| {
        if t <= MIN_HIT_DISTANCE {
            return false;
        }
        let h = (w + d * t).dot(axis);
        (0.0..=height).contains(&h)
    })
}

fn ray_disk(o: Vec3, d: Vec3, center: Vec3, normal: Vec3, radius: f64) -> Option<f64> {
    let denom = d.dot(normal);
    if denom.abs() < 1e-12 {
        return None;
    }
    let t = (center - o).dot(normal) / denom;
    (t > MIN_HIT_DISTANCE && (o + d * t - center).norm_squared() <= radius * radius).then_some(t)
}

/// Closed cylinder: lateral surface and both caps.
pub fn ray_cylinder(o: Vec3, d: Vec3, base: Vec3, axis: Vec3, radius: f64, height: f64) -> Option<f64> {
    [
        ray_tube(o, d, base, axis, radius, height),
        ray_disk(o, d, base, axis, radius),
        ray_disk(o, d, base + axis * height, axis, radius),
    ]
    .into_iter()
    .flatten()
    .reduce(f64::min)
}

/// Axis-aligned box, slab method. Returns `(t_enter, t_exit)` of the
/// unclipped ray line when it crosses the box ahead of the origin.
pub fn ray_aabb_span(o: Vec3, d: Vec3, min: Vec3, max: Vec3) -> Option<(f64, f64)> {
    let mut t_near = f64::NEG_INFINITY;
    let mut t_far = f64::INFINITY;
    for (oi, di, lo, hi) in [(o.x, d.x, min.x, max.x), (o.y, d.y, min.y, max.y), (o.z, d.z, min.z, max.z)] {
        if di.abs() < 1e-300 {
            if oi < lo || oi > hi {
                return None;
            }
        } else {
            let inv = 1.0 / di;
            let (a, b) = ((lo - oi) * inv, (hi - oi) * inv);
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            t_near = t_near.max(a);
            t_far = t_far.min(b);
        }
    }
    (t_near <= t_far && t_far > MIN_HIT_DISTANCE).then_some((t_near, t_far))
}

pub fn ray_aabb(o: Vec3, d: Vec3, min: Vec3, max: Vec3) -> Option<f64> {
    let (t0, t1) = ray_aabb_span(o, d, min, max)?;
    first_positive(t0, t1)
}

/// Entry distance into a sphere; `None` when missed or when the origin is
/// inside it.
pub fn ray_sphere(o: Vec3, d: Vec3, center: Vec3, radius: f64) -> Option<f64> {
    let w = o - center;
    let b = w.dot(d);
    let c = w.norm_squared() - radius * radius;
    if c <= 0.0 {
        return None;
    }
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let t = -b - libm::sqrt(disc);
    (t > MIN_HIT_DISTANCE).then_some(t)
}
