//! Built-in scenes.
//!
//! | name            | grid        | content                                           |
//! |-----------------|-------------|---------------------------------------------------|
//! | `facing-plane`  | 100 x 100   | one wall 10 m ahead, beams within 1.5 deg of its normal |
//! | `two-planes`    | 100 x 100   | wall at 10 m covering the upper half, second wall 1 m behind |
//! | `grazing-plane` | 60 x 20     | road seen at <= 4 deg, every echo spacing > 0.5 m   |
//! | `pole-on-road`  | 100 x 360   | full-turn scanner, road, facade, 0.15 m pole       |
//! | `wire`          | 100 x 100   | 2 cm wire 4 m ahead of a facade                     |
//! | `foliage`       | 100 x 100   | 60 000 scatter points of 1 cm radius, nothing behind |
//! | `street`        | 1000 x 1000 | road, facades, cars, poles, trees, overhead wire    |
//!
//! Sector scenes use an explicit angular resolution so that a 100-step line
//! covers only the region of interest.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::{ScenePrimitive, SynthError, TrajectorySpec};
use crate::geom::Vec3;

pub const BUILTIN_SCENES: [&str; 7] =
    ["facing-plane", "two-planes", "grazing-plane", "pole-on-road", "wire", "foliage", "street"];

fn plane(center: [f64; 3], normal: [f64; 3], u_axis: [f64; 3], half_extent: [f64; 2], label: u32) -> ScenePrimitive {
    ScenePrimitive::Plane { center: center.into(), normal: normal.into(), u_axis: u_axis.into(), half_extent, label }
}

/// Narrow-sector scanner driving along +x at 1 m/s, 100 lines/s, 100 steps
/// of `resolution` centred on +y.
fn sector(origin: Vec3, resolution: f64) -> TrajectorySpec {
    TrajectorySpec {
        path: vec![origin, origin + Vec3::new(1000.0, 0.0, 0.0)],
        speed: vec![[0.0, 1.0]],
        lines_per_second: 100.0,
        pulses_per_line: 100.5,
        angular_resolution: Some(resolution),
        start_angle: -49.5 * resolution,
        rotation_axis: Vec3::X,
        zero_direction: Vec3::Y,
        n_lines: 100,
        range_noise: 0.0,
        max_range: 50.0,
    }
}

/// Square 5 mm lattice on a wall 10 m ahead.
fn facing_trajectory() -> TrajectorySpec {
    TrajectorySpec { speed: vec![[0.0, 1.0]], lines_per_second: 200.0, ..sector(Vec3::ZERO, 5e-4) }
}

/// Near wall at y = 10 covering z >= 0 (label 1), far wall `gap` meters
/// behind it (label 2).
pub fn two_planes(gap: f64) -> (Vec<ScenePrimitive>, TrajectorySpec) {
    (
        vec![
            plane([0.0, 10.0, 50.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [1000.0, 50.0], 1),
            plane([0.0, 10.0 + gap, 0.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [1000.0, 1000.0], 2),
        ],
        facing_trajectory(),
    )
}

fn facing_plane() -> (Vec<ScenePrimitive>, TrajectorySpec) {
    (vec![plane([0.0, 10.0, 0.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [1000.0, 1000.0], 1)], facing_trajectory())
}

/// Forward-looking scanner 1 m above a road, sweep plane tilted 4 degrees
/// down. The sweep meets the road on a straight line about 14.3 m ahead;
/// steps are 0.04 rad (>= 0.57 m apart on the road) and lines 0.6 m apart.
fn grazing_plane() -> (Vec<ScenePrimitive>, TrajectorySpec) {
    let tilt = 4.0f64.to_radians();
    let (s, c) = (libm::sin(tilt), libm::cos(tilt));
    let step = 0.04;
    (
        vec![plane([0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [1000.0, 1000.0], 1)],
        TrajectorySpec {
            path: vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 1000.0, 1.0)],
            speed: vec![[0.0, 6.0]],
            lines_per_second: 10.0,
            pulses_per_line: 20.5,
            angular_resolution: Some(step),
            start_angle: -9.5 * step,
            rotation_axis: Vec3::new(0.0, s, c),
            zero_direction: Vec3::new(0.0, c, -s),
            n_lines: 60,
            range_noise: 0.0,
            max_range: 100.0,
        },
    )
}

/// Full-turn profiler: drives along +x, 2.5 m high, rotating in the y-z
/// plane starting straight down.
fn profiler(
    height: f64,
    pulses_per_line: f64,
    n_lines: usize,
    speed: Vec<[f64; 2]>,
    lines_per_second: f64,
) -> TrajectorySpec {
    TrajectorySpec {
        path: vec![Vec3::new(0.0, 0.0, height), Vec3::new(1000.0, 0.0, height)],
        speed,
        lines_per_second,
        pulses_per_line,
        angular_resolution: None,
        start_angle: 0.0,
        rotation_axis: Vec3::X,
        zero_direction: Vec3::new(0.0, 0.0, -1.0),
        n_lines,
        range_noise: 0.005,
        max_range: 60.0,
    }
}

fn pole_on_road() -> (Vec<ScenePrimitive>, TrajectorySpec) {
    (
        vec![
            plane([0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [1000.0, 50.0], 1),
            ScenePrimitive::Cylinder {
                base: Vec3::new(2.5, 3.0, 0.0),
                axis: Vec3::Z,
                radius: 0.15,
                height: 4.0,
                label: 2,
            },
            plane([0.0, 8.0, 10.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [1000.0, 10.0], 3),
        ],
        profiler(2.5, 360.4, 100, vec![[0.0, 2.5]], 50.0),
    )
}

fn wire() -> (Vec<ScenePrimitive>, TrajectorySpec) {
    let origin = Vec3::new(0.0, 0.0, 1.5);
    let mut traj = sector(origin, 2e-3);
    traj.range_noise = 0.002;
    (
        vec![
            ScenePrimitive::Wire {
                a: Vec3::new(-1000.0, 4.0, 1.5),
                b: Vec3::new(1000.0, 4.0, 1.5),
                radius: 0.01,
                label: 1,
            },
            plane([0.0, 8.0, 0.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [1000.0, 1000.0], 2),
        ],
        traj,
    )
}

fn foliage() -> (Vec<ScenePrimitive>, TrajectorySpec) {
    let mut traj = sector(Vec3::ZERO, 2e-3);
    traj.range_noise = 0.002;
    (
        vec![ScenePrimitive::Scatter {
            min: Vec3::new(-1.0, 6.0, -1.0),
            max: Vec3::new(2.0, 9.0, 1.0),
            count: 60_000,
            point_radius: 0.01,
            label: 1,
        }],
        traj,
    )
}

fn street() -> (Vec<ScenePrimitive>, TrajectorySpec) {
    let mut scene = vec![
        plane([150.0, 0.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [300.0, 9.0], 1),
        plane([150.0, 9.0, 10.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [300.0, 10.0], 2),
        plane([150.0, -9.0, 10.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [300.0, 10.0], 3),
        ScenePrimitive::Box { min: Vec3::new(20.0, 4.0, 0.0), max: Vec3::new(24.5, 5.8, 1.5), label: 4 },
        ScenePrimitive::Box { min: Vec3::new(50.0, -5.8, 0.0), max: Vec3::new(54.5, -4.0, 1.5), label: 5 },
        ScenePrimitive::Wire { a: Vec3::new(-10.0, 0.5, 7.0), b: Vec3::new(310.0, 0.5, 7.0), radius: 0.015, label: 14 },
    ];
    for (i, x) in [15.0, 35.0, 55.0, 75.0].into_iter().enumerate() {
        scene.push(ScenePrimitive::Cylinder {
            base: Vec3::new(x, 6.0, 0.0),
            axis: Vec3::Z,
            radius: 0.1,
            height: 4.0,
            label: 6 + i as u32,
        });
    }
    for (i, x) in [30.0, 70.0].into_iter().enumerate() {
        let label = 10 + 2 * i as u32;
        scene.push(ScenePrimitive::Cylinder {
            base: Vec3::new(x, -6.5, 0.0),
            axis: Vec3::Z,
            radius: 0.2,
            height: 3.5,
            label,
        });
        scene.push(ScenePrimitive::Scatter {
            min: Vec3::new(x - 1.5, -8.0, 3.0),
            max: Vec3::new(x + 1.5, -5.0, 6.0),
            count: 15_000,
            point_radius: 0.02,
            label: label + 1,
        });
    }
    let speed = vec![[0.0, 8.0], [4.0, 12.0], [8.0, 6.0], [10.0, 10.0]];
    (scene, profiler(2.2, 1000.4, 1000, speed, 100.0))
}

/// Scene and trajectory of a built-in scene.
pub fn builtin_scene(name: &str) -> Result<(Vec<ScenePrimitive>, TrajectorySpec), SynthError> {
    match name {
        "facing-plane" => Ok(facing_plane()),
        "two-planes" => Ok(two_planes(1.0)),
        "grazing-plane" => Ok(grazing_plane()),
        "pole-on-road" => Ok(pole_on_road()),
        "wire" => Ok(wire()),
        "foliage" => Ok(foliage()),
        "street" => Ok(street()),
        other => Err(SynthError::UnknownScene(other.to_string())),
    }
}
