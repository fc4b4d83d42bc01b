//! Scene selection: built-in scenes by name, or TOML scene files.
//!
//! A scene file holds a `[trajectory]` table and any number of
//! `[[primitive]]` tables, each tagged with `kind`:
//!
//! ```toml
//! seed = 3            # optional default seed
//!
//! [trajectory]
//! path = [[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]]
//! speed = [[0.0, 1.0]]
//! lines_per_second = 100.0
//! pulses_per_line = 100.5
//! rotation_axis = [1.0, 0.0, 0.0]
//! zero_direction = [0.0, 1.0, 0.0]
//! n_lines = 50
//! max_range = 50.0
//!
//! [[primitive]]
//! kind = "plane"
//! center = [5.0, 4.0, 0.0]
//! normal = [0.0, -1.0, 0.0]
//! u_axis = [1.0, 0.0, 0.0]
//! half_extent = [10.0, 10.0]
//! label = 1
//! ```

use std::path::Path;

use anyhow::Context;
use mlsmesh_core::synth::{builtin_scene, scatter_labels, ScenePrimitive, TrajectorySpec, BUILTIN_SCENES};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub trajectory: TrajectorySpec,
    #[serde(rename = "primitive", default)]
    pub primitives: Vec<ScenePrimitive>,
}

impl SceneConfig {
    pub fn builtin(name: &str) -> anyhow::Result<Self> {
        let (primitives, trajectory) = builtin_scene(name)
            .map_err(|_| anyhow::anyhow!("unknown scene `{name}` (built-in scenes: {})", BUILTIN_SCENES.join(", ")))?;
        Ok(SceneConfig { seed: None, trajectory, primitives })
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing scene file {}", path.display()))
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// `(label, sphere radius)` of every scatter primitive.
    pub fn scatter_labels(&self) -> Vec<(u32, f64)> {
        scatter_labels(&self.primitives)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_scenes_survive_toml() {
        for name in BUILTIN_SCENES {
            let scene = SceneConfig::builtin(name).unwrap();
            let text = scene.to_toml().unwrap();
            assert_eq!(SceneConfig::from_toml(&text).unwrap(), scene, "{name}");
        }
    }

    #[test]
    fn doc_example_parses() {
        let doc = include_str!("scene.rs");
        let start = doc.find("//! ```toml").unwrap();
        let end = start + doc[start..].find("//! ```\n").unwrap();
        let text: String = doc[start..end]
            .lines()
            .skip(1)
            .map(|l| l.trim_start_matches("//!").strip_prefix(' ').unwrap_or(""))
            .collect::<Vec<_>>()
            .join("\n");
        let scene = SceneConfig::from_toml(&text).unwrap();
        assert_eq!(scene.seed, Some(3));
        assert_eq!(scene.primitives.len(), 1);
    }

    #[test]
    fn unknown_scene_lists_builtins() {
        let err = SceneConfig::builtin("bogus").unwrap_err().to_string();
        assert!(err.contains("facing-plane"), "{err}");
    }
}
