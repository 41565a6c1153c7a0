//! Scene manifest parsing and validation.
//!
//! A manifest is a UTF-8 JSON document with exactly these snake_case keys
//! (unknown keys are rejected):
//!
//! ```json
//! {
//!   "video_id": "clip01",
//!   "width_px": 640,
//!   "height_px": 480,
//!   "n_frames": 300,
//!   "frame_rate_hz": 30.0,
//!   "px_per_dva": 35.0,
//!   "feature_path": "clip01.feature.oddm",
//!   "mask_path": "clip01.mask.oddm",
//!   "object_ids": [{"id": 1, "category": "human"}]
//! }
//! ```

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::scene::SceneError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectCategory {
    Human,
    Animal,
    Vehicle,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectDecl {
    pub id: u16,
    pub category: ObjectCategory,
}

#[derive(Debug, Clone, Serialize)]
pub struct SceneManifest {
    pub video_id: String,
    pub width_px: u32,
    pub height_px: u32,
    pub n_frames: u32,
    pub frame_rate_hz: f64,
    pub px_per_dva: f64,
    pub feature_path: PathBuf,
    pub mask_path: PathBuf,
    pub object_ids: Vec<ObjectDecl>,
}

impl SceneManifest {
    pub fn pixels_per_frame(&self) -> usize {
        self.width_px as usize * self.height_px as usize
    }

    pub fn declares_object(&self, id: u16) -> bool {
        self.object_ids.iter().any(|o| o.id == id)
    }

    /// Object ids in ascending order (background id 0 not included).
    pub fn sorted_object_ids(&self) -> Vec<u16> {
        let mut ids: Vec<u16> = self.object_ids.iter().map(|o| o.id).collect();
        ids.sort_unstable();
        ids
    }
}

#[derive(Debug)]
pub struct ParsedManifest {
    pub manifest: SceneManifest,
    /// Non-fatal validation findings, e.g. a crowded scene.
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    video_id: String,
    width_px: i64,
    height_px: i64,
    n_frames: i64,
    frame_rate_hz: f64,
    px_per_dva: f64,
    feature_path: PathBuf,
    mask_path: PathBuf,
    object_ids: Vec<RawObject>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObject {
    id: i64,
    category: ObjectCategory,
}

fn positive_u32(value: i64, field: &str) -> Result<u32, SceneError> {
    if value <= 0 {
        return Err(SceneError::ManifestField {
            field: field.to_string(),
            message: format!("must be a positive integer, got {value}"),
        });
    }
    u32::try_from(value).map_err(|_| SceneError::ManifestField {
        field: field.to_string(),
        message: format!("value {value} exceeds the supported range"),
    })
}

fn positive_real(value: f64, field: &str) -> Result<f64, SceneError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(SceneError::ManifestField {
            field: field.to_string(),
            message: format!("must be a positive finite real, got {value}"),
        });
    }
    Ok(value)
}

pub fn parse_manifest(text: &str) -> Result<ParsedManifest, SceneError> {
    let raw: RawManifest =
        serde_json::from_str(text).map_err(|e| SceneError::ManifestParse(e.to_string()))?;

    let mut warnings = Vec::new();
    let mut object_ids = Vec::with_capacity(raw.object_ids.len());
    let mut seen = BTreeSet::new();
    for obj in &raw.object_ids {
        if obj.id == 0 {
            return Err(SceneError::ManifestField {
                field: "object_ids".to_string(),
                message: "reserved background id 0 may not be declared".to_string(),
            });
        }
        if obj.id < 0 || obj.id > u16::MAX as i64 {
            return Err(SceneError::ManifestField {
                field: "object_ids".to_string(),
                message: format!("id {} outside the valid label range", obj.id),
            });
        }
        if !seen.insert(obj.id) {
            return Err(SceneError::ManifestField {
                field: "object_ids".to_string(),
                message: format!("duplicate object id {}", obj.id),
            });
        }
        object_ids.push(ObjectDecl {
            id: obj.id as u16,
            category: obj.category,
        });
    }
    if object_ids.len() > 10 {
        warnings.push(format!(
            "scene declares {} objects; crowded scenes (>10) are hard to accumulate evidence for",
            object_ids.len()
        ));
    }

    let manifest = SceneManifest {
        video_id: raw.video_id,
        width_px: positive_u32(raw.width_px, "width_px")?,
        height_px: positive_u32(raw.height_px, "height_px")?,
        n_frames: positive_u32(raw.n_frames, "n_frames")?,
        frame_rate_hz: positive_real(raw.frame_rate_hz, "frame_rate_hz")?,
        px_per_dva: positive_real(raw.px_per_dva, "px_per_dva")?,
        feature_path: raw.feature_path,
        mask_path: raw.mask_path,
        object_ids,
    };
    Ok(ParsedManifest { manifest, warnings })
}

/// Small manifest literal for unit tests across the crate.
#[doc(hidden)]
pub fn test_manifest(width: u32, height: u32, n_frames: u32, ids: &[u16]) -> SceneManifest {
    SceneManifest {
        video_id: "test".to_string(),
        width_px: width,
        height_px: height,
        n_frames,
        frame_rate_hz: 30.0,
        px_per_dva: 10.0,
        feature_path: PathBuf::from("test.feature.oddm"),
        mask_path: PathBuf::from("test.mask.oddm"),
        object_ids: ids
            .iter()
            .map(|&id| ObjectDecl {
                id,
                category: ObjectCategory::Other,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest_json(objects: &str) -> String {
        format!(
            r#"{{
  "video_id": "clip01",
  "width_px": 640,
  "height_px": 480,
  "n_frames": 300,
  "frame_rate_hz": 30.0,
  "px_per_dva": 35.0,
  "feature_path": "clip01.feature.oddm",
  "mask_path": "clip01.mask.oddm",
  "object_ids": {objects}
}}"#
        )
    }

    #[test]
    fn minimal_valid_manifest() {
        let parsed = parse_manifest(&manifest_json(r#"[{"id": 1, "category": "human"}]"#)).unwrap();
        assert_eq!(parsed.manifest.n_frames, 300);
        assert_eq!(parsed.manifest.object_ids.len(), 1);
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn background_id_rejected() {
        let err =
            parse_manifest(&manifest_json(r#"[{"id": 0, "category": "other"}]"#)).unwrap_err();
        assert!(err.to_string().contains("reserved background id"));
    }

    #[test]
    fn crowded_scene_warns_but_parses() {
        let objects: Vec<String> = (1..=11)
            .map(|id| format!(r#"{{"id": {id}, "category": "other"}}"#))
            .collect();
        let parsed = parse_manifest(&manifest_json(&format!("[{}]", objects.join(",")))).unwrap();
        assert_eq!(parsed.manifest.object_ids.len(), 11);
        assert_eq!(parsed.warnings.len(), 1);
        assert!(parsed.warnings[0].contains("11 objects"));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = parse_manifest(&manifest_json(
            r#"[{"id": 2, "category": "other"}, {"id": 2, "category": "human"}]"#,
        ))
        .unwrap_err();
        assert!(err.to_string().contains("duplicate object id 2"));
    }

    #[test]
    fn non_positive_dimension_names_field() {
        let text = manifest_json("[]").replace(r#""width_px": 640"#, r#""width_px": 0"#);
        let err = parse_manifest(&text).unwrap_err();
        assert!(err.to_string().contains("width_px"));

        let text = manifest_json("[]").replace(r#""n_frames": 300"#, r#""n_frames": -3"#);
        let err = parse_manifest(&text).unwrap_err();
        assert!(err.to_string().contains("n_frames"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = manifest_json("[]").replace(r#""video_id""#, r#""extra": 1, "video_id""#);
        assert!(parse_manifest(&text).is_err());
    }

    #[test]
    fn missing_field_rejected() {
        let text = manifest_json("[]").replace(r#"  "px_per_dva": 35.0,"#, "");
        let err = parse_manifest(&text).unwrap_err();
        assert!(err.to_string().contains("px_per_dva"));
    }
}
