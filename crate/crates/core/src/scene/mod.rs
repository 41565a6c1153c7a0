//! Scene ingestion: manifests, feature/mask rasters, ground-truth event
//! files, and pixel/visual-angle conversion.
//!
//! Everything here is read-only input handling. Feature maps and object
//! masks are produced upstream (saliency models, segmentation and tracking
//! pipelines) and consumed from files; this module validates them against
//! the manifest and hands out immutable data the simulators can share
//! freely across worker threads.

pub mod events;
pub mod manifest;
pub mod raster;

use std::path::Path;

use thiserror::Error;

use crate::scene::manifest::SceneManifest;
use crate::scene::raster::{FeatureRaster, MaskRaster};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("manifest parse error: {0}")]
    ManifestParse(String),
    #[error("manifest field {field}: {message}")]
    ManifestField { field: String, message: String },
    #[error("raster {path}: {message}")]
    Raster { path: String, message: String },
    #[error("raster {path}: non-finite value at frame {frame}, y {y}, x {x}")]
    NonFiniteValue {
        path: String,
        frame: u32,
        y: u32,
        x: u32,
    },
    #[error("raster {path}: negative value at frame {frame}, y {y}, x {x}")]
    NegativeValue {
        path: String,
        frame: u32,
        y: u32,
        x: u32,
    },
    #[error("raster {path}: label {label} at frame {frame} not declared in manifest")]
    UnknownLabel {
        path: String,
        label: u16,
        frame: u32,
    },
    #[error("events {path} row {row}: {message}")]
    Events {
        path: String,
        row: usize,
        message: String,
    },
}

/// One video's worth of validated simulation input.
#[derive(Debug, Clone)]
pub struct SceneBundle {
    pub manifest: SceneManifest,
    pub features: FeatureRaster,
    pub masks: MaskRaster,
}

impl SceneBundle {
    /// Bundle pre-built parts, re-checking that the rasters fit the manifest.
    pub fn new(
        manifest: SceneManifest,
        features: FeatureRaster,
        masks: MaskRaster,
    ) -> Result<Self, SceneError> {
        features.check_dimensions(&manifest, "<memory>")?;
        masks.check_dimensions(&manifest, "<memory>")?;
        masks.check_labels(&manifest, "<memory>")?;
        Ok(Self {
            manifest,
            features,
            masks,
        })
    }

    /// Load a manifest and the rasters it references. Relative raster paths
    /// are resolved against the manifest's directory. Returns the bundle and
    /// any non-fatal validation warnings.
    pub fn load(manifest_path: &Path) -> Result<(Self, Vec<String>), SceneError> {
        let text = std::fs::read_to_string(manifest_path).map_err(|source| SceneError::Io {
            path: manifest_path.display().to_string(),
            source,
        })?;
        let parsed = manifest::parse_manifest(&text)?;
        let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
        let feature_path = base.join(&parsed.manifest.feature_path);
        let mask_path = base.join(&parsed.manifest.mask_path);
        let features = FeatureRaster::read(&feature_path, &parsed.manifest)?;
        let masks = MaskRaster::read(&mask_path, &parsed.manifest)?;
        Ok((
            Self {
                manifest: parsed.manifest,
                features,
                masks,
            },
            parsed.warnings,
        ))
    }
}

/// Euclidean displacement in degrees of visual angle.
pub fn px_to_dva(dx_px: f64, dy_px: f64, manifest: &SceneManifest) -> f64 {
    (dx_px * dx_px + dy_px * dy_px).sqrt() / manifest.px_per_dva
}
