//! Object-based drift-diffusion scanpath simulation for dynamic scenes.
//!
//! The crate simulates saccadic eye-movement decisions as a race between
//! per-object evidence accumulators driven by precomputed feature maps and
//! object segmentation masks. It also ships a random peak-hopping baseline
//! generator and a scanpath-statistics toolbox for comparing simulated
//! scanpaths against ground-truth gaze recordings.
//!
//! Pipeline overview, per video frame:
//!
//! 1. [`field`] builds the gaze-dependent sensitivity map and folds in the
//!    center bias to produce the information map.
//! 2. [`evidence`] turns the information map and the object masks into one
//!    drift rate per option (objects plus background).
//! 3. [`engine`] advances the accumulator race, triggers saccades at
//!    threshold, samples landing positions, and tracks the foveated object
//!    between saccades (emergent fixation / smooth pursuit).
//!
//! All randomness flows through [`rng::SimRng`], a fully specified generator,
//! so a `(scene, config, seed)` triple pins the output bit-for-bit.

pub mod baseline;
pub mod engine;
pub mod evidence;
pub mod field;
pub mod grid;
pub mod metrics;
pub mod rng;
pub mod scanpath;
pub mod scene;
pub mod synthetic;

pub use engine::{simulate, simulate_traced, GazeState, ObjectState, SimConfig};
pub use evidence::{EvidenceVector, OptionId, BACKGROUND};
pub use field::CenterBiasParams;
pub use grid::{Grid, Point};
pub use scanpath::{FoveationEvent, ModelKind, SaccadeEvent, ScanEvent, Scanpath};
pub use scene::{
    events::{EventKind, EventList, EventRecord, SubjectEvents},
    manifest::{ObjectCategory, ObjectDecl, SceneManifest},
    raster::{FeatureRaster, MaskFrame, MaskRaster},
    SceneBundle, SceneError,
};
