//! Per-option drift rates from the information map and the object masks.
//!
//! An option is either a declared object or the background (id 0). Its
//! drift rate is the mean information over its mask pixels, scaled by the
//! natural logarithm of its pixel count, so larger objects accumulate
//! evidence faster but only logarithmically so. Options covering one pixel
//! or none contribute zero drift; objects may disappear and reappear across
//! frames without erroring.

use std::collections::BTreeMap;

use crate::grid::Grid;
use crate::scene::manifest::SceneManifest;
use crate::scene::raster::MaskFrame;

pub type OptionId = u16;

/// Mask label reserved for the background option.
pub const BACKGROUND: OptionId = 0;

/// Drift rates and pixel areas for every option of one frame, keyed by
/// option id in ascending order (background first).
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceVector {
    mu: BTreeMap<OptionId, f64>,
    area: BTreeMap<OptionId, usize>,
}

impl EvidenceVector {
    pub fn mu(&self, option: OptionId) -> f64 {
        self.mu.get(&option).copied().unwrap_or(0.0)
    }

    pub fn area(&self, option: OptionId) -> usize {
        self.area.get(&option).copied().unwrap_or(0)
    }

    /// Options in ascending id order, background first.
    pub fn options(&self) -> impl Iterator<Item = OptionId> + '_ {
        self.mu.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (OptionId, f64)> + '_ {
        self.mu.iter().map(|(&id, &mu)| (id, mu))
    }
}

/// Pixel count per option, for every declared object plus the background.
/// The counts partition the frame.
pub fn option_areas(mask: MaskFrame<'_>, manifest: &SceneManifest) -> BTreeMap<OptionId, usize> {
    let mut areas: BTreeMap<OptionId, usize> = BTreeMap::new();
    areas.insert(BACKGROUND, 0);
    for obj in &manifest.object_ids {
        areas.insert(obj.id, 0);
    }
    for &label in mask.labels {
        *areas.entry(label).or_insert(0) += 1;
    }
    areas
}

fn mu_from_sum(sum: f64, area: usize, log_scaling: bool) -> f64 {
    if area <= 1 {
        return 0.0;
    }
    let a = area as f64;
    let mean = sum / a;
    if log_scaling {
        mean * a.ln()
    } else {
        mean
    }
}

/// Drift rate for one option: mean information over its pixels times the
/// log of its area (zero for areas of one pixel or less).
pub fn evidence(info: &Grid<f64>, mask: MaskFrame<'_>, option: OptionId) -> f64 {
    debug_assert_eq!(info.as_slice().len(), mask.labels.len());
    let mut sum = 0.0;
    let mut area = 0usize;
    for (&value, &label) in info.as_slice().iter().zip(mask.labels) {
        if label == option {
            sum += value;
            area += 1;
        }
    }
    mu_from_sum(sum, area, true)
}

/// Drift rates for all options of a frame in one pass. Consistent with
/// calling [`evidence`] per option; `bg_log_scaling` switches the
/// log-area factor off for the background only.
pub fn evidence_all(
    info: &Grid<f64>,
    mask: MaskFrame<'_>,
    manifest: &SceneManifest,
    bg_log_scaling: bool,
) -> EvidenceVector {
    debug_assert_eq!(info.as_slice().len(), mask.labels.len());

    // Compact per-label accumulators; labels were validated at load time.
    let max_id = manifest
        .object_ids
        .iter()
        .map(|o| o.id)
        .max()
        .unwrap_or(BACKGROUND) as usize;
    let mut sums = vec![0.0f64; max_id + 1];
    let mut counts = vec![0usize; max_id + 1];
    for (&value, &label) in info.as_slice().iter().zip(mask.labels) {
        sums[label as usize] += value;
        counts[label as usize] += 1;
    }

    let mut mu = BTreeMap::new();
    let mut area = BTreeMap::new();
    mu.insert(
        BACKGROUND,
        mu_from_sum(sums[0], counts[0], bg_log_scaling),
    );
    area.insert(BACKGROUND, counts[0]);
    for obj in &manifest.object_ids {
        let i = obj.id as usize;
        mu.insert(obj.id, mu_from_sum(sums[i], counts[i], true));
        area.insert(obj.id, counts[i]);
    }
    EvidenceVector { mu, area }
}
