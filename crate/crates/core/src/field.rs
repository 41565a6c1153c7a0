//! Gaze-dependent visual field: sensitivity maps, center bias, and the
//! per-frame information map.
//!
//! The sensitivity map models acuity falloff as an isotropic Gaussian
//! density around the current gaze position. Within the currently foveated
//! object the Gaussian is replaced by a uniform sensitivity `omega`,
//! reflecting the object-based spread of covert attention. Feature maps are
//! max-normalized per frame, optionally multiplied with an anisotropic
//! center-bias Gaussian, and combined with the sensitivity map into the
//! information map that drives evidence accumulation and landing positions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evidence::{OptionId, BACKGROUND};
use crate::grid::{Grid, Point};
use crate::scene::manifest::SceneManifest;
use crate::scene::raster::MaskFrame;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("map shapes disagree: {0}")]
    ShapeMismatch(String),
    #[error("center bias {field} must lie in (0, 10], got {value}")]
    BadBiasParam { field: &'static str, value: f64 },
}

/// Anisotropic Gaussian bias toward the frame center, peak-normalized to 1
/// so it never amplifies feature values. Sigmas are given as fractions of
/// the frame width and height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CenterBiasParams {
    pub enabled: bool,
    pub sigma_x_frac: f64,
    pub sigma_y_frac: f64,
}

impl Default for CenterBiasParams {
    fn default() -> Self {
        Self {
            enabled: true,
            sigma_x_frac: 0.25,
            sigma_y_frac: 0.25,
        }
    }
}

impl CenterBiasParams {
    pub fn validate(&self) -> Result<(), FieldError> {
        for (field, value) in [
            ("sigma_x_frac", self.sigma_x_frac),
            ("sigma_y_frac", self.sigma_y_frac),
        ] {
            if !value.is_finite() || value <= 0.0 || value > 10.0 {
                return Err(FieldError::BadBiasParam { field, value });
            }
        }
        Ok(())
    }
}

/// Sensitivity map for one frame: a Gaussian around `gaze` with the
/// foveated object's pixels overridden to a uniform value.
#[derive(Debug, Clone)]
pub struct SensitivityField {
    pub values: Grid<f64>,
    pub gaze: Point,
    pub foveated_id: OptionId,
}

/// Multiplicative center-bias map; all ones when disabled.
pub fn center_bias_map(manifest: &SceneManifest, params: &CenterBiasParams) -> Grid<f64> {
    let (w, h) = (manifest.width_px, manifest.height_px);
    if !params.enabled {
        return Grid::filled(w, h, 1.0);
    }
    let cx = (w - 1) as f64 / 2.0;
    let cy = (h - 1) as f64 / 2.0;
    let sigma_x = params.sigma_x_frac * w as f64;
    let sigma_y = params.sigma_y_frac * h as f64;
    let col: Vec<f64> = (0..w)
        .map(|x| {
            let dx = x as f64 - cx;
            (-(dx * dx) / (2.0 * sigma_x * sigma_x)).exp()
        })
        .collect();
    let mut grid = Grid::filled(w, h, 0.0);
    let data = grid.as_mut_slice();
    for y in 0..h {
        let dy = y as f64 - cy;
        let row_term = (-(dy * dy) / (2.0 * sigma_y * sigma_y)).exp();
        let row = &mut data[y as usize * w as usize..(y as usize + 1) * w as usize];
        for (cell, &cx_term) in row.iter_mut().zip(&col) {
            *cell = cx_term * row_term;
        }
    }
    grid
}

/// Per-frame max normalization of the raw feature map. An all-zero frame
/// stays all-zero.
pub fn normalized_feature(frame: &[f32], width: u32, height: u32) -> Grid<f64> {
    debug_assert_eq!(frame.len(), width as usize * height as usize);
    let max = frame.iter().fold(0.0f64, |m, &v| m.max(v as f64));
    let data = if max > 0.0 {
        frame.iter().map(|&v| v as f64 / max).collect()
    } else {
        vec![0.0; frame.len()]
    };
    Grid::from_vec(width, height, data)
}

/// Isotropic Gaussian density around the gaze position, evaluated on the
/// pixel grid. `sigma_dva` is converted to pixels through the manifest's
/// pixels-per-degree. Computed separably: value = (ax * by) * norm.
pub fn gaussian_sensitivity(gaze: Point, sigma_dva: f64, manifest: &SceneManifest) -> Grid<f64> {
    let sigma_px = sigma_dva * manifest.px_per_dva;
    let (w, h) = (manifest.width_px, manifest.height_px);
    let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma_px * sigma_px);
    let two_sigma_sq = 2.0 * sigma_px * sigma_px;
    let ax: Vec<f64> = (0..w)
        .map(|x| {
            let dx = x as f64 - gaze.x;
            (-(dx * dx) / two_sigma_sq).exp()
        })
        .collect();
    let mut grid = Grid::filled(w, h, 0.0);
    let data = grid.as_mut_slice();
    for y in 0..h {
        let dy = y as f64 - gaze.y;
        let by = (-(dy * dy) / two_sigma_sq).exp();
        let row = &mut data[y as usize * w as usize..(y as usize + 1) * w as usize];
        for (cell, &a) in row.iter_mut().zip(&ax) {
            *cell = (a * by) * norm;
        }
    }
    grid
}

/// Replace the Gaussian with the uniform in-object sensitivity over the
/// foveated object's mask. Foveating the background leaves the map alone;
/// the background is not an attentional object.
pub fn apply_object_sensitivity(
    mut gauss: Grid<f64>,
    mask: MaskFrame<'_>,
    foveated_id: OptionId,
    omega: f64,
    gaze: Point,
) -> SensitivityField {
    if foveated_id != BACKGROUND {
        for (cell, &label) in gauss.as_mut_slice().iter_mut().zip(mask.labels) {
            if label == foveated_id {
                *cell = omega;
            }
        }
    }
    SensitivityField {
        values: gauss,
        gaze,
        foveated_id,
    }
}

/// Elementwise product of normalized features, center bias, and sensitivity.
pub fn information_map(
    feature: &Grid<f64>,
    bias: &Grid<f64>,
    sensitivity: &SensitivityField,
) -> Result<Grid<f64>, FieldError> {
    if !feature.same_shape(bias) || !feature.same_shape(&sensitivity.values) {
        return Err(FieldError::ShapeMismatch(format!(
            "feature {}x{}, bias {}x{}, sensitivity {}x{}",
            feature.width(),
            feature.height(),
            bias.width(),
            bias.height(),
            sensitivity.values.width(),
            sensitivity.values.height()
        )));
    }
    let data = feature
        .as_slice()
        .iter()
        .zip(bias.as_slice())
        .zip(sensitivity.values.as_slice())
        .map(|((&f, &b), &s)| (f * b) * s)
        .collect();
    Ok(Grid::from_vec(feature.width(), feature.height(), data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::manifest::test_manifest;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn full_background_mask(labels: &[u16], w: u32, h: u32) -> MaskFrame<'_> {
        MaskFrame {
            width: w,
            height: h,
            labels,
        }
    }

    #[test]
    fn disabled_bias_is_all_ones() {
        let m = test_manifest(6, 4, 1, &[]);
        let params = CenterBiasParams {
            enabled: false,
            ..Default::default()
        };
        let bias = center_bias_map(&m, &params);
        assert!(bias.as_slice().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn bias_peaks_at_one_in_the_center() {
        let m = test_manifest(5, 5, 1, &[]);
        let bias = center_bias_map(&m, &CenterBiasParams::default());
        assert_eq!(bias.get(2, 2), 1.0);
        assert!(bias.as_slice().iter().all(|&v| v <= 1.0));
    }

    #[test]
    fn bias_follows_gaussian_at_one_sigma() {
        // width 9 with sigma_x_frac 2/9 puts one sigma exactly 2 px away.
        let m = test_manifest(9, 9, 1, &[]);
        let params = CenterBiasParams {
            enabled: true,
            sigma_x_frac: 2.0 / 9.0,
            sigma_y_frac: 2.0 / 9.0,
        };
        let bias = center_bias_map(&m, &params);
        assert_relative_eq!(bias.get(6, 4), (-0.5f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn bias_symmetric_through_center() {
        let m = test_manifest(7, 5, 1, &[]);
        let bias = center_bias_map(&m, &CenterBiasParams::default());
        for y in 0..5 {
            for x in 0..7 {
                assert_eq!(bias.get(x, y), bias.get(6 - x, 4 - y));
            }
        }
    }

    #[test]
    fn gaussian_peak_value() {
        let m = test_manifest(21, 21, 1, &[]);
        // sigma 0.5 dva at 10 px/dva = 5 px
        let g = gaussian_sensitivity(Point::new(10.0, 10.0), 0.5, &m);
        let sigma_px = 5.0f64;
        let peak = 1.0 / (2.0 * std::f64::consts::PI * sigma_px * sigma_px);
        assert_eq!(g.get(10, 10), peak);
        assert_relative_eq!(
            g.get(15, 10),
            peak * (-0.5f64).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn sigma_conversion_to_pixels() {
        // 6.5 dva at 35 px/dva spans 227.5 px.
        assert_eq!(6.5 * 35.0, 227.5);
    }

    #[test]
    fn background_foveation_keeps_gaussian() {
        let m = test_manifest(4, 4, 1, &[3]);
        let labels = vec![0u16; 16];
        let g = gaussian_sensitivity(Point::new(1.0, 1.0), 1.0, &m);
        let expected = g.clone();
        let field = apply_object_sensitivity(
            g,
            full_background_mask(&labels, 4, 4),
            BACKGROUND,
            7e-8,
            Point::new(1.0, 1.0),
        );
        assert_eq!(field.values, expected);
    }

    #[test]
    fn foveated_object_pixels_become_omega() {
        let m = test_manifest(4, 4, 1, &[3]);
        let mut labels = vec![0u16; 16];
        labels[5] = 3;
        labels[6] = 3;
        let g = gaussian_sensitivity(Point::new(1.0, 1.0), 1.0, &m);
        let field = apply_object_sensitivity(
            g,
            full_background_mask(&labels, 4, 4),
            3,
            7e-8,
            Point::new(1.0, 1.0),
        );
        for (i, &v) in field.values.as_slice().iter().enumerate() {
            if labels[i] == 3 {
                assert_eq!(v, 7e-8);
            } else {
                assert!(v != 7e-8);
            }
        }
    }

    #[test]
    fn full_cover_object_yields_constant_map() {
        let m = test_manifest(3, 3, 1, &[1]);
        let labels = vec![1u16; 9];
        let g = gaussian_sensitivity(Point::new(1.0, 1.0), 1.0, &m);
        let field = apply_object_sensitivity(
            g,
            full_background_mask(&labels, 3, 3),
            1,
            0.5,
            Point::new(1.0, 1.0),
        );
        assert!(field.values.as_slice().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn information_map_identity_and_zero() {
        let m = test_manifest(3, 3, 1, &[]);
        let ones = Grid::filled(3, 3, 1.0);
        let g = gaussian_sensitivity(Point::new(1.0, 1.0), 1.0, &m);
        let field = SensitivityField {
            values: g.clone(),
            gaze: Point::new(1.0, 1.0),
            foveated_id: BACKGROUND,
        };
        let info = information_map(&ones, &ones, &field).unwrap();
        assert_eq!(info, g);

        let zero_field = SensitivityField {
            values: Grid::filled(3, 3, 0.0),
            gaze: Point::new(1.0, 1.0),
            foveated_id: BACKGROUND,
        };
        let info = information_map(&ones, &ones, &zero_field).unwrap();
        assert!(info.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn information_map_shape_mismatch_errors() {
        let ones = Grid::filled(3, 3, 1.0);
        let field = SensitivityField {
            values: Grid::filled(2, 3, 1.0),
            gaze: Point::new(0.0, 0.0),
            foveated_id: BACKGROUND,
        };
        assert!(information_map(&ones, &ones, &field).is_err());
    }

    proptest! {
        #[test]
        fn information_map_matches_elementwise_oracle(
            f in proptest::collection::vec(0.0f64..5.0, 16),
            b in proptest::collection::vec(0.0f64..1.0, 16),
            s in proptest::collection::vec(0.0f64..2.0, 16),
        ) {
            let feature = Grid::from_vec(4, 4, f.clone());
            let bias = Grid::from_vec(4, 4, b.clone());
            let field = SensitivityField {
                values: Grid::from_vec(4, 4, s.clone()),
                gaze: Point::new(0.0, 0.0),
                foveated_id: BACKGROUND,
            };
            let info = information_map(&feature, &bias, &field).unwrap();
            for i in 0..16 {
                prop_assert_eq!(info.as_slice()[i], (f[i] * b[i]) * s[i]);
                prop_assert!(info.as_slice()[i] >= 0.0);
            }
        }

        #[test]
        fn information_map_scales_linearly(
            k in 0.0f64..10.0,
            f in proptest::collection::vec(0.0f64..5.0, 9),
        ) {
            let m = test_manifest(3, 3, 1, &[]);
            let feature = Grid::from_vec(3, 3, f.clone());
            let scaled = Grid::from_vec(3, 3, f.iter().map(|v| k * v).collect());
            let bias = center_bias_map(&m, &CenterBiasParams::default());
            let field = SensitivityField {
                values: gaussian_sensitivity(Point::new(1.0, 1.0), 1.0, &m),
                gaze: Point::new(1.0, 1.0),
                foveated_id: BACKGROUND,
            };
            let base = information_map(&feature, &bias, &field).unwrap();
            let boosted = information_map(&scaled, &bias, &field).unwrap();
            for (a, b) in base.as_slice().iter().zip(boosted.as_slice()) {
                prop_assert!((k * a - b).abs() <= 1e-12 * b.abs().max(1e-300));
            }
        }

        #[test]
        fn sensitivity_pixel_sum_bounded(
            sigma_px in 2.0f64..120.0,
            gx in 0.0f64..31.0,
            gy in 0.0f64..23.0,
            omega in 1e-9f64..1e-2,
        ) {
            // The Gaussian part is a density sampled on the grid, so its
            // pixel sum stays at or below 1 (up to sampling slack) and the
            // override adds at most omega per covered pixel.
            let mut m = test_manifest(32, 24, 1, &[1]);
            m.px_per_dva = 1.0;
            let mut labels = vec![0u16; 32 * 24];
            for i in 0..60 {
                labels[i] = 1;
            }
            let g = gaussian_sensitivity(Point::new(gx, gy), sigma_px, &m);
            let mask = MaskFrame { width: 32, height: 24, labels: &labels };
            let field = apply_object_sensitivity(g, mask, 1, omega, Point::new(gx, gy));
            let sum: f64 = field.values.as_slice().iter().sum();
            prop_assert!(sum <= 1.0 + omega * 60.0 + 1e-6, "sum {sum}");
        }
    }
}
