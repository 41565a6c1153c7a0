//! Feature-map and object-mask raster files.
//!
//! Both kinds share one little-endian binary layout:
//!
//! | bytes | content                          |
//! |-------|----------------------------------|
//! | 4     | magic `ODDM`                     |
//! | 1     | version, currently 1             |
//! | 1     | kind: 1 = feature/f32, 2 = mask/u16 |
//! | 4     | width (u32)                      |
//! | 4     | height (u32)                     |
//! | 4     | n_frames (u32)                   |
//! | rest  | payload, frame-major, row-major, no padding |
//!
//! Feature values must be finite and non-negative. Mask labels must be 0
//! (background) or an object id declared in the manifest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::scene::manifest::SceneManifest;
use crate::scene::SceneError;

pub const RASTER_MAGIC: [u8; 4] = *b"ODDM";
pub const RASTER_VERSION: u8 = 1;
pub const KIND_FEATURE: u8 = 1;
pub const KIND_MASK: u8 = 2;

const HEADER_LEN: usize = 4 + 1 + 1 + 4 + 4 + 4;

/// Borrowed view of one mask frame.
#[derive(Debug, Clone, Copy)]
pub struct MaskFrame<'a> {
    pub width: u32,
    pub height: u32,
    pub labels: &'a [u16],
}

impl<'a> MaskFrame<'a> {
    #[inline]
    pub fn label(&self, x: u32, y: u32) -> u16 {
        self.labels[y as usize * self.width as usize + x as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRaster {
    pub width: u32,
    pub height: u32,
    pub n_frames: u32,
    values: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskRaster {
    pub width: u32,
    pub height: u32,
    pub n_frames: u32,
    labels: Vec<u16>,
}

struct RasterHeader {
    kind: u8,
    width: u32,
    height: u32,
    n_frames: u32,
}

fn io_err(path: &Path, source: std::io::Error) -> SceneError {
    SceneError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn raster_err(path: &Path, message: impl Into<String>) -> SceneError {
    SceneError::Raster {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn read_header(reader: &mut impl Read, path: &Path) -> Result<RasterHeader, SceneError> {
    let mut buf = [0u8; HEADER_LEN];
    reader.read_exact(&mut buf).map_err(|e| io_err(path, e))?;
    if buf[0..4] != RASTER_MAGIC {
        return Err(raster_err(path, "bad magic, not an ODDM raster"));
    }
    if buf[4] != RASTER_VERSION {
        return Err(raster_err(path, format!("unsupported version {}", buf[4])));
    }
    Ok(RasterHeader {
        kind: buf[5],
        width: u32::from_le_bytes(buf[6..10].try_into().unwrap()),
        height: u32::from_le_bytes(buf[10..14].try_into().unwrap()),
        n_frames: u32::from_le_bytes(buf[14..18].try_into().unwrap()),
    })
}

fn check_header(
    header: &RasterHeader,
    expected_kind: u8,
    manifest: &SceneManifest,
    path: &Path,
) -> Result<(), SceneError> {
    if header.kind != expected_kind {
        return Err(raster_err(
            path,
            format!("kind {} does not match expected {expected_kind}", header.kind),
        ));
    }
    if header.width != manifest.width_px
        || header.height != manifest.height_px
        || header.n_frames != manifest.n_frames
    {
        return Err(raster_err(
            path,
            format!(
                "dimensions {}x{}x{} do not match manifest {}x{}x{}",
                header.width,
                header.height,
                header.n_frames,
                manifest.width_px,
                manifest.height_px,
                manifest.n_frames
            ),
        ));
    }
    Ok(())
}

fn write_header(
    writer: &mut impl Write,
    kind: u8,
    width: u32,
    height: u32,
    n_frames: u32,
) -> std::io::Result<()> {
    writer.write_all(&RASTER_MAGIC)?;
    writer.write_all(&[RASTER_VERSION, kind])?;
    writer.write_all(&width.to_le_bytes())?;
    writer.write_all(&height.to_le_bytes())?;
    writer.write_all(&n_frames.to_le_bytes())?;
    Ok(())
}

/// Payload cell count, erroring out on overflow instead of truncating.
fn cell_count(width: u32, height: u32, n_frames: u32, path: &Path) -> Result<usize, SceneError> {
    (width as usize)
        .checked_mul(height as usize)
        .and_then(|px| px.checked_mul(n_frames as usize))
        .ok_or_else(|| raster_err(path, "raster dimensions overflow"))
}

fn read_payload(reader: &mut impl Read, bytes: usize, path: &Path) -> Result<Vec<u8>, SceneError> {
    let mut payload = vec![0u8; bytes];
    reader
        .read_exact(&mut payload)
        .map_err(|e| io_err(path, e))?;
    let mut probe = [0u8; 1];
    match reader.read(&mut probe).map_err(|e| io_err(path, e))? {
        0 => Ok(payload),
        _ => Err(raster_err(path, "payload larger than header dimensions")),
    }
}

impl FeatureRaster {
    /// Build from an in-memory value buffer, applying the same validation as
    /// the file reader.
    pub fn from_values(
        width: u32,
        height: u32,
        n_frames: u32,
        values: Vec<f32>,
    ) -> Result<Self, SceneError> {
        let path = Path::new("<memory>");
        let cells = cell_count(width, height, n_frames, path)?;
        if values.len() != cells {
            return Err(raster_err(path, "value buffer does not match dimensions"));
        }
        let raster = Self {
            width,
            height,
            n_frames,
            values,
        };
        raster.check_values(path)?;
        Ok(raster)
    }

    pub fn read(path: &Path, manifest: &SceneManifest) -> Result<Self, SceneError> {
        let mut reader = BufReader::new(File::open(path).map_err(|e| io_err(path, e))?);
        let header = read_header(&mut reader, path)?;
        check_header(&header, KIND_FEATURE, manifest, path)?;
        let cells = cell_count(header.width, header.height, header.n_frames, path)?;
        let payload = read_payload(&mut reader, cells * 4, path)?;
        let values: Vec<f32> = payload
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        let raster = Self {
            width: header.width,
            height: header.height,
            n_frames: header.n_frames,
            values,
        };
        raster.check_values(path)?;
        Ok(raster)
    }

    pub fn write(&self, path: &Path) -> Result<(), SceneError> {
        let mut writer = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
        write_header(
            &mut writer,
            KIND_FEATURE,
            self.width,
            self.height,
            self.n_frames,
        )
        .map_err(|e| io_err(path, e))?;
        for value in &self.values {
            writer
                .write_all(&value.to_le_bytes())
                .map_err(|e| io_err(path, e))?;
        }
        writer.flush().map_err(|e| io_err(path, e))
    }

    pub fn frame(&self, t: u32) -> &[f32] {
        let px = self.width as usize * self.height as usize;
        let start = t as usize * px;
        &self.values[start..start + px]
    }

    fn check_values(&self, path: &Path) -> Result<(), SceneError> {
        let px = self.width as usize * self.height as usize;
        for (i, &v) in self.values.iter().enumerate() {
            if !v.is_finite() {
                let (frame, y, x) = split_index(i, px, self.width);
                return Err(SceneError::NonFiniteValue {
                    path: path.display().to_string(),
                    frame,
                    y,
                    x,
                });
            }
            if v < 0.0 {
                let (frame, y, x) = split_index(i, px, self.width);
                return Err(SceneError::NegativeValue {
                    path: path.display().to_string(),
                    frame,
                    y,
                    x,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn check_dimensions(
        &self,
        manifest: &SceneManifest,
        path: &str,
    ) -> Result<(), SceneError> {
        if self.width != manifest.width_px
            || self.height != manifest.height_px
            || self.n_frames != manifest.n_frames
        {
            return Err(SceneError::Raster {
                path: path.to_string(),
                message: "feature raster dimensions do not match manifest".to_string(),
            });
        }
        Ok(())
    }
}

impl MaskRaster {
    pub fn from_labels(
        width: u32,
        height: u32,
        n_frames: u32,
        labels: Vec<u16>,
        manifest: &SceneManifest,
    ) -> Result<Self, SceneError> {
        let path = Path::new("<memory>");
        let cells = cell_count(width, height, n_frames, path)?;
        if labels.len() != cells {
            return Err(raster_err(path, "label buffer does not match dimensions"));
        }
        let raster = Self {
            width,
            height,
            n_frames,
            labels,
        };
        raster.check_labels(manifest, "<memory>")?;
        Ok(raster)
    }

    pub fn read(path: &Path, manifest: &SceneManifest) -> Result<Self, SceneError> {
        let mut reader = BufReader::new(File::open(path).map_err(|e| io_err(path, e))?);
        let header = read_header(&mut reader, path)?;
        check_header(&header, KIND_MASK, manifest, path)?;
        let cells = cell_count(header.width, header.height, header.n_frames, path)?;
        let payload = read_payload(&mut reader, cells * 2, path)?;
        let labels: Vec<u16> = payload
            .chunks_exact(2)
            .map(|b| u16::from_le_bytes(b.try_into().unwrap()))
            .collect();
        let raster = Self {
            width: header.width,
            height: header.height,
            n_frames: header.n_frames,
            labels,
        };
        raster.check_labels(manifest, &path.display().to_string())?;
        Ok(raster)
    }

    pub fn write(&self, path: &Path) -> Result<(), SceneError> {
        let mut writer = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
        write_header(
            &mut writer,
            KIND_MASK,
            self.width,
            self.height,
            self.n_frames,
        )
        .map_err(|e| io_err(path, e))?;
        for label in &self.labels {
            writer
                .write_all(&label.to_le_bytes())
                .map_err(|e| io_err(path, e))?;
        }
        writer.flush().map_err(|e| io_err(path, e))
    }

    pub fn frame(&self, t: u32) -> MaskFrame<'_> {
        let px = self.width as usize * self.height as usize;
        let start = t as usize * px;
        MaskFrame {
            width: self.width,
            height: self.height,
            labels: &self.labels[start..start + px],
        }
    }

    pub(crate) fn check_dimensions(
        &self,
        manifest: &SceneManifest,
        path: &str,
    ) -> Result<(), SceneError> {
        if self.width != manifest.width_px
            || self.height != manifest.height_px
            || self.n_frames != manifest.n_frames
        {
            return Err(SceneError::Raster {
                path: path.to_string(),
                message: "mask raster dimensions do not match manifest".to_string(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_labels(
        &self,
        manifest: &SceneManifest,
        path: &str,
    ) -> Result<(), SceneError> {
        let mut declared = vec![false; u16::MAX as usize + 1];
        declared[0] = true;
        for obj in &manifest.object_ids {
            declared[obj.id as usize] = true;
        }
        let px = self.width as usize * self.height as usize;
        for (i, &label) in self.labels.iter().enumerate() {
            if !declared[label as usize] {
                return Err(SceneError::UnknownLabel {
                    path: path.to_string(),
                    label,
                    frame: (i / px) as u32,
                });
            }
        }
        Ok(())
    }
}

fn split_index(i: usize, px_per_frame: usize, width: u32) -> (u32, u32, u32) {
    let frame = i / px_per_frame;
    let in_frame = i % px_per_frame;
    (
        frame as u32,
        (in_frame / width as usize) as u32,
        (in_frame % width as usize) as u32,
    )
}
