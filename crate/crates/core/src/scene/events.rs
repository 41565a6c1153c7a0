//! Pre-classified gaze event files.
//!
//! Events arrive as CSV with the header
//! `subject_id,kind,start_frame,end_frame,start_x,start_y,end_x,end_y`.
//! Frames are 0-based; positions are real-valued pixels inside the frame's
//! pixel-center span. A row's `kind` is `foveation` or `saccade`, and per
//! subject the kinds must strictly alternate in time order. Extra columns
//! (e.g. from simulator scanpath files) are ignored, so the same reader
//! handles ground-truth recordings and model output.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::scene::manifest::SceneManifest;
use crate::scene::SceneError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Foveation,
    Saccade,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct EventRecord {
    pub subject_id: String,
    pub kind: EventKind,
    pub start_frame: u32,
    pub end_frame: u32,
    pub start_x: f64,
    pub start_y: f64,
    pub end_x: f64,
    pub end_y: f64,
}

/// One subject's (or one simulated run's) time-ordered event sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectEvents {
    pub subject_id: String,
    pub events: Vec<EventRecord>,
}

/// Events of one file, grouped by subject in order of first appearance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventList {
    pub subjects: Vec<SubjectEvents>,
}

impl EventList {
    pub fn n_events(&self) -> usize {
        self.subjects.iter().map(|s| s.events.len()).sum()
    }
}

pub fn read_events(path: &Path, manifest: &SceneManifest) -> Result<EventList, SceneError> {
    let events_err = |row: usize, message: String| SceneError::Events {
        path: path.display().to_string(),
        row,
        message,
    };

    let mut reader = csv::Reader::from_path(path).map_err(|e| SceneError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    })?;

    let mut list = EventList::default();
    for (i, record) in reader.deserialize::<EventRecord>().enumerate() {
        let row = i + 2; // 1-based, after the header line
        let record = record.map_err(|e| events_err(row, format!("unparseable row: {e}")))?;
        validate_record(&record, manifest).map_err(|m| events_err(row, m))?;

        let subject = match list
            .subjects
            .iter_mut()
            .find(|s| s.subject_id == record.subject_id)
        {
            Some(s) => s,
            None => {
                list.subjects.push(SubjectEvents {
                    subject_id: record.subject_id.clone(),
                    events: Vec::new(),
                });
                list.subjects.last_mut().unwrap()
            }
        };

        if let Some(prev) = subject.events.last() {
            if prev.kind == record.kind {
                return Err(events_err(
                    row,
                    format!(
                        "two consecutive {:?} events for subject {}",
                        record.kind, record.subject_id
                    ),
                ));
            }
            if record.start_frame < prev.end_frame {
                return Err(events_err(
                    row,
                    format!(
                        "event starts at frame {} before the previous event ended at {}",
                        record.start_frame, prev.end_frame
                    ),
                ));
            }
        }
        subject.events.push(record);
    }
    Ok(list)
}

fn validate_record(record: &EventRecord, manifest: &SceneManifest) -> Result<(), String> {
    if record.end_frame < record.start_frame {
        return Err(format!(
            "end_frame {} precedes start_frame {}",
            record.end_frame, record.start_frame
        ));
    }
    if record.end_frame >= manifest.n_frames {
        return Err(format!(
            "end_frame {} outside the video's {} frames",
            record.end_frame, manifest.n_frames
        ));
    }
    let max_x = (manifest.width_px - 1) as f64;
    let max_y = (manifest.height_px - 1) as f64;
    for (name, value, max) in [
        ("start_x", record.start_x, max_x),
        ("end_x", record.end_x, max_x),
        ("start_y", record.start_y, max_y),
        ("end_y", record.end_y, max_y),
    ] {
        if !value.is_finite() || value < 0.0 || value > max {
            return Err(format!("position {name} = {value} outside frame bounds"));
        }
    }
    Ok(())
}
