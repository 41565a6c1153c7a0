//! Simulated scanpaths and their CSV interface.
//!
//! A scanpath alternates foveations and saccades, starting with a foveation.
//! Saccades are instantaneous: the trigger frame closes the foveation, gaze
//! teleports to the landing position, and the next foveation starts on the
//! following frame. The CSV schema extends the ground-truth event schema
//! with `target_id`, `amplitude_dva`, `direction_rad` (blank on foveation
//! rows), `run_seed`, and `model`, so evaluation tooling reads both formats.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::evidence::OptionId;
use crate::grid::Point;
use crate::scene::events::{EventKind, EventRecord, SubjectEvents};
use crate::scene::SceneError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[serde(rename = "objectddm")]
    ObjectDdm,
    Baseline,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::ObjectDdm => "objectddm",
            ModelKind::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoveationEvent {
    pub start_frame: u32,
    pub end_frame: u32,
    pub entry: Point,
    pub exit: Point,
    pub option_id: OptionId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaccadeEvent {
    /// Frame whose accumulator step triggered the saccade; gaze is at
    /// `from` during this frame and at the landing from the next frame on.
    pub frame: u32,
    pub from: Point,
    pub to: Point,
    pub target_id: OptionId,
    pub amplitude_dva: f64,
    pub direction_rad: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanEvent {
    Foveation(FoveationEvent),
    Saccade(SaccadeEvent),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scanpath {
    pub video_id: String,
    pub model: ModelKind,
    pub run_seed: u64,
    pub events: Vec<ScanEvent>,
}

impl Scanpath {
    pub fn saccades(&self) -> impl Iterator<Item = &SaccadeEvent> {
        self.events.iter().filter_map(|e| match e {
            ScanEvent::Saccade(s) => Some(s),
            _ => None,
        })
    }

    pub fn foveations(&self) -> impl Iterator<Item = &FoveationEvent> {
        self.events.iter().filter_map(|e| match e {
            ScanEvent::Foveation(f) => Some(f),
            _ => None,
        })
    }

    pub fn n_saccades(&self) -> usize {
        self.saccades().count()
    }

    /// Checks the structural invariants: alternation starting with a
    /// foveation, and each saccade launching from the previous foveation's
    /// exit position.
    pub fn check_alternation(&self) -> Result<(), String> {
        let mut previous_exit: Option<Point> = None;
        for (i, event) in self.events.iter().enumerate() {
            match (i % 2 == 0, event) {
                (true, ScanEvent::Foveation(f)) => {
                    if f.end_frame < f.start_frame {
                        return Err(format!("foveation {i} ends before it starts"));
                    }
                    previous_exit = Some(f.exit);
                }
                (false, ScanEvent::Saccade(s)) => {
                    if previous_exit != Some(s.from) {
                        return Err(format!(
                            "saccade {i} does not launch from the previous exit"
                        ));
                    }
                }
                _ => return Err(format!("event {i} breaks foveation/saccade alternation")),
            }
        }
        Ok(())
    }

    /// Re-expresses the scanpath in the ground-truth event schema, i.e. the
    /// exact values a CSV round trip would produce.
    pub fn to_subject_events(&self, subject_id: &str) -> SubjectEvents {
        let events = self
            .events
            .iter()
            .map(|event| match *event {
                ScanEvent::Foveation(f) => EventRecord {
                    subject_id: subject_id.to_string(),
                    kind: EventKind::Foveation,
                    start_frame: f.start_frame,
                    end_frame: f.end_frame,
                    start_x: f.entry.x,
                    start_y: f.entry.y,
                    end_x: f.exit.x,
                    end_y: f.exit.y,
                },
                ScanEvent::Saccade(s) => EventRecord {
                    subject_id: subject_id.to_string(),
                    kind: EventKind::Saccade,
                    start_frame: s.frame,
                    end_frame: s.frame,
                    start_x: s.from.x,
                    start_y: s.from.y,
                    end_x: s.to.x,
                    end_y: s.to.y,
                },
            })
            .collect();
        SubjectEvents {
            subject_id: subject_id.to_string(),
            events,
        }
    }

    pub fn write_csv(&self, path: &Path, subject_id: &str) -> Result<(), SceneError> {
        let io_err = |source: std::io::Error| SceneError::Io {
            path: path.display().to_string(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io_err)?;
        let mut w = std::io::BufWriter::new(file);
        writeln!(
            w,
            "subject_id,kind,start_frame,end_frame,start_x,start_y,end_x,end_y,\
             target_id,amplitude_dva,direction_rad,run_seed,model"
        )
        .map_err(io_err)?;
        for event in &self.events {
            match *event {
                ScanEvent::Foveation(f) => writeln!(
                    w,
                    "{subject_id},foveation,{},{},{},{},{},{},,,,{},{}",
                    f.start_frame,
                    f.end_frame,
                    f.entry.x,
                    f.entry.y,
                    f.exit.x,
                    f.exit.y,
                    self.run_seed,
                    self.model.as_str()
                )
                .map_err(io_err)?,
                ScanEvent::Saccade(s) => writeln!(
                    w,
                    "{subject_id},saccade,{},{},{},{},{},{},{},{},{},{},{}",
                    s.frame,
                    s.frame,
                    s.from.x,
                    s.from.y,
                    s.to.x,
                    s.to.y,
                    s.target_id,
                    s.amplitude_dva,
                    s.direction_rad,
                    self.run_seed,
                    self.model.as_str()
                )
                .map_err(io_err)?,
            }
        }
        w.flush().map_err(io_err)
    }
}

/// Saccade direction angle in `(-pi, pi]`: 0 points rightward and +pi/2
/// upward (screen y grows downward, hence the flipped dy).
pub fn direction_rad(from: Point, to: Point) -> f64 {
    let angle = (-(to.y - from.y)).atan2(to.x - from.x);
    if angle == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        angle
    }
}
