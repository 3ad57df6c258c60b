//! Conversion of heterogeneous dataset steps into unified commands.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::GroundingExample;
use crate::action::{ActionCommand, Platform, Point};
use crate::geom::{check_unit_point, BBox};

pub const DEFAULT_SCROLL_CLICKS: f64 = 10.0;
pub const DEFAULT_SWIPE_DISTANCE: f64 = 0.3;

/// Where a source action lands: an element box or a bare point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Element { bbox: BBox },
    Point { point: [f64; 2] },
}

impl Target {
    pub fn point(&self) -> Point {
        match self {
            Target::Element { bbox } => bbox.center(),
            Target::Point { point } => Point::new(point[0], point[1]),
        }
    }
}

/// One step of a platform-native dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_id: Option<String>,
    pub image_ref: String,
    #[serde(default)]
    pub instruction: String,
    pub action_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<Target>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amount: Option<f64>,
    #[serde(default)]
    pub source: String,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum UnifyError {
    #[error("unmappable `{action_type}`: {reason}")]
    UnmappableAction { action_type: String, reason: String },
}

fn unmappable(rec: &SourceRecord, reason: impl Into<String>) -> UnifyError {
    UnifyError::UnmappableAction {
        action_type: rec.action_type.clone(),
        reason: reason.into(),
    }
}

fn target_point(rec: &SourceRecord, t: Option<&Target>, what: &str) -> Result<Point, UnifyError> {
    let p = t.ok_or_else(|| unmappable(rec, format!("missing {what}")))?.point();
    check_unit_point(p).map_err(|e| unmappable(rec, e.to_string()))?;
    Ok(p)
}

fn text_payload(rec: &SourceRecord) -> Result<String, UnifyError> {
    rec.text
        .clone()
        .filter(|t| !t.is_empty())
        .ok_or_else(|| unmappable(rec, "missing text payload"))
}

fn swipe_from(rec: &SourceRecord, start: Point, direction: &str) -> Result<ActionCommand, UnifyError> {
    let d = rec.amount.unwrap_or(DEFAULT_SWIPE_DISTANCE);
    let (dx, dy) = match direction {
        "up" => (0.0, -d),
        "down" => (0.0, d),
        "left" => (-d, 0.0),
        "right" => (d, 0.0),
        other => return Err(unmappable(rec, format!("unknown direction `{other}`"))),
    };
    let to = Point::new((start.x + dx).clamp(0.0, 1.0), (start.y + dy).clamp(0.0, 1.0));
    Ok(ActionCommand::Swipe { from: start, to })
}

fn opposite(direction: &str) -> &str {
    match direction {
        "up" => "down",
        "down" => "up",
        "left" => "right",
        "right" => "left",
        other => other,
    }
}

fn map_action(rec: &SourceRecord, platform: Platform) -> Result<ActionCommand, UnifyError> {
    let kind = rec.action_type.trim().to_ascii_lowercase().replace(['-', ' '], "_");
    let mobile = platform == Platform::Mobile;
    let direction = rec.direction.as_deref().map(str::to_ascii_lowercase);
    let cmd = match kind.as_str() {
        "tap" | "click" => {
            let p = target_point(rec, rec.target.as_ref(), "target")?;
            ActionCommand::Click { x: p.x, y: p.y }
        }
        "long_press" | "long_click" => {
            let p = target_point(rec, rec.target.as_ref(), "target")?;
            ActionCommand::LongPress { x: p.x, y: p.y }
        }
        "hover" | "move" | "move_to" => {
            let p = target_point(rec, rec.target.as_ref(), "target")?;
            ActionCommand::MoveTo { x: p.x, y: p.y }
        }
        "type" | "input_text" | "input" | "write" => ActionCommand::Write {
            message: text_payload(rec)?,
        },
        "select" | "select_option" => {
            let p = target_point(rec, rec.target.as_ref(), "target")?;
            ActionCommand::SelectOption {
                x: p.x,
                y: p.y,
                value: text_payload(rec)?,
            }
        }
        "scroll" => {
            let dir = direction.ok_or_else(|| unmappable(rec, "missing scroll direction"))?;
            if mobile {
                let start = match rec.target {
                    Some(t) => target_point(rec, Some(&t), "target")?,
                    None => Point::new(0.5, 0.5),
                };
                // Content moves opposite to the finger.
                swipe_from(rec, start, opposite(&dir))?
            } else {
                let n = rec.amount.unwrap_or(DEFAULT_SCROLL_CLICKS).abs();
                match dir.as_str() {
                    "up" => ActionCommand::Scroll { clicks: n },
                    "down" => ActionCommand::Scroll { clicks: -n },
                    other => return Err(unmappable(rec, format!("no horizontal scroll for `{other}`"))),
                }
            }
        }
        "swipe" => {
            let from = target_point(rec, rec.target.as_ref(), "start point")?;
            match (&rec.end, direction) {
                (Some(end), _) => ActionCommand::Swipe {
                    from,
                    to: target_point(rec, Some(end), "end point")?,
                },
                (None, Some(dir)) => swipe_from(rec, from, &dir)?,
                (None, None) => return Err(unmappable(rec, "swipe needs an end point or direction")),
            }
        }
        "drag" | "drag_to" => {
            let to = target_point(rec, rec.end.as_ref(), "end point")?;
            ActionCommand::DragTo { x: to.x, y: to.y }
        }
        "press" | "key" | "press_key" | "keypress" => {
            let text = text_payload(rec)?;
            let keys: Vec<String> = text.split('+').map(|k| k.trim().to_ascii_lowercase()).collect();
            if keys.iter().any(String::is_empty) {
                return Err(unmappable(rec, format!("bad key spec `{text}`")));
            }
            if keys.len() > 1 {
                ActionCommand::Hotkey { keys }
            } else if text.trim().chars().count() == 1 {
                ActionCommand::Press {
                    key: text.trim().to_string(),
                }
            } else {
                ActionCommand::Press { key: keys[0].clone() }
            }
        }
        "back" | "navigate_back" | "press_back" if mobile => ActionCommand::Back,
        "home" | "navigate_home" | "press_home" if mobile => ActionCommand::Home,
        "open_app" | "launch_app" if mobile => ActionCommand::OpenApp {
            app_name: text_payload(rec)?,
        },
        "answer" => ActionCommand::Answer {
            answer: text_payload(rec)?,
        },
        "complete" | "status_complete" | "finish" | "done" => ActionCommand::Terminate {
            status: "success".into(),
        },
        "back" | "navigate_back" | "press_back" | "home" | "navigate_home" | "press_home" | "open_app"
        | "launch_app" => return Err(unmappable(rec, "mobile-only action on a non-mobile platform")),
        "infeasible" | "wait" => return Err(unmappable(rec, "no equivalent in the unified action space")),
        _ => return Err(unmappable(rec, "unknown action type")),
    };
    Ok(cmd)
}

pub fn unify_record(rec: &SourceRecord, platform: Platform) -> Result<GroundingExample, UnifyError> {
    let action = map_action(rec, platform)?;
    Ok(GroundingExample {
        image_ref: rec.image_ref.clone(),
        instruction: rec.instruction.clone(),
        action,
        source: rec.source.clone(),
        template_id: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Unmappable {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_id: Option<String>,
    pub action_type: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct UnifyReport {
    pub examples: Vec<GroundingExample>,
    pub unmappable: Vec<Unmappable>,
}

impl UnifyReport {
    pub fn total(&self) -> usize {
        self.examples.len() + self.unmappable.len()
    }
}

pub fn unify_batch(records: &[SourceRecord], platform: Platform) -> UnifyReport {
    let mut report = UnifyReport::default();
    for (index, rec) in records.iter().enumerate() {
        match unify_record(rec, platform) {
            Ok(ex) => report.examples.push(ex),
            Err(UnifyError::UnmappableAction { action_type, reason }) => report.unmappable.push(Unmappable {
                index,
                record_id: rec.record_id.clone(),
                action_type,
                reason,
            }),
        }
    }
    report
}
