//! Offline and live scoring plus the error taxonomy.
//!
//! Operation text is `KIND payload`, e.g. `TYPE best seller` or `CLICK`.
//! Op.F1 is a case-insensitive, whitespace-token multiset F1 over it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ActionCommand, Point};
use crate::geom::{check_unit_point, BBox, GeomError};
use crate::sim::{Outcome, Task, Trajectory};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("{preds} predictions for {golds} gold steps")]
    LengthMismatch { preds: usize, golds: usize },
    #[error("trajectory for `{trajectory}` scored against task `{task}`")]
    TaskMismatch { trajectory: String, task: String },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    High,
    Low,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldStep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_id: Option<String>,
    pub gold_action: ActionCommand,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_element_bbox: Option<BBox>,
    /// Derived from `gold_action` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_operation_text: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub equivalent_target_bboxes: Vec<BBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<Level>,
}

impl GoldStep {
    pub fn new(action: ActionCommand, bbox: Option<BBox>) -> Self {
        GoldStep {
            step_id: None,
            gold_action: action,
            gold_element_bbox: bbox,
            gold_operation_text: None,
            equivalent_target_bboxes: Vec::new(),
            level: None,
        }
    }

    pub fn operation_text(&self) -> String {
        self.gold_operation_text
            .clone()
            .filter(|t| !t.trim().is_empty())
            .unwrap_or_else(|| operation_text(&self.gold_action))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredStep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_id: Option<String>,
    pub pred_action: ActionCommand,
}

impl PredStep {
    pub fn new(action: ActionCommand) -> Self {
        PredStep {
            step_id: None,
            pred_action: action,
        }
    }

    pub fn operation_text(&self) -> String {
        operation_text(&self.pred_action)
    }

    pub fn point(&self) -> Option<Point> {
        self.pred_action.target_point()
    }
}

/// Canonical `KIND payload` text of a command.
pub fn operation_text(cmd: &ActionCommand) -> String {
    let with = |kind: &str, payload: &str| {
        if payload.is_empty() {
            kind.to_string()
        } else {
            format!("{kind} {payload}")
        }
    };
    match cmd {
        ActionCommand::Click { .. } => "CLICK".into(),
        ActionCommand::LongPress { .. } => "LONG_PRESS".into(),
        ActionCommand::MoveTo { .. } => "HOVER".into(),
        ActionCommand::DragTo { .. } => "DRAG".into(),
        ActionCommand::Write { message } => with("TYPE", message),
        ActionCommand::SelectOption { value, .. } => with("SELECT", value),
        ActionCommand::Press { key } => with("PRESS", key),
        ActionCommand::Hotkey { keys } => with("HOTKEY", &keys.join(" ")),
        ActionCommand::Scroll { clicks } => with("SCROLL", if *clicks >= 0.0 { "up" } else { "down" }),
        ActionCommand::Swipe { from, to } => {
            let (dx, dy) = (to.x - from.x, to.y - from.y);
            let dir = if dx.abs() > dy.abs() {
                if dx > 0.0 {
                    "right"
                } else {
                    "left"
                }
            } else if dy > 0.0 {
                "down"
            } else {
                "up"
            };
            with("SWIPE", dir)
        }
        ActionCommand::Home => "HOME".into(),
        ActionCommand::Back => "BACK".into(),
        ActionCommand::OpenApp { app_name } => with("OPEN_APP", app_name),
        ActionCommand::Terminate { status } => with("TERMINATE", status),
        ActionCommand::Answer { answer } => with("ANSWER", answer),
        ActionCommand::PluginCall { name, args } => {
            let short = name.rsplit('.').next().unwrap_or(name).to_uppercase();
            let vals: Vec<String> = args
                .iter()
                .filter_map(|(_, v)| v.as_str().map(str::to_string).or(v.as_number().map(|n| n.to_string())))
                .collect();
            with(&short, &vals.join(" "))
        }
    }
}

/// Payload part of an operation text: everything after the kind token.
pub fn operation_payload(text: &str) -> String {
    text.split_whitespace().skip(1).collect::<Vec<_>>().join(" ")
}

pub fn grounding_hit(point: Point, bbox: &BBox) -> Result<bool, MetricsError> {
    check_unit_point(point)?;
    Ok(bbox.contains(point))
}

fn token_counts(text: &str) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for t in text.split_whitespace() {
        *m.entry(t.to_lowercase()).or_insert(0) += 1;
    }
    m
}

pub fn operation_f1(pred: &str, gold: &str) -> f64 {
    let (p, g) = (token_counts(pred), token_counts(gold));
    let (np, ng): (usize, usize) = (p.values().sum(), g.values().sum());
    if np == 0 && ng == 0 {
        return 1.0;
    }
    let overlap: usize = p.iter().map(|(t, c)| (*c).min(g.get(t).copied().unwrap_or(0))).sum();
    if overlap == 0 {
        return 0.0;
    }
    let precision = overlap as f64 / np as f64;
    let recall = overlap as f64 / ng as f64;
    2.0 * precision * recall / (precision + recall)
}

fn element_hit(pred: &PredStep, bbox: &BBox) -> bool {
    pred.point().is_some_and(|p| grounding_hit(p, bbox).unwrap_or(false))
}

pub const DEFAULT_OP_F1_THRESHOLD: f64 = 1.0;

pub fn step_success(pred: &PredStep, gold: &GoldStep) -> bool {
    step_success_with(pred, gold, DEFAULT_OP_F1_THRESHOLD)
}

/// Element hit (when gold has a box), same action class, and payload F1 at
/// or above the threshold.
pub fn step_success_with(pred: &PredStep, gold: &GoldStep, threshold: f64) -> bool {
    let hit = gold.gold_element_bbox.as_ref().is_none_or(|b| element_hit(pred, b));
    let same_class = pred.pred_action.kind().class() == gold.gold_action.kind().class();
    let payload_f1 = operation_f1(
        &operation_payload(&pred.operation_text()),
        &operation_payload(&gold.operation_text()),
    );
    hit && same_class && payload_f1 >= threshold
}

/// A rate with its denominator. `value` is absent when the denominator is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rate {
    pub value: Option<f64>,
    pub denominator: usize,
}

impl Rate {
    fn mean(sum: f64, n: usize) -> Rate {
        Rate {
            value: (n > 0).then(|| sum / n as f64),
            denominator: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub steps: usize,
    pub element_accuracy: Rate,
    pub operation_f1: Rate,
    pub step_sr: Rate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task_sr: Option<Rate>,
    pub step_accuracy_high: Rate,
    pub step_accuracy_low: Rate,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub error_counts: BTreeMap<ErrorClass, usize>,
}

impl MetricReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["metric", "value", "denominator"])
            .expect("in-memory write");
        let mut row = |name: &str, r: &Rate| {
            let v = r.value.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([name, &v, &r.denominator.to_string()])
                .expect("in-memory write");
        };
        row("element_accuracy", &self.element_accuracy);
        row("operation_f1", &self.operation_f1);
        row("step_sr", &self.step_sr);
        if let Some(t) = &self.task_sr {
            row("task_sr", t);
        }
        row("step_accuracy_high", &self.step_accuracy_high);
        row("step_accuracy_low", &self.step_accuracy_low);
        for (class, n) in &self.error_counts {
            w.write_record([&format!("errors_{}", class.as_str()), &n.to_string(), ""])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

pub fn score_offline(preds: &[PredStep], golds: &[GoldStep]) -> Result<MetricReport, MetricsError> {
    score_offline_with(preds, golds, DEFAULT_OP_F1_THRESHOLD)
}

pub fn score_offline_with(
    preds: &[PredStep],
    golds: &[GoldStep],
    threshold: f64,
) -> Result<MetricReport, MetricsError> {
    if preds.len() != golds.len() {
        return Err(MetricsError::LengthMismatch {
            preds: preds.len(),
            golds: golds.len(),
        });
    }
    let (mut hits, mut boxed) = (0.0, 0);
    let mut f1 = 0.0;
    let mut sr = 0.0;
    let (mut high, mut n_high, mut low, mut n_low) = (0.0, 0, 0.0, 0);
    for (p, g) in preds.iter().zip(golds) {
        if let Some(b) = &g.gold_element_bbox {
            boxed += 1;
            if element_hit(p, b) {
                hits += 1.0;
            }
        }
        f1 += operation_f1(&p.operation_text(), &g.operation_text());
        let ok = if step_success_with(p, g, threshold) { 1.0 } else { 0.0 };
        sr += ok;
        match g.level {
            Some(Level::High) => {
                high += ok;
                n_high += 1;
            }
            Some(Level::Low) => {
                low += ok;
                n_low += 1;
            }
            None => {}
        }
    }
    let n = golds.len();
    Ok(MetricReport {
        steps: n,
        element_accuracy: Rate::mean(hits, boxed),
        operation_f1: Rate::mean(f1, n),
        step_sr: Rate::mean(sr, n),
        task_sr: None,
        step_accuracy_high: Rate::mean(high, n_high),
        step_accuracy_low: Rate::mean(low, n_low),
        error_counts: BTreeMap::new(),
    })
}

/// Trimmed, case-insensitive text equality.
pub fn text_equivalent(a: &str, b: &str) -> bool {
    a.trim().to_lowercase() == b.trim().to_lowercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LiveVerdict {
    Pass,
    Fail,
    Unverifiable,
}

/// Point-in-box when the gold box is known; otherwise unverifiable.
pub fn verify_click_live(point: Point, gold_bbox: Option<&BBox>) -> LiveVerdict {
    match gold_bbox {
        None => LiveVerdict::Unverifiable,
        Some(b) if grounding_hit(point, b).unwrap_or(false) => LiveVerdict::Pass,
        Some(_) => LiveVerdict::Fail,
    }
}

pub fn verify_input_live(expected: &str, actual_element_value: &str) -> bool {
    !expected.trim().is_empty() && text_equivalent(expected, actual_element_value)
}

pub fn task_success(trajectory: &Trajectory, task: &Task) -> Result<bool, MetricsError> {
    if trajectory.task_id != task.task_id {
        return Err(MetricsError::TaskMismatch {
            trajectory: trajectory.task_id.clone(),
            task: task.task_id.clone(),
        });
    }
    Ok(trajectory.outcome == Outcome::Success)
}

pub fn task_success_rate(trajectories: &[Trajectory]) -> Rate {
    let ok = trajectories.iter().filter(|t| t.outcome == Outcome::Success).count();
    Rate::mean(ok as f64, trajectories.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorClass {
    Correct,
    Ambiguous,
    Grounding,
    PlanningBonus,
}

impl ErrorClass {
    pub const ALL: [ErrorClass; 4] = [
        ErrorClass::Correct,
        ErrorClass::Ambiguous,
        ErrorClass::Grounding,
        ErrorClass::PlanningBonus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::Correct => "correct",
            ErrorClass::Ambiguous => "ambiguous",
            ErrorClass::Grounding => "grounding",
            ErrorClass::PlanningBonus => "planning_bonus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeOutcomes {
    pub self_plan: bool,
    pub enforced_plan: bool,
}

pub fn classify_error(pred: &PredStep, gold: &GoldStep, outcomes: ModeOutcomes) -> ErrorClass {
    if outcomes.self_plan {
        ErrorClass::Correct
    } else if gold.equivalent_target_bboxes.iter().any(|b| element_hit(pred, b)) {
        ErrorClass::Ambiguous
    } else if outcomes.enforced_plan {
        ErrorClass::PlanningBonus
    } else {
        ErrorClass::Grounding
    }
}

/// Error shares among failed samples, per prompting mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub samples: usize,
    pub counts: BTreeMap<ErrorClass, usize>,
    pub failures: usize,
    /// Under self-plan every non-correct sample is ambiguous or grounding.
    pub self_plan: BTreeMap<ErrorClass, f64>,
    /// Under enforced plan, planning-bonus samples are resolved.
    pub enforced_plan: BTreeMap<ErrorClass, f64>,
}

pub fn error_report(classes: &[ErrorClass]) -> ErrorReport {
    let mut counts: BTreeMap<ErrorClass, usize> = ErrorClass::ALL.iter().map(|c| (*c, 0)).collect();
    for c in classes {
        *counts.get_mut(c).expect("all classes present") += 1;
    }
    let failures = classes.len() - counts[&ErrorClass::Correct];
    let share = |n: usize| if failures == 0 { 0.0 } else { n as f64 / failures as f64 };
    let (amb, gro, bonus) = (
        counts[&ErrorClass::Ambiguous],
        counts[&ErrorClass::Grounding],
        counts[&ErrorClass::PlanningBonus],
    );
    ErrorReport {
        samples: classes.len(),
        failures,
        self_plan: [
            (ErrorClass::Ambiguous, share(amb)),
            (ErrorClass::Grounding, share(gro + bonus)),
        ]
        .into(),
        enforced_plan: [
            (ErrorClass::Ambiguous, share(amb)),
            (ErrorClass::Grounding, share(gro)),
            (ErrorClass::PlanningBonus, share(bonus)),
        ]
        .into(),
        counts,
    }
}
