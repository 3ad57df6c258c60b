//! A deterministic GUI world and an episode runner.
//!
//! Screens are element metadata rather than pixels. Transitions map
//! `(screen, element, action kind)` to exactly one [`Effect`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use thiserror::Error;

use crate::action::{ActionKind, FunctionRegistry, Platform, Point, Violation};
use crate::forge::{ElementMeta, Role};
use crate::geom::{check_unit_point, GeomError};

mod runner;

pub use runner::{
    apply_action, run_episode, run_episode_with, EpisodeState, FnPolicy, NoiseConfig, Observation, Outcome, Policy,
    RunOptions, ScriptedPolicy, Step, Trajectory,
};

pub const DEFAULT_DIMENSIONS: (u32, u32) = (1280, 720);

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("world schema: {0}")]
    Schema(String),
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("invalid action: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidAction(Vec<Violation>),
    #[error("write with no focused input")]
    NoFocus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Screen {
    pub screen_id: String,
    /// z-order: later elements are drawn on top.
    pub elements: Vec<ElementMeta>,
    #[serde(default = "default_dimensions")]
    pub dimensions: (u32, u32),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focus: Option<String>,
}

fn default_dimensions() -> (u32, u32) {
    DEFAULT_DIMENSIONS
}

impl Screen {
    pub fn element(&self, id: &str) -> Option<&ElementMeta> {
        self.elements.iter().find(|e| e.element_id == id)
    }

    fn element_mut(&mut self, id: &str) -> Option<&mut ElementMeta> {
        self.elements.iter_mut().find(|e| e.element_id == id)
    }

    /// Normalized point to pixel coordinates on this screen.
    pub fn to_pixels(&self, p: Point) -> (u32, u32) {
        let (w, h) = self.dimensions;
        let px = (p.x * f64::from(w)).round().min(f64::from(w.saturating_sub(1)));
        let py = (p.y * f64::from(h)).round().min(f64::from(h.saturating_sub(1)));
        (px as u32, py as u32)
    }

    pub fn from_pixels(&self, px: u32, py: u32) -> Point {
        let (w, h) = self.dimensions;
        Point::new(f64::from(px) / f64::from(w.max(1)), f64::from(py) / f64::from(h.max(1)))
    }
}

/// Topmost element whose closed bbox contains the point.
pub fn hit_test(screen: &Screen, x: f64, y: f64) -> Result<Option<&str>, SimError> {
    let p = Point::new(x, y);
    check_unit_point(p)?;
    Ok(screen
        .elements
        .iter()
        .rev()
        .find(|e| e.bbox.contains(p))
        .map(|e| e.element_id.as_str()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "effect", rename_all = "snake_case")]
pub enum Effect {
    GoTo {
        screen: String,
    },
    /// Replaces the element's `value` attribute; when `value` is absent the
    /// text payload of the triggering action is used.
    SetValue {
        element: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<String>,
    },
    Toggle {
        element: String,
        attribute: String,
    },
    /// Input focus moved to the element.
    Focus {
        element: String,
    },
    NoOp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predicate {
    ReachScreen {
        screen: String,
    },
    ElementValueEquals {
        screen: String,
        element: String,
        value: String,
    },
    AnswerEquals {
        answer: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub task_id: String,
    pub goal: String,
    pub success: Predicate,
    pub max_steps: usize,
}

/// Transition document form. `element` is absent for screen-level actions
/// such as `back` or `press`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub screen: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    pub action: String,
    pub effect: Effect,
}

pub type TransitionKey = (String, Option<String>, ActionKind);

#[derive(Debug, Clone)]
pub struct World {
    pub screens: BTreeMap<String, Screen>,
    pub transitions: BTreeMap<TransitionKey, Effect>,
    pub tasks: Vec<Task>,
    pub initial: String,
    pub registry: FunctionRegistry,
}

/// Snake-case key used for action kinds in world documents.
pub fn kind_key(kind: ActionKind) -> &'static str {
    match kind {
        ActionKind::MoveTo => "move_to",
        ActionKind::Click => "click",
        ActionKind::Write => "write",
        ActionKind::Press => "press",
        ActionKind::Hotkey => "hotkey",
        ActionKind::Scroll => "scroll",
        ActionKind::DragTo => "drag_to",
        ActionKind::SelectOption => "select_option",
        ActionKind::Swipe => "swipe",
        ActionKind::Home => "home",
        ActionKind::Back => "back",
        ActionKind::OpenApp => "open_app",
        ActionKind::LongPress => "long_press",
        ActionKind::Terminate => "terminate",
        ActionKind::Answer => "answer",
        ActionKind::PluginCall => "plugin",
    }
}

fn kind_from_key(key: &str) -> Option<ActionKind> {
    ActionKind::BUILTIN.into_iter().find(|k| kind_key(*k) == key)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldDoc {
    screens: Vec<Screen>,
    #[serde(default)]
    transitions: Vec<Transition>,
    #[serde(default)]
    tasks: Vec<Task>,
    initial: String,
    #[serde(default)]
    registry: Option<Box<RawValue>>,
}

fn load_registry(raw: Option<&RawValue>) -> Result<FunctionRegistry, SimError> {
    let Some(raw) = raw else {
        return Ok(FunctionRegistry::new(Platform::Custom, true));
    };
    if let Ok(name) = serde_json::from_str::<String>(raw.get()) {
        return FunctionRegistry::preset(&name)
            .ok_or_else(|| SimError::Schema(format!("unknown registry preset `{name}`")));
    }
    FunctionRegistry::from_json(raw.get()).map_err(|e| SimError::Schema(e.to_string()))
}

pub fn load_world(document: &str) -> Result<World, SimError> {
    let doc: WorldDoc = serde_json::from_str(document).map_err(|e| SimError::Schema(e.to_string()))?;
    if doc.screens.is_empty() {
        return Err(SimError::Schema("world has no screens".into()));
    }
    let dangling = |s: String| Err(SimError::DanglingReference(s));
    let mut screens = BTreeMap::new();
    for screen in doc.screens {
        let mut ids = BTreeSet::new();
        for el in &screen.elements {
            if !ids.insert(el.element_id.as_str()) {
                return Err(SimError::Schema(format!(
                    "duplicate element `{}` on `{}`",
                    el.element_id, screen.screen_id
                )));
            }
        }
        if let Some(f) = &screen.focus {
            if !ids.contains(f.as_str()) {
                return dangling(format!("focus `{f}` on `{}`", screen.screen_id));
            }
        }
        let id = screen.screen_id.clone();
        if screens.insert(id.clone(), screen).is_some() {
            return Err(SimError::Schema(format!("duplicate screen `{id}`")));
        }
    }
    if !screens.contains_key(&doc.initial) {
        return dangling(format!("initial screen `{}`", doc.initial));
    }
    let mut transitions = BTreeMap::new();
    for t in doc.transitions {
        let Some(screen) = screens.get(&t.screen) else {
            return dangling(format!("transition from screen `{}`", t.screen));
        };
        if let Some(el) = &t.element {
            if screen.element(el).is_none() {
                return dangling(format!("transition on `{}`/`{el}`", t.screen));
            }
        }
        match &t.effect {
            Effect::GoTo { screen: to } if !screens.contains_key(to) => {
                return dangling(format!("transition to screen `{to}`"));
            }
            Effect::SetValue { element, .. } | Effect::Toggle { element, .. } | Effect::Focus { element } => {
                let Some(target) = screen.element(element) else {
                    return dangling(format!("effect target `{}`/`{element}`", t.screen));
                };
                if matches!(t.effect, Effect::SetValue { .. }) && target.role != Role::Input {
                    return Err(SimError::Schema(format!("SetValue target `{element}` is not an input")));
                }
            }
            _ => {}
        }
        let kind =
            kind_from_key(&t.action).ok_or_else(|| SimError::Schema(format!("unknown action `{}`", t.action)))?;
        let key = (t.screen.clone(), t.element.clone(), kind);
        if transitions.insert(key, t.effect).is_some() {
            return Err(SimError::Schema(format!(
                "duplicate transition `{}`/{:?}/{}",
                t.screen, t.element, t.action
            )));
        }
    }
    let mut task_ids = BTreeSet::new();
    for task in &doc.tasks {
        if !task_ids.insert(task.task_id.as_str()) {
            return Err(SimError::Schema(format!("duplicate task `{}`", task.task_id)));
        }
        if task.max_steps == 0 {
            return Err(SimError::Schema(format!("task `{}` has max_steps 0", task.task_id)));
        }
        match &task.success {
            Predicate::ReachScreen { screen } if !screens.contains_key(screen) => {
                return dangling(format!("task `{}` screen `{screen}`", task.task_id));
            }
            Predicate::ElementValueEquals { screen, element, .. }
                if screens.get(screen).and_then(|s| s.element(element)).is_none() =>
            {
                return dangling(format!("task `{}` element `{screen}`/`{element}`", task.task_id));
            }
            _ => {}
        }
    }
    Ok(World {
        screens,
        transitions,
        tasks: doc.tasks,
        initial: doc.initial,
        registry: load_registry(doc.registry.as_deref())?,
    })
}

impl World {
    pub fn task(&self, task_id: &str) -> Option<&Task> {
        self.tasks.iter().find(|t| t.task_id == task_id)
    }
}
