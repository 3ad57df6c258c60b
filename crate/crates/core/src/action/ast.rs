use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Wire prefix of a command. `Meta` commands (`terminate`, `answer`) carry no prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Namespace {
    Pyautogui,
    Browser,
    Mobile,
    Meta,
}

impl Namespace {
    pub fn literal(self) -> &'static str {
        match self {
            Namespace::Pyautogui => "pyautogui",
            Namespace::Browser => "browser",
            Namespace::Mobile => "mobile",
            Namespace::Meta => "meta",
        }
    }

    pub fn from_function_name(name: &str) -> Namespace {
        match name.split_once('.').map(|(ns, _)| ns) {
            Some("pyautogui") => Namespace::Pyautogui,
            Some("browser") => Namespace::Browser,
            Some("mobile") => Namespace::Mobile,
            _ => Namespace::Meta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionKind {
    MoveTo,
    Click,
    Write,
    Press,
    Hotkey,
    Scroll,
    DragTo,
    SelectOption,
    Swipe,
    Home,
    Back,
    OpenApp,
    LongPress,
    Terminate,
    Answer,
    PluginCall,
}

/// Coarse action family. Two commands "do the same kind of thing" when
/// their classes agree; used by step scoring and the augmentation checklist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionClass {
    Pointer,
    Hover,
    Drag,
    Type,
    Key,
    Scroll,
    Navigate,
    OpenApp,
    Answer,
    Terminate,
    Plugin,
}

/// Expected literal shape of a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamShape {
    Coordinate,
    Number,
    Text,
    Key,
    Enum,
    Point,
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub shape: ParamShape,
}

const fn p(name: &'static str, shape: ParamShape) -> ParamSpec {
    ParamSpec { name, shape }
}

const XY: &[ParamSpec] = &[p("x", ParamShape::Coordinate), p("y", ParamShape::Coordinate)];

impl ActionKind {
    /// Every kind with a fixed grammar entry, in table order.
    pub const BUILTIN: [ActionKind; 15] = [
        ActionKind::MoveTo,
        ActionKind::Click,
        ActionKind::Write,
        ActionKind::Press,
        ActionKind::Hotkey,
        ActionKind::Scroll,
        ActionKind::DragTo,
        ActionKind::SelectOption,
        ActionKind::Swipe,
        ActionKind::Home,
        ActionKind::Back,
        ActionKind::OpenApp,
        ActionKind::LongPress,
        ActionKind::Terminate,
        ActionKind::Answer,
    ];

    pub fn function_name(self) -> Option<&'static str> {
        Some(match self {
            ActionKind::MoveTo => "pyautogui.moveTo",
            ActionKind::Click => "pyautogui.click",
            ActionKind::Write => "pyautogui.write",
            ActionKind::Press => "pyautogui.press",
            ActionKind::Hotkey => "pyautogui.hotkey",
            ActionKind::Scroll => "pyautogui.scroll",
            ActionKind::DragTo => "pyautogui.dragTo",
            ActionKind::SelectOption => "browser.select_option",
            ActionKind::Swipe => "mobile.swipe",
            ActionKind::Home => "mobile.home",
            ActionKind::Back => "mobile.back",
            ActionKind::OpenApp => "mobile.open_app",
            ActionKind::LongPress => "mobile.long_press",
            ActionKind::Terminate => "terminate",
            ActionKind::Answer => "answer",
            ActionKind::PluginCall => return None,
        })
    }

    pub fn from_function_name(name: &str) -> Option<ActionKind> {
        ActionKind::BUILTIN
            .into_iter()
            .find(|k| k.function_name() == Some(name))
    }

    pub fn namespace(self) -> Namespace {
        match self.function_name() {
            Some(name) => Namespace::from_function_name(name),
            None => Namespace::Meta,
        }
    }

    /// The seven default `pyautogui` actions.
    pub fn is_basic(self) -> bool {
        matches!(
            self,
            ActionKind::MoveTo
                | ActionKind::Click
                | ActionKind::Write
                | ActionKind::Press
                | ActionKind::Hotkey
                | ActionKind::Scroll
                | ActionKind::DragTo
        )
    }

    pub fn class(self) -> ActionClass {
        match self {
            ActionKind::Click | ActionKind::LongPress | ActionKind::SelectOption => ActionClass::Pointer,
            ActionKind::MoveTo => ActionClass::Hover,
            ActionKind::DragTo => ActionClass::Drag,
            ActionKind::Write => ActionClass::Type,
            ActionKind::Press | ActionKind::Hotkey => ActionClass::Key,
            ActionKind::Scroll | ActionKind::Swipe => ActionClass::Scroll,
            ActionKind::Home | ActionKind::Back => ActionClass::Navigate,
            ActionKind::OpenApp => ActionClass::OpenApp,
            ActionKind::Answer => ActionClass::Answer,
            ActionKind::Terminate => ActionClass::Terminate,
            ActionKind::PluginCall => ActionClass::Plugin,
        }
    }

    /// Fixed parameter list, in canonical order. `Hotkey` is variadic and
    /// `PluginCall` is schema-driven; both return an empty slice.
    pub fn params(self) -> &'static [ParamSpec] {
        const WRITE: &[ParamSpec] = &[p("message", ParamShape::Text)];
        const PRESS: &[ParamSpec] = &[p("keys", ParamShape::Key)];
        const SCROLL: &[ParamSpec] = &[p("clicks", ParamShape::Number)];
        const SELECT: &[ParamSpec] = &[
            p("x", ParamShape::Coordinate),
            p("y", ParamShape::Coordinate),
            p("value", ParamShape::Text),
        ];
        const SWIPE: &[ParamSpec] = &[p("from", ParamShape::Point), p("to", ParamShape::Point)];
        const OPEN_APP: &[ParamSpec] = &[p("app_name", ParamShape::Text)];
        const TERMINATE: &[ParamSpec] = &[p("status", ParamShape::Enum)];
        const ANSWER: &[ParamSpec] = &[p("answer", ParamShape::Text)];
        match self {
            ActionKind::MoveTo | ActionKind::Click | ActionKind::DragTo | ActionKind::LongPress => XY,
            ActionKind::Write => WRITE,
            ActionKind::Press => PRESS,
            ActionKind::Scroll => SCROLL,
            ActionKind::SelectOption => SELECT,
            ActionKind::Swipe => SWIPE,
            ActionKind::OpenApp => OPEN_APP,
            ActionKind::Terminate => TERMINATE,
            ActionKind::Answer => ANSWER,
            ActionKind::Home | ActionKind::Back | ActionKind::Hotkey | ActionKind::PluginCall => &[],
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A normalized screen point; both components are expected in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActionValue {
    Number(f64),
    Text(String),
    Key(String),
    Keys(Vec<String>),
    Enum(String),
    Point(Point),
}

impl ActionValue {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            ActionValue::Text(s) | ActionValue::Key(s) | ActionValue::Enum(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            ActionValue::Number(n) => Some(*n),
            _ => None,
        }
    }
}

impl Serialize for ActionValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ActionValue::Number(n) => serializer.serialize_f64(*n),
            ActionValue::Text(s) | ActionValue::Key(s) | ActionValue::Enum(s) => serializer.serialize_str(s),
            ActionValue::Keys(keys) => keys.serialize(serializer),
            ActionValue::Point(pt) => [pt.x, pt.y].serialize(serializer),
        }
    }
}

/// A single command of the unified action space.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionCommand {
    MoveTo {
        x: f64,
        y: f64,
    },
    Click {
        x: f64,
        y: f64,
    },
    Write {
        message: String,
    },
    Press {
        key: String,
    },
    Hotkey {
        keys: Vec<String>,
    },
    Scroll {
        clicks: f64,
    },
    DragTo {
        x: f64,
        y: f64,
    },
    SelectOption {
        x: f64,
        y: f64,
        value: String,
    },
    Swipe {
        from: Point,
        to: Point,
    },
    Home,
    Back,
    OpenApp {
        app_name: String,
    },
    LongPress {
        x: f64,
        y: f64,
    },
    Terminate {
        status: String,
    },
    Answer {
        answer: String,
    },
    /// A registry-declared function. Arguments are kept in schema order.
    PluginCall {
        name: String,
        args: Vec<(String, ActionValue)>,
    },
}

impl ActionCommand {
    pub fn click(x: f64, y: f64) -> Self {
        ActionCommand::Click { x, y }
    }

    pub fn kind(&self) -> ActionKind {
        match self {
            ActionCommand::MoveTo { .. } => ActionKind::MoveTo,
            ActionCommand::Click { .. } => ActionKind::Click,
            ActionCommand::Write { .. } => ActionKind::Write,
            ActionCommand::Press { .. } => ActionKind::Press,
            ActionCommand::Hotkey { .. } => ActionKind::Hotkey,
            ActionCommand::Scroll { .. } => ActionKind::Scroll,
            ActionCommand::DragTo { .. } => ActionKind::DragTo,
            ActionCommand::SelectOption { .. } => ActionKind::SelectOption,
            ActionCommand::Swipe { .. } => ActionKind::Swipe,
            ActionCommand::Home => ActionKind::Home,
            ActionCommand::Back => ActionKind::Back,
            ActionCommand::OpenApp { .. } => ActionKind::OpenApp,
            ActionCommand::LongPress { .. } => ActionKind::LongPress,
            ActionCommand::Terminate { .. } => ActionKind::Terminate,
            ActionCommand::Answer { .. } => ActionKind::Answer,
            ActionCommand::PluginCall { .. } => ActionKind::PluginCall,
        }
    }

    pub fn namespace(&self) -> Namespace {
        match self {
            ActionCommand::PluginCall { name, .. } => Namespace::from_function_name(name),
            other => other.kind().namespace(),
        }
    }

    /// Full dotted function name as written on the wire.
    pub fn function_name(&self) -> &str {
        match self {
            ActionCommand::PluginCall { name, .. } => name,
            other => other.kind().function_name().unwrap_or_default(),
        }
    }

    /// Ordered `(name, value)` view of the arguments.
    pub fn args(&self) -> Vec<(String, ActionValue)> {
        use ActionValue as V;
        let pair = |n: &str, v: ActionValue| (n.to_string(), v);
        match self {
            ActionCommand::MoveTo { x, y }
            | ActionCommand::Click { x, y }
            | ActionCommand::DragTo { x, y }
            | ActionCommand::LongPress { x, y } => {
                vec![pair("x", V::Number(*x)), pair("y", V::Number(*y))]
            }
            ActionCommand::Write { message } => vec![pair("message", V::Text(message.clone()))],
            ActionCommand::Press { key } => vec![pair("keys", V::Key(key.clone()))],
            ActionCommand::Hotkey { keys } => vec![pair("keys", V::Keys(keys.clone()))],
            ActionCommand::Scroll { clicks } => vec![pair("clicks", V::Number(*clicks))],
            ActionCommand::SelectOption { x, y, value } => vec![
                pair("x", V::Number(*x)),
                pair("y", V::Number(*y)),
                pair("value", V::Text(value.clone())),
            ],
            ActionCommand::Swipe { from, to } => {
                vec![pair("from", V::Point(*from)), pair("to", V::Point(*to))]
            }
            ActionCommand::Home | ActionCommand::Back => Vec::new(),
            ActionCommand::OpenApp { app_name } => {
                vec![pair("app_name", V::Text(app_name.clone()))]
            }
            ActionCommand::Terminate { status } => vec![pair("status", V::Enum(status.clone()))],
            ActionCommand::Answer { answer } => vec![pair("answer", V::Text(answer.clone()))],
            ActionCommand::PluginCall { args, .. } => args.clone(),
        }
    }

    /// The screen point the command acts on, if any. For swipes this is the start point.
    pub fn target_point(&self) -> Option<Point> {
        match self {
            ActionCommand::MoveTo { x, y }
            | ActionCommand::Click { x, y }
            | ActionCommand::DragTo { x, y }
            | ActionCommand::LongPress { x, y }
            | ActionCommand::SelectOption { x, y, .. } => Some(Point::new(*x, *y)),
            ActionCommand::Swipe { from, .. } => Some(*from),
            ActionCommand::PluginCall { args, .. } => {
                let get = |n: &str| args.iter().find(|(name, _)| name == n).and_then(|(_, v)| v.as_number());
                Some(Point::new(get("x")?, get("y")?))
            }
            _ => None,
        }
    }

    /// Structured JSON view: `{"kind", "namespace", "function", "args": {...}}`.
    pub fn to_ast_json(&self) -> serde_json::Value {
        serde_json::to_value(AstView(self)).expect("AST view is always serializable")
    }
}

struct AstView<'a>(&'a ActionCommand);

impl Serialize for AstView<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Args(Vec<(String, ActionValue)>);
        impl Serialize for Args {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (k, v) in &self.0 {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
        let cmd = self.0;
        let mut map = serializer.serialize_map(Some(4))?;
        map.serialize_entry("kind", &cmd.kind())?;
        map.serialize_entry("namespace", &cmd.namespace())?;
        map.serialize_entry("function", cmd.function_name())?;
        map.serialize_entry("args", &Args(cmd.args()))?;
        map.end()
    }
}

/// Commands travel through data files in canonical text form.
impl Serialize for ActionCommand {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let text = super::serialize_action(self).map_err(serde::ser::Error::custom)?;
        serializer.serialize_str(&text)
    }
}

impl<'de> Deserialize<'de> for ActionCommand {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        let opts = super::ParseOptions {
            allow_unregistered: true,
            ..Default::default()
        };
        super::parse_action_with(&text, &opts).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ActionCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match super::serialize_action(self) {
            Ok(text) => f.write_str(&text),
            Err(_) => write!(f, "<invalid {}>", self.kind()),
        }
    }
}
