use std::fmt;

use serde::Serialize;

use super::ast::{ActionCommand, ActionKind, ActionValue};
use super::keys::is_known_key;
use super::registry::{FunctionRegistry, ParamType};
use super::serialize::in_unit;

/// Default allowed `terminate` statuses when the registry does not say otherwise.
pub const DEFAULT_TERMINATE_STATUSES: &[&str] = &["success"];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    FunctionNotAvailable {
        function: String,
    },
    MissingArgument {
        function: String,
        argument: String,
    },
    UnexpectedArgument {
        function: String,
        argument: String,
    },
    TypeMismatch {
        argument: String,
        expected: &'static str,
    },
    CoordinateOutOfRange {
        argument: String,
        value: f64,
    },
    NonFiniteNumber {
        argument: String,
    },
    EnumValueNotAllowed {
        argument: String,
        value: String,
        allowed: Vec<String>,
    },
    UnknownKey {
        key: String,
    },
    TooFewKeys {
        count: usize,
    },
}

impl Violation {
    /// Stable snake_case class name, as used in reports.
    pub fn class(&self) -> &'static str {
        match self {
            Violation::FunctionNotAvailable { .. } => "function_not_available",
            Violation::MissingArgument { .. } => "missing_argument",
            Violation::UnexpectedArgument { .. } => "unexpected_argument",
            Violation::TypeMismatch { .. } => "type_mismatch",
            Violation::CoordinateOutOfRange { .. } => "coordinate_out_of_range",
            Violation::NonFiniteNumber { .. } => "non_finite_number",
            Violation::EnumValueNotAllowed { .. } => "enum_value_not_allowed",
            Violation::UnknownKey { .. } => "unknown_key",
            Violation::TooFewKeys { .. } => "too_few_keys",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FunctionNotAvailable { function } => {
                write!(f, "`{function}` is not available in this environment")
            }
            Violation::MissingArgument { function, argument } => {
                write!(f, "`{function}` is missing `{argument}`")
            }
            Violation::UnexpectedArgument { function, argument } => {
                write!(f, "`{function}` does not declare `{argument}`")
            }
            Violation::TypeMismatch { argument, expected } => {
                write!(f, "`{argument}` must be {expected}")
            }
            Violation::CoordinateOutOfRange { argument, value } => {
                write!(f, "`{argument}` = {value} lies outside [0, 1]")
            }
            Violation::NonFiniteNumber { argument } => write!(f, "`{argument}` is not finite"),
            Violation::EnumValueNotAllowed {
                argument,
                value,
                allowed,
            } => {
                write!(f, "`{argument}` = '{value}' not in {allowed:?}")
            }
            Violation::UnknownKey { key } => write!(f, "unknown key `{key}`"),
            Violation::TooFewKeys { count } => write!(f, "hotkey needs two or more keys, got {count}"),
        }
    }
}

/// Checks a command against an environment. Returns every violation found;
/// an empty list means the command may be executed.
pub fn validate_action(cmd: &ActionCommand, registry: &FunctionRegistry) -> Vec<Violation> {
    let mut out = Vec::new();
    let kind = cmd.kind();
    let function = cmd.function_name().to_string();

    if !registry.permits(kind, &function) {
        out.push(Violation::FunctionNotAvailable {
            function: function.clone(),
        });
    }

    let args = cmd.args();
    for (name, value) in &args {
        match value {
            ActionValue::Number(n) if !n.is_finite() => out.push(Violation::NonFiniteNumber { argument: name.clone() }),
            ActionValue::Number(n) if is_coordinate(kind, name) && !in_unit(*n) => {
                out.push(Violation::CoordinateOutOfRange {
                    argument: name.clone(),
                    value: *n,
                })
            }
            ActionValue::Point(p) => {
                for (axis, v) in [("x", p.x), ("y", p.y)] {
                    if !v.is_finite() {
                        out.push(Violation::NonFiniteNumber {
                            argument: format!("{name}.{axis}"),
                        });
                    } else if !in_unit(v) {
                        out.push(Violation::CoordinateOutOfRange {
                            argument: format!("{name}.{axis}"),
                            value: v,
                        });
                    }
                }
            }
            _ => {}
        }
    }

    match cmd {
        ActionCommand::Press { key } if !is_known_key(key) => out.push(Violation::UnknownKey { key: key.clone() }),
        ActionCommand::Hotkey { keys } => {
            if keys.len() < 2 {
                out.push(Violation::TooFewKeys { count: keys.len() });
            }
            for key in keys.iter().filter(|k| !is_known_key(k)) {
                out.push(Violation::UnknownKey { key: key.clone() });
            }
        }
        _ => {}
    }

    match registry.get(&function) {
        Some(schema) => {
            for param in &schema.parameters {
                let Some((_, value)) = args.iter().find(|(n, _)| n == &param.name) else {
                    if param.required {
                        out.push(Violation::MissingArgument {
                            function: function.clone(),
                            argument: param.name.clone(),
                        });
                    }
                    continue;
                };
                match (param.ty, value) {
                    (ParamType::Number, ActionValue::Number(_)) => {}
                    (ParamType::Number, _) if kind != ActionKind::PluginCall => {}
                    (ParamType::Number, _) => out.push(Violation::TypeMismatch {
                        argument: param.name.clone(),
                        expected: "a number",
                    }),
                    (ParamType::Text | ParamType::Enum, v)
                        if v.as_str().is_none() && kind == ActionKind::PluginCall =>
                    {
                        out.push(Violation::TypeMismatch {
                            argument: param.name.clone(),
                            expected: "a string",
                        });
                    }
                    _ => {}
                }
                if let (Some(allowed), Some(v)) = (&param.enum_values, value.as_str()) {
                    if !allowed.iter().any(|a| a == v) {
                        out.push(Violation::EnumValueNotAllowed {
                            argument: param.name.clone(),
                            value: v.to_string(),
                            allowed: allowed.clone(),
                        });
                    }
                }
            }
            if kind == ActionKind::PluginCall {
                for (name, _) in &args {
                    if schema.param(name).is_none() {
                        out.push(Violation::UnexpectedArgument {
                            function: function.clone(),
                            argument: name.clone(),
                        });
                    }
                }
            }
        }
        None => {
            if let ActionCommand::Terminate { status } = cmd {
                if !DEFAULT_TERMINATE_STATUSES.contains(&status.as_str()) {
                    out.push(Violation::EnumValueNotAllowed {
                        argument: "status".into(),
                        value: status.clone(),
                        allowed: DEFAULT_TERMINATE_STATUSES.iter().map(|s| s.to_string()).collect(),
                    });
                }
            }
        }
    }
    out
}

fn is_coordinate(kind: ActionKind, name: &str) -> bool {
    match kind {
        ActionKind::Scroll => false,
        _ => name == "x" || name == "y",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Point;

    #[test]
    fn click_out_of_range() {
        let v = validate_action(&ActionCommand::Click { x: 1.2, y: 0.5 }, &FunctionRegistry::web());
        assert_eq!(
            v,
            vec![Violation::CoordinateOutOfRange {
                argument: "x".into(),
                value: 1.2
            }]
        );
    }

    #[test]
    fn swipe_not_on_web() {
        let cmd = ActionCommand::Swipe {
            from: Point::new(0.5, 0.8),
            to: Point::new(0.5, 0.2),
        };
        let v = validate_action(&cmd, &FunctionRegistry::web());
        assert_eq!(
            v,
            vec![Violation::FunctionNotAvailable {
                function: "mobile.swipe".into()
            }]
        );
    }

    #[test]
    fn terminate_failure_rejected_by_mobile_registry() {
        let cmd = ActionCommand::Terminate {
            status: "failure".into(),
        };
        let v = validate_action(&cmd, &FunctionRegistry::mobile());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].class(), "enum_value_not_allowed");
        let ok = ActionCommand::Terminate {
            status: "success".into(),
        };
        assert!(validate_action(&ok, &FunctionRegistry::mobile()).is_empty());
    }

    #[test]
    fn registry_can_extend_terminate() {
        let reg = FunctionRegistry::default()
            .register(r#"{"name": "terminate", "parameters": {"type": "object", "properties": {"status": {"type": "string", "enum": ["success", "failure"]}}, "required": ["status"]}}"#)
            .unwrap();
        let cmd = ActionCommand::Terminate {
            status: "failure".into(),
        };
        assert!(validate_action(&cmd, &reg).is_empty());
    }

    #[test]
    fn basic_actions_gated_by_flag() {
        let reg = FunctionRegistry::new(crate::action::Platform::Custom, false);
        let v = validate_action(&ActionCommand::Click { x: 0.1, y: 0.1 }, &reg);
        assert_eq!(v[0].class(), "function_not_available");
    }

    #[test]
    fn plugin_missing_and_unexpected() {
        let reg = FunctionRegistry::default()
            .register(r#"{"name": "browser.goto", "parameters": {"type": "object", "properties": {"url": {"type": "string"}}, "required": ["url"]}}"#)
            .unwrap();
        let cmd = ActionCommand::PluginCall {
            name: "browser.goto".into(),
            args: vec![("tab".into(), ActionValue::Number(1.0))],
        };
        let classes: Vec<_> = validate_action(&cmd, &reg).iter().map(Violation::class).collect();
        assert_eq!(classes, ["missing_argument", "unexpected_argument"]);
    }

    #[test]
    fn scroll_magnitude_is_not_a_coordinate() {
        let v = validate_action(&ActionCommand::Scroll { clicks: -400.0 }, &FunctionRegistry::web());
        assert!(v.is_empty());
    }
}
