use std::fmt::Write as _;

use thiserror::Error;

use super::ast::{ActionCommand, ActionValue, Point};
use super::keys::is_known_key;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid command: {0}")]
pub struct InvalidCommand(pub String);

/// Canonical text: keyword arguments in schema order, single-quoted text,
/// shortest decimal numbers. `hotkey` keeps its variadic positional form.
pub fn serialize_action(cmd: &ActionCommand) -> Result<String, InvalidCommand> {
    check_structure(cmd)?;
    let mut out = String::new();
    out.push_str(cmd.function_name());
    out.push('(');
    match cmd {
        ActionCommand::Hotkey { keys } => {
            let quoted: Vec<String> = keys.iter().map(|k| quote(k)).collect();
            out.push_str(&quoted.join(", "));
        }
        _ => {
            let args = cmd.args();
            for (i, (name, value)) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{name}={}", render_value(value));
            }
        }
    }
    out.push(')');
    Ok(out)
}

pub(crate) fn render_value(value: &ActionValue) -> String {
    match value {
        ActionValue::Number(n) => number(*n),
        ActionValue::Text(s) | ActionValue::Key(s) | ActionValue::Enum(s) => quote(s),
        ActionValue::Keys(keys) => {
            let quoted: Vec<String> = keys.iter().map(|k| quote(k)).collect();
            format!("[{}]", quoted.join(", "))
        }
        ActionValue::Point(Point { x, y }) => format!("({}, {})", number(*x), number(*y)),
    }
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn number(n: f64) -> String {
    format!("{n}")
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

fn check_structure(cmd: &ActionCommand) -> Result<(), InvalidCommand> {
    let fail = |msg: String| Err(InvalidCommand(msg));
    for (name, value) in cmd.args() {
        match value {
            ActionValue::Number(n) if !n.is_finite() => return fail(format!("`{name}` is not finite")),
            ActionValue::Point(p) if !(in_unit(p.x) && in_unit(p.y)) => {
                return fail(format!("`{name}` point lies outside [0, 1]"))
            }
            _ => {}
        }
    }
    if let Some(p) = cmd.target_point() {
        if !(in_unit(p.x) && in_unit(p.y)) {
            return fail("coordinates lie outside [0, 1]".into());
        }
    }
    match cmd {
        ActionCommand::Hotkey { keys } if keys.len() < 2 => fail("hotkey needs at least two keys".into()),
        ActionCommand::Hotkey { keys } if !keys.iter().all(|k| is_known_key(k)) => {
            fail("hotkey uses an unknown key".into())
        }
        ActionCommand::Press { key } if !is_known_key(key) => fail(format!("unknown key `{key}`")),
        ActionCommand::Terminate { status } if status.is_empty() => fail("terminate needs a status".into()),
        ActionCommand::PluginCall { name, .. } if name.is_empty() => fail("plugin call without a name".into()),
        _ => Ok(()),
    }
}

pub(crate) fn in_unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}
