//! The unified action command language.
//!
//! Commands are single call expressions over four namespaces: the basic
//! `pyautogui.*` input actions, `browser.*` and `mobile.*` pluggable
//! functions, and the prefix-less meta actions `terminate` / `answer`.
//! Coordinates are normalized to `[0, 1]` of the observation size.
//!
//! ```
//! use unigui_core::action::{parse_action, serialize_action, ActionCommand};
//!
//! let cmd = parse_action("pyautogui.click(0.5, 0.25)").unwrap();
//! assert_eq!(cmd, ActionCommand::Click { x: 0.5, y: 0.25 });
//! assert_eq!(serialize_action(&cmd).unwrap(), "pyautogui.click(x=0.5, y=0.25)");
//! ```

mod ast;
pub mod keys;
mod parser;
mod registry;
mod serialize;
mod validate;

pub use ast::{ActionClass, ActionCommand, ActionKind, ActionValue, Namespace, ParamShape, ParamSpec, Point};
pub use parser::{parse_action, parse_action_with, ParseError, ParseOptions};
pub use registry::{
    render_function_docs, FunctionRegistry, FunctionSchema, ParamSchema, ParamType, Platform, RegistryError,
};
pub use serialize::{serialize_action, InvalidCommand};
pub use validate::{validate_action, Violation, DEFAULT_TERMINATE_STATUSES};

/// Parses with a registry in scope and validates against it in one step.
pub fn check_command(text: &str, registry: &FunctionRegistry) -> Result<ActionCommand, CommandError> {
    let opts = ParseOptions {
        registry: Some(registry),
        ..Default::default()
    };
    let cmd = parse_action_with(text, &opts)?;
    let violations = validate_action(&cmd, registry);
    if violations.is_empty() {
        Ok(cmd)
    } else {
        Err(CommandError::Invalid(violations))
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CommandError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("command violates the environment policy: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl CommandError {
    /// Taxonomy classes of the failure, parse-level ones included.
    pub fn classes(&self) -> Vec<&'static str> {
        match self {
            CommandError::Parse(e) => vec![e.class()],
            CommandError::Invalid(vs) => vs.iter().map(Violation::class).collect(),
        }
    }
}
