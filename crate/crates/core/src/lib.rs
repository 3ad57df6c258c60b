//! Toolkit for pure-vision GUI agents.
//!
//! * [`action`]: the unified action command language and the pluggable
//!   function registry.
//! * [`protocol`]: byte-exact training and inference message layouts.
//! * [`forge`]: dataset unification, grounding synthesis, packing and
//!   monologue augmentation.
//! * [`sim`]: a deterministic GUI world and episode runner.
//! * [`metrics`]: grounding and step metrics plus the error taxonomy.
//! * [`cost`]: image/text token accounting and USD efficiency.
//! * [`cli`]: the `unigui` command line front end.

pub mod action;
pub mod cli;
pub mod cost;
pub mod forge;
pub mod geom;
pub mod metrics;
pub mod protocol;
pub mod sim;

pub use action::{parse_action, serialize_action, validate_action, ActionCommand, FunctionRegistry};
