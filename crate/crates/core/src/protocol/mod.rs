//! Training and inference message layouts.
//!
//! The `<|recipient|>` control token routes assistant content: `os`
//! carries an executable command, `all` carries the inner monologue
//! (thought plus low-level instruction). All builders emit exact bytes;
//! nothing is trimmed or normalized.

mod response;
mod templates;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{serialize_action, ActionCommand, ParseError};

pub use response::{parse_model_response, parse_model_response_with, parse_training_example};
pub use templates::*;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("goal must not be empty")]
    EmptyGoal,
    #[error("thought and low-level instruction must not be empty")]
    EmptyMonologue,
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("previous action #{index} must be a single-line natural-language instruction")]
    InvalidHistory { index: usize },
    #[error("response has no `<|recipient|>` token")]
    MissingRecipient,
    #[error("unknown recipient `{0}`")]
    UnknownRecipient(String),
    #[error("os turn has no `Action:` line")]
    MissingAction,
    #[error("turn carries more than one action")]
    MultipleActions,
    #[error("malformed inner monologue: {0}")]
    MalformedMonologue(&'static str),
    #[error("malformed training example: {0}")]
    MalformedExample(&'static str),
    #[error(transparent)]
    Dsl(#[from] ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recipient {
    Os,
    All,
}

impl Recipient {
    pub fn as_str(self) -> &'static str {
        match self {
            Recipient::Os => "os",
            Recipient::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminator {
    ImEnd,
    DiffMarker,
}

/// One assistant generation: optional monologue followed by at most one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub recipient: Recipient,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thought: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub low_level_instruction: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionCommand>,
    pub terminator: Terminator,
}

impl Turn {
    pub fn os(action: ActionCommand) -> Self {
        Turn {
            recipient: Recipient::Os,
            thought: None,
            low_level_instruction: None,
            action: Some(action),
            terminator: Terminator::DiffMarker,
        }
    }

    pub fn monologue(
        thought: impl Into<String>,
        instruction: impl Into<String>,
        action: Option<ActionCommand>,
    ) -> Self {
        let terminator = if action.is_some() {
            Terminator::DiffMarker
        } else {
            Terminator::ImEnd
        };
        Turn {
            recipient: Recipient::All,
            thought: Some(thought.into()),
            low_level_instruction: Some(instruction.into()),
            action,
            terminator,
        }
    }

    /// Renders the generation block(s) of this turn.
    pub fn render(&self) -> Result<String, ProtocolError> {
        let mut out = String::new();
        if self.recipient == Recipient::All {
            let (Some(thought), Some(instr)) = (&self.thought, &self.low_level_instruction) else {
                return Err(ProtocolError::EmptyMonologue);
            };
            out.push_str(&monologue_block(thought, instr));
            if self.action.is_some() {
                out.push('\n');
            }
        } else if self.thought.is_some() {
            return Err(ProtocolError::MalformedMonologue("os turns carry no thought"));
        }
        match &self.action {
            Some(action) => {
                let text = serialize_action(action).map_err(|e| ProtocolError::InvalidAction(e.to_string()))?;
                out.push_str(&action_block(&text));
            }
            None if self.recipient == Recipient::Os => return Err(ProtocolError::MissingAction),
            None => {}
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Grounding,
    Planning,
}

/// A rendered training sample plus the fields it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub stage: Stage,
    pub system: String,
    pub goal: String,
    pub previous: Vec<String>,
    pub image: String,
    pub turns: Vec<Turn>,
    pub rendered: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptMode {
    #[default]
    SelfPlan,
    EnforcedPlan,
}

impl PromptMode {
    /// Bytes that end the inference prompt, starting at the recipient token.
    pub fn control_suffix(self) -> &'static str {
        match self {
            PromptMode::SelfPlan => RECIPIENT,
            PromptMode::EnforcedPlan => "<|recipient|>all\nThought:",
        }
    }
}

impl std::str::FromStr for PromptMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "self-plan" | "self_plan" => Ok(PromptMode::SelfPlan),
            "enforced-plan" | "enforced_plan" => Ok(PromptMode::EnforcedPlan),
            other => Err(format!("unknown prompt mode `{other}`")),
        }
    }
}

/// `Step i: <instruction>` lines, or the literal `None` for an empty history.
pub fn format_previous_actions(instructions: &[String]) -> String {
    if instructions.is_empty() {
        return "None".to_string();
    }
    instructions
        .iter()
        .enumerate()
        .map(|(i, s)| format!("Step {}: {s}", i + 1))
        .collect::<Vec<_>>()
        .join("\n")
}

/// History entries are low-level instructions: single line, never a raw command.
pub fn check_history(instructions: &[String]) -> Result<(), ProtocolError> {
    for (i, instr) in instructions.iter().enumerate() {
        if instr.trim().is_empty() || instr.contains('\n') || looks_like_command(instr) {
            return Err(ProtocolError::InvalidHistory { index: i + 1 });
        }
    }
    Ok(())
}

fn looks_like_command(text: &str) -> bool {
    ["pyautogui.", "browser.", "mobile.", "terminate(", "answer("]
        .iter()
        .any(|lit| text.contains(lit))
}

fn check_goal(goal: &str) -> Result<(), ProtocolError> {
    if goal.trim().is_empty() {
        Err(ProtocolError::EmptyGoal)
    } else {
        Ok(())
    }
}

pub fn build_stage1_example(
    goal: &str,
    previous_instructions: &[String],
    image_ref: &str,
    action: &ActionCommand,
) -> Result<TrainingExample, ProtocolError> {
    check_goal(goal)?;
    check_history(previous_instructions)?;
    let turn = Turn::os(action.clone());
    let rendered = format!(
        "{}\n{}",
        training_prompt(goal, &format_previous_actions(previous_instructions)),
        turn.render()?
    );
    Ok(TrainingExample {
        stage: Stage::Grounding,
        system: SYSTEM_PROMPT.to_string(),
        goal: goal.to_string(),
        previous: previous_instructions.to_vec(),
        image: image_ref.to_string(),
        turns: vec![turn],
        rendered,
    })
}

pub fn build_stage2_example(
    goal: &str,
    previous_instructions: &[String],
    image_ref: &str,
    thought: &str,
    low_level_instruction: &str,
    action: &ActionCommand,
) -> Result<TrainingExample, ProtocolError> {
    check_goal(goal)?;
    check_history(previous_instructions)?;
    if thought.trim().is_empty() || low_level_instruction.trim().is_empty() {
        return Err(ProtocolError::EmptyMonologue);
    }
    if low_level_instruction.contains('\n') {
        return Err(ProtocolError::MalformedMonologue(
            "low-level instruction must be a single line",
        ));
    }
    let turn = Turn::monologue(thought, low_level_instruction, Some(action.clone()));
    let rendered = format!(
        "{}\n{}",
        training_prompt(goal, &format_previous_actions(previous_instructions)),
        turn.render()?
    );
    Ok(TrainingExample {
        stage: Stage::Planning,
        system: SYSTEM_PROMPT.to_string(),
        goal: goal.to_string(),
        previous: previous_instructions.to_vec(),
        image: image_ref.to_string(),
        turns: vec![turn],
        rendered,
    })
}

/// Inference prompt. The two modes share every byte up to the recipient token.
pub fn build_inference_prompt(
    mode: PromptMode,
    goal: &str,
    previous_instructions: &[String],
    _image_ref: &str,
) -> Result<String, ProtocolError> {
    check_goal(goal)?;
    check_history(previous_instructions)?;
    Ok(format!(
        "{}{}",
        inference_prompt_body(goal, &format_previous_actions(previous_instructions)),
        mode.control_suffix()
    ))
}

/// Plain-language description of a command, used as history when the
/// agent answered without a monologue.
pub fn describe_action(cmd: &ActionCommand) -> String {
    let pct = |v: f64| format!("{:.3}", v);
    match cmd {
        ActionCommand::MoveTo { x, y } => format!("Move the pointer to ({}, {}).", pct(*x), pct(*y)),
        ActionCommand::Click { x, y } => format!("Click at ({}, {}).", pct(*x), pct(*y)),
        ActionCommand::Write { message } => format!("Type \"{message}\"."),
        ActionCommand::Press { key } => format!("Press the {key} key."),
        ActionCommand::Hotkey { keys } => format!("Press {}.", keys.join("+")),
        ActionCommand::Scroll { clicks } if *clicks >= 0.0 => format!("Scroll up by {clicks}."),
        ActionCommand::Scroll { clicks } => format!("Scroll down by {}.", -clicks),
        ActionCommand::DragTo { x, y } => format!("Drag to ({}, {}).", pct(*x), pct(*y)),
        ActionCommand::SelectOption { value, .. } => format!("Select the option \"{value}\"."),
        ActionCommand::Swipe { from, to } => format!(
            "Swipe from ({}, {}) to ({}, {}).",
            pct(from.x),
            pct(from.y),
            pct(to.x),
            pct(to.y)
        ),
        ActionCommand::Home => "Go to the home screen.".into(),
        ActionCommand::Back => "Go back.".into(),
        ActionCommand::OpenApp { app_name } => format!("Open the {app_name} app."),
        ActionCommand::LongPress { x, y } => format!("Long press at ({}, {}).", pct(*x), pct(*y)),
        ActionCommand::Terminate { status } => format!("Finish the task with status {status}."),
        ActionCommand::Answer { answer } => format!("Answer \"{answer}\"."),
        ActionCommand::PluginCall { name, .. } => {
            let short = name.rsplit('.').next().unwrap_or(name).replace('_', " ");
            format!("Use {short}.")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn previous_actions_formatting() {
        assert_eq!(format_previous_actions(&[]), "None");
        assert_eq!(format_previous_actions(&["open menu".into()]), "Step 1: open menu");
        let three: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        assert_eq!(format_previous_actions(&three), "Step 1: a\nStep 2: b\nStep 3: c");
    }

    #[test]
    fn empty_goal() {
        let cmd = ActionCommand::click(0.5, 0.5);
        assert_eq!(
            build_stage1_example("", &[], "img", &cmd),
            Err(ProtocolError::EmptyGoal)
        );
        assert_eq!(
            build_inference_prompt(PromptMode::SelfPlan, "  ", &[], "img"),
            Err(ProtocolError::EmptyGoal)
        );
    }

    #[test]
    fn empty_monologue() {
        let cmd = ActionCommand::click(0.5, 0.5);
        assert_eq!(
            build_stage2_example("g", &[], "img", "", "Click it.", &cmd),
            Err(ProtocolError::EmptyMonologue)
        );
    }

    #[test]
    fn raw_commands_rejected_from_history() {
        let cmd = ActionCommand::click(0.5, 0.5);
        let prev = vec!["pyautogui.click(x=0.1, y=0.2)".to_string()];
        assert_eq!(
            build_stage1_example("g", &prev, "img", &cmd),
            Err(ProtocolError::InvalidHistory { index: 1 })
        );
    }

    #[test]
    fn two_history_entries_in_order() {
        let cmd = ActionCommand::click(0.5, 0.5);
        let prev = vec!["Open the menu.".to_string(), "Pick Settings.".to_string()];
        let ex = build_stage1_example("g", &prev, "img", &cmd).unwrap();
        assert!(ex
            .rendered
            .contains("Previous actions: Step 1: Open the menu.\nStep 2: Pick Settings.\n"));
    }

    #[test]
    fn goal_newline_is_kept() {
        let p = build_inference_prompt(PromptMode::SelfPlan, "line one\nline two", &[], "img").unwrap();
        assert!(p.contains("Instruction: line one\nline two\n"));
    }

    #[test]
    fn out_of_range_action_is_invalid() {
        let cmd = ActionCommand::click(1.5, 0.5);
        assert!(matches!(
            build_stage1_example("g", &[], "img", &cmd),
            Err(ProtocolError::InvalidAction(_))
        ));
    }
}
