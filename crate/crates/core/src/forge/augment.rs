//! Monologue augmentation rounds: prompt construction and response parsing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ChecklistVerdict, ElementMeta};
use crate::action::{parse_action_with, ParseError, ParseOptions};
use crate::protocol::format_previous_actions;

/// Annotation prompt with `{goal}`, `{previous_actions}`,
/// `{current_action_instruction}` and `{action_commands}` slots.
pub const AUGMENTATION_TEMPLATE: &str = include_str!("augmentation.tmpl");

#[derive(Debug, Error, PartialEq)]
pub enum AugmentError {
    #[error("empty response")]
    EmptyResponse,
    #[error("response has no sentence boundary")]
    NoSentenceBoundary,
    #[error("action command line {line}: {source}")]
    InvalidCommands { line: usize, source: ParseError },
    #[error("round has no response")]
    MissingResponse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationResponse {
    pub thought: String,
    pub low_level_instruction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationRound {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_id: Option<String>,
    pub goal: String,
    #[serde(default)]
    pub previous_instructions: Vec<String>,
    pub current_action_instruction: String,
    /// One canonical command per line.
    pub action_commands: String,
    pub highlight: ElementMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<AugmentationResponse>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<ChecklistVerdict>,
}

/// Every line of `action_commands` must parse.
pub fn check_round(round: &AugmentationRound) -> Result<(), AugmentError> {
    let opts = ParseOptions {
        allow_unregistered: true,
        ..Default::default()
    };
    for (i, line) in round.action_commands.lines().enumerate() {
        parse_action_with(line, &opts).map_err(|source| AugmentError::InvalidCommands { line: i + 1, source })?;
    }
    Ok(())
}

pub fn build_augmentation_prompt(round: &AugmentationRound) -> String {
    let previous = format_previous_actions(&round.previous_instructions);
    let slots = [
        ("{goal}", round.goal.as_str()),
        ("{previous_actions}", previous.as_str()),
        (
            "{current_action_instruction}",
            round.current_action_instruction.as_str(),
        ),
        ("{action_commands}", round.action_commands.as_str()),
    ];
    // Single pass, so slot-like text inside values is left alone.
    let mut out = String::with_capacity(AUGMENTATION_TEMPLATE.len() + 256);
    let mut rest = AUGMENTATION_TEMPLATE;
    while let Some((at, slot, value)) = slots
        .iter()
        .filter_map(|(s, v)| rest.find(s).map(|at| (at, *s, *v)))
        .min_by_key(|(at, _, _)| *at)
    {
        out.push_str(&rest[..at]);
        out.push_str(value);
        rest = &rest[at + slot.len()..];
    }
    out.push_str(rest);
    out
}

/// Byte offsets just past each sentence terminator that is followed by
/// whitespace or the end of the text.
fn sentence_ends(text: &str) -> Vec<usize> {
    let mut ends = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            match chars.peek() {
                None => ends.push(i + 1),
                Some((_, n)) if n.is_whitespace() => ends.push(i + 1),
                _ => {}
            }
        }
    }
    ends
}

/// The last sentence is the instruction, everything before it the thought.
pub fn parse_augmentation_response(text: &str) -> Result<AugmentationResponse, AugmentError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(AugmentError::EmptyResponse);
    }
    let ends = sentence_ends(text);
    if ends.is_empty() {
        return Err(AugmentError::NoSentenceBoundary);
    }
    // A trailing unterminated fragment belongs to the final sentence.
    let last_end = *ends.last().unwrap();
    let split = if last_end == text.len() {
        ends.len().checked_sub(2).map_or(0, |k| ends[k])
    } else {
        last_end
    };
    Ok(AugmentationResponse {
        thought: text[..split].trim().to_string(),
        low_level_instruction: text[split..].trim().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn last_sentence_rule() {
        let r = parse_augmentation_response(
            "I see a search bar. I should type the query. Type 'shoes' into the search bar.",
        )
        .unwrap();
        assert_eq!(r.thought, "I see a search bar. I should type the query.");
        assert_eq!(r.low_level_instruction, "Type 'shoes' into the search bar.");
    }

    #[test]
    fn one_sentence() {
        let r = parse_augmentation_response("  Tap the gear icon!\n").unwrap();
        assert_eq!(r.thought, "");
        assert_eq!(r.low_level_instruction, "Tap the gear icon!");
    }

    #[test]
    fn decimals_are_not_boundaries() {
        let r = parse_augmentation_response("Price is 3.50 here. Click Buy").unwrap();
        assert_eq!(r.thought, "Price is 3.50 here.");
        assert_eq!(r.low_level_instruction, "Click Buy");
    }

    #[test]
    fn no_boundary() {
        assert_eq!(
            parse_augmentation_response("no punctuation at all"),
            Err(AugmentError::NoSentenceBoundary)
        );
        assert_eq!(parse_augmentation_response("   "), Err(AugmentError::EmptyResponse));
    }

    #[test]
    fn template_slots() {
        for slot in [
            "{goal}",
            "{previous_actions}",
            "{current_action_instruction}",
            "{action_commands}",
        ] {
            assert_eq!(AUGMENTATION_TEMPLATE.matches(slot).count(), 1, "{slot}");
        }
    }
}
