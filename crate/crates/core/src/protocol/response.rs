use super::templates::*;
use super::{ProtocolError, Recipient, Stage, Terminator, TrainingExample, Turn};
use crate::action::{parse_action_with, ParseOptions};

/// Parses generated assistant text starting at (or before) the recipient token.
pub fn parse_model_response(text: &str) -> Result<Turn, ProtocolError> {
    parse_model_response_with(text, &ParseOptions::default())
}

pub fn parse_model_response_with(text: &str, opts: &ParseOptions<'_>) -> Result<Turn, ProtocolError> {
    let at = text.find(RECIPIENT).ok_or(ProtocolError::MissingRecipient)?;
    let after = &text[at + RECIPIENT.len()..];
    let (word, body) = after.split_once('\n').unwrap_or((after, ""));
    match word.trim() {
        "os" => {
            let action = parse_os_body(body, opts)?;
            Ok(Turn::os(action))
        }
        "all" => parse_all_body(body, opts),
        other => Err(ProtocolError::UnknownRecipient(other.to_string())),
    }
}

fn parse_os_body(body: &str, opts: &ParseOptions<'_>) -> Result<crate::action::ActionCommand, ProtocolError> {
    let end = [DIFF_MARKER, IM_END]
        .iter()
        .filter_map(|m| body.find(m))
        .min()
        .unwrap_or(body.len());
    let mut actions = body[..end]
        .lines()
        .filter_map(|line| line.trim_start().strip_prefix("Action:"));
    let first = actions.next().ok_or(ProtocolError::MissingAction)?;
    if actions.next().is_some() {
        return Err(ProtocolError::MultipleActions);
    }
    Ok(parse_action_with(first.trim(), opts)?)
}

fn parse_all_body(body: &str, opts: &ParseOptions<'_>) -> Result<Turn, ProtocolError> {
    const INSTR: &str = "Low-level Instruction:";
    let body = body.trim_start();
    let rest = body
        .strip_prefix("Thought:")
        .ok_or(ProtocolError::MalformedMonologue("expected `Thought:`"))?;
    let split = rest
        .find(&format!("\n{INSTR}"))
        .ok_or(ProtocolError::MalformedMonologue("expected `Low-level Instruction:`"))?;
    let thought = rest[..split].trim();
    let rest = &rest[split + 1 + INSTR.len()..];
    let instr_end = [rest.find('\n'), rest.find(IM_END)]
        .into_iter()
        .flatten()
        .min()
        .unwrap_or(rest.len());
    let instruction = rest[..instr_end].trim();
    if thought.is_empty() || instruction.is_empty() {
        return Err(ProtocolError::EmptyMonologue);
    }
    let rest = &rest[instr_end..];
    let action = match rest.find(ASSISTANT_OS) {
        Some(pos) => {
            let tail = &rest[pos + ASSISTANT_OS.len()..];
            if tail.contains(ASSISTANT_OS) {
                return Err(ProtocolError::MultipleActions);
            }
            Some(parse_os_body(tail, opts)?)
        }
        None => None,
    };
    Ok(Turn {
        recipient: Recipient::All,
        thought: Some(thought.to_string()),
        low_level_instruction: Some(instruction.to_string()),
        terminator: if action.is_some() {
            Terminator::DiffMarker
        } else {
            Terminator::ImEnd
        },
        action,
    })
}

/// Recovers a [`TrainingExample`] from its rendered text. The image handle
/// is not part of the text and is supplied by the caller.
pub fn parse_training_example(rendered: &str, image_ref: &str) -> Result<TrainingExample, ProtocolError> {
    let bad = ProtocolError::MalformedExample;
    let rest = rendered
        .strip_prefix(&format!("{IM_START}system\n"))
        .ok_or(bad("missing system turn"))?;
    let (system, rest) = rest.split_once(IM_END).ok_or(bad("unterminated system turn"))?;
    let user_head = format!("\n{IM_START}user\n{VISION_PLACEHOLDER}\n{USER_REQUEST}\nInstruction: ");
    let rest = rest.strip_prefix(&user_head).ok_or(bad("missing user turn"))?;
    let gen_at = rest
        .find(&format!("\n{IM_END}\n{IM_START}assistant{RECIPIENT}"))
        .ok_or(bad("missing assistant turn"))?;
    let (user, generation) = rest.split_at(gen_at);
    let generation = &generation[1 + IM_END.len() + 1..];
    let prev_at = user
        .rfind("\nPrevious actions: ")
        .ok_or(bad("missing previous actions"))?;
    let goal = &user[..prev_at];
    let previous = parse_previous(&user[prev_at + "\nPrevious actions: ".len()..])?;

    let turn = parse_model_response_with(
        generation,
        &ParseOptions {
            allow_unregistered: true,
            ..Default::default()
        },
    )?;
    let stage = match turn.recipient {
        Recipient::Os => Stage::Grounding,
        Recipient::All => Stage::Planning,
    };
    let example = TrainingExample {
        stage,
        system: system.to_string(),
        goal: goal.to_string(),
        previous,
        image: image_ref.to_string(),
        turns: vec![turn],
        rendered: rendered.to_string(),
    };
    let rerendered = format!(
        "{}\n{}",
        training_prompt(&example.goal, &super::format_previous_actions(&example.previous)),
        example.turns[0].render()?
    );
    if system != SYSTEM_PROMPT || rerendered != rendered {
        return Err(bad("text is not in canonical layout"));
    }
    Ok(example)
}

fn parse_previous(block: &str) -> Result<Vec<String>, ProtocolError> {
    if block == "None" {
        return Ok(Vec::new());
    }
    block
        .split('\n')
        .enumerate()
        .map(|(i, line)| {
            line.strip_prefix(&format!("Step {}: ", i + 1))
                .map(str::to_string)
                .ok_or(ProtocolError::MalformedExample("bad previous-action line"))
        })
        .collect()
}
