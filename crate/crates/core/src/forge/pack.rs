//! Single-image multi-turn packing under a token budget.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::GroundingExample;
use crate::action::{serialize_action, ActionCommand};
use crate::cost::{image_tokens, CostError, TokenCounter};
use crate::protocol::{action_block, training_prompt};

pub const DEFAULT_BUDGET: u64 = 8192;
pub const DEFAULT_IMAGE_SIZE: (u32, u32) = (1280, 720);

#[derive(Debug, Error, PartialEq)]
pub enum PackError {
    #[error("pair `{instruction}` on {image_ref} needs {needed} tokens with its image, budget is {budget}")]
    TurnTooLarge {
        image_ref: String,
        instruction: String,
        needed: u64,
        budget: u64,
    },
    #[error("cannot pack invalid action: {0}")]
    InvalidAction(String),
    #[error(transparent)]
    Cost(#[from] CostError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackConfig {
    pub budget: u64,
    pub per_turn_overhead: u64,
    pub default_image_size: (u32, u32),
    #[serde(default)]
    pub image_sizes: BTreeMap<String, (u32, u32)>,
    #[serde(default)]
    pub counter: TokenCounter,
}

impl Default for PackConfig {
    fn default() -> Self {
        let counter = TokenCounter::default();
        PackConfig {
            budget: DEFAULT_BUDGET,
            per_turn_overhead: default_turn_overhead(&counter),
            default_image_size: DEFAULT_IMAGE_SIZE,
            image_sizes: BTreeMap::new(),
            counter,
        }
    }
}

impl PackConfig {
    pub fn with_budget(budget: u64) -> Self {
        PackConfig {
            budget,
            ..Default::default()
        }
    }

    pub fn image_size(&self, image_ref: &str) -> (u32, u32) {
        self.image_sizes
            .get(image_ref)
            .copied()
            .unwrap_or(self.default_image_size)
    }

    pub fn turn_tokens(&self, instruction: &str, action_text: &str) -> u64 {
        self.counter.count(instruction) + self.counter.count(action_text) + self.per_turn_overhead
    }
}

/// Token count of the Stage-1 scaffold with every slot empty.
pub fn default_turn_overhead(counter: &TokenCounter) -> u64 {
    counter.count(&format!("{}\n{}", training_prompt("", ""), action_block("")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackedTurn {
    pub instruction: String,
    pub action: ActionCommand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackedConversation {
    pub image_ref: String,
    pub turns: Vec<PackedTurn>,
    pub estimated_tokens: u64,
}

/// Greedy first-fit per image, in `(source, instruction, action)` order.
pub fn pack_grounding(
    examples: &[GroundingExample],
    config: &PackConfig,
) -> Result<Vec<PackedConversation>, PackError> {
    let mut groups: BTreeMap<&str, Vec<(&GroundingExample, String)>> = BTreeMap::new();
    for ex in examples {
        let text = serialize_action(&ex.action).map_err(|e| PackError::InvalidAction(e.to_string()))?;
        groups.entry(ex.image_ref.as_str()).or_default().push((ex, text));
    }
    let mut out = Vec::new();
    for (image_ref, mut items) in groups {
        items.sort_by(|(a, at), (b, bt)| (&a.source, &a.instruction, at).cmp(&(&b.source, &b.instruction, bt)));
        let (w, h) = config.image_size(image_ref);
        let image_cost = image_tokens(w, h)?;
        let mut convs: Vec<PackedConversation> = Vec::new();
        for (ex, text) in items {
            let cost = config.turn_tokens(&ex.instruction, &text);
            let turn = PackedTurn {
                instruction: ex.instruction.clone(),
                action: ex.action.clone(),
            };
            match convs.iter_mut().find(|c| c.estimated_tokens + cost <= config.budget) {
                Some(conv) => {
                    conv.estimated_tokens += cost;
                    conv.turns.push(turn);
                }
                None => {
                    let needed = image_cost + cost;
                    if needed > config.budget {
                        return Err(PackError::TurnTooLarge {
                            image_ref: image_ref.to_string(),
                            instruction: ex.instruction.clone(),
                            needed,
                            budget: config.budget,
                        });
                    }
                    convs.push(PackedConversation {
                        image_ref: image_ref.to_string(),
                        turns: vec![turn],
                        estimated_tokens: needed,
                    });
                }
            }
        }
        out.extend(convs);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(image: &str, instr: &str) -> GroundingExample {
        GroundingExample {
            image_ref: image.into(),
            instruction: instr.into(),
            action: ActionCommand::click(0.5, 0.5),
            source: "s".into(),
            template_id: None,
        }
    }

    #[test]
    fn generous_budget_single_conversation() {
        let exs = vec![ex("a", "one"), ex("a", "two"), ex("a", "three")];
        let out = pack_grounding(&exs, &PackConfig::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].turns.len(), 3);
        assert!(pack_grounding(&[], &PackConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn turn_too_large() {
        let cfg = PackConfig::with_budget(1196);
        assert!(matches!(
            pack_grounding(&[ex("a", "x")], &cfg),
            Err(PackError::TurnTooLarge { .. })
        ));
    }

    #[test]
    fn overhead_is_scaffold_length() {
        let c = TokenCounter::default();
        let scaffold = format!("{}\n{}", training_prompt("", ""), action_block(""));
        assert_eq!(default_turn_overhead(&c), (scaffold.chars().count() as u64).div_ceil(4));
    }
}
