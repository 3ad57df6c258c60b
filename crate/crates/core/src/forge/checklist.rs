//! Quality checklist for augmented steps.
//!
//! Only the action-match criterion is automatic. The remaining three and
//! the noise / misinterpretation labels come from a human verdict file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AugmentationRound, ElementMeta};
use crate::action::{ActionClass, ActionCommand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Pass,
    Fail,
    Manual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Overall {
    Success,
    Noise,
    Misinterpretation,
    Pending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChecklistVerdict {
    pub criterion_match_action: Criterion,
    pub criterion_step_intent: Criterion,
    pub criterion_goal_link: Criterion,
    pub criterion_task_help: Criterion,
    pub overall: Overall,
}

impl ChecklistVerdict {
    fn criteria(&self) -> [Criterion; 4] {
        [
            self.criterion_match_action,
            self.criterion_step_intent,
            self.criterion_goal_link,
            self.criterion_task_help,
        ]
    }

    pub fn any_fail(&self) -> bool {
        self.criteria().contains(&Criterion::Fail)
    }
}

/// One line of a human verdict file. Absent fields leave the automatic value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HumanVerdict {
    pub round_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion_match_action: Option<Criterion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion_step_intent: Option<Criterion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion_goal_link: Option<Criterion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion_task_help: Option<Criterion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overall: Option<Overall>,
}

/// A round together with the dataset's gold action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChecklistRecord {
    #[serde(flatten)]
    pub round: AugmentationRound,
    pub gold_action: ActionCommand,
}

#[derive(Debug, Error, PartialEq)]
pub enum ChecklistError {
    #[error("round {0}: success verdict conflicts with a failed criterion")]
    Conflict(String),
    #[error("round has no response")]
    MissingResponse,
}

use ActionClass as C;

/// Instruction verbs and the action classes they can describe.
const LEXICON: &[(&str, &[ActionClass])] = &[
    ("click", &[C::Pointer]),
    ("double click", &[C::Pointer]),
    ("double-click", &[C::Pointer]),
    ("tap", &[C::Pointer]),
    ("touch", &[C::Pointer]),
    ("select", &[C::Pointer]),
    ("choose", &[C::Pointer]),
    ("pick", &[C::Pointer]),
    ("check", &[C::Pointer]),
    ("uncheck", &[C::Pointer]),
    ("toggle", &[C::Pointer]),
    ("long press", &[C::Pointer]),
    ("long-press", &[C::Pointer]),
    ("hover", &[C::Hover]),
    ("move", &[C::Hover]),
    ("drag", &[C::Drag]),
    ("type", &[C::Type]),
    ("write", &[C::Type]),
    ("input", &[C::Type]),
    ("fill", &[C::Type]),
    ("enter", &[C::Type, C::Key]),
    ("search for", &[C::Type]),
    ("press", &[C::Key, C::Pointer]),
    ("hit", &[C::Key]),
    ("scroll", &[C::Scroll]),
    ("swipe", &[C::Scroll]),
    ("go back", &[C::Navigate]),
    ("navigate back", &[C::Navigate]),
    ("return", &[C::Navigate]),
    ("go home", &[C::Navigate]),
    ("go to the home screen", &[C::Navigate]),
    ("open", &[C::OpenApp, C::Pointer]),
    ("launch", &[C::OpenApp]),
    ("answer", &[C::Answer]),
    ("reply", &[C::Answer]),
    ("respond", &[C::Answer]),
    ("report", &[C::Answer]),
    ("finish", &[C::Terminate]),
    ("complete", &[C::Terminate]),
    ("stop", &[C::Terminate]),
    ("end", &[C::Terminate]),
];

const ARTICLES: &[&str] = &["the", "a", "an", "on", "at", "to", "this", "that"];
const ROLE_NOUNS: &[&str] = &[
    "button", "icon", "link", "field", "input", "box", "bar", "tab", "option", "menu", "item", "element", "text",
    "checkbox", "toggle", "switch", "dropdown", "entry", "area",
];
const STOP_WORDS: &[&str] = &[
    "in", "on", "at", "to", "from", "within", "inside", "near", "under", "above", "below", "beside", "for", "so",
    "and", "then", "which", "that", "located", "labeled", "labelled",
];

fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '-' || c == '\''))
        .map(|w| w.trim_matches('\'').to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Earliest verb phrase in the instruction, longest at equal position.
fn find_verb(ws: &[String]) -> Option<(usize, usize, &'static [ActionClass])> {
    for start in 0..ws.len() {
        let best = LEXICON
            .iter()
            .filter_map(|(phrase, classes)| {
                let pw: Vec<&str> = phrase.split(' ').collect();
                let end = start + pw.len();
                (end <= ws.len() && ws[start..end].iter().zip(&pw).all(|(a, b)| a == b)).then_some((pw.len(), *classes))
            })
            .max_by_key(|(len, _)| *len);
        if let Some((len, classes)) = best {
            return Some((start, start + len, classes));
        }
    }
    None
}

/// Classes the instruction's leading verb can stand for; empty if none found.
pub fn implied_classes(instruction: &str) -> &'static [ActionClass] {
    find_verb(&words(instruction)).map_or(&[], |(_, _, c)| c)
}

/// The element the instruction names, normalized to lowercase words with
/// articles and trailing role nouns removed. `None` if nothing is named.
pub fn target_phrase(instruction: &str) -> Option<String> {
    let ws = words(instruction);
    let (_, verb_end, classes) = find_verb(&ws)?;
    let mut rest: &[String] = &ws[verb_end..];
    if classes.contains(&C::Type) {
        // "Type X into the Y field": the target follows the preposition.
        let pos = rest.iter().position(|w| matches!(w.as_str(), "into" | "in" | "on"))?;
        rest = &rest[pos + 1..];
    }
    while rest.first().is_some_and(|w| ARTICLES.contains(&w.as_str())) {
        rest = &rest[1..];
    }
    let end = rest
        .iter()
        .position(|w| STOP_WORDS.contains(&w.as_str()))
        .unwrap_or(rest.len());
    let mut phrase: &[String] = &rest[..end];
    while phrase.last().is_some_and(|w| ROLE_NOUNS.contains(&w.as_str())) {
        phrase = &phrase[..phrase.len() - 1];
    }
    (!phrase.is_empty()).then(|| phrase.join(" "))
}

fn names_element(target: &str, el: &ElementMeta) -> bool {
    let hit = |s: &str| {
        let s = words(s).join(" ");
        !s.is_empty() && (s.contains(target) || target.contains(&s))
    };
    el.name().is_some_and(hit) || el.attributes.values().any(|v| hit(v))
}

fn targets_element(class: ActionClass) -> bool {
    matches!(class, C::Pointer | C::Hover | C::Drag | C::Type)
}

/// Automatic check of the action-match criterion; the others stay manual.
pub fn validate_augmented_step(
    round: &AugmentationRound,
    gold: &ActionCommand,
) -> Result<ChecklistVerdict, ChecklistError> {
    let response = round.response.as_ref().ok_or(ChecklistError::MissingResponse)?;
    let instr = &response.low_level_instruction;
    let gold_class = gold.kind().class();
    let type_ok = implied_classes(instr).contains(&gold_class);
    let target_ok =
        !targets_element(gold_class) || target_phrase(instr).is_none_or(|t| names_element(&t, &round.highlight));
    Ok(ChecklistVerdict {
        criterion_match_action: if type_ok && target_ok {
            Criterion::Pass
        } else {
            Criterion::Fail
        },
        criterion_step_intent: Criterion::Manual,
        criterion_goal_link: Criterion::Manual,
        criterion_task_help: Criterion::Manual,
        overall: Overall::Pending,
    })
}

/// Human overrides win over automatic values. Without a human overall the
/// round is a success only when every criterion passed.
pub fn merge_verdict(
    auto: &ChecklistVerdict,
    human: Option<&HumanVerdict>,
) -> Result<ChecklistVerdict, ChecklistError> {
    let mut v = auto.clone();
    let Some(h) = human else {
        v.overall = if v.criteria().iter().all(|c| *c == Criterion::Pass) {
            Overall::Success
        } else {
            Overall::Pending
        };
        return Ok(v);
    };
    v.criterion_match_action = h.criterion_match_action.unwrap_or(v.criterion_match_action);
    v.criterion_step_intent = h.criterion_step_intent.unwrap_or(v.criterion_step_intent);
    v.criterion_goal_link = h.criterion_goal_link.unwrap_or(v.criterion_goal_link);
    v.criterion_task_help = h.criterion_task_help.unwrap_or(v.criterion_task_help);
    v.overall = match h.overall {
        Some(Overall::Success) if v.any_fail() => return Err(ChecklistError::Conflict(h.round_id.clone())),
        Some(o) => o,
        None if v.criteria().iter().all(|c| *c == Criterion::Pass) => Overall::Success,
        None => Overall::Pending,
    };
    Ok(v)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ChecklistSummary {
    pub rounds: usize,
    pub counts: BTreeMap<Overall, usize>,
    pub success_rate: Option<f64>,
    pub noise_rate: Option<f64>,
    pub misinterpretation_rate: Option<f64>,
}

impl ChecklistSummary {
    pub fn count(&self, o: Overall) -> usize {
        self.counts.get(&o).copied().unwrap_or(0)
    }
}

pub fn summarize(verdicts: &[ChecklistVerdict]) -> ChecklistSummary {
    let mut counts = BTreeMap::new();
    for v in verdicts {
        *counts.entry(v.overall).or_insert(0) += 1;
    }
    let n = verdicts.len();
    let rate = |o: Overall| (n > 0).then(|| *counts.get(&o).unwrap_or(&0) as f64 / n as f64);
    ChecklistSummary {
        rounds: n,
        success_rate: rate(Overall::Success),
        noise_rate: rate(Overall::Noise),
        misinterpretation_rate: rate(Overall::Misinterpretation),
        counts,
    }
}
