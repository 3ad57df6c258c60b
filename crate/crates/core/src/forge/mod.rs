//! Dataset construction: unify source records, synthesize grounding pairs,
//! pack them per screenshot, and run monologue augmentation rounds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::action::ActionCommand;
use crate::geom::BBox;

mod augment;
mod checklist;
mod pack;
mod synth;
mod unify;

pub use augment::{
    build_augmentation_prompt, check_round, parse_augmentation_response, AugmentError, AugmentationResponse,
    AugmentationRound, AUGMENTATION_TEMPLATE,
};
pub use checklist::{
    implied_classes, merge_verdict, summarize, target_phrase, validate_augmented_step, ChecklistError, ChecklistRecord,
    ChecklistSummary, ChecklistVerdict, Criterion, HumanVerdict, Overall,
};
pub use pack::{default_turn_overhead, pack_grounding, PackConfig, PackError, PackedConversation, PackedTurn};
pub use synth::{synthesize_grounding, SynthConfig, SynthReport, Template, TemplateSet};
pub use unify::{unify_batch, unify_record, SourceRecord, Target, UnifyError, UnifyReport, Unmappable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Text,
    Icon,
    Widget,
    Input,
    Link,
    Button,
    Other,
}

impl Role {
    pub const ALL: [Role; 7] = [
        Role::Text,
        Role::Icon,
        Role::Widget,
        Role::Input,
        Role::Link,
        Role::Button,
        Role::Other,
    ];

    /// Noun used when a template says `{role}`.
    pub fn noun(self) -> &'static str {
        match self {
            Role::Text => "text",
            Role::Icon => "icon",
            Role::Widget => "widget",
            Role::Input => "input field",
            Role::Link => "link",
            Role::Button => "button",
            Role::Other => "element",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementMeta {
    pub element_id: String,
    pub bbox: BBox,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, String>,
}

impl ElementMeta {
    pub fn name(&self) -> Option<&str> {
        self.name.as_deref().map(str::trim).filter(|s| !s.is_empty())
    }

    pub fn attribute(&self, key: &str) -> Option<&str> {
        self.attributes.get(key).map(|s| s.trim()).filter(|s| !s.is_empty())
    }

    /// Template eligibility: something to describe the element with.
    pub fn is_describable(&self) -> bool {
        self.name().is_some() || self.attributes.values().any(|v| !v.trim().is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingExample {
    pub image_ref: String,
    pub instruction: String,
    pub action: ActionCommand,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_id: Option<String>,
}
