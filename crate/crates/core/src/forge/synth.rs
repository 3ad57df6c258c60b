//! Template-driven grounding synthesis from element metadata.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ElementMeta, GroundingExample, Role};
use crate::action::ActionCommand;

pub const SYNTH_SOURCE: &str = "synthetic";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub template_id: String,
    /// Roles the template applies to; empty means every role.
    #[serde(default)]
    pub role_filter: Vec<Role>,
    /// Text with `{name}`, `{role}` and `{attr.KEY}` slots.
    pub pattern: String,
}

pub type TemplateSet = Vec<Template>;

impl Template {
    pub fn applies_to(&self, role: Role) -> bool {
        self.role_filter.is_empty() || self.role_filter.contains(&role)
    }

    /// Fills every slot, or `None` if some slot has no value for this element.
    pub fn fill(&self, el: &ElementMeta) -> Option<String> {
        let mut out = String::new();
        let mut rest = self.pattern.as_str();
        while let Some(open) = rest.find('{') {
            out.push_str(&rest[..open]);
            let close = rest[open..].find('}')? + open;
            let slot = &rest[open + 1..close];
            let value = match slot {
                "name" => el.name()?,
                "role" => el.role.noun(),
                _ => el.attribute(slot.strip_prefix("attr.")?)?,
            };
            out.push_str(value);
            rest = &rest[close + 1..];
        }
        out.push_str(rest);
        Some(out)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Keep at most this many instructions per element, sampled with the seed.
    #[serde(default)]
    pub per_element: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SynthReport {
    pub examples: Vec<GroundingExample>,
    /// Elements with no name and no usable attribute.
    pub skipped_ineligible: usize,
    /// Eligible elements that no template could fill.
    pub unmatched: usize,
}

/// One Click-at-center example per filled template, exact-text deduplicated
/// per element. Output order follows element order, then template order.
pub fn synthesize_grounding(
    image_ref: &str,
    elements: &[ElementMeta],
    templates: &[Template],
    seed: u64,
    config: &SynthConfig,
) -> SynthReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SynthReport::default();
    for el in elements {
        if !el.is_describable() {
            report.skipped_ineligible += 1;
            continue;
        }
        let mut seen = BTreeSet::new();
        let mut filled: Vec<(&Template, String)> = Vec::new();
        for t in templates.iter().filter(|t| t.applies_to(el.role)) {
            if let Some(text) = t.fill(el) {
                if seen.insert(text.clone()) {
                    filled.push((t, text));
                }
            }
        }
        if filled.is_empty() {
            report.unmatched += 1;
            continue;
        }
        if let Some(k) = config.per_element {
            if k < filled.len() {
                let mut keep = sample(&mut rng, filled.len(), k).into_vec();
                keep.sort_unstable();
                filled = keep.into_iter().map(|i| filled[i].clone()).collect();
            }
        }
        let c = el.bbox.center();
        for (t, instruction) in filled {
            report.examples.push(GroundingExample {
                image_ref: image_ref.to_string(),
                instruction,
                action: ActionCommand::click(c.x, c.y),
                source: SYNTH_SOURCE.to_string(),
                template_id: Some(t.template_id.clone()),
            });
        }
    }
    report
}
