use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use unigui_core::action::Platform;
use unigui_core::forge::*;
use unigui_core::ActionCommand;

fn fixture(rel: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", rel].iter().collect();
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn jsonl<T: serde::de::DeserializeOwned>(rel: &str) -> Vec<T> {
    fixture(rel).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn highlight(name: &str) -> ElementMeta {
    serde_json::from_value(serde_json::json!({
        "element_id": "target", "bbox": [0.75, 0.0, 0.875, 0.25], "role": "button", "name": name
    }))
    .unwrap()
}

fn round(goal: &str, prev: &[&str], cur: &str, cmds: &str) -> AugmentationRound {
    AugmentationRound {
        round_id: None,
        goal: goal.into(),
        previous_instructions: prev.iter().map(|s| s.to_string()).collect(),
        current_action_instruction: cur.into(),
        action_commands: cmds.into(),
        highlight: highlight("Search"),
        response: None,
        verdict: None,
    }
}

#[test]
fn augmentation_prompt_golden() {
    let r = round(
        "Buy a pair of running shoes",
        &["Click on the search bar.", "Type 'running shoes' into the search bar."],
        "Click the Search button",
        "pyautogui.click(x=0.82, y=0.11)",
    );
    check_round(&r).unwrap();
    assert_eq!(build_augmentation_prompt(&r), fixture("golden/augmentation_basic.txt"));
}

#[test]
fn augmentation_prompt_empty_history_and_multiline_commands() {
    let r = round(
        "Open the settings app",
        &[],
        "Tap the Settings icon",
        "mobile.open_app(app_name='Settings')\npyautogui.click(x=0.5, y=0.5)",
    );
    check_round(&r).unwrap();
    assert_eq!(
        build_augmentation_prompt(&r),
        fixture("golden/augmentation_empty_history.txt")
    );
}

#[test]
fn augmentation_rejects_bad_commands() {
    let r = round("g", &[], "c", "pyautogui.click(x=0.5)");
    assert!(matches!(
        check_round(&r),
        Err(AugmentError::InvalidCommands { line: 1, .. })
    ));
}

#[test]
fn template_fixture_covers_every_role() {
    let templates: TemplateSet = serde_json::from_str(&fixture("templates/grounding_templates.json")).unwrap();
    for role in Role::ALL {
        let n = templates.iter().filter(|t| t.applies_to(role)).count();
        assert!(n >= 8, "{role:?} has {n} templates");
    }
}

#[test]
fn synthesis_golden() {
    let templates: TemplateSet = serde_json::from_str(&fixture("templates/grounding_templates.json")).unwrap();
    let elements: Vec<ElementMeta> = serde_json::from_str(&fixture("templates/sample_elements.json")).unwrap();
    let report = synthesize_grounding("screen-001", &elements, &templates, 0, &SynthConfig::default());
    assert_eq!(report.skipped_ineligible, 1);
    let got: String = report
        .examples
        .iter()
        .map(|e| serde_json::to_string(e).unwrap() + "\n")
        .collect();
    assert_eq!(got, fixture("golden/synth_sample.jsonl"));
    for ex in &report.examples {
        let el = elements
            .iter()
            .find(|e| e.bbox.contains_strictly(ex.action.target_point().unwrap()));
        assert!(el.is_some());
    }
    let again = synthesize_grounding("screen-001", &elements, &templates, 0, &SynthConfig::default());
    assert_eq!(report, again);
}

#[derive(serde::Deserialize)]
struct PackFixture {
    config: PackConfig,
    examples: Vec<GroundingExample>,
    expected_sizes: Vec<usize>,
    turn_costs: Vec<u64>,
}

#[test]
fn packing_fixture_splits_two_one() {
    let f: PackFixture = serde_json::from_str(&fixture("packing/three_pairs.json")).unwrap();
    for (ex, cost) in f.examples.iter().zip(&f.turn_costs) {
        let text = unigui_core::serialize_action(&ex.action).unwrap();
        assert_eq!(f.config.turn_tokens(&ex.instruction, &text), *cost);
    }
    let packed = pack_grounding(&f.examples, &f.config).unwrap();
    let sizes: Vec<usize> = packed.iter().map(|c| c.turns.len()).collect();
    assert_eq!(sizes, f.expected_sizes);
    assert!(packed.iter().all(|c| c.estimated_tokens <= f.config.budget));
    let roomy = PackConfig {
        budget: f.config.budget + 1,
        ..f.config.clone()
    };
    assert_eq!(pack_grounding(&f.examples, &roomy).unwrap().len(), 1);
}

#[test]
fn unify_fixture_batch() {
    let records: Vec<SourceRecord> = serde_json::from_value(serde_json::json!([
        {"image_ref": "a", "instruction": "tap E", "action_type": "tap", "target": {"bbox": [0.0, 0.0, 0.5, 0.5]}, "source": "aitw"},
        {"image_ref": "a", "instruction": "back", "action_type": "press_back", "source": "aitw"},
        {"image_ref": "a", "instruction": "type", "action_type": "input_text", "text": "hi", "source": "aitw"},
        {"image_ref": "a", "instruction": "drag", "action_type": "drag", "target": {"point": [0.1, 0.1]}, "source": "aitw"},
        {"image_ref": "a", "instruction": "noop", "action_type": "wait", "source": "aitw"}
    ]))
    .unwrap();
    let report = unify_batch(&records, Platform::Mobile);
    assert_eq!(report.total(), records.len());
    assert_eq!(report.examples[0].action, ActionCommand::click(0.25, 0.25));
    assert_eq!(report.examples[1].action, ActionCommand::Back);
    assert_eq!(report.unmappable.len(), 2);
}

#[test]
fn checklist_fixture_counts() {
    let records: Vec<ChecklistRecord> = jsonl("checklist/rounds.jsonl");
    let humans: Vec<HumanVerdict> = jsonl("checklist/human_verdicts.jsonl");
    let by_id: BTreeMap<_, _> = humans.iter().map(|h| (h.round_id.clone(), h)).collect();
    let mut auto_fail = 0;
    let verdicts: Vec<ChecklistVerdict> = records
        .iter()
        .map(|r| {
            check_round(&r.round).unwrap();
            let auto = validate_augmented_step(&r.round, &r.gold_action).unwrap();
            if auto.criterion_match_action == Criterion::Fail {
                auto_fail += 1;
            }
            merge_verdict(&auto, by_id.get(r.round.round_id.as_ref().unwrap()).copied()).unwrap()
        })
        .collect();
    let s = summarize(&verdicts);
    assert_eq!(s.rounds, 90);
    assert_eq!(s.count(Overall::Success), 78);
    assert_eq!(s.count(Overall::Noise), 7);
    assert_eq!(s.count(Overall::Misinterpretation), 5);
    assert_eq!(auto_fail, 3);
}
