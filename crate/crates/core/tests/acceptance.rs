//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; exits non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use unigui_core::action::keys::named_keys;
use unigui_core::action::{check_command, parse_action_with, ActionKind, ActionValue, ParseOptions, Point};
use unigui_core::cost::{
    image_tokens, round3, step_token_report, usd_efficiency, CostLedger, PromptParts, TokenCounter,
};
use unigui_core::forge::{
    merge_verdict, pack_grounding, summarize, validate_augmented_step, ChecklistRecord, GroundingExample, HumanVerdict,
    Overall, PackConfig,
};
use unigui_core::geom::BBox;
use unigui_core::metrics::{
    classify_error, error_report, operation_f1, score_offline, ErrorClass, GoldStep, ModeOutcomes, PredStep,
};
use unigui_core::protocol::{build_inference_prompt, build_stage1_example, build_stage2_example, PromptMode};
use unigui_core::sim::{load_world, run_episode, Outcome, ScriptedPolicy};
use unigui_core::{serialize_action, ActionCommand, FunctionRegistry};

// Tolerances and sizes.
const F1_PIN_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-12;
const ROUND_TRIP_CASES: usize = 10_000;
const PACKING_CASES: usize = 1_000;
const METRIC_CASES: usize = 1_000;
const EPISODE_RUNS: usize = 100;
const CHECKLIST_RATE_TOL_PP: f64 = 0.1;
const ERROR_SHARE_TOL: f64 = 1e-9;
const ERROR_TEXT_TOL: f64 = 0.02;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn fixture(rel: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", rel].iter().collect();
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

// 1
fn token_pin() -> Check {
    let n = image_tokens(1280, 720).map_err(|e| e.to_string())?;
    ensure(n == 1196, || format!("image_tokens(1280, 720) = {n}"))?;
    Ok(format!("1280x720 -> {n} tokens"))
}

// 2
#[derive(Deserialize)]
struct StepTokens {
    html_step: PromptParts,
    vision_step: PromptParts,
}

fn cost_fixture() -> Check {
    let counter = TokenCounter::from_json(&fixture("cost/counter.json")).map_err(|e| e.to_string())?;
    let steps: StepTokens = serde_json::from_str(&fixture("cost/step_tokens.json")).map_err(|e| e.to_string())?;
    let html = step_token_report(&steps.html_step, &counter).map_err(|e| e.to_string())?;
    let vision = step_token_report(&steps.vision_step, &counter).map_err(|e| e.to_string())?;
    ensure(html == 3899 && vision == 1479, || {
        format!("tokens/step html={html} vision={vision}")
    })?;

    let mut out = Vec::new();
    for (file, want, tokens) in [
        ("html_gpt4o_ledger.csv", 0.142, html),
        ("vision_unified_ledger.csv", 0.012, vision),
    ] {
        let ledger = CostLedger::from_csv(fixture(&format!("cost/{file}")).as_bytes()).map_err(|e| e.to_string())?;
        let eff = usd_efficiency(&ledger).map_err(|e| e.to_string())?;
        ensure((round3(eff) - want).abs() < 1e-12, || {
            format!("{file}: efficiency {eff}")
        })?;
        ensure(ledger.input_tokens_per_step.iter().all(|&t| t == tokens), || {
            format!("{file}: ledger token column disagrees with the step report")
        })?;
        out.push(format!("{:.3}", round3(eff)));
    }
    Ok(format!(
        "tokens/step 3899 & 1479; USD/successful step {} & {}",
        out[0], out[1]
    ))
}

// 3
fn schema_goldens() -> Check {
    let click = ActionCommand::click(0.5, 0.25);
    let prev = strings(&["Open the main menu.", "Scroll down to the bottom of the menu."]);
    let cases = [
        (
            "stage1_basic",
            build_stage1_example("open settings", &[], "img", &click).map(|e| e.rendered),
        ),
        (
            "stage1_history",
            build_stage1_example("open settings", &prev, "img", &click).map(|e| e.rendered),
        ),
        (
            "stage2_basic",
            build_stage2_example(
                "Search for running shoes",
                &strings(&["Click on the search bar."]),
                "img",
                "The search bar is focused, so I should enter the query now.",
                "Type 'running shoes' into the search bar.",
                &ActionCommand::Write {
                    message: "running shoes".into(),
                },
            )
            .map(|e| e.rendered),
        ),
    ];
    for (name, got) in cases {
        let got = got.map_err(|e| format!("{name}: {e}"))?;
        ensure(got == fixture(&format!("golden/{name}.txt")), || {
            format!("{name} differs from golden")
        })?;
    }
    let goal = "Find the cheapest flight to Tokyo";
    let hist = strings(&[
        "Click on the destination field.",
        "Type Tokyo into the destination field.",
    ]);
    let sp = build_inference_prompt(PromptMode::SelfPlan, goal, &hist, "img").map_err(|e| e.to_string())?;
    let ep = build_inference_prompt(PromptMode::EnforcedPlan, goal, &hist, "img").map_err(|e| e.to_string())?;
    ensure(sp == fixture("golden/inference_self_plan.txt"), || {
        "self-plan prompt differs".into()
    })?;
    ensure(ep == fixture("golden/inference_enforced_plan.txt"), || {
        "enforced-plan prompt differs".into()
    })?;
    let common = sp.strip_suffix(PromptMode::SelfPlan.control_suffix());
    ensure(
        common.is_some() && common == ep.strip_suffix(PromptMode::EnforcedPlan.control_suffix()),
        || "modes differ outside the control suffix".into(),
    )?;
    Ok("5 goldens byte-exact; modes differ only by control suffix".into())
}

// 4
fn random_text(rng: &mut ChaCha8Rng) -> String {
    const POOL: &[char] = &[
        'a', 'Z', '7', ' ', '\'', '"', '\\', '\n', '\t', ',', '(', ')', '=', '[', 'é', '東', '😀',
    ];
    (0..rng.gen_range(0..12)).map(|_| *POOL.choose(rng).unwrap()).collect()
}

fn random_coord(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..4) {
        0 => 0.0,
        1 => 1.0,
        2 => f64::from(rng.gen_range(0..=1000u32)) / 1000.0,
        _ => rng.gen_range(0.0..=1.0),
    }
}

fn random_key(rng: &mut ChaCha8Rng, named: &[&str]) -> String {
    if rng.gen_bool(0.5) {
        named.choose(rng).unwrap().to_string()
    } else {
        char::from(rng.gen_range(b'a'..=b'z')).to_string()
    }
}

fn random_command(rng: &mut ChaCha8Rng, kind_index: usize, named: &[&str]) -> ActionCommand {
    let mut xy = || (random_coord(rng), random_coord(rng));
    match kind_index {
        0 => {
            let (x, y) = xy();
            ActionCommand::MoveTo { x, y }
        }
        1 => {
            let (x, y) = xy();
            ActionCommand::Click { x, y }
        }
        2 => ActionCommand::Write {
            message: random_text(rng),
        },
        3 => ActionCommand::Press {
            key: random_key(rng, named),
        },
        4 => ActionCommand::Hotkey {
            keys: (0..rng.gen_range(2..5)).map(|_| random_key(rng, named)).collect(),
        },
        5 => ActionCommand::Scroll {
            clicks: if rng.gen_bool(0.5) {
                f64::from(rng.gen_range(-20i32..=20))
            } else {
                rng.gen_range(-50.0..50.0)
            },
        },
        6 => {
            let (x, y) = xy();
            ActionCommand::DragTo { x, y }
        }
        7 => {
            let (x, y) = xy();
            ActionCommand::SelectOption {
                x,
                y,
                value: random_text(rng),
            }
        }
        8 => {
            let (a, b) = xy();
            let (c, d) = xy();
            ActionCommand::Swipe {
                from: Point::new(a, b),
                to: Point::new(c, d),
            }
        }
        9 => ActionCommand::Home,
        10 => ActionCommand::Back,
        11 => ActionCommand::OpenApp {
            app_name: random_text(rng),
        },
        12 => {
            let (x, y) = xy();
            ActionCommand::LongPress { x, y }
        }
        13 => ActionCommand::Terminate {
            status: if rng.gen_bool(0.5) { "success" } else { "failure" }.into(),
        },
        14 => ActionCommand::Answer {
            answer: random_text(rng),
        },
        _ => {
            let name = format!("desktop.plugin_{}", rng.gen_range(0..50));
            let args = (0..rng.gen_range(0..4))
                .map(|i| {
                    let value = match rng.gen_range(0..3) {
                        0 => ActionValue::Number(rng.gen_range(-1e6..1e6)),
                        1 => ActionValue::Text(random_text(rng)),
                        _ => ActionValue::Point(Point::new(random_coord(rng), random_coord(rng))),
                    };
                    (format!("p{i}"), value)
                })
                .collect();
            ActionCommand::PluginCall { name, args }
        }
    }
}

fn parser_round_trip() -> Check {
    let named: Vec<&str> = named_keys().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = ParseOptions {
        allow_unregistered: true,
        ..Default::default()
    };
    let mut per_kind: BTreeMap<String, usize> = BTreeMap::new();
    let kinds = ActionKind::BUILTIN.len() + 1;
    for i in 0..ROUND_TRIP_CASES {
        let cmd = random_command(&mut rng, i % kinds, &named);
        let text = serialize_action(&cmd).map_err(|e| format!("{cmd:?}: {e}"))?;
        let back = parse_action_with(&text, &opts).map_err(|e| format!("{text}: {e}"))?;
        ensure(back == cmd, || format!("round trip changed {text}"))?;
        *per_kind.entry(format!("{:?}", cmd.kind())).or_default() += 1;
    }
    ensure(per_kind.len() == kinds, || format!("kinds covered: {}", per_kind.len()))?;
    Ok(format!("{ROUND_TRIP_CASES} commands, {kinds} kinds, 0 failures"))
}

// 5
fn oracle_image_tokens(w: u32, h: u32) -> u64 {
    let side = |v: u32| (f64::from(v) / 28.0 + 0.5).floor() as u64;
    side(w) * side(h)
}

fn oracle_text_tokens(s: &str) -> u64 {
    (s.chars().count() as u64).div_ceil(4)
}

fn random_pairs(seed: u64) -> Vec<GroundingExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rng.gen_range(0..60))
        .map(|_| {
            let word = ["open", "tap", "menu", "search", "cart"].choose(&mut rng).unwrap();
            GroundingExample {
                image_ref: format!("img-{}", rng.gen_range(0..4)),
                instruction: vec![*word; rng.gen_range(1..300)].join(" "),
                action: ActionCommand::click(random_coord(&mut rng), random_coord(&mut rng)),
                source: ["web", "mobile"].choose(&mut rng).unwrap().to_string(),
                template_id: None,
            }
        })
        .collect()
}

fn packing_properties() -> Check {
    let cfg = PackConfig::with_budget(8192);
    let mut conversations = 0;
    let mut split_images = 0;
    for seed in 0..PACKING_CASES as u64 {
        let pairs = random_pairs(seed);
        let packed = pack_grounding(&pairs, &cfg).map_err(|e| e.to_string())?;
        let key = |img: &str, instr: &str, a: &ActionCommand| {
            (img.to_string(), instr.to_string(), serialize_action(a).unwrap())
        };
        let mut want: Vec<_> = pairs
            .iter()
            .map(|p| key(&p.image_ref, &p.instruction, &p.action))
            .collect();
        let mut got: Vec<_> = packed
            .iter()
            .flat_map(|c| {
                c.turns
                    .iter()
                    .map(move |t| key(&c.image_ref, &t.instruction, &t.action))
            })
            .collect();
        want.sort();
        got.sort();
        ensure(want == got, || format!("seed {seed}: multiset not conserved"))?;
        let mut per_image: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &packed {
            let tokens = oracle_image_tokens(1280, 720)
                + c.turns
                    .iter()
                    .map(|t| {
                        oracle_text_tokens(&t.instruction)
                            + oracle_text_tokens(&serialize_action(&t.action).unwrap())
                            + cfg.per_turn_overhead
                    })
                    .sum::<u64>();
            ensure(tokens <= 8192 && tokens == c.estimated_tokens, || {
                format!("seed {seed}: {tokens} tokens")
            })?;
            *per_image.entry(&c.image_ref).or_default() += 1;
        }
        split_images += per_image.values().filter(|&&n| n > 1).count();
        conversations += packed.len();
        ensure(
            pack_grounding(&random_pairs(seed), &cfg).as_ref() == Ok(&packed),
            || format!("seed {seed}: rerun differs"),
        )?;
        let mut shuffled = pairs.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
        ensure(pack_grounding(&shuffled, &cfg).as_ref() == Ok(&packed), || {
            format!("seed {seed}: order dependent")
        })?;
    }
    ensure(split_images > 0, || "no input needed more than one conversation".into())?;
    Ok(format!(
        "{PACKING_CASES} inputs, {conversations} conversations ({split_images} images split), budget 8192 held"
    ))
}

// 6
fn oracle_tokens(cmd: &ActionCommand) -> Vec<String> {
    let mut toks: Vec<String> = match cmd {
        ActionCommand::Click { .. } => vec!["click".into()],
        ActionCommand::Write { message } => std::iter::once("type".to_string())
            .chain(message.split(' ').filter(|w| !w.is_empty()).map(str::to_string))
            .collect(),
        ActionCommand::Scroll { clicks } => vec!["scroll".into(), if *clicks >= 0.0 { "up" } else { "down" }.into()],
        ActionCommand::Press { key } => vec!["press".into(), key.clone()],
        _ => unreachable!(),
    };
    toks.iter_mut().for_each(|t| *t = t.to_lowercase());
    toks
}

fn oracle_f1(p: &[String], g: &[String]) -> f64 {
    if p.is_empty() && g.is_empty() {
        return 1.0;
    }
    let mut pool = g.to_vec();
    let mut overlap = 0usize;
    for t in p {
        if let Some(i) = pool.iter().position(|x| x == t) {
            pool.remove(i);
            overlap += 1;
        }
    }
    2.0 * overlap as f64 / (p.len() + g.len()) as f64
}

fn random_step_action(rng: &mut ChaCha8Rng) -> ActionCommand {
    const WORDS: [&str; 5] = ["best", "seller", "sellers", "Best", "shoes"];
    match rng.gen_range(0..4) {
        0 => ActionCommand::click(random_coord(rng), random_coord(rng)),
        1 => ActionCommand::Write {
            message: (0..rng.gen_range(0..5))
                .map(|_| *WORDS.choose(rng).unwrap())
                .collect::<Vec<_>>()
                .join(" "),
        },
        2 => ActionCommand::Scroll {
            clicks: if rng.gen_bool(0.5) { 5.0 } else { -5.0 },
        },
        _ => ActionCommand::Press {
            key: if rng.gen_bool(0.5) { "enter" } else { "tab" }.into(),
        },
    }
}

fn metric_oracle() -> Check {
    let pin = operation_f1("TYPE best sellers", "TYPE best seller");
    ensure((pin - 2.0 / 3.0).abs() <= F1_PIN_TOL, || format!("pinned F1 = {pin}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..METRIC_CASES {
        let n = rng.gen_range(1..=10);
        let mut golds = Vec::new();
        let mut preds = Vec::new();
        let (mut hits, mut boxed, mut f1, mut ok) = (0usize, 0usize, 0.0, 0usize);
        for _ in 0..n {
            let (g, p) = (random_step_action(&mut rng), random_step_action(&mut rng));
            let b = rng.gen_bool(0.7).then(|| {
                let (x0, y0) = (
                    f64::from(rng.gen_range(0..8u32)) / 10.0,
                    f64::from(rng.gen_range(0..8u32)) / 10.0,
                );
                BBox::new(x0, y0, x0 + 0.2, y0 + 0.2).unwrap()
            });
            let hit = b.map(|b| match p {
                ActionCommand::Click { x, y } => x >= b.x0 && x <= b.x1 && y >= b.y0 && y <= b.y1,
                _ => false,
            });
            if let Some(h) = hit {
                boxed += 1;
                hits += usize::from(h);
            }
            let (pt, gt) = (oracle_tokens(&p), oracle_tokens(&g));
            f1 += oracle_f1(&pt, &gt);
            let same_kind = std::mem::discriminant(&p) == std::mem::discriminant(&g);
            let payload_ok = oracle_f1(&pt[1..], &gt[1..]) == 1.0;
            ok += usize::from(hit.unwrap_or(true) && same_kind && payload_ok);
            golds.push(GoldStep::new(g, b));
            preds.push(PredStep::new(p));
        }
        let r = score_offline(&preds, &golds).map_err(|e| e.to_string())?;
        let close = |got: Option<f64>, want: Option<f64>| match (got, want) {
            (Some(a), Some(b)) => (a - b).abs() <= ORACLE_TOL,
            (None, None) => true,
            _ => false,
        };
        let ele = (boxed > 0).then(|| hits as f64 / boxed as f64);
        ensure(close(r.element_accuracy.value, ele), || format!("case {case}: Ele.Acc"))?;
        ensure(close(r.operation_f1.value, Some(f1 / n as f64)), || {
            format!("case {case}: Op.F1")
        })?;
        ensure(close(r.step_sr.value, Some(ok as f64 / n as f64)), || {
            format!("case {case}: Step SR")
        })?;
    }
    Ok(format!(
        "{METRIC_CASES} sets match brute force within {ORACLE_TOL:e}; F1 pin {pin:.9}"
    ))
}

// 7
#[derive(Deserialize)]
struct Script {
    task_id: String,
    mode: PromptMode,
    responses: Vec<String>,
}

fn episode_determinism() -> Check {
    let world = load_world(&fixture("worlds/login.json")).map_err(|e| e.to_string())?;
    let script: Script = serde_json::from_str(&fixture("worlds/login_script.json")).map_err(|e| e.to_string())?;
    let task = world.task(&script.task_id).ok_or("task missing")?;
    let mut first: Option<String> = None;
    for run in 0..EPISODE_RUNS {
        let traj = run_episode(
            &world,
            task,
            &mut ScriptedPolicy::new(script.responses.clone()),
            script.mode,
        );
        ensure(traj.outcome == Outcome::Success && traj.steps.len() == 2, || {
            format!("run {run}: {:?} after {} steps", traj.outcome, traj.steps.len())
        })?;
        let text = traj.to_jsonl();
        match &first {
            None => first = Some(text),
            Some(f) => ensure(*f == text, || format!("run {run} differs"))?,
        }
    }
    Ok(format!("{EPISODE_RUNS} runs byte-identical; success in 2 steps"))
}

// 8
fn validation_taxonomy() -> Check {
    let web = FunctionRegistry::web();
    let mobile = FunctionRegistry::mobile();
    let desktop = FunctionRegistry::desktop();
    let table: [(&str, &FunctionRegistry, &str); 12] = [
        ("pyautogui.click(x=1.5, y=0.5)", &web, "coordinate_out_of_range"),
        ("pyautogui.moveTo(x=0.5, y=-0.2)", &desktop, "coordinate_out_of_range"),
        ("mobile.long_press(x=0.5, y=2)", &mobile, "coordinate_out_of_range"),
        ("desktop.open_terminal()", &desktop, "unknown_function"),
        ("pyautogui.tripleClick(x=0.5, y=0.5)", &web, "unknown_function"),
        ("mobile.home()", &web, "function_not_available"),
        (
            "browser.select_option(x=0.5, y=0.5, value='Red')",
            &mobile,
            "function_not_available",
        ),
        ("pyautogui.write()", &desktop, "missing_argument"),
        ("mobile.open_app()", &mobile, "missing_argument"),
        ("pyautogui.click(x='left', y=0.5)", &web, "type_mismatch"),
        ("terminate(status='failure')", &mobile, "enum_value_not_allowed"),
        ("pyautogui.press(keys='hyperspace')", &desktop, "unknown_key"),
    ];
    for (text, reg, want) in table {
        match check_command(text, reg) {
            Ok(_) => return Err(format!("`{text}` was accepted")),
            Err(e) => {
                let classes = e.classes();
                ensure(classes.first() == Some(&want), || {
                    format!("`{text}`: got {classes:?}, want {want}")
                })?;
            }
        }
    }
    Ok("12/12 rows produce the specified class".into())
}

// 9
fn checklist_fixture() -> Check {
    let parse_lines = |rel: &str| -> Result<Vec<serde_json::Value>, String> {
        fixture(rel)
            .lines()
            .map(|l| serde_json::from_str(l).map_err(|e| e.to_string()))
            .collect()
    };
    let rounds: Vec<ChecklistRecord> = parse_lines("checklist/rounds.jsonl")?
        .into_iter()
        .map(|v| serde_json::from_value(v).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let human: BTreeMap<String, HumanVerdict> = parse_lines("checklist/human_verdicts.jsonl")?
        .into_iter()
        .map(|v| {
            serde_json::from_value::<HumanVerdict>(v)
                .map(|h| (h.round_id.clone(), h))
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let mut verdicts = Vec::new();
    let mut auto_fail = 0;
    for rec in &rounds {
        let auto = validate_augmented_step(&rec.round, &rec.gold_action).map_err(|e| e.to_string())?;
        auto_fail += usize::from(auto.any_fail());
        let h = rec.round.round_id.as_ref().and_then(|id| human.get(id));
        verdicts.push(merge_verdict(&auto, h).map_err(|e| e.to_string())?);
    }
    let s = summarize(&verdicts);
    let pct = |o: Overall| 100.0 * s.count(o) as f64 / s.rounds as f64;
    let (succ, noise, mis) = (
        pct(Overall::Success),
        pct(Overall::Noise),
        pct(Overall::Misinterpretation),
    );
    ensure(s.rounds == 90 && s.count(Overall::Success) == 78, || {
        format!("{} / {}", s.count(Overall::Success), s.rounds)
    })?;
    for (got, want, name) in [
        (succ, 86.7, "success"),
        (noise, 7.8, "noise"),
        (mis, 5.5, "misinterpretation"),
    ] {
        ensure((got - want).abs() <= CHECKLIST_RATE_TOL_PP, || {
            format!("{name} {got:.2}% vs {want}%")
        })?;
    }
    Ok(format!(
        "78/90 = {succ:.1}% success, noise {noise:.1}%, misinterpretation {mis:.2}% ({auto_fail} caught automatically)"
    ))
}

// 10
#[derive(Deserialize)]
struct ErrorRow {
    gold: GoldStep,
    pred: PredStep,
    self_plan: bool,
    enforced_plan: bool,
    annotated_class: String,
}

fn error_taxonomy() -> Check {
    let rows: Vec<ErrorRow> = fixture("errors/self_plan_50.jsonl")
        .lines()
        .map(|l| serde_json::from_str(l).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let classes: Vec<ErrorClass> = rows
        .iter()
        .map(|r| {
            classify_error(
                &r.pred,
                &r.gold,
                ModeOutcomes {
                    self_plan: r.self_plan,
                    enforced_plan: r.enforced_plan,
                },
            )
        })
        .collect();
    for (row, class) in rows.iter().zip(&classes) {
        ensure(class.as_str() == row.annotated_class, || {
            format!("{:?} vs {}", class, row.annotated_class)
        })?;
    }
    let report = error_report(&classes);
    let total: usize = report.counts.values().sum();
    ensure(rows.len() == 50 && total == 50, || {
        format!("partition covers {total} of {}", rows.len())
    })?;
    let sp = |c| report.self_plan.get(&c).copied().unwrap_or(f64::NAN);
    let ep = |c| report.enforced_plan.get(&c).copied().unwrap_or(f64::NAN);
    let pinned = [
        (sp(ErrorClass::Ambiguous), 0.42),
        (sp(ErrorClass::Grounding), 0.58),
        (ep(ErrorClass::Ambiguous), 0.42),
        (ep(ErrorClass::Grounding), 0.38),
        (ep(ErrorClass::PlanningBonus), 0.20),
    ];
    for (got, want) in pinned {
        ensure((got - want).abs() <= ERROR_SHARE_TOL, || {
            format!("share {got} vs {want}")
        })?;
    }
    ensure((sp(ErrorClass::Ambiguous) - 0.40).abs() <= ERROR_TEXT_TOL, || {
        "ambiguous share far from 40%".into()
    })?;
    Ok(format!(
        "4 classes partition 50; self-plan {:.2}/{:.2}, enforced {:.2}/{:.2}/{:.2}",
        sp(ErrorClass::Ambiguous),
        sp(ErrorClass::Grounding),
        ep(ErrorClass::Ambiguous),
        ep(ErrorClass::Grounding),
        ep(ErrorClass::PlanningBonus)
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("token pin", token_pin, Duration::from_millis(1)),
        ("cost fixture", cost_fixture, Duration::from_secs(1)),
        ("schema goldens", schema_goldens, Duration::from_secs(1)),
        ("parser round trip", parser_round_trip, Duration::from_secs(30)),
        ("packing properties", packing_properties, Duration::from_secs(30)),
        ("metric oracle", metric_oracle, Duration::from_secs(30)),
        ("episode determinism", episode_determinism, Duration::from_secs(5)),
        ("validation taxonomy", validation_taxonomy, Duration::from_secs(1)),
        ("checklist fixture", checklist_fixture, Duration::from_secs(1)),
        ("error taxonomy", error_taxonomy, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|d| {
            if elapsed <= limit {
                Ok(d)
            } else {
                Err(format!("{d}; took {elapsed:?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(detail) => println!("criterion {:>2} {name:<20} PASS  {detail}  [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name:<20} FAIL  {detail}  [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
