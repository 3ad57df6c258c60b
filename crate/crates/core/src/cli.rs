//! The `unigui` command line.
//!
//! Settings resolve as flags, then `AGUVIS_*` environment variables, then
//! the TOML file named by `--config`. Every subcommand prints one JSON
//! summary line on stdout and writes its artifacts under `--out`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::action::{check_command, parse_action, render_function_docs, serialize_action, FunctionRegistry, Platform};
use crate::cost::{step_token_report, CostLedger, CostReport, PromptParts, TokenCounter};
use crate::forge::{
    build_augmentation_prompt, check_round, merge_verdict, pack_grounding, summarize, synthesize_grounding,
    unify_batch, validate_augmented_step, AugmentationRound, ChecklistRecord, ElementMeta, GroundingExample,
    HumanVerdict, PackConfig, SourceRecord, SynthConfig, TemplateSet,
};
use crate::metrics::{
    classify_error, error_report, score_offline_with, ErrorClass, GoldStep, ModeOutcomes, PredStep,
    DEFAULT_OP_F1_THRESHOLD,
};
use crate::protocol::{build_inference_prompt, build_stage1_example, build_stage2_example, PromptMode};
use crate::sim::{load_world, run_episode_with, NoiseConfig, RunOptions, ScriptedPolicy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_CONFIG: i32 = 78;

const DEFAULT_BUDGET: u64 = 8192;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) => EXIT_DATA,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "unigui",
    version,
    about = "Action language, data pipeline, simulator and metrics for pure-vision GUI agents",
    after_help = "Settings precedence: command-line flags, then AGUVIS_* environment variables, then the --config file.\n\
                  Exit codes: 0 ok, 1 validation failure, 2 I/O or schema error, 64 usage error, 78 config error."
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct GlobalOpts {
    /// TOML file with default settings.
    #[arg(long, global = true, env = "AGUVIS_CONFIG")]
    config: Option<PathBuf>,
    /// Registry preset (web, mobile, desktop) or JSON file.
    #[arg(long, global = true, env = "AGUVIS_REGISTRY")]
    registry: Option<String>,
    /// Simulator world (JSON).
    #[arg(long, global = true, env = "AGUVIS_WORLD")]
    world: Option<PathBuf>,
    /// Grounding instruction templates (JSON).
    #[arg(long, global = true, env = "AGUVIS_TEMPLATES")]
    templates: Option<PathBuf>,
    /// Token budget per packed conversation [default: 8192].
    #[arg(long, global = true, env = "AGUVIS_BUDGET")]
    budget: Option<u64>,
    /// Inference prompt mode [default: self-plan].
    #[arg(long, global = true, env = "AGUVIS_MODE", value_enum)]
    mode: Option<ModeArg>,
    /// Token counter fixture (JSON with `divisor` and `table`).
    #[arg(long, global = true, env = "AGUVIS_COUNTER")]
    counter: Option<PathBuf>,
    /// Output directory [default: .].
    #[arg(long, global = true, env = "AGUVIS_OUT")]
    out: Option<PathBuf>,
    /// Seed for every stochastic choice [default: 0].
    #[arg(long, global = true, env = "AGUVIS_SEED")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    SelfPlan,
    EnforcedPlan,
}

impl From<ModeArg> for PromptMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::SelfPlan => PromptMode::SelfPlan,
            ModeArg::EnforcedPlan => PromptMode::EnforcedPlan,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    registry: Option<String>,
    world: Option<PathBuf>,
    templates: Option<PathBuf>,
    budget: Option<u64>,
    mode: Option<ModeArg>,
    counter: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub registry: Option<String>,
    pub world: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub budget: u64,
    pub mode: PromptMode,
    pub counter: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
}

fn resolve(g: GlobalOpts) -> Result<RunConfig, CliError> {
    let file = match &g.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            toml::from_str::<ConfigFile>(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let cfg = RunConfig {
        registry: g.registry.or(file.registry),
        world: g.world.or(file.world),
        templates: g.templates.or(file.templates),
        budget: g.budget.or(file.budget).unwrap_or(DEFAULT_BUDGET),
        mode: g.mode.or(file.mode).map(PromptMode::from).unwrap_or_default(),
        counter: g.counter.or(file.counter),
        out: g.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
        seed: g.seed.or(file.seed).unwrap_or(0),
    };
    for path in [&cfg.world, &cfg.templates, &cfg.counter].into_iter().flatten() {
        if !path.is_file() {
            return Err(CliError::Config(format!("{} is not a readable file", path.display())));
        }
    }
    Ok(cfg)
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse one command and print its syntax tree as JSON.
    Parse { text: String },
    /// Check commands against the registry.
    Validate {
        commands: Vec<String>,
        /// File with one command per line.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Synthesize grounding pairs from element metadata.
    Synth {
        /// JSON array of elements.
        elements: PathBuf,
        #[arg(long, default_value = "screen")]
        image_ref: String,
        /// Keep at most this many instructions per element.
        #[arg(long)]
        per_element: Option<usize>,
    },
    /// Convert platform-native records (JSONL) to unified commands.
    Unify {
        input: PathBuf,
        #[arg(long, value_enum)]
        platform: PlatformArg,
    },
    /// Pack grounding pairs (JSONL) into single-image conversations.
    Pack {
        input: PathBuf,
        /// JSON map of image_ref to [width, height].
        #[arg(long)]
        image_sizes: Option<PathBuf>,
    },
    /// Render a prompt.
    Prompt {
        #[arg(value_enum)]
        kind: PromptKind,
        #[arg(long)]
        goal: Option<String>,
        /// Earlier low-level instruction; repeat in order.
        #[arg(long = "previous")]
        previous: Vec<String>,
        #[arg(long)]
        action: Option<String>,
        #[arg(long)]
        thought: Option<String>,
        #[arg(long)]
        instruction: Option<String>,
        /// Augmentation round (JSON) for `augment`.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run a scripted episode in a world.
    Run {
        /// JSON with `responses` and optionally `task_id`.
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        task: Option<String>,
        /// Probability of dropping each effect, drawn with --seed.
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Score predictions against gold steps (JSONL, aligned by line).
    Score {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long, default_value_t = DEFAULT_OP_F1_THRESHOLD)]
        op_f1_threshold: f64,
    },
    /// Token and USD accounting.
    Cost {
        /// Ledger CSV files (step_id,usd,success,tokens); merged in order.
        #[arg(long = "ledger")]
        ledgers: Vec<PathBuf>,
        /// Image size as WIDTHxHEIGHT; repeatable.
        #[arg(long = "image")]
        images: Vec<String>,
        /// Text segment (or counter table key); repeatable.
        #[arg(long = "text")]
        texts: Vec<String>,
    },
    /// Aggregate checklist or error-taxonomy annotations.
    Report {
        #[command(subcommand)]
        which: ReportKind,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlatformArg {
    Web,
    Mobile,
    Desktop,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PromptKind {
    Inference,
    Stage1,
    Stage2,
    Augment,
    Functions,
}

#[derive(Debug, Subcommand)]
enum ReportKind {
    /// Merge automatic checks with human verdicts.
    Checklist {
        #[arg(long)]
        rounds: PathBuf,
        #[arg(long)]
        human: Option<PathBuf>,
    },
    /// Classify annotated failure samples.
    Errors {
        #[arg(long)]
        samples: PathBuf,
    },
}

/// Runs the CLI with the process's stdout and stderr.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_cli_with(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}

pub fn run_cli_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = resolve(cli.global).and_then(|cfg| dispatch(cli.command, &cfg));
    match result {
        Ok(summary) => {
            let _ = writeln!(stdout, "{summary}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "unigui: {e}");
            let _ = writeln!(stdout, "{}", json!({"ok": false, "error": e.to_string()}));
            e.exit_code()
        }
    }
}

fn data_err(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(data_err(path))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    read(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| CliError::Data(format!("{}:{}: {e}", path.display(), i + 1))))
        .collect()
}

fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| serde_json::to_string(x).expect("records serialize") + "\n")
        .collect()
}

fn write_out(cfg: &RunConfig, name: &str, contents: &str) -> Result<String, CliError> {
    fs::create_dir_all(&cfg.out).map_err(data_err(&cfg.out))?;
    let path = cfg.out.join(name);
    fs::write(&path, contents).map_err(data_err(&path))?;
    Ok(path.display().to_string())
}

fn registry(cfg: &RunConfig) -> Result<FunctionRegistry, CliError> {
    match cfg.registry.as_deref() {
        None => Ok(FunctionRegistry::default()),
        Some(name) => match FunctionRegistry::preset(name) {
            Some(r) => Ok(r),
            None => {
                let text = fs::read_to_string(name).map_err(|e| CliError::Config(format!("registry {name}: {e}")))?;
                FunctionRegistry::from_json(&text).map_err(|e| CliError::Config(format!("registry {name}: {e}")))
            }
        },
    }
}

fn counter(cfg: &RunConfig) -> Result<TokenCounter, CliError> {
    match &cfg.counter {
        None => Ok(TokenCounter::default()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            TokenCounter::from_json(&text).map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

fn required<'a, T>(value: &'a Option<T>, what: &str) -> Result<&'a T, CliError> {
    value.as_ref().ok_or_else(|| CliError::Usage(format!("missing {what}")))
}

fn dispatch(command: Command, cfg: &RunConfig) -> Result<Value, CliError> {
    match command {
        Command::Parse { text } => {
            let cmd = parse_action(&text).map_err(|e| CliError::Validation(e.to_string()))?;
            Ok(cmd.to_ast_json())
        }
        Command::Validate { commands, input } => cmd_validate(cfg, commands, input),
        Command::Synth {
            elements,
            image_ref,
            per_element,
        } => {
            let templates_path = required(&cfg.templates, "--templates")?;
            let templates: TemplateSet =
                serde_json::from_str(&read(templates_path)?).map_err(|e| CliError::Config(e.to_string()))?;
            let elements: Vec<ElementMeta> = read_json(&elements)?;
            let report = synthesize_grounding(
                &image_ref,
                &elements,
                &templates,
                cfg.seed,
                &SynthConfig { per_element },
            );
            let path = write_out(cfg, "grounding.jsonl", &to_jsonl(&report.examples))?;
            Ok(json!({
                "command": "synth",
                "examples": report.examples.len(),
                "skipped_ineligible": report.skipped_ineligible,
                "unmatched": report.unmatched,
                "output": path,
            }))
        }
        Command::Unify { input, platform } => {
            let records: Vec<SourceRecord> = read_jsonl(&input)?;
            let platform = match platform {
                PlatformArg::Web => Platform::Web,
                PlatformArg::Mobile => Platform::Mobile,
                PlatformArg::Desktop => Platform::Desktop,
            };
            let report = unify_batch(&records, platform);
            let path = write_out(cfg, "unified.jsonl", &to_jsonl(&report.examples))?;
            write_out(cfg, "unmappable.jsonl", &to_jsonl(&report.unmappable))?;
            Ok(json!({
                "command": "unify",
                "records": records.len(),
                "unified": report.examples.len(),
                "unmappable": report.unmappable.len(),
                "output": path,
            }))
        }
        Command::Pack { input, image_sizes } => {
            let examples: Vec<GroundingExample> = read_jsonl(&input)?;
            let counter = counter(cfg)?;
            let mut pc = PackConfig::with_budget(cfg.budget);
            pc.per_turn_overhead = crate::forge::default_turn_overhead(&counter);
            pc.counter = counter;
            if let Some(p) = image_sizes {
                pc.image_sizes = read_json::<BTreeMap<String, (u32, u32)>>(&p)?;
            }
            let packed = pack_grounding(&examples, &pc).map_err(|e| CliError::Validation(e.to_string()))?;
            let path = write_out(cfg, "packed.jsonl", &to_jsonl(&packed))?;
            Ok(json!({
                "command": "pack",
                "pairs": examples.len(),
                "conversations": packed.len(),
                "budget": cfg.budget,
                "per_turn_overhead": pc.per_turn_overhead,
                "output": path,
            }))
        }
        Command::Prompt {
            kind,
            goal,
            previous,
            action,
            thought,
            instruction,
            input,
        } => {
            let text = render_prompt(cfg, kind, goal, previous, action, thought, instruction, input)?;
            let path = if cfg.out != Path::new(".") {
                Some(write_out(cfg, "prompt.txt", &text)?)
            } else {
                None
            };
            let mut v = json!({"command": "prompt", "bytes": text.len(), "prompt": text});
            if let Some(p) = path {
                v["output"] = p.into();
            }
            Ok(v)
        }
        Command::Run { script, task, noise } => cmd_run(cfg, &script, task, noise),
        Command::Score {
            gold,
            pred,
            op_f1_threshold,
        } => {
            let golds: Vec<GoldStep> = read_jsonl(&gold)?;
            let preds: Vec<PredStep> = read_jsonl(&pred)?;
            let report =
                score_offline_with(&preds, &golds, op_f1_threshold).map_err(|e| CliError::Data(e.to_string()))?;
            let body = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            let path = write_out(cfg, "report.json", &body)?;
            write_out(cfg, "report.csv", &report.to_csv())?;
            Ok(json!({
                "command": "score",
                "steps": report.steps,
                "element_accuracy": report.element_accuracy.value,
                "operation_f1": report.operation_f1.value,
                "step_sr": report.step_sr.value,
                "output": path,
            }))
        }
        Command::Cost { ledgers, images, texts } => cmd_cost(cfg, ledgers, images, texts),
        Command::Report { which } => match which {
            ReportKind::Checklist { rounds, human } => cmd_checklist(cfg, &rounds, human.as_deref()),
            ReportKind::Errors { samples } => cmd_errors(cfg, &samples),
        },
    }
}

fn cmd_validate(cfg: &RunConfig, mut commands: Vec<String>, input: Option<PathBuf>) -> Result<Value, CliError> {
    if let Some(path) = input {
        commands.extend(
            read(&path)?
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(str::to_string),
        );
    }
    if commands.is_empty() {
        return Err(CliError::Usage("no commands given".into()));
    }
    let reg = registry(cfg)?;
    let mut results = Vec::new();
    let mut invalid = 0;
    for text in &commands {
        let entry = match check_command(text, &reg) {
            Ok(cmd) => json!({"command": text, "valid": true, "canonical": serialize_action(&cmd).ok()}),
            Err(e) => json!({"command": text, "valid": false, "classes": e.classes(), "message": e.to_string()}),
        };
        if entry["valid"] == false {
            invalid += 1;
        }
        results.push(entry);
    }
    if cfg.out != Path::new(".") {
        write_out(cfg, "validation.jsonl", &to_jsonl(&results))?;
    }
    let summary = json!({"command": "validate", "checked": commands.len(), "invalid": invalid, "results": results});
    if invalid > 0 {
        return Err(CliError::Validation(summary.to_string()));
    }
    Ok(summary)
}

#[allow(clippy::too_many_arguments)]
fn render_prompt(
    cfg: &RunConfig,
    kind: PromptKind,
    goal: Option<String>,
    previous: Vec<String>,
    action: Option<String>,
    thought: Option<String>,
    instruction: Option<String>,
    input: Option<PathBuf>,
) -> Result<String, CliError> {
    let invalid = |e: crate::protocol::ProtocolError| CliError::Validation(e.to_string());
    let parsed_action = |a: &Option<String>| -> Result<crate::ActionCommand, CliError> {
        check_command(required(a, "--action")?, &registry(cfg)?).map_err(|e| CliError::Validation(e.to_string()))
    };
    Ok(match kind {
        PromptKind::Inference => {
            build_inference_prompt(cfg.mode, required(&goal, "--goal")?, &previous, "").map_err(invalid)?
        }
        PromptKind::Stage1 => {
            build_stage1_example(required(&goal, "--goal")?, &previous, "", &parsed_action(&action)?)
                .map_err(invalid)?
                .rendered
        }
        PromptKind::Stage2 => {
            build_stage2_example(
                required(&goal, "--goal")?,
                &previous,
                "",
                required(&thought, "--thought")?,
                required(&instruction, "--instruction")?,
                &parsed_action(&action)?,
            )
            .map_err(invalid)?
            .rendered
        }
        PromptKind::Augment => {
            let round: AugmentationRound = read_json(required(&input, "--input")?)?;
            check_round(&round).map_err(|e| CliError::Validation(e.to_string()))?;
            build_augmentation_prompt(&round)
        }
        PromptKind::Functions => render_function_docs(&registry(cfg)?),
    })
}

#[derive(Deserialize)]
struct ScriptDoc {
    #[serde(default)]
    task_id: Option<String>,
    #[serde(default)]
    mode: Option<PromptMode>,
    responses: Vec<String>,
}

fn cmd_run(cfg: &RunConfig, script: &Path, task: Option<String>, noise: Option<f64>) -> Result<Value, CliError> {
    let world_path = required(&cfg.world, "--world")?;
    let world = load_world(&read(world_path)?).map_err(|e| CliError::Data(e.to_string()))?;
    let doc: ScriptDoc = read_json(script)?;
    let task_id = task
        .or(doc.task_id)
        .ok_or_else(|| CliError::Usage("no task: pass --task or set task_id in the script".into()))?;
    let task = world
        .task(&task_id)
        .ok_or_else(|| CliError::Data(format!("world has no task `{task_id}`")))?;
    let options = RunOptions {
        mode: doc.mode.unwrap_or(cfg.mode),
        noise: noise.map(|p| NoiseConfig {
            seed: cfg.seed,
            drop_probability: p,
        }),
    };
    let traj = run_episode_with(&world, task, &mut ScriptedPolicy::new(doc.responses), &options);
    let path = write_out(cfg, "trajectory.jsonl", &traj.to_jsonl())?;
    Ok(json!({
        "command": "run",
        "task_id": traj.task_id,
        "outcome": traj.outcome,
        "steps": traj.steps.len(),
        "output": path,
    }))
}

fn parse_size(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Usage(format!("image size `{s}` is not WIDTHxHEIGHT"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        w.trim().parse().map_err(|_| bad())?,
        h.trim().parse().map_err(|_| bad())?,
    ))
}

fn cmd_cost(
    cfg: &RunConfig,
    ledgers: Vec<PathBuf>,
    images: Vec<String>,
    texts: Vec<String>,
) -> Result<Value, CliError> {
    if ledgers.is_empty() && images.is_empty() && texts.is_empty() {
        return Err(CliError::Usage("give --ledger, --image or --text".into()));
    }
    let mut summary = json!({"command": "cost"});
    if !images.is_empty() || !texts.is_empty() {
        let parts = PromptParts {
            texts,
            images: images.iter().map(|s| parse_size(s)).collect::<Result<_, _>>()?,
        };
        let tokens = step_token_report(&parts, &counter(cfg)?).map_err(|e| CliError::Validation(e.to_string()))?;
        summary["input_tokens"] = tokens.into();
    }
    if !ledgers.is_empty() {
        let mut merged = CostLedger::default();
        for path in &ledgers {
            let file = fs::File::open(path).map_err(data_err(path))?;
            let ledger = CostLedger::from_csv(file).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            merged = merged.merge(ledger);
        }
        let report = CostReport::from_ledger(&merged);
        let body = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        summary["output"] = write_out(cfg, "cost_report.json", &body)?.into();
        summary["steps"] = report.steps.into();
        summary["successful_steps"] = report.successful_steps.into();
        summary["total_usd"] = report.total_usd.into();
        summary["usd_efficiency"] = report.usd_efficiency.into();
    }
    Ok(summary)
}

fn cmd_checklist(cfg: &RunConfig, rounds: &Path, human: Option<&Path>) -> Result<Value, CliError> {
    let records: Vec<ChecklistRecord> = read_jsonl(rounds)?;
    let humans: Vec<HumanVerdict> = match human {
        Some(p) => read_jsonl(p)?,
        None => Vec::new(),
    };
    let by_id: BTreeMap<&str, &HumanVerdict> = humans.iter().map(|h| (h.round_id.as_str(), h)).collect();
    let mut out = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        check_round(&rec.round).map_err(|e| CliError::Data(format!("round {}: {e}", i + 1)))?;
        let auto = validate_augmented_step(&rec.round, &rec.gold_action)
            .map_err(|e| CliError::Data(format!("round {}: {e}", i + 1)))?;
        let h = rec.round.round_id.as_deref().and_then(|id| by_id.get(id).copied());
        out.push(merge_verdict(&auto, h).map_err(|e| CliError::Validation(e.to_string()))?);
    }
    let summary = summarize(&out);
    let body = serde_json::to_string_pretty(&json!({"summary": summary, "verdicts": out})).expect("serializes") + "\n";
    let path = write_out(cfg, "checklist.json", &body)?;
    Ok(json!({
        "command": "report checklist",
        "rounds": summary.rounds,
        "counts": summary.counts,
        "success_rate": summary.success_rate,
        "output": path,
    }))
}

#[derive(Deserialize)]
struct ErrorSample {
    gold: GoldStep,
    pred: PredStep,
    self_plan: bool,
    enforced_plan: bool,
}

fn cmd_errors(cfg: &RunConfig, samples: &Path) -> Result<Value, CliError> {
    let rows: Vec<ErrorSample> = read_jsonl(samples)?;
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
    let report = error_report(&classes);
    let body = serde_json::to_string_pretty(&report).expect("serializes") + "\n";
    let path = write_out(cfg, "errors.json", &body)?;
    Ok(json!({
        "command": "report errors",
        "samples": report.samples,
        "counts": report.counts,
        "output": path,
    }))
}
