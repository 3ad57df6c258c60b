use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{hit_test, Effect, Predicate, Screen, SimError, Task, World};
use crate::action::{validate_action, ActionClass, ActionCommand, ActionKind, ParseOptions};
use crate::forge::Role;
use crate::metrics::text_equivalent;
use crate::protocol::{build_inference_prompt, describe_action, parse_model_response_with, PromptMode, Turn};

/// Mutable episode state. Screens are copied so values and focus can change.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeState {
    pub screen: String,
    pub screens: BTreeMap<String, Screen>,
    pub answer: Option<String>,
    pub terminated: bool,
}

impl EpisodeState {
    pub fn initial(world: &World) -> Self {
        EpisodeState {
            screen: world.initial.clone(),
            screens: world.screens.clone(),
            answer: None,
            terminated: false,
        }
    }

    pub fn current(&self) -> &Screen {
        &self.screens[&self.screen]
    }

    fn current_mut(&mut self) -> &mut Screen {
        self.screens.get_mut(&self.screen).expect("current screen exists")
    }

    pub fn holds(&self, pred: &Predicate) -> bool {
        match pred {
            Predicate::ReachScreen { screen } => &self.screen == screen,
            Predicate::ElementValueEquals { screen, element, value } => self
                .screens
                .get(screen)
                .and_then(|s| s.element(element))
                .and_then(|e| e.attributes.get("value"))
                .is_some_and(|v| text_equivalent(value, v)),
            Predicate::AnswerEquals { answer } => self.answer.as_deref().is_some_and(|a| text_equivalent(answer, a)),
        }
    }
}

fn payload(cmd: &ActionCommand) -> Option<&str> {
    match cmd {
        ActionCommand::Write { message } => Some(message),
        ActionCommand::SelectOption { value, .. } => Some(value),
        ActionCommand::Answer { answer } => Some(answer),
        _ => None,
    }
}

fn apply_effect(state: &mut EpisodeState, effect: &Effect, cmd: &ActionCommand) -> Effect {
    match effect {
        Effect::GoTo { screen } => {
            state.screen = screen.clone();
            effect.clone()
        }
        Effect::SetValue { element, value } => {
            let v = value
                .clone()
                .or_else(|| payload(cmd).map(str::to_string))
                .unwrap_or_default();
            if let Some(el) = state.current_mut().element_mut(element) {
                el.attributes.insert("value".into(), v.clone());
            }
            Effect::SetValue {
                element: element.clone(),
                value: Some(v),
            }
        }
        Effect::Toggle { element, attribute } => {
            if let Some(el) = state.current_mut().element_mut(element) {
                let on = el.attributes.get(attribute).is_some_and(|v| v == "true");
                el.attributes.insert(attribute.clone(), (!on).to_string());
            }
            effect.clone()
        }
        Effect::Focus { element } => {
            state.current_mut().focus = Some(element.clone());
            effect.clone()
        }
        Effect::NoOp => Effect::NoOp,
    }
}

/// Applies one validated command. Unmapped `(element, kind)` pairs are a NoOp.
pub fn apply_action(
    world: &World,
    state: &EpisodeState,
    cmd: &ActionCommand,
) -> Result<(EpisodeState, Effect), SimError> {
    let violations = validate_action(cmd, &world.registry);
    if !violations.is_empty() {
        return Err(SimError::InvalidAction(violations));
    }
    let mut next = state.clone();
    let kind = cmd.kind();
    let lookup = |element: Option<&str>| {
        world
            .transitions
            .get(&(state.screen.clone(), element.map(str::to_string), kind))
            .cloned()
    };
    let effect = match cmd {
        ActionCommand::Terminate { .. } => {
            next.terminated = true;
            Effect::NoOp
        }
        ActionCommand::Answer { answer } => {
            next.answer = Some(answer.clone());
            next.terminated = true;
            Effect::NoOp
        }
        ActionCommand::Write { .. } => {
            let screen = state.current();
            let focus = screen
                .focus
                .as_deref()
                .filter(|f| screen.element(f).is_some_and(|e| e.role == Role::Input))
                .ok_or(SimError::NoFocus)?;
            let set = Effect::SetValue {
                element: focus.to_string(),
                value: None,
            };
            apply_effect(&mut next, &set, cmd)
        }
        _ => match cmd.target_point() {
            Some(p) if kind != ActionKind::Swipe => {
                let screen = state.current();
                let hit = hit_test(screen, p.x, p.y)?.map(str::to_string);
                let hit_el = hit.as_deref().and_then(|id| screen.element(id));
                match (hit.as_deref().and_then(|id| lookup(Some(id))), hit_el) {
                    (Some(effect), _) => apply_effect(&mut next, &effect, cmd),
                    (None, Some(el)) if el.role == Role::Input && kind.class() == ActionClass::Pointer => {
                        let focus = Effect::Focus {
                            element: el.element_id.clone(),
                        };
                        let mut effect = apply_effect(&mut next, &focus, cmd);
                        if kind == ActionKind::SelectOption {
                            let set = Effect::SetValue {
                                element: el.element_id.clone(),
                                value: None,
                            };
                            effect = apply_effect(&mut next, &set, cmd);
                        }
                        effect
                    }
                    _ => Effect::NoOp,
                }
            }
            _ => {
                let focused = state.current().focus.clone();
                match focused
                    .as_deref()
                    .and_then(|f| lookup(Some(f)))
                    .or_else(|| lookup(None))
                {
                    Some(effect) => apply_effect(&mut next, &effect, cmd),
                    None => Effect::NoOp,
                }
            }
        },
    };
    Ok((next, effect))
}

/// What the policy sees besides the prompt: an opaque image handle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Observation {
    pub image_ref: String,
    pub width: u32,
    pub height: u32,
}

pub trait Policy {
    /// Text generated after the prompt's control suffix.
    fn respond(&mut self, prompt: &str, observation: &Observation) -> String;
}

/// Adapts a closure over the prompt text.
pub struct FnPolicy<F>(pub F);

impl<F: FnMut(&str) -> String> Policy for FnPolicy<F> {
    fn respond(&mut self, prompt: &str, _: &Observation) -> String {
        (self.0)(prompt)
    }
}

/// Replays a fixed transcript, then returns empty text.
#[derive(Debug, Clone, Default)]
pub struct ScriptedPolicy {
    responses: Vec<String>,
    next: usize,
    pub prompts: Vec<String>,
}

impl ScriptedPolicy {
    pub fn new<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> Self {
        ScriptedPolicy {
            responses: responses.into_iter().map(Into::into).collect(),
            next: 0,
            prompts: Vec::new(),
        }
    }
}

impl Policy for ScriptedPolicy {
    fn respond(&mut self, prompt: &str, _: &Observation) -> String {
        self.prompts.push(prompt.to_string());
        let out = self.responses.get(self.next).cloned().unwrap_or_default();
        self.next += 1;
        out
    }
}

/// Seeded transition noise: each effect is dropped with this probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub seed: u64,
    pub drop_probability: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub mode: PromptMode,
    pub noise: Option<NoiseConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Failure,
    MaxSteps,
    InvalidAction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub index: usize,
    pub screen_before: String,
    pub response: String,
    pub turn: Turn,
    pub effect: Effect,
    pub screen_after: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub task_id: String,
    pub steps: Vec<Step>,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
}

impl Trajectory {
    /// One line per step followed by a summary line.
    pub fn to_jsonl(&self) -> String {
        #[derive(Serialize)]
        struct StepLine<'a> {
            record: &'static str,
            task_id: &'a str,
            #[serde(flatten)]
            step: &'a Step,
        }
        #[derive(Serialize)]
        struct Summary<'a> {
            record: &'static str,
            task_id: &'a str,
            outcome: Outcome,
            steps: usize,
            #[serde(skip_serializing_if = "Option::is_none")]
            failed_step: Option<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            error: Option<&'a str>,
            #[serde(skip_serializing_if = "Option::is_none")]
            answer: Option<&'a str>,
        }
        let mut out = String::new();
        for step in &self.steps {
            let line = StepLine {
                record: "step",
                task_id: &self.task_id,
                step,
            };
            out.push_str(&serde_json::to_string(&line).expect("step serializes"));
            out.push('\n');
        }
        let summary = Summary {
            record: "summary",
            task_id: &self.task_id,
            outcome: self.outcome,
            steps: self.steps.len(),
            failed_step: self.failed_step,
            error: self.error.as_deref(),
            answer: self.answer.as_deref(),
        };
        out.push_str(&serde_json::to_string(&summary).expect("summary serializes"));
        out.push('\n');
        out
    }
}

pub fn run_episode(world: &World, task: &Task, policy: &mut dyn Policy, mode: PromptMode) -> Trajectory {
    run_episode_with(world, task, policy, &RunOptions { mode, noise: None })
}

pub fn run_episode_with(world: &World, task: &Task, policy: &mut dyn Policy, options: &RunOptions) -> Trajectory {
    let mut state = EpisodeState::initial(world);
    let mut rng = options.noise.map(|n| ChaCha8Rng::seed_from_u64(n.seed));
    let mut history: Vec<String> = Vec::new();
    let mut traj = Trajectory {
        task_id: task.task_id.clone(),
        steps: Vec::new(),
        outcome: Outcome::MaxSteps,
        failed_step: None,
        error: None,
        answer: None,
    };
    let parse_opts = ParseOptions {
        registry: Some(&world.registry),
        ..Default::default()
    };
    for index in 1..=task.max_steps {
        let screen = state.current();
        let obs = Observation {
            image_ref: screen.screen_id.clone(),
            width: screen.dimensions.0,
            height: screen.dimensions.1,
        };
        let attempt = (|| -> Result<(String, Turn, EpisodeState, Effect), String> {
            let prompt = build_inference_prompt(options.mode, &task.goal, &history, &obs.image_ref)
                .map_err(|e| e.to_string())?;
            let response = policy.respond(&prompt, &obs);
            let full = format!("{}{}", options.mode.control_suffix(), response);
            let turn = parse_model_response_with(&full, &parse_opts).map_err(|e| e.to_string())?;
            let action = turn.action.as_ref().ok_or("response carries no action")?;
            let (next, effect) = apply_action(world, &state, action).map_err(|e| e.to_string())?;
            Ok((response, turn, next, effect))
        })();
        let (response, turn, mut next, mut effect) = match attempt {
            Ok(v) => v,
            Err(e) => {
                traj.outcome = Outcome::InvalidAction;
                traj.failed_step = Some(index);
                traj.error = Some(e);
                break;
            }
        };
        if let (Some(rng), Some(noise)) = (rng.as_mut(), options.noise) {
            if effect != Effect::NoOp && rng.gen::<f64>() < noise.drop_probability {
                let (terminated, answer) = (next.terminated, next.answer.clone());
                next = state.clone();
                next.terminated = terminated;
                next.answer = answer;
                effect = Effect::NoOp;
            }
        }
        let action = turn.action.as_ref().expect("checked above");
        history.push(
            turn.low_level_instruction
                .clone()
                .unwrap_or_else(|| describe_action(action)),
        );
        traj.steps.push(Step {
            index,
            screen_before: state.screen.clone(),
            response,
            turn,
            effect,
            screen_after: next.screen.clone(),
        });
        state = next;
        if state.holds(&task.success) {
            traj.outcome = Outcome::Success;
            break;
        }
        if state.terminated {
            traj.outcome = Outcome::Failure;
            break;
        }
    }
    traj.answer = state.answer;
    traj
}
