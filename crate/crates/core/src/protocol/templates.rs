pub const SYSTEM_PROMPT: &str = "You are a GUI agent. You are given a task and a screenshot of the screen. You need to perform a series of pyautogui actions to complete the task.";

pub const IM_START: &str = "<|im_start|>";
pub const IM_END: &str = "<|im_end|>";
pub const RECIPIENT: &str = "<|recipient|>";
pub const DIFF_MARKER: &str = "<|diff_marker|>";
pub const VISION_PLACEHOLDER: &str = "<|vision_start|><|image_pad|><|vision_end|>";
pub const USER_REQUEST: &str =
    "Please generate the next move according to the ui screenshot, instruction and previous actions.";

pub const ASSISTANT_OS: &str = "<|im_start|>assistant<|recipient|>os";
pub const ASSISTANT_ALL: &str = "<|im_start|>assistant<|recipient|>all";

/// System and user turns of a training sample (no trailing newline).
pub fn training_prompt(goal: &str, previous_actions: &str) -> String {
    format!(
        "{IM_START}system\n{SYSTEM_PROMPT}{IM_END}\n{IM_START}user\n{VISION_PLACEHOLDER}\n{USER_REQUEST}\nInstruction: {goal}\nPrevious actions: {previous_actions}\n{IM_END}"
    )
}

/// Inference prompt up to, but excluding, the recipient token.
pub fn inference_prompt_body(goal: &str, previous_actions: &str) -> String {
    format!(
        "{IM_START}system\n{SYSTEM_PROMPT}{IM_END}\n{IM_START}user\n{VISION_PLACEHOLDER}{USER_REQUEST}\n\nInstruction: {goal}\n\nPrevious actions: {previous_actions}\n{IM_END}\n{IM_START}assistant"
    )
}

pub fn action_block(command: &str) -> String {
    format!("{ASSISTANT_OS}\nAction: {command}\n{DIFF_MARKER}")
}

pub fn monologue_block(thought: &str, instruction: &str) -> String {
    format!("{ASSISTANT_ALL}\nThought: {thought}\nLow-level Instruction: {instruction}\n{IM_END}")
}
