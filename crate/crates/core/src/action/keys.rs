//! Closed keyboard vocabulary accepted by `press` and `hotkey`.
//!
//! Two families are recognised: lowercase `pyautogui` key names and the
//! `KeyboardEvent.key` / `code` style names used by browser automation
//! (`ArrowDown`, `KeyA`, `Digit0`, ...). Any single printable ASCII
//! character is also a valid key.

const PYAUTOGUI_NAMES: &[&str] = &[
    "enter",
    "return",
    "tab",
    "space",
    "backspace",
    "delete",
    "del",
    "esc",
    "escape",
    "up",
    "down",
    "left",
    "right",
    "home",
    "end",
    "pageup",
    "pagedown",
    "pgup",
    "pgdn",
    "insert",
    "ctrl",
    "ctrlleft",
    "ctrlright",
    "control",
    "alt",
    "altleft",
    "altright",
    "shift",
    "shiftleft",
    "shiftright",
    "win",
    "winleft",
    "winright",
    "command",
    "cmd",
    "option",
    "optionleft",
    "optionright",
    "fn",
    "capslock",
    "numlock",
    "scrolllock",
    "printscreen",
    "prtsc",
    "pause",
    "apps",
    "clear",
    "select",
    "execute",
    "help",
    "sleep",
    "volumeup",
    "volumedown",
    "volumemute",
    "playpause",
    "nexttrack",
    "prevtrack",
    "stop",
    "browserback",
    "browserforward",
    "browserhome",
    "browserrefresh",
    "browsersearch",
];

const BROWSER_NAMES: &[&str] = &[
    "Backquote",
    "Minus",
    "Equal",
    "Backslash",
    "Backspace",
    "Tab",
    "Delete",
    "Escape",
    "ArrowDown",
    "ArrowUp",
    "ArrowLeft",
    "ArrowRight",
    "End",
    "Enter",
    "Home",
    "Insert",
    "PageDown",
    "PageUp",
    "Shift",
    "Control",
    "Alt",
    "Meta",
    "Space",
    "BracketLeft",
    "BracketRight",
    "Semicolon",
    "Quote",
    "Comma",
    "Period",
    "Slash",
    "CapsLock",
];

pub fn is_known_key(key: &str) -> bool {
    let mut chars = key.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        return c.is_ascii_graphic() || c == ' ';
    }
    if PYAUTOGUI_NAMES.contains(&key) || BROWSER_NAMES.contains(&key) {
        return true;
    }
    if let Some(n) = numbered(key, "f").or_else(|| numbered(key, "F")) {
        return (1..=24).contains(&n);
    }
    if let Some(n) = numbered(key, "num") {
        return n <= 9;
    }
    if let Some(n) = numbered(key, "Digit") {
        return n <= 9;
    }
    if let Some(rest) = key.strip_prefix("Key") {
        return rest.len() == 1 && rest.chars().all(|c| c.is_ascii_uppercase());
    }
    false
}

fn numbered(key: &str, prefix: &str) -> Option<u32> {
    let rest = key.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

/// Named keys only (single characters excluded). Handy for generators.
pub fn named_keys() -> impl Iterator<Item = &'static str> {
    PYAUTOGUI_NAMES.iter().chain(BROWSER_NAMES).copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary() {
        for k in [
            "enter",
            "ctrl",
            "c",
            "#",
            "F12",
            "f1",
            "KeyA",
            "Digit9",
            "ArrowDown",
            "Meta",
        ] {
            assert!(is_known_key(k), "{k}");
        }
        for k in ["", "f25", "Keyab", "Digit10", "ENTER", "hyper", "ctrl+c"] {
            assert!(!is_known_key(k), "{k}");
        }
    }
}
