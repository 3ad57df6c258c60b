//! C ABI over `unigui-core`.
//!
//! Conventions:
//! - Every fallible function returns a [`UgStatus`]; on failure a message is
//!   available from [`ug_last_error`] on the same thread.
//! - Objects are opaque handles created by `*_new`/`*_parse`/`*_preset`
//!   functions and released with the matching `*_free`.
//! - Strings returned through `char **out` are owned by the caller and must
//!   be released with [`ug_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use unigui_core::action::{
    check_command, parse_action_with, render_function_docs, validate_action, CommandError, ParseOptions,
};
use unigui_core::cost::image_tokens;
use unigui_core::metrics::operation_f1;
use unigui_core::protocol::{build_inference_prompt, parse_model_response_with, PromptMode};
use unigui_core::{serialize_action, ActionCommand, FunctionRegistry};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidAction = 4,
    ProtocolError = 5,
    RegistryError = 6,
    CostError = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UgPromptMode {
    SelfPlan = 0,
    EnforcedPlan = 1,
}

/// Opaque function registry.
pub struct UgRegistry(FunctionRegistry);

/// Opaque parsed command.
pub struct UgAction(ActionCommand);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

type FfiResult<T> = Result<T, (UgStatus, String)>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> UgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            UgStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err((UgStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (UgStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

fn out_arg<T>(p: *mut T, name: &str) -> FfiResult<*mut T> {
    if p.is_null() {
        Err((UgStatus::NullArgument, format!("`{name}` is null")))
    } else {
        Ok(p)
    }
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', "\\u0000"))
        .expect("nul bytes escaped")
        .into_raw()
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next `ug_*` call on the same thread.
#[no_mangle]
pub extern "C" fn ug_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ug_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Looks up a bundled registry: "web", "mobile" or "desktop".
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ug_registry_preset(name: *const c_char, out: *mut *mut UgRegistry) -> UgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let name = str_arg(name, "name")?;
        let reg = FunctionRegistry::preset(name)
            .ok_or_else(|| (UgStatus::RegistryError, format!("no preset named `{name}`")))?;
        *out = Box::into_raw(Box::new(UgRegistry(reg)));
        Ok(())
    })
}

/// Builds a registry from its JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ug_registry_from_json(json: *const c_char, out: *mut *mut UgRegistry) -> UgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let reg = FunctionRegistry::from_json(str_arg(json, "json")?)
            .map_err(|e| (UgStatus::RegistryError, e.to_string()))?;
        *out = Box::into_raw(Box::new(UgRegistry(reg)));
        Ok(())
    })
}

/// # Safety
/// `reg` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ug_registry_free(reg: *mut UgRegistry) {
    if !reg.is_null() {
        drop(Box::from_raw(reg));
    }
}

/// Function documentation block for the system prompt.
///
/// # Safety
/// `reg` must be a live registry; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ug_registry_render_docs(reg: *const UgRegistry, out: *mut *mut c_char) -> UgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let reg = reg
            .as_ref()
            .ok_or((UgStatus::NullArgument, "`reg` is null".to_string()))?;
        *out = into_c(render_function_docs(&reg.0));
        Ok(())
    })
}

/// Parses one command. With a registry, declared plugin functions resolve
/// and the command is validated against it.
///
/// # Safety
/// `text` must be a NUL-terminated string; `reg` may be NULL; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ug_action_parse(
    text: *const c_char,
    reg: *const UgRegistry,
    out: *mut *mut UgAction,
) -> UgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = str_arg(text, "text")?;
        let cmd = match reg.as_ref() {
            Some(r) => check_command(text, &r.0).map_err(|e| match e {
                CommandError::Parse(p) => (UgStatus::ParseError, p.to_string()),
                CommandError::Invalid(_) => (UgStatus::InvalidAction, e.to_string()),
            })?,
            None => {
                parse_action_with(text, &ParseOptions::default()).map_err(|e| (UgStatus::ParseError, e.to_string()))?
            }
        };
        *out = Box::into_raw(Box::new(UgAction(cmd)));
        Ok(())
    })
}

/// # Safety
/// `action` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ug_action_free(action: *mut UgAction) {
    if !action.is_null() {
        drop(Box::from_raw(action));
    }
}

/// Canonical text of a command.
///
/// # Safety
/// `action` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ug_action_serialize(action: *const UgAction, out: *mut *mut c_char) -> UgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let a = action
            .as_ref()
            .ok_or((UgStatus::NullArgument, "`action` is null".to_string()))?;
        let text = serialize_action(&a.0).map_err(|e| (UgStatus::InvalidAction, e.to_string()))?;
        *out = into_c(text);
        Ok(())
    })
}

/// Syntax tree of a command as JSON.
///
/// # Safety
/// `action` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ug_action_to_json(action: *const UgAction, out: *mut *mut c_char) -> UgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let a = action
            .as_ref()
            .ok_or((UgStatus::NullArgument, "`action` is null".to_string()))?;
        *out = into_c(a.0.to_ast_json().to_string());
        Ok(())
    })
}

/// Violations of `action` under `reg` as a JSON array; `[]` means valid.
///
/// # Safety
/// `action` and `reg` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ug_action_validate(
    action: *const UgAction,
    reg: *const UgRegistry,
    out: *mut *mut c_char,
) -> UgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let a = action
            .as_ref()
            .ok_or((UgStatus::NullArgument, "`action` is null".to_string()))?;
        let r = reg
            .as_ref()
            .ok_or((UgStatus::NullArgument, "`reg` is null".to_string()))?;
        let violations = validate_action(&a.0, &r.0);
        *out = into_c(serde_json::to_string(&violations).expect("violations serialize"));
        Ok(())
    })
}

/// Visual tokens of one screenshot.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ug_image_tokens(width: u32, height: u32, out: *mut u64) -> UgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = image_tokens(width, height).map_err(|e| (UgStatus::CostError, e.to_string()))?;
        Ok(())
    })
}

/// Token-multiset F1 between two operation texts.
///
/// # Safety
/// Both strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ug_operation_f1(pred: *const c_char, gold: *const c_char, out: *mut f64) -> UgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = operation_f1(str_arg(pred, "pred")?, str_arg(gold, "gold")?);
        Ok(())
    })
}

/// Inference prompt for the next step. `previous` holds `n_previous`
/// low-level instructions in order and may be NULL when `n_previous` is 0.
///
/// # Safety
/// `goal` and every entry of `previous` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn ug_build_inference_prompt(
    mode: UgPromptMode,
    goal: *const c_char,
    previous: *const *const c_char,
    n_previous: usize,
    out: *mut *mut c_char,
) -> UgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let goal = str_arg(goal, "goal")?;
        if previous.is_null() && n_previous > 0 {
            return Err((UgStatus::NullArgument, "`previous` is null".into()));
        }
        let history = (0..n_previous)
            .map(|i| str_arg(*previous.add(i), "previous").map(str::to_string))
            .collect::<FfiResult<Vec<_>>>()?;
        let mode = match mode {
            UgPromptMode::SelfPlan => PromptMode::SelfPlan,
            UgPromptMode::EnforcedPlan => PromptMode::EnforcedPlan,
        };
        let prompt =
            build_inference_prompt(mode, goal, &history, "").map_err(|e| (UgStatus::ProtocolError, e.to_string()))?;
        *out = into_c(prompt);
        Ok(())
    })
}

/// Parses generated assistant text into a turn, returned as JSON.
///
/// # Safety
/// `text` must be NUL-terminated; `reg` may be NULL; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ug_parse_model_response(
    text: *const c_char,
    reg: *const UgRegistry,
    out: *mut *mut c_char,
) -> UgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let opts = ParseOptions {
            registry: reg.as_ref().map(|r| &r.0),
            ..Default::default()
        };
        let turn = parse_model_response_with(str_arg(text, "text")?, &opts)
            .map_err(|e| (UgStatus::ProtocolError, e.to_string()))?;
        *out = into_c(serde_json::to_string(&turn).expect("turn serializes"));
        Ok(())
    })
}
