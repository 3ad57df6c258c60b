//! Recursive-descent parser for single command expressions such as
//! `pyautogui.click(x=0.5, y=0.25)` or `mobile.swipe(from=(0.5, 0.8), to=(0.5, 0.2))`.

use thiserror::Error;

use super::ast::{ActionCommand, ActionKind, ActionValue, ParamShape, Point};
use super::registry::{FunctionRegistry, FunctionSchema, ParamType};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{function}` is missing required argument `{argument}`")]
    Arity { function: String, argument: String },
    #[error("`{function}` got an unexpected argument `{argument}`")]
    UnexpectedArgument { function: String, argument: String },
    #[error("argument `{argument}` of `{function}` must be {expected}")]
    TypeMismatch {
        function: String,
        argument: String,
        expected: &'static str,
    },
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions<'a> {
    /// Resolves names outside the fixed grammar to plugin calls.
    pub registry: Option<&'a FunctionRegistry>,
    /// Ignore anything after the closing parenthesis.
    pub lenient: bool,
    /// Accept unknown dotted names as untyped plugin calls.
    pub allow_unregistered: bool,
}

impl ParseError {
    pub fn class(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "syntax_error",
            ParseError::UnknownFunction(_) => "unknown_function",
            ParseError::Arity { .. } => "missing_argument",
            ParseError::UnexpectedArgument { .. } => "unexpected_argument",
            ParseError::TypeMismatch { .. } => "type_mismatch",
        }
    }
}

pub fn parse_action(text: &str) -> Result<ActionCommand, ParseError> {
    parse_action_with(text, &ParseOptions::default())
}

pub fn parse_action_with(text: &str, opts: &ParseOptions<'_>) -> Result<ActionCommand, ParseError> {
    let mut cursor = Cursor::new(text);
    let call = cursor.call()?;
    cursor.skip_ws();
    if !opts.lenient && !cursor.at_end() {
        return Err(cursor.error("unexpected trailing input"));
    }
    bind(call, opts)
}

#[derive(Debug, Clone, PartialEq)]
enum Literal {
    Number(f64),
    Str(String),
    Tuple(Vec<Literal>),
    List(Vec<Literal>),
}

struct RawArg {
    name: Option<String>,
    value: Literal,
}

struct RawCall {
    callee: String,
    args: Vec<RawArg>,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        if self.eat(want) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{want}`")))
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                self.bump();
            }
            _ => return None,
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        Some(&self.src[start..self.pos])
    }

    fn call(&mut self) -> Result<RawCall, ParseError> {
        self.skip_ws();
        let mut callee = self
            .ident()
            .ok_or_else(|| self.error("expected a function name"))?
            .to_string();
        while self.peek() == Some('.') {
            self.bump();
            let part = self
                .ident()
                .ok_or_else(|| self.error("expected an identifier after `.`"))?;
            callee.push('.');
            callee.push_str(part);
        }
        self.expect('(')?;
        let mut args = Vec::new();
        loop {
            if self.eat(')') {
                break;
            }
            args.push(self.arg()?);
            if self.eat(',') {
                continue;
            }
            if self.eat(')') {
                break;
            }
            return Err(if self.at_end() {
                self.error("unbalanced parentheses")
            } else {
                self.error("expected `,` or `)`")
            });
        }
        Ok(RawCall { callee, args })
    }

    fn arg(&mut self) -> Result<RawArg, ParseError> {
        self.skip_ws();
        let save = self.pos;
        if let Some(name) = self.ident() {
            if self.eat('=') {
                let value = self.literal()?;
                return Ok(RawArg {
                    name: Some(name.to_string()),
                    value,
                });
            }
        }
        self.pos = save;
        let value = self.literal()?;
        Ok(RawArg { name: None, value })
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('\'') | Some('"') => self.string().map(Literal::Str),
            Some('(') => {
                self.bump();
                self.sequence(')').map(Literal::Tuple)
            }
            Some('[') => {
                self.bump();
                self.sequence(']').map(Literal::List)
            }
            Some(c) if c.is_ascii_digit() || matches!(c, '-' | '+' | '.') => self.number(),
            None => Err(self.error("unbalanced parentheses")),
            Some(c) => Err(self.error(format!("bad literal starting with `{c}`"))),
        }
    }

    fn sequence(&mut self, close: char) -> Result<Vec<Literal>, ParseError> {
        let mut items = Vec::new();
        loop {
            if self.eat(close) {
                return Ok(items);
            }
            items.push(self.literal()?);
            if self.eat(',') {
                continue;
            }
            if self.eat(close) {
                return Ok(items);
            }
            return Err(self.error(format!("expected `,` or `{close}`")));
        }
    }

    fn number(&mut self) -> Result<Literal, ParseError> {
        let start = self.pos;
        if matches!(self.peek(), Some('-' | '+')) {
            self.bump();
        }
        let mut digits = 0;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
            digits += 1;
        }
        if self.peek() == Some('.') {
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
                digits += 1;
            }
        }
        if digits == 0 {
            self.pos = start;
            return Err(self.error("bad numeric literal"));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            self.bump();
            if matches!(self.peek(), Some('-' | '+')) {
                self.bump();
            }
            let exp_start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
            if self.pos == exp_start {
                return Err(self.error("bad exponent"));
            }
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '.') {
            return Err(self.error("bad numeric literal"));
        }
        self.src[start..self.pos]
            .parse::<f64>()
            .map(Literal::Number)
            .map_err(|_| ParseError::Syntax {
                pos: start,
                message: "bad numeric literal".into(),
            })
    }

    /// Quoted text. `\\`, `\'`, `\"`, `\n`, `\r` and `\t` are unescaped; any
    /// other backslash sequence is kept as written.
    fn string(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        let quote = self.bump().expect("caller checked the quote");
        let mut out = String::new();
        loop {
            match self.bump() {
                None => {
                    return Err(ParseError::Syntax {
                        pos: start,
                        message: "unterminated string literal".into(),
                    })
                }
                Some(c) if c == quote => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('\\') => out.push('\\'),
                    Some('\'') => out.push('\''),
                    Some('"') => out.push('"'),
                    Some('n') => out.push('\n'),
                    Some('r') => out.push('\r'),
                    Some('t') => out.push('\t'),
                    Some(other) => {
                        out.push('\\');
                        out.push(other);
                    }
                    None => {
                        return Err(ParseError::Syntax {
                            pos: start,
                            message: "unterminated string literal".into(),
                        })
                    }
                },
                Some(c) => out.push(c),
            }
        }
    }
}

/// Parameter slots with their expected shape, in binding order.
struct Slot {
    name: String,
    shape: ParamShape,
    required: bool,
}

fn bind(call: RawCall, opts: &ParseOptions<'_>) -> Result<ActionCommand, ParseError> {
    if let Some(kind) = ActionKind::from_function_name(&call.callee) {
        if kind == ActionKind::Hotkey {
            return bind_hotkey(call);
        }
        let slots: Vec<Slot> = kind
            .params()
            .iter()
            .map(|p| Slot {
                name: p.name.to_string(),
                shape: p.shape,
                required: true,
            })
            .collect();
        let mut values = assign(&call, &slots)?;
        return Ok(build_builtin(kind, &mut values));
    }
    if let Some(schema) = opts.registry.and_then(|r| r.get(&call.callee)) {
        return bind_schema(call, schema);
    }
    if opts.allow_unregistered {
        let args = call
            .args
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                let value = match a.value {
                    Literal::Number(n) => ActionValue::Number(n),
                    Literal::Str(s) => ActionValue::Text(s),
                    Literal::Tuple(items) => match items.as_slice() {
                        [Literal::Number(x), Literal::Number(y)] => ActionValue::Point(Point::new(*x, *y)),
                        _ => {
                            return Err(ParseError::TypeMismatch {
                                function: call.callee.clone(),
                                argument: a.name.clone().unwrap_or_else(|| format!("arg{i}")),
                                expected: "a number, a string or an (x, y) point",
                            })
                        }
                    },
                    Literal::List(_) => {
                        return Err(ParseError::TypeMismatch {
                            function: call.callee.clone(),
                            argument: a.name.clone().unwrap_or_else(|| format!("arg{i}")),
                            expected: "a number, a string or an (x, y) point",
                        })
                    }
                };
                Ok((a.name.unwrap_or_else(|| format!("arg{i}")), value))
            })
            .collect::<Result<_, _>>()?;
        return Ok(ActionCommand::PluginCall {
            name: call.callee,
            args,
        });
    }
    Err(ParseError::UnknownFunction(call.callee))
}

fn bind_schema(call: RawCall, schema: &FunctionSchema) -> Result<ActionCommand, ParseError> {
    let slots: Vec<Slot> = schema
        .parameters
        .iter()
        .map(|p| Slot {
            name: p.name.clone(),
            shape: match p.ty {
                ParamType::Number => ParamShape::Number,
                ParamType::Text => ParamShape::Text,
                ParamType::Enum => ParamShape::Enum,
            },
            required: p.required,
        })
        .collect();
    let values = assign(&call, &slots)?;
    let args = slots
        .iter()
        .zip(values)
        .filter_map(|(slot, v)| v.map(|v| (slot.name.clone(), v)))
        .collect();
    Ok(ActionCommand::PluginCall {
        name: call.callee,
        args,
    })
}

/// Matches positional then keyword arguments to slots and converts literals.
fn assign(call: &RawCall, slots: &[Slot]) -> Result<Vec<Option<ActionValue>>, ParseError> {
    let function = &call.callee;
    let mut values: Vec<Option<ActionValue>> = vec![None; slots.len()];
    let mut seen_keyword = false;
    for (i, arg) in call.args.iter().enumerate() {
        let idx = match &arg.name {
            Some(name) => {
                seen_keyword = true;
                slots
                    .iter()
                    .position(|s| &s.name == name)
                    .ok_or_else(|| ParseError::UnexpectedArgument {
                        function: function.clone(),
                        argument: name.clone(),
                    })?
            }
            None => {
                if seen_keyword {
                    return Err(ParseError::Syntax {
                        pos: 0,
                        message: "positional argument follows keyword argument".into(),
                    });
                }
                if i >= slots.len() {
                    return Err(ParseError::UnexpectedArgument {
                        function: function.clone(),
                        argument: format!("#{}", i + 1),
                    });
                }
                i
            }
        };
        if values[idx].is_some() {
            return Err(ParseError::Syntax {
                pos: 0,
                message: format!("argument `{}` given twice", slots[idx].name),
            });
        }
        values[idx] = Some(convert(function, &slots[idx], &arg.value)?);
    }
    for (slot, value) in slots.iter().zip(&values) {
        if slot.required && value.is_none() {
            return Err(ParseError::Arity {
                function: function.clone(),
                argument: slot.name.clone(),
            });
        }
    }
    Ok(values)
}

fn convert(function: &str, slot: &Slot, lit: &Literal) -> Result<ActionValue, ParseError> {
    let mismatch = |expected| ParseError::TypeMismatch {
        function: function.to_string(),
        argument: slot.name.clone(),
        expected,
    };
    match (slot.shape, lit) {
        (ParamShape::Coordinate | ParamShape::Number, Literal::Number(n)) => Ok(ActionValue::Number(*n)),
        (ParamShape::Coordinate | ParamShape::Number, _) => Err(mismatch("a number")),
        (ParamShape::Text, Literal::Str(s)) => Ok(ActionValue::Text(s.clone())),
        (ParamShape::Key, Literal::Str(s)) => Ok(ActionValue::Key(s.clone())),
        (ParamShape::Enum, Literal::Str(s)) => Ok(ActionValue::Enum(s.clone())),
        (ParamShape::Text | ParamShape::Key | ParamShape::Enum, _) => Err(mismatch("a string")),
        (ParamShape::Point, Literal::Tuple(items)) => match items.as_slice() {
            [Literal::Number(x), Literal::Number(y)] => Ok(ActionValue::Point(Point::new(*x, *y))),
            _ => Err(mismatch("an (x, y) pair of numbers")),
        },
        (ParamShape::Point, _) => Err(mismatch("an (x, y) pair of numbers")),
    }
}

fn take_num(values: &mut [Option<ActionValue>], i: usize) -> f64 {
    match values[i].take() {
        Some(ActionValue::Number(n)) => n,
        other => unreachable!("slot {i} holds {other:?}"),
    }
}

fn take_str(values: &mut [Option<ActionValue>], i: usize) -> String {
    match values[i].take() {
        Some(ActionValue::Text(s) | ActionValue::Key(s) | ActionValue::Enum(s)) => s,
        other => unreachable!("slot {i} holds {other:?}"),
    }
}

fn take_point(values: &mut [Option<ActionValue>], i: usize) -> Point {
    match values[i].take() {
        Some(ActionValue::Point(p)) => p,
        other => unreachable!("slot {i} holds {other:?}"),
    }
}

fn build_builtin(kind: ActionKind, v: &mut [Option<ActionValue>]) -> ActionCommand {
    match kind {
        ActionKind::MoveTo => ActionCommand::MoveTo {
            x: take_num(v, 0),
            y: take_num(v, 1),
        },
        ActionKind::Click => ActionCommand::Click {
            x: take_num(v, 0),
            y: take_num(v, 1),
        },
        ActionKind::DragTo => ActionCommand::DragTo {
            x: take_num(v, 0),
            y: take_num(v, 1),
        },
        ActionKind::LongPress => ActionCommand::LongPress {
            x: take_num(v, 0),
            y: take_num(v, 1),
        },
        ActionKind::Write => ActionCommand::Write {
            message: take_str(v, 0),
        },
        ActionKind::Press => ActionCommand::Press { key: take_str(v, 0) },
        ActionKind::Scroll => ActionCommand::Scroll { clicks: take_num(v, 0) },
        ActionKind::SelectOption => ActionCommand::SelectOption {
            x: take_num(v, 0),
            y: take_num(v, 1),
            value: take_str(v, 2),
        },
        ActionKind::Swipe => ActionCommand::Swipe {
            from: take_point(v, 0),
            to: take_point(v, 1),
        },
        ActionKind::Home => ActionCommand::Home,
        ActionKind::Back => ActionCommand::Back,
        ActionKind::OpenApp => ActionCommand::OpenApp {
            app_name: take_str(v, 0),
        },
        ActionKind::Terminate => ActionCommand::Terminate { status: take_str(v, 0) },
        ActionKind::Answer => ActionCommand::Answer { answer: take_str(v, 0) },
        ActionKind::Hotkey | ActionKind::PluginCall => unreachable!("bound separately"),
    }
}

/// `hotkey` takes its keys variadically (`'ctrl', 'c'`) or as `keys=[...]`.
fn bind_hotkey(call: RawCall) -> Result<ActionCommand, ParseError> {
    let function = call.callee;
    let mismatch = |argument: &str| ParseError::TypeMismatch {
        function: function.clone(),
        argument: argument.to_string(),
        expected: "a key name string",
    };
    let mut keys = Vec::new();
    let mut keyword_list = false;
    for arg in call.args {
        match (arg.name.as_deref(), arg.value) {
            (None, Literal::Str(s)) if !keyword_list => keys.push(s),
            (None, _) if !keyword_list => return Err(mismatch("keys")),
            (Some("keys"), Literal::List(items)) if keys.is_empty() && !keyword_list => {
                keyword_list = true;
                for item in items {
                    match item {
                        Literal::Str(s) => keys.push(s),
                        _ => return Err(mismatch("keys")),
                    }
                }
            }
            (Some("keys"), other) if keys.is_empty() && !keyword_list => {
                return Err(ParseError::TypeMismatch {
                    function: function.clone(),
                    argument: "keys".into(),
                    expected: if matches!(other, Literal::List(_)) {
                        "a list of key name strings"
                    } else {
                        "a list of key names"
                    },
                })
            }
            (Some(name), _) => {
                return Err(ParseError::UnexpectedArgument {
                    function: function.clone(),
                    argument: name.to_string(),
                })
            }
            (None, _) => {
                return Err(ParseError::Syntax {
                    pos: 0,
                    message: "positional argument follows keyword argument".into(),
                })
            }
        }
    }
    if keys.len() < 2 {
        return Err(ParseError::Arity {
            function,
            argument: format!("keys[{}]", keys.len()),
        });
    }
    Ok(ActionCommand::Hotkey { keys })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn click_keyword_and_positional() {
        let expected = ActionCommand::Click { x: 0.5, y: 0.25 };
        assert_eq!(parse_action("pyautogui.click(x=0.5, y=0.25)").unwrap(), expected);
        assert_eq!(parse_action("  pyautogui.click(0.5, 0.25)\n").unwrap(), expected);
        assert_eq!(parse_action("pyautogui.click(0.5, y=0.25)").unwrap(), expected);
    }

    #[test]
    fn hotkey_forms() {
        let expected = ActionCommand::Hotkey {
            keys: vec!["ctrl".into(), "c".into()],
        };
        assert_eq!(parse_action("pyautogui.hotkey('ctrl', 'c')").unwrap(), expected);
        assert_eq!(parse_action("pyautogui.hotkey(keys=['ctrl', 'c'])").unwrap(), expected);
        assert!(matches!(
            parse_action("pyautogui.hotkey('ctrl')"),
            Err(ParseError::Arity { .. })
        ));
    }

    #[test]
    fn open_app() {
        assert_eq!(
            parse_action("mobile.open_app(app_name='Chrome')").unwrap(),
            ActionCommand::OpenApp {
                app_name: "Chrome".into()
            }
        );
    }

    #[test]
    fn missing_y_is_arity_error() {
        assert_eq!(
            parse_action("pyautogui.click(0.5)"),
            Err(ParseError::Arity {
                function: "pyautogui.click".into(),
                argument: "y".into()
            })
        );
    }

    #[test]
    fn swipe_points() {
        assert_eq!(
            parse_action("mobile.swipe(from=(0.5, 0.8), to=(0.5, 0.2))").unwrap(),
            ActionCommand::Swipe {
                from: Point::new(0.5, 0.8),
                to: Point::new(0.5, 0.2)
            }
        );
    }

    #[test]
    fn quoted_text_is_verbatim() {
        let cmd = parse_action(r#"pyautogui.write("it's a \"test\" \d")"#).unwrap();
        assert_eq!(
            cmd,
            ActionCommand::Write {
                message: r#"it's a "test" \d"#.into()
            }
        );
        let cmd = parse_action(r"pyautogui.write(message='a\nb')").unwrap();
        assert_eq!(cmd, ActionCommand::Write { message: "a\nb".into() });
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            "pyautogui.click(x=0.5, y=0.25",
            "pyautogui.click x=0.5",
            "pyautogui.click(x=0.5.1, y=1)",
            "pyautogui.write('abc)",
            "pyautogui.click(x=--1, y=0)",
            "pyautogui.click(x=0.5, y=0.25) extra",
            "(0.5)",
            "",
        ] {
            assert!(matches!(parse_action(bad), Err(ParseError::Syntax { .. })), "{bad}");
        }
    }

    #[test]
    fn lenient_tolerates_trailing_text() {
        let opts = ParseOptions {
            lenient: true,
            ..Default::default()
        };
        assert!(parse_action_with("pyautogui.press('enter')\n<|diff_marker|>", &opts).is_ok());
    }

    #[test]
    fn unknown_function_without_registry() {
        assert_eq!(
            parse_action("browser.reload()"),
            Err(ParseError::UnknownFunction("browser.reload".into()))
        );
    }

    #[test]
    fn registry_resolves_plugins() {
        let reg = FunctionRegistry::default()
            .register(r#"{"name": "browser.goto", "description": "Open a URL", "parameters": {"type": "object", "properties": {"url": {"type": "string"}, "wait": {"type": "number"}}, "required": ["url"]}}"#)
            .unwrap();
        let opts = ParseOptions {
            registry: Some(&reg),
            ..Default::default()
        };
        let cmd = parse_action_with("browser.goto('https://example.com')", &opts).unwrap();
        assert_eq!(
            cmd,
            ActionCommand::PluginCall {
                name: "browser.goto".into(),
                args: vec![("url".into(), ActionValue::Text("https://example.com".into()))],
            }
        );
        assert!(matches!(
            parse_action_with("browser.goto(wait=1)", &opts),
            Err(ParseError::Arity { .. })
        ));
        assert!(matches!(
            parse_action_with("browser.goto(url='x', tab=2)", &opts),
            Err(ParseError::UnexpectedArgument { .. })
        ));
    }

    #[test]
    fn type_mismatch() {
        assert!(matches!(
            parse_action("pyautogui.click(x='a', y=0.1)"),
            Err(ParseError::TypeMismatch { .. })
        ));
    }
}
