use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::Value;
use thiserror::Error;

use super::ast::ActionKind;
use crate::protocol::SYSTEM_PROMPT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Web,
    Mobile,
    Desktop,
    #[default]
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamType {
    Number,
    Text,
    Enum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSchema {
    pub name: String,
    pub ty: ParamType,
    pub description: String,
    pub required: bool,
    pub enum_values: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSchema {
    pub name: String,
    pub description: String,
    /// Required parameters first, each group in declaration order.
    pub parameters: Vec<ParamSchema>,
    /// Declaration text exactly as registered, when it came from a document.
    pub source: Option<String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum RegistryError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("function `{0}` is already registered")]
    DuplicateName(String),
}

impl FunctionSchema {
    pub fn param(&self, name: &str) -> Option<&ParamSchema> {
        self.parameters.iter().find(|p| p.name == name)
    }

    /// Parses one declaration in the `{"name", "description", "parameters"}` shape.
    /// The original text is retained for verbatim rendering.
    pub fn from_declaration(text: &str) -> Result<FunctionSchema, RegistryError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| RegistryError::Schema(format!("invalid JSON: {e}")))?;
        let mut schema = FunctionSchema::from_value(&value)?;
        schema.source = Some(text.trim().to_string());
        Ok(schema)
    }

    fn from_value(value: &Value) -> Result<FunctionSchema, RegistryError> {
        let schema_err = |msg: &str| RegistryError::Schema(msg.to_string());
        let obj = value
            .as_object()
            .ok_or_else(|| schema_err("declaration must be a JSON object"))?;
        let name = obj
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| schema_err("missing `name`"))?;
        if !is_dotted_identifier(name) {
            return Err(RegistryError::Schema(format!("`{name}` is not a dotted identifier")));
        }
        let description = match obj.get("description") {
            None => String::new(),
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(schema_err("`description` must be a string")),
        };
        let parameters = match obj.get("parameters") {
            None => Vec::new(),
            Some(block) => parse_parameters(block)?,
        };
        Ok(FunctionSchema {
            name: name.to_string(),
            description,
            parameters,
            source: None,
        })
    }

    /// Canonical declaration layout, used when no source text was retained.
    ///
    /// Parameterless functions fit on one line; others use the indented
    /// block layout with the properties object kept on a single line.
    pub fn render_declaration(&self) -> String {
        if let Some(src) = &self.source {
            return src.clone();
        }
        let q = |s: &str| serde_json::to_string(s).expect("strings serialize");
        if self.parameters.is_empty() {
            return format!(
                "{{\"name\": {}, \"description\": {}}}",
                q(&self.name),
                q(&self.description)
            );
        }
        let props: Vec<String> = self
            .parameters
            .iter()
            .map(|p| {
                let mut s = format!("{}: {{\"type\": ", q(&p.name));
                s.push_str(match p.ty {
                    ParamType::Number => "\"number\"",
                    ParamType::Text | ParamType::Enum => "\"string\"",
                });
                if let Some(values) = &p.enum_values {
                    let list: Vec<String> = values.iter().map(|v| q(v)).collect();
                    let _ = write!(s, ", \"enum\": [{}]", list.join(", "));
                }
                let _ = write!(s, ", \"description\": {}}}", q(&p.description));
                s
            })
            .collect();
        let required: Vec<String> = self
            .parameters
            .iter()
            .filter(|p| p.required)
            .map(|p| q(&p.name))
            .collect();
        format!(
            "{{\n    \"name\": {},\n    \"description\": {},\n    \"parameters\": {{\n        \"type\": \"object\",\n        \"properties\": {{{}}},\n        \"required\": [{}]\n    }}\n  }}",
            q(&self.name),
            q(&self.description),
            props.join(", "),
            required.join(", ")
        )
    }
}

fn parse_parameters(block: &Value) -> Result<Vec<ParamSchema>, RegistryError> {
    let schema_err = |msg: String| RegistryError::Schema(msg);
    let obj = block
        .as_object()
        .ok_or_else(|| schema_err("`parameters` must be an object".into()))?;
    if let Some(ty) = obj.get("type") {
        if ty != "object" {
            return Err(schema_err("`parameters.type` must be \"object\"".into()));
        }
    }
    let props = match obj.get("properties") {
        Some(Value::Object(props)) => props,
        Some(_) => return Err(schema_err("`parameters.properties` must be an object".into())),
        None => return Err(schema_err("`parameters` block has no `properties`".into())),
    };
    let required: Vec<&str> = match obj.get("required") {
        None => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_str()
                    .ok_or_else(|| schema_err("`required` entries must be strings".into()))
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(schema_err("`required` must be an array".into())),
    };
    for r in &required {
        if !props.contains_key(*r) {
            return Err(schema_err(format!("required parameter `{r}` is not declared")));
        }
    }

    let mut params = Vec::with_capacity(props.len());
    for (name, spec) in props {
        let spec = spec
            .as_object()
            .ok_or_else(|| schema_err(format!("property `{name}` must be an object")))?;
        let description = spec
            .get("description")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string();
        let enum_values = match spec.get("enum") {
            None => None,
            Some(Value::Array(items)) => {
                let values: Vec<String> = items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => Ok(s.clone()),
                        _ => Err(schema_err(format!("enum values of `{name}` must be strings"))),
                    })
                    .collect::<Result<_, _>>()?;
                if values.is_empty() {
                    return Err(schema_err(format!("enum of `{name}` is empty")));
                }
                Some(values)
            }
            Some(_) => return Err(schema_err(format!("enum of `{name}` must be an array"))),
        };
        let ty = match (spec.get("type").and_then(Value::as_str), &enum_values) {
            (Some("string") | None, Some(_)) => ParamType::Enum,
            (Some("string"), None) => ParamType::Text,
            (Some("number") | Some("integer"), None) => ParamType::Number,
            (other, _) => return Err(schema_err(format!("property `{name}` has unsupported type {other:?}"))),
        };
        params.push(ParamSchema {
            name: name.clone(),
            ty,
            description,
            required: required.contains(&name.as_str()),
            enum_values,
        });
    }
    // Stable partition: required parameters lead.
    params.sort_by_key(|p| !p.required);
    Ok(params)
}

fn is_dotted_identifier(name: &str) -> bool {
    !name.is_empty()
        && name.split('.').all(|part| {
            let mut chars = part.chars();
            matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        })
}

/// The functions an environment exposes on top of the basic actions.
///
/// Registries are values: [`FunctionRegistry::register`] returns a new
/// registry and never touches the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionRegistry {
    pub platform: Platform,
    schemas: Vec<FunctionSchema>,
    pub base_actions_enabled: bool,
}

impl Default for FunctionRegistry {
    fn default() -> Self {
        FunctionRegistry::new(Platform::Custom, true)
    }
}

#[derive(Deserialize)]
struct RegistryDoc<'a> {
    #[serde(default)]
    platform: Platform,
    #[serde(default = "default_true")]
    base_actions_enabled: bool,
    #[serde(borrow)]
    functions: Vec<&'a RawValue>,
}

fn default_true() -> bool {
    true
}

impl FunctionRegistry {
    pub fn new(platform: Platform, base_actions_enabled: bool) -> Self {
        FunctionRegistry {
            platform,
            schemas: Vec::new(),
            base_actions_enabled,
        }
    }

    /// The mobile function set shipped with the toolkit.
    pub fn mobile() -> Self {
        Self::from_json(include_str!("../../fixtures/registries/mobile.json"))
            .expect("bundled mobile registry is valid")
    }

    pub fn web() -> Self {
        Self::from_json(include_str!("../../fixtures/registries/web.json")).expect("bundled web registry is valid")
    }

    pub fn desktop() -> Self {
        Self::from_json(include_str!("../../fixtures/registries/desktop.json"))
            .expect("bundled desktop registry is valid")
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "mobile" => Some(Self::mobile()),
            "web" => Some(Self::web()),
            "desktop" => Some(Self::desktop()),
            _ => None,
        }
    }

    /// Loads a registry document: either a bare array of declarations or
    /// `{"platform", "base_actions_enabled", "functions": [...]}`.
    pub fn from_json(doc: &str) -> Result<Self, RegistryError> {
        let trimmed = doc.trim_start();
        let (platform, base, decls): (Platform, bool, Vec<&RawValue>) = if trimmed.starts_with('[') {
            let decls =
                serde_json::from_str(doc).map_err(|e| RegistryError::Schema(format!("invalid registry: {e}")))?;
            (Platform::Custom, true, decls)
        } else {
            let parsed: RegistryDoc<'_> =
                serde_json::from_str(doc).map_err(|e| RegistryError::Schema(format!("invalid registry: {e}")))?;
            (parsed.platform, parsed.base_actions_enabled, parsed.functions)
        };
        decls
            .into_iter()
            .try_fold(FunctionRegistry::new(platform, base), |reg, raw| {
                reg.register(raw.get())
            })
    }

    /// Returns a new registry with the declaration added.
    pub fn register(&self, schema_doc: &str) -> Result<Self, RegistryError> {
        self.with_schema(FunctionSchema::from_declaration(schema_doc)?)
    }

    pub fn with_schema(&self, schema: FunctionSchema) -> Result<Self, RegistryError> {
        if self.get(&schema.name).is_some() {
            return Err(RegistryError::DuplicateName(schema.name));
        }
        let mut next = self.clone();
        next.schemas.push(schema);
        Ok(next)
    }

    pub fn schemas(&self) -> &[FunctionSchema] {
        &self.schemas
    }

    pub fn get(&self, name: &str) -> Option<&FunctionSchema> {
        self.schemas.iter().find(|s| s.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.schemas.is_empty()
    }

    /// Whether a command of this kind/name may be issued in this environment.
    pub fn permits(&self, kind: ActionKind, function_name: &str) -> bool {
        if kind.is_basic() {
            self.base_actions_enabled
        } else {
            self.get(function_name).is_some()
        }
    }
}

/// Prompt block listing the available functions, one `- ` entry per schema
/// in registration order.
pub fn render_function_docs(registry: &FunctionRegistry) -> String {
    let mut out = String::new();
    out.push_str(SYSTEM_PROMPT);
    out.push_str("\n\nYou have access to the following functions:\n");
    for schema in registry.schemas() {
        out.push_str("- ");
        out.push_str(&schema.render_declaration());
        out.push('\n');
    }
    out
}
