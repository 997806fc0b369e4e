//! The model document: pretty-printed JSON with a fixed key set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{validate, ClassInfo, ClassModel, Diagnostic};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model document at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported model document version {0}")]
    Version(u32),
    #[error("invalid model ({} violation(s)): {}", .0.len(), first_message(.0))]
    Invalid(Vec<Diagnostic>),
}

fn first_message(diags: &[Diagnostic]) -> &str {
    diags.first().map(|d| d.message.as_str()).unwrap_or("")
}

#[derive(Serialize)]
struct DocumentRef<'a> {
    version: u32,
    classes: &'a [ClassInfo],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: u32,
    classes: Vec<ClassInfo>,
}

/// Serializes a valid model. Output is canonical: equal models give equal
/// bytes whatever order their classes were inserted in.
pub fn export_model(model: &ClassModel) -> Result<Vec<u8>, ModelError> {
    let problems = validate(model);
    if !problems.is_empty() {
        return Err(ModelError::Invalid(problems));
    }
    let doc = DocumentRef {
        version: MODEL_VERSION,
        classes: model.classes(),
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("model serialization is infallible");
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn import_model(doc: &[u8]) -> Result<ClassModel, ModelError> {
    let parsed: Document = serde_json::from_slice(doc).map_err(|e| ModelError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if parsed.version != MODEL_VERSION {
        return Err(ModelError::Version(parsed.version));
    }
    let model = ClassModel::new(parsed.classes, Vec::new());
    let problems = validate(&model);
    if !problems.is_empty() {
        return Err(ModelError::Invalid(problems));
    }
    Ok(model)
}
