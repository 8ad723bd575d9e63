//! Models are stored as TOML: a `format` name, a `version` number and a
//! `model` table tagged by `kind`. Floats are written in shortest
//! round-trip form, so loading a saved model reproduces it exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ClassifyError, FittedModel};

pub const FORMAT_NAME: &str = "mtlspca-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: FittedModel,
}

pub fn model_to_string(model: &FittedModel) -> Result<String, ClassifyError> {
    let file = ModelFile {
        format: FORMAT_NAME.to_string(),
        version: FORMAT_VERSION,
        model: model.clone(),
    };
    toml::to_string(&file).map_err(|e| ClassifyError::Format(e.to_string()))
}

pub fn model_from_str(text: &str) -> Result<FittedModel, ClassifyError> {
    let file: ModelFile = toml::from_str(text).map_err(|e| ClassifyError::Format(e.to_string()))?;
    if file.format != FORMAT_NAME {
        return Err(ClassifyError::Format(format!(
            "unknown format {:?}",
            file.format
        )));
    }
    if file.version != FORMAT_VERSION {
        return Err(ClassifyError::Format(format!(
            "version {} is not supported (expected {FORMAT_VERSION})",
            file.version
        )));
    }
    Ok(file.model)
}

pub fn save_model(model: &FittedModel, path: &Path) -> Result<(), ClassifyError> {
    std::fs::write(path, model_to_string(model)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<FittedModel, ClassifyError> {
    model_from_str(&std::fs::read_to_string(path)?)
}
