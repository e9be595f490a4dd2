use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::boost::BoostModel;
use super::forest::ForestModel;
use super::linear::LinearModel;
use super::tree::TreeNode;
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "eeg-gru-baseline";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaselineModel {
    Logistic(LinearModel),
    LinearSvm(LinearModel),
    Tree { root: TreeNode, n_classes: usize },
    Forest(ForestModel),
    Boosting(BoostModel),
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    class_names: Vec<String>,
    model: BaselineModel,
}

pub fn save_model(path: &Path, model: &BaselineModel, class_names: &[String]) -> Result<()> {
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        class_names: class_names.to_vec(),
        model: model.clone(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<(BaselineModel, Vec<String>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile = serde_json::from_str(&text)?;
    if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
        return Err(Error::Data(format!(
            "{}: unsupported model file {} v{}",
            path.display(),
            file.format,
            file.version
        )));
    }
    Ok((file.model, file.class_names))
}
