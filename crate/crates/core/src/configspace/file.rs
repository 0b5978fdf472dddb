//! Declarative tree definitions in TOML.
//!
//! ```toml
//! [template]
//! stages = [["impute"], ["normalize"]]
//!
//! [[component]]
//! id = "impute"
//! kind = "preprocessor"
//!
//! [[component]]
//! id = "knn"
//! kind = "predictor"
//! [[component.hyperparam]]
//! name = "k"
//! domain = { type = "integer", lo = 1, hi = 30 }
//! default = 1
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tree::{build_tree, ComponentDef, ConfigTree, StructureTemplate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDefinition {
    #[serde(default)]
    pub template: StructureTemplate,
    #[serde(rename = "component")]
    pub components: Vec<ComponentDef>,
}

impl TreeDefinition {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<ConfigTree> {
        build_tree(&self.components, &self.template)
    }
}
