use std::fmt;

use serde::{Deserialize, Serialize};

use super::schema::Assignment;
use super::tree::{ComponentRef, NodeId};

/// A root-to-leaf path through a [`ConfigTree`](super::ConfigTree) with
/// concrete hyperparameter values for every component on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    /// Node ids from root to leaf.
    pub structure: Vec<NodeId>,
    pub components: Vec<ComponentRef>,
    pub hyperparams: Vec<Assignment>,
}

impl Pipeline {
    /// The terminal predictor.
    pub fn predictor(&self) -> &ComponentRef {
        self.components.last().expect("pipeline has at least one component")
    }

    pub fn preprocessors(&self) -> &[ComponentRef] {
        &self.components[..self.components.len() - 1]
    }

    pub fn component_ids(&self) -> Vec<&str> {
        self.components.iter().map(|c| c.id.as_str()).collect()
    }

    pub fn descriptor(&self) -> PipelineDescriptor {
        PipelineDescriptor {
            components: self.components.iter().map(|c| c.id.clone()).collect(),
            hyperparams: self.hyperparams.clone(),
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.descriptor(), f)
    }
}

/// Tree-independent serialized form of a [`Pipeline`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineDescriptor {
    pub components: Vec<String>,
    pub hyperparams: Vec<Assignment>,
}

impl PipelineDescriptor {
    pub fn predictor(&self) -> Option<&str> {
        self.components.last().map(String::as_str)
    }
}

impl fmt::Display for PipelineDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, hp)) in self.components.iter().zip(&self.hyperparams).enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            f.write_str(c)?;
            if !hp.is_empty() {
                let args: Vec<String> = hp.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(f, "({})", args.join(", "))?;
            }
        }
        Ok(())
    }
}
