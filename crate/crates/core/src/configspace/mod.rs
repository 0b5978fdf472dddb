//! Tree-structured configuration space, pipelines as root-to-leaf paths and
//! predictor culling.

mod file;
mod pipeline;
mod schema;
mod tree;

pub use file::TreeDefinition;
pub use pipeline::{Pipeline, PipelineDescriptor};
pub use schema::{Assignment, Condition, Domain, HpValue, HyperparamSchema, HyperparamSpec};
pub use tree::{build_tree, ComponentDef, ComponentKind, ComponentRef, ConfigTree, CullSummary, NodeId, SpaceNode, StructureTemplate};
