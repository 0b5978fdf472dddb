//! Tree-structured configuration space.
//!
//! Every node carries a component, the component's hyperparameter schema and
//! an active flag. A pipeline is read off by walking back from an active
//! predictor leaf to its root. Culling flips active flags; the shape of the
//! tree never changes after [`build_tree`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pipeline::{Pipeline, PipelineDescriptor};
use super::schema::HyperparamSchema;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Preprocessor,
    Predictor,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentRef {
    pub id: String,
    pub kind: ComponentKind,
}

impl ComponentRef {
    pub fn predictor(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: ComponentKind::Predictor,
        }
    }

    pub fn preprocessor(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: ComponentKind::Preprocessor,
        }
    }

    pub fn is_predictor(&self) -> bool {
        self.kind == ComponentKind::Predictor
    }
}

impl fmt::Display for ComponentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

/// A component together with its hyperparameter schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDef {
    #[serde(flatten)]
    pub component: ComponentRef,
    #[serde(default, rename = "hyperparam")]
    pub schema: HyperparamSchema,
}

impl ComponentDef {
    pub fn new(component: ComponentRef, schema: HyperparamSchema) -> Self {
        Self { component, schema }
    }
}

/// Ordered stages of optional preprocessors placed in front of every predictor.
///
/// A path picks at most one member from each stage, in stage order, then ends
/// in a predictor. The default mirrors the usual
/// `impute? -> (normalize | random_subset)? -> predictor` shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureTemplate {
    pub stages: Vec<Vec<String>>,
}

impl StructureTemplate {
    pub fn new(stages: Vec<Vec<String>>) -> Self {
        Self { stages }
    }

    pub fn predictors_only() -> Self {
        Self { stages: Vec::new() }
    }
}

impl Default for StructureTemplate {
    fn default() -> Self {
        Self {
            stages: vec![vec!["impute".into()], vec!["normalize".into(), "random_subset".into()]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceNode {
    pub component: ComponentRef,
    pub schema: Arc<HyperparamSchema>,
    pub active: bool,
    /// Equal to the node's own id for roots.
    pub parent: NodeId,
    children: Vec<NodeId>,
}

impl SpaceNode {
    pub fn children(&self) -> &[NodeId] {
        &self.children
    }
}

/// Number of nodes and distinct predictors switched off by a cull.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CullSummary {
    pub nodes: usize,
    pub predictors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigTree {
    nodes: Vec<SpaceNode>,
    roots: Vec<NodeId>,
    components: Vec<ComponentDef>,
}

/// Builds the full tree for a component pool and template. All nodes start active.
pub fn build_tree(components: &[ComponentDef], template: &StructureTemplate) -> Result<ConfigTree> {
    let mut by_id: HashMap<&str, &ComponentDef> = HashMap::new();
    for def in components {
        if by_id.insert(def.component.id.as_str(), def).is_some() {
            return Err(Error::Tree(format!("duplicate component id `{}`", def.component.id)));
        }
    }
    let predictors: Vec<&ComponentDef> = components.iter().filter(|d| d.component.is_predictor()).collect();
    if predictors.is_empty() {
        return Err(Error::Tree("no predictors in component pool".into()));
    }

    let mut placed: HashSet<&str> = HashSet::new();
    let mut stages: Vec<Vec<&ComponentDef>> = Vec::with_capacity(template.stages.len());
    for stage in &template.stages {
        let mut members = Vec::with_capacity(stage.len());
        for id in stage {
            let def = by_id
                .get(id.as_str())
                .ok_or_else(|| Error::Tree(format!("template names unknown component `{id}`")))?;
            if def.component.is_predictor() {
                return Err(Error::Tree(format!("predictor `{id}` placed before a leaf")));
            }
            // A component in two stages may both precede and follow another one.
            if !placed.insert(id.as_str()) {
                return Err(Error::Tree(format!("cyclic ordering: `{id}` appears in more than one stage")));
            }
            members.push(*def);
        }
        stages.push(members);
    }
    if let Some(orphan) = components
        .iter()
        .find(|d| !d.component.is_predictor() && !placed.contains(d.component.id.as_str()))
    {
        return Err(Error::Tree(format!(
            "preprocessor `{}` not placed by template",
            orphan.component.id
        )));
    }

    let schemas: HashMap<&str, Arc<HyperparamSchema>> = components
        .iter()
        .map(|d| (d.component.id.as_str(), Arc::new(d.schema.clone())))
        .collect();

    let mut tree = ConfigTree {
        nodes: Vec::new(),
        roots: Vec::new(),
        components: components.to_vec(),
    };
    tree.expand(None, 0, &stages, &predictors, &schemas);
    Ok(tree)
}

impl ConfigTree {
    fn add_node(&mut self, def: &ComponentDef, parent: Option<NodeId>, schemas: &HashMap<&str, Arc<HyperparamSchema>>) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(SpaceNode {
            component: def.component.clone(),
            schema: schemas[def.component.id.as_str()].clone(),
            active: true,
            parent: parent.unwrap_or(id),
            children: Vec::new(),
        });
        match parent {
            Some(p) => self.nodes[p.0].children.push(id),
            None => self.roots.push(id),
        }
        id
    }

    fn expand(
        &mut self,
        parent: Option<NodeId>,
        from_stage: usize,
        stages: &[Vec<&ComponentDef>],
        predictors: &[&ComponentDef],
        schemas: &HashMap<&str, Arc<HyperparamSchema>>,
    ) {
        for (s, stage) in stages.iter().enumerate().skip(from_stage) {
            for def in stage {
                let node = self.add_node(def, parent, schemas);
                self.expand(Some(node), s + 1, stages, predictors, schemas);
            }
        }
        for def in predictors {
            self.add_node(def, parent, schemas);
        }
    }

    pub fn node(&self, id: NodeId) -> &SpaceNode {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[SpaceNode] {
        &self.nodes
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn components(&self) -> &[ComponentDef] {
        &self.components
    }

    pub fn component(&self, id: &str) -> Option<&ComponentDef> {
        self.components.iter().find(|d| d.component.id == id)
    }

    /// Predictor components in pool order.
    pub fn predictors(&self) -> Vec<&ComponentRef> {
        self.components.iter().map(|d| &d.component).filter(|c| c.is_predictor()).collect()
    }

    /// Predictors that terminate at least one active path.
    pub fn active_predictors(&self) -> BTreeSet<String> {
        self.active_leaves()
            .into_iter()
            .map(|leaf| self.nodes[leaf.0].component.id.clone())
            .collect()
    }

    fn is_root(&self, id: NodeId) -> bool {
        self.nodes[id.0].parent == id
    }

    /// Switches `id` and its whole subtree off. Returns the number of nodes
    /// that were active before.
    pub(crate) fn deactivate_node(&mut self, id: NodeId) -> usize {
        let mut stack = vec![id];
        let mut count = 0;
        while let Some(n) = stack.pop() {
            let node = &mut self.nodes[n.0];
            if node.active {
                node.active = false;
                count += 1;
            }
            stack.extend_from_slice(&node.children);
        }
        count
    }

    /// Deactivates every predictor node whose component is not in `keep`.
    /// Kept predictors and all preprocessor nodes are left untouched.
    pub fn deactivate_predictors<S: AsRef<str>>(&mut self, keep: &[S]) -> Result<CullSummary> {
        let mut keep_ids = HashSet::with_capacity(keep.len());
        for k in keep {
            let id = k.as_ref();
            match self.component(id) {
                None => return Err(Error::UnknownComponent(id.to_string())),
                Some(def) if !def.component.is_predictor() => return Err(Error::NotAPredictor(id.to_string())),
                Some(_) => {
                    keep_ids.insert(id.to_string());
                }
            }
        }
        let mut summary = CullSummary::default();
        let mut culled = HashSet::new();
        for i in 0..self.nodes.len() {
            let node = &self.nodes[i];
            if node.component.is_predictor() && !keep_ids.contains(&node.component.id) {
                let was_active = node.active;
                let id = node.component.id.clone();
                summary.nodes += self.deactivate_node(NodeId(i));
                if was_active {
                    culled.insert(id);
                }
            }
        }
        summary.predictors = culled.len();
        Ok(summary)
    }

    pub fn activate_all(&mut self) {
        for n in &mut self.nodes {
            n.active = true;
        }
    }

    /// Predictor leaves whose entire ancestor chain is active.
    pub fn active_leaves(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack: Vec<NodeId> = self.roots.iter().rev().copied().collect();
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n.0];
            if !node.active {
                continue;
            }
            if node.children.is_empty() {
                if node.component.is_predictor() {
                    out.push(n);
                }
            } else {
                stack.extend(node.children.iter().rev());
            }
        }
        out
    }

    /// Node ids from the root down to `leaf`.
    pub fn path_to(&self, leaf: NodeId) -> Vec<NodeId> {
        let mut path = vec![leaf];
        let mut cur = leaf;
        while !self.is_root(cur) {
            cur = self.nodes[cur.0].parent;
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// All active root-to-leaf structures.
    pub fn enumerate_structures(&self) -> Vec<Vec<NodeId>> {
        self.active_leaves().into_iter().map(|leaf| self.path_to(leaf)).collect()
    }

    /// Structures rendered as component id sequences.
    pub fn enumerate_component_paths(&self) -> Vec<Vec<String>> {
        self.enumerate_structures()
            .into_iter()
            .map(|p| p.iter().map(|n| self.nodes[n.0].component.id.clone()).collect())
            .collect()
    }

    /// Finds the path whose components match `ids` in order.
    pub fn find_path<S: AsRef<str>>(&self, ids: &[S]) -> Option<Vec<NodeId>> {
        let (first, rest) = ids.split_first()?;
        let mut cur = *self.roots.iter().find(|r| self.nodes[r.0].component.id == first.as_ref())?;
        for id in rest {
            cur = *self.nodes[cur.0]
                .children
                .iter()
                .find(|c| self.nodes[c.0].component.id == id.as_ref())?;
        }
        self.nodes[cur.0].children.is_empty().then(|| self.path_to(cur))
    }

    pub fn is_structure_active(&self, structure: &[NodeId]) -> bool {
        structure.iter().all(|n| self.nodes[n.0].active)
    }

    fn pipeline_from(&self, structure: Vec<NodeId>, mut assign: impl FnMut(&HyperparamSchema) -> super::Assignment) -> Pipeline {
        let components = structure.iter().map(|n| self.nodes[n.0].component.clone()).collect();
        let hyperparams = structure.iter().map(|n| assign(&self.nodes[n.0].schema)).collect();
        Pipeline {
            structure,
            components,
            hyperparams,
        }
    }

    pub fn default_pipeline(&self, structure: Vec<NodeId>) -> Pipeline {
        self.pipeline_from(structure, |s| s.defaults())
    }

    /// Samples hyperparameters for a fixed structure.
    pub fn sample_hyperparams<R: Rng + ?Sized>(&self, structure: Vec<NodeId>, rng: &mut R) -> Pipeline {
        self.pipeline_from(structure, |s| s.sample(rng))
    }

    /// Draws an active leaf uniformly, backtracks to its root and samples every
    /// component's hyperparameters from its schema.
    pub fn sample_pipeline<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Pipeline> {
        let leaves = self.active_leaves();
        if leaves.is_empty() {
            return Err(Error::EmptyActiveSubspace);
        }
        let leaf = leaves[rng.gen_range(0..leaves.len())];
        Ok(self.sample_hyperparams(self.path_to(leaf), rng))
    }

    /// Rebuilds a pipeline from its descriptor, validating every assignment.
    pub fn pipeline_from_descriptor(&self, d: &PipelineDescriptor) -> Result<Pipeline> {
        let structure = self
            .find_path(&d.components)
            .ok_or_else(|| Error::Tree(format!("no path {:?} in tree", d.components)))?;
        if d.hyperparams.len() != structure.len() {
            return Err(Error::Tree("descriptor hyperparameter count differs from its path".into()));
        }
        for (n, hp) in structure.iter().zip(&d.hyperparams) {
            self.nodes[n.0].schema.validate(hp)?;
        }
        let mut hps = d.hyperparams.iter().cloned();
        Ok(self.pipeline_from(structure, |_| hps.next().unwrap_or_default()))
    }

    /// Checks the pipeline invariants against this tree.
    pub fn validate_pipeline(&self, p: &Pipeline) -> Result<()> {
        let Some(&leaf) = p.structure.last() else {
            return Err(Error::Tree("empty pipeline".into()));
        };
        if self.path_to(leaf) != p.structure {
            return Err(Error::Tree("structure is not a root-to-leaf path".into()));
        }
        if !self.nodes[leaf.0].component.is_predictor() {
            return Err(Error::Tree("pipeline does not end in a predictor".into()));
        }
        if p.components.len() != p.structure.len() || p.hyperparams.len() != p.structure.len() {
            return Err(Error::Tree("pipeline vectors differ in length".into()));
        }
        for ((n, c), hp) in p.structure.iter().zip(&p.components).zip(&p.hyperparams) {
            let node = &self.nodes[n.0];
            if node.component != *c {
                return Err(Error::Tree(format!("component mismatch at {n}")));
            }
            node.schema.validate(hp)?;
        }
        Ok(())
    }
}
