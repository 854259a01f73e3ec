//! Versioned class-level dependency facts.
//!
//! A [`SystemSnapshot`] is one version of a system: its classes, one or more
//! [`ModuleScheme`]s assigning every class to a module, and the counted
//! method-invocation edges between classes. Snapshots are validated and
//! normalized on construction and immutable afterwards.

mod format;
mod graph;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::{
    load_snapshot, load_snapshot_path, load_snapshot_str, write_snapshot, LoadOptions,
};
pub use graph::{class_dependency_graph, ClassDependencyGraph};

/// Position of a class in a snapshot's sorted class list.
pub type ClassIndex = usize;

/// Position of a module in a scheme's sorted module list.
pub type ModuleIndex = usize;

/// Fully-qualified class name, unique within a snapshot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassId(String);

impl ClassId {
    pub fn new(name: impl Into<String>) -> Self {
        ClassId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A module name qualified by the scheme it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModuleId {
    pub scheme: String,
    pub name: String,
}

impl ModuleId {
    pub fn new(scheme: impl Into<String>, name: impl Into<String>) -> Self {
        ModuleId {
            scheme: scheme.into(),
            name: name.into(),
        }
    }
}

impl fmt::Display for ModuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.scheme, self.name)
    }
}

/// A total assignment of the snapshot's classes to modules.
///
/// Modules are kept sorted by name; every module has at least one member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleScheme {
    name: String,
    modules: Vec<String>,
    membership: Vec<ModuleIndex>,
    members: Vec<Vec<ClassIndex>>,
}

impl ModuleScheme {
    /// Builds a scheme from the module name of every class, in class order.
    fn from_assignment(name: String, assignment: &[&str]) -> Self {
        let modules: Vec<String> = assignment
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(str::to_owned)
            .collect();
        let mut members = vec![Vec::new(); modules.len()];
        let membership = assignment
            .iter()
            .enumerate()
            .map(|(class, module)| {
                let idx = modules
                    .binary_search_by(|m| m.as_str().cmp(module))
                    .expect("module collected above");
                members[idx].push(class);
                idx
            })
            .collect();
        ModuleScheme {
            name,
            modules,
            membership,
            members,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn module_count(&self) -> usize {
        self.modules.len()
    }

    /// Number of classes covered by the scheme.
    pub fn class_count(&self) -> usize {
        self.membership.len()
    }

    pub fn module_names(&self) -> &[String] {
        &self.modules
    }

    pub fn module_name(&self, module: ModuleIndex) -> &str {
        &self.modules[module]
    }

    pub fn module_id(&self, module: ModuleIndex) -> ModuleId {
        ModuleId::new(self.name.clone(), self.modules[module].clone())
    }

    pub fn module_ids(&self) -> impl Iterator<Item = ModuleId> + '_ {
        (0..self.modules.len()).map(|m| self.module_id(m))
    }

    pub fn module_index(&self, name: &str) -> Option<ModuleIndex> {
        self.modules.binary_search_by(|m| m.as_str().cmp(name)).ok()
    }

    /// Resolves a module id against this scheme.
    pub fn resolve(&self, id: &ModuleId) -> Result<ModuleIndex> {
        if id.scheme != self.name {
            return Err(Error::not_found("module", id.to_string()));
        }
        self.module_index(&id.name)
            .ok_or_else(|| Error::not_found("module", id.to_string()))
    }

    pub fn module_of(&self, class: ClassIndex) -> ModuleIndex {
        self.membership[class]
    }

    /// Class indices of a module, ascending.
    pub fn members(&self, module: ModuleIndex) -> &[ClassIndex] {
        &self.members[module]
    }

    pub fn membership(&self) -> &[ModuleIndex] {
        &self.membership
    }
}

/// A normalized invocation fact between two classes of a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvocationEdge {
    pub from: ClassIndex,
    pub to: ClassIndex,
    /// Number of method invocations, always at least 1.
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SnapshotMetadata {
    pub version_label: String,
    pub num_methods: Option<u64>,
    pub lines_of_code: Option<u64>,
    /// Provenance of synthetic snapshots (random algorithm and seed).
    pub generator: Option<String>,
}

impl SnapshotMetadata {
    pub fn new(version_label: impl Into<String>) -> Self {
        SnapshotMetadata {
            version_label: version_label.into(),
            ..Default::default()
        }
    }
}

/// One version of a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSnapshot {
    metadata: SnapshotMetadata,
    classes: Vec<ClassId>,
    schemes: Vec<ModuleScheme>,
    invocations: Vec<InvocationEdge>,
}

impl SystemSnapshot {
    pub fn metadata(&self) -> &SnapshotMetadata {
        &self.metadata
    }

    pub fn version_label(&self) -> &str {
        &self.metadata.version_label
    }

    /// Classes in lexicographic order; positions are [`ClassIndex`]es.
    pub fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, index: ClassIndex) -> &ClassId {
        &self.classes[index]
    }

    pub fn class_index(&self, name: &str) -> Option<ClassIndex> {
        self.classes.binary_search_by(|c| c.as_str().cmp(name)).ok()
    }

    /// Schemes sorted by name.
    pub fn schemes(&self) -> &[ModuleScheme] {
        &self.schemes
    }

    pub fn scheme_names(&self) -> impl Iterator<Item = &str> {
        self.schemes.iter().map(ModuleScheme::name)
    }

    pub fn scheme(&self, name: &str) -> Result<&ModuleScheme> {
        self.schemes
            .binary_search_by(|s| s.name.as_str().cmp(name))
            .map(|i| &self.schemes[i])
            .map_err(|_| Error::not_found("scheme", name))
    }

    /// Invocation edges sorted by `(from, to)`, one per ordered pair.
    pub fn invocations(&self) -> &[InvocationEdge] {
        &self.invocations
    }

    /// Sum of invocation counts.
    pub fn total_invocations(&self) -> u64 {
        self.invocations.iter().map(|e| e.count).sum()
    }

    /// Editable, name-keyed copy of this snapshot.
    pub fn to_parts(&self) -> SnapshotParts {
        let mut classes = BTreeMap::new();
        for (idx, class) in self.classes.iter().enumerate() {
            let modules = self
                .schemes
                .iter()
                .map(|s| (s.name.clone(), s.modules[s.membership[idx]].clone()))
                .collect();
            classes.insert(class.0.clone(), modules);
        }
        let invocations = self
            .invocations
            .iter()
            .map(|e| {
                (
                    (self.classes[e.from].0.clone(), self.classes[e.to].0.clone()),
                    e.count,
                )
            })
            .collect();
        SnapshotParts {
            metadata: self.metadata.clone(),
            classes,
            invocations,
        }
    }
}

/// Name-keyed, mutable form of a snapshot. [`SnapshotParts::build`]
/// validates it into a [`SystemSnapshot`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SnapshotParts {
    pub metadata: SnapshotMetadata,
    /// class name → (scheme name → module name)
    pub classes: BTreeMap<String, BTreeMap<String, String>>,
    /// (from, to) → invocation count
    pub invocations: BTreeMap<(String, String), u64>,
}

impl SnapshotParts {
    pub fn new(metadata: SnapshotMetadata) -> Self {
        SnapshotParts {
            metadata,
            ..Default::default()
        }
    }

    /// Records an invocation, merging with an existing `(from, to)` fact by
    /// summing counts.
    pub fn add_invocation(&mut self, from: impl Into<String>, to: impl Into<String>, count: u64) {
        *self
            .invocations
            .entry((from.into(), to.into()))
            .or_insert(0) += count;
    }

    pub fn build(self) -> Result<SystemSnapshot> {
        let SnapshotParts {
            metadata,
            classes,
            invocations,
        } = self;

        if metadata.version_label.is_empty() {
            return Err(Error::Validation("version label is empty".into()));
        }
        if classes.is_empty() {
            return Err(Error::Validation("snapshot declares no classes".into()));
        }

        let scheme_names: BTreeSet<&str> = classes
            .values()
            .flat_map(|m| m.keys().map(String::as_str))
            .collect();
        if scheme_names.is_empty() {
            return Err(Error::Validation(
                "snapshot declares no module scheme".into(),
            ));
        }
        for (class, modules) in &classes {
            if class.is_empty() {
                return Err(Error::Validation("empty class id".into()));
            }
            for scheme in &scheme_names {
                match modules.get(*scheme) {
                    None => {
                        return Err(Error::Completeness {
                            class: class.clone(),
                            scheme: scheme.to_string(),
                        })
                    }
                    Some(m) if m.is_empty() => {
                        return Err(Error::Validation(format!(
                            "class `{class}` has an empty module name in scheme `{scheme}`"
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        if scheme_names.contains("") {
            return Err(Error::Validation("empty scheme name".into()));
        }

        let class_ids: Vec<ClassId> = classes.keys().cloned().map(ClassId).collect();
        let schemes = scheme_names
            .iter()
            .map(|scheme| {
                let assignment: Vec<&str> = classes.values().map(|m| m[*scheme].as_str()).collect();
                ModuleScheme::from_assignment(scheme.to_string(), &assignment)
            })
            .collect::<Vec<_>>();

        let lookup = |name: &str, context: &str| {
            class_ids
                .binary_search_by(|c| c.as_str().cmp(name))
                .map_err(|_| Error::ReferentialIntegrity {
                    id: name.to_owned(),
                    context: context.to_owned(),
                })
        };
        let mut edges = Vec::with_capacity(invocations.len());
        for ((from, to), count) in &invocations {
            let context = format!("invocation {from} -> {to}");
            if *count == 0 {
                return Err(Error::Validation(format!(
                    "{context}: count must be at least 1"
                )));
            }
            edges.push(InvocationEdge {
                from: lookup(from, &context)?,
                to: lookup(to, &context)?,
                count: *count,
            });
        }
        // Class indices are monotone in name order, so the BTreeMap order is
        // already (from, to) order.
        debug_assert!(edges
            .windows(2)
            .all(|w| (w[0].from, w[0].to) < (w[1].from, w[1].to)));

        Ok(SystemSnapshot {
            metadata,
            classes: class_ids,
            schemes,
            invocations: edges,
        })
    }
}
