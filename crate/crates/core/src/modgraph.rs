//! Module-level dependency graphs and cyclic-dependency statistics.
//!
//! Module `i` depends on module `j` when some class of `i` depends on some
//! class of `j`. Cycles are summarized by strongly connected components.
//! Only components with at least two modules are reported: a lone module
//! carries no cycle, and counting singletons would just track the module
//! count.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::facts::{ClassDependencyGraph, ModuleId, ModuleIndex, ModuleScheme};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleDependencyGraph {
    scheme: String,
    modules: Vec<String>,
    edges: BTreeSet<(ModuleIndex, ModuleIndex)>,
}

impl ModuleDependencyGraph {
    /// Builds a graph over `modules` (vertex `k` is `modules[k]`). Rejects
    /// self-loops and out-of-range endpoints; duplicate edges collapse.
    pub fn new(
        scheme: impl Into<String>,
        modules: Vec<String>,
        edges: impl IntoIterator<Item = (ModuleIndex, ModuleIndex)>,
    ) -> Result<Self> {
        let n = modules.len();
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!(
                    "module edge ({a}, {b}) out of range for {n} modules"
                )));
            }
            if a == b {
                return Err(Error::InvalidArgument(format!(
                    "module self-loop on `{}`",
                    modules[a]
                )));
            }
            set.insert((a, b));
        }
        Ok(ModuleDependencyGraph {
            scheme: scheme.into(),
            modules,
            edges: set,
        })
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    pub fn vertex_count(&self) -> usize {
        self.modules.len()
    }

    pub fn module_names(&self) -> &[String] {
        &self.modules
    }

    pub fn module_id(&self, m: ModuleIndex) -> ModuleId {
        ModuleId::new(self.scheme.clone(), self.modules[m].clone())
    }

    /// Edges in ascending `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = (ModuleIndex, ModuleIndex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, from: ModuleIndex, to: ModuleIndex) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Plain-text edge list, one `<from> -> <to>` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{} -> {}", self.modules[a], self.modules[b]);
        }
        out
    }
}

/// Lifts class dependencies to module dependencies; intra-module edges are
/// dropped.
pub fn lift_module_graph(
    g: &ClassDependencyGraph,
    scheme: &ModuleScheme,
) -> Result<ModuleDependencyGraph> {
    if scheme.class_count() < g.vertex_count() {
        return Err(Error::Completeness {
            class: format!("#{}", scheme.class_count()),
            scheme: scheme.name().to_owned(),
        });
    }
    let edges = g
        .edges()
        .map(|(a, b)| (scheme.module_of(a), scheme.module_of(b)))
        .filter(|(a, b)| a != b);
    ModuleDependencyGraph::new(scheme.name(), scheme.module_names().to_vec(), edges)
}

/// Cyclic-dependency summary of one module graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccReport {
    pub scheme: String,
    /// Components with at least two modules.
    pub num_nontrivial_scc: usize,
    /// Size of the largest component, 0 when the graph is acyclic.
    pub largest_scc_size: usize,
    /// Members of each nontrivial component, sorted by size descending then
    /// lexicographically.
    pub scc_members: Vec<Vec<ModuleId>>,
}

impl SccReport {
    /// Modules that sit on at least one dependency cycle.
    pub fn cyclic_module_count(&self) -> usize {
        self.scc_members.iter().map(Vec::len).sum()
    }
}

/// Every strongly connected component, singletons included. Each
/// component's members are ascending; components are ordered by their
/// smallest member.
pub fn strongly_connected_components(mg: &ModuleDependencyGraph) -> Vec<Vec<ModuleIndex>> {
    let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(mg.vertex_count(), mg.edge_count());
    for _ in 0..mg.vertex_count() {
        graph.add_node(());
    }
    for (a, b) in mg.edges() {
        graph.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
    }
    let mut components: Vec<Vec<ModuleIndex>> = petgraph::algo::tarjan_scc(&graph)
        .into_iter()
        .map(|comp| {
            let mut members: Vec<_> = comp.into_iter().map(NodeIndex::index).collect();
            members.sort_unstable();
            members
        })
        .collect();
    components.sort_unstable_by_key(|c| c[0]);
    components
}

pub fn scc_analysis(mg: &ModuleDependencyGraph) -> SccReport {
    let mut cyclic: Vec<Vec<ModuleIndex>> = strongly_connected_components(mg)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .collect();
    // Module indices follow name order, so comparing index lists is the
    // lexicographic order on names.
    cyclic.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    SccReport {
        scheme: mg.scheme.clone(),
        num_nontrivial_scc: cyclic.len(),
        largest_scc_size: cyclic.first().map_or(0, Vec::len),
        scc_members: cyclic
            .iter()
            .map(|c| c.iter().map(|&m| mg.module_id(m)).collect())
            .collect(),
    }
}
