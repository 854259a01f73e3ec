use super::{ClassIndex, SystemSnapshot};

/// Binary class-to-class dependency relation.
///
/// `c1 -> c2` is present iff `c1` invokes `c2` at least once and
/// `c1 != c2`. Vertices are the snapshot's class indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDependencyGraph {
    successors: Vec<Vec<ClassIndex>>,
    predecessors: Vec<Vec<ClassIndex>>,
    edge_count: usize,
}

impl ClassDependencyGraph {
    /// Builds a graph from an arbitrary edge list; self-loops and duplicates
    /// are dropped.
    pub fn from_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (ClassIndex, ClassIndex)>,
    ) -> Self {
        let mut successors = vec![Vec::new(); vertex_count];
        let mut predecessors = vec![Vec::new(); vertex_count];
        for (from, to) in edges {
            assert!(
                from < vertex_count && to < vertex_count,
                "edge endpoint out of range"
            );
            if from != to {
                successors[from].push(to);
            }
        }
        let mut edge_count = 0;
        for (from, succ) in successors.iter_mut().enumerate() {
            succ.sort_unstable();
            succ.dedup();
            edge_count += succ.len();
            for &to in succ.iter() {
                predecessors[to].push(from);
            }
        }
        ClassDependencyGraph {
            successors,
            predecessors,
            edge_count,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.successors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Classes `class` depends on, ascending.
    pub fn successors(&self, class: ClassIndex) -> &[ClassIndex] {
        &self.successors[class]
    }

    /// Classes depending on `class`, ascending.
    pub fn predecessors(&self, class: ClassIndex) -> &[ClassIndex] {
        &self.predecessors[class]
    }

    pub fn has_edge(&self, from: ClassIndex, to: ClassIndex) -> bool {
        self.successors[from].binary_search(&to).is_ok()
    }

    /// All edges in `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = (ClassIndex, ClassIndex)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(from, succ)| succ.iter().map(move |&to| (from, to)))
    }
}

/// Binarizes a snapshot's invocation facts into a dependency graph.
pub fn class_dependency_graph(snapshot: &SystemSnapshot) -> ClassDependencyGraph {
    ClassDependencyGraph::from_edges(
        snapshot.class_count(),
        snapshot
            .invocations()
            .iter()
            .filter(|e| e.count >= 1)
            .map(|e| (e.from, e.to)),
    )
}
