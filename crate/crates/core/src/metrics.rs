//! Bunch cohesion/coupling, afferent/efferent coupling and descriptive
//! statistics for one snapshot under one module scheme.
//!
//! With `N_i` the class count of module `i`:
//!
//! * cohesion `A_i = μ_i / N_i²`, where `μ_i` counts dependency edges with
//!   both endpoints in `i`. Self-dependencies never exist, so the attainable
//!   maximum is `(N_i − 1) / N_i`.
//! * pair coupling `E_ij = ε_ij / (2·N_i·N_j)`, where `ε_ij` counts edges
//!   between `i` and `j` in *both* directions. This keeps `E_ij = E_ji` and
//!   `E_ij ∈ [0, 1]`.
//! * module coupling `E_i = Σ_{j≠i} E_ij`. The summand is the pair coupling
//!   `E_ij`, not the cohesion-like `A_ij`.
//! * `Ca_i` counts distinct outside classes depending on some class of `i`;
//!   `Ce_i` counts distinct outside classes some class of `i` depends on.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::facts::{
    class_dependency_graph, ClassDependencyGraph, ModuleId, ModuleIndex, ModuleScheme,
    SystemSnapshot,
};
use crate::scalar::Scalar;

/// Metric values of one module.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleMetricsRow<T> {
    pub module: ModuleId,
    /// `N_i`
    pub class_count: usize,
    /// `A_i`
    pub cohesion: T,
    /// `E_i`
    pub coupling: T,
    pub ca: usize,
    pub ce: usize,
    /// `μ_i`
    pub intra_edges: usize,
}

/// Unweighted per-module averages of one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMetricsSummary<T> {
    pub scheme: String,
    pub module_count: usize,
    pub avg_cohesion: T,
    pub avg_coupling: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub version_label: String,
    pub num_modules_per_scheme: BTreeMap<String, usize>,
    pub num_classes: usize,
    pub num_methods: Option<u64>,
    pub lines_of_code: Option<u64>,
    /// Sum of normalized invocation counts.
    pub num_invocations: u64,
}

/// Per-module metric selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Cohesion,
    Coupling,
    Ca,
    Ce,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Cohesion, Metric::Coupling, Metric::Ca, Metric::Ce];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Cohesion => "cohesion",
            Metric::Coupling => "coupling",
            Metric::Ca => "ca",
            Metric::Ce => "ce",
        }
    }

    /// Column label used in rendered tables.
    pub fn label(self) -> &'static str {
        match self {
            Metric::Cohesion => "Cohesion",
            Metric::Coupling => "Coupling",
            Metric::Ca => "Ca",
            Metric::Ce => "Ce",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cohesion" => Ok(Metric::Cohesion),
            "coupling" => Ok(Metric::Coupling),
            "ca" => Ok(Metric::Ca),
            "ce" => Ok(Metric::Ce),
            _ => Err(Error::InvalidArgument(format!(
                "unknown metric `{s}` (expected cohesion, coupling, ca or ce)"
            ))),
        }
    }
}

fn check_cover(g: &ClassDependencyGraph, scheme: &ModuleScheme) -> Result<()> {
    if scheme.class_count() != g.vertex_count() {
        return Err(Error::InvalidArgument(format!(
            "scheme `{}` covers {} classes but the graph has {}",
            scheme.name(),
            scheme.class_count(),
            g.vertex_count()
        )));
    }
    Ok(())
}

/// `μ_i`: dependency edges with both endpoints in `module`.
pub fn intra_edge_count(
    g: &ClassDependencyGraph,
    scheme: &ModuleScheme,
    module: &ModuleId,
) -> Result<usize> {
    check_cover(g, scheme)?;
    let m = scheme.resolve(module)?;
    Ok(scheme
        .members(m)
        .iter()
        .flat_map(|&c| g.successors(c))
        .filter(|&&t| scheme.module_of(t) == m)
        .count())
}

/// `ε_ij`: dependency edges between two distinct modules, both directions.
pub fn inter_edge_count(
    g: &ClassDependencyGraph,
    scheme: &ModuleScheme,
    i: &ModuleId,
    j: &ModuleId,
) -> Result<usize> {
    check_cover(g, scheme)?;
    let (mi, mj) = (scheme.resolve(i)?, scheme.resolve(j)?);
    if mi == mj {
        return Err(Error::InvalidArgument(format!(
            "pair coupling needs two distinct modules, got `{i}` twice"
        )));
    }
    let directed = |a: ModuleIndex, b: ModuleIndex| {
        scheme
            .members(a)
            .iter()
            .flat_map(|&c| g.successors(c))
            .filter(|&&t| scheme.module_of(t) == b)
            .count()
    };
    Ok(directed(mi, mj) + directed(mj, mi))
}

/// Bunch cohesion `A_i = μ_i / N_i²`.
pub fn bunch_cohesion<T: Scalar>(
    g: &ClassDependencyGraph,
    scheme: &ModuleScheme,
    module: &ModuleId,
) -> Result<T> {
    let mu = intra_edge_count(g, scheme, module)?;
    let n = scheme.members(scheme.resolve(module)?).len() as u64;
    Ok(T::from_fraction(mu as u64, n * n))
}

/// Bunch pair coupling `E_ij = ε_ij / (2·N_i·N_j)`; symmetric in `i`, `j`.
pub fn bunch_coupling_pair<T: Scalar>(
    g: &ClassDependencyGraph,
    scheme: &ModuleScheme,
    i: &ModuleId,
    j: &ModuleId,
) -> Result<T> {
    let eps = inter_edge_count(g, scheme, i, j)?;
    let ni = scheme.members(scheme.resolve(i)?).len() as u64;
    let nj = scheme.members(scheme.resolve(j)?).len() as u64;
    Ok(T::from_fraction(eps as u64, 2 * ni * nj))
}

/// Module coupling `E_i`: sum of pair couplings to every other module.
pub fn module_coupling<T: Scalar>(
    g: &ClassDependencyGraph,
    scheme: &ModuleScheme,
    module: &ModuleId,
) -> Result<T> {
    check_cover(g, scheme)?;
    let m = scheme.resolve(module)?;
    let counts = CouplingCounts::compute(g, scheme);
    Ok(counts.module_coupling(scheme, m))
}

/// `Ca_i`: distinct classes outside `module` that depend on a class inside.
pub fn afferent_coupling(
    g: &ClassDependencyGraph,
    scheme: &ModuleScheme,
    module: &ModuleId,
) -> Result<usize> {
    check_cover(g, scheme)?;
    let m = scheme.resolve(module)?;
    let mut sources: Vec<_> = scheme
        .members(m)
        .iter()
        .flat_map(|&c| g.predecessors(c))
        .filter(|&&s| scheme.module_of(s) != m)
        .collect();
    sources.sort_unstable();
    sources.dedup();
    Ok(sources.len())
}

/// `Ce_i`: distinct classes outside `module` that a class inside depends on.
pub fn efferent_coupling(
    g: &ClassDependencyGraph,
    scheme: &ModuleScheme,
    module: &ModuleId,
) -> Result<usize> {
    check_cover(g, scheme)?;
    let m = scheme.resolve(module)?;
    let mut targets: Vec<_> = scheme
        .members(m)
        .iter()
        .flat_map(|&c| g.successors(c))
        .filter(|&&t| scheme.module_of(t) != m)
        .collect();
    targets.sort_unstable();
    targets.dedup();
    Ok(targets.len())
}

/// Integer edge tallies of a whole scheme, gathered in one pass over the
/// graph.
#[derive(Debug, Clone)]
struct CouplingCounts {
    intra: Vec<usize>,
    /// For each module, `(other module, ε)` pairs with `ε > 0`, ascending.
    neighbors: Vec<Vec<(ModuleIndex, u64)>>,
    ca: Vec<usize>,
    ce: Vec<usize>,
}

impl CouplingCounts {
    fn compute(g: &ClassDependencyGraph, scheme: &ModuleScheme) -> Self {
        let modules = scheme.module_count();
        let mut intra = vec![0usize; modules];
        let mut pairs: HashMap<(ModuleIndex, ModuleIndex), u64> = HashMap::new();
        for (from, to) in g.edges() {
            let (a, b) = (scheme.module_of(from), scheme.module_of(to));
            if a == b {
                intra[a] += 1;
            } else {
                *pairs.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut neighbors = vec![Vec::new(); modules];
        for (&(a, b), &eps) in &pairs {
            neighbors[a].push((b, eps));
            neighbors[b].push((a, eps));
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }

        // `seen[m] == c + 1` marks module m as already counted for class c.
        let mut ca = vec![0usize; modules];
        let mut ce = vec![0usize; modules];
        let mut seen_out = vec![0usize; modules];
        let mut seen_in = vec![0usize; modules];
        for c in 0..g.vertex_count() {
            let own = scheme.module_of(c);
            let stamp = c + 1;
            for &t in g.successors(c) {
                let m = scheme.module_of(t);
                if m != own && seen_out[m] != stamp {
                    seen_out[m] = stamp;
                    ca[m] += 1;
                }
            }
            for &s in g.predecessors(c) {
                let m = scheme.module_of(s);
                if m != own && seen_in[m] != stamp {
                    seen_in[m] = stamp;
                    ce[m] += 1;
                }
            }
        }

        CouplingCounts {
            intra,
            neighbors,
            ca,
            ce,
        }
    }

    fn module_coupling<T: Scalar>(&self, scheme: &ModuleScheme, m: ModuleIndex) -> T {
        let ni = scheme.members(m).len() as u64;
        self.neighbors[m].iter().fold(T::zero(), |acc, &(j, eps)| {
            let nj = scheme.members(j).len() as u64;
            acc + T::from_fraction(eps, 2 * ni * nj)
        })
    }

    fn row<T: Scalar>(&self, scheme: &ModuleScheme, m: ModuleIndex) -> ModuleMetricsRow<T> {
        let n = scheme.members(m).len();
        ModuleMetricsRow {
            module: scheme.module_id(m),
            class_count: n,
            cohesion: T::from_fraction(self.intra[m] as u64, (n * n) as u64),
            coupling: self.module_coupling(scheme, m),
            ca: self.ca[m],
            ce: self.ce[m],
            intra_edges: self.intra[m],
        }
    }
}

/// One row per module of `scheme`, sorted by module name.
pub fn metrics_for_graph<T: Scalar>(
    g: &ClassDependencyGraph,
    scheme: &ModuleScheme,
) -> Result<Vec<ModuleMetricsRow<T>>> {
    check_cover(g, scheme)?;
    let counts = CouplingCounts::compute(g, scheme);
    Ok((0..scheme.module_count())
        .map(|m| counts.row(scheme, m))
        .collect())
}

/// Per-module metrics of one scheme of a snapshot.
pub fn module_metrics_table<T: Scalar>(
    snapshot: &SystemSnapshot,
    scheme_name: &str,
) -> Result<Vec<ModuleMetricsRow<T>>> {
    let scheme = snapshot.scheme(scheme_name)?;
    metrics_for_graph(&class_dependency_graph(snapshot), scheme)
}

/// Unweighted mean cohesion and coupling over modules.
pub fn system_summary<T: Scalar>(rows: &[ModuleMetricsRow<T>]) -> Result<SystemMetricsSummary<T>> {
    let first = rows
        .first()
        .ok_or_else(|| Error::InvalidArgument("cannot summarize an empty metrics table".into()))?;
    let scheme = &first.module.scheme;
    if let Some(other) = rows.iter().find(|r| &r.module.scheme != scheme) {
        return Err(Error::InvalidArgument(format!(
            "rows mix schemes `{scheme}` and `{}`",
            other.module.scheme
        )));
    }
    let n = T::from_fraction(rows.len() as u64, 1);
    let sum_cohesion = rows
        .iter()
        .fold(T::zero(), |acc, r| acc + r.cohesion.clone());
    let sum_coupling = rows
        .iter()
        .fold(T::zero(), |acc, r| acc + r.coupling.clone());
    Ok(SystemMetricsSummary {
        scheme: scheme.clone(),
        module_count: rows.len(),
        avg_cohesion: sum_cohesion / n.clone(),
        avg_coupling: sum_coupling / n,
    })
}

/// Size and interaction-density tallies of a snapshot.
pub fn descriptive_stats(snapshot: &SystemSnapshot) -> DescriptiveStats {
    let meta = snapshot.metadata();
    DescriptiveStats {
        version_label: meta.version_label.clone(),
        num_modules_per_scheme: snapshot
            .schemes()
            .iter()
            .map(|s| (s.name().to_owned(), s.module_count()))
            .collect(),
        num_classes: snapshot.class_count(),
        num_methods: meta.num_methods,
        lines_of_code: meta.lines_of_code,
        num_invocations: snapshot.total_invocations(),
    }
}
