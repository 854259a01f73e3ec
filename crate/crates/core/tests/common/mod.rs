//! Brute-force oracles and random fixtures shared by the integration tests.
//!
//! The `oracle` module works from plain matrices and never calls the
//! crate's metric or SCC code; the `check_*` helpers compare the two.

#![allow(dead_code)]

use std::collections::BTreeMap;

use modquality::facts::{SnapshotMetadata, SnapshotParts, SystemSnapshot};
use modquality::synth::{apply, EvolutionOp, GeneratorConfig, PACKAGE_SCHEME, PLUGIN_SCHEME};
use modquality::Exact;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small system held as matrices: `invocations[a][b]` is the invocation
/// count from class `a` to class `b` (self-invocations allowed).
#[derive(Debug, Clone)]
pub struct Toy {
    pub module_of: Vec<usize>,
    pub module_count: usize,
    pub invocations: Vec<Vec<u64>>,
}

impl Toy {
    pub fn class_count(&self) -> usize {
        self.module_of.len()
    }

    pub fn class_name(k: usize) -> String {
        format!("c{k:02}")
    }

    pub fn module_name(m: usize) -> String {
        format!("m{m:02}")
    }

    pub fn depends(&self, a: usize, b: usize) -> bool {
        a != b && self.invocations[a][b] > 0
    }

    pub fn members(&self, m: usize) -> Vec<usize> {
        (0..self.class_count())
            .filter(|&c| self.module_of[c] == m)
            .collect()
    }

    pub fn to_snapshot(&self) -> SystemSnapshot {
        let mut parts = SnapshotParts::new(SnapshotMetadata::new("toy"));
        for c in 0..self.class_count() {
            parts.classes.insert(
                Self::class_name(c),
                BTreeMap::from([("package".to_owned(), Self::module_name(self.module_of[c]))]),
            );
        }
        for a in 0..self.class_count() {
            for b in 0..self.class_count() {
                if self.invocations[a][b] > 0 {
                    parts.add_invocation(
                        Self::class_name(a),
                        Self::class_name(b),
                        self.invocations[a][b],
                    );
                }
            }
        }
        parts.build().expect("toy systems are valid")
    }

    /// Builds a toy from an arbitrary assignment, renumbering modules so
    /// that every module index in `0..module_count` is used.
    pub fn from_raw(assignment: Vec<usize>, invocations: Vec<Vec<u64>>) -> Toy {
        let mut used: Vec<usize> = assignment.clone();
        used.sort_unstable();
        used.dedup();
        let module_of = assignment
            .iter()
            .map(|m| used.binary_search(m).unwrap())
            .collect();
        Toy {
            module_of,
            module_count: used.len(),
            invocations,
        }
    }

    pub fn random(rng: &mut impl Rng, max_classes: usize) -> Toy {
        let n = rng.random_range(1..=max_classes);
        let k = rng.random_range(1..=n);
        let assignment = (0..n).map(|_| rng.random_range(0..k)).collect();
        let density: f64 = rng.random_range(0.0..=1.0);
        let invocations = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if rng.random_bool(density) {
                            rng.random_range(1..=4)
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        Toy::from_raw(assignment, invocations)
    }
}

/// Exhaustive metric enumerator over class pairs.
pub mod oracle {
    use super::*;

    pub fn mu(t: &Toy, m: usize) -> usize {
        let members = t.members(m);
        let mut count = 0;
        for &a in &members {
            for &b in &members {
                if t.depends(a, b) {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn eps(t: &Toy, i: usize, j: usize) -> usize {
        let (mi, mj) = (t.members(i), t.members(j));
        let mut count = 0;
        for &a in &mi {
            for &b in &mj {
                if t.depends(a, b) {
                    count += 1;
                }
                if t.depends(b, a) {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn cohesion(t: &Toy, m: usize) -> Exact {
        let n = t.members(m).len() as i64;
        Exact::new((mu(t, m) as i64).into(), (n * n).into())
    }

    pub fn pair_coupling(t: &Toy, i: usize, j: usize) -> Exact {
        let ni = t.members(i).len() as i64;
        let nj = t.members(j).len() as i64;
        Exact::new((eps(t, i, j) as i64).into(), (2 * ni * nj).into())
    }

    pub fn coupling(t: &Toy, i: usize) -> Exact {
        (0..t.module_count)
            .filter(|&j| j != i)
            .map(|j| pair_coupling(t, i, j))
            .fold(Exact::from_integer(0.into()), |acc, x| acc + x)
    }

    pub fn ca(t: &Toy, m: usize) -> usize {
        let members = t.members(m);
        (0..t.class_count())
            .filter(|&x| t.module_of[x] != m)
            .filter(|&x| members.iter().any(|&c| t.depends(x, c)))
            .count()
    }

    pub fn ce(t: &Toy, m: usize) -> usize {
        let members = t.members(m);
        (0..t.class_count())
            .filter(|&x| t.module_of[x] != m)
            .filter(|&x| members.iter().any(|&c| t.depends(c, x)))
            .count()
    }

    /// Reflexive-transitive closure of a boolean adjacency matrix.
    pub fn closure(adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
        let n = adj.len();
        let mut reach = adj.to_vec();
        for (v, row) in reach.iter_mut().enumerate() {
            row[v] = true;
        }
        for k in 0..n {
            let via = reach[k].clone();
            for row in reach.iter_mut() {
                if row[k] {
                    for (cell, &step) in row.iter_mut().zip(&via) {
                        *cell |= step;
                    }
                }
            }
        }
        reach
    }

    /// Mutual-reachability classes, each ascending, ordered by first member.
    pub fn scc_partition(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
        let reach = closure(adj);
        let n = adj.len();
        let mut assigned = vec![false; n];
        let mut parts = Vec::new();
        for a in 0..n {
            if assigned[a] {
                continue;
            }
            let comp: Vec<usize> = (0..n).filter(|&b| reach[a][b] && reach[b][a]).collect();
            for &b in &comp {
                assigned[b] = true;
            }
            parts.push(comp);
        }
        parts
    }

    /// Kahn's algorithm; `true` when the graph has a topological order.
    pub fn is_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
        let mut indeg = vec![0usize; n];
        let mut out = vec![Vec::new(); n];
        for &(a, b) in edges {
            out[a].push(b);
            indeg[b] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }
        seen == n
    }
}

/// Random directed graph without self-loops on `1..=max_vertices` vertices.
pub fn random_module_graph(
    rng: &mut impl Rng,
    max_vertices: usize,
) -> (usize, Vec<(usize, usize)>) {
    let n = rng.random_range(1..=max_vertices);
    let density: f64 = rng.random_range(0.0..=0.6);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.random_bool(density) {
                edges.push((a, b));
            }
        }
    }
    (n, edges)
}

pub fn module_names(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("m{k:02}")).collect()
}

/// A random op valid for `snapshot`, or `None` when the draw does not fit.
pub fn random_op(
    snapshot: &SystemSnapshot,
    rng: &mut impl Rng,
    fresh: &mut usize,
) -> Option<EvolutionOp> {
    let classes: Vec<String> = snapshot
        .classes()
        .iter()
        .map(|c| c.as_str().to_owned())
        .collect();
    let scheme_name = *[PACKAGE_SCHEME, PLUGIN_SCHEME].choose(rng)?;
    let scheme = snapshot.scheme(scheme_name).ok()?;
    let modules = scheme.module_names().to_vec();
    *fresh += 1;
    let op = match rng.random_range(0..7) {
        0 => {
            let m = rng.random_range(0..modules.len());
            let members = scheme.members(m);
            if members.len() < 2 {
                return None;
            }
            let take = rng.random_range(1..members.len());
            EvolutionOp::SplitModule {
                scheme: scheme_name.into(),
                module: modules[m].clone(),
                new_module: format!("split{fresh}"),
                moved: members[..take]
                    .iter()
                    .map(|&c| classes[c].clone())
                    .collect(),
            }
        }
        1 => {
            if modules.len() < 2 {
                return None;
            }
            let picked: Vec<String> = modules.choose_multiple(rng, 2).cloned().collect();
            EvolutionOp::MergeModules {
                scheme: scheme_name.into(),
                into: picked[0].clone(),
                modules: picked,
            }
        }
        2 => EvolutionOp::MoveClass {
            scheme: scheme_name.into(),
            class: classes.choose(rng)?.clone(),
            to: modules.choose(rng)?.clone(),
        },
        3 => EvolutionOp::AddClass {
            class: format!("org.added.K{fresh}"),
            modules: snapshot
                .schemes()
                .iter()
                .map(|s| {
                    (
                        s.name().to_owned(),
                        s.module_names().choose(rng).unwrap().clone(),
                    )
                })
                .collect(),
        },
        4 => EvolutionOp::RemoveClass {
            class: classes.choose(rng)?.clone(),
        },
        5 => EvolutionOp::AddEdge {
            from: classes.choose(rng)?.clone(),
            to: classes.choose(rng)?.clone(),
            count: rng.random_range(1..=3),
        },
        _ => {
            let e = snapshot.invocations().choose(rng)?;
            EvolutionOp::RemoveEdge {
                from: classes[e.from].clone(),
                to: classes[e.to].clone(),
            }
        }
    };
    Some(op)
}

/// Applies `steps` random valid ops.
pub fn evolve(snapshot: &SystemSnapshot, rng: &mut impl Rng, steps: usize) -> SystemSnapshot {
    let mut current = snapshot.clone();
    let mut fresh = 0;
    let mut applied = 0;
    let mut attempts = 0;
    while applied < steps && attempts < steps * 20 {
        attempts += 1;
        if let Some(op) = random_op(&current, rng, &mut fresh) {
            if let Ok(next) = apply(&current, &op) {
                current = next;
                applied += 1;
            }
        }
    }
    current
}

/// A generated version pair with distinct labels.
pub fn random_version_pair(seed: u64) -> (SystemSnapshot, SystemSnapshot) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_classes = rng.random_range(4..=40);
    let config = GeneratorConfig {
        seed,
        num_classes,
        num_modules: rng.random_range(1..=num_classes.min(8)),
        num_plugins: Some(rng.random_range(1..=3.min(num_classes))),
        edge_probability: rng.random_range(0.0..=0.3),
        intra_bias: rng.random_range(1.0..=5.0),
        version_label: "1.0".into(),
    };
    let before = modquality::synth::generate(&config).unwrap();
    let steps = rng.random_range(1..=8);
    let after = evolve(&before, &mut rng, steps);
    let mut parts = after.to_parts();
    parts.metadata.version_label = "2.0".into();
    (before, parts.build().unwrap())
}

pub fn crate_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Compares every crate metric of `t` against the enumerator, exactly for
/// rationals and within `tol` for `f64`.
pub fn check_toy_metrics(t: &Toy, tol: f64) -> Result<(), String> {
    use modquality::facts::class_dependency_graph;
    use modquality::metrics::{
        bunch_coupling_pair, inter_edge_count, intra_edge_count, metrics_for_graph,
    };
    use num_traits::ToPrimitive;

    let snapshot = t.to_snapshot();
    let g = class_dependency_graph(&snapshot);
    let scheme = snapshot.scheme("package").map_err(|e| e.to_string())?;
    let exact = metrics_for_graph::<Exact>(&g, scheme).map_err(|e| e.to_string())?;
    let float = metrics_for_graph::<f64>(&g, scheme).map_err(|e| e.to_string())?;
    if exact.len() != t.module_count || float.len() != t.module_count {
        return Err(format!("expected {} rows", t.module_count));
    }
    let close = |x: f64, want: &Exact| (x - want.to_f64().unwrap()).abs() <= tol;
    for m in 0..t.module_count {
        let id = scheme.module_id(m);
        let (e, f) = (&exact[m], &float[m]);
        let mu = intra_edge_count(&g, scheme, &id).map_err(|e| e.to_string())?;
        let want_a = oracle::cohesion(t, m);
        let want_e = oracle::coupling(t, m);
        let checks = [
            ("mu", mu == oracle::mu(t, m) && e.intra_edges == mu),
            ("A exact", e.cohesion == want_a),
            ("A float", close(f.cohesion, &want_a)),
            ("E exact", e.coupling == want_e),
            ("E float", close(f.coupling, &want_e)),
            ("Ca", e.ca == oracle::ca(t, m) && f.ca == e.ca),
            ("Ce", e.ce == oracle::ce(t, m) && f.ce == e.ce),
        ];
        if let Some((what, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(format!("{what} mismatch on module {m} of {t:?}"));
        }
        for j in (0..t.module_count).filter(|&j| j != m) {
            let jd = scheme.module_id(j);
            let eps = inter_edge_count(&g, scheme, &id, &jd).map_err(|e| e.to_string())?;
            if eps != oracle::eps(t, m, j) {
                return Err(format!("eps({m},{j}) = {eps} on {t:?}"));
            }
            let pair: Exact =
                bunch_coupling_pair(&g, scheme, &id, &jd).map_err(|e| e.to_string())?;
            let pair_f: f64 =
                bunch_coupling_pair(&g, scheme, &id, &jd).map_err(|e| e.to_string())?;
            let want = oracle::pair_coupling(t, m, j);
            if pair != want || !close(pair_f, &want) {
                return Err(format!("E({m},{j}) = {pair} on {t:?}"));
            }
        }
    }
    Ok(())
}

/// Counts bound and symmetry violations over every module and module pair:
/// `0 <= A_i <= (N_i-1)/N_i`, `E_ij == E_ji`, `0 <= E_ij <= 1`.
pub fn bound_violations(snapshot: &SystemSnapshot) -> usize {
    use modquality::facts::class_dependency_graph;
    use modquality::metrics::{bunch_coupling_pair, metrics_for_graph};

    let g = class_dependency_graph(snapshot);
    let zero = Exact::from_integer(0.into());
    let one = Exact::from_integer(1.into());
    let mut violations = 0;
    for scheme in snapshot.schemes() {
        let rows = metrics_for_graph::<Exact>(&g, scheme).unwrap();
        for (m, row) in rows.iter().enumerate() {
            let n = row.class_count as i64;
            let max = Exact::new((n - 1).into(), n.into());
            if row.cohesion < zero || row.cohesion > max {
                violations += 1;
            }
            for j in (m + 1)..rows.len() {
                let (a, b) = (scheme.module_id(m), scheme.module_id(j));
                let ab: Exact = bunch_coupling_pair(&g, scheme, &a, &b).unwrap();
                let ba: Exact = bunch_coupling_pair(&g, scheme, &b, &a).unwrap();
                if ab != ba || ab < zero || ab > one {
                    violations += 1;
                }
            }
        }
    }
    violations
}

/// Checks the crate's SCC partition against mutual reachability and that
/// the condensation is acyclic.
pub fn check_scc(n: usize, edges: &[(usize, usize)]) -> Result<(), String> {
    use modquality::modgraph::{
        scc_analysis, strongly_connected_components, ModuleDependencyGraph,
    };

    let mg = ModuleDependencyGraph::new("package", module_names(n), edges.iter().copied())
        .map_err(|e| e.to_string())?;
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
    }
    let want = oracle::scc_partition(&adj);
    let got = strongly_connected_components(&mg);
    if got != want {
        return Err(format!(
            "partition {got:?} != {want:?} for {n} vertices {edges:?}"
        ));
    }

    let mut comp_of = vec![0; n];
    for (k, comp) in got.iter().enumerate() {
        for &v in comp {
            comp_of[v] = k;
        }
    }
    let condensed: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(a, b)| (comp_of[a], comp_of[b]))
        .filter(|(a, b)| a != b)
        .collect();
    if !oracle::is_acyclic(got.len(), &condensed) {
        return Err(format!("condensation has a cycle for {edges:?}"));
    }

    let report = scc_analysis(&mg);
    let mut sizes: Vec<usize> = want.iter().map(Vec::len).filter(|&s| s >= 2).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let got_sizes: Vec<usize> = report.scc_members.iter().map(Vec::len).collect();
    if report.num_nontrivial_scc != sizes.len()
        || report.largest_scc_size != sizes.first().copied().unwrap_or(0)
        || got_sizes != sizes
    {
        return Err(format!("report {report:?} disagrees with sizes {sizes:?}"));
    }
    Ok(())
}

/// Antisymmetry, partition and self-comparison on one version pair, every
/// scheme and metric. Returns how many forward classifications were not
/// "same", plus created and removed modules.
pub fn check_evolution(before: &SystemSnapshot, after: &SystemSnapshot) -> Result<usize, String> {
    use modquality::evolution::{classify_delta, VersionPair};
    use modquality::Metric;

    let forward = VersionPair::new(before, after).map_err(|e| e.to_string())?;
    let backward = VersionPair::new(after, before).map_err(|e| e.to_string())?;
    let mut twin_parts = before.to_parts();
    twin_parts.metadata.version_label.push_str("-copy");
    let twin = twin_parts.build().map_err(|e| e.to_string())?;
    let same = VersionPair::new(before, &twin).map_err(|e| e.to_string())?;
    let mut moved = 0;

    for scheme in before.scheme_names() {
        let from_modules = before.scheme(scheme).unwrap().module_count();
        let to_modules = after
            .scheme(scheme)
            .map_err(|e| e.to_string())?
            .module_count();
        for metric in Metric::ALL {
            let run = |p: &VersionPair<'_>| {
                classify_delta::<Exact>(p, scheme, metric).map_err(|e| e.to_string())
            };
            let (f, b, s) = (run(&forward)?, run(&backward)?, run(&same)?);
            if f.increased != b.decreased || f.decreased != b.increased || f.same != b.same {
                return Err(format!("antisymmetry: {f:?} vs {b:?}"));
            }
            if f.matched() + f.removed.len() != from_modules
                || f.matched() + f.created.len() != to_modules
            {
                return Err(format!(
                    "partition: {f:?} over {from_modules}/{to_modules} modules"
                ));
            }
            if s.same != from_modules
                || s.increased + s.decreased != 0
                || !s.created.is_empty()
                || !s.removed.is_empty()
            {
                return Err(format!("self-comparison: {s:?}"));
            }
            moved += f.increased + f.decreased + f.created.len() + f.removed.len();
        }
    }
    Ok(moved)
}
