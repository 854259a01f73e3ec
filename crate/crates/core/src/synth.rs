//! Seeded synthetic systems and structural evolution steps.
//!
//! Randomness comes from `rand_chacha`'s ChaCha8 generator seeded with
//! `seed_from_u64`; the algorithm name and seed are written into the
//! `generator` metadata field of every generated snapshot.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::facts::{SnapshotMetadata, SnapshotParts, SystemSnapshot};

pub const PACKAGE_SCHEME: &str = "package";
pub const PLUGIN_SCHEME: &str = "plugin";

/// Random source identification recorded in generated metadata.
pub const RNG_ALGORITHM: &str = "rand_chacha-0.9/ChaCha8Rng/seed_from_u64";

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub num_classes: usize,
    /// Modules of the fine "package" scheme.
    pub num_modules: usize,
    /// Modules of the coarse "plugin" scheme; defaults to a fifth of
    /// `num_modules`, at least one.
    pub num_plugins: Option<usize>,
    /// Probability of a directed dependency between two classes of
    /// different packages.
    pub edge_probability: f64,
    /// Multiplier applied to `edge_probability` for pairs inside one
    /// package (capped at 1).
    pub intra_bias: f64,
    pub version_label: String,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 1,
            num_classes: 200,
            num_modules: 20,
            num_plugins: None,
            edge_probability: 0.02,
            intra_bias: 4.0,
            version_label: "1.0".into(),
        }
    }
}

impl GeneratorConfig {
    pub fn plugin_count(&self) -> usize {
        self.num_plugins
            .unwrap_or_else(|| self.num_modules.div_ceil(5))
            .max(1)
    }

    pub fn intra_probability(&self) -> f64 {
        (self.edge_probability * self.intra_bias).min(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.num_classes == 0 {
            return bad("num_classes must be at least 1".into());
        }
        if self.num_modules == 0 || self.num_modules > self.num_classes {
            return bad(format!(
                "num_modules must be in 1..={} (got {})",
                self.num_classes, self.num_modules
            ));
        }
        if let Some(p) = self.num_plugins {
            if p == 0 || p > self.num_classes {
                return bad(format!(
                    "num_plugins must be in 1..={} (got {p})",
                    self.num_classes
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.edge_probability) {
            return bad(format!(
                "edge_probability must lie in [0, 1] (got {})",
                self.edge_probability
            ));
        }
        if !(self.intra_bias >= 1.0 && self.intra_bias.is_finite()) {
            return bad(format!(
                "intra_bias must be a finite value >= 1 (got {})",
                self.intra_bias
            ));
        }
        if self.version_label.is_empty() {
            return bad("version label is empty".into());
        }
        Ok(())
    }
}

fn width(n: usize) -> usize {
    n.saturating_sub(1).to_string().len()
}

fn class_name(k: usize, n: usize) -> String {
    format!("org.synth.C{:0w$}", k, w = width(n))
}

/// Shuffles classes and deals them round-robin into `modules` groups.
fn partition(rng: &mut ChaCha8Rng, classes: usize, modules: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..classes).collect();
    order.shuffle(rng);
    let mut assignment = vec![0; classes];
    for (pos, class) in order.into_iter().enumerate() {
        assignment[class] = pos % modules;
    }
    assignment
}

/// Calls `hit` for each position of `0..len` selected independently with
/// probability `p`, jumping over the gaps with geometric draws.
fn bernoulli_positions(
    rng: &mut ChaCha8Rng,
    len: usize,
    p: f64,
    mut hit: impl FnMut(&mut ChaCha8Rng, usize),
) {
    if p <= 0.0 || len == 0 {
        return;
    }
    let gaps = Geometric::new(p).expect("probability validated");
    let mut pos: u64 = 0;
    loop {
        pos = pos.saturating_add(gaps.sample(rng));
        if pos >= len as u64 {
            break;
        }
        hit(rng, pos as usize);
        pos += 1;
    }
}

/// Generates a snapshot with a "package" and a "plugin" scheme, each an
/// independent shuffled round-robin partition, and independently sampled
/// directed dependencies.
pub fn generate(config: &GeneratorConfig) -> Result<SystemSnapshot> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.num_classes;
    let names: Vec<String> = (0..n).map(|k| class_name(k, n)).collect();

    let packages = partition(&mut rng, n, config.num_modules);
    let plugins = partition(&mut rng, n, config.plugin_count());

    let mut parts = SnapshotParts::new(SnapshotMetadata {
        version_label: config.version_label.clone(),
        generator: Some(format!("{RNG_ALGORITHM}; seed={}", config.seed)),
        ..Default::default()
    });
    let pkg_width = width(config.num_modules);
    let plugin_width = width(config.plugin_count());
    for (k, name) in names.iter().enumerate() {
        let modules = BTreeMap::from([
            (
                PACKAGE_SCHEME.to_owned(),
                format!("pkg{:0w$}", packages[k], w = pkg_width),
            ),
            (
                PLUGIN_SCHEME.to_owned(),
                format!("plugin{:0w$}", plugins[k], w = plugin_width),
            ),
        ]);
        parts.classes.insert(name.clone(), modules);
    }

    // Classes grouped by package: members of package m occupy
    // by_module[start[m]..start[m + 1]].
    let mut by_module: Vec<usize> = (0..n).collect();
    by_module.sort_by_key(|&c| (packages[c], c));
    let mut start = vec![0usize; config.num_modules + 1];
    for &c in &by_module {
        start[packages[c] + 1] += 1;
    }
    for m in 0..config.num_modules {
        start[m + 1] += start[m];
    }

    let p_intra = config.intra_probability();
    let p_inter = config.edge_probability;
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    for (source, &m) in packages.iter().enumerate() {
        let (lo, hi) = (start[m], start[m + 1]);
        let mates: Vec<usize> = by_module[lo..hi]
            .iter()
            .copied()
            .filter(|&c| c != source)
            .collect();
        bernoulli_positions(&mut rng, mates.len(), p_intra, |rng, k| {
            edges.push((source, mates[k], rng.random_range(1..=3)));
        });
        let outside = n - (hi - lo);
        bernoulli_positions(&mut rng, outside, p_inter, |rng, k| {
            let target = if k < lo {
                by_module[k]
            } else {
                by_module[k + (hi - lo)]
            };
            edges.push((source, target, rng.random_range(1..=3)));
        });
    }
    for (from, to, count) in edges {
        parts.add_invocation(names[from].clone(), names[to].clone(), count);
    }
    parts.build()
}

/// A structural change applied to a snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvolutionOp {
    /// Moves the listed classes of `module` into the new module
    /// `new_module`; the rest stay in `module`.
    SplitModule {
        scheme: String,
        module: String,
        new_module: String,
        moved: Vec<String>,
    },
    /// Folds `modules` into `into`, which may be one of them or a new name.
    MergeModules {
        scheme: String,
        modules: Vec<String>,
        into: String,
    },
    /// Reassigns one class; `to` may name a new module.
    MoveClass {
        scheme: String,
        class: String,
        to: String,
    },
    /// Adds a class with its module in every scheme.
    AddClass {
        class: String,
        modules: BTreeMap<String, String>,
    },
    /// Removes a class together with its invocations.
    RemoveClass {
        class: String,
    },
    /// Adds invocations, merging with an existing fact.
    AddEdge {
        from: String,
        to: String,
        count: u64,
    },
    RemoveEdge {
        from: String,
        to: String,
    },
}

impl EvolutionOp {
    pub fn kind(&self) -> &'static str {
        match self {
            EvolutionOp::SplitModule { .. } => "split_module",
            EvolutionOp::MergeModules { .. } => "merge_modules",
            EvolutionOp::MoveClass { .. } => "move_class",
            EvolutionOp::AddClass { .. } => "add_class",
            EvolutionOp::RemoveClass { .. } => "remove_class",
            EvolutionOp::AddEdge { .. } => "add_edge",
            EvolutionOp::RemoveEdge { .. } => "remove_edge",
        }
    }
}

fn members<'p>(parts: &'p SnapshotParts, scheme: &str, module: &str) -> Vec<&'p String> {
    parts
        .classes
        .iter()
        .filter(|(_, m)| m.get(scheme).map(String::as_str) == Some(module))
        .map(|(c, _)| c)
        .collect()
}

fn require_scheme(snapshot: &SystemSnapshot, scheme: &str) -> Result<()> {
    snapshot.scheme(scheme).map(|_| ())
}

fn require_module(snapshot: &SystemSnapshot, scheme: &str, module: &str) -> Result<()> {
    let s = snapshot.scheme(scheme)?;
    s.module_index(module)
        .map(|_| ())
        .ok_or_else(|| Error::not_found("module", format!("{scheme}:{module}")))
}

fn require_class(parts: &SnapshotParts, class: &str) -> Result<()> {
    if parts.classes.contains_key(class) {
        Ok(())
    } else {
        Err(Error::not_found("class", class))
    }
}

/// Applies `op`, returning a new snapshot whose version label carries a
/// `+<kind>` suffix. Facts the op does not touch are kept verbatim.
pub fn apply(snapshot: &SystemSnapshot, op: &EvolutionOp) -> Result<SystemSnapshot> {
    let mut parts = snapshot.to_parts();
    match op {
        EvolutionOp::SplitModule {
            scheme,
            module,
            new_module,
            moved,
        } => {
            require_module(snapshot, scheme, module)?;
            if snapshot.scheme(scheme)?.module_index(new_module).is_some() {
                return Err(Error::Validation(format!(
                    "module `{scheme}:{new_module}` already exists"
                )));
            }
            let current = members(&parts, scheme, module).len();
            let mut distinct = moved.clone();
            distinct.sort();
            distinct.dedup();
            if distinct.is_empty() || distinct.len() >= current {
                return Err(Error::Validation(format!(
                    "splitting `{scheme}:{module}` must leave both parts non-empty"
                )));
            }
            for class in &distinct {
                require_class(&parts, class)?;
                let slot = parts.classes.get_mut(class).expect("checked");
                if slot.get(scheme) != Some(module) {
                    return Err(Error::Validation(format!(
                        "class `{class}` is not in `{scheme}:{module}`"
                    )));
                }
                slot.insert(scheme.clone(), new_module.clone());
            }
        }
        EvolutionOp::MergeModules {
            scheme,
            modules,
            into,
        } => {
            if modules.is_empty() {
                return Err(Error::InvalidArgument(
                    "merge needs at least one module".into(),
                ));
            }
            for m in modules {
                require_module(snapshot, scheme, m)?;
            }
            if snapshot.scheme(scheme)?.module_index(into).is_some() && !modules.contains(into) {
                return Err(Error::Validation(format!(
                    "merge target `{scheme}:{into}` already exists outside the merged set"
                )));
            }
            for assignment in parts.classes.values_mut() {
                let slot = assignment.get_mut(scheme).expect("schemes are total");
                if modules.contains(slot) {
                    *slot = into.clone();
                }
            }
        }
        EvolutionOp::MoveClass { scheme, class, to } => {
            require_scheme(snapshot, scheme)?;
            require_class(&parts, class)?;
            if to.is_empty() {
                return Err(Error::Validation("empty module name".into()));
            }
            let from = parts.classes[class][scheme].clone();
            if &from != to && members(&parts, scheme, &from).len() == 1 {
                return Err(Error::Validation(format!(
                    "moving `{class}` would empty `{scheme}:{from}`"
                )));
            }
            parts
                .classes
                .get_mut(class)
                .expect("checked")
                .insert(scheme.clone(), to.clone());
        }
        EvolutionOp::AddClass { class, modules } => {
            if parts.classes.contains_key(class) {
                return Err(Error::Validation(format!("class `{class}` already exists")));
            }
            for scheme in modules.keys() {
                require_scheme(snapshot, scheme)?;
            }
            for scheme in snapshot.scheme_names() {
                if !modules.contains_key(scheme) {
                    return Err(Error::Completeness {
                        class: class.clone(),
                        scheme: scheme.to_owned(),
                    });
                }
            }
            parts.classes.insert(class.clone(), modules.clone());
        }
        EvolutionOp::RemoveClass { class } => {
            require_class(&parts, class)?;
            for (scheme, module) in &parts.classes[class] {
                if members(&parts, scheme, module).len() == 1 {
                    return Err(Error::Validation(format!(
                        "removing `{class}` would empty `{scheme}:{module}`"
                    )));
                }
            }
            parts.classes.remove(class);
            parts
                .invocations
                .retain(|(a, b), _| a != class && b != class);
        }
        EvolutionOp::AddEdge { from, to, count } => {
            require_class(&parts, from)?;
            require_class(&parts, to)?;
            if *count == 0 {
                return Err(Error::InvalidArgument(
                    "edge count must be at least 1".into(),
                ));
            }
            parts.add_invocation(from.clone(), to.clone(), *count);
        }
        EvolutionOp::RemoveEdge { from, to } => {
            if parts
                .invocations
                .remove(&(from.clone(), to.clone()))
                .is_none()
            {
                return Err(Error::not_found("invocation", format!("{from} -> {to}")));
            }
        }
    }
    parts.metadata.version_label = format!("{}+{}", snapshot.version_label(), op.kind());
    parts.build()
}

/// Applies a sequence of ops in order.
pub fn apply_all<'o>(
    snapshot: &SystemSnapshot,
    ops: impl IntoIterator<Item = &'o EvolutionOp>,
) -> Result<SystemSnapshot> {
    let mut current = snapshot.clone();
    for op in ops {
        current = apply(&current, op)?;
    }
    Ok(current)
}

fn relabel(snapshot: SystemSnapshot, label: &str) -> Result<SystemSnapshot> {
    let mut parts = snapshot.to_parts();
    parts.metadata.version_label = label.to_owned();
    parts.build()
}

/// Canned two-version evolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// One dominant package is split into three.
    MonolithSplit,
    /// New classes and dependencies inside the existing module structure.
    OrganicGrowth,
}

impl Scenario {
    pub const ALL: [Scenario; 2] = [Scenario::MonolithSplit, Scenario::OrganicGrowth];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::MonolithSplit => "monolith-split",
            Scenario::OrganicGrowth => "organic-growth",
        }
    }

    /// Preset generator settings; the seed is fixed so runs are repeatable.
    pub fn default_config(self) -> GeneratorConfig {
        GeneratorConfig {
            seed: 2010,
            num_classes: 240,
            num_modules: 16,
            num_plugins: Some(4),
            edge_probability: 0.01,
            intra_bias: 6.0,
            version_label: "1.0".into(),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown scenario `{s}` (expected monolith-split or organic-growth)"
                ))
            })
    }
}

/// Output of [`run_scenario`]: the version before and after the change.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub before: SystemSnapshot,
    pub after: SystemSnapshot,
    pub ops: Vec<EvolutionOp>,
    /// For monolith-split: the split package and all its successors
    /// (including the remainder kept under the original name).
    pub split: Option<(String, Vec<String>)>,
}

pub const MONOLITH: &str = "monolith";

/// Builds a before/after pair for `scenario`, labelled `1.0` and `2.0`.
pub fn run_scenario(scenario: Scenario, config: &GeneratorConfig) -> Result<ScenarioRun> {
    let base = generate(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9E37_79B9_7F4A_7C15);
    match scenario {
        Scenario::MonolithSplit => {
            if config.num_classes < 3 {
                return Err(Error::InvalidArgument(
                    "monolith-split needs at least 3 classes".into(),
                ));
            }
            // Before: the first half of the packages form one dominant module.
            let packages = base.scheme(PACKAGE_SCHEME)?.module_names().to_vec();
            let merged: Vec<String> = packages[..packages.len().div_ceil(2)].to_vec();
            let merge = EvolutionOp::MergeModules {
                scheme: PACKAGE_SCHEME.into(),
                modules: merged,
                into: MONOLITH.into(),
            };
            let before = relabel(apply(&base, &merge)?, "1.0")?;

            let parts = before.to_parts();
            let inside: Vec<String> = members(&parts, PACKAGE_SCHEME, MONOLITH)
                .into_iter()
                .cloned()
                .collect();
            let chunk = inside.len().div_ceil(3);
            let mut ops = Vec::new();
            let mut successors = vec![MONOLITH.to_owned()];
            for (k, piece) in inside.chunks(chunk).enumerate().skip(1) {
                let name = format!("{MONOLITH}.part{}", k + 1);
                ops.push(EvolutionOp::SplitModule {
                    scheme: PACKAGE_SCHEME.into(),
                    module: MONOLITH.into(),
                    new_module: name.clone(),
                    moved: piece.to_vec(),
                });
                successors.push(name);
            }
            let after = relabel(apply_all(&before, &ops)?, "2.0")?;
            Ok(ScenarioRun {
                before,
                after,
                ops,
                split: Some((MONOLITH.into(), successors)),
            })
        }
        Scenario::OrganicGrowth => {
            let before = base;
            let n = config.num_classes;
            let grow = (n / 10).max(1);
            let total = n + grow;
            let existing: Vec<String> = before
                .classes()
                .iter()
                .map(|c| c.as_str().to_owned())
                .collect();
            let schemes: Vec<(String, Vec<String>)> = before
                .schemes()
                .iter()
                .map(|s| (s.name().to_owned(), s.module_names().to_vec()))
                .collect();
            let mut ops = Vec::new();
            for k in n..total {
                let class = format!("org.synth.N{:0w$}", k, w = width(total));
                let modules = schemes
                    .iter()
                    .map(|(scheme, names)| {
                        (
                            scheme.clone(),
                            names[rng.random_range(0..names.len())].clone(),
                        )
                    })
                    .collect();
                ops.push(EvolutionOp::AddClass {
                    class: class.clone(),
                    modules,
                });
                for _ in 0..3 {
                    let target = existing[rng.random_range(0..existing.len())].clone();
                    ops.push(EvolutionOp::AddEdge {
                        from: class.clone(),
                        to: target,
                        count: 1,
                    });
                }
            }
            let after = relabel(apply_all(&before, &ops)?, "2.0")?;
            Ok(ScenarioRun {
                before,
                after,
                ops,
                split: None,
            })
        }
    }
}
