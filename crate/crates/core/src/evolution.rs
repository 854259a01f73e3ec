//! Cross-version comparison.
//!
//! Modules are matched between two snapshots by exact name within a scheme.
//! For every matched module, each metric is classified as increased, same
//! or decreased. Modules present in only one version are listed as created
//! or removed and stay out of the tallies. Renames are not detected.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::facts::{class_dependency_graph, ModuleId, SystemSnapshot};
use crate::metrics::{module_metrics_table, Metric, ModuleMetricsRow};
use crate::modgraph::{lift_module_graph, scc_analysis};
use crate::scalar::Scalar;

/// Two successive versions of a system.
#[derive(Debug, Clone, Copy)]
pub struct VersionPair<'a> {
    pub from: &'a SystemSnapshot,
    pub to: &'a SystemSnapshot,
}

impl<'a> VersionPair<'a> {
    pub fn new(from: &'a SystemSnapshot, to: &'a SystemSnapshot) -> Result<Self> {
        if from.version_label() == to.version_label() {
            return Err(Error::InvalidArgument(format!(
                "both versions are labelled `{}`",
                from.version_label()
            )));
        }
        Ok(VersionPair { from, to })
    }

    /// `"X→Y"`
    pub fn label(&self) -> String {
        pair_label(self.from.version_label(), self.to.version_label())
    }
}

pub fn pair_label(from: &str, to: &str) -> String {
    format!("{from}\u{2192}{to}")
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModuleMatching {
    /// Modules present in both versions, by name.
    pub matched: Vec<(ModuleId, ModuleId)>,
    /// Present only in the later version.
    pub created: Vec<ModuleId>,
    /// Present only in the earlier version.
    pub removed: Vec<ModuleId>,
}

fn match_names<'n>(
    scheme: &str,
    from: impl IntoIterator<Item = &'n String>,
    to: impl IntoIterator<Item = &'n String>,
) -> ModuleMatching {
    let from: BTreeSet<&String> = from.into_iter().collect();
    let to: BTreeSet<&String> = to.into_iter().collect();
    let id = |n: &String| ModuleId::new(scheme, n.clone());
    ModuleMatching {
        matched: from.intersection(&to).map(|n| (id(n), id(n))).collect(),
        created: to.difference(&from).map(|n| id(n)).collect(),
        removed: from.difference(&to).map(|n| id(n)).collect(),
    }
}

pub fn match_modules(pair: &VersionPair<'_>, scheme_name: &str) -> Result<ModuleMatching> {
    let from = pair.from.scheme(scheme_name)?;
    let to = pair.to.scheme(scheme_name)?;
    Ok(match_names(
        scheme_name,
        from.module_names(),
        to.module_names(),
    ))
}

/// Increase/same/decrease tallies of one metric over matched modules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaTable {
    pub scheme: String,
    pub metric: Metric,
    pub increased: usize,
    pub same: usize,
    pub decreased: usize,
    pub created: Vec<ModuleId>,
    pub removed: Vec<ModuleId>,
}

impl DeltaTable {
    pub fn matched(&self) -> usize {
        self.increased + self.same + self.decreased
    }

    /// The three tallies as one tabular row, `"incr. & same & decr."`.
    pub fn tally_row(&self) -> String {
        format!("{} & {} & {}", self.increased, self.same, self.decreased)
    }
}

fn compare_metric<T: Scalar>(
    metric: Metric,
    a: &ModuleMetricsRow<T>,
    b: &ModuleMetricsRow<T>,
) -> Ordering {
    match metric {
        Metric::Cohesion => a.cohesion.metric_cmp(&b.cohesion),
        Metric::Coupling => a.coupling.metric_cmp(&b.coupling),
        Metric::Ca => a.ca.cmp(&b.ca),
        Metric::Ce => a.ce.cmp(&b.ce),
    }
}

/// Classifies one metric given both versions' metric tables of the same
/// scheme (each sorted by module name, as produced by
/// [`module_metrics_table`]).
pub fn classify_rows<T: Scalar>(
    scheme: &str,
    metric: Metric,
    from: &[ModuleMetricsRow<T>],
    to: &[ModuleMetricsRow<T>],
) -> DeltaTable {
    let matching = match_names(
        scheme,
        from.iter().map(|r| &r.module.name),
        to.iter().map(|r| &r.module.name),
    );
    let find = |rows: &'_ [ModuleMetricsRow<T>], name: &str| {
        rows.binary_search_by(|r| r.module.name.as_str().cmp(name))
            .map(|i| rows[i].clone())
            .ok()
    };
    let (mut increased, mut same, mut decreased) = (0, 0, 0);
    for (old, _) in &matching.matched {
        let (a, b) = match (find(from, &old.name), find(to, &old.name)) {
            (Some(a), Some(b)) => (a, b),
            _ => unreachable!("matched modules exist on both sides"),
        };
        match compare_metric(metric, &b, &a) {
            Ordering::Greater => increased += 1,
            Ordering::Equal => same += 1,
            Ordering::Less => decreased += 1,
        }
    }
    DeltaTable {
        scheme: scheme.to_owned(),
        metric,
        increased,
        same,
        decreased,
        created: matching.created,
        removed: matching.removed,
    }
}

/// Classifies how `metric` moved for every module matched across `pair`.
pub fn classify_delta<T: Scalar>(
    pair: &VersionPair<'_>,
    scheme_name: &str,
    metric: Metric,
) -> Result<DeltaTable> {
    let (from, to) = rayon::join(
        || module_metrics_table::<T>(pair.from, scheme_name),
        || module_metrics_table::<T>(pair.to, scheme_name),
    );
    Ok(classify_rows(scheme_name, metric, &from?, &to?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SccSeriesRow {
    pub version_label: String,
    pub num_scc: usize,
    pub largest_scc: usize,
}

/// Cycle statistics of one scheme across versions, in input order.
pub fn scc_series(snapshots: &[SystemSnapshot], scheme_name: &str) -> Result<Vec<SccSeriesRow>> {
    if snapshots.is_empty() {
        return Err(Error::InvalidArgument(
            "scc series needs at least one snapshot".into(),
        ));
    }
    snapshots
        .par_iter()
        .map(|s| {
            let scheme = s.scheme(scheme_name)?;
            let report = scc_analysis(&lift_module_graph(&class_dependency_graph(s), scheme)?);
            Ok(SccSeriesRow {
                version_label: s.version_label().to_owned(),
                num_scc: report.num_nontrivial_scc,
                largest_scc: report.largest_scc_size,
            })
        })
        .collect()
}
