//! `modquality` command-line interface.
//!
//! Exit status: 0 on success, 1 on data or validation errors, 2 on usage
//! errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{
    classify_rows, pair_label, scc_series, DeltaTable, SccSeriesRow, VersionPair,
};
use crate::facts::{
    class_dependency_graph, load_snapshot_path, write_snapshot, LoadOptions, SystemSnapshot,
};
use crate::metrics::{descriptive_stats, metrics_for_graph, system_summary, Metric};
use crate::modgraph::lift_module_graph;
use crate::report::{
    delta_table, module_table, render_report, scc_table, stats_table, summary_table, OutputFormat,
    Report,
};
use crate::synth::{generate, run_scenario, GeneratorConfig, Scenario};
use crate::{Exact, ExactMetricsRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "modquality",
    version,
    about = "Modularization-quality metrics over class dependency fact files"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Restrict output to this module scheme (repeatable; default: all schemes
    /// of the first fact file).
    #[arg(long = "scheme", global = true, value_name = "NAME")]
    schemes: Vec<String>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    /// Ignore unknown fields in fact files.
    #[arg(long, global = true)]
    lenient: bool,

    /// Write output to this path instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Section {
    Stats,
    Metrics,
    Deltas,
    Scc,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Size statistics per version.
    Stats {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Per-module metrics and scheme averages.
    Metrics {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Strongly connected components of the module graph per version.
    Scc {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Print the module dependency graph as `<from> -> <to>` lines instead
        /// (one file, one scheme).
        #[arg(long)]
        edges: bool,
    },
    /// Classify metric changes between two versions.
    Compare {
        #[arg(num_args = 2, required = true, value_names = ["FROM", "TO"])]
        files: Vec<PathBuf>,
        /// Metric to classify (repeatable; default: all).
        #[arg(long = "metric", value_parser = parse_metric)]
        metrics: Vec<Metric>,
    },
    /// All sections over a version series.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long = "metric", value_parser = parse_metric)]
        metrics: Vec<Metric>,
        /// Section to include (repeatable; default: all).
        #[arg(long = "section", value_enum)]
        sections: Vec<Section>,
    },
    /// Emit a synthetic fact file, or a before/after pair for a scenario.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    classes: Option<usize>,
    /// Modules of the package scheme.
    #[arg(long)]
    modules: Option<usize>,
    /// Modules of the plugin scheme.
    #[arg(long)]
    plugins: Option<usize>,
    #[arg(long = "edge-prob")]
    edge_prob: Option<f64>,
    #[arg(long = "intra-bias")]
    intra_bias: Option<f64>,
    #[arg(long)]
    label: Option<String>,
    /// Preset evolution; writes `<scenario>-1.0.facts` and
    /// `<scenario>-2.0.facts` into the `--out` directory.
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<Scenario>,
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Data(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli) {
        Ok(output) => match &cli.out {
            Some(path) if !output.is_empty() => match std::fs::write(path, &output) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {}: {e}", path.display());
                    EXIT_DATA
                }
            },
            _ => {
                let _ = stdout.write_all(output.as_bytes());
                EXIT_OK
            }
        },
        Err(Failure::Data(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_DATA
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn load_all(paths: &[PathBuf], options: LoadOptions) -> Result<Vec<SystemSnapshot>> {
    paths
        .par_iter()
        .map(|p| load_with_context(p, options))
        .collect()
}

fn load_with_context(path: &Path, options: LoadOptions) -> Result<SystemSnapshot> {
    load_snapshot_path(path, options).map_err(|e| match e {
        Error::Io { .. } => e,
        other => Error::Validation(format!("{}: {other}", path.display())),
    })
}

fn selected_schemes(cli: &Cli, snapshots: &[SystemSnapshot]) -> Result<Vec<String>> {
    let schemes: Vec<String> = if cli.schemes.is_empty() {
        snapshots[0].scheme_names().map(str::to_owned).collect()
    } else {
        let mut s = cli.schemes.clone();
        s.dedup();
        s
    };
    for snapshot in snapshots {
        for scheme in &schemes {
            snapshot.scheme(scheme).map_err(|_| Error::NotFound {
                kind: "scheme",
                name: format!("{scheme} (in version {})", snapshot.version_label()),
            })?;
        }
    }
    Ok(schemes)
}

fn metrics_or_all(metrics: &[Metric]) -> Vec<Metric> {
    if metrics.is_empty() {
        Metric::ALL.to_vec()
    } else {
        let mut m = metrics.to_vec();
        m.sort();
        m.dedup();
        m
    }
}

/// Exact per-module metrics for every (snapshot, scheme), indexed
/// `[snapshot][scheme]`.
fn all_metrics(
    snapshots: &[SystemSnapshot],
    schemes: &[String],
) -> Result<Vec<Vec<Vec<ExactMetricsRow>>>> {
    snapshots
        .par_iter()
        .map(|s| {
            let g = class_dependency_graph(s);
            schemes
                .par_iter()
                .map(|name| metrics_for_graph::<Exact>(&g, s.scheme(name)?))
                .collect()
        })
        .collect()
}

fn delta_tables(
    snapshots: &[SystemSnapshot],
    schemes: &[String],
    metrics: &[Metric],
    computed: &[Vec<Vec<ExactMetricsRow>>],
) -> Vec<crate::report::Table> {
    schemes
        .iter()
        .enumerate()
        .map(|(k, scheme)| {
            let pairs: Vec<(String, Vec<DeltaTable>)> = (1..snapshots.len())
                .map(|v| {
                    let label = pair_label(
                        snapshots[v - 1].version_label(),
                        snapshots[v].version_label(),
                    );
                    let deltas = metrics
                        .iter()
                        .map(|&m| classify_rows(scheme, m, &computed[v - 1][k], &computed[v][k]))
                        .collect();
                    (label, deltas)
                })
                .collect();
            delta_table(scheme, metrics, &pairs)
        })
        .collect()
}

fn build_report(
    snapshots: &[SystemSnapshot],
    schemes: &[String],
    metrics: &[Metric],
    sections: &[Section],
) -> Result<Report> {
    let mut report = Report::default();
    let needs_metrics = sections
        .iter()
        .any(|s| matches!(s, Section::Metrics | Section::Deltas));
    let computed = if needs_metrics {
        all_metrics(snapshots, schemes)?
    } else {
        Vec::new()
    };
    for section in sections {
        match section {
            Section::Stats => {
                let stats: Vec<_> = snapshots.iter().map(descriptive_stats).collect();
                report.tables.push(stats_table(&stats, schemes));
            }
            Section::Metrics => {
                let mut versions = Vec::new();
                for (v, snapshot) in snapshots.iter().enumerate() {
                    let mut summaries = Vec::new();
                    for (k, scheme) in schemes.iter().enumerate() {
                        let rows = &computed[v][k];
                        report
                            .tables
                            .push(module_table(snapshot.version_label(), scheme, rows));
                        summaries.push(system_summary(rows)?);
                    }
                    versions.push((snapshot.version_label().to_owned(), summaries));
                }
                report.tables.push(summary_table(schemes, &versions));
            }
            Section::Deltas => {
                for w in snapshots.windows(2) {
                    VersionPair::new(&w[0], &w[1])?;
                }
                if snapshots.len() >= 2 {
                    report
                        .tables
                        .extend(delta_tables(snapshots, schemes, metrics, &computed));
                }
            }
            Section::Scc => {
                for scheme in schemes {
                    let rows: Vec<SccSeriesRow> = scc_series(snapshots, scheme)?;
                    report.tables.push(scc_table(scheme, &rows));
                }
            }
        }
    }
    Ok(report)
}

fn execute(cli: &Cli) -> std::result::Result<String, Failure> {
    let options = LoadOptions {
        lenient: cli.lenient,
    };
    let report_of = |files: &[PathBuf], metrics: &[Metric], sections: &[Section]| {
        let snapshots = load_all(files, options)?;
        let schemes = selected_schemes(cli, &snapshots)?;
        let report = build_report(&snapshots, &schemes, &metrics_or_all(metrics), sections)?;
        Ok::<_, Failure>(render_report(&report, cli.format))
    };
    match &cli.command {
        Command::Stats { files } => report_of(files, &[], &[Section::Stats]),
        Command::Metrics { files } => report_of(files, &[], &[Section::Metrics]),
        Command::Compare { files, metrics } => report_of(files, metrics, &[Section::Deltas]),
        Command::Report {
            files,
            metrics,
            sections,
        } => {
            let mut sections = sections.clone();
            if sections.is_empty() {
                sections = vec![
                    Section::Stats,
                    Section::Metrics,
                    Section::Deltas,
                    Section::Scc,
                ];
            }
            sections.sort();
            sections.dedup();
            report_of(files, metrics, &sections)
        }
        Command::Scc { files, edges } => {
            if !*edges {
                return report_of(files, &[], &[Section::Scc]);
            }
            if files.len() != 1 {
                return Err(Failure::Usage("--edges takes exactly one fact file".into()));
            }
            let snapshots = load_all(files, options)?;
            let schemes = selected_schemes(cli, &snapshots)?;
            let [scheme] = schemes.as_slice() else {
                return Err(Failure::Usage(
                    "--edges needs exactly one scheme; select it with --scheme".into(),
                ));
            };
            let s = &snapshots[0];
            let mg = lift_module_graph(&class_dependency_graph(s), s.scheme(scheme)?)?;
            Ok(mg.to_edge_list())
        }
        Command::Generate(args) => generate_command(cli, args),
    }
}

fn generate_command(cli: &Cli, args: &GenerateArgs) -> std::result::Result<String, Failure> {
    let base = args
        .scenario
        .map_or_else(GeneratorConfig::default, Scenario::default_config);
    let config = GeneratorConfig {
        seed: args.seed.unwrap_or(base.seed),
        num_classes: args.classes.unwrap_or(base.num_classes),
        num_modules: args.modules.unwrap_or(base.num_modules),
        num_plugins: args.plugins.or(base.num_plugins),
        edge_probability: args.edge_prob.unwrap_or(base.edge_probability),
        intra_bias: args.intra_bias.unwrap_or(base.intra_bias),
        version_label: args.label.clone().unwrap_or(base.version_label),
    };
    let Some(scenario) = args.scenario else {
        return Ok(write_snapshot(&generate(&config)?));
    };
    let Some(dir) = &cli.out else {
        return Err(Failure::Usage("--scenario needs --out <directory>".into()));
    };
    let run = run_scenario(scenario, &config)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    for snapshot in [&run.before, &run.after] {
        let path = dir.join(format!(
            "{}-{}.facts",
            scenario.name(),
            snapshot.version_label()
        ));
        std::fs::write(&path, write_snapshot(snapshot))
            .map_err(|e| Error::Io { path, source: e })?;
    }
    // Files are written; nothing goes to --out itself.
    Ok(String::new())
}
