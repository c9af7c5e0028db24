//! Wall-clock timing of the lens and summary stages.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use mog_core::cover::uniform_cover;
use mog_core::generators::{generate, GeneratorKind, GeneratorSpec};
use mog_core::lens::{compute_lens, LensKind};
use mog_core::mapper::{summarize, FilterSpec, LensDomain};
use serde::Serialize;

use crate::{read_graph, write_output, LensOptions, RunContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchFormat {
    Tsv,
    Json,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Input graph (edge list or graph-json)
    #[arg(
        long,
        conflicts_with = "generator",
        required_unless_present = "generator"
    )]
    pub graph: Option<PathBuf>,
    /// Generate the input instead of reading it
    #[arg(long)]
    pub generator: Option<String>,
    /// Generator parameters as `key=value`
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    #[command(flatten)]
    pub lens: LensOptions,
    /// Number of uniform intervals
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Overlap of the uniform cover
    #[arg(long, default_value_t = 0.15)]
    pub eps: f64,
    /// Timed repetitions; the report gives the median
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    /// Name of the row [default: input file stem or generator kind]
    #[arg(long)]
    pub name: Option<String>,
    /// Report format
    #[arg(long, value_enum, default_value_t = BenchFormat::Tsv)]
    pub format: BenchFormat,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    pub lens: String,
    pub lens_domain_size: usize,
    pub intervals: usize,
    pub epsilon: f64,
    pub summary_nodes: usize,
    pub summary_edges: usize,
    pub repeats: usize,
    pub statistic: &'static str,
    pub lens_seconds: f64,
    pub mog_seconds: f64,
    pub lens_samples: Vec<f64>,
    pub mog_samples: Vec<f64>,
}

pub fn median(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        (s[m - 1] + s[m]) / 2.0
    }
}

pub fn cmd_bench(ctx: &RunContext, a: BenchArgs) -> Result<()> {
    if a.repeats == 0 {
        bail!("--repeats must be at least 1");
    }
    let (g, default_name) = match (&a.graph, &a.generator) {
        (Some(path), _) => {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            (read_graph(path)?, stem)
        }
        (None, Some(kind)) => {
            let kind: GeneratorKind = kind.parse()?;
            let mut spec = GeneratorSpec::new(kind).seed(ctx.seed.unwrap_or(0));
            for p in &a.params {
                spec = spec.with_param_string(p)?;
            }
            (generate(&spec)?, kind.to_string())
        }
        (None, None) => bail!("either --graph or --generator is required"),
    };
    let spec = a.lens.spec(ctx.seed, LensKind::PagerankLog)?;
    let cover = uniform_cover(a.n, a.eps)?;
    let domain = LensDomain::for_lens(&g, spec.kind);
    let work = domain.graph(&g);

    let mut lens_samples = Vec::with_capacity(a.repeats);
    let mut mog_samples = Vec::with_capacity(a.repeats);
    let mut shape = (0, 0);
    for _ in 0..a.repeats {
        let t = Instant::now();
        let field = compute_lens(work, &spec).with_context(|| format!("lens {}", spec.kind))?;
        lens_samples.push(t.elapsed().as_secs_f64());
        let t = Instant::now();
        let summary = summarize(&g, &domain, &field, &cover, FilterSpec::default())?;
        mog_samples.push(t.elapsed().as_secs_f64());
        shape = (summary.nodes.len(), summary.edges.len());
    }

    let report = BenchReport {
        name: a.name.unwrap_or(default_name),
        nodes: g.node_count(),
        edges: g.edge_count(),
        lens: spec.kind.to_string(),
        lens_domain_size: work.node_count(),
        intervals: a.n,
        epsilon: a.eps,
        summary_nodes: shape.0,
        summary_edges: shape.1,
        repeats: a.repeats,
        statistic: "median",
        lens_seconds: median(&lens_samples),
        mog_seconds: median(&mog_samples),
        lens_samples,
        mog_samples,
    };
    let text = match a.format {
        BenchFormat::Json => serde_json::to_string_pretty(&report)? + "\n",
        BenchFormat::Tsv => tsv(&report),
    };
    write_output(a.out.as_deref(), text.as_bytes())
}

pub const TSV_HEADER: &str =
    "name\tnodes\tedges\tlens\tlens_domain_size\tintervals\tepsilon\tsummary_nodes\tsummary_edges\trepeats\tlens_seconds\tmog_seconds";

fn tsv(r: &BenchReport) -> String {
    format!(
        "{TSV_HEADER}\n{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\n",
        r.name,
        r.nodes,
        r.edges,
        r.lens,
        r.lens_domain_size,
        r.intervals,
        r.epsilon,
        r.summary_nodes,
        r.summary_edges,
        r.repeats,
        r.lens_seconds,
        r.mog_seconds
    )
}
