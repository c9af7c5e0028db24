//! The `mog` command-line driver.

pub mod bench;
pub mod datasets;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mog_core::cover::{uniform_cover, Cover};
use mog_core::generators::{generate, GeneratorKind, GeneratorSpec};
use mog_core::graph::{parse_graph, GraphFormat, GraphJson, WeightedGraph};
use mog_core::layout::{layout_fr, LayoutParams};
use mog_core::lens::{
    compute_lens, histogram, LensField, LensHistogram, LensKind, LensSpec, DEFAULT_BIN_COUNT,
};
use mog_core::mapper::{summarize, FilterSpec, LensDomain, MogSummaryJson};
use mog_core::render::{render_graph_svg, render_summary_svg};
use mog_service::ServiceConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "mog",
    version,
    about = "Topological summaries of graphs through lenses and covers"
)]
pub struct Cli {
    /// Seed for generators, eigensolver start vectors and layouts [default: per-command defaults]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel lens computation [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML file with `[layout]` and `[service]` tables
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic graph
    Generate(GenerateArgs),
    /// Compute a lens on every node, with a histogram
    Lens(LensArgs),
    /// Build or edit a cover of [0, 1]
    Cover(CoverArgs),
    /// Compute the summary graph
    Mog(MogArgs),
    /// Force-directed layout of a graph or summary
    Layout(LayoutArgs),
    /// Draw a graph or summary as SVG
    Render(RenderArgs),
    /// Time the lens and the summary separately
    Bench(bench::BenchArgs),
    /// Run the HTTP service
    Serve(ServeArgs),
    /// Download and convert the public benchmark graphs
    FetchDatasets(FetchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// path, cycle, grid, balanced_tree, connected_caveman, torus_mesh, lollipop, random_geometric, complete_bipartite
    #[arg(long)]
    pub kind: String,
    /// Parameters as `key=value`, comma separated or repeated (e.g. `rows=4,cols=5`) [default: generator defaults]
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Output format: edge-list or graph-json [default: graph-json for `.json` outputs, else edge-list]
    #[arg(long)]
    pub format: Option<String>,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct LensOptions {
    /// Lens: agd, density, l2, l3 or pagerank [default: agd, pagerank for `bench`]
    #[arg(long)]
    pub lens: Option<String>,
    /// Density kernel width
    #[arg(long, default_value_t = 2.0)]
    pub delta: f64,
    /// PageRank damping factor
    #[arg(long, default_value_t = 0.85)]
    pub damping: f64,
    /// PageRank L1 convergence threshold
    #[arg(long, default_value_t = 1e-10)]
    pub pagerank_tol: f64,
    /// PageRank iteration limit
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Eigenvector residual bound
    #[arg(long, default_value_t = 1e-8)]
    pub eigen_tol: f64,
}

impl LensOptions {
    pub fn spec(&self, seed: Option<u64>, default: LensKind) -> Result<LensSpec> {
        let kind = match &self.lens {
            Some(name) => name.parse::<LensKind>().map_err(|e| anyhow!("{e}"))?,
            None => default,
        };
        let mut spec = LensSpec::new(kind);
        spec.params.delta = self.delta;
        spec.params.damping = self.damping;
        spec.params.pagerank_tol = self.pagerank_tol;
        spec.params.max_iter = self.max_iter;
        spec.params.eigen_tol = self.eigen_tol;
        if let Some(s) = seed {
            spec.params.eigen_seed = s;
        }
        Ok(spec.canonical())
    }
}

#[derive(Debug, Args)]
pub struct LensArgs {
    /// Input graph (edge list or graph-json)
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub lens: LensOptions,
    /// Histogram bins
    #[arg(long, default_value_t = DEFAULT_BIN_COUNT)]
    pub bins: usize,
    /// Evaluate on the largest connected component if the graph is disconnected
    #[arg(long)]
    pub largest_component: bool,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    /// Number of intervals
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Overlap added to both ends of every interval
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Start from this cover JSON instead of a uniform cover
    #[arg(long)]
    pub from: Option<PathBuf>,
    /// Replace interval `ID` with `(LO, HI)`; repeatable
    #[arg(long = "modify", value_name = "ID:LO:HI")]
    pub modify: Vec<String>,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct CoverOptions {
    /// Number of uniform intervals
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Overlap of the uniform cover
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Cover JSON file; overrides --n and --eps
    #[arg(long)]
    pub cover: Option<PathBuf>,
}

impl CoverOptions {
    pub fn cover(&self) -> Result<Cover> {
        match &self.cover {
            Some(path) => Cover::from_json_str(&read_text(path)?)
                .with_context(|| format!("invalid cover in {}", path.display())),
            None => Ok(uniform_cover(self.n, self.eps)?),
        }
    }
}

#[derive(Debug, Args)]
pub struct MogArgs {
    /// Input graph (edge list or graph-json)
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub lens: LensOptions,
    #[command(flatten)]
    pub cover: CoverOptions,
    /// Drop summary nodes with fewer members
    #[arg(long, default_value_t = 0)]
    pub min_size: usize,
    /// Keep only the largest connected component of the summary
    #[arg(long)]
    pub largest_only: bool,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct LayoutOptions {
    /// Layout iterations [default: 300, or `[layout] iterations` from the config]
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Barnes–Hut opening criterion in (0, 1] [default: 0.5]
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    /// Input graph (edge list or graph-json)
    #[arg(long, conflicts_with = "summary", required_unless_present = "summary")]
    pub graph: Option<PathBuf>,
    /// Summary JSON written by `mog mog`
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub layout: LayoutOptions,
    /// Output graph-json with positions [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Summary JSON written by `mog mog`
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    pub summary: Option<PathBuf>,
    /// Input graph (edge list or graph-json); positions in graph-json are reused
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Colour graph nodes by this lens (graph drawings only) [default: uncoloured]
    #[arg(long)]
    pub lens: Option<String>,
    #[command(flatten)]
    pub layout: LayoutOptions,
    /// Output SVG file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Bind address [default: 127.0.0.1, or config/MOG_HOST]
    #[arg(long)]
    pub host: Option<String>,
    /// Port [default: 8080, or config/MOG_PORT]
    #[arg(long)]
    pub port: Option<u16>,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// Destination directory
    #[arg(long, default_value = "datasets")]
    pub dest: PathBuf,
    /// Only these datasets (repeatable) [default: all]
    #[arg(long)]
    pub only: Vec<String>,
    /// Pinned digests in `sha256sum` format [default: verify against digests recorded in DEST]
    #[arg(long)]
    pub checksums: Option<PathBuf>,
    /// List the catalogue and exit
    #[arg(long)]
    pub list: bool,
}

/// Settings read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub struct CliConfig {
    pub layout: Option<LayoutParams>,
}

/// Global options shared by every subcommand.
pub struct RunContext {
    pub seed: Option<u64>,
    pub layout: LayoutParams,
    pub config_path: Option<PathBuf>,
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn read_graph(path: &Path) -> Result<WeightedGraph> {
    let bytes = read_bytes(path)?;
    let format = if path.extension().is_some_and(|e| e == "json") {
        GraphFormat::GraphJson
    } else {
        GraphFormat::detect(&bytes)
    };
    parse_graph(&bytes, format).with_context(|| format!("invalid graph in {}", path.display()))
}

/// Writes to `out`, or stdout when absent or `-`.
pub fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) if p != Path::new("-") => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)
                    .with_context(|| format!("cannot create {}", dir.display()))?;
            }
            fs::write(p, bytes).with_context(|| format!("cannot write {}", p.display()))
        }
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_output(out, &bytes)
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("cannot configure thread pool")?;
    }
    let file_config: CliConfig = match &cli.config {
        Some(p) => toml::from_str(&read_text(p)?)
            .with_context(|| format!("invalid config {}", p.display()))?,
        None => CliConfig::default(),
    };
    let ctx = RunContext {
        seed: cli.seed,
        layout: file_config.layout.unwrap_or_default(),
        config_path: cli.config.clone(),
    };
    match cli.command {
        Command::Generate(a) => cmd_generate(&ctx, a),
        Command::Lens(a) => cmd_lens(&ctx, a),
        Command::Cover(a) => cmd_cover(a),
        Command::Mog(a) => cmd_mog(&ctx, a),
        Command::Layout(a) => cmd_layout(&ctx, a),
        Command::Render(a) => cmd_render(&ctx, a),
        Command::Bench(a) => bench::cmd_bench(&ctx, a),
        Command::Serve(a) => cmd_serve(&ctx, a),
        Command::FetchDatasets(a) => cmd_fetch(a),
    }
}

fn cmd_generate(ctx: &RunContext, a: GenerateArgs) -> Result<()> {
    let kind: GeneratorKind = a.kind.parse()?;
    let mut spec = GeneratorSpec::new(kind).seed(ctx.seed.unwrap_or(0));
    for p in &a.params {
        spec = spec.with_param_string(p)?;
    }
    let g = generate(&spec)?;
    let json = match a.format.as_deref() {
        Some(f) => f.parse::<GraphFormat>().map_err(|e| anyhow!("{e}"))? == GraphFormat::GraphJson,
        None => a
            .out
            .as_deref()
            .is_some_and(|p| p.extension().is_some_and(|e| e == "json")),
    };
    if json {
        write_json(a.out.as_deref(), &g.to_graph_json(None))
    } else {
        write_output(a.out.as_deref(), g.to_edge_list().as_bytes())
    }
}

#[derive(Serialize)]
struct LensOutput<'a> {
    nodes: Vec<&'a str>,
    restricted_to_largest_component: bool,
    #[serde(flatten)]
    field: &'a LensField,
    histogram: LensHistogram,
}

fn cmd_lens(ctx: &RunContext, a: LensArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let spec = a.lens.spec(ctx.seed, LensKind::Agd)?;
    let domain = if a.largest_component {
        LensDomain::for_lens(&g, spec.kind)
    } else {
        LensDomain::Full
    };
    let work = domain.graph(&g);
    let field = compute_lens(work, &spec)
        .with_context(|| format!("lens {} on {}", spec.kind, a.graph.display()))?;
    let out = LensOutput {
        nodes: work.labels().iter().map(String::as_str).collect(),
        restricted_to_largest_component: domain.is_restricted(),
        histogram: histogram(&field, a.bins),
        field: &field,
    };
    write_json(a.out.as_deref(), &out)
}

fn parse_modify(s: &str) -> Result<(usize, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("--modify expects ID:LO:HI, got `{s}`");
    }
    let id = parts[0]
        .parse()
        .with_context(|| format!("bad interval id in `{s}`"))?;
    let lo = parts[1]
        .parse()
        .with_context(|| format!("bad lower bound in `{s}`"))?;
    let hi = parts[2]
        .parse()
        .with_context(|| format!("bad upper bound in `{s}`"))?;
    Ok((id, lo, hi))
}

fn cmd_cover(a: CoverArgs) -> Result<()> {
    let mut cover = CoverOptions {
        n: a.n,
        eps: a.eps,
        cover: a.from.clone(),
    }
    .cover()?;
    for m in &a.modify {
        let (id, lo, hi) = parse_modify(m)?;
        cover = cover.modify_interval(id, lo, hi)?.cover;
    }
    for (lo, hi) in cover.gaps() {
        eprintln!("warning: values in ({lo}, {hi}) are not covered");
    }
    write_json(a.out.as_deref(), &cover.to_json())
}

pub fn summary_json(
    g: &WeightedGraph,
    spec: &LensSpec,
    cover: &Cover,
    filter: FilterSpec,
) -> Result<MogSummaryJson> {
    let domain = LensDomain::for_lens(g, spec.kind);
    let field = compute_lens(domain.graph(g), spec).map_err(|e| anyhow!("lens stage: {e}"))?;
    let mut summary = summarize(g, &domain, &field, cover, filter)?;
    summary.meta.graph_id = Some(g.content_id());
    Ok(summary.to_json(g))
}

fn cmd_mog(ctx: &RunContext, a: MogArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let spec = a.lens.spec(ctx.seed, LensKind::Agd)?;
    let cover = a.cover.cover()?;
    let filter = FilterSpec {
        min_size: a.min_size,
        largest_only: a.largest_only,
    };
    let summary = summary_json(&g, &spec, &cover, filter)
        .with_context(|| format!("summary of {}", a.graph.display()))?;
    if !summary.meta.uncovered.is_empty() {
        eprintln!(
            "warning: {} nodes fall in cover gaps",
            summary.meta.uncovered.len()
        );
    }
    write_json(a.out.as_deref(), &summary)
}

fn layout_params(ctx: &RunContext, o: &LayoutOptions) -> Result<LayoutParams> {
    let mut p = ctx.layout;
    if let Some(it) = o.iterations {
        p.iterations = it;
    }
    if let Some(theta) = o.theta {
        if !(theta > 0.0 && theta <= 1.0) {
            bail!("--theta must lie in (0, 1], got {theta}");
        }
        p.theta = theta;
    }
    Ok(p)
}

pub fn read_summary(path: &Path) -> Result<MogSummaryJson> {
    serde_json::from_str(&read_text(path)?)
        .with_context(|| format!("invalid summary in {}", path.display()))
}

fn cmd_layout(ctx: &RunContext, a: LayoutArgs) -> Result<()> {
    let params = layout_params(ctx, &a.layout)?;
    let g = match (&a.graph, &a.summary) {
        (Some(p), _) => read_graph(p)?,
        (None, Some(p)) => read_summary(p)?.to_graph(),
        (None, None) => bail!("either --graph or --summary is required"),
    };
    let pos = layout_fr(&g, ctx.seed.unwrap_or(0), &params).positions;
    write_json(a.out.as_deref(), &g.to_graph_json(Some(&pos)))
}

/// Positions stored in a graph-json file, if every node has them.
fn stored_positions(path: &Path) -> Option<Vec<[f64; 2]>> {
    let doc: GraphJson = serde_json::from_slice(&fs::read(path).ok()?).ok()?;
    doc.nodes.iter().map(|n| Some([n.x?, n.y?])).collect()
}

fn cmd_render(ctx: &RunContext, a: RenderArgs) -> Result<()> {
    let params = layout_params(ctx, &a.layout)?;
    let seed = ctx.seed.unwrap_or(0);
    let svg = match (&a.summary, &a.graph) {
        (Some(path), _) => {
            let summary = read_summary(path)?;
            let pos = layout_fr(&summary.to_graph(), seed, &params).positions;
            render_summary_svg(&summary, &pos)
        }
        (None, Some(path)) => {
            let g = read_graph(path)?;
            let pos = stored_positions(path)
                .filter(|p| p.len() == g.node_count())
                .unwrap_or_else(|| layout_fr(&g, seed, &params).positions);
            match &a.lens {
                Some(name) => {
                    let opts = LensOptions {
                        lens: Some(name.clone()),
                        ..default_lens_options()
                    };
                    let spec = opts.spec(ctx.seed, LensKind::Agd)?;
                    let field = compute_lens(&g, &spec)
                        .with_context(|| format!("lens {name} on {}", path.display()))?;
                    render_graph_svg(&g, &pos, Some((spec.kind, &field.normalized)))
                }
                None => render_graph_svg(&g, &pos, None),
            }
        }
        (None, None) => bail!("either --summary or --graph is required"),
    };
    write_output(Some(&a.out), svg.as_bytes())
}

fn default_lens_options() -> LensOptions {
    let d = mog_core::lens::LensParams::default();
    LensOptions {
        lens: None,
        delta: d.delta,
        damping: d.damping,
        pagerank_tol: d.pagerank_tol,
        max_iter: d.max_iter,
        eigen_tol: d.eigen_tol,
    }
}

fn cmd_serve(ctx: &RunContext, a: ServeArgs) -> Result<()> {
    let mut config = ServiceConfig::load(ctx.config_path.as_deref())?;
    if let Some(h) = a.host {
        config.host = h;
    }
    if let Some(p) = a.port {
        config.port = p;
    }
    let runtime = tokio::runtime::Runtime::new().context("cannot start async runtime")?;
    runtime
        .block_on(mog_service::serve(config))
        .context("service failed")
}

fn cmd_fetch(a: FetchArgs) -> Result<()> {
    if a.list {
        for d in &datasets::DATASETS {
            println!("{}\t{}\t{}\t{}", d.name, d.nodes, d.edges, d.url);
        }
        return Ok(());
    }
    let selected: Vec<&datasets::Dataset> = if a.only.is_empty() {
        datasets::DATASETS.iter().collect()
    } else {
        a.only
            .iter()
            .map(|n| datasets::find(n).ok_or_else(|| anyhow!("unknown dataset `{n}` (see --list)")))
            .collect::<Result<_>>()?
    };
    let pinned = datasets::load_pinned(a.checksums.as_deref())?;
    let mut failures = 0;
    for ds in selected {
        match datasets::fetch(ds, &a.dest, &pinned) {
            Ok(r) => {
                println!(
                    "{}\t{}\t{} nodes\t{} edges\tsha256 {}",
                    r.name,
                    r.path.display(),
                    r.nodes,
                    r.edges,
                    r.sha256
                );
                if (r.nodes, r.edges) != (ds.nodes, ds.edges) {
                    eprintln!(
                        "note: {} has {} nodes / {} edges after conversion (published: {} / {})",
                        r.name, r.nodes, r.edges, ds.nodes, ds.edges
                    );
                }
            }
            Err(e) => {
                failures += 1;
                eprintln!("error: {}: {e:#}", ds.name);
            }
        }
    }
    if failures > 0 {
        bail!("{failures} dataset(s) could not be fetched");
    }
    Ok(())
}
