use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use palletpack::benchmark::{aggregate, buckets, run_benchmark, write_aggregate_csv, write_buckets_csv};
use palletpack::io::{filter_orders, load_orders, write_reports_csv, LayoutDocument, Order};
use palletpack::kpi::{KpiReport, KpiWeights};
use palletpack::par::Execution;
use palletpack::pipeline::{evaluate_layout, layout_document};
use palletpack::synth::{synthetic_suite, SynthConfig};
use palletpack::{pack_order, Pallet, RunConfig, Stage};

#[derive(Parser)]
#[command(name = "palletpack", version, about = "Single-pallet 3D packing with KPI-driven genetic refinement")]
struct Cli {
    /// Worker threads for order and fitness fan-out (default: all cores).
    #[arg(long, global = true, env = "PALLETPACK_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pack one order and write its layout document.
    Pack(PackArgs),
    /// Score an existing layout document.
    Evaluate(EvaluateArgs),
    /// Pack an order set and write per-order, aggregate and bucket tables.
    Benchmark(BenchmarkArgs),
    /// Keep the orders that pass the evaluation-set selection rule.
    Filter(FilterArgs),
    /// Write a seeded synthetic order set as JSON lines.
    Generate(GenerateArgs),
}

#[derive(Args, Clone)]
struct PalletArgs {
    /// Pallet size in mm as LxWxH.
    #[arg(long, default_value = "1200x800x2000", value_parser = parse_dims)]
    pallet: (u32, u32, u32),
    /// Maximum payload in grams.
    #[arg(long, default_value_t = 1_500_000)]
    max_payload: u64,
}

impl PalletArgs {
    fn pallet(&self) -> Result<Pallet> {
        let (l, w, h) = self.pallet;
        Ok(Pallet::new(l, w, h, self.max_payload)?)
    }
}

#[derive(Args, Clone)]
struct KpiArgs {
    /// Seven comma-separated fitness weights summing to 1.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<KpiWeights>,
    #[arg(long, default_value_t = 0.2)]
    tau_side: f64,
    #[arg(long, default_value_t = 0.75)]
    tau_surface: f64,
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[command(flatten)]
    pallet: PalletArgs,
    #[command(flatten)]
    kpi: KpiArgs,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Population size.
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long, default_value_t = 50)]
    generations: usize,
    /// Pipeline stage: maxrects-only, hybrid-ga or hybrid-ga-pp.
    #[arg(long, default_value = "hybrid-ga-pp")]
    stage: Stage,
    /// Move quantum of the genetic layer operators, mm.
    #[arg(long, default_value_t = 25)]
    grid_step: u32,
    /// Write 0 for runtime so repeated runs give identical files.
    #[arg(long)]
    omit_runtime: bool,
}

impl SolveArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig {
            pallet: self.pallet.pallet()?,
            stage: self.stage,
            ..RunConfig::default()
        };
        cfg.ga.seed = self.seed;
        cfg.ga.population_size = self.pop;
        cfg.ga.generations = self.generations;
        cfg.ga.grid_step_mm = self.grid_step;
        if let Some(w) = self.kpi.weights {
            cfg.kpi.weights = w;
        }
        cfg.kpi.tau_side = self.kpi.tau_side;
        cfg.kpi.tau_surface = self.kpi.tau_surface;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct PackArgs {
    /// Order file (an order set file must hold exactly one order unless --order-id is given).
    order: PathBuf,
    #[arg(long)]
    order_id: Option<String>,
    #[command(flatten)]
    solve: SolveArgs,
    /// Layout document path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-order KPI report CSV.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-generation best fitness CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    layout: PathBuf,
    /// Order the layout was built from; supplies item dimensions when the
    /// layout omits them.
    #[arg(long)]
    order: Option<PathBuf>,
    /// Order size used for the efficiency correction (default: placed plus
    /// unplaced in the layout, or the order's item count).
    #[arg(long)]
    total_items: Option<usize>,
    #[command(flatten)]
    kpi: KpiArgs,
    /// Report CSV path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Order set: JSON array, JSON lines, single order, or a directory.
    orders: PathBuf,
    #[command(flatten)]
    solve: SolveArgs,
    /// Output directory for reports.csv, aggregate.csv and buckets.csv.
    #[arg(long)]
    out: PathBuf,
    /// Apply the selection rule before packing.
    #[arg(long)]
    filter: bool,
    #[arg(long, default_value_t = 5)]
    bucket_width: usize,
    /// Also write one layout document per order into <out>/layouts.
    #[arg(long)]
    layouts: bool,
}

#[derive(Args)]
struct FilterArgs {
    orders: PathBuf,
    #[command(flatten)]
    pallet: PalletArgs,
    /// JSON-lines output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    min_items: usize,
    #[arg(long, default_value_t = 60)]
    max_items: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_dims(s: &str) -> Result<(u32, u32, u32), String> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    let [l, w, h] = parts.as_slice() else {
        return Err(format!("expected LxWxH, got `{s}`"));
    };
    let p = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("bad dimension `{v}`: {e}"));
    Ok((p(l)?, p(w)?, p(h)?))
}

fn parse_weights(s: &str) -> Result<KpiWeights, String> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad weight `{v}`: {e}")))
        .collect::<Result<_, _>>()?;
    let arr: [f64; 7] = vals
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 7 weights, got {}", v.len()))?;
    KpiWeights::new(arr).map_err(|e| e.to_string())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn scrub(reports: &mut [KpiReport], omit: bool) {
    if omit {
        for r in reports {
            r.runtime_s = 0.0;
        }
    }
}

fn pick_order(path: &Path, id: Option<&str>) -> Result<Order> {
    let mut orders = load_orders(path).with_context(|| format!("reading {}", path.display()))?;
    match id {
        Some(id) => orders
            .into_iter()
            .find(|o| o.order_id == id)
            .with_context(|| format!("no order `{id}` in {}", path.display())),
        None if orders.len() == 1 => Ok(orders.remove(0)),
        None => bail!("{} holds {} orders; pass --order-id or use `benchmark`", path.display(), orders.len()),
    }
}

fn pack(args: &PackArgs) -> Result<()> {
    let cfg = args.solve.config()?;
    let order = pick_order(&args.order, args.order_id.as_deref())?;
    let mut out = pack_order(&order, &cfg)?;
    scrub(std::slice::from_mut(&mut out.report), args.solve.omit_runtime);
    let doc = layout_document(&out, &cfg);
    output(args.out.as_deref())?.write_all(doc.to_json().as_bytes())?;
    if let Some(p) = &args.report {
        write_reports_csv(std::slice::from_ref(&out.report), output(Some(p))?)?;
    }
    if let Some(p) = &args.trace {
        let mut w = output(Some(p))?;
        writeln!(w, "generation,best_fitness")?;
        for (g, f) in out.trace.iter().enumerate() {
            writeln!(w, "{g},{f}")?;
        }
    }
    if let Some(d) = out.post {
        eprintln!(
            "{}: placed {}/{}; post-processing moved {} items, recovered {}, removed {}",
            out.order_id, out.report.n_placed, out.report.n_items, d.items_moved, d.recovered, d.removed
        );
    }
    Ok(())
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let bytes = fs::read(&args.layout).with_context(|| format!("reading {}", args.layout.display()))?;
    let doc = LayoutDocument::from_json(&bytes)?;
    let order = args.order.as_deref().map(|p| pick_order(p, Some(&doc.order_id))).transpose()?;
    let items = order.as_ref().map(Order::items);
    let total = args.total_items.or(order.as_ref().map(Order::item_count));
    let mut kpi = RunConfig::default().kpi;
    if let Some(w) = args.kpi.weights {
        kpi.weights = w;
    }
    kpi.tau_side = args.kpi.tau_side;
    kpi.tau_surface = args.kpi.tau_surface;
    kpi.validate()?;
    let report = evaluate_layout(&doc, items.as_deref(), total, &kpi)?;
    if report.has_overlap() {
        eprintln!("{}: layout overlaps ({} mm^3)", report.order_id, report.overlap_volume_mm3);
    }
    write_reports_csv(&[report], output(args.out.as_deref())?)?;
    Ok(())
}

fn benchmark(args: &BenchmarkArgs) -> Result<()> {
    let cfg = args.solve.config()?;
    let mut orders = load_orders(&args.orders).with_context(|| format!("reading {}", args.orders.display()))?;
    if args.filter {
        orders = filter_orders(&orders, &cfg.pallet);
    }
    if orders.is_empty() {
        bail!("no orders to benchmark");
    }
    if args.bucket_width == 0 {
        bail!("--bucket-width must be positive");
    }
    fs::create_dir_all(&args.out)?;
    let mut reports = if args.layouts {
        let dir = args.out.join("layouts");
        fs::create_dir_all(&dir)?;
        let outs: Vec<_> = palletpack::par::map(Execution::Parallel, &orders, |o| pack_order(o, &cfg))
            .into_iter()
            .collect::<palletpack::Result<_>>()?;
        let mut reports = Vec::with_capacity(outs.len());
        for mut out in outs {
            scrub(std::slice::from_mut(&mut out.report), args.solve.omit_runtime);
            fs::write(dir.join(format!("{}.json", out.order_id)), layout_document(&out, &cfg).to_json())?;
            reports.push(out.report);
        }
        reports
    } else {
        run_benchmark(&orders, &cfg, Execution::Parallel)?
    };
    scrub(&mut reports, args.solve.omit_runtime);
    write_reports_csv(&reports, output(Some(&args.out.join("reports.csv")))?)?;
    write_aggregate_csv(&aggregate(&reports), output(Some(&args.out.join("aggregate.csv")))?)?;
    write_buckets_csv(&buckets(&reports, args.bucket_width), output(Some(&args.out.join("buckets.csv")))?)?;
    eprintln!("{} orders packed into {}", reports.len(), args.out.display());
    Ok(())
}

fn write_jsonl(orders: &[Order], out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    for o in orders {
        serde_json::to_writer(&mut w, o)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn filter(args: &FilterArgs) -> Result<()> {
    let orders = load_orders(&args.orders).with_context(|| format!("reading {}", args.orders.display()))?;
    let kept = filter_orders(&orders, &args.pallet.pallet()?);
    eprintln!("{} of {} orders kept", kept.len(), orders.len());
    write_jsonl(&kept, args.out.as_deref())
}

fn generate(args: &GenerateArgs) -> Result<()> {
    if args.min_items == 0 || args.min_items > args.max_items {
        bail!("need 0 < --min-items <= --max-items");
    }
    let cfg = SynthConfig {
        min_items: args.min_items,
        max_items: args.max_items,
        ..SynthConfig::default()
    };
    write_jsonl(&synthetic_suite(args.count, args.seed, &cfg), args.out.as_deref())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("thread count must be positive");
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Pack(a) => pack(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Filter(a) => filter(a),
        Command::Generate(a) => generate(a),
    }
}
