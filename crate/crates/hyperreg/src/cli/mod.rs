//! Command line front end: subcommands, JSON reports and run manifests.
//!
//! Every command prints one JSON envelope on standard output when `--json`
//! is given and a short text summary otherwise. Exit codes: 0 success,
//! 1 failed verification, 2 usage or parse error, 3 cap exceeded.

pub mod suite;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::construct::families::DEFAULT_VERTEX_CAP;
use crate::construct::{build_canonical, Built, Family, FamilySpec};
use crate::core::io::{emit_3g, emit_bip, parse_3g, parse_bip};
use crate::core::{BipartiteGraph, ThreeGraph, TripartiteGraph, VertexPartition};
use crate::decomp::{
    build_decomposition, classify_triads, common_refinement, error_shape, extract_fop2_witness, find_encoding,
    reduced_encoding, triad_census, ClassifyOptions, Decomposition, ErrorBudgets, Strategy, TriadClass,
};
use crate::detect::{dimension_report, find_pattern, DimensionCaps, Host, Pattern};
use crate::error::Error;
use crate::num::{self, parse_q, q, Q};
use crate::quasi::disc2::DEFAULT_DISC2_CAP;
use crate::quasi::vdisc3::DEFAULT_VDISC3_CAP;
use crate::quasi::{
    dev23_sum, disc23_witness_search, disc2_deviation, oct23_count, vdisc3_graph, Disc23Options, Disc2Options, Triad,
    Vdisc3Options,
};
use crate::special::{
    gs_metric, hbark_irregular_witness, hp_metric, mixed_density_scan, pair_split_witness, split_witness, verify_axiom,
    SpecialFamily, SpecialInstance, SpecialParams,
};
use crate::stable::{
    fiberwise_good_partition, goodsets1_partition_with, goodstrong_partition, tree_removal_partition, FiberCaps, Mode,
    RemovalCaps, Rounding, Schedule,
};
use suite::Tier;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// The JSON schema every `--json` report validates against.
pub const REPORT_SCHEMA: &str = include_str!("../../schemas/report.schema.json");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Lib(e) => match e {
                Error::CapExceeded { .. } | Error::VertexCap { .. } => EXIT_CAP,
                Error::Parse { .. }
                | Error::InvalidParameter(_)
                | Error::OutOfRange { .. }
                | Error::DegenerateTriple(..)
                | Error::DuplicatePair(..)
                | Error::PartitionViolation { .. }
                | Error::OverlappingParts(_)
                | Error::NotEquipartition(_)
                | Error::Arity { .. } => EXIT_USAGE,
                _ => EXIT_VERIFY,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser, Debug)]
#[command(name = "hyperreg", version, about = "3-uniform hypergraph regularity toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Input file ("3G v1" or "bip").
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    /// Output file for graphs and decompositions.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest smaller side searched exhaustively by disc2.
    #[arg(long, global = true, default_value_t = DEFAULT_DISC2_CAP)]
    pub cap_exact_disc2: usize,
    /// Largest sum of the two smaller parts searched exhaustively by vdisc3.
    #[arg(long, global = true, default_value_t = DEFAULT_VDISC3_CAP)]
    pub cap_exact_vdisc3: usize,
    /// Search budget (nodes, candidates or checks, depending on the command).
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub budget: u64,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the run manifest to this file.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a canonical family member.
    Construct(ConstructArgs),
    /// Measure a quasirandomness quantity of the input graph.
    Measure(MeasureArgs),
    /// Search for an induced pattern or report the dimension profile.
    Detect(DetectArgs),
    /// Build, classify, encode or refine decompositions.
    Decompose(DecomposeArgs),
    /// Run a stable-graph partitioner.
    PartitionStable(StableArgs),
    /// Check the special 3-graph axioms on GS_p(n) or HP(N).
    SpecialVerify(SpecialArgs),
    /// Produce a certified witness.
    Witness(WitnessArgs),
    /// Run the acceptance pipelines.
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Size parameter of GS, W, W1, W2, tensor and vcfop (defaults to k).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    /// Bipartite graph for the tensor construction.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_VERTEX_CAP)]
    pub vertex_cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Disc2,
    Vdisc3,
    Dev23,
    Oct23,
    Disc23,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[arg(long, value_enum)]
    pub metric: Metric,
    /// Reference density ("a/b" or decimal); the edge density when absent.
    #[arg(long)]
    pub density: Option<String>,
    /// Part sizes "a,b,c" of a 3G input; equal thirds when absent.
    #[arg(long)]
    pub parts: Option<String>,
    /// Random subsets tried when the exact cap is exceeded.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Restrict disc2 to subsets of at least this fraction of each side.
    #[arg(long)]
    pub min_fraction: Option<String>,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// Pattern "FAMILY:k" (for example H:3, F:2, GS:3,2); the dimension profile when absent.
    #[arg(long)]
    pub pattern: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DecomposeAction {
    Build,
    Classify,
    ErrorShape,
    Encode,
    Refine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Random,
    Natural,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[arg(value_enum)]
    pub action: DecomposeAction,
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Random)]
    pub strategy: StrategyArg,
    /// Decomposition JSON file.
    #[arg(long)]
    pub decomp: Option<PathBuf>,
    /// Second decomposition for `refine`.
    #[arg(long)]
    pub with: Option<PathBuf>,
    #[arg(long, default_value = "1/10")]
    pub eps1: String,
    #[arg(long, default_value = "1/5")]
    pub eps2: String,
    /// Bipartite pattern for `encode`, as "FAMILY:k".
    #[arg(long, default_value = "H:2")]
    pub pattern: String,
    /// Also extract an FOP2 witness of this order after `encode`.
    #[arg(long)]
    pub extract: Option<usize>,
    /// Number of pair parts in the output of `refine`.
    #[arg(long)]
    pub l_out: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Alg {
    Goodsets1,
    Goodstrong,
    Equitable,
    Fiberwise,
    Removal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RoundingArg {
    Floor,
    Ceil,
}

#[derive(Args, Debug)]
pub struct StableArgs {
    #[arg(long, value_enum)]
    pub alg: Alg,
    #[arg(long, default_value = "f=geometric:0.5")]
    pub schedule: String,
    /// Tree-rank bound d.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value = "1/10")]
    pub eps: String,
    #[arg(long, default_value = "1/10")]
    pub mu: String,
    /// Piece size for `equitable`; derived from eps when absent.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, value_enum, default_value_t = RoundingArg::Ceil)]
    pub rounding: RoundingArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gs,
    Hp,
}

#[derive(Args, Debug)]
pub struct SpecialArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Comma separated key=value list: GS takes p, n, rho; HP takes n, tau, mu, rho, p.
    #[arg(long, default_value = "")]
    pub params: String,
    /// Axiom ids, as a range "1-9" or a list "1,3,5".
    #[arg(long, default_value = "1-9")]
    pub axioms: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WitnessKind {
    Hbark,
    Split,
    Pairsplit,
    Mixed,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[arg(long, value_enum)]
    pub kind: WitnessKind,
    /// H-bar size for `hbark`.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Number of partition classes for `hbark` and `mixed`.
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    #[arg(long, default_value = "1/262144")]
    pub eps1: String,
    /// Threshold for `mixed`.
    #[arg(long, default_value = "1/20")]
    pub eps: String,
    /// Family for `split` and `pairsplit`.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long, default_value = "")]
    pub params: String,
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub r2: Option<String>,
    #[arg(long)]
    pub x: Option<usize>,
    #[arg(long)]
    pub x2: Option<usize>,
    #[arg(long)]
    pub y: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long, value_enum, default_value_t = Tier::Fast)]
    pub tier: Tier,
    /// Run only these criterion ids ("3,5" or "1-4").
    #[arg(long)]
    pub only: Option<String>,
}

/// Provenance of one run; rerunning `command_line` on inputs with the same
/// hashes reproduces the JSON report byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub seed: u64,
    pub caps: Caps,
    pub input_hashes: BTreeMap<String, String>,
    pub tool_version: String,
    pub threads: Option<usize>,
    pub exit_code: i32,
    pub wall_time_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Caps {
    pub exact_disc2: usize,
    pub exact_vdisc3: usize,
    pub budget: u64,
}

/// Captured result of one invocation.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub manifest: Option<RunManifest>,
}

struct Ctx {
    g: Global,
    inputs: BTreeMap<String, String>,
}

struct Report {
    command: &'static str,
    body: Value,
    text: String,
    verified: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Ctx {
    fn read(&mut self, path: &Path) -> CliResult<String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io { path: path.display().to_string(), msg: e.to_string() })?;
        self.inputs.insert(path.display().to_string(), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    fn input_path(&self) -> CliResult<PathBuf> {
        self.g.input.clone().ok_or_else(|| usage("--in is required"))
    }

    fn read_input(&mut self) -> CliResult<String> {
        let p = self.input_path()?;
        self.read(&p)
    }

    fn three(&mut self) -> CliResult<ThreeGraph> {
        Ok(parse_3g(&self.read_input()?)?)
    }

    fn bip(&mut self) -> CliResult<BipartiteGraph> {
        Ok(parse_bip(&self.read_input()?)?)
    }

    fn write_out(&self, text: &str) -> CliResult<Option<String>> {
        match &self.g.out {
            Some(p) => {
                std::fs::write(p, text).map_err(|e| CliError::Io { path: p.display().to_string(), msg: e.to_string() })?;
                Ok(Some(p.display().to_string()))
            }
            None => Ok(None),
        }
    }

    fn sub_seed(&self, label: &str) -> u64 {
        num::sub_seed(self.g.seed, label)
    }
}

fn rational(s: &str, what: &str) -> CliResult<Q> {
    parse_q(s).ok_or_else(|| usage(format!("cannot read {what} = {s:?} as a rational")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// "a-b" or "a,b,c" into a sorted list.
pub fn parse_ids(s: &str) -> CliResult<Vec<u8>> {
    let bad = || usage(format!("cannot read id list {s:?}"));
    let mut out = Vec::new();
    for piece in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = piece.split_once('-') {
            let (a, b): (u8, u8) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(piece.parse().map_err(|_| bad())?);
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// "k1=v1,k2=v2".
pub fn parse_params(s: &str) -> CliResult<BTreeMap<String, String>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| usage(format!("parameter {p:?} is not key=value")))
        })
        .collect()
}

fn param_q(m: &BTreeMap<String, String>, key: &str, default: Q) -> CliResult<Q> {
    m.get(key).map_or(Ok(default), |v| rational(v, key))
}

fn param_usize(m: &BTreeMap<String, String>, key: &str, default: usize) -> CliResult<usize> {
    m.get(key).map_or(Ok(default), |v| v.parse().map_err(|_| usage(format!("{key} = {v:?} is not an integer"))))
}

/// Pattern spec "FAMILY:k" or "GS:p,n".
pub fn parse_family_spec(s: &str) -> CliResult<FamilySpec> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let family: Family = name.parse()?;
    let nums: Vec<usize> = rest
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|_| usage(format!("bad parameter in pattern {s:?}"))))
        .collect::<CliResult<_>>()?;
    let first = nums.first().copied().unwrap_or(0);
    Ok(match family {
        Family::Gs => FamilySpec::gs(first, nums.get(1).copied().unwrap_or(1)),
        Family::W | Family::W1 | Family::W2 => {
            let mut spec = FamilySpec::new(family, 0);
            spec.n = first;
            spec
        }
        _ => FamilySpec::new(family, first),
    })
}

fn gs_family(m: &BTreeMap<String, String>) -> CliResult<(SpecialFamily, usize, Q)> {
    let (p, n) = (param_usize(m, "p", 3)?, param_usize(m, "n", 2)?);
    let rho = param_q(m, "rho", q(1, (p.pow(n as u32 + 1)) as i128))?;
    Ok((SpecialFamily::Gs { p, n }, p, rho))
}

fn hp_family(m: &BTreeMap<String, String>) -> CliResult<(SpecialFamily, usize, Q)> {
    let n = param_usize(m, "n", 200)?;
    let tau = param_q(m, "tau", q(6, 25))?;
    let mu = param_q(m, "mu", q(1, 20))?;
    let rho = param_q(m, "rho", q(1, 1000))?;
    Ok((SpecialFamily::Hp { n, tau, mu }, param_usize(m, "p", 2)?, rho))
}

fn special_family(f: FamilyArg, params: &str) -> CliResult<(SpecialFamily, usize, Q)> {
    let m = parse_params(params)?;
    match f {
        FamilyArg::Gs => gs_family(&m),
        FamilyArg::Hp => hp_family(&m),
    }
}

fn default_parts(n: usize, sizes: Option<&str>) -> CliResult<[Vec<usize>; 3]> {
    let s: Vec<usize> = match sizes {
        Some(txt) => txt
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| usage(format!("bad part sizes {txt:?}"))))
            .collect::<CliResult<_>>()?,
        None if n % 3 == 0 => vec![n / 3; 3],
        None => return Err(usage(format!("{n} vertices do not split into equal thirds; pass --parts"))),
    };
    if s.len() != 3 || s.iter().sum::<usize>() != n {
        return Err(usage(format!("part sizes {s:?} do not sum to {n}")));
    }
    Ok([(0..s[0]).collect(), (s[0]..s[0] + s[1]).collect(), (s[0] + s[1]..n).collect()])
}

fn cmd_construct(ctx: &mut Ctx, a: &ConstructArgs) -> CliResult<Report> {
    let family: Family = a.family.parse()?;
    let n = a.n.unwrap_or(a.k);
    let mut spec = match family {
        Family::Gs => FamilySpec::gs(a.p.ok_or_else(|| usage("GS needs --p"))?, n),
        Family::Tensor => {
            let path = a.graph.clone().ok_or_else(|| usage("TENSOR needs --graph"))?;
            FamilySpec::tensor(n, parse_bip(&ctx.read(&path)?)?)
        }
        Family::VcfopExample => FamilySpec::vcfop(a.k, n, ctx.sub_seed("construct-vcfop")),
        _ => {
            let mut s = FamilySpec::new(family, a.k);
            s.n = n;
            s
        }
    };
    if let Some(p) = a.p {
        spec.p = p;
    }
    let built = build_canonical(&spec, a.vertex_cap)?;
    let (format, text, vertices, edges) = match &built {
        Built::Three(h) => ("3graph", emit_3g(h), h.n(), h.edge_count()),
        Built::Bip(g) => ("bip", emit_bip(g), g.left() + g.right(), g.edge_count()),
    };
    let out = ctx.write_out(&text)?;
    let mut body = json!({
        "family": format!("{family:?}"),
        "k": spec.k,
        "n": spec.n,
        "p": spec.p,
        "format": format,
        "vertices": vertices,
        "edges": edges,
        "sha256": sha256_hex(text.as_bytes()),
        "out": out,
    });
    let summary = format!("{family:?}: {vertices} vertices, {edges} edges ({format})");
    let text_out = if out.is_none() && !ctx.g.json {
        text
    } else {
        if out.is_none() {
            body["content"] = Value::String(text);
        }
        summary
    };
    Ok(Report { command: "construct", body, text: text_out, verified: true })
}

fn cmd_measure(ctx: &mut Ctx, a: &MeasureArgs) -> CliResult<Report> {
    let density = a.density.as_deref().map(|d| rational(d, "density")).transpose()?;
    let sampling = a.samples.map(|s| (s, ctx.sub_seed("measure-sampling")));
    let body = match a.metric {
        Metric::Disc2 => {
            let g = ctx.bip()?;
            let min_fraction = a.min_fraction.as_deref().map(|f| rational(f, "min-fraction")).transpose()?;
            let opts = Disc2Options { density, cap: ctx.g.cap_exact_disc2, min_fraction, sampling };
            to_value(&disc2_deviation(&g, &opts)?)
        }
        Metric::Vdisc3 => {
            let h = ctx.three()?;
            let h = h.clone().with_partition(default_parts(h.n(), a.parts.as_deref())?)?;
            let opts = Vdisc3Options { density, cap: ctx.g.cap_exact_vdisc3, sampling };
            to_value(&vdisc3_graph(&h, &opts)?)
        }
        Metric::Dev23 | Metric::Oct23 | Metric::Disc23 => {
            let h = ctx.three()?;
            let parts = default_parts(h.n(), a.parts.as_deref())?;
            let t = Triad::new(&h, &TripartiteGraph::complete(parts))?;
            match a.metric {
                Metric::Dev23 => to_value(&dev23_sum(&t, density)),
                Metric::Oct23 => json!({ "count": oct23_count(&t).to_string() }),
                _ => {
                    let opts = Disc23Options {
                        d3: density,
                        budget: ctx.g.budget as usize,
                        seed: ctx.sub_seed("measure-disc23"),
                        ..Default::default()
                    };
                    to_value(&disc23_witness_search(&t, &opts))
                }
            }
        }
    };
    let mut body = body;
    let text = match body.get("deviation") {
        Some(d) => format!("{:?} deviation {}", a.metric, d),
        None => format!("{:?} {}", a.metric, body),
    };
    body["metric"] = to_value(&a.metric);
    Ok(Report { command: "measure", body, text, verified: true })
}

fn cmd_detect(ctx: &mut Ctx, a: &DetectArgs) -> CliResult<Report> {
    let text = ctx.read_input()?;
    let three = text.trim_start().starts_with("3graph");
    let (h, g) = if three { (Some(parse_3g(&text)?), None) } else { (None, Some(parse_bip(&text)?)) };
    let host = match (&h, &g) {
        (Some(h), _) => Host::Three(h),
        (_, Some(g)) => Host::Bip(g),
        _ => unreachable!(),
    };
    match &a.pattern {
        Some(p) => {
            let spec = parse_family_spec(p)?;
            let pattern = Pattern::build(&spec, DEFAULT_VERTEX_CAP)?;
            let w = find_pattern(host, &pattern, p, ctx.g.budget)?;
            let text = format!("{p}: {:?} after {} nodes", w.status, w.nodes_explored);
            Ok(Report { command: "detect", body: to_value(&w), text, verified: true })
        }
        None => {
            let h = h.ok_or_else(|| usage("the dimension profile needs a 3G input"))?;
            let caps = DimensionCaps { budget: ctx.g.budget, ..Default::default() };
            let r = dimension_report(&h, &caps)?;
            let body = to_value(&r);
            Ok(Report { command: "detect", text: body.to_string(), body, verified: true })
        }
    }
}

fn load_decomp(ctx: &mut Ctx, path: &Option<PathBuf>) -> CliResult<Decomposition> {
    let p = path.clone().ok_or_else(|| usage("--decomp is required"))?;
    Ok(Decomposition::from_json(&ctx.read(&p)?)?)
}

fn cmd_decompose(ctx: &mut Ctx, a: &DecomposeArgs) -> CliResult<Report> {
    let eps1 = rational(&a.eps1, "eps1")?;
    let eps2 = rational(&a.eps2, "eps2")?;
    let mut o = ClassifyOptions::new(eps1, eps2);
    o.seed = ctx.sub_seed("decompose-classify");
    match a.action {
        DecomposeAction::Build => {
            let h = ctx.three()?;
            let strategy = match a.strategy {
                StrategyArg::Random => Strategy::Random,
                StrategyArg::Natural => Strategy::Natural,
            };
            let d = build_decomposition(&h, a.t, a.l, &strategy, ctx.sub_seed("decompose-build"))?;
            let text = d.to_json();
            let out = ctx.write_out(&text)?;
            let body = json!({
                "t": d.t(),
                "l": d.l(),
                "n": d.n(),
                "sha256": sha256_hex(text.as_bytes()),
                "out": out,
                "decomposition": serde_json::from_str::<Value>(&text).expect("decomposition JSON"),
            });
            Ok(Report { command: "decompose", text: format!("t={} l={} over {} vertices", d.t(), d.l(), d.n()), body, verified: true })
        }
        DecomposeAction::Classify | DecomposeAction::ErrorShape => {
            let h = ctx.three()?;
            let d = load_decomp(ctx, &a.decomp)?;
            let reports = classify_triads(&h, &d, &o)?;
            let count = |c: TriadClass| reports.iter().filter(|r| r.class == c).count();
            let counts = json!({
                "regular": count(TriadClass::Regular),
                "disc2_irregular": count(TriadClass::Disc2Irregular),
                "disc3_irregular": count(TriadClass::Disc3Irregular),
            });
            if a.action == DecomposeAction::Classify {
                let text = format!("triads: {counts}");
                let census = triad_census(&h, &d)?;
                let body = json!({ "counts": counts, "triads": to_value(&reports), "census": to_value(&census) });
                Ok(Report { command: "decompose", body, text, verified: true })
            } else {
                let shape = error_shape(&reports, d.t(), ErrorBudgets::from_eps(eps1, d.t()));
                let text = format!("shape {:?}, sigma {}, gamma {}", shape.kind, shape.sigma.len(), shape.gamma.len());
                let body = json!({
                    "counts": counts,
                    "shape": to_value(&shape),
                    "linear_fits": shape.linear_fits(),
                    "binary_fits": shape.binary_fits(),
                });
                Ok(Report { command: "decompose", body, text, verified: true })
            }
        }
        DecomposeAction::Encode => {
            let h = ctx.three()?;
            let d = load_decomp(ctx, &a.decomp)?;
            let enc = reduced_encoding(&h, &d, eps1, eps2, ctx.sub_seed("decompose-encode"))?;
            let r = match build_canonical(&parse_family_spec(&a.pattern)?, DEFAULT_VERTEX_CAP)? {
                Built::Bip(r) => r,
                Built::Three(_) => return Err(usage("the encoding pattern must be a bipartite family")),
            };
            let w = find_encoding(&enc, &r, &a.pattern, ctx.g.budget);
            let mut text = format!("{}: {:?}", a.pattern, w.status);
            let extracted = match a.extract {
                Some(k) => {
                    let f = extract_fop2_witness(&h, &d, &w, k, ctx.g.budget)?;
                    text += &format!(", F({k}) {:?}", f.status);
                    to_value(&f)
                }
                None => Value::Null,
            };
            let body = json!({ "encoding": to_value(&enc), "witness": to_value(&w), "extracted": extracted });
            Ok(Report { command: "decompose", body, text, verified: true })
        }
        DecomposeAction::Refine => {
            let p = load_decomp(ctx, &a.decomp)?;
            let q_ = load_decomp(ctx, &a.with)?;
            let (r, rep) = common_refinement(&p, &q_, a.l_out, ctx.sub_seed("decompose-refine"))?;
            let text = r.to_json();
            let out = ctx.write_out(&text)?;
            let body = json!({
                "report": to_value(&rep),
                "sha256": sha256_hex(text.as_bytes()),
                "out": out,
                "decomposition": serde_json::from_str::<Value>(&text).expect("decomposition JSON"),
            });
            Ok(Report { command: "decompose", text: format!("refinement t={} l={}", r.t(), r.l()), body, verified: true })
        }
    }
}

fn cmd_stable(ctx: &mut Ctx, a: &StableArgs) -> CliResult<Report> {
    let f = Schedule::parse(&a.schedule)?;
    let eps = rational(&a.eps, "eps")?;
    let rounding = match a.rounding {
        RoundingArg::Floor => Rounding::Floor,
        RoundingArg::Ceil => Rounding::Ceil,
    };
    let (body, verified, text) = match a.alg {
        Alg::Goodsets1 => {
            let g = ctx.bip()?;
            let w: Vec<usize> = (0..g.right()).collect();
            let gp = goodsets1_partition_with(&g, &w, a.d, &f, rounding)?;
            let text = format!("{} stages, {} pieces, residue {}", gp.t(), gp.carved().count(), gp.residue.len());
            (to_value(&gp), gp.verified(), text)
        }
        Alg::Goodstrong | Alg::Equitable => {
            let g = ctx.bip()?;
            let parts = vec![(0..g.right()).collect::<Vec<usize>>()];
            let mode = if a.alg == Alg::Equitable { Mode::Equitable(a.size) } else { Mode::Plain };
            let sp = goodstrong_partition(&g, &parts, a.d, eps, &f, mode, rounding)?;
            (to_value(&sp), sp.verified(), format!("verified {}", sp.verified()))
        }
        Alg::Fiberwise => {
            let h = ctx.three()?;
            let n = h.n();
            let alpha: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
            let caps = FiberCaps { seed: ctx.sub_seed("stable-fiberwise"), rounding, ..Default::default() };
            let fp = fiberwise_good_partition(&h, &[alpha], a.d, eps, &f, caps)?;
            let text = format!("omega fraction {}, achieved level {}", fp.omega_fraction, fp.achieved_level);
            (to_value(&fp), fp.verified(), text)
        }
        Alg::Removal => {
            let g = ctx.bip()?;
            let mu = rational(&a.mu, "mu")?;
            let u: Vec<usize> = (0..g.left()).collect();
            let w: Vec<usize> = (0..g.right()).collect();
            let caps = RemovalCaps { seed: ctx.sub_seed("stable-removal"), ..Default::default() };
            let rp = tree_removal_partition(&g, &u, &w, a.d, mu, eps, caps)?;
            let text = format!("{} parts, U' fraction {}, W0 fraction {}", rp.parts.len(), rp.u_prime_fraction, rp.w0_fraction);
            (to_value(&rp), true, text)
        }
    };
    Ok(Report { command: "partition-stable", body, text, verified })
}

fn cmd_special(ctx: &mut Ctx, a: &SpecialArgs) -> CliResult<Report> {
    let (family, p, rho) = special_family(a.family, &a.params)?;
    let metrics = match family {
        SpecialFamily::Gs { p, n } => gs_metric(p, n)?,
        SpecialFamily::Hp { n, tau, mu } => hp_metric(n, tau, mu)?,
    };
    let params = match family {
        SpecialFamily::Gs { .. } => SpecialParams::gs(p, rho),
        SpecialFamily::Hp { tau, mu, .. } => SpecialParams::hp(p, tau, mu, rho),
    };
    let oracle = family.oracle()?;
    let inst = SpecialInstance::new(oracle.as_ref(), metrics, params.clone(), Some(family.clone()))?;
    let budget = usize::try_from(ctx.g.budget).unwrap_or(usize::MAX);
    let reports = parse_ids(&a.axioms)?
        .into_iter()
        .map(|ax| verify_axiom(&inst, ax, budget))
        .collect::<Result<Vec<_>, _>>()?;
    let verified = reports.iter().all(|r| r.passed);
    let text = reports
        .iter()
        .map(|r| format!("axiom {}: {} ({:?}, {} checks)", r.axiom, if r.passed { "pass" } else { "FAIL" }, r.mode, r.checked))
        .collect::<Vec<_>>()
        .join("\n");
    let body = json!({ "family": to_value(&family), "params": to_value(&params), "axioms": to_value(&reports), "passed": verified });
    Ok(Report { command: "special-verify", body, text, verified })
}

fn cmd_witness(ctx: &mut Ctx, a: &WitnessArgs) -> CliResult<Report> {
    let need = |x: Option<usize>, what: &str| x.ok_or_else(|| usage(format!("--{what} is required")));
    let (body, verified, text) = match a.kind {
        WitnessKind::Hbark => {
            let eps1 = rational(&a.eps1, "eps1")?;
            let mut rng = num::stream(ctx.g.seed, "witness-hbark");
            let p = VertexPartition::random_equipartition(3 * a.n, a.t, &mut rng)?;
            let w = hbark_irregular_witness(a.n, &p, eps1)?;
            let text = format!("classes {:?}, split {}, min set {} (bound {:.2})", w.classes, w.split, w.min_size, w.size_bound);
            (to_value(&w), w.verified(), text)
        }
        WitnessKind::Split | WitnessKind::Pairsplit => {
            let fam = a.family.ok_or_else(|| usage("--family is required"))?;
            let (family, _, _) = special_family(fam, &a.params)?;
            let r = rational(a.r.as_deref().ok_or_else(|| usage("--r is required"))?, "r")?;
            if a.kind == WitnessKind::Split {
                let w = split_witness(&family, r, need(a.x, "x")?, need(a.y, "y")?)?;
                let text = format!("f0 {}, f1 {}, distance {}", w.f0, w.f1, w.distance);
                (to_value(&w), w.verified(), text)
            } else {
                let r2 = rational(a.r2.as_deref().ok_or_else(|| usage("--r2 is required"))?, "r2")?;
                let w = pair_split_witness(&family, need(a.x, "x")?, need(a.x2, "x2")?, need(a.y, "y")?, (r, r2))?;
                let text = format!("z {}, edge side {:?}, r0 {}", w.z, w.edge_side, w.r0);
                (to_value(&w), w.verified, text)
            }
        }
        WitnessKind::Mixed => {
            let h = ctx.three()?;
            let h = h.clone().with_partition(default_parts(h.n(), None)?)?;
            let eps = rational(&a.eps, "eps")?;
            let mut rng = num::stream(ctx.g.seed, "witness-mixed");
            let p = VertexPartition::random_equipartition(h.n(), a.t, &mut rng)?;
            let m = mixed_density_scan(&h, &p, eps)?;
            let text = format!("{} mixed class triples", m.len());
            (json!({ "t": a.t, "eps": eps.to_string(), "mixed": to_value(&m) }), true, text)
        }
    };
    Ok(Report { command: "witness", body, text, verified })
}

fn cmd_suite(_ctx: &mut Ctx, a: &SuiteArgs) -> CliResult<Report> {
    let outcomes: Vec<suite::Outcome> = match &a.only {
        Some(ids) => parse_ids(ids)?
            .into_iter()
            .map(|id| suite::criterion(id).map(suite::run_criterion).ok_or_else(|| usage(format!("no criterion {id}"))))
            .collect::<CliResult<_>>()?,
        None => suite::run_suite(a.tier),
    };
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let verified = passed == outcomes.len();
    let mut text = outcomes.iter().map(suite::Outcome::line).collect::<Vec<_>>().join("\n");
    text += &format!("\n{passed}/{} criteria passed", outcomes.len());
    let body = json!({ "tier": to_value(&a.tier), "results": to_value(&outcomes), "passed": passed, "total": outcomes.len() });
    Ok(Report { command: "suite", body, text, verified })
}

fn dispatch(ctx: &mut Ctx, cmd: &Command) -> CliResult<Report> {
    match cmd {
        Command::Construct(a) => cmd_construct(ctx, a),
        Command::Measure(a) => cmd_measure(ctx, a),
        Command::Detect(a) => cmd_detect(ctx, a),
        Command::Decompose(a) => cmd_decompose(ctx, a),
        Command::PartitionStable(a) => cmd_stable(ctx, a),
        Command::SpecialVerify(a) => cmd_special(ctx, a),
        Command::Witness(a) => cmd_witness(ctx, a),
        Command::Suite(a) => cmd_suite(ctx, a),
    }
}

/// Run one invocation and capture its output. `argv[0]` is the program name.
pub fn run_captured<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let start = Instant::now();
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let msg = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), msg) } else { (msg, String::new()) };
            return RunOutput { code, stdout, stderr, manifest: None };
        }
    };
    let mut ctx = Ctx { g: cli.global.clone(), inputs: BTreeMap::new() };
    let result = match cli.global.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(&mut ctx, &cli.command)),
            Err(e) => Err(usage(format!("cannot start {t} threads: {e}"))),
        },
        None => dispatch(&mut ctx, &cli.command),
    };
    let (code, stdout, stderr) = match result {
        Ok(rep) => {
            let code = if rep.verified { EXIT_OK } else { EXIT_VERIFY };
            let stdout = if cli.global.json {
                let env = json!({
                    "tool": "hyperreg",
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": rep.command,
                    "seed": cli.global.seed,
                    "verified": rep.verified,
                    "report": rep.body,
                });
                serde_json::to_string_pretty(&env).expect("JSON") + "\n"
            } else {
                rep.text + "\n"
            };
            let stderr = if rep.verified { String::new() } else { format!("verification failed ({})\n", rep.command) };
            (code, stdout, stderr)
        }
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    };
    let manifest = RunManifest {
        command_line: argv.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
        seed: cli.global.seed,
        caps: Caps {
            exact_disc2: cli.global.cap_exact_disc2,
            exact_vdisc3: cli.global.cap_exact_vdisc3,
            budget: cli.global.budget,
        },
        input_hashes: ctx.inputs,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        threads: cli.global.threads,
        exit_code: code,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let mut stderr = stderr;
    if let Some(path) = &cli.global.manifest {
        let text = serde_json::to_string_pretty(&manifest).expect("JSON") + "\n";
        if let Err(e) = std::fs::write(path, text) {
            stderr += &format!("error: cannot write manifest {}: {e}\n", path.display());
        }
    }
    RunOutput { code, stdout, stderr, manifest: Some(manifest) }
}

/// Run with the process arguments, print to the standard streams and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use std::io::Write;
    let out = run_captured(argv);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_lists() {
        assert_eq!(parse_ids("1-3,7").unwrap(), vec![1, 2, 3, 7]);
        assert_eq!(parse_ids("9, 2").unwrap(), vec![2, 9]);
        assert!(parse_ids("3-1").is_err());
        assert!(parse_ids("").is_err());
    }

    #[test]
    fn family_specs() {
        assert_eq!(parse_family_spec("H:3").unwrap(), FamilySpec::new(Family::HalfGraph, 3));
        assert_eq!(parse_family_spec("GS:3,2").unwrap(), FamilySpec::gs(3, 2));
        assert_eq!(parse_family_spec("W:4").unwrap().n, 4);
        assert!(parse_family_spec("nope:1").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Lib(Error::Parse { line: 3, msg: "x".into() }).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::Lib(Error::VertexCap { needed: 9, cap: 1 }).exit_code(), EXIT_CAP);
        assert_eq!(CliError::Lib(Error::InvalidWitness("w".into())).exit_code(), EXIT_VERIFY);
    }

    #[test]
    fn unknown_subcommand_is_usage() {
        let out = run_captured(["hyperreg", "frobnicate"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stdout.is_empty());
    }
}
