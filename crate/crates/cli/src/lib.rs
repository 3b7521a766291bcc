//! `sgtopo`: generate coupling files, analyse frustration networks, find
//! exact ground states, run the topology verifiers and scan percolation
//! statistics.
//!
//! Every output starts with a [`RunManifest`]; `sgtopo replay FILE` reruns
//! the manifest found in FILE and reproduces its bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use spinglass_topology::corpus::{self, Instance};
use spinglass_topology::disorder::{plaquette_frustration, sample_couplings, split_networks, BondConfig};
use spinglass_topology::ground_state::{
    brute_force_ground_states, domain_walls, interface_check, theorem31_decomposition, DEFAULT_SITE_CAP,
};
use spinglass_topology::percolation::{
    cluster_scan, exact_prob_unfrustrated, mc_prob_unfrustrated, ClusterMode, EXACT_BOND_CAP,
};
use spinglass_topology::topology::{frustration_class, homology, verify_instance, Report};
use spinglass_topology::{BitVector, CellComplex, Lattice, Subcomplex};

pub const MANIFEST_SCHEMA: &str = "sgtopo.manifest/1";
/// Worker threads for the parallel parts; output never depends on it.
pub const THREADS_ENV: &str = "SGTOPO_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "sgtopo", version, about = "Z2 topology of frustration in Ising spin glasses")]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// JSON output (default).
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// CSV output with a header row, preceded by a `# manifest:` line.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Write here instead of standard output.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample couplings (or export a built-in instance) to a bond file.
    Gen(GenArgs),
    /// Frustration networks, pair cover, homology and phi values.
    Analyze(Source),
    /// Exact ground states, domain walls and the interface identity.
    Gs(GsArgs),
    /// All topology verifiers on an instance or a suite.
    Verify(VerifyArgs),
    /// Unfrustration probabilities or cluster statistics over an x grid.
    Percolate(PercolateArgs),
    /// Rerun the manifest embedded in an earlier output.
    Replay {
        file: PathBuf,
    },
    /// Names of the built-in instances.
    List,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Lattice label such as 8x8, 4x4x4 or 6px3 (p = periodic axis).
    #[arg(long, required_unless_present = "instance")]
    pub lattice: Option<String>,
    /// Probability of a positive bond.
    #[arg(long, required_unless_present = "instance")]
    pub x: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub j0: f64,
    /// Export a built-in instance instead of sampling.
    #[arg(long, conflicts_with_all = ["lattice", "x"])]
    pub instance: Option<String>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Bond file written by `sgtopo gen`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in instance name (see `sgtopo list`).
    #[arg(long)]
    pub instance: Option<String>,
}

#[derive(Args, Debug)]
pub struct GsArgs {
    #[command(flatten)]
    pub source: Source,
    /// Brute-force site cap.
    #[arg(long, default_value_t = DEFAULT_SITE_CAP)]
    pub cap: usize,
    /// Ground states listed in the report.
    #[arg(long, default_value_t = 64)]
    pub max_states: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Corpus,
    Random,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with_all = ["instance", "suite"])]
    pub input: Option<PathBuf>,
    #[arg(long, conflicts_with = "suite")]
    pub instance: Option<String>,
    /// Suite run when no single instance is given.
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Instances in the random suite.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Probability that a plaquette set is unfrustrated.
    Prob,
    UnfrustratedPlaquettes,
    NegativeBonds,
}

#[derive(Args, Debug)]
pub struct PercolateArgs {
    #[arg(long, value_enum, default_value = "prob")]
    pub mode: Mode,
    /// x values: a list `0.3,0.5` or a range `start:stop:step`.
    #[arg(long, default_value = "0.5")]
    pub x: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Prob mode: a row of this many plaquettes.
    #[arg(long, conflicts_with = "lattice")]
    pub strip: Option<usize>,
    /// Cluster modes: the lattice; prob mode: use all of its plaquettes.
    #[arg(long)]
    pub lattice: Option<String>,
}

/// What a run did and with which inputs. Embedded in every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub format: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j0: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub caps: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// SHA-256 of the input file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Arguments that reproduce the run (without the output path).
    pub argv: Vec<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

/// Text to write and whether every check passed.
struct Outcome {
    text: String,
    passed: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    if let Command::Replay { file } = &cli.command {
        return replay(file, cli.out.as_deref());
    }
    let format = if cli.csv { Format::Csv } else { Format::Json };
    let mut manifest = RunManifest {
        schema: MANIFEST_SCHEMA.into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: String::new(),
        format: match format {
            Format::Json => "json",
            Format::Csv => "csv",
        }
        .into(),
        seed: cli.seed,
        lattice: None,
        x: Vec::new(),
        j0: None,
        caps: BTreeMap::new(),
        input: None,
        input_sha256: None,
        output: cli.out.as_ref().map(|p| p.display().to_string()),
        argv: Vec::new(),
    };
    let outcome = match &cli.command {
        Command::Gen(a) => cmd_gen(a, &mut manifest, format)?,
        Command::Analyze(s) => cmd_analyze(s, &mut manifest, format)?,
        Command::Gs(a) => cmd_gs(a, &mut manifest, format)?,
        Command::Verify(a) => cmd_verify(a, &mut manifest, format)?,
        Command::Percolate(a) => cmd_percolate(a, &mut manifest, format)?,
        Command::List => {
            let names: Vec<String> = corpus::builtin().into_iter().map(|i| i.name).collect();
            Outcome {
                text: names.join("\n") + "\n",
                passed: true,
            }
        }
        Command::Replay { .. } => unreachable!(),
    };
    emit(cli.out.as_deref(), &outcome.text)?;
    Ok(outcome.passed)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).context("writing to stdout")?;
            so.flush().context("writing to stdout")
        }
    }
}

fn replay(file: &Path, out: Option<&Path>) -> Result<bool> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let manifest = read_manifest(&text).with_context(|| format!("no manifest in {}", file.display()))?;
    if manifest.schema != MANIFEST_SCHEMA {
        bail!("unsupported manifest schema {}", manifest.schema);
    }
    let mut args = vec!["sgtopo".to_string()];
    args.extend(manifest.argv.iter().cloned());
    let target = out.map(Path::to_path_buf).or(manifest.output.map(PathBuf::from));
    if let Some(p) = target {
        args.push("--out".into());
        args.push(p.display().to_string());
    }
    let cli = Cli::try_parse_from(&args).map_err(|e| anyhow!("manifest arguments: {e}"))?;
    if matches!(cli.command, Command::Replay { .. }) {
        bail!("a manifest cannot replay another manifest");
    }
    execute(&cli)
}

/// The manifest of a JSON output, or of the `# manifest:` line of a CSV
/// output.
pub fn read_manifest(text: &str) -> Result<RunManifest> {
    if let Some(rest) = text.strip_prefix("# manifest: ") {
        let line = rest.lines().next().unwrap_or_default();
        return Ok(serde_json::from_str(line)?);
    }
    #[derive(Deserialize)]
    struct Doc {
        manifest: RunManifest,
    }
    Ok(serde_json::from_str::<Doc>(text)?.manifest)
}

fn base_argv(manifest: &RunManifest, command: &str) -> Vec<String> {
    let mut v = vec!["--seed".to_string(), manifest.seed.to_string(), format!("--{}", manifest.format)];
    v.push(command.to_string());
    v
}

fn to_json<T: Serialize>(schema: &str, manifest: &RunManifest, body: &T) -> Result<String> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        schema: &'a str,
        manifest: &'a RunManifest,
        #[serde(flatten)]
        body: &'a T,
    }
    let mut s = serde_json::to_string_pretty(&Doc { schema, manifest, body })?;
    s.push('\n');
    Ok(s)
}

fn to_csv<R: Serialize>(manifest: &RunManifest, rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?;
    Ok(format!("# manifest: {}\n{body}", serde_json::to_string(manifest)?))
}

/// A bond file: lattice plus the serialized couplings.
#[derive(Serialize, Deserialize)]
struct BondFile {
    lattice: Lattice,
    #[serde(flatten)]
    bonds: BondConfig,
}

fn load(source: &Source, manifest: &mut RunManifest) -> Result<Instance> {
    if let Some(name) = &source.instance {
        manifest.input = Some(format!("instance:{name}"));
        return corpus::by_name(name).ok_or_else(|| anyhow!("unknown instance {name:?}; see `sgtopo list`"));
    }
    let path = source.input.as_ref().expect("clap requires a source");
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    manifest.input = Some(path.display().to_string());
    manifest.input_sha256 = Some(hex::encode(Sha256::digest(&bytes)));
    let file: BondFile =
        serde_json::from_slice(&bytes).with_context(|| format!("malformed bond file {}", path.display()))?;
    let complex = CellComplex::new(file.lattice);
    file.bonds.check(&complex).context("bond file does not fit its lattice")?;
    Ok(Instance {
        name: path.display().to_string(),
        complex,
        bonds: file.bonds,
    })
}

fn source_argv(source: &Source) -> Vec<String> {
    match (&source.instance, &source.input) {
        (Some(n), _) => vec!["--instance".into(), n.clone()],
        (None, Some(p)) => vec!["--input".into(), p.display().to_string()],
        (None, None) => Vec::new(),
    }
}

fn note_instance(manifest: &mut RunManifest, inst: &Instance) {
    manifest.lattice = Some(inst.complex.lattice().label());
    manifest.j0 = Some(inst.bonds.j0());
}

fn parse_lattice(label: &str) -> Result<Lattice> {
    label.parse::<Lattice>().map_err(|e| anyhow!("{e}"))
}

// ---------------------------------------------------------------- gen

#[derive(Serialize)]
struct BondRow {
    bond: usize,
    axis: usize,
    coords: String,
    sign: i8,
}

fn cmd_gen(a: &GenArgs, manifest: &mut RunManifest, format: Format) -> Result<Outcome> {
    manifest.command = "gen".into();
    let mut argv = base_argv(manifest, "gen");
    let (complex, bonds) = match &a.instance {
        Some(name) => {
            let inst = corpus::by_name(name).ok_or_else(|| anyhow!("unknown instance {name:?}"))?;
            argv.extend(["--instance".into(), name.clone()]);
            manifest.input = Some(format!("instance:{name}"));
            (inst.complex, inst.bonds)
        }
        None => {
            let (label, x) = (a.lattice.as_deref().unwrap(), a.x.unwrap());
            let complex = CellComplex::new(parse_lattice(label)?);
            let bonds = sample_couplings(&complex, x, a.j0, manifest.seed).map_err(|e| anyhow!("{e}"))?;
            argv.extend(["--lattice".into(), label.into(), "--x".into(), x.to_string()]);
            argv.extend(["--j0".into(), a.j0.to_string()]);
            manifest.x = vec![x];
            (complex, bonds)
        }
    };
    manifest.lattice = Some(complex.lattice().label());
    manifest.j0 = Some(bonds.j0());
    manifest.argv = argv;
    let text = match format {
        Format::Json => to_json(
            "sgtopo.bonds/1",
            manifest,
            &BondFile {
                lattice: complex.lattice().clone(),
                bonds,
            },
        )?,
        Format::Csv => {
            let rows: Vec<BondRow> = (0..complex.num_bonds())
                .map(|b| {
                    let c = complex.cell(1, b);
                    let coords: Vec<String> = c.base[..complex.d()].iter().map(usize::to_string).collect();
                    BondRow {
                        bond: b,
                        axis: c.axes.trailing_zeros() as usize,
                        coords: coords.join(" "),
                        sign: bonds.sign(b),
                    }
                })
                .collect();
            to_csv(manifest, &rows)?
        }
    };
    Ok(Outcome { text, passed: true })
}

// ---------------------------------------------------------------- analyze

#[derive(Serialize)]
struct Analysis {
    instance: String,
    lattice: String,
    sites: usize,
    bonds: usize,
    plaquettes: usize,
    negative_bonds: usize,
    frustrated: usize,
    frustrated_fraction: f64,
    /// Binomial standard error of the fraction at 1/2 per plaquette.
    frustrated_fraction_stderr: f64,
    /// Component sizes of N- and N+, largest first.
    components_minus: Vec<usize>,
    components_plus: Vec<usize>,
    pairs: usize,
    unpaired: usize,
    /// dim H_k for k = 0..=d.
    homology_nplus: Vec<usize>,
    homology_nminus: Vec<usize>,
    /// phi on a basis of H_1(N+).
    phi: Vec<i8>,
}

#[derive(Serialize)]
struct AnalysisRow {
    instance: String,
    lattice: String,
    frustrated: usize,
    plaquettes: usize,
    frustrated_fraction: f64,
    pairs: usize,
    unpaired: usize,
    h1_nplus: usize,
    frustrated_loops: usize,
}

fn analyse(inst: &Instance) -> Result<Analysis> {
    let cx = &inst.complex;
    let split = split_networks(cx, &inst.bonds);
    let sizes = |comps: &[Vec<usize>]| {
        let mut v: Vec<usize> = comps.iter().map(Vec::len).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    };
    let dims = |mask: &BitVector| -> Result<Vec<usize>> {
        let sub = Subcomplex::from_plaquettes(cx, mask);
        (0..=cx.d())
            .map(|k| Ok(homology(cx, &sub, k).map_err(|e| anyhow!("{e}"))?.dim_h))
            .collect()
    };
    let nplus = Subcomplex::from_plaquettes(cx, &split.unfrustrated);
    let class = frustration_class(cx, &inst.bonds, &nplus).map_err(|e| anyhow!("{e}"))?;
    let np = cx.num_plaquettes();
    let nf = split.frustrated.count_ones();
    Ok(Analysis {
        instance: inst.name.clone(),
        lattice: cx.lattice().label(),
        sites: cx.num_sites(),
        bonds: cx.num_bonds(),
        plaquettes: np,
        negative_bonds: inst.bonds.negative().count_ones(),
        frustrated: nf,
        frustrated_fraction: nf as f64 / np as f64,
        frustrated_fraction_stderr: (0.25 / np as f64).sqrt(),
        components_minus: sizes(&split.components_minus),
        components_plus: sizes(&split.components_plus),
        pairs: split.pair_cover.pairs.len(),
        unpaired: split.pair_cover.unmatched.len(),
        homology_nplus: dims(&split.unfrustrated)?,
        homology_nminus: dims(&split.frustrated)?,
        phi: class.basis_values,
    })
}

fn cmd_analyze(s: &Source, manifest: &mut RunManifest, format: Format) -> Result<Outcome> {
    manifest.command = "analyze".into();
    let inst = load(s, manifest)?;
    note_instance(manifest, &inst);
    manifest.argv = base_argv(manifest, "analyze");
    manifest.argv.extend(source_argv(s));
    let a = analyse(&inst)?;
    let text = match format {
        Format::Json => to_json("sgtopo.analyze/1", manifest, &a)?,
        Format::Csv => to_csv(
            manifest,
            &[AnalysisRow {
                instance: a.instance.clone(),
                lattice: a.lattice.clone(),
                frustrated: a.frustrated,
                plaquettes: a.plaquettes,
                frustrated_fraction: a.frustrated_fraction,
                pairs: a.pairs,
                unpaired: a.unpaired,
                h1_nplus: a.homology_nplus.get(1).copied().unwrap_or(0),
                frustrated_loops: a.phi.iter().filter(|&&v| v == -1).count(),
            }],
        )?,
    };
    Ok(Outcome { text, passed: true })
}

// ---------------------------------------------------------------- gs

#[derive(Serialize)]
struct WallSummary {
    bonds: Vec<usize>,
    boundary_plaquettes: Vec<usize>,
}

#[derive(Serialize)]
struct DecompositionSummary {
    r: usize,
    walls: Vec<Vec<usize>>,
    minimal_sets: usize,
    transverse: Vec<bool>,
    null_homologous: Vec<bool>,
    loop_values: Vec<i8>,
    /// Energy of the N+ Hamiltonian in units of J0.
    energy: i64,
}

#[derive(Serialize)]
struct GsReport {
    instance: String,
    lattice: String,
    sites: usize,
    /// Ground-state energy in units of J0.
    energy: i64,
    j0: f64,
    energy_value: f64,
    degeneracy: u64,
    /// Lowest site up, lexicographic bit strings (1 = down).
    canonical_states: Vec<String>,
    states_listed: usize,
    /// Walls of the first canonical state.
    walls: Vec<WallSummary>,
    interface_passed: bool,
    interface_states_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<DecompositionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition_skipped: Option<String>,
}

#[derive(Serialize)]
struct GsRow {
    instance: String,
    lattice: String,
    sites: usize,
    energy: i64,
    degeneracy: u64,
    walls: usize,
    interface_passed: bool,
    r: Option<usize>,
    transverse: Option<bool>,
}

fn ground_states(inst: &Instance, cap: usize, max_states: usize) -> Result<(GsReport, bool)> {
    let cx = &inst.complex;
    let gs = brute_force_ground_states(cx, &inst.bonds, cap).map_err(|e| anyhow!("{e}"))?;
    let nplus = plaquette_frustration(cx, &inst.bonds).not();
    let mut interface_passed = true;
    for s in &gs.states {
        interface_passed &= interface_check(cx, s, &inst.bonds, &nplus).map_err(|e| anyhow!("{e}"))?.passed;
    }
    let first = &gs.states[0];
    let ws = domain_walls(cx, first, &inst.bonds).map_err(|e| anyhow!("{e}"))?;
    let walls = ws
        .walls
        .iter()
        .zip(&ws.boundaries)
        .map(|(w, b)| WallSummary {
            bonds: w.cells(),
            boundary_plaquettes: b.cells(),
        })
        .collect();
    let (decomposition, skipped) = if nplus.is_zero() {
        (None, Some("N+ is empty".to_string()))
    } else {
        match theorem31_decomposition(cx, &inst.bonds, &nplus, cap) {
            Ok(d) => (
                Some(DecompositionSummary {
                    r: d.r(),
                    walls: d.walls.walls.iter().map(|w| w.cells()).collect(),
                    minimal_sets: d.minimal_sets,
                    transverse: d.reports.iter().map(|w| w.transverse).collect(),
                    null_homologous: d.reports.iter().map(|w| w.null_homologous).collect(),
                    loop_values: d.loop_values.clone(),
                    energy: d.energy,
                }),
                None,
            ),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let walls_ok = decomposition
        .as_ref()
        .is_none_or(|d| d.transverse.iter().all(|&t| t) && d.null_homologous.iter().all(|&n| !n));
    let canonical: Vec<String> = gs.canonical().iter().take(max_states).map(|s| s.to_bit_string()).collect();
    let report = GsReport {
        instance: inst.name.clone(),
        lattice: cx.lattice().label(),
        sites: cx.num_sites(),
        energy: gs.energy,
        j0: gs.j0,
        energy_value: gs.energy_value(),
        degeneracy: gs.degeneracy,
        states_listed: canonical.len(),
        canonical_states: canonical,
        walls,
        interface_passed,
        interface_states_checked: gs.states.len(),
        decomposition,
        decomposition_skipped: skipped,
    };
    Ok((report, interface_passed && walls_ok))
}

fn cmd_gs(a: &GsArgs, manifest: &mut RunManifest, format: Format) -> Result<Outcome> {
    manifest.command = "gs".into();
    let inst = load(&a.source, manifest)?;
    note_instance(manifest, &inst);
    manifest.caps.insert("sites".into(), a.cap as u64);
    manifest.caps.insert("max_states".into(), a.max_states as u64);
    manifest.argv = base_argv(manifest, "gs");
    manifest.argv.extend(source_argv(&a.source));
    manifest.argv.extend([
        "--cap".into(),
        a.cap.to_string(),
        "--max-states".into(),
        a.max_states.to_string(),
    ]);
    let (r, passed) = ground_states(&inst, a.cap, a.max_states)?;
    let text = match format {
        Format::Json => to_json("sgtopo.gs/1", manifest, &r)?,
        Format::Csv => to_csv(
            manifest,
            &[GsRow {
                instance: r.instance.clone(),
                lattice: r.lattice.clone(),
                sites: r.sites,
                energy: r.energy,
                degeneracy: r.degeneracy,
                walls: r.walls.len(),
                interface_passed: r.interface_passed,
                r: r.decomposition.as_ref().map(|d| d.r),
                transverse: r.decomposition.as_ref().map(|d| d.transverse.iter().all(|&t| t)),
            }],
        )?,
    };
    Ok(Outcome { text, passed })
}

// ---------------------------------------------------------------- verify

/// The random verification suite: alternating free 4x4 and 3x3x3
/// lattices, x cycling through 0.3, 0.5, 0.7, instance i drawn from
/// stream i of `seed`.
pub fn random_suite(seed: u64, count: usize) -> Vec<Instance> {
    (0..count)
        .map(|i| {
            let ext: &[usize] = if i % 2 == 0 { &[4, 4] } else { &[3, 3, 3] };
            let x = [0.3, 0.5, 0.7][i % 3];
            let cx = CellComplex::new(Lattice::free(ext).expect("valid"));
            let bonds = spinglass_topology::disorder::sample_couplings_stream(&cx, x, 1.0, seed, i as u64)
                .expect("valid x");
            let label = cx.lattice().label();
            Instance {
                name: format!("random-{i}-{label}-x{x}"),
                complex: cx,
                bonds,
            }
        })
        .collect()
}

#[derive(Serialize)]
struct VerifyEntry {
    instance: String,
    lattice: String,
    passed: bool,
    h1_nplus: usize,
    checks: usize,
    failed: Vec<String>,
    report: Report,
}

#[derive(Serialize)]
struct VerifySummary {
    passed: bool,
    instances: usize,
    failed_instances: usize,
    results: Vec<VerifyEntry>,
}

#[derive(Serialize)]
struct VerifyRow {
    instance: String,
    lattice: String,
    passed: bool,
    h1_nplus: usize,
    checks: usize,
    failed: String,
}

fn verify_one(inst: &Instance, seed: u64) -> Result<VerifyEntry> {
    let cx = &inst.complex;
    let report = verify_instance(cx, &inst.bonds, seed);
    let nplus = Subcomplex::from_plaquettes(cx, &plaquette_frustration(cx, &inst.bonds).not());
    let h1 = homology(cx, &nplus, 1).map_err(|e| anyhow!("{e}"))?.dim_h;
    Ok(VerifyEntry {
        instance: inst.name.clone(),
        lattice: cx.lattice().label(),
        passed: report.passed,
        h1_nplus: h1,
        checks: report.checks.len(),
        failed: report.failures().map(|c| c.name.clone()).collect(),
        report,
    })
}

fn cmd_verify(a: &VerifyArgs, manifest: &mut RunManifest, format: Format) -> Result<Outcome> {
    manifest.command = "verify".into();
    manifest.argv = base_argv(manifest, "verify");
    let instances = if a.input.is_some() || a.instance.is_some() {
        let src = Source {
            input: a.input.clone(),
            instance: a.instance.clone(),
        };
        let inst = load(&src, manifest)?;
        note_instance(manifest, &inst);
        manifest.argv.extend(source_argv(&src));
        vec![inst]
    } else {
        let suite = a.suite.unwrap_or(Suite::Corpus);
        let mut v = Vec::new();
        if matches!(suite, Suite::Corpus | Suite::All) {
            v.extend(corpus::builtin());
        }
        if matches!(suite, Suite::Random | Suite::All) {
            v.extend(random_suite(manifest.seed, a.count));
            manifest.caps.insert("count".into(), a.count as u64);
        }
        let name = format!("{suite:?}").to_lowercase();
        manifest.input = Some(format!("suite:{name}"));
        manifest.argv.extend(["--suite".into(), name, "--count".into(), a.count.to_string()]);
        v
    };
    let seed = manifest.seed;
    let mut results: Vec<VerifyEntry> = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| verify_one(inst, seed.wrapping_add(i as u64)))
        .collect::<Result<_>>()?;
    results.sort_by(|x, y| x.instance.cmp(&y.instance));
    let failed = results.iter().filter(|r| !r.passed).count();
    let summary = VerifySummary {
        passed: failed == 0,
        instances: results.len(),
        failed_instances: failed,
        results,
    };
    let text = match format {
        Format::Json => to_json("sgtopo.verify/1", manifest, &summary)?,
        Format::Csv => {
            let rows: Vec<VerifyRow> = summary
                .results
                .iter()
                .map(|r| VerifyRow {
                    instance: r.instance.clone(),
                    lattice: r.lattice.clone(),
                    passed: r.passed,
                    h1_nplus: r.h1_nplus,
                    checks: r.checks,
                    failed: r.failed.join(";"),
                })
                .collect();
            to_csv(manifest, &rows)?
        }
    };
    Ok(Outcome {
        text,
        passed: summary.passed,
    })
}

// ---------------------------------------------------------------- percolate

/// `0.3,0.5` or `start:stop:step` (inclusive, snapped to 1e-9).
pub fn parse_x_values(spec: &str) -> Result<Vec<f64>> {
    let parse = |s: &str| s.trim().parse::<f64>().with_context(|| format!("bad x value {s:?}"));
    let values = if let [a, b, step] = spec.split(':').collect::<Vec<_>>()[..] {
        let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
        if !(step > 0.0) || b < a {
            bail!("x range {spec:?} needs start <= stop and step > 0");
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| ((a + k as f64 * step) * 1e9).round() / 1e9).collect()
    } else {
        spec.split(',').map(parse).collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        bail!("no x values");
    }
    if let Some(x) = values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        bail!("x = {x} outside [0, 1]");
    }
    Ok(values)
}

#[derive(Serialize)]
struct PercolationRow {
    mode: String,
    lattice: String,
    n: usize,
    x: f64,
    trials: u64,
    estimate: f64,
    stderr: f64,
    bound: Option<f64>,
    exact: Option<f64>,
    largest_fraction: Option<f64>,
    largest_fraction_stderr: Option<f64>,
}

#[derive(Serialize)]
struct PercolationOutput {
    rows: Vec<PercolationRow>,
    reports: Vec<spinglass_topology::percolation::PercolationReport>,
}

fn cmd_percolate(a: &PercolateArgs, manifest: &mut RunManifest, format: Format) -> Result<Outcome> {
    manifest.command = "percolate".into();
    let xs = parse_x_values(&a.x)?;
    if a.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let (complex, set, label) = match (a.mode, a.strip, &a.lattice) {
        (Mode::Prob, Some(n), _) => {
            if n == 0 {
                bail!("--strip needs at least one plaquette");
            }
            let (cx, all) = corpus::strip(n);
            let label = cx.lattice().label();
            (cx, Some(all), label)
        }
        (_, Some(_), _) => bail!("--strip applies to prob mode only"),
        (mode, None, lattice) => {
            let label = lattice.clone().unwrap_or_else(|| if mode == Mode::Prob { "3x1" } else { "8x8" }.into());
            let cx = CellComplex::new(parse_lattice(&label)?);
            let all = (mode == Mode::Prob).then(|| BitVector::ones(cx.num_plaquettes()));
            let label = cx.lattice().label();
            (cx, all, label)
        }
    };
    manifest.lattice = Some(label.clone());
    manifest.x = xs.clone();
    manifest.caps.insert("trials".into(), a.trials);
    let mode_name = a.mode.to_possible_value().expect("value").get_name().to_string();
    manifest.argv = base_argv(manifest, "percolate");
    manifest.argv.extend([
        "--mode".into(),
        mode_name.clone(),
        "--x".into(),
        a.x.clone(),
        "--trials".into(),
        a.trials.to_string(),
    ]);
    match a.strip {
        Some(n) => manifest.argv.extend(["--strip".into(), n.to_string()]),
        None => manifest.argv.extend(["--lattice".into(), label.clone()]),
    }
    let seed = manifest.seed;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &x in &xs {
        let (report, exact) = match (a.mode, &set) {
            (Mode::Prob, Some(set)) => {
                let r = mc_prob_unfrustrated(&complex, set, x, a.trials, seed).map_err(|e| anyhow!("{e}"))?;
                let exact = if spinglass_topology::percolation::closure_bonds(&complex, set).len() <= EXACT_BOND_CAP {
                    Some(exact_prob_unfrustrated(&complex, set, x).map_err(|e| anyhow!("{e}"))?)
                } else {
                    None
                };
                (r, exact)
            }
            (Mode::UnfrustratedPlaquettes, _) => (
                cluster_scan(&complex, x, a.trials, seed, ClusterMode::UnfrustratedPlaquettes)
                    .map_err(|e| anyhow!("{e}"))?,
                None,
            ),
            (Mode::NegativeBonds, _) => (
                cluster_scan(&complex, x, a.trials, seed, ClusterMode::NegativeBonds).map_err(|e| anyhow!("{e}"))?,
                None,
            ),
            (Mode::Prob, None) => unreachable!(),
        };
        rows.push(PercolationRow {
            mode: mode_name.clone(),
            lattice: label.clone(),
            n: report.n,
            x,
            trials: report.trials,
            estimate: report.estimate,
            stderr: report.stderr,
            bound: report.bound,
            exact,
            largest_fraction: report.largest_fraction,
            largest_fraction_stderr: report.largest_fraction_stderr,
        });
        reports.push(report);
    }
    let text = match format {
        Format::Json => to_json("sgtopo.percolate/1", manifest, &PercolationOutput { rows, reports })?,
        Format::Csv => to_csv(manifest, &rows)?,
    };
    Ok(Outcome { text, passed: true })
}
