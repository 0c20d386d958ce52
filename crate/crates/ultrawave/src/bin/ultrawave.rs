//! Command-line frontend: tree summaries, wavelet transforms, operator
//! application and spectra, the change of variable, and the self-test gate.
//!
//! Exit codes: 0 on success, 1 on validation errors (bad specs, files,
//! arguments), 2 on invariant failures reported by `selftest` or `op
//! --mode spectrum`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ultrawave::io as uio;
use ultrawave::selftest::{self, SelfTestConfig, SuiteStatus};
use ultrawave::{changevar, wavelet};
use ultrawave::{Error, KernelKind, RadialKernel, TreeHandle, UltrametricTree, WaveletIndex};

#[derive(Parser)]
#[command(
    name = "ultrawave",
    version,
    about = "Ultrametric wavelets, diagonal operators and the half-line change of variable on trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a tree spec: vertex/leaf counts and the measures table.
    Tree(TreeCmd),
    /// Forward or inverse wavelet transform between grid and coefficient CSVs.
    Transform(TransformCmd),
    /// Apply a radial-kernel operator or dump its spectrum.
    Op(OpCmd),
    /// The change of variable: leaf→t map or an exported wavelet.
    Rho(RhoCmd),
    /// Run the invariant suites of every module.
    Selftest(SelftestCmd),
}

#[derive(Args)]
struct TreeArg {
    /// Tree spec: a JSON file path or an inline JSON object.
    #[arg(long = "tree", value_name = "FILE|JSON")]
    tree: String,
}

impl TreeArg {
    fn load(&self) -> Result<TreeHandle, Error> {
        let text = if self.tree.trim_start().starts_with('{') {
            self.tree.clone()
        } else {
            std::fs::read_to_string(&self.tree)?
        };
        Ok(Arc::new(UltrametricTree::from_spec_json(&text)?))
    }
}

#[derive(Args)]
struct TreeCmd {
    #[command(flatten)]
    tree: TreeArg,
    /// Write the per-vertex measures table as CSV.
    #[arg(long = "out", value_name = "CSV")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformMode {
    Fwd,
    Inv,
}

#[derive(Args)]
struct TransformCmd {
    #[command(flatten)]
    tree: TreeArg,
    #[arg(long = "mode", value_enum)]
    mode: TransformMode,
    /// Input CSV: a grid function for `fwd`, coefficients for `inv`.
    #[arg(long = "in", value_name = "CSV")]
    input: PathBuf,
    #[arg(long = "out", value_name = "CSV")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpMode {
    Dense,
    Spectral,
    Spectrum,
}

#[derive(Args)]
struct OpCmd {
    #[command(flatten)]
    tree: TreeArg,
    /// Kernel: `constant:<c>`, `power:<alpha>`, or a kernel CSV path.
    #[arg(long = "kernel", value_name = "SPEC|CSV")]
    kernel: String,
    #[arg(long = "mode", value_enum)]
    mode: OpMode,
    /// Input grid CSV (dense and spectral modes).
    #[arg(long = "in", value_name = "CSV")]
    input: Option<PathBuf>,
    #[arg(long = "out", value_name = "CSV")]
    out: PathBuf,
    /// Relative tolerance for the spectrum formula-agreement check.
    #[arg(long = "tol", default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RhoMode {
    Map,
    Export,
}

#[derive(Args)]
struct RhoCmd {
    #[command(flatten)]
    tree: TreeArg,
    #[arg(long = "mode", value_enum)]
    mode: RhoMode,
    /// Wavelet vertex for `export` (empty string is the top vertex).
    #[arg(long = "vertex", default_value = "")]
    vertex: String,
    /// Wavelet frequency j for `export`.
    #[arg(long = "freq", default_value_t = 1)]
    freq: u32,
    /// Decimal digits for the approximate columns.
    #[arg(long = "precision", default_value_t = 15)]
    precision: usize,
    #[arg(long = "out", value_name = "CSV")]
    out: PathBuf,
}

#[derive(Args)]
struct SelftestCmd {
    /// Seed for the randomized suites.
    #[arg(long = "seed", default_value_t = selftest::DEFAULT_SEED)]
    seed: u64,
    /// Run the fast-path suites on a 2^16-leaf tree; dense oracles are skipped.
    #[arg(long = "large")]
    large: bool,
    /// Negative control: perturb one wavelet phase; orthonormality must fail.
    #[arg(long = "perturb-phase")]
    perturb_phase: bool,
    /// Tolerance for exact-path comparisons.
    #[arg(long = "tol-exact", default_value_t = 1e-12)]
    tol_exact: f64,
    /// Tolerance for dense-vs-spectral comparisons.
    #[arg(long = "tol-dense", default_value_t = 1e-10)]
    tol_dense: f64,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Tree(cmd) => cmd_tree(cmd),
        Command::Transform(cmd) => cmd_transform(cmd),
        Command::Op(cmd) => cmd_op(cmd),
        Command::Rho(cmd) => cmd_rho(cmd),
        Command::Selftest(cmd) => Ok(cmd_selftest(cmd)),
    }
}

fn writer(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn reader(path: &Path) -> Result<BufReader<File>, Error> {
    Ok(BufReader::new(File::open(path)?))
}

fn cmd_tree(cmd: TreeCmd) -> Result<ExitCode, Error> {
    let tree = cmd.tree.load()?;
    println!(
        "{} leaves, {} internal, top_measure {}",
        tree.leaf_count(),
        tree.internal_count(),
        tree.top_measure()
    );
    println!(
        "depth {}, max branching {}, root `{}`",
        tree.depth(),
        tree.max_branching(),
        tree.format_address(&tree.root_address())
    );
    if let Some(out) = cmd.out {
        let mut w = writer(&out)?;
        uio::write_tree_summary_csv(&mut w, &tree)?;
        w.flush()?;
        println!("measures table written to {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_transform(cmd: TransformCmd) -> Result<ExitCode, Error> {
    let tree = cmd.tree.load()?;
    let input_name = cmd.input.display().to_string();
    let mut w = writer(&cmd.out)?;
    match cmd.mode {
        TransformMode::Fwd => {
            let f = uio::read_grid_csv(reader(&cmd.input)?, &tree, &input_name)?;
            uio::write_coefficients_csv(&mut w, &wavelet::forward(&f))?;
        }
        TransformMode::Inv => {
            let coeffs = uio::read_coefficients_csv(reader(&cmd.input)?, &tree, &input_name)?;
            uio::write_grid_csv(&mut w, &wavelet::inverse(&coeffs))?;
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn load_kernel(tree: &TreeHandle, spec: &str) -> Result<RadialKernel, Error> {
    if let Some(rest) = spec.strip_prefix("constant:") {
        let c: f64 = rest
            .parse()
            .map_err(|_| Error::Spec(format!("bad kernel constant `{rest}`")))?;
        return ultrawave::make_kernel(tree, &KernelKind::Constant(c));
    }
    if let Some(rest) = spec.strip_prefix("power:") {
        let alpha: f64 = rest
            .parse()
            .map_err(|_| Error::Spec(format!("bad kernel exponent `{rest}`")))?;
        return ultrawave::make_kernel(tree, &KernelKind::PowerLaw(alpha));
    }
    let path = Path::new(spec);
    uio::read_kernel_csv(reader(path)?, tree, spec)
}

fn cmd_op(cmd: OpCmd) -> Result<ExitCode, Error> {
    let tree = cmd.tree.load()?;
    let kernel = load_kernel(&tree, &cmd.kernel)?;
    let mut w = writer(&cmd.out)?;
    match cmd.mode {
        OpMode::Dense | OpMode::Spectral => {
            let input = cmd
                .input
                .as_ref()
                .ok_or_else(|| Error::Spec("dense/spectral modes require --in".into()))?;
            let f = uio::read_grid_csv(reader(input)?, &tree, &input.display().to_string())?;
            let out = match cmd.mode {
                OpMode::Dense => kernel.apply_dense(&f)?,
                _ => kernel.apply_spectral(&f)?,
            };
            uio::write_grid_csv(&mut w, &out)?;
            w.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        OpMode::Spectrum => {
            let mut rows = Vec::with_capacity(tree.internal_count());
            let mut worst = 0.0f64;
            for vertex in tree.internal_vertices() {
                let series = kernel.eigenvalue_series(&vertex)?;
                let integral = kernel.eigenvalue_integral(&vertex)?;
                let scale = series.abs().max(integral.abs()).max(1e-300);
                worst = worst.max((series - integral).abs() / scale);
                rows.push((vertex, series, integral));
            }
            uio::write_spectrum_csv(&mut w, &tree, &rows)?;
            w.flush()?;
            if worst > cmd.tol {
                eprintln!(
                    "invariant failure: eigenvalue formulas disagree by {worst:.3e} (tol {:.0e})",
                    cmd.tol
                );
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_rho(cmd: RhoCmd) -> Result<ExitCode, Error> {
    let tree = cmd.tree.load()?;
    let mut w = writer(&cmd.out)?;
    match cmd.mode {
        RhoMode::Map => {
            uio::write_rho_map_csv(&mut w, &tree, cmd.precision)?;
        }
        RhoMode::Export => {
            let vertex = tree.parse_address(&cmd.vertex)?;
            let idx = WaveletIndex::new(vertex, cmd.freq);
            let exported = changevar::export_wavelet(&tree, &idx)?;
            uio::write_piecewise_csv(&mut w, &exported, cmd.precision)?;
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_selftest(cmd: SelftestCmd) -> ExitCode {
    let config = SelfTestConfig {
        seed: cmd.seed,
        large: cmd.large,
        perturb_phase: cmd.perturb_phase,
        tol_exact: cmd.tol_exact,
        tol_dense: cmd.tol_dense,
    };
    println!(
        "selftest: seed {}, mode {}, tol_exact {:.0e}, tol_dense {:.0e}",
        config.seed,
        if config.large { "large" } else { "standard" },
        config.tol_exact,
        config.tol_dense
    );
    let outcomes = selftest::run(&config);
    for o in &outcomes {
        let tag = match o.status {
            SuiteStatus::Passed => "PASS",
            SuiteStatus::Failed => "FAIL",
            SuiteStatus::Skipped => "SKIP",
        };
        println!("{tag} {:<28} {}", o.name, o.details);
    }
    if selftest::all_passed(&outcomes) {
        println!("selftest: all suites passed");
        ExitCode::SUCCESS
    } else {
        println!("selftest: FAILURES detected");
        ExitCode::from(2)
    }
}
