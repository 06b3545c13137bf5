//! Command-line front end.
//!
//! Every subcommand reads JSON documents (from a file or standard input),
//! calls one library operation and prints a [`Report`]. Exit status is 0
//! when every boolean verdict holds, 1 when one fails, 2 on errors.

mod documents;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use documents::{
    digest, fixture_json, load_matrix, parse_json, save_matrix, AlgebraDocument, ChannelDocument,
    ComprehensionDocument, MatrixDocument, Report, SemiLocalisationDocument, SplitDocument, Verdict,
    WitnessDocument,
};

use crate::channels::{
    chi_trace, schroedinger_semicausal, semi_localise, stinespring, verify_semi_localisation,
};
use crate::error::{mismatch, Error, Result};
use crate::linops::{Settings, Side, Tolerance};
use crate::splitmap::{
    balanced_decomposition, canonical_splitting_map, comprehension_balanced_canonical,
    comprehension_nested_canonical, comprehension_residual, consistent_algebra, is_balanced, is_lean,
    lean_decomposition, local_representative, strictly_local_algebra, strictly_local_representative,
    verify_comprehension,
};
use crate::vnalg::{atomic_projectors, aw_decomposition, center, commutant, trace_over_algebra};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vnsplit", version, about = "Subsystems as splitting maps: algebras, splits and channels")]
pub struct Cli {
    /// Absolute tolerance; overrides VNSPLIT_TOL.
    #[arg(long, global = true, env = "VNSPLIT_TOL")]
    pub tol: Option<f64>,

    /// Seed for randomised steps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Write the command's main object (or the report) to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Von Neumann algebra analyses on {"dim", "generators"} documents.
    #[command(subcommand)]
    Algebra(AlgebraCommand),
    /// Splitting-map analyses on {"d_H", "d_L", "d_R", "isometry"} documents.
    #[command(subcommand)]
    Split(SplitCommand),
    /// Channel analyses on {"d_in", "d_out", "kraus"} documents.
    #[command(subcommand)]
    Channel(ChannelCommand),
    /// Print a named example object as JSON.
    ///
    /// Names: chi-tensor, chi-oplus, fg-counterexample, unbalanced-00-10,
    /// entangled-balanced, algebra-otimes, algebra-oplus, swap-unitary,
    /// product-channel.
    Fixture { name: String },
}

#[derive(Debug, Args)]
pub struct Input {
    /// Input document; `-` reads standard input.
    #[arg(default_value = "-")]
    pub input: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum AlgebraCommand {
    /// Generated unital *-algebra. Verdicts: dim, center_dim (equal to dim
    /// exactly when the algebra is commutative). Artifacts: basis_*.
    Close(Input),
    /// Commutant. Verdicts: dim. Artifacts: basis_*.
    Commutant(Input),
    /// Center. Verdicts: dim. Artifacts: basis_*.
    Center(Input),
    /// Atomic projectors of the algebra, which must be commutative.
    /// Verdicts: count. Artifacts: projector_*.
    Atoms(Input),
    /// Artin-Wedderburn decomposition. Verdicts: block_count,
    /// block_<i>_d_left, block_<i>_d_right. Artifacts: unitary.
    Aw(Input),
    /// Trace of an operator over the algebra. Verdicts: dim.
    /// Artifacts: traced.
    Trace {
        #[command(flatten)]
        input: Input,
        /// Operator as a matrix document.
        #[arg(long)]
        operator: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum SplitCommand {
    /// Validate a splitting map. Verdicts: isometry. Artifacts: image_projector.
    Make(Input),
    /// Is the operator local? Verdicts: local. Artifacts: representative.
    CheckLocal(OperatorArgs),
    /// Is the operator strictly local? Verdicts: strictly_local.
    /// Artifacts: representative.
    CheckStrict(OperatorArgs),
    /// Consistent operators on one leg. Verdicts: dim. Artifacts: basis_*.
    Cons(SideArgs),
    /// Strictly local algebra. Verdicts: dim. Artifacts: basis_*.
    Stloc(SideArgs),
    /// Verdicts: balanced.
    Balanced(Input),
    /// Verdicts: balanced, lean.
    Lean(Input),
    /// Canonical splitting map of an algebra document. Verdicts: d_L, d_R.
    /// Artifacts: isometry.
    Canonical(Input),
    /// Check a {"zeta", "chi", "witness"} document. Verdicts: verified,
    /// residual.
    ComprehendVerify(Input),
    /// Canonical maps for a nested pair with a witness. Input is the small
    /// algebra. Verdicts: verified, d_M. Artifacts: zeta, chi, black_dot,
    /// white_dot.
    ComprehendNested {
        #[command(flatten)]
        input: Input,
        /// The larger algebra.
        #[arg(long)]
        big: PathBuf,
    },
    /// Canonical map for a balanced map with witnesses both ways. Verdicts:
    /// forward, backward, d_M_forward, d_M_backward. Artifacts: zeta.
    ComprehendBalanced(Input),
    /// Block Schmidt decomposition. Verdicts: balanced, lean, block_count,
    /// schmidt_rank_<i>. Artifacts: zeta, projector_*, u_left, u_right.
    Decompose(Input),
}

#[derive(Debug, Args)]
pub struct SideArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum, default_value = "left")]
    pub side: SideArg,
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    #[command(flatten)]
    pub input: Input,
    /// Operator on the domain, as a matrix document.
    #[arg(long)]
    pub operator: PathBuf,
    #[arg(long, value_enum, default_value = "left")]
    pub side: SideArg,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[command(flatten)]
    pub input: Input,
    /// Lean splitting map for the commutant of the input algebra.
    #[arg(long = "chi-a")]
    pub chi_a: PathBuf,
    /// Lean splitting map for the output algebra.
    #[arg(long = "chi-b")]
    pub chi_b: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ChannelCommand {
    /// Verdicts: valid, kraus_count, choi_rank. Artifacts: choi.
    Validate(Input),
    /// Stinespring dilation. Verdicts: d_env, choi_rank (equal to d_env for
    /// a minimal dilation). Artifacts: isometry.
    Stinespring {
        #[command(flatten)]
        input: Input,
        /// Use the Choi eigendecomposition instead of the stored Kraus set.
        #[arg(long)]
        minimal: bool,
    },
    /// Trace along a splitting map (the input). Verdicts: trace_preserved.
    /// Artifacts: traced.
    ChiTrace {
        #[command(flatten)]
        input: Input,
        /// Operator on the domain of the map.
        #[arg(long)]
        rho: PathBuf,
    },
    /// Schroedinger semi-causality. Verdicts: semicausal.
    /// Artifacts: reduced_kraus_*.
    Semicausal(PairArgs),
    /// Semi-localisation. Verdicts: verified, d_V, d_U.
    /// Artifacts: zeta_B, E1, T.
    Semilocalise(PairArgs),
    /// Check a semi-localisation document. Verdicts: verified.
    VerifySl {
        #[command(flatten)]
        input: Input,
        #[arg(long = "chi-a")]
        chi_a: PathBuf,
        /// Document written by `semilocalise --out`.
        #[arg(long)]
        decomposition: PathBuf,
    },
}

struct Context<'a> {
    settings: Settings,
    stdin: &'a mut dyn Read,
    stdin_used: bool,
    inputs: Vec<String>,
}

impl Context<'_> {
    fn read(&mut self, source: &str) -> Result<Vec<u8>> {
        let bytes = if source == "-" {
            if self.stdin_used {
                return Err(Error::Io("standard input can only be read once".into()));
            }
            self.stdin_used = true;
            let mut buf = Vec::new();
            self.stdin
                .read_to_end(&mut buf)
                .map_err(|e| Error::Io(format!("stdin: {e}")))?;
            buf
        } else {
            std::fs::read(source).map_err(|e| Error::Io(format!("{source}: {e}")))?
        };
        self.inputs.push(digest(&bytes));
        Ok(bytes)
    }

    fn doc<T: serde::de::DeserializeOwned>(&mut self, source: &str) -> Result<T> {
        let bytes = self.read(source)?;
        parse_json(&bytes)
    }

    fn path_doc<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T> {
        self.doc(&path.to_string_lossy())
    }

    fn tol(&self) -> &Tolerance {
        &self.settings.tol
    }
}

/// Report plus the object `--out` should receive, if any.
struct Outcome {
    report: Report,
    object: Option<serde_json::Value>,
}

fn to_value<T: Serialize>(x: &T) -> Option<serde_json::Value> {
    Some(serde_json::to_value(x).expect("documents serialise"))
}

fn algebra_outcome(report: &mut Report, a: &crate::vnalg::VnAlgebra) -> Option<serde_json::Value> {
    report.verdict("dim", a.dim()).artifact_list("basis", a.basis());
    to_value(&AlgebraDocument::from_algebra(a))
}

fn run_algebra(cmd: &AlgebraCommand, cx: &mut Context) -> Result<Outcome> {
    let s = cx.settings;
    let (name, input) = match cmd {
        AlgebraCommand::Close(i) => ("algebra close", i),
        AlgebraCommand::Commutant(i) => ("algebra commutant", i),
        AlgebraCommand::Center(i) => ("algebra center", i),
        AlgebraCommand::Atoms(i) => ("algebra atoms", i),
        AlgebraCommand::Aw(i) => ("algebra aw", i),
        AlgebraCommand::Trace { input, .. } => ("algebra trace", input),
    };
    let a = cx.doc::<AlgebraDocument>(&input.input)?.to_algebra(cx.tol())?;
    let mut report = Report::new(name, s.tol);
    let object = match cmd {
        AlgebraCommand::Close(_) => {
            report.verdict("center_dim", center(&a, &s).dim());
            algebra_outcome(&mut report, &a)
        }
        AlgebraCommand::Commutant(_) => algebra_outcome(&mut report, &commutant(&a, &s)),
        AlgebraCommand::Center(_) => algebra_outcome(&mut report, &center(&a, &s)),
        AlgebraCommand::Atoms(_) => {
            let atoms = atomic_projectors(&a, &s)?;
            report.verdict("count", atoms.len()).artifact_list("projector", &atoms);
            None
        }
        AlgebraCommand::Aw(_) => {
            let aw = aw_decomposition(&a, &s)?;
            report.verdict("block_count", aw.blocks.len());
            for (i, b) in aw.blocks.iter().enumerate() {
                report
                    .verdict(&format!("block_{i}_d_left"), b.d_left)
                    .verdict(&format!("block_{i}_d_right"), b.d_right);
            }
            report.artifact("unitary", &aw.unitary);
            None
        }
        AlgebraCommand::Trace { operator, .. } => {
            let m = cx.path_doc::<MatrixDocument>(operator)?.to_matrix()?;
            let aw = aw_decomposition(&commutant(&a, &s), &s)?;
            let traced = trace_over_algebra(&m, &a, &aw)?;
            report.verdict("dim", traced.nrows()).artifact("traced", &traced);
            None
        }
    };
    Ok(Outcome { report, object })
}

fn run_split(cmd: &SplitCommand, cx: &mut Context) -> Result<Outcome> {
    let s = cx.settings;
    let tol = s.tol;
    let mut object = None;
    let mut report;
    match cmd {
        SplitCommand::Make(i) => {
            let chi = cx.doc::<SplitDocument>(&i.input)?.to_map(&tol)?;
            report = Report::new("split make", tol);
            report.verdict("isometry", true).artifact("image_projector", &chi.image_projector());
            object = to_value(&SplitDocument::from_map(&chi));
        }
        SplitCommand::CheckLocal(args) | SplitCommand::CheckStrict(args) => {
            let strict = matches!(cmd, SplitCommand::CheckStrict(_));
            let chi = cx.doc::<SplitDocument>(&args.input.input)?.to_map(&tol)?;
            let a = cx.path_doc::<MatrixDocument>(&args.operator)?.to_matrix()?;
            let side = args.side.into();
            let rep = if strict {
                strictly_local_representative(&chi, &a, side, &tol)?
            } else {
                local_representative(&chi, &a, side, &tol)?
            };
            report = Report::new(if strict { "split check-strict" } else { "split check-local" }, tol);
            report.verdict(if strict { "strictly_local" } else { "local" }, rep.is_some());
            if let Some(r) = &rep {
                report.artifact("representative", r);
            }
        }
        SplitCommand::Cons(args) | SplitCommand::Stloc(args) => {
            let chi = cx.doc::<SplitDocument>(&args.input.input)?.to_map(&tol)?;
            let cons = matches!(cmd, SplitCommand::Cons(_));
            let a = if cons {
                consistent_algebra(&chi, args.side.into(), &tol)
            } else {
                strictly_local_algebra(&chi, args.side.into(), &tol)
            };
            report = Report::new(if cons { "split cons" } else { "split stloc" }, tol);
            object = algebra_outcome(&mut report, &a);
        }
        SplitCommand::Balanced(i) => {
            let chi = cx.doc::<SplitDocument>(&i.input)?.to_map(&tol)?;
            report = Report::new("split balanced", tol);
            report.verdict("balanced", is_balanced(&chi, &s));
        }
        SplitCommand::Lean(i) => {
            let chi = cx.doc::<SplitDocument>(&i.input)?.to_map(&tol)?;
            report = Report::new("split lean", tol);
            report.verdict("balanced", is_balanced(&chi, &s)).verdict("lean", is_lean(&chi, &s));
        }
        SplitCommand::Canonical(i) => {
            let a = cx.doc::<AlgebraDocument>(&i.input)?.to_algebra(&tol)?;
            let chi = canonical_splitting_map(&a, &s)?;
            report = Report::new("split canonical", tol);
            report
                .verdict("d_L", chi.d_l())
                .verdict("d_R", chi.d_r())
                .artifact("isometry", chi.isometry());
            object = to_value(&SplitDocument::from_map(&chi));
        }
        SplitCommand::ComprehendVerify(i) => {
            let (zeta, chi, w) = cx.doc::<ComprehensionDocument>(&i.input)?.parts(&tol)?;
            report = Report::new("split comprehend-verify", tol);
            report
                .verdict("verified", verify_comprehension(&zeta, &chi, &w, &tol)?)
                .verdict("residual", comprehension_residual(&zeta, &chi, &w)?);
        }
        SplitCommand::ComprehendNested { input, big } => {
            let small = cx.doc::<AlgebraDocument>(&input.input)?.to_algebra(&tol)?;
            let big = cx.path_doc::<AlgebraDocument>(big)?.to_algebra(&tol)?;
            let (zeta, chi, w) = comprehension_nested_canonical(&small, &big, &s)?;
            report = Report::new("split comprehend-nested", tol);
            report
                .verdict("verified", verify_comprehension(&zeta, &chi, &w, &tol)?)
                .verdict("d_M", w.d_m)
                .artifact("zeta", zeta.isometry())
                .artifact("chi", chi.isometry())
                .artifact("black_dot", &w.black_dot)
                .artifact("white_dot", &w.white_dot);
            object = to_value(&ComprehensionDocument::new(&zeta, &chi, &w));
        }
        SplitCommand::ComprehendBalanced(i) => {
            let chi = cx.doc::<SplitDocument>(&i.input)?.to_map(&tol)?;
            let (zeta, fwd, bwd) = comprehension_balanced_canonical(&chi, &s)?;
            report = Report::new("split comprehend-balanced", tol);
            report
                .verdict("forward", verify_comprehension(&zeta, &chi, &fwd, &tol)?)
                .verdict("backward", verify_comprehension(&chi, &zeta, &bwd, &tol)?)
                .verdict("d_M_forward", fwd.d_m)
                .verdict("d_M_backward", bwd.d_m)
                .artifact("zeta", zeta.isometry());
            object = Some(serde_json::json!({
                "forward": ComprehensionDocument::new(&zeta, &chi, &fwd),
                "backward": ComprehensionDocument::new(&chi, &zeta, &bwd),
            }));
        }
        SplitCommand::Decompose(i) => {
            let chi = cx.doc::<SplitDocument>(&i.input)?.to_map(&tol)?;
            report = Report::new("split decompose", tol);
            let balanced = is_balanced(&chi, &s);
            report.verdict("balanced", balanced);
            if balanced {
                let dec = balanced_decomposition(&chi, &s)?;
                report
                    .verdict("block_count", dec.blocks.len())
                    .artifact("zeta", dec.zeta.isometry());
                for (k, b) in dec.blocks.iter().enumerate() {
                    report
                        .verdict(&format!("schmidt_rank_{k}"), b.rank())
                        .artifact(&format!("projector_{k}"), &b.projector);
                }
                let lean = is_lean(&chi, &s);
                report.verdict("lean", lean);
                if lean {
                    let l = lean_decomposition(&chi, &s)?;
                    report.artifact("u_left", &l.u_left).artifact("u_right", &l.u_right);
                }
            }
        }
    }
    Ok(Outcome { report, object })
}

fn run_channel(cmd: &ChannelCommand, cx: &mut Context) -> Result<Outcome> {
    let s = cx.settings;
    let tol = s.tol;
    let mut object = None;
    let mut report;
    match cmd {
        ChannelCommand::Validate(i) => {
            let e = cx.doc::<ChannelDocument>(&i.input)?.to_channel(&tol)?;
            let rank = stinespring(&e, true, &tol).d_env;
            report = Report::new("channel validate", tol);
            report
                .verdict("valid", true)
                .verdict("kraus_count", e.kraus().len())
                .verdict("choi_rank", rank)
                .artifact("choi", e.choi());
            object = to_value(&ChannelDocument::from_channel(&e));
        }
        ChannelCommand::Stinespring { input, minimal } => {
            let e = cx.doc::<ChannelDocument>(&input.input)?.to_channel(&tol)?;
            let d = stinespring(&e, *minimal, &tol);
            let rank = if d.minimal { d.d_env } else { stinespring(&e, true, &tol).d_env };
            report = Report::new("channel stinespring", tol);
            report
                .verdict("d_env", d.d_env)
                .verdict("choi_rank", rank)
                .artifact("isometry", &d.isometry);
        }
        ChannelCommand::ChiTrace { input, rho } => {
            let chi = cx.doc::<SplitDocument>(&input.input)?.to_map(&tol)?;
            let rho = cx.path_doc::<MatrixDocument>(rho)?.to_matrix()?;
            let out = chi_trace(&chi, &rho)?;
            let preserved = (out.trace() - rho.trace()).norm() <= tol.scaled(rho.norm());
            report = Report::new("channel chi-trace", tol);
            report.verdict("trace_preserved", preserved).artifact("traced", &out);
        }
        ChannelCommand::Semicausal(args) => {
            let (e, chi_a, chi_b) = load_pair(args, cx)?;
            let reduced = schroedinger_semicausal(&e, &chi_a, &chi_b, &s)?;
            report = Report::new("channel semicausal", tol);
            report.verdict("semicausal", reduced.is_some());
            if let Some(r) = &reduced {
                report.artifact_list("reduced_kraus", r.kraus());
                object = to_value(&ChannelDocument::from_channel(r));
            }
        }
        ChannelCommand::Semilocalise(args) => {
            let (e, chi_a, chi_b) = load_pair(args, cx)?;
            let sl = semi_localise(&e, &chi_a, &chi_b, &s)?;
            report = Report::new("channel semilocalise", tol);
            report
                .verdict("verified", verify_semi_localisation(&e, &sl, &chi_a, &tol)?)
                .verdict("d_V", sl.d_v)
                .verdict("d_U", sl.d_u)
                .artifact("zeta_B", sl.zeta_b.isometry())
                .artifact("E1", &sl.e1)
                .artifact("T", &sl.e2);
            object = to_value(&SemiLocalisationDocument::new(&sl));
        }
        ChannelCommand::VerifySl {
            input,
            chi_a,
            decomposition,
        } => {
            let e = cx.doc::<ChannelDocument>(&input.input)?.to_channel(&tol)?;
            let chi_a = cx.path_doc::<SplitDocument>(chi_a)?.to_map(&tol)?;
            let sl = cx
                .path_doc::<SemiLocalisationDocument>(decomposition)?
                .to_semi_localisation(&tol)?;
            report = Report::new("channel verify-sl", tol);
            report.verdict("verified", verify_semi_localisation(&e, &sl, &chi_a, &tol)?);
        }
    }
    Ok(Outcome { report, object })
}

fn load_pair(
    args: &PairArgs,
    cx: &mut Context,
) -> Result<(crate::channels::Channel, crate::splitmap::SplittingMap, crate::splitmap::SplittingMap)> {
    let tol = cx.settings.tol;
    let e = cx.doc::<ChannelDocument>(&args.input.input)?.to_channel(&tol)?;
    let chi_a = cx.path_doc::<SplitDocument>(&args.chi_a)?.to_map(&tol)?;
    let chi_b = cx.path_doc::<SplitDocument>(&args.chi_b)?.to_map(&tol)?;
    Ok((e, chi_a, chi_b))
}

fn write_text(report: &Report, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "command: {}", report.command)?;
    for (k, v) in &report.verdicts {
        match v {
            Verdict::Flag(b) => writeln!(out, "{k}: {b}")?,
            Verdict::Count(n) => writeln!(out, "{k}: {n}")?,
            Verdict::Value(x) => writeln!(out, "{k}: {x:.6e}")?,
        }
    }
    for (k, m) in &report.artifacts {
        writeln!(out, "artifact {k}: {}x{}", m.rows, m.cols)?;
    }
    Ok(())
}

fn write_json_file(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("documents serialise");
    std::fs::write(path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn dispatch(cli: &Cli, cx: &mut Context, stdout: &mut dyn Write) -> Result<i32> {
    let outcome = match &cli.command {
        Command::Fixture { name } => {
            let value = fixture_json(&crate::fixtures::lookup(name)?);
            if let Some(path) = &cli.out {
                write_json_file(path, &value)?;
            } else {
                let text = serde_json::to_string_pretty(&value).expect("documents serialise");
                writeln!(stdout, "{text}").map_err(|e| Error::Io(e.to_string()))?;
            }
            return Ok(EXIT_OK);
        }
        Command::Algebra(cmd) => run_algebra(cmd, cx)?,
        Command::Split(cmd) => run_split(cmd, cx)?,
        Command::Channel(cmd) => run_channel(cmd, cx)?,
    };
    let mut report = outcome.report;
    report.inputs = std::mem::take(&mut cx.inputs);
    if let Some(path) = &cli.out {
        let value = outcome
            .object
            .unwrap_or_else(|| serde_json::to_value(&report).expect("reports serialise"));
        write_json_file(path, &value)?;
    }
    let io = |e: std::io::Error| Error::Io(e.to_string());
    if cli.json {
        let text = serde_json::to_string_pretty(&report).expect("reports serialise");
        writeln!(stdout, "{text}").map_err(io)?;
    } else {
        write_text(&report, stdout).map_err(io)?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FALSE })
}

fn settings_for(cli: &Cli) -> Result<Settings> {
    let mut s = Settings::default();
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(mismatch(format!("tolerance must be positive, got {t}")));
        }
        s.tol = Tolerance::with_absolute(t);
    }
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    Ok(s)
}

/// Parses `args` (program name first) and runs the command.
pub fn run_command<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let result = settings_for(&cli).and_then(|settings| {
        let mut cx = Context {
            settings,
            stdin,
            stdin_used: false,
            inputs: Vec::new(),
        };
        dispatch(&cli, &mut cx, stdout)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}
