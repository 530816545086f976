//! Command-line front end: parses group files, dispatches computations to
//! `qplab-core`, emits JSON/TSV/DOT, and runs the bundled verification scenarios.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

pub mod commands;
pub mod scenarios;
pub mod select;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qplab::group::{default_cap, GroupSpec, GroupTable};
use qplab::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qplab", version, about = "p-subgroup posets, replacement posets and their homology")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by all verbs; each verb reads the ones it needs.
#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    /// the prime p
    #[arg(long = "p")]
    pub p: Option<u32>,
    /// a second prime q (Robinson checks)
    #[arg(long = "q")]
    pub q: Option<u32>,
    /// poset kind: sp, ap, bp, iap, isp, x, xi, thevenaz, wa, ws, wb, tx, twa, tws, twb, removal;
    /// for `propagate classical`: as027 or kp314
    #[arg(long)]
    pub kind: Option<String>,
    /// subgroup H as a preset (whole, trivial, derived, alt, altN, even, center, comp:i, stab:k, sylow:p)
    #[arg(long = "H")]
    pub h: Option<String>,
    /// subgroup H by generators, e.g. "(1 2 3);(1 2)(4 5)"
    #[arg(long = "H-gens")]
    pub h_gens: Option<String>,
    /// subgroup K as a preset
    #[arg(long = "K")]
    pub k: Option<String>,
    /// subgroup K by generators
    #[arg(long = "K-gens")]
    pub k_gens: Option<String>,
    /// component L as a preset
    #[arg(long = "L")]
    pub l: Option<String>,
    /// component L by generators
    #[arg(long = "L-gens")]
    pub l_gens: Option<String>,
    /// acting subgroup Q as a preset
    #[arg(long = "Q")]
    pub qsub: Option<String>,
    /// acting subgroup Q by generators
    #[arg(long = "Q-gens")]
    pub q_gens: Option<String>,
    /// group-order cap for closure (default: QPLAB_CAP or 20000)
    #[arg(long)]
    pub cap: Option<usize>,
    /// emit JSON (the default)
    #[arg(long)]
    pub json: bool,
    /// emit TSV where the verb supports it
    #[arg(long)]
    pub tsv: bool,
    /// write the Hasse diagram in DOT format to this path
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// only compute homology up to this degree
    #[arg(long = "degree-limit")]
    pub degree_limit: Option<i32>,
    /// target degree for propagation
    #[arg(long)]
    pub degree: Option<i32>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Order, primes, p-ranks, cores and components of a group
    Group {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Build a poset and export it
    Poset {
        #[command(subcommand)]
        action: PosetAction,
    },
    /// Reduced rational Betti numbers of a poset's order complex
    Homology {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Equivalence and certification checks
    Verify {
        #[command(subcommand)]
        action: VerifyAction,
    },
    /// Subposet fixed by the subgroup given with --H/--H-gens
    Fixed {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Per conjugacy class: fixed subposet sizes and reduced Euler characteristics
    Lefschetz {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Robinson-subgroup checks
    Robinson {
        #[command(subcommand)]
        action: RobinsonAction,
    },
    /// Homology propagation checks
    Propagate {
        #[command(subcommand)]
        action: PropagateAction,
    },
    /// Run bundled verification scenarios: `all`, `list`, or a criterion number
    Scenario {
        #[arg(default_value = "all")]
        name: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum PosetAction {
    Build {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyAction {
    /// Compare Betti profiles of two p-subgroup poset kinds (and, with --fixed, per class)
    Equiv {
        file: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        fixed: bool,
        #[command(flatten)]
        opts: Opts,
    },
    /// Certify a replacement poset against A_p(G)
    Certify {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Compare A_p(L) with the image poset of a component L
    Image {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// If O_p(G) > 1, check that S_p(G) and A_p(G) are acyclic
    Conical {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Subcommand, Debug)]
pub enum RobinsonAction {
    /// Property R0(p) for Q <= L normal in the loaded group
    R0 {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// R0(p) with Q a Sylow q-subgroup of L
    Sylow {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Product assembly over the components with a fixed-point witness
    Lqc {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Local-rank and Sylow criteria
    Criterion {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Orbit divisibility over A_p(G)^Q
    Orbit {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Subcommand, Debug)]
pub enum PropagateAction {
    /// Propagate a class from X u Z into W for a component L and a cyclic p-outer
    Component {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Central-product propagation lemmas (--kind as027 or kp314, --H, --K)
    Classical {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Top-degree homology of A_p(G) when O_p(G) = 1
    Qd {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

/// Errors surfaced by the front end.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "input error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Lib(Error::InvalidSpec(_) | Error::DegreeMismatch { .. } | Error::CapExceeded { .. }) => {
                EXIT_USAGE
            }
            CliError::Lib(_) => EXIT_FAILED,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Reads and validates a group file (1-based cycles in JSON).
pub fn parse_group_file(path: &Path) -> CliResult<GroupSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    GroupSpec::from_json(&text).map_err(|e| match e {
        Error::InvalidSpec(m) => CliError::Lib(Error::InvalidSpec(format!("{}: {m}", path.display()))),
        other => CliError::Lib(other),
    })
}

/// Parses and generates the group, honouring --cap over QPLAB_CAP.
pub fn load_group(path: &Path, opts: &Opts) -> CliResult<GroupTable> {
    let spec = parse_group_file(path)?;
    let cap = opts.cap.unwrap_or_else(default_cap);
    Ok(GroupTable::generate_with_cap(&spec, cap)?)
}

/// What a verb produced: the JSON document, an optional TSV rendering, and whether
/// the verified claim held.
pub struct Outcome {
    pub json: serde_json::Value,
    pub tsv: Option<String>,
    pub ok: bool,
}

impl Outcome {
    pub fn ok(json: serde_json::Value) -> Self {
        Outcome { json, tsv: None, ok: true }
    }

    pub fn checked(json: serde_json::Value, ok: bool) -> Self {
        Outcome { json, tsv: None, ok }
    }

    pub fn with_tsv(mut self, tsv: String) -> Self {
        self.tsv = Some(tsv);
        self
    }
}

/// Parses arguments, runs the verb, prints its output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Command::Scenario { name } = &cli.command {
        return scenarios::run_cli(name);
    }
    let tsv_wanted = opts_of(&cli.command).is_some_and(|o| o.tsv);
    match commands::execute(&cli.command) {
        Ok(out) => {
            match (&out.tsv, tsv_wanted) {
                (Some(t), true) => emit(t),
                _ => emit(&format!("{}\n", serde_json::to_string_pretty(&out.json).expect("json serializes"))),
            }
            if out.ok {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            eprintln!("qplab: {e}");
            e.exit_code()
        }
    }
}

/// Writes to stdout; a reader that closed the pipe early is not an error.
pub(crate) fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn opts_of(c: &Command) -> Option<&Opts> {
    Some(match c {
        Command::Group { opts, .. }
        | Command::Homology { opts, .. }
        | Command::Fixed { opts, .. }
        | Command::Lefschetz { opts, .. } => opts,
        Command::Poset { action: PosetAction::Build { opts, .. } } => opts,
        Command::Verify { action } => match action {
            VerifyAction::Equiv { opts, .. }
            | VerifyAction::Certify { opts, .. }
            | VerifyAction::Image { opts, .. }
            | VerifyAction::Conical { opts, .. } => opts,
        },
        Command::Robinson { action } => match action {
            RobinsonAction::R0 { opts, .. }
            | RobinsonAction::Sylow { opts, .. }
            | RobinsonAction::Lqc { opts, .. }
            | RobinsonAction::Criterion { opts, .. }
            | RobinsonAction::Orbit { opts, .. } => opts,
        },
        Command::Propagate { action } => match action {
            PropagateAction::Component { opts, .. }
            | PropagateAction::Classical { opts, .. }
            | PropagateAction::Qd { opts, .. } => opts,
        },
        Command::Scenario { .. } => return None,
    })
}
