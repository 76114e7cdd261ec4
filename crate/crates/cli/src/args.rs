use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "lacuna",
    version,
    about = "Small cancellation and Cayley-ball geometry toolkit"
)]
pub struct Cli {
    /// Worker threads (default: available parallelism). Reports do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Check the classical C'(mu) condition, overall and per tier prefix.
    CheckSc(CheckSc),
    /// List maximal pieces of the symmetrized relator set.
    Pieces(PresArg),
    /// Search for epsilon-pieces relative to a base group.
    EpsPieces(EpsPieces),
    /// Check a graded schedule file against Q(alpha, K).
    GradedCheck(GradedCheck),
    /// Sweep lambda = 1/2, 1/4, ... and report sparseness witnesses.
    SparseCheck(SparseCheck),
    /// Reduce a word with Dehn's algorithm.
    Dehn(Dehn),
    /// Build a Cayley ball and write it to --out.
    Ball(BallCmd),
    /// Word-metric distance in a ball.
    Dist(Pair),
    /// Divergence profile Div(n) on a ball.
    Div(Div),
    /// Gromov four-point and thin-triangle delta on a ball.
    Delta(Delta),
    /// Floyd distance between two vertices, or the largest over all pairs.
    Floyd(Floyd),
    /// Rips complex on the exact core of a ball.
    Rips(Rips),
    /// Least filling of a loop in a Rips complex, with the isoperimetric check.
    Fill(Fill),
    /// Local-to-global hyperbolicity certificate.
    Certify(Certify),
    /// Generate example families.
    #[command(subcommand)]
    Gen(Gen),
    /// Coset enumeration.
    Coset(Coset),
}

#[derive(Args, Debug, Serialize)]
pub struct PresArg {
    #[arg(long)]
    pub pres: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckSc {
    #[arg(long)]
    pub pres: PathBuf,
    #[arg(long, default_value = "1/6")]
    pub mu: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    /// Dehn's algorithm; needs a C'(mu) presentation with mu <= 1/6.
    Dehn,
    /// The free group on the alphabet; relators must be absent.
    Free,
    /// Free abelian group; the relators must be exactly the commutators.
    Abelian,
    /// Finite group via coset enumeration.
    Coset,
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value = "dehn")]
    pub oracle: OracleKind,
    /// Small-cancellation parameter for the Dehn oracle.
    #[arg(long = "oracle-mu", default_value = "1/6")]
    pub oracle_mu: String,
    #[arg(long, default_value_t = 100_000)]
    pub max_cosets: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct EpsPieces {
    #[arg(long)]
    pub pres: PathBuf,
    /// Presentation of the base group.
    #[arg(long)]
    pub base: PathBuf,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[arg(long)]
    pub eps: u32,
    #[arg(long)]
    pub mu: String,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_calls: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct GradedCheck {
    /// JSON file with alpha, k and the tiers.
    #[arg(long)]
    pub schedule: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SparseCheck {
    #[arg(long)]
    pub pres: PathBuf,
    #[arg(long, default_value = "1/64")]
    pub lambda_floor: String,
    /// Window start (default 1).
    #[arg(long)]
    pub lo: Option<u64>,
    /// Window end (default: longest relator).
    #[arg(long)]
    pub hi: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct Dehn {
    #[arg(long)]
    pub pres: PathBuf,
    #[arg(long)]
    pub word: String,
    #[arg(long, default_value = "1/6")]
    pub mu: String,
    /// Print the reduction steps on the error stream.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BallFormat {
    Json,
    Binary,
}

#[derive(Args, Debug, Serialize)]
pub struct BallCmd {
    #[arg(long)]
    pub pres: PathBuf,
    #[arg(long)]
    pub radius: u32,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: BallFormat,
    #[arg(long, default_value_t = 5_000_000)]
    pub max_vertices: usize,
    #[arg(long)]
    pub max_oracle_calls: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct Pair {
    /// Ball file (JSON or binary).
    #[arg(long)]
    pub ball: PathBuf,
    /// Vertex word; "1" is the identity.
    #[arg(long)]
    pub u: String,
    #[arg(long)]
    pub v: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
pub struct Div {
    #[arg(long)]
    pub ball: PathBuf,
    #[arg(long)]
    pub nmax: u32,
    #[arg(long)]
    pub delta: String,
    #[arg(long)]
    pub lambda: String,
    /// Sample this many triples instead of scanning all of them.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: ReportFormat,
    /// Single triple mode: a, b, c as words.
    #[arg(long, num_args = 3, value_names = ["A", "B", "C"])]
    pub triple: Option<Vec<String>>,
}

#[derive(Args, Debug, Serialize)]
pub struct Delta {
    #[arg(long)]
    pub ball: PathBuf,
    #[arg(long, default_value = "1")]
    pub basepoint: String,
    /// Core radius for the four-point scan (default: radius/2).
    #[arg(long)]
    pub scan: Option<u32>,
    /// Also measure thin-triangle delta on the quarter-radius core.
    #[arg(long)]
    pub thin: bool,
    /// Use up to --per-side geodesics per side instead of the canonical one.
    #[arg(long)]
    pub all_geodesics: bool,
    #[arg(long, default_value_t = 4)]
    pub per_side: usize,
    #[arg(long, default_value_t = 100_000_000)]
    pub budget: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct Floyd {
    #[arg(long)]
    pub ball: PathBuf,
    #[arg(long, requires = "v")]
    pub u: Option<String>,
    #[arg(long, requires = "u")]
    pub v: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct Rips {
    #[arg(long)]
    pub ball: PathBuf,
    /// Core radius of the point set (at most radius/2).
    #[arg(long)]
    pub scan: u32,
    #[arg(long)]
    pub d: String,
    /// List edges and triangles, not just counts.
    #[arg(long)]
    pub full: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct Fill {
    #[arg(long)]
    pub ball: PathBuf,
    #[arg(long)]
    pub scan: u32,
    #[arg(long)]
    pub d: String,
    /// Loop vertices as comma-separated words, e.g. "1,a,ab,b".
    #[arg(long = "loop")]
    pub cycle: String,
    /// Hyperbolicity constant for the isoperimetric check (needs d >= 8 delta).
    #[arg(long, default_value = "0")]
    pub delta: String,
    #[arg(long, default_value_t = 16)]
    pub max_cells: u64,
    #[arg(long, default_value_t = 2_000_000)]
    pub max_states: usize,
    #[arg(long, default_value_t = 2)]
    pub slack: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct Certify {
    #[arg(long)]
    pub ball: PathBuf,
    /// Maximal relator length of the presentation behind the ball.
    #[arg(long = "D")]
    pub d: u64,
    #[arg(long = "R")]
    pub r: u32,
    /// Scaled-down constants that exercise the verdict logic only.
    #[arg(long)]
    pub test_constants: bool,
    /// Scan every center whose sub-ball is exact, not just the identity.
    #[arg(long)]
    pub all_centers: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum Gen {
    /// Positive words over {a, b} without B^power subwords.
    Aperiodic {
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 6)]
        power: usize,
    },
    /// Tiered family with lengths 2, 16, 65536, ...
    Lacunary {
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[arg(long, value_enum, default_value = "powers")]
        source: WordSource,
        /// Explicit comma-separated index set instead of 2, 16, 65536.
        #[arg(long)]
        indices: Option<String>,
    },
    /// Central extension: [R_n, a], [R_n, b], R_n^k_n.
    Central {
        /// Comma-separated base relators.
        #[arg(long)]
        base: String,
        /// Comma-separated exponents.
        #[arg(long)]
        k: String,
    },
    /// Finite p-group quotient H_m with m = p^s.
    Gpc {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u32,
        /// Comma-separated c_1, c_2, ...
        #[arg(long)]
        c: String,
        #[arg(long)]
        window: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Truncation of G_n to indices -N..N.
    Gn {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "")]
        c: String,
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Torsion-group parameter schedule.
    Schedule {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 243)]
        n0: u64,
        /// Comma-separated phi(0), phi(1), ...
        #[arg(long)]
        phi: String,
        /// Comma-separated delta estimates indexed from r = 0 (entry 0 unused).
        #[arg(long)]
        delta: String,
        #[arg(long)]
        r_max: usize,
        /// Rows of the exponent table to print.
        #[arg(long, default_value_t = 64)]
        rows: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WordSource {
    /// a^i and b^i alternately.
    Powers,
    /// Thue–Morse prefixes.
    ThueMorse,
}

#[derive(Args, Debug, Serialize)]
pub struct Coset {
    #[arg(long)]
    pub pres: PathBuf,
    /// Comma-separated subgroup generators (default: trivial subgroup).
    #[arg(long, default_value = "")]
    pub subgroup: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_cosets: usize,
}
