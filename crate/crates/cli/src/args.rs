use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "mahler", version, about = "Laurent-property dynamics, Mahler measures and entropies")]
pub struct Cli {
    /// Worker threads for the samplers (default: all cores).
    #[arg(long, global = true, env = "MAHLER_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate a recurrence and dump `n,value` as CSV.
    Orbit(OrbitArgs),
    /// Estimate `m(x_n)` for n = 1..N and dump `n,value,stderr,skipped,samples_used`.
    Mahler(MahlerArgs),
    /// Algebraic, Diophantine and Mahler entropy of a built-in system.
    Entropy(EntropyArgs),
    /// Print named constants to 12 significant figures.
    ClosedForm(ClosedFormArgs),
    /// Mutate a cluster seed.
    Cluster(ClusterArgs),
}

/// Exactly one of a built-in name or a recurrence in text form.
#[derive(Debug, Clone, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct SystemSource {
    /// lyness, rank2:R, markoff, somos4 or hv.
    #[arg(long)]
    pub system: Option<String>,
    /// e.g. "x[n+2]*x[n] = x[n+1]^3 + 1".
    #[arg(long)]
    pub recurrence: Option<String>,
}

impl SystemSource {
    pub fn to_argv(&self) -> Vec<String> {
        match (&self.system, &self.recurrence) {
            (Some(s), _) => vec!["--system".into(), s.clone()],
            (_, Some(r)) => vec!["--recurrence".into(), r.clone()],
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitMode {
    /// Exact fractions.
    Rational,
    /// Laurent polynomials in the initial values.
    Symbolic,
    /// Extended-range floating point.
    Numeric,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub source: SystemSource,
    #[arg(long, value_enum, default_value = "rational")]
    pub mode: OrbitMode,
    /// Initial values x_1..x_N, comma separated (fractions allowed); default all ones.
    #[arg(long, value_delimiter = ',')]
    pub init: Option<Vec<String>>,
    /// Frozen parameter values, comma separated, in alphabetical order of name.
    #[arg(long, value_delimiter = ',')]
    pub params: Option<Vec<String>>,
    /// Number of iterates x_1..x_n.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Term budget per polynomial (symbolic mode).
    #[arg(long, default_value_t = 5_000_000)]
    pub max_terms: usize,
    /// CSV destination; a `.meta.json` sidecar is written next to it.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl OrbitArgs {
    pub fn to_argv(&self) -> Vec<String> {
        let mut v = vec!["orbit".to_string()];
        v.extend(self.source.to_argv());
        v.extend(["--mode".into(), format!("{:?}", self.mode).to_lowercase()]);
        if let Some(init) = &self.init {
            v.extend(["--init".into(), init.join(",")]);
        }
        if let Some(p) = &self.params {
            v.extend(["--params".into(), p.join(",")]);
        }
        v.extend(["--n".into(), self.n.to_string(), "--max-terms".into(), self.max_terms.to_string()]);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Iterate every sampled initial point.
    Direct,
    /// Markoff and Somos-4 only: sample the reduced two-dimensional map.
    Reduced,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MahlerArgs {
    #[command(flatten)]
    pub source: SystemSource,
    #[arg(long, value_enum, default_value = "direct")]
    pub method: Method,
    /// Largest n.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Use the M x ... x M lattice of roots of unity instead of random points.
    #[arg(long)]
    pub lattice: Option<usize>,
    #[arg(long, default_value_t = 0x6d61_686c_6572)]
    pub seed: u64,
    /// Samples with |x_n| below this are skipped.
    #[arg(long, default_value_t = 1e-300)]
    pub zero_threshold: f64,
    /// Frozen parameter as NAME=torus or NAME=INTEGER; unlisted parameters use the torus.
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// Also fit a line to S_n over LO:HI and report the slope.
    #[arg(long)]
    pub fit: Option<String>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl MahlerArgs {
    pub fn to_argv(&self) -> Vec<String> {
        let mut v = vec!["mahler".to_string()];
        v.extend(self.source.to_argv());
        v.extend([
            "--method".into(),
            format!("{:?}", self.method).to_lowercase(),
            "--n".into(),
            self.n.to_string(),
            "--samples".into(),
            self.samples.to_string(),
            "--seed".into(),
            self.seed.to_string(),
            "--zero-threshold".into(),
            format!("{:e}", self.zero_threshold),
        ]);
        if let Some(m) = self.lattice {
            v.extend(["--lattice".into(), m.to_string()]);
        }
        for p in &self.params {
            v.extend(["--param".into(), p.clone()]);
        }
        if let Some(f) = &self.fit {
            v.extend(["--fit".into(), f.clone()]);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    /// Built-in system name.
    #[arg(long)]
    pub system: String,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Also write the JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest n for the Mahler sequence.
    #[arg(long)]
    pub mahler_n: Option<usize>,
    #[arg(long)]
    pub degree_n: Option<usize>,
    #[arg(long)]
    pub height_n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ClosedFormArgs {
    /// smyth, mx4:R, mx5:R, cstar:M, rank2-entropy:R, markoff-x5, somos-x6.
    #[arg(required = true)]
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    /// JSON seed file: {"n": 2, "matrix": [0, 1, -1, 0]}.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    pub seed: Option<PathBuf>,
    /// a2, markoff, somos4 or rank2:R.
    #[arg(long)]
    pub builtin: Option<String>,
    /// 1-based mutation indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sequence: Vec<usize>,
    /// Report the first step at which the seed returns to the start up to relabeling.
    #[arg(long)]
    pub check_period: bool,
    /// Explore all mutation words up to this length and print the degree per depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Write the final seed as JSON.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
