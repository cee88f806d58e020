use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gme_core::criteria::{CriterionParams, Placement};

#[derive(Debug, Parser)]
#[command(name = "gme-detect", version, about = "Certify genuine multipartite entanglement from correlation tensors")]
pub struct Cli {
    /// Worker threads for the parallel parts (default: all cores).
    #[arg(long, global = true, env = "GME_DETECT_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the GME test on one state.
    Verdict(VerdictArgs),
    /// Detection thresholds along a white-noise family.
    Scan(ScanArgs),
    /// Run the seeded oracle battery.
    Selftest(SelftestArgs),
    /// Dump correlation-tensor coefficients.
    Tensor(TensorArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Ghz,
    W,
    #[value(name = "paper_332")]
    Paper332,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlacementArg {
    Disjoint,
    LeadingOverlap,
}

impl From<PlacementArg> for Placement {
    fn from(p: PlacementArg) -> Self {
        match p {
            PlacementArg::Disjoint => Placement::Disjoint,
            PlacementArg::LeadingOverlap => Placement::LeadingOverlap,
        }
    }
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct SourceArgs {
    /// State descriptor JSON file.
    #[arg(long, group = "source")]
    pub input: Option<PathBuf>,

    /// Named state family.
    #[arg(long, value_enum, group = "source")]
    pub family: Option<FamilyName>,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Number of parties (ghz, w).
    #[arg(long, requires = "family")]
    pub n: Option<usize>,

    /// Local dimension (ghz).
    #[arg(long, requires = "family")]
    pub d: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Where the β block sits in three-party block matrices.
    #[arg(long, value_enum, default_value = "disjoint")]
    pub placement: PlacementArg,
    /// Column party (1-based) of the α block for four or more parties.
    #[arg(long)]
    pub column_party: Option<usize>,
}

impl ParamArgs {
    pub fn params(&self) -> anyhow::Result<CriterionParams> {
        let mut p = CriterionParams::new(self.alpha, self.beta, self.gamma)
            .with_placement(self.placement.into());
        if let Some(c) = self.column_party {
            anyhow::ensure!(c >= 1, "--column-party is 1-based");
            p = p.with_column_party(c - 1);
        }
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct VerdictArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// White-noise weight of the named state.
    #[arg(long, requires = "family")]
    pub x: Option<f64>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Extra parameter rows `ALPHA,BETA,GAMMA`; with any rows given the
    /// scan emits one result per row instead of using --alpha/--beta/--gamma.
    #[arg(long = "row", value_name = "ALPHA,BETA,GAMMA", allow_hyphen_values = true)]
    pub rows: Vec<String>,
    /// Restrict to one bipartition, e.g. `1|234`.
    #[arg(long)]
    pub split: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub x_lo: f64,
    #[arg(long, default_value_t = 1.0)]
    pub x_hi: f64,
    /// Threshold tolerance.
    #[arg(long, default_value_t = gme_core::scan::DEFAULT_TOL)]
    pub tol: f64,
    /// Bisect instead of using the closed form.
    #[arg(long)]
    pub bisect: bool,
    /// Emit F(x) = T − K on this many grid points instead of a threshold.
    #[arg(long, value_name = "POINTS")]
    pub curve: Option<usize>,
    /// Add the published comparison lines G1, G2 to curve output.
    #[arg(long, requires = "curve")]
    pub reference: bool,
    /// Output format (default: csv for curves, text otherwise).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Restrict the battery to one system, e.g. `3,3,2`.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TensorArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, requires = "family")]
    pub x: Option<f64>,
    /// Smallest coefficient modulus reported.
    #[arg(long, default_value_t = 1e-12)]
    pub cutoff: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}
