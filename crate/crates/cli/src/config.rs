use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use rigidity_core::elliptic_lab::{corpus_entry, GridField};
use rigidity_core::gauge_integral::{field_2d, integrand_1d};
use rigidity_core::matrix_space::{MatrixSubspace, SubspaceFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    AnalyzeSpace,
    Integrate,
    Divergence,
    Regularity,
    Caccioppoli,
    Weyl,
    FullSuite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::AnalyzeSpace => "analyze-space",
            Command::Integrate => "integrate",
            Command::Divergence => "divergence",
            Command::Regularity => "regularity",
            Command::Caccioppoli => "caccioppoli",
            Command::Weyl => "weyl",
            Command::FullSuite => "full-suite",
        }
    }
}

/// Verification suites for rank-1 rigidity, gauge integration and discrete
/// elliptic regularity.
#[derive(Debug, Parser)]
#[command(name = "rigidity", version)]
pub struct Args {
    /// Suite to run.
    #[arg(long, value_enum, default_value = "full-suite")]
    pub command: Command,
    /// Subspace file `{"m", "n", "basis": [[row-major entries], ...]}`; the
    /// conformal 2×2 matrices when omitted.
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Restrict a suite to one corpus entry (an integrand, a vector field or a
    /// grid field, depending on the command).
    #[arg(long)]
    pub corpus: Option<String>,
    /// Coarsest grid size; grid suites also run at 2n−1 and 4n−3.
    #[arg(long, default_value_t = 65)]
    pub grid: usize,
    /// Base gauge scale for the integration suites (defaults to half the domain).
    #[arg(long)]
    pub h: Option<f64>,
    /// Tolerance of the refinement loops (gauge integrals) and of the rank-1
    /// decision (analyze-space).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Mollifier radius.
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    /// Distance of the inner set `U` from the boundary in the Caccioppoli suite.
    #[arg(long, default_value_t = 0.5)]
    pub margin: f64,
    /// Output directory for report.json, checks/*.csv and plots/*.svg.
    #[arg(long, default_value = "rigidity-out")]
    pub out: PathBuf,
    /// Run independent checks on separate threads.
    #[arg(long)]
    pub parallel: bool,
    /// Grid field in CSV form, checked against the inclusion `Du ∈ L` by the
    /// regularity suite.
    #[arg(long)]
    pub field: Option<PathBuf>,
}

/// Validated settings. Everything that can change a measured value is here
/// and enters the settings hash.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub space: Option<SubspaceFile>,
    pub corpus: Option<String>,
    pub grids: [usize; 3],
    pub h: Option<f64>,
    pub tol: Option<f64>,
    pub epsilon: f64,
    pub margin: f64,
    pub seed: u64,
    #[serde(skip)]
    pub field: Option<GridField>,
    pub field_sha256: Option<String>,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub parallel: bool,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        bail!("--{name} must be positive and finite, got {x}");
    }
    Ok(())
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl RunConfig {
    pub fn from_args(args: Args, seed_var: Option<&str>) -> Result<Self> {
        let seed = match seed_var {
            None => 0,
            Some(s) => s
                .trim()
                .parse()
                .with_context(|| format!("RIGIDITY_SEED must be an unsigned integer, got {s:?}"))?,
        };
        if args.grid < 8 {
            bail!("--grid must be at least 8, got {}", args.grid);
        }
        if let Some(h) = args.h {
            positive("h", h)?;
        }
        if let Some(t) = args.tol {
            positive("tol", t)?;
        }
        positive("epsilon", args.epsilon)?;
        positive("margin", args.margin)?;
        if args.margin >= 1.0 {
            bail!(
                "--margin must leave a nonempty inner set of [-1, 1]², got {}",
                args.margin
            );
        }

        let space = match &args.space {
            None => None,
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read subspace file {}", path.display()))?;
                let file = SubspaceFile::parse(&text)
                    .with_context(|| format!("malformed subspace file {}", path.display()))?;
                file.to_subspace()
                    .with_context(|| format!("invalid subspace in {}", path.display()))?;
                Some(file)
            }
        };

        let (field, field_sha256) = match &args.field {
            None => (None, None),
            Some(path) => {
                let bytes = std::fs::read(path)
                    .with_context(|| format!("cannot read grid field {}", path.display()))?;
                let field = GridField::read_csv(bytes.as_slice())
                    .with_context(|| format!("malformed grid field {}", path.display()))?;
                (Some(field), Some(hex(&Sha256::digest(&bytes))))
            }
        };

        if let Some(name) = &args.corpus {
            let known = match args.command {
                Command::Integrate => integrand_1d(name).is_some(),
                Command::Divergence => field_2d(name).is_some(),
                Command::Regularity | Command::Weyl => corpus_entry(name).is_some(),
                Command::AnalyzeSpace | Command::Caccioppoli | Command::FullSuite => {
                    bail!("--corpus is not used by {}", args.command.name())
                }
            };
            if !known {
                bail!("unknown corpus entry {name:?} for {}", args.command.name());
            }
        }

        let n = args.grid;
        Ok(Self {
            command: args.command,
            space,
            corpus: args.corpus,
            grids: [n, 2 * n - 1, 4 * n - 3],
            h: args.h,
            tol: args.tol,
            epsilon: args.epsilon,
            margin: args.margin,
            seed,
            field,
            field_sha256,
            out: args.out,
            parallel: args.parallel,
        })
    }

    /// The subspace under test.
    pub fn subspace(&self) -> MatrixSubspace {
        match &self.space {
            Some(file) => file
                .to_subspace()
                .expect("validated when the config was built"),
            None => MatrixSubspace::conformal(),
        }
    }

    pub fn settings_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("settings serialize to JSON")
    }

    /// SHA-256 of the compact JSON settings.
    pub fn settings_hash(&self) -> String {
        let text =
            serde_json::to_string(&self.settings_json()).expect("settings serialize to JSON");
        hex(&Sha256::digest(text.as_bytes()))
    }
}
