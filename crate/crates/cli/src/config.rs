use std::path::PathBuf;

use clap::Args;
use gapclique_core::ff::PrimeField;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Master seed; each stage derives its own stream from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of groups (or disperser subsets for `compress`).
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Walk length for `amplify` and `walk`.
    #[arg(long, global = true)]
    pub t: Option<usize>,
    /// Output dimension of the bilinear encoding for `vs2clique`.
    #[arg(long, global = true)]
    pub ell: Option<usize>,
    /// Field size p.
    #[arg(long = "field", global = true, default_value_t = 5)]
    pub p: u32,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Number of subsets whose union a disperser must cover.
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// Degree of the expander used by `amplify` (default: complete graph).
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// r defaults to ceil(c log_base k).
    #[arg(long = "c-log", global = true, default_value_t = 1.0)]
    pub c_log: f64,
    #[arg(long = "log-base", global = true, default_value_t = 2.0)]
    pub log_base: f64,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long = "budget-enum", global = true, default_value_t = 10_000_000)]
    pub budget_enum: u128,
    #[arg(
        long = "budget-materialize",
        global = true,
        default_value_t = 1_000_000
    )]
    pub budget_materialize: u128,
    #[arg(long = "budget-oracle", global = true, default_value_t = 50_000_000)]
    pub budget_oracle: u64,
    #[arg(long = "max-retries", global = true, default_value_t = 100)]
    pub max_retries: usize,
    #[arg(long, global = true, conflicts_with = "montecarlo")]
    pub exact: bool,
    #[arg(long, global = true)]
    pub montecarlo: bool,
    /// Use the plain tensor power instead of the walk product in `amplify`.
    #[arg(long, global = true)]
    pub tensor: bool,
    /// Write the produced artifact here; the report then goes to stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub seed: u64,
    pub field: PrimeField,
    pub args: ConfigArgs,
}

impl PipelineConfig {
    pub fn from_args(args: ConfigArgs) -> Result<Self, CliError> {
        let field = PrimeField::new(args.p)?;
        if args.budget_enum == 0 || args.budget_materialize == 0 || args.budget_oracle == 0 {
            return Err(CliError::usage("budgets must be positive"));
        }
        if args.trials == 0 {
            return Err(CliError::usage("--trials must be positive"));
        }
        if let Some(eps) = args.eps {
            if !(0.0..=1.0).contains(&eps) {
                return Err(CliError::usage("--eps must lie in [0, 1]"));
            }
        }
        Ok(PipelineConfig {
            seed: args.seed,
            field,
            args,
        })
    }

    /// Seed for one named stage.
    pub fn stream(&self, label: &str) -> u64 {
        stream_seed(self.seed, label)
    }

    pub fn montecarlo(&self) -> bool {
        self.args.montecarlo
    }
}

/// First 8 bytes (little endian) of `SHA-256(seed_le || label)`.
pub fn stream_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
