use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entrate_core::gilbert::FlipMapping;
use entrate_core::oracle::DEFAULT_MAX_LENGTH;
use entrate_core::InitialDistribution;

use crate::commands::{self, EstimateArgs, Output, DEFAULT_TERMS};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "entrate", version, about = "Entropy rate of hidden Markov processes with unambiguous symbols")]
pub struct Cli {
    /// Print a JSON report instead of text
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Initial {
    Stationary,
    Uniform,
}

impl From<Initial> for InitialDistribution {
    fn from(i: Initial) -> Self {
        match i {
            Initial::Stationary => InitialDistribution::Stationary,
            Initial::Uniform => InitialDistribution::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mapping {
    /// epsilon_1 = h
    Direct,
    /// epsilon_1 = 1 - h
    Complement,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model config and list every violated condition
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Truncated-series entropy rate with its error bound
    Entropy(EntropyArgs),
    /// Brute-force block entropies S_n and G_n = S_n - S_(n-1)
    Oracle {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 10)]
        length: usize,
        #[arg(long, value_enum, default_value_t = Initial::Stationary)]
        initial: Initial,
        /// Refuse lengths above this
        #[arg(long, default_value_t = DEFAULT_MAX_LENGTH)]
        max_length: usize,
    },
    /// Sample an observation sequence
    Generate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the hidden states
        #[arg(long)]
        with_states: bool,
        #[arg(long, value_enum, default_value_t = Initial::Stationary)]
        initial: Initial,
    },
    /// Fit a model to a sequence with EM and report its entropy rate
    Estimate {
        #[arg(long)]
        sequence: PathBuf,
        /// Alphabet size; inferred from the largest symbol when omitted
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed_init: u64,
        #[arg(long, default_value_t = 100)]
        terms: usize,
    },
    /// Capacity bounds for the Gilbert channel
    Gilbert {
        #[arg(long = "P")]
        p: f64,
        #[arg(long = "Q")]
        q: f64,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 100)]
        terms: usize,
        #[arg(long, value_enum, default_value_t = Mapping::Direct)]
        mapping: Mapping,
    },
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Truncation depth N (default 50)
    #[arg(long, conflicts_with = "accuracy")]
    pub terms: Option<usize>,
    /// Smallest N whose error bound is at most this
    #[arg(long)]
    pub accuracy: Option<f64>,
    /// 2 or e; overrides the config
    #[arg(long)]
    pub log_base: Option<String>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Entropy(_) => "entropy",
            Command::Oracle { .. } => "oracle",
            Command::Generate { .. } => "generate",
            Command::Estimate { .. } => "estimate",
            Command::Gilbert { .. } => "gilbert",
        }
    }

    pub fn run(&self) -> CliResult<Output> {
        match self {
            Command::Validate { model } => commands::run_validate(model),
            Command::Entropy(a) => {
                let terms = a.terms.or((a.accuracy.is_none()).then_some(DEFAULT_TERMS));
                commands::run_entropy(&a.model, terms, a.accuracy, a.log_base.as_deref())
            }
            Command::Oracle {
                model,
                length,
                initial,
                max_length,
            } => commands::run_oracle(model, *length, (*initial).into(), *max_length),
            Command::Generate {
                model,
                length,
                seed,
                out,
                with_states,
                initial,
            } => commands::run_generate(model, *length, *seed, out, *with_states, (*initial).into()),
            Command::Estimate {
                sequence,
                q,
                max_iters,
                tol,
                seed_init,
                terms,
            } => commands::run_estimate(&EstimateArgs {
                sequence: sequence.clone(),
                q: *q,
                max_iters: *max_iters,
                tol: *tol,
                seed_init: *seed_init,
                terms: *terms,
            }),
            Command::Gilbert {
                p,
                q,
                h,
                terms,
                mapping,
            } => {
                let mapping = match mapping {
                    Mapping::Direct => FlipMapping::Direct,
                    Mapping::Complement => FlipMapping::Complement,
                };
                commands::run_gilbert(*p, *q, *h, *terms, mapping)
            }
        }
    }
}
