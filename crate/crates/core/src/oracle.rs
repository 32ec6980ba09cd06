//! Brute-force block entropies `S_n` and conditional entropies
//! `G_n = S_n − S_{n−1}`, used to cross-check the truncated series.
//!
//! Words are enumerated depth first, carrying the row vector
//! `π E_{w₁}···E_{w_k}` down the tree, so every `S_1..S_n` comes out of a
//! single traversal and memory stays `O(n q)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::info::neg_plogp;
use crate::model::{HmpModel, InitialDistribution};

/// Default cap on the word length.
pub const DEFAULT_MAX_LENGTH: usize = 14;
/// Cap on the number of leaves `q^n`.
pub const MAX_LEAVES: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    pub initial: InitialDistribution,
    pub max_length: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            initial: InitialDistribution::Stationary,
            max_length: DEFAULT_MAX_LENGTH,
        }
    }
}

/// `S_1..S_n` and `G_2..G_n` in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTrace {
    pub n_max: usize,
    /// `s[k]` is `S_{k+1}`.
    pub s: Vec<f64>,
    /// `g[k]` is `G_{k+2}`.
    pub g: Vec<f64>,
}

impl OracleTrace {
    pub fn joint(&self, n: usize) -> f64 {
        self.s[n - 1]
    }

    pub fn conditional(&self, n: usize) -> f64 {
        self.g[n - 2]
    }
}

pub fn check_size(q: usize, n: usize, opts: &OracleOptions) -> Result<()> {
    let leaves = libm::pow(q as f64, n as f64);
    if n == 0 {
        return Err(Error::ParameterOutOfRange { name: "length", value: 0.0 });
    }
    if n > opts.max_length || leaves > MAX_LEAVES {
        return Err(Error::TooLarge { n, leaves });
    }
    Ok(())
}

/// Contribution to `S_1..S_n` of all words starting with `first`.
///
/// Entry `k` holds the partial sum for `S_{k+1}`. Summing branches in
/// ascending `first` gives exactly [`block_entropies`], which lets callers
/// farm branches out to threads without changing the result.
pub fn branch_entropies(
    model: &HmpModel,
    n: usize,
    first: usize,
    opts: &OracleOptions,
) -> Result<Vec<f64>> {
    check_size(model.q(), n, opts)?;
    if first >= model.q() {
        return Err(Error::SymbolOutOfRange { position: 0, symbol: first, q: model.q() });
    }
    let q = model.q();
    let start = model.initial_vector(opts.initial);
    let mut sums = vec![0.0; n];
    // stack[k] holds the vector after k+1 symbols
    let mut stack = vec![vec![0.0; q]; n];
    model.advance(&start, first, &mut stack[0]);
    descend(model, &mut stack, &mut sums, 0);
    Ok(sums)
}

fn descend(model: &HmpModel, tail: &mut [Vec<f64>], sums: &mut [f64], depth: usize) {
    let p: f64 = tail[0].iter().sum();
    sums[depth] += neg_plogp(p);
    if tail.len() == 1 || p == 0.0 {
        return;
    }
    let (head, rest) = tail.split_at_mut(1);
    for a in 0..model.q() {
        model.advance(&head[0], a, &mut rest[0]);
        descend(model, rest, sums, depth + 1);
    }
}

/// Combines per-branch partial sums (ascending first symbol) into a trace.
pub fn assemble_trace(branches: &[Vec<f64>]) -> OracleTrace {
    let n = branches.first().map_or(0, Vec::len);
    let mut s = vec![0.0; n];
    for b in branches {
        for (acc, v) in s.iter_mut().zip(b) {
            *acc += v;
        }
    }
    let g = s.windows(2).map(|w| w[1] - w[0]).collect();
    OracleTrace { n_max: n, s, g }
}

/// `S_1..S_n` and `G_2..G_n` in one traversal.
pub fn block_entropies(model: &HmpModel, n: usize, opts: &OracleOptions) -> Result<OracleTrace> {
    check_size(model.q(), n, opts)?;
    let branches = (0..model.q())
        .map(|a| branch_entropies(model, n, a, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_trace(&branches))
}

/// `S_n = −Σ_{|w|=n} μ(w) log₂ μ(w)`.
pub fn joint_entropy(model: &HmpModel, n: usize, opts: &OracleOptions) -> Result<f64> {
    Ok(block_entropies(model, n, opts)?.joint(n))
}

/// `G_n = S_n − S_{n−1}`.
pub fn conditional_entropy(model: &HmpModel, n: usize, opts: &OracleOptions) -> Result<f64> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange { name: "length", value: n as f64 });
    }
    Ok(block_entropies(model, n, opts)?.conditional(n))
}
