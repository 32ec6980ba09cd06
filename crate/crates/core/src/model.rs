//! Markov sources, the unambiguous-symbol noise model and the hidden Markov
//! process they generate.
//!
//! Symbol `0` is the ambiguous output: hidden state `0` always emits `0`, and
//! hidden state `a ≥ 1` emits `0` with probability `ε_a` and `a` otherwise.
//! Word probabilities are products `⟨τ, E_{w₁}···E_{wₙ} 1⟩` of the per-symbol
//! matrices
//!
//! ```text
//! E_0 = F_0 + Σ_{a≥1} ε_a F_a        E_a = (1 − ε_a) F_a
//! ```
//!
//! where `F_a` keeps only row `a` of the transition matrix.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::info::neg_plogp;
use crate::linalg::{dot, Matrix, PIVOT_TOL};

/// Allowed deviation of a transition row sum from 1.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// A stationary Markov chain on `{0, …, q−1}` with strictly positive
/// transition probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSource {
    transition: Matrix,
    stationary: Vec<f64>,
}

impl MarkovSource {
    /// Validates `transition` and solves for its stationary vector.
    pub fn new(transition: Matrix) -> Result<Self> {
        if !transition.is_square() {
            return Err(Error::Dimension("transition matrix must be square"));
        }
        let q = transition.rows();
        if q < 2 {
            return Err(Error::Dimension("alphabet needs at least two symbols"));
        }
        for i in 0..q {
            let sum: f64 = transition.row(i).iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::NonStochastic { row: i, sum });
            }
        }
        for i in 0..q {
            for (j, &v) in transition.row(i).iter().enumerate() {
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::EntryOutOfRange { row: i, col: j, value: v });
                }
            }
        }
        let stationary = stationary_distribution(&transition)?;
        Ok(Self {
            transition,
            stationary,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn q(&self) -> usize {
        self.transition.rows()
    }

    pub fn transition(&self) -> &Matrix {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }
}

/// Solves `τE = τ, Σ τ = 1` with the last balance equation replaced by the
/// normalisation row.
pub fn stationary_distribution(transition: &Matrix) -> Result<Vec<f64>> {
    let q = transition.rows();
    let mut system = transition.transpose();
    for i in 0..q {
        system[(i, i)] -= 1.0;
    }
    system.row_mut(q - 1).iter_mut().for_each(|v| *v = 1.0);
    let mut rhs = vec![0.0; q];
    rhs[q - 1] = 1.0;
    system.solve_vec(&rhs).map_err(|e| match e {
        Error::Singular { pivot } => Error::SingularSystem { pivot },
        other => other,
    })
}

/// Entropy rate of the source itself, `−Σ_a τ_a Σ_b E_ab log₂ E_ab`.
pub fn markov_entropy_rate(source: &MarkovSource) -> f64 {
    let e = source.transition();
    source
        .stationary()
        .iter()
        .enumerate()
        .map(|(a, &t)| t * e.row(a).iter().map(|&p| neg_plogp(p)).sum::<f64>())
        .sum()
}

/// Erasure probabilities `ε_a = P(Y = 0 | X = a)` for `a = 1..q−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    epsilon: Vec<f64>,
}

impl NoiseSpec {
    pub fn new(epsilon: Vec<f64>) -> Result<Self> {
        for (i, &e) in epsilon.iter().enumerate() {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::EpsilonOutOfRange { index: i + 1, value: e });
            }
        }
        Ok(Self { epsilon })
    }

    /// `ε_1, …, ε_{q−1}`.
    pub fn epsilon(&self) -> &[f64] {
        &self.epsilon
    }
}

/// Where a sampled or enumerated chain starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialDistribution {
    #[default]
    Stationary,
    Uniform,
}

/// The hidden Markov process seen through the unambiguous-symbol channel.
#[derive(Debug, Clone, PartialEq)]
pub struct HmpModel {
    source: MarkovSource,
    noise: NoiseSpec,
    /// `ε` with the `ε_0 = 1` convention prepended.
    eps_full: Vec<f64>,
    /// `E_0, E_1, …, E_{q−1}`.
    symbol_matrices: Vec<Matrix>,
    /// `E_0 1 = (1, ε_1, …, ε_{q−1})`.
    zero_weights: Vec<f64>,
    /// `1 − ε_a`; entry 0 is `1 − ε_0 = 0`.
    emit_scale: Vec<f64>,
}

impl HmpModel {
    /// Builds the model and rejects it if `E_0` is not invertible.
    pub fn new(source: MarkovSource, noise: NoiseSpec) -> Result<Self> {
        let model = Self::new_relaxed(source, noise)?;
        let pivot = model.zero_matrix().min_pivot();
        if pivot < PIVOT_TOL {
            return Err(Error::SingularE0 { pivot });
        }
        Ok(model)
    }

    /// Like [`HmpModel::new`] but without the `E_0` invertibility check.
    ///
    /// Sources with repeated rows (i.i.d. sources in particular) have a
    /// singular `E_0`; the entropy engine still evaluates them correctly, it
    /// is only the convergence theory that needs invertibility.
    pub fn new_relaxed(source: MarkovSource, noise: NoiseSpec) -> Result<Self> {
        let q = source.q();
        if noise.epsilon().len() != q - 1 {
            return Err(Error::Dimension("epsilon must have q - 1 entries"));
        }
        let e = source.transition();
        let mut eps_full = Vec::with_capacity(q);
        eps_full.push(1.0);
        eps_full.extend_from_slice(noise.epsilon());

        let mut symbol_matrices = Vec::with_capacity(q);
        let mut e0 = e.clone();
        for a in 1..q {
            e0.row_mut(a).iter_mut().for_each(|v| *v *= eps_full[a]);
        }
        symbol_matrices.push(e0);
        for a in 1..q {
            let mut ea = Matrix::zeros(q, q);
            for (dst, &src) in ea.row_mut(a).iter_mut().zip(e.row(a)) {
                *dst = (1.0 - eps_full[a]) * src;
            }
            symbol_matrices.push(ea);
        }
        let zero_weights = eps_full.clone();
        let emit_scale = eps_full.iter().map(|&x| 1.0 - x).collect();
        Ok(Self {
            source,
            noise,
            eps_full,
            symbol_matrices,
            zero_weights,
            emit_scale,
        })
    }

    /// Convenience constructor from raw rows and erasure probabilities.
    pub fn from_parts(transition: &[Vec<f64>], epsilon: &[f64]) -> Result<Self> {
        Self::new(
            MarkovSource::from_rows(transition)?,
            NoiseSpec::new(epsilon.to_vec())?,
        )
    }

    pub fn q(&self) -> usize {
        self.source.q()
    }

    pub fn source(&self) -> &MarkovSource {
        &self.source
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn transition(&self) -> &Matrix {
        self.source.transition()
    }

    pub fn stationary(&self) -> &[f64] {
        self.source.stationary()
    }

    /// `(ε_0 = 1, ε_1, …, ε_{q−1})`.
    pub fn eps_full(&self) -> &[f64] {
        &self.eps_full
    }

    pub fn zero_matrix(&self) -> &Matrix {
        &self.symbol_matrices[0]
    }

    pub fn symbol_matrix(&self, a: usize) -> &Matrix {
        &self.symbol_matrices[a]
    }

    pub fn symbol_matrices(&self) -> &[Matrix] {
        &self.symbol_matrices
    }

    /// `E_0 1`.
    pub fn zero_weights(&self) -> &[f64] {
        &self.zero_weights
    }

    pub fn emit_scale(&self) -> &[f64] {
        &self.emit_scale
    }

    /// Support seed `e_j`: row `j` of the transition matrix.
    pub fn seed(&self, j: usize) -> &[f64] {
        self.source.transition().row(j)
    }

    /// `⟨ν, E_a 1⟩`: probability of emitting `a` from belief `ν`.
    #[inline]
    pub fn symbol_prob(&self, nu: &[f64], a: usize) -> f64 {
        if a == 0 {
            dot(nu, &self.zero_weights)
        } else {
            self.emit_scale[a] * nu[a]
        }
    }

    /// `out = vᵀ E_a`, exploiting the single nonzero row of `E_a` for `a ≥ 1`.
    #[inline]
    pub fn advance(&self, v: &[f64], a: usize, out: &mut [f64]) {
        if a == 0 {
            self.symbol_matrices[0].vec_mul_into(v, out);
        } else {
            let w = v[a] * self.emit_scale[a];
            for (o, &e) in out.iter_mut().zip(self.transition().row(a)) {
                *o = w * e;
            }
        }
    }

    pub fn initial_vector(&self, initial: InitialDistribution) -> Vec<f64> {
        match initial {
            InitialDistribution::Stationary => self.stationary().to_vec(),
            InitialDistribution::Uniform => vec![1.0 / self.q() as f64; self.q()],
        }
    }

    /// Output marginal `μ(a) = ⟨τ, E_a 1⟩`.
    pub fn output_marginal(&self) -> Vec<f64> {
        (0..self.q())
            .map(|a| self.symbol_prob(self.stationary(), a))
            .collect()
    }
}

/// A finite output string, optionally paired with the hidden path that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationSequence {
    symbols: Vec<usize>,
    states: Option<Vec<usize>>,
}

impl ObservationSequence {
    pub fn new(symbols: Vec<usize>, q: usize) -> Result<Self> {
        check_symbols(&symbols, q)?;
        Ok(Self {
            symbols,
            states: None,
        })
    }

    pub fn with_states(symbols: Vec<usize>, states: Vec<usize>, q: usize) -> Result<Self> {
        check_symbols(&symbols, q)?;
        if states.len() != symbols.len() {
            return Err(Error::Dimension("hidden state path length differs from symbols"));
        }
        check_symbols(&states, q)?;
        Ok(Self {
            symbols,
            states: Some(states),
        })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn states(&self) -> Option<&[usize]> {
        self.states.as_deref()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

fn check_symbols(symbols: &[usize], q: usize) -> Result<()> {
    if symbols.is_empty() {
        return Err(Error::EmptySequence);
    }
    if let Some((position, &symbol)) = symbols.iter().enumerate().find(|(_, &s)| s >= q) {
        return Err(Error::SymbolOutOfRange { position, symbol, q });
    }
    Ok(())
}

/// `μ(w) = ⟨τ, E_{w₁}···E_{wₙ} 1⟩` by left-to-right vector–matrix products.
pub fn word_probability(model: &HmpModel, word: &[usize]) -> Result<f64> {
    word_probability_from(model, model.stationary(), word)
}

/// Same as [`word_probability`] with an arbitrary starting row vector.
pub fn word_probability_from(model: &HmpModel, initial: &[f64], word: &[usize]) -> Result<f64> {
    check_symbols(word, model.q())?;
    let mut v = initial.to_vec();
    let mut next = vec![0.0; model.q()];
    for &a in word {
        model.advance(&v, a, &mut next);
        core::mem::swap(&mut v, &mut next);
    }
    Ok(v.iter().sum())
}

/// Draws `n` symbols and their hidden states. Deterministic in `seed`.
pub fn sample_sequence(
    model: &HmpModel,
    n: usize,
    seed: u64,
    initial: InitialDistribution,
) -> Result<ObservationSequence> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange { name: "length", value: 0.0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = model.initial_vector(initial);
    let mut state = draw(&mut rng, &start);
    let mut symbols = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    for t in 0..n {
        states.push(state);
        let erased = state == 0 || rng.gen::<f64>() < model.eps_full()[state];
        symbols.push(if erased { 0 } else { state });
        if t + 1 < n {
            state = draw(&mut rng, model.transition().row(state));
        }
    }
    ObservationSequence::with_states(symbols, states, model.q())
}

fn draw<R: Rng>(rng: &mut R, dist: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    dist.len() - 1
}
