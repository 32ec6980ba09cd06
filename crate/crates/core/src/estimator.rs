//! Baum-Welch estimation of the transition matrix and erasure
//! probabilities from a single output string, followed by the entropy
//! engine on the fitted model.
//!
//! Time runs `t = 0..n`. With `m(t)_{kl} = p(y_t | X_t = k) E_{kl}` the
//! recursions are
//!
//! ```text
//! α(t+1) = α(t) m(t)        β(t) = m(t) β(t+1)        β(n) = 1
//! ```
//!
//! and both sides are rescaled by the same constants `c_t = Σ α(t) m(t)`,
//! so `log p(Y) = Σ_t log c_t`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{entropy_rate, EntropyEstimate};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{HmpModel, MarkovSource, NoiseSpec};

/// Unconstrained parameter pair `θ = (E, ε)` handled by EM.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmParams {
    pub transition: Matrix,
    /// `ε_1..ε_{q−1}`
    pub epsilon: Vec<f64>,
}

impl HmmParams {
    pub fn new(transition: Matrix, epsilon: Vec<f64>) -> Result<Self> {
        if !transition.is_square() || transition.rows() < 2 {
            return Err(Error::Dimension("transition matrix must be square with q >= 2"));
        }
        if epsilon.len() + 1 != transition.rows() {
            return Err(Error::Dimension("epsilon must have q - 1 entries"));
        }
        Ok(Self { transition, epsilon })
    }

    pub fn from_model(model: &HmpModel) -> Self {
        Self {
            transition: model.transition().clone(),
            epsilon: model.noise().epsilon().to_vec(),
        }
    }

    /// Random starting point: rows drawn from `U(0.5, 1.5)` and normalised,
    /// erasure probabilities from `U(0.05, 0.25)`.
    pub fn seeded_guess(q: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut transition = Matrix::zeros(q, q);
        for i in 0..q {
            let row = transition.row_mut(i);
            row.iter_mut().for_each(|v| *v = rng.gen_range(0.5..1.5));
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        let epsilon = (1..q).map(|_| rng.gen_range(0.05..0.25)).collect();
        Self { transition, epsilon }
    }

    pub fn q(&self) -> usize {
        self.transition.rows()
    }

    /// `p(y | X = x)` under the unambiguous-symbol channel.
    #[inline]
    pub fn emission(&self, y: usize, x: usize) -> f64 {
        match (y, x) {
            (0, 0) => 1.0,
            (0, x) => self.epsilon[x - 1],
            (y, x) if y == x => 1.0 - self.epsilon[x - 1],
            _ => 0.0,
        }
    }

    fn max_abs_change(&self, other: &HmmParams) -> f64 {
        let eps = self
            .epsilon
            .iter()
            .zip(&other.epsilon)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        self.transition.max_abs_diff(&other.transition).max(eps)
    }

    /// Builds the model, falling back to the relaxed constructor when `E_0`
    /// is singular. The second field carries the rejected condition.
    pub fn to_model(&self) -> Result<(HmpModel, Option<Error>)> {
        let source = MarkovSource::new(self.transition.clone())?;
        let noise = NoiseSpec::new(self.epsilon.clone())?;
        match HmpModel::new(source.clone(), noise.clone()) {
            Ok(m) => Ok((m, None)),
            Err(e @ Error::SingularE0 { .. }) => Ok((HmpModel::new_relaxed(source, noise)?, Some(e))),
            Err(e) => Err(e),
        }
    }
}

/// Scaled forward-backward quantities and posteriors.
#[derive(Debug, Clone)]
pub struct FbState {
    /// `alpha[t]` for `t = 0..=n`, each normalised to sum 1.
    pub alpha: Vec<Vec<f64>>,
    /// `beta[t]` for `t = 0..=n`, scaled with the same constants.
    pub beta: Vec<Vec<f64>>,
    /// `scale[t] = Σ_k (α̂(t) m(t))_k` for `t = 0..n`.
    pub scale: Vec<f64>,
    /// `log₂ p(Y)`.
    pub loglik: f64,
    /// `p(X_t = k | Y)` for `t = 0..n`.
    pub posteriors: Vec<Vec<f64>>,
    /// `p(X_t = k, X_{t+1} = l | Y)` for `t = 0..n−1`.
    pub pair_posteriors: Vec<Matrix>,
}

fn step_matrix(params: &HmmParams, y: usize) -> Matrix {
    let q = params.q();
    let mut m = params.transition.clone();
    for k in 0..q {
        let e = params.emission(y, k);
        m.row_mut(k).iter_mut().for_each(|v| *v *= e);
    }
    m
}

fn check_observations(obs: &[usize], q: usize) -> Result<()> {
    if obs.is_empty() {
        return Err(Error::EmptySequence);
    }
    if let Some((position, &symbol)) = obs.iter().enumerate().find(|(_, &s)| s >= q) {
        return Err(Error::SymbolOutOfRange { position, symbol, q });
    }
    Ok(())
}

pub fn forward_backward(obs: &[usize], params: &HmmParams, initial: &[f64]) -> Result<FbState> {
    let q = params.q();
    check_observations(obs, q)?;
    if initial.len() != q {
        return Err(Error::Dimension("initial distribution must have q entries"));
    }
    let n = obs.len();
    let steps: Vec<Matrix> = (0..q).map(|y| step_matrix(params, y)).collect();

    let init_sum: f64 = initial.iter().sum();
    let mut alpha = Vec::with_capacity(n + 1);
    alpha.push(initial.iter().map(|v| v / init_sum).collect::<Vec<_>>());
    let mut scale = Vec::with_capacity(n);
    for (t, &y) in obs.iter().enumerate() {
        let mut next = steps[y].vec_mul(&alpha[t]);
        let c: f64 = next.iter().sum();
        if !(c > 0.0) {
            return Err(Error::ZeroLikelihood { position: t });
        }
        next.iter_mut().for_each(|v| *v /= c);
        scale.push(c);
        alpha.push(next);
    }

    let mut beta = vec![vec![0.0; q]; n + 1];
    beta[n] = vec![1.0; q];
    for t in (0..n).rev() {
        let mut b = steps[obs[t]].mul_vec(&beta[t + 1]);
        b.iter_mut().for_each(|v| *v /= scale[t]);
        beta[t] = b;
    }

    let posteriors = (0..n)
        .map(|t| alpha[t].iter().zip(&beta[t]).map(|(a, b)| a * b).collect())
        .collect();
    let pair_posteriors = (0..n.saturating_sub(1))
        .map(|t| {
            let m = &steps[obs[t]];
            let mut xi = Matrix::zeros(q, q);
            for k in 0..q {
                for l in 0..q {
                    xi[(k, l)] = alpha[t][k] * m[(k, l)] * beta[t + 1][l] / scale[t];
                }
            }
            xi
        })
        .collect();

    let loglik = scale.iter().map(|&c| libm::log2(c)).sum();
    Ok(FbState {
        alpha,
        beta,
        scale,
        loglik,
        posteriors,
        pair_posteriors,
    })
}

/// Unscaled `α(t)` and `β(t)`, `t = 0..=n`. Underflows for long inputs;
/// meant for short sequences and cross-checks.
pub fn forward_backward_unscaled(
    obs: &[usize],
    params: &HmmParams,
    initial: &[f64],
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let q = params.q();
    check_observations(obs, q)?;
    let n = obs.len();
    let mut alpha = vec![initial.to_vec()];
    for (t, &y) in obs.iter().enumerate() {
        let next = step_matrix(params, y).vec_mul(&alpha[t]);
        alpha.push(next);
    }
    let mut beta = vec![vec![1.0; q]; n + 1];
    for t in (0..n).rev() {
        beta[t] = step_matrix(params, obs[t]).mul_vec(&beta[t + 1]);
    }
    Ok((alpha, beta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmOptions {
    pub max_iters: usize,
    /// Stop once the max-abs parameter change drops below this.
    pub tol: f64,
    /// Parameters are kept inside `[floor, 1 − floor]`.
    pub floor: f64,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tol: 1e-8,
            floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmResult {
    pub params: HmmParams,
    /// `log₂ p(Y)` at the starting point and after every update.
    pub loglik_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Closed-form maximisation of the expected complete-data log-likelihood.
pub fn m_step(obs: &[usize], fb: &FbState, prev: &HmmParams, floor: f64) -> HmmParams {
    let q = prev.q();
    let mut counts = Matrix::zeros(q, q);
    for xi in &fb.pair_posteriors {
        for k in 0..q {
            for l in 0..q {
                counts[(k, l)] += xi[(k, l)];
            }
        }
    }
    let mut transition = prev.transition.clone();
    for k in 0..q {
        let total: f64 = counts.row(k).iter().sum();
        if total > 0.0 {
            let row = transition.row_mut(k);
            for (dst, &c) in row.iter_mut().zip(counts.row(k)) {
                *dst = c / total;
            }
            clip_row(row, floor);
        }
    }

    let mut epsilon = prev.epsilon.clone();
    for a in 1..q {
        let mut erased = 0.0;
        let mut total = 0.0;
        for (&y, post) in obs.iter().zip(&fb.posteriors) {
            total += post[a];
            if y == 0 {
                erased += post[a];
            }
        }
        if total > 0.0 {
            epsilon[a - 1] = (erased / total).clamp(floor, 1.0 - floor);
        }
    }
    HmmParams { transition, epsilon }
}

/// Lifts entries below `floor` to `floor` and rescales the rest so the row
/// still sums to one.
fn clip_row(row: &mut [f64], floor: f64) {
    for _ in 0..row.len() {
        let pinned = row.iter().filter(|&&v| v <= floor).count();
        if row.iter().all(|&v| v >= floor) {
            return;
        }
        let free: f64 = row.iter().filter(|&&v| v > floor).sum();
        let budget = 1.0 - pinned as f64 * floor;
        for v in row.iter_mut() {
            *v = if *v <= floor { floor } else { *v * budget / free };
        }
    }
}

/// EM with a uniform initial state distribution.
pub fn em_fit(obs: &[usize], theta0: &HmmParams, opts: &EmOptions) -> Result<EmResult> {
    if obs.len() < 2 {
        return Err(Error::ParameterOutOfRange { name: "sequence length", value: obs.len() as f64 });
    }
    let q = theta0.q();
    let initial = vec![1.0 / q as f64; q];
    let mut params = theta0.clone();
    let mut fb = forward_backward(obs, &params, &initial)?;
    let mut trace = vec![fb.loglik];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        let next = m_step(obs, &fb, &params, opts.floor);
        iterations += 1;
        let change = next.max_abs_change(&params);
        params = next;
        fb = forward_backward(obs, &params, &initial)?;
        trace.push(fb.loglik);
        if change < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(EmResult {
        params,
        loglik_trace: trace,
        iterations,
        converged,
    })
}

/// EM fit plus the entropy rate of the fitted model.
#[derive(Debug, Clone)]
pub struct SequenceEstimate {
    pub em: EmResult,
    pub entropy: EntropyEstimate,
    /// Set when the fitted model failed the `E_0` invertibility check; the
    /// entropy is then reported without a certified bound.
    pub violation: Option<Error>,
}

pub fn estimate_entropy_from_sequence(
    obs: &[usize],
    theta0: &HmmParams,
    opts: &EmOptions,
    depth: usize,
) -> Result<SequenceEstimate> {
    let em = em_fit(obs, theta0, opts)?;
    let (model, violation) = em.params.to_model()?;
    let mut entropy = entropy_rate(&model, depth)?;
    if violation.is_some() {
        entropy.certified = false;
        entropy.err_bound = f64::INFINITY;
    }
    Ok(SequenceEstimate {
        em,
        entropy,
        violation,
    })
}
