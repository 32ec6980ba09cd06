//! Truncated-series entropy rate for the unambiguous-symbol process.
//!
//! The posterior over hidden states collapses to a seed `e_j` every time an
//! unambiguous symbol `j ≥ 1` is seen, and otherwise moves along the orbit of
//! the zero-symbol belief update
//!
//! ```text
//! Γ₀(ν) = E₀ᵀν / ⟨ν, E₀1⟩
//! ```
//!
//! so the belief distribution lives on the countable set `{Γ₀ᵐ e_j}`. The
//! mass at `Γ₀ᵐ e_j` is `c_{j,m} Φ_j` with
//!
//! ```text
//! c_{j,m} = Π_{i=1..m} ⟨Γ₀^{m−i} e_j, E₀1⟩
//! ```
//!
//! and the seed weights `Φ` solve a small balance system `AΦ = b`. Truncating
//! every series at `N` terms gives `H_N`, which is within `Bγ^{N+1}` of the
//! true entropy rate. The whole computation is `O(N q³)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::info::{neg_plogp, LogBase};
use crate::linalg::{least_squares, LeastSquares, Matrix};
use crate::model::HmpModel;

/// Successive-iterate tolerance for the `Γ₀` fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-14;
/// Iteration cap for the `Γ₀` fixed point.
pub const FIXED_POINT_MAX_ITERS: usize = 100_000;
/// Minimum orbit length scanned when estimating `γ`.
pub const GAMMA_SCAN: usize = 200;
/// `γ` at or above `1 − GAMMA_MARGIN` is treated as non-contracting.
pub const GAMMA_MARGIN: f64 = 1e-12;

/// One step of the zero-symbol belief update.
pub fn gamma_map(model: &HmpModel, nu: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; model.q()];
    gamma_map_into(model, nu, &mut out)?;
    Ok(out)
}

fn gamma_map_into(model: &HmpModel, nu: &[f64], out: &mut [f64]) -> Result<()> {
    let norm = model.symbol_prob(nu, 0);
    if !(norm > 0.0) {
        return Err(Error::ZeroNormalizer);
    }
    model.zero_matrix().vec_mul_into(nu, out);
    out.iter_mut().for_each(|v| *v /= norm);
    Ok(())
}

/// Points `Γ₀ᵐ e_j` and weights `c_{j,m}` for `j = 1..q−1`, `m = 0..=N`.
#[derive(Debug, Clone)]
pub struct SupportOrbit {
    depth: usize,
    /// `points[j-1][m]`
    points: Vec<Vec<Vec<f64>>>,
    /// `coeffs[j-1][m]`
    coeffs: Vec<Vec<f64>>,
    fixed_point: Vec<f64>,
    fixed_point_converged: bool,
}

impl SupportOrbit {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `Γ₀ᵐ e_j`, `j ≥ 1`.
    pub fn point(&self, j: usize, m: usize) -> &[f64] {
        &self.points[j - 1][m]
    }

    /// `c_{j,m}`, `j ≥ 1`.
    pub fn coeff(&self, j: usize, m: usize) -> f64 {
        self.coeffs[j - 1][m]
    }

    pub fn coeffs(&self, j: usize) -> &[f64] {
        &self.coeffs[j - 1]
    }

    /// Limit of the `Γ₀` iteration started from `e_1`.
    pub fn fixed_point(&self) -> &[f64] {
        &self.fixed_point
    }

    /// False if the fixed-point iteration hit its cap; the last iterate is
    /// kept in that case.
    pub fn fixed_point_converged(&self) -> bool {
        self.fixed_point_converged
    }

    fn seeds(&self) -> usize {
        self.points.len()
    }
}

pub fn build_orbit(model: &HmpModel, depth: usize) -> Result<SupportOrbit> {
    let q = model.q();
    let mut points = Vec::with_capacity(q - 1);
    let mut coeffs = Vec::with_capacity(q - 1);
    for j in 1..q {
        let mut pts = Vec::with_capacity(depth + 1);
        let mut cs = Vec::with_capacity(depth + 1);
        let mut v = model.seed(j).to_vec();
        let mut c = 1.0;
        for m in 0..=depth {
            if m > 0 {
                let prev: &Vec<f64> = &pts[m - 1];
                c *= model.symbol_prob(prev, 0);
                let mut next = vec![0.0; q];
                gamma_map_into(model, prev, &mut next)?;
                v = next;
            }
            pts.push(v.clone());
            cs.push(c);
        }
        points.push(pts);
        coeffs.push(cs);
    }

    let mut fp = model.seed(1).to_vec();
    let mut next = vec![0.0; q];
    let mut converged = false;
    for _ in 0..FIXED_POINT_MAX_ITERS {
        gamma_map_into(model, &fp, &mut next)?;
        let change = fp
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        core::mem::swap(&mut fp, &mut next);
        if change < FIXED_POINT_TOL {
            converged = true;
            break;
        }
    }

    Ok(SupportOrbit {
        depth,
        points,
        coeffs,
        fixed_point: fp,
        fixed_point_converged: converged,
    })
}

/// `max_j max_k ⟨Γ₀ᵏ e_j, E₀1⟩` over `k = 0..max(N, 200)` and the fixed
/// point, without the contraction check.
pub fn contraction_factor(model: &HmpModel, orbit: &SupportOrbit) -> Result<f64> {
    let q = model.q();
    let scan = orbit.depth().max(GAMMA_SCAN);
    let mut gamma = model.symbol_prob(orbit.fixed_point(), 0);
    let mut next = vec![0.0; q];
    for j in 1..=orbit.seeds() {
        for m in 0..=orbit.depth() {
            gamma = gamma.max(model.symbol_prob(orbit.point(j, m), 0));
        }
        let mut v = orbit.point(j, orbit.depth()).to_vec();
        for _ in orbit.depth()..scan {
            gamma_map_into(model, &v, &mut next)?;
            core::mem::swap(&mut v, &mut next);
            gamma = gamma.max(model.symbol_prob(&v, 0));
        }
    }
    Ok(gamma)
}

/// Contraction factor `γ`, rejected unless it is below `1`.
pub fn gamma_sup(model: &HmpModel, orbit: &SupportOrbit) -> Result<f64> {
    let gamma = contraction_factor(model, orbit)?;
    if gamma >= 1.0 - GAMMA_MARGIN {
        return Err(Error::GammaNotContracting { gamma });
    }
    Ok(gamma)
}

/// Truncated balance matrix `Â` (`q × (q−1)`).
///
/// Row `i − 1` (`i = 1..q−1`) holds `−δ_ij + Σ_m ⟨Γ₀ᵐ e_j, E_i1⟩ c_{j,m}`,
/// except for `q = 2` where it is identically zero. The last row holds the
/// normalisation sums `Σ_m c_{j,m}`.
pub fn assemble_a(model: &HmpModel, orbit: &SupportOrbit) -> Matrix {
    let q = model.q();
    let mut a = Matrix::zeros(q, q - 1);
    for j in 1..q {
        let cs = orbit.coeffs(j);
        a[(q - 1, j - 1)] = cs.iter().sum();
        if q == 2 {
            continue;
        }
        for i in 1..q {
            let mut s = 0.0;
            for (m, &c) in cs.iter().enumerate() {
                s += model.symbol_prob(orbit.point(j, m), i) * c;
            }
            a[(i - 1, j - 1)] = s - if i == j { 1.0 } else { 0.0 };
        }
    }
    a
}

/// Right-hand side `b = (0, …, 0, 1)ᵀ` of the balance system.
pub fn balance_rhs(q: usize) -> Vec<f64> {
    let mut b = vec![0.0; q];
    b[q - 1] = 1.0;
    b
}

/// Least-squares seed weights `Φ̂ = Â†b`.
pub fn solve_phi(a_hat: &Matrix, b: &[f64]) -> Result<LeastSquares> {
    if a_hat.cols() + 1 != a_hat.rows() {
        return Err(Error::Dimension("balance matrix must be q x (q-1)"));
    }
    least_squares(a_hat, b)
}

/// `B = q/(1−γ) · (1 + q‖Â†‖₁/(1−γ))`.
pub fn bound_constant(q: usize, gamma: f64, pinv_norm: f64) -> f64 {
    let q = q as f64;
    let slack = 1.0 - gamma;
    q / slack * (1.0 + q * pinv_norm / slack)
}

/// `H_N` with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    /// Entropy rate estimate in bits per symbol.
    pub value: f64,
    pub terms: usize,
    pub gamma: f64,
    pub bound_constant: f64,
    /// `Bγ^{N+1}`; infinite when `certified` is false.
    pub err_bound: f64,
    /// Whether `γ < 1` so that `err_bound` holds.
    pub certified: bool,
    pub phi_hat: Vec<f64>,
    pub residual: f64,
    /// `Σ_j Σ_m c_{j,m} Φ̂_j`
    pub normalization: f64,
    pub fixed_point_converged: bool,
}

impl EntropyEstimate {
    pub fn value_in(&self, base: LogBase) -> f64 {
        base.from_bits(self.value)
    }

    pub fn err_bound_in(&self, base: LogBase) -> f64 {
        base.from_bits(self.err_bound)
    }
}

pub fn entropy_rate(model: &HmpModel, depth: usize) -> Result<EntropyEstimate> {
    let q = model.q();
    let orbit = build_orbit(model, depth)?;
    let a_hat = assemble_a(model, &orbit);
    let ls = solve_phi(&a_hat, &balance_rhs(q))?;
    let phi = &ls.solution;

    // fixed order: j, then m, then a
    let mut value = 0.0;
    let mut normalization = 0.0;
    for j in 1..q {
        let mut inner = 0.0;
        for m in 0..=depth {
            let nu = orbit.point(j, m);
            let h: f64 = (0..q).map(|a| neg_plogp(model.symbol_prob(nu, a))).sum();
            inner += h * orbit.coeff(j, m);
        }
        value += inner * phi[j - 1];
        normalization += orbit.coeffs(j).iter().sum::<f64>() * phi[j - 1];
    }

    let gamma = contraction_factor(model, &orbit)?;
    let certified = gamma < 1.0 - GAMMA_MARGIN;
    let (bound_constant, err_bound) = if certified {
        let b = bound_constant(q, gamma, ls.pseudo_inverse.norm_one());
        (b, b * libm::pow(gamma, depth as f64 + 1.0))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };

    Ok(EntropyEstimate {
        value,
        terms: depth,
        gamma,
        bound_constant,
        err_bound,
        certified,
        phi_hat: phi.clone(),
        residual: ls.residual,
        normalization,
        fixed_point_converged: orbit.fixed_point_converged(),
    })
}

/// Depth used to evaluate `B` before solving for the required `N`.
const BOOTSTRAP_DEPTH: usize = 20;

/// Smallest `N` whose certified bound `Bγ^{N+1}` is at most `delta`.
pub fn terms_for_accuracy(model: &HmpModel, delta: f64) -> Result<usize> {
    if !(delta > 0.0) {
        return Err(Error::ParameterOutOfRange { name: "accuracy", value: delta });
    }
    let boot = entropy_rate(model, BOOTSTRAP_DEPTH)?;
    if !boot.certified {
        return Err(Error::GammaNotContracting { gamma: boot.gamma });
    }
    let guess = libm::log(delta / boot.bound_constant) / libm::log(boot.gamma) - 1.0;
    let mut n = if guess > 0.0 { libm::ceil(guess) as usize } else { 0 };
    let bound = |n: usize| entropy_rate(model, n).map(|e| e.err_bound);
    while bound(n)? > delta {
        n += 1;
    }
    while n > 0 && bound(n - 1)? <= delta {
        n -= 1;
    }
    Ok(n)
}
