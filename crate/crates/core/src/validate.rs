//! Collects every violated modelling condition at once, rather than stopping
//! at the first one like the constructors do.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::engine::{build_orbit, contraction_factor, GAMMA_MARGIN};
use crate::linalg::{Matrix, PIVOT_TOL};
use crate::model::{stationary_distribution, HmpModel, MarkovSource, NoiseSpec, ROW_SUM_TOL};

/// Which of the two modelling conditions a violation belongs to.
///
/// Condition (i) covers entry ranges (`0 < E_ij < 1`, `0 < ε_a`); condition
/// (ii) is invertibility of `E_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Shape,
    EntriesAndNoise,
    ZeroMatrixInvertible,
    Contraction,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::Shape => "shape",
            Condition::EntriesAndNoise => "condition (i)",
            Condition::ZeroMatrixInvertible => "condition (ii)",
            Condition::Contraction => "contraction",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub gamma: Option<f64>,
    pub stationary: Option<Vec<f64>>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, condition: Condition, message: String) {
        self.violations.push(Violation { condition, message });
    }
}

pub fn validate(transition: &[Vec<f64>], epsilon: &[f64]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let q = transition.len();
    if q < 2 {
        report.push(Condition::Shape, format!("need at least two symbols, got {q}"));
        return report;
    }
    if transition.iter().any(|r| r.len() != q) {
        report.push(Condition::Shape, String::from("transition matrix must be square"));
        return report;
    }
    if epsilon.len() != q - 1 {
        report.push(
            Condition::Shape,
            format!("epsilon has {} entries, expected {}", epsilon.len(), q - 1),
        );
    }

    for (i, row) in transition.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            report.push(
                Condition::EntriesAndNoise,
                format!("row {i} sums to {sum}, expected 1"),
            );
        }
        for (j, &v) in row.iter().enumerate() {
            if !(v > 0.0 && v < 1.0) {
                report.push(
                    Condition::EntriesAndNoise,
                    format!("transition entry ({i}, {j}) = {v} must lie strictly inside (0, 1)"),
                );
            }
        }
    }
    for (a, &e) in epsilon.iter().enumerate() {
        if !(e > 0.0) {
            report.push(
                Condition::EntriesAndNoise,
                format!("epsilon[{}] = {e} must be positive", a + 1),
            );
        } else if !(e < 1.0) {
            report.push(
                Condition::EntriesAndNoise,
                format!("epsilon[{}] = {e} must be below 1", a + 1),
            );
        }
    }
    if !report.is_valid() {
        return report;
    }

    let e = match Matrix::from_rows(transition) {
        Ok(e) => e,
        Err(err) => {
            report.push(Condition::Shape, format!("{err}"));
            return report;
        }
    };
    match stationary_distribution(&e) {
        Ok(tau) => report.stationary = Some(tau),
        Err(err) => report.push(Condition::EntriesAndNoise, format!("{err}")),
    }

    let (source, noise) = match (MarkovSource::new(e), NoiseSpec::new(epsilon.to_vec())) {
        (Ok(s), Ok(n)) => (s, n),
        (Err(err), _) | (_, Err(err)) => {
            report.push(Condition::EntriesAndNoise, format!("{err}"));
            return report;
        }
    };
    let model = match HmpModel::new_relaxed(source, noise) {
        Ok(m) => m,
        Err(err) => {
            report.push(Condition::Shape, format!("{err}"));
            return report;
        }
    };
    let pivot = model.zero_matrix().min_pivot();
    if pivot < PIVOT_TOL {
        report.push(
            Condition::ZeroMatrixInvertible,
            format!("E0 is not invertible (smallest pivot {pivot:e})"),
        );
    }
    match build_orbit(&model, 0).and_then(|orbit| contraction_factor(&model, &orbit)) {
        Ok(gamma) => {
            report.gamma = Some(gamma);
            if gamma >= 1.0 - GAMMA_MARGIN {
                report.push(
                    Condition::Contraction,
                    format!("gamma = {gamma} is not below 1"),
                );
            }
        }
        Err(err) => report.push(Condition::Contraction, format!("{err}")),
    }
    report
}
