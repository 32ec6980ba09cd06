//! Capacity bounds for the Gilbert burst-error channel.
//!
//! The channel state is a two-state Markov chain (good `G`, bad `B`) with
//! `P = P(G→B)` and `Q = P(B→G)`. The noise `Z_n` in `Y_n = X_n ⊕ Z_n` is
//! zero in the good state, so `{Z_n}` is the output of a Z-channel driven by
//! the state chain: a two-symbol hidden Markov process with one unambiguous
//! symbol. The capacity is `1 − H(Z)`.

use crate::engine::{entropy_rate, EntropyEstimate};
use crate::error::{Error, Result};
use crate::model::{HmpModel, MarkovSource, NoiseSpec};

/// How the bad-state parameter `h` becomes the erasure probability `ε_1`
/// of the noise process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlipMapping {
    /// `ε_1 = h`.
    #[default]
    Direct,
    /// `ε_1 = 1 − h`: `h` read as `P(Z = 1 | B)`.
    Complement,
}

impl FlipMapping {
    pub fn epsilon(self, h: f64) -> f64 {
        match self {
            FlipMapping::Direct => h,
            FlipMapping::Complement => 1.0 - h,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GilbertChannel {
    /// Good → bad transition probability.
    pub p: f64,
    /// Bad → good transition probability.
    pub q: f64,
    /// Bad-state flip parameter.
    pub h: f64,
    /// Truncation depth for the entropy series.
    pub terms: usize,
    pub mapping: FlipMapping,
}

impl GilbertChannel {
    pub fn new(p: f64, q: f64, h: f64, terms: usize) -> Result<Self> {
        for (name, v) in [("P", p), ("Q", q), ("h", h)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::ParameterOutOfRange { name, value: v });
            }
        }
        Ok(Self {
            p,
            q,
            h,
            terms,
            mapping: FlipMapping::Direct,
        })
    }

    pub fn with_mapping(mut self, mapping: FlipMapping) -> Self {
        self.mapping = mapping;
        self
    }
}

/// The noise process `{Z_n}` as a `q = 2` model.
pub fn gilbert_noise_model(p: f64, q: f64, h: f64, mapping: FlipMapping) -> Result<HmpModel> {
    for (name, v) in [("P", p), ("Q", q), ("h", h)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::ParameterOutOfRange { name, value: v });
        }
    }
    let source = MarkovSource::from_rows(&[
        alloc::vec![1.0 - p, p],
        alloc::vec![q, 1.0 - q],
    ])?;
    HmpModel::new(source, NoiseSpec::new(alloc::vec![mapping.epsilon(h)])?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityBounds {
    /// `1 + H_N − Bγ^{N+1}`
    pub lower: f64,
    /// `1 + H_N + Bγ^{N+1}`
    pub upper: f64,
    /// `1 − H_N − Bγ^{N+1}`: lower bound on the capacity `1 − H(Z)`.
    pub corrected_lower: f64,
    /// `1 − H_N + Bγ^{N+1}`
    pub corrected_upper: f64,
    pub entropy: EntropyEstimate,
}

impl CapacityBounds {
    pub fn entropy_hn(&self) -> f64 {
        self.entropy.value
    }

    pub fn err_bound(&self) -> f64 {
        self.entropy.err_bound
    }
}

pub fn capacity_bounds(channel: &GilbertChannel) -> Result<CapacityBounds> {
    let model = gilbert_noise_model(channel.p, channel.q, channel.h, channel.mapping)?;
    let entropy = entropy_rate(&model, channel.terms)?;
    if !entropy.certified {
        return Err(Error::GammaNotContracting { gamma: entropy.gamma });
    }
    let hn = entropy.value;
    let w = entropy.err_bound;
    Ok(CapacityBounds {
        lower: 1.0 + hn - w,
        upper: 1.0 + hn + w,
        corrected_lower: 1.0 - hn - w,
        corrected_upper: 1.0 - hn + w,
        entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_matches_two_state_setup() {
        let m = gilbert_noise_model(0.2, 0.25, 0.02, FlipMapping::Direct).unwrap();
        assert_eq!(m.transition().to_rows(), alloc::vec![alloc::vec![0.8, 0.2], alloc::vec![0.25, 0.75]]);
        assert_eq!(m.noise().epsilon(), &[0.02]);
    }

    #[test]
    fn tiny_flip_parameter_stays_finite() {
        let ch = GilbertChannel::new(0.2, 0.25, 1e-6, 100).unwrap();
        let b = capacity_bounds(&ch).unwrap();
        assert!(b.lower.is_finite() && b.upper.is_finite());
        assert!(b.entropy_hn().is_finite());
    }

    #[test]
    fn channel_h_values_pass_validation() {
        for h in [0.02, 0.04, 0.06, 0.08, 0.1] {
            let m = gilbert_noise_model(0.2, 0.25, h, FlipMapping::Direct).unwrap();
            let r = crate::validate::validate(&m.transition().to_rows(), m.noise().epsilon());
            assert!(r.is_valid(), "h={h}: {:?}", r.violations);
        }
    }

    #[test]
    fn range_checked() {
        assert!(GilbertChannel::new(0.0, 0.25, 0.1, 10).is_err());
        assert!(gilbert_noise_model(0.2, 1.0, 0.1, FlipMapping::Direct).is_err());
    }

    #[test]
    fn width_is_twice_the_bound() {
        for h in [0.02, 0.04, 0.06, 0.08, 0.1] {
            let b = capacity_bounds(&GilbertChannel::new(0.2, 0.25, h, 60).unwrap()).unwrap();
            assert!(b.lower <= b.upper);
            assert!(((b.upper - b.lower) - 2.0 * b.err_bound()).abs() < 1e-12);
            assert!(b.corrected_lower >= -b.err_bound() && b.corrected_upper <= 1.0 + b.err_bound());
        }
    }

    #[test]
    fn more_terms_never_widen() {
        let mut prev = f64::INFINITY;
        for n in [5, 10, 20, 40, 80] {
            let b = capacity_bounds(&GilbertChannel::new(0.2, 0.25, 0.06, n).unwrap()).unwrap();
            let width = b.upper - b.lower;
            assert!(width <= prev);
            prev = width;
        }
    }

    #[test]
    fn entropy_continuous_in_h() {
        let mut prev = None;
        let mut h = 0.02;
        while h <= 0.1 + 1e-12 {
            let b = capacity_bounds(&GilbertChannel::new(0.2, 0.25, h, 100).unwrap()).unwrap();
            if let Some(p) = prev {
                let d: f64 = b.entropy_hn() - p;
                assert!(d.abs() < 0.05);
            }
            prev = Some(b.entropy_hn());
            h += 0.02;
        }
    }
}
