//! Entropy helpers. All quantities are in bits unless converted with
//! [`LogBase`].

/// Unit in which entropies are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    /// Converts a value in bits into this unit.
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            LogBase::Bits => bits,
            LogBase::Nats => bits * core::f64::consts::LN_2,
        }
    }
}

/// `-p log2 p` with the `0 log 0 = 0` convention.
#[inline]
pub fn neg_plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * libm::log2(p)
    } else {
        0.0
    }
}

/// Shannon entropy of a probability vector in bits.
pub fn entropy_bits(dist: &[f64]) -> f64 {
    dist.iter().map(|&p| neg_plogp(p)).sum()
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    neg_plogp(p) + neg_plogp(1.0 - p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mass_contributes_nothing() {
        assert_eq!(neg_plogp(0.0), 0.0);
        assert_eq!(entropy_bits(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn uniform_entropy() {
        assert!((entropy_bits(&[0.25; 4]) - 2.0).abs() < 1e-15);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nats_conversion() {
        assert!((LogBase::Nats.from_bits(1.0) - core::f64::consts::LN_2).abs() < 1e-16);
        assert_eq!(LogBase::Bits.from_bits(1.5), 1.5);
    }
}
