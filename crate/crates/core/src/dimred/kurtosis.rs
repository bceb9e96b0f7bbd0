use super::{ReduceError, Result};

/// Fourth standardized moment of a sample (not excess kurtosis).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct KurtosisIndex(pub f64);

impl KurtosisIndex {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `K = m₄ / m₂²` with biased central moments.
pub fn kurtosis(z: &[f64]) -> Result<KurtosisIndex> {
    if z.len() < 2 {
        return Err(ReduceError::TooFewValues(z.len()));
    }
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let (m2, m4) = z.iter().fold((0.0, 0.0), |(m2, m4), &v| {
        let d = v - mean;
        let d2 = d * d;
        (m2 + d2, m4 + d2 * d2)
    });
    let (m2, m4) = (m2 / n, m4 / n);
    // relative cut so that rounding noise on a constant sample is rejected
    let scale = z.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    if m2 <= (scale * 1e-12).powi(2) {
        return Err(ReduceError::ZeroVariance);
    }
    Ok(KurtosisIndex(m4 / (m2 * m2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_sample() {
        assert_eq!(kurtosis(&[-1.0, 1.0]).unwrap().value(), 1.0);
    }

    #[test]
    fn hand_evaluated() {
        // mean 0, m4 = 2·81/4 = 40.5, m2 = 18/4 = 4.5
        let k = kurtosis(&[0.0, 0.0, 3.0, -3.0]).unwrap().value();
        assert!((k - 2.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(kurtosis(&[4.0, 4.0, 4.0]), Err(ReduceError::ZeroVariance)));
        assert!(matches!(kurtosis(&[1.0]), Err(ReduceError::TooFewValues(1))));
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn bounded_below_by_one_and_affine_invariant(
            z in proptest::collection::vec(-100.0f64..100.0, 2..50),
            a in 0.1f64..10.0,
            b in -10.0f64..10.0,
        ) {
            if let Ok(k) = kurtosis(&z) {
                prop_assert!(k.value() >= 1.0 - 1e-9);
                let shifted: Vec<f64> = z.iter().map(|v| a * v + b).collect();
                let k2 = kurtosis(&shifted).unwrap();
                prop_assert!((k.value() - k2.value()).abs() < 1e-6 * k.value());
            }
        }
    }
}
