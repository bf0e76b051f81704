use crate::error::{Error, Result};
use crate::units::to_db;

/// Sorted sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("empirical distribution needs at least one sample"));
        }
        if samples.iter().any(|s| s.is_nan()) {
            return Err(Error::domain("samples must not be NaN"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.n() as f64
    }
}

/// Fraction of samples `<= x`.
pub fn empirical_cdf(dist: &EmpiricalDistribution, x: f64) -> f64 {
    dist.samples.partition_point(|&s| s <= x) as f64 / dist.n() as f64
}

/// `10 log10` of the arithmetic mean of the linear samples.
pub fn mean_db(dist: &EmpiricalDistribution) -> Result<f64> {
    if dist.samples[0] <= 0.0 {
        return Err(Error::domain(format!("dB mean needs positive samples, found {}", dist.samples[0])));
    }
    Ok(to_db(dist.mean()))
}

/// Empirical probability of each `M_h` in `0..=m_s`.
pub fn pmf_of_mh(samples: &[usize], m_s: usize) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::domain("no samples"));
    }
    let mut counts = vec![0usize; m_s + 1];
    for &s in samples {
        if s > m_s {
            return Err(Error::domain(format!("harvesting count {s} exceeds {m_s} cells")));
        }
        counts[s] += 1;
    }
    let n = samples.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn cdf_steps() {
        let d = EmpiricalDistribution::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(d.samples(), &[1.0, 2.0, 3.0]);
        assert_eq!(empirical_cdf(&d, 0.5), 0.0);
        assert_eq!(empirical_cdf(&d, 2.0), 2.0 / 3.0);
        assert_eq!(empirical_cdf(&d, 3.0), 1.0);
        assert_eq!(empirical_cdf(&d, 1e9), 1.0);
        assert!(EmpiricalDistribution::new(vec![]).is_err());
        assert!(EmpiricalDistribution::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn db_of_linear_mean() {
        let d = EmpiricalDistribution::new(vec![1.0, 100.0]).unwrap();
        assert_relative_eq!(mean_db(&d).unwrap(), 17.032_913_781_186_61, max_relative = 1e-12);
        let c = EmpiricalDistribution::new(vec![5.0; 4]).unwrap();
        assert_relative_eq!(mean_db(&c).unwrap(), to_db(5.0), max_relative = 1e-12);
        let one = EmpiricalDistribution::new(vec![20.0]).unwrap();
        assert_eq!(mean_db(&one).unwrap(), to_db(20.0));
        assert!(mean_db(&EmpiricalDistribution::new(vec![0.0, 1.0]).unwrap()).is_err());
    }

    #[test]
    fn pmf_point_mass_and_range() {
        let p = pmf_of_mh(&[7; 9], 10).unwrap();
        assert_eq!(p.len(), 11);
        assert_eq!(p[7], 1.0);
        assert!(pmf_of_mh(&[11], 10).is_err());
    }

    #[test]
    fn pmf_uniform_draws() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let s: Vec<usize> = (0..120_000).map(|_| rng.random_range(4..=15)).collect();
        let p = pmf_of_mh(&s, 20).unwrap();
        for (k, &v) in p.iter().enumerate() {
            if (4..=15).contains(&k) {
                assert!((v - 1.0 / 12.0).abs() < 0.005, "{k}: {v}");
            } else {
                assert_eq!(v, 0.0);
            }
        }
    }

    proptest! {
        #[test]
        fn cdf_monotone(xs in proptest::collection::vec(-1e3f64..1e3, 1..50), a in -2e3f64..2e3, b in -2e3f64..2e3) {
            let d = EmpiricalDistribution::new(xs).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (fl, fh) = (empirical_cdf(&d, lo), empirical_cdf(&d, hi));
            prop_assert!((0.0..=1.0).contains(&fl) && (0.0..=1.0).contains(&fh));
            prop_assert!(fl <= fh);
        }

        #[test]
        fn pmf_sums_to_one(s in proptest::collection::vec(0usize..=20, 1..500)) {
            let p = pmf_of_mh(&s, 20).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
