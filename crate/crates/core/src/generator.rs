//! Seeded random instances.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Bid, GenerationPmf, Instance, LseId};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n: usize,
    pub w_max: usize,
    pub v_min: Rational,
    pub v_max: Rational,
    pub c_min: Rational,
    pub c_max: Rational,
    /// Sampled rationals have denominators in `1..=denominator_bound`.
    pub denominator_bound: u32,
    pub allow_ties: bool,
    /// Permit `v + c < 0`. Off by default: costs are drawn from
    /// `[max(c_min, -v), c_max]`.
    pub allow_negative_gamma: bool,
    pub max_retries: usize,
}

impl GeneratorConfig {
    pub fn new(seed: u64, n: usize, w_max: usize) -> Self {
        GeneratorConfig {
            seed,
            n,
            w_max,
            v_min: Rational::zero(),
            v_max: Rational::from_integer(4),
            c_min: Rational::from_integer(-1),
            c_max: Rational::from_integer(3),
            denominator_bound: 8,
            allow_ties: false,
            allow_negative_gamma: false,
            max_retries: 1000,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.denominator_bound == 0 {
            return Err(Error::InvalidConfig(
                "denominator bound must be positive".into(),
            ));
        }
        if self.v_min.is_negative() {
            return Err(Error::InvalidConfig("v_min must be non-negative".into()));
        }
        if self.v_min > self.v_max {
            return Err(Error::InvalidConfig("v_min exceeds v_max".into()));
        }
        if self.c_min > self.c_max {
            return Err(Error::InvalidConfig("c_min exceeds c_max".into()));
        }
        Ok(())
    }
}

fn ceil_i64(r: &Rational) -> i64 {
    r.as_big()
        .ceil()
        .to_integer()
        .to_i64()
        .expect("range bound fits i64")
}

fn floor_i64(r: &Rational) -> i64 {
    r.as_big()
        .floor()
        .to_integer()
        .to_i64()
        .expect("range bound fits i64")
}

/// Uniform over `{k/d : lo <= k/d <= hi}` after drawing `d`. Falls back to
/// `lo` when no multiple of `1/d` lands in the range.
fn sample_in(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational, bound: u32) -> Rational {
    let d = i64::from(rng.random_range(1..=bound));
    let scale = Rational::from_integer(d);
    let k_lo = ceil_i64(&(lo * &scale));
    let k_hi = floor_i64(&(hi * &scale));
    if k_lo > k_hi {
        return lo.clone();
    }
    Rational::new(rng.random_range(k_lo..=k_hi), d)
}

fn sample_pmf(rng: &mut ChaCha8Rng, w_max: usize, bound: u32) -> GenerationPmf {
    let mut weights: Vec<i64> = (0..=w_max)
        .map(|_| i64::from(rng.random_range(0..=bound)))
        .collect();
    if weights.iter().all(|&x| x == 0) {
        let slot = rng.random_range(0..=w_max);
        weights[slot] = 1;
    }
    let total: i64 = weights.iter().sum();
    GenerationPmf::new(
        weights
            .into_iter()
            .map(|x| Rational::new(x, total))
            .collect(),
    )
    .expect("normalized weights form a pmf")
}

/// Draws a truthful instance: true types equal the bids.
pub fn generate(config: &GeneratorConfig) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pmf = sample_pmf(&mut rng, config.w_max, config.denominator_bound);
    let bound = config.denominator_bound;
    let mut bids = Vec::with_capacity(config.n);
    let mut gammas = BTreeSet::new();
    for index in 0..config.n {
        let id = LseId(index as u32 + 1);
        let mut attempts = 0;
        let bid = loop {
            let v = sample_in(&mut rng, &config.v_min, &config.v_max, bound);
            let c_lo = if config.allow_negative_gamma {
                config.c_min.clone()
            } else {
                config.c_min.clone().max(-&v)
            };
            if c_lo <= config.c_max {
                let c = sample_in(&mut rng, &c_lo, &config.c_max, bound);
                let bid = Bid::new(id, v, c);
                if config.allow_ties || !gammas.contains(&bid.gamma_hat()) {
                    break bid;
                }
            }
            attempts += 1;
            if attempts >= config.max_retries {
                return Err(Error::RetryExhausted { attempts });
            }
        };
        gammas.insert(bid.gamma_hat());
        bids.push(bid);
    }
    Instance::truthful(pmf, bids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let config = GeneratorConfig::new(42, 12, 8);
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 12);
        assert_eq!(a.max_generation(), 8);
        assert_ne!(a, generate(&GeneratorConfig::new(43, 12, 8)).unwrap());
    }

    #[test]
    fn distinct_gammas_and_ranges() {
        for seed in 0..50 {
            let config = GeneratorConfig::new(seed, 10, 4);
            let inst = generate(&config).unwrap();
            let gammas: BTreeSet<_> = inst.bids().iter().map(Bid::gamma_hat).collect();
            assert_eq!(gammas.len(), 10);
            for bid in inst.bids() {
                assert!(*bid.v_hat() >= config.v_min && *bid.v_hat() <= config.v_max);
                assert!(*bid.c_hat() >= config.c_min && *bid.c_hat() <= config.c_max);
                assert!(!bid.gamma_hat().is_negative());
            }
            assert_eq!(inst.true_types(), Some(inst.bids()));
        }
    }

    #[test]
    fn empty_market() {
        let inst = generate(&GeneratorConfig::new(1, 0, 0)).unwrap();
        assert!(inst.is_empty());
        assert_eq!(inst.pmf().probs(), &[Rational::one()]);
    }

    #[test]
    fn retries_exhaust_on_a_point_range() {
        let mut config = GeneratorConfig::new(3, 2, 1);
        config.v_min = Rational::one();
        config.v_max = Rational::one();
        config.c_min = Rational::zero();
        config.c_max = Rational::zero();
        config.max_retries = 5;
        assert_eq!(
            generate(&config),
            Err(Error::RetryExhausted { attempts: 5 })
        );
        config.allow_ties = true;
        assert_eq!(generate(&config).unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_config() {
        let mut config = GeneratorConfig::new(0, 1, 1);
        config.denominator_bound = 0;
        assert!(matches!(generate(&config), Err(Error::InvalidConfig(_))));
    }
}
