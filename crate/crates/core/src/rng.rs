//! Deterministic, seedable randomness.
//!
//! The generator is xoshiro256** with its 256-bit state expanded from the
//! 64-bit seed by SplitMix64. Substreams are derived from `(seed, label)`:
//! the label is hashed with 64-bit FNV-1a, the hash is multiplied by the
//! golden-ratio constant, added to the seed and passed through the SplitMix64
//! finalizer. The result seeds an independent generator. Output sequences are
//! bit-identical for a given seed within a library version.
//!
//! Primitive samplers:
//! - Poisson: sequential inversion for `lambda <= 10`, Hörmann's PTRS
//!   transformed rejection above that.
//! - Gamma: Marsaglia–Tsang squeeze for `shape >= 1`; smaller shapes are
//!   boosted to `shape + 1` and scaled by `U^(1/shape)`.

use crate::error::{Error, Result};
use crate::special::ln_factorial;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Largest rate handled by Poisson inversion.
pub const POISSON_INVERSION_MAX: f64 = 10.0;

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a hash of a label.
pub fn label_hash(label: &str) -> u64 {
    label.bytes().fold(FNV_OFFSET, |h, b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Seed of the substream named `label` under `seed`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    splitmix_finalize(seed.wrapping_add(label_hash(label).wrapping_mul(GOLDEN)))
}

/// Single-consumer random stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngState {
    seed: u64,
    s: [u64; 4],
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let mut next = || {
            sm = sm.wrapping_add(GOLDEN);
            splitmix_finalize(sm)
        };
        let s = [next(), next(), next(), next()];
        RngState { seed, s }
    }

    /// Independent stream for `(seed, label)`.
    pub fn substream(seed: u64, label: &str) -> Self {
        RngState::new(derive_seed(seed, label))
    }

    /// Independent stream for `(seed, label, index)`, used for replicates.
    pub fn replicate(seed: u64, label: &str, index: u64) -> Self {
        RngState::new(derive_seed(derive_seed(seed, label), &index.to_string()))
    }

    /// Child stream derived from this stream's seed.
    pub fn derive(&self, label: &str) -> Self {
        RngState::substream(self.seed, label)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli trial. Always consumes exactly one uniform.
    pub fn bernoulli(&mut self, p: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("bernoulli p = {p} outside [0, 1]")));
        }
        Ok(self.uniform01() < p)
    }

    pub fn poisson(&mut self, lambda: f64) -> Result<u64> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::invalid(format!("poisson rate {lambda} must be finite and >= 0")));
        }
        if lambda == 0.0 {
            return Ok(0);
        }
        if lambda <= POISSON_INVERSION_MAX {
            Ok(self.poisson_inversion(lambda))
        } else {
            Ok(self.poisson_ptrs(lambda))
        }
    }

    fn poisson_inversion(&mut self, lambda: f64) -> u64 {
        let u = self.uniform01();
        let mut k = 0u64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        // the cdf reaches 1 - 1e-16 well before k = 200 for lambda <= 10
        while u >= cdf && k < 200 {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
        }
        k
    }

    fn poisson_ptrs(&mut self, lambda: f64) -> u64 {
        let slam = lambda.sqrt();
        let loglam = lambda.ln();
        let b = 0.931 + 2.53 * slam;
        let a = -0.059 + 0.02483 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let vr = 0.9277 - 3.6224 / (b - 2.0);
        loop {
            let u = self.uniform01() - 0.5;
            let v = self.uniform01();
            let us = 0.5 - u.abs();
            let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
            if us >= 0.07 && v <= vr {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
            let rhs = -lambda + k * loglam - ln_factorial(k as u64);
            if lhs <= rhs {
                return k as u64;
            }
        }
    }

    /// Standard normal by the Box–Muller transform (one output per call).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform01();
        let u2 = self.uniform01();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn gamma(&mut self, shape: f64, scale: f64) -> Result<f64> {
        if !(shape > 0.0 && shape.is_finite()) || !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!(
                "gamma shape {shape} and scale {scale} must be positive and finite"
            )));
        }
        if shape < 1.0 {
            let g = self.marsaglia_tsang(shape + 1.0);
            let u = 1.0 - self.uniform01();
            return Ok(g * u.powf(1.0 / shape) * scale);
        }
        Ok(self.marsaglia_tsang(shape) * scale)
    }

    fn marsaglia_tsang(&mut self, shape: f64) -> f64 {
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let (x, v) = loop {
                let x = self.standard_normal();
                let v = 1.0 + c * x;
                if v > 0.0 {
                    break (x, v * v * v);
                }
            };
            let u = self.uniform01();
            if u < 1.0 - 0.0331 * x * x * x * x {
                return d * v;
            }
            if u > 0.0 && u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }

    /// Negative binomial NB(r, p) by the Gamma–Poisson mixture.
    ///
    /// Validation oracle only; the construction pipeline never calls it.
    pub fn negbin_oracle(&mut self, r: f64, p: f64) -> Result<u64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("negative binomial r = {r} must be positive")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!("negative binomial p = {p} outside (0, 1)")));
        }
        let lambda = self.gamma(r, p / (1.0 - p))?;
        self.poisson(lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_of(n: usize, mut draw: impl FnMut() -> f64) -> f64 {
        (0..n).map(|_| draw()).sum::<f64>() / n as f64
    }

    #[test]
    fn uniform_range_and_determinism() {
        let mut a = RngState::new(42);
        let mut b = RngState::new(42);
        for _ in 0..1000 {
            let u = a.uniform01();
            assert!((0.0..1.0).contains(&u));
            assert_eq!(u.to_bits(), b.uniform01().to_bits());
        }
    }

    #[test]
    fn uniform_mean() {
        let mut rng = RngState::new(42);
        let n = 100_000;
        let m = mean_of(n, || rng.uniform01());
        assert!((m - 0.5).abs() < 4.0 / (12.0 * n as f64).sqrt());
    }

    #[test]
    fn substreams_differ_and_reproduce() {
        let mut a = RngState::substream(7, "coins");
        let mut b = RngState::substream(7, "locations");
        let mut c = RngState::substream(7, "coins");
        let xa = a.next_u64();
        assert_ne!(xa, b.next_u64());
        assert_eq!(xa, c.next_u64());
        assert_ne!(
            RngState::replicate(7, "rep", 0).next_u64(),
            RngState::replicate(7, "rep", 1).next_u64()
        );
    }

    #[test]
    fn bernoulli_edges_and_rate() {
        let mut rng = RngState::new(1);
        for _ in 0..100 {
            assert!(!rng.bernoulli(0.0).unwrap());
            assert!(rng.bernoulli(1.0).unwrap());
        }
        assert!(rng.bernoulli(-0.1).is_err());
        assert!(rng.bernoulli(1.1).is_err());
        let n = 100_000;
        let m = mean_of(n, || rng.bernoulli(0.3).unwrap() as u8 as f64);
        assert!((m - 0.3).abs() < 4.0 * (0.21 / n as f64).sqrt());
    }

    #[test]
    fn poisson_moments() {
        let mut rng = RngState::new(3);
        assert_eq!(rng.poisson(0.0).unwrap(), 0);
        assert!(rng.poisson(-1.0).is_err());
        assert!(rng.poisson(f64::NAN).is_err());
        assert!(rng.poisson(f64::INFINITY).is_err());
        let n = 100_000;
        let m = mean_of(n, || rng.poisson(3.0).unwrap() as f64);
        assert!((m - 3.0).abs() < 4.0 * (3.0 / n as f64).sqrt());
        let zeros = mean_of(n, || (rng.poisson(0.5).unwrap() == 0) as u8 as f64);
        let p0 = (-0.5f64).exp();
        assert!((zeros - p0).abs() < 4.0 * (p0 * (1.0 - p0) / n as f64).sqrt());
    }

    #[test]
    fn poisson_large_rate_moments() {
        let mut rng = RngState::new(4);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.poisson(37.5).unwrap() as f64).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((m - 37.5).abs() < 4.0 * (37.5 / n as f64).sqrt());
        assert!((v / 37.5 - 1.0).abs() < 0.03);
    }

    #[test]
    fn gamma_moments_and_tail() {
        let mut rng = RngState::new(5);
        assert!(rng.gamma(0.0, 1.0).is_err());
        assert!(rng.gamma(1.0, 0.0).is_err());
        let n = 100_000;
        let m = mean_of(n, || rng.gamma(2.0, 1.0).unwrap());
        assert!((m - 2.0).abs() < 4.0 * (2.0 / n as f64).sqrt());
        let tail = mean_of(n, || (rng.gamma(1.0, 2.0).unwrap() > 2.0) as u8 as f64);
        let e1 = (-1.0f64).exp();
        assert!((tail - e1).abs() < 4.0 * (e1 * (1.0 - e1) / n as f64).sqrt());
        // fractional shape: mean = shape * scale, variance = shape * scale^2
        let m = mean_of(n, || rng.gamma(0.3, 2.0).unwrap());
        assert!((m - 0.6).abs() < 4.0 * (0.3 * 4.0 / n as f64).sqrt());
    }

    #[test]
    fn negbin_oracle_moments() {
        let mut rng = RngState::new(6);
        assert!(rng.negbin_oracle(2.0, 0.0).is_err());
        assert!(rng.negbin_oracle(2.0, 1.0).is_err());
        assert!(rng.negbin_oracle(0.0, 0.5).is_err());
        let n = 100_000;
        // NB(2, 0.5): mean 2, variance r p / (1-p)^2 = 4
        let m = mean_of(n, || rng.negbin_oracle(2.0, 0.5).unwrap() as f64);
        assert!((m - 2.0).abs() < 4.0 * (4.0 / n as f64).sqrt());
        let zeros = mean_of(n, || (rng.negbin_oracle(1.0, 0.5).unwrap() == 0) as u8 as f64);
        assert!((zeros - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
    }
}
