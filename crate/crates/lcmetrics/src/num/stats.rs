//! Monte-Carlo accumulators and seeded substreams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Streaming mean/variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
    // raw power sums, for the variance band
    s1: f64,
    s2: f64,
    s3: f64,
    s4: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
        self.s1 += x;
        self.s2 += x * x;
        self.s3 += x * x * x;
        self.s4 += x * x * x * x;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    /// 95% half-width for the mean.
    pub fn mean_half_width(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        1.96 * (self.variance() / self.n as f64).sqrt()
    }

    /// Central fourth moment, from raw power sums.
    fn central_m4(&self) -> f64 {
        let n = self.n as f64;
        let m = self.s1 / n;
        (self.s4 - 4.0 * m * self.s3 + 6.0 * m * m * self.s2 - 4.0 * m * m * m * self.s1
            + n * m * m * m * m)
            / n
    }

    /// 95% half-width for the sample variance (delta method:
    /// Var(S^2) ~ (mu4 - sigma^4)/n).
    pub fn variance_half_width(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        let v = self.variance();
        let mu4 = self.central_m4();
        let var_of_var = (mu4 - v * v).max(0.0) / self.n as f64;
        1.96 * var_of_var.sqrt()
    }
}

/// 95% half-width for a binomial proportion, with a rule-of-three style
/// cushion so zero-count tails still get a usable band.
pub fn proportion_half_width(successes: u64, trials: u64) -> f64 {
    let n = trials as f64;
    let p = successes as f64 / n;
    1.96 * (p * (1.0 - p) / n).sqrt() + 3.0 / n
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

/// Stable 64-bit FNV-1a hash; keeps substream derivation identical across
/// platforms and compiler versions (std's hasher makes no such promise).
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Deterministic RNG substream for (seed, operation id). Distinct operation
/// ids get independent streams of the same generator.
pub fn substream(seed: u64, op_id: &str) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(op_id.as_bytes()));
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn welford_matches_direct() {
        let xs = [1.0, 2.0, 4.0, 8.0, 16.0];
        let mut st = RunningStats::default();
        for &x in &xs {
            st.push(x);
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((st.mean() - mean).abs() < 1e-12);
        assert!((st.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn substreams_differ_and_repeat() {
        let a: f64 = substream(7, "op-a").gen();
        let a2: f64 = substream(7, "op-a").gen();
        let b: f64 = substream(7, "op-b").gen();
        assert_eq!(a, a2);
        assert_ne!(a, b);
    }

    #[test]
    fn zero_count_band_positive() {
        assert!(proportion_half_width(0, 1000) > 0.0);
    }
}
