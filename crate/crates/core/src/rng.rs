//! Counter-based random numbers.
//!
//! Every random value in the crate is a pure function of a 64-bit key and a
//! 128-bit counter, computed with Philox4x32-10. Gaussian variates come from
//! the inverse normal CDF applied to a 52-bit uniform in the open unit
//! interval. No generator state is shared between threads, so Monte Carlo
//! results do not depend on scheduling or thread count.

use statrs::function::erf::erfc_inv;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;
const ROUNDS: usize = 10;

/// Philox4x32 with ten rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Philox4x32 {
    key: [u32; 2],
}

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

impl Philox4x32 {
    pub fn new(key: u64) -> Self {
        Self {
            key: [key as u32, (key >> 32) as u32],
        }
    }

    pub fn from_words(key: [u32; 2]) -> Self {
        Self { key }
    }

    /// Encrypt one counter block.
    pub fn block(&self, counter: [u32; 4]) -> [u32; 4] {
        let mut ctr = counter;
        let mut key = self.key;
        for round in 0..ROUNDS {
            if round > 0 {
                key[0] = key[0].wrapping_add(PHILOX_W0);
                key[1] = key[1].wrapping_add(PHILOX_W1);
            }
            let (hi0, lo0) = mulhilo(PHILOX_M0, ctr[0]);
            let (hi1, lo1) = mulhilo(PHILOX_M1, ctr[2]);
            ctr = [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0];
        }
        ctr
    }

    /// 64 random bits at a (trial, row, column) address.
    #[inline]
    pub fn bits_at(&self, trial: u64, row: u32, column: u32) -> u64 {
        let out = self.block([column, row, trial as u32, (trial >> 32) as u32]);
        u64::from(out[0]) | (u64::from(out[1]) << 32)
    }

    /// Uniform in (0, 1) at a (trial, row, column) address.
    #[inline]
    pub fn uniform_at(&self, trial: u64, row: u32, column: u32) -> f64 {
        bits_to_open_unit(self.bits_at(trial, row, column))
    }

    /// Standard normal at a (trial, row, column) address.
    #[inline]
    pub fn gaussian_at(&self, trial: u64, row: u32, column: u32) -> f64 {
        inverse_normal_cdf(self.uniform_at(trial, row, column))
    }
}

/// Map 64 random bits to the open interval (0, 1) using the top 52 bits.
#[inline]
pub fn bits_to_open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / 4_503_599_627_370_496.0)
}

/// Quantile of the standard normal distribution.
#[inline]
pub fn inverse_normal_cdf(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

/// Sequential stream over a fixed (key, stream) pair.
///
/// Used for auxiliary randomness (test vectors, random parameters, pair
/// subsampling). The key is offset from the caller's seed so streams never
/// alias the measurement-operator address space.
#[derive(Debug, Clone)]
pub struct CounterStream {
    philox: Philox4x32,
    stream: u64,
    index: u64,
}

const STREAM_KEY_OFFSET: u64 = 0x6A09_E667_F3BC_C909;

impl CounterStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            philox: Philox4x32::new(seed ^ STREAM_KEY_OFFSET),
            stream,
            index: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = self.philox.block([
            self.index as u32,
            (self.index >> 32) as u32,
            self.stream as u32,
            (self.stream >> 32) as u32,
        ]);
        self.index += 1;
        u64::from(out[0]) | (u64::from(out[1]) << 32)
    }

    pub fn uniform(&mut self) -> f64 {
        bits_to_open_unit(self.next_u64())
    }

    pub fn gaussian(&mut self) -> f64 {
        inverse_normal_cdf(self.uniform())
    }

    /// Uniform integer in `0..n` (n > 0).
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    /// Vector of i.i.d. standard normals.
    pub fn gaussian_vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.gaussian()).collect()
    }

    /// Uniformly distributed unit vector.
    pub fn unit_vec(&mut self, len: usize) -> Vec<f64> {
        loop {
            let mut v = self.gaussian_vec(len);
            let n = crate::linalg::norm(&v);
            if n > 0.0 {
                crate::linalg::scale(&mut v, 1.0 / n);
                return v;
            }
        }
    }
}
