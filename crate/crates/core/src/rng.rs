//! Reproducible random streams and the parallel trial runner.
//!
//! Every trial draws from its own stream keyed by `(seed, family, trial)`, so
//! the numbers a trial sees never depend on which worker runs it. Results are
//! collected in trial order and reduced sequentially, which makes every
//! aggregate bit-identical across worker counts.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// splitmix64 finalizer, used to decorrelate `(seed, family)` pairs.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A counter-addressed random stream.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, family: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ mix(family)));
        rng.set_stream(index);
        Self { rng }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on `(0, 1]`; safe to take logarithms of.
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Owns the worker pool and hands each trial its stream.
pub struct TrialRunner {
    seed: u64,
    workers: usize,
    pool: rayon::ThreadPool,
}

impl TrialRunner {
    pub fn new(seed: u64, workers: usize) -> Self {
        let workers = workers.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool construction");
        Self { seed, workers, pool }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Runs `trials` independent tasks and returns their outputs in trial order.
    ///
    /// `family` separates unrelated experiments that share a master seed.
    pub fn run<T, F>(&self, family: u64, trials: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut RandomStream, usize) -> T + Sync + Send,
    {
        let seed = self.seed;
        self.pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map(|i| {
                    let mut stream = RandomStream::new(seed, family, i as u64);
                    task(&mut stream, i)
                })
                .collect()
        })
    }

    /// Parallel map over a slice of inputs without randomness.
    pub fn map<I, T, F>(&self, inputs: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        self.pool.install(|| inputs.par_iter().map(&f).collect())
    }
}

/// Stable 64-bit tag for naming stream families from text.
pub fn family_tag(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}
