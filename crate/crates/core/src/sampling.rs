//! Seeded, worker-count-independent Monte Carlo kernels and interval
//! statistics.

use rand::Rng;
use serde::Serialize;

use crate::rng::StreamKey;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Counts the sample indices in `0..samples` whose uniform point of
/// `[0,1]^dim` satisfies `hit`. Sample `i` always uses stream `i` of the
/// seed's key, so the count is identical for every `workers` value.
pub fn count_hits<F>(dim: usize, samples: u64, seed: u64, workers: usize, hit: F) -> u64
where
    F: Fn(&[f64]) -> bool + Sync,
{
    count_indexed(samples, seed, workers, |rng, point: &mut Vec<f64>| {
        point.clear();
        point.extend((0..dim).map(|_| rng.gen::<f64>()));
        hit(point)
    })
}

/// Generalised kernel: `trial` receives the stream of its sample index and a
/// reusable scratch vector.
pub fn count_indexed<F>(samples: u64, seed: u64, workers: usize, trial: F) -> u64
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut Vec<f64>) -> bool + Sync,
{
    let key = StreamKey::new(seed);
    let workers = workers.max(1).min(samples.max(1) as usize);
    let chunk = samples.div_ceil(workers as u64);
    let run = |start: u64, end: u64| {
        let mut scratch = Vec::new();
        (start..end).filter(|&i| trial(&mut key.stream(i), &mut scratch)).count() as u64
    };
    if workers == 1 {
        return run(0, samples);
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|w| {
                let start = (w * chunk).min(samples);
                let end = ((w + 1) * chunk).min(samples);
                let run = &run;
                scope.spawn(move || run(start, end))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sampling worker panicked")).sum()
    })
}

/// Sums `value(i)` over sample indices with the same determinism contract.
/// Partial sums are reduced in index order so the float result does not
/// depend on `workers`.
pub fn sum_indexed<F>(samples: u64, seed: u64, workers: usize, value: F) -> (f64, f64)
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    let key = StreamKey::new(seed);
    // fixed block size keeps the reduction tree independent of `workers`
    const BLOCK: u64 = 1024;
    let blocks = samples.div_ceil(BLOCK);
    let block_sum = |b: u64| {
        let (mut s, mut s2) = (0.0, 0.0);
        for i in b * BLOCK..((b + 1) * BLOCK).min(samples) {
            let v = value(&mut key.stream(i));
            s += v;
            s2 += v * v;
        }
        (s, s2)
    };
    let workers = workers.max(1).min(blocks.max(1) as usize);
    let partials: Vec<(f64, f64)> = if workers == 1 {
        (0..blocks).map(block_sum).collect()
    } else {
        let per = blocks.div_ceil(workers as u64);
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers as u64)
                .map(|w| {
                    let block_sum = &block_sum;
                    scope.spawn(move || {
                        (w * per..((w + 1) * per).min(blocks)).map(block_sum).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("sampling worker panicked")).collect()
        })
    };
    partials.into_iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d))
}

/// Wilson score interval for `hits` successes in `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// A binomial proportion with its Wilson 95% interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Plug-in standard error `sqrt(p(1-p)/n)`.
    pub std_error: f64,
}

impl Proportion {
    pub fn new(hits: u64, trials: u64) -> Self {
        let estimate = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        let (ci_low, ci_high) = wilson_interval(hits, trials, Z95);
        let std_error = if trials == 0 {
            0.0
        } else {
            (estimate * (1.0 - estimate) / trials as f64).sqrt()
        };
        Self {
            hits,
            trials,
            estimate,
            ci_low: ci_low.min(estimate),
            ci_high: ci_high.max(estimate),
            std_error,
        }
    }

    /// Standard error under a known true proportion.
    pub fn sigma_at(&self, truth: f64) -> f64 {
        (truth * (1.0 - truth) / self.trials as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hit_counts_do_not_depend_on_workers() {
        let f = |p: &[f64]| p[0] + p[1] < 1.0;
        let one = count_hits(2, 20_001, 5, 1, f);
        for w in [2, 3, 4, 16] {
            assert_eq!(count_hits(2, 20_001, 5, w, f), one);
        }
        let s1 = sum_indexed(5000, 3, 1, |r| r.gen::<f64>());
        let s7 = sum_indexed(5000, 3, 7, |r| r.gen::<f64>());
        assert_eq!(s1.0.to_bits(), s7.0.to_bits());
    }

    #[test]
    fn wilson_matches_reference_values() {
        // 50/100 at z = 1.96: centre 0.5, half-width 0.0961...
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo - 0.403_831).abs() < 1e-5, "{lo}");
        assert!((hi - 0.596_169).abs() < 1e-5, "{hi}");
        let (lo, hi) = wilson_interval(0, 10, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.2 && hi < 0.35);
        let p = Proportion::new(10, 10);
        assert_eq!(p.estimate, 1.0);
        assert_eq!(p.ci_high, 1.0);
    }
}
