use rand::Rng;
use serde::Serialize;

use super::{KColouredGraph, StepGraphon};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::sampling::{count_indexed, Proportion};
use crate::volume::{MIN_EXPECTED_HITS, PILOT_SAMPLES};

/// Largest number of colourings counted exhaustively per level.
pub const EXHAUSTIVE_COLOURINGS_MAX: u128 = 1 << 22;

/// Membership oracle for a property of [k]-coloured complete graphs.
pub trait ColourProperty: Send + Sync {
    fn name(&self) -> String;
    fn contains(&self, g: &KColouredGraph) -> bool;
}

/// Wraps a closure as a colour property.
pub struct ColourPredicate<F> {
    name: String,
    f: F,
}

impl<F: Fn(&KColouredGraph) -> bool + Send + Sync> ColourPredicate<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F: Fn(&KColouredGraph) -> bool + Send + Sync> ColourProperty for ColourPredicate<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn contains(&self, g: &KColouredGraph) -> bool {
        (self.f)(g)
    }
}

/// No triangle with all three edges in the given colour.
pub struct MonochromaticTriangleFree {
    pub colour: u32,
}

impl ColourProperty for MonochromaticTriangleFree {
    fn name(&self) -> String {
        format!("triangle-free(colour={})", self.colour)
    }

    fn contains(&self, g: &KColouredGraph) -> bool {
        let c = self.colour;
        for a in 0..g.n {
            for b in a + 1..g.n {
                if g.colour(a, b) != c {
                    continue;
                }
                for d in b + 1..g.n {
                    if g.colour(a, d) == c && g.colour(b, d) == c {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: u32,
    pub samples: u64,
    pub hits: u64,
    /// `log_k |P_n| / C(n,2)` from the hit rate.
    pub normalized: f64,
    pub normalized_low: f64,
    pub normalized_high: f64,
    pub exact_count: Option<u128>,
    pub exact_normalized: Option<f64>,
    /// Whether the sampled rate lies within 3 sigma of the exact rate.
    pub within_3_sigma: Option<bool>,
    /// `normalized - Ent(candidate)`.
    pub gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRateReport {
    pub property: String,
    pub k: u32,
    pub seed: u64,
    pub candidate_entropy: Option<f64>,
    pub rows: Vec<GrowthRow>,
}

fn random_colouring<R: Rng>(n: u32, k: u32, rng: &mut R) -> KColouredGraph {
    let e = (n * (n - 1) / 2) as usize;
    KColouredGraph {
        n,
        k,
        colours: (0..e).map(|_| rng.gen_range(1..=k)).collect(),
    }
}

/// Number of colourings of `K_n` with the property, by enumeration.
pub fn count_colourings(property: &dyn ColourProperty, n: u32, k: u32) -> Result<u128> {
    let e = n * n.saturating_sub(1) / 2;
    let total = (k as u128).checked_pow(e).filter(|&t| t <= EXHAUSTIVE_COLOURINGS_MAX).ok_or_else(|| {
        Error::Capacity(format!("{k}^{e} colourings exceed the enumeration limit {EXHAUSTIVE_COLOURINGS_MAX}"))
    })?;
    let mut g = KColouredGraph {
        n,
        k,
        colours: vec![1; e as usize],
    };
    let mut count = 0;
    for _ in 0..total {
        if property.contains(&g) {
            count += 1;
        }
        for c in g.colours.iter_mut() {
            if *c < k {
                *c += 1;
                break;
            }
            *c = 1;
        }
    }
    Ok(count)
}

/// Estimates `log_k |P_n| / C(n,2)` at each level by sampling uniform
/// colourings and compares with the entropy of a candidate limit.
pub fn growth_rate_audit(
    property: &dyn ColourProperty,
    k: u32,
    levels: &[u32],
    samples: u64,
    seed: u64,
    workers: usize,
    candidate: Option<&StepGraphon>,
) -> Result<GrowthRateReport> {
    if k < 2 {
        return Err(Error::Parameter("growth rates need k >= 2".into()));
    }
    if samples == 0 {
        return Err(Error::Parameter("samples must be positive".into()));
    }
    if let Some(w) = candidate {
        if w.k() != k {
            return Err(Error::Parameter(format!("candidate graphon is over [{}], not [{k}]", w.k())));
        }
    }
    let candidate_entropy = candidate.map(StepGraphon::entropy);
    let ln_k = (k as f64).ln();
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        if n < 2 {
            return Err(Error::Parameter("levels must be at least 2".into()));
        }
        let pairs = (n * (n - 1) / 2) as f64;
        let level_seed = derive_seed(seed, n as u64);
        let trial = |rng: &mut rand_chacha::ChaCha8Rng, _: &mut Vec<f64>| property.contains(&random_colouring(n, k, rng));

        let pilot = samples.min(PILOT_SAMPLES);
        let pilot_hits = count_indexed(pilot, derive_seed(level_seed, 0x9110), workers, trial);
        if (pilot_hits as f64 / pilot as f64) * (samples as f64) < MIN_EXPECTED_HITS {
            return Err(Error::Starvation(format!(
                "{} at n={n}: pilot predicts fewer than {MIN_EXPECTED_HITS} hits from {samples} samples",
                property.name()
            )));
        }

        let hits = count_indexed(samples, level_seed, workers, trial);
        let p = Proportion::new(hits, samples);
        let normalize = |rate: f64| 1.0 + rate.ln() / ln_k / pairs;
        let normalized = normalize(p.estimate);
        let exact_count = count_colourings(property, n, k).ok();
        let (exact_normalized, within_3_sigma) = match exact_count {
            Some(count) => {
                let rate = count as f64 / (k as f64).powf(pairs);
                let ok = (p.estimate - rate).abs() <= 3.0 * p.sigma_at(rate);
                (Some(if count == 0 { f64::NEG_INFINITY } else { normalize(rate) }), Some(ok))
            }
            None => (None, None),
        };
        rows.push(GrowthRow {
            n,
            samples,
            hits,
            normalized,
            normalized_low: if p.ci_low > 0.0 { normalize(p.ci_low).max(0.0) } else { 0.0 },
            normalized_high: normalize(p.ci_high).min(1.0),
            exact_count,
            exact_normalized,
            within_3_sigma,
            gap: candidate_entropy.map(|e| normalized - e),
        });
    }
    Ok(GrowthRateReport {
        property: property.name(),
        k,
        seed,
        candidate_entropy,
        rows,
    })
}
