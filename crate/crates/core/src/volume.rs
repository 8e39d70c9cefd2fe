//! Volume of `P_n`: seeded Monte Carlo with Wilson intervals, rigorous grid
//! brackets from exact cell classification, normalised-entropy trends and
//! pattern-avoidance counts.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::boxes::CellClass;
use crate::combinatorics::{factorial, for_each_permutation};
use crate::error::{Error, Result};
use crate::extremal::analytic_extremal;
use crate::properties::{Exactness, Pattern, Property};
use crate::rng::derive_seed;
use crate::sampling::{count_hits, Proportion};

/// Default cell/node budget for [`grid_bracket`].
pub const DEFAULT_CELL_BUDGET: u64 = 20_000_000;
/// Expected hits below which sampling is refused.
pub const MIN_EXPECTED_HITS: f64 = 100.0;
/// Samples in the feasibility pre-pass.
pub const PILOT_SAMPLES: u64 = 20_000;
/// Largest `n` whose avoider count is brute-forced.
pub const EXHAUSTIVE_PERMUTATION_MAX: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeMode {
    MonteCarlo,
    GridBracket,
}

impl VolumeMode {
    pub fn name(self) -> &'static str {
        match self {
            VolumeMode::MonteCarlo => "mc",
            VolumeMode::GridBracket => "grid-bracket",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub property: String,
    pub n: u32,
    pub mode: VolumeMode,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Sample count (Monte Carlo) or grid resolution (bracket).
    pub samples_or_k: u64,
    pub seed: Option<u64>,
    pub elapsed_ms: Option<u64>,
    /// Hit count and standard error, Monte Carlo only.
    pub hits: Option<u64>,
    pub std_error: Option<f64>,
    /// Exact `p/q` bracket ends, grid mode only.
    pub inner_exact: Option<String>,
    pub outer_exact: Option<String>,
}

impl VolumeEstimate {
    pub const CSV_HEADER: [&'static str; 9] =
        ["property", "n", "mode", "estimate", "ci_low", "ci_high", "samples_or_k", "seed", "elapsed_ms"];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.property.clone(),
            self.n.to_string(),
            self.mode.name().to_string(),
            format!("{}", self.estimate),
            format!("{}", self.ci_low),
            format!("{}", self.ci_high),
            self.samples_or_k.to_string(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.elapsed_ms.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }

    /// Standard error of the hit fraction under a known true volume.
    pub fn sigma_at(&self, truth: f64) -> f64 {
        (truth * (1.0 - truth) / self.samples_or_k as f64).sqrt()
    }
}

/// Hit fraction of `samples` uniform points of `[0,1]^{V_n}`. Sample `i`
/// uses the stream keyed by `(seed, i)`, so `workers` never changes the
/// result.
pub fn estimate_volume(property: &dyn Property, n: u32, samples: u64, seed: u64, workers: usize) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(Error::Parameter("samples must be at least 1".into()));
    }
    let dim = property.family().dimension(n)?;
    let hits = count_hits(dim, samples, seed, workers, |x| property.contains(n, x));
    let p = Proportion::new(hits, samples);
    Ok(VolumeEstimate {
        property: property.descriptor().label(),
        n,
        mode: VolumeMode::MonteCarlo,
        estimate: p.estimate,
        ci_low: p.ci_low,
        ci_high: p.ci_high,
        samples_or_k: samples,
        seed: Some(seed),
        elapsed_ms: None,
        hits: Some(hits),
        std_error: Some(p.std_error),
        inner_exact: None,
        outer_exact: None,
    })
}

/// Refuses with a starvation error when a pilot run predicts fewer than
/// [`MIN_EXPECTED_HITS`] hits from `samples` draws.
pub fn check_feasible(property: &dyn Property, n: u32, samples: u64, seed: u64, workers: usize) -> Result<()> {
    let pilot = samples.min(PILOT_SAMPLES);
    let dim = property.family().dimension(n)?;
    let hits = count_hits(dim, pilot, derive_seed(seed, 0x9110), workers, |x| property.contains(n, x));
    let expected = hits as f64 / pilot as f64 * samples as f64;
    if expected < MIN_EXPECTED_HITS {
        return Err(Error::Starvation(format!(
            "{} at n={n}: pilot predicts {expected:.1} hits from {samples} samples (need {MIN_EXPECTED_HITS})",
            property.descriptor().label()
        )));
    }
    Ok(())
}

/// Inner and outer volume bounds from exact cell classification on the
/// `k`-grid: Inside cells below, Inside plus Boundary cells above.
/// Hull-determined properties classify whole blocks of cells at once.
pub fn grid_bracket(property: &dyn Property, n: u32, k: u32, budget: u64) -> Result<VolumeEstimate> {
    if property.exactness_at(n) != Exactness::Exact {
        return Err(Error::NotExact(format!(
            "{} has no exact cell classification at n={n}",
            property.descriptor().label()
        )));
    }
    if k == 0 {
        return Err(Error::Parameter("grid resolution must be at least 1".into()));
    }
    let dim = property.family().dimension(n)?;
    let total = num_traits::pow(BigUint::from(k), dim);
    let hull = property.classify_range(n, k, &vec![0; dim], &vec![k; dim], None).is_some();
    if !hull && total > BigUint::from(budget) {
        return Err(Error::Budget(format!("{k}^{dim} grid cells exceed the budget {budget}")));
    }
    let mut walk = BracketWalk {
        property,
        n,
        k,
        hull,
        lo: vec![0; dim],
        hi: vec![k; dim],
        inside: BigUint::zero(),
        boundary: BigUint::zero(),
        nodes: 0,
        budget,
        block: (0..=dim).map(|r| num_traits::pow(BigUint::from(k), r)).collect(),
    };
    walk.visit(0)?;
    let total = BigRational::from_integer(total.into());
    let inner = BigRational::from_integer(walk.inside.clone().into()) / &total;
    let outer = BigRational::from_integer((walk.inside + walk.boundary).into()) / &total;
    let (lo, hi) = (inner.to_f64().unwrap_or(0.0), outer.to_f64().unwrap_or(1.0));
    Ok(VolumeEstimate {
        property: property.descriptor().label(),
        n,
        mode: VolumeMode::GridBracket,
        estimate: (lo + hi) / 2.0,
        ci_low: lo,
        ci_high: hi,
        samples_or_k: k as u64,
        seed: None,
        elapsed_ms: None,
        hits: None,
        std_error: None,
        inner_exact: Some(format!("{}/{}", inner.numer(), inner.denom())),
        outer_exact: Some(format!("{}/{}", outer.numer(), outer.denom())),
    })
}

struct BracketWalk<'a> {
    property: &'a dyn Property,
    n: u32,
    k: u32,
    hull: bool,
    lo: Vec<u32>,
    hi: Vec<u32>,
    inside: BigUint,
    boundary: BigUint,
    nodes: u64,
    budget: u64,
    /// `k^r` for the cells below a block with `r` free coordinates.
    block: Vec<BigUint>,
}

impl BracketWalk<'_> {
    fn visit(&mut self, q: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget(format!("grid bracket visited more than {} blocks", self.budget)));
        }
        let dim = self.lo.len();
        let free = dim - q;
        if self.hull {
            match self.property.classify_range(self.n, self.k, &self.lo, &self.hi, None) {
                Some(CellClass::Inside) => {
                    self.inside += &self.block[free];
                    return Ok(());
                }
                Some(CellClass::Outside) => return Ok(()),
                _ if free == 0 => {
                    self.boundary += 1u32;
                    return Ok(());
                }
                _ => {}
            }
        } else if free == 0 {
            match self.property.classify_cell(self.n, self.k, &self.lo) {
                CellClass::Inside => self.inside += 1u32,
                CellClass::Boundary => self.boundary += 1u32,
                CellClass::Outside => {}
            }
            return Ok(());
        }
        for j in 0..self.k {
            self.lo[q] = j;
            self.hi[q] = j + 1;
            self.visit(q + 1)?;
        }
        self.lo[q] = 0;
        self.hi[q] = self.k;
        Ok(())
    }
}

/// Normalised entropy at one level, with its interval and the closed-form
/// extremal lower bound on the volume when one is known.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendRow {
    pub n: u32,
    pub dimension: usize,
    /// Seed given to the trend; each level derives its own from it.
    pub seed: u64,
    pub volume: VolumeEstimate,
    /// `-ln(vol)/|V_n|` and its interval from the Wilson bounds.
    pub normalized_entropy: f64,
    pub entropy_low: f64,
    pub entropy_high: f64,
    /// `vol^{1/|V_n|}`.
    pub density: f64,
    /// Volume of the extremal box, which lies inside `P_n`.
    pub extremal_volume: Option<f64>,
    /// Whether `estimate >= extremal_volume - 3 sigma`.
    pub bound_respected: Option<bool>,
}

/// Monte Carlo normalised entropy for each level. Each level runs a pilot
/// pass first and refuses when fewer than 100 hits are expected.
pub fn density_trend(
    property: &dyn Property,
    levels: &[u32],
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<TrendRow>> {
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let level_seed = derive_seed(seed, n as u64);
        check_feasible(property, n, samples, level_seed, workers)?;
        let est = estimate_volume(property, n, samples, level_seed, workers)?;
        let dim = property.family().dimension(n)?;
        let d = dim.max(1) as f64;
        let neg_ln = |v: f64| if v <= 0.0 { f64::INFINITY } else { -v.ln() / d };
        let extremal_volume = analytic_extremal(&property.descriptor(), n).ok().map(|r| r.volume);
        let bound_respected = extremal_volume.map(|b| est.estimate >= b - 3.0 * est.sigma_at(b));
        rows.push(TrendRow {
            n,
            dimension: dim,
            seed,
            normalized_entropy: neg_ln(est.estimate),
            entropy_low: neg_ln(est.ci_high),
            entropy_high: neg_ln(est.ci_low),
            density: est.estimate.powf(1.0 / d),
            extremal_volume,
            bound_respected,
            volume: est,
        });
    }
    Ok(rows)
}

impl TrendRow {
    pub const CSV_HEADER: [&'static str; 14] = [
        "property",
        "n",
        "dimension",
        "estimate",
        "ci_low",
        "ci_high",
        "normalized_entropy",
        "entropy_low",
        "entropy_high",
        "density",
        "samples",
        "seed",
        "extremal_volume",
        "bound_respected",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.volume.property.clone(),
            self.n.to_string(),
            self.dimension.to_string(),
            format!("{}", self.volume.estimate),
            format!("{}", self.volume.ci_low),
            format!("{}", self.volume.ci_high),
            format!("{}", self.normalized_entropy),
            format!("{}", self.entropy_low),
            format!("{}", self.entropy_high),
            format!("{}", self.density),
            self.volume.samples_or_k.to_string(),
            self.seed.to_string(),
            self.extremal_volume.map(|v| v.to_string()).unwrap_or_default(),
            self.bound_respected.map(|v| v.to_string()).unwrap_or_default(),
        ]
    }
}

/// Number of permutations of `[n]` avoiding `pi`, by enumeration.
pub fn count_avoiders(pattern: &Pattern, n: u32) -> u64 {
    let items: Vec<u32> = (1..=n).collect();
    let mut count = 0;
    for_each_permutation(&items, |s| {
        if pattern.avoids(s) {
            count += 1;
        }
    });
    count
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StanleyWilfRow {
    pub n: u32,
    pub samples: u64,
    pub seed: u64,
    pub hits: u64,
    /// `n! * vol(P_n)` and its Wilson interval.
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Standard error of `n! * vol`.
    pub sigma: f64,
    pub exact: Option<u64>,
    /// `|estimate - exact| <= 3 sigma`, with sigma taken at the exact value.
    pub within_3_sigma: Option<bool>,
    /// `estimate^{1/n}`.
    pub growth_root: f64,
}

impl StanleyWilfRow {
    pub const CSV_HEADER: [&'static str; 9] =
        ["n", "samples", "seed", "estimate", "ci_low", "ci_high", "sigma", "exact", "within_3_sigma"];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.samples.to_string(),
            self.seed.to_string(),
            format!("{}", self.estimate),
            format!("{}", self.ci_low),
            format!("{}", self.ci_high),
            format!("{}", self.sigma),
            self.exact.map(|e| e.to_string()).unwrap_or_default(),
            self.within_3_sigma.map(|e| e.to_string()).unwrap_or_default(),
        ]
    }
}

/// Estimates `|S_n(pi)| = n! vol(P_n)` by sampling, attaching the exact
/// count for `n <= 8`.
pub fn stanley_wilf_estimate(
    pi: &[u32],
    levels: &[u32],
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<StanleyWilfRow>> {
    let pattern = Pattern::new(pi.to_vec())?;
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let fact = factorial(n as u64)
            .and_then(|f| f.to_f64())
            .ok_or_else(|| Error::Capacity(format!("{n}! overflows")))?;
        let level_seed = derive_seed(seed, n as u64);
        check_feasible(&pattern, n, samples, level_seed, workers)?;
        let est = estimate_volume(&pattern, n, samples, level_seed, workers)?;
        let exact = (n <= EXHAUSTIVE_PERMUTATION_MAX).then(|| count_avoiders(&pattern, n));
        let sigma_at = |p: f64| fact * (p * (1.0 - p) / samples as f64).sqrt();
        let estimate = fact * est.estimate;
        let within = exact.map(|e| (estimate - e as f64).abs() <= 3.0 * sigma_at(e as f64 / fact));
        rows.push(StanleyWilfRow {
            n,
            samples,
            seed: level_seed,
            hits: est.hits.unwrap_or(0),
            estimate,
            ci_low: fact * est.ci_low,
            ci_high: fact * est.ci_high,
            sigma: sigma_at(est.estimate),
            exact,
            within_3_sigma: within,
            growth_root: estimate.powf(1.0 / n as f64),
        });
    }
    Ok(rows)
}
