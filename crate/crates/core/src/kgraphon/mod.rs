//! [k]-decorated graphs and step [k]-graphons.
//!
//! A [k]-graphon sends each point of `[0,1]^2` to a probability distribution
//! on the colours `[k]`. Only step functions are represented: `m` parts of
//! `[0,1]` and one distribution per pair of parts.

mod cut;
mod growth;

pub use cut::{cut_distance, cut_distance_graphs, delta_cut, CutMode, CutValue, DeltaCut, EXACT_CUT_MAX_PARTS};
pub use growth::{count_colourings, growth_rate_audit, ColourPredicate, ColourProperty, GrowthRateReport, GrowthRow, MonochromaticTriangleFree};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boxes::Template;
use crate::combinatorics::edge_index;
use crate::error::{Error, Result};
use crate::ssee::Family;

/// Probabilities at or below this are treated as zero when taking supports.
pub const SUPPORT_TOL: f64 = 1e-15;
const SUM_TOL: f64 = 1e-12;

/// `sum_i -p_i log_k p_i`, with `0 log 0 = 0`.
pub fn k_ary_entropy(probs: &[f64]) -> f64 {
    let k = probs.len();
    if k <= 1 {
        return 0.0;
    }
    let ln_k = (k as f64).ln();
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum::<f64>()
        / ln_k
}

/// A probability distribution on `[k]` (stored 0-based).
#[derive(Clone, Debug, PartialEq)]
pub struct KDistribution {
    probs: Vec<f64>,
}

impl KDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Parameter("distribution needs at least one colour".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || p.is_infinite()) {
            return Err(Error::Parameter("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::Parameter(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(k: u32) -> Self {
        Self {
            probs: vec![1.0 / k as f64; k as usize],
        }
    }

    /// Point mass on colour `c` (1-based).
    pub fn point_mass(k: u32, c: u32) -> Result<Self> {
        if c == 0 || c > k {
            return Err(Error::Parameter(format!("colour {c} outside [1,{k}]")));
        }
        let mut probs = vec![0.0; k as usize];
        probs[c as usize - 1] = 1.0;
        Ok(Self { probs })
    }

    /// Uniform over the colours whose bits are set (bit `i-1` = colour `i`).
    pub fn uniform_over(k: u32, mask: u64) -> Result<Self> {
        let size = mask.count_ones();
        if size == 0 || (k < 64 && mask >> k != 0) {
            return Err(Error::Parameter("colour set must be a nonempty subset of [k]".into()));
        }
        let probs = (0..k).map(|i| if mask >> i & 1 == 1 { 1.0 / size as f64 } else { 0.0 }).collect();
        Ok(Self { probs })
    }

    pub fn k(&self) -> u32 {
        self.probs.len() as u32
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy(&self) -> f64 {
        k_ary_entropy(&self.probs)
    }

    /// Colours with positive probability, as a bitmask.
    pub fn support(&self) -> u64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > SUPPORT_TOL)
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    /// Draws a colour (1-based) from the distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = i;
            if u < acc {
                return i as u32 + 1;
            }
        }
        last as u32 + 1
    }
}

/// Step [k]-graphon: `m` parts of `[0,1]` and a symmetric `m x m` grid of
/// distributions.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGraphon {
    k: u32,
    boundaries: Vec<f64>,
    grid: Vec<KDistribution>,
}

impl StepGraphon {
    /// `boundaries` runs from 0 to 1 with `m + 1` strictly increasing
    /// entries; `grid` is row-major `m x m`.
    pub fn new(k: u32, boundaries: Vec<f64>, grid: Vec<KDistribution>) -> Result<Self> {
        let m = boundaries.len().saturating_sub(1);
        if m == 0 || boundaries[0] != 0.0 || boundaries[m] != 1.0 || boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("part boundaries must increase strictly from 0 to 1".into()));
        }
        if grid.len() != m * m {
            return Err(Error::Parameter(format!("grid needs {} entries for {m} parts, got {}", m * m, grid.len())));
        }
        if grid.iter().any(|d| d.k() != k) {
            return Err(Error::Parameter(format!("every tile must be a distribution on [{k}]")));
        }
        for a in 0..m {
            for b in a + 1..m {
                let (x, y) = (&grid[a * m + b], &grid[b * m + a]);
                if x.probs.iter().zip(&y.probs).any(|(p, q)| (p - q).abs() > SUM_TOL) {
                    return Err(Error::Parameter(format!("grid is not symmetric at parts ({a},{b})")));
                }
            }
        }
        Ok(Self { k, boundaries, grid })
    }

    pub fn equal_parts(k: u32, m: usize, grid: Vec<KDistribution>) -> Result<Self> {
        let boundaries = (0..=m).map(|i| i as f64 / m as f64).collect();
        Self::new(k, boundaries, grid)
    }

    pub fn constant(dist: KDistribution) -> Self {
        Self {
            k: dist.k(),
            boundaries: vec![0.0, 1.0],
            grid: vec![dist],
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn parts(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn widths(&self) -> Vec<f64> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn has_equal_parts(&self) -> bool {
        let m = self.parts() as f64;
        self.widths().iter().all(|w| (w - 1.0 / m).abs() <= 1e-12)
    }

    pub fn tile(&self, a: usize, b: usize) -> &KDistribution {
        &self.grid[a * self.parts() + b]
    }

    /// Part containing `x` (1 belongs to the last part).
    pub fn part_of(&self, x: f64) -> usize {
        let m = self.parts();
        self.boundaries[1..m].partition_point(|&b| b <= x)
    }

    pub fn at(&self, x: f64, y: f64) -> &KDistribution {
        self.tile(self.part_of(x), self.part_of(y))
    }

    /// `int int h_k(W(x,y)) dx dy`, summed tile by tile.
    pub fn entropy(&self) -> f64 {
        let w = self.widths();
        let m = self.parts();
        let mut total = 0.0;
        for a in 0..m {
            for b in 0..m {
                total += w[a] * w[b] * self.tile(a, b).entropy();
            }
        }
        total
    }

    /// `W(pi(x), pi(y))` for a permutation of equal parts.
    pub fn permute_parts(&self, perm: &[usize]) -> Result<Self> {
        let m = self.parts();
        if perm.len() != m || !self.has_equal_parts() {
            return Err(Error::UnsupportedLayout("part permutations need equal parts".into()));
        }
        let mut grid = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                grid.push(self.tile(perm[a], perm[b]).clone());
            }
        }
        Ok(Self {
            k: self.k,
            boundaries: self.boundaries.clone(),
            grid,
        })
    }

    /// Same graphon over the given finer boundaries.
    pub fn refine(&self, boundaries: &[f64]) -> Result<Self> {
        let m = boundaries.len() - 1;
        let mids: Vec<usize> = boundaries.windows(2).map(|w| self.part_of((w[0] + w[1]) / 2.0)).collect();
        let mut grid = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                grid.push(self.tile(mids[a], mids[b]).clone());
            }
        }
        Self::new(self.k, boundaries.to_vec(), grid)
    }

    /// The `W`-random template on `n` vertices: `t(ij)` is the support of
    /// `W(x_i, x_j)` for uniform `x`.
    pub fn random_template<R: Rng + ?Sized>(&self, n: u32, rng: &mut R) -> Result<Template> {
        let (parts, pairs) = self.random_pairs(n, rng)?;
        let masks = pairs.iter().map(|&(i, j)| self.tile(parts[i], parts[j]).support()).collect();
        Template::new(Family::CompleteGraphEdges, n, self.k, masks)
    }

    /// The `W`-random colouring: each edge colour drawn from `W(x_i, x_j)`.
    pub fn random_colouring<R: Rng + ?Sized>(&self, n: u32, rng: &mut R) -> Result<KColouredGraph> {
        let (parts, pairs) = self.random_pairs(n, rng)?;
        let colours = pairs.iter().map(|&(i, j)| self.tile(parts[i], parts[j]).sample(rng)).collect();
        KColouredGraph::new(n, self.k, colours)
    }

    fn random_pairs<R: Rng + ?Sized>(&self, n: u32, rng: &mut R) -> Result<(Vec<usize>, Vec<(usize, usize)>)> {
        if n < 2 {
            return Err(Error::Parameter("W-random objects need n >= 2".into()));
        }
        let parts: Vec<usize> = (0..n).map(|_| self.part_of(rng.gen())).collect();
        let pairs = (0..n as usize).flat_map(|i| (i + 1..n as usize).map(move |j| (i, j))).collect();
        Ok((parts, pairs))
    }

    pub fn to_json(&self) -> StepGraphonJson {
        let m = self.parts();
        StepGraphonJson {
            k: self.k,
            m,
            grid: (0..m).map(|a| (0..m).map(|b| self.tile(a, b).probs.clone()).collect()).collect(),
            boundaries: (!self.has_equal_parts()).then(|| self.boundaries.clone()),
        }
    }

    pub fn from_json(json: &StepGraphonJson) -> Result<Self> {
        if json.grid.len() != json.m || json.grid.iter().any(|row| row.len() != json.m) {
            return Err(Error::Malformed(format!("grid must be {0} x {0}", json.m)));
        }
        let grid = json
            .grid
            .iter()
            .flatten()
            .map(|p| {
                if p.len() != json.k as usize {
                    return Err(Error::Malformed(format!("tile has {} probabilities, expected {}", p.len(), json.k)));
                }
                KDistribution::new(p.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        match &json.boundaries {
            Some(b) => Self::new(json.k, b.clone(), grid),
            None => Self::equal_parts(json.k, json.m, grid),
        }
    }
}

/// `{"k":…, "m":…, "grid":[[[p1..pk],…],…]}`, optional `boundaries`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepGraphonJson {
    pub k: u32,
    pub m: usize,
    pub grid: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundaries: Option<Vec<f64>>,
}

/// A complete graph on `n` vertices with every edge coloured from `[k]`,
/// edges in the order (1,2), (1,3), …, (2,3), …
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KColouredGraph {
    pub n: u32,
    pub k: u32,
    pub colours: Vec<u32>,
}

impl KColouredGraph {
    pub fn new(n: u32, k: u32, colours: Vec<u32>) -> Result<Self> {
        let edges = (n as usize) * (n as usize).saturating_sub(1) / 2;
        if colours.len() != edges {
            return Err(Error::Parameter(format!("{n} vertices need {edges} edge colours, got {}", colours.len())));
        }
        if k == 0 || colours.iter().any(|&c| c == 0 || c > k) {
            return Err(Error::Parameter(format!("edge colours must lie in [1,{k}]")));
        }
        Ok(Self { n, k, colours })
    }

    /// Colour of edge `{u, v}` (0-based vertices, `u != v`).
    pub fn colour(&self, u: u32, v: u32) -> u32 {
        self.colours[edge_index(self.n, u, v) as usize]
    }

    /// Graphon with `n` equal parts, a point mass on each edge colour off
    /// the diagonal and the uniform distribution on the diagonal.
    pub fn to_graphon(&self) -> StepGraphon {
        let t = Template::from_colouring(Family::CompleteGraphEdges, self.n.max(2), self.k, &self.colours)
            .expect("valid colouring");
        template_to_graphon(&t).expect("complete-graph template")
    }
}

/// `W_t`: `n` equal parts; tile `(i,j)`, `i != j`, is uniform over `t(ij)`
/// and diagonal tiles are uniform over `[k]`.
pub fn template_to_graphon(t: &Template) -> Result<StepGraphon> {
    if t.family() != Family::CompleteGraphEdges {
        return Err(Error::Parameter("graphons come from templates over complete-graph edges".into()));
    }
    let n = t.level();
    let k = t.k();
    let mut grid = Vec::with_capacity((n * n) as usize);
    for a in 0..n {
        for b in 0..n {
            grid.push(if a == b {
                KDistribution::uniform(k)
            } else {
                KDistribution::uniform_over(k, t.masks()[edge_index(n, a, b) as usize])?
            });
        }
    }
    StepGraphon::equal_parts(k, n as usize, grid)
}

/// Entropy of `W_t` by direct integration next to the closed forms it is
/// compared with.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyIdentity {
    pub n: u32,
    pub k: u32,
    /// `Ent(t)` in base-`k` units.
    pub template_entropy: f64,
    /// `Ent(W_t)` from the tile sum.
    pub integral: f64,
    /// `2 Ent(t) / n^2 + 1/n`: off-diagonal tiles plus the diagonal.
    pub tile_identity: f64,
    /// `(Ent(t) + (n-1)/2) / C(n,2)`, which omits the `(n-1)/n` factor on
    /// `Ent(t)`.
    pub uncorrected_identity: f64,
    /// `uncorrected_identity - integral`.
    pub discrepancy: f64,
    /// Whether the tile identity matches the integral to 1e-12.
    pub holds: bool,
}

pub fn entropy_identity(t: &Template) -> Result<EntropyIdentity> {
    let w = template_to_graphon(t)?;
    let n = t.level() as f64;
    let ent_t = t.entropy();
    let integral = w.entropy();
    let tile_identity = 2.0 * ent_t / (n * n) + 1.0 / n;
    let pairs = n * (n - 1.0) / 2.0;
    let uncorrected_identity = (ent_t + (n - 1.0) / 2.0) / pairs;
    Ok(EntropyIdentity {
        n: t.level(),
        k: t.k(),
        template_entropy: ent_t,
        integral,
        tile_identity,
        uncorrected_identity,
        discrepancy: uncorrected_identity - integral,
        holds: (integral - tile_identity).abs() <= 1e-12,
    })
}
